mod common;

use common::*;
use leadcons_core::digraph::example;
use leadcons_core::sim::{self, DelayFunction, SimConfig, SwitchingSchedule};
use leadcons_core::stability::h_matrix;
use leadcons_core::{LeaderTopology, WeightedDigraph};
use rand::Rng;

/// `-(L+B) x_d - k (v - v0·1) + B·1·x0_d`
fn matrix_form(t: &LeaderTopology, k: f64, xd: &[f64], x0d: f64, v: &[f64], v0: f64) -> Vec<f64> {
    let h = h_matrix(t);
    let hx = h.mul_vec(xd);
    (0..t.n())
        .map(|i| -hx[i] - k * (v[i] - v0) + t.leader_weights()[i] * x0d)
        .collect()
}

fn config(
    topologies: Vec<LeaderTopology>,
    schedule: SwitchingSchedule,
    x: Vec<f64>,
    v: Vec<f64>,
) -> SimConfig {
    SimConfig {
        topologies,
        schedule,
        k: 3.0,
        delay: DelayFunction::Constant(0.0),
        v0: 0.0,
        x0_init: 0.0,
        x_init: x,
        v_init: v,
        t_end: 5.0,
        dt: 1e-2,
    }
}

#[test]
fn agent_form_equals_matrix_form() {
    let mut rng = rng(71);
    let mut topologies = vec![example::topology1(), example::topology2()];
    for _ in 0..50 {
        topologies.push(random_topology(&mut rng, 6, 0.4));
    }
    for t in &topologies {
        for _ in 0..10 {
            let n = t.n();
            let xd: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let (x0d, v0, k) = (
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(0.0..10.0),
            );
            let agent = sim::control_input(t, k, &xd, x0d, &v, v0);
            let matrix = matrix_form(t, k, &xd, x0d, &v, v0);
            for (a, m) in agent.iter().zip(&matrix) {
                assert!((a - m).abs() <= 1e-12, "{a} vs {m}");
            }
        }
    }
}

/// Undelayed RK4 of `x' = v, v' = -(L+B)x - k(v - v0) + B·1·x0(t)`.
fn plain_rk4(cfg: &SimConfig) -> Vec<(Vec<f64>, Vec<f64>)> {
    let n = cfg.n();
    let mut x = cfg.x_init.clone();
    let mut v = cfg.v_init.clone();
    let mut out = vec![(x.clone(), v.clone())];
    let h = cfg.dt;
    for step in 0..cfg.steps() {
        let t = step as f64 * h;
        // topology held at its step-start value for every stage
        let top = &cfg.topologies[cfg.schedule.active(t)];
        let f = |s: f64, x: &[f64], v: &[f64]| {
            (
                v.to_vec(),
                matrix_form(top, cfg.k, x, cfg.x0_init + cfg.v0 * s, v, cfg.v0),
            )
        };
        let axpy = |a: &[f64], c: f64, b: &[f64]| {
            a.iter().zip(b).map(|(p, q)| p + c * q).collect::<Vec<_>>()
        };
        let (k1x, k1v) = f(t, &x, &v);
        let (k2x, k2v) = f(
            t + h / 2.0,
            &axpy(&x, h / 2.0, &k1x),
            &axpy(&v, h / 2.0, &k1v),
        );
        let (k3x, k3v) = f(
            t + h / 2.0,
            &axpy(&x, h / 2.0, &k2x),
            &axpy(&v, h / 2.0, &k2v),
        );
        let (k4x, k4v) = f(t + h, &axpy(&x, h, &k3x), &axpy(&v, h, &k3v));
        for i in 0..n {
            x[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
            v[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        }
        out.push((x.clone(), v.clone()));
    }
    out
}

#[test]
fn zero_delay_reduces_to_plain_rk4() {
    let mut cfg = config(
        vec![example::topology1(), example::topology2()],
        SwitchingSchedule::new(vec![0, 1], 0.7).unwrap(),
        vec![1.5, -0.3, 2.0, -1.0],
        vec![0.2, 0.0, -0.5, 0.9],
    );
    cfg.v0 = 0.8;
    cfg.x0_init = -0.4;
    let tr = sim::integrate(&cfg).unwrap();
    let reference = plain_rk4(&cfg);
    assert_eq!(tr.len(), reference.len());
    for (i, (x, v)) in reference.iter().enumerate() {
        for a in 0..4 {
            assert!((tr.x(i)[a] - x[a]).abs() <= 1e-10, "sample {i}");
            assert!((tr.v(i)[a] - v[a]).abs() <= 1e-10, "sample {i}");
        }
    }
}

#[test]
fn scalar_undelayed_loop_matches_closed_form() {
    // x'' + 3x' + x = 0, x(0) = 1, x'(0) = 0
    let t = LeaderTopology::new(WeightedDigraph::empty(1), vec![1.0]).unwrap();
    let mut cfg = config(vec![t], SwitchingSchedule::fixed(0), vec![1.0], vec![0.0]);
    cfg.dt = 1e-3;
    let tr = sim::integrate(&cfg).unwrap();
    let (s1, s2) = ((-3.0 + 5f64.sqrt()) / 2.0, (-3.0 - 5f64.sqrt()) / 2.0);
    let (a, b) = (s2 / (s2 - s1), -s1 / (s2 - s1));
    let exact = |t: f64| a * (s1 * t).exp() + b * (s2 * t).exp();
    let last = tr.len() - 1;
    assert!((tr.times[last] - 5.0).abs() < 1e-12);
    assert!((tr.ex(last)[0] - exact(5.0)).abs() < 1e-6);
    let exact_v = a * s1 * (s1 * 5.0).exp() + b * s2 * (s2 * 5.0).exp();
    assert!((tr.ev(last)[0] - exact_v).abs() < 1e-6);
}

fn terminal_state(dt: f64) -> Vec<f64> {
    let mut cfg = config(
        vec![example::topology1()],
        SwitchingSchedule::fixed(0),
        vec![1.0, -1.5, 0.5, 2.0],
        vec![0.3, -0.2, 0.0, 0.1],
    );
    // delay a multiple of every step so breaking points fall on the grid
    cfg.delay = DelayFunction::Constant(0.4);
    cfg.dt = dt;
    cfg.t_end = 8.0;
    let tr = sim::integrate(&cfg).unwrap();
    let last = tr.len() - 1;
    tr.x(last).iter().chain(tr.v(last)).copied().collect()
}

#[test]
fn step_halving_shows_fourth_order_trend() {
    let coarse = terminal_state(0.04);
    let mid = terminal_state(0.02);
    let fine = terminal_state(0.01);
    let diff = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max)
    };
    let d1 = diff(&coarse, &mid);
    let d2 = diff(&mid, &fine);
    let ratio = d1 / d2;
    eprintln!("step-halving ratio {ratio}");
    // the ratio tends to 16 from either side for an exactly fourth-order scheme
    let order = ratio.log2();
    assert!((order - 4.0).abs() < 0.5, "observed order {order}");
}

#[test]
fn equilibrium_is_preserved() {
    // stationary leader: exact
    let mut cfg = config(
        vec![example::topology1(), example::topology2()],
        SwitchingSchedule::new(vec![0, 1], 1.0).unwrap(),
        vec![2.5; 4],
        vec![0.0; 4],
    );
    cfg.x0_init = 2.5;
    cfg.delay = DelayFunction::AbsCos(0.03);
    cfg.dt = 1e-3;
    let tr = sim::integrate(&cfg).unwrap();
    assert!(tr.err_x.iter().chain(&tr.err_v).all(|&e| e == 0.0));

    // moving leader: rounding only
    cfg.v0 = 1.0;
    cfg.v_init = vec![1.0; 4];
    let tr = sim::integrate(&cfg).unwrap();
    let worst = tr
        .err_x
        .iter()
        .chain(&tr.err_v)
        .fold(0.0f64, |m, e| m.max(e.abs()));
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn runs_are_deterministic_and_leader_is_exact() {
    let mut cfg = config(
        vec![example::topology1(), example::topology2()],
        SwitchingSchedule::new(vec![0, 1], 1.0).unwrap(),
        vec![1.0, -2.0, 0.5, 1.5],
        vec![0.0, 0.5, -0.5, 1.0],
    );
    cfg.k = 9.0;
    cfg.v0 = 0.7;
    cfg.x0_init = 3.0;
    cfg.delay = DelayFunction::AbsCos(0.015);
    cfg.dt = 1e-3;
    let a = sim::integrate(&cfg).unwrap();
    let b = sim::integrate(&cfg).unwrap();
    assert_eq!(a, b);
    for (i, &t) in a.times.iter().enumerate() {
        assert!((a.leader_x[i] - (3.0 + 0.7 * t)).abs() <= 1e-12);
        for j in 0..4 {
            assert_eq!(a.ex(i)[j], a.x(i)[j] - a.leader_x[i]);
            assert_eq!(a.ev(i)[j], a.v(i)[j] - 0.7);
        }
    }
    // switching follows the schedule at sample times
    assert_eq!(a.sigma[0], 0);
    assert_eq!(a.sigma[1500], 1);
    assert_eq!(a.sigma[2500], 0);
}

#[test]
fn metrics_for_equilibrium_convergent_and_undamped_runs() {
    let mut cfg = config(
        vec![example::topology1()],
        SwitchingSchedule::fixed(0),
        vec![0.0; 4],
        vec![0.0; 4],
    );
    cfg.delay = DelayFunction::AbsCos(0.03);
    cfg.dt = 1e-3;
    let m = sim::error_metrics(&sim::integrate(&cfg).unwrap()).unwrap();
    assert_eq!(
        (m.final_err_x, m.final_err_v, m.settle_time),
        (0.0, 0.0, Some(0.0))
    );

    cfg.x_init = vec![1.0, -2.0, 0.5, 1.5];
    cfg.t_end = 30.0;
    let m = sim::error_metrics(&sim::integrate(&cfg).unwrap()).unwrap();
    let settle = m.settle_time.expect("converges");
    assert!(settle > 0.0 && settle < 30.0);

    cfg.k = 0.0;
    cfg.t_end = 20.0;
    let m = sim::error_metrics(&sim::integrate(&cfg).unwrap()).unwrap();
    assert_eq!(m.settle_time, None);
}

#[test]
fn delay_slows_but_does_not_break_convergence_within_bound() {
    let base = |delay| {
        let mut cfg = config(
            vec![example::topology1()],
            SwitchingSchedule::fixed(0),
            vec![1.0, -1.0, 0.5, 2.0],
            vec![0.0; 4],
        );
        cfg.delay = delay;
        cfg.dt = 1e-3;
        cfg.t_end = 40.0;
        sim::error_metrics(&sim::integrate(&cfg).unwrap()).unwrap()
    };
    let undelayed = base(DelayFunction::Constant(0.0));
    let delayed = base(DelayFunction::AbsCos(0.03));
    // slowest closed-loop root is about -0.133 at k = 3
    assert!(undelayed.final_err_x < 2e-2, "{undelayed:?}");
    assert!(delayed.final_err_x < 2e-2, "{delayed:?}");
    assert!((delayed.final_err_x - undelayed.final_err_x).abs() < 0.5 * undelayed.final_err_x);
}
