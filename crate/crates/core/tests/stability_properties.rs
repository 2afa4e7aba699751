mod common;

use common::*;
use leadcons_core::digraph::example;
use leadcons_core::stability::{self, analyze_fixed, analyze_switched, GainThreshold};
use leadcons_core::{linalg, LeaderTopology, Matrix, WeightedDigraph};
use rand::Rng;

fn reachable_topology(rng: &mut impl Rng, max_n: usize) -> LeaderTopology {
    loop {
        let t = random_topology(rng, max_n, 0.4);
        if t.leader_globally_reachable() {
            return t;
        }
    }
}

fn scaled(t: &LeaderTopology, c: f64) -> LeaderTopology {
    let g = WeightedDigraph::new(
        t.n(),
        t.graph()
            .arcs()
            .iter()
            .map(|a| (a.from, a.to, c * a.weight)),
    )
    .unwrap();
    LeaderTopology::new(g, t.leader_weights().iter().map(|b| c * b).collect()).unwrap()
}

#[test]
fn q_definite_above_stricter_threshold() {
    let mut rng = rng(31);
    for _ in 0..60 {
        let t = reachable_topology(&mut rng, 5);
        // learn the constants, then pick k above the stricter reading
        let probe = analyze_fixed(&t, 1e6, 1.05).unwrap();
        let k = probe.mu_bar / probe.lambda_bar + 1.0 + rng.gen_range(0.01..3.0);
        let a = analyze_fixed(&t, k, 1.05).unwrap();
        assert!(a.q_matrix.is_symmetric(0.0));
        assert!(linalg::is_positive_definite(&a.q_matrix).unwrap());
        assert!(a.lyapunov_residual <= 1e-8);
        assert!(a.tau > 0.0);
    }
}

#[test]
fn q_matrix_equals_negated_lyapunov_derivative() {
    let t = example::topology1();
    let k = 3.0;
    let a = analyze_fixed(&t, k, 1.05).unwrap();
    let sys = stability::system_matrices(&a.h, k).unwrap();
    let p = stability::razumikhin_matrix(&a.p_bar, k);
    let q = -&(&(&sys.f.transpose() * &p) + &(&p * &sys.f));
    assert!((&q - &a.q_matrix).max_abs() < 1e-12);
}

#[test]
fn switched_q_matrix_equals_negated_lyapunov_derivative() {
    let k = 9.0;
    let h = stability::h_matrix(&example::topology2());
    let sys = stability::system_matrices(&h, k).unwrap();
    let n = h.rows();
    let id = Matrix::identity(n);
    let phi = Matrix::block2(&id.scale(k), &id, &id, &id);
    let q = -&(&(&sys.f.transpose() * &phi) + &(&phi * &sys.f));
    assert!((&q - &stability::switched_q_matrix(&h, k)).max_abs() < 1e-12);
}

#[test]
fn switched_tau_decreases_in_q() {
    let ts = [example::topology1(), example::topology2()];
    let mut last = f64::INFINITY;
    for q in [1.01, 1.05, 1.5, 2.0, 5.0] {
        let a = analyze_switched(&ts, 9.0, q).unwrap();
        assert!(a.tau < last);
        last = a.tau;
    }
}

#[test]
fn switched_constants_scale_with_weights() {
    let mut rng = rng(41);
    let mut checked = 0;
    while checked < 30 {
        let g = random_balanced(&mut rng, 5);
        let b = (0..g.n()).map(|_| rng.gen_range(0.5..2.0)).collect();
        let t = LeaderTopology::new(g, b).unwrap();
        let c: f64 = rng.gen_range(0.2..5.0);
        let base = analyze_switched(std::slice::from_ref(&t), 1e7, 1.05).unwrap();
        let big = analyze_switched(&[scaled(&t, c)], 1e7, 1.05).unwrap();
        assert!((&big.h_list[0] - &base.h_list[0].scale(c)).max_abs() < 1e-12);
        assert!(
            (big.lambda_tilde - c * base.lambda_tilde).abs()
                < 1e-9 * c * base.lambda_tilde.max(1.0)
        );
        assert!(
            (big.mu_tilde - c * c * base.mu_tilde).abs() < 1e-9 * c * c * base.mu_tilde.max(1.0)
        );
        checked += 1;
    }
}

#[test]
fn gain_threshold_picks_larger_reading() {
    let g = GainThreshold {
        closed_form: 1.8,
        alternate: 2.7,
    };
    assert_eq!(g.conservative(), 2.7);
    let g = GainThreshold {
        closed_form: 8.9,
        alternate: 7.9,
    };
    assert_eq!(g.conservative(), 8.9);
}

#[test]
fn fixed_analysis_rejects_gain_between_readings() {
    // 1.8553 < k < 2.7106 passes the closed form but not the alternate reading
    let err = analyze_fixed(&example::topology1(), 2.2, 1.05).unwrap_err();
    assert!(matches!(
        err,
        leadcons_core::Error::GainBelowThreshold { .. }
    ));
}
