//! Fixed-step simulation of the delayed leader-following loop.
//!
//! Each follower obeys `x_i' = v_i`, `v_i' = u_i` with
//!
//! ```text
//! u_i = Σ_j a_ij (x_j(t-r) - x_i(t-r)) + b_i (x0(t-r) - x_i(t-r)) + k (v0 - v_i(t))
//! ```
//!
//! while the leader moves in closed form, `x0(t) = x0_init + v0 t`. The
//! integrator is classical RK4. Delayed positions are read from a history of
//! step samples by cubic Hermite interpolation (the velocity is the exact
//! derivative of the position, so both are stored). A delayed instant that
//! falls inside the current step is interpolated between the step start and
//! the RK stage state, which makes the zero-delay case coincide with plain
//! RK4. Before `t = 0` the followers and the leader sit at their initial
//! positions, so the error history is constant.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use libm::{cos, fabs, floor};

use crate::{Error, LeaderTopology, Result};

/// Any state component beyond this magnitude aborts the run.
pub const DIVERGENCE_LIMIT: f64 = 1e9;

// slack for floating-point step counts and switching boundaries
const GRID_EPS: f64 = 1e-9;

/// Time-varying coupling delay `r(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DelayFunction {
    /// `r(t) = value`.
    Constant(f64),
    /// `r(t) = amplitude · |cos t|`.
    AbsCos(f64),
}

impl DelayFunction {
    /// `r(t)`.
    pub fn evaluate(&self, t: f64) -> f64 {
        match *self {
            DelayFunction::Constant(v) => v,
            DelayFunction::AbsCos(a) => a * fabs(cos(t)),
        }
    }

    /// `sup_t r(t)`.
    pub fn max_delay(&self) -> f64 {
        match *self {
            DelayFunction::Constant(v) | DelayFunction::AbsCos(v) => v,
        }
    }

    fn validate(&self) -> Result<()> {
        let v = self.max_delay();
        if v.is_finite() && v >= 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidConfig("delay must be finite and nonnegative"))
        }
    }
}

/// `r(t)` for `t >= 0`.
pub fn evaluate_delay(d: &DelayFunction, t: f64) -> f64 {
    d.evaluate(t)
}

/// True iff `sup_t r(t) < tau`.
pub fn validate_delay_against_bound(d: &DelayFunction, tau: f64) -> bool {
    d.max_delay() < tau
}

/// Cyclic switching signal: `order[0]` for `dwell` seconds, then
/// `order[1]`, and so on, wrapping around.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingSchedule {
    order: Vec<usize>,
    dwell: f64,
}

impl SwitchingSchedule {
    /// Validates `dwell > 0` and a nonempty order.
    pub fn new(order: Vec<usize>, dwell: f64) -> Result<Self> {
        if order.is_empty() {
            return Err(Error::InvalidConfig("switching order is empty"));
        }
        if !(dwell.is_finite() && dwell > 0.0) {
            return Err(Error::InvalidConfig("dwell must be positive"));
        }
        Ok(SwitchingSchedule { order, dwell })
    }

    /// A schedule that never leaves `index`.
    pub fn fixed(index: usize) -> Self {
        SwitchingSchedule {
            order: vec![index],
            dwell: 1.0,
        }
    }

    /// Topology indices in switching order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Seconds spent on each entry.
    pub fn dwell(&self) -> f64 {
        self.dwell
    }

    /// `σ(t)`.
    pub fn active(&self, t: f64) -> usize {
        if self.order.len() == 1 {
            return self.order[0];
        }
        let slot = floor(t / self.dwell + GRID_EPS).max(0.0) as usize;
        self.order[slot % self.order.len()]
    }
}

/// Everything needed for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Topology family indexed by the schedule.
    pub topologies: Vec<LeaderTopology>,
    /// Switching signal; a one-entry order means a fixed topology.
    pub schedule: SwitchingSchedule,
    /// Velocity damping gain.
    pub k: f64,
    /// Coupling delay.
    pub delay: DelayFunction,
    /// Leader velocity.
    pub v0: f64,
    /// Leader position at `t = 0`.
    pub x0_init: f64,
    /// Follower positions at `t = 0`.
    pub x_init: Vec<f64>,
    /// Follower velocities at `t = 0`.
    pub v_init: Vec<f64>,
    /// Final time.
    pub t_end: f64,
    /// Step size.
    pub dt: f64,
}

impl SimConfig {
    /// Number of followers.
    pub fn n(&self) -> usize {
        self.x_init.len()
    }

    /// Number of steps; the trajectory has one more sample.
    pub fn steps(&self) -> usize {
        floor(self.t_end / self.dt + GRID_EPS) as usize
    }

    /// Checks every precondition of [`integrate`].
    pub fn validate(&self) -> Result<()> {
        let first = self
            .topologies
            .first()
            .ok_or(Error::InvalidConfig("no topologies"))?;
        let n = first.n();
        if self.topologies.iter().any(|t| t.n() != n) {
            return Err(Error::InvalidConfig("topologies differ in node count"));
        }
        if self
            .schedule
            .order
            .iter()
            .any(|&i| i >= self.topologies.len())
        {
            return Err(Error::InvalidConfig(
                "switching order references a missing topology",
            ));
        }
        if self.x_init.len() != n || self.v_init.len() != n {
            return Err(Error::InvalidConfig(
                "initial state length differs from node count",
            ));
        }
        if !self
            .x_init
            .iter()
            .chain(&self.v_init)
            .all(|x| x.is_finite())
        {
            return Err(Error::InvalidConfig("initial state must be finite"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig("dt must be positive"));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::InvalidConfig("t_end must be positive"));
        }
        if !(self.k.is_finite() && self.v0.is_finite() && self.x0_init.is_finite()) {
            return Err(Error::InvalidConfig("k, v0 and x0_init must be finite"));
        }
        self.delay.validate()?;
        let max_delay = self.delay.max_delay();
        if max_delay > 0.0 && self.dt > max_delay / 10.0 * (1.0 + GRID_EPS) {
            return Err(Error::InvalidConfig(
                "dt must not exceed a tenth of the maximum delay",
            ));
        }
        Ok(())
    }
}

/// Sampled run. Per-sample vectors are stored flat, `n` entries per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Number of followers.
    pub n: usize,
    /// Sample instants.
    pub times: Vec<f64>,
    /// Leader position per sample.
    pub leader_x: Vec<f64>,
    /// Follower positions.
    pub agent_x: Vec<f64>,
    /// Follower velocities.
    pub agent_v: Vec<f64>,
    /// `x - x0·1`.
    pub err_x: Vec<f64>,
    /// `v - v0·1`.
    pub err_v: Vec<f64>,
    /// Active topology index per sample.
    pub sigma: Vec<usize>,
}

impl Trajectory {
    fn with_capacity(n: usize, samples: usize) -> Self {
        Trajectory {
            n,
            times: Vec::with_capacity(samples),
            leader_x: Vec::with_capacity(samples),
            agent_x: Vec::with_capacity(samples * n),
            agent_v: Vec::with_capacity(samples * n),
            err_x: Vec::with_capacity(samples * n),
            err_v: Vec::with_capacity(samples * n),
            sigma: Vec::with_capacity(samples),
        }
    }

    fn push(&mut self, t: f64, leader: f64, v0: f64, x: &[f64], v: &[f64], sigma: usize) {
        self.times.push(t);
        self.leader_x.push(leader);
        self.agent_x.extend_from_slice(x);
        self.agent_v.extend_from_slice(v);
        self.err_x.extend(x.iter().map(|xi| xi - leader));
        self.err_v.extend(v.iter().map(|vi| vi - v0));
        self.sigma.push(sigma);
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// True when there are no samples.
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn slice<'a>(&self, data: &'a [f64], sample: usize) -> &'a [f64] {
        &data[sample * self.n..(sample + 1) * self.n]
    }

    /// Follower positions at a sample.
    pub fn x(&self, sample: usize) -> &[f64] {
        self.slice(&self.agent_x, sample)
    }

    /// Follower velocities at a sample.
    pub fn v(&self, sample: usize) -> &[f64] {
        self.slice(&self.agent_v, sample)
    }

    /// Position errors at a sample.
    pub fn ex(&self, sample: usize) -> &[f64] {
        self.slice(&self.err_x, sample)
    }

    /// Velocity errors at a sample.
    pub fn ev(&self, sample: usize) -> &[f64] {
        self.slice(&self.err_v, sample)
    }

    /// `‖ε‖∞` at a sample.
    pub fn error_norm(&self, sample: usize) -> f64 {
        self.ex(sample)
            .iter()
            .chain(self.ev(sample))
            .fold(0.0, |m, e| m.max(fabs(*e)))
    }
}

/// Result of [`run`]: the samples produced and, if the state ran away, the
/// time of the last valid sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRun {
    /// Samples up to the end or up to divergence.
    pub trajectory: Trajectory,
    /// Set when the run aborted.
    pub diverged_at: Option<f64>,
}

/// Protocol input for every follower, computed arc by arc.
pub fn control_input(
    t: &LeaderTopology,
    k: f64,
    x_delayed: &[f64],
    x0_delayed: f64,
    v_now: &[f64],
    v0: f64,
) -> Vec<f64> {
    let mut u = vec![0.0; t.n()];
    control_input_into(t, k, x_delayed, x0_delayed, v_now, v0, &mut u);
    u
}

fn control_input_into(
    t: &LeaderTopology,
    k: f64,
    x_delayed: &[f64],
    x0_delayed: f64,
    v_now: &[f64],
    v0: f64,
    u: &mut [f64],
) {
    let g = t.graph();
    let b = t.leader_weights();
    for (i, ui) in u.iter_mut().enumerate() {
        let xi = x_delayed[i];
        let coupling: f64 = g
            .out_arcs(i)
            .iter()
            .map(|a| a.weight * (x_delayed[a.to] - xi))
            .sum();
        *ui = coupling + b[i] * (x0_delayed - xi) + k * (v0 - v_now[i]);
    }
}

fn hermite(h: f64, s: f64, xa: f64, va: f64, xb: f64, vb: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    // increment form keeps a constant history exactly constant
    xa + (3.0 * s2 - 2.0 * s3) * (xb - xa) + h * ((s3 - 2.0 * s2 + s) * va + (s3 - s2) * vb)
}

/// Step samples `(x, v)` at `t_j = j dt` for `j >= first`.
struct History {
    dt: f64,
    first: usize,
    samples: VecDeque<(Vec<f64>, Vec<f64>)>,
    x_init: Vec<f64>,
}

impl History {
    fn newest(&self) -> usize {
        self.first + self.samples.len() - 1
    }

    fn push(&mut self, x: &[f64], v: &[f64], keep_from: usize) {
        self.samples.push_back((x.to_vec(), v.to_vec()));
        while self.first < keep_from && self.samples.len() > 2 {
            self.samples.pop_front();
            self.first += 1;
        }
    }

    /// Delayed positions at `td`, which must not exceed the newest sample
    /// time.
    fn positions_at(&self, td: f64, out: &mut [f64]) {
        if td <= 0.0 {
            out.copy_from_slice(&self.x_init);
            return;
        }
        let newest = self.newest();
        let pos = td / self.dt;
        let j = (floor(pos) as usize).clamp(self.first, newest.saturating_sub(1).max(self.first));
        if j >= newest {
            out.copy_from_slice(&self.samples[newest - self.first].0);
            return;
        }
        let s = (pos - j as f64).clamp(0.0, 1.0);
        let (xa, va) = &self.samples[j - self.first];
        let (xb, vb) = &self.samples[j + 1 - self.first];
        for (i, o) in out.iter_mut().enumerate() {
            *o = hermite(self.dt, s, xa[i], va[i], xb[i], vb[i]);
        }
    }
}

struct Stage<'a> {
    cfg: &'a SimConfig,
    topology: &'a LeaderTopology,
    t0: f64,
    x0: &'a [f64],
    v0: &'a [f64],
}

impl Stage<'_> {
    /// Writes `v' = u` at stage time `s` with stage state `(x, v)`.
    fn accel(&self, hist: &History, s: f64, x: &[f64], v: &[f64], xd: &mut [f64], out: &mut [f64]) {
        let cfg = self.cfg;
        let td = s - cfg.delay.evaluate(s);
        if td >= self.t0 {
            let h = s - self.t0;
            if h <= 0.0 {
                xd.copy_from_slice(self.x0);
            } else {
                let frac = ((td - self.t0) / h).clamp(0.0, 1.0);
                for i in 0..xd.len() {
                    xd[i] = hermite(h, frac, self.x0[i], self.v0[i], x[i], v[i]);
                }
            }
        } else {
            hist.positions_at(td, xd);
        }
        let leader_delayed = cfg.x0_init + cfg.v0 * td.max(0.0);
        control_input_into(self.topology, cfg.k, xd, leader_delayed, v, cfg.v0, out);
    }
}

/// Integrates the closed loop, keeping the samples produced before a
/// divergence instead of discarding them.
pub fn run(cfg: &SimConfig) -> Result<SimRun> {
    cfg.validate()?;
    let n = cfg.n();
    let dt = cfg.dt;
    let steps = cfg.steps();
    let max_delay = cfg.delay.max_delay();
    let lag_steps = (max_delay / dt) as usize + 2;

    let mut traj = Trajectory::with_capacity(n, steps + 1);
    let mut x = cfg.x_init.clone();
    let mut v = cfg.v_init.clone();
    let mut hist = History {
        dt,
        first: 0,
        samples: VecDeque::new(),
        x_init: cfg.x_init.clone(),
    };
    hist.push(&x, &v, 0);
    traj.push(0.0, cfg.x0_init, cfg.v0, &x, &v, cfg.schedule.active(0.0));

    let mut xd = vec![0.0; n];
    let mut xs = vec![0.0; n];
    let mut vs = vec![0.0; n];
    let mut kx = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut kv = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];

    for step in 0..steps {
        let t0 = step as f64 * dt;
        let sigma = cfg.schedule.active(t0);
        let stage = Stage {
            cfg,
            topology: &cfg.topologies[sigma],
            t0,
            x0: &x,
            v0: &v,
        };

        kx[0].copy_from_slice(&v);
        stage.accel(&hist, t0, &x, &v, &mut xd, &mut kv[0]);
        for (idx, (c, frac)) in [(0.5, 0.5), (0.5, 0.5), (1.0, 1.0)].into_iter().enumerate() {
            for i in 0..n {
                xs[i] = x[i] + c * dt * kx[idx][i];
                vs[i] = v[i] + c * dt * kv[idx][i];
            }
            kx[idx + 1].copy_from_slice(&vs);
            stage.accel(&hist, t0 + frac * dt, &xs, &vs, &mut xd, &mut kv[idx + 1]);
        }

        let mut next_x = x.clone();
        let mut next_v = v.clone();
        for i in 0..n {
            next_x[i] += dt / 6.0 * (kx[0][i] + 2.0 * kx[1][i] + 2.0 * kx[2][i] + kx[3][i]);
            next_v[i] += dt / 6.0 * (kv[0][i] + 2.0 * kv[1][i] + 2.0 * kv[2][i] + kv[3][i]);
        }
        if next_x
            .iter()
            .chain(&next_v)
            .any(|s| !(fabs(*s) <= DIVERGENCE_LIMIT))
        {
            return Ok(SimRun {
                trajectory: traj,
                diverged_at: Some(t0),
            });
        }
        x = next_x;
        v = next_v;
        let t1 = (step + 1) as f64 * dt;
        hist.push(&x, &v, (step + 1).saturating_sub(lag_steps));
        traj.push(
            t1,
            cfg.x0_init + cfg.v0 * t1,
            cfg.v0,
            &x,
            &v,
            cfg.schedule.active(t1),
        );
    }
    Ok(SimRun {
        trajectory: traj,
        diverged_at: None,
    })
}

/// Integrates the closed loop over `[0, t_end]`; a runaway state is an
/// error.
pub fn integrate(cfg: &SimConfig) -> Result<Trajectory> {
    let out = run(cfg)?;
    match out.diverged_at {
        Some(last_valid_time) => Err(Error::Diverged { last_valid_time }),
        None => Ok(out.trajectory),
    }
}

/// Convergence summary of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMetrics {
    /// `‖x̄‖∞` at the last sample.
    pub final_err_x: f64,
    /// `‖v̄‖∞` at the last sample.
    pub final_err_v: f64,
    /// `‖ε‖∞` at the first sample.
    pub initial_err: f64,
    /// First time after which `‖ε‖∞` stays within 1% of its initial value.
    pub settle_time: Option<f64>,
}

/// Final errors and settling time at the 1% band.
pub fn error_metrics(tr: &Trajectory) -> Result<ErrorMetrics> {
    if tr.is_empty() {
        return Err(Error::Empty);
    }
    let last = tr.len() - 1;
    let sup = |s: &[f64]| s.iter().fold(0.0f64, |m, e| m.max(fabs(*e)));
    let initial_err = tr.error_norm(0);
    let band = 0.01 * initial_err;
    let settle_time = match (0..tr.len()).rev().find(|&i| tr.error_norm(i) > band) {
        None => Some(tr.times[0]),
        Some(i) if i == last => None,
        Some(i) => Some(tr.times[i + 1]),
    };
    Ok(ErrorMetrics {
        final_err_x: sup(tr.ex(last)),
        final_err_v: sup(tr.ev(last)),
        initial_err,
        settle_time,
    })
}
