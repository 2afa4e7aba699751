//! JSON scenario files.

use std::collections::HashSet;
use std::path::Path;

use leadcons_core::sim::{DelayFunction, SimConfig, SwitchingSchedule};
use leadcons_core::{LeaderTopology, WeightedDigraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Half-widths of the seeded initial spread around the leader.
pub const INIT_POSITION_SPREAD: f64 = 2.0;
pub const INIT_VELOCITY_SPREAD: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub agents: usize,
    pub graphs: Vec<GraphDef>,
    /// Absent means the single graph in `graphs` stays active.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switching: Option<Switching>,
    pub gain_k: f64,
    pub q: f64,
    pub delay: DelaySpec,
    pub sim: SimSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDef {
    pub name: String,
    /// `[i, j, w]`: agent `i` listens to agent `j` with weight `w`.
    pub arcs: Vec<(usize, usize, f64)>,
    /// `[i, b]`: agent `i` senses the leader with weight `b`; zero means no link.
    pub leader_arcs: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Switching {
    pub order: Vec<String>,
    pub dwell: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DelaySpec {
    Constant { value: f64 },
    AbsCos { amplitude: f64 },
}

impl From<DelaySpec> for DelayFunction {
    fn from(d: DelaySpec) -> Self {
        match d {
            DelaySpec::Constant { value } => DelayFunction::Constant(value),
            DelaySpec::AbsCos { amplitude } => DelayFunction::AbsCos(amplitude),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub t_end: f64,
    pub dt: f64,
    pub v0: f64,
    pub x0_init: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_init: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_init: Option<Vec<f64>>,
}

/// Which analysis a config calls for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Fixed,
    Switched,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

impl ScenarioConfig {
    /// Parses and validates JSON text. `origin` names the source in errors.
    pub fn from_json(text: &str, origin: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Parse {
            origin: origin.to_owned(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let n = self.agents;
        if n == 0 {
            return Err(invalid("agents must be at least 1"));
        }
        if self.graphs.is_empty() {
            return Err(invalid("graphs must not be empty"));
        }
        let mut names = HashSet::new();
        for g in &self.graphs {
            if !names.insert(g.name.as_str()) {
                return Err(invalid(format!("duplicate graph name `{}`", g.name)));
            }
            let node_ok = |i: usize| (1..=n).contains(&i);
            if let Some(&(i, j, _)) = g.arcs.iter().find(|(i, j, _)| !node_ok(*i) || !node_ok(*j)) {
                return Err(invalid(format!(
                    "graph `{}`: arc [{i}, {j}] outside 1..={n}",
                    g.name
                )));
            }
            let mut seen = HashSet::new();
            for &(i, b) in &g.leader_arcs {
                if !node_ok(i) {
                    return Err(invalid(format!(
                        "graph `{}`: leader arc to {i} outside 1..={n}",
                        g.name
                    )));
                }
                if !seen.insert(i) {
                    return Err(invalid(format!(
                        "graph `{}`: duplicate leader arc to {i}",
                        g.name
                    )));
                }
                if !(b.is_finite() && b >= 0.0) {
                    return Err(invalid(format!(
                        "graph `{}`: leader weight {b} must be nonnegative",
                        g.name
                    )));
                }
            }
        }
        match &self.switching {
            Some(s) => {
                if s.order.is_empty() {
                    return Err(invalid("switching.order must not be empty"));
                }
                if let Some(name) = s.order.iter().find(|o| !names.contains(o.as_str())) {
                    return Err(invalid(format!(
                        "switching.order references unknown graph `{name}`"
                    )));
                }
            }
            None if self.graphs.len() > 1 => {
                return Err(invalid("several graphs require a switching section"));
            }
            None => {}
        }
        if !self.gain_k.is_finite() || !self.q.is_finite() {
            return Err(invalid("gain_k and q must be finite"));
        }
        let s = &self.sim;
        match (s.init_seed, &s.x_init, &s.v_init) {
            (Some(_), None, None) => {}
            (None, Some(x), Some(v)) => {
                if x.len() != n || v.len() != n {
                    return Err(invalid(format!("x_init and v_init must have {n} entries")));
                }
            }
            _ => {
                return Err(invalid(
                    "sim needs either init_seed or both x_init and v_init",
                ))
            }
        }
        // the remaining numeric constraints live in SimConfig
        self.sim_config()?;
        Ok(())
    }

    /// Member topologies in `graphs` order.
    pub fn topologies(&self) -> Result<Vec<LeaderTopology>, CliError> {
        self.graphs.iter().map(|g| self.topology(g)).collect()
    }

    fn topology(&self, g: &GraphDef) -> Result<LeaderTopology, CliError> {
        let named = |e: leadcons_core::Error| invalid(format!("graph `{}`: {e}", g.name));
        let arcs = g
            .arcs
            .iter()
            .map(|&(i, j, w)| (i.wrapping_sub(1), j.wrapping_sub(1), w));
        let graph = WeightedDigraph::new(self.agents, arcs).map_err(named)?;
        let mut b = vec![0.0; self.agents];
        for &(i, w) in &g.leader_arcs {
            b[i - 1] = w;
        }
        LeaderTopology::new(graph, b).map_err(named)
    }

    fn graph_index(&self, name: &str) -> usize {
        self.graphs
            .iter()
            .position(|g| g.name == name)
            .expect("validated name")
    }

    pub fn schedule(&self) -> Result<SwitchingSchedule, CliError> {
        match &self.switching {
            None => Ok(SwitchingSchedule::fixed(0)),
            Some(s) => {
                let order = s.order.iter().map(|o| self.graph_index(o)).collect();
                SwitchingSchedule::new(order, s.dwell)
                    .map_err(|e| invalid(format!("switching: {e}")))
            }
        }
    }

    /// Distinct graphs visited by the schedule, in first-visit order.
    pub fn scheduled_graphs(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let order: Vec<usize> = match &self.switching {
            None => vec![0],
            Some(s) => s.order.iter().map(|o| self.graph_index(o)).collect(),
        };
        for i in order {
            if !out.contains(&i) {
                out.push(i);
            }
        }
        out
    }

    /// Fixed when the schedule only ever visits one graph.
    pub fn default_mode(&self) -> Mode {
        if self.scheduled_graphs().len() == 1 {
            Mode::Fixed
        } else {
            Mode::Switched
        }
    }

    /// Follower positions and velocities at `t = 0`.
    pub fn initial_state(&self) -> (Vec<f64>, Vec<f64>) {
        let s = &self.sim;
        match (&s.x_init, &s.v_init, s.init_seed) {
            (Some(x), Some(v), _) => (x.clone(), v.clone()),
            (_, _, seed) => seeded_initial_state(self.agents, seed.unwrap_or(0), s.x0_init, s.v0),
        }
    }

    pub fn sim_config(&self) -> Result<SimConfig, CliError> {
        let (x_init, v_init) = self.initial_state();
        let cfg = SimConfig {
            topologies: self.topologies()?,
            schedule: self.schedule()?,
            k: self.gain_k,
            delay: self.delay.into(),
            v0: self.sim.v0,
            x0_init: self.sim.x0_init,
            x_init,
            v_init,
            t_end: self.sim.t_end,
            dt: self.sim.dt,
        };
        cfg.validate().map_err(|e| invalid(format!("sim: {e}")))?;
        Ok(cfg)
    }

    /// Replaces the initial condition by the seeded spread.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.sim.init_seed = Some(seed);
        self.sim.x_init = None;
        self.sim.v_init = None;
        self
    }
}

/// Positions `x0_init + U[-2, 2]` for every agent, then velocities
/// `v0 + U[-1, 1]`, drawn from ChaCha8 seeded with `seed`.
pub fn seeded_initial_state(n: usize, seed: u64, x0_init: f64, v0: f64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = (0..n)
        .map(|_| x0_init + rng.gen_range(-INIT_POSITION_SPREAD..=INIT_POSITION_SPREAD))
        .collect();
    let v = (0..n)
        .map(|_| v0 + rng.gen_range(-INIT_VELOCITY_SPREAD..=INIT_VELOCITY_SPREAD))
        .collect();
    (x, v)
}
