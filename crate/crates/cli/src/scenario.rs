//! Built-in scenarios on the two four-agent example graphs.

use crate::config::{DelaySpec, GraphDef, ScenarioConfig, SimSection, Switching};
use crate::CliError;

pub const NAMES: [&str; 3] = ["fig1", "fig2", "switched"];

/// Seed of the built-in initial spread.
pub const DEFAULT_SEED: u64 = 2024;

fn g1() -> GraphDef {
    GraphDef {
        name: "G1".into(),
        arcs: vec![(1, 2, 1.0), (2, 1, 1.0), (4, 2, 1.0), (4, 3, 1.0)],
        leader_arcs: vec![(1, 1.0), (3, 1.0)],
    }
}

fn g2() -> GraphDef {
    GraphDef {
        name: "G2".into(),
        arcs: vec![(1, 2, 1.0), (2, 1, 1.0), (3, 4, 1.0), (4, 3, 1.0)],
        leader_arcs: vec![(1, 1.0), (3, 1.0)],
    }
}

fn sim() -> SimSection {
    SimSection {
        t_end: 50.0,
        dt: 1e-3,
        v0: 1.0,
        x0_init: 0.0,
        init_seed: Some(DEFAULT_SEED),
        x_init: None,
        v_init: None,
    }
}

fn fixed(graph: GraphDef) -> ScenarioConfig {
    ScenarioConfig {
        agents: 4,
        graphs: vec![graph],
        switching: None,
        gain_k: 3.0,
        q: 1.05,
        delay: DelaySpec::AbsCos { amplitude: 0.03 },
        sim: sim(),
    }
}

/// `G1` with its leader arcs, `k = 3`, `r(t) = 0.03|cos t|`.
pub fn fig1() -> ScenarioConfig {
    fixed(g1())
}

/// `G2` with its leader arcs and the `fig1` parameters.
pub fn fig2() -> ScenarioConfig {
    fixed(g2())
}

/// `G1`, `G2` alternating every second, `k = 9`, `r(t) = 0.015|cos t|`.
pub fn switched() -> ScenarioConfig {
    ScenarioConfig {
        agents: 4,
        graphs: vec![g1(), g2()],
        switching: Some(Switching {
            order: vec!["G1".into(), "G2".into()],
            dwell: 1.0,
        }),
        gain_k: 9.0,
        q: 1.05,
        delay: DelaySpec::AbsCos { amplitude: 0.015 },
        sim: sim(),
    }
}

pub fn builtin(name: &str) -> Result<ScenarioConfig, CliError> {
    match name {
        "fig1" => Ok(fig1()),
        "fig2" => Ok(fig2()),
        "switched" => Ok(switched()),
        _ => Err(CliError::UnknownScenario(name.to_owned())),
    }
}
