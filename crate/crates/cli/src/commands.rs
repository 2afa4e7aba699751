//! Subcommand bodies. Each returns its output instead of printing it.

use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use leadcons_core::sim::{self, validate_delay_against_bound, DelayFunction};
use leadcons_core::stability::{
    analyze_fixed, analyze_switched, fixed_constants, switched_constants, GainThreshold,
};
use leadcons_core::{Error, LeaderTopology};

use crate::config::{Mode, ScenarioConfig};
use crate::report::StabilityReportDoc;
use crate::{csv, scenario, CliError};

/// Prefix that selects a built-in scenario in place of a config path.
pub const BUILTIN_PREFIX: &str = "builtin:";

/// Reads a config from a path or from `builtin:<name>`.
pub fn load(arg: &str) -> Result<ScenarioConfig, CliError> {
    match arg.strip_prefix(BUILTIN_PREFIX) {
        Some(name) => scenario::builtin(name),
        None => ScenarioConfig::from_path(Path::new(arg)),
    }
}

/// Topologies and names the chosen analysis runs on.
fn analysis_members(
    cfg: &ScenarioConfig,
    mode: Mode,
) -> Result<(Vec<LeaderTopology>, Vec<String>), CliError> {
    let all = cfg.topologies()?;
    let idx = cfg.scheduled_graphs();
    if mode == Mode::Fixed && idx.len() != 1 {
        return Err(CliError::Invalid(format!(
            "fixed mode needs a single scheduled graph, found {}",
            idx.len()
        )));
    }
    let ts = idx.iter().map(|&i| all[i].clone()).collect();
    let names = idx.iter().map(|&i| cfg.graphs[i].name.clone()).collect();
    Ok((ts, names))
}

pub fn analyze(cfg: &ScenarioConfig, mode: Option<Mode>) -> Result<StabilityReportDoc, CliError> {
    let mode = mode.unwrap_or_else(|| cfg.default_mode());
    let (ts, names) = analysis_members(cfg, mode)?;
    Ok(match mode {
        Mode::Fixed => {
            let a = analyze_fixed(&ts[0], cfg.gain_k, cfg.q)?;
            StabilityReportDoc::fixed(&names[0], &a)
        }
        Mode::Switched => {
            let a = analyze_switched(&ts, cfg.gain_k, cfg.q)?;
            StabilityReportDoc::switched(&names, &a)
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateSummary {
    pub rows: usize,
    pub final_err_x: f64,
    pub final_err_v: f64,
    pub settle_time: Option<f64>,
}

/// Integrates `cfg` and writes the CSV to `out`. A divergent run is still
/// written, with its last valid time in the trailer, and then reported as
/// [`CliError::Diverged`].
pub fn simulate(cfg: &ScenarioConfig, out: &Path) -> Result<SimulateSummary, CliError> {
    let sim_cfg = cfg.sim_config()?;
    let run = sim::run(&sim_cfg)?;
    let mut trailer = vec![match cfg.sim.init_seed {
        Some(seed) if cfg.sim.x_init.is_none() => format!("init_seed={seed}"),
        _ => "init=explicit".to_owned(),
    }];
    if let Some(t) = run.diverged_at {
        trailer.push(format!("diverged: state left the finite range after t={t}"));
    }
    let write_err = |source| CliError::Write {
        path: out.to_owned(),
        source,
    };
    let file = File::create(out).map_err(write_err)?;
    csv::write_trajectory(BufWriter::new(file), &run.trajectory, &trailer).map_err(write_err)?;
    if let Some(t) = run.diverged_at {
        return Err(CliError::Diverged(t));
    }
    let m = sim::error_metrics(&run.trajectory)?;
    Ok(SimulateSummary {
        rows: run.trajectory.len(),
        final_err_x: m.final_err_x,
        final_err_v: m.final_err_v,
        settle_time: m.settle_time,
    })
}

pub fn scenario(name: &str) -> Result<String, CliError> {
    Ok(scenario::builtin(name)?.to_json())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub condition: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub lines: Vec<CheckLine>,
}

impl CheckReport {
    pub fn failures(&self) -> usize {
        self.lines.iter().filter(|l| !l.pass).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn line(&self, condition: &str) -> Option<&CheckLine> {
        self.lines.iter().find(|l| l.condition == condition)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            let tag = if l.pass { "PASS" } else { "FAIL" };
            writeln!(f, "{tag}  {}: {}", l.condition, l.detail)?;
        }
        Ok(())
    }
}

pub const CHECK_REACHABILITY: &str = "reachability";
pub const CHECK_GAIN: &str = "gain threshold";
pub const CHECK_DELAY: &str = "delay bound";

/// Reachability, `k > k*` against the larger reading, and `sup r < τ`.
pub fn check(cfg: &ScenarioConfig, mode: Option<Mode>) -> Result<CheckReport, CliError> {
    let mode = mode.unwrap_or_else(|| cfg.default_mode());
    let (ts, _) = analysis_members(cfg, mode)?;
    let k = cfg.gain_k;
    let delay: DelayFunction = cfg.delay.into();
    let mut lines = Vec::new();

    let reachable = ts.iter().all(LeaderTopology::leader_globally_reachable);
    lines.push(CheckLine {
        condition: CHECK_REACHABILITY,
        pass: reachable,
        detail: if reachable {
            "leader globally reachable".into()
        } else {
            "leader not globally reachable".into()
        },
    });
    if !reachable {
        for condition in [CHECK_GAIN, CHECK_DELAY] {
            lines.push(CheckLine {
                condition,
                pass: false,
                detail: "not evaluated".into(),
            });
        }
        return Ok(CheckReport { lines });
    }

    let k_star: GainThreshold = match mode {
        Mode::Fixed => fixed_constants(&ts[0])?.k_star,
        Mode::Switched => switched_constants(&ts)?.k_star,
    };
    let gate = k_star.conservative();
    let gain_ok = k > gate;
    lines.push(CheckLine {
        condition: CHECK_GAIN,
        pass: gain_ok,
        detail: format!(
            "k = {k} {} k* = {gate:.6} (readings {:.6} and {:.6})",
            if gain_ok { ">" } else { "<=" },
            k_star.closed_form,
            k_star.alternate
        ),
    });

    let sup_r = delay.max_delay();
    let tau = if gain_ok {
        let tau = match mode {
            Mode::Fixed => analyze_fixed(&ts[0], k, cfg.q).map(|a| a.tau),
            Mode::Switched => analyze_switched(&ts, k, cfg.q).map(|a| a.tau),
        };
        match tau {
            Ok(t) => Ok(t),
            Err(Error::NotPositiveDefinite) => Err("Q not positive definite"),
            Err(e) => return Err(e.into()),
        }
    } else {
        Err("gain threshold not met")
    };
    lines.push(match tau {
        Ok(tau) => {
            let ok = validate_delay_against_bound(&delay, tau);
            CheckLine {
                condition: CHECK_DELAY,
                pass: ok,
                detail: format!(
                    "sup r = {sup_r} {} tau = {tau:.6}",
                    if ok { "<" } else { ">=" }
                ),
            }
        }
        Err(why) => CheckLine {
            condition: CHECK_DELAY,
            pass: false,
            detail: format!("sup r = {sup_r}, tau undefined ({why})"),
        },
    });
    Ok(CheckReport { lines })
}
