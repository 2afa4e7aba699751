//! Serializable stability reports.

use leadcons_core::stability::{FixedAnalysis, GainThreshold, SwitchedAnalysis, NORM_CONVENTION};
use leadcons_core::Matrix;
use serde::{Deserialize, Serialize};

/// Both readings of `k*` and the one that gates the analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KStarReadings {
    /// `μ/(2λ) + 1`.
    pub closed_form: f64,
    /// Fixed: `μ̄/λ̄ + 1`. Switched: `μ̃/(2λ̃)`.
    pub alternate: f64,
    /// The larger reading; the gain must exceed it.
    pub gate: f64,
}

impl From<GainThreshold> for KStarReadings {
    fn from(g: GainThreshold) -> Self {
        Self {
            closed_form: g.closed_form,
            alternate: g.alternate,
            gate: g.conservative(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub norm_convention: String,
    pub k_star: KStarReadings,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedReport {
    pub graph: String,
    pub h: Vec<Vec<f64>>,
    pub p_bar: Vec<Vec<f64>>,
    pub lyapunov_residual: f64,
    pub mu_bar: f64,
    pub lambda_bar: f64,
    pub k: f64,
    pub q: f64,
    pub q_matrix: Vec<Vec<f64>>,
    pub lambda_min: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchedReport {
    pub graphs: Vec<String>,
    pub h_list: Vec<Vec<Vec<f64>>>,
    pub lambda_tilde: f64,
    pub mu_tilde: f64,
    pub k: f64,
    pub q: f64,
    pub q_min_per_topology: Vec<f64>,
    pub lambda_min: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum AnalysisReport {
    Fixed(FixedReport),
    Switched(SwitchedReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityReportDoc {
    pub metadata: Metadata,
    pub analysis: AnalysisReport,
}

impl StabilityReportDoc {
    pub fn fixed(graph: &str, a: &FixedAnalysis) -> Self {
        let mut warnings = Vec::new();
        if a.ill_conditioned {
            warnings.push("ill-conditioned Razumikhin matrix P; tau may be inaccurate".to_owned());
        }
        Self {
            metadata: Metadata {
                norm_convention: NORM_CONVENTION.to_owned(),
                k_star: a.k_star.into(),
                warnings,
            },
            analysis: AnalysisReport::Fixed(FixedReport {
                graph: graph.to_owned(),
                h: a.h.to_rows(),
                p_bar: a.p_bar.to_rows(),
                lyapunov_residual: a.lyapunov_residual,
                mu_bar: a.mu_bar,
                lambda_bar: a.lambda_bar,
                k: a.k,
                q: a.q,
                q_matrix: a.q_matrix.to_rows(),
                lambda_min: a.lambda_min,
                tau: a.tau,
            }),
        }
    }

    /// `graphs` names the members of `a.h_list` in order.
    pub fn switched(graphs: &[String], a: &SwitchedAnalysis) -> Self {
        let warnings = a
            .unbalanced
            .iter()
            .map(|&i| format!("unbalanced member graph `{}`", graphs[i]))
            .collect();
        Self {
            metadata: Metadata {
                norm_convention: NORM_CONVENTION.to_owned(),
                k_star: a.k_star.into(),
                warnings,
            },
            analysis: AnalysisReport::Switched(SwitchedReport {
                graphs: graphs.to_vec(),
                h_list: a.h_list.iter().map(Matrix::to_rows).collect(),
                lambda_tilde: a.lambda_tilde,
                mu_tilde: a.mu_tilde,
                k: a.k,
                q: a.q,
                q_min_per_topology: a.q_min_per_topology.clone(),
                lambda_min: a.lambda_min,
                tau: a.tau,
            }),
        }
    }

    pub fn tau(&self) -> f64 {
        match &self.analysis {
            AnalysisReport::Fixed(f) => f.tau,
            AnalysisReport::Switched(s) => s.tau,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use leadcons_core::digraph::example;
    use leadcons_core::stability::{analyze_fixed, analyze_switched};

    #[test]
    fn fixed_report_round_trips_bit_exactly() {
        let a = analyze_fixed(&example::topology1(), 3.0, 1.05).unwrap();
        let doc = StabilityReportDoc::fixed("G1", &a);
        let back = StabilityReportDoc::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.tau().to_bits(), a.tau.to_bits());
    }

    #[test]
    fn switched_report_flags_unbalanced_members() {
        let ts = [example::topology1(), example::topology2()];
        let a = analyze_switched(&ts, 9.0, 1.05).unwrap();
        let doc = StabilityReportDoc::switched(&["G1".into(), "G2".into()], &a);
        assert_eq!(
            doc.metadata.warnings,
            vec!["unbalanced member graph `G1`".to_owned()]
        );
        assert_eq!(StabilityReportDoc::from_json(&doc.to_json()).unwrap(), doc);
        assert!(doc.to_json().contains("\"mode\": \"switched\""));
    }
}
