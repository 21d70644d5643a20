//! Serializable run reports.

use effsym::recover::{ProbeReport, RecoveryReport, ScalingCheck, Verdict, Witness};
use effsym::suites::SuiteOutcome;
use serde::Serialize;

use crate::wire::{DescriptorJson, MatrixJson};

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub command: &'static str,
    pub dim: usize,
    pub seed: u64,
    pub tol: f64,
    pub trials: usize,
    pub family: &'static str,
    pub input: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct ReportFile<T: Serialize> {
    pub version: &'static str,
    pub config: ConfigEcho,
    pub wall_clock_seconds: f64,
    pub report: T,
}

#[derive(Debug, Serialize)]
pub struct ProbeJson {
    pub projections_preserved: bool,
    pub order_preserved: bool,
    pub orthogonality_preserved: bool,
    pub orthocomplement_preserved: bool,
    pub samples_used: usize,
    pub witnesses: Vec<ProbeWitnessJson>,
}

#[derive(Debug, Serialize)]
pub struct ProbeWitnessJson {
    pub property: &'static str,
    pub p: MatrixJson,
    pub q: Option<MatrixJson>,
    pub deviation: f64,
}

impl From<&ProbeReport> for ProbeJson {
    fn from(p: &ProbeReport) -> Self {
        Self {
            projections_preserved: p.projections_preserved,
            order_preserved: p.order_preserved,
            orthogonality_preserved: p.orthogonality_preserved,
            orthocomplement_preserved: p.orthocomplement_preserved,
            samples_used: p.samples_used,
            witnesses: p
                .witnesses
                .iter()
                .map(|w| ProbeWitnessJson {
                    property: w.property.as_str(),
                    p: (&w.p).into(),
                    q: w.q.as_ref().map(Into::into),
                    deviation: w.deviation,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ScalingJson {
    pub passed: bool,
    pub all_proportional: bool,
    pub max_deviation: f64,
    pub worst_lambda: f64,
    pub multiplicative_deviation: Option<f64>,
    pub orthoadditive_deviation: Option<f64>,
    /// `(λ, f(λ))` pairs.
    pub samples: Vec<[f64; 2]>,
}

fn scaling_json(check: &ScalingCheck, report: &RecoveryReport) -> ScalingJson {
    ScalingJson {
        passed: check.passed,
        all_proportional: check.all_proportional,
        max_deviation: check.max_deviation,
        worst_lambda: check.worst_lambda,
        multiplicative_deviation: check.multiplicative_deviation,
        orthoadditive_deviation: check.orthoadditive_deviation,
        samples: report
            .scaling
            .as_ref()
            .map(|s| s.samples.iter().map(|x| [x.lambda, x.f]).collect())
            .unwrap_or_default(),
    }
}

#[derive(Debug, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WitnessJson {
    Affinity {
        lambda: f64,
        a: MatrixJson,
        b: MatrixJson,
        deviation: f64,
    },
    TriplePair {
        a: MatrixJson,
        b: MatrixJson,
        deviation: f64,
    },
    Probe {
        property: &'static str,
        p: MatrixJson,
        q: Option<MatrixJson>,
        deviation: f64,
    },
    Scaling {
        lambda: f64,
        f: f64,
    },
    Evaluation {
        input: MatrixJson,
        output: MatrixJson,
    },
}

impl From<&Witness> for WitnessJson {
    fn from(w: &Witness) -> Self {
        match w {
            Witness::Affinity(a) => WitnessJson::Affinity {
                lambda: a.lambda,
                a: (&a.a).into(),
                b: (&a.b).into(),
                deviation: a.deviation,
            },
            Witness::TriplePair { a, b, deviation } => WitnessJson::TriplePair {
                a: a.into(),
                b: b.into(),
                deviation: *deviation,
            },
            Witness::Probe(p) => WitnessJson::Probe {
                property: p.property.as_str(),
                p: (&p.p).into(),
                q: p.q.as_ref().map(Into::into),
                deviation: p.deviation,
            },
            Witness::Scaling { lambda, f } => WitnessJson::Scaling {
                lambda: *lambda,
                f: *f,
            },
            Witness::Evaluation { input, output } => WitnessJson::Evaluation {
                input: input.into(),
                output: output.into(),
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RecoveryJson {
    pub family: &'static str,
    pub verdict: &'static str,
    pub reason: Option<String>,
    pub descriptor: Option<DescriptorJson>,
    pub max_residual: Option<f64>,
    pub samples_used: usize,
    pub probe: Option<ProbeJson>,
    pub scaling: Option<ScalingJson>,
    pub witness: Option<WitnessJson>,
}

impl From<&RecoveryReport> for RecoveryJson {
    fn from(r: &RecoveryReport) -> Self {
        Self {
            family: r.family.as_str(),
            verdict: match r.verdict {
                Verdict::Canonical => "canonical",
                Verdict::Rejected => "rejected",
            },
            reason: r.reason.clone(),
            descriptor: r.descriptor.as_ref().map(Into::into),
            max_residual: r.max_residual,
            samples_used: r.samples_used,
            probe: r.probe.as_ref().map(Into::into),
            scaling: r.scaling_check.as_ref().map(|c| scaling_json(c, r)),
            witness: r.witness.as_ref().map(Into::into),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SuiteJson {
    pub name: &'static str,
    pub status: &'static str,
    pub samples: usize,
    pub metrics: Vec<(&'static str, f64)>,
    pub failures: Vec<String>,
}

impl From<&SuiteOutcome> for SuiteJson {
    fn from(o: &SuiteOutcome) -> Self {
        Self {
            name: o.name,
            status: if o.skipped {
                "skipped"
            } else if o.passed {
                "passed"
            } else {
                "failed"
            },
            samples: o.samples,
            metrics: o.metrics.clone(),
            failures: o.failures.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyJson {
    pub passed: bool,
    pub suites: Vec<SuiteJson>,
}
