//! JSON problem documents.
//!
//! ```json
//! {
//!   "interval": {"a": 0, "b": 1},
//!   "coefficients": {
//!     "s": {"breakpoints": [0, 1], "values": [1]},
//!     "q": {"breakpoints": [0, 0.5, 1], "values": [0, 10]},
//!     "r": {"breakpoints": [0, 1], "values": [1]}
//!   },
//!   "bc": {"alpha": 0, "beta": "pi"},
//!   "solver": {"angle_tol": 1e-10}
//! }
//! ```
//!
//! `s` is `1/p`. Angles are radians; the strings `"pi"` and `"pi/2"` are
//! accepted as exact values.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use slprime_core::{
    BoundaryCondition, CoefficientSet, Interval, PiecewiseConstant, SLProblem, SolverConfig,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub interval: IntervalDoc,
    pub coefficients: CoefficientsDoc,
    pub bc: BcDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalDoc {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDoc {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsDoc {
    pub s: StepDoc,
    pub q: StepDoc,
    pub r: StepDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Radians(f64),
    Named(String),
}

impl Angle {
    fn radians(&self, field: &str) -> Result<f64> {
        match self {
            Angle::Radians(x) => Ok(*x),
            Angle::Named(s) => match s.trim() {
                "pi" => Ok(PI),
                "pi/2" => Ok(FRAC_PI_2),
                other => {
                    bail!("{field}: unknown angle {other:?} (use radians, \"pi\" or \"pi/2\")")
                }
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcDoc {
    pub alpha: Angle,
    pub beta: Angle,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_tol_rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_cap: Option<f64>,
}

impl SolverDoc {
    pub fn to_config(&self) -> Result<SolverConfig<f64>> {
        let mut cfg = SolverConfig::default();
        for (name, value, slot) in [
            ("angle_tol", self.angle_tol, &mut cfg.angle_tol),
            (
                "lambda_tol_rel",
                self.lambda_tol_rel,
                &mut cfg.lambda_tol_rel,
            ),
            ("lambda_cap", self.lambda_cap, &mut cfg.lambda_cap),
        ] {
            if let Some(v) = value {
                if !(v > 0.0 && v.is_finite()) {
                    bail!("solver.{name} must be positive and finite, got {v}");
                }
                *slot = v;
            }
        }
        Ok(cfg)
    }
}

fn step(doc: &StepDoc, field: &str) -> Result<PiecewiseConstant<f64>> {
    PiecewiseConstant::new(doc.breakpoints.clone(), doc.values.clone())
        .map_err(|e| anyhow!("{field}: {e}"))
}

/// Merge neighbouring pieces with equal values.
fn coalesce(f: &PiecewiseConstant<f64>) -> StepDoc {
    let bp = f.breakpoints();
    let vals = f.values();
    let mut breakpoints = vec![bp[0]];
    let mut values: Vec<f64> = Vec::new();
    for (i, &v) in vals.iter().enumerate() {
        if values.last() == Some(&v) {
            *breakpoints.last_mut().unwrap() = bp[i + 1];
        } else {
            values.push(v);
            breakpoints.push(bp[i + 1]);
        }
    }
    StepDoc {
        breakpoints,
        values,
    }
}

impl ProblemDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| anyhow!("config: {e}"))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_problem(&self) -> Result<SLProblem<f64>> {
        let interval = Interval::new(self.interval.a, self.interval.b)
            .map_err(|e| anyhow!("interval: {e}"))?;
        let c = &self.coefficients;
        let (s, q, r) = (
            step(&c.s, "coefficients.s")?,
            step(&c.q, "coefficients.q")?,
            step(&c.r, "coefficients.r")?,
        );
        for (name, f) in [("s", &s), ("q", &q), ("r", &r)] {
            if f.interval() != interval {
                bail!(
                    "coefficients.{name}: breakpoints span [{}, {}] but interval is [{}, {}]",
                    f.a(),
                    f.b(),
                    interval.a(),
                    interval.b()
                );
            }
        }
        let coeffs = CoefficientSet::new(s, q, r).map_err(|e| anyhow!("coefficients: {e}"))?;
        let bc = BoundaryCondition::new(
            self.bc.alpha.radians("bc.alpha")?,
            self.bc.beta.radians("bc.beta")?,
        )?;
        Ok(SLProblem::new(interval, coeffs, bc)?)
    }

    pub fn solver_config(&self) -> Result<SolverConfig<f64>> {
        self.solver.unwrap_or_default().to_config()
    }

    /// Canonical document for a problem: each coefficient on its own
    /// coarsest mesh, angles in radians.
    pub fn from_problem(problem: &SLProblem<f64>, solver: Option<SolverDoc>) -> Self {
        let c = problem.coeffs();
        ProblemDocument {
            interval: IntervalDoc {
                a: problem.interval().a(),
                b: problem.interval().b(),
            },
            coefficients: CoefficientsDoc {
                s: coalesce(c.s()),
                q: coalesce(c.q()),
                r: coalesce(c.r()),
            },
            bc: BcDoc {
                alpha: Angle::Radians(problem.bc().alpha()),
                beta: Angle::Radians(problem.bc().beta()),
            },
            solver,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIT: &str = r#"{
        "interval": {"a": 0, "b": 1},
        "coefficients": {
            "s": {"breakpoints": [0, 1], "values": [1]},
            "q": {"breakpoints": [0, 1], "values": [0]},
            "r": {"breakpoints": [0, 1], "values": [1]}
        },
        "bc": {"alpha": 0, "beta": "pi"}
    }"#;

    fn with(path: &[&str], value: serde_json::Value) -> String {
        let mut v: serde_json::Value = serde_json::from_str(UNIT).unwrap();
        let mut slot = &mut v;
        for p in path {
            slot = &mut slot[*p];
        }
        *slot = value;
        v.to_string()
    }

    fn err(text: &str) -> String {
        match ProblemDocument::parse(text).and_then(|d| d.to_problem()) {
            Ok(_) => panic!("accepted {text}"),
            Err(e) => format!("{e:#}"),
        }
    }

    #[test]
    fn unit_parses() {
        let p = ProblemDocument::parse(UNIT).unwrap().to_problem().unwrap();
        assert_eq!(p, SLProblem::unit_dirichlet());
    }

    #[test]
    fn named_angles() {
        let d = ProblemDocument::parse(&with(&["bc", "alpha"], "pi/2".into())).unwrap();
        assert_eq!(d.to_problem().unwrap().bc().alpha(), FRAC_PI_2);
        assert!(err(&with(&["bc", "beta"], "tau".into())).contains("bc.beta"));
    }

    #[test]
    fn field_named_in_errors() {
        assert!(err(&with(&["bc", "alpha"], 3.5.into())).contains("bc.alpha must lie in [0, π)"));
        assert!(err(&with(&["bc", "beta"], 0.into())).contains("bc.beta"));
        assert!(err(&with(&["interval", "b"], (-1).into())).contains("interval"));
        let e = err(&with(
            &["coefficients", "q", "breakpoints"],
            serde_json::json!([0, 0.7, 0.2, 1]),
        ));
        assert!(e.contains("coefficients.q"), "{e}");
        let e = err(&with(
            &["coefficients", "r", "values"],
            serde_json::json!([1, 2]),
        ));
        assert!(e.contains("coefficients.r"), "{e}");
        let e = err(&with(
            &["coefficients", "s", "breakpoints"],
            serde_json::json!([0, 2]),
        ));
        assert!(e.contains("coefficients.s"), "{e}");
        assert!(err(&with(&["extra"], 1.into())).contains("unknown field"));
        assert!(err(&with(
            &["solver"],
            serde_json::json!({"angle_tol": 1, "x": 2})
        ))
        .contains("unknown field"));
    }

    #[test]
    fn solver_section() {
        let d = ProblemDocument::parse(&with(&["solver"], serde_json::json!({"lambda_cap": 1e6})))
            .unwrap();
        assert_eq!(d.solver_config().unwrap().lambda_cap, 1e6);
        let d = ProblemDocument::parse(&with(&["solver"], serde_json::json!({"angle_tol": -1})))
            .unwrap();
        assert!(format!("{:#}", d.solver_config().unwrap_err()).contains("solver.angle_tol"));
    }

    #[test]
    fn round_trip_is_value_identical() {
        let text = r#"{
            "interval": {"a": -1, "b": 2},
            "coefficients": {
                "s": {"breakpoints": [-1, 0.5, 2], "values": [1, 0]},
                "q": {"breakpoints": [-1, 0, 1, 2], "values": [3, -4, 5]},
                "r": {"breakpoints": [-1, 2], "values": [2]}
            },
            "bc": {"alpha": "pi/2", "beta": 1.25},
            "solver": {"angle_tol": 1e-9}
        }"#;
        let doc = ProblemDocument::parse(text).unwrap();
        let problem = doc.to_problem().unwrap();
        let again = ProblemDocument::from_problem(&problem, doc.solver);
        assert_eq!(again.coefficients, doc.coefficients);
        assert_eq!(again.interval, doc.interval);
        assert_eq!(again.solver, doc.solver);
        assert_eq!(again.bc.alpha, Angle::Radians(FRAC_PI_2));
        let json = serde_json::to_string(&again).unwrap();
        let third = ProblemDocument::parse(&json).unwrap();
        assert_eq!(third, again);
        assert_eq!(third.to_problem().unwrap(), problem);
    }
}
