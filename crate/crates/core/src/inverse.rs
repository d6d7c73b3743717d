//! Search for a step potential `q` on `[0, 1]` whose nonlinear spectrum
//! lands near the primes.
//!
//! `λ_n = p_n` in the nonlinear problem means `μ_n(q) = (π p_n / log p_n)²`
//! for the linear Dirichlet problem `-y'' + q y = μ y`. The search works in
//! `μ` directly, minimizing
//! `J(q) = Σ_{n <= N} ((μ_n(q) - μ*_n) / μ*_n)²`
//! over `m` equal pieces with `|q_i| <= Q`, by coordinate pattern search
//! with step halving and seeded random restarts.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeff::{BoundaryCondition, CoefficientSet, Interval, PiecewiseConstant, SLProblem};
use crate::error::{Error, Result};
use crate::nonlinear::{branch_minimum, invert_map, Branch};
use crate::primes::first_primes;
use crate::scalar::{lit, to_f64, Real};
use crate::spectrum::{first_eigenvalues, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchConfig {
    /// Number of equal pieces of `q`.
    pub pieces: usize,
    /// Box constraint `|q_i| <= bound`.
    pub bound: f64,
    /// Number of primes matched.
    pub targets: usize,
    pub seed: u64,
    pub restarts: usize,
    /// Objective evaluations allowed per restart.
    pub max_iters: usize,
    pub initial_step: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            pieces: 16,
            bound: 200.0,
            targets: 8,
            seed: 42,
            restarts: 4,
            max_iters: 4000,
            initial_step: 50.0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.pieces == 0 {
            return bad("pieces must be at least 1".into());
        }
        if !(self.bound > 0.0) || !self.bound.is_finite() {
            return bad(format!("bound must be positive, got {}", self.bound));
        }
        if self.targets == 0 {
            return bad("targets must be at least 1".into());
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1".into());
        }
        if !(self.initial_step > 0.0) || !self.initial_step.is_finite() {
            return bad(format!(
                "initial_step must be positive, got {}",
                self.initial_step
            ));
        }
        Ok(())
    }
}

/// `μ*_n = (π p_n / log p_n)²`.
pub fn target_mu(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("target index starts at 1".into()));
    }
    let p = first_primes(n)?.nth(n).unwrap() as f64;
    Ok(target_from_prime(p))
}

fn target_from_prime(p: f64) -> f64 {
    let x = std::f64::consts::PI * p / p.ln();
    x * x
}

fn targets(n: usize) -> Result<(Vec<u64>, Vec<f64>)> {
    let table = first_primes(n)?;
    let primes: Vec<u64> = table.iter().take(n).collect();
    let mus = primes
        .iter()
        .map(|&p| target_from_prime(p as f64))
        .collect();
    Ok((primes, mus))
}

fn unit_problem<T: Real>(q: &PiecewiseConstant<T>) -> Result<SLProblem<T>> {
    let unit = Interval::new(T::zero(), T::one())?;
    let one = PiecewiseConstant::constant(unit, T::one())?;
    SLProblem::new(
        unit,
        CoefficientSet::new(one.clone(), q.clone(), one)?,
        BoundaryCondition::dirichlet(),
    )
}

fn objective_against<T: Real>(q: &PiecewiseConstant<T>, mus: &[f64]) -> Result<T> {
    let problem = unit_problem(q)?;
    let got = first_eigenvalues(&problem, mus.len(), &SolverConfig::default())?;
    Ok(got.iter().zip(mus).fold(T::zero(), |acc, (&m, &t)| {
        let t = lit::<T>(t);
        let d = (m - t) / t;
        acc + d * d
    }))
}

/// `J(q)` over the first `n` targets.
pub fn objective<T: Real>(q: &PiecewiseConstant<T>, n: usize) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "objective needs at least one target".into(),
        ));
    }
    let (_, mus) = targets(n)?;
    objective_against(q, &mus)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint<T> {
    /// Objective evaluations spent so far in this restart.
    pub iteration: usize,
    pub objective: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TargetRow {
    pub n: usize,
    pub target_mu: f64,
    pub mu: f64,
    /// Principal-branch preimage of `mu`; absent below `(πe)²`.
    pub implied_lambda: Option<f64>,
    pub prime: u64,
    pub below_branch: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult<T> {
    pub best_q: PiecewiseConstant<T>,
    pub best_objective: T,
    /// `J` at `q ≡ 0`.
    pub baseline_objective: T,
    pub best_restart: usize,
    /// One non-increasing trace per restart.
    pub traces: Vec<Vec<TracePoint<T>>>,
    pub per_target: Vec<TargetRow>,
}

impl<T: Real> SearchResult<T> {
    /// Trace of the restart that produced `best_q`.
    pub fn trace(&self) -> &[TracePoint<T>] {
        &self.traces[self.best_restart]
    }

    pub fn write_targets_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "n,target_mu,mu,implied_lambda,p_n,below_branch")?;
        for r in &self.per_target {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.n,
                r.target_mu,
                r.mu,
                r.implied_lambda.map(|l| l.to_string()).unwrap_or_default(),
                r.prime,
                r.below_branch
            )?;
        }
        Ok(())
    }
}

struct RestartOutcome<T> {
    q: Vec<T>,
    objective: T,
    trace: Vec<TracePoint<T>>,
}

fn run_restart<T: Real>(
    start: Vec<T>,
    cfg: &SearchConfig,
    unit: Interval<T>,
    mus: &[f64],
) -> RestartOutcome<T> {
    let eval = |v: &[T]| {
        PiecewiseConstant::uniform(unit, v.to_vec())
            .and_then(|q| objective_against(&q, mus))
            .ok()
            .filter(|j| j.is_finite())
            .unwrap_or(T::infinity())
    };
    let bound = lit::<T>(cfg.bound);
    let floor = lit::<T>(1e-6 * cfg.bound);
    let mut q = start;
    let mut best = eval(&q);
    let mut evals = 1;
    let mut trace = vec![TracePoint {
        iteration: evals,
        objective: best,
    }];
    let mut step = lit::<T>(cfg.initial_step);

    'outer: while step >= floor {
        let mut improved = false;
        for i in 0..q.len() {
            for dir in [T::one(), -T::one()] {
                let cand_v = (q[i] + dir * step).max(-bound).min(bound);
                if cand_v == q[i] {
                    continue;
                }
                if evals >= cfg.max_iters {
                    break 'outer;
                }
                let old = q[i];
                q[i] = cand_v;
                let j = eval(&q);
                evals += 1;
                if j < best {
                    best = j;
                    improved = true;
                    trace.push(TracePoint {
                        iteration: evals,
                        objective: j,
                    });
                    break;
                }
                q[i] = old;
            }
        }
        if !improved {
            step = step * lit(0.5);
        }
    }
    RestartOutcome {
        q,
        objective: best,
        trace,
    }
}

fn start_point<T: Real>(restart: usize, cfg: &SearchConfig, mu1: f64) -> Vec<T> {
    if restart == 0 {
        // a constant shift moves every μ_n by the same amount
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        let c = (mu1 - pi2).clamp(-cfg.bound, cfg.bound);
        return vec![lit(c); cfg.pieces];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(restart as u64);
    (0..cfg.pieces)
        .map(|_| lit(rng.gen_range(-cfg.bound..=cfg.bound)))
        .collect()
}

/// Run every restart (in parallel) and keep the best, ties going to the
/// lower restart index.
pub fn search<T: Real>(config: &SearchConfig) -> Result<SearchResult<T>> {
    config.validate()?;
    let unit = Interval::new(T::zero(), T::one())?;
    let (primes, mus) = targets(config.targets)?;

    let outcomes: Vec<RestartOutcome<T>> = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(start_point(r, config, mus[0]), config, unit, &mus))
        .collect();

    let best_restart = outcomes.iter().enumerate().fold(0, |b, (i, o)| {
        if o.objective < outcomes[b].objective {
            i
        } else {
            b
        }
    });
    let best_q = PiecewiseConstant::uniform(unit, outcomes[best_restart].q.clone())?;
    let baseline_objective =
        objective_against(&PiecewiseConstant::constant(unit, T::zero())?, &mus)?;

    let achieved = first_eigenvalues(&unit_problem(&best_q)?, mus.len(), &SolverConfig::default())?;
    let floor = branch_minimum::<f64>();
    let per_target = achieved
        .iter()
        .zip(mus.iter().zip(&primes))
        .enumerate()
        .map(|(i, (&mu, (&target_mu, &prime)))| {
            let mu = to_f64(mu);
            TargetRow {
                n: i + 1,
                target_mu,
                mu,
                implied_lambda: invert_map(mu, Branch::Principal).ok(),
                prime,
                below_branch: mu < floor,
            }
        })
        .collect();

    Ok(SearchResult {
        best_q,
        best_objective: outcomes[best_restart].objective,
        baseline_objective,
        best_restart,
        traces: outcomes.into_iter().map(|o| o.trace).collect(),
        per_target,
    })
}
