//! Dirichlet problem on `[0, 1]` with nonlinear parameter dependence
//! `-y'' + q y = (πλ / log λ)² y`.
//!
//! `λ` is an eigenvalue when `Λ(λ) = (πλ/log λ)²` equals an eigenvalue `μ`
//! of the linear problem `-y'' + q y = μ y`. `Λ` has its minimum `(πe)²`
//! at `λ = e`, so each `μ > (πe)²` has two preimages; the spectrum uses the
//! principal one (`λ >= e`).

use std::io::{self, Write};

use serde::Serialize;

use crate::coeff::{BoundaryCondition, CoefficientSet, Interval, PiecewiseConstant, SLProblem};
use crate::error::{Error, Result};
use crate::primes::PrimeTable;
use crate::scalar::{lit, to_f64, Real};
use crate::spectrum::compute_spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// `λ >= e`, where `Λ` increases.
    Principal,
    /// `λ ∈ (1, e]`.
    Lower,
}

/// `(πe)²`, the smallest value of `Λ` on `λ > 1`.
pub fn branch_minimum<T: Real>() -> T {
    let pe = T::PI() * T::E();
    pe * pe
}

/// `Λ(λ) = (πλ / log λ)²` for `λ > 1`.
pub fn lambda_map<T: Real>(lambda: T) -> Result<T> {
    if !(lambda > T::one()) || !lambda.is_finite() {
        return Err(Error::OutOfDomain {
            what: "λ",
            value: to_f64(lambda),
            domain: "(1, ∞)".into(),
        });
    }
    let x = T::PI() * lambda / lambda.ln();
    Ok(x * x)
}

/// Root of `Λ(λ) = mu` on `branch`, by bisection on `λ/log λ = √mu/π`.
pub fn invert_map<T: Real>(mu: T, branch: Branch) -> Result<T> {
    let e = T::E();
    if !(mu >= branch_minimum()) || !mu.is_finite() {
        return Err(Error::NoRoot { mu: to_f64(mu) });
    }
    let target = mu.sqrt() / T::PI();
    let g = |x: T| x / x.ln() - target;

    // g increases on the principal branch and decreases on the lower one
    let (mut lo, mut hi) = match branch {
        Branch::Principal => {
            let mut hi = e + e;
            while g(hi) < T::zero() {
                hi = hi + hi;
            }
            (e, hi)
        }
        Branch::Lower => {
            // λ/log λ -> ∞ as λ -> 1⁺; step towards 1 geometrically
            let mut d = e - T::one();
            while g(T::one() + d) < T::zero() {
                d = d * lit(0.5);
                if d <= T::epsilon() {
                    break;
                }
            }
            (T::one() + d, e)
        }
    };
    let increasing = branch == Branch::Principal;
    let tol = lit::<T>(1e-12).max(T::epsilon() * lit(4.0));
    for _ in 0..400 {
        if hi - lo <= tol * lo {
            break;
        }
        let mid = lo + (hi - lo) * lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        let below = g(mid) < T::zero();
        if below == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) * lit(0.5))
}

/// `n log n + n log log n + n log log log n`, the first terms of the
/// large-`n` expansion of the root of `λ/log λ = n`.
pub fn lambda_expansion(n: u64) -> Result<f64> {
    if n < 16 {
        return Err(Error::OutOfDomain {
            what: "expansion index",
            value: n as f64,
            domain: "n >= 16".into(),
        });
    }
    let x = n as f64;
    let l = x.ln();
    Ok(x * (l + l.ln() + l.ln().ln()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonlinearProblem<T> {
    q: PiecewiseConstant<T>,
    base: SLProblem<T>,
}

impl<T: Real> NonlinearProblem<T> {
    /// `q` must live on exactly `[0, 1]`.
    pub fn new(q: PiecewiseConstant<T>) -> Result<Self> {
        let unit = Interval::new(T::zero(), T::one())?;
        if q.interval() != unit {
            return Err(Error::DomainMismatch {
                a0: 0.0,
                b0: 1.0,
                a1: to_f64(q.a()),
                b1: to_f64(q.b()),
            });
        }
        let coeffs = CoefficientSet::new(
            PiecewiseConstant::constant(unit, T::one())?,
            q.clone(),
            PiecewiseConstant::constant(unit, T::one())?,
        )?;
        let base = SLProblem::new(unit, coeffs, BoundaryCondition::dirichlet())?;
        Ok(Self { q, base })
    }

    /// `q ≡ 0`.
    pub fn free() -> Self {
        let unit = Interval::new(T::zero(), T::one()).unwrap();
        Self::new(PiecewiseConstant::constant(unit, T::zero()).unwrap()).unwrap()
    }

    pub fn q(&self) -> &PiecewiseConstant<T> {
        &self.q
    }

    /// The linear problem `-y'' + q y = μ y`, `y(0) = y(1) = 0`.
    pub fn base(&self) -> &SLProblem<T> {
        &self.base
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonlinearEigen<T> {
    pub n: usize,
    pub mu: T,
    /// Absent when `mu < (πe)²`.
    pub lambda: Option<T>,
}

pub fn nonlinear_spectrum<T: Real>(
    problem: &NonlinearProblem<T>,
    n_max: usize,
) -> Result<Vec<NonlinearEigen<T>>> {
    let spectrum = compute_spectrum(problem.base(), n_max)?;
    Ok(spectrum
        .eigenvalues
        .iter()
        .map(|e| NonlinearEigen {
            n: e.index,
            mu: e.value,
            lambda: invert_map(e.value, Branch::Principal).ok(),
        })
        .collect())
}

/// Columns `n,mu,lambda,prime,lambda_minus_prime`; `lambda` and the
/// difference are empty when absent.
pub fn write_csv<T: Real, W: Write>(
    rows: &[NonlinearEigen<T>],
    primes: &PrimeTable,
    mut w: W,
) -> io::Result<()> {
    writeln!(w, "n,mu,lambda,prime,lambda_minus_prime")?;
    for r in rows {
        let p = primes.nth(r.n);
        let lam = r.lambda.map(to_f64);
        let diff = match (lam, p) {
            (Some(l), Some(p)) => (l - p as f64).to_string(),
            _ => String::new(),
        };
        writeln!(
            w,
            "{},{},{},{},{}",
            r.n,
            to_f64(r.mu),
            lam.map(|l| l.to_string()).unwrap_or_default(),
            p.map(|p| p.to_string()).unwrap_or_default(),
            diff
        )?;
    }
    Ok(())
}
