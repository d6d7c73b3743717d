//! Eigenvalues by bisection on the Prüfer angle at `b`.
//!
//! The `n`-th eigenvalue (`n >= 1`) is the root of `θ(b; λ) = β + (n-1)π`.
//! For right-definite problems `θ(b; λ)` is non-decreasing in `λ`, so a
//! bracket followed by bisection always converges; when the bracket hits
//! the configured cap the eigenvalue is reported missing, which is how
//! finite Atkinson-type spectra show up.

use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::coeff::{weyl_constant, CoefficientSet, Interval, SLProblem};
use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, to_f64, Real};
use crate::shoot::theta_at_b;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig<T> {
    /// Target accuracy of `θ(b; λ_n)`.
    pub angle_tol: T,
    /// Relative `λ` tolerance; the absolute floor is `lambda_tol_abs`.
    pub lambda_tol_rel: T,
    pub lambda_tol_abs: T,
    /// Bracket expansion gives up beyond `|λ| = lambda_cap`.
    pub lambda_cap: T,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        let eps = T::epsilon();
        Self {
            angle_tol: lit::<T>(1e-10).max(eps * lit(1e3)),
            lambda_tol_rel: lit::<T>(1e-12).max(eps * lit(16.0)),
            lambda_tol_abs: lit::<T>(1e-10).max(eps * lit(16.0)),
            lambda_cap: lit(1e12),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigenvalue<T> {
    pub index: usize,
    pub value: T,
    /// Zeros of the eigenfunction inside `(a, b)`.
    pub oscillation: usize,
    /// `|θ(b; λ_n) - (β + (n-1)π)|`.
    pub residual: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Truncation {
    /// First index that could not be located.
    pub at_index: usize,
    pub reason: String,
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TRUNCATED at n={}: {}", self.at_index, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum<T> {
    pub problem_hash: String,
    pub eigenvalues: Vec<Eigenvalue<T>>,
    pub truncation: Option<Truncation>,
}

impl<T: Real> Spectrum<T> {
    pub fn values(&self) -> Vec<T> {
        self.eigenvalues.iter().map(|e| e.value).collect()
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `λ_n` for 1-based `n`.
    pub fn get(&self, n: usize) -> Option<T> {
        n.checked_sub(1)
            .and_then(|i| self.eigenvalues.get(i))
            .map(|e| e.value)
    }

    /// Header `n,lambda,oscillation,residual` followed by one row per
    /// eigenvalue.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "n,lambda,oscillation,residual")?;
        for e in &self.eigenvalues {
            writeln!(
                w,
                "{},{},{},{:e}",
                e.index,
                to_f64(e.value),
                e.oscillation,
                to_f64(e.residual)
            )?;
        }
        Ok(())
    }
}

/// Stable fingerprint of a problem (SHA-256 over the coefficient bit
/// patterns, first 16 hex digits).
pub fn problem_hash<T: Real>(problem: &SLProblem<T>) -> String {
    let mut h = Sha256::new();
    let mut put = |x: T| h.update(to_f64(x).to_bits().to_le_bytes());
    put(problem.interval().a());
    put(problem.interval().b());
    put(problem.bc().alpha());
    put(problem.bc().beta());
    let c = problem.coeffs();
    for &x in c.mesh() {
        put(x);
    }
    for f in [c.s(), c.q(), c.r()] {
        for &x in f.values() {
            put(x);
        }
    }
    let digest = h.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn target_angle<T: Real>(problem: &SLProblem<T>, n: usize) -> T {
    problem.bc().beta() + from_usize::<T>(n - 1) * T::PI()
}

fn eigenvalue_unchecked<T: Real>(
    problem: &SLProblem<T>,
    n: usize,
    cfg: &SolverConfig<T>,
) -> Result<Eigenvalue<T>> {
    let target = target_angle(problem, n);
    let theta = |lam: T| theta_at_b(problem, lam);
    let not_found = || Error::EigenvalueNotFound {
        index: n,
        cap: to_f64(cfg.lambda_cap),
    };

    let c = problem.weyl_constant();
    let nn = from_usize::<T>(n);
    let guess = if c > T::zero() {
        let w = nn * T::PI() / c;
        w * w
    } else {
        nn * nn
    };
    let guess = guess.min(cfg.lambda_cap);

    // hi: θ(hi) >= target, lo: θ(lo) < target
    let mut hi = guess;
    let mut th_hi = theta(hi);
    let mut lo;
    let mut th_lo;
    if th_hi >= target {
        let mut step = guess.abs().max(T::one());
        loop {
            lo = hi - step;
            if lo < -cfg.lambda_cap {
                return Err(not_found());
            }
            th_lo = theta(lo);
            if th_lo < target {
                break;
            }
            hi = lo;
            th_hi = th_lo;
            step = step + step;
        }
    } else {
        lo = hi;
        th_lo = th_hi;
        let mut step = guess.abs().max(T::one());
        loop {
            if hi >= cfg.lambda_cap {
                return Err(not_found());
            }
            hi = (lo + step).min(cfg.lambda_cap);
            th_hi = theta(hi);
            if th_hi >= target {
                break;
            }
            lo = hi;
            th_lo = th_hi;
            step = step + step;
        }
    }

    let mut best = if (th_hi - target).abs() <= (target - th_lo).abs() {
        (hi, (th_hi - target).abs(), th_hi)
    } else {
        (lo, (target - th_lo).abs(), th_lo)
    };
    for _ in 0..2000 {
        let tol = cfg.lambda_tol_abs.max(cfg.lambda_tol_rel * best.0.abs());
        if hi - lo <= tol && best.1 <= cfg.angle_tol {
            break;
        }
        let mid = lo + (hi - lo) * lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        let th = theta(mid);
        let res = (th - target).abs();
        if res < best.1 || (res == best.1 && mid < best.0) {
            best = (mid, res, th);
        }
        if th >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    let (value, residual, th) = best;
    // zeros of u in the open interval (a, b): multiples of π strictly
    // between θ(a) = α and θ(b)
    let slack = cfg.angle_tol.max(residual) * lit(4.0);
    let oscillation = ((th - slack) / T::PI()).ceil().to_i64().unwrap_or(1).max(1) as usize - 1;
    Ok(Eigenvalue {
        index: n,
        value,
        oscillation,
        residual,
    })
}

/// `λ_n`, `n >= 1`.
pub fn eigenvalue<T: Real>(problem: &SLProblem<T>, n: usize) -> Result<Eigenvalue<T>> {
    eigenvalue_with(problem, n, &SolverConfig::default())
}

pub fn eigenvalue_with<T: Real>(
    problem: &SLProblem<T>,
    n: usize,
    cfg: &SolverConfig<T>,
) -> Result<Eigenvalue<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "eigenvalue index starts at 1".into(),
        ));
    }
    problem.coeffs().check_right_definite()?;
    eigenvalue_unchecked(problem, n, cfg)
}

/// `λ_1, …, λ_{n_max}`, stopping at the first index that cannot be found.
pub fn compute_spectrum<T: Real>(problem: &SLProblem<T>, n_max: usize) -> Result<Spectrum<T>> {
    compute_spectrum_with(problem, n_max, &SolverConfig::default())
}

pub fn compute_spectrum_with<T: Real>(
    problem: &SLProblem<T>,
    n_max: usize,
    cfg: &SolverConfig<T>,
) -> Result<Spectrum<T>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    problem.coeffs().check_right_definite()?;

    let results: Vec<Result<Eigenvalue<T>>> = (1..=n_max)
        .into_par_iter()
        .map(|n| eigenvalue_unchecked(problem, n, cfg))
        .collect();

    let mut eigenvalues = Vec::with_capacity(n_max);
    let mut truncation = None;
    for r in results {
        match r {
            Ok(e) => eigenvalues.push(e),
            Err(e @ Error::EigenvalueNotFound { index, .. }) => {
                truncation = Some(Truncation {
                    at_index: index,
                    reason: e.to_string(),
                });
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Spectrum {
        problem_hash: problem_hash(problem),
        eigenvalues,
        truncation,
    })
}

/// Spectrum computed sequentially, for callers that already run in
/// parallel (one spectrum per candidate in the inverse search).
pub(crate) fn first_eigenvalues<T: Real>(
    problem: &SLProblem<T>,
    n_max: usize,
    cfg: &SolverConfig<T>,
) -> Result<Vec<T>> {
    problem.coeffs().check_right_definite()?;
    (1..=n_max)
        .map(|n| eigenvalue_unchecked(problem, n, cfg).map(|e| e.value))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylFit<T> {
    /// Median of `λ_n / n²` over the upper half of the indices.
    pub fitted: T,
    /// `π² / C²`.
    pub reference: T,
    /// `|fitted - reference| / reference`.
    pub deviation: T,
    /// `(n, |λ_n/n² - reference| / reference)`.
    pub per_n: Vec<(usize, T)>,
}

/// Compare a computed spectrum with `λ_n ~ n²π²/C²`.
pub fn weyl_fit<T: Real>(
    spectrum: &Spectrum<T>,
    coeffs: &CoefficientSet<T>,
    interval: &Interval<T>,
) -> Result<WeylFit<T>> {
    let n = spectrum.len();
    if n < 10 {
        return Err(Error::InsufficientData { needed: 10, got: n });
    }
    let c = weyl_constant(coeffs, interval);
    if c <= T::zero() {
        return Err(Error::InvalidArgument(
            "Weyl constant vanishes; no n² growth law to fit".into(),
        ));
    }
    let reference = T::PI() * T::PI() / (c * c);
    let ratio = |e: &Eigenvalue<T>| {
        let k = from_usize::<T>(e.index);
        e.value / (k * k)
    };
    let mut upper: Vec<T> = spectrum.eigenvalues[n / 2..].iter().map(ratio).collect();
    upper.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = upper.len();
    let fitted = if m % 2 == 1 {
        upper[m / 2]
    } else {
        (upper[m / 2 - 1] + upper[m / 2]) * lit(0.5)
    };
    Ok(WeylFit {
        fitted,
        reference,
        deviation: (fitted - reference).abs() / reference,
        per_n: spectrum
            .eigenvalues
            .iter()
            .map(|e| (e.index, (ratio(e) - reference).abs() / reference))
            .collect(),
    })
}
