//! Numerical evidence for why a regular problem cannot have the primes as
//! its spectrum.
//!
//! * [`incompatibility_report`]: `p_n / λ_n` collapses because `λ_n` grows
//!   like `n²` while `p_n` grows like `n log n`.
//! * [`growth_check`]: the pointwise bound
//!   `|d/dx log(|λ||u|² + |v|²)| <= √|λ| (|r| + |1/p|) + |q| / √|λ|`.
//! * [`order_estimate`]: the slope of `log log M(R)` against `log R`, where
//!   `M(R)` is the maximum of `|u(b, λ)|` on `|λ| = R`; order ½ is expected.
//! * [`partial_sum_primes`] / [`partial_sum_spectrum`]: with exponent
//!   `½ + ε`, the prime series keeps growing while the `c n²` series has a
//!   tail bounded by `c^{-(½+ε)} N^{-2ε} / (2ε)`.
//!
//! None of this is a proof; each operation reports a verdict on the
//! sampled data.

use std::fmt;
use std::io::{self, Write};

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::coeff::SLProblem;
use crate::error::{Error, Result};
use crate::primes::{first_primes, PrimeTable};
use crate::scalar::{from_usize, lit, to_f64, Real};
use crate::shoot::{march, State};
use crate::spectrum::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

impl Verdict {
    /// `VERDICT: PASS <tag>`.
    pub fn line(&self, tag: &str) -> String {
        format!("VERDICT: {self} {tag}")
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

// ---------------------------------------------------------------------------
// growth clash: p_n / λ_n

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IncompatRow {
    pub n: usize,
    pub lambda: f64,
    pub prime: u64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncompatReport {
    pub rows: Vec<IncompatRow>,
    /// Geometric checkpoints over the upper half `[n_max/2, n_max]`.
    pub checkpoints: Vec<IncompatRow>,
    pub verdict: Verdict,
}

impl IncompatReport {
    pub fn final_ratio(&self) -> f64 {
        self.rows.last().map(|r| r.ratio).unwrap_or(f64::NAN)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "n,lambda,p_n,ratio")?;
        for r in &self.rows {
            writeln!(w, "{},{},{},{:e}", r.n, r.lambda, r.prime, r.ratio)?;
        }
        Ok(())
    }
}

/// Below this many eigenvalues the verdict is withheld.
pub const INCOMPAT_MIN_FOR_VERDICT: usize = 100;

/// `p_n / λ_n` for `n = 1..=n_max`.
///
/// PASS when the ratio decreases across geometric checkpoints of the upper
/// half of the indices and the last ratio is below 1% of the first.
/// Consecutive indices are not compared: prime gaps make `p_{n+1}/p_n`
/// exceed `(n+1)²/n²` every so often.
pub fn incompatibility_report<T: Real>(
    spectrum: &Spectrum<T>,
    n_max: usize,
) -> Result<IncompatReport> {
    if n_max < 10 {
        return Err(Error::InsufficientData {
            needed: 10,
            got: n_max,
        });
    }
    if spectrum.len() < n_max {
        return Err(Error::InsufficientData {
            needed: n_max,
            got: spectrum.len(),
        });
    }
    let values: Vec<f64> = spectrum.eigenvalues[..n_max]
        .iter()
        .map(|e| to_f64(e.value))
        .collect();
    incompatibility_from_values(&values)
}

/// Same report for an explicit list `λ_1, …, λ_N` (e.g. a model spectrum).
pub fn incompatibility_from_values(values: &[f64]) -> Result<IncompatReport> {
    let n_max = values.len();
    if n_max < 10 {
        return Err(Error::InsufficientData {
            needed: 10,
            got: n_max,
        });
    }
    let primes = first_primes(n_max)?;
    let rows: Vec<IncompatRow> = values
        .iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let prime = primes.nth(i + 1).unwrap();
            IncompatRow {
                n: i + 1,
                lambda,
                prime,
                ratio: prime as f64 / lambda,
            }
        })
        .collect();

    let half = (n_max / 2).max(1);
    let mut idx: Vec<usize> = (0..=8)
        .map(|k| {
            let t = k as f64 / 8.0;
            ((half as f64) * (n_max as f64 / half as f64).powf(t)).round() as usize
        })
        .map(|n| n.clamp(half, n_max))
        .collect();
    idx.dedup();
    let checkpoints: Vec<IncompatRow> = idx.iter().map(|&n| rows[n - 1]).collect();

    let verdict = if n_max < INCOMPAT_MIN_FOR_VERDICT {
        Verdict::Inconclusive
    } else {
        let decreasing = checkpoints.windows(2).all(|w| w[1].ratio < w[0].ratio);
        let collapsed = rows[n_max - 1].ratio < 0.01 * rows[0].ratio;
        Verdict::from_bool(decreasing && collapsed)
    };
    Ok(IncompatReport {
        rows,
        checkpoints,
        verdict,
    })
}

// ---------------------------------------------------------------------------
// logarithmic-derivative bound

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthSample<T> {
    pub x: T,
    /// Finite-difference `d/dx log W`.
    pub measured: T,
    pub bound: T,
    /// `bound - |measured|`.
    pub slack: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport<T> {
    pub samples: Vec<GrowthSample<T>>,
    pub min_slack: T,
    /// Smallest `slack / bound`; the check tolerates `-1e-3`.
    pub min_relative_slack: T,
    pub verdict: Verdict,
}

impl<T: Real> GrowthReport<T> {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,measured,bound,slack")?;
        for s in &self.samples {
            writeln!(
                w,
                "{},{},{},{}",
                to_f64(s.x),
                to_f64(s.measured),
                to_f64(s.bound),
                to_f64(s.slack)
            )?;
        }
        Ok(())
    }
}

/// Relative finite-difference allowance.
pub const GROWTH_FD_TOL: f64 = 1e-3;

/// Measure `d/dx log(|λ||u|² + |v|²)` at `x_samples` equally spaced interior
/// points and compare with the pointwise bound. Initial data `(sin α, -cos α)`.
pub fn growth_check<T: Real>(
    problem: &SLProblem<T>,
    lambda: Complex<T>,
    x_samples: usize,
) -> Result<GrowthReport<T>> {
    let mod_l = lambda.norm();
    if !(mod_l >= T::one()) {
        return Err(Error::InvalidArgument(format!(
            "growth check needs |λ| >= 1, got {}",
            to_f64(mod_l)
        )));
    }
    if x_samples == 0 {
        return Err(Error::InvalidArgument("x_samples must be positive".into()));
    }

    let iv = problem.interval();
    let coeffs = problem.coeffs();
    let mesh = coeffs.mesh();
    let len = iv.length();
    let nn = from_usize::<T>(x_samples);
    let h = len / (lit::<T>(4.0) * nn);
    let two = lit::<T>(2.0);

    let xs: Vec<T> = (0..x_samples)
        .map(|j| iv.a() + (from_usize::<T>(j) + lit(0.5)) * len / nn)
        .collect();

    // Each difference quotient spans a sub-interval of the piece containing
    // x, so it is the mean of the derivative the local coefficients bound.
    // Centered where possible (shrunk near breakpoints); one-sided when x
    // sits on a breakpoint.
    let spans: Vec<(usize, T, T)> = xs
        .iter()
        .map(|&x| {
            let i = coeffs.s().piece_index(x).unwrap();
            let (lo, hi) = (mesh[i], mesh[i + 1]);
            let hc = h.min(x - lo).min(hi - x);
            if hc > h * lit(1e-6) {
                (i, x - hc, x + hc)
            } else if x - lo >= hi - x {
                (i, x - h.min(x - lo), x)
            } else {
                (i, x, x + h.min(hi - x))
            }
        })
        .collect();

    let mut points: Vec<(T, usize)> = Vec::with_capacity(2 * x_samples);
    for (j, &(_, l, r)) in spans.iter().enumerate() {
        points.push((l, 2 * j));
        points.push((r, 2 * j + 1));
    }
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let positions: Vec<T> = points.iter().map(|p| p.0).collect();
    let states = march(
        problem,
        lambda,
        State::from_angle(problem.bc().alpha()),
        &positions,
    );

    let mut log_w = vec![T::zero(); 2 * x_samples];
    for ((_, slot), st) in points.iter().zip(&states) {
        let w = mod_l * st.state.u.norm_sqr() + st.state.v.norm_sqr();
        log_w[*slot] = two * st.log_scale + w.ln();
    }

    let sqrt_l = mod_l.sqrt();
    let samples: Vec<GrowthSample<T>> = xs
        .iter()
        .zip(&spans)
        .enumerate()
        .map(|(j, (&x, &(i, l, r)))| {
            let measured = (log_w[2 * j + 1] - log_w[2 * j]) / (r - l);
            let (s, q, r) = (
                coeffs.s().values()[i],
                coeffs.q().values()[i],
                coeffs.r().values()[i],
            );
            let bound = sqrt_l * (r.abs() + s.abs()) + q.abs() / sqrt_l;
            GrowthSample {
                x,
                measured,
                bound,
                slack: bound - measured.abs(),
            }
        })
        .collect();

    let min_slack = samples.iter().map(|s| s.slack).fold(T::infinity(), T::min);
    let min_relative_slack = samples
        .iter()
        .map(|s| {
            if s.bound > T::zero() {
                s.slack / s.bound
            } else if s.slack >= T::zero() {
                T::zero()
            } else {
                T::neg_infinity()
            }
        })
        .fold(T::infinity(), T::min);
    let verdict = Verdict::from_bool(min_relative_slack >= -lit::<T>(GROWTH_FD_TOL));
    Ok(GrowthReport {
        samples,
        min_slack,
        min_relative_slack,
        verdict,
    })
}

// ---------------------------------------------------------------------------
// order of growth in λ

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderEstimate<T> {
    pub radii: Vec<T>,
    /// `ln M(R)`; `M(R)` itself overflows for large `R`.
    pub log_max_modulus: Vec<T>,
    /// Least-squares slope of `log log M` against `log R` over the radii
    /// where `M(R) > 10`.
    pub slope: T,
    /// Fewer than three decades (or fewer than three usable radii).
    pub low_confidence: bool,
}

impl<T: Real> OrderEstimate<T> {
    pub fn verdict(&self, lo: f64, hi: f64) -> Verdict {
        if self.low_confidence {
            Verdict::Inconclusive
        } else {
            Verdict::from_bool((lit(lo)..=lit(hi)).contains(&self.slope))
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "radius,log_max_modulus")?;
        for (r, m) in self.radii.iter().zip(&self.log_max_modulus) {
            writeln!(w, "{},{}", to_f64(*r), to_f64(*m))?;
        }
        Ok(())
    }
}

pub fn order_estimate<T: Real>(
    problem: &SLProblem<T>,
    radii: &[T],
    angular_samples: usize,
) -> Result<OrderEstimate<T>> {
    if radii.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: radii.len(),
        });
    }
    if radii.iter().any(|r| !(*r > T::zero())) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "radii must be positive and strictly increasing".into(),
        ));
    }
    if angular_samples < 8 {
        return Err(Error::InvalidArgument(format!(
            "need at least 8 angular samples, got {angular_samples}"
        )));
    }

    let init = State::from_angle(problem.bc().alpha());
    let b = problem.interval().b();
    let tau = T::PI() + T::PI();
    let log_max_modulus: Vec<T> = radii
        .par_iter()
        .map(|&r| {
            (0..angular_samples)
                .map(|j| {
                    let phi = tau * from_usize::<T>(j) / from_usize::<T>(angular_samples);
                    let lambda = Complex::from_polar(r, phi);
                    march(problem, lambda, init, &[b])[0].ln_abs_u()
                })
                .fold(T::neg_infinity(), T::max)
        })
        .collect();

    let ln10 = lit::<T>(10.0).ln();
    let usable: Vec<(T, T)> = radii
        .iter()
        .zip(&log_max_modulus)
        .filter(|(_, &lm)| lm > ln10)
        .map(|(&r, &lm)| (r.ln(), lm.ln()))
        .collect();
    if usable.len() < 2 {
        return Err(Error::DegenerateModulus);
    }
    let k = from_usize::<T>(usable.len());
    let mx = usable.iter().fold(T::zero(), |a, p| a + p.0) / k;
    let my = usable.iter().fold(T::zero(), |a, p| a + p.1) / k;
    let (sxy, sxx) = usable
        .iter()
        .fold((T::zero(), T::zero()), |(sxy, sxx), &(x, y)| {
            (sxy + (x - mx) * (y - my), sxx + (x - mx) * (x - mx))
        });
    let decades = (radii[radii.len() - 1] / radii[0]).log10();
    Ok(OrderEstimate {
        radii: radii.to_vec(),
        log_max_modulus,
        slope: sxy / sxx,
        low_confidence: decades < lit(3.0) || usable.len() < 3,
    })
}

// ---------------------------------------------------------------------------
// power sums with exponent 1/2 + ε

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesCheckpoint {
    pub n: usize,
    pub sum: f64,
    /// Analytic bound on the remaining tail, when known.
    pub tail_bound: Option<f64>,
}

/// Largest `N` accepted by [`partial_sum_primes`].
pub const MAX_PRIME_TERMS: usize = 10_000_000;

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 0.5 {
        Ok(())
    } else {
        Err(Error::EpsilonOutOfRange(epsilon))
    }
}

/// `10³, 10⁴, …` up to `n`, plus `n` itself.
pub fn checkpoints(n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = std::iter::successors(Some(1000usize), |k| k.checked_mul(10))
        .take_while(|&k| k <= n)
        .collect();
    if out.last() != Some(&n) {
        out.push(n);
    }
    out
}

fn checkpoint_sums(n: usize, term: impl Fn(usize) -> f64) -> Vec<(usize, f64)> {
    let marks = checkpoints(n);
    let mut out = Vec::with_capacity(marks.len());
    let mut sum = 0.0;
    let mut next = 0;
    for k in 1..=n {
        sum += term(k);
        if k == marks[next] {
            out.push((k, sum));
            next += 1;
        }
    }
    out
}

/// `Σ_{k <= N} p_k^{-(1/2 + ε)}` at the checkpoints.
pub fn partial_sum_primes(epsilon: f64, n: usize) -> Result<Vec<SeriesCheckpoint>> {
    check_epsilon(epsilon)?;
    if n == 0 || n > MAX_PRIME_TERMS {
        return Err(Error::InvalidArgument(format!(
            "prime series length must lie in [1, {MAX_PRIME_TERMS}], got {n}"
        )));
    }
    let primes = first_primes(n)?;
    Ok(partial_sum_primes_in(&primes, epsilon, n))
}

fn partial_sum_primes_in(primes: &PrimeTable, epsilon: f64, n: usize) -> Vec<SeriesCheckpoint> {
    let e = -(0.5 + epsilon);
    checkpoint_sums(n, |k| (primes.nth(k).unwrap() as f64).powf(e))
        .into_iter()
        .map(|(n, sum)| SeriesCheckpoint {
            n,
            sum,
            tail_bound: None,
        })
        .collect()
}

/// `Σ_{k <= N} (c k²)^{-(1/2 + ε)}` at the checkpoints, each with the tail
/// bound `∫_N^∞ (c t²)^{-(1/2+ε)} dt = c^{-(1/2+ε)} N^{-2ε} / (2ε)`.
pub fn partial_sum_spectrum(c: f64, epsilon: f64, n: usize) -> Result<Vec<SeriesCheckpoint>> {
    check_epsilon(epsilon)?;
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "growth constant must be positive, got {c}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument(
            "series length must be positive".into(),
        ));
    }
    let e = -(0.5 + epsilon);
    let ce = c.powf(e);
    Ok(
        checkpoint_sums(n, |k| ce * ((k as f64) * (k as f64)).powf(e))
            .into_iter()
            .map(|(n, sum)| SeriesCheckpoint {
                n,
                sum,
                tail_bound: Some(ce * (n as f64).powf(-2.0 * epsilon) / (2.0 * epsilon)),
            })
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesDichotomy {
    pub epsilon: f64,
    pub primes: Vec<SeriesCheckpoint>,
    pub model: Vec<SeriesCheckpoint>,
    pub verdict: Verdict,
}

impl SeriesDichotomy {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "series,n,partial_sum,tail_bound")?;
        for (name, rows) in [("primes", &self.primes), ("model", &self.model)] {
            for r in rows.iter() {
                writeln!(
                    w,
                    "{name},{},{},{}",
                    r.n,
                    r.sum,
                    r.tail_bound.map(|t| t.to_string()).unwrap_or_default()
                )?;
            }
        }
        Ok(())
    }
}

/// Run both series to `n` and compare their signatures.
///
/// PASS when (a) for the model series `S(N) - S(N_k) <= tail(N_k)` at every
/// checkpoint and the per-decade increments strictly decrease, and (b)
/// every per-decade ratio of the prime series is at least
/// `10^{(1/2 - ε)/2}`, half the exponent of its asymptotic decade growth.
pub fn series_dichotomy(c: f64, epsilon: f64, n: usize) -> Result<SeriesDichotomy> {
    let primes = partial_sum_primes(epsilon, n)?;
    let model = partial_sum_spectrum(c, epsilon, n)?;

    let total = model.last().unwrap().sum;
    let tails_hold = model.iter().all(|m| total - m.sum <= m.tail_bound.unwrap());
    let increments: Vec<f64> = model.windows(2).map(|w| w[1].sum - w[0].sum).collect();
    let shrinking = increments.windows(2).all(|w| w[1] < w[0]);

    let factor = 10f64.powf((0.5 - epsilon) / 2.0);
    let decade_ratios: Vec<f64> = primes
        .windows(2)
        .filter(|w| w[1].n == 10 * w[0].n)
        .map(|w| w[1].sum / w[0].sum)
        .collect();
    let growing = decade_ratios.iter().all(|&r| r >= factor);

    let verdict = if decade_ratios.is_empty() {
        Verdict::Inconclusive
    } else {
        Verdict::from_bool(tails_hold && shrinking && growing)
    };
    Ok(SeriesDichotomy {
        epsilon,
        primes,
        model,
        verdict,
    })
}
