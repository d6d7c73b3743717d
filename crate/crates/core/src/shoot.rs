//! Exact propagation of `u' = -s v`, `v' = (λ r - q) u` across
//! constant-coefficient pieces, and the Prüfer angle built on it.
//!
//! On a piece with `k = λ r - q` and `z = s k h²` the solution operator is
//!
//! ```text
//! [ c(z)        -s h σ(z) ]
//! [ k h σ(z)     c(z)     ]      c(z) = cos √z,  σ(z) = sin √z / √z
//! ```
//!
//! with both kernels continued analytically through `z = 0` (series) and
//! into `z < 0` or complex `z` (hyperbolic). The determinant is
//! `c² + z σ² = 1`.
//!
//! The angle convention is `u = ρ sin θ`, `v = -ρ cos θ`, `θ(a) = α`; the
//! boundary condition at `b` holds exactly when `θ(b) ≡ β (mod π)`.

use num_complex::Complex;
use serde::Serialize;

use crate::coeff::SLProblem;
use crate::error::Result;
use crate::scalar::{lit, Real};

/// Below this `|z|` the kernels are summed as power series.
const SERIES_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct State<T> {
    pub u: Complex<T>,
    pub v: Complex<T>,
}

impl<T: Real> State<T> {
    pub fn new(u: Complex<T>, v: Complex<T>) -> Self {
        Self { u, v }
    }

    pub fn real(u: T, v: T) -> Self {
        Self {
            u: Complex::new(u, T::zero()),
            v: Complex::new(v, T::zero()),
        }
    }

    /// Initial data satisfying the left boundary condition:
    /// `(sin α, -cos α)`.
    pub fn from_angle(alpha: T) -> Self {
        Self::real(alpha.sin(), -alpha.cos())
    }

    pub fn norm_sqr(&self) -> T {
        self.u.norm_sqr() + self.v.norm_sqr()
    }

    pub fn is_trivial(&self) -> bool {
        self.norm_sqr() == T::zero()
    }

    fn scale(self, f: T) -> Self {
        Self {
            u: self.u * f,
            v: self.v * f,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferMatrix<T> {
    pub m11: Complex<T>,
    pub m12: Complex<T>,
    pub m21: Complex<T>,
    pub m22: Complex<T>,
}

impl<T: Real> TransferMatrix<T> {
    pub fn identity() -> Self {
        let (o, l) = (
            Complex::new(T::zero(), T::zero()),
            Complex::new(T::one(), T::zero()),
        );
        Self {
            m11: l,
            m12: o,
            m21: o,
            m22: l,
        }
    }

    pub fn det(&self) -> Complex<T> {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn apply(&self, s: State<T>) -> State<T> {
        State {
            u: self.m11 * s.u + self.m12 * s.v,
            v: self.m21 * s.u + self.m22 * s.v,
        }
    }

    /// `later · self`: first `self`, then `later`.
    pub fn then(&self, later: &Self) -> Self {
        Self {
            m11: later.m11 * self.m11 + later.m12 * self.m21,
            m12: later.m11 * self.m12 + later.m12 * self.m22,
            m21: later.m21 * self.m11 + later.m22 * self.m21,
            m22: later.m21 * self.m12 + later.m22 * self.m22,
        }
    }

    pub fn max_abs(&self) -> T {
        [self.m11, self.m12, self.m21, self.m22]
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    fn scale(self, f: T) -> Self {
        Self {
            m11: self.m11 * f,
            m12: self.m12 * f,
            m21: self.m21 * f,
            m22: self.m22 * f,
        }
    }
}

fn series_c<T: Real, Z>(z: Z) -> Z
where
    Z: Copy + std::ops::Mul<Output = Z> + std::ops::Add<Output = Z> + std::ops::Mul<T, Output = Z>,
    Z: std::ops::Add<T, Output = Z>,
{
    // 1 - z/2 + z²/24 - z³/720 + z⁴/40320 (Horner)
    let t4 = z * lit::<T>(1.0 / 40320.0) + lit::<T>(-1.0 / 720.0);
    let t3 = z * t4 + lit::<T>(1.0 / 24.0);
    let t2 = z * t3 + lit::<T>(-0.5);
    z * t2 + T::one()
}

fn series_sigma<T: Real, Z>(z: Z) -> Z
where
    Z: Copy + std::ops::Mul<Output = Z> + std::ops::Add<Output = Z> + std::ops::Mul<T, Output = Z>,
    Z: std::ops::Add<T, Output = Z>,
{
    // 1 - z/6 + z²/120 - z³/5040 + z⁴/362880
    let t4 = z * lit::<T>(1.0 / 362880.0) + lit::<T>(-1.0 / 5040.0);
    let t3 = z * t4 + lit::<T>(1.0 / 120.0);
    let t2 = z * t3 + lit::<T>(-1.0 / 6.0);
    z * t2 + T::one()
}

/// `(c(z)·e^{-t}, σ(z)·e^{-t}, t)` with `t = |Im √z|`; the scaled kernels
/// are bounded by one in modulus.
pub(crate) fn complex_kernels<T: Real>(z: Complex<T>) -> (Complex<T>, Complex<T>, T) {
    if z.norm() < lit(SERIES_THRESHOLD) {
        return (series_c::<T, _>(z), series_sigma::<T, _>(z), T::zero());
    }
    let w = z.sqrt();
    let t = w.im.abs();
    let iw = Complex::new(-w.im, w.re);
    let ep = (iw - t).exp();
    let em = (-iw - t).exp();
    let half = lit::<T>(0.5);
    let c = (ep + em) * half;
    let sin = (ep - em) * Complex::new(T::zero(), -half);
    (c, sin / w, t)
}

/// Real-argument version of [`complex_kernels`].
pub(crate) fn real_kernels<T: Real>(z: T) -> (T, T, T) {
    if z.abs() < lit(SERIES_THRESHOLD) {
        (series_c::<T, _>(z), series_sigma::<T, _>(z), T::zero())
    } else if z > T::zero() {
        let w = z.sqrt();
        let (sn, cs) = w.sin_cos();
        (cs, sn / w, T::zero())
    } else {
        let kappa = (-z).sqrt();
        let e = (-(kappa + kappa)).exp();
        let half = lit::<T>(0.5);
        ((T::one() + e) * half, (T::one() - e) * half / kappa, kappa)
    }
}

/// Scaled transfer matrix of one piece: the true matrix is
/// `matrix · exp(log_scale)`.
pub fn piece_matrix_scaled<T: Real>(
    s: T,
    q: T,
    r: T,
    lambda: Complex<T>,
    h: T,
) -> (TransferMatrix<T>, T) {
    let k = lambda * r - q;
    let z = k * (s * h * h);
    let (c, sigma, t) = complex_kernels(z);
    (
        TransferMatrix {
            m11: c,
            m12: sigma * (-s * h),
            m21: k * sigma * h,
            m22: c,
        },
        t,
    )
}

/// Exact transfer matrix across a piece of length `h` with constant
/// `s`, `q`, `r`. Entries overflow once `|Im √z|` exceeds the exponent
/// range; use [`piece_matrix_scaled`] there.
pub fn piece_matrix<T: Real>(s: T, q: T, r: T, lambda: Complex<T>, h: T) -> TransferMatrix<T> {
    let (m, t) = piece_matrix_scaled(s, q, r, lambda, h);
    if t == T::zero() {
        m
    } else {
        m.scale(t.exp())
    }
}

/// Solution at `b` for initial data `init` at `a`.
pub fn integrate_system<T: Real>(
    problem: &SLProblem<T>,
    lambda: Complex<T>,
    init: State<T>,
) -> State<T> {
    let mut state = init;
    for (s, q, r, h) in problem.coeffs().iter_pieces() {
        state = piece_matrix(s, q, r, lambda, h).apply(state);
    }
    debug_assert!(init.is_trivial() || !state.is_trivial());
    state
}

/// A state stored as `state · exp(log_scale)` with `|state| = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledState<T> {
    pub x: T,
    pub state: State<T>,
    pub log_scale: T,
}

impl<T: Real> ScaledState<T> {
    fn normalized(x: T, state: State<T>, log_scale: T) -> Self {
        let n = state.norm_sqr().sqrt();
        Self {
            x,
            state: state.scale(n.recip()),
            log_scale: log_scale + n.ln(),
        }
    }

    /// `ln |u|`.
    pub fn ln_abs_u(&self) -> T {
        self.log_scale + self.state.u.norm().ln()
    }
}

/// Propagate `init` from `a` and record the solution at each of the
/// non-decreasing points `xs ⊂ [a, b]`, without overflow.
pub fn march<T: Real>(
    problem: &SLProblem<T>,
    lambda: Complex<T>,
    init: State<T>,
    xs: &[T],
) -> Vec<ScaledState<T>> {
    let coeffs = problem.coeffs();
    let mesh = coeffs.mesh();
    let (s, q, r) = (
        coeffs.s().values(),
        coeffs.q().values(),
        coeffs.r().values(),
    );
    let last = coeffs.pieces() - 1;

    let mut cur = ScaledState::normalized(problem.interval().a(), init, T::zero());
    let mut piece = 0;
    let step = |cur: ScaledState<T>, piece: usize, to: T| {
        let h = to - cur.x;
        if h <= T::zero() {
            return ScaledState { x: to, ..cur };
        }
        let (m, t) = piece_matrix_scaled(s[piece], q[piece], r[piece], lambda, h);
        ScaledState::normalized(to, m.apply(cur.state), cur.log_scale + t)
    };

    xs.iter()
        .map(|&x| {
            while piece < last && x > mesh[piece + 1] {
                cur = step(cur, piece, mesh[piece + 1]);
                piece += 1;
            }
            cur = step(cur, piece, x);
            cur
        })
        .collect()
}

/// Solution at `b`, scaled.
pub fn integrate_system_scaled<T: Real>(
    problem: &SLProblem<T>,
    lambda: Complex<T>,
    init: State<T>,
) -> ScaledState<T> {
    march(problem, lambda, init, &[problem.interval().b()])[0]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleResult<T> {
    /// Continuous Prüfer angle at `b`.
    pub theta_b: T,
    /// Number of multiples of π in `(θ(a), θ(b)]`, i.e. zeros of `u` in
    /// `(a, b]`.
    pub winding: i64,
}

/// Advance the Prüfer angle across one piece.
///
/// Oscillatory pieces (`s > 0`, `k > 0`) use the phase `ψ` with
/// `tan ψ = (ω/s) tan θ`, which grows linearly at rate `ω = √(s k)` and
/// meets the multiples of π together with `θ`. Every other piece has at
/// most one zero of `u`, which is read off from the sign of `u` at the end
/// relative to the parity of the starting branch.
pub(crate) fn advance_angle<T: Real>(theta: T, s: T, k: T, h: T) -> T {
    let pi = T::PI();
    if s > T::zero() && k > T::zero() {
        let omega = (s * k).sqrt();
        let m = (theta / pi).round();
        let tr = theta - m * pi;
        let psi = m * pi + (omega * tr.sin()).atan2(s * tr.cos()) + omega * h;
        let m = (psi / pi).round();
        let pr = psi - m * pi;
        return m * pi + (s * pr.sin()).atan2(omega * pr.cos());
    }

    let j = (theta / pi).floor();
    let (sn, cs) = theta.sin_cos();
    let (c, sigma, _) = real_kernels(s * k * h * h);
    let u1 = c * sn + s * h * sigma * cs;
    let v1 = k * h * sigma * sn - c * cs;

    let even = (j * lit(0.5)).fract() == T::zero();
    let signed = if even { u1 } else { -u1 };
    let crossed = signed < T::zero() || (u1 == T::zero() && theta > j * pi);

    let mut phi = u1.atan2(-v1);
    if phi < T::zero() {
        phi = phi + pi;
    }
    if phi >= pi {
        phi = phi - pi;
    }
    let j = if crossed { j + T::one() } else { j };
    j * pi + phi
}

/// `θ(b; λ)` without the definiteness check.
pub(crate) fn theta_at_b<T: Real>(problem: &SLProblem<T>, lambda: T) -> T {
    problem
        .coeffs()
        .iter_pieces()
        .fold(problem.bc().alpha(), |theta, (s, q, r, h)| {
            advance_angle(theta, s, lambda * r - q, h)
        })
}

/// Continuous Prüfer angle at `b` for real `λ`.
pub fn prufer_angle<T: Real>(problem: &SLProblem<T>, lambda: T) -> Result<AngleResult<T>> {
    problem.coeffs().check_right_definite()?;
    let theta_b = theta_at_b(problem, lambda);
    Ok(AngleResult {
        theta_b,
        winding: (theta_b / T::PI()).floor().to_i64().unwrap_or(i64::MAX),
    })
}
