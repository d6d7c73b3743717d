//! Problem data: interval, step-function coefficients and separated
//! boundary conditions.
//!
//! Coefficients are stored as `s = 1/p`, `q` and `r`. A piece with `s = 0`
//! is a piece where `p` is infinite, which is how Atkinson-type problems
//! enter the model.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{to_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval<T> {
    a: T,
    b: T,
}

impl<T: Real> Interval<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(Error::InvalidInterval {
                a: to_f64(a),
                b: to_f64(b),
            });
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn length(&self) -> T {
        self.b - self.a
    }
}

/// A step function: `values[i]` on `[breakpoints[i], breakpoints[i+1])`,
/// with the last piece closed on the right.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseConstant<T> {
    breakpoints: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> PiecewiseConstant<T> {
    pub fn new(breakpoints: Vec<T>, values: Vec<T>) -> Result<Self> {
        if breakpoints.len() < 2 || breakpoints.len() != values.len() + 1 {
            return Err(Error::LengthMismatch {
                breakpoints: breakpoints.len(),
                expected: breakpoints.len().saturating_sub(1).max(1),
                got: values.len(),
            });
        }
        for (i, x) in breakpoints.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFiniteValue { index: i });
            }
        }
        for (i, w) in breakpoints.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::NonMonotoneMesh { index: i + 1 });
            }
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index: i });
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    /// The constant function `value` on `interval`.
    pub fn constant(interval: Interval<T>, value: T) -> Result<Self> {
        Self::new(vec![interval.a(), interval.b()], vec![value])
    }

    /// `values.len()` equal pieces on `interval`.
    pub fn uniform(interval: Interval<T>, values: Vec<T>) -> Result<Self> {
        let m = values.len();
        if m == 0 {
            return Err(Error::LengthMismatch {
                breakpoints: 0,
                expected: 1,
                got: 0,
            });
        }
        let h = interval.length() / crate::scalar::from_usize(m);
        let mut breakpoints: Vec<T> = (0..m)
            .map(|i| interval.a() + h * crate::scalar::from_usize(i))
            .collect();
        breakpoints.push(interval.b());
        Self::new(breakpoints, values)
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn pieces(&self) -> usize {
        self.values.len()
    }

    pub fn a(&self) -> T {
        self.breakpoints[0]
    }

    pub fn b(&self) -> T {
        *self.breakpoints.last().unwrap()
    }

    pub fn interval(&self) -> Interval<T> {
        Interval {
            a: self.a(),
            b: self.b(),
        }
    }

    /// Index of the piece containing `x`; the right endpoint belongs to the
    /// last piece.
    pub fn piece_index(&self, x: T) -> Option<usize> {
        if x < self.a() || x > self.b() {
            return None;
        }
        let k = self.breakpoints.partition_point(|&bp| bp <= x);
        Some(k.saturating_sub(1).min(self.pieces() - 1))
    }

    pub fn value_at(&self, x: T) -> Option<T> {
        self.piece_index(x).map(|i| self.values[i])
    }

    /// Exact integral over `[x0, x1]`.
    pub fn integrate(&self, x0: T, x1: T) -> Result<T> {
        if x0 < self.a() || x1 > self.b() || x0 > x1 || !x0.is_finite() || !x1.is_finite() {
            return Err(Error::OutOfDomain {
                what: "integration bounds",
                value: to_f64(if x0 < self.a() || x0 > x1 { x0 } else { x1 }),
                domain: format!("[{}, {}] with x0 <= x1", self.a(), self.b()),
            });
        }
        let mut total = T::zero();
        for (i, &v) in self.values.iter().enumerate() {
            let lo = self.breakpoints[i].max(x0);
            let hi = self.breakpoints[i + 1].min(x1);
            if hi > lo {
                total = total + v * (hi - lo);
            }
        }
        Ok(total)
    }

    /// Re-express on a finer mesh that contains every breakpoint of `self`.
    fn resample(&self, mesh: &[T]) -> Vec<T> {
        let mut j = 0;
        mesh.windows(2)
            .map(|w| {
                while self.breakpoints[j + 1] <= w[0] {
                    j += 1;
                }
                self.values[j]
            })
            .collect()
    }
}

/// `s = 1/p`, `q` and `r` on one common mesh.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientSet<T> {
    s: PiecewiseConstant<T>,
    q: PiecewiseConstant<T>,
    r: PiecewiseConstant<T>,
}

impl<T: Real> CoefficientSet<T> {
    /// Merge the three meshes (exact breakpoint union) and resample.
    pub fn new(
        s: PiecewiseConstant<T>,
        q: PiecewiseConstant<T>,
        r: PiecewiseConstant<T>,
    ) -> Result<Self> {
        for other in [&q, &r] {
            if other.a() != s.a() || other.b() != s.b() {
                return Err(Error::DomainMismatch {
                    a0: to_f64(s.a()),
                    b0: to_f64(s.b()),
                    a1: to_f64(other.a()),
                    b1: to_f64(other.b()),
                });
            }
        }
        if s.breakpoints == q.breakpoints && s.breakpoints == r.breakpoints {
            return Ok(Self { s, q, r });
        }

        let mut mesh: Vec<T> = s
            .breakpoints
            .iter()
            .chain(&q.breakpoints)
            .chain(&r.breakpoints)
            .copied()
            .collect();
        mesh.sort_by(|x, y| x.partial_cmp(y).unwrap());
        mesh.dedup();

        let rebuild = |f: &PiecewiseConstant<T>| PiecewiseConstant {
            breakpoints: mesh.clone(),
            values: f.resample(&mesh),
        };
        Ok(Self {
            s: rebuild(&s),
            q: rebuild(&q),
            r: rebuild(&r),
        })
    }

    pub fn s(&self) -> &PiecewiseConstant<T> {
        &self.s
    }

    pub fn q(&self) -> &PiecewiseConstant<T> {
        &self.q
    }

    pub fn r(&self) -> &PiecewiseConstant<T> {
        &self.r
    }

    pub fn mesh(&self) -> &[T] {
        &self.s.breakpoints
    }

    pub fn pieces(&self) -> usize {
        self.s.pieces()
    }

    pub fn interval(&self) -> Interval<T> {
        self.s.interval()
    }

    /// `(s_i, q_i, r_i, h_i)` for each piece of the common mesh.
    pub fn iter_pieces(&self) -> impl Iterator<Item = (T, T, T, T)> + '_ {
        (0..self.pieces()).map(move |i| {
            let m = &self.s.breakpoints;
            (
                self.s.values[i],
                self.q.values[i],
                self.r.values[i],
                m[i + 1] - m[i],
            )
        })
    }

    /// `s >= 0` and `r >= 0` everywhere, with `r` and `s·r` not identically
    /// zero.
    pub fn check_right_definite(&self) -> Result<()> {
        if let Some(i) = self.s.values.iter().position(|&v| v < T::zero()) {
            return Err(Error::NotRightDefinite(format!(
                "s = 1/p is negative on piece {i}"
            )));
        }
        if let Some(i) = self.r.values.iter().position(|&v| v < T::zero()) {
            return Err(Error::NotRightDefinite(format!(
                "r is negative on piece {i}"
            )));
        }
        if self.r.values.iter().all(|&v| v == T::zero()) {
            return Err(Error::NotRightDefinite("r vanishes identically".into()));
        }
        Ok(())
    }

    pub fn is_right_definite(&self) -> bool {
        self.check_right_definite().is_ok()
    }
}

/// `C = ∫ sqrt((r·s)_+) dx`, the constant in `λ_n ~ n²π²/C²`.
pub fn weyl_constant<T: Real>(coeffs: &CoefficientSet<T>, interval: &Interval<T>) -> T {
    coeffs
        .iter_pieces()
        .zip(coeffs.mesh().windows(2))
        .filter(|(_, w)| w[1] > interval.a() && w[0] < interval.b())
        .map(|((s, _, r, _), w)| {
            let h = w[1].min(interval.b()) - w[0].max(interval.a());
            let rs = r * s;
            if rs > T::zero() {
                rs.sqrt() * h
            } else {
                T::zero()
            }
        })
        .fold(T::zero(), |acc, x| acc + x)
}

/// Separated boundary conditions
/// `u(a) cos α + v(a) sin α = 0`, `u(b) cos β + v(b) sin β = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryCondition<T> {
    alpha: T,
    beta: T,
}

impl<T: Real> BoundaryCondition<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        let pi = T::PI();
        if !(alpha >= T::zero() && alpha < pi) {
            return Err(Error::InvalidBoundaryAngle {
                field: "alpha",
                value: to_f64(alpha),
                range: "[0, π)",
            });
        }
        if !(beta > T::zero() && beta <= pi) {
            return Err(Error::InvalidBoundaryAngle {
                field: "beta",
                value: to_f64(beta),
                range: "(0, π]",
            });
        }
        Ok(Self { alpha, beta })
    }

    /// `y(a) = y(b) = 0`.
    pub fn dirichlet() -> Self {
        Self {
            alpha: T::zero(),
            beta: T::PI(),
        }
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SLProblem<T> {
    interval: Interval<T>,
    coeffs: CoefficientSet<T>,
    bc: BoundaryCondition<T>,
}

impl<T: Real> SLProblem<T> {
    pub fn new(
        interval: Interval<T>,
        coeffs: CoefficientSet<T>,
        bc: BoundaryCondition<T>,
    ) -> Result<Self> {
        let ci = coeffs.interval();
        if ci != interval {
            return Err(Error::DomainMismatch {
                a0: to_f64(interval.a()),
                b0: to_f64(interval.b()),
                a1: to_f64(ci.a()),
                b1: to_f64(ci.b()),
            });
        }
        Ok(Self {
            interval,
            coeffs,
            bc,
        })
    }

    /// Constant `s`, `q`, `r` on `[a, b]`.
    pub fn constant(a: T, b: T, s: T, q: T, r: T, bc: BoundaryCondition<T>) -> Result<Self> {
        let interval = Interval::new(a, b)?;
        let coeffs = CoefficientSet::new(
            PiecewiseConstant::constant(interval, s)?,
            PiecewiseConstant::constant(interval, q)?,
            PiecewiseConstant::constant(interval, r)?,
        )?;
        Self::new(interval, coeffs, bc)
    }

    /// `-y'' = λ y`, `y(0) = y(1) = 0`.
    pub fn unit_dirichlet() -> Self {
        Self::constant(
            T::zero(),
            T::one(),
            T::one(),
            T::zero(),
            T::one(),
            BoundaryCondition::dirichlet(),
        )
        .expect("unit problem is valid")
    }

    pub fn interval(&self) -> &Interval<T> {
        &self.interval
    }

    pub fn coeffs(&self) -> &CoefficientSet<T> {
        &self.coeffs
    }

    pub fn bc(&self) -> &BoundaryCondition<T> {
        &self.bc
    }

    pub fn weyl_constant(&self) -> T {
        weyl_constant(&self.coeffs, &self.interval)
    }
}
