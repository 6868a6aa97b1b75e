//! Truncated-Taylor (jet) and dual-number arithmetic.
//!
//! Two building blocks live here:
//!
//! * [`Dual<N>`] — a first-order dual number with an `N`-dimensional
//!   infinitesimal part. Carrying one `Dual` seed per constant input field
//!   through a computation yields the directional derivatives along those
//!   fields, exact to floating-point rounding.
//! * [`Taylor<S>`] — a degree-4 truncated Taylor polynomial in time over any
//!   [`Scalar`] coefficient type. Propagating the drift dynamics on `Taylor`
//!   state components produces the time derivatives of every state variable
//!   along the flow, again exact to rounding (no step size is involved).
//!
//! Composing the two (`Taylor<Dual<N>>`) gives flow derivatives of a
//! perturbed initial condition in one pass, which is how iterated Lie
//! derivatives and their input couplings are evaluated.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Highest Taylor degree carried by [`Taylor`].
///
/// The longest output chain in the augmented model has relative degree 4
/// (position outputs through the thrust double integrator), so degree 4 in
/// time is sufficient for every derivative this crate needs.
pub const MAX_ORDER: usize = 4;

/// Coefficient algebra required by the generic dynamics evaluation.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    /// Multiply by a plain float constant.
    fn scale(self, f: f64) -> Self;
    /// Sine and cosine, evaluated jointly.
    fn sin_cos(self) -> (Self, Self);
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn scale(self, f: f64) -> Self {
        self * f
    }
    fn sin_cos(self) -> (Self, Self) {
        (self.sin(), self.cos())
    }
}

/// First-order dual number: `re + Σ_i eps[i]·ε_i` with `ε_i·ε_j = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<const N: usize> {
    pub re: f64,
    pub eps: [f64; N],
}

impl<const N: usize> Dual<N> {
    pub fn constant(re: f64) -> Self {
        Self { re, eps: [0.0; N] }
    }

    /// A value with a prescribed infinitesimal part.
    pub fn seeded(re: f64, eps: [f64; N]) -> Self {
        Self { re, eps }
    }
}

impl<const N: usize> Add for Dual<N> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut eps = self.eps;
        for i in 0..N {
            eps[i] += o.eps[i];
        }
        Self {
            re: self.re + o.re,
            eps,
        }
    }
}

impl<const N: usize> Sub for Dual<N> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut eps = self.eps;
        for i in 0..N {
            eps[i] -= o.eps[i];
        }
        Self {
            re: self.re - o.re,
            eps,
        }
    }
}

impl<const N: usize> Mul for Dual<N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut eps = [0.0; N];
        for i in 0..N {
            eps[i] = self.eps[i] * o.re + self.re * o.eps[i];
        }
        Self {
            re: self.re * o.re,
            eps,
        }
    }
}

impl<const N: usize> Div for Dual<N> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = 1.0 / o.re;
        let mut eps = [0.0; N];
        for i in 0..N {
            eps[i] = (self.eps[i] - self.re * inv * o.eps[i]) * inv;
        }
        Self {
            re: self.re * inv,
            eps,
        }
    }
}

impl<const N: usize> Neg for Dual<N> {
    type Output = Self;
    fn neg(self) -> Self {
        let mut eps = self.eps;
        for e in &mut eps {
            *e = -*e;
        }
        Self { re: -self.re, eps }
    }
}

impl<const N: usize> Scalar for Dual<N> {
    fn from_f64(v: f64) -> Self {
        Self::constant(v)
    }
    fn scale(self, f: f64) -> Self {
        let mut eps = self.eps;
        for e in &mut eps {
            *e *= f;
        }
        Self {
            re: self.re * f,
            eps,
        }
    }
    fn sin_cos(self) -> (Self, Self) {
        let (s, c) = self.re.sin_cos();
        let mut seps = [0.0; N];
        let mut ceps = [0.0; N];
        for i in 0..N {
            seps[i] = self.eps[i] * c;
            ceps[i] = -self.eps[i] * s;
        }
        (Self { re: s, eps: seps }, Self { re: c, eps: ceps })
    }
}

/// Degree-4 truncated Taylor polynomial `c[0] + c[1]·t + … + c[4]·t⁴`.
///
/// Arithmetic truncates at degree [`MAX_ORDER`]; higher-order information is
/// discarded, never aliased. `c[k]` is the raw polynomial coefficient, so the
/// k-th time derivative at `t = 0` is `k!·c[k]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Taylor<S> {
    pub c: [S; MAX_ORDER + 1],
}

impl<S: Scalar> Taylor<S> {
    pub fn constant(v: S) -> Self {
        let mut c = [S::zero(); MAX_ORDER + 1];
        c[0] = v;
        Self { c }
    }
}

impl<S: Scalar> Add for Taylor<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut c = self.c;
        for k in 0..=MAX_ORDER {
            c[k] = c[k] + o.c[k];
        }
        Self { c }
    }
}

impl<S: Scalar> Sub for Taylor<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut c = self.c;
        for k in 0..=MAX_ORDER {
            c[k] = c[k] - o.c[k];
        }
        Self { c }
    }
}

impl<S: Scalar> Mul for Taylor<S> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut c = [S::zero(); MAX_ORDER + 1];
        for k in 0..=MAX_ORDER {
            let mut acc = S::zero();
            for j in 0..=k {
                acc = acc + self.c[j] * o.c[k - j];
            }
            c[k] = acc;
        }
        Self { c }
    }
}

impl<S: Scalar> Div for Taylor<S> {
    type Output = Self;
    /// Power-series division; requires the divisor's constant term to be
    /// nonzero (guaranteed here by the Euler-domain precondition on cos θ).
    fn div(self, o: Self) -> Self {
        let mut q = [S::zero(); MAX_ORDER + 1];
        for k in 0..=MAX_ORDER {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc = acc - o.c[j] * q[k - j];
            }
            q[k] = acc / o.c[0];
        }
        Self { c: q }
    }
}

impl<S: Scalar> Neg for Taylor<S> {
    type Output = Self;
    fn neg(self) -> Self {
        let mut c = self.c;
        for v in &mut c {
            *v = -*v;
        }
        Self { c }
    }
}

impl<S: Scalar> Scalar for Taylor<S> {
    fn from_f64(v: f64) -> Self {
        Self::constant(S::from_f64(v))
    }

    fn scale(self, f: f64) -> Self {
        let mut c = self.c;
        for v in &mut c {
            *v = v.scale(f);
        }
        Self { c }
    }

    /// Joint sine/cosine of a Taylor series by the standard ODE recurrence
    /// `s' = u'·c`, `c' = −u'·s`:
    ///
    /// `s_k = (1/k)·Σ_{j=1..k} j·u_j·c_{k−j}`,
    /// `c_k = −(1/k)·Σ_{j=1..k} j·u_j·s_{k−j}`.
    fn sin_cos(self) -> (Self, Self) {
        let (s0, c0) = self.c[0].sin_cos();
        let mut s = [S::zero(); MAX_ORDER + 1];
        let mut c = [S::zero(); MAX_ORDER + 1];
        s[0] = s0;
        c[0] = c0;
        for k in 1..=MAX_ORDER {
            let mut sa = S::zero();
            let mut ca = S::zero();
            for j in 1..=k {
                let du = self.c[j].scale(j as f64);
                sa = sa + du * c[k - j];
                ca = ca - du * s[k - j];
            }
            s[k] = sa.scale(1.0 / k as f64);
            c[k] = ca.scale(1.0 / k as f64);
        }
        (Self { c: s }, Self { c })
    }
}
