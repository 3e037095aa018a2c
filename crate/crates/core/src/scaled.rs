//! Log-magnitude / unit-phase complex numbers.
//!
//! Theta series and Bargmann sections routinely exceed the double range on
//! their own while the weighted quantities `|s| e^{-Nφ/2}` stay moderate, so
//! values are carried as `(ln|w|, w/|w|)` until the weight is applied.

use std::ops::{Add, Div, Mul, Neg};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledComplex {
    /// Natural log of the modulus; `-inf` for zero.
    pub logmag: f64,
    /// Unit-modulus phase (1 for zero).
    pub phase: Complex64,
}

impl Neg for ScaledComplex {
    type Output = Self;
    fn neg(self) -> Self {
        ScaledComplex { logmag: self.logmag, phase: -self.phase }
    }
}

/// `other` must be nonzero.
impl Div for ScaledComplex {
    type Output = Self;
    fn div(self, other: Self) -> Self {
        if self.is_zero() {
            return self;
        }
        ScaledComplex { logmag: self.logmag - other.logmag, phase: self.phase / other.phase }
    }
}

impl ScaledComplex {
    pub const ZERO: ScaledComplex = ScaledComplex { logmag: f64::NEG_INFINITY, phase: Complex64::new(1.0, 0.0) };
    pub const ONE: ScaledComplex = ScaledComplex { logmag: 0.0, phase: Complex64::new(1.0, 0.0) };

    pub fn from_complex(w: Complex64) -> Self {
        let r = w.norm();
        if r == 0.0 {
            Self::ZERO
        } else {
            ScaledComplex { logmag: r.ln(), phase: w / r }
        }
    }

    /// `exp(w)` without forming it.
    pub fn exp(w: Complex64) -> Self {
        ScaledComplex { logmag: w.re, phase: Complex64::from_polar(1.0, w.im) }
    }

    pub fn is_zero(&self) -> bool {
        self.logmag == f64::NEG_INFINITY
    }

    /// May overflow to infinity or underflow to zero.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            Complex64::new(0.0, 0.0)
        } else {
            self.phase * self.logmag.exp()
        }
    }

    pub fn abs(&self) -> f64 {
        self.logmag.exp()
    }

    /// Multiply by `e^{s}` for real `s`.
    pub fn scale_log(self, s: f64) -> Self {
        if self.is_zero() {
            self
        } else {
            ScaledComplex { logmag: self.logmag + s, phase: self.phase }
        }
    }

    pub fn conj(self) -> Self {
        ScaledComplex { logmag: self.logmag, phase: self.phase.conj() }
    }

    /// `|self - other|` relative to `max(|self|, |other|)`.
    pub fn rel_diff(&self, other: &Self) -> f64 {
        let m = self.logmag.max(other.logmag);
        if m == f64::NEG_INFINITY {
            return 0.0;
        }
        let a = self.scale_log(-m).to_complex();
        let b = other.scale_log(-m).to_complex();
        (a - b).norm()
    }

    /// `|self - other| / e^{ref_logmag}`.
    pub fn diff_relative_to(&self, other: &Self, ref_logmag: f64) -> f64 {
        let a = self.scale_log(-ref_logmag).to_complex();
        let b = other.scale_log(-ref_logmag).to_complex();
        (a - b).norm()
    }

    fn renormalize(self) -> Self {
        let r = self.phase.norm();
        if r == 0.0 || !r.is_finite() {
            Self::ZERO
        } else {
            ScaledComplex { logmag: self.logmag + r.ln(), phase: self.phase / r }
        }
    }
}

impl Mul for ScaledComplex {
    type Output = ScaledComplex;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        ScaledComplex { logmag: self.logmag + rhs.logmag, phase: self.phase * rhs.phase }.renormalize()
    }
}

impl Mul<Complex64> for ScaledComplex {
    type Output = ScaledComplex;
    fn mul(self, rhs: Complex64) -> Self {
        self * ScaledComplex::from_complex(rhs)
    }
}

impl Add for ScaledComplex {
    type Output = ScaledComplex;
    fn add(self, rhs: Self) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let m = self.logmag.max(rhs.logmag);
        let w = self.phase * (self.logmag - m).exp() + rhs.phase * (rhs.logmag - m).exp();
        ScaledComplex::from_complex(w).scale_log(m)
    }
}

/// Sum of `exp(e_k)` over complex exponents, rescaled by the largest real part.
///
/// Also tracks `Σ |exp(e_k)|` for relative tail bounds.
#[derive(Debug, Clone)]
pub struct ExpSum {
    shift: f64,
    sum: Complex64,
    mass: f64,
}

impl ExpSum {
    /// `shift` should be close to the largest `Re e_k` that will be added.
    pub fn with_shift(shift: f64) -> Self {
        ExpSum { shift, sum: Complex64::new(0.0, 0.0), mass: 0.0 }
    }

    #[inline]
    pub fn add_exp(&mut self, e: Complex64) {
        let t = Complex64::new(e.re - self.shift, e.im).exp();
        self.sum += t;
        self.mass += t.norm();
    }

    /// Add `w · exp(e)`.
    #[inline]
    pub fn add_scaled_exp(&mut self, w: Complex64, e: Complex64) {
        let t = Complex64::new(e.re - self.shift, e.im).exp();
        self.sum += w * t;
        self.mass += (w * t).norm();
    }

    pub fn value(&self) -> ScaledComplex {
        ScaledComplex::from_complex(self.sum).scale_log(self.shift)
    }

    /// `ln Σ|terms|`.
    pub fn mass_logmag(&self) -> f64 {
        self.mass.ln() + self.shift
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Raw sum in shifted units.
    pub fn raw(&self) -> Complex64 {
        self.sum
    }

    /// Raw mass in shifted units.
    pub fn raw_mass(&self) -> f64 {
        self.mass
    }
}
