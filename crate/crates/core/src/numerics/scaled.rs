//! Complex numbers with a detached base-2 exponent.
//!
//! Trace-map orbits grow like `exp(C * lambda^n)`, far outside the range of
//! `f64`. A [`ScaledComplex`] keeps a mantissa with modulus in `[1, 2)` and an
//! `i64` exponent, so products and sums of comparable magnitude stay exact in
//! the mantissa. Exponent overflow produces a non-finite value (mirroring
//! IEEE semantics); the `checked_*` methods turn that into an error.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::NumericsError;

/// Terms more than this many binary orders smaller are dropped in additions.
const ALIGN_LIMIT: i64 = 128;

#[derive(Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    mantissa: Complex64,
    exp2: i64,
}

/// `x * 2^k` for any `k`, without intermediate overflow or underflow.
pub(crate) fn ldexp(mut x: f64, mut k: i64) -> f64 {
    while k > 1000 {
        x *= pow2(1000);
        k -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while k < -1000 {
        x *= pow2(-1000);
        k += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * pow2(k)
}

/// Exact power of two for `-1022 <= k <= 1023`.
fn pow2(k: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&k));
    f64::from_bits(((k + 1023) as u64) << 52)
}

/// `floor(log2(a))` for finite `a > 0`.
fn ilog2(a: f64) -> i64 {
    let bits = a.to_bits();
    let e = ((bits >> 52) & 0x7ff) as i64;
    if e == 0 {
        // subnormal
        let m = bits & ((1u64 << 52) - 1);
        return -1074 + (63 - m.leading_zeros() as i64);
    }
    e - 1023
}

impl ScaledComplex {
    pub const ZERO: ScaledComplex = ScaledComplex { mantissa: Complex64::new(0.0, 0.0), exp2: 0 };
    pub const ONE: ScaledComplex = ScaledComplex { mantissa: Complex64::new(1.0, 0.0), exp2: 0 };
    const NAN: ScaledComplex = ScaledComplex { mantissa: Complex64::new(f64::NAN, f64::NAN), exp2: 0 };

    /// Builds `m * 2^e` and normalizes.
    pub fn from_parts(m: Complex64, e: i64) -> ScaledComplex {
        if !(m.re.is_finite() && m.im.is_finite()) {
            return Self::NAN;
        }
        let a = m.re.abs().max(m.im.abs());
        if a == 0.0 {
            return Self::ZERO;
        }
        // bring the larger component to [1, 2) first, then fix up the modulus
        let shift = ilog2(a);
        let mut mant = Complex64::new(ldexp(m.re, -shift), ldexp(m.im, -shift));
        let mut exp = match e.checked_add(shift) {
            Some(v) => v,
            None => return Self::NAN,
        };
        if mant.norm_sqr() >= 4.0 {
            mant *= 0.5;
            exp = match exp.checked_add(1) {
                Some(v) => v,
                None => return Self::NAN,
            };
        }
        ScaledComplex { mantissa: mant, exp2: exp }
    }

    pub fn from_complex(z: Complex64) -> ScaledComplex {
        Self::from_parts(z, 0)
    }

    pub fn from_f64(x: f64) -> ScaledComplex {
        Self::from_parts(Complex64::new(x, 0.0), 0)
    }

    pub fn mantissa(&self) -> Complex64 {
        self.mantissa
    }

    pub fn exp2(&self) -> i64 {
        self.exp2
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.mantissa.re.is_finite() && self.mantissa.im.is_finite()
    }

    /// Plain complex value; saturates to infinity or zero outside `f64` range.
    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(ldexp(self.mantissa.re, self.exp2), ldexp(self.mantissa.im, self.exp2))
    }

    /// `ln |x|`.
    pub fn log_abs(&self) -> Result<f64, NumericsError> {
        if !self.is_finite() {
            return Err(NumericsError::ExponentOverflow);
        }
        if self.is_zero() {
            return Err(NumericsError::LogOfZero);
        }
        Ok(self.mantissa.norm().ln() + self.exp2 as f64 * std::f64::consts::LN_2)
    }

    /// `ln |x|`, with `-inf` for zero.
    pub fn ln_abs_or_neg_inf(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.log_abs().unwrap_or(f64::NAN)
        }
    }

    pub fn conj(&self) -> ScaledComplex {
        ScaledComplex { mantissa: self.mantissa.conj(), exp2: self.exp2 }
    }

    pub fn scale(&self, k: f64) -> ScaledComplex {
        Self::from_parts(self.mantissa * k, self.exp2)
    }

    pub fn recip(&self) -> ScaledComplex {
        if self.is_zero() {
            return Self::NAN;
        }
        match self.exp2.checked_neg() {
            Some(e) => Self::from_parts(self.mantissa.inv(), e),
            None => Self::NAN,
        }
    }

    pub fn div(&self, rhs: &ScaledComplex) -> ScaledComplex {
        *self * rhs.recip()
    }

    /// Principal square root.
    pub fn sqrt(&self) -> ScaledComplex {
        if self.is_zero() || !self.is_finite() {
            return *self;
        }
        let e = self.exp2;
        if e.rem_euclid(2) == 0 {
            Self::from_parts(self.mantissa.sqrt(), e / 2)
        } else {
            Self::from_parts((self.mantissa * 2.0).sqrt(), (e - 1).div_euclid(2))
        }
    }

    pub fn checked_add(self, rhs: ScaledComplex) -> Result<ScaledComplex, NumericsError> {
        finite(self + rhs)
    }

    pub fn checked_sub(self, rhs: ScaledComplex) -> Result<ScaledComplex, NumericsError> {
        finite(self - rhs)
    }

    pub fn checked_mul(self, rhs: ScaledComplex) -> Result<ScaledComplex, NumericsError> {
        finite(self * rhs)
    }

    pub fn checked_neg(self) -> Result<ScaledComplex, NumericsError> {
        finite(-self)
    }

    /// Orders by modulus (`log2 |x|`); zero is smallest.
    pub fn abs_cmp(&self, other: &ScaledComplex) -> std::cmp::Ordering {
        let key = |v: &ScaledComplex| {
            if v.is_zero() {
                (i64::MIN, 0.0)
            } else {
                (v.exp2, v.mantissa.norm())
            }
        };
        let (a, b) = (key(self), key(other));
        a.0.cmp(&b.0).then(a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
    }
}

fn finite(v: ScaledComplex) -> Result<ScaledComplex, NumericsError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(NumericsError::ExponentOverflow)
    }
}

impl Default for ScaledComplex {
    fn default() -> Self {
        Self::ZERO
    }
}

impl fmt::Debug for ScaledComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)*2^{}", self.mantissa.re, self.mantissa.im, self.exp2)
    }
}

impl From<Complex64> for ScaledComplex {
    fn from(z: Complex64) -> Self {
        Self::from_complex(z)
    }
}

impl From<f64> for ScaledComplex {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Add for ScaledComplex {
    type Output = ScaledComplex;

    fn add(self, rhs: ScaledComplex) -> ScaledComplex {
        if !self.is_finite() || !rhs.is_finite() {
            return Self::NAN;
        }
        if rhs.is_zero() {
            return self;
        }
        if self.is_zero() {
            return rhs;
        }
        let (big, small) = if self.exp2 >= rhs.exp2 { (self, rhs) } else { (rhs, self) };
        let gap = big.exp2 - small.exp2;
        if gap > ALIGN_LIMIT {
            return big;
        }
        let m = big.mantissa + small.mantissa * ldexp(1.0, -gap);
        Self::from_parts(m, big.exp2)
    }
}

impl Neg for ScaledComplex {
    type Output = ScaledComplex;

    fn neg(self) -> ScaledComplex {
        ScaledComplex { mantissa: -self.mantissa, exp2: self.exp2 }
    }
}

impl Sub for ScaledComplex {
    type Output = ScaledComplex;

    fn sub(self, rhs: ScaledComplex) -> ScaledComplex {
        self + (-rhs)
    }
}

impl Mul for ScaledComplex {
    type Output = ScaledComplex;

    fn mul(self, rhs: ScaledComplex) -> ScaledComplex {
        if self.is_zero() || rhs.is_zero() {
            if self.is_finite() && rhs.is_finite() {
                return Self::ZERO;
            }
            return Self::NAN;
        }
        match self.exp2.checked_add(rhs.exp2) {
            Some(e) => Self::from_parts(self.mantissa * rhs.mantissa, e),
            None => Self::NAN,
        }
    }
}

/// `ln(sum exp(v_i))` over finite entries; `-inf` if none.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().filter(|v| v.is_finite()).map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `ln sqrt(sum |v_i|^2)` for scaled entries.
pub fn log_norm(values: &[ScaledComplex]) -> f64 {
    let logs: Vec<f64> = values.iter().map(|v| 2.0 * v.ln_abs_or_neg_inf()).collect();
    0.5 * log_sum_exp(&logs)
}
