//! Scalar abstraction so that numerical kernels run in either `f64`
//! (standard mode) or arbitrary-precision binary floats (extended mode)
//! without duplication.
//!
//! Extended values are [`dashu_float::FBig`] with round-to-even; working
//! precision is attached to values at creation through [`BigField`] and
//! propagates through arithmetic.

use std::fmt;
use std::str::FromStr;

use dashu_float::ops::Abs;
use serde::{Deserialize, Serialize};

/// Arbitrary-precision binary float used by the extended mode.
pub type Big = dashu_float::FBig<dashu_float::round::mode::HalfEven, 2>;

/// Real number operations needed by the numerical kernels.
///
/// Methods take references so that non-`Copy` big floats avoid needless
/// clones inside inner loops.
pub trait Scalar: Clone + PartialOrd + fmt::Debug + Send + Sync + 'static {
    /// Additive identity. Exact: adopts the precision of whatever it meets.
    fn zero() -> Self;
    /// Multiplicative identity. Exact: adopts the precision of whatever it meets.
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn is_finite(&self) -> bool;
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// dashu 0.6 can produce zeros with a nonzero exponent (e.g. `0 * 2^-1`
/// from subtracting equal values), and arithmetic with such a zero silently
/// swallows the other operand. Canonicalize every zero result.
#[inline]
fn canonical_zero(x: Big) -> Big {
    if x.repr().significand().is_zero() {
        Big::ZERO
    } else {
        x
    }
}

impl Scalar for Big {
    fn zero() -> Self {
        Big::ZERO
    }
    fn one() -> Self {
        Big::ONE
    }
    fn add(&self, o: &Self) -> Self {
        canonical_zero(self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        canonical_zero(self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        canonical_zero(self * o)
    }
    fn div(&self, o: &Self) -> Self {
        canonical_zero(self / o)
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn abs(&self) -> Self {
        self.clone().abs()
    }
    fn sqrt(&self) -> Self {
        self.clone().sqrt()
    }
    fn is_finite(&self) -> bool {
        !self.repr().is_infinite()
    }
    fn to_f64(&self) -> f64 {
        self.to_f64().value()
    }
}

/// Factory for scalars of one precision regime.
pub trait Field: Copy + Send + Sync {
    type R: Scalar;
    /// Lift an `f64` into the working precision.
    fn real(&self, x: f64) -> Self::R;
    /// Significant decimal digits carried by the arithmetic.
    fn decimal_digits(&self) -> u32;
}

/// Native `f64` arithmetic.
#[derive(Clone, Copy, Debug, Default)]
pub struct F64Field;

impl Field for F64Field {
    type R = f64;
    fn real(&self, x: f64) -> f64 {
        x
    }
    fn decimal_digits(&self) -> u32 {
        15
    }
}

/// Arbitrary-precision arithmetic with a fixed number of significant bits.
#[derive(Clone, Copy, Debug)]
pub struct BigField {
    bits: usize,
}

impl BigField {
    /// Field carrying at least `digits` significant decimal digits.
    pub fn with_decimal_digits(digits: u32) -> Self {
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 8;
        BigField { bits }
    }
}

impl Field for BigField {
    type R = Big;
    fn real(&self, x: f64) -> Big {
        Big::try_from(x)
            .expect("finite f64")
            .with_precision(self.bits)
            .value()
    }
    fn decimal_digits(&self) -> u32 {
        (self.bits as f64 / std::f64::consts::LOG2_10).floor() as u32
    }
}

/// Precision mode selected on the command line and in `SolverConfig`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PrecisionMode {
    #[default]
    Standard,
    Extended,
}

impl FromStr for PrecisionMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(PrecisionMode::Standard),
            "extended" => Ok(PrecisionMode::Extended),
            other => Err(format!("unknown precision mode `{other}`")),
        }
    }
}

/// Complex number over any [`Scalar`].
#[derive(Clone, Debug, PartialEq)]
pub struct Cx<R> {
    pub re: R,
    pub im: R,
}

impl<R: Scalar> Cx<R> {
    pub fn new(re: R, im: R) -> Self {
        Cx { re, im }
    }

    pub fn from_f64<F: Field<R = R>>(f: &F, re: f64, im: f64) -> Self {
        Cx {
            re: f.real(re),
            im: f.real(im),
        }
    }

    pub fn zero() -> Self {
        Cx {
            re: R::zero(),
            im: R::zero(),
        }
    }

    pub fn one() -> Self {
        Cx {
            re: R::one(),
            im: R::zero(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Cx {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Cx {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Cx {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn div(&self, o: &Self) -> Self {
        let d = o.norm_sqr();
        Cx {
            re: self.re.mul(&o.re).add(&self.im.mul(&o.im)).div(&d),
            im: self.im.mul(&o.re).sub(&self.re.mul(&o.im)).div(&d),
        }
    }

    pub fn neg(&self) -> Self {
        Cx {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn conj(&self) -> Self {
        Cx {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn scale(&self, s: &R) -> Self {
        Cx {
            re: self.re.mul(s),
            im: self.im.mul(s),
        }
    }

    pub fn norm_sqr(&self) -> R {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn modulus(&self) -> R {
        self.norm_sqr().sqrt()
    }

    /// Integer power by binary exponentiation.
    pub fn powu(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Cx {
            re: R::one(),
            im: R::zero(),
        };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// Format a [`Big`] as a decimal string keeping its full working precision.
pub fn big_to_decimal_string(x: &Big) -> String {
    x.to_decimal().value().to_string()
}

/// Parse a decimal string into a [`Big`] with at least `bits` precision.
pub fn big_from_decimal_string(s: &str, bits: usize) -> Result<Big, String> {
    let d = dashu_float::DBig::from_str(s).map_err(|e| e.to_string())?;
    Ok(d.to_binary()
        .value()
        .with_rounding::<dashu_float::round::mode::HalfEven>()
        .with_precision(bits)
        .value())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_roundtrip_and_precision() {
        let f = BigField::with_decimal_digits(60);
        let x = f.real(2.0).sqrt();
        let y = x.mul(&x).sub(&f.real(2.0));
        assert!(Scalar::to_f64(&y.abs()) < 1e-55);
        let s = big_to_decimal_string(&x);
        let back = big_from_decimal_string(&s, 220).unwrap();
        assert!(Scalar::to_f64(&back.sub(&x).abs()) < 1e-55);
    }

    #[test]
    fn cx_powu_matches_f64() {
        let f = F64Field;
        let z = Cx::from_f64(&f, 0.3, -1.2);
        let w = z.powu(7);
        let zc = num_complex::Complex64::new(0.3, -1.2).powi(7);
        assert!((w.re - zc.re).abs() < 1e-12 * zc.norm());
        assert!((w.im - zc.im).abs() < 1e-12 * zc.norm());
        let one = z.powu(0);
        assert_eq!(one.re, 1.0);
        assert_eq!(one.im, 0.0);
    }

    #[test]
    fn cx_division() {
        let f = F64Field;
        let a = Cx::from_f64(&f, 1.0, 2.0);
        let b = Cx::from_f64(&f, -0.7, 0.4);
        let q = a.div(&b);
        let r = q.mul(&b).sub(&a);
        assert!(r.modulus() < 1e-14);
    }
}
