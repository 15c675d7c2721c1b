//! Scalar abstractions.
//!
//! Two families of numbers appear in this crate:
//!
//! - [`Real`]: binary floating point (`f32`, `f64`) used by the measures and
//!   samplers. It carries the tolerances that depend on the precision of the
//!   type and the raw variate sources the samplers are built on.
//! - [`Field`]: anything with exact-enough field arithmetic that the moment
//!   recurrences can run over. `f64` gives fast approximate values,
//!   [`BigRational`] gives exact ones.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Floating point scalar used for measure locations, masses and variates.
pub trait Real:
    Float + FloatConst + FromPrimitive + Default + Debug + Display + Send + Sync + 'static
{
    /// Allowed deviation of a probability measure's total mass from one.
    const MASS_TOLERANCE: Self;
    /// Allowed deviation of a normalized density's integral from one.
    const DENSITY_TOLERANCE: Self;

    /// A standard normal variate.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// A uniform variate on `[0, 1)`.
    fn unit<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Converts an `f64` literal. Every `Real` can represent (a rounding of)
    /// any finite `f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("real is representable as f64")
    }
}

impl Real for f64 {
    const MASS_TOLERANCE: Self = 1e-12;
    const DENSITY_TOLERANCE: Self = 1e-10;

    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    #[inline]
    fn unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random::<f64>()
    }
}

impl Real for f32 {
    const MASS_TOLERANCE: Self = 1e-5;
    const DENSITY_TOLERANCE: Self = 1e-5;

    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    #[inline]
    fn unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random::<f32>()
    }
}

/// Field arithmetic for the moment recurrences.
pub trait Field: Clone + Debug + Num + Signed + FromPrimitive + PartialOrd + Send + Sync {
    /// Converts a float. Exact for rational fields (every finite binary
    /// float is a dyadic rational); `None` for non-finite input.
    fn from_real(x: f64) -> Option<Self>;

    /// Nearest `f64`.
    fn to_real(&self) -> f64;

    /// `num / den` for small integers.
    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("i64 fits") / Self::from_i64(den).expect("i64 fits")
    }

    /// Whether `self` equals one, exactly for rational fields and within
    /// the mass tolerance for floats.
    fn is_unit(&self) -> bool;
}

impl Field for f64 {
    fn from_real(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn to_real(&self) -> f64 {
        *self
    }

    fn is_unit(&self) -> bool {
        (self - 1.0).abs() <= <f64 as Real>::MASS_TOLERANCE
    }
}

impl Field for BigRational {
    fn from_real(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }

    fn to_real(&self) -> f64 {
        // `ToPrimitive` for big ratios can overflow the intermediate integer
        // conversion; fall back to a scaled division in that case.
        self.to_f64().unwrap_or_else(|| {
            let n = self.numer().to_f64().unwrap_or(f64::NAN);
            let d = self.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }

    fn is_unit(&self) -> bool {
        self.is_one()
    }
}

/// Formats a rational as `p/q`, or `p` when the denominator is one.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p/q`, an integer, or a decimal literal (converted exactly) into a
/// rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Ok(n) = text.parse::<BigInt>() {
        return Some(BigRational::from_integer(n));
    }
    parse_decimal(text)
}

// "0.125" -> 125/1000, exactly, rather than via the nearest binary float.
fn parse_decimal(text: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let all: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let all = all / BigInt::from(10);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(all);
    if scale >= 0 {
        q *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        q /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -q } else { q })
}
