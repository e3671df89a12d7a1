//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All algorithms are written against [`Scalar`], which is implemented for
//! `f32`, `f64` and the double-double type [`Dd`]. `f64` is the working
//! precision for everything user facing; `Dd` is used where the quantity of
//! interest is a cancellation below `f64` resolution (the near-tangential
//! boundaries of high-stage Lobatto pairs sit within 1e-25 of touching).

use std::cmp::Ordering;
use std::fmt::{self, Debug, Display, LowerExp};
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_traits::{Float, FromPrimitive, Num, One, ToPrimitive, Zero};

pub trait Scalar:
    Num
    + Neg<Output = Self>
    + PartialOrd
    + Copy
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Relative pivot magnitude below which a matrix is treated as singular.
    fn pivot_tol() -> Self;

    /// Stage-residual target for Newton iteration on implicit stage systems.
    fn newton_tol() -> Self;

    /// Relative rounding unit of one arithmetic operation.
    fn unit_roundoff() -> Self;

    fn sqrt(self) -> Self;

    fn is_finite(self) -> bool;

    fn is_nan(self) -> bool {
        self.partial_cmp(&self).is_none()
    }

    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }

    /// Larger of the two; a NaN operand yields the other one.
    fn max(self, other: Self) -> Self {
        if self.is_nan() || other > self {
            other
        } else {
            self
        }
    }

    /// Smaller of the two; a NaN operand yields the other one.
    fn min(self, other: Self) -> Self {
        if self.is_nan() || other < self {
            other
        } else {
            self
        }
    }

    fn powi(self, n: i32) -> Self {
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        if n < 0 {
            Self::one() / acc
        } else {
            acc
        }
    }

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("representable count")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Exact ratio `num / den` of two small integers, rounded once.
    #[inline]
    fn ratio(num: i64, den: i64) -> Self {
        <Self as FromPrimitive>::from_i64(num).unwrap() / <Self as FromPrimitive>::from_i64(den).unwrap()
    }

    /// Positive real `n`-th root by Newton iteration, accurate to working precision.
    fn nth_root(self, n: u32) -> Self {
        assert!(n >= 1);
        if n == 1 || self.is_zero() {
            return self;
        }
        let nn = Self::from_count(n as usize);
        let mut x = Self::lit(self.as_f64().powf(1.0 / n as f64));
        for _ in 0..8 {
            let xn1 = x.powi(n as i32 - 1);
            let next = x - (xn1 * x - self) / (nn * xn1);
            if next == x {
                break;
            }
            x = next;
        }
        x
    }
}

macro_rules! native_scalar {
    ($t:ty, $pivot:expr, $newton:expr) => {
        impl Scalar for $t {
            fn pivot_tol() -> Self {
                $pivot
            }
            fn newton_tol() -> Self {
                $newton
            }
            fn unit_roundoff() -> Self {
                <$t>::EPSILON
            }
            fn sqrt(self) -> Self {
                Float::sqrt(self)
            }
            fn is_finite(self) -> bool {
                Float::is_finite(self)
            }
            fn is_nan(self) -> bool {
                Float::is_nan(self)
            }
            fn abs(self) -> Self {
                Float::abs(self)
            }
            fn max(self, other: Self) -> Self {
                Float::max(self, other)
            }
            fn min(self, other: Self) -> Self {
                Float::min(self, other)
            }
            fn powi(self, n: i32) -> Self {
                Float::powi(self, n)
            }
        }
    };
}

native_scalar!(f64, 1e-13, 1e-12);
native_scalar!(f32, 1e-6, 1e-5);

/// Double-double number `hi + lo` with `|lo| <= ulp(hi)/2`, about 106 bits of
/// mantissa. Arithmetic uses the usual error-free transformations, with the
/// product error taken from a fused multiply-add.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        if hi.is_finite() {
            Self { hi, lo }
        } else {
            Self { hi, lo: 0.0 }
        }
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        Self::renorm(p, e + self.lo * b)
    }

    fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        Self::renorm(s, e + self.lo)
    }

    /// Decimal rendering with `digits` significant digits, good to about 31.
    pub fn to_sci_string(self, digits: usize) -> String {
        if !self.hi.is_finite() || self.hi == 0.0 {
            return format!("{:e}", self.hi);
        }
        let mut x = self.abs();
        let mut exp = x.hi.abs().log10().floor() as i32;
        x = x / Dd::from(10.0).powi(exp);
        while x >= Dd::from(10.0) {
            x = x / Dd::from(10.0);
            exp += 1;
        }
        while x < Dd::from(1.0) {
            x = x * Dd::from(10.0);
            exp -= 1;
        }
        let mut ds = Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let d = x.hi.floor().clamp(0.0, 9.0);
            ds.push(d as u8);
            x = (x - Dd::from(d)) * Dd::from(10.0);
        }
        // Round on the extra digit.
        if ds[digits] >= 5 {
            let mut i = digits;
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    exp += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        ds.truncate(digits);
        let mut s = String::new();
        if self.hi < 0.0 {
            s.push('-');
        }
        s.push((b'0' + ds[0]) as char);
        if digits > 1 {
            s.push('.');
            s.extend(ds[1..].iter().map(|d| (b'0' + d) as char));
        }
        format!("{s}e{exp}")
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl Neg for Dd {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Dd {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        Self::renorm(s1, s2 + t2)
    }
}

impl Sub for Dd {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        Self::renorm(p, e + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Div for Dd {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() || q1 == 0.0 && self.hi == 0.0 {
            return Self::from(q1);
        }
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        Self::renorm(q1, q2).add_f64(q3)
    }
}

impl Rem for Dd {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        let q = self / b;
        let t = if q.hi.fract() == 0.0 { Self::renorm(q.hi, q.lo.trunc()) } else { Self::from(q.hi.trunc()) };
        self - t * b
    }
}

impl Zero for Dd {
    fn zero() -> Self {
        Self::from(0.0)
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

impl One for Dd {
    fn one() -> Self {
        Self::from(1.0)
    }
}

impl Num for Dd {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        if radix != 10 {
            // Only decimal input is supported; force the standard parse error.
            return "".parse::<f64>().map(Self::from);
        }
        s.parse::<f64>().map(Self::from)
    }
}

impl FromPrimitive for Dd {
    fn from_i64(n: i64) -> Option<Self> {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        Some(Self::renorm(hi, lo))
    }
    fn from_u64(n: u64) -> Option<Self> {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        Some(Self::renorm(hi, lo))
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(Self::from(x))
    }
}

impl ToPrimitive for Dd {
    fn to_i64(&self) -> Option<i64> {
        (self.hi.trunc() as i128 + self.lo.trunc() as i128).try_into().ok()
    }
    fn to_u64(&self) -> Option<u64> {
        (self.hi.trunc() as i128 + self.lo.trunc() as i128).try_into().ok()
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.hi + self.lo)
    }
}

impl Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(&self.hi, f)
    }
}

impl LowerExp for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) if p > 16 => f.write_str(&self.to_sci_string(p + 1)),
            _ => LowerExp::fmt(&self.hi, f),
        }
    }
}

impl Scalar for Dd {
    fn pivot_tol() -> Self {
        Dd::from(1e-28)
    }
    fn newton_tol() -> Self {
        Dd::from(1e-28)
    }
    fn unit_roundoff() -> Self {
        Dd::from(2f64.powi(-104))
    }
    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from(self.hi.sqrt());
        }
        let x = self.hi.sqrt();
        let (sq, e) = two_prod(x, x);
        let r = (self - Self::renorm(sq, e)).hi;
        Self::renorm(x, r / (2.0 * x))
    }
    fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }
    fn is_nan(self) -> bool {
        self.hi.is_nan() || self.lo.is_nan()
    }
}
