//! Double-double scalar.
//!
//! Thin wrapper over [`twofloat::TwoFloat`]. Its double-double division
//! forms `1 - b.hi * (1 / b.hi)` without a fused multiply-add, which rounds
//! to zero and leaves quotients accurate only to double precision. Division
//! here uses long division on the high word, three partial quotients.

use std::cmp::Ordering;
use std::fmt;
use std::num::FpCategory;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_traits::{Float, FloatConst, Num, NumCast, One, ToPrimitive, Zero};
use twofloat::TwoFloat;

#[derive(Clone, Copy, Default, PartialEq, PartialOrd)]
pub struct Dd(TwoFloat);

impl Dd {
    pub fn hi(self) -> f64 {
        self.0.hi()
    }

    pub fn lo(self) -> f64 {
        self.0.lo()
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.0.hi(), self.0.lo())
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl From<f64> for Dd {
    fn from(v: f64) -> Self {
        Dd(<TwoFloat as From<f64>>::from(v))
    }
}

impl From<Dd> for f64 {
    fn from(v: Dd) -> f64 {
        <f64 as From<TwoFloat>>::from(v.0)
    }
}

fn divide(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let bh = b.hi();
    let q1 = a.hi() / bh;
    if !q1.is_finite() || q1 == 0.0 {
        return <TwoFloat as From<f64>>::from(q1);
    }
    let r = a - b * q1;
    let q2 = r.hi() / bh;
    let r = r - b * q2;
    let q3 = r.hi() / bh;
    TwoFloat::new_add(q1, q2) + q3
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        Dd(self.0 + rhs.0)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        Dd(self.0 - rhs.0)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        Dd(self.0 * rhs.0)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        Dd(divide(self.0, rhs.0))
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, rhs: Dd) -> Dd {
        let q = (self / rhs).trunc();
        self - q * rhs
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd(-self.0)
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, rhs: Dd) {
        *self = *self + rhs;
    }
}

impl SubAssign for Dd {
    fn sub_assign(&mut self, rhs: Dd) {
        *self = *self - rhs;
    }
}

impl MulAssign for Dd {
    fn mul_assign(&mut self, rhs: Dd) {
        *self = *self * rhs;
    }
}

impl DivAssign for Dd {
    fn div_assign(&mut self, rhs: Dd) {
        *self = *self / rhs;
    }
}

impl std::iter::Sum for Dd {
    fn sum<I: Iterator<Item = Dd>>(iter: I) -> Dd {
        iter.fold(Dd::zero(), |a, b| a + b)
    }
}

impl Zero for Dd {
    fn zero() -> Self {
        Dd(<TwoFloat as From<f64>>::from(0.0))
    }
    fn is_zero(&self) -> bool {
        self.0.hi() == 0.0
    }
}

impl One for Dd {
    fn one() -> Self {
        Dd(<TwoFloat as From<f64>>::from(1.0))
    }
}

impl Num for Dd {
    type FromStrRadixErr = <TwoFloat as Num>::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        TwoFloat::from_str_radix(s, radix).map(Dd)
    }
}

impl ToPrimitive for Dd {
    fn to_i64(&self) -> Option<i64> {
        self.0.to_i64()
    }
    fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
    fn to_f64(&self) -> Option<f64> {
        Some(<f64 as From<TwoFloat>>::from(self.0))
    }
}

impl NumCast for Dd {
    fn from<T: ToPrimitive>(n: T) -> Option<Self> {
        <TwoFloat as NumCast>::from(n).map(Dd)
    }
}

impl FloatConst for Dd {
    fn E() -> Self {
        Dd(TwoFloat::E())
    }
    fn FRAC_1_PI() -> Self {
        Dd(TwoFloat::FRAC_1_PI())
    }
    fn FRAC_1_SQRT_2() -> Self {
        Dd(TwoFloat::FRAC_1_SQRT_2())
    }
    fn FRAC_2_PI() -> Self {
        Dd(TwoFloat::FRAC_2_PI())
    }
    fn FRAC_2_SQRT_PI() -> Self {
        Dd(TwoFloat::FRAC_2_SQRT_PI())
    }
    fn FRAC_PI_2() -> Self {
        Dd(TwoFloat::FRAC_PI_2())
    }
    fn FRAC_PI_3() -> Self {
        Dd(TwoFloat::FRAC_PI_3())
    }
    fn FRAC_PI_4() -> Self {
        Dd(TwoFloat::FRAC_PI_4())
    }
    fn FRAC_PI_6() -> Self {
        Dd(TwoFloat::FRAC_PI_6())
    }
    fn FRAC_PI_8() -> Self {
        Dd(TwoFloat::FRAC_PI_8())
    }
    fn LN_10() -> Self {
        Dd(TwoFloat::LN_10())
    }
    fn LN_2() -> Self {
        Dd(TwoFloat::LN_2())
    }
    fn LOG10_E() -> Self {
        Dd(TwoFloat::LOG10_E())
    }
    fn LOG2_E() -> Self {
        Dd(TwoFloat::LOG2_E())
    }
    fn PI() -> Self {
        Dd(TwoFloat::PI())
    }
    fn SQRT_2() -> Self {
        Dd(TwoFloat::SQRT_2())
    }
}

macro_rules! unary {
    ($($name:ident),*) => {
        $(fn $name(self) -> Self { Dd(Float::$name(self.0)) })*
    };
}

macro_rules! predicate {
    ($($name:ident),*) => {
        $(fn $name(self) -> bool { Float::$name(self.0) })*
    };
}

macro_rules! constant {
    ($($name:ident),*) => {
        $(fn $name() -> Self { Dd(<TwoFloat as Float>::$name()) })*
    };
}

impl Float for Dd {
    constant!(nan, infinity, neg_infinity, neg_zero, min_value, min_positive_value, max_value, epsilon);
    predicate!(is_nan, is_infinite, is_finite, is_normal, is_sign_positive, is_sign_negative);
    unary!(floor, ceil, round, trunc, fract, abs, signum, sqrt, exp, exp2, ln, log2, log10, cbrt);
    unary!(sin, cos, tan, asin, acos, atan, exp_m1, ln_1p, sinh, cosh, tanh, asinh, acosh, atanh);

    fn classify(self) -> FpCategory {
        self.0.classify()
    }

    fn mul_add(self, a: Self, b: Self) -> Self {
        self * a + b
    }

    fn recip(self) -> Self {
        Dd::one() / self
    }

    fn powi(self, n: i32) -> Self {
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Dd::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }

    fn powf(self, n: Self) -> Self {
        (n * self.ln()).exp()
    }

    fn log(self, base: Self) -> Self {
        self.ln() / base.ln()
    }

    fn max(self, other: Self) -> Self {
        if self >= other || other.is_nan() {
            self
        } else {
            other
        }
    }

    fn min(self, other: Self) -> Self {
        if self <= other || other.is_nan() {
            self
        } else {
            other
        }
    }

    fn abs_sub(self, other: Self) -> Self {
        if self > other {
            self - other
        } else {
            Dd::zero()
        }
    }

    fn hypot(self, other: Self) -> Self {
        (self * self + other * other).sqrt()
    }

    fn atan2(self, other: Self) -> Self {
        Dd(self.0.atan2(other.0))
    }

    fn sin_cos(self) -> (Self, Self) {
        (self.sin(), self.cos())
    }

    fn integer_decode(self) -> (u64, i16, i8) {
        Float::integer_decode(self.0)
    }
}

impl Dd {
    /// Total order on the high word, then the low word.
    pub fn total_cmp(&self, other: &Dd) -> Ordering {
        self.0.hi().total_cmp(&other.0.hi()).then(self.0.lo().total_cmp(&other.0.lo()))
    }
}
