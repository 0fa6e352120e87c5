//! Exact rational numbers.
//!
//! Values whose numerator and denominator fit in an `i64` are kept inline and
//! combined through `i128` intermediates; anything larger spills into
//! `BigInt`. Results are always normalized (reduced, positive denominator) and
//! demoted back to the inline form when they fit, so equality and hashing are
//! structural.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};
use core::iter::{Product, Sum};
use core::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact rational number.
#[derive(Clone)]
pub struct Rational(Repr);

#[derive(Clone)]
enum Repr {
    // den > 0, gcd(|num|, den) == 1, num != i64::MIN
    Small { num: i64, den: i64 },
    // same normalization, and the value does not fit `Small`
    Big(Box<BigPair>),
}

#[derive(Clone)]
struct BigPair {
    num: BigInt,
    den: BigInt,
}

fn big(num: BigInt, den: BigInt) -> Repr {
    Repr::Big(Box::new(BigPair { num, den }))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

fn fits_small(v: i128) -> bool {
    v > i64::MIN as i128 && v <= i64::MAX as i128
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small { num: 0, den: 1 })
    }

    pub fn one() -> Self {
        Rational(Repr::Small { num: 1, den: 1 })
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_i128(n as i128, 1)
    }

    /// Builds `num / den`. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        Self::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        if num == 0 {
            return Self::zero();
        }
        // i128::MIN cannot be negated; those values only arise from operands
        // outside the inline range, so hand them to the big path.
        if num == i128::MIN || den == i128::MIN {
            return Self::from_big(BigInt::from(num), BigInt::from(den));
        }
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = if den == 1 {
            1
        } else {
            gcd_u128(num.unsigned_abs(), den.unsigned_abs()) as i128
        };
        if g > 1 {
            num /= g;
            den /= g;
        }
        if fits_small(num) && fits_small(den) {
            Rational(Repr::Small {
                num: num as i64,
                den: den as i64,
            })
        } else {
            Rational(big(BigInt::from(num), BigInt::from(den)))
        }
    }

    /// Builds `num / den` from big integers. Panics if `den` is zero.
    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let (mut num, mut den) = if den.is_negative() {
            (-num, -den)
        } else {
            (num, den)
        };
        let g = num.gcd(&den);
        if !g.is_one() {
            num /= &g;
            den /= &g;
        }
        match (num.to_i64(), den.to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN => Rational(Repr::Small { num: n, den: d }),
            _ => Rational(big(num, den)),
        }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_big(n, BigInt::one())
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small { num, .. } => BigInt::from(*num),
            Repr::Big(b) => b.num.clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small { den, .. } => BigInt::from(*den),
            Repr::Big(b) => b.den.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { num: 0, .. })
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small { num: 1, den: 1 })
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small { den, .. } => *den == 1,
            Repr::Big(b) => b.den.is_one(),
        }
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small { num, .. } => num.signum() as i32,
            Repr::Big(b) => match b.num.sign() {
                Sign::Minus => -1,
                Sign::NoSign => 0,
                Sign::Plus => 1,
            },
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Self {
        match &self.0 {
            Repr::Small { num, den } => Self::from_i128(*den as i128, *num as i128),
            Repr::Big(b) => Self::from_big(b.den.clone(), b.num.clone()),
        }
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> BigInt {
        let (n, d) = (self.numer(), self.denom());
        n.div_floor(&d)
    }

    /// Nearest integer, halves rounded up.
    pub fn round_half_up(&self) -> BigInt {
        (self + &Rational::new(1, 2)).floor()
    }

    /// Approximate value, for display and tolerance checks against
    /// floating-point tools only.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small { num, den } => *num as f64 / *den as f64,
            Repr::Big(b) => {
                let (num, den) = (&b.num, &b.den);
                // scale down so both parts stay in f64 range
                let shift = num.bits().max(den.bits()).saturating_sub(1000);
                let n = (num >> shift).to_f64().unwrap_or(f64::NAN);
                let d = (den >> shift).to_f64().unwrap_or(f64::NAN);
                n / d
            }
        }
    }

    /// Finite decimal expansion if the denominator has no prime factors
    /// other than 2 and 5, e.g. `3/8` gives `"0.375"`.
    pub fn to_exact_decimal(&self) -> Option<String> {
        let num = self.numer();
        let mut den = self.denom();
        let (two, five, ten) = (BigInt::from(2), BigInt::from(5), BigInt::from(10));
        let (mut twos, mut fives) = (0u32, 0u32);
        while den.is_even() {
            den /= &two;
            twos += 1;
        }
        while (&den % &five).is_zero() {
            den /= &five;
            fives += 1;
        }
        if !den.is_one() {
            return None;
        }
        let digits = twos.max(fives);
        if digits == 0 {
            return Some(num.to_string());
        }
        let scaled = (&num * num_traits::pow(ten.clone(), digits as usize)) / self.denom();
        let negative = scaled.is_negative();
        let mut body = scaled.abs().to_string();
        while body.len() <= digits as usize {
            body.insert(0, '0');
        }
        let split = body.len() - digits as usize;
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        out.push_str(&body[..split]);
        out.push('.');
        out.push_str(&body[split..]);
        Some(out)
    }

    fn big_parts(&self) -> (BigInt, BigInt) {
        (self.numer(), self.denom())
    }

    /// `self - a * b`, the inner update of Gaussian elimination and of the
    /// simplex pivot.
    pub fn sub_mul(&self, a: &Rational, b: &Rational) -> Rational {
        if a.is_zero() || b.is_zero() {
            return self.clone();
        }
        self - &(a * b)
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x.num == y.num && x.den == y.den,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small { num, den } => {
                0u8.hash(state);
                num.hash(state);
                den.hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.num.hash(state);
                b.den.hash(state);
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => {
                let (a, b) = self.big_parts();
                let (c, d) = other.big_parts();
                (a * d).cmp(&(c * b))
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { num, den: 1 } => write!(f, "{num}"),
            Repr::Small { num, den } => write!(f, "{num}/{den}"),
            Repr::Big(b) if b.den.is_one() => write!(f, "{}", b.num),
            Repr::Big(b) => write!(f, "{}/{}", b.num, b.den),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts integers (`"3"`, `"-2"`), decimals (`"0.25"`) and fractions
    /// (`"3/2"`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        let invalid = || ParseRationalError::Invalid(s.to_string());
        if let Some((n, d)) = s.split_once('/') {
            let n = parse_int(n.trim()).ok_or_else(invalid)?;
            let d = parse_int(d.trim()).ok_or_else(invalid)?;
            if d.is_zero() {
                return Err(ParseRationalError::ZeroDenominator(s.to_string()));
            }
            return Ok(Rational::from_big(n, d));
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let negative = int_part.starts_with('-');
            let int_digits = int_part.trim_start_matches(['-', '+']);
            if (int_digits.is_empty() && frac_part.is_empty())
                || !int_digits.bytes().all(|b| b.is_ascii_digit())
                || !frac_part.bytes().all(|b| b.is_ascii_digit())
                || int_part.len() > int_digits.len() + 1
            {
                return Err(invalid());
            }
            let mut digits = String::from(int_digits);
            digits.push_str(frac_part);
            let n = parse_int(&digits).ok_or_else(invalid)?;
            let d = num_traits::pow(BigInt::from(10), frac_part.len());
            let n = if negative { -n } else { n };
            return Ok(Rational::from_big(n, d));
        }
        parse_int(s).map(Rational::from_bigint).ok_or_else(invalid)
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::parse_bytes(s.as_bytes(), 10)
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_bigint(n)
    }
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    match (u64::try_from(a), u64::try_from(b)) {
        (Ok(a), Ok(b)) => a.gcd(&b) as u128,
        _ => a.gcd(&b),
    }
}

/// Integer result without normalization work.
fn small_int(v: i128) -> Rational {
    if fits_small(v) {
        Rational(Repr::Small { num: v as i64, den: 1 })
    } else {
        Rational::from_i128(v, 1)
    }
}

fn add_ref(a: &Rational, b: &Rational) -> Rational {
    match (&a.0, &b.0) {
        (Repr::Small { num: an, den: 1 }, Repr::Small { num: bn, den: 1 }) => {
            small_int(*an as i128 + *bn as i128)
        }
        (Repr::Small { num: an, den: ad }, Repr::Small { num: bn, den: bd }) => {
            if ad == bd {
                Rational::from_i128(*an as i128 + *bn as i128, *ad as i128)
            } else {
                Rational::from_i128(
                    *an as i128 * *bd as i128 + *bn as i128 * *ad as i128,
                    *ad as i128 * *bd as i128,
                )
            }
        }
        _ => {
            let (an, ad) = a.big_parts();
            let (bn, bd) = b.big_parts();
            Rational::from_big(&an * &bd + &bn * &ad, ad * bd)
        }
    }
}

fn mul_ref(a: &Rational, b: &Rational) -> Rational {
    match (&a.0, &b.0) {
        (Repr::Small { num: an, den: 1 }, Repr::Small { num: bn, den: 1 }) => {
            small_int(*an as i128 * *bn as i128)
        }
        (Repr::Small { num: an, den: ad }, Repr::Small { num: bn, den: bd }) => {
            // Cancelling across first leaves a reduced product.
            let g1 = (an.unsigned_abs()).gcd(&(*bd as u64)).max(1) as i128;
            let g2 = (bn.unsigned_abs()).gcd(&(*ad as u64)).max(1) as i128;
            let num = (*an as i128 / g1) * (*bn as i128 / g2);
            let den = (*ad as i128 / g2) * (*bd as i128 / g1);
            if num == 0 {
                Rational::zero()
            } else if fits_small(num) && fits_small(den) {
                Rational(Repr::Small { num: num as i64, den: den as i64 })
            } else {
                Rational::from_i128(num, den)
            }
        }
        _ => {
            let (an, ad) = a.big_parts();
            let (bn, bd) = b.big_parts();
            Rational::from_big(an * bn, ad * bd)
        }
    }
}

fn neg_ref(a: &Rational) -> Rational {
    match &a.0 {
        Repr::Small { num, den } => Rational(Repr::Small {
            num: -num,
            den: *den,
        }),
        Repr::Big(b) => Rational::from_big(-b.num.clone(), b.den.clone()),
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident, $f:expr) => {
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                $f(self, rhs)
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $f(&self, &rhs)
            }
        }
        impl<'b> $trait<&'b Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                $f(&self, rhs)
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $f(self, &rhs)
            }
        }
        impl $assign_trait<Rational> for Rational {
            fn $assign_method(&mut self, rhs: Rational) {
                *self = $f(&*self, &rhs);
            }
        }
        impl<'b> $assign_trait<&'b Rational> for Rational {
            fn $assign_method(&mut self, rhs: &'b Rational) {
                *self = $f(&*self, rhs);
            }
        }
    };
}

forward_binop!(Add, add, AddAssign, add_assign, add_ref);
forward_binop!(Mul, mul, MulAssign, mul_assign, mul_ref);
forward_binop!(Sub, sub, SubAssign, sub_assign, |a: &Rational, b: &Rational| {
    add_ref(a, &neg_ref(b))
});
forward_binop!(Div, div, DivAssign, div_assign, |a: &Rational, b: &Rational| {
    assert!(!b.is_zero(), "division by zero");
    mul_ref(a, &b.recip())
});

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg_ref(&self)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg_ref(self)
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational::one()
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}

/// Least common multiple of the denominators, used to scale a row of
/// rationals to integers.
pub fn common_denominator<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(&v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parses_integers_decimals_and_fractions() {
        assert_eq!(r("3"), Rational::from_integer(3));
        assert_eq!(r("-0.25"), Rational::new(-1, 4));
        assert_eq!(r("6/4"), Rational::new(3, 2));
        assert_eq!(r(".5"), Rational::new(1, 2));
        assert_eq!(r("2."), Rational::from_integer(2));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
        assert!("1.2.3".parse::<Rational>().is_err());
        assert!("--1".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
    }

    #[test]
    fn spills_to_big_and_back() {
        let big = Rational::from_integer(i64::MAX) * Rational::from_integer(i64::MAX);
        assert!(matches!(big.0, Repr::Big(_)));
        let back = &big / &Rational::from_integer(i64::MAX);
        assert_eq!(back, Rational::from_integer(i64::MAX));
        assert!(matches!(back.0, Repr::Small { .. }));
        let min = Rational::from_integer(i64::MIN + 1) - Rational::one();
        assert_eq!(min.numer(), BigInt::from(i64::MIN));
        assert_eq!(-(-min.clone()), min);
    }

    #[test]
    fn exact_decimals() {
        assert_eq!(r("3/8").to_exact_decimal().as_deref(), Some("0.375"));
        assert_eq!(r("-1/20").to_exact_decimal().as_deref(), Some("-0.05"));
        assert_eq!(r("7").to_exact_decimal().as_deref(), Some("7"));
        assert_eq!(r("1/3").to_exact_decimal(), None);
    }

    #[test]
    fn rounding() {
        assert_eq!(r("5/2").round_half_up(), BigInt::from(3));
        assert_eq!(r("-5/2").round_half_up(), BigInt::from(-2));
        assert_eq!(r("1300/28").round_half_up(), BigInt::from(46));
        assert_eq!(common_denominator(&vec![r("1/4"), r("5/6")]), BigInt::from(12));
    }

    fn arb() -> impl Strategy<Value = Rational> {
        prop_oneof![
            (-50i64..50, 1i64..50).prop_map(|(n, d)| Rational::new(n, d)),
            (any::<i64>(), 1i64..i64::MAX).prop_map(|(n, d)| Rational::new(n, d)),
        ]
    }

    fn big_of(x: &Rational) -> (BigInt, BigInt) {
        (x.numer(), x.denom())
    }

    proptest! {
        #[test]
        fn field_laws(a in arb(), b in arb(), c in arb()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!(&(&a / &b) * &b, a.clone());
            }
        }

        #[test]
        fn agrees_with_bigint_cross_multiplication(a in arb(), b in arb()) {
            let (an, ad) = big_of(&a);
            let (bn, bd) = big_of(&b);
            prop_assert_eq!(a.cmp(&b), (&an * &bd).cmp(&(&bn * &ad)));
            let sum = &a + &b;
            prop_assert_eq!(sum.numer() * (&ad * &bd), (&an * &bd + &bn * &ad) * sum.denom());
        }

        #[test]
        fn display_parse_round_trip(a in arb()) {
            prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
        }
    }
}
