//! Arbitrary-precision reals for sequence acceleration.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Default working precision in decimal digits.
pub const DEFAULT_DIGITS: usize = 64;

const RM: RoundingMode = RoundingMode::ToEven;
const GUARD_BITS: usize = 32;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Mantissa bits needed for `digits` decimal digits plus guard bits.
pub fn bits_for_digits(digits: usize) -> usize {
    ((digits as f64) * std::f64::consts::LOG2_10).ceil() as usize + GUARD_BITS
}

/// A binary floating-point number carrying its working precision.
#[derive(Clone, Debug)]
pub struct Real {
    value: BigFloat,
    bits: usize,
}

impl Real {
    pub fn with_bits(value: BigFloat, bits: usize) -> Self {
        Real { value, bits }
    }

    pub fn from_u64(x: u64, digits: usize) -> Self {
        let bits = bits_for_digits(digits);
        Real { value: BigFloat::from_u64(x, bits), bits }
    }

    pub fn from_i64(x: i64, digits: usize) -> Self {
        let r = Real::from_u64(x.unsigned_abs(), digits);
        if x < 0 {
            -r
        } else {
            r
        }
    }

    pub fn from_f64(x: f64, digits: usize) -> Self {
        let bits = bits_for_digits(digits);
        Real { value: BigFloat::from_f64(x, bits), bits }
    }

    /// Exact for integers that fit the mantissa, correctly rounded otherwise.
    pub fn from_biguint(x: &BigUint, digits: usize) -> Self {
        let bits = bits_for_digits(digits).max(x.bits() as usize + GUARD_BITS);
        let value = with_consts(|cc| BigFloat::parse(&x.to_string(), Radix::Dec, bits, RM, cc));
        Real { value, bits: bits_for_digits(digits) }.rounded()
    }

    pub fn parse(s: &str, digits: usize) -> Result<Self> {
        let bits = bits_for_digits(digits);
        let value = with_consts(|cc| BigFloat::parse(s.trim(), Radix::Dec, bits, RM, cc));
        if value.is_nan() {
            return Err(Error::Parse(format!("not a decimal number: {s:?}")));
        }
        Ok(Real { value, bits })
    }

    pub fn ratio(num: i64, den: i64, digits: usize) -> Self {
        Real::from_i64(num, digits) / Real::from_i64(den, digits)
    }

    pub fn pi(digits: usize) -> Self {
        let bits = bits_for_digits(digits);
        Real { value: with_consts(|cc| cc.pi(bits, RM)), bits }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn digits(&self) -> usize {
        (((self.bits - GUARD_BITS) as f64) / std::f64::consts::LOG2_10).floor() as usize
    }

    pub fn value(&self) -> &BigFloat {
        &self.value
    }

    fn rounded(mut self) -> Self {
        self.value = self.value.add(&BigFloat::from_u64(0, self.bits), self.bits, RM);
        self
    }

    fn unary(&self, f: impl FnOnce(&BigFloat, usize, &mut Consts) -> BigFloat) -> Self {
        let value = with_consts(|cc| f(&self.value, self.bits, cc));
        Real { value, bits: self.bits }
    }

    fn check(self, what: &str) -> Result<Self> {
        if self.value.is_nan() || self.value.is_inf() {
            Err(Error::Domain(format!("{what} is undefined here")))
        } else {
            Ok(self)
        }
    }

    pub fn ln(&self) -> Result<Self> {
        if !self.is_positive() {
            return Err(Error::Domain("logarithm of a non-positive number".into()));
        }
        self.unary(|v, p, cc| v.ln(p, RM, cc)).check("logarithm")
    }

    pub fn log10(&self) -> Result<Self> {
        Ok(self.ln()? / Real::from_u64(10, self.digits()).ln()?)
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.is_negative() {
            return Err(Error::Domain("square root of a negative number".into()));
        }
        self.unary(|v, p, _| v.sqrt(p, RM)).check("square root")
    }

    pub fn acos(&self) -> Result<Self> {
        if self.abs() > Real::from_u64(1, self.digits()) {
            return Err(Error::Domain("arccosine outside [-1, 1]".into()));
        }
        self.unary(|v, p, cc| v.acos(p, RM, cc)).check("arccosine")
    }

    pub fn cos(&self) -> Self {
        self.unary(|v, p, cc| v.cos(p, RM, cc))
    }

    pub fn powi(&self, n: usize) -> Self {
        self.unary(|v, p, _| v.powi(n, p, RM))
    }

    pub fn abs(&self) -> Self {
        self.unary(|v, _, _| v.abs())
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        !self.is_zero() && self.value.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        !self.is_zero() && self.value.is_negative()
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        self.to_scientific(20).parse().unwrap_or(f64::NAN)
    }

    /// Decimal scientific notation with `sig` significant digits, correctly
    /// rounded from the binary value.
    pub fn to_scientific(&self, sig: usize) -> String {
        let (neg, digits, exp) = self.decimal_parts();
        if digits.is_empty() {
            return "0".into();
        }
        let (mantissa, exp) = round_digits(&digits, exp, sig.max(1));
        let sign = if neg { "-" } else { "" };
        let (head, tail) = mantissa.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        }
    }

    /// Plain decimal notation rounded to `sig` significant digits.
    pub fn to_decimal(&self, sig: usize) -> String {
        let (neg, digits, exp) = self.decimal_parts();
        if digits.is_empty() {
            return "0".into();
        }
        let (mantissa, exp) = round_digits(&digits, exp, sig.max(1));
        let sign = if neg { "-" } else { "" };
        let body = if exp < 0 {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), mantissa)
        } else {
            let int_len = exp as usize + 1;
            if mantissa.len() <= int_len {
                format!("{}{}", mantissa, "0".repeat(int_len - mantissa.len()))
            } else {
                format!("{}.{}", &mantissa[..int_len], &mantissa[int_len..])
            }
        };
        format!("{sign}{body}")
    }

    /// Sign, significant decimal digits (leading digit nonzero) and the
    /// decimal exponent of the leading digit.
    fn decimal_parts(&self) -> (bool, String, i64) {
        if self.is_zero() {
            return (false, String::new(), 0);
        }
        let s = with_consts(|cc| self.value.format(Radix::Dec, RM, cc)).unwrap_or_default();
        let (neg, s) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.as_str()),
        };
        let (mant, exp) = s.split_once(['e', 'E']).unwrap_or((s, "0"));
        let exp: i64 = exp.parse().unwrap_or(0);
        let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
        let all: String = format!("{int}{frac}");
        let lead = all.bytes().take_while(|&b| b == b'0').count();
        let digits = all[lead..].trim_end_matches('0').to_string();
        let exp = exp + int.len() as i64 - 1 - lead as i64;
        (neg, digits, exp)
    }
}

fn round_digits(digits: &str, exp: i64, sig: usize) -> (String, i64) {
    if digits.len() <= sig {
        return (digits.to_string(), exp);
    }
    let mut kept: Vec<u8> = digits.as_bytes()[..sig].iter().map(|b| b - b'0').collect();
    let rest = &digits.as_bytes()[sig..];
    let round_up = match rest[0].cmp(&b'5') {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => rest[1..].iter().any(|&b| b != b'0') || kept[sig - 1] % 2 == 1,
    };
    let mut exp = exp;
    if round_up {
        let mut i = sig;
        loop {
            if i == 0 {
                kept.insert(0, 1);
                kept.pop();
                exp += 1;
                break;
            }
            i -= 1;
            if kept[i] == 9 {
                kept[i] = 0;
            } else {
                kept[i] += 1;
                break;
            }
        }
    }
    let s: String = kept.iter().map(|d| (d + b'0') as char).collect();
    (s.trim_end_matches('0').to_string(), exp)
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = f.precision().unwrap_or(self.digits());
        write!(f, "{}", self.to_decimal(sig))
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { value: BigFloat::neg(&self.value), bits: self.bits }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { value: BigFloat::neg(&self.value), bits: self.bits }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let bits = self.bits.max(rhs.bits);
                Real { value: self.value.$method(&rhs.value, bits, RM), bits }
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);
