//! Growth-rate and exponent extraction from count sequences.
//!
//! Two observables are formed from `t_N`: the ratio `t_{N+1} / t_N`, which
//! tends to the squared growth rate, and the log-curvature
//! `N^2 ln(t_{N+2} t_N / t_{N+1}^2)`, which tends to the power-law exponent
//! when `t_N ~ mu^(2N) N^(-beta)`. Both converge like a series in `1/N`,
//! and are accelerated by iterated differences (Richardson) or by a
//! weighted Aitken delta-squared recursion.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;
use crate::sequence::CountSequence;

/// Exact or approximate arithmetic the accelerators run over.
pub trait Field: Clone + fmt::Debug + fmt::Display {
    /// The integer `x`, at the precision of `self`.
    fn integer(&self, x: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool;
}

impl Field for Real {
    fn integer(&self, x: i64) -> Self {
        Real::from_i64(x, self.digits())
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
    fn is_zero(&self) -> bool {
        Real::is_zero(self)
    }
}

impl Field for BigRational {
    fn integer(&self, x: i64) -> Self {
        BigRational::from_integer(BigInt::from(x))
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
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// Values `s_N` for consecutive `N` starting at `start_index`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealSeq<T = Real> {
    pub start_index: i64,
    pub values: Vec<T>,
}

impl<T: Field> RealSeq<T> {
    pub fn new(start_index: i64, values: Vec<T>) -> Self {
        RealSeq { start_index, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last(&self) -> Option<&T> {
        self.values.last()
    }

    pub fn get(&self, n: i64) -> Option<&T> {
        usize::try_from(n - self.start_index).ok().and_then(|i| self.values.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &T)> {
        self.values.iter().enumerate().map(move |(i, v)| (self.start_index + i as i64, v))
    }
}

impl RealSeq<Real> {
    /// Digits of working precision of the stored values.
    pub fn digits(&self) -> Option<usize> {
        self.values.first().map(Real::digits)
    }
}

fn check_nonzero(t: &CountSequence) -> Result<()> {
    for (n, c) in t.iter() {
        if c.is_zero() {
            return Err(Error::ZeroTerm { n: n as i64 });
        }
    }
    Ok(())
}

fn ratio_of(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

/// `t_{N+1} / t_N` as exact rationals.
pub fn ratio_seq_exact(t: &CountSequence) -> Result<RealSeq<BigRational>> {
    if t.len() < 2 {
        return Err(Error::TooFewTerms { got: t.len(), need: 2 });
    }
    check_nonzero(t)?;
    let c = t.counts();
    let values = c.windows(2).map(|w| ratio_of(&w[1], &w[0])).collect();
    Ok(RealSeq::new(t.start() as i64, values))
}

/// `t_{N+1} / t_N` at `digits` decimal digits.
pub fn ratio_seq(t: &CountSequence, digits: usize) -> Result<RealSeq> {
    if t.len() < 2 {
        return Err(Error::TooFewTerms { got: t.len(), need: 2 });
    }
    check_nonzero(t)?;
    let c = t.counts();
    let values = c.windows(2).map(|w| Real::from_biguint(&w[1], digits) / Real::from_biguint(&w[0], digits)).collect();
    Ok(RealSeq::new(t.start() as i64, values))
}

/// `N^2 ln(t_{N+2} t_N / t_{N+1}^2)` at `digits` decimal digits.
pub fn logcurv_seq(t: &CountSequence, digits: usize) -> Result<RealSeq> {
    if t.len() < 3 {
        return Err(Error::TooFewTerms { got: t.len(), need: 3 });
    }
    check_nonzero(t)?;
    let c = t.counts();
    let mut values = Vec::with_capacity(c.len() - 2);
    for (i, w) in c.windows(3).enumerate() {
        let n = (t.start() + i) as i64;
        let num = &w[2] * &w[0];
        let den = &w[1] * &w[1];
        // the argument is near one; form it exactly before rounding
        let arg = Real::from_biguint(&num, digits) / Real::from_biguint(&den, digits);
        let log = arg.ln().map_err(|_| Error::NonPositiveLog { n })?;
        values.push(Real::from_i64(n * n, digits) * log);
    }
    Ok(RealSeq::new(t.start() as i64, values))
}

fn binomial_row(k: usize) -> Vec<i64> {
    let mut row = vec![1i64];
    for j in 0..k {
        let next = row[j] * (k - j) as i64 / (j as i64 + 1);
        row.push(next);
    }
    row
}

/// `(1/k!) Delta^k (N^k s_N)`, indexed like `s`; annihilates tails
/// `c_1/N + ... + c_k/N^k`.
pub fn richardson<T: Field>(s: &RealSeq<T>, k: usize) -> Result<RealSeq<T>> {
    if k == 0 {
        return Ok(s.clone());
    }
    if s.len() < k + 1 {
        return Err(Error::OrderTooLarge { k, need: k + 1, got: s.len() });
    }
    let proto = &s.values[0];
    let scaled: Vec<T> = s
        .iter()
        .map(|(n, v)| {
            let mut p = proto.integer(1);
            for _ in 0..k {
                p = p.mul(&proto.integer(n));
            }
            p.mul(v)
        })
        .collect();
    let coeffs = binomial_row(k);
    let factorial = (1..=k as i64).product::<i64>();
    let inv_fact = proto.integer(1).div(&proto.integer(factorial));
    let values = (0..s.len() - k)
        .map(|i| {
            let mut acc = proto.integer(0);
            for (j, &c) in coeffs.iter().enumerate() {
                let sign = if (k - j).is_multiple_of(2) { c } else { -c };
                acc = acc.add(&scaled[i + j].mul(&proto.integer(sign)));
            }
            acc.mul(&inv_fact)
        })
        .collect();
    Ok(RealSeq::new(s.start_index, values))
}

/// An index removed by [`aitken`] because its second difference vanished.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedIndex {
    pub level: usize,
    pub n: i64,
}

/// Weighted Aitken recursion applied `k` times:
/// `s'_N = s_N - ((j+1)/j) (Delta s)_N (Delta s)_{N-1} / (Delta^2 s)_{N-1}`
/// at level `j`. Each level loses the first and last index. An index whose
/// second difference vanishes while the numerator does not is dropped, and
/// only the contiguous run after the last drop is kept.
pub fn aitken<T: Field>(s: &RealSeq<T>, k: usize) -> Result<(RealSeq<T>, Vec<DroppedIndex>)> {
    if s.len() < 2 * k + 1 {
        return Err(Error::OrderTooLarge { k, need: 2 * k + 1, got: s.len() });
    }
    let mut cur = s.clone();
    let mut dropped = Vec::new();
    for level in 1..=k {
        if cur.len() < 3 {
            cur = RealSeq::new(cur.start_index + 1, Vec::new());
            continue;
        }
        let proto = cur.values[0].clone();
        let weight = proto.integer(level as i64 + 1).div(&proto.integer(level as i64));
        let mut run_start = cur.start_index + 1;
        let mut run: Vec<T> = Vec::new();
        for i in 1..cur.len() - 1 {
            let n = cur.start_index + i as i64;
            let (prev, mid, next) = (&cur.values[i - 1], &cur.values[i], &cur.values[i + 1]);
            let fwd = next.sub(mid);
            let back = mid.sub(prev);
            let num = fwd.mul(&back);
            let den = fwd.sub(&back);
            let value = if num.is_zero() {
                mid.clone()
            } else if den.is_zero() {
                dropped.push(DroppedIndex { level, n });
                run.clear();
                run_start = n + 1;
                continue;
            } else {
                mid.sub(&weight.mul(&num).div(&den))
            };
            run.push(value);
        }
        cur = RealSeq::new(run_start, run);
    }
    Ok((cur, dropped))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantity {
    /// Limit of `t_{N+1} / t_N`.
    GrowthRateSquared,
    /// Power-law exponent from the log-curvature.
    Exponent,
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "growth" | "growthrate" | "growthratesquared" | "mu2" => Ok(Quantity::GrowthRateSquared),
            "exponent" | "beta" => Ok(Quantity::Exponent),
            other => Err(Error::Parse(format!("unknown quantity {other:?}"))),
        }
    }
}

/// Settings for [`estimate`].
#[derive(Clone, Copy, Debug)]
pub struct EstimateConfig {
    pub digits: usize,
    pub richardson_max: usize,
    pub aitken_max: usize,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig { digits: crate::real::DEFAULT_DIGITS, richardson_max: 7, aitken_max: 3 }
    }
}

/// One accelerated value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    /// `"base"`, `"richardson"` or `"aitken"`.
    pub family: String,
    pub k: usize,
    pub n: i64,
    pub value: String,
}

/// Every accelerated value computed for an estimate, plus dropped indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub rows: Vec<DiagnosticRow>,
    pub dropped: Vec<DroppedIndex>,
    pub combination_rule: String,
    pub richardson_order: usize,
    pub aitken_order: usize,
}

/// Headline value with a reproducible uncertainty heuristic.
#[derive(Clone, Debug)]
pub struct Estimate {
    pub quantity: Quantity,
    pub value: Real,
    pub uncertainty: Real,
    pub stable_digits: i64,
    pub diagnostics: Diagnostics,
}

const COMBINATION_RULE: &str = "value: last term of the deepest Richardson order K. \
spread: range of {R_K[last], R_K[last-1], R_(K-1)[last], A_deepest[last]}. \
uncertainty: spread rounded up at its leading digit. \
stable digits: decimal places of the value above that leading digit.";

/// Serializable form of an [`Estimate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub quantity: Quantity,
    pub value: String,
    pub uncertainty: String,
    pub stable_digits: i64,
    pub diagnostics: Diagnostics,
}

impl Estimate {
    pub fn value_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn uncertainty_f64(&self) -> f64 {
        self.uncertainty.to_f64()
    }

    /// The value rounded to its stable digits.
    pub fn display_value(&self) -> String {
        let sig = (self.stable_digits + 1).max(1) as usize;
        self.value.to_decimal(sig)
    }

    pub fn to_record(&self) -> EstimateRecord {
        let digits = self.value.digits();
        EstimateRecord {
            quantity: self.quantity,
            value: self.value.to_decimal(digits.min(40)),
            uncertainty: self.uncertainty.to_scientific(3),
            stable_digits: self.stable_digits,
            diagnostics: self.diagnostics.clone(),
        }
    }
}

/// `floor(log10 |x|)` for nonzero `x`.
fn decimal_exponent(x: &Real) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let s = x.abs().to_scientific(30);
    let exp = s.split_once('e').map(|(_, e)| e.parse::<i64>().unwrap_or(0)).unwrap_or(0);
    Some(exp)
}

/// Richardson and Aitken families of the observable for `quantity`, and a
/// single value with uncertainty read off their deepest terms.
pub fn estimate(t: &CountSequence, quantity: Quantity, config: EstimateConfig) -> Result<Estimate> {
    let digits = config.digits;
    let base = match quantity {
        Quantity::GrowthRateSquared => ratio_seq(t, digits)?,
        Quantity::Exponent => logcurv_seq(t, digits)?,
    };
    if base.len() < 2 {
        return Err(Error::TooFewTerms { got: t.len(), need: t.len() + 2 - base.len() });
    }
    // deepest order that still leaves two terms, when there are enough
    let r_order = config.richardson_max.min(base.len().saturating_sub(2)).max(1);
    let mut diagnostics = Diagnostics { combination_rule: COMBINATION_RULE.to_string(), ..Default::default() };
    let push_rows = |d: &mut Diagnostics, family: &str, k: usize, s: &RealSeq| {
        for (n, v) in s.iter() {
            d.rows.push(DiagnosticRow { family: family.into(), k, n, value: v.to_decimal(digits.min(40)) });
        }
    };
    push_rows(&mut diagnostics, "base", 0, &base);
    let mut families = vec![base.clone()];
    for k in 1..=r_order {
        let r = richardson(&base, k)?;
        push_rows(&mut diagnostics, "richardson", k, &r);
        families.push(r);
    }
    let mut aitken_last: Option<Real> = None;
    let mut a_order = 0;
    for k in 1..=config.aitken_max {
        if base.len() < 2 * k + 1 {
            break;
        }
        let (a, dropped) = aitken(&base, k)?;
        diagnostics.dropped = dropped;
        push_rows(&mut diagnostics, "aitken", k, &a);
        if let Some(v) = a.last() {
            aitken_last = Some(v.clone());
            a_order = k;
        }
    }
    diagnostics.richardson_order = r_order;
    diagnostics.aitken_order = a_order;

    let deepest = &families[r_order];
    let value = deepest.last().cloned().expect("deepest family is nonempty");
    let mut spread_set = vec![value.clone()];
    if deepest.len() >= 2 {
        spread_set.push(deepest.values[deepest.len() - 2].clone());
    }
    spread_set.push(families[r_order - 1].last().cloned().expect("nonempty"));
    if let Some(a) = aitken_last {
        spread_set.push(a);
    }
    let max = spread_set.iter().cloned().fold(spread_set[0].clone(), |m, x| if x > m { x } else { m });
    let min = spread_set.iter().cloned().fold(spread_set[0].clone(), |m, x| if x < m { x } else { m });
    let spread = &max - &min;

    let (uncertainty, stable_digits) = match decimal_exponent(&spread) {
        None => {
            let u = Real::from_u64(1, digits) / Real::from_u64(10, digits).powi(digits);
            (u, digits as i64)
        }
        Some(e) => {
            let unit = power_of_ten(e, digits);
            let lead = (&spread / &unit).to_f64().ceil().max(1.0) as u64;
            let u = Real::from_u64(lead, digits) * unit;
            let top = decimal_exponent(&value).unwrap_or(0);
            (u, top - e)
        }
    };
    Ok(Estimate { quantity, value, uncertainty, stable_digits, diagnostics })
}

fn power_of_ten(e: i64, digits: usize) -> Real {
    let ten = Real::from_u64(10, digits);
    if e >= 0 {
        ten.powi(e as usize)
    } else {
        Real::from_u64(1, digits) / ten.powi((-e) as usize)
    }
}

/// Exact-rational sequence `s_N = poly(1/N)` helper for tests and oracles.
pub fn rational_series(start: i64, len: usize, coeffs: &[BigRational]) -> RealSeq<BigRational> {
    let values = (0..len as i64)
        .map(|i| {
            let n = BigRational::from_integer(BigInt::from(start + i));
            let mut acc = BigRational::zero();
            let mut pow = BigRational::one();
            for c in coeffs {
                acc += c * &pow;
                pow /= &n;
            }
            acc
        })
        .collect();
    RealSeq::new(start, values)
}

/// Absolute value of the largest deviation from `target`.
pub fn max_deviation(s: &RealSeq<BigRational>, target: &BigRational) -> BigRational {
    s.values.iter().map(|v| (v - target).abs()).fold(BigRational::zero(), |m, d| if d > m { d } else { m })
}
