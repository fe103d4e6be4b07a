//! Cubic (uncolored) counterparts: enumeration with the color rule dropped,
//! and their closed forms in Catalan numbers.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;

use crate::arch::{binomial, CatalanTable};
use crate::ensemble::{spec_for, EnsembleId, EnsembleSpec, EnsembleTag};
use crate::error::{Error, Result};
use crate::updown::ud_enumerate;

/// Exact count of a cubic family by up-down factorization.
pub fn cubic_enumerate(spec: &EnsembleSpec, n: usize) -> Result<BigUint> {
    if spec.id.colored {
        return Err(Error::UnsupportedEnsemble { engine: "cubic enumeration", ensemble: spec.id });
    }
    ud_enumerate(spec, n)
}

pub fn cubic_count(tag: EnsembleTag, n: usize) -> Result<BigUint> {
    cubic_enumerate(&spec_for(EnsembleId::cubic(tag)), n)
}

fn exact_div(num: BigUint, den: u64) -> BigUint {
    let (q, r) = num.div_rem(&BigUint::from(den));
    assert!(r.is_zero(), "closed form left a remainder");
    q
}

/// Closed form of a cubic family at size `n`.
pub fn cubic_closed_form(tag: EnsembleTag, n: usize) -> Result<BigUint> {
    cubic_closed_form_with(&mut CatalanTable::new(), tag, n)
}

/// [`cubic_closed_form`] reusing a Catalan table across calls.
pub fn cubic_closed_form_with(cat: &mut CatalanTable, tag: EnsembleTag, n: usize) -> Result<BigUint> {
    // the Z formula also holds at N = 0; the others start with the family
    let min = match tag {
        EnsembleTag::Z => 0,
        _ => spec_for(EnsembleId::cubic(tag)).min_n(),
    };
    if n < min {
        return Err(Error::SizeBelowMinimum { ensemble: EnsembleId::cubic(tag), n, min });
    }
    let four_n = BigUint::from(4u8).pow(n as u32);
    let m = n as u64;
    Ok(match tag {
        EnsembleTag::Z => cat.get(n).clone() * cat.get(n + 1),
        EnsembleTag::Y => four_n * cat.get(n + 2),
        EnsembleTag::X => four_n * cat.get(n),
        EnsembleTag::W => BigUint::from(2 * m - 1) * cat.get(n - 1) * cat.get(n),
        EnsembleTag::V => exact_div(BigUint::from(m - 1) * cat.get(n) * cat.get(n + 1), 2),
        EnsembleTag::U => exact_div(BigUint::from((2 * m - 1) * (2 * m - 2)) * cat.get(n - 1) * cat.get(n), 4),
    })
}

/// `sum_k binom(2n, 2k) Cat_k Cat_{n-k}`, which equals the closed form of
/// the cubic Z family.
pub fn cubic_binomial_sum(n: usize) -> BigUint {
    let mut cat = CatalanTable::new();
    (0..=n).map(|k| binomial(2 * n as u64, 2 * k as u64) * cat.get(k).clone() * cat.get(n - k)).sum()
}
