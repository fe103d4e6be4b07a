//! Coulomb-gas and KPZ exponent formulas for fully packed loops on random
//! bicubic maps, evaluated in arbitrary precision.
//!
//! The loop weight `n` fixes the coupling `g = 1 - arccos(n/2)/pi`. A
//! magnetic defect of charge `M = (phi1, phi2)` has flat-lattice dimension
//! `h_M`, optionally rescaled by a normalization `alpha` on its first
//! coordinate, and gravity dresses it into `Delta(h, c)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::Real;

fn int(x: i64, digits: usize) -> Real {
    Real::from_i64(x, digits)
}

fn frac(p: i64, q: i64, digits: usize) -> Real {
    Real::ratio(p, q, digits)
}

/// Square root that reads radicands within rounding noise of zero as zero.
fn root(x: &Real) -> Result<Real> {
    let d = x.digits();
    let noise = int(10, d).powi(d.saturating_sub(6).max(1));
    if x.is_negative() && (x * &noise).abs() < int(1, d) {
        return Ok(int(0, d));
    }
    x.sqrt()
}

/// Coupling data of the loop model at weight `n`.
#[derive(Clone, Debug)]
pub struct LoopModelParams {
    pub n: Real,
    pub g: Real,
    pub e0: Real,
    pub alpha: Real,
}

pub fn params_for(n: &Real, alpha: &Real) -> Result<LoopModelParams> {
    let d = n.digits();
    if n.is_negative() || *n > int(2, d) {
        return Err(Error::Domain(format!("loop weight {} outside [0, 2]", n.to_decimal(12))));
    }
    if !alpha.is_positive() {
        return Err(Error::Domain("alpha must be positive".into()));
    }
    let e0 = (n / &int(2, d)).acos()? / Real::pi(d);
    let g = int(1, d) - &e0;
    Ok(LoopModelParams { n: n.clone(), g, e0, alpha: alpha.clone() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Packing {
    Fully,
    Dense,
}

/// `2 - 6(1-g)^2/g` for fully packed loops, one less for dense loops.
pub fn central_charge(n: &Real, packing: Packing) -> Result<Real> {
    let d = n.digits();
    let p = params_for(n, &int(1, d))?;
    let one_minus_g = int(1, d) - &p.g;
    let loop_part = int(6, d) * one_minus_g.powi(2) / &p.g;
    Ok(match packing {
        Packing::Fully => int(2, d) - loop_part,
        Packing::Dense => int(1, d) - loop_part,
    })
}

fn check_c(c: &Real) -> Result<()> {
    if *c > int(1, c.digits()) {
        return Err(Error::Domain(format!("central charge {} exceeds 1", c.to_decimal(12))));
    }
    Ok(())
}

/// String susceptibility `(c - 1 - sqrt((1-c)(25-c)))/12`.
pub fn gamma_string(c: &Real) -> Result<Real> {
    check_c(c)?;
    let d = c.digits();
    let root = ((int(1, d) - c) * (int(25, d) - c)).sqrt()?;
    Ok((c - &int(1, d) - root) / int(12, d))
}

/// Liouville parameter `(sqrt(25-c) - sqrt(1-c))/sqrt(6)`.
pub fn gamma_liouville(c: &Real) -> Result<Real> {
    check_c(c)?;
    let d = c.digits();
    Ok(((int(25, d) - c).sqrt()? - (int(1, d) - c).sqrt()?) / int(6, d).sqrt()?)
}

/// Gravitationally dressed dimension of a flat dimension `h` at central
/// charge `c`.
pub fn delta_dressed(h: &Real, c: &Real) -> Result<Real> {
    check_c(c)?;
    let d = c.digits();
    let one_c = int(1, d) - c;
    let arg = &one_c + &(int(24, d) * h);
    let arg = root(&arg).map_err(|_| Error::Domain("1 - c + 24h is negative".into()))?;
    let base = one_c.sqrt()?;
    Ok((arg - &base) / ((int(25, d) - c).sqrt()? - &base))
}

/// Magnetic charge in half-integer coordinates, stored doubled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MagneticCharge {
    twice_phi1: i64,
    twice_phi2: i64,
}

impl MagneticCharge {
    /// The charge `(a/2, b/2)`; `a + b` must be even.
    pub fn from_halves(a: i64, b: i64) -> Result<Self> {
        if (a + b) % 2 != 0 {
            return Err(Error::Domain(format!("charge ({a}/2, {b}/2) has a non-integer coordinate sum")));
        }
        Ok(MagneticCharge { twice_phi1: a, twice_phi2: b })
    }

    pub fn twice_phi1(self) -> i64 {
        self.twice_phi1
    }

    pub fn twice_phi2(self) -> i64 {
        self.twice_phi2
    }

    pub fn phi1(self, digits: usize) -> Real {
        frac(self.twice_phi1, 2, digits)
    }

    pub fn phi2(self, digits: usize) -> Real {
        frac(self.twice_phi2, 2, digits)
    }

    pub fn negated(self) -> Self {
        MagneticCharge { twice_phi1: -self.twice_phi1, twice_phi2: -self.twice_phi2 }
    }
}

impl std::fmt::Display for MagneticCharge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let half = |x: i64| if x % 2 == 0 { format!("{}", x / 2) } else { format!("{x}/2") };
        write!(f, "({}, {})", half(self.twice_phi1), half(self.twice_phi2))
    }
}

/// Charge in the basis of the two elementary defect vectors.
pub fn charge_from_jk(j: i64, k: i64) -> MagneticCharge {
    MagneticCharge { twice_phi1: 3 * (j + k), twice_phi2: k - j }
}

/// `alpha (g/12) phi1^2 + (g/4)(phi2^2 - (1 - 1/g)^2)`, the second term
/// present only when `phi2 != 0`.
pub fn h_magnetic(m: MagneticCharge, p: &LoopModelParams) -> Real {
    let d = p.g.digits();
    let first = &p.alpha * &p.g / int(12, d) * m.phi1(d).powi(2);
    if m.twice_phi2 == 0 {
        return first;
    }
    let shift = (int(1, d) - int(1, d) / &p.g).powi(2);
    first + &p.g / int(4, d) * (m.phi2(d).powi(2) - shift)
}

/// The six exponent predictions at `n = 0` (`c = -1`).
#[derive(Clone, Debug)]
pub struct BetaPredictions {
    pub beta_z: Real,
    pub beta_y: Real,
    pub beta_x: Real,
    pub beta_w: Real,
    pub beta_v: Real,
    pub beta_u: Real,
    pub gamma: Real,
    pub deltas: Vec<(MagneticCharge, Real)>,
}

impl BetaPredictions {
    /// In the order z, y, x, w, v, u.
    pub fn as_array(&self) -> [&Real; 6] {
        [&self.beta_z, &self.beta_y, &self.beta_x, &self.beta_w, &self.beta_v, &self.beta_u]
    }

    /// `2 beta_u - beta_v - 2 beta_w - gamma + 3`, zero by construction.
    pub fn consistency_residual(&self) -> Real {
        let d = self.gamma.digits();
        int(2, d) * &self.beta_u - &self.beta_v - int(2, d) * &self.beta_w - &self.gamma + int(3, d)
    }
}

pub fn predicted_betas(n: &Real, alpha: &Real) -> Result<BetaPredictions> {
    if !n.is_zero() {
        return Err(Error::Domain("exponent predictions are implemented for n = 0 only".into()));
    }
    let d = n.digits();
    let p = params_for(n, alpha)?;
    let c = central_charge(n, Packing::Fully)?;
    let gamma = gamma_string(&c)?;
    let charges = [
        MagneticCharge::from_halves(3, 1)?,
        MagneticCharge::from_halves(-1, 1)?,
        MagneticCharge::from_halves(2, 0)?,
        MagneticCharge::from_halves(4, 0)?,
    ];
    let deltas: Vec<(MagneticCharge, Real)> =
        charges.iter().map(|&m| Ok((m, delta_dressed(&h_magnetic(m, &p), &c)?))).collect::<Result<_>>()?;
    let (dy, dx, dw, dv) = (&deltas[0].1, &deltas[1].1, &deltas[2].1, &deltas[3].1);
    let one = int(1, d);
    let two = int(2, d);
    Ok(BetaPredictions {
        beta_z: &two - &gamma,
        beta_y: &one + &(&two * dy) - &gamma,
        beta_x: &one + &(&two * dx) - &gamma,
        beta_w: &one + &(&two * dw) - &gamma,
        beta_v: &one + &(&two * dv) - &gamma,
        beta_u: dv + &(&two * dw) - &gamma,
        gamma,
        deltas,
    })
}

/// Charge of an `l`-line source: `(l/2, 0)` for even `l`, `(l/2, -1/2)`
/// for odd `l`.
pub fn watermelon_charge(l: u32) -> MagneticCharge {
    let l = l as i64;
    MagneticCharge { twice_phi1: l, twice_phi2: if l % 2 == 0 { 0 } else { -1 } }
}

/// Dressed dimension of the `l`-line source at `n = 1` (`c = 1`).
pub fn watermelon_delta(l: u32, alpha: &Real) -> Result<Real> {
    if l == 0 {
        return Err(Error::Domain("watermelon needs at least one line".into()));
    }
    let d = alpha.digits();
    let p = params_for(&int(1, d), alpha)?;
    delta_dressed(&h_magnetic(watermelon_charge(l), &p), &int(1, d))
}

/// Loop-model, SLE and duality data at weight `n`.
#[derive(Clone, Debug)]
pub struct SleDuality {
    pub kappa: Real,
    pub g_tilde: Real,
    pub g_prime: Real,
    pub n_prime: Real,
    pub alpha_ansatz: Real,
    /// Absent where the formula's inner root turns imaginary.
    pub gamma_l_bicubic: Option<Real>,
}

/// Liouville parameter of fully packed loops on bicubic maps, written in
/// the SLE parameter.
pub fn gamma_l_bicubic(kappa: &Real) -> Option<Real> {
    let d = kappa.digits();
    let s = int(3, d) * (kappa + &(int(16, d) / kappa));
    let a = (&s + &int(22, d)).sqrt().ok()?;
    let b = root(&(&s - &int(26, d))).ok()?;
    Some((a - b) / int(12, d).sqrt().ok()?)
}

pub fn sle_and_duality(n: &Real) -> Result<SleDuality> {
    let d = n.digits();
    if *n >= int(2, d) {
        return Err(Error::Domain("SLE parameter degenerates at n = 2".into()));
    }
    let p = params_for(n, &int(1, d))?;
    let pi = Real::pi(d);
    let kappa = int(4, d) * &pi / (-(n / &int(2, d))).acos()?;
    let g_tilde = int(2, d) - &p.g;
    let g_prime = int(1, d) / &g_tilde;
    let n_prime = -(int(2, d) * (&pi * &g_prime).cos());
    let alpha_ansatz = int(1, d) / (int(1, d) - p.e0.powi(2));
    let gamma_l = gamma_l_bicubic(&kappa);
    Ok(SleDuality { kappa, g_tilde, g_prime, n_prime, alpha_ansatz, gamma_l_bicubic: gamma_l })
}
