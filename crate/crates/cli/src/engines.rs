use anyhow::{bail, Result};
use bicubic_core::cubic::cubic_closed_form;
use bicubic_core::transfer::{tm_count, z_meet_in_middle};
use bicubic_core::updown::ud_count;
use bicubic_core::{EnsembleId, EnsembleTag, Method};
use num_bigint::BigUint;

/// Whether `method` can produce counts for `id`.
pub fn check_supported(id: EnsembleId, method: Method) -> Result<()> {
    match method {
        Method::Transfer if matches!(id.tag, EnsembleTag::V | EnsembleTag::U) => {
            bail!("the transfer engine does not handle ensemble {id}; use --method updown")
        }
        Method::ClosedForm if id.colored => bail!("closed forms exist only for cubic ensembles; add --cubic"),
        Method::External => bail!("external values are read from tables, not computed"),
        _ => Ok(()),
    }
}

/// One count by the chosen engine. The bicolored closed line goes through
/// the meet-in-the-middle sweep, which is much faster than the full one.
pub fn compute(id: EnsembleId, method: Method, n: usize) -> Result<BigUint> {
    check_supported(id, method)?;
    Ok(match method {
        Method::Transfer if id == EnsembleId::bicubic(EnsembleTag::Z) => z_meet_in_middle(n, |_| {})?,
        Method::Transfer => tm_count(id, n)?,
        Method::UpDown => ud_count(id, n)?,
        Method::ClosedForm => cubic_closed_form(id.tag, n)?,
        Method::External => unreachable!(),
    })
}

pub fn method_name(method: Method) -> &'static str {
    match method {
        Method::Transfer => "transfer",
        Method::UpDown => "updown",
        Method::ClosedForm => "closedform",
        Method::External => "external",
    }
}
