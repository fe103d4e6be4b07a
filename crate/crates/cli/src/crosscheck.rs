//! The full oracle suite. Each check prints one `ok` or `FAIL` line; any
//! failure makes the command exit with status 1.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Result;
use bicubic_core::cubic::{cubic_binomial_sum, cubic_closed_form};
use bicubic_core::ensemble::spec_for;
use bicubic_core::golden::{self, parse_checksums, sha256_hex, CHECKSUM_FILE};
use bicubic_core::kpz::{
    central_charge, gamma_liouville, gamma_string, predicted_betas, sle_and_duality, watermelon_delta, Packing,
};
use bicubic_core::real::Real;
use bicubic_core::{CountSequence, EnsembleId, EnsembleTag, Method};
use num_bigint::BigUint;

use crate::engines::{compute, method_name};
use crate::Mismatch;

#[derive(clap::Args)]
pub struct Args {
    /// Skip every check that needs the transfer engine.
    #[arg(long)]
    no_transfer: bool,

    /// Read the reference tables from this directory instead of the
    /// bundled copies.
    #[arg(long)]
    golden_dir: Option<PathBuf>,

    /// Cap every enumeration size at this N.
    #[arg(long)]
    limit: Option<usize>,
}

struct Report {
    failures: Vec<String>,
}

impl Report {
    fn record(&mut self, name: &str, start: Instant, problems: Vec<String>) {
        let secs = start.elapsed().as_secs_f64();
        if problems.is_empty() {
            println!("ok    {name} ({secs:.2} s)");
        } else {
            println!("FAIL  {name} ({secs:.2} s)");
            for p in &problems {
                println!("        {p}");
            }
            self.failures.extend(problems);
        }
    }
}

/// Largest N checked per ensemble, by engine.
fn updown_limit(tag: EnsembleTag) -> usize {
    match tag {
        EnsembleTag::Z => 10,
        EnsembleTag::Y | EnsembleTag::X => 8,
        EnsembleTag::W | EnsembleTag::V => 9,
        EnsembleTag::U => 8,
    }
}

fn transfer_limit(tag: EnsembleTag) -> Option<usize> {
    match tag {
        EnsembleTag::Z => Some(16),
        EnsembleTag::Y | EnsembleTag::X => Some(8),
        EnsembleTag::W => Some(12),
        EnsembleTag::V | EnsembleTag::U => None,
    }
}

/// Reads one reference table without rejecting it on checksum failure, so
/// that a damaged entry can still be located. The checksum verdict is
/// returned alongside.
fn read_table(dir: &Path, tag: EnsembleTag) -> (Result<CountSequence>, Option<String>) {
    let name = golden::file_name(tag);
    let text = match fs::read_to_string(dir.join(name)) {
        Ok(t) => t,
        Err(e) => return (Err(anyhow::anyhow!("{name}: {e}")), None),
    };
    let checksum_problem =
        fs::read_to_string(dir.join(CHECKSUM_FILE)).ok().and_then(|sums| match parse_checksums(&sums).get(name) {
            None => Some(format!("{name}: not listed in {CHECKSUM_FILE}")),
            Some(want) if *want != sha256_hex(text.as_bytes()) => Some(format!("{name}: checksum mismatch")),
            Some(_) => None,
        });
    (CountSequence::from_json(&text).map_err(Into::into), checksum_problem)
}

fn compare(label: &str, id: EnsembleId, n: usize, want: &BigUint, got: &BigUint, out: &mut Vec<String>) {
    if want != got {
        out.push(format!("({}, N={n}) {label}: expected {want}, got {got}", id.tag));
    }
}

fn close(a: &Real, b: &Real, tol: f64, what: String, out: &mut Vec<String>) {
    let d = (a - b).abs().to_f64();
    if d.is_nan() || d > tol {
        out.push(format!("{what}: {} vs {} (|diff| = {d:e})", a.to_decimal(15), b.to_decimal(15)));
    }
}

pub fn run(args: Args, digits: usize) -> Result<()> {
    let mut report = Report { failures: Vec::new() };
    let cap = |n: usize| args.limit.map_or(n, |l| n.min(l));

    // reference tables
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut tables: BTreeMap<char, CountSequence> = BTreeMap::new();
    for tag in EnsembleTag::ALL {
        let bundled = golden::table(tag)?;
        let seq = match &args.golden_dir {
            None => bundled.clone(),
            Some(dir) => {
                let (seq, checksum) = read_table(dir, tag);
                problems.extend(checksum);
                match seq {
                    Ok(s) => s,
                    Err(e) => {
                        problems.push(format!("{e:#}"));
                        continue;
                    }
                }
            }
        };
        if seq.id != bundled.id || seq.start() != bundled.start() || seq.len() != bundled.len() {
            problems.push(format!("{}: table covers a different range than the bundled copy", golden::file_name(tag)));
        }
        for (n, c) in seq.iter() {
            if let Some(b) = bundled.get(n) {
                compare("reference table vs bundled copy", seq.id, n, b, c, &mut problems);
            }
        }
        match CountSequence::from_json(&seq.to_json()?) {
            Ok(back) if back == seq => {}
            _ => problems.push(format!("{}: JSON round trip changed the table", golden::file_name(tag))),
        }
        tables.insert(tag.letter(), seq);
    }
    report.record("reference tables", start, problems);

    // up-down engine against the tables
    let mut computed: BTreeMap<(char, usize), BigUint> = BTreeMap::new();
    for tag in EnsembleTag::ALL {
        let start = Instant::now();
        let id = EnsembleId::bicubic(tag);
        let mut problems = Vec::new();
        let top = cap(updown_limit(tag));
        for n in spec_for(id).min_n()..=top {
            let got = compute(id, Method::UpDown, n)?;
            if let Some(want) = tables.get(&tag.letter()).and_then(|t| t.get(n)) {
                compare("up-down vs reference", id, n, want, &got, &mut problems);
            }
            computed.insert((tag.letter(), n), got);
        }
        report.record(&format!("up-down {tag} through N={top}"), start, problems);
    }

    // transfer engine against the tables and against up-down
    if !args.no_transfer {
        for tag in EnsembleTag::ALL {
            let Some(limit) = transfer_limit(tag) else { continue };
            let start = Instant::now();
            let id = EnsembleId::bicubic(tag);
            let mut problems = Vec::new();
            let top = cap(limit);
            for n in spec_for(id).min_n()..=top {
                let got = compute(id, Method::Transfer, n)?;
                if let Some(want) = tables.get(&tag.letter()).and_then(|t| t.get(n)) {
                    compare("transfer vs reference", id, n, want, &got, &mut problems);
                }
                if let Some(ud) = computed.get(&(tag.letter(), n)) {
                    compare("transfer vs up-down", id, n, ud, &got, &mut problems);
                }
            }
            report.record(&format!("transfer {tag} through N={top}"), start, problems);
        }
    }

    // cubic ensembles against their closed forms
    let start = Instant::now();
    let mut problems = Vec::new();
    let top = cap(10);
    for tag in EnsembleTag::ALL {
        let id = EnsembleId::cubic(tag);
        for n in spec_for(id).min_n()..=top {
            let want = cubic_closed_form(tag, n)?;
            let mut methods = vec![Method::UpDown];
            // the uncolored sweep keeps many more states than the colored one
            if !args.no_transfer && transfer_limit(tag).is_some() && n <= 8 {
                methods.push(Method::Transfer);
            }
            for m in methods {
                let got = compute(id, m, n)?;
                compare(&format!("{} vs closed form", method_name(m)), id, n, &want, &got, &mut problems);
            }
        }
    }
    for n in 0..=20 {
        let id = EnsembleId::cubic(EnsembleTag::Z);
        compare(
            "binomial sum vs closed form",
            id,
            n,
            &cubic_closed_form(EnsembleTag::Z, n)?,
            &cubic_binomial_sum(n),
            &mut problems,
        );
    }
    report.record(&format!("cubic closed forms through N={top}"), start, problems);

    // exponent formulas
    let start = Instant::now();
    let mut problems = Vec::new();
    identity_checks(digits, &mut problems)?;
    report.record("exponent identities", start, problems);

    if report.failures.is_empty() {
        println!("all checks passed");
        Ok(())
    } else {
        Err(Mismatch(format!("{} problem(s)\n  {}", report.failures.len(), report.failures.join("\n  "))).into())
    }
}

fn identity_checks(digits: usize, out: &mut Vec<String>) -> Result<()> {
    let r = |p: i64, q: i64| Real::ratio(p, q, digits);
    let zero = r(0, 1);
    for i in 0..=10 {
        let alpha = r(10 + i, 10);
        let b = predicted_betas(&zero, &alpha)?;
        close(
            &b.consistency_residual(),
            &zero,
            1e-12,
            format!("consistency relation at alpha = {}", alpha.to_decimal(3)),
            out,
        );
    }
    for i in 0..=22 {
        let c = r(2 - i, 2);
        let gl = gamma_liouville(&c)?;
        close(
            &gamma_string(&c)?,
            &(r(1, 1) - r(4, 1) / gl.powi(2)),
            1e-12,
            format!("susceptibility at c = {}", c.to_decimal(4)),
            out,
        );
    }
    for n in [r(0, 1), r(1, 2), r(1, 1)] {
        let s = sle_and_duality(&n)?;
        let via_c = gamma_liouville(&central_charge(&n, Packing::Fully)?)?;
        match s.gamma_l_bicubic {
            Some(g) => close(&g, &via_c, 1e-12, format!("Liouville parameter at n = {}", n.to_decimal(3)), out),
            None => out.push(format!("Liouville parameter at n = {} is not real", n.to_decimal(3))),
        }
    }
    for l in 1..=12 {
        close(&watermelon_delta(l, &r(9, 8))?, &r(l as i64, 8), 1e-12, format!("watermelon dimension at l = {l}"), out);
    }
    close(&sle_and_duality(&r(0, 1))?.alpha_ansatz, &r(4, 3), 1e-12, "alpha ansatz at n = 0".into(), out);
    close(&sle_and_duality(&r(1, 1))?.alpha_ansatz, &r(9, 8), 1e-12, "alpha ansatz at n = 1".into(), out);

    let naive = predicted_betas(&zero, &r(1, 1))?;
    let corrected = predicted_betas(&zero, &r(4, 3))?;
    let reference_naive = [2.76759, 1.76759, 1.0, 1.94010, 2.32951, 1.22106];
    let reference_corrected = [2.76759, 1.90008, 1.15668, 1.99096, 2.46983, 1.34207];
    for i in 0..6 {
        for (label, got, want) in [("naive", &naive, reference_naive[i]), ("corrected", &corrected, reference_corrected[i])]
        {
            let got = got.as_array()[i].to_f64();
            if (got - want).abs() > 5e-6 {
                out.push(format!("{label} exponent #{}: {got:.6} vs reference {want}", i + 1));
            }
        }
    }
    Ok(())
}
