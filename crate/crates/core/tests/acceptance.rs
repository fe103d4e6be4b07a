//! Acceptance suite. Runs every criterion in order and prints one PASS or
//! FAIL line per criterion; the process fails if any criterion fails.
//!
//! Run with `cargo test --release -p bicubic-core --test acceptance`.

use std::io::Write;
use std::time::Instant;

use bicubic_core::arch::CatalanTable;
use bicubic_core::cubic::{cubic_binomial_sum, cubic_closed_form_with, cubic_count};
use bicubic_core::ensemble::spec_for;
use bicubic_core::extrapolate::{aitken, estimate, rational_series, richardson, EstimateConfig, Quantity};
use bicubic_core::golden;
use bicubic_core::kpz::{
    central_charge, gamma_liouville, gamma_string, predicted_betas, sle_and_duality, watermelon_delta, Packing,
};
use bicubic_core::real::Real;
use bicubic_core::transfer::{tm_count, z_meet_in_middle};
use bicubic_core::updown::ud_count;
use bicubic_core::{CountSequence, EnsembleId, EnsembleTag, Method};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const DIGITS: usize = 64;

fn tag(letter: char) -> EnsembleTag {
    letter.to_string().parse().unwrap()
}

fn check_table(
    letter: char,
    top: usize,
    engine: &str,
    count: impl Fn(EnsembleId, usize) -> bicubic_core::Result<num_bigint::BigUint>,
) -> Result<(), String> {
    let t = tag(letter);
    let id = EnsembleId::bicubic(t);
    let table = golden::table(t).map_err(|e| e.to_string())?;
    for n in spec_for(id).min_n()..=top {
        let got = count(id, n).map_err(|e| format!("({letter}, N={n}) {engine}: {e}"))?;
        let want = table.get(n).ok_or(format!("({letter}, N={n}) missing from the table"))?;
        if &got != want {
            return Err(format!("({letter}, N={n}) {engine}: expected {want}, got {got}"));
        }
    }
    Ok(())
}

fn within(label: &str, x: f64, lo: f64, hi: f64) -> Result<String, String> {
    if (lo..=hi).contains(&x) {
        Ok(format!("{label} = {x:.6} in [{lo}, {hi}]"))
    } else {
        Err(format!("{label} = {x:.6} outside [{lo}, {hi}]"))
    }
}

fn near(label: &str, got: &Real, want: &Real, tol: f64) -> Result<(), String> {
    let d = (got - want).abs().to_f64();
    if d.is_nan() || d > tol {
        Err(format!("{label}: {} vs {} (diff {d:e})", got.to_decimal(15), want.to_decimal(15)))
    } else {
        Ok(())
    }
}

fn r(p: i64, q: i64) -> Real {
    Real::ratio(p, q, DIGITS)
}

fn golden_tables() -> Outcome {
    check_table('z', 16, "transfer", tm_count)?;
    check_table('y', 10, "transfer", tm_count)?;
    check_table('x', 10, "transfer", tm_count)?;
    check_table('w', 12, "transfer", tm_count)?;
    check_table('v', 12, "up-down", ud_count)?;
    check_table('u', 10, "up-down", ud_count)?;
    Ok("z<=16 y<=10 x<=10 w<=12 (transfer), v<=12 u<=10 (up-down)".into())
}

fn stretch_z() -> Outcome {
    let table = golden::table(EnsembleTag::Z).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let mut reached = 0;
    // the target is 22; continue while each step stays cheap
    for n in 1..=26 {
        let got = z_meet_in_middle(n, |_| {}).map_err(|e| e.to_string())?;
        if Some(&got) != table.get(n) {
            return Err(format!("(z, N={n}) meet-in-the-middle disagrees with the table"));
        }
        reached = n;
    }
    let secs = start.elapsed().as_secs_f64();
    if reached < 22 {
        return Err(format!("reached only N={reached}"));
    }
    Ok(format!("z_N exact for N<={reached} in {secs:.1} s total"))
}

fn engine_agreement() -> Outcome {
    for (letter, top) in [('z', 14), ('y', 8), ('x', 8), ('w', 9)] {
        let id = EnsembleId::bicubic(tag(letter));
        for n in spec_for(id).min_n()..=top {
            let a = tm_count(id, n).map_err(|e| e.to_string())?;
            let b = ud_count(id, n).map_err(|e| e.to_string())?;
            if a != b {
                return Err(format!("({letter}, N={n}): transfer {a}, up-down {b}"));
            }
        }
    }
    Ok("Z<=14 Y<=8 X<=8 W<=9".into())
}

fn cubic_oracle() -> Outcome {
    let mut cat = CatalanTable::new();
    for t in EnsembleTag::ALL {
        let id = EnsembleId::cubic(t);
        for n in spec_for(id).min_n()..=12 {
            let got = cubic_count(t, n).map_err(|e| e.to_string())?;
            let want = cubic_closed_form_with(&mut cat, t, n).map_err(|e| e.to_string())?;
            if got != want {
                return Err(format!("({t} cubic, N={n}): enumerated {got}, closed form {want}"));
            }
        }
    }
    for n in 0..=20 {
        let want = cubic_closed_form_with(&mut cat, EnsembleTag::Z, n).map_err(|e| e.to_string())?;
        if cubic_binomial_sum(n) != want {
            return Err(format!("binomial sum fails at N={n}"));
        }
    }
    Ok("six families N<=12, binomial sum N<=20".into())
}

fn config() -> EstimateConfig {
    EstimateConfig { digits: DIGITS, ..Default::default() }
}

fn growth_rate() -> Outcome {
    let z = golden::table(EnsembleTag::Z).map_err(|e| e.to_string())?;
    let e = estimate(&z, Quantity::GrowthRateSquared, config()).map_err(|e| e.to_string())?;
    let a = within("mu^2", e.value_f64(), 10.112, 10.114)?;
    let b = within("ln mu^2", e.value.ln().map_err(|e| e.to_string())?.to_f64(), 2.3137, 2.3139)?;
    Ok(format!("{a}; {b}"))
}

fn exponents() -> Outcome {
    let ranges = [
        ('z', 2.76, 2.78),
        ('y', 1.89, 1.91),
        ('x', 1.18, 1.20),
        ('w', 1.98, 2.00),
        ('u', 1.30, 1.34),
        ('v', 2.35, 2.48),
    ];
    let mut parts = Vec::new();
    for (letter, lo, hi) in ranges {
        let t = golden::table(tag(letter)).map_err(|e| e.to_string())?;
        let e = estimate(&t, Quantity::Exponent, config()).map_err(|e| e.to_string())?;
        parts.push(within(&format!("beta_{letter}"), e.value_f64(), lo, hi)?);
    }
    Ok(parts.join("; "))
}

fn table_one() -> Outcome {
    let naive = predicted_betas(&r(0, 1), &r(1, 1)).map_err(|e| e.to_string())?;
    let corrected = predicted_betas(&r(0, 1), &r(4, 3)).map_err(|e| e.to_string())?;
    let reference_naive = [2.76759, 1.76759, 1.0, 1.94010, 2.32951, 1.22106];
    let reference_corrected = [2.76759, 1.90008, 1.15668, 1.99096, 2.46983, 1.34207];
    for i in 0..6 {
        for (label, b, want) in [("naive", &naive, reference_naive[i]), ("corrected", &corrected, reference_corrected[i])] {
            let got = b.as_array()[i].to_f64();
            if (got - want).abs() > 1e-5 {
                return Err(format!("{label} column row {}: {got:.6} vs {want}", i + 1));
            }
        }
    }
    Ok("12 entries within 1e-5".into())
}

fn watermelon() -> Outcome {
    for l in 1..=12u32 {
        let d = watermelon_delta(l, &r(9, 8)).map_err(|e| e.to_string())?;
        near(&format!("watermelon l={l}"), &d, &r(l as i64, 8), 1e-12)?;
    }
    near("ansatz at n=0", &sle_and_duality(&r(0, 1)).map_err(|e| e.to_string())?.alpha_ansatz, &r(4, 3), 1e-12)?;
    near("ansatz at n=1", &sle_and_duality(&r(1, 1)).map_err(|e| e.to_string())?.alpha_ansatz, &r(9, 8), 1e-12)?;
    Ok("Delta_l = l/8 for l<=12; ansatz 4/3 and 9/8".into())
}

fn identities() -> Outcome {
    for i in 0..=20 {
        let alpha = r(20 + i, 20);
        let b = predicted_betas(&r(0, 1), &alpha).map_err(|e| e.to_string())?;
        near(&format!("consistency at alpha={}", alpha.to_decimal(4)), &b.consistency_residual(), &r(0, 1), 1e-12)?;
    }
    for i in 0..=44 {
        let c = r(4 - i, 4);
        let gl = gamma_liouville(&c).map_err(|e| e.to_string())?;
        let via = r(1, 1) - r(4, 1) / gl.powi(2);
        near(
            &format!("susceptibility at c={}", c.to_decimal(4)),
            &gamma_string(&c).map_err(|e| e.to_string())?,
            &via,
            1e-12,
        )?;
    }
    for n in [r(0, 1), r(1, 2), r(1, 1)] {
        let s = sle_and_duality(&n).map_err(|e| e.to_string())?;
        let g = s.gamma_l_bicubic.ok_or("bicubic Liouville parameter is not real")?;
        let c = central_charge(&n, Packing::Fully).map_err(|e| e.to_string())?;
        near(
            &format!("Liouville at n={}", n.to_decimal(3)),
            &g,
            &gamma_liouville(&c).map_err(|e| e.to_string())?,
            1e-12,
        )?;
    }
    Ok("alpha grid [1,2] x21, c grid [-10,1] x45, n in {0, 1/2, 1}".into())
}

fn acceleration() -> Outcome {
    let q = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
    let mut runner = TestRunner::new(Config { cases: 128, failure_persistence: None, ..Config::default() });
    let strategy = (1usize..7, 1i64..8, prop::collection::vec((-60i64..60, 1i64..25), 8));
    runner
        .run(&strategy, |(k, start, coeffs)| {
            let c: Vec<BigRational> = coeffs.iter().take(k + 1).map(|&(a, b)| q(a, b)).collect();
            let s = rational_series(start, k + 5, &c);
            let out = richardson(&s, k).unwrap();
            prop_assert!(out.values.iter().all(|v| *v == c[0]));
            Ok(())
        })
        .map_err(|e| format!("Richardson: {e}"))?;
    let strategy = (-60i64..60, 1i64..25, -30i64..30, 1i64..9, 1i64..8);
    runner
        .run(&strategy, |(a, b, c, d, start)| {
            prop_assume!(c != 0);
            let s = rational_series(start, 9, &[q(a, b), q(c, d)]);
            let (out, dropped) = aitken(&s, 1).unwrap();
            prop_assert!(dropped.is_empty());
            prop_assert!(out.values.iter().all(|v| *v == q(a, b)));
            Ok(())
        })
        .map_err(|e| format!("Aitken: {e}"))?;
    Ok("Richardson order k exact on degree <= k (k<=6), Aitken level 1 exact on L + c/N".into())
}

fn cubic_closure() -> Outcome {
    let mut cat = CatalanTable::new();
    let want = [('z', 3.0), ('y', 1.5), ('x', 1.5), ('w', 2.0), ('v', 2.0), ('u', 1.0)];
    let mut parts = Vec::new();
    for (letter, beta) in want {
        let t = tag(letter);
        let id = EnsembleId::cubic(t);
        let start = spec_for(id).min_n();
        let counts = (start..=400).map(|n| cubic_closed_form_with(&mut cat, t, n).unwrap()).collect();
        let seq = CountSequence::from_counts(id, Method::ClosedForm, start, counts).map_err(|e| e.to_string())?;
        let cfg = EstimateConfig { digits: 100, ..Default::default() };
        let mu2 = estimate(&seq, Quantity::GrowthRateSquared, cfg).map_err(|e| e.to_string())?.value_f64();
        if (mu2 - 16.0).abs() > 1e-6 {
            return Err(format!("{letter}: mu^2 = {mu2} not within 1e-6 of 16"));
        }
        let b = estimate(&seq, Quantity::Exponent, cfg).map_err(|e| e.to_string())?.value_f64();
        if (b - beta).abs() > 0.02 {
            return Err(format!("{letter}: beta = {b:.5}, expected {beta} within 0.02"));
        }
        parts.push(format!("{letter}: {b:.4}"));
    }
    Ok(format!("mu^2 = 16 within 1e-6; betas {}", parts.join(", ")))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("golden-table exactness", golden_tables),
        ("stretch exactness of z", stretch_z),
        ("engine cross-agreement", engine_agreement),
        ("cubic closed forms", cubic_oracle),
        ("growth rate", growth_rate),
        ("exponents", exponents),
        ("predicted exponent table", table_one),
        ("watermelon dimensions", watermelon),
        ("algebraic identities", identities),
        ("acceleration exactness", acceleration),
        ("cubic exponent closure", cubic_closure),
    ];
    let mut failed = 0;
    let mut out = std::io::stdout();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let line = match result {
            Ok(detail) => format!("PASS {:>2} {name} ({secs:.1} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                format!("FAIL {:>2} {name} ({secs:.1} s): {why}", i + 1)
            }
        };
        writeln!(out, "{line}").unwrap();
        out.flush().unwrap();
    }
    writeln!(out, "{} of {} criteria passed", criteria.len() - failed, criteria.len()).unwrap();
    if failed > 0 {
        std::process::exit(1);
    }
}
