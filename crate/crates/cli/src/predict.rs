use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use bicubic_core::extrapolate::{estimate, EstimateConfig, Quantity};
use bicubic_core::kpz::{
    h_magnetic, params_for, predicted_betas, sle_and_duality, watermelon_charge, watermelon_delta,
};
use bicubic_core::real::Real;
use bicubic_core::{golden, EnsembleTag};
use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(clap::Args)]
pub struct Args {
    /// Loop weight; a decimal or a fraction such as 1/2.
    #[arg(short, default_value = "0")]
    n: String,

    /// Normalization of the first charge coordinate; a decimal or a fraction.
    #[arg(short, long, default_value = "4/3")]
    alpha: String,

    #[arg(short, long, value_enum, default_value = "csv")]
    format: Format,

    /// Write the report here instead of standard output.
    #[arg(short, long)]
    out: Option<PathBuf>,

    /// Largest line number in the watermelon table (used at n = 1).
    #[arg(long, default_value_t = 12)]
    lines: u32,

    /// Alpha grid as START:END:POINTS; written to --sweep-out as CSV.
    #[arg(long, requires = "sweep_out")]
    sweep: Option<String>,

    #[arg(long)]
    sweep_out: Option<PathBuf>,

    /// Skip the numerical estimates from the bundled tables.
    #[arg(long)]
    no_numeric: bool,

    /// Significant digits printed per value.
    #[arg(long, default_value_t = 12)]
    sig: usize,
}

pub fn parse_real(s: &str, digits: usize) -> Result<Real> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let den = Real::parse(q.trim(), digits)?;
        if den.is_zero() {
            bail!("zero denominator in {s:?}");
        }
        return Ok(Real::parse(p.trim(), digits)? / den);
    }
    Ok(Real::parse(s, digits)?)
}

#[derive(Serialize)]
struct BetaRow {
    exponent: String,
    numeric_estimate: Option<String>,
    numeric_uncertainty: Option<String>,
    naive_kpz: String,
    corrected_kpz: String,
}

#[derive(Serialize)]
struct WatermelonRow {
    lines: u32,
    charge: String,
    h: String,
    delta: String,
}

#[derive(Serialize)]
struct SleRow {
    kappa: String,
    g_tilde: String,
    g_prime: String,
    n_prime: String,
    alpha_ansatz: String,
    gamma_l_bicubic: Option<String>,
}

#[derive(Serialize)]
struct SweepRow {
    alpha: String,
    beta_z: String,
    beta_y: String,
    beta_x: String,
    beta_w: String,
    beta_v: String,
    beta_u: String,
    consistency_residual: String,
}

#[derive(Serialize)]
struct Report {
    n: String,
    alpha: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    betas: Option<Vec<BetaRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    watermelon: Option<Vec<WatermelonRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sle: Option<SleRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<Vec<SweepRow>>,
}

const LETTERS: [EnsembleTag; 6] =
    [EnsembleTag::Z, EnsembleTag::Y, EnsembleTag::X, EnsembleTag::W, EnsembleTag::V, EnsembleTag::U];

fn beta_rows(alpha: &Real, digits: usize, sig: usize, numeric: bool) -> Result<Vec<BetaRow>> {
    let zero = Real::from_u64(0, digits);
    let naive = predicted_betas(&zero, &Real::from_u64(1, digits))?;
    let corrected = predicted_betas(&zero, alpha)?;
    let mut rows = Vec::new();
    for (i, tag) in LETTERS.into_iter().enumerate() {
        let (est, unc) = if numeric {
            let e =
                estimate(&golden::table(tag)?, Quantity::Exponent, EstimateConfig { digits, ..Default::default() })?;
            (Some(e.display_value()), Some(e.uncertainty.to_scientific(2)))
        } else {
            (None, None)
        };
        rows.push(BetaRow {
            exponent: format!("beta_{tag}"),
            numeric_estimate: est,
            numeric_uncertainty: unc,
            naive_kpz: naive.as_array()[i].to_decimal(sig),
            corrected_kpz: corrected.as_array()[i].to_decimal(sig),
        });
    }
    Ok(rows)
}

fn watermelon_rows(alpha: &Real, lines: u32, sig: usize) -> Result<Vec<WatermelonRow>> {
    let p = params_for(&Real::from_u64(1, alpha.digits()), alpha)?;
    (1..=lines)
        .map(|l| {
            let m = watermelon_charge(l);
            Ok(WatermelonRow {
                lines: l,
                charge: m.to_string(),
                h: h_magnetic(m, &p).to_decimal(sig),
                delta: watermelon_delta(l, alpha)?.to_decimal(sig),
            })
        })
        .collect()
}

fn sweep_rows(spec: &str, digits: usize, sig: usize) -> Result<Vec<SweepRow>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, end, points] = parts[..] else {
        bail!("--sweep wants START:END:POINTS, got {spec:?}");
    };
    let (start, end) = (parse_real(start, digits)?, parse_real(end, digits)?);
    let points: i64 = points.trim().parse().context("sweep point count")?;
    if points < 2 {
        bail!("a sweep needs at least two points");
    }
    let zero = Real::from_u64(0, digits);
    let step = (&end - &start) / Real::from_i64(points - 1, digits);
    (0..points)
        .map(|i| {
            let alpha = &start + &(&step * &Real::from_i64(i, digits));
            let b = predicted_betas(&zero, &alpha)?;
            let [z, y, x, w, v, u] = b.as_array();
            Ok(SweepRow {
                alpha: alpha.to_decimal(sig),
                beta_z: z.to_decimal(sig),
                beta_y: y.to_decimal(sig),
                beta_x: x.to_decimal(sig),
                beta_w: w.to_decimal(sig),
                beta_v: v.to_decimal(sig),
                beta_u: u.to_decimal(sig),
                consistency_residual: b.consistency_residual().to_scientific(3),
            })
        })
        .collect()
}

fn write_csv<T: Serialize>(rows: &[T], sink: Box<dyn Write>) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(args: Args, digits: usize) -> Result<()> {
    let n = parse_real(&args.n, digits)?;
    let alpha = parse_real(&args.alpha, digits)?;
    let sig = args.sig.clamp(1, digits);
    let one = Real::from_u64(1, digits);

    let betas = if n.is_zero() { Some(beta_rows(&alpha, digits, sig, !args.no_numeric)?) } else { None };
    let watermelon = if n == one { Some(watermelon_rows(&alpha, args.lines, sig)?) } else { None };
    let sle = match sle_and_duality(&n) {
        Ok(s) => Some(SleRow {
            kappa: s.kappa.to_decimal(sig),
            g_tilde: s.g_tilde.to_decimal(sig),
            g_prime: s.g_prime.to_decimal(sig),
            n_prime: s.n_prime.to_decimal(sig),
            alpha_ansatz: s.alpha_ansatz.to_decimal(sig),
            gamma_l_bicubic: s.gamma_l_bicubic.map(|g| g.to_decimal(sig)),
        }),
        Err(e) if betas.is_none() && watermelon.is_none() => return Err(e.into()),
        Err(_) => None,
    };
    let sweep = args.sweep.as_deref().map(|s| sweep_rows(s, digits, sig)).transpose()?;
    if let (Some(rows), Some(path)) = (&sweep, &args.sweep_out) {
        let file = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
        write_csv(rows, Box::new(file))?;
    }

    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(fs::File::create(path).with_context(|| format!("writing {}", path.display()))?),
        None => Box::new(std::io::stdout()),
    };
    match args.format {
        Format::Json => {
            let report = Report { n: args.n.clone(), alpha: args.alpha.clone(), betas, watermelon, sle, sweep };
            let mut sink = sink;
            writeln!(sink, "{}", serde_json::to_string_pretty(&report)?)?;
        }
        Format::Csv => match (betas, watermelon, sle) {
            (Some(rows), _, _) => write_csv(&rows, sink)?,
            (None, Some(rows), _) => write_csv(&rows, sink)?,
            (None, None, Some(row)) => write_csv(&[row], sink)?,
            (None, None, None) => bail!("nothing to report at n = {}", args.n),
        },
    }
    Ok(())
}
