use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use bicubic_core::extrapolate::{estimate, EstimateConfig, EstimateRecord, Quantity};
use bicubic_core::{golden, CountSequence, EnsembleTag, Method};
use serde::Serialize;

#[derive(clap::Args)]
pub struct Args {
    /// Count-sequence JSON file to read.
    #[arg(short, long, conflicts_with = "golden", required_unless_present = "golden")]
    input: Option<PathBuf>,

    /// Use the bundled reference table of this ensemble instead of a file.
    #[arg(long)]
    golden: Option<EnsembleTag>,

    /// growth (mu^2, the limit of t_{N+1}/t_N) or exponent (beta).
    #[arg(short, long, default_value = "growth")]
    quantity: Quantity,

    /// Deepest Richardson order.
    #[arg(short, long, default_value_t = 7)]
    k_max: usize,

    /// Deepest Aitken level.
    #[arg(long, default_value_t = 3)]
    aitken_max: usize,

    /// Drop terms with N above this bound before extrapolating.
    #[arg(long)]
    n_max: Option<usize>,

    /// Write the estimate with its diagnostics as JSON.
    #[arg(long)]
    json_out: Option<PathBuf>,

    /// Write every accelerated value as CSV (family, k, n, value).
    #[arg(long)]
    csv_out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Report {
    ensemble: String,
    colored: bool,
    input_method: Method,
    first_n: usize,
    last_n: usize,
    /// Natural log of the value, for growth-rate estimates.
    #[serde(skip_serializing_if = "Option::is_none")]
    ln_value: Option<String>,
    #[serde(flatten)]
    estimate: EstimateRecord,
}

pub fn load_input(input: Option<&PathBuf>, golden_tag: Option<EnsembleTag>) -> Result<CountSequence> {
    match (input, golden_tag) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Ok(CountSequence::from_json(&text).with_context(|| format!("parsing {}", path.display()))?)
        }
        (None, Some(tag)) => Ok(golden::table(tag)?),
        (None, None) => bail!("give --input or --golden"),
    }
}

pub fn run(args: Args, digits: usize) -> Result<()> {
    let mut seq = load_input(args.input.as_ref(), args.golden)?;
    if let Some(n) = args.n_max {
        seq = seq.truncated(n + 1);
    }
    let config = EstimateConfig { digits, richardson_max: args.k_max, aitken_max: args.aitken_max };
    let est = estimate(&seq, args.quantity, config)?;
    let ln_value = match args.quantity {
        Quantity::GrowthRateSquared => Some(est.value.ln()?),
        Quantity::Exponent => None,
    };

    println!("ensemble:      {}", seq.id);
    println!("terms:         N = {}..{}", seq.start(), seq.end() - 1);
    println!("quantity:      {:?}", est.quantity);
    println!("estimate:      {} +/- {}", est.display_value(), est.uncertainty.to_scientific(2));
    println!("stable digits: {}", est.stable_digits);
    if let Some(l) = &ln_value {
        println!("ln(estimate):  {}", l.to_decimal(12));
    }
    println!("orders:        richardson {} aitken {}", est.diagnostics.richardson_order, est.diagnostics.aitken_order);

    if let Some(path) = &args.json_out {
        let report = Report {
            ensemble: seq.id.tag.to_string(),
            colored: seq.id.colored,
            input_method: seq.method,
            first_n: seq.start(),
            last_n: seq.end() - 1,
            ln_value: ln_value.as_ref().map(|l| l.to_decimal(digits.min(40))),
            estimate: est.to_record(),
        };
        fs::write(path, serde_json::to_string_pretty(&report)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.csv_out {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(["family", "k", "n", "value"])?;
        for row in &est.diagnostics.rows {
            w.write_record([row.family.clone(), row.k.to_string(), row.n.to_string(), row.value.clone()])?;
        }
        w.flush()?;
    }
    Ok(())
}
