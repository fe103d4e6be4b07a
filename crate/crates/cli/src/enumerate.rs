use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use bicubic_core::ensemble::spec_for;
use bicubic_core::sequence::CrossCheck;
use bicubic_core::{CountSequence, EnsembleId, EnsembleTag, Method};
use clap::ValueEnum;
use num_bigint::BigUint;

use crate::cache::{Cache, Lookup};
use crate::engines::{check_supported, compute, method_name};
use crate::Mismatch;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MethodArg {
    Transfer,
    Updown,
    /// Run both engines and require identical counts.
    Both,
    /// Closed form (cubic ensembles only).
    Closedform,
}

#[derive(clap::Args)]
pub struct Args {
    /// Ensemble letter: z, y, x, w, v or u.
    #[arg(short, long)]
    ensemble: EnsembleTag,

    /// Use the uncolored (cubic) variant.
    #[arg(long)]
    cubic: bool,

    /// Largest size N to count.
    #[arg(short = 'n', long)]
    n_max: usize,

    #[arg(short, long, value_enum, default_value = "both")]
    method: MethodArg,

    /// Output file for the count sequence (JSON).
    #[arg(short, long)]
    out: PathBuf,

    /// Directory of per-size cached results.
    #[arg(long, default_value = ".bicubic-cache")]
    cache_dir: PathBuf,

    /// Neither read nor write the cache.
    #[arg(long)]
    no_cache: bool,
}

struct Runner {
    cache: Option<Cache>,
}

impl Runner {
    fn count(&self, id: EnsembleId, method: Method, n: usize) -> Result<BigUint> {
        if let Some(cache) = &self.cache {
            match cache.get(id, method, n) {
                Lookup::Hit(c) => return Ok(c),
                Lookup::Miss => {}
                Lookup::Corrupt(why) => eprintln!("warning: discarding cache entry ({why}); recomputing"),
            }
        }
        let start = Instant::now();
        let c = compute(id, method, n)?;
        eprintln!("{id} N={n} {}: {c} ({:.2} s)", method_name(method), start.elapsed().as_secs_f64());
        if let Some(cache) = &self.cache {
            cache.put(id, method, n, &c)?;
        }
        Ok(c)
    }
}

pub fn run(args: Args) -> Result<()> {
    let id = if args.cubic { EnsembleId::cubic(args.ensemble) } else { EnsembleId::bicubic(args.ensemble) };
    let methods: Vec<Method> = match args.method {
        MethodArg::Transfer => vec![Method::Transfer],
        MethodArg::Updown => vec![Method::UpDown],
        MethodArg::Both => vec![Method::UpDown, Method::Transfer],
        MethodArg::Closedform => vec![Method::ClosedForm],
    };
    for &m in &methods {
        check_supported(id, m)?;
    }
    let min = spec_for(id).min_n();
    if args.n_max < min {
        bail!("ensemble {id} starts at N = {min}; --n-max {} is too small", args.n_max);
    }
    let runner = Runner { cache: if args.no_cache { None } else { Some(Cache::open(&args.cache_dir)?) } };

    let mut seq = CountSequence::new(id, methods[0]);
    let mut mismatches = Vec::new();
    for n in min..=args.n_max {
        let primary = runner.count(id, methods[0], n)?;
        for &other in &methods[1..] {
            let second = runner.count(id, other, n)?;
            if second != primary {
                mismatches.push(format!(
                    "({}, N={n}): {} = {primary}, {} = {second}",
                    id.tag,
                    method_name(methods[0]),
                    method_name(other)
                ));
            }
        }
        seq.push(n, primary)?;
    }
    if !mismatches.is_empty() {
        return Err(Mismatch(format!("engines disagree\n  {}", mismatches.join("\n  "))).into());
    }
    if methods.len() > 1 {
        seq.crosscheck = Some(CrossCheck { against: methods[1], agreed_through_n: args.n_max });
    }
    fs::write(&args.out, seq.to_json()? + "\n").with_context(|| format!("writing {}", args.out.display()))?;
    println!("{} terms of {id} written to {}", seq.len(), args.out.display());
    Ok(())
}
