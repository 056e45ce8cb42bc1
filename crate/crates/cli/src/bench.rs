use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use zonofit::descent::{optimize, DescentConfig};
use zonofit::geom::Polytope;
use zonofit::warmstart::{random_init, warmstart};

use crate::UsageError;

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Comma-separated ambient dimensions.
    #[arg(long)]
    pub dims: String,
    /// Comma-separated ranks; every dimension is paired with every rank.
    #[arg(long)]
    pub ranks: String,
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Random starts per instance next to the warmstart.
    #[arg(long, default_value_t = 3)]
    pub random_starts: usize,
    /// Per-run CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Median distance per iteration for each (dim, rank, init).
    #[arg(long)]
    pub curves: Option<PathBuf>,
}

struct Run {
    dim: usize,
    rank: usize,
    seed: u64,
    /// 0 for the warmstart, k ≥ 1 for the k-th random start.
    start: usize,
}

struct RunResult {
    final_d: f64,
    curve: Vec<f64>,
    iterations: usize,
    termination: String,
    status: String,
}

fn parse_list(text: &str, what: &str) -> Result<Vec<usize>> {
    let items: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(UsageError(format!("--{what} is empty")).into());
    }
    items
        .iter()
        .map(|s| s.parse().map_err(|_| UsageError(format!("--{what}: {s:?} is not a positive integer")).into()))
        .collect()
}

fn random_polytope(d: usize, rng: &mut ChaCha8Rng) -> Polytope {
    let m = 2 * d + 4;
    loop {
        let pts: Vec<DVector<f64>> = (0..m)
            .map(|_| loop {
                let x = DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
                let r = x.norm();
                if r > 1e-3 && r <= 1.0 {
                    break x / r * rng.gen_range(0.5..1.0);
                }
            })
            .collect();
        if let Ok(p) = Polytope::new(pts) {
            return p;
        }
    }
}

fn instance_seed(run: &Run) -> u64 {
    ((run.dim as u64) << 48) | ((run.rank as u64) << 32) | run.seed
}

fn execute(run: &Run, steps: usize) -> RunResult {
    let p = random_polytope(run.dim, &mut ChaCha8Rng::seed_from_u64(instance_seed(run)));
    let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(run).wrapping_add(run.start as u64 * 0x9E37_79B9));
    let z0 = if run.start == 0 { warmstart(&p, run.rank, &mut rng) } else { random_init(&p, run.rank, &mut rng) };
    let cfg = DescentConfig { rank: run.rank, max_steps: steps, seed: run.seed, ..Default::default() };
    match z0.and_then(|z| optimize(&p, &z, &cfg)) {
        Ok((_, trace)) => RunResult {
            final_d: trace.records.last().map_or(f64::NAN, |r| r.d_exact),
            curve: trace.records.iter().map(|r| r.d_exact).collect(),
            iterations: trace.records.len(),
            termination: format!("{:?}", trace.termination),
            status: "ok".into(),
        },
        Err(e) => RunResult {
            final_d: f64::NAN,
            curve: Vec::new(),
            iterations: 0,
            termination: String::new(),
            status: format!("failed: {e}").replace(',', ";"),
        },
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.retain(|x| x.is_finite());
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len();
    if m % 2 == 1 {
        xs[m / 2]
    } else {
        0.5 * (xs[m / 2 - 1] + xs[m / 2])
    }
}

fn init_label(start: usize) -> &'static str {
    if start == 0 {
        "warmstart"
    } else {
        "random"
    }
}

pub fn run(args: &BenchArgs) -> Result<u8> {
    let dims = parse_list(&args.dims, "dims")?;
    let ranks = parse_list(&args.ranks, "ranks")?;
    let mut runs = Vec::new();
    for &dim in &dims {
        if dim < 2 {
            return Err(UsageError(format!("dimension {dim} is below 2")).into());
        }
        for &rank in &ranks {
            if rank < dim {
                return Err(UsageError(format!("rank {rank} is below dimension {dim}")).into());
            }
            for seed in 0..args.seeds {
                for start in 0..=args.random_starts {
                    runs.push(Run { dim, rank, seed, start });
                }
            }
        }
    }
    let results: Vec<RunResult> = runs.par_iter().map(|r| execute(r, args.steps)).collect();

    let mut csv = String::from("dim,rank,seed,init,start,final_d,iterations,termination,status\n");
    for (run, res) in runs.iter().zip(&results) {
        writeln!(
            csv,
            "{},{},{},{},{},{:?},{},{},{}",
            run.dim,
            run.rank,
            run.seed,
            init_label(run.start),
            run.start,
            res.final_d,
            res.iterations,
            res.termination,
            res.status
        )?;
    }
    match &args.out {
        Some(path) => std::fs::write(path, &csv).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{csv}"),
    }

    let mut groups: BTreeMap<(usize, usize, &str), Vec<&RunResult>> = BTreeMap::new();
    for (run, res) in runs.iter().zip(&results) {
        groups.entry((run.dim, run.rank, init_label(run.start))).or_default().push(res);
    }
    if let Some(path) = &args.curves {
        let mut text = String::from("dim,rank,init,iter,median_d\n");
        for ((dim, rank, init), members) in &groups {
            let len = members.iter().map(|r| r.curve.len()).max().unwrap_or(0);
            for it in 0..len {
                // Finished runs hold their last value.
                let at: Vec<f64> = members.iter().filter_map(|r| r.curve.get(it).or(r.curve.last()).copied()).collect();
                writeln!(text, "{dim},{rank},{init},{it},{:?}", median(at))?;
            }
        }
        std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    }

    eprintln!("{:>4} {:>5} {:>10} {:>14} {:>7}", "dim", "rank", "init", "median final", "failed");
    for ((dim, rank, init), members) in &groups {
        let failed = members.iter().filter(|r| r.status != "ok").count();
        eprintln!(
            "{dim:>4} {rank:>5} {init:>10} {:>14.6e} {failed:>7}",
            median(members.iter().map(|r| r.final_d).collect())
        );
    }
    Ok(0)
}
