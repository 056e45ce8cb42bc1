use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use zonofit::cone::{build_cone, descent_direction, Certificate, ConeStatus, Objective};
use zonofit::descent::{optimize as run_descent, DescentConfig, DescentTrace, StepRule};
use zonofit::geom::{Polytope, Zonotope};
use zonofit::hausdorff::{
    all_pairs, coarse_hausdorff_distance, hausdorff_distance, locality_from_pairs, select_active, AchievingPair,
    PairSide,
};
use zonofit::io::{self, PolytopeFile, ZonotopeFile};
use zonofit::subgrad::{coarse_subdifferential, subdifferential_from_pairs};
use zonofit::warmstart::{random_init, warmstart_2d, warmstart_generic};
use zonofit::Settings;

use crate::manifest::{timeless_rows, RunManifest};
use crate::{InitArg, InputError, OptimizeArgs, RuleArg, UsageError};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| InputError(format!("cannot read {}: {e}", path.display())).into())
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn load_polytope(path: &Path) -> Result<Polytope> {
    io::polytope_from_json(&read(path)?).with_context(|| format!("loading {}", path.display()))
}

pub fn load_zonotope(path: &Path) -> Result<Zonotope> {
    io::zonotope_from_json(&read(path)?).with_context(|| format!("loading {}", path.display()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

fn side_label(side: PairSide) -> &'static str {
    match side {
        PairSide::PVertex => "p_vertex",
        PairSide::ZVertex => "z_vertex",
    }
}

fn pair_json(pair: &AchievingPair) -> serde_json::Value {
    json!({
        "side": side_label(pair.side),
        "vertex": pair.vertex,
        "p": pair.p.as_slice(),
        "q": pair.q.as_slice(),
        "lift": pair.lift.x.as_slice(),
        "distance": pair.distance,
    })
}

pub fn distance(polytope: &Path, zonotope: &Path, coarse: bool) -> Result<u8> {
    let (p, z) = (load_polytope(polytope)?, load_zonotope(zonotope)?);
    let s = Settings::default();
    let rep = if coarse { coarse_hausdorff_distance(&p, &z, &s)? } else { hausdorff_distance(&p, &z, &s)? };
    let out = json!({
        "objective": if coarse { "coarse" } else { "exact" },
        "value": rep.value,
        "pairs": rep.pairs.iter().map(pair_json).collect::<Vec<_>>(),
    });
    println!("{}", to_json(&out));
    Ok(0)
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var("ZONOFIT_SEED") {
        Ok(v) => {
            v.trim().parse().map(Some).map_err(|_| UsageError(format!("ZONOFIT_SEED is not an integer: {v:?}")).into())
        }
        Err(_) => Ok(None),
    }
}

fn build_config(args: &OptimizeArgs, init: Option<&Zonotope>) -> Result<DescentConfig> {
    let (mut cfg, config_rank) = match &args.config {
        Some(path) => {
            let bad = |e: serde_json::Error| InputError(format!("bad config {}: {e}", path.display()));
            let raw: serde_json::Value = serde_json::from_str(&read(path)?).map_err(bad)?;
            let has_rank = raw.get("rank").is_some();
            let cfg: DescentConfig = serde_json::from_value(raw).map_err(bad)?;
            (cfg, has_rank.then_some(cfg.rank))
        }
        None => (DescentConfig::default(), None),
    };
    cfg.rank = match args.rank.or(config_rank).or(init.map(Zonotope::rank)) {
        Some(n) => n,
        None => return Err(UsageError("--rank is required".into()).into()),
    };
    if let Some(n) = args.steps {
        cfg.max_steps = n;
    }
    if let Some(t) = args.tol {
        cfg.threshold = t;
    }
    if let Some(rule) = args.rule {
        cfg.rule = match rule {
            RuleArg::Conservative => StepRule::Conservative,
            RuleArg::Aggressive => StepRule::Aggressive,
            RuleArg::Random => StepRule::Random,
            RuleArg::Hybrid => StepRule::Hybrid { switch_at: args.switch_at },
        };
    } else if args.switch_at.is_some() {
        return Err(UsageError("--switch-at needs --rule hybrid".into()).into());
    }
    if let Some(seed) = env_seed()?.or(args.seed) {
        cfg.seed = seed;
    }
    if let Some(o) = args.objective {
        cfg.objective = o.into();
    }
    cfg.cone_fallback |= args.cone_fallback;
    Ok(cfg)
}

fn initial_zonotope(p: &Polytope, mode: InitArg, init: Option<Zonotope>, cfg: &DescentConfig) -> Result<Zonotope> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok(match mode {
        InitArg::Auto if p.dim() == 2 => warmstart_2d(p, cfg.rank, 3, &mut rng)?,
        InitArg::Auto => warmstart_generic(p, cfg.rank, &mut rng)?,
        InitArg::Random => random_init(p, cfg.rank, &mut rng)?,
        InitArg::File => init.expect("checked by caller"),
    })
}

fn summary(trace: &DescentTrace) -> (f64, f64) {
    let last = trace.records.last().expect("every run records its final state");
    (last.d_exact, last.d_coarse)
}

pub fn optimize(args: &OptimizeArgs) -> Result<u8> {
    let p = load_polytope(&args.polytope)?;
    let init = match (args.warmstart, &args.init) {
        (InitArg::File, Some(path)) => Some(load_zonotope(path)?),
        (InitArg::File, None) => return Err(UsageError("--warmstart file needs --init <path>".into()).into()),
        (_, Some(_)) => return Err(UsageError("--init is only used with --warmstart file".into()).into()),
        _ => None,
    };
    let cfg = build_config(args, init.as_ref())?;
    let z0 = initial_zonotope(&p, args.warmstart, init, &cfg)?;
    let started = Instant::now();
    let (z, trace) = run_descent(&p, &z0, &cfg)?;
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    let (d_exact, d_coarse) = summary(&trace);

    if let Some(path) = &args.trace {
        write(path, &io::trace_csv(&trace.records))?;
    }
    if let Some(path) = &args.plot {
        if p.dim() == 2 {
            let pairs = hausdorff_distance(&p, &z, &cfg.settings)?.pairs;
            write(path, &crate::svg::render(&p, &z, &pairs, &cfg.settings)?)?;
        } else {
            eprintln!("note: --plot ignored for d = {}", p.dim());
        }
    }
    let manifest_path = args.manifest.clone().or_else(|| args.out.as_ref().map(|o| o.with_extension("manifest.json")));
    if let Some(path) = manifest_path {
        let m = RunManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            polytope_path: args.polytope.display().to_string(),
            polytope: PolytopeFile::from(&p),
            init: match (&args.warmstart, &args.init) {
                (InitArg::File, Some(path)) => path.display().to_string(),
                (InitArg::Random, _) => "random".into(),
                _ => "auto".into(),
            },
            initial: ZonotopeFile::from(&z0),
            config: cfg,
            seed: cfg.seed,
            termination: trace.termination,
            certificate: trace.certificate,
            iterations: trace.records.len(),
            d_exact,
            d_coarse,
            wall_ms,
            final_zonotope: ZonotopeFile::from(&z),
            trace: timeless_rows(&trace),
        };
        write(&path, &to_json(&m))?;
    }
    match &args.out {
        Some(path) => {
            write(path, &io::zonotope_to_json(&z))?;
            let out = json!({
                "termination": trace.termination,
                "certificate": trace.certificate,
                "iterations": trace.records.len(),
                "d_exact": d_exact,
                "d_coarse": d_coarse,
            });
            println!("{}", to_json(&out));
        }
        None => println!("{}", io::zonotope_to_json(&z)),
    }
    Ok(0)
}

fn verdict(status: &ConeStatus, certificate: Certificate) -> &'static str {
    match (status, certificate) {
        (ConeStatus::Descent { .. }, _) => "not a local minimum",
        (_, Certificate::CertifiedLocalMin) => "certified local minimum",
        (_, Certificate::CertifiedLocalMinOfCoarse) => "certified local minimum of the coarse distance",
        (ConeStatus::ConeEmptyInterior, _) => "cone has empty interior; no certificate",
        _ => "no feasible descent direction",
    }
}

pub fn cone(polytope: &Path, zonotope: &Path, objective: Objective) -> Result<u8> {
    let (p, z) = (load_polytope(polytope)?, load_zonotope(zonotope)?);
    let s = Settings::default();
    let (pairs, subdiff) = match objective {
        Objective::Exact => {
            let pairs = all_pairs(&p, &z, &s)?;
            let rep = locality_from_pairs(&p, &z, &pairs, &s);
            if !rep.holds() {
                println!("{}", to_json(&json!({ "locality_violated": true, "report": rep, "summary": rep.summary() })));
                return Ok(5);
            }
            let active = select_active(pairs, s.tol.active).pairs;
            let sd = subdifferential_from_pairs(&active, &z)?;
            (active, sd)
        }
        Objective::Coarse => {
            if !z.is_general_position(s.tol.general_position) {
                println!(
                    "{}",
                    to_json(&json!({ "locality_violated": true, "summary": "zonotope is not in general position" }))
                );
                return Ok(5);
            }
            let pairs = coarse_hausdorff_distance(&p, &z, &s)?.pairs;
            let sd = coarse_subdifferential(&pairs)?;
            (pairs, sd)
        }
    };
    let cone = build_cone(&pairs);
    let dim = z.to_params().len();
    let dir = descent_direction(&cone, &subdiff, objective, dim, false, &s)?;
    let direction = match &dir.status {
        ConeStatus::Descent { direction, .. } => Some(direction.as_slice().to_vec()),
        _ => None,
    };
    let out = json!({
        "objective": objective,
        "layout": "generator i coordinate j at i*d+j, translation coordinate j at n*d+j",
        "matrix": cone.rows.iter().map(|r| r.as_slice().to_vec()).collect::<Vec<_>>(),
        "pairs": pairs.iter().map(pair_json).collect::<Vec<_>>(),
        "interior": dir.status != ConeStatus::ConeEmptyInterior,
        "t_star": dir.interior_margin,
        "status": dir.status.label(),
        "direction": direction,
        "certificate": dir.certificate,
        "verdict": verdict(&dir.status, dir.certificate),
    });
    println!("{}", to_json(&out));
    Ok(0)
}

pub fn warmstart(polytope: &Path, rank: usize, seed: u64, depth: usize) -> Result<u8> {
    let p = load_polytope(polytope)?;
    let seed = env_seed()?.unwrap_or(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z =
        if p.dim() == 2 { warmstart_2d(&p, rank, depth, &mut rng)? } else { warmstart_generic(&p, rank, &mut rng)? };
    println!("{}", io::zonotope_to_json(&z));
    Ok(0)
}

pub fn replay(manifest: &Path, trace_out: Option<&Path>) -> Result<u8> {
    let m: RunManifest = serde_json::from_str(&read(manifest)?)
        .map_err(|e| InputError(format!("bad manifest {}: {e}", manifest.display())))?;
    let p = m.polytope.build()?;
    let z0 = m.initial.build()?;
    let (z, trace) = run_descent(&p, &z0, &m.config)?;
    if let Some(path) = trace_out {
        write(path, &io::trace_csv(&trace.records))?;
    }
    let rows = timeless_rows(&trace);
    let matches = rows == m.trace && ZonotopeFile::from(&z) == m.final_zonotope && trace.termination == m.termination;
    let first_difference = rows.iter().zip(&m.trace).position(|(a, b)| a != b);
    println!(
        "{}",
        to_json(&json!({
            "matches": matches,
            "iterations": rows.len(),
            "recorded_iterations": m.trace.len(),
            "first_difference": first_difference,
        }))
    );
    Ok(if matches { 0 } else { 3 })
}
