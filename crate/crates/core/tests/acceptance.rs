//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the binary exits non-zero when any of them fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use nalgebra::DVector;
use rand::Rng;
use zonofit::cone::{build_cone, descent_direction, Certificate, ConeStatus, Objective};
use zonofit::descent::{optimize, DescentConfig, StepRule, Termination};
use zonofit::geom::{Polytope, Zonotope};
use zonofit::hausdorff::{coarse_hausdorff_distance, hausdorff_distance, local_terms, PairSide, SmoothTerm};
use zonofit::linalg::binomial;
use zonofit::solvers::{min_norm_point, ConeInterior, SolverConfig};
use zonofit::subgrad::{coarse_subdifferential, finite_difference_gradient, subdifferential_from_pairs, term_gradient};
use zonofit::warmstart::{random_init, warmstart};
use zonofit::Settings;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn gradients() -> Outcome {
    let s = Settings::default();
    let mut r = rng(101);
    let mut instances = 0;
    let mut terms = 0;
    let (mut z_side, mut facet, mut lower) = (0, 0, 0);
    let mut worst: f64 = 0.0;
    let mut attempts = 0;
    for (d, n) in [(2, 3), (2, 4), (3, 4), (3, 5)] {
        let mut found = 0;
        while found < 25 {
            attempts += 1;
            if attempts > 5000 {
                return Err(format!("only {instances} local instances in {attempts} attempts"));
            }
            let m = r.gen_range(d + 2..d + 6);
            let p = random_polytope(&mut r, d, m);
            let z = random_init(&p, n, &mut r).unwrap();
            let Ok(local) = local_terms(&p, &z, &s) else { continue };
            found += 1;
            instances += 1;
            for t in local.iter().filter(|t| t.value(&z) > 1e-6) {
                let g = term_gradient(t, &z).map_err(|e| format!("analytic gradient failed: {e}"))?;
                let fd = finite_difference_gradient(t, &z, 1e-6);
                worst = worst.max((&g - &fd).norm() / g.norm().max(fd.norm()).max(1e-12));
                terms += 1;
                match t {
                    SmoothTerm::ZVertex { .. } => z_side += 1,
                    SmoothTerm::PVertex { free, .. } if free.len() + 1 == d => facet += 1,
                    SmoothTerm::PVertex { .. } => lower += 1,
                }
            }
        }
    }
    check(worst <= 1e-5, format!(
            "{instances} instances, {terms} terms ({z_side} Z-side, {facet} facet, {lower} lower-dimensional face), worst relative error {worst:.2e}"
        ))
}

fn worked_example() -> Outcome {
    let s = Settings::default();
    let z = Zonotope::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[0.0, 0.0]).unwrap();
    let r = 1.05 * std::f64::consts::FRAC_1_SQRT_2;
    let p =
        Polytope::from_rows(&[vec![0.5 - r, 0.5], vec![0.5, 0.5 - r], vec![0.5 + r, 0.5], vec![0.5, 0.5 + r]]).unwrap();
    let rep = hausdorff_distance(&p, &z, &s).unwrap();
    if rep.pairs.len() != 4 || rep.pairs.iter().any(|q| q.side != PairSide::PVertex) {
        return Err(format!("expected four P-vertex pairs, got {}", rep.pairs.len()));
    }
    let cone = build_cone(&rep.pairs);
    // Our layout stores generator i's coordinate j at i·d + j and μ_j at n·d + j;
    // the printed matrix is coordinate-major: g_ij at j·(n+1) + i, μ_j at j·(n+1) + n.
    let (n, d) = (2, 2);
    let to_printed = |x: &DVector<f64>| {
        let mut out = DVector::zeros(x.len());
        for j in 0..d {
            for i in 0..n {
                out[j * (n + 1) + i] = x[i * d + j];
            }
            out[j * (n + 1) + n] = x[n * d + j];
        }
        out
    };
    let from_printed = |y: &[f64]| {
        let mut out = DVector::zeros(y.len());
        for j in 0..d {
            for i in 0..n {
                out[i * d + j] = y[j * (n + 1) + i];
            }
            out[n * d + j] = y[j * (n + 1) + n];
        }
        out
    };
    let printed = [
        [0.0, -1.0, -2.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0, 0.0, -2.0],
        [2.0, 1.0, 2.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, 2.0, 2.0],
    ];
    let ours: Vec<DVector<f64>> = cone.rows.iter().map(|row| to_printed(row).normalize()).collect();
    let mut worst_row: f64 = 0.0;
    for row in &printed {
        let want = v(row).normalize();
        let best = ours.iter().map(|o| (o - &want).amax()).fold(f64::INFINITY, f64::min);
        worst_row = worst_row.max(best);
    }
    let rays = [
        [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 1.0, -1.0],
        [1.0, -2.0, 0.0, 0.0, 1.0, -1.0],
    ];
    let lineality = [[0.0, -2.0, 1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, -2.0, 0.0, 1.0]];
    let mut min_ray: f64 = f64::INFINITY;
    for y in rays.iter() {
        min_ray = min_ray.min(cone.apply(&from_printed(y)).min());
    }
    for y in lineality.iter() {
        let a = cone.apply(&from_printed(y));
        min_ray = min_ray.min(a.min()).min((-a).min());
    }
    let t = match cone.interior(6, &s).unwrap() {
        ConeInterior::Interior { margin, .. } => margin,
        ConeInterior::EmptyInterior { t } => t,
    };
    let sd = subdifferential_from_pairs(&rep.pairs, &z).unwrap();
    let dir = descent_direction(&cone, &sd, Objective::Exact, 6, false, &s).unwrap();
    let not_min = matches!(dir.status, ConeStatus::Descent { .. });
    check(
        (rep.value - (r - 0.5)).abs() < 1e-12 && worst_row <= 1e-6 && min_ray >= -1e-9 && t > 1e-8 && not_min,
        format!(
            "d = {:.6}, row mismatch {worst_row:.1e}, min Av {min_ray:.1e}, t* = {t:.3e}, verdict {}",
            rep.value,
            if not_min { "not a local minimum" } else { "local minimum" }
        ),
    )
}

fn descent_guarantee() -> Outcome {
    let mut steps = 0;
    let mut violations = 0;
    let mut errors = Vec::new();
    for seed in 0..50u64 {
        let mut r = rng(seed);
        let m = r.gen_range(5..9);
        let p = random_polygon(&mut r, m);
        let n = if seed % 2 == 0 { 3 } else { 4 };
        let z0 = random_init(&p, n, &mut r).unwrap();
        let cfg = DescentConfig { rank: n, max_steps: 100, seed, rule: StepRule::Conservative, ..Default::default() };
        match optimize(&p, &z0, &cfg) {
            Ok((_, trace)) => {
                for rec in trace.records.iter().filter(|t| t.cone_status == "descent") {
                    steps += 1;
                    let after = rec.d_after_step.expect("descent records carry the new distance");
                    if after >= rec.d_exact || after.is_nan() {
                        violations += 1;
                    }
                }
            }
            Err(e) => errors.push(format!("seed {seed}: {e}")),
        }
    }
    check(
        violations == 0 && errors.is_empty(),
        format!("{violations} violations in {steps} descent steps, {} failed runs {:?}", errors.len(), errors),
    )
}

fn is_extreme(points: &[DVector<f64>], k: usize, cfg: &SolverConfig) -> bool {
    let others: Vec<DVector<f64>> =
        points.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, x)| x.clone()).collect();
    let scale = 1.0 + points.iter().map(|x| x.amax()).fold(0.0, f64::max);
    min_norm_point(&others, &points[k], cfg).unwrap().dist > 1e-7 * scale
}

fn vertex_enumeration() -> Outcome {
    let s = Settings::default();
    let mut r = rng(404);
    let mut bad = Vec::new();
    for (n, d) in [(3, 2), (4, 2), (4, 3), (5, 3)] {
        let expected = 2 * (0..d).map(|k| binomial(n - 1, k)).sum::<usize>();
        for trial in 0..10 {
            let z = loop {
                let z = random_zonotope(&mut r, n, d);
                if z.is_general_position(1e-3) {
                    break z;
                }
            };
            let cubical: Vec<DVector<f64>> = (0..1usize << n)
                .map(|mask| z.cubical_vertex(&(0..n).map(|i| mask >> i & 1 == 1).collect::<Vec<_>>()))
                .collect();
            let oracle: Vec<usize> = (0..cubical.len()).filter(|&k| is_extreme(&cubical, k, &s.solver)).collect();
            let found: Vec<usize> = z
                .enumerate_vertices(s.rank_cap, &s.solver)
                .unwrap()
                .iter()
                .map(|(e, _)| e.iter().enumerate().map(|(i, &b)| (b as usize) << i).sum())
                .collect();
            if found != oracle || found.len() != expected {
                bad.push(format!(
                    "(n={n}, d={d}) trial {trial}: {} vs oracle {} vs count {expected}",
                    found.len(),
                    oracle.len()
                ));
            }
        }
    }
    check(bad.is_empty(), if bad.is_empty() { "40 zonotopes match the hull oracle".into() } else { bad.join("; ") })
}

fn dist_to_polygon(x: [f64; 2], poly: &[[f64; 2]]) -> f64 {
    let m = poly.len();
    let mut inside = true;
    let mut best = f64::INFINITY;
    for k in 0..m {
        let (a, b) = (poly[k], poly[(k + 1) % m]);
        let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
        let (wx, wy) = (x[0] - a[0], x[1] - a[1]);
        if ex * wy - ey * wx < 0.0 {
            inside = false;
        }
        let t = ((wx * ex + wy * ey) / (ex * ex + ey * ey)).clamp(0.0, 1.0);
        best = best.min((wx - t * ex).hypot(wy - t * ey));
    }
    if inside {
        0.0
    } else {
        best
    }
}

fn boundary_samples(poly: &[[f64; 2]], count: usize) -> Vec<[f64; 2]> {
    let m = poly.len();
    let lens: Vec<f64> = (0..m)
        .map(|k| {
            let (a, b) = (poly[k], poly[(k + 1) % m]);
            (b[0] - a[0]).hypot(b[1] - a[1])
        })
        .collect();
    let total: f64 = lens.iter().sum();
    let mut out = Vec::with_capacity(count);
    let (mut edge, mut start) = (0, 0.0);
    for i in 0..count {
        let arc = total * i as f64 / count as f64;
        while arc > start + lens[edge] && edge + 1 < m {
            start += lens[edge];
            edge += 1;
        }
        let t = ((arc - start) / lens[edge]).clamp(0.0, 1.0);
        let (a, b) = (poly[edge], poly[(edge + 1) % m]);
        out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
    }
    out
}

fn hausdorff_oracle() -> Outcome {
    let s = Settings::default();
    let mut r = rng(505);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let m = r.gen_range(4..9);
        let p = random_polygon(&mut r, m);
        let n = r.gen_range(2..6);
        let z = random_zonotope_2d(&mut r, n);
        let (pp, zp) = (polygon_of(&p), zonotope_polygon(&z));
        let a = boundary_samples(&pp, 100_000).iter().map(|&x| dist_to_polygon(x, &zp)).fold(0.0, f64::max);
        let b = boundary_samples(&zp, 100_000).iter().map(|&x| dist_to_polygon(x, &pp)).fold(0.0, f64::max);
        let exact = hausdorff_distance(&p, &z, &s).unwrap().value;
        worst = worst.max((exact - a.max(b)).abs());
    }
    check(worst <= 1e-3, format!("20 instances, worst gap to sampling {worst:.2e}"))
}

fn warmstart_exactness() -> Outcome {
    let mut r = rng(606);
    let mut bad = Vec::new();
    for k in 0..10 {
        let n = 2 + k % 4;
        let target = random_zonotope_2d(&mut r, n);
        let p = Polytope::from_rows(&zonotope_polygon(&target).iter().map(|q| q.to_vec()).collect::<Vec<_>>()).unwrap();
        if p.vertices().len() != 2 * n {
            return Err(format!("instance {k} has {} edges, wanted {}", p.vertices().len(), 2 * n));
        }
        let z0 = warmstart(&p, n, &mut r).unwrap();
        let cfg = DescentConfig { rank: n, seed: k as u64, ..Default::default() };
        let (z, trace) = optimize(&p, &z0, &cfg).unwrap();
        let d = hausdorff_distance(&p, &z, &Settings::default()).unwrap().value;
        if !(d <= 1e-9 && trace.records.len() <= 2 && trace.termination == Termination::Threshold) {
            bad.push(format!("instance {k}: d = {d:.2e} after {} records", trace.records.len()));
        }
    }
    check(
        bad.is_empty(),
        if bad.is_empty() { "10 symmetric polygons recovered exactly".into() } else { bad.join("; ") },
    )
}

fn final_distance(p: &Polytope, z0: &Zonotope, n: usize, seed: u64) -> Result<f64, String> {
    let cfg = DescentConfig { rank: n, max_steps: 500, seed, ..Default::default() };
    let (z, _) = optimize(p, z0, &cfg).map_err(|e| e.to_string())?;
    hausdorff_distance(p, &z, &Settings::default()).map(|r| r.value).map_err(|e| e.to_string())
}

fn recovery() -> Outcome {
    let (mut reached, mut beats, mut total) = (0, 0, 0);
    let mut failures = Vec::new();
    for n in [3, 4] {
        for seed in 0..10u64 {
            let mut r = rng(700 + 10 * n as u64 + seed);
            let target = random_zonotope_2d(&mut r, n);
            let p =
                Polytope::from_rows(&zonotope_polygon(&target).iter().map(|q| q.to_vec()).collect::<Vec<_>>()).unwrap();
            total += 1;
            let warm =
                warmstart(&p, n, &mut r).map_err(|e| e.to_string()).and_then(|z0| final_distance(&p, &z0, n, seed));
            let mut randoms = Vec::new();
            for k in 0..3 {
                match random_init(&p, n, &mut r)
                    .map_err(|e| e.to_string())
                    .and_then(|z0| final_distance(&p, &z0, n, seed * 3 + k))
                {
                    Ok(d) => randoms.push(d),
                    Err(e) => failures.push(format!("n={n} seed {seed} random {k}: {e}")),
                }
            }
            match warm {
                Ok(d) => {
                    if d <= 1e-3 * p.diameter() {
                        reached += 1;
                    }
                    if randoms.is_empty() || d <= median(&mut randoms) {
                        beats += 1;
                    }
                }
                Err(e) => failures.push(format!("n={n} seed {seed} warmstart: {e}")),
            }
        }
    }
    check(
        reached * 5 >= total * 4 && beats * 5 >= total * 4,
        format!(
            "{reached}/{total} reached 1e-3·diam, {beats}/{total} at or below the random median, failures {failures:?}"
        ),
    )
}

/// P places two vertices at `q ± D·t` around every vertex `q` of Z, with `t`
/// tangent to Z there. Moving `q` cannot bring it closer to both.
fn coarse_minimum(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> (Polytope, Zonotope) {
    let z = random_zonotope_2d(r, n);
    let poly = zonotope_polygon(&z);
    let m = poly.len();
    let min_edge = (0..m)
        .map(|k| {
            let (a, b) = (poly[k], poly[(k + 1) % m]);
            (b[0] - a[0]).hypot(b[1] - a[1])
        })
        .fold(f64::INFINITY, f64::min);
    let dd = 0.2 * min_edge;
    let mut pts = Vec::new();
    for k in 0..m {
        let (prev, q, next) = (poly[(k + m - 1) % m], poly[k], poly[(k + 1) % m]);
        let (ax, ay) = (q[0] - prev[0], q[1] - prev[1]);
        let (bx, by) = (next[0] - q[0], next[1] - q[1]);
        let (la, lb) = (ax.hypot(ay), bx.hypot(by));
        let (tx, ty) = (ax / la + bx / lb, ay / la + by / lb);
        let lt = tx.hypot(ty);
        let (tx, ty) = (tx / lt, ty / lt);
        pts.push(vec![q[0] + dd * tx, q[1] + dd * ty]);
        pts.push(vec![q[0] - dd * tx, q[1] - dd * ty]);
    }
    (Polytope::from_rows(&pts).unwrap(), z)
}

fn certificate() -> Outcome {
    let s = Settings::default();
    let mut r = rng(808);
    let mut bad = Vec::new();
    let mut worst_drop: f64 = 0.0;
    for k in 0..10 {
        let (p, z) = coarse_minimum(&mut r, 2 + k % 3);
        let rep = coarse_hausdorff_distance(&p, &z, &s).unwrap();
        let cone = build_cone(&rep.pairs);
        let dim = z.to_params().len();
        let empty = matches!(cone.interior(dim, &s).unwrap(), ConeInterior::EmptyInterior { .. });
        let sd = coarse_subdifferential(&rep.pairs).unwrap();
        let dir = descent_direction(&cone, &sd, Objective::Coarse, dim, false, &s).unwrap();
        if !empty || dir.certificate != Certificate::CertifiedLocalMinOfCoarse {
            bad.push(format!("instance {k}: empty interior {empty}, certificate {:?}", dir.certificate));
        }
        let base = z.to_params();
        for _ in 0..200 {
            let dir = gaussian(&mut r, dim).normalize() * 1e-4;
            let moved = Zonotope::from_params(z.rank(), 2, &(&base + dir)).unwrap();
            let d = coarse_hausdorff_distance(&p, &moved, &s).unwrap().value;
            worst_drop = worst_drop.max(rep.value - d);
        }
    }
    check(
        bad.is_empty() && worst_drop <= 1e-10,
        format!("10 constructed minima, largest decrease under perturbation {worst_drop:.2e} {}", bad.join("; ")),
    )
}

fn properness() -> Outcome {
    let src = Zonotope::from_rows(&[vec![1.0, 2.0], vec![1.0, 1.0], vec![2.0, 0.0]], &[0.0, 0.0]).unwrap();
    let mut got = Vec::new();
    let mut ok = true;
    for (eps, want) in [(0.2, true), (0.4, true), (0.6, false), (0.8, false), (1.0, false)] {
        let t = Zonotope::from_rows(&[vec![1.0, 2.0], vec![1.0 - eps, 1.0], vec![2.0, 0.0]], &[0.0, 0.0]).unwrap();
        let proper = src.is_pushforward_proper(&t, 1e-9);
        ok &= proper == want;
        got.push(format!("{eps}: {proper}"));
    }
    check(ok, got.join(", "))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("gradient correctness", Duration::from_secs(120), gradients),
        ("worked cone example", Duration::from_secs(1), worked_example),
        ("conservative descent", Duration::from_secs(300), descent_guarantee),
        ("vertex enumeration", Duration::from_secs(60), vertex_enumeration),
        ("hausdorff oracle", Duration::from_secs(120), hausdorff_oracle),
        ("warmstart exactness", Duration::from_secs(30), warmstart_exactness),
        ("recovery", Duration::from_secs(600), recovery),
        ("certificate soundness", Duration::from_secs(120), certificate),
        ("pushforward properness", Duration::from_secs(1), properness),
    ];
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(d) if elapsed <= *budget => (true, d),
            Ok(d) => (false, format!("{d}; over budget")),
            Err(d) => (false, d),
        };
        failed += !pass as usize;
        println!(
            "criterion {}: {} {name} ({:.2}s of {}s) {detail}",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
}
