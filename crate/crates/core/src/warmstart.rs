//! Initial zonotopes: a symmetric planar envelope of P, a PCA box for higher
//! dimensions, and random starts.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::hull2d::{convex_hull_2d, polygon_area};
use crate::geom::{Polytope, Zonotope};

/// Convex polygon, counter-clockwise, symmetric about `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricPolygon {
    pub vertices: Vec<[f64; 2]>,
    pub center: [f64; 2],
}

const HULL_TOL: f64 = 1e-10;

fn planar(p: &Polytope) -> Result<Vec<[f64; 2]>> {
    if p.dim() != 2 {
        return Err(Error::DimensionNot2(p.dim()));
    }
    Ok(p.vertices().iter().map(|v| [v[0], v[1]]).collect())
}

/// `conv(V ∪ (2O − V))`
pub fn envelope_2d(p: &Polytope, center: [f64; 2]) -> Result<SymmetricPolygon> {
    let mut pts = planar(p)?;
    let refl: Vec<[f64; 2]> = pts.iter().map(|v| [2.0 * center[0] - v[0], 2.0 * center[1] - v[1]]).collect();
    pts.extend(refl);
    Ok(SymmetricPolygon { vertices: convex_hull_2d(&pts, HULL_TOL), center })
}

/// Center whose envelope has the least area, searched on `depth` levels of a
/// 9×9 grid shrinking around the best point so far. Starts at the vertex
/// barycenter and only moves on strict improvement.
pub fn choose_center_2d(p: &Polytope, depth: usize) -> Result<[f64; 2]> {
    let pts = planar(p)?;
    let b = p.barycenter();
    let mut best = [b[0], b[1]];
    let area = |c: [f64; 2]| envelope_2d(p, c).map(|s| polygon_area(&s.vertices));
    let mut best_area = area(best)?;
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for v in &pts {
        for k in 0..2 {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    let mut half = 0.25 * (hi[0] - lo[0]).max(hi[1] - lo[1]);
    for _ in 0..depth {
        let around = best;
        for i in 0..9 {
            for j in 0..9 {
                let c = [around[0] + half * (i as f64 / 4.0 - 1.0), around[1] + half * (j as f64 / 4.0 - 1.0)];
                let a = area(c)?;
                if a < best_area * (1.0 - 1e-12) {
                    best_area = a;
                    best = c;
                }
            }
        }
        half /= 4.0;
    }
    Ok(best)
}

/// Zonotope with one generator per pair of opposite edges.
pub fn symmetric_polygon_to_zonotope(s: &SymmetricPolygon) -> Result<Zonotope> {
    let v = &s.vertices;
    let k = v.len();
    if k < 4 || k % 2 == 1 {
        return Err(Error::AsymmetryTooLarge(f64::INFINITY));
    }
    let m = k / 2;
    let scale = 1.0 + v.iter().map(|p| p[0].abs().max(p[1].abs())).fold(0.0, f64::max);
    let dev = (0..m)
        .map(|i| {
            let (a, b) = (v[i], v[i + m]);
            (a[0] + b[0] - 2.0 * s.center[0]).hypot(a[1] + b[1] - 2.0 * s.center[1])
        })
        .fold(0.0, f64::max);
    if dev > 1e-8 * scale {
        return Err(Error::AsymmetryTooLarge(dev));
    }
    let rows: Vec<Vec<f64>> = (0..m).map(|i| vec![v[i + 1][0] - v[i][0], v[i + 1][1] - v[i][1]]).collect();
    let sum = rows.iter().fold([0.0, 0.0], |acc, g| [acc[0] + g[0], acc[1] + g[1]]);
    Zonotope::from_rows(&rows, &[s.center[0] - 0.5 * sum[0], s.center[1] - 0.5 * sum[1]])
}

/// Keep the `n` longest generators or pad with short random ones, holding
/// the center fixed.
pub fn adapt_rank(z: &Zonotope, n: usize, rng: &mut ChaCha8Rng) -> Result<Zonotope> {
    let d = z.dim();
    if n < d {
        return Err(Error::DegenerateInput(format!("rank {n} below dimension {d}")));
    }
    let center = z.center();
    let mut rows = z.generator_rows();
    if rows.len() > n {
        let mut idx: Vec<usize> = (0..rows.len()).collect();
        let len = |r: &Vec<f64>| r.iter().map(|x| x * x).sum::<f64>();
        idx.sort_by(|&a, &b| len(&rows[b]).total_cmp(&len(&rows[a])).then(a.cmp(&b)));
        idx.truncate(n);
        idx.sort();
        rows = idx.into_iter().map(|i| rows[i].clone()).collect();
    } else {
        let short = 0.01 * z.max_generator_norm().max(1e-12) * z.rank() as f64;
        while rows.len() < n {
            rows.push(random_direction(d, rng).iter().map(|x| x * short).collect());
        }
    }
    recentre(&rows, &center)
}

fn recentre(rows: &[Vec<f64>], center: &DVector<f64>) -> Result<Zonotope> {
    let d = center.len();
    let mu: Vec<f64> = (0..d).map(|j| center[j] - 0.5 * rows.iter().map(|r| r[j]).sum::<f64>()).collect();
    Zonotope::from_rows(rows, &mu)
}

fn random_direction(d: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

fn ensure_general_position(z: Zonotope, rng: &mut ChaCha8Rng) -> Result<Zonotope> {
    let mut cur = z;
    let sigma = 1e-6 * cur.max_generator_norm().max(1e-12);
    for _ in 0..50 {
        if cur.is_general_position(1e-10) {
            return Ok(cur);
        }
        let p = cur.to_params();
        let noise = DVector::from_fn(p.len(), |_, _| rng.gen_range(-sigma..=sigma));
        cur = Zonotope::from_params(cur.rank(), cur.dim(), &(p + noise))?;
    }
    Err(Error::DegenerateInput("could not reach general position".into()))
}

/// Planar warmstart: best-center symmetric envelope, reduced to rank `n`.
pub fn warmstart_2d(p: &Polytope, n: usize, depth: usize, rng: &mut ChaCha8Rng) -> Result<Zonotope> {
    let c = choose_center_2d(p, depth)?;
    let s = envelope_2d(p, c)?;
    let z = symmetric_polygon_to_zonotope(&s)?;
    ensure_general_position(adapt_rank(&z, n, rng)?, rng)
}

/// Bounding box of the vertices in their principal frame, padded with short
/// random generators up to rank `n`.
pub fn warmstart_generic(p: &Polytope, n: usize, rng: &mut ChaCha8Rng) -> Result<Zonotope> {
    let d = p.dim();
    if n < d {
        return Err(Error::DegenerateInput(format!("rank {n} below dimension {d}")));
    }
    let c = p.barycenter();
    let k = p.vertices().len();
    let centred = DMatrix::from_fn(d, k, |r, col| p.vertices()[col][r] - c[r]);
    let cov = &centred * centred.transpose() / k as f64;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let mut rows = Vec::new();
    let mut mu = c.clone();
    let mut spread = 0.0f64;
    for &a in &order {
        let u = eig.eigenvectors.column(a).into_owned();
        let proj: Vec<f64> = p.vertices().iter().map(|v| u.dot(&(v - &c))).collect();
        let lo = proj.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = proj.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(hi - lo > 0.0) {
            return Err(Error::DegenerateInput("vertices have no spread along a principal axis".into()));
        }
        spread = spread.max(hi - lo);
        mu += &u * lo;
        rows.push((&u * (hi - lo)).iter().copied().collect::<Vec<f64>>());
    }
    let short = 0.05 * spread;
    while rows.len() < n {
        let g = random_direction(d, rng) * short;
        mu -= &g * 0.5;
        rows.push(g.iter().copied().collect());
    }
    let z = Zonotope::from_rows(&rows, mu.as_slice())?;
    ensure_general_position(z, rng)
}

/// Planar polygons get [`warmstart_2d`] with three refinement levels,
/// everything else [`warmstart_generic`].
pub fn warmstart(p: &Polytope, n: usize, rng: &mut ChaCha8Rng) -> Result<Zonotope> {
    if p.dim() == 2 {
        warmstart_2d(p, n, 3, rng)
    } else {
        warmstart_generic(p, n, rng)
    }
}

/// Random rank-`n` zonotope centred on the vertex barycenter with generator
/// lengths around `diam(P) / n`.
pub fn random_init(p: &Polytope, n: usize, rng: &mut ChaCha8Rng) -> Result<Zonotope> {
    let d = p.dim();
    if n < d {
        return Err(Error::DegenerateInput(format!("rank {n} below dimension {d}")));
    }
    let base = p.diameter() / n as f64;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (random_direction(d, rng) * (base * rng.gen_range(0.5..1.5))).iter().copied().collect())
        .collect();
    ensure_general_position(recentre(&rows, &p.barycenter())?, rng)
}
