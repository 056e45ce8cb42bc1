#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zonofit::geom::hull2d::convex_hull_2d;
use zonofit::geom::{Polytope, Zonotope};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn v(a: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(a)
}

/// Hull of `m` points scattered in an annulus around the origin.
pub fn random_polygon(rng: &mut ChaCha8Rng, m: usize) -> Polytope {
    loop {
        let pts: Vec<DVector<f64>> = (0..m)
            .map(|_| {
                let a = rng.gen_range(0.0..2.0 * PI);
                let r = rng.gen_range(0.5..1.0);
                v(&[r * a.cos(), r * a.sin()])
            })
            .collect();
        if let Ok(p) = Polytope::new(pts) {
            if p.vertices().len() >= 3 {
                return p;
            }
        }
    }
}

/// Hull of `m` Gaussian points in R^d.
pub fn random_polytope(rng: &mut ChaCha8Rng, d: usize, m: usize) -> Polytope {
    if d == 2 {
        return random_polygon(rng, m);
    }
    loop {
        let pts: Vec<DVector<f64>> = (0..m).map(|_| gaussian(rng, d)).collect();
        if let Ok(p) = Polytope::new(pts) {
            return p;
        }
    }
}

pub fn gaussian(rng: &mut ChaCha8Rng, d: usize) -> DVector<f64> {
    DVector::from_fn(d, |_, _| {
        let (u, w): (f64, f64) = (rng.gen_range(1e-12..1.0), rng.gen());
        (-2.0 * u.ln()).sqrt() * (2.0 * PI * w).cos()
    })
}

/// Random zonotope whose generators have Gaussian entries.
pub fn random_zonotope(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Zonotope {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| gaussian(rng, d).iter().copied().collect()).collect();
    let mu: Vec<f64> = gaussian(rng, d).iter().copied().collect();
    Zonotope::from_rows(&rows, &mu).unwrap()
}

/// Planar zonotope with generator angles spread over a half turn, so that
/// it is in general position with a comfortable margin.
pub fn random_zonotope_2d(rng: &mut ChaCha8Rng, n: usize) -> Zonotope {
    let slot = PI / n as f64;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let a = slot * (i as f64 + rng.gen_range(0.15..0.85));
            let len = rng.gen_range(0.3..1.0);
            vec![len * a.cos(), len * a.sin()]
        })
        .collect();
    Zonotope::from_rows(&rows, &[rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)]).unwrap()
}

/// Boundary polygon of a planar zonotope, counter-clockwise.
pub fn zonotope_polygon(z: &Zonotope) -> Vec<[f64; 2]> {
    let n = z.rank();
    let pts: Vec<[f64; 2]> = (0..1usize << n)
        .map(|mask| {
            let e: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let q = z.cubical_vertex(&e);
            [q[0], q[1]]
        })
        .collect();
    convex_hull_2d(&pts, 1e-12)
}

pub fn polygon_of(p: &Polytope) -> Vec<[f64; 2]> {
    let pts: Vec<[f64; 2]> = p.vertices().iter().map(|x| [x[0], x[1]]).collect();
    convex_hull_2d(&pts, 1e-12)
}

pub fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len();
    if m % 2 == 1 {
        xs[m / 2]
    } else {
        0.5 * (xs[m / 2 - 1] + xs[m / 2])
    }
}
