//! Wolfe's minimum-norm-point algorithm: project `p` onto `conv(points)`.

use nalgebra::DVector;

use super::SolverConfig;
use crate::error::{Error, Result};
use crate::linalg::lstsq;

#[derive(Debug, Clone, PartialEq)]
pub struct MinNormResult {
    /// Convex weights over the input points.
    pub lambda: Vec<f64>,
    pub point: DVector<f64>,
    pub dist: f64,
    /// `max_k (‖x‖² − ⟨x, y_k⟩)⁺` with `y_k = v_k − p`, relative to the squared spread.
    pub kkt_residual: f64,
}

/// Affine minimum-norm combination of `ys[s]`, weights summing to one.
fn affine_min_norm(ys: &[DVector<f64>], s: &[usize]) -> Vec<f64> {
    if s.len() == 1 {
        return vec![1.0];
    }
    let y0 = &ys[s[0]];
    let dim = y0.len();
    let d = nalgebra::DMatrix::from_fn(dim, s.len() - 1, |r, c| ys[s[c + 1]][r] - y0[r]);
    let beta = lstsq(&d, &(-y0));
    let mut w = Vec::with_capacity(s.len());
    w.push(1.0 - beta.sum());
    w.extend(beta.iter());
    w
}

/// Closest point of `conv(points)` to `p`.
pub fn min_norm_point(points: &[DVector<f64>], p: &DVector<f64>, cfg: &SolverConfig) -> Result<MinNormResult> {
    if points.is_empty() {
        return Err(Error::InvalidInput("empty point set".into()));
    }
    for v in points {
        if v.len() != p.len() {
            return Err(Error::DimensionMismatch { expected: p.len(), found: v.len() });
        }
    }
    let ys: Vec<DVector<f64>> = points.iter().map(|v| v - p).collect();
    let big = ys.iter().map(|y| y.norm_squared()).fold(0.0, f64::max).max(1e-300);
    let eps = 1e-13 * big;

    let mut k0 = 0;
    for (k, y) in ys.iter().enumerate() {
        if y.norm_squared() < ys[k0].norm_squared() {
            k0 = k;
        }
    }
    let mut s = vec![k0];
    let mut lam = vec![1.0];
    let mut x = ys[k0].clone();
    let cap = cfg.cap(points.len() + p.len()) * 4;
    let mut iters = 0;

    loop {
        let xx = x.norm_squared();
        if xx <= eps {
            break;
        }
        let (j, xy) = ys.iter().enumerate().map(|(k, y)| (k, x.dot(y))).fold((usize::MAX, f64::INFINITY), |acc, c| {
            if c.1 < acc.1 {
                c
            } else {
                acc
            }
        });
        if xy >= xx - eps || s.contains(&j) {
            break;
        }
        s.push(j);
        lam.push(0.0);

        loop {
            iters += 1;
            if iters > cap {
                return Err(Error::IterationLimit(cap));
            }
            let alpha = affine_min_norm(&ys, &s);
            if alpha.iter().all(|&a| a > 1e-15) {
                lam = alpha;
                break;
            }
            let mut theta = 1.0f64;
            for (l, a) in lam.iter().zip(&alpha) {
                if *a <= 1e-15 && l - a > 0.0 {
                    theta = theta.min(l / (l - a));
                }
            }
            for (l, a) in lam.iter_mut().zip(&alpha) {
                *l += theta * (a - *l);
            }
            let mut keep = Vec::new();
            let mut kl = Vec::new();
            for (&idx, &l) in s.iter().zip(&lam) {
                if l > 1e-15 {
                    keep.push(idx);
                    kl.push(l);
                }
            }
            if keep.is_empty() {
                // Rounding removed everything; fall back to the best single point.
                keep.push(s[0]);
                kl.push(1.0);
            }
            let tot: f64 = kl.iter().sum();
            s = keep;
            lam = kl.into_iter().map(|l| l / tot).collect();
        }
        x = s.iter().zip(&lam).fold(DVector::zeros(p.len()), |acc, (&k, &l)| acc + &ys[k] * l);
    }

    let mut lambda = vec![0.0; points.len()];
    for (&k, &l) in s.iter().zip(&lam) {
        lambda[k] += l;
    }
    let xx = x.norm_squared();
    let kkt = ys.iter().map(|y| (xx - x.dot(y)).max(0.0)).fold(0.0, f64::max) / big;
    let point = &x + p;
    Ok(MinNormResult { lambda, dist: x.norm(), point, kkt_residual: kkt })
}
