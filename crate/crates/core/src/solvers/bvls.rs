//! Box-constrained least squares, `min ‖A x − b‖` over `0 ≤ x ≤ 1`.
//!
//! Active-set method in the style of Stark and Parker. The free-set
//! subproblem takes the minimum-norm correction `pinv(A_F) r`, so a freed
//! variable always moves into the box and the objective never increases.

use nalgebra::{DMatrix, DVector};

use super::SolverConfig;
use crate::error::{Error, Result};
use crate::linalg::lstsq;

#[derive(Debug, Clone, PartialEq)]
pub struct QpResult {
    pub x: DVector<f64>,
    /// `‖A x − b‖`
    pub value: f64,
    /// Indices strictly between the bounds.
    pub free: Vec<usize>,
    pub kkt_residual: f64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Lower,
    Upper,
    Free,
}

fn kkt(w: &DVector<f64>, state: &[State]) -> f64 {
    state
        .iter()
        .enumerate()
        .map(|(i, s)| match s {
            State::Free => w[i].abs(),
            State::Lower => w[i].max(0.0),
            State::Upper => (-w[i]).max(0.0),
        })
        .fold(0.0, f64::max)
}

/// Solve `min ‖A x − b‖₂` subject to `0 ≤ x ≤ 1`.
///
/// Ties between equally violated bounds go to the lowest index.
pub fn bounded_least_squares(a: &DMatrix<f64>, b: &DVector<f64>, cfg: &SolverConfig) -> Result<QpResult> {
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: b.len() });
    }
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1e-300);
    let bscale = b.amax() + scale;
    let tol = cfg.kkt * scale * bscale;

    let mut x = DVector::zeros(n);
    let mut state = vec![State::Lower; n];
    let cap = cfg.cap(n + m) * 4;
    let mut iters = 0;

    loop {
        let r = b - a * &x;
        let w = a.transpose() * &r;
        let mut best: Option<(usize, f64)> = None;
        for i in 0..n {
            let v = match state[i] {
                State::Lower => w[i],
                State::Upper => -w[i],
                State::Free => continue,
            };
            if v > tol && best.is_none_or(|(_, bv)| v > bv) {
                best = Some((i, v));
            }
        }
        let Some((enter, _)) = best else {
            break;
        };
        state[enter] = State::Free;

        // Inner loop: move to the least-squares point on the free set,
        // dropping variables that reach a bound on the way.
        loop {
            iters += 1;
            if iters > cap {
                return Err(Error::IterationLimit(cap));
            }
            let free: Vec<usize> = (0..n).filter(|&i| state[i] == State::Free).collect();
            if free.is_empty() {
                break;
            }
            let r = b - a * &x;
            let af = a.select_columns(free.iter());
            let delta = lstsq(&af, &r);
            let mut alpha = 1.0f64;
            for (k, &i) in free.iter().enumerate() {
                let d = delta[k];
                let lim = if d > 0.0 {
                    (1.0 - x[i]) / d
                } else if d < 0.0 {
                    -x[i] / d
                } else {
                    f64::INFINITY
                };
                alpha = alpha.min(lim.max(0.0));
            }
            for (k, &i) in free.iter().enumerate() {
                x[i] += alpha * delta[k];
            }
            if alpha >= 1.0 {
                for &i in &free {
                    x[i] = x[i].clamp(0.0, 1.0);
                }
                break;
            }
            let mut hit = false;
            for (k, &i) in free.iter().enumerate() {
                let d = delta[k];
                if d > 0.0 && x[i] >= 1.0 - 1e-14 {
                    x[i] = 1.0;
                    state[i] = State::Upper;
                    hit = true;
                } else if d < 0.0 && x[i] <= 1e-14 {
                    x[i] = 0.0;
                    state[i] = State::Lower;
                    hit = true;
                }
            }
            if !hit {
                // alpha was limited by a bound that rounding placed a hair
                // inside; pin the tightest one.
                let (k, i) = free
                    .iter()
                    .enumerate()
                    .min_by(|(ka, &ia), (kb, &ib)| {
                        let da = delta[*ka];
                        let db = delta[*kb];
                        let la = if da > 0.0 { 1.0 - x[ia] } else { x[ia] };
                        let lb = if db > 0.0 { 1.0 - x[ib] } else { x[ib] };
                        la.partial_cmp(&lb).unwrap()
                    })
                    .map(|(k, &i)| (k, i))
                    .unwrap();
                if delta[k] > 0.0 {
                    x[i] = 1.0;
                    state[i] = State::Upper;
                } else {
                    x[i] = 0.0;
                    state[i] = State::Lower;
                }
            }
        }
    }

    let r = b - a * &x;
    let w = a.transpose() * &r;
    let free = (0..n).filter(|&i| state[i] == State::Free).collect();
    Ok(QpResult { value: r.norm(), kkt_residual: kkt(&w, &state) / bscale.max(1.0), free, x })
}
