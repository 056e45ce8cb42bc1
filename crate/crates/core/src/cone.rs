//! Feasibility cone of parameter perturbations and the descent direction
//! taken from it.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Polytope;
use crate::hausdorff::{AchievingPair, PairSide};
use crate::linalg::orthonormal_basis;
use crate::solvers::{chebyshev_center, cone_interior_point, ConeInterior, Halfspace};
use crate::subgrad::{pair_functional, ParamVector, SubdifferentialSet};
use crate::tol::Settings;

/// `{ x : A x ≥ 0 }` with one row `(p_i − q_i) ⊗ (x_i, 1)` per achieving pair.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityCone {
    pub rows: Vec<ParamVector>,
    pub pairs: Vec<AchievingPair>,
}

pub fn build_cone(pairs: &[AchievingPair]) -> FeasibilityCone {
    let rows = pairs.iter().map(|p| pair_functional(&(&p.p - &p.q), &p.lift.x)).collect();
    FeasibilityCone { rows, pairs: pairs.to_vec() }
}

impl FeasibilityCone {
    pub fn matrix(&self) -> DMatrix<f64> {
        let cols = self.rows.first().map_or(0, |r| r.len());
        DMatrix::from_fn(self.rows.len(), cols, |i, j| self.rows[i][j])
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.rows.len(), self.rows.iter().map(|r| r.dot(x)))
    }

    pub fn interior(&self, dim: usize, s: &Settings) -> Result<ConeInterior> {
        cone_interior_point(&self.rows, dim, s.tol.cone_margin, &s.solver)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    #[default]
    Exact,
    Coarse,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConeStatus {
    Descent { direction: ParamVector, taus: Vec<f64> },
    FeasibleEmpty,
    ConeEmptyInterior,
}

impl ConeStatus {
    pub fn label(&self) -> &'static str {
        match self {
            ConeStatus::Descent { .. } => "descent",
            ConeStatus::FeasibleEmpty => "feasible_empty",
            ConeStatus::ConeEmptyInterior => "cone_empty_interior",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    CertifiedLocalMinOfCoarse,
    CertifiedLocalMin,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionResult {
    pub status: ConeStatus,
    pub certificate: Certificate,
    /// Optimal `t*` of the interior LP on unit-normalised rows.
    pub interior_margin: f64,
}

/// Every `q_i` is a vertex of Z: its lift has no free coordinate.
fn all_q_vertices(pairs: &[AchievingPair]) -> bool {
    pairs.iter().all(|p| p.side == PairSide::ZVertex || p.lift.free.is_empty())
}

fn unit_rows(cone: &FeasibilityCone) -> Vec<DVector<f64>> {
    cone.rows.iter().map(|r| r / r.norm().max(1e-300)).collect()
}

fn strictly_inside(rows: &[DVector<f64>], x: &DVector<f64>, margin: f64) -> bool {
    rows.iter().all(|r| r.dot(x) > margin)
}

/// Chebyshev center of `{ y ∈ conv(points) : ⟨a_i, y⟩ ≥ 0 }` taken inside the
/// affine span of the points. `None` if that set has no point strictly
/// inside the cone.
fn center_in_hull(
    points: &[DVector<f64>],
    rows: &[DVector<f64>],
    margin: f64,
    s: &Settings,
) -> Result<Option<DVector<f64>>> {
    let base = points[0].clone();
    let dirs: Vec<DVector<f64>> = points[1..].iter().map(|p| p - &base).collect();
    let basis = orthonormal_basis(&dirs, 1e-10);
    let m = basis.len();
    if m == 0 {
        return Ok(strictly_inside(rows, &base, margin).then_some(base));
    }
    let coords: Vec<DVector<f64>> =
        points.iter().map(|p| DVector::from_iterator(m, basis.iter().map(|u| u.dot(&(p - &base))))).collect();
    let hull = Polytope::new(coords)?;
    let mut hs: Vec<Halfspace> = hull.facets().iter().map(|f| Halfspace { a: f.normal.clone(), b: f.offset }).collect();
    for r in rows {
        // ⟨r, base + U s⟩ ≥ 0  ⇔  −⟨Uᵀr, s⟩ ≤ ⟨r, base⟩
        let a = DVector::from_iterator(m, basis.iter().map(|u| -u.dot(r)));
        hs.push(Halfspace { a, b: r.dot(&base) });
    }
    let (c, _) = match chebyshev_center(&hs, &s.solver) {
        Ok(v) => v,
        Err(Error::InfeasibleRegion) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut y = base;
    for (k, u) in basis.iter().enumerate() {
        y.axpy(c[k], u, 1.0);
    }
    Ok(strictly_inside(rows, &y, margin).then_some(y))
}

/// Descent direction from the cone and the subdifferential.
///
/// The direction lies in the cone interior and in the convex hull of the
/// negated gradients. With `fallback`, an empty intersection falls back to
/// the Chebyshev center of the cone cut to the unit box.
pub fn descent_direction(
    cone: &FeasibilityCone,
    subdiff: &SubdifferentialSet,
    objective: Objective,
    dim: usize,
    fallback: bool,
    s: &Settings,
) -> Result<DirectionResult> {
    let interior = cone.interior(dim, s)?;
    let margin_t = match &interior {
        ConeInterior::Interior { margin, .. } => *margin,
        ConeInterior::EmptyInterior { t } => *t,
    };
    if let ConeInterior::EmptyInterior { .. } = interior {
        let certificate = match objective {
            Objective::Coarse => Certificate::CertifiedLocalMinOfCoarse,
            Objective::Exact if all_q_vertices(&cone.pairs) => Certificate::CertifiedLocalMin,
            Objective::Exact => Certificate::Heuristic,
        };
        return Ok(DirectionResult { status: ConeStatus::ConeEmptyInterior, certificate, interior_margin: margin_t });
    }
    let rows = unit_rows(cone);
    let neg: Vec<DVector<f64>> = subdiff.gradients.iter().map(|g| -g).collect();
    let mut dir = if neg.is_empty() { None } else { center_in_hull(&neg, &rows, s.tol.cone_margin, s)? };
    if dir.is_none() && fallback {
        let mut hs: Vec<Halfspace> = rows.iter().map(|r| Halfspace { a: -r, b: -s.tol.cone_margin }).collect();
        for j in 0..dim {
            let mut e = DVector::zeros(dim);
            e[j] = 1.0;
            hs.push(Halfspace { a: e.clone(), b: 1.0 });
            hs.push(Halfspace { a: -e, b: 1.0 });
        }
        if let Ok((c, _)) = chebyshev_center(&hs, &s.solver) {
            if strictly_inside(&rows, &c, s.tol.cone_margin) {
                dir = Some(c);
            }
        }
    }
    let status = match dir {
        Some(direction) => {
            let taus = tau_limits(&cone.pairs, &direction)?;
            ConeStatus::Descent { direction, taus }
        }
        None => ConeStatus::FeasibleEmpty,
    };
    Ok(DirectionResult { status, certificate: Certificate::Heuristic, interior_margin: margin_t })
}

/// Largest steps `τ_i = 2⟨Δ_i, p_i − q_i⟩ / ‖Δ_i‖²` with `Δ_i = ΔQᵀx_i + Δμ`
/// before pair `i` stops improving.
pub fn tau_limits(pairs: &[AchievingPair], direction: &ParamVector) -> Result<Vec<f64>> {
    pairs
        .iter()
        .enumerate()
        .map(|(i, pair)| {
            let n = pair.lift.x.len();
            let d = pair.p.len();
            let mut delta = DVector::from_fn(d, |j, _| direction[n * d + j]);
            for k in 0..n {
                for j in 0..d {
                    delta[j] += pair.lift.x[k] * direction[k * d + j];
                }
            }
            let num = delta.dot(&(&pair.p - &pair.q));
            if !(num > 0.0) {
                return Err(Error::NonImprovingRow(i));
            }
            Ok(2.0 * num / delta.norm_squared())
        })
        .collect()
}
