//! Chebyshev center of a polyhedron and the cone interior test, both as LPs.

use nalgebra::DVector;

use super::lp::{solve_lp, Goal, LinearProgram, LpOutcome, Sense};
use super::SolverConfig;
use crate::error::{Error, Result};

/// `⟨a, x⟩ ≤ b`
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub a: DVector<f64>,
    pub b: f64,
}

/// Center and radius of the largest ball inside `∩ {⟨a_i, x⟩ ≤ b_i}`.
pub fn chebyshev_center(halfspaces: &[Halfspace], cfg: &SolverConfig) -> Result<(DVector<f64>, f64)> {
    let Some(first) = halfspaces.first() else {
        return Err(Error::UnboundedRegion);
    };
    let dim = first.a.len();
    let mut obj = vec![0.0; dim + 1];
    obj[dim] = 1.0;
    let mut lp = LinearProgram::new(Goal::Maximize, obj);
    for j in 0..dim {
        lp.free(j);
    }
    for h in halfspaces {
        if h.a.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: h.a.len() });
        }
        let mut row: Vec<f64> = h.a.iter().copied().collect();
        row.push(h.a.norm());
        lp.constrain(row, Sense::Le, h.b);
    }
    match solve_lp(&lp, cfg)? {
        LpOutcome::Optimal(s) => {
            let c = DVector::from_column_slice(&s.x[..dim]);
            Ok((c, s.x[dim]))
        }
        LpOutcome::Infeasible => Err(Error::InfeasibleRegion),
        LpOutcome::Unbounded => Err(Error::UnboundedRegion),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConeInterior {
    /// `x` in the box with every normalised row satisfying `⟨a_i, x⟩ ≥ margin`.
    Interior {
        x: DVector<f64>,
        margin: f64,
    },
    EmptyInterior {
        t: f64,
    },
}

/// Solve `max t  s.t.  A x ≥ t·1,  −1 ≤ x ≤ 1` with the rows of `A` scaled to
/// unit length, and report `Interior` when `t* > margin_tol`.
///
/// Zero rows are dropped. An empty matrix is all of space.
pub fn cone_interior_point(
    rows: &[DVector<f64>],
    dim: usize,
    margin_tol: f64,
    cfg: &SolverConfig,
) -> Result<ConeInterior> {
    let unit: Vec<DVector<f64>> = rows.iter().filter(|r| r.norm() > 0.0).map(|r| r / r.norm()).collect();
    if unit.len() < rows.len() {
        // A zero functional never admits a strictly positive value.
        return Ok(ConeInterior::EmptyInterior { t: 0.0 });
    }
    if unit.is_empty() {
        return Ok(ConeInterior::Interior { x: DVector::zeros(dim), margin: f64::INFINITY });
    }
    let mut obj = vec![0.0; dim + 1];
    obj[dim] = 1.0;
    let mut lp = LinearProgram::new(Goal::Maximize, obj);
    for j in 0..dim {
        lp.bound(j, -1.0, 1.0);
    }
    lp.free(dim);
    for r in &unit {
        if r.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: r.len() });
        }
        let mut row: Vec<f64> = r.iter().copied().collect();
        row.push(-1.0);
        lp.constrain(row, Sense::Ge, 0.0);
    }
    let s = solve_lp(&lp, cfg)?
        .optimal()
        .ok_or_else(|| Error::LpNumericalFailure("cone interior LP is always feasible and bounded".into()))?;
    let t = s.x[dim];
    if t > margin_tol {
        Ok(ConeInterior::Interior { x: DVector::from_column_slice(&s.x[..dim]), margin: t })
    } else {
        Ok(ConeInterior::EmptyInterior { t })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hs(a: &[f64], b: f64) -> Halfspace {
        Halfspace { a: DVector::from_column_slice(a), b }
    }

    #[test]
    fn square_center() {
        let h = [hs(&[1.0, 0.0], 1.0), hs(&[-1.0, 0.0], 1.0), hs(&[0.0, 1.0], 1.0), hs(&[0.0, -1.0], 1.0)];
        let (c, r) = chebyshev_center(&h, &SolverConfig::default()).unwrap();
        assert!(c.norm() < 1e-12);
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn triangle_incenter() {
        let h = [hs(&[-1.0, 0.0], 0.0), hs(&[0.0, -1.0], 0.0), hs(&[1.0, 1.0], 2.0)];
        let (c, r) = chebyshev_center(&h, &SolverConfig::default()).unwrap();
        // incenter = (a·A + b·B + c·C)/(a+b+c) for the right triangle with legs 2
        let s = 2.0 + 2.0 + 8f64.sqrt();
        let inr = 2.0 * 2.0 / s;
        assert!((r - inr).abs() < 1e-12);
        assert!((c[0] - inr).abs() < 1e-12 && (c[1] - inr).abs() < 1e-12);
        assert!((inr - (2.0 - 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn single_halfspace_is_unbounded() {
        assert_eq!(chebyshev_center(&[hs(&[1.0, 0.0], 1.0)], &SolverConfig::default()), Err(Error::UnboundedRegion));
    }

    #[test]
    fn empty_region() {
        let h = [hs(&[1.0], -1.0), hs(&[-1.0], -1.0)];
        assert_eq!(chebyshev_center(&h, &SolverConfig::default()), Err(Error::InfeasibleRegion));
    }

    #[test]
    fn orthant_and_opposing_rows() {
        let cfg = SolverConfig::default();
        let e = |a: &[f64]| DVector::from_column_slice(a);
        match cone_interior_point(&[e(&[1.0, 0.0]), e(&[0.0, 1.0])], 2, 1e-8, &cfg).unwrap() {
            ConeInterior::Interior { margin, .. } => assert!((margin - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            cone_interior_point(&[e(&[1.0, 0.0]), e(&[-1.0, 0.0])], 2, 1e-8, &cfg).unwrap(),
            ConeInterior::EmptyInterior { .. }
        ));
    }
}
