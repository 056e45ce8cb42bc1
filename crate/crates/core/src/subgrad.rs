//! Gradients of the smooth terms with respect to the zonotope parameters.
//!
//! Parameter vectors use the layout of [`Zonotope::to_params`]: entry
//! `i*d + j` is `g_ij`, entry `n*d + j` is `μ_j`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geom::{bits_to_vector, Polytope, Zonotope};
use crate::hausdorff::{all_pairs, locality_from_pairs, select_active, AchievingPair, SmoothTerm};
use crate::linalg::{cofactor_normal, det, lstsq};
use crate::tol::Settings;

pub type ParamVector = DVector<f64>;

/// `w ⊗ (x, 1)`: the functional `(ΔQ, Δμ) ↦ ⟨ΔQᵀx + Δμ, w⟩`.
pub fn pair_functional(w: &DVector<f64>, x: &DVector<f64>) -> ParamVector {
    let (n, d) = (x.len(), w.len());
    DVector::from_fn(n * d + d, |k, _| if k < n * d { x[k / d] * w[k % d] } else { w[k - n * d] })
}

/// Unit normal to the span of the generators in `free` (`d − 1` of them),
/// signed so that `⟨η, p − v⟩ > 0`.
pub fn facet_normal(z: &Zonotope, free: &[usize], p: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
    let d = z.dim();
    if free.len() + 1 != d {
        return Err(Error::InvalidInput(format!("facet needs {} free generators, got {}", d - 1, free.len())));
    }
    let qf = z.generators().select_rows(free.iter());
    let eta = cofactor_normal(&qf);
    let gamma = eta.norm();
    let scale: f64 = free.iter().map(|&i| z.generators().row(i).norm()).product();
    if !(gamma > 1e-12 * scale) {
        return Err(Error::SingularSubmatrix(free.to_vec()));
    }
    let sigma = if eta.dot(&(p - v)) < 0.0 { -1.0 } else { 1.0 };
    Ok(eta * (sigma / gamma))
}

/// Gradient of a Z-vertex term `‖Σ_k (⟨η_k, Qᵀe + μ⟩ − c_k) η_k‖`.
pub fn grad_delta_q(term: &SmoothTerm, z: &Zonotope) -> Result<ParamVector> {
    let SmoothTerm::ZVertex { e, hull, .. } = term else {
        return Err(Error::InvalidInput("expected a Z-vertex term".into()));
    };
    if hull.codim() == 0 {
        return Err(Error::DegenerateFace);
    }
    let u = z.cubical_vertex(e);
    let mut r = DVector::zeros(u.len());
    for (eta, c) in hull.normals.iter().zip(&hull.offsets) {
        r.axpy(eta.dot(&u) - c, eta, 1.0);
    }
    let delta = r.norm();
    if delta == 0.0 {
        return Err(Error::DegenerateFace);
    }
    Ok(pair_functional(&(r / delta), &bits_to_vector(e)))
}

/// Derivative of the cofactor vector of `qf` (rows `(d−1)×d`) with respect
/// to entry `(r, j)`.
fn cofactor_derivative(qf: &DMatrix<f64>, r: usize, j: usize) -> DVector<f64> {
    let d = qf.ncols();
    DVector::from_fn(d, |jp, _| {
        if jp == j {
            return 0.0;
        }
        let m = qf.clone().remove_column(jp);
        let c = if j < jp { j } else { j - 1 };
        let minor = m.remove_row(r).remove_column(c);
        let cof = if (r + c).is_multiple_of(2) { 1.0 } else { -1.0 } * det(&minor);
        let sign = if (jp + 1) % 2 == 0 { 1.0 } else { -1.0 };
        sign * cof
    })
}

/// Gradient of a P-vertex term, the distance from `p` to the affine hull of
/// the Z-face through `anchor` spanned by the free generators.
pub fn grad_delta_p(term: &SmoothTerm, z: &Zonotope) -> Result<ParamVector> {
    let SmoothTerm::PVertex { anchor, .. } = term else {
        return Err(Error::InvalidInput("expected a P-vertex term".into()));
    };
    grad_delta_p_with_anchor(term, z, anchor)
}

/// As [`grad_delta_p`] but with any cube vertex of the face as anchor; the
/// free entries of `anchor` may be 0 or 1.
pub fn grad_delta_p_with_anchor(term: &SmoothTerm, z: &Zonotope, anchor: &[bool]) -> Result<ParamVector> {
    let SmoothTerm::PVertex { p, free, .. } = term else {
        return Err(Error::InvalidInput("expected a P-vertex term".into()));
    };
    let (n, d) = (z.rank(), z.dim());
    let hull = term.zonotope_face_hull(z).expect("P-vertex term");
    if hull.codim() == 0 {
        return Err(Error::DegenerateFace);
    }
    let v = z.cubical_vertex(anchor);
    let a = bits_to_vector(anchor);

    if free.len() + 1 == d {
        let eta = facet_normal(z, free, p, &v)?;
        let qf = z.generators().select_rows(free.iter());
        let raw = cofactor_normal(&qf);
        let gamma = raw.norm();
        let sigma = if raw.dot(&eta) < 0.0 { -1.0 } else { 1.0 };
        let pv = p - &v;
        let mut g = DVector::zeros(n * d + d);
        for i in 0..n {
            for j in 0..d {
                let mut val = -eta[j] * a[i];
                if let Some(r) = free.iter().position(|&f| f == i) {
                    let dr = cofactor_derivative(&qf, r, j);
                    let deta = (&dr / gamma - &raw * (raw.dot(&dr) / gamma.powi(3))) * sigma;
                    val += deta.dot(&pv);
                }
                g[i * d + j] = val;
            }
        }
        for j in 0..d {
            g[n * d + j] = -eta[j];
        }
        return Ok(g);
    }

    // Higher codimension: the derivative of the distance equals the
    // derivative of ‖p − (Qᵀy + μ)‖ with the affine coordinates y of the
    // foot point held fixed.
    let mut r = DVector::zeros(d);
    for (eta, c) in hull.normals.iter().zip(&hull.offsets) {
        r.axpy(eta.dot(p) - c, eta, 1.0);
    }
    let delta = r.norm();
    if delta == 0.0 {
        return Err(Error::DegenerateFace);
    }
    let foot = p - &r;
    let mut y = a.clone();
    if !free.is_empty() {
        let gf = z.generators().select_rows(free.iter()).transpose();
        let c = lstsq(&gf, &(foot - &v));
        for (k, &i) in free.iter().enumerate() {
            y[i] += c[k];
        }
    }
    Ok(-pair_functional(&(r / delta), &y))
}

/// Gradient of any smooth term.
pub fn term_gradient(term: &SmoothTerm, z: &Zonotope) -> Result<ParamVector> {
    match term {
        SmoothTerm::PVertex { .. } => grad_delta_p(term, z),
        SmoothTerm::ZVertex { .. } => grad_delta_q(term, z),
    }
}

/// Central differences of `term.value` in every parameter.
pub fn finite_difference_gradient(term: &SmoothTerm, z: &Zonotope, h: f64) -> ParamVector {
    let (n, d) = (z.rank(), z.dim());
    let base = z.to_params();
    DVector::from_fn(base.len(), |k, _| {
        let mut plus = base.clone();
        let mut minus = base.clone();
        plus[k] += h;
        minus[k] -= h;
        let zp = Zonotope::from_params(n, d, &plus).expect("finite params");
        let zm = Zonotope::from_params(n, d, &minus).expect("finite params");
        (term.value(&zp) - term.value(&zm)) / (2.0 * h)
    })
}

/// Generators of the Clarke subdifferential, one per active pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SubdifferentialSet {
    pub gradients: Vec<ParamVector>,
    pub pairs: Vec<AchievingPair>,
}

/// Gradients of the smooth terms behind `pairs` (assumed active and local).
pub fn subdifferential_from_pairs(pairs: &[AchievingPair], z: &Zonotope) -> Result<SubdifferentialSet> {
    let gradients = pairs.iter().map(|p| term_gradient(&SmoothTerm::from_pair(p), z)).collect::<Result<Vec<_>>>()?;
    Ok(SubdifferentialSet { gradients, pairs: pairs.to_vec() })
}

/// Clarke subdifferential of `d_P` at `z`.
pub fn clarke_subdifferential(poly: &Polytope, z: &Zonotope, s: &Settings) -> Result<SubdifferentialSet> {
    let pairs = all_pairs(poly, z, s)?;
    let rep = locality_from_pairs(poly, z, &pairs, s);
    if !rep.holds() {
        return Err(Error::LocalityViolation(rep.summary()));
    }
    subdifferential_from_pairs(&select_active(pairs, s.tol.active).pairs, z)
}

/// Subdifferential of the coarse distance: `∇‖p − Qᵀe − μ‖ = −n̂ ⊗ (e, 1)`.
pub fn coarse_subdifferential(pairs: &[AchievingPair]) -> Result<SubdifferentialSet> {
    let gradients = pairs
        .iter()
        .map(|pair| {
            let w = &pair.p - &pair.q;
            let nrm = w.norm();
            if nrm == 0.0 {
                return Err(Error::DegenerateFace);
            }
            Ok(-pair_functional(&(w / nrm), &pair.lift.x))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SubdifferentialSet { gradients, pairs: pairs.to_vec() })
}
