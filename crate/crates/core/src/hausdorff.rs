//! Exact and coarse Hausdorff distance between a polytope and a zonotope,
//! achieving pairs, stability tests and the local smooth-term form.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{bits_to_vector, AffineHull, BitVector, FaceDescriptor, FaceKind, LiftPoint, Polytope, Zonotope};
use crate::solvers::{bounded_least_squares, min_norm_point, solve_lp, Goal, LinearProgram, LpOutcome, Sense};
use crate::tol::Settings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairSide {
    /// `p` is a vertex of P and `q = Π(p, Z)`.
    PVertex,
    /// `q` is a vertex of Z and `p = Π(q, P)`.
    ZVertex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AchievingPair {
    pub side: PairSide,
    /// Index into `P.vertices()` or into the zonotope vertex list.
    pub vertex: usize,
    pub p: DVector<f64>,
    pub q: DVector<f64>,
    /// Lift of `q` into the cube.
    pub lift: LiftPoint,
    /// `F_p` (a face of Z) for P-vertex pairs, `F_q` (a face of P) otherwise.
    pub face: FaceDescriptor,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceReport {
    pub value: f64,
    /// Pairs within the active band of `value`.
    pub pairs: Vec<AchievingPair>,
}

/// `‖Σ_k (⟨η_k, u⟩ − c_k) η_k‖`
pub fn dist_point_to_affine(u: &DVector<f64>, hull: &AffineHull) -> f64 {
    residual_to_affine(u, hull).norm()
}

fn residual_to_affine(u: &DVector<f64>, hull: &AffineHull) -> DVector<f64> {
    let mut r = DVector::zeros(u.len());
    for (eta, c) in hull.normals.iter().zip(&hull.offsets) {
        r.axpy(eta.dot(u) - c, eta, 1.0);
    }
    r
}

fn p_side_pair(z: &Zonotope, k: usize, p: &DVector<f64>, s: &Settings) -> Result<AchievingPair> {
    let sol = bounded_least_squares(&z.generators().transpose(), &(p - z.translation()), &s.solver)?;
    let lift = LiftPoint::new(sol.x, s.tol.lift);
    let q = z.point(&lift.x);
    let face = z.face_of_lift(&lift);
    Ok(AchievingPair { side: PairSide::PVertex, vertex: k, distance: (p - &q).norm(), p: p.clone(), q, lift, face })
}

fn z_side_pair(poly: &Polytope, k: usize, e: &[bool], q: &DVector<f64>, s: &Settings) -> Result<AchievingPair> {
    let r = min_norm_point(poly.vertices(), q, &s.solver)?;
    let face = poly.minimal_face(&r.point, s.tol.boundary)?;
    Ok(AchievingPair {
        side: PairSide::ZVertex,
        vertex: k,
        distance: r.dist,
        p: r.point,
        q: q.clone(),
        lift: LiftPoint { x: bits_to_vector(e), free: Vec::new() },
        face,
    })
}

/// One pair per vertex of P followed by one per vertex of Z.
pub fn all_pairs(poly: &Polytope, z: &Zonotope, s: &Settings) -> Result<Vec<AchievingPair>> {
    check_dims(poly, z)?;
    let mut out = Vec::new();
    for (k, p) in poly.vertices().iter().enumerate() {
        out.push(p_side_pair(z, k, p, s)?);
    }
    for (k, (e, q)) in z.enumerate_vertices(s.rank_cap, &s.solver)?.iter().enumerate() {
        out.push(z_side_pair(poly, k, e, q, s)?);
    }
    Ok(out)
}

fn check_dims(poly: &Polytope, z: &Zonotope) -> Result<()> {
    if poly.dim() != z.dim() {
        return Err(Error::DimensionMismatch { expected: poly.dim(), found: z.dim() });
    }
    Ok(())
}

/// Maximum pair distance and the pairs within `value·(1 − tol_active)` of it.
pub fn select_active(pairs: Vec<AchievingPair>, tol_active: f64) -> DistanceReport {
    let value = pairs.iter().map(|p| p.distance).fold(0.0, f64::max);
    let cut = value * (1.0 - tol_active);
    let pairs = pairs.into_iter().filter(|p| p.distance >= cut).collect();
    DistanceReport { value, pairs }
}

/// `d_P(Z)` with its achieving pairs.
pub fn hausdorff_distance(poly: &Polytope, z: &Zonotope, s: &Settings) -> Result<DistanceReport> {
    Ok(select_active(all_pairs(poly, z, s)?, s.tol.active))
}

/// Hausdorff distance between the two vertex sets. Every nearest partner
/// tied within the active band yields its own pair.
pub fn coarse_hausdorff_distance(poly: &Polytope, z: &Zonotope, s: &Settings) -> Result<DistanceReport> {
    check_dims(poly, z)?;
    let zv = z.enumerate_vertices(s.rank_cap, &s.solver)?;
    let pv = poly.vertices();
    let band = |best: f64| best * (1.0 + s.tol.active) + 1e-300;
    let mut pairs = Vec::new();
    for (k, p) in pv.iter().enumerate() {
        let ds: Vec<f64> = zv.iter().map(|(_, q)| (p - q).norm()).collect();
        let best = ds.iter().copied().fold(f64::INFINITY, f64::min);
        for (j, (e, q)) in zv.iter().enumerate() {
            if ds[j] <= band(best) {
                let lift = LiftPoint { x: bits_to_vector(e), free: Vec::new() };
                let face = z.face_of_lift(&lift);
                pairs.push(AchievingPair {
                    side: PairSide::PVertex,
                    vertex: k,
                    p: p.clone(),
                    q: q.clone(),
                    lift,
                    face,
                    distance: ds[j],
                });
            }
        }
    }
    for (k, (e, q)) in zv.iter().enumerate() {
        let ds: Vec<f64> = pv.iter().map(|p| (p - q).norm()).collect();
        let best = ds.iter().copied().fold(f64::INFINITY, f64::min);
        for (j, p) in pv.iter().enumerate() {
            if ds[j] <= band(best) {
                let face = FaceDescriptor {
                    kind: FaceKind::Polytope { vertices: vec![j] },
                    hull: AffineHull::from_points(std::slice::from_ref(p)),
                };
                let lift = LiftPoint { x: bits_to_vector(e), free: Vec::new() };
                pairs.push(AchievingPair {
                    side: PairSide::ZVertex,
                    vertex: k,
                    p: p.clone(),
                    q: q.clone(),
                    lift,
                    face,
                    distance: ds[j],
                });
            }
        }
    }
    // Pairs are reported per vertex only for its nearest partners, so the
    // maximum over them is the directed distance maximum.
    Ok(select_active(pairs, s.tol.active))
}

/// Whether `x − Π(x, P)` lies in the relative interior of the normal cone at
/// `Π(x, P)`. Interior points are stable, boundary points are not.
pub fn is_hausdorff_stable(x: &DVector<f64>, poly: &Polytope, s: &Settings) -> bool {
    let band = s.tol.boundary * poly.scale();
    if poly.facet_residual(x) < -band {
        return true;
    }
    let Ok(r) = min_norm_point(poly.vertices(), x, &s.solver) else {
        return false;
    };
    let w = x - &r.point;
    if w.norm() <= band {
        return false;
    }
    let w = &w / w.norm();
    let active = poly.active_facets(&r.point, s.tol.boundary);
    if active.is_empty() {
        return false;
    }
    // max t  s.t.  Σ α_k η_k = ŵ,  α_k ≥ t
    let m = active.len();
    let mut obj = vec![0.0; m + 1];
    obj[m] = 1.0;
    let mut lp = LinearProgram::new(Goal::Maximize, obj);
    for k in 0..m {
        lp.free(k);
    }
    lp.bound(m, f64::NEG_INFINITY, 1.0);
    for j in 0..poly.dim() {
        let mut row: Vec<f64> = active.iter().map(|&f| poly.facets()[f].normal[j]).collect();
        row.push(0.0);
        lp.constrain(row, Sense::Eq, w[j]);
    }
    for k in 0..m {
        let mut row = vec![0.0; m + 1];
        row[k] = 1.0;
        row[m] = -1.0;
        lp.constrain(row, Sense::Ge, 0.0);
    }
    match solve_lp(&lp, &s.solver) {
        Ok(LpOutcome::Optimal(sol)) => sol.x[m] > s.tol.strict,
        _ => false,
    }
}

/// Stability of a P-vertex relative to Z, read off the lift of its projection:
/// free coordinates stay strictly inside `(0,1)` and every other generator
/// points strictly to the side its coordinate sits on.
pub fn is_hausdorff_stable_in_zonotope(pair: &AchievingPair, z: &Zonotope, s: &Settings) -> bool {
    let band = s.tol.boundary * z.scale();
    if z.facet_residual(&pair.p) < -band {
        return true;
    }
    let w = &pair.p - &pair.q;
    let wn = w.norm();
    if wn <= band {
        return false;
    }
    let strict = s.tol.strict;
    for i in 0..z.rank() {
        let xi = pair.lift.x[i];
        if pair.lift.free.contains(&i) {
            if xi <= strict || xi >= 1.0 - strict {
                return false;
            }
            continue;
        }
        let g = z.generator(i);
        let margin = strict * g.norm() * wn;
        let dot = g.dot(&w);
        let ok = if xi > 0.5 { dot > margin } else { dot < -margin };
        if !ok {
            return false;
        }
    }
    true
}

fn lift_is_unique(pair: &AchievingPair, z: &Zonotope) -> bool {
    let f = &pair.lift.free;
    if f.is_empty() {
        return true;
    }
    if f.len() >= z.dim() {
        return false;
    }
    let gf = z.generators().select_rows(f.iter());
    crate::linalg::rank(&gf, 1e-9) == f.len()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalityReport {
    pub general_position: bool,
    /// P-vertices outside Z whose projection has a non-unique lift.
    pub stable_vertices: Vec<usize>,
    /// P-vertices that are not Hausdorff stable relative to Z.
    pub hausdorff_stable_p: Vec<usize>,
    /// Z-vertices (enumeration order) that are not Hausdorff stable relative to P.
    pub hausdorff_stable_z: Vec<usize>,
}

impl LocalityReport {
    pub fn holds(&self) -> bool {
        self.general_position
            && self.stable_vertices.is_empty()
            && self.hausdorff_stable_p.is_empty()
            && self.hausdorff_stable_z.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "general position {}, non-unique lifts {:?}, unstable P-vertices {:?}, unstable Z-vertices {:?}",
            self.general_position, self.stable_vertices, self.hausdorff_stable_p, self.hausdorff_stable_z
        )
    }
}

/// Locality conditions from precomputed pairs (as returned by [`all_pairs`]).
pub fn locality_from_pairs(poly: &Polytope, z: &Zonotope, pairs: &[AchievingPair], s: &Settings) -> LocalityReport {
    let mut rep = LocalityReport {
        general_position: z.is_general_position(s.tol.general_position),
        stable_vertices: Vec::new(),
        hausdorff_stable_p: Vec::new(),
        hausdorff_stable_z: Vec::new(),
    };
    for pair in pairs {
        match pair.side {
            PairSide::PVertex => {
                if !lift_is_unique(pair, z) && pair.distance > s.tol.boundary * z.scale() {
                    rep.stable_vertices.push(pair.vertex);
                }
                if !is_hausdorff_stable_in_zonotope(pair, z, s) {
                    rep.hausdorff_stable_p.push(pair.vertex);
                }
            }
            PairSide::ZVertex => {
                if !is_hausdorff_stable(&pair.q, poly, s) {
                    rep.hausdorff_stable_z.push(pair.vertex);
                }
            }
        }
    }
    rep
}

pub fn check_locality(poly: &Polytope, z: &Zonotope, s: &Settings) -> Result<LocalityReport> {
    let pairs = all_pairs(poly, z, s)?;
    Ok(locality_from_pairs(poly, z, &pairs, s))
}

/// A smooth piece of `d_P` near a zonotope satisfying the locality conditions.
#[derive(Debug, Clone, PartialEq)]
pub enum SmoothTerm {
    /// Distance from a vertex `p` of P to the affine hull of the Z-face with
    /// cube anchor `anchor` and free generators `free`.
    PVertex { vertex: usize, p: DVector<f64>, anchor: BitVector, free: Vec<usize> },
    /// Distance from the cubical vertex `e` to the fixed affine hull of a P-face.
    ZVertex { vertex: usize, e: BitVector, hull: AffineHull },
}

impl SmoothTerm {
    pub fn from_pair(pair: &AchievingPair) -> Self {
        match (&pair.side, &pair.face.kind) {
            (PairSide::PVertex, FaceKind::Zonotope { anchor, free }) => SmoothTerm::PVertex {
                vertex: pair.vertex,
                p: pair.p.clone(),
                anchor: anchor.clone(),
                free: free.clone(),
            },
            _ => SmoothTerm::ZVertex { vertex: pair.vertex, e: pair.lift.anchor(), hull: pair.face.hull.clone() },
        }
    }

    /// Affine hull of `F_p` at `z`, for P-vertex terms.
    pub fn zonotope_face_hull(&self, z: &Zonotope) -> Option<AffineHull> {
        match self {
            SmoothTerm::PVertex { anchor, free, .. } => {
                let base = z.cubical_vertex(anchor);
                let dirs: Vec<DVector<f64>> = free.iter().map(|&i| z.generator(i)).collect();
                Some(AffineHull::from_directions(base, &dirs))
            }
            SmoothTerm::ZVertex { .. } => None,
        }
    }

    pub fn value(&self, z: &Zonotope) -> f64 {
        match self {
            SmoothTerm::PVertex { p, .. } => {
                let h = self.zonotope_face_hull(z).expect("P-vertex term");
                dist_point_to_affine(p, &h)
            }
            SmoothTerm::ZVertex { e, hull, .. } => dist_point_to_affine(&z.cubical_vertex(e), hull),
        }
    }
}

/// One smooth term per vertex of P and per vertex of Z0.
pub fn local_terms(poly: &Polytope, z0: &Zonotope, s: &Settings) -> Result<Vec<SmoothTerm>> {
    let pairs = all_pairs(poly, z0, s)?;
    let rep = locality_from_pairs(poly, z0, &pairs, s);
    if !rep.holds() {
        return Err(Error::LocalityViolation(rep.summary()));
    }
    Ok(pairs.iter().map(SmoothTerm::from_pair).collect())
}

/// `max_k term_k(z)`
pub fn max_of_terms(terms: &[SmoothTerm], z: &Zonotope) -> f64 {
    terms.iter().map(|t| t.value(z)).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(a: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(a)
    }

    fn unit_square() -> Polytope {
        Polytope::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap()
    }

    fn square_z() -> Zonotope {
        Zonotope::cube(2, 1.0, DVector::zeros(2)).unwrap()
    }

    #[test]
    fn identical_bodies() {
        let s = Settings::default();
        assert_eq!(hausdorff_distance(&unit_square(), &square_z(), &s).unwrap().value, 0.0);
        assert_eq!(coarse_hausdorff_distance(&unit_square(), &square_z(), &s).unwrap().value, 0.0);
    }

    #[test]
    fn translated_square() {
        let s = Settings::default();
        let p = Polytope::from_rows(&[vec![0.3, 0.0], vec![1.3, 0.0], vec![1.3, 1.0], vec![0.3, 1.0]]).unwrap();
        let r = hausdorff_distance(&p, &square_z(), &s).unwrap();
        assert!((r.value - 0.3).abs() < 1e-12);
        // right side of P and left side of Z
        assert_eq!(r.pairs.len(), 4);
        for pair in &r.pairs {
            match pair.side {
                PairSide::PVertex => assert!((pair.p[0] - 1.3).abs() < 1e-12),
                PairSide::ZVertex => assert!(pair.q[0].abs() < 1e-12),
            }
        }
    }

    #[test]
    fn affine_distance() {
        let h = AffineHull::from_directions(v(&[0.0, 0.0]), &[v(&[1.0, 0.0])]);
        assert!((dist_point_to_affine(&v(&[0.0, 2.0]), &h) - 2.0).abs() < 1e-12);
        assert!(dist_point_to_affine(&v(&[5.0, 0.0]), &h) < 1e-12);
    }

    #[test]
    fn stability_examples() {
        let s = Settings::default();
        let p = unit_square();
        assert!(is_hausdorff_stable(&v(&[0.5, 1.5]), &p, &s));
        assert!(!is_hausdorff_stable(&v(&[1.0, 2.0]), &p, &s));
        assert!(is_hausdorff_stable(&v(&[0.5, 0.5]), &p, &s));
        assert!(!is_hausdorff_stable(&v(&[0.5, 1.0]), &p, &s));
        assert!(is_hausdorff_stable(&v(&[1.5, 2.0]), &p, &s));
    }

    #[test]
    fn parallel_generators_fail_locality() {
        let s = Settings::default();
        let z = Zonotope::from_rows(&[vec![1.0, 0.0], vec![2.0, 0.0], vec![0.0, 1.0]], &[0.0, 0.0]).unwrap();
        let p = Polytope::from_rows(&[vec![-1.0, -1.0], vec![4.0, -1.0], vec![1.0, 3.0]]).unwrap();
        assert!(!check_locality(&p, &z, &s).unwrap().general_position);
    }
}
