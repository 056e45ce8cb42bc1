use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};

use super::face::{AffineHull, FaceDescriptor, FaceKind};
use crate::error::{Error, Result};
use crate::linalg::{cofactor_normal, combinations, det, rank};
use crate::solvers::{bounded_least_squares, solve_lp, Goal, LinearProgram, LpOutcome, Sense, SolverConfig};

/// Cube vertex `e ∈ {0,1}^n`; entry `i` selects generator `i`.
pub type BitVector = Vec<bool>;

/// Largest rank accepted by [`Zonotope::enumerate_vertices`] by default.
pub const DEFAULT_RANK_CAP: usize = 20;

pub fn bits_to_vector(e: &[bool]) -> DVector<f64> {
    DVector::from_iterator(e.len(), e.iter().map(|&b| if b { 1.0 } else { 0.0 }))
}

/// `Z(Q, μ) = { Qᵀx + μ : x ∈ [0,1]^n }` with generator `g_i` stored as row `i` of `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Zonotope {
    generators: DMatrix<f64>,
    translation: DVector<f64>,
}

/// A point of `[0,1]^n` mapping to a boundary point, with the indices strictly
/// inside `(0,1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftPoint {
    pub x: DVector<f64>,
    pub free: Vec<usize>,
}

impl LiftPoint {
    pub fn new(x: DVector<f64>, tol: f64) -> Self {
        let free = (0..x.len()).filter(|&i| x[i] > tol && x[i] < 1.0 - tol).collect();
        Self { x, free }
    }

    /// Cube vertex with the bound coordinates rounded and free ones set to 0.
    pub fn anchor(&self) -> BitVector {
        (0..self.x.len()).map(|i| !self.free.contains(&i) && self.x[i] > 0.5).collect()
    }
}

/// Facet of a zonotope: the generators in `span` are parallel to it and
/// `normal` is a unit outward normal.
#[derive(Debug, Clone, PartialEq)]
pub struct ZonotopeFacet {
    pub span: Vec<usize>,
    pub normal: DVector<f64>,
    pub offset: f64,
}

impl Zonotope {
    pub fn new(generators: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        let (n, d) = generators.shape();
        if d == 0 {
            return Err(Error::InvalidInput("zonotope dimension must be at least 1".into()));
        }
        if n < d {
            return Err(Error::InvalidInput(format!("rank {n} below dimension {d}")));
        }
        if translation.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: translation.len() });
        }
        if generators.iter().chain(translation.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite zonotope entry".into()));
        }
        Ok(Self { generators, translation })
    }

    pub fn from_rows(rows: &[Vec<f64>], translation: &[f64]) -> Result<Self> {
        let d = translation.len();
        for r in rows {
            if r.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: r.len() });
            }
        }
        let q = DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
        Self::new(q, DVector::from_column_slice(translation))
    }

    /// Parallelotope `[0,1]^d` scaled by `side` and shifted to `origin`.
    pub fn cube(d: usize, side: f64, origin: DVector<f64>) -> Result<Self> {
        Self::new(DMatrix::identity(d, d) * side, origin)
    }

    pub fn rank(&self) -> usize {
        self.generators.nrows()
    }

    pub fn dim(&self) -> usize {
        self.generators.ncols()
    }

    pub fn generators(&self) -> &DMatrix<f64> {
        &self.generators
    }

    pub fn translation(&self) -> &DVector<f64> {
        &self.translation
    }

    pub fn generator(&self, i: usize) -> DVector<f64> {
        self.generators.row(i).transpose()
    }

    pub fn generator_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rank()).map(|i| self.generators.row(i).iter().copied().collect()).collect()
    }

    pub fn max_generator_norm(&self) -> f64 {
        (0..self.rank()).map(|i| self.generators.row(i).norm()).fold(0.0, f64::max)
    }

    /// `Qᵀx + μ`
    pub fn point(&self, x: &DVector<f64>) -> DVector<f64> {
        self.generators.tr_mul(x) + &self.translation
    }

    pub fn cubical_vertex(&self, e: &[bool]) -> DVector<f64> {
        self.point(&bits_to_vector(e))
    }

    pub fn center(&self) -> DVector<f64> {
        self.point(&DVector::from_element(self.rank(), 0.5))
    }

    /// Same set with generator rows sorted lexicographically.
    pub fn canonicalize(&self) -> Zonotope {
        let mut rows = self.generator_rows();
        rows.sort_by(|a, b| {
            a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| *o != Ordering::Equal).unwrap_or(Ordering::Equal)
        });
        let q = DMatrix::from_fn(self.rank(), self.dim(), |i, j| rows[i][j]);
        Zonotope { generators: q, translation: self.translation.clone() }
    }

    /// Every `d×d` minor exceeds `tol` times the product of its row norms.
    pub fn is_general_position(&self, tol: f64) -> bool {
        let d = self.dim();
        combinations(self.rank(), d).iter().all(|s| {
            let m = self.generators.select_rows(s.iter());
            let scale: f64 = s.iter().map(|&i| self.generators.row(i).norm()).product();
            scale > 0.0 && det(&m).abs() > tol * scale
        })
    }

    /// Whether `Qᵀe + μ` is a vertex: there is `η` with `⟨g_i, η⟩ ≥ 1` for
    /// selected generators and `≤ −1` for the rest.
    pub fn is_cubical_vertex_a_vertex(&self, e: &[bool], cfg: &SolverConfig) -> Result<bool> {
        if e.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), found: e.len() });
        }
        let d = self.dim();
        let mut lp = LinearProgram::new(Goal::Minimize, vec![0.0; d]);
        for j in 0..d {
            lp.free(j);
        }
        for (i, &on) in e.iter().enumerate() {
            let row: Vec<f64> = self.generators.row(i).iter().copied().collect();
            if on {
                lp.constrain(row, Sense::Ge, 1.0);
            } else {
                lp.constrain(row, Sense::Le, -1.0);
            }
        }
        match solve_lp(&lp, cfg) {
            Ok(LpOutcome::Optimal(_)) => Ok(true),
            Ok(_) => Ok(false),
            Err(Error::IterationLimit(k)) => Err(Error::LpNumericalFailure(format!("vertexhood LP hit {k} pivots"))),
            Err(e) => Err(e),
        }
    }

    /// All vertices with their bit vectors, in increasing order of `Σ e_i 2^i`.
    pub fn enumerate_vertices(&self, cap: usize, cfg: &SolverConfig) -> Result<Vec<(BitVector, DVector<f64>)>> {
        let n = self.rank();
        if n > cap {
            return Err(Error::RankCapExceeded { rank: n, cap });
        }
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << n) {
            let e: BitVector = (0..n).map(|i| mask >> i & 1 == 1).collect();
            if self.is_cubical_vertex_a_vertex(&e, cfg)? {
                let v = self.cubical_vertex(&e);
                out.push((e, v));
            }
        }
        Ok(out)
    }

    /// Facets indexed by `(d−1)`-subsets of generators, both orientations.
    /// Subsets whose generators are dependent are skipped.
    pub fn facets(&self) -> Vec<ZonotopeFacet> {
        let d = self.dim();
        let mut out = Vec::new();
        for s in combinations(self.rank(), d - 1) {
            let qf = self.generators.select_rows(s.iter());
            let eta = cofactor_normal(&qf);
            let nrm = eta.norm();
            let scale: f64 = s.iter().map(|&i| self.generators.row(i).norm()).product();
            if nrm <= 1e-12 * scale.max(1e-300) {
                continue;
            }
            for sign in [1.0, -1.0] {
                let normal = &eta * (sign / nrm);
                let offset = self.support(&normal);
                out.push(ZonotopeFacet { span: s.clone(), normal, offset });
            }
        }
        out
    }

    /// Support function `max_{z ∈ Z} ⟨w, z⟩`.
    pub fn support(&self, w: &DVector<f64>) -> f64 {
        let mut h = w.dot(&self.translation);
        for i in 0..self.rank() {
            h += self.generators.row(i).transpose().dot(w).max(0.0);
        }
        h
    }

    /// Length scale used to make boundary tolerances relative.
    pub fn scale(&self) -> f64 {
        let s: f64 = (0..self.rank()).map(|i| self.generators.row(i).norm()).sum();
        1.0 + s + self.translation.amax()
    }

    /// `max_k (⟨η_k, y⟩ − c_k)`: zero on the boundary, negative inside.
    pub fn facet_residual(&self, y: &DVector<f64>) -> f64 {
        self.facets().iter().map(|f| f.normal.dot(y) - f.offset).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, y: &DVector<f64>, tol: f64) -> bool {
        self.facet_residual(y) <= tol * self.scale()
    }

    /// The unique lift of a boundary point.
    pub fn lift_boundary_point(&self, q: &DVector<f64>, tol: f64, cfg: &SolverConfig) -> Result<LiftPoint> {
        if q.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: q.len() });
        }
        let scale = self.scale();
        let res = self.facet_residual(q);
        if res.abs() > tol * scale {
            return Err(Error::NotOnBoundary { residual: res });
        }
        let b = q - &self.translation;
        let sol = bounded_least_squares(&self.generators.transpose(), &b, cfg)?;
        if sol.value > tol * scale {
            return Err(Error::NotOnBoundary { residual: sol.value });
        }
        let lift = LiftPoint::new(sol.x, tol);
        self.check_unique(&lift)?;
        Ok(lift)
    }

    fn check_unique(&self, lift: &LiftPoint) -> Result<()> {
        if lift.free.is_empty() {
            return Ok(());
        }
        let gf = self.generators.select_rows(lift.free.iter());
        if lift.free.len() >= self.dim() || rank(&gf, 1e-9) < lift.free.len() {
            return Err(Error::NonUniqueLift { free: lift.free.clone() });
        }
        Ok(())
    }

    /// Image of a lift under this zonotope's parameters.
    pub fn pushforward(&self, x: &LiftPoint) -> Result<DVector<f64>> {
        if x.x.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), found: x.x.len() });
        }
        Ok(self.point(&x.x))
    }

    /// Whether the pushforward `∂self → target` lands on `∂target` at every
    /// vertex lift and every facet center lift of `self`.
    pub fn is_pushforward_proper(&self, target: &Zonotope, tol: f64) -> bool {
        if target.rank() != self.rank() || target.dim() != self.dim() {
            return false;
        }
        let band = tol * target.scale();
        let on_boundary = |x: &DVector<f64>| target.facet_residual(&target.point(x)).abs() <= band;
        for f in self.facets() {
            let mut x = DVector::zeros(self.rank());
            for i in 0..self.rank() {
                if !f.span.contains(&i) && self.generator(i).dot(&f.normal) > 0.0 {
                    x[i] = 1.0;
                }
            }
            for &i in &f.span {
                x[i] = 0.5;
            }
            if !on_boundary(&x) {
                return false;
            }
            // Corners of the facet are vertices of self.
            for mask in 0u64..(1u64 << f.span.len()) {
                for (k, &i) in f.span.iter().enumerate() {
                    x[i] = (mask >> k & 1) as f64;
                }
                if !on_boundary(&x) {
                    return false;
                }
            }
        }
        true
    }

    /// Face of `self` through the lift: anchor `Qᵀe + μ` and free generators.
    pub fn face_of_lift(&self, lift: &LiftPoint) -> FaceDescriptor {
        let anchor = lift.anchor();
        let base = self.cubical_vertex(&anchor);
        let dirs: Vec<DVector<f64>> = lift.free.iter().map(|&i| self.generator(i)).collect();
        FaceDescriptor {
            kind: FaceKind::Zonotope { anchor, free: lift.free.clone() },
            hull: AffineHull::from_directions(base, &dirs),
        }
    }

    /// Flat parameter vector: generator rows in order, then the translation.
    pub fn to_params(&self) -> DVector<f64> {
        let (n, d) = (self.rank(), self.dim());
        DVector::from_fn(n * d + d, |k, _| {
            if k < n * d {
                self.generators[(k / d, k % d)]
            } else {
                self.translation[k - n * d]
            }
        })
    }

    pub fn from_params(n: usize, d: usize, p: &DVector<f64>) -> Result<Self> {
        if p.len() != n * d + d {
            return Err(Error::DimensionMismatch { expected: n * d + d, found: p.len() });
        }
        let q = DMatrix::from_fn(n, d, |i, j| p[i * d + j]);
        let mu = DVector::from_fn(d, |j, _| p[n * d + j]);
        Self::new(q, mu)
    }

    /// `Z(Q + h ΔQ, μ + h Δμ)` for a flat direction.
    pub fn step(&self, direction: &DVector<f64>, h: f64) -> Result<Self> {
        let p = self.to_params() + direction * h;
        Self::from_params(self.rank(), self.dim(), &p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hexagon() -> Zonotope {
        Zonotope::from_rows(&[vec![1.0, 2.0], vec![1.0, 1.0], vec![2.0, 0.0]], &[0.0, 0.0]).unwrap()
    }

    fn square() -> Zonotope {
        Zonotope::cube(2, 1.0, DVector::zeros(2)).unwrap()
    }

    fn v(a: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(a)
    }

    #[test]
    fn canonical_order() {
        let z = Zonotope::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[0.0, 0.0]).unwrap();
        assert_eq!(z.canonicalize().generator_rows(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let c = z.canonicalize();
        assert_eq!(c.canonicalize(), c);
    }

    #[test]
    fn general_position_examples() {
        let ok = Zonotope::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]], &[0.0, 0.0]).unwrap();
        let bad = Zonotope::from_rows(&[vec![1.0, 0.0], vec![2.0, 0.0], vec![0.0, 1.0]], &[0.0, 0.0]).unwrap();
        assert!(ok.is_general_position(1e-10));
        assert!(!bad.is_general_position(1e-10));
        assert!(hexagon().is_general_position(1e-10));
    }

    #[test]
    fn vertexhood() {
        let cfg = SolverConfig::default();
        assert!(square().is_cubical_vertex_a_vertex(&[true, true], &cfg).unwrap());
        assert!(!hexagon().is_cubical_vertex_a_vertex(&[true, false, true], &cfg).unwrap());
        assert!(hexagon().is_cubical_vertex_a_vertex(&[true, true, true], &cfg).unwrap());
    }

    #[test]
    fn hexagon_vertices() {
        let vs = hexagon().enumerate_vertices(DEFAULT_RANK_CAP, &SolverConfig::default()).unwrap();
        let mut pts: Vec<(i64, i64)> = vs.iter().map(|(_, p)| (p[0].round() as i64, p[1].round() as i64)).collect();
        pts.sort();
        assert_eq!(pts, vec![(0, 0), (1, 2), (2, 0), (2, 3), (3, 1), (4, 3)]);
        assert_eq!(square().enumerate_vertices(20, &SolverConfig::default()).unwrap().len(), 4);
    }

    #[test]
    fn rank_cap() {
        let z = Zonotope::new(DMatrix::from_element(3, 1, 1.0), DVector::zeros(1)).unwrap();
        assert_eq!(z.enumerate_vertices(2, &SolverConfig::default()), Err(Error::RankCapExceeded { rank: 3, cap: 2 }));
    }

    #[test]
    fn lifts() {
        let cfg = SolverConfig::default();
        let l = square().lift_boundary_point(&v(&[0.0, 0.5]), 1e-9, &cfg).unwrap();
        assert!((l.x.clone() - v(&[0.0, 0.5])).norm() < 1e-12);
        assert_eq!(l.free, vec![1]);
        let l = square().lift_boundary_point(&v(&[1.0, 1.0]), 1e-9, &cfg).unwrap();
        assert!((l.x.clone() - v(&[1.0, 1.0])).norm() < 1e-12);
        let l = hexagon().lift_boundary_point(&v(&[4.0, 3.0]), 1e-9, &cfg).unwrap();
        assert!((l.x.clone() - v(&[1.0, 1.0, 1.0])).norm() < 1e-12);
        assert!(matches!(square().lift_boundary_point(&v(&[0.5, 0.5]), 1e-9, &cfg), Err(Error::NotOnBoundary { .. })));
    }

    #[test]
    fn pushforward_of_sheared_corner() {
        let eps = 0.2;
        let t = Zonotope::from_rows(&[vec![1.0, 2.0], vec![1.0 - eps, 1.0], vec![2.0, 0.0]], &[0.0, 0.0]).unwrap();
        let x = LiftPoint::new(v(&[1.0, 1.0, 1.0]), 1e-10);
        assert!((t.pushforward(&x).unwrap() - v(&[3.8, 3.0])).norm() < 1e-12);
    }

    #[test]
    fn properness_threshold_under_shear() {
        let src = hexagon();
        for (eps, want) in [(0.2, true), (0.4, true), (0.6, false), (0.8, false), (1.0, false)] {
            let t = Zonotope::from_rows(&[vec![1.0, 2.0], vec![1.0 - eps, 1.0], vec![2.0, 0.0]], &[0.0, 0.0]).unwrap();
            assert_eq!(src.is_pushforward_proper(&t, 1e-9), want, "eps = {eps}");
        }
        assert!(src.is_pushforward_proper(&src, 1e-9));
    }

    #[test]
    fn params_round_trip() {
        let z = hexagon();
        let p = z.to_params();
        assert_eq!(p[2], 1.0);
        assert_eq!(p[3], 1.0);
        assert_eq!(Zonotope::from_params(3, 2, &p).unwrap(), z);
    }

    #[test]
    fn support_matches_vertices() {
        let z = hexagon();
        let w = v(&[0.3, -0.7]);
        let best = z
            .enumerate_vertices(20, &SolverConfig::default())
            .unwrap()
            .iter()
            .map(|(_, p)| p.dot(&w))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((z.support(&w) - best).abs() < 1e-12);
    }
}
