use nalgebra::DVector;

use super::zonotope::BitVector;
use crate::error::{Error, Result};
use crate::linalg::{orthogonal_complement, orthonormal_basis};

/// `{ y : ⟨η_k, y⟩ = c_k for all k }` with orthonormal `η_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineHull {
    pub base: DVector<f64>,
    pub normals: Vec<DVector<f64>>,
    pub offsets: Vec<f64>,
}

impl AffineHull {
    /// Affine span of `base + span(directions)`.
    pub fn from_directions(base: DVector<f64>, directions: &[DVector<f64>]) -> Self {
        let basis = orthonormal_basis(directions, 1e-9);
        let normals = orthogonal_complement(&basis, base.len());
        let offsets = normals.iter().map(|n| n.dot(&base)).collect();
        Self { base, normals, offsets }
    }

    pub fn from_points(points: &[DVector<f64>]) -> Self {
        let base = points[0].clone();
        let dirs: Vec<DVector<f64>> = points[1..].iter().map(|p| p - &base).collect();
        Self::from_directions(base, &dirs)
    }

    pub fn codim(&self) -> usize {
        self.normals.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FaceKind {
    /// `anchor` is the cube vertex with every free coordinate at 0.
    Zonotope {
        anchor: BitVector,
        free: Vec<usize>,
    },
    Polytope {
        vertices: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaceDescriptor {
    pub kind: FaceKind,
    pub hull: AffineHull,
}

impl FaceDescriptor {
    pub fn codim(&self) -> usize {
        self.hull.codim()
    }

    pub fn affine_hull(&self) -> Result<&AffineHull> {
        if self.codim() == 0 {
            Err(Error::CodimZeroFace)
        } else {
            Ok(&self.hull)
        }
    }
}
