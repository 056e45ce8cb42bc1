//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

/// Determinant with the 0x0 convention `det = 1`.
pub fn det(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        1.0
    } else {
        m.clone().lu().determinant()
    }
}

/// `m` with column `skip` removed.
pub fn drop_column(m: &DMatrix<f64>, skip: usize) -> DMatrix<f64> {
    m.clone().remove_column(skip)
}

/// Gram-Schmidt with one re-orthogonalisation pass.
///
/// Vectors whose residual falls below `rel_tol` times the largest input norm
/// are dropped, so the output length is the numerical rank.
pub fn orthonormal_basis(vectors: &[DVector<f64>], rel_tol: f64) -> Vec<DVector<f64>> {
    let scale = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&r);
                r.axpy(-c, b, 1.0);
            }
        }
        let n = r.norm();
        if n > rel_tol * scale {
            basis.push(r / n);
        }
    }
    basis
}

/// Orthonormal basis of the orthogonal complement of `span(basis)` in R^dim.
/// `basis` must already be orthonormal.
pub fn orthogonal_complement(basis: &[DVector<f64>], dim: usize) -> Vec<DVector<f64>> {
    let mut all: Vec<DVector<f64>> = basis.to_vec();
    let mut out = Vec::new();
    for k in 0..dim {
        if all.len() == dim {
            break;
        }
        let mut r = DVector::zeros(dim);
        r[k] = 1.0;
        for _ in 0..2 {
            for b in &all {
                let c = b.dot(&r);
                r.axpy(-c, b, 1.0);
            }
        }
        let n = r.norm();
        if n > 1e-8 {
            let u = r / n;
            all.push(u.clone());
            out.push(u);
        }
    }
    out
}

/// Minimum-norm least-squares solution of `a x = b`.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    if a.ncols() == 0 {
        return DVector::zeros(0);
    }
    if a.nrows() == 0 {
        return DVector::zeros(a.ncols());
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = (smax * 1e-12).max(f64::MIN_POSITIVE);
    svd.solve(b, eps).unwrap_or_else(|_| DVector::zeros(a.ncols()))
}

/// Numerical rank of `a`, singular values below `rel_tol * max` count as zero.
pub fn rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let sv = a.clone().svd(false, false).singular_values;
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let need = k - cur.len();
        for i in start..=n.saturating_sub(need) {
            if i >= n {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: usize = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Normal of the hyperplane spanned by the `d - 1` rows of `rows`, entry `j`
/// being `(-1)^j` times the minor that omits column `j` (1-based `j`). Not
/// normalised.
pub fn cofactor_normal(rows: &DMatrix<f64>) -> DVector<f64> {
    let d = rows.ncols();
    debug_assert_eq!(rows.nrows() + 1, d);
    DVector::from_fn(d, |j, _| {
        let sign = if (j + 1) % 2 == 0 { 1.0 } else { -1.0 };
        sign * det(&drop_column(rows, j))
    })
}
