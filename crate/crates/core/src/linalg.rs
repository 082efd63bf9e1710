//! Dense real linear algebra and sampling primitives.
//!
//! Everything here is a pure function of its inputs. Eigen- and singular value
//! decompositions are delegated to `nalgebra`; this module adds the ordering,
//! clustering and sign conventions the rest of the crate relies on.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::ops::Range;

use crate::error::{Error, Result};

/// Default relative gap under which two eigenvalues count as one.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;

/// A real symmetric matrix. Construction mirrors the lower triangle onto the
/// upper one, so `get(a, b) == get(b, a)` holds bit for bit.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    inner: DMatrix<f64>,
}

impl SymmetricMatrix {
    /// Builds from a square matrix, keeping its lower triangle.
    pub fn from_lower(mut m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                actual: m.ncols(),
            });
        }
        let n = m.nrows();
        for a in 0..n {
            for b in (a + 1)..n {
                m[(a, b)] = m[(b, a)];
            }
        }
        Ok(Self { inner: m })
    }

    /// Builds from a square matrix by averaging it with its transpose.
    pub fn symmetrize(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                actual: m.ncols(),
            });
        }
        Self::from_lower((m + m.transpose()) * 0.5)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        for a in 0..dim {
            for b in 0..=a {
                let v = f(a, b);
                m[(a, b)] = v;
                m[(b, a)] = v;
            }
        }
        Self { inner: m }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.inner[(a, b)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.inner
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.amax()
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace()
    }
}

/// Eigendecomposition with ascending eigenvalues and orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymEigen {
    pub fn vector(&self, idx: usize) -> DVector<f64> {
        self.vectors.column(idx).into_owned()
    }

    /// Columns of `vectors` whose indices fall in `range`.
    pub fn columns(&self, range: Range<usize>) -> Vec<DVector<f64>> {
        range.map(|i| self.vector(i)).collect()
    }
}

pub fn sym_eigen(m: &SymmetricMatrix) -> Result<SymEigen> {
    if m.as_matrix().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidMatrix);
    }
    let n = m.dim();
    if n == 0 {
        return Ok(SymEigen {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::new(m.as_matrix().clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        // sign convention: largest-magnitude component positive
        let lead = col.iamax();
        if col[lead] < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(dst, &col);
    }
    Ok(SymEigen { values, vectors })
}

/// Orthonormal basis of `x^⊥`, returned as the `n - 1` columns of an `n × (n-1)` matrix.
///
/// Uses the Householder reflector that maps `x / |x|` onto a multiple of the
/// first basis vector; its remaining columns span the complement.
pub fn orthonormal_complement(x: &DVector<f64>) -> Result<DMatrix<f64>> {
    let n = x.len();
    let norm = x.norm();
    if n == 0 || norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    let u = x / norm;
    let mut v = u.clone();
    v[0] += if u[0] >= 0.0 { 1.0 } else { -1.0 };
    let vv = v.norm_squared();
    let mut h = DMatrix::<f64>::identity(n, n);
    h -= (&v * v.transpose()) * (2.0 / vv);
    Ok(h.columns(1, n - 1).into_owned())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenCluster {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenClusterSet {
    pub clusters: Vec<EigenCluster>,
    pub tolerance_used: f64,
}

impl EigenClusterSet {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.value).collect()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.multiplicity).collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.clusters.iter().map(|c| c.multiplicity).sum()
    }
}

/// Absolute merge threshold used by [`cluster_eigenvalues`].
pub fn cluster_tolerance(values: &[f64], rel_tol: f64) -> f64 {
    let radius = values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    rel_tol * radius.max(1.0)
}

/// Index ranges of maximal runs whose adjacent gaps are `<= abs_tol`.
pub(crate) fn cluster_ranges(values: &[f64], abs_tol: f64) -> Vec<Range<usize>> {
    let mut ranges = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > abs_tol {
            ranges.push(start..i);
            start = i;
        }
    }
    ranges
}

pub fn cluster_eigenvalues(values: &[f64], rel_tol: f64) -> Result<EigenClusterSet> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(rel_tol > 0.0) {
        return Err(Error::InvalidParams(format!(
            "rel_tol must be positive, got {rel_tol}"
        )));
    }
    let tol = cluster_tolerance(values, rel_tol);
    let clusters = cluster_ranges(values, tol)
        .into_iter()
        .map(|r| {
            let members = &values[r.clone()];
            EigenCluster {
                value: members.iter().sum::<f64>() / members.len() as f64,
                multiplicity: members.len(),
            }
        })
        .collect();
    Ok(EigenClusterSet {
        clusters,
        tolerance_used: tol,
    })
}

/// Unit vectors from normalized standard Gaussian coordinates.
/// Output depends only on `(dim, count, seed)`.
pub fn sample_unit_sphere(dim: usize, count: usize, seed: u64) -> Vec<DVector<f64>> {
    assert!(dim >= 1, "sphere dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v = DVector::<f64>::from_fn(dim, |_, _| StandardNormal.sample(&mut rng));
        let norm = v.norm();
        if norm > 1e-150 {
            out.push(v / norm);
        }
    }
    out
}

/// Haar-distributed orthogonal matrix from the QR factorization of a Gaussian matrix.
pub fn random_orthogonal(dim: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::<f64>::from_fn(dim, dim, |_, _| StandardNormal.sample(&mut rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return Vec::new();
    }
    SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect()
}

fn orthonormalized(basis: &[DVector<f64>], dim: usize, tol: f64) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(dim, basis.len());
    for (j, v) in basis.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: v.len(),
            });
        }
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::DegenerateBasis {
                smallest_singular: 0.0,
            });
        }
        m.set_column(j, &(v / norm));
    }
    if basis.len() > dim {
        return Err(Error::DegenerateBasis {
            smallest_singular: 0.0,
        });
    }
    let smallest = singular_values(&m)
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if smallest <= tol {
        return Err(Error::DegenerateBasis {
            smallest_singular: smallest,
        });
    }
    let q = m.qr().q();
    Ok(q.columns(0, basis.len()).into_owned())
}

/// `dim(span A ∩ span B)` from the singular values of `[Q_A Q_B]`, where
/// `Q_A`, `Q_B` are orthonormalized copies of the inputs. Singular values
/// at or below `tol` (and the ones missing when the system is wide) count
/// toward the intersection.
pub fn subspace_intersection_dim(
    basis_a: &[DVector<f64>],
    basis_b: &[DVector<f64>],
    tol: f64,
) -> Result<usize> {
    let dim = basis_a
        .first()
        .or_else(|| basis_b.first())
        .map(|v| v.len())
        .unwrap_or(0);
    if basis_a.is_empty() || basis_b.is_empty() {
        return Ok(0);
    }
    let qa = orthonormalized(basis_a, dim, tol)?;
    let qb = orthonormalized(basis_b, dim, tol)?;
    let mut joint = DMatrix::zeros(dim, qa.ncols() + qb.ncols());
    joint.columns_mut(0, qa.ncols()).copy_from(&qa);
    joint.columns_mut(qa.ncols(), qb.ncols()).copy_from(&qb);
    let rank = singular_values(&joint)
        .into_iter()
        .filter(|&s| s > tol)
        .count();
    Ok(joint.ncols() - rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_symmetric(dim: usize, seed: u64) -> SymmetricMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = DMatrix::<f64>::from_fn(dim, dim, |_, _| StandardNormal.sample(&mut rng));
        SymmetricMatrix::symmetrize(&raw).unwrap()
    }

    fn reconstruction_residual(m: &SymmetricMatrix, e: &SymEigen) -> f64 {
        let lambda = DMatrix::from_diagonal(&DVector::from_vec(e.values.clone()));
        (m.as_matrix() - &e.vectors * lambda * e.vectors.transpose()).amax()
    }

    #[test]
    fn identity_eigenvalues() {
        let e = sym_eigen(&SymmetricMatrix::identity(3)).unwrap();
        assert_eq!(e.values.len(), 3);
        for v in e.values {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn diagonal_eigenpairs() {
        let m = SymmetricMatrix::from_fn(3, |a, b| if a == b { [0.0, 1.0, 4.0][a] } else { 0.0 });
        let e = sym_eigen(&m).unwrap();
        assert_eq!(e.values, vec![0.0, 1.0, 4.0]);
        for i in 0..3 {
            let v = e.vector(i);
            assert!((v[i] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn swap_matrix_eigenvalues() {
        let m = SymmetricMatrix::from_fn(2, |a, b| if a == b { 0.0 } else { 1.0 });
        let e = sym_eigen(&m).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn non_finite_rejected() {
        let m = SymmetricMatrix::from_fn(2, |_, _| f64::NAN);
        assert!(matches!(sym_eigen(&m), Err(Error::InvalidMatrix)));
    }

    #[test]
    fn eigen_contract_on_random_matrices() {
        for seed in 0..1000u64 {
            let dim = 2 + (seed as usize % 11);
            let m = random_symmetric(dim, seed);
            let e = sym_eigen(&m).unwrap();
            let scale = 1.0 + m.max_abs();
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            let gram = e.vectors.transpose() * &e.vectors;
            assert!((gram - DMatrix::<f64>::identity(dim, dim)).amax() < 1e-10);
            assert!(reconstruction_residual(&m, &e) <= 1e-9 * scale);
            let sum: f64 = e.values.iter().sum();
            assert!((sum - m.trace()).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn complement_of_basis_vector() {
        let x = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let q = orthonormal_complement(&x).unwrap();
        assert_eq!(q.ncols(), 2);
        for j in 0..2 {
            assert!(q[(0, j)].abs() < 1e-15);
        }
        let gram = q.transpose() * &q;
        assert!((gram - DMatrix::<f64>::identity(2, 2)).amax() < 1e-14);
    }

    #[test]
    fn complement_of_diagonal_in_plane() {
        let s = 1.0 / 2f64.sqrt();
        let q = orthonormal_complement(&DVector::from_vec(vec![s, s])).unwrap();
        assert_eq!(q.ncols(), 1);
        let v = q.column(0);
        assert!((v[0].abs() - s).abs() < 1e-15);
        assert!((v[0] + v[1]).abs() < 1e-15);
    }

    #[test]
    fn complement_of_zero_vector_fails() {
        assert!(matches!(
            orthonormal_complement(&DVector::zeros(3)),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn clustering_examples() {
        let c = cluster_eigenvalues(&[1.0, 1.0 + 1e-12, 4.0], 1e-6).unwrap();
        assert_eq!(c.multiplicities(), vec![2, 1]);
        assert!((c.clusters[0].value - 1.0).abs() < 1e-11);
        assert_eq!(c.clusters[1].value, 4.0);

        let c = cluster_eigenvalues(&[5.0], 0.3).unwrap();
        assert_eq!(c.clusters, vec![EigenCluster { value: 5.0, multiplicity: 1 }]);

        let c = cluster_eigenvalues(&[0.0, 1e-8, 1.0], 1e-6).unwrap();
        assert_eq!(c.multiplicities(), vec![2, 1]);
        assert!(c.clusters[0].value.abs() < 1e-8);

        assert!(matches!(cluster_eigenvalues(&[], 1e-6), Err(Error::EmptyInput)));
    }

    #[test]
    fn sphere_samples_are_unit_and_deterministic() {
        let a = sample_unit_sphere(3, 2, 42);
        let b = sample_unit_sphere(3, 2, 42);
        assert_eq!(a, b);
        for x in sample_unit_sphere(7, 500, 9) {
            assert!((x.norm_squared() - 1.0).abs() <= 1e-12);
        }
        assert_ne!(sample_unit_sphere(4, 3, 1), sample_unit_sphere(4, 3, 2));
    }

    #[test]
    fn sphere_sample_mean_is_centered() {
        let xs = sample_unit_sphere(4, 10_000, 2024);
        let mean = xs.iter().fold(DVector::zeros(4), |acc, x| acc + x) / xs.len() as f64;
        for c in mean.iter() {
            assert!(c.abs() < 0.05, "coordinate mean {c}");
        }
    }

    fn e(dim: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(dim);
        v[i] = 1.0;
        v
    }

    #[test]
    fn intersection_examples() {
        let a = [e(3, 0), e(3, 1)];
        let b = [e(3, 1), e(3, 2)];
        assert_eq!(subspace_intersection_dim(&a, &b, 1e-8).unwrap(), 1);
        assert_eq!(subspace_intersection_dim(&a, &a, 1e-8).unwrap(), 2);

        let u = sample_unit_sphere(5, 7, 3);
        let dim = subspace_intersection_dim(&u[..3], &u[3..6], 1e-8).unwrap();
        assert!(dim >= 1);

        let dependent = [e(3, 0), e(3, 0) * 2.0];
        assert!(matches!(
            subspace_intersection_dim(&dependent, &b, 1e-8),
            Err(Error::DegenerateBasis { .. })
        ));
    }

    #[test]
    fn random_orthogonal_is_orthogonal() {
        let q = random_orthogonal(6, 11);
        assert!((q.transpose() * &q - DMatrix::<f64>::identity(6, 6)).amax() < 1e-13);
    }

    proptest! {
        #[test]
        fn clustering_is_idempotent(
            mut values in prop::collection::vec(-10.0f64..10.0, 1..12),
            rel_tol in 1e-8f64..1e-1,
        ) {
            values.sort_by(f64::total_cmp);
            let first = cluster_eigenvalues(&values, rel_tol).unwrap();
            let again = cluster_eigenvalues(&first.values(), rel_tol).unwrap();
            prop_assert_eq!(again.values(), first.values());
            prop_assert_eq!(first.total_multiplicity(), values.len());
        }

        #[test]
        fn complement_is_orthonormal(v in prop::collection::vec(-5.0f64..5.0, 2..9)) {
            let x = DVector::from_vec(v);
            prop_assume!(x.norm() > 1e-6);
            let q = orthonormal_complement(&x).unwrap();
            let u = &x / x.norm();
            for j in 0..q.ncols() {
                prop_assert!(q.column(j).dot(&u).abs() <= 1e-12);
            }
            let gram = q.transpose() * &q;
            prop_assert!((gram - DMatrix::<f64>::identity(q.ncols(), q.ncols())).amax() <= 1e-12);
        }
    }
}
