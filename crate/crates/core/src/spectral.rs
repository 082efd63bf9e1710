//! Jacobi operators and their spectra.
//!
//! All sampling verdicts here are one-sided: a sample can refute the k-root
//! or Osserman property but can only be consistent with it.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::AlgebraicCurvatureTensor;
use crate::error::{Error, Result};
use crate::linalg::{
    cluster_ranges, cluster_tolerance, orthonormal_complement, sample_unit_sphere, sym_eigen,
    EigenCluster, EigenClusterSet, SymmetricMatrix,
};

pub const DEFAULT_SAMPLES: usize = 256;

/// `(J_X)_{ab} = Σ_{i,j} R[b][i][j][a] x_i x_j`, symmetrized.
pub fn jacobi_matrix(r: &AlgebraicCurvatureTensor, x: &DVector<f64>) -> SymmetricMatrix {
    let n = r.dim();
    assert_eq!(x.len(), n, "vector dimension does not match tensor");
    let data = r.components();
    // contract the middle pair first: M[b][a] = Σ_ij R[b][i][j][a] x_i x_j
    let mut m = DMatrix::<f64>::zeros(n, n);
    for b in 0..n {
        for i in 0..n {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = xi * x[j];
                if w == 0.0 {
                    continue;
                }
                let base = ((b * n + i) * n + j) * n;
                for a in 0..n {
                    m[(a, b)] += data[base + a] * w;
                }
            }
        }
    }
    SymmetricMatrix::symmetrize(&m).expect("square by construction")
}

/// `J_X` restricted to `x^⊥`, in the basis returned by `orthonormal_complement`.
pub fn reduced_jacobi(r: &AlgebraicCurvatureTensor, x: &DVector<f64>) -> Result<SymmetricMatrix> {
    Ok(reduced_with_basis(r, x)?.0)
}

fn reduced_with_basis(
    r: &AlgebraicCurvatureTensor,
    x: &DVector<f64>,
) -> Result<(SymmetricMatrix, DMatrix<f64>)> {
    let q = orthonormal_complement(x)?;
    let j = jacobi_matrix(r, x);
    let reduced = q.transpose() * j.as_matrix() * &q;
    Ok((SymmetricMatrix::symmetrize(&reduced)?, q))
}

/// Reduced spectrum at `x` normalized by `ε_x`, with eigenvectors in ambient coordinates.
#[derive(Clone, Debug)]
pub(crate) struct ReducedSpectrum {
    pub values: Vec<f64>,
    /// `n × (n−1)`, column `i` pairs with `values[i]`.
    pub vectors: DMatrix<f64>,
}

impl ReducedSpectrum {
    pub fn vector(&self, i: usize) -> DVector<f64> {
        self.vectors.column(i).into_owned()
    }
}

pub(crate) fn reduced_spectrum(
    r: &AlgebraicCurvatureTensor,
    x: &DVector<f64>,
) -> Result<ReducedSpectrum> {
    let (m, q) = reduced_with_basis(r, x)?;
    let eps = x.norm_squared();
    let eig = sym_eigen(&m)?;
    Ok(ReducedSpectrum {
        values: eig.values.iter().map(|v| v / eps).collect(),
        vectors: q * eig.vectors,
    })
}

/// The two roots of a two-cluster spectrum. `mu_x` is always the smaller value;
/// `p`, `q` are the multiplicities of `mu_x` and `nu_x` respectively.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootPair {
    pub mu_x: f64,
    pub nu_x: f64,
    pub p: usize,
    pub q: usize,
    /// Set when `p < q`: the usual normalization `p >= q` would require `−R`.
    pub multiplicity_order_swapped: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub point: Vec<f64>,
    pub clusters: EigenClusterSet,
    pub roots: Option<RootPair>,
}

impl SpectralProfile {
    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }
}

/// Clustered reduced spectrum plus the index ranges into the sorted eigenvalues.
#[derive(Clone, Debug)]
pub(crate) struct ProfiledSpectrum {
    pub spectrum: ReducedSpectrum,
    pub ranges: Vec<std::ops::Range<usize>>,
    pub profile: SpectralProfile,
}

impl ProfiledSpectrum {
    pub fn cluster_vectors(&self, idx: usize) -> Vec<DVector<f64>> {
        self.ranges[idx]
            .clone()
            .map(|i| self.spectrum.vector(i))
            .collect()
    }
}

pub(crate) fn profile_full(
    r: &AlgebraicCurvatureTensor,
    x: &DVector<f64>,
    rel_tol: f64,
) -> Result<ProfiledSpectrum> {
    let spectrum = reduced_spectrum(r, x)?;
    let tol = cluster_tolerance(&spectrum.values, rel_tol);
    let ranges = if spectrum.values.is_empty() {
        Vec::new()
    } else {
        cluster_ranges(&spectrum.values, tol)
    };
    let clusters: Vec<EigenCluster> = ranges
        .iter()
        .map(|rg| {
            let members = &spectrum.values[rg.clone()];
            EigenCluster {
                value: members.iter().sum::<f64>() / members.len() as f64,
                multiplicity: members.len(),
            }
        })
        .collect();
    let roots = (clusters.len() == 2).then(|| RootPair {
        mu_x: clusters[0].value,
        nu_x: clusters[1].value,
        p: clusters[0].multiplicity,
        q: clusters[1].multiplicity,
        multiplicity_order_swapped: clusters[0].multiplicity < clusters[1].multiplicity,
    });
    let profile = SpectralProfile {
        point: x.iter().copied().collect(),
        clusters: EigenClusterSet {
            clusters,
            tolerance_used: tol,
        },
        roots,
    };
    Ok(ProfiledSpectrum {
        spectrum,
        ranges,
        profile,
    })
}

pub fn spectral_profile(
    r: &AlgebraicCurvatureTensor,
    x: &DVector<f64>,
    rel_tol: f64,
) -> Result<SpectralProfile> {
    Ok(profile_full(r, x, rel_tol)?.profile)
}

/// Orthonormal bases of the two reduced eigenspaces at `x`:
/// `m_basis` for the smaller root, `n_basis` for the larger.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenspacePair {
    pub m_basis: Vec<DVector<f64>>,
    pub n_basis: Vec<DVector<f64>>,
}

pub fn eigenspaces(
    r: &AlgebraicCurvatureTensor,
    x: &DVector<f64>,
    rel_tol: f64,
) -> Result<EigenspacePair> {
    let full = profile_full(r, x, rel_tol)?;
    if full.ranges.len() != 2 {
        return Err(Error::NotTwoRoot {
            clusters: full.ranges.len(),
        });
    }
    Ok(EigenspacePair {
        m_basis: full.cluster_vectors(0),
        n_basis: full.cluster_vectors(1),
    })
}

/// Profiles at every sample, evaluated in parallel; order follows the samples.
pub(crate) fn profile_samples(
    r: &AlgebraicCurvatureTensor,
    points: &[DVector<f64>],
    rel_tol: f64,
) -> Result<Vec<ProfiledSpectrum>> {
    points
        .par_iter()
        .map(|x| profile_full(r, x, rel_tol))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KRootVerdict {
    /// Every sample shows `k` clusters with the same multiplicity pattern.
    Consistent {
        k: usize,
        multiplicities: Vec<usize>,
    },
    /// Two samples with different cluster patterns.
    Varying {
        witness_a: Vec<f64>,
        multiplicities_a: Vec<usize>,
        witness_b: Vec<f64>,
        multiplicities_b: Vec<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KRootReport {
    pub verdict: KRootVerdict,
    pub statement: String,
    pub samples: usize,
    pub seed: u64,
    pub rel_tol: f64,
}

impl KRootReport {
    pub fn k(&self) -> Option<usize> {
        match &self.verdict {
            KRootVerdict::Consistent { k, .. } => Some(*k),
            KRootVerdict::Varying { .. } => None,
        }
    }

    pub fn multiplicities(&self) -> Option<&[usize]> {
        match &self.verdict {
            KRootVerdict::Consistent { multiplicities, .. } => Some(multiplicities),
            KRootVerdict::Varying { .. } => None,
        }
    }
}

pub(crate) fn k_root_from_profiles(
    profiles: &[SpectralProfile],
    seed: u64,
    rel_tol: f64,
) -> KRootReport {
    let samples = profiles.len();
    let first = &profiles[0];
    let first_mult = first.clusters.multiplicities();
    let mismatch = profiles
        .iter()
        .find(|p| p.clusters.multiplicities() != first_mult);
    let (verdict, statement) = match mismatch {
        None => (
            KRootVerdict::Consistent {
                k: first_mult.len(),
                multiplicities: first_mult.clone(),
            },
            format!(
                "consistent with {}-root at {samples} samples (multiplicities {:?})",
                first_mult.len(),
                first_mult
            ),
        ),
        Some(other) => (
            KRootVerdict::Varying {
                witness_a: first.point.clone(),
                multiplicities_a: first_mult.clone(),
                witness_b: other.point.clone(),
                multiplicities_b: other.clusters.multiplicities(),
            },
            format!("not k-root: cluster pattern varies across {samples} samples"),
        ),
    };
    KRootReport {
        verdict,
        statement,
        samples,
        seed,
        rel_tol,
    }
}

pub fn classify_k_root(
    r: &AlgebraicCurvatureTensor,
    samples: usize,
    seed: u64,
    rel_tol: f64,
) -> Result<KRootReport> {
    if samples == 0 {
        return Err(Error::InvalidParams("samples must be at least 1".into()));
    }
    let points = sample_unit_sphere(r.dim(), samples, seed);
    let profiles: Vec<SpectralProfile> = profile_samples(r, &points, rel_tol)?
        .into_iter()
        .map(|p| p.profile)
        .collect();
    Ok(k_root_from_profiles(&profiles, seed, rel_tol))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OssermanReport {
    pub osserman: bool,
    /// Largest coordinatewise spread of the sorted reduced spectra.
    pub max_deviation: f64,
    pub threshold: f64,
    pub witness_a: Vec<f64>,
    pub witness_b: Vec<f64>,
    pub spectrum_a: Vec<f64>,
    pub spectrum_b: Vec<f64>,
    pub statement: String,
    pub samples: usize,
    pub seed: u64,
    pub rel_tol: f64,
}

pub(crate) fn osserman_from_spectra(
    points: &[DVector<f64>],
    spectra: &[Vec<f64>],
    seed: u64,
    rel_tol: f64,
) -> OssermanReport {
    let m = spectra[0].len();
    let radius = spectra
        .iter()
        .flatten()
        .fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let threshold = rel_tol * radius.max(1.0);
    let (mut best, mut ia, mut ib) = (0.0_f64, 0usize, 0usize);
    for coord in 0..m {
        let (mut lo, mut hi) = (0usize, 0usize);
        for (s, spec) in spectra.iter().enumerate() {
            if spec[coord] < spectra[lo][coord] {
                lo = s;
            }
            if spec[coord] > spectra[hi][coord] {
                hi = s;
            }
        }
        let spread = spectra[hi][coord] - spectra[lo][coord];
        if spread > best {
            best = spread;
            ia = hi;
            ib = lo;
        }
    }
    let osserman = best <= threshold;
    let samples = spectra.len();
    let statement = if osserman {
        format!("consistent with Osserman at {samples} samples")
    } else {
        format!("not Osserman: reduced spectra differ by {best:.6e} between witnesses")
    };
    OssermanReport {
        osserman,
        max_deviation: best,
        threshold,
        witness_a: points[ia].iter().copied().collect(),
        witness_b: points[ib].iter().copied().collect(),
        spectrum_a: spectra[ia].clone(),
        spectrum_b: spectra[ib].clone(),
        statement,
        samples,
        seed,
        rel_tol,
    }
}

pub fn osserman_test(
    r: &AlgebraicCurvatureTensor,
    samples: usize,
    seed: u64,
    rel_tol: f64,
) -> Result<OssermanReport> {
    if samples < 2 {
        return Err(Error::InvalidParams(
            "the Osserman test needs at least 2 samples".into(),
        ));
    }
    let points = sample_unit_sphere(r.dim(), samples, seed);
    let spectra: Vec<Vec<f64>> = points
        .par_iter()
        .map(|x| reduced_spectrum(r, x).map(|s| s.values))
        .collect::<Result<_>>()?;
    Ok(osserman_from_spectra(&points, &spectra, seed, rel_tol))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinConstant {
    pub k: u32,
    /// Mean of `tr(J_X^k) / ε_X^k` over the samples.
    pub value: f64,
    /// `max − min` of the same quantity.
    pub deviation: f64,
    /// `p·μ^k + q·ν^k` from the sampled two-root spectrum, when applicable.
    pub two_root_formula: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinReport {
    pub constants: Vec<SteinConstant>,
    pub max_deviation: f64,
    /// `max_k |C_k − (p·μ^k + q·ν^k)|` when every sample is two-root with one pattern.
    pub formula_max_deviation: Option<f64>,
    pub samples: usize,
    pub seed: u64,
}

pub(crate) fn stein_from_spectra(
    spectra: &[Vec<f64>],
    profiles: &[SpectralProfile],
    k_max: u32,
    seed: u64,
) -> SteinReport {
    let roots: Option<Vec<RootPair>> = profiles.iter().map(|p| p.roots).collect();
    let two_root = roots.filter(|rs| {
        rs.iter()
            .all(|r| (r.p, r.q) == (rs[0].p, rs[0].q))
    });
    let mut constants = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let traces: Vec<f64> = spectra
            .iter()
            .map(|s| s.iter().map(|v| v.powi(k as i32)).sum())
            .collect();
        let mean = traces.iter().sum::<f64>() / traces.len() as f64;
        let lo = traces.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = traces.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let formula = two_root.as_ref().map(|rs| {
            rs.iter()
                .map(|r| r.p as f64 * r.mu_x.powi(k as i32) + r.q as f64 * r.nu_x.powi(k as i32))
                .sum::<f64>()
                / rs.len() as f64
        });
        constants.push(SteinConstant {
            k,
            value: mean,
            deviation: hi - lo,
            two_root_formula: formula,
        });
    }
    let max_deviation = constants.iter().fold(0.0_f64, |m, c| m.max(c.deviation));
    let formula_max_deviation = two_root.as_ref().map(|_| {
        constants.iter().fold(0.0_f64, |m, c| {
            m.max((c.value - c.two_root_formula.unwrap_or(f64::NAN)).abs())
        })
    });
    SteinReport {
        constants,
        max_deviation,
        formula_max_deviation,
        samples: spectra.len(),
        seed,
    }
}

pub fn k_stein_invariants(
    r: &AlgebraicCurvatureTensor,
    k_max: u32,
    samples: usize,
    seed: u64,
) -> Result<SteinReport> {
    if k_max == 0 || samples == 0 {
        return Err(Error::InvalidParams(
            "k_max and samples must be at least 1".into(),
        ));
    }
    let points = sample_unit_sphere(r.dim(), samples, seed);
    let full = profile_samples(r, &points, crate::linalg::DEFAULT_CLUSTER_TOL)?;
    let spectra: Vec<Vec<f64>> = full.iter().map(|p| p.spectrum.values.clone()).collect();
    let profiles: Vec<SpectralProfile> = full.into_iter().map(|p| p.profile).collect();
    Ok(stein_from_spectra(&spectra, &profiles, k_max, seed))
}
