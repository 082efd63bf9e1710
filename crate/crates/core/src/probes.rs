//! Executable checks of the structural identities satisfied by two-root tensors.
//!
//! Each check samples unit directions and returns only the identities that
//! fail, as [`ViolationRecord`]s, together with the number of identities that
//! were evaluated. An empty violation list is evidence, not proof.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::AlgebraicCurvatureTensor;
use crate::error::{Error, Result};
use crate::linalg::{sample_unit_sphere, subspace_intersection_dim};
use crate::spectral::{jacobi_matrix, profile_full, profile_samples, ProfiledSpectrum, RootPair};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Duality,
    NotTwoRoot,
    EigenvalueBoundsM,
    EigenvalueBoundsN,
    EmexM,
    EmexN,
    RotationLemma,
    Intersection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub check: CheckName,
    pub inputs: Vec<Vec<f64>>,
    pub magnitude: f64,
}

impl ViolationRecord {
    fn new(check: CheckName, inputs: &[&DVector<f64>], magnitude: f64) -> Self {
        Self {
            check,
            inputs: inputs.iter().map(|v| v.iter().copied().collect()).collect(),
            magnitude,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub checked: usize,
    pub violations: Vec<ViolationRecord>,
}

impl CheckOutcome {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn merge(mut self, other: CheckOutcome) -> Self {
        self.checked += other.checked;
        self.violations.extend(other.violations);
        self
    }
}

fn merge_all(parts: Vec<CheckOutcome>) -> CheckOutcome {
    parts.into_iter().fold(CheckOutcome::default(), CheckOutcome::merge)
}

/// Mutually orthogonal `X`, `Y` with `J_X Y = ε_X λ Y` and `J_Y X = ε_Y λ X`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualPair {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub lambda: f64,
}

/// Which eigenvectors the duality check tests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DualityMode {
    /// Every reduced eigenvector at every sample.
    AllEigenvectors,
    /// Two-root tensor with a varying root: eigenvectors of the roots that are
    /// constant over the sample, for which every direction is extremal.
    ConstantRoots { mu_constant: bool, nu_constant: bool },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualityOutcome {
    pub mode: DualityMode,
    pub outcome: CheckOutcome,
    pub pairs: Vec<DualPair>,
}

fn eigen_scale(profiles: &[ProfiledSpectrum]) -> f64 {
    profiles
        .iter()
        .flat_map(|p| p.spectrum.values.iter())
        .fold(1.0_f64, |m, v| m.max(v.abs()))
}

/// Common two-root multiplicity pattern of all profiles, if there is one.
fn common_two_root(profiles: &[ProfiledSpectrum]) -> Option<Vec<RootPair>> {
    let roots: Option<Vec<RootPair>> = profiles.iter().map(|p| p.profile.roots).collect();
    roots.filter(|rs| rs.iter().all(|r| (r.p, r.q) == (rs[0].p, rs[0].q)))
}

fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    hi - lo
}

pub(crate) fn duality_mode(profiles: &[ProfiledSpectrum], rel_tol: f64) -> DualityMode {
    let Some(roots) = common_two_root(profiles) else {
        return DualityMode::AllEigenvectors;
    };
    let tol = rel_tol * eigen_scale(profiles);
    let mu_constant = spread(roots.iter().map(|r| r.mu_x)) <= tol;
    let nu_constant = spread(roots.iter().map(|r| r.nu_x)) <= tol;
    if mu_constant && nu_constant {
        DualityMode::AllEigenvectors
    } else {
        DualityMode::ConstantRoots {
            mu_constant,
            nu_constant,
        }
    }
}

/// `|J_Y X − λ' X|` with `λ'` the Rayleigh quotient `g(J_Y X, X) / ε_X`.
fn duality_residual(r: &AlgebraicCurvatureTensor, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let jy = jacobi_matrix(r, y);
    let v = jy.as_matrix() * x;
    let lambda = v.dot(x) / x.norm_squared();
    (v - x * lambda).norm()
}

/// Rakić duality: `Y` eigenvector of `J_X` implies `X` eigenvector of `J_Y`.
///
/// For a two-root tensor whose roots are not both constant, only the
/// eigenvectors of constant roots are tested: there every direction lies in
/// the extremal set where duality is guaranteed. Otherwise all eigenvectors
/// are tested.
pub fn duality_check(
    r: &AlgebraicCurvatureTensor,
    samples: usize,
    seed: u64,
    rel_tol: f64,
) -> Result<DualityOutcome> {
    let points = sample_unit_sphere(r.dim(), samples, seed);
    let profiles = profile_samples(r, &points, rel_tol)?;
    let mode = duality_mode(&profiles, rel_tol);
    let threshold = rel_tol * r.scale();

    let per_sample: Vec<(CheckOutcome, Vec<DualPair>)> = points
        .par_iter()
        .zip(profiles.par_iter())
        .map(|(x, prof)| {
            let clusters: Vec<usize> = match mode {
                DualityMode::AllEigenvectors => (0..prof.ranges.len()).collect(),
                DualityMode::ConstantRoots {
                    mu_constant,
                    nu_constant,
                } => [(0, mu_constant), (1, nu_constant)]
                    .into_iter()
                    .filter_map(|(c, keep)| keep.then_some(c))
                    .collect(),
            };
            let mut out = CheckOutcome::default();
            let mut pairs = Vec::new();
            for c in clusters {
                for i in prof.ranges[c].clone() {
                    let y = prof.spectrum.vector(i);
                    let res = duality_residual(r, x, &y);
                    out.checked += 1;
                    if res > threshold {
                        out.violations
                            .push(ViolationRecord::new(CheckName::Duality, &[x, &y], res));
                    } else {
                        pairs.push(DualPair {
                            x: x.clone(),
                            y,
                            lambda: prof.spectrum.values[i],
                        });
                    }
                }
            }
            (out, pairs)
        })
        .collect();

    let mut pairs = Vec::new();
    let mut parts = Vec::with_capacity(per_sample.len());
    for (o, p) in per_sample {
        parts.push(o);
        pairs.extend(p);
    }
    Ok(DualityOutcome {
        mode,
        outcome: merge_all(parts),
        pairs,
    })
}

fn not_two_root(x: &DVector<f64>, prof: &ProfiledSpectrum) -> ViolationRecord {
    let k = prof.ranges.len() as f64;
    ViolationRecord::new(CheckName::NotTwoRoot, &[x], (k - 2.0).abs())
}

/// Interlacing bounds at a single point for given eigenspace bases:
/// `Y ∈ M(X) ⇒ μ_Y <= μ_X <= ν_Y` and `Y ∈ N(X) ⇒ μ_Y <= ν_X <= ν_Y`.
pub fn eigenvalue_bounds_at(
    r: &AlgebraicCurvatureTensor,
    x: &DVector<f64>,
    roots_x: (f64, f64),
    m_basis: &[DVector<f64>],
    n_basis: &[DVector<f64>],
    rel_tol: f64,
) -> Result<CheckOutcome> {
    let (mu_x, nu_x) = roots_x;
    let mut out = CheckOutcome::default();
    for (basis, check, value_x) in [
        (m_basis, CheckName::EigenvalueBoundsM, mu_x),
        (n_basis, CheckName::EigenvalueBoundsN, nu_x),
    ] {
        for y in basis {
            out.checked += 1;
            let prof_y = profile_full(r, y, rel_tol)?;
            let Some(ry) = prof_y.profile.roots else {
                out.violations.push(not_two_root(y, &prof_y));
                continue;
            };
            let slack = rel_tol * 1f64.max(mu_x.abs()).max(nu_x.abs()).max(ry.mu_x.abs()).max(ry.nu_x.abs());
            let excess = (ry.mu_x - value_x).max(value_x - ry.nu_x);
            if excess > slack {
                out.violations
                    .push(ViolationRecord::new(check, &[x, y], excess));
            }
        }
    }
    Ok(out)
}

pub fn eigenvalue_bounds_check(
    r: &AlgebraicCurvatureTensor,
    samples: usize,
    seed: u64,
    rel_tol: f64,
) -> Result<CheckOutcome> {
    let points = sample_unit_sphere(r.dim(), samples, seed);
    let parts: Vec<CheckOutcome> = points
        .par_iter()
        .map(|x| {
            let prof = profile_full(r, x, rel_tol)?;
            let Some(rx) = prof.profile.roots else {
                return Ok(CheckOutcome {
                    checked: 1,
                    violations: vec![not_two_root(x, &prof)],
                });
            };
            eigenvalue_bounds_at(
                r,
                x,
                (rx.mu_x, rx.nu_x),
                &prof.cluster_vectors(0),
                &prof.cluster_vectors(1),
                rel_tol,
            )
        })
        .collect::<Result<_>>()?;
    Ok(merge_all(parts))
}

/// Squared-norm decomposition of `X` against the eigenspaces of `J_Y`:
/// for `Y ∈ M(X)`, `ε_M = ε_X (ν_Y − μ_X)/(ν_Y − μ_Y)`; for `Y ∈ N(X)`,
/// `ε_N = ε_X (μ_Y − ν_X)/(μ_Y − ν_Y)`.
pub fn emex_check(
    r: &AlgebraicCurvatureTensor,
    samples: usize,
    seed: u64,
    rel_tol: f64,
) -> Result<CheckOutcome> {
    let points = sample_unit_sphere(r.dim(), samples, seed);
    let parts: Vec<CheckOutcome> = points
        .par_iter()
        .map(|x| {
            let prof = profile_full(r, x, rel_tol)?;
            let Some(rx) = prof.profile.roots else {
                return Ok(CheckOutcome {
                    checked: 1,
                    violations: vec![not_two_root(x, &prof)],
                });
            };
            let eps_x = x.norm_squared();
            let mut out = CheckOutcome::default();
            for (cluster, check) in [(0usize, CheckName::EmexM), (1, CheckName::EmexN)] {
                for y in prof.cluster_vectors(cluster) {
                    out.checked += 1;
                    let prof_y = profile_full(r, &y, rel_tol)?;
                    let Some(ry) = prof_y.profile.roots else {
                        out.violations.push(not_two_root(&y, &prof_y));
                        continue;
                    };
                    let (measured, expected) = if cluster == 0 {
                        let eps_m: f64 = prof_y.cluster_vectors(0).iter().map(|m| m.dot(x).powi(2)).sum();
                        (eps_m, eps_x * (ry.nu_x - rx.mu_x) / (ry.nu_x - ry.mu_x))
                    } else {
                        let eps_n: f64 = prof_y.cluster_vectors(1).iter().map(|n| n.dot(x).powi(2)).sum();
                        (eps_n, eps_x * (ry.mu_x - rx.nu_x) / (ry.mu_x - ry.nu_x))
                    };
                    let err = (measured - expected).abs();
                    if err > rel_tol * eps_x {
                        out.violations
                            .push(ViolationRecord::new(check, &[x, &y], err));
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(merge_all(parts))
}

/// `J_{αX+βY}(ε_Y βX − ε_X αY) = ε_{αX+βY} λ (ε_Y βX − ε_X αY)` for the
/// supplied pairs, with `(α, β)` drawn from a seeded Gaussian. The pair
/// hypothesis is taken as given.
pub fn rotation_lemma_on_pairs(
    r: &AlgebraicCurvatureTensor,
    pairs: &[DualPair],
    seed: u64,
    rel_tol: f64,
) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<(f64, f64)> = pairs
        .iter()
        .map(|_| (StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    let threshold = rel_tol * r.scale();
    let parts: Vec<CheckOutcome> = pairs
        .par_iter()
        .zip(coeffs.par_iter())
        .map(|(pair, &(alpha, beta))| {
            let res = rotation_residual(r, pair, alpha, beta);
            let mut out = CheckOutcome {
                checked: 1,
                violations: Vec::new(),
            };
            if res > threshold {
                out.violations.push(ViolationRecord::new(
                    CheckName::RotationLemma,
                    &[&pair.x, &pair.y],
                    res,
                ));
            }
            out
        })
        .collect();
    merge_all(parts)
}

/// Residual of the rotation identity, normalized by `ε_Z |V|`.
pub fn rotation_residual(r: &AlgebraicCurvatureTensor, pair: &DualPair, alpha: f64, beta: f64) -> f64 {
    let (x, y) = (&pair.x, &pair.y);
    let (ex, ey) = (x.norm_squared(), y.norm_squared());
    let z = x * alpha + y * beta;
    let v = x * (ey * beta) - y * (ex * alpha);
    let ez = z.norm_squared();
    let lhs = jacobi_matrix(r, &z).as_matrix() * &v;
    let rhs = &v * (ez * pair.lambda);
    let norm = ez * v.norm();
    if norm == 0.0 {
        return (lhs - rhs).norm();
    }
    (lhs - rhs).norm() / norm
}

pub fn rotation_lemma_check(
    r: &AlgebraicCurvatureTensor,
    samples: usize,
    seed: u64,
    rel_tol: f64,
) -> Result<CheckOutcome> {
    let duality = duality_check(r, samples, seed, rel_tol)?;
    if duality.pairs.is_empty() {
        return Err(Error::NoDualPairsFound);
    }
    Ok(rotation_lemma_on_pairs(
        r,
        &duality.pairs,
        seed.wrapping_add(1),
        rel_tol,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremaReport {
    pub mu_min: f64,
    pub mu_max: f64,
    pub nu_min: f64,
    pub nu_max: f64,
    /// Direction attaining `mu_min`.
    pub witness_u: Vec<f64>,
    /// Direction attaining `nu_max`.
    pub witness_w: Vec<f64>,
    pub refinement_steps_u: usize,
    pub refinement_steps_w: usize,
    /// `dim((Span{U} ⊕ M(U)) ∩ (Span{W} ⊕ N(W)))`.
    pub intersection_dim: usize,
    pub violations: Vec<ViolationRecord>,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Copy)]
enum Extremum {
    MinOfSmaller,
    MaxOfLarger,
}

impl Extremum {
    fn cluster(self) -> usize {
        match self {
            Extremum::MinOfSmaller => 0,
            Extremum::MaxOfLarger => 1,
        }
    }

    fn value(self, roots: &RootPair) -> f64 {
        match self {
            Extremum::MinOfSmaller => roots.mu_x,
            Extremum::MaxOfLarger => roots.nu_x,
        }
    }

    fn improves(self, new: f64, old: f64, eps: f64) -> bool {
        match self {
            Extremum::MinOfSmaller => new < old - eps,
            Extremum::MaxOfLarger => new > old + eps,
        }
    }
}

const MAX_REFINE_STEPS: usize = 200;

/// Alternating coordinate search over orthonormal pairs: `Y` is an extremal
/// eigenvector of `J_X`, then the next `X` an extremal eigenvector of `J_Y`.
/// Each step is monotone in the targeted root.
fn refine(
    r: &AlgebraicCurvatureTensor,
    start: &DVector<f64>,
    start_value: f64,
    which: Extremum,
    rel_tol: f64,
) -> Result<(DVector<f64>, f64, usize)> {
    let eps = 1e-15 * r.scale();
    let c = which.cluster();
    let (mut x, mut value) = (start.clone(), start_value);
    for step in 0..MAX_REFINE_STEPS {
        let prof_x = profile_full(r, &x, rel_tol)?;
        if prof_x.ranges.len() != 2 {
            return Ok((x, value, step));
        }
        let y = prof_x.spectrum.vector(prof_x.ranges[c].start);
        let prof_y = profile_full(r, &y, rel_tol)?;
        if prof_y.ranges.len() != 2 {
            return Ok((x, value, step));
        }
        let candidate = prof_y.spectrum.vector(prof_y.ranges[c].start);
        let Some(roots) = profile_full(r, &candidate, rel_tol)?.profile.roots else {
            return Ok((x, value, step));
        };
        let new_value = which.value(&roots);
        if !which.improves(new_value, value, eps) {
            return Ok((x, value, step));
        }
        x = candidate;
        value = new_value;
    }
    Ok((x, value, MAX_REFINE_STEPS))
}

/// Sampled ranges of `μ_X` and `ν_X`, with witnesses for `μ_min` and `ν_max`
/// refined by alternating eigenvector search.
pub fn extrema_probe(
    r: &AlgebraicCurvatureTensor,
    samples: usize,
    seed: u64,
    rel_tol: f64,
) -> Result<ExtremaReport> {
    let points = sample_unit_sphere(r.dim(), samples, seed);
    let profiles = profile_samples(r, &points, rel_tol)?;
    let mut roots = Vec::with_capacity(profiles.len());
    for p in &profiles {
        match p.profile.roots {
            Some(rt) => roots.push(rt),
            None => {
                return Err(Error::NotTwoRoot {
                    clusters: p.ranges.len(),
                })
            }
        }
    }
    let argmin = (0..roots.len())
        .min_by(|&a, &b| roots[a].mu_x.total_cmp(&roots[b].mu_x))
        .ok_or(Error::EmptyInput)?;
    let argmax = (0..roots.len())
        .max_by(|&a, &b| roots[a].nu_x.total_cmp(&roots[b].nu_x))
        .ok_or(Error::EmptyInput)?;
    let mu_max = roots.iter().map(|r| r.mu_x).fold(f64::NEG_INFINITY, f64::max);
    let nu_min = roots.iter().map(|r| r.nu_x).fold(f64::INFINITY, f64::min);

    let (u, mu_min, steps_u) = refine(r, &points[argmin], roots[argmin].mu_x, Extremum::MinOfSmaller, rel_tol)?;
    let (w, nu_max, steps_w) = refine(r, &points[argmax], roots[argmax].nu_x, Extremum::MaxOfLarger, rel_tol)?;

    let prof_u = profile_full(r, &u, rel_tol)?;
    let prof_w = profile_full(r, &w, rel_tol)?;
    let mut span_u = vec![u.clone()];
    span_u.extend(prof_u.cluster_vectors(0));
    let mut span_w = vec![w.clone()];
    span_w.extend(prof_w.cluster_vectors(1));
    let intersection_dim = subspace_intersection_dim(&span_u, &span_w, 1e-8)?;
    let mut violations = Vec::new();
    if intersection_dim < 1 {
        violations.push(ViolationRecord::new(CheckName::Intersection, &[&u, &w], 1.0));
    }

    Ok(ExtremaReport {
        mu_min,
        mu_max: mu_max.max(mu_min),
        nu_min: nu_min.min(nu_max),
        nu_max,
        witness_u: u.iter().copied().collect(),
        witness_w: w.iter().copied().collect(),
        refinement_steps_u: steps_u,
        refinement_steps_w: steps_w,
        intersection_dim,
        violations,
        samples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{build_r0, build_two_root_model, Sign, TwoRootModelParams};
    use crate::linalg::random_orthogonal;
    use crate::spectral::{eigenspaces, spectral_profile};

    fn model(nus: Vec<f64>, mu: f64, sign: Sign, frame_seed: Option<u64>) -> AlgebraicCurvatureTensor {
        let n = 2 * nus.len();
        let frame = frame_seed.map_or_else(|| nalgebra::DMatrix::identity(n, n), |s| random_orthogonal(n, s));
        build_two_root_model(&TwoRootModelParams::new(n, mu, nus, frame, sign).unwrap()).unwrap()
    }

    fn unit(dim: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(dim);
        v[i] = 1.0;
        v
    }

    #[test]
    fn duality_on_r0_and_osserman_model() {
        let d = duality_check(&build_r0(5), 16, 1, 1e-7).unwrap();
        assert_eq!(d.mode, DualityMode::AllEigenvectors);
        assert!(d.outcome.is_clean());
        assert_eq!(d.outcome.checked, 16 * 4);

        let d = duality_check(&model(vec![2.0; 3], 0.5, Sign::Minus, Some(3)), 16, 2, 1e-7).unwrap();
        assert_eq!(d.mode, DualityMode::AllEigenvectors);
        assert!(d.outcome.is_clean(), "{:?}", d.outcome.violations.first());
    }

    #[test]
    fn duality_on_varying_model_tests_constant_root() {
        let d = duality_check(&model(vec![3.0, 2.0, 1.0], 1.0, Sign::Plus, Some(4)), 32, 3, 1e-7).unwrap();
        assert_eq!(
            d.mode,
            DualityMode::ConstantRoots {
                mu_constant: true,
                nu_constant: false
            }
        );
        assert!(d.outcome.is_clean());
        assert_eq!(d.outcome.checked, 32 * 4);
    }

    #[test]
    fn full_duality_fails_on_varying_model() {
        // the simple-root eigenvector P(X) is not dual unless X is extremal
        let r = model(vec![3.0, 2.0, 1.0], 1.0, Sign::Plus, None);
        let x = sample_unit_sphere(6, 1, 8).remove(0);
        let pair = eigenspaces(&r, &x, 1e-7).unwrap();
        assert!(duality_residual(&r, &x, &pair.n_basis[0]) > 1e-3);
        // at an extremal direction it is
        let e1 = unit(6, 0);
        let pair = eigenspaces(&r, &e1, 1e-7).unwrap();
        assert!(duality_residual(&r, &e1, &pair.n_basis[0]) < 1e-12);
    }

    #[test]
    fn bounds_hold_and_mislabeling_is_caught() {
        let r = model(vec![3.0, 2.0, 1.0], 0.0, Sign::Plus, Some(5));
        let out = eigenvalue_bounds_check(&r, 64, 4, 1e-7).unwrap();
        assert!(out.is_clean());
        assert_eq!(out.checked, 64 * 5);

        let mut caught = 0;
        for x in sample_unit_sphere(6, 32, 6) {
            let rx = spectral_profile(&r, &x, 1e-7).unwrap().roots.unwrap();
            let pair = eigenspaces(&r, &x, 1e-7).unwrap();
            let swapped = eigenvalue_bounds_at(&r, &x, (rx.mu_x, rx.nu_x), &pair.n_basis, &pair.m_basis, 1e-7).unwrap();
            caught += swapped.violations.len();
        }
        assert!(caught > 0);
    }

    #[test]
    fn emex_holds_on_models() {
        for sign in [Sign::Plus, Sign::Minus] {
            let r = model(vec![3.0, 2.0, 1.0], 0.3, sign, Some(6));
            let out = emex_check(&r, 48, 7, 1e-7).unwrap();
            assert!(out.is_clean(), "{:?}", out.violations.first());
            assert_eq!(out.checked, 48 * 5);
        }
    }

    #[test]
    fn emex_on_osserman_model_puts_x_in_m_of_y() {
        let r = model(vec![1.5; 3], 0.2, Sign::Plus, Some(2));
        let x = sample_unit_sphere(6, 1, 1).remove(0);
        let pair = eigenspaces(&r, &x, 1e-7).unwrap();
        let y = &pair.m_basis[0];
        let pair_y = eigenspaces(&r, y, 1e-7).unwrap();
        let eps_m: f64 = pair_y.m_basis.iter().map(|m| m.dot(&x).powi(2)).sum();
        assert!((eps_m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_lemma_on_r0_and_models() {
        let out = rotation_lemma_check(&build_r0(4), 8, 1, 1e-7).unwrap();
        assert!(out.is_clean());
        assert_eq!(out.checked, 8 * 3);

        let r = model(vec![2.0; 3], 1.0, Sign::Plus, None);
        let pair = DualPair { x: unit(6, 0), y: unit(6, 2), lambda: 1.0 };
        assert!(rotation_residual(&r, &pair, 0.7, -1.3) < 1e-12);
        // α = 1, β = 0 collapses to the hypothesis itself
        assert!(rotation_residual(&r, &pair, 1.0, 0.0) < 1e-12);

        let r = model(vec![3.0, 2.0, 1.0], -0.4, Sign::Minus, Some(1));
        let out = rotation_lemma_check(&r, 16, 2, 1e-7).unwrap();
        assert!(out.is_clean());
        assert!(out.checked > 0);
    }

    #[test]
    fn rotation_lemma_without_pairs_errors() {
        // a generic tensor has no dual pairs
        let raw: Vec<f64> = (0..625).map(|i| ((i * 7919) % 113) as f64 / 56.0 - 1.0).collect();
        let r = crate::curvature::project_curvature(5, &raw).unwrap();
        let d = duality_check(&r, 4, 1, 1e-7).unwrap();
        assert!(!d.outcome.is_clean());
        if d.pairs.is_empty() {
            assert!(matches!(rotation_lemma_check(&r, 4, 1, 1e-7), Err(Error::NoDualPairsFound)));
        }
    }

    #[test]
    fn extrema_of_osserman_and_varying_models() {
        let r = model(vec![2.0; 3], 1.0, Sign::Plus, Some(9));
        let e = extrema_probe(&r, 32, 1, 1e-7).unwrap();
        assert!((e.mu_min - 1.0).abs() < 1e-10 && (e.mu_max - 1.0).abs() < 1e-10);
        assert!((e.nu_min - 3.0).abs() < 1e-10 && (e.nu_max - 3.0).abs() < 1e-10);
        assert!(e.intersection_dim >= 1);

        let r = model(vec![3.0, 2.0, 1.0], 0.0, Sign::Plus, None);
        let e = extrema_probe(&r, 64, 2, 1e-7).unwrap();
        assert!(e.nu_max <= 3.0 + 1e-10);
        assert!((e.nu_max - 3.0).abs() < 1e-8, "nu_max {}", e.nu_max);
        assert!(e.intersection_dim >= 1 && e.violations.is_empty());
        let w = DVector::from_vec(e.witness_w.clone());
        let nu_w = spectral_profile(&r, &w, 1e-7).unwrap().roots.unwrap().nu_x;
        assert!((nu_w - e.nu_max).abs() < 1e-12);
        // the witness sits in the E1/F1 block
        assert!(w[0].powi(2) + w[1].powi(2) > 1.0 - 1e-6);

        assert!(matches!(extrema_probe(&build_r0(4), 4, 1, 1e-7), Err(Error::NotTwoRoot { .. })));
    }
}
