//! Recovery of `(σ, μ, P)` from a two-root tensor with a simple root, so that
//! `R = σ(−⅓Rᴾ + μR⁰)`, and the end-to-end classification pipeline.
//!
//! After removing the constant root, the shifted Jacobi operator is
//! `J'_X = σ (PX)(PX)ᵀ`. Its coefficient forms `A^{ab}` are therefore
//! `σ·sym(p_a p_bᵀ)` with `p_a` the rows of `P`, which is what
//! [`factor_family`] inverts.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::admissibility::{admissible, dimension_screen, MultiplicityPattern, ScreenVerdict};
use crate::curvature::{shift, two_root_tensor, AlgebraicCurvatureTensor, SkewEndomorphism, Sign};
use crate::error::{Error, Result};
use crate::linalg::{cluster_ranges, cluster_tolerance, sample_unit_sphere, sym_eigen, SymmetricMatrix};
use crate::spectral::{classify_k_root, jacobi_matrix, profile_samples, KRootVerdict};

pub const DEFAULT_REL_TOL: f64 = 1e-7;
const EIGENVECTOR_CHECK_SAMPLES: usize = 8;

/// The constant multiplicity-`(n−2)` root observed over a sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuEstimate {
    /// Mean of the constant root, equal to `σμ`.
    pub root: f64,
    /// Max minus min of the constant root over the sample.
    pub spread: f64,
    /// Observed range of the simple root.
    pub simple_root_range: (f64, f64),
    pub samples: usize,
    pub seed: u64,
}

pub fn estimate_mu(r: &AlgebraicCurvatureTensor, samples: usize, seed: u64, rel_tol: f64) -> Result<MuEstimate> {
    let n = r.dim();
    if n <= 4 {
        return Err(Error::DimensionTooLow { dim: n });
    }
    if samples == 0 {
        return Err(Error::InvalidParams("samples must be at least 1".into()));
    }
    let points = sample_unit_sphere(n, samples, seed);
    let profiles = profile_samples(r, &points, rel_tol)?;
    let mut roots = Vec::with_capacity(samples);
    let mut simple = Vec::with_capacity(samples);
    let mut scale = 1.0_f64;
    for prof in &profiles {
        let Some(rp) = prof.profile.roots else {
            return Err(Error::NotSimpleRootTwoRoot(format!(
                "{} eigenvalue clusters at {:?}",
                prof.ranges.len(),
                prof.profile.point
            )));
        };
        let (root, other) = match (rp.p, rp.q) {
            (1, q) if q == n - 2 => (rp.nu_x, rp.mu_x),
            (p, 1) if p == n - 2 => (rp.mu_x, rp.nu_x),
            (p, q) => {
                return Err(Error::NotSimpleRootTwoRoot(format!(
                    "multiplicities ({}, {}): q={} but a simple root needs q=1",
                    p.max(q),
                    p.min(q),
                    p.min(q)
                )))
            }
        };
        scale = scale.max(root.abs()).max(other.abs());
        roots.push(root);
        simple.push(other);
    }
    let (lo, hi) = min_max(&roots);
    let spread = hi - lo;
    if spread > rel_tol * scale {
        return Err(Error::MuNotConstant { deviation: spread });
    }
    Ok(MuEstimate {
        root: roots.iter().sum::<f64>() / roots.len() as f64,
        spread,
        simple_root_range: min_max(&simple),
        samples,
        seed,
    })
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Coefficient forms of the Jacobi operator: `(J_X)_{ab} = xᵀ A^{ab} x`,
/// `A^{ab}_{ij} = ½(R[b][i][j][a] + R[b][j][i][a])`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticFormFamily {
    dim: usize,
    forms: Vec<DMatrix<f64>>,
}

impl QuadraticFormFamily {
    pub fn from_forms(dim: usize, forms: Vec<DMatrix<f64>>) -> Result<Self> {
        if forms.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: forms.len(),
            });
        }
        if let Some(f) = forms.iter().find(|f| f.nrows() != dim || f.ncols() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: f.nrows().max(f.ncols()),
            });
        }
        Ok(Self { dim, forms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn form(&self, a: usize, b: usize) -> &DMatrix<f64> {
        &self.forms[a * self.dim + b]
    }

    pub fn form_mut(&mut self, a: usize, b: usize) -> &mut DMatrix<f64> {
        &mut self.forms[a * self.dim + b]
    }
}

pub fn quadratic_form_family(r: &AlgebraicCurvatureTensor) -> QuadraticFormFamily {
    let n = r.dim();
    let mut forms = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            forms.push(DMatrix::from_fn(n, n, |i, j| 0.5 * (r.get(b, i, j, a) + r.get(b, j, i, a))));
        }
    }
    QuadraticFormFamily { dim: n, forms }
}

fn sym_outer(u: &DVector<f64>, v: &DVector<f64>) -> DMatrix<f64> {
    (u * v.transpose() + v * u.transpose()) * 0.5
}

/// Factors `A^{ab} = σ·sym(p_a p_bᵀ)` and returns `σ` and the matrix with rows
/// `p_a`. `P` is fixed up to its overall sign, which is chosen so that the
/// first significant coordinate of the largest row is positive.
pub fn factor_family(family: &QuadraticFormFamily, scale: f64, rel_tol: f64) -> Result<(Sign, DMatrix<f64>)> {
    let n = family.dim();
    let tol = rel_tol * scale;
    let trace: f64 = (0..n).map(|a| family.form(a, a).trace()).sum();
    if trace.abs() <= tol {
        return Err(Error::ZeroSimpleRoot);
    }
    let sigma = Sign::of(trace);
    let s = sigma.value();

    let mut rows: Vec<DVector<f64>> = Vec::with_capacity(n);
    for a in 0..n {
        let form = SymmetricMatrix::symmetrize(&(family.form(a, a) * s))?;
        let eig = sym_eigen(&form)?;
        let top = eig.values[n - 1];
        let rest = eig.values[..n - 1].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let residual = rest.max(-top);
        if residual > tol {
            return Err(Error::RankExceeded {
                index: a,
                magnitude: residual,
            });
        }
        rows.push(eig.vector(n - 1) * top.max(0.0).sqrt());
    }

    let anchor = (0..n)
        .max_by(|&a, &b| rows[a].norm().total_cmp(&rows[b].norm()))
        .expect("n >= 1");
    let anchor_norm = rows[anchor].norm();
    if let Some(c) = rows[anchor].iter().find(|c| c.abs() > 1e-8 * anchor_norm) {
        if *c < 0.0 {
            rows[anchor] = -&rows[anchor];
        }
    }
    for a in 0..n {
        if a == anchor {
            continue;
        }
        let target = family.form(anchor, a) * s;
        let plus = sym_outer(&rows[anchor], &rows[a]);
        if (&target + &plus).norm() < (&target - &plus).norm() {
            rows[a] = -&rows[a];
        }
    }
    for a in 0..n {
        for b in a..n {
            let err = (family.form(a, b) * s - sym_outer(&rows[a], &rows[b])).amax();
            if err > tol {
                return Err(Error::SignInconsistency { a, b, magnitude: err });
            }
        }
    }
    let p = DMatrix::from_fn(n, n, |a, i| rows[a][i]);
    Ok((sigma, p))
}

/// `(σ, P)` with `R − root·R⁰ = −(σ/3) Rᴾ`, verified against
/// `J'_X P(X) = σ|PX|² P(X)` at fresh sample points.
pub fn extract_p(r: &AlgebraicCurvatureTensor, root: f64, seed: u64, rel_tol: f64) -> Result<(Sign, SkewEndomorphism)> {
    let scale = r.scale();
    let shifted = shift(r, root);
    let (sigma, p) = factor_family(&quadratic_form_family(&shifted), scale, rel_tol)?;
    let skew_defect = (&p + p.transpose()).amax();
    if skew_defect > rel_tol * scale {
        return Err(Error::SkewnessViolation { magnitude: skew_defect });
    }
    let p = SkewEndomorphism::new((&p - p.transpose()) * 0.5)?;
    let mut worst = 0.0_f64;
    for x in sample_unit_sphere(r.dim(), EIGENVECTOR_CHECK_SAMPLES, seed) {
        let px = p.apply(&x);
        let j = jacobi_matrix(&shifted, &x);
        let lhs = j.as_matrix() * &px;
        let rhs = &px * (sigma.value() * px.norm_squared());
        worst = worst.max((lhs - rhs).norm() / px.norm().max(1.0));
    }
    if worst > rel_tol * scale {
        return Err(Error::EigenvectorCheckFailed { magnitude: worst });
    }
    Ok((sigma, p))
}

/// Orthonormal frame `(E_1, F_1, …)` with `P E_i = √ν_i F_i`, `ν_1 >= ν_2 >= …`.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalFrame {
    pub nus: Vec<f64>,
    /// Columns `E_1, F_1, E_2, F_2, …`.
    pub frame: DMatrix<f64>,
}

pub fn canonical_frame(p: &SkewEndomorphism, rel_tol: f64) -> Result<CanonicalFrame> {
    let n = p.dim();
    let m = p.matrix();
    let neg_sq = SymmetricMatrix::symmetrize(&(m.transpose() * m))?;
    let eig = sym_eigen(&neg_sq)?;
    // descending order
    let values: Vec<f64> = eig.values.iter().rev().copied().collect();
    let vectors: Vec<DVector<f64>> = (0..n).rev().map(|i| eig.vector(i)).collect();
    let tol = cluster_tolerance(&values, rel_tol);
    let ascending: Vec<f64> = values.iter().map(|v| -v).collect();
    let mut frame = DMatrix::zeros(n, n);
    let mut nus = Vec::with_capacity(n / 2);
    let mut chosen: Vec<DVector<f64>> = Vec::with_capacity(n);
    for range in cluster_ranges(&ascending, tol) {
        let members = &values[range.clone()];
        let value = members.iter().sum::<f64>() / members.len() as f64;
        if value <= tol {
            return Err(Error::SingularP { nu: value });
        }
        if members.len() % 2 == 1 {
            return Err(Error::OddMultiplicity {
                value,
                multiplicity: members.len(),
            });
        }
        // eigensolver order within the block, so ties resolve toward earlier axes
        let candidates: Vec<&DVector<f64>> = vectors[range].iter().rev().collect();
        for _ in 0..candidates.len() / 2 {
            let residual = |c: &DVector<f64>| {
                let mut v = c.clone();
                for u in &chosen {
                    v -= u * u.dot(c);
                }
                v
            };
            let e = candidates
                .iter()
                .map(|c| residual(c))
                .reduce(|best, v| if v.norm() > best.norm() + 1e-12 { v } else { best })
                .expect("nonempty cluster");
            let e = &e / e.norm();
            let pe = p.apply(&e);
            let nu = pe.norm_squared();
            let f = &pe / pe.norm();
            let col = chosen.len();
            frame.set_column(col, &e);
            frame.set_column(col + 1, &f);
            chosen.push(e);
            chosen.push(f);
            nus.push(nu);
        }
    }
    Ok(CanonicalFrame { nus, frame })
}

/// `R = sign·(−⅓Rᴾ + μR⁰)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewStructure {
    pub sign: Sign,
    pub mu: f64,
    pub p: SkewEndomorphism,
    pub nus: Vec<f64>,
    pub frame: DMatrix<f64>,
}

pub fn reconstruct(s: &SkewStructure) -> AlgebraicCurvatureTensor {
    two_root_tensor(&s.p, s.mu, s.sign)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    DimensionScreen,
    ClassifyKRoot,
    Admissibility,
    EstimateMu,
    ExtractP,
    CanonicalFrame,
    Reconstruct,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PipelineOutcome {
    Certified {
        structure: SkewStructure,
        /// `max |R − reconstruct(structure)|` over all components.
        residual: f64,
    },
    Refuted {
        stage: Stage,
        message: String,
        witness: Option<Vec<f64>>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineReport {
    pub outcome: PipelineOutcome,
    pub stages: Vec<StageRecord>,
}

impl PipelineReport {
    pub fn is_certified(&self) -> bool {
        matches!(self.outcome, PipelineOutcome::Certified { .. })
    }

    pub fn refuted_stage(&self) -> Option<Stage> {
        match self.outcome {
            PipelineOutcome::Refuted { stage, .. } => Some(stage),
            PipelineOutcome::Certified { .. } => None,
        }
    }

    pub fn structure(&self) -> Option<&SkewStructure> {
        match &self.outcome {
            PipelineOutcome::Certified { structure, .. } => Some(structure),
            PipelineOutcome::Refuted { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub samples: usize,
    pub seed: u64,
    pub rel_tol: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            samples: crate::spectral::DEFAULT_SAMPLES,
            seed: 0,
            rel_tol: DEFAULT_REL_TOL,
        }
    }
}

struct Trace {
    stages: Vec<StageRecord>,
}

impl Trace {
    fn pass(&mut self, stage: Stage, detail: impl Into<String>) {
        self.stages.push(StageRecord {
            stage,
            passed: true,
            detail: detail.into(),
        });
    }

    fn refute(mut self, stage: Stage, message: impl Into<String>, witness: Option<Vec<f64>>) -> PipelineReport {
        let message = message.into();
        self.stages.push(StageRecord {
            stage,
            passed: false,
            detail: message.clone(),
        });
        PipelineReport {
            outcome: PipelineOutcome::Refuted { stage, message, witness },
            stages: self.stages,
        }
    }
}

/// Runs the classification stages in order and stops at the first refutation.
/// Errors are reserved for malformed input; mathematical failures are
/// reported as [`PipelineOutcome::Refuted`].
pub fn classify_two_root_simple(r: &AlgebraicCurvatureTensor, cfg: &PipelineConfig) -> Result<PipelineReport> {
    if cfg.samples == 0 {
        return Err(Error::InvalidParams("samples must be at least 1".into()));
    }
    if !(cfg.rel_tol > 0.0) {
        return Err(Error::InvalidParams(format!("rel_tol must be positive, got {}", cfg.rel_tol)));
    }
    let n = r.dim();
    let mut trace = Trace { stages: Vec::new() };

    if n >= 3 {
        let screen = dimension_screen(n)?;
        if screen.verdict == ScreenVerdict::OddImpossible {
            return Ok(trace.refute(
                Stage::DimensionScreen,
                format!("n = {n}: {}", screen.message),
                None,
            ));
        }
        trace.pass(Stage::DimensionScreen, format!("n = {n}: {}", screen.message));
    }

    let kr = classify_k_root(r, cfg.samples, cfg.seed, cfg.rel_tol)?;
    let multiplicities = match &kr.verdict {
        KRootVerdict::Varying { witness_b, .. } => {
            return Ok(trace.refute(Stage::ClassifyKRoot, kr.statement.clone(), Some(witness_b.clone())))
        }
        KRootVerdict::Consistent { k, .. } if *k != 2 => {
            let witness = sample_unit_sphere(n, 1, cfg.seed).remove(0);
            let msg = format!("k={k} ({}); two roots required", kr.statement);
            return Ok(trace.refute(Stage::ClassifyKRoot, msg, Some(witness.iter().copied().collect())));
        }
        KRootVerdict::Consistent { multiplicities, .. } => multiplicities.clone(),
    };
    trace.pass(Stage::ClassifyKRoot, kr.statement.clone());

    let pattern = MultiplicityPattern::from_observed(n, multiplicities[0], multiplicities[1])?;
    let adm = admissible(&pattern);
    if !adm.admissible {
        return Ok(trace.refute(Stage::Admissibility, adm.reason, None));
    }
    trace.pass(Stage::Admissibility, adm.reason);

    let est = match estimate_mu(r, cfg.samples, cfg.seed.wrapping_add(1), cfg.rel_tol) {
        Ok(est) => est,
        Err(e) => return Ok(trace.refute(Stage::EstimateMu, e.to_string(), None)),
    };
    trace.pass(
        Stage::EstimateMu,
        format!("constant root {:.12} (spread {:.3e})", est.root, est.spread),
    );

    let (sign, p) = match extract_p(r, est.root, cfg.seed.wrapping_add(2), cfg.rel_tol) {
        Ok(v) => v,
        Err(e) => return Ok(trace.refute(Stage::ExtractP, e.to_string(), None)),
    };
    trace.pass(Stage::ExtractP, format!("sign {:+}", sign.value()));

    let frame = match canonical_frame(&p, cfg.rel_tol) {
        Ok(f) => f,
        Err(e) => return Ok(trace.refute(Stage::CanonicalFrame, e.to_string(), None)),
    };
    trace.pass(Stage::CanonicalFrame, format!("nu = {:?}", frame.nus));

    let structure = SkewStructure {
        sign,
        mu: sign.value() * est.root,
        p,
        nus: frame.nus,
        frame: frame.frame,
    };
    let residual = reconstruct(&structure).max_abs_diff(r);
    if residual > cfg.rel_tol * r.scale() {
        return Ok(trace.refute(
            Stage::Reconstruct,
            format!("reconstruction residual {residual:.3e} exceeds tolerance"),
            None,
        ));
    }
    trace.pass(Stage::Reconstruct, format!("residual {residual:.3e}"));
    Ok(PipelineReport {
        outcome: PipelineOutcome::Certified { structure, residual },
        stages: trace.stages,
    })
}
