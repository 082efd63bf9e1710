//! Versioned JSON reports and their plain-text summaries.
//!
//! Reports contain no timestamps or host data, so identical inputs give
//! byte-identical output.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::admissibility::{admissible, dimension_screen, Admissibility, DimensionScreen, MultiplicityPattern};
use crate::curvature::{validate_symmetries, AlgebraicCurvatureTensor, SymmetryReport, SYMMETRY_TOL};
use crate::error::Result;
use crate::factorize::{classify_two_root_simple, PipelineConfig, PipelineOutcome, SkewStructure, Stage, StageRecord};
use crate::probes::{
    duality_check, eigenvalue_bounds_check, emex_check, extrema_probe, rotation_lemma_on_pairs, CheckOutcome,
    DualityMode, ExtremaReport, ViolationRecord,
};
use crate::spectral::{classify_k_root, k_stein_invariants, osserman_test, KRootReport, KRootVerdict, OssermanReport, SteinReport};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_NAME: &str = "jacobilab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
const STEIN_K_MAX: u32 = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

impl Default for Tool {
    fn default() -> Self {
        Self {
            name: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub input: String,
    pub samples: usize,
    pub seed: u64,
    pub rel_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorSummary {
    pub dim: usize,
    pub max_abs: f64,
    pub symmetry: SymmetryReport,
}

impl TensorSummary {
    fn of(r: &AlgebraicCurvatureTensor) -> Self {
        Self {
            dim: r.dim(),
            max_abs: r.max_abs(),
            symmetry: validate_symmetries(r, SYMMETRY_TOL),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub tool: Tool,
    pub config: RunConfig,
    pub tensor: TensorSummary,
    pub k_root: KRootReport,
    pub osserman: OssermanReport,
    pub stein: SteinReport,
    pub dimension_screen: Option<DimensionScreen>,
    pub admissibility: Option<Admissibility>,
}

pub fn analyze(r: &AlgebraicCurvatureTensor, config: RunConfig) -> Result<AnalysisReport> {
    let k_root = classify_k_root(r, config.samples, config.seed, config.rel_tol)?;
    let osserman = osserman_test(r, config.samples.max(2), config.seed, config.rel_tol)?;
    let stein = k_stein_invariants(r, STEIN_K_MAX, config.samples, config.seed)?;
    let n = r.dim();
    let dimension_screen = if n >= 3 { Some(dimension_screen(n)?) } else { None };
    let admissibility = match k_root.multiplicities() {
        Some([a, b]) => MultiplicityPattern::from_observed(n, *a, *b).ok().map(|p| admissible(&p)),
        _ => None,
    };
    Ok(AnalysisReport {
        schema: SCHEMA_VERSION,
        tool: Tool::default(),
        config,
        tensor: TensorSummary::of(r),
        k_root,
        osserman,
        stein,
        dimension_screen,
        admissibility,
    })
}

impl AnalysisReport {
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "dimension      {}", self.tensor.dim);
        let _ = writeln!(s, "k-root         {}", self.k_root.statement);
        let _ = writeln!(
            s,
            "Osserman       {} (max deviation {:.3e}, threshold {:.3e})",
            if self.osserman.osserman { "yes" } else { "no" },
            self.osserman.max_deviation,
            self.osserman.threshold
        );
        if !self.osserman.osserman {
            let _ = writeln!(s, "  witness A    {:?}", self.osserman.witness_a);
            let _ = writeln!(s, "  spectrum A   {:?}", self.osserman.spectrum_a);
            let _ = writeln!(s, "  witness B    {:?}", self.osserman.witness_b);
            let _ = writeln!(s, "  spectrum B   {:?}", self.osserman.spectrum_b);
        }
        let _ = writeln!(s, "k   C_k                  deviation    p*mu^k+q*nu^k");
        for c in &self.stein.constants {
            let formula = c.two_root_formula.map_or("-".to_string(), |f| format!("{f:.12}"));
            let _ = writeln!(s, "{:<3} {:<20.12} {:<12.3e} {}", c.k, c.value, c.deviation, formula);
        }
        if let Some(scr) = &self.dimension_screen {
            let _ = writeln!(s, "screen         {}", scr.message);
        }
        if let Some(a) = &self.admissibility {
            let _ = writeln!(s, "admissibility  {}", a.reason);
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSection {
    pub status: String,
    pub checked: usize,
    pub violations: Vec<ViolationRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ProbeSection {
    fn from_outcome(o: CheckOutcome, note: Option<String>) -> Self {
        Self {
            status: if o.violations.is_empty() { "green" } else { "red" }.into(),
            checked: o.checked,
            violations: o.violations,
            note,
        }
    }

    fn skipped(reason: &str) -> Self {
        Self {
            status: format!("skipped ({reason})"),
            checked: 0,
            violations: Vec::new(),
            note: None,
        }
    }

    pub fn is_red(&self) -> bool {
        self.status == "red"
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremaSection {
    #[serde(flatten)]
    pub section: ProbeSection,
    pub extrema: Option<ExtremaReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub schema: u32,
    pub tool: Tool,
    pub config: RunConfig,
    pub k_root: KRootReport,
    pub duality: ProbeSection,
    pub bounds: ProbeSection,
    pub emex: ProbeSection,
    pub rotation: ProbeSection,
    pub extrema: ExtremaSection,
}

impl ProbeReport {
    pub fn any_red(&self) -> bool {
        [&self.duality, &self.bounds, &self.emex, &self.rotation, &self.extrema.section]
            .iter()
            .any(|s| s.is_red())
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "k-root     {}", self.k_root.statement);
        for (name, sec) in [
            ("duality", &self.duality),
            ("bounds", &self.bounds),
            ("emex", &self.emex),
            ("rotation", &self.rotation),
            ("extrema", &self.extrema.section),
        ] {
            let _ = writeln!(s, "{name:<10} {:<20} checked {:<6} violations {}", sec.status, sec.checked, sec.violations.len());
        }
        if let Some(e) = &self.extrema.extrema {
            let _ = writeln!(
                s,
                "mu in [{:.9}, {:.9}], nu in [{:.9}, {:.9}]",
                e.mu_min, e.mu_max, e.nu_min, e.nu_max
            );
        }
        s
    }
}

pub fn probe(r: &AlgebraicCurvatureTensor, config: RunConfig) -> Result<ProbeReport> {
    let (samples, seed, tol) = (config.samples, config.seed, config.rel_tol);
    let k_root = classify_k_root(r, samples, seed, tol)?;
    let skip_reason = match &k_root.verdict {
        KRootVerdict::Consistent { k: 2, .. } => None,
        KRootVerdict::Consistent { k, .. } => Some(format!("k={k}")),
        KRootVerdict::Varying { .. } => Some("not k-root".to_string()),
    };

    let dual = duality_check(r, samples, seed, tol)?;
    let mode_note = match dual.mode {
        DualityMode::AllEigenvectors => "all eigenvectors tested".to_string(),
        DualityMode::ConstantRoots { mu_constant, nu_constant } => format!(
            "roots vary over the sphere; tested eigenvectors of constant roots only (smaller root constant: {mu_constant}, larger root constant: {nu_constant})"
        ),
    };
    let rotation = if dual.pairs.is_empty() {
        ProbeSection::skipped("no dual pairs")
    } else {
        ProbeSection::from_outcome(rotation_lemma_on_pairs(r, &dual.pairs, seed.wrapping_add(1), tol), None)
    };
    let duality = ProbeSection::from_outcome(dual.outcome, Some(mode_note));

    let (bounds, emex, extrema) = match &skip_reason {
        Some(reason) => (
            ProbeSection::skipped(reason),
            ProbeSection::skipped(reason),
            ExtremaSection {
                section: ProbeSection::skipped(reason),
                extrema: None,
            },
        ),
        None => {
            let bounds = ProbeSection::from_outcome(eigenvalue_bounds_check(r, samples, seed, tol)?, None);
            let emex = ProbeSection::from_outcome(emex_check(r, samples, seed, tol)?, None);
            let ext = extrema_probe(r, samples, seed, tol)?;
            let section = ProbeSection::from_outcome(
                CheckOutcome {
                    checked: 1,
                    violations: ext.violations.clone(),
                },
                None,
            );
            (bounds, emex, ExtremaSection { section, extrema: Some(ext) })
        }
    };

    Ok(ProbeReport {
        schema: SCHEMA_VERSION,
        tool: Tool::default(),
        config,
        k_root,
        duality,
        bounds,
        emex,
        rotation,
        extrema,
    })
}

/// Serialized certified structure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureJson {
    pub sign: i8,
    pub mu: f64,
    pub nus: Vec<f64>,
    /// Row-major.
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
    /// Frame vectors `E_1, F_1, E_2, F_2, …`.
    pub frame: Vec<Vec<f64>>,
    pub residual: f64,
}

impl StructureJson {
    pub fn new(s: &SkewStructure, residual: f64) -> Self {
        let m = s.p.matrix();
        Self {
            sign: s.sign.value() as i8,
            mu: s.mu,
            nus: s.nus.clone(),
            p: m.row_iter().map(|row| row.iter().copied().collect()).collect(),
            frame: s.frame.column_iter().map(|c| c.iter().copied().collect()).collect(),
            residual,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Refutation {
    pub stage: Stage,
    pub message: String,
    pub witness: Option<Vec<f64>>,
}

pub const CONVENTIONS: &str = "R = sign*(-Rp/3 + mu*R0) with Rp(X,Y,Z,W) = g(PX,Z)g(PY,W) - g(PY,Z)g(PX,W) + 2g(PX,Y)g(PZ,W) \
and R0(X,Y,Z,W) = g(Y,Z)g(X,W) - g(X,Z)g(Y,W); the sign is reported as observed and the tensor is never renormalized \
to make the simple root exceed the constant one; P is determined up to an overall sign";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizeReport {
    pub schema: u32,
    pub tool: Tool,
    pub config: RunConfig,
    pub verdict: String,
    pub structure: Option<StructureJson>,
    pub refutation: Option<Refutation>,
    pub stages: Vec<StageRecord>,
    pub conventions: String,
}

pub fn factorize(r: &AlgebraicCurvatureTensor, config: RunConfig) -> Result<FactorizeReport> {
    let cfg = PipelineConfig {
        samples: config.samples,
        seed: config.seed,
        rel_tol: config.rel_tol,
    };
    let report = classify_two_root_simple(r, &cfg)?;
    let (verdict, structure, refutation) = match report.outcome {
        PipelineOutcome::Certified { structure, residual } => {
            ("certified", Some(StructureJson::new(&structure, residual)), None)
        }
        PipelineOutcome::Refuted { stage, message, witness } => (
            "refuted",
            None,
            Some(Refutation { stage, message, witness }),
        ),
    };
    Ok(FactorizeReport {
        schema: SCHEMA_VERSION,
        tool: Tool::default(),
        config,
        verdict: verdict.into(),
        structure,
        refutation,
        stages: report.stages,
        conventions: CONVENTIONS.into(),
    })
}

pub fn stage_name(stage: Stage) -> String {
    serde_json::to_value(stage)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

impl FactorizeReport {
    pub fn is_certified(&self) -> bool {
        self.structure.is_some()
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        if let Some(st) = &self.structure {
            let _ = writeln!(s, "certified");
            let _ = writeln!(s, "sign      {:+}", st.sign);
            let _ = writeln!(s, "mu        {:.12}", st.mu);
            let nus: Vec<String> = st.nus.iter().map(|v| format!("{v:.12}")).collect();
            let _ = writeln!(s, "nus       ({})", nus.join(", "));
            let _ = writeln!(s, "residual  {:.3e}", st.residual);
        }
        if let Some(rf) = &self.refutation {
            let _ = writeln!(s, "refuted: {} at stage {}", rf.message, stage_name(rf.stage));
            if let Some(w) = &rf.witness {
                let _ = writeln!(s, "witness   {w:?}");
            }
        }
        s
    }
}

pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports are serializable");
    s.push('\n');
    s
}
