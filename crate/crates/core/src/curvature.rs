//! Algebraic curvature tensors on Euclidean space.
//!
//! Components are stored densely and indexed `R[i][j][k][l] = R(E_i, E_j, E_k, E_l)`
//! in the standard orthonormal basis. The Jacobi operator convention used
//! throughout the crate is `J_X(Y) = R(Y, X)X`, so that
//!
//! ```text
//! (J_X)_{ab} = g(J_X E_b, E_a) = Σ_{i,j} R[b][i][j][a] x_i x_j
//! ```
//!
//! and the constant-curvature tensor `R⁰(X,Y,Z,W) = g(Y,Z)g(X,W) − g(X,Z)g(Y,W)`
//! has positive sectional curvature one.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Symmetry tolerance relative to `1 + max|R|`.
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicCurvatureTensor {
    dim: usize,
    data: Vec<f64>,
}

#[inline]
fn flat(dim: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * dim + j) * dim + k) * dim + l
}

impl AlgebraicCurvatureTensor {
    pub(crate) fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim.pow(4)],
        }
    }

    /// Wraps raw row-major components, rejecting anything that is not an
    /// algebraic curvature tensor within `SYMMETRY_TOL·(1 + max|R|)`.
    pub fn from_components(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParams(format!(
                "tensor dimension must be at least 2, got {dim}"
            )));
        }
        if data.len() != dim.pow(4) {
            return Err(Error::DimensionMismatch {
                expected: dim.pow(4),
                actual: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix);
        }
        let t = Self { dim, data };
        let report = validate_symmetries(&t, SYMMETRY_TOL);
        if !report.within_tolerance {
            return Err(Error::NotCurvatureTensor {
                magnitude: report.max_violation(),
            });
        }
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[flat(self.dim, i, j, k, l)]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let d = self.dim;
        self.data[flat(d, i, j, k, l)] = v;
    }

    pub fn components(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `1 + max|R|`, the reference magnitude for relative tolerances.
    pub fn scale(&self) -> f64 {
        1.0 + self.max_abs()
    }

    /// Componentwise `max |self − other|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Multilinear evaluation `R(x, y, z, w)`.
    pub fn evaluate(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
        w: &DVector<f64>,
    ) -> f64 {
        let n = self.dim;
        let mut total = 0.0;
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if y[j] == 0.0 {
                    continue;
                }
                let xy = x[i] * y[j];
                for k in 0..n {
                    let base = flat(n, i, j, k, 0);
                    let row = &self.data[base..base + n];
                    let inner: f64 = row.iter().zip(w.iter()).map(|(r, wl)| r * wl).sum();
                    total += xy * z[k] * inner;
                }
            }
        }
        total
    }

    /// Canonical generators `(i, j, k, l, value)` with `i < j`, `k < l`,
    /// `(i, j) <= (k, l)` lexicographically; exact zeros are omitted.
    pub fn generators(&self) -> Vec<(usize, usize, usize, usize, f64)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in i..n {
                    for l in (k + 1)..n {
                        if (i, j) > (k, l) {
                            continue;
                        }
                        let v = self.get(i, j, k, l);
                        if v != 0.0 {
                            out.push((i, j, k, l, v));
                        }
                    }
                }
            }
        }
        out
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }
}

impl Add for &AlgebraicCurvatureTensor {
    type Output = AlgebraicCurvatureTensor;
    fn add(self, rhs: Self) -> AlgebraicCurvatureTensor {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &AlgebraicCurvatureTensor {
    type Output = AlgebraicCurvatureTensor;
    fn sub(self, rhs: Self) -> AlgebraicCurvatureTensor {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &AlgebraicCurvatureTensor {
    type Output = AlgebraicCurvatureTensor;
    fn mul(self, c: f64) -> AlgebraicCurvatureTensor {
        AlgebraicCurvatureTensor {
            dim: self.dim,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }
}

impl Neg for &AlgebraicCurvatureTensor {
    type Output = AlgebraicCurvatureTensor;
    fn neg(self) -> AlgebraicCurvatureTensor {
        self * -1.0
    }
}

/// Maximum absolute violation per symmetry class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub antisymmetry_first_pair: f64,
    pub antisymmetry_second_pair: f64,
    pub pair_symmetry: f64,
    pub first_bianchi: f64,
    /// Absolute threshold `tol·(1 + max|R|)` the violations were compared against.
    pub threshold: f64,
    pub within_tolerance: bool,
}

impl SymmetryReport {
    pub fn max_violation(&self) -> f64 {
        self.antisymmetry_first_pair
            .max(self.antisymmetry_second_pair)
            .max(self.pair_symmetry)
            .max(self.first_bianchi)
    }
}

pub fn validate_symmetries(r: &AlgebraicCurvatureTensor, tol: f64) -> SymmetryReport {
    let n = r.dim;
    let (mut a1, mut a2, mut ps, mut b1) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = r.get(i, j, k, l);
                    a1 = a1.max((v + r.get(j, i, k, l)).abs());
                    a2 = a2.max((v + r.get(i, j, l, k)).abs());
                    ps = ps.max((v - r.get(k, l, i, j)).abs());
                    b1 = b1.max((v + r.get(j, k, i, l) + r.get(k, i, j, l)).abs());
                }
            }
        }
    }
    let threshold = tol * r.scale();
    let worst = a1.max(a2).max(ps).max(b1);
    SymmetryReport {
        antisymmetry_first_pair: a1,
        antisymmetry_second_pair: a2,
        pair_symmetry: ps,
        first_bianchi: b1,
        threshold,
        within_tolerance: worst <= threshold,
    }
}

/// The eight index images of a component under the ℤ₂ symmetries, with signs.
fn symmetry_orbit(i: usize, j: usize, k: usize, l: usize) -> [((usize, usize, usize, usize), f64); 8] {
    [
        ((i, j, k, l), 1.0),
        ((j, i, k, l), -1.0),
        ((i, j, l, k), -1.0),
        ((j, i, l, k), 1.0),
        ((k, l, i, j), 1.0),
        ((l, k, i, j), -1.0),
        ((k, l, j, i), -1.0),
        ((l, k, j, i), 1.0),
    ]
}

/// Densifies a tensor from generator entries (0-based indices) by the ℤ₂ symmetries.
pub fn build_act(
    dim: usize,
    entries: &[(usize, usize, usize, usize, f64)],
) -> Result<AlgebraicCurvatureTensor> {
    if dim < 2 {
        return Err(Error::InvalidParams(format!(
            "tensor dimension must be at least 2, got {dim}"
        )));
    }
    let mut slots: Vec<Option<f64>> = vec![None; dim.pow(4)];
    for &(i, j, k, l, value) in entries {
        if i >= dim || j >= dim || k >= dim || l >= dim {
            return Err(Error::IndexOutOfRange { i, j, k, l, dim });
        }
        if !value.is_finite() {
            return Err(Error::InvalidMatrix);
        }
        for ((a, b, c, d), sign) in symmetry_orbit(i, j, k, l) {
            let idx = flat(dim, a, b, c, d);
            let v = sign * value;
            match slots[idx] {
                Some(existing) => {
                    let tol = 1e-10 * existing.abs().max(v.abs()).max(1.0);
                    if (existing - v).abs() > tol {
                        return Err(Error::SymmetryConflict {
                            i,
                            j,
                            k,
                            l,
                            given: value,
                            forced: sign * existing,
                        });
                    }
                }
                None => slots[idx] = Some(v),
            }
        }
    }
    let t = AlgebraicCurvatureTensor {
        dim,
        data: slots.into_iter().map(|s| s.unwrap_or(0.0)).collect(),
    };
    let report = validate_symmetries(&t, SYMMETRY_TOL);
    if !report.within_tolerance {
        return Err(Error::BianchiViolation {
            magnitude: report.first_bianchi,
        });
    }
    Ok(t)
}

/// Orthogonal projection of an arbitrary 4-index array onto the space of
/// algebraic curvature tensors: ℤ₂-symmetrize, then remove the totally
/// antisymmetric (Bianchi) part.
pub fn project_curvature(dim: usize, raw: &[f64]) -> Result<AlgebraicCurvatureTensor> {
    if raw.len() != dim.pow(4) {
        return Err(Error::DimensionMismatch {
            expected: dim.pow(4),
            actual: raw.len(),
        });
    }
    let mut sym = AlgebraicCurvatureTensor::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                for l in 0..dim {
                    let avg: f64 = symmetry_orbit(i, j, k, l)
                        .iter()
                        .map(|&((a, b, c, d), s)| s * raw[flat(dim, a, b, c, d)])
                        .sum::<f64>()
                        / 8.0;
                    sym.set(i, j, k, l, avg);
                }
            }
        }
    }
    let mut out = AlgebraicCurvatureTensor::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                for l in 0..dim {
                    let cyclic = sym.get(i, j, k, l) + sym.get(j, k, i, l) + sym.get(k, i, j, l);
                    out.set(i, j, k, l, sym.get(i, j, k, l) - cyclic / 3.0);
                }
            }
        }
    }
    Ok(out)
}

/// Constant sectional curvature one: `R⁰[i][j][k][l] = δ_jk δ_il − δ_ik δ_jl`.
pub fn build_r0(dim: usize) -> AlgebraicCurvatureTensor {
    let mut t = AlgebraicCurvatureTensor::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            if i == j {
                continue;
            }
            t.set(i, j, j, i, 1.0);
            t.set(i, j, i, j, -1.0);
        }
    }
    t
}

/// `R − c·R⁰`.
pub fn shift(r: &AlgebraicCurvatureTensor, c: f64) -> AlgebraicCurvatureTensor {
    let mut out = r.clone();
    let n = r.dim;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let a = flat(n, i, j, j, i);
            out.data[a] -= c;
            let b = flat(n, i, j, i, j);
            out.data[b] += c;
        }
    }
    out
}

/// `R(x,y,y,x) / (ε_x ε_y − g(x,y)²)`.
pub fn sectional_curvature(
    r: &AlgebraicCurvatureTensor,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<f64> {
    let ex = x.norm_squared();
    let ey = y.norm_squared();
    let xy = x.dot(y);
    let denom = ex * ey - xy * xy;
    if !(denom > 1e-14 * ex * ey) {
        return Err(Error::DegeneratePlane);
    }
    Ok(r.evaluate(x, y, y, x) / denom)
}

/// A skew-adjoint endomorphism of Euclidean space, acting as `P(X) = P·X`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewEndomorphism {
    matrix: DMatrix<f64>,
}

impl SkewEndomorphism {
    pub const SKEW_TOL: f64 = 1e-10;

    /// Accepts `m` when `|m + mᵀ|_max <= 1e-10`; the stored matrix is `(m − mᵀ)/2`.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                actual: m.ncols(),
            });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix);
        }
        let defect = (&m + m.transpose()).amax();
        if defect > Self::SKEW_TOL {
            return Err(Error::NotSkew { magnitude: defect });
        }
        Ok(Self {
            matrix: (&m - m.transpose()) * 0.5,
        })
    }

    /// `P(E_i) = √ν_i F_i`, `P(F_i) = −√ν_i E_i` for frame columns `(E_1, F_1, E_2, F_2, …)`.
    pub fn from_frame(frame: &DMatrix<f64>, nus: &[f64]) -> Result<Self> {
        let n = frame.nrows();
        if frame.ncols() != n || nus.len() * 2 != n {
            return Err(Error::InvalidParams(format!(
                "frame must be {n}x{n} with {} constants, got {} columns and {} constants",
                n / 2,
                frame.ncols(),
                nus.len()
            )));
        }
        let mut p = DMatrix::zeros(n, n);
        for (i, &nu) in nus.iter().enumerate() {
            if !(nu >= 0.0) {
                return Err(Error::InvalidParams(format!("nu_{} = {nu} is negative", i + 1)));
            }
            let e = frame.column(2 * i);
            let f = frame.column(2 * i + 1);
            p += (f * e.transpose() - e * f.transpose()) * nu.sqrt();
        }
        Self::new(p)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x
    }
}

/// `Rᴾ(X,Y,Z,W) = g(PX,Z)g(PY,W) − g(PY,Z)g(PX,W) + 2g(PX,Y)g(PZ,W)`.
pub fn build_rp(p: &SkewEndomorphism) -> AlgebraicCurvatureTensor {
    let n = p.dim();
    let m = p.matrix();
    // g(P E_a, E_b) = m[(b, a)]
    let g = |a: usize, b: usize| m[(b, a)];
    let mut t = AlgebraicCurvatureTensor::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = g(i, k) * g(j, l) - g(j, k) * g(i, l) + 2.0 * g(i, j) * g(k, l);
                    t.set(i, j, k, l, v);
                }
            }
        }
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn of(x: f64) -> Self {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be +1 or -1, got {other}")),
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "+" | "+1" | "1" | "plus" => Ok(Sign::Plus),
            "-" | "-1" | "minus" => Ok(Sign::Minus),
            other => Err(format!("expected '+' or '-', got '{other}'")),
        }
    }
}

/// Parameters of the two-root family `sign·(−⅓Rᴾ + μR⁰)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoRootModelParams {
    dim: usize,
    mu: f64,
    nus: Vec<f64>,
    /// Columns `(E_1, F_1, …, E_{n/2}, F_{n/2})`.
    frame: DMatrix<f64>,
    sign: Sign,
}

impl TwoRootModelParams {
    pub fn new(dim: usize, mu: f64, nus: Vec<f64>, frame: DMatrix<f64>, sign: Sign) -> Result<Self> {
        if dim % 2 == 1 {
            return Err(Error::InvalidParams(format!(
                "dimension {dim} is odd: two-root tensors do not exist in odd dimension"
            )));
        }
        if dim < 6 {
            return Err(Error::InvalidParams(format!(
                "two-root models need an even dimension n >= 6, got {dim}"
            )));
        }
        if !mu.is_finite() {
            return Err(Error::InvalidParams("mu must be finite".into()));
        }
        if nus.len() != dim / 2 {
            return Err(Error::InvalidParams(format!(
                "expected {} nu constants for dimension {dim}, got {}",
                dim / 2,
                nus.len()
            )));
        }
        if nus.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidParams("nu constants must be positive".into()));
        }
        if nus.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidParams(
                "nu constants must be listed in non-increasing order".into(),
            ));
        }
        if frame.nrows() != dim || frame.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: frame.ncols(),
            });
        }
        let defect = (frame.transpose() * &frame - DMatrix::<f64>::identity(dim, dim)).amax();
        if defect > 1e-10 {
            return Err(Error::InvalidParams(format!(
                "frame is not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(Self {
            dim,
            mu,
            nus,
            frame,
            sign,
        })
    }

    /// Standard basis paired as `E_i = e_{2i-1}`, `F_i = e_{2i}`.
    pub fn with_standard_frame(dim: usize, mu: f64, nus: Vec<f64>, sign: Sign) -> Result<Self> {
        Self::new(dim, mu, nus, DMatrix::identity(dim, dim), sign)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nus(&self) -> &[f64] {
        &self.nus
    }

    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn skew(&self) -> Result<SkewEndomorphism> {
        SkewEndomorphism::from_frame(&self.frame, &self.nus)
    }
}

/// `sign·(−⅓Rᴾ + μR⁰)` with `P` built from the paired frame.
pub fn two_root_tensor(p: &SkewEndomorphism, mu: f64, sign: Sign) -> AlgebraicCurvatureTensor {
    let mut t = &build_rp(p) * (-1.0 / 3.0);
    t = shift(&t, -mu);
    &t * sign.value()
}

pub fn build_two_root_model(params: &TwoRootModelParams) -> Result<AlgebraicCurvatureTensor> {
    let p = params.skew()?;
    let t = two_root_tensor(&p, params.mu, params.sign);
    let report = validate_symmetries(&t, SYMMETRY_TOL);
    if !report.within_tolerance {
        return Err(Error::NotCurvatureTensor {
            magnitude: report.max_violation(),
        });
    }
    Ok(t)
}
