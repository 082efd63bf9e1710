//! Oracles and fixtures shared by the integration tests. Everything here is
//! computed from closed-form definitions, independently of the library's
//! fast paths.
#![allow(dead_code)]

use jacobilab::linalg::random_orthogonal;
use jacobilab::{project_curvature, AlgebraicCurvatureTensor, Sign, SkewEndomorphism, TwoRootModelParams};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `R(E_i,E_j,E_k,E_l)` of `sign·(−⅓Rᴾ + μR⁰)` straight from the defining formulas.
pub fn model_component(p: &DMatrix<f64>, mu: f64, sign: f64, i: usize, j: usize, k: usize, l: usize) -> f64 {
    // g(P E_a, E_b) = P[b][a]
    let g = |a: usize, b: usize| p[(b, a)];
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let rp = g(i, k) * g(j, l) - g(j, k) * g(i, l) + 2.0 * g(i, j) * g(k, l);
    let r0 = d(j, k) * d(i, l) - d(i, k) * d(j, l);
    sign * (-rp / 3.0 + mu * r0)
}

pub fn oracle_model(p: &DMatrix<f64>, mu: f64, sign: f64) -> Vec<f64> {
    let n = p.nrows();
    let mut out = Vec::with_capacity(n.pow(4));
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    out.push(model_component(p, mu, sign, i, j, k, l));
                }
            }
        }
    }
    out
}

/// `g(J_X E_b, E_a) = R(E_b, X, X, E_a)` by full multilinear evaluation.
pub fn oracle_jacobi(r: &AlgebraicCurvatureTensor, x: &DVector<f64>) -> DMatrix<f64> {
    let n = r.dim();
    let e = |i: usize| DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 });
    DMatrix::from_fn(n, n, |a, b| r.evaluate(&e(b), x, x, &e(a)))
}

/// Analytic reduced spectrum of the model at unit `x`, ascending.
pub fn oracle_model_spectrum(p: &DMatrix<f64>, mu: f64, sign: f64, x: &DVector<f64>) -> Vec<f64> {
    let n = p.nrows();
    let nu_x = (p * x).norm_squared();
    let mut v = vec![sign * mu; n - 2];
    v.push(sign * (mu + nu_x));
    v.sort_by(f64::total_cmp);
    v
}

/// Eigenvalues by cyclic Jacobi rotations, ascending. Used as a second
/// opinion next to the library's eigensolver.
pub fn jacobi_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = (m + m.transpose()) * 0.5;
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).map(|(i, j)| a[(i, j)].powi(2)).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let mut rot = DMatrix::identity(n, n);
                rot[(p, p)] = c;
                rot[(q, q)] = c;
                rot[(p, q)] = s;
                rot[(q, p)] = -s;
                a = rot.transpose() * &a * &rot;
            }
        }
    }
    let mut v: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Reduced Jacobi eigenvalues at unit `x` from the oracle matrix: the full
/// spectrum minus one zero eigenvalue belonging to `x`.
pub fn oracle_reduced_spectrum(r: &AlgebraicCurvatureTensor, x: &DVector<f64>) -> Vec<f64> {
    let full = jacobi_eigenvalues(&oracle_jacobi(r, x));
    let drop = (0..full.len()).min_by(|&a, &b| full[a].abs().total_cmp(&full[b].abs())).unwrap();
    full.into_iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, v)| v).collect()
}

pub struct RandomModel {
    pub params: TwoRootModelParams,
    pub tensor: AlgebraicCurvatureTensor,
}

/// μ uniform in [−2, 2], νᵢ uniform in (0, 4] sorted non-increasing, Haar frame.
pub fn random_model(n: usize, sign: Sign, seed: u64) -> RandomModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu = rng.random_range(-2.0..=2.0);
    let mut nus: Vec<f64> = (0..n / 2).map(|_| 4.0 * (1.0 - rng.random::<f64>())).collect();
    nus.sort_by(|a, b| b.total_cmp(a));
    let frame = random_orthogonal(n, seed.wrapping_mul(31).wrapping_add(7));
    let params = TwoRootModelParams::new(n, mu, nus, frame, sign).unwrap();
    let tensor = jacobilab::build_two_root_model(&params).unwrap();
    RandomModel { params, tensor }
}

/// A random curvature tensor with `max|R| = 1`.
pub fn random_curvature(n: usize, seed: u64) -> AlgebraicCurvatureTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..n.pow(4)).map(|_| rng.random_range(-1.0..1.0)).collect();
    let r = project_curvature(n, &raw).unwrap();
    let m = r.max_abs();
    &r * (1.0 / m)
}

pub fn perturbed(r: &AlgebraicCurvatureTensor, delta: f64, seed: u64) -> AlgebraicCurvatureTensor {
    r + &(&random_curvature(r.dim(), seed) * delta)
}

fn cd_conj(x: &[f64]) -> Vec<f64> {
    if x.len() == 1 {
        return x.to_vec();
    }
    let h = x.len() / 2;
    let mut out = cd_conj(&x[..h]);
    out.extend(x[h..].iter().map(|v| -v));
    out
}

/// Cayley–Dickson product `(a,b)(c,d) = (ac − d̄b, da + bc̄)`.
pub fn cd_mul(x: &[f64], y: &[f64]) -> Vec<f64> {
    if x.len() == 1 {
        return vec![x[0] * y[0]];
    }
    let h = x.len() / 2;
    let (a, b) = (&x[..h], &x[h..]);
    let (c, d) = (&y[..h], &y[h..]);
    let ac = cd_mul(a, c);
    let db = cd_mul(&cd_conj(d), b);
    let da = cd_mul(d, a);
    let bc = cd_mul(b, &cd_conj(c));
    let mut out: Vec<f64> = ac.iter().zip(&db).map(|(u, v)| u - v).collect();
    out.extend(da.iter().zip(&bc).map(|(u, v)| u + v));
    out
}

/// Left multiplications by the imaginary octonion units, doubled onto ℝ¹⁶.
pub fn octonion_clifford_family() -> Vec<DMatrix<f64>> {
    let unit = |i: usize| (0..8).map(|k| if k == i { 1.0 } else { 0.0 }).collect::<Vec<f64>>();
    (1..8)
        .map(|i| {
            let l = DMatrix::from_fn(8, 8, |row, col| cd_mul(&unit(i), &unit(col))[row]);
            let mut j = DMatrix::zeros(16, 16);
            j.view_mut((0, 0), (8, 8)).copy_from(&l);
            j.view_mut((8, 8), (8, 8)).copy_from(&l);
            j
        })
        .collect()
}

/// `μR⁰ − ⅓ Σᵢ R^{Jᵢ}` in dimension 16: two roots μ (multiplicity 8) and
/// μ + 1 (multiplicity 7).
pub fn octonion_q7_tensor(mu: f64) -> AlgebraicCurvatureTensor {
    let family = octonion_clifford_family();
    for (a, ja) in family.iter().enumerate() {
        for (b, jb) in family.iter().enumerate() {
            let anti = ja * jb + jb * ja;
            let expected = if a == b { DMatrix::identity(16, 16) * -2.0 } else { DMatrix::zeros(16, 16) };
            assert!((anti - expected).amax() < 1e-12, "Clifford relation fails for ({a}, {b})");
        }
    }
    let mut total = vec![0.0; 16usize.pow(4)];
    for j in &family {
        for (t, v) in total.iter_mut().zip(oracle_model(j, 0.0, 1.0)) {
            *t += v;
        }
    }
    let r0 = jacobilab::build_r0(16);
    for (t, v) in total.iter_mut().zip(r0.components()) {
        *t += mu * v;
    }
    AlgebraicCurvatureTensor::from_components(16, total).unwrap()
}

pub fn skew_from(m: &DMatrix<f64>) -> SkewEndomorphism {
    SkewEndomorphism::new(m.clone()).unwrap()
}

pub fn dvec(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}
