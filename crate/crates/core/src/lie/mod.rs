//! `PGL(k+1, C)` near the identity.
//!
//! A group element is represented by the unique matrix in its class whose
//! `(1,1)`-entry is 1 (the map `φ`). Exponential coordinates
//! `ψ: sl(k+1, C) → PGL(k+1, C)` and their composite `Φ = φ∘ψ` give a chart
//! around the identity in which the right action of the shear `G_h`
//! becomes the map `H_h = Φ⁻¹ ∘ Ḡ_h ∘ Φ`.
//!
//! Matrix indices in the docs are 1-based like `a_{i,j}`; in code they are
//! 0-based.

pub mod matrix;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{norm_sqr, ProjectivePoint};
pub use matrix::{frobenius, CMatrix};

/// Default validity radius `ε` for shear offsets.
pub const DEFAULT_EPSILON: f64 = 0.3;
/// Default support radius `σ` of the mollifier.
pub const DEFAULT_SIGMA: f64 = 0.1;
/// Safety factor applied by [`estimate_c`].
pub const C_SAFETY: f64 = 1.1;
/// Largest `‖A - Id‖_s` accepted by [`phi_inverse`].
pub const LOG_CHART_RADIUS: f64 = 0.5;

const TRACE_TOL: f64 = 1e-12;
const PIVOT_TOL: f64 = 1e-12;

/// Real dimension `2k² + 4k` of `sl(k+1, C)`.
pub fn algebra_real_dim(k: usize) -> usize {
    2 * k * k + 4 * k
}

/// The Frobenius norm `‖x‖_s`.
pub fn norm_s(x: &CMatrix) -> f64 {
    frobenius(x)
}

/// A traceless `(k+1)×(k+1)` complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    mat: CMatrix,
}

impl AlgebraElement {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() || mat.nrows() < 2 {
            return Err(Error::Invalid("algebra element must be a square matrix of size >= 2".into()));
        }
        let tr = matrix::trace(&mat).norm();
        if !(tr <= TRACE_TOL) {
            return Err(Error::NotTraceless(tr));
        }
        if !frobenius(&mat).is_finite() {
            return Err(Error::Invalid("algebra element has non-finite entries".into()));
        }
        Ok(Self { mat })
    }

    pub fn zero(k: usize) -> Self {
        Self { mat: CMatrix::zeros(k + 1, k + 1) }
    }

    /// Build from real coordinates in the orthonormal basis of
    /// [`AlgebraElement::coords`].
    pub fn from_coords(k: usize, coords: &[f64]) -> Result<Self> {
        let dim = algebra_real_dim(k);
        if coords.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: coords.len() });
        }
        let n = k + 1;
        let mut mat = CMatrix::zeros(n, n);
        let mut it = coords.chunks_exact(2);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let c = it.next().unwrap();
                    mat[(i, j)] = Complex64::new(c[0], c[1]);
                }
            }
        }
        for m in 1..=k {
            let c = it.next().unwrap();
            let z = Complex64::new(c[0], c[1]);
            let s = 1.0 / ((m * (m + 1)) as f64).sqrt();
            for d in 0..m {
                mat[(d, d)] += z * s;
            }
            mat[(m, m)] -= z * (m as f64 * s);
        }
        Ok(Self { mat })
    }

    /// Real coordinates with respect to an orthonormal basis (for the real
    /// inner product `Re tr(A* B)`): off-diagonal units `E_ij`, `iE_ij`
    /// followed by generalized Gell-Mann diagonals `H_m`, `iH_m`.
    pub fn coords(&self) -> Vec<f64> {
        let n = self.mat.nrows();
        let k = n - 1;
        let mut out = Vec::with_capacity(algebra_real_dim(k));
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    out.push(self.mat[(i, j)].re);
                    out.push(self.mat[(i, j)].im);
                }
            }
        }
        for m in 1..=k {
            let s = 1.0 / ((m * (m + 1)) as f64).sqrt();
            let mut z: Complex64 = (0..m).map(|d| self.mat[(d, d)]).sum();
            z -= self.mat[(m, m)] * m as f64;
            z *= s;
            out.push(z.re);
            out.push(z.im);
        }
        out
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    pub fn k(&self) -> usize {
        self.mat.nrows() - 1
    }

    pub fn norm_s(&self) -> f64 {
        frobenius(&self.mat)
    }

    pub fn scale(&self, t: f64) -> Self {
        Self { mat: &self.mat * Complex64::new(t, 0.0) }
    }

    /// Remove the trace part, `x - (tr x / (k+1)) Id`.
    fn project(mut mat: CMatrix) -> Self {
        let n = mat.nrows();
        let t = matrix::trace(&mat) / n as f64;
        for d in 0..n {
            mat[(d, d)] -= t;
        }
        Self { mat }
    }
}

/// A matrix whose `(1,1)`-entry is exactly 1, the `φ`-representative of an
/// element of `PGL(k+1, C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedMatrix {
    mat: CMatrix,
}

impl NormalizedMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() || mat.nrows() < 2 {
            return Err(Error::Invalid("normalized matrix must be square of size >= 2".into()));
        }
        if mat[(0, 0)] != Complex64::new(1.0, 0.0) {
            return Err(Error::Invalid("(1,1)-entry must equal 1".into()));
        }
        let det = mat.determinant().norm();
        if !(det > PIVOT_TOL) {
            return Err(Error::Singular(det));
        }
        Ok(Self { mat })
    }

    pub fn identity(k: usize) -> Self {
        Self { mat: matrix::identity(k + 1) }
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    pub fn k(&self) -> usize {
        self.mat.nrows() - 1
    }

    /// `‖A - Id‖_s`.
    pub fn dist_to_identity(&self) -> f64 {
        frobenius(&(&self.mat - matrix::identity(self.mat.nrows())))
    }

    /// Row-major copy of the entries.
    pub fn row_major(&self) -> Vec<Complex64> {
        let n = self.mat.nrows();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|ij| self.mat[ij]).collect()
    }
}

/// Offsets `h = (h_1, …, h_k)` of the chart-0 translation `ζ ↦ ζ + h`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShearParams {
    h: Vec<Complex64>,
    epsilon: f64,
}

impl ShearParams {
    pub fn new(h: Vec<Complex64>, epsilon: f64) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::Invalid("shear needs k >= 1 offsets".into()));
        }
        if !(epsilon > 0.0) {
            return Err(Error::Invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        for (i, z) in h.iter().enumerate() {
            if !(z.norm() < epsilon) {
                return Err(Error::ShearTooLarge { index: i + 1, value: z.norm(), epsilon });
            }
        }
        Ok(Self { h, epsilon })
    }

    /// Offsets with the default validity radius.
    pub fn with_default_epsilon(h: Vec<Complex64>) -> Result<Self> {
        Self::new(h, DEFAULT_EPSILON)
    }

    pub fn zero(k: usize) -> Self {
        Self { h: vec![Complex64::new(0.0, 0.0); k], epsilon: DEFAULT_EPSILON }
    }

    pub fn h(&self) -> &[Complex64] {
        &self.h
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn k(&self) -> usize {
        self.h.len()
    }

    pub fn neg(&self) -> Self {
        Self { h: self.h.iter().map(|z| -z).collect(), epsilon: self.epsilon }
    }
}

/// The shear `G_h`: unit lower-triangular with first column `(1, h_1, …, h_k)`.
pub fn shear(h: &ShearParams) -> NormalizedMatrix {
    let n = h.k() + 1;
    let mut mat = matrix::identity(n);
    for (i, z) in h.h().iter().enumerate() {
        mat[(i + 1, 0)] = *z;
    }
    NormalizedMatrix { mat }
}

/// Multiply a row-major `n×n` matrix into `v`.
#[inline]
pub(crate) fn matvec_into(m: &[Complex64], v: &[Complex64], out: &mut [Complex64]) {
    let n = v.len();
    for (i, o) in out.iter_mut().enumerate() {
        let row = &m[i * n..(i + 1) * n];
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
}

/// Projective action `[z] ↦ [g z]`.
pub fn act(g: &CMatrix, p: &ProjectivePoint) -> Result<ProjectivePoint> {
    let v = nalgebra::DVector::from_column_slice(p.homog());
    if g.ncols() != v.len() {
        return Err(Error::DimensionMismatch { expected: g.ncols(), got: v.len() });
    }
    let w = g * v;
    let scale = frobenius(g) * norm_sqr(p.homog()).sqrt();
    if !(norm_sqr(w.as_slice()).sqrt() > 1e-14 * scale) {
        return Err(Error::DegenerateImage);
    }
    ProjectivePoint::new(w.as_slice().to_vec())
}

/// The exponential map `ψ` before normalization.
pub fn exp_sl(x: &AlgebraElement) -> CMatrix {
    matrix::expm(&x.mat)
}

/// The representation `φ`: divide by the `(1,1)`-entry.
pub fn phi_normalize(m: &CMatrix) -> Result<NormalizedMatrix> {
    let pivot = m[(0, 0)];
    if !(pivot.norm() > PIVOT_TOL) {
        return Err(Error::NormalizationUndefined);
    }
    let mut mat = m / pivot;
    mat[(0, 0)] = Complex64::new(1.0, 0.0);
    NormalizedMatrix::new(mat)
}

/// `Φ = φ ∘ ψ`.
pub fn phi(x: &AlgebraElement) -> Result<NormalizedMatrix> {
    phi_normalize(&exp_sl(x))
}

/// `Φ⁻¹`: rescale to determinant 1 with the principal `(k+1)`-th root,
/// take the principal logarithm and project onto trace zero.
pub fn phi_inverse(a: &NormalizedMatrix) -> Result<AlgebraElement> {
    let dist = a.dist_to_identity();
    if !(dist < LOG_CHART_RADIUS) {
        return Err(Error::OutOfChart(dist));
    }
    let n = a.mat.nrows();
    let det = a.mat.determinant();
    let root = (Complex64::new(1.0, 0.0) / det).powf(1.0 / n as f64);
    let b = &a.mat * root;
    let log = matrix::logm(&b).ok_or(Error::OutOfChart(dist))?;
    Ok(AlgebraElement::project(log))
}

/// `Ḡ_h(A) = φ(A · G_h)`.
pub fn overline_g(a: &NormalizedMatrix, h: &ShearParams) -> Result<NormalizedMatrix> {
    if a.k() != h.k() {
        return Err(Error::DimensionMismatch { expected: a.k(), got: h.k() });
    }
    let n = a.mat.nrows();
    // A·G_h only changes the first column: a_{j,1} + Σ_i a_{j,i} h_{i-1}
    let mut prod = a.mat.clone();
    for j in 0..n {
        let shift: Complex64 = (1..n).map(|i| a.mat[(j, i)] * h.h()[i - 1]).sum();
        prod[(j, 0)] += shift;
    }
    phi_normalize(&prod)
}

/// `H_h = Φ⁻¹ ∘ Ḡ_h ∘ Φ`.
pub fn h_map(x: &AlgebraElement, h: &ShearParams) -> Result<AlgebraElement> {
    phi_inverse(&overline_g(&phi(x)?, h)?)
}

fn uniform_in_ball<R: Rng + ?Sized>(k: usize, radius: f64, rng: &mut R) -> AlgebraElement {
    let dim = algebra_real_dim(k);
    let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let r = radius * rng.random::<f64>().powf(1.0 / dim as f64);
    v.iter_mut().for_each(|x| *x *= r / len);
    AlgebraElement::from_coords(k, &v).unwrap()
}

/// Largest of `‖x‖_s / ‖Φ(x) - Id‖` and `‖Φ(x) - Id‖ / ‖x‖_s` over the
/// samples, or `None` if a sample leaves the chart.
fn max_ratio(k: usize, sigma: f64, samples: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 1.0;
    for _ in 0..samples {
        let x = uniform_in_ball(k, sigma, &mut rng);
        let xn = x.norm_s();
        if xn == 0.0 {
            continue;
        }
        let gn = phi(&x)?.dist_to_identity();
        worst = worst.max(xn / gn).max(gn / xn);
    }
    Ok(worst)
}

/// Numerical constant `C` with `(1/C)‖Φ(x) - Id‖ < ‖x‖_s < C‖Φ(x) - Id‖`
/// on the `σ`-ball: the worst sampled ratio times [`C_SAFETY`].
pub fn estimate_c(k: usize, sigma: f64, samples: usize, seed: u64) -> Result<f64> {
    if !(sigma > 0.0) || samples == 0 {
        return Err(Error::Invalid("estimate_c needs sigma > 0 and samples >= 1".into()));
    }
    Ok(C_SAFETY * max_ratio(k, sigma, samples, seed)?)
}

/// Checks both inequalities for `c` on a fresh sample.
pub fn validate_c(k: usize, sigma: f64, c: f64, samples: usize, seed: u64) -> Result<bool> {
    Ok(max_ratio(k, sigma, samples, seed)? < c)
}

/// `|det DH_h(x)|` from a central-difference Jacobian in the real
/// coordinates of `sl(k+1, C)`.
pub fn jacobian_h(x: &AlgebraElement, h: &ShearParams, step: f64) -> Result<f64> {
    if !(1e-5..=1e-3).contains(&step) {
        return Err(Error::Invalid(format!("jacobian step {step:e} outside [1e-5, 1e-3]")));
    }
    let k = x.k();
    let dim = algebra_real_dim(k);
    let base = x.coords();
    let mut jac = DMatrix::<f64>::zeros(dim, dim);
    for m in 0..dim {
        let mut plus = base.clone();
        let mut minus = base.clone();
        plus[m] += step;
        minus[m] -= step;
        let fp = h_map(&AlgebraElement::from_coords(k, &plus)?, h)?.coords();
        let fm = h_map(&AlgebraElement::from_coords(k, &minus)?, h)?.coords();
        for r in 0..dim {
            jac[(r, m)] = (fp[r] - fm[r]) / (2.0 * step);
        }
    }
    Ok(jac.determinant().abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_x(k: usize, radius: f64, seed: u64) -> AlgebraElement {
        uniform_in_ball(k, radius, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm_s(&CMatrix::zeros(2, 2)), 0.0);
        assert!((norm_s(&matrix::identity(2)) - 2f64.sqrt()).abs() < 1e-15);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
        assert!((norm_s(&d) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn basis_is_orthonormal() {
        for k in 1..=3 {
            let dim = algebra_real_dim(k);
            for a in 0..dim {
                let mut e = vec![0.0; dim];
                e[a] = 1.0;
                let x = AlgebraElement::from_coords(k, &e).unwrap();
                assert!(matrix::trace(x.mat()).norm() < 1e-15);
                assert!((x.norm_s() - 1.0).abs() < 1e-14);
                let back = x.coords();
                for (b, v) in back.iter().enumerate() {
                    assert!((v - e[b]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn rejects_trace() {
        assert!(matches!(AlgebraElement::new(matrix::identity(2)), Err(Error::NotTraceless(_))));
    }

    #[test]
    fn shear_examples() {
        let h = ShearParams::with_default_epsilon(vec![c(0.1, 0.0)]).unwrap();
        let g = shear(&h);
        let zeta = nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(0.2, -0.3)]);
        let out = g.mat() * zeta;
        assert_eq!(out[0], c(1.0, 0.0));
        assert_eq!(out[1], c(0.2 + 0.1, -0.3));
        assert_eq!(shear(&ShearParams::zero(3)), NormalizedMatrix::identity(3));
        let h2 = ShearParams::with_default_epsilon(vec![c(0.1, 0.2), c(-0.05, 0.01)]).unwrap();
        assert_eq!(shear(&h2).mat() * shear(&h2.neg()).mat(), matrix::identity(3));
        assert!(ShearParams::with_default_epsilon(vec![c(0.4, 0.0)]).is_err());
    }

    #[test]
    fn act_examples() {
        let p = ProjectivePoint::new(vec![c(1.0, 0.0), c(0.3, 0.2), c(-0.1, 0.0)]).unwrap();
        assert_eq!(act(&matrix::identity(3), &p).unwrap(), p);
        let h = ShearParams::with_default_epsilon(vec![c(0.1, 0.0), c(0.0, -0.2)]).unwrap();
        let q = act(shear(&h).mat(), &p).unwrap();
        let ch = crate::geometry::to_chart(&q, Some(0)).unwrap();
        let zeta = crate::geometry::to_chart(&p, Some(0)).unwrap();
        assert!((ch.coords()[1] - zeta.coords()[1] - c(0.1, 0.0)).norm() < 1e-14);
        assert!((ch.coords()[2] - zeta.coords()[2] - c(0.0, -0.2)).norm() < 1e-14);
        let g1 = phi(&random_x(2, 0.3, 1)).unwrap();
        let g2 = phi(&random_x(2, 0.3, 2)).unwrap();
        let lhs = act(&(g1.mat() * g2.mat()), &p).unwrap();
        let rhs = act(g1.mat(), &act(g2.mat(), &p).unwrap()).unwrap();
        assert!(lhs.approx_eq(&rhs, 1e-12));
        let scaled = act(&(g1.mat() * c(0.0, 3.0)), &p).unwrap();
        assert!(scaled.approx_eq(&act(g1.mat(), &p).unwrap(), 1e-14));
        let singular = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let e1 = ProjectivePoint::from_real(&[0.0, 1.0]).unwrap();
        assert_eq!(act(&singular, &e1).unwrap_err(), Error::DegenerateImage);
    }

    #[test]
    fn exp_determinant_is_one() {
        for seed in 0..20 {
            let x = random_x(2, 0.5, seed);
            let x = x.scale(0.5 / x.norm_s());
            assert!((exp_sl(&x).determinant() - c(1.0, 0.0)).norm() < 1e-10);
            let prod = exp_sl(&x) * exp_sl(&x.scale(-1.0));
            assert!(frobenius(&(prod - matrix::identity(3))) < 1e-10);
        }
        assert_eq!(exp_sl(&AlgebraElement::zero(2)), matrix::identity(3));
    }

    #[test]
    fn normalize_examples() {
        let two = matrix::identity(3) * c(2.0, 0.0);
        assert_eq!(phi_normalize(&two).unwrap(), NormalizedMatrix::identity(2));
        let g = shear(&ShearParams::with_default_epsilon(vec![c(0.1, 0.1)]).unwrap());
        assert_eq!(phi_normalize(g.mat()).unwrap(), g);
        let m = exp_sl(&random_x(1, 0.3, 5));
        let a = phi_normalize(&m).unwrap();
        let b = phi_normalize(&(&m * c(-0.3, 1.7))).unwrap();
        assert!(frobenius(&(a.mat() - b.mat())) < 1e-15);
        let bad = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(phi_normalize(&bad).unwrap_err(), Error::NormalizationUndefined);
    }

    #[test]
    fn phi_first_order() {
        for seed in 0..50 {
            let x = random_x(2, 0.1, seed);
            let mut lin = matrix::identity(3) + x.mat();
            let x11 = x.mat()[(0, 0)];
            for d in 0..3 {
                lin[(d, d)] -= x11;
            }
            let err = frobenius(&(phi(&x).unwrap().mat() - lin));
            assert!(err <= 5.0 * x.norm_s().powi(2), "seed {seed}: {err}");
        }
        assert_eq!(phi(&AlgebraElement::zero(1)).unwrap(), NormalizedMatrix::identity(1));
    }

    #[test]
    fn phi_roundtrip() {
        assert_eq!(phi_inverse(&NormalizedMatrix::identity(2)).unwrap(), AlgebraElement::zero(2));
        for k in 1..=3 {
            for seed in 0..100 {
                let x = random_x(k, 0.2, seed);
                let back = phi_inverse(&phi(&x).unwrap()).unwrap();
                assert!(frobenius(&(back.mat() - x.mat())) < 1e-10);
                assert_eq!(matrix::trace(back.mat()).norm() < 1e-15, true);
            }
        }
        let far = phi_normalize(&(matrix::identity(2) * c(1.0, 0.0) + CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.9, 0.0), c(0.0, 0.0), c(0.0, 0.0)]))).unwrap();
        assert!(matches!(phi_inverse(&far), Err(Error::OutOfChart(_))));
    }

    #[test]
    fn overline_g_examples() {
        let h = ShearParams::with_default_epsilon(vec![c(0.02, -0.01), c(0.03, 0.0)]).unwrap();
        let id = NormalizedMatrix::identity(2);
        assert_eq!(overline_g(&id, &h).unwrap(), shear(&h));
        let a = phi(&random_x(2, 0.1, 7)).unwrap();
        assert_eq!(overline_g(&a, &ShearParams::zero(2)).unwrap(), a);
        // first column pattern before the normalization
        let g = overline_g(&a, &h).unwrap();
        let denom = c(1.0, 0.0) + a.mat()[(0, 1)] * h.h()[0] + a.mat()[(0, 2)] * h.h()[1];
        for j in 0..3 {
            let col = a.mat()[(j, 0)] + a.mat()[(j, 1)] * h.h()[0] + a.mat()[(j, 2)] * h.h()[1];
            assert!((g.mat()[(j, 0)] * denom - col).norm() < 1e-14);
            for i in 1..3 {
                assert!((g.mat()[(j, i)] * denom - a.mat()[(j, i)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn h_map_examples() {
        let x = random_x(2, 0.1, 9);
        let back = h_map(&x, &ShearParams::zero(2)).unwrap();
        assert!(frobenius(&(back.mat() - x.mat())) < 1e-13);
        let h = ShearParams::with_default_epsilon(vec![c(0.03, 0.01), c(-0.02, 0.04)]).unwrap();
        let at_zero = h_map(&AlgebraElement::zero(2), &h).unwrap();
        assert!(frobenius(&(at_zero.mat() - phi_inverse(&shear(&h)).unwrap().mat())) < 1e-14);
    }

    #[test]
    fn c_estimate_bounds() {
        let cst = estimate_c(1, DEFAULT_SIGMA, 2000, 1).unwrap();
        assert!(cst >= C_SAFETY);
        assert!(validate_c(1, DEFAULT_SIGMA, cst, 20_000, 2).unwrap());
    }

    #[test]
    fn jacobian_at_zero_shear() {
        let x = random_x(1, 0.1, 4);
        let det = jacobian_h(&x, &ShearParams::zero(1), 1e-4).unwrap();
        assert!((det - 1.0).abs() < 1e-6);
        assert!(jacobian_h(&x, &ShearParams::zero(1), 1e-2).is_err());
    }
}
