//! Numerical self-checks of the exponential chart, the shear diagram and the
//! mollifier mass.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::Result;
use crate::lie::{
    algebra_real_dim, exp_sl, frobenius, h_map, jacobian_h, phi, phi_inverse, phi_normalize,
    shear, AlgebraElement, ShearParams,
};
use crate::measure::{monte_carlo_mass, MollifierSpec};

pub const ROUNDTRIP_TOL: f64 = 1e-10;
pub const DIAGRAM_TOL: f64 = 1e-9;
pub const JACOBIAN_IDENTITY_TOL: f64 = 1e-6;
pub const MASS_TOL: f64 = 1e-3;
pub const JACOBIAN_SHEARS: [f64; 4] = [0.0, 0.005, 0.01, 0.02];
pub const JACOBIAN_STEP: f64 = 1e-4;

/// Uniform sample of the `radius`-ball of `sl(k+1, C)`.
pub fn random_algebra<R: Rng + ?Sized>(k: usize, radius: f64, rng: &mut R) -> AlgebraElement {
    let dim = algebra_real_dim(k);
    let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let r = radius * rng.random::<f64>().powf(1.0 / dim as f64);
    v.iter_mut().for_each(|x| *x *= r / len);
    AlgebraElement::from_coords(k, &v).unwrap()
}

/// Shear with every `|h_i| ≤ bound`, uniform in each complex disc.
pub fn random_shear<R: Rng + ?Sized>(k: usize, bound: f64, rng: &mut R) -> ShearParams {
    let h = (0..k)
        .map(|_| {
            let r = bound * rng.random::<f64>().sqrt();
            Complex64::from_polar(r, std::f64::consts::TAU * rng.random::<f64>())
        })
        .collect();
    ShearParams::with_default_epsilon(h).unwrap()
}

/// `max ‖Φ⁻¹(Φ(x)) - x‖_s` over `count` samples of the `radius`-ball.
pub fn phi_roundtrip_error(k: usize, radius: f64, count: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let x = random_algebra(k, radius, &mut rng);
        let back = phi_inverse(&phi(&x)?)?;
        worst = worst.max(frobenius(&(back.mat() - x.mat())));
    }
    Ok(worst)
}

/// `max |det exp(x) - 1|` for traceless `x` with `‖x‖_s = norm`.
pub fn exp_determinant_error(k: usize, norm: f64, count: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let x = random_algebra(k, 1.0, &mut rng);
            let x = x.scale(norm / x.norm_s());
            (exp_sl(&x).determinant() - Complex64::new(1.0, 0.0)).norm()
        })
        .fold(0.0, f64::max)
}

/// `max ‖Φ(H_h(x)) - φ(Φ(x) G_h)‖_s` over random `x`, `h`.
pub fn diagram_error(k: usize, x_radius: f64, h_bound: f64, count: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let x = random_algebra(k, x_radius, &mut rng);
        let h = random_shear(k, h_bound, &mut rng);
        let lhs = phi(&h_map(&x, &h)?)?;
        let rhs = phi_normalize(&(phi(&x)?.mat() * shear(&h).mat()))?;
        worst = worst.max(frobenius(&(lhs.mat() - rhs.mat())));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Serialize)]
pub struct JacobianRow {
    pub h_abs: f64,
    pub det: f64,
    pub deviation: f64,
}

/// `|det DH_h(0)|` for `h = (|h|/√k, …, |h|/√k)`.
pub fn jacobian_sweep(k: usize, shears: &[f64]) -> Result<Vec<JacobianRow>> {
    shears
        .iter()
        .map(|&habs| {
            let comp = Complex64::new(habs / (k as f64).sqrt(), 0.0);
            let h = ShearParams::with_default_epsilon(vec![comp; k])?;
            let det = jacobian_h(&AlgebraElement::zero(k), &h, JACOBIAN_STEP)?;
            Ok(JacobianRow { h_abs: habs, det, deviation: (det - 1.0).abs() })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct MassReport {
    pub norm_const: f64,
    pub tabulated_mass: f64,
    pub monte_carlo_mass: f64,
    pub monte_carlo_stderr: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub k: usize,
    pub sigma: f64,
    pub phi_roundtrip_max_err: f64,
    pub exp_det_max_err: f64,
    pub diagram_max_err: f64,
    pub jacobian: Vec<JacobianRow>,
    pub mass: MassReport,
    pub pass: bool,
}

pub fn run_diagnostics(k: usize, sigma: f64, seed: u64) -> Result<DiagnosticsReport> {
    let phi_roundtrip_max_err = phi_roundtrip_error(k, 0.2, 1000, seed)?;
    let exp_det_max_err = exp_determinant_error(k, 0.5, 1000, seed.wrapping_add(1));
    let diagram_max_err = diagram_error(k, 0.1, 0.05, 1000, seed.wrapping_add(2))?;
    let jacobian = jacobian_sweep(k, &JACOBIAN_SHEARS)?;
    let spec = MollifierSpec::new(k, sigma)?;
    let (mc, mc_err) = monte_carlo_mass(&spec, 1_000_000, seed.wrapping_add(3));
    let mass = MassReport {
        norm_const: spec.norm_const(),
        tabulated_mass: spec.tabulated_mass(),
        monte_carlo_mass: mc,
        monte_carlo_stderr: mc_err,
    };
    let pass = phi_roundtrip_max_err <= ROUNDTRIP_TOL
        && exp_det_max_err <= ROUNDTRIP_TOL
        && diagram_max_err <= DIAGRAM_TOL
        && jacobian[0].deviation <= JACOBIAN_IDENTITY_TOL
        && (mass.tabulated_mass - 1.0).abs() <= MASS_TOL
        && (mc - mass.tabulated_mass).abs() <= 3.0 * mc_err;
    Ok(DiagnosticsReport {
        k,
        sigma,
        phi_roundtrip_max_err,
        exp_det_max_err,
        diagram_max_err,
        jacobian,
        mass,
        pass,
    })
}
