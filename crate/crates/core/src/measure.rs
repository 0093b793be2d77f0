//! A smooth radial probability measure on `sl(k+1, C) ≅ R^n`, `n = 2k² + 4k`,
//! supported in the `σ`-ball of the Frobenius norm, together with its
//! scaled versions `μ_θ = (h_θ)_* μ`.
//!
//! The density is `M(x) = c · ρ(‖x‖_s / σ)` with the bump profile
//! `ρ(t) = exp(-1 / (1 - t²))` on `[0, 1)`, extended by zero, which is flat
//! to every order at the support boundary.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::lie::{algebra_real_dim, AlgebraElement};

/// Nodes in the inverse-CDF table of the radial law.
pub const CDF_TABLE_NODES: usize = 4096;
const QUAD_REL_TOL: f64 = 1e-10;
const MASS_TOL: f64 = 1e-3;

/// `exp(-1/(1-t²))` for `|t| < 1`, zero otherwise.
#[inline]
pub fn radial_profile(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

/// Surface area of the unit sphere in `R^n` for even `n`.
fn sphere_area(n: usize) -> f64 {
    debug_assert!(n % 2 == 0);
    let half = n / 2;
    let factorial: f64 = (1..half).map(|j| j as f64).product();
    2.0 * PI.powi(half as i32) / factorial
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        left + right + diff / 15.0
    } else {
        adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`, seeded on a
/// uniform partition so that sharply peaked integrands are resolved.
fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    const PIECES: usize = 64;
    let h = (b - a) / PIECES as f64;
    (0..PIECES)
        .map(|i| {
            let lo = a + i as f64 * h;
            let hi = lo + h;
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = simpson(lo, hi, fa, fm, fb);
            adaptive_simpson_rec(f, lo, hi, fa, fm, fb, whole, tol / PIECES as f64, 40)
        })
        .sum()
}

fn radial_weight(n: usize) -> impl Fn(f64) -> f64 {
    move |t: f64| t.powi(n as i32 - 1) * radial_profile(t)
}

/// `∫₀¹ t^{n-1} ρ(t) dt`, to relative error `1e-10`.
pub fn radial_integral(n: usize) -> f64 {
    let f = radial_weight(n);
    // a coarse pass fixes the scale for the relative tolerance
    let rough = integrate(&f, 0.0, 1.0, 1e-3);
    integrate(&f, 0.0, 1.0, QUAD_REL_TOL * rough.abs())
}

/// The constant `c` making `c · ρ(‖x‖_s/σ)` a probability density on
/// `R^{2k²+4k}`.
pub fn normalization(k: usize, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Invalid(format!("sigma must be positive, got {sigma}")));
    }
    let n = algebra_real_dim(k);
    Ok(1.0 / (sphere_area(n) * sigma.powi(n as i32) * radial_integral(n)))
}

/// The base measure `μ`.
#[derive(Debug, Clone)]
pub struct MollifierSpec {
    k: usize,
    sigma: f64,
    norm_const: f64,
    /// cumulative radial law at `t_i = i / (N - 1)`, normalized to end at 1
    cdf: Vec<f64>,
    table_mass: f64,
}

impl MollifierSpec {
    pub fn new(k: usize, sigma: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("dimension k must be at least 1".into()));
        }
        let norm_const = normalization(k, sigma)?;
        let n = algebra_real_dim(k);
        let f = radial_weight(n);
        let h = 1.0 / (CDF_TABLE_NODES - 1) as f64;
        let mut cdf = Vec::with_capacity(CDF_TABLE_NODES);
        cdf.push(0.0);
        let mut acc = 0.0;
        for i in 1..CDF_TABLE_NODES {
            let (a, b) = ((i - 1) as f64 * h, i as f64 * h);
            // composite Simpson with 8 panels per cell
            let panels = 8;
            let w = (b - a) / panels as f64;
            let cell: f64 = (0..panels)
                .map(|p| {
                    let lo = a + p as f64 * w;
                    w / 6.0 * (f(lo) + 4.0 * f(lo + 0.5 * w) + f(lo + w))
                })
                .sum();
            acc += cell;
            cdf.push(acc);
        }
        let total = acc;
        let mass = total * sphere_area(n) * sigma.powi(n as i32) * norm_const;
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::Invalid(format!("mollifier mass {mass} is not 1")));
        }
        cdf.iter_mut().for_each(|c| *c /= total);
        *cdf.last_mut().unwrap() = 1.0;
        Ok(Self { k, sigma, norm_const, cdf, table_mass: mass })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn norm_const(&self) -> f64 {
        self.norm_const
    }

    /// Real dimension of the underlying coordinate space.
    pub fn real_dim(&self) -> usize {
        algebra_real_dim(self.k)
    }

    /// Total mass of the density as integrated by the CDF table, an
    /// independent rule from the one behind the normalization constant.
    pub fn tabulated_mass(&self) -> f64 {
        self.table_mass
    }

    /// Radius fraction `t ∈ [0, 1)` with radial CDF equal to `u ∈ [0, 1)`.
    pub fn inverse_radial_cdf(&self, u: f64) -> f64 {
        let i = self.cdf.partition_point(|&c| c <= u);
        if i == 0 {
            return 0.0;
        }
        if i >= self.cdf.len() {
            return 1.0;
        }
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let h = 1.0 / (CDF_TABLE_NODES - 1) as f64;
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        ((i - 1) as f64 + frac) * h
    }
}

/// `M(x)`.
pub fn density(spec: &MollifierSpec, x: &AlgebraElement) -> f64 {
    spec.norm_const * radial_profile(x.norm_s() / spec.sigma)
}

/// The pushforward `μ_θ` of `μ` under `x ↦ θx`, `θ ∈ (0, 1]`.
#[derive(Debug, Clone)]
pub struct ScaledMeasure {
    base: MollifierSpec,
    theta: f64,
}

impl ScaledMeasure {
    pub fn new(base: MollifierSpec, theta: f64) -> Result<Self> {
        if theta == 0.0 {
            return Err(Error::ThetaZero);
        }
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::ThetaOutOfRange(theta));
        }
        Ok(Self { base, theta })
    }

    pub fn base(&self) -> &MollifierSpec {
        &self.base
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn support_radius(&self) -> f64 {
        self.theta * self.base.sigma
    }
}

/// `θ^{-n} M(x / θ)`, the density of `μ_θ`.
pub fn scaled_density(m: &ScaledMeasure, x: &AlgebraElement) -> f64 {
    let n = m.base.real_dim() as i32;
    m.theta.powi(-n) * m.base.norm_const * radial_profile(x.norm_s() / m.support_radius())
}

/// The `index`-th sample of `μ_θ` for a given seed. Each index has its own
/// ChaCha stream, so any subrange can be generated independently.
pub fn sample_one(m: &ScaledMeasure, seed: u64, index: u64) -> AlgebraElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let n = m.base.real_dim();
    let t = m.base.inverse_radial_cdf(rng.random::<f64>());
    let mut dir: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    let r = t * m.support_radius();
    dir.iter_mut().for_each(|v| *v *= r / len);
    AlgebraElement::from_coords(m.base.k, &dir).expect("coordinate length matches")
}

/// `count` deterministic samples of `μ_θ`.
pub fn sample(m: &ScaledMeasure, count: usize, seed: u64) -> Vec<AlgebraElement> {
    sample_range(m, 0..count as u64, seed)
}

pub fn sample_range(m: &ScaledMeasure, range: std::ops::Range<u64>, seed: u64) -> Vec<AlgebraElement> {
    range.map(|j| sample_one(m, seed, j)).collect()
}

/// Importance-sampled estimate of `∫ M dλ` with a centred Gaussian
/// proposal matched to the radial peak of the density. Returns the
/// estimate and its standard error. Uses only [`density`], not the radial
/// quadrature behind the normalization constant.
pub fn monte_carlo_mass(spec: &MollifierSpec, samples: usize, seed: u64) -> (f64, f64) {
    let n = spec.real_dim();
    // radius fraction maximizing t^{n-1} ρ(t)
    let peak = (1..10_000)
        .map(|i| i as f64 / 10_000.0)
        .max_by(|a, b| {
            let w = |t: f64| (n as f64 - 1.0) * t.ln() - 1.0 / (1.0 - t * t);
            w(*a).total_cmp(&w(*b))
        })
        .unwrap();
    let s = 1.25 * spec.sigma * peak / (n as f64).sqrt();
    let log_norm = -0.5 * n as f64 * (2.0 * PI * s * s).ln();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    let mut coords = vec![0.0; n];
    for _ in 0..samples {
        let mut r2 = 0.0;
        for c in coords.iter_mut() {
            let g: f64 = rng.sample(StandardNormal);
            *c = s * g;
            r2 += *c * *c;
        }
        let x = AlgebraElement::from_coords(spec.k, &coords).expect("coordinate length matches");
        let proposal = (log_norm - 0.5 * r2 / (s * s)).exp();
        let w = density(spec, &x) / proposal;
        sum += w;
        sum_sq += w * w;
    }
    let m = samples as f64;
    let mean = sum / m;
    let var = (sum_sq / m - mean * mean).max(0.0);
    (mean, (var / m).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite trapezoid on a fine uniform grid; independent of the
    /// adaptive rule.
    fn trapezoid(f: impl Fn(f64) -> f64, nodes: usize) -> f64 {
        let h = 1.0 / (nodes - 1) as f64;
        let inner: f64 = (1..nodes - 1).map(|i| f(i as f64 * h)).sum();
        h * (inner + 0.5 * (f(0.0) + f(1.0)))
    }

    #[test]
    fn monte_carlo_mass_agrees() {
        for k in 1..=3 {
            let spec = MollifierSpec::new(k, 0.1).unwrap();
            let (mass, err) = monte_carlo_mass(&spec, 100_000, 5);
            assert!((mass - 1.0).abs() < 3.0 * err, "k={k}: {mass} ± {err}");
            assert!(err < 0.01, "k={k}: stderr {err}");
            assert!((spec.tabulated_mass() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn profile_values() {
        assert_eq!(radial_profile(0.0), (-1.0f64).exp());
        assert_eq!(radial_profile(1.0), 0.0);
        assert_eq!(radial_profile(2.0), 0.0);
    }

    #[test]
    fn radial_integral_matches_trapezoid() {
        for k in 1..=3 {
            let n = algebra_real_dim(k);
            let oracle = trapezoid(|t| t.powi(n as i32 - 1) * radial_profile(t), 400_001);
            let got = radial_integral(n);
            assert!(((got - oracle) / oracle).abs() < 1e-9, "k={k}: {got} vs {oracle}");
        }
    }

    #[test]
    fn normalization_scaling() {
        let a = normalization(1, 0.1).unwrap();
        let b = normalization(1, 0.2).unwrap();
        assert!(a.is_finite() && a > 0.0);
        assert!((a / b - 2f64.powi(6)).abs() < 1e-9 * 64.0);
        assert!(normalization(1, 0.0).is_err());
    }

    #[test]
    fn density_examples() {
        let spec = MollifierSpec::new(1, 0.1).unwrap();
        assert_eq!(density(&spec, &AlgebraElement::zero(1)), spec.norm_const() * (-1.0f64).exp());
        let mut e = vec![0.0; 6];
        e[0] = 0.1;
        assert_eq!(density(&spec, &AlgebraElement::from_coords(1, &e).unwrap()), 0.0);
        let mut a = vec![0.0; 6];
        a[2] = 0.05;
        let mut b = vec![0.0; 6];
        b[5] = -0.05;
        let da = density(&spec, &AlgebraElement::from_coords(1, &a).unwrap());
        let db = density(&spec, &AlgebraElement::from_coords(1, &b).unwrap());
        assert_eq!(da, db);
    }

    #[test]
    fn flat_at_boundary() {
        let spec = MollifierSpec::new(1, 0.1).unwrap();
        let at = |r: f64| {
            let mut c = vec![0.0; 6];
            c[0] = r;
            density(&spec, &AlgebraElement::from_coords(1, &c).unwrap())
        };
        let s = 1e-6;
        let r = 0.1 - 1e-3;
        let grad = (at(r + s) - at(r - s)) / (2.0 * s);
        assert!(grad.abs() <= 1e-6, "{grad}");
    }

    #[test]
    fn scaled_density_examples() {
        let spec = MollifierSpec::new(1, 0.1).unwrap();
        let one = ScaledMeasure::new(spec.clone(), 1.0).unwrap();
        let half = ScaledMeasure::new(spec.clone(), 0.5).unwrap();
        let x = AlgebraElement::from_coords(1, &[0.01, 0.02, -0.03, 0.0, 0.01, 0.02]).unwrap();
        assert_eq!(scaled_density(&one, &x), density(&spec, &x));
        let rel = scaled_density(&half, &x.scale(0.5)) / (2f64.powi(6) * density(&spec, &x));
        assert!((rel - 1.0).abs() < 1e-12);
        let outside = AlgebraElement::from_coords(1, &[0.05, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(scaled_density(&half, &outside), 0.0);
        assert_eq!(ScaledMeasure::new(spec.clone(), 0.0).unwrap_err(), Error::ThetaZero);
        assert!(ScaledMeasure::new(spec, 1.5).is_err());
    }

    #[test]
    fn samples_are_deterministic_and_supported() {
        let m = ScaledMeasure::new(MollifierSpec::new(2, 0.1).unwrap(), 0.3).unwrap();
        let a = sample(&m, 500, 7);
        let b = sample_range(&m, 200..500, 7);
        assert_eq!(&a[200..], &b[..]);
        assert!(a.iter().all(|x| x.norm_s() < m.support_radius()));
        // empirical mean close to zero
        let n = m.base().real_dim();
        let mut mean = vec![0.0; n];
        for x in &a {
            for (acc, v) in mean.iter_mut().zip(x.coords()) {
                *acc += v / a.len() as f64;
            }
        }
        let bound = 3.0 / (a.len() as f64).sqrt() * m.support_radius();
        assert!(mean.iter().all(|v| v.abs() < bound));
    }

    #[test]
    fn inverse_cdf_is_monotone() {
        let spec = MollifierSpec::new(3, 0.1).unwrap();
        let mut prev = 0.0;
        for i in 0..=1000 {
            let t = spec.inverse_radial_cdf(i as f64 / 1001.0);
            assert!(t >= prev && t < 1.0);
            prev = t;
        }
    }
}
