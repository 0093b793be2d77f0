//! Cut-off functions `χ_δ = (χ_{K_{δ/2}})_θ` with `Cθσ = C'δ/4`, and the
//! checks that they equal 1 on `K`, vanish off `K_δ`, and have `C^α`
//! seminorms growing like `δ^{-α}`.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    dist_to_set, line_angle, norm_sqr, random_point, random_point_at_distance, to_chart,
    ChartCoordinates, CompactSetSpec, ProjectivePoint,
};
use crate::lie::{estimate_c, matvec_into, validate_c};
use crate::measure::MollifierSpec;
use crate::regularize::{
    c_alpha_estimate, regularize, FunctionOnP, RegularizedFunction, ScalingReport, ScalingRow,
    DEFAULT_STEP_C1, DEFAULT_STEP_C2,
};

/// Smallest `δ` accepted by [`build_cutoff`].
pub const MIN_DELTA: f64 = 1e-4;
/// Samples used by [`CutoffConfig::calibrate`] to estimate `C`.
pub const C_ESTIMATE_SAMPLES: usize = 5_000;

/// Indicator of the open fattening `{z : dist(z, K) < ρ}`.
///
/// Membership is tested as `|<c, z>| > cos(r + ρ) |z|` per ball, which is
/// the same condition as `d(z, c) - r < ρ` without an `arccos`.
#[derive(Debug, Clone)]
pub struct FattenedIndicator {
    set: CompactSetSpec,
    rho: f64,
    /// per ball: `Some(cos²(r + ρ))`, or `None` when the ball covers `P^k`
    thresholds: Vec<(Vec<Complex64>, Option<f64>)>,
}

impl FattenedIndicator {
    pub fn set(&self) -> &CompactSetSpec {
        &self.set
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

impl FunctionOnP for FattenedIndicator {
    fn eval(&self, z: &[Complex64]) -> f64 {
        if self.rho <= 0.0 {
            // K_0 is empty under the strict inequality
            return 0.0;
        }
        let zz = norm_sqr(z);
        for (centre, thr) in &self.thresholds {
            match thr {
                None => return 1.0,
                Some(c2) => {
                    let pair: Complex64 = centre.iter().zip(z).map(|(a, b)| a.conj() * b).sum();
                    if pair.norm_sqr() > c2 * zz {
                        return 1.0;
                    }
                }
            }
        }
        0.0
    }
}

pub fn indicator_fattened(set: &CompactSetSpec, rho: f64) -> Result<FattenedIndicator> {
    if !(rho >= 0.0) {
        return Err(Error::Invalid(format!("fattening radius must be nonnegative, got {rho}")));
    }
    let thresholds = set
        .balls()
        .iter()
        .map(|b| {
            let reach = b.radius + rho;
            let thr = (reach < FRAC_PI_2).then(|| reach.cos().powi(2));
            (b.center.homog().to_vec(), thr)
        })
        .collect();
    Ok(FattenedIndicator { set: set.clone(), rho, thresholds })
}

/// Parameters shared by every `χ_δ` of a family.
#[derive(Debug, Clone, Serialize)]
pub struct CutoffConfig {
    pub k: usize,
    pub sigma: f64,
    pub delta0: f64,
    pub samples: usize,
    pub seed: u64,
    /// `C` with `(1/C)‖Φ(x) - Id‖ < ‖x‖_s < C‖Φ(x) - Id‖` on the `σ`-ball
    pub c: f64,
    /// `C' = Cθ_max σ / (δ₀/4) ≤ 1`
    pub c_prime: f64,
    pub theta_max: f64,
}

impl CutoffConfig {
    /// Builds a configuration from a known constant `C`, taking the largest
    /// admissible `θ_max = min(1, δ₀ / (4Cσ))`.
    pub fn with_constant(k: usize, sigma: f64, delta0: f64, samples: usize, seed: u64, c: f64) -> Result<Self> {
        if k == 0 || !(sigma > 0.0) || !(delta0 > 0.0) || samples == 0 || !(c >= 1.0) {
            return Err(Error::Invalid("cutoff config needs k, sigma, delta0, samples > 0 and C >= 1".into()));
        }
        let unclamped = delta0 / (4.0 * c * sigma);
        // C' = Cθ_max σ/(δ₀/4) is exactly 1 whenever θ_max < 1
        let (theta_max, c_prime) = if unclamped < 1.0 {
            (unclamped, 1.0)
        } else {
            (1.0, 4.0 * c * sigma / delta0)
        };
        Ok(Self { k, sigma, delta0, samples, seed, c, c_prime, theta_max })
    }

    /// Estimates `C` with [`estimate_c`] and validates it on a sample ten
    /// times larger before building the configuration.
    pub fn calibrate(k: usize, sigma: f64, delta0: f64, samples: usize, seed: u64) -> Result<Self> {
        let c = estimate_c(k, sigma, C_ESTIMATE_SAMPLES, seed ^ 0xC0FF_EE00)?;
        if !validate_c(k, sigma, c, 10 * C_ESTIMATE_SAMPLES, seed ^ 0x0BAD_CAFE)? {
            return Err(Error::Invalid(format!("constant C = {c} failed resampling validation")));
        }
        Self::with_constant(k, sigma, delta0, samples, seed, c)
    }

    pub fn mollifier(&self) -> Result<MollifierSpec> {
        MollifierSpec::new(self.k, self.sigma)
    }
}

/// `θ(δ) = C'δ / (4Cσ)`.
pub fn choose_theta(config: &CutoffConfig, delta: f64) -> Result<f64> {
    if !(delta > MIN_DELTA && delta < config.delta0) {
        return Err(Error::DeltaOutOfRange { delta, lo: MIN_DELTA, hi: config.delta0 });
    }
    Ok(config.c_prime * delta / (4.0 * config.c * config.sigma))
}

/// A frozen `χ_δ`.
#[derive(Debug, Clone)]
pub struct CutoffFunction {
    config: CutoffConfig,
    set: CompactSetSpec,
    delta: f64,
    inner: RegularizedFunction,
}

impl CutoffFunction {
    pub fn config(&self) -> &CutoffConfig {
        &self.config
    }

    pub fn set(&self) -> &CompactSetSpec {
        &self.set
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn theta(&self) -> f64 {
        self.inner.theta()
    }

    pub fn inner(&self) -> &RegularizedFunction {
        &self.inner
    }
}

impl FunctionOnP for CutoffFunction {
    fn eval(&self, z: &[Complex64]) -> f64 {
        self.inner.eval(z)
    }
}

pub fn build_cutoff(set: &CompactSetSpec, delta: f64, config: &CutoffConfig) -> Result<CutoffFunction> {
    build_cutoff_with(set, delta, config, &config.mollifier()?)
}

/// As [`build_cutoff`], reusing an already tabulated mollifier.
pub fn build_cutoff_with(
    set: &CompactSetSpec,
    delta: f64,
    config: &CutoffConfig,
    mollifier: &MollifierSpec,
) -> Result<CutoffFunction> {
    if set.dim() != config.k {
        return Err(Error::DimensionMismatch { expected: config.k + 1, got: set.dim() + 1 });
    }
    let theta = choose_theta(config, delta)?;
    let source = Arc::new(indicator_fattened(set, 0.5 * delta)?);
    let inner = regularize(source, mollifier, theta, config.samples, config.seed)?;
    Ok(CutoffFunction { config: config.clone(), set: set.clone(), delta, inner })
}

/// Result of [`verify_cutoff`]; field names follow the JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    /// `max |χ_δ(z) - 1|` over sampled `z ∈ K`
    #[serde(rename = "max_dev_on_K")]
    pub max_dev_on_k: f64,
    /// `max |χ_δ(z)|` over sampled `z` with `dist(z, K) ≥ δ`
    #[serde(rename = "max_val_off_Kdelta")]
    pub max_val_off_kdelta: f64,
    /// `max ‖g ζ - ζ‖_0 / ‖ζ‖_0` over stored samples and audit points
    pub euclid_audit_max: f64,
    pub euclid_audit_bound: f64,
    /// `max d(z, g z)` over stored samples and audit points
    pub fs_audit_max: f64,
    pub fs_audit_bound: f64,
    pub pass: bool,
}

/// Random points of `K`: every ball centre, then points at uniform
/// distance inside a randomly chosen ball.
pub fn sample_in_set<R: Rng + ?Sized>(set: &CompactSetSpec, count: usize, rng: &mut R) -> Vec<ProjectivePoint> {
    let balls = set.balls();
    let mut out: Vec<ProjectivePoint> = balls.iter().take(count).map(|b| b.center.clone()).collect();
    while out.len() < count {
        let b = &balls[rng.random_range(0..balls.len())];
        out.push(random_point_at_distance(&b.center, b.radius * rng.random::<f64>(), rng));
    }
    out
}

/// Random points with `dist(z, K) ≥ delta`; half are drawn in the shell
/// `[δ, 2δ]` around a ball, half anywhere on `P^k`.
pub fn sample_outside<R: Rng + ?Sized>(
    set: &CompactSetSpec,
    delta: f64,
    count: usize,
    rng: &mut R,
) -> Vec<ProjectivePoint> {
    let balls = set.balls();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < 1000 * count.max(1) {
        attempts += 1;
        let z = if out.len() % 2 == 0 {
            let b = &balls[rng.random_range(0..balls.len())];
            let d = (b.radius + delta * (1.0 + rng.random::<f64>())).min(FRAC_PI_2);
            random_point_at_distance(&b.center, d, rng)
        } else {
            random_point(set.dim(), rng)
        };
        if dist_to_set(&z, set) >= delta {
            out.push(z);
        }
    }
    out
}

/// Largest Euclidean and Fubini–Study displacements over the stored samples.
fn displacement_audit(rf: &RegularizedFunction, points: &[ProjectivePoint]) -> (f64, f64) {
    let n = rf.k() + 1;
    points
        .par_iter()
        .map(|p| {
            let zeta = to_chart(p, None).expect("max-modulus chart is always defined");
            let v = zeta.coords();
            let v_norm = norm_sqr(v).sqrt();
            let mut moved = vec![Complex64::new(0.0, 0.0); n];
            let (mut e, mut f) = (0.0f64, 0.0f64);
            for g in rf.matrices() {
                matvec_into(g, v, &mut moved);
                let diff: f64 = moved.iter().zip(v).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
                e = e.max(diff / v_norm);
                f = f.max(line_angle(v, &moved));
            }
            (e, f)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)))
}

/// Checks the identity and support claims at sampled points and audits the
/// displacement of every stored sample matrix.
pub fn verify_cutoff(cf: &CutoffFunction, n_inner: usize, n_outer: usize, seed: u64) -> Result<VerificationReport> {
    verify_cutoff_with_audit(cf, n_inner, n_outer, 100, seed)
}

/// As [`verify_cutoff`] with `n_chart` extra audit points per chart `Z_i`.
pub fn verify_cutoff_with_audit(
    cf: &CutoffFunction,
    n_inner: usize,
    n_outer: usize,
    n_chart: usize,
    seed: u64,
) -> Result<VerificationReport> {
    if n_inner == 0 || n_outer == 0 {
        return Err(Error::Invalid("verification needs at least one inner and one outer point".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inner = sample_in_set(&cf.set, n_inner, &mut rng);
    let outer = sample_outside(&cf.set, cf.delta, n_outer, &mut rng);
    if outer.is_empty() {
        return Err(Error::Invalid("no points at distance >= delta from K".into()));
    }
    let k = cf.config.k;
    let mut audit: Vec<ProjectivePoint> = inner.iter().chain(&outer).cloned().collect();
    for chart in 0..=k {
        audit.extend(chart_audit_points(k, chart, n_chart, &mut rng));
    }

    let max_dev_on_k = inner.par_iter().map(|z| (cf.eval_point(z) - 1.0).abs()).reduce(|| 0.0, f64::max);
    let max_val_off_kdelta = outer.par_iter().map(|z| cf.eval_point(z).abs()).reduce(|| 0.0, f64::max);
    let (euclid_audit_max, fs_audit_max) = displacement_audit(&cf.inner, &audit);
    let euclid_audit_bound = cf.config.c_prime * cf.delta / 4.0;
    let fs_audit_bound = 0.5 * cf.delta;
    let pass = fs_audit_max < fs_audit_bound
        && euclid_audit_max <= euclid_audit_bound
        && max_dev_on_k == 0.0
        && max_val_off_kdelta == 0.0;
    Ok(VerificationReport {
        max_dev_on_k,
        max_val_off_kdelta,
        euclid_audit_max,
        euclid_audit_bound,
        fs_audit_max,
        fs_audit_bound,
        pass,
    })
}

/// Random points of chart `Z_i` with affine coordinates of modulus up to 2.
pub fn chart_audit_points<R: Rng + ?Sized>(k: usize, chart: usize, count: usize, rng: &mut R) -> Vec<ProjectivePoint> {
    (0..count)
        .map(|_| {
            let affine: Vec<Complex64> = (0..k)
                .map(|_| Complex64::from_polar(2.0 * rng.random::<f64>(), std::f64::consts::TAU * rng.random::<f64>()))
                .collect();
            ChartCoordinates::from_affine(chart, &affine).unwrap().to_point()
        })
        .collect()
}

/// Where derivative probes of `χ_δ` are placed.
#[derive(Debug, Clone, Copy, Serialize, serde::Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    /// points per `δ`
    pub points: usize,
    pub seed: u64,
    /// inner edge of the annulus, as a fraction of `δ`
    pub inner: f64,
    /// outer edge of the annulus, as a fraction of `δ`
    pub outer: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { points: 400, seed: 7, inner: 0.25, outer: 1.0 }
    }
}

/// Chart points in the transition annulus `inner·δ ≤ dist(z, K) ≤ outer·δ`,
/// each in its maximum-modulus chart.
pub fn annulus_grid(set: &CompactSetSpec, delta: f64, grid: &GridSpec) -> Vec<ChartCoordinates> {
    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
    let balls = set.balls();
    let (lo, hi) = (grid.inner * delta, grid.outer * delta);
    let mut out = Vec::with_capacity(grid.points);
    let mut attempts = 0usize;
    while out.len() < grid.points && attempts < 1000 * grid.points.max(1) {
        attempts += 1;
        let b = &balls[rng.random_range(0..balls.len())];
        let d = (b.radius + lo + (hi - lo) * rng.random::<f64>()).min(FRAC_PI_2);
        let z = random_point_at_distance(&b.center, d, &mut rng);
        let dist = dist_to_set(&z, set);
        if dist >= lo && dist <= hi {
            out.push(to_chart(&z, None).unwrap());
        }
    }
    out
}

pub fn default_step(alpha: u32) -> Result<f64> {
    match alpha {
        1 => Ok(DEFAULT_STEP_C1),
        2 => Ok(DEFAULT_STEP_C2),
        other => Err(Error::BadOrder(other)),
    }
}

/// Builds `χ_δ` for each `δ` with a common seed, estimates its `C^α`
/// seminorm on the annulus grid and fits the log-log slope.
pub fn scaling_experiment(
    set: &CompactSetSpec,
    deltas: &[f64],
    alpha: u32,
    config: &CutoffConfig,
    grid: &GridSpec,
    step: f64,
) -> Result<ScalingReport> {
    if deltas.len() < 3 {
        return Err(Error::TooFewRows(deltas.len()));
    }
    let mollifier = config.mollifier()?;
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let cf = build_cutoff_with(set, delta, config, &mollifier)?;
        let points = annulus_grid(set, delta, grid);
        let seminorm = if points.is_empty() { 0.0 } else { c_alpha_estimate(&cf, &points, alpha, step)? };
        rows.push(ScalingRow { delta, theta: cf.theta(), seminorm });
    }
    ScalingReport::new(alpha, rows)
}
