//! θ-regularization `f_θ(z) = ∫ f(g z) dμ_θ` as a frozen Monte-Carlo
//! average, and finite-difference estimates of its `C^α` seminorms.
//!
//! The `S` group elements `g_j = Φ(θ x_j)`, `x_j ~ μ`, are drawn once when the
//! regularized function is built and reused for every evaluation, so that
//! all stencil points of a finite difference see the same samples.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ChartCoordinates, ProjectivePoint};
use crate::lie::{matvec_into, phi};
use crate::measure::{sample_one, MollifierSpec, ScaledMeasure};

/// Default number of frozen group samples.
pub const DEFAULT_SAMPLES: usize = 20_000;
/// Default central-difference step for first derivatives.
pub const DEFAULT_STEP_C1: f64 = 1e-3;
/// Default central-difference step for second derivatives.
pub const DEFAULT_STEP_C2: f64 = 3e-3;

pub const MIN_STEP: f64 = 1e-5;
pub const MAX_STEP: f64 = 1e-2;

/// A real function on `P^k`, evaluated on any nonzero homogeneous
/// representative. Cut-off sources take values in `[0, 1]`.
pub trait FunctionOnP: Send + Sync {
    fn eval(&self, z: &[Complex64]) -> f64;

    fn eval_point(&self, p: &ProjectivePoint) -> f64 {
        self.eval(p.homog())
    }
}

impl<F> FunctionOnP for F
where
    F: Fn(&[Complex64]) -> f64 + Send + Sync,
{
    fn eval(&self, z: &[Complex64]) -> f64 {
        self(z)
    }
}

/// The constant function.
#[derive(Debug, Clone, Copy)]
pub struct Constant(pub f64);

impl FunctionOnP for Constant {
    fn eval(&self, _z: &[Complex64]) -> f64 {
        self.0
    }
}

/// Frozen evaluator for `f_θ`.
#[derive(Clone)]
pub struct RegularizedFunction {
    source: Arc<dyn FunctionOnP>,
    theta: f64,
    seed: u64,
    n: usize,
    /// `S` row-major `n×n` blocks; empty when `θ = 0`
    mats: Vec<Complex64>,
}

impl std::fmt::Debug for RegularizedFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RegularizedFunction")
            .field("theta", &self.theta)
            .field("seed", &self.seed)
            .field("samples", &self.sample_count())
            .finish()
    }
}

/// Builds `f_θ` with `samples` frozen group elements. For `θ = 0` the
/// measure is the Dirac mass at the identity and `f` is passed through.
pub fn regularize(
    f: Arc<dyn FunctionOnP>,
    base: &MollifierSpec,
    theta: f64,
    samples: usize,
    seed: u64,
) -> Result<RegularizedFunction> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    if samples == 0 {
        return Err(Error::Invalid("sample count must be at least 1".into()));
    }
    let n = base.k() + 1;
    if theta == 0.0 {
        return Ok(RegularizedFunction { source: f, theta, seed, n, mats: Vec::new() });
    }
    // unit-scale samples, so a common seed yields the same x_j for every θ
    let unit = ScaledMeasure::new(base.clone(), 1.0)?;
    let blocks: Vec<Vec<Complex64>> = (0..samples as u64)
        .into_par_iter()
        .map(|j| phi(&sample_one(&unit, seed, j).scale(theta)).map(|g| g.row_major()))
        .collect::<Result<_>>()?;
    Ok(RegularizedFunction { source: f, theta, seed, n, mats: blocks.concat() })
}

impl RegularizedFunction {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn k(&self) -> usize {
        self.n - 1
    }

    /// Number of frozen samples (0 in the Dirac case).
    pub fn sample_count(&self) -> usize {
        self.mats.len() / (self.n * self.n)
    }

    /// Row-major entries of the `j`-th stored matrix.
    pub fn matrix(&self, j: usize) -> &[Complex64] {
        let sz = self.n * self.n;
        &self.mats[j * sz..(j + 1) * sz]
    }

    pub fn matrices(&self) -> impl Iterator<Item = &[Complex64]> {
        self.mats.chunks_exact(self.n * self.n)
    }

    pub fn source(&self) -> &Arc<dyn FunctionOnP> {
        &self.source
    }
}

impl FunctionOnP for RegularizedFunction {
    fn eval(&self, z: &[Complex64]) -> f64 {
        if self.mats.is_empty() {
            return self.source.eval(z);
        }
        let mut buf = [Complex64::new(0.0, 0.0); 8];
        let moved = &mut buf[..self.n];
        let mut acc = 0.0;
        for g in self.matrices() {
            matvec_into(g, z, moved);
            acc += self.source.eval(moved);
        }
        acc / self.sample_count() as f64
    }
}

fn check_step(c: &ChartCoordinates, step: f64) -> Result<()> {
    if !(MIN_STEP..=MAX_STEP).contains(&step) {
        return Err(Error::StepOutOfRange(step));
    }
    let scale = c
        .coords()
        .iter()
        .map(|z| z.re.abs().max(z.im.abs()))
        .fold(1.0, f64::max);
    if step < 8.0 * f64::EPSILON * scale {
        return Err(Error::StepTooSmall(step));
    }
    Ok(())
}

/// Unit real directions in the `2k` real chart coordinates.
fn directions(c: &ChartCoordinates) -> Vec<(usize, Complex64)> {
    (0..c.coords().len())
        .filter(|&i| i != c.chart())
        .flat_map(|i| [(i, Complex64::new(1.0, 0.0)), (i, Complex64::new(0.0, 1.0))])
        .collect()
}

/// Central-difference derivative magnitude of `f` at chart point `c`:
/// gradient norm for `order = 1`, largest absolute Hessian entry for
/// `order = 2`.
pub fn finite_diff(f: &dyn FunctionOnP, c: &ChartCoordinates, order: u32, step: f64) -> Result<f64> {
    check_step(c, step)?;
    let dirs = directions(c);
    let at = |shifts: &[(usize, Complex64, f64)]| {
        let mut z = c.coords().to_vec();
        for &(slot, dir, amount) in shifts {
            z[slot] += dir * amount;
        }
        f.eval(&z)
    };
    match order {
        1 => {
            let sq: f64 = dirs
                .iter()
                .map(|&(slot, dir)| {
                    let d = (at(&[(slot, dir, step)]) - at(&[(slot, dir, -step)])) / (2.0 * step);
                    d * d
                })
                .sum();
            Ok(sq.sqrt())
        }
        2 => {
            let centre = at(&[]);
            let s2 = step * step;
            let mut worst: f64 = 0.0;
            for (a, &(sa, da)) in dirs.iter().enumerate() {
                let diag = (at(&[(sa, da, step)]) - 2.0 * centre + at(&[(sa, da, -step)])) / s2;
                worst = worst.max(diag.abs());
                for &(sb, db) in &dirs[a + 1..] {
                    let mixed = (at(&[(sa, da, step), (sb, db, step)])
                        - at(&[(sa, da, step), (sb, db, -step)])
                        - at(&[(sa, da, -step), (sb, db, step)])
                        + at(&[(sa, da, -step), (sb, db, -step)]))
                        / (4.0 * s2);
                    worst = worst.max(mixed.abs());
                }
            }
            Ok(worst)
        }
        other => Err(Error::BadOrder(other)),
    }
}

/// Empirical `C^α` seminorm: largest [`finite_diff`] over the grid.
pub fn c_alpha_estimate(
    f: &dyn FunctionOnP,
    grid: &[ChartCoordinates],
    alpha: u32,
    step: f64,
) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::Invalid("derivative grid is empty".into()));
    }
    let values: Vec<f64> = grid
        .par_iter()
        .map(|c| finite_diff(f, c, alpha, step))
        .collect::<Result<_>>()?;
    Ok(values.into_iter().fold(0.0, f64::max))
}

/// Least-squares fit of `log(seminorm)` against `log(delta)`; returns the
/// slope and its standard error.
pub fn scaling_slope(rows: &[(f64, f64)]) -> Result<(f64, f64)> {
    if rows.len() < 3 {
        return Err(Error::TooFewRows(rows.len()));
    }
    if rows.iter().any(|&(d, s)| !(d > 0.0 && s > 0.0)) {
        return Err(Error::NonPositiveRow);
    }
    let m = rows.len() as f64;
    let xs: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Invalid("regression needs distinct deltas".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (ss_res / (m - 2.0) / sxx).sqrt();
    Ok((slope, stderr))
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingRow {
    pub delta: f64,
    pub theta: f64,
    pub seminorm: f64,
}

/// Seminorm estimates across a sweep of `δ` and their log-log slope.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub alpha: u32,
    /// sorted by `delta`, descending
    pub rows: Vec<ScalingRow>,
    /// `None` when some seminorm vanishes (constant function)
    pub slope: Option<f64>,
    pub slope_stderr: Option<f64>,
}

impl ScalingReport {
    pub fn new(alpha: u32, mut rows: Vec<ScalingRow>) -> Result<Self> {
        if rows.len() < 3 {
            return Err(Error::TooFewRows(rows.len()));
        }
        rows.sort_by(|a, b| b.delta.total_cmp(&a.delta));
        let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.delta, r.seminorm)).collect();
        let (slope, slope_stderr) = match scaling_slope(&pairs) {
            Ok((s, e)) => (Some(s), Some(e)),
            Err(Error::NonPositiveRow) => (None, None),
            Err(e) => return Err(e),
        };
        Ok(Self { alpha, rows, slope, slope_stderr })
    }

    pub fn is_degenerate(&self) -> bool {
        self.slope.is_none()
    }
}
