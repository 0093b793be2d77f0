//! Points of complex projective space, the Fubini–Study distance, the
//! standard affine charts `Z_i` and finite unions of Fubini–Study balls.
//!
//! Distances use the normalization in which the diameter of `P^k` is `π/2`:
//! `d([p], [q]) = arccos(|<p, q>| / (|p| |q|))`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Componentwise tolerance used by [`ProjectivePoint`] equality.
pub const POINT_TOL: f64 = 1e-12;

/// Hermitian pairing `<a, b> = Σ conj(a_i) b_i`.
#[inline]
pub fn hermitian(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[inline]
pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Angle between the complex lines spanned by two nonzero vectors.
///
/// Computed as `atan2(|q⊥|, |<p,q>|)` on the normalized vectors, which agrees
/// with the arccos form but keeps full precision for nearby points.
pub fn line_angle(p: &[Complex64], q: &[Complex64]) -> f64 {
    let np = norm_sqr(p).sqrt();
    let nq = norm_sqr(q).sqrt();
    let pair = hermitian(p, q) / (np * nq);
    // component of q/|q| orthogonal to p/|p|
    let perp: f64 = p
        .iter()
        .zip(q)
        .map(|(a, b)| (b / nq - pair * (a / np)).norm_sqr())
        .sum::<f64>()
        .sqrt();
    perp.atan2(pair.norm()).clamp(0.0, FRAC_PI_2)
}

/// A point of `P^k`, stored as its canonical representative: unit Euclidean
/// norm with the first nonzero coordinate real and positive.
#[derive(Debug, Clone)]
pub struct ProjectivePoint {
    homog: Vec<Complex64>,
}

impl ProjectivePoint {
    pub fn new(homog: Vec<Complex64>) -> Result<Self> {
        if homog.len() < 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: homog.len() });
        }
        let n = norm_sqr(&homog).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        let lead = homog.iter().find(|z| **z != Complex64::new(0.0, 0.0)).copied().unwrap();
        let rot = lead.conj() / lead.norm();
        let homog = homog.into_iter().map(|z| z * rot / n).collect();
        Ok(Self { homog })
    }

    /// Build from `(re, im)` pairs.
    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self> {
        Self::new(pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect())
    }

    /// Build from real homogeneous coordinates.
    pub fn from_real(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Complex dimension `k` of the ambient `P^k`.
    pub fn dim(&self) -> usize {
        self.homog.len() - 1
    }

    pub fn homog(&self) -> &[Complex64] {
        &self.homog
    }

    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.homog.iter().map(|z| [z.re, z.im]).collect()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.homog.len() == other.homog.len()
            && self.homog.iter().zip(&other.homog).all(|(a, b)| (a - b).norm() <= tol)
    }
}

impl PartialEq for ProjectivePoint {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, POINT_TOL)
    }
}

/// Fubini–Study distance, in `[0, π/2]`.
pub fn fs_distance(p: &ProjectivePoint, q: &ProjectivePoint) -> f64 {
    line_angle(&p.homog, &q.homog)
}

/// Affine coordinates of a point in chart `Z_i`: the homogeneous vector
/// scaled so that slot `i` equals exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartCoordinates {
    chart: usize,
    coords: Vec<Complex64>,
}

impl ChartCoordinates {
    /// `coords` must have length `k+1` with `coords[chart] == 1`.
    pub fn new(chart: usize, coords: Vec<Complex64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: coords.len() });
        }
        if chart >= coords.len() {
            return Err(Error::ChartIndex { index: chart, k: coords.len() - 1 });
        }
        if coords[chart] != Complex64::new(1.0, 0.0) {
            return Err(Error::Invalid(format!("chart slot {chart} must equal 1")));
        }
        Ok(Self { chart, coords })
    }

    /// Insert the unit slot at position `chart` into the `k` affine coordinates.
    pub fn from_affine(chart: usize, affine: &[Complex64]) -> Result<Self> {
        if chart > affine.len() {
            return Err(Error::ChartIndex { index: chart, k: affine.len() });
        }
        let mut coords = affine.to_vec();
        coords.insert(chart, Complex64::new(1.0, 0.0));
        Self::new(chart, coords)
    }

    pub fn chart(&self) -> usize {
        self.chart
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// The `k` affine coordinates, i.e. all slots but the unit one.
    pub fn affine(&self) -> Vec<Complex64> {
        self.coords
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.chart)
            .map(|(_, z)| *z)
            .collect()
    }

    pub fn to_point(&self) -> ProjectivePoint {
        ProjectivePoint::new(self.coords.clone()).expect("chart coordinates are nonzero")
    }
}

/// The coordinate map `ζ_i`. With `chart = None` the chart of the
/// maximum-modulus coordinate is used (ties go to the lowest index).
pub fn to_chart(p: &ProjectivePoint, chart: Option<usize>) -> Result<ChartCoordinates> {
    let h = p.homog();
    let i = match chart {
        Some(i) if i >= h.len() => return Err(Error::ChartIndex { index: i, k: p.dim() }),
        Some(i) => i,
        None => max_modulus_index(h),
    };
    if h[i] == Complex64::new(0.0, 0.0) {
        return Err(Error::ChartUndefined(i));
    }
    let pivot = h[i];
    let mut coords: Vec<Complex64> = h.iter().map(|z| z / pivot).collect();
    coords[i] = Complex64::new(1.0, 0.0);
    Ok(ChartCoordinates { chart: i, coords })
}

pub(crate) fn max_modulus_index(h: &[Complex64]) -> usize {
    let mut best = 0;
    for (i, z) in h.iter().enumerate() {
        if z.norm_sqr() > h[best].norm_sqr() {
            best = i;
        }
    }
    best
}

/// The chart norm `‖·‖_i`: Euclidean norm of all slots except the unit one.
pub fn chart_norm(c: &ChartCoordinates) -> f64 {
    c.coords
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != c.chart)
        .map(|(_, z)| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Euclidean norm `‖ζ‖_0` of the full vector, unit slot included (so `≥ 1`).
pub fn full_norm(c: &ChartCoordinates) -> f64 {
    norm_sqr(&c.coords).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: ProjectivePoint,
    pub radius: f64,
}

/// A compact set given as a finite union of closed Fubini–Study balls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSet", into = "RawSet")]
pub struct CompactSetSpec {
    balls: Vec<Ball>,
}

impl CompactSetSpec {
    pub fn new(balls: Vec<Ball>) -> Result<Self> {
        let first = balls.first().ok_or(Error::EmptySet)?;
        let dim = first.center.dim();
        for b in &balls {
            if !(b.radius >= 0.0) || !b.radius.is_finite() {
                return Err(Error::NegativeRadius(b.radius));
            }
            if b.center.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim + 1, got: b.center.dim() + 1 });
            }
        }
        Ok(Self { balls })
    }

    /// Union of radius-0 balls.
    pub fn points(points: Vec<ProjectivePoint>) -> Result<Self> {
        Self::new(points.into_iter().map(|center| Ball { center, radius: 0.0 }).collect())
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn dim(&self) -> usize {
        self.balls[0].center.dim()
    }
}

#[derive(Serialize, Deserialize)]
struct RawBall {
    center: Vec<[f64; 2]>,
    radius: f64,
}

#[derive(Serialize, Deserialize)]
struct RawSet {
    balls: Vec<RawBall>,
}

impl TryFrom<RawSet> for CompactSetSpec {
    type Error = Error;

    fn try_from(raw: RawSet) -> Result<Self> {
        let balls = raw
            .balls
            .into_iter()
            .map(|b| Ok(Ball { center: ProjectivePoint::from_pairs(&b.center)?, radius: b.radius }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(balls)
    }
}

impl From<CompactSetSpec> for RawSet {
    fn from(s: CompactSetSpec) -> Self {
        RawSet {
            balls: s
                .balls
                .into_iter()
                .map(|b| RawBall { center: b.center.to_pairs(), radius: b.radius })
                .collect(),
        }
    }
}

/// Fubini–Study distance from `p` to the union of balls.
pub fn dist_to_set(p: &ProjectivePoint, set: &CompactSetSpec) -> f64 {
    dist_to_set_homog(p.homog(), set)
}

/// Same as [`dist_to_set`] for an arbitrary (unnormalized) nonzero vector.
pub fn dist_to_set_homog(z: &[Complex64], set: &CompactSetSpec) -> f64 {
    set.balls
        .iter()
        .map(|b| (line_angle(z, b.center.homog()) - b.radius).max(0.0))
        .fold(f64::INFINITY, f64::min)
}

/// Outcome of [`ball_comparison_check`].
#[derive(Debug, Clone, Serialize)]
pub struct BallComparisonReport {
    pub trials: usize,
    pub radius: f64,
    /// Every sample satisfied `d_FS(c, w) < r`.
    pub all_inside: bool,
    /// Largest observed `d_FS(c, w) / r`.
    pub worst_ratio: f64,
}

/// Samples chart points `w` with `‖w - c‖ < (r/2)‖c‖_0` and checks that
/// each lies in the Fubini–Study ball of radius `r` about `c`.
pub fn ball_comparison_check(
    c: &ChartCoordinates,
    r: f64,
    trials: usize,
    seed: u64,
) -> Result<BallComparisonReport> {
    if !(r > 0.0 && r <= 0.5) {
        return Err(Error::Invalid(format!("ball comparison radius {r} outside (0, 0.5]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centre = c.to_point();
    let euclid = 0.5 * r * full_norm(c);
    let k = c.dim();
    let mut worst: f64 = 0.0;
    let mut all_inside = true;
    for _ in 0..trials {
        // uniform in the 2k-dimensional real ball of radius `euclid`
        let mut dir: Vec<f64> = (0..2 * k).map(|_| rng.sample(StandardNormal)).collect();
        let len = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        let rad = euclid * rng.random::<f64>().powf(1.0 / (2 * k) as f64);
        dir.iter_mut().for_each(|x| *x *= rad / len);
        let mut w = c.coords.clone();
        let mut it = dir.chunks(2);
        for (i, z) in w.iter_mut().enumerate() {
            if i != c.chart {
                let d = it.next().unwrap();
                *z += Complex64::new(d[0], d[1]);
            }
        }
        let d = fs_distance(&centre, &ProjectivePoint::new(w)?);
        worst = worst.max(d / r);
        all_inside &= d < r;
    }
    Ok(BallComparisonReport { trials, radius: r, all_inside, worst_ratio: worst })
}

/// Random point, distributed by the unitarily invariant measure.
pub fn random_point<R: Rng + ?Sized>(k: usize, rng: &mut R) -> ProjectivePoint {
    loop {
        let v: Vec<Complex64> = (0..=k)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if let Ok(p) = ProjectivePoint::new(v) {
            return p;
        }
    }
}

/// Point at Fubini–Study distance `d ∈ [0, π/2]` from `p` in a uniformly
/// random direction.
pub fn random_point_at_distance<R: Rng + ?Sized>(
    p: &ProjectivePoint,
    d: f64,
    rng: &mut R,
) -> ProjectivePoint {
    let h = p.homog();
    loop {
        let mut u: Vec<Complex64> = (0..h.len())
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let pair = hermitian(h, &u);
        u.iter_mut().zip(h).for_each(|(x, y)| *x -= pair * y);
        let n = norm_sqr(&u).sqrt();
        if n < 1e-8 {
            continue;
        }
        let v = h.iter().zip(&u).map(|(a, b)| a * d.cos() + b * (d.sin() / n)).collect();
        return ProjectivePoint::new(v).unwrap();
    }
}
