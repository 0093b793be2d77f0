//! Dense complex matrix kernels for the small matrices (`(k+1)×(k+1)`,
//! `k ≤ 3`) that parametrize `PGL(k+1, C)` near the identity.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

const EXP_SCALE_TARGET: f64 = 0.25;
const LOG_SQRT_TARGET: f64 = 0.05;
const SERIES_TOL: f64 = 1e-18;
const MAX_TERMS: usize = 60;

/// Frobenius norm, the `‖·‖_s` used throughout the crate.
pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Matrix exponential by scaling and squaring with a truncated Taylor
/// series: `exp(X) = exp(X / 2^s)^(2^s)` with `‖X / 2^s‖ ≤ 1/4`.
pub fn expm(x: &CMatrix) -> CMatrix {
    let n = x.nrows();
    let norm = frobenius(x);
    let squarings = if norm > EXP_SCALE_TARGET {
        (norm / EXP_SCALE_TARGET).log2().ceil() as i32
    } else {
        0
    };
    let scaled = x * Complex64::new(0.5f64.powi(squarings), 0.0);
    let mut result = identity(n);
    let mut term = identity(n);
    for j in 1..MAX_TERMS {
        term = &term * &scaled / Complex64::new(j as f64, 0.0);
        result += &term;
        if frobenius(&term) < SERIES_TOL {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Principal square root by the Denman–Beavers iteration. Intended for
/// matrices close to the identity.
pub fn sqrtm(a: &CMatrix) -> Option<CMatrix> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = identity(n);
    let half = Complex64::new(0.5, 0.0);
    for _ in 0..64 {
        let y_inv = y.clone().try_inverse()?;
        let z_inv = z.clone().try_inverse()?;
        let y_next = (&y + z_inv) * half;
        let z_next = (&z + y_inv) * half;
        let delta = frobenius(&(&y_next - &y));
        y = y_next;
        z = z_next;
        if delta <= 1e-16 * frobenius(&y) {
            return Some(y);
        }
    }
    Some(y)
}

/// Principal logarithm by inverse scaling and squaring: take square roots
/// until `‖A^(1/2^s) - Id‖ ≤ 0.05`, sum the Mercator series and rescale.
pub fn logm(a: &CMatrix) -> Option<CMatrix> {
    let n = a.nrows();
    let id = identity(n);
    let mut b = a.clone();
    let mut roots = 0;
    while frobenius(&(&b - &id)) > LOG_SQRT_TARGET {
        b = sqrtm(&b)?;
        roots += 1;
        if roots > 40 {
            return None;
        }
    }
    let x = &b - &id;
    let mut result = CMatrix::zeros(n, n);
    let mut power = id;
    for j in 1..MAX_TERMS {
        power = &power * &x;
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        let term = &power * Complex64::new(sign / j as f64, 0.0);
        result += &term;
        if frobenius(&term) < SERIES_TOL {
            break;
        }
    }
    Some(result * Complex64::new(2f64.powi(roots), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> CMatrix {
        let m = CMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let f = scale / frobenius(&m);
        m * Complex64::new(f, 0.0)
    }

    /// Plain Taylor series with a fixed number of terms, no scaling.
    fn series_exp(x: &CMatrix, terms: usize) -> CMatrix {
        let n = x.nrows();
        let mut out = identity(n);
        let mut term = identity(n);
        for j in 1..terms {
            term = &term * x / Complex64::new(j as f64, 0.0);
            out += &term;
        }
        out
    }

    #[test]
    fn exp_zero_is_identity() {
        assert_eq!(expm(&CMatrix::zeros(3, 3)), identity(3));
    }

    #[test]
    fn exp_matches_reference_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=4 {
            for _ in 0..50 {
                let x = random_matrix(n, 0.5 * rng.random::<f64>(), &mut rng);
                let err = frobenius(&(expm(&x) - series_exp(&x, 60)));
                assert!(err < 1e-12, "n={n} err={err:e}");
            }
        }
        // larger norms exercise the squaring path
        let x = random_matrix(3, 3.0, &mut rng);
        let err = frobenius(&(expm(&x) - series_exp(&x, 60)));
        assert!(err < 1e-11 * frobenius(&expm(&x)), "err={err:e}");
    }

    #[test]
    fn log_inverts_exp() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 2..=4 {
            for _ in 0..50 {
                let x = random_matrix(n, 0.6 * rng.random::<f64>(), &mut rng);
                let back = logm(&expm(&x)).unwrap();
                assert!(frobenius(&(back - &x)) < 1e-12);
            }
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = identity(3) + random_matrix(3, 0.4, &mut rng);
        let r = sqrtm(&a).unwrap();
        assert!(frobenius(&(&r * &r - &a)) < 1e-13);
    }
}
