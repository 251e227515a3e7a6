use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use libm::erfc;

use super::{AcPiece, Family, InverseSingular, SecondOrderBest};
use crate::error::{LevyError, Result};

/// Standard normal CDF.
pub fn phi(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

fn phi_density(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Inverse of the standard normal CDF.
///
/// A rational starting value (Acklam's coefficients, relative error about
/// 1e-9) is polished with two Halley steps against `erfc`.
pub fn inverse_phi(t: f64) -> f64 {
    if t <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if t >= 1.0 {
        return f64::INFINITY;
    }
    if t > 0.5 {
        // 1 − t is exact here
        return -inverse_phi(1.0 - t);
    }
    let mut z = acklam(t);
    for _ in 0..2 {
        let err = phi(z) - t;
        let d = phi_density(z);
        if d == 0.0 {
            break;
        }
        let u = err / d;
        z -= u / (1.0 + 0.5 * z * u);
    }
    z
}

fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383_577_518_672_69e2,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00, 3.754408661907416e+00];
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// `N(mean, variance)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normal {
    mean: f64,
    variance: f64,
    sigma: f64,
}

impl Normal {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite() && mean.is_finite()) {
            return Err(LevyError::invalid(format!(
                "normal needs finite mean and positive variance, got ({mean}, {variance})"
            )));
        }
        Ok(Normal { mean, variance, sigma: variance.sqrt() })
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }
}

impl Family for Normal {
    fn name(&self) -> &'static str {
        "normal"
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("mean", self.mean), ("variance", self.variance)]
    }

    fn cdf(&self, x: f64) -> f64 {
        phi((x - self.mean) / self.sigma)
    }

    fn quantile(&self, t: f64) -> f64 {
        self.mean + self.sigma * inverse_phi(t)
    }

    fn ac_pieces(&self) -> Vec<AcPiece> {
        vec![
            AcPiece { lo: f64::NEG_INFINITY, hi: self.mean, tail_exponent: f64::INFINITY },
            AcPiece { lo: self.mean, hi: f64::INFINITY, tail_exponent: f64::INFINITY },
        ]
    }

    fn density(&self, x: f64) -> f64 {
        phi_density((x - self.mean) / self.sigma) / self.sigma
    }

    fn inverse_density(&self, t: f64) -> f64 {
        self.sigma / phi_density(inverse_phi(t))
    }

    fn inverse_density_sup(&self) -> f64 {
        f64::INFINITY
    }

    fn inverse_singular(&self, _m_max: u32) -> Result<InverseSingular> {
        Ok(InverseSingular::default())
    }

    fn quantile_derivatives(&self, t: f64) -> Option<[f64; 3]> {
        let z = inverse_phi(t);
        let d = phi_density(z);
        let s = self.sigma;
        Some([s / d, s * z / (d * d), s * (1.0 + 2.0 * z * z) / (d * d * d)])
    }

    fn second_order_best(&self) -> Option<SecondOrderBest> {
        Some(SecondOrderBest::NegativeInfinite)
    }

    fn second_order_uniform_eligible(&self) -> bool {
        true
    }

    fn uniform_second_order_override(&self, eps: f64, n: usize) -> Option<f64> {
        let n = n as f64;
        Some(0.5 - (n.ln()).sqrt() / (2.0 * eps * (2.0 * self.variance).sqrt() * n))
    }

    fn dilated(&self, factor: f64) -> Option<Arc<dyn Family>> {
        Normal::new(self.mean * factor, self.variance * factor * factor).ok().map(|n| Arc::new(n) as Arc<dyn Family>)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_phi_round_trips() {
        for &t in &[1e-300, 1e-20, 1e-8, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.975, 0.999999] {
            let z = inverse_phi(t);
            let back = phi(z);
            assert!(((back - t) / t).abs() < 1e-13, "t = {t}, z = {z}, back = {back}");
        }
    }

    #[test]
    fn inverse_phi_known_values() {
        assert_eq!(inverse_phi(0.5), 0.0);
        assert!((inverse_phi(0.975) - 1.959963984540054).abs() < 1e-14);
        assert!((inverse_phi(0.025) + 1.959963984540054).abs() < 1e-14);
        assert_eq!(inverse_phi(0.0), f64::NEG_INFINITY);
        assert_eq!(inverse_phi(1.0), f64::INFINITY);
    }
}
