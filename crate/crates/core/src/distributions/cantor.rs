use num_rational::Rational64;

use super::{Family, InverseAtom, InverseSingular};
use crate::error::Result;

const TERNARY_DIGITS: u32 = 52;
const BINARY_DIGITS: u32 = 64;

/// Splits `x ∈ (0, 1)` into `M·2^{−E}` with `M` odd.
fn dyadic_parts(x: f64) -> (u64, u32) {
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as u32;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) = if biased == 0 { (frac, 1074) } else { (frac | (1u64 << 52), 1075 - biased) };
    let tz = m.trailing_zeros();
    (m >> tz, e - tz)
}

/// The Cantor function, read off the ternary digits of `x`.
///
/// Digits are extracted with exact integer arithmetic on the dyadic value of
/// `x`, so the only error is the truncation after 52 digits (`< 2^{−52}`).
pub fn cantor_cdf(x: f64) -> f64 {
    if x.is_nan() || x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let (m, e) = dyadic_parts(x);
    if e > 120 {
        // leading ternary zeros halve the value each; the remainder is far
        // below double resolution after rescaling
        let mut y = x;
        let mut k = 0;
        while y < 1.0 / 3.0 {
            y *= 3.0;
            k += 1;
        }
        return cantor_cdf(y) * 0.5f64.powi(k);
    }
    let denom: u128 = 1u128 << e;
    let mut r: u128 = m as u128;
    let mut acc = 0.0;
    let mut weight = 0.5;
    for _ in 0..TERNARY_DIGITS {
        let y = 3 * r;
        let digit = y >> e;
        r = y & (denom - 1);
        match digit {
            0 => {}
            1 => return acc + weight,
            _ => acc += weight,
        }
        if r == 0 {
            break;
        }
        weight *= 0.5;
    }
    acc
}

/// Binary digits of `t ∈ [0, 1)` mapped to `Σ 2b_k 3^{−k}`, plus the
/// position of the last set bit.
fn binary_to_ternary(t: f64) -> (f64, u32) {
    let mut t = t;
    let mut acc = 0.0;
    let mut scale = 1.0;
    let mut last = 0;
    for k in 1..=BINARY_DIGITS {
        t *= 2.0;
        scale /= 3.0;
        if t >= 1.0 {
            acc += 2.0 * scale;
            t -= 1.0;
            last = k;
        }
        if t == 0.0 {
            break;
        }
    }
    (acc, last)
}

/// Upper inverse of the Cantor function on `[0, 1)`; a dyadic level is sent
/// to the right end of its flat piece.
pub fn cantor_quantile(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    binary_to_ternary(t).0
}

/// Left limit of [`cantor_quantile`] on `(0, 1]`: the left end of the flat
/// piece at a dyadic level.
pub fn cantor_quantile_left(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let (g, last) = binary_to_ternary(t);
    if last == 0 {
        g
    } else {
        g - 3f64.powi(-(last as i32))
    }
}

/// The Cantor measure on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cantor;

impl Family for Cantor {
    fn name(&self) -> &'static str {
        "cantor"
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        Vec::new()
    }

    fn cdf(&self, x: f64) -> f64 {
        cantor_cdf(x)
    }

    fn quantile(&self, t: f64) -> f64 {
        cantor_quantile(t)
    }

    fn quantile_left(&self, t: f64) -> f64 {
        cantor_quantile_left(t)
    }

    /// The quantile jumps by `3^{−m}` at every level `i·2^{−m}` with `i` odd,
    /// so `μ⁻¹` is purely atomic; atoms are listed down to generation
    /// `m_max`.
    fn inverse_singular(&self, m_max: u32) -> Result<InverseSingular> {
        let m_max = m_max.min(30);
        let mut atoms = Vec::new();
        for m in 1..=m_max {
            let den = 1i64 << m;
            let mass = 3f64.powi(-(m as i32));
            for i in (1..den).step_by(2) {
                atoms.push(InverseAtom { location: i as f64 / den as f64, exact: Some(Rational64::new(i, den)), mass });
            }
        }
        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        Ok(InverseSingular { atoms, singular_continuous_mass: 0.0, truncated: true })
    }

    fn limit_uniform_override(&self) -> Option<f64> {
        Some(0.5)
    }
}

/// The measure whose distribution function is the Cantor quantile, i.e.
/// whose inverse measure is the Cantor measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InverseCantor;

impl Family for InverseCantor {
    fn name(&self) -> &'static str {
        "inverse_cantor"
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        Vec::new()
    }

    fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            cantor_quantile(x)
        }
    }

    fn cdf_left(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x > 1.0 {
            1.0
        } else {
            cantor_quantile_left(x)
        }
    }

    fn quantile(&self, t: f64) -> f64 {
        cantor_cdf(t)
    }

    fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        None
    }

    fn inverse_singular(&self, _m_max: u32) -> Result<InverseSingular> {
        Ok(InverseSingular { atoms: Vec::new(), singular_continuous_mass: 1.0, truncated: false })
    }

    fn limit_uniform_override(&self) -> Option<f64> {
        Some(0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_function_values() {
        assert_eq!(cantor_cdf(0.0), 0.0);
        assert_eq!(cantor_cdf(1.0), 1.0);
        assert_eq!(cantor_cdf(0.5), 0.5);
        // the double nearest 1/3 lies just below it
        assert!((cantor_cdf(1.0 / 3.0) - 0.5).abs() < 1e-10);
        assert!((cantor_cdf(0.25) - 1.0 / 3.0).abs() < 1e-15);
        assert!((cantor_cdf(0.75) - 2.0 / 3.0).abs() < 1e-15);
        assert!(cantor_cdf(1e-300) > 0.0);
    }

    #[test]
    fn cantor_self_similarity() {
        for &x in &[0.013, 0.1, 0.2, 0.29, 0.31] {
            let lhs = cantor_cdf(x / 3.0);
            let rhs = 0.5 * cantor_cdf(x);
            assert!((lhs - rhs).abs() < 1e-9, "x = {x}");
        }
    }

    #[test]
    fn cantor_quantile_flats() {
        assert!((cantor_quantile(0.5) - 2.0 / 3.0).abs() < 1e-16);
        assert!((cantor_quantile_left(0.5) - 1.0 / 3.0).abs() < 1e-16);
        assert!((cantor_quantile(0.25) - 2.0 / 9.0).abs() < 1e-16);
        assert!((cantor_quantile_left(0.25) - 1.0 / 9.0).abs() < 1e-16);
        assert_eq!(cantor_quantile(0.0), 0.0);
    }

    #[test]
    fn quantile_and_cdf_are_galois_dual() {
        for k in 1..200 {
            let t = k as f64 / 201.0;
            let g = cantor_quantile(t);
            // rounding g to a double moves the Cantor function by up to ~1e-10
            assert!(cantor_cdf(g) <= t + 1e-9);
            assert!(cantor_cdf(g + 1e-9) > t - 1e-9);
        }
    }
}
