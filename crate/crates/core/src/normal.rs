//! Standard normal distribution function and its inverse.

use libm::{erf, erfc};

use crate::error::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Φ(z), computed from the complementary error function so both tails keep
/// full relative accuracy.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// 1 − 2Φ(−s) = erf(s/√2), without the cancellation of the direct form.
pub(crate) fn two_sided_mass(s: f64) -> f64 {
    erf(s / SQRT_2)
}

/// Standard normal density φ(z).
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

// Acklam's rational approximation (relative error < 1.2e-9).
const A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
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
    -2.549671010336814e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];
const P_LOW: f64 = 0.02425;

fn acklam(p: f64) -> f64 {
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Φ⁻¹(p) for p in (0, 1): Acklam's approximation followed by one Halley
/// step against [`normal_cdf`].
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid("p", p, "must lie in (0, 1)"));
    }
    let x = acklam(p);
    // In the upper half, correct against the upper tail so the residual
    // keeps its relative precision.
    let u = if p > 0.5 {
        ((1.0 - p) - normal_cdf(-x)) / normal_pdf(x)
    } else {
        (normal_cdf(x) - p) / normal_pdf(x)
    };
    let x = x - u / (1.0 + 0.5 * x * u);
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_reference_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        // Φ(-1.1906) ≈ 0.117
        assert!((normal_cdf(-1.1906) - 0.117).abs() < 5e-4);
        // reference values to 15 digits
        assert!((normal_cdf(1.0) - 0.841_344_746_068_543).abs() < 1e-13);
        assert!((normal_cdf(-3.0) - 0.001_349_898_031_630_095).abs() < 1e-15);
        assert!((normal_cdf(-8.0) - 6.220_960_574_271_785e-16).abs() < 1e-25);
    }

    #[test]
    fn cdf_symmetry() {
        for i in -80..=80 {
            let z = i as f64 * 0.1;
            assert!((normal_cdf(z) + normal_cdf(-z) - 1.0).abs() <= 1e-15, "z={z}");
        }
    }

    #[test]
    fn quantile_reference_values() {
        assert!(normal_quantile(0.5).unwrap().abs() < 1e-15);
        assert!((normal_quantile(0.117).unwrap() + 1.19).abs() < 5e-3);
        assert!((normal_quantile(0.975).unwrap() - 1.959_963_984_540_054).abs() < 1e-12);
    }

    #[test]
    fn quantile_rejects_out_of_range() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(normal_quantile(p).is_err(), "p={p}");
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        // p = Φ(z) near 1 cannot hold the tail mass precisely, so the upper
        // half is exercised through the mirrored lower tail.
        for i in 0..=1200 {
            let z = -6.0 + i as f64 * 0.01;
            let back = if z <= 0.0 {
                normal_quantile(normal_cdf(z)).unwrap()
            } else {
                -normal_quantile(normal_cdf(-z)).unwrap()
            };
            assert!((back - z).abs() <= 1e-9, "z={z} back={back}");
        }
        for k in 1..1000 {
            let p = k as f64 / 1000.0;
            let x = normal_quantile(p).unwrap();
            assert!((normal_cdf(x) - p).abs() <= 1e-10);
        }
        for p in [1e-300, 1e-100, 1e-20, 1e-10, 1e-5] {
            let x = normal_quantile(p).unwrap();
            assert!(((normal_cdf(x) - p) / p).abs() < 1e-9, "p={p}");
        }
    }

    #[test]
    fn two_sided_mass_matches_direct_form() {
        for s in [0.01, 0.5, 1.0, 2.0, 4.0] {
            assert!((two_sided_mass(s) - (1.0 - 2.0 * normal_cdf(-s))).abs() < 1e-15);
        }
    }
}
