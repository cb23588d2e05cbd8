//! Analytic convergence factors of the eight Schwarz-in-time variants.
//!
//! After diagonalizing the symmetric system operator, each eigenvalue `d`
//! contributes an independent scalar interface iteration whose one-sweep
//! error multiplier has a closed form in `sigma = sqrt(d^2 + 1/nu)`,
//! `a = sigma * alpha` and `b = sigma * (T - alpha)`. This module evaluates
//! those factors, their relaxed counterparts, the optimal relaxation
//! parameters, and the gamma = 0 theorem bounds.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::VariantId;

/// Scalar parameters of the spectral analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralParams {
    pub nu: f64,
    pub gamma: f64,
    pub horizon: f64,
    pub alpha: f64,
}

impl SpectralParams {
    pub fn new(nu: f64, gamma: f64, horizon: f64, alpha: f64) -> Result<Self> {
        if !nu.is_finite() || nu <= 0.0 {
            return Err(Error::InvalidParameter("nu must be positive".into()));
        }
        if gamma < 0.0 {
            return Err(Error::InvalidParameter("gamma must be non-negative".into()));
        }
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::InvalidParameter("horizon must be positive".into()));
        }
        if !(alpha > 0.0 && alpha < horizon) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie strictly inside (0, {horizon}), got {alpha}"
            )));
        }
        Ok(Self {
            nu,
            gamma,
            horizon,
            alpha,
        })
    }

    pub fn sigma(&self, d: f64) -> f64 {
        sigma(d, self.nu)
    }

    /// `a = sigma * alpha`.
    pub fn a(&self, d: f64) -> f64 {
        self.sigma(d) * self.alpha
    }

    /// `b = sigma * (T - alpha)`.
    pub fn b(&self, d: f64) -> f64 {
        self.sigma(d) * (self.horizon - self.alpha)
    }
}

/// `sigma = sqrt(d^2 + 1/nu)`.
pub fn sigma(d: f64, nu: f64) -> f64 {
    assert!(nu > 0.0, "sigma needs nu > 0");
    (d * d + 1.0 / nu).sqrt()
}

/// Arguments beyond this are treated as saturated; coth/tanh are 1 to far
/// below f64 resolution there and the exponentials would overflow.
const HYPERBOLIC_SATURATION: f64 = 350.0;

fn tanh_c(x: f64) -> f64 {
    if x > HYPERBOLIC_SATURATION {
        1.0
    } else {
        x.tanh()
    }
}

fn coth(x: f64) -> f64 {
    if x > HYPERBOLIC_SATURATION {
        1.0
    } else {
        1.0 / x.tanh()
    }
}

/// One-sweep interface error multiplier of SD1 (before the absolute value):
///
/// `(1 + gamma (sigma coth(b) - d)) /
///  (nu (sigma coth(a) + d) (sigma coth(b) + d + gamma/nu))`
pub fn rho_core_sd1(d: f64, p: &SpectralParams) -> f64 {
    let s = p.sigma(d);
    let (a, b) = (p.a(d), p.b(d));
    (1.0 + p.gamma * (s * coth(b) - d))
        / (p.nu * (s * coth(a) + d) * (s * coth(b) + d + p.gamma / p.nu))
}

/// One-sweep interface error multiplier of SN1: the SD1 expression with
/// hyperbolic cotangents replaced by tangents.
pub fn rho_core_sn1(d: f64, p: &SpectralParams) -> f64 {
    let s = p.sigma(d);
    let (a, b) = (p.a(d), p.b(d));
    (1.0 + p.gamma * (s * tanh_c(b) - d))
        / (p.nu * (s * tanh_c(a) + d) * (s * tanh_c(b) + d + p.gamma / p.nu))
}

/// Convergence factor of a variant at a single eigenvalue.
///
/// SD2 and SN2 reverse the transmission conditions of SD1 and SN1 and get the
/// reciprocal factor; SD3, SD4, SN3 and SN4 pass one field both ways and
/// stagnate at exactly 1.
pub fn rho(variant: VariantId, d: f64, p: &SpectralParams) -> f64 {
    match variant {
        VariantId::Sd1 => rho_core_sd1(d, p).abs(),
        VariantId::Sd2 => 1.0 / rho_core_sd1(d, p).abs(),
        VariantId::Sn1 => rho_core_sn1(d, p).abs(),
        VariantId::Sn2 => 1.0 / rho_core_sn1(d, p).abs(),
        VariantId::Sd3 | VariantId::Sd4 | VariantId::Sn3 | VariantId::Sn4 => 1.0,
    }
}

/// Worst convergence factor over a spectrum.
pub fn rho_max(variant: VariantId, eigenvalues: &[f64], p: &SpectralParams) -> Result<f64> {
    if eigenvalues.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    Ok(eigenvalues
        .iter()
        .map(|&d| rho(variant, d, p))
        .fold(f64::NEG_INFINITY, f64::max))
}

fn relaxable(variant: VariantId) -> Result<()> {
    match variant {
        VariantId::Sd1 | VariantId::Sn1 => Ok(()),
        other => Err(Error::UnsupportedVariant(other.name())),
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "relaxation parameter must lie in (0, 1], got {theta}"
        )));
    }
    Ok(())
}

/// Relaxed convergence factor `|1 - theta (1 + F)|` for SD1 or SN1.
///
/// At `theta = 1` this reduces to the unrelaxed factor `|F|`; as `d` grows,
/// `F` vanishes and the factor tends to `|1 - theta|`.
pub fn rho_relaxed(variant: VariantId, d: f64, theta: f64, p: &SpectralParams) -> Result<f64> {
    relaxable(variant)?;
    check_theta(theta)?;
    let f = match variant {
        VariantId::Sd1 => rho_core_sd1(d, p),
        VariantId::Sn1 => rho_core_sn1(d, p),
        _ => unreachable!(),
    };
    if theta == 1.0 {
        // |1 - (1 + F)| reduces to |F|; evaluate the reduced form so the
        // theta = 1 case agrees with the unrelaxed factor to the last bit
        return Ok(f.abs());
    }
    Ok((1.0 - theta * (1.0 + f)).abs())
}

/// The SN1 relaxed factor written as `|1 - theta F|`, without the `1 +`.
///
/// Kept for comparison only: with this form the equioscillation optimum is
/// not `2 / (2 + rho_SN1(0))`, so [`rho_relaxed`] uses the `1 +` form for
/// both families.
pub fn rho_relaxed_sn1_literal(d: f64, theta: f64, p: &SpectralParams) -> Result<f64> {
    check_theta(theta)?;
    Ok((1.0 - theta * rho_core_sn1(d, p)).abs())
}

/// Closed-form factor at `d = 0` for SD1, SD2 or SN1.
///
/// With `s = sqrt(1/nu)`:
/// - SD1: `tanh(s alpha) (gamma s coth(s(T-alpha)) + 1) / (coth(s(T-alpha)) + gamma s)`
/// - SD2: its reciprocal
/// - SN1: `coth(s alpha) (gamma s tanh(s(T-alpha)) + 1) / (tanh(s(T-alpha)) + gamma s)`
pub fn rho_at_zero(variant: VariantId, p: &SpectralParams) -> Result<f64> {
    let s = (1.0 / p.nu).sqrt();
    let back = s * (p.horizon - p.alpha);
    match variant {
        VariantId::Sd1 => {
            Ok(tanh_c(s * p.alpha) * (p.gamma * s * coth(back) + 1.0) / (coth(back) + p.gamma * s))
        }
        VariantId::Sd2 => Ok(1.0 / rho_at_zero(VariantId::Sd1, p)?),
        VariantId::Sn1 => {
            Ok(coth(s * p.alpha) * (p.gamma * s * tanh_c(back) + 1.0)
                / (tanh_c(back) + p.gamma * s))
        }
        other => Err(Error::UnsupportedVariant(other.name())),
    }
}

/// Optimal relaxation parameter `theta* = 2 / (2 + rho(0))` obtained by
/// equioscillating the relaxed factor between `d = 0` and `d -> infinity`.
pub fn optimal_theta(variant: VariantId, p: &SpectralParams) -> Result<f64> {
    relaxable(variant)?;
    Ok(2.0 / (2.0 + rho_at_zero(variant, p)?))
}

/// Output of [`rho_bound`]: the theorem estimate and, for SD1, the looser
/// closed bound `1 / (nu (sigma_min + d_min)^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoBound {
    pub bound: f64,
    pub loose: Option<f64>,
}

/// Gamma-free upper bound on the convergence factor over `d >= d_min`.
///
/// For SD1 the bound uses hyperbolic cotangents, for SN1 tangents; both
/// require `gamma = 0` (the factor is monotone in `d` only then).
pub fn rho_bound(variant: VariantId, d_min: f64, p: &SpectralParams) -> Result<RhoBound> {
    relaxable(variant)?;
    if p.gamma != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "the bound requires gamma = 0, got {}",
            p.gamma
        )));
    }
    if d_min < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "d_min must be non-negative, got {d_min}"
        )));
    }
    let s = p.sigma(d_min);
    let (a, b) = (p.a(d_min), p.b(d_min));
    match variant {
        VariantId::Sd1 => Ok(RhoBound {
            bound: 1.0 / (p.nu * (s * coth(a) + d_min) * (s * coth(b) + d_min)),
            loose: Some(1.0 / (p.nu * (s + d_min) * (s + d_min))),
        }),
        VariantId::Sn1 => Ok(RhoBound {
            bound: 1.0 / (p.nu * (s * tanh_c(a) + d_min) * (s * tanh_c(b) + d_min)),
            loose: None,
        }),
        _ => unreachable!(),
    }
}

/// Tabulated convergence factors over an eigenvalue grid.
#[derive(Debug, Clone)]
pub struct RhoTable {
    pub variant: VariantId,
    pub theta: Option<f64>,
    pub rows: Vec<(f64, f64)>,
    pub params: SpectralParams,
}

impl RhoTable {
    /// CSV with header `d,rho`, 17 significant digits per value.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "d,rho")?;
        for (d, r) in &self.rows {
            writeln!(w, "{d:.16e},{r:.16e}")?;
        }
        Ok(())
    }
}

/// Evaluates a variant (relaxed when `theta` is given) over an ascending
/// eigenvalue grid.
pub fn sweep(
    variant: VariantId,
    d_grid: &[f64],
    p: &SpectralParams,
    theta: Option<f64>,
) -> Result<RhoTable> {
    for (i, pair) in d_grid.windows(2).enumerate() {
        if pair[1] <= pair[0] {
            return Err(Error::UnsortedGrid(i + 1));
        }
    }
    let rows = d_grid
        .iter()
        .map(|&d| {
            let value = match theta {
                Some(t) => rho_relaxed(variant, d, t, p),
                None => Ok(rho(variant, d, p)),
            }?;
            Ok((d, value))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RhoTable {
        variant,
        theta,
        rows,
        params: *p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference_params() -> SpectralParams {
        SpectralParams::new(0.1, 10.0, 1.0, 0.4).unwrap()
    }

    /// Spectrum of the 31x31 FD Laplacian with h = 1/32.
    fn heat_spectrum() -> Vec<f64> {
        let h = 1.0 / 32.0;
        (1..32)
            .map(|i| 2.0 / (h * h) * (1.0 - (i as f64 * std::f64::consts::PI * h).cos()))
            .collect()
    }

    #[test]
    fn sigma_values() {
        assert_relative_eq!(sigma(0.0, 0.1), 10.0f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(sigma(3.0, 1.0), 10.0f64.sqrt(), max_relative = 1e-15);
        // oracle: direct evaluation, approximately |d| for large d
        assert_relative_eq!(sigma(1000.0, 0.1), 1000.0049999875, max_relative = 1e-12);
    }

    #[test]
    fn sd1_core_at_zero_gamma_zero_is_tanh_squared() {
        let p = SpectralParams::new(0.1, 0.0, 1.0, 0.5).unwrap();
        // oracle: nu sigma^2 = 1 at d = 0, so the factor is tanh(a) tanh(b)
        let expected = (10.0f64.sqrt() * 0.5).tanh().powi(2);
        assert_relative_eq!(rho_core_sd1(0.0, &p), expected, max_relative = 1e-13);
        assert_relative_eq!(rho_core_sd1(0.0, &p), 0.8442, max_relative = 1e-4);
    }

    #[test]
    fn sn1_core_at_zero_gamma_zero_is_coth_squared() {
        let p = SpectralParams::new(0.1, 0.0, 1.0, 0.5).unwrap();
        let expected = 1.0 / (10.0f64.sqrt() * 0.5).tanh().powi(2);
        assert_relative_eq!(rho_core_sn1(0.0, &p), expected, max_relative = 1e-13);
        assert!(rho_core_sn1(0.0, &p) > 1.0, "SN1 diverges at d=0 when gamma=0");
        assert_relative_eq!(rho_core_sn1(0.0, &p), 1.1846, max_relative = 1e-4);
    }

    #[test]
    fn reference_setup_values_at_zero() {
        let p = reference_params();
        assert!((rho_core_sd1(0.0, &p) - 0.8892).abs() < 1e-3);
        assert!((rho_core_sn1(0.0, &p) - 1.1246).abs() < 1e-3);
        // consistency with the optimal relaxation parameters reported there
        assert!((2.0 / (2.0 + rho_core_sd1(0.0, &p)) - 0.692).abs() < 5e-4);
        assert!((2.0 / (2.0 + rho_core_sn1(0.0, &p)) - 0.640).abs() < 5e-4);
    }

    #[test]
    fn high_frequency_asymptote() {
        let p = reference_params();
        let tail = 1.0 / (4.0 * p.nu * 1e6);
        assert_relative_eq!(rho_core_sd1(1e3, &p), tail, max_relative = 1e-2);
        assert_relative_eq!(rho_core_sn1(1e3, &p), tail, max_relative = 1e-2);
    }

    #[test]
    fn stagnating_variants_have_unit_rho() {
        let p = reference_params();
        for v in [VariantId::Sd3, VariantId::Sd4, VariantId::Sn3, VariantId::Sn4] {
            for d in [0.0, 0.3, 7.0, 123.0, 1e4] {
                assert_eq!(rho(v, d, &p), 1.0);
            }
        }
    }

    #[test]
    fn inverse_identities() {
        let p = reference_params();
        for d in [0.0, 0.5, 1.0, 10.0, 100.0, 1e3] {
            let sd = rho(VariantId::Sd1, d, &p) * rho(VariantId::Sd2, d, &p);
            let sn = rho(VariantId::Sn1, d, &p) * rho(VariantId::Sn2, d, &p);
            assert!((sd - 1.0).abs() <= 1e-12, "SD pair at d={d}: {sd}");
            assert!((sn - 1.0).abs() <= 1e-12, "SN pair at d={d}: {sn}");
        }
    }

    #[test]
    fn sd2_diverges_like_four_nu_d_squared() {
        let p = reference_params();
        let d = 50.0;
        assert_relative_eq!(
            rho(VariantId::Sd2, d, &p),
            4.0 * p.nu * d * d,
            max_relative = 0.02
        );
    }

    #[test]
    fn rho_max_over_heat_spectrum_sits_at_smallest_eigenvalue() {
        let p = reference_params();
        let spectrum = heat_spectrum();
        let m = rho_max(VariantId::Sd1, &spectrum, &p).unwrap();
        // oracle: exhaustive max over the 31 eigenvalues
        let exhaustive = spectrum
            .iter()
            .map(|&d| rho(VariantId::Sd1, d, &p))
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(m, exhaustive);
        assert_eq!(m, rho(VariantId::Sd1, spectrum[0], &p));
        assert_eq!(rho_max(VariantId::Sd1, &spectrum[..1], &p).unwrap(), m);
        assert_eq!(rho_max(VariantId::Sd4, &spectrum, &p).unwrap(), 1.0);
        assert!(rho_max(VariantId::Sd1, &[], &p).is_err());
    }

    #[test]
    fn relaxation_reduces_to_unrelaxed_at_theta_one() {
        let p = reference_params();
        for d in [0.0, 1.0, 42.0] {
            assert_eq!(
                rho_relaxed(VariantId::Sd1, d, 1.0, &p).unwrap(),
                rho(VariantId::Sd1, d, &p)
            );
            assert_eq!(
                rho_relaxed(VariantId::Sn1, d, 1.0, &p).unwrap(),
                rho(VariantId::Sn1, d, &p)
            );
        }
        assert!(rho_relaxed(VariantId::Sd1, 1.0, 0.0, &p).is_err());
        assert!(rho_relaxed(VariantId::Sd1, 1.0, 1.5, &p).is_err());
        assert!(rho_relaxed(VariantId::Sd2, 1.0, 0.9, &p).is_err());
    }

    #[test]
    fn equioscillation_at_optimal_theta() {
        let p = reference_params();
        for v in [VariantId::Sd1, VariantId::Sn1] {
            let t = optimal_theta(v, &p).unwrap();
            // oracle: |1 - theta*| = theta* (1 + rho(0)) - 1, checked at both ends
            let at_zero = rho_relaxed(v, 0.0, t, &p).unwrap();
            let at_infinity = rho_relaxed(v, 1e6, t, &p).unwrap();
            assert!((at_zero - (1.0 - t).abs()).abs() <= 1e-10);
            assert!((at_infinity - (1.0 - t).abs()).abs() <= 1e-3);
        }
        let t = optimal_theta(VariantId::Sd1, &p).unwrap();
        assert!((rho_relaxed(VariantId::Sd1, 0.0, t, &p).unwrap() - 0.3078).abs() < 1e-3);
        assert!((rho_relaxed(VariantId::Sd1, 1e6, t, &p).unwrap() - 0.3078).abs() < 1e-3);
    }

    #[test]
    fn optimal_theta_reference_values() {
        let p = reference_params();
        assert!((optimal_theta(VariantId::Sd1, &p).unwrap() - 0.692).abs() < 5e-4);
        assert!((optimal_theta(VariantId::Sn1, &p).unwrap() - 0.640).abs() < 5e-4);
        assert!(optimal_theta(VariantId::Sd3, &p).is_err());
    }

    #[test]
    fn optimal_theta_gamma_zero_form() {
        for (nu, horizon, alpha) in [(0.1, 1.0, 0.4), (1.0, 2.0, 1.0), (0.01, 1.0, 0.3)] {
            let p = SpectralParams::new(nu, 0.0, horizon, alpha).unwrap();
            let s = (1.0f64 / nu).sqrt();
            let expected = 2.0 / (2.0 + (s * alpha).tanh() * (s * (horizon - alpha)).tanh());
            let t = optimal_theta(VariantId::Sd1, &p).unwrap();
            assert_relative_eq!(t, expected, max_relative = 1e-13);
            assert!(t >= 2.0 / 3.0);
        }
    }

    #[test]
    fn rho_at_zero_matches_core_evaluation() {
        let p = reference_params();
        for v in [VariantId::Sd1, VariantId::Sd2, VariantId::Sn1] {
            let closed = rho_at_zero(v, &p).unwrap();
            let direct = rho(v, 0.0, &p);
            assert!((closed - direct).abs() <= 1e-12 * direct.abs());
        }
        assert_relative_eq!(
            rho_at_zero(VariantId::Sd2, &p).unwrap(),
            1.0 / rho_at_zero(VariantId::Sd1, &p).unwrap(),
            max_relative = 1e-14
        );
        assert!(rho_at_zero(VariantId::Sn2, &p).is_err());
    }

    #[test]
    fn bound_dominates_rho_and_special_case() {
        // bound >= rho on a d sample for a handful of gamma = 0 parameter sets
        for (nu, horizon, alpha, d_min) in [
            (0.1, 1.0, 0.4, 0.0),
            (0.5, 2.0, 0.7, 2.0),
            (0.02, 1.0, 0.5, 10.0),
        ] {
            let p = SpectralParams::new(nu, 0.0, horizon, alpha).unwrap();
            for v in [VariantId::Sd1, VariantId::Sn1] {
                let bound = rho_bound(v, d_min, &p).unwrap();
                let mut d = d_min.max(1e-2);
                while d <= 1e4 {
                    assert!(
                        rho(v, d, &p) <= bound.bound * (1.0 + 1e-12),
                        "{v} at d={d}: rho exceeds bound"
                    );
                    d *= 1.8;
                }
                assert!(rho(v, d_min, &p) <= bound.bound * (1.0 + 1e-12));
                if let Some(loose) = bound.loose {
                    assert!(bound.bound < loose * (1.0 + 1e-12));
                }
            }
        }
        // d_min = 0, alpha = T/2: the SD1 bound collapses to tanh(a)^2, the
        // looser one to 1/(nu sigma^2) = 1
        let p = SpectralParams::new(0.1, 0.0, 1.0, 0.5).unwrap();
        let bound = rho_bound(VariantId::Sd1, 0.0, &p).unwrap();
        let a = (1.0f64 / 0.1).sqrt() * 0.5;
        assert_relative_eq!(bound.bound, a.tanh().powi(2), max_relative = 1e-12);
        assert_relative_eq!(bound.loose.unwrap(), 1.0, max_relative = 1e-12);
        // gamma != 0 is rejected
        assert!(rho_bound(VariantId::Sd1, 0.0, &reference_params()).is_err());
    }

    #[test]
    fn monotone_decreasing_for_gamma_zero() {
        let p = SpectralParams::new(0.1, 0.0, 1.0, 0.4).unwrap();
        for v in [VariantId::Sd1, VariantId::Sn1] {
            let mut prev = f64::INFINITY;
            let mut d = 0.0;
            while d <= 1e3 {
                let r = rho(v, d, &p);
                assert!(r <= prev * (1.0 + 1e-13), "{v} not non-increasing at d={d}");
                prev = r;
                d = if d == 0.0 { 0.05 } else { d * 1.3 };
            }
        }
    }

    #[test]
    fn sweep_rows_and_errors() {
        let p = reference_params();
        let grid: Vec<f64> = (0..=99).map(|i| 1.0 + i as f64).collect();
        for v in [VariantId::Sd2, VariantId::Sn2] {
            let table = sweep(v, &grid, &p, None).unwrap();
            assert!(table.rows.iter().all(|(_, r)| *r > 1.0), "{v} must exceed 1");
        }
        let table = sweep(VariantId::Sd3, &grid, &p, None).unwrap();
        assert!(table.rows.iter().all(|(_, r)| *r == 1.0));
        let table = sweep(VariantId::Sd1, &grid, &p, None).unwrap();
        for (d, r) in &table.rows {
            assert_eq!(*r, rho(VariantId::Sd1, *d, &p));
        }
        assert!(sweep(VariantId::Sd1, &[1.0, 1.0], &p, None).is_err());
        assert!(sweep(VariantId::Sd1, &[2.0, 1.0], &p, None).is_err());
    }

    #[test]
    fn sweep_csv_format() {
        let p = reference_params();
        let table = sweep(VariantId::Sd1, &[0.0, 1.0], &p, None).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("d,rho"));
        assert_eq!(lines.count(), 2);
    }

    #[test]
    fn literal_sn1_form_differs_from_adopted_form() {
        let p = reference_params();
        let theta = 0.8;
        let adopted = rho_relaxed(VariantId::Sn1, 0.0, theta, &p).unwrap();
        let literal = rho_relaxed_sn1_literal(0.0, theta, &p).unwrap();
        assert!((adopted - literal).abs() > 0.1);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // theorem: rho_SD1 < 1 whenever A is positive semi-definite and
            // alpha <= T/2, or gamma = 0
            #[test]
            fn sd1_contracts_under_theorem_hypotheses(
                d in 0.0..1e3,
                nu_exp in -3.0..1.0f64,
                gamma in 0.0..1e2,
                horizon in 0.1..10.0f64,
                frac in 1e-3..1.0f64,
            ) {
                let nu = 10.0f64.powf(nu_exp);
                let p = SpectralParams::new(nu, gamma, horizon, frac * horizon / 2.0).unwrap();
                prop_assert!(rho(VariantId::Sd1, d, &p) < 1.0);
            }

            #[test]
            fn sd1_contracts_for_gamma_zero_any_alpha(
                d in 0.0..1e3,
                nu_exp in -3.0..1.0f64,
                horizon in 0.1..10.0f64,
                frac in 1e-3..0.999f64,
            ) {
                let nu = 10.0f64.powf(nu_exp);
                let p = SpectralParams::new(nu, 0.0, horizon, frac * horizon).unwrap();
                prop_assert!(rho(VariantId::Sd1, d, &p) < 1.0);
            }

            #[test]
            fn inverse_identity_random_params(
                d in 0.0..1e3,
                nu_exp in -2.0..1.0f64,
                gamma in 0.0..50.0f64,
                frac in 0.05..0.95f64,
            ) {
                let p = SpectralParams::new(10.0f64.powf(nu_exp), gamma, 1.0, frac).unwrap();
                let prod = rho(VariantId::Sd1, d, &p) * rho(VariantId::Sd2, d, &p);
                prop_assert!((prod - 1.0).abs() <= 1e-12);
            }
        }
    }
}
