//! Spectral projection of products: the Fourier coefficients `[Vu]_j` of
//! `V(θ,t)·u(θ,t)` at a fixed slice, computed exactly by convolution of the
//! θ-amplitude stacks. Wave numbers above the basis truncation are dropped
//! and their L² mass reported, never aliased.

use crate::basis::SpectralBasis;
use crate::potential::{Potential, TrigSeries};
use crate::{Error, Result};

const SQRT_PI: f64 = 1.7724538509055159;
const SQRT_2PI: f64 = 2.5066282746310002;

/// Normalized mode coefficients -> raw trig amplitudes.
///
/// `coeffs[0]` multiplies `1/√(2π)`, `coeffs[2k-1]` multiplies `sin(kθ)/√π`,
/// `coeffs[2k]` multiplies `cos(kθ)/√π`.
pub fn coeffs_to_series(coeffs: &[f64]) -> TrigSeries {
    let k_max = coeffs.len() / 2;
    let mut s = TrigSeries::zero(k_max);
    s.cos[0] = coeffs[0] / SQRT_2PI;
    for k in 1..=k_max {
        s.sin[k] = coeffs[2 * k - 1] / SQRT_PI;
        if 2 * k < coeffs.len() {
            s.cos[k] = coeffs[2 * k] / SQRT_PI;
        }
    }
    s
}

/// Raw trig amplitudes -> normalized coefficients, truncated to `len` modes.
/// Returns the coefficients and the L² mass of the dropped wave numbers.
pub fn series_to_coeffs(series: &TrigSeries, len: usize) -> (Vec<f64>, f64) {
    let k_keep = len / 2;
    let mut coeffs = vec![0.0; len];
    coeffs[0] = series.cos[0] * SQRT_2PI;
    for k in 1..=series.order() {
        if k <= k_keep && 2 * k - 1 < len {
            coeffs[2 * k - 1] = series.sin[k] * SQRT_PI;
        }
        if k <= k_keep && 2 * k < len {
            coeffs[2 * k] = series.cos[k] * SQRT_PI;
        }
    }
    let mut dropped = 0.0;
    for k in 1..=series.order() {
        let sin_kept = k <= k_keep && 2 * k - 1 < len;
        let cos_kept = k <= k_keep && 2 * k < len;
        if !sin_kept {
            dropped += std::f64::consts::PI * series.sin[k] * series.sin[k];
        }
        if !cos_kept {
            dropped += std::f64::consts::PI * series.cos[k] * series.cos[k];
        }
    }
    (coeffs, dropped)
}

/// Pointwise product of two trig polynomials, exact (order = sum of orders).
pub fn series_product(a: &TrigSeries, b: &TrigSeries) -> TrigSeries {
    let order = a.order() + b.order();
    let mut out = TrigSeries::zero(order);
    // cos·cos and the degenerate constant cases, uniformly:
    // cos jθ · cos kθ = ½ cos(j+k)θ + ½ cos|j-k|θ
    for j in 0..=a.order() {
        let aj = a.cos[j];
        if aj == 0.0 {
            continue;
        }
        for k in 0..=b.order() {
            let bk = b.cos[k];
            if bk != 0.0 {
                out.cos[j + k] += 0.5 * aj * bk;
                out.cos[j.abs_diff(k)] += 0.5 * aj * bk;
            }
            // cos jθ · sin kθ = ½ sin(j+k)θ + ½ sin(k-j)θ
            let bs = b.sin[k];
            if bs != 0.0 && k >= 1 {
                out.sin[j + k] += 0.5 * aj * bs;
                if k > j {
                    out.sin[k - j] += 0.5 * aj * bs;
                } else if j > k {
                    out.sin[j - k] -= 0.5 * aj * bs;
                }
            }
        }
    }
    for j in 1..=a.order() {
        let as_ = a.sin[j];
        if as_ == 0.0 {
            continue;
        }
        for k in 0..=b.order() {
            // sin jθ · cos kθ = ½ sin(j+k)θ + ½ sin(j-k)θ
            let bk = b.cos[k];
            if bk != 0.0 {
                out.sin[j + k] += 0.5 * as_ * bk;
                if j > k {
                    out.sin[j - k] += 0.5 * as_ * bk;
                } else if k > j {
                    out.sin[k - j] -= 0.5 * as_ * bk;
                }
            }
            // sin jθ · sin kθ = ½ cos|j-k|θ - ½ cos(j+k)θ
            let bs = b.sin[k];
            if bs != 0.0 && k >= 1 {
                out.cos[j.abs_diff(k)] += 0.5 * as_ * bs;
                out.cos[j + k] -= 0.5 * as_ * bs;
            }
        }
    }
    out
}

/// The projected product at one slice.
#[derive(Debug, Clone)]
pub struct VuSlice {
    /// `[Vu]_j` for the retained modes.
    pub coeffs: Vec<f64>,
    /// L² mass of the wave numbers beyond the truncation.
    pub dropped_mass: f64,
    /// The untruncated product series (used by the error-term integrals).
    pub full: TrigSeries,
}

/// Exact Fourier coefficients of `V·u` under the basis truncation.
///
/// For rotationally symmetric `V` this reduces to `V(t)·[u]_j` with no
/// dropped mass.
pub fn project_product(v: &Potential, coeffs: &[f64], t: f64) -> Result<VuSlice> {
    if coeffs.is_empty() || coeffs.len() % 2 == 0 {
        return Err(Error::IncompatibleTruncation {
            got: coeffs.len(),
            expected: coeffs.len() + 1,
        });
    }
    if v.is_symmetric() {
        let vt = v.sym_value(t);
        let out: Vec<f64> = coeffs.iter().map(|c| vt * c).collect();
        let full = {
            let mut s = coeffs_to_series(&out);
            s.cos.resize(coeffs.len() / 2 + 1, 0.0);
            s.sin.resize(coeffs.len() / 2 + 1, 0.0);
            s
        };
        return Ok(VuSlice {
            coeffs: out,
            dropped_mass: 0.0,
            full,
        });
    }
    let u = coeffs_to_series(coeffs);
    let vs = v.stack_at(t);
    let full = series_product(&vs, &u);
    let (out, dropped_mass) = series_to_coeffs(&full, coeffs.len());
    Ok(VuSlice {
        coeffs: out,
        dropped_mass,
        full,
    })
}

/// Untruncated series of `∂_t(Vu) = V_t·u + V·u_t` at one slice.
pub fn product_time_deriv(
    v: &Potential,
    coeffs: &[f64],
    coeff_primes: &[f64],
    t: f64,
) -> TrigSeries {
    let u = coeffs_to_series(coeffs);
    let ut = coeffs_to_series(coeff_primes);
    let vs = v.stack_at(t);
    let vds = v.stack_deriv_at(t);
    let mut a = series_product(&vds, &u);
    let b = series_product(&vs, &ut);
    for k in 0..=a.order().min(b.order()) {
        a.cos[k] += b.cos[k];
        a.sin[k] += b.sin[k];
    }
    a
}

/// Coefficient of basis mode `j` read off an untruncated series.
pub fn series_coeff(series: &TrigSeries, j: usize) -> f64 {
    if j == 0 {
        series.cos[0] * SQRT_2PI
    } else if j % 2 == 1 {
        let k = j.div_ceil(2);
        if k <= series.order() {
            series.sin[k] * SQRT_PI
        } else {
            0.0
        }
    } else {
        let k = j / 2;
        if k <= series.order() {
            series.cos[k] * SQRT_PI
        } else {
            0.0
        }
    }
}

/// Convenience: basis-compatible zero coefficient vector.
pub fn zero_coeffs(basis: &SpectralBasis) -> Vec<f64> {
    vec![0.0; basis.len()]
}
