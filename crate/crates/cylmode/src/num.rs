//! Small numerical kernels shared across the crate: compensated summation,
//! finite-difference stencils, quadrature, least squares, and a deterministic
//! PRNG for the seeded batteries.

/// Compensated summation (Kahan-Babuska / Neumaier variant).
///
/// The high/low frequency energy splits subtract quantities of similar size,
/// so the mode sums feeding them are accumulated with error-free transforms.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// 4th-order central first derivative at interior index `i` (needs i-2..=i+2).
pub fn d1_central4(f: &[f64], i: usize, h: f64) -> f64 {
    (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h)
}

/// 4th-order central second derivative at interior index `i` (needs i-2..=i+2).
pub fn d2_central4(f: &[f64], i: usize, h: f64) -> f64 {
    (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2]) / (12.0 * h * h)
}

/// Cumulative integral of uniformly sampled values, 4th order.
///
/// Each step integrates the cubic through the four nearest samples, so the
/// result matches composite Simpson accuracy at every node, not only even
/// ones. Returns `F` with `F[0] = 0` and `F[i] ≈ ∫_{t0}^{t_i} f`.
pub fn cumulative_integral(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n < 4 {
        // Too short for cubics; trapezoid is exact enough for 2-3 samples.
        for i in 1..n {
            out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
        }
        return out;
    }
    for i in 1..n {
        // Integrate f over [t_{i-1}, t_i] with the cubic through 4 samples
        // bracketing the interval.
        let inc = if i == 1 {
            h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
        } else if i == n - 1 {
            h / 24.0 * (9.0 * f[n - 1] + 19.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4])
        } else {
            h / 24.0 * (-f[i - 2] + 13.0 * f[i - 1] + 13.0 * f[i] - f[i + 1])
        };
        out[i] = out[i - 1] + inc;
    }
    out
}

/// Integral over the full sample range (4th order).
pub fn integrate(f: &[f64], h: f64) -> f64 {
    *cumulative_integral(f, h).last().unwrap_or(&0.0)
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx) * (xi - mx);
    }
    sxy / sxx
}

/// SplitMix64: deterministic across platforms, used for every seeded battery.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn uniform_usize(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kahan_recovers_catastrophic_sum() {
        // 1 + 1e16 - 1e16 in naive order loses the 1.
        let v = vec![1.0, 1e16, -1e16];
        assert_eq!(kahan_sum(v), 1.0);
    }

    #[test]
    fn stencils_are_fourth_order_on_exp() {
        let h = 0.01;
        let f: Vec<f64> = (0..9).map(|i| (i as f64 * h).exp()).collect();
        let d1 = d1_central4(&f, 4, h);
        let d2 = d2_central4(&f, 4, h);
        let exact = (4.0 * h).exp();
        assert_relative_eq!(d1, exact, max_relative = 1e-9);
        assert_relative_eq!(d2, exact, max_relative = 1e-8);
    }

    #[test]
    fn cumulative_integral_matches_sin() {
        let h = 0.01;
        let n = 200;
        let f: Vec<f64> = (0..=n).map(|i| (i as f64 * h).sin()).collect();
        let cum = cumulative_integral(&f, h);
        for i in (0..=n).step_by(17) {
            let t = i as f64 * h;
            assert_relative_eq!(cum[i], 1.0 - t.cos(), epsilon = 1e-9);
        }
    }

    #[test]
    fn slope_of_line_is_exact() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        assert_relative_eq!(ls_slope(&x, &y), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn splitmix_is_reproducible() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = SplitMix64::new(7);
        let x = c.next_f64();
        assert!((0.0..1.0).contains(&x));
    }
}
