//! Single-mode dynamics: the ODE `w'' = (λ - V(t)) w` for rotationally
//! symmetric potentials, cosh comparison bounds, the growth/decay dichotomy,
//! and the rotationally symmetric kernel dimension bound.

use crate::basis::{CrossSection, SpectralBasis};
use crate::grid::Grid;
use crate::num;
use crate::potential::Potential;
use crate::{Error, Result};

/// Magnitudes beyond this abort the integration; exponential modes must fail
/// loudly rather than return infinities.
pub const OVERFLOW_GUARD: f64 = 1e300;

/// Default step for mode-level integrations.
pub const DEFAULT_MODE_STEP: f64 = 1.0 / 256.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodMeta {
    pub step: f64,
    pub order: usize,
}

/// A single-mode trajectory `(w, w')` on a uniform grid.
#[derive(Debug, Clone)]
pub struct ModeTrajectory {
    pub lambda: f64,
    pub grid: Grid,
    pub w: Vec<f64>,
    pub w_prime: Vec<f64>,
    pub method: MethodMeta,
}

impl ModeTrajectory {
    pub fn end_state(&self) -> (f64, f64) {
        (*self.w.last().unwrap(), *self.w_prime.last().unwrap())
    }

    pub fn is_trivial(&self) -> bool {
        self.w.iter().all(|&x| x == 0.0) && self.w_prime.iter().all(|&x| x == 0.0)
    }

    /// Largest interior residual of `w'' = (λ - V) w` reconstructed by finite
    /// differences, normalized by `1 + |w|`.
    pub fn ode_residual(&self, v: &Potential) -> f64 {
        let h = self.grid.h();
        let mut worst: f64 = 0.0;
        for i in 2..self.grid.len().saturating_sub(2) {
            let wpp = num::d2_central4(&self.w, i, h);
            let rhs = (self.lambda - v.sym_value(self.grid.t(i))) * self.w[i];
            worst = worst.max((wpp - rhs).abs() / (1.0 + self.w[i].abs()));
        }
        worst
    }
}

/// Classic fixed-step RK4 on the first order system `(w, w')`.
///
/// Fixed step keeps endpoint values deterministic for golden-file tests; all
/// downstream inequality checks evaluate pointwise on shared grids.
pub fn integrate_mode(
    lambda: f64,
    v: &Potential,
    span: (f64, f64),
    init: (f64, f64),
    step: f64,
) -> Result<ModeTrajectory> {
    if !v.is_symmetric() {
        return Err(Error::NotRotationallySymmetric(v.theta_order()));
    }
    v.check_span(span.0, span.1)?;
    let grid = Grid::from_step(span.0, span.1, step)?;
    let h = grid.h();
    let mut w = Vec::with_capacity(grid.len());
    let mut wp = Vec::with_capacity(grid.len());
    let (mut y0, mut y1) = init;
    w.push(y0);
    wp.push(y1);
    let f = |t: f64, a: f64, b: f64| -> (f64, f64) { (b, (lambda - v.sym_value(t)) * a) };
    for i in 0..grid.steps() {
        let t = grid.t(i);
        let (k1a, k1b) = f(t, y0, y1);
        let (k2a, k2b) = f(t + 0.5 * h, y0 + 0.5 * h * k1a, y1 + 0.5 * h * k1b);
        let (k3a, k3b) = f(t + 0.5 * h, y0 + 0.5 * h * k2a, y1 + 0.5 * h * k2b);
        let (k4a, k4b) = f(t + h, y0 + h * k3a, y1 + h * k3b);
        y0 += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        y1 += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        if y0.abs() > OVERFLOW_GUARD || y1.abs() > OVERFLOW_GUARD || !y0.is_finite() || !y1.is_finite() {
            return Err(Error::DynamicRange { t: grid.t(i + 1) });
        }
        w.push(y0);
        wp.push(y1);
    }
    Ok(ModeTrajectory {
        lambda,
        grid,
        w,
        w_prime: wp,
        method: MethodMeta { step: h, order: 4 },
    })
}

/// Which comparison claim applied and how much slack it had.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub holds: bool,
    pub worst_margin: f64,
    pub worst_t: f64,
    /// 1: `w >= w(0) cosh(Kt)` from `w'(0) >= 0`;
    /// 2: backward variant anchored at the right endpoint;
    /// 3: the two-exponential bound for `-K w(0) < w'(0) < 0`.
    pub claim: u8,
}

/// Check the cosh comparison bounds for `w'' >= K² w`, `w(0) > 0`.
///
/// The hypothesis `(λ - V) w >= K² w` is verified on the grid first. The
/// applicable claim is chosen from the sign of `w'` at the anchor point.
pub fn comparison_check(traj: &ModeTrajectory, v: &Potential, k_rate: f64) -> Result<ComparisonReport> {
    let g = &traj.grid;
    let hyp_tol = 1e-9;
    for i in 0..g.len() {
        let t = g.t(i);
        let lhs = (traj.lambda - v.sym_value(t)) * traj.w[i];
        let rhs = k_rate * k_rate * traj.w[i];
        if lhs - rhs < -hyp_tol * (1.0 + traj.w[i].abs()) {
            return Err(Error::HypothesisViolated { t });
        }
    }
    let w0 = traj.w[0];
    let wp0 = traj.w_prime[0];
    let (claim, bound): (u8, Box<dyn Fn(f64) -> f64>) = if w0 > 0.0 && wp0 >= 0.0 {
        (1, Box::new(move |s: f64| w0 * (k_rate * s).cosh()))
    } else if w0 > 0.0 && wp0 < 0.0 && wp0 > -k_rate * w0 {
        let cp = (k_rate * w0 + wp0) / (2.0 * k_rate);
        let cm = (k_rate * w0 - wp0) / (2.0 * k_rate);
        (3, Box::new(move |s: f64| cp * (k_rate * s).exp() + cm * (-k_rate * s).exp()))
    } else {
        let (w1, wp1) = traj.end_state();
        if w1 > 0.0 && wp1 <= 0.0 {
            // Claim 2: anchored at the right endpoint, valid for t <= t1.
            let span = g.t1();
            let report = scan_margin(traj, |i, t| traj.w[i] - w1 * (k_rate * (t - span)).cosh());
            return Ok(ComparisonReport {
                holds: report.0 >= -1e-9,
                worst_margin: report.0,
                worst_t: report.1,
                claim: 2,
            });
        }
        return Err(Error::HypothesisViolated { t: g.t0() });
    };
    let t0 = g.t0();
    let (worst, worst_t) = scan_margin(traj, |i, t| traj.w[i] - bound(t - t0));
    Ok(ComparisonReport {
        holds: worst >= -1e-9 * (1.0 + w0.abs()),
        worst_margin: worst,
        worst_t,
        claim,
    })
}

fn scan_margin(traj: &ModeTrajectory, f: impl Fn(usize, f64) -> f64) -> (f64, f64) {
    let mut worst = f64::INFINITY;
    let mut worst_t = traj.grid.t0();
    for i in 0..traj.grid.len() {
        let t = traj.grid.t(i);
        let m = f(i, t);
        if m < worst {
            worst = m;
            worst_t = t;
        }
    }
    (worst, worst_t)
}

/// Outcome of the growth/decay dichotomy for `λ > sup V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthClass {
    Growing(f64),
    Decaying(f64),
}

/// Absolute tolerance on the fitted rate; the decay/growth bound is
/// asymptotic and this is the finite-horizon allowance.
pub const RATE_TOL: f64 = 0.05;

/// Classify a trajectory with `λ > sup V` as Growing or Decaying by the
/// least-squares log-slope of `|w| + |w'|` over the last quarter of the span.
pub fn classify_growth(lambda: f64, v: &Potential, traj: &ModeTrajectory) -> Result<GrowthClass> {
    if traj.is_trivial() {
        return Err(Error::TrivialSolution);
    }
    let sup_v = v.sup_norm();
    debug_assert!(lambda > sup_v, "dichotomy needs lambda > sup V");
    let lower = (lambda - sup_v).sqrt();
    let n = traj.grid.len();
    let start = n - (n / 4).max(4);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in start..n {
        let mag = traj.w[i].abs() + traj.w_prime[i].abs();
        if mag > 0.0 {
            xs.push(traj.grid.t(i));
            ys.push(mag.ln());
        }
    }
    if xs.len() < 4 {
        return Err(Error::TrivialSolution);
    }
    let rate = num::ls_slope(&xs, &ys);
    if rate >= lower - RATE_TOL {
        Ok(GrowthClass::Growing(rate))
    } else if rate <= -lower + RATE_TOL {
        Ok(GrowthClass::Decaying(rate.abs()))
    } else {
        Err(Error::DichotomyViolated { rate, bound: lower })
    }
}

/// Dimension bound for the space of solutions vanishing at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimBound {
    /// `2 · |{ j : λ_j <= sup V }|`.
    pub count_bound: usize,
    /// Circle refinement `4 √(sup V) + 2` (0 when `sup V < 0`).
    pub circle_cap: Option<f64>,
}

pub fn dim_bound(basis: &SpectralBasis, sup_v: f64) -> Result<DimBound> {
    let lambda_max = *basis.eigenvalues().last().unwrap();
    if lambda_max <= sup_v {
        return Err(Error::TruncationTooSmall { lambda_max, sup_v });
    }
    let count = basis.eigenvalues().iter().filter(|&&l| l <= sup_v).count();
    let circle_cap = match basis.cross_section() {
        CrossSection::Circle => Some(if sup_v < 0.0 { 0.0 } else { 4.0 * sup_v.sqrt() + 2.0 }),
        CrossSection::ClusterModel(_) => None,
    };
    Ok(DimBound {
        count_bound: 2 * count,
        circle_cap,
    })
}

/// Export a trajectory as CSV `t,w,w_prime`.
pub fn trajectory_csv(traj: &ModeTrajectory) -> String {
    let mut out = String::from("t,w,w_prime\n");
    for i in 0..traj.grid.len() {
        out.push_str(&format!(
            "{},{},{}\n",
            crate::report::fmt_float(traj.grid.t(i)),
            crate::report::fmt_float(traj.w[i]),
            crate::report::fmt_float(traj.w_prime[i])
        ));
    }
    out
}
