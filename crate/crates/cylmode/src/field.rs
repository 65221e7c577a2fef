//! Galerkin evolution of fields `u(θ,t)` from Cauchy data and the slice
//! functionals built from the mode coefficients: the W^{1,2} energy `I`, the
//! L² mass `J`, the high/low splits `H_m, L_m, H̄_m, L̄_m`, the frequency
//! `U = J'/J`, and the symplectic pairing ω.

use std::sync::Arc;

use crate::basis::SpectralBasis;
use crate::grid::Grid;
use crate::mode::OVERFLOW_GUARD;
use crate::num;
use crate::potential::Potential;
use crate::product::{self, coeffs_to_series};
use crate::{Error, Result};

/// Default step for field evolutions.
pub const DEFAULT_FIELD_STEP: f64 = 1.0 / 128.0;

/// Truncated mode coefficients `[u]_j(t)` and `[u]_j'(t)` on a grid.
#[derive(Clone)]
pub struct FieldTrajectory {
    pub basis: SpectralBasis,
    pub grid: Grid,
    /// `coeffs[i][j]` = `[u]_j` at node `i`.
    pub coeffs: Vec<Vec<f64>>,
    pub coeff_primes: Vec<Vec<f64>>,
    pub potential: Potential,
    /// `max I / min I` over the span (1 for the zero field).
    pub dynamic_range: f64,
}

impl std::fmt::Debug for FieldTrajectory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldTrajectory")
            .field("modes", &self.basis.len())
            .field("grid", &self.grid)
            .field("dynamic_range", &self.dynamic_range)
            .finish()
    }
}

impl FieldTrajectory {
    /// Slice W^{1,2} energy `Σ_j ([u]_j')² + (1+λ_j) [u]_j²` at node `i`.
    pub fn slice_energy(&self, i: usize) -> f64 {
        let lam = self.basis.eigenvalues();
        num::kahan_sum((0..self.basis.len()).map(|j| {
            let a = self.coeffs[i][j];
            let b = self.coeff_primes[i][j];
            b * b + (1.0 + lam[j]) * a * a
        }))
    }

    /// Slice L² mass `Σ_j [u]_j²` at node `i`.
    pub fn slice_l2(&self, i: usize) -> f64 {
        num::kahan_sum(self.coeffs[i].iter().map(|a| a * a))
    }

    /// Analytic `J' = 2 Σ [u]_j [u]_j'` at node `i`.
    pub fn slice_l2_deriv(&self, i: usize) -> f64 {
        2.0 * num::kahan_sum(
            self.coeffs[i]
                .iter()
                .zip(&self.coeff_primes[i])
                .map(|(a, b)| a * b),
        )
    }

    /// `∫ |∇u|² dθ = Σ λ_j [u]_j² + ([u]_j')²` at node `i`.
    pub fn slice_grad_sq(&self, i: usize) -> f64 {
        let lam = self.basis.eigenvalues();
        num::kahan_sum((0..self.basis.len()).map(|j| {
            let a = self.coeffs[i][j];
            let b = self.coeff_primes[i][j];
            b * b + lam[j] * a * a
        }))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .chain(&self.coeff_primes)
            .flat_map(|row| row.iter())
            .fold(0.0f64, |m, &x| m.max(x.abs()))
    }

    /// Evaluate the truncated field at a point (θ on the circle, t on grid).
    pub fn eval(&self, theta: f64, i: usize) -> f64 {
        coeffs_to_series(&self.coeffs[i]).eval(theta)
    }
}

/// Integrate the coupled second-order system
/// `[u]_j'' = λ_j [u]_j - [Vu]_j` from Cauchy data at the left end of `span`.
///
/// The coupling through `[Vu]` is global per step, so a single evolution is
/// sequential; independent fields can evolve in parallel.
pub fn evolve_field(
    v: &Potential,
    basis: &SpectralBasis,
    cauchy: &[(f64, f64)],
    span: (f64, f64),
    step: f64,
) -> Result<FieldTrajectory> {
    if cauchy.len() != basis.len() {
        return Err(Error::IncompatibleTruncation {
            got: cauchy.len(),
            expected: basis.len(),
        });
    }
    // θ-dependent potentials couple modes through circle harmonics; the
    // abstract cluster model only supports rotationally symmetric evolution.
    if !v.is_symmetric() && basis.cross_section() != crate::basis::CrossSection::Circle {
        return Err(Error::NotRotationallySymmetric(v.theta_order()));
    }
    v.check_span(span.0, span.1)?;
    let grid = Grid::from_step(span.0, span.1, step)?;
    let h = grid.h();
    let nm = basis.len();
    let lam = basis.eigenvalues().to_vec();

    let mut a: Vec<f64> = cauchy.iter().map(|c| c.0).collect();
    let mut b: Vec<f64> = cauchy.iter().map(|c| c.1).collect();
    let mut coeffs = Vec::with_capacity(grid.len());
    let mut primes = Vec::with_capacity(grid.len());
    coeffs.push(a.clone());
    primes.push(b.clone());

    let accel = |t: f64, a: &[f64], out: &mut Vec<f64>| -> Result<()> {
        let vu = product::project_product(v, a, t)?;
        out.clear();
        out.extend((0..nm).map(|j| lam[j] * a[j] - vu.coeffs[j]));
        Ok(())
    };

    let mut k = vec![vec![0.0; nm]; 4]; // accelerations at the four stages
    let mut stage_a = vec![0.0; nm];
    let mut scratch = Vec::with_capacity(nm);
    for i in 0..grid.steps() {
        let t = grid.t(i);
        // RK4 on the first-order system (a, b); velocity stages are linear in
        // b so only the accelerations need the convolution.
        accel(t, &a, &mut scratch)?;
        k[0].copy_from_slice(&scratch);
        for j in 0..nm {
            stage_a[j] = a[j] + 0.5 * h * b[j];
        }
        accel(t + 0.5 * h, &stage_a, &mut scratch)?;
        k[1].copy_from_slice(&scratch);
        for j in 0..nm {
            stage_a[j] = a[j] + 0.5 * h * b[j] + 0.25 * h * h * k[0][j];
        }
        accel(t + 0.5 * h, &stage_a, &mut scratch)?;
        k[2].copy_from_slice(&scratch);
        for j in 0..nm {
            stage_a[j] = a[j] + h * b[j] + 0.5 * h * h * k[1][j];
        }
        accel(t + h, &stage_a, &mut scratch)?;
        k[3].copy_from_slice(&scratch);
        for j in 0..nm {
            let bj = b[j];
            a[j] += h * bj + h * h / 6.0 * (k[0][j] + k[1][j] + k[2][j]);
            b[j] += h / 6.0 * (k[0][j] + 2.0 * k[1][j] + 2.0 * k[2][j] + k[3][j]);
            if !a[j].is_finite() || a[j].abs() > OVERFLOW_GUARD || b[j].abs() > OVERFLOW_GUARD {
                return Err(Error::DynamicRange { t: grid.t(i + 1) });
            }
        }
        coeffs.push(a.clone());
        primes.push(b.clone());
    }

    let mut field = FieldTrajectory {
        basis: basis.clone(),
        grid,
        coeffs,
        coeff_primes: primes,
        potential: v.clone(),
        dynamic_range: 1.0,
    };
    let mut imin = f64::INFINITY;
    let mut imax = 0.0f64;
    for i in 0..field.grid.len() {
        let e = field.slice_energy(i);
        imin = imin.min(e);
        imax = imax.max(e);
    }
    field.dynamic_range = if imin > 0.0 { imax / imin } else { 1.0 };
    Ok(field)
}

type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Build a field from closed-form per-mode profiles (value, derivative).
/// Modes not listed are identically zero.
pub fn analytic_field(
    v: &Potential,
    basis: &SpectralBasis,
    grid: Grid,
    modes: &[(usize, ProfileFn, ProfileFn)],
) -> FieldTrajectory {
    let nm = basis.len();
    let mut coeffs = vec![vec![0.0; nm]; grid.len()];
    let mut primes = vec![vec![0.0; nm]; grid.len()];
    for i in 0..grid.len() {
        let t = grid.t(i);
        for (j, f, df) in modes {
            coeffs[i][*j] = f(t);
            primes[i][*j] = df(t);
        }
    }
    FieldTrajectory {
        basis: basis.clone(),
        grid,
        coeffs,
        coeff_primes: primes,
        potential: v.clone(),
        dynamic_range: 1.0,
    }
}

/// Separable `V = 0` field `c · e^{rate·t} · φ_mode`.
pub fn separable_mode_field(
    basis: &SpectralBasis,
    grid: Grid,
    mode: usize,
    rate: f64,
    amplitude: f64,
) -> FieldTrajectory {
    let v = Potential::zero(grid.clone());
    analytic_field(
        &v,
        basis,
        grid,
        &[(
            mode,
            Arc::new(move |t: f64| amplitude * (rate * t).exp()),
            Arc::new(move |t: f64| amplitude * rate * (rate * t).exp()),
        )],
    )
}

/// t-sampled slice functionals split at cut `m`.
#[derive(Debug, Clone)]
pub struct EnergyProfile {
    pub grid: Grid,
    pub m: usize,
    pub i: Vec<f64>,
    pub j: Vec<f64>,
    pub h_m: Vec<f64>,
    pub l_m: Vec<f64>,
    pub hbar_m: Vec<f64>,
    pub lbar_m: Vec<f64>,
    /// Frequency `U = J'/J`; NaN on nodal slices.
    pub u: Vec<f64>,
}

/// Split the slice energies at mode cut `m`:
/// `H_m = Σ_{j>=m} ([u]_j')² + (1+λ_j)[u]_j²` and `L_m` the complement,
/// `H̄_m = Σ_{j>=m} [u]_j²` and `L̄_m` the complement. The totals are formed
/// as `I = L_m + H_m`, `J = L̄_m + H̄_m`, so those identities are exact.
pub fn energy_profile(field: &FieldTrajectory, m: usize) -> EnergyProfile {
    assert!(m <= field.basis.len(), "cut beyond truncation");
    let lam = field.basis.eigenvalues();
    let n = field.grid.len();
    let mut out = EnergyProfile {
        grid: field.grid.clone(),
        m,
        i: Vec::with_capacity(n),
        j: Vec::with_capacity(n),
        h_m: Vec::with_capacity(n),
        l_m: Vec::with_capacity(n),
        hbar_m: Vec::with_capacity(n),
        lbar_m: Vec::with_capacity(n),
        u: Vec::with_capacity(n),
    };
    for i in 0..n {
        let q = |j: usize| {
            let a = field.coeffs[i][j];
            let b = field.coeff_primes[i][j];
            b * b + (1.0 + lam[j]) * a * a
        };
        let low = num::kahan_sum((0..m).map(q));
        let high = num::kahan_sum((m..field.basis.len()).map(q));
        let lbar = num::kahan_sum((0..m).map(|j| field.coeffs[i][j] * field.coeffs[i][j]));
        let hbar = num::kahan_sum(
            (m..field.basis.len()).map(|j| field.coeffs[i][j] * field.coeffs[i][j]),
        );
        let jtot = lbar + hbar;
        let jp = field.slice_l2_deriv(i);
        out.l_m.push(low);
        out.h_m.push(high);
        out.lbar_m.push(lbar);
        out.hbar_m.push(hbar);
        out.i.push(low + high);
        out.j.push(jtot);
        out.u.push(if jtot > 0.0 { jp / jtot } else { f64::NAN });
    }
    out
}

/// Frequency `U(t) = J'/J` with `J'` and `J''` from the coefficients, plus
/// the drift margin `min_t (U' + c_freq · sup|V|)`.
#[derive(Debug, Clone)]
pub struct FrequencyProfile {
    pub grid: Grid,
    pub u: Vec<f64>,
    pub u_prime: Vec<f64>,
    /// `min_t U'(t) + c_freq · sup|V|`; nonnegative when the drift bound holds.
    pub drift_margin: f64,
    pub c_freq: f64,
}

pub fn frequency_profile(field: &FieldTrajectory) -> Result<FrequencyProfile> {
    let n = field.grid.len();
    let lam = field.basis.eigenvalues();
    let c_freq = 2.0;
    let sup_v = field.potential.sup_norm();
    let mut u = Vec::with_capacity(n);
    let mut up = Vec::with_capacity(n);
    let mut drift: f64 = f64::INFINITY;
    for i in 0..n {
        let j = field.slice_l2(i);
        if j <= 0.0 {
            return Err(Error::NodalSlice { t: field.grid.t(i) });
        }
        let jp = field.slice_l2_deriv(i);
        // J'' = 2 Σ ([u]_j')² + [u]_j (λ_j [u]_j - [Vu]_j), all analytic.
        let vu = product::project_product(&field.potential, &field.coeffs[i], field.grid.t(i))?;
        let jpp = 2.0
            * num::kahan_sum((0..field.basis.len()).map(|k| {
                let a = field.coeffs[i][k];
                let b = field.coeff_primes[i][k];
                b * b + a * (lam[k] * a - vu.coeffs[k])
            }));
        let ui = jp / j;
        let upi = (jpp * j - jp * jp) / (j * j);
        drift = drift.min(upi + c_freq * sup_v);
        u.push(ui);
        up.push(upi);
    }
    Ok(FrequencyProfile {
        grid: field.grid.clone(),
        u,
        u_prime: up,
        drift_margin: drift,
        c_freq,
    })
}

/// Symplectic pairing `ω(u, v) = Σ_j [u]_j [v_t]_j - [v]_j [u_t]_j` at the
/// slice `t0` (a grid node shared by both fields).
pub fn symplectic_form(uf: &FieldTrajectory, vf: &FieldTrajectory, t0: f64) -> Result<f64> {
    if uf.basis != vf.basis {
        return Err(Error::MismatchedFields("different bases".into()));
    }
    if uf.potential.sup_norm() != vf.potential.sup_norm()
        || uf.potential.theta_order() != vf.potential.theta_order()
    {
        return Err(Error::MismatchedFields("different potentials".into()));
    }
    let iu = uf
        .grid
        .index_of(t0)
        .ok_or_else(|| Error::InvalidGrid(format!("t0 = {t0} is not a grid node")))?;
    let iv = vf
        .grid
        .index_of(t0)
        .ok_or_else(|| Error::InvalidGrid(format!("t0 = {t0} is not a grid node of v")))?;
    Ok(num::kahan_sum((0..uf.basis.len()).map(|j| {
        uf.coeffs[iu][j] * vf.coeff_primes[iv][j] - vf.coeffs[iv][j] * uf.coeff_primes[iu][j]
    })))
}

/// CSV export of an energy profile: `t,I,J,H_m,L_m,Hbar_m,Lbar_m,U`.
pub fn energy_profile_csv(p: &EnergyProfile) -> String {
    let mut out = String::from("t,I,J,H_m,L_m,Hbar_m,Lbar_m,U\n");
    for i in 0..p.grid.len() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            crate::report::fmt_float(p.grid.t(i)),
            crate::report::fmt_float(p.i[i]),
            crate::report::fmt_float(p.j[i]),
            crate::report::fmt_float(p.h_m[i]),
            crate::report::fmt_float(p.l_m[i]),
            crate::report::fmt_float(p.hbar_m[i]),
            crate::report::fmt_float(p.lbar_m[i]),
            crate::report::fmt_float(p.u[i]),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    const SQRT_PI: f64 = 1.7724538509055159;
    const SQRT_2PI: f64 = 2.5066282746310002;

    #[test]
    fn single_mode_exponential_evolves_exactly() {
        // u = e^{kt} cos(kθ): Cauchy data a = √π at (cos,k), b = k√π.
        let k = 2usize;
        let basis = SpectralBasis::circle(3).unwrap();
        let g = Grid::new(0.0, 2.0, 64).unwrap();
        let v = Potential::zero(g);
        let mut cauchy = vec![(0.0, 0.0); basis.len()];
        cauchy[SpectralBasis::index_cos(k)] = (SQRT_PI, k as f64 * SQRT_PI);
        let f = evolve_field(&v, &basis, &cauchy, (0.0, 2.0), DEFAULT_FIELD_STEP).unwrap();
        let end = f.coeffs.last().unwrap()[SpectralBasis::index_cos(k)];
        assert_relative_eq!(end, SQRT_PI * (2.0 * k as f64).exp(), max_relative = 1e-8);
        assert!(f.dynamic_range > 1.0);
    }

    #[test]
    fn zero_cauchy_data_stays_zero() {
        let basis = SpectralBasis::circle(3).unwrap();
        let g = Grid::new(0.0, 2.0, 64).unwrap();
        let v = Potential::catenoid(g);
        let cauchy = vec![(0.0, 0.0); basis.len()];
        let f = evolve_field(&v, &basis, &cauchy, (0.0, 2.0), DEFAULT_FIELD_STEP).unwrap();
        assert!(f.max_abs_coeff() <= 1e-12);
    }

    #[test]
    fn catenoid_sech_mode_decays() {
        // u = sech(t) sin θ: a = √π, b = 0 on (sin,1).
        let basis = SpectralBasis::circle(2).unwrap();
        let g = Grid::new(0.0, 2.0, 256).unwrap();
        let v = Potential::catenoid(g);
        let mut cauchy = vec![(0.0, 0.0); basis.len()];
        cauchy[SpectralBasis::index_sin(1)] = (SQRT_PI, 0.0);
        let f = evolve_field(&v, &basis, &cauchy, (0.0, 2.0), DEFAULT_FIELD_STEP).unwrap();
        for i in (0..f.grid.len()).step_by(32) {
            let t = f.grid.t(i);
            assert_relative_eq!(
                f.coeffs[i][SpectralBasis::index_sin(1)],
                SQRT_PI / t.cosh(),
                max_relative = 1e-8
            );
        }
    }

    #[test]
    fn rotationally_symmetric_evolution_decouples() {
        // Each mode of a K=0 evolution must match integrate_mode.
        let basis = SpectralBasis::circle(2).unwrap();
        let g = Grid::new(0.0, 1.5, 256).unwrap();
        let v = Potential::catenoid(g);
        let cauchy: Vec<(f64, f64)> = (0..basis.len())
            .map(|j| (0.3 + 0.1 * j as f64, -0.2 + 0.05 * j as f64))
            .collect();
        let f = evolve_field(&v, &basis, &cauchy, (0.0, 1.5), DEFAULT_FIELD_STEP).unwrap();
        for j in 0..basis.len() {
            let traj = crate::mode::integrate_mode(
                basis.eigenvalue(j),
                &v,
                (0.0, 1.5),
                cauchy[j],
                DEFAULT_FIELD_STEP,
            )
            .unwrap();
            for i in (0..f.grid.len()).step_by(16) {
                assert_abs_diff_eq!(f.coeffs[i][j], traj.w[i], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn energy_profile_of_tanh_mode() {
        // u = tanh t on the constant mode: coefficient √(2π) tanh t, I(0) = 2π.
        let basis = SpectralBasis::circle(1).unwrap();
        let g = Grid::new(0.0, 1.0, 64).unwrap();
        let v = Potential::catenoid(g.clone());
        let f = analytic_field(
            &v,
            &basis,
            g,
            &[(
                0,
                Arc::new(|t: f64| SQRT_2PI * t.tanh()),
                Arc::new(|t: f64| SQRT_2PI / t.cosh().powi(2)),
            )],
        );
        let p = energy_profile(&f, 1);
        assert_relative_eq!(p.i[0], 2.0 * PI, epsilon = 1e-12);
        assert_eq!(p.h_m[0], 0.0);
    }

    #[test]
    fn zero_field_profile_vanishes() {
        let basis = SpectralBasis::circle(1).unwrap();
        let g = Grid::new(0.0, 1.0, 32).unwrap();
        let f = separable_mode_field(&basis, g, 0, 0.0, 0.0);
        let p = energy_profile(&f, 1);
        assert!(p.i.iter().all(|&x| x == 0.0));
        assert!(p.j.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn exponential_mode_energy_slope() {
        // u = e^t cos θ: I(t) = 3π e^{2t}, so log I has slope exactly 2.
        let basis = SpectralBasis::circle(1).unwrap();
        let g = Grid::new(0.0, 2.0, 128).unwrap();
        let f = separable_mode_field(&basis, g, SpectralBasis::index_cos(1), 1.0, SQRT_PI);
        let p = energy_profile(&f, 0);
        assert_relative_eq!(p.i[0], 3.0 * PI, epsilon = 1e-12);
        let slope = (p.i.last().unwrap() / p.i[0]).ln() / 2.0;
        assert_relative_eq!(slope, 2.0, epsilon = 1e-12);
        // I = H_m + L_m exactly, by construction of the splits.
        for i in 0..p.grid.len() {
            assert_eq!(p.i[i], p.h_m[i] + p.l_m[i]);
            assert_eq!(p.j[i], p.hbar_m[i] + p.lbar_m[i]);
        }
    }

    #[test]
    fn frequency_of_pure_exponential_is_constant() {
        let basis = SpectralBasis::circle(1).unwrap();
        let g = Grid::new(0.0, 2.0, 128).unwrap();
        let f = separable_mode_field(&basis, g, SpectralBasis::index_cos(1), 1.0, SQRT_PI);
        let fr = frequency_profile(&f).unwrap();
        for (u, up) in fr.u.iter().zip(&fr.u_prime) {
            assert_abs_diff_eq!(*u, 2.0, epsilon = 1e-10);
            assert_abs_diff_eq!(*up, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn frequency_of_cosh_mode_is_increasing() {
        // u = 2 cosh(t) cos θ: J = 4π cosh² t, U = 2 tanh t.
        let basis = SpectralBasis::circle(1).unwrap();
        let g = Grid::new(0.0, 2.0, 128).unwrap();
        let v = Potential::zero(g.clone());
        let f = analytic_field(
            &v,
            &basis,
            g,
            &[(
                SpectralBasis::index_cos(1),
                Arc::new(|t: f64| 2.0 * SQRT_PI * t.cosh()),
                Arc::new(|t: f64| 2.0 * SQRT_PI * t.sinh()),
            )],
        );
        let fr = frequency_profile(&f).unwrap();
        for i in 0..f.grid.len() {
            let t = f.grid.t(i);
            assert_relative_eq!(fr.u[i], 2.0 * t.tanh(), epsilon = 1e-10, max_relative = 1e-10);
        }
        assert!(fr.u.windows(2).all(|w| w[1] >= w[0]));
        assert!(fr.drift_margin >= -1e-12);
    }

    #[test]
    fn frequency_of_catenoid_sech_mode() {
        // u = sech t sin θ on the catenoid: U = -2 tanh t, U' = -2 sech² t,
        // and the drift bound U' >= -2 sup|V| = -4 holds.
        let basis = SpectralBasis::circle(1).unwrap();
        let g = Grid::new(0.0, 2.0, 128).unwrap();
        let v = Potential::catenoid(g.clone());
        let f = analytic_field(
            &v,
            &basis,
            g,
            &[(
                SpectralBasis::index_sin(1),
                Arc::new(|t: f64| SQRT_PI / t.cosh()),
                Arc::new(|t: f64| -SQRT_PI * t.tanh() / t.cosh()),
            )],
        );
        let fr = frequency_profile(&f).unwrap();
        for i in 0..f.grid.len() {
            let t = f.grid.t(i);
            assert_relative_eq!(fr.u[i], -2.0 * t.tanh(), epsilon = 1e-10, max_relative = 1e-9);
            assert_relative_eq!(
                fr.u_prime[i],
                -2.0 / t.cosh().powi(2),
                epsilon = 1e-9,
                max_relative = 1e-9
            );
        }
        assert!(fr.drift_margin >= -1e-9, "drift margin {}", fr.drift_margin);
    }

    #[test]
    fn nodal_slice_reported() {
        let basis = SpectralBasis::circle(1).unwrap();
        let g = Grid::new(0.0, 1.0, 32).unwrap();
        let f = separable_mode_field(&basis, g, 0, 0.0, 0.0);
        assert!(matches!(frequency_profile(&f), Err(Error::NodalSlice { .. })));
    }

    #[test]
    fn symplectic_form_examples() {
        let basis = SpectralBasis::circle(1).unwrap();
        let g = Grid::new(0.0, 1.0, 64).unwrap();
        let u = separable_mode_field(&basis, g.clone(), SpectralBasis::index_cos(1), 1.0, SQRT_PI);
        let v = separable_mode_field(&basis, g, SpectralBasis::index_cos(1), -1.0, SQRT_PI);
        // ω(u, u) = 0 by antisymmetry.
        assert_eq!(symplectic_form(&u, &u, 0.5).unwrap(), 0.0);
        // ω(e^t cos θ, e^{-t} cos θ) = -2π at every slice.
        for t0 in [0.0, 0.25, 0.5, 1.0] {
            assert_relative_eq!(symplectic_form(&u, &v, t0).unwrap(), -2.0 * PI, max_relative = 1e-12);
        }
        assert_relative_eq!(
            symplectic_form(&u, &v, 0.5).unwrap(),
            -symplectic_form(&v, &u, 0.5).unwrap(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn symplectic_slice_invariance_on_evolved_pair() {
        let basis = SpectralBasis::circle(2).unwrap();
        let g = Grid::new(0.0, 1.0, 128).unwrap();
        let v = Potential::catenoid(g);
        let mut c1 = vec![(0.0, 0.0); basis.len()];
        c1[1] = (1.0, 0.3);
        c1[2] = (-0.4, 0.8);
        let mut c2 = vec![(0.0, 0.0); basis.len()];
        c2[1] = (0.2, -0.9);
        c2[0] = (1.1, 0.4);
        let u = evolve_field(&v, &basis, &c1, (0.0, 1.0), DEFAULT_FIELD_STEP).unwrap();
        let w = evolve_field(&v, &basis, &c2, (0.0, 1.0), DEFAULT_FIELD_STEP).unwrap();
        let w0 = symplectic_form(&u, &w, 0.0).unwrap();
        for t0 in [0.25, 0.5, 0.75, 1.0] {
            let wt = symplectic_form(&u, &w, t0).unwrap();
            assert!(
                (wt - w0).abs() <= 1e-8 * (1.0 + w0.abs()),
                "slice drift {} at t0={t0}",
                wt - w0
            );
        }
    }

    #[test]
    fn cauchy_uniqueness_numerically() {
        let basis = SpectralBasis::circle(3).unwrap();
        let g = Grid::new(0.0, 2.0, 64).unwrap();
        let v = Potential::catenoid(g);
        let cauchy = vec![(0.0, 0.0); basis.len()];
        let f = evolve_field(&v, &basis, &cauchy, (0.0, 2.0), DEFAULT_FIELD_STEP).unwrap();
        assert!(f.max_abs_coeff() <= 1e-12);
    }

    #[test]
    fn truncation_mismatch_rejected() {
        let basis = SpectralBasis::circle(2).unwrap();
        let g = Grid::new(0.0, 1.0, 32).unwrap();
        let v = Potential::zero(g);
        assert!(matches!(
            evolve_field(&v, &basis, &[(1.0, 0.0)], (0.0, 1.0), 0.01),
            Err(Error::IncompatibleTruncation { .. })
        ));
    }
}
