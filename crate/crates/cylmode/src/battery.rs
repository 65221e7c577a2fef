//! Seeded construction of random potentials and Cauchy data for the property
//! batteries. Everything is driven by SplitMix64, so a seed pins the whole
//! battery bit-for-bit.

use std::sync::Arc;

use crate::basis::SpectralBasis;
use crate::field::{evolve_field, FieldTrajectory};
use crate::grid::Grid;
use crate::num::SplitMix64;
use crate::potential::{Potential, Profile};
use crate::Result;

fn random_profile(rng: &mut SplitMix64, amp: f64) -> Profile {
    let a = rng.uniform(-amp, amp);
    let b = rng.uniform(-amp, amp);
    let om = rng.uniform(0.4, 2.0);
    let ph = rng.uniform(0.0, std::f64::consts::TAU);
    Profile::analytic(
        move |t: f64| a + b * (om * t + ph).cos(),
        move |t: f64| -b * om * (om * t + ph).sin(),
    )
}

/// Rotationally symmetric random potential with `sup |V| <= sup_cap`.
pub fn random_symmetric_potential(seed: u64, grid: Grid, sup_cap: f64) -> Potential {
    let mut rng = SplitMix64::new(seed);
    let raw = Potential::from_parts(grid.clone(), random_profile(&mut rng, 1.0), vec![], None).unwrap();
    rescale_to_cap(raw, sup_cap)
}

/// Band-limited random potential with θ-order `k_theta` and
/// `sup |V| <= sup_cap`. Profiles are smooth, so the Lipschitz estimate stays
/// within a small multiple of the cap.
pub fn random_band_potential(seed: u64, grid: Grid, k_theta: usize, sup_cap: f64) -> Potential {
    let mut rng = SplitMix64::new(seed);
    let sym = random_profile(&mut rng, 1.0);
    let waves: Vec<(Profile, Profile)> = (0..k_theta)
        .map(|k| {
            let decay = 1.0 / (1.0 + k as f64);
            (
                random_profile(&mut rng, decay),
                random_profile(&mut rng, decay),
            )
        })
        .collect();
    let raw = Potential::from_parts(grid, sym, waves, None).unwrap();
    rescale_to_cap(raw, sup_cap)
}

fn rescale_to_cap(v: Potential, sup_cap: f64) -> Potential {
    let sup = v.sup_norm();
    if sup == 0.0 {
        return v;
    }
    let f = Profile::constant(-0.5 * (sup_cap / sup).ln());
    // e^{-2f} = sup_cap / sup scales every stack profile uniformly.
    v.conformal_transform(&f).unwrap()
}

/// Random bounded Cauchy data supported on wave numbers `<= active_kmax`,
/// normalized so the initial slice energy is 1.
pub fn random_cauchy(
    seed: u64,
    basis: &SpectralBasis,
    active_kmax: usize,
    decaying_bias: bool,
) -> Vec<(f64, f64)> {
    let mut rng = SplitMix64::new(seed ^ 0xD1CE_BA5E);
    let mut data = vec![(0.0, 0.0); basis.len()];
    for j in 0..basis.len() {
        let k = basis.cluster_of(j);
        if k > active_kmax {
            continue;
        }
        let a = rng.uniform(-1.0, 1.0);
        let b = if decaying_bias {
            // Slope roughly opposite the natural growth direction.
            -basis.eigenvalue(j).sqrt() * a + 0.2 * rng.uniform(-1.0, 1.0)
        } else {
            rng.uniform(-1.0, 1.0)
        };
        data[j] = (a, b);
    }
    let energy: f64 = data
        .iter()
        .enumerate()
        .map(|(j, (a, b))| b * b + (1.0 + basis.eigenvalue(j)) * a * a)
        .sum();
    if energy > 0.0 {
        let s = energy.sqrt().recip();
        for d in data.iter_mut() {
            d.0 *= s;
            d.1 *= s;
        }
    }
    data
}

/// A seeded evolved field for the inequality battery: band-limited potential
/// (`sup |V| <= sup_cap`), low-mode Cauchy data, span `[0, horizon]`.
pub fn random_field(
    seed: u64,
    basis: &SpectralBasis,
    k_theta: usize,
    sup_cap: f64,
    horizon: f64,
    step: f64,
) -> Result<FieldTrajectory> {
    let grid = Grid::from_step(0.0, horizon, step)?;
    let v = if k_theta == 0 {
        random_symmetric_potential(seed, grid, sup_cap)
    } else {
        random_band_potential(seed, grid, k_theta, sup_cap)
    };
    let cauchy = random_cauchy(seed, basis, 3.min(basis.k_max()), seed % 2 == 0);
    evolve_field(&v, basis, &cauchy, (0.0, horizon), step)
}

/// The named closed-form battery members used by the acceptance suite:
/// separable exponentials for `V = 0` plus the catenoid closed forms.
pub fn separable_battery(basis: &SpectralBasis, horizon: f64, steps: usize) -> Vec<FieldTrajectory> {
    let grid = Grid::new(0.0, horizon, steps).unwrap();
    let mut out = Vec::new();
    for k in 1..=3usize.min(basis.k_max()) {
        for sign in [1.0, -1.0] {
            out.push(crate::field::separable_mode_field(
                basis,
                grid.clone(),
                SpectralBasis::index_cos(k),
                sign * k as f64,
                1.7724538509055159,
            ));
        }
    }
    // A convex two-exponential member in the k = 1 channel.
    let v = Potential::zero(grid.clone());
    out.push(crate::field::analytic_field(
        &v,
        basis,
        grid,
        &[(
            SpectralBasis::index_cos(1),
            Arc::new(|t: f64| t.cosh()),
            Arc::new(|t: f64| t.sinh()),
        )],
    ));
    out
}
