//! Acceptance suite: every criterion the toolkit must meet, one test per
//! criterion, each printing a single PASS/FAIL line.
//!
//! Run with `cargo test -p cylmode-cli --test acceptance` (add
//! `-- --nocapture` to see the PASS lines for passing criteria).

use std::time::Instant;

use cylmode::basis::{choose_alpha_bar, cluster_value, SpectralBasis};
use cylmode::battery;
use cylmode::catenoid::{self, ClosedForm};
use cylmode::field::{frequency_profile, separable_mode_field};
use cylmode::grid::Grid;
use cylmode::mode::{classify_growth, dim_bound, integrate_mode, GrowthClass, DEFAULT_MODE_STEP};
use cylmode::num::SplitMix64;
use cylmode::poincare::{
    compute_map, hyperbolize, mat_mul, mat_trace, periodic_mode_decay, perturbation_derivative,
    sl2_inverse, HyperbolizeOutcome,
};
use cylmode::potential::{Potential, Profile};
use cylmode::runner;
use cylmode::verify::{self, CheckOptions, FieldData};

fn report(number: u32, name: &str, ok: bool, detail: &str) {
    println!(
        "criterion {number:02} ({name}): {}{}",
        if ok { "PASS" } else { "FAIL" },
        if detail.is_empty() {
            String::new()
        } else {
            format!(" [{detail}]")
        }
    );
    assert!(ok, "criterion {number:02} ({name}) failed: {detail}");
}

/// Criterion 1: the integrated mode-0 catenoid Poincare map matches the
/// closed-form matrix entrywise within 1e-6 at t in {0.5, 1, 2, 3}, fast.
#[test]
fn criterion_01_catenoid_poincare_matrix() {
    let started = Instant::now();
    let grid = Grid::new(0.0, 3.0, 64).unwrap();
    let v = Potential::catenoid(grid);
    let mut worst: f64 = 0.0;
    for t in [0.5, 1.0, 2.0, 3.0] {
        let numeric = compute_map(0.0, &v, 0.0, t, DEFAULT_MODE_STEP).unwrap();
        let exact = catenoid::closed_form_poincare(t);
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((numeric.matrix[r][c] - exact.matrix[r][c]).abs());
            }
        }
    }
    let elapsed = started.elapsed();
    let ok = worst <= 1e-6 && elapsed.as_secs_f64() < 1.0;
    report(
        1,
        "catenoid Poincare matrix",
        ok,
        &format!("worst entry error {worst:.3e}, {:.3} s", elapsed.as_secs_f64()),
    );
}

/// Criterion 2: 200 random maps have |det - 1| <= 1e-8 and satisfy the
/// composition identity within 1e-7.
#[test]
fn criterion_02_symplecticity_battery() {
    let mut rng = SplitMix64::new(202);
    let grid = Grid::new(-2.0, 4.0, 256).unwrap();
    let mut worst_det: f64 = 0.0;
    let mut worst_comp: f64 = 0.0;
    for case in 0..200 {
        let v = match case % 3 {
            0 => Potential::catenoid(grid.clone()),
            1 => Potential::periodic_cos(
                grid.clone(),
                rng.uniform(-1.0, 1.0),
                rng.uniform(0.0, 1.0),
                rng.uniform(0.8, 2.0),
                rng.uniform(0.0, 6.0),
            ),
            _ => battery::random_symmetric_potential(case as u64, grid.clone(), 2.0),
        };
        // Keep 2·sqrt(λ + sup V)·span below ~15 so the determinant (a
        // difference of e^{2·rate·span}-sized products) stays far from the
        // double-precision cancellation floor.
        let lambda = rng.uniform(0.0, 12.0);
        let snap = |x: f64| (x * 256.0).round() / 256.0;
        let t1 = snap(rng.uniform(-2.0, 1.0));
        let t2 = snap(t1 + rng.uniform(0.25, 1.0));
        let t3 = snap(t2 + rng.uniform(0.25, 1.0));
        let p12 = compute_map(lambda, &v, t1, t2, DEFAULT_MODE_STEP).unwrap();
        let p23 = compute_map(lambda, &v, t2, t3, DEFAULT_MODE_STEP).unwrap();
        let p13 = compute_map(lambda, &v, t1, t3, DEFAULT_MODE_STEP).unwrap();
        worst_det = worst_det
            .max(p12.det_residual)
            .max(p23.det_residual)
            .max(p13.det_residual);
        let composed = mat_mul(&p23.matrix, &p12.matrix);
        for r in 0..2 {
            for c in 0..2 {
                let scale = 1.0 + p13.matrix[r][c].abs();
                worst_comp = worst_comp.max((composed[r][c] - p13.matrix[r][c]).abs() / scale);
            }
        }
    }
    let ok = worst_det <= 1e-8 && worst_comp <= 1e-7;
    report(
        2,
        "symplecticity",
        ok,
        &format!("worst det residual {worst_det:.3e}, worst composition error {worst_comp:.3e}"),
    );
}

/// Criterion 3: the quadrature perturbation derivative matches central finite
/// differences within 1e-4 relative on 20 random cases, and the generator
/// is trace-free to 1e-8.
#[test]
fn criterion_03_perturbation_derivative() {
    let mut rng = SplitMix64::new(303);
    let mut worst_rel: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    for case in 0..20 {
        let ell = [0.5, 1.0, 1.5][case % 3];
        let grid = Grid::new(-0.5, ell + 0.5, 256).unwrap();
        let v = battery::random_symmetric_potential(9000 + case as u64, grid, 1.5);
        let lambda = rng.uniform(0.0, 6.0);
        let k = 1 + case % 3;
        let amp = rng.uniform(0.2, 1.5);
        let om = k as f64 * std::f64::consts::PI / ell;
        let f = Profile::analytic(
            move |t: f64| amp * (om * t).sin(),
            move |t: f64| amp * om * (om * t).cos(),
        );
        let dp = perturbation_derivative(&v, &f, lambda, ell, DEFAULT_MODE_STEP).unwrap();
        let s = 1e-4;
        let plus = compute_map(lambda, &v.add_scaled_sym(&f, s).unwrap(), 0.0, ell, DEFAULT_MODE_STEP).unwrap();
        let minus = compute_map(lambda, &v.add_scaled_sym(&f, -s).unwrap(), 0.0, ell, DEFAULT_MODE_STEP).unwrap();
        let mut num = 0.0;
        let mut den = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let fd = (plus.matrix[r][c] - minus.matrix[r][c]) / (2.0 * s);
                num += (dp[r][c] - fd) * (dp[r][c] - fd);
                den += fd * fd;
            }
        }
        worst_rel = worst_rel.max((num / den.max(1e-300)).sqrt());
        let base = compute_map(lambda, &v, 0.0, ell, DEFAULT_MODE_STEP).unwrap();
        let gen = mat_mul(&sl2_inverse(&base.matrix), &dp);
        let scale: f64 = 1.0 + gen.iter().flatten().fold(0.0f64, |m, &x| m.max(x.abs()));
        worst_trace = worst_trace.max(mat_trace(&gen).abs() / scale);
    }
    let ok = worst_rel <= 1e-4 && worst_trace <= 1e-8;
    report(
        3,
        "perturbation derivative",
        ok,
        &format!("worst relative error {worst_rel:.3e}, worst generator trace {worst_trace:.3e}"),
    );
}

/// Criterion 4: identity residuals are <= 1e-6 (normalized) on closed-form
/// fields, <= 1e-4 on 50 seeded evolved random fields, and shrink ~16x when
/// the step halves.
#[test]
fn criterion_04_identity_suite() {
    let opts = CheckOptions::default();
    let basis = SpectralBasis::circle(5).unwrap();
    let grid = Grid::new(0.0, 2.0, 256).unwrap();

    let mut worst_closed: f64 = 0.0;
    for label in [ClosedForm::N1, ClosedForm::N2, ClosedForm::N3, ClosedForm::K0Growing] {
        let f = catenoid::closed_form_field(label, &basis, grid.clone());
        let data = FieldData::compute(&f, &opts).unwrap();
        for r in verify::check_identities(&f, &data, &opts).unwrap() {
            worst_closed = worst_closed.max(-r.worst_margin);
        }
    }
    for f in battery::separable_battery(&basis, 2.0, 256) {
        let data = FieldData::compute(&f, &opts).unwrap();
        for r in verify::check_identities(&f, &data, &opts).unwrap() {
            worst_closed = worst_closed.max(-r.worst_margin);
        }
    }

    let rand_basis = SpectralBasis::circle(8).unwrap();
    let mut worst_random: f64 = 0.0;
    for seed in 0..50u64 {
        let f = battery::random_field(seed, &rand_basis, (seed % 3) as usize, 0.5, 1.5, 1.0 / 128.0)
            .unwrap();
        let data = FieldData::compute(&f, &opts).unwrap();
        for r in verify::check_identities(&f, &data, &opts).unwrap() {
            worst_random = worst_random.max(-r.worst_margin);
        }
    }

    // Convergence: halving h shrinks the second-derivative identity residual
    // by about 2^4.
    let res_at = |steps: usize| {
        let g = Grid::new(0.0, 1.0, steps).unwrap();
        let f = catenoid::closed_form_field(ClosedForm::N1, &basis, g);
        let data = FieldData::compute(&f, &opts).unwrap();
        -verify::check_identities(&f, &data, &opts).unwrap()[1].worst_margin
    };
    let ratio = res_at(64) / res_at(128);

    let ok = worst_closed <= 1e-6 && worst_random <= 1e-4 && (10.0..24.0).contains(&ratio);
    report(
        4,
        "identity suite",
        ok,
        &format!(
            "closed-form residual {worst_closed:.3e}, random residual {worst_random:.3e}, h-halving ratio {ratio:.1}"
        ),
    );
}

/// Criterion 5: the full inequality suite holds with the explicit constant
/// ledger on catenoid fields, V = 0 separable fields, and 50 seeded
/// band-limited random potentials, within the time budget.
#[test]
fn criterion_05_inequality_suite() {
    let started = Instant::now();
    let opts = CheckOptions::default();
    let mut failures: Vec<String> = Vec::new();
    let mut gap_engaged = 0usize;

    let mut run_field = |f: &cylmode::field::FieldTrajectory, tag: &str| {
        match runner::run_verification(f, None, None, &opts) {
            Ok((reports, _)) => {
                for r in &reports {
                    if r.name == "gap_growth" && r.notes.is_empty() {
                        gap_engaged += 1;
                    }
                    if !r.holds {
                        failures.push(format!("{tag}/{}: margin {:.3e}", r.name, r.worst_margin));
                    }
                }
            }
            Err(e) => failures.push(format!("{tag}: {e}")),
        }
    };

    // Catenoid closed forms at the standard truncation.
    let basis = SpectralBasis::circle(5).unwrap();
    let grid = Grid::new(0.0, 2.0, 256).unwrap();
    for label in [ClosedForm::N1, ClosedForm::N3, ClosedForm::K0Growing] {
        let f = catenoid::closed_form_field(label, &basis, grid.clone());
        run_field(&f, label.name());
    }
    // A truncation large enough to engage the gap inequality for the
    // catenoid ledger constant (clusters gap 2k-1 > kappa_gap ~ 90).
    let big_basis = SpectralBasis::circle(46).unwrap();
    let f = catenoid::closed_form_field(ClosedForm::N1, &big_basis, grid.clone());
    run_field(&f, "N1/kmax46");

    // V = 0 separable fields.
    for f in battery::separable_battery(&basis, 2.0, 256) {
        run_field(&f, "separable");
    }

    // 50 seeded band-limited random potentials with sup |V| <= 0.5.
    let rand_basis = SpectralBasis::circle(12).unwrap();
    for seed in 0..50u64 {
        let f = battery::random_field(seed, &rand_basis, (seed % 3) as usize, 0.5, 1.5, 1.0 / 128.0)
            .unwrap();
        run_field(&f, &format!("seed{seed}"));
    }

    let elapsed = started.elapsed().as_secs_f64();
    let ok = failures.is_empty() && elapsed < 60.0 && gap_engaged >= 1;
    report(
        5,
        "inequality suite",
        ok,
        &format!(
            "{} violations, gap inequality engaged {gap_engaged} times, {elapsed:.1} s{}",
            failures.len(),
            if failures.is_empty() {
                String::new()
            } else {
                format!("; first: {}", failures[0])
            }
        ),
    );
}

/// Criterion 6: the kernel dimension bound is 6 at sup V = 2, the catenoid's
/// verified kernel {N1, N2} has dimension 2 <= 6, and sup V < 0 gives 0.
#[test]
fn criterion_06_dimension_bound() {
    let basis = SpectralBasis::circle(3).unwrap();
    let d = dim_bound(&basis, 2.0).unwrap();
    let dneg = dim_bound(&basis, -0.5).unwrap();

    // Verified kernel basis: N1, N2 decay at rate >= 1 - tol and live on
    // independent modes.
    let grid = Grid::new(0.0, 6.0, 768).unwrap();
    let fbasis = SpectralBasis::circle(2).unwrap();
    let mut rates = Vec::new();
    for label in [ClosedForm::N1, ClosedForm::N2] {
        let f = catenoid::closed_form_field(label, &fbasis, grid.clone());
        let p = cylmode::field::energy_profile(&f, 0);
        let n = p.grid.len();
        let i3q = 3 * n / 4;
        let rate = -((p.i[n - 1] / p.i[i3q]).ln()) / (p.grid.t(n - 1) - p.grid.t(i3q)) / 2.0;
        rates.push(rate);
    }
    let (m1, _) = ClosedForm::N1.mode_and_scale();
    let (m2, _) = ClosedForm::N2.mode_and_scale();
    let kernel_dim = if m1 != m2 { 2 } else { 1 };

    let ok = d.count_bound == 6
        && (d.circle_cap.unwrap() - (4.0 * 2.0f64.sqrt() + 2.0)).abs() < 1e-12
        && dneg.count_bound == 0
        && kernel_dim == 2
        && kernel_dim <= d.count_bound
        && rates.iter().all(|&r| r >= 1.0 - 0.05);
    report(
        6,
        "dimension bound",
        ok,
        &format!(
            "bound {} (cap {:.3}), negative-sup bound {}, kernel dim {kernel_dim}, decay rates {:.3}/{:.3}",
            d.count_bound,
            d.circle_cap.unwrap(),
            dneg.count_bound,
            rates[0],
            rates[1]
        ),
    );
}

/// Criterion 7: for 100 random cases with λ > sup V + 0.5 the growth
/// dichotomy is exhaustive, with fitted rates respecting the lower bound.
#[test]
fn criterion_07_growth_dichotomy() {
    let mut rng = SplitMix64::new(707);
    let mut growing = 0usize;
    let mut decaying = 0usize;
    let mut worst_slack = f64::INFINITY;
    for case in 0..100u64 {
        let grid = Grid::new(0.0, 8.0, 256).unwrap();
        let v = if case % 2 == 0 {
            Potential::constant(grid.clone(), rng.uniform(-1.5, 1.5))
        } else {
            battery::random_symmetric_potential(4000 + case, grid.clone(), 1.5)
        };
        let lambda = v.sup_norm() + 0.5 + rng.uniform(0.0, 6.0);
        let lower = (lambda - v.sup_norm()).sqrt();
        let horizon = (14.0 / lower).clamp(2.0, 8.0);
        let init = if case % 4 == 0 && case % 2 == 0 {
            (1.0, -(lambda - v.sym_value(0.0)).sqrt())
        } else {
            (rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
        };
        let traj = integrate_mode(lambda, &v, (0.0, horizon), init, 1.0 / 128.0).unwrap();
        if traj.is_trivial() {
            continue;
        }
        match classify_growth(lambda, &v, &traj) {
            Ok(GrowthClass::Growing(rate)) => {
                growing += 1;
                worst_slack = worst_slack.min(rate - (lower - 0.05));
            }
            Ok(GrowthClass::Decaying(rate)) => {
                decaying += 1;
                worst_slack = worst_slack.min(rate - (lower - 0.05));
            }
            Err(e) => {
                report(7, "growth dichotomy", false, &format!("case {case}: {e}"));
                return;
            }
        }
    }
    let ok = growing + decaying == 100 && worst_slack >= 0.0;
    report(
        7,
        "growth dichotomy",
        ok,
        &format!("{growing} growing, {decaying} decaying, worst rate slack {worst_slack:.3}"),
    );
}

/// Criterion 8: the sech eigenfunction residual is <= 1e-8 and the 17-point
/// scan of (-0.9, -0.1) finds no bound state in either θ-channel.
#[test]
fn criterion_08_spectrum_scan() {
    let grid = catenoid::scan_grid(-0.9, -0.1, 17);
    let mut ok = true;
    let mut detail = String::new();
    for k in [0u32, 1] {
        let scan = catenoid::spectrum_scan(&grid, k, 6.0, DEFAULT_MODE_STEP).unwrap();
        ok &= scan.sign_changes == 0
            && scan.min_abs_coefficient > 1e-2
            && scan.sech_residual <= 1e-8
            && scan.rows.len() == 17;
        detail.push_str(&format!(
            "k={k}: min |c+| {:.3}, sech residual {:.2e}; ",
            scan.min_abs_coefficient, scan.sech_residual
        ));
    }
    report(8, "spectrum scan", ok, detail.trim_end_matches("; "));
}

/// Criterion 9: U is exactly 2k (to 1e-10) for e^{kt} cos kθ, and the drift
/// bound U' >= -2 sup|V| - 1e-6 holds across the frequency battery.
#[test]
fn criterion_09_frequency() {
    let basis = SpectralBasis::circle(4).unwrap();
    let grid = Grid::new(0.0, 2.0, 256).unwrap();
    let mut worst_u: f64 = 0.0;
    for k in 1..=3usize {
        let f = separable_mode_field(
            &basis,
            grid.clone(),
            SpectralBasis::index_cos(k),
            k as f64,
            1.7724538509055159,
        );
        let fr = frequency_profile(&f).unwrap();
        for u in &fr.u {
            worst_u = worst_u.max((u - 2.0 * k as f64).abs());
        }
    }
    let mut worst_drift = f64::INFINITY;
    for f in runner::frequency_battery().unwrap() {
        let fr = frequency_profile(&f).unwrap();
        let sup = f.potential.sup_norm();
        for up in &fr.u_prime {
            worst_drift = worst_drift.min(up + 2.0 * sup);
        }
    }
    let ok = worst_u <= 1e-10 && worst_drift >= -1e-6;
    report(
        9,
        "frequency",
        ok,
        &format!("worst |U - 2k| = {worst_u:.3e}, worst drift margin {worst_drift:.3e}"),
    );
}

/// Criterion 10: the ᾱ selection returns (m = 4, ᾱ = 2√10 + 1) for
/// (n = 1, α = 0, κ = 1) and the pair satisfies both selection inequalities
/// re-evaluated independently.
#[test]
fn criterion_10_alpha_bar_selection() {
    let (m, ab) = choose_alpha_bar(1, 0.0, 1.0).unwrap();
    let want = 2.0 * 10.0f64.sqrt() + 1.0;
    let lower_ok = 2.0 * (cluster_value(1, m as u64 - 1) + 1.0).sqrt() + 1.0 <= ab + 1e-14
        && ab >= 0.0f64.max(1.0);
    let quad_ok = ab * ab + ab <= 4.0 * cluster_value(1, m as u64) - 1.0;
    let ok = m == 4 && (ab - want).abs() <= 1e-13 && lower_ok && quad_ok;
    report(
        10,
        "alpha-bar selection",
        ok,
        &format!("m = {m}, alpha_bar = {ab:.10} (want {want:.10})"),
    );
}

/// Criterion 11: hyperbolization pushes the parabolic free period map to
/// |trace| >= 2.001 with s <= 1, and the 3-period contraction check of the
/// periodic decay report passes within 5%.
#[test]
fn criterion_11_hyperbolization_and_periodic_decay() {
    let grid = Grid::new(0.0, 4.0, 512).unwrap();
    let v0 = Potential::zero(grid.clone());
    let hyp = match hyperbolize(&v0, 0.0, 1.0, DEFAULT_MODE_STEP).unwrap() {
        HyperbolizeOutcome::Perturbed { s, new_trace, .. } => {
            (s <= 1.0 && new_trace.abs() >= 2.001, s, new_trace)
        }
        HyperbolizeOutcome::AlreadyNondegenerate { trace } => (false, 0.0, trace),
    };
    let mut contraction_ok = true;
    let mut worst_contraction: f64 = 0.0;
    for (v, lambda) in [
        (v0.clone(), 1.0),
        (v0.clone(), 4.0),
        (Potential::periodic_cos(grid.clone(), 0.1, 0.1, 1.0, 0.0), 2.0),
    ] {
        let reps = periodic_mode_decay(&v, 0.0, 1.0, &[lambda], DEFAULT_MODE_STEP).unwrap();
        let err = reps[0].contraction_error.unwrap_or(1.0);
        worst_contraction = worst_contraction.max(err);
        contraction_ok &= reps[0].generic && err <= 0.05;
    }
    let ok = hyp.0 && contraction_ok;
    report(
        11,
        "hyperbolization",
        ok,
        &format!(
            "s = {:.4}, |trace| = {:.4}, worst 3-period contraction error {:.2}%",
            hyp.1,
            hyp.2.abs(),
            100.0 * worst_contraction
        ),
    );
}

/// Criterion 12: running `verify` twice on the same config produces
/// byte-identical JSON.
#[test]
fn criterion_12_determinism() {
    let exe = env!("CARGO_BIN_EXE_cylmode");
    let tmp = std::env::temp_dir().join(format!("cylmode-acc-{}", std::process::id()));
    let run_once = |dir: &str| -> (std::process::ExitStatus, Vec<u8>) {
        let out = tmp.join(dir);
        let status = std::process::Command::new(exe)
            .args([
                "verify",
                "--preset",
                "catenoid",
                "--field",
                "N1",
                "--m",
                "auto",
                "-T",
                "2",
                "--out",
            ])
            .arg(&out)
            .stdout(std::process::Stdio::null())
            .status()
            .expect("spawn cylmode");
        let json = std::fs::read(out.join("summary.json")).expect("summary.json");
        (status, json)
    };
    let (s1, a) = run_once("a");
    let (s2, b) = run_once("b");
    let _ = std::fs::remove_dir_all(&tmp);
    let ok = s1.success() && s2.success() && a == b;
    report(
        12,
        "end-to-end determinism",
        ok,
        &format!(
            "exit codes {:?}/{:?}, {} = {} bytes, identical: {}",
            s1.code(),
            s2.code(),
            a.len(),
            b.len(),
            a == b
        ),
    );
}
