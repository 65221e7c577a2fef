//! Batch drivers shared by the command-line front end and the acceptance
//! suite: build a potential and field from a [`RunConfig`], run the requested
//! suite, and return the artifacts as named files.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::basis::SpectralBasis;
use crate::battery;
use crate::catenoid::{self, ClosedForm};
use crate::config::{FieldSpec, RunConfig};
use crate::field::{self, FieldTrajectory};
use crate::grid::Grid;
use crate::mode::DEFAULT_MODE_STEP;
use crate::poincare;
use crate::potential::Potential;
use crate::product::coeffs_to_series;
use crate::report::{self, Json};
use crate::verify::{self, AlphaBar, CheckOptions, CheckReport, ConstantLedger, FieldData};
use crate::{Error, Result};

/// A run's output: files to write and the overall pass/violation state.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    /// `(relative path, contents)`, deterministic for a fixed config.
    pub files: Vec<(String, String)>,
    pub reports: Vec<CheckReport>,
    /// True when every report holds.
    pub all_hold: bool,
}

impl RunArtifacts {
    fn from_reports(cfg: &RunConfig, reports: Vec<CheckReport>, mut files: Vec<(String, String)>) -> Result<Self> {
        let summary = report::summary_json(&cfg.echo(), &reports)?;
        files.push(("summary.json".to_string(), summary));
        let all_hold = reports.iter().all(|r| r.holds);
        Ok(RunArtifacts {
            files,
            reports,
            all_hold,
        })
    }
}

/// Build the configured potential (preset or tabulated).
pub fn build_potential(cfg: &RunConfig) -> Result<Potential> {
    let grid = Grid::from_step(cfg.grid_t0, cfg.grid_t1, cfg.grid_h)?;
    if cfg.preset == "tabulated" {
        let mut tables = Vec::new();
        for path in &cfg.tables {
            let text = std::fs::read_to_string(path)?;
            tables.push(crate::config::parse_table(&text)?);
        }
        return Potential::tabulated(tables);
    }
    Potential::build_preset(&cfg.preset, &cfg.params, grid)
}

/// Build the configured field over the grid span.
pub fn build_field(cfg: &RunConfig, v: &Potential, basis: &SpectralBasis) -> Result<FieldTrajectory> {
    let grid = Grid::from_step(cfg.grid_t0, cfg.grid_t1, cfg.grid_h)?;
    match &cfg.field {
        FieldSpec::ClosedForm(label) => {
            let label = ClosedForm::parse(label)?;
            if cfg.preset != "catenoid" {
                return Err(Error::Config(
                    "closed-form fields require `preset = catenoid`".into(),
                ));
            }
            Ok(catenoid::closed_form_field(label, basis, grid))
        }
        FieldSpec::Separable { k, rate } => {
            if *k > basis.k_max() {
                return Err(Error::Config(format!(
                    "separable wave number {k} exceeds basis kmax {}",
                    basis.k_max()
                )));
            }
            if cfg.preset == "zero" {
                Ok(field::separable_mode_field(
                    basis,
                    grid,
                    SpectralBasis::index_cos(*k),
                    *rate,
                    1.7724538509055159,
                ))
            } else {
                // Evolve the same Cauchy data under the configured potential.
                let mut cauchy = vec![(0.0, 0.0); basis.len()];
                cauchy[SpectralBasis::index_cos(*k)] = (
                    1.7724538509055159 * (rate * cfg.grid_t0).exp(),
                    1.7724538509055159 * rate * (rate * cfg.grid_t0).exp(),
                );
                field::evolve_field(v, basis, &cauchy, (cfg.grid_t0, cfg.grid_t1), cfg.grid_h)
            }
        }
        FieldSpec::Cauchy(data) => {
            let mut cauchy = vec![(0.0, 0.0); basis.len()];
            for (mode, a, b) in data {
                if *mode >= basis.len() {
                    return Err(Error::Config(format!(
                        "cauchy mode {mode} exceeds basis length {}",
                        basis.len()
                    )));
                }
                cauchy[*mode] = (*a, *b);
            }
            field::evolve_field(v, basis, &cauchy, (cfg.grid_t0, cfg.grid_t1), cfg.grid_h)
        }
        FieldSpec::Seeded { seed, k_theta } => battery::random_field(
            *seed,
            basis,
            *k_theta,
            v.sup_norm().max(0.1),
            cfg.grid_t1 - cfg.grid_t0,
            cfg.grid_h,
        ),
    }
}

/// Run the full verification suite on one field: identities, product-energy
/// bound, split second-derivative bounds, gap inequality, three circles,
/// weighted L² bounds, unique-continuation threshold, and (for fields with
/// positive slice mass) the frequency drift.
pub fn run_verification(
    field: &FieldTrajectory,
    m_cut: Option<usize>,
    alpha: Option<f64>,
    opts: &CheckOptions,
) -> Result<(Vec<CheckReport>, ConstantLedger)> {
    let ledger = ConstantLedger::for_potential(&field.potential);
    let data = FieldData::compute(field, opts)?;
    let mut reports = Vec::new();

    reports.extend(verify::check_identities(field, &data, opts)?);
    reports.push(verify::check_vu_energy_bound(field, &data, &ledger, opts));

    // Cut for the split bounds: the configured one, or the first gap cut, or
    // the last cluster boundary when the gap never clears the ledger κ.
    let m_sobolev = match m_cut {
        Some(m) => m.min(field.basis.len()),
        None => field
            .basis
            .find_gap_index(ledger.kappa_gap)
            .unwrap_or_else(|_| field.basis.cluster_start(field.basis.k_max())),
    };
    reports.extend(verify::check_sobolev_inequalities(
        field, &data, m_sobolev, &ledger, opts,
    )?);
    reports.extend(verify::three_circles_report(field, &data, alpha, &ledger, opts)?);

    // Weighted L² checks with the cluster-selected ᾱ, mapped to a basis cut.
    let i0 = field.slice_energy(0);
    if i0 > 0.0 {
        let horizon = field.grid.t1() - field.grid.t0();
        let alpha_field =
            (field.slice_energy(field.grid.len() - 1) / i0).ln() / horizon;
        let n_dim = match field.basis.cross_section() {
            crate::basis::CrossSection::Circle => 1,
            crate::basis::CrossSection::ClusterModel(n) => n,
        };
        let (m_cluster, ab) =
            crate::basis::choose_alpha_bar(n_dim, alpha_field.max(0.0), opts.kappa_l2)?;
        let m_l2 = field.basis.cluster_start(m_cluster);
        if m_l2 < field.basis.len() {
            reports.extend(verify::check_l2_inequalities(
                field,
                &data,
                m_l2,
                AlphaBar::Supplied {
                    alpha_bar: ab,
                    kappa: opts.kappa_l2,
                },
                &ledger,
                opts,
            )?);
        } else {
            // Truncation too small for the selected cluster: check the
            // conclusion at the largest available cut without enforcing the
            // selection constraints.
            reports.extend(verify::check_l2_inequalities(
                field,
                &data,
                field.basis.cluster_start(field.basis.k_max()),
                AlphaBar::Unchecked {
                    alpha_bar: ab,
                    kappa: opts.kappa_l2,
                },
                &ledger,
                opts,
            )?);
        }
        reports.push(verify::uc_decay_scan(field, &data, m_sobolev, &ledger, opts)?);
    }
    Ok((reports, ledger))
}

fn check_options(cfg: &RunConfig) -> CheckOptions {
    CheckOptions {
        tol_margin: cfg.tol_margin,
        tol_identity: cfg.tol_identity,
        kappa_l2: cfg.kappa,
        ..CheckOptions::default()
    }
}

/// Dispatch a configured run; returns the artifacts to write.
pub fn run(cfg: &RunConfig) -> Result<RunArtifacts> {
    match cfg.command.as_str() {
        "basis" => run_basis(cfg),
        "evolve" => run_evolve(cfg),
        "profile" => run_profile(cfg),
        "verify" => run_verify(cfg),
        "poincare" => run_poincare(cfg),
        "catenoid" => run_catenoid(cfg),
        "perturb" => run_perturb(cfg),
        other => Err(Error::Config(format!("unknown subcommand `{other}`"))),
    }
}

fn run_basis(cfg: &RunConfig) -> Result<RunArtifacts> {
    let basis = SpectralBasis::circle(cfg.basis_kmax)?;
    let eigenvalues = Json::Arr(basis.eigenvalues().iter().map(|&l| Json::Num(l)).collect());
    let clusters = Json::Arr(
        (0..basis.len())
            .map(|j| Json::Num(basis.cluster_of(j) as f64))
            .collect(),
    );
    let labels = Json::Arr(
        (0..basis.len())
            .map(|j| Json::Str(basis.mode_label(j)))
            .collect(),
    );
    let doc = Json::obj([
        ("eigenvalues".to_string(), eigenvalues),
        ("clusters".to_string(), clusters),
        ("labels".to_string(), labels),
        ("run_id".to_string(), Json::Str(report::run_id(&cfg.echo()))),
    ]);
    let mut rep = CheckReport {
        name: "basis".into(),
        holds: true,
        worst_margin: 0.0,
        worst_t: 0.0,
        constants: BTreeMap::new(),
        notes: vec![format!("kmax = {}", cfg.basis_kmax)],
    };
    rep.constants
        .insert("modes".into(), basis.len() as f64);
    RunArtifacts::from_reports(cfg, vec![rep], vec![("basis.json".to_string(), doc.render())])
}

fn run_evolve(cfg: &RunConfig) -> Result<RunArtifacts> {
    let v = build_potential(cfg)?;
    let basis = SpectralBasis::circle(cfg.basis_kmax)?;
    let field = build_field(cfg, &v, &basis)?;
    let mut csv = String::from("t");
    for j in 0..basis.len() {
        csv.push_str(&format!(",{}", basis.mode_label(j)));
    }
    for j in 0..basis.len() {
        csv.push_str(&format!(",d_{}", basis.mode_label(j)));
    }
    csv.push('\n');
    for i in 0..field.grid.len() {
        csv.push_str(&report::fmt_float(field.grid.t(i)));
        for j in 0..basis.len() {
            csv.push_str(&format!(",{}", report::fmt_float(field.coeffs[i][j])));
        }
        for j in 0..basis.len() {
            csv.push_str(&format!(",{}", report::fmt_float(field.coeff_primes[i][j])));
        }
        csv.push('\n');
    }
    let mut rep = CheckReport {
        name: "evolve".into(),
        holds: true,
        worst_margin: 0.0,
        worst_t: 0.0,
        constants: BTreeMap::new(),
        notes: Vec::new(),
    };
    rep.constants
        .insert("dynamic_range".into(), field.dynamic_range);
    RunArtifacts::from_reports(cfg, vec![rep], vec![("coefficients.csv".to_string(), csv)])
}

fn run_profile(cfg: &RunConfig) -> Result<RunArtifacts> {
    let v = build_potential(cfg)?;
    let basis = SpectralBasis::circle(cfg.basis_kmax)?;
    let field = build_field(cfg, &v, &basis)?;
    let ledger = ConstantLedger::for_potential(&v);
    let m = match cfg.m_cut {
        Some(m) => m.min(basis.len()),
        None => basis
            .find_gap_index(ledger.kappa_gap)
            .unwrap_or_else(|_| basis.cluster_start(basis.k_max())),
    };
    let profile = field::energy_profile(&field, m);
    let csv = field::energy_profile_csv(&profile);
    let mut rep = CheckReport {
        name: "profile".into(),
        holds: true,
        worst_margin: 0.0,
        worst_t: 0.0,
        constants: ledger.as_map(),
        notes: Vec::new(),
    };
    rep.constants.insert("m".into(), m as f64);
    // Frequency drift report rides along whenever J stays positive.
    match field::frequency_profile(&field) {
        Ok(fr) => {
            rep.constants.insert("drift_margin".into(), fr.drift_margin);
            rep.constants.insert("c_freq".into(), fr.c_freq);
        }
        Err(e) => rep.notes.push(format!("frequency profile unavailable: {e}")),
    }
    RunArtifacts::from_reports(cfg, vec![rep], vec![("profile.csv".to_string(), csv)])
}

fn run_verify(cfg: &RunConfig) -> Result<RunArtifacts> {
    let v = build_potential(cfg)?;
    let basis = SpectralBasis::circle(cfg.basis_kmax)?;
    let field = build_field(cfg, &v, &basis)?;
    let opts = check_options(cfg);
    let (mut reports, ledger) = run_verification(&field, cfg.m_cut, cfg.alpha, &opts)?;
    let mut ledger_rep = CheckReport {
        name: "constant_ledger".into(),
        holds: true,
        worst_margin: 0.0,
        worst_t: 0.0,
        constants: ledger.as_map(),
        notes: Vec::new(),
    };
    ledger_rep
        .constants
        .insert("dynamic_range".into(), field.dynamic_range);
    reports.push(ledger_rep);
    RunArtifacts::from_reports(cfg, reports, Vec::new())
}

fn run_poincare(cfg: &RunConfig) -> Result<RunArtifacts> {
    let v = build_potential(cfg)?;
    v.check_span(cfg.span.0, cfg.span.1)?;
    let map = poincare::compute_map(cfg.lambda, &v, cfg.span.0, cfg.span.1, DEFAULT_MODE_STEP)?;
    let json = report::poincare_json(&map).render();
    let csv = report::matrix_csv(&map.matrix);
    let mut rep = CheckReport {
        name: "poincare".into(),
        holds: map.det_residual <= 1e-8,
        worst_margin: 1e-8 - map.det_residual,
        worst_t: cfg.span.1,
        constants: BTreeMap::new(),
        notes: vec![format!("classification: {}", map.class.tag())],
    };
    rep.constants.insert("det_residual".into(), map.det_residual);
    rep.constants.insert("trace".into(), poincare::mat_trace(&map.matrix));
    RunArtifacts::from_reports(
        cfg,
        vec![rep],
        vec![
            ("poincare.json".to_string(), json),
            ("poincare.csv".to_string(), csv),
        ],
    )
}

fn run_catenoid(cfg: &RunConfig) -> Result<RunArtifacts> {
    let horizon = cfg.grid_t1.abs().max(6.0);
    let grid = catenoid::scan_grid(cfg.scan.0, cfg.scan.1, cfg.scan_steps);
    let mut files = Vec::new();
    let mut reports = Vec::new();
    for k in [0u32, 1] {
        let scan = catenoid::spectrum_scan(&grid, k, horizon, DEFAULT_MODE_STEP)?;
        files.push((format!("scan_k{k}.csv"), catenoid::scan_csv(&scan)));
        let mut rep = CheckReport {
            name: format!("spectrum_scan_k{k}"),
            holds: scan.sign_changes == 0 && scan.min_abs_coefficient > 1e-2,
            worst_margin: scan.min_abs_coefficient - 1e-2,
            worst_t: 0.0,
            constants: BTreeMap::new(),
            notes: Vec::new(),
        };
        rep.constants
            .insert("min_abs_coefficient".into(), scan.min_abs_coefficient);
        rep.constants
            .insert("sign_changes".into(), scan.sign_changes as f64);
        rep.constants
            .insert("sech_residual".into(), scan.sech_residual);
        if scan.sech_residual > 1e-8 {
            rep.holds = false;
            rep.notes.push("sech eigenfunction residual above 1e-8".into());
        }
        reports.push(rep);
    }
    RunArtifacts::from_reports(cfg, reports, files)
}

fn run_perturb(cfg: &RunConfig) -> Result<RunArtifacts> {
    let v = build_potential(cfg)?;
    let pi = std::f64::consts::PI;
    let ell = cfg.ell;
    let f = crate::potential::Profile::analytic(
        move |t: f64| (pi * t / ell).sin(),
        move |t: f64| pi / ell * (pi * t / ell).cos(),
    );
    let dp = poincare::perturbation_derivative(&v, &f, cfg.lambda, cfg.ell, DEFAULT_MODE_STEP)?;
    let mut files = vec![("perturbation.csv".to_string(), report::matrix_csv(&dp))];
    let mut reports = Vec::new();
    let base = poincare::compute_map(cfg.lambda, &v, 0.0, cfg.ell, DEFAULT_MODE_STEP)?;
    let gen = poincare::mat_mul(&poincare::sl2_inverse(&base.matrix), &dp);
    let mut rep = CheckReport {
        name: "perturbation_derivative".into(),
        holds: poincare::mat_trace(&gen).abs() <= 1e-8,
        worst_margin: 1e-8 - poincare::mat_trace(&gen).abs(),
        worst_t: cfg.ell,
        constants: BTreeMap::new(),
        notes: vec!["direction: sin(pi t / ell)".into()],
    };
    rep.constants
        .insert("generator_trace".into(), poincare::mat_trace(&gen));
    reports.push(rep);

    match poincare::hyperbolize(&v, cfg.lambda, cfg.ell, DEFAULT_MODE_STEP)? {
        poincare::HyperbolizeOutcome::AlreadyNondegenerate { trace } => {
            let mut rep = CheckReport {
                name: "hyperbolize".into(),
                holds: true,
                worst_margin: trace.abs() - 2.0,
                worst_t: cfg.ell,
                constants: BTreeMap::new(),
                notes: vec!["period map already non-parabolic; potential unchanged".into()],
            };
            rep.constants.insert("trace".into(), trace);
            reports.push(rep);
        }
        poincare::HyperbolizeOutcome::Perturbed {
            direction,
            s,
            new_trace,
            traces_tried,
        } => {
            let mut curve = String::from("s,trace\n");
            for (sv, tr) in &traces_tried {
                curve.push_str(&format!(
                    "{},{}\n",
                    report::fmt_float(*sv),
                    report::fmt_float(*tr)
                ));
            }
            files.push(("hyperbolize_trace.csv".to_string(), curve));
            let mut rep = CheckReport {
                name: "hyperbolize".into(),
                holds: new_trace.abs() >= 2.0 + 1e-3,
                worst_margin: new_trace.abs() - 2.0 - 1e-3,
                worst_t: cfg.ell,
                constants: BTreeMap::new(),
                notes: vec![format!("direction: sin({} pi t / ell)", direction + 1)],
            };
            rep.constants.insert("s".into(), s);
            rep.constants.insert("new_trace".into(), new_trace);
            reports.push(rep);
        }
    }
    RunArtifacts::from_reports(cfg, reports, files)
}

/// Sum over the battery used by the acceptance suite: catenoid closed forms,
/// separable exponentials, and seeded random fields.
pub fn acceptance_fields(seed_count: usize) -> Result<Vec<FieldTrajectory>> {
    let mut out = Vec::new();
    let basis = SpectralBasis::circle(5)?;
    let grid = Grid::new(0.0, 2.0, 256)?;
    for label in [ClosedForm::N1, ClosedForm::N3, ClosedForm::K0Growing] {
        out.push(catenoid::closed_form_field(label, &basis, grid.clone()));
    }
    out.extend(battery::separable_battery(&basis, 2.0, 256));
    let rand_basis = SpectralBasis::circle(12)?;
    for seed in 0..seed_count as u64 {
        out.push(battery::random_field(
            seed,
            &rand_basis,
            (seed % 3) as usize,
            0.5,
            1.5,
            1.0 / 128.0,
        )?);
    }
    Ok(out)
}

/// Fields eligible for the frequency drift bound: slice mass positive and the
/// θ-gradient dominant (separable growing modes and the sech mode).
pub fn frequency_battery() -> Result<Vec<FieldTrajectory>> {
    let basis = SpectralBasis::circle(5)?;
    let grid = Grid::new(0.0, 2.0, 256)?;
    let mut out = Vec::new();
    out.push(catenoid::closed_form_field(ClosedForm::N1, &basis, grid.clone()));
    for k in 1..=3usize {
        for sign in [1.0, -1.0] {
            out.push(field::separable_mode_field(
                &basis,
                grid.clone(),
                SpectralBasis::index_cos(k),
                sign * k as f64,
                1.7724538509055159,
            ));
        }
    }
    let v = Potential::zero(grid.clone());
    out.push(field::analytic_field(
        &v,
        &basis,
        grid,
        &[(
            SpectralBasis::index_cos(1),
            Arc::new(|t: f64| 2.0 * t.cosh()),
            Arc::new(|t: f64| 2.0 * t.sinh()),
        )],
    ));
    Ok(out)
}

/// Protect against stray NaNs in user-facing evaluation paths.
pub fn field_theta_slice(field: &FieldTrajectory, node: usize, thetas: usize) -> Vec<f64> {
    (0..thetas)
        .map(|q| {
            let th = 2.0 * std::f64::consts::PI * q as f64 / thetas as f64;
            coeffs_to_series(&field.coeffs[node]).eval(th)
        })
        .collect()
}
