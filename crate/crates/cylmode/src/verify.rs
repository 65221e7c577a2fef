//! Machine verification of the energy identities and inequalities satisfied
//! by truncated fields, with an explicit constant ledger.
//!
//! The underlying statements bound second derivatives of the high/low
//! frequency energy splits, propagate them into a log-convexity (three
//! circles) bound for the slice energy `I(t)`, and into an exponentially
//! weighted bound for the slice mass `J(t)`. Their constants are stated
//! non-constructively ("C depending only on ||V||"); the ledger pins one
//! explicit valid choice for each so that every inequality is checkable.
//!
//! Margins are signed and normalized by the local magnitude of the terms
//! involved: `holds ⇔ worst_margin >= -tol`.

use std::collections::BTreeMap;

use crate::field::{energy_profile, frequency_profile, FieldTrajectory};
use crate::num;
use crate::product;
use crate::{Error, Result};

/// Explicit constants used by the checks, all derived from the potential's
/// `C^{0,1}` data.
///
/// `c_vu` bounds `∫ (Vu)² + |∇(Vu)|² <= c_vu · I` via the product rule:
/// `(Vu)² <= sup² u²` and `|∇(Vu)|² <= 2 sup² |∇u|² + 2 lip² u²`, so
/// `2(sup² + lip²) + sup²` dominates both coefficient groups.
#[derive(Debug, Clone)]
pub struct ConstantLedger {
    pub sup_v: f64,
    pub lip_v: f64,
    /// `∫ (Vu)² + |∇(Vu)|² <= c_vu · I`.
    pub c_vu: f64,
    /// Constant of the with-ledger second derivative bounds: `6 + 5 c_vu`.
    pub c_corr: f64,
    /// Gap constant: the gap inequality needs `λ_m - λ_{m-1} > kappa_gap`.
    pub kappa_gap: f64,
    /// Constant of the low-energy derivative bound `|L_m'| <= (2√λ_{m-1} + c_lp) L_m + c_lp H_m`.
    pub c_lp: f64,
    /// Constant of the L² low-derivative bound: `2 sup|V|`.
    pub c_qbd: f64,
    /// Constant of the with-ledger L² second-derivative bound (sup-only data).
    pub c_l2: f64,
    /// `4 sup²`, internal to the weighted-bound chain.
    pub c_a: f64,
    /// Conclusion constant of the weighted L² bound `J(t) <= c_56 · I(0) e^{ᾱ t}`.
    pub c_56: f64,
    /// Smallest κ for which the weighted-bound proof chain closes.
    pub kappa_l2_min: f64,
    /// Frequency drift constant: `U' >= -c_freq · sup|V|`.
    pub c_freq: f64,
}

impl ConstantLedger {
    pub fn for_potential(v: &crate::potential::Potential) -> Self {
        let (s, l) = v.c01_norm();
        let c_vu = 2.0 * (s * s + l * l) + s * s;
        let c_corr = 6.0 + 5.0 * c_vu;
        let c_lp = 3.0 + c_vu;
        let c_qbd = 2.0 * s;
        let c_l2 = (1.0 + s * s).max(2.0 * s + 2.0 * s * s);
        let c_a = 4.0 * s * s;
        let b_h = 2.0 * c_l2 + 1.0 + 2.0 * c_a;
        let b_i = 2.0 * c_l2 + 2.0 * c_a + 7.0;
        let c_56 = 2.0 * b_i + 2.0;
        let kappa_l2_min = (c_l2 + b_h + 1.0)
            .max((8.0 * (c_a + 1.0)).sqrt())
            .max(1.0);
        Self {
            sup_v: s,
            lip_v: l,
            c_vu,
            c_corr,
            kappa_gap: c_corr,
            c_lp,
            c_qbd,
            c_l2,
            c_a,
            c_56,
            kappa_l2_min,
            c_freq: 2.0,
        }
    }

    pub fn as_map(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        m.insert("sup_v".into(), self.sup_v);
        m.insert("lip_v".into(), self.lip_v);
        m.insert("c_vu".into(), self.c_vu);
        m.insert("c_corr".into(), self.c_corr);
        m.insert("kappa_gap".into(), self.kappa_gap);
        m.insert("c_lp".into(), self.c_lp);
        m.insert("c_qbd".into(), self.c_qbd);
        m.insert("c_l2".into(), self.c_l2);
        m.insert("c_56".into(), self.c_56);
        m.insert("kappa_l2_min".into(), self.kappa_l2_min);
        m.insert("c_freq".into(), self.c_freq);
        m
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub holds: bool,
    /// Signed, normalized; negative means violation.
    pub worst_margin: f64,
    pub worst_t: f64,
    pub constants: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl CheckReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            holds: true,
            worst_margin: f64::INFINITY,
            worst_t: f64::NAN,
            constants: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    fn record(&mut self, margin: f64, t: f64) {
        if margin < self.worst_margin {
            self.worst_margin = margin;
            self.worst_t = t;
        }
    }

    fn finish(mut self, tol: f64) -> Self {
        if !self.worst_margin.is_finite() && self.worst_margin > 0.0 {
            // No node contributed (trivially true check).
            self.worst_margin = 0.0;
            self.worst_t = 0.0;
        }
        self.holds = self.worst_margin >= -tol;
        self
    }
}

/// Tolerances and battery sizes for the checks.
#[derive(Debug, Clone)]
pub struct CheckOptions {
    /// Normalized margin tolerance for inequalities.
    pub tol_margin: f64,
    /// Normalized residual tolerance for identities.
    pub tol_identity: f64,
    /// θ-quadrature nodes for the one non-band-limited integrand (`|V| u²`).
    pub theta_quadrature: usize,
    /// Number of seeded slice pairs for the flux identity.
    pub flux_pairs: usize,
    pub seed: u64,
    /// κ handed to the ᾱ selection for the weighted L² bound.
    pub kappa_l2: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            tol_margin: 1e-6,
            tol_identity: 1e-4,
            theta_quadrature: 2048,
            flux_pairs: 6,
            seed: 7,
            kappa_l2: 1.0,
        }
    }
}

/// Per-node product data shared by the checks.
///
/// Everything here is exact (Parseval on the untruncated product) except
/// `absv_u2`, which needs a θ-quadrature when the potential has θ-modes
/// because `|V|` is not band-limited.
pub struct FieldData {
    /// Truncated `[Vu]_j` per node.
    pub vu: Vec<Vec<f64>>,
    /// `[∂_t(Vu)]_j` per node (basis modes).
    pub dvu: Vec<Vec<f64>>,
    /// `∫ (Vu)² + |∇(Vu)|² dθ` per node (full product).
    pub e_full: Vec<f64>,
    /// `∫ (Vu)² dθ` per node (full product).
    pub vu_l2: Vec<f64>,
    /// `∫ |V| u² dθ` per node.
    pub absv_u2: Vec<f64>,
    /// Slice energy `I` per node.
    pub i_slice: Vec<f64>,
    /// Slice mass `J` per node.
    pub j_slice: Vec<f64>,
    /// Analytic `J'` per node.
    pub jp_slice: Vec<f64>,
    /// `∫ |∇u|²` per node.
    pub grad_slice: Vec<f64>,
}

impl FieldData {
    pub fn compute(field: &FieldTrajectory, opts: &CheckOptions) -> Result<Self> {
        let n = field.grid.len();
        let nm = field.basis.len();
        let v = &field.potential;
        let mut data = FieldData {
            vu: Vec::with_capacity(n),
            dvu: Vec::with_capacity(n),
            e_full: Vec::with_capacity(n),
            vu_l2: Vec::with_capacity(n),
            absv_u2: Vec::with_capacity(n),
            i_slice: Vec::with_capacity(n),
            j_slice: Vec::with_capacity(n),
            jp_slice: Vec::with_capacity(n),
            grad_slice: Vec::with_capacity(n),
        };
        let quad = ThetaQuadrature::new(opts.theta_quadrature, field.basis.k_max().max(v.theta_order()));
        for i in 0..n {
            let t = field.grid.t(i);
            let coeffs = &field.coeffs[i];
            let primes = &field.coeff_primes[i];
            let vu = product::project_product(v, coeffs, t)?;
            let dvu_series = product::product_time_deriv(v, coeffs, primes, t);
            let dvu: Vec<f64> = (0..nm).map(|j| product::series_coeff(&dvu_series, j)).collect();
            data.e_full.push(vu.full.h1_norm_sq() + dvu_series.l2_norm_sq());
            data.vu_l2.push(vu.full.l2_norm_sq());
            data.absv_u2.push(if v.is_symmetric() {
                v.sym_value(t).abs() * field.slice_l2(i)
            } else {
                quad.abs_v_u2(v, coeffs, t)
            });
            data.vu.push(vu.coeffs);
            data.dvu.push(dvu);
            data.i_slice.push(field.slice_energy(i));
            data.j_slice.push(field.slice_l2(i));
            data.jp_slice.push(field.slice_l2_deriv(i));
            data.grad_slice.push(field.slice_grad_sq(i));
        }
        Ok(data)
    }
}

/// Trapezoid quadrature on the circle with precomputed harmonics; only used
/// for the `∫ |V| u² dθ` term whose integrand is not band-limited.
struct ThetaQuadrature {
    nodes: usize,
    cos_table: Vec<Vec<f64>>,
    sin_table: Vec<Vec<f64>>,
}

impl ThetaQuadrature {
    fn new(nodes: usize, max_k: usize) -> Self {
        let mut cos_table = Vec::with_capacity(max_k + 1);
        let mut sin_table = Vec::with_capacity(max_k + 1);
        for k in 0..=max_k {
            let mut cr = Vec::with_capacity(nodes);
            let mut sr = Vec::with_capacity(nodes);
            for q in 0..nodes {
                let th = 2.0 * std::f64::consts::PI * q as f64 / nodes as f64;
                let (s, c) = (k as f64 * th).sin_cos();
                cr.push(c);
                sr.push(s);
            }
            cos_table.push(cr);
            sin_table.push(sr);
        }
        Self {
            nodes,
            cos_table,
            sin_table,
        }
    }

    fn abs_v_u2(&self, v: &crate::potential::Potential, coeffs: &[f64], t: f64) -> f64 {
        let vs = v.stack_at(t);
        let us = product::coeffs_to_series(coeffs);
        let mut sum = 0.0;
        for q in 0..self.nodes {
            let mut vval = vs.cos[0];
            for k in 1..=vs.order() {
                vval += vs.cos[k] * self.cos_table[k][q] + vs.sin[k] * self.sin_table[k][q];
            }
            let mut uval = us.cos[0];
            for k in 1..=us.order() {
                uval += us.cos[k] * self.cos_table[k][q] + us.sin[k] * self.sin_table[k][q];
            }
            sum += vval.abs() * uval * uval;
        }
        sum * 2.0 * std::f64::consts::PI / self.nodes as f64
    }
}

fn interior(n: usize) -> std::ops::Range<usize> {
    2..n.saturating_sub(2)
}

// ---------------------------------------------------------------------------
// Identities
// ---------------------------------------------------------------------------

/// Verify the per-mode derivative identities of the energy density
/// `q_j = ([u]_j')² + (1+λ_j)[u]_j²` and the flux identity between slice
/// pairs. Residuals are normalized by the local term magnitudes; the report
/// margin is `-(max residual)`.
pub fn check_identities(
    field: &FieldTrajectory,
    data: &FieldData,
    opts: &CheckOptions,
) -> Result<Vec<CheckReport>> {
    let g = &field.grid;
    let h = g.h();
    let n = g.len();
    let nm = field.basis.len();
    let lam = field.basis.eigenvalues();

    let mut first = CheckReport::new("identity_first_derivative");
    let mut second = CheckReport::new("identity_second_derivative");

    let mut q = vec![0.0; n];
    for j in 0..nm {
        let lj = lam[j];
        for i in 0..n {
            let a = field.coeffs[i][j];
            let b = field.coeff_primes[i][j];
            q[i] = b * b + (1.0 + lj) * a * a;
        }
        for i in interior(n) {
            let a = field.coeffs[i][j];
            let b = field.coeff_primes[i][j];
            let vu = data.vu[i][j];
            // d/dt q_j = (4λ_j + 2) [u]_j [u]_j' - 2 [u]_j' [Vu]_j
            let lhs1 = num::d1_central4(&q, i, h);
            let rhs1 = (4.0 * lj + 2.0) * a * b - 2.0 * b * vu;
            let scale1 = 1.0 + lhs1.abs() + (4.0 * lj + 2.0) * (a * b).abs() + 2.0 * (b * vu).abs();
            first.record(-((lhs1 - rhs1).abs() / scale1), g.t(i));

            // d²/dt² q_j = (4λ_j+2) q_j - (4λ_j+2)[u]_j² - (6λ_j+2)[u]_j[Vu]_j
            //              + 2[Vu]_j² - 2[u]_j' [∂_t(Vu)]_j
            let lhs2 = num::d2_central4(&q, i, h);
            let rhs2 = (4.0 * lj + 2.0) * q[i] - (4.0 * lj + 2.0) * a * a
                - (6.0 * lj + 2.0) * a * vu
                + 2.0 * vu * vu
                - 2.0 * b * data.dvu[i][j];
            let scale2 = 1.0
                + lhs2.abs()
                + (4.0 * lj + 2.0) * (q[i] + a * a)
                + (6.0 * lj + 2.0) * (a * vu).abs()
                + 2.0 * vu * vu
                + 2.0 * (b * data.dvu[i][j]).abs();
            second.record(-((lhs2 - rhs2).abs() / scale2), g.t(i));
        }
    }

    // Flux identity between slice pairs:
    // ([u_t]_j² - λ_j [u]_j²)(t2) - (t1) = -2 ∫_{t1}^{t2} [Vu]_j [u_t]_j.
    let mut flux = CheckReport::new("flux_identity");
    let mut rng = num::SplitMix64::new(opts.seed);
    let mut integrand = vec![0.0; n];
    for j in 0..nm {
        for i in 0..n {
            integrand[i] = data.vu[i][j] * field.coeff_primes[i][j];
        }
        let cum = num::cumulative_integral(&integrand, h);
        let e = |i: usize| {
            let a = field.coeffs[i][j];
            let b = field.coeff_primes[i][j];
            b * b - lam[j] * a * a
        };
        for _ in 0..opts.flux_pairs {
            let i1 = rng.uniform_usize(n - 1);
            let i2 = i1 + 1 + rng.uniform_usize(n - 1 - i1);
            let lhs = e(i2) - e(i1);
            let rhs = -2.0 * (cum[i2] - cum[i1]);
            let scale = 1.0 + e(i1).abs() + e(i2).abs() + rhs.abs();
            flux.record(-((lhs - rhs).abs() / scale), g.t(i2));
        }
    }

    Ok(vec![
        first.finish(opts.tol_identity),
        second.finish(opts.tol_identity),
        flux.finish(opts.tol_identity),
    ])
}

/// The product-energy bound `∫ (Vu)² + |∇(Vu)|² <= c_vu · I` that feeds every
/// with-ledger inequality.
pub fn check_vu_energy_bound(
    field: &FieldTrajectory,
    data: &FieldData,
    ledger: &ConstantLedger,
    opts: &CheckOptions,
) -> CheckReport {
    let mut rep = CheckReport::new("vu_energy_bound");
    rep.constants.insert("c_vu".into(), ledger.c_vu);
    for i in 0..field.grid.len() {
        let lhs = ledger.c_vu * data.i_slice[i] - data.e_full[i];
        let scale = 1.0 + data.e_full[i] + ledger.c_vu * data.i_slice[i];
        rep.record(lhs / scale, field.grid.t(i));
    }
    rep.finish(opts.tol_margin)
}

// ---------------------------------------------------------------------------
// Sobolev (W^{1,2}) inequalities at a cut m
// ---------------------------------------------------------------------------

/// Pointwise second-derivative bounds for the splits `H_m`, `L_m`:
/// the raw forms with the product-energy error term, the with-ledger forms,
/// and (when the gap condition holds) the gap inequality for `H_m - L_m`.
pub fn check_sobolev_inequalities(
    field: &FieldTrajectory,
    data: &FieldData,
    m: usize,
    ledger: &ConstantLedger,
    opts: &CheckOptions,
) -> Result<Vec<CheckReport>> {
    let g = &field.grid;
    let h = g.h();
    let n = g.len();
    let lam = field.basis.eigenvalues();
    let profile = energy_profile(field, m);
    let lam_m = if m < lam.len() { lam[m] } else { *lam.last().unwrap() };
    let lam_m1 = if m >= 1 { lam[m - 1] } else { 0.0 };

    let mut high = CheckReport::new("sobolev_high_second_derivative");
    let mut low = CheckReport::new("sobolev_low_second_derivative");
    let mut corr_high = CheckReport::new("sobolev_high_with_ledger");
    let mut corr_low = CheckReport::new("sobolev_low_with_ledger");
    for rep in [&mut high, &mut low, &mut corr_high, &mut corr_low] {
        rep.constants.insert("m".into(), m as f64);
        rep.constants.insert("lambda_m".into(), lam_m);
        rep.constants.insert("lambda_m_minus_1".into(), lam_m1);
    }
    corr_high.constants.insert("c_corr".into(), ledger.c_corr);
    corr_low.constants.insert("c_corr".into(), ledger.c_corr);

    for i in interior(n) {
        let t = g.t(i);
        let e = data.e_full[i];
        let hm = profile.h_m[i];
        let lm = profile.l_m[i];
        let hpp = num::d2_central4(&profile.h_m, i, h);
        let lpp = num::d2_central4(&profile.l_m, i, h);

        // H_m'' >= (4λ_m - 6) H_m - 3 E
        let rhs = (4.0 * lam_m - 6.0) * hm - 3.0 * e;
        let scale = 1.0 + hpp.abs() + (4.0 * lam_m + 6.0) * hm + 3.0 * e;
        high.record((hpp - rhs) / scale, t);

        // L_m'' <= (4λ_{m-1} + 6) L_m + 5 E
        let rhs = (4.0 * lam_m1 + 6.0) * lm + 5.0 * e;
        let scale = 1.0 + lpp.abs() + (4.0 * lam_m1 + 6.0) * lm + 5.0 * e;
        low.record((rhs - lpp) / scale, t);

        // With the ledger constant: H_m'' >= (4λ_m - C) H_m - C L_m
        let c = ledger.c_corr;
        let rhs = (4.0 * lam_m - c) * hm - c * lm;
        let scale = 1.0 + hpp.abs() + (4.0 * lam_m + c) * hm + c * lm;
        corr_high.record((hpp - rhs) / scale, t);

        // L_m'' <= (4λ_{m-1} + C) L_m + C H_m
        let rhs = (4.0 * lam_m1 + c) * lm + c * hm;
        let scale = 1.0 + lpp.abs() + (4.0 * lam_m1 + c) * lm + c * hm;
        corr_low.record((rhs - lpp) / scale, t);
    }

    // Gap inequality: (H_m - L_m)'' >= (4λ_{m-1} + 2κ)(H_m - L_m) when
    // λ_m - λ_{m-1} > κ.
    let mut gap = CheckReport::new("gap_growth");
    gap.constants.insert("kappa".into(), ledger.kappa_gap);
    gap.constants.insert("m".into(), m as f64);
    let gap_ok = m >= 1 && m < lam.len() && lam_m - lam_m1 > ledger.kappa_gap;
    if gap_ok {
        let diff: Vec<f64> = (0..n).map(|i| profile.h_m[i] - profile.l_m[i]).collect();
        for i in interior(n) {
            let dpp = num::d2_central4(&diff, i, h);
            let rhs = (4.0 * lam_m1 + 2.0 * ledger.kappa_gap) * diff[i];
            let scale = 1.0 + dpp.abs() + (4.0 * lam_m1 + 2.0 * ledger.kappa_gap) * diff[i].abs();
            gap.record((dpp - rhs) / scale, g.t(i));
        }
    } else {
        gap.notes.push(format!(
            "gap condition unmet at m = {m}: need lambda_m - lambda_(m-1) > {}, have {}",
            ledger.kappa_gap,
            lam_m - lam_m1
        ));
    }

    Ok(vec![
        high.finish(opts.tol_margin),
        low.finish(opts.tol_margin),
        corr_high.finish(opts.tol_margin),
        corr_low.finish(opts.tol_margin),
        gap.finish(opts.tol_margin),
    ])
}

// ---------------------------------------------------------------------------
// Three circles
// ---------------------------------------------------------------------------

/// The log-convexity bound for `log I(t)`.
///
/// With `alpha = None` the growth exponent is set to
/// `(1/T) log(I(T)/I(0))`. The cut is the smallest admissible cluster of the
/// cross-section spectrum (`λ_m - λ_{m-1} > kappa_gap` and
/// `2 √λ_{m-1} > |α|`), giving `c3 = 2 √λ_{m-1} - |α|` at the cluster
/// boundary, and the bound is assembled through
/// `c1 = 2(√λ_{m-1} + c_lp)`, `c2 = 1 + c_lp/(c1 - |α|)`:
/// `log I(t) <= log(2 c2 + 1) + c1 (t - t0) + log I(t0)`.
/// When `α >= 0` the convex-combination form is emitted as well.
pub fn three_circles_report(
    field: &FieldTrajectory,
    data: &FieldData,
    alpha: Option<f64>,
    ledger: &ConstantLedger,
    opts: &CheckOptions,
) -> Result<Vec<CheckReport>> {
    let g = &field.grid;
    let n = g.len();
    let i0 = data.i_slice[0];
    let i_end = data.i_slice[n - 1];
    if i0 <= 0.0 {
        return Err(Error::ZeroInitialEnergy);
    }
    let t0 = g.t0();
    let horizon = g.t1() - t0;
    let alpha_auto = (i_end / i0).ln() / horizon;
    let alpha = match alpha {
        Some(a) => {
            if a < alpha_auto - 1e-12 {
                return Err(Error::Config(format!(
                    "supplied alpha {a} is below the measured growth exponent {alpha_auto}"
                )));
            }
            a
        }
        None => alpha_auto,
    };

    // Smallest admissible cut, searched over the analytic cluster spectrum of
    // the cross-section: the cut enters only the proof machinery, so its
    // existence is a property of the true spectrum, not of the truncation.
    let n_dim = match field.basis.cross_section() {
        crate::basis::CrossSection::Circle => 1,
        crate::basis::CrossSection::ClusterModel(n) => n,
    };
    const CLUSTER_CAP: u64 = 1_000_000;
    let mut gap_seen = false;
    let mut chosen: Option<u64> = None;
    for mc in 1..=CLUSTER_CAP {
        let prev = crate::basis::cluster_value(n_dim, mc - 1);
        let here = crate::basis::cluster_value(n_dim, mc);
        if here - prev > ledger.kappa_gap {
            gap_seen = true;
            if 2.0 * prev.sqrt() > alpha.abs() {
                chosen = Some(mc);
                break;
            }
        }
    }
    let m_cluster = chosen.ok_or_else(|| {
        Error::NoAdmissibleCut(if gap_seen {
            format!(
                "frequency condition 2*sqrt(lambda_(m-1)) > |alpha| = {:.6} never satisfied at a gap cut",
                alpha.abs()
            )
        } else {
            format!(
                "gap condition lambda_m - lambda_(m-1) > {} never satisfied",
                ledger.kappa_gap
            )
        })
    })?;
    let lam_prev = crate::basis::cluster_value(n_dim, m_cluster - 1);
    let m = m_cluster as usize;

    let c3 = 2.0 * lam_prev.sqrt() - alpha.abs();
    let c1 = 2.0 * (lam_prev.sqrt() + ledger.c_lp);
    let c2 = 1.0 + ledger.c_lp / (c1 - alpha.abs());
    let c_add = (2.0 * c2 + 1.0).ln();

    let mut rep = CheckReport::new("three_circles");
    rep.constants.insert("alpha".into(), alpha);
    rep.constants.insert("m_cluster".into(), m as f64);
    rep.constants.insert("c1".into(), c1);
    rep.constants.insert("c2".into(), c2);
    rep.constants.insert("c3".into(), c3);
    rep.constants.insert("c_additive".into(), c_add);
    rep.constants.insert("c_lp".into(), ledger.c_lp);
    let log_i0 = i0.ln();
    for i in 0..n {
        if data.i_slice[i] <= 0.0 {
            continue;
        }
        let tau = g.t(i) - t0;
        let bound = log_i0 + c_add + c1 * tau;
        let log_i = data.i_slice[i].ln();
        rep.record((bound - log_i) / (1.0 + log_i.abs()), g.t(i));
    }
    let mut out = vec![rep.finish(opts.tol_margin)];

    // Simplified convex-combination form: the exact rewriting of the bound
    // when α equals the measured exponent and is nonnegative.
    let mut convex = CheckReport::new("three_circles_convex_form");
    if alpha_auto >= 0.0 && (alpha - alpha_auto).abs() <= 1e-12 {
        let log_it = i_end.ln();
        for i in 0..n {
            if data.i_slice[i] <= 0.0 {
                continue;
            }
            let tau = g.t(i) - t0;
            let bound = c_add
                + (c3 + 2.0 * ledger.c_lp) * tau
                + (tau / horizon) * log_it
                + ((horizon - tau) / horizon) * log_i0;
            let log_i = data.i_slice[i].ln();
            convex.record((bound - log_i) / (1.0 + log_i.abs()), g.t(i));
        }
    } else if alpha_auto < 0.0 {
        convex.notes.push(format!(
            "skipped: measured exponent alpha = {alpha_auto:.6} is negative"
        ));
    } else {
        convex
            .notes
            .push("skipped: supplied alpha exceeds the measured exponent".into());
    }
    out.push(convex.finish(opts.tol_margin));
    Ok(out)
}

// ---------------------------------------------------------------------------
// L² (bounded potential) inequalities
// ---------------------------------------------------------------------------

/// How ᾱ is supplied to the weighted L² checks.
#[derive(Debug, Clone, Copy)]
pub enum AlphaBar {
    /// Select by the cluster rule for the given κ.
    Auto { kappa: f64 },
    /// Use the given ᾱ; the selection constraints are validated and their
    /// violation is an error.
    Supplied { alpha_bar: f64, kappa: f64 },
    /// Use the given ᾱ without enforcing the constraints (diagnostics).
    Unchecked { alpha_bar: f64, kappa: f64 },
}

/// Weighted L² checks at basis cut `m`: the second-derivative bound for
/// `H̄_m` with its t0-anchored flux terms, the low-frequency derivative
/// bound, and the weighted conclusion `J(t) <= C · I(t0) · e^{ᾱ (t-t0)}`
/// with the smallest admissible `C` reported against the ledger's `c_56`.
pub fn check_l2_inequalities(
    field: &FieldTrajectory,
    data: &FieldData,
    m: usize,
    alpha_bar: AlphaBar,
    ledger: &ConstantLedger,
    opts: &CheckOptions,
) -> Result<Vec<CheckReport>> {
    let g = &field.grid;
    let h = g.h();
    let n = g.len();
    let lam = field.basis.eigenvalues();
    let profile = energy_profile(field, m);
    let lam_m = if m < lam.len() { lam[m] } else { *lam.last().unwrap() };
    let lam_m1 = if m >= 1 { lam[m - 1] } else { 0.0 };
    let i0 = data.i_slice[0];
    if i0 <= 0.0 {
        return Err(Error::ZeroInitialEnergy);
    }
    let t0 = g.t0();
    let horizon = g.t1() - t0;
    let alpha_field = (data.i_slice[n - 1] / i0).ln() / horizon;

    let n_dim = match field.basis.cross_section() {
        crate::basis::CrossSection::Circle => 1,
        crate::basis::CrossSection::ClusterModel(n) => n,
    };
    let (ab, kappa, enforce) = match alpha_bar {
        AlphaBar::Auto { kappa } => {
            let (_, ab) = crate::basis::choose_alpha_bar(n_dim, alpha_field.max(0.0), kappa)?;
            (ab, kappa, true)
        }
        AlphaBar::Supplied { alpha_bar, kappa } => (alpha_bar, kappa, true),
        AlphaBar::Unchecked { alpha_bar, kappa } => (alpha_bar, kappa, false),
    };

    // Selection constraints at this cut.
    let chom1 = 2.0 * (lam_m1 + 1.0).sqrt() + 1.0 <= ab + 1e-12;
    let chom2 = ab * ab + ab <= 4.0 * lam_m - kappa + 1e-12;
    let defalpha = alpha_field <= ab + 1e-12;
    if enforce {
        if !chom1 {
            return Err(Error::AlphaBarConstraint {
                m,
                constraint: format!("2 sqrt(lambda_(m-1)+1) + 1 = {} > alpha_bar = {ab}", 2.0 * (lam_m1 + 1.0).sqrt() + 1.0),
            });
        }
        if !chom2 {
            return Err(Error::AlphaBarConstraint {
                m,
                constraint: format!(
                    "alpha_bar^2 + alpha_bar = {} > 4 lambda_m - kappa = {}",
                    ab * ab + ab,
                    4.0 * lam_m - kappa
                ),
            });
        }
        if !defalpha {
            return Err(Error::AlphaBarConstraint {
                m,
                constraint: format!("field growth exponent {alpha_field} exceeds alpha_bar = {ab}"),
            });
        }
    }

    // Second derivative bound for Hbar with t0-anchored flux terms:
    // Hbar'' >= (4λ_m - 1) Hbar - ∫(Vu)² - 2∫_{t0}|∇u|² - J'(t) + J'(t0)
    //           - 2 ∫_{t0}^t ∫ (V² + |V|) u².
    let mut high = CheckReport::new("l2_high_second_derivative");
    high.constants.insert("m".into(), m as f64);
    high.constants.insert("lambda_m".into(), lam_m);
    let integrand: Vec<f64> = (0..n).map(|i| data.vu_l2[i] + data.absv_u2[i]).collect();
    let cum = num::cumulative_integral(&integrand, h);
    let grad0 = data.grad_slice[0];
    let jp0 = data.jp_slice[0];
    for i in interior(n) {
        let hb = profile.hbar_m[i];
        let hpp = num::d2_central4(&profile.hbar_m, i, h);
        let rhs = (4.0 * lam_m - 1.0) * hb
            - data.vu_l2[i]
            - 2.0 * grad0
            - data.jp_slice[i]
            + jp0
            - 2.0 * cum[i];
        let scale = 1.0
            + hpp.abs()
            + (4.0 * lam_m + 1.0) * hb
            + data.vu_l2[i]
            + 2.0 * grad0
            + data.jp_slice[i].abs()
            + jp0.abs()
            + 2.0 * cum[i].abs();
        high.record((hpp - rhs) / scale, g.t(i));
    }

    // |L_m'| <= 2 (λ_{m-1} + 1)^{1/2} L_m + c_qbd √(Lbar+Hbar) √L_m,
    // with L_m' assembled analytically from the first-derivative identity.
    let mut qbd = CheckReport::new("l2_low_derivative_bound");
    qbd.constants.insert("m".into(), m as f64);
    qbd.constants.insert("c_qbd".into(), ledger.c_qbd);
    if m == 0 {
        qbd.notes.push("no low modes at m = 0; bound is trivial".into());
        qbd.record(0.0, t0);
    } else {
        for i in 0..n {
            let mut lp = 0.0;
            for j in 0..m {
                let a = field.coeffs[i][j];
                let b = field.coeff_primes[i][j];
                lp += (4.0 * lam[j] + 2.0) * a * b - 2.0 * b * data.vu[i][j];
            }
            let lm = profile.l_m[i];
            let jt = data.j_slice[i];
            let rhs = 2.0 * (lam_m1 + 1.0).sqrt() * lm + ledger.c_qbd * jt.sqrt() * lm.sqrt();
            let scale = 1.0 + lp.abs() + rhs;
            qbd.record((rhs - lp.abs()) / scale, g.t(i));
        }
    }

    // Weighted sup norms and the conclusion J(t) <= C I(t0) e^{ᾱ (t-t0)}.
    let mut weighted = CheckReport::new("l2_weighted_growth");
    let mut h_bar: f64 = 0.0;
    let mut l_bar: f64 = 0.0;
    let mut ell: f64 = 0.0;
    let mut c_min: f64 = 0.0;
    let mut c_min_t = t0;
    for i in 0..n {
        let w = (-(ab) * (g.t(i) - t0)).exp();
        h_bar = h_bar.max(profile.hbar_m[i] * w);
        l_bar = l_bar.max(profile.lbar_m[i] * w);
        ell = ell.max(profile.l_m[i] * w);
        let c_here = data.j_slice[i] * w / i0;
        if c_here > c_min {
            c_min = c_here;
            c_min_t = g.t(i);
        }
    }
    weighted.constants.insert("alpha_bar".into(), ab);
    weighted.constants.insert("kappa".into(), kappa);
    weighted.constants.insert("kappa_l2_min".into(), ledger.kappa_l2_min);
    weighted.constants.insert("m".into(), m as f64);
    weighted.constants.insert("alpha_field".into(), alpha_field);
    weighted.constants.insert("h_bar_weighted".into(), h_bar);
    weighted.constants.insert("l_bar_weighted".into(), l_bar);
    weighted.constants.insert("ell_weighted".into(), ell);
    weighted.constants.insert("c_min".into(), c_min);
    weighted.constants.insert("c_56".into(), ledger.c_56);
    weighted
        .constants
        .insert("chom1_satisfied".into(), if chom1 { 1.0 } else { 0.0 });
    weighted
        .constants
        .insert("chom2_satisfied".into(), if chom2 { 1.0 } else { 0.0 });
    if !chom1 || !chom2 {
        weighted
            .notes
            .push("alpha_bar selection constraints not satisfied at this cut; conclusion checked empirically".into());
    }
    if kappa < ledger.kappa_l2_min {
        weighted.notes.push(format!(
            "kappa = {kappa} below the ledger chain requirement {}; conclusion checked against c_56 anyway",
            ledger.kappa_l2_min
        ));
    }
    weighted.record((ledger.c_56 - c_min) / (1.0 + ledger.c_56), c_min_t);

    Ok(vec![
        high.finish(opts.tol_margin),
        qbd.finish(opts.tol_margin),
        weighted.finish(opts.tol_margin),
    ])
}

// ---------------------------------------------------------------------------
// Unique continuation threshold
// ---------------------------------------------------------------------------

/// The unique-continuation threshold scan: no nonzero field may decay faster
/// than `e^{-4 sqrt(lambda_(m-1)) t}` in the slice-energy sense. Reports the
/// margin between the measured exponent and the threshold.
pub fn uc_decay_scan(
    field: &FieldTrajectory,
    data: &FieldData,
    m: usize,
    ledger: &ConstantLedger,
    opts: &CheckOptions,
) -> Result<CheckReport> {
    let n = field.grid.len();
    let i0 = data.i_slice[0];
    if i0 <= 0.0 {
        return Err(Error::ZeroInitialEnergy);
    }
    let lam = field.basis.eigenvalues();
    let lam_m1 = if m >= 1 { lam[m - 1] } else { 0.0 };
    let horizon = field.grid.t1() - field.grid.t0();
    // Normalize I(0) = 1, then the rate is log I(T) / T.
    let rate = (data.i_slice[n - 1] / i0).ln() / horizon;
    let threshold = -4.0 * lam_m1.sqrt();
    let mut rep = CheckReport::new("uc_threshold");
    rep.constants.insert("m".into(), m as f64);
    rep.constants.insert("lambda_m_minus_1".into(), lam_m1);
    rep.constants.insert("rate".into(), rate);
    rep.constants.insert("threshold".into(), threshold);
    if m >= 1 && m < lam.len() && lam[m] - lam_m1 <= ledger.kappa_gap {
        rep.notes.push(format!(
            "gap condition unavailable at m = {m} (gap {}, kappa {})",
            lam[if m < lam.len() { m } else { lam.len() - 1 }] - lam_m1,
            ledger.kappa_gap
        ));
    }
    rep.record((rate - threshold) / (1.0 + threshold.abs()), field.grid.t1());
    Ok(rep.finish(opts.tol_margin))
}

// ---------------------------------------------------------------------------
// Frequency drift
// ---------------------------------------------------------------------------

/// Drift bound for the frequency function: `U' >= -c_freq · sup|V|`,
/// applicable to fields with dominant θ-gradient (the standing hypothesis of
/// the monotonicity statement).
pub fn frequency_drift_report(field: &FieldTrajectory, opts: &CheckOptions) -> Result<CheckReport> {
    let fr = frequency_profile(field)?;
    let mut rep = CheckReport::new("frequency_drift");
    rep.constants.insert("c_freq".into(), fr.c_freq);
    rep.constants
        .insert("sup_v".into(), field.potential.sup_norm());
    let scale = 1.0 + fr.c_freq * field.potential.sup_norm();
    let mut worst = f64::INFINITY;
    let mut worst_t = field.grid.t0();
    for (i, up) in fr.u_prime.iter().enumerate() {
        let margin = (up + fr.c_freq * field.potential.sup_norm()) / scale;
        if margin < worst {
            worst = margin;
            worst_t = field.grid.t(i);
        }
    }
    rep.record(worst, worst_t);
    Ok(rep.finish(opts.tol_margin))
}
