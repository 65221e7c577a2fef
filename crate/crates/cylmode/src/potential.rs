//! Potentials `V(θ, t)` stored as θ-Fourier stacks of t-profiles.
//!
//! Keeping the θ-dependence in Fourier amplitudes (rather than gridded in θ)
//! makes products with band-limited fields exact convolutions and keeps the
//! rotationally symmetric case a plain scalar multiplication.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::grid::Grid;
use crate::{Error, Result};

type Func = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar profile of `t`.
///
/// Presets carry closed-form closures with exact derivatives; tabulated data
/// lives on a uniform grid and is interpolated/differentiated at 4th order.
#[derive(Clone)]
pub enum Profile {
    Zero,
    Analytic { value: Func, deriv: Func },
    Sampled { grid: Grid, values: Vec<f64> },
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Zero => write!(f, "Profile::Zero"),
            Profile::Analytic { .. } => write!(f, "Profile::Analytic"),
            Profile::Sampled { grid, .. } => write!(f, "Profile::Sampled({:?})", grid),
        }
    }
}

impl Profile {
    pub fn constant(c: f64) -> Self {
        if c == 0.0 {
            Profile::Zero
        } else {
            Profile::Analytic {
                value: Arc::new(move |_| c),
                deriv: Arc::new(|_| 0.0),
            }
        }
    }

    pub fn analytic(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Profile::Analytic {
            value: Arc::new(value),
            deriv: Arc::new(deriv),
        }
    }

    pub fn sampled(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "sample count {} does not match grid nodes {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinitePotential { t: grid.t(i) });
        }
        Ok(Profile::Sampled { grid, values })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Profile::Zero)
    }

    /// 4-point Lagrange weights for the offset `s in [0,1]` between nodes.
    fn lagrange4(s: f64) -> [f64; 4] {
        [
            -s * (s - 1.0) * (s - 2.0) / 6.0,
            (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
            -(s + 1.0) * s * (s - 2.0) / 2.0,
            (s + 1.0) * s * (s - 1.0) / 6.0,
        ]
    }

    fn sample_window(grid: &Grid, t: f64) -> (usize, f64) {
        let h = grid.h();
        let x = (t - grid.t0()) / h;
        let hi = (grid.len() as isize - 4).max(0);
        let mut i = x.floor() as isize - 1;
        i = i.clamp(0, hi);
        (i as usize, x - (i + 1) as f64)
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Analytic { value, .. } => value(t),
            Profile::Sampled { grid, values } => {
                if grid.len() < 4 {
                    // Linear fallback for very short tables.
                    let h = grid.h();
                    let x = ((t - grid.t0()) / h).clamp(0.0, (grid.len() - 1) as f64);
                    let i = (x.floor() as usize).min(grid.len() - 2);
                    let s = x - i as f64;
                    return values[i] * (1.0 - s) + values[i + 1] * s;
                }
                let (i, s) = Self::sample_window(grid, t);
                let w = Self::lagrange4(s);
                w[0] * values[i] + w[1] * values[i + 1] + w[2] * values[i + 2] + w[3] * values[i + 3]
            }
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Analytic { deriv, .. } => deriv(t),
            Profile::Sampled { grid, values } => {
                let h = grid.h();
                if grid.len() < 5 {
                    let x = ((t - grid.t0()) / h).clamp(0.0, (grid.len() - 1) as f64);
                    let i = (x.floor() as usize).min(grid.len() - 2);
                    return (values[i + 1] - values[i]) / h;
                }
                // Differentiate the cubic interpolant.
                let (i, s) = Self::sample_window(grid, t);
                let dw = [
                    -(3.0 * s * s - 6.0 * s + 2.0) / 6.0,
                    (3.0 * s * s - 4.0 * s - 1.0) / 2.0,
                    -(3.0 * s * s - 2.0 * s - 2.0) / 2.0,
                    (3.0 * s * s - 1.0) / 6.0,
                ];
                (dw[0] * values[i]
                    + dw[1] * values[i + 1]
                    + dw[2] * values[i + 2]
                    + dw[3] * values[i + 3])
                    / h
            }
        }
    }

    /// Domain restriction, if any. Analytic profiles evaluate anywhere.
    pub fn domain(&self) -> Option<(f64, f64)> {
        match self {
            Profile::Sampled { grid, .. } => Some((grid.t0(), grid.t1())),
            _ => None,
        }
    }
}

/// Amplitudes of a trigonometric polynomial on the circle at a fixed `t`:
/// `f(θ) = cos[0] + Σ_{k>=1} cos[k]·cos(kθ) + sin[k]·sin(kθ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigSeries {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigSeries {
    pub fn zero(order: usize) -> Self {
        Self {
            cos: vec![0.0; order + 1],
            sin: vec![0.0; order + 1],
        }
    }

    pub fn order(&self) -> usize {
        self.cos.len() - 1
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut v = self.cos[0];
        for k in 1..self.cos.len() {
            let (s, c) = (k as f64 * theta).sin_cos();
            v += self.cos[k] * c + self.sin[k] * s;
        }
        v
    }

    /// `∫_{S¹} f² dθ` by Parseval.
    pub fn l2_norm_sq(&self) -> f64 {
        let mut sum = 2.0 * std::f64::consts::PI * self.cos[0] * self.cos[0];
        for k in 1..self.cos.len() {
            sum += std::f64::consts::PI * (self.cos[k] * self.cos[k] + self.sin[k] * self.sin[k]);
        }
        sum
    }

    /// `∫_{S¹} f² + (∂_θ f)² dθ` by Parseval.
    pub fn h1_norm_sq(&self) -> f64 {
        let mut sum = 2.0 * std::f64::consts::PI * self.cos[0] * self.cos[0];
        for k in 1..self.cos.len() {
            let w = 1.0 + (k * k) as f64;
            sum += w * std::f64::consts::PI * (self.cos[k] * self.cos[k] + self.sin[k] * self.sin[k]);
        }
        sum
    }
}

/// `V(θ, t)` as a θ-Fourier stack of t-profiles.
///
/// `sym` is the rotationally symmetric part; `waves[k-1]` holds the
/// `(cos kθ, sin kθ)` amplitude profiles. The cached norms are grid
/// estimates: `sup_norm` is exact to grid resolution and `lip_estimate` is a
/// finite-difference estimate used only to size the verifier's constants.
#[derive(Debug, Clone)]
pub struct Potential {
    grid: Grid,
    sym: Profile,
    waves: Vec<(Profile, Profile)>,
    preset: Option<String>,
    sup_norm: f64,
    lip_estimate: f64,
}

impl Potential {
    pub fn from_parts(
        grid: Grid,
        sym: Profile,
        waves: Vec<(Profile, Profile)>,
        preset: Option<String>,
    ) -> Result<Self> {
        let mut v = Self {
            grid,
            sym,
            waves,
            preset,
            sup_norm: 0.0,
            lip_estimate: 0.0,
        };
        v.trim_waves();
        let (sup, lip) = v.measure_c01()?;
        v.sup_norm = sup;
        v.lip_estimate = lip;
        Ok(v)
    }

    fn trim_waves(&mut self) {
        while let Some((c, s)) = self.waves.last() {
            if c.is_zero() && s.is_zero() {
                self.waves.pop();
            } else {
                break;
            }
        }
    }

    /// Grid max of |V| and finite-difference Lipschitz estimate, in t and θ.
    fn measure_c01(&self) -> Result<(f64, f64)> {
        let k = self.theta_order();
        let n_theta = if k == 0 { 1 } else { (8 * k).max(64) };
        let dtheta = 2.0 * std::f64::consts::PI / n_theta as f64;
        let h = self.grid.h();
        let mut sup = 0.0_f64;
        let mut lip = 0.0_f64;
        let mut prev_row: Option<Vec<f64>> = None;
        for i in 0..self.grid.len() {
            let t = self.grid.t(i);
            let row: Vec<f64> = (0..n_theta)
                .map(|q| self.value(q as f64 * dtheta, t))
                .collect();
            for (q, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinitePotential { t });
                }
                sup = sup.max(v.abs());
                if n_theta > 1 {
                    let next = row[(q + 1) % n_theta];
                    lip = lip.max((next - v).abs() / dtheta);
                }
            }
            if let Some(prev) = &prev_row {
                for q in 0..n_theta {
                    lip = lip.max((row[q] - prev[q]).abs() / h);
                }
            }
            prev_row = Some(row);
        }
        Ok((sup, lip))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn preset(&self) -> Option<&str> {
        self.preset.as_deref()
    }

    /// Highest θ wave number carried by the stack (0 = rotationally symmetric).
    pub fn theta_order(&self) -> usize {
        self.waves.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.waves.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn lip_estimate(&self) -> f64 {
        self.lip_estimate
    }

    /// The `C^{0,1}` estimate `(sup |V|, Lip V)`.
    pub fn c01_norm(&self) -> (f64, f64) {
        (self.sup_norm, self.lip_estimate)
    }

    pub fn value(&self, theta: f64, t: f64) -> f64 {
        let mut v = self.sym.value(t);
        for (k, (c, s)) in self.waves.iter().enumerate() {
            let (sn, cs) = ((k + 1) as f64 * theta).sin_cos();
            v += c.value(t) * cs + s.value(t) * sn;
        }
        v
    }

    pub fn sym_value(&self, t: f64) -> f64 {
        self.sym.value(t)
    }

    pub fn sym_deriv(&self, t: f64) -> f64 {
        self.sym.deriv(t)
    }

    /// θ-amplitudes at time `t`.
    pub fn stack_at(&self, t: f64) -> TrigSeries {
        let k = self.theta_order();
        let mut out = TrigSeries::zero(k);
        out.cos[0] = self.sym.value(t);
        for (i, (c, s)) in self.waves.iter().enumerate() {
            out.cos[i + 1] = c.value(t);
            out.sin[i + 1] = s.value(t);
        }
        out
    }

    /// θ-amplitudes of `∂_t V` at time `t`.
    pub fn stack_deriv_at(&self, t: f64) -> TrigSeries {
        let k = self.theta_order();
        let mut out = TrigSeries::zero(k);
        out.cos[0] = self.sym.deriv(t);
        for (i, (c, s)) in self.waves.iter().enumerate() {
            out.cos[i + 1] = c.deriv(t);
            out.sin[i + 1] = s.deriv(t);
        }
        out
    }

    /// Ensure evaluation along `[a, b]` is allowed; sampled profiles cannot
    /// leave their table.
    pub fn check_span(&self, a: f64, b: f64) -> Result<()> {
        let mut domains: Vec<(f64, f64)> = Vec::new();
        if let Some(d) = self.sym.domain() {
            domains.push(d);
        }
        for (c, s) in &self.waves {
            if let Some(d) = c.domain() {
                domains.push(d);
            }
            if let Some(d) = s.domain() {
                domains.push(d);
            }
        }
        for (t0, t1) in domains {
            let slack = 1e-9 * (1.0 + self.grid.h());
            if a < t0 - slack || b > t1 + slack {
                return Err(Error::SpanOutsideDomain { a, b, t0, t1 });
            }
        }
        Ok(())
    }

    // ---- presets -------------------------------------------------------

    pub fn zero(grid: Grid) -> Self {
        Self::from_parts(grid, Profile::Zero, vec![], Some("zero".into())).unwrap()
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self::from_parts(grid, Profile::constant(c), vec![], Some("constant".into())).unwrap()
    }

    /// `V(t) = 2 sech²(t)`, the potential of the catenoid's Jacobi operator
    /// pulled back to the flat cylinder.
    pub fn catenoid(grid: Grid) -> Self {
        let value = |t: f64| 2.0 / t.cosh().powi(2);
        let deriv = |t: f64| -4.0 * t.tanh() / t.cosh().powi(2);
        Self::from_parts(
            grid,
            Profile::analytic(value, deriv),
            vec![],
            Some("catenoid".into()),
        )
        .unwrap()
    }

    /// `V_ε(t) = ε² V(ε t)` applied to the catenoid profile.
    pub fn rescaled_catenoid(grid: Grid, eps: f64) -> Self {
        let value = move |t: f64| eps * eps * 2.0 / (eps * t).cosh().powi(2);
        let deriv = move |t: f64| -eps * eps * eps * 4.0 * (eps * t).tanh() / (eps * t).cosh().powi(2);
        Self::from_parts(
            grid,
            Profile::analytic(value, deriv),
            vec![],
            Some("rescaled_catenoid".into()),
        )
        .unwrap()
    }

    /// Smooth bump `a · exp(1 - 1/(1 - ((t-c)/w)²))` supported on `|t-c| < w`.
    pub fn compact_bump(grid: Grid, amplitude: f64, center: f64, width: f64) -> Self {
        let value = move |t: f64| {
            let x = (t - center) / width;
            if x.abs() >= 1.0 {
                0.0
            } else {
                amplitude * (1.0 - 1.0 / (1.0 - x * x)).exp()
            }
        };
        let deriv = move |t: f64| {
            let x = (t - center) / width;
            if x.abs() >= 1.0 {
                0.0
            } else {
                let g = 1.0 - x * x;
                value(t) * (-2.0 * x / (g * g)) / width
            }
        };
        Self::from_parts(
            grid,
            Profile::analytic(value, deriv),
            vec![],
            Some("compact_bump".into()),
        )
        .unwrap()
    }

    /// `offset + amplitude · cos(2π t / period + phase)`.
    pub fn periodic_cos(grid: Grid, offset: f64, amplitude: f64, period: f64, phase: f64) -> Self {
        let om = 2.0 * std::f64::consts::PI / period;
        let value = move |t: f64| offset + amplitude * (om * t + phase).cos();
        let deriv = move |t: f64| -amplitude * om * (om * t + phase).sin();
        Self::from_parts(
            grid,
            Profile::analytic(value, deriv),
            vec![],
            Some("periodic_cos".into()),
        )
        .unwrap()
    }

    /// Build a named preset. `params` supplies preset-specific values.
    pub fn build_preset(name: &str, params: &BTreeMap<String, f64>, grid: Grid) -> Result<Self> {
        let need = |key: &str| -> Result<f64> {
            params.get(key).copied().ok_or_else(|| Error::MissingParam {
                preset: name.to_string(),
                param: key.to_string(),
            })
        };
        match name {
            "zero" => Ok(Self::zero(grid)),
            "constant" => Ok(Self::constant(grid, need("value")?)),
            "catenoid" => Ok(Self::catenoid(grid)),
            "rescaled_catenoid" => Ok(Self::rescaled_catenoid(grid, need("epsilon")?)),
            "compact_bump" => Ok(Self::compact_bump(
                grid,
                need("amplitude")?,
                params.get("center").copied().unwrap_or(0.0),
                need("width")?,
            )),
            "periodic_cos" => Ok(Self::periodic_cos(
                grid,
                params.get("offset").copied().unwrap_or(0.0),
                need("amplitude")?,
                need("period")?,
                params.get("phase").copied().unwrap_or(0.0),
            )),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }

    /// Tabulated potential: one `(t, value)` table per stack slot.
    /// `tables[0]` is the symmetric part, then cos1, sin1, cos2, sin2, ….
    pub fn tabulated(tables: Vec<Vec<(f64, f64)>>) -> Result<Self> {
        if tables.is_empty() || tables[0].len() < 2 {
            return Err(Error::Config("tabulated potential needs at least one table with two rows".into()));
        }
        let to_profile = |rows: &[(f64, f64)]| -> Result<Profile> {
            if rows.len() < 2 {
                return Err(Error::Config("tabulated mode needs at least two rows".into()));
            }
            let t0 = rows[0].0;
            let t1 = rows[rows.len() - 1].0;
            let grid = Grid::new(t0, t1, rows.len() - 1)?;
            let h = grid.h();
            for (i, row) in rows.iter().enumerate() {
                if (row.0 - grid.t(i)).abs() > 1e-6 * (1.0 + h) {
                    return Err(Error::Config(format!(
                        "tabulated t values are not uniformly spaced near row {i}"
                    )));
                }
            }
            Profile::sampled(grid, rows.iter().map(|r| r.1).collect())
        };
        let sym = to_profile(&tables[0])?;
        let base_grid = match sym.domain() {
            Some((a, b)) => Grid::new(a, b, tables[0].len() - 1)?,
            None => unreachable!(),
        };
        let mut waves = Vec::new();
        let mut iter = tables[1..].iter();
        while let Some(ct) = iter.next() {
            let c = to_profile(ct)?;
            let s = match iter.next() {
                Some(st) => to_profile(st)?,
                None => Profile::Zero,
            };
            waves.push((c, s));
        }
        Self::from_parts(base_grid, sym, waves, Some("tabulated".into()))
    }

    // ---- transforms ----------------------------------------------------

    /// Conformal change: `V ↦ e^{-2f(t)} V`, applied to every stack profile.
    pub fn conformal_transform(&self, f: &Profile) -> Result<Self> {
        let wrap = |p: &Profile, f: &Profile| -> Profile {
            if p.is_zero() {
                return Profile::Zero;
            }
            let p = p.clone();
            let f = f.clone();
            let pv = p.clone();
            let fv = f.clone();
            Profile::analytic(
                move |t| (-2.0 * fv.value(t)).exp() * pv.value(t),
                move |t| {
                    let e = (-2.0 * f.value(t)).exp();
                    e * (p.deriv(t) - 2.0 * f.deriv(t) * p.value(t))
                },
            )
        };
        let sym = wrap(&self.sym, f);
        let waves = self
            .waves
            .iter()
            .map(|(c, s)| (wrap(c, f), wrap(s, f)))
            .collect();
        Self::from_parts(self.grid.clone(), sym, waves, self.preset.clone())
    }

    /// Polar lift of a radial Euclidean potential: `Ṽ(t) = e^{2t} V(e^t)`.
    ///
    /// `c0` is the claimed decay constant in `|V(x)| <= c0 |x|^{-2}`; the lift
    /// is rejected if the grid sup of `|Ṽ|` exceeds it.
    pub fn polar_lift(
        c0: f64,
        sampler: impl Fn(f64) -> f64 + Send + Sync + 'static,
        grid: Grid,
    ) -> Result<Self> {
        let sampler = Arc::new(sampler);
        let s2 = sampler.clone();
        let value = move |t: f64| (2.0 * t).exp() * s2(t.exp());
        let hd = 1e-5;
        let v2 = value.clone();
        let deriv = move |t: f64| (v2(t + hd) - v2(t - hd)) / (2.0 * hd);
        let v = Self::from_parts(
            grid,
            Profile::analytic(value, deriv),
            vec![],
            Some("polar_lift".into()),
        )?;
        if v.sup_norm > c0 * (1.0 + 1e-9) + 1e-12 {
            return Err(Error::DecayBoundViolated {
                sup: v.sup_norm,
                c0,
            });
        }
        Ok(v)
    }

    /// `V + s·f` on the symmetric slot, for perturbation sweeps.
    pub fn add_scaled_sym(&self, f: &Profile, s: f64) -> Result<Self> {
        let base = self.sym.clone();
        let f1 = f.clone();
        let f2 = f.clone();
        let b2 = base.clone();
        let sym = Profile::analytic(
            move |t| base.value(t) + s * f1.value(t),
            move |t| b2.deriv(t) + s * f2.deriv(t),
        );
        Self::from_parts(self.grid.clone(), sym, self.waves.clone(), None)
    }
}
