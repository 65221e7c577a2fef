//! Batch front end: build potentials from presets or config files, run
//! evolution / verification / Poincaré / catenoid suites, and write CSV data
//! plus a deterministic JSON summary.
//!
//! Exit codes: 0 when every check holds, 2 when any inequality is violated,
//! 1 on usage or runtime errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cylmode::config::{parse_cauchy_data, parse_config, FieldSpec, RunConfig};
use cylmode::report::fmt_float;
use cylmode::runner;

#[derive(Parser)]
#[command(name = "cylmode", version, about = "Fourier-mode verification toolkit for Schrodinger operators on flat cylinders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Config file (sectioned key = value); flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Left end of the t-grid.
    #[arg(long, allow_negative_numbers = true)]
    t0: Option<f64>,
    /// Right end of the t-grid.
    #[arg(long, short = 'T', visible_alias = "T", allow_negative_numbers = true)]
    t1: Option<f64>,
    /// Grid step.
    #[arg(long)]
    h: Option<f64>,
    /// Circle basis truncation (largest wave number).
    #[arg(long)]
    kmax: Option<usize>,
    /// Potential preset: zero | constant | catenoid | rescaled_catenoid |
    /// compact_bump | periodic_cos | tabulated.
    #[arg(long)]
    preset: Option<String>,
    /// Preset parameter `key=value` (repeatable).
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Table file for `--preset tabulated` (repeatable; stack order).
    #[arg(long = "table", value_name = "FILE")]
    tables: Vec<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Catenoid closed form: N1 | N2 | N3 | k0_growing | k1_growing | k1_decaying.
    #[arg(long)]
    field: Option<String>,
    /// Separable mode wave number (V = 0 exponential field).
    #[arg(long)]
    k: Option<usize>,
    /// Separable mode growth rate.
    #[arg(long, allow_negative_numbers = true)]
    rate: Option<f64>,
    /// Cauchy data `mode:a:b;mode:a:b;…` evolved under the potential.
    #[arg(long)]
    cauchy: Option<String>,
    /// Seeded random battery field.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Print the circle basis eigenvalues and clusters.
    Basis(CommonArgs),
    /// Evolve a field and write its mode coefficients.
    Evolve {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Write the slice energy profile (I, J, splits, frequency).
    Profile {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        field: FieldArgs,
        /// Frequency cut m ("auto" picks the first ledger gap).
        #[arg(long, default_value = "auto")]
        m: String,
    },
    /// Run every identity and inequality check on one field.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        field: FieldArgs,
        /// Frequency cut m ("auto" picks the first ledger gap).
        #[arg(long, default_value = "auto")]
        m: String,
        /// Growth exponent ("auto" measures log I(T)/I(0) / T).
        #[arg(long, default_value = "auto")]
        alpha: String,
        /// Kappa handed to the alpha-bar selection.
        #[arg(long)]
        kappa: Option<f64>,
        /// Normalized margin tolerance.
        #[arg(long)]
        tol_margin: Option<f64>,
        /// Normalized identity-residual tolerance.
        #[arg(long)]
        tol_identity: Option<f64>,
    },
    /// Compute one per-mode Poincare map.
    Poincare {
        #[command(flatten)]
        common: CommonArgs,
        /// Mode eigenvalue λ.
        #[arg(long)]
        lambda: Option<f64>,
        /// Interval endpoints.
        #[arg(long, num_args = 2, value_names = ["T1", "T2"])]
        span: Option<Vec<f64>>,
    },
    /// Catenoid bound-state scan in both θ-channels.
    Catenoid {
        #[command(flatten)]
        common: CommonArgs,
        /// Scan band endpoints inside (-1, 0).
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
        scan: Option<Vec<f64>>,
        /// Number of scan points.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Poincare-map perturbation derivative and hyperbolization.
    Perturb {
        #[command(flatten)]
        common: CommonArgs,
        /// Mode eigenvalue λ.
        #[arg(long)]
        lambda: Option<f64>,
        /// Period length.
        #[arg(long)]
        ell: Option<f64>,
    },
}

fn apply_common(cfg: &mut RunConfig, c: &CommonArgs) -> Result<(), String> {
    if let Some(path) = &c.config {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        *cfg = parse_config(&text).map_err(|e| e.to_string())?;
    }
    if let Some(t0) = c.t0 {
        cfg.grid_t0 = t0;
    }
    if let Some(t1) = c.t1 {
        cfg.grid_t1 = t1;
    }
    if let Some(h) = c.h {
        cfg.grid_h = h;
    }
    if let Some(k) = c.kmax {
        cfg.basis_kmax = k;
    }
    if let Some(p) = &c.preset {
        cfg.preset = p.clone();
    }
    for p in &c.params {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| format!("--param `{p}` is not KEY=VALUE"))?;
        let v: f64 = v.trim().parse().map_err(|_| format!("--param `{p}`: bad number"))?;
        cfg.params.insert(k.trim().to_string(), v);
    }
    if !c.tables.is_empty() {
        cfg.tables = c.tables.clone();
    }
    if let Some(out) = &c.out {
        cfg.out_dir = out.clone();
    }
    Ok(())
}

fn apply_field(cfg: &mut RunConfig, f: &FieldArgs) -> Result<(), String> {
    if let Some(label) = &f.field {
        cfg.field = FieldSpec::ClosedForm(label.clone());
    } else if let Some(data) = &f.cauchy {
        cfg.field = FieldSpec::Cauchy(parse_cauchy_data(data).map_err(|e| e.to_string())?);
    } else if let Some(seed) = f.seed {
        cfg.field = FieldSpec::Seeded { seed, k_theta: 0 };
    } else if f.k.is_some() || f.rate.is_some() {
        cfg.field = FieldSpec::Separable {
            k: f.k.unwrap_or(1),
            rate: f.rate.unwrap_or(1.0),
        };
    }
    Ok(())
}

fn parse_auto_usize(name: &str, raw: &str) -> Result<Option<usize>, String> {
    if raw == "auto" {
        Ok(None)
    } else {
        raw.parse()
            .map(Some)
            .map_err(|_| format!("--{name} must be `auto` or an integer"))
    }
}

fn parse_auto_f64(name: &str, raw: &str) -> Result<Option<f64>, String> {
    if raw == "auto" {
        Ok(None)
    } else {
        raw.parse()
            .map(Some)
            .map_err(|_| format!("--{name} must be `auto` or a number"))
    }
}

fn build_config(cmd: &Command) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    match cmd {
        Command::Basis(common) => {
            apply_common(&mut cfg, common)?;
            cfg.command = "basis".into();
        }
        Command::Evolve { common, field } => {
            apply_common(&mut cfg, common)?;
            apply_field(&mut cfg, field)?;
            cfg.command = "evolve".into();
        }
        Command::Profile { common, field, m } => {
            apply_common(&mut cfg, common)?;
            apply_field(&mut cfg, field)?;
            cfg.command = "profile".into();
            cfg.m_cut = parse_auto_usize("m", m)?;
        }
        Command::Verify {
            common,
            field,
            m,
            alpha,
            kappa,
            tol_margin,
            tol_identity,
        } => {
            apply_common(&mut cfg, common)?;
            apply_field(&mut cfg, field)?;
            cfg.command = "verify".into();
            cfg.m_cut = parse_auto_usize("m", m)?;
            cfg.alpha = parse_auto_f64("alpha", alpha)?;
            if let Some(k) = kappa {
                cfg.kappa = *k;
            }
            if let Some(t) = tol_margin {
                cfg.tol_margin = *t;
            }
            if let Some(t) = tol_identity {
                cfg.tol_identity = *t;
            }
        }
        Command::Poincare { common, lambda, span } => {
            apply_common(&mut cfg, common)?;
            cfg.command = "poincare".into();
            if let Some(l) = lambda {
                cfg.lambda = *l;
            }
            if let Some(s) = span {
                cfg.span = (s[0], s[1]);
            }
            // Widen the potential grid to cover the requested span.
            cfg.grid_t0 = cfg.grid_t0.min(cfg.span.0);
            cfg.grid_t1 = cfg.grid_t1.max(cfg.span.1);
        }
        Command::Catenoid { common, scan, steps } => {
            apply_common(&mut cfg, common)?;
            cfg.command = "catenoid".into();
            cfg.preset = "catenoid".into();
            if let Some(s) = scan {
                cfg.scan = (s[0], s[1]);
            }
            if let Some(n) = steps {
                cfg.scan_steps = *n;
            }
            if cfg.grid_t1 < 6.0 {
                cfg.grid_t1 = 6.0;
            }
        }
        Command::Perturb { common, lambda, ell } => {
            apply_common(&mut cfg, common)?;
            cfg.command = "perturb".into();
            if let Some(l) = lambda {
                cfg.lambda = *l;
            }
            if let Some(e) = ell {
                cfg.ell = *e;
            }
            cfg.grid_t0 = cfg.grid_t0.min(0.0);
            cfg.grid_t1 = cfg.grid_t1.max(cfg.ell);
        }
    }
    Ok(cfg)
}

fn run(cmd: &Command) -> Result<bool, String> {
    let cfg = build_config(cmd)?;
    let artifacts = runner::run(&cfg).map_err(|e| e.to_string())?;
    for (name, contents) in &artifacts.files {
        let path = cfg.out_dir.join(name);
        cylmode::report::write_file(&path, contents).map_err(|e| e.to_string())?;
    }
    for rep in &artifacts.reports {
        println!(
            "{} {:<34} margin {:>18} at t = {}",
            if rep.holds { "PASS" } else { "FAIL" },
            rep.name,
            fmt_float(rep.worst_margin),
            fmt_float(rep.worst_t),
        );
        for note in &rep.notes {
            println!("     note: {note}");
        }
    }
    println!(
        "{} report(s) written to {}",
        artifacts.reports.len(),
        cfg.out_dir.display()
    );
    Ok(artifacts.all_hold)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are not errors.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
