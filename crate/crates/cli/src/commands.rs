use anyhow::{anyhow, bail, Result};
use qes_core::heun::{evaluate_r, SeriesCoefficients};
use qes_core::model::{r_of_x, x_of_r};
use qes_core::validation::{self, ValidationConfig};
use qes_core::{Execution, LevelSet, Quantizer};

use crate::config::RunConfig;
use crate::output::{Cell, Table};

/// Default sampling extent in the dimensionless variable; the Gaussian factor is below 1e-14 there.
const WAVEFUNCTION_X_MAX: f64 = 8.0;

fn quantizer(cfg: &RunConfig) -> Quantizer {
    Quantizer::new(cfg.convention).with_ground_mode(cfg.allow_n0)
}

fn solve(cfg: &RunConfig) -> Result<Vec<LevelSet>> {
    let m = cfg.m()?;
    Ok(quantizer(cfg).solve_sweep(&cfg.n, &cfg.l, &cfg.k, cfg.omega_rot, m, cfg.alpha, cfg.mu, Execution::default())?)
}

pub fn spectrum(cfg: &RunConfig) -> Result<Table> {
    let sets = solve(cfg)?;
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for set in &sets {
        for lvl in &set.levels {
            rows.push(vec![
                Cell::Int(lvl.n as i64),
                Cell::Int(lvl.l),
                Cell::Num(lvl.k),
                Cell::Num(lvl.omega_nl),
                Cell::Num(lvl.b0_nl),
                Cell::Num(lvl.beta_root),
                Cell::Text(lvl.branch.to_string()),
                Cell::Int(lvl.nodes as i64),
                Cell::Num(lvl.energy),
            ]);
        }
        if !set.complex_betabar.is_empty() {
            notes
                .push(format!("n={} l={} non-physical complex betabar roots: {:?}", set.n, set.l, set.complex_betabar));
        }
    }
    for note in &notes {
        eprintln!("{note}");
    }
    Ok(Table {
        header: format!("qes spectrum {}", cfg.summary()),
        columns: vec!["n", "l", "k", "omega_nl", "B0_nl", "beta", "branch", "nodes", "energy"],
        rows,
    })
}

pub fn bfield(cfg: &RunConfig) -> Result<Table> {
    let m = cfg.m()?;
    let q = quantizer(cfg);
    let mut rows = Vec::new();
    for &n in &cfg.n {
        for &l in &cfg.l {
            let omega = q.frequency_condition(n, l, cfg.omega_rot, m)?;
            let b0 = q.magnetic_field_quantized(n, l, cfg.omega_rot, m, cfg.alpha, cfg.mu)?;
            rows.push(vec![Cell::Int(n as i64), Cell::Int(l), Cell::Num(omega), Cell::Num(b0)]);
        }
    }
    Ok(Table { header: format!("qes bfield {}", cfg.summary()), columns: vec!["n", "l", "omega_nl", "B0_nl"], rows })
}

pub fn wavefunction(cfg: &RunConfig, root: usize, samples: usize) -> Result<Table> {
    if samples < 2 {
        bail!("need at least 2 samples");
    }
    let m = cfg.m()?;
    let (n, l, k) = (cfg.n[0], cfg.l[0], cfg.k[0]);
    let set = quantizer(cfg).solve_levels(n, l, k, cfg.omega_rot, m, cfg.alpha, cfg.mu)?;
    let lvl = set.levels.get(root).ok_or_else(|| {
        let available: Vec<String> = set
            .levels
            .iter()
            .map(|l| format!("root {} (branch {}, beta {})", l.root_index, l.branch, l.beta_root))
            .collect();
        anyhow!("no level with root index {root} for n={n} l={l}; available: {}", available.join("; "))
    })?;
    let r_max = match cfg.r_max {
        Some(r) => r,
        None => r_of_x(WAVEFUNCTION_X_MAX + n as f64 + l.unsigned_abs() as f64 / 2.0, m, lvl.omega_nl)?,
    };
    let coeffs = SeriesCoefficients::polynomial(lvl.heun_coeffs.clone());
    let mut rows = Vec::with_capacity(samples);
    for i in 0..samples {
        let r = r_max * i as f64 / (samples - 1) as f64;
        let x = x_of_r(r, m, lvl.omega_nl)?;
        let value = evaluate_r(&coeffs, x, lvl.lambda_dim, l)?.value;
        rows.push(vec![Cell::Num(r), Cell::Num(x), Cell::Num(value)]);
    }
    Ok(Table {
        header: format!(
            "qes wavefunction {} level: n={n} l={l} k={k} root={root} branch={} beta={} energy={} nodes={}",
            cfg.summary(),
            lvl.branch,
            lvl.beta_root,
            lvl.energy,
            lvl.nodes
        ),
        columns: vec!["r", "x", "R"],
        rows,
    })
}

/// Returns the report table and whether every check passed.
pub fn validate(cfg: &RunConfig, checks: &[u32]) -> Result<(Table, bool)> {
    let vc = ValidationConfig {
        m: cfg.m()?,
        omega_rot: cfg.omega_rot,
        alpha: cfg.alpha,
        mu: cfg.mu,
        n_pts: cfg.n_pts,
        r_max: cfg.r_max,
        refine: cfg.refine,
        convention: cfg.convention,
        exec: Execution::default(),
    };
    let report = validation::run(&vc, checks);
    let rows = report
        .checks
        .iter()
        .map(|c| {
            vec![
                Cell::Int(c.id as i64),
                Cell::Text(c.name.to_string()),
                Cell::Bool(c.passed),
                Cell::Num(c.measured),
                Cell::Num(c.tolerance),
                Cell::Num(c.wall_time_s),
                Cell::Text(c.detail.clone()),
            ]
        })
        .collect();
    Ok((
        Table {
            header: format!("qes validate {}", cfg.summary()),
            columns: vec!["id", "check", "passed", "measured", "tolerance", "wall_time_s", "detail"],
            rows,
        },
        report.all_passed(),
    ))
}
