use std::path::Path;

use anyhow::{Context, Result};
use serde_json::json;

use kink_core::discretize::assemble_lr_z;
use kink_core::evolution::{
    decomposition_check, grid_kink, stability_experiment, CrankNicolson, ExperimentConfig, Perturbation,
    PerturbationShape,
};
use kink_core::linalg::lowest_eigenpairs;
use kink_core::spectra::{self, GroundKind};
use kink_core::{GridSpec, KinkProfile, NonlinearityParams};

use crate::config::Settings;
use crate::output::{num, write_sidecar, Table};
use crate::{
    BlockArgs, CheckFailed, ConstrainedArgs, DecomposeArgs, EvolveArgs, Powers, ProfileArgs, ScanArgs, SpectrumArgs,
    XGrid, ZGrid,
};

const DECOMPOSITION_TOLERANCE: f64 = 1e-10;

fn kink(s: &Settings, powers: Powers) -> Result<KinkProfile> {
    let p = s.pick("p", powers.p, 2.0)?;
    let q = s.pick("q", powers.q, 4.0)?;
    let params = NonlinearityParams::new(p, q)?;
    Ok(if params.is_cubic_quintic() { KinkProfile::cubic_quintic() } else { KinkProfile::new(params)? })
}

fn x_grid(s: &Settings, g: XGrid, default: (f64, f64, usize)) -> Result<GridSpec> {
    let left = s.pick("x_min", g.x_min, default.0)?;
    let right = s.pick("x_max", g.x_max, default.1)?;
    let n = s.pick("n", g.n, default.2)?;
    Ok(GridSpec::x(left, right, n)?)
}

fn z_grid(s: &Settings, g: ZGrid) -> Result<GridSpec> {
    let d = GridSpec::default_z();
    let z_min = s.pick("z_min", g.z_min, d.left)?;
    let n = s.pick("n", g.n, d.intervals)?;
    Ok(GridSpec::z(z_min, n)?)
}

pub fn profile(s: &Settings, a: ProfileArgs, out: Option<&Path>) -> Result<()> {
    let k = kink(s, a.powers)?;
    let grid = x_grid(s, a.grid, (-20.0, 20.0, 400))?;
    let flags = s.finish()?;
    let mut t = Table::create(out, &["x", "phi", "phi_prime", "one_minus_phi_sq"])?;
    for x in grid.nodes() {
        t.numbers(&[x, k.phi(x), k.phi_prime(x), k.one_minus_phi_sq(x)])?;
    }
    t.finish()?;
    write_sidecar(out, "profile", flags, json!({ "grid": grid, "params": k.params() }))
}

pub fn spectrum(s: &Settings, a: SpectrumArgs, out: Option<&Path>) -> Result<()> {
    let r = s.pick("r", a.r, 0.2)?;
    let k = s.pick("k", a.k, 3)?;
    let grid = z_grid(s, a.grid)?;
    let eigenfunctions = s.pick_opt("eigenfunctions", a.eigenfunctions)?;
    let flags = s.finish()?;

    let op = assemble_lr_z(r, &grid)?;
    let pairs = lowest_eigenpairs(&op, k)?;
    let mut t = Table::create(out, &["k", "lambda", "bisection_lambda", "residual", "sign_changes"])?;
    for (i, p) in pairs.iter().enumerate() {
        t.row([
            (i + 1).to_string(),
            num(p.value),
            num(p.bisection_value),
            num(p.residual),
            p.sign_changes.to_string(),
        ])?;
    }
    t.finish()?;

    if let Some(path) = &eigenfunctions {
        let table = spectra::eigenfunctions(r, &grid, k)?;
        let mut header = vec!["z".to_string(), "x".to_string()];
        header.extend((1..=k).map(|i| format!("v{i}")));
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut t = Table::create(Some(path), &header)?;
        for i in 0..table.z.len() {
            let mut row = vec![table.z[i], table.x[i]];
            row.extend(table.vectors.iter().map(|v| v[i]));
            t.numbers(&row)?;
        }
        t.finish().with_context(|| format!("writing {}", path.display()))?;
    }
    write_sidecar(out, "spectrum", flags, json!({ "grid": grid, "eigenpairs": pairs }))
}

pub fn criterion_scan(s: &Settings, a: ScanArgs, out: Option<&Path>) -> Result<()> {
    let r_min = s.pick("r_min", a.r_min, -6.0)?;
    let r_max = s.pick("r_max", a.r_max, 6.0)?;
    let r_step = s.pick("r_step", a.r_step, 0.25)?;
    let grid = z_grid(s, a.grid)?;
    let flags = s.finish()?;

    let rs = spectra::r_ladder(r_min, r_max, r_step)?;
    let rows = spectra::criterion_scan(&rs, &grid);
    let mut t = Table::create(out, &["R", "z_R", "lambda1", "lambda2", "lambda3", "F0", "product"])?;
    let mut failures = Vec::new();
    for row in &rows {
        match &row.outcome {
            Ok(c) => t.numbers(&[c.r, c.z_r, c.lambda1, c.lambda2, c.lambda3, c.f0, c.product])?,
            Err(e) => {
                eprintln!("R = {}: {e}", row.r);
                failures.push(json!({ "R": row.r, "error": e.to_string() }));
            }
        }
    }
    t.finish()?;
    let failed = failures.len();
    write_sidecar(out, "criterion-scan", flags, json!({ "grid": grid, "rows": rows.len(), "failures": failures }))?;
    if failed > 0 {
        return Err(CheckFailed(format!("{failed} of {} rows failed", rows.len())).into());
    }
    Ok(())
}

pub fn constrained(s: &Settings, a: ConstrainedArgs, out: Option<&Path>) -> Result<()> {
    let r = s.pick("r", a.r, 0.2)?;
    let grid = z_grid(s, a.grid)?;
    let flags = s.finish()?;
    let g = spectra::constrained_ground_eigenvalue(r, &grid)?;
    let kind = match g.kind {
        GroundKind::Root => "root",
        GroundKind::ContinuumEdge => "continuum-edge",
    };
    let mut t = Table::create(out, &["R", "lambda0", "kind", "F_at_lambda0", "lambda1", "lambda2", "F0"])?;
    t.row([
        num(g.r),
        num(g.lambda0),
        kind.to_string(),
        num(g.f_at_lambda0),
        num(g.lambda1),
        num(g.lambda2),
        num(g.f0),
    ])?;
    t.finish()?;
    write_sidecar(out, "constrained-eigenvalue", flags, json!({ "grid": grid, "result": g }))
}

pub fn block_spectrum(s: &Settings, a: BlockArgs, out: Option<&Path>) -> Result<()> {
    let k = kink(s, a.powers)?;
    let grid = x_grid(s, a.grid, (-20.0, 20.0, 2000))?;
    let flags = s.finish()?;
    let bs = spectra::block_spectrum(&k, &grid)?;
    let mut t = Table::create(out, &["re", "im"])?;
    for (re, im) in &bs.eigenvalues {
        t.numbers(&[*re, *im])?;
    }
    t.finish()?;
    let summary = json!({
        "grid": grid,
        "params": k.params(),
        "count": bs.eigenvalues.len(),
        "max_abs_re": bs.max_abs_re,
        "min_mu_raw": bs.min_mu_raw,
        "matrix_norm": bs.matrix_norm,
        "lowest_mu": &bs.mu[..bs.mu.len().min(8)],
        "lplus_min": bs.lplus_min,
        "lplus_clipped": bs.lplus_clipped,
        "lplus_negative": bs.lplus_negative,
        "lminus_negative": bs.lminus_negative,
        "kernel_modes": bs.kernel_modes,
        "unstable": bs.unstable,
    });
    write_sidecar(out, "block-spectrum", flags, summary)?;
    if bs.unstable {
        return Err(CheckFailed(format!(
            "reduced matrix has mu = {:e} below -1e-8 * {:e}",
            bs.min_mu_raw, bs.matrix_norm
        ))
        .into());
    }
    Ok(())
}

pub fn evolve(s: &Settings, a: EvolveArgs, out: Option<&Path>) -> Result<()> {
    let delta = s.pick("delta", a.delta, 0.01)?;
    let shape_name = s.pick("shape", a.shape, PerturbationShape::GaussianRe.name().to_string())?;
    let shape = PerturbationShape::parse(&shape_name)?;
    let mut cfg = ExperimentConfig::new(delta, shape);
    cfg.t_final = s.pick("t_final", a.t_final, cfg.t_final)?;
    cfg.dt = s.pick("dt", a.dt, cfg.dt)?;
    cfg.r = s.pick("r", a.r, cfg.r)?;
    cfg.log_every = s.pick("log_every", a.log_every, cfg.log_every)?;
    let k = kink(s, a.powers)?;
    let d = GridSpec::default_evolution();
    cfg.grid = x_grid(s, a.grid, (d.left, d.right, d.intervals))?;
    let flags = s.finish()?;

    let rep = stability_experiment(&k, &cfg)?;
    let mut t = Table::create(out, &["t", "energy", "rho_modulated", "alpha", "beta", "eta_sup"])?;
    for r in &rep.rows {
        t.numbers(&[r.t, r.energy, r.rho_modulated, r.alpha, r.beta, r.eta_sup])?;
    }
    t.finish()?;
    eprintln!(
        "max rho/delta^2 = {:.6}, energy drift = {:.3e}, max constraint = {:.3e}",
        rep.ratio, rep.energy_drift, rep.max_constraint
    );
    let summary = json!({
        "grid": cfg.grid,
        "params": k.params(),
        "amplitude": rep.amplitude,
        "rho_initial": rep.rho_initial,
        "ratio": rep.ratio,
        "energy_drift": rep.energy_drift,
        "max_constraint": rep.max_constraint,
        "eta_ratio": rep.eta_ratio,
        "x1_growth": rep.x1_growth,
        "rho_raw_final": rep.rows.last().map(|r| r.rho_raw),
    });
    write_sidecar(out, "evolve", flags, summary)
}

pub fn decompose(s: &Settings, a: DecomposeArgs, out: Option<&Path>) -> Result<()> {
    let r = s.pick("r", a.r, 1.0)?;
    let seed = s.pick("seed", a.seed, 0)?;
    let count = s.pick("count", a.count, 20)?;
    let amplitude = s.pick("amplitude", a.amplitude, 0.05)?;
    let k = kink(s, a.powers)?;
    let grid = x_grid(s, a.grid, (-20.0, 20.0, 20000))?;
    let flags = s.finish()?;

    let header = ["seed", "lhs", "rhs_split", "rhs_global", "rel_mismatch_split", "rel_mismatch_global"];
    let mut t = Table::create(out, &header)?;
    let mut worst = 0.0f64;
    for sd in seed..seed + count {
        let p = Perturbation::random_smooth(grid, sd, amplitude)?;
        let rep = decomposition_check(&k, &p, r)?;
        worst = worst.max(rep.rel_mismatch_split).max(rep.rel_mismatch_global);
        t.row([
            sd.to_string(),
            num(rep.lhs),
            num(rep.rhs_split),
            num(rep.rhs_global),
            num(rep.rel_mismatch_split),
            num(rep.rel_mismatch_global),
        ])?;
    }
    t.finish()?;
    write_sidecar(out, "decompose-check", flags, json!({ "grid": grid, "params": k.params(), "worst": worst }))?;
    if !(worst < DECOMPOSITION_TOLERANCE) {
        return Err(CheckFailed(format!("relative mismatch {worst:e} exceeds {DECOMPOSITION_TOLERANCE:e}")).into());
    }
    Ok(())
}

fn check(name: &str, pass: bool, detail: String) -> bool {
    println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

pub fn selftest() -> Result<()> {
    let mut ok = true;
    let k = KinkProfile::cubic_quintic();

    let row = spectra::criterion_row(0.2, &GridSpec::z(-10.0, 4000)?)?;
    ok &= check(
        "criterion",
        row.lambda1 < 0.0 && row.f0 < 0.0 && row.lambda2 > 0.99,
        format!("R=0.2: lambda1 {:.6}, lambda2 {:.6}, F0 {:.6}", row.lambda1, row.lambda2, row.f0),
    );

    let grid = GridSpec::x(-20.0, 20.0, 1000)?;
    let gk = grid_kink(&k, &grid)?;
    let s0 = gk.state(grid)?;
    let cn = CrankNicolson::for_state(*k.params(), 0.01, &s0)?;
    let mut st = s0.clone();
    for _ in 0..100 {
        cn.step(&mut st)?;
    }
    let drift = st.max_distance(&s0);
    ok &= check("stationary kink", drift < 1e-8, format!("sup change after t=1: {drift:.2e}"));

    let p = Perturbation::random_smooth(GridSpec::x(-20.0, 20.0, 4000)?, 1, 0.05)?;
    let rep = decomposition_check(&k, &p, 1.0)?;
    ok &= check(
        "energy decomposition",
        rep.rel_mismatch_split < DECOMPOSITION_TOLERANCE && rep.rel_mismatch_global < DECOMPOSITION_TOLERANCE,
        format!("mismatch {:.2e} / {:.2e}", rep.rel_mismatch_split, rep.rel_mismatch_global),
    );

    let prm = NonlinearityParams::new(2.0, 5.0)?;
    let general = KinkProfile::new(prm)?;
    let worst = (0..=200)
        .map(|i| -10.0 + 0.1 * i as f64)
        .map(|x| {
            let (f, d) = (general.phi(x), general.phi_prime(x));
            (d * d - f * f * prm.g(f)).abs()
        })
        .fold(0.0, f64::max);
    ok &= check("general profile", worst < 1e-10, format!("(2,5) first-order invariant {worst:.2e}"));

    if !ok {
        return Err(CheckFailed("self-test failed".into()).into());
    }
    Ok(())
}
