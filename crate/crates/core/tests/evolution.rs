use kink_core::evolution::{
    decomposition_check, discrete_energy, energy, eta, eta_sup_check, grid_kink, modulation_fit, modulation_residual,
    rho_r, rho_r_modulated, stability_experiment, step_cn, x1_norm, CrankNicolson, ExperimentConfig, FieldState,
    Perturbation, PerturbationShape,
};
use kink_core::linalg::simpson;
use kink_core::{GridSpec, KinkProfile, NonlinearityParams};
use num_complex::Complex64;

fn kink() -> KinkProfile {
    KinkProfile::cubic_quintic()
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

#[test]
fn energy_examples() {
    let k = kink();
    let prm = NonlinearityParams::cubic_quintic();
    let grid = GridSpec::x(-20.0, 20.0, 40000).unwrap();
    let s = FieldState::sampled_kink(&k, grid).unwrap();
    let twice: Vec<f64> = grid.nodes().iter().map(|&x| 2.0 * k.phi_prime(x).powi(2)).collect();
    assert!((energy(&s, &prm) - simpson(&twice, grid.h()).unwrap()).abs() < 1e-10);
    // int 2 phi'^2 = 1/2 in closed form
    assert!((energy(&s, &prm) - 0.5).abs() < 1e-9);

    for c in [0.0, 1.0] {
        let s = FieldState::from_fn(grid, |_| real(c)).unwrap();
        assert!(energy(&s, &prm).abs() < 1e-14);
        assert!(discrete_energy(&s, &prm).abs() < 1e-14);
    }
}

#[test]
fn distance_examples() {
    let k = kink();
    let grid = GridSpec::default_evolution();
    let s = FieldState::sampled_kink(&k, grid).unwrap();
    assert!(rho_r(&s, &k, 1.0).abs() < 1e-14);
    assert!(rho_r(&s.gauge(0.1), &k, 1.0) > 1e-3);
    assert!(rho_r_modulated(&s.gauge(0.1), &k, 1.0, -0.1, 0.0) < 1e-14);

    // a pure phase twist leaves the modulus untouched
    let tail = FieldState::from_fn(grid, |x| {
        let bump = (-(x - 20.0) * (x - 20.0)).exp();
        real(k.phi(x)) * Complex64::from_polar(1.0, 0.3 * bump)
    })
    .unwrap();
    let e = eta(&tail, &k);
    assert!(e.iter().all(|v| v.abs() < 1e-15));
}

#[test]
fn eta_examples() {
    let k = kink();
    let grid = GridSpec::default_evolution();
    let s = FieldState::sampled_kink(&k, grid).unwrap();
    assert!(eta(&s, &k).iter().all(|v| *v == 0.0));
    let shifted = FieldState::from_fn(grid, |x| real(k.phi(x) + 0.01)).unwrap();
    for (x, e) in grid.nodes().iter().zip(eta(&shifted, &k)) {
        assert!((e - (0.02 * k.phi(*x) + 1e-4)).abs() < 1e-15);
    }
    assert!((eta_sup_check(&shifted, &k, 1.0) - (0.02 + 1e-4)).abs() < 1e-10);
}

#[test]
fn modulation_recovers_orbit_point() {
    let k = kink();
    let grid = GridSpec::default_evolution();
    let (a0, b0) = (0.05, 0.1);
    let s = FieldState::from_fn(grid, |x| Complex64::from_polar(k.phi(x - b0), -a0)).unwrap();
    let fit = modulation_fit(&s, &k, 1.0, (0.0, 0.0)).unwrap();
    assert!((fit.alpha - a0).abs() < 1e-8 && (fit.beta - b0).abs() < 1e-8, "{fit:?}");
    assert!(fit.constraint_real.abs() < 1e-9 && fit.constraint_imag.abs() < 1e-9);

    let at_kink = modulation_fit(&FieldState::sampled_kink(&k, grid).unwrap(), &k, 1.0, (0.0, 0.0)).unwrap();
    assert!(at_kink.alpha.abs() < 1e-12 && at_kink.beta.abs() < 1e-12);
}

#[test]
fn modulation_jacobian_at_the_kink_is_antidiagonal() {
    let k = kink();
    let grid = GridSpec::default_evolution();
    let s = FieldState::sampled_kink(&k, grid).unwrap();
    let m = modulation_residual(&s, &k, 1.0, 0.0, 0.0).unwrap();
    assert!(m.jacobian[0][0].abs() < 1e-14 && m.jacobian[1][1].abs() < 1e-14);
    // ||phi'||^2 = int phi^2 (1 - phi^2)^2 = 1/4
    assert!((m.jacobian[0][1] - 0.25).abs() < 1e-8);
    let pot = k.potentials(1.0);
    let h_r: Vec<f64> = grid.nodes().iter().map(|&x| k.phi(x).powi(2) * pot.w_r(x)).collect();
    assert!((m.jacobian[1][0] - simpson(&h_r, grid.h()).unwrap()).abs() < 1e-12);
}

#[test]
fn modulation_jacobian_matches_finite_differences() {
    let k = kink();
    let grid = GridSpec::default_evolution();
    let s = FieldState::from_fn(grid, |x| {
        let g = (-(x - 0.5) * (x - 0.5)).exp();
        Complex64::new(k.phi(x) + 0.03 * g, 0.02 * g * x)
    })
    .unwrap();
    let (a, b) = (0.07, -0.2);
    let m = modulation_residual(&s, &k, 1.0, a, b).unwrap();
    let step = 1e-6;
    for (j, (da, db)) in [(step, 0.0), (0.0, step)].into_iter().enumerate() {
        let p = modulation_residual(&s, &k, 1.0, a + da, b + db).unwrap().value;
        let q = modulation_residual(&s, &k, 1.0, a - da, b - db).unwrap().value;
        for i in 0..2 {
            let fd = (p[i] - q[i]) / (2.0 * step);
            let scale = m.jacobian[i][j].abs().max(1e-3);
            assert!((fd - m.jacobian[i][j]).abs() < 1e-6 * scale.max(1.0), "({i},{j}): {fd} vs {}", m.jacobian[i][j]);
        }
    }
    assert!(modulation_residual(&s, &k, 1.0, 0.0, 50.0).is_err());
}

#[test]
fn grid_kink_is_stationary_and_gauge_covariant() {
    let k = kink();
    let prm = NonlinearityParams::cubic_quintic();
    let grid = GridSpec::default_evolution();
    let gk = grid_kink(&k, &grid).unwrap();
    assert!(gk.max_residual < 1e-10);
    let s0 = gk.state(grid).unwrap().gauge(0.7);
    let cn = CrankNicolson::for_state(prm, 0.01, &s0).unwrap();
    let mut s = s0.clone();
    for _ in 0..1000 {
        cn.step(&mut s).unwrap();
    }
    assert!((s.t - 10.0).abs() < 1e-9);
    assert!(s.max_distance(&s0) < 1e-6);
}

#[test]
fn evolution_commutes_with_gauge() {
    let k = kink();
    let prm = NonlinearityParams::cubic_quintic();
    let grid = GridSpec::default_evolution();
    let s0 = FieldState::from_fn(grid, |x| real(k.phi(x)) + Complex64::new(0.05, 0.02) * (-(x * x)).exp()).unwrap();
    let theta = 1.3;
    let cn = CrankNicolson::for_state(prm, 0.01, &s0).unwrap();
    let (mut a, mut b) = (s0.clone(), s0.gauge(theta));
    for _ in 0..200 {
        cn.step(&mut a).unwrap();
        cn.step(&mut b).unwrap();
    }
    assert!(a.gauge(theta).max_distance(&b) < 1e-10);
}

#[test]
fn evolution_commutes_with_grid_shifts() {
    let prm = NonlinearityParams::cubic_quintic();
    let grid = GridSpec::x(-20.0, 20.0, 2000).unwrap();
    let h = grid.h();
    let shift = 37;
    let bump = |x: f64| Complex64::new(0.6, 0.1 * x) * (-(x + 3.0) * (x + 3.0)).exp();
    let mut a = FieldState::from_fn(grid, bump).unwrap();
    let mut b = FieldState::from_fn(grid, |x| bump(x - shift as f64 * h)).unwrap();
    let cn = CrankNicolson::for_state(prm, 0.01, &a).unwrap();
    for _ in 0..100 {
        cn.step(&mut a).unwrap();
        cn.step(&mut b).unwrap();
    }
    let worst = (200..grid.len() - 200 - shift).map(|i| (a.psi[i] - b.psi[i + shift]).norm()).fold(0.0, f64::max);
    assert!(worst < 1e-10, "{worst:e}");
}

#[test]
fn time_reversal_round_trip() {
    let k = kink();
    let prm = NonlinearityParams::cubic_quintic();
    let grid = GridSpec::default_evolution();
    let s0 = FieldState::from_fn(grid, |x| real(k.phi(x)) + Complex64::new(0.0, 0.02) * (-(x * x)).exp()).unwrap();
    let cn = CrankNicolson::for_state(prm, 0.02, &s0).unwrap();
    let mut s = s0.clone();
    for _ in 0..100 {
        cn.step(&mut s).unwrap();
    }
    assert!(s.max_distance(&s0) > 1e-4);
    for _ in 0..100 {
        cn.step_back(&mut s).unwrap();
    }
    assert!(s.max_distance(&s0) < 1e-8);
    assert!(s.t.abs() < 1e-12);
}

#[test]
fn step_cn_wraps_the_integrator() {
    let prm = NonlinearityParams::cubic_quintic();
    let grid = GridSpec::x(-10.0, 10.0, 400).unwrap();
    let s0 = FieldState::from_fn(grid, |x| Complex64::new(0.3, 0.0) * (-(x * x)).exp()).unwrap();
    let one = step_cn(&s0, 0.01, &prm).unwrap();
    let mut two = s0.clone();
    CrankNicolson::for_state(prm, 0.01, &s0).unwrap().step(&mut two).unwrap();
    assert_eq!(one, two);
    assert!(step_cn(&s0, 0.5, &prm).is_err());
    assert!(step_cn(&s0, 0.0, &prm).is_err());
}

#[test]
fn energy_drift_shrinks_with_dt() {
    let k = kink();
    let prm = NonlinearityParams::cubic_quintic();
    let grid = GridSpec::x(-30.0, 30.0, 2048).unwrap();
    let s0 = FieldState::from_fn(grid, |x| real(k.phi(x)) + Complex64::new(0.2, 0.1) * (-(x * x)).exp()).unwrap();
    let drift = |dt: f64| {
        let cn = CrankNicolson::for_state(prm, dt, &s0).unwrap();
        let e0 = discrete_energy(&s0, &prm);
        let mut s = s0.clone();
        let mut worst = 0.0f64;
        for _ in 0..(2.0 / dt).round() as usize {
            cn.step(&mut s).unwrap();
            worst = worst.max((discrete_energy(&s, &prm) - e0).abs());
        }
        worst
    };
    let (a, b) = (drift(0.04), drift(0.02));
    assert!(a / b > 3.4, "{a:e} {b:e}");
}

#[test]
fn field_validation() {
    let grid = GridSpec::x(-1.0, 1.0, 32).unwrap();
    assert!(FieldState::new(grid, vec![real(0.0); 32], 0.0).is_err());
    assert!(FieldState::new(grid, vec![real(f64::NAN); 33], 0.0).is_err());
    assert!(FieldState::new(GridSpec::z(-1.0, 32).unwrap(), vec![real(0.0); 33], 0.0).is_err());
}

#[test]
fn decomposition_examples() {
    let k = kink();
    let grid = GridSpec::x(-20.0, 20.0, 20000).unwrap();
    let zero = decomposition_check(&k, &Perturbation::zero(grid), 1.0).unwrap();
    assert_eq!((zero.lhs, zero.rhs_split, zero.rhs_global), (0.0, 0.0, 0.0));

    let eps = 1e-3;
    let p = Perturbation::from_fns(grid, |x| eps * k.phi_prime(x), |x| eps * k.phi_second(x), |_| 0.0, |_| 0.0);
    let rep = decomposition_check(&k, &p, 1.0).unwrap();
    // translation direction: the energy barely moves, so compare against roundoff of E(phi)
    assert!(rep.lhs.abs() < 1e-12, "{rep:?}");
    assert!(rep.abs_mismatch_split < 1e-15 && rep.abs_mismatch_global < 1e-15);

    let general = KinkProfile::new(NonlinearityParams::new(2.0, 5.0).unwrap()).unwrap();
    let rnd = Perturbation::random_smooth(grid, 11, 0.05).unwrap();
    let rep = decomposition_check(&general, &rnd, 0.5).unwrap();
    assert!(rep.rel_mismatch_split < 1e-10 && rep.rel_mismatch_global < 1e-10, "{rep:?}");
}

#[test]
fn short_stability_run() {
    let k = kink();
    let mut cfg = ExperimentConfig::new(0.01, PerturbationShape::GaussianMix);
    cfg.t_final = 2.0;
    cfg.log_every = 0.5;
    let rep = stability_experiment(&k, &cfg).unwrap();
    assert_eq!(rep.rows.len(), 5);
    assert!((rep.rho_initial / 1e-4 - 1.0).abs() < 1e-3);
    assert!(rep.ratio < 100.0);
    assert!(rep.energy_drift < 1e-6);
    assert!(rep.max_constraint < 1e-9);
    assert!(rep.x1_growth < 2.0);
    let s = FieldState::sampled_kink(&k, cfg.grid).unwrap();
    assert!(x1_norm(&s) > 1.0);

    cfg.delta = 2.0;
    assert!(stability_experiment(&k, &cfg).unwrap_err().is_validation());
}

#[test]
fn perturbation_shapes_round_trip() {
    for s in [PerturbationShape::GaussianRe, PerturbationShape::GaussianIm, PerturbationShape::GaussianMix] {
        assert_eq!(PerturbationShape::parse(s.name()).unwrap(), s);
    }
    assert!(PerturbationShape::parse("square").is_err());
}
