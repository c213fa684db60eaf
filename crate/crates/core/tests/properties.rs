use fdtd_dispersion::dispersion::{solve_knum, DEFAULT_TOL};
use fdtd_dispersion::yee::{run_sim_with, Boundary, InitialCondition, Layout, SimConfig, SimError};
use fdtd_dispersion::{constants, CourantFraction, GridSpec, PropagationAngle, Scheme, WaveSpec};
use proptest::prelude::*;

fn knum(scheme: Scheme, n: f64, s: f64, angle: &PropagationAngle) -> f64 {
    let grid = GridSpec::uniform(3, 6e-3).unwrap();
    let wave = WaveSpec::from_cells_per_wavelength(&grid, n).unwrap();
    solve_knum(scheme, &grid, &wave, CourantFraction::new(s).unwrap(), angle, DEFAULT_TOL).unwrap().k_num
}

fn nde(scheme: Scheme, n: f64, s: f64, angle: &PropagationAngle) -> f64 {
    let grid = GridSpec::uniform(3, 6e-3).unwrap();
    let wave = WaveSpec::from_cells_per_wavelength(&grid, n).unwrap();
    solve_knum(scheme, &grid, &wave, CourantFraction::new(s).unwrap(), angle, DEFAULT_TOL).unwrap().nde
}

fn angle() -> impl Strategy<Value = PropagationAngle> {
    (0.0..std::f64::consts::PI, 0.0..2.0 * std::f64::consts::PI).prop_map(|(t, p)| PropagationAngle::new(t, p).unwrap())
}

fn scheme() -> impl Strategy<Value = Scheme> {
    prop_oneof![Just(Scheme::Fdtd22), Just(Scheme::Fdtd24)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn fdtd22_is_never_faster_than_light(n in 3.0f64..100.0, s in 0.01f64..=1.0, a in angle()) {
        let grid = GridSpec::uniform(3, 6e-3).unwrap();
        let k = WaveSpec::from_cells_per_wavelength(&grid, n).unwrap().k_exact(&grid);
        prop_assert!(knum(Scheme::Fdtd22, n, s, &a) >= k * (1.0 - 1e-12));
    }

    #[test]
    fn knum_decreases_with_courant_fraction(
        sch in scheme(),
        n in 4.0f64..100.0,
        s1 in 0.01f64..1.0,
        ds in 0.001f64..0.5,
        a in angle(),
    ) {
        let s2 = (s1 + ds).min(1.0);
        let (k1, k2) = (knum(sch, n, s1, &a), knum(sch, n, s2, &a));
        prop_assert!(k2 <= k1 * (1.0 + 1e-12), "{sch}: k({s1}) = {k1}, k({s2}) = {k2}");
    }

    #[test]
    fn fdtd22_error_is_second_order(n in 40.0f64..80.0, s in 0.1f64..0.9, a in angle()) {
        let ratio = nde(Scheme::Fdtd22, n, s, &a) / nde(Scheme::Fdtd22, 2.0 * n, s, &a);
        prop_assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn fdtd24_spatial_error_is_fourth_order(n in 20.0f64..40.0, a in angle()) {
        // A tiny Courant fraction isolates the spatial part of the error.
        let ratio = nde(Scheme::Fdtd24, n, 1e-4, &a) / nde(Scheme::Fdtd24, 2.0 * n, 1e-4, &a);
        prop_assert!((ratio - 16.0).abs() < 0.5, "ratio {ratio}");
    }
}

fn periodic_box(scheme: Scheme, s: f64, steps: usize) -> SimConfig {
    let grid = GridSpec::uniform(3, 1e-2).unwrap();
    let mut cfg = SimConfig::new(scheme, grid, Layout::Full3d, [8, 8, 8], s, 0.0);
    cfg.boundary = Boundary::Periodic;
    cfg.total_time = steps as f64 * cfg.dt();
    cfg.initial = InitialCondition::RandomE { seed: 11, amplitude: 1.0 };
    cfg
}

#[test]
fn just_past_the_cfl_limit_blows_up() {
    for scheme in Scheme::ALL {
        let err = run_sim_with(&periodic_box(scheme, 1.001, 10_000), |_| {}).unwrap_err();
        assert!(matches!(err, SimError::Instability { step, .. } if step < 10_000), "{scheme}: {err:?}");
    }
}

#[test]
fn the_cfl_limit_itself_is_stable() {
    for scheme in Scheme::ALL {
        let out = run_sim_with(&periodic_box(scheme, 1.0, 10_000), |_| {}).unwrap();
        assert_eq!(out.state.step, 10_000);
        assert!(out.state.max_abs() < 1e6, "{scheme}: {}", out.state.max_abs());
    }
}

#[test]
fn energy_stays_bounded_over_long_runs() {
    let grid = GridSpec::uniform(3, 1e-2).unwrap();
    let eps = constants::EPS0;
    let mu = constants::MU0;
    for scheme in Scheme::ALL {
        let mut cfg = SimConfig::new(scheme, grid, Layout::Full3d, [6, 6, 6], 0.5, 0.0);
        cfg.total_time = 100_000.0 * cfg.dt();
        cfg.initial = InitialCondition::RandomE { seed: 3, amplitude: 1.0 };
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        let out = run_sim_with(&cfg, |st| {
            if st.step % 100 == 0 {
                let e = st.energy(grid.spacing, eps, mu);
                lo = lo.min(e);
                hi = hi.max(e);
            }
        })
        .unwrap();
        assert_eq!(out.state.step, 100_000);
        assert!(hi / lo < 2.0, "{scheme}: energy range [{lo:e}, {hi:e}]");
    }
}
