use std::f64::consts::FRAC_PI_2;

use super::relation::{dispersion_lhs, dispersion_rhs, dispersion_rhs_derivative};
use super::{
    CourantFraction, DispersionError, DispersionPoint, GridSpec, PropagationAngle, Result, Scheme,
    WaveSpec,
};

/// Default relative tolerance on the numerical wavenumber.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Iteration budget of the Newton/bisection search.
pub const MAX_ITERATIONS: usize = 200;

/// The left side may exceed the branch maximum by this relative amount
/// before the mode is declared non-propagating.
pub const NO_ROOT_SLACK: f64 = 1e-12;

/// Argument at which both per-axis symbols reach their first maximum.
///
/// `d/dx (27 sin x - sin 3x) = 12 cos x (3 - cos² x)` vanishes only where
/// `cos x = 0`, so the four-point symbol peaks at the same place as `sin x`.
const SYMBOL_PEAK: f64 = FRAC_PI_2;

/// Solve the dispersion relation for the numerical wavenumber on the
/// physical branch.
///
/// The search is confined to `[0, k_max]`, where `k_max` is the smallest
/// wavenumber at which some axis reaches the peak of its symbol.  The right
/// side is strictly increasing there, so the bracket holds exactly one root.
pub fn solve_knum(
    scheme: Scheme,
    grid: &GridSpec,
    wave: &WaveSpec,
    s: CourantFraction,
    angle: &PropagationAngle,
    tol: f64,
) -> Result<DispersionPoint> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(DispersionError::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    wave.check_resolved(grid)?;

    let k_exact = wave.k_exact(grid);
    let lhs = dispersion_lhs(scheme, grid, wave, s);
    let dir = angle.direction(grid.dim);

    let reach = grid
        .active_spacing()
        .iter()
        .zip(&dir)
        .map(|(d, c)| (0.5 * c * d).abs())
        .fold(0.0, f64::max);
    let k_max = SYMBOL_PEAK / reach;
    let rhs_max = dispersion_rhs(scheme, grid, angle, k_max);
    if lhs > rhs_max * (1.0 + NO_ROOT_SLACK) {
        return Err(DispersionError::NoRealRoot { lhs, rhs_max });
    }
    if lhs >= rhs_max {
        return Ok(DispersionPoint::new(k_exact, k_max));
    }

    let residual = |k: f64| dispersion_rhs(scheme, grid, angle, k) - lhs;
    let slope = |k: f64| dispersion_rhs_derivative(scheme, grid, &dir, k);
    let exact_enough = 4.0 * f64::EPSILON * lhs;

    let (mut lo, mut hi) = (0.0, k_max);
    let mut x = if k_exact > lo && k_exact < hi { k_exact } else { 0.5 * (lo + hi) };
    for _ in 0..MAX_ITERATIONS {
        let fx = residual(x);
        if fx.abs() <= exact_enough {
            return Ok(DispersionPoint::new(k_exact, x));
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = slope(x);
        let newton = x - fx / d;
        let next = if d > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= tol * next || hi - lo <= tol * hi {
            return Ok(DispersionPoint::new(k_exact, next));
        }
        x = next;
    }
    Err(DispersionError::NotConverged { iterations: MAX_ITERATIONS })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::relation::stencil_symbol;
    use std::f64::consts::PI;

    fn s(v: f64) -> CourantFraction {
        CourantFraction::new(v).unwrap()
    }

    /// Closed-form 1D FDTD(2,2) inversion, `k = (2/Δ) asin(Δ sqrt(lhs))`,
    /// defined up to the same rounding slack the solver allows.
    fn line_oracle(delta: f64, lhs: f64) -> Option<f64> {
        let arg = delta * lhs.sqrt();
        (arg * arg <= 1.0 + NO_ROOT_SLACK).then(|| 2.0 / delta * arg.min(1.0).asin())
    }

    #[test]
    fn magic_time_step_is_exact() {
        let delta = 5e-2;
        let grid = GridSpec::uniform(1, delta).unwrap();
        for n in [2.0, 2.5, 3.0, 7.0, 10.0, 33.3, 100.0, 1000.0] {
            let wave = WaveSpec::from_cells_per_wavelength(&grid, n).unwrap();
            let p = solve_knum(Scheme::Fdtd22, &grid, &wave, s(1.0), &PropagationAngle::axis(), DEFAULT_TOL)
                .unwrap();
            assert!(p.nde < 1e-12, "N={n}: nde={}", p.nde);
            assert!((p.vp_ratio - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn line_example_n10_half_courant() {
        let delta = 5e-2;
        let grid = GridSpec::uniform(1, delta).unwrap();
        let wave = WaveSpec::from_cells_per_wavelength(&grid, 10.0).unwrap();
        let p = solve_knum(Scheme::Fdtd22, &grid, &wave, s(0.5), &PropagationAngle::axis(), DEFAULT_TOL)
            .unwrap();
        let expected = 2.0 / delta * (2.0 * (PI / 20.0).sin()).asin();
        assert!((p.k_num - expected).abs() / expected < 1e-12);
        assert!((p.k_num * delta - 0.636424).abs() < 1e-6);
        assert!((p.vp_ratio - 0.98726).abs() < 1e-5);
    }

    #[test]
    fn agrees_with_line_oracle() {
        let delta = 1e-2;
        let grid = GridSpec::uniform(1, delta).unwrap();
        for n in [2.0, 2.2, 3.0, 5.0, 10.0, 40.0] {
            let wave = WaveSpec::from_cells_per_wavelength(&grid, n).unwrap();
            for sv in [0.05, 0.3, 0.5, 0.8, 0.99, 1.0] {
                let lhs = dispersion_lhs(Scheme::Fdtd22, &grid, &wave, s(sv));
                let got = solve_knum(Scheme::Fdtd22, &grid, &wave, s(sv), &PropagationAngle::axis(), DEFAULT_TOL);
                match line_oracle(delta, lhs) {
                    Some(k) => {
                        let p = got.unwrap();
                        assert!((p.k_num - k).abs() / k < 1e-10, "N={n} S={sv}");
                    }
                    None => assert!(
                        matches!(got, Err(DispersionError::NoRealRoot { .. })),
                        "N={n} S={sv}: {got:?} arg={}",
                        delta * lhs.sqrt()
                    ),
                }
            }
        }
    }

    #[test]
    fn fdtd24_agrees_with_bisection_oracle() {
        // Independent oracle: plain bisection on the 1D FDTD(2,4) relation.
        let delta = 5e-2;
        let grid = GridSpec::uniform(1, delta).unwrap();
        for n in [4.0, 8.0, 20.0] {
            let wave = WaveSpec::from_cells_per_wavelength(&grid, n).unwrap();
            for sv in [0.1, 0.44, 1.0] {
                let lhs = dispersion_lhs(Scheme::Fdtd24, &grid, &wave, s(sv));
                let target = delta * lhs.sqrt();
                let (mut a, mut b) = (0.0, PI / 2.0);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if stencil_symbol(Scheme::Fdtd24, m) < target {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                let k_ref = 2.0 / delta * 0.5 * (a + b);
                let p = solve_knum(Scheme::Fdtd24, &grid, &wave, s(sv), &PropagationAngle::axis(), DEFAULT_TOL)
                    .unwrap();
                assert!((p.k_num - k_ref).abs() / k_ref < 1e-11, "N={n} S={sv}");
            }
        }
    }

    #[test]
    fn satisfies_relation_in_3d() {
        let grid = GridSpec::new(3, [6e-3, 5e-3, 4e-3], 2.0, 1.0).unwrap();
        let wave = WaveSpec::new(4e9).unwrap();
        for scheme in Scheme::ALL {
            for (t, ph) in [(0.0, 0.0), (0.3, 1.0), (PI / 2.0, PI / 4.0), (2.5, 5.0), (PI, 2.0 * PI)] {
                let angle = PropagationAngle::new(t, ph).unwrap();
                let p = solve_knum(scheme, &grid, &wave, s(0.8), &angle, DEFAULT_TOL).unwrap();
                let lhs = dispersion_lhs(scheme, &grid, &wave, s(0.8));
                let rhs = dispersion_rhs(scheme, &grid, &angle, p.k_num);
                assert!((lhs - rhs).abs() / lhs < 1e-12);
                assert_eq!(p.vp_ratio, p.k_exact / p.k_num);
            }
        }
    }

    #[test]
    fn rejects_under_resolved_waves() {
        let grid = GridSpec::uniform(1, 1e-2).unwrap();
        let wave = WaveSpec::from_cells_per_wavelength(&grid, 1.9).unwrap();
        let err = solve_knum(Scheme::Fdtd22, &grid, &wave, s(1.0), &PropagationAngle::axis(), DEFAULT_TOL)
            .unwrap_err();
        assert!(matches!(err, DispersionError::UnderResolved { .. }));
    }

    #[test]
    fn evanescent_regime_reports_no_root() {
        // N = 2 on a line propagates only at the magic step.
        let grid = GridSpec::uniform(1, 1e-2).unwrap();
        let wave = WaveSpec::from_cells_per_wavelength(&grid, 2.0).unwrap();
        let err = solve_knum(Scheme::Fdtd22, &grid, &wave, s(0.5), &PropagationAngle::axis(), DEFAULT_TOL)
            .unwrap_err();
        assert!(matches!(err, DispersionError::NoRealRoot { .. }));
    }

    #[test]
    fn rejects_bad_tolerance() {
        let grid = GridSpec::uniform(1, 1e-2).unwrap();
        let wave = WaveSpec::from_cells_per_wavelength(&grid, 10.0).unwrap();
        assert!(solve_knum(Scheme::Fdtd22, &grid, &wave, s(1.0), &PropagationAngle::axis(), 0.0).is_err());
    }
}
