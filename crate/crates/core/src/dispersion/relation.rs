use super::{CourantFraction, GridSpec, PropagationAngle, Scheme, WaveSpec};

/// Largest stable time step of `scheme` on `grid`, in seconds.
///
/// `sqrt(eps mu) / sqrt(sum 1/Δξ²)` over the active axes, scaled by 6/7 for
/// the four-point stencil.
pub fn cfl_max_dt(scheme: Scheme, grid: &GridSpec) -> f64 {
    let inv_sq: f64 = grid.active_spacing().iter().map(|d| d.powi(-2)).sum();
    scheme.cfl_factor() / (grid.wave_speed() * inv_sq.sqrt())
}

pub fn time_step(scheme: Scheme, grid: &GridSpec, s: CourantFraction) -> f64 {
    s.value() * cfl_max_dt(scheme, grid)
}

/// Per-axis spatial symbol of the staggered difference operator.
///
/// For a plane wave `exp(i k ξ)` the operator returns
/// `(2 i / Δ) · symbol(k Δ / 2)` times the field.
pub fn stencil_symbol(scheme: Scheme, x: f64) -> f64 {
    match scheme {
        Scheme::Fdtd22 => x.sin(),
        Scheme::Fdtd24 => (27.0 * x.sin() - (3.0 * x).sin()) / 24.0,
    }
}

pub(crate) fn stencil_symbol_derivative(scheme: Scheme, x: f64) -> f64 {
    match scheme {
        Scheme::Fdtd22 => x.cos(),
        Scheme::Fdtd24 => (27.0 * x.cos() - 3.0 * (3.0 * x).cos()) / 24.0,
    }
}

/// Squared left-hand side `[sin(ω Δt / 2) / (c Δt)]²`, in (rad/m)².
///
/// Identical for both schemes; only Δt differs through the CFL limit.
pub fn dispersion_lhs(scheme: Scheme, grid: &GridSpec, wave: &WaveSpec, s: CourantFraction) -> f64 {
    lhs_at_dt(grid, wave, time_step(scheme, grid, s))
}

pub(crate) fn lhs_at_dt(grid: &GridSpec, wave: &WaveSpec, dt: f64) -> f64 {
    let half = 0.5 * wave.angular_frequency() * dt;
    (half.sin() / (grid.wave_speed() * dt)).powi(2)
}

/// Squared right-hand side `Σ_ξ [symbol(k̃_ξ Δξ / 2) / Δξ]²`, in (rad/m)².
pub fn dispersion_rhs(scheme: Scheme, grid: &GridSpec, angle: &PropagationAngle, k_num: f64) -> f64 {
    let dir = angle.direction(grid.dim);
    grid.active_spacing()
        .iter()
        .zip(dir)
        .map(|(&d, cosine)| (stencil_symbol(scheme, 0.5 * k_num * cosine * d) / d).powi(2))
        .sum()
}

/// `d(rhs)/d(k_num)` along a fixed direction.
pub(crate) fn dispersion_rhs_derivative(
    scheme: Scheme,
    grid: &GridSpec,
    dir: &[f64; 3],
    k_num: f64,
) -> f64 {
    grid.active_spacing()
        .iter()
        .zip(dir)
        .map(|(&d, &cosine)| {
            let a = 0.5 * cosine * d;
            let x = k_num * a;
            2.0 * stencil_symbol(scheme, x) * stencil_symbol_derivative(scheme, x) * a / (d * d)
        })
        .sum()
}
