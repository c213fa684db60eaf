use crate::dispersion::{GridSpec, Scheme};

use super::field::{Boundary, Component, FieldArray, FieldState, Stagger};
use super::stencil::add_derivative;
use super::SimError;

/// Growth over the reference magnitude that counts as blow-up.
pub const INSTABILITY_FACTOR: f64 = 1e12;

/// `(curl F)_target = Σ sign · ∂_axis F_source`, one row per term.
const CURL_TERMS: [(usize, usize, usize, f64); 6] = [
    (0, 2, 1, 1.0),
    (0, 1, 2, -1.0),
    (1, 0, 2, 1.0),
    (1, 2, 0, -1.0),
    (2, 1, 0, 1.0),
    (2, 0, 1, -1.0),
];

fn electric(direction: usize) -> Component {
    [Component::Ex, Component::Ey, Component::Ez][direction]
}

fn magnetic(direction: usize) -> Component {
    [Component::Hx, Component::Hy, Component::Hz][direction]
}

/// Add `scale · curl(from)` to every `to` component present in the layout.
fn curl_update(
    state: &mut FieldState,
    grid: &GridSpec,
    scheme: Scheme,
    scale: f64,
    update_electric: bool,
) {
    let dim = state.layout.dim();
    let boundary = state.boundary;
    let (to, from): (fn(usize) -> Component, fn(usize) -> Component) =
        if update_electric { (electric, magnetic) } else { (magnetic, electric) };
    for &(target_dir, source_dir, axis, sign) in &CURL_TERMS {
        if axis >= dim {
            continue;
        }
        let (target, source) = (to(target_dir), from(source_dir));
        let Some(ti) = state.fields.iter().position(|f| f.component == target) else { continue };
        let Some(si) = state.fields.iter().position(|f| f.component == source) else { continue };
        let (out, src) = split_pair(&mut state.fields, ti, si);
        let coef = scale * sign / grid.spacing[axis];
        add_derivative(out, src, axis, coef, scheme, boundary);
    }
}

fn split_pair(fields: &mut [FieldArray], a: usize, b: usize) -> (&mut FieldArray, &FieldArray) {
    if a < b {
        let (lo, hi) = fields.split_at_mut(b);
        (&mut lo[a], &hi[0])
    } else {
        let (lo, hi) = fields.split_at_mut(a);
        (&mut hi[0], &lo[b])
    }
}

/// Zero the tangential electric field on every PEC face.
///
/// Out-of-domain stencil points are handled inside the difference operator
/// by odd images of tangential E and even images of normal H, so this is
/// the only explicit boundary work.  Periodic states are left unchanged.
pub fn apply_pec(state: &mut FieldState) {
    if state.boundary != Boundary::Pec {
        return;
    }
    let dim = state.layout.dim();
    let cells = state.cells;
    for f in state.fields.iter_mut().filter(|f| f.component.is_electric()) {
        let st = f.component.stagger();
        for axis in (0..dim).filter(|&a| st[a] == Stagger::Node) {
            let inner: usize = f.shape[..axis].iter().product();
            let n = f.shape[axis];
            let outer: usize = f.shape[axis + 1..].iter().product();
            for o in 0..outer {
                for p in [0, cells[axis]] {
                    let base = (o * n + p) * inner;
                    f.data[base..base + inner].iter_mut().for_each(|v| *v = 0.0);
                }
            }
        }
    }
}

/// Advance the state by one leapfrog step: H to `t + dt/2`, then E to
/// `t + dt`, then the PEC walls.
///
/// Fails with [`SimError::Instability`] if any value becomes non-finite or
/// exceeds `INSTABILITY_FACTOR` times `state.reference_max`.
pub fn step(scheme: Scheme, state: &mut FieldState, grid: &GridSpec) -> Result<(), SimError> {
    if grid.dim != state.layout.dim() {
        return Err(SimError::InvalidConfig(format!(
            "grid is {}-dimensional but the layout needs {}",
            grid.dim,
            state.layout.dim()
        )));
    }
    let mu = crate::constants::MU0 * grid.mu_r;
    let eps = crate::constants::EPS0 * grid.eps_r;
    let dt = state.dt;
    curl_update(state, grid, scheme, -dt / mu, false);
    curl_update(state, grid, scheme, dt / eps, true);
    apply_pec(state);
    state.step += 1;
    check_stability(state)
}

pub(crate) fn check_stability(state: &FieldState) -> Result<(), SimError> {
    let limit = INSTABILITY_FACTOR * state.reference_max;
    let max_abs = state.max_abs();
    if !max_abs.is_finite() || (state.reference_max > 0.0 && max_abs > limit) {
        return Err(SimError::Instability { step: state.step, max_abs });
    }
    Ok(())
}
