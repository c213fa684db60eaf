use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SimError;

/// Field component of the Yee cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    Ex,
    Ey,
    Ez,
    Hx,
    Hy,
    Hz,
}

/// Position of samples along one axis: on mesh nodes or halfway between.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stagger {
    Node,
    Half,
}

impl Component {
    pub const ALL: [Component; 6] =
        [Component::Ex, Component::Ey, Component::Ez, Component::Hx, Component::Hy, Component::Hz];

    pub fn is_electric(self) -> bool {
        matches!(self, Component::Ex | Component::Ey | Component::Ez)
    }

    /// Vector direction of the component, 0 = x.
    pub fn direction(self) -> usize {
        match self {
            Component::Ex | Component::Hx => 0,
            Component::Ey | Component::Hy => 1,
            Component::Ez | Component::Hz => 2,
        }
    }

    /// Yee staggering along x, y, z.
    ///
    /// Electric components sit half a cell along their own direction,
    /// magnetic components half a cell along the two transverse ones.
    pub fn stagger(self) -> [Stagger; 3] {
        let own = self.direction();
        let mut out = [Stagger::Node; 3];
        for (axis, st) in out.iter_mut().enumerate() {
            let along = axis == own;
            *st = if along == self.is_electric() { Stagger::Half } else { Stagger::Node };
        }
        out
    }

    pub fn name(self) -> &'static str {
        match self {
            Component::Ex => "ex",
            Component::Ey => "ey",
            Component::Ez => "ez",
            Component::Hx => "hx",
            Component::Hy => "hy",
            Component::Hz => "hz",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Component {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, SimError> {
        Component::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| SimError::InvalidConfig(format!("unknown field component `{s}`")))
    }
}

/// Which field components are marched, and on how many axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    /// x-directed propagation of `(Ez, Hy)`.
    Line,
    /// Transverse magnetic in the xy-plane: `(Ez, Hx, Hy)`.
    Tm2d,
    /// Transverse electric in the xy-plane: `(Hz, Ex, Ey)`.
    Te2d,
    /// All six components.
    Full3d,
}

impl Layout {
    pub fn dim(self) -> usize {
        match self {
            Layout::Line => 1,
            Layout::Tm2d | Layout::Te2d => 2,
            Layout::Full3d => 3,
        }
    }

    pub fn components(self) -> &'static [Component] {
        use Component::*;
        match self {
            Layout::Line => &[Ez, Hy],
            Layout::Tm2d => &[Ez, Hx, Hy],
            Layout::Te2d => &[Ex, Ey, Hz],
            Layout::Full3d => &[Ex, Ey, Ez, Hx, Hy, Hz],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Perfect electric conductor on every face of the box.
    Pec,
    /// Periodic wrap-around on every active axis.
    Periodic,
}

/// Number of samples along an axis with `cells` cells.
pub(crate) fn axis_len(cells: usize, stagger: Stagger, boundary: Boundary) -> usize {
    match (boundary, stagger) {
        (Boundary::Pec, Stagger::Node) => cells + 1,
        _ => cells,
    }
}

/// Maximum that lets NaN win, so blow-ups are never hidden.
fn nan_max(m: f64, v: f64) -> f64 {
    if m.is_nan() || v > m || v.is_nan() {
        if m.is_nan() { m } else { v }
    } else {
        m
    }
}

/// One field component stored contiguously, x fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldArray {
    pub component: Component,
    pub shape: [usize; 3],
    pub data: Vec<f64>,
}

impl FieldArray {
    pub(crate) fn zeros(component: Component, shape: [usize; 3]) -> Self {
        Self { component, shape, data: vec![0.0; shape.iter().product()] }
    }

    pub fn offset(&self, idx: [usize; 3]) -> usize {
        idx[0] + self.shape[0] * (idx[1] + self.shape[1] * idx[2])
    }

    pub fn get(&self, idx: [usize; 3]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: [usize; 3], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn contains(&self, idx: [usize; 3]) -> bool {
        idx.iter().zip(&self.shape).all(|(i, n)| i < n)
    }

    pub fn max_abs(&self) -> f64 {
        // Lane-wise maxima vectorise; `v * 0` turns NaN for any non-finite
        // value, and only then is the exact NaN-propagating fold needed.
        let mut lanes = [0.0f64; 8];
        let mut poison = [0.0f64; 8];
        let chunks = self.data.chunks_exact(8);
        let tail = chunks.remainder();
        for c in chunks {
            for ((m, p), v) in lanes.iter_mut().zip(&mut poison).zip(c) {
                let a = v.abs();
                *m = if a > *m { a } else { *m };
                *p += v * 0.0;
            }
        }
        for v in tail {
            lanes[0] = if v.abs() > lanes[0] { v.abs() } else { lanes[0] };
            poison[0] += v * 0.0;
        }
        if poison.iter().any(|p| p.is_nan()) {
            return self.data.iter().map(|v| v.abs()).fold(0.0, nan_max);
        }
        lanes.into_iter().fold(0.0, f64::max)
    }

    /// Multi-index of a flat offset.
    pub fn index_of(&self, offset: usize) -> [usize; 3] {
        let x = offset % self.shape[0];
        let rest = offset / self.shape[0];
        [x, rest % self.shape[1], rest / self.shape[1]]
    }
}

/// Staggered electric and magnetic fields of a running simulation.
///
/// Electric fields are at integer time steps, magnetic fields half a step
/// earlier: after `step` updates E holds `t = step·dt` and H holds
/// `t = (step - 1/2)·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub layout: Layout,
    pub boundary: Boundary,
    pub cells: [usize; 3],
    pub fields: Vec<FieldArray>,
    pub step: usize,
    pub dt: f64,
    /// Magnitude that the instability threshold is measured against.
    pub reference_max: f64,
}

impl FieldState {
    pub fn new(layout: Layout, boundary: Boundary, cells: [usize; 3], dt: f64) -> Result<Self, SimError> {
        let dim = layout.dim();
        let min_cells = match boundary {
            Boundary::Pec => 2,
            Boundary::Periodic => 4,
        };
        for axis in 0..3 {
            let n = cells[axis];
            if axis < dim && n < min_cells {
                return Err(SimError::InvalidConfig(format!(
                    "axis {axis} needs at least {min_cells} cells, got {n}"
                )));
            }
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SimError::InvalidConfig(format!("time step must be positive, got {dt}")));
        }
        let fields = layout
            .components()
            .iter()
            .map(|&c| {
                let st = c.stagger();
                let mut shape = [1; 3];
                for axis in 0..dim {
                    shape[axis] = axis_len(cells[axis], st[axis], boundary);
                }
                FieldArray::zeros(c, shape)
            })
            .collect();
        let mut cells = cells;
        for n in cells.iter_mut().skip(dim) {
            *n = 1;
        }
        Ok(Self { layout, boundary, cells, fields, step: 0, dt, reference_max: 0.0 })
    }

    pub fn field(&self, c: Component) -> Option<&FieldArray> {
        self.fields.iter().find(|f| f.component == c)
    }

    pub fn field_mut(&mut self, c: Component) -> Option<&mut FieldArray> {
        self.fields.iter_mut().find(|f| f.component == c)
    }

    pub fn max_abs(&self) -> f64 {
        self.fields.iter().map(FieldArray::max_abs).fold(0.0, nan_max)
    }

    pub fn is_finite(&self) -> bool {
        self.fields.iter().all(|f| f.data.iter().all(|v| v.is_finite()))
    }

    /// Physical position of sample `idx` of component `c`.
    pub fn position(&self, c: Component, idx: [usize; 3], spacing: [f64; 3]) -> [f64; 3] {
        let st = c.stagger();
        let mut pos = [0.0; 3];
        for axis in 0..self.layout.dim() {
            let shift = match st[axis] {
                Stagger::Node => 0.0,
                Stagger::Half => 0.5,
            };
            pos[axis] = (idx[axis] as f64 + shift) * spacing[axis];
        }
        pos
    }

    /// Whether `idx` lies on a PEC face where component `c` is tangential.
    pub fn on_pec_face(&self, c: Component, idx: [usize; 3]) -> bool {
        if self.boundary != Boundary::Pec || !c.is_electric() {
            return false;
        }
        let st = c.stagger();
        (0..self.layout.dim())
            .any(|axis| st[axis] == Stagger::Node && (idx[axis] == 0 || idx[axis] == self.cells[axis]))
    }

    /// Discrete electromagnetic energy `Σ (ε E² + μ H²) / 2 · ΔV`, joules
    /// (per unit length/area for reduced layouts).
    pub fn energy(&self, spacing: [f64; 3], eps: f64, mu: f64) -> f64 {
        let volume: f64 = spacing[..self.layout.dim()].iter().product();
        self.fields
            .iter()
            .map(|f| {
                let m = if f.component.is_electric() { eps } else { mu };
                0.5 * m * f.data.iter().map(|v| v * v).sum::<f64>()
            })
            .sum::<f64>()
            * volume
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn yee_staggering() {
        use Stagger::*;
        assert_eq!(Component::Ex.stagger(), [Half, Node, Node]);
        assert_eq!(Component::Ez.stagger(), [Node, Node, Half]);
        assert_eq!(Component::Hx.stagger(), [Node, Half, Half]);
        assert_eq!(Component::Hz.stagger(), [Half, Half, Node]);
    }

    #[test]
    fn pec_shapes_are_consistent() {
        let s = FieldState::new(Layout::Full3d, Boundary::Pec, [4, 5, 6], 1e-12).unwrap();
        assert_eq!(s.field(Component::Ex).unwrap().shape, [4, 6, 7]);
        assert_eq!(s.field(Component::Hz).unwrap().shape, [4, 5, 7]);
        let line = FieldState::new(Layout::Line, Boundary::Pec, [10, 3, 3], 1e-12).unwrap();
        assert_eq!(line.field(Component::Ez).unwrap().shape, [11, 1, 1]);
        assert_eq!(line.field(Component::Hy).unwrap().shape, [10, 1, 1]);
        assert_eq!(line.cells, [10, 1, 1]);
        let per = FieldState::new(Layout::Tm2d, Boundary::Periodic, [8, 6, 1], 1e-12).unwrap();
        assert!(per.fields.iter().all(|f| f.shape == [8, 6, 1]));
    }

    #[test]
    fn rejects_tiny_grids() {
        assert!(FieldState::new(Layout::Line, Boundary::Pec, [1, 1, 1], 1e-12).is_err());
        assert!(FieldState::new(Layout::Line, Boundary::Periodic, [3, 1, 1], 1e-12).is_err());
        assert!(FieldState::new(Layout::Line, Boundary::Pec, [8, 1, 1], 0.0).is_err());
    }

    #[test]
    fn index_round_trip() {
        let f = FieldArray::zeros(Component::Ex, [3, 4, 5]);
        for o in [0, 7, 33, 59] {
            assert_eq!(f.offset(f.index_of(o)), o);
        }
    }

    #[test]
    fn component_parsing() {
        assert_eq!("Ez".parse::<Component>().unwrap(), Component::Ez);
        assert!("ew".parse::<Component>().is_err());
    }
}
