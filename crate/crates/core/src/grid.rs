//! Grid geometry, wave fields and the elementary difference/sum operators.
//!
//! Two-dimensional arrays are stored row-major with the x index fastest:
//! the flat id of point `(i, j)` is `j * (I + 1) + i`. Every module that
//! assembles matrices relies on this convention.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("axis {axis} requested on a {dim}D field")]
    Dimension { axis: Axis, dim: usize },
    #[error("invalid grid: {0}")]
    Invalid(String),
    #[error("array of length {len} does not match grid with {expected} points")]
    Shape { len: usize, expected: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::X => f.write_str("x"),
            Axis::Y => f.write_str("y"),
        }
    }
}

/// One uniformly discretized coordinate axis `[lo, hi]` with `intervals` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub lo: f64,
    pub hi: f64,
    pub intervals: usize,
}

impl AxisSpec {
    pub fn new(lo: f64, hi: f64, intervals: usize) -> Result<Self, GridError> {
        if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
            return Err(GridError::Invalid(format!("axis bounds [{lo}, {hi}]")));
        }
        if intervals < 2 {
            return Err(GridError::Invalid(format!(
                "axis needs at least 2 intervals, got {intervals}"
            )));
        }
        Ok(Self { lo, hi, intervals })
    }

    /// Builds an axis from a requested spacing. The spacing must divide the
    /// interval length into a whole number of cells (relative slack 1e-9).
    pub fn with_spacing(lo: f64, hi: f64, spacing: f64) -> Result<Self, GridError> {
        if !(spacing > 0.0) {
            return Err(GridError::Invalid(format!("spacing {spacing} must be positive")));
        }
        let cells = (hi - lo) / spacing;
        let n = cells.round();
        if (cells - n).abs() > 1e-9 * cells.max(1.0) {
            return Err(GridError::Invalid(format!(
                "spacing {spacing} does not divide [{lo}, {hi}] into whole cells"
            )));
        }
        Self::new(lo, hi, n as usize)
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / self.intervals as f64
    }

    pub fn points(&self) -> usize {
        self.intervals + 1
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.spacing()
    }

    /// Index of the grid point nearest to `x` (clamped into the axis).
    pub fn nearest_index(&self, x: f64) -> usize {
        let i = ((x - self.lo) / self.spacing()).round();
        i.clamp(0.0, self.intervals as f64) as usize
    }
}

/// Rectangular grid in one or two dimensions plus the time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x: AxisSpec,
    pub y: Option<AxisSpec>,
    pub dt: f64,
}

impl GridSpec {
    pub fn new_1d(x: AxisSpec, dt: f64) -> Result<Self, GridError> {
        Self::check_dt(dt)?;
        Ok(Self { x, y: None, dt })
    }

    pub fn new_2d(x: AxisSpec, y: AxisSpec, dt: f64) -> Result<Self, GridError> {
        Self::check_dt(dt)?;
        Ok(Self { x, y: Some(y), dt })
    }

    fn check_dt(dt: f64) -> Result<(), GridError> {
        if dt > 0.0 && dt.is_finite() {
            Ok(())
        } else {
            Err(GridError::Invalid(format!("time step {dt} must be positive")))
        }
    }

    pub fn dim(&self) -> usize {
        if self.y.is_some() {
            2
        } else {
            1
        }
    }

    pub fn dx(&self) -> f64 {
        self.x.spacing()
    }

    /// y spacing; in 1D this is 1 so cell volumes reduce to `dx`.
    pub fn dy(&self) -> f64 {
        self.y.map_or(1.0, |y| y.spacing())
    }

    pub fn nx(&self) -> usize {
        self.x.points()
    }

    pub fn ny(&self) -> usize {
        self.y.map_or(1, |y| y.points())
    }

    pub fn len(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn shape(&self) -> Shape {
        match self.y {
            None => Shape::D1(self.nx()),
            Some(_) => Shape::D2(self.nx(), self.ny()),
        }
    }

    #[inline]
    pub fn id(&self, i: usize, j: usize) -> usize {
        j * self.nx() + i
    }

    #[inline]
    pub fn coords_of(&self, id: usize) -> (usize, usize) {
        (id % self.nx(), id / self.nx())
    }

    pub fn x_at(&self, i: usize) -> f64 {
        self.x.coord(i)
    }

    pub fn y_at(&self, j: usize) -> f64 {
        self.y.map_or(0.0, |y| y.coord(j))
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx() * self.dy()
    }

    /// Physical coordinates of every grid point in storage order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.ny()).flat_map(move |j| (0..self.nx()).map(move |i| (self.x_at(i), self.y_at(j))))
    }
}

/// Boundary of a 1D domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side1d {
    Left,
    Right,
}

impl Side1d {
    pub fn edge(self) -> Edge {
        match self {
            Side1d::Left => Edge::West,
            Side1d::Right => Edge::East,
        }
    }
}

/// Boundary edge of a rectangle. In 1D, `West`/`East` are the left/right ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Edge {
    West,
    East,
    South,
    North,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::West, Edge::East, Edge::South, Edge::North];

    /// Axis normal to the edge.
    pub fn normal(self) -> Axis {
        match self {
            Edge::West | Edge::East => Axis::X,
            Edge::South | Edge::North => Axis::Y,
        }
    }

    pub fn tangent(self) -> Axis {
        match self.normal() {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }

    /// True for the edge at the upper end of its normal axis.
    pub fn is_upper(self) -> bool {
        matches!(self, Edge::East | Edge::North)
    }

    pub fn name(self, dim: usize) -> &'static str {
        match (self, dim) {
            (Edge::West, 1) => "left",
            (Edge::East, 1) => "right",
            (Edge::West, _) => "west",
            (Edge::East, _) => "east",
            (Edge::South, _) => "south",
            (Edge::North, _) => "north",
        }
    }
}

/// Corner of a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Corner {
    NorthEast,
    NorthWest,
    SouthEast,
    SouthWest,
}

impl Corner {
    pub const ALL: [Corner; 4] =
        [Corner::SouthWest, Corner::SouthEast, Corner::NorthWest, Corner::NorthEast];

    /// The edge sharing the corner whose normal is x.
    pub fn x_edge(self) -> Edge {
        match self {
            Corner::NorthEast | Corner::SouthEast => Edge::East,
            Corner::NorthWest | Corner::SouthWest => Edge::West,
        }
    }

    /// The edge sharing the corner whose normal is y.
    pub fn y_edge(self) -> Edge {
        match self {
            Corner::NorthEast | Corner::NorthWest => Edge::North,
            Corner::SouthEast | Corner::SouthWest => Edge::South,
        }
    }
}

/// Array layout: number of points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    D1(usize),
    D2(usize, usize),
}

impl Shape {
    pub fn len(&self) -> usize {
        match *self {
            Shape::D1(n) => n,
            Shape::D2(nx, ny) => nx * ny,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match self {
            Shape::D1(_) => 1,
            Shape::D2(..) => 2,
        }
    }

    fn extent(&self, axis: Axis) -> Result<usize, GridError> {
        match (*self, axis) {
            (Shape::D1(n), Axis::X) => Ok(n),
            (Shape::D1(_), Axis::Y) => Err(GridError::Dimension { axis, dim: 1 }),
            (Shape::D2(nx, _), Axis::X) => Ok(nx),
            (Shape::D2(_, ny), Axis::Y) => Ok(ny),
        }
    }
}

/// Complex amplitudes at two consecutive time levels.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub spec: GridSpec,
    pub current: Vec<Complex64>,
    pub previous: Vec<Complex64>,
    pub time_index: usize,
}

impl WaveField {
    /// A field at time level 0; the previous level is a copy of the initial data.
    pub fn new(spec: GridSpec, initial: Vec<Complex64>) -> Result<Self, GridError> {
        if initial.len() != spec.len() {
            return Err(GridError::Shape { len: initial.len(), expected: spec.len() });
        }
        Ok(Self { spec, previous: initial.clone(), current: initial, time_index: 0 })
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let data = spec.points().map(|(x, y)| f(x, y)).collect();
        Self::new(spec, data).expect("length matches by construction")
    }

    pub fn time(&self) -> f64 {
        self.time_index as f64 * self.spec.dt
    }

    pub fn all_finite(&self) -> bool {
        self.current.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Shift levels: `current` becomes `previous`, `next` becomes `current`.
    pub fn commit(&mut self, next: Vec<Complex64>) {
        debug_assert_eq!(next.len(), self.current.len());
        self.previous = std::mem::replace(&mut self.current, next);
        self.time_index += 1;
    }
}

/// Elementary two-point operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffOp {
    /// `(f[i+1] - f[i]) / h`
    DPlus,
    /// `(f[i] - f[i-1]) / h`
    DMinus,
    /// `(f[i] + f[i-1]) / 2`
    SMinus,
    /// `(f[i] + f[i+1]) / 2`
    SPlus,
}

impl DiffOp {
    /// `(offset, weight)` pairs of the stencil.
    pub fn weights(self, h: f64) -> [(isize, f64); 2] {
        match self {
            DiffOp::DPlus => [(0, -1.0 / h), (1, 1.0 / h)],
            DiffOp::DMinus => [(-1, -1.0 / h), (0, 1.0 / h)],
            DiffOp::SMinus => [(-1, 0.5), (0, 0.5)],
            DiffOp::SPlus => [(0, 0.5), (1, 0.5)],
        }
    }
}

/// Weights of the 3-point second difference `D+ D-`.
pub fn second_difference_weights(h: f64) -> [(isize, f64); 3] {
    let w = 1.0 / (h * h);
    [(-1, w), (0, -2.0 * w), (1, w)]
}

/// Output of a difference operator: entries outside `valid` along the
/// differenced axis are NaN and must not be read.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencilled {
    pub values: Vec<Complex64>,
    pub shape: Shape,
    pub axis: Axis,
    pub valid: std::ops::Range<usize>,
}

impl Stencilled {
    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        let k = match self.axis {
            Axis::X => i,
            Axis::Y => j,
        };
        self.valid.contains(&k)
    }

    /// Value at `(i, j)`, `None` outside the valid range.
    pub fn get(&self, i: usize, j: usize) -> Option<Complex64> {
        if !self.is_valid(i, j) {
            return None;
        }
        let nx = match self.shape {
            Shape::D1(n) => n,
            Shape::D2(nx, _) => nx,
        };
        Some(self.values[j * nx + i])
    }

    pub fn valid_values(&self) -> Vec<Complex64> {
        self.values.iter().copied().filter(|z| !z.re.is_nan()).collect()
    }
}

/// Applies a two-point operator along `axis`.
pub fn apply_diff(
    field: &[Complex64],
    shape: Shape,
    op: DiffOp,
    axis: Axis,
    spacing: f64,
) -> Result<Stencilled, GridError> {
    apply_stencil(field, shape, &op.weights(spacing), axis, spacing)
}

/// Applies an arbitrary `(offset, weight)` stencil along `axis`.
pub fn apply_stencil(
    field: &[Complex64],
    shape: Shape,
    weights: &[(isize, f64)],
    axis: Axis,
    spacing: f64,
) -> Result<Stencilled, GridError> {
    if field.len() != shape.len() {
        return Err(GridError::Shape { len: field.len(), expected: shape.len() });
    }
    let n = shape.extent(axis)?;
    if n < 2 {
        return Err(GridError::Invalid(format!("axis {axis} has {n} points")));
    }
    if !(spacing > 0.0) {
        return Err(GridError::Invalid(format!("spacing {spacing} must be positive")));
    }
    let lo_off = weights.iter().map(|w| w.0).min().unwrap_or(0);
    let hi_off = weights.iter().map(|w| w.0).max().unwrap_or(0);
    let start = (-lo_off).max(0) as usize;
    let end = (n as isize - hi_off.max(0)).max(start as isize) as usize;

    let (nx, ny) = match shape {
        Shape::D1(n) => (n, 1),
        Shape::D2(nx, ny) => (nx, ny),
    };
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let mut out = vec![nan; field.len()];
    for j in 0..ny {
        for i in 0..nx {
            let k = if axis == Axis::X { i } else { j };
            if k < start || k >= end {
                continue;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for &(off, w) in weights {
                let (ii, jj) = match axis {
                    Axis::X => ((i as isize + off) as usize, j),
                    Axis::Y => (i, (j as isize + off) as usize),
                };
                acc += field[jj * nx + ii] * w;
            }
            out[j * nx + i] = acc;
        }
    }
    Ok(Stencilled { values: out, shape, axis, valid: start..end })
}
