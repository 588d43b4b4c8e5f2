//! Discrete boundary rows.
//!
//! Each continuous term is discretized on the cell next to the boundary.
//! Along a boundary normal, order 0 becomes the two-point sum `S` and order
//! 1 the two-point difference `D` (backward on upper boundaries, forward on
//! lower ones). Along an edge tangent, order 2 becomes `D+ D-`. In time,
//! order 0 averages `(psi^{n+1} + psi*) / 2` and order 1 takes
//! `(psi^{n+1} - psi*) / dt`.

use num_complex::Complex64;

use crate::grid::{second_difference_weights, Corner, DiffOp, Edge, GridSpec, Side1d};

use super::operator::{
    abc10_operator_1d, abc11_corner_operator, abc11_edge_operator, abc11_operator_1d,
    fj_operator_1d, PdeOperator,
};
use super::AbcError;

/// One linear equation in the unknowns `psi^{n+1}`: `sum coeff * psi[id] = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryRow {
    pub entries: Vec<(usize, Complex64)>,
    pub rhs: Complex64,
}

impl BoundaryRow {
    /// `sum coeff * values[id] - rhs`.
    pub fn residual(&self, values: &[Complex64]) -> Complex64 {
        self.entries.iter().map(|&(id, c)| c * values[id]).sum::<Complex64>() - self.rhs
    }

    pub fn coefficient(&self, id: usize) -> Complex64 {
        self.entries.iter().filter(|e| e.0 == id).map(|e| e.1).sum()
    }

    pub fn max_coefficient(&self) -> f64 {
        self.entries.iter().map(|e| e.1.norm()).fold(0.0, f64::max)
    }

    fn add(&mut self, id: usize, c: Complex64) {
        match self.entries.iter_mut().find(|e| e.0 == id) {
            Some(e) => e.1 += c,
            None => self.entries.push((id, c)),
        }
    }

    fn finish(mut self) -> Result<Self, AbcError> {
        self.entries.sort_by_key(|e| e.0);
        if self.max_coefficient() > 0.0 {
            Ok(self)
        } else {
            Err(AbcError::Parameter("boundary row has no nonzero coefficient".into()))
        }
    }
}

/// How one coordinate direction is discretized at the row's location.
#[derive(Debug, Clone, Copy)]
enum Role {
    /// Normal direction at the upper end: points `n-2, n-1`.
    Upper { last: usize },
    /// Normal direction at the lower end: points `0, 1`.
    Lower,
    /// Tangential direction at index `at`.
    Tangent { at: usize },
    /// Direction absent (1D y).
    Absent,
}

fn weights(role: Role, order: u8, h: f64) -> Result<Vec<(usize, f64)>, AbcError> {
    let shift = |base: usize, w: &[(isize, f64)]| -> Vec<(usize, f64)> {
        w.iter().map(|&(o, c)| ((base as isize + o) as usize, c)).collect()
    };
    let out = match (role, order) {
        (Role::Upper { last }, 0) => shift(last, &DiffOp::SMinus.weights(h)),
        (Role::Upper { last }, 1) => shift(last, &DiffOp::DMinus.weights(h)),
        (Role::Lower, 0) => shift(0, &DiffOp::SPlus.weights(h)),
        (Role::Lower, 1) => shift(0, &DiffOp::DPlus.weights(h)),
        (Role::Tangent { at }, 0) => vec![(at, 1.0)],
        (Role::Tangent { at }, 2) => shift(at, &second_difference_weights(h)),
        (Role::Absent, 0) => vec![(0, 1.0)],
        _ => {
            return Err(AbcError::Discretization(format!(
                "no stencil for derivative order {order} in role {role:?}"
            )))
        }
    };
    Ok(out)
}

struct Frame {
    x: Role,
    y: Role,
    nx: usize,
    hx: f64,
    hy: f64,
    dt: f64,
}

fn discretize(op: &PdeOperator, f: &Frame, psi_star: &[Complex64]) -> Result<BoundaryRow, AbcError> {
    let mut row = BoundaryRow { entries: Vec::with_capacity(9), rhs: Complex64::new(0.0, 0.0) };
    for term in &op.terms {
        if term.coeff == Complex64::new(0.0, 0.0) {
            continue;
        }
        let wx = weights(f.x, term.x_order, f.hx)?;
        let wy = weights(f.y, term.y_order, f.hy)?;
        let (m_fac, r_fac) = match term.t_order {
            0 => (0.5, -0.5),
            1 => (1.0 / f.dt, 1.0 / f.dt),
            o => return Err(AbcError::Discretization(format!("time derivative order {o}"))),
        };
        for &(j, b) in &wy {
            for &(i, a) in &wx {
                let id = j * f.nx + i;
                let cw = term.coeff * (a * b);
                row.add(id, cw * m_fac);
                let star = psi_star
                    .get(id)
                    .ok_or_else(|| AbcError::Index(format!("psi* has no entry {id}")))?;
                row.rhs += cw * r_fac * star;
            }
        }
    }
    row.finish()
}

fn check_steps(dx: f64, dt: f64) -> Result<(), AbcError> {
    if dx > 0.0 && dt > 0.0 && dx.is_finite() && dt.is_finite() {
        Ok(())
    } else {
        Err(AbcError::Config(format!("spacing {dx} and time step {dt} must be positive")))
    }
}

fn frame_1d(side: Side1d, n: usize, dx: f64, dt: f64) -> Result<Frame, AbcError> {
    check_steps(dx, dt)?;
    if n < 2 {
        return Err(AbcError::Index(format!("1D field of {n} points")));
    }
    let x = match side {
        Side1d::Right => Role::Upper { last: n - 1 },
        Side1d::Left => Role::Lower,
    };
    Ok(Frame { x, y: Role::Absent, nx: n, hx: dx, hy: 1.0, dt })
}

/// Discretizes any 1D operator whose x order is at most 1.
pub fn operator_row_1d(
    op: &PdeOperator,
    side: Side1d,
    dx: f64,
    dt: f64,
    psi_star: &[Complex64],
) -> Result<BoundaryRow, AbcError> {
    discretize(op, &frame_1d(side, psi_star.len(), dx, dt)?, psi_star)
}

/// ABC(1,1) row at a 1D boundary. `psi_star` is the whole split field.
pub fn abc11_rows_1d(
    side: Side1d,
    k0: f64,
    v: f64,
    dx: f64,
    dt: f64,
    psi_star: &[Complex64],
) -> Result<BoundaryRow, AbcError> {
    if !(k0 >= 0.0) {
        return Err(AbcError::Parameter(format!("k0 = {k0} must be non-negative")));
    }
    operator_row_1d(&abc11_operator_1d(side, k0, v), side, dx, dt, psi_star)
}

/// ABC(1,0) row at a 1D boundary.
pub fn abc10_rows_1d(
    side: Side1d,
    alpha1: f64,
    alpha2: f64,
    v: f64,
    dx: f64,
    dt: f64,
    psi_star: &[Complex64],
) -> Result<BoundaryRow, AbcError> {
    operator_row_1d(&abc10_operator_1d(side, alpha1, alpha2, v)?, side, dx, dt, psi_star)
}

/// Group-velocity product condition. `d^m/dx^m` uses the one-sided m-th
/// difference on the outermost `m + 1` points (backward on the right,
/// forward on the left) applied to the time average.
pub fn fj_rows_1d(
    side: Side1d,
    velocities: &[f64],
    dx: f64,
    psi_star: &[Complex64],
) -> Result<BoundaryRow, AbcError> {
    let op = fj_operator_1d(side, velocities)?;
    check_steps(dx, 1.0)?;
    let n = psi_star.len();
    if n < velocities.len() + 1 {
        return Err(AbcError::Index(format!("{n} points cannot hold an order-{} stencil", velocities.len())));
    }
    let mut row = BoundaryRow { entries: Vec::new(), rhs: Complex64::new(0.0, 0.0) };
    for term in &op.terms {
        let m = term.x_order as usize;
        let scale = dx.powi(m as i32);
        for k in 0..=m {
            let binom = binomial(m, k) as f64;
            let (id, w) = match side {
                // backward difference: sum_k (-1)^k C(m,k) f[n-1-k]
                Side1d::Right => (n - 1 - k, if k % 2 == 0 { binom } else { -binom }),
                // forward difference: sum_k (-1)^(m-k) C(m,k) f[k]
                Side1d::Left => (k, if (m - k) % 2 == 0 { binom } else { -binom }),
            };
            let cw = term.coeff * (w / scale);
            row.add(id, cw * 0.5);
            row.rhs -= cw * 0.5 * psi_star[id];
        }
    }
    row.finish()
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn grid_2d(grid: &GridSpec) -> Result<(usize, usize), AbcError> {
    match grid.y {
        Some(_) => Ok((grid.nx(), grid.ny())),
        None => Err(AbcError::Config("2D boundary rows need a 2D grid".into())),
    }
}

/// ABC(1,1) row at tangential index `at` of an edge; `center` is xi0 (east,
/// west) or eta0 (north, south) at that point.
pub fn abc11_edge_row(
    edge: Edge,
    at: usize,
    center: f64,
    v: f64,
    grid: &GridSpec,
    psi_star: &[Complex64],
) -> Result<BoundaryRow, AbcError> {
    let (nx, ny) = grid_2d(grid)?;
    check_steps(grid.dx().min(grid.dy()), grid.dt)?;
    let tangential = if edge.normal() == crate::grid::Axis::X { ny } else { nx };
    if at == 0 || at + 1 >= tangential {
        return Err(AbcError::Index(format!(
            "index {at} on edge {edge:?} is a corner or outside 1..{}",
            tangential - 1
        )));
    }
    let normal = |n: usize| if edge.is_upper() { Role::Upper { last: n - 1 } } else { Role::Lower };
    let (x, y) = match edge {
        Edge::East | Edge::West => (normal(nx), Role::Tangent { at }),
        Edge::North | Edge::South => (Role::Tangent { at }, normal(ny)),
    };
    let frame = Frame { x, y, nx, hx: grid.dx(), hy: grid.dy(), dt: grid.dt };
    discretize(&abc11_edge_operator(edge, center, v), &frame, psi_star)
}

/// Rows for every non-corner point of an edge. `profile` is indexed by the
/// tangential grid index (its endpoints are ignored here).
pub fn abc11_edge_rows_2d(
    edge: Edge,
    profile: &[f64],
    v: f64,
    grid: &GridSpec,
    psi_star: &[Complex64],
) -> Result<Vec<BoundaryRow>, AbcError> {
    let (nx, ny) = grid_2d(grid)?;
    let tangential = if edge.normal() == crate::grid::Axis::X { ny } else { nx };
    if profile.len() != tangential {
        return Err(AbcError::Index(format!(
            "profile of length {} on an edge of {tangential} points",
            profile.len()
        )));
    }
    (1..tangential - 1)
        .map(|at| abc11_edge_row(edge, at, profile[at], v, grid, psi_star))
        .collect()
}

/// Corner ABC(1,1) row coupling the four points of the corner cell.
pub fn abc11_corner_rows(
    corner: Corner,
    xi0: f64,
    eta0: f64,
    v: f64,
    grid: &GridSpec,
    psi_star: &[Complex64],
) -> Result<BoundaryRow, AbcError> {
    let (nx, ny) = grid_2d(grid)?;
    check_steps(grid.dx().min(grid.dy()), grid.dt)?;
    if !(xi0 >= 0.0 && eta0 >= 0.0) {
        return Err(AbcError::Parameter(format!("corner parameters ({xi0}, {eta0})")));
    }
    let x = if corner.x_edge().is_upper() { Role::Upper { last: nx - 1 } } else { Role::Lower };
    let y = if corner.y_edge().is_upper() { Role::Upper { last: ny - 1 } } else { Role::Lower };
    let frame = Frame { x, y, nx, hx: grid.dx(), hy: grid.dy(), dt: grid.dt };
    discretize(&abc11_corner_operator(corner, xi0, eta0, v), &frame, psi_star)
}

/// Grid point a corner row belongs to.
pub fn corner_point(corner: Corner, grid: &GridSpec) -> (usize, usize) {
    let i = if corner.x_edge().is_upper() { grid.nx() - 1 } else { 0 };
    let j = if corner.y_edge().is_upper() { grid.ny() - 1 } else { 0 };
    (i, j)
}
