use num_complex::Complex64;

use crate::abc::{
    abc10_rows_1d, abc11_corner_rows, abc11_edge_row, abc11_rows_1d, corner_point, fj_rows_1d,
    AbcFamily, BoundaryRow,
};
use crate::grid::{Corner, Edge, GridSpec, Side1d};
use crate::linsolve::StepSystem;

use super::config::{BoundaryConfig, Nonlinearity, PhysicsSpec};
use super::SlabError;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Exact solution of `i psi_t = f(|psi|^2) psi` over one step:
/// `psi* = exp(-i f(|psi|^2) dt) psi`.
pub fn nonlinear_phase_step(psi: &[Complex64], nonlinearity: Nonlinearity, dt: f64) -> Vec<Complex64> {
    psi.iter().map(|&z| rotate(z, nonlinearity, dt)).collect()
}

fn rotate(z: Complex64, nonlinearity: Nonlinearity, dt: f64) -> Complex64 {
    let phase = -nonlinearity.eval(z.norm_sqr()) * dt;
    z * Complex64::from_polar(1.0, phase)
}

/// True when `(i, j)` lies within `layers` of an artificial boundary.
pub fn in_band(grid: &GridSpec, layers: usize, i: usize, j: usize) -> bool {
    let near = |k: usize, n: usize| k < layers || k + layers >= n;
    near(i, grid.nx()) || (grid.dim() == 2 && near(j, grid.ny()))
}

/// Flattened ids of the boundary band, in increasing order.
pub fn band_ids(grid: &GridSpec, layers: usize) -> Vec<usize> {
    (0..grid.len())
        .filter(|&id| {
            let (i, j) = grid.coords_of(id);
            in_band(grid, layers, i, j)
        })
        .collect()
}

/// Copy of `psi_n` with the phase step applied on the band only.
pub fn split_on_band(
    grid: &GridSpec,
    psi_n: &[Complex64],
    nonlinearity: Nonlinearity,
    dt: f64,
    layers: usize,
) -> Vec<Complex64> {
    let mut out = psi_n.to_vec();
    for id in band_ids(grid, layers) {
        out[id] = rotate(psi_n[id], nonlinearity, dt);
    }
    out
}

/// `W = (3/2) f(|psi^n|^2) - (1/2) f(|psi^{n-1}|^2) + V`, per grid point.
pub fn effective_potential(
    psi_n: &[Complex64],
    psi_nm1: &[Complex64],
    nonlinearity: Nonlinearity,
    potential: &[f64],
) -> Vec<f64> {
    psi_n
        .iter()
        .zip(psi_nm1)
        .zip(potential)
        .map(|((a, b), v)| 1.5 * nonlinearity.eval(a.norm_sqr()) - 0.5 * nonlinearity.eval(b.norm_sqr()) + v)
        .collect()
}

/// Potential sampled at every grid point.
pub fn sample_potential(grid: &GridSpec, physics: &PhysicsSpec) -> Vec<f64> {
    let dim = grid.dim();
    grid.points().map(|(x, y)| physics.potential.eval(x, y, dim)).collect()
}

pub fn is_interior(grid: &GridSpec, i: usize, j: usize) -> bool {
    let inner = |k: usize, n: usize| k > 0 && k + 1 < n;
    inner(i, grid.nx()) && (grid.dim() == 1 || inner(j, grid.ny()))
}

/// Crank-Nicolson row at an interior point, multiplied through by `dt`:
/// `i psi' + dt/2 (Lap psi' - W psi') = i psi + dt/2 (-Lap psi + W psi)`.
fn interior_row_into(
    grid: &GridSpec,
    psi_n: &[Complex64],
    w: &[f64],
    i: usize,
    j: usize,
    out: &mut Vec<(usize, Complex64)>,
) -> Complex64 {
    let dt = grid.dt;
    let id = grid.id(i, j);
    let ax = dt / (2.0 * grid.dx() * grid.dx());
    let mut centre = I - Complex64::new(2.0 * ax + 0.5 * dt * w[id], 0.0);
    let mut lap = (psi_n[id - 1] - 2.0 * psi_n[id] + psi_n[id + 1]) * ax;
    out.clear();
    if grid.dim() == 2 {
        let nx = grid.nx();
        let ay = dt / (2.0 * grid.dy() * grid.dy());
        centre -= 2.0 * ay;
        lap += (psi_n[id - nx] - 2.0 * psi_n[id] + psi_n[id + nx]) * ay;
        out.push((id - nx, Complex64::new(ay, 0.0)));
        out.push((id - 1, Complex64::new(ax, 0.0)));
        out.push((id, centre));
        out.push((id + 1, Complex64::new(ax, 0.0)));
        out.push((id + nx, Complex64::new(ay, 0.0)));
    } else {
        out.push((id - 1, Complex64::new(ax, 0.0)));
        out.push((id, centre));
        out.push((id + 1, Complex64::new(ax, 0.0)));
    }
    I * psi_n[id] - lap + 0.5 * dt * w[id] * psi_n[id]
}

/// Rows for every interior point, keyed by flattened id. `potential` is V
/// at each grid point.
pub fn interior_rows(
    grid: &GridSpec,
    psi_n: &[Complex64],
    psi_nm1: &[Complex64],
    nonlinearity: Nonlinearity,
    potential: &[f64],
) -> Vec<(usize, BoundaryRow)> {
    let w = effective_potential(psi_n, psi_nm1, nonlinearity, potential);
    let mut buf = Vec::with_capacity(5);
    (0..grid.len())
        .filter_map(|id| {
            let (i, j) = grid.coords_of(id);
            is_interior(grid, i, j).then(|| {
                let rhs = interior_row_into(grid, psi_n, &w, i, j, &mut buf);
                (id, BoundaryRow { entries: buf.clone(), rhs })
            })
        })
        .collect()
}

/// Per-edge wave-number profiles indexed by [`Edge`]; 1D profiles hold one value.
pub type EdgeProfiles = [Vec<f64>; 4];

/// All boundary rows for one step, keyed by flattened id.
pub fn boundary_rows(
    grid: &GridSpec,
    boundary: &BoundaryConfig,
    profiles: &EdgeProfiles,
    potential: &[f64],
    psi_star: &[Complex64],
    k_floor: f64,
) -> Result<Vec<(usize, BoundaryRow)>, SlabError> {
    let mut rows = Vec::new();
    if boundary.family == AbcFamily::Dirichlet {
        for id in 0..grid.len() {
            let (i, j) = grid.coords_of(id);
            if !is_interior(grid, i, j) {
                rows.push((id, BoundaryRow { entries: vec![(id, Complex64::new(1.0, 0.0))], rhs: 0.0.into() }));
            }
        }
        return Ok(rows);
    }
    if grid.dim() == 1 {
        let n = grid.nx();
        for side in [Side1d::Left, Side1d::Right] {
            let id = if side == Side1d::Left { 0 } else { n - 1 };
            let k0 = profiles[side.edge() as usize][0];
            let v = potential[id];
            let row = match &boundary.family {
                AbcFamily::Abc11 => abc11_rows_1d(side, k0, v, grid.dx(), grid.dt, psi_star)?,
                AbcFamily::Abc10 { alphas } => {
                    // alpha = 0 degenerates the condition; the floor keeps it well posed.
                    let (a1, a2) = alphas.unwrap_or_else(|| {
                        let a = k0.max(k_floor).max(f64::MIN_POSITIVE);
                        (a, a)
                    });
                    abc10_rows_1d(side, a1, a2, v, grid.dx(), grid.dt, psi_star)?
                }
                AbcFamily::Fj { order, velocities } => {
                    let vel = velocities.clone().unwrap_or_else(|| vec![2.0 * k0; *order]);
                    fj_rows_1d(side, &vel, grid.dx(), psi_star)?
                }
                AbcFamily::Dirichlet => unreachable!(),
            };
            rows.push((id, row));
        }
        return Ok(rows);
    }
    if boundary.family != AbcFamily::Abc11 {
        return Err(SlabError::Config(format!("{} has no 2D form", boundary.family.name())));
    }
    let (nx, ny) = (grid.nx(), grid.ny());
    for edge in Edge::ALL {
        let profile = &profiles[edge as usize];
        let tangential = if edge.normal() == crate::grid::Axis::X { ny } else { nx };
        for at in 1..tangential - 1 {
            let (i, j) = match edge {
                Edge::West => (0, at),
                Edge::East => (nx - 1, at),
                Edge::South => (at, 0),
                Edge::North => (at, ny - 1),
            };
            let id = grid.id(i, j);
            rows.push((id, abc11_edge_row(edge, at, profile[at], potential[id], grid, psi_star)?));
        }
    }
    for corner in Corner::ALL {
        let (i, j) = corner_point(corner, grid);
        let id = grid.id(i, j);
        let xi0 = profiles[corner.x_edge() as usize][j];
        let eta0 = profiles[corner.y_edge() as usize][i];
        rows.push((id, abc11_corner_rows(corner, xi0, eta0, potential[id], grid, psi_star)?));
    }
    Ok(rows)
}

/// Assembles the step system: interior rows from `psi_n`, boundary rows as
/// given. Every row is scaled so its largest coefficient has modulus one.
/// Each grid point must receive exactly one row.
pub fn assemble_step(
    grid: &GridSpec,
    psi_n: &[Complex64],
    w: &[f64],
    mut boundary: Vec<(usize, BoundaryRow)>,
) -> Result<StepSystem, SlabError> {
    let n = grid.len();
    boundary.sort_by_key(|r| r.0);
    if let Some(pair) = boundary.windows(2).find(|p| p[0].0 == p[1].0) {
        return Err(SlabError::Assembly(format!("grid point {} has two boundary rows", pair[0].0)));
    }
    let nnz = 5 * n + boundary.iter().map(|r| r.1.entries.len()).sum::<usize>();
    let mut system = StepSystem::with_capacity(n, nnz);
    let mut next = boundary.into_iter().peekable();
    let mut buf = Vec::with_capacity(9);
    for id in 0..n {
        let (i, j) = grid.coords_of(id);
        let has_boundary_row = next.peek().is_some_and(|r| r.0 == id);
        let rhs = if is_interior(grid, i, j) {
            if has_boundary_row {
                return Err(SlabError::Assembly(format!("interior point {id} also has a boundary row")));
            }
            interior_row_into(grid, psi_n, w, i, j, &mut buf)
        } else {
            if !has_boundary_row {
                return Err(SlabError::Assembly(format!("boundary point ({i}, {j}) has no row")));
            }
            let (_, row) = next.next().expect("peeked");
            buf.clear();
            buf.extend(row.entries);
            row.rhs
        };
        let scale = buf.iter().map(|e| e.1.norm()).fold(0.0, f64::max);
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(SlabError::Assembly(format!("row {id} has scale {scale}")));
        }
        for e in buf.iter_mut() {
            e.1 /= scale;
        }
        system.push_row(&buf, rhs / scale);
    }
    if let Some((id, _)) = next.next() {
        return Err(SlabError::Assembly(format!("row for point {id} outside the grid")));
    }
    Ok(system)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::AxisSpec;
    use crate::linsolve::{solve_banded, solve_sparse, KrylovConfig};
    use crate::slab::config::{ParamMode, Potential};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid_1d(n: usize) -> GridSpec {
        GridSpec::new_1d(AxisSpec::new(0.0, n as f64 * 0.1, n).unwrap(), 0.01).unwrap()
    }

    fn grid_2d(n: usize, dt: f64) -> GridSpec {
        let a = AxisSpec::new(0.0, n as f64 * 0.1, n).unwrap();
        GridSpec::new_2d(a, a, dt).unwrap()
    }

    #[test]
    fn phase_step_closed_forms() {
        let out = nonlinear_phase_step(&[c(1.0, 0.0)], Nonlinearity::Cubic { g: -2.0 }, PI / 2.0);
        assert!((out[0] - c(-1.0, 0.0)).norm() < 1e-15);
        let zero = nonlinear_phase_step(&[c(0.0, 0.0)], Nonlinearity::Cubic { g: 5.0 }, 1.0);
        assert_eq!(zero[0], c(0.0, 0.0));
    }

    proptest! {
        #[test]
        fn phase_step_preserves_modulus(vals in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..64)) {
            let psi: Vec<_> = vals.iter().map(|&(a, b)| c(a, b)).collect();
            let out = nonlinear_phase_step(&psi, Nonlinearity::Cubic { g: -2.0 }, 0.01);
            for (a, b) in psi.iter().zip(&out) {
                prop_assert!((a.norm() - b.norm()).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn band_is_the_union_of_edge_layers() {
        let g = grid_2d(10, 0.01);
        let band = band_ids(&g, 2);
        // 121 points minus the 7x7 block of indices 2..=8.
        assert_eq!(band.len(), 121 - 49);
        assert!(band.contains(&g.id(5, 1)) && band.contains(&g.id(9, 5)));
        assert!(!band.contains(&g.id(2, 2)));
        assert_eq!(band_ids(&grid_1d(10), 2), vec![0, 1, 9, 10]);
    }

    #[test]
    fn free_1d_interior_row_is_crank_nicolson() {
        let g = grid_1d(10);
        let psi = vec![c(0.0, 0.0); 11];
        let rows = interior_rows(&g, &psi, &psi, Nonlinearity::Linear, &[0.0; 11]);
        assert_eq!(rows.len(), 9);
        let (id, row) = &rows[3];
        let a = g.dt / (2.0 * g.dx() * g.dx());
        assert!((a - 0.5).abs() < 1e-12);
        assert_eq!(row.coefficient(id - 1), c(a, 0.0));
        assert_eq!(row.coefficient(id + 1), c(a, 0.0));
        assert_eq!(row.coefficient(*id), c(-2.0 * a, 1.0));
        assert_eq!(row.entries.len(), 3);
    }

    #[test]
    fn constant_field_rotates_by_cayley_factor() {
        let g = grid_1d(10);
        let (v, cst) = (0.7, c(0.3, -0.4));
        let psi = vec![cst; 11];
        let rows = interior_rows(&g, &psi, &psi, Nonlinearity::Linear, &[v; 11]);
        let want = cst * c(1.0, -v * g.dt / 2.0) / c(1.0, v * g.dt / 2.0);
        let trial = vec![want; 11];
        for (_, row) in &rows {
            assert!(row.residual(&trial).norm() < 1e-15);
        }
        assert!((want.norm() - cst.norm()).abs() < 1e-15);
    }

    #[test]
    fn extrapolated_potential_of_unit_modulus() {
        let psi: Vec<_> = (0..5).map(|k| Complex64::from_polar(1.0, k as f64)).collect();
        let prev: Vec<_> = (0..5).map(|k| Complex64::from_polar(1.0, -(k as f64))).collect();
        let w = effective_potential(&psi, &prev, Nonlinearity::Cubic { g: -2.0 }, &[0.25; 5]);
        assert!(w.iter().all(|&x| (x - (-2.0 + 0.25)).abs() < 1e-14));
    }

    fn fixed_profiles(g: &GridSpec, k: f64) -> EdgeProfiles {
        let (nx, ny) = (g.nx(), g.ny());
        [vec![k; ny], vec![k; ny], vec![k; nx], vec![k; nx]]
    }

    #[test]
    fn row_counts() {
        let g = grid_1d(10);
        let psi = vec![c(0.1, 0.0); 11];
        let bc = BoundaryConfig::uniform(AbcFamily::Abc11, ParamMode::Fixed(1.0));
        let b = boundary_rows(&g, &bc, &fixed_profiles(&g, 1.0), &[0.0; 11], &psi, 0.05).unwrap();
        assert_eq!(b.iter().map(|r| r.0).collect::<Vec<_>>(), vec![0, 10]);
        let s = assemble_step(&g, &psi, &[0.0; 11], b).unwrap();
        assert_eq!(s.n_unknowns(), 11);
        assert!(s.is_complete());
        assert!(s.bandwidths().0 <= 2 && s.bandwidths().1 <= 2);

        let g = grid_2d(10, 0.01);
        let psi = vec![c(0.1, 0.0); 121];
        let b = boundary_rows(&g, &bc, &fixed_profiles(&g, 1.0), &[0.0; 121], &psi, 0.05).unwrap();
        let corners = [0, 10, 110, 120];
        assert_eq!(b.len(), 4 + 4 * 9);
        assert_eq!(b.iter().filter(|r| corners.contains(&r.0)).count(), 4);
        let s = assemble_step(&g, &psi, &[0.0; 121], b).unwrap();
        assert_eq!(s.rows_pushed(), 121);
        assert!((0..121).all(|i| s.row(i).0.len() <= 9));
    }

    #[test]
    fn coverage_errors_are_reported() {
        let g = grid_1d(10);
        let psi = vec![c(0.1, 0.0); 11];
        let bc = BoundaryConfig::uniform(AbcFamily::Abc11, ParamMode::Fixed(1.0));
        let mut b = boundary_rows(&g, &bc, &fixed_profiles(&g, 1.0), &[0.0; 11], &psi, 0.05).unwrap();
        let missing = vec![b[0].clone()];
        assert!(matches!(assemble_step(&g, &psi, &[0.0; 11], missing), Err(SlabError::Assembly(_))));
        b.push(b[0].clone());
        assert!(matches!(assemble_step(&g, &psi, &[0.0; 11], b.clone()), Err(SlabError::Assembly(_))));
        b.pop();
        b.push((4, b[0].1.clone()));
        assert!(matches!(assemble_step(&g, &psi, &[0.0; 11], b), Err(SlabError::Assembly(_))));
    }

    #[test]
    fn linear_case_ignores_the_phase_step() {
        let g = grid_1d(20);
        let psi: Vec<_> = (0..21).map(|k| Complex64::from_polar(0.5, 0.3 * k as f64)).collect();
        let star = split_on_band(&g, &psi, Nonlinearity::Linear, g.dt, 2);
        assert_eq!(star, psi);
        let bc = BoundaryConfig::uniform(AbcFamily::Abc11, ParamMode::Fixed(0.3));
        let p = fixed_profiles(&g, 0.3);
        let a = assemble_step(&g, &psi, &[0.0; 21], boundary_rows(&g, &bc, &p, &[0.0; 21], &star, 0.05).unwrap());
        let b = assemble_step(&g, &psi, &[0.0; 21], boundary_rows(&g, &bc, &p, &[0.0; 21], &psi, 0.05).unwrap());
        assert_eq!(a.unwrap(), b.unwrap());
    }

    fn gaussian_2d(g: &GridSpec) -> Vec<Complex64> {
        g.points()
            .map(|(x, y)| Complex64::from_polar((-((x - 1.0).powi(2) + (y - 1.0).powi(2)) * 8.0).exp(), x - y))
            .collect()
    }

    #[test]
    fn krylov_matches_dense_oracle_on_free_2d_system() {
        let g = grid_2d(20, 0.01);
        let psi = gaussian_2d(&g);
        let v = vec![0.0; g.len()];
        let bc = BoundaryConfig::uniform(AbcFamily::Dirichlet, ParamMode::Fixed(0.0));
        let b = boundary_rows(&g, &bc, &fixed_profiles(&g, 0.0), &v, &psi, 0.05).unwrap();
        let s = assemble_step(&g, &psi, &v, b).unwrap();
        // Dense oracle: expand to a full matrix and eliminate with the banded
        // solver (bandwidth nx covers every coupling).
        let n = g.len();
        let mut dense = vec![vec![c(0.0, 0.0); n]; n];
        for (r, row) in dense.iter_mut().enumerate() {
            let (cols, vals) = s.row(r);
            for (&cc, &vv) in cols.iter().zip(vals) {
                row[cc] = vv;
            }
        }
        let (oracle, _) = solve_banded(&StepSystem::from_dense(&dense, s.rhs.clone())).unwrap();
        let cfg = KrylovConfig::default();
        let (x, rep) = solve_sparse(&s, cfg, Some(&psi)).unwrap();
        assert!(rep.converged);
        let (x0, _) = solve_sparse(&s, cfg, None).unwrap();
        for ((a, b), z) in x.iter().zip(&oracle).zip(&x0) {
            assert!((a - b).norm() < 1e-8);
            assert!((a - z).norm() < 10.0 * cfg.tol);
        }
    }

    #[test]
    fn band_and_edge_potential_choice() {
        let physics = PhysicsSpec {
            nonlinearity: Nonlinearity::Linear,
            potential: Potential::Gaussian { amplitude: 1.0, sigma: 1.0, x0: 0.5, y0: 0.0 },
        };
        let g = grid_1d(10);
        let v = sample_potential(&g, &physics);
        assert!((v[5] - 1.0).abs() < 1e-15);
        assert!((v[0] - (-0.125f64).exp()).abs() < 1e-15);
    }
}
