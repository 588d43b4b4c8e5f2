//! Continuous absorbing-boundary operators as constant-coefficient
//! polynomials in `(d/dx, d/dy, d/dt)`.

use num_complex::Complex64;

use crate::grid::{Axis, Corner, Edge, Side1d};

use super::AbcError;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// One monomial `coeff * d^x_order/dx * d^y_order/dy * d^t_order/dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpTerm {
    pub coeff: Complex64,
    pub x_order: u8,
    pub y_order: u8,
    pub t_order: u8,
}

/// Linear differential operator with constant complex coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PdeOperator {
    pub terms: Vec<OpTerm>,
}

impl PdeOperator {
    fn push(&mut self, coeff: Complex64, x_order: u8, y_order: u8, t_order: u8) {
        self.terms.push(OpTerm { coeff, x_order, y_order, t_order });
    }

    /// Symbol on the plane wave `exp(i (xi x + eta y - omega t))`, i.e. the
    /// factor the operator multiplies that wave by.
    pub fn symbol(&self, xi: f64, eta: f64, omega: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| {
                t.coeff
                    * (I * xi).powu(t.x_order as u32)
                    * (I * eta).powu(t.y_order as u32)
                    * (-I * omega).powu(t.t_order as u32)
            })
            .sum()
    }

    /// Coefficient of a given monomial (zero if absent).
    pub fn coefficient(&self, x_order: u8, y_order: u8, t_order: u8) -> Complex64 {
        self.terms
            .iter()
            .filter(|t| (t.x_order, t.y_order, t.t_order) == (x_order, y_order, t_order))
            .map(|t| t.coeff)
            .sum()
    }

    /// Swaps the roles of x and y.
    pub fn transposed(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| OpTerm { x_order: t.y_order, y_order: t.x_order, ..*t })
                .collect(),
        }
    }

    pub fn max_x_order(&self) -> u8 {
        self.terms.iter().map(|t| t.x_order).max().unwrap_or(0)
    }
}

fn signed(side: Side1d, k: f64) -> f64 {
    match side {
        Side1d::Right => k,
        Side1d::Left => -k,
    }
}

/// ABC(1,1) in 1D. On the right:
/// `-psi_xt + i(3k0^2 - V) psi_x + (k0^3 - 3 k0 V) psi + 3 i k0 psi_t = 0`;
/// the left boundary uses the expansion centered at `-k0`.
pub fn abc11_operator_1d(side: Side1d, k0: f64, v: f64) -> PdeOperator {
    let c = signed(side, k0);
    let mut op = PdeOperator::default();
    op.push(re(-1.0), 1, 0, 1);
    op.push(I * (3.0 * c * c - v), 1, 0, 0);
    op.push(re(c * c * c - 3.0 * c * v), 0, 0, 0);
    op.push(I * (3.0 * c), 0, 0, 1);
    op
}

/// Two-parameter linear interpolation condition. On the right:
/// `i(a1 + a2) psi_x + i psi_t - V psi + a1 a2 psi = 0`.
pub fn abc10_operator_1d(
    side: Side1d,
    alpha1: f64,
    alpha2: f64,
    v: f64,
) -> Result<PdeOperator, AbcError> {
    if !(alpha1 > 0.0 && alpha2 > 0.0) {
        return Err(AbcError::Parameter(format!(
            "kinetic energy parameters must be positive, got ({alpha1}, {alpha2})"
        )));
    }
    let s = signed(side, 1.0);
    let mut op = PdeOperator::default();
    op.push(I * (s * (alpha1 + alpha2)), 1, 0, 0);
    op.push(I, 0, 0, 1);
    op.push(re(alpha1 * alpha2 - v), 0, 0, 0);
    Ok(op)
}

/// Product of first-order factors `prod_l (i s d/dx + C_l / 2)` with
/// `s = +1` on the right and `-1` on the left.
pub fn fj_operator_1d(side: Side1d, velocities: &[f64]) -> Result<PdeOperator, AbcError> {
    if velocities.is_empty() || velocities.len() > 3 {
        return Err(AbcError::UnsupportedOrder(velocities.len()));
    }
    if velocities.iter().any(|c| !c.is_finite()) {
        return Err(AbcError::Parameter("group velocities must be finite".into()));
    }
    let s = signed(side, 1.0);
    // poly[m] is the coefficient of d^m/dx^m.
    let mut poly = vec![re(1.0)];
    for &c in velocities {
        let mut next = vec![re(0.0); poly.len() + 1];
        for (m, &a) in poly.iter().enumerate() {
            next[m] += a * (c / 2.0);
            next[m + 1] += a * I * s;
        }
        poly = next;
    }
    let mut op = PdeOperator::default();
    for (m, a) in poly.into_iter().enumerate() {
        op.push(a, m as u8, 0, 0);
    }
    Ok(op)
}

/// ABC(1,1) on a 2D edge with normal-direction parameter `center` (xi0 on
/// east/west, eta0 on north/south). East form:
/// `i psi_xyy - psi_xt + i(3c^2 - V) psi_x + (c^3 - 3cV) psi + 3c psi_yy + 3ic psi_t = 0`
/// with `c = xi0`; west uses `c = -xi0`, north/south are the transposes.
pub fn abc11_edge_operator(edge: Edge, center: f64, v: f64) -> PdeOperator {
    let c = if edge.is_upper() { center } else { -center };
    let mut op = PdeOperator::default();
    op.push(I, 1, 2, 0);
    op.push(re(-1.0), 1, 0, 1);
    op.push(I * (3.0 * c * c - v), 1, 0, 0);
    op.push(re(c * c * c - 3.0 * c * v), 0, 0, 0);
    op.push(re(3.0 * c), 0, 2, 0);
    op.push(I * (3.0 * c), 0, 0, 1);
    match edge.normal() {
        Axis::X => op,
        Axis::Y => op.transposed(),
    }
}

/// Corner ABC(1,1) from the product of the two (1,1) expansions centered
/// at `(+-xi0, +-eta0)`, signs chosen by the corner.
pub fn abc11_corner_operator(corner: Corner, xi0: f64, eta0: f64, v: f64) -> PdeOperator {
    let a = if corner.x_edge().is_upper() { xi0 } else { -xi0 };
    let b = if corner.y_edge().is_upper() { eta0 } else { -eta0 };
    let mut op = PdeOperator::default();
    op.push(I, 1, 1, 1);
    op.push(re(3.0 * a), 0, 1, 1);
    op.push(re(3.0 * b), 1, 0, 1);
    op.push(re(3.0 * a * a + 3.0 * b * b - v), 1, 1, 0);
    op.push(I * (-9.0 * a * b), 0, 0, 1);
    op.push(-I * (a * a * a + 9.0 * a * b * b - 3.0 * a * v), 0, 1, 0);
    op.push(-I * (b * b * b + 9.0 * a * a * b - 3.0 * b * v), 1, 0, 0);
    op.push(re(9.0 * a * b * v - 3.0 * a * a * a * b - 3.0 * b * b * b * a), 0, 0, 0);
    op
}
