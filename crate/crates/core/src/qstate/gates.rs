//! Standard Clifford gates expressed as [`OperatorSum`]s, for driving the
//! statevector with the same gate set the stabilizer backend uses.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{OperatorSum, PauliTerm, SiteOp, StateError};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli(n: usize, q: usize, op: SiteOp) -> Result<OperatorSum, StateError> {
    OperatorSum::single(n, q, op, 1.0)
}

/// `(X + Z)/√2`.
pub fn hadamard(n: usize, q: usize) -> Result<OperatorSum, StateError> {
    OperatorSum::new(
        n,
        vec![
            PauliTerm::single(c(FRAC_1_SQRT_2, 0.0), q, SiteOp::X),
            PauliTerm::single(c(FRAC_1_SQRT_2, 0.0), q, SiteOp::Z),
        ],
    )
}

/// `diag(1, i) = ((1+i)I + (1-i)Z)/2`.
pub fn phase_s(n: usize, q: usize) -> Result<OperatorSum, StateError> {
    OperatorSum::new(
        n,
        vec![PauliTerm::identity(c(0.5, 0.5)), PauliTerm::single(c(0.5, -0.5), q, SiteOp::Z)],
    )
}

/// `diag(1, -i)`.
pub fn phase_sdg(n: usize, q: usize) -> Result<OperatorSum, StateError> {
    OperatorSum::new(
        n,
        vec![PauliTerm::identity(c(0.5, -0.5)), PauliTerm::single(c(0.5, 0.5), q, SiteOp::Z)],
    )
}

/// `(I + Z_c + X_t - Z_c X_t)/2`.
pub fn cx(n: usize, control: usize, target: usize) -> Result<OperatorSum, StateError> {
    two_qubit_sum(n, control, target, SiteOp::Z, SiteOp::X)
}

/// `(I + Z_a + Z_b - Z_a Z_b)/2`.
pub fn cz(n: usize, a: usize, b: usize) -> Result<OperatorSum, StateError> {
    two_qubit_sum(n, a, b, SiteOp::Z, SiteOp::Z)
}

/// X-basis controlled phase: `(I + X_a + X_b - X_a X_b)/2`.
pub fn cx_xbasis(n: usize, a: usize, b: usize) -> Result<OperatorSum, StateError> {
    two_qubit_sum(n, a, b, SiteOp::X, SiteOp::X)
}

fn two_qubit_sum(n: usize, a: usize, b: usize, pa: SiteOp, pb: SiteOp) -> Result<OperatorSum, StateError> {
    if a == b {
        return Err(StateError::Config("two-qubit gate on a single qubit".into()));
    }
    OperatorSum::new(
        n,
        vec![
            PauliTerm::identity(c(0.5, 0.0)),
            PauliTerm::single(c(0.5, 0.0), a, pa),
            PauliTerm::single(c(0.5, 0.0), b, pb),
            PauliTerm::new(c(-0.5, 0.0), vec![(a, pa), (b, pb)])?,
        ],
    )
}

/// `exp(i·k·π/4·P)` on qubit `q` for a single-site Pauli `P`.
pub fn quarter_rotation(n: usize, q: usize, axis: SiteOp, k: i32) -> Result<OperatorSum, StateError> {
    let theta = k as f64 * std::f64::consts::FRAC_PI_4;
    OperatorSum::new(
        n,
        vec![
            PauliTerm::identity(c(theta.cos(), 0.0)),
            PauliTerm::single(c(0.0, theta.sin()), q, axis),
        ],
    )
}

/// Entangling jump `(X_j + s·i·X_k)/√2`.
pub fn entangling_jump(n: usize, j: usize, k: usize, sign: i8) -> Result<OperatorSum, StateError> {
    OperatorSum::new(
        n,
        vec![
            PauliTerm::single(c(FRAC_1_SQRT_2, 0.0), j, SiteOp::X),
            PauliTerm::single(c(0.0, sign as f64 * FRAC_1_SQRT_2), k, SiteOp::X),
        ],
    )
}
