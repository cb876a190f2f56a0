//! Recognizes jump operators that are (scaled) Clifford unitaries.

use num_complex::Complex64;

use crate::qstate::{OperatorSum, Pauli, SiteOp};

/// Canonical Clifford form of a normalized jump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CliffordJump {
    /// `P` on one qubit.
    Pauli { qubit: usize, pauli: Pauli },
    /// `(σx_j + s·i·σx_k)/√2`.
    Entangle { j: usize, k: usize, sign: i8 },
    /// `(I + s·i·σy)/√2 = exp(s·iπ/4·σy)`.
    QuarterY { qubit: usize, sign: i8 },
}

const TOL: f64 = 1e-9;

fn unit(c: Complex64) -> Complex64 {
    c / c.norm()
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= TOL
}

/// Returns `(ω, jump)` with `op / ‖op‖ = ω · jump` and `|ω| = 1`, or `None`
/// if the operator is not one of the recognized Clifford jumps.
pub fn classify_jump(op: &OperatorSum) -> Option<(Complex64, CliffordJump)> {
    let terms = op.terms();
    let single = |t: &crate::qstate::PauliTerm| -> Option<(usize, SiteOp)> {
        match t.factors() {
            [(q, s)] => Some((*q, *s)),
            _ => None,
        }
    };
    match terms {
        [t] => {
            let (qubit, site) = single(t)?;
            let pauli = match site {
                SiteOp::X => Pauli::X,
                SiteOp::Y => Pauli::Y,
                SiteOp::Z => Pauli::Z,
                _ => return None,
            };
            (t.coeff().norm() > 0.0).then(|| (unit(t.coeff()), CliffordJump::Pauli { qubit, pauli }))
        }
        [a, b] => {
            let (ca, cb) = (a.coeff(), b.coeff());
            if ca.norm() == 0.0 || (ca.norm() - cb.norm()).abs() > TOL * ca.norm() {
                return None;
            }
            let ratio = cb / ca;
            let sign = if close(ratio, Complex64::new(0.0, 1.0)) {
                1
            } else if close(ratio, Complex64::new(0.0, -1.0)) {
                -1
            } else {
                return None;
            };
            match (a.factors(), single(b)) {
                ([(j, SiteOp::X)], Some((k, SiteOp::X))) if *j != k => {
                    Some((unit(ca), CliffordJump::Entangle { j: *j, k, sign }))
                }
                ([], Some((qubit, SiteOp::Y))) => Some((unit(ca), CliffordJump::QuarterY { qubit, sign })),
                _ => None,
            }
        }
        _ => None,
    }
}
