use num_complex::Complex64;

use crate::qstate::{i_pow, Pauli};

/// Pauli frame `F = phase · ⊗_q P_q` accumulated from flip clicks.
///
/// A run of flips and entangling jumps is rewritten as `F · Π G'_e`, where
/// each entangling jump `G_e` is replaced by its conjugate `F† G_e F` under
/// the frame at its click time. For `G = (X_j + s·i·X_k)/√2` this conjugate
/// is `(−1)^{a_j} (X_j + s'·i·X_k)/√2` with `s' = s·(−1)^{a_j + a_k}`, where
/// `a_q` is set when the frame anticommutes with `X_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliFrame {
    pub phase: Complex64,
    paulis: Vec<Pauli>,
}

impl PauliFrame {
    pub fn new(n_qubits: usize) -> Self {
        Self { phase: Complex64::new(1.0, 0.0), paulis: vec![Pauli::I; n_qubits] }
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        self.paulis[qubit]
    }

    /// `F ← ω·P_q·F`.
    pub fn push_flip(&mut self, qubit: usize, pauli: Pauli, omega: Complex64) {
        let (k, p) = pauli.mul_phase(self.paulis[qubit]);
        self.paulis[qubit] = p;
        self.phase *= omega * i_pow(k);
    }

    /// Whether the frame anticommutes with `X_q`.
    pub fn flips_x(&self, qubit: usize) -> bool {
        matches!(self.paulis[qubit], Pauli::Y | Pauli::Z)
    }

    /// Absorbs `ω·(X_j + s·i·X_k)/√2` and returns the effective sign `s'`.
    pub fn push_entangle(&mut self, j: usize, k: usize, sign: i8, omega: Complex64) -> i8 {
        let (aj, ak) = (self.flips_x(j), self.flips_x(k));
        if aj {
            self.phase = -self.phase;
        }
        self.phase *= omega;
        if aj ^ ak {
            -sign
        } else {
            sign
        }
    }
}

/// Rewrites `(X_j + s·i·X_k)/√2` with the roles of `j` and `k` exchanged:
/// `(X_k + s·i·X_j)/√2 = s·i · (X_j − s·i·X_k)/√2`. Returns `(sign, factor)`
/// for the `(j, k)` orientation.
pub(crate) fn reorient(sign: i8) -> (i8, Complex64) {
    (-sign, Complex64::new(0.0, sign as f64))
}
