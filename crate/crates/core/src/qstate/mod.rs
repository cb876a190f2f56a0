//! Dense statevector engine.
//!
//! Basis convention: qubit 0 is the most significant bit of the amplitude
//! index, so `|q0 q1 … q(n-1)⟩` lives at index `Σ q_k · 2^(n-1-k)`. Logical
//! `|0⟩` is the emitter ground state `|g⟩`, `|1⟩` the excited state `|e⟩`.
//!
//! Operators are never materialized as `2ⁿ × 2ⁿ` matrices on the hot path:
//! they are sums of weighted strings of single-site operators (see
//! [`OperatorSum`]), each applied in one pass over the amplitudes.

mod dense;
pub mod gates;
mod operator;
mod pauli;

use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

pub use dense::{kron_dense, site_matrix};
pub use operator::{OperatorSum, PauliTerm, SiteOp};
pub use pauli::{Pauli, PauliSum, PauliWord, PhasedPauli};
pub(crate) use pauli::i_pow;

/// Norms below this are treated as an annihilated state.
pub const ZERO_NORM: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("configuration error: {0}")]
    Config(String),
    /// The operator maps the state to the zero vector (e.g. σ₋ on `|0⟩`).
    #[error("operator annihilated the state (norm {norm:e})")]
    Annihilated { norm: f64 },
}

/// Pure state of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Largest register the dense engine will allocate.
    pub const MAX_QUBITS: usize = 26;

    /// Computational basis state from a bit string such as `"10"`.
    pub fn basis_state(n_qubits: usize, bits: &str) -> Result<Self, StateError> {
        let parsed: Vec<bool> = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(StateError::Config(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<_, _>>()?;
        if parsed.len() != n_qubits {
            return Err(StateError::Config(format!(
                "bit string has length {} but register has {n_qubits} qubits",
                parsed.len()
            )));
        }
        Self::from_bits(&parsed)
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self, StateError> {
        let n = bits.len();
        check_size(n)?;
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits: n, amps })
    }

    /// Tensor product of single-qubit states `a|0⟩ + b|1⟩`, qubit 0 first.
    pub fn product(qubits: &[[Complex64; 2]]) -> Result<Self, StateError> {
        let n = qubits.len();
        check_size(n)?;
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for q in qubits {
            let mut next = Vec::with_capacity(amps.len() * 2);
            for a in &amps {
                next.push(a * q[0]);
                next.push(a * q[1]);
            }
            amps = next;
        }
        Ok(Self { n_qubits: n, amps })
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self, StateError> {
        check_size(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(StateError::Config(format!(
                "expected {} amplitudes for {n_qubits} qubits, got {}",
                1usize << n_qubits,
                amps.len()
            )));
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Bit position of `qubit` inside an amplitude index.
    #[inline]
    pub fn shift(&self, qubit: usize) -> usize {
        self.n_qubits - 1 - qubit
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64, StateError> {
        self.check_same(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨a|b⟩|²` for normalized states.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64, StateError> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn normalize(&self) -> Result<StateVector, StateError> {
        let mut out = self.clone();
        out.normalize_in_place()?;
        Ok(out)
    }

    pub fn normalize_in_place(&mut self) -> Result<(), StateError> {
        let norm = self.norm();
        if norm < ZERO_NORM {
            return Err(StateError::Annihilated { norm });
        }
        let inv = 1.0 / norm;
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    /// Returns `op|ψ⟩` without normalizing.
    pub fn apply(&self, op: &OperatorSum) -> Result<StateVector, StateError> {
        op.apply(self)
    }

    /// Zeroes every component where `qubit` is 1 (unnormalized projection onto `|0⟩`).
    pub fn project_zero(&mut self, qubit: usize) {
        let mask = 1usize << self.shift(qubit);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask != 0 {
                *a = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Probability that `qubit` reads 1.
    pub fn excited_population(&self, qubit: usize) -> f64 {
        let mask = 1usize << self.shift(qubit);
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// One `index real imag` line per amplitude with magnitude ≥ [`ZERO_NORM`].
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() >= ZERO_NORM {
                let _ = writeln!(out, "{i} {:.15e} {:.15e}", a.re, a.im);
            }
        }
        out
    }

    fn check_same(&self, other: &StateVector) -> Result<(), StateError> {
        if self.n_qubits != other.n_qubits {
            return Err(StateError::Config(format!(
                "register size mismatch: {} vs {}",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(())
    }
}

fn check_size(n: usize) -> Result<(), StateError> {
    if n == 0 || n > StateVector::MAX_QUBITS {
        return Err(StateError::Config(format!(
            "register size {n} outside 1..={}",
            StateVector::MAX_QUBITS
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_state_indexing() {
        let s = StateVector::basis_state(1, "0").unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        let s = StateVector::basis_state(2, "10").unwrap();
        assert_eq!(s.amplitudes()[2], c(1.0, 0.0));
        assert_abs_diff_eq!(s.norm_sqr(), 1.0);
        let s = StateVector::basis_state(3, "111").unwrap();
        assert_eq!(s.amplitudes()[7], c(1.0, 0.0));
    }

    #[test]
    fn basis_state_length_mismatch() {
        assert!(matches!(
            StateVector::basis_state(3, "10"),
            Err(StateError::Config(_))
        ));
        assert!(StateVector::basis_state(2, "1x").is_err());
    }

    #[test]
    fn fidelity_examples() {
        let zero = StateVector::basis_state(1, "0").unwrap();
        let one = StateVector::basis_state(1, "1").unwrap();
        assert_abs_diff_eq!(zero.fidelity(&zero).unwrap(), 1.0);
        assert_abs_diff_eq!(zero.fidelity(&one).unwrap(), 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell =
            StateVector::from_amplitudes(2, vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)])
                .unwrap();
        let zz = StateVector::basis_state(2, "00").unwrap();
        assert_abs_diff_eq!(bell.fidelity(&zz).unwrap(), 0.5, epsilon = 1e-15);
        assert!(zz.fidelity(&zero).is_err());
    }

    #[test]
    fn normalize_examples() {
        let s = StateVector::from_amplitudes(1, vec![c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(s.normalize().unwrap().amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        let s = StateVector::from_amplitudes(1, vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let n = s.normalize().unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(n.amplitudes()[0].re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(n.amplitudes()[1].im, h, epsilon = 1e-15);
        let z = StateVector::from_amplitudes(1, vec![c(0.0, 0.0); 2]).unwrap();
        assert!(matches!(z.normalize(), Err(StateError::Annihilated { .. })));
    }

    #[test]
    fn dump_suppresses_zeros() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = StateVector::from_amplitudes(2, vec![c(0.0, 0.0), c(h, 0.0), c(0.0, -h), c(1e-16, 0.0)])
            .unwrap();
        let d = s.dump();
        let lines: Vec<&str> = d.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("1 "));
        assert!(lines[1].starts_with("2 "));
    }

    #[test]
    fn product_matches_kron_order() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = [c(h, 0.0), c(h, 0.0)];
        let one = [c(0.0, 0.0), c(1.0, 0.0)];
        let s = StateVector::product(&[one, plus]).unwrap();
        // |1⟩⊗|+⟩ → indices 2 and 3
        assert_abs_diff_eq!(s.amplitudes()[2].re, h);
        assert_abs_diff_eq!(s.amplitudes()[3].re, h);
        assert_abs_diff_eq!(s.excited_population(0), 1.0);
        assert_abs_diff_eq!(s.excited_population(1), 0.5, epsilon = 1e-15);
    }
}
