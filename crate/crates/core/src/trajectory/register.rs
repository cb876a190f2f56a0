use crate::channels::JumpChannel;
use crate::qstate::{StateError, StateVector};

use super::TrajectoryError;

/// Conditional state carried along a trajectory.
///
/// Clifford-only backends return `None` from the statevector accessors; they
/// can run stages whose total decay is uniform and whose jumps are Clifford.
pub trait Register {
    fn n_qubits(&self) -> usize;

    fn statevector(&self) -> Option<&StateVector>;

    fn statevector_mut(&mut self) -> Option<&mut StateVector>;

    /// Replaces the state by `L|ψ⟩/‖L|ψ⟩‖`.
    fn jump(&mut self, channel: &JumpChannel) -> Result<(), TrajectoryError>;
}

impl Register for StateVector {
    fn n_qubits(&self) -> usize {
        StateVector::n_qubits(self)
    }

    fn statevector(&self) -> Option<&StateVector> {
        Some(self)
    }

    fn statevector_mut(&mut self) -> Option<&mut StateVector> {
        Some(self)
    }

    fn jump(&mut self, channel: &JumpChannel) -> Result<(), TrajectoryError> {
        let mut next = channel.op.apply(self).map_err(|e| match e {
            StateError::Annihilated { norm } => TrajectoryError::SamplerFault(format!(
                "channel {} annihilated the state (norm {norm:e})",
                channel.id
            )),
            other => other.into(),
        })?;
        next.normalize_in_place()?;
        *self = next;
        Ok(())
    }
}
