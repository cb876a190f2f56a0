//! Protocol scripts built from detection layouts, and the classical
//! bookkeeping that turns a click record into local corrections.

mod frame;
mod graph;
mod teleport;

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::channels::ChannelError;
use crate::qstate::{gates, OperatorSum, SiteOp, StateError, StateVector};
use crate::trajectory::TrajectoryError;

pub use frame::PauliFrame;
pub use graph::{
    graph_correction, graph_script, graph_state, hadamard_via_mix, GraphSpec, Wiring,
};
pub use teleport::{pauli_correction, teleport_script, TeleportRoles, TeleportTable, TELEPORT_TABLE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("protocol incomplete: {0}")]
    Incomplete(String),
    #[error("log corrupted: {0}")]
    LogCorrupt(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Single-qubit correction gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectionKind {
    Identity,
    PauliX,
    PauliY,
    PauliZ,
    /// `exp(i·k·π/4·σz)`, `k` in `0..8`.
    ZRot(u8),
    Hadamard,
    /// `exp(s·iπ/4·σy)`, the basis-exchanging mix jump.
    HadamardLike(i8),
}

/// `phase · gate` on `qubit`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionOp {
    pub kind: CorrectionKind,
    pub qubit: usize,
    pub phase: Complex64,
}

impl CorrectionOp {
    pub fn new(kind: CorrectionKind, qubit: usize) -> Self {
        Self { kind, qubit, phase: Complex64::new(1.0, 0.0) }
    }

    pub fn with_phase(mut self, phase: Complex64) -> Self {
        self.phase = phase;
        self
    }

    /// The gate as an operator on an `n`-qubit register, phase included.
    pub fn operator(&self, n: usize) -> Result<OperatorSum, StateError> {
        let q = self.qubit;
        let op = match self.kind {
            CorrectionKind::Identity => OperatorSum::identity(n)?,
            CorrectionKind::PauliX => gates::pauli(n, q, SiteOp::X)?,
            CorrectionKind::PauliY => gates::pauli(n, q, SiteOp::Y)?,
            CorrectionKind::PauliZ => gates::pauli(n, q, SiteOp::Z)?,
            CorrectionKind::ZRot(k) => gates::quarter_rotation(n, q, SiteOp::Z, k as i32)?,
            CorrectionKind::Hadamard => gates::hadamard(n, q)?,
            CorrectionKind::HadamardLike(s) => gates::quarter_rotation(n, q, SiteOp::Y, s as i32)?,
        };
        Ok(op.scaled(self.phase))
    }

    fn symbol(&self) -> String {
        match self.kind {
            CorrectionKind::Identity => "I".into(),
            CorrectionKind::PauliX => "X".into(),
            CorrectionKind::PauliY => "Y".into(),
            CorrectionKind::PauliZ => "Z".into(),
            CorrectionKind::ZRot(k) => format!("ZROT{k}"),
            CorrectionKind::Hadamard => "H".into(),
            CorrectionKind::HadamardLike(s) => format!("HY{}", if s > 0 { '+' } else { '-' }),
        }
    }
}

impl fmt::Display for CorrectionOp {
    /// `qubit op phase`, phase written as `re+imi`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let clean = |v: f64| if v.abs() < 5e-13 { 0.0 } else { v };
        write!(
            f,
            "{} {} {:.12}{:+.12}i",
            self.qubit,
            self.symbol(),
            clean(self.phase.re),
            clean(self.phase.im)
        )
    }
}

/// Applies `ops` in order.
pub fn apply_corrections(state: &StateVector, ops: &[CorrectionOp]) -> Result<StateVector, StateError> {
    let mut out = state.clone();
    for op in ops {
        out = op.operator(state.n_qubits())?.act(&out)?;
    }
    Ok(out)
}

/// Text listing, one `qubit op phase` line per operation.
pub fn format_corrections(ops: &[CorrectionOp]) -> String {
    ops.iter().map(|op| format!("{op}\n")).collect()
}
