use num_complex::Complex64;

use crate::channels::{ChannelKind, OpticalLayout};

use super::TrajectoryError;

/// When a stage ends.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    /// Fixed length in units of `1/γ`.
    Duration(f64),
    /// After `count` clicks of `kind` within the stage.
    Clicks { kind: ChannelKind, count: usize },
    /// Computational-basis readout of `qubits` through their emission
    /// channels: a click reads 1; no click by `cutoff` reads 0.
    AllMeasured { qubits: Vec<usize>, cutoff: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub label: String,
    pub layout: OpticalLayout,
    pub termination: Termination,
}

/// Staged detection protocol on a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolScript {
    pub n_qubits: usize,
    /// Per-qubit initial amplitudes `(a, b)` of `a|0⟩ + b|1⟩`.
    pub initial: Vec<[Complex64; 2]>,
    pub stages: Vec<Stage>,
    /// Named qubits, e.g. `("A", 0)`.
    pub roles: Vec<(String, usize)>,
}

impl ProtocolScript {
    pub fn role(&self, name: &str) -> Option<usize> {
        self.roles.iter().find(|(r, _)| r == name).map(|(_, q)| *q)
    }

    pub fn validate(&self) -> Result<(), TrajectoryError> {
        let cfg = |m: String| Err(TrajectoryError::Config(m));
        if self.initial.len() != self.n_qubits {
            return cfg(format!("{} initial states for {} qubits", self.initial.len(), self.n_qubits));
        }
        for (q, [a, b]) in self.initial.iter().enumerate() {
            if ((a.norm_sqr() + b.norm_sqr()) - 1.0).abs() > 1e-10 {
                return cfg(format!("initial state of qubit {q} is not normalized"));
            }
        }
        if self.stages.is_empty() {
            return cfg("script has no stages".into());
        }
        for (_, q) in &self.roles {
            if *q >= self.n_qubits {
                return cfg(format!("role refers to qubit {q} outside the register"));
            }
        }
        for stage in &self.stages {
            let layout = &stage.layout;
            if layout.n_qubits() != self.n_qubits {
                return cfg(format!("stage {:?} layout acts on {} qubits", stage.label, layout.n_qubits()));
            }
            match &stage.termination {
                Termination::Duration(t) => {
                    if !(t.is_finite() && *t >= 0.0) {
                        return cfg(format!("stage {:?} has invalid duration {t}", stage.label));
                    }
                }
                Termination::Clicks { kind, count } => {
                    if *count == 0 {
                        return cfg(format!("stage {:?} waits for zero clicks", stage.label));
                    }
                    if !layout.channels().iter().any(|c| c.kind == *kind) {
                        return Err(TrajectoryError::Stalled { stage: stage.label.clone() });
                    }
                }
                Termination::AllMeasured { qubits, cutoff } => {
                    if !(cutoff.is_finite() && *cutoff > 0.0) {
                        return cfg(format!("stage {:?} needs a finite positive cutoff", stage.label));
                    }
                    for &q in qubits {
                        if q >= self.n_qubits {
                            return cfg(format!("stage {:?} measures qubit {q} outside the register", stage.label));
                        }
                        let on_q = |k: ChannelKind| layout.active().any(|c| c.kind == k && c.qubits() == [q]);
                        if !on_q(ChannelKind::Se) {
                            return cfg(format!("stage {:?} has no emission monitor on qubit {q}", stage.label));
                        }
                        if on_q(ChannelKind::Is) || layout.active().any(|c| c.qubits().contains(&q) && c.kind != ChannelKind::Se) {
                            return cfg(format!("stage {:?} must switch off pumping and flips on measured qubit {q}", stage.label));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
