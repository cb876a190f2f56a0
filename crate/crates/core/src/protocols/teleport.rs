use num_complex::Complex64;

use crate::channels::{classify_jump, ChannelKind, CliffordJump, LayoutSpec, QubitMonitor};
use crate::qstate::{i_pow, Pauli};
use crate::trajectory::{ProtocolScript, Stage, Termination, TrajectoryLog};

use super::frame::{reorient, PauliFrame};
use super::{CorrectionKind, CorrectionOp, ProtocolError};

/// Qubit indices of Alice's half of the pair, Bob's half and Charlie's input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TeleportRoles {
    pub alice: usize,
    pub bob: usize,
    pub charlie: usize,
}

impl Default for TeleportRoles {
    fn default() -> Self {
        Self { alice: 0, bob: 1, charlie: 2 }
    }
}

impl TeleportRoles {
    pub fn from_script(script: &ProtocolScript) -> Option<Self> {
        Some(Self { alice: script.role("A")?, bob: script.role("B")?, charlie: script.role("C")? })
    }
}

/// `(P, k)` cells indexed by the two signs and two outcomes.
pub type TeleportTable = [[[[(Pauli, u8); 2]; 2]; 2]; 2];

/// Bob's state after the pair and Bell-type jumps, for frame-free signs
/// `(s, t)` on the A–B and A–C jumps and outcomes `(m_A, m_C)`, is
/// `i^k · P · ψ`. Indexed by `[s<0][t<0][m_A][m_C]`.
pub const TELEPORT_TABLE: TeleportTable = [
    [
        [[(Pauli::Z, 0), (Pauli::Y, 1)], [(Pauli::X, 1), (Pauli::I, 1)]],
        [[(Pauli::I, 0), (Pauli::X, 0)], [(Pauli::Y, 0), (Pauli::Z, 3)]],
    ],
    [
        [[(Pauli::I, 0), (Pauli::X, 0)], [(Pauli::Y, 2), (Pauli::Z, 1)]],
        [[(Pauli::Z, 0), (Pauli::Y, 1)], [(Pauli::X, 3), (Pauli::I, 3)]],
    ],
];

/// Four-stage teleportation of `alpha|0⟩ + beta|1⟩` from C to B.
///
/// a: A–B σx ports on a BS, σy ports local, until the first entangling click
///    (which also pulls the BS);
/// b: all flip ports local for `stage_b_duration`;
/// c: A–C σx ports on a BS until the first entangling click;
/// d: pumping off on A and C, emission readout of both until `t_meas`; B
///    keeps its flip ports.
pub fn teleport_script(
    alpha: Complex64,
    beta: Complex64,
    stage_b_duration: f64,
    t_meas: f64,
) -> Result<ProtocolScript, ProtocolError> {
    if ((alpha.norm_sqr() + beta.norm_sqr()) - 1.0).abs() > 1e-10 {
        return Err(ProtocolError::Config(format!(
            "input amplitudes are not normalized (|α|²+|β|² = {})",
            alpha.norm_sqr() + beta.norm_sqr()
        )));
    }
    if !(stage_b_duration.is_finite() && stage_b_duration >= 0.0) {
        return Err(ProtocolError::Config(format!("invalid stage b duration {stage_b_duration}")));
    }
    if !(t_meas.is_finite() && t_meas > 0.0) {
        return Err(ProtocolError::Config(format!("invalid measurement cutoff {t_meas}")));
    }
    let r = TeleportRoles::default();
    let base = LayoutSpec {
        n_qubits: 3,
        gamma: vec![1.0; 3],
        theta: vec![0.0; 3],
        monitor: vec![QubitMonitor::Flip; 3],
        beamsplitters: Vec::new(),
        triggers: Vec::new(),
    };
    let with_bs = |a: usize, b: usize| LayoutSpec {
        beamsplitters: vec![(a, b)],
        triggers: vec![(a, b)],
        ..base.clone()
    };
    let mut readout = base.clone();
    readout.monitor[r.alice] = QubitMonitor::Se;
    readout.monitor[r.charlie] = QubitMonitor::Se;
    let entangled = Termination::Clicks { kind: ChannelKind::Entangle, count: 1 };
    let stages = vec![
        Stage { label: "a".into(), layout: with_bs(r.alice, r.bob).build()?, termination: entangled.clone() },
        Stage { label: "b".into(), layout: base.build()?, termination: Termination::Duration(stage_b_duration) },
        Stage { label: "c".into(), layout: with_bs(r.alice, r.charlie).build()?, termination: entangled },
        Stage {
            label: "d".into(),
            layout: readout.build()?,
            termination: Termination::AllMeasured { qubits: vec![r.alice, r.charlie], cutoff: t_meas },
        },
    ];
    let zero = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let mut initial = vec![zero; 3];
    initial[r.charlie] = [alpha, beta];
    Ok(ProtocolScript {
        n_qubits: 3,
        initial,
        stages,
        roles: vec![("A".into(), r.alice), ("B".into(), r.bob), ("C".into(), r.charlie)],
    })
}

/// Phase picked up when a frame Pauli maps the pre-frame basis state
/// `|m'⟩` to the observed `|m⟩`.
fn readout_phase(p: Pauli, m_pre: u8) -> Complex64 {
    match (p, m_pre) {
        (Pauli::I | Pauli::X, _) => Complex64::new(1.0, 0.0),
        (Pauli::Y, 0) => Complex64::new(0.0, 1.0),
        (Pauli::Y, _) => Complex64::new(0.0, -1.0),
        (Pauli::Z, 0) => Complex64::new(1.0, 0.0),
        (Pauli::Z, _) => Complex64::new(-1.0, 0.0),
    }
}

/// Correction on Bob's qubit that restores Charlie's input exactly,
/// global phase included.
pub fn pauli_correction(log: &TrajectoryLog, roles: TeleportRoles) -> Result<CorrectionOp, ProtocolError> {
    let n = [roles.alice, roles.bob, roles.charlie].into_iter().max().unwrap_or(0) + 1;
    let mut frame = PauliFrame::new(n);
    let mut signs: Vec<(bool, i8)> = Vec::new();
    for click in &log.clicks {
        match click.kind {
            ChannelKind::Se => {
                if click.qubits != [roles.alice] && click.qubits != [roles.charlie] {
                    return Err(ProtocolError::LogCorrupt(format!(
                        "emission click on qubit(s) {:?} outside the readout",
                        click.qubits
                    )));
                }
            }
            ChannelKind::Flip | ChannelKind::Entangle => {
                let (omega, jump) = classify_jump(&click.op).ok_or_else(|| {
                    ProtocolError::LogCorrupt(format!("click on {} is not a Clifford jump", click.detector))
                })?;
                match jump {
                    CliffordJump::Pauli { qubit, pauli } if qubit < n => frame.push_flip(qubit, pauli, omega),
                    CliffordJump::Entangle { j, k, sign } => {
                        let (other, sign, omega) = if j == roles.alice {
                            (k, sign, omega)
                        } else if k == roles.alice {
                            let (s, f) = reorient(sign);
                            (j, s, omega * f)
                        } else {
                            return Err(ProtocolError::LogCorrupt(format!("entangling click {j}–{k} misses Alice")));
                        };
                        let is_pair = if other == roles.bob {
                            true
                        } else if other == roles.charlie {
                            false
                        } else {
                            return Err(ProtocolError::LogCorrupt(format!("entangling click on unknown qubit {other}")));
                        };
                        let s = frame.push_entangle(roles.alice, other, sign, omega);
                        signs.push((is_pair, s));
                    }
                    other => {
                        return Err(ProtocolError::LogCorrupt(format!("unexpected jump {other:?}")));
                    }
                }
            }
            other => {
                return Err(ProtocolError::LogCorrupt(format!("unexpected {} click", other.label())));
            }
        }
    }
    let (s, t) = match signs.as_slice() {
        [(true, s), (false, t)] => (*s, *t),
        [] | [(true, _)] => return Err(ProtocolError::Incomplete("missing entangling click".into())),
        _ => return Err(ProtocolError::LogCorrupt("entangling clicks out of protocol order".into())),
    };
    let outcome = |q: usize, name: &str| {
        log.outcome(q).ok_or_else(|| ProtocolError::Incomplete(format!("{name} was not measured")))
    };
    let (m_a, m_c) = (outcome(roles.alice, "A")?, outcome(roles.charlie, "C")?);
    let pre = |q: usize, m: u8| m ^ frame.get(q).bits().0 as u8;
    let (pa, pc) = (pre(roles.alice, m_a), pre(roles.charlie, m_c));
    let (q, k) = TELEPORT_TABLE[(s < 0) as usize][(t < 0) as usize][pa as usize][pc as usize];
    let omega = frame.phase
        * readout_phase(frame.get(roles.alice), pa)
        * readout_phase(frame.get(roles.charlie), pc)
        * i_pow(k);
    let (k2, p) = q.mul_phase(frame.get(roles.bob));
    let kind = match p {
        Pauli::I => CorrectionKind::Identity,
        Pauli::X => CorrectionKind::PauliX,
        Pauli::Y => CorrectionKind::PauliY,
        Pauli::Z => CorrectionKind::PauliZ,
    };
    Ok(CorrectionOp::new(kind, roles.bob).with_phase(omega.conj() * i_pow(k2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::apply_corrections;
    use crate::qstate::gates::entangling_jump;
    use crate::qstate::{OperatorSum, SiteOp, StateVector};
    use crate::trajectory::{run, ClickRecord, MeasurementRecord, RngStream};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_site(p: Pauli) -> SiteOp {
        SiteOp::from(p)
    }

    /// Enumerates every sign/outcome cell on the 8-dimensional register and
    /// reads Bob's conditional state off directly.
    #[test]
    fn table_matches_enumeration() {
        let (alpha, beta) = (c(0.36, -0.48), c(0.64, 0.48));
        let psi = StateVector::product(&[[alpha, beta]]).unwrap();
        let init = StateVector::product(&[[c(1.0, 0.0), c(0.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)], [alpha, beta]]).unwrap();
        for (si, s) in [1i8, -1].into_iter().enumerate() {
            for (ti, t) in [1i8, -1].into_iter().enumerate() {
                let v = entangling_jump(3, 0, 1, s).unwrap().act(&init).unwrap();
                let v = entangling_jump(3, 0, 2, t).unwrap().act(&v).unwrap();
                for ma in 0..2usize {
                    for mc in 0..2usize {
                        let bob: Vec<Complex64> = (0..2).map(|b| v.amplitudes()[ma << 2 | b << 1 | mc] * 2.0).collect();
                        let (p, k) = TELEPORT_TABLE[si][ti][ma][mc];
                        let expect = OperatorSum::single(1, 0, pauli_site(p), 1.0).unwrap().act(&psi).unwrap();
                        for b in 0..2 {
                            assert!((bob[b] - i_pow(k) * expect.amplitudes()[b]).norm() < 1e-12, "cell {s} {t} {ma} {mc}");
                        }
                    }
                }
            }
        }
    }

    fn click(kind: ChannelKind, op: OperatorSum, qubits: Vec<usize>, time: f64, sign: Option<i8>) -> ClickRecord {
        ClickRecord { time, detector: format!("d{time}"), kind, sign, qubits, op, stage: 0 }
    }

    fn minimal_log(extra_flip_on_b: bool) -> TrajectoryLog {
        let mut clicks = vec![click(ChannelKind::Entangle, entangling_jump(3, 0, 1, 1).unwrap(), vec![0, 1], 1.0, Some(1))];
        if extra_flip_on_b {
            clicks.push(click(ChannelKind::Flip, OperatorSum::single(3, 1, SiteOp::X, 0.5f64.sqrt()).unwrap(), vec![1], 1.5, None));
        }
        clicks.push(click(ChannelKind::Entangle, entangling_jump(3, 0, 2, 1).unwrap(), vec![0, 2], 2.0, Some(1)));
        TrajectoryLog {
            clicks,
            measurements: vec![
                MeasurementRecord { qubit: 0, outcome: 0, stage: 3 },
                MeasurementRecord { qubit: 2, outcome: 0, stage: 3 },
            ],
            ..Default::default()
        }
    }

    #[test]
    fn minimal_log_uses_table_cell() {
        let corr = pauli_correction(&minimal_log(false), TeleportRoles::default()).unwrap();
        assert_eq!(corr.kind, CorrectionKind::PauliZ);
        assert!((corr.phase - c(1.0, 0.0)).norm() < 1e-12);
        let with_flip = pauli_correction(&minimal_log(true), TeleportRoles::default()).unwrap();
        // Z·X = iY
        assert_eq!(with_flip.kind, CorrectionKind::PauliY);
        assert!((with_flip.phase - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn incomplete_logs_are_rejected() {
        let mut log = minimal_log(false);
        log.measurements.pop();
        assert!(matches!(pauli_correction(&log, TeleportRoles::default()), Err(ProtocolError::Incomplete(_))));
        let mut log = minimal_log(false);
        log.clicks.pop();
        assert!(matches!(pauli_correction(&log, TeleportRoles::default()), Err(ProtocolError::Incomplete(_))));
    }

    #[test]
    fn script_shape() {
        let s = teleport_script(c(1.0, 0.0), c(0.0, 0.0), 1.0, 20.0).unwrap();
        assert_eq!(s.stages.len(), 4);
        s.validate().unwrap();
        assert!(teleport_script(c(1.0, 0.0), c(1.0, 0.0), 1.0, 20.0).is_err());
    }

    #[test]
    fn end_to_end_restores_input_exactly() {
        let (alpha, beta) = (c(0.6, 0.0), c(0.0, 0.8));
        let script = teleport_script(alpha, beta, 1.0, 20.0).unwrap();
        let target = StateVector::product(&[[c(1.0, 0.0), c(0.0, 0.0)], [alpha, beta], [c(1.0, 0.0), c(0.0, 0.0)]]).unwrap();
        for i in 0..200 {
            let (log, state) = run(&script, RngStream::new(42, i)).unwrap();
            let corr = pauli_correction(&log, TeleportRoles::from_script(&script).unwrap()).unwrap();
            let out = apply_corrections(&state, &[corr]).unwrap();
            let overlap = target.inner(&out).unwrap();
            assert!((overlap - c(1.0, 0.0)).norm() < 1e-10, "trajectory {i}: {overlap}");
        }
    }
}
