use rand::Rng;

use crate::channels::{ChannelKind, JumpChannel, ReconfigAction};
use crate::qstate::StateVector;

use super::{
    sample_waiting_time, ClickRecord, MeasurementRecord, ProtocolScript, Register, RngStream, StageMark,
    Termination, TrajectoryError, TrajectoryLog, Waiting,
};

/// Applies one click of `channel` at `time` to a statevector.
pub fn apply_jump(
    state: &StateVector,
    channel: &JumpChannel,
    time: f64,
    stage: usize,
) -> Result<(StateVector, ClickRecord), TrajectoryError> {
    let mut next = state.clone();
    next.jump(channel)?;
    Ok((next, click_record(channel, time, stage)))
}

fn click_record(channel: &JumpChannel, time: f64, stage: usize) -> ClickRecord {
    ClickRecord {
        time,
        detector: channel.detector.clone(),
        kind: channel.kind,
        sign: channel.sign,
        qubits: channel.qubits().to_vec(),
        op: channel.op.clone(),
        stage,
    }
}

/// Runs a full script on a fresh statevector prepared from the script's
/// initial product state.
pub fn run(script: &ProtocolScript, stream: RngStream) -> Result<(TrajectoryLog, StateVector), TrajectoryError> {
    let mut state = StateVector::product(&script.initial)?;
    let log = run_on(script, &mut state, &mut stream.rng(), None)?;
    Ok((log, state))
}

/// Like [`run`] but stops at absolute time `t_stop`, returning the conditional
/// state at that instant.
pub fn run_until(
    script: &ProtocolScript,
    stream: RngStream,
    t_stop: f64,
) -> Result<(TrajectoryLog, StateVector), TrajectoryError> {
    let mut state = StateVector::product(&script.initial)?;
    let log = run_on(script, &mut state, &mut stream.rng(), Some(t_stop))?;
    Ok((log, state))
}

/// Executes `script` on an already prepared register.
pub fn run_on<R: Register + ?Sized, G: Rng + ?Sized>(
    script: &ProtocolScript,
    reg: &mut R,
    rng: &mut G,
    stop_at: Option<f64>,
) -> Result<TrajectoryLog, TrajectoryError> {
    script.validate()?;
    if reg.n_qubits() != script.n_qubits {
        return Err(TrajectoryError::Config(format!(
            "register has {} qubits, script needs {}",
            reg.n_qubits(),
            script.n_qubits
        )));
    }
    let mut log = TrajectoryLog::default();
    let mut t = 0.0;
    for (index, stage) in script.stages.iter().enumerate() {
        if stop_at.is_some_and(|s| t >= s) {
            break;
        }
        log.stage_marks.push(StageMark { time: t, index, label: stage.label.clone() });
        let mut channels: Vec<JumpChannel> = stage.layout.channels().to_vec();
        let triggers = stage.layout.triggers();
        let mut fired = vec![false; triggers.len()];
        let end = match &stage.termination {
            Termination::Duration(d) => t + d,
            Termination::AllMeasured { cutoff, .. } => t + cutoff,
            Termination::Clicks { .. } => f64::INFINITY,
        };
        let mut pending: Vec<usize> = match &stage.termination {
            Termination::AllMeasured { qubits, .. } => qubits.clone(),
            _ => Vec::new(),
        };
        let mut counted = 0;
        let mut stopped = false;
        loop {
            let limit = stop_at.map_or(end, |s| s.min(end));
            let refs: Vec<&JumpChannel> = channels.iter().collect();
            match sample_waiting_time(reg, &refs, rng, limit - t)? {
                Waiting::NoJump { .. } => {
                    if !limit.is_finite() {
                        return Err(TrajectoryError::Stalled { stage: stage.label.clone() });
                    }
                    t = limit;
                    stopped = limit < end;
                    break;
                }
                Waiting::Jump { dt, channel } => {
                    t += dt;
                    let ch = &channels[channel];
                    reg.jump(ch)?;
                    log.clicks.push(click_record(ch, t, index));
                    let detector = ch.detector.clone();
                    let kind = ch.kind;
                    if kind == ChannelKind::Se {
                        if let Some(pos) = pending.iter().position(|q| ch.qubits() == [*q]) {
                            log.measurements.push(MeasurementRecord { qubit: pending[pos], outcome: 1, stage: index });
                            pending.remove(pos);
                        }
                    }
                    let mut advance = false;
                    for (rule, done) in triggers.iter().zip(fired.iter_mut()) {
                        if (rule.once && *done) || !rule.watch.contains(&detector) {
                            continue;
                        }
                        *done = true;
                        match &rule.action {
                            ReconfigAction::RemoveBs { entangling, restore } => {
                                set_active(&mut channels, entangling, false);
                                set_active(&mut channels, restore, true);
                            }
                            ReconfigAction::Deactivate(ids) => set_active(&mut channels, ids, false),
                            ReconfigAction::StageAdvance => advance = true,
                        }
                    }
                    let finished = match &stage.termination {
                        Termination::Clicks { kind: k, count } => {
                            if *k == kind {
                                counted += 1;
                            }
                            counted >= *count
                        }
                        Termination::AllMeasured { .. } => pending.is_empty(),
                        Termination::Duration(_) => false,
                    };
                    if finished || advance {
                        break;
                    }
                }
            }
        }
        if stopped {
            break;
        }
        if !pending.is_empty() {
            let state = reg.statevector_mut().ok_or_else(|| {
                TrajectoryError::Unsupported("no-click readout needs a statevector register".into())
            })?;
            for &q in &pending {
                state.project_zero(q);
                log.measurements.push(MeasurementRecord { qubit: q, outcome: 0, stage: index });
            }
            state.normalize_in_place()?;
        }
    }
    log.end_time = t;
    Ok(log)
}

fn set_active(channels: &mut [JumpChannel], ids: &[String], active: bool) {
    for ch in channels.iter_mut().filter(|c| ids.contains(&c.id)) {
        ch.active = active;
    }
}
