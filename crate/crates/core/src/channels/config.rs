//! Line-oriented `key = value` layout description.
//!
//! ```text
//! # two qubits, x-ports combined on a balanced BS, BS pulled after first click
//! qubits = 2
//! gamma = 1.0        # default rate for every qubit
//! gamma.1 = 1.0      # per-qubit override
//! theta.0 = 0.0      # PBS angle in radians (default 0)
//! monitor.1 = flip   # flip (PBS ports, default) | se (bare emission) | off
//! bs = 0 1           # combine the x-ports of qubits 0 and 1
//! trigger = 0 1      # remove BS 0-1 after its first click
//! ```
//!
//! A qubit takes part in at most one `bs` line.

use std::collections::BTreeMap;

use super::{
    bs_combine, is_channel, pbs_erase, se_channel, ChannelError, JumpChannel, OpticalLayout,
    ReconfigAction, ReconfigRule,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitMonitor {
    Flip,
    Se,
    Off,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutSpec {
    pub n_qubits: usize,
    pub gamma: Vec<f64>,
    pub theta: Vec<f64>,
    pub monitor: Vec<QubitMonitor>,
    pub beamsplitters: Vec<(usize, usize)>,
    pub triggers: Vec<(usize, usize)>,
}

fn perr(line: usize, message: impl Into<String>) -> ChannelError {
    ChannelError::Parse { line, message: message.into() }
}

fn parse_pair(line: usize, v: &str) -> Result<(usize, usize), ChannelError> {
    let parts: Vec<&str> = v.split_whitespace().collect();
    if parts.len() != 2 {
        return Err(perr(line, format!("expected two qubit indices, got {v:?}")));
    }
    let a = parts[0].parse().map_err(|_| perr(line, format!("bad qubit index {:?}", parts[0])))?;
    let b = parts[1].parse().map_err(|_| perr(line, format!("bad qubit index {:?}", parts[1])))?;
    if a == b {
        return Err(perr(line, "pair must join two different qubits"));
    }
    Ok((a, b))
}

impl LayoutSpec {
    pub fn parse(text: &str) -> Result<Self, ChannelError> {
        let mut n_qubits = None;
        let mut default_gamma = 1.0;
        let mut gamma = BTreeMap::new();
        let mut theta = BTreeMap::new();
        let mut monitor = BTreeMap::new();
        let mut beamsplitters = Vec::new();
        let mut triggers = Vec::new();
        let mut key_lines: Vec<(usize, &str, usize)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| perr(line, format!("expected key = value, got {content:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let (base, qubit) = match key.split_once('.') {
                Some((b, q)) => {
                    let q: usize = q.parse().map_err(|_| perr(line, format!("bad qubit suffix in {key:?}")))?;
                    (b, Some(q))
                }
                None => (key, None),
            };
            let float = |v: &str| -> Result<f64, ChannelError> {
                v.parse::<f64>().map_err(|_| perr(line, format!("bad number {v:?}")))
            };
            match (base, qubit) {
                ("qubits", None) => {
                    let n: usize = value.parse().map_err(|_| perr(line, format!("bad qubit count {value:?}")))?;
                    if n == 0 {
                        return Err(perr(line, "qubit count must be positive"));
                    }
                    n_qubits = Some(n);
                }
                ("gamma", None) => default_gamma = float(value)?,
                ("gamma", Some(q)) => {
                    gamma.insert(q, float(value)?);
                    key_lines.push((line, "gamma", q));
                }
                ("theta", Some(q)) => {
                    theta.insert(q, float(value)?);
                    key_lines.push((line, "theta", q));
                }
                ("monitor", Some(q)) => {
                    let m = match value {
                        "flip" => QubitMonitor::Flip,
                        "se" => QubitMonitor::Se,
                        "off" => QubitMonitor::Off,
                        other => return Err(perr(line, format!("unknown monitor mode {other:?}"))),
                    };
                    monitor.insert(q, m);
                    key_lines.push((line, "monitor", q));
                }
                ("bs", None) => beamsplitters.push((line, parse_pair(line, value)?)),
                ("trigger", None) => triggers.push((line, parse_pair(line, value)?)),
                _ => return Err(perr(line, format!("unknown key {key:?}"))),
            }
        }

        let n = n_qubits.ok_or_else(|| perr(0, "missing `qubits = N`"))?;
        for &(line, what, q) in &key_lines {
            if q >= n {
                return Err(perr(line, format!("{what}.{q} out of range for {n} qubits")));
            }
        }
        let monitor: Vec<QubitMonitor> = (0..n).map(|q| monitor.get(&q).copied().unwrap_or(QubitMonitor::Flip)).collect();
        let mut used = vec![false; n];
        for &(line, (a, b)) in &beamsplitters {
            for q in [a, b] {
                if q >= n {
                    return Err(perr(line, format!("qubit {q} out of range for {n} qubits")));
                }
                if monitor[q] != QubitMonitor::Flip {
                    return Err(perr(line, format!("qubit {q} has no flip ports to combine")));
                }
                if used[q] {
                    return Err(perr(line, format!("qubit {q} appears in more than one bs line")));
                }
                used[q] = true;
            }
        }
        for &(line, (a, b)) in &triggers {
            if !beamsplitters.iter().any(|&(_, p)| p == (a, b) || p == (b, a)) {
                return Err(perr(line, format!("trigger for missing bs {a} {b}")));
            }
        }
        Ok(LayoutSpec {
            n_qubits: n,
            gamma: (0..n).map(|q| gamma.get(&q).copied().unwrap_or(default_gamma)).collect(),
            theta: (0..n).map(|q| theta.get(&q).copied().unwrap_or(0.0)).collect(),
            monitor,
            beamsplitters: beamsplitters.into_iter().map(|(_, p)| p).collect(),
            triggers: triggers.into_iter().map(|(_, p)| p).collect(),
        })
    }

    pub fn build(&self) -> Result<OpticalLayout, ChannelError> {
        let n = self.n_qubits;
        let mut channels = Vec::new();
        let mut x_ports: Vec<Option<JumpChannel>> = vec![None; n];
        for q in 0..n {
            match self.monitor[q] {
                QubitMonitor::Off => {}
                QubitMonitor::Se => channels.push(se_channel(n, q, self.gamma[q])?),
                QubitMonitor::Flip => {
                    let se = se_channel(n, q, self.gamma[q])?;
                    let is = is_channel(n, q, self.gamma[q])?;
                    let (x, y) = pbs_erase(&se, &is, self.theta[q])?;
                    x_ports[q] = Some(x);
                    channels.push(y);
                }
            }
        }
        let mut restore = Vec::new();
        let mut rules = Vec::new();
        for &(a, b) in &self.beamsplitters {
            let xa = x_ports[a].take().expect("validated flip port");
            let xb = x_ports[b].take().expect("validated flip port");
            let (p, m) = bs_combine(&xa, &xb)?;
            if self.triggers.iter().any(|&t| t == (a, b) || t == (b, a)) {
                rules.push(ReconfigRule {
                    watch: vec![p.detector.clone(), m.detector.clone()],
                    action: ReconfigAction::RemoveBs {
                        entangling: vec![p.id.clone(), m.id.clone()],
                        restore: vec![xa.id.clone(), xb.id.clone()],
                    },
                    once: true,
                });
            }
            channels.push(p);
            channels.push(m);
            restore.push(xa.inactive());
            restore.push(xb.inactive());
        }
        channels.extend(x_ports.into_iter().flatten());
        channels.extend(restore);
        OpticalLayout::new(n, channels, rules)
    }
}

/// Parses and builds a layout description.
pub fn parse_layout(text: &str) -> Result<OpticalLayout, ChannelError> {
    LayoutSpec::parse(text)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{total_decay, DecayProfile};

    #[test]
    fn parses_documented_example() {
        let text = "\
# example
qubits = 2
gamma = 1.0
theta.0 = 0.0
bs = 0 1
trigger = 0 1
";
        let layout = parse_layout(text).unwrap();
        assert_eq!(layout.n_qubits(), 2);
        assert_eq!(layout.triggers().len(), 1);
        let rate = total_decay(layout.active()).unwrap().uniform_rate().unwrap();
        assert!((rate - 2.0).abs() < 1e-14);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_layout("qubits = 2\nbs = 0 5\n").unwrap_err();
        assert_eq!(err, ChannelError::Parse { line: 2, message: "qubit 5 out of range for 2 qubits".into() });
        let err = parse_layout("qubits = 2\n\nfoo = 1\n").unwrap_err();
        assert!(matches!(err, ChannelError::Parse { line: 3, .. }));
        let err = parse_layout("qubits = 3\nbs = 0 1\nbs = 1 2\n").unwrap_err();
        assert!(matches!(err, ChannelError::Parse { line: 3, .. }));
        let err = parse_layout("qubits = 2\nmonitor.0 = se\nbs = 0 1\n").unwrap_err();
        assert!(matches!(err, ChannelError::Parse { line: 3, .. }));
        let err = parse_layout("qubits = 2\ntrigger = 0 1\n").unwrap_err();
        assert!(matches!(err, ChannelError::Parse { line: 2, .. }));
        let err = parse_layout("gamma = x\n").unwrap_err();
        assert!(matches!(err, ChannelError::Parse { line: 1, .. }));
    }

    #[test]
    fn se_monitor_is_diagonal() {
        let layout = parse_layout("qubits = 1\nmonitor.0 = se\ngamma.0 = 2.0\n").unwrap();
        assert!(matches!(total_decay(layout.active()).unwrap(), DecayProfile::Diagonal(_)));
    }
}
