use std::fmt::Write as _;

use crate::channels::ChannelKind;
use crate::qstate::OperatorSum;

/// One detector click.
#[derive(Debug, Clone, PartialEq)]
pub struct ClickRecord {
    /// In units of `1/γ`.
    pub time: f64,
    pub detector: String,
    pub kind: ChannelKind,
    /// BS port sign for entangling and mix clicks.
    pub sign: Option<i8>,
    pub qubits: Vec<usize>,
    /// Jump operator of the clicking channel.
    pub op: OperatorSum,
    pub stage: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageMark {
    pub time: f64,
    pub index: usize,
    pub label: String,
}

/// Resolved computational-basis readout of a monitored qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub qubit: usize,
    pub outcome: u8,
    pub stage: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryLog {
    pub clicks: Vec<ClickRecord>,
    pub stage_marks: Vec<StageMark>,
    pub measurements: Vec<MeasurementRecord>,
    /// Time at which the run stopped.
    pub end_time: f64,
}

impl TrajectoryLog {
    pub fn is_time_ordered(&self) -> bool {
        self.clicks.windows(2).all(|w| w[0].time < w[1].time)
    }

    pub fn clicks_of(&self, kind: ChannelKind) -> impl Iterator<Item = &ClickRecord> {
        self.clicks.iter().filter(move |c| c.kind == kind)
    }

    pub fn outcome(&self, qubit: usize) -> Option<u8> {
        self.measurements.iter().rev().find(|m| m.qubit == qubit).map(|m| m.outcome)
    }

    /// Click table: header `time,detector,kind,sign,qubits`, times with 12
    /// significant digits, qubits separated by `;`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,detector,kind,sign,qubits\n");
        for c in &self.clicks {
            let sign = match c.sign {
                Some(s) if s > 0 => "+",
                Some(_) => "-",
                None => "",
            };
            let qubits: Vec<String> = c.qubits.iter().map(|q| q.to_string()).collect();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                format_sig(c.time, 12),
                c.detector,
                c.kind.label(),
                sign,
                qubits.join(";")
            );
        }
        out
    }
}

/// Fixed-point rendering with `digits` significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(std::f64::consts::LN_2, 12), "0.693147180560");
        assert_eq!(format_sig(12.5, 12), "12.5000000000");
        assert_eq!(format_sig(0.0, 12), "0");
        assert_eq!(format_sig(123456789012345.0, 12), "123456789012345");
    }

    #[test]
    fn csv_layout() {
        let op = OperatorSum::identity(2).unwrap();
        let log = TrajectoryLog {
            clicks: vec![
                ClickRecord { time: 0.5, detector: "E0.1+".into(), kind: ChannelKind::Entangle, sign: Some(1), qubits: vec![0, 1], op: op.clone(), stage: 0 },
                ClickRecord { time: 1.25, detector: "Dy0".into(), kind: ChannelKind::Flip, sign: None, qubits: vec![0], op, stage: 1 },
            ],
            ..Default::default()
        };
        let csv = log.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "time,detector,kind,sign,qubits");
        assert_eq!(lines[1], "0.500000000000,E0.1+,ENTANGLE,+,0;1");
        assert_eq!(lines[2], "1.25000000000,Dy0,FLIP,,0");
        assert!(log.is_time_ordered());
    }
}
