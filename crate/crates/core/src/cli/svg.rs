use std::fmt::Write as _;

use crate::trajectory::TrajectoryLog;

const LABEL_WIDTH: f64 = 110.0;
const PLOT_WIDTH: f64 = 660.0;
const LANE: f64 = 26.0;
const TOP: f64 = 30.0;

/// Click timeline: one lane per detector, a diamond per click, dashed lines
/// at stage boundaries.
pub fn timeline_svg(log: &TrajectoryLog, title: &str) -> String {
    let mut lanes: Vec<&str> = Vec::new();
    for c in &log.clicks {
        if !lanes.contains(&c.detector.as_str()) {
            lanes.push(&c.detector);
        }
    }
    let t_end = log.end_time.max(log.clicks.last().map_or(0.0, |c| c.time)).max(1e-9);
    let x = |t: f64| LABEL_WIDTH + t / t_end * PLOT_WIDTH;
    let height = TOP + LANE * (lanes.len().max(1) as f64) + 40.0;
    let width = LABEL_WIDTH + PLOT_WIDTH + 30.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="monospace" font-size="11">"#
    );
    let _ = writeln!(s, r#"<text x="{LABEL_WIDTH}" y="16">{}</text>"#, escape(title));
    for (i, lane) in lanes.iter().enumerate() {
        let y = TOP + LANE * (i as f64 + 0.5);
        let _ = writeln!(s, r#"<text x="4" y="{:.1}">{}</text>"#, y + 4.0, escape(lane));
        let _ = writeln!(
            s,
            r##"<line x1="{LABEL_WIDTH}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ccc"/>"##,
            LABEL_WIDTH + PLOT_WIDTH
        );
    }
    let bottom = TOP + LANE * lanes.len().max(1) as f64;
    for mark in &log.stage_marks {
        let xm = x(mark.time);
        let _ = writeln!(
            s,
            r##"<line x1="{xm:.2}" y1="{TOP}" x2="{xm:.2}" y2="{bottom:.1}" stroke="#888" stroke-dasharray="4 3"/>"##
        );
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.1}">{}</text>"#, xm + 3.0, TOP - 2.0, escape(&mark.label));
    }
    for c in &log.clicks {
        let lane = lanes.iter().position(|l| *l == c.detector).unwrap_or(0);
        let (cx, cy) = (x(c.time), TOP + LANE * (lane as f64 + 0.5));
        let _ = writeln!(
            s,
            r##"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="#c33"/>"##,
            cx, cy - 6.0, cx + 6.0, cy, cx, cy + 6.0, cx - 6.0, cy
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{LABEL_WIDTH}" y="{:.1}">0</text><text x="{:.1}" y="{:.1}" text-anchor="end">{:.3} (1/gamma)</text>"#,
        bottom + 20.0,
        LABEL_WIDTH + PLOT_WIDTH,
        bottom + 20.0,
        t_end
    );
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::ChannelKind;
    use crate::qstate::OperatorSum;
    use crate::trajectory::{ClickRecord, StageMark};

    #[test]
    fn one_diamond_per_click() {
        let op = OperatorSum::identity(1).unwrap();
        let click = |t: f64, d: &str| ClickRecord {
            time: t,
            detector: d.into(),
            kind: ChannelKind::Flip,
            sign: None,
            qubits: vec![0],
            op: op.clone(),
            stage: 0,
        };
        let log = TrajectoryLog {
            clicks: vec![click(0.5, "Dx0"), click(1.0, "Dy0"), click(1.5, "Dx0")],
            stage_marks: vec![StageMark { time: 0.0, index: 0, label: "a".into() }],
            measurements: Vec::new(),
            end_time: 2.0,
        };
        let svg = timeline_svg(&log, "t<1>");
        assert_eq!(svg.matches("<polygon").count(), 3);
        assert_eq!(svg.matches("stroke=\"#ccc\"").count(), 2);
        assert!(svg.contains("t&lt;1&gt;"));
    }
}
