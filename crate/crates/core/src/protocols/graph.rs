use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use crate::channels::{
    bs_combine, classical_mix, classify_jump, is_channel, pbs_erase, se_channel, ChannelKind, CliffordJump,
    JumpChannel, LayoutSpec, OpticalLayout, QubitMonitor, ReconfigAction, ReconfigRule, RATE_TOL,
};
use crate::qstate::{Pauli, StateVector};
use crate::trajectory::{ClickRecord, ProtocolScript, Stage, Termination, TrajectoryLog};

use super::frame::PauliFrame;
use super::{CorrectionKind, CorrectionOp, ProtocolError};

/// Simple undirected graph on vertices `0..n_vertices`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSpec {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl GraphSpec {
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self, ProtocolError> {
        if n_vertices == 0 {
            return Err(ProtocolError::Config("graph needs at least one vertex".into()));
        }
        let mut seen = BTreeSet::new();
        for &(u, v) in &edges {
            if u == v {
                return Err(ProtocolError::Config(format!("self-loop on vertex {u}")));
            }
            if u >= n_vertices || v >= n_vertices {
                return Err(ProtocolError::Config(format!("edge {u} {v} outside {n_vertices} vertices")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(ProtocolError::Config(format!("duplicate edge {u} {v}")));
            }
        }
        Ok(Self { n_vertices, edges })
    }

    /// Edge list text: one `u v` pair per line, `#` comments. The vertex
    /// count is one more than the largest index.
    pub fn parse(text: &str) -> Result<Self, ProtocolError> {
        let mut edges = Vec::new();
        let mut seen = BTreeSet::new();
        let perr = |line: usize, message: String| ProtocolError::Parse { line, message };
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let parts: Vec<&str> = content.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(perr(line, format!("expected `u v`, got {content:?}")));
            }
            let parse = |s: &str| s.parse::<usize>().map_err(|_| perr(line, format!("bad vertex index {s:?}")));
            let (u, v) = (parse(parts[0])?, parse(parts[1])?);
            if u == v {
                return Err(perr(line, format!("self-loop on vertex {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(perr(line, format!("duplicate edge {u} {v}")));
            }
            edges.push((u, v));
        }
        let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().ok_or_else(|| perr(0, "edge list is empty".into()))?;
        Self::new(n, edges)
    }

    pub fn path(n: usize) -> Result<Self, ProtocolError> {
        Self::new(n, (1..n).map(|v| (v - 1, v)).collect())
    }

    /// `rows × cols` square lattice, vertices numbered row-major.
    pub fn grid(rows: usize, cols: usize) -> Result<Self, ProtocolError> {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    edges.push((v, v + 1));
                }
                if r + 1 < rows {
                    edges.push((v, v + cols));
                }
            }
        }
        Self::new(rows * cols, edges)
    }

    /// One representative per isomorphism class of connected graphs on
    /// exactly `n` vertices (`n ≤ 6`).
    pub fn connected_classes(n: usize) -> Vec<Self> {
        assert!((1..=6).contains(&n), "class enumeration is limited to 1..=6 vertices");
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let perms = permutations(n);
        let mut canon = BTreeSet::new();
        let mut out = Vec::new();
        for mask in 0u32..(1 << pairs.len()) {
            let edges: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
            if !is_connected(n, &edges) {
                continue;
            }
            let key = perms
                .iter()
                .map(|p| {
                    let mut relabeled: Vec<(usize, usize)> =
                        edges.iter().map(|&(u, v)| (p[u].min(p[v]), p[u].max(p[v]))).collect();
                    relabeled.sort_unstable();
                    relabeled
                })
                .min()
                .unwrap_or_default();
            if canon.insert(key) {
                out.push(Self { n_vertices: n, edges });
            }
        }
        out
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.iter().any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u))
    }

    /// Whether every component is a path.
    pub fn is_path_union(&self) -> bool {
        (0..self.n_vertices).all(|v| self.degree(v) <= 2) && self.edges.len() + components(self.n_vertices, &self.edges) == self.n_vertices
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn components(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut count = n;
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a] = b;
            count -= 1;
        }
    }
    count
}

fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    components(n, edges) == 1
}

/// `Π cZ |+⟩^⊗N` for the graph.
pub fn graph_state(graph: &GraphSpec) -> Result<StateVector, ProtocolError> {
    let n = graph.n_vertices;
    if n > StateVector::MAX_QUBITS {
        return Err(ProtocolError::Config(format!("{n} vertices exceed the statevector capacity")));
    }
    let amp = (0.5f64).powf(n as f64 / 2.0);
    let amps = (0..1usize << n)
        .map(|idx| {
            let bit = |q: usize| (idx >> (n - 1 - q)) & 1;
            let parity = graph.edges.iter().map(|&(u, v)| bit(u) & bit(v)).sum::<usize>() % 2;
            Complex64::new(if parity == 0 { amp } else { -amp }, 0.0)
        })
        .collect();
    Ok(StateVector::from_amplitudes(n, amps)?)
}

/// How the σx ports feed the beam splitters of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wiring {
    /// All edges wired at once. Edge `(j, k)` taps `γ/(2·max(d_j, d_k))`
    /// from each endpoint's σx port; the rest of each port stays local.
    PairwiseSplit,
    /// One stage per edge in list order, each with a single BS over the full
    /// σx ports. Only for unions of paths.
    SequentialChain,
}

fn flip_ports(n: usize, q: usize, gamma: f64) -> Result<(JumpChannel, JumpChannel), ProtocolError> {
    Ok(pbs_erase(&se_channel(n, q, gamma)?, &is_channel(n, q, gamma)?, 0.0)?)
}

/// Self-reconfiguring generation script with unit emission rate; all qubits
/// start in `|0⟩`.
pub fn graph_script(graph: &GraphSpec, wiring: Wiring) -> Result<ProtocolScript, ProtocolError> {
    if graph.edges.is_empty() {
        return Err(ProtocolError::Config("graph has no edges".into()));
    }
    let n = graph.n_vertices;
    let gamma = 1.0;
    let stages = match wiring {
        Wiring::PairwiseSplit => vec![Stage {
            label: "entangle".into(),
            layout: split_layout(graph, gamma)?,
            termination: Termination::Clicks { kind: ChannelKind::Entangle, count: graph.edges.len() },
        }],
        Wiring::SequentialChain => {
            if !graph.is_path_union() {
                return Err(ProtocolError::Config("sequential wiring needs a union of paths".into()));
            }
            graph
                .edges
                .iter()
                .map(|&(u, v)| {
                    let spec = LayoutSpec {
                        n_qubits: n,
                        gamma: vec![gamma; n],
                        theta: vec![0.0; n],
                        monitor: vec![QubitMonitor::Flip; n],
                        beamsplitters: vec![(u, v)],
                        triggers: vec![(u, v)],
                    };
                    Ok(Stage {
                        label: format!("edge {u}-{v}"),
                        layout: spec.build()?,
                        termination: Termination::Clicks { kind: ChannelKind::Entangle, count: 1 },
                    })
                })
                .collect::<Result<Vec<_>, ProtocolError>>()?
        }
    };
    Ok(ProtocolScript {
        n_qubits: n,
        initial: vec![[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]; n],
        stages,
        roles: Vec::new(),
    })
}

fn split_layout(graph: &GraphSpec, gamma: f64) -> Result<OpticalLayout, ProtocolError> {
    let n = graph.n_vertices;
    let degree: Vec<usize> = (0..n).map(|v| graph.degree(v)).collect();
    let mut x_ports = Vec::with_capacity(n);
    let mut channels = Vec::new();
    for q in 0..n {
        let (x, y) = flip_ports(n, q, gamma)?;
        channels.push(y);
        x_ports.push(x);
    }
    let mut residual: Vec<f64> = x_ports.iter().map(|x| x.rate).collect();
    let mut restore = Vec::new();
    let mut rules = Vec::new();
    for &(u, v) in &graph.edges {
        let share = gamma / (2.0 * degree[u].max(degree[v]) as f64);
        let tap_u = x_ports[u].with_rate(share)?.with_label(format!("Dx{u}~{u}.{v}"));
        let tap_v = x_ports[v].with_rate(share)?.with_label(format!("Dx{v}~{u}.{v}"));
        residual[u] -= share;
        residual[v] -= share;
        let (p, m) = bs_combine(&tap_u, &tap_v)?;
        rules.push(ReconfigRule {
            watch: vec![p.detector.clone(), m.detector.clone()],
            action: ReconfigAction::RemoveBs {
                entangling: vec![p.id.clone(), m.id.clone()],
                restore: vec![tap_u.id.clone(), tap_v.id.clone()],
            },
            once: true,
        });
        channels.push(p);
        channels.push(m);
        restore.push(tap_u.inactive());
        restore.push(tap_v.inactive());
    }
    for (x, rest) in x_ports.iter().zip(&residual) {
        if *rest > RATE_TOL * gamma {
            channels.push(x.with_rate(*rest)?);
        }
    }
    channels.extend(restore);
    Ok(OpticalLayout::new(n, channels, rules)?)
}

/// Appends a stage in which `qubit`'s σy port is mixed with a classical
/// field, ending at the first mix click (a jump `exp(sign·iπ/4·σy)`). All
/// other flip ports stay local. The last stage must leave a σy port on
/// every qubit.
pub fn hadamard_via_mix(script: &ProtocolScript, qubit: usize, sign: i8) -> Result<ProtocolScript, ProtocolError> {
    let n = script.n_qubits;
    if qubit >= n {
        return Err(ProtocolError::Config(format!("qubit {qubit} outside the register")));
    }
    let last = script.stages.last().ok_or_else(|| ProtocolError::Config("script has no stages".into()))?;
    let mut channels = Vec::new();
    for q in 0..n {
        let y_rate = last
            .layout
            .active()
            .find(|c| c.qubits() == [q] && matches!(c.flip_pauli(), Some((Pauli::Y, _))))
            .map(|c| c.rate)
            .ok_or_else(|| ProtocolError::Config(format!("qubit {q} has no active σy port")))?;
        let (x, y) = flip_ports(n, q, 2.0 * y_rate)?;
        channels.push(x);
        if q == qubit {
            channels.push(classical_mix(&y, sign)?);
        } else {
            channels.push(y);
        }
    }
    let mut out = script.clone();
    out.stages.push(Stage {
        label: format!("mix {qubit}"),
        layout: OpticalLayout::new(n, channels, Vec::new())?,
        termination: Termination::Clicks { kind: ChannelKind::ClassicalMix, count: 1 },
    });
    Ok(out)
}

fn classify(click: &ClickRecord) -> Result<(Complex64, CliffordJump), ProtocolError> {
    classify_jump(&click.op)
        .ok_or_else(|| ProtocolError::LogCorrupt(format!("click on {} is not a Clifford jump", click.detector)))
}

fn pauli_kind(p: Pauli) -> CorrectionKind {
    match p {
        Pauli::I => CorrectionKind::Identity,
        Pauli::X => CorrectionKind::PauliX,
        Pauli::Y => CorrectionKind::PauliY,
        Pauli::Z => CorrectionKind::PauliZ,
    }
}

/// Local operations, in application order, that map the generated state
/// exactly onto `Π cZ |+⟩^⊗N`.
///
/// With `X^± = exp(±iπ/4·σx)` and `cX` the X-basis controlled phase, each
/// entangling jump factors as `X_jk^s = e^{s·iπ/4} X_j^{−s} X_k^{s} cX_jk`.
/// All factors commute, `Π cX |0…0⟩ = H^⊗N |G⟩`, and the accumulated σx
/// rotations become `Z_v^{c_v}` rotations after the Hadamards, with `c_v`
/// summing `−s` over edges where `v` is the first endpoint and `+s` where it
/// is the second. Flip clicks are carried in a Pauli frame; clicks after the
/// last entangling click are undone explicitly.
pub fn graph_correction(log: &TrajectoryLog, graph: &GraphSpec) -> Result<Vec<CorrectionOp>, ProtocolError> {
    let n = graph.n_vertices;
    let last_entangle = log
        .clicks
        .iter()
        .rposition(|c| c.kind == ChannelKind::Entangle)
        .ok_or_else(|| ProtocolError::Incomplete("no entangling click".into()))?;
    let mut frame = PauliFrame::new(n);
    let mut rotation = vec![0i32; n];
    let mut eighths = 0i32;
    let mut done = BTreeSet::new();
    for click in &log.clicks[..=last_entangle] {
        match click.kind {
            ChannelKind::Flip | ChannelKind::Entangle => {}
            ChannelKind::ClassicalMix => {
                return Err(ProtocolError::LogCorrupt("mix click before the last entangling click".into()))
            }
            other => return Err(ProtocolError::LogCorrupt(format!("unexpected {} click", other.label()))),
        }
        match classify(click)? {
            (omega, CliffordJump::Pauli { qubit, pauli }) if qubit < n => frame.push_flip(qubit, pauli, omega),
            (omega, CliffordJump::Entangle { j, k, sign }) => {
                if !graph.has_edge(j, k) {
                    return Err(ProtocolError::LogCorrupt(format!("entangling click on non-edge {j}-{k}")));
                }
                if !done.insert((j.min(k), j.max(k))) {
                    return Err(ProtocolError::LogCorrupt(format!("edge {j}-{k} clicked twice")));
                }
                let s = frame.push_entangle(j, k, sign, omega) as i32;
                eighths += s;
                rotation[j] -= s;
                rotation[k] += s;
            }
            (_, other) => return Err(ProtocolError::LogCorrupt(format!("unexpected jump {other:?}"))),
        }
    }
    if done.len() != graph.edges.len() {
        return Err(ProtocolError::Incomplete(format!(
            "{} of {} edges clicked",
            done.len(),
            graph.edges.len()
        )));
    }
    let mut ops = Vec::new();
    for click in log.clicks[last_entangle + 1..].iter().rev() {
        let op = match classify(click)? {
            (omega, CliffordJump::Pauli { qubit, pauli }) if qubit < n => {
                CorrectionOp::new(pauli_kind(pauli), qubit).with_phase(omega.conj())
            }
            (omega, CliffordJump::QuarterY { qubit, sign }) if qubit < n => {
                CorrectionOp::new(CorrectionKind::HadamardLike(-sign), qubit).with_phase(omega.conj())
            }
            (_, other) => return Err(ProtocolError::LogCorrupt(format!("unexpected late jump {other:?}"))),
        };
        ops.push(op);
    }
    let omega = frame.phase * Complex64::from_polar(1.0, eighths as f64 * FRAC_PI_4);
    let mut first = true;
    for v in 0..n {
        let mut local = Vec::with_capacity(3);
        if frame.get(v) != Pauli::I {
            local.push(CorrectionOp::new(pauli_kind(frame.get(v)), v));
        }
        local.push(CorrectionOp::new(CorrectionKind::Hadamard, v));
        let k = (-rotation[v]).rem_euclid(8) as u8;
        if k != 0 {
            local.push(CorrectionOp::new(CorrectionKind::ZRot(k), v));
        }
        if first {
            local[0].phase = omega.conj();
            first = false;
        }
        ops.extend(local);
    }
    Ok(ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::apply_corrections;
    use crate::qstate::gates::entangling_jump;
    use crate::qstate::{OperatorSum, SiteOp};
    use crate::trajectory::{run, RngStream};

    fn record(op: OperatorSum, kind: ChannelKind, time: f64) -> ClickRecord {
        let qubits = op.support();
        ClickRecord { time, detector: format!("d{time}"), kind, sign: None, qubits, op, stage: 0 }
    }

    fn assert_exact(state: &StateVector, ops: &[CorrectionOp], graph: &GraphSpec) {
        let out = apply_corrections(state, ops).unwrap();
        let overlap = graph_state(graph).unwrap().inner(&out).unwrap();
        assert!((overlap - Complex64::new(1.0, 0.0)).norm() < 1e-10, "overlap {overlap}");
    }

    #[test]
    fn class_counts() {
        let counts: Vec<usize> = (1..=5).map(|n| GraphSpec::connected_classes(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21]);
    }

    #[test]
    fn edge_list_parsing() {
        let g = GraphSpec::parse("# path\n0 1\n1 2 # tail\n").unwrap();
        assert_eq!(g.n_vertices(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert!(matches!(GraphSpec::parse("0 1\n1 1\n"), Err(ProtocolError::Parse { line: 2, .. })));
        assert!(matches!(GraphSpec::parse("0 1\n1 0\n"), Err(ProtocolError::Parse { line: 2, .. })));
        assert!(matches!(GraphSpec::parse("0 x\n"), Err(ProtocolError::Parse { line: 1, .. })));
        assert!(GraphSpec::parse("# nothing\n").is_err());
    }

    #[test]
    fn single_edge_hand_log() {
        let g = GraphSpec::path(2).unwrap();
        for s in [1i8, -1] {
            let op = entangling_jump(2, 0, 1, s).unwrap();
            let state = op.act(&StateVector::basis_state(2, "00").unwrap()).unwrap();
            let log = TrajectoryLog { clicks: vec![record(op, ChannelKind::Entangle, 1.0)], ..Default::default() };
            assert_exact(&state, &graph_correction(&log, &g).unwrap(), &g);
        }
    }

    #[test]
    fn path_with_flip_hand_log() {
        let g = GraphSpec::path(3).unwrap();
        let ops = [
            record(entangling_jump(3, 0, 1, 1).unwrap(), ChannelKind::Entangle, 1.0),
            record(OperatorSum::single(3, 1, SiteOp::Y, 1.0).unwrap(), ChannelKind::Flip, 2.0),
            record(entangling_jump(3, 1, 2, -1).unwrap(), ChannelKind::Entangle, 3.0),
        ];
        let mut state = StateVector::basis_state(3, "000").unwrap();
        for r in &ops {
            state = r.op.act(&state).unwrap();
        }
        let log = TrajectoryLog { clicks: ops.to_vec(), ..Default::default() };
        let corr = graph_correction(&log, &g).unwrap();
        assert!(corr.iter().all(|c| c.qubit < 3));
        assert_exact(&state, &corr, &g);
    }

    #[test]
    fn wiring_preserves_uniform_decay() {
        let g = GraphSpec::grid(2, 3).unwrap();
        let script = graph_script(&g, Wiring::PairwiseSplit).unwrap();
        let layout = &script.stages[0].layout;
        let total: f64 = layout.active().map(|c| c.rate).sum();
        assert!((total - 6.0).abs() < 1e-12);
        let rate = crate::channels::total_decay(layout.active()).unwrap().uniform_rate().unwrap();
        assert!((rate - 6.0).abs() < 1e-12);
    }

    #[test]
    fn generated_states_correct_exactly() {
        for (g, wiring) in [
            (GraphSpec::path(3).unwrap(), Wiring::PairwiseSplit),
            (GraphSpec::path(4).unwrap(), Wiring::SequentialChain),
            (GraphSpec::grid(2, 3).unwrap(), Wiring::PairwiseSplit),
            (GraphSpec::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap(), Wiring::PairwiseSplit),
        ] {
            let script = graph_script(&g, wiring).unwrap();
            for i in 0..30 {
                let (log, state) = run(&script, RngStream::new(8, i)).unwrap();
                assert_exact(&state, &graph_correction(&log, &g).unwrap(), &g);
            }
        }
        assert!(graph_script(&GraphSpec::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap(), Wiring::SequentialChain).is_err());
    }

    #[test]
    fn mix_stage_is_undone() {
        let g = GraphSpec::path(2).unwrap();
        for sign in [1i8, -1] {
            let script = hadamard_via_mix(&graph_script(&g, Wiring::PairwiseSplit).unwrap(), 1, sign).unwrap();
            for i in 0..20 {
                let (log, state) = run(&script, RngStream::new(5, i)).unwrap();
                assert_eq!(log.clicks.last().unwrap().kind, ChannelKind::ClassicalMix);
                assert_exact(&state, &graph_correction(&log, &g).unwrap(), &g);
            }
        }
    }

    #[test]
    fn mix_jump_exchanges_bases() {
        let g = GraphSpec::path(2).unwrap();
        let script = hadamard_via_mix(&graph_script(&g, Wiring::PairwiseSplit).unwrap(), 0, -1).unwrap();
        let mix = script.stages[1].layout.channels().iter().find(|c| c.kind == ChannelKind::ClassicalMix).unwrap();
        let zero = StateVector::basis_state(2, "00").unwrap();
        let out = mix.op.apply(&zero).unwrap().normalize().unwrap();
        let plus = StateVector::product(&[
            [Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0); 2],
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        ])
        .unwrap();
        assert!((out.fidelity(&plus).unwrap() - 1.0).abs() < 1e-12);
        let twice = mix.op.apply(&out).unwrap().normalize().unwrap();
        assert!((twice.fidelity(&StateVector::basis_state(2, "10").unwrap()).unwrap() - 1.0).abs() < 1e-12);
    }
}
