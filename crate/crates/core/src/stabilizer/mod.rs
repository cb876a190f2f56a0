//! Bit-packed stabilizer tableau.
//!
//! Rows `0..n` are destabilizers, rows `n..2n` stabilizers. Row `r` encodes
//! `i^p · Π_q X_q^{x} Z_q^{z}` with the X factor written left of the Z factor
//! on every qubit, so `Y = i·X·Z` has `x = z = 1` and contributes one power of
//! `i`. Bits are stored column-major: each qubit owns one `u64` bitplane per
//! Pauli component, indexed by row, and the phase exponent is kept as two
//! bitplanes. A single- or two-qubit gate touches `O(n/64)` words.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::channels::{classify_jump, JumpChannel};
use crate::channels::CliffordJump;
use crate::protocols::{CorrectionKind, CorrectionOp, GraphSpec};
use crate::qstate::{gates, i_pow, OperatorSum, Pauli, PauliTerm, SiteOp, StateError, StateVector};
use crate::trajectory::{Register, TrajectoryError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilizerError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("tableau integrity violated: {0}")]
    Integrity(String),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Clifford gates understood by the tableau.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cx(usize, usize),
    Cz(usize, usize),
    /// Entangling jump `(X_j + s·i·X_k)/√2`.
    Xjk { sign: i8, j: usize, k: usize },
    /// `exp(s·iπ/4·σy)`.
    QuarterY { sign: i8, qubit: usize },
}

impl Gate {
    /// Parses `H 0`, `CX 0 1`, `XJK + 0 1`, `QY - 2` and similar.
    pub fn parse(text: &str) -> Result<Gate, StabilizerError> {
        let parts: Vec<&str> = text.split_whitespace().collect();
        let err = || StabilizerError::Config(format!("unknown gate {text:?}"));
        let idx = |s: &str| s.parse::<usize>().map_err(|_| err());
        let sign = |s: &str| match s {
            "+" => Ok(1i8),
            "-" => Ok(-1i8),
            _ => Err(err()),
        };
        let name = parts.first().ok_or_else(err)?.to_ascii_uppercase();
        match (name.as_str(), &parts[1..]) {
            ("H", [q]) => Ok(Gate::H(idx(q)?)),
            ("S", [q]) => Ok(Gate::S(idx(q)?)),
            ("SDG", [q]) => Ok(Gate::Sdg(idx(q)?)),
            ("X", [q]) => Ok(Gate::X(idx(q)?)),
            ("Y", [q]) => Ok(Gate::Y(idx(q)?)),
            ("Z", [q]) => Ok(Gate::Z(idx(q)?)),
            ("CX", [a, b]) => Ok(Gate::Cx(idx(a)?, idx(b)?)),
            ("CZ", [a, b]) => Ok(Gate::Cz(idx(a)?, idx(b)?)),
            ("XJK", [s, j, k]) => Ok(Gate::Xjk { sign: sign(s)?, j: idx(j)?, k: idx(k)? }),
            ("QY", [s, q]) => Ok(Gate::QuarterY { sign: sign(s)?, qubit: idx(q)? }),
            _ => Err(err()),
        }
    }

    fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => vec![q],
            Gate::QuarterY { qubit, .. } => vec![qubit],
            Gate::Cx(a, b) | Gate::Cz(a, b) | Gate::Xjk { j: a, k: b, .. } => vec![a, b],
        }
    }

    /// The gate as a unitary on an `n`-qubit statevector.
    pub fn operator(&self, n: usize) -> Result<OperatorSum, StateError> {
        match *self {
            Gate::H(q) => gates::hadamard(n, q),
            Gate::S(q) => gates::phase_s(n, q),
            Gate::Sdg(q) => gates::phase_sdg(n, q),
            Gate::X(q) => gates::pauli(n, q, SiteOp::X),
            Gate::Y(q) => gates::pauli(n, q, SiteOp::Y),
            Gate::Z(q) => gates::pauli(n, q, SiteOp::Z),
            Gate::Cx(a, b) => gates::cx(n, a, b),
            Gate::Cz(a, b) => gates::cz(n, a, b),
            Gate::Xjk { sign, j, k } => gates::entangling_jump(n, j, k, sign),
            Gate::QuarterY { sign, qubit } => gates::quarter_rotation(n, qubit, SiteOp::Y, sign as i32),
        }
    }
}

/// One tableau row in row-major form.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Row {
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl Row {
    fn identity(words: usize) -> Self {
        Row { x: vec![0; words], z: vec![0; words], phase: 0 }
    }

    fn get(&self, q: usize) -> (bool, bool) {
        (self.x[q / 64] >> (q % 64) & 1 == 1, self.z[q / 64] >> (q % 64) & 1 == 1)
    }

    fn anticommutes(&self, other: &Row) -> bool {
        let mut parity = 0u32;
        for w in 0..self.x.len() {
            parity ^= ((self.x[w] & other.z[w]).count_ones() ^ (self.z[w] & other.x[w]).count_ones()) & 1;
        }
        parity == 1
    }

    /// `self ← self · other`.
    fn mul_assign(&mut self, other: &Row) {
        let mut swaps = 0u32;
        for w in 0..self.x.len() {
            swaps += (self.z[w] & other.x[w]).count_ones();
            self.x[w] ^= other.x[w];
            self.z[w] ^= other.z[w];
        }
        self.phase = ((self.phase as u32 + other.phase as u32 + 2 * swaps) % 4) as u8;
    }

    fn is_hermitian(&self) -> bool {
        let y: u32 = self.x.iter().zip(&self.z).map(|(a, b)| (a & b).count_ones()).sum();
        (self.phase as u32 + y).is_multiple_of(2)
    }
}

/// Stabilizer state of `n` qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    p0: Vec<u64>,
    p1: Vec<u64>,
}

impl StabilizerTableau {
    /// `|0…0⟩`.
    pub fn zero_state(n: usize) -> Result<Self, StabilizerError> {
        if n == 0 {
            return Err(StabilizerError::Config("tableau needs at least one qubit".into()));
        }
        let words = (2 * n).div_ceil(64);
        let mut t = StabilizerTableau {
            n,
            words,
            x: vec![0; n * words],
            z: vec![0; n * words],
            p0: vec![0; words],
            p1: vec![0; words],
        };
        for q in 0..n {
            t.set(q, q, true, false);
            t.set(n + q, q, false, true);
        }
        Ok(t)
    }

    /// Graph state with stabilizers `X_v Π_{u∈N(v)} Z_u` and destabilizers `Z_v`.
    pub fn from_graph(graph: &GraphSpec) -> Result<Self, StabilizerError> {
        let n = graph.n_vertices();
        let mut t = Self::zero_state(n)?;
        t.x.iter_mut().for_each(|w| *w = 0);
        t.z.iter_mut().for_each(|w| *w = 0);
        for v in 0..n {
            t.set(v, v, false, true);
            t.set(n + v, v, true, false);
        }
        for &(u, v) in graph.edges() {
            t.set(n + u, v, false, true);
            t.set(n + v, u, false, true);
        }
        Ok(t)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    fn set(&mut self, row: usize, q: usize, x: bool, z: bool) {
        let (i, b) = (q * self.words + row / 64, 1u64 << (row % 64));
        if x {
            self.x[i] |= b;
        } else {
            self.x[i] &= !b;
        }
        if z {
            self.z[i] |= b;
        } else {
            self.z[i] &= !b;
        }
    }

    fn row(&self, r: usize) -> Row {
        let words = self.n.div_ceil(64);
        let mut row = Row::identity(words);
        let (w, b) = (r / 64, r % 64);
        for q in 0..self.n {
            let xb = self.x[q * self.words + w] >> b & 1;
            let zb = self.z[q * self.words + w] >> b & 1;
            row.x[q / 64] |= xb << (q % 64);
            row.z[q / 64] |= zb << (q % 64);
        }
        row.phase = ((self.p0[w] >> b & 1) | ((self.p1[w] >> b & 1) << 1)) as u8;
        row
    }

    fn check(&self, q: usize) -> Result<(), StabilizerError> {
        if q >= self.n {
            return Err(StabilizerError::Config(format!("qubit {q} outside {} qubits", self.n)));
        }
        Ok(())
    }

    /// `p += bits` on every row.
    fn add_phase(&mut self, w: usize, bits: u64) {
        let carry = self.p0[w] & bits;
        self.p0[w] ^= bits;
        self.p1[w] ^= carry;
    }

    fn h(&mut self, q: usize) {
        let base = q * self.words;
        for w in 0..self.words {
            let (x, z) = (self.x[base + w], self.z[base + w]);
            self.p1[w] ^= x & z;
            self.x[base + w] = z;
            self.z[base + w] = x;
        }
    }

    fn s(&mut self, q: usize) {
        let base = q * self.words;
        for w in 0..self.words {
            let x = self.x[base + w];
            self.add_phase(w, x);
            self.z[base + w] ^= x;
        }
    }

    fn sdg(&mut self, q: usize) {
        let base = q * self.words;
        for w in 0..self.words {
            let x = self.x[base + w];
            self.p1[w] ^= x;
            self.add_phase(w, x);
            self.z[base + w] ^= x;
        }
    }

    fn pauli(&mut self, q: usize, p: Pauli) {
        let base = q * self.words;
        for w in 0..self.words {
            let (x, z) = (self.x[base + w], self.z[base + w]);
            self.p1[w] ^= match p {
                Pauli::I => 0,
                Pauli::X => z,
                Pauli::Y => x ^ z,
                Pauli::Z => x,
            };
        }
    }

    fn cx(&mut self, c: usize, t: usize) {
        let (bc, bt) = (c * self.words, t * self.words);
        for w in 0..self.words {
            let xc = self.x[bc + w];
            let zt = self.z[bt + w];
            self.x[bt + w] ^= xc;
            self.z[bc + w] ^= zt;
        }
    }

    fn cz(&mut self, a: usize, b: usize) {
        let (ba, bb) = (a * self.words, b * self.words);
        for w in 0..self.words {
            let (xa, xb) = (self.x[ba + w], self.x[bb + w]);
            self.p1[w] ^= xa & xb;
            self.z[ba + w] ^= xb;
            self.z[bb + w] ^= xa;
        }
    }

    pub fn apply_gate(&mut self, gate: Gate) -> Result<(), StabilizerError> {
        let qs = gate.qubits();
        for &q in &qs {
            self.check(q)?;
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(StabilizerError::Config(format!("two-qubit gate {gate:?} on one qubit")));
        }
        match gate {
            Gate::H(q) => self.h(q),
            Gate::S(q) => self.s(q),
            Gate::Sdg(q) => self.sdg(q),
            Gate::X(q) => self.pauli(q, Pauli::X),
            Gate::Y(q) => self.pauli(q, Pauli::Y),
            Gate::Z(q) => self.pauli(q, Pauli::Z),
            Gate::Cx(c, t) => self.cx(c, t),
            Gate::Cz(a, b) => self.cz(a, b),
            Gate::Xjk { sign, j, k } => {
                // X-basis controlled phase, then exp(s·iπ/4·X_k) and exp(−s·iπ/4·X_j)
                for q in [j, k] {
                    self.h(q);
                }
                self.cz(j, k);
                for q in [j, k] {
                    self.h(q);
                }
                self.quarter_x(k, sign);
                self.quarter_x(j, -sign);
            }
            Gate::QuarterY { sign, qubit } => {
                if sign > 0 {
                    self.h(qubit);
                    self.pauli(qubit, Pauli::Z);
                } else {
                    self.pauli(qubit, Pauli::Z);
                    self.h(qubit);
                }
            }
        }
        Ok(())
    }

    /// `exp(s·iπ/4·X)`, equal to `H·S†·H` for `s = +1` and `H·S·H` for `s = −1`
    /// up to phase.
    fn quarter_x(&mut self, q: usize, sign: i8) {
        self.h(q);
        if sign > 0 {
            self.sdg(q);
        } else {
            self.s(q);
        }
        self.h(q);
    }

    pub fn apply_correction(&mut self, op: &CorrectionOp) -> Result<(), StabilizerError> {
        let q = op.qubit;
        match op.kind {
            CorrectionKind::Identity => self.check(q),
            CorrectionKind::PauliX => self.apply_gate(Gate::X(q)),
            CorrectionKind::PauliY => self.apply_gate(Gate::Y(q)),
            CorrectionKind::PauliZ => self.apply_gate(Gate::Z(q)),
            CorrectionKind::Hadamard => self.apply_gate(Gate::H(q)),
            CorrectionKind::HadamardLike(s) => self.apply_gate(Gate::QuarterY { sign: s, qubit: q }),
            CorrectionKind::ZRot(k) => {
                // exp(i·k·π/4·Z) = e^{ikπ/4}·(S†)^k
                for _ in 0..k % 4 {
                    self.apply_gate(Gate::Sdg(q))?;
                }
                Ok(())
            }
        }
    }

    /// Checks Hermiticity of every row and the symplectic pairing between
    /// destabilizers and stabilizers.
    pub fn validate(&self) -> Result<(), StabilizerError> {
        let rows: Vec<Row> = (0..2 * self.n).map(|r| self.row(r)).collect();
        for (r, row) in rows.iter().enumerate() {
            if !row.is_hermitian() {
                return Err(StabilizerError::Integrity(format!("row {r} is not Hermitian")));
            }
        }
        let n = self.n;
        for a in 0..2 * n {
            for b in a + 1..2 * n {
                let expect = b == a + n;
                if rows[a].anticommutes(&rows[b]) != expect {
                    return Err(StabilizerError::Integrity(format!(
                        "rows {a} and {b} {} but should {}",
                        if expect { "commute" } else { "anticommute" },
                        if expect { "anticommute" } else { "commute" }
                    )));
                }
            }
        }
        Ok(())
    }

    /// Whether both tableaux stabilize the same state (global phase ignored).
    ///
    /// Each stabilizer of `other` is expanded over this tableau's stabilizers,
    /// with the destabilizers selecting the generators involved, and compared
    /// with phase.
    pub fn states_equal(&self, other: &StabilizerTableau) -> Result<bool, StabilizerError> {
        if self.n != other.n {
            return Err(StabilizerError::Config(format!("qubit counts differ: {} vs {}", self.n, other.n)));
        }
        self.validate()?;
        other.validate()?;
        let n = self.n;
        let destab: Vec<Row> = (0..n).map(|r| self.row(r)).collect();
        let stab: Vec<Row> = (n..2 * n).map(|r| self.row(r)).collect();
        for r in n..2 * n {
            let g = other.row(r);
            let mut acc = Row::identity(g.x.len());
            for i in 0..n {
                if g.anticommutes(&destab[i]) {
                    acc.mul_assign(&stab[i]);
                }
            }
            if acc != g {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Stabilizer generators, one per line, as a signed Pauli string with
    /// qubit 0 leftmost (e.g. `+XZI`, `-iYX`).
    pub fn dump_generators(&self) -> String {
        let mut out = String::new();
        for r in self.n..2 * self.n {
            let row = self.row(r);
            let mut ys = 0u32;
            let mut s = String::with_capacity(self.n);
            for q in 0..self.n {
                s.push(match row.get(q) {
                    (false, false) => 'I',
                    (true, false) => 'X',
                    (true, true) => {
                        ys += 1;
                        'Y'
                    }
                    (false, true) => 'Z',
                });
            }
            // X·Z = −i·Y on each Y site
            let phase = (row.phase as u32 + 3 * ys) % 4;
            out.push_str(["+", "+i", "-", "-i"][phase as usize]);
            out.push_str(&s);
            out.push('\n');
        }
        out
    }

    /// Stabilizer generator `r` (`0..n`) as a statevector operator.
    fn generator_operator(&self, r: usize) -> Result<OperatorSum, StabilizerError> {
        let row = self.row(self.n + r);
        let mut coeff = i_pow(row.phase);
        let mut factors = Vec::new();
        for q in 0..self.n {
            match row.get(q) {
                (false, false) => {}
                (true, false) => factors.push((q, SiteOp::X)),
                (false, true) => factors.push((q, SiteOp::Z)),
                (true, true) => {
                    coeff *= Complex64::new(0.0, -1.0);
                    factors.push((q, SiteOp::Y));
                }
            }
        }
        Ok(OperatorSum::new(self.n, vec![PauliTerm::new(coeff, factors)?])?)
    }

    /// The stabilized state, obtained by projecting a fixed pseudo-random
    /// vector with `Π (I + S_i)/2`; defined up to global phase.
    pub fn to_statevector(&self) -> Result<StateVector, StabilizerError> {
        if self.n > 16 {
            return Err(StabilizerError::Config(format!("{} qubits is too many for reconstruction", self.n)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let amps: Vec<Complex64> = (0..1usize << self.n)
            .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect();
        let mut v = StateVector::from_amplitudes(self.n, amps)?;
        let id = OperatorSum::identity(self.n)?;
        for r in 0..self.n {
            let proj = id.plus(&self.generator_operator(r)?)?.scaled(Complex64::new(0.5, 0.0));
            v = proj.act(&v)?;
        }
        Ok(v.normalize()?)
    }
}

impl Register for StabilizerTableau {
    fn n_qubits(&self) -> usize {
        self.n
    }

    fn statevector(&self) -> Option<&StateVector> {
        None
    }

    fn statevector_mut(&mut self) -> Option<&mut StateVector> {
        None
    }

    fn jump(&mut self, channel: &JumpChannel) -> Result<(), TrajectoryError> {
        let (_, jump) = classify_jump(&channel.op).ok_or_else(|| {
            TrajectoryError::Unsupported(format!("channel {} is not a Clifford jump", channel.id))
        })?;
        let gate = match jump {
            CliffordJump::Pauli { qubit, pauli: Pauli::X } => Gate::X(qubit),
            CliffordJump::Pauli { qubit, pauli: Pauli::Y } => Gate::Y(qubit),
            CliffordJump::Pauli { qubit, pauli: Pauli::Z } => Gate::Z(qubit),
            CliffordJump::Pauli { .. } => return Ok(()),
            CliffordJump::Entangle { j, k, sign } => Gate::Xjk { sign, j, k },
            CliffordJump::QuarterY { qubit, sign } => Gate::QuarterY { sign, qubit },
        };
        self.apply_gate(gate).map_err(|e| TrajectoryError::Config(e.to_string()))
    }
}
