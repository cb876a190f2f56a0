use std::fmt;

use num_complex::Complex64;

use super::pauli::{Pauli, PauliSum, PauliWord};
use super::{StateError, StateVector, ZERO_NORM};

/// Single-site operator appearing in a [`PauliTerm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SiteOp {
    I,
    X,
    Y,
    Z,
    /// σ₋ = |0⟩⟨1|, the emission (lowering) jump.
    Lower,
    /// σ₊ = |1⟩⟨0|, the pump (raising) jump.
    Raise,
}

impl SiteOp {
    #[inline]
    fn flips(self) -> bool {
        matches!(self, SiteOp::X | SiteOp::Y | SiteOp::Lower | SiteOp::Raise)
    }

    /// `⟨b ⊕ flip| op |b⟩`, or `None` when the column is zero.
    #[inline]
    fn column(self, bit: bool) -> Option<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        match (self, bit) {
            (SiteOp::I | SiteOp::X, _) => Some(one),
            (SiteOp::Y, false) => Some(Complex64::new(0.0, 1.0)),
            (SiteOp::Y, true) => Some(Complex64::new(0.0, -1.0)),
            (SiteOp::Z, false) => Some(one),
            (SiteOp::Z, true) => Some(-one),
            (SiteOp::Lower, true) | (SiteOp::Raise, false) => Some(one),
            (SiteOp::Lower, false) | (SiteOp::Raise, true) => None,
        }
    }

    /// Expansion over `{I, X, Y, Z}`.
    fn pauli_expansion(self) -> Vec<(Complex64, Pauli)> {
        let half = Complex64::new(0.5, 0.0);
        let half_i = Complex64::new(0.0, 0.5);
        let one = Complex64::new(1.0, 0.0);
        match self {
            SiteOp::I => vec![(one, Pauli::I)],
            SiteOp::X => vec![(one, Pauli::X)],
            SiteOp::Y => vec![(one, Pauli::Y)],
            SiteOp::Z => vec![(one, Pauli::Z)],
            SiteOp::Lower => vec![(half, Pauli::X), (half_i, Pauli::Y)],
            SiteOp::Raise => vec![(half, Pauli::X), (-half_i, Pauli::Y)],
        }
    }

    pub fn adjoint(self) -> SiteOp {
        match self {
            SiteOp::Lower => SiteOp::Raise,
            SiteOp::Raise => SiteOp::Lower,
            other => other,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            SiteOp::I => "I",
            SiteOp::X => "X",
            SiteOp::Y => "Y",
            SiteOp::Z => "Z",
            SiteOp::Lower => "σ-",
            SiteOp::Raise => "σ+",
        }
    }
}

impl From<Pauli> for SiteOp {
    fn from(p: Pauli) -> Self {
        match p {
            Pauli::I => SiteOp::I,
            Pauli::X => SiteOp::X,
            Pauli::Y => SiteOp::Y,
            Pauli::Z => SiteOp::Z,
        }
    }
}

/// `coeff · ⊗_q factor_q`, at most one factor per qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    coeff: Complex64,
    factors: Vec<(usize, SiteOp)>,
}

impl PauliTerm {
    pub fn new(coeff: Complex64, factors: Vec<(usize, SiteOp)>) -> Result<Self, StateError> {
        let mut factors: Vec<_> = factors.into_iter().filter(|&(_, op)| op != SiteOp::I).collect();
        factors.sort_by_key(|&(q, _)| q);
        if factors.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(StateError::Config("more than one factor on a qubit".into()));
        }
        Ok(Self { coeff, factors })
    }

    pub fn single(coeff: Complex64, qubit: usize, op: SiteOp) -> Self {
        Self::new(coeff, vec![(qubit, op)]).expect("single factor")
    }

    pub fn identity(coeff: Complex64) -> Self {
        Self { coeff, factors: Vec::new() }
    }

    pub fn coeff(&self) -> Complex64 {
        self.coeff
    }

    pub fn factors(&self) -> &[(usize, SiteOp)] {
        &self.factors
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.factors.last().map(|&(q, _)| q)
    }

    fn scaled(&self, f: Complex64) -> PauliTerm {
        PauliTerm { coeff: self.coeff * f, factors: self.factors.clone() }
    }

    fn pauli_expansion(&self) -> PauliSum {
        let mut acc: Vec<(Complex64, Vec<(usize, Pauli)>)> = vec![(self.coeff, Vec::new())];
        for &(q, op) in &self.factors {
            let mut next = Vec::with_capacity(acc.len() * 2);
            for (c, w) in &acc {
                for (cp, p) in op.pauli_expansion() {
                    let mut w = w.clone();
                    w.push((q, p));
                    next.push((c * cp, w));
                }
            }
            acc = next;
        }
        let mut sum = PauliSum::new();
        for (c, w) in acc {
            sum.add_term(c, PauliWord::from_pairs(w));
        }
        sum
    }

    /// Accumulates `term|ψ⟩` into `out`.
    fn act_into(&self, state: &StateVector, out: &mut [Complex64]) {
        let n = state.n_qubits();
        let mut flip = 0usize;
        let sites: Vec<(usize, SiteOp)> = self
            .factors
            .iter()
            .map(|&(q, op)| {
                let shift = n - 1 - q;
                if op.flips() {
                    flip |= 1 << shift;
                }
                (shift, op)
            })
            .collect();
        let amps = state.amplitudes();
        'outer: for (i, a) in amps.iter().enumerate() {
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            let mut c = self.coeff;
            for &(shift, op) in &sites {
                match op.column((i >> shift) & 1 == 1) {
                    Some(v) => c *= v,
                    None => continue 'outer,
                }
            }
            out[i ^ flip] += c * a;
        }
    }
}

/// Sum of [`PauliTerm`]s acting on a fixed register size.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl OperatorSum {
    pub fn new(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self, StateError> {
        if n_qubits == 0 {
            return Err(StateError::Config("operator on an empty register".into()));
        }
        if let Some(q) = terms.iter().filter_map(PauliTerm::max_qubit).max() {
            if q >= n_qubits {
                return Err(StateError::Config(format!(
                    "qubit {q} out of range for {n_qubits}-qubit register"
                )));
            }
        }
        Ok(Self { n_qubits, terms })
    }

    /// `coeff · op` on a single qubit.
    pub fn single(n_qubits: usize, qubit: usize, op: SiteOp, coeff: f64) -> Result<Self, StateError> {
        Self::new(n_qubits, vec![PauliTerm::single(Complex64::new(coeff, 0.0), qubit, op)])
    }

    pub fn identity(n_qubits: usize) -> Result<Self, StateError> {
        Self::new(n_qubits, vec![PauliTerm::identity(Complex64::new(1.0, 0.0))])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// Qubits touched by any factor, sorted.
    pub fn support(&self) -> Vec<usize> {
        let mut qs: Vec<usize> = self
            .terms
            .iter()
            .flat_map(|t| t.factors.iter().map(|&(q, _)| q))
            .collect();
        qs.sort_unstable();
        qs.dedup();
        qs
    }

    pub fn scaled(&self, f: Complex64) -> OperatorSum {
        OperatorSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|t| t.scaled(f)).collect(),
        }
    }

    /// `self + other`, concatenating terms.
    pub fn plus(&self, other: &OperatorSum) -> Result<OperatorSum, StateError> {
        if self.n_qubits != other.n_qubits {
            return Err(StateError::Config("operator register sizes differ".into()));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(OperatorSum { n_qubits: self.n_qubits, terms })
    }

    pub fn adjoint(&self) -> OperatorSum {
        OperatorSum {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|t| PauliTerm {
                    coeff: t.coeff.conj(),
                    factors: t.factors.iter().map(|&(q, op)| (q, op.adjoint())).collect(),
                })
                .collect(),
        }
    }

    /// Expansion over Pauli words.
    pub fn pauli_expansion(&self) -> PauliSum {
        let mut sum = PauliSum::new();
        for t in &self.terms {
            sum.add_sum(&t.pauli_expansion());
        }
        sum
    }

    /// `L†L` as a Pauli sum.
    pub fn gram(&self) -> PauliSum {
        let l = self.pauli_expansion();
        l.adjoint().mul(&l).pruned(0.0)
    }

    /// `L|ψ⟩` with no zero check.
    pub fn act(&self, state: &StateVector) -> Result<StateVector, StateError> {
        if state.n_qubits() != self.n_qubits {
            return Err(StateError::Config(format!(
                "operator acts on {} qubits, state has {}",
                self.n_qubits,
                state.n_qubits()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); state.dim()];
        for t in &self.terms {
            t.act_into(state, &mut out);
        }
        StateVector::from_amplitudes(self.n_qubits, out)
    }

    /// `L|ψ⟩` unnormalized; a zero result is reported as [`StateError::Annihilated`].
    pub fn apply(&self, state: &StateVector) -> Result<StateVector, StateError> {
        let out = self.act(state)?;
        let norm = out.norm();
        if norm < ZERO_NORM {
            return Err(StateError::Annihilated { norm });
        }
        Ok(out)
    }

    /// `⟨ψ|L†L|ψ⟩ = ‖Lψ‖²`.
    pub fn rate_on(&self, state: &StateVector) -> Result<f64, StateError> {
        Ok(self.act(state)?.norm_sqr())
    }
}

impl fmt::Display for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:+.6}{:+.6}i)", t.coeff.re, t.coeff.im)?;
            for &(q, op) in &t.factors {
                write!(f, "·{}{q}", op.symbol())?;
            }
        }
        Ok(())
    }
}
