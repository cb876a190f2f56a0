//! Exact Pauli algebra: single-site Paulis with phases in powers of `i`,
//! sparse multi-qubit words, and complex-weighted sums of words.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// `(x, z)` symplectic bits; `Y` is `(1, 1)`.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Product `self · rhs` as `i^k · P`.
    pub fn mul_phase(self, rhs: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, rhs) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    /// Whether the two single-site Paulis anticommute.
    pub fn anticommutes(self, other: Pauli) -> bool {
        self != Pauli::I && other != Pauli::I && self != other
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// `i^phase · pauli` on a single site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhasedPauli {
    pub phase: u8,
    pub pauli: Pauli,
}

impl PhasedPauli {
    pub const IDENTITY: PhasedPauli = PhasedPauli { phase: 0, pauli: Pauli::I };

    pub fn new(phase: u8, pauli: Pauli) -> Self {
        Self { phase: phase % 4, pauli }
    }

    pub fn phase_factor(self) -> Complex64 {
        i_pow(self.phase)
    }

    /// Inverse; Paulis are involutions so only the phase is conjugated.
    pub fn inverse(self) -> Self {
        Self::new((4 - self.phase) % 4, self.pauli)
    }
}

impl Mul for PhasedPauli {
    type Output = PhasedPauli;
    fn mul(self, rhs: PhasedPauli) -> PhasedPauli {
        let (k, p) = self.pauli.mul_phase(rhs.pauli);
        PhasedPauli::new(self.phase + rhs.phase + k, p)
    }
}

pub(crate) fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Sparse Hermitian Pauli string: sorted `(qubit, X|Y|Z)` pairs, identity omitted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PauliWord(Vec<(usize, Pauli)>);

impl PauliWord {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn single(qubit: usize, p: Pauli) -> Self {
        if p == Pauli::I {
            Self::identity()
        } else {
            Self(vec![(qubit, p)])
        }
    }

    pub fn from_pairs(mut pairs: Vec<(usize, Pauli)>) -> Self {
        pairs.retain(|&(_, p)| p != Pauli::I);
        pairs.sort_by_key(|&(q, _)| q);
        Self(pairs)
    }

    pub fn sites(&self) -> &[(usize, Pauli)] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// True if every site is `Z` (diagonal in the computational basis).
    pub fn is_diagonal(&self) -> bool {
        self.0.iter().all(|&(_, p)| p == Pauli::Z)
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        self.0
            .iter()
            .find(|&&(q, _)| q == qubit)
            .map_or(Pauli::I, |&(_, p)| p)
    }

    /// Product `self · rhs` as `i^k · word`.
    pub fn mul_phase(&self, rhs: &PauliWord) -> (u8, PauliWord) {
        let mut out = Vec::with_capacity(self.0.len() + rhs.0.len());
        let mut phase = 0u8;
        let (mut a, mut b) = (self.0.iter().peekable(), rhs.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(qa, pa)), Some(&&(qb, pb))) => {
                    if qa == qb {
                        let (k, p) = pa.mul_phase(pb);
                        phase = (phase + k) % 4;
                        if p != Pauli::I {
                            out.push((qa, p));
                        }
                        a.next();
                        b.next();
                    } else if qa < qb {
                        out.push((qa, pa));
                        a.next();
                    } else {
                        out.push((qb, pb));
                        b.next();
                    }
                }
                (Some(&&x), None) => {
                    out.push(x);
                    a.next();
                }
                (None, Some(&&x)) => {
                    out.push(x);
                    b.next();
                }
                (None, None) => break,
            }
        }
        (phase, PauliWord(out))
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "I");
        }
        for (i, (q, p)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{q}", p.symbol())?;
        }
        Ok(())
    }
}

/// Complex-weighted sum of Pauli words.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PauliSum {
    terms: BTreeMap<PauliWord, Complex64>,
}

impl PauliSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, coeff: Complex64, word: PauliWord) {
        *self.terms.entry(word).or_insert(Complex64::new(0.0, 0.0)) += coeff;
    }

    pub fn add_sum(&mut self, other: &PauliSum) {
        for (w, c) in &other.terms {
            self.add_term(*c, w.clone());
        }
    }

    pub fn scale(&self, f: Complex64) -> PauliSum {
        PauliSum {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c * f)).collect(),
        }
    }

    pub fn adjoint(&self) -> PauliSum {
        PauliSum {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c.conj())).collect(),
        }
    }

    pub fn mul(&self, rhs: &PauliSum) -> PauliSum {
        let mut out = PauliSum::new();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &rhs.terms {
                let (k, w) = wa.mul_phase(wb);
                out.add_term(ca * cb * i_pow(k), w);
            }
        }
        out
    }

    /// Drops terms with magnitude `≤ tol`.
    pub fn pruned(&self, tol: f64) -> PauliSum {
        PauliSum {
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() > tol)
                .map(|(w, c)| (w.clone(), *c))
                .collect(),
        }
    }

    pub fn coefficient(&self, word: &PauliWord) -> Complex64 {
        self.terms.get(word).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliWord, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest coefficient magnitude, used to scale tolerances.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Approximate equality as operators.
    pub fn approx_eq(&self, other: &PauliSum, tol: f64) -> bool {
        let mut diff = self.clone();
        diff.add_sum(&other.scale(Complex64::new(-1.0, 0.0)));
        diff.pruned(tol).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_site_products() {
        use Pauli::*;
        assert_eq!(X.mul_phase(Y), (1, Z));
        assert_eq!(Y.mul_phase(X), (3, Z));
        assert_eq!(Z.mul_phase(Z), (0, I));
        for a in [I, X, Y, Z] {
            for b in [I, X, Y, Z] {
                let (k1, p1) = a.mul_phase(b);
                let (k2, p2) = b.mul_phase(a);
                assert_eq!(p1, p2);
                let anti = a.anticommutes(b);
                assert_eq!((k1 + if anti { 2 } else { 0 }) % 4, k2);
            }
        }
    }

    #[test]
    fn word_product_merges_sites() {
        let a = PauliWord::from_pairs(vec![(0, Pauli::X), (2, Pauli::Z)]);
        let b = PauliWord::from_pairs(vec![(0, Pauli::Y), (1, Pauli::X)]);
        let (k, w) = a.mul_phase(&b);
        assert_eq!(k, 1);
        assert_eq!(w, PauliWord::from_pairs(vec![(0, Pauli::Z), (1, Pauli::X), (2, Pauli::Z)]));
    }

    #[test]
    fn phased_inverse() {
        let p = PhasedPauli::new(1, Pauli::Y);
        assert_eq!(p * p.inverse(), PhasedPauli::IDENTITY);
    }
}
