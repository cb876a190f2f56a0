//! Detection channels and the interferometric compositions that turn raw
//! emission/pumping jumps into flips and entangling jumps.
//!
//! Every channel carries its jump operator with the rate folded into the
//! amplitude (`L = √rate · Ô`), so `‖Lψ‖²` is directly the click rate.
//!
//! Port phase conventions:
//! - `σ₋ + σ₊ = σx` and `σ₋ − σ₊ = iσy`; the PBS ports are written as the
//!   Hermitian flips `cosθ σx + sinθ σy` and `cos(θ+π/2) σx + sin(θ+π/2) σy`,
//!   dropping the `i` on the second port as a global phase.
//! - A balanced BS maps inputs `L_a, L_b` to `(L_a + iL_b)/√2` (sign `+`) and
//!   `(L_a − iL_b)/√2` (sign `−`).

mod clifford;
mod config;
mod layout;

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use thiserror::Error;

use crate::qstate::{OperatorSum, Pauli, PauliSum, PauliTerm, PauliWord, SiteOp, StateError};

pub use clifford::{classify_jump, CliffordJump};
pub use config::{parse_layout, LayoutSpec, QubitMonitor};
pub use layout::{OpticalLayout, ReconfigAction, ReconfigRule};

/// Relative tolerance for rate equality and operator identities.
pub const RATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("configuration error: {0}")]
    Config(String),
    /// Photons from the two inputs are distinguishable and cannot be erased.
    #[error("erasure mismatch: rates {0} and {1} differ")]
    ErasureMismatch(f64, f64),
    #[error("unsupported channel configuration: {0}")]
    Unsupported(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelKind {
    /// Bare spontaneous emission, σ₋.
    Se,
    /// Bare inelastic scattering, σ₊.
    Is,
    /// PBS output: unitary flip in the equatorial plane.
    Flip,
    /// BS output over two qubits.
    Entangle,
    /// Flip port mixed with a classical field.
    ClassicalMix,
}

impl ChannelKind {
    pub fn label(self) -> &'static str {
        match self {
            ChannelKind::Se => "SE",
            ChannelKind::Is => "IS",
            ChannelKind::Flip => "FLIP",
            ChannelKind::Entangle => "ENTANGLE",
            ChannelKind::ClassicalMix => "CLASSICAL_MIX",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "SE" => ChannelKind::Se,
            "IS" => ChannelKind::Is,
            "FLIP" => ChannelKind::Flip,
            "ENTANGLE" => ChannelKind::Entangle,
            "CLASSICAL_MIX" => ChannelKind::ClassicalMix,
            _ => return None,
        })
    }
}

/// A monitored output port and the jump its clicks implement.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpChannel {
    pub id: String,
    pub detector: String,
    pub op: OperatorSum,
    pub kind: ChannelKind,
    pub active: bool,
    /// BS port sign for `Entangle` and `ClassicalMix` channels.
    pub sign: Option<i8>,
    /// Nominal rate; equals `c` in `L†L = c·I` for flip, entangling and mix
    /// channels and the peak rate for bare emission/pumping.
    pub rate: f64,
    qubits: Vec<usize>,
    unitary: bool,
}

impl JumpChannel {
    fn build(
        label: String,
        op: OperatorSum,
        kind: ChannelKind,
        sign: Option<i8>,
        rate: f64,
    ) -> JumpChannel {
        let gram = op.gram();
        let tol = RATE_TOL * gram.max_abs().max(1.0);
        let unitary = gram
            .pruned(tol)
            .iter()
            .all(|(w, c)| w.is_identity() && c.im.abs() <= tol);
        let qubits = op.support();
        JumpChannel { id: label.clone(), detector: label, op, kind, active: true, sign, rate, qubits, unitary }
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn n_qubits(&self) -> usize {
        self.op.n_qubits()
    }

    /// True when `L†L = rate · I`, i.e. the jump is a scaled unitary.
    pub fn is_unitary_like(&self) -> bool {
        self.unitary
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        let label = label.into();
        self.id = label.clone();
        self.detector = label;
        self
    }

    pub fn inactive(mut self) -> Self {
        self.active = false;
        self
    }

    /// Same port with its flux rescaled to `rate` (a partial tap of the port).
    pub fn with_rate(&self, rate: f64) -> Result<JumpChannel, ChannelError> {
        check_rate(rate)?;
        let f = (rate / self.rate).sqrt();
        let mut out = self.clone();
        out.op = self.op.scaled(Complex64::new(f, 0.0));
        out.rate = rate;
        Ok(out)
    }

    /// `L†L` as a Pauli sum.
    pub fn gram(&self) -> PauliSum {
        self.op.gram()
    }

    /// Single-site Pauli carried by a flip port, with its real sign, if the
    /// port is exactly `±√rate·P`.
    pub fn flip_pauli(&self) -> Option<(Pauli, f64)> {
        if self.kind != ChannelKind::Flip {
            return None;
        }
        let expansion = self.op.pauli_expansion().pruned(RATE_TOL * self.rate.sqrt());
        if expansion.len() != 1 {
            return None;
        }
        let (word, c) = expansion.iter().next()?;
        match word.sites() {
            [(_, p)] if c.im.abs() <= RATE_TOL * c.norm() => Some((*p, c.re.signum())),
            _ => None,
        }
    }
}

fn check_rate(rate: f64) -> Result<(), ChannelError> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(ChannelError::Config(format!("rate must be positive and finite, got {rate}")));
    }
    Ok(())
}

fn rates_match(a: f64, b: f64) -> bool {
    (a - b).abs() <= RATE_TOL * a.abs().max(b.abs()).max(1.0)
}

/// cos/sin with values below 1e-15 snapped to zero, so axis-aligned ports
/// carry exactly one Pauli term.
fn snapped_cos_sin(theta: f64) -> (f64, f64) {
    let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
    (snap(theta.cos()), snap(theta.sin()))
}

/// Bare spontaneous-emission channel `√γ σ₋` on `qubit`.
pub fn se_channel(n_qubits: usize, qubit: usize, gamma: f64) -> Result<JumpChannel, ChannelError> {
    check_rate(gamma)?;
    let op = OperatorSum::single(n_qubits, qubit, SiteOp::Lower, gamma.sqrt())?;
    Ok(JumpChannel::build(format!("se{qubit}"), op, ChannelKind::Se, None, gamma))
}

/// Bare inelastic-scattering channel `√γp σ₊` on `qubit`.
pub fn is_channel(n_qubits: usize, qubit: usize, gamma_p: f64) -> Result<JumpChannel, ChannelError> {
    check_rate(gamma_p)?;
    let op = OperatorSum::single(n_qubits, qubit, SiteOp::Raise, gamma_p.sqrt())?;
    Ok(JumpChannel::build(format!("is{qubit}"), op, ChannelKind::Is, None, gamma_p))
}

/// Which-process erasure: a PBS at angle `theta` mixes the emission and
/// pumping photons of one qubit into two flip ports.
pub fn pbs_erase(
    se: &JumpChannel,
    is: &JumpChannel,
    theta: f64,
) -> Result<(JumpChannel, JumpChannel), ChannelError> {
    if se.kind != ChannelKind::Se || is.kind != ChannelKind::Is {
        return Err(ChannelError::Config("pbs_erase needs an SE and an IS channel".into()));
    }
    if se.qubits != is.qubits || se.n_qubits() != is.n_qubits() {
        return Err(ChannelError::Config("pbs_erase inputs act on different qubits".into()));
    }
    if !rates_match(se.rate, is.rate) {
        return Err(ChannelError::ErasureMismatch(se.rate, is.rate));
    }
    let q = se.qubits[0];
    let n = se.n_qubits();
    let gamma = se.rate;
    let amp = (gamma / 2.0).sqrt();
    let port = |angle: f64| -> Result<OperatorSum, ChannelError> {
        let (c, s) = snapped_cos_sin(angle);
        let mut terms = Vec::new();
        if c != 0.0 {
            terms.push(PauliTerm::single(Complex64::new(amp * c, 0.0), q, SiteOp::X));
        }
        if s != 0.0 {
            terms.push(PauliTerm::single(Complex64::new(amp * s, 0.0), q, SiteOp::Y));
        }
        Ok(OperatorSum::new(n, terms)?)
    };
    let a = JumpChannel::build(format!("Dx{q}"), port(theta)?, ChannelKind::Flip, None, gamma / 2.0);
    let b = JumpChannel::build(format!("Dy{q}"), port(theta + FRAC_PI_2)?, ChannelKind::Flip, None, gamma / 2.0);
    Ok((a, b))
}

/// Which-qubit erasure: a balanced BS over ports of two different qubits.
/// Returns the `+` port `(L_a + iL_b)/√2` and the `−` port `(L_a − iL_b)/√2`.
pub fn bs_combine(a: &JumpChannel, b: &JumpChannel) -> Result<(JumpChannel, JumpChannel), ChannelError> {
    if a.kind != ChannelKind::Flip || b.kind != ChannelKind::Flip {
        return Err(ChannelError::Config("bs_combine needs two flip ports".into()));
    }
    if a.n_qubits() != b.n_qubits() {
        return Err(ChannelError::Config("bs_combine inputs live on different registers".into()));
    }
    if a.qubits.iter().any(|q| b.qubits.contains(q)) {
        return Err(ChannelError::Config(format!(
            "bs_combine on overlapping qubits {:?} and {:?}",
            a.qubits, b.qubits
        )));
    }
    if !rates_match(a.rate, b.rate) {
        return Err(ChannelError::ErasureMismatch(a.rate, b.rate));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let j = a.qubits[0];
    let k = b.qubits[0];
    let mut ports = Vec::with_capacity(2);
    for sign in [1i8, -1] {
        let op = a
            .op
            .scaled(Complex64::new(h, 0.0))
            .plus(&b.op.scaled(Complex64::new(0.0, sign as f64 * h)))?;
        let label = format!("E{j}.{k}{}", if sign > 0 { '+' } else { '-' });
        ports.push(JumpChannel::build(label, op, ChannelKind::Entangle, Some(sign), a.rate));
    }
    let minus = ports.pop().expect("two ports");
    let plus = ports.pop().expect("two ports");
    Ok((plus, minus))
}

/// Mixes the σy flip port of a qubit with a matched classical field on a
/// balanced BS; the selected output port implements `exp(±iπ/4 σy)`.
pub fn classical_mix(ch: &JumpChannel, sign: i8) -> Result<JumpChannel, ChannelError> {
    if sign != 1 && sign != -1 {
        return Err(ChannelError::Config(format!("mix sign must be ±1, got {sign}")));
    }
    match ch.flip_pauli() {
        Some((Pauli::Y, _)) => {}
        _ => return Err(ChannelError::Config(format!("channel {} is not a σy flip port", ch.id))),
    }
    let q = ch.qubits[0];
    let amp = ch.rate.sqrt();
    let op = OperatorSum::new(
        ch.n_qubits(),
        vec![
            PauliTerm::identity(Complex64::new(amp, 0.0)),
            PauliTerm::single(Complex64::new(0.0, sign as f64 * amp), q, SiteOp::Y),
        ],
    )?;
    let label = format!("M{q}{}", if sign > 0 { '+' } else { '-' });
    Ok(JumpChannel::build(label, op, ChannelKind::ClassicalMix, Some(sign), 2.0 * ch.rate))
}

/// `Σ L†L` over the given channels (inactive ones included).
pub fn completeness<'a>(channels: impl IntoIterator<Item = &'a JumpChannel>) -> PauliSum {
    let mut sum = PauliSum::new();
    for ch in channels {
        sum.add_sum(&ch.gram());
    }
    sum
}

/// Total decay operator `Γ = Σ L†L` restricted to computational-basis-diagonal form.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalDecay {
    pub constant: f64,
    /// `(qubits, coefficient)` for each `Z…Z` word.
    pub z_terms: Vec<(Vec<usize>, f64)>,
}

impl DiagonalDecay {
    /// `Γ_ii` for amplitude index `index` of an `n_qubits` register.
    pub fn entry(&self, n_qubits: usize, index: usize) -> f64 {
        let mut g = self.constant;
        for (qs, c) in &self.z_terms {
            let parity = qs.iter().filter(|&&q| (index >> (n_qubits - 1 - q)) & 1 == 1).count();
            g += if parity % 2 == 0 { *c } else { -*c };
        }
        g
    }

    pub fn entries(&self, n_qubits: usize) -> Vec<f64> {
        (0..1usize << n_qubits).map(|i| self.entry(n_qubits, i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DecayProfile {
    /// `Γ = rate · I`: no-jump evolution leaves the state unchanged.
    Uniform { rate: f64 },
    Diagonal(DiagonalDecay),
}

impl DecayProfile {
    pub fn uniform_rate(&self) -> Option<f64> {
        match self {
            DecayProfile::Uniform { rate } => Some(*rate),
            DecayProfile::Diagonal(_) => None,
        }
    }
}

/// Classifies `Σ L†L` over the active channels.
pub fn total_decay<'a>(channels: impl IntoIterator<Item = &'a JumpChannel>) -> Result<DecayProfile, ChannelError> {
    let gamma = completeness(channels.into_iter().filter(|c| c.active));
    let tol = RATE_TOL * gamma.max_abs().max(1.0);
    let gamma = gamma.pruned(tol);
    let mut constant = 0.0;
    let mut z_terms = Vec::new();
    for (word, c) in gamma.iter() {
        if c.im.abs() > tol {
            return Err(ChannelError::Unsupported(format!("non-Hermitian decay term {word}")));
        }
        if word.is_identity() {
            constant = c.re;
        } else if word.is_diagonal() {
            z_terms.push((word.sites().iter().map(|&(q, _)| q).collect(), c.re));
        } else {
            return Err(ChannelError::Unsupported(format!(
                "decay operator has off-diagonal term {word}"
            )));
        }
    }
    if z_terms.is_empty() {
        Ok(DecayProfile::Uniform { rate: constant })
    } else {
        Ok(DecayProfile::Diagonal(DiagonalDecay { constant, z_terms }))
    }
}

/// Identity word helper for callers comparing completeness sums.
pub fn identity_sum(rate: f64) -> PauliSum {
    let mut s = PauliSum::new();
    s.add_term(Complex64::new(rate, 0.0), PauliWord::identity());
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{kron_dense, StateVector};
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ports(n: usize, q: usize, gamma: f64, theta: f64) -> (JumpChannel, JumpChannel) {
        let se = se_channel(n, q, gamma).unwrap();
        let is = is_channel(n, q, gamma).unwrap();
        pbs_erase(&se, &is, theta).unwrap()
    }

    fn dense_gram(ch: &JumpChannel) -> DMatrix<Complex64> {
        let m = kron_dense(&ch.op);
        m.adjoint() * m
    }

    #[test]
    fn se_channel_drags_to_ground() {
        let ch = se_channel(1, 0, 1.0).unwrap();
        let one = StateVector::basis_state(1, "1").unwrap();
        let out = one.apply(&ch.op).unwrap().normalize().unwrap();
        assert_eq!(out, StateVector::basis_state(1, "0").unwrap());
        let psi = StateVector::product(&[[c(0.6, 0.0), c(0.0, 0.8)]]).unwrap();
        assert_abs_diff_eq!(ch.op.rate_on(&psi).unwrap(), 0.64, epsilon = 1e-15);
        let ch2 = se_channel(1, 0, 2.5).unwrap();
        assert_abs_diff_eq!(ch2.op.rate_on(&psi).unwrap(), 2.5 * 0.64, epsilon = 1e-14);
        assert!(se_channel(1, 0, 0.0).is_err());
        assert!(se_channel(1, 0, -1.0).is_err());
    }

    #[test]
    fn is_channel_pumps() {
        let ch = is_channel(1, 0, 1.0).unwrap();
        let zero = StateVector::basis_state(1, "0").unwrap();
        let out = zero.apply(&ch.op).unwrap().normalize().unwrap();
        assert_eq!(out, StateVector::basis_state(1, "1").unwrap());
        let one = StateVector::basis_state(1, "1").unwrap();
        assert!(matches!(one.apply(&ch.op), Err(StateError::Annihilated { .. })));
        let plus = StateVector::product(&[[c(FRAC_1_SQRT_2, 0.0); 2]]).unwrap();
        assert_abs_diff_eq!(ch.op.rate_on(&plus).unwrap(), 0.5, epsilon = 1e-15);
        assert!(is_channel(1, 0, 0.0).is_err());
    }

    #[test]
    fn pbs_axis_ports() {
        let g = 1.3;
        let (a, b) = ports(1, 0, g, 0.0);
        assert_eq!(a.flip_pauli(), Some((Pauli::X, 1.0)));
        assert_eq!(b.flip_pauli(), Some((Pauli::Y, 1.0)));
        assert_abs_diff_eq!(a.op.terms()[0].coeff().re, (g / 2.0).sqrt());
        let (a, b) = ports(1, 0, g, PI / 2.0);
        assert_eq!(a.flip_pauli(), Some((Pauli::Y, 1.0)));
        assert_eq!(b.flip_pauli(), Some((Pauli::X, -1.0)));
    }

    #[test]
    fn pbs_completeness_is_identity() {
        for theta in [0.0, 0.3, 1.1, PI / 2.0, 2.0] {
            let g = 0.7;
            let (a, b) = ports(1, 0, g, theta);
            let total = dense_gram(&a) + dense_gram(&b);
            let expect = DMatrix::<Complex64>::identity(2, 2) * c(g, 0.0);
            assert!((total - expect).norm() < 1e-12);
            assert!(a.is_unitary_like() && b.is_unitary_like());
        }
    }

    #[test]
    fn pbs_rejects_unequal_rates() {
        let se = se_channel(1, 0, 1.0).unwrap();
        let is = is_channel(1, 0, 1.5).unwrap();
        assert!(matches!(pbs_erase(&se, &is, 0.0), Err(ChannelError::ErasureMismatch(..))));
        assert!(matches!(pbs_erase(&is, &se, 0.0), Err(ChannelError::Config(_))));
        let other = is_channel(2, 1, 1.0).unwrap();
        let se2 = se_channel(2, 0, 1.0).unwrap();
        assert!(pbs_erase(&se2, &other, 0.0).is_err());
    }

    #[test]
    fn pbs_theta_plus_pi_same_detector_up_to_sign() {
        for theta in [0.0, 0.4, 1.9] {
            let (a, _) = ports(1, 0, 1.0, theta);
            let (a2, _) = ports(1, 0, 1.0, theta + PI);
            let m = kron_dense(&a.op);
            let m2 = kron_dense(&a2.op);
            assert!((m + m2).norm() < 1e-12);
        }
    }

    #[test]
    fn bs_combine_builds_entangling_jumps() {
        let g = 1.0;
        let (xa, _) = ports(2, 0, g, 0.0);
        let (xb, _) = ports(2, 1, g, 0.0);
        let (p, m) = bs_combine(&xa, &xb).unwrap();
        assert_eq!(p.sign, Some(1));
        assert_eq!(m.sign, Some(-1));
        assert_eq!(p.kind, ChannelKind::Entangle);
        let amp = (g / 2.0).sqrt() * FRAC_1_SQRT_2;
        assert_abs_diff_eq!(p.op.terms()[0].coeff().re, amp, epsilon = 1e-15);
        assert_abs_diff_eq!(p.op.terms()[1].coeff().im, amp, epsilon = 1e-15);
        assert_abs_diff_eq!(m.op.terms()[1].coeff().im, -amp, epsilon = 1e-15);

        let out = StateVector::basis_state(2, "00").unwrap().apply(&p.op).unwrap().normalize().unwrap();
        let bell = StateVector::from_amplitudes(
            2,
            vec![c(0.0, 0.0), c(0.0, FRAC_1_SQRT_2), c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        assert_abs_diff_eq!(out.fidelity(&bell).unwrap(), 1.0, epsilon = 1e-14);

        let total = dense_gram(&p) + dense_gram(&m);
        let expect = DMatrix::<Complex64>::identity(4, 4) * c(g, 0.0);
        assert!((total - expect).norm() < 1e-12);
        assert!(p.is_unitary_like() && m.is_unitary_like());
    }

    #[test]
    fn bs_combine_errors() {
        let (xa, ya) = ports(2, 0, 1.0, 0.0);
        assert!(matches!(bs_combine(&xa, &ya), Err(ChannelError::Config(_))));
        let (xb, _) = ports(2, 1, 2.0, 0.0);
        assert!(matches!(bs_combine(&xa, &xb), Err(ChannelError::ErasureMismatch(..))));
        let se = se_channel(2, 1, 1.0).unwrap();
        assert!(bs_combine(&xa, &se).is_err());
    }

    #[test]
    fn composition_preserves_completeness() {
        // pbs and bs reroute detection probability without changing Σ L†L
        let g = 0.9;
        let n = 2;
        let raw: Vec<JumpChannel> = (0..n)
            .flat_map(|q| [se_channel(n, q, g).unwrap(), is_channel(n, q, g).unwrap()])
            .collect();
        let (x0, y0) = ports(n, 0, g, 0.0);
        let (x1, y1) = ports(n, 1, g, 0.0);
        let (p, m) = bs_combine(&x0, &x1).unwrap();
        let before = completeness(&raw);
        let after_pbs = completeness([&x0, &y0, &x1, &y1]);
        let after_bs = completeness([&p, &m, &y0, &y1]);
        assert!(before.approx_eq(&after_pbs, 1e-12));
        assert!(before.approx_eq(&after_bs, 1e-12));
        assert!(before.approx_eq(&identity_sum(n as f64 * g), 1e-12));
    }

    #[test]
    fn classical_mix_quarter_turn() {
        let (x, y) = ports(1, 0, 1.0, 0.0);
        assert!(classical_mix(&x, 1).is_err());
        let mix = classical_mix(&y, 1).unwrap();
        assert_abs_diff_eq!(mix.rate, 1.0);
        assert!(mix.is_unitary_like());
        let zero = StateVector::basis_state(1, "0").unwrap();
        let out = zero.apply(&mix.op).unwrap().normalize().unwrap();
        // exp(+iπ/4 σy)|0⟩ = (|0⟩ − |1⟩)/√2
        let minus = StateVector::product(&[[c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)]]).unwrap();
        assert_abs_diff_eq!(out.fidelity(&minus).unwrap(), 1.0, epsilon = 1e-14);
        let mix_m = classical_mix(&y, -1).unwrap();
        let out = zero.apply(&mix_m.op).unwrap().normalize().unwrap();
        let plus = StateVector::product(&[[c(FRAC_1_SQRT_2, 0.0); 2]]).unwrap();
        assert_abs_diff_eq!(out.fidelity(&plus).unwrap(), 1.0, epsilon = 1e-14);
        // twice → π/2 rotation: |0⟩ → |1⟩ up to phase
        let twice = zero.apply(&mix.op).unwrap().apply(&mix.op).unwrap().normalize().unwrap();
        let one = StateVector::basis_state(1, "1").unwrap();
        assert_abs_diff_eq!(twice.fidelity(&one).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn total_decay_classification() {
        let g = 1.7;
        let (x, y) = ports(1, 0, g, 0.0);
        assert_abs_diff_eq!(total_decay([&x, &y]).unwrap().uniform_rate().unwrap(), g, epsilon = 1e-14);

        let se = se_channel(1, 0, g).unwrap();
        match total_decay([&se]).unwrap() {
            DecayProfile::Diagonal(d) => {
                let e = d.entries(1);
                assert_abs_diff_eq!(e[0], 0.0, epsilon = 1e-15);
                assert_abs_diff_eq!(e[1], g, epsilon = 1e-15);
            }
            other => panic!("expected diagonal, got {other:?}"),
        }

        let (x0, _) = ports(2, 0, g, 0.0);
        let (x1, _) = ports(2, 1, g, 0.0);
        let (p, m) = bs_combine(&x0, &x1).unwrap();
        assert_abs_diff_eq!(total_decay([&p, &m]).unwrap().uniform_rate().unwrap(), g, epsilon = 1e-14);

        // inactive channels do not count
        let off = y.clone().inactive();
        assert_abs_diff_eq!(total_decay([&x, &off]).unwrap().uniform_rate().unwrap(), g / 2.0, epsilon = 1e-14);

        // a lone + port of a BS over σx and σy ports is still unitary-like,
        // but a bare σ₋ + σ₊ pair in one BS port would not be diagonal
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let weird = JumpChannel::build(
            "w".into(),
            OperatorSum::new(1, vec![
                PauliTerm::single(c(h, 0.0), 0, SiteOp::Lower),
                PauliTerm::single(c(h, 0.0), 0, SiteOp::I),
            ]).unwrap(),
            ChannelKind::Flip,
            None,
            1.0,
        );
        assert!(matches!(total_decay([&weird]), Err(ChannelError::Unsupported(_))));
    }

    #[test]
    fn entangling_ops_on_shared_vertex_commute() {
        let n = 3;
        let (x0, _) = ports(n, 0, 1.0, 0.0);
        let (x1, _) = ports(n, 1, 1.0, 0.0);
        let (x2, _) = ports(n, 2, 1.0, 0.0);
        let (p01, m01) = bs_combine(&x0, &x1).unwrap();
        let (p12, m12) = bs_combine(&x1, &x2).unwrap();
        for a in [&p01, &m01] {
            for b in [&p12, &m12] {
                let ma = kron_dense(&a.op);
                let mb = kron_dense(&b.op);
                assert!((&ma * &mb - &mb * &ma).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn with_rate_taps_port() {
        let (x, _) = ports(1, 0, 1.0, 0.0);
        let tap = x.with_rate(0.125).unwrap();
        assert_abs_diff_eq!(tap.op.terms()[0].coeff().re, 0.125f64.sqrt(), epsilon = 1e-15);
        assert_eq!(tap.flip_pauli(), Some((Pauli::X, 1.0)));
        assert!(x.with_rate(0.0).is_err());
    }
}
