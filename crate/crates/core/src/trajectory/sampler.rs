use num_complex::Complex64;
use rand::distr::Open01;
use rand::Rng;

use crate::channels::{total_decay, DecayProfile, DiagonalDecay, JumpChannel};

use super::{Register, TrajectoryError};

/// Relative accuracy of the survival-law inversion.
const BISECTION_TOL: f64 = 1e-10;

/// Outcome of one waiting-time draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Waiting {
    /// `channel` indexes the slice passed to [`sample_waiting_time`].
    Jump { dt: f64, channel: usize },
    /// No click before the horizon (`dt` may be infinite).
    NoJump { dt: f64 },
}

/// Draws the time to the next click and the clicking channel.
///
/// The register is advanced along the no-jump evolution to the returned time
/// (left normalized). Inactive channels are ignored. `horizon` may be
/// infinite.
pub fn sample_waiting_time<R: Register + ?Sized, G: Rng + ?Sized>(
    reg: &mut R,
    channels: &[&JumpChannel],
    rng: &mut G,
    horizon: f64,
) -> Result<Waiting, TrajectoryError> {
    let active: Vec<usize> = (0..channels.len()).filter(|&i| channels[i].active).collect();
    let profile = if active.iter().all(|&i| channels[i].is_unitary_like()) {
        DecayProfile::Uniform { rate: active.iter().map(|&i| channels[i].rate).sum() }
    } else {
        total_decay(active.iter().map(|&i| channels[i]))?
    };
    let r: f64 = rng.sample(Open01);
    match profile {
        DecayProfile::Uniform { rate } => {
            if rate <= 0.0 {
                return Ok(Waiting::NoJump { dt: horizon });
            }
            let dt = -r.ln() / rate;
            if dt >= horizon {
                return Ok(Waiting::NoJump { dt: horizon });
            }
            let channel = if active.iter().all(|&i| channels[i].is_unitary_like()) {
                let weights: Vec<f64> = active.iter().map(|&i| channels[i].rate).collect();
                active[pick(&weights, rng)]
            } else {
                state_weighted(reg, channels, &active, rng)?
            };
            Ok(Waiting::Jump { dt, channel })
        }
        DecayProfile::Diagonal(decay) => {
            let n = reg.n_qubits();
            let state = reg.statevector_mut().ok_or_else(|| {
                TrajectoryError::Unsupported("non-uniform decay needs a statevector register".into())
            })?;
            let entries = decay_entries(&decay, n);
            let survival = Survival::new(&entries, state.amplitudes());
            let dt = survival.invert(r, horizon);
            let evolve_to = dt.unwrap_or(horizon);
            if evolve_to.is_finite() {
                no_jump_evolve(state, &entries, evolve_to)?;
            } else {
                no_jump_limit(state, &entries)?;
            }
            match dt {
                None => Ok(Waiting::NoJump { dt: horizon }),
                Some(dt) => {
                    let channel = state_weighted(reg, channels, &active, rng)?;
                    Ok(Waiting::Jump { dt, channel })
                }
            }
        }
    }
}

fn decay_entries(decay: &DiagonalDecay, n: usize) -> Vec<f64> {
    decay.entries(n).into_iter().map(|g| g.max(0.0)).collect()
}

fn pick<G: Rng + ?Sized>(weights: &[f64], rng: &mut G) -> usize {
    let total: f64 = weights.iter().sum();
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last = i;
            if target < acc {
                return i;
            }
        }
    }
    last
}

fn state_weighted<R: Register + ?Sized, G: Rng + ?Sized>(
    reg: &R,
    channels: &[&JumpChannel],
    active: &[usize],
    rng: &mut G,
) -> Result<usize, TrajectoryError> {
    let state = reg.statevector().ok_or_else(|| {
        TrajectoryError::Unsupported("state-dependent channel choice needs a statevector register".into())
    })?;
    let weights = active
        .iter()
        .map(|&i| channels[i].op.rate_on(state))
        .collect::<Result<Vec<f64>, _>>()?;
    if weights.iter().all(|&w| w <= 0.0) {
        return Err(TrajectoryError::SamplerFault("jump drawn while every channel rate is zero".into()));
    }
    Ok(active[pick(&weights, rng)])
}

/// `S(t) = Σ p_g e^{−g t}` grouped by distinct decay rate.
struct Survival {
    groups: Vec<(f64, f64)>,
    floor: f64,
}

impl Survival {
    fn new(entries: &[f64], amps: &[Complex64]) -> Self {
        let mut groups: Vec<(f64, f64)> = Vec::new();
        let mut floor = 0.0;
        for (&g, a) in entries.iter().zip(amps) {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            if g <= 0.0 {
                floor += p;
                continue;
            }
            match groups.iter_mut().find(|(rate, _)| (*rate - g).abs() <= 1e-12 * g) {
                Some(slot) => slot.1 += p,
                None => groups.push((g, p)),
            }
        }
        let total: f64 = floor + groups.iter().map(|(_, p)| p).sum::<f64>();
        groups.iter_mut().for_each(|(_, p)| *p /= total);
        Survival { groups, floor: floor / total }
    }

    fn at(&self, t: f64) -> f64 {
        self.floor + self.groups.iter().map(|(g, p)| p * (-g * t).exp()).sum::<f64>()
    }

    /// Solves `S(t) = r` on `[0, horizon)`; `None` when no click occurs by the horizon.
    fn invert(&self, r: f64, horizon: f64) -> Option<f64> {
        if self.floor >= r || self.groups.is_empty() {
            return None;
        }
        if horizon.is_finite() && self.at(horizon) >= r {
            return None;
        }
        let g_min = self.groups.iter().map(|(g, _)| *g).fold(f64::INFINITY, f64::min);
        let mut lo = 0.0;
        let mut hi = 1.0 / g_min;
        while self.at(hi) > r {
            lo = hi;
            hi *= 2.0;
        }
        if horizon.is_finite() {
            hi = hi.min(horizon);
        }
        while hi - lo > BISECTION_TOL * hi {
            let mid = 0.5 * (lo + hi);
            if self.at(mid) > r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

fn no_jump_evolve(
    state: &mut crate::qstate::StateVector,
    entries: &[f64],
    t: f64,
) -> Result<(), TrajectoryError> {
    for (a, &g) in state.amplitudes_mut().iter_mut().zip(entries) {
        *a *= (-0.5 * g * t).exp();
    }
    state.normalize_in_place()?;
    Ok(())
}

fn no_jump_limit(state: &mut crate::qstate::StateVector, entries: &[f64]) -> Result<(), TrajectoryError> {
    for (a, &g) in state.amplitudes_mut().iter_mut().zip(entries) {
        if g > 0.0 {
            *a = Complex64::new(0.0, 0.0);
        }
    }
    state.normalize_in_place()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{is_channel, pbs_erase, se_channel};
    use crate::qstate::StateVector;
    use crate::trajectory::RngStream;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn uniform_inverts_exponential() {
        let (x, y) = pbs_erase(&se_channel(1, 0, 1.0).unwrap(), &is_channel(1, 0, 1.0).unwrap(), 0.0).unwrap();
        let s = Survival { groups: vec![(1.0, 1.0)], floor: 0.0 };
        let t = s.invert(0.5, f64::INFINITY).unwrap();
        assert!((t - std::f64::consts::LN_2).abs() < 1e-9);
        let mut psi = StateVector::product(&[[c(0.6), c(0.8)]]).unwrap();
        let before = psi.clone();
        let mut rng = RngStream::new(1, 0).rng();
        for _ in 0..50 {
            let w = sample_waiting_time(&mut psi, &[&x, &y], &mut rng, f64::INFINITY).unwrap();
            assert!(matches!(w, Waiting::Jump { .. }));
            assert_eq!(psi, before);
        }
    }

    #[test]
    fn emission_from_ground_never_clicks() {
        let se = se_channel(1, 0, 1.0).unwrap();
        let mut psi = StateVector::basis_state(1, "0").unwrap();
        let mut rng = RngStream::new(3, 0).rng();
        let w = sample_waiting_time(&mut psi, &[&se], &mut rng, f64::INFINITY).unwrap();
        assert_eq!(w, Waiting::NoJump { dt: f64::INFINITY });
    }

    #[test]
    fn no_jump_branch_flows_to_ground() {
        let se = se_channel(1, 0, 1.0).unwrap();
        let mut psi = StateVector::product(&[[c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]]).unwrap();
        let mut rng = RngStream::new(5, 0).rng();
        loop {
            let mut trial = psi.clone();
            if let Waiting::NoJump { .. } = sample_waiting_time(&mut trial, &[&se], &mut rng, 20.0).unwrap() {
                assert!(trial.excited_population(0) < 1e-8);
                break;
            }
        }
        psi.normalize_in_place().unwrap();
    }

    #[test]
    fn bisection_meets_tolerance() {
        let s = Survival { groups: vec![(1.0, 0.3), (3.0, 0.5)], floor: 0.2 };
        for &r in &[0.9, 0.5, 0.25] {
            let t = s.invert(r, f64::INFINITY).unwrap();
            assert!((s.at(t) - r).abs() < 1e-9);
        }
        assert!(s.invert(0.15, f64::INFINITY).is_none());
        assert!(s.invert(0.5, 0.01).is_none());
    }
}
