//! Independent oracles: a dense Lindblad integrator for the unobserved
//! average of the trajectories, and coupon-collector timing statistics.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use thiserror::Error;

use crate::channels::JumpChannel;
use crate::protocols::GraphSpec;
use crate::qstate::{kron_dense, StateVector};
use crate::trajectory::{run_until, ProtocolScript, RngStream, TrajectoryError};

/// Largest register the dense oracle accepts.
pub const MAX_DENSE_QUBITS: usize = 6;

/// Largest integration step, in units of `1/γ`.
pub const MAX_STEP: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("integration accuracy lost: trace drifted by {drift:e}")]
    Accuracy { drift: f64 },
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
}

/// Dense density matrix of at most [`MAX_DENSE_QUBITS`] qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_matrix(n_qubits: usize, entries: DMatrix<Complex64>) -> Result<Self, VerifyError> {
        check_dense(n_qubits)?;
        let dim = 1usize << n_qubits;
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(VerifyError::Config(format!("expected a {dim}×{dim} matrix")));
        }
        Ok(Self { n_qubits, entries })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(state: &StateVector) -> Result<Self, VerifyError> {
        check_dense(state.n_qubits())?;
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Ok(Self { n_qubits: state.n_qubits(), entries: &v * v.adjoint() })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, state: &StateVector) -> f64 {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        (v.adjoint() * &self.entries * &v)[(0, 0)].re
    }

    fn hermitian_part(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        (m + m.adjoint()).scale(0.5)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        Self::hermitian_part(&self.entries).symmetric_eigen().eigenvalues.iter().copied().collect()
    }

    /// Hermitian, unit trace and positive semidefinite within `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        let herm = (&self.entries - self.entries.adjoint()).iter().all(|a| a.norm() <= tol);
        let tr = (self.trace() - Complex64::new(1.0, 0.0)).norm() <= tol;
        herm && tr && self.eigenvalues().iter().all(|&e| e >= -tol)
    }

    /// `½ ‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64, VerifyError> {
        if self.n_qubits != other.n_qubits {
            return Err(VerifyError::Config("density matrices of different sizes".into()));
        }
        let diff = Self::hermitian_part(&(&self.entries - &other.entries));
        Ok(0.5 * diff.symmetric_eigen().eigenvalues.iter().map(|e| e.abs()).sum::<f64>())
    }

    /// `row,col,real,imag` CSV of every entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,real,imag\n");
        for r in 0..self.entries.nrows() {
            for c in 0..self.entries.ncols() {
                let a = self.entries[(r, c)];
                let _ = writeln!(out, "{r},{c},{:.15e},{:.15e}", a.re, a.im);
            }
        }
        out
    }
}

fn check_dense(n: usize) -> Result<(), VerifyError> {
    if n == 0 || n > MAX_DENSE_QUBITS {
        return Err(VerifyError::Config(format!("dense oracle supports 1..={MAX_DENSE_QUBITS} qubits, got {n}")));
    }
    Ok(())
}

/// Integrates `ρ̇ = Σ_k (L_k ρ L_k† − ½{L_k†L_k, ρ})` over the active channels
/// with fixed-step fourth-order Runge–Kutta.
pub fn lindblad_evolve(
    rho0: &DensityMatrix,
    channels: &[JumpChannel],
    t: f64,
    dt: f64,
) -> Result<DensityMatrix, VerifyError> {
    if !(dt > 0.0 && dt <= MAX_STEP) {
        return Err(VerifyError::Config(format!("step {dt} outside (0, {MAX_STEP}]")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(VerifyError::Config(format!("invalid time {t}")));
    }
    let n = rho0.n_qubits;
    let dim = 1usize << n;
    let mut jumps = Vec::new();
    let mut gram = DMatrix::<Complex64>::zeros(dim, dim);
    for ch in channels.iter().filter(|c| c.active) {
        if ch.n_qubits() != n {
            return Err(VerifyError::Config(format!("channel {} acts on {} qubits", ch.id, ch.n_qubits())));
        }
        let l = kron_dense(&ch.op);
        let ld = l.adjoint();
        gram += &ld * &l;
        jumps.push((l, ld));
    }
    let half = Complex64::new(0.5, 0.0);
    let rhs = |rho: &DMatrix<Complex64>| -> DMatrix<Complex64> {
        let mut out = -(&gram * rho + rho * &gram) * half;
        for (l, ld) in &jumps {
            out += l * rho * ld;
        }
        out
    };
    let steps = (t / dt).ceil() as usize;
    let mut rho = rho0.entries.clone();
    if steps > 0 {
        let h = Complex64::new(t / steps as f64, 0.0);
        let (h2, h6) = (h * 0.5, h / 6.0);
        for _ in 0..steps {
            let k1 = rhs(&rho);
            let k2 = rhs(&(&rho + &k1 * h2));
            let k3 = rhs(&(&rho + &k2 * h2));
            let k4 = rhs(&(&rho + &k3 * h));
            rho += (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4) * h6;
        }
    }
    let drift = (rho.trace() - rho0.trace()).norm();
    if drift > 1e-6 {
        return Err(VerifyError::Accuracy { drift });
    }
    Ok(DensityMatrix { n_qubits: n, entries: rho })
}

/// `(1/M) Σ |ψ_i(t)⟩⟨ψ_i(t)|` over trajectories `0..n_traj` of `master_seed`.
pub fn trajectory_average(
    script: &ProtocolScript,
    n_traj: usize,
    t: f64,
    master_seed: u64,
) -> Result<DensityMatrix, VerifyError> {
    check_dense(script.n_qubits)?;
    if n_traj == 0 {
        return Err(VerifyError::Config("need at least one trajectory".into()));
    }
    let states = (0..n_traj as u64)
        .into_par_iter()
        .map(|i| run_until(script, RngStream::new(master_seed, i), t).map(|(_, s)| s))
        .collect::<Result<Vec<StateVector>, TrajectoryError>>()?;
    let dim = 1usize << script.n_qubits;
    let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
    for s in &states {
        let a = s.amplitudes();
        for r in 0..dim {
            for c in 0..dim {
                acc[(r, c)] += a[r] * a[c].conj();
            }
        }
    }
    acc /= Complex64::new(n_traj as f64, 0.0);
    Ok(DensityMatrix { n_qubits: script.n_qubits, entries: acc })
}

/// Completion-time statistics for a set of independent exponential events.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingResult {
    pub n_edges: usize,
    pub samples: usize,
    pub mean: f64,
    /// Half-width of the 95% confidence interval of `mean`.
    pub ci95: f64,
    pub analytic_mean: f64,
}

impl TimingResult {
    pub const CSV_HEADER: &'static str = "n_edges,samples,mean,ci95,analytic";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.12},{:.12},{:.12}",
            self.n_edges, self.samples, self.mean, self.ci95, self.analytic_mean
        )
    }

    /// Sample standard deviation of the completion time.
    pub fn std_dev(&self) -> f64 {
        self.ci95 / 1.96 * (self.samples as f64).sqrt()
    }
}

/// `H_n = Σ_{k=1}^{n} 1/k`.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).rev().map(|k| 1.0 / k as f64).sum()
}

/// `E[max_e T_e]` for independent `T_e ~ Exp(rate_e)`.
pub fn expected_max_exponential(rates: &[f64]) -> f64 {
    if rates.is_empty() {
        return 0.0;
    }
    let first = rates[0];
    if rates.iter().all(|&r| r == first) {
        return harmonic(rates.len()) / first;
    }
    let mut groups: Vec<(f64, f64)> = Vec::new();
    for &r in rates {
        match groups.iter_mut().find(|(g, _)| *g == r) {
            Some(slot) => slot.1 += 1.0,
            None => groups.push((r, 1.0)),
        }
    }
    let r_min = groups.iter().map(|g| g.0).fold(f64::INFINITY, f64::min);
    let upper = ((rates.len() as f64).ln() + 40.0) / r_min;
    let tail = |t: f64| -> f64 {
        let log_cdf: f64 = groups.iter().map(|(r, c)| c * (-(-r * t).exp()).ln_1p()).sum();
        -log_cdf.exp_m1()
    };
    // composite Simpson
    let m = 200_000;
    let h = upper / m as f64;
    let mut s = tail(0.0) + tail(upper);
    for i in 1..m {
        s += tail(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Completion time of `n_edges` events of equal `edge_rate`, sampled as the
/// maximum of independent exponential waiting times.
pub fn coupon_time_stats(
    n_edges: usize,
    edge_rate: f64,
    n_samples: usize,
    master_seed: u64,
) -> Result<TimingResult, VerifyError> {
    if n_edges == 0 {
        return Err(VerifyError::Config("need at least one edge".into()));
    }
    coupon_time_stats_rates(&vec![edge_rate; n_edges], n_samples, master_seed)
}

/// Like [`coupon_time_stats`] with a separate rate per event.
pub fn coupon_time_stats_rates(rates: &[f64], n_samples: usize, master_seed: u64) -> Result<TimingResult, VerifyError> {
    if rates.is_empty() {
        return Err(VerifyError::Config("need at least one edge".into()));
    }
    if n_samples == 0 {
        return Err(VerifyError::Config("need at least one sample".into()));
    }
    let dists = rates
        .iter()
        .map(|&r| Exp::new(r).map_err(|_| VerifyError::Config(format!("invalid edge rate {r}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if rates.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        return Err(VerifyError::Config("edge rates must be positive".into()));
    }
    let samples: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(master_seed, i).rng();
            dists.iter().map(|d| d.sample(&mut rng)).fold(0.0, f64::max)
        })
        .collect();
    let m = n_samples as f64;
    let mean = samples.iter().sum::<f64>() / m;
    let ci95 = if n_samples >= 2 {
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (m - 1.0);
        1.96 * (var / m).sqrt()
    } else {
        0.0
    };
    Ok(TimingResult {
        n_edges: rates.len(),
        samples: n_samples,
        mean,
        ci95,
        analytic_mean: expected_max_exponential(rates),
    })
}

/// Entangling rate of every edge under pairwise-split wiring: both ports of
/// edge `(j, k)` together click at `γ/max(d_j, d_k)`.
pub fn split_edge_rates(graph: &GraphSpec, gamma: f64) -> Vec<f64> {
    graph
        .edges()
        .iter()
        .map(|&(u, v)| gamma / graph.degree(u).max(graph.degree(v)) as f64)
        .collect()
}
