//! Dense matrices built by explicit Kronecker products. Oracle use only
//! (small registers); the simulator never goes through here.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{OperatorSum, SiteOp};

pub fn site_matrix(op: SiteOp) -> DMatrix<Complex64> {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let m = match op {
        SiteOp::I => [l, o, o, l],
        SiteOp::X => [o, l, l, o],
        SiteOp::Y => [o, -i, i, o],
        SiteOp::Z => [l, o, o, -l],
        SiteOp::Lower => [o, l, o, o],
        SiteOp::Raise => [o, o, l, o],
    };
    DMatrix::from_row_slice(2, 2, &m)
}

/// Full `2ⁿ × 2ⁿ` matrix of `op` (qubit 0 is the leftmost Kronecker factor).
pub fn kron_dense(op: &OperatorSum) -> DMatrix<Complex64> {
    let n = op.n_qubits();
    assert!(n <= 12, "dense oracle limited to 12 qubits");
    let dim = 1usize << n;
    let mut total = DMatrix::zeros(dim, dim);
    for term in op.terms() {
        let mut m = DMatrix::from_element(1, 1, term.coeff());
        for q in 0..n {
            let site = term
                .factors()
                .iter()
                .find(|&&(fq, _)| fq == q)
                .map_or(SiteOp::I, |&(_, s)| s);
            m = m.kronecker(&site_matrix(site));
        }
        total += m;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{PauliTerm, StateVector};

    #[test]
    fn dense_matches_stride_application() {
        let op = OperatorSum::new(
            3,
            vec![
                PauliTerm::new(Complex64::new(0.3, 0.1), vec![(0, SiteOp::Lower), (2, SiteOp::Y)]).unwrap(),
                PauliTerm::new(Complex64::new(-0.2, 0.7), vec![(1, SiteOp::Raise), (2, SiteOp::Z)]).unwrap(),
            ],
        )
        .unwrap();
        let amps: Vec<Complex64> = (0..8)
            .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 1.3).cos()))
            .collect();
        let s = StateVector::from_amplitudes(3, amps.clone()).unwrap();
        let fast = op.act(&s).unwrap();
        let dense = kron_dense(&op) * nalgebra::DVector::from_vec(amps);
        for k in 0..8 {
            assert!((fast.amplitudes()[k] - dense[k]).norm() < 1e-14);
        }
    }
}
