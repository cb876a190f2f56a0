use approx::assert_abs_diff_eq;
use jumpforge::channels::{bs_combine, completeness, identity_sum, is_channel, pbs_erase, se_channel};
use jumpforge::protocols::{apply_corrections, graph_correction, graph_script, graph_state, GraphSpec, Wiring};
use jumpforge::qstate::gates::entangling_jump;
use jumpforge::qstate::{kron_dense, OperatorSum, Pauli, PauliTerm, SiteOp, StateVector};
use jumpforge::stabilizer::{Gate, StabilizerTableau};
use jumpforge::trajectory::{run, RngStream};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn site_op() -> impl Strategy<Value = SiteOp> {
    prop_oneof![
        Just(SiteOp::I),
        Just(SiteOp::X),
        Just(SiteOp::Y),
        Just(SiteOp::Z),
        Just(SiteOp::Lower),
        Just(SiteOp::Raise),
    ]
}

fn pauli() -> impl Strategy<Value = Pauli> {
    prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)]
}

fn amplitudes(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_map(|v| v.into_iter().map(|(re, im)| c(re, im)).collect())
}

fn state(n: usize) -> impl Strategy<Value = StateVector> {
    amplitudes(n)
        .prop_filter("nonzero", |a| a.iter().map(|x| x.norm_sqr()).sum::<f64>() > 1e-3)
        .prop_map(move |a| StateVector::from_amplitudes(n, a).unwrap().normalize().unwrap())
}

fn operator(n: usize) -> impl Strategy<Value = OperatorSum> {
    let term = ((-1.0f64..1.0, -1.0f64..1.0), prop::collection::vec(site_op(), n));
    prop::collection::vec(term, 1..4).prop_map(move |terms| {
        let terms = terms
            .into_iter()
            .map(|((re, im), ops)| PauliTerm::new(c(re, im), ops.into_iter().enumerate().collect()).unwrap())
            .collect();
        OperatorSum::new(n, terms).unwrap()
    })
}

fn pauli_matrix(p: Pauli) -> DMatrix<Complex64> {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

fn max_diff(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operator_action_is_linear(op in operator(3), a in amplitudes(3), b in amplitudes(3), s in (-2.0f64..2.0, -2.0f64..2.0)) {
        let s = c(s.0, s.1);
        let va = StateVector::from_amplitudes(3, a.clone()).unwrap();
        let vb = StateVector::from_amplitudes(3, b.clone()).unwrap();
        let mix: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| s * x + y).collect();
        let lhs = op.act(&StateVector::from_amplitudes(3, mix).unwrap()).unwrap();
        let (la, lb) = (op.act(&va).unwrap(), op.act(&vb).unwrap());
        let rhs: Vec<Complex64> = la.amplitudes().iter().zip(lb.amplitudes()).map(|(x, y)| s * x + y).collect();
        let rhs = StateVector::from_amplitudes(3, rhs).unwrap();
        prop_assert!(max_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn operator_matches_dense_matrix(op in operator(2), psi in state(2)) {
        let dense = kron_dense(&op) * nalgebra::DVector::from_column_slice(psi.amplitudes());
        let sparse = op.act(&psi).unwrap();
        for (x, y) in dense.iter().zip(sparse.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn pauli_products_match_matrices(p in pauli(), q in pauli()) {
        let (k, r) = p.mul_phase(q);
        let phase = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][k as usize];
        let lhs = pauli_matrix(p) * pauli_matrix(q);
        let rhs = pauli_matrix(r) * phase;
        prop_assert!((lhs - rhs).norm() < 1e-14);
        let comm = pauli_matrix(p) * pauli_matrix(q) - pauli_matrix(q) * pauli_matrix(p);
        prop_assert_eq!(p.anticommutes(q), comm.norm() > 1e-9);
        let (k2, id) = p.mul_phase(p);
        prop_assert_eq!((k2, id), (0, Pauli::I));
    }

    #[test]
    fn fidelity_invariant_under_unitary_jumps(psi in state(3), phi in state(3), j in 0usize..3, dk in 1usize..3, plus in any::<bool>()) {
        let k = (j + dk) % 3;
        let u = entangling_jump(3, j, k, if plus { 1 } else { -1 }).unwrap();
        let before = psi.fidelity(&phi).unwrap();
        let after = u.act(&psi).unwrap().fidelity(&u.act(&phi).unwrap()).unwrap();
        prop_assert!((before - after).abs() < 1e-12);
        prop_assert!((u.act(&psi).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn erasure_preserves_completeness(gamma in 0.01f64..10.0, theta in -3.2f64..3.2) {
        let se = se_channel(2, 0, gamma).unwrap();
        let is = is_channel(2, 0, gamma).unwrap();
        let (a, b) = pbs_erase(&se, &is, theta).unwrap();
        let raw = completeness([&se, &is]);
        prop_assert!(completeness([&a, &b]).approx_eq(&raw, 1e-12));
        prop_assert!(raw.approx_eq(&identity_sum(gamma), 1e-12));
        let (x1, _) = pbs_erase(&se_channel(2, 1, gamma).unwrap(), &is_channel(2, 1, gamma).unwrap(), theta).unwrap();
        let (p, m) = bs_combine(&a, &x1).unwrap();
        prop_assert!(completeness([&p, &m]).approx_eq(&completeness([&a, &x1]), 1e-12));
    }

    #[test]
    fn edge_order_is_irrelevant(
        edges in prop::collection::vec((0usize..5, 1usize..5, any::<bool>()), 1..8),
        shuffle in any::<u64>(),
    ) {
        let list: Vec<(usize, usize, i8)> =
            edges.iter().map(|&(u, d, s)| (u, (u + d) % 5, if s { 1 } else { -1 })).collect();
        let mut permuted = list.clone();
        let mut x = shuffle;
        for i in (1..permuted.len()).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            permuted.swap(i, (x >> 33) as usize % (i + 1));
        }
        let start = StateVector::from_bits(&[false; 5]).unwrap();
        let apply = |order: &[(usize, usize, i8)]| {
            order.iter().fold(start.clone(), |s, &(j, k, sign)| entangling_jump(5, j, k, sign).unwrap().act(&s).unwrap())
        };
        prop_assert!(max_diff(&apply(&list), &apply(&permuted)) < 1e-12);
    }

    #[test]
    fn tableau_stays_valid(gates in prop::collection::vec((0usize..6, 0usize..4, 1usize..4, any::<bool>()), 0..40)) {
        let n = 4;
        let mut t = StabilizerTableau::zero_state(n).unwrap();
        let mut v = StateVector::from_bits(&[false; 4]).unwrap();
        for (kind, q, d, s) in gates {
            let sign = if s { 1 } else { -1 };
            let g = match kind {
                0 => Gate::H(q),
                1 => Gate::S(q),
                2 => Gate::Cz(q, (q + d) % n),
                3 => Gate::Xjk { sign, j: q, k: (q + d) % n },
                4 => Gate::QuarterY { sign, qubit: q },
                _ => Gate::Y(q),
            };
            t.apply_gate(g).unwrap();
            v = g.operator(n).unwrap().act(&v).unwrap();
        }
        prop_assert!(t.validate().is_ok());
        prop_assert!((t.to_statevector().unwrap().fidelity(&v).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn corrected_graph_state_is_exact(
        edges in prop::collection::vec((0usize..4, 1usize..4), 1..6),
        seed in any::<u64>(),
    ) {
        let mut list: Vec<(usize, usize)> = edges.iter().map(|&(u, d)| {
            let v = (u + d) % 4;
            (u.min(v), u.max(v))
        }).collect();
        list.sort_unstable();
        list.dedup();
        let g = GraphSpec::new(4, list).unwrap();
        let script = graph_script(&g, Wiring::PairwiseSplit).unwrap();
        let (log, state) = run(&script, RngStream::new(seed, 0)).unwrap();
        let fixed = apply_corrections(&state, &graph_correction(&log, &g).unwrap()).unwrap();
        let target = graph_state(&g).unwrap();
        assert_abs_diff_eq!(target.inner(&fixed).unwrap().re, 1.0, epsilon = 1e-10);
    }
}
