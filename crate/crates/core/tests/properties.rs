use otable_core::factory::{combine_tables, CombineSpec};
use otable_core::kernel::random::haar_state;
use otable_core::kernel::{Correction, Gate, PureState};
use otable_core::mpc::{
    and_with_table, compile_circuit, eval_circuit, eval_linear_poly, random_circuit, LinearPoly, TablePool,
};
use otable_core::protocols::OneTimeTable;
use otable_core::qhe::{key_update, AffineForm, MaskLedger};
use otable_core::seed::stream_rng;
use proptest::prelude::*;

fn gate_strategy(n: usize) -> impl Strategy<Value = Gate> {
    (0..9u8, 0..n, 1..n.max(2)).prop_map(move |(k, q, d)| {
        let t = (q + d) % n;
        match k {
            0 => Gate::X(q),
            1 => Gate::Y(q),
            2 => Gate::Z(q),
            3 => Gate::H(q),
            4 => Gate::P(q),
            5 => Gate::Pdag(q),
            6 => Gate::T(q),
            7 => Gate::Tdag(q),
            _ if n > 1 => Gate::Cnot { control: q, target: t },
            _ => Gate::H(q),
        }
    })
}

fn tables(n: u64, seed: u64) -> Vec<OneTimeTable> {
    let mut rng = stream_rng(seed, 0);
    (0..n).map(|i| OneTimeTable::random_correct(i, &mut rng)).collect()
}

proptest! {
    #[test]
    fn gates_preserve_norm(seed in any::<u64>(), gates in prop::collection::vec(gate_strategy(3), 0..30)) {
        let mut s = haar_state(3, &mut stream_rng(seed, 0));
        s.apply_all(&gates).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn partial_trace_keeps_unit_trace(seed in any::<u64>(), keep in prop::sample::subsequence(vec![0usize, 1, 2, 3], 1..4)) {
        let s = haar_state(4, &mut stream_rng(seed, 0));
        let r = s.reduced(&keep).unwrap();
        prop_assert!((r.trace() - 1.0).abs() < 1e-10);
        prop_assert!(r.purity() <= 1.0 + 1e-10);
    }

    #[test]
    fn pauli_undo_inverts_apply(seed in any::<u64>(), x in any::<bool>(), z in any::<bool>(), q in 0usize..3) {
        let psi = haar_state(3, &mut stream_rng(seed, 0));
        let mut s = psi.clone();
        let c = Correction::new(x, z);
        c.apply(&mut s, q).unwrap();
        c.undo(&mut s, q).unwrap();
        prop_assert!(s.fidelity(&psi).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn and_is_correct_on_every_correct_table(x: bool, y: bool, r: bool, a: bool, b: bool) {
        let t = OneTimeTable::new(0, x, y, (x & y) ^ r, r);
        prop_assert!(t.is_correct());
        prop_assert_eq!(and_with_table(a, b, &t).out.value(), a & b);
    }

    #[test]
    fn linear_poly_shares_reconstruct(c: bool, terms in prop::collection::vec((any::<bool>(), any::<bool>()), 1..20), seed: u64) {
        let (a, b): (Vec<bool>, Vec<bool>) = terms.into_iter().unzip();
        let p = LinearPoly::new(c, a, b).unwrap();
        let mut pool = TablePool::new(tables(p.len() as u64, seed)).unwrap();
        let run = eval_linear_poly(&p, &mut pool).unwrap();
        prop_assert_eq!(run.out.value(), p.evaluate());
        prop_assert_eq!(pool.remaining(), 0);
    }

    #[test]
    fn combination_is_xor_homomorphic(seed: u64, k in 1usize..6, flips in prop::collection::vec(any::<bool>(), 48)) {
        let mut ts = tables(48, seed);
        for (t, &f) in ts.iter_mut().zip(&flips) {
            t.f ^= f;
        }
        let spec = CombineSpec::by_bob_input(&ts, k).unwrap();
        let out = combine_tables(&ts, &spec).unwrap();
        for (group, c) in spec.groups.iter().zip(&out) {
            // the combined error is the XOR of member errors
            let err = group.iter().fold(false, |acc, &id| acc ^ !ts[id as usize].is_correct());
            prop_assert_eq!(!c.is_correct(), err);
        }
    }

    #[test]
    fn circuits_match_plain_evaluation(seed: u64, gates in 1usize..8, const1: bool) {
        let mut rng = stream_rng(seed, 0);
        let c = random_circuit(2, 2, const1, gates, &mut rng);
        let plan = compile_circuit(&c);
        for bits in 0..16u32 {
            let alice = [bits & 1 == 1, bits & 2 == 2];
            let bob = [bits & 4 == 4, bits & 8 == 8];
            let mut pool = TablePool::new(tables(plan.table_budget as u64, seed ^ bits as u64)).unwrap();
            let run = eval_circuit(&plan, &alice, &bob, &mut pool).unwrap();
            prop_assert_eq!(run.outputs, c.evaluate(&alice, &bob).unwrap());
        }
    }

    #[test]
    fn affine_xor_is_a_group(a in prop::collection::btree_set(0usize..12, 0..8), b in prop::collection::btree_set(0usize..12, 0..8), ca: bool, cb: bool, values in prop::collection::vec(any::<bool>(), 12)) {
        let fa = AffineForm { constant: ca, support: a };
        let fb = AffineForm { constant: cb, support: b };
        let sum = &fa ^ &fb;
        prop_assert_eq!(sum.evaluate(&values), fa.evaluate(&values) ^ fb.evaluate(&values));
        prop_assert_eq!(&sum ^ &fb, fa);
    }

    #[test]
    fn key_update_tracks_cliffords(seed: u64, values in prop::collection::vec(any::<bool>(), 6), picks in prop::collection::vec((0u8..3, 0usize..3, 1usize..3), 1..15)) {
        let mut rng = stream_rng(seed, 0);
        let psi = haar_state(3, &mut rng);
        let mut ledger = MaskLedger::after_teleport(3);
        let mut masked = psi.clone();
        for (q, (x, z)) in ledger.evaluate(&values).unwrap().into_iter().enumerate() {
            Correction::new(x, z).apply(&mut masked, q).unwrap();
        }
        let mut truth = psi;
        for (k, q, d) in picks {
            let g = match k {
                0 => Gate::H(q),
                1 => Gate::P(q),
                _ => Gate::Cnot { control: q, target: (q + d) % 3 },
            };
            masked.apply(g).unwrap();
            truth.apply(g).unwrap();
            ledger = key_update(&ledger, g).unwrap();
        }
        for (q, (x, z)) in ledger.evaluate(&values).unwrap().into_iter().enumerate() {
            Correction::new(x, z).undo(&mut masked, q).unwrap();
        }
        prop_assert!(masked.fidelity(&truth).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn pool_never_reissues_a_table(n in 1u64..40, draws in 0usize..60) {
        let mut pool = TablePool::new(tables(n, 1)).unwrap();
        let mut seen = std::collections::HashSet::new();
        for _ in 0..draws {
            match pool.take() {
                Ok(t) => prop_assert!(seen.insert(t.id)),
                Err(_) => prop_assert_eq!(seen.len() as u64, n),
            }
        }
    }
}

#[test]
fn epr_halves_are_maximally_mixed() {
    let e = PureState::epr();
    for q in 0..2 {
        let r = e.reduced(&[q]).unwrap();
        assert!((r.purity() - 0.5).abs() < 1e-12);
    }
}
