use super::*;
use crate::gen;
use crate::syntax::{FiniteFn, Formula, FunTerm, NumTerm, PrimTable, Valuation};
use rand::Rng;

fn prims() -> PrimTable {
    PrimTable::standard()
}

const FUEL: u64 = 100_000;

#[test]
fn projection_and_fuel() {
    let prims = prims();
    let mut store = CodeStore::new();
    // identity on the pointwise input
    let e = store.push(OmlProgram::Input, Signature::default());
    assert_eq!(store.apply_functional(e, &[], &[], 9, 10, &prims), Outcome::Value(9));
    assert_eq!(store.apply_functional(e, &[], &[], 9, 0, &prims), Outcome::FuelExhausted);
}

#[test]
fn arity_mismatch_is_stuck() {
    let prims = prims();
    let mut store = CodeStore::new();
    let e = store.push(OmlProgram::ProjNum(0), Signature::new(vec![], vec![7]));
    match store.apply_functional(e, &[], &[], 0, FUEL, &prims) {
        Outcome::Stuck(_) => {}
        other => panic!("expected Stuck, got {other:?}"),
    }
}

#[test]
fn mint_term_projection() {
    let prims = prims();
    let mut store = CodeStore::new();
    // t = x7 over signature (nums: x7): Phi_e(a)(anything) = a
    let e = store
        .mint_num_term_index(NumTerm::var(7), Signature::new(vec![], vec![7]))
        .unwrap();
    for a in 0..20 {
        assert_eq!(store.apply_at_zero(e, &[], &[a], FUEL, &prims), Outcome::Value(a));
    }
}

#[test]
fn mint_fun_term_passthrough() {
    let prims = prims();
    let mut store = CodeStore::new();
    // tau = lam x. a1(x): oracle passthrough
    let tau = FunTerm::Lambda(5, Box::new(NumTerm::apply(FunTerm::FunVar(1), NumTerm::var(5))));
    let e = store.mint_fun_term_index(tau, Signature::new(vec![1], vec![])).unwrap();
    let mut r = gen::rng(77);
    for _ in 0..100 {
        let f = gen::random_table(&mut r, 9);
        let point = r.gen_range(0..12);
        assert_eq!(
            store.apply_functional(e, &[&f], &[], point, FUEL, &prims),
            Outcome::Value(f.apply(point))
        );
    }
}

#[test]
fn mint_pairing_matches_direct_evaluator() {
    let prims = prims();
    let mut store = CodeStore::new();
    let pair = prims.id_pair();
    let t = NumTerm::PrimApp(pair, vec![NumTerm::var(1), NumTerm::var(2)]);
    let e = store.mint_num_term_index(t.clone(), Signature::new(vec![], vec![1, 2])).unwrap();
    let mut r = gen::rng(78);
    for _ in 0..100 {
        let a = r.gen_range(0..30);
        let b = r.gen_range(0..30);
        let sigma = Valuation::new().with_num(1, a).with_num(2, b);
        let direct = crate::syntax::eval_num_term(&t, &sigma, &prims).unwrap();
        assert_eq!(store.apply_at_zero(e, &[], &[a, b], FUEL, &prims), Outcome::Value(direct));
    }
}

#[test]
fn mu_search_examples() {
    let prims = prims();
    let mut store = CodeStore::new();

    // least m with a1(m) = 0 on the table [1, 1, 0]
    let psi = Formula::eq(NumTerm::apply(FunTerm::FunVar(1), NumTerm::var(9)), NumTerm::Zero);
    let e = store.mint_mu_index(&psi, Signature::new(vec![1], vec![]), 9, None, &prims).unwrap();
    let f = FiniteFn::new(vec![1, 1, 0]);
    assert_eq!(store.apply_at_zero(e, &[&f], &[], FUEL, &prims), Outcome::Value(2));

    // least m with m = x1, given x1 = 5: the first hit is the value itself
    let psi2 = Formula::eq(NumTerm::var(9), NumTerm::var(1));
    let e2 = store.mint_mu_index(&psi2, Signature::new(vec![], vec![1]), 9, None, &prims).unwrap();
    assert_eq!(store.apply_at_zero(e2, &[], &[5], FUEL, &prims), Outcome::Value(5));

    // unsatisfiable matrix never converges
    let e3 = store.mint_mu_index(&Formula::Bot, Signature::default(), 9, None, &prims).unwrap();
    assert_eq!(store.apply_at_zero(e3, &[], &[], 1000, &prims), Outcome::FuelExhausted);

    // a search that never finds its target value: looking for a1(m) = 1 on a
    // table that is zero everywhere
    let psi4 = Formula::eq(
        NumTerm::apply(FunTerm::FunVar(1), NumTerm::var(9)),
        NumTerm::numeral(1),
    );
    let e4 = store.mint_mu_index(&psi4, Signature::new(vec![1], vec![]), 9, None, &prims).unwrap();
    let zeros = FiniteFn::constant(3, 0);
    assert_eq!(store.apply_at_zero(e4, &[&zeros], &[], 1000, &prims), Outcome::FuelExhausted);

    // rejected: psi with a quantifier
    let quantified = Formula::exists_n(3, Formula::Bot);
    assert!(matches!(
        store.mint_mu_index(&quantified, Signature::default(), 9, None, &prims),
        Err(MintError::MuNotQuantifierFree)
    ));
}

#[test]
fn mu_with_input_variable() {
    let prims = prims();
    let mut store = CodeStore::new();
    // on input c, least m with a1(pair(c, m)) = 0
    let pair = prims.id_pair();
    let psi = Formula::eq(
        NumTerm::apply(
            FunTerm::FunVar(1),
            NumTerm::PrimApp(pair, vec![NumTerm::var(8), NumTerm::var(9)]),
        ),
        NumTerm::Zero,
    );
    let e = store
        .mint_mu_index(&psi, Signature::new(vec![1], vec![]), 9, Some(8), &prims)
        .unwrap();
    // table with a1(pair(1, 2)) = 0 and nonzero at pair(1, 0), pair(1, 1)
    let needed: usize = prims.eval(pair, &[1, 2]) as usize;
    let mut table = vec![1; needed + 1];
    table[needed] = 0;
    for m in 0..2 {
        let idx = prims.eval(pair, &[1, m]) as usize;
        table[idx] = 1;
    }
    let f = FiniteFn::new(table);
    assert_eq!(store.apply_functional(e, &[&f], &[], 1, FUEL, &prims), Outcome::Value(2));
}

#[test]
fn substituted_index_constant_replacement() {
    let prims = prims();
    let mut store = CodeStore::new();
    // e projects its single number argument; replace that argument by 7
    let e = store.mint_num_term_index(NumTerm::var(3), Signature::new(vec![], vec![3])).unwrap();
    let seven = store.push(OmlProgram::ConstNat(7), Signature::default());
    let e2 = store.mint_substituted_index(e, Slot::Num(0), seven).unwrap();
    assert_eq!(store.signature(e2).unwrap().num_vars.len(), 0);
    assert_eq!(store.apply_at_zero(e2, &[], &[], FUEL, &prims), Outcome::Value(7));
}

#[test]
fn substituted_index_ignored_slot_is_lazy() {
    let prims = prims();
    let mut store = CodeStore::new();
    // e ignores its function argument entirely
    let e = store.push(OmlProgram::Input, Signature::new(vec![4], vec![]));
    // a diverging replacement
    let diverge = store
        .mint_mu_index(&Formula::Bot, Signature::default(), 9, None, &prims)
        .unwrap();
    let e2 = store.mint_substituted_index(e, Slot::Fun(0), diverge).unwrap();
    // converges because the slot is never queried
    assert_eq!(store.apply_functional(e2, &[], &[], 5, 1000, &prims), Outcome::Value(5));

    // and extensionally equals e with a dummy argument
    let dummy = FiniteFn::constant(4, 2);
    let mut r = gen::rng(79);
    for _ in 0..100 {
        let input = r.gen_range(0..40);
        assert_eq!(
            store.apply_functional(e2, &[], &[], input, FUEL, &prims),
            store.apply_functional(e, &[&dummy], &[], input, FUEL, &prims),
        );
    }
}

#[test]
fn substituted_index_queried_slot_uses_replacement() {
    let prims = prims();
    let mut store = CodeStore::new();
    // e queries its function argument at the input point
    let e = store.push(
        OmlProgram::ProjFunQuery(0, Box::new(OmlProgram::Input)),
        Signature::new(vec![4], vec![]),
    );
    // replacement: the function m -> m + 10
    let add = prims.id_add();
    let repl = store
        .mint_fun_term_index(
            FunTerm::Lambda(5, Box::new(NumTerm::PrimApp(add, vec![NumTerm::var(5), NumTerm::numeral(10)]))),
            Signature::default(),
        )
        .unwrap();
    let e2 = store.mint_substituted_index(e, Slot::Fun(0), repl).unwrap();
    assert_eq!(store.apply_functional(e2, &[], &[], 3, FUEL, &prims), Outcome::Value(13));
}

// ---------------------------------------------------------------------------
// Random programs: fuel monotonicity and determinism
// ---------------------------------------------------------------------------

fn random_program(r: &mut rand_chacha::ChaCha8Rng, prims: &PrimTable, depth: usize) -> OmlProgram {
    if depth == 0 {
        return match r.gen_range(0..4) {
            0 => OmlProgram::ConstNat(r.gen_range(0..5)),
            1 => OmlProgram::ProjNum(r.gen_range(0..2)),
            _ => OmlProgram::Input,
        };
    }
    match r.gen_range(0..6) {
        0 => OmlProgram::ProjFunQuery(
            r.gen_range(0..2),
            Box::new(random_program(r, prims, depth - 1)),
        ),
        1 | 2 => {
            let id = [prims.id_add(), prims.id_sub(), prims.id_eqc()][r.gen_range(0..3)];
            OmlProgram::PrimOp(
                id,
                (0..prims.arity(id)).map(|_| random_program(r, prims, depth - 1)).collect(),
            )
        }
        3 => {
            // a bounded search: least m with eqc(m, k) = 1  (i.e. m = k)
            let k = r.gen_range(0..6);
            OmlProgram::MuSearch(Box::new(OmlProgram::PrimOp(
                prims.id_sub(),
                vec![
                    OmlProgram::ConstNat(1),
                    OmlProgram::PrimOp(
                        prims.id_eqc(),
                        vec![OmlProgram::MuVar, OmlProgram::ConstNat(k)],
                    ),
                ],
            )))
        }
        _ => random_program(r, prims, depth - 1),
    }
}

#[test]
fn fuel_monotonicity_and_determinism() {
    let prims = prims();
    let mut r = gen::rng(0xf0e1);
    let mut store = CodeStore::new();
    let sig = Signature::new(vec![1, 2], vec![1, 2]);
    let mut cases = Vec::new();
    for _ in 0..1000 {
        let prog = random_program(&mut r, &prims, 4);
        cases.push(store.push(prog, sig.clone()));
    }
    for &e in &cases {
        let f1 = gen::random_table(&mut r, 6);
        let f2 = gen::random_table(&mut r, 6);
        let nums = [r.gen_range(0..7), r.gen_range(0..7)];
        let input = r.gen_range(0..7);
        let low = store.apply_functional(e, &[&f1, &f2], &nums, input, 60, &prims);
        let high = store.apply_functional(e, &[&f1, &f2], &nums, input, FUEL, &prims);
        if let Outcome::Value(v) = low {
            assert_eq!(high, Outcome::Value(v), "value flipped under more fuel");
        }
        // determinism: identical call, identical outcome
        let again = store.apply_functional(e, &[&f1, &f2], &nums, input, FUEL, &prims);
        assert_eq!(high, again);
    }
}

#[test]
fn minting_preserves_existing_semantics() {
    let prims = prims();
    let mut r = gen::rng(0xf0e2);
    let mut store = CodeStore::new();
    let sig = Signature::new(vec![1], vec![1]);
    let mut log = Vec::new();
    for _ in 0..50 {
        let e = store.push(random_program(&mut r, &prims, 3), sig.clone());
        let f = gen::random_table(&mut r, 5);
        let n = r.gen_range(0..6);
        let input = r.gen_range(0..6);
        let out = store.apply_functional(e, &[&f], &[n], input, FUEL, &prims);
        log.push((e, f, n, input, out));
        // every previously recorded call still gives the same outcome
        for (e0, f0, n0, i0, o0) in &log {
            let now = store.apply_functional(*e0, &[f0], &[*n0], *i0, FUEL, &prims);
            assert_eq!(&now, o0, "mint changed semantics of index {e0}");
        }
    }
}

#[test]
fn store_serialization_round_trip() {
    let prims = prims();
    let mut store = CodeStore::new();
    let e0 = store.mint_num_term_index(NumTerm::var(3), Signature::new(vec![], vec![3])).unwrap();
    let psi = Formula::eq(NumTerm::apply(FunTerm::FunVar(1), NumTerm::var(9)), NumTerm::Zero);
    let e1 = store.mint_mu_index(&psi, Signature::new(vec![1], vec![]), 9, None, &prims).unwrap();
    let seven = store.push(OmlProgram::ConstNat(7), Signature::default());
    let _e3 = store.mint_substituted_index(e0, Slot::Num(0), seven).unwrap();
    let _e4 = store
        .mint_compose(e1, Signature::new(vec![2, 1], vec![]), vec![1], vec![])
        .unwrap();

    let text = store_sexp(&store, &prims)
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join("\n");
    let back = parse_store(&text, &prims).unwrap();
    assert_eq!(back.len(), store.len());
    for e in 0..store.len() {
        assert_eq!(back.program(e), store.program(e), "program {e} changed");
        assert_eq!(back.signature(e), store.signature(e), "signature {e} changed");
    }
}
