use super::*;
use crate::gen;

fn prims() -> PrimTable {
    PrimTable::standard()
}

// ---------------------------------------------------------------------------
// Reference evaluator, written against the recurrences directly. It
// evaluates lambdas by literal numeral substitution, independently of the
// environment-passing evaluator it checks.
// ---------------------------------------------------------------------------

fn ref_eval(t: &NumTerm, sigma: &Valuation, prims: &PrimTable) -> u64 {
    match t {
        NumTerm::NumVar(j) => *sigma.nums.get(j).expect("reference eval: unbound num var"),
        NumTerm::Zero => 0,
        NumTerm::Succ(s) => ref_eval(s, sigma, prims).saturating_add(1),
        NumTerm::PrimApp(f, args) => {
            let vals: Vec<u64> = args.iter().map(|a| ref_eval(a, sigma, prims)).collect();
            prims.eval(*f, &vals)
        }
        NumTerm::FunApp(tau, s) => {
            let a = ref_eval(s, sigma, prims);
            ref_apply(tau, a, sigma, prims)
        }
    }
}

fn ref_apply(tau: &FunTerm, a: u64, sigma: &Valuation, prims: &PrimTable) -> u64 {
    match tau {
        FunTerm::FunVar(i) => {
            sigma.funs.get(i).expect("reference eval: unbound fun var").apply(a)
        }
        FunTerm::Lambda(j, body) => {
            // (lam x. t)(a) = t[x := numeral(a)]
            let substituted = subst_num_term(body, *j, &NumTerm::numeral(a));
            ref_eval(&substituted, sigma, prims)
        }
        FunTerm::Rec(base, step) => {
            // (R t tau)(0) = t and (R t tau)(S n) = tau((R t tau)(n)),
            // unfolded iteratively
            let mut v = ref_eval(base, sigma, prims);
            for _ in 0..a {
                v = ref_apply(step, v, sigma, prims);
            }
            v
        }
    }
}

#[test]
fn eval_matches_reference_on_random_terms() {
    let prims = prims();
    let mut r = gen::rng(0x5eed_0001);
    let num_vars = [1, 2];
    let fun_vars = [1, 2];
    for case in 0..1000 {
        let mut next_binder = 10;
        let t = gen::random_num_term(&mut r, &prims, &num_vars, &fun_vars, 6, &mut next_binder);
        let sigma = Valuation::new()
            .with_num(1, case % 5)
            .with_num(2, (case * 3) % 7)
            .with_fun(1, gen::random_table(&mut r, 6))
            .with_fun(2, gen::random_table(&mut r, 6));
        let expected = ref_eval(&t, &sigma, &prims);
        assert_eq!(eval_num_term(&t, &sigma, &prims), Ok(expected), "term: {t:?}");
    }
}

// ---------------------------------------------------------------------------
// Parsing and elaboration
// ---------------------------------------------------------------------------

#[test]
fn parse_literal_constructors() {
    let p = prims();
    assert_eq!(parse_formula("(imp bot bot)", &p).unwrap(), Formula::imp(Formula::Bot, Formula::Bot));
}

#[test]
fn parse_or_elaborates_with_fresh_variable() {
    // fresh is x3 because x1 and x2 occur
    let p = prims();
    let got = parse_formula("(or (eq x1 0) (eq x2 0))", &p).unwrap();
    let x3 = NumTerm::var(3);
    let want = Formula::exists_n(
        3,
        Formula::and(
            Formula::imp(
                Formula::eq(x3.clone(), NumTerm::Zero),
                Formula::eq(NumTerm::var(1), NumTerm::Zero),
            ),
            Formula::imp(
                Formula::not(Formula::eq(x3, NumTerm::Zero)),
                Formula::eq(NumTerm::var(2), NumTerm::Zero),
            ),
        ),
    );
    assert_eq!(got, want);
}

#[test]
fn parse_lambda_application() {
    let p = prims();
    let got = parse_formula("(eq (app (lam x1 (succ x1)) 0) 1)", &p).unwrap();
    let want = Formula::eq(
        NumTerm::apply(
            FunTerm::Lambda(1, Box::new(NumTerm::succ(NumTerm::var(1)))),
            NumTerm::Zero,
        ),
        NumTerm::succ(NumTerm::Zero),
    );
    assert_eq!(got, want);
}

#[test]
fn parse_function_equality_elaborates() {
    let p = prims();
    let got = parse_formula("(eq a1 a2)", &p).unwrap();
    match got {
        Formula::ForallN(z, body) => match *body {
            Formula::Eq(l, r) => {
                assert_eq!(*l, NumTerm::apply(FunTerm::FunVar(1), NumTerm::var(z)));
                assert_eq!(*r, NumTerm::apply(FunTerm::FunVar(2), NumTerm::var(z)));
            }
            other => panic!("expected equality body, got {other:?}"),
        },
        other => panic!("expected forall, got {other:?}"),
    }
}

#[test]
fn parse_errors_carry_context() {
    let p = prims();
    assert!(parse_formula("(eq x1)", &p).is_err());
    assert!(parse_formula("(prim nosuch 0)", &p).is_err());
    assert!(parse_formula("(prim add 0)", &p).is_err());
    assert!(parse_formula("(eq a1 x1)", &p).is_err());
}

#[test]
fn disjunction_examples() {
    let got = elaborate_disjunction(Formula::Bot, Formula::Bot, 7).unwrap();
    let x7 = NumTerm::var(7);
    let want = Formula::exists_n(
        7,
        Formula::and(
            Formula::imp(Formula::eq(x7.clone(), NumTerm::Zero), Formula::Bot),
            Formula::imp(Formula::not(Formula::eq(x7, NumTerm::Zero)), Formula::Bot),
        ),
    );
    assert_eq!(got, want);

    // collision with a variable of phi
    let phi = Formula::eq(NumTerm::var(3), NumTerm::Zero);
    assert_eq!(elaborate_disjunction(phi, Formula::Bot, 3), Err(FreshCollision(3)));
}

fn count_exn(f: &Formula) -> usize {
    let mut n = usize::from(matches!(f, Formula::ExistsN(_, _)));
    for c in f.children() {
        n += count_exn(c);
    }
    n
}

#[test]
fn disjunction_adds_exactly_one_existential() {
    let p = prims();
    let mut r = gen::rng(0x5eed_0002);
    for _ in 0..200 {
        let mut next = 20;
        let phi = gen::random_formula(&mut r, &p, &[1], &[1], 3, 1, &mut next);
        let psi = gen::random_formula(&mut r, &p, &[2], &[2], 3, 1, &mut next);
        let fresh = next + 1;
        let out = elaborate_disjunction(phi.clone(), psi.clone(), fresh).unwrap();
        assert_eq!(count_exn(&out), count_exn(&phi) + count_exn(&psi) + 1);
    }
}

// ---------------------------------------------------------------------------
// Round trip: print then parse is the identity on ASTs
// ---------------------------------------------------------------------------

#[test]
fn print_parse_round_trip_on_random_formulas() {
    let p = prims();
    let mut r = gen::rng(0x5eed_0003);
    for _ in 0..1000 {
        let mut next = 30;
        let f = gen::random_formula(&mut r, &p, &[1, 2], &[1, 2], 4, 2, &mut next);
        let text = print_formula(&f, &p);
        let back = parse_formula(&text, &p)
            .unwrap_or_else(|e| panic!("failed to re-parse `{text}`: {e}"));
        assert_eq!(back, f, "round trip through `{text}`");
    }
}

#[test]
fn sequent_round_trip() {
    let p = prims();
    let s = Sequent::new(
        vec![Formula::Bot, Formula::eq(NumTerm::var(1), NumTerm::Zero)],
        Formula::not(Formula::Bot),
    );
    let text = print_sequent(&s, &p);
    assert_eq!(parse_sequent(&text, &p).unwrap(), s);
}

// ---------------------------------------------------------------------------
// Classification and polarity
// ---------------------------------------------------------------------------

fn alpha_app(i: VarIdx, t: NumTerm) -> NumTerm {
    NumTerm::apply(FunTerm::FunVar(i), t)
}

#[test]
fn classify_pi12_examples() {
    let xi = Formula::eq(alpha_app(1, NumTerm::Zero), NumTerm::Zero);
    let psi = Formula::eq(alpha_app(2, NumTerm::Zero), NumTerm::Zero);
    let phi = Formula::forall_f(1, Formula::imp(xi.clone(), Formula::exists_f(2, psi.clone())));
    let parts = classify_pi12(&phi).unwrap();
    assert_eq!((parts.alpha, parts.beta), (1, 2));
    assert_eq!(parts.xi, xi);
    assert_eq!(parts.psi, psi);

    assert!(classify_pi12(&Formula::Bot).is_none());

    // xi not arithmetical
    let bad = Formula::forall_f(
        1,
        Formula::imp(
            Formula::exists_f(3, Formula::Bot),
            Formula::exists_f(2, Formula::Bot),
        ),
    );
    assert!(classify_pi12(&bad).is_none());
}

#[test]
fn number_negative_examples() {
    // xi0 = not exists x5 (x5 = 0): quantifier under negation -> negative
    let xi0 = Formula::not(Formula::exists_n(5, Formula::eq(NumTerm::var(5), NumTerm::Zero)));
    let psi0 = Formula::exists_n(6, Formula::eq(NumTerm::var(6), NumTerm::Zero)); // psi0 unrestricted
    let zeta0 = Formula::forall_f(1, Formula::imp(xi0, Formula::exists_f(2, psi0)));
    let seq = Sequent::new(vec![], zeta0.clone());
    assert_eq!(is_number_negative(&seq), Ok(true));

    // a bare quantifier in an antecedent psi_1 breaks it
    let xi1 = Formula::eq(alpha_app(3, NumTerm::Zero), NumTerm::Zero);
    let psi1 = Formula::exists_n(7, Formula::eq(NumTerm::var(7), NumTerm::Zero));
    let zeta1 = Formula::forall_f(3, Formula::imp(xi1, Formula::exists_f(4, psi1)));
    let seq2 = Sequent::new(vec![zeta1], zeta0.clone());
    assert_eq!(is_number_negative(&seq2), Ok(false));

    // quantifier-free matrices are vacuously negative
    let xi1 = Formula::eq(alpha_app(3, NumTerm::Zero), NumTerm::Zero);
    let psi1 = Formula::eq(alpha_app(4, NumTerm::Zero), NumTerm::Zero);
    let zeta1 = Formula::forall_f(3, Formula::imp(xi1, Formula::exists_f(4, psi1)));
    let seq3 = Sequent::new(vec![zeta1], zeta0);
    assert_eq!(is_number_negative(&seq3), Ok(true));

    assert_eq!(is_number_negative(&Sequent::new(vec![], Formula::Bot)), Err(NotPi12));
}

#[test]
fn polarity_examples() {
    let a = Formula::eq(NumTerm::Zero, NumTerm::Zero);
    // root of forall x1 A
    let f1 = Formula::forall_n(1, a.clone());
    assert_eq!(polarity_of_occurrence(&f1, &[]), Ok(Polarity::Positive));
    // the exists in (exists x1 A) -> bot
    let f2 = Formula::imp(Formula::exists_n(1, a.clone()), Formula::Bot);
    assert_eq!(polarity_of_occurrence(&f2, &[0]), Ok(Polarity::Negative));
    // the forall in not(not(forall x1 A))
    let f3 = Formula::not(Formula::not(Formula::forall_n(1, a)));
    assert_eq!(polarity_of_occurrence(&f3, &[0, 0]), Ok(Polarity::Positive));
    // invalid path
    assert_eq!(polarity_of_occurrence(&f3, &[1]), Err(BadPath));
}

#[test]
fn negation_flips_every_occurrence_polarity() {
    let p = prims();
    let mut r = gen::rng(0x5eed_0004);
    for _ in 0..300 {
        let mut next = 40;
        let f = gen::random_formula(&mut r, &p, &[1], &[1], 4, 3, &mut next);
        let occs = quantifier_occurrences(&f);
        let negated = Formula::not(f.clone());
        let neg_occs = quantifier_occurrences(&negated);
        assert_eq!(occs.len(), neg_occs.len());
        for (o, n) in occs.iter().zip(&neg_occs) {
            assert_eq!(o.polarity.flip(), n.polarity);
            // each occurrence has exactly one polarity by construction;
            // the path in the negation gains the leading left step
            assert_eq!(n.path[0], 0);
            assert_eq!(&n.path[1..], &o.path[..]);
        }
    }
}

#[test]
fn formula_vars_distinguishes_free_and_bound() {
    let f = Formula::forall_n(
        1,
        Formula::eq(NumTerm::var(1), NumTerm::apply(FunTerm::FunVar(2), NumTerm::var(3))),
    );
    let vs = formula_vars(&f);
    assert!(vs.bound_num.contains(&1));
    assert!(vs.free_num.contains(&3));
    assert!(vs.free_fun.contains(&2));
    assert!(!vs.free_num.contains(&1));
}
