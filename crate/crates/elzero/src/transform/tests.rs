use super::*;
use crate::calculus::build::*;
use crate::calculus::{check_proof, check_variable_conventions, ProofTree, RuleTag, SystemId};
use crate::gen;
use crate::syntax::{formula_vars, Formula, FunTerm, NumTerm, PrimTable, VarSets};
use crate::truth::{formula_true, TruthCfg};

fn prims() -> PrimTable {
    PrimTable::standard()
}

fn atom_a() -> Formula {
    Formula::eq(NumTerm::var(1), NumTerm::Zero)
}

fn atom_b() -> Formula {
    Formula::eq(NumTerm::var(2), NumTerm::Zero)
}

// --- contraction similarity ---------------------------------------------------

#[test]
fn similarity_examples() {
    let a = atom_a();
    // reflexive: empty chain
    let chain = contraction_similar(&a, &a).unwrap();
    assert!(chain.steps.is_empty());
    assert_eq!(chain.base, a);

    // single thickening at the root
    let thick = Formula::and(a.clone(), a.clone());
    let chain = contraction_similar(&thick, &a).unwrap();
    assert_eq!(chain.steps.len(), 1);
    assert_eq!(chain.steps[0].path, Vec::<u8>::new());
    assert_eq!(chain.replay().unwrap(), thick);

    // thickening inside an implication, and direction matters
    let b = atom_b();
    let imp_thick = Formula::imp(Formula::and(b.clone(), b.clone()), a.clone());
    let imp_plain = Formula::imp(b.clone(), a.clone());
    let chain = contraction_similar(&imp_thick, &imp_plain).unwrap();
    assert_eq!(chain.steps.len(), 1);
    assert_eq!(chain.steps[0].path, vec![0]);
    assert!(contraction_similar(&imp_plain, &imp_thick).is_none());
}

#[test]
fn chain_soundness_on_random_thickenings() {
    let p = prims();
    let mut r = gen::rng(0x7a57_0001);
    for _ in 0..300 {
        let mut next = 40;
        let psi = gen::random_formula(&mut r, &p, &[1, 2], &[1], 3, 1, &mut next);
        // apply a few random thickening steps
        let mut phi = psi.clone();
        let step_count = 1 + (next as usize % 3);
        for _ in 0..step_count {
            let sites = all_paths(&phi);
            use rand::Rng;
            let (path, sub) = &sites[r.gen_range(0..sites.len())];
            phi = replace_at(&phi, path, Formula::and(sub.clone(), sub.clone())).unwrap();
        }
        let chain = contraction_similar(&phi, &psi).unwrap_or_else(|| {
            let p2 = crate::syntax::PrimTable::standard();
            panic!(
                "no chain from {} to {}",
                crate::syntax::print_formula(&phi, &p2),
                crate::syntax::print_formula(&psi, &p2)
            )
        });
        assert_eq!(chain.replay().unwrap(), phi, "replay reproduces the thickened formula");
        assert!(alpha_eq(&chain.base, &psi));
    }
}

fn all_paths(f: &Formula) -> Vec<(Vec<u8>, Formula)> {
    let mut out = vec![(vec![], f.clone())];
    fn walk(f: &Formula, path: &mut Vec<u8>, out: &mut Vec<(Vec<u8>, Formula)>) {
        let children: Vec<(u8, &Formula)> = match f {
            Formula::Eq(_, _) | Formula::Bot => vec![],
            Formula::And(l, r) | Formula::Imp(l, r) => vec![(0, l), (1, r)],
            Formula::ExistsN(_, g)
            | Formula::ForallN(_, g)
            | Formula::ExistsF(_, g)
            | Formula::ForallF(_, g) => vec![(0, g)],
        };
        for (step, c) in children {
            path.push(step);
            out.push((path.clone(), c.clone()));
            walk(c, path, out);
            path.pop();
        }
    }
    walk(f, &mut Vec::new(), &mut out);
    out
}

#[test]
fn similarity_implies_bounded_truth_equivalence() {
    // the contraction-similar pair is provably equivalent; here tested
    // semantically over sampled valuations at bound 8
    let p = prims();
    let cfg = TruthCfg::new(8);
    let mut r = gen::rng(0x7a57_0002);
    for _ in 0..60 {
        let mut next = 40;
        let psi = gen::random_formula(&mut r, &p, &[1, 2], &[1], 3, 1, &mut next);
        let sites = all_paths(&psi);
        use rand::Rng;
        let (path, sub) = &sites[r.gen_range(0..sites.len())];
        let phi = replace_at(&psi, path, Formula::and(sub.clone(), sub.clone())).unwrap();
        assert!(contraction_similar(&phi, &psi).is_some());

        let vars = formula_vars(&psi);
        for sigma in gen::valuation_suite(&vars, 8, 99, 12) {
            let t1 = formula_true(&phi, &sigma, &cfg, &p).unwrap();
            let t2 = formula_true(&psi, &sigma, &cfg, &p).unwrap();
            assert_eq!(t1, t2, "thickening changed truth of {psi:?} at {sigma:?}");
        }
    }
}

#[test]
fn alpha_equivalence_handles_duplicated_binders() {
    // and(forall x3 A(x3), forall x3 A(x3)) vs a variant renaming only the
    // second copy
    let body = |v: u32| Formula::forall_n(v, Formula::eq(NumTerm::var(v), NumTerm::Zero));
    let left = Formula::and(body(3), body(3));
    let right = Formula::and(body(3), body(7));
    assert!(alpha_eq(&left, &right));
    let wrong = Formula::and(body(3), Formula::forall_n(7, Formula::eq(NumTerm::var(3), NumTerm::Zero)));
    assert!(!alpha_eq(&left, &wrong));
}

// --- kuroda: classical equivalence --------------------------------------------

#[test]
fn kuroda_preserves_classical_truth() {
    // phi and its translation agree in the (classical) bounded structure on
    // random formulas of quantifier depth <= 2
    let p = prims();
    let cfg = TruthCfg::new(8);
    let mut r = gen::rng(0x7a57_0003);
    let mut checked = 0;
    for _ in 0..500 {
        let mut next = 40;
        let phi = gen::random_formula(&mut r, &p, &[1, 2], &[1], 3, 2, &mut next);
        let translated = kuroda(&phi);
        let vars = formula_vars(&phi);
        for sigma in gen::valuation_suite(&vars, 8, 77, 6) {
            let t1 = formula_true(&phi, &sigma, &cfg, &p).unwrap();
            let t2 = formula_true(&translated, &sigma, &cfg, &p).unwrap();
            assert_eq!(t1, t2, "negative translation changed classical truth of {phi:?}");
            checked += 1;
        }
    }
    assert!(checked >= 500);
}

// --- affinization --------------------------------------------------------------

fn accepted(p: &ProofTree, sys: SystemId) -> bool {
    check_proof(p, sys, &prims()).accepted()
}

fn count_rule(p: &ProofTree, rule: RuleTag) -> usize {
    let mut n = 0;
    p.visit(&mut |node, _| {
        if node.rule == rule {
            n += 1;
        }
    });
    n
}

fn assert_affine_result(p: &ProofTree, q: &ProofTree, link: &LinkageMap) {
    assert!(accepted(q, SystemId::EL0_AFFINE), "affinized proof fails the affine checker");
    assert_eq!(count_rule(q, RuleTag::C), 0, "contraction survived affinization");
    assert!(link.is_surjective(p.conclusion.antecedent.len()), "linkage not surjective");
    assert_eq!(link.links.len(), q.conclusion.antecedent.len());
    for (out_pos, (in_pos, chain)) in link.links.iter().enumerate() {
        let out_f = &q.conclusion.antecedent[out_pos];
        let in_f = &p.conclusion.antecedent[*in_pos];
        assert_eq!(&chain.replay().unwrap(), out_f, "chain does not replay to the output");
        assert!(alpha_eq(&chain.base, in_f), "chain base is not the input formula");
    }
    assert_eq!(&link.succedent.replay().unwrap(), &q.conclusion.succedent);
    assert!(alpha_eq(&link.succedent.base, &p.conclusion.succedent));
}

#[test]
fn affinize_contraction_free_proof_is_identity() {
    let p = identity(atom_a());
    let (q, link) = affinize(&p, &prims()).unwrap();
    assert_eq!(q, p);
    assert_affine_result(&p, &q, &link);
    assert_eq!(link.links[0].0, 0);
    assert!(link.links[0].1.steps.is_empty());
}

#[test]
fn affinize_merges_quantifier_free_contraction() {
    // C on a quantifier-free formula becomes a conjunction merge
    let b = atom_a();
    let p = identity(b.clone());
    let p = weaken(p, b.clone());
    let p = permute(p, 0);
    let p = contract(p);
    assert!(accepted(&p, SystemId::EL0));

    let (q, link) = affinize(&p, &prims()).unwrap();
    assert_affine_result(&p, &q, &link);
    assert_eq!(q.conclusion.antecedent.len(), 1);
    assert_eq!(q.conclusion.antecedent[0], Formula::and(b.clone(), b.clone()));
    assert_eq!(link.links[0].1.steps.len(), 1, "one thickening step for the merge");
}

#[test]
fn affinize_keeps_linked_copies_for_function_existentials() {
    // C on an exists-alpha formula keeps both copies, renamed apart
    let a = |i: u32| Formula::eq(NumTerm::apply(FunTerm::FunVar(i), NumTerm::Zero), NumTerm::Zero);
    let p = identity(a(9));
    let p = exists_fr(p, 3, a(3), FunTerm::FunVar(9));
    let p = exists_fl(p, 2, a(2), 9);
    let ex = Formula::exists_f(2, a(2));
    let p = weaken(p, ex);
    let p = contract(p);
    assert!(accepted(&p, SystemId::EL0));

    let (q, link) = affinize(&p, &prims()).unwrap();
    assert_affine_result(&p, &q, &link);
    assert_eq!(q.conclusion.antecedent.len(), 2, "both copies kept");
    assert_eq!(link.links[0].0, 0);
    assert_eq!(link.links[1].0, 0, "both copies linked to the contracted position");
    // copies are renamed apart
    let vs0 = formula_vars(&q.conclusion.antecedent[0]);
    let vs1 = formula_vars(&q.conclusion.antecedent[1]);
    assert!(vs0.bound_fun.is_disjoint(&vs1.bound_fun), "copies share binders");
    assert!(check_variable_conventions(&q).ok(), "affinized output violates conventions");
}

/// A hypothesis applied twice through contraction: the first use feeds the
/// second use's instance, composition-style. This is the shape the
/// double-use pipeline produces.
pub fn double_use_proof() -> ProofTree {
    let xi = |tau: FunTerm| {
        Formula::eq(
            NumTerm::apply(tau.clone(), NumTerm::Zero),
            NumTerm::apply(tau, NumTerm::Zero),
        )
    };
    let sol = |tau: FunTerm| Formula::eq(NumTerm::apply(tau, NumTerm::Zero), NumTerm::Zero);
    let zeta_body = Formula::imp(xi(FunTerm::FunVar(3)), Formula::exists_f(4, sol(FunTerm::FunVar(4))));
    // zeta1 = forall a3 (a3(0) = a3(0) -> exists a4 (a4(0) = 0))
    let _zeta1 = Formula::forall_f(3, zeta_body.clone());

    // use 2 (inner): instance a5, the solution of use 1
    let n1 = identity(sol(FunTerm::FunVar(6)));
    let n2 = exists_fr(n1, 2, sol(FunTerm::FunVar(2)), FunTerm::FunVar(6));
    let n3 = exists_fl(n2, 4, sol(FunTerm::FunVar(4)), 6);
    let left2 = axiom(
        "refl",
        xi(FunTerm::FunVar(5)),
    );
    let n4 = imp_l(left2, n3);
    let n5 = forall_fl(n4, 3, zeta_body.clone(), FunTerm::FunVar(5));

    // use 1: instance a1 (free), solution bound to the eigenvariable a5
    let n5w = weaken(n5, sol(FunTerm::FunVar(5)));
    let n6 = exists_fl(n5w, 4, sol(FunTerm::FunVar(4)), 5);
    let left1 = axiom("refl", xi(FunTerm::FunVar(1)));
    let n7 = imp_l(left1, n6);
    let n8 = forall_fl(n7, 3, zeta_body, FunTerm::FunVar(1));
    contract(n8)
}

#[test]
fn affinize_double_use_renames_and_links() {
    let p = double_use_proof();
    assert!(accepted(&p, SystemId::EL0), "{:?}", check_proof(&p, SystemId::EL0, &prims()).rejections);

    let (q, link) = affinize(&p, &prims()).unwrap();
    assert_affine_result(&p, &q, &link);
    assert_eq!(q.conclusion.antecedent.len(), 2, "two linked copies");
    assert_eq!((link.links[0].0, link.links[1].0), (0, 0));

    // the copies must use disjoint bound variables so extraction can assign
    // levels per copy
    let vs0 = formula_vars(&q.conclusion.antecedent[0]);
    let vs1 = formula_vars(&q.conclusion.antecedent[1]);
    assert!(vs0.bound_fun.is_disjoint(&vs1.bound_fun));
    assert!(check_variable_conventions(&q).ok(), "{:?}", check_variable_conventions(&q));

    // bounded-truth equivalence of linked formulas at bound 8
    let cfg = TruthCfg::new(8);
    let prims = prims();
    for (out_pos, (in_pos, _)) in link.links.iter().enumerate() {
        let out_f = &q.conclusion.antecedent[out_pos];
        let in_f = &p.conclusion.antecedent[*in_pos];
        let mut vars = VarSets::default();
        vars = vars.union(&formula_vars(out_f)).union(&formula_vars(in_f));
        for sigma in gen::valuation_suite(&vars, 8, 4242, 10) {
            assert_eq!(
                formula_true(out_f, &sigma, &cfg, &prims).unwrap(),
                formula_true(in_f, &sigma, &cfg, &prims).unwrap(),
            );
        }
    }
}

#[test]
fn affinize_replays_axiom_cuts_per_copy() {
    // a contraction on a cut-consumed choice axiom: both copies get their
    // own Sigma leaf
    let t = prims();
    let psi = Formula::eq(
        NumTerm::PrimApp(t.id_add(), vec![NumTerm::var(1), NumTerm::Zero]),
        NumTerm::var(1),
    );
    // two uses of the axiom via weakenings, contracted, then cut
    let b = Formula::eq(NumTerm::Zero, NumTerm::Zero);
    let base = identity(b.clone());
    let w1 = weaken(base, psi.clone());
    let p_right = contract(weaken(w1, psi.clone()));
    let p = cut(axiom("primdef", psi), p_right);
    assert!(accepted(&p, SystemId::EL0));

    let (q, link) = affinize(&p, &prims()).unwrap();
    assert_affine_result(&p, &q, &link);
}
