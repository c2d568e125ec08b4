//! Smart constructors for derivations: each computes its conclusion from
//! the premises, so hand-built proofs stay readable. The checker remains
//! the authority; builders only assemble trees.

use super::serial::default_principal;
use super::{LeafKind, ProofTree, RuleTag, WitnessTerm};
use crate::syntax::{
    subst_fun_formula, subst_num_formula, Formula, FunTerm, NumTerm, Sequent, VarIdx,
};

fn node(rule: RuleTag, concl: Sequent, premises: Vec<ProofTree>) -> ProofTree {
    let principal = default_principal(rule, &concl);
    ProofTree::node(rule, concl, premises).with_principal(principal)
}

/// `A |- A` for atomic `A`.
pub fn identity(a: Formula) -> ProofTree {
    node(RuleTag::I, Sequent::new(vec![a.clone()], a), vec![])
}

/// `|- phi` for an axiom instance, annotated with its schema name.
pub fn axiom(schema: &str, phi: Formula) -> ProofTree {
    node(RuleTag::AxiomLeaf, Sequent::new(vec![], phi), vec![])
        .with_leaf(LeafKind::Schema { name: schema.into() })
}

/// `|- phi` for a thickened axiom from Sigma.
pub fn sigma_axiom(phi: Formula, base: Formula) -> ProofTree {
    node(RuleTag::AxiomLeaf, Sequent::new(vec![], phi), vec![])
        .with_leaf(LeafKind::Sigma { base })
}

/// From `Gamma, psi1, psi2 |- phi` conclude `Gamma, psi1 and psi2 |- phi`.
pub fn and_l(premise: ProofTree) -> ProofTree {
    let mut ante = premise.conclusion.antecedent.clone();
    let p2 = ante.pop().expect("and_l needs two antecedent formulas");
    let p1 = ante.pop().expect("and_l needs two antecedent formulas");
    ante.push(Formula::and(p1, p2));
    let concl = Sequent::new(ante, premise.conclusion.succedent.clone());
    node(RuleTag::AndL, concl, vec![premise])
}

pub fn and_r(left: ProofTree, right: ProofTree) -> ProofTree {
    let mut ante = left.conclusion.antecedent.clone();
    ante.extend(right.conclusion.antecedent.iter().cloned());
    let succ =
        Formula::and(left.conclusion.succedent.clone(), right.conclusion.succedent.clone());
    node(RuleTag::AndR, Sequent::new(ante, succ), vec![left, right])
}

/// From `Gamma1 |- psi1` and `Gamma2, psi2 |- phi` conclude
/// `Gamma1, Gamma2, psi1 -> psi2 |- phi`.
pub fn imp_l(left: ProofTree, right: ProofTree) -> ProofTree {
    let psi1 = left.conclusion.succedent.clone();
    let mut right_ante = right.conclusion.antecedent.clone();
    let psi2 = right_ante.pop().expect("imp_l right premise needs the consequent");
    let mut ante = left.conclusion.antecedent.clone();
    ante.extend(right_ante);
    ante.push(Formula::imp(psi1, psi2));
    let concl = Sequent::new(ante, right.conclusion.succedent.clone());
    node(RuleTag::ImpL, concl, vec![left, right])
}

/// From `Gamma, phi1 |- phi2` conclude `Gamma |- phi1 -> phi2`.
pub fn imp_r(premise: ProofTree) -> ProofTree {
    let mut ante = premise.conclusion.antecedent.clone();
    let phi1 = ante.pop().expect("imp_r needs the hypothesis in the antecedent");
    let succ = Formula::imp(phi1, premise.conclusion.succedent.clone());
    node(RuleTag::ImpR, Sequent::new(ante, succ), vec![premise])
}

/// Replace the last antecedent formula (which must be `body[x_j := t]`)
/// with `forall x_j body`.
pub fn forall_nl(premise: ProofTree, j: VarIdx, body: Formula, witness: NumTerm) -> ProofTree {
    let mut ante = premise.conclusion.antecedent.clone();
    let inst = ante.pop().expect("forall_nl needs an antecedent");
    debug_assert_eq!(inst, subst_num_formula(&body, j, &witness), "witness instance");
    ante.push(Formula::forall_n(j, body));
    let concl = Sequent::new(ante, premise.conclusion.succedent.clone());
    node(RuleTag::ForallNL, concl, vec![premise]).with_witness(WitnessTerm::Num(witness))
}

pub fn forall_fl(premise: ProofTree, i: VarIdx, body: Formula, witness: FunTerm) -> ProofTree {
    let mut ante = premise.conclusion.antecedent.clone();
    let inst = ante.pop().expect("forall_fl needs an antecedent");
    debug_assert_eq!(inst, subst_fun_formula(&body, i, &witness), "witness instance");
    ante.push(Formula::forall_f(i, body));
    let concl = Sequent::new(ante, premise.conclusion.succedent.clone());
    node(RuleTag::ForallFL, concl, vec![premise]).with_witness(WitnessTerm::Fun(witness))
}

/// From `Gamma |- body[x_j := t]` conclude `Gamma |- exists x_j body`.
pub fn exists_nr(premise: ProofTree, j: VarIdx, body: Formula, witness: NumTerm) -> ProofTree {
    debug_assert_eq!(premise.conclusion.succedent, subst_num_formula(&body, j, &witness));
    let concl =
        Sequent::new(premise.conclusion.antecedent.clone(), Formula::exists_n(j, body));
    node(RuleTag::ExistsNR, concl, vec![premise]).with_witness(WitnessTerm::Num(witness))
}

pub fn exists_fr(premise: ProofTree, i: VarIdx, body: Formula, witness: FunTerm) -> ProofTree {
    debug_assert_eq!(premise.conclusion.succedent, subst_fun_formula(&body, i, &witness));
    let concl =
        Sequent::new(premise.conclusion.antecedent.clone(), Formula::exists_f(i, body));
    node(RuleTag::ExistsFR, concl, vec![premise]).with_witness(WitnessTerm::Fun(witness))
}

/// From `Gamma |- body[x_j := x_eigen]` conclude `Gamma |- forall x_j body`.
pub fn forall_nr(premise: ProofTree, j: VarIdx, body: Formula, eigen: VarIdx) -> ProofTree {
    debug_assert_eq!(
        premise.conclusion.succedent,
        subst_num_formula(&body, j, &NumTerm::var(eigen))
    );
    let concl =
        Sequent::new(premise.conclusion.antecedent.clone(), Formula::forall_n(j, body));
    node(RuleTag::ForallNR, concl, vec![premise]).with_eigen(eigen)
}

pub fn forall_fr(premise: ProofTree, i: VarIdx, body: Formula, eigen: VarIdx) -> ProofTree {
    debug_assert_eq!(
        premise.conclusion.succedent,
        subst_fun_formula(&body, i, &FunTerm::FunVar(eigen))
    );
    let concl =
        Sequent::new(premise.conclusion.antecedent.clone(), Formula::forall_f(i, body));
    node(RuleTag::ForallFR, concl, vec![premise]).with_eigen(eigen)
}

pub fn exists_nl(premise: ProofTree, j: VarIdx, body: Formula, eigen: VarIdx) -> ProofTree {
    let mut ante = premise.conclusion.antecedent.clone();
    let inst = ante.pop().expect("exists_nl needs an antecedent");
    debug_assert_eq!(inst, subst_num_formula(&body, j, &NumTerm::var(eigen)));
    ante.push(Formula::exists_n(j, body));
    let concl = Sequent::new(ante, premise.conclusion.succedent.clone());
    node(RuleTag::ExistsNL, concl, vec![premise]).with_eigen(eigen)
}

pub fn exists_fl(premise: ProofTree, i: VarIdx, body: Formula, eigen: VarIdx) -> ProofTree {
    let mut ante = premise.conclusion.antecedent.clone();
    let inst = ante.pop().expect("exists_fl needs an antecedent");
    debug_assert_eq!(inst, subst_fun_formula(&body, i, &FunTerm::FunVar(eigen)));
    ante.push(Formula::exists_f(i, body));
    let concl = Sequent::new(ante, premise.conclusion.succedent.clone());
    node(RuleTag::ExistsFL, concl, vec![premise]).with_eigen(eigen)
}

pub fn weaken(premise: ProofTree, psi: Formula) -> ProofTree {
    let mut ante = premise.conclusion.antecedent.clone();
    ante.push(psi);
    let concl = Sequent::new(ante, premise.conclusion.succedent.clone());
    node(RuleTag::W, concl, vec![premise])
}

/// Contract the two identical formulas at the end of the antecedent.
pub fn contract(premise: ProofTree) -> ProofTree {
    let mut ante = premise.conclusion.antecedent.clone();
    let a = ante.pop().expect("contract needs two copies");
    let b = ante.last().cloned().expect("contract needs two copies");
    debug_assert_eq!(a, b, "contract needs equal copies");
    let concl = Sequent::new(ante, premise.conclusion.succedent.clone());
    node(RuleTag::C, concl, vec![premise])
}

/// Swap antecedent positions `k` and `k+1`.
pub fn permute(premise: ProofTree, k: usize) -> ProofTree {
    let mut ante = premise.conclusion.antecedent.clone();
    ante.swap(k, k + 1);
    let concl = Sequent::new(ante, premise.conclusion.succedent.clone());
    ProofTree::node(RuleTag::P, concl, vec![premise]).with_principal(vec![k])
}

/// From `Gamma |- bot` conclude `Gamma |- a` for atomic `a`.
pub fn bot_rule(premise: ProofTree, a: Formula) -> ProofTree {
    debug_assert!(a.is_atomic());
    let concl = Sequent::new(premise.conclusion.antecedent.clone(), a);
    node(RuleTag::BotRule, concl, vec![premise])
}

pub fn cut(left: ProofTree, right: ProofTree) -> ProofTree {
    let mut right_ante = right.conclusion.antecedent.clone();
    let cut_formula = right_ante.pop().expect("cut right premise needs the cut formula");
    debug_assert_eq!(cut_formula, left.conclusion.succedent, "cut formula");
    let mut ante = left.conclusion.antecedent.clone();
    ante.extend(right_ante);
    let concl = Sequent::new(ante, right.conclusion.succedent.clone());
    node(RuleTag::Cut, concl, vec![left, right])
}

/// Move the antecedent formula at `from` to the last position via adjacent
/// swaps.
pub fn move_to_end(mut proof: ProofTree, from: usize) -> ProofTree {
    let len = proof.conclusion.antecedent.len();
    for k in from..len.saturating_sub(1) {
        proof = permute(proof, k);
    }
    proof
}

/// Double-negation introduction: from `Gamma |- phi` conclude
/// `Gamma |- not not phi`.
pub fn dni(premise: ProofTree) -> ProofTree {
    let phi = premise.conclusion.succedent.clone();
    let bot_id = identity(Formula::Bot);
    let step = imp_l(premise, bot_id); // Gamma, not phi |- bot
    let _ = phi;
    imp_r(step)
}

/// The eta-expanded identity `[phi] |- phi` for an arbitrary formula.
/// Eigenvariables for the quantifier cases come from `fresh`.
pub fn eta_id(phi: &Formula, fresh: &mut VarIdx) -> ProofTree {
    eta_conv(phi, phi, fresh)
}

/// A derivation of `[from] |- to` for alpha-equivalent `from` and `to`
/// (instantiating both sides at a common fresh eigenvariable collapses the
/// renaming). With `from == to` this is the eta-expanded identity.
pub fn eta_conv(from: &Formula, to: &Formula, fresh: &mut VarIdx) -> ProofTree {
    match (from, to) {
        (Formula::Eq(_, _), Formula::Eq(_, _)) | (Formula::Bot, Formula::Bot) => {
            debug_assert_eq!(from, to, "atoms must agree exactly");
            identity(from.clone())
        }
        (Formula::And(l1, r1), Formula::And(l2, r2)) => {
            let p = and_r(eta_conv(l1, l2, fresh), eta_conv(r1, r2, fresh));
            and_l(p)
        }
        (Formula::Imp(l1, r1), Formula::Imp(l2, r2)) => {
            // hypotheses convert contravariantly
            let p = imp_l(eta_conv(l2, l1, fresh), eta_conv(r1, r2, fresh));
            let p = permute(p, 0);
            imp_r(p)
        }
        (Formula::ForallN(j1, b1), Formula::ForallN(j2, b2)) => {
            let y = *fresh;
            *fresh += 1;
            let i1 = crate::syntax::subst_num_formula(b1, *j1, &NumTerm::var(y));
            let i2 = crate::syntax::subst_num_formula(b2, *j2, &NumTerm::var(y));
            let p = eta_conv(&i1, &i2, fresh);
            let p = forall_nl(p, *j1, (**b1).clone(), NumTerm::var(y));
            forall_nr(p, *j2, (**b2).clone(), y)
        }
        (Formula::ExistsN(j1, b1), Formula::ExistsN(j2, b2)) => {
            let y = *fresh;
            *fresh += 1;
            let i1 = crate::syntax::subst_num_formula(b1, *j1, &NumTerm::var(y));
            let i2 = crate::syntax::subst_num_formula(b2, *j2, &NumTerm::var(y));
            let p = eta_conv(&i1, &i2, fresh);
            let p = exists_nr(p, *j2, (**b2).clone(), NumTerm::var(y));
            exists_nl(p, *j1, (**b1).clone(), y)
        }
        (Formula::ForallF(i1v, b1), Formula::ForallF(i2v, b2)) => {
            let y = *fresh;
            *fresh += 1;
            let i1 = crate::syntax::subst_fun_formula(b1, *i1v, &FunTerm::FunVar(y));
            let i2 = crate::syntax::subst_fun_formula(b2, *i2v, &FunTerm::FunVar(y));
            let p = eta_conv(&i1, &i2, fresh);
            let p = forall_fl(p, *i1v, (**b1).clone(), FunTerm::FunVar(y));
            forall_fr(p, *i2v, (**b2).clone(), y)
        }
        (Formula::ExistsF(i1v, b1), Formula::ExistsF(i2v, b2)) => {
            let y = *fresh;
            *fresh += 1;
            let i1 = crate::syntax::subst_fun_formula(b1, *i1v, &FunTerm::FunVar(y));
            let i2 = crate::syntax::subst_fun_formula(b2, *i2v, &FunTerm::FunVar(y));
            let p = eta_conv(&i1, &i2, fresh);
            let p = exists_fr(p, *i2v, (**b2).clone(), FunTerm::FunVar(y));
            exists_fl(p, *i1v, (**b1).clone(), y)
        }
        _ => panic!("eta_conv on structurally different formulas"),
    }
}
