//! Node-by-node rule checking. Every node must instantiate its rule schema
//! exactly; nothing is inferred.

use super::axioms::is_axiom;
use super::{Base, LeafKind, NodePath, ProofTree, Restriction, RuleTag, SystemId, WitnessTerm};
use crate::syntax::{
    formula_vars, subst_fun_formula, subst_num_formula, Formula, FunTerm, NumTerm, PrimTable,
    Sequent,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub node: NodePath,
    pub reason: String,
}

impl std::fmt::Display for Rejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", super::path_display(&self.node), self.reason)
    }
}

#[derive(Debug, Clone, Default)]
pub struct CheckResult {
    pub rejections: Vec<Rejection>,
}

impl CheckResult {
    pub fn accepted(&self) -> bool {
        self.rejections.is_empty()
    }
}

struct Ctx<'a> {
    sys: SystemId,
    prims: &'a PrimTable,
    /// For the exists-alpha-affine weakening filter: every subformula of any
    /// sequent in the proof of the shape `exists a psi` with arithmetical
    /// `psi`.
    weakenable_roots: Vec<Formula>,
}

pub fn check_proof(p: &ProofTree, sys: SystemId, prims: &PrimTable) -> CheckResult {
    let mut weakenable_roots = Vec::new();
    if sys.restriction == Restriction::ExistsAlphaAffine {
        p.visit(&mut |n, _| {
            for f in n.conclusion.formulas() {
                collect_exists_alpha(f, &mut weakenable_roots);
            }
        });
        weakenable_roots.sort();
        weakenable_roots.dedup();
    }
    let ctx = Ctx { sys, prims, weakenable_roots };
    let mut out = CheckResult::default();
    check_node(p, &ctx, &mut Vec::new(), &mut out);
    out
}

fn collect_exists_alpha(f: &Formula, out: &mut Vec<Formula>) {
    if let Formula::ExistsF(_, body) = f {
        if body.is_arithmetical() {
            out.push(f.clone());
        }
    }
    for c in f.children() {
        collect_exists_alpha(c, out);
    }
}

fn is_subformula(needle: &Formula, hay: &Formula) -> bool {
    if needle == hay {
        return true;
    }
    hay.children().iter().any(|c| is_subformula(needle, c))
}

fn check_node(n: &ProofTree, ctx: &Ctx, path: &mut NodePath, out: &mut CheckResult) {
    for (i, prem) in n.premises.iter().enumerate() {
        path.push(i as u16);
        check_node(prem, ctx, path, out);
        path.pop();
    }
    if let Err(reason) = check_rule(n, ctx) {
        out.rejections.push(Rejection { node: path.clone(), reason });
    }
}

fn ante_split_last(s: &Sequent) -> Option<(&[Formula], &Formula)> {
    s.antecedent.split_last().map(|(l, init)| (init, l))
}

fn check_rule(n: &ProofTree, ctx: &Ctx) -> Result<(), String> {
    if n.premises.len() != n.rule.arity() {
        return Err(format!(
            "rule {} expects {} premises, found {}",
            n.rule.name(),
            n.rule.arity(),
            n.premises.len()
        ));
    }
    let concl = &n.conclusion;
    match n.rule {
        RuleTag::I => {
            if concl.antecedent.len() != 1 {
                return Err("I needs a single antecedent formula".into());
            }
            if concl.antecedent[0] != concl.succedent {
                return Err("I conclusion must be A |- A".into());
            }
            if !concl.succedent.is_atomic() {
                return Err("I applies to atomic formulas only".into());
            }
            Ok(())
        }
        RuleTag::AxiomLeaf => {
            if !concl.antecedent.is_empty() {
                return Err("axiom leaves have an empty antecedent".into());
            }
            if ctx.sys.base == Base::Iqc {
                return Err("pure predicate logic admits no axiom leaves".into());
            }
            match &n.leaf {
                Some(LeafKind::Sigma { base }) => {
                    if !is_axiom(base, ctx.sys, ctx.prims) {
                        return Err("sigma leaf base formula is not an axiom".into());
                    }
                    match crate::transform::contraction_similar(&concl.succedent, base) {
                        Some(_) => Ok(()),
                        None => Err(
                            "sigma leaf conclusion is not contraction-similar to its base".into(),
                        ),
                    }
                }
                _ => {
                    if is_axiom(&concl.succedent, ctx.sys, ctx.prims) {
                        Ok(())
                    } else {
                        Err("leaf formula is not an axiom instance of the system".into())
                    }
                }
            }
        }
        RuleTag::AndL => {
            let (gamma, main) = ante_split_last(concl).ok_or("empty antecedent")?;
            let Formula::And(p1, p2) = main else {
                return Err("principal of andl must be a conjunction".into());
            };
            let prem = &n.premises[0];
            let mut want = gamma.to_vec();
            want.push((**p1).clone());
            want.push((**p2).clone());
            expect_sequent(&prem.conclusion, &want, &concl.succedent, "andl premise")
        }
        RuleTag::AndR => {
            let Formula::And(f1, f2) = &concl.succedent else {
                return Err("andr succedent must be a conjunction".into());
            };
            let (l, r) = (&n.premises[0], &n.premises[1]);
            if l.conclusion.succedent != **f1 || r.conclusion.succedent != **f2 {
                return Err("andr premises do not prove the conjuncts".into());
            }
            let mut want = l.conclusion.antecedent.clone();
            want.extend(r.conclusion.antecedent.iter().cloned());
            if concl.antecedent != want {
                return Err("andr conclusion must concatenate the premise contexts".into());
            }
            Ok(())
        }
        RuleTag::ImpL => {
            let (gamma, main) = ante_split_last(concl).ok_or("empty antecedent")?;
            let Formula::Imp(p1, p2) = main else {
                return Err("principal of impl must be an implication".into());
            };
            // the negation-left restriction: when the consequent is bot the
            // succedent must be bot too
            if matches!(p2.as_ref(), Formula::Bot) && !matches!(concl.succedent, Formula::Bot) {
                return Err("impl on a negation requires a bot succedent".into());
            }
            let (l, r) = (&n.premises[0], &n.premises[1]);
            if l.conclusion.succedent != **p1 {
                return Err("impl left premise must prove the antecedent part".into());
            }
            let (r_gamma, r_last) = ante_split_last(&r.conclusion).ok_or("impl right premise lacks the consequent")?;
            if r_last != p2.as_ref() {
                return Err("impl right premise must end with the consequent".into());
            }
            if r.conclusion.succedent != concl.succedent {
                return Err("impl right premise succedent differs".into());
            }
            let mut want = l.conclusion.antecedent.clone();
            want.extend(r_gamma.iter().cloned());
            if gamma != want.as_slice() {
                return Err("impl conclusion context must concatenate premise contexts".into());
            }
            Ok(())
        }
        RuleTag::ImpR => {
            let Formula::Imp(f1, f2) = &concl.succedent else {
                return Err("impr succedent must be an implication".into());
            };
            let prem = &n.premises[0];
            let mut want = concl.antecedent.clone();
            want.push((**f1).clone());
            expect_sequent(&prem.conclusion, &want, f2, "impr premise")
        }
        RuleTag::ForallNL | RuleTag::ForallFL => {
            let (gamma, main) = ante_split_last(concl).ok_or("empty antecedent")?;
            let prem = &n.premises[0];
            let instantiated = match (n.rule, main, &n.witness) {
                (RuleTag::ForallNL, Formula::ForallN(j, body), Some(WitnessTerm::Num(t))) => {
                    subst_num_formula(body, *j, t)
                }
                (RuleTag::ForallFL, Formula::ForallF(i, body), Some(WitnessTerm::Fun(t))) => {
                    subst_fun_formula(body, *i, t)
                }
                (_, _, None) => return Err("universal-left needs a witness term".into()),
                _ => return Err("principal does not match the rule's quantifier sort".into()),
            };
            let mut want = gamma.to_vec();
            want.push(instantiated);
            expect_sequent(&prem.conclusion, &want, &concl.succedent, "universal-left premise")
        }
        RuleTag::ExistsNR | RuleTag::ExistsFR => {
            let prem = &n.premises[0];
            let instantiated = match (n.rule, &concl.succedent, &n.witness) {
                (RuleTag::ExistsNR, Formula::ExistsN(j, body), Some(WitnessTerm::Num(t))) => {
                    subst_num_formula(body, *j, t)
                }
                (RuleTag::ExistsFR, Formula::ExistsF(i, body), Some(WitnessTerm::Fun(t))) => {
                    subst_fun_formula(body, *i, t)
                }
                (_, _, None) => return Err("existential-right needs a witness term".into()),
                _ => return Err("succedent does not match the rule's quantifier sort".into()),
            };
            expect_sequent(
                &prem.conclusion,
                &concl.antecedent,
                &instantiated,
                "existential-right premise",
            )
        }
        RuleTag::ForallNR | RuleTag::ForallFR => {
            let prem = &n.premises[0];
            let eigen = n.eigen.ok_or("universal-right needs an eigenvariable")?;
            let instantiated = match (n.rule, &concl.succedent) {
                (RuleTag::ForallNR, Formula::ForallN(j, body)) => {
                    subst_num_formula(body, *j, &NumTerm::var(eigen))
                }
                (RuleTag::ForallFR, Formula::ForallF(i, body)) => {
                    subst_fun_formula(body, *i, &FunTerm::FunVar(eigen))
                }
                _ => return Err("succedent does not match the rule's quantifier sort".into()),
            };
            let is_fun = n.rule == RuleTag::ForallFR;
            for (k, f) in concl.antecedent.iter().enumerate() {
                if free_in(f, eigen, is_fun) {
                    return Err(format!(
                        "eigenvariable appears free in antecedent formula {k}"
                    ));
                }
            }
            expect_sequent(
                &prem.conclusion,
                &concl.antecedent,
                &instantiated,
                "universal-right premise",
            )
        }
        RuleTag::ExistsNL | RuleTag::ExistsFL => {
            let (gamma, main) = ante_split_last(concl).ok_or("empty antecedent")?;
            let prem = &n.premises[0];
            let eigen = n.eigen.ok_or("existential-left needs an eigenvariable")?;
            let instantiated = match (n.rule, main) {
                (RuleTag::ExistsNL, Formula::ExistsN(j, body)) => {
                    subst_num_formula(body, *j, &NumTerm::var(eigen))
                }
                (RuleTag::ExistsFL, Formula::ExistsF(i, body)) => {
                    subst_fun_formula(body, *i, &FunTerm::FunVar(eigen))
                }
                _ => return Err("principal does not match the rule's quantifier sort".into()),
            };
            let is_fun = n.rule == RuleTag::ExistsFL;
            for (k, f) in gamma.iter().enumerate() {
                if free_in(f, eigen, is_fun) {
                    return Err(format!(
                        "eigenvariable appears free in antecedent formula {k}"
                    ));
                }
            }
            if free_in(&concl.succedent, eigen, is_fun) {
                return Err("eigenvariable appears free in the succedent".into());
            }
            let mut want = gamma.to_vec();
            want.push(instantiated);
            expect_sequent(&prem.conclusion, &want, &concl.succedent, "existential-left premise")
        }
        RuleTag::W => {
            let (gamma, main) = ante_split_last(concl).ok_or("empty antecedent")?;
            if ctx.sys.restriction == Restriction::ExistsAlphaAffine {
                let ok = ctx
                    .weakenable_roots
                    .iter()
                    .any(|root| is_subformula(main, root));
                if !ok {
                    return Err(
                        "weakening restricted to subformulas of function-existential formulas"
                            .into(),
                    );
                }
            }
            expect_sequent(&n.premises[0].conclusion, gamma, &concl.succedent, "w premise")
        }
        RuleTag::C => {
            match ctx.sys.restriction {
                Restriction::Affine => {
                    return Err("contraction is not available in the affine system".into())
                }
                Restriction::ExistsAlphaAffine => {
                    let main = concl.antecedent.last().ok_or("empty antecedent")?;
                    if !main.is_arithmetical() {
                        return Err(
                            "contraction restricted to formulas without function quantifiers"
                                .into(),
                        );
                    }
                }
                Restriction::Full => {}
            }
            let (gamma, main) = ante_split_last(concl).ok_or("empty antecedent")?;
            let mut want = gamma.to_vec();
            want.push(main.clone());
            want.push(main.clone());
            expect_sequent(&n.premises[0].conclusion, &want, &concl.succedent, "c premise")
        }
        RuleTag::P => {
            let k = *n.principal.first().ok_or("p needs the swap position")?;
            if k + 1 >= concl.antecedent.len() {
                return Err("p swap position out of range".into());
            }
            let mut want = concl.antecedent.clone();
            want.swap(k, k + 1);
            expect_sequent(&n.premises[0].conclusion, &want, &concl.succedent, "p premise")
        }
        RuleTag::BotRule => {
            if !concl.succedent.is_atomic() {
                return Err("bot rule concludes an atomic formula".into());
            }
            expect_sequent(
                &n.premises[0].conclusion,
                &concl.antecedent,
                &Formula::Bot,
                "bot premise",
            )
        }
        RuleTag::Cut => {
            let (l, r) = (&n.premises[0], &n.premises[1]);
            let (r_gamma, cut_formula) =
                ante_split_last(&r.conclusion).ok_or("cut right premise lacks the cut formula")?;
            if &l.conclusion.succedent != cut_formula {
                return Err("cut formula mismatch between premises".into());
            }
            if r.conclusion.succedent != concl.succedent {
                return Err("cut succedent differs from the right premise".into());
            }
            let mut want = l.conclusion.antecedent.clone();
            want.extend(r_gamma.iter().cloned());
            if concl.antecedent != want {
                return Err("cut conclusion must concatenate premise contexts".into());
            }
            Ok(())
        }
    }
}

fn free_in(f: &Formula, var: crate::syntax::VarIdx, is_fun: bool) -> bool {
    let vs = formula_vars(f);
    if is_fun {
        vs.free_fun.contains(&var)
    } else {
        vs.free_num.contains(&var)
    }
}

fn expect_sequent(
    got: &Sequent,
    want_ante: &[Formula],
    want_succ: &Formula,
    what: &str,
) -> Result<(), String> {
    if got.antecedent != want_ante {
        return Err(format!("{what}: antecedent does not match the rule schema"));
    }
    if &got.succedent != want_succ {
        return Err(format!("{what}: succedent does not match the rule schema"));
    }
    Ok(())
}
