//! Recognition of axiom instances by syntactic schema matching, and
//! expansion of named schema instantiations from proof files.
//!
//! Equality axioms are formulated without quantifiers. The quantified
//! schemas (QF-IA, QF-AC, and Markov's principle when enabled) check the
//! matrix for quantifier-freeness.

use super::{Base, SystemId};
use crate::syntax::{
    subst_num_formula, Formula, FunTerm, NumTerm, PrimTable, VarIdx,
};
use std::collections::BTreeMap;
use thiserror::Error;

/// True iff `phi` is an instance of: an equality axiom, a defining axiom of
/// a registered primitive symbol, SA, QF-IA, CON, REC, QF-AC, or (with
/// markov) MP.
pub fn is_axiom(phi: &Formula, sys: SystemId, prims: &PrimTable) -> bool {
    if sys.base == Base::Iqc {
        return false;
    }
    is_equality_axiom(phi)
        || is_prim_defining_axiom(phi, prims)
        || is_sa(phi)
        || is_qf_ia(phi).is_some()
        || is_con(phi)
        || is_rec(phi)
        || is_qf_ac(phi).is_some()
        || (sys.markov && is_mp(phi).is_some())
}

// --- equality ---------------------------------------------------------------

fn is_equality_axiom(phi: &Formula) -> bool {
    // t = t
    if let Formula::Eq(l, r) = phi {
        if l == r {
            return true;
        }
    }
    // t1 = t2 -> t2 = t1
    if let Formula::Imp(h, c) = phi {
        if let (Formula::Eq(a, b), Formula::Eq(b2, a2)) = (h.as_ref(), c.as_ref()) {
            if a == a2 && b == b2 {
                return true;
            }
        }
        // (t1 = t2 and t2 = t3) -> t1 = t3
        if let (Formula::And(e1, e2), Formula::Eq(a, c2)) = (h.as_ref(), c.as_ref()) {
            if let (Formula::Eq(a1, b1), Formula::Eq(b2, c1)) = (e1.as_ref(), e2.as_ref()) {
                if a1 == a && b1 == b2 && c1 == c2 {
                    return true;
                }
            }
        }
        // replacement: t1 = t2 -> l = r where r is l with t1 rewritten to t2
        if let (Formula::Eq(a, b), Formula::Eq(l, r)) = (h.as_ref(), c.as_ref()) {
            if a != b && differ_only_num(l, r, a, b) {
                return true;
            }
        }
    }
    false
}

fn differ_only_num(l: &NumTerm, r: &NumTerm, a: &NumTerm, b: &NumTerm) -> bool {
    if l == r {
        return true;
    }
    if l == a && r == b {
        return true;
    }
    match (l, r) {
        (NumTerm::Succ(x), NumTerm::Succ(y)) => differ_only_num(x, y, a, b),
        (NumTerm::PrimApp(f, xs), NumTerm::PrimApp(g, ys)) => {
            f == g
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(x, y)| differ_only_num(x, y, a, b))
        }
        (NumTerm::FunApp(t1, x), NumTerm::FunApp(t2, y)) => {
            differ_only_fun(t1, t2, a, b) && differ_only_num(x, y, a, b)
        }
        _ => false,
    }
}

fn differ_only_fun(l: &FunTerm, r: &FunTerm, a: &NumTerm, b: &NumTerm) -> bool {
    if l == r {
        return true;
    }
    match (l, r) {
        (FunTerm::Lambda(j, x), FunTerm::Lambda(k, y)) => j == k && differ_only_num(x, y, a, b),
        (FunTerm::Rec(x, t1), FunTerm::Rec(y, t2)) => {
            differ_only_num(x, y, a, b) && differ_only_fun(t1, t2, a, b)
        }
        _ => false,
    }
}

// --- primitive defining equations -------------------------------------------

fn is_prim_defining_axiom(phi: &Formula, prims: &PrimTable) -> bool {
    let Formula::Eq(l, r) = phi else { return false };
    for id in prims.ids() {
        for (pl, pr) in &prims.def(id).equations {
            let mut binds = BTreeMap::new();
            if match_term(pl, l, &mut binds) && match_term(pr, r, &mut binds) {
                return true;
            }
        }
    }
    false
}

/// Nonlinear first-order matching: pattern NumVars are metavariables.
fn match_term(pat: &NumTerm, t: &NumTerm, binds: &mut BTreeMap<VarIdx, NumTerm>) -> bool {
    match pat {
        NumTerm::NumVar(m) => match binds.get(m) {
            Some(prev) => prev == t,
            None => {
                binds.insert(*m, t.clone());
                true
            }
        },
        NumTerm::Zero => matches!(t, NumTerm::Zero),
        NumTerm::Succ(ps) => match t {
            NumTerm::Succ(ts) => match_term(ps, ts, binds),
            _ => false,
        },
        NumTerm::PrimApp(pf, pargs) => match t {
            NumTerm::PrimApp(tf, targs) if pf == tf && pargs.len() == targs.len() => {
                pargs.iter().zip(targs).all(|(p, a)| match_term(p, a, binds))
            }
            _ => false,
        },
        NumTerm::FunApp(_, _) => pat == t,
    }
}

// --- SA ---------------------------------------------------------------------

fn is_sa(phi: &Formula) -> bool {
    // S(t) <> 0 and (S(t) = S(s) -> t = s)
    let Formula::And(l, r) = phi else { return false };
    let Formula::Imp(ne, bot) = l.as_ref() else { return false };
    if !matches!(bot.as_ref(), Formula::Bot) {
        return false;
    }
    let Formula::Eq(st, z) = ne.as_ref() else { return false };
    let (NumTerm::Succ(t), NumTerm::Zero) = (st.as_ref(), z.as_ref()) else { return false };
    let Formula::Imp(h, c) = r.as_ref() else { return false };
    let Formula::Eq(st1, ss) = h.as_ref() else { return false };
    let (NumTerm::Succ(t1), NumTerm::Succ(s)) = (st1.as_ref(), ss.as_ref()) else {
        return false;
    };
    let Formula::Eq(t2, s2) = c.as_ref() else { return false };
    t.as_ref() == t1.as_ref() && t1.as_ref() == t2.as_ref() && s.as_ref() == s2.as_ref()
}

// --- QF-IA ------------------------------------------------------------------

/// On success returns (i, j, B) from
/// `forall x_i (B -> B[S x_i]) -> forall x_j (B[0] -> B[x_j])`.
pub fn is_qf_ia(phi: &Formula) -> Option<(VarIdx, VarIdx, Formula)> {
    let Formula::Imp(step, concl) = phi else { return None };
    let Formula::ForallN(i, step_body) = step.as_ref() else { return None };
    let Formula::Imp(b1, b2) = step_body.as_ref() else { return None };
    if !b1.is_quantifier_free() {
        return None;
    }
    let succ_inst = subst_num_formula(b1, *i, &NumTerm::succ(NumTerm::var(*i)));
    if b2.as_ref() != &succ_inst {
        return None;
    }
    let Formula::ForallN(j, concl_body) = concl.as_ref() else { return None };
    let Formula::Imp(b3, b4) = concl_body.as_ref() else { return None };
    if b3.as_ref() != &subst_num_formula(b1, *i, &NumTerm::Zero) {
        return None;
    }
    if b4.as_ref() != &subst_num_formula(b1, *i, &NumTerm::var(*j)) {
        return None;
    }
    Some((*i, *j, (**b1).clone()))
}

// --- CON --------------------------------------------------------------------

fn is_con(phi: &Formula) -> bool {
    // (lam x. t)(t') = t[x := t']
    let Formula::Eq(l, r) = phi else { return false };
    let NumTerm::FunApp(tau, arg) = l.as_ref() else { return false };
    let FunTerm::Lambda(j, body) = tau.as_ref() else { return false };
    r.as_ref() == &crate::syntax::subst_num_term(body, *j, arg)
}

// --- REC --------------------------------------------------------------------

fn is_rec(phi: &Formula) -> bool {
    // (R t tau)(0) = t and (R t tau)(S t') = tau((R t tau)(t'))
    let Formula::And(l, r) = phi else { return false };
    let Formula::Eq(l0, r0) = l.as_ref() else { return false };
    let NumTerm::FunApp(rec0, z) = l0.as_ref() else { return false };
    let FunTerm::Rec(base, step) = rec0.as_ref() else { return false };
    if !matches!(z.as_ref(), NumTerm::Zero) || r0.as_ref() != base.as_ref() {
        return false;
    }
    let Formula::Eq(l1, r1) = r.as_ref() else { return false };
    let NumTerm::FunApp(rec1, sarg) = l1.as_ref() else { return false };
    if rec1.as_ref() != rec0.as_ref() {
        return false;
    }
    let NumTerm::Succ(tp) = sarg.as_ref() else { return false };
    let NumTerm::FunApp(step2, inner) = r1.as_ref() else { return false };
    if step2.as_ref() != step.as_ref() {
        return false;
    }
    let NumTerm::FunApp(rec2, tp2) = inner.as_ref() else { return false };
    rec2.as_ref() == rec0.as_ref() && tp2.as_ref() == tp.as_ref()
}

// --- QF-AC ------------------------------------------------------------------

/// On success returns (c, d, i, b, B) from
/// `forall x_c exists x_d B -> exists a_i forall x_b B[x_c := x_b, x_d := a_i(x_b)]`.
pub fn is_qf_ac(phi: &Formula) -> Option<(VarIdx, VarIdx, VarIdx, VarIdx, Formula)> {
    let Formula::Imp(hyp, concl) = phi else { return None };
    let Formula::ForallN(c, hyp_body) = hyp.as_ref() else { return None };
    let Formula::ExistsN(d, b) = hyp_body.as_ref() else { return None };
    if !b.is_quantifier_free() {
        return None;
    }
    let Formula::ExistsF(i, concl_body) = concl.as_ref() else { return None };
    let Formula::ForallN(bv, b2) = concl_body.as_ref() else { return None };
    let expected = subst_num_formula(
        &subst_num_formula(b, *c, &NumTerm::var(*bv)),
        *d,
        &NumTerm::apply(FunTerm::FunVar(*i), NumTerm::var(*bv)),
    );
    if b2.as_ref() != &expected {
        return None;
    }
    Some((*c, *d, *i, *bv, (**b).clone()))
}

// --- MP ---------------------------------------------------------------------

/// On success returns (b, c, B) from `not not exists x_b B -> exists x_c B[x_b := x_c]`.
pub fn is_mp(phi: &Formula) -> Option<(VarIdx, VarIdx, Formula)> {
    let Formula::Imp(hyp, concl) = phi else { return None };
    let Formula::Imp(inner, bot1) = hyp.as_ref() else { return None };
    if !matches!(bot1.as_ref(), Formula::Bot) {
        return None;
    }
    let Formula::Imp(ex, bot2) = inner.as_ref() else { return None };
    if !matches!(bot2.as_ref(), Formula::Bot) {
        return None;
    }
    let Formula::ExistsN(b, matrix) = ex.as_ref() else { return None };
    if !matrix.is_quantifier_free() {
        return None;
    }
    let Formula::ExistsN(c, matrix2) = concl.as_ref() else { return None };
    if matrix2.as_ref() != &subst_num_formula(matrix, *b, &NumTerm::var(*c)) {
        return None;
    }
    Some((*b, *c, (**matrix).clone()))
}

// --- schema expansion for proof files ----------------------------------------

#[derive(Debug, Error)]
pub enum AxiomExpandError {
    #[error("unknown axiom schema `{0}`")]
    UnknownSchema(String),
    #[error("schema `{schema}` needs binding `{name}`")]
    MissingBind { schema: String, name: String },
    #[error("binding `{0}` has the wrong kind")]
    WrongKind(String),
}

#[derive(Debug, Clone)]
pub enum SchemaBind {
    Term(NumTerm),
    Fun(FunTerm),
    Var(VarIdx),
    Formula(Formula),
}

/// Build the conclusion formula of a named axiom-leaf schema from its
/// instantiation map. The result still goes through `is_axiom`.
pub fn expand_axiom_schema(
    name: &str,
    binds: &BTreeMap<String, SchemaBind>,
) -> Result<Formula, AxiomExpandError> {
    let term = |key: &str| -> Result<NumTerm, AxiomExpandError> {
        match binds.get(key) {
            Some(SchemaBind::Term(t)) => Ok(t.clone()),
            Some(_) => Err(AxiomExpandError::WrongKind(key.into())),
            None => {
                Err(AxiomExpandError::MissingBind { schema: name.into(), name: key.into() })
            }
        }
    };
    let fun = |key: &str| -> Result<FunTerm, AxiomExpandError> {
        match binds.get(key) {
            Some(SchemaBind::Fun(t)) => Ok(t.clone()),
            Some(_) => Err(AxiomExpandError::WrongKind(key.into())),
            None => {
                Err(AxiomExpandError::MissingBind { schema: name.into(), name: key.into() })
            }
        }
    };
    let var = |key: &str| -> Result<VarIdx, AxiomExpandError> {
        match binds.get(key) {
            Some(SchemaBind::Var(v)) => Ok(*v),
            Some(_) => Err(AxiomExpandError::WrongKind(key.into())),
            None => {
                Err(AxiomExpandError::MissingBind { schema: name.into(), name: key.into() })
            }
        }
    };
    let formula = |key: &str| -> Result<Formula, AxiomExpandError> {
        match binds.get(key) {
            Some(SchemaBind::Formula(f)) => Ok(f.clone()),
            Some(_) => Err(AxiomExpandError::WrongKind(key.into())),
            None => {
                Err(AxiomExpandError::MissingBind { schema: name.into(), name: key.into() })
            }
        }
    };

    match name {
        "refl" => {
            let t = term("t")?;
            Ok(Formula::eq(t.clone(), t))
        }
        "symm" => {
            let (t1, t2) = (term("t1")?, term("t2")?);
            Ok(Formula::imp(Formula::eq(t1.clone(), t2.clone()), Formula::eq(t2, t1)))
        }
        "trans" => {
            let (t1, t2, t3) = (term("t1")?, term("t2")?, term("t3")?);
            Ok(Formula::imp(
                Formula::and(
                    Formula::eq(t1.clone(), t2.clone()),
                    Formula::eq(t2, t3.clone()),
                ),
                Formula::eq(t1, t3),
            ))
        }
        "sa" => {
            let (t, s) = (term("t")?, term("s")?);
            Ok(Formula::and(
                Formula::not(Formula::eq(NumTerm::succ(t.clone()), NumTerm::Zero)),
                Formula::imp(
                    Formula::eq(NumTerm::succ(t.clone()), NumTerm::succ(s.clone())),
                    Formula::eq(t, s),
                ),
            ))
        }
        "con" => {
            // (lam x. body)(arg) = body[x := arg]
            let tau = fun("lam")?;
            let arg = term("arg")?;
            let FunTerm::Lambda(j, body) = &tau else {
                return Err(AxiomExpandError::WrongKind("lam".into()));
            };
            let rhs = crate::syntax::subst_num_term(body, *j, &arg);
            Ok(Formula::eq(NumTerm::apply(tau.clone(), arg), rhs))
        }
        "rec" => {
            let base = term("base")?;
            let step = fun("step")?;
            let tp = term("arg")?;
            let rec = FunTerm::Rec(Box::new(base.clone()), Box::new(step.clone()));
            Ok(Formula::and(
                Formula::eq(NumTerm::apply(rec.clone(), NumTerm::Zero), base),
                Formula::eq(
                    NumTerm::apply(rec.clone(), NumTerm::succ(tp.clone())),
                    NumTerm::apply(step, NumTerm::apply(rec, tp)),
                ),
            ))
        }
        "qfia" => {
            let b = formula("psi")?;
            let (i, j) = (var("i")?, var("j")?);
            let step = Formula::forall_n(
                i,
                Formula::imp(
                    b.clone(),
                    subst_num_formula(&b, i, &NumTerm::succ(NumTerm::var(i))),
                ),
            );
            let concl = Formula::forall_n(
                j,
                Formula::imp(
                    subst_num_formula(&b, i, &NumTerm::Zero),
                    subst_num_formula(&b, i, &NumTerm::var(j)),
                ),
            );
            Ok(Formula::imp(step, concl))
        }
        "qfac" => {
            let b = formula("psi")?;
            let (c, d, i, bv) = (var("c")?, var("d")?, var("i")?, var("b")?);
            let hyp = Formula::forall_n(c, Formula::exists_n(d, b.clone()));
            let matrix = subst_num_formula(
                &subst_num_formula(&b, c, &NumTerm::var(bv)),
                d,
                &NumTerm::apply(FunTerm::FunVar(i), NumTerm::var(bv)),
            );
            Ok(Formula::imp(hyp, Formula::exists_f(i, Formula::forall_n(bv, matrix))))
        }
        "mp" => {
            let b = formula("psi")?;
            let (bv, c) = (var("b")?, var("c")?);
            Ok(Formula::imp(
                Formula::not(Formula::not(Formula::exists_n(bv, b.clone()))),
                Formula::exists_n(c, subst_num_formula(&b, bv, &NumTerm::var(c))),
            ))
        }
        "formula" => formula("f"),
        _ => Err(AxiomExpandError::UnknownSchema(name.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::PrimTable;

    fn sys_mp() -> SystemId {
        SystemId::EL0_MP
    }

    #[test]
    fn markov_instances_gated_by_system() {
        let prims = PrimTable::standard();
        // not not exists x1 (x1 = 0) -> exists x2 (x2 = 0)
        let phi = Formula::imp(
            Formula::not(Formula::not(Formula::exists_n(
                1,
                Formula::eq(NumTerm::var(1), NumTerm::Zero),
            ))),
            Formula::exists_n(2, Formula::eq(NumTerm::var(2), NumTerm::Zero)),
        );
        assert!(is_axiom(&phi, sys_mp(), &prims));
        assert!(!is_axiom(&phi, SystemId::EL0, &prims));
        assert!(!is_axiom(&phi, SystemId { base: Base::Iqc, markov: true, restriction: Restriction::Full }, &prims));
    }

    use crate::calculus::Restriction;

    #[test]
    fn qfia_allows_function_parameters() {
        let prims = PrimTable::standard();
        // B(x1) = (a1(x1) = 0)
        let b = Formula::eq(NumTerm::apply(FunTerm::FunVar(1), NumTerm::var(1)), NumTerm::Zero);
        let mut binds = BTreeMap::new();
        binds.insert("psi".to_string(), SchemaBind::Formula(b));
        binds.insert("i".to_string(), SchemaBind::Var(1));
        binds.insert("j".to_string(), SchemaBind::Var(2));
        let phi = expand_axiom_schema("qfia", &binds).unwrap();
        assert!(is_axiom(&phi, SystemId::EL0, &prims));
    }

    #[test]
    fn qfac_rejects_quantified_matrix() {
        let prims = PrimTable::standard();
        // the matrix contains a quantifier, so the formula must not be
        // recognized
        let matrix = Formula::exists_n(5, Formula::eq(NumTerm::var(5), NumTerm::var(1)));
        let hyp = Formula::forall_n(1, Formula::exists_n(2, matrix.clone()));
        let concl_matrix = subst_num_formula(
            &subst_num_formula(&matrix, 1, &NumTerm::var(3)),
            2,
            &NumTerm::apply(FunTerm::FunVar(1), NumTerm::var(3)),
        );
        let phi = Formula::imp(hyp, Formula::exists_f(1, Formula::forall_n(3, concl_matrix)));
        assert!(!is_axiom(&phi, SystemId::EL0, &prims));
        assert!(is_qf_ac(&phi).is_none());
    }

    #[test]
    fn equality_and_structural_axioms() {
        let prims = PrimTable::standard();
        let t = NumTerm::var(1);
        assert!(is_axiom(&Formula::eq(t.clone(), t.clone()), SystemId::EL0, &prims));
        // replacement congruence through a context
        let a = NumTerm::var(1);
        let b = NumTerm::var(2);
        let phi = Formula::imp(
            Formula::eq(a.clone(), b.clone()),
            Formula::eq(NumTerm::succ(NumTerm::succ(a)), NumTerm::succ(NumTerm::succ(b))),
        );
        assert!(is_axiom(&phi, SystemId::EL0, &prims));

        // add(x1, 0) = x1 is a defining axiom instance
        let add = prims.id_add();
        let def = Formula::eq(
            NumTerm::PrimApp(add, vec![NumTerm::var(1), NumTerm::Zero]),
            NumTerm::var(1),
        );
        assert!(is_axiom(&def, SystemId::EL0, &prims));

        // but add(x1, 0) = 0 is not
        let bogus = Formula::eq(
            NumTerm::PrimApp(add, vec![NumTerm::var(1), NumTerm::Zero]),
            NumTerm::Zero,
        );
        assert!(!is_axiom(&bogus, SystemId::EL0, &prims));
    }

    #[test]
    fn con_and_rec_schemas() {
        let prims = PrimTable::standard();
        let mut binds = BTreeMap::new();
        binds.insert(
            "lam".to_string(),
            SchemaBind::Fun(FunTerm::Lambda(1, Box::new(NumTerm::succ(NumTerm::var(1))))),
        );
        binds.insert("arg".to_string(), SchemaBind::Term(NumTerm::numeral(4)));
        let con = expand_axiom_schema("con", &binds).unwrap();
        assert!(is_axiom(&con, SystemId::EL0, &prims));

        let mut binds = BTreeMap::new();
        binds.insert("base".to_string(), SchemaBind::Term(NumTerm::Zero));
        binds.insert("step".to_string(), SchemaBind::Fun(FunTerm::FunVar(1)));
        binds.insert("arg".to_string(), SchemaBind::Term(NumTerm::var(2)));
        let rec = expand_axiom_schema("rec", &binds).unwrap();
        assert!(is_axiom(&rec, SystemId::EL0, &prims));
    }
}
