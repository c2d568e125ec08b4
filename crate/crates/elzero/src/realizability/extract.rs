//! Realizer extraction by recursion on affine, free-cut-free derivations,
//! and the strong-realizer pipeline on number-negative problem sequents.
//!
//! The induction maintains three invariants: free variables map to level 0,
//! bound variables to positive levels, and the result is self-contained.
//! Quantifier steps mint code over the current level-0 variables and shift
//! all other nonzero levels up; binary rules scale the left component
//! strictly above the right before taking the union; cuts on induction,
//! choice and Markov instances follow their dedicated constructions.

use super::{
    check_extraction_invariants, check_valid, check_valid_at, complete_valuation,
    standard_suite, EntryPos, RealCfg, RealizeReport, RealizerEntry, RealizerMap,
};
use crate::calculus::{
    check_free_cut_free, check_proof, check_variable_conventions, drop_weakened, hoist_cuts,
    prune_weakened_cuts, trace_up, ProofTree, RuleTag, SystemId, Up, WitnessTerm,
};
use crate::oml::{CodeIndex, CodeStore, Signature, Slot};
use crate::syntax::{
    classify_pi12, formula_vars, is_number_negative, quantifier_occurrences, Formula, Polarity,
    PrimTable, Sequent, Valuation, VarIdx,
};
use crate::transform::sigma_chain;
use crate::truth::{formula_true, Ternary};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("proof rejected by the checker: {0}")]
    NotChecked(String),
    #[error("proof is not free-cut free")]
    NotFreeCutFree,
    #[error("variable conventions violated: {0}")]
    Conventions(String),
    #[error("cut on {0} whose right premise does not end with the principal introduction")]
    NotHoisted(&'static str),
    #[error("unsupported thickened axiom leaf: {0}")]
    SigmaLeaf(String),
    #[error("minting failed: {0}")]
    Mint(#[from] crate::oml::MintError),
    #[error("conclusion is not a number-negative problem sequent")]
    NotNumberNegative,
    #[error("weakening of {0} cannot be dropped from the proof")]
    UndroppableWeakening(String),
    #[error("a binder is shared across antecedent copies; affinize with contraction first")]
    SharedBinder,
    #[error("strong-realizer verification failed: {0}")]
    StrongCheck(String),
    #[error("realizer coverage: {0}")]
    Coverage(#[from] super::CoverageError),
}

/// Extract a realizer from an affine, free-cut-free proof that satisfies
/// the variable conventions.
pub fn extract_realizer(
    p: &ProofTree,
    sys: SystemId,
    store: &mut CodeStore,
    prims: &PrimTable,
) -> Result<RealizerMap, ExtractError> {
    let check = check_proof(p, sys, prims);
    if !check.accepted() {
        return Err(ExtractError::NotChecked(
            check.rejections.first().map(|r| r.to_string()).unwrap_or_default(),
        ));
    }
    if !check_free_cut_free(p, sys, prims) {
        return Err(ExtractError::NotFreeCutFree);
    }
    let conv = check_variable_conventions(p);
    if !conv.ok() {
        return Err(ExtractError::Conventions(
            conv.violations.first().map(|v| v.to_string()).unwrap_or_default(),
        ));
    }
    let r = extract_node(p, sys, store, prims)?;
    debug_assert!(
        check_extraction_invariants(&r, &p.conclusion, store).is_ok(),
        "{:?}",
        check_extraction_invariants(&r, &p.conclusion, store)
    );
    Ok(r)
}

fn zero_sig(r: &RealizerMap) -> Signature {
    Signature {
        fun_vars: r.v.iter().filter(|(_, e)| e.level() == 0).map(|(i, _)| *i).collect(),
        num_vars: r.w.iter().filter(|(_, e)| e.level() == 0).map(|(j, _)| *j).collect(),
    }
}

/// Extend the realizer with level-0 entries for every free variable of the
/// formula and fresh positive Plain levels for its bound variables,
/// monotone by quantifier depth.
fn extend_for_formula(r: &mut RealizerMap, f: &Formula) -> Result<(), ExtractError> {
    let vs = formula_vars(f);
    for i in &vs.free_fun {
        r.v.entry(*i).or_insert(RealizerEntry::Plain(0));
    }
    for j in &vs.free_num {
        r.w.entry(*j).or_insert(RealizerEntry::Plain(0));
    }
    let base = r.max_nonzero_level() + 1;
    for occ in quantifier_occurrences(f) {
        let level = base + occ.path.len() as u64;
        let entry = RealizerEntry::Plain(level);
        if occ.is_fun {
            if r.v.insert(occ.var, entry).map_or(false, |old| old.level() > 0) {
                return Err(ExtractError::SharedBinder);
            }
        } else if r.w.insert(occ.var, entry).map_or(false, |old| old.level() > 0) {
            return Err(ExtractError::SharedBinder);
        }
    }
    // lambda binders are term-internal: they get covering zero entries but
    // never carry levels
    for j in &vs.bound_num {
        r.w.entry(*j).or_insert(RealizerEntry::Plain(0));
    }
    Ok(())
}

fn insert_bound(
    r: &mut RealizerMap,
    pos: EntryPos,
    entry: RealizerEntry,
) -> Result<(), ExtractError> {
    let old = match pos {
        EntryPos::Fun(i) => r.v.insert(i, entry),
        EntryPos::Num(j) => r.w.insert(j, entry),
    };
    if old.map_or(false, |e| e.level() > 0) {
        return Err(ExtractError::SharedBinder);
    }
    Ok(())
}

fn extract_node(
    p: &ProofTree,
    sys: SystemId,
    store: &mut CodeStore,
    prims: &PrimTable,
) -> Result<RealizerMap, ExtractError> {
    match p.rule {
        RuleTag::I => {
            let mut r = RealizerMap::default();
            extend_for_formula(&mut r, &p.conclusion.succedent)?;
            Ok(r)
        }
        RuleTag::AxiomLeaf => extract_leaf(p, sys, store, prims),
        RuleTag::P | RuleTag::AndL | RuleTag::ImpR | RuleTag::BotRule => {
            extract_node(&p.premises[0], sys, store, prims)
        }
        RuleTag::W => {
            let mut r = extract_node(&p.premises[0], sys, store, prims)?;
            let psi = p.conclusion.antecedent.last().expect("weakening principal");
            extend_for_formula(&mut r, psi)?;
            Ok(r)
        }
        RuleTag::C => {
            // contraction never appears in the affine systems this runs on,
            // but extraction itself only needs the premise realizer
            extract_node(&p.premises[0], sys, store, prims)
        }
        RuleTag::AndR | RuleTag::ImpL => {
            let left = extract_node(&p.premises[0], sys, store, prims)?;
            let right = extract_node(&p.premises[1], sys, store, prims)?;
            Ok(union_scaled(left, right))
        }
        RuleTag::ExistsNR | RuleTag::ForallNL => {
            let mut r = extract_node(&p.premises[0], sys, store, prims)?;
            let (u, term) = match (p.rule, &p.conclusion.succedent, p.conclusion.antecedent.last())
            {
                (RuleTag::ExistsNR, Formula::ExistsN(u, _), _) => (*u, &p.witness),
                (RuleTag::ForallNL, _, Some(Formula::ForallN(u, _))) => (*u, &p.witness),
                _ => return Err(ExtractError::NotChecked("malformed quantifier node".into())),
            };
            let Some(WitnessTerm::Num(t)) = term else {
                return Err(ExtractError::NotChecked("missing number witness".into()));
            };
            let e = store.mint_num_term_index(t.clone(), zero_sig(&r))?;
            r.shift_nonzero(1);
            insert_bound(&mut r, EntryPos::Num(u), RealizerEntry::Coded(1, e))?;
            Ok(r)
        }
        RuleTag::ExistsFR | RuleTag::ForallFL => {
            let mut r = extract_node(&p.premises[0], sys, store, prims)?;
            let (u, term) = match (p.rule, &p.conclusion.succedent, p.conclusion.antecedent.last())
            {
                (RuleTag::ExistsFR, Formula::ExistsF(u, _), _) => (*u, &p.witness),
                (RuleTag::ForallFL, _, Some(Formula::ForallF(u, _))) => (*u, &p.witness),
                _ => return Err(ExtractError::NotChecked("malformed quantifier node".into())),
            };
            let Some(WitnessTerm::Fun(t)) = term else {
                return Err(ExtractError::NotChecked("missing function witness".into()));
            };
            let e = store.mint_fun_term_index(t.clone(), zero_sig(&r))?;
            r.shift_nonzero(1);
            insert_bound(&mut r, EntryPos::Fun(u), RealizerEntry::Coded(1, e))?;
            Ok(r)
        }
        RuleTag::ForallNR | RuleTag::ExistsNL => {
            let mut r = extract_node(&p.premises[0], sys, store, prims)?;
            let u = match (p.rule, &p.conclusion.succedent, p.conclusion.antecedent.last()) {
                (RuleTag::ForallNR, Formula::ForallN(u, _), _) => *u,
                (RuleTag::ExistsNL, _, Some(Formula::ExistsN(u, _))) => *u,
                _ => return Err(ExtractError::NotChecked("malformed quantifier node".into())),
            };
            r.shift_nonzero(1);
            insert_bound(&mut r, EntryPos::Num(u), RealizerEntry::Plain(1))?;
            Ok(r)
        }
        RuleTag::ForallFR | RuleTag::ExistsFL => {
            let mut r = extract_node(&p.premises[0], sys, store, prims)?;
            let u = match (p.rule, &p.conclusion.succedent, p.conclusion.antecedent.last()) {
                (RuleTag::ForallFR, Formula::ForallF(u, _), _) => *u,
                (RuleTag::ExistsFL, _, Some(Formula::ExistsF(u, _))) => *u,
                _ => return Err(ExtractError::NotChecked("malformed quantifier node".into())),
            };
            r.shift_nonzero(1);
            insert_bound(&mut r, EntryPos::Fun(u), RealizerEntry::Plain(1))?;
            Ok(r)
        }
        RuleTag::Cut => extract_cut(p, sys, store, prims),
    }
}

/// Union with the left component's nonzero levels scaled strictly above the
/// right's (the minimal admissible shift).
fn union_scaled(mut left: RealizerMap, right: RealizerMap) -> RealizerMap {
    let shift = right.max_nonzero_level();
    left.shift_nonzero(shift);
    let mut out = right;
    for (i, e) in left.v {
        out.v.entry(i).or_insert(e);
    }
    for (j, e) in left.w {
        out.w.entry(j).or_insert(e);
    }
    out
}

// --- axiom leaves ------------------------------------------------------------

fn extract_leaf(
    p: &ProofTree,
    _sys: SystemId,
    store: &mut CodeStore,
    prims: &PrimTable,
) -> Result<RealizerMap, ExtractError> {
    let phi = &p.conclusion.succedent;
    let mut r = RealizerMap::default();
    if phi.is_quantifier_free() {
        extend_for_formula(&mut r, phi)?;
        return Ok(r);
    }
    // quantified leaves: induction, choice, markov, or thickenings thereof
    let base = match &p.leaf {
        Some(crate::calculus::LeafKind::Sigma { base }) => base.clone(),
        _ => phi.clone(),
    };
    // free parameters first
    let vs = formula_vars(phi);
    for i in &vs.free_fun {
        r.v.insert(*i, RealizerEntry::Plain(0));
    }
    for j in &vs.free_num {
        r.w.insert(*j, RealizerEntry::Plain(0));
    }

    if let Some((c, d, _i, _b, psi)) = crate::calculus::axioms::is_qf_ac(&base) {
        // the choice functional: on an input, the least witness of the
        // matrix
        let psi_vars = formula_vars(&psi);
        let sig = Signature {
            fun_vars: psi_vars.free_fun.iter().copied().collect(),
            num_vars: psi_vars.free_num.iter().filter(|j| **j != c && **j != d).copied().collect(),
        };
        let e_mu = store.mint_mu_index(&psi, sig, d, Some(c), prims)?;
        assign_choice_levels(&mut r, phi, e_mu)?;
        return Ok(r);
    }
    if crate::calculus::axioms::is_qf_ia(&base).is_some() {
        for occ in quantifier_occurrences(phi) {
            let level = match occ.polarity {
                Polarity::Negative => 1,
                Polarity::Positive => 2,
            };
            insert_bound(
                &mut r,
                if occ.is_fun { EntryPos::Fun(occ.var) } else { EntryPos::Num(occ.var) },
                RealizerEntry::Plain(level),
            )?;
        }
        return Ok(r);
    }
    if let Some((b, _c, psi)) = crate::calculus::axioms::is_mp(&base) {
        let psi_vars = formula_vars(&psi);
        let sig = Signature {
            fun_vars: psi_vars.free_fun.iter().copied().collect(),
            num_vars: psi_vars.free_num.iter().filter(|j| **j != b).copied().collect(),
        };
        let e_mu = store.mint_mu_index(&psi, sig, b, None, prims)?;
        for occ in quantifier_occurrences(phi) {
            let entry = match occ.polarity {
                Polarity::Negative => RealizerEntry::Plain(2),
                Polarity::Positive => RealizerEntry::Coded(1, e_mu),
            };
            insert_bound(
                &mut r,
                if occ.is_fun { EntryPos::Fun(occ.var) } else { EntryPos::Num(occ.var) },
                entry,
            )?;
        }
        return Ok(r);
    }
    Err(ExtractError::SigmaLeaf(format!("no leaf construction for {:?}", p.leaf)))
}

/// The choice-axiom level pattern: hypothesis-side universal at 3 with its
/// existential at 4, solution-side universal at 2, and the choice variable
/// computed at level 1.
fn assign_choice_levels(
    r: &mut RealizerMap,
    phi: &Formula,
    e_mu: CodeIndex,
) -> Result<(), ExtractError> {
    for occ in quantifier_occurrences(phi) {
        let pos = if occ.is_fun { EntryPos::Fun(occ.var) } else { EntryPos::Num(occ.var) };
        let entry = if occ.is_fun {
            if occ.universal || occ.polarity == Polarity::Negative {
                return Err(ExtractError::SigmaLeaf(
                    "unexpected function quantifier in a choice instance".into(),
                ));
            }
            RealizerEntry::Coded(1, e_mu)
        } else {
            match (occ.universal, occ.polarity) {
                (true, Polarity::Negative) => RealizerEntry::Plain(3),
                (false, Polarity::Negative) => RealizerEntry::Plain(4),
                (true, Polarity::Positive) => RealizerEntry::Plain(2),
                (false, Polarity::Positive) => {
                    return Err(ExtractError::SigmaLeaf(
                        "unexpected positive number existential in a choice instance".into(),
                    ))
                }
            }
        };
        insert_bound(r, pos, entry)?;
    }
    Ok(())
}

// --- cuts ---------------------------------------------------------------------

enum CutKind {
    Induction,
    Choice(VarIdx, VarIdx, VarIdx, VarIdx, Formula),
    Markov(VarIdx, VarIdx, Formula),
    Other,
}

fn classify_cut(chi: &Formula, sys: SystemId, prims: &PrimTable) -> Option<CutKind> {
    // prefer the formula's own shape (a renamed instance is still an
    // instance); fall back to its collapse base for thickened cuts
    if let Some((c, d, i, b, psi)) = crate::calculus::axioms::is_qf_ac(chi) {
        return Some(CutKind::Choice(c, d, i, b, psi));
    }
    if let Some((b, c, psi)) = crate::calculus::axioms::is_mp(chi) {
        return Some(CutKind::Markov(b, c, psi));
    }
    if crate::calculus::axioms::is_qf_ia(chi).is_some() {
        return Some(CutKind::Induction);
    }
    let (base, _) = sigma_chain(chi, sys, prims)?;
    if crate::calculus::axioms::is_qf_ac(&base).is_some() {
        // a thickened choice cut: the hoisted shape still pivots on the
        // formula's own parts, which no longer match the schema
        return None;
    }
    if crate::calculus::axioms::is_mp(&base).is_some() {
        return None;
    }
    if crate::calculus::axioms::is_qf_ia(&base).is_some() {
        return Some(CutKind::Induction);
    }
    Some(CutKind::Other)
}

fn extract_cut(
    p: &ProofTree,
    sys: SystemId,
    store: &mut CodeStore,
    prims: &PrimTable,
) -> Result<RealizerMap, ExtractError> {
    let right = &p.premises[1];
    let chi = right
        .conclusion
        .antecedent
        .last()
        .ok_or_else(|| ExtractError::NotChecked("cut without cut formula".into()))?
        .clone();
    let kind = classify_cut(&chi, sys, prims).ok_or(ExtractError::NotHoisted("a thickened cut"))?;
    match kind {
        CutKind::Other => {
            // axioms without bound variables: the right realizer passes
            // through; left-context variables extend weakening-style
            let mut r = extract_node(right, sys, store, prims)?;
            strip_consumed(&mut r, &p.conclusion);
            for f in &p.premises[0].conclusion.antecedent {
                extend_for_formula(&mut r, f)?;
            }
            Ok(r)
        }
        CutKind::Induction => {
            let mut r = extract_node(right, sys, store, prims)?;
            // zero out the induction instance's bound variables
            for occ in quantifier_occurrences(&chi) {
                let pos = if occ.is_fun { EntryPos::Fun(occ.var) } else { EntryPos::Num(occ.var) };
                match pos {
                    EntryPos::Fun(i) => {
                        r.v.insert(i, RealizerEntry::Plain(0));
                    }
                    EntryPos::Num(j) => {
                        r.w.insert(j, RealizerEntry::Plain(0));
                    }
                }
            }
            strip_consumed(&mut r, &p.conclusion);
            for f in &p.premises[0].conclusion.antecedent {
                extend_for_formula(&mut r, f)?;
            }
            Ok(r)
        }
        CutKind::Choice(c, d, i, _b, psi) => {
            let (r2, consumed_eigen) = hoisted_right_parts(right)?;
            let mut r = extract_node(r2, sys, store, prims)?;
            let psi_vars = formula_vars(&psi);
            let sig = Signature {
                fun_vars: psi_vars.free_fun.iter().copied().collect(),
                num_vars: psi_vars
                    .free_num
                    .iter()
                    .filter(|j| **j != c && **j != d)
                    .copied()
                    .collect(),
            };
            let e_mu = store.mint_mu_index(&psi, sig, d, Some(c), prims)?;
            rewire_referencing(&mut r, store, EntryPos::Fun(consumed_eigen), e_mu)?;
            // the consumed positions drop to zero
            r.v.insert(i, RealizerEntry::Plain(0));
            r.v.insert(consumed_eigen, RealizerEntry::Plain(0));
            zero_bound_inside(&mut r, &chi);
            strip_consumed(&mut r, &p.conclusion);
            for f in hoisted_extra_context(p) {
                extend_for_formula(&mut r, &f)?;
            }
            Ok(r)
        }
        CutKind::Markov(_b, c, psi) => {
            let (r2, consumed_eigen) = hoisted_right_parts(right)?;
            let mut r = extract_node(r2, sys, store, prims)?;
            let psi_vars = formula_vars(&psi);
            let sig = Signature {
                fun_vars: psi_vars.free_fun.iter().copied().collect(),
                num_vars: psi_vars.free_num.iter().filter(|j| **j != _b).copied().collect(),
            };
            let e_mu = store.mint_mu_index(&psi, sig, _b, None, prims)?;
            rewire_referencing(&mut r, store, EntryPos::Num(consumed_eigen), e_mu)?;
            r.w.insert(c, RealizerEntry::Plain(0));
            r.w.insert(consumed_eigen, RealizerEntry::Plain(0));
            zero_bound_inside(&mut r, &chi);
            strip_consumed(&mut r, &p.conclusion);
            for f in hoisted_extra_context(p) {
                extend_for_formula(&mut r, &f)?;
            }
            Ok(r)
        }
    }
}

/// For a cut on a choice or Markov instance, the right premise must end in
/// the implication-left step with the cut formula principal; its solution
/// part must be consumed above by the matching existential-left step, whose
/// eigenvariable is the handle the cut construction rewires.
fn hoisted_right_parts(right: &ProofTree) -> Result<(&ProofTree, VarIdx), ExtractError> {
    if right.rule != RuleTag::ImpL {
        return Err(ExtractError::NotHoisted("choice or Markov instance"));
    }
    let r2 = &right.premises[1];
    // trace the consequent part upward to its introduction
    let mut node = r2;
    let mut pos = r2
        .conclusion
        .antecedent
        .len()
        .checked_sub(1)
        .ok_or(ExtractError::NotHoisted("missing consequent"))?;
    loop {
        match trace_up(node, pos).map_err(|_| ExtractError::NotHoisted("trace"))? {
            Up::Context(k, q) => {
                node = &node.premises[k];
                pos = q;
            }
            Up::Principal => {
                return match node.rule {
                    RuleTag::ExistsFL | RuleTag::ExistsNL => Ok((
                        r2,
                        node.eigen.ok_or(ExtractError::NotHoisted("missing eigenvariable"))?,
                    )),
                    _ => Err(ExtractError::NotHoisted("solution part not eliminated")),
                };
            }
        }
    }
}

/// Left context of the cut plus the hypothesis-side context of the final
/// implication step: their variables only need consistent fresh entries.
fn hoisted_extra_context(p: &ProofTree) -> Vec<Formula> {
    let mut out = p.premises[0].conclusion.antecedent.clone();
    if p.premises[1].rule == RuleTag::ImpL {
        out.extend(p.premises[1].premises[0].conclusion.antecedent.iter().cloned());
    }
    out
}

/// Replace, in every coded entry whose code consumes `target`, that
/// argument slot by the computed index (lazily).
fn rewire_referencing(
    r: &mut RealizerMap,
    store: &mut CodeStore,
    target: EntryPos,
    replacement: CodeIndex,
) -> Result<(), ExtractError> {
    let positions: Vec<(EntryPos, u64, CodeIndex)> = r
        .positions()
        .filter_map(|(pos, e)| match e {
            RealizerEntry::Coded(k, idx) => Some((pos, k, idx)),
            RealizerEntry::Plain(_) => None,
        })
        .collect();
    for (pos, k, idx) in positions {
        let Some(sig) = store.signature(idx) else { continue };
        let slot = match target {
            EntryPos::Fun(i) => sig.fun_pos(i).map(Slot::Fun),
            EntryPos::Num(j) => sig.num_pos(j).map(Slot::Num),
        };
        let Some(slot) = slot else { continue };
        let new_idx = store.mint_substituted_index(idx, slot, replacement)?;
        match pos {
            EntryPos::Fun(i) => {
                r.v.insert(i, RealizerEntry::Coded(k, new_idx));
            }
            EntryPos::Num(j) => {
                r.w.insert(j, RealizerEntry::Coded(k, new_idx));
            }
        }
    }
    Ok(())
}

/// Bound variables of the cut formula vanish with it.
fn zero_bound_inside(r: &mut RealizerMap, chi: &Formula) {
    for occ in quantifier_occurrences(chi) {
        if occ.is_fun {
            r.v.insert(occ.var, RealizerEntry::Plain(0));
        } else {
            r.w.insert(occ.var, RealizerEntry::Plain(0));
        }
    }
}

/// Drop nonzero entries for variables that no longer occur in the sequent
/// at all (consumed by the cut); keep level-0 remnants for eigenvariables
/// and other vanished free variables so earlier code keeps its arguments.
fn strip_consumed(r: &mut RealizerMap, concl: &Sequent) {
    let mut present = BTreeSet::new();
    for f in concl.formulas() {
        let vs = formula_vars(f);
        present.extend(vs.free_fun.iter().map(|i| EntryPos::Fun(*i)));
        present.extend(vs.bound_fun.iter().map(|i| EntryPos::Fun(*i)));
        present.extend(vs.free_num.iter().map(|j| EntryPos::Num(*j)));
        present.extend(vs.bound_num.iter().map(|j| EntryPos::Num(*j)));
    }
    let to_zero: Vec<EntryPos> = r
        .positions()
        .filter(|(pos, e)| e.level() > 0 && !present.contains(pos))
        .map(|(pos, _)| pos)
        .collect();
    for pos in to_zero {
        match pos {
            EntryPos::Fun(i) => {
                r.v.insert(i, RealizerEntry::Plain(0));
            }
            EntryPos::Num(j) => {
                r.w.insert(j, RealizerEntry::Plain(0));
            }
        }
    }
}

// --- strong realizers ----------------------------------------------------------

#[derive(Debug, Clone)]
pub struct StageInfo {
    /// Antecedent position in the normalized proof's conclusion.
    pub position: usize,
    /// The instance-side function variable of the stage's problem formula.
    pub universal: VarIdx,
    /// The solution-side function variable.
    pub existential: VarIdx,
}

#[derive(Debug)]
pub struct StrongRealizer {
    pub realizer: RealizerMap,
    /// The normalized proof actually extracted from (hoisted, pruned, with
    /// undroppable weakenings removed).
    pub proof: ProofTree,
    /// Antecedent stages ordered by the level of their instance variables.
    pub stages: Vec<StageInfo>,
    /// Instance and solution variables of the succedent problem.
    pub concl_universal: VarIdx,
    pub concl_existential: VarIdx,
    pub report: RealizeReport,
}

/// Extraction plus the staged verification of the strong-realizer
/// conditions over a generated valuation suite. Additional valuations (for
/// instance-conditioned suites) may be supplied.
pub fn extract_strong_realizer(
    p: &ProofTree,
    sys: SystemId,
    store: &mut CodeStore,
    prims: &PrimTable,
    bound: u64,
    fuel: u64,
    suite_seed: u64,
    suite_len: usize,
    extra_suite: &[Valuation],
) -> Result<StrongRealizer, ExtractError> {
    if is_number_negative(&p.conclusion) != Ok(true) {
        return Err(ExtractError::NotNumberNegative);
    }
    // normalize: hoist cuts, prune weakly-introduced ones, and drop
    // weakenings whose formulas are not subformulas of solution statements
    let hoisted = hoist_cuts(p);
    if !hoisted.irreducible.is_empty() {
        return Err(ExtractError::NotHoisted("irreducible cut configuration"));
    }
    let mut proof = prune_weakened_cuts(&hoisted.proof);
    loop {
        let Some(w_path) = find_offending_weakening(&proof) else { break };
        let formula = proof
            .get(&w_path)
            .and_then(|n| n.conclusion.antecedent.last())
            .cloned()
            .unwrap_or(Formula::Bot);
        proof = drop_weakened(&proof, &w_path).map_err(|_| {
            ExtractError::UndroppableWeakening(format!("{formula:?}"))
        })?;
    }

    let realizer = extract_realizer(&proof, sys, store, prims)?;

    // stage layout from the conclusion
    let concl = classify_pi12(&proof.conclusion.succedent).ok_or(ExtractError::NotNumberNegative)?;
    let mut stages = Vec::new();
    for (position, f) in proof.conclusion.antecedent.iter().enumerate() {
        let parts = classify_pi12(f).ok_or(ExtractError::NotNumberNegative)?;
        stages.push(StageInfo { position, universal: parts.alpha, existential: parts.beta });
    }
    stages.sort_by_key(|s| {
        realizer.v.get(&s.universal).map(RealizerEntry::level).unwrap_or(u64::MAX)
    });

    let cfg = RealCfg::new(store, prims, bound, fuel);
    let report = verify_strong(
        &realizer,
        &proof,
        &stages,
        concl.alpha,
        concl.beta,
        &cfg,
        suite_seed,
        suite_len,
        extra_suite,
    )?;
    if report.verdict.is_fails() {
        return Err(ExtractError::StrongCheck(format!(
            "counterexample: {:?}",
            report.counterexample
        )));
    }
    Ok(StrongRealizer {
        realizer,
        proof,
        stages,
        concl_universal: concl.alpha,
        concl_existential: concl.beta,
        report,
    })
}

/// A weakening whose principal is not a subformula of any
/// function-existential formula (with arithmetical body) occurring in the
/// proof.
fn find_offending_weakening(p: &ProofTree) -> Option<Vec<u16>> {
    let mut roots = Vec::new();
    p.visit(&mut |n, _| {
        for f in n.conclusion.formulas() {
            collect_exists_alpha(f, &mut roots);
        }
    });
    let mut found = None;
    p.visit(&mut |n, path| {
        if found.is_some() || n.rule != RuleTag::W {
            return;
        }
        let Some(psi) = n.conclusion.antecedent.last() else { return };
        let ok = roots.iter().any(|root| is_subformula(psi, root));
        if !ok {
            found = Some(path.clone());
        }
    });
    found
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

#[allow(clippy::too_many_arguments)]
fn verify_strong(
    r: &RealizerMap,
    proof: &ProofTree,
    stages: &[StageInfo],
    concl_u: VarIdx,
    concl_e: VarIdx,
    cfg: &RealCfg,
    suite_seed: u64,
    suite_len: usize,
    extra_suite: &[Valuation],
) -> Result<RealizeReport, ExtractError> {
    let fails = || {
        Ok(RealizeReport {
            verdict: Ternary::Fails,
            counterexample: None,
            vacuous: false,
            trials: 0,
            unknowns: 0,
        })
    };
    let level = |var: VarIdx| r.v.get(&var).map(RealizerEntry::level).unwrap_or(0);

    // the ordering chain of instance variables
    for pair in stages.windows(2) {
        if level(pair[0].universal) >= level(pair[1].universal) {
            return fails();
        }
    }
    // level separation: problem-level function variables sit strictly below
    // every nonzero number level
    let mut skeleton_vars: Vec<VarIdx> = vec![concl_u, concl_e];
    for s in stages {
        skeleton_vars.push(s.universal);
        skeleton_vars.push(s.existential);
    }
    let min_nonzero_w = r
        .w
        .values()
        .map(RealizerEntry::level)
        .filter(|k| *k > 0)
        .min()
        .unwrap_or(u64::MAX);
    for var in &skeleton_vars {
        if level(*var) >= min_nonzero_w {
            return fails();
        }
    }

    // the plain realizability falsifier
    let mut suite = standard_suite(r, cfg.truth.bound, suite_seed, suite_len);
    suite.extend(extra_suite.iter().cloned());
    let base_report = super::check_realizes(r, &proof.conclusion, &suite, cfg)?;
    if base_report.verdict.is_fails() {
        return Ok(base_report);
    }

    // staged truth and strong-validity conditions
    let concl_parts =
        classify_pi12(&proof.conclusion.succedent).ok_or(ExtractError::NotNumberNegative)?;
    let stage_parts: Vec<_> = stages
        .iter()
        .map(|s| classify_pi12(&proof.conclusion.antecedent[s.position]).expect("stage shape"))
        .collect();
    let table_len = (cfg.truth.bound + 1) as usize + 8;
    let mut unknowns = base_report.unknowns;
    for sigma in &suite {
        let completed = complete_valuation(r, cfg.store, sigma, cfg.fuel, table_len, cfg.prims);
        match check_valid(r, cfg.store, &completed, cfg.fuel, cfg.prims)? {
            Ternary::Fails => continue,
            Ternary::Unknown(_) => {
                unknowns += 1;
                continue;
            }
            Ternary::Holds => {}
        }
        let truth_of = |f: &Formula, sigma: &Valuation| -> Result<bool, ExtractError> {
            formula_true(f, sigma, &cfg.truth, cfg.prims).map_err(|e| match e {
                crate::syntax::EvalError::UnboundFun(i) => {
                    ExtractError::Coverage(super::CoverageError::MissingFun(i))
                }
                crate::syntax::EvalError::UnboundNum(j) => {
                    ExtractError::Coverage(super::CoverageError::MissingNum(j))
                }
                crate::syntax::EvalError::Arity(_, _, _) => {
                    ExtractError::StrongCheck("arity during truth".into())
                }
            })
        };
        // the instance condition of the conclusion problem
        if !truth_of(&concl_parts.xi, &completed)? {
            continue; // hypothesis of every staged condition
        }
        for (idx, stage) in stages.iter().enumerate() {
            // psi_j for j < idx must hold
            let mut hyps = true;
            for parts in stage_parts.iter().take(idx) {
                if !truth_of(&parts.psi, &completed)? {
                    hyps = false;
                    break;
                }
            }
            if !hyps {
                break;
            }
            // then xi_idx holds and the stage's instance entry is strongly
            // valid
            if !truth_of(&stage_parts[idx].xi, &completed)? {
                return Ok(RealizeReport {
                    verdict: Ternary::Fails,
                    counterexample: Some(completed.clone()),
                    vacuous: false,
                    trials: suite.len(),
                    unknowns,
                });
            }
            match check_valid_at(
                r,
                cfg.store,
                &completed,
                EntryPos::Fun(stage.universal),
                true,
                cfg.fuel,
                cfg.prims,
            )? {
                Ternary::Holds => {}
                Ternary::Fails => {
                    return Ok(RealizeReport {
                        verdict: Ternary::Fails,
                        counterexample: Some(completed.clone()),
                        vacuous: false,
                        trials: suite.len(),
                        unknowns,
                    });
                }
                Ternary::Unknown(_) => unknowns += 1,
            }
        }
        // final condition: all solutions true gives a strongly valid
        // conclusion solution entry
        let all_psi = stage_parts
            .iter()
            .map(|parts| truth_of(&parts.psi, &completed))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .all(|b| b);
        if all_psi {
            match check_valid_at(
                r,
                cfg.store,
                &completed,
                EntryPos::Fun(concl_e),
                true,
                cfg.fuel,
                cfg.prims,
            )? {
                Ternary::Holds => {}
                Ternary::Fails => {
                    return Ok(RealizeReport {
                        verdict: Ternary::Fails,
                        counterexample: Some(completed),
                        vacuous: false,
                        trials: suite.len(),
                        unknowns,
                    });
                }
                Ternary::Unknown(_) => unknowns += 1,
            }
        }
    }
    Ok(RealizeReport {
        verdict: if unknowns > 0 {
            Ternary::Unknown(crate::truth::UnknownReason::BoundExhausted)
        } else {
            Ternary::Holds
        },
        counterexample: None,
        vacuous: suite.is_empty(),
        trials: suite.len(),
        unknowns,
    })
}
