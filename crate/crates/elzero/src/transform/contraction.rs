//! Contraction similarity: `phi` is contraction-similar to `psi` when it is
//! reachable from `psi` by repeatedly replacing a subformula `chi` with
//! `chi and chi`. Detection runs the search in the shrinking direction,
//! collapsing `chi and chi` back to `chi`; every collapse strictly reduces
//! the size, so the search terminates.
//!
//! Renaming of bound variables (which affinization must perform when it
//! duplicates antecedent copies) is absorbed by comparing end points up to
//! a consistent renaming of binders; the chain records the alpha-variant of
//! the target it actually reached.

use crate::calculus::SystemId;
use crate::syntax::{Formula, FunTerm, NumTerm, Path, PrimTable, VarIdx};
use std::collections::BTreeSet;

/// One thickening step: at `path`, the subformula `chi` was replaced by
/// `chi and chi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityStep {
    pub path: Path,
    pub chi: Formula,
}

/// A witness that some formula is contraction-similar to `base`: replaying
/// the steps from `base` reproduces it exactly. `base` is an alpha-variant
/// of the comparison target (equal to it when no renaming was involved).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityChain {
    pub base: Formula,
    pub steps: Vec<SimilarityStep>,
}

impl SimilarityChain {
    pub fn reflexive(base: Formula) -> SimilarityChain {
        SimilarityChain { base, steps: Vec::new() }
    }

    /// Apply the recorded steps starting from `base`.
    pub fn replay(&self) -> Option<Formula> {
        let mut cur = self.base.clone();
        for step in &self.steps {
            let target = subformula_at(&cur, &step.path)?;
            if target != &step.chi {
                return None;
            }
            let thick = Formula::and(step.chi.clone(), step.chi.clone());
            cur = replace_at(&cur, &step.path, thick)?;
        }
        Some(cur)
    }
}

pub fn subformula_at<'a>(f: &'a Formula, path: &[u8]) -> Option<&'a Formula> {
    let mut cur = f;
    for &step in path {
        cur = match (cur, step) {
            (Formula::And(l, _), 0) | (Formula::Imp(l, _), 0) => l,
            (Formula::And(_, r), 1) | (Formula::Imp(_, r), 1) => r,
            (
                Formula::ExistsN(_, g)
                | Formula::ForallN(_, g)
                | Formula::ExistsF(_, g)
                | Formula::ForallF(_, g),
                0,
            ) => g,
            _ => return None,
        };
    }
    Some(cur)
}

pub fn replace_at(f: &Formula, path: &[u8], replacement: Formula) -> Option<Formula> {
    if path.is_empty() {
        return Some(replacement);
    }
    let step = path[0];
    let rest = &path[1..];
    Some(match (f, step) {
        (Formula::And(l, r), 0) => Formula::and(replace_at(l, rest, replacement)?, (**r).clone()),
        (Formula::And(l, r), 1) => Formula::and((**l).clone(), replace_at(r, rest, replacement)?),
        (Formula::Imp(l, r), 0) => Formula::imp(replace_at(l, rest, replacement)?, (**r).clone()),
        (Formula::Imp(l, r), 1) => Formula::imp((**l).clone(), replace_at(r, rest, replacement)?),
        (Formula::ExistsN(v, g), 0) => Formula::exists_n(*v, replace_at(g, rest, replacement)?),
        (Formula::ForallN(v, g), 0) => Formula::forall_n(*v, replace_at(g, rest, replacement)?),
        (Formula::ExistsF(v, g), 0) => Formula::exists_f(*v, replace_at(g, rest, replacement)?),
        (Formula::ForallF(v, g), 0) => Formula::forall_f(*v, replace_at(g, rest, replacement)?),
        _ => return None,
    })
}

/// Alpha-equivalence on formulas: bound variables (quantifier and lambda
/// binders) may be renamed, with each binder matched positionally under
/// scoping; free variables must agree exactly.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    alpha_eq_f(a, b, &mut Vec::new())
}

/// Innermost-first stack of matched binder pairs: (sort, source, target).
type Frames = Vec<(bool, VarIdx, VarIdx)>;

fn var_matches(frames: &Frames, is_fun: bool, x: VarIdx, y: VarIdx) -> bool {
    for &(sf, src, tgt) in frames.iter().rev() {
        if sf == is_fun {
            if src == x {
                return tgt == y;
            }
            if tgt == y {
                return false; // y is bound here but x is not its source
            }
        }
    }
    x == y // both free
}

fn alpha_eq_f(a: &Formula, b: &Formula, frames: &mut Frames) -> bool {
    match (a, b) {
        (Formula::Bot, Formula::Bot) => true,
        (Formula::Eq(l1, r1), Formula::Eq(l2, r2)) => {
            alpha_eq_nt(l1, l2, frames) && alpha_eq_nt(r1, r2, frames)
        }
        (Formula::And(l1, r1), Formula::And(l2, r2))
        | (Formula::Imp(l1, r1), Formula::Imp(l2, r2)) => {
            alpha_eq_f(l1, l2, frames) && alpha_eq_f(r1, r2, frames)
        }
        (Formula::ExistsN(v1, g1), Formula::ExistsN(v2, g2))
        | (Formula::ForallN(v1, g1), Formula::ForallN(v2, g2)) => {
            frames.push((false, *v1, *v2));
            let ok = alpha_eq_f(g1, g2, frames);
            frames.pop();
            ok
        }
        (Formula::ExistsF(v1, g1), Formula::ExistsF(v2, g2))
        | (Formula::ForallF(v1, g1), Formula::ForallF(v2, g2)) => {
            frames.push((true, *v1, *v2));
            let ok = alpha_eq_f(g1, g2, frames);
            frames.pop();
            ok
        }
        _ => false,
    }
}

fn alpha_eq_nt(a: &NumTerm, b: &NumTerm, frames: &mut Frames) -> bool {
    match (a, b) {
        (NumTerm::NumVar(x), NumTerm::NumVar(y)) => var_matches(frames, false, *x, *y),
        (NumTerm::Zero, NumTerm::Zero) => true,
        (NumTerm::Succ(x), NumTerm::Succ(y)) => alpha_eq_nt(x, y, frames),
        (NumTerm::PrimApp(f, xs), NumTerm::PrimApp(g, ys)) => {
            f == g
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(x, y)| alpha_eq_nt(x, y, frames))
        }
        (NumTerm::FunApp(t1, x), NumTerm::FunApp(t2, y)) => {
            alpha_eq_ft(t1, t2, frames) && alpha_eq_nt(x, y, frames)
        }
        _ => false,
    }
}

fn alpha_eq_ft(a: &FunTerm, b: &FunTerm, frames: &mut Frames) -> bool {
    match (a, b) {
        (FunTerm::FunVar(x), FunTerm::FunVar(y)) => var_matches(frames, true, *x, *y),
        (FunTerm::Lambda(j, x), FunTerm::Lambda(k, y)) => {
            frames.push((false, *j, *k));
            let ok = alpha_eq_nt(x, y, frames);
            frames.pop();
            ok
        }
        (FunTerm::Rec(x, t1), FunTerm::Rec(y, t2)) => {
            alpha_eq_nt(x, y, frames) && alpha_eq_ft(t1, t2, frames)
        }
        _ => false,
    }
}

/// Search for a chain witnessing that `phi` is contraction-similar to
/// `psi`: collapse `chi and chi` occurrences of `phi` until an alpha-variant
/// of `psi` appears. Returns the chain (steps replay from the reached
/// variant up to `phi`), or None.
pub fn contraction_similar(phi: &Formula, psi: &Formula) -> Option<SimilarityChain> {
    contraction_similar_by(phi, &mut |cand| {
        if alpha_eq(cand, psi) {
            Some(())
        } else {
            None
        }
    })
    .map(|(chain, ())| chain)
}

/// Generic shrinking search: collapse duplicated conjunctions in `phi`
/// until `accept` recognizes a result. Depth-first over collapse sites;
/// each collapse strictly shrinks the formula.
pub fn contraction_similar_by<T>(
    phi: &Formula,
    accept: &mut impl FnMut(&Formula) -> Option<T>,
) -> Option<(SimilarityChain, T)> {
    let mut seen = BTreeSet::new();
    // steps come back deepest-first, which is exactly replay order: the
    // collapse found deepest corresponds to the earliest thickening
    search(phi, accept, &mut seen).map(|(steps, base, t)| (SimilarityChain { base, steps }, t))
}

fn search<T>(
    cur: &Formula,
    accept: &mut impl FnMut(&Formula) -> Option<T>,
    seen: &mut BTreeSet<Formula>,
) -> Option<(Vec<SimilarityStep>, Formula, T)> {
    if let Some(t) = accept(cur) {
        return Some((Vec::new(), cur.clone(), t));
    }
    if !seen.insert(cur.clone()) {
        return None;
    }
    for (path, chi) in collapse_sites(cur) {
        let collapsed = replace_at(cur, &path, chi.clone()).expect("collapse site path is valid");
        if let Some((mut steps, base, t)) = search(&collapsed, accept, seen) {
            steps.push(SimilarityStep { path, chi });
            return Some((steps, base, t));
        }
    }
    None
}

/// Every position holding `chi and chi`, with the collapsed `chi`.
fn collapse_sites(f: &Formula) -> Vec<(Path, Formula)> {
    let mut out = Vec::new();
    fn walk(f: &Formula, path: &mut Path, out: &mut Vec<(Path, Formula)>) {
        if let Formula::And(l, r) = f {
            if l == r {
                out.push((path.clone(), (**l).clone()));
            }
        }
        let children = match f {
            Formula::Eq(_, _) | Formula::Bot => vec![],
            Formula::And(l, r) | Formula::Imp(l, r) => vec![(0u8, l), (1u8, r)],
            Formula::ExistsN(_, g)
            | Formula::ForallN(_, g)
            | Formula::ExistsF(_, g)
            | Formula::ForallF(_, g) => vec![(0u8, g)],
        };
        for (step, child) in children {
            path.push(step);
            walk(child, path, out);
            path.pop();
        }
    }
    walk(f, &mut Vec::new(), &mut out);
    out
}

/// Membership in Sigma: contraction-similar to some axiom of the system.
/// Returns the base axiom reached and the chain to it.
pub fn sigma_chain(
    phi: &Formula,
    sys: SystemId,
    prims: &PrimTable,
) -> Option<(Formula, SimilarityChain)> {
    contraction_similar_by(phi, &mut |cand| {
        if crate::calculus::is_axiom(cand, sys, prims) {
            Some(cand.clone())
        } else {
            None
        }
    })
    .map(|(chain, base)| (base, chain))
}
