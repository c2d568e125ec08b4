//! Realizers `(v, w)`: finite maps from function and number variable
//! indices to levels or (level, code) pairs. A Coded entry claims the
//! variable's value is computed by earlier code from strictly-lower-level
//! variables; validity, self-containedness, monotonicity/universality and
//! the positive/negative realizability clauses check that claim over
//! sampled valuations. All checks are falsifiers at desk scale, never
//! proofs.

mod extract;
mod serial;

pub use extract::{extract_realizer, extract_strong_realizer, ExtractError, StageInfo, StrongRealizer};
pub use serial::{parse_realizer, realizer_sexp};

use crate::oml::{CodeIndex, CodeStore, OmlProgram, Outcome, Signature, Slot};
use crate::syntax::{
    formula_vars, quantifier_occurrences, FiniteFn, Formula, Polarity, PrimTable, Sequent,
    Valuation, VarIdx,
};
use crate::truth::{closure_true, formula_true, Ternary, TruthCfg, UnknownReason};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealizerEntry {
    Plain(u64),
    Coded(u64, CodeIndex),
}

impl RealizerEntry {
    /// The level projection (the first coordinate for coded entries).
    pub fn level(&self) -> u64 {
        match self {
            RealizerEntry::Plain(k) | RealizerEntry::Coded(k, _) => *k,
        }
    }

    pub fn code(&self) -> Option<CodeIndex> {
        match self {
            RealizerEntry::Coded(_, e) => Some(*e),
            RealizerEntry::Plain(_) => None,
        }
    }
}

/// The pair (v, w): v maps function variables, w number variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RealizerMap {
    pub v: BTreeMap<VarIdx, RealizerEntry>,
    pub w: BTreeMap<VarIdx, RealizerEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EntryPos {
    Fun(VarIdx),
    Num(VarIdx),
}

impl RealizerMap {
    pub fn entry(&self, pos: EntryPos) -> Option<RealizerEntry> {
        match pos {
            EntryPos::Fun(i) => self.v.get(&i).copied(),
            EntryPos::Num(j) => self.w.get(&j).copied(),
        }
    }

    pub fn positions(&self) -> impl Iterator<Item = (EntryPos, RealizerEntry)> + '_ {
        self.v
            .iter()
            .map(|(i, e)| (EntryPos::Fun(*i), *e))
            .chain(self.w.iter().map(|(j, e)| (EntryPos::Num(*j), *e)))
    }

    pub fn max_nonzero_level(&self) -> u64 {
        self.positions().map(|(_, e)| e.level()).max().unwrap_or(0)
    }

    /// Shift every nonzero level up by `by`.
    pub fn shift_nonzero(&mut self, by: u64) {
        let bump = |e: &mut RealizerEntry| match e {
            RealizerEntry::Plain(k) if *k > 0 => *k += by,
            RealizerEntry::Coded(k, _) => *k += by,
            _ => {}
        };
        self.v.values_mut().for_each(bump);
        self.w.values_mut().for_each(bump);
    }
}

#[derive(Debug, Error)]
pub enum CoverageError {
    #[error("valuation does not assign function variable a{0}")]
    MissingFun(VarIdx),
    #[error("valuation does not assign number variable x{0}")]
    MissingNum(VarIdx),
    #[error("realizer has no entry at {0:?}")]
    MissingEntry(EntryPos),
}

/// How many points beyond a table's own domain to probe when comparing a
/// computed function against a table.
const EXTRA_PROBES: u64 = 8;

fn call_args<'a>(
    sig: &Signature,
    sigma: &'a Valuation,
) -> Result<(Vec<&'a FiniteFn>, Vec<u64>), CoverageError> {
    let funs = sig
        .fun_vars
        .iter()
        .map(|i| sigma.funs.get(i).ok_or(CoverageError::MissingFun(*i)))
        .collect::<Result<Vec<_>, _>>()?;
    let nums = sig
        .num_vars
        .iter()
        .map(|j| sigma.nums.get(j).copied().ok_or(CoverageError::MissingNum(*j)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((funs, nums))
}

/// Validity of `sigma` for the realizer at one position. Plain entries are
/// vacuously valid. For a coded entry the computation runs on the variables
/// its code declares; a convergent mismatch fails, non-convergence is
/// vacuous (or Unknown under `strong`, which additionally demands a value).
pub fn check_valid_at(
    r: &RealizerMap,
    store: &CodeStore,
    sigma: &Valuation,
    pos: EntryPos,
    strong: bool,
    fuel: u64,
    prims: &PrimTable,
) -> Result<Ternary, CoverageError> {
    let entry = r.entry(pos).ok_or(CoverageError::MissingEntry(pos))?;
    let RealizerEntry::Coded(_, e) = entry else {
        return Ok(Ternary::Holds);
    };
    let Some(sig) = store.signature(e) else {
        return Ok(Ternary::Fails);
    };
    let (funs, nums) = call_args(sig, sigma)?;
    match pos {
        EntryPos::Num(j) => {
            let expected = sigma.nums.get(&j).copied().ok_or(CoverageError::MissingNum(j))?;
            match store.apply_at_zero(e, &funs, &nums, fuel, prims) {
                Outcome::Value(b) => Ok(Ternary::from_bool(b == expected)),
                Outcome::FuelExhausted => Ok(if strong {
                    Ternary::Unknown(UnknownReason::FuelExhausted)
                } else {
                    Ternary::Holds
                }),
                Outcome::Stuck(_) => Ok(Ternary::Fails),
            }
        }
        EntryPos::Fun(i) => {
            let expected = sigma.funs.get(&i).ok_or(CoverageError::MissingFun(i))?;
            let probe_len = expected.table.len() as u64 + EXTRA_PROBES;
            for a in 0..probe_len {
                match store.apply_functional(e, &funs, &nums, a, fuel, prims) {
                    Outcome::Value(b) => {
                        if b != expected.apply(a) {
                            return Ok(Ternary::Fails);
                        }
                    }
                    Outcome::FuelExhausted => {
                        return Ok(if strong {
                            Ternary::Unknown(UnknownReason::FuelExhausted)
                        } else {
                            Ternary::Holds
                        });
                    }
                    Outcome::Stuck(_) => return Ok(Ternary::Fails),
                }
            }
            Ok(Ternary::Holds)
        }
    }
}

/// Validity at every position.
pub fn check_valid(
    r: &RealizerMap,
    store: &CodeStore,
    sigma: &Valuation,
    fuel: u64,
    prims: &PrimTable,
) -> Result<Ternary, CoverageError> {
    let mut acc = Ternary::Holds;
    for (pos, _) in r.positions() {
        acc = acc.and(check_valid_at(r, store, sigma, pos, false, fuel, prims)?);
        if acc.is_fails() {
            return Ok(acc);
        }
    }
    Ok(acc)
}

/// Overwrite computable positions of a valuation by their computed values,
/// in increasing level order, so the result is valid by construction at
/// every convergent coded position.
pub fn complete_valuation(
    r: &RealizerMap,
    store: &CodeStore,
    sigma: &Valuation,
    fuel: u64,
    table_len: usize,
    prims: &PrimTable,
) -> Valuation {
    let mut out = sigma.clone();
    let mut coded: Vec<(u64, EntryPos, CodeIndex)> = r
        .positions()
        .filter_map(|(pos, e)| e.code().map(|c| (e.level(), pos, c)))
        .collect();
    coded.sort_by_key(|(k, pos, _)| (*k, *pos));
    for (_, pos, e) in coded {
        let Some(sig) = store.signature(e) else { continue };
        let Ok((funs, nums)) = call_args(sig, &out) else { continue };
        match pos {
            EntryPos::Num(j) => {
                if let Outcome::Value(b) = store.apply_at_zero(e, &funs, &nums, fuel, prims) {
                    out.nums.insert(j, b);
                }
            }
            EntryPos::Fun(i) => {
                if let Ok(table) =
                    store.apply_pointwise(e, &funs, &nums, table_len, fuel, prims)
                {
                    out.funs.insert(i, table);
                }
            }
        }
    }
    out
}

/// Self-containedness: no coded entry's program can reach an argument slot
/// whose variable is itself coded.
pub fn check_self_contained(r: &RealizerMap, store: &CodeStore) -> bool {
    for (_, entry) in r.positions() {
        let Some(e) = entry.code() else { continue };
        let Some(sig) = store.signature(e) else { return false };
        let (reach_f, reach_n) = reachable_args(store, e);
        for (pos, var) in sig.fun_vars.iter().enumerate() {
            if reach_f.contains(&pos) {
                if let Some(RealizerEntry::Coded(_, _)) = r.v.get(var) {
                    return false;
                }
            }
        }
        for (pos, var) in sig.num_vars.iter().enumerate() {
            if reach_n.contains(&pos) {
                if let Some(RealizerEntry::Coded(_, _)) = r.w.get(var) {
                    return false;
                }
            }
        }
    }
    true
}

/// Conservative syntactic reachability of argument positions.
pub fn reachable_args(store: &CodeStore, e: CodeIndex) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let mut funs = BTreeSet::new();
    let mut nums = BTreeSet::new();
    let Some(prog) = store.program(e) else { return (funs, nums) };
    walk_reach(store, prog, &mut funs, &mut nums);
    (funs, nums)
}

fn walk_reach(
    store: &CodeStore,
    p: &OmlProgram,
    funs: &mut BTreeSet<usize>,
    nums: &mut BTreeSet<usize>,
) {
    match p {
        OmlProgram::ConstNat(_) | OmlProgram::Input | OmlProgram::MuVar => {}
        OmlProgram::ProjNum(k) => {
            nums.insert(*k);
        }
        OmlProgram::ProjFunQuery(k, at) => {
            funs.insert(*k);
            walk_reach(store, at, funs, nums);
        }
        OmlProgram::PrimOp(_, args) => {
            for a in args {
                walk_reach(store, a, funs, nums);
            }
        }
        OmlProgram::TermNum { fun_bind, num_bind, .. }
        | OmlProgram::TermFun { fun_bind, num_bind, .. } => {
            funs.extend(fun_bind.iter().map(|(_, k)| *k));
            nums.extend(num_bind.iter().filter_map(|(_, src)| match src {
                crate::oml::NumBindSrc::Arg(k) => Some(*k),
                _ => None,
            }));
        }
        OmlProgram::MuSearch(body) => walk_reach(store, body, funs, nums),
        OmlProgram::ComposeCall { callee, fun_map, num_map } => {
            let (cf, cn) = reachable_args(store, *callee);
            funs.extend(cf.into_iter().filter_map(|k| fun_map.get(k).copied()));
            nums.extend(cn.into_iter().filter_map(|k| num_map.get(k).copied()));
        }
        OmlProgram::IgnoreAndReplace { inner, slot, replacement, repl_fun_map, repl_num_map } => {
            let (inf, inn) = reachable_args(store, *inner);
            // the slot itself counts unreachable; other inner positions map
            // back to the outer signature
            let slot_reached = match slot {
                Slot::Fun(p) => inf.contains(p),
                Slot::Num(p) => inn.contains(p),
            };
            for k in inf {
                match slot {
                    Slot::Fun(p) => {
                        if k < *p {
                            funs.insert(k);
                        } else if k > *p {
                            funs.insert(k - 1);
                        }
                    }
                    Slot::Num(_) => {
                        funs.insert(k);
                    }
                }
            }
            for k in inn {
                match slot {
                    Slot::Num(p) => {
                        if k < *p {
                            nums.insert(k);
                        } else if k > *p {
                            nums.insert(k - 1);
                        }
                    }
                    Slot::Fun(_) => {
                        nums.insert(k);
                    }
                }
            }
            if slot_reached {
                let (rf, rn) = reachable_args(store, *replacement);
                funs.extend(rf.into_iter().filter_map(|k| repl_fun_map.get(k).copied()));
                nums.extend(rn.into_iter().filter_map(|k| repl_num_map.get(k).copied()));
            }
        }
    }
}

/// Monotone: nested binders carry strictly larger levels. Universal: number
/// or function variables under a positive universal or negative existential
/// quantifier must be Plain.
pub fn check_monotone_universal(r: &RealizerMap, s: &Sequent) -> Result<bool, CoverageError> {
    for f in s.formulas() {
        let occs = quantifier_occurrences(f);
        for occ in &occs {
            let outer_pos = if occ.is_fun { EntryPos::Fun(occ.var) } else { EntryPos::Num(occ.var) };
            let outer = r.entry(outer_pos).ok_or(CoverageError::MissingEntry(outer_pos))?;
            // nested binders: occurrences whose path strictly extends ours
            for inner in &occs {
                if inner.path.len() > occ.path.len() && inner.path[..occ.path.len()] == occ.path[..]
                {
                    let inner_pos = if inner.is_fun {
                        EntryPos::Fun(inner.var)
                    } else {
                        EntryPos::Num(inner.var)
                    };
                    let ie = r.entry(inner_pos).ok_or(CoverageError::MissingEntry(inner_pos))?;
                    if outer.level() >= ie.level() {
                        return Ok(false);
                    }
                }
            }
            let forced_plain = matches!(
                (occ.universal, occ.polarity),
                (true, Polarity::Positive) | (false, Polarity::Negative)
            );
            if forced_plain && matches!(outer, RealizerEntry::Coded(_, _)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Structural sanity for coded entries: the declared arguments must sit at
/// strictly lower levels than the entry itself.
pub fn check_level_discipline(r: &RealizerMap, store: &CodeStore) -> bool {
    for (_, entry) in r.positions() {
        let RealizerEntry::Coded(k, e) = entry else { continue };
        let Some(sig) = store.signature(e) else { return false };
        for i in &sig.fun_vars {
            match r.v.get(i) {
                Some(x) if x.level() < k => {}
                _ => return false,
            }
        }
        for j in &sig.num_vars {
            match r.w.get(j) {
                Some(x) if x.level() < k => {}
                _ => return false,
            }
        }
    }
    true
}

/// Shared configuration for the realizability checks.
pub struct RealCfg<'a> {
    pub store: &'a CodeStore,
    pub prims: &'a PrimTable,
    pub truth: TruthCfg,
    pub fuel: u64,
}

impl<'a> RealCfg<'a> {
    pub fn new(store: &'a CodeStore, prims: &'a PrimTable, bound: u64, fuel: u64) -> Self {
        RealCfg { store, prims, truth: TruthCfg::new(bound), fuel }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

/// Per-call cache of closure truths (they do not depend on the valuation).
pub type TruthCache = HashMap<(Formula, bool), bool>;

fn cached_closure(
    f: &Formula,
    cfg: &RealCfg,
    cache: &mut TruthCache,
) -> Result<bool, crate::syntax::EvalError> {
    if let Some(hit) = cache.get(&(f.clone(), true)) {
        return Ok(*hit);
    }
    let val = closure_true(f, &cfg.truth, cfg.prims)?;
    cache.insert((f.clone(), true), val);
    Ok(val)
}

/// The positive/negative realizability clauses, by structural recursion.
pub fn real_check(
    r: &RealizerMap,
    sigma: &Valuation,
    phi: &Formula,
    sign: Sign,
    cfg: &RealCfg,
    cache: &mut TruthCache,
) -> Result<Ternary, CoverageError> {
    // every clause requires the universal closure to be true
    let closed = cached_closure(phi, cfg, cache).map_err(|e| match e {
        crate::syntax::EvalError::UnboundFun(i) => CoverageError::MissingFun(i),
        crate::syntax::EvalError::UnboundNum(j) => CoverageError::MissingNum(j),
        crate::syntax::EvalError::Arity(_, _, _) => CoverageError::MissingEntry(EntryPos::Num(0)),
    })?;
    if !closed {
        return Ok(Ternary::Fails);
    }
    match phi {
        Formula::Bot => Ok(Ternary::Fails),
        Formula::Eq(_, _) => {
            // variable containment in the realizer domains
            let vars = formula_vars(phi);
            for i in vars.free_fun.iter().chain(vars.bound_fun.iter()) {
                if !r.v.contains_key(i) {
                    return Ok(Ternary::Fails);
                }
            }
            for j in vars.free_num.iter().chain(vars.bound_num.iter()) {
                if !r.w.contains_key(j) {
                    return Ok(Ternary::Fails);
                }
            }
            let inst = formula_true(phi, sigma, &cfg.truth, cfg.prims).map_err(|e| match e {
                crate::syntax::EvalError::UnboundFun(i) => CoverageError::MissingFun(i),
                crate::syntax::EvalError::UnboundNum(j) => CoverageError::MissingNum(j),
                crate::syntax::EvalError::Arity(_, _, _) => {
                    CoverageError::MissingEntry(EntryPos::Num(0))
                }
            })?;
            Ok(Ternary::from_bool(inst))
        }
        Formula::And(l, rr) => {
            let a = real_check(r, sigma, l, sign, cfg, cache)?;
            if a.is_fails() {
                return Ok(a);
            }
            Ok(a.and(real_check(r, sigma, rr, sign, cfg, cache)?))
        }
        Formula::Imp(l, rr) => {
            let hyp = real_check(r, sigma, l, sign.flip(), cfg, cache)?;
            let concl = real_check(r, sigma, rr, sign, cfg, cache)?;
            // three-valued implication
            Ok(match (hyp, concl) {
                (Ternary::Fails, _) => Ternary::Holds,
                (_, Ternary::Holds) => Ternary::Holds,
                (Ternary::Holds, c) => c,
                (Ternary::Unknown(u), _) => Ternary::Unknown(u),
            })
        }
        Formula::ExistsN(j, g) => {
            let inner = real_check(r, sigma, g, sign, cfg, cache)?;
            if sign == Sign::Pos {
                let sv =
                    check_valid_at(r, cfg.store, sigma, EntryPos::Num(*j), true, cfg.fuel, cfg.prims)?;
                Ok(inner.and(sv))
            } else {
                Ok(inner)
            }
        }
        Formula::ForallN(_, g) => real_check(r, sigma, g, sign, cfg, cache),
        Formula::ExistsF(i, g) => {
            let inner = real_check(r, sigma, g, sign, cfg, cache)?;
            if sign == Sign::Pos {
                let sv =
                    check_valid_at(r, cfg.store, sigma, EntryPos::Fun(*i), true, cfg.fuel, cfg.prims)?;
                Ok(inner.and(sv))
            } else {
                Ok(inner)
            }
        }
        Formula::ForallF(_, g) => real_check(r, sigma, g, sign, cfg, cache),
    }
}

#[derive(Debug, Clone)]
pub struct RealizeReport {
    pub verdict: Ternary,
    pub counterexample: Option<Valuation>,
    pub vacuous: bool,
    pub trials: usize,
    pub unknowns: usize,
}

/// Falsify-or-pass over a valuation suite: Fails when some completed,
/// valid valuation negatively realizes every antecedent formula yet fails
/// the succedent positively; Holds when no counterexample and no Unknown
/// occurred; Unknown otherwise. Never a proof of realizability.
pub fn check_realizes(
    r: &RealizerMap,
    s: &Sequent,
    suite: &[Valuation],
    cfg: &RealCfg,
) -> Result<RealizeReport, CoverageError> {
    if !check_level_discipline(r, cfg.store) {
        return Ok(RealizeReport {
            verdict: Ternary::Fails,
            counterexample: None,
            vacuous: false,
            trials: 0,
            unknowns: 0,
        });
    }
    if !check_monotone_universal(r, s)? {
        return Ok(RealizeReport {
            verdict: Ternary::Fails,
            counterexample: None,
            vacuous: false,
            trials: 0,
            unknowns: 0,
        });
    }
    let mut cache = TruthCache::new();
    let table_len = (cfg.truth.bound + 1) as usize + EXTRA_PROBES as usize;
    let mut unknowns = 0;
    for sigma in suite {
        let completed = complete_valuation(r, cfg.store, sigma, cfg.fuel, table_len, cfg.prims);
        match check_valid(r, cfg.store, &completed, cfg.fuel, cfg.prims)? {
            Ternary::Fails => continue,
            Ternary::Unknown(_) => {
                unknowns += 1;
                continue;
            }
            Ternary::Holds => {}
        }
        let mut hyp = Ternary::Holds;
        for gamma in &s.antecedent {
            hyp = hyp.and(real_check(r, &completed, gamma, Sign::Neg, cfg, &mut cache)?);
            if hyp.is_fails() {
                break;
            }
        }
        match hyp {
            Ternary::Fails => continue,
            Ternary::Unknown(_) => {
                unknowns += 1;
                continue;
            }
            Ternary::Holds => {}
        }
        match real_check(r, &completed, &s.succedent, Sign::Pos, cfg, &mut cache)? {
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
            Ternary::Holds => {}
        }
    }
    let verdict = if suite.is_empty() {
        Ternary::Holds
    } else if unknowns > 0 {
        Ternary::Unknown(UnknownReason::BoundExhausted)
    } else {
        Ternary::Holds
    };
    Ok(RealizeReport {
        verdict,
        counterexample: None,
        vacuous: suite.is_empty(),
        trials: suite.len(),
        unknowns,
    })
}

/// A valuation suite covering the realizer's domains: corner cases first,
/// then seeded random fill.
pub fn standard_suite(r: &RealizerMap, bound: u64, seed: u64, count: usize) -> Vec<Valuation> {
    let mut vars = crate::syntax::VarSets::default();
    vars.free_fun.extend(r.v.keys().copied());
    vars.free_num.extend(r.w.keys().copied());
    crate::gen::valuation_suite(&vars, bound, seed, count)
}

/// The extraction invariants of the induction: free variables at level 0,
/// bound variables positive, self-contained.
pub fn check_extraction_invariants(
    r: &RealizerMap,
    s: &Sequent,
    store: &CodeStore,
) -> Result<(), String> {
    let mut free = BTreeSet::new();
    let mut bound = BTreeSet::new();
    for f in s.formulas() {
        let vs = formula_vars(f);
        free.extend(vs.free_fun.iter().map(|i| EntryPos::Fun(*i)));
        free.extend(vs.free_num.iter().map(|j| EntryPos::Num(*j)));
        // only quantifier binders carry levels; lambda binders stay at 0
        for occ in quantifier_occurrences(f) {
            bound.insert(if occ.is_fun { EntryPos::Fun(occ.var) } else { EntryPos::Num(occ.var) });
        }
    }
    free.retain(|p| !bound.contains(p));
    for pos in &free {
        match r.entry(*pos) {
            Some(e) if e.level() == 0 => {}
            other => return Err(format!("free variable {pos:?} has entry {other:?}")),
        }
    }
    for pos in &bound {
        match r.entry(*pos) {
            Some(e) if e.level() > 0 => {}
            other => return Err(format!("bound variable {pos:?} has entry {other:?}")),
        }
    }
    for (pos, entry) in r.positions() {
        if !free.contains(&pos) && !bound.contains(&pos) && entry.level() != 0 {
            return Err(format!("residual variable {pos:?} has nonzero entry {entry:?}"));
        }
    }
    if !check_self_contained(r, store) {
        return Err("realizer is not self-contained".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests;
