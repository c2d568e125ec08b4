//! The global variable conventions: every variable is bound at most once,
//! no variable is both bound and free, and a bound variable cut away is
//! never reused below that cut. Duplicate antecedent copies of one formula
//! (the contraction pattern) share their binders, so binder sites are
//! compared by scope: the same index may recur only over an identical body.

use super::{NodePath, ProofTree, RuleTag};
use crate::syntax::{Formula, FunTerm, NumTerm, VarIdx};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    /// One index bound over two different scopes, or at two different
    /// eigenvariable-rule steps.
    MultiplyBound,
    /// An index that is bound somewhere and free somewhere else.
    BoundAndFree,
    /// An index whose binder vanished at a cut and is bound again outside
    /// that cut's subproof.
    ReuseAfterCut,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConventionViolation {
    pub kind: ViolationKind,
    pub is_fun: bool,
    pub var: VarIdx,
    pub node: NodePath,
}

impl std::fmt::Display for ConventionViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sort = if self.is_fun { "a" } else { "x" };
        let what = match self.kind {
            ViolationKind::MultiplyBound => "bound more than once",
            ViolationKind::BoundAndFree => "both bound and free",
            ViolationKind::ReuseAfterCut => "reused after being cut away",
        };
        write!(f, "{}{} {} at {}", sort, self.var, what, super::path_display(&self.node))
    }
}

#[derive(Debug, Clone, Default)]
pub struct ConventionReport {
    pub violations: Vec<ConventionViolation>,
}

impl ConventionReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A binder occurrence: its scope identifies the quantifier (or lambda) up
/// to duplication of whole formulas. Because a hypothesis may be
/// instantiated on its way up the proof, two scopes also count as the same
/// binder when one is a substitution instance of the other (substituting
/// terms for free variables other than the bound one).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Scope {
    Body(Formula),
    LambdaBody(NumTerm),
}

/// One-way instance matching: does `pattern` become `target` under some
/// substitution for its free variables, leaving `skip` fixed?
fn instance_of_formula(pattern: &Formula, target: &Formula, skip: (bool, VarIdx)) -> bool {
    let mut num_map: BTreeMap<VarIdx, NumTerm> = BTreeMap::new();
    let mut fun_map: BTreeMap<VarIdx, FunTerm> = BTreeMap::new();
    inst_f(pattern, target, skip, &mut num_map, &mut fun_map)
}

fn inst_f(
    p: &Formula,
    t: &Formula,
    skip: (bool, VarIdx),
    nm: &mut BTreeMap<VarIdx, NumTerm>,
    fm: &mut BTreeMap<VarIdx, FunTerm>,
) -> bool {
    match (p, t) {
        (Formula::Bot, Formula::Bot) => true,
        (Formula::Eq(l1, r1), Formula::Eq(l2, r2)) => {
            inst_nt(l1, l2, skip, nm, fm) && inst_nt(r1, r2, skip, nm, fm)
        }
        (Formula::And(l1, r1), Formula::And(l2, r2))
        | (Formula::Imp(l1, r1), Formula::Imp(l2, r2)) => {
            inst_f(l1, l2, skip, nm, fm) && inst_f(r1, r2, skip, nm, fm)
        }
        (Formula::ExistsN(v1, g1), Formula::ExistsN(v2, g2))
        | (Formula::ForallN(v1, g1), Formula::ForallN(v2, g2)) => {
            v1 == v2 && inst_f(g1, g2, skip, nm, fm)
        }
        (Formula::ExistsF(v1, g1), Formula::ExistsF(v2, g2))
        | (Formula::ForallF(v1, g1), Formula::ForallF(v2, g2)) => {
            v1 == v2 && inst_f(g1, g2, skip, nm, fm)
        }
        _ => false,
    }
}

fn inst_nt(
    p: &NumTerm,
    t: &NumTerm,
    skip: (bool, VarIdx),
    nm: &mut BTreeMap<VarIdx, NumTerm>,
    fm: &mut BTreeMap<VarIdx, FunTerm>,
) -> bool {
    match p {
        NumTerm::NumVar(v) if skip != (false, *v) => match nm.get(v) {
            Some(prev) => prev == t,
            None => {
                nm.insert(*v, t.clone());
                true
            }
        },
        NumTerm::NumVar(v) => matches!(t, NumTerm::NumVar(w) if w == v),
        NumTerm::Zero => matches!(t, NumTerm::Zero),
        NumTerm::Succ(a) => matches!(t, NumTerm::Succ(b) if inst_nt(a, b, skip, nm, fm)),
        NumTerm::PrimApp(f, xs) => match t {
            NumTerm::PrimApp(g, ys) if f == g && xs.len() == ys.len() => {
                xs.iter().zip(ys).all(|(x, y)| inst_nt(x, y, skip, nm, fm))
            }
            _ => false,
        },
        NumTerm::FunApp(tau, a) => match t {
            NumTerm::FunApp(sig, b) => {
                inst_ft(tau, sig, skip, nm, fm) && inst_nt(a, b, skip, nm, fm)
            }
            _ => false,
        },
    }
}

fn inst_ft(
    p: &FunTerm,
    t: &FunTerm,
    skip: (bool, VarIdx),
    nm: &mut BTreeMap<VarIdx, NumTerm>,
    fm: &mut BTreeMap<VarIdx, FunTerm>,
) -> bool {
    match p {
        FunTerm::FunVar(v) if skip != (true, *v) => match fm.get(v) {
            Some(prev) => prev == t,
            None => {
                fm.insert(*v, t.clone());
                true
            }
        },
        FunTerm::FunVar(v) => matches!(t, FunTerm::FunVar(w) if w == v),
        FunTerm::Lambda(j, a) => {
            matches!(t, FunTerm::Lambda(k, b) if j == k && inst_nt(a, b, skip, nm, fm))
        }
        FunTerm::Rec(a, tau) => match t {
            FunTerm::Rec(b, sig) => {
                inst_nt(a, b, skip, nm, fm) && inst_ft(tau, sig, skip, nm, fm)
            }
            _ => false,
        },
    }
}

fn scopes_compatible(key: (bool, VarIdx), a: &Scope, b: &Scope) -> bool {
    match (a, b) {
        (Scope::Body(fa), Scope::Body(fb)) => {
            instance_of_formula(fa, fb, key) || instance_of_formula(fb, fa, key)
        }
        (Scope::LambdaBody(ta), Scope::LambdaBody(tb)) => {
            let mut nm = BTreeMap::new();
            let mut fm = BTreeMap::new();
            inst_nt(ta, tb, key, &mut nm, &mut fm) || {
                nm.clear();
                fm.clear();
                inst_nt(tb, ta, key, &mut nm, &mut fm)
            }
        }
        _ => false,
    }
}

fn collect_binders(f: &Formula, out: &mut Vec<(bool, VarIdx, Scope)>) {
    match f {
        Formula::Eq(l, r) => {
            collect_term_binders_num(l, out);
            collect_term_binders_num(r, out);
        }
        Formula::Bot => {}
        Formula::And(l, r) | Formula::Imp(l, r) => {
            collect_binders(l, out);
            collect_binders(r, out);
        }
        Formula::ExistsN(j, g) | Formula::ForallN(j, g) => {
            out.push((false, *j, Scope::Body((**g).clone())));
            collect_binders(g, out);
        }
        Formula::ExistsF(i, g) | Formula::ForallF(i, g) => {
            out.push((true, *i, Scope::Body((**g).clone())));
            collect_binders(g, out);
        }
    }
}

fn collect_term_binders_num(t: &NumTerm, out: &mut Vec<(bool, VarIdx, Scope)>) {
    match t {
        NumTerm::NumVar(_) | NumTerm::Zero => {}
        NumTerm::Succ(s) => collect_term_binders_num(s, out),
        NumTerm::PrimApp(_, args) => {
            for a in args {
                collect_term_binders_num(a, out);
            }
        }
        NumTerm::FunApp(tau, s) => {
            collect_term_binders_fun(tau, out);
            collect_term_binders_num(s, out);
        }
    }
}

fn collect_term_binders_fun(tau: &FunTerm, out: &mut Vec<(bool, VarIdx, Scope)>) {
    match tau {
        FunTerm::FunVar(_) => {}
        FunTerm::Lambda(j, body) => {
            out.push((false, *j, Scope::LambdaBody((**body).clone())));
            collect_term_binders_num(body, out);
        }
        FunTerm::Rec(base, step) => {
            collect_term_binders_num(base, out);
            collect_term_binders_fun(step, out);
        }
    }
}

pub fn check_variable_conventions(p: &ProofTree) -> ConventionReport {
    let mut report = ConventionReport::default();

    // scopes per (sort, index), with the first node where each scope shows up
    let mut scopes: BTreeMap<(bool, VarIdx), Vec<(Scope, NodePath)>> = BTreeMap::new();
    // succedent-side eigenvariable-rule introductions (never contractible)
    let mut succ_strong: BTreeMap<(bool, VarIdx), Vec<NodePath>> = BTreeMap::new();
    // antecedent-side existential introductions (contractible copies)
    let mut ante_strong: BTreeMap<(bool, VarIdx), Vec<NodePath>> = BTreeMap::new();
    // free occurrences per (sort, index)
    let mut free_sites: BTreeMap<(bool, VarIdx), NodePath> = BTreeMap::new();

    p.visit(&mut |n, path| {
        for f in n.conclusion.formulas() {
            let mut binders = Vec::new();
            collect_binders(f, &mut binders);
            for (is_fun, v, scope) in binders {
                let entry = scopes.entry((is_fun, v)).or_default();
                if !entry.iter().any(|(s, _)| s == &scope) {
                    entry.push((scope, path.clone()));
                }
            }
            let vs = crate::syntax::formula_vars(f);
            for j in vs.free_num {
                free_sites.entry((false, j)).or_insert_with(|| path.clone());
            }
            for i in vs.free_fun {
                free_sites.entry((true, i)).or_insert_with(|| path.clone());
            }
        }
        match n.rule {
            RuleTag::ForallNR => {
                if let Formula::ForallN(j, _) = &n.conclusion.succedent {
                    succ_strong.entry((false, *j)).or_default().push(path.clone());
                }
            }
            RuleTag::ForallFR => {
                if let Formula::ForallF(i, _) = &n.conclusion.succedent {
                    succ_strong.entry((true, *i)).or_default().push(path.clone());
                }
            }
            RuleTag::ExistsNL => {
                if let Some(Formula::ExistsN(j, _)) = n.conclusion.antecedent.last() {
                    ante_strong.entry((false, *j)).or_default().push(path.clone());
                }
            }
            RuleTag::ExistsFL => {
                if let Some(Formula::ExistsF(i, _)) = n.conclusion.antecedent.last() {
                    ante_strong.entry((true, *i)).or_default().push(path.clone());
                }
            }
            _ => {}
        }
    });

    // (a) one index over genuinely different scopes (instantiation of other
    // variables does not separate scopes)
    for ((is_fun, var), entries) in &scopes {
        let key = (*is_fun, *var);
        let incompatible = entries
            .iter()
            .enumerate()
            .any(|(i, (a, _))| entries[i + 1..].iter().any(|(b, _)| !scopes_compatible(key, a, b)));
        if incompatible {
            let node = entries.iter().map(|(_, p)| p).min_by_key(|p| p.len()).unwrap().clone();
            report.violations.push(ConventionViolation {
                kind: ViolationKind::MultiplyBound,
                is_fun: *is_fun,
                var: *var,
                node,
            });
        }
    }
    // (a) one index introduced by several succedent-side strong steps, or by
    // both sides: such occurrences can never be contracted together
    for ((is_fun, var), sites) in &succ_strong {
        let extra = ante_strong.get(&(*is_fun, *var)).map(Vec::len).unwrap_or(0);
        if (sites.len() > 1 || (sites.len() == 1 && extra > 0))
            && !report.violations.iter().any(|v| {
                v.kind == ViolationKind::MultiplyBound && v.is_fun == *is_fun && v.var == *var
            })
        {
            let node = sites.iter().min_by_key(|p| p.len()).unwrap().clone();
            report.violations.push(ConventionViolation {
                kind: ViolationKind::MultiplyBound,
                is_fun: *is_fun,
                var: *var,
                node,
            });
        }
    }
    // (b) bound and free
    for key in scopes.keys() {
        if let Some(node) = free_sites.get(key) {
            report.violations.push(ConventionViolation {
                kind: ViolationKind::BoundAndFree,
                is_fun: key.0,
                var: key.1,
                node: node.clone(),
            });
        }
    }
    // (c) reuse after a cut
    check_cut_reuse(p, &mut report);

    report.violations.sort_by(|a, b| (a.is_fun, a.var, &a.node).cmp(&(b.is_fun, b.var, &b.node)));
    report.violations.dedup();
    report
}

fn node_binder_set(n: &ProofTree) -> BTreeSet<(bool, VarIdx)> {
    let mut out = BTreeSet::new();
    for f in n.conclusion.formulas() {
        let mut binders = Vec::new();
        collect_binders(f, &mut binders);
        out.extend(binders.into_iter().map(|(s, v, _)| (s, v)));
    }
    out
}

fn subtree_binders(n: &ProofTree, out: &mut BTreeSet<(bool, VarIdx)>) {
    out.extend(node_binder_set(n));
    for p in &n.premises {
        subtree_binders(p, out);
    }
}

fn sequent_all_vars(n: &ProofTree) -> BTreeSet<(bool, VarIdx)> {
    let mut out = node_binder_set(n);
    for f in n.conclusion.formulas() {
        let vs = crate::syntax::formula_vars(f);
        out.extend(vs.free_num.iter().map(|j| (false, *j)));
        out.extend(vs.free_fun.iter().map(|i| (true, *i)));
    }
    out
}

fn check_cut_reuse(root: &ProofTree, report: &mut ConventionReport) {
    let cuts = root.cut_paths();
    for cut_path in cuts {
        let cut = root.get(&cut_path).unwrap();
        let mut vanished = BTreeSet::new();
        subtree_binders(cut, &mut vanished);
        let still_there = sequent_all_vars(cut);
        vanished.retain(|k| !still_there.contains(k));
        if vanished.is_empty() {
            continue;
        }
        // any binder outside the cut's subtree that reuses a vanished index
        root.visit(&mut |n, path| {
            if path.len() >= cut_path.len() && path[..cut_path.len()] == cut_path[..] {
                return; // inside the cut's subtree
            }
            for key in node_binder_set(n) {
                if vanished.contains(&key) {
                    report.violations.push(ConventionViolation {
                        kind: ViolationKind::ReuseAfterCut,
                        is_fun: key.0,
                        var: key.1,
                        node: path.clone(),
                    });
                }
            }
        });
    }
}
