//! ASTs, variable conventions, term evaluation and formula classification
//! for the two-sorted language (numbers and functions).
//!
//! Variables are globally indexed: number variables `x1, x2, ...` and
//! function variables `a1, a2, ...`. Negation and disjunction are not
//! constructors; surface `not`/`or` and function-sort equality are
//! elaborated away at parse time.

mod eval;
mod parse;
mod prims;
pub mod print;
mod subst;

pub use eval::{eval_fun_apply, eval_num_term, EvalError};
pub use parse::{parse_formula, parse_sequent, FormulaParser, ParseError};
pub use prims::{PrimDef, PrimId, PrimTable};
pub use print::{print_formula, print_fun_term, print_num_term, print_sequent};
pub use subst::{subst_fun_formula, subst_num_formula, subst_num_term};

use std::collections::BTreeMap;
use std::collections::BTreeSet;

pub type VarIdx = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NumTerm {
    NumVar(VarIdx),
    Zero,
    Succ(Box<NumTerm>),
    PrimApp(PrimId, Vec<NumTerm>),
    FunApp(Box<FunTerm>, Box<NumTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FunTerm {
    FunVar(VarIdx),
    /// `lam x. t` — the binder is a number variable.
    Lambda(VarIdx, Box<NumTerm>),
    /// `R t tau` — iteration: value at 0 is `t`, value at `S(n)` is
    /// `tau` applied to the value at `n`.
    Rec(Box<NumTerm>, Box<FunTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    /// The sole atomic relation: equality on the number sort.
    Eq(Box<NumTerm>, Box<NumTerm>),
    Bot,
    And(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    ExistsN(VarIdx, Box<Formula>),
    ForallN(VarIdx, Box<Formula>),
    ExistsF(VarIdx, Box<Formula>),
    ForallF(VarIdx, Box<Formula>),
}

impl NumTerm {
    pub fn var(j: VarIdx) -> NumTerm {
        NumTerm::NumVar(j)
    }

    pub fn succ(t: NumTerm) -> NumTerm {
        NumTerm::Succ(Box::new(t))
    }

    /// The numeral `S^n(0)`.
    pub fn numeral(n: u64) -> NumTerm {
        let mut t = NumTerm::Zero;
        for _ in 0..n {
            t = NumTerm::succ(t);
        }
        t
    }

    pub fn apply(tau: FunTerm, t: NumTerm) -> NumTerm {
        NumTerm::FunApp(Box::new(tau), Box::new(t))
    }
}

impl Formula {
    pub fn eq(t1: NumTerm, t2: NumTerm) -> Formula {
        Formula::Eq(Box::new(t1), Box::new(t2))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Formula {
        Formula::Imp(Box::new(l), Box::new(r))
    }

    /// `not f` is stored as `f -> bot`.
    pub fn not(f: Formula) -> Formula {
        Formula::imp(f, Formula::Bot)
    }

    pub fn exists_n(j: VarIdx, f: Formula) -> Formula {
        Formula::ExistsN(j, Box::new(f))
    }

    pub fn forall_n(j: VarIdx, f: Formula) -> Formula {
        Formula::ForallN(j, Box::new(f))
    }

    pub fn exists_f(i: VarIdx, f: Formula) -> Formula {
        Formula::ExistsF(i, Box::new(f))
    }

    pub fn forall_f(i: VarIdx, f: Formula) -> Formula {
        Formula::ForallF(i, Box::new(f))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Eq(_, _) | Formula::Bot)
    }

    /// No quantifiers of either sort.
    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Eq(_, _) | Formula::Bot => true,
            Formula::And(l, r) | Formula::Imp(l, r) => {
                l.is_quantifier_free() && r.is_quantifier_free()
            }
            _ => false,
        }
    }

    /// No function quantifiers (number quantifiers allowed).
    pub fn is_arithmetical(&self) -> bool {
        match self {
            Formula::Eq(_, _) | Formula::Bot => true,
            Formula::And(l, r) | Formula::Imp(l, r) => l.is_arithmetical() && r.is_arithmetical(),
            Formula::ExistsN(_, f) | Formula::ForallN(_, f) => f.is_arithmetical(),
            Formula::ExistsF(_, _) | Formula::ForallF(_, _) => false,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Eq(_, _) | Formula::Bot => 1,
            Formula::And(l, r) | Formula::Imp(l, r) => 1 + l.size() + r.size(),
            Formula::ExistsN(_, f)
            | Formula::ForallN(_, f)
            | Formula::ExistsF(_, f)
            | Formula::ForallF(_, f) => 1 + f.size(),
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Eq(_, _) | Formula::Bot => vec![],
            Formula::And(l, r) | Formula::Imp(l, r) => vec![l, r],
            Formula::ExistsN(_, f)
            | Formula::ForallN(_, f)
            | Formula::ExistsF(_, f)
            | Formula::ForallF(_, f) => vec![f],
        }
    }
}

/// Disjunction is sugar: `phi or psi` becomes
/// `exists x_fresh ((x_fresh = 0 -> phi) and (x_fresh <> 0 -> psi))`.
pub fn elaborate_disjunction(
    phi: Formula,
    psi: Formula,
    fresh: VarIdx,
) -> Result<Formula, FreshCollision> {
    let occurs = |f: &Formula| {
        let vs = formula_vars(f);
        vs.free_num.contains(&fresh) || vs.bound_num.contains(&fresh)
    };
    if occurs(&phi) || occurs(&psi) {
        return Err(FreshCollision(fresh));
    }
    let x = NumTerm::var(fresh);
    let x_is_0 = Formula::eq(x.clone(), NumTerm::Zero);
    let x_ne_0 = Formula::not(Formula::eq(x, NumTerm::Zero));
    Ok(Formula::exists_n(
        fresh,
        Formula::and(Formula::imp(x_is_0, phi), Formula::imp(x_ne_0, psi)),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreshCollision(pub VarIdx);

impl std::fmt::Display for FreshCollision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "fresh variable x{} already occurs in the disjuncts", self.0)
    }
}

impl std::error::Error for FreshCollision {}

/// A sequent `Gamma |- phi` with an ordered antecedent (duplicates allowed).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub antecedent: Vec<Formula>,
    pub succedent: Formula,
}

impl Sequent {
    pub fn new(antecedent: Vec<Formula>, succedent: Formula) -> Sequent {
        Sequent { antecedent, succedent }
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.antecedent.iter().chain(std::iter::once(&self.succedent))
    }
}

/// Decomposition of a Pi^1_2 formula `forall a_i (xi -> exists a_j psi)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pi12Parts {
    pub alpha: VarIdx,
    pub xi: Formula,
    pub beta: VarIdx,
    pub psi: Formula,
}

/// Matches `forall a_i (xi -> exists a_j psi)` with arithmetical `xi`, `psi`.
pub fn classify_pi12(phi: &Formula) -> Option<Pi12Parts> {
    if let Formula::ForallF(alpha, body) = phi {
        if let Formula::Imp(xi, rhs) = body.as_ref() {
            if let Formula::ExistsF(beta, psi) = rhs.as_ref() {
                if xi.is_arithmetical() && psi.is_arithmetical() {
                    return Some(Pi12Parts {
                        alpha: *alpha,
                        xi: (**xi).clone(),
                        beta: *beta,
                        psi: (**psi).clone(),
                    });
                }
            }
        }
    }
    None
}

/// A Pi^1_2 sequent is number-negative when every first-order quantifier in
/// the succedent's instance part and in the antecedents' solution parts sits
/// inside a negation.
pub fn is_number_negative(seq: &Sequent) -> Result<bool, NotPi12> {
    let concl = classify_pi12(&seq.succedent).ok_or(NotPi12)?;
    if !num_quantifiers_negated(&concl.xi, false) {
        return Ok(false);
    }
    for ant in &seq.antecedent {
        let parts = classify_pi12(ant).ok_or(NotPi12)?;
        if !num_quantifiers_negated(&parts.psi, false) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotPi12;

impl std::fmt::Display for NotPi12 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "sequent formula does not classify as Pi^1_2")
    }
}

impl std::error::Error for NotPi12 {}

fn num_quantifiers_negated(f: &Formula, under_neg: bool) -> bool {
    match f {
        Formula::Eq(_, _) | Formula::Bot => true,
        Formula::Imp(l, r) => {
            let neg_l = under_neg || matches!(r.as_ref(), Formula::Bot);
            num_quantifiers_negated(l, neg_l) && num_quantifiers_negated(r, under_neg)
        }
        Formula::And(l, r) => {
            num_quantifiers_negated(l, under_neg) && num_quantifiers_negated(r, under_neg)
        }
        Formula::ExistsN(_, g) | Formula::ForallN(_, g) => {
            under_neg && num_quantifiers_negated(g, under_neg)
        }
        Formula::ExistsF(_, g) | Formula::ForallF(_, g) => num_quantifiers_negated(g, under_neg),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

/// Occurrence paths address formula nodes: each step selects a child
/// (0 = left/only child, 1 = right child).
pub type Path = Vec<u8>;

/// Polarity of the quantifier node addressed by `path`: flipped once for
/// each implication whose left branch the path enters.
pub fn polarity_of_occurrence(phi: &Formula, path: &[u8]) -> Result<Polarity, BadPath> {
    let mut cur = phi;
    let mut pol = Polarity::Positive;
    for &step in path {
        cur = match (cur, step) {
            (Formula::And(l, _), 0) => l,
            (Formula::And(_, r), 1) => r,
            (Formula::Imp(l, _), 0) => {
                pol = pol.flip();
                l
            }
            (Formula::Imp(_, r), 1) => r,
            (
                Formula::ExistsN(_, f)
                | Formula::ForallN(_, f)
                | Formula::ExistsF(_, f)
                | Formula::ForallF(_, f),
                0,
            ) => f,
            _ => return Err(BadPath),
        };
    }
    match cur {
        Formula::ExistsN(_, _)
        | Formula::ForallN(_, _)
        | Formula::ExistsF(_, _)
        | Formula::ForallF(_, _) => Ok(pol),
        _ => Err(BadPath),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BadPath;

impl std::fmt::Display for BadPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "path does not address a quantifier node")
    }
}

impl std::error::Error for BadPath {}

/// Every quantifier occurrence of a formula with its binder, sort, path and
/// polarity. `is_fun` distinguishes function binders from number binders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantOcc {
    pub var: VarIdx,
    pub is_fun: bool,
    pub universal: bool,
    pub path: Path,
    pub polarity: Polarity,
}

pub fn quantifier_occurrences(phi: &Formula) -> Vec<QuantOcc> {
    let mut out = Vec::new();
    fn walk(f: &Formula, path: &mut Path, pol: Polarity, out: &mut Vec<QuantOcc>) {
        match f {
            Formula::Eq(_, _) | Formula::Bot => {}
            Formula::And(l, r) => {
                path.push(0);
                walk(l, path, pol, out);
                path.pop();
                path.push(1);
                walk(r, path, pol, out);
                path.pop();
            }
            Formula::Imp(l, r) => {
                path.push(0);
                walk(l, path, pol.flip(), out);
                path.pop();
                path.push(1);
                walk(r, path, pol, out);
                path.pop();
            }
            Formula::ExistsN(v, g) | Formula::ForallN(v, g) => {
                let universal = matches!(f, Formula::ForallN(_, _));
                out.push(QuantOcc { var: *v, is_fun: false, universal, path: path.clone(), polarity: pol });
                path.push(0);
                walk(g, path, pol, out);
                path.pop();
            }
            Formula::ExistsF(v, g) | Formula::ForallF(v, g) => {
                let universal = matches!(f, Formula::ForallF(_, _));
                out.push(QuantOcc { var: *v, is_fun: true, universal, path: path.clone(), polarity: pol });
                path.push(0);
                walk(g, path, pol, out);
                path.pop();
            }
        }
    }
    walk(phi, &mut Vec::new(), Polarity::Positive, &mut out);
    out
}

/// Free and bound variable sets of a formula, both sorts. Lambda binders in
/// terms count as bound number variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarSets {
    pub free_num: BTreeSet<VarIdx>,
    pub free_fun: BTreeSet<VarIdx>,
    pub bound_num: BTreeSet<VarIdx>,
    pub bound_fun: BTreeSet<VarIdx>,
}

impl VarSets {
    pub fn union(mut self, other: &VarSets) -> VarSets {
        self.free_num.extend(&other.free_num);
        self.free_fun.extend(&other.free_fun);
        self.bound_num.extend(&other.bound_num);
        self.bound_fun.extend(&other.bound_fun);
        self
    }
}

pub fn num_term_vars(
    t: &NumTerm,
    bound_num: &mut BTreeSet<VarIdx>,
    bound_fun: &BTreeSet<VarIdx>,
    out: &mut VarSets,
) {
    match t {
        NumTerm::NumVar(j) => {
            if !bound_num.contains(j) {
                out.free_num.insert(*j);
            }
        }
        NumTerm::Zero => {}
        NumTerm::Succ(s) => num_term_vars(s, bound_num, bound_fun, out),
        NumTerm::PrimApp(_, args) => {
            for a in args {
                num_term_vars(a, bound_num, bound_fun, out);
            }
        }
        NumTerm::FunApp(tau, s) => {
            fun_term_vars(tau, bound_num, bound_fun, out);
            num_term_vars(s, bound_num, bound_fun, out);
        }
    }
}

pub fn fun_term_vars(
    tau: &FunTerm,
    bound_num: &mut BTreeSet<VarIdx>,
    bound_fun: &BTreeSet<VarIdx>,
    out: &mut VarSets,
) {
    match tau {
        FunTerm::FunVar(i) => {
            if !bound_fun.contains(i) {
                out.free_fun.insert(*i);
            }
        }
        FunTerm::Lambda(j, body) => {
            out.bound_num.insert(*j);
            let fresh = bound_num.insert(*j);
            num_term_vars(body, bound_num, bound_fun, out);
            if fresh {
                bound_num.remove(j);
            }
        }
        FunTerm::Rec(base, step) => {
            num_term_vars(base, bound_num, bound_fun, out);
            fun_term_vars(step, bound_num, bound_fun, out);
        }
    }
}

pub fn formula_vars(f: &Formula) -> VarSets {
    let mut out = VarSets::default();
    let mut bound_num = BTreeSet::new();
    let mut bound_fun = BTreeSet::new();
    fn walk(
        f: &Formula,
        bound_num: &mut BTreeSet<VarIdx>,
        bound_fun: &mut BTreeSet<VarIdx>,
        out: &mut VarSets,
    ) {
        match f {
            Formula::Eq(l, r) => {
                num_term_vars(l, bound_num, bound_fun, out);
                num_term_vars(r, bound_num, bound_fun, out);
            }
            Formula::Bot => {}
            Formula::And(l, r) | Formula::Imp(l, r) => {
                walk(l, bound_num, bound_fun, out);
                walk(r, bound_num, bound_fun, out);
            }
            Formula::ExistsN(j, g) | Formula::ForallN(j, g) => {
                out.bound_num.insert(*j);
                let fresh = bound_num.insert(*j);
                walk(g, bound_num, bound_fun, out);
                if fresh {
                    bound_num.remove(j);
                }
            }
            Formula::ExistsF(i, g) | Formula::ForallF(i, g) => {
                out.bound_fun.insert(*i);
                let fresh = bound_fun.insert(*i);
                walk(g, bound_num, bound_fun, out);
                if fresh {
                    bound_fun.remove(i);
                }
            }
        }
    }
    walk(f, &mut bound_num, &mut bound_fun, &mut out);
    out
}

/// A total function given by a finite table; 0 beyond the table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FiniteFn {
    pub table: Vec<u64>,
}

impl FiniteFn {
    pub fn new(table: Vec<u64>) -> FiniteFn {
        FiniteFn { table }
    }

    pub fn constant(len: usize, v: u64) -> FiniteFn {
        FiniteFn { table: vec![v; len] }
    }

    pub fn apply(&self, a: u64) -> u64 {
        usize::try_from(a).ok().and_then(|i| self.table.get(i).copied()).unwrap_or(0)
    }
}

/// Assigns finite-table functions and naturals to variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation {
    pub funs: BTreeMap<VarIdx, FiniteFn>,
    pub nums: BTreeMap<VarIdx, u64>,
}

impl Valuation {
    pub fn new() -> Valuation {
        Valuation::default()
    }

    pub fn with_fun(mut self, i: VarIdx, f: FiniteFn) -> Valuation {
        self.funs.insert(i, f);
        self
    }

    pub fn with_num(mut self, j: VarIdx, n: u64) -> Valuation {
        self.nums.insert(j, n);
        self
    }
}

#[cfg(test)]
mod tests;
