//! Structural substitution. The global variable conventions (each variable
//! bound at most once, never both bound and free) make capture impossible in
//! well-formed proofs; substitution still stops at a shadowing binder so it
//! is safe on arbitrary input.

use super::{Formula, FunTerm, NumTerm, VarIdx};

pub fn subst_num_term(t: &NumTerm, j: VarIdx, repl: &NumTerm) -> NumTerm {
    match t {
        NumTerm::NumVar(k) => {
            if *k == j {
                repl.clone()
            } else {
                t.clone()
            }
        }
        NumTerm::Zero => NumTerm::Zero,
        NumTerm::Succ(s) => NumTerm::succ(subst_num_term(s, j, repl)),
        NumTerm::PrimApp(f, args) => {
            NumTerm::PrimApp(*f, args.iter().map(|a| subst_num_term(a, j, repl)).collect())
        }
        NumTerm::FunApp(tau, s) => NumTerm::FunApp(
            Box::new(subst_num_fun_term(tau, j, repl)),
            Box::new(subst_num_term(s, j, repl)),
        ),
    }
}

pub fn subst_num_fun_term(tau: &FunTerm, j: VarIdx, repl: &NumTerm) -> FunTerm {
    match tau {
        FunTerm::FunVar(_) => tau.clone(),
        FunTerm::Lambda(b, body) => {
            if *b == j {
                tau.clone()
            } else {
                FunTerm::Lambda(*b, Box::new(subst_num_term(body, j, repl)))
            }
        }
        FunTerm::Rec(base, step) => FunTerm::Rec(
            Box::new(subst_num_term(base, j, repl)),
            Box::new(subst_num_fun_term(step, j, repl)),
        ),
    }
}

pub fn subst_fun_num_term(t: &NumTerm, i: VarIdx, repl: &FunTerm) -> NumTerm {
    match t {
        NumTerm::NumVar(_) | NumTerm::Zero => t.clone(),
        NumTerm::Succ(s) => NumTerm::succ(subst_fun_num_term(s, i, repl)),
        NumTerm::PrimApp(f, args) => {
            NumTerm::PrimApp(*f, args.iter().map(|a| subst_fun_num_term(a, i, repl)).collect())
        }
        NumTerm::FunApp(tau, s) => NumTerm::FunApp(
            Box::new(subst_fun_fun_term(tau, i, repl)),
            Box::new(subst_fun_num_term(s, i, repl)),
        ),
    }
}

pub fn subst_fun_fun_term(tau: &FunTerm, i: VarIdx, repl: &FunTerm) -> FunTerm {
    match tau {
        FunTerm::FunVar(k) => {
            if *k == i {
                repl.clone()
            } else {
                tau.clone()
            }
        }
        FunTerm::Lambda(b, body) => FunTerm::Lambda(*b, Box::new(subst_fun_num_term(body, i, repl))),
        FunTerm::Rec(base, step) => FunTerm::Rec(
            Box::new(subst_fun_num_term(base, i, repl)),
            Box::new(subst_fun_fun_term(step, i, repl)),
        ),
    }
}

/// Replace free occurrences of number variable `x_j` in `f` by `repl`.
pub fn subst_num_formula(f: &Formula, j: VarIdx, repl: &NumTerm) -> Formula {
    match f {
        Formula::Eq(l, r) => Formula::eq(subst_num_term(l, j, repl), subst_num_term(r, j, repl)),
        Formula::Bot => Formula::Bot,
        Formula::And(l, r) => {
            Formula::and(subst_num_formula(l, j, repl), subst_num_formula(r, j, repl))
        }
        Formula::Imp(l, r) => {
            Formula::imp(subst_num_formula(l, j, repl), subst_num_formula(r, j, repl))
        }
        Formula::ExistsN(k, g) => {
            if *k == j {
                f.clone()
            } else {
                Formula::exists_n(*k, subst_num_formula(g, j, repl))
            }
        }
        Formula::ForallN(k, g) => {
            if *k == j {
                f.clone()
            } else {
                Formula::forall_n(*k, subst_num_formula(g, j, repl))
            }
        }
        Formula::ExistsF(k, g) => Formula::exists_f(*k, subst_num_formula(g, j, repl)),
        Formula::ForallF(k, g) => Formula::forall_f(*k, subst_num_formula(g, j, repl)),
    }
}

/// Replace free occurrences of function variable `a_i` in `f` by `repl`.
pub fn subst_fun_formula(f: &Formula, i: VarIdx, repl: &FunTerm) -> Formula {
    match f {
        Formula::Eq(l, r) => {
            Formula::eq(subst_fun_num_term(l, i, repl), subst_fun_num_term(r, i, repl))
        }
        Formula::Bot => Formula::Bot,
        Formula::And(l, r) => {
            Formula::and(subst_fun_formula(l, i, repl), subst_fun_formula(r, i, repl))
        }
        Formula::Imp(l, r) => {
            Formula::imp(subst_fun_formula(l, i, repl), subst_fun_formula(r, i, repl))
        }
        Formula::ExistsN(k, g) => Formula::exists_n(*k, subst_fun_formula(g, i, repl)),
        Formula::ForallN(k, g) => Formula::forall_n(*k, subst_fun_formula(g, i, repl)),
        Formula::ExistsF(k, g) => {
            if *k == i {
                f.clone()
            } else {
                Formula::exists_f(*k, subst_fun_formula(g, i, repl))
            }
        }
        Formula::ForallF(k, g) => {
            if *k == i {
                f.clone()
            } else {
                Formula::forall_f(*k, subst_fun_formula(g, i, repl))
            }
        }
    }
}
