//! Canonical printer. Output is sugar-free and re-parses to the same AST.

use super::{Formula, FunTerm, NumTerm, PrimTable, Sequent};
use crate::sexpr::Sexp;

pub fn num_term_sexp(t: &NumTerm, prims: &PrimTable) -> Sexp {
    match t {
        NumTerm::NumVar(j) => Sexp::atom(format!("x{j}")),
        NumTerm::Zero => Sexp::atom("0"),
        NumTerm::Succ(s) => Sexp::list(vec![Sexp::atom("succ"), num_term_sexp(s, prims)]),
        NumTerm::PrimApp(f, args) => {
            let mut items = vec![Sexp::atom("prim"), Sexp::atom(prims.name(*f))];
            items.extend(args.iter().map(|a| num_term_sexp(a, prims)));
            Sexp::list(items)
        }
        NumTerm::FunApp(tau, s) => Sexp::list(vec![
            Sexp::atom("app"),
            fun_term_sexp(tau, prims),
            num_term_sexp(s, prims),
        ]),
    }
}

pub fn fun_term_sexp(tau: &FunTerm, prims: &PrimTable) -> Sexp {
    match tau {
        FunTerm::FunVar(i) => Sexp::atom(format!("a{i}")),
        FunTerm::Lambda(j, body) => Sexp::list(vec![
            Sexp::atom("lam"),
            Sexp::atom(format!("x{j}")),
            num_term_sexp(body, prims),
        ]),
        FunTerm::Rec(base, step) => Sexp::list(vec![
            Sexp::atom("rec"),
            num_term_sexp(base, prims),
            fun_term_sexp(step, prims),
        ]),
    }
}

pub fn formula_sexp(f: &Formula, prims: &PrimTable) -> Sexp {
    match f {
        Formula::Bot => Sexp::atom("bot"),
        Formula::Eq(l, r) => Sexp::list(vec![
            Sexp::atom("eq"),
            num_term_sexp(l, prims),
            num_term_sexp(r, prims),
        ]),
        Formula::And(l, r) => Sexp::list(vec![
            Sexp::atom("and"),
            formula_sexp(l, prims),
            formula_sexp(r, prims),
        ]),
        Formula::Imp(l, r) => Sexp::list(vec![
            Sexp::atom("imp"),
            formula_sexp(l, prims),
            formula_sexp(r, prims),
        ]),
        Formula::ExistsN(j, g) => Sexp::list(vec![
            Sexp::atom("exn"),
            Sexp::atom(format!("x{j}")),
            formula_sexp(g, prims),
        ]),
        Formula::ForallN(j, g) => Sexp::list(vec![
            Sexp::atom("alln"),
            Sexp::atom(format!("x{j}")),
            formula_sexp(g, prims),
        ]),
        Formula::ExistsF(i, g) => Sexp::list(vec![
            Sexp::atom("exf"),
            Sexp::atom(format!("a{i}")),
            formula_sexp(g, prims),
        ]),
        Formula::ForallF(i, g) => Sexp::list(vec![
            Sexp::atom("allf"),
            Sexp::atom(format!("a{i}")),
            formula_sexp(g, prims),
        ]),
    }
}

pub fn sequent_sexp(s: &Sequent, prims: &PrimTable) -> Sexp {
    Sexp::list(vec![
        Sexp::atom("seq"),
        Sexp::list(s.antecedent.iter().map(|f| formula_sexp(f, prims)).collect()),
        formula_sexp(&s.succedent, prims),
    ])
}

pub fn print_num_term(t: &NumTerm, prims: &PrimTable) -> String {
    num_term_sexp(t, prims).to_string()
}

pub fn print_fun_term(tau: &FunTerm, prims: &PrimTable) -> String {
    fun_term_sexp(tau, prims).to_string()
}

pub fn print_formula(f: &Formula, prims: &PrimTable) -> String {
    formula_sexp(f, prims).to_string()
}

pub fn print_sequent(s: &Sequent, prims: &PrimTable) -> String {
    sequent_sexp(s, prims).to_string()
}
