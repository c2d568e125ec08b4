//! Deterministic pseudo-random generation: terms, formulas, finite-table
//! functions and valuation suites. Everything is seeded so reports are
//! reproducible run to run.

use crate::syntax::{FiniteFn, Formula, FunTerm, NumTerm, PrimTable, Valuation, VarIdx, VarSets};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Corner-case tables plus seeded random tables; used both as the range of
/// function quantifiers in bounded truth and as valuation material.
pub fn fn_family(bound: u64, seed: u64, random_count: usize) -> Vec<FiniteFn> {
    let len = (bound + 1) as usize;
    let mut out = vec![
        FiniteFn::constant(len, 0),
        FiniteFn::constant(len, 1),
        FiniteFn::new((0..len as u64).collect()),
        FiniteFn::new((0..len as u64).rev().collect()),
    ];
    for spike in 0..3.min(len) {
        let mut tbl = vec![0; len];
        tbl[spike] = 1;
        out.push(FiniteFn::new(tbl));
    }
    let mut r = rng(seed);
    for _ in 0..random_count {
        let tbl = (0..len).map(|_| r.gen_range(0..=bound)).collect();
        out.push(FiniteFn::new(tbl));
    }
    out
}

pub fn random_table(r: &mut ChaCha8Rng, bound: u64) -> FiniteFn {
    let len = r.gen_range(1..=(bound + 1)) as usize;
    FiniteFn::new((0..len).map(|_| r.gen_range(0..=bound)).collect())
}

/// A valuation covering the given variable sets: corner cases first
/// (all-zero, all-one, single-spike), then seeded random fill.
pub fn valuation_suite(vars: &VarSets, bound: u64, seed: u64, count: usize) -> Vec<Valuation> {
    let mut fun_idxs: Vec<VarIdx> = vars.free_fun.union(&vars.bound_fun).copied().collect();
    fun_idxs.sort_unstable();
    let mut num_idxs: Vec<VarIdx> = vars.free_num.union(&vars.bound_num).copied().collect();
    num_idxs.sort_unstable();
    let len = (bound + 1) as usize;

    let mut out = Vec::new();
    let corners: [(&dyn Fn(usize) -> FiniteFn, u64); 3] = [
        (&|l| FiniteFn::constant(l, 0), 0),
        (&|l| FiniteFn::constant(l, 1), 1),
        (
            &|l| {
                let mut t = vec![0; l];
                if l > 0 {
                    t[0] = 1;
                }
                FiniteFn::new(t)
            },
            2,
        ),
    ];
    for (mk, n) in corners {
        let mut v = Valuation::new();
        for &i in &fun_idxs {
            v.funs.insert(i, mk(len));
        }
        for &j in &num_idxs {
            v.nums.insert(j, n.min(bound));
        }
        out.push(v);
    }
    let mut r = rng(seed);
    while out.len() < count {
        let mut v = Valuation::new();
        for &i in &fun_idxs {
            v.funs.insert(i, random_table(&mut r, bound));
        }
        for &j in &num_idxs {
            v.nums.insert(j, r.gen_range(0..=bound));
        }
        out.push(v);
    }
    out.truncate(count);
    out
}

/// Random number term of bounded depth over the given free variables.
pub fn random_num_term(
    r: &mut ChaCha8Rng,
    prims: &PrimTable,
    num_vars: &[VarIdx],
    fun_vars: &[VarIdx],
    depth: usize,
    next_binder: &mut VarIdx,
) -> NumTerm {
    if depth == 0 {
        return match r.gen_range(0..3) {
            0 if !num_vars.is_empty() => NumTerm::var(num_vars[r.gen_range(0..num_vars.len())]),
            1 => NumTerm::numeral(r.gen_range(0..4)),
            _ => NumTerm::Zero,
        };
    }
    match r.gen_range(0..6) {
        0 => NumTerm::succ(random_num_term(r, prims, num_vars, fun_vars, depth - 1, next_binder)),
        1 | 2 => {
            // slow-growing symbols only: keeps every intermediate value (and
            // hence every Rec iteration count) small enough to test against
            // the literal-substitution reference evaluator
            let ids = [
                prims.id_add(),
                prims.id_sub(),
                prims.id_eqc(),
                prims.id_ltc(),
                prims.lookup("pred").unwrap(),
            ];
            let id = ids[r.gen_range(0..ids.len())];
            let args = (0..prims.arity(id))
                .map(|_| random_num_term(r, prims, num_vars, fun_vars, depth - 1, next_binder))
                .collect();
            NumTerm::PrimApp(id, args)
        }
        3 | 4 => {
            let tau = random_fun_term(r, prims, num_vars, fun_vars, depth - 1, next_binder);
            let arg = random_num_term(r, prims, num_vars, fun_vars, depth - 1, next_binder);
            NumTerm::apply(tau, arg)
        }
        _ => {
            if num_vars.is_empty() {
                NumTerm::numeral(r.gen_range(0..4))
            } else {
                NumTerm::var(num_vars[r.gen_range(0..num_vars.len())])
            }
        }
    }
}

pub fn random_fun_term(
    r: &mut ChaCha8Rng,
    prims: &PrimTable,
    num_vars: &[VarIdx],
    fun_vars: &[VarIdx],
    depth: usize,
    next_binder: &mut VarIdx,
) -> FunTerm {
    if depth == 0 || (r.gen_bool(0.4) && !fun_vars.is_empty()) {
        if !fun_vars.is_empty() {
            return FunTerm::FunVar(fun_vars[r.gen_range(0..fun_vars.len())]);
        }
    }
    if depth == 0 {
        // no function variables available: a constant lambda
        return FunTerm::Lambda(*next_binder, Box::new(NumTerm::Zero));
    }
    if r.gen_bool(0.7) {
        let b = *next_binder;
        *next_binder += 1;
        let mut inner: Vec<VarIdx> = num_vars.to_vec();
        inner.push(b);
        let body = random_num_term(r, prims, &inner, fun_vars, depth - 1, next_binder);
        FunTerm::Lambda(b, Box::new(body))
    } else {
        let base = random_num_term(r, prims, num_vars, fun_vars, depth - 1, next_binder);
        let step = random_fun_term(r, prims, num_vars, fun_vars, depth - 1, next_binder);
        FunTerm::Rec(Box::new(base), Box::new(step))
    }
}

/// Random formula with globally unique binder indices, quantifier depth at
/// most `qdepth`.
pub fn random_formula(
    r: &mut ChaCha8Rng,
    prims: &PrimTable,
    num_vars: &[VarIdx],
    fun_vars: &[VarIdx],
    depth: usize,
    qdepth: usize,
    next_binder: &mut VarIdx,
) -> Formula {
    if depth == 0 {
        let l = random_num_term(r, prims, num_vars, fun_vars, 1, next_binder);
        let rr = random_num_term(r, prims, num_vars, fun_vars, 1, next_binder);
        return if r.gen_bool(0.1) { Formula::Bot } else { Formula::eq(l, rr) };
    }
    let allow_q = qdepth > 0;
    match r.gen_range(0..if allow_q { 8 } else { 4 }) {
        0 => {
            let l = random_num_term(r, prims, num_vars, fun_vars, 2, next_binder);
            let rr = random_num_term(r, prims, num_vars, fun_vars, 2, next_binder);
            Formula::eq(l, rr)
        }
        1 => Formula::and(
            random_formula(r, prims, num_vars, fun_vars, depth - 1, qdepth, next_binder),
            random_formula(r, prims, num_vars, fun_vars, depth - 1, qdepth, next_binder),
        ),
        2 | 3 => Formula::imp(
            random_formula(r, prims, num_vars, fun_vars, depth - 1, qdepth, next_binder),
            random_formula(r, prims, num_vars, fun_vars, depth - 1, qdepth, next_binder),
        ),
        4 | 5 => {
            let b = *next_binder;
            *next_binder += 1;
            let mut inner = num_vars.to_vec();
            inner.push(b);
            let body =
                random_formula(r, prims, &inner, fun_vars, depth - 1, qdepth - 1, next_binder);
            if r.gen_bool(0.5) {
                Formula::forall_n(b, body)
            } else {
                Formula::exists_n(b, body)
            }
        }
        _ => {
            let b = *next_binder;
            *next_binder += 1;
            let mut inner = fun_vars.to_vec();
            inner.push(b);
            let body =
                random_formula(r, prims, num_vars, &inner, depth - 1, qdepth - 1, next_binder);
            if r.gen_bool(0.5) {
                Formula::forall_f(b, body)
            } else {
                Formula::exists_f(b, body)
            }
        }
    }
}
