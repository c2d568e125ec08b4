//! Truth over the naturals, approximated at desk scale: number quantifiers
//! range over `0..=bound`, function quantifiers over a fixed deterministic
//! family of finite tables. The verdict is classical truth in that finite
//! structure. This makes the toolkit a falsifier, never a prover: a Holds
//! verdict certifies the bounded structure only.

use crate::gen::fn_family;
use crate::syntax::{
    eval_num_term, formula_vars, EvalError, FiniteFn, Formula, PrimTable, Valuation, VarIdx,
};

/// Three-valued check outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ternary {
    Holds,
    Fails,
    Unknown(UnknownReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnknownReason {
    FuelExhausted,
    BoundExhausted,
}

impl Ternary {
    pub fn from_bool(b: bool) -> Ternary {
        if b {
            Ternary::Holds
        } else {
            Ternary::Fails
        }
    }

    pub fn and(self, other: Ternary) -> Ternary {
        match (self, other) {
            (Ternary::Fails, _) | (_, Ternary::Fails) => Ternary::Fails,
            (Ternary::Unknown(r), _) | (_, Ternary::Unknown(r)) => Ternary::Unknown(r),
            _ => Ternary::Holds,
        }
    }

    pub fn is_holds(self) -> bool {
        self == Ternary::Holds
    }

    pub fn is_fails(self) -> bool {
        self == Ternary::Fails
    }
}

const TRUTH_FAMILY_SEED: u64 = 0xe10;

#[derive(Debug, Clone)]
pub struct TruthCfg {
    pub bound: u64,
    pub fn_samples: Vec<FiniteFn>,
}

impl TruthCfg {
    pub fn new(bound: u64) -> TruthCfg {
        TruthCfg { bound, fn_samples: fn_family(bound, TRUTH_FAMILY_SEED, 8) }
    }
}

/// Truth of `f` under `sigma` in the bounded structure. Every free variable
/// of `f` must be assigned by `sigma`.
pub fn formula_true(
    f: &Formula,
    sigma: &Valuation,
    cfg: &TruthCfg,
    prims: &PrimTable,
) -> Result<bool, EvalError> {
    match f {
        Formula::Bot => Ok(false),
        Formula::Eq(l, r) => {
            Ok(eval_num_term(l, sigma, prims)? == eval_num_term(r, sigma, prims)?)
        }
        Formula::And(l, r) => {
            Ok(formula_true(l, sigma, cfg, prims)? && formula_true(r, sigma, cfg, prims)?)
        }
        Formula::Imp(l, r) => {
            Ok(!formula_true(l, sigma, cfg, prims)? || formula_true(r, sigma, cfg, prims)?)
        }
        Formula::ExistsN(j, g) => {
            for n in 0..=cfg.bound {
                let inner = sigma.clone().with_num(*j, n);
                if formula_true(g, &inner, cfg, prims)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::ForallN(j, g) => {
            for n in 0..=cfg.bound {
                let inner = sigma.clone().with_num(*j, n);
                if !formula_true(g, &inner, cfg, prims)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::ExistsF(i, g) => {
            for t in &cfg.fn_samples {
                let inner = sigma.clone().with_fun(*i, t.clone());
                if formula_true(g, &inner, cfg, prims)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::ForallF(i, g) => {
            for t in &cfg.fn_samples {
                let inner = sigma.clone().with_fun(*i, t.clone());
                if !formula_true(g, &inner, cfg, prims)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Truth of the universal closure of `f`: every free variable is quantified,
/// numbers over `0..=bound` and functions over the sample family.
pub fn closure_true(f: &Formula, cfg: &TruthCfg, prims: &PrimTable) -> Result<bool, EvalError> {
    let vars = formula_vars(f);
    let fun_free: Vec<VarIdx> = vars.free_fun.iter().copied().collect();
    let num_free: Vec<VarIdx> = vars.free_num.iter().copied().collect();
    closure_rec(f, &fun_free, &num_free, &mut Valuation::new(), cfg, prims)
}

fn closure_rec(
    f: &Formula,
    fun_free: &[VarIdx],
    num_free: &[VarIdx],
    sigma: &mut Valuation,
    cfg: &TruthCfg,
    prims: &PrimTable,
) -> Result<bool, EvalError> {
    if let Some((&i, rest)) = fun_free.split_first() {
        for t in &cfg.fn_samples {
            sigma.funs.insert(i, t.clone());
            if !closure_rec(f, rest, num_free, sigma, cfg, prims)? {
                sigma.funs.remove(&i);
                return Ok(false);
            }
        }
        sigma.funs.remove(&i);
        return Ok(true);
    }
    if let Some((&j, rest)) = num_free.split_first() {
        for n in 0..=cfg.bound {
            sigma.nums.insert(j, n);
            if !closure_rec(f, fun_free, rest, sigma, cfg, prims)? {
                sigma.nums.remove(&j);
                return Ok(false);
            }
        }
        sigma.nums.remove(&j);
        return Ok(true);
    }
    formula_true(f, sigma, cfg, prims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::NumTerm;

    #[test]
    fn atoms_and_connectives() {
        let prims = PrimTable::standard();
        let cfg = TruthCfg::new(4);
        let sigma = Valuation::new();
        let t = Formula::eq(NumTerm::Zero, NumTerm::Zero);
        assert!(formula_true(&t, &sigma, &cfg, &prims).unwrap());
        assert!(!formula_true(&Formula::Bot, &sigma, &cfg, &prims).unwrap());
        assert!(formula_true(&Formula::not(Formula::Bot), &sigma, &cfg, &prims).unwrap());
    }

    #[test]
    fn quantifiers_range_over_bound() {
        let prims = PrimTable::standard();
        let cfg = TruthCfg::new(4);
        let sigma = Valuation::new();
        // exists x1 (x1 = 3) holds; forall x1 (x1 = 3) fails
        let ex = Formula::exists_n(1, Formula::eq(NumTerm::var(1), NumTerm::numeral(3)));
        let all = Formula::forall_n(1, Formula::eq(NumTerm::var(1), NumTerm::numeral(3)));
        assert!(formula_true(&ex, &sigma, &cfg, &prims).unwrap());
        assert!(!formula_true(&all, &sigma, &cfg, &prims).unwrap());
    }

    #[test]
    fn closure_quantifies_free_variables() {
        let prims = PrimTable::standard();
        let cfg = TruthCfg::new(4);
        // x1 = x1 closes to truth; x1 = 0 does not
        let refl = Formula::eq(NumTerm::var(1), NumTerm::var(1));
        let zero = Formula::eq(NumTerm::var(1), NumTerm::Zero);
        assert!(closure_true(&refl, &cfg, &prims).unwrap());
        assert!(!closure_true(&zero, &cfg, &prims).unwrap());
    }

    #[test]
    fn function_quantifier_uses_samples() {
        let prims = PrimTable::standard();
        let cfg = TruthCfg::new(4);
        let sigma = Valuation::new();
        // exists a1 (a1(0) = 1) holds via the all-ones table
        let f = Formula::exists_f(
            1,
            Formula::eq(
                NumTerm::apply(crate::syntax::FunTerm::FunVar(1), NumTerm::Zero),
                NumTerm::numeral(1),
            ),
        );
        assert!(formula_true(&f, &sigma, &cfg, &prims).unwrap());
    }
}
