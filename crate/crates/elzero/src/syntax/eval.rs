//! Standard-model evaluation of number terms under a valuation. Lambda
//! applies by binding the argument, Rec by iterating the step function; the
//! term language has no unbounded search, so evaluation always terminates.

use super::{FunTerm, NumTerm, PrimTable, Valuation, VarIdx};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("number variable x{0} is not assigned")]
    UnboundNum(VarIdx),
    #[error("function variable a{0} is not assigned")]
    UnboundFun(VarIdx),
    #[error("primitive symbol id {0} applied to {1} arguments, expected {2}")]
    Arity(u16, usize, usize),
}

pub fn eval_num_term(t: &NumTerm, sigma: &Valuation, prims: &PrimTable) -> Result<u64, EvalError> {
    match t {
        NumTerm::NumVar(j) => sigma.nums.get(j).copied().ok_or(EvalError::UnboundNum(*j)),
        NumTerm::Zero => Ok(0),
        NumTerm::Succ(s) => Ok(eval_num_term(s, sigma, prims)?.saturating_add(1)),
        NumTerm::PrimApp(f, args) => {
            let want = prims.arity(*f);
            if args.len() != want {
                return Err(EvalError::Arity(*f, args.len(), want));
            }
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(eval_num_term(a, sigma, prims)?);
            }
            Ok(prims.eval(*f, &vals))
        }
        NumTerm::FunApp(tau, s) => {
            let a = eval_num_term(s, sigma, prims)?;
            eval_fun_apply(tau, a, sigma, prims)
        }
    }
}

/// Apply a function term to a natural.
pub fn eval_fun_apply(
    tau: &FunTerm,
    a: u64,
    sigma: &Valuation,
    prims: &PrimTable,
) -> Result<u64, EvalError> {
    match tau {
        FunTerm::FunVar(i) => {
            sigma.funs.get(i).map(|f| f.apply(a)).ok_or(EvalError::UnboundFun(*i))
        }
        FunTerm::Lambda(j, body) => {
            let mut inner = sigma.clone();
            inner.nums.insert(*j, a);
            eval_num_term(body, &inner, prims)
        }
        FunTerm::Rec(base, step) => {
            let mut v = eval_num_term(base, sigma, prims)?;
            for _ in 0..a {
                v = eval_fun_apply(step, v, sigma, prims)?;
            }
            Ok(v)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{FiniteFn, Formula};

    fn t() -> PrimTable {
        PrimTable::standard()
    }

    #[test]
    fn succ_zero_is_one() {
        let prims = t();
        let sigma = Valuation::new();
        assert_eq!(eval_num_term(&NumTerm::succ(NumTerm::Zero), &sigma, &prims), Ok(1));
    }

    #[test]
    fn rec_unfolds() {
        // (R 0 (lam y. y + 2))(3) = 6, unfolding the recurrence three times:
        // 0 -> 2 -> 4 -> 6.
        let prims = t();
        let add = prims.id_add();
        let step = FunTerm::Lambda(
            9,
            Box::new(NumTerm::PrimApp(add, vec![NumTerm::var(9), NumTerm::numeral(2)])),
        );
        let rec = FunTerm::Rec(Box::new(NumTerm::Zero), Box::new(step));
        let term = NumTerm::apply(rec, NumTerm::numeral(3));
        assert_eq!(eval_num_term(&term, &Valuation::new(), &prims), Ok(6));
    }

    #[test]
    fn lambda_applies() {
        // (lam x1. S(x1))(4) = 5
        let prims = t();
        let lam = FunTerm::Lambda(1, Box::new(NumTerm::succ(NumTerm::var(1))));
        let term = NumTerm::apply(lam, NumTerm::numeral(4));
        assert_eq!(eval_num_term(&term, &Valuation::new(), &prims), Ok(5));
        let _ = Formula::Bot; // keep the import honest
    }

    #[test]
    fn unbound_variable_reported() {
        let prims = t();
        assert_eq!(
            eval_num_term(&NumTerm::var(3), &Valuation::new(), &prims),
            Err(EvalError::UnboundNum(3))
        );
    }

    #[test]
    fn table_defaults_to_zero() {
        let prims = t();
        let sigma = Valuation::new().with_fun(1, FiniteFn::new(vec![7, 8]));
        let term = NumTerm::apply(FunTerm::FunVar(1), NumTerm::numeral(5));
        assert_eq!(eval_num_term(&term, &sigma, &prims), Ok(0));
    }
}
