//! Surface-syntax parser. Admits `or`, `not` and function-sort equality as
//! sugar; all three are eliminated here so the kernel only ever sees the
//! official connectives.

use super::{
    elaborate_disjunction, Formula, FunTerm, NumTerm, PrimTable, Sequent, VarIdx,
};
use crate::sexpr::{parse_one, Sexp, SexpError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("s-expression error: {0}")]
    Sexp(#[from] SexpError),
    #[error("expected {expected}, found `{found}`")]
    Unexpected { expected: &'static str, found: String },
    #[error("unknown primitive symbol `{0}`")]
    UnknownPrim(String),
    #[error("primitive `{name}` expects {want} arguments, found {got}")]
    PrimArity { name: String, want: usize, got: usize },
    #[error("equality arguments have mixed sorts: `{0}`")]
    MixedEquality(String),
    #[error("fresh variable collision while elaborating `or`")]
    FreshCollision,
}

enum AnyTerm {
    Num(NumTerm),
    Fun(FunTerm),
}

pub struct FormulaParser<'a> {
    prims: &'a PrimTable,
    next_fresh: VarIdx,
}

fn parse_var(atom: &str) -> Option<(char, VarIdx)> {
    let mut chars = atom.chars();
    let sort = chars.next()?;
    if sort != 'x' && sort != 'a' {
        return None;
    }
    let rest = chars.as_str();
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok().map(|n| (sort, n))
}

/// Accepts `x3` or a bare index for number binders, `a2` or bare for function
/// binders.
fn parse_binder(s: &Sexp, want_fun: bool) -> Result<VarIdx, ParseError> {
    let found = || ParseError::Unexpected {
        expected: if want_fun { "function variable" } else { "number variable" },
        found: s.to_string(),
    };
    let atom = s.as_atom().ok_or_else(found)?;
    if let Some((sort, idx)) = parse_var(atom) {
        let ok = if want_fun { sort == 'a' } else { sort == 'x' };
        return if ok { Ok(idx) } else { Err(found()) };
    }
    atom.parse().map_err(|_| found())
}

fn max_var_index(s: &Sexp, acc: &mut VarIdx) {
    match s {
        Sexp::Atom(a) => {
            if let Some((_, n)) = parse_var(a) {
                *acc = (*acc).max(n);
            }
        }
        Sexp::List(items) => {
            for it in items {
                max_var_index(it, acc);
            }
        }
    }
}

impl<'a> FormulaParser<'a> {
    /// Fresh indices for sugar elaboration start above every variable that
    /// appears anywhere in `root`.
    pub fn new(prims: &'a PrimTable, root: &Sexp) -> FormulaParser<'a> {
        let mut max = 0;
        max_var_index(root, &mut max);
        FormulaParser { prims, next_fresh: max + 1 }
    }

    fn fresh(&mut self) -> VarIdx {
        let v = self.next_fresh;
        self.next_fresh += 1;
        v
    }

    fn term(&mut self, s: &Sexp) -> Result<AnyTerm, ParseError> {
        match s {
            Sexp::Atom(a) => {
                if let Some((sort, idx)) = parse_var(a) {
                    return Ok(if sort == 'x' {
                        AnyTerm::Num(NumTerm::NumVar(idx))
                    } else {
                        AnyTerm::Fun(FunTerm::FunVar(idx))
                    });
                }
                if let Ok(n) = a.parse::<u64>() {
                    return Ok(AnyTerm::Num(NumTerm::numeral(n)));
                }
                Err(ParseError::Unexpected { expected: "term", found: a.clone() })
            }
            Sexp::List(items) => {
                let head = s.head().ok_or_else(|| ParseError::Unexpected {
                    expected: "term form",
                    found: s.to_string(),
                })?;
                match (head, &items[1..]) {
                    ("succ", [t]) => Ok(AnyTerm::Num(NumTerm::succ(self.num_term(t)?))),
                    ("prim", [Sexp::Atom(name), args @ ..]) => {
                        let id = self
                            .prims
                            .lookup(name)
                            .ok_or_else(|| ParseError::UnknownPrim(name.clone()))?;
                        let want = self.prims.arity(id);
                        if args.len() != want {
                            return Err(ParseError::PrimArity {
                                name: name.clone(),
                                want,
                                got: args.len(),
                            });
                        }
                        let parsed: Result<Vec<_>, _> =
                            args.iter().map(|a| self.num_term(a)).collect();
                        Ok(AnyTerm::Num(NumTerm::PrimApp(id, parsed?)))
                    }
                    ("app", [tau, t]) => Ok(AnyTerm::Num(NumTerm::apply(
                        self.fun_term(tau)?,
                        self.num_term(t)?,
                    ))),
                    ("lam", [b, t]) => {
                        let j = parse_binder(b, false)?;
                        Ok(AnyTerm::Fun(FunTerm::Lambda(j, Box::new(self.num_term(t)?))))
                    }
                    ("rec", [t, tau]) => Ok(AnyTerm::Fun(FunTerm::Rec(
                        Box::new(self.num_term(t)?),
                        Box::new(self.fun_term(tau)?),
                    ))),
                    _ => Err(ParseError::Unexpected { expected: "term form", found: s.to_string() }),
                }
            }
        }
    }

    fn num_term(&mut self, s: &Sexp) -> Result<NumTerm, ParseError> {
        match self.term(s)? {
            AnyTerm::Num(t) => Ok(t),
            AnyTerm::Fun(_) => {
                Err(ParseError::Unexpected { expected: "number term", found: s.to_string() })
            }
        }
    }

    fn fun_term(&mut self, s: &Sexp) -> Result<FunTerm, ParseError> {
        match self.term(s)? {
            AnyTerm::Fun(t) => Ok(t),
            AnyTerm::Num(_) => {
                Err(ParseError::Unexpected { expected: "function term", found: s.to_string() })
            }
        }
    }

    pub fn formula(&mut self, s: &Sexp) -> Result<Formula, ParseError> {
        match s {
            Sexp::Atom(a) if a == "bot" => Ok(Formula::Bot),
            Sexp::Atom(a) => {
                Err(ParseError::Unexpected { expected: "formula", found: a.clone() })
            }
            Sexp::List(items) => {
                let head = s.head().ok_or_else(|| ParseError::Unexpected {
                    expected: "formula form",
                    found: s.to_string(),
                })?;
                match (head, &items[1..]) {
                    ("eq", [l, r]) => {
                        let lt = self.term(l)?;
                        let rt = self.term(r)?;
                        match (lt, rt) {
                            (AnyTerm::Num(a), AnyTerm::Num(b)) => Ok(Formula::eq(a, b)),
                            (AnyTerm::Fun(tau1), AnyTerm::Fun(tau2)) => {
                                // extensionality: tau1 = tau2 elaborates to
                                // (alln z (eq (app tau1 z) (app tau2 z)))
                                let z = self.fresh();
                                Ok(Formula::forall_n(
                                    z,
                                    Formula::eq(
                                        NumTerm::apply(tau1, NumTerm::var(z)),
                                        NumTerm::apply(tau2, NumTerm::var(z)),
                                    ),
                                ))
                            }
                            _ => Err(ParseError::MixedEquality(s.to_string())),
                        }
                    }
                    ("and", [l, r]) => Ok(Formula::and(self.formula(l)?, self.formula(r)?)),
                    ("imp", [l, r]) => Ok(Formula::imp(self.formula(l)?, self.formula(r)?)),
                    ("not", [f]) => Ok(Formula::not(self.formula(f)?)),
                    ("or", [l, r]) => {
                        let phi = self.formula(l)?;
                        let psi = self.formula(r)?;
                        let fresh = self.fresh();
                        elaborate_disjunction(phi, psi, fresh)
                            .map_err(|_| ParseError::FreshCollision)
                    }
                    ("alln", [b, f]) => {
                        Ok(Formula::forall_n(parse_binder(b, false)?, self.formula(f)?))
                    }
                    ("exn", [b, f]) => {
                        Ok(Formula::exists_n(parse_binder(b, false)?, self.formula(f)?))
                    }
                    ("allf", [b, f]) => {
                        Ok(Formula::forall_f(parse_binder(b, true)?, self.formula(f)?))
                    }
                    ("exf", [b, f]) => {
                        Ok(Formula::exists_f(parse_binder(b, true)?, self.formula(f)?))
                    }
                    _ => Err(ParseError::Unexpected {
                        expected: "formula form",
                        found: s.to_string(),
                    }),
                }
            }
        }
    }

    pub fn sequent(&mut self, s: &Sexp) -> Result<Sequent, ParseError> {
        let items = s.as_list().filter(|l| l.len() == 3 && s.head() == Some("seq")).ok_or_else(
            || ParseError::Unexpected { expected: "(seq (...) f)", found: s.to_string() },
        )?;
        let ants = items[1].as_list().ok_or_else(|| ParseError::Unexpected {
            expected: "antecedent list",
            found: items[1].to_string(),
        })?;
        let antecedent: Result<Vec<_>, _> = ants.iter().map(|f| self.formula(f)).collect();
        Ok(Sequent::new(antecedent?, self.formula(&items[2])?))
    }

    pub fn witness_num_term(&mut self, s: &Sexp) -> Result<NumTerm, ParseError> {
        self.num_term(s)
    }

    pub fn witness_fun_term(&mut self, s: &Sexp) -> Result<FunTerm, ParseError> {
        self.fun_term(s)
    }

    pub fn any_is_fun(&mut self, s: &Sexp) -> Result<bool, ParseError> {
        Ok(matches!(self.term(s)?, AnyTerm::Fun(_)))
    }
}

/// Parse one formula from source text.
pub fn parse_formula(text: &str, prims: &PrimTable) -> Result<Formula, ParseError> {
    let sexp = parse_one(text)?;
    FormulaParser::new(prims, &sexp).formula(&sexp)
}

/// Parse one sequent (`(seq (f ...) f)`) from source text.
pub fn parse_sequent(text: &str, prims: &PrimTable) -> Result<Sequent, ParseError> {
    let sexp = parse_one(text)?;
    FormulaParser::new(prims, &sexp).sequent(&sexp)
}
