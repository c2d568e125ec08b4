//! A small oracle-machine language standing in for Kleene indices: an
//! append-only code store maps indices to programs over function and number
//! arguments, evaluated pointwise under a fuel budget. Composition and an
//! unbounded mu-search are the only ways to build new code from old, so the
//! store stays acyclic and every index's semantics is fixed at mint time.

mod serial;

pub use serial::{parse_store, store_sexp};

use crate::syntax::{FiniteFn, Formula, FunTerm, NumTerm, PrimTable, VarIdx};
use std::collections::BTreeMap;
use thiserror::Error;

pub type CodeIndex = usize;

/// Declared arguments of a program: `fun_vars` name the function arguments
/// in order, `num_vars` the number arguments. Callers pass positionally in
/// this order; the variable names record the intended wiring for callers
/// that assemble arguments from an environment.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    pub fun_vars: Vec<VarIdx>,
    pub num_vars: Vec<VarIdx>,
}

impl Signature {
    pub fn new(fun_vars: Vec<VarIdx>, num_vars: Vec<VarIdx>) -> Signature {
        Signature { fun_vars, num_vars }
    }

    pub fn fun_pos(&self, var: VarIdx) -> Option<usize> {
        self.fun_vars.iter().position(|&v| v == var)
    }

    pub fn num_pos(&self, var: VarIdx) -> Option<usize> {
        self.num_vars.iter().position(|&v| v == var)
    }
}

/// Where a term-level number variable gets its value during `TermNum` /
/// `TermFun` evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumBindSrc {
    Arg(usize),
    Input,
    MuVar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Fun(usize),
    Num(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum OmlProgram {
    ConstNat(u64),
    /// value of the number argument at a position
    ProjNum(usize),
    /// query the function argument at a position with the subprogram's value
    ProjFunQuery(usize, Box<OmlProgram>),
    /// the pointwise input `a` of the call
    Input,
    /// the current candidate of the innermost mu-search
    MuVar,
    PrimOp(crate::syntax::PrimId, Vec<OmlProgram>),
    /// evaluate a number term; free variables resolve through the bindings
    TermNum {
        term: NumTerm,
        fun_bind: Vec<(VarIdx, usize)>,
        num_bind: Vec<(VarIdx, NumBindSrc)>,
    },
    /// evaluate a function term applied to the pointwise input
    TermFun {
        term: FunTerm,
        fun_bind: Vec<(VarIdx, usize)>,
        num_bind: Vec<(VarIdx, NumBindSrc)>,
    },
    /// least m with body = 0; the body reads m as `MuVar`
    MuSearch(Box<OmlProgram>),
    /// call earlier code with arguments drawn from this program's arguments
    ComposeCall {
        callee: CodeIndex,
        fun_map: Vec<usize>,
        num_map: Vec<usize>,
    },
    /// run `inner` with one argument slot served lazily by `replacement`
    /// (evaluated only at queried points); the slot disappears from the
    /// outer signature
    IgnoreAndReplace {
        inner: CodeIndex,
        slot: Slot,
        replacement: CodeIndex,
        repl_fun_map: Vec<usize>,
        repl_num_map: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Value(u64),
    FuelExhausted,
    Stuck(String),
}

impl Outcome {
    pub fn value(&self) -> Option<u64> {
        match self {
            Outcome::Value(b) => Some(*b),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum MintError {
    #[error("term variable {0} is not covered by the signature")]
    UnboundTermVar(String),
    #[error("mu matrix is not quantifier-free")]
    MuNotQuantifierFree,
    #[error("no such code index {0}")]
    BadIndex(CodeIndex),
    #[error("slot {0:?} out of range for signature of code {1}")]
    BadSlot(Slot, CodeIndex),
    #[error("cannot wire replacement argument {0}: not in the outer signature")]
    WiringMismatch(String),
}

#[derive(Debug, Default)]
pub struct CodeStore {
    entries: Vec<(OmlProgram, Signature)>,
}

enum Stop {
    Fuel,
    Stuck(String),
}

type Res<T> = Result<T, Stop>;

/// A function argument at call time: either a concrete table or a lazy
/// store-backed computation.
#[derive(Clone)]
enum FunArg<'a> {
    Table(&'a FiniteFn),
    Lazy {
        code: CodeIndex,
        fun_args: Vec<FunArg<'a>>,
        num_args: Vec<NumArg<'a>>,
    },
}

#[derive(Clone)]
enum NumArg<'a> {
    Val(u64),
    Lazy {
        code: CodeIndex,
        fun_args: Vec<FunArg<'a>>,
        num_args: Vec<NumArg<'a>>,
    },
}

struct Machine<'a> {
    store: &'a CodeStore,
    prims: &'a PrimTable,
    fuel: u64,
}

impl<'a> Machine<'a> {
    fn tick(&mut self) -> Res<()> {
        if self.fuel == 0 {
            return Err(Stop::Fuel);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn query_fun(&mut self, arg: &FunArg<'a>, point: u64) -> Res<u64> {
        self.tick()?;
        match arg {
            FunArg::Table(t) => Ok(t.apply(point)),
            FunArg::Lazy { code, fun_args, num_args } => {
                let (prog, sig) = self
                    .store
                    .entries
                    .get(*code)
                    .ok_or_else(|| Stop::Stuck(format!("dangling code index {code}")))?;
                if fun_args.len() != sig.fun_vars.len() || num_args.len() != sig.num_vars.len() {
                    return Err(Stop::Stuck(format!("arity mismatch calling code {code}")));
                }
                let fun_args = fun_args.clone();
                let num_args = num_args.clone();
                self.run(prog, &fun_args, &num_args, point, None)
            }
        }
    }

    fn read_num(&mut self, arg: &NumArg<'a>) -> Res<u64> {
        match arg {
            NumArg::Val(v) => Ok(*v),
            NumArg::Lazy { code, fun_args, num_args } => {
                // number-valued code is queried at point 0
                let f = FunArg::Lazy {
                    code: *code,
                    fun_args: fun_args.clone(),
                    num_args: num_args.clone(),
                };
                self.query_fun(&f, 0)
            }
        }
    }

    fn run(
        &mut self,
        prog: &OmlProgram,
        funs: &[FunArg<'a>],
        nums: &[NumArg<'a>],
        input: u64,
        mu: Option<u64>,
    ) -> Res<u64> {
        self.tick()?;
        match prog {
            OmlProgram::ConstNat(c) => Ok(*c),
            OmlProgram::Input => Ok(input),
            OmlProgram::MuVar => {
                mu.ok_or_else(|| Stop::Stuck("mu variable outside a search".into()))
            }
            OmlProgram::ProjNum(k) => {
                let arg = nums
                    .get(*k)
                    .cloned()
                    .ok_or_else(|| Stop::Stuck(format!("number argument {k} out of range")))?;
                self.read_num(&arg)
            }
            OmlProgram::ProjFunQuery(k, at) => {
                let point = self.run(at, funs, nums, input, mu)?;
                let arg = funs
                    .get(*k)
                    .cloned()
                    .ok_or_else(|| Stop::Stuck(format!("function argument {k} out of range")))?;
                self.query_fun(&arg, point)
            }
            OmlProgram::PrimOp(id, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.run(a, funs, nums, input, mu)?);
                }
                if vals.len() != self.prims.arity(*id) {
                    return Err(Stop::Stuck("primitive arity mismatch".into()));
                }
                Ok(self.prims.eval(*id, &vals))
            }
            OmlProgram::TermNum { term, fun_bind, num_bind } => {
                let env = self.term_env(funs, nums, input, mu, fun_bind, num_bind)?;
                self.eval_term_num(term, &env)
            }
            OmlProgram::TermFun { term, fun_bind, num_bind } => {
                let env = self.term_env(funs, nums, input, mu, fun_bind, num_bind)?;
                self.eval_term_fun(term, input, &env)
            }
            OmlProgram::MuSearch(body) => {
                let mut m = 0u64;
                loop {
                    self.tick()?;
                    if self.run(body, funs, nums, input, Some(m))? == 0 {
                        return Ok(m);
                    }
                    m = m.checked_add(1).ok_or(Stop::Fuel)?;
                }
            }
            OmlProgram::ComposeCall { callee, fun_map, num_map } => {
                let f: Res<Vec<FunArg>> = fun_map
                    .iter()
                    .map(|&k| {
                        funs.get(k)
                            .cloned()
                            .ok_or_else(|| Stop::Stuck(format!("compose fun map {k} bad")))
                    })
                    .collect();
                let n: Res<Vec<NumArg>> = num_map
                    .iter()
                    .map(|&k| {
                        nums.get(k)
                            .cloned()
                            .ok_or_else(|| Stop::Stuck(format!("compose num map {k} bad")))
                    })
                    .collect();
                let callee_arg = FunArg::Lazy { code: *callee, fun_args: f?, num_args: n? };
                self.query_fun(&callee_arg, input)
            }
            OmlProgram::IgnoreAndReplace { inner, slot, replacement, repl_fun_map, repl_num_map } => {
                let rf: Res<Vec<FunArg>> = repl_fun_map
                    .iter()
                    .map(|&k| {
                        funs.get(k)
                            .cloned()
                            .ok_or_else(|| Stop::Stuck(format!("replacement fun map {k} bad")))
                    })
                    .collect();
                let rn: Res<Vec<NumArg>> = repl_num_map
                    .iter()
                    .map(|&k| {
                        nums.get(k)
                            .cloned()
                            .ok_or_else(|| Stop::Stuck(format!("replacement num map {k} bad")))
                    })
                    .collect();
                let lazy_code = *replacement;
                let (rf, rn) = (rf?, rn?);
                let mut inner_funs = Vec::new();
                let mut inner_nums = Vec::new();
                match slot {
                    Slot::Fun(p) => {
                        for (i, a) in funs.iter().enumerate() {
                            if i == *p {
                                inner_funs.push(FunArg::Lazy {
                                    code: lazy_code,
                                    fun_args: rf.clone(),
                                    num_args: rn.clone(),
                                });
                            }
                            inner_funs.push(a.clone());
                        }
                        if *p == funs.len() {
                            inner_funs.push(FunArg::Lazy {
                                code: lazy_code,
                                fun_args: rf,
                                num_args: rn,
                            });
                        }
                        inner_nums.extend(nums.iter().cloned());
                    }
                    Slot::Num(p) => {
                        inner_funs.extend(funs.iter().cloned());
                        for (i, a) in nums.iter().enumerate() {
                            if i == *p {
                                inner_nums.push(NumArg::Lazy {
                                    code: lazy_code,
                                    fun_args: rf.clone(),
                                    num_args: rn.clone(),
                                });
                            }
                            inner_nums.push(a.clone());
                        }
                        if *p == nums.len() {
                            inner_nums.push(NumArg::Lazy {
                                code: lazy_code,
                                fun_args: rf,
                                num_args: rn,
                            });
                        }
                    }
                }
                let callee = FunArg::Lazy { code: *inner, fun_args: inner_funs, num_args: inner_nums };
                self.query_fun(&callee, input)
            }
        }
    }

    fn term_env(
        &mut self,
        funs: &[FunArg<'a>],
        nums: &[NumArg<'a>],
        input: u64,
        mu: Option<u64>,
        fun_bind: &[(VarIdx, usize)],
        num_bind: &[(VarIdx, NumBindSrc)],
    ) -> Res<TermEnv<'a>> {
        let mut env = TermEnv::default();
        for (var, pos) in fun_bind {
            let arg = funs
                .get(*pos)
                .cloned()
                .ok_or_else(|| Stop::Stuck(format!("fun binding {pos} out of range")))?;
            env.funs.insert(*var, arg);
        }
        for (var, src) in num_bind {
            let v = match src {
                NumBindSrc::Arg(pos) => {
                    let arg = nums
                        .get(*pos)
                        .cloned()
                        .ok_or_else(|| Stop::Stuck(format!("num binding {pos} out of range")))?;
                    self.read_num(&arg)?
                }
                NumBindSrc::Input => input,
                NumBindSrc::MuVar => {
                    mu.ok_or_else(|| Stop::Stuck("mu binding outside a search".into()))?
                }
            };
            env.nums.insert(*var, v);
        }
        Ok(env)
    }

    fn eval_term_num(&mut self, t: &NumTerm, env: &TermEnv<'a>) -> Res<u64> {
        self.tick()?;
        match t {
            NumTerm::NumVar(j) => env
                .nums
                .get(j)
                .copied()
                .ok_or_else(|| Stop::Stuck(format!("term variable x{j} unbound in code"))),
            NumTerm::Zero => Ok(0),
            NumTerm::Succ(s) => Ok(self.eval_term_num(s, env)?.saturating_add(1)),
            NumTerm::PrimApp(f, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval_term_num(a, env)?);
                }
                Ok(self.prims.eval(*f, &vals))
            }
            NumTerm::FunApp(tau, s) => {
                let a = self.eval_term_num(s, env)?;
                self.eval_term_fun(tau, a, env)
            }
        }
    }

    fn eval_term_fun(&mut self, tau: &FunTerm, point: u64, env: &TermEnv<'a>) -> Res<u64> {
        self.tick()?;
        match tau {
            FunTerm::FunVar(i) => {
                let arg = env
                    .funs
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Stop::Stuck(format!("term variable a{i} unbound in code")))?;
                self.query_fun(&arg, point)
            }
            FunTerm::Lambda(j, body) => {
                let mut inner = env.clone();
                inner.nums.insert(*j, point);
                self.eval_term_num(body, &inner)
            }
            FunTerm::Rec(base, step) => {
                let mut v = self.eval_term_num(base, env)?;
                for _ in 0..point {
                    v = self.eval_term_fun(step, v, env)?;
                }
                Ok(v)
            }
        }
    }
}

#[derive(Default, Clone)]
struct TermEnv<'a> {
    funs: BTreeMap<VarIdx, FunArg<'a>>,
    nums: BTreeMap<VarIdx, u64>,
}

impl CodeStore {
    pub fn new() -> CodeStore {
        CodeStore::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn signature(&self, e: CodeIndex) -> Option<&Signature> {
        self.entries.get(e).map(|(_, s)| s)
    }

    pub fn program(&self, e: CodeIndex) -> Option<&OmlProgram> {
        self.entries.get(e).map(|(p, _)| p)
    }

    pub fn push(&mut self, prog: OmlProgram, sig: Signature) -> CodeIndex {
        self.entries.push((prog, sig));
        self.entries.len() - 1
    }

    /// Big-step evaluation of `Phi_e(funs, nums)(input)` with a step budget.
    pub fn apply_functional(
        &self,
        e: CodeIndex,
        funs: &[&FiniteFn],
        nums: &[u64],
        input: u64,
        fuel: u64,
        prims: &PrimTable,
    ) -> Outcome {
        let Some((prog, sig)) = self.entries.get(e) else {
            return Outcome::Stuck(format!("no such code index {e}"));
        };
        if funs.len() != sig.fun_vars.len() || nums.len() != sig.num_vars.len() {
            return Outcome::Stuck(format!(
                "arity mismatch: code {e} wants {}/{} args, got {}/{}",
                sig.fun_vars.len(),
                sig.num_vars.len(),
                funs.len(),
                nums.len()
            ));
        }
        let fun_args: Vec<FunArg> = funs.iter().map(|f| FunArg::Table(f)).collect();
        let num_args: Vec<NumArg> = nums.iter().map(|&v| NumArg::Val(v)).collect();
        let mut m = Machine { store: self, prims, fuel };
        match m.run(prog, &fun_args, &num_args, input, None) {
            Ok(v) => Outcome::Value(v),
            Err(Stop::Fuel) => Outcome::FuelExhausted,
            Err(Stop::Stuck(w)) => Outcome::Stuck(w),
        }
    }

    /// `Phi_e(...) = c` convention: the value at input 0.
    pub fn apply_at_zero(
        &self,
        e: CodeIndex,
        funs: &[&FiniteFn],
        nums: &[u64],
        fuel: u64,
        prims: &PrimTable,
    ) -> Outcome {
        self.apply_functional(e, funs, nums, 0, fuel, prims)
    }

    /// `Phi_e(...) = beta` convention: materialize the first `len` points.
    /// Fuel is per point.
    pub fn apply_pointwise(
        &self,
        e: CodeIndex,
        funs: &[&FiniteFn],
        nums: &[u64],
        len: usize,
        fuel: u64,
        prims: &PrimTable,
    ) -> Result<FiniteFn, Outcome> {
        let mut table = Vec::with_capacity(len);
        for a in 0..len {
            match self.apply_functional(e, funs, nums, a as u64, fuel, prims) {
                Outcome::Value(v) => table.push(v),
                other => return Err(other),
            }
        }
        Ok(FiniteFn::new(table))
    }

    /// Mint an index computing a number term over the signature's variables.
    pub fn mint_num_term_index(
        &mut self,
        term: NumTerm,
        sig: Signature,
    ) -> Result<CodeIndex, MintError> {
        let (fun_bind, num_bind) = term_bindings_num(&term, &sig)?;
        Ok(self.push(OmlProgram::TermNum { term, fun_bind, num_bind }, sig))
    }

    /// Mint an index computing a function term (applied pointwise) over the
    /// signature's variables.
    pub fn mint_fun_term_index(
        &mut self,
        term: FunTerm,
        sig: Signature,
    ) -> Result<CodeIndex, MintError> {
        let (fun_bind, num_bind) = term_bindings_fun(&term, &sig)?;
        Ok(self.push(OmlProgram::TermFun { term, fun_bind, num_bind }, sig))
    }

    /// Mint the search for the least `m` such that a quantifier-free matrix
    /// holds with `target := m`. When `input_var` is set, that variable
    /// reads the pointwise input of the call.
    pub fn mint_mu_index(
        &mut self,
        psi: &Formula,
        sig: Signature,
        target: VarIdx,
        input_var: Option<VarIdx>,
        prims: &PrimTable,
    ) -> Result<CodeIndex, MintError> {
        if !psi.is_quantifier_free() {
            return Err(MintError::MuNotQuantifierFree);
        }
        // search for char(psi) = 1, i.e. (1 - char(psi)) = 0
        let one = NumTerm::numeral(1);
        let body_term = NumTerm::PrimApp(prims.id_sub(), vec![one, formula_char_term(psi, prims)]);
        let vars = {
            let mut out = crate::syntax::VarSets::default();
            let mut bound = std::collections::BTreeSet::new();
            crate::syntax::num_term_vars(&body_term, &mut bound, &std::collections::BTreeSet::new(), &mut out);
            out
        };
        let mut fun_bind = Vec::new();
        for i in &vars.free_fun {
            let pos = sig
                .fun_pos(*i)
                .ok_or_else(|| MintError::UnboundTermVar(format!("a{i}")))?;
            fun_bind.push((*i, pos));
        }
        let mut num_bind = Vec::new();
        for j in &vars.free_num {
            if *j == target {
                num_bind.push((*j, NumBindSrc::MuVar));
            } else if input_var == Some(*j) {
                num_bind.push((*j, NumBindSrc::Input));
            } else {
                let pos = sig
                    .num_pos(*j)
                    .ok_or_else(|| MintError::UnboundTermVar(format!("x{j}")))?;
                num_bind.push((*j, NumBindSrc::Arg(pos)));
            }
        }
        let body = OmlProgram::TermNum { term: body_term, fun_bind, num_bind };
        Ok(self.push(OmlProgram::MuSearch(Box::new(body)), sig))
    }

    /// Mint `e''` behaving like `e` with one argument slot filled by earlier
    /// code, evaluated lazily at queried points. The slot disappears from
    /// the new signature; the replacement's arguments are wired by variable
    /// name against the remaining ones.
    pub fn mint_substituted_index(
        &mut self,
        e: CodeIndex,
        slot: Slot,
        replacement: CodeIndex,
    ) -> Result<CodeIndex, MintError> {
        let inner_sig = self.signature(e).ok_or(MintError::BadIndex(e))?.clone();
        let repl_sig = self.signature(replacement).ok_or(MintError::BadIndex(replacement))?.clone();
        let mut out_sig = inner_sig.clone();
        match slot {
            Slot::Fun(p) => {
                if p >= out_sig.fun_vars.len() {
                    return Err(MintError::BadSlot(slot, e));
                }
                out_sig.fun_vars.remove(p);
            }
            Slot::Num(p) => {
                if p >= out_sig.num_vars.len() {
                    return Err(MintError::BadSlot(slot, e));
                }
                out_sig.num_vars.remove(p);
            }
        }
        let repl_fun_map = repl_sig
            .fun_vars
            .iter()
            .map(|v| out_sig.fun_pos(*v).ok_or(MintError::WiringMismatch(format!("a{v}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let repl_num_map = repl_sig
            .num_vars
            .iter()
            .map(|v| out_sig.num_pos(*v).ok_or(MintError::WiringMismatch(format!("x{v}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.push(
            OmlProgram::IgnoreAndReplace { inner: e, slot, replacement, repl_fun_map, repl_num_map },
            out_sig,
        ))
    }

    /// Mint a call to `callee` with arguments re-drawn from a new signature.
    pub fn mint_compose(
        &mut self,
        callee: CodeIndex,
        new_sig: Signature,
        fun_map: Vec<usize>,
        num_map: Vec<usize>,
    ) -> Result<CodeIndex, MintError> {
        let callee_sig = self.signature(callee).ok_or(MintError::BadIndex(callee))?;
        if fun_map.len() != callee_sig.fun_vars.len() || num_map.len() != callee_sig.num_vars.len()
        {
            return Err(MintError::WiringMismatch("compose arity".into()));
        }
        if fun_map.iter().any(|&k| k >= new_sig.fun_vars.len())
            || num_map.iter().any(|&k| k >= new_sig.num_vars.len())
        {
            return Err(MintError::WiringMismatch("compose map out of range".into()));
        }
        Ok(self.push(OmlProgram::ComposeCall { callee, fun_map, num_map }, new_sig))
    }
}

fn term_bindings_num(
    term: &NumTerm,
    sig: &Signature,
) -> Result<(Vec<(VarIdx, usize)>, Vec<(VarIdx, NumBindSrc)>), MintError> {
    let mut vars = crate::syntax::VarSets::default();
    let mut bound = std::collections::BTreeSet::new();
    crate::syntax::num_term_vars(term, &mut bound, &std::collections::BTreeSet::new(), &mut vars);
    bindings_from_vars(&vars, sig)
}

fn term_bindings_fun(
    term: &FunTerm,
    sig: &Signature,
) -> Result<(Vec<(VarIdx, usize)>, Vec<(VarIdx, NumBindSrc)>), MintError> {
    let mut vars = crate::syntax::VarSets::default();
    let mut bound = std::collections::BTreeSet::new();
    crate::syntax::fun_term_vars(term, &mut bound, &std::collections::BTreeSet::new(), &mut vars);
    bindings_from_vars(&vars, sig)
}

fn bindings_from_vars(
    vars: &crate::syntax::VarSets,
    sig: &Signature,
) -> Result<(Vec<(VarIdx, usize)>, Vec<(VarIdx, NumBindSrc)>), MintError> {
    let mut fun_bind = Vec::new();
    for i in &vars.free_fun {
        let pos = sig.fun_pos(*i).ok_or_else(|| MintError::UnboundTermVar(format!("a{i}")))?;
        fun_bind.push((*i, pos));
    }
    let mut num_bind = Vec::new();
    for j in &vars.free_num {
        let pos = sig.num_pos(*j).ok_or_else(|| MintError::UnboundTermVar(format!("x{j}")))?;
        num_bind.push((*j, NumBindSrc::Arg(pos)));
    }
    Ok((fun_bind, num_bind))
}

/// Characteristic term of a quantifier-free formula: 1 when it holds, 0
/// otherwise.
pub fn formula_char_term(f: &Formula, prims: &PrimTable) -> NumTerm {
    match f {
        Formula::Bot => NumTerm::Zero,
        Formula::Eq(l, r) => {
            NumTerm::PrimApp(prims.id_eqc(), vec![(**l).clone(), (**r).clone()])
        }
        Formula::And(l, r) => NumTerm::PrimApp(
            prims.id_mul(),
            vec![formula_char_term(l, prims), formula_char_term(r, prims)],
        ),
        Formula::Imp(l, r) => {
            // 1 - char(l) * (1 - char(r))
            let one = NumTerm::numeral(1);
            NumTerm::PrimApp(
                prims.id_sub(),
                vec![
                    one.clone(),
                    NumTerm::PrimApp(
                        prims.id_mul(),
                        vec![
                            formula_char_term(l, prims),
                            NumTerm::PrimApp(prims.id_sub(), vec![one, formula_char_term(r, prims)]),
                        ],
                    ),
                ],
            )
        }
        _ => unreachable!("characteristic term of a quantified formula"),
    }
}

#[cfg(test)]
mod tests;
