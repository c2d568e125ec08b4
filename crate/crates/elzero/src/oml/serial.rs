//! Code-store serialization: one `(code <e> (sig ...) <program>)` record per
//! index, in minting order.

use super::{CodeIndex, CodeStore, NumBindSrc, OmlProgram, Signature, Slot};
use crate::sexpr::{parse_many, Sexp};
use crate::syntax::{print, FormulaParser, PrimTable, VarIdx};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StoreParseError {
    #[error("s-expression error: {0}")]
    Sexp(#[from] crate::sexpr::SexpError),
    #[error("malformed store record: {0}")]
    Malformed(String),
    #[error("term in code record: {0}")]
    Term(#[from] crate::syntax::ParseError),
    #[error("store indices must be consecutive from 0, found {0}")]
    BadIndex(CodeIndex),
}

fn atom(s: impl Into<String>) -> Sexp {
    Sexp::Atom(s.into())
}

fn sig_sexp(sig: &Signature) -> Sexp {
    Sexp::list(vec![
        atom("sig"),
        Sexp::list(
            std::iter::once(atom("funs"))
                .chain(sig.fun_vars.iter().map(|v| atom(format!("a{v}"))))
                .collect(),
        ),
        Sexp::list(
            std::iter::once(atom("nums"))
                .chain(sig.num_vars.iter().map(|v| atom(format!("x{v}"))))
                .collect(),
        ),
    ])
}

fn usize_list(head: &str, xs: &[usize]) -> Sexp {
    Sexp::list(
        std::iter::once(atom(head)).chain(xs.iter().map(|k| atom(k.to_string()))).collect(),
    )
}

fn prog_sexp(p: &OmlProgram, prims: &PrimTable) -> Sexp {
    match p {
        OmlProgram::ConstNat(c) => Sexp::list(vec![atom("const"), atom(c.to_string())]),
        OmlProgram::ProjNum(k) => Sexp::list(vec![atom("argn"), atom(k.to_string())]),
        OmlProgram::ProjFunQuery(k, at) => {
            Sexp::list(vec![atom("argf"), atom(k.to_string()), prog_sexp(at, prims)])
        }
        OmlProgram::Input => atom("input"),
        OmlProgram::MuVar => atom("muvar"),
        OmlProgram::PrimOp(id, args) => Sexp::list(
            [atom("primop"), atom(prims.name(*id))]
                .into_iter()
                .chain(args.iter().map(|a| prog_sexp(a, prims)))
                .collect(),
        ),
        OmlProgram::TermNum { term, fun_bind, num_bind } => Sexp::list(vec![
            atom("termn"),
            print::num_term_sexp(term, prims),
            binds_sexp(fun_bind, num_bind),
        ]),
        OmlProgram::TermFun { term, fun_bind, num_bind } => Sexp::list(vec![
            atom("termf"),
            print::fun_term_sexp(term, prims),
            binds_sexp(fun_bind, num_bind),
        ]),
        OmlProgram::MuSearch(body) => Sexp::list(vec![atom("mu"), prog_sexp(body, prims)]),
        OmlProgram::ComposeCall { callee, fun_map, num_map } => Sexp::list(vec![
            atom("call"),
            atom(callee.to_string()),
            usize_list("fmap", fun_map),
            usize_list("nmap", num_map),
        ]),
        OmlProgram::IgnoreAndReplace { inner, slot, replacement, repl_fun_map, repl_num_map } => {
            let slot_s = match slot {
                Slot::Fun(p) => Sexp::list(vec![atom("fslot"), atom(p.to_string())]),
                Slot::Num(p) => Sexp::list(vec![atom("nslot"), atom(p.to_string())]),
            };
            Sexp::list(vec![
                atom("subst"),
                atom(inner.to_string()),
                slot_s,
                atom(replacement.to_string()),
                usize_list("fmap", repl_fun_map),
                usize_list("nmap", repl_num_map),
            ])
        }
    }
}

fn binds_sexp(fun_bind: &[(VarIdx, usize)], num_bind: &[(VarIdx, NumBindSrc)]) -> Sexp {
    let fb = Sexp::list(
        std::iter::once(atom("fb"))
            .chain(fun_bind.iter().map(|(v, k)| {
                Sexp::list(vec![atom(format!("a{v}")), atom(k.to_string())])
            }))
            .collect(),
    );
    let nb = Sexp::list(
        std::iter::once(atom("nb"))
            .chain(num_bind.iter().map(|(v, src)| {
                let s = match src {
                    NumBindSrc::Arg(k) => atom(k.to_string()),
                    NumBindSrc::Input => atom("input"),
                    NumBindSrc::MuVar => atom("muvar"),
                };
                Sexp::list(vec![atom(format!("x{v}")), s])
            }))
            .collect(),
    );
    Sexp::list(vec![atom("binds"), fb, nb])
}

pub fn store_sexp(store: &CodeStore, prims: &PrimTable) -> Vec<Sexp> {
    (0..store.len())
        .map(|e| {
            Sexp::list(vec![
                atom("code"),
                atom(e.to_string()),
                sig_sexp(store.signature(e).unwrap()),
                prog_sexp(store.program(e).unwrap(), prims),
            ])
        })
        .collect()
}

fn want_list<'a>(s: &'a Sexp, what: &str) -> Result<&'a [Sexp], StoreParseError> {
    s.as_list().ok_or_else(|| StoreParseError::Malformed(format!("{what}: {s}")))
}

fn want_usize(s: &Sexp, what: &str) -> Result<usize, StoreParseError> {
    s.as_atom()
        .and_then(|a| a.parse().ok())
        .ok_or_else(|| StoreParseError::Malformed(format!("{what}: {s}")))
}

fn want_var(s: &Sexp, sort: char) -> Result<VarIdx, StoreParseError> {
    let a = s.as_atom().unwrap_or_default();
    if let Some(rest) = a.strip_prefix(sort) {
        if let Ok(n) = rest.parse() {
            return Ok(n);
        }
    }
    Err(StoreParseError::Malformed(format!("expected {sort}-variable, found {s}")))
}

fn parse_sig(s: &Sexp) -> Result<Signature, StoreParseError> {
    let items = want_list(s, "signature")?;
    if items.len() != 3 || items[0].as_atom() != Some("sig") {
        return Err(StoreParseError::Malformed(format!("signature: {s}")));
    }
    let funs = want_list(&items[1], "funs")?;
    let nums = want_list(&items[2], "nums")?;
    let fun_vars =
        funs.iter().skip(1).map(|v| want_var(v, 'a')).collect::<Result<Vec<_>, _>>()?;
    let num_vars =
        nums.iter().skip(1).map(|v| want_var(v, 'x')).collect::<Result<Vec<_>, _>>()?;
    Ok(Signature { fun_vars, num_vars })
}

fn parse_usize_list(s: &Sexp, head: &str) -> Result<Vec<usize>, StoreParseError> {
    let items = want_list(s, head)?;
    if items.first().and_then(Sexp::as_atom) != Some(head) {
        return Err(StoreParseError::Malformed(format!("expected ({head} ...): {s}")));
    }
    items.iter().skip(1).map(|k| want_usize(k, head)).collect()
}

fn parse_binds(
    s: &Sexp,
) -> Result<(Vec<(VarIdx, usize)>, Vec<(VarIdx, NumBindSrc)>), StoreParseError> {
    let items = want_list(s, "binds")?;
    if items.len() != 3 || items[0].as_atom() != Some("binds") {
        return Err(StoreParseError::Malformed(format!("binds: {s}")));
    }
    let fb = want_list(&items[1], "fb")?;
    let nb = want_list(&items[2], "nb")?;
    let mut fun_bind = Vec::new();
    for pair in fb.iter().skip(1) {
        let p = want_list(pair, "fb pair")?;
        fun_bind.push((want_var(&p[0], 'a')?, want_usize(&p[1], "fb pos")?));
    }
    let mut num_bind = Vec::new();
    for pair in nb.iter().skip(1) {
        let p = want_list(pair, "nb pair")?;
        let src = match p[1].as_atom() {
            Some("input") => NumBindSrc::Input,
            Some("muvar") => NumBindSrc::MuVar,
            _ => NumBindSrc::Arg(want_usize(&p[1], "nb pos")?),
        };
        num_bind.push((want_var(&p[0], 'x')?, src));
    }
    Ok((fun_bind, num_bind))
}

fn parse_prog(s: &Sexp, prims: &PrimTable) -> Result<OmlProgram, StoreParseError> {
    if let Some(a) = s.as_atom() {
        return match a {
            "input" => Ok(OmlProgram::Input),
            "muvar" => Ok(OmlProgram::MuVar),
            _ => Err(StoreParseError::Malformed(format!("program atom: {a}"))),
        };
    }
    let items = want_list(s, "program")?;
    let head = s.head().ok_or_else(|| StoreParseError::Malformed(s.to_string()))?;
    match head {
        "const" => Ok(OmlProgram::ConstNat(want_usize(&items[1], "const")? as u64)),
        "argn" => Ok(OmlProgram::ProjNum(want_usize(&items[1], "argn")?)),
        "argf" => Ok(OmlProgram::ProjFunQuery(
            want_usize(&items[1], "argf")?,
            Box::new(parse_prog(&items[2], prims)?),
        )),
        "primop" => {
            let name = items[1]
                .as_atom()
                .ok_or_else(|| StoreParseError::Malformed("primop name".into()))?;
            let id = prims
                .lookup(name)
                .ok_or_else(|| StoreParseError::Malformed(format!("unknown prim {name}")))?;
            let args = items[2..]
                .iter()
                .map(|a| parse_prog(a, prims))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(OmlProgram::PrimOp(id, args))
        }
        "termn" | "termf" => {
            let (fun_bind, num_bind) = parse_binds(&items[2])?;
            let mut fp = FormulaParser::new(prims, &items[1]);
            if head == "termn" {
                let term = fp.witness_num_term(&items[1])?;
                Ok(OmlProgram::TermNum { term, fun_bind, num_bind })
            } else {
                let term = fp.witness_fun_term(&items[1])?;
                Ok(OmlProgram::TermFun { term, fun_bind, num_bind })
            }
        }
        "mu" => Ok(OmlProgram::MuSearch(Box::new(parse_prog(&items[1], prims)?))),
        "call" => Ok(OmlProgram::ComposeCall {
            callee: want_usize(&items[1], "callee")?,
            fun_map: parse_usize_list(&items[2], "fmap")?,
            num_map: parse_usize_list(&items[3], "nmap")?,
        }),
        "subst" => {
            let slot_items = want_list(&items[2], "slot")?;
            let p = want_usize(&slot_items[1], "slot pos")?;
            let slot = match slot_items[0].as_atom() {
                Some("fslot") => Slot::Fun(p),
                Some("nslot") => Slot::Num(p),
                _ => return Err(StoreParseError::Malformed(format!("slot: {}", items[2]))),
            };
            Ok(OmlProgram::IgnoreAndReplace {
                inner: want_usize(&items[1], "inner")?,
                slot,
                replacement: want_usize(&items[3], "replacement")?,
                repl_fun_map: parse_usize_list(&items[4], "fmap")?,
                repl_num_map: parse_usize_list(&items[5], "nmap")?,
            })
        }
        _ => Err(StoreParseError::Malformed(format!("program form: {s}"))),
    }
}

pub fn parse_store(text: &str, prims: &PrimTable) -> Result<CodeStore, StoreParseError> {
    let mut store = CodeStore::new();
    for record in parse_many(text)? {
        let items = want_list(&record, "code record")?;
        if items.len() != 4 || items[0].as_atom() != Some("code") {
            return Err(StoreParseError::Malformed(record.to_string()));
        }
        let e = want_usize(&items[1], "code index")?;
        if e != store.len() {
            return Err(StoreParseError::BadIndex(e));
        }
        let sig = parse_sig(&items[2])?;
        let prog = parse_prog(&items[3], prims)?;
        store.push(prog, sig);
    }
    Ok(store)
}
