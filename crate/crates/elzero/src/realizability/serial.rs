//! Realizer files: `(realizer (v (<i> plain <k> | coded <k> <e>)...) (w ...))`.

use super::{RealizerEntry, RealizerMap};
use crate::sexpr::{parse_one, Sexp};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RealizerParseError {
    #[error("s-expression error: {0}")]
    Sexp(#[from] crate::sexpr::SexpError),
    #[error("malformed realizer: {0}")]
    Malformed(String),
}

fn atom(s: impl Into<String>) -> Sexp {
    Sexp::Atom(s.into())
}

fn entry_sexp(idx: u32, e: &RealizerEntry) -> Sexp {
    match e {
        RealizerEntry::Plain(k) => Sexp::list(vec![
            atom(idx.to_string()),
            atom("plain"),
            atom(k.to_string()),
        ]),
        RealizerEntry::Coded(k, code) => Sexp::list(vec![
            atom(idx.to_string()),
            atom("coded"),
            atom(k.to_string()),
            atom(code.to_string()),
        ]),
    }
}

pub fn realizer_sexp(r: &RealizerMap) -> Sexp {
    Sexp::list(vec![
        atom("realizer"),
        Sexp::list(
            std::iter::once(atom("v"))
                .chain(r.v.iter().map(|(i, e)| entry_sexp(*i, e)))
                .collect(),
        ),
        Sexp::list(
            std::iter::once(atom("w"))
                .chain(r.w.iter().map(|(j, e)| entry_sexp(*j, e)))
                .collect(),
        ),
    ])
}

fn parse_entry(s: &Sexp) -> Result<(u32, RealizerEntry), RealizerParseError> {
    let items = s
        .as_list()
        .ok_or_else(|| RealizerParseError::Malformed(format!("entry: {s}")))?;
    let idx: u32 = items
        .first()
        .and_then(Sexp::as_atom)
        .and_then(|a| a.parse().ok())
        .ok_or_else(|| RealizerParseError::Malformed(format!("entry index: {s}")))?;
    let num = |k: usize| -> Result<u64, RealizerParseError> {
        items
            .get(k)
            .and_then(Sexp::as_atom)
            .and_then(|a| a.parse().ok())
            .ok_or_else(|| RealizerParseError::Malformed(format!("entry field {k}: {s}")))
    };
    match items.get(1).and_then(Sexp::as_atom) {
        Some("plain") => Ok((idx, RealizerEntry::Plain(num(2)?))),
        Some("coded") => Ok((idx, RealizerEntry::Coded(num(2)?, num(3)? as usize))),
        _ => Err(RealizerParseError::Malformed(format!("entry kind: {s}"))),
    }
}

pub fn parse_realizer(text: &str) -> Result<RealizerMap, RealizerParseError> {
    let sexp = parse_one(text)?;
    let items = sexp
        .as_list()
        .filter(|l| l.len() == 3 && sexp.head() == Some("realizer"))
        .ok_or_else(|| RealizerParseError::Malformed(sexp.to_string()))?;
    let mut r = RealizerMap::default();
    for (part, is_v) in [(&items[1], true), (&items[2], false)] {
        let l = part
            .as_list()
            .ok_or_else(|| RealizerParseError::Malformed(part.to_string()))?;
        for e in &l[1..] {
            let (idx, entry) = parse_entry(e)?;
            if is_v {
                r.v.insert(idx, entry);
            } else {
                r.w.insert(idx, entry);
            }
        }
    }
    Ok(r)
}
