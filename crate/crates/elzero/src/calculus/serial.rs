//! Proof file format: one s-expression tree per file,
//! `(rule <tag> (concl <sequent>) (principal <k>...)? (witness <t>)? (eigen <v>)? <premise>*)`,
//! with axiom leaves either spelled the same way plus a `(schema ...)` /
//! `(sigma (base ...))` marker, or abbreviated as
//! `(axiom <schema> (bind <name> <value>)...)` and expanded here.

use super::axioms::{expand_axiom_schema, SchemaBind};
use super::{LeafKind, ProofTree, RuleTag, WitnessTerm};
use crate::sexpr::{parse_one, Sexp};
use crate::syntax::{print, FormulaParser, PrimTable, Sequent};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProofParseError {
    #[error("s-expression error: {0}")]
    Sexp(#[from] crate::sexpr::SexpError),
    #[error("formula syntax: {0}")]
    Formula(#[from] crate::syntax::ParseError),
    #[error("axiom schema: {0}")]
    Schema(#[from] super::axioms::AxiomExpandError),
    #[error("malformed proof node: {0}")]
    Malformed(String),
}

fn atom(s: impl Into<String>) -> Sexp {
    Sexp::Atom(s.into())
}

pub fn proof_sexp(p: &ProofTree, prims: &PrimTable) -> Sexp {
    let mut items = vec![
        atom("rule"),
        atom(p.rule.name()),
        Sexp::list(vec![atom("concl"), print::sequent_sexp(&p.conclusion, prims)]),
    ];
    if !p.principal.is_empty() {
        items.push(Sexp::list(
            std::iter::once(atom("principal"))
                .chain(p.principal.iter().map(|k| atom(k.to_string())))
                .collect(),
        ));
    }
    match &p.witness {
        Some(WitnessTerm::Num(t)) => {
            items.push(Sexp::list(vec![atom("witness"), print::num_term_sexp(t, prims)]));
        }
        Some(WitnessTerm::Fun(t)) => {
            items.push(Sexp::list(vec![atom("witness"), print::fun_term_sexp(t, prims)]));
        }
        None => {}
    }
    if let Some(eigen) = p.eigen {
        let sort = match p.rule {
            RuleTag::ForallFR | RuleTag::ExistsFL => 'a',
            _ => 'x',
        };
        items.push(Sexp::list(vec![atom("eigen"), atom(format!("{sort}{eigen}"))]));
    }
    match &p.leaf {
        Some(LeafKind::Schema { name }) => {
            items.push(Sexp::list(vec![atom("schema"), atom(name.clone())]));
        }
        Some(LeafKind::Sigma { base }) => {
            items.push(Sexp::list(vec![atom("sigma"), print::formula_sexp(base, prims)]));
        }
        Some(LeafKind::Plain) | None => {}
    }
    items.extend(p.premises.iter().map(|q| proof_sexp(q, prims)));
    Sexp::list(items)
}

pub fn parse_proof(text: &str, prims: &PrimTable) -> Result<ProofTree, ProofParseError> {
    let sexp = parse_one(text)?;
    let mut fp = FormulaParser::new(prims, &sexp);
    parse_node(&sexp, &mut fp, prims)
}

fn parse_node(
    s: &Sexp,
    fp: &mut FormulaParser,
    prims: &PrimTable,
) -> Result<ProofTree, ProofParseError> {
    let items =
        s.as_list().ok_or_else(|| ProofParseError::Malformed(format!("expected node, got {s}")))?;
    match s.head() {
        Some("axiom") => parse_axiom_short(items, fp),
        Some("rule") => parse_rule_node(items, fp, prims),
        _ => Err(ProofParseError::Malformed(format!("node must start with rule/axiom: {s}"))),
    }
}

/// `(axiom <schema> (bind <name> <value>)...)`
fn parse_axiom_short(
    items: &[Sexp],
    fp: &mut FormulaParser,
) -> Result<ProofTree, ProofParseError> {
    let name = items
        .get(1)
        .and_then(Sexp::as_atom)
        .ok_or_else(|| ProofParseError::Malformed("axiom needs a schema name".into()))?;
    let mut binds = BTreeMap::new();
    for b in &items[2..] {
        let parts = b
            .as_list()
            .filter(|l| l.len() == 3 && b.head() == Some("bind"))
            .ok_or_else(|| ProofParseError::Malformed(format!("expected (bind name value): {b}")))?;
        let key = parts[1]
            .as_atom()
            .ok_or_else(|| ProofParseError::Malformed("bind name must be an atom".into()))?;
        binds.insert(key.to_string(), parse_bind_value(&parts[2], fp)?);
    }
    let formula = expand_axiom_schema(name, &binds)?;
    Ok(ProofTree::node(RuleTag::AxiomLeaf, Sequent::new(vec![], formula), vec![])
        .with_leaf(LeafKind::Schema { name: name.to_string() }))
}

fn parse_bind_value(s: &Sexp, fp: &mut FormulaParser) -> Result<SchemaBind, ProofParseError> {
    // try formula first (formula and term grammars are disjoint), then the
    // two term sorts; bare variables coerce inside the schema expander
    if let Ok(f) = fp.formula(s) {
        return Ok(SchemaBind::Formula(f));
    }
    if let Ok(is_fun) = fp.any_is_fun(s) {
        return Ok(if is_fun {
            SchemaBind::Fun(fp.witness_fun_term(s)?)
        } else {
            SchemaBind::Term(fp.witness_num_term(s)?)
        });
    }
    Err(ProofParseError::Malformed(format!("bind value: {s}")))
}

fn parse_rule_node(
    items: &[Sexp],
    fp: &mut FormulaParser,
    prims: &PrimTable,
) -> Result<ProofTree, ProofParseError> {
    let tag_name = items
        .get(1)
        .and_then(Sexp::as_atom)
        .ok_or_else(|| ProofParseError::Malformed("rule needs a tag".into()))?;
    let rule = RuleTag::from_name(tag_name)
        .ok_or_else(|| ProofParseError::Malformed(format!("unknown rule tag `{tag_name}`")))?;
    let mut conclusion = None;
    let mut principal = Vec::new();
    let mut witness = None;
    let mut eigen = None;
    let mut leaf = None;
    let mut premises = Vec::new();
    for part in &items[2..] {
        match part.head() {
            Some("concl") => {
                let l = part.as_list().unwrap();
                if l.len() != 2 {
                    return Err(ProofParseError::Malformed(format!("concl: {part}")));
                }
                conclusion = Some(fp.sequent(&l[1])?);
            }
            Some("principal") => {
                for k in &part.as_list().unwrap()[1..] {
                    let v = k.as_atom().and_then(|a| a.parse().ok()).ok_or_else(|| {
                        ProofParseError::Malformed(format!("principal index: {k}"))
                    })?;
                    principal.push(v);
                }
            }
            Some("witness") => {
                let l = part.as_list().unwrap();
                if l.len() != 2 {
                    return Err(ProofParseError::Malformed(format!("witness: {part}")));
                }
                witness = Some(if fp.any_is_fun(&l[1])? {
                    WitnessTerm::Fun(fp.witness_fun_term(&l[1])?)
                } else {
                    WitnessTerm::Num(fp.witness_num_term(&l[1])?)
                });
            }
            Some("eigen") => {
                let l = part.as_list().unwrap();
                let a = l
                    .get(1)
                    .and_then(Sexp::as_atom)
                    .ok_or_else(|| ProofParseError::Malformed(format!("eigen: {part}")))?;
                let idx: u32 = a[1..]
                    .parse()
                    .map_err(|_| ProofParseError::Malformed(format!("eigen var: {a}")))?;
                eigen = Some(idx);
            }
            Some("schema") => {
                let l = part.as_list().unwrap();
                let name = l
                    .get(1)
                    .and_then(Sexp::as_atom)
                    .ok_or_else(|| ProofParseError::Malformed("schema name".into()))?;
                leaf = Some(LeafKind::Schema { name: name.to_string() });
            }
            Some("sigma") => {
                let l = part.as_list().unwrap();
                if l.len() != 2 {
                    return Err(ProofParseError::Malformed(format!("sigma: {part}")));
                }
                leaf = Some(LeafKind::Sigma { base: fp.formula(&l[1])? });
            }
            Some("rule") | Some("axiom") => premises.push(parse_node(part, fp, prims)?),
            _ => return Err(ProofParseError::Malformed(format!("unexpected node part: {part}"))),
        }
    }
    let conclusion = conclusion
        .ok_or_else(|| ProofParseError::Malformed(format!("rule {tag_name} lacks (concl ...)")))?;
    if rule == RuleTag::AxiomLeaf && leaf.is_none() {
        leaf = Some(LeafKind::Plain);
    }
    if principal.is_empty() {
        principal = default_principal(rule, &conclusion);
    }
    if rule == RuleTag::P && principal.is_empty() {
        return Err(ProofParseError::Malformed("p rule needs its swap position".into()));
    }
    Ok(ProofTree { rule, conclusion, premises, principal, witness, eigen, leaf })
}

/// Forced principal positions for the strict-end rules.
pub fn default_principal(rule: RuleTag, conclusion: &Sequent) -> Vec<usize> {
    let last = conclusion.antecedent.len().checked_sub(1);
    match rule {
        RuleTag::AndL
        | RuleTag::ImpL
        | RuleTag::ForallNL
        | RuleTag::ForallFL
        | RuleTag::ExistsNL
        | RuleTag::ExistsFL
        | RuleTag::W
        | RuleTag::C => last.map(|k| vec![k]).unwrap_or_default(),
        _ => Vec::new(),
    }
}
