//! Proof trees and rule checking for the intuitionistic sequent calculus and
//! its arithmetic extensions, including the affine restrictions, axiom
//! recognition, free-cut-freeness, and the two local cut normalizers used
//! before extraction.
//!
//! Rules act at the right end of the antecedent; permutation (P) is a real
//! rule, so every antecedent is an ordered list.

pub mod axioms;
pub mod build;
mod check;
mod conventions;
mod normalize;
mod serial;
mod trace;

pub use axioms::{expand_axiom_schema, is_axiom, AxiomExpandError};
pub use check::{check_proof, CheckResult, Rejection};
pub use conventions::{check_variable_conventions, ConventionReport, ConventionViolation, ViolationKind};
pub use normalize::{check_free_cut_free, hoist_cuts, prune_weakened_cuts, NormalizeOutcome};
pub use serial::{parse_proof, proof_sexp, ProofParseError};
pub use trace::{
    delete_antecedent, drop_weakened, permute_to_target, splice_cut, trace_up, SurgeryError, Up,
};

use crate::syntax::{Formula, FunTerm, NumTerm, Sequent, VarIdx};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleTag {
    I,
    AndL,
    AndR,
    ImpL,
    ImpR,
    ForallNL,
    ForallNR,
    ExistsNL,
    ExistsNR,
    ForallFL,
    ForallFR,
    ExistsFL,
    ExistsFR,
    W,
    C,
    P,
    BotRule,
    Cut,
    AxiomLeaf,
}

impl RuleTag {
    pub fn arity(self) -> usize {
        match self {
            RuleTag::I | RuleTag::AxiomLeaf => 0,
            RuleTag::AndR | RuleTag::ImpL | RuleTag::Cut => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RuleTag::I => "i",
            RuleTag::AndL => "andl",
            RuleTag::AndR => "andr",
            RuleTag::ImpL => "impl",
            RuleTag::ImpR => "impr",
            RuleTag::ForallNL => "allnl",
            RuleTag::ForallNR => "allnr",
            RuleTag::ExistsNL => "exnl",
            RuleTag::ExistsNR => "exnr",
            RuleTag::ForallFL => "allfl",
            RuleTag::ForallFR => "allfr",
            RuleTag::ExistsFL => "exfl",
            RuleTag::ExistsFR => "exfr",
            RuleTag::W => "w",
            RuleTag::C => "c",
            RuleTag::P => "p",
            RuleTag::BotRule => "bot",
            RuleTag::Cut => "cut",
            RuleTag::AxiomLeaf => "axiom",
        }
    }

    pub fn from_name(s: &str) -> Option<RuleTag> {
        Some(match s {
            "i" => RuleTag::I,
            "andl" => RuleTag::AndL,
            "andr" => RuleTag::AndR,
            "impl" => RuleTag::ImpL,
            "impr" => RuleTag::ImpR,
            "allnl" => RuleTag::ForallNL,
            "allnr" => RuleTag::ForallNR,
            "exnl" => RuleTag::ExistsNL,
            "exnr" => RuleTag::ExistsNR,
            "allfl" => RuleTag::ForallFL,
            "allfr" => RuleTag::ForallFR,
            "exfl" => RuleTag::ExistsFL,
            "exfr" => RuleTag::ExistsFR,
            "w" => RuleTag::W,
            "c" => RuleTag::C,
            "p" => RuleTag::P,
            "bot" => RuleTag::BotRule,
            "cut" => RuleTag::Cut,
            "axiom" => RuleTag::AxiomLeaf,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WitnessTerm {
    Num(NumTerm),
    Fun(FunTerm),
}

/// How an axiom leaf justifies its conclusion: a named schema instance, a
/// bare formula checked against every schema, or a thickened formula from
/// Sigma carrying the base axiom it collapses to.
#[derive(Debug, Clone, PartialEq)]
pub enum LeafKind {
    Schema { name: String },
    Plain,
    Sigma { base: Formula },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProofTree {
    pub rule: RuleTag,
    pub conclusion: Sequent,
    pub premises: Vec<ProofTree>,
    /// Antecedent position annotations; `P` stores the index of the first
    /// swapped formula, other rules their (forced) principal positions.
    pub principal: Vec<usize>,
    pub witness: Option<WitnessTerm>,
    pub eigen: Option<VarIdx>,
    pub leaf: Option<LeafKind>,
}

/// Path from the root: each element is a premise index.
pub type NodePath = Vec<u16>;

pub fn path_display(p: &[u16]) -> String {
    if p.is_empty() {
        "root".to_string()
    } else {
        let mut s = "root".to_string();
        for step in p {
            s.push('.');
            s.push_str(&step.to_string());
        }
        s
    }
}

impl ProofTree {
    pub fn node(
        rule: RuleTag,
        conclusion: Sequent,
        premises: Vec<ProofTree>,
    ) -> ProofTree {
        ProofTree {
            rule,
            conclusion,
            premises,
            principal: Vec::new(),
            witness: None,
            eigen: None,
            leaf: None,
        }
    }

    pub fn with_principal(mut self, positions: Vec<usize>) -> ProofTree {
        self.principal = positions;
        self
    }

    pub fn with_witness(mut self, w: WitnessTerm) -> ProofTree {
        self.witness = Some(w);
        self
    }

    pub fn with_eigen(mut self, y: VarIdx) -> ProofTree {
        self.eigen = Some(y);
        self
    }

    pub fn with_leaf(mut self, k: LeafKind) -> ProofTree {
        self.leaf = Some(k);
        self
    }

    pub fn get(&self, path: &[u16]) -> Option<&ProofTree> {
        let mut cur = self;
        for &step in path {
            cur = cur.premises.get(step as usize)?;
        }
        Some(cur)
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(ProofTree::node_count).sum::<usize>()
    }

    /// Visit every node with its path, premises before conclusions.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a ProofTree, &NodePath)) {
        fn go<'a>(
            t: &'a ProofTree,
            path: &mut NodePath,
            f: &mut impl FnMut(&'a ProofTree, &NodePath),
        ) {
            for (i, p) in t.premises.iter().enumerate() {
                path.push(i as u16);
                go(p, path, f);
                path.pop();
            }
            f(t, path);
        }
        go(self, &mut Vec::new(), f)
    }

    /// All cut nodes, by path.
    pub fn cut_paths(&self) -> Vec<NodePath> {
        let mut out = Vec::new();
        self.visit(&mut |n, p| {
            if n.rule == RuleTag::Cut {
                out.push(p.clone());
            }
        });
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Base {
    Iqc,
    El0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Restriction {
    Full,
    Affine,
    ExistsAlphaAffine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemId {
    pub base: Base,
    pub markov: bool,
    pub restriction: Restriction,
}

impl SystemId {
    pub const EL0: SystemId =
        SystemId { base: Base::El0, markov: false, restriction: Restriction::Full };
    pub const EL0_MP: SystemId =
        SystemId { base: Base::El0, markov: true, restriction: Restriction::Full };
    pub const EL0_AFFINE: SystemId =
        SystemId { base: Base::El0, markov: false, restriction: Restriction::Affine };
    pub const EL0_MP_AFFINE: SystemId =
        SystemId { base: Base::El0, markov: true, restriction: Restriction::Affine };
    pub const EL0_EXA: SystemId =
        SystemId { base: Base::El0, markov: false, restriction: Restriction::ExistsAlphaAffine };
    pub const EL0_MP_EXA: SystemId =
        SystemId { base: Base::El0, markov: true, restriction: Restriction::ExistsAlphaAffine };
}

impl std::str::FromStr for SystemId {
    type Err = String;

    fn from_str(s: &str) -> Result<SystemId, String> {
        let (rest, restriction) = if let Some(r) = s.strip_suffix("-exa") {
            (r, Restriction::ExistsAlphaAffine)
        } else if let Some(r) = s.strip_suffix("-a") {
            (r, Restriction::Affine)
        } else {
            (s, Restriction::Full)
        };
        let (core, markov) = if let Some(c) = rest.strip_suffix("+mp") {
            (c, true)
        } else {
            (rest, false)
        };
        let base = match core {
            "iqc" => Base::Iqc,
            "el0" => Base::El0,
            _ => return Err(format!("unknown system `{s}`")),
        };
        Ok(SystemId { base, markov, restriction })
    }
}

impl std::fmt::Display for SystemId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.base {
            Base::Iqc => write!(f, "iqc")?,
            Base::El0 => write!(f, "el0")?,
        }
        if self.markov {
            write!(f, "+mp")?;
        }
        match self.restriction {
            Restriction::Full => Ok(()),
            Restriction::Affine => write!(f, "-a"),
            Restriction::ExistsAlphaAffine => write!(f, "-exa"),
        }
    }
}

#[cfg(test)]
mod tests;
