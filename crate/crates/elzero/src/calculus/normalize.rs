//! Free-cut-freeness and the two local cut normalizers used before
//! extraction: hoisting cuts up to the rule that introduces the cut formula,
//! and pruning cuts whose cut formula enters only through weakening.

use super::trace::{delete_antecedent, splice_cut, trace_up, SurgeryError, Up};
use super::{NodePath, ProofTree, RuleTag, SystemId};
use crate::syntax::PrimTable;
use crate::transform::sigma_chain;

/// True iff every cut formula in the proof is an axiom of the system or
/// contraction-similar to one.
pub fn check_free_cut_free(p: &ProofTree, sys: SystemId, prims: &PrimTable) -> bool {
    let mut ok = true;
    p.visit(&mut |n, _| {
        if n.rule == RuleTag::Cut && ok {
            let cut_formula = n.premises[0].conclusion.succedent.clone();
            if sigma_chain(&cut_formula, sys, prims).is_none() {
                ok = false;
            }
        }
    });
    ok
}

#[derive(Debug, Clone)]
pub struct NormalizeOutcome {
    pub proof: ProofTree,
    /// Cuts that could not be moved, with the reason; these inputs the
    /// extraction pipeline cannot accept.
    pub irreducible: Vec<(NodePath, String)>,
}

impl NormalizeOutcome {
    pub fn clean(&self) -> bool {
        self.irreducible.is_empty()
    }
}

/// Permute every cut upward until its right premise ends with the rule that
/// has the cut formula as principal. Idempotent; conclusions are unchanged.
pub fn hoist_cuts(p: &ProofTree) -> NormalizeOutcome {
    let mut irreducible = Vec::new();
    let proof = hoist_node(p, &mut Vec::new(), &mut irreducible);
    NormalizeOutcome { proof, irreducible }
}

fn hoist_node(
    n: &ProofTree,
    path: &mut NodePath,
    irreducible: &mut Vec<(NodePath, String)>,
) -> ProofTree {
    let mut premises = Vec::with_capacity(n.premises.len());
    for (i, prem) in n.premises.iter().enumerate() {
        path.push(i as u16);
        premises.push(hoist_node(prem, path, irreducible));
        path.pop();
    }
    let node = ProofTree {
        rule: n.rule,
        conclusion: n.conclusion.clone(),
        premises,
        principal: n.principal.clone(),
        witness: n.witness.clone(),
        eigen: n.eigen,
        leaf: n.leaf.clone(),
    };
    if node.rule != RuleTag::Cut {
        return node;
    }
    let right = &node.premises[1];
    let last = match right.conclusion.antecedent.len() {
        0 => {
            irreducible.push((path.clone(), "cut right premise lost the cut formula".into()));
            return node;
        }
        l => l - 1,
    };
    match trace_up(right, last) {
        Ok(Up::Principal) => node, // already in hoisted form
        Ok(Up::Context(_, _)) => {
            let left = &node.premises[0];
            match splice_cut(left, right, last) {
                Ok(spliced) => {
                    // splice order is Gamma2' ++ Gamma1; restore the cut's
                    // native Gamma1 ++ Gamma2' order
                    let g = left.conclusion.antecedent.len();
                    let r = right.conclusion.antecedent.len() - 1;
                    let perm: Vec<usize> = (r..r + g).chain(0..r).collect();
                    let restored = super::trace::permute_to_target(spliced, &perm);
                    debug_assert_eq!(restored.conclusion, node.conclusion);
                    restored
                }
                Err(SurgeryError::Irreducible(why)) => {
                    irreducible.push((path.clone(), why));
                    node
                }
                Err(other) => {
                    irreducible.push((path.clone(), other.to_string()));
                    node
                }
            }
        }
        Err(e) => {
            irreducible.push((path.clone(), e.to_string()));
            node
        }
    }
}

/// Remove every cut whose cut formula enters the right premise solely
/// through weakening (contractions of weakenings included): the weakening
/// and the cut disappear, and the conclusion loses the left context.
pub fn prune_weakened_cuts(p: &ProofTree) -> ProofTree {
    let mut premises = Vec::with_capacity(p.premises.len());
    for prem in &p.premises {
        premises.push(prune_weakened_cuts(prem));
    }
    let node = ProofTree {
        rule: p.rule,
        conclusion: p.conclusion.clone(),
        premises,
        principal: p.principal.clone(),
        witness: p.witness.clone(),
        eigen: p.eigen,
        leaf: p.leaf.clone(),
    };
    if node.rule != RuleTag::Cut {
        return node;
    }
    let right = &node.premises[1];
    let Some(len) = right.conclusion.antecedent.len().checked_sub(1) else {
        return node;
    };
    match delete_antecedent(right, len) {
        Ok(pruned_right) => pruned_right,
        Err(_) => node,
    }
}
