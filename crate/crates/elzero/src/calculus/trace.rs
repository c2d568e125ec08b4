//! Occurrence tracing and proof surgery. Rules act at the right end of the
//! antecedent, so a context formula's position maps through each rule
//! mechanically; on top of that mapping sit three operations:
//!
//! * `splice_cut` pushes a cut upward until the right premise ends with the
//!   rule introducing the cut formula;
//! * `delete_antecedent` removes a formula that entered solely through
//!   weakening (possibly via contractions of weakenings);
//! * `permute_to_target` realizes an antecedent reordering as a chain of
//!   adjacent permutation steps.

use super::{ProofTree, RuleTag};
use crate::syntax::{formula_vars, Formula, Sequent};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Up {
    /// The formula at this position is created by the node's last rule.
    Principal,
    /// It comes from premise `.0` at position `.1`.
    Context(usize, usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurgeryError {
    #[error("position {0} out of range")]
    BadPosition(usize),
    #[error("irreducible cut: {0}")]
    Irreducible(String),
    #[error("formula is not introduced solely by weakening")]
    NotWeakened,
}

/// Map an antecedent position of `node.conclusion` to its source.
pub fn trace_up(node: &ProofTree, pos: usize) -> Result<Up, SurgeryError> {
    let len = node.conclusion.antecedent.len();
    if pos >= len {
        return Err(SurgeryError::BadPosition(pos));
    }
    let last = len - 1;
    Ok(match node.rule {
        RuleTag::I | RuleTag::AxiomLeaf => Up::Principal,
        RuleTag::AndL
        | RuleTag::ForallNL
        | RuleTag::ForallFL
        | RuleTag::ExistsNL
        | RuleTag::ExistsFL
        | RuleTag::W
        | RuleTag::C => {
            if pos == last {
                Up::Principal
            } else {
                Up::Context(0, pos)
            }
        }
        RuleTag::ImpL => {
            if pos == last {
                Up::Principal
            } else {
                let left_len = node.premises[0].conclusion.antecedent.len();
                if pos < left_len {
                    Up::Context(0, pos)
                } else {
                    Up::Context(1, pos - left_len)
                }
            }
        }
        RuleTag::AndR | RuleTag::Cut => {
            let left_len = node.premises[0].conclusion.antecedent.len();
            if pos < left_len {
                Up::Context(0, pos)
            } else {
                Up::Context(1, pos - left_len)
            }
        }
        RuleTag::ImpR
        | RuleTag::BotRule
        | RuleTag::ForallNR
        | RuleTag::ForallFR
        | RuleTag::ExistsNR
        | RuleTag::ExistsFR => Up::Context(0, pos),
        RuleTag::P => {
            let k = node.principal.first().copied().unwrap_or(0);
            if pos == k {
                Up::Context(0, k + 1)
            } else if pos == k + 1 {
                Up::Context(0, k)
            } else {
                Up::Context(0, pos)
            }
        }
    })
}

fn splice(ante: &[Formula], pos: usize, block: &[Formula]) -> Vec<Formula> {
    let mut out = Vec::with_capacity(ante.len() + block.len() - 1);
    out.extend_from_slice(&ante[..pos]);
    out.extend_from_slice(block);
    out.extend_from_slice(&ante[pos + 1..]);
    out
}

/// Reorder `proof`'s antecedent to `target` by emitting P steps. `perm[i]`
/// gives the current position of the formula that must land at `i`.
pub fn permute_to_target(mut proof: ProofTree, perm: &[usize]) -> ProofTree {
    let n = perm.len();
    assert_eq!(proof.conclusion.antecedent.len(), n, "permutation arity");
    // current[i] = original index now sitting at position i
    let mut current: Vec<usize> = (0..n).collect();
    for slot in 0..n {
        let want = perm[slot];
        let mut at = current.iter().position(|&x| x == want).expect("permutation is total");
        while at > slot {
            // swap positions (at-1, at) via one P step
            let mut ante = proof.conclusion.antecedent.clone();
            ante.swap(at - 1, at);
            let concl = Sequent::new(ante, proof.conclusion.succedent.clone());
            proof = ProofTree::node(RuleTag::P, concl, vec![proof]).with_principal(vec![at - 1]);
            current.swap(at - 1, at);
            at -= 1;
        }
    }
    proof
}

/// A cut of `left : Gamma1 |- psi` against position `pos` of `right`'s
/// conclusion (which must hold `psi`), permuted upward until it sits
/// directly below the rule introducing that occurrence. The result proves
/// `right.ante[..pos] ++ Gamma1 ++ right.ante[pos+1..] |- right.succ`.
pub fn splice_cut(
    left: &ProofTree,
    right: &ProofTree,
    pos: usize,
) -> Result<ProofTree, SurgeryError> {
    let cut_formula = right
        .conclusion
        .antecedent
        .get(pos)
        .ok_or(SurgeryError::BadPosition(pos))?;
    if cut_formula != &left.conclusion.succedent {
        return Err(SurgeryError::Irreducible("cut formula mismatch during hoisting".into()));
    }
    let gamma1 = &left.conclusion.antecedent;
    let target_ante = splice(&right.conclusion.antecedent, pos, gamma1);

    match trace_up(right, pos)? {
        Up::Principal => {
            let last = right.conclusion.antecedent.len() - 1;
            debug_assert_eq!(pos, last, "principal occurrences sit at the end");
            // raw cut: Gamma1 ++ Gamma2 |- phi, then move the Gamma1 block
            // to the front of the splice order
            let g = gamma1.len();
            let r = right.conclusion.antecedent.len() - 1;
            let mut ante = gamma1.clone();
            ante.extend_from_slice(&right.conclusion.antecedent[..r]);
            let concl = Sequent::new(ante, right.conclusion.succedent.clone());
            let raw = ProofTree::node(RuleTag::Cut, concl, vec![left.clone(), right.clone()]);
            // target: Gamma2 ++ Gamma1; formula that lands at slot i came
            // from raw position perm[i]
            let perm: Vec<usize> = (g..g + r).chain(0..g).collect();
            Ok(permute_to_target(raw, &perm))
        }
        Up::Context(k, q) => {
            let new_prem = splice_cut(left, &right.premises[k], q)?;
            rebuild_with(right, k, new_prem, target_ante, gamma1.len(), pos, q)
        }
    }
}

/// Rebuild `node` with premise `k` replaced by `new_prem`, whose antecedent
/// is the old one with a block of `g` formulas spliced in at `q`. The new
/// conclusion antecedent is `target_ante` (the corresponding splice at
/// `pos`).
fn rebuild_with(
    node: &ProofTree,
    k: usize,
    new_prem: ProofTree,
    target_ante: Vec<Formula>,
    g: usize,
    pos: usize,
    q: usize,
) -> Result<ProofTree, SurgeryError> {
    let concl = Sequent::new(target_ante, node.conclusion.succedent.clone());
    // eigenvariable side conditions must survive the new context
    if let (Some(eigen), true) = (node.eigen, g > 0) {
        let is_fun = matches!(node.rule, RuleTag::ForallFR | RuleTag::ExistsFL);
        let spliced_block = &new_prem.conclusion.antecedent[q..q + g];
        for f in spliced_block {
            let vs = formula_vars(f);
            let clash =
                if is_fun { vs.free_fun.contains(&eigen) } else { vs.free_num.contains(&eigen) };
            if clash {
                return Err(SurgeryError::Irreducible(format!(
                    "eigenvariable {} becomes free in the cut context",
                    eigen
                )));
            }
        }
    }
    let mut premises: Vec<ProofTree> = node.premises.clone();
    premises[k] = new_prem;
    let mut rebuilt = ProofTree {
        rule: node.rule,
        conclusion: concl,
        premises,
        principal: node.principal.clone(),
        witness: node.witness.clone(),
        eigen: node.eigen,
        leaf: node.leaf.clone(),
    };
    if node.rule == RuleTag::P {
        let kk = node.principal.first().copied().unwrap_or(0);
        if q == kk || q == kk + 1 {
            // the swap used to involve the removed occurrence, which is now
            // a block; realize the block swap by a permutation chain instead
            let prem = rebuilt.premises.pop().expect("p node has a premise");
            debug_assert!(rebuilt.premises.is_empty());
            let n = prem.conclusion.antecedent.len();
            // premise: splice at q; conclusion: splice at pos (pos is the
            // swapped partner of q). Build the permutation sending premise
            // positions to the conclusion order.
            let perm = block_swap_perm(n, kk, q, g);
            let permuted = permute_to_target(prem, &perm);
            debug_assert_eq!(permuted.conclusion.antecedent, rebuilt.conclusion.antecedent);
            return Ok(permuted);
        }
        // swap away from the splice point: shift indices past the block
        let kk2 = if kk > q { kk + g - 1 } else { kk };
        rebuilt.principal = vec![kk2];
    }
    let _ = pos;
    Ok(rebuilt)
}

/// Permutation for a P step whose swap `(kk, kk+1)` involved the traced
/// position `q` (now a block of length `g` in the premise). Returns, for
/// each conclusion slot, the premise position that lands there.
fn block_swap_perm(premise_len: usize, kk: usize, q: usize, g: usize) -> Vec<usize> {
    // premise: [prefix][X at kk][Y at kk+1][suffix], where the traced one of
    // X, Y has been replaced by a block of g formulas.
    let mut out = Vec::with_capacity(premise_len);
    if q == kk {
        // premise: prefix, BLOCK(g), Y, suffix -> conclusion: prefix, Y, BLOCK, suffix
        out.extend(0..kk);
        out.push(kk + g); // Y
        out.extend(kk..kk + g); // block
        out.extend(kk + g + 1..premise_len);
    } else {
        // q == kk + 1: premise: prefix, X, BLOCK(g), suffix -> conclusion:
        // prefix, BLOCK, X, suffix
        out.extend(0..kk);
        out.extend(kk + 1..kk + 1 + g); // block
        out.push(kk); // X
        out.extend(kk + 1 + g..premise_len);
    }
    out
}

/// Remove the antecedent formula at `pos`, which must enter the proof solely
/// through weakenings (contractions of weakenings included). Fails with
/// `NotWeakened` when the occurrence is ever used.
pub fn delete_antecedent(node: &ProofTree, pos: usize) -> Result<ProofTree, SurgeryError> {
    match trace_up(node, pos)? {
        Up::Principal => match node.rule {
            RuleTag::W => Ok(node.premises[0].clone()),
            RuleTag::C => {
                // both copies above must themselves be weakenings
                let prem = &node.premises[0];
                let m = prem.conclusion.antecedent.len();
                let d1 = delete_antecedent(prem, m - 1)?;
                let d2 = delete_antecedent(&d1, m - 2)?;
                Ok(d2)
            }
            _ => Err(SurgeryError::NotWeakened),
        },
        Up::Context(k, q) => {
            let new_prem = delete_antecedent(&node.premises[k], q)?;
            let mut ante = node.conclusion.antecedent.clone();
            ante.remove(pos);
            let concl = Sequent::new(ante, node.conclusion.succedent.clone());
            if node.rule == RuleTag::P {
                let kk = node.principal.first().copied().unwrap_or(0);
                if q == kk || q == kk + 1 {
                    // the swap no longer has a partner; the premise already
                    // matches the conclusion
                    debug_assert_eq!(new_prem.conclusion.antecedent, concl.antecedent);
                    return Ok(new_prem);
                }
                let kk2 = if kk > q { kk - 1 } else { kk };
                let mut premises = node.premises.clone();
                premises[k] = new_prem;
                return Ok(ProofTree {
                    rule: RuleTag::P,
                    conclusion: concl,
                    premises,
                    principal: vec![kk2],
                    witness: None,
                    eigen: None,
                    leaf: None,
                });
            }
            let mut premises = node.premises.clone();
            premises[k] = new_prem;
            Ok(ProofTree {
                rule: node.rule,
                conclusion: concl,
                premises,
                principal: node.principal.clone(),
                witness: node.witness.clone(),
                eigen: node.eigen,
                leaf: node.leaf.clone(),
            })
        }
    }
}

/// Remove a weakening node (addressed by path) and its formula's whole
/// descendant trail down to the root conclusion.
pub fn drop_weakened(root: &ProofTree, w_path: &[u16]) -> Result<ProofTree, SurgeryError> {
    // forward-map the weakened formula's position from the W node down to
    // the root, then delete at the root position
    let mut positions = Vec::new(); // (depth, position at that node)
    {
        let w = root.get(w_path).ok_or(SurgeryError::BadPosition(0))?;
        if w.rule != RuleTag::W {
            return Err(SurgeryError::NotWeakened);
        }
        let mut pos = w.conclusion.antecedent.len() - 1;
        positions.push(pos);
        for depth in (0..w_path.len()).rev() {
            let parent = root.get(&w_path[..depth]).expect("prefix path exists");
            let child_idx = w_path[depth] as usize;
            pos = down_map(parent, child_idx, pos).ok_or(SurgeryError::NotWeakened)?;
            positions.push(pos);
        }
    }
    let root_pos = *positions.last().expect("path has at least the W node");
    delete_antecedent(root, root_pos)
}

/// Conclusion position of premise `k`'s antecedent position `q`, or None
/// when the rule consumes that occurrence.
fn down_map(node: &ProofTree, k: usize, q: usize) -> Option<usize> {
    let prem = &node.premises[k];
    let m = prem.conclusion.antecedent.len();
    match node.rule {
        RuleTag::AndL => {
            if q >= m - 2 {
                None
            } else {
                Some(q)
            }
        }
        RuleTag::AndR => {
            if k == 0 {
                Some(q)
            } else {
                Some(node.premises[0].conclusion.antecedent.len() + q)
            }
        }
        RuleTag::ImpL => {
            if k == 0 {
                None // the left premise proves the antecedent part
            } else if q == m - 1 {
                None
            } else {
                Some(node.premises[0].conclusion.antecedent.len() + q)
            }
        }
        RuleTag::ImpR => {
            if q == m - 1 {
                None
            } else {
                Some(q)
            }
        }
        RuleTag::ForallNL | RuleTag::ForallFL | RuleTag::ExistsNL | RuleTag::ExistsFL => {
            if q == m - 1 {
                None
            } else {
                Some(q)
            }
        }
        RuleTag::C => {
            if q >= m - 2 {
                None // merged; handled by the C case of deletion instead
            } else {
                Some(q)
            }
        }
        RuleTag::W
        | RuleTag::BotRule
        | RuleTag::ForallNR
        | RuleTag::ForallFR
        | RuleTag::ExistsNR
        | RuleTag::ExistsFR => Some(q),
        RuleTag::P => {
            let kk = node.principal.first().copied().unwrap_or(0);
            if q == kk {
                Some(kk + 1)
            } else if q == kk + 1 {
                Some(kk)
            } else {
                Some(q)
            }
        }
        RuleTag::Cut => {
            if k == 0 {
                Some(q)
            } else if q == m - 1 {
                None
            } else {
                Some(node.premises[0].conclusion.antecedent.len() + q)
            }
        }
        RuleTag::I | RuleTag::AxiomLeaf => None,
    }
}
