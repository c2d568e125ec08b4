//! Affinization: rebuild a free-cut-free proof without any contraction,
//! replacing each use of C either by a conjunction merge (when the
//! contracted formula has no existential function quantifier) or by keeping
//! both copies as separately linked antecedent entries. Axiom cuts become
//! cuts on thickened axioms, and the left-side rules replicate across linked
//! copies, with bound variables of duplicated material renamed from a
//! proof-global counter.
//!
//! The result proves a sequent contraction-similar to the input's; the
//! returned linkage surjects output antecedent positions onto input ones.

use super::contraction::{contraction_similar, SimilarityChain};
use crate::calculus::{build, LeafKind, ProofTree, RuleTag, WitnessTerm};
use crate::syntax::{
    formula_vars, Formula, FunTerm, NumTerm, PrimTable, Sequent, VarIdx,
};
use std::collections::BTreeSet;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AffinizeError {
    #[error("input proof is not free-cut free or otherwise ill-formed: {0}")]
    BadInput(String),
    #[error("affinization cannot replicate rule {0} over linked copies")]
    CannotReplicate(&'static str),
    #[error("cut against a non-leaf left premise with a transformed cut formula")]
    CutMismatch,
    #[error("internal: {0}")]
    Internal(String),
}

/// For each output antecedent position, the input position it is linked to
/// and a chain witnessing contraction-similarity.
#[derive(Debug, Clone)]
pub struct LinkageMap {
    pub links: Vec<(usize, SimilarityChain)>,
    pub succedent: SimilarityChain,
}

impl LinkageMap {
    /// Surjectivity onto the input antecedent positions.
    pub fn is_surjective(&self, input_len: usize) -> bool {
        let targets: BTreeSet<usize> = self.links.iter().map(|(i, _)| *i).collect();
        (0..input_len).all(|i| targets.contains(&i))
    }
}

type Tag = u64;

/// Result of affinizing a subproof: the rebuilt proof, the current
/// antecedent layout by element tag, and the per-input-position blocks of
/// linked copies (their concatenation equals the layout).
struct Aff {
    proof: ProofTree,
    tags: Vec<Tag>,
    blocks: Vec<Vec<Tag>>,
}

impl Aff {
    fn formula_of(&self, tag: Tag) -> &Formula {
        let pos = self.tags.iter().position(|&t| t == tag).expect("tag in layout");
        &self.proof.conclusion.antecedent[pos]
    }

    fn pos_of(&self, tag: Tag) -> usize {
        self.tags.iter().position(|&t| t == tag).expect("tag in layout")
    }

    fn check_canonical(&self) {
        debug_assert_eq!(
            self.tags,
            self.blocks.iter().flatten().copied().collect::<Vec<_>>(),
            "affinization layout drifted from canonical block order"
        );
    }
}

struct Cx {
    next_var: VarIdx,
    next_tag: Tag,
}

impl Cx {
    fn fresh_var(&mut self) -> VarIdx {
        let v = self.next_var;
        self.next_var += 1;
        v
    }

    fn fresh_tag(&mut self) -> Tag {
        let t = self.next_tag;
        self.next_tag += 1;
        t
    }
}

pub fn affinize(
    p: &ProofTree,
    prims: &PrimTable,
) -> Result<(ProofTree, LinkageMap), AffinizeError> {
    let mut max_var = 0;
    p.visit(&mut |n, _| {
        for f in n.conclusion.formulas() {
            let vs = formula_vars(f);
            for v in vs
                .free_num
                .iter()
                .chain(vs.free_fun.iter())
                .chain(vs.bound_num.iter())
                .chain(vs.bound_fun.iter())
            {
                max_var = max_var.max(*v);
            }
        }
        if let Some(e) = n.eigen {
            max_var = max_var.max(e);
        }
    });
    let _ = prims;
    let mut cx = Cx { next_var: max_var + 1, next_tag: 0 };
    let aff = go(p, &mut cx)?;
    aff.check_canonical();

    // build the linkage by re-deriving a chain per linked pair
    let mut links = Vec::new();
    let mut out_pos = 0;
    for (input_pos, block) in aff.blocks.iter().enumerate() {
        for _ in block {
            let out_formula = &aff.proof.conclusion.antecedent[out_pos];
            let input_formula = &p.conclusion.antecedent[input_pos];
            let chain = contraction_similar(out_formula, input_formula).ok_or_else(|| {
                AffinizeError::Internal(format!(
                    "output position {out_pos} lost contraction-similarity to input {input_pos}"
                ))
            })?;
            links.push((input_pos, chain));
            out_pos += 1;
        }
    }
    let succedent = contraction_similar(&aff.proof.conclusion.succedent, &p.conclusion.succedent)
        .ok_or_else(|| {
            AffinizeError::Internal("succedent lost contraction-similarity".into())
        })?;
    Ok((aff.proof, LinkageMap { links, succedent }))
}

fn go(p: &ProofTree, cx: &mut Cx) -> Result<Aff, AffinizeError> {
    match p.rule {
        RuleTag::I => {
            let tag = cx.fresh_tag();
            Ok(Aff { proof: p.clone(), tags: vec![tag], blocks: vec![vec![tag]] })
        }
        RuleTag::AxiomLeaf => Ok(Aff { proof: p.clone(), tags: vec![], blocks: vec![] }),
        RuleTag::W => {
            let mut aff = go(&p.premises[0], cx)?;
            let psi = p
                .conclusion
                .antecedent
                .last()
                .ok_or_else(|| AffinizeError::BadInput("weakening without principal".into()))?
                .clone();
            aff.proof = build::weaken(aff.proof, psi);
            let tag = cx.fresh_tag();
            aff.tags.push(tag);
            aff.blocks.push(vec![tag]);
            Ok(aff)
        }
        RuleTag::P => {
            let k = p.principal.first().copied().unwrap_or(0);
            let mut aff = go(&p.premises[0], cx)?;
            // premise blocks correspond to premise positions; the conclusion
            // swaps positions k and k+1
            aff.blocks.swap(k, k + 1);
            canonicalize(&mut aff);
            Ok(aff)
        }
        RuleTag::C => {
            let aff = go(&p.premises[0], cx)?;
            let psi = p
                .conclusion
                .antecedent
                .last()
                .ok_or_else(|| AffinizeError::BadInput("contraction without principal".into()))?;
            if contains_exists_fun(psi) {
                affinize_c_link(aff, cx)
            } else {
                affinize_c_merge(aff, cx)
            }
        }
        RuleTag::AndL => {
            let mut aff = go(&p.premises[0], cx)?;
            // pair up the two blocks at the tail
            let b2 = aff.blocks.pop().ok_or_else(|| bad("andl"))?;
            let b1 = aff.blocks.pop().ok_or_else(|| bad("andl"))?;
            let (mut aff, b1, b2) = equalize_blocks(aff, b1, b2, cx)?;
            let mut merged = Vec::new();
            for (t1, t2) in b1.into_iter().zip(b2) {
                let (new_aff, tag) = merge_pair(aff, t1, t2, cx)?;
                aff = new_aff;
                merged.push(tag);
            }
            aff.blocks.push(merged);
            canonicalize(&mut aff);
            Ok(aff)
        }
        RuleTag::AndR => {
            let l = go(&p.premises[0], cx)?;
            let r = go(&p.premises[1], cx)?;
            let proof = build::and_r(l.proof, r.proof);
            let mut tags = l.tags;
            tags.extend(r.tags);
            let mut blocks = l.blocks;
            blocks.extend(r.blocks);
            Ok(Aff { proof, tags, blocks })
        }
        RuleTag::ImpR => {
            let mut aff = go(&p.premises[0], cx)?;
            let hyp_block = aff.blocks.pop().ok_or_else(|| bad("impr"))?;
            let (new_aff, _tag) = merge_block(aff, hyp_block, cx)?;
            aff = new_aff;
            aff.proof = build::imp_r(aff.proof);
            aff.tags.pop();
            canonicalize(&mut aff);
            Ok(aff)
        }
        RuleTag::BotRule => {
            let mut aff = go(&p.premises[0], cx)?;
            if aff.proof.conclusion.succedent != Formula::Bot {
                return Err(AffinizeError::Internal(
                    "bot-rule premise succedent transformed away from bot".into(),
                ));
            }
            aff.proof = build::bot_rule(aff.proof, p.conclusion.succedent.clone());
            Ok(aff)
        }
        RuleTag::ForallNR | RuleTag::ForallFR | RuleTag::ExistsNR | RuleTag::ExistsFR => {
            affinize_succ_quantifier(p, cx)
        }
        RuleTag::ForallNL | RuleTag::ForallFL => affinize_left_universal(p, cx),
        RuleTag::ExistsNL | RuleTag::ExistsFL => affinize_left_existential(p, cx),
        RuleTag::ImpL => affinize_imp_l(p, cx),
        RuleTag::Cut => affinize_cut(p, cx),
    }
}

fn bad(what: &str) -> AffinizeError {
    AffinizeError::BadInput(format!("malformed {what} node"))
}

fn contains_exists_fun(f: &Formula) -> bool {
    match f {
        Formula::ExistsF(_, _) => true,
        _ => f.children().iter().any(|c| contains_exists_fun(c)),
    }
}

/// Restore the canonical layout (concatenation of blocks) with P steps.
fn canonicalize(aff: &mut Aff) {
    let target: Vec<Tag> = aff.blocks.iter().flatten().copied().collect();
    if target == aff.tags {
        return;
    }
    let perm: Vec<usize> = target
        .iter()
        .map(|t| aff.tags.iter().position(|u| u == t).expect("tag present"))
        .collect();
    let proof = std::mem::replace(&mut aff.proof, ProofTree::node(
        RuleTag::I,
        Sequent::new(vec![], Formula::Bot),
        vec![],
    ));
    aff.proof = crate::calculus::permute_to_target(proof, &perm);
    aff.tags = target;
}

/// Move the element with `tag` to the end of the antecedent.
fn move_tag_to_end(aff: &mut Aff, tag: Tag) {
    let from = aff.pos_of(tag);
    let len = aff.tags.len();
    if from + 1 == len {
        return;
    }
    let proof = std::mem::replace(&mut aff.proof, ProofTree::node(
        RuleTag::I,
        Sequent::new(vec![], Formula::Bot),
        vec![],
    ));
    aff.proof = build::move_to_end(proof, from);
    let t = aff.tags.remove(from);
    aff.tags.push(t);
}

/// Conjunction-merge two elements into one (used for contraction on
/// formulas without existential function quantifiers, and to consolidate
/// blocks that a rule needs as a single formula).
fn merge_pair(mut aff: Aff, t1: Tag, t2: Tag, cx: &mut Cx) -> Result<(Aff, Tag), AffinizeError> {
    move_tag_to_end(&mut aff, t1);
    move_tag_to_end(&mut aff, t2);
    aff.proof = build::and_l(aff.proof);
    aff.tags.pop();
    aff.tags.pop();
    let tag = cx.fresh_tag();
    aff.tags.push(tag);
    Ok((aff, tag))
}

/// Merge a whole block into a single element (left fold).
fn merge_block(mut aff: Aff, block: Vec<Tag>, cx: &mut Cx) -> Result<(Aff, Tag), AffinizeError> {
    let mut iter = block.into_iter();
    let mut acc = iter.next().ok_or_else(|| bad("empty block"))?;
    for t in iter {
        let (new_aff, tag) = merge_pair(aff, acc, t, cx)?;
        aff = new_aff;
        acc = tag;
    }
    // ensure the merged element sits at the end for rules that consume it
    move_tag_to_end(&mut aff, acc);
    Ok((aff, acc))
}

/// Make two blocks the same length by merging surplus copies pairwise.
fn equalize_blocks(
    mut aff: Aff,
    mut b1: Vec<Tag>,
    mut b2: Vec<Tag>,
    cx: &mut Cx,
) -> Result<(Aff, Vec<Tag>, Vec<Tag>), AffinizeError> {
    while b1.len() > b2.len() {
        let t2 = b1.pop().ok_or_else(|| bad("block"))?;
        let t1 = b1.pop().ok_or_else(|| bad("block"))?;
        let (new_aff, tag) = merge_pair(aff, t1, t2, cx)?;
        aff = new_aff;
        b1.push(tag);
    }
    while b2.len() > b1.len() {
        let t2 = b2.pop().ok_or_else(|| bad("block"))?;
        let t1 = b2.pop().ok_or_else(|| bad("block"))?;
        let (new_aff, tag) = merge_pair(aff, t1, t2, cx)?;
        aff = new_aff;
        b2.push(tag);
    }
    Ok((aff, b1, b2))
}

/// Contraction on a formula with no existential function quantifier: the
/// two blocks merge position-wise into one conjunction block.
fn affinize_c_merge(mut aff: Aff, cx: &mut Cx) -> Result<Aff, AffinizeError> {
    let b2 = aff.blocks.pop().ok_or_else(|| bad("c"))?;
    let b1 = aff.blocks.pop().ok_or_else(|| bad("c"))?;
    let (new_aff, t1) = merge_block(aff, b1, cx)?;
    aff = new_aff;
    let (new_aff, t2) = merge_block(aff, b2, cx)?;
    aff = new_aff;
    let (new_aff, tag) = merge_pair(aff, t1, t2, cx)?;
    aff = new_aff;
    aff.blocks.push(vec![tag]);
    canonicalize(&mut aff);
    Ok(aff)
}

/// Contraction on a formula with an existential function quantifier: keep
/// both blocks as linked copies; the second block's bound variables are
/// renamed fresh throughout its derivation.
fn affinize_c_link(mut aff: Aff, cx: &mut Cx) -> Result<Aff, AffinizeError> {
    let b2 = aff.blocks.pop().ok_or_else(|| bad("c"))?;
    let b1 = aff.blocks.pop().ok_or_else(|| bad("c"))?;
    // rename the second block's binders apart from the first's
    let positions: BTreeSet<usize> = b2.iter().map(|t| aff.pos_of(*t)).collect();
    let occs: BTreeSet<Occ> = positions.iter().map(|&p| Occ::Ante(p)).collect();
    let mut binders = BTreeSet::new();
    collect_ancestry_binders(&aff.proof, &occs, &mut binders);
    let map: RenameMap =
        binders.into_iter().map(|key| (key, cx.fresh_var())).collect();
    if !map.is_empty() {
        aff.proof = rename_ancestry(&aff.proof, &occs, &map);
    }
    let mut block = b1;
    block.extend(b2);
    aff.blocks.push(block);
    canonicalize(&mut aff);
    Ok(aff)
}

/// Succedent quantifier rules: pull the (possibly thickened) premise
/// succedent back through the substitution and re-apply the rule.
fn affinize_succ_quantifier(p: &ProofTree, cx: &mut Cx) -> Result<Aff, AffinizeError> {
    let mut aff = go(&p.premises[0], cx)?;
    let succ = aff.proof.conclusion.succedent.clone();
    match (p.rule, &p.conclusion.succedent) {
        (RuleTag::ExistsNR, Formula::ExistsN(j, body)) => {
            let Some(WitnessTerm::Num(t)) = &p.witness else { return Err(bad("exnr")) };
            let chi = pull_back_num(&succ, body, *j, t).ok_or_else(|| {
                AffinizeError::Internal("existential witness pull-back failed".into())
            })?;
            aff.proof = build::exists_nr(aff.proof, *j, chi, t.clone());
        }
        (RuleTag::ExistsFR, Formula::ExistsF(i, body)) => {
            let Some(WitnessTerm::Fun(t)) = &p.witness else { return Err(bad("exfr")) };
            let chi = pull_back_fun(&succ, body, *i, t).ok_or_else(|| {
                AffinizeError::Internal("existential witness pull-back failed".into())
            })?;
            aff.proof = build::exists_fr(aff.proof, *i, chi, t.clone());
        }
        (RuleTag::ForallNR, Formula::ForallN(j, body)) => {
            let eigen = p.eigen.ok_or_else(|| bad("allnr"))?;
            let _ = body;
            let chi = rename_formula(&succ, &[((false, eigen), *j)].into_iter().collect());
            aff.proof = build::forall_nr(aff.proof, *j, chi, eigen);
        }
        (RuleTag::ForallFR, Formula::ForallF(i, body)) => {
            let eigen = p.eigen.ok_or_else(|| bad("allfr"))?;
            let _ = body;
            let chi = rename_formula(&succ, &[((true, eigen), *i)].into_iter().collect());
            aff.proof = build::forall_fr(aff.proof, *i, chi, eigen);
        }
        _ => return Err(bad("succedent quantifier")),
    }
    Ok(aff)
}

/// Universal-left: replicate the rule across the linked copies of the
/// instantiated premise formula.
fn affinize_left_universal(p: &ProofTree, cx: &mut Cx) -> Result<Aff, AffinizeError> {
    let mut aff = go(&p.premises[0], cx)?;
    let block = aff.blocks.pop().ok_or_else(|| bad("universal-left"))?;
    let mut new_block = Vec::new();
    for (copy_idx, tag) in block.into_iter().enumerate() {
        move_tag_to_end(&mut aff, tag);
        let inst = aff.formula_of(tag).clone();
        match (p.rule, p.conclusion.antecedent.last()) {
            (RuleTag::ForallNL, Some(Formula::ForallN(j, body))) => {
                let Some(WitnessTerm::Num(t)) = &p.witness else { return Err(bad("allnl")) };
                let mut chi = pull_back_num(&inst, body, *j, t).ok_or_else(|| {
                    AffinizeError::Internal("universal witness pull-back failed".into())
                })?;
                // later copies re-bind the quantifier variable; rename it
                let mut var = *j;
                if copy_idx > 0 {
                    let fresh = cx.fresh_var();
                    chi = rename_formula(&chi, &[((false, *j), fresh)].into_iter().collect());
                    var = fresh;
                }
                let witness = discover_witness_num(&chi, var, &inst);
                aff.proof = build::forall_nl(aff.proof, var, chi, witness);
            }
            (RuleTag::ForallFL, Some(Formula::ForallF(i, body))) => {
                let Some(WitnessTerm::Fun(t)) = &p.witness else { return Err(bad("allfl")) };
                let mut chi = pull_back_fun(&inst, body, *i, t).ok_or_else(|| {
                    AffinizeError::Internal("universal witness pull-back failed".into())
                })?;
                let mut var = *i;
                if copy_idx > 0 {
                    let fresh = cx.fresh_var();
                    chi = rename_formula(&chi, &[((true, *i), fresh)].into_iter().collect());
                    var = fresh;
                }
                let witness = discover_witness_fun(&chi, var, &inst, t);
                aff.proof = build::forall_fl(aff.proof, var, chi, witness);
            }
            _ => return Err(bad("universal-left")),
        }
        // the quantified formula replaced the tail element
        aff.tags.pop();
        let new_tag = cx.fresh_tag();
        aff.tags.push(new_tag);
        new_block.push(new_tag);
    }
    aff.blocks.push(new_block);
    canonicalize(&mut aff);
    Ok(aff)
}

/// Existential-left: an eigenvariable rule; linked copies cannot share one
/// eigenvariable, so only single copies are supported. The premise formula
/// may still be thickened.
fn affinize_left_existential(p: &ProofTree, cx: &mut Cx) -> Result<Aff, AffinizeError> {
    let mut aff = go(&p.premises[0], cx)?;
    let block = aff.blocks.pop().ok_or_else(|| bad("existential-left"))?;
    if block.len() != 1 {
        return Err(AffinizeError::CannotReplicate("existential-left"));
    }
    let tag = block[0];
    move_tag_to_end(&mut aff, tag);
    let inst = aff.formula_of(tag).clone();
    let eigen = p.eigen.ok_or_else(|| bad("existential-left"))?;
    match (p.rule, p.conclusion.antecedent.last()) {
        (RuleTag::ExistsNL, Some(Formula::ExistsN(j, _))) => {
            let chi = rename_formula(&inst, &[((false, eigen), *j)].into_iter().collect());
            aff.proof = build::exists_nl(aff.proof, *j, chi, eigen);
        }
        (RuleTag::ExistsFL, Some(Formula::ExistsF(i, _))) => {
            let chi = rename_formula(&inst, &[((true, eigen), *i)].into_iter().collect());
            aff.proof = build::exists_fl(aff.proof, *i, chi, eigen);
        }
        _ => return Err(bad("existential-left")),
    }
    aff.tags.pop();
    let new_tag = cx.fresh_tag();
    aff.tags.push(new_tag);
    aff.blocks.push(vec![new_tag]);
    canonicalize(&mut aff);
    Ok(aff)
}

/// Implication-left: replicate across linked copies of the consequent,
/// duplicating the whole left subproof (with fresh local variables) per
/// copy.
fn affinize_imp_l(p: &ProofTree, cx: &mut Cx) -> Result<Aff, AffinizeError> {
    let left = go(&p.premises[0], cx)?;
    let mut right = go(&p.premises[1], cx)?;
    let block = right.blocks.pop().ok_or_else(|| bad("impl"))?;

    let mut new_block = Vec::new();
    let left_blocks_template = left.blocks.clone();
    let mut left_block_insertions: Vec<Vec<Vec<Tag>>> = Vec::new();

    for (copy_idx, tag) in block.into_iter().enumerate() {
        // each copy consumes its own instance of the left subproof
        let (left_proof, left_tag_count) = if copy_idx == 0 {
            (left.proof.clone(), left.tags.len())
        } else {
            let renamed = duplicate_subproof(&left.proof, cx);
            (renamed, left.tags.len())
        };
        move_tag_to_end(&mut right, tag);
        let taken = std::mem::replace(
            &mut right.proof,
            ProofTree::node(RuleTag::I, Sequent::new(vec![], Formula::Bot), vec![]),
        );
        let proof = build::imp_l(left_proof, taken);
        // layout after imp_l: left-ante ++ right-ante-minus-last ++ [imp]
        let mut fresh_left_tags = Vec::new();
        for _ in 0..left_tag_count {
            fresh_left_tags.push(cx.fresh_tag());
        }
        let imp_tag = cx.fresh_tag();
        let mut tags = fresh_left_tags.clone();
        let mut rest = right.tags.clone();
        rest.pop();
        tags.extend(rest);
        tags.push(imp_tag);
        // record which input blocks the duplicated left context maps to
        let mut grouped = Vec::new();
        let mut iter = fresh_left_tags.into_iter();
        for blk in &left_blocks_template {
            grouped.push((&mut iter).take(blk.len()).collect::<Vec<_>>());
        }
        left_block_insertions.push(grouped);
        new_block.push(imp_tag);
        debug_assert_eq!(tags.len(), proof.conclusion.antecedent.len());
        right.proof = proof;
        right.tags = tags;
    }

    // assemble blocks: left-context blocks (all copies merged per input
    // position) then the right-context blocks then the implication block
    let mut blocks: Vec<Vec<Tag>> = Vec::new();
    for (i, _) in left_blocks_template.iter().enumerate() {
        let mut merged = Vec::new();
        for copy in &left_block_insertions {
            merged.extend(copy[i].iter().copied());
        }
        blocks.push(merged);
    }
    blocks.extend(right.blocks.clone());
    blocks.push(new_block);
    right.blocks = blocks;
    canonicalize(&mut right);
    Ok(right)
}

/// Cuts in a free-cut-free proof sit on axioms (or thickened axioms): each
/// linked copy of the cut formula is cut against its own leaf.
fn affinize_cut(p: &ProofTree, cx: &mut Cx) -> Result<Aff, AffinizeError> {
    let left_node = &p.premises[0];
    let mut right = go(&p.premises[1], cx)?;
    let block = right.blocks.pop().ok_or_else(|| bad("cut"))?;

    if left_node.rule == RuleTag::AxiomLeaf {
        let base = match &left_node.leaf {
            Some(LeafKind::Sigma { base }) => base.clone(),
            _ => left_node.conclusion.succedent.clone(),
        };
        for tag in block {
            move_tag_to_end(&mut right, tag);
            let copy = right.formula_of(tag).clone();
            let leaf = if copy == base && left_node.leaf != Some(LeafKind::Sigma { base: base.clone() }) {
                left_node.clone()
            } else {
                build::sigma_axiom(copy, base.clone())
            };
            right.proof = build::cut(leaf, right.proof);
            right.tags.pop();
        }
        canonicalize(&mut right);
        Ok(right)
    } else {
        // general left premise: only the untransformed single-copy case
        let left = go(left_node, cx)?;
        if block.len() != 1 {
            return Err(AffinizeError::CannotReplicate("cut"));
        }
        let tag = block[0];
        move_tag_to_end(&mut right, tag);
        if right.formula_of(tag) != &left.proof.conclusion.succedent {
            return Err(AffinizeError::CutMismatch);
        }
        let taken = std::mem::replace(
            &mut right.proof,
            ProofTree::node(RuleTag::I, Sequent::new(vec![], Formula::Bot), vec![]),
        );
        let proof = build::cut(left.proof, taken);
        right.tags.pop();
        let mut tags = Vec::new();
        let mut blocks = left.blocks;
        for blk in &mut blocks {
            for t in blk.iter_mut() {
                let fresh = cx.fresh_tag();
                *t = fresh;
                tags.push(fresh);
            }
        }
        tags.extend(right.tags.iter().copied());
        blocks.extend(right.blocks.clone());
        right.proof = proof;
        right.tags = tags;
        right.blocks = blocks;
        canonicalize(&mut right);
        Ok(right)
    }
}

// --- renaming machinery -------------------------------------------------

pub(crate) type RenameMap = BTreeMap<(bool, VarIdx), VarIdx>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Occ {
    Ante(usize),
    Succ,
}

/// Rename every variable in `map` (binder or occurrence) inside a formula.
pub(crate) fn rename_formula(f: &Formula, map: &RenameMap) -> Formula {
    match f {
        Formula::Bot => Formula::Bot,
        Formula::Eq(l, r) => Formula::eq(rename_num(l, map), rename_num(r, map)),
        Formula::And(l, r) => Formula::and(rename_formula(l, map), rename_formula(r, map)),
        Formula::Imp(l, r) => Formula::imp(rename_formula(l, map), rename_formula(r, map)),
        Formula::ExistsN(j, g) => {
            Formula::exists_n(rename_var(*j, false, map), rename_formula(g, map))
        }
        Formula::ForallN(j, g) => {
            Formula::forall_n(rename_var(*j, false, map), rename_formula(g, map))
        }
        Formula::ExistsF(i, g) => {
            Formula::exists_f(rename_var(*i, true, map), rename_formula(g, map))
        }
        Formula::ForallF(i, g) => {
            Formula::forall_f(rename_var(*i, true, map), rename_formula(g, map))
        }
    }
}

fn rename_var(v: VarIdx, is_fun: bool, map: &RenameMap) -> VarIdx {
    map.get(&(is_fun, v)).copied().unwrap_or(v)
}

pub(crate) fn rename_num(t: &NumTerm, map: &RenameMap) -> NumTerm {
    match t {
        NumTerm::NumVar(j) => NumTerm::NumVar(rename_var(*j, false, map)),
        NumTerm::Zero => NumTerm::Zero,
        NumTerm::Succ(s) => NumTerm::succ(rename_num(s, map)),
        NumTerm::PrimApp(f, args) => {
            NumTerm::PrimApp(*f, args.iter().map(|a| rename_num(a, map)).collect())
        }
        NumTerm::FunApp(tau, s) => {
            NumTerm::FunApp(Box::new(rename_fun(tau, map)), Box::new(rename_num(s, map)))
        }
    }
}

pub(crate) fn rename_fun(tau: &FunTerm, map: &RenameMap) -> FunTerm {
    match tau {
        FunTerm::FunVar(i) => FunTerm::FunVar(rename_var(*i, true, map)),
        FunTerm::Lambda(j, body) => {
            FunTerm::Lambda(rename_var(*j, false, map), Box::new(rename_num(body, map)))
        }
        FunTerm::Rec(base, step) => {
            FunTerm::Rec(Box::new(rename_num(base, map)), Box::new(rename_fun(step, map)))
        }
    }
}

/// Duplicate a whole subproof with every local variable (anything not free
/// in its conclusion) renamed fresh.
fn duplicate_subproof(p: &ProofTree, cx: &mut Cx) -> ProofTree {
    let mut local: BTreeSet<(bool, VarIdx)> = BTreeSet::new();
    p.visit(&mut |n, _| {
        for f in n.conclusion.formulas() {
            let vs = formula_vars(f);
            local.extend(vs.free_num.iter().map(|j| (false, *j)));
            local.extend(vs.free_fun.iter().map(|i| (true, *i)));
            local.extend(vs.bound_num.iter().map(|j| (false, *j)));
            local.extend(vs.bound_fun.iter().map(|i| (true, *i)));
        }
        if let Some(e) = n.eigen {
            let is_fun = matches!(n.rule, RuleTag::ForallFR | RuleTag::ExistsFL);
            local.insert((is_fun, e));
        }
    });
    for f in p.conclusion.formulas() {
        let vs = formula_vars(f);
        for j in vs.free_num {
            local.remove(&(false, j));
        }
        for i in vs.free_fun {
            local.remove(&(true, i));
        }
    }
    let map: RenameMap = local.into_iter().map(|key| (key, cx.fresh_var())).collect();
    rename_whole(p, &map)
}

fn rename_whole(p: &ProofTree, map: &RenameMap) -> ProofTree {
    let conclusion = Sequent::new(
        p.conclusion.antecedent.iter().map(|f| rename_formula(f, map)).collect(),
        rename_formula(&p.conclusion.succedent, map),
    );
    ProofTree {
        rule: p.rule,
        conclusion,
        premises: p.premises.iter().map(|q| rename_whole(q, map)).collect(),
        principal: p.principal.clone(),
        witness: p.witness.as_ref().map(|w| match w {
            WitnessTerm::Num(t) => WitnessTerm::Num(rename_num(t, map)),
            WitnessTerm::Fun(t) => WitnessTerm::Fun(rename_fun(t, map)),
        }),
        eigen: p.eigen.map(|e| {
            let is_fun = matches!(p.rule, RuleTag::ForallFR | RuleTag::ExistsFL);
            rename_var(e, is_fun, map)
        }),
        leaf: p.leaf.as_ref().map(|l| match l {
            LeafKind::Sigma { base } => LeafKind::Sigma { base: rename_formula(base, map) },
            other => other.clone(),
        }),
    }
}

/// Premise occurrences of a set of tracked conclusion occurrences, plus
/// whether the node's own annotations lie on the trail.
fn premise_occs(node: &ProofTree, occs: &BTreeSet<Occ>) -> (Vec<BTreeSet<Occ>>, bool) {
    let mut per: Vec<BTreeSet<Occ>> = node.premises.iter().map(|_| BTreeSet::new()).collect();
    let mut on_principal = false;
    let last = node.conclusion.antecedent.len().wrapping_sub(1);
    for occ in occs {
        match occ {
            Occ::Ante(pos) => match crate::calculus::trace_up(node, *pos) {
                Ok(crate::calculus::Up::Context(k, q)) => {
                    per[k].insert(Occ::Ante(q));
                }
                Ok(crate::calculus::Up::Principal) => {
                    on_principal = true;
                    debug_assert_eq!(*pos, last);
                    match node.rule {
                        RuleTag::AndL | RuleTag::C => {
                            let m = node.premises[0].conclusion.antecedent.len();
                            per[0].insert(Occ::Ante(m - 1));
                            per[0].insert(Occ::Ante(m - 2));
                        }
                        RuleTag::ImpL => {
                            per[0].insert(Occ::Succ);
                            let m = node.premises[1].conclusion.antecedent.len();
                            per[1].insert(Occ::Ante(m - 1));
                        }
                        RuleTag::ForallNL
                        | RuleTag::ForallFL
                        | RuleTag::ExistsNL
                        | RuleTag::ExistsFL => {
                            let m = node.premises[0].conclusion.antecedent.len();
                            per[0].insert(Occ::Ante(m - 1));
                        }
                        RuleTag::W | RuleTag::I | RuleTag::AxiomLeaf => {}
                        _ => {}
                    }
                }
                Err(_) => {}
            },
            Occ::Succ => match node.rule {
                RuleTag::ImpR => {
                    on_principal = true;
                    per[0].insert(Occ::Succ);
                    let m = node.premises[0].conclusion.antecedent.len();
                    per[0].insert(Occ::Ante(m - 1));
                }
                RuleTag::AndR => {
                    on_principal = true;
                    per[0].insert(Occ::Succ);
                    per[1].insert(Occ::Succ);
                }
                RuleTag::ForallNR | RuleTag::ForallFR | RuleTag::ExistsNR | RuleTag::ExistsFR => {
                    on_principal = true;
                    per[0].insert(Occ::Succ);
                }
                RuleTag::BotRule | RuleTag::I | RuleTag::AxiomLeaf => {
                    on_principal = true;
                }
                RuleTag::Cut | RuleTag::ImpL => {
                    per[1].insert(Occ::Succ);
                }
                _ => {
                    if !node.premises.is_empty() {
                        per[0].insert(Occ::Succ);
                    }
                }
            },
        }
    }
    (per, on_principal)
}

/// Collect every binder index appearing in the tracked occurrences'
/// ancestry (so a rename map can be built before rewriting).
fn collect_ancestry_binders(
    node: &ProofTree,
    occs: &BTreeSet<Occ>,
    out: &mut BTreeSet<(bool, VarIdx)>,
) {
    if occs.is_empty() {
        return;
    }
    let mut note = |f: &Formula| {
        let vs = formula_vars(f);
        out.extend(vs.bound_num.iter().map(|j| (false, *j)));
        out.extend(vs.bound_fun.iter().map(|i| (true, *i)));
    };
    for occ in occs {
        match occ {
            Occ::Ante(pos) => {
                if let Some(f) = node.conclusion.antecedent.get(*pos) {
                    note(f);
                }
            }
            Occ::Succ => note(&node.conclusion.succedent),
        }
    }
    let (per, _) = premise_occs(node, occs);
    for (k, prem_occs) in per.iter().enumerate() {
        collect_ancestry_binders(&node.premises[k], prem_occs, out);
    }
}

/// Rewrite the tracked occurrences (and the annotations of rules acting on
/// them) with the rename map, leaving every other formula untouched.
fn rename_ancestry(node: &ProofTree, occs: &BTreeSet<Occ>, map: &RenameMap) -> ProofTree {
    if occs.is_empty() {
        return node.clone();
    }
    let (per, on_principal) = premise_occs(node, occs);
    let premises: Vec<ProofTree> = node
        .premises
        .iter()
        .zip(&per)
        .map(|(p, o)| rename_ancestry(p, o, map))
        .collect();
    let mut ante = node.conclusion.antecedent.clone();
    let mut succ = node.conclusion.succedent.clone();
    let mut rewrite_succ = false;
    for occ in occs {
        match occ {
            Occ::Ante(pos) => {
                if let Some(f) = ante.get_mut(*pos) {
                    *f = rename_formula(f, map);
                }
                if node.rule == RuleTag::I {
                    rewrite_succ = true;
                }
            }
            Occ::Succ => rewrite_succ = true,
        }
    }
    if rewrite_succ {
        succ = rename_formula(&succ, map);
    }
    let witness = if on_principal {
        node.witness.as_ref().map(|w| match w {
            WitnessTerm::Num(t) => WitnessTerm::Num(rename_num(t, map)),
            WitnessTerm::Fun(t) => WitnessTerm::Fun(rename_fun(t, map)),
        })
    } else {
        node.witness.clone()
    };
    let leaf = if rewrite_succ {
        node.leaf.as_ref().map(|l| match l {
            LeafKind::Sigma { base } => LeafKind::Sigma { base: rename_formula(base, map) },
            other => other.clone(),
        })
    } else {
        node.leaf.clone()
    };
    ProofTree {
        rule: node.rule,
        conclusion: Sequent::new(ante, succ),
        premises,
        principal: node.principal.clone(),
        witness,
        eigen: node.eigen,
        leaf,
    }
}

// --- pull-backs through substitution --------------------------------------

/// Find `chi` with `chi[x_j := t] == zeta`, where `zeta` is a thickening of
/// `body[x_j := t]` (possibly with renamed binders). Thickening sites map
/// conjunctions of `zeta` onto single source nodes; at hole positions the
/// occurrence of `t` (or its binder-renamed image) is replaced by the
/// variable again.
fn pull_back_num(zeta: &Formula, body: &Formula, j: VarIdx, _t: &NumTerm) -> Option<Formula> {
    pb_formula(zeta, body, &Hole::Num(j))
}

fn pull_back_fun(zeta: &Formula, body: &Formula, i: VarIdx, _t: &FunTerm) -> Option<Formula> {
    pb_formula(zeta, body, &Hole::Fun(i))
}

enum Hole {
    Num(VarIdx),
    Fun(VarIdx),
}

fn pb_formula(zeta: &Formula, body: &Formula, hole: &Hole) -> Option<Formula> {
    // thickening site: both conjuncts pull back against the same source
    if let Formula::And(l, r) = zeta {
        if !matches!(body, Formula::And(_, _)) {
            let pl = pb_formula(l, body, hole)?;
            let pr = pb_formula(r, body, hole)?;
            return Some(Formula::and(pl, pr));
        }
    }
    match (zeta, body) {
        (Formula::Bot, Formula::Bot) => Some(Formula::Bot),
        (Formula::Eq(l1, r1), Formula::Eq(l2, r2)) => {
            Some(Formula::eq(pb_num(l1, l2, hole)?, pb_num(r1, r2, hole)?))
        }
        (Formula::And(l1, r1), Formula::And(l2, r2)) => {
            // componentwise first; a root thickening of a conjunction is
            // tried as the fallback
            if let (Some(pl), Some(pr)) = (pb_formula(l1, l2, hole), pb_formula(r1, r2, hole)) {
                return Some(Formula::and(pl, pr));
            }
            let pl = pb_formula(l1, body, hole)?;
            let pr = pb_formula(r1, body, hole)?;
            Some(Formula::and(pl, pr))
        }
        (Formula::Imp(l1, r1), Formula::Imp(l2, r2)) => {
            Some(Formula::imp(pb_formula(l1, l2, hole)?, pb_formula(r1, r2, hole)?))
        }
        (Formula::ExistsN(v1, g1), Formula::ExistsN(_, g2)) => {
            Some(Formula::exists_n(*v1, pb_formula(g1, g2, hole)?))
        }
        (Formula::ForallN(v1, g1), Formula::ForallN(_, g2)) => {
            Some(Formula::forall_n(*v1, pb_formula(g1, g2, hole)?))
        }
        (Formula::ExistsF(v1, g1), Formula::ExistsF(_, g2)) => {
            Some(Formula::exists_f(*v1, pb_formula(g1, g2, hole)?))
        }
        (Formula::ForallF(v1, g1), Formula::ForallF(_, g2)) => {
            Some(Formula::forall_f(*v1, pb_formula(g1, g2, hole)?))
        }
        _ => None,
    }
}

fn pb_num(zt: &NumTerm, bt: &NumTerm, hole: &Hole) -> Option<NumTerm> {
    if let Hole::Num(j) = hole {
        if let NumTerm::NumVar(v) = bt {
            if v == j {
                // hole position: restore the variable
                return Some(NumTerm::NumVar(*j));
            }
        }
    }
    match (zt, bt) {
        (NumTerm::NumVar(a), NumTerm::NumVar(_)) => Some(NumTerm::NumVar(*a)),
        (NumTerm::Zero, NumTerm::Zero) => Some(NumTerm::Zero),
        (NumTerm::Succ(a), NumTerm::Succ(b)) => Some(NumTerm::succ(pb_num(a, b, hole)?)),
        (NumTerm::PrimApp(f, xs), NumTerm::PrimApp(g, ys)) if f == g && xs.len() == ys.len() => {
            let args: Option<Vec<_>> =
                xs.iter().zip(ys).map(|(x, y)| pb_num(x, y, hole)).collect();
            Some(NumTerm::PrimApp(*f, args?))
        }
        (NumTerm::FunApp(t1, a), NumTerm::FunApp(t2, b)) => Some(NumTerm::FunApp(
            Box::new(pb_fun(t1, t2, hole)?),
            Box::new(pb_num(a, b, hole)?),
        )),
        _ => None,
    }
}

fn pb_fun(zt: &FunTerm, bt: &FunTerm, hole: &Hole) -> Option<FunTerm> {
    if let Hole::Fun(i) = hole {
        if let FunTerm::FunVar(v) = bt {
            if v == i {
                return Some(FunTerm::FunVar(*i));
            }
        }
    }
    match (zt, bt) {
        (FunTerm::FunVar(a), FunTerm::FunVar(_)) => Some(FunTerm::FunVar(*a)),
        (FunTerm::Lambda(a, x), FunTerm::Lambda(_, y)) => {
            Some(FunTerm::Lambda(*a, Box::new(pb_num(x, y, hole)?)))
        }
        (FunTerm::Rec(x, t1), FunTerm::Rec(y, t2)) => Some(FunTerm::Rec(
            Box::new(pb_num(x, y, hole)?),
            Box::new(pb_fun(t1, t2, hole)?),
        )),
        _ => None,
    }
}

/// Witness for a replicated universal-left instance: the term such that
/// `chi[var := witness] == inst`. Found by comparing the pulled-back body
/// with the instance at the first hole occurrence.
fn discover_witness_num(chi: &Formula, var: VarIdx, inst: &Formula) -> NumTerm {
    fn find_f(chi: &Formula, inst: &Formula, var: VarIdx) -> Option<NumTerm> {
        match (chi, inst) {
            (Formula::Eq(l1, r1), Formula::Eq(l2, r2)) => {
                find_t(l1, l2, var).or_else(|| find_t(r1, r2, var))
            }
            (Formula::And(l1, r1), Formula::And(l2, r2))
            | (Formula::Imp(l1, r1), Formula::Imp(l2, r2)) => {
                find_f(l1, l2, var).or_else(|| find_f(r1, r2, var))
            }
            (Formula::ExistsN(_, g1), Formula::ExistsN(_, g2))
            | (Formula::ForallN(_, g1), Formula::ForallN(_, g2))
            | (Formula::ExistsF(_, g1), Formula::ExistsF(_, g2))
            | (Formula::ForallF(_, g1), Formula::ForallF(_, g2)) => find_f(g1, g2, var),
            _ => None,
        }
    }
    fn find_t(chi: &NumTerm, inst: &NumTerm, var: VarIdx) -> Option<NumTerm> {
        match (chi, inst) {
            (NumTerm::NumVar(v), t) if *v == var => Some(t.clone()),
            (NumTerm::Succ(a), NumTerm::Succ(b)) => find_t(a, b, var),
            (NumTerm::PrimApp(_, xs), NumTerm::PrimApp(_, ys)) => {
                xs.iter().zip(ys).find_map(|(x, y)| find_t(x, y, var))
            }
            (NumTerm::FunApp(t1, a), NumTerm::FunApp(t2, b)) => {
                find_ft(t1, t2, var).or_else(|| find_t(a, b, var))
            }
            _ => None,
        }
    }
    fn find_ft(chi: &FunTerm, inst: &FunTerm, var: VarIdx) -> Option<NumTerm> {
        match (chi, inst) {
            (FunTerm::Lambda(_, x), FunTerm::Lambda(_, y)) => find_t(x, y, var),
            (FunTerm::Rec(x, t1), FunTerm::Rec(y, t2)) => {
                find_t(x, y, var).or_else(|| find_ft(t1, t2, var))
            }
            _ => None,
        }
    }
    find_f(chi, inst, var).unwrap_or(NumTerm::Zero)
}

fn discover_witness_fun(chi: &Formula, var: VarIdx, inst: &Formula, fallback: &FunTerm) -> FunTerm {
    fn find_f(chi: &Formula, inst: &Formula, var: VarIdx) -> Option<FunTerm> {
        match (chi, inst) {
            (Formula::Eq(l1, r1), Formula::Eq(l2, r2)) => {
                find_t(l1, l2, var).or_else(|| find_t(r1, r2, var))
            }
            (Formula::And(l1, r1), Formula::And(l2, r2))
            | (Formula::Imp(l1, r1), Formula::Imp(l2, r2)) => {
                find_f(l1, l2, var).or_else(|| find_f(r1, r2, var))
            }
            (Formula::ExistsN(_, g1), Formula::ExistsN(_, g2))
            | (Formula::ForallN(_, g1), Formula::ForallN(_, g2))
            | (Formula::ExistsF(_, g1), Formula::ExistsF(_, g2))
            | (Formula::ForallF(_, g1), Formula::ForallF(_, g2)) => find_f(g1, g2, var),
            _ => None,
        }
    }
    fn find_t(chi: &NumTerm, inst: &NumTerm, var: VarIdx) -> Option<FunTerm> {
        match (chi, inst) {
            (NumTerm::Succ(a), NumTerm::Succ(b)) => find_t(a, b, var),
            (NumTerm::PrimApp(_, xs), NumTerm::PrimApp(_, ys)) => {
                xs.iter().zip(ys).find_map(|(x, y)| find_t(x, y, var))
            }
            (NumTerm::FunApp(t1, a), NumTerm::FunApp(t2, b)) => {
                find_ft(t1, t2, var).or_else(|| find_t(a, b, var))
            }
            _ => None,
        }
    }
    fn find_ft(chi: &FunTerm, inst: &FunTerm, var: VarIdx) -> Option<FunTerm> {
        match (chi, inst) {
            (FunTerm::FunVar(v), t) if *v == var => Some(t.clone()),
            (FunTerm::Lambda(_, x), FunTerm::Lambda(_, y)) => find_t(x, y, var),
            (FunTerm::Rec(x, t1), FunTerm::Rec(y, t2)) => {
                find_t(x, y, var).or_else(|| find_ft(t1, t2, var))
            }
            _ => None,
        }
    }
    find_f(chi, inst, var).unwrap_or_else(|| fallback.clone())
}
