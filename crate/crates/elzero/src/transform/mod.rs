//! Proof and formula transformations: contraction-similarity with witness
//! chains, affinization of proofs, and the Kuroda negative translation.

mod affinize;
mod contraction;
mod kuroda;

pub use affinize::{affinize, AffinizeError, LinkageMap};
pub use contraction::{
    alpha_eq, contraction_similar, contraction_similar_by, replace_at, sigma_chain,
    subformula_at, SimilarityChain, SimilarityStep,
};
pub use kuroda::{kuroda, kuroda_star, prime_formula, prime_pi12};

#[cfg(test)]
mod tests;
