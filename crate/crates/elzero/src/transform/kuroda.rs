//! The Kuroda negative translation: `phi^q = not not phi^*`, where `*`
//! leaves atoms alone, commutes with the positive connectives and the
//! existential quantifiers, and inserts a double negation directly under
//! every universal quantifier of either sort.

use crate::syntax::{classify_pi12, Formula, Pi12Parts};

pub fn kuroda_star(phi: &Formula) -> Formula {
    match phi {
        Formula::Eq(_, _) | Formula::Bot => phi.clone(),
        Formula::And(l, r) => Formula::and(kuroda_star(l), kuroda_star(r)),
        Formula::Imp(l, r) => Formula::imp(kuroda_star(l), kuroda_star(r)),
        Formula::ExistsN(j, g) => Formula::exists_n(*j, kuroda_star(g)),
        Formula::ExistsF(i, g) => Formula::exists_f(*i, kuroda_star(g)),
        Formula::ForallN(j, g) => {
            Formula::forall_n(*j, Formula::not(Formula::not(kuroda_star(g))))
        }
        Formula::ForallF(i, g) => {
            Formula::forall_f(*i, Formula::not(Formula::not(kuroda_star(g))))
        }
    }
}

pub fn kuroda(phi: &Formula) -> Formula {
    Formula::not(Formula::not(kuroda_star(phi)))
}

/// Translate only the matrices of a problem formula: the outer skeleton
/// `forall a (xi -> exists b psi)` is preserved while `xi` and `psi` become
/// their Kuroda translations.
pub fn prime_pi12(parts: &Pi12Parts) -> Pi12Parts {
    Pi12Parts {
        alpha: parts.alpha,
        xi: kuroda(&parts.xi),
        beta: parts.beta,
        psi: kuroda(&parts.psi),
    }
}

/// The primed problem as a formula.
pub fn prime_formula(phi: &Formula) -> Option<Formula> {
    let parts = classify_pi12(phi)?;
    let primed = prime_pi12(&parts);
    Some(Formula::forall_f(
        primed.alpha,
        Formula::imp(primed.xi, Formula::exists_f(primed.beta, primed.psi)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::NumTerm;

    fn atom() -> Formula {
        Formula::eq(NumTerm::var(1), NumTerm::Zero)
    }

    #[test]
    fn definitional_clauses() {
        let a = atom();
        // atoms: phi^q = not not phi
        assert_eq!(kuroda(&a), Formula::not(Formula::not(a.clone())));
        // universal number quantifier: (forall x phi)^* = forall x not not phi^*
        let all = Formula::forall_n(1, a.clone());
        assert_eq!(
            kuroda(&all),
            Formula::not(Formula::not(Formula::forall_n(
                1,
                Formula::not(Formula::not(a.clone()))
            )))
        );
        // existential commutes
        let ex = Formula::exists_n(1, a.clone());
        assert_eq!(kuroda(&ex), Formula::not(Formula::not(ex.clone())));
        // conjunction and implication distribute under *
        let and = Formula::and(a.clone(), Formula::Bot);
        assert_eq!(kuroda_star(&and), Formula::and(kuroda_star(&a), Formula::Bot));
        let imp = Formula::imp(a.clone(), Formula::Bot);
        assert_eq!(kuroda_star(&imp), Formula::imp(kuroda_star(&a), Formula::Bot));
        // function universal inserts the double negation too
        let allf = Formula::forall_f(2, a.clone());
        assert_eq!(
            kuroda_star(&allf),
            Formula::forall_f(2, Formula::not(Formula::not(a)))
        );
    }

    #[test]
    fn star_distributes_over_random_formulas() {
        let prims = crate::syntax::PrimTable::standard();
        let mut r = crate::gen::rng(0x5eed_0010);
        for _ in 0..500 {
            let mut next = 50;
            let l = crate::gen::random_formula(&mut r, &prims, &[1], &[1], 3, 1, &mut next);
            let rr = crate::gen::random_formula(&mut r, &prims, &[2], &[2], 3, 1, &mut next);
            assert_eq!(
                kuroda_star(&Formula::and(l.clone(), rr.clone())),
                Formula::and(kuroda_star(&l), kuroda_star(&rr))
            );
            assert_eq!(
                kuroda_star(&Formula::imp(l.clone(), rr.clone())),
                Formula::imp(kuroda_star(&l), kuroda_star(&rr))
            );
        }
    }

    #[test]
    fn priming_preserves_the_skeleton() {
        let xi = Formula::eq(
            NumTerm::apply(crate::syntax::FunTerm::FunVar(1), NumTerm::Zero),
            NumTerm::Zero,
        );
        let psi = Formula::eq(
            NumTerm::apply(crate::syntax::FunTerm::FunVar(2), NumTerm::Zero),
            NumTerm::Zero,
        );
        let zeta = Formula::forall_f(1, Formula::imp(xi, Formula::exists_f(2, psi)));
        let primed = prime_formula(&zeta).unwrap();
        // still classifies, with the matrices doubly negated
        let parts = classify_pi12(&primed).unwrap();
        assert_eq!(parts.alpha, 1);
        assert_eq!(parts.beta, 2);
        assert!(matches!(parts.xi, Formula::Imp(_, _)));
        assert!(classify_pi12(&prime_formula(&primed).unwrap()).is_some());
    }
}
