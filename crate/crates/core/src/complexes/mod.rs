//! The chain and cochain complexes at truncation scale.
//!
//! * [`EquivariantChain`]: ℓ¹ chains and group chains with ℓ∞ coefficients, with [`EquivariantChain::boundary`].
//! * [`BoundedCochain`]: bounded cochains with the bar differential [`BoundedCochain::coboundary`].
//! * [`UfChain`]: uniformly finite chains and the inflation isomorphism.
//!
//! The distinguished elements live here too: the Johnson cocycle, the
//! lift `g ↦ δ_g` of the constant **1**, and the fundamental cycle.

mod chain;
mod cochain;
mod uf;

pub use chain::{EquivariantChain, Tuple};
pub use cochain::{tuples_over, BoundedCochain, CochainValue, Dual};
pub use uf::{ones_on_ball, UfChain};

use num_traits::One;

use crate::error::{Error, Result};
use crate::functions::{BoundedFn, FinSuppFn, QuotientRep};
use crate::groups::Group;
use crate::rational::Rational;

/// `J(g_0, g_1) = δ_{g_1} - δ_{g_0}`, with values in ℓ¹₀ ⊂ (ℓ∞G/ℂ)*.
/// Its slice is `J(e, g) = δ_g - δ_e`.
pub fn johnson_cocycle(group: &Group) -> BoundedCochain<FinSuppFn> {
    let e = group.identity();
    BoundedCochain::from_oracle(group.clone(), 1, Dual::LinftyModConstants, move |t| {
        FinSuppFn::delta(t[0].clone()) - FinSuppFn::delta(e.clone())
    })
    .expect("finitely supported functionals represent the quotient dual")
}

/// The constant **1** as a degree-0 cochain with trivial coefficients.
pub fn scalar_one_cochain(group: &Group) -> BoundedCochain<Rational> {
    BoundedCochain::from_entries(group.clone(), 0, Dual::Scalar, [(vec![], Rational::one())])
        .expect("scalar cochain")
}

/// The constant **1** as a degree-0 chain with trivial coefficients.
pub fn scalar_one_chain(group: &Group) -> EquivariantChain<Rational> {
    EquivariantChain::from_entries(group.clone(), 0, [(vec![], Rational::one())]).expect("degree-0 chain")
}

/// Lift of a degree-0 scalar cochain through `ι*: (ℓ∞G)* → ℂ`: the value
/// `λ` goes to `g ↦ λ δ_g`, whose slice is `λ δ_e`.
pub fn lift_scalar(phi: &BoundedCochain<Rational>) -> Result<BoundedCochain<FinSuppFn>> {
    if phi.degree() != 0 {
        return Err(Error::DegreeMismatch { expected: 0, found: phi.degree() });
    }
    let g = phi.group();
    let value = FinSuppFn::delta(g.identity()).scaled(&phi.value_at(&[]));
    BoundedCochain::from_entries(g.clone(), 0, Dual::Linfty, [(vec![], value)])
}

/// `g ↦ δ_g`.
pub fn lift_of_one(group: &Group) -> BoundedCochain<FinSuppFn> {
    lift_scalar(&scalar_one_cochain(group)).expect("degree 0")
}

/// The connecting map `H^0_b(G, ℂ) → H^1_b(G, (ℓ∞G/ℂ)*)` at cochain level:
/// lift, take the coboundary, and read the result in the quotient dual.
pub fn connecting_map(phi: &BoundedCochain<Rational>) -> Result<BoundedCochain<FinSuppFn>> {
    lift_scalar(phi)?.coboundary().with_dual(Dual::LinftyModConstants)
}

/// Checks `d(g ↦ δ_g) = J` exactly on every slice `(g)` with `g ∈ ball(radius)`.
pub fn connecting_lift_check_radius(group: &Group, radius: usize) -> bool {
    let lifted = lift_of_one(group).coboundary();
    let johnson = johnson_cocycle(group);
    group.ball(radius).into_iter().all(|g| {
        let t = [g];
        lifted.value_at(&t) == johnson.value_at(&t)
    })
}

/// [`connecting_lift_check_radius`] on `ball(3)`.
pub fn connecting_lift_check(group: &Group) -> bool {
    connecting_lift_check_radius(group, 3)
}

/// The Block–Weinberger fundamental cycle `c(g)(h) = 1`.
pub fn fundamental_cycle(group: &Group) -> EquivariantChain<BoundedFn> {
    EquivariantChain::from_entries(group.clone(), 0, [(vec![], BoundedFn::constant(Rational::one()))])
        .expect("degree-0 chain")
}

/// `ι`: chains with coefficients in ℂ to chains in ℓ∞G (constants).
pub fn include_constants(c: &EquivariantChain<Rational>) -> EquivariantChain<BoundedFn> {
    c.map_values(|q| BoundedFn::constant(q.clone()))
}

/// `π`: chains in ℓ∞G to chains in ℓ∞G/ℂ.
pub fn project_to_quotient(c: &EquivariantChain<BoundedFn>) -> EquivariantChain<QuotientRep> {
    c.map_values(|v| QuotientRep(v.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{FiniteTable, GroupSpec};
    use crate::rational::int;

    #[test]
    fn johnson_slices() {
        let g = GroupSpec::free(2).unwrap().into_group();
        let e = g.identity();
        let a = g.parse_word("a").unwrap();
        let j = johnson_cocycle(&g);
        assert_eq!(j.value_at(std::slice::from_ref(&a)), FinSuppFn::delta(a.clone()) - FinSuppFn::delta(e.clone()));
        assert!(j.value_at(std::slice::from_ref(&e)).is_empty());
        for x in g.ball(3) {
            assert!(j.value_at(&[x]).is_zero_sum());
        }
        // Full evaluation J(g0, g1) = δ_{g1} - δ_{g0}.
        let b = g.parse_word("b^-1").unwrap();
        assert_eq!(j.evaluate(&[b.clone(), a.clone()]), FinSuppFn::delta(a) - FinSuppFn::delta(b));
    }

    #[test]
    fn lift_check_across_families() {
        let groups = [
            GroupSpec::free(2).unwrap(),
            GroupSpec::free_abelian(1).unwrap(),
            GroupSpec::free_abelian(2).unwrap(),
            GroupSpec::finite(FiniteTable::cyclic(3).unwrap()),
        ];
        for g in groups {
            assert!(connecting_lift_check(&g.into_group()));
        }
    }

    #[test]
    fn connecting_map_of_one_is_johnson() {
        let g = GroupSpec::free(2).unwrap().into_group();
        let d1 = connecting_map(&scalar_one_cochain(&g)).unwrap();
        assert_eq!(d1.dual(), Dual::LinftyModConstants);
        let j = johnson_cocycle(&g);
        let tuples = d1.ball_tuples(2);
        assert_eq!(d1.restrict(&tuples), j.restrict(&tuples));
        // ι* of the lift gives back 1.
        assert_eq!(lift_of_one(&g).restrict_to_constants().value_at(&[]), int(1));
    }

    #[test]
    fn fundamental_cycle_is_invariant() {
        let g = GroupSpec::free(2).unwrap().into_group();
        let c = fundamental_cycle(&g);
        let v = c.get(&[]).unwrap();
        for x in g.ball(2) {
            assert_eq!(v.evaluate(&x), int(1));
            assert_eq!(c.evaluate(std::slice::from_ref(&x)), *v);
        }
        assert_eq!(include_constants(&scalar_one_chain(&g)), c);
    }
}
