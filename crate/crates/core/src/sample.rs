//! Seeded random inputs for property checks and the `selftest` command.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complexes::{BoundedCochain, Dual, EquivariantChain, Tuple, UfChain};
use crate::functions::{BoundedFn, FinSuppFn, TreeFlow};
use crate::groups::{Element, Group, GroupSpec, Letter};
use crate::rational::{ratio, Rational};

/// Deterministic sampler over a fixed group.
pub struct Sampler {
    rng: ChaCha8Rng,
    group: Group,
    points: Vec<Element>,
}

impl Sampler {
    /// Elements are drawn from `ball(radius)`.
    pub fn new(group: Group, radius: usize, seed: u64) -> Self {
        let points = group.ball(radius);
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), group, points }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn element(&mut self) -> Element {
        self.points.choose(&mut self.rng).expect("balls are nonempty").clone()
    }

    pub fn tuple(&mut self, len: usize) -> Tuple {
        (0..len).map(|_| self.element()).collect()
    }

    /// A small rational `p/q` with `|p| ≤ 5`, `1 ≤ q ≤ 3`.
    pub fn rational(&mut self) -> Rational {
        ratio(self.rng.gen_range(-5..=5), self.rng.gen_range(1..=3))
    }

    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let q = self.rational();
            if q != Rational::from_integer(0.into()) {
                return q;
            }
        }
    }

    pub fn fin_supp(&mut self, max_len: usize) -> FinSuppFn {
        let n = self.rng.gen_range(0..=max_len);
        FinSuppFn::from_pairs((0..n).map(|_| (self.element(), self.rational())).collect::<Vec<_>>())
    }

    /// A finitely supported function with coefficient sum zero.
    pub fn zero_sum(&mut self, max_len: usize) -> FinSuppFn {
        let mut f = self.fin_supp(max_len);
        let s = f.coefficient_sum();
        let x = self.element();
        f.add_at(x, &-s);
        f
    }

    pub fn flow(&mut self) -> Option<TreeFlow> {
        if !self.group.is_free() {
            return None;
        }
        let rank = self.group.rank();
        let g = self.rng.gen_range(0..rank);
        let edge = if self.rng.gen_bool(0.5) { Letter::gen(g) } else { Letter::gen_inv(g) };
        let ray = self.rng.gen_range(0..rank);
        let flow = TreeFlow::new(&self.group, edge, ray).expect("free group");
        let shift = self.element();
        Some(flow.translate(&self.group, &shift))
    }

    /// Constant plus finite part plus (on free groups) up to two tree flows.
    pub fn bounded(&mut self) -> BoundedFn {
        let mut v = BoundedFn::finite(self.fin_supp(3));
        if self.rng.gen_bool(0.5) {
            let c = self.rational();
            v.add_scaled(&Rational::from_integer(1.into()), &BoundedFn::constant(c));
        }
        for _ in 0..self.rng.gen_range(0..=2) {
            if let Some(flow) = self.flow() {
                let k = self.rational();
                v.add_scaled(&k, &BoundedFn::tree_flow(flow));
            }
        }
        v
    }

    /// A chain of the given degree with up to `max_terms` slice entries.
    pub fn chain<V: crate::functions::Coefficient>(
        &mut self,
        degree: usize,
        max_terms: usize,
        mut value: impl FnMut(&mut Self) -> V,
    ) -> EquivariantChain<V> {
        let n = self.rng.gen_range(1..=max_terms);
        let mut entries = Vec::with_capacity(n);
        for _ in 0..n {
            let t = self.tuple(degree);
            entries.push((t, value(self)));
        }
        EquivariantChain::from_entries(self.group.clone(), degree, entries).expect("sampled tuples are valid")
    }

    pub fn bounded_chain(&mut self, degree: usize, max_terms: usize) -> EquivariantChain<BoundedFn> {
        self.chain(degree, max_terms, |s| s.bounded())
    }

    pub fn scalar_chain(&mut self, degree: usize, max_terms: usize) -> EquivariantChain<Rational> {
        self.chain(degree, max_terms, |s| s.rational())
    }

    /// A table cochain with ℓ¹ values; zero-sum values when `dual` is the quotient dual.
    pub fn cochain(&mut self, degree: usize, max_terms: usize, dual: Dual) -> BoundedCochain<FinSuppFn> {
        let n = self.rng.gen_range(1..=max_terms);
        let mut entries = Vec::with_capacity(n);
        for _ in 0..n {
            let t = self.tuple(degree);
            let w = if dual == Dual::LinftyModConstants { self.zero_sum(3) } else { self.fin_supp(3) };
            entries.push((t, w));
        }
        BoundedCochain::from_entries(self.group.clone(), degree, dual, entries).expect("sampled cochain")
    }

    pub fn scalar_cochain(&mut self, degree: usize, max_terms: usize) -> BoundedCochain<Rational> {
        let n = self.rng.gen_range(1..=max_terms);
        let entries: Vec<_> = (0..n).map(|_| (self.tuple(degree), self.rational())).collect();
        BoundedCochain::from_entries(self.group.clone(), degree, Dual::Scalar, entries).expect("sampled cochain")
    }

    /// A uniformly finite chain: tuples `(x, x·y_1, …)` around a random base
    /// point with steps of length at most `step`, so the diameter stays below
    /// `2·step`.
    pub fn uf_chain(&mut self, degree: usize, max_terms: usize, step: usize) -> UfChain {
        let steps = self.group.ball(step);
        let bound = 2 * step;
        let n = self.rng.gen_range(1..=max_terms);
        let mut entries = Vec::with_capacity(n);
        for _ in 0..n {
            let x = self.element();
            let t: Tuple = (0..=degree)
                .map(|_| self.group.mul(&x, steps.choose(&mut self.rng).expect("nonempty")))
                .collect();
            entries.push((t, self.rational()));
        }
        UfChain::from_entries(self.group.clone(), degree, bound, entries).expect("diameter within bound")
    }
}

/// The groups exercised by randomized checks.
pub fn test_groups() -> Vec<Group> {
    use crate::groups::FiniteTable;
    vec![
        GroupSpec::free(2).expect("rank 2").into_group(),
        GroupSpec::free_abelian(2).expect("rank 2").into_group(),
        GroupSpec::finite(FiniteTable::cyclic(5).expect("Z/5")).into_group(),
        GroupSpec::finite(FiniteTable::symmetric(3).expect("S3")).into_group(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let g = GroupSpec::free(2).unwrap().into_group();
        let mut a = Sampler::new(g.clone(), 2, 7);
        let mut b = Sampler::new(g, 2, 7);
        for _ in 0..20 {
            assert_eq!(a.bounded_chain(2, 3), b.bounded_chain(2, 3));
        }
    }

    #[test]
    fn quotient_cochains_are_zero_sum() {
        let g = GroupSpec::free(2).unwrap().into_group();
        let mut s = Sampler::new(g, 2, 1);
        for _ in 0..20 {
            let phi = s.cochain(1, 3, Dual::LinftyModConstants);
            assert!(phi.table().unwrap().values().all(FinSuppFn::is_zero_sum));
        }
    }

    #[test]
    fn uf_chains_respect_bound() {
        for g in test_groups() {
            let mut s = Sampler::new(g, 2, 3);
            for _ in 0..20 {
                let c = s.uf_chain(2, 4, 1);
                assert!(c.support_diameter() <= c.diameter_bound());
            }
        }
    }
}
