//! Equivariant chains stored by their slice on `{e} × G^m`.

use std::collections::BTreeMap;

use num_traits::One;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::functions::Coefficient;
use crate::groups::{Element, Group, GroupSpec};
use crate::rational::Rational;

/// Slice coordinates `(g_1, …, g_m)` of the tuple `(e, g_1, …, g_m)`.
pub type Tuple = Vec<Element>;

/// An equivariant `m`-chain `c: G^{m+1} → V` with finitely supported slice.
///
/// The full chain is `c(g_0, …, g_m) = g_0 · slice(g_0⁻¹g_1, …, g_0⁻¹g_m)`.
#[derive(Clone, Debug)]
pub struct EquivariantChain<V> {
    group: Group,
    degree: usize,
    slice: BTreeMap<Tuple, V>,
}

impl<V: Coefficient> EquivariantChain<V> {
    pub fn zero(group: Group, degree: usize) -> Self {
        EquivariantChain { group, degree, slice: BTreeMap::new() }
    }

    pub fn from_entries(group: Group, degree: usize, entries: impl IntoIterator<Item = (Tuple, V)>) -> Result<Self> {
        let mut c = Self::zero(group, degree);
        for (t, v) in entries {
            if t.len() != degree {
                return Err(Error::InvalidChain(format!(
                    "slice tuple of length {} in a degree {degree} chain",
                    t.len()
                )));
            }
            for x in &t {
                c.group.check(x)?;
            }
            c.add_entry(t, &Rational::one(), &v);
        }
        Ok(c)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Tuple, &V)> {
        self.slice.iter()
    }

    pub fn get(&self, t: &[Element]) -> Option<&V> {
        self.slice.get(t)
    }

    /// Number of slice tuples with a nonzero value.
    pub fn len(&self) -> usize {
        self.slice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slice.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.slice.is_empty()
    }

    /// Adds `k·v` at slice tuple `t`, dropping the entry if it becomes zero.
    pub fn add_entry(&mut self, t: Tuple, k: &Rational, v: &V) {
        let entry = self.slice.entry(t);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_scaled(k, v);
                if e.get().is_module_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                let mut x = V::module_zero();
                x.add_scaled(k, v);
                if !x.is_module_zero() {
                    e.insert(x);
                }
            }
        }
    }

    pub fn add_scaled(&mut self, k: &Rational, other: &Self) {
        assert_eq!(self.degree, other.degree, "adding chains of different degree");
        for (t, v) in &other.slice {
            self.add_entry(t.clone(), k, v);
        }
    }

    pub fn scaled(&self, k: &Rational) -> Self {
        let mut out = Self::zero(self.group.clone(), self.degree);
        out.add_scaled(k, self);
        out
    }

    /// Value of the full chain at `(g_0, …, g_m)`, recovered by equivariance.
    pub fn evaluate(&self, full: &[Element]) -> V {
        assert_eq!(full.len(), self.degree + 1, "wrong tuple length");
        let g0 = &full[0];
        let t: Tuple = full[1..].iter().map(|x| self.group.left_divide(g0, x)).collect();
        match self.slice.get(&t) {
            Some(v) => v.translate(&self.group, g0),
            None => V::module_zero(),
        }
    }

    /// The ℓ¹ boundary
    /// `∂c(g_0, …, g_{m-1}) = Σ_{g ∈ G} Σ_i (-1)^i c(g_0, …, g_{i-1}, g, g_i, …, g_{m-1})`.
    ///
    /// In slice coordinates a supported tuple `(t_1, …, t_m)` feeds two kinds of
    /// insertion: at position 0 (`g = t_1⁻¹`, contributing `t_1⁻¹·c` at
    /// `(t_1⁻¹t_2, …, t_1⁻¹t_m)`) and at positions `i ≥ 1` (`g = t_i`,
    /// contributing `(-1)^i c` at the tuple with `t_i` removed). Every other
    /// insertion misses the support, so the sum over `G` is finite.
    pub fn boundary(&self) -> Result<Self> {
        if self.degree == 0 {
            return Err(Error::DegreeMismatch { expected: 1, found: 0 });
        }
        let group: &GroupSpec = &self.group;
        let one = Rational::one();
        let minus = -Rational::one();
        let mut out = Self::zero(self.group.clone(), self.degree - 1);
        for (t, v) in &self.slice {
            let t1_inv = group.inverse(&t[0]);
            let head: Tuple = t[1..].iter().map(|x| group.mul(&t1_inv, x)).collect();
            out.add_entry(head, &one, &v.translate(group, &t1_inv));
            for i in 1..=self.degree {
                let mut face = t.clone();
                face.remove(i - 1);
                out.add_entry(face, if i % 2 == 0 { &one } else { &minus }, v);
            }
        }
        Ok(out)
    }

    /// Largest word length of an element appearing in a supported slice tuple.
    pub fn support_radius(&self) -> usize {
        self.slice.keys().flat_map(|t| t.iter().map(|x| self.group.length(x))).max().unwrap_or(0)
    }

    pub fn map_values<W: Coefficient>(&self, f: impl Fn(&V) -> W) -> EquivariantChain<W> {
        let mut out = EquivariantChain::zero(self.group.clone(), self.degree);
        for (t, v) in &self.slice {
            out.add_entry(t.clone(), &Rational::one(), &f(v));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let g = &self.group;
        json!({
            "degree": self.degree,
            "entries": self.slice.iter().map(|(t, v)| {
                json!([t.iter().map(|x| g.element_to_json(x)).collect::<Vec<_>>(), v.to_json(g)])
            }).collect::<Vec<_>>(),
        })
    }
}

impl<V: Coefficient> PartialEq for EquivariantChain<V> {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.slice == other.slice && self.group == other.group
    }
}
