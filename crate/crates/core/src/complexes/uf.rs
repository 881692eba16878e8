//! Uniformly finite chains and the inflation isomorphism onto equivariant
//! chains with ℓ∞ coefficients.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::chain::{EquivariantChain, Tuple};
use crate::error::{Error, Result};
use crate::functions::{BoundedFn, FinSuppFn};
use crate::groups::{Element, Group};
use crate::rational::{format_rational, Rational};

/// A finitely supported uniformly finite `q`-chain `φ: G^{q+1} → ℚ` whose
/// support consists of tuples of diameter at most `diameter_bound`.
///
/// Equality ignores the declared bound.
#[derive(Clone, Debug)]
pub struct UfChain {
    group: Group,
    degree: usize,
    entries: BTreeMap<Tuple, Rational>,
    diameter_bound: usize,
}

impl PartialEq for UfChain {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.entries == other.entries && self.group == other.group
    }
}

impl UfChain {
    pub fn zero(group: Group, degree: usize, diameter_bound: usize) -> Self {
        UfChain { group, degree, entries: BTreeMap::new(), diameter_bound }
    }

    pub fn from_entries(
        group: Group,
        degree: usize,
        diameter_bound: usize,
        entries: impl IntoIterator<Item = (Tuple, Rational)>,
    ) -> Result<Self> {
        let mut c = Self::zero(group, degree, diameter_bound);
        for (t, q) in entries {
            if t.len() != degree + 1 {
                return Err(Error::InvalidChain(format!("uf {degree}-chain needs tuples of length {}", degree + 1)));
            }
            for x in &t {
                c.group.check(x)?;
            }
            let d = c.group.diameter(&t);
            if d > diameter_bound {
                return Err(Error::InvalidChain(format!("tuple of diameter {d} exceeds the bound {diameter_bound}")));
            }
            c.add(t, &q);
        }
        Ok(c)
    }

    fn add(&mut self, t: Tuple, q: &Rational) {
        let e = self.entries.entry(t.clone()).or_insert_with(Rational::zero);
        *e += q;
        if e.is_zero() {
            self.entries.remove(&t);
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn diameter_bound(&self) -> usize {
        self.diameter_bound
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Tuple, &Rational)> {
        self.entries.iter()
    }

    pub fn get(&self, t: &[Element]) -> Rational {
        self.entries.get(t).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest diameter of a supported tuple.
    pub fn support_diameter(&self) -> usize {
        self.entries.keys().map(|t| self.group.diameter(t)).max().unwrap_or(0)
    }

    /// `∂(g_0, …, g_q) = Σ_i (-1)^i (g_0, …, ĝ_i, …, g_q)`, extended linearly.
    /// Faces never increase diameter, so the bound carries over.
    pub fn boundary(&self) -> Result<Self> {
        if self.degree == 0 {
            return Err(Error::DegreeMismatch { expected: 1, found: 0 });
        }
        let mut out = Self::zero(self.group.clone(), self.degree - 1, self.diameter_bound);
        for (t, q) in &self.entries {
            for i in 0..t.len() {
                let mut face = t.clone();
                face.remove(i);
                out.add(face, &if i % 2 == 0 { q.clone() } else { -q.clone() });
            }
        }
        Ok(out)
    }

    /// `φ̄(g_0, …, g_q)(g) = φ(g⁻¹g_0, …, g⁻¹g_q)`.
    ///
    /// A supported tuple `(t_0, …, t_q)` is seen from `g = t_0⁻¹` at the slice
    /// tuple `(t_0⁻¹t_1, …, t_0⁻¹t_q)`, so every slice value is finitely supported.
    pub fn inflate(&self) -> EquivariantChain<BoundedFn> {
        let g = &self.group;
        let mut slices: BTreeMap<Tuple, FinSuppFn> = BTreeMap::new();
        for (t, q) in &self.entries {
            let base = g.inverse(&t[0]);
            let key: Tuple = t[1..].iter().map(|x| g.mul(&base, x)).collect();
            slices.entry(key).or_default().add_at(base, q);
        }
        EquivariantChain::from_entries(
            self.group.clone(),
            self.degree,
            slices.into_iter().map(|(k, f)| (k, BoundedFn::finite(f))),
        )
        .expect("inflated tuples have the right length")
    }

    /// Inverse of [`UfChain::inflate`]: `φ(x_0, …, x_q) = φ̄(x_0, …, x_q)(e)`.
    ///
    /// Fails when a slice value has a constant or tree-flow part, since the
    /// corresponding uf chain would not be finitely supported.
    pub fn deflate(chain: &EquivariantChain<BoundedFn>) -> Result<Self> {
        let g = chain.group();
        let mut out = Self::zero(g.clone(), chain.degree(), 0);
        for (t, v) in chain.entries() {
            let f = match v {
                BoundedFn::Finite(f) => f,
                other => {
                    return Err(Error::InvalidChain(format!(
                        "cannot deflate a value that is not finitely supported: {}",
                        other.to_json(g)
                    )))
                }
            };
            for (x, q) in f.iter() {
                out.add(deflated_tuple(chain, t, x), q);
            }
        }
        out.diameter_bound = out.support_diameter();
        Ok(out)
    }

    /// Deflation restricted to evaluation points in `ball(radius)`; defined
    /// for any ℓ∞ chain, e.g. the fundamental cycle.
    pub fn deflate_truncated(chain: &EquivariantChain<BoundedFn>, radius: usize) -> Self {
        let g = chain.group();
        let points = g.ball(radius);
        let mut out = Self::zero(g.clone(), chain.degree(), 0);
        for (t, v) in chain.entries() {
            for x in &points {
                out.add(deflated_tuple(chain, t, x), &v.evaluate(x));
            }
        }
        out.diameter_bound = out.support_diameter();
        out
    }

    pub fn to_json(&self) -> Value {
        let g = &self.group;
        json!({
            "degree": self.degree,
            "diameter_bound": self.diameter_bound,
            "entries": self.entries.iter().map(|(t, q)| {
                json!([t.iter().map(|x| g.element_to_json(x)).collect::<Vec<_>>(), format_rational(q)])
            }).collect::<Vec<_>>(),
        })
    }
}

/// The absolute tuple `(x⁻¹, x⁻¹t_1, …)` read off slice tuple `t` at point `x`.
fn deflated_tuple(chain: &EquivariantChain<BoundedFn>, t: &[Element], x: &Element) -> Tuple {
    let g = chain.group();
    let xi = g.inverse(x);
    std::iter::once(xi.clone()).chain(t.iter().map(|y| g.mul(&xi, y))).collect()
}

/// The all-ones uf 0-chain on `ball(radius)`.
pub fn ones_on_ball(group: &Group, radius: usize) -> UfChain {
    UfChain::from_entries(group.clone(), 0, 0, group.ball(radius).into_iter().map(|x| (vec![x], Rational::one())))
        .expect("0-tuples have diameter 0")
}
