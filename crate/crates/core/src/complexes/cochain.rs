//! Equivariant bounded cochains with ℓ¹-representable values.
//!
//! A cochain is known through its slice `φ(e, g_1, …, g_m)`. Coboundaries
//! of finitely supported cochains are never finitely supported (the first
//! face term moves with `g_1`), so slices are either a finite table or a
//! deterministic oracle that is evaluated on demand.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::chain::Tuple;
use crate::error::{Error, Result};
use crate::functions::{Coefficient, FinSuppFn};
use crate::groups::{Element, Group};
use crate::rational::Rational;

/// The dual module a cochain takes values in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dual {
    /// ℂ, the dual of the trivial module.
    Scalar,
    /// (ℓ∞G)*, represented by ℓ¹G.
    Linfty,
    /// (ℓ∞G/ℂ)*, represented by ℓ¹₀G.
    LinftyModConstants,
}

/// Values a cochain may take.
pub trait CochainValue: Coefficient {
    fn admits(dual: Dual) -> bool;
    /// Whether the value annihilates constants.
    fn annihilates_constants(&self) -> bool;
}

impl CochainValue for Rational {
    fn admits(dual: Dual) -> bool {
        dual == Dual::Scalar
    }
    fn annihilates_constants(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl CochainValue for FinSuppFn {
    fn admits(dual: Dual) -> bool {
        dual != Dual::Scalar
    }
    fn annihilates_constants(&self) -> bool {
        self.is_zero_sum()
    }
}

type Oracle<W> = Arc<dyn Fn(&[Element]) -> W + Send + Sync>;

#[derive(Clone)]
enum Slice<W> {
    Table(BTreeMap<Tuple, W>),
    Oracle(Oracle<W>),
}

#[derive(Clone)]
pub struct BoundedCochain<W> {
    group: Group,
    degree: usize,
    dual: Dual,
    slice: Slice<W>,
}

impl<W: CochainValue> fmt::Debug for BoundedCochain<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("BoundedCochain");
        d.field("degree", &self.degree).field("dual", &self.dual);
        match &self.slice {
            Slice::Table(t) => d.field("table", t),
            Slice::Oracle(_) => d.field("oracle", &"<fn>"),
        };
        d.finish()
    }
}

impl<W: CochainValue> BoundedCochain<W> {
    fn check_dual(dual: Dual) -> Result<()> {
        if W::admits(dual) {
            Ok(())
        } else {
            Err(Error::InvalidChain(format!("value type cannot represent the dual {dual:?}")))
        }
    }

    /// A cochain whose slice is the given finite table (zero elsewhere).
    pub fn from_entries(
        group: Group,
        degree: usize,
        dual: Dual,
        entries: impl IntoIterator<Item = (Tuple, W)>,
    ) -> Result<Self> {
        Self::check_dual(dual)?;
        let mut table: BTreeMap<Tuple, W> = BTreeMap::new();
        for (t, w) in entries {
            if t.len() != degree {
                return Err(Error::InvalidChain(format!("slice tuple of length {} in a degree {degree} cochain", t.len())));
            }
            for x in &t {
                group.check(x)?;
            }
            table.entry(t).or_insert_with(W::module_zero).add_scaled(&Rational::one(), &w);
        }
        table.retain(|_, w| !w.is_module_zero());
        if dual == Dual::LinftyModConstants {
            if let Some(w) = table.values().find(|w| !w.annihilates_constants()) {
                return Err(Error::NotZeroSum(format!("{w:?}")));
            }
        }
        Ok(BoundedCochain { group, degree, dual, slice: Slice::Table(table) })
    }

    /// A cochain whose slice is computed by `f(g_1, …, g_m)`. The oracle must
    /// be deterministic.
    pub fn from_oracle(
        group: Group,
        degree: usize,
        dual: Dual,
        f: impl Fn(&[Element]) -> W + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::check_dual(dual)?;
        Ok(BoundedCochain { group, degree, dual, slice: Slice::Oracle(Arc::new(f)) })
    }

    pub fn zero(group: Group, degree: usize, dual: Dual) -> Result<Self> {
        Self::from_entries(group, degree, dual, [])
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dual(&self) -> Dual {
        self.dual
    }

    /// Finite slice table, if this cochain is stored as one.
    pub fn table(&self) -> Option<&BTreeMap<Tuple, W>> {
        match &self.slice {
            Slice::Table(t) => Some(t),
            Slice::Oracle(_) => None,
        }
    }

    /// `φ(e, g_1, …, g_m)`.
    pub fn value_at(&self, t: &[Element]) -> W {
        debug_assert_eq!(t.len(), self.degree);
        match &self.slice {
            Slice::Table(table) => table.get(t).cloned().unwrap_or_else(W::module_zero),
            Slice::Oracle(f) => f(t),
        }
    }

    /// `φ(g_0, …, g_m) = g_0 · φ(e, g_0⁻¹g_1, …, g_0⁻¹g_m)`.
    pub fn evaluate(&self, full: &[Element]) -> W {
        assert_eq!(full.len(), self.degree + 1, "wrong tuple length");
        let g0 = &full[0];
        let t: Tuple = full[1..].iter().map(|x| self.group.left_divide(g0, x)).collect();
        self.value_at(&t).translate(&self.group, g0)
    }

    /// The homogeneous bar differential
    /// `dφ(g_0, …, g_{m+1}) = Σ_i (-1)^i φ(g_0, …, ĝ_i, …, g_{m+1})`.
    pub fn coboundary(&self) -> Self {
        let inner = self.clone();
        let group = self.group.clone();
        let oracle = move |t: &[Element]| -> W {
            // Face 0 of (e, t_1, …, t_{m+1}) is (t_1, …, t_{m+1}) = t_1 · (e, t_1⁻¹t_2, …).
            let t1_inv = group.inverse(&t[0]);
            let head: Tuple = t[1..].iter().map(|x| group.mul(&t1_inv, x)).collect();
            let mut acc = inner.value_at(&head).translate(&group, &t[0]);
            let one = Rational::one();
            let minus = -Rational::one();
            for i in 1..=t.len() {
                let mut face = t.to_vec();
                face.remove(i - 1);
                acc.add_scaled(if i % 2 == 0 { &one } else { &minus }, &inner.value_at(&face));
            }
            acc
        };
        BoundedCochain {
            group: self.group.clone(),
            degree: self.degree + 1,
            dual: self.dual,
            slice: Slice::Oracle(Arc::new(oracle)),
        }
    }

    /// `self + k·other`.
    pub fn add_scaled(&self, k: &Rational, other: &Self) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: other.degree });
        }
        if self.dual != other.dual {
            return Err(Error::InvalidChain("adding cochains with different coefficient duals".into()));
        }
        if let (Slice::Table(a), Slice::Table(b)) = (&self.slice, &other.slice) {
            let entries = a
                .iter()
                .map(|(t, w)| (t.clone(), w.clone()))
                .chain(b.iter().map(|(t, w)| {
                    let mut x = W::module_zero();
                    x.add_scaled(k, w);
                    (t.clone(), x)
                }));
            return Self::from_entries(self.group.clone(), self.degree, self.dual, entries);
        }
        let (a, b, k) = (self.clone(), other.clone(), k.clone());
        Ok(BoundedCochain {
            group: self.group.clone(),
            degree: self.degree,
            dual: self.dual,
            slice: Slice::Oracle(Arc::new(move |t: &[Element]| {
                let mut x = a.value_at(t);
                x.add_scaled(&k, &b.value_at(t));
                x
            })),
        })
    }

    /// Reinterprets the values in another dual, checking admissibility on a
    /// finite table. Oracle values are checked when they are paired.
    pub fn with_dual(&self, dual: Dual) -> Result<Self> {
        Self::check_dual(dual)?;
        if let (Dual::LinftyModConstants, Slice::Table(t)) = (dual, &self.slice) {
            if let Some(w) = t.values().find(|w| !w.annihilates_constants()) {
                return Err(Error::NotZeroSum(format!("{w:?}")));
            }
        }
        Ok(BoundedCochain { dual, ..self.clone() })
    }

    /// Slice values on the given tuples, zeros dropped.
    pub fn restrict<'a>(&self, tuples: impl IntoIterator<Item = &'a Tuple>) -> BTreeMap<Tuple, W> {
        tuples
            .into_iter()
            .map(|t| (t.clone(), self.value_at(t)))
            .filter(|(_, w)| !w.is_module_zero())
            .collect()
    }

    /// Slice tuples with every coordinate in `ball(radius)`.
    pub fn ball_tuples(&self, radius: usize) -> Vec<Tuple> {
        tuples_over(&self.group.ball(radius), self.degree)
    }

    /// JSON with the slice restricted to `ball(radius)^m` for oracle cochains.
    pub fn to_json(&self, radius: usize) -> Value {
        let g = &self.group;
        let (table, truncated) = match &self.slice {
            Slice::Table(t) => (t.clone(), false),
            Slice::Oracle(_) => (self.restrict(&self.ball_tuples(radius)), true),
        };
        json!({
            "degree": self.degree,
            "dual": self.dual,
            "truncation_radius": if truncated { Some(radius) } else { None },
            "entries": table.iter().map(|(t, w)| {
                json!([t.iter().map(|x| g.element_to_json(x)).collect::<Vec<_>>(), w.to_json(g)])
            }).collect::<Vec<_>>(),
        })
    }
}

impl BoundedCochain<FinSuppFn> {
    /// `ι*`: restriction of functionals on ℓ∞G to the constants, `μ ↦ μ(1)`.
    pub fn restrict_to_constants(&self) -> BoundedCochain<Rational> {
        let inner = self.clone();
        BoundedCochain {
            group: self.group.clone(),
            degree: self.degree,
            dual: Dual::Scalar,
            slice: match &self.slice {
                Slice::Table(t) => Slice::Table(
                    t.iter()
                        .map(|(k, w)| (k.clone(), w.coefficient_sum()))
                        .filter(|(_, q)| !Zero::is_zero(q))
                        .collect(),
                ),
                Slice::Oracle(_) => Slice::Oracle(Arc::new(move |t: &[Element]| inner.value_at(t).coefficient_sum())),
            },
        }
    }
}

/// All `m`-tuples over `points`, lexicographic in the order of `points`.
pub fn tuples_over(points: &[Element], m: usize) -> Vec<Tuple> {
    let mut out: Vec<Tuple> = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|t| {
                points.iter().map(move |x| {
                    let mut t = t.clone();
                    t.push(x.clone());
                    t
                })
            })
            .collect();
    }
    out
}

impl fmt::Display for Dual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dual::Scalar => "C",
            Dual::Linfty => "(l^inf G)*",
            Dual::LinftyModConstants => "(l^inf G / C)*",
        })
    }
}
