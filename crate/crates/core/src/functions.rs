//! Coefficient modules.
//!
//! The ℓ¹ side is [`FinSuppFn`], an exact finitely supported function. The
//! ℓ∞ side is [`BoundedFn`], which is never stored as a vector: it is a
//! structured evaluation oracle. Pairings only ever evaluate it on the finite
//! support of an ℓ¹ function, so no truncation happens on the ℓ∞ side.
//!
//! Groups act on both by left translation, `(g·f)(h) = f(g⁻¹h)`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt::Debug;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::groups::{invert_word, reduce_word, Element, GroupSpec, Letter};
use crate::rational::{format_rational, int, parse_rational, Rational};

/// A finitely supported rational-valued function on a group.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinSuppFn {
    coeffs: BTreeMap<Element, Rational>,
}

impl FinSuppFn {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The Dirac function at `g`.
    pub fn delta(g: Element) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(g, Rational::one());
        FinSuppFn { coeffs }
    }

    /// Indicator function of a set; repeated elements are counted once.
    pub fn indicator<'a>(set: impl IntoIterator<Item = &'a Element>) -> Self {
        FinSuppFn { coeffs: set.into_iter().map(|x| (x.clone(), Rational::one())).collect() }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Element, Rational)>) -> Self {
        let mut f = Self::zero();
        for (g, q) in pairs {
            f.add_at(g, &q);
        }
        f
    }

    pub fn add_at(&mut self, g: Element, q: &Rational) {
        if q.is_zero() {
            return;
        }
        match self.coeffs.entry(g) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += q;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(q.clone());
            }
        }
    }

    pub fn get(&self, g: &Element) -> Rational {
        self.coeffs.get(g).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Element, &Rational)> {
        self.coeffs.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Element> {
        self.coeffs.keys()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn l1_norm(&self) -> Rational {
        self.coeffs.values().fold(Rational::zero(), |acc, q| acc + q.abs())
    }

    pub fn coefficient_sum(&self) -> Rational {
        self.coeffs.values().fold(Rational::zero(), |acc, q| acc + q)
    }

    /// Membership in ℓ¹₀, the predual of ℓ∞/ℂ.
    pub fn is_zero_sum(&self) -> bool {
        self.coefficient_sum().is_zero()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.values().all(|q| !q.is_negative())
    }

    pub fn max_abs(&self) -> Rational {
        self.coeffs.values().map(|q| q.abs()).max().unwrap_or_else(Rational::zero)
    }

    pub fn scaled(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        FinSuppFn { coeffs: self.coeffs.iter().map(|(g, q)| (g.clone(), q * k)).collect() }
    }

    pub fn add_scaled(&mut self, k: &Rational, other: &FinSuppFn) {
        for (g, q) in &other.coeffs {
            self.add_at(g.clone(), &(q * k));
        }
    }

    /// `g·f`, i.e. `h ↦ f(g⁻¹h)`; the support moves to `g·supp f`.
    pub fn translate(&self, group: &GroupSpec, g: &Element) -> Self {
        FinSuppFn { coeffs: self.coeffs.iter().map(|(x, q)| (group.mul(g, x), q.clone())).collect() }
    }

    pub fn to_json(&self, group: &GroupSpec) -> Value {
        Value::Array(
            self.coeffs
                .iter()
                .map(|(g, q)| json!([group.element_to_json(g), format_rational(q)]))
                .collect(),
        )
    }

    pub fn from_json(group: &GroupSpec, v: &Value) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("expected a list of [element, \"p/q\"] pairs, found {v}"));
        let items = v.as_array().ok_or_else(bad)?;
        let mut f = Self::zero();
        for item in items {
            let pair = item.as_array().filter(|p| p.len() == 2).ok_or_else(bad)?;
            let g = group.element_from_json(&pair[0])?;
            let q = parse_rational(pair[1].as_str().ok_or_else(bad)?)?;
            f.add_at(g, &q);
        }
        Ok(f)
    }
}

impl std::ops::Add for FinSuppFn {
    type Output = FinSuppFn;
    fn add(mut self, rhs: FinSuppFn) -> FinSuppFn {
        self.add_scaled(&Rational::one(), &rhs);
        self
    }
}

impl std::ops::Sub for FinSuppFn {
    type Output = FinSuppFn;
    fn sub(mut self, rhs: FinSuppFn) -> FinSuppFn {
        self.add_scaled(&-Rational::one(), &rhs);
        self
    }
}

impl std::ops::Neg for FinSuppFn {
    type Output = FinSuppFn;
    fn neg(self) -> FinSuppFn {
        self.scaled(&-Rational::one())
    }
}

/// First letter of the reduced infinite word `w · ray^∞`.
///
/// The trailing `ray⁻¹` power of `w` cancels against the ray; whatever
/// remains is followed by the ray letters without further cancellation.
pub fn ray_first_letter(w: &[Letter], ray: usize) -> Letter {
    let towards = Letter::gen(ray);
    let keep = w.iter().rposition(|l| *l != towards.inv()).map_or(0, |i| i + 1);
    if keep == 0 {
        towards
    } else {
        w[0]
    }
}

/// The indicator `g ↦ [(shift, shift·edge) is the first edge of the geodesic
/// from shift to g·p]` on a free group, where `p` is the boundary point
/// `ray^∞`. With `shift = e` this is `c(e, edge)` of the boundary flow cycle;
/// other shifts are its translates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeFlow {
    pub edge: Letter,
    pub ray: usize,
    pub shift: Element,
}

impl TreeFlow {
    pub fn new(group: &GroupSpec, edge: Letter, ray: usize) -> Result<Self> {
        if !group.is_free() {
            return Err(Error::InvalidInput("tree flows are only defined on free groups".into()));
        }
        if edge.generator >= group.rank() || ray >= group.rank() {
            return Err(Error::InvalidInput("flow generator out of range".into()));
        }
        Ok(TreeFlow { edge, ray, shift: group.identity() })
    }

    pub fn evaluate(&self, g: &Element) -> bool {
        let shift = self.shift.as_word().expect("tree flow shift is a free word");
        let g = g.as_word().expect("tree flows evaluate on free words");
        let local = reduce_word(invert_word(shift).into_iter().chain(g.iter().copied()));
        ray_first_letter(&local, self.ray) == self.edge
    }

    pub fn translate(&self, group: &GroupSpec, g: &Element) -> Self {
        TreeFlow { shift: group.mul(g, &self.shift), ..self.clone() }
    }
}

/// An element of ℓ∞G given by structure.
///
/// Arithmetic always returns the simplest variant that represents the
/// result, and equality compares normal forms, so two `BoundedFn`s built
/// from the same structured pieces compare equal regardless of history.
#[derive(Clone, Debug)]
pub enum BoundedFn {
    Constant(Rational),
    Finite(FinSuppFn),
    ConstPlusFinite(Rational, FinSuppFn),
    TreeFlow(TreeFlow),
    /// `constant + finite + Σ coeff·flow`.
    Combination { constant: Rational, finite: FinSuppFn, flows: BTreeMap<TreeFlow, Rational> },
}

impl Default for BoundedFn {
    fn default() -> Self {
        BoundedFn::Constant(Rational::zero())
    }
}

impl BoundedFn {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        BoundedFn::Constant(c)
    }

    pub fn finite(f: FinSuppFn) -> Self {
        Self::from_parts(Rational::zero(), f, BTreeMap::new())
    }

    pub fn const_plus_finite(c: Rational, f: FinSuppFn) -> Self {
        Self::from_parts(c, f, BTreeMap::new())
    }

    pub fn tree_flow(flow: TreeFlow) -> Self {
        BoundedFn::TreeFlow(flow)
    }

    fn from_parts(constant: Rational, finite: FinSuppFn, mut flows: BTreeMap<TreeFlow, Rational>) -> Self {
        flows.retain(|_, q| !q.is_zero());
        if flows.is_empty() {
            return match (constant.is_zero(), finite.is_empty()) {
                (_, true) => BoundedFn::Constant(constant),
                (true, false) => BoundedFn::Finite(finite),
                (false, false) => BoundedFn::ConstPlusFinite(constant, finite),
            };
        }
        if flows.len() == 1 && constant.is_zero() && finite.is_empty() {
            let (flow, q) = flows.iter().next().expect("one flow");
            if q.is_one() {
                return BoundedFn::TreeFlow(flow.clone());
            }
        }
        BoundedFn::Combination { constant, finite, flows }
    }

    /// Decomposes into `(constant, finite part, flow terms)`.
    pub fn parts(&self) -> (Rational, FinSuppFn, BTreeMap<TreeFlow, Rational>) {
        match self {
            BoundedFn::Constant(c) => (c.clone(), FinSuppFn::zero(), BTreeMap::new()),
            BoundedFn::Finite(f) => (Rational::zero(), f.clone(), BTreeMap::new()),
            BoundedFn::ConstPlusFinite(c, f) => (c.clone(), f.clone(), BTreeMap::new()),
            BoundedFn::TreeFlow(t) => (Rational::zero(), FinSuppFn::zero(), BTreeMap::from([(t.clone(), Rational::one())])),
            BoundedFn::Combination { constant, finite, flows } => {
                let mut flows = flows.clone();
                flows.retain(|_, q| !q.is_zero());
                (constant.clone(), finite.clone(), flows)
            }
        }
    }

    pub fn normalized(&self) -> Self {
        let (c, f, t) = self.parts();
        Self::from_parts(c, f, t)
    }

    /// True when the function has no tree-flow terms, i.e. it is a constant
    /// plus a finitely supported function.
    pub fn is_structured(&self) -> bool {
        self.parts().2.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        let (c, f, t) = self.parts();
        c.is_zero() && f.is_empty() && t.is_empty()
    }

    pub fn evaluate(&self, g: &Element) -> Rational {
        let (c, f, flows) = self.parts();
        let mut v = c + f.get(g);
        for (flow, q) in &flows {
            if flow.evaluate(g) {
                v += q;
            }
        }
        v
    }

    /// An upper bound for `sup |f|`; exact for the structured variants on
    /// infinite groups, and `|f| ≤ bound` always.
    pub fn sup_bound(&self) -> Rational {
        let (c, f, flows) = self.parts();
        let flow_total = flows.values().fold(Rational::zero(), |acc, q| acc + q.abs());
        let finite_max = f.iter().map(|(_, q)| (&c + q).abs()).max().unwrap_or_else(Rational::zero);
        let base = if f.is_empty() { c.abs() } else { c.abs().max(finite_max) };
        base + flow_total
    }

    pub fn add_scaled(&mut self, k: &Rational, other: &BoundedFn) {
        if k.is_zero() {
            return;
        }
        let (mut c, mut f, mut t) = self.parts();
        let (oc, of, ot) = other.parts();
        c += &oc * k;
        f.add_scaled(k, &of);
        for (flow, q) in ot {
            let e = t.entry(flow).or_insert_with(Rational::zero);
            *e += q * k;
        }
        *self = Self::from_parts(c, f, t);
    }

    pub fn scaled(&self, k: &Rational) -> Self {
        let mut out = Self::zero();
        out.add_scaled(k, self);
        out
    }

    pub fn translate(&self, group: &GroupSpec, g: &Element) -> Self {
        let (c, f, t) = self.parts();
        let mut flows = BTreeMap::new();
        for (flow, q) in t {
            let e = flows.entry(flow.translate(group, g)).or_insert_with(Rational::zero);
            *e += q;
        }
        Self::from_parts(c, f.translate(group, g), flows)
    }

    pub fn to_json(&self, group: &GroupSpec) -> Value {
        let flow_json = |t: &TreeFlow| {
            json!({
                "edge": group.format_element(&Element::Word(vec![t.edge])),
                "ray": group.labels()[t.ray],
                "shift": group.element_to_json(&t.shift),
            })
        };
        match self.normalized() {
            BoundedFn::Constant(c) => json!({"constant": format_rational(&c)}),
            BoundedFn::Finite(f) => json!({"finite": f.to_json(group)}),
            BoundedFn::ConstPlusFinite(c, f) => json!({"constant": format_rational(&c), "finite": f.to_json(group)}),
            BoundedFn::TreeFlow(t) => json!({"tree_flow": flow_json(&t)}),
            BoundedFn::Combination { constant, finite, flows } => json!({
                "constant": format_rational(&constant),
                "finite": finite.to_json(group),
                "flows": flows.iter().map(|(t, q)| json!([flow_json(t), format_rational(q)])).collect::<Vec<_>>(),
            }),
        }
    }

    /// Reads `{"constant": "p/q", "finite": [...], "tree_flow": {...}, "flows": [[flow, "p/q"], ...]}`;
    /// every key is optional.
    pub fn from_json(group: &GroupSpec, v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::InvalidInput(format!("bounded function must be an object: {v}")))?;
        let constant = match obj.get("constant") {
            Some(Value::String(s)) => parse_rational(s)?,
            Some(other) => return Err(Error::InvalidRational(other.to_string())),
            None => Rational::zero(),
        };
        let finite = match obj.get("finite") {
            Some(f) => FinSuppFn::from_json(group, f)?,
            None => FinSuppFn::zero(),
        };
        let parse_flow = |f: &Value| -> Result<TreeFlow> {
            let edge = group.parse_letter(f.get("edge").and_then(Value::as_str).unwrap_or(""))?;
            let ray_label = f.get("ray").and_then(Value::as_str).unwrap_or("");
            let ray = group
                .labels()
                .iter()
                .position(|l| l == ray_label)
                .ok_or_else(|| Error::InvalidInput(format!("unknown ray generator {ray_label:?}")))?;
            let mut flow = TreeFlow::new(group, edge, ray)?;
            if let Some(s) = f.get("shift") {
                flow.shift = group.element_from_json(s)?;
            }
            Ok(flow)
        };
        let mut flows = BTreeMap::new();
        if let Some(f) = obj.get("tree_flow") {
            *flows.entry(parse_flow(f)?).or_insert_with(Rational::zero) += Rational::one();
        }
        if let Some(Value::Array(items)) = obj.get("flows") {
            for item in items {
                let pair = item
                    .as_array()
                    .filter(|p| p.len() == 2)
                    .ok_or_else(|| Error::InvalidInput("flows entries are [flow, \"p/q\"]".into()))?;
                let q = parse_rational(pair[1].as_str().unwrap_or(""))?;
                *flows.entry(parse_flow(&pair[0])?).or_insert_with(Rational::zero) += q;
            }
        }
        Ok(Self::from_parts(constant, finite, flows))
    }
}

impl PartialEq for BoundedFn {
    fn eq(&self, other: &Self) -> bool {
        self.parts() == other.parts()
    }
}

impl Eq for BoundedFn {}

impl From<FinSuppFn> for BoundedFn {
    fn from(f: FinSuppFn) -> Self {
        BoundedFn::finite(f)
    }
}

/// A representative of a class in ℓ∞G/ℂ.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QuotientRep(pub BoundedFn);

impl QuotientRep {
    /// Whether this representative is a constant function, or `None` when
    /// that cannot be decided structurally (unresolved tree-flow terms).
    pub fn is_zero_in_quotient(&self, group: &GroupSpec) -> Option<bool> {
        let (_, f, flows) = self.0.parts();
        if !flows.is_empty() {
            return None;
        }
        if f.is_empty() {
            return Some(true);
        }
        // A finitely supported function is constant only on a finite group,
        // and only if it takes one value everywhere.
        Some(match group.order() {
            Some(n) if f.len() == n => {
                let first = f.iter().next().map(|(_, q)| q.clone());
                f.iter().all(|(_, q)| Some(q) == first.as_ref())
            }
            _ => false,
        })
    }

    /// Equality modulo constants; `None` when undecidable structurally.
    pub fn quotient_eq(&self, other: &QuotientRep, group: &GroupSpec) -> Option<bool> {
        let mut diff = self.0.clone();
        diff.add_scaled(&-Rational::one(), &other.0);
        QuotientRep(diff).is_zero_in_quotient(group)
    }
}

/// `⟨φ, v⟩ = Σ_g φ(g) v(g)`, a finite sum over the support of `φ`.
pub fn pair_eval(phi: &FinSuppFn, v: &BoundedFn) -> Rational {
    phi.iter().fold(Rational::zero(), |acc, (g, q)| acc + q * v.evaluate(g))
}

/// Pairing of ℓ¹₀ with ℓ∞/ℂ. Fails unless `φ` has coefficient sum zero, the
/// condition that makes the value independent of the representative.
pub fn pair_eval_quotient(phi: &FinSuppFn, v: &QuotientRep) -> Result<Rational> {
    let s = phi.coefficient_sum();
    if !s.is_zero() {
        return Err(Error::NotZeroSum(format_rational(&s)));
    }
    Ok(pair_eval(phi, &v.0))
}

/// A `G`-module in which chain values live.
pub trait Coefficient: Clone + Debug + PartialEq + Send + Sync + 'static {
    fn module_zero() -> Self;
    /// Structural zero test; chains drop entries for which this holds.
    fn is_module_zero(&self) -> bool;
    fn add_scaled(&mut self, k: &Rational, other: &Self);
    fn translate(&self, group: &GroupSpec, g: &Element) -> Self;
    fn to_json(&self, group: &GroupSpec) -> Value;
}

/// Trivial module ℂ (over ℚ).
impl Coefficient for Rational {
    fn module_zero() -> Self {
        Zero::zero()
    }
    fn is_module_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_scaled(&mut self, k: &Rational, other: &Self) {
        *self += k * other;
    }
    fn translate(&self, _: &GroupSpec, _: &Element) -> Self {
        self.clone()
    }
    fn to_json(&self, _: &GroupSpec) -> Value {
        Value::String(format_rational(self))
    }
}

impl Coefficient for FinSuppFn {
    fn module_zero() -> Self {
        FinSuppFn::zero()
    }
    fn is_module_zero(&self) -> bool {
        self.is_empty()
    }
    fn add_scaled(&mut self, k: &Rational, other: &Self) {
        FinSuppFn::add_scaled(self, k, other)
    }
    fn translate(&self, group: &GroupSpec, g: &Element) -> Self {
        FinSuppFn::translate(self, group, g)
    }
    fn to_json(&self, group: &GroupSpec) -> Value {
        FinSuppFn::to_json(self, group)
    }
}

impl Coefficient for BoundedFn {
    fn module_zero() -> Self {
        BoundedFn::zero()
    }
    fn is_module_zero(&self) -> bool {
        BoundedFn::is_zero(self)
    }
    fn add_scaled(&mut self, k: &Rational, other: &Self) {
        BoundedFn::add_scaled(self, k, other)
    }
    fn translate(&self, group: &GroupSpec, g: &Element) -> Self {
        BoundedFn::translate(self, group, g)
    }
    fn to_json(&self, group: &GroupSpec) -> Value {
        BoundedFn::to_json(self, group)
    }
}

impl Coefficient for QuotientRep {
    fn module_zero() -> Self {
        QuotientRep::default()
    }
    // Only the trivial representative is dropped; the quotient test needs the group.
    fn is_module_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn add_scaled(&mut self, k: &Rational, other: &Self) {
        self.0.add_scaled(k, &other.0)
    }
    fn translate(&self, group: &GroupSpec, g: &Element) -> Self {
        QuotientRep(self.0.translate(group, g))
    }
    fn to_json(&self, group: &GroupSpec) -> Value {
        self.0.to_json(group)
    }
}

/// Evaluation of a functional (cochain value) on a module element (chain value).
pub trait PairsWith<V> {
    fn pair_with(&self, v: &V) -> Result<Rational>;
}

impl PairsWith<Rational> for Rational {
    fn pair_with(&self, v: &Rational) -> Result<Rational> {
        Ok(self * v)
    }
}

impl PairsWith<BoundedFn> for FinSuppFn {
    fn pair_with(&self, v: &BoundedFn) -> Result<Rational> {
        Ok(pair_eval(self, v))
    }
}

impl PairsWith<FinSuppFn> for FinSuppFn {
    fn pair_with(&self, v: &FinSuppFn) -> Result<Rational> {
        Ok(self.iter().fold(Rational::zero(), |acc, (g, q)| acc + q * v.get(g)))
    }
}

impl PairsWith<QuotientRep> for FinSuppFn {
    fn pair_with(&self, v: &QuotientRep) -> Result<Rational> {
        pair_eval_quotient(self, v)
    }
}

/// `ι`: ℂ → ℓ∞G, a scalar goes to the constant function.
pub fn include_constant(c: &Rational) -> BoundedFn {
    BoundedFn::constant(c.clone())
}

/// Convenience for tests and examples: `Σ q_i δ_{g_i}` with integer weights.
pub fn weighted(pairs: &[(Element, i64)]) -> FinSuppFn {
    FinSuppFn::from_pairs(pairs.iter().map(|(g, q)| (g.clone(), int(*q))))
}
