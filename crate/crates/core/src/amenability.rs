//! The amenable side: Følner and Reiter certificates, the exhaustive
//! isoperimetric oracle for small balls, and exact computation of the
//! Block–Weinberger class of a finite group.
//!
//! The Reiter functional is `f ↦ Σ_{s ∈ S ∪ S⁻¹} ‖s·f − f‖₁ / ‖f‖₁`. A group
//! is amenable exactly when its infimum over nonnegative nonzero finitely
//! supported `f` is zero. For an indicator `1_F` it is the Følner ratio
//! `Σ_s |sF Δ F| / |F|`. An invariant mean is a limit object and is never
//! constructed; certificates here are finite approximants only.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::functions::FinSuppFn;
use crate::groups::{Element, GroupKind, GroupSpec};
use crate::rational::{as_string, format_rational, parse_rational, ratio, Rational};

/// `Σ_{s ∈ S ∪ S⁻¹} ‖s·f − f‖₁ / ‖f‖₁` for nonnegative nonzero `f`.
pub fn reiter_ratio(group: &GroupSpec, f: &FinSuppFn) -> Result<Rational> {
    if f.is_empty() {
        return Err(Error::InvalidInput("Reiter ratio of the zero function".into()));
    }
    if !f.is_nonnegative() {
        return Err(Error::InvalidInput("Reiter ratio needs a nonnegative function".into()));
    }
    let mut total = Rational::zero();
    for s in group.symmetric_generators() {
        total += (f.translate(group, &s) - f.clone()).l1_norm();
    }
    Ok(total / f.l1_norm())
}

/// `|sF Δ F|` for each `s ∈ S ∪ S⁻¹`, in canonical generator order.
pub fn symmetric_differences(group: &GroupSpec, set: &[Element]) -> Vec<(Element, usize)> {
    let members: HashSet<&Element> = set.iter().collect();
    group
        .symmetric_generators()
        .into_iter()
        .map(|s| {
            let shifted: HashSet<Element> = set.iter().map(|x| group.mul(&s, x)).collect();
            let out = shifted.iter().filter(|y| !members.contains(y)).count();
            let lost = set.iter().filter(|x| !shifted.contains(*x)).count();
            (s, out + lost)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Word-metric balls of radius 0, 1, 2, ….
    Balls,
    /// Boxes `[0, n)^d` of side 1, 2, … (free abelian groups; balls elsewhere).
    Boxes,
}

/// The box `[0, side)^rank` in `Z^rank`, lexicographic order.
pub fn lattice_box(rank: usize, side: usize) -> Vec<Element> {
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..side as i64).map(move |x| {
                    let mut v = v.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    if side == 0 {
        return Vec::new();
    }
    out.into_iter().map(Element::Vector).collect()
}

/// A finite set `F` with small Følner ratio.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FolnerCertificate {
    pub group_hash: String,
    pub strategy: Strategy,
    /// Ball radius or box side that produced `set`.
    pub parameter: usize,
    pub set: Vec<Element>,
    pub symmetric_differences: Vec<(Element, usize)>,
    pub ratio: Rational,
}

impl FolnerCertificate {
    pub fn from_set(group: &GroupSpec, strategy: Strategy, parameter: usize, set: Vec<Element>) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::InvalidInput("Følner set must be nonempty".into()));
        }
        let diffs = symmetric_differences(group, &set);
        let total: usize = diffs.iter().map(|(_, d)| d).sum();
        Ok(FolnerCertificate {
            group_hash: group.spec_hash(),
            strategy,
            parameter,
            ratio: ratio(total as i64, set.len() as i64),
            set,
            symmetric_differences: diffs,
        })
    }

    /// Recomputes every derived field from `set` and `group`.
    pub fn verify(&self, group: &GroupSpec) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidInput(format!("Følner certificate rejected: {m}")));
        if self.group_hash != group.spec_hash() {
            return fail("group hash mismatch".into());
        }
        let distinct: HashSet<&Element> = self.set.iter().collect();
        if distinct.len() != self.set.len() {
            return fail("set has duplicates".into());
        }
        for x in &self.set {
            group.check(x)?;
        }
        let again = Self::from_set(group, self.strategy, self.parameter, self.set.clone())?;
        if again.symmetric_differences != self.symmetric_differences {
            return fail("symmetric difference sizes do not match".into());
        }
        if again.ratio != self.ratio {
            return fail(format!("ratio {} does not match recomputed {}", format_rational(&self.ratio), format_rational(&again.ratio)));
        }
        if reiter_ratio(group, &FinSuppFn::indicator(&self.set))? != self.ratio {
            return fail("Reiter functional disagrees with the set ratio".into());
        }
        Ok(())
    }

    pub fn to_json(&self, group: &GroupSpec) -> Value {
        json!({
            "kind": "folner-certificate",
            "group_hash": self.group_hash,
            "strategy": self.strategy,
            "parameter": self.parameter,
            "set_size": self.set.len(),
            "ratio": format_rational(&self.ratio),
            "symmetric_differences": self.symmetric_differences.iter().map(|(s, d)| {
                json!([group.element_to_json(s), d])
            }).collect::<Vec<_>>(),
            "set": self.set.iter().map(|x| group.element_to_json(x)).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(group: &GroupSpec, v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::InvalidInput(format!("malformed Følner certificate: {m}"));
        let set = v
            .get("set")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("set"))?
            .iter()
            .map(|x| group.element_from_json(x))
            .collect::<Result<Vec<_>>>()?;
        let diffs = v
            .get("symmetric_differences")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("symmetric_differences"))?
            .iter()
            .map(|p| {
                let s = group.element_from_json(p.get(0).ok_or_else(|| bad("generator"))?)?;
                let d = p.get(1).and_then(Value::as_u64).ok_or_else(|| bad("size"))? as usize;
                Ok((s, d))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FolnerCertificate {
            group_hash: v.get("group_hash").and_then(Value::as_str).ok_or_else(|| bad("group_hash"))?.to_string(),
            strategy: serde_json::from_value(v.get("strategy").cloned().ok_or_else(|| bad("strategy"))?)?,
            parameter: v.get("parameter").and_then(Value::as_u64).ok_or_else(|| bad("parameter"))? as usize,
            set,
            symmetric_differences: diffs,
            ratio: parse_rational(v.get("ratio").and_then(Value::as_str).ok_or_else(|| bad("ratio"))?)?,
        })
    }
}

/// Best ratio reached at each tried parameter when no set met the target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FolnerFailure {
    pub group_hash: String,
    pub strategy: Strategy,
    #[serde(with = "as_string")]
    pub target: Rational,
    pub per_parameter: Vec<ParameterRatio>,
    #[serde(with = "as_string")]
    pub best_ratio: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterRatio {
    pub parameter: usize,
    pub set_size: usize,
    #[serde(with = "as_string")]
    pub ratio: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FolnerOutcome {
    Found(FolnerCertificate),
    Exhausted(FolnerFailure),
}

/// Tries candidate sets in increasing size and returns the first whose ratio
/// is at most `eps`.
///
/// Parameters run over `0..=max` for balls and `1..=max` for boxes. Boxes
/// only make sense in `Z^d`; other families are searched with balls.
pub fn folner_search(group: &GroupSpec, eps: &Rational, strategy: Strategy, max: usize) -> Result<FolnerOutcome> {
    if !eps.is_positive() {
        return Err(Error::InvalidInput("target ratio must be positive".into()));
    }
    let strategy = match (strategy, group.kind()) {
        (Strategy::Boxes, GroupKind::FreeAbelian { .. }) => Strategy::Boxes,
        _ => Strategy::Balls,
    };
    let mut per_parameter = Vec::new();
    let mut last_size = None;
    let params: Vec<usize> = match strategy {
        Strategy::Balls => (0..=max).collect(),
        Strategy::Boxes => (1..=max).collect(),
    };
    for p in params {
        let set = match strategy {
            Strategy::Balls => group.ball(p),
            Strategy::Boxes => lattice_box(group.rank(), p),
        };
        // A saturated ball in a finite group repeats the previous candidate.
        if last_size == Some(set.len()) && strategy == Strategy::Balls {
            break;
        }
        last_size = Some(set.len());
        let cert = FolnerCertificate::from_set(group, strategy, p, set)?;
        if &cert.ratio <= eps {
            return Ok(FolnerOutcome::Found(cert));
        }
        per_parameter.push(ParameterRatio { parameter: p, set_size: cert.set.len(), ratio: cert.ratio });
    }
    let best_ratio = per_parameter.iter().map(|r| r.ratio.clone()).min().unwrap_or_else(|| eps.clone());
    Ok(FolnerOutcome::Exhausted(FolnerFailure {
        group_hash: group.spec_hash(),
        strategy,
        target: eps.clone(),
        per_parameter,
        best_ratio,
    }))
}

/// Largest ball the exhaustive oracle will enumerate subsets of.
pub const ISO_MAX_BALL: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoperimetricMin {
    pub radius: usize,
    pub ball_size: usize,
    pub subsets_checked: u64,
    pub min_ratio: Rational,
    /// First minimizing subset in enumeration order.
    pub minimizer: Vec<Element>,
}

impl IsoperimetricMin {
    pub fn to_json(&self, group: &GroupSpec) -> Value {
        json!({
            "kind": "isoperimetric-minimum",
            "group_hash": group.spec_hash(),
            "radius": self.radius,
            "ball_size": self.ball_size,
            "subsets_checked": self.subsets_checked,
            "min_ratio": format_rational(&self.min_ratio),
            "minimizer": self.minimizer.iter().map(|x| group.element_to_json(x)).collect::<Vec<_>>(),
        })
    }
}

/// `min Σ_s |sF Δ F| / |F|` over every nonempty `F ⊆ ball(radius)`, by
/// enumerating all subsets (connected or not).
pub fn isoperimetric_min(group: &GroupSpec, radius: usize) -> Result<IsoperimetricMin> {
    let ball = group.ball(radius);
    let n = ball.len();
    if n > ISO_MAX_BALL {
        return Err(Error::TooLarge(format!("ball({radius}) has {n} elements; at most {ISO_MAX_BALL} are enumerable")));
    }
    let index: HashMap<&Element, usize> = ball.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let gens = group.symmetric_generators();
    // For each element and generator: the positions of s·x and s⁻¹·x inside the ball, if any.
    let neighbours: Vec<Vec<(Option<usize>, Option<usize>)>> = ball
        .iter()
        .map(|x| {
            gens.iter()
                .map(|s| {
                    let fwd = index.get(&group.mul(s, x)).copied();
                    let back = index.get(&group.mul(&group.inverse(s), x)).copied();
                    (fwd, back)
                })
                .collect()
        })
        .collect();
    let inside = |mask: u32, i: Option<usize>| i.is_some_and(|i| mask >> i & 1 == 1);

    let (mut best_num, mut best_den, mut best_mask) = (u64::MAX, 1u64, 0u32);
    for mask in 1u32..(1u32 << n) {
        let mut boundary = 0u64;
        for i in (0..n).filter(|&i| mask >> i & 1 == 1) {
            for &(fwd, back) in &neighbours[i] {
                // x ∈ F with s·x ∉ F contributes to sF \ F; with s⁻¹·x ∉ F to F \ sF.
                boundary += u64::from(!inside(mask, fwd)) + u64::from(!inside(mask, back));
            }
        }
        let size = u64::from(mask.count_ones());
        if boundary * best_den < best_num * size {
            (best_num, best_den, best_mask) = (boundary, size, mask);
        }
    }
    Ok(IsoperimetricMin {
        radius,
        ball_size: n,
        subsets_checked: (1u64 << n) - 1,
        min_ratio: Rational::new(best_num.into(), best_den.into()),
        minimizer: (0..n).filter(|&i| best_mask >> i & 1 == 1).map(|i| ball[i].clone()).collect(),
    })
}

/// Exact test of whether **1** lies in `span{g·v − v}` inside `ℚ^G` for a
/// finite group, i.e. whether the fundamental class vanishes in `H_0(G, ℓ∞G)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteH0Report {
    pub group_size: usize,
    pub span_dimension: usize,
    pub one_in_span: bool,
    /// **1** reduced modulo the echelon basis of the span; all zero iff
    /// `one_in_span`.
    pub residual: Vec<String>,
    pub group_hash: String,
}

type SparseRow = BTreeMap<usize, Rational>;

/// Reduces `v` against echelon rows keyed by their leading column.
fn reduce(rows: &BTreeMap<usize, SparseRow>, mut v: SparseRow) -> SparseRow {
    let mut from = 0;
    while let Some((&col, coeff)) = v.range(from..).next() {
        let Some(row) = rows.get(&col) else {
            from = col + 1;
            continue;
        };
        let k = coeff / &row[&col];
        for (c, x) in row {
            let e = v.entry(*c).or_insert_with(Rational::zero);
            *e -= &k * x;
            if e.is_zero() {
                v.remove(c);
            }
        }
        from = col;
    }
    v
}

pub fn finite_h0(group: &GroupSpec) -> Result<FiniteH0Report> {
    let GroupKind::Finite(table) = group.kind() else {
        return Err(Error::InvalidInput(format!("finite-h0 needs a finite group, got {}", group.family_name())));
    };
    let n = table.order();
    let mut rows: BTreeMap<usize, SparseRow> = BTreeMap::new();
    'outer: for g in 0..n {
        for h in 0..n {
            // g·δ_h − δ_h = δ_{gh} − δ_h
            let gh = table.table()[g][h];
            if gh == h {
                continue;
            }
            let v: SparseRow = [(gh, Rational::one()), (h, -Rational::one())].into_iter().collect();
            let r = reduce(&rows, v);
            if let Some((&lead, _)) = r.iter().next() {
                rows.insert(lead, r);
                if rows.len() == n {
                    break 'outer;
                }
            }
        }
    }
    let ones: SparseRow = (0..n).map(|i| (i, Rational::one())).collect();
    let residual = reduce(&rows, ones);
    Ok(FiniteH0Report {
        group_size: n,
        span_dimension: rows.len(),
        one_in_span: residual.is_empty(),
        residual: (0..n).map(|i| format_rational(&residual.get(&i).cloned().unwrap_or_else(Rational::zero))).collect(),
        group_hash: group.spec_hash(),
    })
}
