//! Finitely generated groups with exact normal forms.
//!
//! Three families are supported: free groups `F_k` (reduced words), free
//! abelian groups `Z^d` (integer vectors) and finite groups given by a full
//! multiplication table. Every [`Element`] is stored in its unique normal
//! form, so structural equality is group equality.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt::Write as _;
use std::sync::Arc;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Shared handle to an immutable group.
pub type Group = Arc<GroupSpec>;

/// A free generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn gen(generator: usize) -> Self {
        Letter { generator, inverse: false }
    }

    pub fn gen_inv(generator: usize) -> Self {
        Letter { generator, inverse: true }
    }

    pub fn inv(self) -> Self {
        Letter { generator: self.generator, inverse: !self.inverse }
    }
}

// Generators first, then their inverses: a < b < a^-1 < b^-1.
impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.inverse, self.generator).cmp(&(other.inverse, other.generator))
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A group element in normal form.
///
/// The ordering is shortlex for words, (ℓ¹ norm, lexicographic) for vectors
/// and by index for table elements; within one family it is the canonical
/// order used for every serialized output.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Element {
    Word(Vec<Letter>),
    Vector(Vec<i64>),
    Index(usize),
}

impl Element {
    fn rank_key(&self) -> (u8, u64) {
        match self {
            Element::Word(w) => (0, w.len() as u64),
            Element::Vector(v) => (1, v.iter().map(|x| x.unsigned_abs()).sum()),
            Element::Index(i) => (2, *i as u64),
        }
    }

    pub fn as_word(&self) -> Option<&[Letter]> {
        match self {
            Element::Word(w) => Some(w),
            _ => None,
        }
    }
}

impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank_key().cmp(&other.rank_key()).then_with(|| match (self, other) {
            (Element::Word(a), Element::Word(b)) => a.cmp(b),
            (Element::Vector(a), Element::Vector(b)) => a.cmp(b),
            _ => Ordering::Equal,
        })
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Free reduction of an arbitrary letter sequence.
pub fn reduce_word(letters: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn invert_word(w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|l| l.inv()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTable {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
    generators: Vec<usize>,
    /// Word length of each element with respect to `generators`.
    lengths: Vec<usize>,
}

impl FiniteTable {
    /// Validates closure, associativity, identity and inverses, and that the
    /// declared generators generate. `generators = None` means every
    /// non-identity element.
    pub fn new(table: Vec<Vec<usize>>, generators: Option<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        let bad = |msg: String| Error::InvalidGroup(msg);
        if n == 0 {
            return Err(bad("empty multiplication table".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(bad(format!("row {i} has length {}, expected {n}", row.len())));
            }
            if let Some(&x) = row.iter().find(|&&x| x >= n) {
                return Err(bad(format!("entry {x} in row {i} is out of range")));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| bad("no two-sided identity".into()))?;
        let inverses = (0..n)
            .map(|x| {
                (0..n)
                    .find(|&y| table[x][y] == identity && table[y][x] == identity)
                    .ok_or_else(|| bad(format!("element {x} has no inverse")))
            })
            .collect::<Result<Vec<_>>>()?;
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(bad(format!("associativity fails at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        let generators = match generators {
            Some(g) => {
                if let Some(&x) = g.iter().find(|&&x| x >= n) {
                    return Err(bad(format!("generator {x} is out of range")));
                }
                let mut seen = g.clone();
                seen.sort_unstable();
                seen.dedup();
                if seen.len() != g.len() {
                    return Err(bad("generators are not distinct".into()));
                }
                g
            }
            None => (0..n).filter(|&x| x != identity).collect(),
        };

        // Cayley graph distances from the identity, right multiplication by S ∪ S⁻¹.
        let mut steps: Vec<usize> = generators.iter().flat_map(|&s| [s, inverses[s]]).collect();
        steps.sort_unstable();
        steps.dedup();
        let mut lengths = vec![usize::MAX; n];
        lengths[identity] = 0;
        let mut queue = VecDeque::from([identity]);
        while let Some(x) = queue.pop_front() {
            for &s in &steps {
                let y = table[x][s];
                if lengths[y] == usize::MAX {
                    lengths[y] = lengths[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        if lengths.contains(&usize::MAX) {
            return Err(bad("declared generators do not generate the group".into()));
        }
        Ok(FiniteTable { table, identity, inverses, generators, lengths })
    }

    /// The cyclic group `Z/n` with generator `1`.
    pub fn cyclic(n: usize) -> Result<Self> {
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        let gens = if n > 1 { vec![1] } else { vec![] };
        Self::new(table, Some(gens))
    }

    /// The symmetric group on `k` letters, elements indexed by the
    /// lexicographic order of permutations, generated by a transposition and
    /// a `k`-cycle.
    pub fn symmetric(k: usize) -> Result<Self> {
        let mut perms: Vec<Vec<usize>> = Vec::new();
        permutations(&mut (0..k).collect(), 0, &mut perms);
        perms.sort();
        let index = |p: &Vec<usize>| perms.binary_search(p).expect("closed under composition");
        // (p * q)(x) = p(q(x))
        let table: Vec<Vec<usize>> = perms
            .iter()
            .map(|p| perms.iter().map(|q| index(&q.iter().map(|&x| p[x]).collect())).collect())
            .collect();
        let gens = if k < 2 {
            vec![]
        } else {
            let mut swap: Vec<usize> = (0..k).collect();
            swap.swap(0, 1);
            let cycle: Vec<usize> = (0..k).map(|x| (x + 1) % k).collect();
            let mut g = vec![index(&swap), index(&cycle)];
            g.dedup();
            g
        };
        Self::new(table, Some(gens))
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }
}

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Free { rank: usize },
    FreeAbelian { rank: usize },
    Finite(FiniteTable),
}

/// A group together with its generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    kind: GroupKind,
    labels: Vec<String>,
}

fn default_labels(k: usize) -> Vec<String> {
    if k <= 26 {
        (0..k).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    } else {
        (0..k).map(|i| format!("x{i}")).collect()
    }
}

fn check_labels(labels: &[String], expected: usize) -> Result<()> {
    if labels.len() != expected {
        return Err(Error::InvalidGroup(format!(
            "expected {expected} generator labels, found {}",
            labels.len()
        )));
    }
    for (i, l) in labels.iter().enumerate() {
        let ok = !l.is_empty()
            && l != "e"
            && l.chars().all(|c| c.is_alphanumeric() || c == '_')
            && l.chars().next().is_some_and(|c| c.is_alphabetic());
        if !ok {
            return Err(Error::InvalidGroup(format!("invalid generator label {l:?}")));
        }
        if labels[..i].contains(l) {
            return Err(Error::InvalidGroup(format!("duplicate generator label {l:?}")));
        }
    }
    Ok(())
}

impl GroupSpec {
    pub fn free(rank: usize) -> Result<Self> {
        Self::free_with_labels(default_labels(rank))
    }

    pub fn free_with_labels(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidGroup("free group rank must be at least 1".into()));
        }
        check_labels(&labels, labels.len())?;
        Ok(GroupSpec { kind: GroupKind::Free { rank: labels.len() }, labels })
    }

    pub fn free_abelian(rank: usize) -> Result<Self> {
        Self::free_abelian_with_labels(default_labels(rank))
    }

    pub fn free_abelian_with_labels(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidGroup("free abelian rank must be at least 1".into()));
        }
        check_labels(&labels, labels.len())?;
        Ok(GroupSpec { kind: GroupKind::FreeAbelian { rank: labels.len() }, labels })
    }

    pub fn finite(table: FiniteTable) -> Self {
        let labels = table.generators.iter().map(|g| format!("g{g}")).collect();
        GroupSpec { kind: GroupKind::Finite(table), labels }
    }

    pub fn into_group(self) -> Group {
        Arc::new(self)
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn family_name(&self) -> &'static str {
        match self.kind {
            GroupKind::Free { .. } => "free",
            GroupKind::FreeAbelian { .. } => "free-abelian",
            GroupKind::Finite(_) => "finite",
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self.kind, GroupKind::Free { .. })
    }

    /// Number of generators (the rank for free and free abelian groups).
    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    /// `Some(n)` for finite groups.
    pub fn order(&self) -> Option<usize> {
        match &self.kind {
            GroupKind::Finite(t) => Some(t.order()),
            _ => None,
        }
    }

    pub fn identity(&self) -> Element {
        match &self.kind {
            GroupKind::Free { .. } => Element::Word(Vec::new()),
            GroupKind::FreeAbelian { rank } => Element::Vector(vec![0; *rank]),
            GroupKind::Finite(t) => Element::Index(t.identity),
        }
    }

    pub fn contains(&self, x: &Element) -> bool {
        match (&self.kind, x) {
            (GroupKind::Free { rank }, Element::Word(w)) => {
                w.iter().all(|l| l.generator < *rank) && w.windows(2).all(|p| p[1] != p[0].inv())
            }
            (GroupKind::FreeAbelian { rank }, Element::Vector(v)) => v.len() == *rank,
            (GroupKind::Finite(t), Element::Index(i)) => *i < t.order(),
            _ => false,
        }
    }

    pub fn check(&self, x: &Element) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::ElementMismatch { element: format!("{x:?}"), family: self.family_name() })
        }
    }

    /// Checked product.
    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    /// Product of two elements already known to belong to this group.
    ///
    /// Panics on a family mismatch; use [`GroupSpec::multiply`] for untrusted input.
    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        match (&self.kind, a, b) {
            (GroupKind::Free { .. }, Element::Word(x), Element::Word(y)) => {
                Element::Word(reduce_word(x.iter().chain(y.iter()).copied()))
            }
            (GroupKind::FreeAbelian { .. }, Element::Vector(x), Element::Vector(y)) => {
                Element::Vector(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (GroupKind::Finite(t), Element::Index(i), Element::Index(j)) => Element::Index(t.table[*i][*j]),
            _ => panic!("element family does not match {} group", self.family_name()),
        }
    }

    pub fn inverse(&self, a: &Element) -> Element {
        match (&self.kind, a) {
            (GroupKind::Free { .. }, Element::Word(w)) => Element::Word(invert_word(w)),
            (GroupKind::FreeAbelian { .. }, Element::Vector(v)) => Element::Vector(v.iter().map(|x| -x).collect()),
            (GroupKind::Finite(t), Element::Index(i)) => Element::Index(t.inverses[*i]),
            _ => panic!("element family does not match {} group", self.family_name()),
        }
    }

    /// `a⁻¹ b`.
    pub fn left_divide(&self, a: &Element, b: &Element) -> Element {
        self.mul(&self.inverse(a), b)
    }

    /// Word length with respect to the symmetric generating set.
    pub fn length(&self, a: &Element) -> usize {
        match (&self.kind, a) {
            (GroupKind::Free { .. }, Element::Word(w)) => w.len(),
            (GroupKind::FreeAbelian { .. }, Element::Vector(v)) => v.iter().map(|x| x.unsigned_abs() as usize).sum(),
            (GroupKind::Finite(t), Element::Index(i)) => t.lengths[*i],
            _ => panic!("element family does not match {} group", self.family_name()),
        }
    }

    /// Left-invariant word metric `d(a, b) = |a⁻¹ b|`.
    pub fn word_metric(&self, a: &Element, b: &Element) -> usize {
        self.length(&self.left_divide(a, b))
    }

    /// Diameter of a finite set of elements in the word metric.
    pub fn diameter(&self, points: &[Element]) -> usize {
        let mut d = 0;
        for (i, a) in points.iter().enumerate() {
            for b in &points[i + 1..] {
                d = d.max(self.word_metric(a, b));
            }
        }
        d
    }

    /// `S ∪ S⁻¹` in canonical order, identity excluded, duplicates removed.
    pub fn symmetric_generators(&self) -> Vec<Element> {
        match &self.kind {
            GroupKind::Free { rank } => {
                let mut ls: Vec<Letter> = (0..*rank).flat_map(|i| [Letter::gen(i), Letter::gen_inv(i)]).collect();
                ls.sort();
                ls.into_iter().map(|l| Element::Word(vec![l])).collect()
            }
            GroupKind::FreeAbelian { rank } => {
                let unit = |i: usize, s: i64| {
                    let mut v = vec![0; *rank];
                    v[i] = s;
                    Element::Vector(v)
                };
                (0..*rank).map(|i| unit(i, 1)).chain((0..*rank).map(|i| unit(i, -1))).collect()
            }
            GroupKind::Finite(t) => {
                let mut s: Vec<usize> = t
                    .generators
                    .iter()
                    .flat_map(|&g| [g, t.inverses[g]])
                    .filter(|&g| g != t.identity)
                    .collect();
                s.sort_unstable();
                s.dedup();
                s.into_iter().map(Element::Index).collect()
            }
        }
    }

    /// All elements at word distance exactly `r` from the identity, canonically ordered.
    pub fn sphere(&self, r: usize) -> Vec<Element> {
        match &self.kind {
            GroupKind::Free { rank } => {
                let mut letters: Vec<Letter> = (0..*rank).flat_map(|i| [Letter::gen(i), Letter::gen_inv(i)]).collect();
                letters.sort();
                let mut level: Vec<Vec<Letter>> = vec![Vec::new()];
                for _ in 0..r {
                    let mut next = Vec::with_capacity(level.len() * (2 * rank - 1).max(1));
                    for w in &level {
                        for &l in &letters {
                            if w.last() != Some(&l.inv()) {
                                let mut v = w.clone();
                                v.push(l);
                                next.push(v);
                            }
                        }
                    }
                    level = next;
                }
                let mut out: Vec<Element> = level.into_iter().map(Element::Word).collect();
                out.sort();
                out
            }
            GroupKind::FreeAbelian { rank } => {
                let mut out = Vec::new();
                let mut v = vec![0i64; *rank];
                lattice_sphere(&mut v, 0, r as i64, &mut out);
                out.sort();
                out
            }
            GroupKind::Finite(t) => (0..t.order()).filter(|&i| t.lengths[i] == r).map(Element::Index).collect(),
        }
    }

    /// All elements at word distance at most `r`, in breadth-first canonical order.
    pub fn ball(&self, r: usize) -> Vec<Element> {
        let mut out = Vec::new();
        for k in 0..=r {
            let s = self.sphere(k);
            if s.is_empty() && self.order().is_some() {
                break;
            }
            out.extend(s);
        }
        out
    }

    /// Renders an element for humans and for JSON keys of free groups:
    /// `e`, `a*b^-1*a`, `(1,0)`, `#3`.
    pub fn format_element(&self, x: &Element) -> String {
        match x {
            Element::Word(w) if w.is_empty() => "e".to_string(),
            Element::Word(w) => {
                let mut s = String::new();
                for (i, l) in w.iter().enumerate() {
                    if i > 0 {
                        s.push('*');
                    }
                    let label = self.labels.get(l.generator).map(String::as_str).unwrap_or("?");
                    s.push_str(label);
                    if l.inverse {
                        s.push_str("^-1");
                    }
                }
                s
            }
            Element::Vector(v) => {
                let mut s = String::from("(");
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        s.push(',');
                    }
                    let _ = write!(s, "{x}");
                }
                s.push(')');
                s
            }
            Element::Index(i) => format!("#{i}"),
        }
    }

    /// Parses a word such as `a*b^-1*a`, `a^3*b` or `e` into reduced form.
    pub fn parse_word(&self, s: &str) -> Result<Element> {
        if !self.is_free() {
            return Err(Error::InvalidElement(s.to_string()));
        }
        let s = s.trim();
        if s == "e" || s.is_empty() {
            return Ok(self.identity());
        }
        let mut letters = Vec::new();
        for token in s.split('*') {
            let token = token.trim();
            let (name, power) = match token.split_once('^') {
                Some((n, p)) => (n.trim(), p.trim().parse::<i64>().map_err(|_| Error::InvalidElement(s.to_string()))?),
                None => (token, 1),
            };
            let g = self
                .labels
                .iter()
                .position(|l| l == name)
                .ok_or_else(|| Error::InvalidElement(s.to_string()))?;
            let letter = if power < 0 { Letter::gen_inv(g) } else { Letter::gen(g) };
            letters.extend(std::iter::repeat_n(letter, power.unsigned_abs() as usize));
        }
        Ok(Element::Word(reduce_word(letters)))
    }

    /// Parses a single generator or inverse generator, e.g. `b` or `a^-1`.
    pub fn parse_letter(&self, s: &str) -> Result<Letter> {
        match self.parse_word(s)? {
            Element::Word(w) if w.len() == 1 => Ok(w[0]),
            _ => Err(Error::InvalidElement(format!("{s} is not a generator or inverse generator"))),
        }
    }

    pub fn element_to_json(&self, x: &Element) -> Value {
        match x {
            Element::Word(_) => Value::String(self.format_element(x)),
            Element::Vector(v) => json!(v),
            Element::Index(i) => json!(i),
        }
    }

    pub fn element_from_json(&self, v: &Value) -> Result<Element> {
        let bad = || Error::InvalidElement(v.to_string());
        let x = match (&self.kind, v) {
            (GroupKind::Free { .. }, Value::String(s)) => self.parse_word(s)?,
            (GroupKind::FreeAbelian { .. }, Value::Array(a)) => {
                Element::Vector(a.iter().map(|x| x.as_i64().ok_or_else(bad)).collect::<Result<_>>()?)
            }
            (GroupKind::Finite(_), Value::Number(n)) => Element::Index(n.as_u64().ok_or_else(bad)? as usize),
            _ => return Err(bad()),
        };
        self.check(&x)?;
        Ok(x)
    }

    pub fn to_json(&self) -> Value {
        match &self.kind {
            GroupKind::Free { rank } => json!({"family": "free", "rank": rank, "generators": self.labels}),
            GroupKind::FreeAbelian { rank } => {
                json!({"family": "free-abelian", "rank": rank, "generators": self.labels})
            }
            GroupKind::Finite(t) => json!({"family": "finite", "table": t.table, "generators": t.generators}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::InvalidGroup(m.to_string());
        let family = v.get("family").and_then(Value::as_str).ok_or_else(|| bad("missing \"family\""))?;
        let labels = |rank: Option<usize>| -> Result<Vec<String>> {
            match v.get("generators") {
                Some(Value::Array(a)) => {
                    let ls: Vec<String> = a
                        .iter()
                        .map(|x| x.as_str().map(str::to_string).ok_or_else(|| bad("generator labels must be strings")))
                        .collect::<Result<_>>()?;
                    if let Some(r) = rank {
                        check_labels(&ls, r)?;
                    }
                    Ok(ls)
                }
                Some(_) => Err(bad("\"generators\" must be an array")),
                None => Ok(default_labels(rank.ok_or_else(|| bad("missing \"rank\""))?)),
            }
        };
        let rank = v.get("rank").map(|r| r.as_u64().map(|r| r as usize).ok_or_else(|| bad("\"rank\" must be a nonnegative integer"))).transpose()?;
        match family {
            "free" => Self::free_with_labels(labels(rank)?),
            "free-abelian" | "free_abelian" | "abelian" => Self::free_abelian_with_labels(labels(rank)?),
            "finite" => {
                let table: Vec<Vec<usize>> = serde_json::from_value(
                    v.get("table").cloned().ok_or_else(|| bad("missing \"table\""))?,
                )
                .map_err(|e| Error::InvalidGroup(format!("bad table: {e}")))?;
                let gens: Option<Vec<usize>> = match v.get("generators") {
                    None => None,
                    Some(g) => Some(
                        serde_json::from_value(g.clone())
                            .map_err(|_| bad("finite generators must be element indices"))?,
                    ),
                };
                Ok(Self::finite(FiniteTable::new(table, gens)?))
            }
            other => Err(Error::InvalidGroup(format!("unknown family {other:?}"))),
        }
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn spec_hash(&self) -> String {
        let canonical = serde_json::to_string(&self.to_json()).expect("group JSON serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn lattice_sphere(v: &mut Vec<i64>, i: usize, remaining: i64, out: &mut Vec<Element>) {
    if i + 1 == v.len() {
        for x in if remaining == 0 { vec![0] } else { vec![-remaining, remaining] } {
            v[i] = x;
            out.push(Element::Vector(v.clone()));
        }
        v[i] = 0;
        return;
    }
    for x in -remaining..=remaining {
        v[i] = x;
        lattice_sphere(v, i + 1, remaining - x.abs(), out);
    }
    v[i] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn f2() -> GroupSpec {
        GroupSpec::free(2).unwrap()
    }

    fn w(g: &GroupSpec, s: &str) -> Element {
        g.parse_word(s).unwrap()
    }

    /// Letter-by-letter reduction that rescans from the start after every cancellation.
    fn naive_reduce(mut letters: Vec<Letter>) -> Vec<Letter> {
        'outer: loop {
            for i in 0..letters.len().saturating_sub(1) {
                if letters[i + 1] == letters[i].inv() {
                    letters.drain(i..i + 2);
                    continue 'outer;
                }
            }
            return letters;
        }
    }

    /// BFS over the Cayley graph, independent of normal forms beyond equality.
    fn bfs_ball(g: &GroupSpec, r: usize) -> HashSet<Element> {
        let gens = g.symmetric_generators();
        let mut seen = HashSet::from([g.identity()]);
        let mut frontier = vec![g.identity()];
        for _ in 0..r {
            let mut next = Vec::new();
            for x in &frontier {
                for s in &gens {
                    let y = g.mul(x, s);
                    if seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        seen
    }

    fn bfs_distance(g: &GroupSpec, a: &Element, b: &Element) -> usize {
        let gens = g.symmetric_generators();
        let mut seen = HashSet::from([a.clone()]);
        let mut frontier = vec![a.clone()];
        let mut d = 0;
        loop {
            if frontier.contains(b) {
                return d;
            }
            let mut next = Vec::new();
            for x in &frontier {
                for s in &gens {
                    let y = g.mul(x, s);
                    if seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            frontier = next;
            d += 1;
        }
    }

    #[test]
    fn free_cancellation() {
        let g = f2();
        assert_eq!(g.mul(&w(&g, "a"), &w(&g, "a^-1")), g.identity());
        let prod = g.mul(&w(&g, "a*b"), &w(&g, "b^-1*a"));
        assert_eq!(prod, w(&g, "a*a"));
        let a = Letter::gen(0);
        let b = Letter::gen(1);
        assert_eq!(naive_reduce(vec![a, b, b.inv(), a]), vec![a, a]);
        assert_eq!(g.format_element(&prod), "a*a");
    }

    #[test]
    fn abelian_addition() {
        let g = GroupSpec::free_abelian(2).unwrap();
        let p = g.mul(&Element::Vector(vec![1, 0]), &Element::Vector(vec![0, 1]));
        assert_eq!(p, Element::Vector(vec![1, 1]));
    }

    #[test]
    fn ball_sizes() {
        let g = f2();
        assert_eq!(g.ball(1).len(), 5);
        assert_eq!(g.ball(2).len(), 17);
        let z2 = GroupSpec::free_abelian(2).unwrap();
        assert_eq!(z2.ball(2).len(), 13);
        for r in 0..=6usize {
            assert_eq!(g.ball(r).len(), 2 * 3usize.pow(r as u32) - 1);
            assert_eq!(z2.ball(r).len(), 2 * r * r + 2 * r + 1);
        }
        for r in 0..=4 {
            let ours: HashSet<Element> = g.ball(r).into_iter().collect();
            assert_eq!(ours, bfs_ball(&g, r));
            let ours: HashSet<Element> = z2.ball(r).into_iter().collect();
            assert_eq!(ours, bfs_ball(&z2, r));
        }
    }

    #[test]
    fn ball_is_nested_and_ordered() {
        let g = f2();
        for r in 0..5 {
            let small = g.ball(r);
            let big = g.ball(r + 1);
            assert_eq!(&big[..small.len()], &small[..]);
            let set: HashSet<_> = big.iter().collect();
            assert_eq!(set.len(), big.len());
        }
        let b1: Vec<String> = g.ball(1).iter().map(|x| g.format_element(x)).collect();
        assert_eq!(b1, ["e", "a", "b", "a^-1", "b^-1"]);
    }

    #[test]
    fn finite_ball_saturates() {
        let z3 = GroupSpec::finite(FiniteTable::cyclic(3).unwrap());
        assert_eq!(z3.ball(10).len(), 3);
        let s3 = GroupSpec::finite(FiniteTable::symmetric(3).unwrap());
        assert_eq!(s3.ball(10).len(), 6);
    }

    #[test]
    fn metric_examples() {
        let g = f2();
        let e = g.identity();
        assert_eq!(g.word_metric(&e, &e), 0);
        assert_eq!(g.word_metric(&w(&g, "a"), &w(&g, "a*b")), 1);
        assert_eq!(g.word_metric(&w(&g, "a*b"), &w(&g, "b*a")), 4);
        assert_eq!(bfs_distance(&g, &w(&g, "a*b"), &w(&g, "b*a")), 4);
        let s3 = GroupSpec::finite(FiniteTable::symmetric(3).unwrap());
        for a in s3.ball(3) {
            for b in s3.ball(3) {
                assert_eq!(s3.word_metric(&a, &b), bfs_distance(&s3, &a, &b));
            }
        }
    }

    #[test]
    fn invalid_tables_rejected() {
        assert!(FiniteTable::new(vec![], None).is_err());
        assert!(FiniteTable::new(vec![vec![0, 1], vec![1, 1]], None).is_err());
        // Latin square without associativity.
        let t = vec![vec![0, 1, 2], vec![1, 0, 2], vec![2, 2, 0]];
        assert!(FiniteTable::new(t, None).is_err());
        let nonassoc = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(FiniteTable::new(nonassoc, None).is_err());
        // Z/4 with generator 2 does not generate.
        let z4: Vec<Vec<usize>> = (0..4).map(|i| (0..4).map(|j| (i + j) % 4).collect()).collect();
        assert!(FiniteTable::new(z4.clone(), Some(vec![2])).is_err());
        assert!(FiniteTable::new(z4, Some(vec![1])).is_ok());
    }

    #[test]
    fn mismatched_family_is_an_error() {
        let g = f2();
        assert!(g.multiply(&Element::Vector(vec![1, 0]), &g.identity()).is_err());
        assert!(g.multiply(&Element::Word(vec![Letter::gen(5)]), &g.identity()).is_err());
        let unreduced = Element::Word(vec![Letter::gen(0), Letter::gen_inv(0)]);
        assert!(g.check(&unreduced).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = f2();
        let v = g.to_json();
        assert_eq!(GroupSpec::from_json(&v).unwrap(), g);
        let x = w(&g, "a*b^-1*a");
        assert_eq!(g.element_to_json(&x), json!("a*b^-1*a"));
        assert_eq!(g.element_from_json(&json!("a*b^-1*a")).unwrap(), x);
        let parsed = GroupSpec::from_json(&json!({"family": "finite", "table": [[0,1,2],[1,2,0],[2,0,1]]})).unwrap();
        assert_eq!(parsed.order(), Some(3));
        assert!(GroupSpec::from_json(&json!({"family": "free", "rank": 2, "generators": ["a"]})).is_err());
        assert_ne!(g.spec_hash(), GroupSpec::free(3).unwrap().spec_hash());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn word(rank: usize, max: usize) -> impl Strategy<Value = Element> {
            prop::collection::vec((0..rank, any::<bool>()), 0..max).prop_map(|ls| {
                Element::Word(reduce_word(ls.into_iter().map(|(g, inv)| Letter { generator: g, inverse: inv })))
            })
        }

        fn vector(rank: usize) -> impl Strategy<Value = Element> {
            prop::collection::vec(-20i64..20, rank).prop_map(Element::Vector)
        }

        fn check_group_laws(g: &GroupSpec, a: &Element, b: &Element, c: &Element) {
            assert_eq!(g.mul(&g.mul(a, b), c), g.mul(a, &g.mul(b, c)));
            assert_eq!(g.mul(a, &g.identity()), *a);
            assert_eq!(g.mul(&g.identity(), a), *a);
            assert_eq!(g.mul(a, &g.inverse(a)), g.identity());
            assert!(g.contains(&g.mul(a, b)));
            assert_eq!(g.word_metric(&g.mul(c, a), &g.mul(c, b)), g.word_metric(a, b));
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]
            #[test]
            fn free_laws(a in word(2, 12), b in word(2, 12), c in word(2, 12)) {
                check_group_laws(&GroupSpec::free(2).unwrap(), &a, &b, &c);
            }

            #[test]
            fn free_reduction_matches_naive(ls in prop::collection::vec((0usize..2, any::<bool>()), 0..24)) {
                let letters: Vec<Letter> = ls.into_iter().map(|(g, inv)| Letter { generator: g, inverse: inv }).collect();
                prop_assert_eq!(reduce_word(letters.clone()), naive_reduce(letters));
            }

            #[test]
            fn abelian_laws(a in vector(3), b in vector(3), c in vector(3)) {
                check_group_laws(&GroupSpec::free_abelian(3).unwrap(), &a, &b, &c);
            }

            #[test]
            fn finite_laws(a in 0usize..6, b in 0usize..6, c in 0usize..6) {
                let s3 = GroupSpec::finite(FiniteTable::symmetric(3).unwrap());
                check_group_laws(&s3, &Element::Index(a), &Element::Index(b), &Element::Index(c));
            }

            #[test]
            fn word_format_round_trip(a in word(3, 10)) {
                let g = GroupSpec::free(3).unwrap();
                prop_assert_eq!(g.parse_word(&g.format_element(&a)).unwrap(), a);
            }
        }
    }
}
