//! Library results against brute-force computations written from the
//! definitions, independent of the slice formulas used in the library.

use std::collections::{HashMap, VecDeque};

use homcert::amenability::{folner_search, lattice_box, reiter_ratio, FolnerCertificate, FolnerOutcome, Strategy};
use homcert::complexes::{johnson_cocycle, lift_of_one, tuples_over, BoundedCochain, Dual, EquivariantChain, Tuple};
use homcert::functions::{Coefficient, FinSuppFn};
use homcert::groups::{Element, FiniteTable, Group, GroupSpec, Letter};
use homcert::pairing::pair;
use homcert::rational::{int, ratio};
use homcert::sample::Sampler;
use homcert::witnesses::{flow_cycle, flow_value, verify_flow_cycle, FlowCycleSpec};
use homcert::Rational;

fn free2() -> Group {
    GroupSpec::free(2).unwrap().into_group()
}

fn sign(i: usize) -> Rational {
    if i.is_multiple_of(2) {
        int(1)
    } else {
        int(-1)
    }
}

/// `c(g_0, …, g_m) = g_0 · c(e, g_0⁻¹g_1, …, g_0⁻¹g_m)`.
fn full_chain_value<V: Coefficient>(c: &EquivariantChain<V>, full: &[Element]) -> V {
    let g = c.group();
    let h0 = &full[0];
    let rest: Tuple = full[1..].iter().map(|x| g.left_divide(h0, x)).collect();
    match c.get(&rest) {
        Some(v) => v.translate(g, h0),
        None => V::module_zero(),
    }
}

/// `∂c(e, t) = Σ_i (−1)^i Σ_x c(e, t with x inserted at position i)`, the
/// inner sum over every `x` that can meet the support.
fn brute_boundary<V: Coefficient>(c: &EquivariantChain<V>, t: &[Element]) -> V {
    let g = c.group();
    let xs = g.ball(c.support_radius());
    let mut base = vec![g.identity()];
    base.extend_from_slice(t);
    let mut total = V::module_zero();
    for i in 0..=base.len() {
        for x in &xs {
            let mut full = base.clone();
            full.insert(i, x.clone());
            total.add_scaled(&sign(i), &full_chain_value(c, &full));
        }
    }
    total
}

fn full_cochain_value(phi: &BoundedCochain<FinSuppFn>, full: &[Element]) -> FinSuppFn {
    let g = phi.group();
    let h0 = &full[0];
    let rest: Tuple = full[1..].iter().map(|x| g.left_divide(h0, x)).collect();
    phi.value_at(&rest).translate(g, h0)
}

/// `dφ(e, t) = Σ_i (−1)^i φ(e, t with the i-th entry removed)`.
fn brute_coboundary(phi: &BoundedCochain<FinSuppFn>, t: &[Element]) -> FinSuppFn {
    let mut full = vec![phi.group().identity()];
    full.extend_from_slice(t);
    let mut total = FinSuppFn::zero();
    for i in 0..full.len() {
        let mut face = full.clone();
        face.remove(i);
        total.add_scaled(&sign(i), &full_cochain_value(phi, &face));
    }
    total
}

#[test]
fn boundary_matches_definition() {
    for (gi, g) in [free2(), GroupSpec::free_abelian(2).unwrap().into_group()].into_iter().enumerate() {
        let mut s = Sampler::new(g.clone(), 1, 100 + gi as u64);
        for degree in 1..=3 {
            for _ in 0..6 {
                let c = s.bounded_chain(degree, 3);
                let lib = c.boundary().unwrap();
                let points = g.ball(2 * c.support_radius());
                let tuples = tuples_over(&points, degree - 1);
                for t in &tuples {
                    let expected = brute_boundary(&c, t);
                    let got = lib.get(t).cloned().unwrap_or_else(Coefficient::module_zero);
                    assert_eq!(got.normalized(), expected.normalized(), "degree {degree} at {t:?}");
                }
                assert!(lib.entries().all(|(t, _)| tuples.contains(t)));
            }
        }
    }
}

#[test]
fn scalar_boundary_matches_definition() {
    let g = GroupSpec::finite(FiniteTable::symmetric(3).unwrap()).into_group();
    let mut s = Sampler::new(g.clone(), 1, 5);
    let points = g.ball(1);
    for degree in 1..=3 {
        for _ in 0..5 {
            let c = s.scalar_chain(degree, 4);
            let lib = c.boundary().unwrap();
            for t in tuples_over(&points, degree - 1) {
                assert_eq!(lib.get(&t).cloned().unwrap_or_else(|| int(0)), brute_boundary(&c, &t));
            }
        }
    }
}

#[test]
fn coboundary_matches_definition() {
    for g in [free2(), GroupSpec::finite(FiniteTable::cyclic(4).unwrap()).into_group()] {
        let mut s = Sampler::new(g.clone(), 1, 9);
        let points = g.ball(2);
        for degree in 0..=2 {
            for dual in [Dual::Linfty, Dual::LinftyModConstants] {
                let phi = s.cochain(degree, 3, dual);
                let d = phi.coboundary();
                assert_eq!(d.dual(), dual);
                let tuples = if degree == 2 { tuples_over(&g.ball(1), 3) } else { tuples_over(&points, degree + 1) };
                for t in tuples {
                    assert_eq!(d.value_at(&t), brute_coboundary(&phi, &t));
                }
            }
        }
    }
}

#[test]
fn lift_coboundary_is_johnson() {
    let groups = [
        free2(),
        GroupSpec::free_abelian(2).unwrap().into_group(),
        GroupSpec::finite(FiniteTable::cyclic(3).unwrap()).into_group(),
    ];
    for g in groups {
        let d = lift_of_one(&g).coboundary();
        let j = johnson_cocycle(&g);
        for x in g.ball(3) {
            let expected = FinSuppFn::from_pairs([(x.clone(), int(1)), (g.identity(), int(-1))]);
            assert_eq!(d.value_at(std::slice::from_ref(&x)), expected);
            assert_eq!(j.value_at(std::slice::from_ref(&x)), expected);
            assert_eq!(brute_coboundary(&lift_of_one(&g), std::slice::from_ref(&x)), expected);
        }
    }
}

/// First edge of a geodesic from `e` to `target` in the Cayley graph, by BFS.
fn bfs_first_edge(g: &GroupSpec, target: &Element) -> Element {
    let gens = g.symmetric_generators();
    let e = g.identity();
    let mut parent: HashMap<Element, Element> = HashMap::from([(e.clone(), e.clone())]);
    let mut queue = VecDeque::from([e.clone()]);
    while let Some(x) = queue.pop_front() {
        if &x == target {
            break;
        }
        for s in &gens {
            let y = g.mul(&x, s);
            if !parent.contains_key(&y) {
                parent.insert(y.clone(), x.clone());
                queue.push_back(y);
            }
        }
    }
    let mut cur = target.clone();
    while parent[&cur] != e {
        cur = parent[&cur].clone();
    }
    cur
}

/// First edge of the geodesic from `e` to `x·a^N`, with `N = |x| + 2` so the
/// ray survives any cancellation against `x`.
fn bfs_edge_toward_ray(fs: &FlowCycleSpec, x: &Element) -> Element {
    let g = fs.group();
    let n = g.length(x) + 2;
    let target = g.mul(x, &Element::Word(vec![Letter::gen(fs.ray()); n]));
    bfs_first_edge(g, &target)
}

fn bfs_flow(fs: &FlowCycleSpec, s: &Element, x: &Element) -> u8 {
    u8::from(&bfs_edge_toward_ray(fs, x) == s)
}

#[test]
fn flow_matches_bfs_geodesics() {
    for (rank, ray, r) in [(2, "a", 3), (2, "b", 3), (3, "c", 2)] {
        let fs = FlowCycleSpec::free(rank, ray).unwrap();
        let g = fs.group();
        for x in g.ball(r) {
            let first = bfs_edge_toward_ray(&fs, &x);
            for s in g.symmetric_generators() {
                assert_eq!(flow_value(&fs, &s, &x).unwrap(), u8::from(first == s), "rank {rank} ray {ray}");
            }
        }
    }
}

#[test]
fn pairing_equals_direct_sum() {
    // ⟨J, c⟩ = Σ_s (c(e,s)(s) − c(e,s)(e)), each flow value read off a BFS geodesic.
    for (rank, expected) in [(2, 2), (3, 4)] {
        let fs = FlowCycleSpec::free(rank, "a").unwrap();
        let g = fs.group();
        let e = g.identity();
        let direct: i64 = g
            .symmetric_generators()
            .iter()
            .map(|s| i64::from(bfs_flow(&fs, s, s)) - i64::from(bfs_flow(&fs, s, &e)))
            .sum();
        assert_eq!(direct, expected);
        let c = flow_cycle(&fs);
        assert_eq!(pair(&johnson_cocycle(g), &c).unwrap(), int(direct));
        assert!(verify_flow_cycle(&fs, 3).passed);
    }
}

#[test]
fn box_ratios_closed_form() {
    let z2 = GroupSpec::free_abelian(2).unwrap();
    for n in 1..=40 {
        let set = lattice_box(2, n);
        assert_eq!(set.len(), n * n);
        let cert = FolnerCertificate::from_set(&z2, Strategy::Boxes, n, set.clone()).unwrap();
        assert_eq!(cert.ratio, ratio(8, n as i64));
        assert_eq!(reiter_ratio(&z2, &FinSuppFn::indicator(&set)).unwrap(), cert.ratio);
    }
    let z3 = GroupSpec::free_abelian(3).unwrap();
    let cert = FolnerCertificate::from_set(&z3, Strategy::Boxes, 5, lattice_box(3, 5)).unwrap();
    assert_eq!(cert.ratio, ratio(12, 5));
}

#[test]
fn ball_ratios_closed_form() {
    // |B(r)| = 2·3^r − 1 and |∂B(r)| = 4·3^r, so the ratio is 4 + 4/|B(r)|.
    let f2 = GroupSpec::free(2).unwrap();
    let FolnerOutcome::Exhausted(fail) = folner_search(&f2, &int(1), Strategy::Balls, 6).unwrap() else {
        panic!("F2 has no Følner balls");
    };
    for p in &fail.per_parameter {
        let size = 2 * 3i64.pow(p.parameter as u32) - 1;
        assert_eq!(p.set_size as i64, size);
        assert_eq!(p.ratio, int(4) + ratio(4, size));
    }
    let z2 = GroupSpec::free_abelian(2).unwrap();
    for r in 0..6 {
        assert_eq!(z2.ball(r).len(), 2 * r * r + 2 * r + 1);
    }
}
