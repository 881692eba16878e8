//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;

use homcert::amenability::{
    finite_h0, folner_search, isoperimetric_min, lattice_box, reiter_ratio, FolnerOutcome, Strategy,
};
use homcert::complexes::{johnson_cocycle, lift_of_one, project_to_quotient, tuples_over, Dual, UfChain};
use homcert::functions::FinSuppFn;
use homcert::groups::{Element, FiniteTable, Group, GroupSpec, Letter};
use homcert::pairing::adjointness_check;
use homcert::rational::{int, ratio};
use homcert::sample::{test_groups, Sampler};
use homcert::witnesses::{perturbed_flow, verify_flow_cycle_with, FlowCycleSpec};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn free2() -> Group {
    GroupSpec::free(2).unwrap().into_group()
}

fn finite(t: FiniteTable) -> Group {
    GroupSpec::finite(t).into_group()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_homcert"))
        .args(["verify-f2", "--radius", "4"])
        .output()
        .expect("binary runs");
    let elapsed = start.elapsed();
    let Ok(v) = serde_json::from_slice::<Value>(&out.stdout) else {
        return outcome(false, "verify-f2 did not print JSON");
    };
    let ver = &v["verification"];
    let witness = &v["certificate"]["adjointness_witness"];
    let checks = [
        ("exit code 0", out.status.code() == Some(0)),
        ("outgoing sums = 1", ver["outgoing_ok"] == true && ver["expected_outgoing"] == 1),
        ("incoming sums = 3", ver["incoming_ok"] == true && ver["expected_incoming"] == 3),
        ("∂c = 2 from the sums", ver["boundary_ok"] == true && ver["expected_boundary"] == 2),
        ("∂c = 2 from the boundary operator", ver["library_boundary_ok"] == true),
        ("all pairs in ball(4)²", ver["pairs_checked"] == 161 * 161),
        ("pairing = 2/1", v["value"] == "2/1" && v["certificate"]["value"] == "2/1"),
        ("⟨δ_e, ∂c⟩ = 2/1", witness["holds"] == true && witness["boundary_side"] == "2/1"),
        ("⟨[1], [2]⟩ = 2/1", v["scalar_route_value"] == "2/1"),
        ("under 10 s", elapsed < Duration::from_secs(10)),
    ];
    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    outcome(
        failed.is_empty(),
        format!("verify-f2 --radius 4: 161² point pairs, value {} in {elapsed:.2?} {failed:?}", v["value"]),
    )
}

fn criterion_2() -> Outcome {
    let groups = [
        ("free(2)", free2()),
        ("free-abelian(2)", GroupSpec::free_abelian(2).unwrap().into_group()),
        ("Z/3", finite(FiniteTable::cyclic(3).unwrap())),
    ];
    let mut slices = 0;
    let mut bad = Vec::new();
    for (name, g) in &groups {
        let d = lift_of_one(g).coboundary();
        let j = johnson_cocycle(g);
        for x in g.ball(3) {
            let expected = FinSuppFn::from_pairs([(x.clone(), int(1)), (g.identity(), int(-1))]);
            let t = [x];
            slices += 1;
            if d.value_at(&t) != expected || j.value_at(&t) != expected {
                bad.push(*name);
            }
        }
    }
    bad.dedup();
    outcome(bad.is_empty(), format!("d(g ↦ δ_g) = J on {slices} ball(3) slices; mismatches in {bad:?}"))
}

fn criterion_3() -> Outcome {
    let groups = test_groups();
    let (mut bd, mut cobd, mut failures) = (0, 0, 0);
    for i in 0..500u64 {
        let g = groups[i as usize % groups.len()].clone();
        let mut s = Sampler::new(g.clone(), 1, 3_000 + i);
        let degree = 2 + i as usize % 2;
        let ok = if i % 3 == 0 {
            let c = s.scalar_chain(degree, 4);
            c.boundary().and_then(|b| b.boundary()).map(|z| z.is_zero()).unwrap_or(false)
        } else {
            let c = s.bounded_chain(degree, 4);
            c.boundary().and_then(|b| b.boundary()).map(|z| z.is_zero()).unwrap_or(false)
        };
        bd += 1;
        failures += usize::from(!ok);

        // dφ for φ of degree ≤ 1 lands in degree ≤ 3 after two steps.
        let m = i as usize % 2;
        let points = g.ball(1);
        let ok = match i % 3 {
            0 => {
                let dd = s.scalar_cochain(m, 3).coboundary().coboundary();
                tuples_over(&points, m + 2).iter().all(|t| dd.value_at(t) == int(0))
            }
            1 => {
                let dd = s.cochain(m, 3, Dual::Linfty).coboundary().coboundary();
                tuples_over(&points, m + 2).iter().all(|t| dd.value_at(t).is_empty())
            }
            _ => {
                let dd = s.cochain(m, 3, Dual::LinftyModConstants).coboundary().coboundary();
                tuples_over(&points, m + 2).iter().all(|t| dd.value_at(t).is_empty())
            }
        };
        cobd += 1;
        failures += usize::from(!ok);
    }
    outcome(failures == 0, format!("{bd} ∂∂ and {cobd} dd checks in degrees ≤ 3, {failures} failures"))
}

fn criterion_4() -> Outcome {
    let groups = test_groups();
    let (mut checked, mut nonzero, mut failures) = (0, 0, 0);
    for i in 0..600u64 {
        let g = groups[i as usize % groups.len()].clone();
        let mut s = Sampler::new(g, 1, 4_000 + i);
        let m = i as usize % 3;
        let w = match i % 3 {
            0 => adjointness_check(&s.cochain(m, 3, Dual::Linfty), &s.bounded_chain(m + 1, 3)),
            1 => adjointness_check(
                &s.cochain(m, 3, Dual::LinftyModConstants),
                &project_to_quotient(&s.bounded_chain(m + 1, 3)),
            ),
            _ => adjointness_check(&s.scalar_cochain(m, 3), &s.scalar_chain(m + 1, 3)),
        };
        checked += 1;
        match w {
            Ok(w) if w.holds => nonzero += usize::from(w.coboundary_side != int(0)),
            _ => failures += 1,
        }
    }
    outcome(
        failures == 0 && checked >= 500,
        format!("⟨dφ, c⟩ = ⟨φ, ∂c⟩ on {checked} instances ({nonzero} nonzero), {failures} failures"),
    )
}

fn criterion_5() -> Outcome {
    let groups = test_groups();
    let (mut trips, mut maps, mut failures) = (0, 0, 0);
    for i in 0..240u64 {
        let g = groups[i as usize % groups.len()].clone();
        let mut s = Sampler::new(g, 2, 5_000 + i);
        let degree = i as usize % 4;
        let uf = s.uf_chain(degree, 5, 1 + i as usize % 2);
        trips += 1;
        if UfChain::deflate(&uf.inflate()).ok().as_ref() != Some(&uf) {
            failures += 1;
        }
        let uf = s.uf_chain(1 + degree % 3, 5, 1);
        maps += 1;
        let lhs = uf.boundary().map(|b| b.inflate());
        let rhs = uf.inflate().boundary();
        if !matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b) {
            failures += 1;
        }
    }
    outcome(
        failures == 0 && trips >= 200 && maps >= 200,
        format!("{trips} deflate∘inflate round trips, {maps} chain-map checks, {failures} failures"),
    )
}

fn criterion_6() -> Outcome {
    let z2 = GroupSpec::free_abelian(2).unwrap();
    let found = match folner_search(&z2, &ratio(1, 10), Strategy::Boxes, 128) {
        Ok(FolnerOutcome::Found(c)) => c.verify(&z2).is_ok() && c.parameter == 80 && c.ratio <= ratio(1, 10),
        _ => false,
    };
    let ratios: Vec<_> = (2..=64)
        .map(|n| reiter_ratio(&z2, &FinSuppFn::indicator(&lattice_box(2, n))).unwrap())
        .collect();
    let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    let groups = [
        ("Z/3", finite(FiniteTable::cyclic(3).unwrap())),
        ("Z/5", finite(FiniteTable::cyclic(5).unwrap())),
        ("S3", finite(FiniteTable::symmetric(3).unwrap())),
    ];
    let h0: Vec<(&str, bool)> = groups
        .iter()
        .map(|(n, g)| (*n, finite_h0(g).map(|r| !r.one_in_span && r.span_dimension == r.group_size - 1).unwrap_or(false)))
        .collect();
    let h0_ok = h0.iter().all(|(_, ok)| *ok);
    outcome(
        found && decreasing && h0_ok,
        format!("Z² box side 80 at ratio 1/10: {found}; sides 2..64 strictly decreasing: {decreasing}; 1 ∉ span: {h0:?}"),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let r = isoperimetric_min(&free2(), 2);
    let elapsed = start.elapsed();
    match r {
        Ok(m) => outcome(
            m.min_ratio == ratio(72, 17) && m.min_ratio >= int(4) && m.subsets_checked == (1 << 17) - 1
                && elapsed < Duration::from_secs(60),
            format!("min over {} subsets of ball(2) = {} in {elapsed:.2?}", m.subsets_checked, m.min_ratio),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn criterion_8() -> Outcome {
    let fs = FlowCycleSpec::f2();
    let g = fs.group();
    let points: Vec<(Letter, Element)> = vec![
        (Letter::gen(0), g.identity()),
        (Letter::gen(1), g.parse_word("b").unwrap()),
        (Letter::gen(1), g.parse_word("b*a^-3").unwrap()),
        (Letter::gen_inv(0), g.parse_word("a^-1*b^-1*a^-1*b").unwrap()),
    ];
    let baseline = verify_flow_cycle_with(&fs, 4, |s, x| {
        u8::from(homcert::functions::ray_first_letter(x.as_word().unwrap(), fs.ray()) == *s)
    });
    let detected: Vec<bool> = points
        .into_iter()
        .map(|at| {
            let v = verify_flow_cycle_with(&fs, 4, perturbed_flow(&fs, at));
            !v.passed && !v.failures.is_empty()
        })
        .collect();
    outcome(
        baseline.passed && detected.iter().all(|d| *d),
        format!("unperturbed passes: {}; single-value perturbations detected: {detected:?}", baseline.passed),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("F2 flow witness", criterion_1),
        ("connecting-map identity", criterion_2),
        ("complex axioms", criterion_3),
        ("adjointness", criterion_4),
        ("inflation isomorphism", criterion_5),
        ("amenable side", criterion_6),
        ("isoperimetric oracle", criterion_7),
        ("negative control", criterion_8),
    ];
    let mut all = true;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        all &= o.passed;
        println!("{} criterion {} ({name}): {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    if !all {
        std::process::exit(1);
    }
}
