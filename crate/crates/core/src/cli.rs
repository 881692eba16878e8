//! Command-line interface. Every subcommand prints one pretty-printed JSON
//! document to stdout (and to `--out` when given).
//!
//! Exit codes: 0 when the check passes, 2 when it ran and failed (for
//! example an exhausted Følner search), 1 on bad input.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::amenability::{
    finite_h0, folner_search, isoperimetric_min, reiter_ratio, symmetric_differences, FolnerOutcome, Strategy,
};
use crate::complexes::{
    fundamental_cycle, johnson_cocycle, lift_of_one, project_to_quotient, scalar_one_chain, scalar_one_cochain,
    BoundedCochain, Dual, EquivariantChain, Tuple,
};
use crate::error::{Error, Result};
use crate::functions::{BoundedFn, FinSuppFn, QuotientRep};
use crate::groups::{Group, GroupSpec};
use crate::pairing::{adjointness_check, PairingCertificate};
use crate::rational::{parse_rational, Rational};
use crate::sample::{test_groups, Sampler};
use crate::witnesses::{f2_report, flow_cycle, FlowCycleSpec};

#[derive(Debug, Parser)]
#[command(name = "homcert", version, about = "Exact homological certificates of (non-)amenability")]
pub struct Cli {
    /// Also write the JSON output to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify the boundary-flow cycle of a free group and certify ⟨J, c̄⟩.
    VerifyF2 {
        #[arg(long, default_value_t = 3)]
        radius: usize,
        /// Generator whose positive ray is the boundary point.
        #[arg(long, default_value = "a")]
        ray: String,
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
    /// Pair a cochain file with a chain file.
    Pair {
        #[arg(long)]
        cochain: PathBuf,
        #[arg(long)]
        cycle: PathBuf,
    },
    /// Search for a Følner set with ratio at most `eps`.
    Folner {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        eps: String,
        #[arg(long, value_enum, default_value_t = Strategy::Boxes)]
        strategy: Strategy,
        /// Largest radius or box side tried (default 6 for balls, 128 for boxes).
        #[arg(long)]
        max_radius: Option<usize>,
    },
    /// Reiter ratio of a finite set or nonnegative function.
    Reiter {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        set: PathBuf,
    },
    /// Decide whether 1 lies in span{g·v − v} for a finite group.
    FiniteH0 {
        #[arg(long)]
        group: PathBuf,
    },
    /// Exhaustive isoperimetric minimum over subsets of a ball.
    IsoMin {
        #[arg(long)]
        radius: usize,
        /// Group file; the free group of rank 2 when omitted.
        #[arg(long)]
        group: Option<PathBuf>,
    },
    /// Randomized checks of the complex axioms, adjointness and inflation.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instances per property.
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}

/// Parses `argv` (including the program name), runs, prints, and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok((doc, code)) => {
            let text = serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n";
            print!("{text}");
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return 1;
                }
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Runs a command and returns its JSON output with the exit code.
pub fn execute(command: &Command) -> Result<(Value, i32)> {
    match command {
        Command::VerifyF2 { radius, ray, rank } => {
            let fs = FlowCycleSpec::free(*rank, ray)?;
            let report = f2_report(&fs, *radius)?;
            let code = if report.passed() { 0 } else { 2 };
            let mut doc = serde_json::to_value(&report)?;
            doc["kind"] = json!("f2-flow-certificate");
            doc["value"] = json!(report.certificate.value_string());
            Ok((doc, code))
        }
        Command::Pair { cochain, cycle } => Ok((pair_files(cochain, cycle)?, 0)),
        Command::Folner { group, eps, strategy, max_radius } => {
            let g = load_group(group)?;
            let eps = parse_rational(eps)?;
            let max = max_radius.unwrap_or(match strategy {
                Strategy::Balls => 6,
                Strategy::Boxes => 128,
            });
            match folner_search(&g, &eps, *strategy, max)? {
                FolnerOutcome::Found(cert) => {
                    cert.verify(&g)?;
                    Ok((cert.to_json(&g), 0))
                }
                FolnerOutcome::Exhausted(fail) => {
                    let mut doc = serde_json::to_value(&fail)?;
                    doc["kind"] = json!("folner-failure");
                    Ok((doc, 2))
                }
            }
        }
        Command::Reiter { group, set } => {
            let g = load_group(group)?;
            let v = read_json(set)?;
            let (f, members) = match &v {
                Value::Array(items) => {
                    let members = items.iter().map(|x| g.element_from_json(x)).collect::<Result<Vec<_>>>()?;
                    (FinSuppFn::indicator(&members), Some(members))
                }
                Value::Object(o) => {
                    let coeffs = o
                        .get("coefficients")
                        .ok_or_else(|| Error::InvalidInput("expected a list of elements or {\"coefficients\": …}".into()))?;
                    (FinSuppFn::from_json(&g, coeffs)?, None)
                }
                _ => return Err(Error::InvalidInput("expected a list of elements or {\"coefficients\": …}".into())),
            };
            let ratio = reiter_ratio(&g, &f)?;
            let mut doc = json!({
                "kind": "reiter-ratio",
                "group_hash": g.spec_hash(),
                "support_size": f.len(),
                "l1_norm": crate::rational::format_rational(&f.l1_norm()),
                "ratio": crate::rational::format_rational(&ratio),
            });
            if let Some(members) = members {
                doc["symmetric_differences"] = symmetric_differences(&g, &members)
                    .into_iter()
                    .map(|(s, n)| json!([g.element_to_json(&s), n]))
                    .collect();
            }
            Ok((doc, 0))
        }
        Command::FiniteH0 { group } => {
            let g = load_group(group)?;
            let report = finite_h0(&g)?;
            let code = if report.one_in_span { 2 } else { 0 };
            let mut doc = serde_json::to_value(&report)?;
            doc["kind"] = json!("finite-h0-report");
            Ok((doc, code))
        }
        Command::IsoMin { radius, group } => {
            let g = match group {
                Some(p) => load_group(p)?,
                None => GroupSpec::free(2)?.into_group(),
            };
            Ok((isoperimetric_min(&g, *radius)?.to_json(&g), 0))
        }
        Command::Selftest { seed, cases } => {
            let report = selftest(*seed, *cases);
            let code = if report.passed() { 0 } else { 2 };
            Ok((serde_json::to_value(&report)?, code))
        }
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn load_group(path: &Path) -> Result<Group> {
    Ok(GroupSpec::from_json(&read_json(path)?)?.into_group())
}

fn group_field(doc: &Value) -> Result<Group> {
    let g = doc.get("group").ok_or_else(|| Error::InvalidInput("missing \"group\"".into()))?;
    Ok(GroupSpec::from_json(g)?.into_group())
}

fn degree_field(doc: &Value) -> Result<usize> {
    doc.get("degree")
        .and_then(Value::as_u64)
        .map(|d| d as usize)
        .ok_or_else(|| Error::InvalidInput("missing or invalid \"degree\"".into()))
}

fn parse_entries<W>(g: &Group, doc: &Value, value: impl Fn(&Value) -> Result<W>) -> Result<Vec<(Tuple, W)>> {
    let items = doc
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidInput("missing \"entries\" list".into()))?;
    items
        .iter()
        .map(|item| {
            let pair = item
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::InvalidInput(format!("entry must be [tuple, value]: {item}")))?;
            let t = pair[0]
                .as_array()
                .ok_or_else(|| Error::InvalidInput(format!("tuple must be a list: {}", pair[0])))?
                .iter()
                .map(|x| g.element_from_json(x))
                .collect::<Result<Tuple>>()?;
            Ok((t, value(&pair[1])?))
        })
        .collect()
}

fn rational_value(v: &Value) -> Result<Rational> {
    parse_rational(v.as_str().ok_or_else(|| Error::InvalidRational(v.to_string()))?)
}

/// A cochain read from a file, by value type.
enum LoadedCochain {
    Scalar(BoundedCochain<Rational>),
    Functional(BoundedCochain<FinSuppFn>),
}

/// A chain read from a file, by coefficient module.
enum LoadedChain {
    Scalar(EquivariantChain<Rational>),
    Bounded(EquivariantChain<BoundedFn>),
    Quotient(EquivariantChain<QuotientRep>),
}

/// `{"group": …, "builtin": "johnson" | "lift-of-one" | "one"}` or
/// `{"group": …, "dual": …, "degree": m, "entries": [[tuple, value], …]}`.
fn load_cochain(doc: &Value) -> Result<(String, LoadedCochain)> {
    let g = group_field(doc)?;
    if let Some(name) = doc.get("builtin").and_then(Value::as_str) {
        let c = match name {
            "johnson" => LoadedCochain::Functional(johnson_cocycle(&g)),
            "lift-of-one" => LoadedCochain::Functional(lift_of_one(&g)),
            "one" => LoadedCochain::Scalar(scalar_one_cochain(&g)),
            other => return Err(Error::InvalidInput(format!("unknown builtin cochain {other:?}"))),
        };
        return Ok((name.to_string(), c));
    }
    let dual: Dual = serde_json::from_value(doc.get("dual").cloned().unwrap_or(json!("scalar")))?;
    let degree = degree_field(doc)?;
    let id = doc.get("id").and_then(Value::as_str).unwrap_or("cochain").to_string();
    let c = match dual {
        Dual::Scalar => {
            LoadedCochain::Scalar(BoundedCochain::from_entries(g.clone(), degree, dual, parse_entries(&g, doc, rational_value)?)?)
        }
        _ => LoadedCochain::Functional(BoundedCochain::from_entries(
            g.clone(),
            degree,
            dual,
            parse_entries(&g, doc, |v| FinSuppFn::from_json(&g, v))?,
        )?),
    };
    Ok((id, c))
}

/// `{"group": …, "builtin": "flow-cycle" | "quotient-flow-cycle" | "fundamental" | "one", "ray": "a"}` or
/// `{"group": …, "coefficients": "scalar" | "linfty" | "linfty-mod-constants", "degree": m, "entries": […]}`.
fn load_chain(doc: &Value) -> Result<(String, LoadedChain)> {
    let g = group_field(doc)?;
    if let Some(name) = doc.get("builtin").and_then(Value::as_str) {
        let flow = || -> Result<EquivariantChain<BoundedFn>> {
            let ray = doc.get("ray").and_then(Value::as_str).unwrap_or("a");
            let idx = g
                .labels()
                .iter()
                .position(|l| l == ray)
                .ok_or_else(|| Error::InvalidInput(format!("unknown ray generator {ray:?}")))?;
            Ok(flow_cycle(&FlowCycleSpec::new(g.clone(), idx)?))
        };
        let c = match name {
            "flow-cycle" => LoadedChain::Bounded(flow()?),
            "quotient-flow-cycle" => LoadedChain::Quotient(project_to_quotient(&flow()?)),
            "fundamental" => LoadedChain::Bounded(fundamental_cycle(&g)),
            "one" => LoadedChain::Scalar(scalar_one_chain(&g)),
            other => return Err(Error::InvalidInput(format!("unknown builtin chain {other:?}"))),
        };
        return Ok((name.to_string(), c));
    }
    let coefficients: Dual = serde_json::from_value(doc.get("coefficients").cloned().unwrap_or(json!("scalar")))?;
    let degree = degree_field(doc)?;
    let id = doc.get("id").and_then(Value::as_str).unwrap_or("chain").to_string();
    let bounded = |v: &Value| BoundedFn::from_json(&g, v);
    let c = match coefficients {
        Dual::Scalar => LoadedChain::Scalar(EquivariantChain::from_entries(
            g.clone(),
            degree,
            parse_entries(&g, doc, rational_value)?,
        )?),
        Dual::Linfty => LoadedChain::Bounded(EquivariantChain::from_entries(g.clone(), degree, parse_entries(&g, doc, bounded)?)?),
        Dual::LinftyModConstants => LoadedChain::Quotient(EquivariantChain::from_entries(
            g.clone(),
            degree,
            parse_entries(&g, doc, |v| bounded(v).map(QuotientRep))?,
        )?),
    };
    Ok((id, c))
}

fn pair_files(cochain: &Path, cycle: &Path) -> Result<Value> {
    let (phi_id, phi) = load_cochain(&read_json(cochain)?)?;
    let (c_id, c) = load_chain(&read_json(cycle)?)?;
    let cert = match (&phi, &c) {
        (LoadedCochain::Scalar(phi), LoadedChain::Scalar(c)) => PairingCertificate::new(&phi_id, phi, &c_id, c)?,
        (LoadedCochain::Functional(phi), LoadedChain::Bounded(c)) => PairingCertificate::new(&phi_id, phi, &c_id, c)?,
        (LoadedCochain::Functional(phi), LoadedChain::Quotient(c)) => PairingCertificate::new(&phi_id, phi, &c_id, c)?,
        _ => return Err(Error::InvalidInput("cochain values cannot be paired with these chain coefficients".into())),
    };
    // J = d(g ↦ δ_g): recompute through the primitive on an ℓ∞ representative.
    let cert = match (phi_id.as_str(), &c) {
        ("johnson", LoadedChain::Bounded(c)) => {
            let w = adjointness_check(&lift_of_one(c.group()), c)?;
            cert.with_witness(w)
        }
        ("johnson", LoadedChain::Quotient(c)) => {
            let w = adjointness_check(&lift_of_one(c.group()), &c.map_values(|v| v.0.clone()))?;
            cert.with_witness(w)
        }
        _ => cert,
    };
    let mut doc = serde_json::to_value(&cert)?;
    doc["kind"] = json!("pairing-certificate");
    Ok(doc)
}

/// Outcome of one randomized property.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyTally {
    pub checked: usize,
    /// Instances where the quantities compared were not all zero.
    pub nontrivial: usize,
    pub failed: usize,
}

impl PropertyTally {
    fn record(&mut self, ok: bool, nontrivial: bool) {
        self.checked += 1;
        self.nontrivial += usize::from(nontrivial);
        self.failed += usize::from(!ok);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub boundary_squared: PropertyTally,
    pub coboundary_squared: PropertyTally,
    pub adjointness: PropertyTally,
    pub inflation_round_trip: PropertyTally,
    pub inflation_chain_map: PropertyTally,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        [
            &self.boundary_squared,
            &self.coboundary_squared,
            &self.adjointness,
            &self.inflation_round_trip,
            &self.inflation_chain_map,
        ]
        .iter()
        .all(|t| t.failed == 0 && t.checked > 0)
    }
}

/// Runs `cases` instances of each property, cycling through the sample groups.
pub fn selftest(seed: u64, cases: usize) -> SelftestReport {
    let groups = test_groups();
    let mut r = SelftestReport {
        seed,
        boundary_squared: PropertyTally::default(),
        coboundary_squared: PropertyTally::default(),
        adjointness: PropertyTally::default(),
        inflation_round_trip: PropertyTally::default(),
        inflation_chain_map: PropertyTally::default(),
    };
    for i in 0..cases {
        let g = groups[i % groups.len()].clone();
        let mut s = Sampler::new(g.clone(), 1, seed.wrapping_mul(1_000_003).wrapping_add(i as u64));

        let degree = 2 + i % 2;
        let c = s.bounded_chain(degree, 4);
        let dd = c.boundary().and_then(|b| b.boundary());
        r.boundary_squared.record(matches!(&dd, Ok(z) if z.is_zero()), !c.is_zero());

        let m = i % 2;
        let dual = [Dual::Linfty, Dual::LinftyModConstants][i / 2 % 2];
        let phi = s.cochain(m, 3, dual);
        let dphi = phi.coboundary();
        let ddphi = dphi.coboundary();
        let points = g.ball(1);
        let nontrivial = crate::complexes::tuples_over(&points, m + 1).iter().any(|t| !dphi.value_at(t).is_empty());
        let tuples = crate::complexes::tuples_over(&points, m + 2);
        r.coboundary_squared.record(tuples.iter().all(|t| ddphi.value_at(t).is_empty()), nontrivial);

        let m = i % 3;
        let (ok, nontrivial) = match i % 3 {
            0 => {
                let phi = s.cochain(m, 3, Dual::Linfty);
                let c = s.bounded_chain(m + 1, 3);
                witness_outcome(adjointness_check(&phi, &c))
            }
            1 => {
                let phi = s.cochain(m, 3, Dual::LinftyModConstants);
                let c = project_to_quotient(&s.bounded_chain(m + 1, 3));
                witness_outcome(adjointness_check(&phi, &c))
            }
            _ => {
                let phi = s.scalar_cochain(m, 3);
                let c = s.scalar_chain(m + 1, 3);
                witness_outcome(adjointness_check(&phi, &c))
            }
        };
        r.adjointness.record(ok, nontrivial);

        let degree = i % 4;
        let uf = s.uf_chain(degree, 4, 1);
        let back = crate::complexes::UfChain::deflate(&uf.inflate());
        r.inflation_round_trip.record(back.as_ref().is_ok_and(|b| b == &uf), !uf.is_empty());
        if degree > 0 {
            let lhs = uf.boundary().map(|b| b.inflate());
            let rhs = uf.inflate().boundary();
            let ok = matches!((&lhs, &rhs), (Ok(a), Ok(b)) if a == b);
            r.inflation_chain_map.record(ok, lhs.map(|a| !a.is_zero()).unwrap_or(false));
        }
    }
    r
}

fn witness_outcome(w: Result<crate::pairing::AdjointnessWitness>) -> (bool, bool) {
    match w {
        Ok(w) => (w.holds, !w.coboundary_side.is_zero()),
        Err(_) => (false, false),
    }
}
