//! The duality pairing between bounded cochains and ℓ¹ chains.
//!
//! `⟨φ, c⟩ = Σ_{g_1, …, g_m} ⟨φ(e, g_1, …, g_m), c(e, g_1, …, g_m)⟩`, summed
//! over the finite slice support of `c`. The bar differential is adjoint to
//! the ℓ¹ boundary, `⟨dφ, c⟩ = ⟨φ, ∂c⟩`, which is what makes the pairing
//! descend to (co)homology; [`adjointness_check`] evaluates both sides
//! through their own code paths.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::complexes::{BoundedCochain, CochainValue, Dual, EquivariantChain};
use crate::error::{Error, Result};
use crate::functions::{Coefficient, PairsWith};
use crate::rational::{as_string, format_rational, Rational};

/// Chain-level pairing.
pub fn pair<W, V>(phi: &BoundedCochain<W>, c: &EquivariantChain<V>) -> Result<Rational>
where
    W: CochainValue + PairsWith<V>,
    V: Coefficient,
{
    if phi.degree() != c.degree() {
        return Err(Error::DegreeMismatch { expected: phi.degree(), found: c.degree() });
    }
    if phi.group() != c.group() {
        return Err(Error::InvalidInput("cochain and chain live on different groups".into()));
    }
    let mut total = Rational::zero();
    for (t, v) in c.entries() {
        let w = phi.value_at(t);
        if phi.dual() == Dual::LinftyModConstants && !w.annihilates_constants() {
            return Err(Error::NotZeroSum(format!("{w:?}")));
        }
        total += w.pair_with(v)?;
    }
    Ok(total)
}

/// Both sides of `⟨dφ, c⟩ = ⟨φ, ∂c⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjointnessWitness {
    /// `⟨dφ, c⟩`.
    #[serde(with = "as_string")]
    pub coboundary_side: Rational,
    /// `⟨φ, ∂c⟩`.
    #[serde(with = "as_string")]
    pub boundary_side: Rational,
    pub holds: bool,
}

/// Evaluates `⟨dφ, c⟩` and `⟨φ, ∂c⟩` for `φ` of degree `m` and `c` of degree `m + 1`.
pub fn adjointness_check<W, V>(phi: &BoundedCochain<W>, c: &EquivariantChain<V>) -> Result<AdjointnessWitness>
where
    W: CochainValue + PairsWith<V>,
    V: Coefficient,
{
    if c.degree() != phi.degree() + 1 {
        return Err(Error::DegreeMismatch { expected: phi.degree() + 1, found: c.degree() });
    }
    let coboundary_side = pair(&phi.coboundary(), c)?;
    let boundary_side = pair(phi, &c.boundary()?)?;
    let holds = coboundary_side == boundary_side;
    Ok(AdjointnessWitness { coboundary_side, boundary_side, holds })
}

/// A pairing value between a named cochain and a named cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingCertificate {
    pub cochain_id: String,
    pub cycle_id: String,
    /// Largest word length of an element in the cycle's slice support; every
    /// evaluation of the cochain happens inside this ball.
    pub truncation_radius: usize,
    #[serde(with = "as_string")]
    pub value: Rational,
    /// Present when the cochain is known as a coboundary `dψ`: the pairing
    /// recomputed as `⟨ψ, ∂c⟩`.
    pub adjointness_witness: Option<AdjointnessWitness>,
    pub group_hash: String,
}

impl PairingCertificate {
    /// Pairs `phi` with `c`; attach an adjointness witness with
    /// [`PairingCertificate::with_witness`] when a primitive of `phi` is known.
    pub fn new<W, V>(
        cochain_id: impl Into<String>,
        phi: &BoundedCochain<W>,
        cycle_id: impl Into<String>,
        c: &EquivariantChain<V>,
    ) -> Result<Self>
    where
        W: CochainValue + PairsWith<V>,
        V: Coefficient,
    {
        Ok(PairingCertificate {
            cochain_id: cochain_id.into(),
            cycle_id: cycle_id.into(),
            truncation_radius: c.support_radius(),
            value: pair(phi, c)?,
            adjointness_witness: None,
            group_hash: c.group().spec_hash(),
        })
    }

    /// Records `w`. The witness only holds for this certificate if its
    /// coboundary side equals the certified value.
    pub fn with_witness(mut self, w: AdjointnessWitness) -> Self {
        let holds = w.holds && w.coboundary_side == self.value;
        self.adjointness_witness = Some(AdjointnessWitness { holds, ..w });
        self
    }

    pub fn value_string(&self) -> String {
        format_rational(&self.value)
    }
}
