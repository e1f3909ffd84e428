//! The multiplicity prediction for a compatible pair of special orthogonal
//! groups (even space q, odd space q′): the sign E(φ,φ′) computed by
//! bilinear expansion over a validated ±1 root-number table, the
//! distinguished pair of packet characters, and the closed-form pairing
//! m(φ,s;φ′,s′).
//!
//! The prediction is conditional on the standard parametrization
//! conjectures for these groups; emitted results are labelled accordingly
//! by the front end. The normalization constants of the underlying
//! character identities (c^{G′} = 1, γ^{G′} = μ(G′), γ^G = 1) are fixed by
//! that normalization and do not enter the computation.

use crate::error::{Error, Result};
use crate::padic::{hilbert, SquareClass};
use crate::quadspace::{mu, validate_gp_pair, QuadraticSpace};
use crate::rootnum::RootNumberTable;
use crate::wd::{
    component_group, epsilon_set, IrredDescriptor, PacketCharacter, ParamKind, WDParameter,
};

/// Outcome of the multiplicity prediction for one pair of parameters on one
/// pair of spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    e: i32,
    mu_gprime: i32,
    vanishing: bool,
    empty_packet: bool,
    distinguished: Option<(PacketCharacter, PacketCharacter)>,
}

impl Prediction {
    /// The sign E(φ,φ′).
    pub fn e(&self) -> i32 {
        self.e
    }

    /// μ(G′): +1 when the odd special orthogonal group is split.
    pub fn mu_gprime(&self) -> i32 {
        self.mu_gprime
    }

    /// True when E ≠ μ(G′): every multiplicity on these forms is zero.
    pub fn vanishing(&self) -> bool {
        self.vanishing
    }

    /// True when the signs match but a packet on these particular forms is
    /// empty, so the distinguished representation lives elsewhere. Distinct
    /// from vanishing-by-sign; unreachable for valid parameters (a −1 sign
    /// forces odd multiplicities on both sides, hence nonzero base points).
    pub fn empty_packet(&self) -> bool {
        self.empty_packet
    }

    /// The multiplicity-one index pair (𝛆, 𝛆′); present iff the prediction
    /// does not vanish and both packet sides are realized on these forms.
    pub fn distinguished(&self) -> Option<&(PacketCharacter, PacketCharacter)> {
        self.distinguished.as_ref()
    }
}

fn single_constituent(field: crate::padic::PrimeField, d: &IrredDescriptor) -> WDParameter {
    WDParameter::new(field, vec![(d.clone(), 1)], Vec::new())
        .expect("a self-dual constituent forms a parameter on its own")
}

/// E(φ,φ′) by bilinear expansion: the product over constituent pairs of
/// [(disc_i, −1)^{N′_{i′}/2} · ε(i,i′)]^{l_i·l_{i′}}, with θ-pair blocks
/// contributing +1 (their two members cancel against the central signs).
/// Every (item, item) pair of the two parameters must be covered by the
/// table.
pub fn big_e(
    phi: &WDParameter,
    phi_prime: &WDParameter,
    table: &RootNumberTable,
) -> Result<i32> {
    let m1 = SquareClass::minus_one(phi.field());
    let mut e = 1i32;
    for (d, l) in phi.items() {
        for (dp, lp) in phi_prime.items() {
            let entry = table.get(d.id(), dp.id()).ok_or_else(|| Error::MissingTableEntry {
                i: d.id().to_string(),
                iprime: dp.id().to_string(),
            })?;
            let mut pair = entry;
            if let Some(disc) = d.disc() {
                if dp.dim() % 2 != 0 {
                    return Err(Error::Validation(format!(
                        "pair ({}, {}): the discriminant twist needs an even dimension \
                         on the second side, got {}",
                        d.id(),
                        dp.id(),
                        dp.dim()
                    )));
                }
                if (dp.dim() / 2) % 2 == 1 {
                    pair *= hilbert(disc, m1)?;
                }
            }
            if (l * lp) % 2 == 1 {
                e *= pair;
            }
        }
    }
    Ok(e)
}

/// The distinguished characters: 𝛆 has bit i given by E(φ_i, φ′) over the
/// orthogonal basis of φ, and 𝛆′ has bit i′ given by E(φ, φ′_{i′}) over
/// the symplectic basis of φ′, both reduced to canonical form on their
/// component groups.
pub fn distinguished_chars(
    phi: &WDParameter,
    phi_prime: &WDParameter,
    table: &RootNumberTable,
) -> Result<(PacketCharacter, PacketCharacter)> {
    let group = component_group(phi, ParamKind::Orthogonal);
    let mut bits = Vec::with_capacity(group.rank());
    for id in group.ids() {
        let (d, _) = phi
            .items()
            .iter()
            .find(|(d, _)| d.id() == id)
            .expect("basis ids come from the parameter");
        let e_i = big_e(&single_constituent(phi.field(), d), phi_prime, table)?;
        bits.push(if e_i == 1 { 0 } else { 1 });
    }
    let eps = PacketCharacter::new(&group, bits)?;

    let group_prime = component_group(phi_prime, ParamKind::Symplectic);
    let mut bits_prime = Vec::with_capacity(group_prime.rank());
    for id in group_prime.ids() {
        let (dp, _) = phi_prime
            .items()
            .iter()
            .find(|(d, _)| d.id() == id)
            .expect("basis ids come from the parameter");
        let e_ip = big_e(phi, &single_constituent(phi.field(), dp), table)?;
        bits_prime.push(if e_ip == 1 { 0 } else { 1 });
    }
    let eps_prime = PacketCharacter::new(&group_prime, bits_prime)?;
    Ok((eps, eps_prime))
}

/// The full prediction for parameters (φ orthogonal for q, φ′ symplectic
/// for q′) on a compatible pair of spaces: vanishing iff E(φ,φ′) ≠ μ(G′),
/// and otherwise the distinguished character pair, which is checked to
/// satisfy 𝛆(z_φ) = 𝛆′(z_{φ′}) = E.
pub fn predict(
    phi: &WDParameter,
    phi_prime: &WDParameter,
    q: &QuadraticSpace,
    q_prime: &QuadraticSpace,
    nu0: SquareClass,
    table: &RootNumberTable,
) -> Result<Prediction> {
    validate_gp_pair(q, q_prime, nu0)?;
    if table.psi_conductor() != 0 {
        return Err(Error::Validation(format!(
            "predictions assume the default ψ convention (conductor 0), table declares {}",
            table.psi_conductor()
        )));
    }
    let violations = phi.validate(ParamKind::Orthogonal, q.dim(), Some(q.disc()));
    if !violations.is_empty() {
        return Err(Error::Validation(format!(
            "φ does not match the even space: {}",
            violations.join("; ")
        )));
    }
    let violations = phi_prime.validate(ParamKind::Symplectic, q_prime.dim() - 1, None);
    if !violations.is_empty() {
        return Err(Error::Validation(format!(
            "φ′ does not match the odd space: {}",
            violations.join("; ")
        )));
    }
    let mu_gprime = mu(q_prime)?;
    let e = big_e(phi, phi_prime, table)?;
    if e != mu_gprime {
        return Ok(Prediction {
            e,
            mu_gprime,
            vanishing: true,
            empty_packet: false,
            distinguished: None,
        });
    }
    let set_g = epsilon_set(phi, ParamKind::Orthogonal, e);
    let set_gprime = epsilon_set(phi_prime, ParamKind::Symplectic, e);
    if set_g.is_empty() || set_gprime.is_empty() {
        return Ok(Prediction {
            e,
            mu_gprime,
            vanishing: false,
            empty_packet: true,
            distinguished: None,
        });
    }
    let (eps, eps_prime) = distinguished_chars(phi, phi_prime, table)?;
    if !set_g.contains(&eps) {
        return Err(Error::Internal(
            "distinguished character fails 𝛆(z_φ) = E".into(),
        ));
    }
    if !set_gprime.contains(&eps_prime) {
        return Err(Error::Internal(
            "distinguished character fails 𝛆′(z_φ′) = E".into(),
        ));
    }
    Ok(Prediction {
        e,
        mu_gprime,
        vanishing: false,
        empty_packet: false,
        distinguished: Some((eps, eps_prime)),
    })
}

/// The pairing m(φ,s;φ′,s′) on component-group elements. In the split
/// branch (μ = +1) it is 𝛆(s)𝛆′(s′)(E+1)/2; in the non-split branch the
/// negated pairing is 𝛆(s)𝛆′(s′)(E−1)/2. Both collapse to
/// 𝛆(s)·𝛆′(s′)·(1+μE)/2, which is what the character-sum definition gives
/// on the 0/1 multiplicity matrix implied by the prediction.
pub fn m_pairing(
    phi: &WDParameter,
    s: &[u8],
    phi_prime: &WDParameter,
    s_prime: &[u8],
    prediction: &Prediction,
) -> Result<i64> {
    let group = component_group(phi, ParamKind::Orthogonal);
    if !group.contains(s) {
        return Err(Error::Validation(format!(
            "s = {s:?} is not an element of the rank-{} component group",
            group.rank()
        )));
    }
    let group_prime = component_group(phi_prime, ParamKind::Symplectic);
    if !group_prime.contains(s_prime) {
        return Err(Error::Validation(format!(
            "s′ = {s_prime:?} is not an element of the rank-{} component group",
            group_prime.rank()
        )));
    }
    match &prediction.distinguished {
        None => Ok(0),
        Some((eps, eps_prime)) => {
            let mass = (1 + prediction.mu_gprime * prediction.e) / 2;
            Ok(i64::from(eps.eval(s) * eps_prime.eval(s_prime) * mass))
        }
    }
}
