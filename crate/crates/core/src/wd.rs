//! Formal tempered parameters for orthogonal and symplectic dual groups:
//! multiplicity lists of opaque irreducible descriptors, their component
//! groups with the determinant constraint, the base point z, packet-indexing
//! characters, and the α-twisting character.
//!
//! Irreducible constituents are never realized as actual Galois–Weil
//! homomorphisms; everything downstream depends only on the tuple
//! (dimension, self-duality type, discriminant, central sign), so that is
//! all a descriptor stores.

use crate::error::{Error, Result};
use crate::padic::{hilbert, PrimeField, SquareClass};

/// Self-duality type of an irreducible constituent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelfDuality {
    Orthogonal,
    Symplectic,
    NotSelfDual,
}

/// An opaque irreducible constituent: label, dimension, self-duality type,
/// discriminant character (orthogonal type only) and the value of the
/// central character at −1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrredDescriptor {
    id: String,
    dim: usize,
    kind: SelfDuality,
    disc: Option<SquareClass>,
    central_sign: i32,
}

impl IrredDescriptor {
    pub fn new(
        id: impl Into<String>,
        dim: usize,
        kind: SelfDuality,
        disc: Option<SquareClass>,
        central_sign: i32,
    ) -> Result<Self> {
        let id = id.into();
        if dim == 0 {
            return Err(Error::Validation(format!("constituent {id} has dimension 0")));
        }
        if central_sign != 1 && central_sign != -1 {
            return Err(Error::Validation(format!(
                "constituent {id} has central sign {central_sign}, expected ±1"
            )));
        }
        match kind {
            SelfDuality::Symplectic => {
                if dim % 2 != 0 {
                    return Err(Error::Validation(format!(
                        "symplectic constituent {id} must have even dimension, got {dim}"
                    )));
                }
                if disc.is_some() {
                    return Err(Error::Validation(format!(
                        "symplectic constituent {id} carries no discriminant"
                    )));
                }
                // Central characters on the symplectic side are trivial.
                if central_sign != 1 {
                    return Err(Error::Validation(format!(
                        "symplectic constituent {id} must have central sign +1"
                    )));
                }
            }
            SelfDuality::Orthogonal => {
                let d = disc.ok_or_else(|| {
                    Error::Validation(format!(
                        "orthogonal constituent {id} requires a discriminant"
                    ))
                })?;
                if dim == 1 && central_sign != hilbert(d, SquareClass::minus_one(d.field()))? {
                    return Err(Error::Validation(format!(
                        "1-dimensional constituent {id} must have central sign (disc, −1)"
                    )));
                }
            }
            SelfDuality::NotSelfDual => {
                if disc.is_some() {
                    return Err(Error::Validation(format!(
                        "non-self-dual constituent {id} carries no discriminant"
                    )));
                }
            }
        }
        Ok(IrredDescriptor {
            id,
            dim,
            kind,
            disc,
            central_sign,
        })
    }

    /// The quadratic character attached to a square class: 1-dimensional,
    /// orthogonal, with the forced central sign (disc, −1).
    pub fn quadratic_char(id: impl Into<String>, delta: SquareClass) -> Self {
        let sign = hilbert(delta, SquareClass::minus_one(delta.field()))
            .expect("same-field classes");
        IrredDescriptor {
            id: id.into(),
            dim: 1,
            kind: SelfDuality::Orthogonal,
            disc: Some(delta),
            central_sign: sign,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> SelfDuality {
        self.kind
    }

    pub fn disc(&self) -> Option<SquareClass> {
        self.disc
    }

    pub fn central_sign(&self) -> i32 {
        self.central_sign
    }
}

/// Which classical dual group a parameter is read against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Orthogonal,
    Symplectic,
}

/// A formal tempered parameter: self-dual constituents with multiplicities,
/// plus pairs (non-self-dual constituent ⊕ its twist) entering with both
/// members at once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WDParameter {
    field: PrimeField,
    items: Vec<(IrredDescriptor, usize)>,
    theta_pairs: Vec<(IrredDescriptor, usize)>,
}

impl WDParameter {
    pub fn new(
        field: PrimeField,
        items: Vec<(IrredDescriptor, usize)>,
        theta_pairs: Vec<(IrredDescriptor, usize)>,
    ) -> Result<Self> {
        let mut seen: Vec<&str> = Vec::new();
        for (d, l) in items.iter().chain(theta_pairs.iter()) {
            if *l == 0 {
                return Err(Error::Validation(format!(
                    "constituent {} has multiplicity 0",
                    d.id
                )));
            }
            if seen.contains(&d.id.as_str()) {
                return Err(Error::Validation(format!(
                    "constituent id {} appears twice",
                    d.id
                )));
            }
            seen.push(d.id.as_str());
            if let Some(disc) = d.disc {
                if disc.field() != field {
                    return Err(Error::PrimeMismatch(field.p(), disc.field().p()));
                }
            }
        }
        for (d, _) in &items {
            if d.kind == SelfDuality::NotSelfDual {
                return Err(Error::Validation(format!(
                    "non-self-dual constituent {} must enter through a θ-pair",
                    d.id
                )));
            }
        }
        for (d, _) in &theta_pairs {
            if d.kind != SelfDuality::NotSelfDual {
                return Err(Error::Validation(format!(
                    "self-dual constituent {} cannot enter through a θ-pair",
                    d.id
                )));
            }
        }
        Ok(WDParameter {
            field,
            items,
            theta_pairs,
        })
    }

    pub fn empty(field: PrimeField) -> Self {
        WDParameter {
            field,
            items: Vec::new(),
            theta_pairs: Vec::new(),
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn items(&self) -> &[(IrredDescriptor, usize)] {
        &self.items
    }

    pub fn theta_pairs(&self) -> &[(IrredDescriptor, usize)] {
        &self.theta_pairs
    }

    /// Total dimension Σ l_i·N_i + 2·Σ l_j·N_j.
    pub fn dim(&self) -> usize {
        let direct: usize = self.items.iter().map(|(d, l)| d.dim * l).sum();
        let paired: usize = self.theta_pairs.iter().map(|(d, l)| d.dim * l).sum();
        direct + 2 * paired
    }

    /// Kind-dependent validity: a list of violations, empty when the
    /// parameter is a valid `kind`-parameter of the target dimension (and
    /// discriminant, for the orthogonal kind).
    pub fn validate(
        &self,
        kind: ParamKind,
        n_target: usize,
        delta_target: Option<SquareClass>,
    ) -> Vec<String> {
        let mut violations = Vec::new();
        if self.dim() != n_target {
            violations.push(format!(
                "dimension is {}, target is {n_target}",
                self.dim()
            ));
        }
        // Constituents of the opposite self-duality must come in pairs.
        let opposite = match kind {
            ParamKind::Orthogonal => SelfDuality::Symplectic,
            ParamKind::Symplectic => SelfDuality::Orthogonal,
        };
        for (d, l) in &self.items {
            if d.kind == opposite && l % 2 != 0 {
                violations.push(format!(
                    "constituent {} of the opposite type has odd multiplicity {l}",
                    d.id
                ));
            }
        }
        if let Some(target) = delta_target {
            if kind == ParamKind::Orthogonal {
                let delta = self.delta_of();
                if delta != target {
                    violations.push(format!(
                        "discriminant is {delta}, target is {target}"
                    ));
                }
            }
        }
        violations
    }

    /// The discriminant class Π disc_i^{l_i} over orthogonal constituents;
    /// symplectic constituents and θ-pairs have trivial determinant.
    pub fn delta_of(&self) -> SquareClass {
        let mut acc = SquareClass::one(self.field);
        for (d, l) in &self.items {
            if let Some(disc) = d.disc {
                if l % 2 == 1 {
                    acc = acc * disc;
                }
            }
        }
        acc
    }

    /// Direct sum, merging constituents with equal ids (which must agree as
    /// descriptors) by adding multiplicities.
    pub fn direct_sum(&self, other: &WDParameter) -> Result<WDParameter> {
        if self.field != other.field {
            return Err(Error::PrimeMismatch(self.field.p(), other.field.p()));
        }
        fn merge(
            a: &[(IrredDescriptor, usize)],
            b: &[(IrredDescriptor, usize)],
        ) -> Result<Vec<(IrredDescriptor, usize)>> {
            let mut out: Vec<(IrredDescriptor, usize)> = a.to_vec();
            for (d, l) in b {
                if let Some(slot) = out.iter_mut().find(|(e, _)| e.id == d.id) {
                    if slot.0 != *d {
                        return Err(Error::Validation(format!(
                            "constituent id {} has conflicting descriptors",
                            d.id
                        )));
                    }
                    slot.1 += l;
                } else {
                    out.push((d.clone(), *l));
                }
            }
            Ok(out)
        }
        Ok(WDParameter {
            field: self.field,
            items: merge(&self.items, &other.items)?,
            theta_pairs: merge(&self.theta_pairs, &other.theta_pairs)?,
        })
    }

    /// φ ⊕ 1: appends the trivial quadratic character with multiplicity 1,
    /// turning a symplectic parameter into an orthogonal one of dimension
    /// N + 1 with trivial discriminant.
    pub fn augment(&self) -> Result<WDParameter> {
        if self.items.iter().any(|(d, _)| d.id == "1")
            || self.theta_pairs.iter().any(|(d, _)| d.id == "1")
        {
            return Err(Error::Validation(
                "parameter already contains a constituent with id \"1\"".into(),
            ));
        }
        let mut items = self.items.clone();
        items.push((
            IrredDescriptor::quadratic_char("1", SquareClass::one(self.field)),
            1,
        ));
        Ok(WDParameter {
            field: self.field,
            items,
            theta_pairs: self.theta_pairs.clone(),
        })
    }
}

/// The component group of a parameter: an elementary abelian 2-group on the
/// matching-type constituents, cut by the determinant constraint (sum of
/// coordinates over odd-dimensional constituents is even) exactly for
/// even-dimensional orthogonal parameters, together with the base point
/// z = (l_i mod 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentGroup {
    ids: Vec<String>,
    dims: Vec<usize>,
    constrained: bool,
    z: Vec<u8>,
}

impl ComponentGroup {
    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn rank(&self) -> usize {
        self.ids.len()
    }

    pub fn z(&self) -> &[u8] {
        &self.z
    }

    pub fn is_constrained(&self) -> bool {
        self.constrained
    }

    /// Coordinates that enter the determinant constraint (odd dimension).
    pub fn imp_flags(&self) -> Vec<bool> {
        self.dims.iter().map(|d| d % 2 == 1).collect()
    }

    fn satisfies_constraint(&self, e: &[u8]) -> bool {
        if !self.constrained {
            return true;
        }
        let s: u32 = e
            .iter()
            .zip(self.imp_flags())
            .filter(|(_, imp)| *imp)
            .map(|(&b, _)| u32::from(b))
            .sum();
        s % 2 == 0
    }

    pub fn contains(&self, e: &[u8]) -> bool {
        e.len() == self.rank() && e.iter().all(|&b| b <= 1) && self.satisfies_constraint(e)
    }

    /// All group elements, as bit vectors over the basis.
    pub fn elements(&self) -> Vec<Vec<u8>> {
        let n = self.rank();
        (0u32..(1 << n))
            .map(|mask| (0..n).map(|b| ((mask >> b) & 1) as u8).collect::<Vec<u8>>())
            .filter(|e| self.satisfies_constraint(e))
            .collect()
    }

    pub fn order(&self) -> u64 {
        self.elements().len() as u64
    }
}

/// Component group of a parameter read with the given kind.
pub fn component_group(param: &WDParameter, kind: ParamKind) -> ComponentGroup {
    let matching = match kind {
        ParamKind::Orthogonal => SelfDuality::Orthogonal,
        ParamKind::Symplectic => SelfDuality::Symplectic,
    };
    let mut ids = Vec::new();
    let mut dims = Vec::new();
    let mut z = Vec::new();
    for (d, l) in param.items() {
        if d.kind() == matching {
            ids.push(d.id().to_string());
            dims.push(d.dim());
            z.push((l % 2) as u8);
        }
    }
    let constrained = kind == ParamKind::Orthogonal && param.dim() % 2 == 0;
    ComponentGroup {
        ids,
        dims,
        constrained,
        z,
    }
}

/// A character of a component group, stored by its bits on the ambient
/// basis: ε(e) = (−1)^{Σ bits·e}. On a constrained group, bit vectors
/// differing by the all-ones pattern on the constrained coordinates define
/// the same character; [`canonicalize`](PacketCharacter::canonicalize)
/// picks one representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PacketCharacter {
    ids: Vec<String>,
    bits: Vec<u8>,
}

impl PacketCharacter {
    pub fn new(group: &ComponentGroup, bits: Vec<u8>) -> Result<Self> {
        if bits.len() != group.rank() || bits.iter().any(|&b| b > 1) {
            return Err(Error::Validation(
                "character bits must be one 0/1 per basis element".into(),
            ));
        }
        Ok(PacketCharacter {
            ids: group.ids().to_vec(),
            bits,
        }
        .canonicalize(group))
    }

    pub fn trivial(group: &ComponentGroup) -> Self {
        PacketCharacter {
            ids: group.ids().to_vec(),
            bits: vec![0; group.rank()],
        }
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn bit_for(&self, id: &str) -> Option<u8> {
        self.ids
            .iter()
            .position(|i| i == id)
            .map(|k| self.bits[k])
    }

    /// Value of the character at a group element.
    pub fn eval(&self, e: &[u8]) -> i32 {
        assert_eq!(e.len(), self.bits.len(), "element in the wrong group");
        let s: u32 = self
            .bits
            .iter()
            .zip(e)
            .map(|(&b, &x)| u32::from(b) * u32::from(x))
            .sum();
        if s % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// The canonical representative of this character as a function on the
    /// group: if the group is constrained and has constrained coordinates,
    /// the representative has bit 0 at the first of them.
    pub fn canonicalize(mut self, group: &ComponentGroup) -> Self {
        if !group.is_constrained() {
            return self;
        }
        let imp = group.imp_flags();
        if let Some(first) = imp.iter().position(|&f| f) {
            if self.bits[first] == 1 {
                for (k, flag) in imp.iter().enumerate() {
                    if *flag {
                        self.bits[k] ^= 1;
                    }
                }
            }
        }
        self
    }

    /// Pointwise product of characters over the same basis.
    pub fn product(&self, other: &PacketCharacter, group: &ComponentGroup) -> PacketCharacter {
        assert_eq!(self.ids, other.ids, "characters over different bases");
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(&a, &b)| a ^ b)
            .collect();
        PacketCharacter {
            ids: self.ids.clone(),
            bits,
        }
        .canonicalize(group)
    }
}

/// All characters of the component group with ε(z) = mu. When z = 0 this is
/// the full dual group for mu = +1 and empty for mu = −1.
pub fn epsilon_set(param: &WDParameter, kind: ParamKind, mu: i32) -> Vec<PacketCharacter> {
    assert!(mu == 1 || mu == -1, "mu must be ±1");
    let group = component_group(param, kind);
    let n = group.rank();
    let mut out: Vec<PacketCharacter> = Vec::new();
    for mask in 0u32..(1 << n) {
        let bits: Vec<u8> = (0..n).map(|b| ((mask >> b) & 1) as u8).collect();
        let ch = PacketCharacter {
            ids: group.ids().to_vec(),
            bits,
        }
        .canonicalize(&group);
        if ch.eval(group.z()) == mu && !out.contains(&ch) {
            out.push(ch);
        }
    }
    out
}

/// The twisting character attached to a scaling class α:
/// bit_i = 0 or 1 according to (disc_i, α) = ±1 over the orthogonal basis.
pub fn eps_alpha(param: &WDParameter, alpha: SquareClass) -> Result<PacketCharacter> {
    let group = component_group(param, ParamKind::Orthogonal);
    let mut bits = Vec::with_capacity(group.rank());
    for id in group.ids() {
        let (d, _) = param
            .items()
            .iter()
            .find(|(d, _)| d.id() == id)
            .expect("basis ids come from the parameter");
        let disc = d.disc().expect("orthogonal constituents carry a disc");
        let h = hilbert(disc, alpha)?;
        bits.push(if h == 1 { 0 } else { 1 });
    }
    Ok(PacketCharacter {
        ids: group.ids().to_vec(),
        bits,
    }
    .canonicalize(&group))
}

/// The endoscopic base point attached to a decomposition φ = φ₊ ⊕ φ₋: the
/// parity of the φ₋-multiplicity on each basis element of the sum. Returns
/// the summed parameter together with the element.
pub fn endoscopic_s(
    plus: &WDParameter,
    minus: &WDParameter,
    kind: ParamKind,
) -> Result<(WDParameter, Vec<u8>)> {
    let sum = plus.direct_sum(minus)?;
    let group = component_group(&sum, kind);
    let mut s = Vec::with_capacity(group.rank());
    for id in group.ids() {
        let l_minus = minus
            .items()
            .iter()
            .find(|(d, _)| d.id() == *id)
            .map_or(0, |(_, l)| *l);
        s.push((l_minus % 2) as u8);
    }
    Ok((sum, s))
}
