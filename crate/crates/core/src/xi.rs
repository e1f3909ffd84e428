//! Parameter families for semisimple classes: ordered lists of norm-one
//! elements in quadratic étale algebras over F = Q_p, together with the sign
//! groups C(ξ) and the γ-torsors Γ_pair(ξ), Γ_imp(ξ) attached to them.
//!
//! Each entry carries a quadratic étale algebra F_i (split or F(√δ_i)) and a
//! norm-one element y_i with rational coordinates. The family is regular
//! when no y_i is ±1 and no two entries are identified by an algebra
//! isomorphism matching y-values up to conjugation; regular families are the
//! domain of every transfer-factor formula downstream.

use std::collections::BTreeMap;
use std::ops::Mul;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::etale::{Compositum, QuadAlgebra, QuadAlgebraElement};
use crate::padic::{sgn_ext, PrimeField, QuadExtension, SquareClass};

/// One entry of a parameter family: an algebra and a norm-one element in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XiEntry {
    y: QuadAlgebraElement,
}

impl XiEntry {
    pub fn new(y: QuadAlgebraElement) -> Result<Self> {
        if !y.has_norm_one() {
            return Err(Error::Validation(format!(
                "entry element {y} does not have norm 1"
            )));
        }
        Ok(XiEntry { y })
    }

    pub fn algebra(&self) -> QuadAlgebra {
        self.y.algebra()
    }

    pub fn y(&self) -> &QuadAlgebraElement {
        &self.y
    }

    /// True when y = ±1 (the center of the norm-one torus).
    pub fn is_central(&self) -> bool {
        let one = QuadAlgebraElement::one(self.algebra());
        self.y == one || self.y == -&one
    }

    /// Whether another entry is identified with this one by an algebra
    /// isomorphism carrying one y-value to the other (possibly through τ).
    pub fn is_isomorphic_to(&self, other: &XiEntry) -> bool {
        self.algebra() == other.algebra()
            && (self.y == other.y || self.y == other.y.conj())
    }
}

/// An ordered family ξ of entries over one base field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XiFamily {
    field: PrimeField,
    entries: Vec<XiEntry>,
}

impl XiFamily {
    pub fn new(field: PrimeField, entries: Vec<XiEntry>) -> Result<Self> {
        for e in &entries {
            if e.algebra().field() != field {
                return Err(Error::PrimeMismatch(field.p(), e.algebra().field().p()));
            }
        }
        Ok(XiFamily { field, entries })
    }

    pub fn empty(field: PrimeField) -> Self {
        XiFamily {
            field,
            entries: Vec::new(),
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn entries(&self) -> &[XiEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The attached dimension d_ξ = 2·|I|.
    pub fn d_xi(&self) -> usize {
        2 * self.entries.len()
    }

    /// The attached discriminant class δ_ξ: product of the δᵢ over field
    /// entries, trivial contributions from split entries.
    pub fn delta_xi(&self) -> SquareClass {
        let mut acc = SquareClass::one(self.field);
        for e in &self.entries {
            acc = acc * e.algebra().disc_class();
        }
        acc
    }

    /// Indices of field-kind entries (the set I*).
    pub fn field_indices(&self) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.algebra().is_split())
            .map(|(i, _)| i)
            .collect()
    }

    /// Regularity: no central y and no two entries identified up to τ.
    pub fn is_regular(&self) -> bool {
        if self.entries.iter().any(XiEntry::is_central) {
            return false;
        }
        for i in 0..self.entries.len() {
            for j in (i + 1)..self.entries.len() {
                if self.entries[i].is_isomorphic_to(&self.entries[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// Disjoint union ξ ⊔ ξ′, entries of self first.
    pub fn concat(&self, other: &XiFamily) -> XiFamily {
        assert_eq!(self.field, other.field, "families over different primes");
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        XiFamily {
            field: self.field,
            entries,
        }
    }

    /// The family −ξ with every y negated; an involution preserving the
    /// algebras, regularity and δ_ξ.
    pub fn negate(&self) -> XiFamily {
        let entries = self
            .entries
            .iter()
            .map(|e| XiEntry {
                y: -&e.y,
            })
            .collect();
        XiFamily {
            field: self.field,
            entries,
        }
    }
}

/// The two norm-coset representatives of Γ(y) = {γ : γ·τ(γ)⁻¹ = y} for a
/// field-kind norm-one element: the Hilbert-90 solution 1 + y (or √δ when
/// y = −1), and that representative times the canonical non-norm of the
/// extension.
pub fn solve_gamma(y: &QuadAlgebraElement) -> Result<(QuadAlgebraElement, QuadAlgebraElement)> {
    let algebra = y.algebra();
    let delta = algebra
        .delta()
        .ok_or_else(|| Error::Validation("γ-cosets require a field-kind entry".into()))?;
    if !y.has_norm_one() {
        return Err(Error::Validation(format!("{y} does not have norm 1")));
    }
    let one = QuadAlgebraElement::one(algebra);
    let gamma0 = if y == &-&one {
        // 1 + y vanishes; the radical itself conjugates to its negative.
        QuadAlgebraElement::new(
            algebra,
            BigRational::from_integer(0.into()),
            BigRational::from_integer(1.into()),
        )
    } else {
        &one + y
    };
    let w = QuadExtension::new(delta)?
        .canonical_nonnorm()
        .representative_rational();
    let gamma1 = gamma0.scale(&w);
    Ok((gamma0, gamma1))
}

/// The canonical solution γ = (t, 1) of γ·τ(γ)⁻¹ = y for a split entry
/// y = (t, 1/t); the split algebra has a single norm coset.
pub fn split_gamma(y: &QuadAlgebraElement) -> QuadAlgebraElement {
    assert!(y.algebra().is_split() && y.has_norm_one());
    let (t, _) = y.coords();
    QuadAlgebraElement::new(
        y.algebra(),
        t.clone(),
        BigRational::from_integer(1.into()),
    )
}

/// An element of C(ξ) = {±1}^{I*}: one sign per field-kind index. The sign
/// at i stands for sgn_{F_i/F}(c_i); a fixed square-class representative per
/// index is derived from it for form construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetElement {
    signs: BTreeMap<usize, i32>,
}

impl CosetElement {
    pub fn new(signs: BTreeMap<usize, i32>) -> Result<Self> {
        if signs.values().any(|&s| s != 1 && s != -1) {
            return Err(Error::Validation("coset signs must be ±1".into()));
        }
        Ok(CosetElement { signs })
    }

    /// The identity element: +1 at every field index of ξ.
    pub fn trivial(xi: &XiFamily) -> Self {
        CosetElement {
            signs: xi.field_indices().into_iter().map(|i| (i, 1)).collect(),
        }
    }

    pub fn signs(&self) -> &BTreeMap<usize, i32> {
        &self.signs
    }

    pub fn sign(&self, i: usize) -> i32 {
        *self
            .signs
            .get(&i)
            .expect("sign requested at a non-field index")
    }

    /// Product of all signs; +1 exactly on the subgroup C(ξ)¹.
    pub fn sign_product(&self) -> i32 {
        self.signs.values().product()
    }

    pub fn is_in_c_one(&self) -> bool {
        self.sign_product() == 1
    }

    /// The fixed square-class representative of c_i: the trivial class for
    /// sign +1, the canonical non-norm of F(√δᵢ) for sign −1.
    pub fn representative_class(&self, i: usize, xi: &XiFamily) -> SquareClass {
        let delta = xi.entries()[i]
            .algebra()
            .delta()
            .expect("representative requested at a split index");
        if self.sign(i) == 1 {
            SquareClass::one(xi.field())
        } else {
            QuadExtension::new(delta)
                .expect("non-trivial by construction")
                .canonical_nonnorm()
        }
    }

    /// The image of c under c_i ↦ α·c_i: each sign is multiplied by
    /// sgn_ext(δᵢ, α).
    pub fn scale(&self, alpha: SquareClass, xi: &XiFamily) -> CosetElement {
        let signs = self
            .signs
            .iter()
            .map(|(&i, &s)| {
                let delta = xi.entries()[i]
                    .algebra()
                    .delta()
                    .expect("coset index must be a field index");
                (i, s * sgn_ext(delta, alpha).expect("non-trivial delta"))
            })
            .collect();
        CosetElement { signs }
    }
}

impl Mul for &CosetElement {
    type Output = CosetElement;

    fn mul(self, rhs: &CosetElement) -> CosetElement {
        assert_eq!(
            self.signs.keys().collect::<Vec<_>>(),
            rhs.signs.keys().collect::<Vec<_>>(),
            "coset elements over different index sets"
        );
        CosetElement {
            signs: self
                .signs
                .iter()
                .map(|(&i, &s)| (i, s * rhs.signs[&i]))
                .collect(),
        }
    }
}

/// All of C(ξ), in a deterministic order: the element with all signs +1
/// first, then by flipping signs along increasing bit masks over the field
/// indices in ascending order.
pub fn enumerate_c(xi: &XiFamily) -> Vec<CosetElement> {
    let stars = xi.field_indices();
    (0u32..(1 << stars.len()))
        .map(|mask| CosetElement {
            signs: stars
                .iter()
                .enumerate()
                .map(|(b, &i)| (i, if mask >> b & 1 == 1 { -1 } else { 1 }))
                .collect(),
        })
        .collect()
}

/// The even-sign-product subgroup C(ξ)¹.
pub fn enumerate_c_one(xi: &XiFamily) -> Vec<CosetElement> {
    enumerate_c(xi)
        .into_iter()
        .filter(CosetElement::is_in_c_one)
        .collect()
}

/// An element of Γ_pair(ξ) or Γ_imp(ξ): one representative γᵢ per entry
/// (split entries have a single coset and a fixed representative), plus the
/// extra square class γ_D in the imp case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaElement {
    gammas: Vec<QuadAlgebraElement>,
    gamma_d: Option<SquareClass>,
}

impl GammaElement {
    pub fn new(gammas: Vec<QuadAlgebraElement>, gamma_d: Option<SquareClass>) -> Self {
        GammaElement { gammas, gamma_d }
    }

    pub fn gammas(&self) -> &[QuadAlgebraElement] {
        &self.gammas
    }

    pub fn gamma(&self, i: usize) -> &QuadAlgebraElement {
        &self.gammas[i]
    }

    pub fn gamma_d(&self) -> Option<SquareClass> {
        self.gamma_d
    }

    pub fn is_imp(&self) -> bool {
        self.gamma_d.is_some()
    }
}

fn gamma_representatives(xi: &XiFamily) -> Vec<(QuadAlgebraElement, Option<QuadAlgebraElement>)> {
    xi.entries()
        .iter()
        .map(|e| {
            if e.algebra().is_split() {
                (split_gamma(e.y()), None)
            } else {
                let (g0, g1) = solve_gamma(e.y()).expect("field entry with norm-one y");
                (g0, Some(g1))
            }
        })
        .collect()
}

/// Γ_pair(ξ): one norm-coset choice per field index, 2^{|I*|} elements, in
/// the same mask order as [`enumerate_c`].
pub fn enumerate_gamma_pair(xi: &XiFamily) -> Vec<GammaElement> {
    let reps = gamma_representatives(xi);
    let stars = xi.field_indices();
    (0u32..(1 << stars.len()))
        .map(|mask| {
            let gammas = reps
                .iter()
                .enumerate()
                .map(|(i, (g0, g1))| match g1 {
                    Some(g1) => {
                        let b = stars.iter().position(|&s| s == i).expect("field index");
                        if mask >> b & 1 == 1 {
                            g1.clone()
                        } else {
                            g0.clone()
                        }
                    }
                    None => g0.clone(),
                })
                .collect();
            GammaElement {
                gammas,
                gamma_d: None,
            }
        })
        .collect()
}

/// Γ_imp(ξ): Γ_pair(ξ) together with an extra square class γ_D.
pub fn enumerate_gamma_imp(xi: &XiFamily) -> Vec<GammaElement> {
    let mut out = Vec::new();
    for gamma_d in xi.field().square_classes() {
        for g in enumerate_gamma_pair(xi) {
            out.push(GammaElement {
                gammas: g.gammas,
                gamma_d: Some(gamma_d),
            });
        }
    }
    out
}

/// Exact product of a Galois-stable list of algebra elements, computed in
/// the formal multiquadratic algebra and read off from the rational
/// coordinate. Elements lying in F contribute themselves; a field-kind
/// element contributes its single stored embedding (callers list conjugates
/// explicitly); a non-rational split element contributes both coordinates.
pub fn compositum_product(field: PrimeField, values: &[QuadAlgebraElement]) -> Result<BigRational> {
    let deltas: Vec<SquareClass> = values
        .iter()
        .filter_map(|v| v.algebra().delta())
        .collect();
    let comp = Compositum::new(field, deltas);
    let mut acc = comp.one();
    for v in values {
        if v.algebra().field() != field {
            return Err(Error::PrimeMismatch(field.p(), v.algebra().field().p()));
        }
        if let Some(r) = v.as_rational() {
            acc = &acc * &comp.embed_rational(r);
        } else if v.algebra().is_split() {
            let (a, b) = v.coords();
            acc = &acc * &comp.embed_rational(a.clone());
            acc = &acc * &comp.embed_rational(b.clone());
        } else {
            acc = &acc * &comp.embed(v);
        }
    }
    acc.as_rational().ok_or_else(|| {
        Error::Internal("product of a Galois-stable list failed to be rational".into())
    })
}
