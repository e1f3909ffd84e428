//! Exact arithmetic in quadratic étale algebras over F = Q_p and in the
//! formal multiquadratic algebra needed for eigenvalue-pair products.
//!
//! A quadratic étale algebra is either the split algebra F ⊕ F or a field
//! F(√δ) with δ a non-trivial square class; elements are stored as pairs of
//! rationals (the two split coordinates, or the 1- and √δ-coordinates). The
//! non-trivial F-automorphism τ swaps split coordinates and negates the
//! √δ-coordinate.
//!
//! [`Compositum`] models the tensor product of several F[x]/(x² − δ) factors
//! with one formal radical per distinct square class. Quantities computed
//! there are only read off after they collapse to the rational coordinate,
//! where every specialization of the formal radicals agrees, so the formal
//! model is exact for the symmetric products this crate builds in it.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::padic::{PrimeField, SquareClass};

/// A quadratic étale algebra over Q_p: split (F ⊕ F) or the field F(√δ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadAlgebra {
    field: PrimeField,
    delta: Option<SquareClass>,
}

impl QuadAlgebra {
    /// The split algebra F ⊕ F.
    pub fn split(field: PrimeField) -> Self {
        QuadAlgebra { field, delta: None }
    }

    /// The quadratic field F(√δ); δ must be a non-trivial square class.
    pub fn field_ext(delta: SquareClass) -> Result<Self> {
        if delta.is_trivial() {
            return Err(Error::TrivialExtension);
        }
        Ok(QuadAlgebra {
            field: delta.field(),
            delta: Some(delta),
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_split(&self) -> bool {
        self.delta.is_none()
    }

    /// The square class under the radical, for the field case.
    pub fn delta(&self) -> Option<SquareClass> {
        self.delta
    }

    /// δ as a square class for the field case, the trivial class for the
    /// split algebra (its "discriminant").
    pub fn disc_class(&self) -> SquareClass {
        self.delta.unwrap_or_else(|| SquareClass::one(self.field))
    }

    fn delta_rational(&self) -> BigRational {
        self.disc_class().representative_rational()
    }
}

impl fmt::Display for QuadAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.delta {
            None => write!(f, "{} + {}", self.field, self.field),
            Some(d) => write!(f, "{}(sqrt {})", self.field, d),
        }
    }
}

/// An element of a quadratic étale algebra: (a, b) means a + b√δ in the
/// field case and the pair (a, b) ∈ F ⊕ F in the split case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadAlgebraElement {
    algebra: QuadAlgebra,
    a: BigRational,
    b: BigRational,
}

impl QuadAlgebraElement {
    pub fn new(algebra: QuadAlgebra, a: BigRational, b: BigRational) -> Self {
        QuadAlgebraElement { algebra, a, b }
    }

    pub fn from_rational(algebra: QuadAlgebra, r: BigRational) -> Self {
        // A rational scalar embeds diagonally in the split algebra.
        let b = if algebra.is_split() {
            r.clone()
        } else {
            BigRational::zero()
        };
        QuadAlgebraElement { algebra, a: r, b }
    }

    pub fn from_integer(algebra: QuadAlgebra, n: i64) -> Self {
        QuadAlgebraElement::from_rational(algebra, BigRational::from(BigInt::from(n)))
    }

    pub fn zero(algebra: QuadAlgebra) -> Self {
        QuadAlgebraElement::from_integer(algebra, 0)
    }

    pub fn one(algebra: QuadAlgebra) -> Self {
        QuadAlgebraElement::from_integer(algebra, 1)
    }

    pub fn algebra(&self) -> QuadAlgebra {
        self.algebra
    }

    /// Coordinates in the stored basis: (rational part, √δ-coefficient) or
    /// the two split components.
    pub fn coords(&self) -> (&BigRational, &BigRational) {
        (&self.a, &self.b)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self == &QuadAlgebraElement::one(self.algebra)
    }

    /// The conjugate τ(x): swapped components, or negated radical part.
    pub fn conj(&self) -> Self {
        if self.algebra.is_split() {
            QuadAlgebraElement {
                algebra: self.algebra,
                a: self.b.clone(),
                b: self.a.clone(),
            }
        } else {
            QuadAlgebraElement {
                algebra: self.algebra,
                a: self.a.clone(),
                b: -self.b.clone(),
            }
        }
    }

    /// Norm to F: x·τ(x), always a rational number.
    pub fn norm(&self) -> BigRational {
        if self.algebra.is_split() {
            &self.a * &self.b
        } else {
            &self.a * &self.a - self.algebra.delta_rational() * &self.b * &self.b
        }
    }

    /// Trace to F: x + τ(x).
    pub fn trace(&self) -> BigRational {
        if self.algebra.is_split() {
            &self.a + &self.b
        } else {
            BigRational::from(BigInt::from(2)) * &self.a
        }
    }

    /// True when the element lies in the rational subfield F (zero radical
    /// part, or equal split components).
    pub fn is_rational(&self) -> bool {
        if self.algebra.is_split() {
            self.a == self.b
        } else {
            self.b.is_zero()
        }
    }

    /// The element as a rational number, when it lies in F.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.a.clone())
    }

    pub fn is_invertible(&self) -> bool {
        !self.norm().is_zero()
    }

    /// Multiplicative inverse τ(x)/norm(x), None for non-invertible x.
    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(QuadAlgebraElement {
            algebra: self.algebra,
            a: c.a / &n,
            b: c.b / &n,
        })
    }

    /// Integer power; negative exponents require invertibility.
    pub fn pow(&self, n: i64) -> Option<Self> {
        let base = if n < 0 {
            self.inv()?
        } else {
            self.clone()
        };
        let mut acc = QuadAlgebraElement::one(self.algebra);
        for _ in 0..n.unsigned_abs() {
            acc = &acc * &base;
        }
        Some(acc)
    }

    /// Scale by a rational number.
    pub fn scale(&self, r: &BigRational) -> Self {
        QuadAlgebraElement {
            algebra: self.algebra,
            a: r * &self.a,
            b: r * &self.b,
        }
    }

    pub fn has_norm_one(&self) -> bool {
        self.norm().is_one()
    }
}

impl fmt::Display for QuadAlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.algebra.is_split() {
            write!(f, "({}, {})", self.a, self.b)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.algebra.disc_class())
        }
    }
}

impl Add for &QuadAlgebraElement {
    type Output = QuadAlgebraElement;

    fn add(self, rhs: &QuadAlgebraElement) -> QuadAlgebraElement {
        assert_eq!(self.algebra, rhs.algebra, "elements of different algebras");
        QuadAlgebraElement {
            algebra: self.algebra,
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
}

impl Sub for &QuadAlgebraElement {
    type Output = QuadAlgebraElement;

    fn sub(self, rhs: &QuadAlgebraElement) -> QuadAlgebraElement {
        assert_eq!(self.algebra, rhs.algebra, "elements of different algebras");
        QuadAlgebraElement {
            algebra: self.algebra,
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        }
    }
}

impl Mul for &QuadAlgebraElement {
    type Output = QuadAlgebraElement;

    fn mul(self, rhs: &QuadAlgebraElement) -> QuadAlgebraElement {
        assert_eq!(self.algebra, rhs.algebra, "elements of different algebras");
        if self.algebra.is_split() {
            QuadAlgebraElement {
                algebra: self.algebra,
                a: &self.a * &rhs.a,
                b: &self.b * &rhs.b,
            }
        } else {
            let d = self.algebra.delta_rational();
            QuadAlgebraElement {
                algebra: self.algebra,
                a: &self.a * &rhs.a + &d * &self.b * &rhs.b,
                b: &self.a * &rhs.b + &self.b * &rhs.a,
            }
        }
    }
}

impl Neg for &QuadAlgebraElement {
    type Output = QuadAlgebraElement;

    fn neg(self) -> QuadAlgebraElement {
        QuadAlgebraElement {
            algebra: self.algebra,
            a: -self.a.clone(),
            b: -self.b.clone(),
        }
    }
}

/// A norm-one element from a rational parameter t: (t, 1/t) in the split
/// algebra, and the Cayley-type element (1 + t√δ)/(1 − t√δ) in the field
/// case. Returns None at the excluded parameter values (t = 0 split,
/// δt² = 1 field).
pub fn norm_one_element(algebra: QuadAlgebra, t: &BigRational) -> Option<QuadAlgebraElement> {
    if algebra.is_split() {
        if t.is_zero() {
            return None;
        }
        Some(QuadAlgebraElement::new(
            algebra,
            t.clone(),
            t.recip(),
        ))
    } else {
        let d = algebra.delta_rational();
        let denom = BigRational::one() - &d * t * t;
        if denom.is_zero() {
            return None;
        }
        let a = (BigRational::one() + &d * t * t) / &denom;
        let b = (BigRational::from(BigInt::from(2)) * t) / &denom;
        Some(QuadAlgebraElement::new(algebra, a, b))
    }
}

/// The formal multiquadratic algebra over F with one radical per distinct
/// non-trivial square class in its basis. Elements are coordinate vectors
/// indexed by subsets of the basis (as bit masks); the radical product rule
/// is √δ_S·√δ_T = (Π_{i ∈ S∩T} δᵢ)·√δ_{S△T} with δᵢ evaluated at its
/// canonical representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Compositum {
    field: PrimeField,
    basis: Vec<SquareClass>,
}

impl Compositum {
    /// Build the algebra spanned by the given square classes; trivial
    /// classes are dropped, duplicates merged, order canonical.
    pub fn new(field: PrimeField, deltas: impl IntoIterator<Item = SquareClass>) -> Self {
        let mut basis: Vec<SquareClass> = deltas
            .into_iter()
            .inspect(|d| assert_eq!(d.field(), field, "class over the wrong prime"))
            .filter(|d| !d.is_trivial())
            .collect();
        basis.sort_by_key(|d| d.index());
        basis.dedup();
        assert!(basis.len() <= 32, "basis too large for bit masks");
        Compositum { field, basis }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn basis(&self) -> &[SquareClass] {
        &self.basis
    }

    pub fn zero(&self) -> CompositumElement {
        CompositumElement {
            parent: self.clone(),
            coords: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> CompositumElement {
        self.embed_rational(BigRational::one())
    }

    pub fn embed_rational(&self, r: BigRational) -> CompositumElement {
        let mut coords = BTreeMap::new();
        if !r.is_zero() {
            coords.insert(0u32, r);
        }
        CompositumElement {
            parent: self.clone(),
            coords,
        }
    }

    /// Embed a quadratic-field element a + b√δ; its δ must appear in the
    /// basis. Split-algebra elements have no canonical image and must be
    /// embedded one rational component at a time.
    pub fn embed(&self, x: &QuadAlgebraElement) -> CompositumElement {
        let delta = x
            .algebra()
            .delta()
            .expect("only field elements embed into the compositum");
        let i = self
            .basis
            .iter()
            .position(|&d| d == delta)
            .expect("class missing from the compositum basis");
        let (a, b) = x.coords();
        let mut coords = BTreeMap::new();
        if !a.is_zero() {
            coords.insert(0u32, a.clone());
        }
        if !b.is_zero() {
            coords.insert(1u32 << i, b.clone());
        }
        CompositumElement {
            parent: self.clone(),
            coords,
        }
    }
}

/// An element of [`Compositum`], stored sparsely by basis-subset mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositumElement {
    parent: Compositum,
    coords: BTreeMap<u32, BigRational>,
}

impl CompositumElement {
    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    /// True when only the rational coordinate is present.
    pub fn is_rational(&self) -> bool {
        self.coords.keys().all(|&mask| mask == 0)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| {
            self.coords
                .get(&0)
                .cloned()
                .unwrap_or_else(BigRational::zero)
        })
    }

    pub fn coords(&self) -> &BTreeMap<u32, BigRational> {
        &self.coords
    }

    fn insert_normalized(coords: &mut BTreeMap<u32, BigRational>, mask: u32, value: BigRational) {
        use std::collections::btree_map::Entry;
        match coords.entry(mask) {
            Entry::Vacant(e) => {
                if !value.is_zero() {
                    e.insert(value);
                }
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += value;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }
}

impl Add for &CompositumElement {
    type Output = CompositumElement;

    fn add(self, rhs: &CompositumElement) -> CompositumElement {
        assert_eq!(self.parent, rhs.parent, "elements of different composita");
        let mut coords = self.coords.clone();
        for (&mask, v) in &rhs.coords {
            CompositumElement::insert_normalized(&mut coords, mask, v.clone());
        }
        CompositumElement {
            parent: self.parent.clone(),
            coords,
        }
    }
}

impl Sub for &CompositumElement {
    type Output = CompositumElement;

    fn sub(self, rhs: &CompositumElement) -> CompositumElement {
        assert_eq!(self.parent, rhs.parent, "elements of different composita");
        let mut coords = self.coords.clone();
        for (&mask, v) in &rhs.coords {
            CompositumElement::insert_normalized(&mut coords, mask, -v.clone());
        }
        CompositumElement {
            parent: self.parent.clone(),
            coords,
        }
    }
}

impl Mul for &CompositumElement {
    type Output = CompositumElement;

    fn mul(self, rhs: &CompositumElement) -> CompositumElement {
        assert_eq!(self.parent, rhs.parent, "elements of different composita");
        let mut coords = BTreeMap::new();
        for (&s, vs) in &self.coords {
            for (&t, vt) in &rhs.coords {
                let mut value = vs * vt;
                let mut common = s & t;
                while common != 0 {
                    let i = common.trailing_zeros() as usize;
                    value *= self.parent.basis[i].representative_rational();
                    common &= common - 1;
                }
                CompositumElement::insert_normalized(&mut coords, s ^ t, value);
            }
        }
        CompositumElement {
            parent: self.parent.clone(),
            coords,
        }
    }
}
