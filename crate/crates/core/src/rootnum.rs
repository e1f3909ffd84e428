//! Local root numbers for multiplicative characters of Q_p^×.
//!
//! Characters are stored exactly: images of canonical unit-group generators
//! as roots of unity, plus the value at p, with the conductor exponent kept
//! minimal. ε-factors are computed through floating-point Gauss sums and
//! snapped back to exact roots of unity; the sign pipeline downstream only
//! ever consumes products that are provably ±1 (pairs with an even-
//! dimensional special factor on one side), for which the snap is faithful.
//!
//! The ψ-convention: an additive character is described by its conductor
//! exponent n (trivial on p^{−n}Z_p, nontrivial on p^{−n−1}Z_p; default 0)
//! and a unit scale α (ψ^α(x) = ψ(αx)). With the convention used here,
//! ε(1/2, χ, ψ_{n,α}) = χ(p)^{a+n}·χ(α)·g(χ) where a is the conductor
//! exponent of χ and g(χ) is the normalized Gauss sum (1 for unramified χ).
//! The sp(n) twist follows the standard monodromy recipe: ε(σ)ⁿ for
//! ramified σ, times det(−σ(p))^{n−1} on the inertia invariants otherwise.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::padic::{hilbert, modpow, PrimeField, SquareClass};
use crate::wd::IrredDescriptor;

const SNAP_TOLERANCE: f64 = 1e-9;

/// An exact root of unity e^{2πi·k/n}, stored with k/n in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct RootOfUnity {
    k: u64,
    n: u64,
}

impl RootOfUnity {
    pub fn new(k: i64, n: u64) -> Self {
        assert!(n > 0, "root of unity needs a positive order");
        let k = k.rem_euclid(n as i64) as u64;
        let g = k.gcd(&n);
        if k == 0 {
            RootOfUnity { k: 0, n: 1 }
        } else {
            RootOfUnity { k: k / g, n: n / g }
        }
    }

    pub fn one() -> Self {
        RootOfUnity { k: 0, n: 1 }
    }

    pub fn minus_one() -> Self {
        RootOfUnity { k: 1, n: 2 }
    }

    pub fn from_sign(s: i32) -> Self {
        assert!(s == 1 || s == -1, "sign must be ±1");
        if s == 1 {
            Self::one()
        } else {
            Self::minus_one()
        }
    }

    pub fn is_one(&self) -> bool {
        self.k == 0
    }

    /// The multiplicative order.
    pub fn order(&self) -> u64 {
        self.n
    }

    /// Numerator and denominator of the angle as a fraction of a full turn.
    pub fn angle(&self) -> (u64, u64) {
        (self.k, self.n)
    }

    /// ±1 when the value is real, None otherwise.
    pub fn as_sign(&self) -> Option<i32> {
        match (self.k, self.n) {
            (0, 1) => Some(1),
            (1, 2) => Some(-1),
            _ => None,
        }
    }

    pub fn inv(&self) -> Self {
        RootOfUnity::new(-(self.k as i64), self.n)
    }

    pub fn pow(&self, e: i64) -> Self {
        let k = (self.k as i128 * e as i128).rem_euclid(self.n as i128) as i64;
        RootOfUnity::new(k, self.n)
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * self.k as f64 / self.n as f64)
    }
}

impl std::ops::Mul for RootOfUnity {
    type Output = RootOfUnity;
    fn mul(self, rhs: RootOfUnity) -> RootOfUnity {
        let n = self.n.lcm(&rhs.n);
        let k = (self.k as i128 * (n / self.n) as i128 + rhs.k as i128 * (n / rhs.n) as i128)
            .rem_euclid(n as i128) as i64;
        RootOfUnity::new(k, n)
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.k, self.n) {
            (0, 1) => write!(f, "1"),
            (1, 2) => write!(f, "-1"),
            (1, 4) => write!(f, "i"),
            (3, 4) => write!(f, "-i"),
            (k, n) => write!(f, "e({k}/{n})"),
        }
    }
}

/// Additive character data: conductor exponent n (default 0) and a unit
/// scale α with ψ^α(x) = ψ(αx).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Psi {
    conductor_exp: u32,
    unit_scale: i64,
}

impl Psi {
    pub fn standard() -> Self {
        Psi {
            conductor_exp: 0,
            unit_scale: 1,
        }
    }

    pub fn new(conductor_exp: u32, unit_scale: i64) -> Self {
        Psi {
            conductor_exp,
            unit_scale,
        }
    }

    pub fn conductor_exp(&self) -> u32 {
        self.conductor_exp
    }

    pub fn unit_scale(&self) -> i64 {
        self.unit_scale
    }
}

impl Default for Psi {
    fn default() -> Self {
        Self::standard()
    }
}

/// Canonical generators of (Z/p^a)^×: the least primitive root for odd p,
/// the pair (−1, 5) for p = 2 and a ≥ 3, just −1 for a = 2.
fn unit_generators(field: PrimeField, a: u32) -> Vec<u64> {
    let p = field.p();
    if a == 0 || (p == 2 && a == 1) {
        return Vec::new();
    }
    if p == 2 {
        let m = 1u64 << a;
        if a == 2 {
            vec![3]
        } else {
            vec![m - 1, 5]
        }
    } else {
        vec![primitive_root(p, a)]
    }
}

/// Order of (Z/p^a)^×.
fn unit_group_order(p: u64, a: u32) -> u64 {
    if a == 0 {
        1
    } else {
        p.pow(a - 1) * (p - 1)
    }
}

fn mult_order(x: u64, modulus: u64, group_order: u64) -> u64 {
    let mut acc = x % modulus;
    let mut k = 1;
    while acc != 1 {
        acc = acc * x % modulus;
        k += 1;
        assert!(k <= group_order, "element order exceeds the group order");
    }
    k
}

/// Least primitive root mod p, adjusted to stay primitive mod p^a.
fn primitive_root(p: u64, a: u32) -> u64 {
    let g = (2..p)
        .find(|&g| mult_order(g, p, p - 1) == p - 1)
        .expect("every odd prime has a primitive root");
    if a >= 2 && modpow(g, p - 1, p * p) == 1 {
        g + p
    } else {
        g
    }
}

/// A multiplicative character of Q_p^×, stored by its minimal conductor
/// exponent, the images of the canonical unit-group generators, and the
/// value at p. All values are exact roots of unity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultChar {
    field: PrimeField,
    conductor_exp: u32,
    unit_images: Vec<RootOfUnity>,
    unramified: RootOfUnity,
}

impl MultChar {
    /// Builds a character from generator images at level a; the conductor
    /// is reduced to its minimal value automatically.
    pub fn from_images(
        field: PrimeField,
        a: u32,
        unit_images: Vec<RootOfUnity>,
        unramified: RootOfUnity,
    ) -> Result<Self> {
        // Level 1 at p = 2 has a trivial unit group.
        let a = if field.p() == 2 && a == 1 { 0 } else { a };
        let gens = unit_generators(field, a);
        if unit_images.len() != gens.len() {
            return Err(Error::Validation(format!(
                "expected {} generator images at level {a}, got {}",
                gens.len(),
                unit_images.len()
            )));
        }
        let modulus = field.p().pow(a);
        for (g, img) in gens.iter().zip(&unit_images) {
            let gen_order = mult_order(*g, modulus, unit_group_order(field.p(), a));
            if gen_order % img.order() != 0 {
                return Err(Error::Validation(format!(
                    "image order {} does not divide the generator order {gen_order}",
                    img.order()
                )));
            }
        }
        let chi = MultChar {
            field,
            conductor_exp: a,
            unit_images,
            unramified,
        };
        Ok(chi.reduce_conductor())
    }

    /// The trivial character.
    pub fn trivial(field: PrimeField) -> Self {
        MultChar {
            field,
            conductor_exp: 0,
            unit_images: Vec::new(),
            unramified: RootOfUnity::one(),
        }
    }

    /// The quadratic character x ↦ (δ, x) of a square class δ.
    pub fn quadratic(delta: SquareClass) -> Self {
        let field = delta.field();
        let a0 = if field.p() == 2 { 3 } else { 1 };
        let images = unit_generators(field, a0)
            .into_iter()
            .map(|g| {
                let c = SquareClass::from_integer(g as i64, field).expect("generators are units");
                RootOfUnity::from_sign(hilbert(delta, c).expect("same field"))
            })
            .collect();
        let p_class =
            SquareClass::from_integer(field.p() as i64, field).expect("p is nonzero");
        let unramified = RootOfUnity::from_sign(hilbert(delta, p_class).expect("same field"));
        MultChar::from_images(field, a0, images, unramified)
            .expect("hilbert values are valid images")
    }

    fn reduce_conductor(self) -> Self {
        let p = self.field.p();
        let a = self.conductor_exp;
        if a == 0 {
            return self;
        }
        let modulus = p.pow(a);
        // Minimal b such that the character is trivial on units ≡ 1 mod p^b
        // (b = 0 meaning trivial on all units).
        let mut minimal = a;
        for b in (0..a).rev() {
            let step = p.pow(b);
            let trivial_on_layer = (0u64..)
                .map(|k| 1 + k * step)
                .take_while(|&u| u < modulus)
                .filter(|&u| u % p != 0)
                .all(|u| self.eval_unit(u).is_one());
            if trivial_on_layer {
                minimal = b;
            } else {
                break;
            }
        }
        let minimal = if p == 2 && minimal == 1 { 0 } else { minimal };
        if minimal == a {
            return self;
        }
        let images = unit_generators(self.field, minimal)
            .into_iter()
            .map(|g| self.eval_unit(g))
            .collect();
        MultChar {
            field: self.field,
            conductor_exp: minimal,
            unit_images: images,
            unramified: self.unramified,
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn conductor_exp(&self) -> u32 {
        self.conductor_exp
    }

    pub fn is_ramified(&self) -> bool {
        self.conductor_exp > 0
    }

    pub fn unit_images(&self) -> &[RootOfUnity] {
        &self.unit_images
    }

    /// χ(p).
    pub fn at_p(&self) -> RootOfUnity {
        self.unramified
    }

    /// χ(−1).
    pub fn at_minus_one(&self) -> RootOfUnity {
        let m = self.field.p().pow(self.conductor_exp);
        if m <= 2 {
            RootOfUnity::one()
        } else {
            self.eval_unit(m - 1)
        }
    }

    /// Order of χ as a character (lcm of the orders of all its values).
    pub fn order(&self) -> u64 {
        self.unit_images
            .iter()
            .map(|z| z.order())
            .fold(self.unramified.order(), |acc, o| acc.lcm(&o))
    }

    pub fn is_quadratic(&self) -> bool {
        self.order() <= 2
    }

    /// Value on a unit (reduced mod p^a internally; a = 0 gives 1).
    pub fn eval_unit(&self, u: u64) -> RootOfUnity {
        let p = self.field.p();
        let a = self.conductor_exp;
        if a == 0 {
            return RootOfUnity::one();
        }
        let m = p.pow(a);
        let u = u % m;
        assert!(u % p != 0, "eval_unit needs a unit argument");
        if p == 2 {
            if a == 2 {
                return if u == 3 {
                    self.unit_images[0]
                } else {
                    RootOfUnity::one()
                };
            }
            // u ≡ (−1)^s·5^t mod 2^a.
            let mut pow5 = 1u64;
            for t in 0..(1u64 << (a - 2)) {
                if pow5 == u {
                    return self.unit_images[1].pow(t as i64);
                }
                if m - pow5 == u {
                    return self.unit_images[0] * self.unit_images[1].pow(t as i64);
                }
                pow5 = pow5 * 5 % m;
            }
            unreachable!("every odd residue decomposes as ±5^t");
        }
        let g = primitive_root(p, a);
        let mut pow_g = 1u64;
        for t in 0..unit_group_order(p, a) {
            if pow_g == u {
                return self.unit_images[0].pow(t as i64);
            }
            pow_g = pow_g * g % m;
        }
        unreachable!("generator powers exhaust the unit group");
    }

    /// Value at a nonzero rational: χ(p)^{v}·(unit part).
    pub fn eval(&self, x: &BigRational) -> Result<RootOfUnity> {
        if x.is_zero() {
            return Err(Error::ZeroSquareClass);
        }
        let p_big = BigInt::from(self.field.p());
        let mut num = x.numer().clone();
        let mut den = x.denom().clone();
        let mut v: i64 = 0;
        while (&num % &p_big).is_zero() {
            num /= &p_big;
            v += 1;
        }
        while (&den % &p_big).is_zero() {
            den /= &p_big;
            v -= 1;
        }
        let unit_value = if self.conductor_exp == 0 {
            RootOfUnity::one()
        } else {
            let m = self.field.p().pow(self.conductor_exp);
            let m_big = BigInt::from(m);
            let n_mod = num.mod_floor(&m_big).to_u64().expect("reduced below m");
            let d_mod = den.mod_floor(&m_big).to_u64().expect("reduced below m");
            let phi = unit_group_order(self.field.p(), self.conductor_exp);
            let d_inv = modpow(d_mod, phi - 1, m);
            self.eval_unit(n_mod * d_inv % m)
        };
        Ok(self.unramified.pow(v) * unit_value)
    }

    /// Pointwise product of characters of the same field.
    pub fn mul(&self, other: &MultChar) -> Result<MultChar> {
        if self.field != other.field {
            return Err(Error::PrimeMismatch(self.field.p(), other.field.p()));
        }
        let a = self.conductor_exp.max(other.conductor_exp);
        let images = unit_generators(self.field, a)
            .into_iter()
            .map(|g| self.eval_unit(g) * other.eval_unit(g))
            .collect();
        MultChar::from_images(self.field, a, images, self.unramified * other.unramified)
    }

    pub fn inverse(&self) -> MultChar {
        MultChar {
            field: self.field,
            conductor_exp: self.conductor_exp,
            unit_images: self.unit_images.iter().map(|z| z.inv()).collect(),
            unramified: self.unramified.inv(),
        }
    }
}

/// All characters of (Z/p^a)^× (conductors ≤ a, reduced to minimal form),
/// with trivial value at p.
pub fn all_characters(field: PrimeField, a: u32) -> Vec<MultChar> {
    let p = field.p();
    let one = RootOfUnity::one();
    if a == 0 || (p == 2 && a == 1) {
        return vec![MultChar::trivial(field)];
    }
    if p == 2 {
        if a == 2 {
            return (0..2)
                .map(|s| {
                    MultChar::from_images(field, a, vec![RootOfUnity::new(s, 2)], one).unwrap()
                })
                .collect();
        }
        let half = 1u64 << (a - 2);
        let mut out = Vec::new();
        for s in 0..2i64 {
            for t in 0..half {
                out.push(
                    MultChar::from_images(
                        field,
                        a,
                        vec![RootOfUnity::new(s, 2), RootOfUnity::new(t as i64, half)],
                        one,
                    )
                    .unwrap(),
                );
            }
        }
        return out;
    }
    let phi = unit_group_order(p, a);
    (0..phi)
        .map(|k| {
            MultChar::from_images(field, a, vec![RootOfUnity::new(k as i64, phi)], one).unwrap()
        })
        .collect()
}

/// Normalized Gauss sum Σ χ^{−1}(u)·e^{2πi u/p^a} / p^{a/2} over units mod
/// p^a, a = conductor exponent ≥ 1.
fn gauss_sum_normalized(chi: &MultChar) -> Complex64 {
    let p = chi.field().p();
    let a = chi.conductor_exp();
    let m = p.pow(a);
    let mut sum = Complex64::new(0.0, 0.0);
    for u in 1..m {
        if u % p == 0 {
            continue;
        }
        let tau = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * u as f64 / m as f64);
        sum += chi.eval_unit(u).inv().as_complex() * tau;
    }
    sum / (m as f64).sqrt()
}

/// Snaps a unit-modulus complex number to the nearest root of unity of
/// order dividing `order`.
fn snap(z: Complex64, order: u64) -> Result<RootOfUnity> {
    if (z.norm() - 1.0).abs() > SNAP_TOLERANCE {
        return Err(Error::Internal(format!(
            "normalized Gauss sum has modulus {} ≠ 1",
            z.norm()
        )));
    }
    let turns = z.arg() / (2.0 * std::f64::consts::PI);
    let k = (turns * order as f64).round() as i64;
    Ok(RootOfUnity::new(k, order))
}

/// ε(1/2, χ, ψ): χ(p)^{a+n}·χ(α)·(snapped normalized Gauss sum), which is
/// 1 for unramified χ and the default ψ.
pub fn gauss_eps(chi: &MultChar, psi: &Psi) -> Result<RootOfUnity> {
    let p = chi.field().p();
    if psi.unit_scale() == 0 || psi.unit_scale().unsigned_abs() % p == 0 {
        return Err(Error::Validation(format!(
            "ψ unit scale {} is not a unit at p = {p}",
            psi.unit_scale()
        )));
    }
    let a = chi.conductor_exp();
    let base = if a == 0 {
        RootOfUnity::one()
    } else {
        snap(gauss_sum_normalized(chi), 8 * chi.order())?
    };
    let m = p.pow(a.max(1));
    let alpha = psi.unit_scale().rem_euclid(m as i64) as u64;
    let alpha_value = if a == 0 {
        RootOfUnity::one()
    } else {
        chi.eval_unit(alpha)
    };
    Ok(chi.at_p().pow((a + psi.conductor_exp()) as i64) * alpha_value * base)
}

/// ε(1/2, σ⊗sp(n), ψ): ε(σ)ⁿ for ramified σ (no inertia invariants), with
/// the extra determinant factor (−σ(p))^{n−1} when σ is unramified.
pub fn sp_correction(sigma: &MultChar, n: usize, psi: &Psi) -> Result<RootOfUnity> {
    if n == 0 {
        return Err(Error::Validation("sp(n) needs n ≥ 1".into()));
    }
    let eps = gauss_eps(sigma, psi)?;
    if n == 1 {
        return Ok(eps);
    }
    if sigma.is_ramified() {
        Ok(eps.pow(n as i64))
    } else {
        let det = RootOfUnity::minus_one() * sigma.at_p();
        Ok(eps.pow(n as i64) * det.pow((n - 1) as i64))
    }
}

/// ε of a pair of abelian characters: the ε of the product character.
pub fn pair_eps(chi1: &MultChar, chi2: &MultChar, psi: &Psi) -> Result<RootOfUnity> {
    gauss_eps(&chi1.mul(chi2)?, psi)
}

/// Pair ε with an sp(2) factor on one side.
pub fn pair_eps_sp2(chi1: &MultChar, chi2: &MultChar, psi: &Psi) -> Result<RootOfUnity> {
    sp_correction(&chi1.mul(chi2)?, 2, psi)
}

/// Pair ε for χ₁⊗sp(m) × χ₂⊗sp(n), through the decomposition
/// sp(m)⊗sp(n) = ⊕_{k<min(m,n)} sp(m+n−1−2k).
pub fn pair_eps_sp(
    chi1: &MultChar,
    m: usize,
    chi2: &MultChar,
    n: usize,
    psi: &Psi,
) -> Result<RootOfUnity> {
    if m == 0 || n == 0 {
        return Err(Error::Validation("sp(n) needs n ≥ 1".into()));
    }
    let product = chi1.mul(chi2)?;
    let mut acc = RootOfUnity::one();
    for k in 0..m.min(n) {
        acc = acc * sp_correction(&product, m + n - 1 - 2 * k, psi)?;
    }
    Ok(acc)
}

/// A table of ±1 root numbers for irreducible pairs, keyed by descriptor
/// ids, together with the ψ convention its entries assume.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootNumberTable {
    psi_conductor: u32,
    entries: BTreeMap<(String, String), i32>,
}

impl RootNumberTable {
    pub fn new(psi_conductor: u32, entries: Vec<(String, String, i32)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, iprime, eps) in entries {
            if eps != 1 && eps != -1 {
                return Err(Error::Validation(format!(
                    "table entry ({i}, {iprime}) has value {eps}, expected ±1"
                )));
            }
            if map.insert((i.clone(), iprime.clone()), eps).is_some() {
                return Err(Error::Validation(format!(
                    "duplicate table entry ({i}, {iprime})"
                )));
            }
        }
        Ok(RootNumberTable {
            psi_conductor,
            entries: map,
        })
    }

    pub fn psi_conductor(&self) -> u32 {
        self.psi_conductor
    }

    pub fn get(&self, i: &str, iprime: &str) -> Option<i32> {
        self.entries.get(&(i.to_string(), iprime.to_string())).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(String, String), &i32)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Merge with another table; mixing ψ conventions or conflicting
    /// duplicate entries is an error.
    pub fn merge(&self, other: &RootNumberTable) -> Result<RootNumberTable> {
        if self.psi_conductor != other.psi_conductor {
            return Err(Error::Validation(format!(
                "cannot merge tables with ψ conductors {} and {}",
                self.psi_conductor, other.psi_conductor
            )));
        }
        let mut map = self.entries.clone();
        for (key, eps) in &other.entries {
            if let Some(existing) = map.insert(key.clone(), *eps) {
                if existing != *eps {
                    return Err(Error::Validation(format!(
                        "conflicting entries for ({}, {})",
                        key.0, key.1
                    )));
                }
            }
        }
        Ok(RootNumberTable {
            psi_conductor: self.psi_conductor,
            entries: map,
        })
    }
}

/// Checks a table against the descriptor lists of the two sides: every
/// resolvable pair must be covered, the halved-dimension twist
/// (disc_i, −1)^{N′/2} must make sense (even N′ opposite a discriminant
/// carrier), and each entry must square to the central-sign product forced
/// by the duality functional equation. Returns a list of violations.
pub fn validate_table(
    table: &RootNumberTable,
    phi_items: &[IrredDescriptor],
    phi_prime_items: &[IrredDescriptor],
) -> Vec<String> {
    let mut violations = Vec::new();
    for d in phi_items {
        for dp in phi_prime_items {
            let entry = table.get(d.id(), dp.id());
            let Some(eps) = entry else {
                violations.push(format!("missing entry ({}, {})", d.id(), dp.id()));
                continue;
            };
            if d.disc().is_some() && dp.dim() % 2 != 0 {
                violations.push(format!(
                    "entry ({}, {}): discriminant twist needs an even dimension opposite, got {}",
                    d.id(),
                    dp.id(),
                    dp.dim()
                ));
            }
            // ε·ε∨ = ω(−1)^{N′}·ω′(−1)^{N}; for a self-dual ±1 entry the
            // left side is ε² = 1, so the central-sign product must be +1.
            let cs = |sign: i32, exp: usize| if exp % 2 == 0 { 1 } else { sign };
            let forced = cs(d.central_sign(), dp.dim()) * cs(dp.central_sign(), d.dim());
            if forced != 1 {
                violations.push(format!(
                    "entry ({}, {}) = {eps} is inconsistent with the central signs",
                    d.id(),
                    dp.id()
                ));
            }
        }
    }
    violations
}

/// Builds the oracle table for abelian constituents: each side is a list of
/// (id, character, special-factor size), the constituent being χ⊗sp(k).
/// Every produced entry is checked to be ±1; pairs whose ε is not real are
/// refused.
pub fn abelian_table(
    phi: &[(String, MultChar, usize)],
    phi_prime: &[(String, MultChar, usize)],
    psi: &Psi,
) -> Result<RootNumberTable> {
    let mut entries = Vec::new();
    for (id, chi, k) in phi {
        for (idp, chip, kp) in phi_prime {
            let value = pair_eps_sp(chi, *k, chip, *kp, psi)?;
            let sign = value.as_sign().ok_or_else(|| {
                Error::Validation(format!(
                    "pair ({id}, {idp}) has non-real ε = {value}; only self-dual pairs with \
                     an even-dimensional side can be tabulated"
                ))
            })?;
            entries.push((id.clone(), idp.clone(), sign));
        }
    }
    RootNumberTable::new(psi.conductor_exp(), entries)
}
