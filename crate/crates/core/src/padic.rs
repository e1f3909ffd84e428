//! Square classes, Hilbert symbols, quadratic-extension sign characters, and
//! normalized absolute values over the field Q_p.
//!
//! The group Q_p^× / (Q_p^×)² is finite: four classes for odd p, eight for
//! p = 2. Every sign computation in this crate (Hasse invariants, transfer
//! factors, norm characters) reduces to exact arithmetic on these classes via
//! the Hilbert symbol, for which we use the classical closed forms; a
//! brute-force solvability oracle lives in [`crate::oracle`] and is checked
//! against the closed forms by the test suite.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Trial-division primality test; inputs here are desk-scale primes.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn modpow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = modulus as u128;
    let mut acc = 1u128;
    let mut b = (base % modulus) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Legendre symbol (r/p) for odd prime p and r not divisible by p.
fn legendre(r: u64, p: u64) -> i32 {
    debug_assert!(p % 2 == 1 && r % p != 0);
    if modpow(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// The base field Q_p, identified by its residue characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(PrimeField { p })
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_dyadic(&self) -> bool {
        self.p == 2
    }

    /// Order of Q_p^× / (Q_p^×)²: 4 for odd p, 8 for p = 2.
    pub fn num_square_classes(&self) -> usize {
        if self.p == 2 {
            8
        } else {
            4
        }
    }

    /// Least positive quadratic non-residue mod p (odd p only).
    pub fn least_nonresidue(&self) -> u64 {
        debug_assert!(self.p != 2);
        (2..self.p)
            .find(|&r| legendre(r, self.p) == -1)
            .expect("every odd prime has a non-residue")
    }

    /// All square classes in canonical order: `[1, u, p, up]` for odd p with
    /// u the least non-residue; `[1, 3, 5, 7, 2, 6, 10, 14]` for p = 2.
    pub fn square_classes(&self) -> Vec<SquareClass> {
        let mut out = Vec::with_capacity(self.num_square_classes());
        if self.p == 2 {
            for &val_odd in &[false, true] {
                for &unit in &[1u64, 3, 5, 7] {
                    out.push(SquareClass {
                        field: *self,
                        val_odd,
                        unit,
                    });
                }
            }
        } else {
            let u = self.least_nonresidue();
            for &val_odd in &[false, true] {
                for &unit in &[1u64, u] {
                    out.push(SquareClass {
                        field: *self,
                        val_odd,
                        unit,
                    });
                }
            }
        }
        out
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q_{}", self.p)
    }
}

/// p-adic valuation of a nonzero integer.
fn int_valuation(n: &BigInt, p: u64) -> u64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0u64;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

/// p-adic valuation of a nonzero rational.
pub fn padic_valuation(x: &BigRational, p: u64) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroSquareClass);
    }
    Ok(int_valuation(x.numer(), p) as i64 - int_valuation(x.denom(), p) as i64)
}

fn reduce_mod(n: &BigInt, m: u64) -> u64 {
    let m_big = BigInt::from(m);
    let r = ((n % &m_big) + &m_big) % &m_big;
    let (_, digits) = r.to_u64_digits();
    *digits.first().unwrap_or(&0)
}

/// An element of Q_p^× / (Q_p^×)², stored in canonical form: a valuation
/// parity bit and a canonical unit representative (1 or the least
/// non-residue for odd p; one of 1, 3, 5, 7 for p = 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SquareClass {
    field: PrimeField,
    val_odd: bool,
    unit: u64,
}

impl SquareClass {
    /// Square class of a nonzero rational number.
    pub fn from_rational(x: &BigRational, field: PrimeField) -> Result<Self> {
        if x.is_zero() {
            return Err(Error::ZeroSquareClass);
        }
        let p = field.p();
        let vn = int_valuation(x.numer(), p);
        let vd = int_valuation(x.denom(), p);
        let val_odd = (vn + vd) % 2 == 1;
        // Strip all powers of p from numerator and denominator.
        let p_big = BigInt::from(p);
        let mut num = x.numer().clone();
        for _ in 0..vn {
            num /= &p_big;
        }
        let mut den = x.denom().clone();
        for _ in 0..vd {
            den /= &p_big;
        }
        let unit = if p == 2 {
            // Odd unit class mod 8; an odd square is 1 mod 8 and an odd
            // denominator is its own inverse mod 8.
            let n8 = reduce_mod(&num, 8);
            let d8 = reduce_mod(&den, 8);
            n8 * d8 % 8
        } else {
            let np = reduce_mod(&num, p);
            let dp = reduce_mod(&den, p);
            let dinv = modpow(dp, p - 2, p);
            let r = np * dinv % p;
            if legendre(r, p) == 1 {
                1
            } else {
                field.least_nonresidue()
            }
        };
        Ok(SquareClass {
            field,
            val_odd,
            unit,
        })
    }

    /// Square class of a nonzero integer.
    pub fn from_integer(x: i64, field: PrimeField) -> Result<Self> {
        SquareClass::from_rational(&BigRational::from(BigInt::from(x)), field)
    }

    /// The trivial class.
    pub fn one(field: PrimeField) -> Self {
        SquareClass {
            field,
            val_odd: false,
            unit: 1,
        }
    }

    /// The class of −1.
    pub fn minus_one(field: PrimeField) -> Self {
        SquareClass::from_integer(-1, field).expect("-1 is nonzero")
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_trivial(&self) -> bool {
        !self.val_odd && self.unit == 1
    }

    /// Smallest positive integer representative: `unit · p^(valuation parity)`.
    pub fn representative(&self) -> u64 {
        if self.val_odd {
            self.unit * self.field.p()
        } else {
            self.unit
        }
    }

    /// Representative as an exact rational, for embedding into algebra
    /// computations.
    pub fn representative_rational(&self) -> BigRational {
        BigRational::from(BigInt::from(self.representative()))
    }

    /// Position in the canonical ordering of [`PrimeField::square_classes`].
    pub fn index(&self) -> usize {
        let unit_idx = if self.field.p() == 2 {
            ((self.unit - 1) / 2) as usize
        } else if self.unit == 1 {
            0
        } else {
            1
        };
        let stride = self.field.num_square_classes() / 2;
        if self.val_odd {
            stride + unit_idx
        } else {
            unit_idx
        }
    }

    /// Inverse in the square-class group; every class has order dividing 2.
    pub fn inverse(&self) -> Self {
        *self
    }
}

impl Mul for SquareClass {
    type Output = SquareClass;

    fn mul(self, rhs: SquareClass) -> SquareClass {
        assert_eq!(
            self.field, rhs.field,
            "square classes over different primes cannot be multiplied"
        );
        let p = self.field.p();
        let val_odd = self.val_odd != rhs.val_odd;
        let unit = if p == 2 {
            self.unit * rhs.unit % 8
        } else {
            // Product of two non-residues is a residue.
            if (self.unit == 1) == (rhs.unit == 1) {
                1
            } else {
                self.field.least_nonresidue()
            }
        };
        SquareClass {
            field: self.field,
            val_odd,
            unit,
        }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.representative())
    }
}

/// Hilbert symbol (a, b) over Q_p via the classical closed forms.
///
/// Returns +1 exactly when z² = ax² + by² has a nontrivial solution.
pub fn hilbert(a: SquareClass, b: SquareClass) -> Result<i32> {
    if a.field != b.field {
        return Err(Error::PrimeMismatch(a.field.p(), b.field.p()));
    }
    let p = a.field.p();
    let alpha = a.val_odd as u32;
    let beta = b.val_odd as u32;
    if p == 2 {
        // ε(u) = (u−1)/2 mod 2, ω(u) = (u²−1)/8 mod 2 on odd units mod 8.
        let eps = |u: u64| ((u - 1) / 2) % 2;
        let omega = |u: u64| ((u * u - 1) / 8) % 2;
        let expo =
            eps(a.unit) * eps(b.unit) + alpha as u64 * omega(b.unit) + beta as u64 * omega(a.unit);
        Ok(if expo % 2 == 0 { 1 } else { -1 })
    } else {
        let eps_p = ((p - 1) / 2 % 2) as u32;
        let leg = |u: u64| if u == 1 { 1i32 } else { -1 };
        let mut sign = 1i32;
        if alpha * beta * eps_p % 2 == 1 {
            sign = -sign;
        }
        if beta % 2 == 1 {
            sign *= leg(a.unit);
        }
        if alpha % 2 == 1 {
            sign *= leg(b.unit);
        }
        Ok(sign)
    }
}

/// Norm-residue sign character of the quadratic extension E = F(√delta):
/// sgn(x) = (delta, x), equal to +1 exactly on norms from E.
pub fn sgn_ext(delta: SquareClass, x: SquareClass) -> Result<i32> {
    if delta.is_trivial() {
        return Err(Error::TrivialExtension);
    }
    hilbert(delta, x)
}

/// A quadratic field extension E = F(√delta) of F = Q_p, delta non-trivial.
/// The split algebra F ⊕ F is represented separately by its own tag where
/// needed and never by this type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadExtension {
    delta: SquareClass,
}

impl QuadExtension {
    pub fn new(delta: SquareClass) -> Result<Self> {
        if delta.is_trivial() {
            return Err(Error::TrivialExtension);
        }
        Ok(QuadExtension { delta })
    }

    pub fn delta(&self) -> SquareClass {
        self.delta
    }

    pub fn field(&self) -> PrimeField {
        self.delta.field()
    }

    /// Norm-residue sign of a square class with respect to this extension.
    pub fn sgn(&self, x: SquareClass) -> Result<i32> {
        sgn_ext(self.delta, x)
    }

    /// The index-2 subgroup of square classes that are norms from E.
    pub fn norm_classes(&self) -> Vec<SquareClass> {
        self.field()
            .square_classes()
            .into_iter()
            .filter(|c| sgn_ext(self.delta, *c) == Ok(1))
            .collect()
    }

    /// First square class in canonical order that is not a norm from E.
    pub fn canonical_nonnorm(&self) -> SquareClass {
        self.field()
            .square_classes()
            .into_iter()
            .find(|c| sgn_ext(self.delta, *c) == Ok(-1))
            .expect("the norm character of a field extension is non-trivial")
    }
}

/// A normalized p-adic absolute value |x| = p^(−v), stored as the valuation v
/// so that products become exact integer sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AbsValue {
    field: PrimeField,
    valuation: i64,
}

impl AbsValue {
    pub fn one(field: PrimeField) -> Self {
        AbsValue {
            field,
            valuation: 0,
        }
    }

    pub fn from_valuation(field: PrimeField, valuation: i64) -> Self {
        AbsValue { field, valuation }
    }

    /// |x| for a nonzero rational x.
    pub fn of_rational(x: &BigRational, field: PrimeField) -> Result<Self> {
        Ok(AbsValue {
            field,
            valuation: padic_valuation(x, field.p())?,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// The valuation v with |x| = p^(−v).
    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn pow(&self, n: i64) -> Self {
        AbsValue {
            field: self.field,
            valuation: self.valuation * n,
        }
    }
}

impl Mul for AbsValue {
    type Output = AbsValue;

    fn mul(self, rhs: AbsValue) -> AbsValue {
        assert_eq!(
            self.field, rhs.field,
            "absolute values over different primes cannot be multiplied"
        );
        AbsValue {
            field: self.field,
            valuation: self.valuation + rhs.valuation,
        }
    }
}

impl fmt::Display for AbsValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^({})", self.field.p(), -self.valuation)
    }
}
