//! Quadratic spaces over Q_p: invariants, classification, Witt decomposition,
//! split/quasi-split decisions for their special orthogonal groups, the
//! split-after-augmentation condition on even spaces, and the admissible
//! dimension/discriminant combinatorics for a compatible pair of spaces.
//!
//! A space is stored diagonalized, entry by entry, as square classes; the
//! complete isomorphism invariant over Q_p is the triple
//! (dimension, discriminant, Hasse invariant), with the discriminant
//! normalized as δ(q) = (−1)^⌊d/2⌋·det(q).

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::padic::{hilbert, sgn_ext, PrimeField, SquareClass};

/// Hilbert symbol for classes known to live over the same prime.
fn h(a: SquareClass, b: SquareClass) -> i32 {
    hilbert(a, b).expect("classes constructed over a common field")
}

/// Isotropy from invariants alone (dimension, determinant, Hasse):
/// dimension ≥ 5 is always isotropic; the small dimensions follow the
/// classical criteria over a p-adic field.
fn isotropic_by_invariants(field: PrimeField, d: usize, det: SquareClass, hasse: i32) -> bool {
    let m1 = SquareClass::minus_one(field);
    match d {
        0 | 1 => false,
        2 => det == m1,
        3 => hasse == h(m1, m1 * det),
        4 => !det.is_trivial() || hasse == h(m1, m1),
        _ => true,
    }
}

/// A nondegenerate quadratic space over Q_p in diagonal form, with its
/// derived invariants precomputed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticSpace {
    field: PrimeField,
    diag: Vec<SquareClass>,
    det: SquareClass,
    disc: SquareClass,
    hasse: i32,
    witt_index: usize,
}

impl QuadraticSpace {
    /// Build a space from diagonal entries given as square classes.
    pub fn from_diagonal(field: PrimeField, diag: Vec<SquareClass>) -> Self {
        for c in &diag {
            assert_eq!(c.field(), field, "diagonal entry over the wrong prime");
        }
        let d = diag.len();
        let mut det = SquareClass::one(field);
        for &c in &diag {
            det = det * c;
        }
        let m1 = SquareClass::minus_one(field);
        let disc = if (d / 2) % 2 == 1 { m1 * det } else { det };
        let mut hasse = 1i32;
        for i in 0..d {
            for j in (i + 1)..d {
                hasse *= h(diag[i], diag[j]);
            }
        }
        // Witt index by peeling hyperbolic planes off at the invariant level:
        // q ≅ H ⊥ q₁ gives det₁ = −det and hasse₁ = hasse·(−1, det₁).
        let mut dd = d;
        let mut det_k = det;
        let mut hasse_k = hasse;
        let mut witt_index = 0;
        while isotropic_by_invariants(field, dd, det_k, hasse_k) {
            det_k = m1 * det_k;
            hasse_k *= h(m1, det_k);
            dd -= 2;
            witt_index += 1;
        }
        QuadraticSpace {
            field,
            diag,
            det,
            disc,
            hasse,
            witt_index,
        }
    }

    /// Build a space from nonzero rational diagonal entries.
    pub fn from_rationals(field: PrimeField, entries: &[BigRational]) -> Result<Self> {
        let diag = entries
            .iter()
            .map(|x| SquareClass::from_rational(x, field))
            .collect::<Result<Vec<_>>>()?;
        Ok(QuadraticSpace::from_diagonal(field, diag))
    }

    /// Build a space from a symmetric nondegenerate rational Gram matrix by
    /// congruence diagonalization.
    pub fn from_gram(field: PrimeField, gram: &[Vec<BigRational>]) -> Result<Self> {
        let n = gram.len();
        for row in gram {
            if row.len() != n {
                return Err(Error::Validation("Gram matrix is not square".into()));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::Validation("Gram matrix is not symmetric".into()));
                }
            }
        }
        let mut m: Vec<Vec<BigRational>> = gram.to_vec();
        let mut pivots = Vec::with_capacity(n);
        for i in 0..n {
            if m[i][i].is_zero() {
                if let Some(j) = (i + 1..n).find(|&j| !m[j][j].is_zero()) {
                    // Swap basis vectors i and j.
                    m.swap(i, j);
                    for row in m.iter_mut() {
                        row.swap(i, j);
                    }
                } else if let Some(j) = (i + 1..n).find(|&j| !m[i][j].is_zero()) {
                    // All remaining diagonal entries vanish; replacing e_i by
                    // e_i + e_j makes the new (i, i) entry 2·m[i][j] ≠ 0.
                    for k in 0..n {
                        let t = m[j][k].clone();
                        m[i][k] += t;
                    }
                    for row in m.iter_mut() {
                        let t = row[j].clone();
                        row[i] += t;
                    }
                } else {
                    return Err(Error::Validation("Gram matrix is degenerate".into()));
                }
            }
            let pivot = m[i][i].clone();
            for j in (i + 1)..n {
                let factor = &m[i][j] / &pivot;
                for k in 0..n {
                    let t = &factor * &m[i][k];
                    m[j][k] -= t;
                }
                for row in m.iter_mut() {
                    let t = &factor * &row[i];
                    row[j] -= t;
                }
            }
            pivots.push(pivot);
        }
        QuadraticSpace::from_rationals(field, &pivots)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn diag(&self) -> &[SquareClass] {
        &self.diag
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn det(&self) -> SquareClass {
        self.det
    }

    /// Normalized discriminant δ(q) = (−1)^⌊d/2⌋·det(q).
    pub fn disc(&self) -> SquareClass {
        self.disc
    }

    pub fn hasse(&self) -> i32 {
        self.hasse
    }

    pub fn witt_index(&self) -> usize {
        self.witt_index
    }

    pub fn is_isotropic(&self) -> bool {
        self.witt_index > 0
    }

    /// True when the space is a sum of hyperbolic planes.
    pub fn is_hyperbolic(&self) -> bool {
        2 * self.witt_index == self.dim()
    }

    /// Orthogonal direct sum.
    pub fn direct_sum(&self, other: &QuadraticSpace) -> QuadraticSpace {
        assert_eq!(self.field, other.field, "spaces over different primes");
        let mut diag = self.diag.clone();
        diag.extend_from_slice(&other.diag);
        QuadraticSpace::from_diagonal(self.field, diag)
    }

    /// The space αq obtained by scaling the form by a square class.
    pub fn scale(&self, alpha: SquareClass) -> QuadraticSpace {
        let diag = self.diag.iter().map(|&c| alpha * c).collect();
        QuadraticSpace::from_diagonal(self.field, diag)
    }
}

impl fmt::Display for QuadraticSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, c) in self.diag.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ">")
    }
}

/// Isomorphism over Q_p: equality of (dimension, discriminant, Hasse).
pub fn is_isomorphic(q1: &QuadraticSpace, q2: &QuadraticSpace) -> bool {
    assert_eq!(q1.field(), q2.field(), "spaces over different primes");
    q1.dim() == q2.dim() && q1.disc() == q2.disc() && q1.hasse() == q2.hasse()
}

/// Canonical diagonal form with the given dimension, determinant and Hasse
/// invariant, or None when no such space exists. The representative pads
/// with 1-entries and places the invariants in a short tail: a rank-2 tail
/// ⟨a, det·a⟩ with (a, −det) = hasse when possible, and a rank-3 tail for the
/// one combination (det = class(−1), hasse = −1, d ≥ 3) the rank-2 tail
/// cannot reach.
pub fn canonical_form(
    field: PrimeField,
    d: usize,
    det: SquareClass,
    hasse: i32,
) -> Option<Vec<SquareClass>> {
    let one = SquareClass::one(field);
    let m1 = SquareClass::minus_one(field);
    match d {
        0 => (det.is_trivial() && hasse == 1).then(Vec::new),
        1 => (hasse == 1).then(|| vec![det]),
        _ => {
            for a in field.square_classes() {
                if h(a, m1 * det) == hasse {
                    let mut diag = vec![one; d - 2];
                    diag.push(a);
                    diag.push(det * a);
                    return Some(diag);
                }
            }
            // The rank-2 tail only misses (det, hasse) = (class(−1), −1).
            if d < 3 {
                return None;
            }
            for a in field.square_classes() {
                for b in field.square_classes() {
                    let c = det * a * b;
                    if h(a, b) * h(a, c) * h(b, c) == hasse {
                        let mut diag = vec![one; d - 3];
                        diag.extend_from_slice(&[a, b, c]);
                        return Some(diag);
                    }
                }
            }
            unreachable!("every (det, hasse) pair is realizable in rank 3")
        }
    }
}

/// One canonical representative per isomorphism class with the given
/// dimension and discriminant, Hasse +1 first. The list has length 2 for
/// d ≥ 3 and for d = 2 with non-trivial discriminant, length 1 for the
/// remaining realizable cases, and length 0 when nothing exists (d = 0 with
/// non-trivial discriminant).
pub fn classify(field: PrimeField, d: usize, disc: SquareClass) -> Vec<QuadraticSpace> {
    let m1 = SquareClass::minus_one(field);
    let det = if (d / 2) % 2 == 1 { m1 * disc } else { disc };
    [1i32, -1]
        .iter()
        .filter_map(|&hasse| canonical_form(field, d, det, hasse))
        .map(|diag| QuadraticSpace::from_diagonal(field, diag))
        .collect()
}

/// Whether the special orthogonal group of an odd-dimensional space is
/// split: the Witt index must be maximal, (d−1)/2.
pub fn so_is_split_odd(q: &QuadraticSpace) -> Result<bool> {
    if q.dim() % 2 == 0 {
        return Err(Error::ExpectedOddDim(q.dim()));
    }
    Ok(q.witt_index() == (q.dim() - 1) / 2)
}

/// The sign μ attached to an odd-dimensional space: +1 when its special
/// orthogonal group is split, −1 otherwise.
pub fn mu(q: &QuadraticSpace) -> Result<i32> {
    Ok(if so_is_split_odd(q)? { 1 } else { -1 })
}

/// Quasi-splitness of the special orthogonal group in either parity. Odd
/// dimension: quasi-split means split. Even dimension: automatic for
/// non-trivial discriminant; for trivial discriminant the space must be
/// hyperbolic.
pub fn so_is_quasi_split(q: &QuadraticSpace) -> bool {
    if q.dim() % 2 == 1 {
        q.witt_index() == (q.dim() - 1) / 2
    } else if q.disc().is_trivial() {
        q.is_hyperbolic()
    } else {
        true
    }
}

/// The binary piece left after removing all hyperbolic planes from an
/// even-dimensional space with non-trivial discriminant is the norm form of
/// E = F(√δ) twisted by a scalar η; this returns one representative of η,
/// well defined modulo norms from E. The binary piece has diagonal model
/// ⟨2η, −2ηδ⟩.
pub fn extract_eta(q: &QuadraticSpace) -> Result<SquareClass> {
    if q.dim() % 2 == 1 {
        return Err(Error::ExpectedEvenDim(q.dim()));
    }
    let delta = q.disc();
    if delta.is_trivial() {
        return Err(Error::TrivialDiscriminant(
            "a hyperbolic-type space has no twisting scalar",
        ));
    }
    // The anisotropic kernel is exactly binary here; its Hasse invariant is
    // obtained by peeling witt_index hyperbolic planes off.
    let field = q.field();
    let m1 = SquareClass::minus_one(field);
    let mut det_k = q.det();
    let mut hasse_k = q.hasse();
    for _ in 0..q.witt_index() {
        det_k = m1 * det_k;
        hasse_k *= h(m1, det_k);
    }
    let two = SquareClass::from_integer(2, field).expect("2 is nonzero");
    field
        .square_classes()
        .into_iter()
        .find(|&eta| h(two * eta, m1 * two * eta * delta) == hasse_k)
        .ok_or_else(|| Error::Internal("no scalar matches the anisotropic kernel".into()))
}

/// The split-after-augmentation condition on an even-dimensional space:
/// trivial discriminant requires the space to be hyperbolic; otherwise the
/// scalar η of [`extract_eta`] must satisfy sgn_ext(δ, η·nu0) = +1.
pub fn qd_condition(q: &QuadraticSpace, nu0: SquareClass) -> Result<bool> {
    if q.dim() % 2 == 1 {
        return Err(Error::ExpectedEvenDim(q.dim()));
    }
    if q.disc().is_trivial() {
        Ok(q.is_hyperbolic())
    } else {
        let eta = extract_eta(q)?;
        Ok(sgn_ext(q.disc(), eta * nu0)? == 1)
    }
}

/// The square classes parametrizing regular nilpotent orbits for the even
/// space q: all classes when δ(q) = 1 (including the zero space), otherwise
/// the norm coset of η. Requires the split-after-augmentation condition.
pub fn nilpotent_param_set(q: &QuadraticSpace, nu0: SquareClass) -> Result<Vec<SquareClass>> {
    if !qd_condition(q, nu0)? {
        return Err(Error::NotQuasiSplitReference(
            "the augmented space is not split, so there is no regular orbit to parametrize",
        ));
    }
    let field = q.field();
    if q.disc().is_trivial() {
        return Ok(field.square_classes());
    }
    let eta = extract_eta(q)?;
    Ok(field
        .square_classes()
        .into_iter()
        .filter(|&nu| sgn_ext(q.disc(), eta * nu) == Ok(1))
        .collect())
}

/// The reference odd space of dimension 2r+1 and parameter ν: a line ⟨2ν⟩
/// plus r hyperbolic planes. Its special orthogonal group is always split.
pub fn build_z_form(field: PrimeField, r: usize, nu: SquareClass) -> QuadraticSpace {
    let two = SquareClass::from_integer(2, field).expect("2 is nonzero");
    let one = SquareClass::one(field);
    let m1 = SquareClass::minus_one(field);
    let mut diag = vec![two * nu];
    for _ in 0..r {
        diag.push(one);
        diag.push(m1);
    }
    QuadraticSpace::from_diagonal(field, diag)
}

/// A compatible pair of spaces (even q, odd q′) for the restriction problem:
/// the larger space must be isomorphic to the smaller one plus the reference
/// odd space of dimension |d−d′|, with parameter −ν₀ when q is smaller and
/// +ν₀ when q′ is smaller.
#[derive(Debug, Clone)]
pub struct GpPairConfig {
    q: QuadraticSpace,
    q_prime: QuadraticSpace,
    nu0: SquareClass,
    r: usize,
}

impl GpPairConfig {
    pub fn q(&self) -> &QuadraticSpace {
        &self.q
    }

    pub fn q_prime(&self) -> &QuadraticSpace {
        &self.q_prime
    }

    pub fn nu0(&self) -> SquareClass {
        self.nu0
    }

    /// r = (|d − d′| − 1)/2.
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn field(&self) -> PrimeField {
        self.q.field()
    }

    /// True when dim q < dim q′.
    pub fn q_is_smaller(&self) -> bool {
        self.q.dim() < self.q_prime.dim()
    }
}

/// Validate a pair of spaces against the compatibility requirement and
/// package it with ν₀ and r.
pub fn validate_gp_pair(
    q: &QuadraticSpace,
    q_prime: &QuadraticSpace,
    nu0: SquareClass,
) -> Result<GpPairConfig> {
    if q.dim() % 2 == 1 {
        return Err(Error::GpPairInvalid(format!(
            "first space must have even dimension, got {}",
            q.dim()
        )));
    }
    if q_prime.dim() % 2 == 0 {
        return Err(Error::GpPairInvalid(format!(
            "second space must have odd dimension, got {}",
            q_prime.dim()
        )));
    }
    if q.field() != q_prime.field() || nu0.field() != q.field() {
        return Err(Error::GpPairInvalid(
            "spaces and nu0 must share one prime".into(),
        ));
    }
    let field = q.field();
    let m1 = SquareClass::minus_one(field);
    let (d, d_prime) = (q.dim(), q_prime.dim());
    let gap = d.abs_diff(d_prime);
    let r = (gap - 1) / 2;
    let compatible = if d < d_prime {
        is_isomorphic(q_prime, &q.direct_sum(&build_z_form(field, r, m1 * nu0)))
    } else {
        is_isomorphic(q, &q_prime.direct_sum(&build_z_form(field, r, nu0)))
    };
    if !compatible {
        return Err(Error::GpPairInvalid(format!(
            "the larger space is not the smaller one plus the dimension-{gap} reference space: \
             invariants (d, disc, hasse) = ({}, {}, {}) vs ({}, {}, {})",
            d,
            q.disc(),
            q.hasse(),
            d_prime,
            q_prime.disc(),
            q_prime.hasse()
        )));
    }
    Ok(GpPairConfig {
        q: q.clone(),
        q_prime: q_prime.clone(),
        nu0,
        r,
    })
}

/// All admissible (𝐝, 𝛅) pairs for a validated pair of spaces:
/// 𝐝 even with 0 ≤ 𝐝 ≤ inf(d, d′); 𝐝 ≥ 2 unless both special orthogonal
/// groups are quasi-split; 𝛅 = 1 when 𝐝 = 0; 𝛅 = δ(q) when 𝐝 = inf(d, d′);
/// 𝛅 ≠ 1 when 𝐝 = 2.
pub fn dset(cfg: &GpPairConfig) -> Vec<(usize, SquareClass)> {
    let field = cfg.field();
    let inf = cfg.q.dim().min(cfg.q_prime.dim());
    let both_quasi_split =
        so_is_quasi_split(&cfg.q) && so_is_quasi_split(&cfg.q_prime);
    let mut out = Vec::new();
    for dd in (0..=inf).step_by(2) {
        if dd == 0 && !both_quasi_split {
            continue;
        }
        for delta in field.square_classes() {
            if dd == 0 && !delta.is_trivial() {
                continue;
            }
            if dd == inf && delta != cfg.q.disc() {
                continue;
            }
            if dd == 2 && delta.is_trivial() {
                continue;
            }
            out.push((dd, delta));
        }
    }
    out
}

/// Whether a space with the given invariant triple exists and has
/// quasi-split special orthogonal group together with its augmentation by
/// the reference odd space of dimension 2r+1 and parameter ν.
fn complement_passes(
    field: PrimeField,
    dim: usize,
    det: SquareClass,
    hasse: i32,
    r: usize,
    nu: SquareClass,
) -> bool {
    match canonical_form(field, dim, det, hasse) {
        None => false,
        Some(diag) => {
            let q1 = QuadraticSpace::from_diagonal(field, diag);
            so_is_quasi_split(&q1)
                && so_is_quasi_split(&q1.direct_sum(&build_z_form(field, r, nu)))
        }
    }
}

/// The unique isomorphism class (W, q_W) of dimension 𝐝 and discriminant 𝛅
/// admitting a complement q₁ in the smaller space of the pair such that both
/// SO(q₁) and SO(q₁ ⊕ Z) are quasi-split, where Z is the reference odd space
/// of dimension |d − d′| with parameter −ν₀ (q smaller) or ν₀ (q′ smaller).
pub fn w_space(cfg: &GpPairConfig, dd: usize, delta: SquareClass) -> Result<QuadraticSpace> {
    if !dset(cfg).contains(&(dd, delta)) {
        return Err(Error::NotInDset {
            dd,
            delta: delta.to_string(),
        });
    }
    let field = cfg.field();
    let m1 = SquareClass::minus_one(field);
    let (small, z_param) = if cfg.q_is_smaller() {
        (&cfg.q, m1 * cfg.nu0)
    } else {
        (&cfg.q_prime, cfg.nu0)
    };
    let mut winners = Vec::new();
    for cand in classify(field, dd, delta) {
        let dim_c = small.dim() - cand.dim();
        let det_c = small.det() * cand.det();
        let hasse_c = small.hasse() * cand.hasse() * h(cand.det(), det_c);
        if complement_passes(field, dim_c, det_c, hasse_c, cfg.r(), z_param) {
            winners.push(cand);
        }
    }
    match winners.len() {
        1 => Ok(winners.pop().expect("non-empty")),
        n => Err(Error::Internal(format!(
            "expected exactly one admissible class of dimension {dd}, found {n}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{invariant_census, isotropic_bruteforce};

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn cls(x: i64, p: u64) -> SquareClass {
        SquareClass::from_integer(x, f(p)).unwrap()
    }

    fn space(entries: &[i64], p: u64) -> QuadraticSpace {
        QuadraticSpace::from_diagonal(f(p), entries.iter().map(|&x| cls(x, p)).collect())
    }

    #[test]
    fn invariants_of_basic_spaces() {
        let hyp = space(&[1, -1], 3);
        assert_eq!(hyp.dim(), 2);
        assert!(hyp.disc().is_trivial());
        assert_eq!(hyp.witt_index(), 1);
        assert_eq!(hyp.hasse(), 1);

        let zero = space(&[], 3);
        assert_eq!(zero.dim(), 0);
        assert!(zero.disc().is_trivial());
        assert_eq!(zero.witt_index(), 0);
        assert!(zero.is_hyperbolic());

        let four = space(&[1, 1, 1, 1], 7);
        assert_eq!(four.witt_index(), 2);
        assert!(four.is_hyperbolic());
    }

    #[test]
    fn witt_index_agrees_with_isotropy_search() {
        for p in [2u64, 3, 5] {
            for d in 0..=4 {
                for disc in f(p).square_classes() {
                    for q in classify(f(p), d, disc) {
                        assert_eq!(
                            q.is_isotropic(),
                            isotropic_bruteforce(f(p), q.diag()),
                            "p = {p}, q = {q}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn witt_index_superadditive_on_sums() {
        for p in [2u64, 3] {
            let mut smalls = Vec::new();
            for d in 1..=2 {
                for disc in f(p).square_classes() {
                    smalls.extend(classify(f(p), d, disc));
                }
            }
            for a in &smalls {
                for b in &smalls {
                    let sum = a.direct_sum(b);
                    assert!(sum.witt_index() >= a.witt_index() + b.witt_index());
                }
            }
        }
    }

    #[test]
    fn isomorphism_by_invariants() {
        let hyp = space(&[1, -1], 3);
        let hyp2 = space(&[2, -2], 3);
        assert!(is_isomorphic(&hyp, &hyp));
        assert!(is_isomorphic(&hyp, &hyp2));
        let two_classes = classify(f(3), 4, SquareClass::one(f(3)));
        assert_eq!(two_classes.len(), 2);
        assert!(!is_isomorphic(&two_classes[0], &two_classes[1]));
    }

    #[test]
    fn classification_counts() {
        for p in [2u64, 3, 5] {
            let one = SquareClass::one(f(p));
            assert_eq!(classify(f(p), 0, one).len(), 1);
            assert_eq!(classify(f(p), 2, one).len(), 1);
            for disc in f(p).square_classes() {
                assert_eq!(classify(f(p), 1, disc).len(), 1);
                if !disc.is_trivial() {
                    assert_eq!(classify(f(p), 0, disc).len(), 0);
                    assert_eq!(classify(f(p), 2, disc).len(), 2);
                }
                for d in 3..=5 {
                    assert_eq!(classify(f(p), d, disc).len(), 2);
                }
            }
        }
    }

    #[test]
    fn classification_matches_enumeration_census() {
        // Every (det, hasse) pair realized by some diagonal tuple appears in
        // classify, and vice versa.
        for p in [2u64, 3] {
            for d in 0..=4 {
                let census = invariant_census(f(p), d);
                let mut classified = std::collections::BTreeSet::new();
                for disc in f(p).square_classes() {
                    for q in classify(f(p), d, disc) {
                        assert!(
                            census.contains_key(&(q.det().index(), q.hasse())),
                            "class not realized by any tuple: p = {p}, {q}"
                        );
                        classified.insert((q.det().index(), q.hasse()));
                    }
                }
                assert_eq!(
                    classified,
                    census.keys().copied().collect(),
                    "p = {p}, d = {d}"
                );
            }
        }
    }

    #[test]
    fn split_odd_decisions() {
        assert!(so_is_split_odd(&space(&[5], 5)).unwrap());
        assert!(so_is_split_odd(&space(&[1, -1, 3], 5)).unwrap());
        // An anisotropic ternary space is not split.
        let aniso = space(&[1, -2, -3], 3);
        assert_eq!(aniso.witt_index(), 0);
        assert!(!so_is_split_odd(&aniso).unwrap());
        assert_eq!(mu(&aniso).unwrap(), -1);
        assert_eq!(
            so_is_split_odd(&space(&[1, -1], 3)),
            Err(Error::ExpectedOddDim(2))
        );
    }

    #[test]
    fn quasi_split_decisions() {
        // Even, trivial discriminant: hyperbolic or nothing.
        assert!(so_is_quasi_split(&space(&[1, -1], 3)));
        assert!(!so_is_quasi_split(&space(&[1, -2, -3, 6], 3)));
        // Even, non-trivial discriminant: always quasi-split.
        assert!(so_is_quasi_split(&space(&[1, 3], 3)));
        // Zero space.
        assert!(so_is_quasi_split(&space(&[], 3)));
    }

    #[test]
    fn eta_extraction() {
        for p in [3u64, 5] {
            for delta in f(p).square_classes() {
                if delta.is_trivial() {
                    continue;
                }
                let d = delta.representative() as i64;
                // ⟨2, −2δ⟩ matches directly with η = 1.
                let q = space(&[2, -2 * d], p);
                assert_eq!(q.disc(), delta);
                assert!(extract_eta(&q).unwrap().is_trivial());
                // ⟨2u, −2uδ⟩ has η in the norm coset of u.
                let u = f(p).least_nonresidue() as i64;
                let qu = space(&[2 * u, -2 * u * d], p);
                let eta = extract_eta(&qu).unwrap();
                assert_eq!(sgn_ext(delta, eta * cls(u, p)).unwrap(), 1);
                // Padding with a hyperbolic plane does not change the coset.
                let padded = qu.direct_sum(&space(&[1, -1], p));
                let eta4 = extract_eta(&padded).unwrap();
                assert_eq!(sgn_ext(delta, eta * eta4).unwrap(), 1);
            }
        }
        assert!(matches!(
            extract_eta(&space(&[1, -1], 3)),
            Err(Error::TrivialDiscriminant(_))
        ));
        assert_eq!(extract_eta(&space(&[1], 3)), Err(Error::ExpectedEvenDim(1)));
    }

    #[test]
    fn qd_condition_examples() {
        for p in [3u64, 5] {
            for nu0 in f(p).square_classes() {
                assert!(qd_condition(&space(&[1, -1], p), nu0).unwrap());
                assert!(qd_condition(&space(&[], p), nu0).unwrap());
            }
        }
        // ⟨1, −δ⟩ with ν₀ a non-norm relative to η fails.
        let delta = cls(2, 3);
        let q = space(&[1, -2], 3);
        assert_eq!(q.disc(), delta);
        let eta = extract_eta(&q).unwrap();
        let bad_nu0 = f(3)
            .square_classes()
            .into_iter()
            .find(|&nu| sgn_ext(delta, eta * nu) == Ok(-1))
            .unwrap();
        assert!(!qd_condition(&q, bad_nu0).unwrap());
    }

    #[test]
    fn qd_condition_matches_augmented_split_check() {
        // The defining formulation: the space plus the line ⟨−2ν₀⟩ has split
        // special orthogonal group.
        for p in [2u64, 3, 5] {
            let m1 = SquareClass::minus_one(f(p));
            for d in [0usize, 2, 4] {
                for disc in f(p).square_classes() {
                    for q in classify(f(p), d, disc) {
                        for nu0 in f(p).square_classes() {
                            let augmented =
                                q.direct_sum(&build_z_form(f(p), 0, m1 * nu0));
                            assert_eq!(
                                qd_condition(&q, nu0).unwrap(),
                                so_is_split_odd(&augmented).unwrap(),
                                "p = {p}, q = {q}, nu0 = {nu0}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn qd_dichotomy_between_the_two_classes() {
        // For a fixed (d, δ) with two classes, exactly one satisfies the
        // condition for each ν₀.
        for p in [3u64, 5] {
            for d in [2usize, 4] {
                for disc in f(p).square_classes() {
                    let classes = classify(f(p), d, disc);
                    if classes.len() != 2 {
                        continue;
                    }
                    for nu0 in f(p).square_classes() {
                        let hits = classes
                            .iter()
                            .filter(|q| qd_condition(q, nu0).unwrap())
                            .count();
                        assert_eq!(hits, 1, "p = {p}, d = {d}, nu0 = {nu0}");
                    }
                }
            }
        }
    }

    #[test]
    fn nilpotent_parameters() {
        let one5 = SquareClass::one(f(5));
        // δ = 1: all classes.
        assert_eq!(
            nilpotent_param_set(&space(&[1, -1], 5), one5).unwrap().len(),
            4
        );
        assert_eq!(nilpotent_param_set(&space(&[], 5), one5).unwrap().len(), 4);
        // δ ≠ 1: the norm coset, of index 2.
        let q = space(&[2, -4], 5);
        assert!(!q.disc().is_trivial());
        let eta = extract_eta(&q).unwrap();
        let good_nu0 = f(5)
            .square_classes()
            .into_iter()
            .find(|&nu| sgn_ext(q.disc(), eta * nu) == Ok(1))
            .unwrap();
        let set = nilpotent_param_set(&q, good_nu0).unwrap();
        assert_eq!(set.len(), 2);
        assert!(set.contains(&good_nu0));
        // Failing reference condition is an error.
        let bad_nu0 = f(5)
            .square_classes()
            .into_iter()
            .find(|&nu| sgn_ext(q.disc(), eta * nu) == Ok(-1))
            .unwrap();
        assert!(matches!(
            nilpotent_param_set(&q, bad_nu0),
            Err(Error::NotQuasiSplitReference(_))
        ));
    }

    #[test]
    fn z_form_shape() {
        for p in [2u64, 3, 5] {
            for nu in f(p).square_classes() {
                let line = build_z_form(f(p), 0, nu);
                assert_eq!(line.diag(), &[cls(2, p) * nu]);
                for r in 0..3 {
                    let z = build_z_form(f(p), r, nu);
                    assert_eq!(z.dim(), 2 * r + 1);
                    assert!(so_is_split_odd(&z).unwrap());
                }
            }
        }
        let z = build_z_form(f(3), 1, SquareClass::one(f(3)));
        assert!(is_isomorphic(&z, &space(&[2, 1, -1], 3)));
    }

    #[test]
    fn gp_pair_validation() {
        let p = 3u64;
        let nu0 = cls(1, p);
        let m1 = SquareClass::minus_one(f(p));
        // Zero space against a single line ⟨−2ν₀⟩.
        let q = space(&[], p);
        let q_prime = build_z_form(f(p), 0, m1 * nu0);
        let cfg = validate_gp_pair(&q, &q_prime, nu0).unwrap();
        assert_eq!(cfg.r(), 0);
        assert!(cfg.q_is_smaller());
        // Hyperbolic plane plus the line.
        let q = space(&[1, -1], p);
        let q_prime = q.direct_sum(&build_z_form(f(p), 0, m1 * nu0));
        assert!(validate_gp_pair(&q, &q_prime, nu0).is_ok());
        // Breaking the Hasse invariant of the larger space invalidates.
        let bad = QuadraticSpace::from_diagonal(
            f(p),
            canonical_form(f(p), q_prime.dim(), q_prime.det(), -q_prime.hasse()).unwrap(),
        );
        assert!(matches!(
            validate_gp_pair(&q, &bad, nu0),
            Err(Error::GpPairInvalid(_))
        ));
        // Parity errors.
        assert!(validate_gp_pair(&space(&[1], p), &q_prime, nu0).is_err());
        assert!(validate_gp_pair(&space(&[1, -1], p), &space(&[1, -1], p), nu0).is_err());
    }

    #[test]
    fn dset_zero_dimensional_base() {
        let p = 5u64;
        let nu0 = cls(1, p);
        let m1 = SquareClass::minus_one(f(p));
        let q = space(&[], p);
        let q_prime = build_z_form(f(p), 1, m1 * nu0);
        let cfg = validate_gp_pair(&q, &q_prime, nu0).unwrap();
        assert_eq!(dset(&cfg), vec![(0, SquareClass::one(f(p)))]);
    }

    #[test]
    fn dset_small_pair_with_nontrivial_disc() {
        // d = 2 with δ(q) ≠ 1: admissible pairs are (0,1) and (2, δ(q)).
        let p = 3u64;
        let q = space(&[2, -4], p);
        let delta = q.disc();
        assert!(!delta.is_trivial());
        let eta = extract_eta(&q).unwrap();
        let nu0 = f(p)
            .square_classes()
            .into_iter()
            .find(|&nu| sgn_ext(delta, eta * nu) == Ok(1))
            .unwrap();
        let m1 = SquareClass::minus_one(f(p));
        let q_prime = q.direct_sum(&build_z_form(f(p), 0, m1 * nu0));
        assert!(so_is_split_odd(&q_prime).unwrap());
        let cfg = validate_gp_pair(&q, &q_prime, nu0).unwrap();
        assert_eq!(
            dset(&cfg),
            vec![(0, SquareClass::one(f(p))), (2, delta)]
        );
    }

    #[test]
    fn dset_excludes_zero_when_not_quasi_split() {
        let p = 3u64;
        let nu0 = cls(1, p);
        let m1 = SquareClass::minus_one(f(p));
        // The 4-dimensional anisotropic space: trivial disc, not hyperbolic.
        let q = space(&[1, -2, -3, 6], p);
        assert!(!so_is_quasi_split(&q));
        let q_prime = q.direct_sum(&build_z_form(f(p), 0, m1 * nu0));
        let cfg = validate_gp_pair(&q, &q_prime, nu0).unwrap();
        let ds = dset(&cfg);
        assert!(ds.iter().all(|&(dd, _)| dd >= 2));
        assert!(ds.contains(&(4, q.disc())));
    }

    #[test]
    fn w_space_across_admissible_pairs() {
        let p = 3u64;
        let m1 = SquareClass::minus_one(f(p));
        for nu0 in f(p).square_classes() {
            for d in [0usize, 2, 4] {
                for disc in f(p).square_classes() {
                    for q in classify(f(p), d, disc) {
                        let q_prime = q.direct_sum(&build_z_form(f(p), 1, m1 * nu0));
                        let cfg = validate_gp_pair(&q, &q_prime, nu0).unwrap();
                        for (dd, delta) in dset(&cfg) {
                            let w = w_space(&cfg, dd, delta).unwrap();
                            assert_eq!(w.dim(), dd);
                            assert_eq!(w.disc(), delta);
                            if dd == d {
                                assert!(is_isomorphic(&w, &q), "maximal case returns q itself");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn w_space_rejects_inadmissible_pairs() {
        let p = 3u64;
        let nu0 = cls(1, p);
        let m1 = SquareClass::minus_one(f(p));
        let q = space(&[1, -1], p);
        let q_prime = q.direct_sum(&build_z_form(f(p), 0, m1 * nu0));
        let cfg = validate_gp_pair(&q, &q_prime, nu0).unwrap();
        // (2, 1) violates the non-trivial-discriminant rule at 𝐝 = 2.
        assert!(matches!(
            w_space(&cfg, 2, SquareClass::one(f(p))),
            Err(Error::NotInDset { .. })
        ));
    }

    #[test]
    fn gram_matrix_input() {
        use num_bigint::BigInt;
        let rat = |n: i64| BigRational::from(BigInt::from(n));
        // An off-diagonal plane is hyperbolic.
        let gram = vec![vec![rat(0), rat(1)], vec![rat(1), rat(0)]];
        let q = QuadraticSpace::from_gram(f(3), &gram).unwrap();
        assert!(q.is_hyperbolic());
        // Diagonal entries survive as their classes.
        let gram = vec![
            vec![rat(2), rat(0), rat(0)],
            vec![rat(0), rat(3), rat(1)],
            vec![rat(0), rat(1), rat(5)],
        ];
        let q = QuadraticSpace::from_gram(f(3), &gram).unwrap();
        assert_eq!(q.dim(), 3);
        // Pivots are 2, 3 and the Schur complement 5 − 1/3 = 14/3 ~ 42.
        let direct = space(&[2, 3, 42], 3);
        assert!(is_isomorphic(&q, &direct));
        // Asymmetry and degeneracy are rejected.
        let asym = vec![vec![rat(0), rat(1)], vec![rat(2), rat(0)]];
        assert!(QuadraticSpace::from_gram(f(3), &asym).is_err());
        let degen = vec![vec![rat(1), rat(1)], vec![rat(1), rat(1)]];
        assert!(QuadraticSpace::from_gram(f(3), &degen).is_err());
    }

    #[test]
    fn scaling_preserves_even_disc_and_witt() {
        for p in [2u64, 3] {
            for disc in f(p).square_classes() {
                for q in classify(f(p), 4, disc) {
                    for alpha in f(p).square_classes() {
                        let scaled = q.scale(alpha);
                        assert_eq!(scaled.disc(), q.disc());
                        assert_eq!(scaled.witt_index(), q.witt_index());
                    }
                }
            }
        }
    }
}
