//! Brute-force oracles used to cross-check the closed-form arithmetic.
//!
//! Everything here decides questions by exhaustive search over residues mod
//! p^k (with k large enough for Hensel lifting) or over explicit sign
//! vectors, deliberately avoiding the closed formulas implemented elsewhere
//! in the crate. The test suite and the CLI `selftest` command compare the
//! two routes case by case.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::padic::{hilbert, PrimeField, SquareClass};

/// Working precision p^k for Hensel-safe searches: a primitive solution of a
/// diagonal quadratic equation mod p^k lifts to Z_p once k exceeds twice the
/// valuation of the relevant partial derivative, which is at most v_p(2) + 1
/// for square-class coefficients.
fn precision_exponent(p: u64) -> u32 {
    if p == 2 {
        7
    } else {
        3
    }
}

fn modulus(p: u64) -> u64 {
    p.pow(precision_exponent(p))
}

/// Hilbert symbol by direct search: decides whether z² = ax² + by² has a
/// primitive solution mod p^k, looping over (x, y) and testing membership of
/// ax² + by² in a precomputed set of squares. When x and y are both divisible
/// by p the candidate z must be a unit for the triple to be primitive.
pub fn hilbert_bruteforce(a: SquareClass, b: SquareClass) -> Result<i32> {
    if a.field() != b.field() {
        return Err(Error::PrimeMismatch(a.field().p(), b.field().p()));
    }
    let p = a.field().p();
    let m = modulus(p);
    let mut square_any = vec![false; m as usize];
    let mut square_unit = vec![false; m as usize];
    for z in 0..m {
        let zz = (z * z % m) as usize;
        square_any[zz] = true;
        if z % p != 0 {
            square_unit[zz] = true;
        }
    }
    let ar = a.representative() % m;
    let br = b.representative() % m;
    for x in 0..m {
        let ax2 = ar * (x * x % m) % m;
        for y in 0..m {
            let t = ((ax2 + br * (y * y % m)) % m) as usize;
            let solvable = if x % p != 0 || y % p != 0 {
                square_any[t]
            } else {
                square_unit[t]
            };
            if solvable {
                return Ok(1);
            }
        }
    }
    Ok(-1)
}

/// Decides isotropy of the diagonal form Σ aᵢxᵢ² by dynamic programming over
/// reachable sums mod p^k, tracking whether some coordinate is a unit; the
/// form is isotropic exactly when 0 is reachable with the unit flag set.
pub fn isotropic_bruteforce(field: PrimeField, diag: &[SquareClass]) -> bool {
    let p = field.p();
    let m = modulus(p) as usize;
    // reachable[v], reachable_unit[v]: v is a value of the partial sum, with
    // or without some unit coordinate among the variables consumed so far.
    let mut reachable = vec![false; m];
    let mut reachable_unit = vec![false; m];
    reachable[0] = true;
    for coeff in diag {
        assert_eq!(coeff.field(), field, "coefficient over the wrong prime");
        let c = coeff.representative() as usize % m;
        let mut next = vec![false; m];
        let mut next_unit = vec![false; m];
        for x in 0..m {
            let term = c * (x * x % m) % m;
            let x_is_unit = x % p as usize != 0;
            for v in 0..m {
                if !reachable[v] && !reachable_unit[v] {
                    continue;
                }
                let w = (v + term) % m;
                if reachable[v] {
                    next[w] = true;
                    if x_is_unit {
                        next_unit[w] = true;
                    }
                }
                if reachable_unit[v] {
                    next_unit[w] = true;
                }
            }
        }
        reachable = next;
        reachable_unit = next_unit;
    }
    reachable_unit[0]
}

/// Every (determinant index, Hasse invariant) pair realized by some diagonal
/// form of dimension d, found by enumerating all square-class tuples, with
/// the number of tuples realizing each pair.
pub fn invariant_census(field: PrimeField, d: usize) -> BTreeMap<(usize, i32), usize> {
    let classes = field.square_classes();
    let n = classes.len();
    let mut census = BTreeMap::new();
    let mut tuple = vec![0usize; d];
    loop {
        let diag: Vec<SquareClass> = tuple.iter().map(|&i| classes[i]).collect();
        let mut det = SquareClass::one(field);
        for &c in &diag {
            det = det * c;
        }
        let mut hasse = 1i32;
        for i in 0..d {
            for j in (i + 1)..d {
                hasse *= hilbert(diag[i], diag[j]).expect("same field");
            }
        }
        *census.entry((det.index(), hasse)).or_insert(0) += 1;
        // Advance the odometer.
        let mut k = 0;
        loop {
            if k == d {
                return census;
            }
            tuple[k] += 1;
            if tuple[k] < n {
                break;
            }
            tuple[k] = 0;
            k += 1;
        }
    }
}

/// Result of the sign-vector centralizer count for a parameter with the
/// given self-dual constituents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignGroupCensus {
    /// Number of admissible sign vectors.
    pub order: u64,
    /// Sign vector of the central element: bit i is lᵢ mod 2.
    pub z: Vec<u8>,
    /// Whether z itself satisfies the determinant constraint.
    pub z_admissible: bool,
}

/// Component-group order by brute force over sign vectors. Each matching
/// self-dual constituent (dimension Nᵢ, multiplicity lᵢ) contributes one sign
/// eᵢ acting by −1 on its Nᵢ-dimensional block; in the orthogonal case the
/// ambient determinant Π eᵢ^{Nᵢ} must be +1, in the symplectic case there is
/// no constraint.
pub fn component_group_bruteforce(items: &[(u64, u64)], ambient_orth: bool) -> SignGroupCensus {
    let k = items.len();
    let mut order = 0u64;
    for mask in 0u64..(1 << k) {
        let mut det_exponent = 0u64;
        for (i, &(n, _)) in items.iter().enumerate() {
            if mask >> i & 1 == 1 {
                det_exponent += n;
            }
        }
        if !ambient_orth || det_exponent % 2 == 0 {
            order += 1;
        }
    }
    let z: Vec<u8> = items.iter().map(|&(_, l)| (l % 2) as u8).collect();
    let z_det: u64 = items
        .iter()
        .zip(&z)
        .map(|(&(n, _), &bit)| n * bit as u64)
        .sum();
    SignGroupCensus {
        order,
        z,
        z_admissible: !ambient_orth || z_det % 2 == 0,
    }
}

/// Outcome of one oracle suite inside [`run_selftest`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfTestSuite {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
}

/// Aggregate report of all brute-force cross-checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfTestReport {
    pub suites: Vec<SelfTestSuite>,
}

impl SelfTestReport {
    pub fn failures(&self) -> usize {
        self.suites.iter().map(|s| s.failures).sum()
    }
}

/// Runs every module's brute-force oracle against its closed-form
/// counterpart for the given primes, counting cases and disagreements
/// instead of panicking. Backs the CLI `selftest` command.
pub fn run_selftest(primes: &[u64]) -> Result<SelfTestReport> {
    use crate::fiber::admissible_coset_odd;
    use crate::quadspace::{canonical_form, classify};
    use crate::wd::{component_group, IrredDescriptor, ParamKind, SelfDuality, WDParameter};
    use crate::xi::{XiEntry, XiFamily};

    let mut suites = Vec::new();

    // Closed-form Hilbert symbol against the mod-p^k search.
    let mut cases = 0;
    let mut failures = 0;
    for &p in primes {
        let field = PrimeField::new(p)?;
        for a in field.square_classes() {
            for b in field.square_classes() {
                cases += 1;
                if hilbert(a, b)? != hilbert_bruteforce(a, b)? {
                    failures += 1;
                }
            }
        }
    }
    suites.push(SelfTestSuite {
        name: "hilbert".into(),
        cases,
        failures,
    });

    // Isotropy of canonical forms against the dynamic-programming search.
    let mut cases = 0;
    let mut failures = 0;
    for &p in primes {
        let field = PrimeField::new(p)?;
        for d in 2..=4 {
            for disc in field.square_classes() {
                for q in classify(field, d, disc) {
                    cases += 1;
                    if q.is_isotropic() != isotropic_bruteforce(field, q.diag()) {
                        failures += 1;
                    }
                }
            }
        }
    }
    suites.push(SelfTestSuite {
        name: "isotropy".into(),
        cases,
        failures,
    });

    // Realizable (det, hasse) pairs: enumeration census against the
    // canonical-form constructor.
    let mut cases = 0;
    let mut failures = 0;
    for &p in primes {
        let field = PrimeField::new(p)?;
        for d in 1..=4 {
            let census = invariant_census(field, d);
            for det in field.square_classes() {
                for hasse in [1i32, -1] {
                    cases += 1;
                    let constructive = canonical_form(field, d, det, hasse).is_some();
                    let census_hit = census.contains_key(&(det.index(), hasse));
                    if constructive != census_hit {
                        failures += 1;
                    }
                }
            }
        }
    }
    suites.push(SelfTestSuite {
        name: "classification".into(),
        cases,
        failures,
    });

    // Component groups against the sign-vector centralizer count.
    let mut cases = 0;
    let mut failures = 0;
    {
        let field = PrimeField::new(*primes.first().unwrap_or(&3))?;
        let shapes: &[&[(u64, u64)]] = &[
            &[],
            &[(1, 1)],
            &[(2, 2)],
            &[(1, 1), (3, 1)],
            &[(2, 1), (4, 1)],
            &[(1, 1), (2, 2), (3, 1)],
        ];
        for shape in shapes {
            for kind in [ParamKind::Orthogonal, ParamKind::Symplectic] {
                if kind == ParamKind::Symplectic && shape.iter().any(|&(n, _)| n % 2 == 1) {
                    continue;
                }
                cases += 1;
                let items: Vec<(IrredDescriptor, usize)> = shape
                    .iter()
                    .enumerate()
                    .map(|(k, &(n, l))| {
                        let d = match kind {
                            ParamKind::Orthogonal => IrredDescriptor::new(
                                format!("c{k}"),
                                n as usize,
                                SelfDuality::Orthogonal,
                                Some(SquareClass::one(field)),
                                1,
                            ),
                            ParamKind::Symplectic => IrredDescriptor::new(
                                format!("c{k}"),
                                n as usize,
                                SelfDuality::Symplectic,
                                None,
                                1,
                            ),
                        };
                        (d.expect("grid descriptors are valid"), l as usize)
                    })
                    .collect();
                let phi = WDParameter::new(field, items, Vec::new())?;
                let group = component_group(&phi, kind);
                let ambient_orth = kind == ParamKind::Orthogonal && phi.dim() % 2 == 0;
                let census = component_group_bruteforce(shape, ambient_orth);
                if group.order() != census.order || group.z() != census.z.as_slice() {
                    failures += 1;
                }
            }
        }
    }
    suites.push(SelfTestSuite {
        name: "component-groups".into(),
        cases,
        failures,
    });

    // Admissible-coset law for a one-entry family: over each discriminant
    // the ambient classes receive disjoint cosets, and when two classes
    // exist they cover the whole sign group between them.
    let mut cases = 0;
    let mut failures = 0;
    for &p in primes {
        let field = PrimeField::new(p)?;
        for delta in field.square_classes() {
            if delta.is_trivial() {
                continue;
            }
            let algebra = crate::etale::QuadAlgebra::field_ext(delta)?;
            let Some(y) = [3i64, 5, 6, 7, 9, 11].iter().find_map(|&t| {
                let t = num_rational::BigRational::from_integer(t.into());
                crate::etale::norm_one_element(algebra, &t)
            }) else {
                continue;
            };
            let Ok(entry) = XiEntry::new(y) else { continue };
            let xi = XiFamily::new(field, vec![entry])?;
            if !xi.is_regular() {
                continue;
            }
            let d = xi.d_xi() + 1;
            let all = crate::xi::enumerate_c(&xi);
            for disc in field.square_classes() {
                cases += 1;
                let classes = classify(field, d, disc);
                let mut seen: Vec<crate::xi::CosetElement> = Vec::new();
                let mut nonempty = 0usize;
                let mut ok = true;
                for q in &classes {
                    match admissible_coset_odd(q, &xi) {
                        Ok((cos, _)) => {
                            nonempty += 1;
                            for c in cos {
                                if seen.contains(&c) {
                                    ok = false;
                                }
                                seen.push(c);
                            }
                        }
                        Err(Error::EmptyAdmissibleSet(_)) => {}
                        Err(_) => ok = false,
                    }
                }
                if nonempty == 0 || (classes.len() == 2 && seen.len() != all.len()) {
                    ok = false;
                }
                if !ok {
                    failures += 1;
                }
            }
        }
    }
    suites.push(SelfTestSuite {
        name: "coset-law".into(),
        cases,
        failures,
    });

    Ok(SelfTestReport { suites })
}
