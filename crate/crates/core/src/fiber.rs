//! Dictionaries between parameter families and conjugacy-class data: the
//! quadratic space q_{ξ,c} built from trace forms, the admissible coset of
//! C(ξ) attached to an ambient space, and the twisted-linear bilinear blocks
//! attached to a γ-choice.
//!
//! For an ambient orthogonal space the classes in the stable class of ξ are
//! parametrized by a coset of the even-sign subgroup C(ξ)¹ inside C(ξ); the
//! admissibility computations here recover that coset by brute isomorphism
//! testing, and assert the single-coset structure rather than assuming it.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::quadspace::{is_isomorphic, QuadraticSpace};
use crate::xi::{enumerate_c, enumerate_c_one, CosetElement, GammaElement, XiFamily};

/// The quadratic space q_{ξ,c} with c given by explicit square-class
/// representatives (one rational per field index). Each field entry
/// contributes the binary block ⟨2c_i, −2c_iδ_i⟩ of the scaled trace form;
/// each split entry contributes a hyperbolic plane.
pub fn build_qxic_with_reps(
    xi: &XiFamily,
    reps: &BTreeMap<usize, BigRational>,
) -> Result<QuadraticSpace> {
    let mut diag: Vec<BigRational> = Vec::with_capacity(xi.d_xi());
    let two = BigRational::from_integer(2.into());
    for (i, entry) in xi.entries().iter().enumerate() {
        match entry.algebra().delta() {
            None => {
                diag.push(BigRational::from_integer(1.into()));
                diag.push(BigRational::from_integer((-1).into()));
            }
            Some(delta) => {
                let c = reps.get(&i).ok_or_else(|| {
                    Error::Validation(format!("missing representative for field index {i}"))
                })?;
                if c.numer().sign() == num_bigint::Sign::NoSign {
                    return Err(Error::Validation(format!(
                        "representative at index {i} must be nonzero"
                    )));
                }
                let block = &two * c;
                diag.push(block.clone());
                diag.push(-&block * delta.representative_rational());
            }
        }
    }
    QuadraticSpace::from_rationals(xi.field(), &diag)
}

/// q_{ξ,c} for a sign-vector c, using the fixed representatives derived
/// from the signs. The invariants of the result depend on c only through
/// its signs, so this loses nothing against arbitrary representatives.
pub fn build_qxic(xi: &XiFamily, c: &CosetElement) -> QuadraticSpace {
    let reps = xi
        .field_indices()
        .into_iter()
        .map(|i| (i, c.representative_class(i, xi).representative_rational()))
        .collect();
    build_qxic_with_reps(xi, &reps).expect("representatives are complete and nonzero")
}

fn assert_single_coset(admissible: &[CosetElement], xi: &XiFamily) -> Result<()> {
    let cone = enumerate_c_one(xi);
    if admissible.len() != cone.len() {
        return Err(Error::Internal(format!(
            "admissible set has {} elements, expected a C(ξ)¹-coset of size {}",
            admissible.len(),
            cone.len()
        )));
    }
    let base = &admissible[0];
    for e in &cone {
        let shifted = base * e;
        if !admissible.contains(&shifted) {
            return Err(Error::Internal(
                "admissible set is not closed under C(ξ)¹".into(),
            ));
        }
    }
    Ok(())
}

/// The admissible coset for an odd ambient space: all c such that
/// q′ ≅ ⟨a⟩ ⊕ q_{ξ,c} for a line ⟨a⟩, whose discriminant is forced by the
/// other two. Returns the coset together with the line. The result is
/// asserted to be a single C(ξ)¹-coset.
pub fn admissible_coset_odd(
    q_prime: &QuadraticSpace,
    xi: &XiFamily,
) -> Result<(Vec<CosetElement>, QuadraticSpace)> {
    if q_prime.dim() % 2 == 0 {
        return Err(Error::ExpectedOddDim(q_prime.dim()));
    }
    if xi.d_xi() + 1 != q_prime.dim() {
        return Err(Error::Validation(format!(
            "family has attached dimension {}, ambient space needs {}",
            xi.d_xi(),
            q_prime.dim() - 1
        )));
    }
    // det(q′) = det(D)·det(q_{ξ,c}) and det(q_{ξ,c}) is the same for every
    // c, so the line D is determined before admissibility is tested.
    let det_xi = build_qxic(xi, &CosetElement::trivial(xi)).det();
    let line_class = q_prime.det() * det_xi;
    let line = QuadraticSpace::from_rationals(
        xi.field(),
        &[line_class.representative_rational()],
    )?;
    let admissible: Vec<CosetElement> = enumerate_c(xi)
        .into_iter()
        .filter(|c| is_isomorphic(&line.direct_sum(&build_qxic(xi, c)), q_prime))
        .collect();
    if admissible.is_empty() {
        return Err(Error::EmptyAdmissibleSet(format!(
            "no class over {xi:?} embeds in {q_prime} with a complementary line"
        )));
    }
    assert_single_coset(&admissible, xi)?;
    Ok((admissible, line))
}

/// The admissible coset for an even ambient space: all c with q_{ξ,c} ≅ q.
/// Requires the family to avoid central eigenvalues and to match both the
/// dimension and the discriminant of the space.
pub fn admissible_coset_even(q: &QuadraticSpace, xi: &XiFamily) -> Result<Vec<CosetElement>> {
    if q.dim() % 2 != 0 {
        return Err(Error::ExpectedEvenDim(q.dim()));
    }
    if xi.d_xi() != q.dim() {
        return Err(Error::Validation(format!(
            "family has attached dimension {}, ambient space has {}",
            xi.d_xi(),
            q.dim()
        )));
    }
    if let Some(e) = xi.entries().iter().find(|e| e.is_central()) {
        return Err(Error::ExcludedEigenvalue(format!(
            "even ambient spaces exclude central eigenvalues, found {}",
            e.y()
        )));
    }
    if xi.delta_xi() != q.disc() {
        return Err(Error::Validation(format!(
            "family discriminant {} does not match space discriminant {}",
            xi.delta_xi(),
            q.disc()
        )));
    }
    let admissible: Vec<CosetElement> = enumerate_c(xi)
        .into_iter()
        .filter(|c| is_isomorphic(&build_qxic(xi, c), q))
        .collect();
    if admissible.is_empty() {
        return Err(Error::EmptyAdmissibleSet(format!(
            "no class over {xi:?} realizes {q}"
        )));
    }
    assert_single_coset(&admissible, xi)?;
    Ok(admissible)
}

/// Entrywise negation of the family; an involution preserving algebras,
/// discriminant and regularity.
pub fn neg_xi(xi: &XiFamily) -> XiFamily {
    xi.negate()
}

/// One block of the twisted-linear bilinear form: the entry index it comes
/// from (`None` for the extra line of an imp-type γ) and its matrix over
/// the standard basis of the entry algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlFormBlock {
    pub entry: Option<usize>,
    pub matrix: Vec<Vec<BigRational>>,
}

impl GlFormBlock {
    pub fn is_symmetric(&self) -> bool {
        let n = self.matrix.len();
        (0..n).all(|a| (0..n).all(|b| self.matrix[a][b] == self.matrix[b][a]))
    }
}

/// The block description of the bilinear form (u, u′) ↦ Σ trace(τ(uᵢ)u′ᵢγᵢ)
/// on ⊕F_i, in the basis {1, √δ} per field entry and the two coordinate
/// lines per split entry, with the extra 1×1 block (γ_D) in the imp case.
/// The form is not symmetric in general.
pub fn build_gl_form(xi: &XiFamily, gamma: &GammaElement) -> Result<Vec<GlFormBlock>> {
    if gamma.gammas().len() != xi.len() {
        return Err(Error::Validation(format!(
            "γ has {} components for a family of {} entries",
            gamma.gammas().len(),
            xi.len()
        )));
    }
    let two = BigRational::from_integer(2.into());
    let mut blocks = Vec::new();
    for (i, entry) in xi.entries().iter().enumerate() {
        let g = gamma.gamma(i);
        if g.algebra() != entry.algebra() {
            return Err(Error::Validation(format!(
                "γ component {i} lives in the wrong algebra"
            )));
        }
        let (ga, gb) = g.coords();
        let matrix = match entry.algebra().delta() {
            None => {
                // τ swaps coordinates: B(e₁,e₂) = γ_b, B(e₂,e₁) = γ_a.
                let zero = BigRational::from_integer(0.into());
                vec![
                    vec![zero.clone(), gb.clone()],
                    vec![ga.clone(), zero],
                ]
            }
            Some(delta) => {
                // τ negates the radical: trace(τ(eₐ)·e_b·γ) over {1, √δ}.
                let d = delta.representative_rational();
                vec![
                    vec![&two * ga, &two * gb * &d],
                    vec![-(&two * gb * &d), -(&two * ga * &d)],
                ]
            }
        };
        blocks.push(GlFormBlock {
            entry: Some(i),
            matrix,
        });
    }
    if let Some(gd) = gamma.gamma_d() {
        blocks.push(GlFormBlock {
            entry: None,
            matrix: vec![vec![gd.representative_rational()]],
        });
    }
    Ok(blocks)
}

/// A fully validated conjugacy-class descriptor: a family plus the datum
/// selecting one class inside its stable class, tied to an ambient space
/// (orthogonal side) or a linear dimension (twisted-linear side).
#[derive(Debug, Clone)]
pub enum ClassDescriptor {
    Orthogonal {
        xi: XiFamily,
        c: CosetElement,
        ambient: QuadraticSpace,
    },
    TwistedLinear {
        xi: XiFamily,
        gamma: GammaElement,
        gl_dim: usize,
    },
}

impl ClassDescriptor {
    /// Checks the dimension bookkeeping and, on the orthogonal side, that c
    /// lies in the admissible coset of the ambient space.
    pub fn validate(&self) -> Result<()> {
        match self {
            ClassDescriptor::Orthogonal { xi, c, ambient } => {
                let admissible = if ambient.dim() % 2 == 1 {
                    admissible_coset_odd(ambient, xi)?.0
                } else {
                    admissible_coset_even(ambient, xi)?
                };
                if admissible.contains(c) {
                    Ok(())
                } else {
                    Err(Error::InadmissibleCoset)
                }
            }
            ClassDescriptor::TwistedLinear { xi, gamma, gl_dim } => {
                let expected = xi.d_xi() + usize::from(gamma.is_imp());
                if *gl_dim != expected {
                    return Err(Error::Validation(format!(
                        "twisted-linear dimension {gl_dim} does not match family dimension {expected}"
                    )));
                }
                build_gl_form(xi, gamma).map(|_| ())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::etale::{norm_one_element, QuadAlgebra};
    use crate::padic::SquareClass;
    use crate::padic::PrimeField;
    use crate::quadspace::classify;
    use crate::xi::{enumerate_gamma_imp, enumerate_gamma_pair, XiEntry};
    use num_bigint::BigInt;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn field_entry(delta: i64, t: (i64, i64), p: u64) -> XiEntry {
        let alg =
            QuadAlgebra::field_ext(SquareClass::from_integer(delta, f(p)).unwrap()).unwrap();
        XiEntry::new(norm_one_element(alg, &rat(t.0, t.1)).unwrap()).unwrap()
    }

    fn split_entry(t: (i64, i64), p: u64) -> XiEntry {
        let alg = QuadAlgebra::split(f(p));
        XiEntry::new(norm_one_element(alg, &rat(t.0, t.1)).unwrap()).unwrap()
    }

    fn space(diag: &[i64], p: u64) -> QuadraticSpace {
        let rats: Vec<BigRational> = diag.iter().map(|&a| rat(a, 1)).collect();
        QuadraticSpace::from_rationals(f(p), &rats).unwrap()
    }

    /// A pool of regular families over p with |I*| ≤ 2.
    fn pool(p: u64) -> Vec<XiFamily> {
        vec![
            XiFamily::empty(f(p)),
            XiFamily::new(f(p), vec![split_entry((2, 1), p)]).unwrap(),
            XiFamily::new(f(p), vec![field_entry(2, (1, 2), p)]).unwrap(),
            XiFamily::new(f(p), vec![field_entry(3, (1, 3), p), split_entry((3, 1), p)]).unwrap(),
            XiFamily::new(
                f(p),
                vec![field_entry(2, (1, 2), p), field_entry(3, (1, 3), p)],
            )
            .unwrap(),
            XiFamily::new(
                f(p),
                vec![field_entry(2, (1, 2), p), field_entry(2, (2, 3), p)],
            )
            .unwrap(),
        ]
    }

    #[test]
    fn trace_form_blocks() {
        let p = 3u64;
        let split = XiFamily::new(f(p), vec![split_entry((2, 1), p)]).unwrap();
        let q = build_qxic(&split, &CosetElement::trivial(&split));
        assert!(is_isomorphic(&q, &space(&[1, -1], p)));

        let field = XiFamily::new(f(p), vec![field_entry(2, (1, 2), p)]).unwrap();
        let q = build_qxic(&field, &CosetElement::trivial(&field));
        assert!(is_isomorphic(&q, &space(&[2, -4], p)));
    }

    #[test]
    fn discriminant_of_trace_form_is_family_discriminant() {
        for p in [2u64, 3, 5] {
            for xi in pool(p) {
                for c in enumerate_c(&xi) {
                    assert_eq!(build_qxic(&xi, &c).disc(), xi.delta_xi());
                }
            }
        }
    }

    #[test]
    fn trace_form_depends_only_on_signs() {
        let p = 3u64;
        let xi = XiFamily::new(
            f(p),
            vec![field_entry(2, (1, 2), p), field_entry(3, (1, 3), p)],
        )
        .unwrap();
        for c in enumerate_c(&xi) {
            let base = build_qxic(&xi, &c);
            // Multiply each representative by a norm from its extension:
            // N(a + b√δ) = a² − δb².
            let norms = [(rat(9, 4) - rat(2, 1) * rat(1, 1)), (rat(4, 1) - rat(3, 1))];
            let reps: BTreeMap<usize, BigRational> = xi
                .field_indices()
                .into_iter()
                .zip(norms.iter())
                .map(|(i, n)| (i, c.representative_class(i, &xi).representative_rational() * n))
                .collect();
            let twisted = build_qxic_with_reps(&xi, &reps).unwrap();
            assert!(is_isomorphic(&base, &twisted));
        }
    }

    #[test]
    fn odd_admissibility_trivial_sign_group() {
        let p = 3u64;
        // Empty family: the line itself must match.
        let xi = XiFamily::empty(f(p));
        for a in [1i64, 2, 3, 6] {
            let (cos, line) = admissible_coset_odd(&space(&[a], p), &xi).unwrap();
            assert_eq!(cos.len(), 1);
            assert!(is_isomorphic(&line, &space(&[a], p)));
        }
        // One split entry: the candidate space ⟨a⟩ ⊕ H is split, so the
        // non-split class of the same invariants admits nothing.
        let xi = XiFamily::new(f(p), vec![split_entry((2, 1), p)]).unwrap();
        let split_q = space(&[1, 1, -1], p);
        assert!(admissible_coset_odd(&split_q, &xi).is_ok());
        let aniso = space(&[1, -2, -3], p); // same disc, other class
        assert!(!is_isomorphic(&aniso, &split_q));
        assert!(matches!(
            admissible_coset_odd(&aniso, &xi),
            Err(Error::EmptyAdmissibleSet(_))
        ));
    }

    #[test]
    fn odd_admissibility_partitions_sign_group() {
        for p in [2u64, 3, 5] {
            for xi in pool(p) {
                let d = xi.d_xi() + 1;
                let all = enumerate_c(&xi);
                for delta in f(p).square_classes() {
                    let classes = classify(f(p), d, delta);
                    let mut seen: Vec<CosetElement> = Vec::new();
                    let mut nonempty = 0usize;
                    for q in &classes {
                        match admissible_coset_odd(q, &xi) {
                            Ok((cos, line)) => {
                                nonempty += 1;
                                // The coset is disjoint from those of the
                                // other classes with the same invariants.
                                for c in &cos {
                                    assert!(!seen.contains(c));
                                    seen.push(c.clone());
                                    assert!(is_isomorphic(
                                        &line.direct_sum(&build_qxic(&xi, c)),
                                        q
                                    ));
                                }
                            }
                            Err(Error::EmptyAdmissibleSet(_)) => {}
                            Err(e) => panic!("unexpected error {e}"),
                        }
                    }
                    assert!(nonempty >= 1, "p={p} d={d} delta={delta}");
                    if !xi.field_indices().is_empty() && classes.len() == 2 {
                        // Two classes, complementary cosets covering C(ξ).
                        assert_eq!(seen.len(), all.len());
                    }
                }
            }
        }
    }

    #[test]
    fn even_admissibility_partitions_sign_group() {
        for p in [2u64, 3, 5] {
            for xi in pool(p) {
                let d = xi.d_xi();
                if d == 0 {
                    continue;
                }
                let all = enumerate_c(&xi);
                let classes = classify(f(p), d, xi.delta_xi());
                let mut seen: Vec<CosetElement> = Vec::new();
                let mut nonempty = 0usize;
                for q in &classes {
                    match admissible_coset_even(q, &xi) {
                        Ok(cos) => {
                            nonempty += 1;
                            for c in &cos {
                                assert!(!seen.contains(c));
                                seen.push(c.clone());
                                assert!(is_isomorphic(&build_qxic(&xi, c), q));
                            }
                        }
                        Err(Error::EmptyAdmissibleSet(_)) => {}
                        Err(e) => panic!("unexpected error {e}"),
                    }
                }
                assert!(nonempty >= 1);
                if !xi.field_indices().is_empty() && classes.len() == 2 {
                    assert_eq!(seen.len(), all.len());
                }
            }
        }
    }

    #[test]
    fn even_admissibility_input_checks() {
        let p = 3u64;
        let xi = XiFamily::new(f(p), vec![field_entry(2, (1, 2), p)]).unwrap();
        // Wrong discriminant.
        assert!(matches!(
            admissible_coset_even(&space(&[1, -1], p), &xi),
            Err(Error::Validation(_))
        ));
        // Wrong dimension.
        assert!(matches!(
            admissible_coset_even(&space(&[2, -4, 1, -1], p), &xi),
            Err(Error::Validation(_))
        ));
        // Central eigenvalue.
        let central = XiEntry::new(
            crate::etale::QuadAlgebraElement::one(
                QuadAlgebra::field_ext(SquareClass::from_integer(2, f(p)).unwrap()).unwrap(),
            ),
        )
        .unwrap();
        let bad = XiFamily::new(f(p), vec![central]).unwrap();
        assert!(matches!(
            admissible_coset_even(&space(&[2, -4], p), &bad),
            Err(Error::ExcludedEigenvalue(_))
        ));
    }

    #[test]
    fn gl_form_blocks() {
        let p = 3u64;
        let xi = XiFamily::new(
            f(p),
            vec![split_entry((5, 3), p), field_entry(2, (1, 2), p)],
        )
        .unwrap();
        for gamma in enumerate_gamma_pair(&xi) {
            let blocks = build_gl_form(&xi, &gamma).unwrap();
            assert_eq!(blocks.len(), 2);
            // Split block: zero diagonal, γ coordinates off-diagonal.
            let (ga, gb) = gamma.gamma(0).coords();
            assert_eq!(blocks[0].matrix[0][0], rat(0, 1));
            assert_eq!(blocks[0].matrix[1][1], rat(0, 1));
            assert_eq!(blocks[0].matrix[0][1], *gb);
            assert_eq!(blocks[0].matrix[1][0], *ga);
        }
        // A τ-invariant γ-component gives a symmetric field block.
        let xi1 = XiFamily::new(f(p), vec![field_entry(2, (1, 2), p)]).unwrap();
        let alg = xi1.entries()[0].algebra();
        let rational_gamma = GammaElement::new(
            vec![crate::etale::QuadAlgebraElement::from_rational(alg, rat(7, 2))],
            None,
        );
        let blocks = build_gl_form(&xi1, &rational_gamma).unwrap();
        assert!(blocks[0].is_symmetric());
        // Imp-type γ appends the 1×1 line block.
        let imp = enumerate_gamma_imp(&xi1);
        let blocks = build_gl_form(&xi1, &imp[0]).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[1].entry, None);
        assert_eq!(blocks[1].matrix.len(), 1);
    }

    #[test]
    fn class_descriptor_validation() {
        let p = 3u64;
        let xi = XiFamily::new(f(p), vec![field_entry(2, (1, 2), p)]).unwrap();
        let q3 = space(&[1, 2, -4], p);
        let (cos, _) = admissible_coset_odd(&q3, &xi).unwrap();
        let good = ClassDescriptor::Orthogonal {
            xi: xi.clone(),
            c: cos[0].clone(),
            ambient: q3.clone(),
        };
        good.validate().unwrap();
        let outside: Vec<CosetElement> = enumerate_c(&xi)
            .into_iter()
            .filter(|c| !cos.contains(c))
            .collect();
        let bad = ClassDescriptor::Orthogonal {
            xi: xi.clone(),
            c: outside[0].clone(),
            ambient: q3,
        };
        assert!(matches!(bad.validate(), Err(Error::InadmissibleCoset)));

        let gamma = enumerate_gamma_pair(&xi).remove(0);
        let lin = ClassDescriptor::TwistedLinear {
            xi: xi.clone(),
            gamma: gamma.clone(),
            gl_dim: 2,
        };
        lin.validate().unwrap();
        let lin_bad = ClassDescriptor::TwistedLinear {
            xi,
            gamma,
            gl_dim: 3,
        };
        assert!(matches!(lin_bad.validate(), Err(Error::Validation(_))));
    }

    #[test]
    fn negation_wrapper_is_involutive() {
        let p = 3u64;
        let xi = XiFamily::new(
            f(p),
            vec![field_entry(2, (1, 2), p), split_entry((2, 1), p)],
        )
        .unwrap();
        assert_eq!(neg_xi(&neg_xi(&xi)), xi);
        assert_eq!(neg_xi(&xi).delta_xi(), xi.delta_xi());
    }
}
