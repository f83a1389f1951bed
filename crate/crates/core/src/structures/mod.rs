//! Builders and invariant extractors for finite-dimensional algebras given
//! by structure tensors: twisted group algebras, Taft-type comodule algebras
//! and their products, plus Galois twisting of whole structures.

pub mod group;
pub mod taft;
pub mod taft_product;
pub mod twisted;

pub use group::{check_cocycle, Cocycle2, CocycleCheck, GroupTable};
pub use taft::{build_taft, extract_taft_invariants, TaftAlgebra, TaftInvariants, TaftParams};
pub use taft_product::{
    build_taft_product, cycle_invariant, extract_product_invariants, ProductInvariants,
    TaftFactor, TaftProductAlgebra, TaftProductParams,
};
pub use twisted::{
    alpha_tilde, build_twisted_group_algebra, commutator_scalar, mu_and_generic_form,
    twist_cocycle, GenericFormReport, TwistedGroupAlgebra,
};

use crate::error::{CoreError, Result};
use crate::nt::{euler_phi, factorize, lcm};
use crate::scalars::{galois_apply, Scalar, ScalarField};
use crate::tensors::{Structure, Tensor, TensorType};

/// Entry m[k; i, j] of a (1,2) tensor without re-encoding indices.
pub(crate) fn m_at<'a>(m: &'a Tensor, k: usize, i: usize, j: usize) -> &'a Scalar {
    let n = m.dim();
    &m.entries()[(k * n + i) * n + j]
}

pub(crate) fn basis_vec(field: &ScalarField, dim: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(field); dim];
    v[i] = Scalar::one(field);
    v
}

/// Product of two coordinate vectors under a (1,2) multiplication tensor.
pub fn mul_vec(m: &Tensor, x: &[Scalar], y: &[Scalar]) -> Result<Vec<Scalar>> {
    let n = m.dim();
    if x.len() != n || y.len() != n {
        return Err(CoreError::DimMismatch(format!(
            "vectors of lengths {} and {} against a dim-{n} product",
            x.len(),
            y.len()
        )));
    }
    let mut out = vec![Scalar::zero(m.field()); n];
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            if yj.is_zero() {
                continue;
            }
            let c = xi.mul(yj)?;
            for (k, slot) in out.iter_mut().enumerate() {
                let e = m_at(m, k, i, j);
                if !e.is_zero() {
                    *slot = slot.add(&e.mul(&c)?)?;
                }
            }
        }
    }
    Ok(out)
}

pub(crate) fn scale_vec(v: &[Scalar], c: &Scalar) -> Result<Vec<Scalar>> {
    v.iter().map(|e| e.mul(c)).collect()
}

pub(crate) fn sub_vec(a: &[Scalar], b: &[Scalar]) -> Result<Vec<Scalar>> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

pub(crate) fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(|e| e.is_zero())
}

/// v as a scalar multiple of w (w nonzero), if it is one.
pub(crate) fn scalar_multiple_of(v: &[Scalar], w: &[Scalar]) -> Result<Option<Scalar>> {
    let pivot = match w.iter().position(|e| !e.is_zero()) {
        Some(p) => p,
        None => return Ok(None),
    };
    let s = v[pivot].div(&w[pivot])?;
    if is_zero_vec(&sub_vec(v, &scale_vec(w, &s)?)?) {
        Ok(Some(s))
    } else {
        Ok(None)
    }
}

/// v^e under m, left-associated. e >= 1.
pub(crate) fn pow_vec(m: &Tensor, v: &[Scalar], e: usize) -> Result<Vec<Scalar>> {
    assert!(e >= 1);
    let mut acc = v.to_vec();
    for _ in 1..e {
        acc = mul_vec(m, &acc, v)?;
    }
    Ok(acc)
}

/// Exhaustive associativity check on basis triples. The builders run this on
/// every constructed product; a failure is a construction bug, not bad input.
pub(crate) fn check_associativity(m: &Tensor) -> Result<()> {
    let n = m.dim();
    for i in 0..n {
        for j in 0..n {
            let ij: Vec<&Scalar> = (0..n).map(|k| m_at(m, k, i, j)).collect();
            for k in 0..n {
                let jk: Vec<&Scalar> = (0..n).map(|l| m_at(m, l, j, k)).collect();
                for out in 0..n {
                    let mut left = Scalar::zero(m.field());
                    for (l, c) in ij.iter().enumerate() {
                        if !c.is_zero() {
                            left = left.add(&c.mul(m_at(m, out, l, k))?)?;
                        }
                    }
                    let mut right = Scalar::zero(m.field());
                    for (l, c) in jk.iter().enumerate() {
                        if !c.is_zero() {
                            right = right.add(&c.mul(m_at(m, out, i, l))?)?;
                        }
                    }
                    if left != right {
                        return Err(CoreError::InternalCheckFailed(format!(
                            "associativity fails at basis triple ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

pub(crate) fn check_unit(m: &Tensor, u: &[Scalar]) -> Result<()> {
    let n = m.dim();
    for i in 0..n {
        let e = basis_vec(m.field(), n, i);
        if mul_vec(m, u, &e)? != e || mul_vec(m, &e, u)? != e {
            return Err(CoreError::InternalCheckFailed(format!(
                "unit law fails on basis vector {i}"
            )));
        }
    }
    Ok(())
}

/// Solves m(u, e_i) = e_i = m(e_i, u) for all i. A two-sided unit is unique
/// when it exists, so any solution of the linear system is the unit.
pub fn find_unit(s: &Structure) -> Result<Option<Vec<Scalar>>> {
    let m = s
        .get("m")
        .ok_or_else(|| CoreError::WrongTensorType("structure has no tensor named m".into()))?;
    if m.ttype() != TensorType::new(1, 2) {
        return Err(CoreError::WrongTensorType(format!(
            "m has type ({}, {}), expected (1, 2)",
            m.ttype().p,
            m.ttype().q
        )));
    }
    let n = s.dim;
    let field = &s.field;
    let mut rows = Vec::with_capacity(2 * n * n);
    let mut rhs = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for k in 0..n {
            // m(u, e_i)[k] = delta_{ki}
            rows.push((0..n).map(|l| m_at(m, k, l, i).clone()).collect::<Vec<_>>());
            rhs.push(if k == i {
                Scalar::one(field)
            } else {
                Scalar::zero(field)
            });
            // m(e_i, u)[k] = delta_{ki}
            rows.push((0..n).map(|l| m_at(m, k, i, l).clone()).collect::<Vec<_>>());
            rhs.push(if k == i {
                Scalar::one(field)
            } else {
                Scalar::zero(field)
            });
        }
    }
    let a = crate::linalg::Mat::from_rows(field, rows);
    Ok(a.solve(&rhs))
}

/// Applies sigma_k to every tensor entry. k = 1 is the identity and
/// twist(k) . twist(k') = twist(k k').
pub fn galois_twist(s: &Structure, k: i64) -> Result<Structure> {
    match &s.field {
        ScalarField::Rational => Ok(s.clone()),
        ScalarField::Cyclotomic { .. } => {
            let mut out = Structure::new(s.dim, s.field.clone());
            for (name, t) in &s.tensors {
                let entries: Result<Vec<Scalar>> =
                    t.entries().iter().map(|e| galois_apply(k, e)).collect();
                let mut nt = Tensor::zeros(t.ttype(), t.dim(), &s.field);
                for (flat, e) in entries?.into_iter().enumerate() {
                    if !e.is_zero() {
                        let slots = t.ttype().slots();
                        let idx = crate::tensors::decode_index(flat, t.dim(), slots);
                        let (up, down) = idx.split_at(t.ttype().p);
                        nt.set(up, down, e);
                    }
                }
                out.push(name, nt);
            }
            Ok(out)
        }
        ScalarField::RationalFunction => Err(CoreError::UnsupportedField(
            "galois twisting needs a rational or cyclotomic structure".into(),
        )),
    }
}

/// Multiplicative order of a root of unity. Errors when s is not one.
pub(crate) fn root_of_unity_order(s: &Scalar) -> Result<usize> {
    let bound = match s.field() {
        ScalarField::Rational => 2,
        ScalarField::Cyclotomic { order } => lcm(2, order),
        ScalarField::RationalFunction => {
            return Err(CoreError::UnsupportedField(
                "roots of unity live in rational or cyclotomic fields".into(),
            ))
        }
    };
    let mut acc = s.clone();
    for k in 1..=bound {
        if acc.is_one() {
            return Ok(k);
        }
        acc = acc.mul(s)?;
    }
    Err(CoreError::InternalCheckFailed(format!(
        "scalar {s} is not a root of unity"
    )))
}

/// Replaces mu by a generator of <mu, c> inside the (cyclic) group of roots
/// of unity. Built from mu and c multiplicatively, so it commutes with every
/// field automorphism; on equal orders the newer element wins.
pub(crate) fn combine_root_generators(mu: &Scalar, c: &Scalar) -> Result<Scalar> {
    let r = root_of_unity_order(mu)?;
    let s = root_of_unity_order(c)?;
    let l = lcm(r, s);
    let mut r_part = 1usize;
    let mut s_part = 1usize;
    for (p, _) in factorize(l) {
        let vp = |mut m: usize| {
            let mut v = 0;
            while m % p == 0 {
                m /= p;
                v += 1;
            }
            v
        };
        let (vr, vs) = (vp(r), vp(s));
        let top = vr.max(vs);
        if vs >= vr {
            s_part *= p.pow(top);
        } else {
            r_part *= p.pow(top);
        }
    }
    mu.pow((r / r_part) as i64)?.mul(&c.pow((s / s_part) as i64)?)
}

/// Degree of QQ(mu) over QQ for a root of unity of the given order.
pub(crate) fn root_field_degree(order: usize) -> usize {
    if order <= 2 {
        1
    } else {
        euler_phi(order)
    }
}

/// Rendered name of QQ(mu).
pub(crate) fn root_field_name(order: usize) -> String {
    if order <= 2 {
        "QQ".to_string()
    } else {
        format!("QQ(zeta_{order})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::parse_scalar;

    fn m2_structure() -> Structure {
        let f = ScalarField::Rational;
        let idx = |a: usize, b: usize| 2 * a + b;
        let mut m = Tensor::zeros(TensorType::new(1, 2), 4, &f);
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        if b == c {
                            m.set(&[idx(a, d)], &[idx(a, b), idx(c, d)], Scalar::one(&f));
                        }
                    }
                }
            }
        }
        let mut st = Structure::new(4, f);
        st.push("m", m);
        st
    }

    /// x^2 = y^2 = xy = z, yx = t z; every product lands on the z-line, so
    /// nothing can act as a unit.
    fn non_unital_structure() -> Structure {
        let f = ScalarField::RationalFunction;
        let one = Scalar::one(&f);
        let tv = parse_scalar("t", &f).unwrap();
        let mut m = Tensor::zeros(TensorType::new(1, 2), 3, &f);
        m.set(&[2], &[0, 0], one.clone());
        m.set(&[2], &[1, 1], one.clone());
        m.set(&[2], &[0, 1], one);
        m.set(&[2], &[1, 0], tv);
        let mut st = Structure::new(3, f);
        st.push("m", m);
        st
    }

    #[test]
    fn matrix_algebra_unit_is_the_identity() {
        let st = m2_structure();
        let u = find_unit(&st).unwrap().expect("M2 is unital");
        let f = ScalarField::Rational;
        let one = Scalar::one(&f);
        let zero = Scalar::zero(&f);
        assert_eq!(u, vec![one.clone(), zero.clone(), zero, one]);
        let m = st.get("m").unwrap();
        check_unit(m, &u).unwrap();
        check_associativity(m).unwrap();
    }

    #[test]
    fn non_unital_algebra_reports_no_unit() {
        let st = non_unital_structure();
        assert_eq!(find_unit(&st).unwrap(), None);
    }

    #[test]
    fn find_unit_requires_a_product_tensor() {
        let st = Structure::new(2, ScalarField::Rational);
        assert!(matches!(
            find_unit(&st),
            Err(CoreError::WrongTensorType(_))
        ));
    }

    #[test]
    fn galois_twist_composes_and_twist_one_is_identity() {
        let f = ScalarField::Cyclotomic { order: 8 };
        let z = Scalar::zeta(8);
        let mut t = Tensor::zeros(TensorType::new(1, 1), 2, &f);
        t.set(&[0], &[0], z.clone());
        t.set(&[1], &[1], z.pow(3).unwrap().add(&Scalar::from_integer(2, &f)).unwrap());
        let mut st = Structure::new(2, f);
        st.push("T", t);

        assert_eq!(galois_twist(&st, 1).unwrap(), st);
        let t3 = galois_twist(&st, 3).unwrap();
        let t9 = galois_twist(&t3, 3).unwrap();
        assert_eq!(t9, galois_twist(&st, 9).unwrap());
        assert_eq!(galois_twist(&t3, 11).unwrap(), st); // 3 * 11 = 33 = 1 mod 8
        assert!(matches!(
            galois_twist(&st, 2),
            Err(CoreError::BadGaloisIndex { .. })
        ));
    }

    #[test]
    fn root_generator_folding_prefers_the_newer_element() {
        let f = ScalarField::Cyclotomic { order: 4 };
        let one = Scalar::one(&f);
        let i = Scalar::zeta(4);
        let minus_i = i.pow(3).unwrap();
        assert_eq!(root_of_unity_order(&one).unwrap(), 1);
        assert_eq!(root_of_unity_order(&i).unwrap(), 4);
        assert_eq!(root_of_unity_order(&i.pow(2).unwrap()).unwrap(), 2);

        let a = combine_root_generators(&one, &minus_i).unwrap();
        assert_eq!(a, minus_i);
        let b = combine_root_generators(&a, &i).unwrap();
        assert_eq!(b, i);
        // a trivial newcomer never displaces an established generator
        let c = combine_root_generators(&i, &one).unwrap();
        assert_eq!(c, i);
        assert!(root_of_unity_order(&Scalar::from_integer(2, &f)).is_err());
    }

    #[test]
    fn root_field_rendering() {
        assert_eq!(root_field_name(1), "QQ");
        assert_eq!(root_field_name(2), "QQ");
        assert_eq!(root_field_name(4), "QQ(zeta_4)");
        assert_eq!(root_field_degree(2), 1);
        assert_eq!(root_field_degree(3), 2);
        assert_eq!(root_field_degree(4), 2);
    }
}
