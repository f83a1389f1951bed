//! Multilinear polynomial identities of an algebra structure, plus the
//! group-graded variant where the arguments are constrained to homogeneous
//! components. An identity of degree d is a vector (a_sigma) over S_d with
//! sum_sigma a_sigma sigma.m^(d-1) = 0 exactly; the space of those vectors
//! is the nullspace of the matrix whose columns are the flattened permuted
//! product maps.
//!
//! Convention: coefficients are indexed by the permutations of d letters in
//! lexicographic one-line order. The sigma term applies the left-normed
//! product ((X1 X2) X3)... to the arguments re-indexed by sigma^(-1), so the
//! sigma column is the word X_{sigma^(-1)(1)} ... X_{sigma^(-1)(d)}.

use crate::error::{CoreError, Result};
use crate::linalg::{FieldEchelon, Mat};
use crate::perm::{all_permutations, inverse};
use crate::scalars::{invert_scalar, Scalar};
use crate::tensors::{Structure, Tensor, TensorType, DEFAULT_EVAL_BUDGET};

pub const PERM_CONVENTION: &str = "permutations of d letters, one-line notation, lexicographic \
order; the sigma coefficient multiplies the left-normed product applied to arguments re-indexed \
by the inverse permutation";

#[derive(Clone, Debug)]
pub struct IdentitySpace {
    pub degree: usize,
    /// Coefficient vectors over S_d, reduced.
    pub basis: Vec<Vec<Scalar>>,
    pub convention: &'static str,
}

#[derive(Clone, Debug)]
pub struct GradedIdentitySpace {
    /// Grades of the arguments X1..Xd, as indices into the projection list.
    pub tuple: Vec<usize>,
    pub basis: Vec<Vec<Scalar>>,
    pub convention: &'static str,
}

/// Scale each vector so its first nonzero coordinate is 1.
fn monic_basis(basis: Vec<Vec<Scalar>>) -> Vec<Vec<Scalar>> {
    basis
        .into_iter()
        .map(|v| {
            let Some(first) = v.iter().position(|c| !c.is_zero()) else {
                return v;
            };
            let inv = invert_scalar(&v[first]).expect("nonzero scalar");
            v.iter().map(|c| c.mul(&inv).unwrap()).collect()
        })
        .collect()
}

fn multiplication_matrix(s: &Structure) -> Result<Mat> {
    let Some(m) = s.get("m") else {
        return Err(CoreError::WrongTensorType(
            "structure has no multiplication tensor 'm'".to_string(),
        ));
    };
    if m.ttype() != TensorType::new(1, 2) {
        return Err(CoreError::WrongTensorType(format!(
            "multiplication tensor has type ({},{}), expected (1,2)",
            m.ttype().p,
            m.ttype().q
        )));
    }
    crate::tensors::as_default_map(m)
}

/// Left-normed product of the given coordinate vectors.
fn product(m_mat: &Mat, n: usize, args: &[Vec<Scalar>]) -> Vec<Scalar> {
    let field = m_mat.field().clone();
    let mut acc = args[0].clone();
    for v in &args[1..] {
        let mut next = vec![Scalar::zero(&field); n];
        for s in 0..n {
            if acc[s].is_zero() {
                continue;
            }
            for j in 0..n {
                if v[j].is_zero() {
                    continue;
                }
                let w = acc[s].mul(&v[j]).expect("same field");
                for i in 0..n {
                    let c = m_mat.get(i, s * n + j);
                    if c.is_zero() {
                        continue;
                    }
                    next[i] = next[i].add(&c.mul(&w).unwrap()).unwrap();
                }
            }
        }
        acc = next;
    }
    acc
}

/// Value of the identity candidate (a_sigma) on one argument tuple.
pub fn eval_identity(
    m_mat: &Mat,
    n: usize,
    coeffs: &[Scalar],
    args: &[Vec<Scalar>],
) -> Vec<Scalar> {
    let d = args.len();
    let field = m_mat.field().clone();
    let mut out = vec![Scalar::zero(&field); n];
    for (k, sigma) in all_permutations(d).iter().enumerate() {
        if coeffs[k].is_zero() {
            continue;
        }
        let inv = inverse(sigma);
        let reordered: Vec<Vec<Scalar>> = inv.iter().map(|&i| args[i].clone()).collect();
        let w = product(m_mat, n, &reordered);
        for i in 0..n {
            out[i] = out[i].add(&coeffs[k].mul(&w[i]).unwrap()).unwrap();
        }
    }
    out
}

pub fn multilinear_identity_space(s: &Structure, d: usize) -> Result<IdentitySpace> {
    multilinear_identity_space_budgeted(s, d, DEFAULT_EVAL_BUDGET)
}

pub fn multilinear_identity_space_budgeted(
    s: &Structure,
    d: usize,
    budget: u128,
) -> Result<IdentitySpace> {
    if d < 2 {
        return Err(CoreError::TypeError(
            "identity degree must be at least 2".to_string(),
        ));
    }
    let n = s.dim;
    let mut cost: u128 = 1;
    for k in 1..=d {
        cost = cost.saturating_mul(k as u128);
    }
    cost = cost.saturating_mul((n as u128).saturating_pow(d as u32 + 1));
    if cost > budget {
        return Err(CoreError::BudgetExceeded(format!(
            "degree-{d} identity matrix needs {cost} entries, budget {budget}"
        )));
    }
    let m_mat = multiplication_matrix(s)?;

    // the d-fold left-normed product as an n x n^d matrix
    let mut prod = m_mat.clone();
    for _ in 3..=d {
        let cols = prod.ncols() * n;
        let mut next = Mat::zeros(&s.field, n, cols);
        for u in 0..prod.ncols() {
            for j in 0..n {
                for st in 0..n {
                    let a = prod.get(st, u);
                    if a.is_zero() {
                        continue;
                    }
                    for i in 0..n {
                        let b = m_mat.get(i, st * n + j);
                        if b.is_zero() {
                            continue;
                        }
                        let cur = next.get(i, u * n + j).clone();
                        next.set(i, u * n + j, cur.add(&a.mul(b).unwrap()).unwrap());
                    }
                }
            }
        }
        prod = next;
    }
    let as_tensor = {
        let mut entries = Vec::with_capacity(n * prod.ncols());
        for i in 0..n {
            for j in 0..prod.ncols() {
                entries.push(prod.get(i, j).clone());
            }
        }
        Tensor::from_entries(TensorType::new(1, d), n, &s.field, entries)
    };

    let perms = all_permutations(d);
    let rows = n * prod.ncols();
    let mut a = Mat::zeros(&s.field, rows, perms.len());
    for (k, sigma) in perms.iter().enumerate() {
        let col = crate::tensors::permute(&as_tensor, &[0], &inverse(sigma))?;
        for (r, v) in col.entries().iter().enumerate() {
            a.set(r, k, v.clone());
        }
    }
    Ok(IdentitySpace {
        degree: d,
        basis: monic_basis(a.nullspace()),
        convention: PERM_CONVENTION,
    })
}

/// Grading projections e0, e1, ... pulled from the structure, verified
/// idempotent and summing to the identity.
fn grading_projections(s: &Structure) -> Result<Vec<Mat>> {
    let mut named: Vec<(usize, Mat)> = Vec::new();
    for (name, t) in &s.tensors {
        let Some(rest) = name.strip_prefix('e') else {
            continue;
        };
        let Ok(idx) = rest.parse::<usize>() else {
            continue;
        };
        if t.ttype() != TensorType::new(1, 1) {
            return Err(CoreError::NotAGrading(format!(
                "projection '{name}' has type ({},{}), expected (1,1)",
                t.ttype().p,
                t.ttype().q
            )));
        }
        named.push((idx, crate::tensors::as_default_map(t)?));
    }
    if named.is_empty() {
        return Err(CoreError::NotAGrading(
            "structure has no projection tensors e0, e1, ...".to_string(),
        ));
    }
    named.sort_by_key(|(i, _)| *i);
    let mut sum = Mat::zeros(&s.field, s.dim, s.dim);
    for (name_idx, p) in &named {
        if p.matmul(p) != *p {
            return Err(CoreError::NotAGrading(format!(
                "projection e{name_idx} is not idempotent"
            )));
        }
        sum = sum.add(p);
    }
    if sum != Mat::identity(&s.field, s.dim) {
        return Err(CoreError::NotAGrading(
            "projections do not sum to the identity".to_string(),
        ));
    }
    Ok(named.into_iter().map(|(_, p)| p).collect())
}

pub fn graded_identity_space(s: &Structure, tuple: &[usize]) -> Result<GradedIdentitySpace> {
    let d = tuple.len();
    if d < 2 {
        return Err(CoreError::TypeError(
            "identity degree must be at least 2".to_string(),
        ));
    }
    let m_mat = multiplication_matrix(s)?;
    let projections = grading_projections(s)?;
    for &g in tuple {
        if g >= projections.len() {
            return Err(CoreError::TypeError(format!(
                "grade index {g} out of range ({} projections)",
                projections.len()
            )));
        }
    }
    let n = s.dim;
    // canonical basis of each homogeneous component
    let component_basis: Vec<Vec<Vec<Scalar>>> = projections
        .iter()
        .map(|p| {
            let mut ech = FieldEchelon::new(&s.field, n);
            for j in 0..n {
                ech.insert(&p.col(j));
            }
            ech.rows().to_vec()
        })
        .collect();

    let mut tuples: Vec<Vec<&Vec<Scalar>>> = vec![Vec::new()];
    for &g in tuple {
        let mut grown = Vec::new();
        for partial in &tuples {
            for b in &component_basis[g] {
                let mut next = partial.clone();
                next.push(b);
                grown.push(next);
            }
        }
        tuples = grown;
    }

    let perms = all_permutations(d);
    let mut a = Mat::zeros(&s.field, tuples.len() * n, perms.len());
    for (k, sigma) in perms.iter().enumerate() {
        let inv = inverse(sigma);
        for (ti, args) in tuples.iter().enumerate() {
            let reordered: Vec<Vec<Scalar>> = inv.iter().map(|&i| args[i].clone()).collect();
            let w = product(&m_mat, n, &reordered);
            for i in 0..n {
                a.set(ti * n + i, k, w[i].clone());
            }
        }
    }
    Ok(GradedIdentitySpace {
        tuple: tuple.to_vec(),
        basis: monic_basis(a.nullspace()),
        convention: PERM_CONVENTION,
    })
}

fn monomial(sigma: &[usize]) -> String {
    inverse(sigma)
        .iter()
        .map(|&i| format!("X{}", i + 1))
        .collect::<Vec<_>>()
        .join("*")
}

/// Normal-form rendering: the lexicographically last word with a nonzero
/// coefficient is made monic and written first, remaining terms follow in
/// decreasing word order.
pub fn render_identity(coeffs: &[Scalar], d: usize) -> Result<String> {
    let perms = all_permutations(d);
    assert_eq!(coeffs.len(), perms.len(), "one coefficient per permutation");
    let Some(lead) = (0..coeffs.len()).rev().find(|&i| !coeffs[i].is_zero()) else {
        return Ok("0".to_string());
    };
    let scale = invert_scalar(&coeffs[lead])?;
    let mut out = monomial(&perms[lead]);
    for i in (0..lead).rev() {
        if coeffs[i].is_zero() {
            continue;
        }
        let c = coeffs[i].mul(&scale)?;
        let rendered = c.to_string();
        let (sign, body) = if let Some(rest) = rendered.strip_prefix('-') {
            ("-", rest.trim_start().to_string())
        } else {
            ("+", rendered)
        };
        let needs_parens = body.contains(' ') || body.contains('/');
        let term = if body == "1" {
            monomial(&perms[i])
        } else if needs_parens {
            format!("({body})*{}", monomial(&perms[i]))
        } else {
            format!("{body}*{}", monomial(&perms[i]))
        };
        out.push_str(&format!(" {sign} {term}"));
    }
    Ok(out)
}
