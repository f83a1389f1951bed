//! Trace invariants of tuples of matrices: the cycle-product invariants T_sigma,
//! the signed trace sum f whose nonvanishing detects bases of the matrix
//! algebra, and its two-variable specialization D(X, Y) on the monomials X^i Y^j.

use crate::error::{CoreError, Result};
use crate::linalg::Mat;
use crate::perm::perm_sign;
use crate::scalars::Scalar;

/// A permutation of {1..t} by its cycle decomposition. Fixed points must be
/// listed as singleton cycles so the cycles partition {1..t}.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleInvariantSpec {
    pub t: usize,
    pub cycles: Vec<Vec<usize>>,
}

fn trace(m: &Mat) -> Result<Scalar> {
    let mut acc = Scalar::zero(m.field());
    for i in 0..m.nrows() {
        acc = acc.add(m.get(i, i))?;
    }
    Ok(acc)
}

fn check_square_family(matrices: &[Mat]) -> Result<usize> {
    let n = matrices[0].nrows();
    for m in matrices {
        if m.nrows() != n || m.ncols() != n {
            return Err(CoreError::DimMismatch(format!(
                "matrices must all be square of one size, found {}x{} next to {n}x{n}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.field() != matrices[0].field() {
            return Err(CoreError::FieldMismatch(
                matrices[0].field().to_string(),
                m.field().to_string(),
            ));
        }
    }
    Ok(n)
}

/// Product over the cycles of sigma of the traces of the cyclically ordered
/// matrix products. These generate all simultaneous-conjugation invariants.
#[allow(non_snake_case)]
pub fn procesi_T(spec: &CycleInvariantSpec, matrices: &[Mat]) -> Result<Scalar> {
    if spec.t == 0 {
        return Err(CoreError::ParamInvalid("t must be positive".into()));
    }
    let mut seen = vec![false; spec.t];
    for cycle in &spec.cycles {
        for &i in cycle {
            if i == 0 || i > spec.t || seen[i - 1] {
                return Err(CoreError::ParamInvalid(format!(
                    "cycles do not partition 1..{}: bad or repeated entry {i}",
                    spec.t
                )));
            }
            seen[i - 1] = true;
        }
    }
    if !seen.iter().all(|&s| s) {
        return Err(CoreError::ParamInvalid(format!(
            "cycles do not partition 1..{}: some entry is missing",
            spec.t
        )));
    }
    if matrices.len() != spec.t {
        return Err(CoreError::ArityMismatch(format!(
            "spec takes {} matrices, got {}",
            spec.t,
            matrices.len()
        )));
    }
    check_square_family(matrices)?;
    let mut out = Scalar::one(matrices[0].field());
    for cycle in &spec.cycles {
        let mut prod = matrices[cycle[0] - 1].clone();
        for &i in &cycle[1..] {
            prod = prod.matmul(&matrices[i - 1]);
        }
        out = out.mul(&trace(&prod)?)?;
    }
    Ok(out)
}

/// Lexicographic successor in place; false once p was the last permutation.
fn next_perm(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// tr(AB) without forming the product.
fn trace_of_product(a: &Mat, b: &Mat) -> Result<Scalar> {
    let mut acc = Scalar::zero(a.field());
    for r in 0..a.nrows() {
        for c in 0..a.ncols() {
            let x = a.get(r, c);
            if !x.is_zero() {
                acc = acc.add(&x.mul(b.get(c, r))?)?;
            }
        }
    }
    Ok(acc)
}

/// Signed sum over S_{n^2} of products of traces over consecutive blocks of
/// sizes 1, 3, ..., 2n-1; nonzero exactly when the n^2 matrices form a basis
/// of the n x n matrix algebra. n >= 4 means n^2! terms and is gated.
pub fn formanek_f(matrices: &[Mat], force_large: bool) -> Result<Scalar> {
    if matrices.is_empty() {
        return Err(CoreError::ArityMismatch(
            "no matrices given, expected n^2 of them".into(),
        ));
    }
    let n = check_square_family(matrices)?;
    let k = n * n;
    if matrices.len() != k {
        return Err(CoreError::ArityMismatch(format!(
            "expected n^2 = {k} matrices of size {n}, got {}",
            matrices.len()
        )));
    }
    if n >= 4 && !force_large {
        return Err(CoreError::BudgetExceeded(format!(
            "f over {n}x{n} matrices sums {k}! terms; rerun with the large-evaluation override"
        )));
    }
    let field = matrices[0].field().clone();

    // Ordered-tuple product tables up to length n, keyed base k, so every
    // block trace is a table lookup instead of a fresh product chain.
    let mut products: Vec<Vec<Mat>> = vec![matrices.to_vec()];
    for len in 2..=n.max(1) {
        let prev = &products[len - 2];
        let mut table = Vec::with_capacity(prev.len() * k);
        for p in prev {
            for m in matrices {
                table.push(p.matmul(m));
            }
        }
        products.push(table);
    }
    let block_sizes: Vec<usize> = (0..n).map(|i| 2 * i + 1).collect();
    let mut traces: Vec<Vec<Scalar>> = Vec::with_capacity(n);
    for &s in &block_sizes {
        let mut table = Vec::with_capacity(k.pow(s as u32));
        if s == 1 {
            for m in matrices {
                table.push(trace(m)?);
            }
        } else {
            let (left, right) = (s / 2, s - s / 2);
            for li in 0..k.pow(left as u32) {
                for ri in 0..k.pow(right as u32) {
                    table.push(trace_of_product(
                        &products[left - 1][li],
                        &products[right - 1][ri],
                    )?);
                }
            }
        }
        traces.push(table);
    }

    let mut acc = Scalar::zero(&field);
    let mut p: Vec<usize> = (0..k).collect();
    loop {
        let mut term = Scalar::from_integer(perm_sign(&p), &field);
        let mut pos = 0;
        for (bi, &s) in block_sizes.iter().enumerate() {
            if term.is_zero() {
                break;
            }
            let idx = p[pos..pos + s].iter().fold(0, |a, &v| a * k + v);
            term = term.mul(&traces[bi][idx])?;
            pos += s;
        }
        acc = acc.add(&term)?;
        if !next_perm(&mut p) {
            break;
        }
    }
    Ok(acc)
}

/// f on the monomial family X^i Y^j, 0 <= i, j < n, ordered by n*i + j.
#[allow(non_snake_case)]
pub fn formanek_D(x: &Mat, y: &Mat, force_large: bool) -> Result<Scalar> {
    let n = check_square_family(&[x.clone(), y.clone()])?;
    let mut x_pows = vec![Mat::identity(x.field(), n)];
    let mut y_pows = vec![Mat::identity(x.field(), n)];
    for i in 1..n {
        x_pows.push(x_pows[i - 1].matmul(x));
        y_pows.push(y_pows[i - 1].matmul(y));
    }
    let mut family = Vec::with_capacity(n * n);
    for xp in &x_pows {
        for yp in &y_pows {
            family.push(xp.matmul(yp));
        }
    }
    formanek_f(&family, force_large)
}
