//! Tangent space at the identity of the group of linear maps fixing every
//! structure tensor. A matrix D is in the Lie algebra iff for each tensor x
//! the slot-wise derivation action vanishes: D applied in every up slot minus
//! D^T applied in every down slot kills x. That is one linear equation per
//! entry of x, solved exactly over the structure's field.

use crate::error::Result;
use crate::linalg::{FieldEchelon, Mat};
use crate::tensors::{decode_index, encode_index, Structure};

#[derive(Clone, Debug)]
pub struct AutLieResult {
    pub dimension: usize,
    /// Reduced basis of the solution space, as dim x dim matrices acting on W.
    pub basis: Vec<Mat>,
}

/// Coefficient matrix of the linearized fixing conditions: one row per entry
/// of each structure tensor, n^2 columns for the unknown D (row-major).
fn equations(s: &Structure) -> Mat {
    let n = s.dim;
    let mut rows = 0usize;
    for (_, t) in &s.tensors {
        rows += t.entries().len();
    }
    let mut a = Mat::zeros(&s.field, rows, n * n);
    let mut row = 0usize;
    for (_, t) in &s.tensors {
        let (p, q) = (t.ttype().p, t.ttype().q);
        for flat in 0..t.entries().len() {
            let idx = decode_index(flat, n, p + q);
            // up slot s: sum_k D[idx_s, k] x[idx with slot s := k]
            for slot in 0..p {
                for k in 0..n {
                    let mut j = idx.clone();
                    j[slot] = k;
                    let x = t.entries()[encode_index(&j, n)].clone();
                    let col = idx[slot] * n + k;
                    let cur = a.get(row, col).clone();
                    a.set(row, col, cur.add(&x).expect("same field"));
                }
            }
            // down slot s: -sum_k D[k, idx_s] x[idx with slot s := k]
            for slot in p..p + q {
                for k in 0..n {
                    let mut j = idx.clone();
                    j[slot] = k;
                    let x = t.entries()[encode_index(&j, n)].clone();
                    let col = k * n + idx[slot];
                    let cur = a.get(row, col).clone();
                    a.set(row, col, cur.sub(&x).expect("same field"));
                }
            }
            row += 1;
        }
    }
    a
}

pub fn aut_lie_algebra(s: &Structure) -> Result<AutLieResult> {
    let n = s.dim;
    let ns = equations(s).nullspace();
    let basis: Vec<Mat> = ns
        .into_iter()
        .map(|v| Mat::from_fn(&s.field, n, n, |i, j| v[i * n + j].clone()))
        .collect();
    Ok(AutLieResult {
        dimension: basis.len(),
        basis,
    })
}

/// Membership test for span(basis) on flattened matrices; used by callers to
/// verify bracket closure.
pub fn in_span(basis: &[Mat], m: &Mat) -> bool {
    if basis.is_empty() {
        return m.is_zero();
    }
    let n = m.nrows();
    let field = basis[0].get(0, 0).field();
    let mut ech = FieldEchelon::new(&field, n * n);
    for b in basis {
        ech.insert(&flatten(b));
    }
    ech.contains(&flatten(m))
}

fn flatten(m: &Mat) -> Vec<crate::scalars::Scalar> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m.get(i, j).clone());
        }
    }
    out
}
