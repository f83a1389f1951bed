//! Dense tensors on W^{p,q} = W^{otimes p} (x) (W^*)^{otimes q} and the
//! operations the closure and morphism layers are built from.
//!
//! Global index convention: entries are stored row-major with all p "up"
//! indices first, then the q "down" indices. Nothing downstream may assume
//! anything else; every reshape/permute is expressed through this one order.

use crate::error::{CoreError, Result};
use crate::linalg::Mat;
use crate::perm::{is_permutation, perm_sign};
use crate::scalars::{Scalar, ScalarField};
use itertools::Itertools;
use num::BigRational;

/// Evaluation/entry budget guarding the combinatorial operations.
pub const DEFAULT_EVAL_BUDGET: u128 = 10_000_000;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct TensorType {
    pub p: usize,
    pub q: usize,
}

impl TensorType {
    pub fn new(p: usize, q: usize) -> TensorType {
        TensorType { p, q }
    }

    pub fn slots(&self) -> usize {
        self.p + self.q
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Tensor {
    ttype: TensorType,
    dim: usize,
    field: ScalarField,
    /// dim^(p+q) entries, row-major, up indices then down indices.
    entries: Vec<Scalar>,
}

fn checked_count(dim: usize, slots: usize) -> Result<usize> {
    let mut acc: u128 = 1;
    for _ in 0..slots {
        acc = acc.saturating_mul(dim as u128);
        if acc > DEFAULT_EVAL_BUDGET {
            return Err(CoreError::DimensionOverflow {
                needed: acc,
                budget: DEFAULT_EVAL_BUDGET,
            });
        }
    }
    Ok(acc as usize)
}

pub fn encode_index(idx: &[usize], dim: usize) -> usize {
    let mut flat = 0;
    for &i in idx {
        debug_assert!(i < dim);
        flat = flat * dim + i;
    }
    flat
}

pub fn decode_index(mut flat: usize, dim: usize, slots: usize) -> Vec<usize> {
    let mut idx = vec![0; slots];
    for k in (0..slots).rev() {
        idx[k] = flat % dim;
        flat /= dim;
    }
    idx
}

impl Tensor {
    pub fn zeros(ttype: TensorType, dim: usize, field: &ScalarField) -> Tensor {
        assert!(dim >= 1, "tensor dimension must be positive");
        let count = checked_count(dim, ttype.slots()).expect("tensor within budget");
        Tensor {
            ttype,
            dim,
            field: field.clone(),
            entries: vec![Scalar::zero(field); count],
        }
    }

    pub fn from_entries(
        ttype: TensorType,
        dim: usize,
        field: &ScalarField,
        entries: Vec<Scalar>,
    ) -> Tensor {
        let count = checked_count(dim, ttype.slots()).expect("tensor within budget");
        assert_eq!(entries.len(), count, "entry count must be dim^(p+q)");
        debug_assert!(entries.iter().all(|e| e.field() == *field));
        Tensor {
            ttype,
            dim,
            field: field.clone(),
            entries,
        }
    }

    /// Id_W as the (1,1) tensor sum_i e_i (x) e^i.
    pub fn identity(dim: usize, field: &ScalarField) -> Tensor {
        let mut t = Tensor::zeros(TensorType::new(1, 1), dim, field);
        for i in 0..dim {
            t.set(&[i], &[i], Scalar::one(field));
        }
        t
    }

    /// A (0,0) tensor holding one scalar.
    pub fn scalar(c: Scalar, dim: usize) -> Tensor {
        let field = c.field();
        Tensor {
            ttype: TensorType::new(0, 0),
            dim,
            field,
            entries: vec![c],
        }
    }

    pub fn ttype(&self) -> TensorType {
        self.ttype
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn get(&self, up: &[usize], down: &[usize]) -> &Scalar {
        debug_assert_eq!(up.len(), self.ttype.p);
        debug_assert_eq!(down.len(), self.ttype.q);
        let mut idx = Vec::with_capacity(self.ttype.slots());
        idx.extend_from_slice(up);
        idx.extend_from_slice(down);
        &self.entries[encode_index(&idx, self.dim)]
    }

    pub fn set(&mut self, up: &[usize], down: &[usize], v: Scalar) {
        debug_assert_eq!(up.len(), self.ttype.p);
        debug_assert_eq!(down.len(), self.ttype.q);
        let mut idx = Vec::with_capacity(self.ttype.slots());
        idx.extend_from_slice(up);
        idx.extend_from_slice(down);
        let flat = encode_index(&idx, self.dim);
        self.entries[flat] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        if self.field != other.field {
            return Err(CoreError::FieldMismatch(
                self.field.to_string(),
                other.field.to_string(),
            ));
        }
        if self.dim != other.dim {
            return Err(CoreError::DimMismatch(format!(
                "cannot add tensors of dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        if self.ttype != other.ttype {
            return Err(CoreError::WrongTensorType(format!(
                "cannot add a ({},{}) tensor to a ({},{}) tensor",
                self.ttype.p, self.ttype.q, other.ttype.p, other.ttype.q
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Tensor {
            ttype: self.ttype,
            dim: self.dim,
            field: self.field.clone(),
            entries,
        })
    }

    pub fn neg(&self) -> Tensor {
        Tensor {
            ttype: self.ttype,
            dim: self.dim,
            field: self.field.clone(),
            entries: self.entries.iter().map(|e| e.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Result<Tensor> {
        if c.field() != self.field {
            return Err(CoreError::FieldMismatch(
                c.field().to_string(),
                self.field.to_string(),
            ));
        }
        let entries = self
            .entries
            .iter()
            .map(|e| e.mul(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Tensor {
            ttype: self.ttype,
            dim: self.dim,
            field: self.field.clone(),
            entries,
        })
    }

    /// Entries flattened to QQ-coordinates (entry-major, then the field's
    /// power basis). Panics on QQ(t); callers reject that field first.
    pub fn q_coords(&self) -> Vec<BigRational> {
        let mut out = Vec::new();
        for e in &self.entries {
            out.extend(e.q_coords());
        }
        out
    }

    pub fn from_q_coords(
        ttype: TensorType,
        dim: usize,
        field: &ScalarField,
        coords: &[BigRational],
    ) -> Tensor {
        let qd = field.q_dim().expect("field with finite QQ-dimension");
        let count = checked_count(dim, ttype.slots()).expect("tensor within budget");
        assert_eq!(coords.len(), count * qd);
        let entries = (0..count)
            .map(|i| Scalar::from_q_coords(field, &coords[i * qd..(i + 1) * qd]))
            .collect();
        Tensor::from_entries(ttype, dim, field, entries)
    }
}

pub fn tensor_product(x: &Tensor, y: &Tensor) -> Result<Tensor> {
    if x.field != y.field {
        return Err(CoreError::FieldMismatch(
            x.field.to_string(),
            y.field.to_string(),
        ));
    }
    if x.dim != y.dim {
        return Err(CoreError::DimMismatch(format!(
            "tensor product needs equal dimensions, got {} and {}",
            x.dim, y.dim
        )));
    }
    let ttype = TensorType::new(x.ttype.p + y.ttype.p, x.ttype.q + y.ttype.q);
    let count = checked_count(x.dim, ttype.slots())?;
    let n = x.dim;
    let mut entries = Vec::with_capacity(count);
    for flat in 0..count {
        let idx = decode_index(flat, n, ttype.slots());
        let (xp, yp, xq, yq) = (x.ttype.p, y.ttype.p, x.ttype.q, y.ttype.q);
        let mut xi = Vec::with_capacity(xp + xq);
        xi.extend_from_slice(&idx[0..xp]);
        xi.extend_from_slice(&idx[xp + yp..xp + yp + xq]);
        let mut yi = Vec::with_capacity(yp + yq);
        yi.extend_from_slice(&idx[xp..xp + yp]);
        yi.extend_from_slice(&idx[xp + yp + xq..]);
        let a = &x.entries[encode_index(&xi, n)];
        let b = &y.entries[encode_index(&yi, n)];
        entries.push(a.mul(b)?);
    }
    Ok(Tensor {
        ttype,
        dim: x.dim,
        field: x.field.clone(),
        entries,
    })
}

pub fn contract(x: &Tensor, up: usize, down: usize) -> Result<Tensor> {
    let (p, q) = (x.ttype.p, x.ttype.q);
    if up >= p || down >= q {
        return Err(CoreError::SlotOutOfRange(format!(
            "contract slots ({up}, {down}) out of range for a ({p},{q}) tensor"
        )));
    }
    let ttype = TensorType::new(p - 1, q - 1);
    let n = x.dim;
    let mut out = Tensor::zeros(ttype, n, &x.field);
    let count = out.entries.len();
    for flat in 0..count {
        let idx = decode_index(flat, n, ttype.slots());
        let (up_rest, down_rest) = idx.split_at(p - 1);
        let mut acc = Scalar::zero(&x.field);
        let mut full = Vec::with_capacity(p + q);
        for i in 0..n {
            full.clear();
            full.extend_from_slice(&up_rest[0..up]);
            full.push(i);
            full.extend_from_slice(&up_rest[up..]);
            full.extend_from_slice(&down_rest[0..down]);
            full.push(i);
            full.extend_from_slice(&down_rest[down..]);
            acc = acc.add(&x.entries[encode_index(&full, n)])?;
        }
        out.entries[flat] = acc;
    }
    Ok(out)
}

/// result[A; B] = x[(A_{sigma(i)})_i; (B_{tau(j)})_j]
pub fn permute(x: &Tensor, sigma: &[usize], tau: &[usize]) -> Result<Tensor> {
    let (p, q) = (x.ttype.p, x.ttype.q);
    if sigma.len() != p || !is_permutation(sigma) {
        return Err(CoreError::DegreeMismatch(format!(
            "up permutation {sigma:?} is not a permutation of {p} slots"
        )));
    }
    if tau.len() != q || !is_permutation(tau) {
        return Err(CoreError::DegreeMismatch(format!(
            "down permutation {tau:?} is not a permutation of {q} slots"
        )));
    }
    let n = x.dim;
    let mut out = Tensor::zeros(x.ttype, n, &x.field);
    let count = out.entries.len();
    let mut src = vec![0usize; p + q];
    for flat in 0..count {
        let idx = decode_index(flat, n, p + q);
        for i in 0..p {
            src[i] = idx[sigma[i]];
        }
        for j in 0..q {
            src[p + j] = idx[p + tau[j]];
        }
        out.entries[flat] = x.entries[encode_index(&src, n)].clone();
    }
    Ok(out)
}

/// View x as the matrix of a linear map W^{from} -> W^{to}.
///
/// Convention "output factors first": the tensor's up group is (to-up ++
/// from-down) and its down group is (to-down ++ from-up). Rows of the matrix
/// run over the codomain multi-index (to.p ups then to.q downs), columns over
/// the domain multi-index (from.p ups then from.q downs).
pub fn reshape(x: &Tensor, from: TensorType, to: TensorType) -> Result<Mat> {
    if x.ttype.p != to.p + from.q || x.ttype.q != to.q + from.p {
        return Err(CoreError::TypeArithmeticMismatch(format!(
            "a ({},{}) tensor is not a map W^({},{}) -> W^({},{})",
            x.ttype.p, x.ttype.q, from.p, from.q, to.p, to.q
        )));
    }
    let n = x.dim;
    let rows = checked_count(n, to.slots())?;
    let cols = checked_count(n, from.slots())?;
    let mut m = Mat::zeros(&x.field, rows, cols);
    let mut idx = vec![0usize; x.ttype.slots()];
    for r in 0..rows {
        let out_idx = decode_index(r, n, to.slots());
        for c in 0..cols {
            let in_idx = decode_index(c, n, from.slots());
            // up group: to-ups then from-downs
            idx[..to.p].copy_from_slice(&out_idx[..to.p]);
            idx[to.p..to.p + from.q].copy_from_slice(&in_idx[from.p..]);
            // down group: to-downs then from-ups
            idx[to.p + from.q..to.p + from.q + to.q].copy_from_slice(&out_idx[to.p..]);
            idx[to.p + from.q + to.q..].copy_from_slice(&in_idx[..from.p]);
            m.set(r, c, x.entries[encode_index(&idx, n)].clone());
        }
    }
    Ok(m)
}

/// Inverse of reshape: rebuild the tensor of a map matrix.
pub fn tensor_from_map(m: &Mat, from: TensorType, to: TensorType, dim: usize) -> Result<Tensor> {
    let rows = checked_count(dim, to.slots())?;
    let cols = checked_count(dim, from.slots())?;
    if m.nrows() != rows || m.ncols() != cols {
        return Err(CoreError::TypeArithmeticMismatch(format!(
            "matrix is {}x{}, expected {}x{} for W^({},{}) -> W^({},{}) at dim {}",
            m.nrows(),
            m.ncols(),
            rows,
            cols,
            from.p,
            from.q,
            to.p,
            to.q,
            dim
        )));
    }
    let ttype = TensorType::new(to.p + from.q, to.q + from.p);
    let mut x = Tensor::zeros(ttype, dim, m.field());
    let count = x.entries.len();
    for flat in 0..count {
        let idx = decode_index(flat, dim, ttype.slots());
        let mut out_idx = Vec::with_capacity(to.slots());
        out_idx.extend_from_slice(&idx[..to.p]);
        out_idx.extend_from_slice(&idx[to.p + from.q..to.p + from.q + to.q]);
        let mut in_idx = Vec::with_capacity(from.slots());
        in_idx.extend_from_slice(&idx[to.p + from.q + to.q..]);
        in_idx.extend_from_slice(&idx[to.p..to.p + from.q]);
        x.entries[flat] = m
            .get(encode_index(&out_idx, dim), encode_index(&in_idx, dim))
            .clone();
    }
    Ok(x)
}

/// The default reading of a (p,q) tensor as a map W^{otimes q} -> W^{otimes p}.
pub fn as_default_map(x: &Tensor) -> Result<Mat> {
    reshape(
        x,
        TensorType::new(x.ttype.q, 0),
        TensorType::new(x.ttype.p, 0),
    )
}

pub fn antisym_image(t: &Mat, k: usize) -> Result<Vec<Vec<Scalar>>> {
    antisym_image_budgeted(t, k, DEFAULT_EVAL_BUDGET)
}

/// Spanning set of the image of the antisymmetrizer
///   K_T(f_1..f_k, v_1..v_{k+1})
///     = sum_{sigma in S_{k+1}} sign(sigma) prod_i f_i(T v_{sigma(i)}) v_{sigma(k+1)}
/// over all basis inputs, for T: U -> V given as a matrix.
///
/// K_T is multilinear and alternating in the f-block and in the v-block, so
/// the full basis enumeration is spanned by strictly increasing index tuples;
/// only those are evaluated. On an increasing pair (F, X) the value collapses
/// to a signed sequence of k x k minors of T:
///   K_T(F, X) = sum_m (-1)^(k+1-m) det(T[F; X minus x_m]) e_{x_m}.
pub fn antisym_image_budgeted(t: &Mat, k: usize, budget: u128) -> Result<Vec<Vec<Scalar>>> {
    assert!(k >= 1, "antisymmetrizer degree must be positive");
    let b = t.nrows();
    let a = t.ncols();
    let field = t.field().clone();
    let needed = binomial(b as u128, k as u128).saturating_mul(binomial(a as u128, k as u128 + 1));
    if needed > budget {
        return Err(CoreError::DimensionOverflow { needed, budget });
    }
    let mut span = Vec::new();
    if k > b || k + 1 > a {
        return Ok(span);
    }
    for fs in (0..b).combinations(k) {
        for xs in (0..a).combinations(k + 1) {
            let mut vec = vec![Scalar::zero(&field); a];
            let mut nonzero = false;
            for (m, &xm) in xs.iter().enumerate() {
                let cols: Vec<usize> = xs
                    .iter()
                    .copied()
                    .filter(|&c| c != xm)
                    .collect();
                let minor = Mat::from_fn(&field, k, k, |i, j| t.get(fs[i], cols[j]).clone());
                let d = minor.det();
                if d.is_zero() {
                    continue;
                }
                nonzero = true;
                // Moving x_m (position m, 0-based) to the last of k+1 slots
                // costs k - m transpositions.
                let signed = if (k - m) % 2 == 0 { d } else { d.neg() };
                vec[xm] = signed;
            }
            if nonzero {
                span.push(vec);
            }
        }
    }
    Ok(span)
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// A structure (W, {x_i}): one dimension, one field, named tensors.
#[derive(Clone, PartialEq, Debug)]
pub struct Structure {
    pub dim: usize,
    pub field: ScalarField,
    pub tensors: Vec<(String, Tensor)>,
}

impl Structure {
    pub fn new(dim: usize, field: ScalarField) -> Structure {
        Structure {
            dim,
            field,
            tensors: Vec::new(),
        }
    }

    pub fn push(&mut self, name: &str, t: Tensor) {
        assert_eq!(t.dim(), self.dim, "tensor dimension differs from structure");
        assert_eq!(*t.field(), self.field, "tensor field differs from structure");
        self.tensors.push((name.to_string(), t));
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.tensors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }
}

/// Sign-aware reference implementation of the antisymmetrizer span used to
/// cross-check the minor-based reduction (kept out of release builds' hot
/// paths; only tests call it).
#[doc(hidden)]
pub fn antisym_image_direct(t: &Mat, k: usize) -> Vec<Vec<Scalar>> {
    let b = t.nrows();
    let a = t.ncols();
    let field = t.field().clone();
    let perms = crate::perm::all_permutations(k + 1);
    let mut span = Vec::new();
    let f_count = (b as u128).pow(k as u32) as usize;
    let v_count = (a as u128).pow(k as u32 + 1) as usize;
    for ff in 0..f_count {
        let fs = decode_index(ff, b, k);
        for vv in 0..v_count {
            let xs = decode_index(vv, a, k + 1);
            let mut vec = vec![Scalar::zero(&field); a];
            for sigma in &perms {
                let mut term = Scalar::one(&field);
                for i in 0..k {
                    term = term.mul(t.get(fs[i], xs[sigma[i]])).expect("same field");
                }
                if perm_sign(sigma) < 0 {
                    term = term.neg();
                }
                let target = xs[sigma[k]];
                vec[target] = vec[target].add(&term).expect("same field");
            }
            if vec.iter().any(|c| !c.is_zero()) {
                span.push(vec);
            }
        }
    }
    span
}
