//! Products of Taft-type factors: generators gt_i, t_i with
//!   gt_i gt_j = zeta^{b_ij} gt_j gt_i,        t_i gt_i = zeta^{-c_i} gt_i t_i,
//!   gt_i^{n_i} = a_i,  t_i^{n_i} = b_i,       cross-factor t/gt pairs commute,
//!   t_i t_j - t_j t_i = lambda_ij gt_i^{-1} gt_j^{-1}  for i < j.
//! zeta is the designated primitive M-th root of the ambient cyclotomic field.
//! Products are normalized by word rewriting; the t-t swap branches into a
//! swapped word plus a lower t-degree correction term, so rewriting terminates.

use super::group::designated_root;
use super::{
    basis_vec, check_associativity, check_unit, mul_vec, pow_vec, scalar_multiple_of, scale_vec,
    sub_vec,
};
use crate::error::{CoreError, Result};
use crate::scalars::{invert_scalar, Scalar, ScalarField};
use crate::tensors::{Structure, Tensor, TensorType};

#[derive(Clone, Debug)]
pub struct TaftFactor {
    pub n: usize,
    pub c: i64,
    pub a: Scalar,
    pub b: Scalar,
}

#[derive(Clone, Debug)]
pub struct TaftProductParams {
    pub factors: Vec<TaftFactor>,
    /// Exponent matrix of the gt-commutation scalars, read mod the field order.
    pub b_exp: Vec<Vec<i64>>,
    pub lambda: Vec<Vec<Scalar>>,
}

#[derive(Clone, Debug)]
pub struct TaftProductAlgebra {
    pub structure: Structure,
    pub params: TaftProductParams,
    pub zeta: Scalar,
    pub order: usize,
}

/// Invariants read back from the multiplication tensor alone. a and lambda
/// depend on the chosen generators; b, the commutation scalars, the landing
/// data of Lambda and the alternating cycle products do not.
#[derive(Clone, Debug)]
pub struct ProductInvariants {
    pub a: Vec<Scalar>,
    pub b: Vec<Scalar>,
    /// zeta_b[i][j] with gt_i gt_j = zeta_b[i][j] gt_j gt_i.
    pub zeta_b: Vec<Vec<Scalar>>,
    pub lambda: Vec<Vec<Scalar>>,
    /// For i < j with lambda_ij != 0: (t_i t_j - t_j t_i)^{n_i} as
    /// (coefficient, landing basis index); None on disconnected pairs.
    pub big_lambda: Vec<Vec<Option<(Scalar, usize)>>>,
    pub two_cycles: Vec<((usize, usize), Scalar)>,
}

const G: u8 = 0;
const T: u8 = 1;
type Sym = (usize, u8);

struct Ctx {
    factors: Vec<TaftFactor>,
    b_red: Vec<Vec<i64>>,
    lambda: Vec<Vec<Scalar>>,
    zeta: Scalar,
    field: ScalarField,
    strides: Vec<usize>,
    dim: usize,
}

fn validate(p: &TaftProductParams) -> Result<Ctx> {
    let f = p.factors.len();
    if f == 0 {
        return Err(CoreError::ParamInvalid("no factors given".into()));
    }
    if p.b_exp.len() != f
        || p.b_exp.iter().any(|r| r.len() != f)
        || p.lambda.len() != f
        || p.lambda.iter().any(|r| r.len() != f)
    {
        return Err(CoreError::ParamInvalid(format!(
            "b and lambda must be {f} x {f} matrices"
        )));
    }
    let field = p.factors[0].a.field();
    let order = match field {
        ScalarField::Cyclotomic { order } => order,
        ref other => {
            return Err(CoreError::ParamInvalid(format!(
                "parameters must live in a cyclotomic field, got {other}"
            )))
        }
    };
    let m = order as i64;
    for (i, fac) in p.factors.iter().enumerate() {
        if fac.n < 2 {
            return Err(CoreError::ParamInvalid(format!(
                "factor {i}: n = {} is below 2",
                fac.n
            )));
        }
        if order % fac.n != 0 {
            return Err(CoreError::ParamInvalid(format!(
                "factor {i}: field order {order} is not divisible by n = {}",
                fac.n
            )));
        }
        if fac.a.is_zero() {
            return Err(CoreError::ParamInvalid(format!(
                "factor {i}: a must be nonzero"
            )));
        }
        if fac.a.field() != field || fac.b.field() != field {
            return Err(CoreError::ParamInvalid(format!(
                "factor {i}: a and b must live in {field}"
            )));
        }
        if (fac.c * fac.n as i64).rem_euclid(m) != 0 {
            return Err(CoreError::ParamInvalid(format!(
                "factor {i}: c * n must vanish mod {order}"
            )));
        }
    }
    let b_red: Vec<Vec<i64>> = p
        .b_exp
        .iter()
        .map(|r| r.iter().map(|e| e.rem_euclid(m)).collect())
        .collect();
    let zeta = designated_root(order, &field)?;
    for i in 0..f {
        if b_red[i][i] != 0 {
            return Err(CoreError::ParamInvalid(format!(
                "b[{i}][{i}] must vanish mod {order}"
            )));
        }
        if !p.lambda[i][i].is_zero() {
            return Err(CoreError::ParamInvalid(format!(
                "lambda[{i}][{i}] must vanish"
            )));
        }
        for j in 0..f {
            if p.lambda[i][j].field() != field {
                return Err(CoreError::ParamInvalid(format!(
                    "lambda[{i}][{j}] must live in {field}"
                )));
            }
            if i == j {
                continue;
            }
            if (b_red[i][j] + b_red[j][i]).rem_euclid(m) != 0 {
                return Err(CoreError::ParamInvalid(format!(
                    "b[{i}][{j}] + b[{j}][{i}] must vanish mod {order}"
                )));
            }
            if (b_red[i][j] * p.factors[i].n as i64).rem_euclid(m) != 0 {
                return Err(CoreError::ParamInvalid(format!(
                    "b[{i}][{j}] * n_{i} must vanish mod {order}"
                )));
            }
            if !p.lambda[i][j].is_zero() {
                if b_red[i][j] != p.factors[j].c.rem_euclid(m) {
                    return Err(CoreError::ParamInvalid(format!(
                        "lambda[{i}][{j}] nonzero forces b[{i}][{j}] = c_{j} mod {order}"
                    )));
                }
                if b_red[i][j] != (-p.factors[i].c).rem_euclid(m) {
                    return Err(CoreError::ParamInvalid(format!(
                        "lambda[{i}][{j}] nonzero forces b[{i}][{j}] = -c_{i} mod {order}"
                    )));
                }
                for k in 0..f {
                    if k != i && k != j && (b_red[i][k] + b_red[j][k]).rem_euclid(m) != 0 {
                        return Err(CoreError::ParamInvalid(format!(
                            "lambda[{i}][{j}] nonzero forces b[{i}][{k}] + b[{j}][{k}] = 0 mod {order}"
                        )));
                    }
                }
            }
        }
    }
    for i in 0..f {
        for j in (i + 1)..f {
            let expected = p.lambda[i][j].neg().mul(&zeta.pow(b_red[i][j])?)?;
            if p.lambda[j][i] != expected {
                return Err(CoreError::ParamInvalid(format!(
                    "lambda[{j}][{i}] must equal -zeta^b[{i}][{j}] * lambda[{i}][{j}]"
                )));
            }
        }
    }
    let mut strides = vec![1usize; f];
    let mut dim = 1usize;
    for i in (0..f).rev() {
        strides[i] = dim;
        dim = dim
            .checked_mul(p.factors[i].n * p.factors[i].n)
            .ok_or_else(|| CoreError::ParamInvalid("total dimension overflows".into()))?;
    }
    Ok(Ctx {
        factors: p.factors.clone(),
        b_red,
        lambda: p.lambda.clone(),
        zeta,
        field,
        strides,
        dim,
    })
}

impl Ctx {
    fn index_of(&self, exps: &[(usize, usize)]) -> usize {
        exps.iter()
            .zip(&self.factors)
            .zip(&self.strides)
            .map(|(((al, be), fac), st)| (al * fac.n + be) * st)
            .sum()
    }

    fn exps_of(&self, mut idx: usize) -> Vec<(usize, usize)> {
        self.factors
            .iter()
            .zip(&self.strides)
            .map(|(fac, st)| {
                let d = idx / st;
                idx %= st;
                (d / fac.n, d % fac.n)
            })
            .collect()
    }

    fn word_of(&self, idx: usize) -> Vec<Sym> {
        let mut w = Vec::new();
        for (i, (al, be)) in self.exps_of(idx).into_iter().enumerate() {
            w.extend(std::iter::repeat((i, G)).take(al));
            w.extend(std::iter::repeat((i, T)).take(be));
        }
        w
    }

    /// Sorted words collapse to a single basis monomial (or vanish when a
    /// nilpotent t-power fires).
    fn collapse(&self, mut coeff: Scalar, word: &[Sym]) -> Result<Option<(usize, Scalar)>> {
        let f = self.factors.len();
        let mut cg = vec![0usize; f];
        let mut ct = vec![0usize; f];
        for &(i, kind) in word {
            if kind == G {
                cg[i] += 1;
            } else {
                ct[i] += 1;
            }
        }
        let mut exps = Vec::with_capacity(f);
        for i in 0..f {
            let n = self.factors[i].n;
            if cg[i] >= n {
                coeff = coeff.mul(&self.factors[i].a.pow((cg[i] / n) as i64)?)?;
            }
            if ct[i] >= n {
                if self.factors[i].b.is_zero() {
                    return Ok(None);
                }
                coeff = coeff.mul(&self.factors[i].b.pow((ct[i] / n) as i64)?)?;
            }
            exps.push((cg[i] % n, ct[i] % n));
        }
        if coeff.is_zero() {
            return Ok(None);
        }
        Ok(Some((self.index_of(&exps), coeff)))
    }

    /// Rewrites an arbitrary word into normal order, returning the landed
    /// (basis index, coefficient) contributions.
    fn normalize(&self, coeff: Scalar, word: Vec<Sym>) -> Result<Vec<(usize, Scalar)>> {
        let mut pending = vec![(coeff, word)];
        let mut landed = Vec::new();
        while let Some((c, w)) = pending.pop() {
            let bad = (0..w.len().saturating_sub(1)).find(|&k| w[k] > w[k + 1]);
            let k = match bad {
                None => {
                    if let Some(hit) = self.collapse(c, &w)? {
                        landed.push(hit);
                    }
                    continue;
                }
                Some(k) => k,
            };
            let (fl, kl) = w[k];
            let (fr, kr) = w[k + 1];
            let mut swapped = w.clone();
            swapped.swap(k, k + 1);
            match (kl, kr) {
                (G, G) => pending.push((c.mul(&self.zeta.pow(self.b_red[fl][fr])?)?, swapped)),
                (T, G) if fl == fr => {
                    pending.push((c.mul(&self.zeta.pow(-self.factors[fl].c)?)?, swapped))
                }
                (T, T) => {
                    let (i, j) = (fr, fl);
                    let lam = &self.lambda[i][j];
                    if !lam.is_zero() {
                        let scale = lam
                            .neg()
                            .mul(&invert_scalar(&self.factors[i].a)?)?
                            .mul(&invert_scalar(&self.factors[j].a)?)?;
                        let mut rest: Vec<Sym> = w[..k].to_vec();
                        rest.extend(std::iter::repeat((i, G)).take(self.factors[i].n - 1));
                        rest.extend(std::iter::repeat((j, G)).take(self.factors[j].n - 1));
                        rest.extend_from_slice(&w[k + 2..]);
                        pending.push((c.mul(&scale)?, rest));
                    }
                    pending.push((c, swapped));
                }
                _ => pending.push((c, swapped)),
            }
        }
        Ok(landed)
    }
}

pub fn build_taft_product(p: &TaftProductParams) -> Result<TaftProductAlgebra> {
    let ctx = validate(p)?;
    let dim = ctx.dim;
    let field = ctx.field.clone();
    let mut m = Tensor::zeros(TensorType::new(1, 2), dim, &field);
    for x in 0..dim {
        let wx = ctx.word_of(x);
        for y in 0..dim {
            let mut word = wx.clone();
            word.extend(ctx.word_of(y));
            for (k, c) in ctx.normalize(Scalar::one(&field), word)? {
                let acc = m.get(&[k], &[x, y]).add(&c)?;
                m.set(&[k], &[x, y], acc);
            }
        }
    }
    check_associativity(&m)?;
    check_unit(&m, &basis_vec(&field, dim, 0))?;
    let mut unit = Tensor::zeros(TensorType::new(1, 0), dim, &field);
    unit.set(&[0], &[], Scalar::one(&field));
    let mut structure = Structure::new(dim, field);
    structure.push("m", m);
    structure.push("unit", unit);
    let order = match &ctx.field {
        ScalarField::Cyclotomic { order } => *order,
        _ => unreachable!("validated cyclotomic"),
    };
    Ok(TaftProductAlgebra {
        structure,
        params: p.clone(),
        zeta: ctx.zeta,
        order,
    })
}

impl TaftProductAlgebra {
    pub fn monomial_index(&self, exps: &[(usize, usize)]) -> usize {
        let mut idx = 0;
        for (i, fac) in self.params.factors.iter().enumerate() {
            idx = idx * fac.n * fac.n + exps[i].0 * fac.n + exps[i].1;
        }
        idx
    }

    fn generator(&self, i: usize, kind: u8) -> Vec<Scalar> {
        let mut exps = vec![(0, 0); self.params.factors.len()];
        exps[i] = if kind == G { (1, 0) } else { (0, 1) };
        basis_vec(&self.structure.field, self.structure.dim, self.monomial_index(&exps))
    }

    pub fn generator_g(&self, i: usize) -> Vec<Scalar> {
        self.generator(i, G)
    }

    pub fn generator_t(&self, i: usize) -> Vec<Scalar> {
        self.generator(i, T)
    }
}

/// Alternating product lambda_{i1 i2} lambda_{i2 i3}^{-1} lambda_{i3 i4} ...
/// around a cycle; None when the cycle leaves the support of lambda. Closed
/// even cycles are invariant under rescaling the generators t_i.
pub fn cycle_invariant(lambda: &[Vec<Scalar>], cycle: &[usize]) -> Result<Option<Scalar>> {
    assert!(cycle.len() >= 2, "a cycle needs at least two vertices");
    let mut acc = Scalar::one(&lambda[0][0].field());
    for k in 0..cycle.len() {
        let v = &lambda[cycle[k]][cycle[(k + 1) % cycle.len()]];
        if v.is_zero() {
            return Ok(None);
        }
        acc = if k % 2 == 0 {
            acc.mul(v)?
        } else {
            acc.mul(&invert_scalar(v)?)?
        };
    }
    Ok(Some(acc))
}

/// Reads the defining scalars back off the multiplication tensor by
/// multiplying explicit basis vectors; no construction parameters are
/// consulted beyond the factor shape.
pub fn extract_product_invariants(w: &TaftProductAlgebra) -> Result<ProductInvariants> {
    let bug = |msg: String| CoreError::InternalCheckFailed(msg);
    let m = w
        .structure
        .get("m")
        .ok_or_else(|| bug("product structure lost its m tensor".into()))?;
    let f = w.params.factors.len();
    let field = w.structure.field.clone();
    let unit = basis_vec(&field, w.structure.dim, 0);

    let mut a = Vec::with_capacity(f);
    let mut b = Vec::with_capacity(f);
    let mut g_inv = Vec::with_capacity(f);
    for i in 0..f {
        let n = w.params.factors[i].n;
        let g = w.generator_g(i);
        let ai = scalar_multiple_of(&pow_vec(m, &g, n)?, &unit)?
            .filter(|s| !s.is_zero())
            .ok_or_else(|| bug(format!("gt_{i}^n is not a nonzero multiple of the unit")))?;
        g_inv.push(scale_vec(&pow_vec(m, &g, n - 1)?, &invert_scalar(&ai)?)?);
        a.push(ai);
        let t = w.generator_t(i);
        b.push(
            scalar_multiple_of(&pow_vec(m, &t, n)?, &unit)?
                .ok_or_else(|| bug(format!("t_{i}^n is not a multiple of the unit")))?,
        );
    }

    let zero = Scalar::zero(&field);
    let mut zeta_b = vec![vec![zero.clone(); f]; f];
    let mut lambda = vec![vec![zero.clone(); f]; f];
    let mut big_lambda = vec![vec![None; f]; f];
    let mut two_cycles = Vec::new();
    for i in 0..f {
        zeta_b[i][i] = Scalar::one(&field);
        for j in 0..f {
            if i == j {
                continue;
            }
            let gi = w.generator_g(i);
            let gj = w.generator_g(j);
            zeta_b[i][j] =
                scalar_multiple_of(&mul_vec(m, &gi, &gj)?, &mul_vec(m, &gj, &gi)?)?
                    .filter(|s| !s.is_zero())
                    .ok_or_else(|| bug(format!("gt_{i} gt_{j} is not proportional to gt_{j} gt_{i}")))?;
            let ti = w.generator_t(i);
            let tj = w.generator_t(j);
            let d = sub_vec(&mul_vec(m, &ti, &tj)?, &mul_vec(m, &tj, &ti)?)?;
            let target = mul_vec(m, &g_inv[i], &g_inv[j])?;
            lambda[i][j] = scalar_multiple_of(&d, &target)?
                .ok_or_else(|| bug(format!("[t_{i}, t_{j}] is not proportional to gt_{i}^-1 gt_{j}^-1")))?;
            if i < j && !lambda[i][j].is_zero() {
                let n = w.params.factors[i].n;
                let power = pow_vec(m, &d, n)?;
                let support: Vec<usize> = (0..power.len())
                    .filter(|&k| !power[k].is_zero())
                    .collect();
                if support.len() != 1 {
                    return Err(bug(format!(
                        "[t_{i}, t_{j}]^n has support of size {}",
                        support.len()
                    )));
                }
                big_lambda[i][j] = Some((power[support[0]].clone(), support[0]));
            }
        }
    }
    for i in 0..f {
        for j in (i + 1)..f {
            if let Some(v) = cycle_invariant(&lambda, &[i, j])? {
                two_cycles.push(((i, j), v));
            }
        }
    }
    Ok(ProductInvariants {
        a,
        b,
        zeta_b,
        lambda,
        big_lambda,
        two_cycles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64, f: &ScalarField) -> Scalar {
        Scalar::from_integer(v, f)
    }

    /// Two Sweedler-type factors glued along b_12 = 1 over the order-2 field.
    fn sweedler_pair(a1: i64, a2: i64, lam: i64) -> TaftProductParams {
        let f = ScalarField::Cyclotomic { order: 2 };
        let factor = |a: i64| TaftFactor {
            n: 2,
            c: 1,
            a: int(a, &f),
            b: int(0, &f),
        };
        // lambda_21 = -zeta^1 * lambda_12 = lambda_12 when zeta = -1
        TaftProductParams {
            factors: vec![factor(a1), factor(a2)],
            b_exp: vec![vec![0, 1], vec![1, 0]],
            lambda: vec![vec![int(0, &f), int(lam, &f)], vec![int(lam, &f), int(0, &f)]],
        }
    }

    #[test]
    fn connected_sweedler_pair_matches_the_hand_computed_oracle() {
        let w = build_taft_product(&sweedler_pair(1, 1, 1)).unwrap();
        let m = w.structure.get("m").unwrap();
        let f = w.structure.field.clone();
        let (t1, t2) = (w.generator_t(0), w.generator_t(1));
        let d = sub_vec(
            &mul_vec(m, &t1, &t2).unwrap(),
            &mul_vec(m, &t2, &t1).unwrap(),
        )
        .unwrap();
        // d = gt_1 gt_2 and d^2 = -1
        let g1g2 = basis_vec(&f, 16, w.monomial_index(&[(1, 0), (1, 0)]));
        assert_eq!(d, g1g2);
        let unit = basis_vec(&f, 16, 0);
        assert_eq!(
            mul_vec(m, &d, &d).unwrap(),
            scale_vec(&unit, &int(-1, &f)).unwrap()
        );

        let inv = extract_product_invariants(&w).unwrap();
        assert_eq!(inv.b, vec![int(0, &f), int(0, &f)]);
        assert_eq!(inv.a, vec![int(1, &f), int(1, &f)]);
        assert_eq!(inv.zeta_b[0][1], int(-1, &f));
        assert_eq!(inv.lambda[0][1], int(1, &f));
        assert_eq!(inv.lambda[1][0], int(1, &f));
        assert_eq!(inv.big_lambda[0][1], Some((int(-1, &f), 0)));
        assert_eq!(inv.two_cycles, vec![((0, 1), int(1, &f))]);
    }

    #[test]
    fn nonunit_a_parameters_roundtrip_through_extraction() {
        let w = build_taft_product(&sweedler_pair(2, 3, 1)).unwrap();
        let m = w.structure.get("m").unwrap();
        let f = w.structure.field.clone();
        let inv = extract_product_invariants(&w).unwrap();
        assert_eq!(inv.a, vec![int(2, &f), int(3, &f)]);
        assert_eq!(inv.lambda[0][1], int(1, &f));
        // Lambda must agree with squaring d directly
        let d = sub_vec(
            &mul_vec(m, &w.generator_t(0), &w.generator_t(1)).unwrap(),
            &mul_vec(m, &w.generator_t(1), &w.generator_t(0)).unwrap(),
        )
        .unwrap();
        let dd = mul_vec(m, &d, &d).unwrap();
        let (coeff, idx) = inv.big_lambda[0][1].clone().unwrap();
        assert_eq!(idx, 0);
        assert_eq!(dd[0], coeff);
        assert_eq!(coeff, int(-1, &f).div(&int(6, &f)).unwrap());
    }

    #[test]
    fn disconnected_factors_commute_like_a_tensor_product() {
        let f = ScalarField::Cyclotomic { order: 2 };
        let p = TaftProductParams {
            factors: vec![
                TaftFactor { n: 2, c: 1, a: int(1, &f), b: int(1, &f) },
                TaftFactor { n: 2, c: 1, a: int(1, &f), b: int(0, &f) },
            ],
            b_exp: vec![vec![0, 0], vec![0, 0]],
            lambda: vec![vec![int(0, &f), int(0, &f)], vec![int(0, &f), int(0, &f)]],
        };
        let w = build_taft_product(&p).unwrap();
        let m = w.structure.get("m").unwrap();
        let (t1, t2) = (w.generator_t(0), w.generator_t(1));
        assert_eq!(mul_vec(m, &t1, &t2).unwrap(), mul_vec(m, &t2, &t1).unwrap());
        let g1 = w.generator_g(0);
        assert_eq!(mul_vec(m, &g1, &t2).unwrap(), mul_vec(m, &t2, &g1).unwrap());
        let inv = extract_product_invariants(&w).unwrap();
        assert_eq!(inv.b, vec![int(1, &f), int(0, &f)]);
        assert!(inv.lambda.iter().flatten().all(|v| v.is_zero()));
        assert_eq!(inv.big_lambda[0][1], None);
        assert!(inv.two_cycles.is_empty());
    }

    #[test]
    fn heterogeneous_orders_build_and_obey_their_relations() {
        let f = ScalarField::Cyclotomic { order: 6 };
        let zero = vec![vec![int(0, &f); 2]; 2];
        let p = TaftProductParams {
            factors: vec![
                TaftFactor { n: 2, c: 3, a: int(1, &f), b: int(1, &f) },
                TaftFactor { n: 3, c: 2, a: int(2, &f), b: int(0, &f) },
            ],
            b_exp: vec![vec![0, 0], vec![0, 0]],
            lambda: zero,
        };
        let w = build_taft_product(&p).unwrap();
        assert_eq!(w.structure.dim, 36);
        let m = w.structure.get("m").unwrap();
        let (g2, t2) = (w.generator_g(1), w.generator_t(1));
        let unit = basis_vec(&f, 36, 0);
        assert_eq!(
            pow_vec(m, &g2, 3).unwrap(),
            scale_vec(&unit, &int(2, &f)).unwrap()
        );
        assert!(pow_vec(m, &t2, 3).unwrap().iter().all(|v| v.is_zero()));
        // t_2 gt_2 = zeta^{-2} gt_2 t_2
        let lhs = mul_vec(m, &t2, &g2).unwrap();
        let rhs = scale_vec(
            &mul_vec(m, &g2, &t2).unwrap(),
            &w.zeta.pow(-2).unwrap(),
        )
        .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn constraint_violations_are_cited() {
        let f = ScalarField::Cyclotomic { order: 2 };
        let msg = |p: &TaftProductParams| match build_taft_product(p) {
            Err(CoreError::ParamInvalid(s)) => s,
            other => panic!("expected ParamInvalid, got {other:?}"),
        };

        // lambda nonzero but b_12 = 0 breaks b_12 = c_2
        let mut p = sweedler_pair(1, 1, 1);
        p.b_exp = vec![vec![0, 0], vec![0, 0]];
        assert!(msg(&p).contains("forces b[0][1] = c_1"));

        // lambda matrix inconsistent with lambda_21 = -zeta^b_12 lambda_12
        let mut p = sweedler_pair(1, 1, 1);
        p.lambda[1][0] = int(-1, &f);
        assert!(msg(&p).contains("lambda[1][0] must equal"));

        // diagonal b entry
        let mut p = sweedler_pair(1, 1, 0);
        p.b_exp[0][0] = 1;
        assert!(msg(&p).contains("b[0][0] must vanish"));

        let mut p = sweedler_pair(1, 1, 0);
        p.lambda[0][0] = int(1, &f);
        assert!(msg(&p).contains("lambda[0][0] must vanish"));

        let mut p = sweedler_pair(1, 1, 0);
        p.factors[0].n = 1;
        assert!(msg(&p).contains("n = 1 is below 2"));

        let mut p = sweedler_pair(1, 1, 0);
        p.factors[0].c = 1;
        p.factors[0].n = 3;
        assert!(msg(&p).contains("not divisible"));

        let mut p = sweedler_pair(1, 1, 0);
        p.factors[1].a = int(0, &f);
        assert!(msg(&p).contains("a must be nonzero"));
    }

    #[test]
    fn even_cycle_products_are_invariant_under_generator_rescaling() {
        let f = ScalarField::Cyclotomic { order: 4 };
        let lam = |rows: &[&[i64]]| -> Vec<Vec<Scalar>> {
            rows.iter()
                .map(|r| r.iter().map(|&v| int(v, &f)).collect())
                .collect()
        };
        let base = lam(&[
            &[0, 2, 0, 3],
            &[5, 0, 1, 0],
            &[0, 7, 0, 2],
            &[4, 0, 3, 0],
        ]);
        let x = [int(2, &f), int(3, &f), int(5, &f), int(7, &f)];
        let mut scaled = base.clone();
        for i in 0..4 {
            for j in 0..4 {
                scaled[i][j] = base[i][j].mul(&x[i]).unwrap().mul(&x[j]).unwrap();
            }
        }
        for cycle in [vec![0, 1], vec![0, 3], vec![0, 1, 2, 3]] {
            let v1 = cycle_invariant(&base, &cycle).unwrap().unwrap();
            let v2 = cycle_invariant(&scaled, &cycle).unwrap().unwrap();
            assert_eq!(v1, v2, "cycle {cycle:?}");
        }
        assert_eq!(cycle_invariant(&base, &[0, 2]).unwrap(), None);
        let v = cycle_invariant(&base, &[0, 1]).unwrap().unwrap();
        assert_eq!(v, int(2, &f).div(&int(5, &f)).unwrap());
    }
}
