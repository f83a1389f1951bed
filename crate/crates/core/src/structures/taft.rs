//! Taft-type comodule algebras: basis gt^i t^j with t^j g^k = zeta^{-jk} g^k t^j,
//! g^n = a, t^n = b, together with the coaction operators T_gamma and T_xi
//! computed from rho(g) = g (x) g, rho(t) = t (x) g^{-1} + 1 (x) g^{-1} x.

use std::collections::BTreeMap;

use super::group::designated_root;
use super::{
    basis_vec, check_associativity, check_unit, find_unit, m_at, mul_vec, pow_vec,
    scalar_multiple_of, scale_vec,
};
use crate::error::{CoreError, Result};
use crate::linalg::Mat;
use crate::scalars::{invert_scalar, Scalar, ScalarField};
use crate::tensors::{as_default_map, tensor_from_map, Structure, Tensor, TensorType};

#[derive(Clone, Debug)]
pub struct TaftParams {
    pub n: usize,
    pub a: Scalar,
    pub b: Scalar,
}

#[derive(Clone, Debug)]
pub struct TaftAlgebra {
    pub structure: Structure,
    pub n: usize,
    pub zeta: Scalar,
    pub params: TaftParams,
}

/// Extracted invariant data: b is exact, a is only well defined as the class
/// a (K^x)^n — the representative depends on the scaling of u.
#[derive(Clone, Debug)]
pub struct TaftInvariants {
    pub n: usize,
    pub a_class: Scalar,
    pub b: Scalar,
    pub u: Vec<Scalar>,
    pub t: Vec<Scalar>,
}

fn validate(p: &TaftParams) -> Result<Scalar> {
    if p.n < 2 {
        return Err(CoreError::ParamInvalid(format!("n = {} is below 2", p.n)));
    }
    if p.a.is_zero() {
        return Err(CoreError::ParamInvalid("a must be nonzero".into()));
    }
    if p.a.field() != p.b.field() {
        return Err(CoreError::ParamInvalid(
            "a and b live in different fields".into(),
        ));
    }
    match p.a.field() {
        ScalarField::Cyclotomic { order } if order % p.n == 0 => {}
        f => {
            return Err(CoreError::ParamInvalid(format!(
                "field {f} is not cyclotomic of order divisible by {}",
                p.n
            )))
        }
    }
    designated_root(p.n, &p.a.field())
}

/// Sparse element of W (x) H, keyed by (w index, h index).
type WH = BTreeMap<(usize, usize), Scalar>;

/// Single-basis product in a monomial algebra with the Taft straightening:
/// (i,j) * (k,l) = zeta^{-jk} a^{floor((i+k)/n)} b^{floor((j+l)/n)} (i+k, j+l).
fn monomial_mul(
    n: usize,
    zeta: &Scalar,
    a: &Scalar,
    b: &Scalar,
    x: (usize, usize),
    y: (usize, usize),
) -> Result<Option<(usize, Scalar)>> {
    let (i, j) = x;
    let (k, l) = y;
    let mut c = zeta.pow(-((j * k) as i64))?;
    if i + k >= n {
        c = c.mul(a)?;
    }
    if j + l >= n {
        c = c.mul(b)?;
        if c.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some((((i + k) % n) * n + (j + l) % n, c)))
}

pub fn build_taft(p: &TaftParams) -> Result<TaftAlgebra> {
    let zeta = validate(p)?;
    let n = p.n;
    let dim = n * n;
    let field = p.a.field();
    let one = Scalar::one(&field);

    let mut m = Tensor::zeros(TensorType::new(1, 2), dim, &field);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    if let Some((idx, c)) =
                        monomial_mul(n, &zeta, &p.a, &p.b, (i, j), (k, l))?
                    {
                        m.set(&[idx], &[i * n + j, k * n + l], c);
                    }
                }
            }
        }
    }
    let mut unit = Tensor::zeros(TensorType::new(1, 0), dim, &field);
    unit.set(&[0], &[], one.clone());

    // H is the same monomial algebra with g^n = 1, x^n = 0
    let h_mul = |x: (usize, usize), y: (usize, usize)| {
        monomial_mul(n, &zeta, &one, &Scalar::zero(&field), x, y)
    };
    let w_mul =
        |x: (usize, usize), y: (usize, usize)| monomial_mul(n, &zeta, &p.a, &p.b, x, y);
    let wh_mul = |x: &WH, y: &WH| -> Result<WH> {
        let mut out = WH::new();
        for (&(w1, h1), c1) in x {
            for (&(w2, h2), c2) in y {
                let wp = w_mul((w1 / n, w1 % n), (w2 / n, w2 % n))?;
                let hp = h_mul((h1 / n, h1 % n), (h2 / n, h2 % n))?;
                if let (Some((w, cw)), Some((h, ch))) = (wp, hp) {
                    let c = c1.mul(c2)?.mul(&cw)?.mul(&ch)?;
                    let slot = out.entry((w, h)).or_insert_with(|| Scalar::zero(&field));
                    *slot = slot.add(&c)?;
                    if slot.is_zero() {
                        out.remove(&(w, h));
                    }
                }
            }
        }
        Ok(out)
    };

    let rho_g: WH = [((n, n), one.clone())].into_iter().collect(); // g~ (x) g
    let mut rho_t = WH::new(); // t (x) g^{-1} + 1 (x) g^{-1} x
    rho_t.insert((1, (n - 1) * n), one.clone());
    rho_t.insert((0, (n - 1) * n + 1), one.clone());

    let mut rho: Vec<WH> = Vec::with_capacity(dim);
    for i in 0..n {
        for j in 0..n {
            let mut acc: WH = [((0, 0), one.clone())].into_iter().collect();
            for _ in 0..i {
                acc = wh_mul(&acc, &rho_g)?;
            }
            for _ in 0..j {
                acc = wh_mul(&acc, &rho_t)?;
            }
            rho.push(acc);
        }
    }

    // gamma(g^i x^j) = zeta^i delta_{j,0}; xi(g^i x^j) = delta_{j,1}
    let gamma_of = |h: usize| -> Result<Scalar> {
        if h % n == 0 {
            zeta.pow((h / n) as i64)
        } else {
            Ok(Scalar::zero(&field))
        }
    };
    let xi_of = |h: usize| {
        if h % n == 1 {
            one.clone()
        } else {
            Scalar::zero(&field)
        }
    };
    let mut g_mat = Mat::zeros(&field, dim, dim);
    let mut x_mat = Mat::zeros(&field, dim, dim);
    for (col, r) in rho.iter().enumerate() {
        for (&(w, h), c) in r {
            let gv = gamma_of(h)?;
            if !gv.is_zero() {
                g_mat.set(w, col, g_mat.get(w, col).add(&gv.mul(c)?)?);
            }
            let xv = xi_of(h);
            if !xv.is_zero() {
                x_mat.set(w, col, x_mat.get(w, col).add(&xv.mul(c)?)?);
            }
        }
    }

    check_associativity(&m)?;
    check_unit(&m, &basis_vec(&field, dim, 0))?;
    // gamma has multiplicative order exactly n; xi^n = 0
    let id = Mat::identity(&field, dim);
    let mut acc = id.clone();
    for k in 1..=n {
        acc = acc.matmul(&g_mat);
        if acc.sub(&id).is_zero() != (k == n) {
            return Err(CoreError::InternalCheckFailed(format!(
                "gamma^{k} {} the identity",
                if k == n { "is not" } else { "is already" }
            )));
        }
    }
    let mut xp = id.clone();
    for _ in 0..n {
        xp = xp.matmul(&x_mat);
    }
    if !xp.is_zero() {
        return Err(CoreError::InternalCheckFailed("xi^n is nonzero".into()));
    }
    // gamma xi gamma^{-1} = zeta xi
    let mut g_inv = id.clone();
    for _ in 1..n {
        g_inv = g_inv.matmul(&g_mat);
    }
    if !g_mat
        .matmul(&x_mat)
        .matmul(&g_inv)
        .sub(&x_mat.scale(&zeta))
        .is_zero()
    {
        return Err(CoreError::InternalCheckFailed(
            "gamma xi gamma^{-1} differs from zeta xi".into(),
        ));
    }
    // rho is an algebra map: rho(e_x e_y) = rho(e_x) rho(e_y)
    for x in 0..dim {
        for y in 0..dim {
            let mut lhs = WH::new();
            for k in 0..dim {
                let c = m_at(&m, k, x, y);
                if c.is_zero() {
                    continue;
                }
                for (&key, rc) in &rho[k] {
                    let slot = lhs.entry(key).or_insert_with(|| Scalar::zero(&field));
                    *slot = slot.add(&c.mul(rc)?)?;
                    if slot.is_zero() {
                        lhs.remove(&key);
                    }
                }
            }
            if lhs != wh_mul(&rho[x], &rho[y])? {
                return Err(CoreError::InternalCheckFailed(format!(
                    "rho fails to be multiplicative on basis pair ({x}, {y})"
                )));
            }
        }
    }

    let mut structure = Structure::new(dim, field.clone());
    structure.push("m", m);
    structure.push("unit", unit);
    structure.push(
        "gamma",
        tensor_from_map(&g_mat, TensorType::new(1, 0), TensorType::new(1, 0), dim)?,
    );
    structure.push(
        "xi",
        tensor_from_map(&x_mat, TensorType::new(1, 0), TensorType::new(1, 0), dim)?,
    );
    Ok(TaftAlgebra {
        structure,
        n,
        zeta,
        params: p.clone(),
    })
}

fn stacked_nullspace(parts: &[&Mat]) -> Vec<Vec<Scalar>> {
    let field = parts[0].field().clone();
    let mut rows = Vec::new();
    for m in parts {
        for r in 0..m.nrows() {
            rows.push(m.row(r).to_vec());
        }
    }
    Mat::from_rows(&field, rows).nullspace()
}

/// Recovers (a mod n-th powers, b exact) from a structure carrying m, unit
/// behavior, gamma and xi, by eigenspace decompositions alone — no access to
/// the construction parameters.
pub fn extract_taft_invariants(w: &Structure) -> Result<TaftInvariants> {
    let shaped = |msg: &str| CoreError::NotTaftShaped(msg.to_string());
    let m = w.get("m").ok_or_else(|| shaped("missing tensor m"))?;
    let gamma = w.get("gamma").ok_or_else(|| shaped("missing tensor gamma"))?;
    let xi = w.get("xi").ok_or_else(|| shaped("missing tensor xi"))?;
    if m.ttype() != TensorType::new(1, 2)
        || gamma.ttype() != TensorType::new(1, 1)
        || xi.ttype() != TensorType::new(1, 1)
    {
        return Err(shaped("tensors m, gamma, xi have the wrong types"));
    }
    let dim = w.dim;
    let n = (1..=dim).find(|k| k * k == dim).filter(|&k| k >= 2).ok_or_else(|| {
        shaped("dimension is not n^2 for some n >= 2")
    })?;
    let field = w.field.clone();
    let zeta = designated_root(n, &field)
        .map_err(|_| shaped("field carries no designated primitive n-th root"))?;

    let unit = find_unit(w)?.ok_or_else(|| shaped("the algebra has no unit"))?;
    let g_mat = as_default_map(gamma)?;
    let x_mat = as_default_map(xi)?;
    let id = Mat::identity(&field, dim);

    for i in 0..n {
        let shifted = g_mat.sub(&id.scale(&zeta.pow(i as i64)?));
        let d = shifted.nullspace().len();
        if d != n {
            return Err(shaped(&format!(
                "gamma eigenspace for zeta^{i} has dimension {d}, expected {n}"
            )));
        }
    }
    if x_mat.nullspace().len() != n {
        return Err(shaped("kernel of xi does not have dimension n"));
    }

    let shifted = g_mat.sub(&id.scale(&zeta));
    let u_space = stacked_nullspace(&[&shifted, &x_mat]);
    if u_space.len() != 1 {
        return Err(shaped(&format!(
            "candidate line W_1 meet ker(xi) has dimension {}",
            u_space.len()
        )));
    }
    let u = u_space.into_iter().next().unwrap();

    let u_pow = pow_vec(m, &u, n)?;
    let a_class = scalar_multiple_of(&u_pow, &unit)?
        .filter(|a| !a.is_zero())
        .ok_or_else(|| shaped("u^n is not a nonzero multiple of the unit"))?;
    let u_inv = scale_vec(&pow_vec(m, &u, n - 1)?, &invert_scalar(&a_class)?)?;
    if mul_vec(m, &u, &u_inv)? != unit {
        return Err(shaped("u is not invertible"));
    }

    let mut ad = Mat::zeros(&field, dim, dim);
    for i in 0..dim {
        let col = mul_vec(m, &mul_vec(m, &u, &basis_vec(&field, dim, i))?, &u_inv)?;
        for (r, e) in col.into_iter().enumerate() {
            ad.set(r, i, e);
        }
    }
    let shifted_inv = g_mat.sub(&id.scale(&zeta.pow(-1)?));
    let ad_shifted = ad.sub(&id.scale(&zeta));
    let t_space = stacked_nullspace(&[&shifted_inv, &ad_shifted]);
    if t_space.len() != 1 {
        return Err(shaped(&format!(
            "bi-eigenspace W(-1,1) has dimension {}",
            t_space.len()
        )));
    }
    let t0 = t_space.into_iter().next().unwrap();
    let image = x_mat.matvec(&t0);
    let s = scalar_multiple_of(&image, &unit)?
        .filter(|s| !s.is_zero())
        .ok_or_else(|| shaped("xi does not map the candidate line onto the unit line"))?;
    let t = scale_vec(&t0, &invert_scalar(&s)?)?;

    let t_pow = pow_vec(m, &t, n)?;
    let b = scalar_multiple_of(&t_pow, &unit)?
        .ok_or_else(|| shaped("t^n is not a multiple of the unit"))?;

    Ok(TaftInvariants {
        n,
        a_class,
        b,
        u,
        t,
    })
}
