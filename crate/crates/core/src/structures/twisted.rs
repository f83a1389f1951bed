//! Twisted group algebras U_x U_y = alpha(x,y) U_{xy}, their commutator
//! scalars, scalar products over relator words, and the mu / generic-form
//! report for abelian groups with a chosen cyclic decomposition.

use super::group::{check_cocycle, Cocycle2, GroupTable};
use super::{
    basis_vec, check_associativity, check_unit, combine_root_generators, is_zero_vec, mul_vec,
    root_field_degree, root_field_name, root_of_unity_order, scale_vec, sub_vec,
};
use crate::error::{CoreError, Result};
use crate::scalars::{galois_apply, invert_scalar, Scalar};
use crate::tensors::{Structure, Tensor, TensorType};

#[derive(Clone, Debug)]
pub struct TwistedGroupAlgebra {
    pub structure: Structure,
    pub group: GroupTable,
    pub cocycle: Cocycle2,
}

/// Basis {U_g}, product from the cocycle, grading projections e_g, and the
/// unit alpha(1,1)^{-1} U_1. Associativity and the unit laws are re-verified
/// on the constructed tensors rather than trusted to the cocycle identity.
pub fn build_twisted_group_algebra(
    group: GroupTable,
    cocycle: Cocycle2,
) -> Result<TwistedGroupAlgebra> {
    if group.order() != cocycle.order() {
        return Err(CoreError::ParamInvalid(format!(
            "cocycle on {} elements against a group of order {}",
            cocycle.order(),
            group.order()
        )));
    }
    let check = check_cocycle(&group, &cocycle);
    if !check.holds {
        let (x, y, z) = check.violation.unwrap();
        return Err(CoreError::CocycleInvalid(x, y, z));
    }
    let n = group.order();
    let field = cocycle.field().clone();
    let mut m = Tensor::zeros(TensorType::new(1, 2), n, &field);
    for x in 0..n {
        for y in 0..n {
            m.set(&[group.op(x, y)], &[x, y], cocycle.get(x, y).clone());
        }
    }
    let e = group.identity();
    let mut unit = Tensor::zeros(TensorType::new(1, 0), n, &field);
    unit.set(&[e], &[], invert_scalar(cocycle.get(e, e))?);

    check_associativity(&m)?;
    let unit_vec: Vec<Scalar> = (0..n).map(|i| unit.entries()[i].clone()).collect();
    check_unit(&m, &unit_vec)?;

    let mut structure = Structure::new(n, field.clone());
    structure.push("m", m);
    structure.push("unit", unit);
    for g in 0..n {
        let mut p = Tensor::zeros(TensorType::new(1, 1), n, &field);
        p.set(&[g], &[g], Scalar::one(&field));
        structure.push(&format!("e{g}"), p);
    }
    Ok(TwistedGroupAlgebra {
        structure,
        group,
        cocycle,
    })
}

impl TwistedGroupAlgebra {
    /// Coefficient nu_g with U_g^{-1} = nu_g U_{g^{-1}}, computed from the
    /// table: U_g (nu_g U_{g^{-1}}) must equal the unit alpha(1,1)^{-1} U_1.
    pub fn inverse_coefficient(&self, g: usize) -> Result<Scalar> {
        let ginv = self.group.inv(g);
        let e = self.group.identity();
        invert_scalar(
            &self
                .cocycle
                .get(g, ginv)
                .mul(self.cocycle.get(e, e))?,
        )
    }

    pub fn unit_vec(&self) -> Vec<Scalar> {
        let t = self.structure.get("unit").unwrap();
        t.entries().to_vec()
    }

    /// The coordinate vector of U_g^{-1}.
    pub fn inverse_vec(&self, g: usize) -> Result<Vec<Scalar>> {
        let n = self.group.order();
        let mut v = vec![Scalar::zero(self.cocycle.field()); n];
        v[self.group.inv(g)] = self.inverse_coefficient(g)?;
        Ok(v)
    }
}

/// Coefficient c_{g,h} of U_{[g,h]} in w_{g,h} = U_g U_h U_g^{-1} U_h^{-1},
/// assembled from cocycle values and the table, never by matrix inversion.
pub fn commutator_scalar(w: &TwistedGroupAlgebra, g: usize, h: usize) -> Result<Scalar> {
    let gr = &w.group;
    let a = &w.cocycle;
    let gh = gr.op(g, h);
    let ghg = gr.op(gh, gr.inv(g));
    a.get(g, h)
        .mul(a.get(gh, gr.inv(g)))?
        .mul(a.get(ghg, gr.inv(h)))?
        .mul(&w.inverse_coefficient(g)?)?
        .mul(&w.inverse_coefficient(h)?)
}

/// Scalar value of w_{g,h} relative to the unit; for cocycles normalized at
/// the identity this coincides with commutator_scalar. Always a root of
/// unity (conjugating by U_g^{ord g} is trivial).
fn commutator_value(w: &TwistedGroupAlgebra, g: usize, h: usize) -> Result<Scalar> {
    let e = w.group.identity();
    commutator_scalar(w, g, h)?.mul(w.cocycle.get(e, e))
}

/// Product of the w_{g_i,h_i} over a relator word, by full multiplication in
/// the algebra. The result is reported relative to the unit.
pub fn alpha_tilde(w: &TwistedGroupAlgebra, word: &[(usize, usize)]) -> Result<Scalar> {
    let gr = &w.group;
    let mut prod = gr.identity();
    for &(g, h) in word {
        prod = gr.op(prod, gr.commutator(g, h));
    }
    if prod != gr.identity() {
        return Err(CoreError::WordNotRelator);
    }
    let m = w.structure.get("m").unwrap();
    let n = gr.order();
    let field = w.cocycle.field();
    let mut acc = w.unit_vec();
    for &(g, h) in word {
        let mut v = basis_vec(field, n, g);
        v = mul_vec(m, &v, &basis_vec(field, n, h))?;
        v = mul_vec(m, &v, &w.inverse_vec(g)?)?;
        v = mul_vec(m, &v, &w.inverse_vec(h)?)?;
        acc = mul_vec(m, &acc, &v)?;
    }
    let unit = w.unit_vec();
    let e = gr.identity();
    let s = acc[e].div(&unit[e])?;
    if !is_zero_vec(&sub_vec(&acc, &scale_vec(&unit, &s)?)?) {
        return Err(CoreError::InternalCheckFailed(
            "relator product is not a multiple of the unit".into(),
        ));
    }
    Ok(s)
}

#[derive(Clone, Debug)]
pub struct GenericFormReport {
    pub mu: Scalar,
    pub mu_order: usize,
    pub k0: String,
    pub k0_degree: usize,
    pub generator_orders: Vec<usize>,
    /// commutators[i][j] = scalar value of w_{x_i, x_j} on generator pairs
    pub commutators: Vec<Vec<Scalar>>,
    pub text: String,
}

/// For an abelian group with a cyclic decomposition: commutator scalars on
/// generator pairs, a generator mu of the root-of-unity group they span,
/// K_0 = QQ(mu), and the rendered generic form over K_0[a_i^{+-1}].
pub fn mu_and_generic_form(group: &GroupTable, cocycle: &Cocycle2) -> Result<GenericFormReport> {
    if !group.is_abelian() {
        return Err(CoreError::NotAbelian);
    }
    let dec: Vec<(usize, usize)> = group
        .decomposition()
        .ok_or(CoreError::MissingDecomposition)?
        .to_vec();
    let w = build_twisted_group_algebra(group.clone(), cocycle.clone())?;
    let z = dec.len();
    let field = cocycle.field();
    let mut commutators = vec![vec![Scalar::one(field); z]; z];
    let mut mu = Scalar::one(field);
    for i in 0..z {
        for j in 0..z {
            if i == j {
                continue;
            }
            let c = commutator_value(&w, dec[i].0, dec[j].0)?;
            mu = combine_root_generators(&mu, &c)?;
            commutators[i][j] = c;
        }
    }
    let mu_order = root_of_unity_order(&mu)?;
    let k0 = root_field_name(mu_order);
    let k0_degree = root_field_degree(mu_order);

    let mut text = String::new();
    let ring: Vec<String> = (1..=z).map(|i| format!("a{i}^(+-1)")).collect();
    text.push_str(&format!("base ring: {k0}[{}]\n", ring.join(", ")));
    let gens: Vec<String> = (1..=z).map(|i| format!("U{i}")).collect();
    text.push_str(&format!("generators: {}\n", gens.join(", ")));
    text.push_str("relations:\n");
    for (i, &(_, ord)) in dec.iter().enumerate() {
        text.push_str(&format!("  U{}^{} = a{}\n", i + 1, ord, i + 1));
    }
    for i in 0..z {
        for j in (i + 1)..z {
            // U_j U_i = (alpha(x_j,x_i)/alpha(x_i,x_j)) U_i U_j
            let ratio = cocycle
                .get(dec[j].0, dec[i].0)
                .div(cocycle.get(dec[i].0, dec[j].0))?;
            text.push_str(&format!(
                "  U{}*U{} = ({})*U{}*U{}\n",
                j + 1,
                i + 1,
                ratio,
                i + 1,
                j + 1
            ));
        }
    }
    text.push_str(&format!("mu = {mu} (order {mu_order}), K0 = {k0} of degree {k0_degree}\n"));

    Ok(GenericFormReport {
        mu,
        mu_order,
        k0,
        k0_degree,
        generator_orders: dec.iter().map(|&(_, o)| o).collect(),
        commutators,
        text,
    })
}

/// sigma_k applied to every cocycle entry.
pub fn twist_cocycle(cocycle: &Cocycle2, k: i64) -> Result<Cocycle2> {
    let n = cocycle.order();
    let mut entries = vec![Vec::with_capacity(n); n];
    for (x, row) in entries.iter_mut().enumerate() {
        for y in 0..n {
            row.push(galois_apply(k, cocycle.get(x, y))?);
        }
    }
    Cocycle2::new(entries)
}
