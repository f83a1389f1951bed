//! Truncated closure of a tensor structure: the smallest family of
//! Q-subspaces X^{p,q} (p <= P, q <= Q) containing the structure tensors and
//! the identity, closed under tensor products within the bound, all single
//! contractions, and slot permutations. X^{0,0} is then a Q-subalgebra of the
//! scalar field and its Galois stabilizer pins down the fixed field.
//!
//! Everything is stored over Q: a tensor over QQ(zeta_n) flattens to
//! phi(n) * n^(p+q) rational coordinates, so span growth is ordinary exact
//! row reduction. Results are lower bounds for the untruncated spaces;
//! scalars reachable only through tensor types beyond the bound are missed.

use std::collections::BTreeMap;

use num::BigRational;

use crate::error::{CoreError, Result};
use crate::linalg::QEchelon;
use crate::nt::{euler_phi, units_mod};
use crate::scalars::{galois_apply, invert_scalar, Scalar, ScalarField};
use crate::tensors::{contract, permute, tensor_product, Structure, Tensor, TensorType};
use crate::tensors::DEFAULT_EVAL_BUDGET;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeBound {
    pub p_max: usize,
    pub q_max: usize,
    pub max_rounds: usize,
}

impl DegreeBound {
    pub fn new(p_max: usize, q_max: usize, max_rounds: usize) -> DegreeBound {
        DegreeBound {
            p_max,
            q_max,
            max_rounds,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClosureState {
    wdim: usize,
    field: ScalarField,
    bound: DegreeBound,
    /// Canonical reduced Q-basis per type, keyed (p, q).
    bases: BTreeMap<(usize, usize), QEchelon>,
    converged: bool,
    rounds: usize,
}

impl ClosureState {
    pub fn wdim(&self) -> usize {
        self.wdim
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn bound(&self) -> DegreeBound {
        self.bound
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.bases.get(&(p, q)).map_or(0, |e| e.dim())
    }

    pub fn types(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bases.keys().copied()
    }

    pub fn contains(&self, t: &Tensor) -> Result<bool> {
        let key = (t.ttype().p, t.ttype().q);
        let Some(ech) = self.bases.get(&key) else {
            return Ok(false);
        };
        Ok(ech.contains(&flatten(t)))
    }

    /// The reduced basis of X^{p,q}, unflattened back to tensors.
    pub fn basis(&self, p: usize, q: usize) -> Vec<Tensor> {
        let Some(ech) = self.bases.get(&(p, q)) else {
            return Vec::new();
        };
        ech.rows()
            .iter()
            .map(|row| unflatten(TensorType::new(p, q), self.wdim, &self.field, row))
            .collect()
    }

    /// X^{0,0} as scalars.
    pub fn x00_scalars(&self) -> Vec<Scalar> {
        self.basis(0, 0)
            .into_iter()
            .map(|t| t.entries()[0].clone())
            .collect()
    }
}

fn q_dim_of(field: &ScalarField) -> Result<usize> {
    field.q_dim().ok_or_else(|| {
        CoreError::UnsupportedField(format!(
            "closure needs a finite Q-dimension scalar field, not {field}"
        ))
    })
}

fn flatten(t: &Tensor) -> Vec<BigRational> {
    let mut out = Vec::new();
    for e in t.entries() {
        out.extend(e.q_coords());
    }
    out
}

fn unflatten(ttype: TensorType, wdim: usize, field: &ScalarField, row: &[BigRational]) -> Tensor {
    let qd = field.q_dim().expect("caller checked the field");
    let entries: Vec<Scalar> = row
        .chunks(qd)
        .map(|c| Scalar::from_q_coords(field, c))
        .collect();
    Tensor::from_entries(ttype, wdim, field, entries)
}

pub fn compute_closure(s: &Structure, b: DegreeBound) -> Result<ClosureState> {
    compute_closure_budgeted(s, b, DEFAULT_EVAL_BUDGET)
}

/// The budget caps total work, counted in rational coordinates produced while
/// evaluating candidate tensors.
pub fn compute_closure_budgeted(
    s: &Structure,
    b: DegreeBound,
    budget: u128,
) -> Result<ClosureState> {
    let qd = q_dim_of(&s.field)?;
    if b.max_rounds < 1 {
        return Err(CoreError::TypeError(
            "closure bound needs max_rounds >= 1".to_string(),
        ));
    }
    for (name, t) in &s.tensors {
        if t.ttype().p > b.p_max || t.ttype().q > b.q_max {
            return Err(CoreError::TypeError(format!(
                "tensor '{name}' of type ({},{}) exceeds the closure bound ({},{})",
                t.ttype().p,
                t.ttype().q,
                b.p_max,
                b.q_max
            )));
        }
    }

    let mut bases: BTreeMap<(usize, usize), QEchelon> = BTreeMap::new();
    for p in 0..=b.p_max {
        for q in 0..=b.q_max {
            let width = qd * s.dim.pow((p + q) as u32);
            bases.insert((p, q), QEchelon::new(width));
        }
    }
    // Raw representatives per type, used to generate candidates. Same span as
    // the echelon, kept in insertion order.
    let mut reps: BTreeMap<(usize, usize), Vec<Tensor>> = BTreeMap::new();
    for key in bases.keys() {
        reps.insert(*key, Vec::new());
    }
    let mut work: u128 = 0;

    let mut frontier: Vec<Tensor> = Vec::new();
    let admit = |t: Tensor,
                     bases: &mut BTreeMap<(usize, usize), QEchelon>,
                     reps: &mut BTreeMap<(usize, usize), Vec<Tensor>>,
                     frontier: &mut Vec<Tensor>,
                     work: &mut u128|
     -> Result<()> {
        let key = (t.ttype().p, t.ttype().q);
        *work += (qd * t.entries().len()) as u128;
        if *work > budget {
            return Err(CoreError::BudgetExceeded(format!(
                "closure work {work} rational coordinates exceeds the budget {budget}"
            )));
        }
        if bases.get_mut(&key).expect("type within bound").insert(&flatten(&t)) {
            reps.get_mut(&key).expect("type within bound").push(t.clone());
            frontier.push(t);
        }
        Ok(())
    };

    for (_, t) in &s.tensors {
        admit(t.clone(), &mut bases, &mut reps, &mut frontier, &mut work)?;
    }
    admit(
        Tensor::identity(s.dim, &s.field),
        &mut bases,
        &mut reps,
        &mut frontier,
        &mut work,
    )?;

    let mut rounds = 0usize;
    let mut converged = false;
    while rounds < b.max_rounds {
        rounds += 1;
        let current = std::mem::take(&mut frontier);
        if current.is_empty() {
            converged = true;
            rounds -= 1;
            break;
        }
        for v in &current {
            let (p, q) = (v.ttype().p, v.ttype().q);
            for a in 0..p {
                for c in 0..q {
                    let t = contract(v, a, c)?;
                    admit(t, &mut bases, &mut reps, &mut frontier, &mut work)?;
                }
            }
            for i in 0..p.saturating_sub(1) {
                let mut sigma: Vec<usize> = (0..p).collect();
                sigma.swap(i, i + 1);
                let tau: Vec<usize> = (0..q).collect();
                let t = permute(v, &sigma, &tau)?;
                admit(t, &mut bases, &mut reps, &mut frontier, &mut work)?;
            }
            for j in 0..q.saturating_sub(1) {
                let sigma: Vec<usize> = (0..p).collect();
                let mut tau: Vec<usize> = (0..q).collect();
                tau.swap(j, j + 1);
                let t = permute(v, &sigma, &tau)?;
                admit(t, &mut bases, &mut reps, &mut frontier, &mut work)?;
            }
            // Pair the new vector against everything admitted so far,
            // including itself; (old, old) pairs were handled when the
            // younger one was new.
            let partners: Vec<Tensor> = reps
                .iter()
                .filter(|((p2, q2), _)| p + p2 <= b.p_max && q + q2 <= b.q_max)
                .flat_map(|(_, list)| list.iter().cloned())
                .collect();
            for u in partners {
                let t = tensor_product(v, &u)?;
                admit(t, &mut bases, &mut reps, &mut frontier, &mut work)?;
                let t = tensor_product(&u, v)?;
                admit(t, &mut bases, &mut reps, &mut frontier, &mut work)?;
            }
        }
        if frontier.is_empty() {
            converged = true;
            break;
        }
    }

    Ok(ClosureState {
        wdim: s.dim,
        field: s.field.clone(),
        bound: b,
        bases,
        converged,
        rounds,
    })
}

#[derive(Clone, Debug)]
pub struct InvariantFieldReport {
    pub q_basis: Vec<Scalar>,
    pub field_closed: bool,
    /// Residues k coprime to n whose sigma_k fixes X^{0,0} pointwise.
    pub galois_stabilizer: Vec<usize>,
    pub fixed_field_degree: usize,
}

pub fn invariant_field_report(st: &ClosureState) -> Result<InvariantFieldReport> {
    let basis = st.x00_scalars();
    let qd = q_dim_of(&st.field)?;
    let mut span = QEchelon::new(qd);
    for b in &basis {
        span.insert(&b.q_coords());
    }

    let one = Scalar::one(&st.field);
    let mut field_closed = span.contains(&one.q_coords());
    'closure: for a in &basis {
        for b in &basis {
            if !span.contains(&a.mul(b)?.q_coords()) {
                field_closed = false;
                break 'closure;
            }
        }
    }
    if field_closed {
        // A finite-dimensional Q-subalgebra of a field is a field; check the
        // inverses anyway since they are cheap witnesses.
        for b in &basis {
            if !span.contains(&invert_scalar(b)?.q_coords()) {
                field_closed = false;
                break;
            }
        }
    }

    let (order, phi) = match &st.field {
        ScalarField::Rational => (1usize, 1usize),
        ScalarField::Cyclotomic { order } => (*order, euler_phi(*order)),
        other => {
            return Err(CoreError::UnsupportedField(format!(
                "invariant field report over {other}"
            )))
        }
    };
    let mut stabilizer = Vec::new();
    if order == 1 {
        stabilizer.push(1);
    } else {
        for k in units_mod(order) {
            let fixes = basis
                .iter()
                .map(|b| Ok(galois_apply(k as i64, b)? == *b))
                .collect::<Result<Vec<bool>>>()?
                .into_iter()
                .all(|x| x);
            if fixes {
                stabilizer.push(k);
            }
        }
    }
    stabilizer.sort_unstable();
    let degree = phi / stabilizer.len();
    Ok(InvariantFieldReport {
        q_basis: basis,
        field_closed,
        galois_stabilizer: stabilizer,
        fixed_field_degree: degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::parse_scalar;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag_tensor(field: &ScalarField, entries: &[Scalar]) -> Tensor {
        let n = entries.len();
        let mut t = Tensor::zeros(TensorType::new(1, 1), n, field);
        for (i, e) in entries.iter().enumerate() {
            t.set(&[i], &[i], e.clone());
        }
        t
    }

    fn zeta8_diag_structure() -> Structure {
        let f = ScalarField::Cyclotomic { order: 8 };
        let z = parse_scalar("z", &f).unwrap();
        let t = diag_tensor(&f, &[z, Scalar::zero(&f)]);
        let mut st = Structure::new(2, f);
        st.push("T", t);
        st
    }

    fn sqrt2_diag_structure() -> Structure {
        let f = ScalarField::Cyclotomic { order: 8 };
        let r2 = parse_scalar("z - z^3", &f).unwrap();
        let t = diag_tensor(&f, &[r2.clone(), r2.neg()]);
        let mut st = Structure::new(2, f);
        st.push("T", t);
        st
    }

    #[test]
    fn empty_structure_closure_is_symmetric_group_span() {
        let st = Structure::new(2, ScalarField::Rational);
        let state = compute_closure(&st, DegreeBound::new(2, 2, 20)).unwrap();
        assert!(state.converged());
        assert_eq!(state.dim(0, 0), 1);
        assert_eq!(state.dim(1, 1), 1);
        assert_eq!(state.dim(2, 2), 2);
        assert_eq!(state.dim(1, 0), 0);
        // X^{0,0} is exactly Q.
        let rep = invariant_field_report(&state).unwrap();
        assert!(rep.field_closed);
        assert_eq!(rep.fixed_field_degree, 1);
        assert_eq!(rep.galois_stabilizer, vec![1]);
    }

    #[test]
    fn zeta_eigenvalue_generates_the_full_cyclotomic_field() {
        let st = zeta8_diag_structure();
        let state = compute_closure(&st, DegreeBound::new(1, 1, 30)).unwrap();
        assert!(state.converged());
        assert_eq!(state.dim(0, 0), 4);
        let rep = invariant_field_report(&state).unwrap();
        assert!(rep.field_closed);
        assert_eq!(rep.galois_stabilizer, vec![1]);
        assert_eq!(rep.fixed_field_degree, 4);
    }

    #[test]
    fn semisimple_sqrt2_pair_keeps_rational_invariants() {
        let st = sqrt2_diag_structure();
        for bound in [DegreeBound::new(1, 1, 30), DegreeBound::new(2, 2, 30)] {
            let state = compute_closure(&st, bound).unwrap();
            assert!(state.converged());
            assert_eq!(state.dim(0, 0), 1);
            let rep = invariant_field_report(&state).unwrap();
            assert!(rep.field_closed);
            assert_eq!(rep.fixed_field_degree, 1);
            assert_eq!(rep.galois_stabilizer, vec![1, 3, 5, 7]);
        }
    }

    #[test]
    fn stabilizer_of_sqrt2_line_is_index_two() {
        // Hand-built state check via the report path: seed a structure whose
        // only scalar output is z + z^-1 = z - z^3... build diag with both
        // sqrt2 eigenvalues equal so the trace survives.
        let f = ScalarField::Cyclotomic { order: 8 };
        let r2 = parse_scalar("z - z^3", &f).unwrap();
        let t = diag_tensor(&f, &[r2.clone(), r2.clone()]);
        let mut st = Structure::new(2, f);
        st.push("T", t);
        let state = compute_closure(&st, DegreeBound::new(1, 1, 30)).unwrap();
        assert!(state.converged());
        // traces generate Q-span{1, sqrt2}
        assert_eq!(state.dim(0, 0), 2);
        let rep = invariant_field_report(&state).unwrap();
        assert!(rep.field_closed);
        assert_eq!(rep.galois_stabilizer, vec![1, 7]);
        assert_eq!(rep.fixed_field_degree, 2);
    }

    #[test]
    fn rational_function_field_is_rejected() {
        let st = Structure::new(2, ScalarField::RationalFunction);
        assert!(matches!(
            compute_closure(&st, DegreeBound::new(1, 1, 5)),
            Err(CoreError::UnsupportedField(_))
        ));
    }

    #[test]
    fn bound_validation() {
        let st = zeta8_diag_structure();
        assert!(matches!(
            compute_closure(&st, DegreeBound::new(0, 0, 5)),
            Err(CoreError::TypeError(_))
        ));
        assert!(matches!(
            compute_closure(&st, DegreeBound::new(1, 1, 0)),
            Err(CoreError::TypeError(_))
        ));
    }

    #[test]
    fn tiny_budget_is_reported() {
        let st = zeta8_diag_structure();
        assert!(matches!(
            compute_closure_budgeted(&st, DegreeBound::new(1, 1, 30), 10),
            Err(CoreError::BudgetExceeded(_))
        ));
    }

    #[test]
    fn max_rounds_cap_reports_non_convergence() {
        let st = zeta8_diag_structure();
        let state = compute_closure(&st, DegreeBound::new(1, 1, 1)).unwrap();
        assert!(!state.converged());
        assert_eq!(state.rounds(), 1);
    }

    #[test]
    fn monotone_in_the_bound() {
        let st = zeta8_diag_structure();
        let small = compute_closure(&st, DegreeBound::new(1, 1, 30)).unwrap();
        let large = compute_closure(&st, DegreeBound::new(2, 2, 30)).unwrap();
        for (p, q) in small.types() {
            for b in small.basis(p, q) {
                assert!(large.contains(&b).unwrap());
            }
        }
    }

    #[test]
    fn idempotent_on_converged_bases() {
        for st in [zeta8_diag_structure(), Structure::new(2, ScalarField::Rational)] {
            let bound = DegreeBound::new(1, 1, 30);
            let state = compute_closure(&st, bound).unwrap();
            assert!(state.converged());
            let mut reseeded = Structure::new(st.dim, st.field.clone());
            let mut i = 0;
            for (p, q) in state.types() {
                for b in state.basis(p, q) {
                    reseeded.push(&format!("b{i}"), b);
                    i += 1;
                }
            }
            let again = compute_closure(&reseeded, bound).unwrap();
            assert!(again.converged());
            for (p, q) in state.types() {
                assert_eq!(state.dim(p, q), again.dim(p, q), "type ({p},{q})");
                for (u, v) in state.basis(p, q).iter().zip(again.basis(p, q).iter()) {
                    assert_eq!(u.entries(), v.entries());
                }
            }
        }
    }

    #[test]
    fn converged_state_is_closed_under_generators() {
        let st = zeta8_diag_structure();
        let bound = DegreeBound::new(2, 2, 40);
        let state = compute_closure(&st, bound).unwrap();
        assert!(state.converged());
        let mut rng = ChaCha8Rng::seed_from_u64(0xC105);
        let mut all: Vec<Tensor> = Vec::new();
        for (p, q) in state.types() {
            all.extend(state.basis(p, q));
        }
        for _ in 0..60 {
            let v = &all[rng.gen_range(0..all.len())];
            let (p, q) = (v.ttype().p, v.ttype().q);
            match rng.gen_range(0..3) {
                0 => {
                    let u = &all[rng.gen_range(0..all.len())];
                    if p + u.ttype().p <= bound.p_max && q + u.ttype().q <= bound.q_max {
                        let t = tensor_product(v, u).unwrap();
                        assert!(state.contains(&t).unwrap());
                    }
                }
                1 if p > 0 && q > 0 => {
                    let a = rng.gen_range(0..p);
                    let c = rng.gen_range(0..q);
                    assert!(state.contains(&contract(v, a, c).unwrap()).unwrap());
                }
                _ if p > 1 => {
                    let mut sigma: Vec<usize> = (0..p).collect();
                    let i = rng.gen_range(0..p - 1);
                    sigma.swap(i, i + 1);
                    let tau: Vec<usize> = (0..q).collect();
                    assert!(state.contains(&permute(v, &sigma, &tau).unwrap()).unwrap());
                }
                _ => {}
            }
        }
    }

    #[test]
    fn galois_twist_carries_the_invariant_basis() {
        let st = zeta8_diag_structure();
        let base = compute_closure(&st, DegreeBound::new(1, 1, 30)).unwrap();
        for k in [3i64, 5, 7] {
            let mut twisted = Structure::new(st.dim, st.field.clone());
            for (name, t) in &st.tensors {
                let entries = t
                    .entries()
                    .iter()
                    .map(|e| galois_apply(k, e).unwrap())
                    .collect();
                twisted.push(name, Tensor::from_entries(t.ttype(), t.dim(), t.field(), entries));
            }
            let tw = compute_closure(&twisted, DegreeBound::new(1, 1, 30)).unwrap();
            assert_eq!(base.dim(0, 0), tw.dim(0, 0));
            for b in base.x00_scalars() {
                let image = galois_apply(k, &b).unwrap();
                let mut t = Tensor::zeros(TensorType::new(0, 0), st.dim, &st.field);
                t.set(&[], &[], image);
                assert!(tw.contains(&t).unwrap());
            }
        }
    }
}
