//! Finite groups as explicit multiplication tables, plus 2-cocycles on them.
//! No presentation theory here: callers of the nonabelian paths supply their
//! own relator words.

use crate::error::{CoreError, Result};
use crate::scalars::{Scalar, ScalarField};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    order: usize,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    decomposition: Option<Vec<(usize, usize)>>,
}

impl GroupTable {
    /// Validates the table axioms and, when a cyclic decomposition is
    /// claimed, that the listed generators have the stated orders, that the
    /// orders multiply to the group order, and that they generate.
    pub fn new(
        table: Vec<Vec<usize>>,
        decomposition: Option<Vec<(usize, usize)>>,
    ) -> Result<GroupTable> {
        let n = table.len();
        if n == 0 {
            return Err(CoreError::ParamInvalid("empty group table".into()));
        }
        for row in &table {
            if row.len() != n || row.iter().any(|&e| e >= n) {
                return Err(CoreError::ParamInvalid(
                    "group table is not a square array of element indices".into(),
                ));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| CoreError::ParamInvalid("group table has no identity".into()))?;
        let mut inverse = vec![0usize; n];
        for x in 0..n {
            inverse[x] = (0..n)
                .find(|&y| table[x][y] == identity && table[y][x] == identity)
                .ok_or_else(|| {
                    CoreError::ParamInvalid(format!("element {x} has no two-sided inverse"))
                })?;
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if table[table[x][y]][z] != table[x][table[y][z]] {
                        return Err(CoreError::ParamInvalid(format!(
                            "group table is not associative at ({x}, {y}, {z})"
                        )));
                    }
                }
            }
        }
        let g = GroupTable {
            order: n,
            table,
            identity,
            inverse,
            decomposition: None,
        };
        if let Some(dec) = &decomposition {
            let mut product = 1usize;
            for &(gen, ord) in dec {
                if gen >= n {
                    return Err(CoreError::ParamInvalid(format!(
                        "decomposition generator {gen} is out of range"
                    )));
                }
                if g.element_order(gen) != ord {
                    return Err(CoreError::ParamInvalid(format!(
                        "decomposition claims order {ord} for element {gen}, actual {}",
                        g.element_order(gen)
                    )));
                }
                product = product.saturating_mul(ord);
            }
            if product != n {
                return Err(CoreError::ParamInvalid(format!(
                    "decomposition orders multiply to {product}, group order is {n}"
                )));
            }
            // close the generator set under multiplication
            let mut seen = vec![false; n];
            seen[identity] = true;
            let mut frontier = vec![identity];
            while let Some(x) = frontier.pop() {
                for &(gen, _) in dec {
                    let y = g.table[x][gen];
                    if !seen[y] {
                        seen[y] = true;
                        frontier.push(y);
                    }
                }
            }
            if seen.iter().any(|s| !s) {
                return Err(CoreError::ParamInvalid(
                    "decomposition generators do not generate the group".into(),
                ));
            }
        }
        Ok(GroupTable {
            decomposition,
            ..g
        })
    }

    pub fn cyclic(n: usize) -> GroupTable {
        let table: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        let dec = if n == 1 { vec![(0, 1)] } else { vec![(1, n)] };
        GroupTable::new(table, Some(dec)).expect("cyclic tables are valid")
    }

    /// Direct product of cyclic groups, elements in mixed-radix order, with
    /// the standard generators recorded as the decomposition.
    pub fn product_of_cyclics(orders: &[usize]) -> GroupTable {
        assert!(!orders.is_empty() && orders.iter().all(|&n| n >= 1));
        let total: usize = orders.iter().product();
        let encode = |digits: &[usize]| {
            let mut idx = 0;
            for (d, &n) in digits.iter().zip(orders) {
                idx = idx * n + d % n;
            }
            idx
        };
        let decode = |mut idx: usize| {
            let mut digits = vec![0usize; orders.len()];
            for (slot, &n) in digits.iter_mut().zip(orders).rev() {
                *slot = idx % n;
                idx /= n;
            }
            digits
        };
        let mut table = vec![vec![0usize; total]; total];
        for (x, row) in table.iter_mut().enumerate() {
            let dx = decode(x);
            for (y, slot) in row.iter_mut().enumerate() {
                let dy = decode(y);
                let sum: Vec<usize> = dx.iter().zip(&dy).zip(orders).map(|((a, b), &n)| (a + b) % n).collect();
                *slot = encode(&sum);
            }
        }
        let mut dec = Vec::new();
        for (i, &n) in orders.iter().enumerate() {
            if n > 1 {
                let mut digits = vec![0usize; orders.len()];
                digits[i] = 1;
                dec.push((encode(&digits), n));
            }
        }
        if dec.is_empty() {
            dec.push((0, 1));
        }
        GroupTable::new(table, Some(dec)).expect("product tables are valid")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn op(&self, x: usize, y: usize) -> usize {
        self.table[x][y]
    }

    pub fn inv(&self, x: usize) -> usize {
        self.inverse[x]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn decomposition(&self) -> Option<&[(usize, usize)]> {
        self.decomposition.as_deref()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|x| (x..self.order).all(|y| self.table[x][y] == self.table[y][x]))
    }

    pub fn element_order(&self, x: usize) -> usize {
        let mut acc = x;
        let mut k = 1;
        while acc != self.identity {
            acc = self.table[acc][x];
            k += 1;
        }
        k
    }

    pub fn commutator(&self, g: usize, h: usize) -> usize {
        let gh = self.op(g, h);
        self.op(self.op(gh, self.inv(g)), self.inv(h))
    }
}

/// A 2-cochain with nonzero entries; whether it is a cocycle is decided by
/// check_cocycle, not by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Cocycle2 {
    entries: Vec<Vec<Scalar>>,
    field: ScalarField,
}

impl Cocycle2 {
    pub fn new(entries: Vec<Vec<Scalar>>) -> Result<Cocycle2> {
        let n = entries.len();
        if n == 0 || entries.iter().any(|row| row.len() != n) {
            return Err(CoreError::ParamInvalid(
                "cocycle entries must form a square array".into(),
            ));
        }
        let field = entries[0][0].field();
        for row in &entries {
            for e in row {
                if e.field() != field {
                    return Err(CoreError::ParamInvalid(
                        "cocycle entries mix scalar fields".into(),
                    ));
                }
                if e.is_zero() {
                    return Err(CoreError::ParamInvalid(
                        "cocycle entries must be nonzero".into(),
                    ));
                }
            }
        }
        Ok(Cocycle2 { entries, field })
    }

    pub fn trivial(n: usize, field: &ScalarField) -> Cocycle2 {
        Cocycle2::new(vec![vec![Scalar::one(field); n]; n]).unwrap()
    }

    /// alpha(g^i h^j, g^k h^l) = zeta^{jk} on C_n x C_n, elements indexed
    /// a*n + b for g^a h^b. zeta is the designated primitive n-th root in
    /// the given field.
    pub fn zeta_jk(n: usize, field: &ScalarField) -> Result<Cocycle2> {
        let zeta = designated_root(n, field)?;
        let dim = n * n;
        let mut entries = vec![vec![Scalar::one(field); dim]; dim];
        for (x, row) in entries.iter_mut().enumerate() {
            let j = x % n;
            for (y, slot) in row.iter_mut().enumerate() {
                let k = y / n;
                *slot = zeta.pow((j * k) as i64)?;
            }
        }
        Cocycle2::new(entries)
    }

    pub fn order(&self) -> usize {
        self.entries.len()
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn get(&self, x: usize, y: usize) -> &Scalar {
        &self.entries[x][y]
    }

    pub fn set(&mut self, x: usize, y: usize, v: Scalar) {
        assert!(!v.is_zero(), "cocycle entries must be nonzero");
        self.entries[x][y] = v;
    }
}

/// The primitive n-th root of unity z^(order/n) in a cyclotomic field, or
/// -1 and 1 over the rationals for n = 2 and n = 1.
pub fn designated_root(n: usize, field: &ScalarField) -> Result<Scalar> {
    match field {
        ScalarField::Rational if n == 1 => Ok(Scalar::one(field)),
        ScalarField::Rational if n == 2 => Ok(Scalar::from_integer(-1, field)),
        ScalarField::Cyclotomic { order } if order % n == 0 => {
            Scalar::zeta(*order).pow((order / n) as i64)
        }
        _ => Err(CoreError::ParamInvalid(format!(
            "field {field} has no designated primitive {n}-th root of unity"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CocycleCheck {
    pub holds: bool,
    pub violation: Option<(usize, usize, usize)>,
}

/// Tests alpha(x,y) alpha(xy,z) = alpha(y,z) alpha(x,yz) on all triples,
/// reporting the lexicographically first violation.
pub fn check_cocycle(g: &GroupTable, alpha: &Cocycle2) -> CocycleCheck {
    assert_eq!(g.order(), alpha.order(), "cocycle size differs from group order");
    let n = g.order();
    for x in 0..n {
        for y in 0..n {
            let xy = g.op(x, y);
            let a_xy = alpha.get(x, y);
            for z in 0..n {
                let lhs = a_xy.mul(alpha.get(xy, z)).expect("one field");
                let rhs = alpha
                    .get(y, z)
                    .mul(alpha.get(x, g.op(y, z)))
                    .expect("one field");
                if lhs != rhs {
                    return CocycleCheck {
                        holds: false,
                        violation: Some((x, y, z)),
                    };
                }
            }
        }
    }
    CocycleCheck {
        holds: true,
        violation: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{all_permutations, compose};

    fn s3() -> GroupTable {
        let elems = all_permutations(3);
        let idx = |p: &[usize]| elems.iter().position(|q| q == p).unwrap();
        let table: Vec<Vec<usize>> = elems
            .iter()
            .map(|a| elems.iter().map(|b| idx(&compose(a, b))).collect())
            .collect();
        GroupTable::new(table, None).unwrap()
    }

    #[test]
    fn cyclic_product_tables_are_valid_groups() {
        for orders in [vec![4], vec![2, 2], vec![3, 3], vec![2, 3]] {
            let g = GroupTable::product_of_cyclics(&orders);
            assert_eq!(g.order(), orders.iter().product::<usize>());
            assert!(g.is_abelian());
            assert_eq!(g.op(g.identity(), 1), 1);
            for x in 0..g.order() {
                assert_eq!(g.op(x, g.inv(x)), g.identity());
            }
        }
        // C_3 x C_3 with the a*n+b indexing: g = (1,0) at index 3, h = (0,1) at 1
        let g = GroupTable::product_of_cyclics(&[3, 3]);
        assert_eq!(g.decomposition().unwrap(), &[(3, 3), (1, 3)]);
        assert_eq!(g.op(3, 1), 4);
    }

    #[test]
    fn symmetric_group_is_nonabelian_with_nontrivial_commutators() {
        let g = s3();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        assert!((0..6).any(|x| (0..6).any(|y| g.commutator(x, y) != g.identity())));
    }

    #[test]
    fn bad_tables_are_rejected() {
        // has an identity but no group structure behind it
        let t = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 1, 0]];
        assert!(matches!(
            GroupTable::new(t, None),
            Err(CoreError::ParamInvalid(_))
        ));
        let no_id = vec![vec![0, 0], vec![0, 0]];
        let err = GroupTable::new(no_id, None).unwrap_err();
        assert!(err.to_string().contains("identity"));
    }

    #[test]
    fn decomposition_claims_are_verified() {
        let table: Vec<Vec<usize>> = (0..4).map(|i| (0..4).map(|j| (i + j) % 4).collect()).collect();
        assert!(GroupTable::new(table.clone(), Some(vec![(1, 4)])).is_ok());
        let err = GroupTable::new(table.clone(), Some(vec![(1, 2)])).unwrap_err();
        assert!(err.to_string().contains("order"));
        let err = GroupTable::new(table.clone(), Some(vec![(2, 2)])).unwrap_err();
        assert!(err.to_string().contains("multiply"));
        // <2> has order 2 and index 2: orders can multiply to 4 while failing to generate
        let err = GroupTable::new(table, Some(vec![(2, 2), (0, 2)])).unwrap_err();
        assert!(err.to_string().contains("order 2 for element 0") || err.to_string().contains("generate"));
    }

    #[test]
    fn trivial_cocycle_passes_and_perturbations_fail_with_a_witness() {
        let f = ScalarField::Rational;
        let g = GroupTable::product_of_cyclics(&[2, 2]);
        let a = Cocycle2::trivial(4, &f);
        assert_eq!(
            check_cocycle(&g, &a),
            CocycleCheck {
                holds: true,
                violation: None
            }
        );
        let mut bad = a.clone();
        bad.set(1, 2, Scalar::from_integer(2, &f));
        let check = check_cocycle(&g, &bad);
        assert!(!check.holds);
        let (x, y, z) = check.violation.unwrap();
        // confirm the reported triple really violates the identity
        let lhs = bad.get(x, y).mul(bad.get(g.op(x, y), z)).unwrap();
        let rhs = bad.get(y, z).mul(bad.get(x, g.op(y, z))).unwrap();
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn zeta_jk_is_a_cocycle_on_cncn() {
        for n in [2usize, 3, 4] {
            let f = ScalarField::Cyclotomic { order: n };
            let g = GroupTable::product_of_cyclics(&[n, n]);
            let a = Cocycle2::zeta_jk(n, &f).unwrap();
            assert!(check_cocycle(&g, &a).holds);
        }
        // constant nontrivial cocycles are valid too
        let f = ScalarField::Rational;
        let g = GroupTable::cyclic(2);
        let two = Scalar::from_integer(2, &f);
        let a = Cocycle2::new(vec![vec![two.clone(), two.clone()], vec![two.clone(), two]]).unwrap();
        assert!(check_cocycle(&g, &a).holds);
    }

    #[test]
    fn designated_roots_are_primitive() {
        let f8 = ScalarField::Cyclotomic { order: 8 };
        let r = designated_root(4, &f8).unwrap();
        assert!(r.pow(2).unwrap() != Scalar::one(&f8));
        assert_eq!(r.pow(4).unwrap(), Scalar::one(&f8));
        assert!(designated_root(3, &f8).is_err());
        assert_eq!(
            designated_root(2, &ScalarField::Rational).unwrap(),
            Scalar::from_integer(-1, &ScalarField::Rational)
        );
    }
}
