//! Builders for the shipped fixture structures. The fixtures test pins the
//! on-disk bytes to emit() of these; the acceptance suite reuses them.
// each integration target compiles this module separately, so not every
// builder is live in every target
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use forge_core::scalars::{parse_scalar, Scalar, ScalarField};
use forge_core::structures::{
    build_taft, build_twisted_group_algebra, Cocycle2, GroupTable, TaftParams,
};
use forge_core::tensors::{Structure, Tensor, TensorType};

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn s(field: &ScalarField, lit: &str) -> Scalar {
    parse_scalar(lit, field).unwrap()
}

/// dim 3 over QQ(t): basis x, y, z with x^2 = y^2 = xy = z, yx = t z,
/// all products with z vanishing.
pub fn deformed_pairing_structure() -> Structure {
    let f = ScalarField::RationalFunction;
    let one = Scalar::one(&f);
    let mut m = Tensor::zeros(TensorType::new(1, 2), 3, &f);
    m.set(&[2], &[0, 0], one.clone());
    m.set(&[2], &[1, 1], one.clone());
    m.set(&[2], &[0, 1], one);
    m.set(&[2], &[1, 0], s(&f, "t"));
    let mut st = Structure::new(3, f);
    st.push("m", m);
    st
}

/// dim 4 over QQ(zeta_8) with sqrt2 = z - z^3: the operator
/// diag(sqrt2, sqrt2, -sqrt2, -sqrt2) plus a nilpotent unit in row 2.
pub fn sqrt2_jordan_structure() -> Structure {
    let f = ScalarField::Cyclotomic { order: 8 };
    let r2 = s(&f, "z - z^3");
    let mut t = Tensor::zeros(TensorType::new(1, 1), 4, &f);
    t.set(&[0], &[0], r2.clone());
    t.set(&[1], &[1], r2.clone());
    t.set(&[2], &[2], r2.neg());
    t.set(&[2], &[3], Scalar::one(&f));
    t.set(&[3], &[3], r2.neg());
    let mut st = Structure::new(4, f);
    st.push("T", t);
    st
}

/// Full n x n matrix algebra over QQ with its unit, basis e_{rc} at r*n + c.
pub fn matrix_algebra(n: usize) -> Structure {
    let f = ScalarField::Rational;
    let one = Scalar::one(&f);
    let idx = |r: usize, c: usize| r * n + c;
    let mut m = Tensor::zeros(TensorType::new(1, 2), n * n, &f);
    for a in 0..n {
        for b in 0..n {
            for d in 0..n {
                m.set(&[idx(a, d)], &[idx(a, b), idx(b, d)], one.clone());
            }
        }
    }
    let mut unit = Tensor::zeros(TensorType::new(1, 0), n * n, &f);
    for a in 0..n {
        unit.set(&[idx(a, a)], &[], one.clone());
    }
    let mut st = Structure::new(n * n, f);
    st.push("m", m);
    st.push("unit", unit);
    st
}

pub fn empty2_structure() -> Structure {
    Structure::new(2, ScalarField::Rational)
}

/// dim 2 over QQ(zeta_8): the operator diag(zeta_8, 0).
pub fn diag_zeta8_structure() -> Structure {
    let f = ScalarField::Cyclotomic { order: 8 };
    let mut t = Tensor::zeros(TensorType::new(1, 1), 2, &f);
    t.set(&[0], &[0], s(&f, "z"));
    let mut st = Structure::new(2, f);
    st.push("T", t);
    st
}

pub fn twisted_cncn(n: usize, field: &ScalarField) -> Structure {
    let group = GroupTable::product_of_cyclics(&[n, n]);
    let cocycle = Cocycle2::zeta_jk(n, field).unwrap();
    build_twisted_group_algebra(group, cocycle).unwrap().structure
}

pub fn twisted_c3c3_structure() -> Structure {
    twisted_cncn(3, &ScalarField::Cyclotomic { order: 3 })
}

pub fn twisted_c2c2_structure() -> Structure {
    twisted_cncn(2, &ScalarField::Rational)
}

pub fn taft_sweedler_structure() -> Structure {
    let f = ScalarField::Cyclotomic { order: 2 };
    let params = TaftParams {
        n: 2,
        a: Scalar::one(&f),
        b: Scalar::zero(&f),
    };
    build_taft(&params).unwrap().structure
}

pub fn shipped_structures() -> Vec<(&'static str, Structure)> {
    vec![
        ("deformed-pairing.json", deformed_pairing_structure()),
        ("sqrt2-jordan.json", sqrt2_jordan_structure()),
        ("m2.json", matrix_algebra(2)),
        ("m3.json", matrix_algebra(3)),
        ("empty2.json", empty2_structure()),
        ("diag-zeta8.json", diag_zeta8_structure()),
        ("twisted-c3c3.json", twisted_c3c3_structure()),
        ("twisted-c2c2.json", twisted_c2c2_structure()),
        ("taft-sweedler-structure.json", taft_sweedler_structure()),
    ]
}
