//! Presented subspaces and quotients of tensor spaces, maps between them,
//! and an expression language tying it together (compose, kernel, image,
//! induced maps, Gram currying, inversion, trace).
//!
//! A PresentedSpace is S/R for two spanning sets of ambient tensors with
//! R inside span(S). The cached data is canonical: R is kept as a reduced
//! echelon basis and the quotient basis is picked greedily from span_S in
//! order, so identical inputs always present identically.

use crate::error::{CoreError, Result};
use crate::linalg::{FieldEchelon, Mat};
use crate::scalars::{parse_scalar, Scalar, ScalarField};
use crate::tensors::{
    as_default_map, contract, permute, tensor_product, Structure, Tensor, TensorType,
};

#[derive(Clone, Debug)]
pub struct PresentedSpace {
    ambient: TensorType,
    wdim: usize,
    field: ScalarField,
    span_s: Vec<Tensor>,
    span_r: Vec<Tensor>,
    r_ech: FieldEchelon,
    q_reps: Vec<Tensor>,
    /// Columns: echelon basis of R, then the flattened q_reps. Solving
    /// against it yields presentation coordinates.
    solve_mat: Mat,
    square_of: Option<Box<PresentedSpace>>,
}

fn flat(t: &Tensor) -> Vec<Scalar> {
    t.entries().to_vec()
}

impl PresentedSpace {
    pub fn new(
        ambient: TensorType,
        wdim: usize,
        field: &ScalarField,
        span_s: Vec<Tensor>,
        span_r: Vec<Tensor>,
    ) -> Result<PresentedSpace> {
        let width = wdim.pow(ambient.slots() as u32);
        for t in span_s.iter().chain(&span_r) {
            if t.ttype() != ambient || t.dim() != wdim {
                return Err(CoreError::TypeError(format!(
                    "presentation vector of type ({},{}) does not live in the ({},{}) ambient",
                    t.ttype().p,
                    t.ttype().q,
                    ambient.p,
                    ambient.q
                )));
            }
            if t.field() != field {
                return Err(CoreError::FieldMismatch(
                    t.field().to_string(),
                    field.to_string(),
                ));
            }
        }
        let mut s_ech = FieldEchelon::new(field, width);
        for t in &span_s {
            s_ech.insert(&flat(t));
        }
        let mut r_ech = FieldEchelon::new(field, width);
        for r in &span_r {
            if !s_ech.contains(&flat(r)) {
                return Err(CoreError::TypeError(
                    "relation vector lies outside the spanning set".to_string(),
                ));
            }
            r_ech.insert(&flat(r));
        }
        let mut work = r_ech.clone();
        let mut q_reps = Vec::new();
        for t in &span_s {
            if work.insert(&flat(t)) {
                q_reps.push(t.clone());
            }
        }
        let cols = r_ech.dim() + q_reps.len();
        let mut solve_mat = Mat::zeros(field, width, cols);
        for (j, row) in r_ech.rows().iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                solve_mat.set(i, j, v.clone());
            }
        }
        for (j, t) in q_reps.iter().enumerate() {
            for (i, v) in flat(t).into_iter().enumerate() {
                solve_mat.set(i, r_ech.dim() + j, v);
            }
        }
        Ok(PresentedSpace {
            ambient,
            wdim,
            field: field.clone(),
            span_s,
            span_r,
            r_ech,
            q_reps,
            solve_mat,
            square_of: None,
        })
    }

    /// The whole ambient space W^{p,q}.
    pub fn full(ambient: TensorType, wdim: usize, field: &ScalarField) -> PresentedSpace {
        let width = wdim.pow(ambient.slots() as u32);
        let mut span = Vec::with_capacity(width);
        for i in 0..width {
            let mut entries = vec![Scalar::zero(field); width];
            entries[i] = Scalar::one(field);
            span.push(Tensor::from_entries(ambient, wdim, field, entries));
        }
        PresentedSpace::new(ambient, wdim, field, span, Vec::new())
            .expect("full presentation is well formed")
    }

    pub fn from_span(
        ambient: TensorType,
        wdim: usize,
        field: &ScalarField,
        span: Vec<Tensor>,
    ) -> Result<PresentedSpace> {
        PresentedSpace::new(ambient, wdim, field, span, Vec::new())
    }

    pub fn ambient(&self) -> TensorType {
        self.ambient
    }

    pub fn wdim(&self) -> usize {
        self.wdim
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.q_reps.len()
    }

    pub fn q_reps(&self) -> &[Tensor] {
        &self.q_reps
    }

    pub fn span_s(&self) -> &[Tensor] {
        &self.span_s
    }

    pub fn span_r(&self) -> &[Tensor] {
        &self.span_r
    }

    pub fn square_of(&self) -> Option<&PresentedSpace> {
        self.square_of.as_deref()
    }

    fn is_full(&self) -> bool {
        let width = self.wdim.pow(self.ambient.slots() as u32);
        if self.r_ech.dim() != 0 || self.q_reps.len() != width {
            return false;
        }
        self.q_reps.iter().enumerate().all(|(i, t)| {
            t.entries()
                .iter()
                .enumerate()
                .all(|(j, v)| if j == i { v.is_one() } else { v.is_zero() })
        })
    }

    fn coords_flat(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        self.solve_mat
            .solve(v)
            .map(|x| x[self.r_ech.dim()..].to_vec())
    }

    /// Coordinates of an ambient tensor on the quotient basis, or None when
    /// it lies outside span(S).
    pub fn coords(&self, t: &Tensor) -> Result<Option<Vec<Scalar>>> {
        if t.ttype() != self.ambient || t.dim() != self.wdim {
            return Err(CoreError::TypeError(
                "coordinate lookup for a tensor of the wrong ambient type".to_string(),
            ));
        }
        Ok(self.coords_flat(&flat(t)))
    }

    pub fn contains(&self, t: &Tensor) -> Result<bool> {
        Ok(self.coords(t)?.is_some())
    }

    /// S/R tensored with itself: spanned by pairwise products with the
    /// quotient representatives first (i-major), so the cached quotient basis
    /// is exactly q_i (x) q_j.
    pub fn tensor_square(&self) -> Result<PresentedSpace> {
        let sq_type = TensorType::new(2 * self.ambient.p, 2 * self.ambient.q);
        let mut span = Vec::new();
        for qi in &self.q_reps {
            for qj in &self.q_reps {
                span.push(tensor_product(qi, qj)?);
            }
        }
        let mut rels = Vec::new();
        let gens: Vec<&Tensor> = self.q_reps.iter().chain(&self.span_r).collect();
        for b in &gens {
            for r in &self.span_r {
                rels.push(tensor_product(b, r)?);
                rels.push(tensor_product(r, b)?);
            }
        }
        span.extend(rels.iter().cloned());
        let mut sq = PresentedSpace::new(sq_type, self.wdim, &self.field, span, rels)?;
        sq.square_of = Some(Box::new(self.clone()));
        Ok(sq)
    }

    /// space/(sub): same ambient, relations grown by sub's spanning set.
    pub fn quotient(space: &PresentedSpace, sub: &PresentedSpace) -> Result<PresentedSpace> {
        if space.ambient != sub.ambient || space.wdim != sub.wdim {
            return Err(CoreError::TypeError(
                "quotient of spaces with different ambient types".to_string(),
            ));
        }
        let mut rels = space.span_r.clone();
        rels.extend(sub.span_s.iter().cloned());
        PresentedSpace::new(
            space.ambient,
            space.wdim,
            &space.field,
            space.span_s.clone(),
            rels,
        )
        .map_err(|e| match e {
            CoreError::TypeError(_) => CoreError::TypeError(
                "quotient subspace is not contained in the space".to_string(),
            ),
            other => other,
        })
    }
}

#[derive(Clone, Debug)]
pub struct PresentedMap {
    dom: PresentedSpace,
    cod: PresentedSpace,
    /// cod.dim() x dom.dim() on the cached quotient bases.
    matrix: Mat,
}

impl PresentedMap {
    pub fn new(dom: PresentedSpace, cod: PresentedSpace, matrix: Mat) -> PresentedMap {
        assert_eq!(matrix.nrows(), cod.dim(), "matrix rows must match codomain");
        assert_eq!(matrix.ncols(), dom.dim(), "matrix cols must match domain");
        PresentedMap { dom, cod, matrix }
    }

    pub fn dom(&self) -> &PresentedSpace {
        &self.dom
    }

    pub fn cod(&self) -> &PresentedSpace {
        &self.cod
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn det(&self) -> Result<Scalar> {
        if self.matrix.nrows() != self.matrix.ncols() {
            return Err(CoreError::TypeError(
                "determinant of a non-square map".to_string(),
            ));
        }
        Ok(self.matrix.det())
    }

    pub fn trace(&self) -> Result<Scalar> {
        if !same_presentation(&self.dom, &self.cod) {
            return Err(CoreError::TypeError(
                "trace needs an endomorphism (domain and codomain presented identically)"
                    .to_string(),
            ));
        }
        let mut acc = Scalar::zero(&self.dom.field);
        for i in 0..self.matrix.nrows() {
            acc = acc.add(self.matrix.get(i, i))?;
        }
        Ok(acc)
    }
}

fn same_presentation(a: &PresentedSpace, b: &PresentedSpace) -> bool {
    a.ambient == b.ambient
        && a.wdim == b.wdim
        && a.dim() == b.dim()
        && a.q_reps
            .iter()
            .zip(&b.q_reps)
            .all(|(x, y)| x.entries() == y.entries())
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum KernelOrImage {
    Kernel,
    Image,
}

pub fn kernel_image(f: &PresentedMap, which: KernelOrImage) -> Result<PresentedSpace> {
    match which {
        KernelOrImage::Kernel => {
            let ns = f.matrix.nullspace();
            let mut span = Vec::new();
            for v in ns {
                span.push(lift(&f.dom, &v)?);
            }
            span.extend(f.dom.span_r.iter().cloned());
            PresentedSpace::new(
                f.dom.ambient,
                f.dom.wdim,
                &f.dom.field,
                span,
                f.dom.span_r.clone(),
            )
        }
        KernelOrImage::Image => {
            let mut span = Vec::new();
            for j in 0..f.matrix.ncols() {
                span.push(lift(&f.cod, &f.matrix.col(j))?);
            }
            span.extend(f.cod.span_r.iter().cloned());
            PresentedSpace::new(
                f.cod.ambient,
                f.cod.wdim,
                &f.cod.field,
                span,
                f.cod.span_r.clone(),
            )
        }
    }
}

/// Rebuild the ambient tensor sum(c_i * q_rep_i).
fn lift(space: &PresentedSpace, coords: &[Scalar]) -> Result<Tensor> {
    let mut acc = Tensor::zeros(space.ambient, space.wdim, &space.field);
    for (c, rep) in coords.iter().zip(&space.q_reps) {
        if c.is_zero() {
            continue;
        }
        acc = acc.add(&rep.scale(c)?)?;
    }
    Ok(acc)
}

fn render_flat(v: &[Scalar]) -> String {
    let parts: Vec<String> = v.iter().map(|s| s.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

/// Restrict an ambient-coordinate map to presentations. The ambient map must
/// send span(S_dom) into span(S_cod) and span(R_dom) into span(R_cod).
pub fn induced_map(
    ambient_mat: &Mat,
    from: TensorType,
    to: TensorType,
    dom: &PresentedSpace,
    cod: &PresentedSpace,
) -> Result<PresentedMap> {
    if dom.ambient != from || cod.ambient != to || dom.wdim != cod.wdim {
        return Err(CoreError::TypeError(format!(
            "ambient map W^({},{}) -> W^({},{}) does not match the presentations",
            from.p, from.q, to.p, to.q
        )));
    }
    for s in &dom.span_s {
        let w = ambient_mat.matvec(&flat(s));
        if cod.coords_flat(&w).is_none() {
            return Err(CoreError::NotWellDefined {
                witness: format!(
                    "image {} of a spanning vector lies outside the target presentation",
                    render_flat(&w)
                ),
            });
        }
    }
    for r in &dom.span_r {
        let w = ambient_mat.matvec(&flat(r));
        if !cod.r_ech.contains(&w) {
            return Err(CoreError::NotWellDefined {
                witness: format!(
                    "image {} of a relation vector is not a target relation",
                    render_flat(&w)
                ),
            });
        }
    }
    let mut matrix = Mat::zeros(&dom.field, cod.dim(), dom.dim());
    for (j, q) in dom.q_reps.iter().enumerate() {
        let w = ambient_mat.matvec(&flat(q));
        let c = cod.coords_flat(&w).expect("checked above");
        for (i, v) in c.into_iter().enumerate() {
            matrix.set(i, j, v);
        }
    }
    Ok(PresentedMap::new(dom.clone(), cod.clone(), matrix))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GramSide {
    Left,
    Right,
}

/// Curry a pairing Q (x) Q -> line into an endomorphism matrix of Q:
/// beta[i][j] = coefficient of the line basis vector in f(q_i (x) q_j);
/// left is beta, right its transpose.
pub fn gram(f: &PresentedMap, side: GramSide) -> Result<PresentedMap> {
    if f.cod.dim() != 1 {
        return Err(CoreError::TargetNotLine { dim: f.cod.dim() });
    }
    let Some(q) = f.dom.square_of() else {
        return Err(CoreError::TypeError(
            "gram needs a domain recorded as a tensor square".to_string(),
        ));
    };
    let dq = q.dim();
    debug_assert_eq!(f.matrix.ncols(), dq * dq);
    let beta = Mat::from_fn(&f.dom.field, dq, dq, |i, j| {
        f.matrix.get(0, i * dq + j).clone()
    });
    let m = match side {
        GramSide::Left => beta,
        GramSide::Right => beta.transpose(),
    };
    Ok(PresentedMap::new(q.clone(), q.clone(), m))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expression {
    TensorRef(String),
    Identity,
    Compose(Box<Expression>, Box<Expression>),
    Add(Box<Expression>, Box<Expression>),
    /// Scalar literal (parsed in the structure's field at evaluation time).
    ScalarMul(String, Box<Expression>),
    TensorProd(Box<Expression>, Box<Expression>),
    Contract(Box<Expression>, usize, usize),
    Permute(Box<Expression>, Vec<usize>, Vec<usize>),
    Kernel(Box<Expression>),
    Image(Box<Expression>),
    Quotient(Box<Expression>, Box<Expression>),
    InducedMap(Box<Expression>, Box<Expression>, Box<Expression>),
    /// One argument: an induced pairing whose domain is a recorded square.
    /// Three arguments: (pairing tensor, line subspace, quotient space); the
    /// square and induction are performed internally.
    GramLeft(Box<Expression>, Option<Box<(Expression, Expression)>>),
    GramRight(Box<Expression>, Option<Box<(Expression, Expression)>>),
    Invert(Box<Expression>),
    Trace(Box<Expression>),
    Full(usize, usize),
    Square(Box<Expression>),
}

#[derive(Clone, Debug)]
pub enum Value {
    Tensor(Tensor),
    Map(PresentedMap),
    Space(PresentedSpace),
    Scalar(Scalar),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Tensor(_) => "tensor",
            Value::Map(_) => "map",
            Value::Space(_) => "space",
            Value::Scalar(_) => "scalar",
        }
    }
}

/// Named values produced by earlier bindings of a job.
#[derive(Clone, Debug, Default)]
pub struct Env {
    bindings: Vec<(String, Value)>,
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn push(&mut self, name: &str, v: Value) {
        self.bindings.push((name.to_string(), v));
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
    }
}

fn tensor_as_map(t: &Tensor) -> Result<PresentedMap> {
    let from = TensorType::new(t.ttype().q, 0);
    let to = TensorType::new(t.ttype().p, 0);
    let dom = PresentedSpace::full(from, t.dim(), t.field());
    let cod = PresentedSpace::full(to, t.dim(), t.field());
    Ok(PresentedMap::new(dom, cod, as_default_map(t)?))
}

fn as_map(v: Value) -> Result<PresentedMap> {
    match v {
        Value::Map(m) => Ok(m),
        Value::Tensor(t) => tensor_as_map(&t),
        other => Err(CoreError::TypeError(format!(
            "expected a map, found a {}",
            other.kind()
        ))),
    }
}

fn as_space(v: Value) -> Result<PresentedSpace> {
    match v {
        Value::Space(s) => Ok(s),
        other => Err(CoreError::TypeError(format!(
            "expected a space, found a {}",
            other.kind()
        ))),
    }
}

fn as_tensor(v: Value) -> Result<Tensor> {
    match v {
        Value::Tensor(t) => Ok(t),
        other => Err(CoreError::TypeError(format!(
            "expected a tensor, found a {}",
            other.kind()
        ))),
    }
}

/// The matrix of a value acting on full ambient coordinate spaces.
fn as_ambient_map(v: Value) -> Result<(Mat, TensorType, TensorType)> {
    match v {
        Value::Tensor(t) => {
            let from = TensorType::new(t.ttype().q, 0);
            let to = TensorType::new(t.ttype().p, 0);
            Ok((as_default_map(&t)?, from, to))
        }
        Value::Map(m) => {
            if m.dom.is_full() && m.cod.is_full() {
                let (from, to) = (m.dom.ambient, m.cod.ambient);
                Ok((m.matrix, from, to))
            } else {
                Err(CoreError::TypeError(
                    "induce needs an ambient map (a tensor or a map between full spaces)"
                        .to_string(),
                ))
            }
        }
        other => Err(CoreError::TypeError(format!(
            "expected an ambient map, found a {}",
            other.kind()
        ))),
    }
}

fn compose_maps(f: &PresentedMap, g: &PresentedMap) -> Result<PresentedMap> {
    if f.dom.ambient != g.cod.ambient || f.dom.wdim != g.cod.wdim {
        return Err(CoreError::TypeError(
            "composition: inner codomain and outer domain live in different ambients".to_string(),
        ));
    }
    // Bridge g's codomain basis into f's domain coordinates.
    let mut bridge = Mat::zeros(&f.dom.field, f.matrix.nrows(), g.cod.dim());
    for (j, rep) in g.cod.q_reps.iter().enumerate() {
        let c = f.dom.coords(rep)?.ok_or_else(|| {
            CoreError::TypeError(
                "composition: intermediate space is not contained in the outer domain"
                    .to_string(),
            )
        })?;
        let img = f.matrix.matvec(&c);
        for (i, v) in img.into_iter().enumerate() {
            bridge.set(i, j, v);
        }
    }
    Ok(PresentedMap::new(
        g.dom.clone(),
        f.cod.clone(),
        bridge.matmul(&g.matrix),
    ))
}

pub fn eval_expression(e: &Expression, st: &Structure, env: &Env) -> Result<Value> {
    match e {
        Expression::TensorRef(name) => {
            if let Some(v) = env.get(name) {
                return Ok(v.clone());
            }
            if let Some(t) = st.get(name) {
                return Ok(Value::Tensor(t.clone()));
            }
            Err(CoreError::TypeError(format!("unknown name '{name}'")))
        }
        Expression::Identity => Ok(Value::Tensor(Tensor::identity(st.dim, &st.field))),
        Expression::Compose(f, g) => {
            let f = as_map(eval_expression(f, st, env)?)?;
            let g = as_map(eval_expression(g, st, env)?)?;
            Ok(Value::Map(compose_maps(&f, &g)?))
        }
        Expression::Add(a, b) => {
            let a = eval_expression(a, st, env)?;
            let b = eval_expression(b, st, env)?;
            match (a, b) {
                (Value::Tensor(x), Value::Tensor(y)) => Ok(Value::Tensor(x.add(&y)?)),
                (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(x.add(&y)?)),
                (a, b) => {
                    let a = as_map(a)?;
                    let b = as_map(b)?;
                    if !same_presentation(&a.dom, &b.dom) || !same_presentation(&a.cod, &b.cod)
                    {
                        return Err(CoreError::TypeError(
                            "sum of maps with different presentations".to_string(),
                        ));
                    }
                    Ok(Value::Map(PresentedMap::new(
                        a.dom.clone(),
                        a.cod.clone(),
                        a.matrix.add(&b.matrix),
                    )))
                }
            }
        }
        Expression::ScalarMul(lit, e) => {
            let c = parse_scalar(lit, &st.field)?;
            match eval_expression(e, st, env)? {
                Value::Tensor(t) => Ok(Value::Tensor(t.scale(&c)?)),
                Value::Scalar(s) => Ok(Value::Scalar(s.mul(&c)?)),
                Value::Map(m) => Ok(Value::Map(PresentedMap::new(
                    m.dom.clone(),
                    m.cod.clone(),
                    m.matrix.scale(&c),
                ))),
                other => Err(CoreError::TypeError(format!(
                    "cannot scale a {}",
                    other.kind()
                ))),
            }
        }
        Expression::TensorProd(a, b) => {
            let a = as_tensor(eval_expression(a, st, env)?)?;
            let b = as_tensor(eval_expression(b, st, env)?)?;
            Ok(Value::Tensor(tensor_product(&a, &b)?))
        }
        Expression::Contract(e, up, down) => {
            let t = as_tensor(eval_expression(e, st, env)?)?;
            Ok(Value::Tensor(contract(&t, *up, *down)?))
        }
        Expression::Permute(e, sigma, tau) => {
            let t = as_tensor(eval_expression(e, st, env)?)?;
            Ok(Value::Tensor(permute(&t, sigma, tau)?))
        }
        Expression::Kernel(e) => {
            let f = as_map(eval_expression(e, st, env)?)?;
            Ok(Value::Space(kernel_image(&f, KernelOrImage::Kernel)?))
        }
        Expression::Image(e) => {
            let f = as_map(eval_expression(e, st, env)?)?;
            Ok(Value::Space(kernel_image(&f, KernelOrImage::Image)?))
        }
        Expression::Quotient(space, sub) => {
            let space = as_space(eval_expression(space, st, env)?)?;
            let sub = as_space(eval_expression(sub, st, env)?)?;
            Ok(Value::Space(PresentedSpace::quotient(&space, &sub)?))
        }
        Expression::InducedMap(f, dom, cod) => {
            let (mat, from, to) = as_ambient_map(eval_expression(f, st, env)?)?;
            let dom = as_space(eval_expression(dom, st, env)?)?;
            let cod = as_space(eval_expression(cod, st, env)?)?;
            Ok(Value::Map(induced_map(&mat, from, to, &dom, &cod)?))
        }
        Expression::GramLeft(e, rest) => eval_gram(e, rest, GramSide::Left, st, env),
        Expression::GramRight(e, rest) => eval_gram(e, rest, GramSide::Right, st, env),
        Expression::Invert(e) => {
            let f = as_map(eval_expression(e, st, env)?)?;
            if f.matrix.nrows() != f.matrix.ncols() {
                return Err(CoreError::TypeError(
                    "inversion of a non-square map".to_string(),
                ));
            }
            let inv = f.matrix.inverse()?;
            Ok(Value::Map(PresentedMap::new(
                f.cod.clone(),
                f.dom.clone(),
                inv,
            )))
        }
        Expression::Trace(e) => {
            let f = as_map(eval_expression(e, st, env)?)?;
            Ok(Value::Scalar(f.trace()?))
        }
        Expression::Full(p, q) => Ok(Value::Space(PresentedSpace::full(
            TensorType::new(*p, *q),
            st.dim,
            &st.field,
        ))),
        Expression::Square(e) => {
            let s = as_space(eval_expression(e, st, env)?)?;
            Ok(Value::Space(s.tensor_square()?))
        }
    }
}

fn eval_gram(
    e: &Expression,
    rest: &Option<Box<(Expression, Expression)>>,
    side: GramSide,
    st: &Structure,
    env: &Env,
) -> Result<Value> {
    let pairing = match rest {
        None => as_map(eval_expression(e, st, env)?)?,
        Some(pair) => {
            let (sub_e, quot_e) = pair.as_ref();
            let (mat, from, to) = as_ambient_map(eval_expression(e, st, env)?)?;
            let sub = as_space(eval_expression(sub_e, st, env)?)?;
            let quot = as_space(eval_expression(quot_e, st, env)?)?;
            let square = quot.tensor_square()?;
            induced_map(&mat, from, to, &square, &sub)?
        }
    };
    Ok(Value::Map(gram(&pairing, side)?))
}

// ---------------------------------------------------------------------------
// Textual expression syntax (function-call notation):
//   trace(e) kernel(e) image(e) invert(e) square(e) id full(p,q)
//   compose(e,e) add(e,e) tensor(e,e) quotient(e,e) induce(f,dom,cod)
//   contract(e,up,down) permute(e,[..],[..]) scale(lit,e)
//   gramL(e) gramR(e) gramL(e,sub,quot) gramR(e,sub,quot)
// Any other identifier is a reference to a structure tensor or a binding.
// ---------------------------------------------------------------------------

struct ExprParser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ExprParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && (self.bytes[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.bytes.get(self.pos).map(|&b| b as char)
    }

    fn eat(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(CoreError::ParseError(format!(
                "expected '{c}' at byte {} of expression",
                self.pos
            )))
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() {
            let c = self.bytes[self.pos] as char;
            if c.is_ascii_alphanumeric() || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos == start {
            None
        } else {
            Some(self.src[start..self.pos].to_string())
        }
    }

    fn integer(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(CoreError::ParseError(format!(
                "expected an integer at byte {start} of expression"
            )));
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| CoreError::ParseError("integer out of range".to_string()))
    }

    fn index_list(&mut self) -> Result<Vec<usize>> {
        self.eat('[')?;
        let mut out = Vec::new();
        if self.peek() == Some(']') {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(self.integer()?);
            match self.peek() {
                Some(',') => {
                    self.pos += 1;
                }
                Some(']') => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => {
                    return Err(CoreError::ParseError(
                        "expected ',' or ']' in an index list".to_string(),
                    ))
                }
            }
        }
    }

    /// Raw text up to the next top-level comma (used for scale literals,
    /// which have their own grammar including parentheses).
    fn raw_until_comma(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        let mut depth = 0usize;
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] as char {
                '(' | '[' => depth += 1,
                ')' | ']' => {
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                }
                ',' if depth == 0 => break,
                _ => {}
            }
            self.pos += 1;
        }
        let lit = self.src[start..self.pos].trim().to_string();
        if lit.is_empty() {
            return Err(CoreError::ParseError(
                "expected a scalar literal".to_string(),
            ));
        }
        Ok(lit)
    }

    fn expr(&mut self) -> Result<Expression> {
        let Some(name) = self.ident() else {
            return Err(CoreError::ParseError(format!(
                "expected a name at byte {} of expression",
                self.pos
            )));
        };
        if self.peek() != Some('(') {
            return match name.as_str() {
                "id" => Ok(Expression::Identity),
                _ => Ok(Expression::TensorRef(name)),
            };
        }
        self.eat('(')?;
        let node = match name.as_str() {
            "trace" => Expression::Trace(Box::new(self.expr()?)),
            "kernel" => Expression::Kernel(Box::new(self.expr()?)),
            "image" => Expression::Image(Box::new(self.expr()?)),
            "invert" => Expression::Invert(Box::new(self.expr()?)),
            "square" => Expression::Square(Box::new(self.expr()?)),
            "compose" => {
                let a = self.expr()?;
                self.eat(',')?;
                let b = self.expr()?;
                Expression::Compose(Box::new(a), Box::new(b))
            }
            "add" => {
                let a = self.expr()?;
                self.eat(',')?;
                let b = self.expr()?;
                Expression::Add(Box::new(a), Box::new(b))
            }
            "tensor" => {
                let a = self.expr()?;
                self.eat(',')?;
                let b = self.expr()?;
                Expression::TensorProd(Box::new(a), Box::new(b))
            }
            "quotient" => {
                let a = self.expr()?;
                self.eat(',')?;
                let b = self.expr()?;
                Expression::Quotient(Box::new(a), Box::new(b))
            }
            "induce" => {
                let f = self.expr()?;
                self.eat(',')?;
                let d = self.expr()?;
                self.eat(',')?;
                let c = self.expr()?;
                Expression::InducedMap(Box::new(f), Box::new(d), Box::new(c))
            }
            "contract" => {
                let e = self.expr()?;
                self.eat(',')?;
                let up = self.integer()?;
                self.eat(',')?;
                let down = self.integer()?;
                Expression::Contract(Box::new(e), up, down)
            }
            "permute" => {
                let e = self.expr()?;
                self.eat(',')?;
                let sigma = self.index_list()?;
                self.eat(',')?;
                let tau = self.index_list()?;
                Expression::Permute(Box::new(e), sigma, tau)
            }
            "scale" => {
                let lit = self.raw_until_comma()?;
                self.eat(',')?;
                let e = self.expr()?;
                Expression::ScalarMul(lit, Box::new(e))
            }
            "full" => {
                let p = self.integer()?;
                self.eat(',')?;
                let q = self.integer()?;
                Expression::Full(p, q)
            }
            "gramL" | "gramR" => {
                let e = self.expr()?;
                let rest = if self.peek() == Some(',') {
                    self.pos += 1;
                    let sub = self.expr()?;
                    self.eat(',')?;
                    let quot = self.expr()?;
                    Some(Box::new((sub, quot)))
                } else {
                    None
                };
                if name == "gramL" {
                    Expression::GramLeft(Box::new(e), rest)
                } else {
                    Expression::GramRight(Box::new(e), rest)
                }
            }
            other => {
                return Err(CoreError::ParseError(format!(
                    "unknown operation '{other}' in expression"
                )))
            }
        };
        self.eat(')')?;
        Ok(node)
    }
}

pub fn parse_expression(src: &str) -> Result<Expression> {
    let mut p = ExprParser {
        src,
        bytes: src.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(CoreError::ParseError(format!(
            "trailing input at byte {} of expression",
            p.pos
        )));
    }
    Ok(e)
}
