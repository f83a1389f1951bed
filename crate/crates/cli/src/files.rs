//! File formats: structure files (the interchange format for presented
//! structures), job files, and the scalar-string matrix format. Parsing is
//! done off a serde_json Value so malformed JSON, structural mistakes, and
//! bad scalar literals are reported as distinct error classes with context.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use forge_core::error::CoreError;
use forge_core::linalg::Mat;
use forge_core::scalars::{parse_scalar, Scalar, ScalarField};
use forge_core::tensors::{decode_index, Structure, Tensor, TensorType};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Schema(String),
    Field(String),
    Io(String),
    Domain(CoreError),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Schema(m) => write!(f, "schema error: {m}"),
            CliError::Field(m) => write!(f, "field error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> CliError {
        CliError::Domain(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 74,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldDesc {
    Rational,
    Cyclotomic { order: usize },
    RationalFunction,
}

impl FieldDesc {
    pub fn to_field(&self) -> ScalarField {
        match self {
            FieldDesc::Rational => ScalarField::Rational,
            FieldDesc::Cyclotomic { order } => ScalarField::Cyclotomic { order: *order },
            FieldDesc::RationalFunction => ScalarField::RationalFunction,
        }
    }

    pub fn from_field(f: &ScalarField) -> FieldDesc {
        match f {
            ScalarField::Rational => FieldDesc::Rational,
            ScalarField::Cyclotomic { order } => FieldDesc::Cyclotomic { order: *order },
            ScalarField::RationalFunction => FieldDesc::RationalFunction,
        }
    }
}

#[derive(Serialize)]
pub struct EntryFile {
    pub up: Vec<usize>,
    pub down: Vec<usize>,
    pub value: String,
}

#[derive(Serialize)]
pub struct TensorFile {
    pub name: String,
    pub p: usize,
    pub q: usize,
    pub entries: Vec<EntryFile>,
}

/// The canonical on-disk form: tensors sorted by name, entries sorted by
/// index, only nonzero values. emit(parse(file)) is byte-identical on files
/// already in this form.
#[derive(Serialize)]
pub struct StructureFile {
    pub schema_version: u64,
    pub field: FieldDesc,
    pub dim: usize,
    pub tensors: Vec<TensorFile>,
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn json_value(text: &str, what: &str) -> CliResult<Value> {
    serde_json::from_str(text).map_err(|e| {
        CliError::Parse(format!(
            "{what}: line {} column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

fn as_obj<'a>(v: &'a Value, ctx: &str) -> CliResult<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| CliError::Schema(format!("{ctx}: expected an object")))
}

fn req<'a>(o: &'a Map<String, Value>, key: &str, ctx: &str) -> CliResult<&'a Value> {
    o.get(key)
        .ok_or_else(|| CliError::Schema(format!("{ctx}: missing field '{key}'")))
}

fn as_u64(v: &Value, ctx: &str) -> CliResult<u64> {
    v.as_u64()
        .ok_or_else(|| CliError::Schema(format!("{ctx}: expected a nonnegative integer")))
}

fn as_usize(v: &Value, ctx: &str) -> CliResult<usize> {
    Ok(as_u64(v, ctx)? as usize)
}

fn as_str<'a>(v: &'a Value, ctx: &str) -> CliResult<&'a str> {
    v.as_str()
        .ok_or_else(|| CliError::Schema(format!("{ctx}: expected a string")))
}

fn as_arr<'a>(v: &'a Value, ctx: &str) -> CliResult<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| CliError::Schema(format!("{ctx}: expected an array")))
}

fn check_version(o: &Map<String, Value>, ctx: &str) -> CliResult<()> {
    let v = as_u64(req(o, "schema_version", ctx)?, &format!("{ctx}.schema_version"))?;
    if v != SCHEMA_VERSION {
        return Err(CliError::Schema(format!(
            "{ctx}: unsupported schema_version {v}, this build reads {SCHEMA_VERSION}"
        )));
    }
    Ok(())
}

pub fn parse_field_desc(v: &Value, ctx: &str) -> CliResult<FieldDesc> {
    let o = as_obj(v, ctx)?;
    match as_str(req(o, "kind", ctx)?, &format!("{ctx}.kind"))? {
        "rational" => Ok(FieldDesc::Rational),
        "cyclotomic" => {
            let order = as_usize(req(o, "order", ctx)?, &format!("{ctx}.order"))?;
            if order < 1 {
                return Err(CliError::Schema(format!("{ctx}.order: must be positive")));
            }
            Ok(FieldDesc::Cyclotomic { order })
        }
        "rational_function" => Ok(FieldDesc::RationalFunction),
        other => Err(CliError::Schema(format!(
            "{ctx}.kind: unknown field kind '{other}'"
        ))),
    }
}

fn parse_scalar_at(s: &str, field: &ScalarField, ctx: &str) -> CliResult<Scalar> {
    parse_scalar(s, field)
        .map_err(|e| CliError::Field(format!("{ctx}: value '{s}' does not parse in {field}: {e}")))
}

pub fn parse_structure_text(text: &str, what: &str) -> CliResult<Structure> {
    let root = json_value(text, what)?;
    let o = as_obj(&root, what)?;
    check_version(o, what)?;
    let field = parse_field_desc(req(o, "field", what)?, &format!("{what}.field"))?.to_field();
    let dim = as_usize(req(o, "dim", what)?, &format!("{what}.dim"))?;
    let mut st = Structure::new(dim, field.clone());
    let mut names = BTreeSet::new();
    for (ti, tv) in as_arr(req(o, "tensors", what)?, &format!("{what}.tensors"))?
        .iter()
        .enumerate()
    {
        let tctx = format!("{what}.tensors[{ti}]");
        let to = as_obj(tv, &tctx)?;
        let name = as_str(req(to, "name", &tctx)?, &format!("{tctx}.name"))?;
        if name.is_empty() || !names.insert(name.to_string()) {
            return Err(CliError::Schema(format!(
                "{tctx}.name: empty or duplicate tensor name '{name}'"
            )));
        }
        let p = as_usize(req(to, "p", &tctx)?, &format!("{tctx}.p"))?;
        let q = as_usize(req(to, "q", &tctx)?, &format!("{tctx}.q"))?;
        let mut t = Tensor::zeros(TensorType::new(p, q), dim, &field);
        let mut seen = BTreeSet::new();
        for (ei, ev) in as_arr(req(to, "entries", &tctx)?, &format!("{tctx}.entries"))?
            .iter()
            .enumerate()
        {
            let ectx = format!("{tctx}.entries[{ei}]");
            let eo = as_obj(ev, &ectx)?;
            let up = index_list(req(eo, "up", &ectx)?, p, dim, &format!("{ectx}.up"))?;
            let down = index_list(req(eo, "down", &ectx)?, q, dim, &format!("{ectx}.down"))?;
            if !seen.insert((up.clone(), down.clone())) {
                return Err(CliError::Schema(format!(
                    "{ectx}: duplicate entry for indices up={up:?} down={down:?}"
                )));
            }
            let raw = as_str(req(eo, "value", &ectx)?, &format!("{ectx}.value"))?;
            let value = parse_scalar_at(raw, &field, &format!("{ectx}.value"))?;
            t.set(&up, &down, value);
        }
        st.push(name, t);
    }
    Ok(st)
}

fn index_list(v: &Value, len: usize, dim: usize, ctx: &str) -> CliResult<Vec<usize>> {
    let arr = as_arr(v, ctx)?;
    if arr.len() != len {
        return Err(CliError::Schema(format!(
            "{ctx}: expected {len} indices, got {}",
            arr.len()
        )));
    }
    let mut out = Vec::with_capacity(len);
    for (i, e) in arr.iter().enumerate() {
        let idx = as_usize(e, &format!("{ctx}[{i}]"))?;
        if idx >= dim {
            return Err(CliError::Schema(format!(
                "{ctx}[{i}]: index {idx} out of range for dim {dim}"
            )));
        }
        out.push(idx);
    }
    Ok(out)
}

pub fn load_structure_file(path: &Path) -> CliResult<Structure> {
    parse_structure_text(&read_text(path)?, &path.display().to_string())
}

pub fn structure_to_file(st: &Structure) -> StructureFile {
    let mut tensors: Vec<TensorFile> = st
        .tensors
        .iter()
        .map(|(name, t)| {
            let (p, q) = (t.ttype().p, t.ttype().q);
            let slots = p + q;
            let entries = t
                .entries()
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(flat, v)| {
                    let idx = decode_index(flat, st.dim, slots);
                    EntryFile {
                        up: idx[..p].to_vec(),
                        down: idx[p..].to_vec(),
                        value: v.to_string(),
                    }
                })
                .collect();
            TensorFile {
                name: name.clone(),
                p,
                q,
                entries,
            }
        })
        .collect();
    tensors.sort_by(|a, b| a.name.cmp(&b.name));
    StructureFile {
        schema_version: SCHEMA_VERSION,
        field: FieldDesc::from_field(&st.field),
        dim: st.dim,
        tensors,
    }
}

pub fn emit_structure(st: &Structure) -> String {
    let mut s = serde_json::to_string_pretty(&structure_to_file(st)).expect("serializable");
    s.push('\n');
    s
}

/// A loaded job file: its key map plus the directory it came from, so that
/// structure references resolve relative to the job.
pub struct Job {
    root: Map<String, Value>,
    dir: PathBuf,
    name: String,
}

pub fn load_job(path: &Path) -> CliResult<Job> {
    let text = read_text(path)?;
    let what = path.display().to_string();
    let root = json_value(&text, &what)?;
    let o = as_obj(&root, &what)?.clone();
    check_version(&o, &what)?;
    Ok(Job {
        root: o,
        dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        name: what,
    })
}

impl Job {
    pub fn ctx(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.root.get(key)
    }

    pub fn req(&self, key: &str) -> CliResult<&Value> {
        req(&self.root, key, &self.name)
    }

    pub fn structure_path(&self) -> CliResult<Option<PathBuf>> {
        match self.root.get("structure") {
            None => Ok(None),
            Some(v) => Ok(Some(self.dir.join(as_str(v, &self.ctx("structure"))?))),
        }
    }

    pub fn usize_field(&self, key: &str) -> CliResult<usize> {
        as_usize(self.req(key)?, &self.ctx(key))
    }

    pub fn i64_field(&self, key: &str) -> CliResult<i64> {
        self.req(key)?
            .as_i64()
            .ok_or_else(|| CliError::Schema(format!("{}: expected an integer", self.ctx(key))))
    }

    pub fn str_field(&self, key: &str) -> CliResult<&str> {
        as_str(self.req(key)?, &self.ctx(key))
    }

    pub fn field_desc(&self, key: &str) -> CliResult<FieldDesc> {
        parse_field_desc(self.req(key)?, &self.ctx(key))
    }

    pub fn usize_list(&self, key: &str) -> CliResult<Vec<usize>> {
        let ctx = self.ctx(key);
        as_arr(self.req(key)?, &ctx)?
            .iter()
            .enumerate()
            .map(|(i, v)| as_usize(v, &format!("{ctx}[{i}]")))
            .collect()
    }

    pub fn scalar_field(&self, key: &str, field: &ScalarField) -> CliResult<Scalar> {
        parse_scalar_at(self.str_field(key)?, field, &self.ctx(key))
    }
}

pub fn scalar_matrix_rows(v: &Value, field: &ScalarField, ctx: &str) -> CliResult<Vec<Vec<Scalar>>> {
    let o = as_obj(v, ctx)?;
    let rows = as_arr(req(o, "rows", ctx)?, &format!("{ctx}.rows"))?;
    let mut out = Vec::with_capacity(rows.len());
    for (ri, rv) in rows.iter().enumerate() {
        let rctx = format!("{ctx}.rows[{ri}]");
        let row = as_arr(rv, &rctx)?;
        let mut parsed = Vec::with_capacity(row.len());
        for (ci, cv) in row.iter().enumerate() {
            let cctx = format!("{rctx}[{ci}]");
            parsed.push(parse_scalar_at(as_str(cv, &cctx)?, field, &cctx)?);
        }
        out.push(parsed);
    }
    Ok(out)
}

pub fn scalar_matrix(v: &Value, field: &ScalarField, ctx: &str) -> CliResult<Mat> {
    let rows = scalar_matrix_rows(v, field, ctx)?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(CliError::Schema(format!(
            "{ctx}: rows must be nonempty and of equal length"
        )));
    }
    Ok(Mat::from_rows(field, rows))
}

/// Generic value walkers exposed for command-specific job parameters.
pub mod walk {
    use super::*;

    pub fn obj<'a>(v: &'a Value, ctx: &str) -> CliResult<&'a Map<String, Value>> {
        as_obj(v, ctx)
    }

    pub fn field<'a>(o: &'a Map<String, Value>, key: &str, ctx: &str) -> CliResult<&'a Value> {
        req(o, key, ctx)
    }

    pub fn string<'a>(v: &'a Value, ctx: &str) -> CliResult<&'a str> {
        as_str(v, ctx)
    }

    pub fn unsigned(v: &Value, ctx: &str) -> CliResult<usize> {
        as_usize(v, ctx)
    }

    pub fn signed(v: &Value, ctx: &str) -> CliResult<i64> {
        v.as_i64()
            .ok_or_else(|| CliError::Schema(format!("{ctx}: expected an integer")))
    }

    pub fn array<'a>(v: &'a Value, ctx: &str) -> CliResult<&'a Vec<Value>> {
        as_arr(v, ctx)
    }

    pub fn scalar(v: &Value, f: &ScalarField, ctx: &str) -> CliResult<Scalar> {
        parse_scalar_at(as_str(v, ctx)?, f, ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deformed_pairing_text() -> String {
        let f = ScalarField::RationalFunction;
        let one = Scalar::one(&f);
        let tv = parse_scalar("t", &f).unwrap();
        let mut m = Tensor::zeros(TensorType::new(1, 2), 3, &f);
        m.set(&[2], &[0, 0], one.clone());
        m.set(&[2], &[1, 1], one.clone());
        m.set(&[2], &[0, 1], one);
        m.set(&[2], &[1, 0], tv);
        let mut st = Structure::new(3, f);
        st.push("m", m);
        emit_structure(&st)
    }

    #[test]
    fn canonical_files_round_trip_byte_identically() {
        let text = deformed_pairing_text();
        let st = parse_structure_text(&text, "deformed-pairing").unwrap();
        assert_eq!(emit_structure(&st), text);
        let (name, m) = &st.tensors[0];
        assert_eq!(name, "m");
        assert_eq!(m.entries().iter().filter(|v| !v.is_zero()).count(), 4);
        assert_eq!(m.get(&[2], &[1, 0]).to_string(), "t");
    }

    #[test]
    fn missing_schema_version_is_a_schema_error() {
        let text = r#"{"field": {"kind": "rational"}, "dim": 2, "tensors": []}"#;
        match parse_structure_text(text, "f") {
            Err(CliError::Schema(m)) => assert!(m.contains("schema_version")),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_json_is_a_parse_error_with_position() {
        match parse_structure_text("{\n  \"dim\": ,\n}", "f") {
            Err(CliError::Parse(m)) => assert!(m.contains("line 2")),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn bad_scalar_literals_are_field_errors() {
        let text = r#"{"schema_version": 1, "field": {"kind": "rational"}, "dim": 2,
            "tensors": [{"name": "m", "p": 1, "q": 2,
                "entries": [{"up": [0], "down": [0, 0], "value": "1/0"}]}]}"#;
        match parse_structure_text(text, "f") {
            Err(CliError::Field(m)) => assert!(m.contains("1/0")),
            other => panic!("expected field error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_entries_are_schema_errors() {
        let text = r#"{"schema_version": 1, "field": {"kind": "rational"}, "dim": 2,
            "tensors": [{"name": "m", "p": 1, "q": 2, "entries": [
                {"up": [0], "down": [0, 0], "value": "1"},
                {"up": [0], "down": [0, 0], "value": "2"}]}]}"#;
        match parse_structure_text(text, "f") {
            Err(CliError::Schema(m)) => assert!(m.contains("duplicate")),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn out_of_range_indices_are_schema_errors() {
        let text = r#"{"schema_version": 1, "field": {"kind": "rational"}, "dim": 2,
            "tensors": [{"name": "m", "p": 1, "q": 0,
                "entries": [{"up": [5], "down": [], "value": "1"}]}]}"#;
        match parse_structure_text(text, "f") {
            Err(CliError::Schema(m)) => assert!(m.contains("out of range")),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn empty_structures_load() {
        let text = r#"{"schema_version": 1, "field": {"kind": "rational"}, "dim": 2, "tensors": []}"#;
        let st = parse_structure_text(text, "f").unwrap();
        assert_eq!(st.dim, 2);
        assert!(st.tensors.is_empty());
    }

    #[test]
    fn cyclotomic_fields_round_trip() {
        let f = ScalarField::Cyclotomic { order: 8 };
        let mut t = Tensor::zeros(TensorType::new(1, 1), 2, &f);
        t.set(&[0], &[0], parse_scalar("z - z^3", &f).unwrap());
        let mut st = Structure::new(2, f);
        st.push("T", t);
        let text = emit_structure(&st);
        let back = parse_structure_text(&text, "f").unwrap();
        assert_eq!(back.get("T").unwrap(), st.get("T").unwrap());
        assert_eq!(emit_structure(&back), text);
    }
}
