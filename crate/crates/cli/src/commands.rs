//! Command handlers. Each returns the fully rendered output string; errors
//! carry their exit class. Inputs come from --flags and/or a job file, with
//! flags winning where both are given.

use forge_core::autlie::aut_lie_algebra;
use forge_core::closure::{compute_closure_budgeted, invariant_field_report, DegreeBound};
use forge_core::identities::{
    graded_identity_space, multilinear_identity_space_budgeted, render_identity,
};
use forge_core::linalg::Mat;
use forge_core::morphcalc::{eval_expression, parse_expression, Env};
use forge_core::scalars::{galois_apply, Scalar, ScalarField};
use forge_core::structures::{
    build_taft, build_taft_product, build_twisted_group_algebra, cycle_invariant,
    extract_product_invariants, extract_taft_invariants, mu_and_generic_form, twist_cocycle,
    Cocycle2, GroupTable, TaftFactor, TaftParams, TaftProductParams,
};
use forge_core::tensors::{Structure, DEFAULT_EVAL_BUDGET};
use forge_core::traceinv::{formanek_f, formanek_D, procesi_T, CycleInvariantSpec};
use serde_json::{json, Value};

use crate::files::{
    emit_structure, load_job, load_structure_file, scalar_matrix, walk, CliError, CliResult, Job,
};
use crate::reports;
use crate::{Cli, Command};

pub fn run(cli: &Cli) -> CliResult<String> {
    match cli.command {
        Command::Closure => closure(cli),
        Command::InvariantField => invariant_field(cli),
        Command::AutLie => aut_lie(cli),
        Command::Identities => identities(cli),
        Command::GradedIdentities => graded_identities(cli),
        Command::Eval => eval(cli),
        Command::TwistedGroup => twisted_group(cli),
        Command::GenericForm => generic_form(cli),
        Command::TaftBuild => taft_build(cli),
        Command::TaftExtract => taft_extract(cli),
        Command::TaftProduct => taft_product(cli),
        Command::GaloisTwist => galois_twist(cli),
        Command::Procesi => procesi(cli),
        Command::Formanek => formanek(cli),
    }
}

fn load_job_opt(cli: &Cli) -> CliResult<Option<Job>> {
    cli.job.as_deref().map(load_job).transpose()
}

fn require_job<'a>(cli: &Cli, job: &'a Option<Job>) -> CliResult<&'a Job> {
    let _ = cli;
    job.as_ref()
        .ok_or_else(|| CliError::Schema("this command needs --job <path>".to_string()))
}

fn load_structure(cli: &Cli, job: Option<&Job>) -> CliResult<Structure> {
    if let Some(p) = &cli.structure {
        return load_structure_file(p);
    }
    if let Some(j) = job {
        if let Some(p) = j.structure_path()? {
            return load_structure_file(&p);
        }
    }
    Err(CliError::Schema(
        "no structure given: pass --structure <path> or a job with a 'structure' reference"
            .to_string(),
    ))
}

fn parse_bound(cli: &Cli, job: Option<&Job>) -> CliResult<DegreeBound> {
    let max_rounds = match job.and_then(|j| j.get("max_rounds")) {
        Some(v) => walk::unsigned(v, "job.max_rounds")?,
        None => 32,
    };
    if let Some(spec) = &cli.bound {
        let parts: Vec<&str> = spec.split(',').collect();
        let parse = |s: &str| {
            s.trim().parse::<usize>().map_err(|_| {
                CliError::Schema(format!("--bound expects P,Q with integers, got '{spec}'"))
            })
        };
        if parts.len() != 2 {
            return Err(CliError::Schema(format!(
                "--bound expects P,Q with integers, got '{spec}'"
            )));
        }
        return Ok(DegreeBound::new(parse(parts[0])?, parse(parts[1])?, max_rounds));
    }
    if let Some(j) = job {
        if j.get("bound").is_some() {
            let b = j.usize_list("bound")?;
            if b.len() != 2 {
                return Err(CliError::Schema(
                    "job.bound: expected [p_max, q_max]".to_string(),
                ));
            }
            return Ok(DegreeBound::new(b[0], b[1], max_rounds));
        }
    }
    Err(CliError::Schema(
        "no degree bound given: pass --bound P,Q or a job with 'bound'".to_string(),
    ))
}

fn budget(cli: &Cli) -> u128 {
    cli.budget.map(u128::from).unwrap_or(DEFAULT_EVAL_BUDGET)
}

fn closure(cli: &Cli) -> CliResult<String> {
    let job = load_job_opt(cli)?;
    let st = load_structure(cli, job.as_ref())?;
    let bound = parse_bound(cli, job.as_ref())?;
    let state = compute_closure_budgeted(&st, bound, budget(cli))?;
    let mut types: Vec<(usize, usize)> = state.types().collect();
    types.sort();
    let dims: Vec<Value> = types
        .iter()
        .map(|&(p, q)| json!({ "dim": state.dim(p, q), "p": p, "q": q }))
        .collect();
    let rep = reports::report(vec![
        (
            "bound",
            json!({
                "max_rounds": bound.max_rounds,
                "p_max": bound.p_max,
                "q_max": bound.q_max,
            }),
        ),
        ("converged", json!(state.converged())),
        ("dims", Value::Array(dims)),
        ("field", json!(state.field().to_string())),
        ("rounds", json!(state.rounds())),
        ("wdim", json!(state.wdim())),
        ("x00", reports::scalar_list(&state.x00_scalars())),
    ]);
    Ok(reports::render(&rep, &cli.format))
}

fn invariant_field(cli: &Cli) -> CliResult<String> {
    let job = load_job_opt(cli)?;
    let st = load_structure(cli, job.as_ref())?;
    let bound = parse_bound(cli, job.as_ref())?;
    let state = compute_closure_budgeted(&st, bound, budget(cli))?;
    let inv = invariant_field_report(&state)?;
    let rep = reports::report(vec![
        ("converged", json!(state.converged())),
        ("field", json!(state.field().to_string())),
        ("field_closed", json!(inv.field_closed)),
        ("fixed_field_degree", json!(inv.fixed_field_degree)),
        ("galois_stabilizer", json!(inv.galois_stabilizer)),
        ("q_basis", reports::scalar_list(&inv.q_basis)),
        ("rounds", json!(state.rounds())),
    ]);
    Ok(reports::render(&rep, &cli.format))
}

fn aut_lie(cli: &Cli) -> CliResult<String> {
    let job = load_job_opt(cli)?;
    let st = load_structure(cli, job.as_ref())?;
    let res = aut_lie_algebra(&st)?;
    let basis: Vec<Value> = res.basis.iter().map(reports::matrix).collect();
    let rep = reports::report(vec![
        ("basis", Value::Array(basis)),
        ("dimension", json!(res.dimension)),
    ]);
    Ok(reports::render(&rep, &cli.format))
}

fn identity_basis(basis: &[Vec<Scalar>], d: usize) -> CliResult<Value> {
    let rows: CliResult<Vec<Value>> = basis
        .iter()
        .map(|coeffs| {
            Ok(json!({
                "coeffs": reports::scalar_list(coeffs),
                "rendered": render_identity(coeffs, d)?,
            }))
        })
        .collect();
    Ok(Value::Array(rows?))
}

fn identities(cli: &Cli) -> CliResult<String> {
    let job = load_job_opt(cli)?;
    let st = load_structure(cli, job.as_ref())?;
    let degree = match cli.degree {
        Some(d) => d,
        None => match job.as_ref().and_then(|j| j.get("degree")) {
            Some(v) => walk::unsigned(v, "job.degree")?,
            None => {
                return Err(CliError::Schema(
                    "no degree given: pass --degree D or a job with 'degree'".to_string(),
                ))
            }
        },
    };
    let space = multilinear_identity_space_budgeted(&st, degree, budget(cli))?;
    let rep = reports::report(vec![
        ("basis", identity_basis(&space.basis, degree)?),
        ("convention", json!(space.convention)),
        ("degree", json!(degree)),
        ("dimension", json!(space.basis.len())),
    ]);
    Ok(reports::render(&rep, &cli.format))
}

fn graded_identities(cli: &Cli) -> CliResult<String> {
    let job = load_job_opt(cli)?;
    let j = require_job(cli, &job)?;
    let st = load_structure(cli, Some(j))?;
    let tuple = j.usize_list("tuple")?;
    let space = graded_identity_space(&st, &tuple)?;
    let rep = reports::report(vec![
        ("basis", identity_basis(&space.basis, tuple.len())?),
        ("convention", json!(space.convention)),
        ("dimension", json!(space.basis.len())),
        ("tuple", json!(tuple)),
    ]);
    Ok(reports::render(&rep, &cli.format))
}

fn eval(cli: &Cli) -> CliResult<String> {
    let job = load_job_opt(cli)?;
    let j = require_job(cli, &job)?;
    let st = load_structure(cli, Some(j))?;
    let mut env = Env::new();
    if let Some(bs) = j.get("bindings") {
        for (i, bv) in walk::array(bs, &j.ctx("bindings"))?.iter().enumerate() {
            let ctx = format!("{}[{i}]", j.ctx("bindings"));
            let bo = walk::obj(bv, &ctx)?;
            let name = walk::string(walk::field(bo, "name", &ctx)?, &format!("{ctx}.name"))?;
            let src = walk::string(walk::field(bo, "expr", &ctx)?, &format!("{ctx}.expr"))?;
            let expr = parse_expression(src)?;
            let value = eval_expression(&expr, &st, &env)?;
            env.push(name, value);
        }
    }
    let mut parts = Vec::new();
    let rctx = j.ctx("report");
    for (i, rv) in walk::array(j.req("report")?, &rctx)?.iter().enumerate() {
        let ctx = format!("{rctx}[{i}]");
        let ro = walk::obj(rv, &ctx)?;
        let label = walk::string(walk::field(ro, "label", &ctx)?, &format!("{ctx}.label"))?;
        let src = walk::string(walk::field(ro, "expr", &ctx)?, &format!("{ctx}.expr"))?;
        let expr = parse_expression(src)?;
        let value = eval_expression(&expr, &st, &env)?;
        parts.push((label, reports::eval_value(&value)));
    }
    let rep = reports::report(parts);
    Ok(reports::render(&rep, &cli.format))
}

fn group_and_cocycle(j: &Job) -> CliResult<(GroupTable, Cocycle2)> {
    let orders = j.usize_list("orders")?;
    if orders.is_empty() || orders.iter().any(|&n| n == 0) {
        return Err(CliError::Schema(
            "job.orders: expected a nonempty list of positive cyclic orders".to_string(),
        ));
    }
    let group = GroupTable::product_of_cyclics(&orders);
    let field = j.field_desc("field")?.to_field();
    let ctx = j.ctx("cocycle");
    let co = walk::obj(j.req("cocycle")?, &ctx)?;
    let kind = walk::string(walk::field(co, "kind", &ctx)?, &format!("{ctx}.kind"))?;
    let cocycle = match kind {
        "trivial" => Cocycle2::trivial(group.order(), &field),
        "zeta_jk" => {
            if orders.len() != 2 || orders[0] != orders[1] {
                return Err(CliError::Schema(format!(
                    "{ctx}: kind zeta_jk needs orders [n, n], got {orders:?}"
                )));
            }
            Cocycle2::zeta_jk(orders[0], &field)?
        }
        "entries" => {
            let ectx = format!("{ctx}.entries");
            let rows = walk::array(walk::field(co, "entries", &ctx)?, &ectx)?;
            let mut grid = Vec::with_capacity(rows.len());
            for (x, rv) in rows.iter().enumerate() {
                let rctx = format!("{ectx}[{x}]");
                let row = walk::array(rv, &rctx)?;
                let mut out = Vec::with_capacity(row.len());
                for (y, cv) in row.iter().enumerate() {
                    out.push(walk::scalar(cv, &field, &format!("{rctx}[{y}]"))?);
                }
                grid.push(out);
            }
            Cocycle2::new(grid)?
        }
        other => {
            return Err(CliError::Schema(format!(
                "{ctx}.kind: unknown cocycle kind '{other}' (trivial | zeta_jk | entries)"
            )))
        }
    };
    Ok((group, cocycle))
}

fn twisted_group(cli: &Cli) -> CliResult<String> {
    let job = load_job_opt(cli)?;
    let j = require_job(cli, &job)?;
    let (group, cocycle) = group_and_cocycle(j)?;
    let w = build_twisted_group_algebra(group, cocycle)?;
    Ok(emit_structure(&w.structure))
}

fn generic_form(cli: &Cli) -> CliResult<String> {
    let job = load_job_opt(cli)?;
    let j = require_job(cli, &job)?;
    let (group, cocycle) = group_and_cocycle(j)?;
    let rep = mu_and_generic_form(&group, &cocycle)?;
    let out = reports::report(vec![
        ("commutators", reports::scalar_grid(&rep.commutators)),
        ("generator_orders", json!(rep.generator_orders)),
        ("k0", json!(rep.k0)),
        ("k0_degree", json!(rep.k0_degree)),
        ("mu", reports::scalar(&rep.mu)),
        ("mu_order", json!(rep.mu_order)),
        ("text", json!(rep.text)),
    ]);
    Ok(reports::render(&out, &cli.format))
}

fn taft_build(cli: &Cli) -> CliResult<String> {
    let job = load_job_opt(cli)?;
    let j = require_job(cli, &job)?;
    let field = j.field_desc("field")?.to_field();
    let params = TaftParams {
        n: j.usize_field("n")?,
        a: j.scalar_field("a", &field)?,
        b: j.scalar_field("b", &field)?,
    };
    let alg = build_taft(&params)?;
    Ok(emit_structure(&alg.structure))
}

fn taft_extract(cli: &Cli) -> CliResult<String> {
    let job = load_job_opt(cli)?;
    let st = load_structure(cli, job.as_ref())?;
    let inv = extract_taft_invariants(&st)?;
    let rep = reports::report(vec![
        ("a_class", reports::scalar(&inv.a_class)),
        ("b", reports::scalar(&inv.b)),
        ("n", json!(inv.n)),
        ("t", reports::scalar_list(&inv.t)),
        ("u", reports::scalar_list(&inv.u)),
    ]);
    Ok(reports::render(&rep, &cli.format))
}

fn i64_grid(j: &Job, key: &str) -> CliResult<Vec<Vec<i64>>> {
    let ctx = j.ctx(key);
    let rows = walk::array(j.req(key)?, &ctx)?;
    rows.iter()
        .enumerate()
        .map(|(i, rv)| {
            let rctx = format!("{ctx}[{i}]");
            walk::array(rv, &rctx)?
                .iter()
                .enumerate()
                .map(|(k, v)| walk::signed(v, &format!("{rctx}[{k}]")))
                .collect()
        })
        .collect()
}

fn scalar_grid_field(j: &Job, key: &str, field: &ScalarField) -> CliResult<Vec<Vec<Scalar>>> {
    let ctx = j.ctx(key);
    let rows = walk::array(j.req(key)?, &ctx)?;
    rows.iter()
        .enumerate()
        .map(|(i, rv)| {
            let rctx = format!("{ctx}[{i}]");
            walk::array(rv, &rctx)?
                .iter()
                .enumerate()
                .map(|(k, v)| walk::scalar(v, field, &format!("{rctx}[{k}]")))
                .collect()
        })
        .collect()
}

fn taft_product(cli: &Cli) -> CliResult<String> {
    let job = load_job_opt(cli)?;
    let j = require_job(cli, &job)?;
    let field = j.field_desc("field")?.to_field();
    let fctx = j.ctx("factors");
    let mut factors = Vec::new();
    for (i, fv) in walk::array(j.req("factors")?, &fctx)?.iter().enumerate() {
        let ctx = format!("{fctx}[{i}]");
        let fo = walk::obj(fv, &ctx)?;
        factors.push(TaftFactor {
            n: walk::unsigned(walk::field(fo, "n", &ctx)?, &format!("{ctx}.n"))?,
            c: walk::signed(walk::field(fo, "c", &ctx)?, &format!("{ctx}.c"))?,
            a: walk::scalar(walk::field(fo, "a", &ctx)?, &field, &format!("{ctx}.a"))?,
            b: walk::scalar(walk::field(fo, "b", &ctx)?, &field, &format!("{ctx}.b"))?,
        });
    }
    let params = TaftProductParams {
        factors,
        b_exp: i64_grid(j, "b_exp")?,
        lambda: scalar_grid_field(j, "lambda", &field)?,
    };
    let alg = build_taft_product(&params)?;
    if let Some(v) = j.get("output") {
        if walk::string(v, &j.ctx("output"))? == "structure" {
            return Ok(emit_structure(&alg.structure));
        }
    }
    let inv = extract_product_invariants(&alg)?;
    let big: Vec<Value> = inv
        .big_lambda
        .iter()
        .enumerate()
        .flat_map(|(i, row)| {
            row.iter().enumerate().filter_map(move |(jj, cell)| {
                cell.as_ref().map(|(coeff, index)| {
                    json!({ "coeff": coeff.to_string(), "i": i, "index": index, "j": jj })
                })
            })
        })
        .collect();
    let two: Vec<Value> = inv
        .two_cycles
        .iter()
        .map(|((i, jj), v)| json!({ "i": i, "j": jj, "value": v.to_string() }))
        .collect();
    let mut parts = vec![
        ("a", reports::scalar_list(&inv.a)),
        ("b", reports::scalar_list(&inv.b)),
        ("big_lambda", Value::Array(big)),
        ("dim", json!(alg.structure.dim)),
        ("lambda", reports::scalar_grid(&inv.lambda)),
        ("order", json!(alg.order)),
        ("two_cycles", Value::Array(two)),
        ("zeta", reports::scalar(&alg.zeta)),
        ("zeta_b", reports::scalar_grid(&inv.zeta_b)),
    ];
    let cycles_out;
    if let Some(cv) = j.get("cycles") {
        let cctx = j.ctx("cycles");
        let mut rows = Vec::new();
        for (i, c) in walk::array(cv, &cctx)?.iter().enumerate() {
            let ctx = format!("{cctx}[{i}]");
            let cycle: Vec<usize> = walk::array(c, &ctx)?
                .iter()
                .enumerate()
                .map(|(k, v)| walk::unsigned(v, &format!("{ctx}[{k}]")))
                .collect::<CliResult<_>>()?;
            let value = cycle_invariant(&inv.lambda, &cycle)?;
            rows.push(json!({
                "cycle": cycle,
                "value": value.map(|s| Value::String(s.to_string())).unwrap_or(Value::Null),
            }));
        }
        cycles_out = Value::Array(rows);
        parts.push(("cycles", cycles_out));
    }
    let rep = reports::report(parts);
    Ok(reports::render(&rep, &cli.format))
}

fn galois_twist(cli: &Cli) -> CliResult<String> {
    let job = load_job_opt(cli)?;
    let j = require_job(cli, &job)?;
    let (group, cocycle) = group_and_cocycle(j)?;
    let k = j.i64_field("k")?;
    let base = mu_and_generic_form(&group, &cocycle)?;
    let twisted = twist_cocycle(&cocycle, k)?;
    let after = mu_and_generic_form(&group, &twisted)?;
    let sigma_mu = galois_apply(k, &base.mu)?;
    let rep = reports::report(vec![
        ("coherent", json!(after.mu == sigma_mu)),
        ("k", json!(k)),
        ("k0", json!(base.k0)),
        ("k0_twisted", json!(after.k0)),
        ("mu", reports::scalar(&base.mu)),
        ("mu_twisted", reports::scalar(&after.mu)),
        ("sigma_k_mu", reports::scalar(&sigma_mu)),
    ]);
    Ok(reports::render(&rep, &cli.format))
}

fn matrices_from(j: &Job, key: &str, field: &ScalarField) -> CliResult<Vec<Mat>> {
    let ctx = j.ctx(key);
    walk::array(j.req(key)?, &ctx)?
        .iter()
        .enumerate()
        .map(|(i, v)| scalar_matrix(v, field, &format!("{ctx}[{i}]")))
        .collect()
}

fn procesi(cli: &Cli) -> CliResult<String> {
    let job = load_job_opt(cli)?;
    let j = require_job(cli, &job)?;
    let field = j.field_desc("field")?.to_field();
    let cctx = j.ctx("cycles");
    let cycles: Vec<Vec<usize>> = walk::array(j.req("cycles")?, &cctx)?
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let ctx = format!("{cctx}[{i}]");
            walk::array(c, &ctx)?
                .iter()
                .enumerate()
                .map(|(k, v)| walk::unsigned(v, &format!("{ctx}[{k}]")))
                .collect()
        })
        .collect::<CliResult<_>>()?;
    let spec = CycleInvariantSpec {
        t: j.usize_field("t")?,
        cycles,
    };
    let mats = matrices_from(j, "matrices", &field)?;
    let value = procesi_T(&spec, &mats)?;
    let rep = reports::report(vec![
        ("t", json!(spec.t)),
        ("value", reports::scalar(&value)),
    ]);
    Ok(reports::render(&rep, &cli.format))
}

fn formanek(cli: &Cli) -> CliResult<String> {
    let job = load_job_opt(cli)?;
    let j = require_job(cli, &job)?;
    let field = j.field_desc("field")?.to_field();
    let (mode, value) = if j.get("x").is_some() || j.get("y").is_some() {
        let x = scalar_matrix(j.req("x")?, &field, &j.ctx("x"))?;
        let y = scalar_matrix(j.req("y")?, &field, &j.ctx("y"))?;
        ("D", formanek_D(&x, &y, cli.force_large)?)
    } else {
        let mats = matrices_from(j, "matrices", &field)?;
        ("f", formanek_f(&mats, cli.force_large)?)
    };
    let rep = reports::report(vec![
        ("mode", json!(mode)),
        ("value", reports::scalar(&value)),
    ]);
    Ok(reports::render(&rep, &cli.format))
}
