use std::collections::BTreeMap;

use lattice_ortho::lattice::PARAM_NAMES;
use lattice_ortho::verify::{gram_matrix_with, moment_recovery};
use lattice_ortho::{
    make_family_by_name, method, registry, validate, BigComplex, Error, Family, FamilyParams, FamilySpec,
    RecurrenceCoeffs, SummationOptions, WeightContext, MAX_PRECISION, MIN_PRECISION,
};
use serde_json::{json, Map, Value};

use crate::cli::{FamilyArgs, Format, MomentsArgs, OutputArgs, RecurrenceArgs, ValidateArgs, VerifyArgs, WeightsArgs};
use crate::output::{complex, csv_text, real};

pub type CmdResult = Result<Outcome, Error>;

/// Rendered output and the exit code to finish with.
pub struct Outcome {
    pub body: String,
    pub exit: u8,
}

/// Exit code when the command ran but some entry or check failed.
pub const EXIT_PARTIAL: u8 = 2;

struct Selected {
    spec: Option<FamilySpec>,
    params: FamilyParams,
}

fn config_error(arg: &str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        family: "config".into(),
        arg: arg.into(),
        reason: reason.into(),
    }
}

fn split_pair<'a>(family: &str, item: &'a str) -> Result<(&'a str, &'a str), Error> {
    item.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| Error::InvalidArgument {
            family: family.into(),
            arg: item.into(),
            reason: "expected name=value".into(),
        })
}

fn check_config(fa: &FamilyArgs) -> Result<(), Error> {
    if !(MIN_PRECISION..=MAX_PRECISION).contains(&fa.precision) {
        return Err(config_error(
            "precision",
            format!("must lie in [{MIN_PRECISION}, {MAX_PRECISION}] bits"),
        ));
    }
    if !(fa.tol > 0.0 && fa.tol.is_finite()) {
        return Err(config_error("tol", "must be a positive number"));
    }
    Ok(())
}

fn select(fa: &FamilyArgs) -> Result<Selected, Error> {
    check_config(fa)?;
    let prec = fa.precision;
    if let Some(raw) = &fa.raw {
        if !fa.args.is_empty() {
            return Err(config_error("arg", "--arg applies to named families, not --raw"));
        }
        let pairs = raw
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|item| split_pair("raw", item))
            .collect::<Result<Vec<_>, _>>()?;
        let params = FamilyParams::from_pairs(pairs, prec)?;
        return Ok(Selected { spec: None, params });
    }
    let name = fa
        .family
        .as_deref()
        .ok_or_else(|| config_error("family", "--family or --raw is required"))?;
    let pairs = fa
        .args
        .iter()
        .map(|item| split_pair(name, item))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = make_family_by_name(name, &pairs, prec)?;
    let params = spec.params.clone();
    Ok(Selected {
        spec: Some(spec),
        params,
    })
}

fn options(fa: &FamilyArgs) -> SummationOptions {
    SummationOptions {
        tolerance: fa.tol,
        ..SummationOptions::default()
    }
}

fn family_json(sel: &Selected) -> Value {
    let params: Map<String, Value> = PARAM_NAMES
        .iter()
        .zip(sel.params.values())
        .map(|(n, v)| (n.to_string(), complex(v)))
        .collect();
    let (name, args) = match &sel.spec {
        Some(s) => (
            s.name.cli_name().to_string(),
            s.named_args
                .iter()
                .map(|(k, v)| (k.clone(), complex(v)))
                .collect::<Map<_, _>>(),
        ),
        None => ("raw".to_string(), Map::new()),
    };
    json!({
        "name": name,
        "args": args,
        "params": params,
        "case": sel.params.case_id().number(),
    })
}

fn parts(v: &BigComplex) -> [String; 2] {
    let (re, im) = v.to_decimal_strings();
    [re, im]
}

fn render(output: &OutputArgs, json_body: Value, header: &[&str], rows: Vec<Vec<String>>) -> Result<String, Error> {
    match output.format {
        Format::Json => Ok(crate::output::pretty(&json_body)),
        Format::Csv => csv_text(header, &rows).map_err(|e| Error::Unsupported(format!("csv output: {e}"))),
    }
}

pub fn weights(a: &WeightsArgs) -> CmdResult {
    let sel = select(&a.family)?;
    let opts = options(&a.family);
    let m = method(&a.method)?;
    let ctx = WeightContext::new(sel.params.clone());
    if m.name() == "closed-form" {
        ctx.canonical()?;
    }
    let table = m.table(&ctx, a.count, &opts);
    let mut rows = Vec::new();
    let entries: Vec<Value> = table
        .entries
        .iter()
        .map(|e| {
            let [xr, xi] = parts(&e.node);
            match &e.result {
                Ok(v) => {
                    let [rr, ri] = parts(&v.value);
                    rows.push(vec![
                        e.k.to_string(),
                        xr,
                        xi,
                        rr,
                        ri,
                        v.status.to_string(),
                        format!("{:e}", v.tail_estimate),
                    ]);
                    json!({
                        "k": e.k,
                        "x": complex(&e.node),
                        "r": complex(&v.value),
                        "status": v.status.as_str(),
                        "tail_estimate": real(v.tail_estimate),
                        "terms_used": v.terms_used,
                        "precision_used": v.precision_used,
                    })
                }
                Err(err) => {
                    rows.push(vec![
                        e.k.to_string(),
                        xr,
                        xi,
                        String::new(),
                        String::new(),
                        err.kind().to_string(),
                        String::new(),
                    ]);
                    json!({
                        "k": e.k,
                        "x": complex(&e.node),
                        "r": null,
                        "status": "error",
                        "error": { "kind": err.kind(), "message": err.to_string() },
                    })
                }
            }
        })
        .collect();
    let body = json!({
        "family": family_json(&sel),
        "method": m.name(),
        "precision": a.family.precision,
        "tolerance": a.family.tol,
        "count": table.count,
        "finite_family": table.finite_family,
        "sum_check": complex(&table.sum_check),
        "missing_mass": complex(&table.missing_mass),
        "entries": entries,
    });
    let header = ["k", "re_x", "im_x", "re_r", "im_r", "status", "tail_estimate"];
    Ok(Outcome {
        body: render(&a.family.output, body, &header, rows)?,
        exit: if table.all_ok() { 0 } else { EXIT_PARTIAL },
    })
}

pub fn verify(a: &VerifyArgs) -> CmdResult {
    let sel = select(&a.family)?;
    let opts = options(&a.family);
    let m = method(&a.method)?;
    let ctx = WeightContext::new(sel.params.clone());
    let finite = ctx.finite_size();
    let k = a.k.or(finite).unwrap_or(100);
    if finite.is_none() && k < a.nmax + 1 {
        return Err(config_error("K", format!("must be at least nmax + 1 = {}", a.nmax + 1)));
    }
    let rep = gram_matrix_with(&ctx, m, a.nmax, k, &opts)?;
    let passed = rep.passed(a.family.tol);
    let gram: Vec<Value> = rep
        .gram
        .iter()
        .map(|row| Value::Array(row.iter().map(complex).collect()))
        .collect();
    let mut rows = Vec::new();
    for (n, row) in rep.gram.iter().enumerate() {
        for (mm, v) in row.iter().enumerate() {
            let [re, im] = parts(v);
            rows.push(vec![n.to_string(), mm.to_string(), re, im]);
        }
    }
    let body = json!({
        "family": family_json(&sel),
        "method": m.name(),
        "precision": a.family.precision,
        "tolerance": a.family.tol,
        "nmax": rep.nmax,
        "K": rep.truncation,
        "gram": gram,
        "offdiag_max": real(rep.offdiag_max),
        "diag_rel_err": rep.diag_rel_err.iter().map(|&e| real(e)).collect::<Vec<_>>(),
        "tail_allowance": real(rep.tail_allowance),
        "norms": rep.norms.iter().map(complex).collect::<Vec<_>>(),
        "passed": passed,
    });
    Ok(Outcome {
        body: render(&a.family.output, body, &["n", "m", "re", "im"], rows)?,
        exit: if passed { 0 } else { EXIT_PARTIAL },
    })
}

pub fn recurrence(a: &RecurrenceArgs) -> CmdResult {
    let sel = select(&a.family)?;
    let fam = Family::new(sel.params.clone());
    let rc = RecurrenceCoeffs::compute(&fam, a.n)?;
    let norms = rc.norms();
    let closed: Option<Vec<BigComplex>> = sel.spec.as_ref().and_then(|s| {
        (1..=a.n)
            .map(|n| s.alpha_closed_form(n))
            .collect::<Result<Vec<_>, _>>()
            .ok()
    });
    let mut rows = Vec::new();
    let table: Vec<Value> = (0..=a.n)
        .map(|n| {
            let alpha = (n >= 1).then(|| &rc.alpha[n - 1]);
            let [br, bi] = parts(&rc.beta[n]);
            let [ar, ai] = alpha.map(parts).unwrap_or_default();
            let [kr, ki] = parts(&norms[n]);
            rows.push(vec![n.to_string(), br, bi, ar, ai, kr, ki]);
            let mut row = json!({
                "n": n,
                "beta": complex(&rc.beta[n]),
                "alpha": alpha.map(complex),
                "K": complex(&norms[n]),
            });
            if let (Some(c), true) = (&closed, n >= 1) {
                row["alpha_closed_form"] = complex(&c[n - 1]);
            }
            row
        })
        .collect();
    let body = json!({
        "family": family_json(&sel),
        "precision": a.family.precision,
        "finite_size": rc.finite_size,
        "rows": table,
    });
    let header = ["n", "re_beta", "im_beta", "re_alpha", "im_alpha", "re_K", "im_K"];
    Ok(Outcome {
        body: render(&a.family.output, body, &header, rows)?,
        exit: 0,
    })
}

pub fn moments(a: &MomentsArgs) -> CmdResult {
    let sel = select(&a.family)?;
    let opts = options(&a.family);
    let ctx = WeightContext::new(sel.params.clone());
    let count = a.count.max(1);
    let ms = (0..count)
        .map(|k| ctx.family.moment(k))
        .collect::<Result<Vec<_>, _>>()?;
    let residuals = match a.k {
        Some(kk) => Some(moment_recovery(&ctx, count - 1, kk, &opts)?),
        None => None,
    };
    let mut rows = Vec::new();
    let entries: Vec<Value> = ms
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let [re, im] = parts(m);
            let mut row = vec![k.to_string(), re, im];
            let mut v = json!({ "k": k, "m": complex(m) });
            if let Some(r) = &residuals {
                row.push(format!("{:e}", r[k]));
                v["residual"] = real(r[k]);
            }
            rows.push(row);
            v
        })
        .collect();
    let body = json!({
        "family": family_json(&sel),
        "precision": a.family.precision,
        "K": a.k,
        "moments": entries,
    });
    let mut header = vec!["k", "re_m", "im_m"];
    if residuals.is_some() {
        header.push("residual");
    }
    Ok(Outcome {
        body: render(&a.family.output, body, &header, rows)?,
        exit: 0,
    })
}

pub fn validate_cmd(a: &ValidateArgs) -> CmdResult {
    let sel = select(&a.family)?;
    let rep = validate(&sel.params, a.nmax);
    let ok = rep.is_ok();
    let body = json!({
        "family": family_json(&sel),
        "case": rep.case_id.number(),
        "horizon": rep.horizon,
        "h_distinct_ok": rep.h_distinct_ok,
        "x_distinct_ok": rep.x_distinct_ok,
        "g_nonzero_up_to": rep.g_nonzero_up_to,
        "terminating_at": rep.terminating_at,
        "alpha_nonzero_up_to": rep.alpha_nonzero_up_to,
        "messages": rep.messages,
        "ok": ok,
    });
    let opt = |v: Option<usize>| v.map(|n| n.to_string()).unwrap_or_default();
    let rows = vec![vec![
        rep.case_id.number().to_string(),
        rep.horizon.to_string(),
        rep.h_distinct_ok.to_string(),
        rep.x_distinct_ok.to_string(),
        rep.g_nonzero_up_to.to_string(),
        opt(rep.terminating_at),
        rep.alpha_nonzero_up_to.to_string(),
        ok.to_string(),
    ]];
    let header = [
        "case",
        "horizon",
        "h_distinct_ok",
        "x_distinct_ok",
        "g_nonzero_up_to",
        "terminating_at",
        "alpha_nonzero_up_to",
        "ok",
    ];
    Ok(Outcome {
        body: render(&a.family.output, body, &header, rows)?,
        exit: if ok { 0 } else { EXIT_PARTIAL },
    })
}

pub fn families(o: &OutputArgs) -> CmdResult {
    let mut rows = Vec::new();
    let list: Vec<Value> = registry()
        .iter()
        .map(|p| {
            rows.push(vec![
                p.name().cli_name().to_string(),
                p.required_args().join(" "),
                p.optional_args().join(" "),
                p.summary().to_string(),
            ]);
            let mut v = BTreeMap::new();
            v.insert("name", json!(p.name().cli_name()));
            v.insert("required_args", json!(p.required_args()));
            v.insert("optional_args", json!(p.optional_args()));
            v.insert("summary", json!(p.summary()));
            json!(v)
        })
        .collect();
    Ok(Outcome {
        body: render(
            o,
            json!({ "families": list }),
            &["name", "required_args", "optional_args", "summary"],
            rows,
        )?,
        exit: 0,
    })
}
