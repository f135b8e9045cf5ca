//! Export of operator matrices, rational functions and weights, plus the
//! readers used to check that an export parses back to the same values.

use qhahn_core::brf::{brf_u, weight_vector, Method};
use qhahn_core::operators::{build_operator, Basis, Operator};
use qhahn_core::{format_scalar, parse_scalar, validate_params, ExactScalar, QParams};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::report::{exact, exact_list};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum What {
    Matrix,
    Brf,
    Weight,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// What an export contains, independent of its encoding.
#[derive(Clone, Debug, PartialEq)]
pub enum Exported {
    Matrix {
        op: Operator,
        basis: Basis,
        rows: Vec<Vec<ExactScalar>>,
    },
    /// `U_n` sampled on the grid.
    Brf {
        n: usize,
        values: Vec<ExactScalar>,
    },
    Weight {
        values: Vec<ExactScalar>,
    },
}

/// Parses `"q,A,B,N"`.
pub fn parse_params(s: &str) -> CliResult<QParams> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [q, a, b, n] = parts[..] else {
        return Err(CliError::config(format!("--params expects q,A,B,N; got {s:?}")));
    };
    let n: usize = n.parse().map_err(|_| CliError::config(format!("N = {n:?} is not a grid size")))?;
    let f = |v: &str| parse_scalar(v).map_err(|_| CliError::config(format!("{v:?} is not an exact rational")));
    Ok(QParams::new(f(q)?, f(a)?, f(b)?, n)?)
}

pub fn parse_operator(s: &str) -> CliResult<Operator> {
    Operator::ALL
        .into_iter()
        .find(|o| o.name() == s)
        .ok_or_else(|| CliError::config(format!("--which {s:?}: expected X, Y, Z or V")))
}

fn parse_basis(s: &str) -> CliResult<Basis> {
    [Basis::Point, Basis::Phi]
        .into_iter()
        .find(|b| b.name() == s)
        .ok_or_else(|| CliError::Format(format!("unknown basis {s:?}")))
}

/// Computes the requested object; `which` is an operator name for
/// matrices, an index `n` for `brf`, and ignored for the weight.
pub fn compute(what: What, which: Option<&str>, basis: Basis, p: &QParams) -> CliResult<Exported> {
    let v = validate_params(p, p.n());
    if !v.is_valid() {
        return Err(qhahn_core::Error::InvalidParams(v.reasons.join("; ")).into());
    }
    let which = || which.ok_or_else(|| CliError::config("--which is required for this export"));
    Ok(match what {
        What::Matrix => {
            let op = parse_operator(which()?)?;
            let m = build_operator(op, basis, p)?.matrix;
            Exported::Matrix { op, basis, rows: (0..m.rows()).map(|i| m.row(i).to_vec()).collect() }
        }
        What::Brf => {
            let w = which()?;
            let n: usize = w.parse().map_err(|_| CliError::config(format!("--which {w:?}: expected an index n")))?;
            if n > p.n() {
                return Err(qhahn_core::Error::OutOfRange { index: n, max: p.n() }.into());
            }
            Exported::Brf { n, values: brf_u(n, p, Method::Recurrence)?.0 }
        }
        What::Weight => Exported::Weight { values: weight_vector(p)?.w.0 },
    })
}

fn params_json(p: &QParams) -> Value {
    json!({ "q": exact(p.q()), "A": exact(p.a()), "B": exact(p.b()), "N": p.n() })
}

pub fn to_json(e: &Exported, p: &QParams) -> String {
    let v = match e {
        Exported::Matrix { op, basis, rows } => json!({
            "kind": "matrix",
            "operator": op.name(),
            "basis": basis.name(),
            "params": params_json(p),
            "shape": [rows.len(), rows.first().map_or(0, Vec::len)],
            "rows": rows.iter().map(|r| exact_list(r)).collect::<Vec<_>>(),
        }),
        Exported::Brf { n, values } => json!({
            "kind": "brf",
            "n": n,
            "params": params_json(p),
            "values": exact_list(values),
        }),
        Exported::Weight { values } => json!({
            "kind": "weight",
            "params": params_json(p),
            "values": exact_list(values),
        }),
    };
    let mut s = serde_json::to_string_pretty(&v).expect("export serializes");
    s.push('\n');
    s
}

/// Matrices are written row by row without a header; vectors as `x,value`
/// rows under a header. Exact values are always quoted.
pub fn to_csv(e: &Exported) -> String {
    let mut w = csv::WriterBuilder::new().quote_style(csv::QuoteStyle::NonNumeric).from_writer(Vec::new());
    let io = "writing to memory";
    match e {
        Exported::Matrix { rows, .. } => {
            for r in rows {
                w.write_record(r.iter().map(format_scalar)).expect(io);
            }
        }
        Exported::Brf { values, .. } | Exported::Weight { values } => {
            w.write_record(["x", "value"]).expect(io);
            for (x, v) in values.iter().enumerate() {
                w.write_record([x.to_string(), format_scalar(v)]).expect(io);
            }
        }
    }
    String::from_utf8(w.into_inner().expect(io)).expect("csv is utf-8")
}

pub fn render(e: &Exported, p: &QParams, format: Format) -> String {
    match format {
        Format::Json => to_json(e, p),
        Format::Csv => to_csv(e),
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Format(msg.into())
}

fn scalars(v: &Value) -> CliResult<Vec<ExactScalar>> {
    v.as_array()
        .ok_or_else(|| bad("expected an array"))?
        .iter()
        .map(|s| {
            let s = s.as_str().ok_or_else(|| bad("exact values must be strings"))?;
            parse_scalar(s).map_err(|_| bad(format!("{s:?} is not num/den")))
        })
        .collect()
}

fn field<'a>(v: &'a Value, k: &str) -> CliResult<&'a Value> {
    v.get(k).ok_or_else(|| bad(format!("missing key {k:?}")))
}

fn text<'a>(v: &'a Value, k: &str) -> CliResult<&'a str> {
    field(v, k)?.as_str().ok_or_else(|| bad(format!("{k:?} must be a string")))
}

/// Reads back a JSON export.
pub fn read_json(s: &str) -> CliResult<Exported> {
    let v: Value = serde_json::from_str(s).map_err(|e| bad(e.to_string()))?;
    match text(&v, "kind")? {
        "matrix" => {
            let op = parse_operator(text(&v, "operator")?).map_err(|e| bad(e.to_string()))?;
            let basis = parse_basis(text(&v, "basis")?)?;
            let rows = field(&v, "rows")?
                .as_array()
                .ok_or_else(|| bad("rows must be an array"))?
                .iter()
                .map(scalars)
                .collect::<CliResult<Vec<_>>>()?;
            Ok(Exported::Matrix { op, basis, rows })
        }
        "brf" => {
            let n = field(&v, "n")?.as_u64().ok_or_else(|| bad("n must be an index"))? as usize;
            Ok(Exported::Brf { n, values: scalars(field(&v, "values")?)? })
        }
        "weight" => Ok(Exported::Weight { values: scalars(field(&v, "values")?)? }),
        k => Err(bad(format!("unknown kind {k:?}"))),
    }
}

/// Reads back the exact cells of a CSV export: every row of a matrix, or
/// the value column of a vector.
pub fn read_csv(s: &str, what: What) -> CliResult<Vec<Vec<ExactScalar>>> {
    let mut r = csv::ReaderBuilder::new().has_headers(what != What::Matrix).from_reader(s.as_bytes());
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let cells = if what == What::Matrix { rec.iter().collect::<Vec<_>>() } else { rec.iter().skip(1).collect() };
        out.push(
            cells
                .into_iter()
                .map(|c| parse_scalar(c).map_err(|_| bad(format!("{c:?} is not num/den"))))
                .collect::<CliResult<Vec<_>>>()?,
        );
    }
    Ok(out)
}
