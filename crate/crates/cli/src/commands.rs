use std::fs;

use polybridge_core::exact::{parse_rational, parse_unipoly};
use polybridge_core::green::{bvp_solve, bvp_verify, green_function, GreenReport};
use polybridge_core::index_sets::{
    dual_set, enumerate as enumerate_sets, i_to_j, is_admissible, j_to_i, parse_index_list,
    Enumeration, IndexSetI, IndexSetJ, SetFilter,
};
use polybridge_core::prediction::{predict as predict_model, verify_prediction};
use polybridge_core::sim::{
    compare_covariance, make_bridge_paths, simulate_xn, terminal_residual, SimConfig,
};
use polybridge_core::{BridgeModel, Error, Result};
use serde_json::json;

use crate::{
    BridgeArgs, EnumerateArgs, Filter, GreenArgs, MapArgs, OutputFormat, PredictArgs, SimulateArgs,
    VerifyArgs,
};

pub const SEED_ENV: &str = "POLYBRIDGE_SEED";
const Z_CAP: f64 = 4.0;
const ABS_CAP: f64 = 0.01;
const TERMINAL_CAP: f64 = 1e-10;

/// Rendered text plus whether every check it performed held.
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, passed: true }
    }
}

fn parse_j(n: usize, text: &str) -> Result<IndexSetJ> {
    IndexSetJ::new(n, &parse_index_list(text)?)
}

fn parse_i(n: usize, text: &str) -> Result<IndexSetI> {
    IndexSetI::new(n, &parse_index_list(text)?)
}

fn latex_list(elems: &[usize]) -> String {
    let items: Vec<String> = elems.iter().map(usize::to_string).collect();
    format!("\\{{{}\\}}", items.join(","))
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("JSON value serializes")
}

pub fn map(args: &MapArgs, format: OutputFormat) -> Result<Outcome> {
    let (j, i) = match (&args.j, &args.i) {
        (Some(j), None) => {
            let j = parse_j(args.n, j)?;
            let i = j_to_i(&j);
            (Some(j), i)
        }
        (None, Some(i)) => {
            let i = parse_i(args.n, i)?;
            (i_to_j(&i).ok(), i)
        }
        _ => {
            return Err(Error::InvalidConfig(
                "give exactly one of --j and --i".into(),
            ))
        }
    };
    let dual = dual_set(&i);
    let admissible = is_admissible(&i);
    let text = match format {
        OutputFormat::Json => pretty(&json!({
            "n": args.n,
            "J": j.as_ref().map(|j| j.elems().to_vec()),
            "I": i.elems(),
            "bridge": j.is_some(),
            "admissible": admissible,
            "dual": dual.elems(),
        })),
        OutputFormat::Plain => {
            let j_line = j
                .as_ref()
                .map_or_else(|| "not a bridge".to_string(), ToString::to_string);
            [
                format!("n = {}", args.n),
                format!("J = {j_line}"),
                format!("I = {i}"),
                format!("admissible = {admissible}"),
                format!("dual = {dual}"),
            ]
            .join("\n")
        }
        OutputFormat::Latex => {
            let j_part = j.as_ref().map_or_else(
                || "\\text{not a bridge}".to_string(),
                |j| latex_list(j.elems()),
            );
            format!(
                "n = {},\\quad J = {},\\quad I = {},\\quad \\text{dual} = {}",
                args.n,
                j_part,
                latex_list(i.elems()),
                latex_list(dual.elems())
            )
        }
    };
    Ok(Outcome::ok(text))
}

pub fn green(args: &GreenArgs, format: OutputFormat) -> Result<Outcome> {
    let set = parse_i(args.n, &args.i)?;
    if args.report {
        let report = GreenReport::new(&set);
        let text = match format {
            OutputFormat::Plain => report.to_plain(),
            OutputFormat::Json => report.to_json(),
            OutputFormat::Latex => report.to_latex(),
        };
        return Ok(Outcome {
            text,
            passed: report.passed(),
        });
    }
    let g = green_function(&set);
    let text = match format {
        OutputFormat::Json => serde_json::to_string_pretty(&g).expect("Green function serializes"),
        OutputFormat::Plain => [
            format!("n = {}, I = {set}", args.n),
            format!("G(s,t) = {}    (s <= t)", g.piece.lower().to_plain()),
            format!("G(s,t) = {}    (s >= t)", g.piece.upper().to_plain()),
            format!("symmetric = {}", g.is_symmetric()),
            format!("admissible = {}", is_admissible(&set)),
        ]
        .join("\n"),
        OutputFormat::Latex => format!(
            "G_{{{}}}(s,t) = \\begin{{cases}} {} & s \\le t \\\\ {} & s \\ge t \\end{{cases}}",
            latex_list(set.elems()),
            g.piece.lower().to_latex(),
            g.piece.upper().to_latex()
        ),
    };
    Ok(Outcome::ok(text))
}

pub fn bridge(args: &BridgeArgs, format: OutputFormat) -> Result<Outcome> {
    let model = BridgeModel::new(&parse_j(args.n, &args.j)?);
    let text = match format {
        OutputFormat::Plain => model.to_plain(),
        OutputFormat::Json => model.to_json(),
        OutputFormat::Latex => model.to_latex(),
    };
    Ok(Outcome::ok(text))
}

pub fn predict(args: &PredictArgs, format: OutputFormat) -> Result<Outcome> {
    let j = parse_j(args.n, &args.j)?;
    let t0 = parse_rational(&args.t0)?;
    let model = predict_model(&j, &t0)?;
    let passed = verify_prediction(&model);
    let shown = if args.absolute {
        model.to_absolute()
    } else {
        model
    };
    let text = match format {
        OutputFormat::Plain => shown.to_plain(),
        OutputFormat::Json => shown.to_json(),
        OutputFormat::Latex => shown.to_latex(),
    };
    Ok(Outcome { text, passed })
}

fn seed_from_env(default: u64) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(value) => value.trim().parse().map_err(|_| {
            Error::InvalidConfig(format!("{SEED_ENV} is not an unsigned integer: {value:?}"))
        }),
        Err(_) => Ok(default),
    }
}

pub fn simulate(args: &SimulateArgs, format: OutputFormat) -> Result<Outcome> {
    let j = parse_j(args.n, &args.j)?;
    let seed = seed_from_env(args.seed)?;
    let free = IndexSetJ::empty(args.n)?;
    let config = SimConfig::new(free, args.steps, args.paths, seed).with_record_stride(args.stride);
    let ensemble = simulate_xn(&config)?;
    let bridge = make_bridge_paths(&ensemble, &j)?;
    let comparison = compare_covariance(&bridge, &j, args.grid_stride)?;
    let residual = terminal_residual(&bridge);
    let passed = comparison.passes(Z_CAP, ABS_CAP) && residual <= TERMINAL_CAP;
    if let Some(path) = &args.csv {
        fs::write(path, comparison.to_csv())
            .map_err(|e| Error::InvalidConfig(format!("cannot write {}: {e}", path.display())))?;
    }
    let verdict = if passed { "PASS" } else { "FAIL" };
    let text = match format {
        OutputFormat::Json => pretty(&json!({
            "n": args.n,
            "J": j.elems(),
            "seed": seed,
            "steps": args.steps,
            "terminal_residual": residual,
            "passed": passed,
            "comparison": serde_json::to_value(&comparison).expect("comparison serializes"),
        })),
        OutputFormat::Plain => format!(
            "n = {}, J = {j}, seed = {seed}, steps = {}\n{}\nmax terminal residual = {residual:.3e}\n{verdict}",
            args.n,
            args.steps,
            comparison.to_table()
        ),
        OutputFormat::Latex => format!(
            "\\begin{{tabular}}{{lrrrr}}\nJ & paths & $\\max|\\hat c - c|$ & $\\max z$ & result \\\\\n\\hline\n${}$ & {} & {:.2e} & {:.2} & {verdict} \\\\\n\\end{{tabular}}",
            latex_list(j.elems()),
            comparison.num_paths,
            comparison.max_abs_err,
            comparison.max_z_score
        ),
    };
    Ok(Outcome { text, passed })
}

pub fn verify(args: &VerifyArgs, format: OutputFormat) -> Result<Outcome> {
    let set = parse_i(args.n, &args.i)?;
    let u = parse_unipoly(&args.u)?;
    let v = bvp_solve(&set, &u);
    let report = bvp_verify(&v, &u, &set);
    let text = match format {
        OutputFormat::Json => pretty(&json!({
            "n": args.n,
            "I": set.elems(),
            "u": serde_json::to_value(&u).expect("polynomial serializes"),
            "v": serde_json::to_value(&v).expect("polynomial serializes"),
            "report": serde_json::to_value(&report).expect("report serializes"),
        })),
        OutputFormat::Plain => {
            let list = |values: &[polybridge_core::Rational]| {
                let items: Vec<String> = values.iter().map(ToString::to_string).collect();
                items.join(", ")
            };
            [
                format!("n = {}, I = {set}", args.n),
                format!("u(t) = {}", u.to_plain("t")),
                format!("v(t) = {}", v.to_plain("t")),
                format!("v^(2n) - (-1)^n u = {}", report.ode_residual.to_plain("t")),
                format!("v^(i)(0), i < n: {}", list(&report.bc0_values)),
                format!("v^(i)(1), i in I: {}", list(&report.bc1_values)),
                if report.passed { "PASS" } else { "FAIL" }.to_string(),
            ]
            .join("\n")
        }
        OutputFormat::Latex => format!("v(t) = {}", v.to_latex("t")),
    };
    Ok(Outcome {
        text,
        passed: report.passed,
    })
}

pub fn enumerate(args: &EnumerateArgs, format: OutputFormat) -> Result<Outcome> {
    let filter = match args.filter {
        Filter::All => SetFilter::All,
        Filter::Admissible => SetFilter::Admissible,
        Filter::Pairs => SetFilter::NonAdmissiblePairs,
    };
    let rows: Vec<(IndexSetI, Option<IndexSetI>)> = match enumerate_sets(args.n, filter)? {
        Enumeration::Sets(sets) => sets.into_iter().map(|s| (s, None)).collect(),
        Enumeration::Pairs(pairs) => pairs.into_iter().map(|(a, b)| (a, Some(b))).collect(),
    };
    let text = match format {
        OutputFormat::Json => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|(a, b)| match b {
                    Some(b) => json!([a.elems(), b.elems()]),
                    None => json!({
                        "I": a.elems(),
                        "J": i_to_j(a).ok().map(|j| j.elems().to_vec()),
                        "admissible": is_admissible(a),
                    }),
                })
                .collect();
            pretty(&json!({ "n": args.n, "count": rows.len(), "items": items }))
        }
        OutputFormat::Plain => {
            let mut lines: Vec<String> = rows
                .iter()
                .map(|(a, b)| match b {
                    Some(b) => format!("{a} <-> {b}"),
                    None => match i_to_j(a) {
                        Ok(j) => format!("{a}  J = {j}"),
                        Err(_) => a.to_string(),
                    },
                })
                .collect();
            lines.push(format!("count = {}", rows.len()));
            lines.join("\n")
        }
        OutputFormat::Latex => {
            let lines: Vec<String> = rows
                .iter()
                .map(|(a, b)| match b {
                    Some(b) => {
                        format!("{} & {} \\\\", latex_list(a.elems()), latex_list(b.elems()))
                    }
                    None => format!("{} \\\\", latex_list(a.elems())),
                })
                .collect();
            lines.join("\n")
        }
    };
    Ok(Outcome::ok(text))
}
