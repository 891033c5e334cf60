//! `cfconv`: convergence analysis for continued fractions written with
//! subtracted partial quotients, from the command line.
//!
//! Everything lives behind [`run`] so tests can drive the argument parsing
//! and dispatch in-process; `main` only forwards `std::env::args`.
//!
//! Exit codes: 0 for a definite verdict (or any successfully printed
//! output), 2 when the classifier had to answer Unknown, 1 for usage,
//! parse, and I/O errors.

use std::fs;

use clap::error::ErrorKind;
use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};
use num::Signed;

use cfconv_core::phi::TRACE_ROW_CAP;
use cfconv_core::{
    classify_with, convergents, path_from_stream, path_to_json, render_svg, CoefficientStream,
    PhiState, PhiTrace, ReportedValue, Status, StepBudget, TraceStop, Viewport,
    DEFAULT_SCAN_HORIZON, DEFAULT_VALUE_DIGITS,
};

pub mod builtins;
pub mod parse;
pub mod report;

use parse::CfExpression;

/// Parses `argv` and runs the selected subcommand, returning the process
/// exit code instead of exiting so callers keep control.
pub fn run(argv: impl IntoIterator<Item = String>) -> i32 {
    let matches = match command().try_get_matches_from(argv) {
        Ok(matches) => matches,
        Err(err) if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{err}");
            return 0;
        }
        Err(err) => {
            eprint!("{err}");
            return 1;
        }
    };
    match matches.subcommand() {
        Some(("analyze", sub)) => analyze(sub),
        Some(("convergents", sub)) => convergents_cmd(sub),
        Some(("phi", sub)) => phi_cmd(sub),
        Some(("farey", sub)) => farey_cmd(sub),
        Some(("value", sub)) => value_cmd(sub),
        _ => unreachable!("subcommands are required"),
    }
}

fn command() -> Command {
    let expr = Arg::new("expr")
        .required(true)
        .value_name("EXPR")
        .help("\"[3,0,-3;(3,-3)]\", \"reg:[2,3,4]\", or @example1..@example4");
    let count = |what: &'static str| {
        Arg::new("count")
            .short('n')
            .required(true)
            .value_parser(value_parser!(usize))
            .value_name("N")
            .help(what)
    };
    let json = Arg::new("json")
        .long("json")
        .action(ArgAction::SetTrue)
        .help("emit a JSON document instead of text");

    Command::new("cfconv")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Convergence analysis for continued fractions with subtracted quotients")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(
            Command::new("analyze")
                .about("Classify convergence and report the verdict")
                .arg(expr.clone())
                .arg(
                    Arg::new("max-steps")
                        .long("max-steps")
                        .value_parser(value_parser!(usize))
                        .value_name("N")
                        .help("rewrite-step allowance before answering Unknown"),
                )
                .arg(
                    Arg::new("access-budget")
                        .long("access-budget")
                        .value_parser(value_parser!(u64))
                        .value_name("M")
                        .help("generator coefficient-access allowance"),
                )
                .arg(json.clone())
                .arg(
                    Arg::new("text")
                        .long("text")
                        .action(ArgAction::SetTrue)
                        .conflicts_with("json")
                        .help("plain text output (the default)"),
                ),
        )
        .subcommand(
            Command::new("convergents")
                .about("Print the first N convergents")
                .arg(expr.clone())
                .arg(count("how many convergents"))
                .arg(json.clone()),
        )
        .subcommand(
            Command::new("phi")
                .about("Show N singularization steps: coefficient rows, p, q")
                .arg(expr.clone())
                .arg(count("how many rewrite steps")),
        )
        .subcommand(
            Command::new("farey")
                .about("Trace the convergents across the Farey graph")
                .arg(expr.clone())
                .arg(count("path depth in convergents"))
                .arg(
                    Arg::new("svg")
                        .long("svg")
                        .value_name("FILE")
                        .help("render the walk as an SVG into FILE"),
                )
                .arg(
                    Arg::new("json")
                        .long("json")
                        .value_name("FILE")
                        .help("write the vertex list as JSON into FILE"),
                )
                .arg(
                    Arg::new("labels")
                        .long("labels")
                        .action(ArgAction::SetTrue)
                        .help("label SVG vertices with their fractions"),
                ),
        )
        .subcommand(
            Command::new("value")
                .about("Print the limit: exact value or certified enclosure")
                .arg(expr)
                .arg(
                    Arg::new("digits")
                        .long("digits")
                        .value_parser(value_parser!(u32))
                        .value_name("D")
                        .help("outward-rounded decimal digits for enclosures"),
                ),
        )
}

/// Prints an error the way the active mode wants it: a JSON envelope when
/// the caller asked for JSON, an `error:` line otherwise. Always exits 1.
fn fail(json: bool, message: &str, position: Option<usize>) -> i32 {
    if json {
        eprintln!("{}", report::error_document(message, position));
    } else {
        eprintln!("error: {message}");
    }
    1
}

fn parse_expr(sub: &ArgMatches, json: bool) -> Result<CfExpression, i32> {
    let text = sub.get_one::<String>("expr").expect("expr is required");
    parse::parse_cf(text).map_err(|err| {
        if json {
            eprintln!(
                "{}",
                report::error_document(&err.message, Some(err.position))
            );
        } else {
            eprintln!("error: {err}");
        }
        1
    })
}

/// Finite streams cap how deep convergents can go; everything else keeps
/// the requested depth.
fn usable_depth(stream: &CoefficientStream, wanted: usize) -> usize {
    match stream.len() {
        Some(len) => wanted.min(len),
        None => wanted,
    }
}

fn analyze(sub: &ArgMatches) -> i32 {
    let json = sub.get_flag("json");
    let expr = match parse_expr(sub, json) {
        Ok(expr) => expr,
        Err(code) => return code,
    };
    let mut budget = StepBudget::default();
    if let Some(&steps) = sub.get_one::<usize>("max-steps") {
        budget.max_steps = steps;
    }
    if let Some(&accesses) = sub.get_one::<u64>("access-budget") {
        budget.access_budget = accesses;
    }
    let verdict = classify_with(expr.stream(), &budget);
    if json {
        println!(
            "{}",
            report::classification_document(&expr, &verdict, DEFAULT_VALUE_DIGITS)
        );
    } else {
        print!(
            "{}",
            report::classification_text(&expr, &verdict, DEFAULT_VALUE_DIGITS)
        );
    }
    if verdict.status == Status::Unknown {
        2
    } else {
        0
    }
}

fn convergents_cmd(sub: &ArgMatches) -> i32 {
    let json = sub.get_flag("json");
    let expr = match parse_expr(sub, json) {
        Ok(expr) => expr,
        Err(code) => return code,
    };
    let depth = usable_depth(expr.stream(), *sub.get_one::<usize>("count").expect("required"));
    let seq = match convergents(expr.stream(), depth) {
        Ok(seq) => seq,
        Err(err) => return fail(json, &err.to_string(), None),
    };
    if json {
        let entries: Vec<serde_json::Value> = seq
            .values()
            .iter()
            .map(|v| {
                serde_json::json!({
                    "num": v.numerator().to_string(),
                    "den": v.denominator().to_string(),
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::json!({
                "schema_version": report::SCHEMA_VERSION,
                "input": expr.canonical_text(),
                "convergents": entries,
            })
        );
    } else {
        for value in seq.values() {
            println!("{value}");
        }
    }
    0
}

fn phi_row_line(step: usize, p: Option<usize>, q: Option<&num::BigInt>, row: &[num::BigInt]) {
    let p = match p {
        Some(p) => p.to_string(),
        None => "inf".to_string(),
    };
    let q = match q {
        Some(q) => format!(" q={q}"),
        None => String::new(),
    };
    let row = row
        .iter()
        .map(|b| b.to_string())
        .collect::<Vec<_>>()
        .join(",");
    println!("Phi^{step}: p={p}{q} row=[{row}]");
}

fn phi_cmd(sub: &ArgMatches) -> i32 {
    let expr = match parse_expr(sub, false) {
        Ok(expr) => expr,
        Err(code) => return code,
    };
    let steps = *sub.get_one::<usize>("count").expect("required");

    let mut initial = PhiState::new(expr.stream().clone());
    let p0 = match initial.first_bad_position(DEFAULT_SCAN_HORIZON) {
        Ok(p) => p,
        Err(err) => return fail(false, &err.to_string(), None),
    };
    // Bad positions start at 1, so `p - 1` never underflows and the scan
    // has already materialized it.
    let q0 = p0.map(|p| {
        initial
            .peek(p - 1)
            .expect("scan materialized everything below p")
            .abs()
    });
    let row_cap = p0.map_or(TRACE_ROW_CAP, |p| p.min(TRACE_ROW_CAP) + 1);
    phi_row_line(0, p0, q0.as_ref(), &initial.head_snapshot(row_cap));

    let trace = PhiTrace::run(initial, steps, false);
    for record in trace.records() {
        phi_row_line(record.step, record.p, record.q.as_ref(), &record.row);
    }
    if let Some(fixed_at) = trace.fixed_at() {
        if matches!(expr.stream(), CoefficientStream::Generator(_)) {
            println!("no bad coefficient within the scan horizon from Phi^{fixed_at} on");
        } else {
            println!("fixed from Phi^{fixed_at} on");
        }
    }
    if trace.stop() == TraceStop::BudgetExhausted {
        eprintln!(
            "stopped: generator access budget exhausted after {} steps",
            trace.records().len()
        );
        return 2;
    }
    0
}

fn farey_cmd(sub: &ArgMatches) -> i32 {
    let json = sub.contains_id("json");
    let expr = match parse_expr(sub, json) {
        Ok(expr) => expr,
        Err(code) => return code,
    };
    let depth = usable_depth(expr.stream(), *sub.get_one::<usize>("count").expect("required"));
    let path = match path_from_stream(expr.stream(), depth) {
        Ok(path) => path,
        Err(err) => return fail(json, &err.to_string(), None),
    };

    let svg_file = sub.get_one::<String>("svg");
    let json_file = sub.get_one::<String>("json");
    if let Some(file) = svg_file {
        let rendered = Viewport::fit(&path, 800, 400)
            .map(|v| v.with_labels(sub.get_flag("labels")))
            .and_then(|viewport| render_svg(&path, &viewport));
        let svg = match rendered {
            Ok(svg) => svg,
            Err(err) => return fail(json, &err.to_string(), None),
        };
        if let Err(err) = fs::write(file, svg) {
            return fail(json, &format!("cannot write {file}: {err}"), None);
        }
    }
    if let Some(file) = json_file {
        if let Err(err) = fs::write(file, path_to_json(&path)) {
            return fail(json, &format!("cannot write {file}: {err}"), None);
        }
    }
    if svg_file.is_none() && json_file.is_none() {
        println!("{}", path_to_json(&path));
    }
    0
}

fn value_cmd(sub: &ArgMatches) -> i32 {
    let expr = match parse_expr(sub, false) {
        Ok(expr) => expr,
        Err(code) => return code,
    };
    let digits = sub
        .get_one::<u32>("digits")
        .copied()
        .unwrap_or(DEFAULT_VALUE_DIGITS);
    let verdict = classify_with(expr.stream(), &StepBudget::default());
    match (verdict.status, &verdict.value) {
        (Status::Unknown, _) => {
            eprintln!("unknown: stopped at {}", report::end_slug(verdict.trace.end));
            2
        }
        (Status::Diverges, _) => {
            println!("diverges");
            0
        }
        (_, Some(ReportedValue::Exact(value))) => {
            println!("{value}");
            0
        }
        (_, Some(ReportedValue::Enclosure(enclosure))) => {
            println!("{}", enclosure.decimal(digits));
            0
        }
        (_, None) => fail(false, "internal: converging verdict without a value", None),
    }
}
