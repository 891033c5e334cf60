//! Output formatting: the JSON documents the CLI emits, their plain-text
//! counterparts, and a structural validator that doubles as the schema.

use serde_json::{json, Map, Value};

use cfconv_core::{
    CertificateKind, ClassificationReport, CycleCertificate, Enclosure, ExtendedRational,
    LiminfPosition, Mode, ReportedValue, Status, TraceEnd, TraceSummary,
};

use crate::parse::{CfExpression, Convention};

/// Bumped whenever a document's shape changes incompatibly.
pub const SCHEMA_VERSION: &str = "1";

pub fn status_slug(status: Status) -> &'static str {
    match status {
        Status::ConvergesRational => "converges-rational",
        Status::ConvergesIrrational => "converges-irrational",
        Status::ConvergesExtendedRational => "converges-extended-rational",
        Status::Diverges => "diverges",
        Status::Unknown => "unknown",
    }
}

pub fn mode_slug(mode: Mode) -> &'static str {
    match mode {
        Mode::Exact => "exact",
        Mode::Empirical => "empirical",
        Mode::FiniteInput => "finite-input",
    }
}

pub fn end_slug(end: TraceEnd) -> &'static str {
    match end {
        TraceEnd::Fixed => "fixed",
        TraceEnd::Certificate => "certificate",
        TraceEnd::Evidence => "evidence",
        TraceEnd::StepLimit => "step-limit",
        TraceEnd::AccessBudget => "access-budget",
        TraceEnd::StateGrowth => "state-growth",
    }
}

pub fn kind_slug(kind: CertificateKind) -> &'static str {
    match kind {
        CertificateKind::FixedPoint => "fixed-point",
        CertificateKind::ExactCycle => "exact-cycle",
        CertificateKind::ShiftCycle => "shift-cycle",
        CertificateKind::DriftCycle => "drift-cycle",
    }
}

fn convention_slug(convention: Convention) -> &'static str {
    match convention {
        Convention::Negative => "negative",
        Convention::Regular => "regular",
    }
}

/// `"inf"`, or `"num/den"` with the denominator always spelled out, so the
/// strings stay unambiguous and lexically stable (`1/1`, not `1`).
pub fn exact_string(value: &ExtendedRational) -> String {
    if value.is_infinite() {
        "inf".to_string()
    } else {
        format!("{}/{}", value.numerator(), value.denominator())
    }
}

fn p_liminf_json(p: Option<LiminfPosition>) -> Value {
    match p {
        None => Value::Null,
        Some(LiminfPosition::Finite(n)) => json!(n),
        Some(LiminfPosition::Infinite) => json!("infinite"),
    }
}

fn certificate_json(cert: &CycleCertificate) -> Value {
    json!({
        "kind": kind_slug(cert.kind),
        "n1": cert.n1,
        "n2": cert.n2,
        "drift_position": cert.drift_position,
        "drift_delta": cert.drift_delta.as_ref().map(|d| d.to_string()),
        "emitted_period": cert
            .emitted_period
            .as_ref()
            .map(|block| block.iter().map(|b| b.to_string()).collect::<Vec<_>>()),
    })
}

fn enclosure_json(enc: &Enclosure, digits: u32) -> Value {
    json!({
        "lo": exact_string(&enc.lo),
        "hi": exact_string(&enc.hi),
        "decimal": enc.decimal(digits),
    })
}

fn value_json(value: Option<&ReportedValue>, digits: u32) -> Value {
    match value {
        None => Value::Null,
        Some(ReportedValue::Exact(v)) => json!({ "exact": exact_string(v) }),
        Some(ReportedValue::Enclosure(enc)) => json!({ "enclosure": enclosure_json(enc, digits) }),
    }
}

fn trace_json(trace: &TraceSummary) -> Value {
    json!({
        "steps": trace.steps,
        "end": end_slug(trace.end),
        "p_tail": trace.p_tail,
        "q_tail": trace
            .q_tail
            .iter()
            .map(|q| q.as_ref().map(|b| b.to_string()))
            .collect::<Vec<_>>(),
        "stable_prefix": trace
            .stable_prefix
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>(),
    })
}

/// The full machine-readable verdict for `analyze --json`.
pub fn classification_document(
    expr: &CfExpression,
    report: &ClassificationReport,
    digits: u32,
) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "input": expr.canonical_text(),
        "convention": convention_slug(expr.convention()),
        "status": status_slug(report.status),
        "mode": mode_slug(report.mode),
        "p_liminf": p_liminf_json(report.p_liminf),
        "steps_used": report.steps_used,
        "certificate": report.certificate.as_ref().map(certificate_json).unwrap_or(Value::Null),
        "value": value_json(report.value.as_ref(), digits),
        "trace": trace_json(&report.trace),
    })
}

/// The human-readable verdict for `analyze` without `--json`.
pub fn classification_text(
    expr: &CfExpression,
    report: &ClassificationReport,
    digits: u32,
) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("input:    {}", expr.canonical_text()));
    line(format!("status:   {}", status_slug(report.status)));
    line(format!("mode:     {}", mode_slug(report.mode)));
    line(format!("steps:    {}", report.steps_used));
    match report.p_liminf {
        Some(LiminfPosition::Finite(n)) => line(format!("p-liminf: {n}")),
        Some(LiminfPosition::Infinite) => line("p-liminf: infinite".to_string()),
        None => {}
    }
    if let Some(cert) = &report.certificate {
        line(format!(
            "witness:  {} over steps {}..{}",
            kind_slug(cert.kind),
            cert.n1,
            cert.n2
        ));
    }
    match &report.value {
        Some(ReportedValue::Exact(v)) => line(format!("value:    {v}")),
        Some(ReportedValue::Enclosure(enc)) => {
            line(format!("value in: {}", enc.decimal(digits)));
        }
        None => {}
    }
    if report.status == Status::Unknown {
        line(format!("stopped:  {}", end_slug(report.trace.end)));
    }
    out
}

/// Machine-readable failure envelope, printed when a `--json` run errors.
pub fn error_document(message: &str, position: Option<usize>) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "error": { "message": message, "position": position },
    })
}

/// Checks that a value is one of the documents this CLI emits. The checks
/// are structural — key presence and JSON types — and are the published
/// description of the formats.
pub fn validate_document(doc: &Value) -> Result<(), String> {
    let obj = doc.as_object().ok_or("document is not a JSON object")?;
    if obj.contains_key("status") {
        validate_classification(obj)
    } else if obj.contains_key("convergents") {
        validate_convergents(obj)
    } else if obj.contains_key("vertices") {
        validate_path(obj)
    } else if obj.contains_key("error") {
        validate_error(obj)
    } else {
        Err("document has none of the known top-level keys".to_string())
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value, String> {
    obj.get(key).ok_or_else(|| format!("missing key '{key}'"))
}

fn expect_str<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a str, String> {
    field(obj, key)?
        .as_str()
        .ok_or_else(|| format!("'{key}' is not a string"))
}

fn expect_u64(obj: &Map<String, Value>, key: &str) -> Result<u64, String> {
    field(obj, key)?
        .as_u64()
        .ok_or_else(|| format!("'{key}' is not a nonnegative integer"))
}

fn expect_array<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a [Value], String> {
    field(obj, key)?
        .as_array()
        .map(Vec::as_slice)
        .ok_or_else(|| format!("'{key}' is not an array"))
}

fn expect_version(obj: &Map<String, Value>) -> Result<(), String> {
    if expect_str(obj, "schema_version")? == SCHEMA_VERSION {
        Ok(())
    } else {
        Err("unsupported schema_version".to_string())
    }
}

fn expect_slug(value: &str, allowed: &[&str], what: &str) -> Result<(), String> {
    if allowed.contains(&value) {
        Ok(())
    } else {
        Err(format!("'{value}' is not a known {what}"))
    }
}

/// Integer strings as the documents print them: optional minus, digits.
fn expect_int_string(value: &Value, what: &str) -> Result<(), String> {
    let s = value
        .as_str()
        .ok_or_else(|| format!("{what} is not a string"))?;
    let digits = s.strip_prefix('-').unwrap_or(s);
    if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
        Ok(())
    } else {
        Err(format!("{what} '{s}' is not an integer string"))
    }
}

fn expect_exact_string(value: &Value, what: &str) -> Result<(), String> {
    let s = value
        .as_str()
        .ok_or_else(|| format!("{what} is not a string"))?;
    if s == "inf" {
        return Ok(());
    }
    let (num, den) = s
        .split_once('/')
        .ok_or_else(|| format!("{what} '{s}' lacks a denominator"))?;
    expect_int_string(&json!(num), what)?;
    expect_int_string(&json!(den), what)
}

fn validate_classification(obj: &Map<String, Value>) -> Result<(), String> {
    expect_version(obj)?;
    expect_str(obj, "input")?;
    expect_slug(
        expect_str(obj, "convention")?,
        &["negative", "regular"],
        "convention",
    )?;
    let status = expect_str(obj, "status")?;
    expect_slug(
        status,
        &[
            "converges-rational",
            "converges-irrational",
            "converges-extended-rational",
            "diverges",
            "unknown",
        ],
        "status",
    )?;
    expect_slug(
        expect_str(obj, "mode")?,
        &["exact", "empirical", "finite-input"],
        "mode",
    )?;
    match field(obj, "p_liminf")? {
        Value::Null => {
            if status != "unknown" {
                return Err("p_liminf is null on a settled verdict".to_string());
            }
        }
        Value::Number(n) if n.is_u64() => {}
        Value::String(s) if s == "infinite" => {}
        other => return Err(format!("p_liminf has unexpected value {other}")),
    }
    expect_u64(obj, "steps_used")?;

    match field(obj, "certificate")? {
        Value::Null => {}
        Value::Object(cert) => {
            expect_slug(
                expect_str(cert, "kind")?,
                &["fixed-point", "exact-cycle", "shift-cycle", "drift-cycle"],
                "certificate kind",
            )?;
            expect_u64(cert, "n1")?;
            expect_u64(cert, "n2")?;
            match field(cert, "drift_delta")? {
                Value::Null => {}
                v => expect_int_string(v, "drift_delta")?,
            }
            match field(cert, "emitted_period")? {
                Value::Null => {}
                Value::Array(block) => {
                    for b in block {
                        expect_int_string(b, "emitted_period entry")?;
                    }
                }
                _ => return Err("emitted_period is neither null nor an array".to_string()),
            }
        }
        _ => return Err("certificate is neither null nor an object".to_string()),
    }

    match field(obj, "value")? {
        Value::Null => {}
        Value::Object(value) => match (value.get("exact"), value.get("enclosure")) {
            (Some(exact), None) => expect_exact_string(exact, "exact value")?,
            (None, Some(Value::Object(enc))) => {
                expect_exact_string(field(enc, "lo")?, "enclosure lo")?;
                expect_exact_string(field(enc, "hi")?, "enclosure hi")?;
                expect_str(enc, "decimal")?;
            }
            _ => return Err("value must hold exactly one of 'exact'/'enclosure'".to_string()),
        },
        _ => return Err("value is neither null nor an object".to_string()),
    }

    let trace = field(obj, "trace")?
        .as_object()
        .ok_or("'trace' is not an object")?;
    expect_u64(trace, "steps")?;
    expect_slug(
        expect_str(trace, "end")?,
        &[
            "fixed",
            "certificate",
            "evidence",
            "step-limit",
            "access-budget",
            "state-growth",
        ],
        "trace end",
    )?;
    for p in expect_array(trace, "p_tail")? {
        if !(p.is_null() || p.is_u64()) {
            return Err("p_tail entries must be numbers or null".to_string());
        }
    }
    for q in expect_array(trace, "q_tail")? {
        if !q.is_null() {
            expect_int_string(q, "q_tail entry")?;
        }
    }
    for b in expect_array(trace, "stable_prefix")? {
        expect_int_string(b, "stable_prefix entry")?;
    }
    Ok(())
}

fn validate_convergents(obj: &Map<String, Value>) -> Result<(), String> {
    expect_version(obj)?;
    expect_str(obj, "input")?;
    for entry in expect_array(obj, "convergents")? {
        let pair = entry.as_object().ok_or("convergent entry is not an object")?;
        expect_int_string(field(pair, "num")?, "convergent num")?;
        expect_int_string(field(pair, "den")?, "convergent den")?;
    }
    Ok(())
}

fn validate_path(obj: &Map<String, Value>) -> Result<(), String> {
    for entry in expect_array(obj, "vertices")? {
        let pair = entry.as_object().ok_or("vertex is not an object")?;
        expect_int_string(field(pair, "num")?, "vertex num")?;
        expect_int_string(field(pair, "den")?, "vertex den")?;
    }
    Ok(())
}

fn validate_error(obj: &Map<String, Value>) -> Result<(), String> {
    expect_version(obj)?;
    let err = field(obj, "error")?
        .as_object()
        .ok_or("'error' is not an object")?;
    expect_str(err, "message")?;
    match field(err, "position")? {
        Value::Null => Ok(()),
        v if v.is_u64() => Ok(()),
        _ => Err("'position' is neither null nor an integer".to_string()),
    }
}
