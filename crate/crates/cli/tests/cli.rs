//! End-to-end checks of the command line: the expression grammar round
//! trips, every JSON-emitting subcommand produces documents the published
//! validator accepts, and exit codes follow the contract (0 definite,
//! 2 Unknown, 1 usage/parse errors).
//!
//! Grammar fuzzing runs in-process against the library; everything
//! involving exit codes or stdout/stderr framing drives the real binary.

use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cfconv_cli::parse::parse_cf;
use cfconv_cli::report::validate_document;

fn seeded(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xcf_c0_17 ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Runs the installed test binary; returns (exit code, stdout, stderr).
fn cfconv(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cfconv"))
        .args(args)
        .output()
        .expect("the cfconv binary runs");
    (
        out.status.code().expect("no signal death"),
        String::from_utf8(out.stdout).expect("stdout is UTF-8"),
        String::from_utf8(out.stderr).expect("stderr is UTF-8"),
    )
}

/// A mixed bag of inputs exercising every stream kind, both conventions,
/// and every verdict the classifier can reach.
const CORPUS: &[&str] = &[
    "@example1",
    "@example2",
    "@example3",
    "@example4",
    "[7]",
    "[5,3,4]",
    "[3,0,-3;(3,-3)]",
    "[2;(2)]",
    "[-2;(-2)]",
    "[5;(4)]",
    "[1;(1)]",
    "[4;(0,3)]",
    "reg:[1;(-1,1)]",
    "reg:[2,3,4]",
];

fn random_token_text(rng: &mut ChaCha8Rng) -> String {
    let mut tokens: Vec<String> = Vec::new();
    if rng.gen_bool(0.1) {
        tokens.push(format!("@example{}", rng.gen_range(1..=4)));
    } else {
        if rng.gen_bool(0.33) {
            tokens.push("reg:".to_string());
        }
        let int = |rng: &mut ChaCha8Rng| {
            let n: i64 = rng.gen_range(-99..=99);
            if n >= 0 && rng.gen_bool(0.1) {
                format!("+{n}")
            } else {
                n.to_string()
            }
        };
        tokens.push("[".to_string());
        let head_len = rng.gen_range(1..=8);
        for i in 0..head_len {
            if i > 0 {
                tokens.push(",".to_string());
            }
            tokens.push(int(rng));
        }
        if rng.gen_bool(0.5) {
            tokens.push(";".to_string());
            tokens.push("(".to_string());
            let period_len = rng.gen_range(1..=6);
            for i in 0..period_len {
                if i > 0 {
                    tokens.push(",".to_string());
                }
                tokens.push(int(rng));
            }
            tokens.push(")".to_string());
        }
        tokens.push("]".to_string());
    }

    let mut text = String::new();
    let pad = |text: &mut String, rng: &mut ChaCha8Rng| {
        for _ in 0..rng.gen_range(0..=2) {
            text.push(if rng.gen_bool(0.2) { '\t' } else { ' ' });
        }
    };
    pad(&mut text, rng);
    for token in tokens {
        text.push_str(&token);
        pad(&mut text, rng);
    }
    text
}

#[test]
fn random_expressions_round_trip_through_the_printer() {
    let mut rng = seeded(1);
    for round in 0..1000 {
        let text = random_token_text(&mut rng);
        let parsed = parse_cf(&text).unwrap_or_else(|e| panic!("round {round}: {text:?}: {e}"));
        let printed = parsed.canonical_text();
        let reparsed = parse_cf(&printed)
            .unwrap_or_else(|e| panic!("round {round}: printed {printed:?}: {e}"));
        assert_eq!(
            reparsed.stream(),
            parsed.stream(),
            "round {round}: {text:?} printed as {printed:?}"
        );
        assert_eq!(
            reparsed.canonical_text(),
            printed,
            "round {round}: printing is not a fixed point"
        );
    }
}

#[test]
fn json_documents_validate_for_every_subcommand_and_corpus_input() {
    for input in CORPUS {
        let (code, stdout, stderr) = cfconv(&["analyze", input, "--json"]);
        assert_eq!(code, 0, "analyze {input}: {stderr}");
        let doc: serde_json::Value = serde_json::from_str(&stdout)
            .unwrap_or_else(|e| panic!("analyze {input} printed invalid JSON: {e}"));
        validate_document(&doc).unwrap_or_else(|e| panic!("analyze {input}: {e}"));

        let (code, stdout, stderr) = cfconv(&["convergents", input, "-n", "8", "--json"]);
        assert_eq!(code, 0, "convergents {input}: {stderr}");
        let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
        validate_document(&doc).unwrap_or_else(|e| panic!("convergents {input}: {e}"));

        let (code, stdout, stderr) = cfconv(&["farey", input, "-n", "8"]);
        assert_eq!(code, 0, "farey {input}: {stderr}");
        let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
        validate_document(&doc).unwrap_or_else(|e| panic!("farey {input}: {e}"));
    }
}

#[test]
fn parse_failures_are_machine_readable_under_json() {
    let (code, stdout, stderr) = cfconv(&["analyze", "[1,,2]", "--json"]);
    assert_eq!(code, 1);
    assert!(stdout.is_empty());
    let doc: serde_json::Value = serde_json::from_str(&stderr).expect("stderr is a JSON document");
    validate_document(&doc).unwrap();
    assert_eq!(doc["error"]["position"], 3);

    let (code, _, stderr) = cfconv(&["analyze", "[1,,2]"]);
    assert_eq!(code, 1);
    assert_eq!(stderr, "error: parse error at byte 3: expected an integer\n");
}

#[test]
fn exit_codes_follow_the_contract() {
    // Definite verdicts, including divergence, exit 0.
    assert_eq!(cfconv(&["analyze", "[2;(2)]"]).0, 0);
    assert_eq!(cfconv(&["analyze", "[1;(1)]"]).0, 0);
    assert_eq!(cfconv(&["value", "[1;(1)]"]).0, 0);

    // An exhausted budget answers Unknown and exits 2.
    let (code, stdout, _) = cfconv(&["analyze", "@example2", "--max-steps", "3"]);
    assert_eq!(code, 2);
    assert!(stdout.contains("status:   unknown"), "{stdout}");
    assert!(stdout.contains("stopped:  step-limit"), "{stdout}");

    // Usage and parse problems exit 1.
    assert_eq!(cfconv(&["analyze", "gibberish"]).0, 1);
    assert_eq!(cfconv(&["analyze"]).0, 1);
    assert_eq!(cfconv(&["frobnicate", "[2]"]).0, 1);
    assert_eq!(cfconv(&[]).0, 1);
    assert_eq!(cfconv(&["convergents", "[2;(2)]", "-n", "x"]).0, 1);

    // Help and version are successes and land on stdout.
    let (code, stdout, _) = cfconv(&["--help"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("analyze"));
    assert_eq!(cfconv(&["analyze", "--help"]).0, 0);
    assert_eq!(cfconv(&["--version"]).0, 0);
}

#[test]
fn convergents_print_one_value_per_line_and_clamp_to_finite_ends() {
    let (code, stdout, _) = cfconv(&["convergents", "reg:[1;(-1,1)]", "-n", "9"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines, ["1", "0", "∞", "1", "0", "∞", "1", "0", "∞"]);

    // Nine convergents requested, three coefficients available.
    let (code, stdout, _) = cfconv(&["convergents", "[3,0,-3]", "-n", "9"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().count(), 3);
}

#[test]
fn phi_prints_the_initial_row_and_stops_at_fixed_states() {
    let (code, stdout, _) = cfconv(&["phi", "@example2", "-n", "3"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "Phi^0: p=2 q=2 row=[1,2,1]");
    assert_eq!(lines[1], "Phi^1: p=1 q=1 row=[1,1]");
    assert_eq!(lines[2], "Phi^2: p=1 q=0 row=[0,1]");
    assert_eq!(lines[3], "Phi^3: p=1 q=1 row=[-1,0]");

    let (code, stdout, _) = cfconv(&["phi", "[5,3,1,4]", "-n", "10"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("Phi^1: p=inf row=[5,2,3]"), "{stdout}");
    assert!(stdout.ends_with("fixed from Phi^1 on\n"), "{stdout}");
}

#[test]
fn value_prints_exact_limits_enclosures_and_divergence() {
    let (_, stdout, _) = cfconv(&["value", "[2;(2)]"]);
    assert_eq!(stdout, "1\n");

    let (_, stdout, _) = cfconv(&["value", "[4;(0,3)]"]);
    assert_eq!(stdout, "∞\n");

    let (_, stdout, _) = cfconv(&["value", "[1;(1)]"]);
    assert_eq!(stdout, "diverges\n");

    // 2 + sqrt(3) to six outward-rounded digits.
    let (_, stdout, _) = cfconv(&["value", "[5;(4)]", "--digits", "6"]);
    assert_eq!(stdout, "[4.732050, 4.732051]\n");
}

#[test]
fn farey_writes_svg_and_json_files() {
    let dir = std::env::temp_dir().join(format!("cfconv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let svg_path = dir.join("walk.svg");
    let json_path = dir.join("walk.json");

    let (code, stdout, stderr) = cfconv(&[
        "farey",
        "[5,3,4;(2,7)]",
        "-n",
        "12",
        "--svg",
        svg_path.to_str().unwrap(),
        "--json",
        json_path.to_str().unwrap(),
        "--labels",
    ]);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.is_empty(), "files requested, stdout used: {stdout}");

    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"), "not an SVG: {}", &svg[..40.min(svg.len())]);
    assert!(svg.contains("<text"), "labels were requested");

    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    validate_document(&doc).unwrap();
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 13);

    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn analyze_reports_certificates_in_both_formats() {
    let (code, stdout, _) = cfconv(&["analyze", "[1;(1)]", "--json"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["status"], "diverges");
    assert_eq!(doc["mode"], "exact");
    assert_eq!(doc["certificate"]["kind"], "exact-cycle");
    assert_eq!(doc["value"], serde_json::Value::Null);

    let (_, stdout, _) = cfconv(&["analyze", "[1;(1)]"]);
    assert!(stdout.contains("witness:  exact-cycle"), "{stdout}");
}
