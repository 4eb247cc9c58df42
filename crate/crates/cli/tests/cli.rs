//! End-to-end tests of the `pary` binary: pinned example outputs, exit
//! codes, format selection, schema conformance, CSV round-trips and cache
//! behavior.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use pary_cli::{csv, schema};

fn pary() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pary"));
    // Keep tests hermetic regardless of the ambient environment.
    cmd.env_remove("PARY_CACHE_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    pary().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn exit_of(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Runs with `--format json`, returning (document, exit code).
fn run_json(args: &[&str]) -> (Value, i32) {
    let mut full = args.to_vec();
    full.push("--format");
    full.push("json");
    let out = run(&full);
    let doc = serde_json::from_str(&stdout_of(&out)).expect("JSON output");
    (doc, exit_of(&out))
}

fn schema_for(command: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../schemas")
        .join(format!("{command}.schema.json"));
    serde_json::from_str(&std::fs::read_to_string(path).expect("schema file"))
        .expect("schema parses")
}

fn assert_valid(doc: &Value, command: &str) {
    if let Err(msg) = schema::validate(doc, &schema_for(command)) {
        panic!("{command} document violates its schema: {msg}\n{doc:#}");
    }
}

// ---------------------------------------------------------------------------
// walsh
// ---------------------------------------------------------------------------

#[test]
fn walsh_summary_of_the_quintic_lists_the_three_values() {
    let out = run(&[
        "walsh", "--field", "3^3", "--func", "Tr(2*x - x^5)", "--summary", "--format", "text",
    ]);
    assert_eq!(exit_of(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("9 \u{00d7}6"), "{text}");
    assert!(text.contains("0 \u{00d7}18"), "{text}");
    assert!(text.contains("-9 \u{00d7}3"), "{text}");
    assert!(text.contains("parseval: ok"), "{text}");
}

#[test]
fn walsh_json_validates_and_runs_deterministically() {
    let args = ["walsh", "--field", "3^3", "--func", "Tr(2*x - x^5)", "--format", "json"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(exit_of(&first), 0);
    assert_eq!(first.stdout, second.stdout, "output must be byte-identical across runs");

    let doc: Value = serde_json::from_str(&stdout_of(&first)).unwrap();
    assert_valid(&doc, "walsh");
    assert_eq!(doc["transform"], "fast");
    assert_eq!(doc["spectrum"].as_array().unwrap().len(), 27);
    assert_eq!(doc["values"], Value::Null);
}

#[test]
fn walsh_defaults_to_json_when_piped() {
    // No --format flag: stdout is a pipe here, so JSON must come out.
    let out = run(&["walsh", "--field", "3^2", "--func", "Tr(x^2)"]);
    assert_eq!(exit_of(&out), 0);
    let doc: Value = serde_json::from_str(&stdout_of(&out)).expect("json by default when piped");
    assert_valid(&doc, "walsh");
}

#[test]
fn walsh_summary_json_carries_the_value_multiset() {
    let (doc, exit) =
        run_json(&["walsh", "--field", "3^3", "--func", "Tr(2*x - x^5)", "--summary"]);
    assert_eq!(exit, 0);
    assert_valid(&doc, "walsh");
    assert_eq!(doc["spectrum"], Value::Null);
    let values = doc["values"].as_array().unwrap();
    assert_eq!(values.len(), 3);
    let total: u64 = values.iter().map(|v| v["count"].as_u64().unwrap()).sum();
    assert_eq!(total, 27);
}

#[test]
fn walsh_of_the_zero_function_is_the_delta_spectrum() {
    let (doc, exit) = run_json(&["walsh", "--field", "3^1", "--func", "Tr(0*x)"]);
    assert_eq!(exit, 0);
    let spectrum = doc["spectrum"].as_array().unwrap();
    assert_eq!(spectrum.len(), 3);
    // W[0] = q = 3 (coefficients −3, −3 on the ζ, ζ² basis), W[β≠0] = 0.
    assert_eq!(spectrum[0]["value"]["coeffs"], serde_json::json!([-3, -3]));
    assert_eq!(spectrum[1]["value"]["coeffs"], serde_json::json!([0, 0]));
    assert_eq!(spectrum[2]["value"]["coeffs"], serde_json::json!([0, 0]));
}

#[test]
fn walsh_csv_round_trips_through_the_loader() {
    let out = run(&["walsh", "--field", "3^2", "--func", "Tr(x^2)", "--format", "csv"]);
    assert_eq!(exit_of(&out), 0);
    let rows = csv::parse_walsh(&stdout_of(&out)).expect("loader accepts emitted CSV");
    assert_eq!(rows.len(), 9);
    assert_eq!(rows.iter().map(|(b, _)| *b).collect::<Vec<_>>(), (0..9).collect::<Vec<_>>());

    // The same coefficients must appear in the JSON document.
    let (doc, _) = run_json(&["walsh", "--field", "3^2", "--func", "Tr(x^2)"]);
    for (beta, coeffs) in rows {
        let json_coeffs = doc["spectrum"][beta as usize]["value"]["coeffs"].as_array().unwrap();
        let as_strings: Vec<String> = json_coeffs
            .iter()
            .map(|c| match c {
                Value::Number(n) => n.to_string(),
                Value::String(s) => s.clone(),
                other => panic!("unexpected coefficient {other}"),
            })
            .collect();
        assert_eq!(coeffs, as_strings, "beta = {beta}");
    }
}

// ---------------------------------------------------------------------------
// scheme
// ---------------------------------------------------------------------------

#[test]
fn scheme_rejects_the_quintic_with_the_size_comparison() {
    let out = run(&[
        "scheme", "--field", "3^3", "--func", "Tr(2*x - x^5)", "--format", "text",
    ]);
    assert_eq!(exit_of(&out), 1, "negative verdict exits 1");
    let text = stdout_of(&out);
    assert!(text.contains("V-set size 5 \u{2260} |I| = 3"), "{text}");
    assert!(text.contains("verdict: not a scheme"), "{text}");
}

#[test]
fn scheme_verifies_the_two_class_example() {
    let (doc, exit) =
        run_json(&["scheme", "--field", "3^4", "--func", "Tr(x^16)", "--verify"]);
    assert_eq!(exit, 0);
    assert_valid(&doc, "scheme");
    assert_eq!(doc["report"]["class_count"], 2);
    assert_eq!(doc["report"]["is_scheme"], true);
    assert_ne!(doc["bruteforce"], Value::Null);
    assert!(doc["bruteforce"]["intersection_numbers"].is_array());
    let sizes: Vec<u64> = doc["classes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["size"].as_u64().unwrap())
        .collect();
    assert_eq!(sizes, vec![1, 16, 64]);
}

#[test]
fn scheme_rejects_equal_sizes_without_symmetry() {
    // Tr(x) on F_27 has |I| = |V-set| = 3, but its level sets are not
    // closed under negation; the verdict must stay negative and agree with
    // the definitional check.
    let out = run(&[
        "scheme", "--field", "3^3", "--func", "Tr(x)", "--verify", "--format", "text",
    ]);
    assert_eq!(exit_of(&out), 1);
    let text = stdout_of(&out);
    assert!(text.contains("|I| = |V-set| = 3"), "{text}");
    assert!(text.contains("not symmetric"), "{text}");
}

// ---------------------------------------------------------------------------
// bent
// ---------------------------------------------------------------------------

#[test]
fn bent_profiles_the_regular_quadratic() {
    let (doc, exit) = run_json(&["bent", "--field", "3^2", "--func", "Tr(x^2)"]);
    assert_eq!(exit, 0);
    assert_valid(&doc, "bent");
    let profile = &doc["profile"];
    assert_eq!(profile["is_bent"], true);
    assert_eq!(profile["weakly_regular"], true);
    assert_eq!(profile["epsilon"], -1);
    assert_eq!(profile["unit"], "+1");
    assert_eq!(profile["regular"], true);
    assert!(profile["mu"].as_array().unwrap().iter().all(|m| m == -1));
    for check in doc["level_sums"].as_array().unwrap() {
        assert_eq!(check["pass"], true, "{check}");
    }
}

#[test]
fn bent_rejects_a_linear_function() {
    let (doc, exit) = run_json(&["bent", "--field", "3^2", "--func", "Tr(x)"]);
    assert_eq!(exit, 1);
    assert_valid(&doc, "bent");
    assert_eq!(doc["profile"]["is_bent"], false);
}

#[test]
fn bent_reads_the_table_file_witness() {
    // A frozen bent function that is *not* weakly regular, supplied as a
    // value table rather than an expression.
    let table = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/testdata/non_weakly_regular_bent_f27.table");
    let table = table.to_str().unwrap();
    let (doc, exit) = run_json(&["bent", "--field", "3^3", "--table-file", table]);
    assert_eq!(exit, 0);
    assert_valid(&doc, "bent");
    assert_eq!(doc["profile"]["is_bent"], true);
    assert_eq!(doc["profile"]["weakly_regular"], false);
    assert_eq!(doc["function"]["kind"], "table");

    // Its level partition is not a scheme, and both routes must agree.
    let out = run(&["scheme", "--field", "3^3", "--table-file", table, "--verify"]);
    assert_eq!(exit_of(&out), 1);
}

#[test]
fn bent_csv_lists_mu_and_g_per_point() {
    let out = run(&["bent", "--field", "3^2", "--func", "Tr(x^2)", "--format", "csv"]);
    assert_eq!(exit_of(&out), 0);
    let rows = csv::parse_bent(&stdout_of(&out)).expect("loader accepts emitted CSV");
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|&(_, mu, g)| mu == -1 && g < 3));
    let digits: String = rows.iter().map(|(_, _, g)| g.to_string()).collect();
    let (doc, _) = run_json(&["bent", "--field", "3^2", "--func", "Tr(x^2)"]);
    assert_eq!(digits, doc["profile"]["g"].as_str().unwrap());
}

// ---------------------------------------------------------------------------
// code
// ---------------------------------------------------------------------------

#[test]
fn code_table_check_matches_on_the_two_weight_example() {
    let out = run(&[
        "code", "--field", "3^4", "--func", "Tr(x^16)", "--level", "2", "--table-check", "1",
        "--format", "text",
    ]);
    assert_eq!(exit_of(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("code: [64,4] over F_3"), "{text}");
    assert!(text.contains("42:64, 48:16"), "{text}");
    assert!(text.contains("verdict: MATCH"), "{text}");

    let (doc, exit) = run_json(&[
        "code", "--field", "3^4", "--func", "Tr(x^16)", "--level", "2", "--table-check", "1",
    ]);
    assert_eq!(exit, 0);
    assert_valid(&doc, "code");
    assert_eq!(doc["code"]["n"], 64);
    assert_eq!(doc["code"]["k"], 4);
    assert_eq!(doc["code"]["weights"]["42"], 64);
    assert_eq!(doc["code"]["weights"]["48"], 16);
    assert_eq!(doc["code"]["two_weight"], true);
    assert_eq!(doc["table_check"]["all_match"], true);
}

#[test]
fn code_table_check_reports_the_level_zero_mismatch() {
    // The level-0 closed form predicts weights that are off by a constant;
    // the comparison must say so and exit with the negative verdict.
    let out = run(&[
        "code", "--field", "2^6", "--func", "Tr(x^7)", "--level", "0", "--star",
        "--table-check", "3", "--format", "text",
    ]);
    assert_eq!(exit_of(&out), 1);
    let text = stdout_of(&out);
    assert!(text.contains("verdict: MISMATCH"), "{text}");

    let (doc, exit) = run_json(&[
        "code", "--field", "2^6", "--func", "Tr(x^7)", "--level", "0", "--star",
        "--table-check", "3",
    ]);
    assert_eq!(exit, 1);
    assert_valid(&doc, "code");
    assert_eq!(doc["table_check"]["all_match"], false);
}

#[test]
fn code_table_check_needs_a_monomial_and_the_matching_level() {
    let out = run(&[
        "code", "--field", "3^4", "--func", "Tr(x^16 + x)", "--level", "2", "--table-check", "1",
    ]);
    assert_eq!(exit_of(&out), 2);

    let out = run(&[
        "code", "--field", "3^4", "--func", "Tr(x^16)", "--level", "1", "--table-check", "1",
    ]);
    assert_eq!(exit_of(&out), 2, "table 1 describes the level-2 code here");

    let out = run(&[
        "code", "--field", "3^4", "--func", "Tr(x^16)", "--level", "2", "--table-check", "9",
    ]);
    assert_eq!(exit_of(&out), 2, "clap rejects out-of-range table numbers");
}

#[test]
fn code_level_set_containing_zero_is_an_input_error() {
    let out = run(&["code", "--field", "3^3", "--func", "Tr(x)", "--level", "0"]);
    assert_eq!(exit_of(&out), 2);
}

#[test]
fn code_csv_frequencies_sum_to_the_code_size() {
    let out = run(&[
        "code", "--field", "3^4", "--func", "Tr(x^16)", "--level", "2", "--format", "csv",
    ]);
    assert_eq!(exit_of(&out), 0);
    let rows = csv::parse_u64_pairs(&stdout_of(&out), ("weight", "frequency")).unwrap();
    let total: u64 = rows.iter().map(|(_, n)| n.parse::<u64>().unwrap()).sum();
    assert_eq!(total, 81, "one row per codeword weight, frequencies sum to p^k");
}

// ---------------------------------------------------------------------------
// family
// ---------------------------------------------------------------------------

#[test]
fn family_predicts_the_two_class_prime_power_example() {
    let (doc, exit) = run_json(&["family", "--kind", "p46", "--p", "3", "--r", "7", "--m", "2"]);
    assert_eq!(exit, 0);
    assert_valid(&doc, "family");
    assert_eq!(doc["spec"]["kind"], "full-order-prime-power");
    assert_eq!(doc["spec"]["class_count"], 2);
    assert_eq!(doc["spec"]["materializable"], false);
    assert_eq!(doc["verified"], Value::Null);

    let out = run(&["family", "--kind", "p46", "--p", "3", "--r", "7", "--m", "2",
        "--format", "text"]);
    let text = stdout_of(&out);
    assert!(text.contains("predicted classes: 2"), "{text}");
    assert!(text.contains("materializable: no"), "{text}");
}

#[test]
fn family_predicts_the_six_class_product_image() {
    let (doc, exit) = run_json(&[
        "family", "--kind", "product", "--p", "101", "--p1", "3", "--p2", "11",
        "--m", "2", "--n", "2",
    ]);
    assert_eq!(exit, 0);
    assert_valid(&doc, "family");
    assert_eq!(doc["spec"]["class_count"], 6);
    let keys: Vec<&str> = doc["spec"]["image"].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, vec!["0", "27", "37", "43", "68", "91"]);
}

#[test]
fn family_verify_runs_end_to_end_when_materializable() {
    let (doc, exit) = run_json(&[
        "family", "--kind", "full-order", "--p", "3", "--r", "5", "--m", "1", "--verify",
    ]);
    assert_eq!(exit, 0);
    assert_valid(&doc, "family");
    assert_eq!(doc["verified"]["is_scheme"], true);
    assert_eq!(doc["verified"]["class_count"], 2);
}

#[test]
fn family_verify_refuses_unbuildable_fields() {
    let out = run(&["family", "--kind", "p46", "--p", "3", "--r", "7", "--m", "2", "--verify"]);
    assert_eq!(exit_of(&out), 3, "q = 3^42 cannot be materialized");
}

#[test]
fn family_flag_mismatches_are_input_errors() {
    let out = run(&["family", "--kind", "product", "--p", "101", "--r", "3", "--m", "2"]);
    assert_eq!(exit_of(&out), 2);
    let out = run(&["family", "--kind", "p46", "--p", "3", "--p1", "7", "--m", "2"]);
    assert_eq!(exit_of(&out), 2);
    let out = run(&["family", "--kind", "mystery", "--p", "3", "--r", "7", "--m", "2"]);
    assert_eq!(exit_of(&out), 2);
}

#[test]
fn family_csv_is_the_predicted_image() {
    let out = run(&[
        "family", "--kind", "full-order", "--p", "3", "--r", "5", "--m", "1", "--format", "csv",
    ]);
    assert_eq!(exit_of(&out), 0);
    let rows = csv::parse_u64_pairs(&stdout_of(&out), ("value", "frequency")).unwrap();
    let total: u64 = rows.iter().map(|(_, n)| n.parse::<u64>().unwrap()).sum();
    assert_eq!(total, 80, "frequencies cover F_q*");
}

// ---------------------------------------------------------------------------
// budgets, errors and the cache
// ---------------------------------------------------------------------------

#[test]
fn max_q_gates_field_construction() {
    let out = run(&["walsh", "--field", "3^10", "--func", "Tr(x^2)", "--max-q", "1000"]);
    assert_eq!(exit_of(&out), 3);
    // The default budget admits 3^10 and the factored transform handles it.
    let (doc, exit) = run_json(&["walsh", "--field", "3^10", "--func", "Tr(x^2)", "--summary"]);
    assert_eq!(exit, 0);
    assert_eq!(doc["transform"], "fast");
}

#[test]
fn naive_transform_refuses_large_fields() {
    let out = run(&["walsh", "--field", "3^10", "--func", "Tr(x^2)", "--naive"]);
    assert_eq!(exit_of(&out), 3);
}

#[test]
fn malformed_inputs_exit_two() {
    assert_eq!(exit_of(&run(&["walsh", "--field", "3^3", "--func", "Tr(x"])), 2);
    assert_eq!(exit_of(&run(&["walsh", "--field", "9^2", "--func", "Tr(x)"])), 2);
    assert_eq!(exit_of(&run(&["walsh", "--field", "3^3"])), 2, "a function source is required");
    assert_eq!(exit_of(&run(&["walsh", "--field", "3^3", "--func", "Tr(x)", "--naive", "--fast"])), 2);
    assert_eq!(exit_of(&run(&["scheme", "--field", "3^2", "--func", "Tr(x^2 + 1)"])), 2, "f(0) ≠ 0");
}

#[test]
fn cache_stores_loads_and_respects_the_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let cache_a = dir.path().join("a");
    let cache_b = dir.path().join("b");
    let args = ["walsh", "--field", "3^3", "--func", "Tr(2*x - x^5)", "--format", "json"];

    // First run computes and stores; second run loads.
    let first = pary()
        .args(args)
        .arg("--cache-dir")
        .arg(&cache_a)
        .output()
        .unwrap();
    assert_eq!(first.status.code(), Some(0));
    let stored: Vec<PathBuf> = walsh_files(&cache_a);
    assert_eq!(stored.len(), 1, "one spectrum stored");

    let second = pary()
        .args(args)
        .arg("--cache-dir")
        .arg(&cache_a)
        .output()
        .unwrap();
    let doc1: Value = serde_json::from_slice(&first.stdout).unwrap();
    let doc2: Value = serde_json::from_slice(&second.stdout).unwrap();
    assert_eq!(doc1["transform"], "fast");
    assert_eq!(doc2["transform"], "cached");
    assert_eq!(doc1["spectrum"], doc2["spectrum"], "cached spectrum is identical");

    // PARY_CACHE_DIR wins over --cache-dir.
    let third = pary()
        .args(args)
        .arg("--cache-dir")
        .arg(&cache_a)
        .env("PARY_CACHE_DIR", &cache_b)
        .output()
        .unwrap();
    assert_eq!(third.status.code(), Some(0));
    assert_eq!(walsh_files(&cache_b).len(), 1, "env-selected cache receives the file");
}

fn walsh_files(dir: &Path) -> Vec<PathBuf> {
    std::fs::read_dir(dir)
        .map(|entries| {
            entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|ext| ext == "walsh"))
                .collect()
        })
        .unwrap_or_default()
}

#[test]
fn corrupt_cache_entries_are_internal_defects() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["walsh", "--field", "3^2", "--func", "Tr(x^2)", "--format", "json"];
    let first = pary().args(args).arg("--cache-dir").arg(dir.path()).output().unwrap();
    assert_eq!(first.status.code(), Some(0));
    let file = walsh_files(dir.path()).pop().expect("stored spectrum");
    std::fs::write(&file, b"garbage").unwrap();

    let second = pary().args(args).arg("--cache-dir").arg(dir.path()).output().unwrap();
    assert_eq!(second.status.code(), Some(4), "corrupt cache exits 4");
}

#[test]
fn held_writer_lock_skips_the_store_but_not_the_answer() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("writer.lock"), b"").unwrap();
    let out = pary()
        .args(["walsh", "--field", "3^2", "--func", "Tr(x^2)", "--format", "json"])
        .arg("--cache-dir")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "the spectrum is still computed");
    assert!(walsh_files(dir.path()).is_empty(), "no write while another writer holds the lock");
}

// ---------------------------------------------------------------------------
// schema checker sanity
// ---------------------------------------------------------------------------

#[test]
fn schema_validation_rejects_a_tampered_document() {
    let (mut doc, _) = run_json(&["walsh", "--field", "3^2", "--func", "Tr(x^2)"]);
    assert_valid(&doc, "walsh");
    doc["command"] = Value::String("scheme".to_string());
    assert!(schema::validate(&doc, &schema_for("walsh")).is_err());
}
