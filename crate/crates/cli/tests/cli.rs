use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

const TOY: &str = r#"{"id":"a","text":"A lightbulb makes light. The filament gets hot.","model":"m1"}
{"id":"b","text":"A lightbulb makes light. The glass keeps air out.","model":"m2"}
{"id":"c","text":"A lightbulb makes light for you. The filament glows.","model":"m1"}
{"id":"d","text":"However, it is important to note that bulbs get hot.","model":"m2"}
"#;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_mesoscope"));
    for var in ["MESOSCOPE_PORT", "MESOSCOPE_PDC_THRESHOLD", "MESOSCOPE_STOP_LIST", "MESOSCOPE_PALETTE"] {
        c.env_remove(var);
    }
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Two models, three creatures, three generations.
fn fig_corpus() -> String {
    let mut out = String::new();
    for model in ["m1", "m2"] {
        for creature in ["puppy", "kitten", "bunny"] {
            for g in 0..3 {
                out.push_str(&format!(
                    "{{\"id\":\"{model}-{creature}-{g}\",\"text\":\"Once upon a time a {creature} lived in a house. The {creature} liked naps number {g}. Model {model} ends here.\",\"model\":\"{model}\",\"vars\":{{\"creature\":\"{creature}\"}}}}\n"
                ));
            }
        }
    }
    out
}

#[test]
fn analyze_pdc_prints_groups() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "toy.jsonl", TOY);
    let o = run(&["analyze", "--input", input.to_str().unwrap(), "--feature", "pdc"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["feature"], "pdc");
    assert!(!v["result"]["groups"].as_array().unwrap().is_empty());
}

#[test]
fn analyze_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "toy.jsonl", TOY);
    for feature in ["exact_matches", "unique_words", "pdc"] {
        let a = run(&["analyze", "--input", input.to_str().unwrap(), "--feature", feature]);
        let b = run(&["analyze", "--input", input.to_str().unwrap(), "--feature", feature]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{feature}");
    }
}

#[test]
fn analyze_writes_out_file() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "toy.jsonl", TOY);
    let out = dir.path().join("em.json");
    let o = run(&[
        "analyze", "--input", input.to_str().unwrap(), "--feature", "exact_matches",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["result"][0]["key"], "a lightbulb makes light");
}

#[test]
fn unknown_feature_is_usage_error() {
    let o = run(&["analyze", "--input", "x.jsonl", "--feature", "sparkle"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"), "{}", stderr(&o));
}

#[test]
fn single_response_exact_matches_fails() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "one.jsonl", "{\"id\":\"a\",\"text\":\"Only me here.\"}\n");
    let o = run(&["analyze", "--input", input.to_str().unwrap(), "--feature", "exact_matches"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("need at least two responses"), "{}", stderr(&o));
}

#[test]
fn malformed_input_names_line() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "bad.jsonl", "{\"id\":\"a\",\"text\":\"x\"}\nnot json\n");
    let o = run(&["analyze", "--input", input.to_str().unwrap(), "--feature", "pdc"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn threshold_flag_is_echoed() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "toy.jsonl", TOY);
    let o = run(&[
        "analyze", "--input", input.to_str().unwrap(), "--feature", "pdc", "--pdc-threshold", "1.5",
    ]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["params"]["threshold"], 1.5);
    assert_eq!(v["params"]["text_weight"], 1.5);
}

#[test]
fn report_writes_every_view() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "fig.jsonl", &fig_corpus());
    let out = dir.path().join("report");
    let o = run(&[
        "report", "--input", input.to_str().unwrap(), "--rows", "creature", "--cols", "gen_index",
        "--fix", "model=m1", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in [
        "manifest.json", "corpus.json", "analysis/exact_matches.json", "analysis/unique_words.json",
        "analysis/pdc.json", "views/grid_none.json", "views/grid_exact_matches.json",
        "views/grid_unique_words.json", "views/grid_pdc.json", "views/interleaved.json",
        "views/linear.json",
    ] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["record_count"], 18);
    assert!(manifest["errors"].as_object().unwrap().is_empty());
    let grid: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("views/grid_pdc.json")).unwrap()).unwrap();
    assert_eq!(grid["row_values"], serde_json::json!(["puppy", "kitten", "bunny"]));
    assert_eq!(grid["col_values"], serde_json::json!(["0", "1", "2"]));
}

#[test]
fn report_without_fix_names_dimension() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "fig.jsonl", &fig_corpus());
    let out = dir.path().join("report");
    let o = run(&[
        "report", "--input", input.to_str().unwrap(), "--rows", "creature", "--cols", "gen_index",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`model`"), "{}", stderr(&o));
}

#[test]
fn report_on_empty_input() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "empty.jsonl", "");
    let out = dir.path().join("report");
    let o = run(&[
        "report", "--input", input.to_str().unwrap(), "--rows", "model", "--cols", "gen_index",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no records"), "{}", stderr(&o));
}

#[test]
fn serve_on_busy_port_exits_1() {
    let held = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = held.local_addr().unwrap().port().to_string();
    let o = run(&["serve", "--port", &port]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cannot listen"), "{}", stderr(&o));
}

#[test]
fn serve_open_prints_url() {
    let port = {
        let probe = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        probe.local_addr().unwrap().port()
    };
    let mut child = bin()
        .args(["serve", "--open", "--port", &port.to_string()])
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap())
        .read_line(&mut line)
        .unwrap();
    assert_eq!(line.trim(), format!("http://127.0.0.1:{port}/"));
    let health = std::net::TcpStream::connect(("127.0.0.1", port));
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(health.is_ok());
}

#[test]
fn stopwords_lists_version_and_words() {
    let o = run(&["stopwords"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# mesoscope stop list v1"));
    assert!(lines.any(|l| l == "the"));
}
