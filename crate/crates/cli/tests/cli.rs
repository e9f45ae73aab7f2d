use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str], stdin: Option<&[u8]>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_incparse"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut input = child.stdin.take().unwrap();
    input.write_all(stdin.unwrap_or_default()).unwrap();
    drop(input);
    child.wait_with_output().unwrap()
}

fn ok(args: &[&str], stdin: Option<&[u8]>) -> Vec<u8> {
    let out = run(args, stdin);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn round_trips_with_pos_stripping() {
    let f = fixture("ptb_sample.trees");
    let original = std::fs::read(&f).unwrap();
    let labels = ok(&["encode", "--strip-pos", "--mode", "relative", path(&f)], None);
    assert!(String::from_utf8_lossy(&labels).starts_with("The\tDT\t"));
    assert_eq!(ok(&["decode", "--mode", "relative", "-"], Some(&labels)), original);
    let log = ok(&["oracle", "--strip-pos", path(&f)], None);
    assert_eq!(ok(&["replay", "-"], Some(&log)), original);
}

#[test]
fn custom_join_character() {
    let tree = b"(TOP (S (NP a) (VP b)))\n";
    let labels = ok(&["encode", "--join", "^", "-"], Some(tree));
    assert!(String::from_utf8_lossy(&labels).contains("TOP^S"));
    assert_eq!(ok(&["decode", "--join", "^", "-"], Some(&labels)), tree);
}

#[test]
fn input_errors_exit_with_one() {
    let toy = fixture("toy.trees");
    for (args, input) in [
        (vec!["encode", "-"], &b"(S (NP a"[..]),
        (vec!["encode", "-"], b"(S+X (Y a) b)\n"),
        (vec!["decode", "-"], b"a\t_\tnot-a-label\n"),
        (vec!["replay", "-"], b"a b\tattach(tgt=_,prt=S)\n"),
        (vec!["replay", "-"], b"a b\tattach(tgt=_,prt=S) attach(tgt=4,prt=_)\n"),
        (vec!["decode", "/does/not/exist"], b""),
        (vec!["train", "--delay", "3", "-"], b"(S a b)\n"),
        (vec!["train", "-"], b""),
        (vec!["eval", "-", path(&toy)], b"(S a b)\n"),
    ] {
        let out = run(&args, Some(input));
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn training_is_seed_deterministic_and_models_are_checked() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("toy.trees");
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    for (out, seed) in [(&a, "3"), (&b, "3"), (&c, "4")] {
        ok(&["train", "--decoder", "sl", "--mode", "relative", "--epochs", "3", "--seed", seed, path(&f), "-o", path(out)], None);
    }
    let read = |p: &Path| std::fs::read(p).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));

    let text = String::from_utf8(read(&a)).unwrap();
    let bumped = dir.path().join("bumped");
    std::fs::write(&bumped, text.replacen("\"version\":1", "\"version\":9", 1)).unwrap();
    let out = run(&["parse", "--model", path(&bumped), "--from-trees", path(&f)], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("version 9"));
}

#[test]
fn parallel_parse_keeps_order() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("toy.trees");
    let model = dir.path().join("m");
    ok(&["train", "--decoder", "tb", "--epochs", "2", path(&f), "-o", path(&model)], None);
    let one = ok(&["--jobs", "1", "parse", "--model", path(&model), "--from-trees", path(&f)], None);
    let four = ok(&["--jobs", "4", "parse", "--model", path(&model), "--from-trees", path(&f)], None);
    assert_eq!(one, four);
    assert_eq!(one.iter().filter(|&&b| b == b'\n').count(), 60);

    // raw sentences, one per line
    let sentences = b"the dog saw a cat\nit runs\n";
    let trees = ok(&["parse", "--model", path(&model), "-"], Some(sentences));
    assert_eq!(String::from_utf8(trees).unwrap().lines().count(), 2);
}

#[test]
fn eval_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let gold = dir.path().join("gold");
    let pred = dir.path().join("pred");
    std::fs::write(&gold, "(TOP (S (NP-SBJ a) (ADVP b)))\n").unwrap();
    std::fs::write(&pred, "(TOP (S (NP a) (PRT b)))\n").unwrap();
    let prm = dir.path().join("p.prm");
    std::fs::write(&prm, "DELETE_LABEL TOP\nEQ_LABEL ADVP PRT\nMAX_ERROR 10\n").unwrap();

    let json = |args: &[&str]| -> serde_json::Value { serde_json::from_slice(&ok(args, None)).unwrap() };
    let plain = json(&["eval", "--json", path(&gold), path(&pred)]);
    assert!(plain["f1"].as_f64().unwrap() < 1.0);
    let out = run(&["eval", "--json", "--prm", path(&prm), path(&gold), path(&pred)], None);
    let with_prm: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(with_prm["f1"], 1.0);
    assert_eq!(with_prm["gold_total"], 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("MAX_ERROR"));
    let strict = json(&["eval", "--json", "--keep-functional", "--prm", path(&prm), path(&gold), path(&pred)]);
    assert!(strict["f1"].as_f64().unwrap() < 1.0);
    assert_eq!(strict["strip_functional"], false);
    let collins = json(&["eval", "--json", "--collins", path(&gold), path(&pred)]);
    assert_eq!(collins["f1"], 1.0);

    let table = String::from_utf8(ok(&["eval", path(&gold), path(&gold)], None)).unwrap();
    assert!(table.contains("F1             100.00"), "{table}");
}

#[test]
fn stats_table() {
    let out = String::from_utf8(ok(&["stats", "--top", "2", "-"], Some(b"(S (NP a b) (VP c (NP d)))\n"))).unwrap();
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("label") && lines[0].contains("NP") && lines[0].contains("VP"));
    assert!(lines[1].contains("1.50"));
    assert!(lines[2].contains("66.67"));
}

#[test]
fn audit_command() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m");
    ok(&["train", "--delay", "2", "--epochs", "2", path(&fixture("toy.trees")), "-o", path(&model)], None);
    let report = String::from_utf8(ok(&["audit", "--model", path(&model), "--pairs", "30"], None)).unwrap();
    assert!(report.starts_with("k 2 pairs 30 violations 0"), "{report}");
    let adv: serde_json::Value =
        serde_json::from_slice(&ok(&["audit", "--adversarial", "--pairs", "10", "--json"], None)).unwrap();
    assert_eq!(adv["violations"], 10);
}
