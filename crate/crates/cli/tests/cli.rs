use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn ctr(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctr"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_recognize_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let corpus = fixture("toy_corpus.tsv");
    ok(&ctr(&["build-od", "--corpus", s(&corpus), "--model-dir", "m"], d));
    assert!(d.join("m/od/manifest.tsv").exists());
    ok(&ctr(
        &[
            "build-ld",
            "--corpus",
            s(&corpus),
            "--model-dir",
            "m",
            "--ld",
            "unigram",
        ],
        d,
    ));
    let noisy = fixture("toy_noisy.txt");
    let out = ok(&ctr(
        &[
            "recognize",
            "--model-dir",
            "m",
            "--input",
            s(&noisy),
            "--output",
            "out.txt",
        ],
        d,
    ));
    assert!(out.contains("30 utterances"));
    let normalized = fs::read_to_string(d.join("out.txt")).unwrap();
    assert_eq!(
        normalized.lines().count(),
        fs::read_to_string(&noisy).unwrap().lines().count()
    );
    assert!(normalized.contains("list all cheap cars"));

    let key = fixture("toy_key.tsv");
    let tsv = ok(&ctr(
        &[
            "evaluate",
            "--pairs",
            "out.txt.pairs.tsv",
            "--key",
            s(&key),
            "--format",
            "tsv",
        ],
        d,
    ));
    let total: Vec<&str> = tsv
        .lines()
        .find(|l| l.starts_with("total\t"))
        .unwrap()
        .split('\t')
        .collect();
    assert_eq!(total[1], "9");
    let table = ok(&ctr(
        &[
            "evaluate",
            "--pairs",
            "out.txt.pairs.tsv",
            "--key",
            s(&key),
            "--label",
            "uni",
        ],
        d,
    ));
    assert!(table.contains("uni") && table.contains("run-ons"));
}

#[test]
fn synth_then_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let counts = ok(&ctr(
        &[
            "synth",
            "--dialogues",
            "10",
            "--utterances",
            "8",
            "--seed",
            "4",
            "--noisy-out",
            "n.txt",
            "--key-out",
            "k.tsv",
            "--corpus-out",
            "c.tsv",
            "--classes-out",
            "cl.txt",
        ],
        d,
    ));
    assert!(counts.contains("80 utterances"));
    assert!(counts.contains("misspellings\t"));
    let again = ok(&ctr(
        &[
            "synth",
            "--dialogues",
            "10",
            "--utterances",
            "8",
            "--seed",
            "4",
            "--noisy-out",
            "n2.txt",
            "--key-out",
            "k2.tsv",
        ],
        d,
    ));
    assert_eq!(counts, again);
    assert_eq!(fs::read(d.join("k.tsv")).unwrap(), fs::read(d.join("k2.tsv")).unwrap());

    let args = [
        "experiment",
        "--corpus",
        "c.tsv",
        "--noisy",
        "n.txt",
        "--key",
        "k.tsv",
        "--ld",
        "biclass",
        "--classes",
        "cl.txt",
        "--seed",
        "4",
        "--format",
        "tsv",
        "--per-fold",
        "--pairs-out",
        "pairs.tsv",
    ];
    let report = ok(&ctr(&args, d));
    assert_eq!(
        report.matches("category\t").count(),
        6,
        "five folds and the pooled report"
    );
    assert_eq!(report, ok(&ctr(&args, d)));
    assert_eq!(fs::read_to_string(d.join("pairs.tsv")).unwrap().lines().count(), 80);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let corpus = fixture("toy_corpus.tsv");
    assert_eq!(ctr(&["no-such-command"], d).status.code(), Some(1));
    assert_eq!(ctr(&["build-od", "--model-dir", "m"], d).status.code(), Some(1));
    let bad_bias = ctr(
        &["build-od", "--corpus", s(&corpus), "--model-dir", "m", "--bias", "2"],
        d,
    );
    assert_eq!(bad_bias.status.code(), Some(1));
    let no_classes = ctr(&["experiment", "--corpus", s(&corpus), "--ld", "biclass"], d);
    assert_eq!(no_classes.status.code(), Some(1));
    let missing = ctr(
        &["evaluate", "--pairs", "nope.tsv", "--key", s(&fixture("toy_key.tsv"))],
        d,
    );
    assert_eq!(missing.status.code(), Some(2));
    fs::write(d.join("bad.tsv"), "no tab here\n").unwrap();
    let malformed = ctr(
        &["evaluate", "--pairs", "bad.tsv", "--key", s(&fixture("toy_key.tsv"))],
        d,
    );
    assert_eq!(malformed.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&malformed.stderr).contains("bad.tsv:1"));
    assert_eq!(
        ctr(
            &["recognize", "--model-dir", "empty", "--input", "x", "--output", "y"],
            d
        )
        .status
        .code(),
        Some(2)
    );
}
