//! End-to-end tests of the `softeval` binary: exit codes, output formats,
//! and determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_softeval"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) {
    std::fs::write(dir.join(name), content).unwrap();
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

const ANN: &str = "item_id,annotator_id,rating\n\
a,r1,0\na,r2,1\na,r3,2\n\
b,r1,2\nb,r2,2\nb,r3,1\n\
c,r1,0\nc,r2,0\nc,r3,0\n";

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ann.csv", ANN);
    write(dir.path(), "m1.csv", "item_id,score\na,0.5\nb,0.9\nc,0.1\n");
    write(dir.path(), "m2.csv", "item_id,score\na,0.9\nb,0.5\nc,0.2\n");
    dir
}

#[test]
fn aggregate_writes_hand_checkable_labels() {
    let dir = setup();
    let out = run(
        &[
            "aggregate",
            "--annotations",
            "ann.csv",
            "--scale-min",
            "0",
            "--scale-max",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("item_id,p,y"));
    // a: normalized mean (0 + 0.5 + 1)/3 = 0.5, strict 0.5 threshold -> 0.
    assert_eq!(lines.next(), Some("a,5.0000000000000000e-1,0"));
    // b: (1 + 1 + 0.5)/3 = 5/6 -> 1.
    assert_eq!(lines.next(), Some("b,8.3333333333333337e-1,1"));
    assert_eq!(lines.next(), Some("c,0.0000000000000000e0,0"));
}

#[test]
fn aggregate_merges_duplicate_item_rows() {
    let dir = tempfile::tempdir().unwrap();
    // Rows for `a` interleaved with `b`: both merge into per-item multisets.
    write(
        dir.path(),
        "ann.csv",
        "item_id,annotator_id,rating\na,r1,1\nb,r1,0\na,r2,0\nb,r2,1\na,r3,1\nb,r3,1\n",
    );
    let out = run(&["aggregate", "--annotations", "ann.csv"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("a,6.666666666666666"), "{text}");
    assert!(text.contains("b,6.666666666666666"), "{text}");
}

#[test]
fn aggregate_empty_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "empty.csv", "");
    let out = run(&["aggregate", "--annotations", "empty.csv"], dir.path());
    assert_eq!(code(&out), 2);
    write(dir.path(), "header_only.csv", "item_id,annotator_id,rating\n");
    let out = run(&["aggregate", "--annotations", "header_only.csv"], dir.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn eval_single_model_perfect_fixture() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "ann.csv",
        "item_id,annotator_id,rating\na,r1,1\nb,r1,0\n",
    );
    write(dir.path(), "model.csv", "item_id,score\na,0.9\nb,0.1\n");
    let out = run(
        &["eval", "--annotations", "ann.csv", "--scores", "model.csv"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let quad = &doc["report"]["models"]["model"];
    for key in ["auroc", "ap", "s_auroc", "s_ap"] {
        assert_eq!(quad[key], 1.0, "{key}");
    }
}

#[test]
fn eval_detects_constructed_flip() {
    let dir = tempfile::tempdir().unwrap();
    // One annotator with continuous confidences: soft labels are the
    // ratings, hard labels threshold at 0.5 strict.
    write(
        dir.path(),
        "ann.csv",
        "item_id,annotator_id,rating\na,r1,0.9\nb,r1,0.55\nc,r1,0.45\nd,r1,0.1\n",
    );
    // m_hard ranks [b,a,c,d]: AP 1.0, s-AP 0.645.
    // m_soft ranks [a,c,b,d]: AP 5/6, s-AP ~0.756. Order inverts.
    write(
        dir.path(),
        "m_hard.csv",
        "item_id,score\na,0.8\nb,0.9\nc,0.3\nd,0.1\n",
    );
    write(
        dir.path(),
        "m_soft.csv",
        "item_id,score\na,0.9\nb,0.3\nc,0.8\nd,0.1\n",
    );
    let out = run(
        &[
            "eval",
            "--annotations",
            "ann.csv",
            "--scores",
            "m_hard.csv",
            "m_soft.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let flips = doc["report"]["flips"]["ap_vs_s_ap"]["flips"].as_array().unwrap();
    assert_eq!(flips.len(), 1, "{doc:#}");
    assert_eq!(flips[0]["model_a"], "m_hard");
    assert_eq!(flips[0]["model_b"], "m_soft");
    assert_eq!(flips[0]["ordinary_leader"], "m_hard");
    assert_eq!(flips[0]["soft_leader"], "m_soft");
}

#[test]
fn eval_unknown_item_exits_2_listing_ids() {
    let dir = setup();
    write(
        dir.path(),
        "bad.csv",
        "item_id,score\na,0.5\nb,0.9\nc,0.1\nzz,0.7\n",
    );
    let out = run(
        &[
            "eval",
            "--annotations",
            "ann.csv",
            "--scale-max",
            "2",
            "--scores",
            "bad.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("zz"), "{}", stderr(&out));
}

#[test]
fn eval_flat_csv_format() {
    let dir = setup();
    let out = run(
        &[
            "eval",
            "--annotations",
            "ann.csv",
            "--scale-max",
            "2",
            "--scores",
            "m1.csv",
            "m2.csv",
            "--format",
            "csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with(
        "task,model,auroc,ap,s_auroc,s_ap,rank_auroc,rank_ap,rank_s_auroc,rank_s_ap\n"
    ));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn bootstrap_is_byte_identical_across_reruns() {
    let dir = setup();
    let args = [
        "bootstrap",
        "--annotations",
        "ann.csv",
        "--scale-max",
        "2",
        "--scores",
        "m1.csv",
        "m2.csv",
        "--iterations",
        "40",
        "--seed",
        "7",
    ];
    let a = run(&args, dir.path());
    let b = run(&args, dir.path());
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    // Different parallelism, same bytes.
    let mut с_args = args.to_vec();
    с_args.extend(["--threads", "4"]);
    let c = run(&с_args, dir.path());
    let doc_a: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    let doc_c: serde_json::Value = serde_json::from_str(&stdout(&c)).unwrap();
    assert_eq!(doc_a["report"], doc_c["report"]);
}

#[test]
fn bootstrap_unanimous_annotations_are_perfectly_stable() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "ann.csv",
        "item_id,annotator_id,rating\n\
         a,r1,1\na,r2,1\nb,r1,0\nb,r2,0\nc,r1,1\nc,r2,1\nd,r1,0\nd,r2,0\n",
    );
    write(dir.path(), "m1.csv", "item_id,score\na,0.9\nb,0.1\nc,0.8\nd,0.2\n");
    write(dir.path(), "m2.csv", "item_id,score\na,0.2\nb,0.9\nc,0.4\nd,0.6\n");
    let out = run(
        &[
            "bootstrap",
            "--annotations",
            "ann.csv",
            "--scores",
            "m1.csv",
            "m2.csv",
            "--iterations",
            "25",
            "--seed",
            "3",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for metric in ["auroc", "ap", "s_auroc", "s_ap"] {
        assert_eq!(doc["report"]["metrics"][metric]["mean_spearman"], 1.0);
        assert_eq!(doc["report"]["metrics"][metric]["mean_kendall"], 1.0);
    }
    for pair in ["auroc_vs_s_auroc", "ap_vs_s_ap"] {
        let counts = &doc["report"]["pairs"][pair]["kendall"];
        let total = counts["wins_soft"].as_u64().unwrap()
            + counts["wins_ordinary"].as_u64().unwrap()
            + counts["ties"].as_u64().unwrap();
        assert_eq!(total, 25);
    }
}

#[test]
fn bootstrap_rejects_aggregated_labels_with_explanation() {
    let dir = setup();
    let agg = run(
        &[
            "aggregate",
            "--annotations",
            "ann.csv",
            "--scale-max",
            "2",
            "--out",
            "labels.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&agg), 0);
    let out = run(
        &[
            "bootstrap",
            "--annotations",
            "labels.csv",
            "--scores",
            "m1.csv",
            "m2.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
    assert!(
        stderr(&out).contains("cannot be resampled"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn compare_from_eval_flat_export() {
    let dir = setup();
    let eval = run(
        &[
            "eval",
            "--annotations",
            "ann.csv",
            "--scale-max",
            "2",
            "--scores",
            "m1.csv",
            "m2.csv",
            "--format",
            "csv",
            "--out",
            "quads.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&eval), 0, "{}", stderr(&eval));
    let out = run(&["compare", "--quads", "quads.csv"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let reports = doc["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 1);
    // Two models: both R² are exactly 1.
    assert_eq!(reports[0]["r2"]["auroc_vs_s_auroc"], 1.0);
    assert_eq!(reports[0]["r2"]["ap_vs_s_ap"], 1.0);

    let scatter = run(
        &["compare", "--quads", "quads.csv", "--format", "csv"],
        dir.path(),
    );
    assert_eq!(code(&scatter), 0);
    let text = stdout(&scatter);
    assert!(text.starts_with("task,model,pair,ordinary,soft\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = setup();
    write(
        dir.path(),
        "cfg.json",
        r#"{"annotations": "ann.csv", "scale_min": 0.0, "scale_max": 2.0, "threshold": 0.9}"#,
    );
    // Flag threshold 0.2 overrides the file's 0.9: item a (p = 0.5) flips to 1.
    let out = run(
        &["aggregate", "--config", "cfg.json", "--threshold", "0.2"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("a,5.0000000000000000e-1,1"));
    // Without the flag the file's 0.9 applies.
    let out = run(&["aggregate", "--config", "cfg.json"], dir.path());
    assert!(stdout(&out).contains("a,5.0000000000000000e-1,0"));
}

#[test]
fn manifest_names_models_and_conflicts_with_scores() {
    let dir = setup();
    write(dir.path(), "manifest.csv", "model_id,path\nalpha,m1.csv\nbeta,m2.csv\n");
    let out = run(
        &[
            "eval",
            "--annotations",
            "ann.csv",
            "--scale-max",
            "2",
            "--manifest",
            "manifest.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc["report"]["models"]["alpha"].is_object());
    assert!(doc["report"]["models"]["beta"].is_object());

    let out = run(
        &[
            "eval",
            "--annotations",
            "ann.csv",
            "--manifest",
            "manifest.csv",
            "--scores",
            "m1.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn duplicate_model_ids_are_an_error_not_a_guess() {
    let dir = setup();
    let sub = dir.path().join("sub");
    std::fs::create_dir(&sub).unwrap();
    std::fs::copy(dir.path().join("m1.csv"), sub.join("m1.csv")).unwrap();
    let out = run(
        &[
            "eval",
            "--annotations",
            "ann.csv",
            "--scale-max",
            "2",
            "--scores",
            "m1.csv",
            "sub/m1.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("duplicate model id"), "{}", stderr(&out));
}

#[test]
fn unknown_flags_and_missing_files_exit_2() {
    let dir = setup();
    let out = run(&["eval", "--nonsense"], dir.path());
    assert_eq!(code(&out), 2);
    let out = run(
        &["aggregate", "--annotations", "missing.csv"],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn tie_policy_error_surfaces_split_votes() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "ann.csv",
        "item_id,annotator_id,rating\na,r1,1\na,r2,0\n",
    );
    let out = run(
        &[
            "aggregate",
            "--annotations",
            "ann.csv",
            "--binarize",
            "majority",
            "--tie-policy",
            "error",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("split vote"), "{}", stderr(&out));
    // Positives policy flips the same item to 1.
    let out = run(
        &[
            "aggregate",
            "--annotations",
            "ann.csv",
            "--binarize",
            "majority",
            "--tie-policy",
            "positive",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("a,5.0000000000000000e-1,1"));
}
