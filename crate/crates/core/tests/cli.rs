use std::path::Path;
use std::process::{Command, Output};

use smoothq::output::{read_overlaps, HEADER};

fn smoothq(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smoothq"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process exited by signal")
}

#[test]
fn usage_and_config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&smoothq(&[], dir.path())), 1);
    assert_eq!(code(&smoothq(&["overlap"], dir.path())), 1);
    assert_eq!(code(&smoothq(&["frobnicate"], dir.path())), 1);
    std::fs::write(dir.path().join("r.fa"), ">a\nACGTACGTACGTACGTACGT\n").unwrap();
    assert_eq!(
        code(&smoothq(&["overlap", "r.fa", "--alpha", "2"], dir.path())),
        1
    );
    assert_eq!(
        code(&smoothq(&["overlap", "r.fa", "--m", "40"], dir.path())),
        1
    );
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = smoothq(&["overlap", "missing.fa"], dir.path());
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());

    std::fs::write(dir.path().join("bad.fa"), ">a\nACGTNACGT\n").unwrap();
    let out = smoothq(&["overlap", "bad.fa"], dir.path());
    assert_eq!(code(&out), 2);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("bad.fa"), "{msg}");

    std::fs::write(
        dir.path().join("masked.fa"),
        ">a\nACGTNACGT\n>b\nACGTACGTAC\n",
    )
    .unwrap();
    assert_eq!(
        code(&smoothq(
            &["overlap", "masked.fa", "--non-acgt", "mask"],
            dir.path()
        )),
        0
    );

    std::fs::write(dir.path().join("junk.fa"), "ACGT\n").unwrap();
    assert_eq!(code(&smoothq(&["overlap", "junk.fa"], dir.path())), 2);

    std::fs::write(dir.path().join("empty.fa"), "").unwrap();
    assert_eq!(code(&smoothq(&["overlap", "empty.fa"], dir.path())), 2);
}

#[test]
fn simulate_overlap_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let sim = smoothq(
        &[
            "simulate",
            "--out-prefix",
            "sim",
            "--reference-length",
            "20000",
            "--n-reads",
            "40",
            "--mean-read-length",
            "2500",
            "--error-rate",
            "0.1",
            "--seed",
            "3",
        ],
        d,
    );
    assert_eq!(code(&sim), 0, "{}", String::from_utf8_lossy(&sim.stderr));
    assert!(d.join("sim.fa").exists() && d.join("sim.truth.tsv").exists());

    let ov = smoothq(&["overlap", "sim.fa", "-o", "ov.tsv", "--threads", "2"], d);
    assert_eq!(code(&ov), 0, "{}", String::from_utf8_lossy(&ov.stderr));
    let text = std::fs::read_to_string(d.join("ov.tsv")).unwrap();
    assert_eq!(text.lines().next(), Some(HEADER));
    let records = read_overlaps(d.join("ov.tsv")).unwrap();
    assert!(!records.is_empty());

    let stdout = smoothq(&["overlap", "sim.fa"], d);
    assert_eq!(String::from_utf8_lossy(&stdout.stdout), text);

    let ev = smoothq(
        &[
            "eval",
            "--overlaps",
            "ov.tsv",
            "--truth",
            "sim.truth.tsv",
            "--gamma",
            "500",
        ],
        d,
    );
    assert_eq!(code(&ev), 0, "{}", String::from_utf8_lossy(&ev.stderr));
    let report = String::from_utf8_lossy(&ev.stdout);
    let recall: f64 = report
        .split_whitespace()
        .find_map(|w| w.strip_prefix("recall="))
        .expect("summary line")
        .parse()
        .unwrap();
    assert!(recall > 0.5, "{report}");
}

#[test]
fn eval_rejects_unknown_read() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("truth.tsv"), "#name\tref_start\tref_end\tstrand\tread_length\nr0\t1\t1000\t+\t1000\nr1\t500\t1500\t+\t1001\n").unwrap();
    std::fs::write(
        d.join("ov.tsv"),
        format!("{HEADER}\nr1\t1001\t1\t400\tzz\t1000\t500\t900\t+\t5\n"),
    )
    .unwrap();
    let ev = smoothq(&["eval", "--overlaps", "ov.tsv", "--truth", "truth.tsv"], d);
    assert_eq!(code(&ev), 2);
}

#[test]
fn simjoin_writes_verified_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("q.txt"),
        "ACGTACGTACGTAC\nTTTTGGGGCCCCAA\nACGTACGTACGTAC\nACGTACGAACGTAC\n",
    )
    .unwrap();
    let out = smoothq(&["simjoin", "q.txt", "--max-edits", "0"], d);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "#index_a\tindex_b\tqgram_a\tqgram_b\tedit_distance"
    );
    assert_eq!(&lines[1..], ["0\t2\tACGTACGTACGTAC\tACGTACGTACGTAC\t0"]);

    std::fs::write(d.join("short.txt"), "ACGT\n").unwrap();
    assert_eq!(code(&smoothq(&["simjoin", "short.txt"], d)), 2);
}

#[test]
fn qgram_stats_reports_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let sim = smoothq(
        &[
            "simulate",
            "--out-prefix",
            "s",
            "--reference-length",
            "5000",
            "--n-reads",
            "6",
            "--mean-read-length",
            "1000",
            "--seed",
            "1",
        ],
        d,
    );
    assert_eq!(code(&sim), 0);
    let out = smoothq(
        &[
            "qgram-stats",
            "s.fa",
            "--truth",
            "s.truth.tsv",
            "--gamma",
            "200",
        ],
        d,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("q=12") && text.contains("ratio="), "{text}");

    let over = smoothq(&["qgram-stats", "s.fa", "--budget", "10"], d);
    assert_eq!(code(&over), 1);
}
