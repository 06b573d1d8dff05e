use std::path::Path;
use std::process::{Command, Output};

fn lwdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lwdp"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = lwdp(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn k4(dir: &Path) -> String {
    let path = dir.join("k4.txt");
    std::fs::write(
        &path,
        "# K4 with sparse ids\n10 20 1\n10 30 2\n10 40 3\n20 30 4\n20 40 5\n30 40 6\n",
    )
    .unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn assign_stats_on_k4() {
    let dir = tempfile::tempdir().unwrap();
    let g = k4(dir.path());
    let out = stdout(&["assign", "--graph", &g, "--stats"]);
    assert!(out.contains("triangles: 4"), "{out}");
    let listing = stdout(&["assign", "--graph", &g]);
    // header plus one line per triangle, ids as written in the file
    assert_eq!(listing.lines().count(), 5);
    assert!(listing.lines().nth(1).unwrap().starts_with("10\t20\t30\t"));
}

#[test]
fn sensitivity_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let g = g.to_str().unwrap();
    stdout(&[
        "generate",
        "--nodes",
        "14",
        "--density",
        "0.6",
        "--seed",
        "3",
        "--out",
        g,
    ]);
    for est in ["biased", "unbiased"] {
        let out = stdout(&[
            "sensitivity",
            "--graph",
            g,
            "--node",
            "2",
            "--beta",
            "0.4",
            "--estimator",
            est,
            "--oracle",
        ]);
        let value = |key: &str| -> f64 {
            let line = out.lines().find(|l| l.starts_with(key)).unwrap();
            line[key.len()..].trim().parse().unwrap()
        };
        let (fast, oracle) = (value("smooth:"), value("oracle:"));
        assert!(
            (fast - oracle).abs() <= 1e-9 * oracle.abs().max(1.0),
            "{out}"
        );
        assert!(value("local:") <= fast + 1e-12 && fast <= value("global:") + 1e-12);
    }
}

#[test]
fn count_reports_trials_and_messages() {
    let dir = tempfile::tempdir().unwrap();
    let g = k4(dir.path());
    let args = [
        "count",
        "--graph",
        &g,
        "--lambda",
        "12",
        "--eps",
        "2",
        "--estimator",
        "biased",
        "--mechanism",
        "global",
        "--seed",
        "9",
        "--trials",
        "3",
    ];
    let out = stdout(&args);
    assert_eq!(out, stdout(&args));
    let rows: Vec<&str> = out
        .lines()
        .filter(|l| l.starts_with(|c: char| c.is_ascii_digit()))
        .collect();
    assert_eq!(rows.len(), 3);
    // triangles of K4 weigh 7, 9, 11, 13
    assert!(rows.iter().all(|r| r.split('\t').nth(2) == Some("3")));
    assert!(
        out.contains("weight uploads 12, downloads 4, count uploads 4"),
        "{out}"
    );

    let split = stdout(&[
        "count", "--graph", &g, "--lambda", "12", "--eps1", "1.5", "--eps2", "0.5",
    ]);
    assert!(split.contains("eps1: 1.5, eps2: 0.5"));
    assert!(!lwdp(&["count", "--graph", &g, "--eps1", "1"])
        .status
        .success());
}

#[test]
fn baseline_mirrors_count() {
    let dir = tempfile::tempdir().unwrap();
    let g = k4(dir.path());
    let out = stdout(&[
        "baseline", "--graph", &g, "--lambda", "12", "--eps", "50", "--trials", "2",
    ]);
    // a huge budget leaves the weights intact
    assert!(
        out.contains("0\t3\t3\t0\n") && out.contains("1\t3\t3\t0\n"),
        "{out}"
    );
    assert!(out.contains("weight uploads 12"));
}

#[test]
fn experiment_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let g = g.to_str().unwrap();
    stdout(&[
        "generate",
        "--nodes",
        "20",
        "--density",
        "0.5",
        "--seed",
        "1",
        "--out",
        g,
    ]);
    let csv = dir.path().join("out.csv");
    let csv_s = csv.to_str().unwrap();
    let args = [
        "experiment",
        "--graph",
        g,
        "--sweep",
        "eps",
        "--values",
        "2,1",
        "--trials",
        "2",
        "--methods",
        "baseline,smooth-unbiased",
        "--seed",
        "4",
        "--out",
        csv_s,
    ];
    stdout(&args);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,baseline_l2_rel,smooth-unbiased_l2_rel");
    assert!(lines[1].starts_with("1,") && lines[2].starts_with("2,"));
    assert!(!text.contains('\r'));
    stdout(&args);
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), text);

    let bad = lwdp(&[
        "experiment",
        "--graph",
        g,
        "--sweep",
        "eps",
        "--values",
        "1",
        "--methods",
        "nope",
    ]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("unknown method"));
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "0 1 2\n1 1 3\n").unwrap();
    let out = lwdp(&["assign", "--graph", path.to_str().unwrap(), "--stats"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.txt:2"));
}

#[test]
fn generate_variants() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let a = a.to_str().unwrap();
    stdout(&[
        "generate",
        "--nodes",
        "30",
        "--milan-like",
        "--seed",
        "2",
        "--out",
        a,
    ]);
    let text = std::fs::read_to_string(a).unwrap();
    let zeros = text.lines().filter(|l| l.ends_with(" 0")).count();
    assert!(zeros * 2 > text.lines().count() - 1, "{text}");
    let b = dir.path().join("b.txt");
    let b = b.to_str().unwrap();
    stdout(&[
        "generate",
        "--nodes",
        "10",
        "--min-weight",
        "-3",
        "--max-weight",
        "-1",
        "--out",
        b,
    ]);
    let text = std::fs::read_to_string(b).unwrap();
    assert!(text.lines().skip(1).all(|l| l.contains(" -")));
    assert!(!lwdp(&[
        "generate",
        "--nodes",
        "5",
        "--milan-like",
        "--max-weight",
        "3",
        "--out",
        b
    ])
    .status
    .success());
}
