use std::path::Path;
use std::process::{Command, Output};

fn mecke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mecke"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = mecke(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn with_threads<'a>(args: &[&'a str], threads: &'a str) -> Vec<&'a str> {
    let mut v = args.to_vec();
    v.extend(["--threads", threads]);
    v
}

const RUNS: &[&[&str]] = &[
    &[
        "sample",
        "--kind",
        "df",
        "--beta",
        "1.5",
        "--samples",
        "300",
    ],
    &[
        "sample",
        "--kind",
        "gamma",
        "--beta",
        "0.5",
        "--samples",
        "300",
        "--format",
        "json",
    ],
    &[
        "sample",
        "--kind",
        "gamma-levy",
        "--beta",
        "2",
        "--levy-cutoff",
        "0.01",
        "--samples",
        "300",
    ],
    &[
        "sample",
        "--kind",
        "poisson",
        "--beta",
        "3",
        "--samples",
        "300",
    ],
    &[
        "sample",
        "--kind",
        "dirichlet",
        "--alpha",
        "0.5,1,2",
        "--samples",
        "300",
    ],
    &["moments", "--alpha", "1/2,3/2", "--max-order", "4"],
    &[
        "verify",
        "--identity",
        "df_mecke_g",
        "--beta",
        "1",
        "--samples",
        "2000",
    ],
    &["fixedpoint", "--iterates", "5", "--ensemble", "300"],
    &["suite", "--samples", "1000", "--format", "csv"],
];

#[test]
fn output_is_identical_across_runs_and_thread_counts() {
    for args in RUNS {
        let one = stdout(&with_threads(args, "1"));
        assert_eq!(one, stdout(&with_threads(args, "1")), "{args:?}");
        assert_eq!(one, stdout(&with_threads(args, "4")), "{args:?}");
        assert!(!one.is_empty());
    }
}

#[test]
fn seeds_change_the_draws() {
    let base = ["sample", "--kind", "df", "--beta", "1", "--samples", "5"];
    let a = stdout(&[&base[..], &["--seed", "1"]].concat());
    let b = stdout(&[&base[..], &["--seed", "0x2"]].concat());
    let c = stdout(&[&base[..], &["--seed", "2"]].concat());
    assert_ne!(a, b);
    assert_eq!(b, c);
}

#[test]
fn dirichlet_rows_lie_on_the_simplex() {
    let text = stdout(&[
        "sample",
        "--kind",
        "dirichlet",
        "--alpha",
        "0.2,1,3,0.7",
        "--samples",
        "200",
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "sample,y0,y1,y2,y3");
    let rows: Vec<&str> = lines.filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 200);
    for row in rows {
        let sum: f64 = row
            .split(',')
            .skip(1)
            .map(|v| v.parse::<f64>().unwrap())
            .sum();
        assert!((sum - 1.0).abs() <= 1e-12, "{row}");
    }
}

#[test]
fn df_atoms_sum_to_one_per_sample() {
    let text = stdout(&["sample", "--kind", "df", "--beta", "0.5", "--samples", "50"]);
    let mut totals = vec![0.0; 50];
    for row in text.lines().skip(1).filter(|l| !l.starts_with('#')) {
        let f: Vec<&str> = row.split(',').collect();
        totals[f[0].parse::<usize>().unwrap()] += f[2].parse::<f64>().unwrap();
    }
    assert!(
        totals.iter().all(|t| (t - 1.0).abs() <= 1e-12),
        "{totals:?}"
    );
}

#[test]
fn poisson_footer_reports_the_count_check() {
    let text = stdout(&[
        "sample",
        "--kind",
        "poisson",
        "--beta",
        "2",
        "--samples",
        "4000",
    ]);
    let footer: Vec<&str> = text.lines().filter(|l| l.starts_with('#')).collect();
    assert_eq!(footer.len(), 2);
    assert!(footer[0].starts_with("# count=4000 meanAtomCount="));
    assert!(footer[1].starts_with("# check=atomCount "));
    assert!(footer[1].ends_with("expected=2 pass=true"));
}

#[test]
fn moments_table() {
    let text = stdout(&[
        "moments",
        "--alpha",
        "1/2,1/2",
        "--s",
        "1,0",
        "--max-order",
        "3",
    ]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "k,alpha,s,n,exactValue,oracleValue,absDiff,cycleIndexValue"
    );
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("2,1/2;1/2,1;0,0,1,"));
    // Arcsine law: E y^3 = 5/16, and the parameters sum to one.
    assert!(lines[4].starts_with("2,1/2;1/2,1;0,3,5/16,"));
    assert!(lines[4].ends_with(",5/16"));
    // Outside the oracle's domain only the exact columns are filled.
    let text = stdout(&["moments", "--alpha", "1/4,3/4", "--max-order", "2"]);
    assert!(text
        .lines()
        .nth(3)
        .unwrap()
        .starts_with("2,1/4;3/4,1;0,2,5/32,,,"));
    // Above unit mass the cycle index is not defined.
    let text = stdout(&["moments", "--alpha", "1,2", "--max-order", "2"]);
    assert!(text.lines().nth(2).unwrap().ends_with(','));
    let json: serde_json::Value = serde_json::from_str(&stdout(&[
        "moments",
        "--alpha",
        "1,1",
        "--max-order",
        "2",
        "--format",
        "json",
    ]))
    .unwrap();
    assert_eq!(json.as_array().unwrap().len(), 3);
}

#[test]
fn exit_codes() {
    // One Poisson(1/2) draw can hardly match its mean with zero spread.
    let fail = mecke(&[
        "sample",
        "--kind",
        "poisson",
        "--beta",
        "0.5",
        "--samples",
        "1",
    ]);
    assert_eq!(fail.status.code(), Some(1));
    for bad in [
        &["sample", "--kind", "df", "--beta", "-1"][..],
        &["moments", "--alpha", "0,1"],
        &["moments", "--alpha", "1,x"],
        &["fixedpoint", "--initial-law", "uniform:0"],
        &["fixedpoint", "--partition", "0,1"],
        &["verify", "--identity", "nonsense"],
        &["sample", "--kind", "dirichlet", "--alpha", "1"],
        &["frobnicate"],
    ] {
        assert_eq!(mecke(bad).status.code(), Some(2), "{bad:?}");
    }
}

#[test]
fn failed_runs_leave_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let p = path.to_str().unwrap();
    let out = mecke(&["sample", "--kind", "df", "--beta", "-1", "--out", p]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!path.exists());
    let out = mecke(&[
        "sample",
        "--kind",
        "df",
        "--beta",
        "1",
        "--samples",
        "3",
        "--out",
        p,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path)
        .unwrap()
        .starts_with("sample,location,mass\n"));
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.json",
        r#"{"command": "sample", "kind": "df", "sigmaSpec": {"beta": 2.0, "density": "uniform"},
            "samples": 7, "seed": 42, "format": "csv"}"#,
    );
    let from_file = stdout(&["--config", &cfg]);
    let explicit = stdout(&[
        "sample",
        "--kind",
        "df",
        "--beta",
        "2",
        "--samples",
        "7",
        "--seed",
        "42",
    ]);
    assert_eq!(from_file, explicit);
    // Flags override the file.
    let more = stdout(&["sample", "--config", &cfg, "--samples", "9"]);
    assert!(more.contains("# count=9 "));
    // Unknown fields and mismatched commands are configuration errors.
    let typo = write(
        dir.path(),
        "typo.json",
        r#"{"command": "sample", "sampels": 3}"#,
    );
    assert_eq!(mecke(&["--config", &typo]).status.code(), Some(2));
    assert_eq!(mecke(&["moments", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn density_tables() {
    let dir = tempfile::tempdir().unwrap();
    let table = write(
        dir.path(),
        "d.csv",
        "lower,upper,density\n0,0.5,3\n0.5,1,1\n",
    );
    let spec = format!("table:{table}");
    let text = stdout(&[
        "sample",
        "--kind",
        "poisson",
        "--beta",
        "1",
        "--density",
        &spec,
        "--samples",
        "400",
    ]);
    let (left, total) = text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .fold((0, 0), |(a, n), x| (a + (x < 0.5) as usize, n + 1));
    // Three quarters of the points fall on the left half.
    let share = left as f64 / total as f64;
    assert!((share - 0.75).abs() < 0.1, "{share}");
    let gap = write(
        dir.path(),
        "gap.csv",
        "lower,upper,density\n0,0.4,1\n0.5,1,1\n",
    );
    let gap = format!("table:{gap}");
    assert_eq!(
        mecke(&["sample", "--kind", "poisson", "--density", &gap])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_and_suite_write_json_by_default() {
    let text = stdout(&[
        "verify",
        "--identity",
        "poisson_mecke",
        "--beta",
        "2",
        "--samples",
        "2000",
    ]);
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(json.is_object());
    let csv = stdout(&[
        "verify",
        "--identity",
        "poisson_mecke",
        "--beta",
        "2",
        "--samples",
        "2000",
        "--format",
        "csv",
    ]);
    assert!(csv.starts_with("identity,beta,functionalId,n,lhsMean,rhsMean,zScore,pass\n"));
    assert!(csv.lines().count() > 4);
}

#[test]
fn fixedpoint_csv() {
    let text = stdout(&[
        "fixedpoint",
        "--initial-law",
        "uniform:3",
        "--iterates",
        "3",
        "--ensemble",
        "100",
        "--partition",
        "0,0.2,0.6,1",
    ]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,momentOrder,cellIndex,gap,ksDistance");
    assert_eq!(lines.len(), 1 + 4 * 3 * 3);
}

#[test]
fn help_for_every_subcommand() {
    for sub in ["sample", "moments", "verify", "fixedpoint", "suite"] {
        let text = stdout(&[sub, "--help"]);
        assert!(text.contains("--seed"), "{sub}");
        assert!(text.contains("--threads"), "{sub}");
    }
    assert!(stdout(&["--help"]).contains("fixedpoint"));
}
