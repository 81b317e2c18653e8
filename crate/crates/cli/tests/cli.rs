use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccf-siso"))
        .args(args)
        .env_remove("CCF_SISO_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn table1_rows_are_live_counts() {
    let out = run(&["table1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text
        .lines()
        .any(|l| l.starts_with("RM(1,3)") && l.ends_with("72           32")));
    let row5: Vec<&str> = text
        .lines()
        .find(|l| l.starts_with("RM(1,5)"))
        .unwrap()
        .split_whitespace()
        .collect();
    assert_eq!(row5, ["RM(1,5)", "32", "480", "192"]);
    assert!(run(&["table1", "--verify"]).status.success());
}

#[test]
fn table2_rows() {
    let text = stdout(&run(&["table2"]));
    let row = |rate: &str| -> Vec<String> {
        text.lines()
            .find(|l| l.starts_with(rate))
            .unwrap()
            .split_whitespace()
            .map(String::from)
            .collect()
    };
    assert_eq!(row("16/17")[3..], ["22.8", "8.7"]);
    assert_eq!(row("11/12")[3..], ["21.5", "8.2"]);
}

#[test]
fn gtg_check_verdicts() {
    let text = stdout(&run(&["gtg-check", "-m", "6"]));
    assert!(text.contains("unconditioned: cyclic"));
    assert!(text.contains("conditioned: forest"));
}

#[test]
fn code_info_rm13() {
    let text = stdout(&run(&["code-info", "--code", "rm:1,3"]));
    assert!(text.contains("n=8 k=4 d=4"));
    assert!(text.contains("alpha_max=-2"));
}

#[test]
fn decode_zero_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.txt");
    std::fs::write(&path, "0\n".repeat(16)).unwrap();
    for code in ["rm:1,4", "eh:4", "rm:2,4"] {
        let out = run(&[
            "decode",
            "--code",
            code,
            "--ring",
            "sumprod",
            "--input",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{code}");
        let text = stdout(&out);
        let rows: Vec<&str> = text
            .lines()
            .skip_while(|l| !l.starts_with("bit"))
            .skip(1)
            .collect();
        assert_eq!(rows.len(), 16);
        for r in rows {
            let ext: f64 = r.split('\t').nth(3).unwrap().parse().unwrap();
            assert_eq!(ext.abs(), 0.0, "{code}");
        }
    }
}

#[test]
fn malformed_inputs_fail() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "0.5\nnope\n").unwrap();
    let out = run(&[
        "decode",
        "--code",
        "rm:1,3",
        "--input",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    let short = dir.path().join("short.txt");
    std::fs::write(&short, "1\n2\n").unwrap();
    assert_eq!(
        run(&[
            "decode",
            "--code",
            "rm:1,3",
            "--input",
            short.to_str().unwrap()
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        run(&["decode", "--code", "rm:9,3", "--input", "x"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["table1", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn simulate_missing_file() {
    let out = run(&["simulate", "/nonexistent/sweep.cfg"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
}

#[test]
fn simulate_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    std::fs::write(&path, "mixture = 7/8\nsnr = 1\n").unwrap();
    let out = run(&["simulate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn simulate_smoke_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("smoke.cfg");
    std::fs::write(
        &path,
        "mixture = 8/9\nsnr = 6.0\niterations = 1\nmax_blocks = 50\nmin_bit_errors = 0\n",
    )
    .unwrap();
    let out_path = dir.path().join("out.csv");
    let out = run(&[
        "simulate",
        path.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(out_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "ebn0_db,blocks,bit_errors,cw_errors,ber,cer,iteration"
    );
    assert_eq!(lines.len(), 2);
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields.len(), 7);
    assert_eq!(fields[1], "50");
}

#[test]
fn thread_count_comes_from_the_environment() {
    let args = [
        "simulate",
        "--mixture",
        "custom:5:4",
        "--snr",
        "-1,0",
        "--iters",
        "2",
        "--max-blocks",
        "12",
        "--seed",
        "4",
    ];
    let a = run(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_ccf-siso"))
        .args(args)
        .env("CCF_SISO_THREADS", "3")
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}
