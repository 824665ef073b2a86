use std::path::PathBuf;
use std::process::{Command, Output};

fn qmux(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmux"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn config(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "configs", name].iter().collect();
    p.to_string_lossy().into_owned()
}

#[test]
fn eval_c3_report() {
    let o = qmux(&["eval", &config("c3.qmux"), "--p-t", "0.96"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("exact: 0.995328\n"), "{text}");
    assert!(text.contains("i,C(n,i),successes,no_intact,empty\n0,1,1,0,0\n1,3,3,0,0\n2,3,0,0,3\n3,1,0,0,1\n"));
}

#[test]
fn eval_lossless_and_monte_carlo() {
    let o = qmux(&["eval", &config("c3.qmux"), "--p-t", "1"]);
    assert!(stdout(&o).contains("exact: 1\n"));
    let o = qmux(&["eval", &config("c3.qmux"), "--p-t", "0.9", "--trials", "20000", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let again = qmux(&["eval", &config("c3.qmux"), "--p-t", "0.9", "--trials", "20000", "--seed", "7"]);
    assert_eq!(o.stdout, again.stdout);
    assert!(stdout(&o).contains("monte_carlo: "));
}

#[test]
fn malformed_config_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.qmux");
    std::fs::write(&path, "qmux-cfg 1\n# comment\nblocks 2\nphoton 0: 0 1\nphoton 1: 0 7\n").unwrap();
    let o = qmux(&["eval", path.to_str().unwrap(), "--p-t", "0.9"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 5"), "{err}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(qmux(&["fig1", "c"]).status.code(), Some(2));
    assert_eq!(qmux(&["nonsense"]).status.code(), Some(2));
    assert_eq!(qmux(&["fig1", "a", "--p-t", "1.5"]).status.code(), Some(2));
    assert_eq!(qmux(&["eval", "/nonexistent/file.qmux", "--p-t", "0.9"]).status.code(), Some(2));
    assert_eq!(qmux(&["--help"]).status.code(), Some(0));
}

#[test]
fn capacity_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.qmux");
    let mut text = String::from("qmux-cfg 1\nblocks 1\n");
    for j in 0..30 {
        text.push_str(&format!("photon {j}: 0\n"));
    }
    std::fs::write(&path, text).unwrap();
    let o = qmux(&["eval", path.to_str().unwrap(), "--p-t", "0.9"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn fig1a_rows_and_schema() {
    let o = qmux(&["fig1", "a", "--p-t-min", "0.95", "--p-t-max", "0.96", "--p-t-step", "0.005"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p_t,label,photons,qubits,probability");
    assert_eq!(lines.len(), 1 + 3 * 3);
    assert!(lines.contains(&"0.96,c3,3,6,0.995328"));
    let closed = qmux::evaluator::parity_closed_form(3, 2, 0.955).unwrap();
    let want = format!("0.955,nonmux-3x2,6,6,{}", qmux::cli::format_real(closed));
    assert!(lines.contains(&want.as_str()), "{text}");
}

#[test]
fn fig1a_region_where_only_multiplexing_meets_threshold() {
    let o = qmux(&["fig1", "a", "--p-t", "0.9595"]);
    let rows: Vec<(String, f64)> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].to_string(), f[4].parse().unwrap())
        })
        .collect();
    let get = |name: &str| rows.iter().find(|r| r.0 == name).unwrap().1;
    assert!(get("c3") >= 0.995);
    assert!(get("nonmux-3x2") < 0.995);
}

#[test]
fn fig1b_curves_are_distinct() {
    let o = qmux(&["fig1", "b", "--p-t", "0.9"]);
    let probs: Vec<String> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().to_string())
        .collect();
    assert_eq!(probs.len(), 3);
    assert!(probs[0] != probs[1] && probs[1] != probs[2] && probs[0] != probs[2]);
}

#[test]
fn fig2_points() {
    let o = qmux(&["fig2", "rs", "--q", "1,4", "--p-t", "0.85"]);
    assert_eq!(
        stdout(&o),
        "p_t,label,photons,qubits,probability\n0.85,rs-q1,inf,inf,inf\n0.85,rs-q4,11,44,0.99734313642\n"
    );
    let o = qmux(&["fig2", "parity", "--q", "1", "--p-t", "0.916"]);
    assert!(stdout(&o).contains("0.916,parity-q1,15,15,"));
}

#[test]
fn table1_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t1.csv");
    let o = qmux(&["table1", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<(String, String, String)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].into(), f[2].into(), f[3].into())
        })
        .collect();
    let has = |label: &str, n: &str, q: &str| rows.contains(&(label.into(), n.into(), q.into()));
    assert!(has("1q/p", "15", "15"));
    assert!(has("2q/p", "11", "22"));
    assert!(has("3q/p", "7", "21"));
    assert!(has("mixed<=4*", "12", "15"));
    assert!(has("mixed<=4", "8", "21"));
    assert!(stdout(&o).contains("strategy"));
}

#[test]
fn table1_lossless_and_infeasible() {
    let o = qmux(&["table1", "--p-t", "1"]);
    for line in stdout(&o).lines().skip(1) {
        assert!(line.ends_with(",1,1,1"), "{line}");
    }
    let o = qmux(&[
        "table1", "--threshold", "0.999999", "--max-qubits", "4", "--max-photons", "4", "--max-blocks", "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().skip(1).all(|l| l.ends_with(",inf,inf,inf")));
    assert!(String::from_utf8_lossy(&o.stderr).contains("infeasible"));
}

#[test]
fn output_is_byte_stable() {
    let args = ["fig2", "parity", "--q", "2,3", "--p-t-min", "0.9", "--p-t-max", "0.96", "--p-t-step", "0.02"];
    let a = qmux(&args);
    let b = qmux(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
