use std::fs;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cantilever-ion"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig3.csv");
    let out = bin(&["run", "--figure", "3", "--t-max", "1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.split('\n').collect();
    assert_eq!(lines[0], "t,na_rwa,nb_rwa,na_full,nb_full,norm_full");
    assert_eq!(lines[1], "0,6,0,6,0,1");
    assert_eq!(lines.len(), 103, "101 rows, header and trailing newline");
    assert_eq!(*lines.last().unwrap(), "");
    assert!(!csv.contains('\r'));
    for line in &lines[1..101] {
        assert_eq!(line.split(',').count(), 6);
        assert_eq!(line.trim_end(), *line);
        for field in line.split(',') {
            let digits = field
                .split('e')
                .next()
                .unwrap()
                .chars()
                .filter(char::is_ascii_digit)
                .collect::<String>();
            assert!(digits.trim_start_matches('0').len() <= 9, "{field}");
            field.parse::<f64>().unwrap();
        }
    }
    let summary = String::from_utf8_lossy(&out.stderr);
    assert!(summary.contains("first n_b maximum"));
    assert!(summary.contains("max |n_a(rwa) - n_a(full)|"));
}

#[test]
fn identical_config_gives_identical_bytes() {
    let a = bin(&["run", "--figure", "5", "--t-max", "0.5"]);
    let b = bin(&["run", "--figure", "5", "--t-max", "0.5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn unselected_model_columns_are_empty() {
    let out = bin(&["run", "--model", "rwa", "--t-max", "0.05"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        assert!(line.ends_with(",,,"), "{line}");
    }
    let out = bin(&["run", "--model", "full", "--t-max", "0.05"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!((fields[1], fields[2]), ("", ""));
        assert!(!fields[5].is_empty());
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# detuned\nfigure = 4\nkappa = 3.0\nt_max = 0.1\nmodel = full\n").unwrap();
    let from_file = bin(&["run", "--config", cfg.to_str().unwrap()]);
    let explicit = bin(&["run", "--nu", "16", "--kappa", "3", "--t-max", "0.1", "--model", "full"]);
    assert!(from_file.status.success());
    assert_eq!(from_file.stdout, explicit.stdout);

    let overridden = bin(&["run", "--config", cfg.to_str().unwrap(), "--kappa", "4"]);
    let preset = bin(&["run", "--figure", "4", "--t-max", "0.1", "--model", "full"]);
    assert_eq!(overridden.stdout, preset.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["run", "--kappa=-1"]).status.code(), Some(2));
    assert_eq!(bin(&["run", "--figure", "7"]).status.code(), Some(2));
    assert_eq!(bin(&["run", "--dt-out", "5"]).status.code(), Some(2));
    assert_eq!(bin(&["run", "--model", "exact"]).status.code(), Some(2));
    assert_eq!(bin(&["run", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(bin(&["run", "--config", "/nonexistent/run.cfg"]).status.code(), Some(2));
    // the requested truncation cannot hold the initial state
    let out = bin(&["run", "--t-max", "0.02", "--fock-check", "--n-max", "40"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("too small"));
    // squeezing pumped until the ansatz stops being normalizable
    let out = bin(&["run", "--omega", "1", "--nu", "1", "--kappa", "5", "--gamma-a", "0", "--gamma-b", "0", "--t-max", "3", "--model", "full"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn fock_check_passes_on_short_run() {
    let out = bin(&["run", "--figure", "2", "--t-max", "0.1", "--dt-out", "0.02", "--fock-check"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = String::from_utf8_lossy(&out.stderr);
    assert_eq!(summary.matches("fock check").count(), 2);
    assert_eq!(summary.matches("-> ok").count(), 2);
}

#[test]
fn sweep_rows_in_input_order() {
    let out = bin(&["sweep", "--var", "kappa", "--values", "5.0,0,1.8", "--t-max", "1.5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "kappa,transfer_time,transfer_fidelity,discrepancy,error");
    let keys: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(keys, ["5", "0", "1.8"]);
    assert!(lines[2].starts_with("0,,0,0,"));

    let bad = bin(&["sweep", "--var", "nu", "--values", "16,-2", "--t-max", "0.5"]);
    assert_eq!(bad.status.code(), Some(3));
    let text = String::from_utf8(bad.stdout).unwrap();
    assert_eq!(text.lines().count(), 3, "failed row is still written");
    assert_eq!(bin(&["sweep", "--var", "omega", "--values", "1"]).status.code(), Some(2));
}
