//! End-to-end checks of the `csim` binary: exit codes, output formats, and
//! the agreement between the brute-force oracle and the known-values table.

use std::process::Command;

use csim_cli::table::KnownValuesTable;
use csim_core::oracle::exists_csim;

fn csim(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_csim"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn solve_exit_codes() {
    let found = csim(&["solve", "--type", "2,3,4"]);
    assert_eq!(found.status.code(), Some(0));
    let stdout = String::from_utf8(found.stdout).unwrap();
    assert!(stdout.contains("z1 ="), "{stdout}");

    let nonexistent = csim(&["solve", "--type", "2,3,3"]);
    assert_eq!(nonexistent.status.code(), Some(1));
    assert_eq!(String::from_utf8(nonexistent.stdout).unwrap(), "NONEXISTENT\n");

    let budget = csim(&["solve", "--type", "9,9,15", "--budget-nodes", "10"]);
    assert_eq!(budget.status.code(), Some(2));
    assert_eq!(String::from_utf8(budget.stdout).unwrap(), "BUDGET EXHAUSTED\n");

    let malformed = csim(&["solve", "--type", "2,3"]);
    assert_eq!(malformed.status.code(), Some(3));

    let bad_flag = csim(&["solve", "--no-such-flag"]);
    assert_eq!(bad_flag.status.code(), Some(3));
}

#[test]
fn solve_record_format_is_json() {
    let out = csim(&["solve", "--type", "4,4,4", "--format", "record"]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("record output is JSON");
    assert_eq!(value["verdict"], "found");
    assert_eq!(value["type"], serde_json::json!([4, 4, 4]));
    assert_eq!(value["matrix"].as_array().unwrap().len(), 4);
    assert_eq!(value["formula"].as_array().unwrap().len(), 4);
}

#[test]
fn solve_accepts_partial_input_files() {
    let dir = std::env::temp_dir().join("csim-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("partial_35.txt");
    std::fs::write(&path, "1 2 3 4 5\n* * * * *\n* * * * *\n").unwrap();
    let out = csim(&["solve", "--type", "3,5,7", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    std::fs::write(&path, "1 2 3 4 5\n* * *\n* * * * *\n").unwrap();
    let out = csim(&["solve", "--type", "3,5,7", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn solve_outputs_are_stable() {
    let a = csim(&["solve", "--type", "3,5,7"]);
    let b = csim(&["solve", "--type", "3,5,7"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn trace_flag_logs_propagation() {
    let out = csim(&["solve", "--type", "4,4,4", "--trace"]);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("eliminate"), "{stderr}");
    assert!(stderr.contains("[row-col]"));
}

#[test]
fn bench_reports_matches() {
    let out = csim(&["bench", "--types", "2,3,3;3,3,4", "--repeats", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    for line in stdout.lines() {
        assert!(line.contains("match=yes"), "{line}");
    }
}

#[test]
fn bench_finds_the_large_square_types() {
    let out = csim(&["bench", "--types", "6,7,7;8,8,8;9,9,16", "--strategies", "v1", "--repeats", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("(6,7,7) v1: verdict=nonexistent"));
    assert!(stdout.contains("(8,8,8) v1: verdict=found"));
    assert!(stdout.contains("(9,9,16) v1: verdict=found"));
    for line in stdout.lines() {
        assert!(line.contains("match=yes"), "{line}");
    }
}

#[test]
fn table_check_record_output() {
    let out = csim(&["table-check", "--max-r", "3", "--max-s", "3", "--format", "record"]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value.as_array().unwrap().len(), 6);
}

/// On every type the oracle can afford, brute-force existence agrees with
/// the table: a formula exists exactly when n reaches the tabulated value.
#[test]
fn oracle_agrees_with_the_table()
{
    let table = KnownValuesTable::embedded();
    for r in 1..=3usize {
        for s in r..=3usize {
            let entry = table.get(r, s).unwrap();
            assert!(entry.exact);
            for n in s..=(entry.n + 1).min(4 * s) {
                let Ok(exists) = exists_csim(r, s, n) else { continue };
                assert_eq!(exists, n >= entry.n, "({r},{s},{n})");
            }
        }
    }
    // A couple of wider spot checks against the budget limit.
    assert!(exists_csim(2, 4, 4).unwrap());
    assert!(!exists_csim(2, 4, 3).unwrap());
    assert!(exists_csim(3, 4, 4).unwrap());
}
