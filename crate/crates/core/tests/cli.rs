use std::process::Command;

fn oras(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_oras")).args(args).output().expect("run oras")
}

fn stdout(out: &std::process::Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn table1_csv() {
    let text = stdout(&oras(&["table1", "--k", "8", "--n", "2", "--mesh-constant", "4"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "geometry,k,N,s,norm,status");
    assert_eq!(lines.len(), 4);
    for (line, s) in lines[1..].iter().zip(1..) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(&fields[..4], &["strip", "8", "2", &s.to_string()]);
        assert!(fields[4].parse::<f64>().unwrap() > 0.0);
        assert_eq!(fields[5], "converged");
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.cfg");
    std::fs::write(&config, "geometry = checkerboard\nk = 8\nn = 2\nmesh-constant = 4\npowers = 1..2\n").unwrap();
    let config = config.to_str().unwrap();
    let text = stdout(&oras(&["fig1", "--config", config, "--k", "9"]));
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.starts_with("checkerboard,9,2,")));
}

#[test]
fn table2_writes_norms_and_gmres_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t2.csv");
    stdout(&oras(&["table2", "--k", "8", "--n", "2", "--mesh-constant", "4", "--out", out.to_str().unwrap()]));
    let norms = std::fs::read_to_string(&out).unwrap();
    assert_eq!(norms.lines().count(), 3);
    let gmres = std::fs::read_to_string(dir.path().join("t2_gmres.csv")).unwrap();
    let mut lines = gmres.lines();
    assert_eq!(lines.next(), Some("geometry,k,N,dofs,iters,residual,l2err"));
    assert!(lines.next().unwrap().starts_with("checkerboard,8,2,"));
}

#[test]
fn solve_dumps_the_solution() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("u.txt");
    let text = stdout(&oras(&["solve", "--k", "8", "--n", "2", "--degree", "1", "--out", out.to_str().unwrap()]));
    let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let dofs: usize = fields[3].parse().unwrap();
    let dump = std::fs::read_to_string(&out).unwrap();
    assert_eq!(dump.lines().count(), dofs);
    assert_eq!(dump.lines().next().unwrap().split_whitespace().count(), 4);
}

#[test]
fn describe_lists_subdomains() {
    let text = stdout(&oras(&["describe", "--geometry", "checkerboard", "--k", "8", "--n", "2"]));
    assert!(text.starts_with("checkerboard k=8 N=2"));
    assert_eq!(text.lines().filter(|l| l.starts_with("subdomain")).count(), 4);
}

#[test]
fn bad_input_fails() {
    assert!(!oras(&["table1", "--geometry", "checkerboard"]).status.success());
    assert!(!oras(&["table1", "--k", "-3"]).status.success());
    assert!(!oras(&["solve", "--degree", "3"]).status.success());
    assert!(!oras(&["fig1", "--config", "/nonexistent/file"]).status.success());
    let out = oras(&["table1", "--geometry", "hexagon"]);
    assert!(!out.status.success());
}
