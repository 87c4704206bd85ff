use std::process::{Command, Output};

use qkneser::report::{self, parse_json};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qkneser"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json_lines(o: &Output) -> String {
    stdout(o).trim_end().to_string()
}

#[test]
fn spectrum_examples() {
    let o = run(&["spectrum", "--e1", "2", "--e2", "2", "--q", "2", "--format", "json"]);
    assert!(o.status.success());
    let r = report::spectrum_from_json(&parse_json(&stdout(&o)).unwrap()).unwrap();
    let exps: Vec<String> = r.exponents.iter().map(|m| m.to_string()).collect();
    assert_eq!(exps, ["4", "2", "1"]);
    assert_eq!(r.eigenvalues, ["16", "4", "2"]);
    assert!(r.character_route_agrees);

    let o = run(&["spectrum", "--e1", "1", "--e2", "1", "--q", "2", "--format", "json"]);
    let r = report::spectrum_from_json(&parse_json(&stdout(&o)).unwrap()).unwrap();
    assert_eq!(r.eigenvalues, ["2", "1"]);

    let o = run(&["spectrum", "--e1", "2", "--e2", "1", "--q", "4", "--format", "json"]);
    let r = report::spectrum_from_json(&parse_json(&stdout(&o)).unwrap()).unwrap();
    assert_eq!(r.eigenvalues, ["16", "2"]);
}

#[test]
fn json_reports_round_trip_byte_for_byte() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["spectrum", "--e1", "3", "--e2", "2", "--q", "3"],
        vec!["bound", "--family", "hermitian", "--e1", "1", "--e2", "1", "--q", "2"],
        vec!["bound", "--family", "symplectic", "--e1", "2", "--e2", "2", "--q", "2"],
        vec!["bound", "--family", "orthogonal", "--eps", "-", "--sigma1", "+", "--sigma2", "-", "--e1", "4", "--e2", "2", "--q", "7"],
        vec!["bound", "--family", "unitary", "--e1", "3", "--e2", "2", "--q", "5"],
        vec!["count", "--family", "orthogonal", "--eps", "+", "--sigma1", "-", "--sigma2", "-", "--e1", "2", "--e2", "2", "--q", "3"],
        vec!["count", "--family", "hermitian", "--e1", "1", "--e2", "1", "--q", "2", "--full-pairs"],
        vec!["mixing-check", "--e1", "2", "--e2", "1", "--q", "3", "--trials", "10"],
        vec!["verify", "--family", "symplectic", "--tail-q-max", "7", "--tail-d-max", "8"],
    ];
    for mut args in cases {
        args.extend(["--format", "json"]);
        let o = run(&args);
        assert!(o.status.success(), "{args:?}: {}", stderr(&o));
        let text = json_lines(&o);
        let v = parse_json(&text).unwrap();
        let again = match args[0] {
            "spectrum" => report::spectrum_json(&report::spectrum_from_json(&v).unwrap()),
            "bound" => report::bound_json(&report::bound_from_json(&v).unwrap()),
            "count" => report::count_json(&report::count_from_json(&v).unwrap()),
            "mixing-check" => report::mixing_json(&report::mixing_from_json(&v).unwrap()),
            "verify" => report::verify_json(&report::verify_from_json(&v).unwrap()),
            _ => unreachable!(),
        };
        assert_eq!(report::to_json_string(&again), text, "{args:?}");
    }
}

#[test]
fn hermitian_equality_is_flagged() {
    let o = run(&["bound", "--family", "hermitian", "--e1", "1", "--e2", "1", "--q", "2", "--format", "json"]);
    assert!(o.status.success());
    let v = parse_json(&stdout(&o)).unwrap();
    assert_eq!(v["equality"], true);
    assert_eq!(v["lower_bound"]["a"]["num"], "1");
    assert_eq!(v["lower_bound"]["a"]["den"], "2");
    assert_eq!(v["threshold"]["num"], "1");
    assert_eq!(v["threshold"]["den"], "2");
}

#[test]
fn symplectic_threshold_two_sevenths() {
    let o = run(&["bound", "--family", "symplectic", "--e1", "2", "--e2", "2", "--q", "2", "--format", "json"]);
    assert!(o.status.success());
    let b = report::bound_from_json(&parse_json(&stdout(&o)).unwrap()).unwrap();
    assert_eq!(b.threshold.to_string(), "2/7");
    assert!(b.pass);
}

#[test]
fn exception_tuple_routes_to_count() {
    let o = run(&["bound", "--family", "orthogonal", "--eps", "+", "--sigma1", "-", "--sigma2", "-", "--e1", "2", "--e2", "2", "--q", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("dispatch to `count`"), "{err}");
    assert!(err.contains("q=2"), "{err}");

    let o = run(&["count", "--family", "orthogonal", "--eps", "+", "--e1", "2", "--e2", "2", "--q", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn csv_has_fixed_columns() {
    let o = run(&["count", "--family", "orthogonal", "--eps", "-", "--e1", "2", "--e2", "2", "--q", "3", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "family,eps,sigma1,sigma2,e1,e2,q,alpha1,alpha2,bound,threshold,pass,method,seconds"
    );
    assert_eq!(lines.count(), 4);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bound", "--family", "nope", "--e1", "1", "--e2", "1", "--q", "2"]).status.code(), Some(2));
    assert_eq!(run(&["bound", "--family", "symplectic", "--e1", "2", "--e2", "2", "--q", "6"]).status.code(), Some(2));
    assert_eq!(run(&["bound", "--family", "symplectic", "--e1", "3", "--e2", "2", "--q", "2"]).status.code(), Some(2));
    assert_eq!(run(&["bound", "--family", "orthogonal", "--e1", "2", "--e2", "2", "--q", "2"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--e1", "2"]).status.code(), Some(2));
    let o = run(&["count", "--family", "hermitian", "--e1", "4", "--e2", "2", "--q", "3", "--budget", "1000"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("budget"));
}

#[test]
fn verify_symplectic_counts_tuples() {
    let o = run(&["verify", "--family", "symplectic", "--tail-q-max", "11", "--tail-d-max", "10", "--format", "json"]);
    assert!(o.status.success());
    let r = report::verify_from_json(&parse_json(&stdout(&o)).unwrap()).unwrap();
    let mut expected = 0;
    for _q in [2, 3, 4] {
        for m1 in 1..=8u32 {
            expected += (1..=m1).filter(|m2| m1 + m2 <= 9).count();
        }
    }
    assert_eq!(r.sweep().count(), expected);
    assert!(r.pass());
}

#[test]
fn verify_orthogonal_dispatches_seven() {
    let o = run(&["verify", "--family", "orthogonal", "--tail-q-max", "9", "--tail-d-max", "10", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report::verify_from_json(&parse_json(&stdout(&o)).unwrap()).unwrap();
    assert_eq!(r.dispatched.len(), 7);
    assert_eq!(r.counts.len(), 56);
}

#[test]
fn verify_unitary_passes() {
    let o = run(&["verify", "--family", "unitary", "--tail-q-max", "9", "--tail-d-max", "10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).trim_end().ends_with("PASS"));
}

#[test]
fn results_do_not_depend_on_workers() {
    let strip = |o: &Output| {
        let v = parse_json(&stdout(o)).unwrap();
        let r = report::verify_from_json(&v).unwrap();
        r.bounds.iter().map(|b| (b.tuple(), b.lower_bound.clone(), b.pass)).collect::<Vec<_>>()
    };
    let base = ["verify", "--family", "symplectic", "--tail-q-max", "7", "--tail-d-max", "8", "--format", "json"];
    let one = run(&[&base[..], &["--workers", "1"]].concat());
    let four = run(&[&base[..], &["--workers", "4"]].concat());
    assert_eq!(strip(&one), strip(&four));
}
