use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hypmargin::cli::io::parse_dataset;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_hypmargin");

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(BIN).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn listing(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

const TREE: &str = "r a 1\nr b 1\na a1 1\na a2 1\nb b1 1\nb b2 2\n";

fn invocations(tree: &str) -> Vec<Vec<String>> {
    let cases: Vec<&str> = vec![
        "gen d=4 n=60",
        "perceptron n=80",
        "perceptron variant=adversarial alpha=0.1 n=80",
        "perceptron variant=euclidean n=80",
        "cert w=0,1,0 x=1.2,0.6633249580710799,0 alpha=0.4",
        "train alphas=0,0.5 iterations=40 n=100 eta=0.5",
        "train method=plain-gd alpha=0 iterations=30 n=60",
        "pathology",
        "embed",
        "embed method=stress d=3 iters=200",
        "compare-dim dims=2,3 stress_iters=200 logistic_iters=500",
    ];
    cases
        .into_iter()
        .map(|c| {
            let mut v: Vec<String> = c.split(' ').map(String::from).collect();
            if v[0] == "embed" || v[0] == "compare-dim" {
                v.push(format!("tree={tree}"));
            }
            v.push("--seed=3".into());
            v
        })
        .collect()
}

#[test]
fn every_command_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let tree = tmp.path().join("tree.txt");
    fs::write(&tree, TREE).unwrap();
    for (k, args) in invocations(tree.to_str().unwrap()).iter().enumerate() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (a, b) = (tmp.path().join(format!("a{k}")), tmp.path().join(format!("b{k}")));
        let (ra, rb) = (run(&args, &a), run(&args, &b));
        assert_eq!(ra.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&ra.stderr));
        assert_eq!(ra.stdout, rb.stdout, "{args:?}");
        let files = listing(&a);
        assert!(!files.is_empty());
        assert_eq!(files, listing(&b), "{args:?}");
    }
}

#[test]
fn config_errors_exit_one_and_write_nothing() {
    let tmp = TempDir::new().unwrap();
    for args in [
        vec!["gen", "bogus=1"],
        vec!["gen", "d"],
        vec!["gen", "d=two"],
        vec!["frobnicate"],
        vec!["train", "alpha=0.1", "alphas=0,1"],
        vec!["cert", "w=0,1,0", "x=2,0,0"],
        vec!["perceptron", "data=/nonexistent/file"],
    ] {
        let out = tmp.path().join("never");
        let r = run(&args, &out);
        assert_eq!(r.status.code(), Some(1), "{args:?}");
        assert!(!out.exists(), "{args:?} created output");
        assert!(!r.stderr.is_empty());
    }
}

#[test]
fn numerical_failures_exit_two() {
    let tmp = TempDir::new().unwrap();
    // A cap below cosh(gamma) is a bad request; one barely above it leaves
    // almost no admissible region and the sampler runs out of attempts.
    let out = tmp.path().join("gen");
    let r = run(&["gen", "d=2", "n=10", "gamma=3", &format!("x0_cap={}", 3f64.cosh() * 0.5)], &out);
    assert_eq!(r.status.code(), Some(1));
    let r = run(&["gen", "d=2", "n=10", "gamma=3", &format!("x0_cap={}", 3f64.cosh() + 0.0001)], &out);
    assert_eq!(r.status.code(), Some(2), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(!out.exists());
}

#[test]
fn generated_dataset_feeds_other_commands() {
    let tmp = TempDir::new().unwrap();
    let gen = tmp.path().join("gen");
    assert_eq!(run(&["gen", "d=3", "n=50", "gamma=0.4", "--seed", "11"], &gen).status.code(), Some(0));
    let data = gen.join("dataset.txt");
    let text = fs::read_to_string(&data).unwrap();
    assert!(text.starts_with("3 50\n"));
    let set = parse_dataset(&text, 1e-6).unwrap();
    assert_eq!(set.len(), 50);

    let p = tmp.path().join("p");
    let r = run(&["perceptron", &format!("data={}", data.display())], &p);
    assert_eq!(r.status.code(), Some(0));
    let report = fs::read_to_string(p.join("perceptron.txt")).unwrap();
    assert!(report.contains("converged true"), "{report}");

    // Mixing a file with sampling keys is rejected.
    let r = run(&["perceptron", &format!("data={}", data.display()), "n=5"], &tmp.path().join("q"));
    assert_eq!(r.status.code(), Some(1));

    // A corrupted point is rejected at load time.
    let bad = tmp.path().join("bad.txt");
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[1] = lines[1].replacen(' ', " 7", 1);
    fs::write(&bad, lines.join("\n")).unwrap();
    let r = run(&["train", &format!("data={}", bad.display()), "alpha=0"], &tmp.path().join("t"));
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn config_file_values_are_overridden_by_arguments() {
    let tmp = TempDir::new().unwrap();
    let conf = tmp.path().join("sweep.conf");
    fs::write(&conf, "# short sweep\nalphas = 0, 0.25, 0.5, 0.75, 1.0\niterations = 25\nn = 80\neta = 0.5\n").unwrap();
    let out = tmp.path().join("sweep");
    let r = Command::new(BIN)
        .args(["train", "--config"])
        .arg(&conf)
        .args(["iterations=20", "--seed", "2", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let traces: Vec<_> = listing(&out).into_iter().filter(|(n, _)| n.starts_with("trace_alpha_")).collect();
    assert_eq!(traces.len(), 5);
    for (name, body) in &traces {
        let text = String::from_utf8(body.clone()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("iter,clean_loss,robust_loss,margin,eta,adv_count"));
        assert_eq!(lines.count(), 20, "{name}");
    }
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 6);
}

#[test]
fn pathology_reports_passing_checks() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("p");
    let r = run(&["pathology", "d=6", "eps=0.1", "alpha=0.4", "rho=0.95"], &out);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(String::from_utf8_lossy(&r.stdout).contains("checks=passed"));
    let text = fs::read_to_string(out.join("pathology.txt")).unwrap();
    assert!(text.contains("all_checks_passed true"));
    let size: usize = text.lines().find_map(|l| l.strip_prefix("code_size ")).unwrap().parse().unwrap();
    assert_eq!(fs::read_to_string(out.join("code.csv")).unwrap().lines().count(), size);
}

#[test]
fn help_and_missing_command() {
    let h = Command::new(BIN).arg("--help").output().unwrap();
    assert_eq!(h.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&h.stdout).contains("compare-dim"));
    assert_eq!(Command::new(BIN).output().unwrap().status.code(), Some(1));
}
