//! Experiment runner behind the `hypmargin` binary.
//!
//! Every command parses its settings and reads its inputs first, computes,
//! and only then writes its output files. A configuration error (exit 1) or
//! a numerical failure (exit 2) therefore leaves the output directory
//! untouched.

pub mod config;
pub mod io;

use std::fmt::Write as _;
use std::path::Path;

use crate::cert::{geodesic_worst_case, maximize_cert, CertSearch};
use crate::error::{Error, Result};
use crate::geometry::{mdot, Hypothesis, LorentzPoint, Tolerances};
use crate::margin::{dataset_margin, decide, Label, LabeledSet};
use crate::perceptron::{
    run_adversarial_perceptron, run_euclidean_perceptron, run_hyperbolic_perceptron, PerceptronConfig, UpdateRule,
};
use crate::synth::{
    build_erm_pathology, compare_dimensions, euclidean_distance_matrix, euclidean_stress_embed,
    lorentz_distance_matrix, measure_distortion, parse_tree, sample_separable, sarkar_embed, two_subtree_tree,
    CompareConfig, TreeMetric,
};
use crate::train::{run_adversarial_gd, run_plain_gd, LossChoice, StepSize, TrainConfig};
pub use config::{parse_args, Command, ExperimentConfig, Params, USAGE};
use io::{format_coordinates, format_dataset, format_trace, join, num, parse_dataset};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

/// Files to write (relative to the output directory) and summary lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub files: Vec<(String, String)>,
    pub summary: Vec<String>,
}

/// Exit code for an error: problems with the request map to 1, failures of
/// the computation itself to 2.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Numerical(_)
        | Error::NonFinite
        | Error::DegenerateUpdate { .. }
        | Error::InvalidHypothesis { .. }
        | Error::BelowUnitProduct { .. }
        | Error::RejectionBudget { .. }
        | Error::PackingStalled { .. } => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

/// Computes the outcome of a configured run without touching the file system
/// beyond reading inputs.
pub fn compute(cfg: &ExperimentConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Gen => gen(cfg),
        Command::Perceptron => perceptron(cfg),
        Command::Cert => cert(cfg),
        Command::Train => train(cfg),
        Command::Pathology => pathology(cfg),
        Command::Embed => embed(cfg),
        Command::CompareDim => compare(cfg),
    }
}

pub fn write_outcome(out: &Path, outcome: &Outcome) -> Result<()> {
    std::fs::create_dir_all(out)?;
    for (name, body) in &outcome.files {
        std::fs::write(out.join(name), body)?;
    }
    Ok(())
}

/// Runs a configured experiment, returning the exit code.
pub fn run_experiment(cfg: &ExperimentConfig) -> i32 {
    let outcome = match compute(cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    if let Err(e) = write_outcome(&cfg.out, &outcome) {
        eprintln!("error: cannot write outputs to {}: {e}", cfg.out.display());
        return EXIT_CONFIG;
    }
    for line in &outcome.summary {
        println!("{line}");
    }
    EXIT_OK
}

/// Entry point for the binary: parses `args` (without the program name).
pub fn main_with_args(args: &[String]) -> i32 {
    if args.is_empty() || args.iter().any(|a| a == "--help" || a == "-h") {
        print!("{USAGE}");
        return if args.is_empty() { EXIT_CONFIG } else { EXIT_OK };
    }
    match parse_args(args) {
        Ok(cfg) => run_experiment(&cfg),
        Err(e) => {
            eprintln!("error: {e}\n\n{USAGE}");
            EXIT_CONFIG
        }
    }
}

fn config_err<T>(msg: String) -> Result<T> {
    Err(Error::Config(msg))
}

fn read_input(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {path}: {e}")))
}

/// A dataset from `data=FILE`, or one sampled from `d, n, gamma, x0_cap`.
fn load_or_sample(cfg: &ExperimentConfig, defaults: (usize, usize, f64, f64)) -> Result<LabeledSet> {
    let p = &cfg.params;
    if let Some(path) = p.get("data") {
        if let Some(k) = ["d", "n", "gamma", "x0_cap"].into_iter().find(|k| p.get(k).is_some()) {
            return config_err(format!("{k} cannot be combined with data="));
        }
        return parse_dataset(&read_input(path)?, cfg.tol);
    }
    let d = p.usize_or("d", defaults.0)?;
    let n = p.usize_or("n", defaults.1)?;
    let gamma = p.f64_or("gamma", defaults.2)?;
    let cap = p.f64_or("x0_cap", defaults.3)?;
    Ok(sample_separable(d, n, gamma, cap, cfg.seed)?.0)
}

fn search(p: &Params) -> Result<CertSearch> {
    let grid = p.usize_or("grid", CertSearch::default().grid_size)?;
    if grid < 2 {
        return config_err(format!("grid must be at least 2, got {grid}"));
    }
    Ok(CertSearch { grid_size: grid, ..CertSearch::default() })
}

fn gen(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let d = p.usize_or("d", 3)?;
    let n = p.usize_or("n", 100)?;
    let gamma = p.f64_or("gamma", 0.3)?;
    let cap = p.f64_or("x0_cap", 2.0)?;
    let (s, wbar) = sample_separable(d, n, gamma, cap, cfg.seed)?;
    let margin = dataset_margin(&wbar, &s)?.margin;
    let positives = s.labels().iter().filter(|y| **y == Label::Pos).count();
    Ok(Outcome {
        files: vec![
            ("dataset.txt".into(), format_dataset(&s)),
            ("separator.txt".into(), format!("{}\n", join(wbar.as_slice(), " "))),
        ],
        summary: vec![format!(
            "gen d={d} n={n} positives={positives} gamma={gamma} planted_margin={} seed={}",
            num(margin),
            cfg.seed
        )],
    })
}

fn perceptron(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let variant = p.choice("variant", "hyperbolic", &["hyperbolic", "adversarial", "euclidean"])?;
    let rule = match p.choice("rule", "reflected", &["reflected", "ambient"])? {
        "ambient" => UpdateRule::Ambient,
        _ => UpdateRule::Reflected,
    };
    let alpha = p.f64_or("alpha", 0.5)?;
    if variant != "adversarial" && p.get("alpha").is_some() {
        return config_err("alpha only applies to variant=adversarial".into());
    }
    if !(alpha >= 0.0) {
        return config_err(format!("alpha must be non-negative, got {alpha}"));
    }
    let max_epochs = p.usize_or("max_epochs", 100_000)?;
    let search = search(p)?;
    let s = load_or_sample(cfg, (3, 100, 0.3, 2.0))?;
    let pcfg = PerceptronConfig { max_epochs, rule };

    let mut report = format!("variant {variant}\n");
    let (mistakes, epochs, converged, log, extra) = if variant == "euclidean" {
        // Spatial coordinates with a constant bias feature.
        let feats: Vec<Vec<f64>> = s
            .points()
            .iter()
            .map(|x| {
                let mut f = x.spatial().to_vec();
                f.push(1.0);
                f
            })
            .collect();
        let r = run_euclidean_perceptron(&feats, s.labels(), max_epochs)?;
        let wrong = feats
            .iter()
            .zip(s.labels())
            .filter(|(f, y)| {
                let v: f64 = f.iter().zip(&r.final_w).map(|(a, b)| a * b).sum();
                (if v > 0.0 { Label::Pos } else { Label::Neg }) != **y
            })
            .count();
        let _ = writeln!(report, "w {}", join(&r.final_w, " "));
        (r.mistakes, r.epochs, r.converged, r.mistake_log, format!("training_errors={wrong}"))
    } else {
        let w0 = Hypothesis::axis(s.dim());
        let r = if variant == "adversarial" {
            run_adversarial_perceptron(&s, alpha, &w0, &pcfg, &search)?
        } else {
            run_hyperbolic_perceptron(&s, &w0, &pcfg)?
        };
        let margin = dataset_margin(&r.final_w, &s)?.margin;
        let _ = writeln!(report, "margin {}", num(margin));
        let _ = writeln!(report, "invalid_steps {}", r.invalid_steps);
        let _ = writeln!(report, "w {}", join(r.final_w.as_slice(), " "));
        (r.mistakes, r.epochs, r.converged, r.mistake_log, format!("margin={}", num(margin)))
    };
    let _ = writeln!(report, "converged {converged}\nmistakes {mistakes}\nepochs {epochs}");
    let mut csv = String::from("update,epoch,index\n");
    for (k, (e, i)) in log.iter().enumerate() {
        let _ = writeln!(csv, "{},{e},{i}", k + 1);
    }
    Ok(Outcome {
        files: vec![("perceptron.txt".into(), report), ("mistakes.csv".into(), csv)],
        summary: vec![format!(
            "perceptron variant={variant} n={} d={} converged={converged} mistakes={mistakes} epochs={epochs} {extra}",
            s.len(),
            s.dim()
        )],
    })
}

fn vector(p: &Params, key: &str) -> Result<Vec<f64>> {
    p.f64_list(key)?.ok_or_else(|| Error::Config(format!("{key}= is required (comma-separated coordinates)")))
}

fn cert(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let w = Hypothesis::new(vector(p, "w")?).map_err(|e| Error::Config(format!("w: {e}")))?;
    let tol = Tolerances { manifold: cfg.tol, ..Tolerances::default() };
    let x = LorentzPoint::with_tolerance(vector(p, "x")?, &tol).map_err(|e| Error::Config(format!("x: {e}")))?;
    if x.dim() != w.dim() {
        return config_err(format!("w has dimension {}, x has {}", w.dim(), x.dim()));
    }
    let y = match p.get("y") {
        Some(v) => v
            .parse::<i32>()
            .ok()
            .and_then(|v| Label::from_i32(v).ok())
            .ok_or_else(|| Error::Config(format!("y={v}: expected -1 or 1")))?,
        None => decide(&w, &x),
    };
    let alpha = p.f64_or("alpha", 0.5)?;
    if !(alpha >= 0.0) {
        return config_err(format!("alpha must be non-negative, got {alpha}"));
    }
    let search = search(p)?;
    let adv = maximize_cert(&w, &x, y, alpha, &search)
        .ok_or_else(|| Error::Numerical("no feasible perturbation found".into()))?;
    let reference = geodesic_worst_case(&w, &x, y, alpha)?;
    let reference_objective = -y.sign() * mdot(w.as_slice(), reference.as_slice());
    let mut text = String::new();
    let _ = writeln!(text, "x_adv {}", join(adv.point.as_slice(), " "));
    let _ = writeln!(text, "objective {}", num(adv.objective));
    let _ = writeln!(text, "budget_used {}", num(adv.budget_used));
    let _ = writeln!(text, "misclassifies {}", adv.misclassifies);
    let _ = writeln!(text, "geodesic_objective {}", num(reference_objective));
    Ok(Outcome { files: vec![("cert.txt".into(), text.clone())], summary: text.lines().map(str::to_string).collect() })
}

fn train(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let method = p.choice("method", "adversarial-gd", &["adversarial-gd", "plain-gd"])?;
    let alphas = match (p.f64_list("alphas")?, p.f64_opt("alpha")?) {
        (Some(_), Some(_)) => return config_err("give either alpha= or alphas=, not both".into()),
        (Some(list), None) => list,
        (None, Some(a)) => vec![a],
        (None, None) => vec![0.0, 0.25, 0.5, 0.75, 1.0],
    };
    let radius = p.f64_opt("radius")?;
    let loss = match p.choice("loss", "logistic", &["logistic", "hinge", "square"])? {
        "hinge" => LossChoice::Hinge,
        "square" => LossChoice::Square,
        _ => LossChoice::Logistic { radius },
    };
    if radius.is_some() && !matches!(loss, LossChoice::Logistic { .. }) {
        return config_err("radius only applies to loss=logistic".into());
    }
    let step = match p.str_or("eta", "auto") {
        "auto" => StepSize::Auto,
        v => StepSize::Fixed(v.parse().map_err(|_| Error::Config(format!("eta={v}: expected auto or a number")))?),
    };
    let base = TrainConfig {
        loss,
        alpha: 0.0,
        step,
        c: p.f64_or("c", 0.5)?,
        batch: p.get("batch").map(|_| p.usize_or("batch", 0)).transpose()?,
        iterations: p.usize_or("iterations", 1000)?,
        seed: cfg.seed,
        beta: p.f64_or("beta", 1.0)?,
        radius_cap: p.f64_or("radius_cap", 10.0)?,
        gamma: p.f64_opt("step_gamma")?,
        search: search(p)?,
        w0: None,
        keep_iterates: false,
    };
    let cells: Vec<TrainConfig> = alphas.iter().map(|&alpha| TrainConfig { alpha, ..base.clone() }).collect();
    for c in &cells {
        c.validate()?;
    }
    let s = load_or_sample(cfg, (3, 500, 0.5, 2.0))?;

    // Cells are independent; run them side by side.
    let results: Vec<Result<crate::train::TrainTrace>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cells
            .iter()
            .map(|c| {
                let s = &s;
                scope.spawn(move || if method == "plain-gd" { run_plain_gd(s, c) } else { run_adversarial_gd(s, c) })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Numerical("training thread panicked".into()))))
            .collect()
    });

    let mut out = Outcome::default();
    let mut table = String::from("alpha,final_margin,final_clean_loss,final_robust_loss,eta,pool_size\n");
    for (alpha, r) in alphas.iter().zip(results) {
        let trace = r?;
        let last = trace.rows.last().copied();
        let (m, cl, rl) = last.map_or((f64::NAN, f64::NAN, f64::NAN), |r| (r.margin, r.clean_loss, r.robust_loss));
        let _ = writeln!(
            table,
            "{},{},{},{},{},{}",
            num(*alpha),
            num(m),
            num(cl),
            num(rl),
            num(trace.eta),
            trace.pool_size
        );
        out.files.push((format!("trace_alpha_{}.csv", num(*alpha)), format_trace(&trace.rows)));
        out.summary.push(format!(
            "train method={method} alpha={} iterations={} eta={} final_margin={} robust_loss={}",
            num(*alpha),
            trace.rows.len(),
            num(trace.eta),
            num(m),
            num(rl)
        ));
    }
    out.files.push(("summary.csv".into(), table));
    Ok(out)
}

fn pathology(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let d = p.usize_or("d", 8)?;
    let eps = p.f64_or("eps", 0.05)?;
    let alpha = p.f64_or("alpha", 0.5)?;
    let rho = p.f64_or("rho", 0.99)?;
    let w = build_erm_pathology(d, eps, alpha, rho, cfg.seed)?;
    let c = w.validate()?;
    let passed = c.all_passed(1e-9);
    let mut text = String::new();
    let _ = writeln!(text, "d {d}\neps {}\nalpha {}\nrho {}", num(eps), num(alpha), num(rho));
    let _ = writeln!(text, "theta {}\ndelta {}", num(w.theta), num(w.delta));
    let _ = writeln!(text, "code_size {}\nshannon_floor {}", w.len(), num(c.shannon_floor));
    let _ = writeln!(text, "code_angles {}\nunit_classifiers {}", c.code_angles, c.unit_classifiers);
    let _ = writeln!(
        text,
        "cumulative_separation {}\ncurrent_round_flips {}",
        c.cumulative_separation, c.current_round_flips
    );
    let _ = writeln!(
        text,
        "max_margin_error {}\nmax_distance_error {}",
        num(c.max_margin_error),
        num(c.max_distance_error)
    );
    let _ = writeln!(text, "meets_shannon {}\nall_checks_passed {passed}", c.meets_shannon);
    let code: String = w.code.iter().map(|v| format!("{}\n", join(v, ","))).collect();
    if !passed {
        return Err(Error::Numerical(format!("pathology witness failed validation:\n{text}")));
    }
    Ok(Outcome {
        files: vec![("pathology.txt".into(), text), ("code.csv".into(), code)],
        summary: vec![format!(
            "pathology d={d} eps={} alpha={} code_size={} shannon_floor={} checks=passed",
            num(eps),
            num(alpha),
            w.len(),
            num(c.shannon_floor)
        )],
    })
}

fn load_tree(p: &Params, required: bool) -> Result<Option<TreeMetric>> {
    match p.get("tree") {
        Some(path) => parse_tree(&read_input(path)?).map(Some).map_err(|e| Error::Config(format!("{path}: {e}"))),
        None if required => config_err("tree= is required".into()),
        None => Ok(None),
    }
}

fn embed(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let method = p.choice("method", "sarkar", &["sarkar", "stress"])?;
    let tau = p.f64_or("tau", 3.0)?;
    let d = p.usize_or("d", 2)?;
    let iters = p.usize_or("iters", 3000)?;
    if method == "sarkar" && (p.get("d").is_some() || p.get("iters").is_some()) {
        return config_err("d and iters only apply to method=stress".into());
    }
    if method == "stress" && p.get("tau").is_some() {
        return config_err("tau only applies to method=sarkar".into());
    }
    let tree = load_tree(p, true)?.expect("required");
    let truth = tree.distance_matrix();
    let (coords, measured, extra) = if method == "sarkar" {
        let pts = sarkar_embed(&tree, tau)?;
        let dm = lorentz_distance_matrix(&pts);
        (pts.into_iter().map(|x| x.as_slice().to_vec()).collect::<Vec<_>>(), dm, format!("tau={}", num(tau)))
    } else {
        let e = euclidean_stress_embed(&truth, d, iters, cfg.seed)?;
        let dm = euclidean_distance_matrix(&e.coords);
        (e.coords, dm, format!("d={d} stress={}", num(e.stress)))
    };
    let report = measure_distortion(&truth, &measured)?;
    let text = format_coordinates(tree.names().iter().map(String::as_str).zip(coords.iter().map(|c| c.as_slice())));
    let flag = if report.degenerate { " degenerate=true" } else { "" };
    Ok(Outcome {
        files: vec![("embedding.txt".into(), text)],
        summary: vec![format!(
            "embed method={method} nodes={} {extra} distortion={}{flag}",
            tree.len(),
            num(report.c_m)
        )],
    })
}

fn compare(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let defaults = CompareConfig::default();
    let dims = p.usize_list("dims")?.unwrap_or_else(|| vec![2, 3, 5, 10]);
    let ccfg = CompareConfig {
        tau: p.f64_or("tau", defaults.tau)?,
        stress_iters: p.usize_or("stress_iters", defaults.stress_iters)?,
        logistic_iters: p.usize_or("logistic_iters", defaults.logistic_iters)?,
        logistic_lr: p.f64_or("lr", defaults.logistic_lr)?,
        max_epochs: p.usize_or("max_epochs", defaults.max_epochs)?,
        seed: cfg.seed,
    };
    if let Some(d) = dims.iter().find(|d| **d < 2) {
        return config_err(format!("dims must all be at least 2, got {d}"));
    }
    let tree = load_tree(p, false)?.unwrap_or_else(|| two_subtree_tree(24, 6, 5, 6));
    let rows = compare_dimensions(&tree, &dims, &ccfg)?;
    let mut table = String::from(
        "d,hyperbolic_error,hyperbolic_mistakes,hyperbolic_converged,hyperbolic_distortion,euclidean_error,euclidean_distortion,stress\n",
    );
    let mut summary = Vec::new();
    for r in &rows {
        let _ = writeln!(
            table,
            "{},{},{},{},{},{},{},{}",
            r.d,
            num(r.hyperbolic_error),
            r.hyperbolic_mistakes,
            r.hyperbolic_converged,
            num(r.hyperbolic_distortion),
            num(r.euclidean_error),
            num(r.euclidean_distortion),
            num(r.stress)
        );
        summary.push(format!(
            "compare-dim d={} hyperbolic_error={:.4} euclidean_error={:.4} hyperbolic_distortion={:.4} euclidean_distortion={:.4}",
            r.d, r.hyperbolic_error, r.euclidean_error, r.hyperbolic_distortion, r.euclidean_distortion
        ));
    }
    Ok(Outcome { files: vec![("compare.csv".into(), table)], summary })
}
