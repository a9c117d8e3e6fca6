use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Gen,
    Perceptron,
    Cert,
    Train,
    Pathology,
    Embed,
    CompareDim,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Gen,
        Command::Perceptron,
        Command::Cert,
        Command::Train,
        Command::Pathology,
        Command::Embed,
        Command::CompareDim,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Gen => "gen",
            Command::Perceptron => "perceptron",
            Command::Cert => "cert",
            Command::Train => "train",
            Command::Pathology => "pathology",
            Command::Embed => "embed",
            Command::CompareDim => "compare-dim",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| Error::Config(format!("unknown command {s:?}")))
    }

    /// Keys accepted besides the common `seed`, `out` and `tol`.
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            Command::Gen => &["d", "n", "gamma", "x0_cap"],
            Command::Perceptron => {
                &["data", "d", "n", "gamma", "x0_cap", "variant", "alpha", "rule", "max_epochs", "grid"]
            }
            Command::Cert => &["w", "x", "y", "alpha", "grid"],
            Command::Train => &[
                "data",
                "d",
                "n",
                "gamma",
                "x0_cap",
                "method",
                "alpha",
                "alphas",
                "loss",
                "radius",
                "eta",
                "c",
                "batch",
                "iterations",
                "beta",
                "radius_cap",
                "step_gamma",
                "grid",
            ],
            Command::Pathology => &["d", "eps", "alpha", "rho"],
            Command::Embed => &["method", "tree", "tau", "d", "iters"],
            Command::CompareDim => &["tree", "dims", "tau", "stress_iters", "logistic_iters", "lr", "max_epochs"],
        }
    }
}

/// Validated settings for one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub params: Params,
    pub seed: u64,
    pub out: PathBuf,
    /// Relative hyperboloid tolerance applied to loaded datasets and points.
    pub tol: f64,
}

/// Raw `key=value` settings with typed accessors.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Params(BTreeMap<String, String>);

fn bad<T>(key: &str, v: &str, what: &str) -> Result<T> {
    Err(Error::Config(format!("{key}={v}: expected {what}")))
}

impl Params {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.get(key).unwrap_or(default)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        self.f64_opt(key).map(|v| v.unwrap_or(default))
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(Some(x)),
                _ => bad(key, v, "a finite number"),
            },
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().or_else(|_| bad(key, v, "a non-negative integer")),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(v) = self.get(key) else { return Ok(None) };
        v.split(',')
            .map(|p| match p.trim().parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => bad(key, v, "a comma-separated list of numbers"),
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    pub fn usize_list(&self, key: &str) -> Result<Option<Vec<usize>>> {
        let Some(v) = self.get(key) else { return Ok(None) };
        v.split(',')
            .map(|p| p.trim().parse::<usize>().or_else(|_| bad(key, v, "a comma-separated list of integers")))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    pub fn choice<'a>(&'a self, key: &str, default: &'a str, options: &[&str]) -> Result<&'a str> {
        let v = self.str_or(key, default);
        if options.contains(&v) {
            Ok(v)
        } else {
            bad(key, v, &format!("one of {}", options.join("|")))
        }
    }
}

pub const USAGE: &str = "\
usage: hypmargin <command> [--config FILE] [--seed N] [--out DIR] [key=value ...]

commands:
  gen          sample a margin-separable dataset
  perceptron   variant=hyperbolic|adversarial|euclidean
  cert         worst-case perturbation of one point
  train        method=adversarial-gd|plain-gd, sweep with alphas=...
  pathology    spherical-code witness against adversarial ERM
  embed        method=sarkar|stress of a tree file
  compare-dim  classifier error of tree embeddings across dimensions
";

fn insert(map: &mut BTreeMap<String, String>, item: &str, origin: &str) -> Result<()> {
    let Some((k, v)) = item.split_once('=') else {
        return Err(Error::Config(format!("{origin}: expected key=value, got {item:?}")));
    };
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() {
        return Err(Error::Config(format!("{origin}: empty key in {item:?}")));
    }
    map.insert(k.to_string(), v.to_string());
    Ok(())
}

/// Parses a config file of `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if !line.is_empty() {
            insert(&mut map, line, &format!("config line {}", no + 1))?;
        }
    }
    Ok(map)
}

/// Parses the arguments after the program name. Command-line values
/// override those of a config file.
pub fn parse_args<S: AsRef<str>>(args: &[S]) -> Result<ExperimentConfig> {
    let args: Vec<&str> = args.iter().map(|a| a.as_ref()).collect();
    let Some((&cmd, rest)) = args.split_first() else {
        return Err(Error::Config("missing command".into()));
    };
    let command = Command::parse(cmd)?;
    let mut file = None;
    let mut flags = BTreeMap::new();
    let mut i = 0;
    while i < rest.len() {
        let a = rest[i];
        if let Some(flag) = a.strip_prefix("--") {
            let (name, value) = match flag.split_once('=') {
                Some((n, v)) => (n, v.to_string()),
                None => {
                    i += 1;
                    let v = rest.get(i).ok_or_else(|| Error::Config(format!("--{flag} needs a value")))?;
                    (flag, v.to_string())
                }
            };
            match name {
                "config" => file = Some(value),
                "seed" | "out" | "tol" => {
                    flags.insert(name.to_string(), value);
                }
                _ => return Err(Error::Config(format!("unknown flag --{name}"))),
            }
        } else {
            insert(&mut flags, a, "argument")?;
        }
        i += 1;
    }
    let mut map = match file {
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Config(format!("cannot read {path}: {e}")))?;
            parse_config_text(&text)?
        }
        None => BTreeMap::new(),
    };
    map.extend(flags);

    if let Some(k) =
        map.keys().find(|k| !["seed", "out", "tol"].contains(&k.as_str()) && !command.keys().contains(&k.as_str()))
    {
        return Err(Error::Config(format!(
            "unknown key {k:?} for {}; accepted: {}",
            command.name(),
            command.keys().join(", ")
        )));
    }
    let seed = match map.remove("seed") {
        None => 0,
        Some(v) => v.parse().or_else(|_| bad("seed", &v, "a non-negative integer"))?,
    };
    let out = PathBuf::from(map.remove("out").unwrap_or_else(|| "out".into()));
    let tol = match map.remove("tol") {
        None => 1e-6,
        Some(v) => match v.parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => t,
            _ => return bad("tol", &v, "a positive number"),
        },
    };
    Ok(ExperimentConfig { command, params: Params(map), seed, out, tol })
}
