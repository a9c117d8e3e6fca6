use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{LorentzPoint, Tolerances};
use crate::margin::{Label, LabeledSet};
use crate::train::TraceRow;

/// Shortest decimal that parses back to the same `f64`.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn join(v: &[f64], sep: &str) -> String {
    v.iter().map(|a| num(*a)).collect::<Vec<_>>().join(sep)
}

/// `d n` header, then `label x0 ... xd` per sample.
pub fn format_dataset(s: &LabeledSet) -> String {
    let mut out = format!("{} {}\n", s.dim(), s.len());
    for (x, y) in s.iter() {
        let _ = writeln!(out, "{} {}", y.as_i32(), join(x.as_slice(), " "));
    }
    out
}

/// Inverse of [`format_dataset`]. Every point must satisfy
/// `|x*x - 1| <= tol * max(1, x0^2)` and lie on the upper sheet.
pub fn parse_dataset(text: &str, tol: f64) -> Result<LabeledSet> {
    let tolerances = Tolerances { manifold: tol, ..Tolerances::default() };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty dataset".into() })?;
    let head: Vec<&str> = header.split_whitespace().collect();
    let parse_count =
        |s: &str| s.parse::<usize>().map_err(|_| Error::Parse { line: 1, msg: format!("bad header {header:?}") });
    if head.len() != 2 {
        return Err(Error::Parse { line: 1, msg: format!("header must be `d n`, got {header:?}") });
    }
    let (d, n) = (parse_count(head[0])?, parse_count(head[1])?);
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (no, line) in lines {
        let line_no = no + 1;
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != d + 2 {
            return Err(err(format!("expected {} fields, found {}", d + 2, fields.len())));
        }
        let y = fields[0].parse::<i32>().map_err(|_| err(format!("bad label {:?}", fields[0])))?;
        let y = Label::from_i32(y).map_err(|_| err(format!("label must be -1 or 1, got {y}")))?;
        let coords = fields[1..]
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| err(format!("bad number {f:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let p = LorentzPoint::with_tolerance(coords, &tolerances)
            .map_err(|e| err(format!("not on the hyperboloid: {e}")))?;
        points.push(p);
        labels.push(y);
    }
    if points.len() != n {
        return Err(Error::Parse { line: 1, msg: format!("header announces {n} samples, found {}", points.len()) });
    }
    LabeledSet::new(points, labels, d)
}

pub const TRACE_HEADER: &str = "iter,clean_loss,robust_loss,margin,eta,adv_count";

pub fn format_trace(rows: &[TraceRow]) -> String {
    let mut out = format!("{TRACE_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.iter,
            num(r.clean_loss),
            num(r.robust_loss),
            num(r.margin),
            num(r.eta),
            r.adv_count
        );
    }
    out
}

/// `name c0 c1 ...` per node.
pub fn format_coordinates<'a, I>(rows: I) -> String
where
    I: IntoIterator<Item = (&'a str, &'a [f64])>,
{
    rows.into_iter().map(|(name, c)| format!("{name} {}\n", join(c, " "))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::sample_separable;

    #[test]
    fn dataset_round_trip_is_exact() {
        let (s, _) = sample_separable(5, 40, 0.3, 2.0, 1).unwrap();
        let text = format_dataset(&s);
        let back = parse_dataset(&text, 1e-6).unwrap();
        assert_eq!(back, s);
        assert_eq!(format_dataset(&back), text);
    }

    #[test]
    fn loader_rejects_bad_files() {
        assert!(parse_dataset("", 1e-6).is_err());
        assert!(parse_dataset("2 1\n1 1.0 0.0\n", 1e-6).is_err());
        assert!(parse_dataset("2 1\n2 1.0 0.0 0.0\n", 1e-6).is_err());
        assert!(matches!(parse_dataset("2 1\n1 1.1 0.0 0.0\n", 1e-6), Err(Error::Parse { line: 2, .. })));
        assert!(parse_dataset("2 2\n1 1.0 0.0 0.0\n", 1e-6).is_err());
        assert!(parse_dataset("2 1\n1 -1.0 0.0 0.0\n", 1e-6).is_err());
        // Slightly off the surface: accepted at 1e-6, rejected at 1e-9.
        let text = "2 1\n-1 1.0000001 0.0 0.0\n";
        assert!(parse_dataset(text, 1e-6).is_ok());
        assert!(parse_dataset(text, 1e-9).is_err());
    }

    #[test]
    fn trace_format() {
        let rows = [TraceRow { iter: 0, clean_loss: 0.5, robust_loss: 0.75, margin: -0.1, eta: 0.25, adv_count: 3 }];
        assert_eq!(format_trace(&rows), "iter,clean_loss,robust_loss,margin,eta,adv_count\n0,0.5,0.75,-0.1,0.25,3\n");
    }
}
