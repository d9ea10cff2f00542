//! Korovkin-type experiments in the weighted space `C_{1+x^2}` and the
//! vanishing-function experiment, driven by sequences `(p_n, q_n, b_n)`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{const1, identity, square, FunctionHandle};
use crate::operators::{apply_k, apply_u, BasisMode, OperatorParams};
use crate::pq_calculus::{pq_integer, PQPair};

pub const DEFAULT_GRID_POINTS: usize = 257;
pub const DEFAULT_N_LIST: [usize; 6] = [10, 50, 100, 200, 400, 800];
/// Minimum log-log decay rate accepted as "vanishing".
pub const TREND_SLOPE: f64 = -0.1;

/// A named index-to-real rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum SequenceRule {
    /// `1 - 1/(n+1)^2`
    DefaultP,
    /// `1 - 2/(n+1)^2`
    DefaultQ,
    /// `n^{1/3}`
    Cbrt,
    /// `n`
    Linear,
    Const(f64),
    /// `n^e`
    Pow(f64),
}

impl SequenceRule {
    pub fn eval(&self, n: usize) -> f64 {
        let nf = n as f64;
        match *self {
            SequenceRule::DefaultP => 1.0 - 1.0 / ((nf + 1.0) * (nf + 1.0)),
            SequenceRule::DefaultQ => 1.0 - 2.0 / ((nf + 1.0) * (nf + 1.0)),
            SequenceRule::Cbrt => nf.cbrt(),
            SequenceRule::Linear => nf,
            SequenceRule::Const(c) => c,
            SequenceRule::Pow(e) => nf.powf(e),
        }
    }
}

impl fmt::Display for SequenceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceRule::DefaultP => f.write_str("default-p"),
            SequenceRule::DefaultQ => f.write_str("default-q"),
            SequenceRule::Cbrt => f.write_str("cbrt"),
            SequenceRule::Linear => f.write_str("linear"),
            SequenceRule::Const(c) => write!(f, "const:{c}"),
            SequenceRule::Pow(e) => write!(f, "pow:{e}"),
        }
    }
}

impl FromStr for SequenceRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let number = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Parse(format!("bad number in sequence rule {s:?}")))
        };
        Ok(match s {
            "default-p" => SequenceRule::DefaultP,
            "default-q" => SequenceRule::DefaultQ,
            "cbrt" => SequenceRule::Cbrt,
            "linear" => SequenceRule::Linear,
            _ => match s.split_once(':') {
                Some(("const", v)) => SequenceRule::Const(number(v)?),
                Some(("pow", v)) => SequenceRule::Pow(number(v)?),
                _ => return Err(Error::Parse(format!("unknown sequence rule {s:?}"))),
            },
        })
    }
}

impl From<SequenceRule> for String {
    fn from(r: SequenceRule) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for SequenceRule {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// One realized index of a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequencePoint {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceSource {
    Rules { p: SequenceRule, q: SequenceRule, b: SequenceRule, n_list: Vec<usize> },
    Table { rows: Vec<SequencePoint> },
}

/// Sequences `(p_n, q_n, b_n)` over an increasing list of `n`, with the
/// fixed operator parameters `m`, `alpha`, `beta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub source: SequenceSource,
    pub m: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for SequenceSpec {
    fn default() -> Self {
        Self {
            source: SequenceSource::Rules {
                p: SequenceRule::DefaultP,
                q: SequenceRule::DefaultQ,
                b: SequenceRule::Cbrt,
                n_list: DEFAULT_N_LIST.to_vec(),
            },
            m: 0,
            alpha: 0.0,
            beta: 0.0,
        }
    }
}

impl SequenceSpec {
    pub fn from_rules(p: SequenceRule, q: SequenceRule, b: SequenceRule, n_list: Vec<usize>) -> Self {
        Self { source: SequenceSource::Rules { p, q, b, n_list }, ..Self::default() }
    }

    pub fn from_table(rows: Vec<SequencePoint>) -> Self {
        Self { source: SequenceSource::Table { rows }, ..Self::default() }
    }

    pub fn with_stancu(mut self, m: usize, alpha: f64, beta: f64) -> Self {
        self.m = m;
        self.alpha = alpha;
        self.beta = beta;
        self
    }

    /// Parses `n,p,q,b` rows. A non-numeric first line is taken as a
    /// header; blank lines and `#` comments are skipped.
    pub fn parse_table(text: &str) -> Result<Vec<SequencePoint>> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if rows.is_empty() && i == 0 && fields[0].parse::<usize>().is_err() {
                continue;
            }
            let bad = || Error::Parse(format!("line {}: expected n,p,q,b but got {line:?}", i + 1));
            if fields.len() != 4 {
                return Err(bad());
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
            rows.push(SequencePoint {
                n: fields[0].parse().map_err(|_| bad())?,
                p: num(fields[1])?,
                q: num(fields[2])?,
                b: num(fields[3])?,
            });
        }
        Ok(rows)
    }

    /// The realized points, in order. Errors when `n` is not a strictly
    /// increasing list of positive integers.
    pub fn points(&self) -> Result<Vec<SequencePoint>> {
        let points: Vec<SequencePoint> = match &self.source {
            SequenceSource::Rules { p, q, b, n_list } => {
                n_list.iter().map(|&n| SequencePoint { n, p: p.eval(n), q: q.eval(n), b: b.eval(n) }).collect()
            }
            SequenceSource::Table { rows } => rows.clone(),
        };
        if points.is_empty() {
            return Err(Error::Domain("empty n list".into()));
        }
        if points[0].n == 0 || points.windows(2).any(|w| w[1].n <= w[0].n) {
            return Err(Error::Domain("n list must be strictly increasing positive integers".into()));
        }
        Ok(points)
    }
}

/// Verdict on whether a positive sequence tends to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Vanishing,
    NotVanishing,
    /// Fewer than two usable points.
    Undetermined,
}

/// Least-squares slope of `log v` against `log n`; exact zeros at the end
/// of the sequence count as vanishing.
pub fn trend(ns: &[usize], values: &[f64]) -> (Trend, Option<f64>) {
    if values.last().is_some_and(|v| *v == 0.0) && values.iter().all(|v| v.is_finite()) {
        return (Trend::Vanishing, None);
    }
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(values)
        .filter(|(_, v)| v.is_finite() && **v > 0.0)
        .map(|(n, v)| ((*n as f64).ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return (Trend::Undetermined, None);
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (if slope <= TREND_SLOPE { Trend::Vanishing } else { Trend::NotVanishing }, Some(slope))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisRow {
    pub n: usize,
    pub p_n: f64,
    pub q_n: f64,
    pub b_n: f64,
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub issue: Option<String>,
    pub p_pow_n: f64,
    pub q_pow_n: f64,
    /// `b_n / [n]`
    pub b_over_int: f64,
    /// `b_n^2 / [n]`
    pub b2_over_int: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendReport {
    pub verdict: Trend,
    pub slope: Option<f64>,
}

impl From<(Trend, Option<f64>)> for TrendReport {
    fn from((verdict, slope): (Trend, Option<f64>)) -> Self {
        Self { verdict, slope }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub rows: Vec<HypothesisRow>,
    pub all_valid: bool,
    /// `1 - p_n -> 0`
    pub p_to_one: TrendReport,
    /// `1 - q_n -> 0`
    pub q_to_one: TrendReport,
    /// `|p_n^n - q_n^n| -> 0`, the common-limit requirement.
    pub common_power_limit: TrendReport,
    pub b_over_int: TrendReport,
    pub b2_over_int: TrendReport,
}

impl HypothesisReport {
    /// Per-row diagnostics for invalid rows.
    pub fn violations(&self) -> Vec<String> {
        self.rows
            .iter()
            .filter_map(|r| r.issue.as_ref().map(|i| format!("n={}: {i}", r.n)))
            .collect()
    }
}

fn row_issue(pt: &SequencePoint) -> Option<String> {
    if !(pt.p.is_finite() && pt.q.is_finite() && pt.b.is_finite()) {
        Some("non-finite value".into())
    } else if !(pt.q > 0.0) {
        Some(format!("q_n={} is not positive", pt.q))
    } else if !(pt.q < pt.p) {
        Some(format!("q_n={} is not below p_n={}", pt.q, pt.p))
    } else if pt.p > 1.0 {
        Some(format!("p_n={} exceeds 1", pt.p))
    } else if !(pt.b > 0.0) {
        Some(format!("b_n={} is not positive", pt.b))
    } else {
        None
    }
}

/// Report-only check of the sequence hypotheses. Errors only when the
/// index list itself is malformed.
pub fn hypothesis_check(spec: &SequenceSpec) -> Result<HypothesisReport> {
    let points = spec.points()?;
    let rows: Vec<HypothesisRow> = points
        .iter()
        .map(|pt| {
            let issue = row_issue(pt);
            let int = PQPair::new(pt.p, pt.q).map_or(f64::NAN, |pq| pq_integer(pt.n, &pq));
            HypothesisRow {
                n: pt.n,
                p_n: pt.p,
                q_n: pt.q,
                b_n: pt.b,
                valid: issue.is_none(),
                issue,
                p_pow_n: pt.p.powi(pt.n as i32),
                q_pow_n: pt.q.powi(pt.n as i32),
                b_over_int: pt.b / int,
                b2_over_int: pt.b * pt.b / int,
            }
        })
        .collect();
    let ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    let col = |f: fn(&HypothesisRow) -> f64| -> TrendReport {
        let v: Vec<f64> = rows.iter().map(f).collect();
        trend(&ns, &v).into()
    };
    Ok(HypothesisReport {
        all_valid: rows.iter().all(|r| r.valid),
        p_to_one: col(|r| 1.0 - r.p_n),
        q_to_one: col(|r| 1.0 - r.q_n),
        common_power_limit: col(|r| (r.p_pow_n - r.q_pow_n).abs()),
        b_over_int: col(|r| r.b_over_int),
        b2_over_int: col(|r| r.b2_over_int),
        rows,
    })
}

fn grid(b: f64, points: usize) -> impl Iterator<Item = f64> {
    let last = points.max(2) - 1;
    (0..=last).map(move |i| if i == last { b } else { b * i as f64 / last as f64 })
}

/// `max |U f(x) - f(x)| / (1 + x^2)` over a uniform grid of `[0, b_n]`.
/// Beyond `b_n` the extension makes the error vanish.
pub fn weighted_sup_error(
    f: &FunctionHandle,
    params: &OperatorParams<f64>,
    pq: &PQPair<f64>,
    grid_points: usize,
    rel_tol: f64,
) -> Result<f64> {
    normalized(params)?;
    let mut sup = 0.0f64;
    for x in grid(*params.b_n(), grid_points) {
        let err = (apply_u(f, x, params, pq, rel_tol)? - f.eval(x)).abs() / (1.0 + x * x);
        sup = sup.max(err);
    }
    Ok(sup)
}

/// `max |K f(x) - f(x)|` over a uniform grid of `[0, b_n]`.
pub fn sup_error(
    f: &FunctionHandle,
    params: &OperatorParams<f64>,
    pq: &PQPair<f64>,
    grid_points: usize,
    rel_tol: f64,
) -> Result<f64> {
    let mut sup = 0.0f64;
    for x in grid(*params.b_n(), grid_points) {
        sup = sup.max((apply_k(f, x, params, pq, rel_tol)? - f.eval(x)).abs());
    }
    Ok(sup)
}

fn normalized(params: &OperatorParams<f64>) -> Result<()> {
    if params.mode() != BasisMode::Normalized {
        return Err(Error::Domain("convergence experiments require the normalized basis".into()));
    }
    Ok(())
}

/// Grid and tolerance settings shared by the sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    pub grid_points: usize,
    pub rel_tol: f64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self { grid_points: DEFAULT_GRID_POINTS, rel_tol: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub n: usize,
    pub p_n: f64,
    pub q_n: f64,
    pub b_n: f64,
    pub err_e0: f64,
    pub err_e1: f64,
    pub err_e2: f64,
    /// Errors for extra functions, in the order given.
    pub err_extra: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VanishingRecord {
    pub n: usize,
    pub p_n: f64,
    pub q_n: f64,
    pub b_n: f64,
    pub sup_error: f64,
}

type Instance = (SequencePoint, OperatorParams<f64>, PQPair<f64>);

fn realize(spec: &SequenceSpec) -> Result<Vec<Instance>> {
    let report = hypothesis_check(spec)?;
    if !report.all_valid {
        return Err(Error::Domain(format!("sequence hypotheses violated: {}", report.violations().join("; "))));
    }
    spec.points()?
        .into_iter()
        .map(|pt| {
            let params = OperatorParams::new(pt.n, spec.m, spec.alpha, spec.beta, pt.b, BasisMode::Normalized)?;
            Ok((pt, params, PQPair::new(pt.p, pt.q)?))
        })
        .collect()
}

/// Weighted sup errors of `1`, `t`, `t^2` and `extra` for every `n`,
/// ordered by `n`. Rows are computed in parallel.
pub fn korovkin_sweep(
    spec: &SequenceSpec,
    extra: &[FunctionHandle],
    settings: SweepSettings,
) -> Result<Vec<SweepRecord>> {
    let (e0, e1, e2) = (const1(), identity(), square());
    realize(spec)?
        .par_iter()
        .map(|(pt, params, pq)| {
            let err = |f: &FunctionHandle| weighted_sup_error(f, params, pq, settings.grid_points, settings.rel_tol);
            Ok(SweepRecord {
                n: pt.n,
                p_n: pt.p,
                q_n: pt.q,
                b_n: pt.b,
                err_e0: err(&e0)?,
                err_e1: err(&e1)?,
                err_e2: err(&e2)?,
                err_extra: extra.iter().map(|f| Ok((f.name().to_string(), err(f)?))).collect::<Result<_>>()?,
            })
        })
        .collect()
}

/// Unweighted sup errors of a compactly supported `f` for every `n`.
pub fn vanishing_sweep(spec: &SequenceSpec, f: &FunctionHandle, settings: SweepSettings) -> Result<Vec<VanishingRecord>> {
    if f.support_bound().is_none() {
        return Err(Error::Domain(format!("{} has no support bound", f.name())));
    }
    realize(spec)?
        .par_iter()
        .map(|(pt, params, pq)| {
            Ok(VanishingRecord {
                n: pt.n,
                p_n: pt.p,
                q_n: pt.q,
                b_n: pt.b,
                sup_error: sup_error(f, params, pq, settings.grid_points, settings.rel_tol)?,
            })
        })
        .collect()
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV with header `n,p_n,q_n,b_n,err_e0,err_e1,err_e2[,err_<name>...]`.
pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from("n,p_n,q_n,b_n,err_e0,err_e1,err_e2");
    if let Some(first) = records.first() {
        for (name, _) in &first.err_extra {
            out.push_str(&format!(",err_{name}"));
        }
    }
    out.push('\n');
    for r in records {
        let mut fields = vec![r.n.to_string(), sci(r.p_n), sci(r.q_n), sci(r.b_n), sci(r.err_e0), sci(r.err_e1), sci(r.err_e2)];
        fields.extend(r.err_extra.iter().map(|(_, v)| sci(*v)));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// CSV with header `n,p_n,q_n,b_n,sup_error`.
pub fn vanishing_csv(records: &[VanishingRecord]) -> String {
    let mut out = String::from("n,p_n,q_n,b_n,sup_error\n");
    for r in records {
        out.push_str(&[r.n.to_string(), sci(r.p_n), sci(r.q_n), sci(r.b_n), sci(r.sup_error)].join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{bump, sine};

    fn quick() -> SweepSettings {
        SweepSettings { grid_points: 65, rel_tol: 1e-12 }
    }

    #[test]
    fn weighted_error_examples() {
        let params = OperatorParams::new(1, 0, 0.0, 0.0, 1.0, BasisMode::Normalized).unwrap();
        let c = PQPair::classical();
        assert_eq!(weighted_sup_error(&const1(), &params, &c, 257, 1e-12).unwrap(), 0.0);
        let e1 = weighted_sup_error(&identity(), &params, &c, 257, 1e-12).unwrap();
        assert!((e1 - 0.25).abs() < 1e-15);
        // Independent oracle: maximize |1/4 - x/2| / (1 + x^2) on a fine grid.
        let oracle = (0..=100_000)
            .map(|i| i as f64 / 100_000.0)
            .map(|x| (0.25 - x / 2.0).abs() / (1.0 + x * x))
            .fold(0.0f64, f64::max);
        assert!((e1 - oracle).abs() < 1e-12);
        let pq = PQPair::new(0.9, 0.7).unwrap();
        let e2 = weighted_sup_error(&square(), &params, &pq, 257, 1e-12).unwrap();
        assert!(e2.is_finite() && e2 >= 0.0);
    }

    #[test]
    fn rule_parsing_round_trips() {
        for s in ["default-p", "default-q", "cbrt", "linear", "const:0.5", "pow:0.25"] {
            let r: SequenceRule = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert!("pow:x".parse::<SequenceRule>().is_err());
        assert!("sqrt".parse::<SequenceRule>().is_err());
        let spec = SequenceSpec::default().with_stancu(2, 1.0, 2.0);
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<SequenceSpec>(&json).unwrap(), spec);
    }

    #[test]
    fn default_spec_satisfies_hypotheses() {
        let report = hypothesis_check(&SequenceSpec::default()).unwrap();
        assert!(report.all_valid);
        for t in [&report.p_to_one, &report.q_to_one, &report.common_power_limit, &report.b_over_int, &report.b2_over_int] {
            assert_eq!(t.verdict, Trend::Vanishing, "{report:?}");
        }
        for w in report.rows.windows(2) {
            assert!(w[1].p_pow_n > w[0].p_pow_n && w[1].q_pow_n > w[0].q_pow_n);
        }
        let last = report.rows.last().unwrap();
        assert!(last.p_pow_n > 0.998 && last.q_pow_n > 0.997);
    }

    #[test]
    fn invalid_rows_are_flagged() {
        let rows = vec![
            SequencePoint { n: 5, p: 0.9, q: 0.8, b: 1.0 },
            SequencePoint { n: 10, p: 0.8, q: 0.8, b: 1.0 },
            SequencePoint { n: 20, p: 0.9, q: 0.95, b: 1.0 },
        ];
        let spec = SequenceSpec::from_table(rows);
        let report = hypothesis_check(&spec).unwrap();
        assert_eq!(report.rows.iter().map(|r| r.valid).collect::<Vec<_>>(), [true, false, false]);
        assert_eq!(report.violations().len(), 2);
        let err = korovkin_sweep(&spec, &[], quick()).unwrap_err().to_string();
        assert!(err.contains("n=10") && err.contains("n=20"), "{err}");
    }

    #[test]
    fn linear_b_is_not_vanishing() {
        let spec = SequenceSpec::from_rules(
            SequenceRule::DefaultP,
            SequenceRule::DefaultQ,
            SequenceRule::Linear,
            DEFAULT_N_LIST.to_vec(),
        );
        let report = hypothesis_check(&spec).unwrap();
        assert_eq!(report.b_over_int.verdict, Trend::NotVanishing);
        let single = SequenceSpec::from_rules(SequenceRule::DefaultP, SequenceRule::DefaultQ, SequenceRule::Cbrt, vec![7]);
        assert_eq!(hypothesis_check(&single).unwrap().b_over_int.verdict, Trend::Undetermined);
    }

    #[test]
    fn malformed_n_list() {
        let mut spec = SequenceSpec::from_rules(SequenceRule::DefaultP, SequenceRule::DefaultQ, SequenceRule::Cbrt, vec![10, 5]);
        assert!(hypothesis_check(&spec).is_err());
        spec.source = SequenceSource::Rules { p: SequenceRule::DefaultP, q: SequenceRule::DefaultQ, b: SequenceRule::Cbrt, n_list: vec![] };
        assert!(spec.points().is_err());
    }

    #[test]
    fn table_parsing() {
        let text = "n,p,q,b\n# comment\n10,0.99,0.98,2.0\n\n20,0.995,0.99,2.5\n";
        let rows = SequenceSpec::parse_table(text).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1], SequencePoint { n: 20, p: 0.995, q: 0.99, b: 2.5 });
        assert!(SequenceSpec::parse_table("10,0.9,0.8").is_err());
        assert!(SequenceSpec::parse_table("10,0.9,x,1").is_err());
    }

    #[test]
    fn single_n_equals_direct_call() {
        let spec = SequenceSpec::from_rules(SequenceRule::DefaultP, SequenceRule::DefaultQ, SequenceRule::Cbrt, vec![30])
            .with_stancu(1, 1.0, 2.0);
        let rec = korovkin_sweep(&spec, &[sine()], quick()).unwrap();
        let pt = spec.points().unwrap()[0];
        let params = OperatorParams::new(30, 1, 1.0, 2.0, pt.b, BasisMode::Normalized).unwrap();
        let pq = PQPair::new(pt.p, pt.q).unwrap();
        assert_eq!(rec[0].err_e1, weighted_sup_error(&identity(), &params, &pq, 65, 1e-12).unwrap());
        assert_eq!(rec[0].err_extra[0], ("sin".into(), weighted_sup_error(&sine(), &params, &pq, 65, 1e-12).unwrap()));
    }

    #[test]
    fn small_sweep_decays_and_is_ordered() {
        let spec = SequenceSpec::from_rules(SequenceRule::DefaultP, SequenceRule::DefaultQ, SequenceRule::Cbrt, vec![5, 20, 80]);
        let recs = korovkin_sweep(&spec, &[], quick()).unwrap();
        assert_eq!(recs.iter().map(|r| r.n).collect::<Vec<_>>(), [5, 20, 80]);
        assert!(recs.iter().all(|r| r.err_e0 <= 1e-10));
        assert!(recs[2].err_e1 < recs[0].err_e1 && recs[2].err_e2 < recs[0].err_e2);
        let csv = sweep_csv(&recs);
        assert!(csv.starts_with("n,p_n,q_n,b_n,err_e0,err_e1,err_e2\n5,"));
        assert_eq!(csv.lines().count(), 4);
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn vanishing_examples() {
        let spec = SequenceSpec::from_rules(SequenceRule::DefaultP, SequenceRule::DefaultQ, SequenceRule::Cbrt, vec![10, 100]);
        let zero = FunctionHandle::polynomial("zero", vec![0.0]).with_support_bound(0.0);
        assert!(vanishing_sweep(&spec, &zero, quick()).unwrap().iter().all(|r| r.sup_error == 0.0));
        let recs = vanishing_sweep(&spec, &bump(2.0), quick()).unwrap();
        assert!(recs[1].sup_error < recs[0].sup_error);
        assert!(vanishing_sweep(&spec, &sine(), quick()).is_err());
        // Support beyond every b_n: the same as a plain sup-error sweep.
        let wide = bump(50.0);
        let recs = vanishing_sweep(&spec, &wide, quick()).unwrap();
        for (r, pt) in recs.iter().zip(spec.points().unwrap()) {
            let params = OperatorParams::new(pt.n, 0, 0.0, 0.0, pt.b, BasisMode::Normalized).unwrap();
            let pq = PQPair::new(pt.p, pt.q).unwrap();
            assert_eq!(r.sup_error, sup_error(&wide, &params, &pq, 65, 1e-12).unwrap());
        }
        assert!(vanishing_csv(&recs).starts_with("n,p_n,q_n,b_n,sup_error\n10,"));
    }

    #[test]
    fn literal_mode_rejected() {
        let params = OperatorParams::new(3, 0, 0.0, 0.0, 1.0, BasisMode::Literal).unwrap();
        let pq = PQPair::new(0.9, 0.8).unwrap();
        assert!(weighted_sup_error(&identity(), &params, &pq, 9, 1e-12).is_err());
    }
}
