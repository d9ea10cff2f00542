//! Fully resolved command inputs. A job is what a manifest records, and
//! running it is a pure function of its fields.

use std::fmt::Write as _;

use pqkant::bounds::{bound_report, BoundReport};
use pqkant::convergence::{
    hypothesis_check, korovkin_sweep, sweep_csv, vanishing_csv, vanishing_sweep, SequenceSpec, SweepSettings,
};
use pqkant::moments::{verify_moments, Arithmetic, Moment};
use pqkant::operators::{apply_k, apply_t, apply_u};
use pqkant::{BasisMode, ExactScalar, FunctionHandle, OperatorParams, PQPair, Scalar};
use serde::{Deserialize, Serialize};

use crate::args::{BoundsArgs, ConvergeArgs, EvalArgs, OperatorArgs, OperatorKind, VerifyArgs};
use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Setup<S> {
    pub n: usize,
    pub m: usize,
    pub alpha: S,
    pub beta: S,
    pub bn: S,
    pub p: S,
    pub q: S,
    pub mode: BasisMode,
}

impl<S: Scalar> Setup<S> {
    pub fn params(&self) -> CliResult<OperatorParams<S>> {
        Ok(OperatorParams::new(
            self.n,
            self.m,
            self.alpha.clone(),
            self.beta.clone(),
            self.bn.clone(),
            self.mode,
        )?)
    }

    pub fn pq(&self) -> CliResult<PQPair<S>> {
        Ok(PQPair::new(self.p.clone(), self.q.clone())?)
    }
}

fn required<T: Clone>(value: &Option<T>, flag: &str) -> CliResult<T> {
    value.clone().ok_or_else(|| CliError::Usage(format!("--{flag} is required")))
}

/// A real given as a decimal or as a fraction `a/b`.
pub fn parse_real(s: &str) -> CliResult<f64> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(CliError::Usage(format!("non-finite value {s:?}"))),
        Err(_) => Ok(parse_exact(s)?.to_f64()),
    }
}

pub fn parse_exact(s: &str) -> CliResult<ExactScalar> {
    Ok(s.trim().parse::<ExactScalar>()?)
}

impl OperatorArgs {
    fn setup<S>(&self, parse: impl Fn(&str) -> CliResult<S>) -> CliResult<Setup<S>> {
        Ok(Setup {
            n: required(&self.n, "n")?,
            m: self.m,
            alpha: parse(&self.alpha)?,
            beta: parse(&self.beta)?,
            bn: parse(&self.bn)?,
            p: parse(&self.p)?,
            q: parse(&self.q)?,
            mode: self.mode,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalJob {
    #[serde(rename = "fn")]
    pub function: String,
    pub x: f64,
    pub operator: OperatorKind,
    pub tol: f64,
    pub setup: Setup<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyJob {
    pub x: ExactScalar,
    pub arithmetic: Arithmetic,
    pub setup: Setup<ExactScalar>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsJob {
    #[serde(rename = "fn")]
    pub function: String,
    pub points: usize,
    pub tol: f64,
    pub setup: Setup<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergeJob {
    pub spec: SequenceSpec,
    pub extra: Vec<String>,
    pub vanish: Option<String>,
    pub settings: SweepSettings,
    pub check_only: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "inputs", rename_all = "lowercase")]
pub enum Job {
    Eval(EvalJob),
    Verify(Box<VerifyJob>),
    Bounds(BoundsJob),
    Converge(ConvergeJob),
}

/// What a job produces: a short summary for stdout and the file contents.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub stdout: String,
    pub artifact: String,
}

impl TryFrom<&EvalArgs> for Job {
    type Error = CliError;

    fn try_from(a: &EvalArgs) -> CliResult<Job> {
        Ok(Job::Eval(EvalJob {
            function: required(&a.function, "fn")?,
            x: parse_real(&required(&a.x, "x")?)?,
            operator: a.operator,
            tol: a.tol,
            setup: a.op.setup(parse_real)?,
        }))
    }
}

impl TryFrom<&VerifyArgs> for Job {
    type Error = CliError;

    fn try_from(a: &VerifyArgs) -> CliResult<Job> {
        Ok(Job::Verify(Box::new(VerifyJob {
            x: parse_exact(&required(&a.x, "x")?)?,
            arithmetic: if a.exact { Arithmetic::Exact } else { Arithmetic::Float },
            setup: a.op.setup(parse_exact)?,
        })))
    }
}

impl TryFrom<&BoundsArgs> for Job {
    type Error = CliError;

    fn try_from(a: &BoundsArgs) -> CliResult<Job> {
        if a.points < 2 {
            return Err(CliError::Usage("--points must be at least 2".into()));
        }
        Ok(Job::Bounds(BoundsJob {
            function: required(&a.function, "fn")?,
            points: a.points,
            tol: a.tol,
            setup: a.op.setup(parse_real)?,
        }))
    }
}

impl TryFrom<&ConvergeArgs> for Job {
    type Error = CliError;

    fn try_from(a: &ConvergeArgs) -> CliResult<Job> {
        let spec = match &a.seq_file {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
                SequenceSpec::from_table(SequenceSpec::parse_table(&text)?)
            }
            None => SequenceSpec::from_rules(a.p_rule.parse()?, a.q_rule.parse()?, a.b_rule.parse()?, a.n_list.clone()),
        };
        if a.grid_points < 2 {
            return Err(CliError::Usage("--grid-points must be at least 2".into()));
        }
        Ok(Job::Converge(ConvergeJob {
            spec: spec.with_stancu(a.m, a.alpha, a.beta),
            extra: a.extra.clone(),
            vanish: a.vanish.clone(),
            settings: SweepSettings { grid_points: a.grid_points, rel_tol: a.tol },
            check_only: a.check_only,
        }))
    }
}

fn pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Job::Eval(_) => "eval",
            Job::Verify(_) => "verify",
            Job::Bounds(_) => "bounds",
            Job::Converge(_) => "converge",
        }
    }

    pub fn run(&self) -> CliResult<Rendered> {
        match self {
            Job::Eval(j) => run_eval(j),
            Job::Verify(j) => run_verify(j),
            Job::Bounds(j) => run_bounds(j),
            Job::Converge(j) => run_converge(j),
        }
    }
}

fn run_eval(j: &EvalJob) -> CliResult<Rendered> {
    let f = FunctionHandle::builtin(&j.function)?;
    let s = &j.setup;
    let pq = s.pq()?;
    let value = match j.operator {
        OperatorKind::K => apply_k(&f, j.x, &s.params()?, &pq, j.tol)?,
        OperatorKind::U => apply_u(&f, j.x, &s.params()?, &pq, j.tol)?,
        OperatorKind::T => apply_t(&f, j.x, s.n, s.m, &pq, s.mode, j.tol)?,
    };
    #[derive(Serialize)]
    struct EvalOutput<'a> {
        #[serde(flatten)]
        job: &'a EvalJob,
        value: f64,
    }
    Ok(Rendered { stdout: format!("{value}\n"), artifact: pretty_json(&EvalOutput { job: j, value }) })
}

fn run_verify(j: &VerifyJob) -> CliResult<Rendered> {
    let report = verify_moments(&j.setup.params()?, &j.setup.pq()?, &j.x, j.arithmetic)?;
    let mut stdout = String::from("moment closed brute residual\n");
    let names = ["K(1)", "K(t)", "K(t^2)", "K(t-x)", "K((t-x)^2)"];
    for (name, which) in names.iter().zip(Moment::ALL) {
        let exact = report.exact_residuals.as_ref().map(|r| format!(" ({})", r.get(which))).unwrap_or_default();
        writeln!(
            stdout,
            "{name} {:.16e} {:.16e} {:.3e}{exact}",
            report.closed.get(which),
            report.brute.get(which),
            report.residuals.get(which)
        )
        .unwrap();
    }
    Ok(Rendered { stdout, artifact: pretty_json(&report) })
}

fn run_bounds(j: &BoundsJob) -> CliResult<Rendered> {
    let f = FunctionHandle::builtin(&j.function)?;
    let params = j.setup.params()?;
    let pq = j.setup.pq()?;
    let last = j.points - 1;
    let mut artifact = format!("{}\n", BoundReport::CSV_HEADER);
    let (mut t1, mut t2, mut flagged) = (0usize, 0usize, 0usize);
    for i in 0..=last {
        let x = if i == last { j.setup.bn } else { j.setup.bn * i as f64 / last as f64 };
        let r = bound_report(&f, x, &params, &pq, j.tol)?;
        t1 += usize::from(r.holds_t1 == Some(false));
        t2 += usize::from(r.holds_t2 == Some(false));
        flagged += usize::from(r.holds_t2.is_some());
        artifact.push_str(&r.csv_row());
        artifact.push('\n');
    }
    let stdout = if flagged == 0 {
        format!("{} rows; modulus not exact, holds flags left empty\n", j.points)
    } else {
        format!("{} rows; T1 violations: {t1}; T2 violations: {t2}\n", j.points)
    };
    Ok(Rendered { stdout, artifact })
}

fn run_converge(j: &ConvergeJob) -> CliResult<Rendered> {
    if j.check_only {
        let report = hypothesis_check(&j.spec)?;
        let mut stdout = String::new();
        for v in report.violations() {
            writeln!(stdout, "invalid: {v}").unwrap();
        }
        for (name, t) in [
            ("1-p_n", &report.p_to_one),
            ("1-q_n", &report.q_to_one),
            ("|p_n^n-q_n^n|", &report.common_power_limit),
            ("b_n/[n]", &report.b_over_int),
            ("b_n^2/[n]", &report.b2_over_int),
        ] {
            writeln!(stdout, "{name}: {:?}", t.verdict).unwrap();
        }
        return Ok(Rendered { stdout, artifact: pretty_json(&report) });
    }
    if let Some(name) = &j.vanish {
        let f = FunctionHandle::builtin(name)?;
        let recs = vanishing_sweep(&j.spec, &f, j.settings)?;
        let stdout = match (recs.first(), recs.last()) {
            (Some(a), Some(b)) => format!("sup error n={}: {:.6e}, n={}: {:.6e}\n", a.n, a.sup_error, b.n, b.sup_error),
            _ => String::new(),
        };
        return Ok(Rendered { stdout, artifact: vanishing_csv(&recs) });
    }
    let extra = j.extra.iter().map(|s| FunctionHandle::builtin(s)).collect::<pqkant::Result<Vec<_>>>()?;
    let recs = korovkin_sweep(&j.spec, &extra, j.settings)?;
    let mut stdout = String::new();
    for r in &recs {
        writeln!(stdout, "n={} err_e0={:.3e} err_e1={:.6e} err_e2={:.6e}", r.n, r.err_e0, r.err_e1, r.err_e2).unwrap();
    }
    Ok(Rendered { stdout, artifact: sweep_csv(&recs) })
}
