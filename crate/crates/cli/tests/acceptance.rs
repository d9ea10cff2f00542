//! Acceptance criteria, one line each. Runs as a plain binary so that the
//! report is printed whether or not the criteria pass.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use pqkant::bounds::bound_report;
use pqkant::convergence::{korovkin_sweep, vanishing_sweep, SequenceSpec, SweepSettings};
use pqkant::function::{absdev, bump, const1, holder, identity, sine, square};
use pqkant::moments::{verify_moments, Arithmetic, Moment, MomentReport};
use pqkant::operators::{apply_classical_reference, apply_k, basis_weights};
use pqkant::pq_calculus::{
    pq_binomial_expand, pq_integer, pq_integer_quotient, pq_integer_raw, pq_integral_unit, pq_power,
};
use pqkant::{BasisMode, ExactScalar, FunctionHandle, OperatorParams, PQPair, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn r(n: i64, d: i64) -> ExactScalar {
    ExactScalar::new(n, d)
}

/// `0 < q < p <= 1` with small denominators.
fn random_rational_pair(g: &mut ChaCha8Rng) -> (ExactScalar, ExactScalar) {
    let d = g.gen_range(2..=60);
    let p = r(g.gen_range(1..=d), d);
    let v = g.gen_range(2..=40);
    let ratio = r(g.gen_range(1..v), v);
    let q = p.clone() * ratio;
    (p, q)
}

fn primitives() -> Outcome {
    let mut g = rng(1);
    let mut mismatches = 0;
    let mut expand_checks = 0;
    for _ in 0..200 {
        let (p, q) = random_rational_pair(&mut g);
        for n in 0..=50 {
            if Some(pq_integer_raw(n, &p, &q)) != pq_integer_quotient(n, &p, &q) {
                mismatches += 1;
            }
        }
        let pq = PQPair::new(p, q).unwrap();
        let a = r(g.gen_range(-20..=20), g.gen_range(1..=9));
        let b = r(g.gen_range(-20..=20), g.gen_range(1..=9));
        for n in 0..=12 {
            expand_checks += 1;
            if pq_binomial_expand(&a, &b, n, &pq) != pq_power(&a, &b, n, &pq) {
                mismatches += 1;
            }
        }
    }
    outcome(
        mismatches == 0,
        format!("200 rational pairs, n<=50 sum vs quotient and {expand_checks} expansions n<=12; {mismatches} mismatches"),
    )
}

fn integral_oracle() -> Outcome {
    let mut g = rng(2);
    let tol = 1e-12;
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..100 {
        let p = g.gen_range(0.3..=1.0);
        let q = p * g.gen_range(0.05..=0.99);
        let pq = PQPair::new(p, q).unwrap();
        for j in 0..=6 {
            let exact = 1.0 / pq_integer(j + 1, &pq);
            let series = pq_integral_unit(|t| t.powi(j as i32), &pq, tol).unwrap();
            let rel = ((series - exact) / exact).abs();
            worst = worst.max(rel);
            if rel > 10.0 * tol {
                failures += 1;
            }
        }
    }
    outcome(failures == 0, format!("100 pairs x j<=6; worst relative error {worst:.2e} (limit 1e-11)"))
}

fn partition_of_unity() -> Outcome {
    let mut g = rng(3);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let n = g.gen_range(1..=40);
        let m = g.gen_range(0..=40 - n);
        let alpha = g.gen_range(0.0..3.0);
        let beta = alpha + g.gen_range(0.0..3.0);
        let b = g.gen_range(0.1..10.0);
        let p = g.gen_range(0.05..=1.0);
        let q = if g.gen_bool(0.1) { p } else { p * g.gen_range(0.01..=1.0) };
        let params = OperatorParams::new(n, m, alpha, beta, b, BasisMode::Normalized).unwrap();
        let pq = PQPair::new(p, q).unwrap();
        let x = g.gen_range(0.0..=b);
        let w = basis_weights(&params, &pq, &x).unwrap();
        worst = worst.max((w.sum() - 1.0).abs());
    }
    let params = OperatorParams::new(2, 0, 0.0, 0.0, 1.0, BasisMode::Literal).unwrap();
    let literal = basis_weights(&params, &PQPair::new(0.9, 0.8).unwrap(), &0.5).unwrap().sum();
    let pass = worst <= 1e-12 && (literal - 0.925).abs() <= 1e-12;
    outcome(pass, format!("500 instances, worst |sum-1| {worst:.2e}; literal counterexample sum {literal:.15}"))
}

fn classical_limit() -> Outcome {
    let cubic = FunctionHandle::polynomial("cubic", vec![0.5, -1.0, 0.25, 0.125]);
    let fns = [const1(), identity(), square(), cubic, sine()];
    let c = PQPair::classical();
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in [1usize, 2, 5, 10, 20, 27, 30] {
        for m in [0usize, 3] {
            if n + m > 30 {
                continue;
            }
            for (alpha, beta) in [(0.0, 0.0), (0.0, 1.0), (0.0, 2.0), (1.0, 1.0), (1.0, 2.0), (2.0, 2.0)] {
                for b in [1.0, 5.0] {
                    let params = OperatorParams::new(n, m, alpha, beta, b, BasisMode::Normalized).unwrap();
                    for i in 0..=4 {
                        let x = b * i as f64 / 4.0;
                        for f in &fns {
                            let ours = apply_k(f, x, &params, &c, 1e-13).unwrap();
                            let reference = apply_classical_reference(f, x, &params).unwrap();
                            worst = worst.max((ours - reference).abs());
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    outcome(worst <= 1e-10, format!("{count} evaluations (polynomials and sin); worst difference {worst:.2e}"))
}

fn archive_dir() -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn moments() -> Outcome {
    let mut g = rng(5);
    let c = PQPair::<ExactScalar>::classical();
    let mut worst_classical = 0.0f64;
    for _ in 0..200 {
        let n = g.gen_range(1..=25);
        let m = g.gen_range(0..=5);
        let alpha = r(g.gen_range(0..=8), 4);
        let beta = alpha.clone() + r(g.gen_range(0..=8), 4);
        let b = r(g.gen_range(1..=20), 4);
        let x = b.clone() * r(g.gen_range(0..=16), 16);
        let params = OperatorParams::new(n, m, alpha, beta, b, BasisMode::Normalized).unwrap();
        let rep = verify_moments(&params, &c, &x, Arithmetic::Float).unwrap();
        for which in [Moment::Zeroth, Moment::First, Moment::Central1] {
            worst_classical = worst_classical.max(rep.residuals.get(which).abs());
        }
    }

    let mut q_bernstein_ok = true;
    for _ in 0..40 {
        let n = g.gen_range(1..=8);
        let m = g.gen_range(0..=12 - n);
        let pq = PQPair::new(r(1, 1), r(g.gen_range(1..20), 20)).unwrap();
        let b = r(g.gen_range(1..=12), 3);
        let x = b.clone() * r(g.gen_range(0..=10), 10);
        let params = OperatorParams::new(n, m, r(0, 1), r(1, 1), b, BasisMode::Literal).unwrap();
        let rep = verify_moments(&params, &pq, &x, Arithmetic::Exact).unwrap();
        q_bernstein_ok &= rep.exact_residuals.unwrap().k1 == ExactScalar::zero();
    }

    let mut reports: Vec<MomentReport> = Vec::new();
    let mut identity_ok = true;
    for i in 0..24 {
        let n = 1 + i % 6;
        let m = i % 3;
        let (p, q) = random_rational_pair(&mut g);
        let p = if p == r(1, 1) { r(19, 20) } else { p };
        let q = if q >= p { p.clone() * r(1, 2) } else { q };
        let pq = PQPair::new(p, q).unwrap();
        let alpha = r(g.gen_range(0..=4), 2);
        let beta = alpha.clone() + r(g.gen_range(0..=4), 2);
        let b = r(g.gen_range(1..=10), 2);
        let x = b.clone() * r(g.gen_range(0..=8), 8);
        for mode in [BasisMode::Normalized, BasisMode::Literal] {
            let params = OperatorParams::new(n, m, alpha.clone(), beta.clone(), b.clone(), mode).unwrap();
            let rep = verify_moments(&params, &pq, &x, Arithmetic::Exact).unwrap();
            identity_ok &= rep.brute_identity_residual == 0.0;
            reports.push(rep);
        }
    }
    let path = archive_dir().join("moment_residual_reports.json");
    std::fs::write(&path, serde_json::to_string_pretty(&reports).unwrap()).unwrap();
    let max_abs = |which: Moment| reports.iter().map(|r| r.residuals.get(which).abs()).fold(0.0, f64::max);
    let instances = reports.len() / 2;
    let pass = worst_classical <= 1e-12 && q_bernstein_ok && instances >= 20 && identity_ok;
    outcome(
        pass,
        format!(
            "p=q=1 worst K(1),K(t),K(t-x) residual {worst_classical:.2e}; p=1 literal K(1) exact zero: {q_bernstein_ok}; \
             p<1 reports for {instances} instances x 2 modes (max |residual| K(t) {:.2e}, K(t^2) {:.2e}, K(t-x) {:.2e}, \
             K((t-x)^2) {:.2e}) archived to {}",
            max_abs(Moment::First),
            max_abs(Moment::Second),
            max_abs(Moment::Central1),
            max_abs(Moment::Central2),
            path.display()
        ),
    )
}

fn bound_validity() -> Outcome {
    let mut g = rng(6);
    let mut points = 0;
    let mut violations = 0;
    let mut tightest = 0.0f64;
    for _ in 0..1000 {
        let n = g.gen_range(1..=30);
        let m = g.gen_range(0..=3);
        let alpha = g.gen_range(0.0..2.0);
        let beta = alpha + g.gen_range(0.0..2.0);
        let b = g.gen_range(0.5..8.0);
        let p = g.gen_range(0.5..=1.0);
        let q = if g.gen_bool(0.1) && p == 1.0 { 1.0 } else { p * g.gen_range(0.3..=0.99) };
        let params = OperatorParams::new(n, m, alpha, beta, b, BasisMode::Normalized).unwrap();
        let pq = PQPair::new(p, q).unwrap();
        let x = g.gen_range(0.0..=b);
        let a = g.gen_range(0.0..b);
        let gamma = g.gen_range(0.1..=1.0);
        for f in [absdev(a), holder(a, gamma)] {
            let rep = bound_report(&f, x, &params, &pq, 1e-13).unwrap();
            let lip = f.lipschitz().unwrap();
            let t1 = lip.m * rep.mu.powf(lip.gamma / 2.0);
            let t2 = 2.0 * f.exact_modulus(rep.mu.sqrt()).unwrap();
            for bound in [t1, t2] {
                if rep.observed_error > bound * (1.0 + 1e-9) {
                    violations += 1;
                }
                if bound > 0.0 {
                    tightest = tightest.max(rep.observed_error / bound);
                }
            }
            points += 1;
        }
    }
    outcome(
        violations == 0,
        format!("{points} points (absdev, lip); {violations} violations of T1/T2; max observed/bound {tightest:.3}"),
    )
}

fn korovkin() -> Outcome {
    let recs = korovkin_sweep(&SequenceSpec::default(), &[], SweepSettings::default()).unwrap();
    let (first, last) = (recs.first().unwrap(), recs.last().unwrap());
    let e0 = recs.iter().map(|r| r.err_e0).fold(0.0, f64::max);
    let pass = e0 <= 1e-10 && last.err_e1 < 0.5 * first.err_e1 && last.err_e2 < first.err_e2;
    outcome(
        pass,
        format!(
            "max err_e0 {e0:.2e}; err_e1 {:.4e} -> {:.4e}; err_e2 {:.4e} -> {:.4e} (n={}..{})",
            first.err_e1, last.err_e1, first.err_e2, last.err_e2, first.n, last.n
        ),
    )
}

fn vanishing() -> Outcome {
    let recs = vanishing_sweep(&SequenceSpec::default(), &bump(2.0), SweepSettings::default()).unwrap();
    let (first, last) = (recs.first().unwrap(), recs.last().unwrap());
    outcome(
        last.sup_error < first.sup_error,
        format!("bump:2 sup error {:.4e} at n={} -> {:.4e} at n={}", first.sup_error, first.n, last.sup_error, last.n),
    )
}

fn reproducibility() -> Outcome {
    let dir = archive_dir().join("replay");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_pqkant")).args(args).current_dir(&dir).output().unwrap().status.success()
    };
    let runs: [&[&str]; 7] = [
        &["eval", "--fn", "lip:0.5:0.5", "--x", "0.3", "--n", "9", "--p", "0.95", "--q", "0.8", "--json", "eval.json"],
        &["verify", "--n", "4", "--m", "2", "--p", "9/10", "--q", "4/5", "--x", "1/3", "--exact", "--out", "verify.json"],
        &["verify", "--n", "40", "--p", "0.99", "--q", "0.97", "--bn", "3", "--x", "1.7", "--out", "verify_float.json"],
        &["bounds", "--fn", "absdev:2", "--n", "15", "--m", "2", "--alpha", "1", "--beta", "2", "--bn", "4",
          "--p", "0.97", "--q", "0.91", "--out", "bounds.csv"],
        &["converge", "--out", "converge.csv"],
        &["converge", "--n-list", "5,10,20", "--grid-points", "33", "--extra", "sin,lip:1:0.5,bump:2", "--out", "converge_extra.csv"],
        &["converge", "--vanish", "bump:2", "--out", "vanish.csv"],
    ];
    let mut mismatches = Vec::new();
    for args in runs {
        let out = *args.last().unwrap();
        let manifest = format!("{out}.manifest.json");
        let replayed = format!("replayed_{out}");
        let ok = run(args) && run(&["replay", &manifest, "--out", &replayed]);
        let same = ok && std::fs::read(dir.join(out)).ok() == std::fs::read(dir.join(&replayed)).ok();
        if !same {
            mismatches.push(out);
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("{} manifests replayed; mismatched outputs: {mismatches:?}", runs.len()),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("(p,q)-primitive equivalence", primitives),
        ("integral oracle", integral_oracle),
        ("partition of unity", partition_of_unity),
        ("classical-limit oracle", classical_limit),
        ("moment verification", moments),
        ("bound validity", bound_validity),
        ("Korovkin decay", korovkin),
        ("vanishing-function decay", vanishing),
        ("reproducibility", reproducibility),
    ];
    let mut report = String::new();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        failed += usize::from(!o.pass);
        let line = format!(
            "[{}] criterion {}: {name} ({:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
        println!("{line}");
        writeln!(report, "{line}").unwrap();
    }
    std::fs::write(archive_dir().join("summary.txt"), &report).unwrap();
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
