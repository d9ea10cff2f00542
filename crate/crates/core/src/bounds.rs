//! Moduli of smoothness and the Lipschitz, modulus and Peetre-type error
//! bounds evaluated at single points.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::FunctionHandle;
use crate::moments::{alpha_beta_t3, mu};
use crate::operators::{apply_k, node_hull, BasisMode, OperatorParams};
use crate::pq_calculus::PQPair;

/// Subdivisions of `delta` used by the grid estimators.
pub const DELTA_SUBDIVISIONS: usize = 256;
/// Default number of domain steps.
pub const DOMAIN_STEPS: usize = 4096;
/// Constant used for the labelled, non-normative Peetre-type total.
pub const ILLUSTRATIVE_C: f64 = 2.0;

/// A modulus value and whether it came from exact metadata. Grid values
/// are lower estimates of the true supremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModulusValue {
    pub value: f64,
    pub exact: bool,
}

fn domain_points(lo: f64, hi: f64, step: f64) -> impl Iterator<Item = f64> {
    let count = ((hi - lo) / step).ceil().max(1.0) as usize;
    (0..=count).map(move |i| (lo + i as f64 * step).min(hi))
}

fn check(delta: f64, lo: f64, hi: f64, step: f64) -> Result<()> {
    if !(delta >= 0.0) || !(hi > lo) || !(step > 0.0) {
        return Err(Error::Domain(format!("bad modulus request: delta={delta}, domain=[{lo}, {hi}], step={step}")));
    }
    Ok(())
}

/// Grid lower estimate of `sup { |f(t) - f(y)| : |t - y| <= delta }` over
/// `[lo, hi]`. Pairs are `y` on a grid of spacing `grid_step` with offsets
/// `j delta / 256`, plus pairs ending at `hi`.
pub fn grid_modulus(f: &FunctionHandle, delta: f64, domain: (f64, f64), grid_step: f64) -> Result<f64> {
    let (lo, hi) = domain;
    check(delta, lo, hi, grid_step)?;
    let reach = delta.min(hi - lo);
    if reach == 0.0 {
        return Ok(0.0);
    }
    let offsets: Vec<f64> = (1..=DELTA_SUBDIVISIONS).map(|j| reach * j as f64 / DELTA_SUBDIVISIONS as f64).collect();
    let mut sup = 0.0f64;
    let mut scan = |y: f64| {
        let fy = f.eval(y);
        for &h in &offsets {
            let t = y + h;
            if t > hi {
                sup = sup.max((f.eval(hi) - fy).abs());
                break;
            }
            sup = sup.max((f.eval(t) - fy).abs());
        }
    };
    domain_points(lo, hi, grid_step).for_each(&mut scan);
    for &h in &offsets {
        scan(hi - h);
    }
    Ok(sup)
}

/// Grid lower estimate of `sup { |f(y+2h) - 2f(y+h) + f(y)| : 0 < h <= delta }`
/// with `y, y + 2h` in `[lo, hi]`.
pub fn grid_second_modulus(f: &FunctionHandle, delta: f64, domain: (f64, f64), grid_step: f64) -> Result<f64> {
    let (lo, hi) = domain;
    check(delta, lo, hi, grid_step)?;
    let reach = delta.min((hi - lo) / 2.0);
    if reach == 0.0 {
        return Ok(0.0);
    }
    let steps: Vec<f64> = (1..=DELTA_SUBDIVISIONS).map(|j| reach * j as f64 / DELTA_SUBDIVISIONS as f64).collect();
    let diff = |y: f64, h: f64| (f.eval(y + 2.0 * h) - 2.0 * f.eval(y + h) + f.eval(y)).abs();
    let mut sup = 0.0f64;
    for y in domain_points(lo, hi, grid_step) {
        for &h in &steps {
            if y + 2.0 * h > hi {
                break;
            }
            sup = sup.max(diff(y, h));
        }
    }
    for &h in &steps {
        sup = sup.max(diff(hi - 2.0 * h, h));
    }
    Ok(sup)
}

/// `omega(f; delta)`: exact metadata when present, otherwise [`grid_modulus`].
pub fn modulus(f: &FunctionHandle, delta: f64, domain: (f64, f64), grid_step: f64) -> Result<ModulusValue> {
    check(delta, domain.0, domain.1, grid_step)?;
    match f.exact_modulus(delta) {
        Some(value) => Ok(ModulusValue { value, exact: true }),
        None => Ok(ModulusValue { value: grid_modulus(f, delta, domain, grid_step)?, exact: false }),
    }
}

/// `omega_2(f; delta)`: exact metadata when present, otherwise
/// [`grid_second_modulus`].
pub fn second_modulus(f: &FunctionHandle, delta: f64, domain: (f64, f64), grid_step: f64) -> Result<ModulusValue> {
    check(delta, domain.0, domain.1, grid_step)?;
    match f.exact_second_modulus(delta) {
        Some(value) => Ok(ModulusValue { value, exact: true }),
        None => Ok(ModulusValue { value: grid_second_modulus(f, delta, domain, grid_step)?, exact: false }),
    }
}

/// Error bounds at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub x: f64,
    pub observed_error: f64,
    pub mu: f64,
    pub omega_at_sqrt_mu: f64,
    pub omega_exact: bool,
    /// `2 omega(f; sqrt(mu))`
    pub bound_t2: f64,
    /// `M mu^{gamma/2}` for `f` in `Lip_M(gamma)`.
    pub bound_t1: Option<f64>,
    pub alpha_n: f64,
    /// Signed; its absolute value is the modulus argument.
    pub beta_n: f64,
    pub omega2_at_sqrt_alpha: f64,
    pub omega_at_abs_beta: f64,
    /// `C omega_2 + omega` with `C = 2`. Not a proven bound: the constant
    /// is unspecified.
    pub illustrative_t3_total: f64,
    pub holds_t1: Option<bool>,
    pub holds_t2: Option<bool>,
}

impl BoundReport {
    pub const CSV_HEADER: &'static str = "x,observed_error,mu,omega_at_sqrt_mu,omega_exact,bound_T2,bound_T1,\
alpha_n,beta_n,omega2_at_sqrt_alpha,omega_at_abs_beta,illustrative_T3_total_C2,holds_T1,holds_T2";

    pub fn csv_row(&self) -> String {
        let e = |v: f64| format!("{v:.16e}");
        let opt_f = |v: Option<f64>| v.map(e).unwrap_or_default();
        let opt_b = |v: Option<bool>| v.map(|b| b.to_string()).unwrap_or_default();
        [
            e(self.x),
            e(self.observed_error),
            e(self.mu),
            e(self.omega_at_sqrt_mu),
            self.omega_exact.to_string(),
            e(self.bound_t2),
            opt_f(self.bound_t1),
            e(self.alpha_n),
            e(self.beta_n),
            e(self.omega2_at_sqrt_alpha),
            e(self.omega_at_abs_beta),
            e(self.illustrative_t3_total),
            opt_b(self.holds_t1),
            opt_b(self.holds_t2),
        ]
        .join(",")
    }
}

fn within(observed: f64, bound: f64) -> bool {
    observed <= bound * (1.0 + 1e-9) + 1e-12
}

/// Evaluates every bound at `x`. Moduli are taken over the node hull joined
/// with `x`; the second moment is the brute-force `mu`.
pub fn bound_report(
    f: &FunctionHandle,
    x: f64,
    params: &OperatorParams<f64>,
    pq: &PQPair<f64>,
    rel_tol: f64,
) -> Result<BoundReport> {
    if params.mode() != BasisMode::Normalized {
        return Err(Error::Domain("error bounds require the normalized basis".into()));
    }
    let observed_error = (apply_k(f, x, params, pq, rel_tol)? - f.eval(x)).abs();
    let mu_x = mu(params, pq, &x)?;
    let (hull_lo, hull_hi) = node_hull(params, pq);
    let domain = (hull_lo.min(x), hull_hi.max(x));
    let step = (domain.1 - domain.0) / DOMAIN_STEPS as f64;

    let sqrt_mu = mu_x.max(0.0).sqrt();
    let omega = modulus(f, sqrt_mu, domain, step)?;
    let bound_t2 = 2.0 * omega.value;
    let bound_t1 = f.lipschitz().map(|l| l.m * mu_x.max(0.0).powf(l.gamma / 2.0));

    let (alpha_n, beta_n) = alpha_beta_t3(params, pq, &x)?;
    let omega2 = second_modulus(f, alpha_n.max(0.0).sqrt(), domain, step)?;
    let omega_beta = modulus(f, beta_n.abs(), domain, step)?;

    Ok(BoundReport {
        x,
        observed_error,
        mu: mu_x,
        omega_at_sqrt_mu: omega.value,
        omega_exact: omega.exact,
        bound_t2,
        bound_t1,
        alpha_n,
        beta_n,
        omega2_at_sqrt_alpha: omega2.value,
        omega_at_abs_beta: omega_beta.value,
        illustrative_t3_total: ILLUSTRATIVE_C * omega2.value + omega_beta.value,
        holds_t1: bound_t1.map(|b| within(observed_error, b)),
        holds_t2: omega.exact.then(|| within(observed_error, bound_t2)),
    })
}
