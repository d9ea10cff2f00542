//! The Kantorovich (p,q)-Bernstein-Schurer operator `T_{n,m}` and its
//! Chlodowsky-Stancu generalisation `K_{n,m}^{(alpha,beta)}`, evaluated by
//! direct summation over the basis.
//!
//! For weight `k` the inner integral is `int_0^1 f(node(k,t)) d_{p,q}t` with
//! the affine node map
//! `node(k,t) = ((1-t)[k] + [k+1] t + alpha) b_n / ([n+1] + beta)`.
//! How that integral is computed depends on what the function handle knows
//! about itself:
//!
//! | handle metadata        | `q < p`                    | `p = q = 1`                 |
//! |------------------------|----------------------------|-----------------------------|
//! | polynomial             | monomial rule `1/[l+1]`    | monomial rule (`1/(l+1)`)   |
//! | piecewise polynomial   | closed-form geometric tails| exact piecewise integration |
//! | antiderivative         | truncated series           | `(F(b)-F(a))/(b-a)`         |
//! | none                   | truncated series           | Gauss-Legendre              |
//!
//! `p = q < 1` is only supported for polynomials.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{FunctionHandle, PiecewisePolynomial};
use crate::pq_calculus::{
    pq_binomial, pq_integer, pq_integral_monomial, pq_integral_monomial_tail,
    pq_integral_unit, series_node, PQPair,
};
use crate::quadrature;
use crate::scalar::Scalar;

/// Normalisation of the (p,q)-Bernstein basis.
///
/// `Literal` uses `[N k] x^k prod_{s<N-k}(p^s - q^s x)` verbatim, whose sum
/// is not 1 when `p < 1`. `Normalized` multiplies weight `k` by
/// `p^{k(k-1)/2 - N(N-1)/2}`, which restores the partition of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisMode {
    Literal,
    #[default]
    Normalized,
}

impl fmt::Display for BasisMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisMode::Literal => "literal",
            BasisMode::Normalized => "normalized",
        })
    }
}

impl FromStr for BasisMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(BasisMode::Literal),
            "normalized" => Ok(BasisMode::Normalized),
            _ => Err(Error::Parse(format!("unknown basis mode {s:?}"))),
        }
    }
}

/// Parameters of one operator instance: degree `n`, Schurer shift `m`,
/// Stancu pair `alpha <= beta` and Chlodowsky scale `b_n`.
///
/// Integer `m`, `alpha`, `beta` is the documented regime; real `alpha`,
/// `beta` are accepted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorParams<S = f64> {
    n: usize,
    m: usize,
    alpha: S,
    beta: S,
    b_n: S,
    mode: BasisMode,
}

impl<S: Scalar> OperatorParams<S> {
    pub fn new(n: usize, m: usize, alpha: S, beta: S, b_n: S, mode: BasisMode) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("n must be positive".into()));
        }
        if !(alpha >= S::zero() && alpha <= beta) {
            return Err(Error::Domain(format!(
                "Stancu parameters need 0 <= alpha <= beta, got alpha={alpha:?}, beta={beta:?}"
            )));
        }
        if !(b_n > S::zero()) {
            return Err(Error::Domain(format!("b_n must be positive, got {b_n:?}")));
        }
        Ok(Self { n, m, alpha, beta, b_n, mode })
    }

    /// `alpha = beta = 0`, `b_n = 1`: the operator `T_{n,m}`.
    pub fn kantorovich(n: usize, m: usize, mode: BasisMode) -> Result<Self> {
        Self::new(n, m, S::zero(), S::zero(), S::one(), mode)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn alpha(&self) -> &S {
        &self.alpha
    }

    pub fn beta(&self) -> &S {
        &self.beta
    }

    pub fn b_n(&self) -> &S {
        &self.b_n
    }

    pub fn mode(&self) -> BasisMode {
        self.mode
    }

    /// `n + m`, the number of basis functions minus one.
    pub fn degree(&self) -> usize {
        self.n + self.m
    }

    pub fn with_mode(mut self, mode: BasisMode) -> Self {
        self.mode = mode;
        self
    }

    /// `x / b_n`, rejecting `x` outside `[0, b_n]`.
    pub fn normalized_x(&self, x: &S) -> Result<S> {
        if !(*x >= S::zero() && *x <= self.b_n) {
            return Err(Error::Domain(format!("x={x:?} outside [0, b_n={:?}]", self.b_n)));
        }
        Ok(x.clone() / self.b_n.clone())
    }

    pub fn to_f64(&self) -> OperatorParams<f64> {
        OperatorParams {
            n: self.n,
            m: self.m,
            alpha: self.alpha.to_f64(),
            beta: self.beta.to_f64(),
            b_n: self.b_n.to_f64(),
            mode: self.mode,
        }
    }
}

/// Basis weights `w_k`, `k = 0..=n+m`, at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<S = f64> {
    pub weights: Vec<S>,
    /// `x / b_n`.
    pub x_norm: S,
}

impl<S: Scalar> WeightVector<S> {
    pub fn sum(&self) -> S {
        self.weights.iter().cloned().fold(S::zero(), |a, b| a + b)
    }
}

/// Basis weights through the factorisation
/// `[N k]_{p,q} = p^{k(N-k)} [N k]_{1,q/p}` and
/// `prod_{s<N-k}(p^s - q^s x) = p^{(N-k)(N-k-1)/2} prod_{s<N-k}(1 - (q/p)^s x)`.
/// The normalised weights then carry no powers of `p` at all, which keeps
/// them finite for small `p` and large `N`.
pub fn basis_weights<S: Scalar>(params: &OperatorParams<S>, pq: &PQPair<S>, x: &S) -> Result<WeightVector<S>> {
    let xt = params.normalized_x(x)?;
    let big_n = params.degree();
    let r = pq.ratio();

    let mut r_pow = Vec::with_capacity(big_n + 1);
    let mut acc = S::one();
    for _ in 0..=big_n {
        r_pow.push(acc.clone());
        acc = acc * r.clone();
    }
    // [j]_{1,r}
    let mut r_int = Vec::with_capacity(big_n + 1);
    r_int.push(S::zero());
    for j in 0..big_n {
        let next = r_int[j].clone() + r_pow[j].clone();
        r_int.push(next);
    }
    let mut gauss = Vec::with_capacity(big_n + 1);
    gauss.push(S::one());
    for k in 1..=big_n {
        let next = gauss[k - 1].clone() * r_int[big_n - k + 1].clone() / r_int[k].clone();
        gauss.push(next);
    }
    let mut tail = vec![S::one(); big_n + 1];
    for k in (0..big_n).rev() {
        tail[k] = tail[k + 1].clone() * (S::one() - r_pow[big_n - k - 1].clone() * xt.clone());
    }

    let mut weights = Vec::with_capacity(big_n + 1);
    let mut x_pow = S::one();
    for k in 0..=big_n {
        let mut w = gauss[k].clone() * x_pow.clone() * tail[k].clone();
        if params.mode() == BasisMode::Literal {
            let j = big_n - k;
            w = w * pq.p().powu(k * j + j * j.saturating_sub(1) / 2);
        }
        weights.push(w);
        x_pow = x_pow * xt.clone();
    }
    Ok(WeightVector { weights, x_norm: xt })
}

/// Verbatim transcription of the weights,
/// `[N k]_{p,q} prod_{s<N-k}(p^s - q^s x) x^k` times the normalising power
/// of `p` in normalised mode. Quadratic cost; kept as a cross-check for
/// [`basis_weights`], most useful with exact scalars.
pub fn basis_weights_direct<S: Scalar>(
    params: &OperatorParams<S>,
    pq: &PQPair<S>,
    x: &S,
) -> Result<WeightVector<S>> {
    let xt = params.normalized_x(x)?;
    let big_n = params.degree();
    let mut weights = Vec::with_capacity(big_n + 1);
    for k in 0..=big_n {
        let mut prod = S::one();
        for s in 0..big_n - k {
            prod = prod * (pq.p().powu(s) - pq.q().powu(s) * xt.clone());
        }
        let mut w = pq_binomial(big_n, k, pq)? * prod * xt.powu(k);
        if params.mode() == BasisMode::Normalized {
            let up = k * k.saturating_sub(1) / 2;
            let down = big_n * (big_n - 1) / 2;
            w = w * pq.p().powu(up) / pq.p().powu(down);
        }
        weights.push(w);
    }
    Ok(WeightVector { weights, x_norm: xt })
}

/// Precomputed `[0..=N+1]_{p,q}` and the node scale `b_n / ([n+1] + beta)`.
struct NodeMap<S> {
    ints: Vec<S>,
    alpha: S,
    scale: S,
}

impl<S: Scalar> NodeMap<S> {
    fn new(params: &OperatorParams<S>, pq: &PQPair<S>) -> Self {
        let ints: Vec<S> = (0..=params.degree() + 1).map(|j| pq_integer(j, pq)).collect();
        let denom = ints[params.n() + 1].clone() + params.beta().clone();
        Self { alpha: params.alpha().clone(), scale: params.b_n().clone() / denom, ints }
    }

    /// `(a, c)` with `node(k, t) = (a + c t) * scale`.
    fn affine(&self, k: usize) -> (S, S) {
        (
            self.ints[k].clone() + self.alpha.clone(),
            self.ints[k + 1].clone() - self.ints[k].clone(),
        )
    }

    /// `(a*scale, c*scale)`: the node map in output units.
    fn scaled(&self, k: usize) -> (S, S) {
        let (a, c) = self.affine(k);
        (a * self.scale.clone(), c * self.scale.clone())
    }
}

/// `((1-t)[k] + [k+1] t + alpha) b_n / ([n+1] + beta)`.
pub fn kantorovich_node<S: Scalar>(k: usize, t: &S, params: &OperatorParams<S>, pq: &PQPair<S>) -> Result<S> {
    if k > params.degree() {
        return Err(Error::Domain(format!("node index {k} exceeds n+m={}", params.degree())));
    }
    let ints = |j: usize| pq_integer(j, pq);
    let num = (S::one() - t.clone()) * ints(k) + ints(k + 1) * t.clone() + params.alpha().clone();
    Ok(num * params.b_n().clone() / (ints(params.n() + 1) + params.beta().clone()))
}

/// Interval containing every argument at which `apply_k` samples `f`.
///
/// The series integral samples `t` in `(0, 1/p]`, so the hull is the range
/// of the node map over `k = 0..=n+m` and `t` in `[0, 1/p]`. For `p` close
/// to 1 this is `[alpha b_n/D, ([n+m+1]/p + alpha) b_n/D]` with
/// `D = [n+1] + beta`; for strongly deformed `p`, `[k]` is not monotone in
/// `k` and the range is computed term by term.
pub fn node_hull(params: &OperatorParams<f64>, pq: &PQPair<f64>) -> (f64, f64) {
    let map = NodeMap::new(params, pq);
    let t_max = 1.0 / pq.p();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..=params.degree() {
        let (a, c) = map.scaled(k);
        for y in [a, a + c * t_max] {
            lo = lo.min(y);
            hi = hi.max(y);
        }
    }
    (lo, hi)
}

/// `K(sum_d coeffs[d] t^d; x)` by the monomial rule
/// `int_0^1 t^l d_{p,q}t = 1/[l+1]`, with no truncation error. Works for
/// every valid `(p,q)`, including `p = q`, and in exact arithmetic.
pub fn apply_polynomial<S: Scalar>(
    coeffs: &[S],
    x: &S,
    params: &OperatorParams<S>,
    pq: &PQPair<S>,
) -> Result<S> {
    let w = basis_weights(params, pq, x)?;
    if coeffs.is_empty() {
        return Ok(S::zero());
    }
    let map = NodeMap::new(params, pq);
    let deg = coeffs.len() - 1;
    let moments: Vec<S> = (0..=deg).map(|l| pq_integral_monomial(l, pq)).collect();
    let pascal = pascal_rows::<S>(deg);
    let scale_pow: Vec<S> = (0..=deg).map(|d| map.scale.powu(d)).collect();

    let mut total = S::zero();
    for (k, wk) in w.weights.iter().enumerate() {
        if wk.is_zero() {
            continue;
        }
        let (a, c) = map.affine(k);
        let a_pow: Vec<S> = (0..=deg).map(|i| a.powu(i)).collect();
        let c_pow: Vec<S> = (0..=deg).map(|i| c.powu(i)).collect();
        let mut inner = S::zero();
        for (d, g) in coeffs.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            let mut s = S::zero();
            for l in 0..=d {
                s = s + pascal[d][l].clone() * a_pow[d - l].clone() * c_pow[l].clone() * moments[l].clone();
            }
            inner = inner + g.clone() * scale_pow[d].clone() * s;
        }
        total = total + wk.clone() * inner;
    }
    Ok(total)
}

fn pascal_rows<S: Scalar>(deg: usize) -> Vec<Vec<S>> {
    let mut rows: Vec<Vec<S>> = Vec::with_capacity(deg + 1);
    for d in 0..=deg {
        let mut row = vec![S::one(); d + 1];
        for l in 1..d {
            row[l] = rows[d - 1][l - 1].clone() + rows[d - 1][l].clone();
        }
        rows.push(row);
    }
    rows
}

/// Coefficients `h_l` of `poly(a + c t) = sum_l h_l t^l`.
fn shift_polynomial(coeffs: &[f64], a: f64, c: f64) -> Vec<f64> {
    let deg = coeffs.len().saturating_sub(1);
    let pascal = pascal_rows::<f64>(deg);
    let mut h = vec![0.0; coeffs.len()];
    for (d, g) in coeffs.iter().enumerate() {
        if *g == 0.0 {
            continue;
        }
        for l in 0..=d {
            h[l] += g * pascal[d][l] * a.powi((d - l) as i32) * c.powi(l as i32);
        }
    }
    h
}

/// `int_0^1 g(a + c t) d_{p,q}t` for piecewise-polynomial `g` and `q < p`.
///
/// The nodes `t_i = (q/p)^i/p` decrease monotonically, so the indices falling
/// in each piece form a contiguous range `[i0, i1)`. Over such a range the
/// series of `t^l` terms sums to `tail(l, i0) - tail(l, i1)` in closed form.
fn jackson_piecewise(pw: &PiecewisePolynomial, a: f64, c: f64, pq: &PQPair<f64>) -> f64 {
    if c == 0.0 {
        return pw.eval(a);
    }
    let r = pq.ratio();
    // beyond this index the node weights are below the smallest subnormal
    let last = ((-745.0 / r.ln()).ceil().min(1e15) as usize).saturating_add(1);
    let piece_at = |i: usize| pw.piece_index(a + c * series_node(i, pq));

    let mut total = 0.0;
    let mut start = 0usize;
    loop {
        let piece = piece_at(start);
        let end = if piece_at(last) == piece {
            None
        } else {
            let (mut lo, mut hi) = (start, last);
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if piece_at(mid) == piece {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Some(hi)
        };
        let h = shift_polynomial(&pw.pieces()[piece], a, c);
        for (l, hl) in h.iter().enumerate() {
            if *hl == 0.0 {
                continue;
            }
            let upper = end.map_or(0.0, |e| pq_integral_monomial_tail(l, e, pq));
            total += hl * (pq_integral_monomial_tail(l, start, pq) - upper);
        }
        match end {
            Some(e) => start = e,
            None => break,
        }
    }
    total
}

/// `int_0^1 g(a + c t) dt` for piecewise-polynomial `g`, split at the
/// breakpoints and integrated exactly in `t`.
fn riemann_piecewise(pw: &PiecewisePolynomial, a: f64, c: f64) -> f64 {
    if c == 0.0 {
        return pw.eval(a);
    }
    let mut cuts = vec![0.0, 1.0];
    cuts.extend(
        pw.breakpoints()
            .iter()
            .map(|b| (b - a) / c)
            .filter(|t| *t > 0.0 && *t < 1.0),
    );
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for seg in cuts.windows(2) {
        let (t0, t1) = (seg[0], seg[1]);
        if t1 <= t0 {
            continue;
        }
        let piece = pw.piece_index(a + c * 0.5 * (t0 + t1));
        let h = shift_polynomial(&pw.pieces()[piece], a, c);
        for (l, hl) in h.iter().enumerate() {
            let e = (l + 1) as i32;
            total += hl * (t1.powi(e) - t0.powi(e)) / (l + 1) as f64;
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum InnerRule {
    JacksonPiecewise,
    Series,
    RiemannPiecewise,
    Antiderivative,
    Quadrature,
}

impl InnerRule {
    fn select(f: &FunctionHandle, pq: &PQPair<f64>) -> Result<Self> {
        if pq.is_strict() {
            Ok(if f.piecewise_polynomial().is_some() {
                InnerRule::JacksonPiecewise
            } else {
                InnerRule::Series
            })
        } else if pq.is_classical() {
            Ok(if f.piecewise_polynomial().is_some() {
                InnerRule::RiemannPiecewise
            } else if f.has_antiderivative() {
                InnerRule::Antiderivative
            } else {
                InnerRule::Quadrature
            })
        } else {
            Err(Error::Regime(format!(
                "p = q = {} < 1 is only supported for polynomial functions ({} is not)",
                pq.p(),
                f.name()
            )))
        }
    }

    /// `int_0^1 f(a + c t) d_{p,q}t`.
    fn integrate(self, f: &FunctionHandle, a: f64, c: f64, pq: &PQPair<f64>, rel_tol: f64) -> Result<f64> {
        Ok(match self {
            InnerRule::JacksonPiecewise => {
                jackson_piecewise(f.piecewise_polynomial().expect("selected on metadata"), a, c, pq)
            }
            InnerRule::Series => pq_integral_unit(|t| f.eval(a + c * t), pq, rel_tol)?,
            InnerRule::RiemannPiecewise => {
                riemann_piecewise(f.piecewise_polynomial().expect("selected on metadata"), a, c)
            }
            InnerRule::Antiderivative => {
                if c == 0.0 {
                    f.eval(a)
                } else {
                    let hi = f.antiderivative(a + c).expect("selected on metadata");
                    let lo = f.antiderivative(a).expect("selected on metadata");
                    (hi - lo) / c
                }
            }
            InnerRule::Quadrature => quadrature::integrate(|t| f.eval(a + c * t), 0.0, 1.0, 2),
        })
    }
}

/// `K_{n,m}^{(alpha,beta)}(f; x, p, q)`.
///
/// Requires `0 <= x <= b_n` and either `q < p`, `p = q = 1`, or a
/// polynomial `f`. `rel_tol` only affects functions integrated by the
/// truncated series.
pub fn apply_k(
    f: &FunctionHandle,
    x: f64,
    params: &OperatorParams<f64>,
    pq: &PQPair<f64>,
    rel_tol: f64,
) -> Result<f64> {
    if let Some(coeffs) = f.polynomial_coeffs() {
        return apply_polynomial(coeffs, &x, params, pq);
    }
    let rule = InnerRule::select(f, pq)?;
    let w = basis_weights(params, pq, &x)?;
    let map = NodeMap::new(params, pq);
    let mut total = 0.0;
    for (k, wk) in w.weights.iter().enumerate() {
        if *wk == 0.0 {
            continue;
        }
        let (a, c) = map.scaled(k);
        total += wk * rule.integrate(f, a, c, pq, rel_tol)?;
    }
    Ok(total)
}

/// `T_{n,m}(f; x, p, q)`: [`apply_k`] with `alpha = beta = 0`, `b_n = 1`.
pub fn apply_t(
    f: &FunctionHandle,
    x: f64,
    n: usize,
    m: usize,
    pq: &PQPair<f64>,
    mode: BasisMode,
    rel_tol: f64,
) -> Result<f64> {
    let params = OperatorParams::kantorovich(n, m, mode)?;
    apply_k(f, x, &params, pq, rel_tol)
}

/// Extension to `[0, inf)`: the operator on `[0, b_n]` (the right endpoint
/// included), `f` itself beyond.
pub fn apply_u(
    f: &FunctionHandle,
    x: f64,
    params: &OperatorParams<f64>,
    pq: &PQPair<f64>,
    rel_tol: f64,
) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("x={x} must be nonnegative")));
    }
    if x <= *params.b_n() {
        apply_k(f, x, params, pq, rel_tol)
    } else {
        Ok(f.eval(x))
    }
}

/// Classical Bernstein-Chlodowsky-Kantorovich-Stancu operator built from
/// ordinary binomials, `(x/b_n)^k (1 - x/b_n)^{N-k}` and Gauss-Legendre
/// integrals along `(k + t + alpha) b_n/(n + 1 + beta)`. Shares no code with
/// the (p,q) path and serves as its oracle at `p = q = 1`. The basis mode is
/// irrelevant here.
pub fn apply_classical_reference(f: &FunctionHandle, x: f64, params: &OperatorParams<f64>) -> Result<f64> {
    let b = *params.b_n();
    if !(x >= 0.0 && x <= b) {
        return Err(Error::Domain(format!("x={x} outside [0, b_n={b}]")));
    }
    let xt = x / b;
    let big_n = params.degree();
    let denom = (params.n() + 1) as f64 + params.beta();
    let breaks: Vec<f64> = f
        .piecewise_polynomial()
        .map(|pw| pw.breakpoints().to_vec())
        .unwrap_or_default();

    let mut binom = 1.0;
    let mut total = 0.0;
    for k in 0..=big_n {
        let weight = binom * xt.powi(k as i32) * (1.0 - xt).powi((big_n - k) as i32);
        if weight != 0.0 {
            let start = (k as f64 + params.alpha()) * b / denom;
            let slope = b / denom;
            let node = |t: f64| start + slope * t;
            let mut cuts = vec![0.0, 1.0];
            cuts.extend(breaks.iter().map(|y| (y - start) / slope).filter(|t| *t > 0.0 && *t < 1.0));
            cuts.sort_by(f64::total_cmp);
            let inner: f64 = cuts
                .windows(2)
                .map(|s| quadrature::integrate(|t| f.eval(node(t)), s[0], s[1], 2))
                .sum();
            total += weight * inner;
        }
        binom = binom * (big_n - k) as f64 / (k + 1) as f64;
    }
    Ok(total)
}
