//! (p,q)-calculus primitives: integers, factorials, binomials, the (p,q)
//! power, the Jackson-type integral on the unit interval and its monomial
//! closed form.
//!
//! Everything except [`pq_integral_unit`] is generic over [`Scalar`], so the
//! same code runs in `f64` for experiments and in exact rationals for
//! identity checks.
//!
//! The (p,q)-binomial expansion commonly stated as
//! `(ax+by)^n = sum_k [n k] a^{n-k} b^k x^{n-k} y^k` is not consistent with
//! the product definition `(x+y)^n = prod_s (p^s x + q^s y)` (already at
//! n = 2 the product gives `x^2 + (p+q)xy + pq y^2`). [`pq_binomial_expand`]
//! implements the corrected expansion with the `p^{(n-k)(n-k-1)/2}` and
//! `q^{k(k-1)/2}` factors, and the product form is taken as ground truth.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Maximum number of terms summed by [`pq_integral_unit`].
pub const SERIES_TERM_CAP: usize = 1_000_000;

/// Deformation parameters with `0 < q <= p <= 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PQPair<S = f64> {
    p: S,
    q: S,
}

impl<S: Scalar> PQPair<S> {
    pub fn new(p: S, q: S) -> Result<Self> {
        if !(q > S::zero() && q <= p && p <= S::one()) {
            return Err(Error::Domain(format!(
                "(p,q) must satisfy 0 < q <= p <= 1, got p={p:?}, q={q:?}"
            )));
        }
        Ok(Self { p, q })
    }

    /// The undeformed pair p = q = 1.
    pub fn classical() -> Self {
        Self { p: S::one(), q: S::one() }
    }

    pub fn p(&self) -> &S {
        &self.p
    }

    pub fn q(&self) -> &S {
        &self.q
    }

    /// `q < p`, the regime in which the series integral is defined.
    pub fn is_strict(&self) -> bool {
        self.q < self.p
    }

    pub fn is_classical(&self) -> bool {
        self.p == S::one() && self.q == S::one()
    }

    /// `q / p`, in `(0, 1]`.
    pub fn ratio(&self) -> S {
        self.q.clone() / self.p.clone()
    }

    pub fn to_f64(&self) -> PQPair<f64> {
        PQPair { p: self.p.to_f64(), q: self.q.to_f64() }
    }
}

/// `[n]_{p,q}` as the homogeneous sum `sum_{i<n} p^{n-1-i} q^i`, valid for
/// any `p`, `q` (including `p = q`). Symmetric in its two arguments.
pub fn pq_integer_raw<S: Scalar>(n: usize, p: &S, q: &S) -> S {
    let mut acc = S::zero();
    let mut q_pow = S::one();
    for _ in 0..n {
        acc = acc * p.clone() + q_pow.clone();
        q_pow = q_pow * q.clone();
    }
    acc
}

/// `[n]_{p,q}` by the quotient `(p^n - q^n)/(p - q)`; `None` when `p = q`.
pub fn pq_integer_quotient<S: Scalar>(n: usize, p: &S, q: &S) -> Option<S> {
    let diff = p.clone() - q.clone();
    if diff.is_zero() {
        return None;
    }
    Some((p.powu(n) - q.powu(n)) / diff)
}

pub fn pq_integer<S: Scalar>(n: usize, pq: &PQPair<S>) -> S {
    pq_integer_raw(n, pq.p(), pq.q())
}

pub fn pq_factorial<S: Scalar>(n: usize, pq: &PQPair<S>) -> S {
    (1..=n).fold(S::one(), |acc, j| acc * pq_integer(j, pq))
}

/// `[n k]_{p,q}`. Exact scalars go through factorials; floats use the
/// running product of `[n-i]/[i+1]` so that large `n` stays finite.
pub fn pq_binomial<S: Scalar>(n: usize, k: usize, pq: &PQPair<S>) -> Result<S> {
    if k > n {
        return Err(Error::Domain(format!("binomial index k={k} exceeds n={n}")));
    }
    if S::IS_EXACT {
        return Ok(pq_factorial(n, pq) / (pq_factorial(k, pq) * pq_factorial(n - k, pq)));
    }
    let k = k.min(n - k);
    let mut acc = S::one();
    for i in 0..k {
        acc = acc * pq_integer(n - i, pq) / pq_integer(i + 1, pq);
    }
    Ok(acc)
}

/// `(a+b)^n_{p,q} = prod_{s<n} (p^s a + q^s b)`.
pub fn pq_power<S: Scalar>(a: &S, b: &S, n: usize, pq: &PQPair<S>) -> S {
    let mut acc = S::one();
    let mut p_pow = S::one();
    let mut q_pow = S::one();
    for _ in 0..n {
        acc = acc * (p_pow.clone() * a.clone() + q_pow.clone() * b.clone());
        p_pow = p_pow * pq.p().clone();
        q_pow = q_pow * pq.q().clone();
    }
    acc
}

/// Corrected (p,q)-binomial expansion
/// `sum_k [n k] p^{(n-k)(n-k-1)/2} q^{k(k-1)/2} a^{n-k} b^k`, equal to
/// [`pq_power`].
pub fn pq_binomial_expand<S: Scalar>(a: &S, b: &S, n: usize, pq: &PQPair<S>) -> S {
    let mut acc = S::zero();
    for k in 0..=n {
        let j = n - k;
        let coeff = pq_binomial(n, k, pq).expect("k <= n");
        let term = coeff
            * pq.p().powu(j * j.saturating_sub(1) / 2)
            * pq.q().powu(k * k.saturating_sub(1) / 2)
            * a.powu(j)
            * b.powu(k);
        acc = acc + term;
    }
    acc
}

/// `int_0^1 t^j d_{p,q}t = 1/[j+1]_{p,q}`; continuous through `p = q`.
pub fn pq_integral_monomial<S: Scalar>(j: usize, pq: &PQPair<S>) -> S {
    S::one() / pq_integer(j + 1, pq)
}

/// Tail of the monomial series, `sum_{i >= start} w_i t_i^j` over the
/// integral's nodes `t_i = (q/p)^i / p`. Equals `(q/p)^{start (j+1)} / [j+1]`.
pub fn pq_integral_monomial_tail(j: usize, start: usize, pq: &PQPair<f64>) -> f64 {
    let r = pq.ratio();
    let e = (start as f64) * (j as f64 + 1.0);
    r.powf(e) / pq_integer(j + 1, pq)
}

/// Node `t_i = q^i / p^{i+1}` of the unit-interval series integral.
pub fn series_node(i: usize, pq: &PQPair<f64>) -> f64 {
    pq.ratio().powf(i as f64) / pq.p()
}

/// Outcome of a truncated series integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesIntegral {
    pub value: f64,
    pub terms: usize,
}

/// `int_0^1 f(t) d_{p,q}t = (p-q) sum_{i>=0} q^i/p^{i+1} f(q^i/p^{i+1})`,
/// truncated once the geometric tail bound `M (p-q)/p (q/p)^{J+1}/(1-q/p)`
/// (with `M` the running max of `|f|`) drops below `rel_tol * |sum|`.
///
/// Requires `q < p`. Nodes start at `1/p`, so `f` is sampled slightly
/// beyond 1 when `p < 1`.
pub fn pq_integral_unit<F>(f: F, pq: &PQPair<f64>, rel_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    pq_integral_unit_detailed(f, pq, rel_tol).map(|s| s.value)
}

pub fn pq_integral_unit_detailed<F>(mut f: F, pq: &PQPair<f64>, rel_tol: f64) -> Result<SeriesIntegral>
where
    F: FnMut(f64) -> f64,
{
    let (p, q) = (*pq.p(), *pq.q());
    if q >= p {
        return Err(Error::Regime(format!(
            "series integral needs q < p, got p={p}, q={q}"
        )));
    }
    if !(rel_tol > 0.0) {
        return Err(Error::Domain(format!("rel_tol must be positive, got {rel_tol}")));
    }
    let r = q / p;
    let lead = (p - q) / p;
    let mut acc = 0.0;
    let mut max_abs: f64 = 0.0;
    let mut tail = f64::INFINITY;
    for i in 0..SERIES_TERM_CAP {
        let r_i = r.powf(i as f64);
        let weight = lead * r_i;
        if weight == 0.0 {
            return Ok(SeriesIntegral { value: acc, terms: i });
        }
        let fv = f(r_i / p);
        max_abs = max_abs.max(fv.abs());
        acc += weight * fv;
        tail = max_abs * weight * r / (1.0 - r);
        if acc != 0.0 && tail < rel_tol * acc.abs() {
            return Ok(SeriesIntegral { value: acc, terms: i + 1 });
        }
    }
    Err(Error::Convergence { terms: SERIES_TERM_CAP, tail, target: rel_tol * acc.abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ExactScalar;
    use proptest::prelude::*;

    fn pq(p: f64, q: f64) -> PQPair {
        PQPair::new(p, q).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn rejects_invalid_pairs() {
        assert!(PQPair::new(0.8, 0.9).is_err());
        assert!(PQPair::new(1.1, 0.9).is_err());
        assert!(PQPair::new(0.5, 0.0).is_err());
        assert!(PQPair::new(0.5, 0.5).is_ok());
        assert!(PQPair::<f64>::classical().is_classical());
        assert!(!pq(0.5, 0.5).is_strict());
    }

    #[test]
    fn integer_examples() {
        assert_eq!(pq_integer(5, &PQPair::<f64>::classical()), 5.0);
        let pair = pq(0.9, 0.8);
        assert!(close(pq_integer(2, &pair), 1.7, 1e-15));
        // 0.81 + 0.72 + 0.64 and the quotient form
        let quotient = (0.9f64.powi(3) - 0.8f64.powi(3)) / 0.1;
        assert!(close(pq_integer(3, &pair), 2.17, 1e-14));
        assert!(close(pq_integer(3, &pair), quotient, 1e-13));
        assert_eq!(pq_integer(0, &pair), 0.0);
        // p = q: n p^{n-1}
        assert!(close(pq_integer(4, &pq(0.5, 0.5)), 4.0 * 0.125, 1e-15));
    }

    #[test]
    fn factorial_examples() {
        let pair = pq(0.9, 0.8);
        assert_eq!(pq_factorial(0, &pair), 1.0);
        assert_eq!(pq_factorial(3, &PQPair::<f64>::classical()), 6.0);
        assert!(close(pq_factorial(3, &pair), 1.7 * 2.17, 1e-14));
    }

    #[test]
    fn binomial_examples() {
        let pair = pq(1.0, 0.5);
        assert!(close(pq_binomial(4, 2, &pair).unwrap(), 2.1875, 1e-15));
        assert_eq!(pq_binomial(6, 0, &pair).unwrap(), 1.0);
        let p2 = pq(0.93, 0.61);
        let a = pq_binomial(7, 3, &p2).unwrap();
        let b = pq_binomial(7, 4, &p2).unwrap();
        assert!(close(a, b, 1e-14));
        assert!(matches!(pq_binomial(3, 4, &p2), Err(Error::Domain(_))));
    }

    #[test]
    fn binomial_exact_matches_float() {
        let exact = PQPair::new(ExactScalar::new(9, 10), ExactScalar::new(4, 5)).unwrap();
        let float = pq(0.9, 0.8);
        for n in 0..10 {
            for k in 0..=n {
                let e = pq_binomial(n, k, &exact).unwrap().to_f64();
                let f = pq_binomial(n, k, &float).unwrap();
                assert!(close(e, f, 1e-13), "n={n} k={k}: {e} vs {f}");
            }
        }
    }

    #[test]
    fn power_examples() {
        let pair = pq(0.9, 0.8);
        assert!(close(pq_power(&0.3, &0.4, 1, &pair), 0.7, 1e-15));
        assert!(close(pq_power(&1.0, &1.0, 2, &pair), 2.0 * 1.7, 1e-15));
        assert!(close(pq_power(&1.0, &-0.5, 2, &pair), 0.25, 1e-15));
        assert_eq!(pq_power(&3.0, &4.0, 0, &pair), 1.0);
    }

    #[test]
    fn expand_examples() {
        let pair = pq(0.9, 0.8);
        assert_eq!(pq_binomial_expand(&2.0, &3.0, 0, &pair), 1.0);
        assert!(close(pq_binomial_expand(&1.0, &1.0, 2, &pair), 3.4, 1e-15));
    }

    #[test]
    fn expand_equals_power_exactly_small_case() {
        let pair = PQPair::new(ExactScalar::new(5, 7), ExactScalar::new(2, 9)).unwrap();
        let a = ExactScalar::new(-3, 4);
        let b = ExactScalar::new(11, 5);
        for n in 0..=12 {
            assert_eq!(pq_binomial_expand(&a, &b, n, &pair), pq_power(&a, &b, n, &pair));
        }
    }

    #[test]
    fn series_integral_examples() {
        let pair = pq(0.9, 0.8);
        let one = pq_integral_unit(|_| 1.0, &pair, 1e-12).unwrap();
        assert!(close(one, 1.0, 1e-11));
        let lin = pq_integral_unit(|t| t, &pair, 1e-12).unwrap();
        assert!(close(lin, 1.0 / 1.7, 1e-11));
        assert!(close(lin, 0.588_235_294_117_647, 1e-11));
        // near the classical limit the t^2 integral approaches 1/3
        let near = pq(1.0, 0.999);
        let sq = pq_integral_unit(|t| t * t, &near, 1e-12).unwrap();
        assert!((sq - 1.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn series_integral_regime_and_cap() {
        assert!(matches!(
            pq_integral_unit(|t| t, &pq(0.7, 0.7), 1e-12),
            Err(Error::Regime(_))
        ));
        let near = pq(1.0, 1.0 - 1e-9);
        assert!(matches!(
            pq_integral_unit(|t| t, &near, 1e-12),
            Err(Error::Convergence { .. })
        ));
    }

    #[test]
    fn monomial_examples() {
        let pair = pq(0.9, 0.8);
        assert_eq!(pq_integral_monomial(0, &pair), 1.0);
        assert_eq!(pq_integral_monomial(1, &PQPair::<f64>::classical()), 0.5);
        let m2 = pq_integral_monomial(2, &pair);
        assert!(close(m2, 1.0 / 2.17, 1e-15));
        let s2 = pq_integral_unit(|t| t * t, &pair, 1e-12).unwrap();
        assert!(close(s2, m2, 1e-11));
    }

    #[test]
    fn monomial_tail_from_zero_is_whole_integral() {
        let pair = pq(0.9, 0.8);
        for j in 0..5 {
            assert!(close(pq_integral_monomial_tail(j, 0, &pair), pq_integral_monomial(j, &pair), 1e-15));
        }
        // dropping the first three nodes by hand
        let r: f64 = 0.8 / 0.9;
        let manual: f64 = (0..3).map(|i| (0.1 / 0.9) * r.powi(i) * (r.powi(i) / 0.9)).sum();
        let whole = pq_integral_monomial(1, &pair);
        assert!(close(manual + pq_integral_monomial_tail(1, 3, &pair), whole, 1e-14));
    }

    #[test]
    fn classical_limits_up_to_twenty() {
        let c = PQPair::<f64>::classical();
        let mut fact = 1.0;
        for n in 0..=20usize {
            if n > 0 {
                fact *= n as f64;
            }
            assert_eq!(pq_integer(n, &c), n as f64);
            assert_eq!(pq_factorial(n, &c), fact);
            let mut binom = 1.0f64;
            for k in 0..=n {
                assert!(close(pq_binomial(n, k, &c).unwrap(), binom.round(), 1e-13));
                binom = binom * (n - k) as f64 / (k + 1) as f64;
            }
        }
    }

    proptest! {
        #[test]
        fn integer_is_symmetric(n in 0usize..60, p in 0.01f64..1.0, q in 0.01f64..1.0) {
            let a = pq_integer_raw(n, &p, &q);
            let b = pq_integer_raw(n, &q, &p);
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }

        #[test]
        fn integer_forms_agree_in_float(n in 0usize..=50, p in 0.05f64..=1.0, ratio in 0.0f64..0.99) {
            let q = (p * ratio).max(1e-3);
            let sum = pq_integer_raw(n, &p, &q);
            let quo = pq_integer_quotient(n, &p, &q).unwrap();
            prop_assert!((sum - quo).abs() <= 1e-12 * sum.abs().max(f64::MIN_POSITIVE));
        }

        #[test]
        fn series_matches_monomial_rule(j in 0usize..=6, p in 0.3f64..=1.0, ratio in 0.05f64..=0.99) {
            let pair = pq(p, p * ratio);
            let tol = 1e-12;
            let series = pq_integral_unit(|t| t.powi(j as i32), &pair, tol).unwrap();
            let closed = pq_integral_monomial(j, &pair);
            prop_assert!((series - closed).abs() <= 10.0 * tol * closed);
        }
    }
}
