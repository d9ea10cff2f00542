//! Stated closed-form moments of `T_{n,m}` and `K_{n,m}^{(alpha,beta)}`, the
//! rate quantities `alpha_n`, `beta_n` and `mu`, and a brute force oracle
//! that applies the operator to monomials.
//!
//! The closed forms contain the (p,q)-power `(p x~ + 1 - x~)^{N}_{p,q}`,
//! read through the product definition with arguments `(p x~, 1 - x~)`:
//! `prod_{s<N} (p^{s+1} x~ + q^s (1 - x~))`, and likewise with `p^2 x~`.
//!
//! The closed forms are transcribed verbatim, so their residuals against
//! brute force measure the stated formulas rather than any correction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::{apply_polynomial, BasisMode, OperatorParams};
use crate::pq_calculus::{pq_integer, pq_power, PQPair};
use crate::scalar::{ExactScalar, Scalar};

/// Largest `n + m` accepted in exact arithmetic.
pub const EXACT_DEGREE_CAP: usize = 12;

/// Which moment to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Moment {
    /// `K(1)`
    Zeroth,
    /// `K(t)`
    First,
    /// `K(t^2)`
    Second,
    /// `K(t - x)`
    Central1,
    /// `K((t - x)^2)`
    Central2,
}

impl Moment {
    pub const ALL: [Moment; 5] = [Moment::Zeroth, Moment::First, Moment::Second, Moment::Central1, Moment::Central2];
}

/// The quantities shared by all closed forms at one `(params, pq, x)`.
struct Terms<S> {
    x: S,
    b: S,
    alpha: S,
    /// `[n+1] + beta`
    d: S,
    /// `[n+m]`, `[n+m-1]`
    nm: S,
    nm1: S,
    b2: S,
    b3: S,
    /// `p + 2q - 1`
    c1: S,
    /// `1 + 2q/[2] + (q^2-1)/[3]`
    brace_a: S,
    /// `1 + 2(q-1)/[2] + (q-1)^2/[3]`
    brace_b: S,
    /// `(p x~ + 1 - x~)^{n+m}`, `^{n+m-1}`, `^{2n+2m}` and `(p^2 x~ + 1 - x~)^{n+m}`
    p1: S,
    p1_minus: S,
    p1_double: S,
    p2: S,
}

impl<S: Scalar> Terms<S> {
    fn new(params: &OperatorParams<S>, pq: &PQPair<S>, x: &S) -> Result<Self> {
        let xt = params.normalized_x(x)?;
        let big_n = params.degree();
        let (p, q) = (pq.p().clone(), pq.q().clone());
        let one = S::one();
        let two = S::from_i64(2);
        let int = |j: usize| pq_integer(j, pq);
        let b2 = int(2);
        let b3 = int(3);
        let rest = one.clone() - xt.clone();
        let px = p.clone() * xt.clone();
        let p2x = p.clone() * p.clone() * xt;
        let q_minus = q.clone() - one.clone();
        Ok(Self {
            x: x.clone(),
            b: params.b_n().clone(),
            alpha: params.alpha().clone(),
            d: int(params.n() + 1) + params.beta().clone(),
            nm: int(big_n),
            nm1: int(big_n.saturating_sub(1)),
            c1: p.clone() + two.clone() * q.clone() - one.clone(),
            brace_a: one.clone() + two.clone() * q.clone() / b2.clone()
                + (q.clone() * q.clone() - one.clone()) / b3.clone(),
            brace_b: one + two * q_minus.clone() / b2.clone() + q_minus.clone() * q_minus / b3.clone(),
            p1: pq_power(&px, &rest, big_n, pq),
            p1_minus: pq_power(&px, &rest, big_n.saturating_sub(1), pq),
            p1_double: pq_power(&px, &rest, 2 * big_n, pq),
            p2: pq_power(&p2x, &rest, big_n, pq),
            b2,
            b3,
        })
    }

    fn first(&self) -> S {
        let Terms { x, b, alpha, d, nm, b2, c1, p1, .. } = self;
        (alpha.clone() * b.clone() + p1.clone() / b2.clone() * b.clone() + c1.clone() * nm.clone() / b2.clone() * x.clone())
            / d.clone()
    }

    fn second(&self) -> S {
        let Terms { x, b, alpha, d, nm, nm1, b2, b3, c1, brace_a, brace_b, p1, p1_minus, p2, .. } = self;
        let two = S::from_i64(2);
        let bb = alpha.clone() * alpha.clone()
            + two.clone() * alpha.clone() / b2.clone() * p1.clone()
            + p2.clone() / b3.clone();
        let bx = two * alpha.clone() / b2.clone() * c1.clone() + brace_a.clone() * p1_minus.clone();
        let xx = brace_b.clone() * nm.clone() * nm1.clone();
        (bb * b.clone() * b.clone() + bx * nm.clone() * b.clone() * x.clone() + xx * x.clone() * x.clone())
            / (d.clone() * d.clone())
    }

    fn central1(&self) -> S {
        let Terms { x, b, alpha, d, nm, b2, c1, p1, .. } = self;
        (b2.clone() * alpha.clone() + p1.clone()) / (b2.clone() * d.clone()) * b.clone()
            + (c1.clone() * nm.clone() / (b2.clone() * d.clone()) - S::one()) * x.clone()
    }

    fn central2(&self) -> S {
        let Terms { x, b, alpha, d, nm, nm1, b2, b3, c1, brace_a, brace_b, p1, p1_minus, p2, .. } = self;
        let two = S::from_i64(2);
        let d2 = d.clone() * d.clone();
        let bb = alpha.clone() * alpha.clone() / d2.clone()
            + two.clone() * alpha.clone() / (b2.clone() * d2.clone()) * p1.clone()
            + p2.clone() / (b3.clone() * d2.clone());
        let bx = two.clone() * alpha.clone() * c1.clone() * nm.clone() / (b2.clone() * d2.clone())
            + brace_a.clone() * nm.clone() / d2.clone() * p1_minus.clone()
            - two.clone() * alpha.clone() / d.clone()
            - two.clone() * p1.clone() / (b2.clone() * d.clone());
        let xx = brace_b.clone() * nm.clone() * nm1.clone() / d2
            - two * c1.clone() * nm.clone() / (b2.clone() * d.clone())
            + S::one();
        bb * b.clone() * b.clone() + bx * b.clone() * x.clone() + xx * x.clone() * x.clone()
    }

    fn alpha_t3(&self) -> S {
        let Terms { x, b, alpha, d, nm, b2, b3, c1, brace_a, brace_b, p1, p1_double, p2, .. } = self;
        let two = S::from_i64(2);
        let four = S::from_i64(4);
        let d2 = d.clone() * d.clone();
        let b2sq = b2.clone() * b2.clone();
        let xx = (brace_b.clone() + c1.clone() * c1.clone() / b2sq.clone()) * nm.clone() * nm.clone() / d2.clone()
            - four.clone() * c1.clone() * nm.clone() / (b2.clone() * d.clone())
            + two.clone();
        let bx = (brace_a.clone() + two.clone() * c1.clone() / b2sq.clone()) * nm.clone() / d2.clone() * p1.clone()
            + four.clone() * alpha.clone() * c1.clone() * nm.clone() / (b2.clone() * d2.clone())
            - four.clone() * p1.clone() / (b2.clone() * d.clone())
            - four.clone() * alpha.clone() / d.clone();
        let bb = p2.clone() / b3.clone()
            + p1_double.clone() / b2sq
            + four * alpha.clone() / b2.clone() * p1.clone()
            + two * alpha.clone() * alpha.clone();
        xx * x.clone() * x.clone() + bx * b.clone() * x.clone() + bb * b.clone() * b.clone() / d2
    }
}

/// Stated closed form of one moment of `K_{n,m}^{(alpha,beta)}`.
pub fn moment_closed<S: Scalar>(which: Moment, params: &OperatorParams<S>, pq: &PQPair<S>, x: &S) -> Result<S> {
    let terms = Terms::new(params, pq, x)?;
    Ok(match which {
        Moment::Zeroth => S::one(),
        Moment::First => terms.first(),
        Moment::Second => terms.second(),
        Moment::Central1 => terms.central1(),
        Moment::Central2 => terms.central2(),
    })
}

/// Stated closed forms of `T_{n,m}(t^u; x)`, `u` in `0..=2`, `x` in `[0, 1]`.
pub fn moment_closed_t<S: Scalar>(u: usize, n: usize, m: usize, pq: &PQPair<S>, x: &S) -> Result<S> {
    let params = OperatorParams::kantorovich(n, m, BasisMode::Normalized)?;
    let terms = Terms::new(&params, pq, x)?;
    let Terms { x, d, nm, nm1, b2, b3, c1, brace_a, brace_b, p1, p1_minus, p2, .. } = terms;
    match u {
        0 => Ok(S::one()),
        1 => Ok(p1 / (b2.clone() * d.clone()) + c1 * nm / (b2 * d) * x),
        2 => {
            let d2 = d.clone() * d;
            Ok(p2 / (b3 * d2.clone())
                + brace_a * nm.clone() / d2.clone() * p1_minus * x.clone()
                + brace_b * nm * nm1 / d2 * x.clone() * x)
        }
        _ => Err(Error::Domain(format!("moment order {u} not in 0..=2"))),
    }
}

/// `(alpha_n, beta_n)` of the second-modulus estimate, as stated. `beta_n`
/// is signed (it coincides with the stated `K(t - x)`); callers use its
/// absolute value as a modulus argument.
pub fn alpha_beta_t3<S: Scalar>(params: &OperatorParams<S>, pq: &PQPair<S>, x: &S) -> Result<(S, S)> {
    let terms = Terms::new(params, pq, x)?;
    Ok((terms.alpha_t3(), terms.central1()))
}

/// Brute-force `K(t^u)` for `u = 0, 1, 2`, and the two central moments,
/// through the operator on monomials.
pub fn moments_brute<S: Scalar>(params: &OperatorParams<S>, pq: &PQPair<S>, x: &S) -> Result<MomentValues<S>> {
    let z = S::zero;
    let k1 = apply_polynomial(&[S::one()], x, params, pq)?;
    let kt = apply_polynomial(&[z(), S::one()], x, params, pq)?;
    let kt2 = apply_polynomial(&[z(), z(), S::one()], x, params, pq)?;
    let central1 = apply_polynomial(&[-x.clone(), S::one()], x, params, pq)?;
    let central2 = mu(params, pq, x)?;
    Ok(MomentValues { k1, kt, kt2, central1, central2 })
}

/// `mu(x) = K((t - x)^2; x)` by brute force (monomial rule), which is what
/// the error estimates actually require.
pub fn mu<S: Scalar>(params: &OperatorParams<S>, pq: &PQPair<S>, x: &S) -> Result<S> {
    let coeffs = [x.clone() * x.clone(), S::from_i64(-2) * x.clone(), S::one()];
    apply_polynomial(&coeffs, x, params, pq)
}

/// The five moments `K(1)`, `K(t)`, `K(t^2)`, `K(t-x)`, `K((t-x)^2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentValues<S = f64> {
    pub k1: S,
    pub kt: S,
    pub kt2: S,
    pub central1: S,
    pub central2: S,
}

impl<S: Scalar> MomentValues<S> {
    fn closed(params: &OperatorParams<S>, pq: &PQPair<S>, x: &S) -> Result<Self> {
        let terms = Terms::new(params, pq, x)?;
        Ok(Self {
            k1: S::one(),
            kt: terms.first(),
            kt2: terms.second(),
            central1: terms.central1(),
            central2: terms.central2(),
        })
    }

    fn zip(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        Self {
            k1: f(&self.k1, &other.k1),
            kt: f(&self.kt, &other.kt),
            kt2: f(&self.kt2, &other.kt2),
            central1: f(&self.central1, &other.central1),
            central2: f(&self.central2, &other.central2),
        }
    }

    pub fn get(&self, which: Moment) -> &S {
        match which {
            Moment::Zeroth => &self.k1,
            Moment::First => &self.kt,
            Moment::Second => &self.kt2,
            Moment::Central1 => &self.central1,
            Moment::Central2 => &self.central2,
        }
    }

    pub fn to_f64(&self) -> MomentValues<f64> {
        MomentValues {
            k1: self.k1.to_f64(),
            kt: self.kt.to_f64(),
            kt2: self.kt2.to_f64(),
            central1: self.central1.to_f64(),
            central2: self.central2.to_f64(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Float,
    Exact,
}

/// Closed-form moments against brute force at one instance.
///
/// In exact arithmetic `exact_residuals` holds the rational residuals; an
/// entry of exactly `"0"` certifies the stated formula at that instance
/// and basis mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub params: OperatorParams<ExactScalar>,
    pub p: ExactScalar,
    pub q: ExactScalar,
    pub x: ExactScalar,
    pub mode: BasisMode,
    pub arithmetic: Arithmetic,
    pub closed: MomentValues<f64>,
    pub brute: MomentValues<f64>,
    /// `closed - brute`
    pub residuals: MomentValues<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_residuals: Option<MomentValues<ExactScalar>>,
    /// `K((t-x)^2) - (K(t^2) - 2x K(t) + x^2 K(1))` on the brute-force side.
    pub brute_identity_residual: f64,
}

/// Fills a [`MomentReport`]. Inputs are rationals so that both arithmetics
/// see the same instance; `Float` rounds them to `f64` first.
pub fn verify_moments(
    params: &OperatorParams<ExactScalar>,
    pq: &PQPair<ExactScalar>,
    x: &ExactScalar,
    arithmetic: Arithmetic,
) -> Result<MomentReport> {
    let (closed, brute, residuals, exact_residuals, identity) = match arithmetic {
        Arithmetic::Exact => {
            if params.degree() > EXACT_DEGREE_CAP {
                return Err(Error::ExactSizeCap { cap: EXACT_DEGREE_CAP, got: params.degree() });
            }
            let closed = MomentValues::closed(params, pq, x)?;
            let brute = moments_brute(params, pq, x)?;
            let res = closed.zip(&brute, |a, b| a.clone() - b.clone());
            let identity = brute_identity(&brute, x);
            (closed.to_f64(), brute.to_f64(), res.to_f64(), Some(res), identity.to_f64())
        }
        Arithmetic::Float => {
            let (pf, pqf, xf) = (params.to_f64(), pq.to_f64(), x.to_f64());
            let closed = MomentValues::closed(&pf, &pqf, &xf)?;
            let brute = moments_brute(&pf, &pqf, &xf)?;
            let res = closed.zip(&brute, |a, b| a - b);
            let identity = brute_identity(&brute, &xf);
            (closed, brute, res, None, identity)
        }
    };
    Ok(MomentReport {
        params: params.clone(),
        p: pq.p().clone(),
        q: pq.q().clone(),
        x: x.clone(),
        mode: params.mode(),
        arithmetic,
        closed,
        brute,
        residuals,
        exact_residuals,
        brute_identity_residual: identity,
    })
}

fn brute_identity<S: Scalar>(v: &MomentValues<S>, x: &S) -> S {
    let two = S::from_i64(2);
    v.central2.clone() - (v.kt2.clone() - two * x.clone() * v.kt.clone() + x.clone() * x.clone() * v.k1.clone())
}
