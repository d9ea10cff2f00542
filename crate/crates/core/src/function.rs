//! Named real functions on `[0, inf)` together with the metadata the
//! operator and the bound checks can exploit.
//!
//! Builtin registry names: `const1`, `id`, `square`, `sin`, `absdev:<a>`,
//! `lip:<a>:<gamma>`, `bump:<C>`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `|f(t) - f(x)| <= m |t - x|^gamma` for all `t, x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzClass {
    pub m: f64,
    pub gamma: f64,
}

/// Piecewise polynomial in ascending-power coefficient form.
///
/// Piece `i` is used on `[breakpoints[i-1], breakpoints[i])`, with the
/// first piece extending to `-inf` and the last to `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial {
    breakpoints: Vec<f64>,
    pieces: Vec<Vec<f64>>,
}

impl PiecewisePolynomial {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Vec<f64>>) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::Parse(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                pieces.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Parse("breakpoints must be strictly increasing".into()));
        }
        Ok(Self { breakpoints, pieces })
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self { breakpoints: Vec::new(), pieces: vec![coeffs] }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Vec<f64>] {
        &self.pieces
    }

    pub fn piece_index(&self, y: f64) -> usize {
        self.breakpoints.partition_point(|&b| b <= y)
    }

    pub fn eval(&self, y: f64) -> f64 {
        horner(&self.pieces[self.piece_index(y)], y)
    }
}

pub fn horner(coeffs: &[f64], y: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * y + c)
}

/// A real function plus optional analytic metadata.
#[derive(Clone)]
pub struct FunctionHandle {
    name: String,
    eval: RealFn,
    lip: Option<LipschitzClass>,
    exact_modulus: Option<RealFn>,
    exact_second_modulus: Option<RealFn>,
    support_bound: Option<f64>,
    polynomial_coeffs: Option<Vec<f64>>,
    piecewise: Option<PiecewisePolynomial>,
    antiderivative: Option<RealFn>,
}

impl fmt::Debug for FunctionHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionHandle")
            .field("name", &self.name)
            .field("lip", &self.lip)
            .field("exact_modulus", &self.exact_modulus.is_some())
            .field("support_bound", &self.support_bound)
            .field("polynomial_coeffs", &self.polynomial_coeffs)
            .field("piecewise", &self.piecewise.is_some())
            .finish()
    }
}

impl FunctionHandle {
    /// A handle with no metadata.
    pub fn new(name: impl Into<String>, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            lip: None,
            exact_modulus: None,
            exact_second_modulus: None,
            support_bound: None,
            polynomial_coeffs: None,
            piecewise: None,
            antiderivative: None,
        }
    }

    /// Polynomial `sum_i coeffs[i] y^i`.
    pub fn polynomial(name: impl Into<String>, coeffs: Vec<f64>) -> Self {
        let c = coeffs.clone();
        let mut h = Self::new(name, move |y| horner(&c, y));
        h.piecewise = Some(PiecewisePolynomial::polynomial(coeffs.clone()));
        h.polynomial_coeffs = Some(coeffs);
        h
    }

    pub fn piecewise(name: impl Into<String>, pw: PiecewisePolynomial) -> Self {
        let shared = pw.clone();
        let mut h = Self::new(name, move |y| shared.eval(y));
        h.piecewise = Some(pw);
        h
    }

    pub fn with_lipschitz(mut self, m: f64, gamma: f64) -> Self {
        self.lip = Some(LipschitzClass { m, gamma });
        self
    }

    pub fn with_exact_modulus(mut self, w: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.exact_modulus = Some(Arc::new(w));
        self
    }

    pub fn with_exact_second_modulus(mut self, w: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.exact_second_modulus = Some(Arc::new(w));
        self
    }

    pub fn with_support_bound(mut self, c: f64) -> Self {
        self.support_bound = Some(c);
        self
    }

    pub fn with_antiderivative(mut self, big_f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.antiderivative = Some(Arc::new(big_f));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, y: f64) -> f64 {
        (self.eval)(y)
    }

    pub fn lipschitz(&self) -> Option<LipschitzClass> {
        self.lip
    }

    pub fn exact_modulus(&self, delta: f64) -> Option<f64> {
        self.exact_modulus.as_ref().map(|w| w(delta))
    }

    pub fn exact_second_modulus(&self, delta: f64) -> Option<f64> {
        self.exact_second_modulus.as_ref().map(|w| w(delta))
    }

    pub fn support_bound(&self) -> Option<f64> {
        self.support_bound
    }

    pub fn polynomial_coeffs(&self) -> Option<&[f64]> {
        self.polynomial_coeffs.as_deref()
    }

    pub fn piecewise_polynomial(&self) -> Option<&PiecewisePolynomial> {
        self.piecewise.as_ref()
    }

    pub fn antiderivative(&self, y: f64) -> Option<f64> {
        self.antiderivative.as_ref().map(|a| a(y))
    }

    pub fn has_antiderivative(&self) -> bool {
        self.antiderivative.is_some()
    }

    /// Pointwise linear combination. Polynomial metadata survives; other
    /// metadata is dropped.
    pub fn linear_combination(a: f64, f: &FunctionHandle, b: f64, g: &FunctionHandle) -> FunctionHandle {
        let name = format!("{a}*{}+{b}*{}", f.name, g.name);
        if let (Some(cf), Some(cg)) = (f.polynomial_coeffs(), g.polynomial_coeffs()) {
            let len = cf.len().max(cg.len());
            let coeffs = (0..len)
                .map(|i| a * cf.get(i).copied().unwrap_or(0.0) + b * cg.get(i).copied().unwrap_or(0.0))
                .collect();
            return FunctionHandle::polynomial(name, coeffs);
        }
        let (f, g) = (f.clone(), g.clone());
        FunctionHandle::new(name, move |y| a * f.eval(y) + b * g.eval(y))
    }

    /// Resolves a builtin registry name.
    pub fn builtin(spec: &str) -> Result<FunctionHandle> {
        let mut parts = spec.split(':');
        let head = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse(format!("bad numeric argument {s:?} in {spec:?}")))
        };
        let arity = |k: usize| -> Result<()> {
            if args.len() == k {
                Ok(())
            } else {
                Err(Error::Parse(format!("{head} expects {k} argument(s), got {spec:?}")))
            }
        };
        match head {
            "const1" => {
                arity(0)?;
                Ok(const1())
            }
            "id" => {
                arity(0)?;
                Ok(identity())
            }
            "square" => {
                arity(0)?;
                Ok(square())
            }
            "sin" => {
                arity(0)?;
                Ok(sine())
            }
            "absdev" => {
                arity(1)?;
                Ok(absdev(num(args[0])?))
            }
            "lip" => {
                arity(2)?;
                let gamma = num(args[1])?;
                if !(gamma > 0.0 && gamma <= 1.0) {
                    return Err(Error::Parse(format!("lip exponent must lie in (0,1], got {gamma}")));
                }
                Ok(holder(num(args[0])?, gamma))
            }
            "bump" => {
                arity(1)?;
                let c = num(args[0])?;
                if !(c > 0.0) {
                    return Err(Error::Parse(format!("bump support must be positive, got {c}")));
                }
                Ok(bump(c))
            }
            _ => Err(Error::Parse(format!("unknown function {spec:?}"))),
        }
    }
}

pub fn const1() -> FunctionHandle {
    FunctionHandle::polynomial("const1", vec![1.0])
        .with_exact_modulus(|_| 0.0)
        .with_exact_second_modulus(|_| 0.0)
}

pub fn identity() -> FunctionHandle {
    FunctionHandle::polynomial("id", vec![0.0, 1.0])
        .with_lipschitz(1.0, 1.0)
        .with_exact_modulus(|d| d)
        .with_exact_second_modulus(|_| 0.0)
}

/// `y^2`; unbounded modulus on `[0, inf)`, so only the second modulus is
/// supplied.
pub fn square() -> FunctionHandle {
    FunctionHandle::polynomial("square", vec![0.0, 0.0, 1.0]).with_exact_second_modulus(|d| 2.0 * d * d)
}

pub fn sine() -> FunctionHandle {
    FunctionHandle::new("sin", f64::sin)
        .with_antiderivative(|y| -y.cos())
        .with_lipschitz(1.0, 1.0)
        .with_exact_modulus(|d| 2.0 * (d.min(std::f64::consts::PI) / 2.0).sin())
        .with_exact_second_modulus(|d| 2.0 * (1.0 - d.min(std::f64::consts::PI).cos()))
}

/// `|y - a|`.
pub fn absdev(a: f64) -> FunctionHandle {
    let pw = PiecewisePolynomial::new(vec![a], vec![vec![a, -1.0], vec![-a, 1.0]]).expect("one breakpoint");
    FunctionHandle::piecewise(format!("absdev:{a}"), pw)
        .with_lipschitz(1.0, 1.0)
        .with_exact_modulus(|d| d)
        .with_exact_second_modulus(|d| 2.0 * d)
}

/// `|y - a|^gamma`, a member of `Lip_1(gamma)` with modulus `delta^gamma`.
pub fn holder(a: f64, gamma: f64) -> FunctionHandle {
    if gamma == 1.0 {
        let mut h = absdev(a);
        h.name = format!("lip:{a}:{gamma}");
        return h;
    }
    FunctionHandle::new(format!("lip:{a}:{gamma}"), move |y| (y - a).abs().powf(gamma))
        .with_antiderivative(move |y| {
            let u = y - a;
            u.signum() * u.abs().powf(gamma + 1.0) / (gamma + 1.0)
        })
        .with_lipschitz(1.0, gamma)
        .with_exact_modulus(move |d| d.powf(gamma))
        .with_exact_second_modulus(move |d| 2.0 * d.powf(gamma))
}

/// Hat `max(0, 1 - y/C)`: Lipschitz `1/C`, vanishing on `[C, inf)`.
pub fn bump(c: f64) -> FunctionHandle {
    let pw = PiecewisePolynomial::new(vec![c], vec![vec![1.0, -1.0 / c], vec![0.0]]).expect("one breakpoint");
    FunctionHandle::piecewise(format!("bump:{c}"), pw)
        .with_support_bound(c)
        .with_lipschitz(1.0 / c, 1.0)
        .with_exact_modulus(move |d| (d / c).min(1.0))
}
