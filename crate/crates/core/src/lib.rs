//! Chlodowsky variant of the (p,q) Kantorovich-Stancu-Schurer operators.
//!
//! * [`pq_calculus`]: (p,q)-integers, factorials, binomials, powers and the
//!   unit-interval Jackson-type integral.
//! * [`operators`]: the basis, the node map and evaluation of
//!   `K_{n,m}^{(alpha,beta)}`, `T_{n,m}` and the extension `U`.
//! * [`moments`]: closed-form moments against brute force, in `f64` or exact
//!   rationals.
//! * [`bounds`]: moduli of smoothness and the Lipschitz, modulus and
//!   second-modulus error estimates.
//! * [`convergence`]: weighted Korovkin sweeps and the vanishing-function
//!   sweep.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod convergence;
pub mod error;
pub mod function;
pub mod moments;
pub mod operators;
pub mod pq_calculus;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};
pub use function::FunctionHandle;
pub use operators::{BasisMode, OperatorParams, WeightVector};
pub use pq_calculus::PQPair;
pub use scalar::{ExactScalar, Scalar};
