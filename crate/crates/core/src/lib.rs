//! Certified discrete ODE toolkit.
//!
//! Dyadic ball arithmetic, tanh-polynomial expressions, linear length-ODEs,
//! a library of certified tanh constructions, and an analytic simulation of
//! Turing machines built on them.

pub mod discrete_ode;
pub mod dyadic_ball;
pub mod expr;
pub mod funlib;
pub mod turing;
