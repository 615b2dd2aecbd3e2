//! Slow, independent reference computations used as test oracles.
//!
//! Nothing here shares code with the main crate: Clebsch-Gordan
//! coefficients come from explicit lowering operators, overlap integrals
//! from multiprecision trapezoidal quadrature, partition functions from
//! direct summation, and time evolution from an adaptive Runge-Kutta
//! integrator.

pub mod angular;
pub mod enumeration;
pub mod ode;
pub mod quadrature;
