//! Closed-form solutions used as initial data, boundary data and references.

use crate::error::{Error, Result};
use crate::grid::TimeLevel;
use crate::scalar::Scalar;

/// `u = exp(c eᵗ − x²/4 + 1/2)`, a solution of `u_t = u_xx + u ln u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatExact<T> {
    pub c: T,
}

/// `u = (x + c₁) / (t (c₂ + ln t))`, a solution of the spherical Burgers equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BurgersExact<T> {
    pub c1: T,
    pub c2: T,
}

/// Any of the reference fields a run can be checked against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exact<T> {
    Heat(HeatExact<T>),
    Burgers(BurgersExact<T>),
    /// Spatially and temporally constant field.
    Constant(T),
}

pub fn heat_exact<T: Scalar>(sol: &HeatExact<T>, x: T, t: T) -> T {
    heat_exact_log(sol, x, t).exp()
}

/// `ln u` of the heat solution, exact without the exponential round trip.
pub fn heat_exact_log<T: Scalar>(sol: &HeatExact<T>, x: T, t: T) -> T {
    sol.c * t.exp() - T::of(0.25) * x * x + T::of(0.5)
}

pub fn burgers_exact<T: Scalar>(sol: &BurgersExact<T>, x: T, t: T) -> Result<T> {
    if !(t > T::zero()) {
        return Err(Error::domain(format!("Burgers solution needs t > 0, got {t}")));
    }
    let denom = t * (sol.c2 + t.ln());
    if denom == T::zero() || !denom.is_finite() {
        return Err(Error::domain(format!("Burgers solution has a pole at t = {t}")));
    }
    Ok((x + sol.c1) / denom)
}

impl<T: Scalar> Exact<T> {
    pub fn value(&self, x: T, t: T) -> Result<T> {
        match self {
            Exact::Heat(s) => Ok(heat_exact(s, x, t)),
            Exact::Burgers(s) => burgers_exact(s, x, t),
            Exact::Constant(v) => Ok(*v),
        }
    }
}

/// Number of nodes `floor((x_max − x_min)/h) + 1`, spacing kept exactly `h`.
pub fn node_count<T: Scalar>(x_min: T, x_max: T, h: T) -> Result<usize> {
    if !(x_min < x_max) {
        return Err(Error::misuse(format!("empty interval [{x_min}, {x_max}]")));
    }
    if !(h > T::zero()) {
        return Err(Error::misuse(format!("spacing h = {h} must be positive")));
    }
    // tolerate representation error in exactly divisible intervals
    let cells = ((x_max - x_min) / h * (T::one() + T::of(1e-12))).floor();
    let count = cells.to_usize().ok_or_else(|| Error::misuse("node count overflow"))? + 1;
    if count < 3 {
        return Err(Error::misuse(format!(
            "spacing h = {h} leaves {count} node(s) on [{x_min}, {x_max}]; schemes need an interior node"
        )));
    }
    Ok(count)
}

/// Uniform level `x_m = x_min + m h` sampled from `sol` at time `t0`.
pub fn initial_level<T: Scalar>(sol: &Exact<T>, x_min: T, x_max: T, h: T, t0: T) -> Result<TimeLevel<T>> {
    let count = node_count(x_min, x_max, h)?;
    let xs: Vec<T> = (0..count).map(|m| x_min + T::of(m as f64) * h).collect();
    let us = xs.iter().map(|&x| sol.value(x, t0)).collect::<Result<Vec<_>>>()?;
    TimeLevel::new(0, t0, &xs, &us)
}
