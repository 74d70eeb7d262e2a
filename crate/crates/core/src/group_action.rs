//! Point symmetry groups of the two model equations, their moving frames and
//! the discrete invariants built from them.
//!
//! A frame is the group element that carries a stencil onto a fixed
//! cross-section; invariantizing a quantity means evaluating it on the
//! normalized stencil. Group composition is never needed: equivariance is
//! checked downstream by comparing invariants of `st` and `g·st`.

use crate::error::{Error, Result};
use crate::grid::{MultiIndex, Node, Stencil, SCHEME_OFFSETS};
use crate::scalar::Scalar;
use crate::taylor_fd::{central_first, central_second};

/// Parameters of the four-parameter symmetry group of `u_t = u_xx + u ln u`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct HeatGroupElement<T> {
    /// λ₁: `t ↦ t + λ₁`.
    pub time_shift: T,
    /// λ₂: `x ↦ x + λ₂`.
    pub space_shift: T,
    /// λ₃: Galilei-like boost mixing `x` and `ln u`.
    pub boost: T,
    /// λ₄: `ln u ↦ ln u + λ₄ eᵗ`.
    pub log_scaling: T,
}

impl<T: Scalar> HeatGroupElement<T> {
    pub fn new(time_shift: T, space_shift: T, boost: T, log_scaling: T) -> Self {
        Self { time_shift, space_shift, boost, log_scaling }
    }

    pub fn identity() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn params(&self) -> [T; 4] {
        [self.time_shift, self.space_shift, self.boost, self.log_scaling]
    }

    pub fn from_params(p: [T; 4]) -> Self {
        Self::new(p[0], p[1], p[2], p[3])
    }
}

/// Parameters of the three-parameter symmetry group of the spherical Burgers
/// equation `u_t + u/t + u u_x + u_xx = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct BurgersGroupElement<T> {
    /// λ₁: `x ↦ x + λ₁`.
    pub translation: T,
    /// λ₂: `(x, t, u) ↦ (e^{λ₂}x, e^{2λ₂}t, e^{−λ₂}u)`.
    pub scaling: T,
    /// λ₃: logarithmic boost `x ↦ x + λ₃ ln t`, `u ↦ u + λ₃/t`.
    pub boost: T,
}

impl<T: Scalar> BurgersGroupElement<T> {
    pub fn new(translation: T, scaling: T, boost: T) -> Self {
        Self { translation, scaling, boost }
    }

    pub fn identity() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn params(&self) -> [T; 3] {
        [self.translation, self.scaling, self.boost]
    }

    pub fn from_params(p: [T; 3]) -> Self {
        Self::new(p[0], p[1], p[2])
    }
}

fn positive_log<T: Scalar>(u: T, what: &str) -> Result<T> {
    if u > T::zero() && u.is_finite() {
        Ok(u.ln())
    } else {
        Err(Error::domain(format!("{what}: logarithm of non-positive value u = {u}")))
    }
}

/// Heat group action on `(x, t, ln u)`.
pub fn heat_act_log<T: Scalar>(g: &HeatGroupElement<T>, x: T, t: T, log_u: T) -> (T, T, T) {
    let two = T::of(2.0);
    let et = t.exp();
    let big_x = x + two * g.boost * et + g.space_shift;
    let big_t = t + g.time_shift;
    let log_big_u = log_u - g.boost * et * x - g.boost * g.boost * et * et + g.log_scaling * et;
    (big_x, big_t, log_big_u)
}

/// Heat group action on a node; requires `u > 0`.
pub fn heat_act<T: Scalar>(g: &HeatGroupElement<T>, p: &Node<T>) -> Result<Node<T>> {
    let log_u = positive_log(p.u, "heat action")?;
    let (x, t, log_u) = heat_act_log(g, p.x, p.t, log_u);
    Ok(Node::new(p.index, x, t, log_u.exp()))
}

pub fn heat_act_stencil<T: Scalar>(g: &HeatGroupElement<T>, st: &Stencil<T>) -> Result<Stencil<T>> {
    st.try_map(|p| heat_act(g, p))
}

/// Burgers group action on a node; requires `t > 0`.
pub fn burgers_act<T: Scalar>(g: &BurgersGroupElement<T>, p: &Node<T>) -> Result<Node<T>> {
    if !(p.t > T::zero()) {
        return Err(Error::domain(format!("Burgers action needs t > 0, got t = {}", p.t)));
    }
    let s = g.scaling.exp();
    let x = s * (p.x + g.boost * p.t.ln()) + g.translation;
    let t = s * s * p.t;
    let u = (p.u + g.boost / p.t) / s;
    Ok(Node::new(p.index, x, t, u))
}

pub fn burgers_act_stencil<T: Scalar>(
    g: &BurgersGroupElement<T>,
    st: &Stencil<T>,
) -> Result<Stencil<T>> {
    st.try_map(|p| burgers_act(g, p))
}

fn check_flat_row<T: Scalar>(left: &Node<T>, base: &Node<T>, right: &Node<T>) -> Result<()> {
    let tol = T::of(1e-12) * (T::one() + base.t.abs());
    if (left.t - base.t).abs() > tol || (right.t - base.t).abs() > tol {
        return Err(Error::domain(format!(
            "spatial neighbours not at a common time: {}, {}, {}",
            left.t, base.t, right.t
        )));
    }
    if !(left.x < base.x && base.x < right.x) {
        return Err(Error::DegenerateStencil { context: "spatial neighbours out of order", conditioning: 0.0 });
    }
    Ok(())
}

fn spatial_row<T: Scalar>(st: &Stencil<T>) -> Result<[Node<T>; 3]> {
    let row = [*st.at(-1, 0)?, *st.at(0, 0)?, *st.at(1, 0)?];
    check_flat_row(&row[0], &row[1], &row[2])?;
    Ok(row)
}

fn log_row<T: Scalar>(row: &[Node<T>; 3]) -> Result<[T; 3]> {
    Ok([
        positive_log(row[0].u, "heat stencil")?,
        positive_log(row[1].u, "heat stencil")?,
        positive_log(row[2].u, "heat stencil")?,
    ])
}

/// Centred slope of `ln u` across the spatial row, `(ln u)_x^d`.
pub fn heat_log_slope<T: Scalar>(st: &Stencil<T>) -> Result<T> {
    let row = spatial_row(st)?;
    central_first(row.map(|p| p.x), log_row(&row)?)
}

/// Moving frame sending `(x₀₀, t₀₀, ln u₀₀, (ln u)_x^d)` to `(0, 0, 0, 0)`.
pub fn heat_frame<T: Scalar>(st: &Stencil<T>) -> Result<HeatGroupElement<T>> {
    let row = spatial_row(st)?;
    let logs = log_row(&row)?;
    let g = central_first(row.map(|p| p.x), logs)?;
    let base = row[1];
    let decay = (-base.t).exp();
    Ok(HeatGroupElement {
        time_shift: -base.t,
        space_shift: -(base.x + T::of(2.0) * g),
        boost: decay * g,
        log_scaling: decay * (-logs[1] + base.x * g + g * g),
    })
}

/// Moving frame sending a node to `(x, t, u) = (0, 1, 0)`.
pub fn burgers_frame<T: Scalar>(p: &Node<T>) -> Result<BurgersGroupElement<T>> {
    if !(p.t > T::zero()) {
        return Err(Error::domain(format!("Burgers frame needs t > 0, got t = {}", p.t)));
    }
    let sqrt_t = p.t.sqrt();
    Ok(BurgersGroupElement {
        translation: -(p.x - p.u * p.t * p.t.ln()) / sqrt_t,
        scaling: (T::one() / sqrt_t).ln(),
        boost: -p.u * p.t,
    })
}

/// Stencil moved onto the heat cross-section by its own frame.
pub fn normalize_heat<T: Scalar>(st: &Stencil<T>) -> Result<Stencil<T>> {
    heat_act_stencil(&heat_frame(st)?, st)
}

/// Stencil moved onto the Burgers cross-section by the frame of its base node.
pub fn normalize_burgers<T: Scalar>(st: &Stencil<T>) -> Result<Stencil<T>> {
    burgers_act_stencil(&burgers_frame(st.at(0, 0)?)?, st)
}

/// Discrete invariants of the heat group on the four-point scheme stencil.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatDiscreteInvariants<T> {
    /// Invariantized `(ln u)_t^d`.
    pub i_d: T,
    /// `(ln u)_xx^d`, already invariant.
    pub j_d: T,
    /// Invariantized `x₀₁`: `σ + 2(e^τ − 1) g`.
    pub iota_x01: T,
    /// `σ = x₀₁ − x₀₀`.
    pub sigma: T,
    /// `τ = t₀₁ − t₀₀`.
    pub tau: T,
    /// `g = (ln u)_x^d`.
    pub log_slope: T,
}

pub fn heat_invariants<T: Scalar>(st: &Stencil<T>) -> Result<HeatDiscreteInvariants<T>> {
    st.require(&SCHEME_OFFSETS)?;
    let row = spatial_row(st)?;
    let logs = log_row(&row)?;
    let xs = row.map(|p| p.x);
    let g = central_first(xs, logs)?;
    let j_d = central_second(xs, logs)?;
    let up = st.get(MultiIndex::new(0, 1))?;
    let log_up = positive_log(up.u, "heat stencil")?;
    let base = row[1];
    let sigma = up.x - base.x;
    let tau = up.t - base.t;
    if !(tau > T::zero()) {
        return Err(Error::InvalidStep(format!("time step τ = {tau} must be positive")));
    }
    let e = tau.exp();
    let i_d = (log_up - e * logs[1]) / tau - sigma / tau * e * g + (e - e * e) / tau * g * g;
    Ok(HeatDiscreteInvariants {
        i_d,
        j_d,
        iota_x01: sigma + T::of(2.0) * (e - T::one()) * g,
        sigma,
        tau,
        log_slope: g,
    })
}

/// Discrete quantities of the spherical Burgers equation on the scheme stencil.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BurgersDiscreteInvariants<T> {
    /// Coordinate form `u_t^d + u₀₀/t₀₀ + u₀₀ u_x^d + u_xx^d`.
    pub i_d: T,
    /// Coordinate form `σ − u₀₀ t₀₀ ln(t₀₁/t₀₀)`.
    pub iota_x01: T,
    /// `i_d` evaluated on the normalized stencil; a true joint invariant.
    pub i_d_normalized: T,
    /// `iota_x01` evaluated on the normalized stencil; a true joint invariant.
    pub iota_x01_normalized: T,
    pub u_x_d: T,
    pub u_xx_d: T,
    pub u_t_d: T,
}

struct BurgersCoords<T> {
    i_d: T,
    iota_x01: T,
    u_x_d: T,
    u_xx_d: T,
    u_t_d: T,
}

fn burgers_coords<T: Scalar>(st: &Stencil<T>) -> Result<BurgersCoords<T>> {
    let row = spatial_row(st)?;
    let base = row[1];
    let up = st.at(0, 1)?;
    if !(base.t > T::zero()) {
        return Err(Error::domain(format!("Burgers stencil needs t > 0, got t = {}", base.t)));
    }
    let tau = up.t - base.t;
    if !(tau > T::zero()) {
        return Err(Error::InvalidStep(format!("time step τ = {tau} must be positive")));
    }
    let xs = row.map(|p| p.x);
    let us = row.map(|p| p.u);
    let u_x_d = central_first(xs, us)?;
    let u_xx_d = central_second(xs, us)?;
    let sigma = up.x - base.x;
    let u_t_d = ((up.u - base.u) - sigma * u_x_d) / tau;
    Ok(BurgersCoords {
        i_d: u_t_d + base.u / base.t + base.u * u_x_d + u_xx_d,
        iota_x01: sigma - base.u * base.t * (up.t / base.t).ln(),
        u_x_d,
        u_xx_d,
        u_t_d,
    })
}

pub fn burgers_invariants<T: Scalar>(st: &Stencil<T>) -> Result<BurgersDiscreteInvariants<T>> {
    st.require(&SCHEME_OFFSETS)?;
    let raw = burgers_coords(st)?;
    let normalized = burgers_coords(&normalize_burgers(st)?)?;
    Ok(BurgersDiscreteInvariants {
        i_d: raw.i_d,
        iota_x01: raw.iota_x01,
        i_d_normalized: normalized.i_d,
        iota_x01_normalized: normalized.iota_x01,
        u_x_d: raw.u_x_d,
        u_xx_d: raw.u_xx_d,
        u_t_d: raw.u_t_d,
    })
}

/// Differential invariants `I = (ln u)_t − ln u − (ln u)_x²` and
/// `J = (ln u)_xx` on the solution family `u = exp(c eᵗ − x²/4 + 1/2)`.
pub fn analytic_heat_invariants<T: Scalar>(x: T, t: T, c: T) -> (T, T) {
    let quarter = T::of(0.25);
    let half = T::of(0.5);
    let ce = c * t.exp();
    let log_u = ce - quarter * x * x + half;
    let log_u_t = ce;
    let log_u_x = -half * x;
    let log_u_xx = -half;
    (log_u_t - log_u - log_u_x * log_u_x, log_u_xx)
}
