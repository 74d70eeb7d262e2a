//! Time stepping for the six scheme variants and their residual forms.
//!
//! Every step maps one [`TimeLevel`] to the next. Standard and partially
//! invariant schemes live on the uniform rectangular mesh; fully invariant
//! schemes move their nodes according to invariant mesh equations.
//! Heat updates other than the standard scheme are carried out on `ln u`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{default_eps, validate_level, MeshHistory, MultiIndex, Stencil, TimeLevel, SCHEME_OFFSETS};
use crate::group_action::{heat_invariants, normalize_burgers, normalize_heat};
use crate::scalar::Scalar;
use crate::solutions::Exact;
use crate::taylor_fd::{central_first, central_second};

/// Relative tolerance used to accept a level as uniform.
const UNIFORM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    /// `u_t = u_xx + u ln u`.
    HeatLog,
    /// `u_t + u/t + u u_x + u_xx = 0`.
    SphericalBurgers,
}

impl Model {
    pub const ALL: [Model; 2] = [Model::HeatLog, Model::SphericalBurgers];

    pub fn name(self) -> &'static str {
        match self {
            Model::HeatLog => "heat",
            Model::SphericalBurgers => "burgers",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heat" | "heat_log" => Ok(Model::HeatLog),
            "burgers" | "spherical_burgers" => Ok(Model::SphericalBurgers),
            _ => Err(Error::Config(format!("unknown model '{s}' (expected heat or burgers)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    Standard,
    PartiallyInvariant,
    FullyInvariant,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] =
        [SchemeKind::Standard, SchemeKind::PartiallyInvariant, SchemeKind::FullyInvariant];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Standard => "standard",
            SchemeKind::PartiallyInvariant => "partial",
            SchemeKind::FullyInvariant => "full",
        }
    }

    /// Whether the scheme moves its nodes.
    pub fn moves_mesh(self) -> bool {
        self == SchemeKind::FullyInvariant
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(SchemeKind::Standard),
            "partial" | "partially_invariant" => Ok(SchemeKind::PartiallyInvariant),
            "full" | "fully_invariant" => Ok(SchemeKind::FullyInvariant),
            _ => Err(Error::Config(format!("unknown scheme '{s}' (expected standard, partial or full)"))),
        }
    }
}

/// How endpoint values are supplied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryPolicy<T> {
    /// Endpoint values from the exact solution at the endpoints' own
    /// positions; moving endpoints follow the scheme's mesh equation.
    ExactDirichlet(Exact<T>),
}

impl<T: Scalar> BoundaryPolicy<T> {
    fn value(&self, x: T, t: T) -> Result<T> {
        match self {
            BoundaryPolicy::ExactDirichlet(sol) => sol.value(x, t),
        }
    }
}

/// Second difference used by the standard heat scheme.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum HeatLaplacian {
    /// `(u_{m+1} − 2u_m + u_{m−1})/h²`.
    #[default]
    Centered,
    /// `(u_{m+2} − 2u_{m+1} + u_m)/h²`; the last interior node falls back to
    /// the centred form.
    ForwardBiased,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SchemeOptions {
    pub heat_laplacian: HeatLaplacian,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepDiagnostics<T> {
    /// First residual component at each interior node of the new level.
    pub residuals: Vec<T>,
    pub min_spacing: T,
    pub max_du: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepResult<T> {
    pub next: TimeLevel<T>,
    pub diagnostics: StepDiagnostics<T>,
}

/// Constants of the rectangular mesh equations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshSteps<T> {
    pub h: T,
    pub k: T,
}

fn check_step<T: Scalar>(k: T) -> Result<()> {
    if k > T::zero() && k.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidStep(format!("time step k = {k} must be positive")))
    }
}

fn uniform_h<T: Scalar>(lv: &TimeLevel<T>, who: &str) -> Result<T> {
    lv.uniform_spacing(T::of(UNIFORM_TOL))
        .ok_or_else(|| Error::misuse(format!("{who} needs a uniform level")))
}

fn interior_check<T: Scalar>(lv: &TimeLevel<T>) -> Result<()> {
    if lv.len() < 3 {
        return Err(Error::misuse(format!("level has {} nodes, need at least 3", lv.len())));
    }
    Ok(())
}

fn logs<T: Scalar>(us: &[T]) -> Result<Vec<T>> {
    us.iter()
        .map(|&u| {
            if u > T::zero() && u.is_finite() {
                Ok(u.ln())
            } else {
                Err(Error::domain(format!("heat scheme needs u > 0, got {u}")))
            }
        })
        .collect()
}

fn row<T: Copy>(v: &[T], m: usize) -> [T; 3] {
    [v[m - 1], v[m], v[m + 1]]
}

/// Assembles the new level, fills the endpoints from the boundary policy,
/// validates it and gathers diagnostics.
fn finish<T: Scalar>(
    model: Model,
    kind: SchemeKind,
    lv: &TimeLevel<T>,
    k: T,
    xs: Vec<T>,
    mut us: Vec<T>,
    bc: &BoundaryPolicy<T>,
) -> Result<StepResult<T>> {
    let t_next = lv.t() + k;
    let last = xs.len() - 1;
    us[0] = bc.value(xs[0], t_next)?;
    us[last] = bc.value(xs[last], t_next)?;
    let next = TimeLevel::new(lv.n() + 1, t_next, &xs, &us)?;
    if let Err(diag) = validate_level(&next, default_eps(&next)) {
        if !diag.non_finite.is_empty() {
            return Err(Error::domain(format!("non-finite values at nodes {:?}", diag.non_finite)));
        }
        return Err(Error::MeshCollapse { level: next.n(), pairs: diag.tangled });
    }
    let h = lv.x_span() / T::of(last as f64);
    let steps = MeshSteps { h, k };
    let residuals = (1..last)
        .map(|m| {
            let st = Stencil::around(lv, m, Some(&next))?;
            Ok(scheme_residual(model, kind, &st, steps)?[0])
        })
        .collect::<Result<Vec<_>>>()?;
    let max_du = lv
        .nodes()
        .iter()
        .zip(next.nodes())
        .map(|(a, b)| (b.u - a.u).abs())
        .fold(T::zero(), T::max);
    let min_spacing = next.min_spacing();
    Ok(StepResult { next, diagnostics: StepDiagnostics { residuals, min_spacing, max_du } })
}

/// Forward Euler with the centred Laplacian on the rectangular mesh.
pub fn step_heat_standard<T: Scalar>(lv: &TimeLevel<T>, k: T, bc: &BoundaryPolicy<T>) -> Result<StepResult<T>> {
    step_heat_standard_with(lv, k, bc, SchemeOptions::default())
}

pub fn step_heat_standard_with<T: Scalar>(
    lv: &TimeLevel<T>,
    k: T,
    bc: &BoundaryPolicy<T>,
    opts: SchemeOptions,
) -> Result<StepResult<T>> {
    check_step(k)?;
    interior_check(lv)?;
    let h = uniform_h(lv, "standard heat scheme")?;
    let us = lv.us();
    let ls = logs(&us)?;
    let two = T::of(2.0);
    let n = us.len();
    let mut next = us.clone();
    for m in 1..n - 1 {
        let lap = match opts.heat_laplacian {
            HeatLaplacian::ForwardBiased if m + 2 < n => us[m + 2] - two * us[m + 1] + us[m],
            _ => us[m + 1] - two * us[m] + us[m - 1],
        } / (h * h);
        let u = us[m] + k * (lap + us[m] * ls[m]);
        if !(u > T::zero()) {
            return Err(Error::domain(format!("standard heat update produced u = {u} at m = {m}")));
        }
        next[m] = u;
    }
    finish(Model::HeatLog, SchemeKind::Standard, lv, k, lv.xs(), next, bc)
}

/// Invariant discretization restricted to the rectangular mesh (`σ = 0`).
pub fn step_heat_partial<T: Scalar>(lv: &TimeLevel<T>, k: T, bc: &BoundaryPolicy<T>) -> Result<StepResult<T>> {
    check_step(k)?;
    interior_check(lv)?;
    uniform_h(lv, "partially invariant heat scheme")?;
    let xs = lv.xs();
    let ls = logs(&lv.us())?;
    let e = k.exp();
    let mut next = lv.us();
    for m in 1..xs.len() - 1 {
        let g = central_first(row(&xs, m), row(&ls, m))?;
        let j = central_second(row(&xs, m), row(&ls, m))?;
        next[m] = (e * ls[m] - (e - e * e) * g * g + k * j).exp();
    }
    finish(Model::HeatLog, SchemeKind::PartiallyInvariant, lv, k, xs, next, bc)
}

/// Fully invariant heat scheme; nodes move by `σ = 2(1 − e^τ) (ln u)_x^d`.
pub fn step_heat_full<T: Scalar>(lv: &TimeLevel<T>, k: T, bc: &BoundaryPolicy<T>) -> Result<StepResult<T>> {
    check_step(k)?;
    interior_check(lv)?;
    let xs = lv.xs();
    let ls = logs(&lv.us())?;
    let e = k.exp();
    let drift = T::of(2.0) * (T::one() - e);
    let n = xs.len();
    let mut new_x = xs.clone();
    let mut next = lv.us();
    for m in 1..n - 1 {
        let g = central_first(row(&xs, m), row(&ls, m))?;
        let j = central_second(row(&xs, m), row(&ls, m))?;
        next[m] = (e * ls[m] + e * (T::one() - e) * g * g + k * j).exp();
        new_x[m] = xs[m] + drift * g;
    }
    // one-sided slopes at the ends
    let g_left = (ls[1] - ls[0]) / (xs[1] - xs[0]);
    let g_right = (ls[n - 1] - ls[n - 2]) / (xs[n - 1] - xs[n - 2]);
    new_x[0] = xs[0] + drift * g_left;
    new_x[n - 1] = xs[n - 1] + drift * g_right;
    finish(Model::HeatLog, SchemeKind::FullyInvariant, lv, k, new_x, next, bc)
}

fn burgers_rect_update<T: Scalar>(lv: &TimeLevel<T>, k: T, who: &str) -> Result<Vec<T>> {
    check_step(k)?;
    interior_check(lv)?;
    uniform_h(lv, who)?;
    let t = lv.t();
    if !(t > T::zero()) {
        return Err(Error::domain(format!("Burgers scheme needs t > 0, got {t}")));
    }
    let xs = lv.xs();
    let us = lv.us();
    let mut next = us.clone();
    for m in 1..xs.len() - 1 {
        let ux = central_first(row(&xs, m), row(&us, m))?;
        let uxx = central_second(row(&xs, m), row(&us, m))?;
        next[m] = us[m] - k * (us[m] / t + us[m] * ux + uxx);
    }
    Ok(next)
}

/// Forward Euler with centred space differences on the rectangular mesh.
pub fn step_burgers_standard<T: Scalar>(lv: &TimeLevel<T>, k: T, bc: &BoundaryPolicy<T>) -> Result<StepResult<T>> {
    let next = burgers_rect_update(lv, k, "standard Burgers scheme")?;
    finish(Model::SphericalBurgers, SchemeKind::Standard, lv, k, lv.xs(), next, bc)
}

/// Invariant discretization on the rectangular mesh. With `σ = 0` the update
/// coincides with [`step_burgers_standard`]; the two differ in their mesh
/// equations' behaviour under the group, not in the update.
pub fn step_burgers_partial<T: Scalar>(lv: &TimeLevel<T>, k: T, bc: &BoundaryPolicy<T>) -> Result<StepResult<T>> {
    let next = burgers_rect_update(lv, k, "partially invariant Burgers scheme")?;
    finish(Model::SphericalBurgers, SchemeKind::PartiallyInvariant, lv, k, lv.xs(), next, bc)
}

/// Fully invariant Burgers scheme; nodes move by `σ = u t ln(t₀₁/t₀₀)`.
pub fn step_burgers_full<T: Scalar>(lv: &TimeLevel<T>, k: T, bc: &BoundaryPolicy<T>) -> Result<StepResult<T>> {
    check_step(k)?;
    interior_check(lv)?;
    let t0 = lv.t();
    if !(t0 > T::zero()) {
        return Err(Error::domain(format!("Burgers scheme needs t > 0, got {t0}")));
    }
    let t1 = t0 + k;
    let log_ratio = (t1 / t0).ln();
    let xs = lv.xs();
    let us = lv.us();
    let new_x: Vec<T> = xs.iter().zip(&us).map(|(&x, &u)| x + u * t0 * log_ratio).collect();
    let mut next = us.clone();
    let two = T::of(2.0);
    for m in 1..xs.len() - 1 {
        let uxx = central_second(row(&xs, m), row(&us, m))?;
        next[m] = us[m] * t0 / t1 - two * k * uxx;
    }
    finish(Model::SphericalBurgers, SchemeKind::FullyInvariant, lv, k, new_x, next, bc)
}

/// One step of any scheme.
pub fn step<T: Scalar>(
    model: Model,
    kind: SchemeKind,
    lv: &TimeLevel<T>,
    k: T,
    bc: &BoundaryPolicy<T>,
) -> Result<StepResult<T>> {
    step_with(model, kind, lv, k, bc, SchemeOptions::default())
}

pub fn step_with<T: Scalar>(
    model: Model,
    kind: SchemeKind,
    lv: &TimeLevel<T>,
    k: T,
    bc: &BoundaryPolicy<T>,
    opts: SchemeOptions,
) -> Result<StepResult<T>> {
    match (model, kind) {
        (Model::HeatLog, SchemeKind::Standard) => step_heat_standard_with(lv, k, bc, opts),
        (Model::HeatLog, SchemeKind::PartiallyInvariant) => step_heat_partial(lv, k, bc),
        (Model::HeatLog, SchemeKind::FullyInvariant) => step_heat_full(lv, k, bc),
        (Model::SphericalBurgers, SchemeKind::Standard) => step_burgers_standard(lv, k, bc),
        (Model::SphericalBurgers, SchemeKind::PartiallyInvariant) => step_burgers_partial(lv, k, bc),
        (Model::SphericalBurgers, SchemeKind::FullyInvariant) => step_burgers_full(lv, k, bc),
    }
}

fn rect_mesh_residuals<T: Scalar>(st: &Stencil<T>, steps: MeshSteps<T>) -> Result<[T; 4]> {
    let base = st.at(0, 0)?;
    let right = st.at(1, 0)?;
    let up = st.at(0, 1)?;
    Ok([
        right.x - base.x - steps.h,
        up.x - base.x,
        right.t - base.t,
        up.t - base.t - steps.k,
    ])
}

struct Row<T> {
    x: [T; 3],
    f: [T; 3],
}

fn spatial<T: Scalar>(st: &Stencil<T>, f: impl Fn(T) -> Result<T>) -> Result<Row<T>> {
    let p = [st.at(-1, 0)?, st.at(0, 0)?, st.at(1, 0)?];
    Ok(Row { x: p.map(|n| n.x), f: [f(p[0].u)?, f(p[1].u)?, f(p[2].u)?] })
}

fn ln_pos<T: Scalar>(u: T) -> Result<T> {
    if u > T::zero() {
        Ok(u.ln())
    } else {
        Err(Error::domain(format!("logarithm of non-positive value u = {u}")))
    }
}

/// Coordinate residuals of the fully invariant heat scheme.
fn heat_full_raw<T: Scalar>(st: &Stencil<T>, k: T) -> Result<Vec<T>> {
    let r = spatial(st, ln_pos)?;
    let base = st.at(0, 0)?;
    let right = st.at(1, 0)?;
    let up = st.at(0, 1)?;
    let g = central_first(r.x, r.f)?;
    let j = central_second(r.x, r.f)?;
    let tau = up.t - base.t;
    let sigma = up.x - base.x;
    let e = tau.exp();
    let e1 = (ln_pos(up.u)? - e * r.f[1]) / tau - e * (T::one() - e) / tau * g * g - j;
    let e2 = sigma - T::of(2.0) * (T::one() - e) * g;
    Ok(vec![e1, e2, tau - k, right.t - base.t])
}

/// Coordinate residuals of the fully invariant Burgers scheme.
fn burgers_full_raw<T: Scalar>(st: &Stencil<T>) -> Result<Vec<T>> {
    let r = spatial(st, Ok)?;
    let base = st.at(0, 0)?;
    let right = st.at(1, 0)?;
    let up = st.at(0, 1)?;
    let tau = up.t - base.t;
    let uxx = central_second(r.x, r.f)?;
    let e1 = up.u - base.u * base.t / up.t + T::of(2.0) * tau * uxx;
    let e2 = (up.x - base.x) - base.u * base.t * (up.t / base.t).ln();
    let mut out = vec![e1, e2, right.t - base.t];
    if let Ok(up2) = st.get(MultiIndex::new(0, 2)) {
        out.push(up2.t - T::of(2.0) * up.t + base.t);
    }
    Ok(out)
}

/// Residual vector `(E₁, mesh equations…)` of a scheme on one stencil.
///
/// Standard and partially invariant schemes report their coordinate
/// residuals with the rectangular mesh equations `Δx − h, δx, Δt, δt − k`.
/// Fully invariant schemes report their residuals evaluated on the stencil
/// moved to the cross-section by its frame; this is the invariantized scheme,
/// whose zero set coincides with that of the coordinate form. For the heat
/// model `E₁` then equals `I^d − J^d` on any stencil.
pub fn scheme_residual<T: Scalar>(
    model: Model,
    kind: SchemeKind,
    st: &Stencil<T>,
    steps: MeshSteps<T>,
) -> Result<Vec<T>> {
    st.require(&SCHEME_OFFSETS)?;
    let k = steps.k;
    match (model, kind) {
        (Model::HeatLog, SchemeKind::Standard) => {
            let base = st.at(0, 0)?;
            let up = st.at(0, 1)?;
            let r = spatial(st, Ok)?;
            let lap = (r.f[2] - T::of(2.0) * r.f[1] + r.f[0]) / (steps.h * steps.h);
            let e1 = (up.u - base.u) / k - lap - base.u * ln_pos(base.u)?;
            let mut out = vec![e1];
            out.extend(rect_mesh_residuals(st, steps)?);
            Ok(out)
        }
        (Model::HeatLog, SchemeKind::PartiallyInvariant) => {
            let inv = heat_invariants(st)?;
            let mut out = vec![inv.i_d - inv.j_d];
            out.extend(rect_mesh_residuals(st, steps)?);
            Ok(out)
        }
        (Model::HeatLog, SchemeKind::FullyInvariant) => heat_full_raw(&normalize_heat(st)?, k),
        (Model::SphericalBurgers, SchemeKind::Standard | SchemeKind::PartiallyInvariant) => {
            let base = st.at(0, 0)?;
            let up = st.at(0, 1)?;
            if !(base.t > T::zero()) {
                return Err(Error::domain(format!("Burgers residual needs t > 0, got {}", base.t)));
            }
            let r = spatial(st, Ok)?;
            let ux = central_first(r.x, r.f)?;
            let uxx = central_second(r.x, r.f)?;
            let u_t = if kind == SchemeKind::Standard {
                (up.u - base.u) / k
            } else {
                let tau = up.t - base.t;
                ((up.u - base.u) - (up.x - base.x) * ux) / tau
            };
            let mut out = vec![u_t + base.u / base.t + base.u * ux + uxx];
            out.extend(rect_mesh_residuals(st, steps)?);
            Ok(out)
        }
        (Model::SphericalBurgers, SchemeKind::FullyInvariant) => burgers_full_raw(&normalize_burgers(st)?),
    }
}

/// A completed run: the mesh history and per-step diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Evolution<T> {
    pub history: MeshHistory<T>,
    pub diagnostics: Vec<StepDiagnostics<T>>,
}

/// Number of steps of size `k` from `t0` to `t_final`; must be integral to 1e-9.
pub fn step_count<T: Scalar>(t0: T, t_final: T, k: T) -> Result<usize> {
    check_step(k)?;
    if t_final < t0 {
        return Err(Error::misuse(format!("final time {t_final} precedes start {t0}")));
    }
    let ratio = (t_final - t0) / k;
    let steps = ratio.round();
    if (ratio - steps).abs() > T::of(1e-9) * T::one().max(steps) {
        return Err(Error::misuse(format!(
            "(t_final − t0)/k = {ratio} is not an integer number of steps"
        )));
    }
    steps.to_usize().ok_or_else(|| Error::misuse("step count overflow"))
}

/// Steps `initial` forward to `t_final`. Errors carry the failing level index.
pub fn evolve<T: Scalar>(
    model: Model,
    kind: SchemeKind,
    initial: TimeLevel<T>,
    k: T,
    t_final: T,
    bc: &BoundaryPolicy<T>,
) -> Result<Evolution<T>> {
    evolve_with(model, kind, initial, k, t_final, bc, SchemeOptions::default())
}

pub fn evolve_with<T: Scalar>(
    model: Model,
    kind: SchemeKind,
    initial: TimeLevel<T>,
    k: T,
    t_final: T,
    bc: &BoundaryPolicy<T>,
    opts: SchemeOptions,
) -> Result<Evolution<T>> {
    let steps = step_count(initial.t(), t_final, k)?;
    if let Err(diag) = validate_level(&initial, default_eps(&initial)) {
        return Err(Error::misuse(format!("initial level invalid: {diag:?}")));
    }
    let mut history = MeshHistory::new(initial);
    let mut diagnostics = Vec::with_capacity(steps);
    for _ in 0..steps {
        let current = history.last();
        let level = current.n();
        let res = step_with(model, kind, current, k, bc, opts).map_err(|e| e.at_level(level))?;
        history.push(res.next).map_err(|e| e.at_level(level))?;
        diagnostics.push(res.diagnostics);
    }
    Ok(Evolution { history, diagnostics })
}
