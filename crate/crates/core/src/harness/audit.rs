//! Invariance audit: residuals of each scheme evaluated on random stencils
//! before and after random group transformations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::Stencil;
use crate::group_action::{burgers_act_stencil, heat_act_stencil, BurgersGroupElement, HeatGroupElement};
use crate::schemes::{scheme_residual, MeshSteps, Model, SchemeKind};
use crate::solutions::{heat_exact_log, HeatExact};
use crate::taylor_fd::central_first;

/// Relative tolerance for a residual to count as unchanged.
pub const AUDIT_TOLERANCE: f64 = 1e-8;

/// A sampled stencil with its mesh constants.
#[derive(Clone, Debug, PartialEq)]
pub struct AuditSample {
    pub stencil: Stencil<f64>,
    pub steps: MeshSteps<f64>,
}

/// Stencil and group parameters that produced a row's largest discrepancy.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub sample: AuditSample,
    pub params: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditRow {
    pub model: Model,
    pub scheme: SchemeKind,
    /// `lambda<i>` for a one-parameter subgroup, `all` for the full group.
    pub subgroup: String,
    pub samples: usize,
    pub max_discrepancy: f64,
    pub pass: bool,
    pub witness: Option<Witness>,
}

impl AuditRow {
    /// Recomputes the discrepancy recorded by the witness.
    pub fn replay(&self) -> Result<Option<f64>> {
        self.witness
            .as_ref()
            .map(|w| discrepancy(self.model, self.scheme, &w.sample, &w.params))
            .transpose()
    }
}

/// Outcome of jointly imposing the rectangular spacing `x₁₀ − x₀₀ = h` and
/// the invariant node motion `σ = 2(1 − e^τ)(ln u)_x` on the steady heat
/// solution sampled at spacing `h`.
///
/// Shifting the spacing equation in time and the motion equation in space
/// gives `x₁₁ − x₀₁ = h + 2(1 − e^k) Δ[(ln u)_x]`, so both hold only if
/// `Δ[(ln u)_x] = 0` at every pair of neighbours.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IncompatibilityWitness {
    pub h: f64,
    pub k: f64,
    /// Largest `|Δ[(ln u)_x]|` over neighbouring interior nodes.
    pub restriction_violation: f64,
    /// Largest `|x₁₁ − x₀₁ − h|` produced by the node motion.
    pub spacing_drift: f64,
    /// Smallest `|h − 2 Δ[(ln u)_x] (1 − e^k)|`, the restriction in the form
    /// `h = 2 Δ[(ln u)_x](1 − e^k)`.
    pub alternate_form_violation: f64,
    pub tolerance: f64,
}

impl IncompatibilityWitness {
    pub fn contradicts(&self) -> bool {
        self.restriction_violation > self.tolerance && self.alternate_form_violation > self.tolerance
    }
}

pub fn incompatibility_witness(h: f64, k: f64, tolerance: f64) -> Result<IncompatibilityWitness> {
    if !(h > 0.0 && k > 0.0) {
        return Err(Error::misuse("incompatibility witness needs h, k > 0"));
    }
    let sol = HeatExact { c: 0.0 };
    let n = crate::solutions::node_count(-5.0, 5.0, h)?;
    let xs: Vec<f64> = (0..n).map(|m| -5.0 + m as f64 * h).collect();
    let ls: Vec<f64> = xs.iter().map(|&x| heat_exact_log(&sol, x, 0.0)).collect();
    let g = (1..n - 1)
        .map(|m| central_first([xs[m - 1], xs[m], xs[m + 1]], [ls[m - 1], ls[m], ls[m + 1]]))
        .collect::<Result<Vec<_>>>()?;
    let drift = 2.0 * (1.0 - k.exp());
    let mut w = IncompatibilityWitness {
        h,
        k,
        restriction_violation: 0.0,
        spacing_drift: 0.0,
        alternate_form_violation: f64::INFINITY,
        tolerance,
    };
    for pair in g.windows(2) {
        let dg = pair[1] - pair[0];
        w.restriction_violation = w.restriction_violation.max(dg.abs());
        w.spacing_drift = w.spacing_drift.max((drift * dg).abs());
        w.alternate_form_violation = w.alternate_form_violation.min((h - drift * dg).abs());
    }
    Ok(w)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
    pub incompatibility: Option<IncompatibilityWitness>,
}

fn param_count(model: Model) -> usize {
    match model {
        Model::HeatLog => 4,
        Model::SphericalBurgers => 3,
    }
}

/// Random stencil on which `kind`'s residual is defined. Rectangular schemes
/// get a rectangular stencil; fully invariant ones a moved node above.
pub fn sample_stencil(model: Model, kind: SchemeKind, rng: &mut impl Rng) -> AuditSample {
    let h = rng.gen_range(0.05..0.3);
    let k = rng.gen_range(0.001..0.05);
    let x0 = rng.gen_range(-2.0..2.0);
    let (t0, field): (f64, fn(&mut dyn rand::RngCore) -> f64) = match model {
        Model::HeatLog => (rng.gen_range(-0.5..0.5), |r| r.gen_range(-1.0..1.0f64).exp()),
        Model::SphericalBurgers => (rng.gen_range(0.5..2.0), |r| r.gen_range(-1.0..1.0)),
    };
    let (left, right, sigma) = if kind.moves_mesh() {
        (h * rng.gen_range(0.7..1.3), h * rng.gen_range(0.7..1.3), rng.gen_range(-0.5..0.5) * h)
    } else {
        (h, h, 0.0)
    };
    let mut f = || field(rng);
    let stencil = Stencil::new()
        .with_point(-1, 0, x0 - left, t0, f())
        .with_point(0, 0, x0, t0, f())
        .with_point(1, 0, x0 + right, t0, f())
        .with_point(0, 1, x0 + sigma, t0 + k, f());
    AuditSample { stencil, steps: MeshSteps { h, k } }
}

fn transform(model: Model, st: &Stencil<f64>, params: &[f64]) -> Result<Stencil<f64>> {
    match model {
        Model::HeatLog => heat_act_stencil(&HeatGroupElement::from_params([params[0], params[1], params[2], params[3]]), st),
        Model::SphericalBurgers => {
            burgers_act_stencil(&BurgersGroupElement::from_params([params[0], params[1], params[2]]), st)
        }
    }
}

/// Largest relative change of any residual component under `params`.
pub fn discrepancy(model: Model, kind: SchemeKind, sample: &AuditSample, params: &[f64]) -> Result<f64> {
    let before = scheme_residual(model, kind, &sample.stencil, sample.steps)?;
    let moved = transform(model, &sample.stencil, params)?;
    let after = scheme_residual(model, kind, &moved, sample.steps)?;
    Ok(before
        .iter()
        .zip(&after)
        .map(|(a, b)| (b - a).abs() / a.abs().max(1.0))
        .fold(0.0, f64::max))
}

/// Audits every scheme in `kinds` against each one-parameter subgroup and
/// the full group, `samples` random draws each.
pub fn invariance_audit(model: Model, kinds: &[SchemeKind], samples: usize, seed: u64) -> Result<AuditReport> {
    invariance_audit_with(model, kinds, samples, seed, 0.001, 0.15)
}

/// As [`invariance_audit`], with the mesh constants of the heat
/// incompatibility witness.
pub fn invariance_audit_with(
    model: Model,
    kinds: &[SchemeKind],
    samples: usize,
    seed: u64,
    k: f64,
    h: f64,
) -> Result<AuditReport> {
    if samples == 0 {
        return Err(Error::misuse("audit needs at least one sample"));
    }
    let p = param_count(model);
    let mut subgroups: Vec<(String, Vec<usize>)> = (0..p).map(|i| (format!("lambda{}", i + 1), vec![i])).collect();
    subgroups.push(("all".into(), (0..p).collect()));
    let mut rows = Vec::new();
    for (ki, &kind) in kinds.iter().enumerate() {
        for (si, (name, active)) in subgroups.iter().enumerate() {
            // one stream per row so rows do not depend on each other
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((ki * 16 + si) as u64);
            let mut worst = 0.0f64;
            let mut witness = None;
            for _ in 0..samples {
                let sample = sample_stencil(model, kind, &mut rng);
                let mut params = vec![0.0; p];
                for &i in active {
                    params[i] = rng.gen_range(-1.0..1.0);
                }
                let d = discrepancy(model, kind, &sample, &params)?;
                if d > worst || witness.is_none() {
                    worst = worst.max(d);
                    witness = Some(Witness { sample, params });
                }
            }
            rows.push(AuditRow {
                model,
                scheme: kind,
                subgroup: name.clone(),
                samples,
                max_discrepancy: worst,
                pass: worst <= AUDIT_TOLERANCE,
                witness,
            });
        }
    }
    let incompatibility = match model {
        Model::HeatLog => Some(incompatibility_witness(h, k, 1e-3)?),
        Model::SphericalBurgers => None,
    };
    Ok(AuditReport { rows, incompatibility })
}
