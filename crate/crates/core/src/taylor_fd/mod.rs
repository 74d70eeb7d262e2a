//! Finite difference derivatives on arbitrary meshes.
//!
//! First and second order derivatives come from Taylor expansions around the
//! base node `(0, 0)` written in terms of the forward differences along each
//! index direction; the resulting small linear systems are solved directly.
//! The three-point centred formulas at the end of the module are the ones the
//! schemes actually use.

mod system;

pub use system::{TaylorSystem, DEGENERACY_THRESHOLD};

use crate::error::{Error, Result};
use crate::grid::{forward_diffs, Stencil, Triple};
use crate::scalar::Scalar;

/// Discrete first derivatives `(u_x, u_t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FirstDerivs2D<T> {
    pub u_x: T,
    pub u_t: T,
}

/// Discrete second derivatives `(u_xx, u_xt, u_tt)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondDerivs2D<T> {
    pub u_xx: T,
    pub u_xt: T,
    pub u_tt: T,
}

/// Solves `dx · grad = du` for the first order derivatives in `p` variables.
///
/// Row `i` of `dx` holds the displacement `Δ_i x⁰ .. Δ_i x^{p-1}` along index
/// direction `i`, and `du[i]` the matching change `Δ_i u`.
pub fn first_derivs_general<T: Scalar>(dx: &[Vec<T>], du: &[T]) -> Result<Vec<T>> {
    TaylorSystem::new(dx, du)?.solve("first order derivatives")
}

/// Closed-form 2×2 first derivatives on the stencil `(0,0), (1,0), (0,1)`.
pub fn first_derivs_2d<T: Scalar>(st: &Stencil<T>) -> Result<FirstDerivs2D<T>> {
    let (d, e) = forward_diffs(st)?;
    first_from_diffs(d, e)
}

fn first_from_diffs<T: Scalar>(d: Triple<T>, e: Triple<T>) -> Result<FirstDerivs2D<T>> {
    let det = d.x * e.t - e.x * d.t;
    let scale = (d.x * d.x + d.t * d.t).sqrt() * (e.x * e.x + e.t * e.t).sqrt();
    if !(det.abs() > T::of(DEGENERACY_THRESHOLD) * scale) {
        return Err(Error::DegenerateStencil {
            context: "first order derivatives",
            conditioning: if scale > T::zero() { (det.abs() / scale).as_f64() } else { 0.0 },
        });
    }
    Ok(FirstDerivs2D {
        u_x: (e.t * d.u - d.t * e.u) / det,
        u_t: (d.x * e.u - e.x * d.u) / det,
    })
}

/// The 3×3 system `H · (u_xx, u_xt, u_tt) = V` on the second order triangle.
pub fn second_order_system<T: Scalar>(st: &Stencil<T>) -> Result<TaylorSystem<T>> {
    let z = |m, n| st.at(m, n).map(|p| p.coords());
    let z00 = z(0, 0)?;
    let z10 = z(1, 0)?;
    let z01 = z(0, 1)?;
    let z20 = z(2, 0)?;
    let z11 = z(1, 1)?;
    let z02 = z(0, 2)?;
    let first = first_derivs_2d(st)?;

    let two = T::of(2.0);
    let half = T::of(0.5);
    let d = z10 - z00;
    let e = z01 - z00;
    let a20 = z20 - z00;
    let a11 = z11 - z00;
    let a02 = z02 - z00;
    // second differences Δ²z, δΔz, δ²z
    let dd = z20 - z10 - z10 + z00;
    let de = z11 - z10 - z01 + z00;
    let ee = z02 - z01 - z01 + z00;

    let rows = vec![
        vec![
            (a20.x * a20.x - two * d.x * d.x) * half,
            a20.x * a20.t - two * d.x * d.t,
            (a20.t * a20.t - two * d.t * d.t) * half,
        ],
        vec![
            (a11.x * a11.x - d.x * d.x - e.x * e.x) * half,
            a11.x * a11.t - d.x * d.t - e.x * e.t,
            (a11.t * a11.t - d.t * d.t - e.t * e.t) * half,
        ],
        vec![
            (a02.x * a02.x - two * e.x * e.x) * half,
            a02.x * a02.t - two * e.x * e.t,
            (a02.t * a02.t - two * e.t * e.t) * half,
        ],
    ];
    let v = |s: Triple<T>| s.u - s.x * first.u_x - s.t * first.u_t;
    let sq = |s: Triple<T>| s.x * s.x + s.t * s.t;
    let scales = vec![
        sq(a20) + two * sq(d),
        sq(a11) + sq(d) + sq(e),
        sq(a02) + two * sq(e),
    ];
    TaylorSystem::new(&rows, &[v(dd), v(de), v(ee)])?.with_row_scales(scales)
}

/// Second derivatives `H⁻¹V`, with the first derivatives in `V` taken from
/// [`first_derivs_2d`].
///
/// Exact on quadratics when the stencil is an affine image of the index
/// lattice (all second differences of `x` and `t` vanish). On the image of a
/// smooth curvilinear map of the lattice with spacing `ε` the error is
/// `O(ε)`. Stencils whose second differences of `x`, `t` are of the order of
/// the spacing itself give `O(1)` errors.
pub fn second_derivs_2d<T: Scalar>(st: &Stencil<T>) -> Result<SecondDerivs2D<T>> {
    let sol = second_order_system(st)?.solve("second order derivatives")?;
    Ok(SecondDerivs2D { u_xx: sol[0], u_xt: sol[1], u_tt: sol[2] })
}

/// Centred first difference `(f₊ − f₋)/(x₊ − x₋)`.
pub fn central_first<T: Scalar>(x: [T; 3], f: [T; 3]) -> Result<T> {
    let span = x[2] - x[0];
    if span == T::zero() || !span.is_finite() {
        return Err(Error::DegenerateStencil { context: "centred first difference", conditioning: 0.0 });
    }
    Ok((f[2] - f[0]) / span)
}

/// Three-point second difference on a monotone, possibly nonuniform, stencil.
pub fn central_second<T: Scalar>(x: [T; 3], f: [T; 3]) -> Result<T> {
    if !(x[0] < x[1] && x[1] < x[2]) {
        return Err(Error::DegenerateStencil { context: "centred second difference", conditioning: 0.0 });
    }
    let right = (f[2] - f[1]) / (x[2] - x[1]);
    let left = (f[1] - f[0]) / (x[1] - x[0]);
    Ok(T::of(2.0) / (x[2] - x[0]) * (right - left))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{MultiIndex, SECOND_ORDER_OFFSETS};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Cramer's rule, independent of the elimination path.
    fn cramer2(a: [[f64; 2]; 2], b: [f64; 2]) -> [f64; 2] {
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        [
            (b[0] * a[1][1] - a[0][1] * b[1]) / det,
            (a[0][0] * b[1] - b[0] * a[1][0]) / det,
        ]
    }

    /// Fits `c0 + c1 x + c2 t + c3 x² + c4 x t + c5 t²` through six points by
    /// Gauss-Jordan elimination and returns `(u_xx, u_xt, u_tt)`.
    fn quadratic_fit_second(pts: &[(f64, f64, f64)]) -> [f64; 3] {
        let mut m: Vec<Vec<f64>> = pts
            .iter()
            .map(|&(x, t, u)| vec![1.0, x, t, x * x, x * t, t * t, u])
            .collect();
        for c in 0..6 {
            let p = (c..6).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
            m.swap(c, p);
            let piv = m[c][c];
            for v in m[c].iter_mut() {
                *v /= piv;
            }
            for r in 0..6 {
                if r != c {
                    let f = m[r][c];
                    let pivot_row = m[c].clone();
                    for (v, p) in m[r].iter_mut().zip(&pivot_row) {
                        *v -= f * p;
                    }
                }
            }
        }
        [2.0 * m[3][6], m[4][6], 2.0 * m[5][6]]
    }

    fn stencil_from<F: Fn(f64, f64) -> f64>(pts: &[(i64, i64, f64, f64)], f: F) -> Stencil<f64> {
        pts.iter().fold(Stencil::new(), |st, &(m, n, x, t)| st.with_point(m, n, x, t, f(x, t)))
    }

    fn affine_triangle(origin: (f64, f64), jac: [[f64; 2]; 2]) -> Vec<(i64, i64, f64, f64)> {
        SECOND_ORDER_OFFSETS
            .iter()
            .map(|o| {
                let (a, b) = (o.m as f64, o.n as f64);
                (o.m, o.n, origin.0 + jac[0][0] * a + jac[0][1] * b, origin.1 + jac[1][0] * a + jac[1][1] * b)
            })
            .collect()
    }

    #[test]
    fn general_axis_aligned() {
        let (h, k, a, b) = (0.3f64, 0.01, 1.7, -0.2);
        let g = first_derivs_general(&[vec![h, 0.0], vec![0.0, k]], &[a, b]).unwrap();
        assert!((g[0] - a / h).abs() < 1e-14 && (g[1] - b / k).abs() < 1e-12);
        let g = first_derivs_general(&[vec![h]], &[a]).unwrap();
        assert!((g[0] - a / h).abs() < 1e-15);
    }

    #[test]
    fn general_reproduces_linear_field() {
        let u = |x: f64, t: f64| 3.0 * x - 2.0 * t;
        let dx = [[0.15, 0.0], [0.02, 0.001]];
        let du = [u(0.15, 0.0) - u(0.0, 0.0), u(0.02, 0.001) - u(0.0, 0.0)];
        let oracle = cramer2(dx, du);
        let g = first_derivs_general(&[dx[0].to_vec(), dx[1].to_vec()], &du).unwrap();
        for i in 0..2 {
            assert!((g[i] - oracle[i]).abs() < 1e-10);
        }
        assert!((g[0] - 3.0).abs() < 1e-10 && (g[1] + 2.0).abs() < 1e-10);
    }

    #[test]
    fn general_three_variables() {
        // u = x - 2y + 4z
        let dx = vec![vec![0.1, 0.02, 0.0], vec![0.0, 0.2, 0.01], vec![0.03, 0.0, 0.3]];
        let du: Vec<f64> = dx.iter().map(|r| r[0] - 2.0 * r[1] + 4.0 * r[2]).collect();
        let g = first_derivs_general(&dx, &du).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-12 && (g[1] + 2.0).abs() < 1e-12 && (g[2] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn general_degenerate() {
        assert!(matches!(
            first_derivs_general(&[vec![1.0, 1.0], vec![1.0, 1.0 + 1e-13]], &[0.0, 0.0]),
            Err(Error::DegenerateStencil { .. })
        ));
    }

    #[test]
    fn two_d_axis_aligned() {
        let st = Stencil::new()
            .with_point(0, 0, 0.0, 0.0, 1.0)
            .with_point(1, 0, 1.0, 0.0, 3.0)
            .with_point(0, 1, 0.0, 1.0, 2.0);
        let d = first_derivs_2d(&st).unwrap();
        assert_eq!((d.u_x, d.u_t), (2.0, 1.0));
    }

    #[test]
    fn two_d_flat_time_closed_form() {
        let st = Stencil::new()
            .with_point(0, 0, 0.2f64, 1.0, 0.4)
            .with_point(1, 0, 0.5, 1.0, 0.1)
            .with_point(0, 1, 0.27, 1.01, 0.9);
        let d = first_derivs_2d(&st).unwrap();
        let ux = (0.1 - 0.4) / (0.5 - 0.2);
        let ut = ((0.9 - 0.4) - (0.27 - 0.2) * ux) / (1.01 - 1.0);
        assert!((d.u_x - ux).abs() < 1e-12 && (d.u_t - ut).abs() < 1e-9);
    }

    #[test]
    fn two_d_skewed_linear() {
        let u = |x: f64, t: f64| x + 5.0 * t;
        let st = stencil_from(&[(0, 0, 0.0, 0.0), (1, 0, 0.2, 0.0), (0, 1, 0.05, 0.01)], u);
        let d = first_derivs_2d(&st).unwrap();
        let oracle = cramer2([[0.2, 0.0], [0.05, 0.01]], [u(0.2, 0.0) - u(0.0, 0.0), u(0.05, 0.01) - u(0.0, 0.0)]);
        assert!((d.u_x - oracle[0]).abs() < 1e-10 && (d.u_t - oracle[1]).abs() < 1e-10);
        assert!((d.u_x - 1.0).abs() < 1e-10 && (d.u_t - 5.0).abs() < 1e-10);
    }

    #[test]
    fn two_d_degenerate_and_incomplete() {
        let st = Stencil::new()
            .with_point(0, 0, 0.0, 0.0, 1.0)
            .with_point(1, 0, 1.0, 1.0, 3.0)
            .with_point(0, 1, 2.0, 2.0, 2.0);
        assert!(matches!(first_derivs_2d(&st), Err(Error::DegenerateStencil { .. })));
        let st = Stencil::new().with_point(0, 0, 0.0, 0.0, 1.0);
        assert!(matches!(first_derivs_2d(&st), Err(Error::IncompleteStencil(o)) if o == MultiIndex::new(1, 0)));
    }

    #[test]
    fn second_uniform_rectangle_x_squared() {
        let pts = affine_triangle((0.0, 0.0), [[0.1, 0.0], [0.0, 0.01]]);
        let s = second_derivs_2d(&stencil_from(&pts, |x, _| x * x)).unwrap();
        assert!((s.u_xx - 2.0).abs() < 1e-9 && s.u_xt.abs() < 1e-9 && s.u_tt.abs() < 1e-9);
    }

    #[test]
    fn second_constant_field() {
        let pts = affine_triangle((0.4, 1.2), [[0.1, 0.03], [0.02, 0.2]]);
        let st = stencil_from(&pts, |_, _| 7.5);
        let s = second_derivs_2d(&st).unwrap();
        let f = first_derivs_2d(&st).unwrap();
        assert_eq!((s.u_xx, s.u_xt, s.u_tt), (0.0, 0.0, 0.0));
        assert_eq!((f.u_x, f.u_t), (0.0, 0.0));
    }

    #[test]
    fn second_quadratic_on_random_lattice_images() {
        let q = |x: f64, t: f64| 2.0 * x * x - 3.0 * x * t + t * t + x - t + 4.0;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let jac = [[rng.gen_range(0.05..0.3), rng.gen_range(-0.1..0.1)], [rng.gen_range(-0.1..0.1), rng.gen_range(0.05..0.3)]];
            let pts = affine_triangle((rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), jac);
            let st = stencil_from(&pts, q);
            let oracle = quadratic_fit_second(&pts.iter().map(|p| (p.2, p.3, q(p.2, p.3))).collect::<Vec<_>>());
            let s = second_derivs_2d(&st).unwrap();
            for (got, want) in [s.u_xx, s.u_xt, s.u_tt].into_iter().zip(oracle) {
                assert!((got - want).abs() <= 1e-8 * want.abs().max(1.0), "{got} vs {want}");
            }
            let sys = second_order_system(&st).unwrap();
            let x = [s.u_xx, s.u_xt, s.u_tt];
            let bn = sys.rhs().iter().fold(0.0f64, |a, b| a.max(b.abs()));
            let xn = x.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            assert!(sys.residual(&x) <= 1e-12 * (sys.matrix_norm() * xn + bn));
        }
    }

    #[test]
    fn second_curvilinear_lattice_is_first_order() {
        // smooth nonlinear image of the lattice, spacing ε
        let map = |a: f64, b: f64| (a + 0.4 * a * a + 0.3 * b * b, b + 0.2 * a * b + 0.1 * a);
        let f = |x: f64, t: f64| (0.3 + x).sin() * (0.5 * t).exp();
        let exact = [-(0.3f64).sin(), 0.5 * (0.3f64).cos(), 0.25 * (0.3f64).sin()];
        let err = |eps: f64| {
            let pts: Vec<_> = SECOND_ORDER_OFFSETS
                .iter()
                .map(|o| {
                    let (x, t) = map(o.m as f64 * eps, o.n as f64 * eps);
                    (o.m, o.n, x, t)
                })
                .collect();
            let s = second_derivs_2d(&stencil_from(&pts, f)).unwrap();
            (s.u_xx - exact[0]).abs().max((s.u_xt - exact[1]).abs()).max((s.u_tt - exact[2]).abs())
        };
        let ratio = err(0.02) / err(0.01);
        assert!((1.5..=2.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn second_perturbed_stencil_is_inconsistent() {
        // second differences of the nodes comparable to the spacing
        let shape = [(0, 0, 0.0, 0.0), (1, 0, 1.0, 0.1), (0, 1, 0.2, 1.0), (2, 0, 2.3, 0.1), (1, 1, 1.1, 1.2), (0, 2, 0.3, 1.9)];
        let f = |x: f64, _t: f64| x * x;
        let u_xx = |eps: f64| {
            let pts: Vec<_> = shape.iter().map(|&(m, n, x, t)| (m, n, eps * x, eps * t)).collect();
            second_derivs_2d(&stencil_from(&pts, f)).unwrap().u_xx
        };
        // the error does not shrink with the stencil
        let (a, b) = (u_xx(0.02) - 2.0, u_xx(0.01) - 2.0);
        assert!(a.abs() > 1e-3 && (a / b - 1.0).abs() < 1e-6, "{a} {b}");
    }

    #[test]
    fn second_degenerate_triangle() {
        // z20 = z00 + sqrt(2)·Δz zeroes the first row of H
        let r = std::f64::consts::SQRT_2;
        let pts = [(0, 0, 0.0, 0.0), (1, 0, 0.1, 0.02), (0, 1, 0.01, 0.1), (2, 0, 0.1 * r, 0.02 * r), (1, 1, 0.12, 0.13), (0, 2, 0.03, 0.21)];
        let st = stencil_from(&pts, |x, t| x * x + t);
        assert!(first_derivs_2d(&st).is_ok());
        assert!(matches!(second_derivs_2d(&st), Err(Error::DegenerateStencil { .. })));
    }

    #[test]
    fn central_first_examples() {
        let h = 0.3f64;
        assert!((central_first([-h, 0.0, h], [-h, 0.0, h]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(central_first([-1.0, 0.0, 2.0], [1.0, 0.0, 4.0]).unwrap(), 1.0);
        let lu = |x: f64| -x * x / 4.0 + 0.5;
        assert_eq!(central_first([-0.15, 0.0, 0.15], [lu(-0.15), lu(0.0), lu(0.15)]).unwrap(), 0.0);
        assert!(central_first([1.0, 0.0, 1.0], [0.0; 3]).is_err());
    }

    #[test]
    fn central_second_examples() {
        let h = 0.25;
        assert_eq!(central_second([-h, 0.0, h], [h * h, 0.0, h * h]).unwrap(), 2.0);
        assert_eq!(central_second([0.0, 0.5, 1.5], [1.0, 2.0, 4.0]).unwrap(), 0.0);
        let v: f64 = central_second([0.0, 0.1, 0.3], [0.0, 0.01, 0.09]).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        assert!(central_second([0.0, 0.2, 0.1], [0.0; 3]).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let st = Stencil::<f32>::new()
            .with_point(0, 0, 0.0, 0.0, 1.0)
            .with_point(1, 0, 0.5, 0.0, 2.0)
            .with_point(0, 1, 0.0, 0.25, 1.5);
        let d = first_derivs_2d(&st).unwrap();
        assert_eq!((d.u_x, d.u_t), (2.0f32, 2.0f32));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn central_second_exact_on_quadratics(
                x0 in -5.0f64..5.0, h1 in 0.01f64..1.0, h2 in 0.01f64..1.0,
                a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0,
            ) {
                let f = |x: f64| a * x * x + b * x + c;
                let xs = [x0 - h1, x0, x0 + h2];
                let v = central_second(xs, xs.map(f)).unwrap();
                prop_assert!((v - 2.0 * a).abs() <= 1e-8 * (2.0 * a).abs().max(1.0) * (1.0 + x0.abs()).powi(2) / h1.min(h2));
            }

            #[test]
            fn first_2d_exact_on_affine(
                dx in 0.01f64..0.5, dt in -0.2f64..0.2, ex in -0.3f64..0.3, et in 0.01f64..0.5,
                gx in -5.0f64..5.0, gt in -5.0f64..5.0,
            ) {
                prop_assume!((dx * et - ex * dt).abs() > 1e-3);
                let u = |x: f64, t: f64| gx * x + gt * t + 1.0;
                let st = stencil_from(&[(0, 0, 0.0, 0.0), (1, 0, dx, dt), (0, 1, ex, et)], u);
                let d = first_derivs_2d(&st).unwrap();
                prop_assert!((d.u_x - gx).abs() <= 1e-10 * gx.abs().max(1.0) / (dx * et - ex * dt).abs());
                prop_assert!((d.u_t - gt).abs() <= 1e-10 * gt.abs().max(1.0) / (dx * et - ex * dt).abs());
            }
        }
    }
}
