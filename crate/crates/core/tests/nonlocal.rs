use num_complex::Complex64;
use proptest::prelude::*;

use peakon_core::nonlocal::{
    apply_q, hs_norm_squared, kernel_eval, q_kernel_matrix, verify_convolution_identities,
    KernelTag,
};
use peakon_core::quadrature::integrate;
use peakon_core::{peakon, Grid};

fn dphi(x: f64) -> f64 {
    -x.signum() * (-x.abs()).exp()
}

/// (∫ e^{-|ξ-η|} f, ∫ -sgn(ξ-η) e^{-|ξ-η|} f) by adaptive quadrature.
fn convs(f: &dyn Fn(f64) -> f64, xi: f64) -> (f64, f64) {
    let mut br = vec![-40.0, 0.0, xi, 40.0];
    br.sort_by(f64::total_cmp);
    let a = integrate(|e| (-(xi - e).abs()).exp() * f(e), &br, 1e-12, 0.0)
        .unwrap()
        .value;
    let b = integrate(|e| dphi(xi - e) * f(e), &br, 1e-12, 0.0)
        .unwrap()
        .value;
    (a, b)
}

/// Both identities evaluated entirely by quadrature at one point.
fn identity_residuals(v: &dyn Fn(f64) -> f64, dv: &dyn Fn(f64) -> f64, xi: f64) -> (f64, f64) {
    let v0 = v(0.0);
    let (l1, _) = convs(&|e| dphi(e).powi(2) * dv(e), xi);
    let (_, l2) = convs(&|e| peakon(e) * dphi(e) * dv(e), xi);
    let (_, c_p2v) = convs(&|e| peakon(e).powi(2) * v(e), xi);
    let (c_dp2v, _) = convs(&|e| 2.0 * peakon(e) * dphi(e) * v(e), xi);
    let r1 = l1 - (c_p2v - c_dp2v);
    let r2 = l2 - (0.5 * c_dp2v - 2.0 * c_p2v - 2.0 * dphi(xi) * (peakon(xi) * v(xi) - v0));
    (r1, r2)
}

#[test]
fn identities_hold_in_the_continuum() {
    for xi in [-2.3, -0.4, 0.15, 1.7] {
        let (a, b) = identity_residuals(&|x| peakon(x).powi(2), &|x| 2.0 * peakon(x) * dphi(x), xi);
        assert!(a.abs() < 1e-9 && b.abs() < 1e-9, "{xi}: {a} {b}");
        let (a, b) = identity_residuals(&|x| (-x * x).exp(), &|x| -2.0 * x * (-x * x).exp(), xi);
        assert!(a.abs() < 1e-9 && b.abs() < 1e-9, "{xi}: {a} {b}");
    }
}

#[test]
fn identities_hold_on_the_grid() {
    let g = Grid::default();
    let smooth = verify_convolution_identities(&g.sample_real(|x| (-x * x).exp()), 1e-3);
    assert!(smooth.pass, "{smooth:?}");
    // v = φ² has a kink, so the interpolated v(0) is only first-order accurate
    let kinked = verify_convolution_identities(&g.sample_real(|x| peakon(x).powi(2)), 5e-2);
    assert!(kinked.pass, "{kinked:?}");
    let r = verify_convolution_identities(&g.sample_real(|_| 0.0), 0.0);
    assert_eq!((r.first_residual, r.second_residual), (0.0, 0.0));
}

#[test]
fn grid_identity_residual_shrinks_with_h() {
    let res = |n| {
        let g = Grid::new(30.0, n).unwrap();
        let r = verify_convolution_identities(&g.sample_real(|x| (-x * x).exp()), 1.0);
        r.first_residual.max(r.second_residual)
    };
    assert!(res(4096) < 0.6 * res(1024));
}

#[test]
fn hilbert_schmidt_norms() {
    assert!((hs_norm_squared(KernelTag::K1, 1e-8).unwrap().value - 2.0).abs() < 1e-6);
    assert!((hs_norm_squared(KernelTag::K2, 1e-8).unwrap().value - 0.5).abs() < 1e-6);
    assert_eq!(
        hs_norm_squared(KernelTag::QKernel { b: 3.0 }, 1e-8)
            .unwrap()
            .value,
        0.0
    );
}

#[test]
fn q_on_peakon_and_derivative() {
    let g = Grid::default();
    for b in [0.0, 2.0, 5.0] {
        let qp = apply_q(&g.phi(), b);
        let want = g.sample_real(|x| (3.0 - b) * (1.0 - peakon(x).powi(2)) * dphi(x));
        assert!(qp.sub(&want).unwrap().sup_norm() < 5e-3);
        // the kernel gives (b-3)φ(1+φ²) for Q(φ')
        let qd = apply_q(&g.dphi(), b);
        let want = g.sample_real(|x| (b - 3.0) * peakon(x) * (1.0 + peakon(x).powi(2)));
        assert!(qd.sub(&want).unwrap().sup_norm() < 1e-2, "b={b}");
    }
}

#[test]
fn kernel_matrix_rows_match_pointwise_kernel() {
    let g = Grid::new(10.0, 64).unwrap();
    let q = q_kernel_matrix(&g, 1.0);
    let h = g.spacing();
    for (i, j) in [(3, 40), (60, 2), (31, 33)] {
        let k = kernel_eval(KernelTag::QKernel { b: 1.0 }, g.point(i), g.point(j)).unwrap();
        assert!((q[(i, j)] - h * k).abs() < 1e-15);
    }
}

proptest! {
    #[test]
    fn q_scales_with_b_minus_three(b in -2.0f64..9.0, s in -3.0f64..3.0) {
        let g = Grid::new(20.0, 512).unwrap();
        let v = g.sample(|x| Complex64::new((-(x - s).powi(2)).exp(), 0.3 * (-(x + s).powi(2)).exp()));
        let lhs = apply_q(&v, b);
        let rhs = apply_q(&v, 4.0).scaled((b - 3.0).into());
        prop_assert!(lhs.sub(&rhs).unwrap().sup_norm() <= 1e-12 * (1.0 + rhs.sup_norm()));
    }

    #[test]
    fn q_is_linear(a in -3.0f64..3.0, b in -2.0f64..9.0) {
        let g = Grid::new(20.0, 256).unwrap();
        let u = g.sample_real(|x| (-x * x).exp());
        let v = g.sample_real(|x| x * (-x * x).exp());
        let lhs = apply_q(&u.axpy(a.into(), &v).unwrap(), b);
        let rhs = apply_q(&u, b).axpy(a.into(), &apply_q(&v, b)).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().sup_norm() < 1e-12);
    }
}
