use proptest::prelude::*;

use ricci4::curvature::curvature_numerator;
use ricci4::linalg::{basis, Mat4};
use ricci4::{
    build_structure_constants, jacobi_residual, rhs, ricci_tensor, transform_basis, Constants,
    FrameTransform, Geometry, GeometryClass, Metric, Spec,
};

fn lie_spec() -> impl Strategy<Value = Spec> {
    (0usize..10, -0.5f64..3.0).prop_map(|(i, k)| {
        let class = GeometryClass::ALL[i];
        match class {
            GeometryClass::A2 | GeometryClass::A3 => Spec::new(class).with_k(k),
            _ => Spec::new(class),
        }
    })
}

fn metric() -> impl Strategy<Value = Metric> {
    prop::array::uniform4(0.1f64..10.0).prop_map(|g| Metric::from_array(g).unwrap())
}

/// Identity plus a perturbation small enough to stay well conditioned.
fn frame() -> impl Strategy<Value = FrameTransform<f64>> {
    prop::array::uniform4(prop::array::uniform4(-0.3f64..0.3)).prop_map(|p| {
        let mut m: Mat4<f64> = p;
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += 1.0;
        }
        FrameTransform::from_matrix(m)
    })
}

fn vec4() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-2.0f64..2.0)
}

fn consts(spec: &Spec) -> Constants {
    build_structure_constants(spec).unwrap()
}

fn scale(c: &Constants) -> f64 {
    c.max_abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn transform_round_trip(spec in lie_spec(), f in frame()) {
        let c = consts(&spec);
        let there = transform_basis(&c, &f).unwrap();
        let back = transform_basis(&there, &f.inverse().unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&c) < 1e-12 * scale(&c) * scale(&there));
    }

    #[test]
    fn jacobi_survives_change_of_frame(spec in lie_spec(), f in frame()) {
        let c = consts(&spec);
        prop_assert!(jacobi_residual(&c) < 1e-13 * scale(&c).powi(2));
        let t = transform_basis(&c, &f).unwrap();
        prop_assert!(jacobi_residual(&t) < 1e-11 * scale(&t).powi(2));
        prop_assert!(t.antisymmetry_residual() == 0.0);
        prop_assert!(t.unimodularity_residual() < 1e-12 * scale(&t));
    }

    /// `<R(x,y)x,y>` depends on the plane only through its area form.
    #[test]
    fn curvature_numerator_is_a_plane_invariant(
        spec in lie_spec(), g in metric(), x in vec4(), y in vec4(), s in -2.0f64..2.0, a in 0.2f64..3.0, b in 0.2f64..3.0,
    ) {
        let c = consts(&spec);
        let base = curvature_numerator(&c, &g, &x, &y);
        let shear: [f64; 4] = std::array::from_fn(|i| x[i] + s * y[i]);
        let tol = 1e-10 * (1.0 + base.abs()) * scale(&c).powi(2);
        prop_assert!((curvature_numerator(&c, &g, &shear, &y) - base).abs() < tol);
        let (ax, by): ([f64; 4], [f64; 4]) = (x.map(|v| a * v), y.map(|v| b * v));
        let scaled = curvature_numerator(&c, &g, &ax, &by);
        prop_assert!((scaled - a * a * b * b * base).abs() < tol * (a * b).powi(2));
        prop_assert!((curvature_numerator(&c, &g, &y, &x) - base).abs() < tol);
    }

    /// Ricci and scalar curvature as sums of sectional curvatures.
    #[test]
    fn ricci_is_a_sum_of_sectional_curvatures(spec in lie_spec(), g in metric()) {
        let c = consts(&spec);
        let r = ricci_tensor(&c, &g).unwrap();
        let k = |i: usize, j: usize| {
            let (x, y) = (basis::<f64>(i), basis::<f64>(j));
            curvature_numerator(&c, &g, &x, &y) / (g.g[i] * g.g[j])
        };
        let size = 1.0 + r.sectional.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..4 {
            let sum: f64 = (0..4).filter(|&j| j != i).map(|j| k(i, j)).sum();
            prop_assert!((r.ric_onb[i][i] - sum).abs() < 1e-10 * size, "i = {}", i);
            for j in 0..4 {
                prop_assert!((r.ric_onb[i][j] - r.ric_onb[j][i]).abs() < 1e-12 * size);
            }
        }
        let total: f64 = r.sectional.iter().sum();
        prop_assert!((r.scalar - 2.0 * total).abs() < 1e-10 * size);
    }

    /// Scaling the metric by `s` fixes the Ricci tensor and divides the
    /// curvature by `s`.
    #[test]
    fn ricci_is_scale_invariant(spec in lie_spec(), g in metric(), s in 0.05f64..20.0) {
        let c = consts(&spec);
        let r = ricci_tensor(&c, &g).unwrap();
        let rs = ricci_tensor(&c, &g.scaled(s).unwrap()).unwrap();
        let size = 1.0 + r.ric_frame.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..4 {
            for j in 0..4 {
                prop_assert!((rs.ric_frame[i][j] - r.ric_frame[i][j]).abs() < 1e-11 * size);
            }
        }
        for (a, b) in r.sectional.iter().zip(&rs.sectional) {
            prop_assert!((b * s - a).abs() < 1e-11 * size);
        }
        let geom = Geometry::Lie(c);
        let v = rhs::<f64, _>(&geom, &g, false).unwrap();
        let vs = rhs::<f64, _>(&geom, &g.scaled(s).unwrap(), false).unwrap();
        for i in 0..4 {
            prop_assert!((v[i] - vs[i]).abs() < 1e-11 * size);
        }
    }

    /// The generic core gives the same answer in `f32` up to single precision.
    #[test]
    fn f32_tracks_f64(spec in lie_spec(), g in metric()) {
        let c = consts(&spec);
        let r = ricci_tensor(&c, &g).unwrap();
        let c32 = c.cast::<f32>();
        let g32 = ricci4::DiagonalMetric::<f32>::from_array(g.g.map(|v| v as f32)).unwrap();
        let r32 = ricci_tensor(&c32, &g32).unwrap();
        let size = 1.0 + r.sectional.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..4 {
            prop_assert!((f64::from(r32.ric_onb[i][i]) - r.ric_onb[i][i]).abs() < 1e-4 * size * scale(&c).powi(2));
        }
    }
}
