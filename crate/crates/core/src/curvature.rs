//! Curvature of a left-invariant metric that is diagonal in a given frame.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie_algebra::{StructureConstants, DIM};
use crate::linalg::{Mat4, Vec4};
use crate::scalar::Real;

/// Frame index pairs `(i, j)` with `i < j`, in the order used by every
/// six-entry table in the crate.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Index of `(i, j)` (either order) in [`PAIRS`].
pub fn pair_index(i: usize, j: usize) -> Option<usize> {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    PAIRS.iter().position(|&p| p == (a, b))
}

/// Metric coefficients `A, B, C, D` on the frame `Y_1..Y_4`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalMetric<T> {
    pub g: [T; DIM],
}

impl<T: Real> DiagonalMetric<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self> {
        Self::from_array([a, b, c, d])
    }

    pub fn from_array(g: [T; DIM]) -> Result<Self> {
        for (index, v) in g.iter().enumerate() {
            if !(v.is_finite() && *v > T::zero()) {
                return Err(Error::NonPositiveMetric {
                    index,
                    value: v.to_f64_lossy(),
                });
            }
        }
        Ok(DiagonalMetric { g })
    }

    pub fn unit() -> Self {
        DiagonalMetric { g: [T::one(); DIM] }
    }

    pub fn a(&self) -> T {
        self.g[0]
    }
    pub fn b(&self) -> T {
        self.g[1]
    }
    pub fn c(&self) -> T {
        self.g[2]
    }
    pub fn d(&self) -> T {
        self.g[3]
    }

    pub fn scaled(&self, s: T) -> Result<Self> {
        Self::from_array(self.g.map(|x| x * s))
    }

    pub fn volume_element(&self) -> T {
        self.g.iter().fold(T::one(), |p, x| p * *x)
    }

    pub fn inner(&self, x: &Vec4<T>, y: &Vec4<T>) -> T {
        (0..DIM).fold(T::zero(), |s, m| s + self.g[m] * x[m] * y[m])
    }

    pub fn norm_sq(&self, x: &Vec4<T>) -> T {
        self.inner(x, x)
    }
}

/// Ricci tensor (orthonormal and frame components), frame-plane sectional
/// curvatures and scalar curvature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport<T> {
    pub ric_onb: Mat4<T>,
    pub ric_frame: Mat4<T>,
    /// `K(Y_i, Y_j)` in [`PAIRS`] order.
    pub sectional: [T; 6],
    pub scalar: T,
}

impl<T: Real> CurvatureReport<T> {
    pub fn from_parts(ric_onb: Mat4<T>, sectional: [T; 6], g: &DiagonalMetric<T>) -> Self {
        let mut ric_frame = ric_onb;
        for i in 0..DIM {
            for j in 0..DIM {
                ric_frame[i][j] = ric_onb[i][j] * (g.g[i] * g.g[j]).sqrt();
            }
        }
        let scalar = (0..DIM).fold(T::zero(), |s, i| s + ric_onb[i][i]);
        CurvatureReport {
            ric_onb,
            ric_frame,
            sectional,
            scalar,
        }
    }

    /// `max_{i<j} |K(Y_i, Y_j)|`.
    pub fn curvature_norm(&self) -> T {
        self.sectional.iter().fold(T::zero(), |m, k| m.max(k.abs()))
    }

    /// The six `Ric(Ybar_i, Ybar_j)`, `i < j`.
    pub fn offdiag(&self) -> [T; 6] {
        PAIRS.map(|(i, j)| self.ric_onb[i][j])
    }

    pub fn max_offdiag(&self) -> T {
        self.offdiag().iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn diagonal(&self) -> Vec4<T> {
        [
            self.ric_onb[0][0],
            self.ric_onb[1][1],
            self.ric_onb[2][2],
            self.ric_onb[3][3],
        ]
    }
}

/// Anything that can report the curvature of a diagonal metric: a Lie group
/// through its structure constants, or a product of space forms.
pub trait CurvatureModel<T: Real> {
    fn curvature(&self, g: &DiagonalMetric<T>) -> Result<CurvatureReport<T>>;
}

impl<T: Real> CurvatureModel<T> for StructureConstants<T> {
    fn curvature(&self, g: &DiagonalMetric<T>) -> Result<CurvatureReport<T>> {
        ricci_tensor(self, g)
    }
}

fn check_unimodular<T: Real>(c: &StructureConstants<T>) -> Result<()> {
    let residual = c.unimodularity_residual();
    if residual > T::eps_times(256.0) * T::one().max(c.max_abs()) {
        return Err(Error::NotUnimodular {
            residual: residual.to_f64_lossy(),
        });
    }
    Ok(())
}

fn check_metric<T: Real>(g: &DiagonalMetric<T>) -> Result<()> {
    DiagonalMetric::from_array(g.g).map(|_| ())
}

/// Structure constants on the orthonormal frame `Ybar_i = Y_i / sqrt(g_i)`.
fn orthonormal_constants<T: Real>(
    c: &StructureConstants<T>,
    g: &DiagonalMetric<T>,
) -> [[[T; DIM]; DIM]; DIM] {
    let s = g.g.map(|x| x.sqrt());
    let mut d = [[[T::zero(); DIM]; DIM]; DIM];
    for k in 0..DIM {
        for i in 0..DIM {
            for j in 0..DIM {
                let v = c.get(k, i, j);
                if v != T::zero() {
                    d[k][i][j] = v * s[k] / (s[i] * s[j]);
                }
            }
        }
    }
    d
}

/// Ricci matrix on the orthonormal frame, read off as the coefficients of the
/// quadratic form `Ric(W, W)`:
/// `-1/2 sum_i |[W,e_i]|^2 - 1/2 sum_i <[W,[W,e_i]],e_i> + 1/2 sum_{i<j} <[e_i,e_j],W>^2`.
/// Off-diagonal entries are half the `w_a w_b` coefficient, so this is the
/// symmetric bilinear form polarizing the quadratic one.
pub fn ricci_onb<T: Real>(c: &StructureConstants<T>, g: &DiagonalMetric<T>) -> Result<Mat4<T>> {
    check_metric(g)?;
    check_unimodular(c)?;
    let d = orthonormal_constants(c, g);
    let half = T::lit(0.5);
    let mut r = [[T::zero(); DIM]; DIM];
    for a in 0..DIM {
        for b in a..DIM {
            let mut t1 = T::zero();
            let mut t2 = T::zero();
            for i in 0..DIM {
                for k in 0..DIM {
                    t1 = t1 + d[k][a][i] * d[k][b][i];
                    t2 = t2 + d[k][a][i] * d[i][b][k];
                }
            }
            let mut t3 = T::zero();
            for i in 0..DIM {
                for j in (i + 1)..DIM {
                    t3 = t3 + d[a][i][j] * d[b][i][j];
                }
            }
            let v = half * (t3 - t1 - t2);
            r[a][b] = v;
            r[b][a] = v;
        }
    }
    Ok(r)
}

/// `Ric(W, W)` for `W = sum_i w_i Ybar_i`, evaluated term by term.
pub fn ricci_form<T: Real>(
    c: &StructureConstants<T>,
    g: &DiagonalMetric<T>,
    w: &Vec4<T>,
) -> Result<T> {
    check_metric(g)?;
    check_unimodular(c)?;
    let d = orthonormal_constants(c, g);
    let bracket = |x: &Vec4<T>, y: &Vec4<T>| -> Vec4<T> {
        let mut out = [T::zero(); DIM];
        for (k, o) in out.iter_mut().enumerate() {
            for i in 0..DIM {
                for j in 0..DIM {
                    *o = *o + d[k][i][j] * x[i] * y[j];
                }
            }
        }
        out
    };
    let dot = |x: &Vec4<T>, y: &Vec4<T>| (0..DIM).fold(T::zero(), |s, m| s + x[m] * y[m]);
    let e = |i: usize| crate::linalg::basis::<T>(i);
    let half = T::lit(0.5);
    let mut q = T::zero();
    for i in 0..DIM {
        let wi = bracket(w, &e(i));
        q = q - half * dot(&wi, &wi);
        q = q - half * dot(&bracket(w, &wi), &e(i));
    }
    for i in 0..DIM {
        for j in (i + 1)..DIM {
            let p = dot(&bracket(&e(i), &e(j)), w);
            q = q + half * p * p;
        }
    }
    Ok(q)
}

/// Ricci tensor together with the sectional table and scalar curvature.
pub fn ricci_tensor<T: Real>(
    c: &StructureConstants<T>,
    g: &DiagonalMetric<T>,
) -> Result<CurvatureReport<T>> {
    let ric = ricci_onb(c, g)?;
    let sectional = sectional_table(c, g)?;
    Ok(CurvatureReport::from_parts(ric, sectional, g))
}

/// `U(x, y)` on the frame, from `2<U(x,y),Z> = <[Z,x],y> + <x,[Z,y]>`.
pub fn u_vec<T: Real>(
    c: &StructureConstants<T>,
    g: &DiagonalMetric<T>,
    x: &Vec4<T>,
    y: &Vec4<T>,
) -> Vec4<T> {
    let mut out = [T::zero(); DIM];
    for (m, o) in out.iter_mut().enumerate() {
        let z = crate::linalg::basis::<T>(m);
        let lhs = g.inner(&c.bracket(&z, x), y) + g.inner(x, &c.bracket(&z, y));
        *o = lhs / (T::lit(2.0) * g.g[m]);
    }
    out
}

/// Components of `U(Y_i, Y_j)` on the frame.
pub fn u_operator<T: Real>(
    c: &StructureConstants<T>,
    g: &DiagonalMetric<T>,
    i: usize,
    j: usize,
) -> Result<Vec4<T>> {
    check_metric(g)?;
    for idx in [i, j] {
        if idx >= DIM {
            return Err(Error::IndexOutOfRange(idx));
        }
    }
    Ok(u_vec(
        c,
        g,
        &crate::linalg::basis(i),
        &crate::linalg::basis(j),
    ))
}

/// `<R(x,y)x,y>` for arbitrary frame vectors.
pub fn curvature_numerator<T: Real>(
    c: &StructureConstants<T>,
    g: &DiagonalMetric<T>,
    x: &Vec4<T>,
    y: &Vec4<T>,
) -> T {
    let xy = c.bracket(x, y);
    let yx = c.bracket(y, x);
    let uxy = u_vec(c, g, x, y);
    let uxx = u_vec(c, g, x, x);
    let uyy = u_vec(c, g, y, y);
    let half = T::lit(0.5);
    -T::lit(0.75) * g.norm_sq(&xy)
        - half * g.inner(&c.bracket(x, &xy), y)
        - half * g.inner(&c.bracket(y, &yx), x)
        + g.norm_sq(&uxy)
        - g.inner(&uxx, &uyy)
}

/// Sectional curvature of the plane spanned by `Y_i, Y_j`.
pub fn sectional_curvature<T: Real>(
    c: &StructureConstants<T>,
    g: &DiagonalMetric<T>,
    i: usize,
    j: usize,
) -> Result<T> {
    check_metric(g)?;
    if i >= DIM || j >= DIM {
        return Err(Error::IndexOutOfRange(i.max(j)));
    }
    if i == j {
        return Err(Error::DegeneratePlane(i));
    }
    let x = crate::linalg::basis(i);
    let y = crate::linalg::basis(j);
    Ok(curvature_numerator(c, g, &x, &y) / (g.g[i] * g.g[j]))
}

pub fn sectional_table<T: Real>(
    c: &StructureConstants<T>,
    g: &DiagonalMetric<T>,
) -> Result<[T; 6]> {
    let mut out = [T::zero(); 6];
    for (slot, &(i, j)) in out.iter_mut().zip(PAIRS.iter()) {
        *slot = sectional_curvature(c, g, i, j)?;
    }
    Ok(out)
}

pub fn scalar_curvature<T: Real>(c: &StructureConstants<T>, g: &DiagonalMetric<T>) -> Result<T> {
    let r = ricci_onb(c, g)?;
    Ok((0..DIM).fold(T::zero(), |s, i| s + r[i][i]))
}

/// `max_{i<j} |K(Y_i, Y_j)|`, a proxy for the size of the curvature tensor.
pub fn curvature_norm<T: Real>(c: &StructureConstants<T>, g: &DiagonalMetric<T>) -> Result<T> {
    Ok(sectional_table(c, g)?
        .iter()
        .fold(T::zero(), |m, k| m.max(k.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_algebra::{build_structure_constants, GeometryClass::*, GeometrySpec};
    use approx::assert_abs_diff_eq;

    fn consts(spec: GeometrySpec<f64>) -> StructureConstants<f64> {
        build_structure_constants(&spec).unwrap()
    }

    #[test]
    fn a2_ricci_only_in_fourth_direction() {
        for k in [-0.5, 0.0, 1.0, 2.0] {
            let c = consts(GeometrySpec::new(A2).with_k(k));
            let g = DiagonalMetric::new(1.3, 0.7, 2.0, 1.0).unwrap();
            let r = ricci_tensor(&c, &g).unwrap();
            assert_abs_diff_eq!(r.ric_frame[3][3], -2.0 * (k * k + k + 1.0), epsilon = 1e-13);
            for i in 0..3 {
                assert_abs_diff_eq!(r.ric_onb[i][i], 0.0, epsilon = 1e-14);
            }
            assert_eq!(r.max_offdiag(), 0.0);
        }
    }

    #[test]
    fn a10_unit_metric() {
        let c = consts(GeometrySpec::new(A10));
        let r = ricci_tensor(&c, &DiagonalMetric::unit()).unwrap();
        for (i, want) in [0.5, 0.5, 0.5, 0.0].iter().enumerate() {
            assert_abs_diff_eq!(r.ric_onb[i][i], *want, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(r.scalar, 1.5, epsilon = 1e-15);
    }

    #[test]
    fn abelian_is_flat() {
        let c = consts(GeometrySpec::new(A1));
        let g = DiagonalMetric::new(2.0, 3.0, 5.0, 7.0).unwrap();
        let r = ricci_tensor(&c, &g).unwrap();
        assert_eq!(r.curvature_norm(), 0.0);
        assert_eq!(r.scalar, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(u_operator(&c, &g, i, j).unwrap(), [0.0; 4]);
            }
        }
    }

    #[test]
    fn a4_u_and_sectional() {
        let c = consts(GeometrySpec::new(A4));
        let (a, b, cc, d) = (1.5, 0.4, 2.2, 3.1);
        let g = DiagonalMetric::new(a, b, cc, d).unwrap();
        let u = u_operator(&c, &g, 0, 1).unwrap();
        assert_abs_diff_eq!(u[3], -b / (2.0 * d), epsilon = 1e-15);
        assert_abs_diff_eq!(u[0] + u[1] + u[2], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            sectional_curvature(&c, &g, 0, 3).unwrap(),
            -3.0 * b / (4.0 * a * d),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            curvature_norm(&c, &DiagonalMetric::unit()).unwrap(),
            0.75,
            epsilon = 1e-15
        );
    }

    #[test]
    fn a7_u23() {
        let c = consts(GeometrySpec::new(A7));
        let (a, b, cc, d) = (1.5, 0.4, 2.2, 3.1);
        let g = DiagonalMetric::new(a, b, cc, d).unwrap();
        let u = u_operator(&c, &g, 1, 2).unwrap();
        assert_abs_diff_eq!(u[0], -(b + cc) / (2.0 * a), epsilon = 1e-15);
        assert_eq!(&u[1..], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn errors() {
        let c = consts(GeometrySpec::new(A7));
        let g = DiagonalMetric::unit();
        assert!(matches!(
            sectional_curvature(&c, &g, 2, 2),
            Err(Error::DegeneratePlane(2))
        ));
        assert!(matches!(
            u_operator(&c, &g, 0, 4),
            Err(Error::IndexOutOfRange(4))
        ));
        assert!(DiagonalMetric::new(1.0, 0.0, 1.0, 1.0).is_err());
        let bad = DiagonalMetric {
            g: [1.0, -1.0, 1.0, 1.0],
        };
        assert!(matches!(
            ricci_tensor(&c, &bad),
            Err(Error::NonPositiveMetric { index: 1, .. })
        ));
        // [X1,X4] = X1 alone has tr ad_{X4} = -1
        let nonuni = StructureConstants::zero().with_bracket(0, 3, [1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            ricci_tensor(&nonuni, &g),
            Err(Error::NotUnimodular { .. })
        ));
    }

    #[test]
    fn u_defining_identity_on_frame() {
        let c = consts(GeometrySpec::new(A3).with_k(0.6));
        let g = DiagonalMetric::new(1.1, 0.3, 2.5, 0.9).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let u = u_operator(&c, &g, i, j).unwrap();
                let x = crate::linalg::basis(i);
                let y = crate::linalg::basis(j);
                for m in 0..4 {
                    let z = crate::linalg::basis(m);
                    let lhs = 2.0 * g.inner(&u, &z);
                    let rhs = g.inner(&c.bracket(&z, &x), &y) + g.inner(&x, &c.bracket(&z, &y));
                    assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-14);
                }
            }
        }
    }
}
