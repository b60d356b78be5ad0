//! Structure constants of the four-dimensional unimodular Lie algebras and
//! their behaviour under a change of basis.
//!
//! Frame indices are zero based in code: `X_1` is index 0 and `X_4` is index 3.
//! The tensor is stored densely as `c[k][i][j]` with `[X_i, X_j] = c[k][i][j] X_k`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagonalization::Branch;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat4, Vec4};
use crate::scalar::Real;

pub const DIM: usize = 4;

/// The twenty compact four-dimensional homogeneous geometries. `A*` classes are
/// Lie groups acting simply transitively; `B*` classes have non-trivial isotropy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GeometryClass {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
    A10,
    B1,
    B2,
    B3,
    B4,
    B5,
    B6,
    B7,
    B8,
    B9,
    B10,
}

use GeometryClass::*;

/// Which class parameters a class takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    None,
    /// A2: either `k >= -1/2` or an admissible `(m, n)` pair.
    KOrMn,
    /// A3: real `k`.
    K,
    /// B classes: this many radii.
    Radii(usize),
}

impl GeometryClass {
    pub const ALL: [GeometryClass; 20] = [
        A1, A2, A3, A4, A5, A6, A7, A8, A9, A10, B1, B2, B3, B4, B5, B6, B7, B8, B9, B10,
    ];

    pub fn is_lie_group(self) -> bool {
        matches!(self, A1 | A2 | A3 | A4 | A5 | A6 | A7 | A8 | A9 | A10)
    }

    pub fn label(self) -> &'static str {
        match self {
            A1 => "A1",
            A2 => "A2",
            A3 => "A3",
            A4 => "A4",
            A5 => "A5",
            A6 => "A6",
            A7 => "A7",
            A8 => "A8",
            A9 => "A9",
            A10 => "A10",
            B1 => "B1",
            B2 => "B2",
            B3 => "B3",
            B4 => "B4",
            B5 => "B5",
            B6 => "B6",
            B7 => "B7",
            B8 => "B8",
            B9 => "B9",
            B10 => "B10",
        }
    }

    /// Name of the Lie algebra class (A) or a short description of the product (B).
    pub fn algebra(self) -> &'static str {
        match self {
            A1 => "U1[(1,1,1)]",
            A2 => "U1[1,1,1]",
            A3 => "U1[Z,Zbar,1]",
            A4 => "U1[2,1], mu=0",
            A5 => "U1[2,1], mu=1",
            A6 => "U1[3]",
            A7 => "U3I0",
            A8 => "U3I2",
            A9 => "U3S1",
            A10 => "U3S3",
            B1 => "H3 x R",
            B2 => "S2 x R2",
            B3 => "H2 x R2",
            B4 => "S2 x S2",
            B5 => "S2 x H2",
            B6 => "H2 x H2",
            B7 => "CP2",
            B8 => "CH2",
            B9 => "S4",
            B10 => "H4",
        }
    }

    /// `(manifold, group, isotropy)` of the model geometry. For A2 and A3 the
    /// geometry depends on the parameter; the generic description is returned.
    pub fn model(self) -> (&'static str, &'static str, &'static str) {
        match self {
            A1 => ("R4", "R4", "{0}"),
            A2 => ("Sol3 x R (k=0) / Sol0^4 (k=1) / Sol^4_{m,n}", "same", "{e}"),
            A3 => ("R4 (k=0)", "E(2) x R", "{e}"),
            A4 => ("Nil3 x R", "Nil3 x R", "{e}"),
            A5 => ("(no compact geometry)", "-", "{e}"),
            A6 => ("Nil4", "Nil4", "{e}"),
            A7 => ("Sol1^4", "Sol1^4", "{e}"),
            A8 => ("(no compact geometry)", "-", "{e}"),
            A9 => ("SL(2,R)~ x R", "SL(2,R)~ x R", "{e}"),
            A10 => ("S3 x R", "SU(2) x R", "{e}"),
            B1 => ("H3 x R", "H(3) x R", "SO(3)"),
            B2 => ("S2 x R2", "SO(3) x R2", "SO(2) x {0}"),
            B3 => ("H2 x R2", "H(2) x R2", "SO(2) x {0}"),
            B4 => ("S2 x S2", "SO(3) x SO(3)", "SO(2) x SO(2)"),
            B5 => ("S2 x H2", "SO(3) x H(2)", "SO(2) x SO(2)"),
            B6 => ("H2 x H2", "H(2) x H(2)", "SO(2) x SO(2)"),
            B7 => ("CP2", "SU(3)", "U(2)"),
            B8 => ("CH2", "SU(1,2)", "U(2)"),
            B9 => ("S4", "SO(5)", "SO(4)"),
            B10 => ("H4", "H(4)", "SO(4)"),
        }
    }

    pub fn params(self) -> ParamKind {
        match self {
            A2 => ParamKind::KOrMn,
            A3 => ParamKind::K,
            B1 | B2 | B3 | B7 | B8 | B9 | B10 => ParamKind::Radii(1),
            B4 | B5 | B6 => ParamKind::Radii(2),
            _ => ParamKind::None,
        }
    }

    /// Diagonalization branches available for the class.
    pub fn branches(self) -> &'static [Branch] {
        use Branch::*;
        match self {
            A2 => &[P1i, P1ii],
            A3 => &[P2],
            A4 => &[P3],
            A5 => &[P4],
            A6 => &[P5],
            A7 => &[P6i, P6ii],
            A8 => &[P7],
            A9 => &[P8i, P8ii],
            A10 => &[P9i, P9ii, P9iii],
            _ => &[],
        }
    }

    /// `delta` in `[X_1, X_2] = delta X_3` for the two `SU(2)`/`SL(2)` classes.
    pub fn delta(self) -> Option<i32> {
        match self {
            A9 => Some(-1),
            A10 => Some(1),
            _ => None,
        }
    }
}

impl fmt::Display for GeometryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for GeometryClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        GeometryClass::ALL
            .iter()
            .copied()
            .find(|c| c.label() == up)
            .ok_or_else(|| Error::Parse(format!("unknown geometry class '{s}'")))
    }
}

/// A geometry class together with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometrySpec<T> {
    pub class: GeometryClass,
    /// A2 / A3 parameter. For A2 given through `(m, n)` this stays `None`
    /// and [`GeometrySpec::k`] derives it.
    pub k: Option<T>,
    /// `(m, n)` of `Sol^4_{m,n}` (A2 only).
    pub mn: Option<(u32, u32)>,
    /// Radii of the factors (B classes only).
    pub radii: Vec<T>,
}

impl<T: Real> GeometrySpec<T> {
    pub fn new(class: GeometryClass) -> Self {
        GeometrySpec {
            class,
            k: None,
            mn: None,
            radii: Vec::new(),
        }
    }

    pub fn with_k(mut self, k: T) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_mn(mut self, m: u32, n: u32) -> Self {
        self.mn = Some((m, n));
        self
    }

    pub fn with_radii(mut self, radii: &[T]) -> Self {
        self.radii = radii.to_vec();
        self
    }

    /// Checks that exactly the parameters the class needs are present and valid.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let kind = self.class.params();
        if !matches!(kind, ParamKind::Radii(_)) && !self.radii.is_empty() {
            return bad(format!("{} takes no radii", self.class));
        }
        if kind != ParamKind::KOrMn && self.mn.is_some() {
            return bad(format!("{} takes no (m,n)", self.class));
        }
        if !matches!(kind, ParamKind::K | ParamKind::KOrMn) && self.k.is_some() {
            return bad(format!("{} takes no k", self.class));
        }
        match kind {
            ParamKind::None => Ok(()),
            ParamKind::K => match self.k {
                Some(k) if k.is_finite() => Ok(()),
                _ => bad(format!("{} requires a finite k", self.class)),
            },
            ParamKind::KOrMn => match (self.k, self.mn) {
                (Some(_), Some(_)) => bad("A2 takes either k or (m,n), not both".into()),
                (None, None) => bad("A2 requires k or (m,n)".into()),
                (Some(k), None) => {
                    if !k.is_finite() || k < T::lit(-0.5) {
                        bad(format!("A2 requires k >= -1/2, got {k}"))
                    } else {
                        Ok(())
                    }
                }
                (None, Some((m, n))) => solve_sol_mn::<T>(m, n).map(|_| ()),
            },
            ParamKind::Radii(count) => {
                if self.radii.len() != count {
                    return bad(format!(
                        "{} requires {count} radii, got {}",
                        self.class,
                        self.radii.len()
                    ));
                }
                if self
                    .radii
                    .iter()
                    .any(|r| !(r.is_finite() && *r > T::zero()))
                {
                    return bad("radii must be positive".into());
                }
                Ok(())
            }
        }
    }

    /// Effective `k` (derived from `(m, n)` for `Sol^4_{m,n}`).
    pub fn k(&self) -> Result<Option<T>> {
        match (self.k, self.mn) {
            (Some(k), _) => Ok(Some(k)),
            (None, Some((m, n))) => {
                let roots = solve_sol_mn::<T>(m, n)?;
                Ok(Some(roots.k()))
            }
            _ => Ok(None),
        }
    }

    pub fn delta(&self) -> Option<T> {
        self.class.delta().map(|d| T::lit(d as f64))
    }
}

/// `c[k][i][j]` with `[X_i, X_j] = c[k][i][j] X_k`. Antisymmetric in `(i, j)`
/// by construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureConstants<T> {
    c: [[[T; DIM]; DIM]; DIM],
}

impl<T: Real> Default for StructureConstants<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Real> StructureConstants<T> {
    pub fn zero() -> Self {
        StructureConstants {
            c: [[[T::zero(); DIM]; DIM]; DIM],
        }
    }

    /// Accepts a raw tensor, rejecting it unless it is antisymmetric to round-off.
    pub fn from_tensor(c: [[[T; DIM]; DIM]; DIM]) -> Result<Self> {
        let out = StructureConstants { c };
        let scale = T::one().max(out.max_abs());
        if out.antisymmetry_residual() > T::eps_times(64.0) * scale {
            return Err(Error::InvalidParameter(
                "structure constants are not antisymmetric".into(),
            ));
        }
        Ok(out)
    }

    /// Sets `[X_i, X_j] = v` (and `[X_j, X_i] = -v`).
    pub fn set_bracket(&mut self, i: usize, j: usize, v: Vec4<T>) {
        for (k, vk) in v.iter().enumerate() {
            self.c[k][i][j] = *vk;
            self.c[k][j][i] = -*vk;
        }
        if i == j {
            for k in 0..DIM {
                self.c[k][i][i] = T::zero();
            }
        }
    }

    pub fn with_bracket(mut self, i: usize, j: usize, v: Vec4<T>) -> Self {
        self.set_bracket(i, j, v);
        self
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> T {
        self.c[k][i][j]
    }

    pub fn tensor(&self) -> &[[[T; DIM]; DIM]; DIM] {
        &self.c
    }

    /// Components of `[X_i, X_j]`.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vec4<T> {
        [
            self.c[0][i][j],
            self.c[1][i][j],
            self.c[2][i][j],
            self.c[3][i][j],
        ]
    }

    /// `[x, y]` for vectors given by components on the frame.
    pub fn bracket(&self, x: &Vec4<T>, y: &Vec4<T>) -> Vec4<T> {
        let mut out = [T::zero(); DIM];
        for (k, o) in out.iter_mut().enumerate() {
            let mut s = T::zero();
            for i in 0..DIM {
                if x[i] == T::zero() {
                    continue;
                }
                for j in 0..DIM {
                    s = s + self.c[k][i][j] * x[i] * y[j];
                }
            }
            *o = s;
        }
        out
    }

    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for k in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    m = m.max(self.c[k][i][j].abs());
                }
            }
        }
        m
    }

    pub fn antisymmetry_residual(&self) -> T {
        let mut m = T::zero();
        for k in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    m = m.max((self.c[k][i][j] + self.c[k][j][i]).abs());
                }
            }
        }
        m
    }

    /// `max_i |tr ad_{X_i}| = max_i |sum_k c[k][i][k]|`.
    pub fn unimodularity_residual(&self) -> T {
        (0..DIM).fold(T::zero(), |m, i| {
            m.max((0..DIM).fold(T::zero(), |s, k| s + self.c[k][i][k]).abs())
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for k in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    m = m.max((self.c[k][i][j] - other.c[k][i][j]).abs());
                }
            }
        }
        m
    }

    pub fn cast<U: Real>(&self) -> StructureConstants<U> {
        let mut out = StructureConstants::<U>::zero();
        for k in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    out.c[k][i][j] = U::lit(self.c[k][i][j].to_f64_lossy());
                }
            }
        }
        out
    }
}

/// Change of frame `Y_i = sum_k matrix[i][k] X_k`: row `i` of the matrix holds
/// the components of `Y_i` on the canonical frame, which is how the per-class
/// templates are laid out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameTransform<T> {
    pub matrix: Mat4<T>,
    /// Free template parameters `a_1..a_6` (empty for a bare matrix).
    pub params: Vec<T>,
    pub class: Option<GeometryClass>,
}

impl<T: Real> FrameTransform<T> {
    pub fn identity() -> Self {
        FrameTransform {
            matrix: linalg::identity(),
            params: Vec::new(),
            class: None,
        }
    }

    pub fn from_matrix(matrix: Mat4<T>) -> Self {
        FrameTransform {
            matrix,
            params: Vec::new(),
            class: None,
        }
    }

    pub fn determinant(&self) -> T {
        linalg::inverse(&self.matrix).1
    }

    /// Transform whose frame is the canonical frame written on this one.
    pub fn inverse(&self) -> Result<Self> {
        let (inv, det) = linalg::inverse(&self.matrix);
        if det.abs() <= T::lit(1e-12) {
            return Err(Error::SingularTransform {
                det: det.to_f64_lossy(),
            });
        }
        Ok(FrameTransform {
            matrix: inv,
            params: Vec::new(),
            class: self.class,
        })
    }
}

/// Structure constants of `{Y_i}` given those of `{X_i}`:
/// `c~^n_ij = L^k_i L^l_j (L^-1)^n_m c^m_kl` with `L^k_i = matrix[i][k]`.
pub fn transform_basis<T: Real>(
    c: &StructureConstants<T>,
    frame: &FrameTransform<T>,
) -> Result<StructureConstants<T>> {
    let m = &frame.matrix;
    let (inv, det) = linalg::inverse(m);
    if !(det.abs() > T::lit(1e-12)) {
        return Err(Error::SingularTransform {
            det: det.to_f64_lossy(),
        });
    }
    let mut out = StructureConstants::zero();
    for i in 0..DIM {
        for j in (i + 1)..DIM {
            // [Y_i, Y_j] on the X frame
            let on_x = c.bracket(&m[i], &m[j]);
            // X_m = sum_n inv[m][n] Y_n
            let mut on_y = [T::zero(); DIM];
            for (n, slot) in on_y.iter_mut().enumerate() {
                *slot = (0..DIM).fold(T::zero(), |s, mm| s + on_x[mm] * inv[mm][n]);
            }
            out.set_bracket(i, j, on_y);
        }
    }
    Ok(out)
}

/// Max-norm residual of the Jacobi identity
/// `[[X_i,X_j],X_l] + [[X_j,X_l],X_i] + [[X_l,X_i],X_j]`.
pub fn jacobi_residual<T: Real>(c: &StructureConstants<T>) -> T {
    let mut worst = T::zero();
    for i in 0..DIM {
        for j in 0..DIM {
            for l in 0..DIM {
                for m in 0..DIM {
                    let mut s = T::zero();
                    for k in 0..DIM {
                        s = s
                            + c.c[k][i][j] * c.c[m][k][l]
                            + c.c[k][j][l] * c.c[m][k][i]
                            + c.c[k][l][i] * c.c[m][k][j];
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    worst
}

/// Canonical-basis structure constants of an A class.
pub fn build_structure_constants<T: Real>(spec: &GeometrySpec<T>) -> Result<StructureConstants<T>> {
    if !spec.class.is_lie_group() {
        return Err(Error::UnsupportedClass(spec.class));
    }
    spec.validate()?;
    let z = T::zero();
    let one = T::one();
    let half = T::lit(0.5);
    let c = StructureConstants::zero();
    let out = match spec.class {
        A1 => c,
        A2 => {
            let k = spec.k()?.expect("validated");
            c.with_bracket(0, 3, [one, z, z, z])
                .with_bracket(1, 3, [z, k, z, z])
                .with_bracket(2, 3, [z, z, -(k + one), z])
        }
        A3 => {
            let k = spec.k.expect("validated");
            c.with_bracket(0, 3, [k, one, z, z])
                .with_bracket(1, 3, [-one, k, z, z])
                .with_bracket(2, 3, [z, z, -(k + k), z])
        }
        A4 => c.with_bracket(0, 3, [z, one, z, z]),
        A5 => c
            .with_bracket(0, 3, [-half, one, z, z])
            .with_bracket(1, 3, [z, -half, z, z])
            .with_bracket(2, 3, [z, z, one, z]),
        A6 => c
            .with_bracket(0, 3, [z, one, z, z])
            .with_bracket(1, 3, [z, z, one, z]),
        A7 => c
            .with_bracket(1, 2, [z, z, z, one])
            .with_bracket(2, 0, [z, one, z, z])
            .with_bracket(0, 1, [z, z, -one, z]),
        A8 => c
            .with_bracket(1, 2, [z, z, z, -one])
            .with_bracket(2, 0, [z, one, z, z])
            .with_bracket(0, 1, [z, z, one, z]),
        A9 | A10 => {
            let delta = spec.delta().expect("A9/A10 carry delta");
            c.with_bracket(1, 2, [one, z, z, z])
                .with_bracket(2, 0, [z, one, z, z])
                .with_bracket(0, 1, [z, z, delta, z])
        }
        _ => unreachable!("B classes rejected above"),
    };
    Ok(out)
}

/// Logarithms of the three roots of `x^3 - m x^2 + n x - 1`, ordered so that
/// `alpha` is the largest and `beta = k alpha` with `k >= -1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicRoots<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
}

impl<T: Real> CubicRoots<T> {
    pub fn k(&self) -> T {
        self.beta / self.alpha
    }

    pub fn exp_roots(&self) -> [T; 3] {
        [self.alpha.exp(), self.beta.exp(), self.gamma.exp()]
    }
}

/// Discriminant of `x^3 - m x^2 + n x - 1`.
pub fn sol_mn_discriminant(m: u32, n: u32) -> f64 {
    let (m, n) = (m as f64, n as f64);
    18.0 * m * n - 4.0 * m.powi(3) + m * m * n * n - 4.0 * n.powi(3) - 27.0
}

/// Solves the `Sol^4_{m,n}` cubic. Admissible pairs have `m != n` and three
/// distinct positive roots; with `m, n >= 1` a positive discriminant suffices
/// (no sign change in `p(-x)`, and `p(0) = -1`).
pub fn solve_sol_mn<T: Real>(m: u32, n: u32) -> Result<CubicRoots<T>> {
    if m == n {
        return Err(Error::InvalidParameter(format!(
            "Sol^4_(m,n) requires m != n, got m = n = {m}"
        )));
    }
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter(
            "Sol^4_(m,n) requires positive m, n".into(),
        ));
    }
    let disc = sol_mn_discriminant(m, n);
    if disc <= 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "x^3 - {m}x^2 + {n}x - 1 has a repeated or complex root (discriminant {disc})"
        )));
    }
    let (mf, nf) = (m as f64, n as f64);
    // depressed cubic x = y + m/3: y^3 + p y + q
    let p = nf - mf * mf / 3.0;
    let q = -2.0 * mf.powi(3) / 27.0 + mf * nf / 3.0 - 1.0;
    let r = 2.0 * (-p / 3.0).sqrt();
    let phi = ((3.0 * q / (2.0 * p)) * (-3.0 / p).sqrt())
        .clamp(-1.0, 1.0)
        .acos()
        / 3.0;
    let poly = |x: f64| ((x - mf) * x + nf) * x - 1.0;
    let dpoly = |x: f64| (3.0 * x - 2.0 * mf) * x + nf;
    let mut roots: Vec<f64> = (0..3)
        .map(|j| {
            let mut x = r * (phi - 2.0 * std::f64::consts::PI * j as f64 / 3.0).cos() + mf / 3.0;
            for _ in 0..4 {
                let d = dpoly(x);
                if d != 0.0 {
                    x -= poly(x) / d;
                }
            }
            x
        })
        .collect();
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    if roots.iter().any(|&x| x <= 1e-10)
        || (roots[0] - roots[1]).abs() < 1e-10
        || (roots[1] - roots[2]).abs() < 1e-10
    {
        return Err(Error::InvalidParameter(format!(
            "cubic roots {roots:?} are not distinct and positive"
        )));
    }
    let (alpha, beta) = (roots[0].ln(), roots[1].ln());
    Ok(CubicRoots {
        alpha: T::lit(alpha),
        beta: T::lit(beta),
        gamma: T::lit(roots[2].ln()),
    })
}
