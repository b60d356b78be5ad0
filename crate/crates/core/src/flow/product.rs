//! Products of space forms (the B classes). Each factor is Einstein, so the
//! flow only rescales factors: a factor with Ricci `mu/s * g` evolves as
//! `s(t) = R^2 - 2 mu t`.

use serde::{Deserialize, Serialize};

use crate::curvature::{CurvatureModel, CurvatureReport, DiagonalMetric, PAIRS};
use crate::error::{Error, Result};
use crate::lie_algebra::{GeometryClass, GeometrySpec, DIM};
use crate::linalg;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorKind {
    /// Round sphere of the given dimension.
    Sphere(usize),
    /// Hyperbolic space of the given dimension.
    Hyperbolic(usize),
    /// Euclidean space of the given dimension.
    Flat(usize),
    /// Complex projective plane with the Fubini–Study metric.
    ComplexProjective,
    /// Complex hyperbolic plane.
    ComplexHyperbolic,
}

impl FactorKind {
    pub fn dim(self) -> usize {
        match self {
            FactorKind::Sphere(n) | FactorKind::Hyperbolic(n) | FactorKind::Flat(n) => n,
            FactorKind::ComplexProjective | FactorKind::ComplexHyperbolic => 4,
        }
    }

    /// Einstein constant at unit scale: `Ric = mu/s * g` for coefficient `s`.
    pub fn einstein(self) -> f64 {
        match self {
            FactorKind::Sphere(n) => (n - 1) as f64,
            FactorKind::Hyperbolic(n) => -((n - 1) as f64),
            FactorKind::Flat(_) => 0.0,
            FactorKind::ComplexProjective => 3.0,
            FactorKind::ComplexHyperbolic => -3.0,
        }
    }

    /// Sectional curvature at unit scale of the plane spanned by local slots `i < j`.
    fn plane(self, i: usize, j: usize) -> f64 {
        match self {
            FactorKind::Sphere(_) => 1.0,
            FactorKind::Hyperbolic(_) => -1.0,
            FactorKind::Flat(_) => 0.0,
            FactorKind::ComplexProjective | FactorKind::ComplexHyperbolic => {
                let sign = if self == FactorKind::ComplexProjective {
                    1.0
                } else {
                    -1.0
                };
                // J pairs slots (0,1) and (2,3): holomorphic planes carry 4x the
                // curvature of totally real ones
                if (i, j) == (0, 1) || (i, j) == (2, 3) {
                    2.0 * sign
                } else {
                    0.5 * sign
                }
            }
        }
    }

    pub fn has_radius(self) -> bool {
        !matches!(self, FactorKind::Flat(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub kind: FactorKind,
    /// First metric slot of the factor.
    pub offset: usize,
}

impl Factor {
    pub fn slots(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.kind.dim()
    }
}

/// Factor layout of a B class, in metric slot order.
pub fn factors(class: GeometryClass) -> Result<Vec<Factor>> {
    use FactorKind::*;
    use GeometryClass::*;
    let kinds: &[FactorKind] = match class {
        B1 => &[Hyperbolic(3), Flat(1)],
        B2 => &[Sphere(2), Flat(2)],
        B3 => &[Hyperbolic(2), Flat(2)],
        B4 => &[Sphere(2), Sphere(2)],
        B5 => &[Sphere(2), Hyperbolic(2)],
        B6 => &[Hyperbolic(2), Hyperbolic(2)],
        B7 => &[ComplexProjective],
        B8 => &[ComplexHyperbolic],
        B9 => &[Sphere(4)],
        B10 => &[Hyperbolic(4)],
        _ => return Err(Error::UnsupportedClass(class)),
    };
    let mut offset = 0;
    Ok(kinds
        .iter()
        .map(|&kind| {
            let f = Factor { kind, offset };
            offset += kind.dim();
            f
        })
        .collect())
}

/// A B-class geometry as a curvature model on its four metric slots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductGeometry {
    pub class: GeometryClass,
    pub factors: Vec<Factor>,
}

impl ProductGeometry {
    pub fn new(class: GeometryClass) -> Result<Self> {
        Ok(ProductGeometry {
            class,
            factors: factors(class)?,
        })
    }

    fn factor_of(&self, slot: usize) -> &Factor {
        self.factors
            .iter()
            .find(|f| f.slots().contains(&slot))
            .expect("slot inside the layout")
    }

    /// Slot-wise metric coefficients with every curved factor at its radius
    /// squared and flat factors at 1.
    pub fn initial_metric<T: Real>(&self, radii: &[T]) -> Result<DiagonalMetric<T>> {
        let mut g = [T::one(); DIM];
        let mut r = radii.iter();
        for f in &self.factors {
            if f.kind.has_radius() {
                let radius = *r.next().ok_or_else(|| {
                    Error::InvalidParameter(format!("{} needs more radii", self.class))
                })?;
                for s in f.slots() {
                    g[s] = radius * radius;
                }
            }
        }
        DiagonalMetric::from_array(g)
    }
}

impl<T: Real> CurvatureModel<T> for ProductGeometry {
    fn curvature(&self, g: &DiagonalMetric<T>) -> Result<CurvatureReport<T>> {
        DiagonalMetric::from_array(g.g)?;
        let mut sectional = [T::zero(); 6];
        for (p, &(i, j)) in PAIRS.iter().enumerate() {
            let fi = self.factor_of(i);
            if fi.slots().contains(&j) {
                let k = fi.kind.plane(i - fi.offset, j - fi.offset);
                sectional[p] = T::lit(k) / (g.g[i] * g.g[j]).sqrt();
            }
        }
        let mut ric = linalg::zeros::<T>();
        for (p, &(i, j)) in PAIRS.iter().enumerate() {
            ric[i][i] = ric[i][i] + sectional[p];
            ric[j][j] = ric[j][j] + sectional[p];
        }
        Ok(CurvatureReport::from_parts(ric, sectional, g))
    }
}

/// Interval of `t` on which every factor coefficient stays positive.
pub fn validity_interval<T: Real>(spec: &GeometrySpec<T>) -> Result<(T, T)> {
    spec.validate()?;
    let geom = ProductGeometry::new(spec.class)?;
    let (mut lo, mut hi) = (T::neg_infinity(), T::infinity());
    let mut r = spec.radii.iter();
    for f in &geom.factors {
        if !f.kind.has_radius() {
            continue;
        }
        let r2 = {
            let x = *r.next().expect("validated radius count");
            x * x
        };
        let mu = T::lit(f.kind.einstein());
        // R^2 - 2 mu t > 0
        let edge = r2 / (T::lit(2.0) * mu);
        if mu > T::zero() {
            hi = hi.min(edge);
        } else {
            lo = lo.max(edge);
        }
    }
    Ok((lo, hi))
}

/// Factor coefficients at time `t`, in factor order (flat factors stay 1).
pub fn product_flow<T: Real>(spec: &GeometrySpec<T>, t: T) -> Result<Vec<T>> {
    let (lo, hi) = validity_interval(spec)?;
    if !(t > lo && t < hi) {
        return Err(Error::OutsideValidity {
            t: t.to_f64_lossy(),
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
        });
    }
    let geom = ProductGeometry::new(spec.class)?;
    let mut r = spec.radii.iter();
    Ok(geom
        .factors
        .iter()
        .map(|f| {
            if f.kind.has_radius() {
                let x = *r.next().expect("validated radius count");
                x * x - T::lit(2.0 * f.kind.einstein()) * t
            } else {
                T::one()
            }
        })
        .collect())
}

/// [`product_flow`] spread over the four metric slots.
pub fn product_metric<T: Real>(spec: &GeometrySpec<T>, t: T) -> Result<DiagonalMetric<T>> {
    let coeffs = product_flow(spec, t)?;
    let geom = ProductGeometry::new(spec.class)?;
    let mut g = [T::one(); DIM];
    for (f, c) in geom.factors.iter().zip(coeffs) {
        for s in f.slots() {
            g[s] = c;
        }
    }
    DiagonalMetric::from_array(g)
}
