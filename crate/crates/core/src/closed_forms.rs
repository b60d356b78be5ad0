//! Exact, implicit and bounding solutions of the diagonal flows, used as
//! oracles for the numerical integration.

use serde::{Deserialize, Serialize};

use crate::curvature::DiagonalMetric;
use crate::diagonalization::{a10_pair, Branch, LAMBDA_REL_TOL};
use crate::error::{Error, Result};
use crate::flow::product::{product_metric, validity_interval};
use crate::flow::Family;
use crate::lie_algebra::{GeometryClass, GeometrySpec};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolutionKind {
    Exact,
    Implicit,
    Envelope,
    NumericOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionForm<T> {
    pub kind: SolutionKind,
    /// Open time interval on which the form holds.
    pub validity: (T, T),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ImplicitFamily {
    A7i,
    A8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnvelopeFamily {
    /// A3 with `lambda_1 != lambda_2`.
    A3Unequal,
    A5,
    A9ii,
}

fn rel_equal<T: Real>(x: T, y: T) -> bool {
    (x - y).abs() <= T::lit(LAMBDA_REL_TOL) * x.abs().max(y.abs())
}

/// Branch the closed forms should assume: the given family, or the class's
/// generic branch.
fn effective_branch<T: Real>(
    spec: &GeometrySpec<T>,
    family: Option<&Family<T>>,
    lambda: &DiagonalMetric<T>,
) -> Option<Branch> {
    use GeometryClass::*;
    if let Some(f) = family {
        return Some(f.branch);
    }
    let l = &lambda.g;
    match spec.class {
        A7 => Some(Branch::P6i),
        A8 => Some(Branch::P7),
        A9 => Some(if rel_equal(l[0], l[1]) {
            Branch::P8ii
        } else {
            Branch::P8i
        }),
        A10 => Some(if rel_equal(l[0], l[1]) && rel_equal(l[0], l[2]) {
            Branch::P9iii
        } else if a10_pair(lambda).is_some() {
            Branch::P9ii
        } else {
            Branch::P9i
        }),
        _ => None,
    }
}

/// Family-specific constants fixed by the initial data.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants<T> {
    /// A6.
    pub e0: Option<T>,
    pub f0: Option<T>,
    /// A5 upper bound of `A`: `k3 (k1 t + k2)^{1/k1}`.
    pub k1: Option<T>,
    pub k2: Option<T>,
    pub a5_k3: Option<T>,
    /// A7i: `4 k3^2 = lambda_1^2 (lambda_2 - lambda_3)^2 / (lambda_2 lambda_3)`.
    pub k3: Option<T>,
    /// A8: `k4^2 = (AD(B+C))^2 / (BCD^2)` at `t = 0`, and the constant of
    /// `(k4/2) atanh(2A/k4) - A = 4t + k5`.
    pub k4: Option<T>,
    pub k5: Option<T>,
    /// A7ii.
    pub alpha: Option<T>,
    /// A9ii.
    pub a3: Option<T>,
}

impl<T: Real> DerivedConstants<T> {
    pub fn compute(
        spec: &GeometrySpec<T>,
        family: Option<&Family<T>>,
        lambda: &DiagonalMetric<T>,
    ) -> Result<Self> {
        use GeometryClass::*;
        let [l1, l2, l3, l4] = lambda.g;
        let (one, two, three) = (T::one(), T::lit(2.0), T::lit(3.0));
        let mut d = DerivedConstants::default();
        match spec.class {
            A5 => {
                let k1 = three * (one + l1 / l2);
                let k2 = l1 * l4 / l2;
                d.k1 = Some(k1);
                d.k2 = Some(k2);
                d.a5_k3 = Some(l1 * k2.powf(-one / k1));
            }
            A6 => {
                d.e0 = Some(l2 / (l1 * l4));
                d.f0 = Some(l3 / (l2 * l4));
            }
            A7 => {
                if effective_branch(spec, family, lambda) == Some(Branch::P6ii) {
                    let alpha = family.and_then(|f| f.alpha()).unwrap_or(T::zero());
                    if !(alpha.abs() < one) {
                        return Err(Error::InvalidParameter(format!(
                            "A7ii needs |alpha| < 1, got {alpha}"
                        )));
                    }
                    d.alpha = Some(alpha);
                } else {
                    d.k3 = Some((l1 * (l2 - l3)).abs() / (two * (l2 * l3).sqrt()));
                }
            }
            A8 => {
                let k4 = l1 * l4 * (l2 + l3) / (l4 * (l2 * l3).sqrt());
                d.k4 = Some(k4);
                let x = two * l1 / k4;
                if x < one {
                    d.k5 = Some(k4 / two * x.atanh() - l1);
                }
            }
            A9 => {
                d.a3 = Some(
                    family
                        .and_then(|f| f.params.get(2).copied())
                        .unwrap_or(T::zero()),
                );
            }
            _ => {}
        }
        Ok(d)
    }
}

/// Which kind of closed form exists for the data, and where it holds.
pub fn solution_form<T: Real>(
    spec: &GeometrySpec<T>,
    family: Option<&Family<T>>,
    lambda: &DiagonalMetric<T>,
) -> Result<SolutionForm<T>> {
    use GeometryClass::*;
    spec.validate()?;
    let l = &lambda.g;
    let immortal = (T::zero(), T::infinity());
    let branch = effective_branch(spec, family, lambda);
    let (kind, validity) = match spec.class {
        A1 | A2 | A4 | A6 => (SolutionKind::Exact, immortal),
        A3 if rel_equal(l[0], l[1]) => (SolutionKind::Exact, immortal),
        A3 | A5 => (SolutionKind::Envelope, immortal),
        A7 if branch == Some(Branch::P6ii) => (SolutionKind::Exact, immortal),
        A7 | A8 => (SolutionKind::Implicit, immortal),
        A9 if branch == Some(Branch::P8ii) => (SolutionKind::Envelope, immortal),
        A10 if branch == Some(Branch::P9iii) => (SolutionKind::Exact, (T::zero(), l[0])),
        A9 | A10 => (SolutionKind::NumericOnly, immortal),
        _ => {
            let (lo, hi) = validity_interval(spec)?;
            (SolutionKind::Exact, (lo, hi))
        }
    };
    Ok(SolutionForm { kind, validity })
}

fn check_time<T: Real>(t: T, validity: (T, T)) -> Result<()> {
    let lo_ok = if validity.0 == T::zero() {
        t >= T::zero()
    } else {
        t > validity.0
    };
    if lo_ok && t < validity.1 {
        Ok(())
    } else {
        Err(Error::OutsideValidity {
            t: t.to_f64_lossy(),
            lo: validity.0.to_f64_lossy(),
            hi: validity.1.to_f64_lossy(),
        })
    }
}

/// The full metric at time `t` for families with an explicit solution.
pub fn exact_metric<T: Real>(
    spec: &GeometrySpec<T>,
    family: Option<&Family<T>>,
    lambda: &DiagonalMetric<T>,
    t: T,
) -> Result<DiagonalMetric<T>> {
    use GeometryClass::*;
    let form = solution_form(spec, family, lambda)?;
    if form.kind != SolutionKind::Exact {
        return Err(Error::NoClosedForm(format!(
            "{} ({:?} solution)",
            spec.class, form.kind
        )));
    }
    check_time(t, form.validity)?;
    let [l1, l2, l3, l4] = lambda.g;
    let (one, three, four) = (T::one(), T::lit(3.0), T::lit(4.0));
    let third = one / three;
    let g = match spec.class {
        A1 => lambda.g,
        A2 => {
            let k = spec.k()?.unwrap_or(T::zero());
            [l1, l2, l3, l4 + four * (k * k + k + one) * t]
        }
        A3 => {
            let k = spec.k()?.unwrap_or(T::zero());
            [l1, l2, l3, l4 + T::lit(12.0) * k * k * t]
        }
        A4 => {
            let a = (l1 * l1 * l1 + three * l1 * l1 * l2 * t / l4).cbrt();
            [a, l1 * l2 / a, l3, l4 * a / l1]
        }
        A6 => {
            let d = DerivedConstants::compute(spec, family, lambda)?;
            let (e0, f0) = (d.e0.unwrap(), d.f0.unwrap());
            let e = three * e0 * t + one;
            let f = three * f0 * t + one;
            [
                l1 * e.powf(third),
                l2 * e.powf(-third) * f.powf(third),
                l3 * f.powf(-third),
                l4 * (e * f).powf(third),
            ]
        }
        A7 => {
            let alpha = DerivedConstants::compute(spec, family, lambda)?
                .alpha
                .unwrap();
            let q = one - alpha * alpha;
            let b = (l2 * l2 * l2 + three * q * l2 * l4 * t).cbrt();
            [l1 + four * t, b, b / q, l2 * l4 / b]
        }
        A10 => {
            let a = l1 - t;
            [a, a, a, l4]
        }
        _ => return product_metric(spec, t),
    };
    DiagonalMetric::from_array(g)
}

/// A single component with an explicit formula, including the explicit `D`
/// of A7i, A8 and A9ii whose other components are implicit or only bounded.
pub fn exact_component<T: Real>(
    spec: &GeometrySpec<T>,
    family: Option<&Family<T>>,
    lambda: &DiagonalMetric<T>,
    t: T,
    index: usize,
) -> Result<T> {
    use GeometryClass::*;
    if index > 3 {
        return Err(Error::IndexOutOfRange(index + 1));
    }
    if let Ok(g) = exact_metric(spec, family, lambda, t) {
        return Ok(g.g[index]);
    }
    check_time(t, (T::zero(), T::infinity()))?;
    let [_, l2, l3, l4] = lambda.g;
    let branch = effective_branch(spec, family, lambda);
    match (spec.class, index) {
        (A7 | A8, 3) => Ok(a7_d(l2, l3, l4, t)),
        // on A = B the a3 rotation is an isometry of the (Y1, Y2) plane, so D is frozen
        (A9, 3) if branch == Some(Branch::P8ii) => Ok(l4),
        (A3 | A5, 2) => Ok(l3),
        _ => Err(Error::NoClosedForm(format!(
            "{} component {}",
            spec.class,
            index + 1
        ))),
    }
}

fn a7_d<T: Real>(l2: T, l3: T, l4: T, t: T) -> T {
    l4 * (T::one() + T::lit(3.0) * l4 * t / (l2 * l3)).powf(-T::one() / T::lit(3.0))
}

/// Residual target of the implicit solves, relative to the size of the
/// equation's right-hand side.
pub const IMPLICIT_TOL: f64 = 1e-13;

/// Safeguarded Newton iteration for an increasing function on `[lo, hi]`
/// with `f(lo) <= 0 <= f(hi)`.
fn solve_increasing<T: Real>(f: impl Fn(T) -> (T, T), mut lo: T, mut hi: T, tol: T) -> Result<T> {
    let mut x = (lo + hi) / T::lit(2.0);
    for _ in 0..300 {
        let (fx, dfx) = f(x);
        if fx.abs() <= tol {
            return Ok(x);
        }
        if fx < T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        x = if dfx > T::zero() && newton > lo && newton < hi {
            newton
        } else {
            (lo + hi) / T::lit(2.0)
        };
        if hi - lo <= T::eps_times(2.0) * x.abs().max(T::min_positive_value()) {
            let (fx, _) = f(x);
            if fx.abs() <= tol * T::lit(16.0) {
                return Ok(x);
            }
            return Err(Error::RootFinding(format!(
                "bracket collapsed with residual {fx}"
            )));
        }
    }
    Err(Error::RootFinding(
        "no convergence in 300 iterations".into(),
    ))
}

/// `A(t)` of the A7i and A8 families from their implicit relations.
pub fn implicit_a<T: Real>(
    family: ImplicitFamily,
    consts: &DerivedConstants<T>,
    lambda1: T,
    t: T,
) -> Result<T> {
    if t < T::zero() {
        return Err(Error::OutsideValidity {
            t: t.to_f64_lossy(),
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let four = T::lit(4.0);
    if t == T::zero() {
        return Ok(lambda1);
    }
    match family {
        ImplicitFamily::A7i => {
            let k3 = consts
                .k3
                .ok_or_else(|| Error::InvalidParameter("A7i needs k3".into()))?;
            if k3 == T::zero() {
                return Ok(lambda1 + four * t);
            }
            // A - k3 atan(A/k3) = 4t + lambda_1 - k3 atan(lambda_1/k3)
            let rhs = four * t + lambda1 - k3 * (lambda1 / k3).atan();
            let tol = T::lit(IMPLICIT_TOL) * rhs.abs().max(T::one());
            let hi = lambda1 + four * t + k3 * T::FRAC_PI_2();
            solve_increasing(
                |a| {
                    let r = a / k3;
                    (a - k3 * r.atan() - rhs, r * r / (T::one() + r * r))
                },
                lambda1,
                hi,
                tol,
            )
        }
        ImplicitFamily::A8 => {
            let k4 = consts
                .k4
                .ok_or_else(|| Error::InvalidParameter("A8 needs k4".into()))?;
            let Some(k5) = consts.k5 else {
                // lambda_2 = lambda_3: A sits at k4/2 and never moves
                return Ok(lambda1);
            };
            let two = T::lit(2.0);
            // with s = ln(1 - 2A/k4), atanh(x) - x = h(s) is decreasing in s
            let r = two * (four * t + k5) / k4;
            let h = |s: T| -> (T, T) {
                let e = s.exp();
                let val = (two - e).ln() / two - s / two - T::one() + e;
                let der = -(T::one() - e).powi(2) / (two - e);
                (val, der)
            };
            let s0 = (-two * lambda1 / k4).ln_1p();
            let lo = -two * r - two - T::one();
            let tol = T::lit(IMPLICIT_TOL) * r.abs().max(T::one());
            // solve in sigma = -s so the function increases
            let sigma = solve_increasing(
                |sigma| {
                    let (v, d) = h(-sigma);
                    (v - r, -d)
                },
                -s0,
                -lo,
                tol,
            )?;
            Ok(-(k4 / two) * (-sigma).exp_m1())
        }
    }
}

/// Relative residual of the implicit relation at `(A, t)`.
pub fn implicit_residual<T: Real>(
    family: ImplicitFamily,
    consts: &DerivedConstants<T>,
    lambda1: T,
    a: T,
    t: T,
) -> Result<T> {
    let four = T::lit(4.0);
    match family {
        ImplicitFamily::A7i => {
            let k3 = consts
                .k3
                .ok_or_else(|| Error::InvalidParameter("A7i needs k3".into()))?;
            let (lhs, rhs) = if k3 == T::zero() {
                (a, four * t + lambda1)
            } else {
                (
                    a - k3 * (a / k3).atan(),
                    four * t + lambda1 - k3 * (lambda1 / k3).atan(),
                )
            };
            Ok((lhs - rhs).abs() / rhs.abs().max(T::one()))
        }
        ImplicitFamily::A8 => {
            let k4 = consts
                .k4
                .ok_or_else(|| Error::InvalidParameter("A8 needs k4".into()))?;
            let Some(k5) = consts.k5 else {
                return Ok((a - lambda1).abs() / lambda1);
            };
            let two = T::lit(2.0);
            let lhs = k4 / two * (two * a / k4).atanh() - a;
            let rhs = four * t + k5;
            Ok((lhs - rhs).abs() / rhs.abs().max(T::one()))
        }
    }
}

/// The two components fixed by the conserved quantities once the driving
/// components are known.
///
/// A7i and A8 take `(A, D)` and return `(B, C)`; A7ii takes nothing beyond
/// `t` and returns `(B, C, D)` in the first three slots.
pub fn dependent_components<T: Real>(
    family: Branch,
    consts: &DerivedConstants<T>,
    lambda: &DiagonalMetric<T>,
    a: T,
    d: T,
    t: T,
) -> Result<[T; 3]> {
    let [l1, l2, l3, l4] = lambda.g;
    let (two, four) = (T::lit(2.0), T::lit(4.0));
    let p = l2 * l3 * l4 * l4 / (d * d);
    match family {
        Branch::P6i => {
            // B - C = q, BC = p
            let q = l1 * l4 * (l2 - l3) / (a * d);
            let disc = q * q + four * p;
            let root = disc.sqrt();
            let (b, c) = if q >= T::zero() {
                let b = (q + root) / two;
                (b, two * p / (q + root))
            } else {
                let c = (-q + root) / two;
                (two * p / (-q + root), c)
            };
            Ok([b, c, d])
        }
        Branch::P7 => {
            // B + C = s, BC = p
            let s = l1 * l4 * (l2 + l3) / (a * d);
            let mut disc = s * s - four * p;
            if disc < T::zero() {
                if disc > -T::eps_times(64.0) * s * s {
                    disc = T::zero();
                } else {
                    return Err(Error::NegativeDiscriminant(disc.to_f64_lossy()));
                }
            }
            let larger = (s + disc.sqrt()) / two;
            let smaller = p / larger;
            Ok(if l2 >= l3 {
                [larger, smaller, d]
            } else {
                [smaller, larger, d]
            })
        }
        Branch::P6ii => {
            let alpha = consts
                .alpha
                .ok_or_else(|| Error::InvalidParameter("A7ii needs alpha".into()))?;
            let q = T::one() - alpha * alpha;
            let b = (l2 * l2 * l2 + T::lit(3.0) * q * l2 * l4 * t).cbrt();
            Ok([b, b / q, l2 * l4 / b])
        }
        other => Err(Error::UnknownFamily(format!(
            "{other} has no reconstruction"
        ))),
    }
}

/// Full metric of the A7i or A8 family from the implicit `A`, the explicit
/// `D` and the conserved quantities.
pub fn implicit_metric<T: Real>(
    family: ImplicitFamily,
    spec: &GeometrySpec<T>,
    lambda: &DiagonalMetric<T>,
    t: T,
) -> Result<DiagonalMetric<T>> {
    let consts = DerivedConstants::compute(spec, None, lambda)?;
    let [l1, l2, l3, l4] = lambda.g;
    let a = implicit_a(family, &consts, l1, t)?;
    let d = a7_d(l2, l3, l4, t);
    let branch = match family {
        ImplicitFamily::A7i => Branch::P6i,
        ImplicitFamily::A8 => Branch::P7,
    };
    let [b, c, _] = dependent_components(branch, &consts, lambda, a, d, t)?;
    DiagonalMetric::new(a, b, c, d)
}

/// Lower and upper bounds per component (`None` where the family gives none).
pub type Envelope<T> = [Option<(T, T)>; 4];

pub fn envelope<T: Real>(
    family: EnvelopeFamily,
    lambda: &DiagonalMetric<T>,
    t: T,
    k: T,
) -> Result<Envelope<T>> {
    if t < T::zero() {
        return Err(Error::OutsideValidity {
            t: t.to_f64_lossy(),
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let [l1, l2, l3, l4] = lambda.g;
    let (one, two, three) = (T::one(), T::lit(2.0), T::lit(3.0));
    let out = match family {
        EnvelopeFamily::A3Unequal => {
            let r = l1.max(l2) / l1.min(l2);
            let base = T::lit(12.0) * k * k;
            [
                None,
                None,
                Some((l3, l3)),
                Some((l4 + base * t, l4 + (base + r) * t)),
            ]
        }
        EnvelopeFamily::A5 => {
            let k1 = three * (one + l1 / l2);
            let k2 = l1 * l4 / l2;
            let k3 = l1 * k2.powf(-one / k1);
            let s = three * l1 + l2;
            let a_lo = l1 * (two * l2 / s * (s * t / (l1 * l4)).ln_1p() + one).sqrt();
            let a_hi = k3 * (k1 * t + k2).powf(one / k1);
            let ab = l1 * l2;
            [
                Some((a_lo, a_hi)),
                Some((ab / a_hi, ab / a_lo)),
                Some((l3, l3)),
                Some((three * t + l4, (three + l2 / l1) * t + l4)),
            ]
        }
        EnvelopeFamily::A9ii => {
            let a_lo = two * t + l1;
            let a_hi = (two + l3 / l1) * t + l1;
            [
                Some((a_lo, a_hi)),
                Some((a_lo, a_hi)),
                Some((two * l1 * l3 / (two * l1 + l3), l3)),
                Some((l4, l4)),
            ]
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use GeometryClass::*;

    fn m(a: f64, b: f64, c: f64, d: f64) -> DiagonalMetric<f64> {
        DiagonalMetric::new(a, b, c, d).unwrap()
    }

    #[test]
    fn a6_unit() {
        let g = exact_metric(&GeometrySpec::new(A6), None, &m(1.0, 1.0, 1.0, 1.0), 1.0).unwrap();
        let c = 4f64.cbrt();
        let want = [c, 1.0, 1.0 / c, c * c];
        for i in 0..4 {
            assert!((g.g[i] - want[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn a7i_d_component() {
        let d = exact_component(
            &GeometrySpec::new(A7),
            None,
            &m(1.0, 1.0, 1.0, 1.0),
            7.0 / 3.0,
            3,
        )
        .unwrap();
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn a10iii_initial() {
        let g = exact_metric(&GeometrySpec::new(A10), None, &m(1.0, 1.0, 1.0, 1.0), 0.0).unwrap();
        assert_eq!(g.g, [1.0; 4]);
        assert!(exact_metric(&GeometrySpec::new(A10), None, &m(1.0, 1.0, 1.0, 1.0), 1.0).is_err());
    }

    #[test]
    fn a7i_degenerate_and_initial() {
        let spec = GeometrySpec::new(A7);
        let l = m(1.5, 2.0, 2.0, 1.0);
        let k = DerivedConstants::compute(&spec, None, &l).unwrap();
        assert_eq!(k.k3, Some(0.0));
        assert_eq!(implicit_a(ImplicitFamily::A7i, &k, 1.5, 2.0).unwrap(), 9.5);
        let l = m(1.0, 2.0, 3.0, 4.0);
        let k = DerivedConstants::compute(&spec, None, &l).unwrap();
        assert_eq!(implicit_a(ImplicitFamily::A7i, &k, 1.0, 0.0).unwrap(), 1.0);
        let g = implicit_metric(ImplicitFamily::A7i, &spec, &m(1.5, 2.0, 2.0, 1.0), 3.0).unwrap();
        assert!((g.b() - g.c()).abs() < 1e-15);
    }

    #[test]
    fn a7i_reconstruction_keeps_monitors() {
        let spec = GeometrySpec::new(A7);
        let l = m(1.0, 2.0, 3.0, 4.0);
        let g = implicit_metric(ImplicitFamily::A7i, &spec, &l, 10.0).unwrap();
        let [a, b, c, d] = g.g;
        assert!((b * c * d * d - 2.0 * 3.0 * 16.0).abs() < 1e-10 * 96.0);
        assert!((a * d * (b - c) + 4.0).abs() < 1e-10 * 4.0);
        let k = DerivedConstants::compute(&spec, None, &l).unwrap();
        assert!(implicit_residual(ImplicitFamily::A7i, &k, 1.0, a, 10.0).unwrap() < 1e-12);
    }

    #[test]
    fn a8_asymptote() {
        let spec = GeometrySpec::new(A8);
        let l = m(1.0, 2.0, 3.0, 4.0);
        let k = DerivedConstants::compute(&spec, None, &l).unwrap();
        let k4 = k.k4.unwrap();
        assert!((k4 * k4 - 400.0 / 96.0).abs() < 1e-12);
        let mut prev = 1.0;
        for t in [0.01, 0.1, 1.0, 10.0, 100.0, 1e4] {
            let a = implicit_a(ImplicitFamily::A8, &k, 1.0, t).unwrap();
            // saturates at k4/2 in floating point once the gap drops below round-off
            assert!(a >= prev && a <= k4 / 2.0);
            if t < 10.0 {
                assert!(a > prev);
                assert!(
                    implicit_residual(ImplicitFamily::A8, &k, 1.0, a, t).unwrap() < 1e-12,
                    "t={t}"
                );
            }
            prev = a;
        }
        assert!((prev - k4 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn a7ii_dependent() {
        let l = m(1.0, 1.0, 1.0, 1.0);
        let consts = DerivedConstants {
            alpha: Some(0.0),
            ..Default::default()
        };
        let [b, c, d] =
            dependent_components(Branch::P6ii, &consts, &l, 0.0, 0.0, 1.0 / 3.0).unwrap();
        let x = 2f64.cbrt();
        assert!((b - x).abs() < 1e-15 && (c - x).abs() < 1e-15 && (d - 1.0 / x).abs() < 1e-15);
    }

    #[test]
    fn envelopes() {
        let l = m(1.0, 1.0, 1.0, 1.0);
        let e = envelope(EnvelopeFamily::A5, &l, 1.0, 0.0).unwrap();
        assert_eq!(e[3], Some((4.0, 5.0)));
        let l = m(1.0, 1.0, 2.0, 1.0);
        let e0 = envelope(EnvelopeFamily::A9ii, &l, 0.0, 0.0).unwrap();
        assert_eq!(e0[0], Some((1.0, 1.0)));
        let e = envelope(EnvelopeFamily::A9ii, &l, 5.0, 0.0).unwrap();
        assert_eq!(e[2], Some((1.0, 2.0)));
        let a5 = envelope(EnvelopeFamily::A5, &m(1.0, 2.0, 3.0, 4.0), 0.0, 0.0).unwrap();
        let (lo, hi) = a5[0].unwrap();
        assert!((lo - 1.0).abs() < 1e-15 && (hi - 1.0).abs() < 1e-14);
    }

    #[test]
    fn a9ii_d_is_frozen() {
        let spec = GeometrySpec::new(A9);
        let fam = Family::new(Branch::P8ii, &[0.0, 0.0, 0.7]).unwrap();
        let l = m(2.0, 2.0, 3.0, 1.5);
        let p = crate::flow::FlowProblem::new(spec.clone(), l, 1.0)
            .unwrap()
            .with_family(fam.clone());
        let rate = crate::flow::rhs(&p.geometry().unwrap(), &l, false).unwrap();
        assert!(rate[3].abs() < 1e-15);
        assert!((rate[0] - (3.0 / 2.0 + 2.0)).abs() < 1e-14);
        assert_eq!(exact_component(&spec, Some(&fam), &l, 5.0, 3).unwrap(), 1.5);
    }

    #[test]
    fn products_are_exact() {
        let spec = GeometrySpec::new(B9).with_radii(&[1.0]);
        let form = solution_form(&spec, None, &m(1.0, 1.0, 1.0, 1.0)).unwrap();
        assert_eq!(form.kind, SolutionKind::Exact);
        assert_eq!(form.validity.1, 1.0 / 6.0);
        let g = exact_metric(&spec, None, &m(1.0, 1.0, 1.0, 1.0), 0.1).unwrap();
        assert!((g.a() - 0.4).abs() < 1e-15);
    }
}
