//! Printed formula fixtures.
//!
//! Each [`Fixture`] holds a transcription of one displayed family of formulas
//! (off-diagonal Ricci entries on a template frame, the diagonal `Ric(W, W)`
//! coefficients of a class, or a sectional curvature table) together with a
//! generator of random inputs. [`Fixture::check`] evaluates the transcription
//! against the structure-constant pipeline in [`crate::curvature`].
//!
//! A few printed entries are wrong. Those carry a `corrected` value next to the
//! printed one; the pipeline is compared against the correction and the size
//! of the printed discrepancy is reported, so every deviation stays visible.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::curvature::{ricci_tensor, DiagonalMetric, PAIRS};
use crate::diagonalization::frame_constants;
use crate::error::Result;
use crate::lie_algebra::{
    build_structure_constants, GeometryClass, GeometrySpec, StructureConstants,
};
use crate::rng::{metric_coeffs, uniform, SplitMix64};

/// Range of the log-uniform metric draws.
pub const METRIC_RANGE: (f64, f64) = (0.25, 4.0);
/// Range of the uniform frame-parameter draws.
pub const PARAM_RANGE: (f64, f64) = (-1.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    /// `Ric(e_i, e_j)` on the orthonormal frame (0-based).
    Ricci(usize, usize),
    /// Sectional curvature of the plane `(e_i, e_j)` (0-based).
    Sectional(usize, usize),
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Quantity::Ricci(i, j) => write!(f, "Ric({},{})", i + 1, j + 1),
            Quantity::Sectional(i, j) => write!(f, "K({},{})", i + 1, j + 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableKind {
    OffDiagonal,
    Diagonal,
    Sectional,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry {
    pub quantity: Quantity,
    pub printed: f64,
    pub corrected: Option<f64>,
}

impl Entry {
    fn new(quantity: Quantity, printed: f64) -> Self {
        Entry {
            quantity,
            printed,
            corrected: None,
        }
    }

    pub fn expected(&self) -> f64 {
        self.corrected.unwrap_or(self.printed)
    }
}

/// One random input of a fixture.
#[derive(Clone, Debug)]
pub struct Draw {
    pub spec: GeometrySpec<f64>,
    /// Template or bracket parameters, as the fixture interprets them.
    pub params: Vec<f64>,
    pub metric: [f64; 4],
    pub constants: StructureConstants<f64>,
}

impl Draw {
    fn k(&self) -> f64 {
        self.spec.k.unwrap_or(0.0)
    }

    fn delta(&self) -> f64 {
        self.spec.delta().unwrap_or(0.0)
    }

    fn p(&self, i: usize) -> f64 {
        self.params[i]
    }
}

pub struct Fixture {
    pub id: &'static str,
    pub class: GeometryClass,
    pub kind: TableKind,
    draw: fn(&mut SplitMix64) -> Result<Draw>,
    printed: fn(&Draw) -> Vec<Entry>,
}

/// Worst agreement of one fixture over a batch of draws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureReport {
    pub id: String,
    pub class: GeometryClass,
    pub kind: TableKind,
    pub draws: usize,
    pub entries: usize,
    /// Largest `|pipeline - expected|` over every entry and draw.
    pub max_error: f64,
    /// Entries whose printed form was replaced, with the largest printed
    /// discrepancy seen over the draws.
    pub corrections: Vec<(String, f64)>,
}

impl FixtureReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_error <= tol
    }
}

impl Fixture {
    pub fn sample(&self, rng: &mut SplitMix64) -> Result<Draw> {
        (self.draw)(rng)
    }

    pub fn printed(&self, draw: &Draw) -> Vec<Entry> {
        (self.printed)(draw)
    }

    /// Pipeline value of one quantity.
    pub fn pipeline(draw: &Draw, q: Quantity) -> Result<f64> {
        let g = DiagonalMetric::from_array(draw.metric)?;
        let report = ricci_tensor(&draw.constants, &g)?;
        Ok(match q {
            Quantity::Ricci(i, j) => report.ric_onb[i][j],
            Quantity::Sectional(i, j) => {
                let p = PAIRS
                    .iter()
                    .position(|&pr| pr == (i.min(j), i.max(j)))
                    .expect("distinct indices");
                report.sectional[p]
            }
        })
    }

    pub fn check(&self, rng: &mut SplitMix64, draws: usize) -> Result<FixtureReport> {
        let mut max_error = 0.0_f64;
        let mut entries = 0;
        let mut corrections: Vec<(String, f64)> = Vec::new();
        for _ in 0..draws {
            let d = self.sample(rng)?;
            let g = DiagonalMetric::from_array(d.metric)?;
            let report = ricci_tensor(&d.constants, &g)?;
            let printed = self.printed(&d);
            entries = printed.len();
            for e in printed {
                let value = match e.quantity {
                    Quantity::Ricci(i, j) => report.ric_onb[i][j],
                    Quantity::Sectional(i, j) => {
                        report.sectional[PAIRS
                            .iter()
                            .position(|&pr| pr == (i, j))
                            .expect("ordered pair")]
                    }
                };
                max_error = max_error.max((value - e.expected()).abs());
                if e.corrected.is_some() {
                    let miss = (value - e.printed).abs();
                    let name = e.quantity.to_string();
                    match corrections.iter_mut().find(|(n, _)| *n == name) {
                        Some(slot) => slot.1 = slot.1.max(miss),
                        None => corrections.push((name, miss)),
                    }
                }
            }
        }
        Ok(FixtureReport {
            id: self.id.to_string(),
            class: self.class,
            kind: self.kind,
            draws,
            entries,
            max_error,
            corrections,
        })
    }
}

/// A printed statement that disagrees with the computation, and its fix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Erratum {
    pub class: GeometryClass,
    pub location: &'static str,
    pub printed: &'static str,
    pub corrected: &'static str,
}

pub const ERRATA: &[Erratum] = &[
    Erratum {
        class: GeometryClass::A3,
        location: "sectional table, K(X2,X4)",
        printed: "(-3A/B + B/A + 2 - 4k^2) / D",
        corrected: "(-3A/B + B/A + 2 - 4k^2) / (4D)",
    },
    Erratum {
        class: GeometryClass::A4,
        location: "explicit solution",
        printed: "A = (l1 + 3 l1^2 l2 t / l3)^(1/3)",
        corrected: "A^3 = l1^3 + 3 l1^2 l2 t / l4, B = l1 l2 / A, C = l3, D = l4 A / l1",
    },
    Erratum {
        class: GeometryClass::A5,
        location: "template-frame brackets",
        printed: "[Y1,Y4] = -Y1/2 + Y2 + beta Y2",
        corrected: "[Y1,Y4] = -Y1/2 + Y2 + beta Y3",
    },
    Erratum {
        class: GeometryClass::A5,
        location: "bracket coefficient beta",
        printed: "beta = 3/2 (a3 - a1)",
        corrected: "beta = 3/2 a3 - a1",
    },
    Erratum {
        class: GeometryClass::A5,
        location: "upper bound constant k3",
        printed: "k3 = l3 k2^(-1/k1)",
        corrected: "k3 = l1 k2^(-1/k1)",
    },
    Erratum {
        class: GeometryClass::A5,
        location: "second form of dB/dt",
        printed: "dB/dt = -(AD/B) B",
        corrected: "dB/dt = -(B/(AD)) B",
    },
    Erratum {
        class: GeometryClass::A6,
        location: "template-frame brackets",
        printed: "[Y1,Y4] = Y2 + alpha Y2",
        corrected: "[Y1,Y4] = Y2 + alpha Y3",
    },
    Erratum {
        class: GeometryClass::A7,
        location: "family ii, w2 w3 coefficient of Ric(W,W)",
        printed: "alpha (-B + (1-alpha^2) C) / (A sqrt(BC))",
        corrected: "2 alpha (-B + (1-alpha^2) C) / (A sqrt(BC))",
    },
    Erratum {
        class: GeometryClass::A9,
        location: "Milnor-frame Ric(Y1,Y2), third numerator term",
        printed: "a2 (a2 - b2) l2 l3",
        corrected: "a2 (a1 - b2) l2 l3",
    },
    Erratum {
        class: GeometryClass::A9,
        location: "family ii, dD/dt and the solution for D",
        printed: "dD/dt = (A+B)^2 a3^2 / (AB), D = 4 a3^2 t + l4",
        corrected: "dD/dt = (A-B)^2 a3^2 / (AB), so D = l4 on A = B",
    },
    Erratum {
        class: GeometryClass::A10,
        location: "diagonality statement header",
        printed: "class U3S1",
        corrected: "class U3S3 (delta = +1)",
    },
];

fn metric(rng: &mut SplitMix64) -> [f64; 4] {
    metric_coeffs(rng, METRIC_RANGE.0, METRIC_RANGE.1)
}

fn params(rng: &mut SplitMix64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| uniform(rng, PARAM_RANGE.0, PARAM_RANGE.1))
        .collect()
}

fn spec_for(class: GeometryClass, rng: &mut SplitMix64) -> GeometrySpec<f64> {
    match class {
        GeometryClass::A2 => GeometrySpec::new(class).with_k(uniform(rng, -0.5, 3.0)),
        GeometryClass::A3 => GeometrySpec::new(class).with_k(uniform(rng, -2.0, 2.0)),
        _ => GeometrySpec::new(class),
    }
}

/// Template frame with random parameters and random `lambda`.
fn template_draw(class: GeometryClass, rng: &mut SplitMix64) -> Result<Draw> {
    let spec = spec_for(class, rng);
    let params = params(rng, crate::diagonalization::param_count(class));
    let constants = frame_constants(&spec, &params)?;
    Ok(Draw {
        spec,
        params,
        metric: metric(rng),
        constants,
    })
}

/// Canonical frame with a random diagonal metric `(A, B, C, D)`.
fn canonical_draw(class: GeometryClass, rng: &mut SplitMix64) -> Result<Draw> {
    let spec = spec_for(class, rng);
    let constants = build_structure_constants(&spec)?;
    Ok(Draw {
        spec,
        params: Vec::new(),
        metric: metric(rng),
        constants,
    })
}

fn ric(i: usize, j: usize, v: f64) -> Entry {
    Entry::new(Quantity::Ricci(i, j), v)
}

fn sec(i: usize, j: usize, v: f64) -> Entry {
    Entry::new(Quantity::Sectional(i, j), v)
}

fn diag(v: [f64; 4]) -> Vec<Entry> {
    (0..4).map(|i| ric(i, i, v[i])).collect()
}

fn offdiag(v: [f64; 6]) -> Vec<Entry> {
    PAIRS
        .iter()
        .zip(v)
        .map(|(&(i, j), x)| ric(i, j, x))
        .collect()
}

fn sectional(v: [f64; 6]) -> Vec<Entry> {
    PAIRS
        .iter()
        .zip(v)
        .map(|(&(i, j), x)| sec(i, j, x))
        .collect()
}

// Off-diagonal Ricci on the template frames.

fn p1_offdiag(d: &Draw) -> Vec<Entry> {
    let k = d.k();
    let [l1, l2, l3, l4] = d.metric;
    let (a1, a2, a3) = (d.p(0), d.p(1), d.p(2));
    let al = (1.0 - k) * a1;
    let be = (1.0 + 2.0 * k) * a3;
    let ga = (k + 2.0) * a2 - (1.0 + 2.0 * k) * a1 * a3;
    offdiag([
        (be * ga * l2 + (k - 1.0) * al * l3) * l1.sqrt() / (2.0 * l2.sqrt() * l3 * l4),
        -(2.0 + k) * ga * l1.sqrt() / (2.0 * l3.sqrt() * l4),
        0.0,
        -(al * ga * l1 + (1.0 + 2.0 * k) * be * l2) / (2.0 * l2.sqrt() * l3.sqrt() * l4),
        0.0,
        0.0,
    ])
}

fn p2_offdiag(d: &Draw) -> Vec<Entry> {
    let k = d.k();
    let [l1, l2, l3, l4] = d.metric;
    let (a1, a2, a3) = (d.p(0), d.p(1), d.p(2));
    let al = a2;
    let be = a2 * a3 - a1 * a2 * a2 - a1 - 3.0 * k * a3;
    let ga = a3 - 3.0 * k * a1 - a1 * a2;
    offdiag([
        -(2.0 * al * l1 + 2.0 * al * (1.0 + al * al) * l2 + be * ga * l3)
            / (2.0 * (l1 * l2).sqrt() * l4),
        -(ga * l1 + (al - 3.0 * k) * be * l2) * l3.sqrt() / (2.0 * l1.sqrt() * l2 * l4),
        0.0,
        ((al + 3.0 * k) * ga * l1 + (1.0 + al * al) * be * l2) * l3.sqrt()
            / (2.0 * l1 * l2.sqrt() * l4),
        0.0,
        0.0,
    ])
}

fn p3_offdiag(_: &Draw) -> Vec<Entry> {
    offdiag([0.0; 6])
}

fn p4_offdiag(d: &Draw) -> Vec<Entry> {
    let [l1, l2, l3, l4] = d.metric;
    let (a1, a3) = (d.p(0), d.p(2));
    let al = 1.5 * a1;
    let formulas = |be: f64| {
        [
            -al * be * l3 / (2.0 * (l1 * l2).sqrt() * l4),
            -3.0 * be * l3.sqrt() / (4.0 * l1.sqrt() * l4),
            0.0,
            (-3.0 * al * l1 + 2.0 * be * l2) * l3.sqrt() / (4.0 * l1 * l2.sqrt() * l4),
            0.0,
            0.0,
        ]
    };
    let printed = formulas(1.5 * (a3 - a1));
    let corrected = formulas(1.5 * a3 - a1);
    PAIRS
        .iter()
        .enumerate()
        .map(|(n, &(i, j))| Entry {
            quantity: Quantity::Ricci(i, j),
            printed: printed[n],
            corrected: matches!(n, 0 | 1 | 3).then_some(corrected[n]),
        })
        .collect()
}

fn p5_offdiag(d: &Draw) -> Vec<Entry> {
    let [l1, l2, l3, l4] = d.metric;
    let al = d.p(1) - d.p(0);
    offdiag([
        -al * l3 / (2.0 * (l1 * l2).sqrt() * l4),
        0.0,
        0.0,
        al * (l2 * l3).sqrt() / (2.0 * l1 * l4),
        0.0,
        0.0,
    ])
}

fn p6_offdiag(d: &Draw) -> Vec<Entry> {
    let [l1, l2, l3, l4] = d.metric;
    let (a1, a2, a3, a4, a5) = (d.p(0), d.p(1), d.p(2), d.p(3), d.p(4));
    let al = a2;
    let be = a1 * a2 - a3 - a4;
    let ga = a1 - a1 * a2 * a2 + a2 * a3 + a2 * a4 - a5;
    offdiag([
        be * l4 / (2.0 * (l1 * l2).sqrt() * l3),
        ga * l4 / (2.0 * (l1 * l3).sqrt() * l2),
        0.0,
        (-2.0 * al * l2 + 2.0 * al * (1.0 - al * al) * l3 + be * ga * l4)
            / (2.0 * l1 * (l2 * l3).sqrt()),
        (be * l2 - al * ga * l3) * l4.sqrt() / (2.0 * l1 * l2.sqrt() * l3),
        (-al * be * l2 + (al * al - 1.0) * ga * l3) * l4.sqrt() / (2.0 * l1 * l2 * l3.sqrt()),
    ])
}

fn p7_offdiag(d: &Draw) -> Vec<Entry> {
    let [l1, l2, l3, l4] = d.metric;
    let (a1, a2, a3, a4, a5) = (d.p(0), d.p(1), d.p(2), d.p(3), d.p(4));
    let al = -a2;
    let be = a1 * a2 - a3 + a4;
    let ga = -a1 - a1 * a2 * a2 + a2 * a3 - a2 * a4 + a5;
    offdiag([
        -be * l4 / (2.0 * (l1 * l2).sqrt() * l3),
        -ga * l4 / (2.0 * (l1 * l3).sqrt() * l2),
        0.0,
        (2.0 * al * l2 + 2.0 * al * (1.0 + al * al) * l3 + be * ga * l4)
            / (2.0 * l1 * (l2 * l3).sqrt()),
        (be * l2 + al * ga * l3) * l4.sqrt() / (2.0 * l1 * l2.sqrt() * l3),
        (al * be * l2 + (1.0 + al * al) * ga * l3) * l4.sqrt() / (2.0 * l1 * l2 * l3.sqrt()),
    ])
}

/// Shared by A9 (`delta = -1`) and A10 (`delta = +1`).
fn p89_offdiag(d: &Draw) -> Vec<Entry> {
    let [l1, l2, l3, l4] = d.metric;
    let (a1, a2, a3) = (d.p(0), d.p(1), d.p(2));
    let de = d.delta();
    offdiag([
        (l3 * l3 - l1 * l2) * a1 * a2 / (2.0 * l3 * l4 * (l1 * l2).sqrt()),
        (l2 * l2 - de * l1 * l3) * a1 * a3 / (2.0 * l2 * l4 * (l1 * l3).sqrt()),
        -(l2 - de * l3).powi(2) * a1 / (2.0 * l2 * l3 * (l1 * l4).sqrt()),
        (l1 * l1 - de * l2 * l3) * a2 * a3 / (2.0 * l1 * l4 * (l2 * l3).sqrt()),
        -(l1 - de * l3).powi(2) * a2 / (2.0 * l1 * l3 * (l2 * l4).sqrt()),
        -(l1 - l2).powi(2) * a3 / (2.0 * l1 * l2 * (l3 * l4).sqrt()),
    ])
}

/// Diagonal entries on the A9/A10 template frame.
fn p89_diagonal(d: &Draw) -> Vec<Entry> {
    let [l1, l2, l3, l4] = d.metric;
    let (a1, a2, a3) = (d.p(0), d.p(1), d.p(2));
    let de = d.delta();
    let den = 2.0 * l1 * l2 * l3 * l4;
    diag([
        ((l1 * l1 - l3 * l3) * l2 * a2 * a2
            + (l1 * l1 - l2 * l2) * l3 * a3 * a3
            + (l1 * l1 - (l2 - de * l3).powi(2)) * l4)
            / den,
        ((l2 * l2 - l3 * l3) * l1 * a1 * a1
            + (l2 * l2 - l1 * l1) * l3 * a3 * a3
            + (l2 * l2 - (l1 - de * l3).powi(2)) * l4)
            / den,
        ((l3 * l3 - l2 * l2) * l1 * a1 * a1
            + (l3 * l3 - l1 * l1) * l2 * a2 * a2
            + (l3 * l3 - (l1 - l2).powi(2)) * l4)
            / den,
        -((l2 - de * l3).powi(2) * l1 * a1 * a1
            + (l1 - de * l3).powi(2) * l2 * a2 * a2
            + (l1 - l2).powi(2) * l3 * a3 * a3)
            / den,
    ])
}

/// Milnor-frame form of A9/A10 with a general derivation: `params` holds
/// `(a1, a2, a3, b1, b2, b3, c1, c2, c3)` with `a1 + b2 + c3 = 0`.
fn milnor_draw(class: GeometryClass, rng: &mut SplitMix64) -> Result<Draw> {
    let spec = GeometrySpec::new(class);
    let mut p = params(rng, 9);
    p[8] = -(p[0] + p[4]);
    let delta = spec.delta().expect("A9/A10");
    let constants = StructureConstants::zero()
        .with_bracket(0, 3, [p[0], p[1], p[2], 0.0])
        .with_bracket(1, 3, [p[3], p[4], p[5], 0.0])
        .with_bracket(2, 3, [p[6], p[7], p[8], 0.0])
        .with_bracket(1, 2, [1.0, 0.0, 0.0, 0.0])
        .with_bracket(2, 0, [0.0, 1.0, 0.0, 0.0])
        .with_bracket(0, 1, [0.0, 0.0, delta, 0.0]);
    Ok(Draw {
        spec,
        params: p,
        metric: metric(rng),
        constants,
    })
}

fn milnor_offdiag(d: &Draw) -> Vec<Entry> {
    let [l1, l2, l3, l4] = d.metric;
    let [a1, a2, a3, b1, b2, b3, c1, c2, _c3]: [f64; 9] =
        d.params[..].try_into().expect("nine parameters");
    let de = d.delta();
    let r12 = |third: f64| {
        (c1 * c2 * l1 * l2 + b1 * (b2 - a1) * l1 * l3 + third * l2 * l3 - a3 * b3 * l3 * l3)
            / (2.0 * l1.sqrt() * l2.sqrt() * l3 * l4)
    };
    let mut out = offdiag([
        0.0,
        (-c1 * (2.0 * a1 + b2) * l1 * l2 + b1 * b3 * l1 * l3 - a2 * c2 * l2 * l2
            + a3 * (2.0 * a1 + b2) * l2 * l3)
            / (2.0 * l1.sqrt() * l2 * l3.sqrt() * l4),
        -(l2 - de * l3) * (c2 * l2 + b3 * l3) / (2.0 * l1.sqrt() * l2 * l3 * l4.sqrt()),
        (-b1 * c1 * l1 * l1 - c2 * (a1 + 2.0 * b2) * l1 * l2
            + b3 * (a1 + 2.0 * b2) * l1 * l3
            + a2 * a3 * l2 * l3)
            / (2.0 * l1 * l2.sqrt() * l3.sqrt() * l4),
        (l1 - de * l3) * (c1 * l1 + a3 * l3) / (2.0 * l1 * l2.sqrt() * l3 * l4.sqrt()),
        -(l1 - l2) * (b1 * l1 + a2 * l2) / (2.0 * l1 * l2 * l3.sqrt() * l4.sqrt()),
    ]);
    out[0] = Entry {
        quantity: Quantity::Ricci(0, 1),
        printed: r12(a2 * (a2 - b2)),
        corrected: Some(r12(a2 * (a1 - b2))),
    };
    out
}

// Diagonal Ricci in the canonical frame, metric (A, B, C, D).

fn a2_diagonal(d: &Draw) -> Vec<Entry> {
    let k = d.k();
    let dd = d.metric[3];
    diag([0.0, 0.0, 0.0, -2.0 * (k * k + k + 1.0) / dd])
}

fn a3_diagonal(d: &Draw) -> Vec<Entry> {
    let k = d.k();
    let [a, b, _, dd] = d.metric;
    let den = 2.0 * a * b * dd;
    diag([
        (a * a - b * b) / den,
        -(a * a - b * b) / den,
        0.0,
        -((a - b).powi(2) + 12.0 * k * k * a * b) / den,
    ])
}

fn a4_diagonal(d: &Draw) -> Vec<Entry> {
    let [a, b, _, dd] = d.metric;
    let x = b / (2.0 * a * dd);
    diag([-x, x, 0.0, -x])
}

fn a5_diagonal(d: &Draw) -> Vec<Entry> {
    let [a, b, _, dd] = d.metric;
    let x = b / (2.0 * a * dd);
    diag([-x, x, 0.0, -0.5 * (3.0 / dd + b / (a * dd))])
}

fn a6_diagonal(d: &Draw) -> Vec<Entry> {
    let [a, b, c, dd] = d.metric;
    let e = b / (a * dd);
    let f = c / (b * dd);
    diag([-0.5 * e, 0.5 * (e - f), 0.5 * f, -0.5 * (e + f)])
}

fn a7i_diagonal(d: &Draw) -> Vec<Entry> {
    let [a, b, c, dd] = d.metric;
    let (p, q, r) = (b / (a * c), c / (a * b), dd / (b * c));
    diag([
        -0.5 * (p + q + 2.0 / a),
        -0.5 * (q + r - p),
        -0.5 * (p + r - q),
        0.5 * r,
    ])
}

fn a8_diagonal(d: &Draw) -> Vec<Entry> {
    let [a, b, c, dd] = d.metric;
    let (p, q, r) = (b / (a * c), c / (a * b), dd / (b * c));
    diag([
        0.5 * (2.0 / a - q - p),
        0.5 * (p - q - r),
        0.5 * (q - p - r),
        0.5 * r,
    ])
}

/// A7 family ii: template frame with `a = (0, alpha, 0, 0, 0, 0)` so that
/// `beta = gamma = 0`, and an arbitrary diagonal metric.
fn a7ii_draw(rng: &mut SplitMix64) -> Result<Draw> {
    let spec = GeometrySpec::new(GeometryClass::A7);
    let alpha = uniform(rng, -0.95, 0.95);
    let params = vec![0.0, alpha, 0.0, 0.0, 0.0, 0.0];
    let constants = frame_constants(&spec, &params)?;
    Ok(Draw {
        spec,
        params,
        metric: metric(rng),
        constants,
    })
}

/// As [`a7ii_draw`] with the metric on the preserved slice `B = (1 - alpha^2) C`.
fn a7ii_slice_draw(rng: &mut SplitMix64) -> Result<Draw> {
    let mut d = a7ii_draw(rng)?;
    let alpha = d.params[1];
    d.metric[1] = (1.0 - alpha * alpha) * d.metric[2];
    Ok(d)
}

fn a7ii_ricci(d: &Draw) -> Vec<Entry> {
    let [a, b, c, dd] = d.metric;
    let al = d.params[1];
    let q = 1.0 - al * al;
    let den = 2.0 * a * b * c;
    let mut out = diag([
        -(b * b + 2.0 * (1.0 + al * al) * b * c + q * q * c * c) / den,
        (-a * dd + b * b - q * q * c * c) / den,
        (-a * dd - b * b + q * q * c * c) / den,
        dd / (2.0 * b * c),
    ]);
    // Ric(W,W) carries 2 Ric(e2,e3) w2 w3.
    let cross = al * (-b + q * c) / (a * (b * c).sqrt());
    out.push(Entry {
        quantity: Quantity::Ricci(1, 2),
        printed: cross / 2.0,
        corrected: Some(cross),
    });
    out
}

/// A9 family ii: `lambda_1 = lambda_2` and `a = (0, 0, a3)`.
fn a9ii_draw(rng: &mut SplitMix64) -> Result<Draw> {
    let spec = GeometrySpec::new(GeometryClass::A9);
    let params = vec![0.0, 0.0, uniform(rng, PARAM_RANGE.0, PARAM_RANGE.1)];
    let constants = frame_constants(&spec, &params)?;
    let mut m = metric(rng);
    m[1] = m[0];
    Ok(Draw {
        spec,
        params,
        metric: m,
        constants,
    })
}

// Sectional tables.

fn a2_sectional(d: &Draw) -> Vec<Entry> {
    let k = d.k();
    let dd = d.metric[3];
    sectional([
        -k / dd,
        (k + 1.0) / dd,
        -1.0 / dd,
        k * (k + 1.0) / dd,
        -k * k / dd,
        -(k + 1.0).powi(2) / dd,
    ])
}

fn a3_sectional(d: &Draw) -> Vec<Entry> {
    let k = d.k();
    let [a, b, _, dd] = d.metric;
    let (r, s) = (a / b, b / a);
    let mut out = sectional([
        (r + s - 2.0 - 4.0 * k * k) / (4.0 * dd),
        2.0 * k * k / dd,
        (r - 3.0 * s + 2.0 - 4.0 * k * k) / (4.0 * dd),
        2.0 * k * k / dd,
        (-3.0 * r + s + 2.0 - 4.0 * k * k) / dd,
        -4.0 * k * k / dd,
    ]);
    out[4].corrected = Some(out[4].printed / 4.0);
    out
}

fn a4_sectional(d: &Draw) -> Vec<Entry> {
    let [a, b, _, dd] = d.metric;
    let x = b / (4.0 * a * dd);
    sectional([x, 0.0, -3.0 * x, 0.0, x, 0.0])
}

fn a5_sectional(d: &Draw) -> Vec<Entry> {
    let [a, b, _, dd] = d.metric;
    let s = b / a;
    sectional([
        (-1.0 + s) / (4.0 * dd),
        1.0 / (2.0 * dd),
        -(1.0 + 3.0 * s) / (4.0 * dd),
        1.0 / (2.0 * dd),
        (-1.0 + s) / (4.0 * dd),
        -1.0 / dd,
    ])
}

fn a6_sectional(d: &Draw) -> Vec<Entry> {
    let [a, b, c, dd] = d.metric;
    let (s, u) = (b / a, c / b);
    sectional([
        s / (4.0 * dd),
        0.0,
        -3.0 * s / (4.0 * dd),
        u / (4.0 * dd),
        (s - 3.0 * u) / (4.0 * dd),
        u / (4.0 * dd),
    ])
}

fn a7i_sectional(d: &Draw) -> Vec<Entry> {
    let [a, b, c, dd] = d.metric;
    let (s, u) = (b / c, c / b);
    let e = dd / (4.0 * b * c);
    sectional([
        (s - 3.0 * u - 2.0) / (4.0 * a),
        (u - 3.0 * s - 2.0) / (4.0 * a),
        0.0,
        -3.0 * e + (s + u + 2.0) / (4.0 * a),
        e,
        e,
    ])
}

fn a7ii_sectional(d: &Draw) -> Vec<Entry> {
    let [a, b, c, dd] = d.metric;
    let e = dd / (4.0 * b * c);
    sectional([-1.0 / a, -1.0 / a, 0.0, -3.0 * e + 1.0 / a, e, e])
}

fn a8_sectional(d: &Draw) -> Vec<Entry> {
    let [a, b, c, dd] = d.metric;
    let (s, u) = (b / c, c / b);
    let e = dd / (4.0 * b * c);
    sectional([
        (s - 3.0 * u + 2.0) / (4.0 * a),
        (-3.0 * s + u + 2.0) / (4.0 * a),
        0.0,
        -3.0 * e + (s + u - 2.0) / (4.0 * a),
        e,
        e,
    ])
}

fn a9ii_sectional(d: &Draw) -> Vec<Entry> {
    let [a, _, c, _] = d.metric;
    let x = c / (4.0 * a * a);
    sectional([-(4.0 + 3.0 * c / a) / (4.0 * a), x, 0.0, x, 0.0, 0.0])
}

macro_rules! fixture {
    ($id:literal, $class:ident, $kind:ident, $draw:expr, $printed:expr) => {
        Fixture {
            id: $id,
            class: GeometryClass::$class,
            kind: TableKind::$kind,
            draw: $draw,
            printed: $printed,
        }
    };
}

/// Every Ricci fixture: the off-diagonal entries on each template frame, the
/// diagonal entries of each class, and the general Milnor-frame form of A9/A10.
pub fn ricci_fixtures() -> Vec<Fixture> {
    use GeometryClass::*;
    vec![
        fixture!(
            "A2 template off-diagonal",
            A2,
            OffDiagonal,
            |r| template_draw(A2, r),
            p1_offdiag
        ),
        fixture!(
            "A3 template off-diagonal",
            A3,
            OffDiagonal,
            |r| template_draw(A3, r),
            p2_offdiag
        ),
        fixture!(
            "A4 template off-diagonal",
            A4,
            OffDiagonal,
            |r| template_draw(A4, r),
            p3_offdiag
        ),
        fixture!(
            "A5 template off-diagonal",
            A5,
            OffDiagonal,
            |r| template_draw(A5, r),
            p4_offdiag
        ),
        fixture!(
            "A6 template off-diagonal",
            A6,
            OffDiagonal,
            |r| template_draw(A6, r),
            p5_offdiag
        ),
        fixture!(
            "A7 template off-diagonal",
            A7,
            OffDiagonal,
            |r| template_draw(A7, r),
            p6_offdiag
        ),
        fixture!(
            "A8 template off-diagonal",
            A8,
            OffDiagonal,
            |r| template_draw(A8, r),
            p7_offdiag
        ),
        fixture!(
            "A9 template off-diagonal",
            A9,
            OffDiagonal,
            |r| template_draw(A9, r),
            p89_offdiag
        ),
        fixture!(
            "A10 template off-diagonal",
            A10,
            OffDiagonal,
            |r| template_draw(A10, r),
            p89_offdiag
        ),
        fixture!(
            "A9 template diagonal",
            A9,
            Diagonal,
            |r| template_draw(A9, r),
            p89_diagonal
        ),
        fixture!(
            "A10 template diagonal",
            A10,
            Diagonal,
            |r| template_draw(A10, r),
            p89_diagonal
        ),
        fixture!(
            "A9 Milnor-frame off-diagonal",
            A9,
            OffDiagonal,
            |r| milnor_draw(A9, r),
            milnor_offdiag
        ),
        fixture!(
            "A10 Milnor-frame off-diagonal",
            A10,
            OffDiagonal,
            |r| milnor_draw(A10, r),
            milnor_offdiag
        ),
        fixture!(
            "A2 diagonal",
            A2,
            Diagonal,
            |r| canonical_draw(A2, r),
            a2_diagonal
        ),
        fixture!(
            "A3 diagonal",
            A3,
            Diagonal,
            |r| canonical_draw(A3, r),
            a3_diagonal
        ),
        fixture!(
            "A4 diagonal",
            A4,
            Diagonal,
            |r| canonical_draw(A4, r),
            a4_diagonal
        ),
        fixture!(
            "A5 diagonal",
            A5,
            Diagonal,
            |r| canonical_draw(A5, r),
            a5_diagonal
        ),
        fixture!(
            "A6 diagonal",
            A6,
            Diagonal,
            |r| canonical_draw(A6, r),
            a6_diagonal
        ),
        fixture!(
            "A7i diagonal",
            A7,
            Diagonal,
            |r| canonical_draw(A7, r),
            a7i_diagonal
        ),
        fixture!("A7ii Ricci", A7, Diagonal, a7ii_draw, a7ii_ricci),
        fixture!(
            "A8 diagonal",
            A8,
            Diagonal,
            |r| canonical_draw(A8, r),
            a8_diagonal
        ),
    ]
}

/// Every sectional curvature table.
pub fn sectional_fixtures() -> Vec<Fixture> {
    use GeometryClass::*;
    vec![
        fixture!(
            "A2iii sectional",
            A2,
            Sectional,
            |r| canonical_draw(A2, r),
            a2_sectional
        ),
        fixture!(
            "A3 sectional",
            A3,
            Sectional,
            |r| canonical_draw(A3, r),
            a3_sectional
        ),
        fixture!(
            "A4 sectional",
            A4,
            Sectional,
            |r| canonical_draw(A4, r),
            a4_sectional
        ),
        fixture!(
            "A5 sectional",
            A5,
            Sectional,
            |r| canonical_draw(A5, r),
            a5_sectional
        ),
        fixture!(
            "A6 sectional",
            A6,
            Sectional,
            |r| canonical_draw(A6, r),
            a6_sectional
        ),
        fixture!(
            "A7i sectional",
            A7,
            Sectional,
            |r| canonical_draw(A7, r),
            a7i_sectional
        ),
        fixture!(
            "A7ii sectional",
            A7,
            Sectional,
            a7ii_slice_draw,
            a7ii_sectional
        ),
        fixture!(
            "A8 sectional",
            A8,
            Sectional,
            |r| canonical_draw(A8, r),
            a8_sectional
        ),
        fixture!("A9ii sectional", A9, Sectional, a9ii_draw, a9ii_sectional),
    ]
}

pub fn all_fixtures() -> Vec<Fixture> {
    let mut v = ricci_fixtures();
    v.extend(sectional_fixtures());
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{seeded, DEFAULT_SEED};

    const TOL: f64 = 1e-10;

    #[test]
    fn every_fixture_matches_the_pipeline() {
        let mut rng = seeded(DEFAULT_SEED);
        for f in all_fixtures() {
            let r = f.check(&mut rng, 100).unwrap();
            assert!(r.passes(TOL), "{}: max error {:e}", r.id, r.max_error);
        }
    }

    #[test]
    fn corrections_are_needed() {
        let mut rng = seeded(7);
        for f in all_fixtures() {
            let r = f.check(&mut rng, 50).unwrap();
            for (name, miss) in &r.corrections {
                assert!(
                    *miss > 1e-3,
                    "{} {name}: printed form already agrees ({miss:e})",
                    r.id
                );
            }
        }
    }

    #[test]
    fn a6_worked_value() {
        // a2 - a1 = 1 with unit lambda gives Ric(Y1,Y2) = -1/2
        let spec = GeometrySpec::new(GeometryClass::A6);
        let c = frame_constants(&spec, &[0.0, 1.0]).unwrap();
        let d = Draw {
            spec,
            params: vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            metric: [1.0; 4],
            constants: c,
        };
        assert!((Fixture::pipeline(&d, Quantity::Ricci(0, 1)).unwrap() + 0.5).abs() < 1e-15);
        assert_eq!(p5_offdiag(&d)[0].printed, -0.5);
    }
}
