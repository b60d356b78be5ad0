//! Quantities of the metric coefficients that a given family keeps constant.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diagonalization::Branch;
use crate::error::{Error, Result};
use crate::lie_algebra::{GeometryClass, GeometrySpec};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Monitor {
    A,
    B,
    C,
    D,
    AB,
    AOverD,
    ABC,
    AOverCD,
    BCD2,
    ADBMinusC,
    ADBPlusC,
    BD,
    COverB,
}

impl Monitor {
    pub fn name(self) -> &'static str {
        match self {
            Monitor::A => "A",
            Monitor::B => "B",
            Monitor::C => "C",
            Monitor::D => "D",
            Monitor::AB => "AB",
            Monitor::AOverD => "A/D",
            Monitor::ABC => "ABC",
            Monitor::AOverCD => "A/(CD)",
            Monitor::BCD2 => "BCD^2",
            Monitor::ADBMinusC => "AD(B-C)",
            Monitor::ADBPlusC => "AD(B+C)",
            Monitor::BD => "BD",
            Monitor::COverB => "C/B",
        }
    }

    pub const ALL: [Monitor; 13] = [
        Monitor::A,
        Monitor::B,
        Monitor::C,
        Monitor::D,
        Monitor::AB,
        Monitor::AOverD,
        Monitor::ABC,
        Monitor::AOverCD,
        Monitor::BCD2,
        Monitor::ADBMinusC,
        Monitor::ADBPlusC,
        Monitor::BD,
        Monitor::COverB,
    ];

    pub fn from_name(name: &str) -> Option<Monitor> {
        Monitor::ALL.into_iter().find(|m| m.name() == name)
    }

    pub fn eval<T: Real>(self, g: &[T; 4]) -> T {
        let [a, b, c, d] = *g;
        match self {
            Monitor::A => a,
            Monitor::B => b,
            Monitor::C => c,
            Monitor::D => d,
            Monitor::AB => a * b,
            Monitor::AOverD => a / d,
            Monitor::ABC => a * b * c,
            Monitor::AOverCD => a / (c * d),
            Monitor::BCD2 => b * c * d * d,
            Monitor::ADBMinusC => a * d * (b - c),
            Monitor::ADBPlusC => a * d * (b + c),
            Monitor::BD => b * d,
            Monitor::COverB => c / b,
        }
    }
}

impl fmt::Display for Monitor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The conserved quantities of a class, refined by the family branch where the
/// class has more than one (A7).
pub fn monitors_for<T: Real>(
    spec: &GeometrySpec<T>,
    branch: Option<Branch>,
) -> Result<Vec<Monitor>> {
    use GeometryClass::*;
    use Monitor::*;
    if let Some(b) = branch {
        if b.class() != spec.class {
            return Err(Error::UnknownFamily(format!(
                "{b} does not belong to {}",
                spec.class
            )));
        }
    }
    Ok(match spec.class {
        A1 => vec![A, B, C, D],
        A2 => vec![A, B, C],
        A3 => vec![AB],
        A4 => vec![AB, AOverD],
        A5 => vec![AB, C],
        A6 => vec![ABC, AOverCD],
        A7 if branch == Some(Branch::P6ii) => vec![BD, COverB],
        A7 => vec![BCD2, ADBMinusC],
        A8 => vec![BCD2, ADBPlusC],
        _ => Vec::new(),
    })
}

/// Values of one monitor at every trajectory sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorSeries<T> {
    pub monitor: Monitor,
    pub values: Vec<T>,
}

impl<T: Real> MonitorSeries<T> {
    pub fn reference(&self) -> Option<T> {
        self.values.first().copied()
    }

    /// Largest `|m(t) - m(0)|`, divided by `|m(0)|` unless `m(0) = 0`.
    pub fn drift(&self) -> T {
        let Some(m0) = self.reference() else {
            return T::zero();
        };
        let worst = self
            .values
            .iter()
            .fold(T::zero(), |w, v| w.max((*v - m0).abs()));
        if m0 == T::zero() {
            worst
        } else {
            worst / m0.abs()
        }
    }

    /// Whether [`MonitorSeries::drift`] is relative.
    pub fn is_relative(&self) -> bool {
        self.reference().is_some_and(|m| m != T::zero())
    }
}
