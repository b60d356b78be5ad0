//! Run configuration: `key = value` files and command-line overrides.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::curvature::DiagonalMetric;
use crate::diagonalization::Branch;
use crate::error::{Error, Result};
use crate::flow::{Family, FlowProblem, IntegrateOptions};
use crate::lie_algebra::{GeometryClass, GeometrySpec};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Parse(format!(
                "unknown format {other:?} (csv or json)"
            ))),
        }
    }
}

/// Every field is optional so a file and a set of flags can be layered.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<GeometryClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mn: Option<(u32, u32)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_stride: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{key}: expected a number, got {v:?}")))
}

pub fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_f64(key, s))
        .collect()
}

pub fn parse_lambda(v: &str) -> Result<[f64; 4]> {
    let xs = parse_list("lambda", v)?;
    xs.try_into()
        .map_err(|xs: Vec<f64>| Error::Parse(format!("lambda needs 4 values, got {}", xs.len())))
}

pub fn parse_mn(v: &str) -> Result<(u32, u32)> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [m, n] => Ok((
            m.parse()
                .map_err(|_| Error::Parse(format!("mn: bad integer {m:?}")))?,
            n.parse()
                .map_err(|_| Error::Parse(format!("mn: bad integer {n:?}")))?,
        )),
        _ => Err(Error::Parse(format!("mn needs two integers, got {v:?}"))),
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Parse(format!(
            "{key}: expected true or false, got {v:?}"
        ))),
    }
}

impl RunConfig {
    /// Sets one key; hyphens and underscores are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().to_ascii_lowercase().replace('-', "_");
        let v = value.trim();
        match key.as_str() {
            "class" => self.class = Some(v.parse()?),
            "branch" | "family" => self.branch = Some(v.parse()?),
            "k" => self.k = Some(parse_f64(&key, v)?),
            "mn" => self.mn = Some(parse_mn(v)?),
            "alpha" => self.alpha = Some(parse_f64(&key, v)?),
            "a" => self.a = Some(parse_list(&key, v)?),
            "lambda" => self.lambda = Some(parse_lambda(v)?),
            "radii" => self.radii = Some(parse_list(&key, v)?),
            "normalized" => self.normalized = Some(parse_bool(&key, v)?),
            "t_end" => self.t_end = Some(parse_f64(&key, v)?),
            "rel_tol" => self.rel_tol = Some(parse_f64(&key, v)?),
            "abs_tol" => self.abs_tol = Some(parse_f64(&key, v)?),
            "max_step" => self.max_step = Some(parse_f64(&key, v)?),
            "sample_stride" | "stride" => {
                self.sample_stride = Some(
                    v.parse()
                        .map_err(|_| Error::Parse(format!("{key}: expected a count, got {v:?}")))?,
                )
            }
            "output" => self.output = Some(v.to_string()),
            "format" => self.format = Some(v.parse()?),
            "seed" => {
                self.seed =
                    Some(v.parse().map_err(|_| {
                        Error::Parse(format!("seed: expected an integer, got {v:?}"))
                    })?)
            }
            _ => return Err(Error::Parse(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", n + 1)))?;
            cfg.set(k, v)
                .map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// `self` with every field set in `flags` replaced.
    pub fn overlay(mut self, flags: RunConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if flags.$f.is_some() { self.$f = flags.$f; } )* };
        }
        take!(
            class,
            branch,
            k,
            mn,
            alpha,
            a,
            lambda,
            radii,
            normalized,
            t_end,
            rel_tol,
            abs_tol,
            max_step,
            sample_stride,
            output,
            format,
            seed
        );
        self
    }

    pub fn spec(&self) -> Result<GeometrySpec<f64>> {
        let class = self
            .class
            .ok_or_else(|| Error::InvalidParameter("class is required".into()))?;
        let mut spec = GeometrySpec::new(class);
        spec.k = self.k;
        spec.mn = self.mn;
        if let Some(r) = &self.radii {
            spec.radii = r.clone();
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn family(&self) -> Result<Option<Family<f64>>> {
        match (self.branch, self.alpha) {
            (Some(Branch::P6ii), Some(alpha)) => {
                if self.a.is_some() {
                    return Err(Error::InvalidParameter(
                        "give either alpha or a for P6.ii, not both".into(),
                    ));
                }
                Ok(Some(Family::p6ii(alpha)))
            }
            (_, Some(_)) => Err(Error::InvalidParameter(
                "alpha only applies to branch P6.ii".into(),
            )),
            (Some(b), None) => Ok(Some(Family::new(b, self.a.as_deref().unwrap_or(&[]))?)),
            (None, None) => match &self.a {
                Some(_) => Err(Error::InvalidParameter(
                    "frame parameters need a branch".into(),
                )),
                None => Ok(None),
            },
        }
    }

    pub fn t_end(&self) -> f64 {
        self.t_end.unwrap_or(10.0)
    }

    pub fn problem(&self) -> Result<FlowProblem<f64>> {
        let spec = self.spec()?;
        let t_end = self.t_end();
        let mut p = if spec.class.is_lie_group() {
            let l = self
                .lambda
                .ok_or_else(|| Error::InvalidParameter(format!("{} needs lambda", spec.class)))?;
            FlowProblem::new(spec, DiagonalMetric::from_array(l)?, t_end)?
        } else {
            let p = FlowProblem::product(spec, t_end)?;
            if let Some(l) = self.lambda {
                if l != p.initial.g {
                    return Err(Error::InvalidParameter(format!(
                        "lambda {l:?} disagrees with the radius layout {:?}",
                        p.initial.g
                    )));
                }
            }
            p
        };
        if let Some(f) = self.family()? {
            p = p.with_family(f);
        }
        p = p.normalized(self.normalized.unwrap_or(false));
        p.validate()?;
        Ok(p)
    }

    pub fn options(&self) -> IntegrateOptions<f64> {
        let mut o = IntegrateOptions::for_horizon(self.t_end());
        if let Some(x) = self.rel_tol {
            o.rel_tol = x;
        }
        if let Some(x) = self.abs_tol {
            o.abs_tol = x;
        }
        if let Some(x) = self.max_step {
            o.max_step = x;
        }
        if let Some(x) = self.sample_stride {
            o.sample_stride = x;
        }
        o
    }
}
