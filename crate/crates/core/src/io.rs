//! CSV and JSON trajectory files.
//!
//! Numbers are written in the shortest form that parses back to the same
//! `f64`, so both formats reproduce the trajectory exactly.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::flow::{FlowTrajectory, Monitor, MonitorSeries, Sample, Termination};

pub const BASE_COLUMNS: [&str; 7] = ["t", "A", "B", "C", "D", "K_max", "scalar"];
pub const MONITOR_PREFIX: &str = "mon:";

/// Shortest round-trip decimal form of `x`.
pub fn format_number(x: f64) -> String {
    format!("{x:?}")
}

fn parse_number(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("bad number {s:?}: {e}")))
}

pub fn columns(traj: &FlowTrajectory<f64>) -> Vec<String> {
    BASE_COLUMNS
        .iter()
        .map(|c| c.to_string())
        .chain(
            traj.monitors
                .iter()
                .map(|m| format!("{MONITOR_PREFIX}{}", m.monitor.name())),
        )
        .collect()
}

/// Row `i` in column order.
pub fn row(traj: &FlowTrajectory<f64>, i: usize) -> Vec<f64> {
    let s = &traj.samples[i];
    let mut out = vec![
        s.t,
        s.metric[0],
        s.metric[1],
        s.metric[2],
        s.metric[3],
        s.curvature_norm,
        s.scalar,
    ];
    out.extend(traj.monitors.iter().map(|m| m.values[i]));
    out
}

/// Run metadata that does not fit the sample table.
pub fn metadata(traj: &FlowTrajectory<f64>) -> Value {
    let mut m = Map::new();
    m.insert("termination".into(), json!(traj.termination.label()));
    match traj.termination {
        Termination::Blowup { t_est } => {
            m.insert("T_est".into(), json!(t_est));
        }
        Termination::StepUnderflow { t } => {
            m.insert("t_underflow".into(), json!(t));
        }
        Termination::ReachedEnd => {}
    }
    m.insert("rel_tol".into(), json!(traj.rel_tol));
    m.insert("abs_tol".into(), json!(traj.abs_tol));
    m.insert("accepted_steps".into(), json!(traj.accepted_steps));
    m.insert("rejected_steps".into(), json!(traj.rejected_steps));
    Value::Object(m)
}

fn get_f64(v: &Value, key: &str) -> Result<f64> {
    v.get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::Parse(format!("missing number {key:?}")))
}

fn termination_from(meta: &Value) -> Result<Termination<f64>> {
    match meta.get("termination").and_then(Value::as_str) {
        Some("reached_t_end") => Ok(Termination::ReachedEnd),
        Some("blowup_detected") => Ok(Termination::Blowup {
            t_est: get_f64(meta, "T_est")?,
        }),
        Some("step_underflow") => Ok(Termination::StepUnderflow {
            t: get_f64(meta, "t_underflow")?,
        }),
        other => Err(Error::Parse(format!("unknown termination {other:?}"))),
    }
}

fn assemble(header: &[String], rows: Vec<Vec<f64>>, meta: &Value) -> Result<FlowTrajectory<f64>> {
    if header.len() < BASE_COLUMNS.len() || header.iter().zip(BASE_COLUMNS).any(|(h, b)| h != b) {
        return Err(Error::Parse(format!(
            "header must start with {}",
            BASE_COLUMNS.join(",")
        )));
    }
    let mut monitors = Vec::new();
    for h in &header[BASE_COLUMNS.len()..] {
        let name = h
            .strip_prefix(MONITOR_PREFIX)
            .ok_or_else(|| Error::Parse(format!("unexpected column {h:?}")))?;
        let m = Monitor::from_name(name)
            .ok_or_else(|| Error::Parse(format!("unknown monitor {name:?}")))?;
        monitors.push(MonitorSeries {
            monitor: m,
            values: Vec::with_capacity(rows.len()),
        });
    }
    let mut samples = Vec::with_capacity(rows.len());
    for r in rows {
        if r.len() != header.len() {
            return Err(Error::Parse(format!(
                "row has {} fields, header has {}",
                r.len(),
                header.len()
            )));
        }
        samples.push(Sample {
            t: r[0],
            metric: [r[1], r[2], r[3], r[4]],
            curvature_norm: r[5],
            scalar: r[6],
        });
        for (m, v) in monitors.iter_mut().zip(&r[BASE_COLUMNS.len()..]) {
            m.values.push(*v);
        }
    }
    let count = |key: &str| meta.get(key).and_then(Value::as_u64).unwrap_or(0) as usize;
    Ok(FlowTrajectory {
        samples,
        monitors,
        termination: termination_from(meta)?,
        rel_tol: get_f64(meta, "rel_tol")?,
        abs_tol: get_f64(meta, "abs_tol")?,
        accepted_steps: count("accepted_steps"),
        rejected_steps: count("rejected_steps"),
    })
}

pub fn write_csv<W: Write>(traj: &FlowTrajectory<f64>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns(traj)).map_err(csv_err)?;
    for i in 0..traj.samples.len() {
        w.write_record(row(traj, i).into_iter().map(format_number))
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    let msg = e.to_string();
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        _ => Error::Parse(msg),
    }
}

/// Reads a CSV table; `meta` supplies what the table cannot hold (see
/// [`metadata`]).
pub fn read_csv<R: Read>(input: R, meta: &Value) -> Result<FlowTrajectory<f64>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(String::from)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        rows.push(rec.iter().map(parse_number).collect::<Result<Vec<_>>>()?);
    }
    assemble(&header, rows, meta)
}

/// Path of the metadata file written next to a CSV trajectory.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    let mut s = csv_path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Writes `path` and its `.meta.json` sidecar.
pub fn save_csv(traj: &FlowTrajectory<f64>, config: &Value, path: &Path) -> Result<()> {
    write_csv(traj, File::create(path)?)?;
    let mut meta = metadata(traj);
    meta["config"] = config.clone();
    std::fs::write(sidecar_path(path), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

pub fn load_csv(path: &Path) -> Result<FlowTrajectory<f64>> {
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(sidecar_path(path))?)?;
    read_csv(File::open(path)?, &meta)
}

pub fn to_json(traj: &FlowTrajectory<f64>, config: &Value) -> Value {
    let mut v = metadata(traj);
    v["config"] = config.clone();
    v["columns"] = json!(columns(traj));
    v["samples"] = Value::Array(
        (0..traj.samples.len())
            .map(|i| json!(row(traj, i)))
            .collect(),
    );
    v
}

/// Parses the output of [`to_json`]; returns the trajectory and its config.
pub fn from_json(v: &Value) -> Result<(FlowTrajectory<f64>, Value)> {
    let header: Vec<String> = match v.get("columns").and_then(Value::as_array) {
        Some(cols) => cols
            .iter()
            .map(|c| c.as_str().map(String::from))
            .collect::<Option<_>>(),
        None => None,
    }
    .ok_or_else(|| Error::Parse("missing columns".into()))?;
    let rows = v
        .get("samples")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing samples".into()))?
        .iter()
        .map(|r| {
            r.as_array()
                .and_then(|xs| xs.iter().map(Value::as_f64).collect::<Option<Vec<_>>>())
                .ok_or_else(|| Error::Parse("sample rows must be arrays of numbers".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let traj = assemble(&header, rows, v)?;
    Ok((traj, v.get("config").cloned().unwrap_or(Value::Null)))
}

pub fn save_json(traj: &FlowTrajectory<f64>, config: &Value, path: &Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string(&to_json(traj, config))?)?;
    Ok(())
}

pub fn load_json(path: &Path) -> Result<(FlowTrajectory<f64>, Value)> {
    from_json(&serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_traj() -> FlowTrajectory<f64> {
        let samples = vec![
            Sample {
                t: 0.0,
                metric: [1.0, 0.1, 1e-300, 3.0],
                curvature_norm: 0.75,
                scalar: -1.5,
            },
            Sample {
                t: 0.1 + 0.2,
                metric: [1.0 / 3.0, 2.0f64.sqrt(), 7e22, 1.0],
                curvature_norm: 0.0,
                scalar: f64::MIN_POSITIVE,
            },
        ];
        FlowTrajectory {
            monitors: vec![MonitorSeries {
                monitor: Monitor::AOverCD,
                values: vec![1.0, 1.0 - f64::EPSILON],
            }],
            samples,
            termination: Termination::Blowup {
                t_est: 0.9999999999,
            },
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            accepted_steps: 7,
            rejected_steps: 1,
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let traj = sample_traj();
        let mut buf = Vec::new();
        write_csv(&traj, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,A,B,C,D,K_max,scalar,mon:A/(CD)\n"));
        let back = read_csv(buf.as_slice(), &metadata(&traj)).unwrap();
        assert_eq!(back, traj);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let traj = sample_traj();
        let cfg = json!({"class": "A6"});
        let text = serde_json::to_string(&to_json(&traj, &cfg)).unwrap();
        let (back, c) = from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, traj);
        assert_eq!(c, cfg);
    }

    #[test]
    fn rejects_bad_header() {
        let meta = metadata(&sample_traj());
        assert!(read_csv("t,A,B\n1,2,3\n".as_bytes(), &meta).is_err());
        assert!(read_csv("t,A,B,C,D,K_max,scalar,mon:nope\n".as_bytes(), &meta).is_err());
    }
}
