//! CSV outputs read by the report tooling.
//!
//! Every file starts with a `# schema: <name> v<version>` line, then a
//! column row. Further `#` lines are metadata. Floats use `{:.10e}`, and a
//! missing value is an empty field.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::bench::study::ErrorReport;
use crate::bench::sampling::ProfileDeviation;
use crate::bench::validation::ProfileRow;
use crate::driver::MonitorRecord;
use crate::error::Result;
use crate::Vec2;

pub const MONITORS_SCHEMA: &str = "# schema: monitors v1";
pub const MONITORS_COLUMNS: &str = "step,t,dt,kinetic_energy,divergence_norm,newton_iters,krylov_iters,residual";
pub const ERRORS_SCHEMA: &str = "# schema: errors v1";
pub const ERRORS_COLUMNS: &str = "level,h,E_p,E_W,rate_p,rate_W,steps,newton_iters_avg,krylov_iters_avg";
pub const PROBES_SCHEMA: &str = "# schema: probes v1";
pub const PROFILES_SCHEMA: &str = "# schema: profiles v1";
pub const PROFILES_COLUMNS: &str = "t,x1,x2,u1,u2,u1_exact,u2_exact";
pub const CENTERLINES_SCHEMA: &str = "# schema: centerlines v1";
pub const CENTERLINES_COLUMNS: &str = "profile,coordinate,reference,numerical,tolerance";

fn f(v: f64) -> String {
    format!("{v:.10e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(f).unwrap_or_default()
}

pub fn monitor_row(r: &MonitorRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        r.step,
        f(r.t),
        f(r.dt),
        f(r.kinetic_energy),
        f(r.divergence_norm),
        r.newton_iters,
        r.krylov_iters,
        f(r.residual)
    )
}

/// Monitor file written one row per step and flushed after each row, so a
/// failed run keeps every completed step.
pub struct MonitorWriter {
    out: BufWriter<File>,
}

impl MonitorWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{MONITORS_SCHEMA}")?;
        writeln!(out, "{MONITORS_COLUMNS}")?;
        out.flush()?;
        Ok(Self { out })
    }

    pub fn append(&mut self, r: &MonitorRecord) -> Result<()> {
        writeln!(self.out, "{}", monitor_row(r))?;
        self.out.flush()?;
        Ok(())
    }
}

pub fn write_monitors_csv(history: &[MonitorRecord], path: &Path) -> Result<()> {
    let mut w = MonitorWriter::create(path)?;
    for r in history {
        w.append(r)?;
    }
    Ok(())
}

pub fn format_error_csv(report: &ErrorReport) -> String {
    let mut s = format!("{ERRORS_SCHEMA}\n# case: {}\n{ERRORS_COLUMNS}\n", report.case);
    for r in &report.rows {
        s += &format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.level,
            f(r.h),
            f(r.e_p),
            f(r.e_w),
            opt(r.rate_p),
            opt(r.rate_w),
            r.steps,
            f(r.newton_iters_avg),
            f(r.krylov_iters_avg)
        );
    }
    if let Some((level, msg)) = &report.failure {
        s += &format!("# failure: level {level}: {}\n", msg.replace('\n', " "));
    }
    s
}

pub fn write_error_csv(report: &ErrorReport, path: &Path) -> Result<()> {
    Ok(std::fs::write(path, format_error_csv(report))?)
}

/// Quantities recorded at each probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeField {
    Velocity,
    Pressure,
}

impl std::str::FromStr for ProbeField {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "velocity" | "u" => Ok(Self::Velocity),
            "pressure" | "p" => Ok(Self::Pressure),
            other => Err(format!("unknown probe field '{other}' (expected velocity or pressure)")),
        }
    }
}

/// One probe reading: velocity and pressure at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSample {
    pub u: Vec2,
    pub p: f64,
}

/// Rows `step,t,probe,x1,x2` followed by `u1,u2` and/or `p`.
pub struct ProbeWriter {
    out: BufWriter<File>,
    points: Vec<Vec2>,
    fields: Vec<ProbeField>,
}

impl ProbeWriter {
    pub fn create(path: &Path, points: &[Vec2], fields: &[ProbeField]) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        let mut cols = String::from("step,t,probe,x1,x2");
        for fl in fields {
            cols += match fl {
                ProbeField::Velocity => ",u1,u2",
                ProbeField::Pressure => ",p",
            };
        }
        writeln!(out, "{PROBES_SCHEMA}")?;
        writeln!(out, "{cols}")?;
        out.flush()?;
        Ok(Self {
            out,
            points: points.to_vec(),
            fields: fields.to_vec(),
        })
    }

    pub fn append(&mut self, step: usize, t: f64, samples: &[ProbeSample]) -> Result<()> {
        for (k, (x, s)) in self.points.iter().zip(samples).enumerate() {
            let mut row = format!("{step},{},{k},{},{}", f(t), f(x.x), f(x.y));
            for fl in &self.fields {
                match fl {
                    ProbeField::Velocity => row += &format!(",{},{}", f(s.u.x), f(s.u.y)),
                    ProbeField::Pressure => row += &format!(",{}", f(s.p)),
                }
            }
            writeln!(self.out, "{row}")?;
        }
        self.out.flush()?;
        Ok(())
    }
}

pub fn format_profile_csv(case: &str, rows: &[ProfileRow]) -> String {
    let mut s = format!("{PROFILES_SCHEMA}\n# case: {case}\n{PROFILES_COLUMNS}\n");
    for r in rows {
        s += &format!(
            "{},{},{},{},{},{},{}\n",
            f(r.t),
            f(r.x.x),
            f(r.x.y),
            f(r.u.x),
            f(r.u.y),
            opt(r.exact.map(|e| e.x)),
            opt(r.exact.map(|e| e.y))
        );
    }
    s
}

pub fn write_profile_csv(case: &str, rows: &[ProfileRow], path: &Path) -> Result<()> {
    Ok(std::fs::write(path, format_profile_csv(case, rows))?)
}

/// Cavity centerline samples next to the reference values.
pub fn format_centerline_csv(deviations: &[ProfileDeviation]) -> String {
    let mut s = format!("{CENTERLINES_SCHEMA}\n{CENTERLINES_COLUMNS}\n");
    for d in deviations {
        s += &format!("{},{},{},{},{}\n", d.profile, f(d.s), f(d.reference), f(d.numerical), f(d.tolerance));
    }
    s
}

pub fn write_centerline_csv(deviations: &[ProfileDeviation], path: &Path) -> Result<()> {
    Ok(std::fs::write(path, format_centerline_csv(deviations))?)
}
