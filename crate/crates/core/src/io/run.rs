use std::path::PathBuf;

use super::config::RunConfig;
use super::tables::{MonitorWriter, ProbeSample, ProbeWriter};
use super::vtk::write_vtk;
use crate::bench::{sample_momentum, sample_pressure};
use crate::driver::{MonitorRecord, RunSummary, Simulation};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub fields: Vec<PathBuf>,
    pub last: Option<MonitorRecord>,
}

fn probe(sim: &Simulation, points: &[crate::Vec2]) -> Result<Vec<ProbeSample>> {
    let rho = sim.settings.flux.rho;
    points
        .iter()
        .map(|&x| {
            Ok(ProbeSample {
                u: sample_momentum(&sim.state.w, &sim.meshes, x)? / rho,
                p: sample_pressure(&sim.state.p, &sim.meshes, x)?,
            })
        })
        .collect()
}

/// Runs a configured simulation, writing `field_<step>.vtk`, `monitors.csv`
/// and `probes.csv` into the output directory. The initial and final states
/// are always written. Rows are flushed per step, so a failing step leaves
/// the completed history on disk before the error is returned.
pub fn run_config(cfg: &RunConfig) -> Result<RunOutcome> {
    let mut sim = cfg.simulation()?;
    let out = &cfg.output;
    std::fs::create_dir_all(&out.dir)?;
    let field_path = |step: usize| out.dir.join(format!("field_{step:06}.vtk"));
    let mut fields = Vec::new();
    let p0 = field_path(0);
    write_vtk(&p0, &sim.meshes, &sim.state.w, &sim.state.p, sim.state.t)?;
    fields.push(p0);

    let mut monitors = if out.monitors {
        Some(MonitorWriter::create(&out.dir.join("monitors.csv"))?)
    } else {
        None
    };
    let mut probes = if out.probes.is_empty() {
        None
    } else {
        let mut w = ProbeWriter::create(&out.dir.join("probes.csv"), &out.probes, &out.probe_fields)?;
        w.append(0, sim.state.t, &probe(&sim, &out.probes)?)?;
        Some(w)
    };

    let mut last_field_t = sim.state.t;
    let mut last = None;
    let summary = sim.run(&mut |sim, rec| {
        if let Some(m) = monitors.as_mut() {
            m.append(rec)?;
        }
        if let Some(p) = probes.as_mut() {
            p.append(rec.step, rec.t, &probe(sim, &out.probes)?)?;
        }
        if out.field_due(rec.step, rec.t, last_field_t) {
            let path = field_path(rec.step);
            write_vtk(&path, &sim.meshes, &sim.state.w, &sim.state.p, sim.state.t)?;
            fields.push(path);
            last_field_t = rec.t;
        }
        last = Some(rec.clone());
        Ok(())
    })?;
    let final_path = field_path(sim.state.step);
    if fields.last() != Some(&final_path) {
        write_vtk(&final_path, &sim.meshes, &sim.state.w, &sim.state.p, sim.state.t)?;
        fields.push(final_path);
    }
    Ok(RunOutcome { summary, fields, last })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::config::ConfigMap;
    use std::path::Path;

    fn cfg(text: &str, dir: &Path) -> RunConfig {
        RunConfig::from_map(&ConfigMap::parse(text, "t.cfg").unwrap(), dir).unwrap()
    }

    #[test]
    fn zero_end_time_writes_initial_state_only() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg("case = tgv2d\ntime.t_end = 0\noutput.dir = out\n", dir.path());
        let r = run_config(&c).unwrap();
        assert_eq!(r.summary.steps, 0);
        assert_eq!(r.fields, vec![dir.path().join("out/field_000000.vtk")]);
        let mon = std::fs::read_to_string(dir.path().join("out/monitors.csv")).unwrap();
        assert_eq!(mon.lines().count(), 2);
        assert!(r.last.is_none());
    }

    #[test]
    fn cadence_and_probes() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(
            "case = tgv2d\ntime.t_end = 0.2\noutput.dir = out\noutput.every = 2\noutput.probes = 1.5707963267948966 0; 3 3\n",
            dir.path(),
        );
        let r = run_config(&c).unwrap();
        assert_eq!(r.summary.steps, 4);
        let names: Vec<String> = r.fields.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
        assert_eq!(names, ["field_000000.vtk", "field_000002.vtk", "field_000004.vtk"]);
        let mon = std::fs::read_to_string(dir.path().join("out/monitors.csv")).unwrap();
        assert_eq!(mon.lines().count(), 2 + 4);
        let probes = std::fs::read_to_string(dir.path().join("out/probes.csv")).unwrap();
        assert_eq!(probes.lines().count(), 2 + 2 * 5);
        // first probe at t = 0 sits on the boundary where u = (1, 0) up to O(h^2)
        let first: Vec<f64> = probes.lines().nth(2).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert!((first[5] - 1.0).abs() < 2e-2, "{first:?}");
        assert_eq!(r.last.unwrap().step, 4);
    }

    #[test]
    fn failing_setup_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg("case = tgv2d\noutput.dir = out\noutput.probes = 100 100\n", dir.path());
        assert!(run_config(&c).is_err());
    }
}
