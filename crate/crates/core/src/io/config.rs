//! Run configuration: flat `key = value` text.
//!
//! Keys carry a section prefix (`krylov.tol`). A `[section]` line prefixes the
//! keys that follow it. `#` starts a comment. Recognized keys:
//!
//! ```text
//! case            tgv2d | stokes1 | cavity | womersley | poiseuille2d
//! case.level      refinement level of tgv2d (mesh and step count)
//! mesh.file       mesh in the text format, relative to the config file
//! mesh.nx mesh.ny mesh.domain (x0 x1 y0 y1) mesh.diagonals (forward | union_jack)
//! physics.mu physics.rho physics.gravity (gx gy)
//! flux.variant (ducros | rusanov) flux.order (1 | 2) flux.c_alpha
//! time.dt | time.cfl time.dt_max time.t_end time.max_steps time.steady_tol
//! krylov.method krylov.tol krylov.restart krylov.max_iter
//! pressure.tol pressure.max_iter
//! newton.tol newton.abs_tol newton.max_iter
//! reorder.direction (dx dy) reorder.anchor (x y) reorder.bin_width
//! initial.velocity (u1 u2) initial.pressure
//! output.dir output.every output.interval output.monitors (true | false)
//! output.probes (x y; x y; ...) output.probe_fields (velocity, pressure)
//! bc.<tag>        no_slip | inviscid_wall | dirichlet u1 u2 | velocity_inlet u1 u2
//!                 | pressure_outlet p | pressure_inlet p [u1 u2] | periodic partner dx dy
//! ```
//!
//! With `case`, its mesh, physics, boundary map, time controls and initial
//! state are the defaults, and any key above overrides them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::bench::{default_case, initial_fields, tgv2d, BenchmarkCase, CaseName, ExactSolution, InitialFn, MeshSpec};
use crate::driver::{
    constant_scalar, constant_vector, BoundaryCondition, BoundaryMap, Simulation, SolverSettings, TimeControls, TimeMode,
};
use crate::error::{Error, Result};
use crate::io::mesh::read_mesh;
use crate::io::tables::ProbeField;
use crate::krylov::NewtonConfig;
use crate::meshcore::{generate_structured_triangulation_with, Diagonals, Meshes, Rectangle, SideTags, Tag};
use crate::Vec2;

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    /// Source line; `None` for command-line overrides.
    line: Option<usize>,
}

/// Raw key-value pairs with their origin.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    source: String,
    entries: BTreeMap<String, Entry>,
}

impl ConfigMap {
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut map = Self {
            source: source.to_string(),
            entries: BTreeMap::new(),
        };
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| Error::Parse {
                path: source.to_string(),
                line: i + 1,
                message,
            };
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| bad(format!("expected 'key = value', found '{line}'")))?;
            let key = if section.is_empty() {
                k.trim().to_string()
            } else {
                format!("{section}.{}", k.trim())
            };
            if key.is_empty() || key.ends_with('.') {
                return Err(bad("empty key".into()));
            }
            let entry = Entry {
                value: v.trim().to_string(),
                line: Some(i + 1),
            };
            if let Some(prev) = map.entries.insert(key.clone(), entry) {
                return Err(bad(format!("duplicate key '{key}' (first set on line {})", prev.line.unwrap_or(0))));
            }
        }
        Ok(map)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?, &path.display().to_string())
    }

    /// Applies a `key=value` override, replacing any value from the file.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override '{assignment}' is not of the form key=value")))?;
        self.entries.insert(
            k.trim().to_string(),
            Entry {
                value: v.trim().to_string(),
                line: None,
            },
        );
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn error(&self, key: &str, message: String) -> Error {
        match self.entries.get(key).and_then(|e| e.line) {
            Some(line) => Error::Parse {
                path: self.source.clone(),
                line,
                message: format!("{key}: {message}"),
            },
            None => Error::Config(format!("{key}: {message}")),
        }
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| self.error(key, format!("cannot parse '{v}': {e}"))))
            .transpose()
    }

    fn numbers(&self, key: &str, n: usize) -> Result<Option<Vec<f64>>> {
        let Some(v) = self.get(key) else { return Ok(None) };
        let x = numbers(v).map_err(|m| self.error(key, m))?;
        if x.len() != n {
            return Err(self.error(key, format!("expected {n} numbers, found {}", x.len())));
        }
        Ok(Some(x))
    }

    fn vector(&self, key: &str) -> Result<Option<Vec2>> {
        Ok(self.numbers(key, 2)?.map(|v| Vec2::new(v[0], v[1])))
    }
}

fn numbers(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| format!("'{t}' is not a number")))
        .collect()
}

/// Parses the value of a `bc.<tag>` key.
pub fn parse_boundary_condition(value: &str) -> std::result::Result<BoundaryCondition, String> {
    let mut it = value.split_whitespace();
    let kind = it.next().ok_or("empty boundary condition")?;
    let rest: Vec<&str> = it.collect();
    let nums = || numbers(&rest.join(" "));
    let expect = |n: usize, x: &[f64]| {
        if x.len() == n {
            Ok(())
        } else {
            Err(format!("{kind} takes {n} numbers, found {}", x.len()))
        }
    };
    Ok(match kind {
        "no_slip" => {
            expect(0, &nums()?)?;
            BoundaryCondition::NoSlip
        }
        "inviscid_wall" => {
            expect(0, &nums()?)?;
            BoundaryCondition::InviscidWall
        }
        "dirichlet" | "velocity_inlet" => {
            let x = nums()?;
            expect(2, &x)?;
            let u = constant_vector(Vec2::new(x[0], x[1]));
            if kind == "dirichlet" {
                BoundaryCondition::DirichletVelocity(u)
            } else {
                BoundaryCondition::VelocityInlet(u)
            }
        }
        "pressure_outlet" => {
            let x = nums()?;
            expect(1, &x)?;
            BoundaryCondition::PressureOutlet(constant_scalar(x[0]))
        }
        "pressure_inlet" => {
            let x = nums()?;
            if x.len() != 1 && x.len() != 3 {
                return Err(format!("pressure_inlet takes p or p u1 u2, found {} numbers", x.len()));
            }
            BoundaryCondition::PressureInlet {
                velocity: (x.len() == 3).then(|| constant_vector(Vec2::new(x[1], x[2]))),
                pressure: constant_scalar(x[0]),
            }
        }
        "periodic" => {
            if rest.len() != 3 {
                return Err(format!("periodic takes partner dx dy, found {} values", rest.len()));
            }
            let partner: Tag = rest[0].parse().map_err(|_| format!("partner tag '{}' is not an integer", rest[0]))?;
            let d = numbers(&rest[1..].join(" "))?;
            BoundaryCondition::Periodic {
                partner,
                offset: Vec2::new(d[0], d[1]),
            }
        }
        other => {
            return Err(format!(
                "unknown boundary condition '{other}' (expected no_slip, inviscid_wall, dirichlet, velocity_inlet, pressure_outlet, pressure_inlet or periodic)"
            ))
        }
    })
}

/// When fields are written besides the initial and final states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldCadence {
    Never,
    Steps(usize),
    Interval(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSchedule {
    pub dir: PathBuf,
    pub fields: FieldCadence,
    pub monitors: bool,
    pub probes: Vec<Vec2>,
    pub probe_fields: Vec<ProbeField>,
}

impl Default for OutputSchedule {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("output"),
            fields: FieldCadence::Never,
            monitors: true,
            probes: Vec::new(),
            probe_fields: vec![ProbeField::Velocity, ProbeField::Pressure],
        }
    }
}

impl OutputSchedule {
    pub fn validate(&self) -> Result<()> {
        match self.fields {
            FieldCadence::Steps(0) => Err(Error::Config("output.every must be positive".into())),
            FieldCadence::Interval(d) if !(d > 0.0) => Err(Error::Config(format!("output.interval must be positive, got {d}"))),
            _ => Ok(()),
        }
    }

    /// Whether a field is due after the step that ended at `t`, given the
    /// time of the previous scheduled output.
    pub fn field_due(&self, step: usize, t: f64, last: f64) -> bool {
        match self.fields {
            FieldCadence::Never => false,
            FieldCadence::Steps(n) => step % n == 0,
            FieldCadence::Interval(d) => t >= last + d * (1.0 - 1e-9),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeshSource {
    Structured(MeshSpec),
    File(PathBuf),
}

/// Everything needed to set up and run one simulation.
#[derive(Clone)]
pub struct RunConfig {
    pub label: String,
    pub mesh: MeshSource,
    pub bcs: BoundaryMap,
    pub settings: SolverSettings,
    pub controls: TimeControls,
    pub initial: InitialFn,
    pub exact: Option<ExactSolution>,
    pub output: OutputSchedule,
}

impl std::fmt::Debug for RunConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RunConfig")
            .field("label", &self.label)
            .field("mesh", &self.mesh)
            .field("bcs", &self.bcs)
            .field("settings", &self.settings)
            .field("controls", &self.controls)
            .field("exact", &self.exact)
            .field("output", &self.output)
            .finish()
    }
}

const KEYS: &[&str] = &[
    "case",
    "case.level",
    "mesh.file",
    "mesh.nx",
    "mesh.ny",
    "mesh.domain",
    "mesh.diagonals",
    "physics.mu",
    "physics.rho",
    "physics.gravity",
    "flux.variant",
    "flux.order",
    "flux.c_alpha",
    "time.dt",
    "time.cfl",
    "time.dt_max",
    "time.t_end",
    "time.max_steps",
    "time.steady_tol",
    "krylov.method",
    "krylov.tol",
    "krylov.restart",
    "krylov.max_iter",
    "pressure.tol",
    "pressure.max_iter",
    "newton.tol",
    "newton.abs_tol",
    "newton.max_iter",
    "reorder.direction",
    "reorder.anchor",
    "reorder.bin_width",
    "initial.velocity",
    "initial.pressure",
    "output.dir",
    "output.every",
    "output.interval",
    "output.monitors",
    "output.probes",
    "output.probe_fields",
];

impl RunConfig {
    /// Reads a config file; relative paths in it resolve against its directory.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let mut map = ConfigMap::read(path)?;
        for o in overrides {
            map.set(o)?;
        }
        Self::from_map(&map, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn from_map(map: &ConfigMap, base_dir: &Path) -> Result<Self> {
        for key in map.entries.keys() {
            if !KEYS.contains(&key.as_str()) && !key.starts_with("bc.") {
                return Err(map.error(key, "unknown key".into()));
            }
        }
        let case: Option<CaseName> = map.parsed("case")?;
        let level: Option<usize> = map.parsed("case.level")?;
        let base: Option<BenchmarkCase> = match (case, level) {
            (Some(CaseName::Tgv2d), Some(l)) => Some(tgv2d(l)),
            (Some(_), Some(_)) => return Err(map.error("case.level", "only tgv2d has refinement levels".into())),
            (None, Some(_)) => return Err(map.error("case.level", "needs a case".into())),
            (c, None) => c.map(default_case),
        };

        let mesh = match map.get("mesh.file") {
            Some(f) => MeshSource::File(base_dir.join(f)),
            None => {
                let nx: Option<usize> = map.parsed("mesh.nx")?;
                let ny: Option<usize> = map.parsed("mesh.ny")?;
                let domain = map.numbers("mesh.domain", 4)?.map(|d| Rectangle::new(d[0], d[1], d[2], d[3]));
                let diagonals = match map.get("mesh.diagonals") {
                    None => None,
                    Some("forward") => Some(Diagonals::Forward),
                    Some("union_jack") => Some(Diagonals::UnionJack),
                    Some(other) => return Err(map.error("mesh.diagonals", format!("expected forward or union_jack, found '{other}'"))),
                };
                let mut spec = match (base.as_ref().map(|b| b.mesh), nx, ny, domain) {
                    (Some(s), ..) => s,
                    (None, Some(nx), Some(ny), Some(domain)) => MeshSpec {
                        nx,
                        ny,
                        domain,
                        diagonals: Diagonals::Forward,
                    },
                    _ => return Err(Error::Config("no mesh: set mesh.file, or mesh.nx, mesh.ny and mesh.domain, or a case".into())),
                };
                spec.nx = nx.unwrap_or(spec.nx);
                spec.ny = ny.unwrap_or(spec.ny);
                spec.domain = domain.unwrap_or(spec.domain);
                spec.diagonals = diagonals.unwrap_or(spec.diagonals);
                MeshSource::Structured(spec)
            }
        };

        let mut bcs = base.as_ref().map(|b| b.bcs.clone()).unwrap_or_default();
        for (key, entry) in map.entries.iter().filter(|(k, _)| k.starts_with("bc.")) {
            let tag: Tag = key["bc.".len()..]
                .parse()
                .map_err(|_| map.error(key, "boundary keys are bc.<integer tag>".into()))?;
            let bc = parse_boundary_condition(&entry.value).map_err(|m| map.error(key, m))?;
            bcs = bcs.with(tag, bc);
        }
        if bcs.conditions.is_empty() {
            return Err(Error::Config("no boundary conditions: set bc.<tag> entries or a case".into()));
        }

        let mut settings = SolverSettings::default();
        let (mut mu, mut rho) = base.as_ref().map(|b| (b.mu, b.rho)).unwrap_or((0.0, 1.0));
        mu = map.parsed("physics.mu")?.unwrap_or(mu);
        rho = map.parsed("physics.rho")?.unwrap_or(rho);
        settings.flux.mu = mu;
        settings.flux.rho = rho;
        if let Some(g) = map.vector("physics.gravity")? {
            settings.flux.gravity = g;
        }
        if let Some(v) = map.get("flux.variant") {
            settings.flux.variant = v.parse().map_err(|m: String| map.error("flux.variant", m))?;
        }
        settings.flux.order = map.parsed("flux.order")?.unwrap_or(settings.flux.order);
        settings.flux.c_alpha = map.parsed("flux.c_alpha")?.unwrap_or(settings.flux.c_alpha);
        if let Some(b) = &base {
            settings.flux.c_alpha = settings.flux.c_alpha.max(b.c_alpha_min);
            settings.reorder.direction = b.sweep;
            settings.steady_tol = b.steady_tol;
        }
        settings.flux.validate().map_err(|e| Error::Config(e.to_string()))?;

        if let Some(v) = map.get("krylov.method") {
            settings.krylov.method = v.parse().map_err(|m: String| map.error("krylov.method", m))?;
        }
        settings.krylov.tol = map.parsed("krylov.tol")?.unwrap_or(settings.krylov.tol);
        settings.krylov.restart = map.parsed("krylov.restart")?.unwrap_or(settings.krylov.restart);
        settings.krylov.max_iter = map.parsed("krylov.max_iter")?.unwrap_or(settings.krylov.max_iter);
        settings.pressure.tol = map.parsed("pressure.tol")?.unwrap_or(settings.pressure.tol);
        settings.pressure.max_iter = map.parsed("pressure.max_iter")?.unwrap_or(settings.pressure.max_iter);
        let newton_keys = ["newton.tol", "newton.abs_tol", "newton.max_iter"];
        if newton_keys.iter().any(|k| map.get(k).is_some()) {
            let mut n: NewtonConfig = settings.newton_config();
            n.rel_tol = map.parsed("newton.tol")?.unwrap_or(n.rel_tol);
            n.abs_tol = map.parsed::<f64>("newton.abs_tol")?.or(n.abs_tol);
            n.max_newton = map.parsed("newton.max_iter")?.unwrap_or(n.max_newton);
            settings.newton = Some(n);
        }
        if let Some(d) = map.vector("reorder.direction")? {
            settings.reorder.direction = d;
        }
        settings.reorder.anchor = map.vector("reorder.anchor")?.or(settings.reorder.anchor);
        settings.reorder.bin_width = map.parsed::<f64>("reorder.bin_width")?.or(settings.reorder.bin_width);
        settings.steady_tol = map.parsed::<f64>("time.steady_tol")?.or(settings.steady_tol);

        let mut controls = match &base {
            Some(b) => b.controls,
            None => TimeControls::fixed(0.0, 0.0),
        };
        let dt: Option<f64> = map.parsed("time.dt")?;
        let cfl: Option<f64> = map.parsed("time.cfl")?;
        let dt_max: Option<f64> = map.parsed("time.dt_max")?;
        match (dt, cfl) {
            (Some(_), Some(_)) => return Err(map.error("time.cfl", "set either time.dt or time.cfl, not both".into())),
            (Some(dt), None) => controls.mode = TimeMode::FixedDt(dt),
            (None, Some(cfl)) => {
                let current = match controls.mode {
                    TimeMode::Cfl { dt_max, .. } => dt_max,
                    TimeMode::FixedDt(_) => f64::INFINITY,
                };
                controls.mode = TimeMode::Cfl {
                    cfl,
                    dt_max: dt_max.unwrap_or(current),
                };
            }
            (None, None) => {
                if base.is_none() {
                    return Err(Error::Config("no time step: set time.dt or time.cfl".into()));
                }
                if let (Some(m), TimeMode::Cfl { cfl, .. }) = (dt_max, controls.mode) {
                    controls.mode = TimeMode::Cfl { cfl, dt_max: m };
                }
            }
        }
        match map.parsed::<f64>("time.t_end")? {
            Some(t) => controls.t_end = t,
            None if base.is_none() => return Err(Error::Config("time.t_end is required without a case".into())),
            None => {}
        }
        controls.max_steps = map.parsed("time.max_steps")?.unwrap_or(controls.max_steps);
        controls.validate().map_err(|e| Error::Config(e.to_string()))?;

        let base_initial = base.as_ref().map(|b| b.initial.clone());
        let u0 = map.vector("initial.velocity")?;
        let p0: Option<f64> = map.parsed("initial.pressure")?;
        let initial: InitialFn = match (base_initial, u0, p0) {
            (Some(f), None, None) => f,
            (f, u0, p0) => Arc::new(move |x: Vec2| {
                let (u, p) = f.as_ref().map(|f| f(x)).unwrap_or((Vec2::zeros(), 0.0));
                (u0.unwrap_or(u), p0.unwrap_or(p))
            }),
        };

        let mut output = OutputSchedule::default();
        if let Some(d) = map.get("output.dir") {
            output.dir = base_dir.join(d);
        }
        let every: Option<usize> = map.parsed("output.every")?;
        let interval: Option<f64> = map.parsed("output.interval")?;
        output.fields = match (every, interval) {
            (Some(_), Some(_)) => return Err(map.error("output.interval", "set either output.every or output.interval".into())),
            (Some(n), None) => FieldCadence::Steps(n),
            (None, Some(d)) => FieldCadence::Interval(d),
            (None, None) => FieldCadence::Never,
        };
        output.monitors = map.parsed("output.monitors")?.unwrap_or(true);
        if let Some(v) = map.get("output.probes") {
            for item in v.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                let x = numbers(item).map_err(|m| map.error("output.probes", m))?;
                if x.len() != 2 {
                    return Err(map.error("output.probes", format!("probe '{item}' needs two coordinates")));
                }
                output.probes.push(Vec2::new(x[0], x[1]));
            }
        }
        if let Some(v) = map.get("output.probe_fields") {
            output.probe_fields = v
                .split(',')
                .map(|s| s.trim().parse::<ProbeField>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|m| map.error("output.probe_fields", m))?;
        }
        output.validate()?;

        Ok(Self {
            label: case.map(|c| c.to_string()).unwrap_or_else(|| "custom".into()),
            mesh,
            bcs,
            settings,
            controls,
            initial,
            exact: base.and_then(|b| b.exact),
            output,
        })
    }

    pub fn meshes(&self) -> Result<Meshes> {
        let mut primal = match &self.mesh {
            MeshSource::File(path) => read_mesh(path)?,
            MeshSource::Structured(s) => generate_structured_triangulation_with(s.nx, s.ny, s.domain, SideTags::default(), s.diagonals)?,
        };
        self.bcs.apply_periodic(&mut primal)?;
        Ok(Meshes::build(primal)?)
    }

    pub fn simulation(&self) -> Result<Simulation> {
        let meshes = self.meshes()?;
        let (w, p) = initial_fields(&meshes, &self.bcs, self.settings.flux.rho, &self.initial)?;
        Simulation::new(meshes, self.bcs.clone(), self.settings, self.controls, w, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krylov::KrylovMethod;
    use crate::transport::FluxVariant;

    fn config(text: &str) -> Result<RunConfig> {
        RunConfig::from_map(&ConfigMap::parse(text, "run.cfg")?, Path::new("/work"))
    }

    #[test]
    fn sections_and_prefixes() {
        let m = ConfigMap::parse("case = tgv2d\n[krylov]\ntol = 1e-8 # tighter\n\nmethod = bicgstab\n", "a").unwrap();
        assert_eq!(m.get("krylov.tol"), Some("1e-8"));
        assert_eq!(m.get("krylov.method"), Some("bicgstab"));
        assert_eq!(m.get("case"), Some("tgv2d"));
    }

    #[test]
    fn parse_errors_have_lines() {
        let e = ConfigMap::parse("case = tgv2d\nnonsense\n", "a.cfg").unwrap_err().to_string();
        assert!(e.starts_with("a.cfg:2:"), "{e}");
        let e = ConfigMap::parse("a = 1\na = 2\n", "a.cfg").unwrap_err().to_string();
        assert!(e.contains("duplicate key 'a'"), "{e}");
        let e = config("case = tgv2d\nflux.order = two\n").unwrap_err().to_string();
        assert!(e.starts_with("run.cfg:2: flux.order"), "{e}");
        let e = config("case = tgv2d\nkrylov.tolerance = 1\n").unwrap_err().to_string();
        assert!(e.contains("unknown key"), "{e}");
    }

    #[test]
    fn case_defaults_with_overrides() {
        let c = config("case = tgv2d\ncase.level = 1\nflux.variant = rusanov\nkrylov.method = bicgstab\nflux.c_alpha = 0.5\n").unwrap();
        assert_eq!(c.mesh, MeshSource::Structured(tgv2d(1).mesh));
        assert_eq!(c.settings.flux.variant, FluxVariant::Rusanov);
        assert_eq!(c.settings.krylov.method, KrylovMethod::Bicgstab);
        assert_eq!(c.settings.flux.c_alpha, 0.5);
        assert_eq!(c.controls, tgv2d(1).controls);
        assert_eq!(c.exact, Some(ExactSolution::TaylorGreen));
        assert!(config("case = cavity\ncase.level = 1\n").is_err());
    }

    #[test]
    fn overrides_replace_file_values() {
        let mut m = ConfigMap::parse("case = stokes1\ntime.t_end = 1\n", "a").unwrap();
        m.set("time.t_end=0.5").unwrap();
        m.set("physics.mu = 0.02").unwrap();
        assert!(m.set("no equals sign").is_err());
        let c = RunConfig::from_map(&m, Path::new(".")).unwrap();
        assert_eq!(c.controls.t_end, 0.5);
        assert_eq!(c.settings.flux.mu, 0.02);
        m.set("time.dt=-1").unwrap();
        let e = RunConfig::from_map(&m, Path::new(".")).unwrap_err().to_string();
        assert!(e.starts_with("configuration error"), "{e}");
    }

    #[test]
    fn custom_run_needs_mesh_bcs_and_time() {
        let full = "mesh.nx = 4\nmesh.ny = 4\nmesh.domain = 0 1 0 1\nbc.1 = no_slip\nbc.2 = no_slip\nbc.3 = dirichlet 1 0\nbc.4 = no_slip\ntime.cfl = 10\ntime.dt_max = 0.5\ntime.t_end = 2\nphysics.mu = 0.01\n";
        let c = config(full).unwrap();
        assert_eq!(c.label, "custom");
        assert_eq!(c.controls.mode, TimeMode::Cfl { cfl: 10.0, dt_max: 0.5 });
        assert!(c.simulation().is_ok());
        assert!(config(&full.replace("mesh.nx = 4\n", "")).unwrap_err().to_string().contains("no mesh"));
        assert!(config(&full.replace("time.t_end = 2\n", "")).is_err());
        let cut: String = full.lines().filter(|l| !l.starts_with("bc.")).map(|l| format!("{l}\n")).collect();
        assert!(config(&cut).unwrap_err().to_string().contains("no boundary conditions"));
        // tag 4 missing from the map
        let e = config(&full.replace("bc.4 = no_slip\n", "")).unwrap().simulation().err().unwrap().to_string();
        assert!(e.contains('4'), "{e}");
    }

    #[test]
    fn boundary_condition_syntax() {
        assert!(matches!(parse_boundary_condition("no_slip"), Ok(BoundaryCondition::NoSlip)));
        assert!(matches!(
            parse_boundary_condition("pressure_inlet 1.5"),
            Ok(BoundaryCondition::PressureInlet { velocity: None, .. })
        ));
        assert!(matches!(
            parse_boundary_condition("pressure_inlet 1.5 1 0"),
            Ok(BoundaryCondition::PressureInlet { velocity: Some(_), .. })
        ));
        match parse_boundary_condition("periodic 2 -6.25 0").unwrap() {
            BoundaryCondition::Periodic { partner, offset } => assert_eq!((partner, offset), (2, Vec2::new(-6.25, 0.0))),
            other => panic!("{other:?}"),
        }
        assert!(parse_boundary_condition("dirichlet 1").is_err());
        assert!(parse_boundary_condition("no_slip 3").is_err());
        assert!(parse_boundary_condition("outflow").is_err());
        assert!(parse_boundary_condition("").is_err());
    }

    #[test]
    fn output_schedule() {
        let c = config("case = tgv2d\noutput.dir = out\noutput.every = 5\noutput.probes = 1 2; 3 4\noutput.probe_fields = pressure\n").unwrap();
        assert_eq!(c.output.dir, Path::new("/work/out"));
        assert_eq!(c.output.fields, FieldCadence::Steps(5));
        assert_eq!(c.output.probes, vec![Vec2::new(1.0, 2.0), Vec2::new(3.0, 4.0)]);
        assert_eq!(c.output.probe_fields, vec![ProbeField::Pressure]);
        assert!(c.output.field_due(10, 0.0, 0.0) && !c.output.field_due(11, 0.0, 0.0));
        assert!(config("case = tgv2d\noutput.every = 0\n").is_err());
        assert!(config("case = tgv2d\noutput.interval = -1\n").is_err());
        assert!(config("case = tgv2d\noutput.probes = 1\n").is_err());
        let s = OutputSchedule {
            fields: FieldCadence::Interval(0.1),
            ..OutputSchedule::default()
        };
        assert!(!s.field_due(1, 0.05, 0.0) && s.field_due(2, 0.1, 0.0));
    }
}
