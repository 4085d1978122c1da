use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use staggered_ns::bench::{
    cavity_check, convergence_study, mesh_size, poiseuille_check, stokes_check, tgv2d, womersley_check, CaseName, ProfileCheck,
    ProfileRow,
};
use staggered_ns::driver::SolverSettings;
use staggered_ns::io::{read_mesh, run_config, write_centerline_csv, write_error_csv, write_monitors_csv, write_profile_csv, RunConfig};
use staggered_ns::krylov::KrylovMethod;
use staggered_ns::meshcore::Meshes;
use staggered_ns::transport::FluxVariant;
use staggered_ns::Result;

#[derive(Parser)]
#[command(name = "staggered-ns", version, about = "Implicit staggered FV/FE incompressible Navier-Stokes solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Numerics {
    /// Convective flux (ducros or rusanov).
    #[arg(long)]
    flux: Option<FluxVariant>,
    /// Spatial order (1 or 2).
    #[arg(long)]
    order: Option<u8>,
    /// Krylov method for the momentum system (gmres or bicgstab).
    #[arg(long)]
    krylov: Option<KrylovMethod>,
}

impl Numerics {
    fn overrides(&self) -> Vec<String> {
        let mut v = Vec::new();
        if let Some(f) = self.flux {
            v.push(format!("flux.variant={}", flux_name(f)));
        }
        if let Some(o) = self.order {
            v.push(format!("flux.order={o}"));
        }
        if let Some(k) = self.krylov {
            v.push(format!("krylov.method={}", krylov_name(k)));
        }
        v
    }

    fn settings(&self) -> SolverSettings {
        let mut s = SolverSettings::default();
        s.flux.variant = self.flux.unwrap_or(s.flux.variant);
        s.flux.order = self.order.unwrap_or(s.flux.order);
        s.krylov.method = self.krylov.unwrap_or(s.krylov.method);
        s
    }
}

fn flux_name(f: FluxVariant) -> &'static str {
    match f {
        FluxVariant::Ducros => "ducros",
        FluxVariant::Rusanov => "rusanov",
    }
}

fn krylov_name(k: KrylovMethod) -> &'static str {
    match k {
        KrylovMethod::Gmres => "gmres",
        KrylovMethod::Bicgstab => "bicgstab",
        KrylovMethod::Cg => "cg",
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the simulation described by a config file.
    Run {
        config: PathBuf,
        /// Override a config key, e.g. --set time.t_end=0.5 (repeatable).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[command(flatten)]
        numerics: Numerics,
    },
    /// Print size and quality statistics of a mesh file.
    MeshInfo { mesh: PathBuf },
    /// Run a benchmark case and compare with its exact or reference solution.
    Bench {
        case: CaseName,
        /// Number of refinement levels for tgv2d.
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[command(flatten)]
        numerics: Numerics,
        /// Directory for CSV outputs.
        #[arg(long, default_value = "bench-output")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, set, numerics } => run(&config, set, &numerics),
        Command::MeshInfo { mesh } => mesh_info(&mesh),
        Command::Bench {
            case,
            levels,
            numerics,
            out,
        } => bench(case, levels, &numerics, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}

fn run(config: &Path, mut set: Vec<String>, numerics: &Numerics) -> Result<()> {
    set.extend(numerics.overrides());
    let cfg = RunConfig::load(config, &set)?;
    let outcome = run_config(&cfg)?;
    println!(
        "{}: {} steps to t = {:.6e}{}",
        cfg.label,
        outcome.summary.steps,
        outcome.summary.t,
        if outcome.summary.steady { " (steady)" } else { "" }
    );
    if let Some(r) = &outcome.last {
        println!(
            "final: kinetic energy {:.6e}, divergence {:.3e}, newton {}, krylov {}",
            r.kinetic_energy, r.divergence_norm, r.newton_iters, r.krylov_iters
        );
    }
    println!("outputs in {}", cfg.output.dir.display());
    Ok(())
}

fn mesh_info(path: &Path) -> Result<()> {
    let primal = read_mesh(path)?;
    let mut tags: BTreeMap<u32, usize> = BTreeMap::new();
    for e in &primal.boundary_edges {
        *tags.entry(e.tag).or_default() += 1;
    }
    let meshes = Meshes::build(primal)?;
    let g = &meshes.geometry;
    println!("vertices        {}", meshes.primal.vertices.len());
    println!("triangles       {}", meshes.primal.triangles.len());
    println!("boundary edges  {}", meshes.primal.boundary_edges.len());
    println!("dual cells      {}", meshes.n_cells());
    println!("area            {:.10e}", g.domain_area);
    println!("longest edge    {:.6e}", mesh_size(&meshes));
    let (rmin, rmax) = g.incircle_radius.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    println!("cell incircle   {rmin:.6e} .. {rmax:.6e}");
    for (tag, n) in tags {
        println!("tag {tag:<4}        {n} edges");
    }
    Ok(())
}

fn write_profiles(case: CaseName, checks: &[&ProfileCheck], dir: &Path) -> Result<()> {
    let rows: Vec<ProfileRow> = checks.iter().flat_map(|c| c.rows.iter().copied()).collect();
    write_profile_csv(&case.to_string(), &rows, &dir.join(format!("{case}_profiles.csv")))
}

fn bench(case: CaseName, levels: usize, numerics: &Numerics, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let settings = numerics.settings();
    match case {
        CaseName::Tgv2d => {
            let lv: Vec<usize> = (0..levels).collect();
            let report = convergence_study("tgv2d", tgv2d, &lv, &settings)?;
            println!("level        h          E_p          E_W   rate_p   rate_W  steps");
            for r in &report.rows {
                let rate = |v: Option<f64>| v.map(|x| format!("{x:8.3}")).unwrap_or_else(|| "       -".into());
                println!(
                    "{:5} {:10.4e} {:12.4e} {:12.4e} {} {} {:6}",
                    r.level,
                    r.h,
                    r.e_p,
                    r.e_w,
                    rate(r.rate_p),
                    rate(r.rate_w),
                    r.steps
                );
            }
            if let Some((l, m)) = &report.failure {
                println!("level {l} failed: {m}");
            }
            write_error_csv(&report, &out.join("tgv2d_errors.csv"))?;
        }
        CaseName::Stokes1 => {
            let run = stokes_check(1e-2, &settings)?;
            println!("stokes1: max error {:.3e} ({:.2}% of amplitude)", run.checks.max_error, 100.0 * run.checks.relative_error());
            write_profiles(case, &[&run.checks], out)?;
            write_monitors_csv(&run.history, &out.join("stokes1_monitors.csv"))?;
        }
        CaseName::Womersley => {
            let run = womersley_check(60, &settings)?;
            for c in &run.checks {
                println!("womersley t = {:.2}: max error {:.2}% of peak", c.t, 100.0 * c.relative_error());
            }
            write_profiles(case, &run.checks.iter().collect::<Vec<_>>(), out)?;
            write_monitors_csv(&run.history, &out.join("womersley_monitors.csv"))?;
        }
        CaseName::Poiseuille2d => {
            let run = poiseuille_check(20, &settings)?;
            println!(
                "poiseuille2d: {} steps, steady {}, max error {:.2}% of centerline speed",
                run.summary.steps,
                run.summary.steady,
                100.0 * run.checks.relative_error()
            );
            write_profiles(case, &[&run.checks], out)?;
            write_monitors_csv(&run.history, &out.join("poiseuille2d_monitors.csv"))?;
        }
        CaseName::Cavity => {
            let run = cavity_check(38, 1e-2, 100.0, &settings, 0.05, 0.03)?;
            let fails = run.checks.iter().filter(|d| !d.passes()).count();
            println!(
                "cavity: {} steps, steady {}, {} of {} centerline points within tolerance",
                run.summary.steps,
                run.summary.steady,
                run.checks.len() - fails,
                run.checks.len()
            );
            write_centerline_csv(&run.checks, &out.join("cavity_centerlines.csv"))?;
            write_monitors_csv(&run.history, &out.join("cavity_monitors.csv"))?;
        }
    }
    println!("outputs in {}", out.display());
    Ok(())
}
