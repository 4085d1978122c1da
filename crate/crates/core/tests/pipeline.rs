use std::f64::consts::PI;
use std::sync::Arc;

use staggered_ns::bench::{sample_momentum, taylor_green, tgv2d};
use staggered_ns::driver::SolverSettings;
use staggered_ns::io::{format_mesh, parse_mesh, read_mesh, run_config, write_mesh, RunConfig};
use staggered_ns::meshcore::{generate_structured_triangulation, Meshes, Rectangle, SideTags};
use staggered_ns::Vec2;

fn columns(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn mesh_file_config_runs_channel() {
    let dir = tempfile::tempdir().unwrap();
    let primal = generate_structured_triangulation(8, 4, Rectangle::new(0.0, 2.0, -0.5, 0.5), SideTags::default()).unwrap();
    write_mesh(&primal, &dir.path().join("channel.mesh")).unwrap();
    let cfg_text = "\
mesh.file = channel.mesh
physics.mu = 0.1
[time]
dt = 0.05
t_end = 0.5
[bc]
1 = no_slip
3 = no_slip
4 = pressure_inlet 0.8
2 = pressure_outlet 0
[output]
dir = out
every = 5
probes = 1 0
probe_fields = velocity, pressure
";
    let cfg_path = dir.path().join("channel.cfg");
    std::fs::write(&cfg_path, cfg_text).unwrap();
    let cfg = RunConfig::load(&cfg_path, &["flux.order=1".to_string()]).unwrap();
    let outcome = run_config(&cfg).unwrap();
    assert_eq!(outcome.summary.steps, 10);
    assert_eq!(outcome.fields.len(), 3);
    for f in &outcome.fields {
        let vtk = std::fs::read_to_string(f).unwrap();
        assert!(vtk.starts_with("# vtk DataFile Version"));
    }

    let (header, rows) = columns(&std::fs::read_to_string(dir.path().join("out/monitors.csv")).unwrap());
    assert_eq!(header[0], "step");
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r.iter().all(|v| v.is_finite())));

    // flow is driven from the left, so the probe sees positive u1 and a pressure between the ends
    let (header, rows) = columns(&std::fs::read_to_string(dir.path().join("out/probes.csv")).unwrap());
    assert_eq!(header, ["step", "t", "probe", "x1", "x2", "u1", "u2", "p"]);
    let last = rows.last().unwrap();
    assert!(last[5] > 0.0, "{last:?}");
    assert!(last[7] > 0.0 && last[7] < 0.8, "{last:?}");
}

#[test]
fn inviscid_tgv_monitor_energy_does_not_grow() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("tgv.cfg");
    std::fs::write(&cfg_path, "case = tgv2d\nflux.c_alpha = 0.5\noutput.dir = out\n").unwrap();
    let cfg = RunConfig::load(&cfg_path, &[]).unwrap();
    run_config(&cfg).unwrap();
    let (header, rows) = columns(&std::fs::read_to_string(dir.path().join("out/monitors.csv")).unwrap());
    let k = header.iter().position(|h| h == "kinetic_energy").unwrap();
    assert_eq!(rows.len(), 20);
    for pair in rows.windows(2) {
        assert!(pair[1][k] <= pair[0][k] * (1.0 + 1e-8));
    }
}

#[test]
fn mesh_text_round_trip_preserves_structure() {
    let dir = tempfile::tempdir().unwrap();
    let mut primal = generate_structured_triangulation(5, 3, Rectangle::new(-1.0, 1.3, 0.0, 0.7), SideTags::default()).unwrap();
    for (i, v) in primal.vertices.iter_mut().enumerate() {
        if v.x > -1.0 && v.x < 1.3 && v.y > 0.0 && v.y < 0.7 {
            v.x += 0.01 * (i % 3) as f64;
        }
    }
    let path = dir.path().join("m.mesh");
    write_mesh(&primal, &path).unwrap();
    let back = read_mesh(&path).unwrap();
    assert_eq!(back.vertices, primal.vertices);
    assert_eq!(back.triangles, primal.triangles);
    assert_eq!(back.boundary_edges, primal.boundary_edges);
    assert_eq!(format_mesh(&parse_mesh(&format_mesh(&back), "m").unwrap()), format_mesh(&primal));
    let a = Meshes::build(primal).unwrap();
    let b = Meshes::build(back).unwrap();
    assert_eq!(a.n_cells(), b.n_cells());
    assert_eq!(a.geometry.cell_volume, b.geometry.cell_volume);
}

#[test]
fn periodic_translation_by_one_cell() {
    // on the periodic grid a shift by one spacing maps the mesh to itself
    let h = 2.0 * PI / 16.0;
    let settings = SolverSettings::default();
    let base = tgv2d(0);
    let mut shifted = tgv2d(0);
    shifted.initial = Arc::new(move |x: Vec2| taylor_green(x - Vec2::new(h, 0.0)));
    let mut a = base.simulation(&settings).unwrap();
    let mut b = shifted.simulation(&settings).unwrap();
    a.run(&mut |_, _| Ok(())).unwrap();
    b.run(&mut |_, _| Ok(())).unwrap();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for k in 0..40 {
        let x = Vec2::new(1.0 + 0.11 * k as f64, 0.4 + 0.13 * k as f64);
        let ua = sample_momentum(&a.state.w, &a.meshes, x).unwrap();
        let ub = sample_momentum(&b.state.w, &b.meshes, x + Vec2::new(h, 0.0)).unwrap();
        worst = worst.max((ua - ub).norm());
        scale = scale.max(ua.norm());
    }
    assert!(worst < 1e-8 * scale, "{worst} vs {scale}");
}
