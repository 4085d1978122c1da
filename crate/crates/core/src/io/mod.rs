//! Mesh files, run configuration, VTK fields and CSV tables.

pub mod config;
pub mod mesh;
pub mod run;
pub mod tables;
pub mod vtk;

pub use config::{parse_boundary_condition, ConfigMap, FieldCadence, MeshSource, OutputSchedule, RunConfig};
pub use mesh::{format_mesh, parse_mesh, read_mesh, write_mesh};
pub use run::{run_config, RunOutcome};
pub use tables::{
    format_centerline_csv, format_error_csv, format_profile_csv, write_centerline_csv, write_error_csv, write_monitors_csv, write_profile_csv, MonitorWriter, ProbeField,
    ProbeSample, ProbeWriter,
};
pub use vtk::{format_vtk, vertex_momentum, write_vtk};
