use crate::error::{Error, Result};
use crate::meshcore::{locate_point, Meshes};
use crate::transport::field::cell;
use crate::Vec2;

/// Momentum at `x` from the CR interpolant of `w`. Points on the boundary
/// take the mean of the cells of the boundary edges through them, which carry
/// the boundary trace for strongly imposed walls.
pub fn sample_momentum(w: &[f64], meshes: &Meshes, x: Vec2) -> Result<Vec2> {
    let (mut acc, mut count) = (Vec2::zeros(), 0usize);
    for (c, cellm) in meshes.dual.cells.iter().enumerate() {
        if let Some(e) = cellm.boundary_edge {
            let [a, b] = meshes.primal.boundary_edges[e].vertices;
            let (pa, pb) = (meshes.primal.vertices[a], meshes.primal.vertices[b]);
            let d = pb - pa;
            let s = (x - pa).dot(&d) / d.norm_squared();
            let tol = 1e-10;
            if (pa + s * d - x).norm() <= tol * d.norm() && (-tol..=1.0 + tol).contains(&s) {
                acc += cell(w, c);
                count += 1;
            }
        }
    }
    if count > 0 {
        return Ok(acc / count as f64);
    }
    let (k, lam) = locate_point(&meshes.primal, &meshes.geometry, x)
        .ok_or_else(|| Error::InvalidArgument(format!("sample point ({}, {}) lies outside the mesh", x.x, x.y)))?;
    let tc = meshes.dual.triangle_cells[k];
    let mut u = Vec2::zeros();
    for l in 0..3 {
        u += (1.0 - 2.0 * lam[(l + 2) % 3]) * cell(w, tc[l]);
    }
    Ok(u)
}

/// P1 pressure at `x`.
pub fn sample_pressure(p: &[f64], meshes: &Meshes, x: Vec2) -> Result<f64> {
    let (k, lam) = locate_point(&meshes.primal, &meshes.geometry, x)
        .ok_or_else(|| Error::InvalidArgument(format!("sample point ({}, {}) lies outside the mesh", x.x, x.y)))?;
    let t = meshes.primal.triangles[k];
    Ok((0..3).map(|l| lam[l] * p[meshes.dual.vertex_dofs[t[l]]]).sum())
}

/// Velocity samples along a straight segment.
pub fn sample_line(w: &[f64], meshes: &Meshes, rho: f64, from: Vec2, to: Vec2, n: usize) -> Result<Vec<(Vec2, Vec2)>> {
    (0..n)
        .map(|k| {
            let s = if n > 1 { k as f64 / (n - 1) as f64 } else { 0.0 };
            let x = from + s * (to - from);
            Ok((x, sample_momentum(w, meshes, x)? / rho))
        })
        .collect()
}

/// One reference point of a centerline profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferencePoint {
    /// Coordinate along the cut.
    pub s: f64,
    pub value: f64,
}

/// Digitized centerline velocities of the Re = 100 driven cavity.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityReference {
    /// `u_1(x_2)` on `x_1 = 0.5`.
    pub u: Vec<ReferencePoint>,
    /// `u_2(x_1)` on `x_2 = 0.5`.
    pub v: Vec<ReferencePoint>,
}

const GHIA_RE100: &str = include_str!("../../data/ghia_re100.csv");

/// Parses the bundled fixture (`profile,coordinate,value` rows).
pub fn ghia_re100() -> Result<CavityReference> {
    parse_reference(GHIA_RE100)
}

pub fn parse_reference(text: &str) -> Result<CavityReference> {
    let mut out = CavityReference { u: Vec::new(), v: Vec::new() };
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("profile") {
            continue;
        }
        let bad = |m: &str| Error::Parse {
            path: "ghia_re100.csv".into(),
            line: ln + 1,
            message: m.into(),
        };
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 3 {
            return Err(bad("expected 3 fields"));
        }
        let s: f64 = f[1].parse().map_err(|_| bad("bad coordinate"))?;
        let value: f64 = f[2].parse().map_err(|_| bad("bad value"))?;
        match f[0] {
            "u" => out.u.push(ReferencePoint { s, value }),
            "v" => out.v.push(ReferencePoint { s, value }),
            _ => return Err(bad("profile must be u or v")),
        }
    }
    Ok(out)
}

/// Comparison of one numerical sample with the reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileDeviation {
    /// `'u'` for the vertical cut, `'v'` for the horizontal one.
    pub profile: char,
    pub s: f64,
    pub reference: f64,
    pub numerical: f64,
    pub tolerance: f64,
}

impl ProfileDeviation {
    pub fn passes(&self) -> bool {
        (self.numerical - self.reference).abs() <= self.tolerance
    }
}

/// Centerline comparison with tolerance `max(rel |ref|, abs)`.
pub fn compare_cavity(w: &[f64], meshes: &Meshes, rho: f64, reference: &CavityReference, rel: f64, abs: f64) -> Result<Vec<ProfileDeviation>> {
    let mut out = Vec::new();
    for p in &reference.u {
        let u = sample_momentum(w, meshes, Vec2::new(0.5, p.s))? / rho;
        out.push(ProfileDeviation {
            profile: 'u',
            s: p.s,
            reference: p.value,
            numerical: u.x,
            tolerance: (rel * p.value.abs()).max(abs),
        });
    }
    for p in &reference.v {
        let u = sample_momentum(w, meshes, Vec2::new(p.s, 0.5))? / rho;
        out.push(ProfileDeviation {
            profile: 'v',
            s: p.s,
            reference: p.value,
            numerical: u.y,
            tolerance: (rel * p.value.abs()).max(abs),
        });
    }
    Ok(out)
}
