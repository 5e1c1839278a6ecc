//! File emission. Floats are written with `{}` (shortest round-trip form),
//! so identical runs give byte-identical files.

use std::fmt::{Display, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use capflow_core::geometry::Mesh;
use capflow_core::solver::Trajectory;
use capflow_core::verify::Certificate;

use crate::error::{CliError, CliResult};

pub const TRAJECTORY_HEADER: &str = "t,sup_du,sup_ut,osc,mean_ut";
pub const CERTIFICATE_HEADER: &str = "name,bound,measured,margin,pass";

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(CliError::io(path))
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))
}

pub fn write_trajectory(dir: &Path, traj: &Trajectory) -> CliResult<PathBuf> {
    let mut s = String::from(TRAJECTORY_HEADER);
    s.push('\n');
    for x in &traj.samples {
        let _ = writeln!(s, "{},{},{},{},{}", x.t, x.sup_du, x.sup_ut, x.osc, x.mean_ut);
    }
    let path = dir.join("trajectory.csv");
    write(&path, &s)?;
    Ok(path)
}

/// One row per node; `column` names the value (`u` for snapshots).
pub fn write_field(path: &Path, mesh: &Mesh, column: &str, u: &[f64]) -> CliResult<()> {
    let mut s = format!("r,phi,x,y,{column}\n");
    for (i, v) in u.iter().enumerate() {
        let (r, phi) = mesh.polar(i);
        let [x, y] = mesh.xy(i);
        let _ = writeln!(s, "{r},{phi},{x},{y},{v}");
    }
    write(path, &s)
}

pub fn write_certificates(dir: &Path, certs: &[Certificate]) -> CliResult<PathBuf> {
    let mut s = String::from(CERTIFICATE_HEADER);
    s.push('\n');
    for c in certs {
        let _ = writeln!(s, "{},{},{},{},{}", c.name, c.bound, c.measured, c.margin, c.status);
    }
    let path = dir.join("certificates.csv");
    write(&path, &s)?;
    Ok(path)
}

/// Ordered `key = value` lines.
#[derive(Debug, Default, Clone)]
pub struct Manifest {
    lines: Vec<(String, String)>,
}

impl Manifest {
    pub fn push(&mut self, key: impl Into<String>, value: impl Display) {
        self.lines.push((key.into(), value.to_string()));
    }

    pub fn certificate(&mut self, c: &Certificate) {
        let p = format!("certificate.{}", c.name);
        self.push(format!("{p}.status"), c.status);
        self.push(format!("{p}.bound"), c.bound);
        self.push(format!("{p}.measured"), c.measured);
        self.push(format!("{p}.margin"), c.margin);
        for (k, v) in &c.constants {
            self.push(format!("{p}.{k}"), v);
        }
        if !c.note.is_empty() {
            self.push(format!("{p}.note"), c.note.replace('\n', " "));
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.lines {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    /// Writes via a temporary file and a rename, so a reader never sees a
    /// partial manifest.
    pub fn write_atomic(&self, dir: &Path) -> CliResult<PathBuf> {
        let path = dir.join("manifest.txt");
        let tmp = dir.join(".manifest.txt.tmp");
        write(&tmp, &self.render())?;
        fs::rename(&tmp, &path).map_err(CliError::io(&path))?;
        Ok(path)
    }
}

fn color(t: f64) -> String {
    // Blue → white → red.
    let t = t.clamp(0.0, 1.0);
    let (r, g, b) = if t < 0.5 {
        let s = t / 0.5;
        (s, s, 1.0)
    } else {
        let s = (1.0 - t) / 0.5;
        (1.0, s, s)
    };
    format!("#{:02x}{:02x}{:02x}", (r * 255.0) as u8, (g * 255.0) as u8, (b * 255.0) as u8)
}

/// A scatter heat map of `u` over the nodes (a profile curve on intervals).
pub fn write_svg(path: &Path, mesh: &Mesh, u: &[f64], title: &str) -> CliResult<()> {
    const SIZE: f64 = 400.0;
    const PAD: f64 = 20.0;
    let lo = u.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let pts: Vec<[f64; 2]> = (0..u.len()).map(|i| mesh.xy(i)).collect();
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{w}\" viewBox=\"0 0 {w} {w}\">\n\
         <title>{title} (u in [{lo}, {hi}])</title>\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        w = SIZE + 2.0 * PAD
    );
    if mesh.dim() == 1 {
        let xmax = pts.iter().map(|p| p[0].abs()).fold(0.0, f64::max).max(1e-12);
        let mut d = String::new();
        for (p, v) in pts.iter().zip(u) {
            let x = PAD + SIZE * (p[0] / xmax + 1.0) / 2.0;
            let y = PAD + SIZE * (1.0 - (v - lo) / span);
            let _ = write!(d, "{}{x:.2},{y:.2}", if d.is_empty() { "M" } else { " L" });
        }
        let _ = writeln!(s, "<path d=\"{d}\" fill=\"none\" stroke=\"black\"/>");
    } else {
        let ext = pts.iter().map(|p| p[0].abs().max(p[1].abs())).fold(0.0, f64::max).max(1e-12);
        let radius = (SIZE / (u.len() as f64).sqrt() / 2.0).max(1.5);
        for (p, v) in pts.iter().zip(u) {
            let x = PAD + SIZE * (p[0] / ext + 1.0) / 2.0;
            let y = PAD + SIZE * (1.0 - (p[1] / ext + 1.0) / 2.0);
            let _ = writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{radius:.2}\" fill=\"{}\"/>", color((v - lo) / span));
        }
    }
    s.push_str("</svg>\n");
    write(path, &s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_renders_in_insertion_order() {
        let mut m = Manifest::default();
        m.push("b", 1.5);
        m.push("a", "x");
        assert_eq!(m.render(), "b = 1.5\na = x\n");
    }

    #[test]
    fn palette_endpoints() {
        assert_eq!(color(0.0), "#0000ff");
        assert_eq!(color(1.0), "#ff0000");
        assert_eq!(color(0.5), "#ffffff");
    }
}
