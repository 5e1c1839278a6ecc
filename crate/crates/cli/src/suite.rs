//! The shipped configurations, run as one certificate suite.

use std::path::Path;
use std::thread;

use crate::config::{parse_entries, RunConfig};
use crate::error::{CliError, CliResult};
use crate::run::{self, Outcome};

pub const DEFAULT_CONFIGS: &[(&str, &str)] = &[
    ("disk_isotropic", include_str!("../../../configs/disk_isotropic.conf")),
    ("ellipse_anisotropic", include_str!("../../../configs/ellipse_anisotropic.conf")),
    ("dirichlet_ellipse", include_str!("../../../configs/dirichlet_ellipse.conf")),
    ("grim_reaper", include_str!("../../../configs/grim_reaper.conf")),
];

/// Runs every shipped configuration concurrently, each in its own
/// subdirectory of `out`. `overrides` are applied on top of each file.
pub fn run_all(out: &Path, overrides: &[(String, String)]) -> Vec<(&'static str, CliResult<Outcome>)> {
    thread::scope(|s| {
        let handles: Vec<_> = DEFAULT_CONFIGS
            .iter()
            .map(|&(name, text)| {
                let dir = out.join(name);
                (name, s.spawn(move || -> CliResult<Outcome> {
                    let mut entries = parse_entries(text)?;
                    entries.extend(overrides.iter().cloned());
                    let cfg = RunConfig::from_entries(entries)?;
                    run::verify(&cfg, &dir)
                }))
            })
            .collect();
        handles
            .into_iter()
            .map(|(name, h)| (name, h.join().unwrap_or_else(|_| Err(CliError::Internal(format!("{name}: worker panicked"))))))
            .collect()
    })
}
