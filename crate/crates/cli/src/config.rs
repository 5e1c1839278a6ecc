//! Flat `key = value` run configuration with dotted section prefixes.

use std::collections::BTreeMap;
use std::fmt;

use capflow_core::anisotropy::{AnisotropySpec, MobilitySpec, Quadratic};
use capflow_core::geometry::ContactAngleField;
use capflow_core::solver::{DirichletProfile, SolverConfig};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ParseError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.key) {
            (Some(l), Some(k)) => write!(f, "line {l}, key `{k}`: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "key `{k}`: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

fn err(key: &str, message: impl Into<String>) -> ParseError {
    ParseError { line: None, key: Some(key.to_string()), message: message.into() }
}

/// Every accepted key with its default (empty: unset).
const KEYS: &[(&str, &str)] = &[
    ("problem.domain", "disk"),
    ("problem.radius", "1"),
    ("problem.semi_axes", "2,1"),
    ("problem.half_length", "1"),
    ("problem.boundary", "contact"),
    ("problem.theta", "const:1.5707963267948966"),
    ("problem.theta_right", ""),
    ("problem.dirichlet", "zero"),
    ("problem.dirichlet_rate", "0"),
    ("problem.anisotropy", "isotropic"),
    ("problem.q_matrix", ""),
    ("problem.tau", ""),
    ("problem.anisotropy_scale", "1"),
    ("problem.mobility", "isotropic"),
    ("problem.mobility_q_matrix", ""),
    ("problem.mobility_scale", "1"),
    ("solver.grid_nr", "8"),
    ("solver.grid_nphi", "16"),
    ("solver.sigma", "0.4"),
    ("solver.t_end", "1"),
    ("solver.max_steps", "50000000"),
    ("solver.steady_tol", "1e-6"),
    ("solver.steady_window", "100"),
    ("solver.relax_tol", "1e-7"),
    ("solver.relax_max_time", "200"),
    ("solver.eps_schedule", "0.1,0.03,0.01,0.003"),
    ("solver.lambda_tol", "1e-4"),
    ("solver.compat_tol", "1e-6"),
    ("initial.kind", "random:0.3"),
    ("initial.seed", "0"),
    ("output.dir", "out"),
    ("output.snapshot_times", ""),
    ("output.csv_every", "10"),
    ("output.svg", "false"),
    ("verify.seeds", "3"),
    ("verify.max_time", "100"),
];

#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    Disk(f64),
    Ellipse(f64, f64),
    /// `[-L, L]`.
    Interval(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundarySpec {
    Contact { theta: ContactAngleField, theta_right: Option<f64> },
    Dirichlet { profile: DirichletProfile, rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialSpec {
    Zero,
    Random { amplitude: f64 },
    Bump { center: [f64; 2], radius: f64, height: f64 },
}

/// A validated run configuration. `entries` keeps the raw text of every
/// key (defaults filled in) so manifests can echo it verbatim.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub entries: BTreeMap<String, String>,
    pub domain: DomainSpec,
    pub boundary: BoundarySpec,
    pub anisotropy: AnisotropySpec,
    pub mobility: MobilitySpec,
    pub n_r: usize,
    pub n_phi: usize,
    pub t_end: f64,
    pub solver: SolverConfig,
    pub initial: InitialSpec,
    pub seed: u64,
    pub out_dir: String,
    pub svg: bool,
    pub verify_seeds: usize,
    pub verify_max_time: f64,
}

/// Splits `text` into `key → value`. A file whose keys all start with
/// `config.` (a run manifest) contributes only those keys, prefix removed;
/// other manifest keys are ignored.
pub fn parse_entries(text: &str) -> Result<BTreeMap<String, String>, ParseError> {
    let mut raw: Vec<(usize, String, String)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ParseError { line: Some(i + 1), key: None, message: format!("expected `key = value`, got `{line}`") });
        };
        raw.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    let manifest = raw.iter().any(|(_, k, _)| k.starts_with("config."));
    let mut map = BTreeMap::new();
    for (line, k, v) in raw {
        let key = if manifest {
            match k.strip_prefix("config.") {
                Some(rest) => rest.to_string(),
                None => continue,
            }
        } else {
            k
        };
        if !KEYS.iter().any(|(name, _)| *name == key) {
            return Err(ParseError { line: Some(line), key: Some(key), message: "unknown key".into() });
        }
        if map.insert(key.clone(), v).is_some() {
            return Err(ParseError { line: Some(line), key: Some(key), message: "duplicate key".into() });
        }
    }
    Ok(map)
}

fn num<T: std::str::FromStr>(key: &str, s: &str) -> Result<T, ParseError> {
    s.trim().parse().map_err(|_| err(key, format!("cannot parse `{s}` as a number")))
}

fn positive(key: &str, s: &str) -> Result<f64, ParseError> {
    let v: f64 = num(key, s)?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(err(key, format!("must be positive, got {v}")));
    }
    Ok(v)
}

pub fn number_list(key: &str, s: &str) -> Result<Vec<f64>, ParseError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| num(key, x)).collect()
}

/// `family:arg:arg…` split into family and numeric arguments.
fn tagged(key: &str, s: &str) -> Result<(String, Vec<f64>), ParseError> {
    let mut it = s.split(':');
    let tag = it.next().unwrap_or("").trim().to_string();
    let args = it.map(|x| num(key, x)).collect::<Result<Vec<f64>, _>>()?;
    Ok((tag, args))
}

fn arity(key: &str, tag: &str, args: &[f64], n: usize) -> Result<(), ParseError> {
    if args.len() != n {
        return Err(err(key, format!("`{tag}` takes {n} argument(s), got {}", args.len())));
    }
    Ok(())
}

fn q_matrix(key: &str, s: &str, n: usize) -> Result<Quadratic, ParseError> {
    let entries = number_list(key, s)?;
    if entries.len() != (n + 1) * (n + 1) {
        return Err(err(key, format!("expected {} row-major entries, got {}", (n + 1) * (n + 1), entries.len())));
    }
    Quadratic::new(n + 1, entries).map_err(|e| err(key, e.to_string()))
}

fn anisotropy(get: &dyn Fn(&str) -> String, n: usize) -> Result<AnisotropySpec, ParseError> {
    let f = match get("problem.anisotropy").as_str() {
        "isotropic" => AnisotropySpec::isotropic(n),
        "ellipsoidal" => AnisotropySpec::ellipsoidal(q_matrix("problem.q_matrix", &get("problem.q_matrix"), n)?)
            .map_err(|e| err("problem.q_matrix", e.to_string()))?,
        "interpolated" => {
            let tau: f64 = num("problem.tau", &get("problem.tau"))?;
            AnisotropySpec::interpolated(tau, q_matrix("problem.q_matrix", &get("problem.q_matrix"), n)?)
                .map_err(|e| err("problem.tau", e.to_string()))?
        }
        other => return Err(err("problem.anisotropy", format!("unknown anisotropy family `{other}`"))),
    };
    let scale = positive("problem.anisotropy_scale", &get("problem.anisotropy_scale"))?;
    f.scaled(scale).map_err(|e| err("problem.anisotropy_scale", e.to_string()))
}

fn mobility(get: &dyn Fn(&str) -> String, n: usize) -> Result<MobilitySpec, ParseError> {
    let key = "problem.mobility_q_matrix";
    let g = match get("problem.mobility").as_str() {
        "isotropic" => MobilitySpec::isotropic(n),
        "ellipsoidal" => MobilitySpec::ellipsoidal(q_matrix(key, &get(key), n)?).map_err(|e| err(key, e.to_string()))?,
        other => return Err(err("problem.mobility", format!("unknown mobility family `{other}`"))),
    };
    let scale = positive("problem.mobility_scale", &get("problem.mobility_scale"))?;
    g.scaled(scale).map_err(|e| err("problem.mobility_scale", e.to_string()))
}

fn contact_angle(key: &str, s: &str) -> Result<ContactAngleField, ParseError> {
    let (tag, a) = tagged(key, s)?;
    match tag.as_str() {
        "const" | "constant" => {
            arity(key, &tag, &a, 1)?;
            Ok(ContactAngleField::Constant(a[0]))
        }
        "sinusoid" => {
            arity(key, &tag, &a, 3)?;
            if a[2] < 0.0 || a[2].fract() != 0.0 {
                return Err(err(key, "sinusoid frequency must be a non-negative integer"));
            }
            Ok(ContactAngleField::Sinusoid { mean: a[0], amp: a[1], freq: a[2] as u32 })
        }
        other => Err(err(key, format!("unknown contact-angle field `{other}`"))),
    }
}

fn profile(key: &str, s: &str) -> Result<DirichletProfile, ParseError> {
    let (tag, a) = tagged(key, s)?;
    match tag.as_str() {
        "zero" => arity(key, &tag, &a, 0).map(|_| DirichletProfile::Zero),
        "affine" => arity(key, &tag, &a, 3).map(|_| DirichletProfile::Affine { a: a[0], b: a[1], c: a[2] }),
        "product" => arity(key, &tag, &a, 1).map(|_| DirichletProfile::Product { c: a[0] }),
        other => Err(err(key, format!("unknown Dirichlet profile `{other}`"))),
    }
}

impl RunConfig {
    #[cfg(test)]
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Self::from_entries(parse_entries(text)?)
    }

    /// Fills in defaults and interprets every key.
    pub fn from_entries(mut entries: BTreeMap<String, String>) -> Result<Self, ParseError> {
        for (k, v) in KEYS {
            entries.entry(k.to_string()).or_insert_with(|| v.to_string());
        }
        let get = |k: &str| entries[k].clone();

        let domain = match get("problem.domain").as_str() {
            "disk" => DomainSpec::Disk(positive("problem.radius", &get("problem.radius"))?),
            "ellipse" => {
                let ab = number_list("problem.semi_axes", &get("problem.semi_axes"))?;
                if ab.len() != 2 {
                    return Err(err("problem.semi_axes", "expected `a,b`"));
                }
                DomainSpec::Ellipse(ab[0], ab[1])
            }
            "interval" => DomainSpec::Interval(positive("problem.half_length", &get("problem.half_length"))?),
            other => return Err(err("problem.domain", format!("unknown domain `{other}`"))),
        };
        let n = if matches!(domain, DomainSpec::Interval(_)) { 1 } else { 2 };

        let boundary = match get("problem.boundary").as_str() {
            "contact" => {
                let theta = contact_angle("problem.theta", &get("problem.theta"))?;
                let right = get("problem.theta_right");
                let theta_right = if right.is_empty() { None } else { Some(num("problem.theta_right", &right)?) };
                if n == 1 && !theta.is_constant() {
                    return Err(err("problem.theta", "an interval takes constant angles"));
                }
                if n == 2 && theta_right.is_some() {
                    return Err(err("problem.theta_right", "only meaningful for interval domains"));
                }
                BoundarySpec::Contact { theta, theta_right }
            }
            "dirichlet" => {
                if n == 1 {
                    return Err(err("problem.boundary", "Dirichlet data needs a planar domain"));
                }
                BoundarySpec::Dirichlet {
                    profile: profile("problem.dirichlet", &get("problem.dirichlet"))?,
                    rate: num("problem.dirichlet_rate", &get("problem.dirichlet_rate"))?,
                }
            }
            other => return Err(err("problem.boundary", format!("expected `contact` or `dirichlet`, got `{other}`"))),
        };

        let anisotropy = anisotropy(&get, n)?;
        let mobility = mobility(&get, n)?;

        let solver = SolverConfig {
            sigma: num("solver.sigma", &get("solver.sigma"))?,
            sample_every: num("output.csv_every", &get("output.csv_every"))?,
            snapshot_times: number_list("output.snapshot_times", &get("output.snapshot_times"))?,
            max_steps: num("solver.max_steps", &get("solver.max_steps"))?,
            steady_tol: num("solver.steady_tol", &get("solver.steady_tol"))?,
            steady_window: num("solver.steady_window", &get("solver.steady_window"))?,
            relax_tol: num("solver.relax_tol", &get("solver.relax_tol"))?,
            relax_max_time: positive("solver.relax_max_time", &get("solver.relax_max_time"))?,
            eps_schedule: number_list("solver.eps_schedule", &get("solver.eps_schedule"))?,
            lambda_tol: num("solver.lambda_tol", &get("solver.lambda_tol"))?,
            compat_tol: num("solver.compat_tol", &get("solver.compat_tol"))?,
        };
        solver.validate().map_err(|e| err("solver", e.to_string()))?;

        let (tag, a) = tagged("initial.kind", &get("initial.kind"))?;
        let initial = match tag.as_str() {
            "zero" => arity("initial.kind", &tag, &a, 0).map(|_| InitialSpec::Zero)?,
            "random" => arity("initial.kind", &tag, &a, 1).map(|_| InitialSpec::Random { amplitude: a[0] })?,
            "bump" => arity("initial.kind", &tag, &a, 4)
                .map(|_| InitialSpec::Bump { center: [a[0], a[1]], radius: a[2], height: a[3] })?,
            other => return Err(err("initial.kind", format!("unknown initial data `{other}`"))),
        };

        let svg = match get("output.svg").as_str() {
            "true" => true,
            "false" => false,
            other => return Err(err("output.svg", format!("expected true or false, got `{other}`"))),
        };
        let verify_seeds: usize = num("verify.seeds", &get("verify.seeds"))?;
        if verify_seeds < 2 {
            return Err(err("verify.seeds", "at least two seeds are needed"));
        }
        Ok(Self {
            domain,
            boundary,
            anisotropy,
            mobility,
            n_r: num("solver.grid_nr", &get("solver.grid_nr"))?,
            n_phi: num("solver.grid_nphi", &get("solver.grid_nphi"))?,
            t_end: positive("solver.t_end", &get("solver.t_end"))?,
            solver,
            initial,
            seed: num("initial.seed", &get("initial.seed"))?,
            out_dir: get("output.dir"),
            svg,
            verify_seeds,
            verify_max_time: positive("verify.max_time", &get("verify.max_time"))?,
            entries,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c.domain, DomainSpec::Disk(1.0));
        assert_eq!((c.n_r, c.n_phi), (8, 16));
        assert_eq!(c.entries.len(), KEYS.len());
    }

    #[test]
    fn diagnostics_name_the_line_and_key() {
        let e = RunConfig::parse("# comment\nproblem.domain = disk\nsolver.bogus = 3\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert_eq!(e.key.as_deref(), Some("solver.bogus"));
        let e = RunConfig::parse("solver.sigma = fast").unwrap_err();
        assert_eq!(e.key.as_deref(), Some("solver.sigma"));
        let e = RunConfig::parse("no equals sign").unwrap_err();
        assert_eq!(e.line, Some(1));
        assert!(RunConfig::parse("problem.radius = 1\nproblem.radius = 2").is_err());
        let e = RunConfig::parse("problem.anisotropy = interpolated\nproblem.tau = 0.1\nproblem.q_matrix = 1,0,0,1").unwrap_err();
        assert_eq!(e.key.as_deref(), Some("problem.q_matrix"));
    }

    #[test]
    fn manifests_contribute_their_config_echo() {
        let text = "config.problem.domain = ellipse\nconfig.problem.semi_axes = 2,1\nlambda = 0.4\n";
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.domain, DomainSpec::Ellipse(2.0, 1.0));
    }

    #[test]
    fn families_parse() {
        let c = RunConfig::parse(
            "problem.domain = ellipse\nproblem.theta = sinusoid:1.3:0.1:1\n\
             problem.anisotropy = interpolated\nproblem.tau = 0.1\nproblem.q_matrix = 1,0,0,0,1.5,0,0,0,2\n\
             problem.mobility = ellipsoidal\nproblem.mobility_q_matrix = 1,0,0,0,1,0,0,0,2\n",
        )
        .unwrap();
        assert!(matches!(c.boundary, BoundarySpec::Contact { theta: ContactAngleField::Sinusoid { freq: 1, .. }, .. }));
        assert_eq!(c.anisotropy.tag(), "interpolated");
        let d = RunConfig::parse("problem.domain = interval\nproblem.theta = const:1.0").unwrap();
        assert_eq!(d.anisotropy.dim(), 1);
        assert!(RunConfig::parse("problem.domain = interval\nproblem.theta = sinusoid:1:0.1:1").is_err());
    }
}
