use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateStatus {
    Pass,
    Fail,
    /// The assumptions behind the bound do not hold for this input.
    Inapplicable,
    /// The data needed to decide was not available or not trustworthy.
    Inconclusive,
}

impl fmt::Display for CertificateStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Inapplicable => "inapplicable",
            Self::Inconclusive => "inconclusive",
        })
    }
}

/// A claimed bound checked against a measured quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub name: String,
    pub bound: f64,
    pub measured: f64,
    /// `bound − measured`.
    pub margin: f64,
    pub pass: bool,
    pub status: CertificateStatus,
    /// Every constant the bound was assembled from, by name.
    pub constants: Vec<(String, f64)>,
    pub note: String,
}

impl Certificate {
    pub fn check(name: impl Into<String>, bound: f64, measured: f64) -> Self {
        let margin = bound - measured;
        let pass = margin >= 0.0;
        Self {
            name: name.into(),
            bound,
            measured,
            margin,
            pass,
            status: if pass { CertificateStatus::Pass } else { CertificateStatus::Fail },
            constants: Vec::new(),
            note: String::new(),
        }
    }

    pub fn with_status(name: impl Into<String>, status: CertificateStatus, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            bound: f64::NAN,
            measured: f64::NAN,
            margin: f64::NAN,
            pass: false,
            status,
            constants: Vec::new(),
            note: note.into(),
        }
    }

    pub fn constant(mut self, name: &str, value: f64) -> Self {
        self.constants.push((name.to_string(), value));
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// Whether the certificate counts against a suite: a failure, or an
    /// inconclusive result.
    pub fn is_failure(&self) -> bool {
        matches!(self.status, CertificateStatus::Fail | CertificateStatus::Inconclusive)
    }

    pub fn constant_value(&self, name: &str) -> Option<f64> {
        self.constants.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// Analytic values against their numerical counterparts.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub analytic: Vec<f64>,
    pub numerical: Vec<f64>,
    pub abs_error: f64,
    pub rel_error: f64,
    /// Grid resolution (or integrator step count) behind `numerical`.
    pub resolution: usize,
}

impl OracleResult {
    pub fn new(analytic: Vec<f64>, numerical: Vec<f64>, resolution: usize) -> Self {
        let mut abs_error: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (a, n) in analytic.iter().zip(&numerical) {
            abs_error = abs_error.max((a - n).abs());
            scale = scale.max(a.abs());
        }
        let rel_error = if scale > 0.0 { abs_error / scale } else { abs_error };
        Self { analytic, numerical, abs_error, rel_error, resolution }
    }
}
