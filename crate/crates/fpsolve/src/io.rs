//! Problem specifications, verification reports, and plot-ready exports.
//!
//! CSV fields are written with 17 significant digits so downstream tooling
//! reproduces every value exactly; JSON documents carry a schema_version.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catalog::{make_family, SolvableFamily};
use crate::error::{FpError, Result};
use crate::field::Interval;

pub const SCHEMA_VERSION: u32 = 1;

/// Full description of one generated problem plus run parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub schema_version: u32,
    pub family: FamilySpec,
    #[serde(default)]
    pub level: usize,
    #[serde(default)]
    pub offset: f64,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub run: RunSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_grid_n")]
    pub n: usize,
    #[serde(default = "default_grid_eps")]
    pub eps: f64,
    #[serde(default)]
    pub bounds: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(rename = "t", default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_chains")]
    pub chains: usize,
    #[serde(default = "default_imax")]
    pub imax: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// Check tolerances; every verification threshold is pinned here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_tol_riccati")]
    pub riccati: f64,
    #[serde(default = "default_tol_vq")]
    pub vq_consistency: f64,
    #[serde(default = "default_tol_factorization")]
    pub factorization: f64,
    #[serde(default = "default_tol_fp_residual")]
    pub fp_residual: f64,
    #[serde(default = "default_tol_rate_rel")]
    pub rate_rel: f64,
    #[serde(default = "default_tol_r2_defect")]
    pub r2_defect: f64,
    #[serde(default = "default_tol_long_time_l1")]
    pub long_time_l1: f64,
    #[serde(default = "default_tol_histogram_tv")]
    pub histogram_tv: f64,
}

fn default_grid_n() -> usize {
    2000
}
fn default_grid_eps() -> f64 {
    1e-12
}
fn default_dt() -> f64 {
    1e-3
}
fn default_horizon() -> f64 {
    8.0
}
fn default_seed() -> u64 {
    42
}
fn default_chains() -> usize {
    8
}
fn default_imax() -> usize {
    8
}
fn default_tol_riccati() -> f64 {
    1e-8
}
fn default_tol_vq() -> f64 {
    1e-9
}
fn default_tol_factorization() -> f64 {
    1e-5
}
fn default_tol_fp_residual() -> f64 {
    1e-6
}
fn default_tol_rate_rel() -> f64 {
    0.01
}
fn default_tol_r2_defect() -> f64 {
    1e-3
}
fn default_tol_long_time_l1() -> f64 {
    1e-3
}
fn default_tol_histogram_tv() -> f64 {
    0.05
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n: default_grid_n(),
            eps: default_grid_eps(),
            bounds: None,
        }
    }
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            dt: default_dt(),
            horizon: default_horizon(),
            seed: default_seed(),
            chains: default_chains(),
            imax: default_imax(),
            tolerances: Tolerances::default(),
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            riccati: default_tol_riccati(),
            vq_consistency: default_tol_vq(),
            factorization: default_tol_factorization(),
            fp_residual: default_tol_fp_residual(),
            rate_rel: default_tol_rate_rel(),
            r2_defect: default_tol_r2_defect(),
            long_time_l1: default_tol_long_time_l1(),
            histogram_tv: default_tol_histogram_tv(),
        }
    }
}

impl Default for ProblemSpec {
    fn default() -> Self {
        ProblemSpec {
            schema_version: SCHEMA_VERSION,
            family: FamilySpec {
                name: "harmonic".into(),
                params: [("omega".to_string(), 1.0)].into(),
            },
            level: 0,
            offset: 0.0,
            grid: GridSpec::default(),
            run: RunSpec::default(),
        }
    }
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ProblemSpec = serde_json::from_str(text)?;
        if spec.schema_version != SCHEMA_VERSION {
            return Err(FpError::InvalidConfig(format!(
                "unsupported schema_version {} (this tool reads {})",
                spec.schema_version, SCHEMA_VERSION
            )));
        }
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialization cannot fail")
    }

    pub fn build_family(&self) -> Result<SolvableFamily> {
        make_family(&self.family.name, &self.family.params)
    }
}

/// One named measurement against its tolerance (pass means measured <= tol).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            tolerance,
            pass: measured.is_finite() && measured <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Versions {
    pub tool: String,
    pub schema: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub pass: bool,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
    pub versions: Versions,
}

impl Report {
    pub fn new(checks: Vec<Check>, artifacts: Vec<String>) -> Self {
        Report {
            pass: checks.iter().all(|c| c.pass),
            checks,
            artifacts,
            versions: Versions {
                tool: env!("CARGO_PKG_VERSION").to_string(),
                schema: SCHEMA_VERSION,
            },
        }
    }
}

/// 17-significant-digit decimal form; round-trips through f64 parsing.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv(path: &Path, header: &str, rows: &[Vec<f64>]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{header}")?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| fmt17(*v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

///
/// Serialize an interval as a `[lo, hi]` pair with `null` for infinite ends.
pub fn interval_to_json(iv: &Interval) -> serde_json::Value {
    let side = |v: f64| {
        if v.is_finite() {
            serde_json::json!(v)
        } else {
            serde_json::Value::Null
        }
    };
    serde_json::json!([side(iv.lo), side(iv.hi)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_round_trips_losslessly() {
        let mut spec = ProblemSpec::default();
        spec.offset = 0.1234567890123456;
        spec.run.dt = 7.62939453125e-6;
        let text = spec.to_json();
        let back = ProblemSpec::from_json(&text).unwrap();
        assert_eq!(spec, back);
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = r#"{
            "schema_version": 1,
            "family": {"name": "harmonic", "params": {"omega": 1.0}},
            "surprise": true
        }"#;
        assert!(ProblemSpec::from_json(bad).is_err());
        let nested = r#"{
            "schema_version": 1,
            "family": {"name": "harmonic", "params": {"omega": 1.0}},
            "run": {"dt": 0.001, "warp": 9}
        }"#;
        assert!(ProblemSpec::from_json(nested).is_err());
    }

    #[test]
    fn wrong_schema_version_rejected() {
        let bad = r#"{"schema_version": 2, "family": {"name": "harmonic"}}"#;
        assert!(matches!(
            ProblemSpec::from_json(bad),
            Err(FpError::InvalidConfig(_))
        ));
    }

    #[test]
    fn defaults_fill_omitted_sections() {
        let minimal = r#"{"schema_version": 1, "family": {"name": "harmonic", "params": {"omega": 2.0}}}"#;
        let spec = ProblemSpec::from_json(minimal).unwrap();
        assert_eq!(spec.grid.n, 2000);
        assert_eq!(spec.run.seed, 42);
        assert_eq!(spec.run.tolerances.riccati, 1e-8);
        assert!(spec.build_family().is_ok());
    }

    #[test]
    fn fmt17_round_trips() {
        for v in [
            1.5,
            -0.1,
            std::f64::consts::PI,
            6.02e23,
            5.421010862427522e-20,
        ] {
            let parsed: f64 = fmt17(v).parse().unwrap();
            assert_eq!(parsed, v, "{}", fmt17(v));
        }
    }

    #[test]
    fn report_overall_pass_tracks_checks() {
        let good = Report::new(
            vec![Check::new("a", 0.5, 1.0), Check::new("b", 0.0, 1.0)],
            vec![],
        );
        assert!(good.pass);
        let bad = Report::new(
            vec![Check::new("a", 0.5, 1.0), Check::new("b", 2.0, 1.0)],
            vec![],
        );
        assert!(!bad.pass);
        assert!(Check::new("nan", f64::NAN, 1.0).pass == false);
    }
}
