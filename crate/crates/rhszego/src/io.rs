//! JSON input formats and their conversion to core types.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major lists of
//! rows.

use std::path::Path;

use rhszego_core::covering::QuasiPermRep;
use rhszego_core::hyperelliptic::HyperellipticCurve;
use rhszego_core::linalg::CMatrix;
use rhszego_core::theta::{RiemannMatrix, ThetaChar};
use rhszego_core::{Tolerances, C64};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub type JsonC = [f64; 2];

pub fn to_c(z: JsonC) -> C64 {
    C64::new(z[0], z[1])
}

pub fn from_c(z: C64) -> JsonC {
    [z.re, z.im]
}

pub fn vec_from_c(v: &[C64]) -> Vec<JsonC> {
    v.iter().map(|z| from_c(*z)).collect()
}

pub fn matrix_to_json(m: &CMatrix) -> Vec<Vec<JsonC>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| from_c(m[(i, j)])).collect()).collect()
}

pub fn matrix_from_json(rows: &[Vec<JsonC>]) -> Result<CMatrix, CliError> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != m) {
        return Err(CliError::Config("matrix rows have different lengths".into()));
    }
    let data = rows.iter().flatten().map(|z| to_c(*z)).collect();
    Ok(CMatrix::from_vec(n, m, data)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasepointFile {
    pub lambda: JsonC,
    #[serde(default = "sheet_one")]
    pub sheet: u8,
}

fn sheet_one() -> u8 {
    1
}

/// Partial override of the default tolerances.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub zero: Option<f64>,
    pub alg: Option<f64>,
    pub periods: Option<f64>,
    pub theta: Option<f64>,
    pub nonsing: Option<f64>,
    pub r: Option<f64>,
    pub res: Option<f64>,
    pub mon: Option<f64>,
    pub h: Option<f64>,
    pub fd: Option<f64>,
    pub geom_rel: Option<f64>,
    pub route_margin_rel: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self, mut t: Tolerances) -> Result<Tolerances, CliError> {
        let pairs = [
            (&mut t.zero, self.zero),
            (&mut t.alg, self.alg),
            (&mut t.periods, self.periods),
            (&mut t.theta, self.theta),
            (&mut t.nonsing, self.nonsing),
            (&mut t.r, self.r),
            (&mut t.res, self.res),
            (&mut t.mon, self.mon),
            (&mut t.h, self.h),
            (&mut t.fd, self.fd),
            (&mut t.geom_rel, self.geom_rel),
            (&mut t.route_margin_rel, self.route_margin_rel),
        ];
        for (slot, v) in pairs {
            if let Some(v) = v {
                *slot = v;
            }
        }
        if !t.is_valid() {
            return Err(CliError::Config("tolerances must be positive and finite".into()));
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub branch_points: Vec<JsonC>,
    pub basepoint: BasepointFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
}

impl CurveFile {
    pub fn tolerances(&self) -> Result<Tolerances, CliError> {
        match &self.tolerances {
            Some(o) => o.apply(Tolerances::default()),
            None => Ok(Tolerances::default()),
        }
    }

    pub fn branch_points_c(&self) -> Vec<C64> {
        self.branch_points.iter().map(|z| to_c(*z)).collect()
    }

    pub fn to_curve(&self) -> Result<HyperellipticCurve, CliError> {
        let tol = self.tolerances()?;
        Ok(HyperellipticCurve::new(&self.branch_points_c(), to_c(self.basepoint.lambda), self.basepoint.sheet, tol)?)
    }
}

/// A characteristic entry: a real number or `[re, im]`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex(JsonC),
}

impl Scalar {
    pub fn value(self) -> C64 {
        match self {
            Scalar::Real(x) => C64::new(x, 0.0),
            Scalar::Complex(z) => to_c(z),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharFile {
    pub p: Vec<Scalar>,
    pub q: Vec<Scalar>,
    /// Normalization point used by `verify`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<JsonC>,
}

impl CharFile {
    pub fn to_char(&self) -> Result<ThetaChar, CliError> {
        let p = self.p.iter().map(|s| s.value()).collect();
        let q = self.q.iter().map(|s| s.value()).collect();
        Ok(ThetaChar::new(p, q)?)
    }
}

/// Characteristic as written in reports.
#[derive(Debug, Clone, Serialize)]
pub struct CharJson {
    pub p: Vec<JsonC>,
    pub q: Vec<JsonC>,
}

impl From<&ThetaChar> for CharJson {
    fn from(ch: &ThetaChar) -> Self {
        CharJson { p: vec_from_c(&ch.p), q: vec_from_c(&ch.q) }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaInput {
    #[serde(rename = "char")]
    pub ch: CharFile,
    pub z: Vec<JsonC>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<JsonC>>,
}

impl ThetaInput {
    pub fn parts(&self) -> Result<(ThetaChar, Vec<C64>, RiemannMatrix), CliError> {
        let ch = self.ch.to_char()?;
        let z: Vec<C64> = self.z.iter().map(|v| to_c(*v)).collect();
        let rm = RiemannMatrix::new(matrix_from_json(&self.b)?)?;
        if z.len() != rm.genus() || ch.genus() != rm.genus() {
            return Err(CliError::Config("z, characteristic and B must have the same genus".into()));
        }
        Ok((ch, z, rm))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepFile {
    pub n: usize,
    pub lambda0: JsonC,
    pub points: Vec<JsonC>,
    pub matrices: Vec<Vec<Vec<JsonC>>>,
}

impl RepFile {
    pub fn to_rep(&self, tol_zero: f64) -> Result<QuasiPermRep, CliError> {
        let ms = self.matrices.iter().map(|m| matrix_from_json(m)).collect::<Result<Vec<_>, _>>()?;
        let pts = self.points.iter().map(|z| to_c(*z)).collect();
        Ok(QuasiPermRep::new(self.n, to_c(self.lambda0), pts, &ms, tol_zero)?)
    }
}

pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("{what}: {e}")))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_json(&text, &path.display().to_string())
}

/// Parse `RE,IM`.
pub fn parse_complex(s: &str) -> Result<C64, CliError> {
    let bad = || CliError::Config(format!("expected RE,IM, got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let re = a.trim().parse::<f64>().map_err(|_| bad())?;
    let im = b.trim().parse::<f64>().map_err(|_| bad())?;
    Ok(C64::new(re, im))
}
