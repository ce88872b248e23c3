//! Residual reports and the convention block attached to every output.

use std::cmp::Ordering;

use rhszego_core::kernels::KernelContext;
use serde::Serialize;
use serde_json::Value;

use crate::io::CharJson;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const LOOP_LAYOUT: &str = "straight spur from lambda0 to a 64-gon of radius 0.3*min(separation, |lambda0 - e_n|) around e_n, counterclockwise; generators ordered by increasing arg(e_n - lambda0)";

pub const COMPOSITION: &str = "right holonomy; gamma_a then gamma_b gives M_b*M_a; product over generator order is M_last*...*M_first";

pub const TRIVIALIZATION: &str = "lambda coordinate; spinor h^2 = P(lambda)/w with P = C*grad theta[odd](0)";

/// Convention metadata written into every report.
#[derive(Debug, Clone, Serialize)]
pub struct Conventions {
    pub version: &'static str,
    pub homology_basis: String,
    pub odd_characteristic: CharJson,
    pub loop_layout: &'static str,
    pub monodromy_composition: &'static str,
    pub trivialization: &'static str,
}

impl Conventions {
    pub fn new(ctx: &KernelContext) -> Self {
        Conventions {
            version: VERSION,
            homology_basis: ctx.abel.periods.basis.clone(),
            odd_characteristic: CharJson::from(&ctx.star),
            loop_layout: LOOP_LAYOUT,
            monodromy_composition: COMPOSITION,
            trivialization: TRIVIALIZATION,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// Passes when `residual < tolerance`.
    Upper,
    /// Passes when `residual > tolerance` (negative controls, positivity).
    Lower,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub check: String,
    pub params: Value,
    /// `None` (written as null) when the computation failed.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub bound: Bound,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    pub fn below(check: impl Into<String>, params: Value, residual: f64, tolerance: f64) -> Self {
        Check {
            check: check.into(),
            params,
            residual: Some(residual),
            tolerance,
            bound: Bound::Upper,
            pass: residual.is_finite() && residual < tolerance,
            error: None,
        }
    }

    pub fn above(check: impl Into<String>, params: Value, residual: f64, tolerance: f64) -> Self {
        Check {
            check: check.into(),
            params,
            residual: Some(residual),
            tolerance,
            bound: Bound::Lower,
            pass: residual.is_finite() && residual > tolerance,
            error: None,
        }
    }

    pub fn failed(check: impl Into<String>, params: Value, err: &rhszego_core::Error) -> Self {
        Check {
            check: check.into(),
            params,
            residual: None,
            tolerance: 0.0,
            bound: Bound::Upper,
            pass: false,
            error: Some(format!("{}: {err}", err.code())),
        }
    }

    fn sort_key(&self) -> (&str, String) {
        (&self.check, self.params.to_string())
    }
}

/// Order checks by name, then by their serialized parameters.
pub fn sort_checks(checks: &mut [Check]) {
    checks.sort_by(|a, b| {
        let (ka, kb) = (a.sort_key(), b.sort_key());
        ka.partial_cmp(&kb).unwrap_or(Ordering::Equal)
    });
}
