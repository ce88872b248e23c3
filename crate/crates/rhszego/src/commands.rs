//! Subcommand implementations. Each returns a serializable report.

use std::fmt::Write as _;

use rhszego_core::covering::{parameter_count, to_permutation_rep};
use rhszego_core::isomonodromy::tau_closed_form;
use rhszego_core::kernels::KernelContext;
use rhszego_core::rh::{monodromy_product, MonodromyResult, RhSolver};
use rhszego_core::theta::{theta, ThetaChar};
use rhszego_core::{Error, C64};
use serde::Serialize;

use crate::io::{from_c, matrix_to_json, vec_from_c, CharFile, CharJson, CurveFile, JsonC, RepFile, ThetaInput};
use crate::report::{Conventions, VERSION};
use crate::verify::{default_lambda0, run_verify, Suite, VerifyReport};
use crate::CliError;

type JsonMatrix = Vec<Vec<JsonC>>;

#[derive(Debug, Clone, Serialize)]
pub struct BasepointJson {
    pub lambda: JsonC,
    pub sheet: u8,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodsReport {
    pub conventions: Conventions,
    pub genus: usize,
    pub branch_points: Vec<JsonC>,
    pub basepoint: BasepointJson,
    pub a: JsonMatrix,
    pub b_raw: JsonMatrix,
    pub c: JsonMatrix,
    #[serde(rename = "B")]
    pub b: JsonMatrix,
    pub b_orientation: i8,
    pub b_shift: Vec<Vec<i64>>,
    pub nodes: usize,
    pub convergence: f64,
    pub asymmetry: f64,
    pub min_eig_im: f64,
}

pub fn periods(curve: &CurveFile) -> Result<PeriodsReport, CliError> {
    let ctx = KernelContext::new(curve.to_curve()?)?;
    let p = &ctx.abel.periods;
    let bp = ctx.curve().basepoint();
    Ok(PeriodsReport {
        conventions: Conventions::new(&ctx),
        genus: ctx.genus(),
        branch_points: vec_from_c(ctx.curve().branch_points()),
        basepoint: BasepointJson { lambda: from_c(bp.lambda), sheet: bp.sheet },
        a: matrix_to_json(&p.a),
        b_raw: matrix_to_json(&p.b_raw),
        c: matrix_to_json(&p.c),
        b: matrix_to_json(&p.b),
        b_orientation: p.b_orientation,
        b_shift: p.b_shift.clone(),
        nodes: p.nodes,
        convergence: p.convergence,
        asymmetry: p.asymmetry,
        min_eig_im: p.min_eig_im,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaReport {
    pub version: &'static str,
    pub characteristic: CharJson,
    pub z: Vec<JsonC>,
    pub value: JsonC,
    pub gradient: Vec<JsonC>,
    pub hessian: JsonMatrix,
    pub truncation_radius: usize,
    pub scale: f64,
    pub error_bound: f64,
}

pub fn theta_eval(input: &ThetaInput) -> Result<ThetaReport, CliError> {
    let (ch, z, rm) = input.parts()?;
    let ev = theta(&ch, &z, &rm, rhszego_core::Tolerances::default().theta)?;
    Ok(ThetaReport {
        version: VERSION,
        characteristic: CharJson::from(&ch),
        z: vec_from_c(&z),
        value: from_c(ev.value),
        gradient: vec_from_c(&ev.gradient),
        hessian: matrix_to_json(&ev.hessian),
        truncation_radius: ev.truncation_radius,
        scale: ev.scale,
        error_bound: ev.error_bound,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct IntersectionJson {
    pub column: usize,
    pub target: usize,
    pub m: Vec<i64>,
    pub n: Vec<i64>,
    /// Sign of the spinor after the loop (the residual sign gauge).
    pub sigma: i8,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonodromyJson {
    pub n: usize,
    pub point: JsonC,
    pub compare_at: JsonC,
    pub matrix: JsonMatrix,
    pub permutation: Vec<usize>,
    pub values: Vec<JsonC>,
    pub predicted: JsonMatrix,
    pub max_deviation: f64,
    pub intersections: Vec<IntersectionJson>,
    pub loop_path: Vec<JsonC>,
}

impl MonodromyJson {
    fn new(r: &MonodromyResult, point: C64) -> Self {
        MonodromyJson {
            n: r.n,
            point: from_c(point),
            compare_at: from_c(r.compare_at),
            matrix: matrix_to_json(&r.matrix),
            permutation: r.quasi.sigma.clone(),
            values: vec_from_c(&r.quasi.values),
            predicted: matrix_to_json(&r.predicted),
            max_deviation: r.max_deviation,
            intersections: r
                .intersections
                .iter()
                .enumerate()
                .map(|(column, i)| IntersectionJson {
                    column,
                    target: i.target,
                    m: i.m.clone(),
                    n: i.n.clone(),
                    sigma: i.sigma,
                    residual: i.residual,
                })
                .collect(),
            loop_path: vec_from_c(&r.loop_path),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiSample {
    pub lambda: JsonC,
    pub sheets: [u8; 2],
    pub psi: JsonMatrix,
    pub det: JsonC,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedSample {
    pub lambda: JsonC,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidueJson {
    pub n: usize,
    pub point: JsonC,
    pub matrix: JsonMatrix,
    pub eigenvalues: [JsonC; 2],
    pub radius: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub conventions: Conventions,
    pub branch_points: Vec<JsonC>,
    pub lambda0: JsonC,
    pub characteristic: CharJson,
    pub generator_order: Vec<usize>,
    pub monodromy: Vec<MonodromyJson>,
    pub product_residual: f64,
    pub residues: Vec<ResidueJson>,
    pub samples: Vec<PsiSample>,
    pub skipped: Vec<SkippedSample>,
}

fn load(curve: &CurveFile, ch: &CharFile) -> Result<(KernelContext, ThetaChar), CliError> {
    let ctx = KernelContext::new(curve.to_curve()?)?;
    let ch = ch.to_char()?;
    if ch.genus() != ctx.genus() {
        return Err(CliError::Config(format!(
            "characteristic has genus {} but the curve has genus {}",
            ch.genus(),
            ctx.genus()
        )));
    }
    Ok((ctx, ch))
}

/// `k × k` grid over the box around the branch points, widened by half the
/// diameter.
pub fn sample_grid(ctx: &KernelContext, k: usize) -> Vec<C64> {
    let e = ctx.curve().branch_points();
    let pad = 0.5 * ctx.curve().diameter();
    let (mut lo, mut hi) = (C64::new(f64::MAX, f64::MAX), C64::new(f64::MIN, f64::MIN));
    for z in e {
        lo = C64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = C64::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    let (lo, hi) = (lo - C64::new(pad, pad), hi + C64::new(pad, pad));
    let t = |i: usize| if k <= 1 { 0.5 } else { i as f64 / (k - 1) as f64 };
    let mut out = Vec::with_capacity(k * k);
    for j in 0..k {
        for i in 0..k {
            out.push(C64::new(lo.re + (hi.re - lo.re) * t(i), lo.im + (hi.im - lo.im) * t(j)));
        }
    }
    out
}

pub fn solve(curve: &CurveFile, ch: &CharFile, lambda0: C64, grid: usize) -> Result<SolveReport, CliError> {
    let (ctx, ch) = load(curve, ch)?;
    let rh = RhSolver::new(&ctx, ch.clone(), lambda0)?;
    let e = ctx.curve().branch_points().to_vec();
    let mut monodromy = Vec::new();
    let mut mats = Vec::new();
    for n in 0..e.len() {
        let r = rh.monodromy(n)?;
        monodromy.push(MonodromyJson::new(&r, e[n]));
        mats.push(r.matrix);
    }
    let order = rh.generator_order();
    let (_, product_residual) = monodromy_product(&mats, &order);
    let res = rh.residues()?;
    let residues = (0..e.len())
        .map(|n| ResidueJson {
            n,
            point: from_c(e[n]),
            matrix: matrix_to_json(&res.a[n]),
            eigenvalues: [from_c(res.eigenvalues[n][0]), from_c(res.eigenvalues[n][1])],
            radius: res.radii[n],
            nodes: res.nodes[n],
        })
        .collect();
    let mut samples = Vec::new();
    let mut skipped = Vec::new();
    let margin = ctx.curve().route_margin();
    for z in sample_grid(&ctx, grid) {
        let near = ctx.curve().nearest_branch_point(z);
        let r = if near.1 <= margin { Err(Error::SingularPoint(near.0)) } else { rh.psi(z) };
        match r {
            Ok(p) => samples.push(PsiSample {
                lambda: from_c(z),
                sheets: p.sheets,
                det: from_c(p.psi.det()),
                psi: matrix_to_json(&p.psi),
            }),
            Err(err) => skipped.push(SkippedSample { lambda: from_c(z), error: err.code().to_string() }),
        }
    }
    Ok(SolveReport {
        conventions: Conventions::new(&ctx),
        branch_points: vec_from_c(&e),
        lambda0: from_c(lambda0),
        characteristic: CharJson::from(&ch),
        generator_order: order,
        monodromy,
        product_residual,
        residues,
        samples,
        skipped,
    })
}

/// Ψ samples as CSV: `re_lambda,im_lambda` followed by re/im of Ψ11, Ψ12,
/// Ψ21, Ψ22.
pub fn samples_csv(samples: &[PsiSample]) -> String {
    let mut s = String::from("re_lambda,im_lambda,psi11_re,psi11_im,psi12_re,psi12_im,psi21_re,psi21_im,psi22_re,psi22_im\n");
    for p in samples {
        let _ = write!(s, "{:e},{:e}", p.lambda[0], p.lambda[1]);
        for row in &p.psi {
            for z in row {
                let _ = write!(s, ",{:e},{:e}", z[0], z[1]);
            }
        }
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct MonodromyReport {
    pub conventions: Conventions,
    pub branch_points: Vec<JsonC>,
    pub lambda0: JsonC,
    pub characteristic: CharJson,
    /// Position of this generator in the ordered product.
    pub generator_position: usize,
    pub monodromy: MonodromyJson,
}

/// Normalization point from the characteristic file, or the default rule.
pub fn lambda0_for(ctx: &KernelContext, ch: &CharFile) -> C64 {
    ch.lambda0.map(crate::io::to_c).unwrap_or_else(|| default_lambda0(ctx.curve()))
}

pub fn monodromy(curve: &CurveFile, chf: &CharFile, n: usize) -> Result<MonodromyReport, CliError> {
    let (ctx, ch) = load(curve, chf)?;
    let e = ctx.curve().branch_points().to_vec();
    if n >= e.len() {
        return Err(Error::IndexOutOfRange { index: n, limit: e.len() }.into());
    }
    let lambda0 = lambda0_for(&ctx, chf);
    let rh = RhSolver::new(&ctx, ch.clone(), lambda0)?;
    let r = rh.monodromy(n)?;
    let order = rh.generator_order();
    Ok(MonodromyReport {
        conventions: Conventions::new(&ctx),
        branch_points: vec_from_c(&e),
        lambda0: from_c(lambda0),
        characteristic: CharJson::from(&ch),
        generator_position: order.iter().position(|k| *k == n).unwrap_or(n),
        monodromy: MonodromyJson::new(&r, e[n]),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ReferenceJson {
    pub branch_points: Vec<JsonC>,
    pub self_reference: bool,
    pub tracking_steps: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct TauReport {
    pub conventions: Conventions,
    pub branch_points: Vec<JsonC>,
    pub characteristic: CharJson,
    pub tau: JsonC,
    #[serde(rename = "F")]
    pub f: JsonC,
    pub log_f: JsonC,
    pub theta: JsonC,
    pub theta_scale: f64,
    pub det_a: JsonC,
    pub log_det_a: JsonC,
    pub vandermonde: JsonC,
    pub log_vandermonde: JsonC,
    /// `exp(i(arg F − arg F_ref))` with arg F continued from the reference
    /// and arg F_ref the principal value there.
    pub phase: JsonC,
    pub reference: ReferenceJson,
}

pub fn tau(curve: &CurveFile, chf: &CharFile, reference: Option<&CurveFile>) -> Result<TauReport, CliError> {
    let (ctx, ch) = load(curve, chf)?;
    let (t, refjson, phase) = match reference {
        None => {
            let t = tau_closed_form(&ctx, &ch, None)?;
            let r = ReferenceJson {
                branch_points: vec_from_c(ctx.curve().branch_points()),
                self_reference: true,
                tracking_steps: 0,
            };
            (t, r, C64::new(1.0, 0.0))
        }
        Some(rf) => {
            let pts = rf.branch_points_c();
            let t = tau_closed_form(&ctx, &ch, Some(&pts))?;
            let refctx = KernelContext::new(ctx.curve().with_branch_points(&pts)?)?;
            let t0 = tau_closed_form(&refctx, &ThetaChar::zero(ctx.genus()), None)?;
            let phase = C64::from_polar(1.0, t.log_f.im - t0.log_f.im);
            let r = ReferenceJson {
                branch_points: vec_from_c(refctx.curve().branch_points()),
                self_reference: false,
                tracking_steps: t.tracking_steps,
            };
            (t, r, phase)
        }
    };
    Ok(TauReport {
        conventions: Conventions::new(&ctx),
        branch_points: vec_from_c(ctx.curve().branch_points()),
        characteristic: CharJson::from(&ch),
        tau: from_c(t.value),
        f: from_c(t.f),
        log_f: from_c(t.log_f),
        theta: from_c(t.theta),
        theta_scale: t.theta_scale,
        det_a: from_c(t.det_a),
        log_det_a: from_c(t.log_det_a),
        vandermonde: from_c(t.vandermonde),
        log_vandermonde: from_c(t.log_vandermonde),
        phase: from_c(phase),
        reference: refjson,
    })
}

pub fn verify(curve: &CurveFile, chf: &CharFile, suite: Suite, seed: u64) -> Result<VerifyReport, CliError> {
    let (ctx, ch) = load(curve, chf)?;
    let lambda0 = lambda0_for(&ctx, chf);
    Ok(run_verify(&ctx, &ch, lambda0, suite, seed))
}

#[derive(Debug, Clone, Serialize)]
pub struct CoveringReport {
    pub version: &'static str,
    pub n: usize,
    pub lambda0: JsonC,
    pub points: Vec<JsonC>,
    pub product_residual: f64,
    pub permutations: Vec<Vec<usize>>,
    pub multiplicities: Vec<Vec<usize>>,
    pub components: Vec<Vec<usize>>,
    pub connected: bool,
    pub genus: usize,
    pub euler_genus: i64,
    pub parameter_count: i64,
}

pub fn covering(rep: &RepFile) -> Result<CoveringReport, CliError> {
    let r = rep.to_rep(rhszego_core::Tolerances::default().zero)?;
    let comb = to_permutation_rep(&r)?;
    Ok(CoveringReport {
        version: VERSION,
        n: r.n,
        lambda0: from_c(r.base_point),
        points: vec_from_c(&r.points),
        product_residual: r.product_residual(),
        parameter_count: parameter_count(r.n, r.points.len()),
        permutations: comb.permutations,
        multiplicities: comb.multiplicities,
        components: comb.components,
        connected: comb.connected,
        genus: comb.genus,
        euler_genus: comb.euler_genus,
    })
}
