//! Isomonodromic deformations: Hamiltonians, the closed-form tau function,
//! Rauch variation of periods and differentials, Schlesinger equations,
//! compatibility of the Hurwitz projective connection and the F-factor.
//!
//! Derivatives in branch points are central differences in a real step h
//! with one Richardson halving; all quantities are holomorphic in λ_m.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::hyperelliptic::{circle_polyline, HyperellipticCurve, Lift};
use crate::kernels::{
    bilinear, divisor_characteristic, projective_connection, BranchGeometry, KPoint, KernelContext, SzegoKernel,
};
use crate::linalg::CMatrix;
use crate::rh::{ResidueSet, RhSolver};
use crate::theta::{theta, ThetaChar};
use crate::{Error, Result, C64};

const TWO_PI_I: C64 = C64::new(0.0, 2.0 * PI);

/// Same curve with `e_m` moved by `delta`; fails if the move changes the
/// lexicographic order (which would change the homology basis).
pub fn perturbed_curve(curve: &HyperellipticCurve, m: usize, delta: C64) -> Result<HyperellipticCurve> {
    let mut e = curve.branch_points().to_vec();
    if m >= e.len() {
        return Err(Error::IndexOutOfRange { index: m, limit: e.len() });
    }
    e[m] += delta;
    let c = curve.with_branch_points(&e)?;
    if c.branch_points() != &e[..] {
        return Err(Error::StepTooLarge("step changes the order of branch points"));
    }
    Ok(c)
}

/// Central difference with one Richardson halving, applied entrywise.
pub fn richardson_derivative(h: f64, f: impl Fn(f64) -> Result<Vec<C64>>) -> Result<Vec<C64>> {
    let d = |s: f64| -> Result<Vec<C64>> {
        let p = f(s)?;
        let m = f(-s)?;
        Ok(p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * s)).collect())
    };
    let d1 = d(h)?;
    let d2 = d(0.5 * h)?;
    Ok(d1.iter().zip(&d2).map(|(a, b)| (b * 4.0 - a) / 3.0).collect())
}

/// Default FD step: 1e-5 times the separation of e_m.
pub fn default_step(curve: &HyperellipticCurve, m: usize) -> f64 {
    1e-5 * curve.separation_of(m)
}

/// `Σ_β C[β][α] λ^β`, the numerators of the normalized differentials.
fn normalized_poly(ctx: &KernelContext, lambda: C64) -> Vec<C64> {
    let g = ctx.genus();
    let mut pw = vec![C64::new(1.0, 0.0); g];
    for b in 1..g {
        pw[b] = pw[b - 1] * lambda;
    }
    ctx.abel.periods.c.tmul_vec(&pw)
}

fn others_product(e: &[C64], m: usize) -> C64 {
    e.iter().enumerate().filter(|(i, _)| *i != m).fold(C64::new(1.0, 0.0), |p, (_, x)| p * (e[m] - x))
}

/// Exact residue form of the Rauch formula,
/// `∂B_αβ/∂λ_m = 4πi·poly_α(λ_m)poly_β(λ_m)/Π_{i≠m}(λ_m − λ_i)`.
pub fn rauch_formula(ctx: &KernelContext, m: usize) -> CMatrix {
    let e = ctx.curve().branch_points();
    let p = normalized_poly(ctx, e[m]);
    let s = C64::new(0.0, 4.0 * PI) / others_product(e, m);
    CMatrix::from_fn(p.len(), p.len(), |a, b| p[a] * p[b] * s)
}

/// Lifts of both sheets at `k` points of the circle |λ − λ_m| = radius.
pub fn pair_circle(ctx: &KernelContext, m: usize, radius: f64, k: usize) -> Result<Vec<[Lift; 2]>> {
    let e = ctx.curve().branch_points()[m];
    let dir = ctx.curve().basepoint().lambda - e;
    let start = e + dir * (radius / dir.norm());
    let l1 = ctx.lift(start, 1)?;
    let tr = ctx.tracer();
    let l2 = ctx.abel.flip_sheet(&tr, &l1)?;
    let pts = circle_polyline(e, radius, dir, k);
    let mut cur = [l1, l2];
    let mut out = Vec::with_capacity(k);
    out.push(cur.clone());
    for p in &pts[1..k] {
        cur = [tr.polyline(&cur[0], &[*p])?, tr.polyline(&cur[1], &[*p])?];
        out.push(cur.clone());
    }
    Ok(out)
}

/// `res_{λ=λ_m} f(λ^{(1)}, λ^{(2)})` for a function symmetric under the
/// sheet exchange, by the trapezoid rule on a circle of radius
/// 0.25·sep(λ_m), doubling from 32 nodes.
pub fn pair_residue(
    ctx: &KernelContext,
    m: usize,
    f: impl Fn(&KPoint, &KPoint) -> Result<Vec<C64>>,
) -> Result<Vec<C64>> {
    let e = ctx.curve().branch_points()[m];
    let radius = 0.25 * ctx.curve().separation_of(m);
    let eval = |k: usize| -> Result<Vec<C64>> {
        let mut acc: Vec<C64> = Vec::new();
        for l in pair_circle(ctx, m, radius, k)? {
            let p1 = ctx.point(&l[0])?;
            let p2 = ctx.point(&l[1])?;
            let v = f(&p1, &p2)?;
            if acc.is_empty() {
                acc = vec![C64::new(0.0, 0.0); v.len()];
            }
            let wt = (l[0].lambda - e) / k as f64;
            for (a, x) in acc.iter_mut().zip(&v) {
                *a += x * wt;
            }
        }
        Ok(acc)
    };
    let tol = ctx.tolerances().res;
    let mut k = 32;
    let mut prev = eval(k)?;
    loop {
        k *= 2;
        let cur = eval(k)?;
        let scale = cur.iter().fold(1.0f64, |a, x| a.max(x.norm()));
        let change = cur.iter().zip(&prev).fold(0.0f64, |a, (x, y)| a.max((x - y).norm())) / scale;
        if change < tol {
            return Ok(cur);
        }
        if k >= 1024 {
            return Err(Error::QuadratureFailure { change });
        }
        prev = cur;
    }
}

/// `−res_{λ=λ_m} w(λ^{(1)}, λ^{(2)})/dλ²`.
pub fn bergmann_pair_residue(ctx: &KernelContext, m: usize) -> Result<C64> {
    let r = pair_residue(ctx, m, |p, q| Ok(vec![ctx.bergmann_kernel(p, q)?]))?;
    Ok(-r[0])
}

#[derive(Debug, Clone)]
pub struct HamiltonianSet {
    /// `½ res tr(Ψ_λΨ^{-1})²` on circles.
    pub contour: Vec<C64>,
    /// `Σ_{k≠m} tr(A_mA_k)/(λ_m − λ_k)` from the residues.
    pub from_residues: Vec<C64>,
    /// Bergmann residue plus theta term.
    pub closed: Vec<C64>,
    pub discrepancy: f64,
    pub nodes: Vec<usize>,
}

/// Closed form `H_m = −res Σ_{j<k} w/dλ² + (1/Θ)Σ ∂Θ/∂B_αβ ∂_mB_αβ`, with
/// the heat equation turning the second term into
/// `Σ ∂²Θ(0) poly_α poly_β / (Θ(0) Π_{i≠m}(λ_m − λ_i))`.
pub fn hamiltonian_closed(sk: &SzegoKernel, m: usize) -> Result<C64> {
    let ctx = sk.ctx;
    let e = ctx.curve().branch_points();
    let p = normalized_poly(ctx, e[m]);
    let th = bilinear(&sk.theta0.hessian, &p, &p) / (sk.theta0.value * others_product(e, m));
    Ok(bergmann_pair_residue(ctx, m)? + th)
}

pub fn hamiltonians(rh: &RhSolver, residues: &ResidueSet) -> Result<HamiltonianSet> {
    let e = rh.ctx().curve().branch_points().to_vec();
    let tol = rh.ctx().tolerances().res;
    let mut out = HamiltonianSet {
        contour: Vec::new(),
        from_residues: Vec::new(),
        closed: Vec::new(),
        discrepancy: 0.0,
        nodes: Vec::new(),
    };
    for m in 0..e.len() {
        let radius = residues.radii[m];
        let eval = |k: usize| -> Result<C64> {
            let mut acc = C64::new(0.0, 0.0);
            for l in rh.circle_lifts(m, radius, k)? {
                let f = rh.log_derivative_from(&l)?;
                acc += (&f * &f).trace() * (l[0].lambda - e[m]) / k as f64;
            }
            Ok(acc * 0.5)
        };
        let mut k = 32;
        let mut prev = eval(k)?;
        let h = loop {
            k *= 2;
            let cur = eval(k)?;
            let change = (cur - prev).norm() / cur.norm().max(1.0);
            if change < tol {
                break cur;
            }
            if k >= 1024 {
                return Err(Error::QuadratureFailure { change });
            }
            prev = cur;
        };
        out.contour.push(h);
        out.nodes.push(k);
        let mut s = C64::new(0.0, 0.0);
        for n in 0..e.len() {
            if n != m {
                s += (&residues.a[m] * &residues.a[n]).trace() / (e[m] - e[n]);
            }
        }
        out.from_residues.push(s);
        let c = hamiltonian_closed(&rh.sk, m)?;
        out.closed.push(c);
        out.discrepancy = out.discrepancy.max((h - c).norm()).max((h - s).norm());
    }
    Ok(out)
}

/// `τ = F·Θ[p,q](0|B)`, `F = (det A)^{−1/2}Π_{m<n}(λ_m − λ_n)^{−1/8}`.
#[derive(Debug, Clone)]
pub struct TauEvaluation {
    pub value: C64,
    pub log_f: C64,
    pub f: C64,
    pub theta: C64,
    /// Dominant lattice term of the theta sum.
    pub theta_scale: f64,
    pub det_a: C64,
    /// `Π_{m<n}(λ_m − λ_n)^{−1/8}` on the tracked branch.
    pub vandermonde: C64,
    /// Continued `ln det A` and `Σ_{m<n} ln(λ_m − λ_n)`.
    pub log_det_a: C64,
    pub log_vandermonde: C64,
    /// Number of deformation steps from the reference (0 without one).
    pub tracking_steps: usize,
}

fn unwrap_near(z: C64, prev: C64) -> C64 {
    let l = z.ln();
    let k = ((prev.im - l.im) / (2.0 * PI)).round();
    C64::new(l.re, l.im + 2.0 * PI * k)
}

fn log_pairs(e: &[C64], prev: Option<&[C64]>) -> Vec<C64> {
    let mut out = Vec::new();
    let mut idx = 0;
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            let d = e[i] - e[j];
            out.push(match prev {
                Some(p) => unwrap_near(d, p[idx]),
                None => d.ln(),
            });
            idx += 1;
        }
    }
    out
}

/// Closed-form tau function. Fractional powers are continued along the
/// straight deformation from `reference` (same number of branch points,
/// matched by sorted index); without a reference the principal branches of
/// the current configuration are used.
pub fn tau_closed_form(abel_curve: &KernelContext, ch: &ThetaChar, reference: Option<&[C64]>) -> Result<TauEvaluation> {
    let curve = abel_curve.curve();
    let g = abel_curve.genus();
    let det_a = abel_curve.abel.periods.a.det();
    if det_a.norm() == 0.0 {
        return Err(Error::DegenerateCurve("a-period matrix is singular"));
    }
    let e = curve.branch_points().to_vec();
    let (log_det_a, log_v, steps) = match reference {
        None => (det_a.ln(), log_pairs(&e, None).iter().sum::<C64>(), 0),
        Some(r) => track_logs(curve, r)?,
    };
    let th = theta(ch, &vec![C64::new(0.0, 0.0); g], &abel_curve.rm, abel_curve.tolerances().theta)?;
    let log_f = -log_det_a * 0.5 - log_v * 0.125;
    let f = log_f.exp();
    Ok(TauEvaluation {
        value: f * th.value,
        log_f,
        f,
        theta: th.value,
        theta_scale: th.scale,
        det_a,
        vandermonde: (-log_v * 0.125).exp(),
        log_det_a,
        log_vandermonde: log_v,
        tracking_steps: steps,
    })
}

fn track_logs(curve: &HyperellipticCurve, reference: &[C64]) -> Result<(C64, C64, usize)> {
    let e = curve.branch_points().to_vec();
    if reference.len() != e.len() {
        return Err(Error::InvalidInput("reference configuration has a different number of points"));
    }
    let refc = curve.with_branch_points(reference)?;
    let r = refc.branch_points().to_vec();
    let mut steps = 8;
    'outer: loop {
        let a0 = crate::hyperelliptic::compute_periods(&refc)?.a.det();
        let mut ld = a0.ln();
        let mut lp = log_pairs(&r, None);
        for s in 1..=steps {
            let t = s as f64 / steps as f64;
            let pts: Vec<C64> = r.iter().zip(&e).map(|(a, b)| a + (b - a) * t).collect();
            let c = curve.with_branch_points(&pts)?;
            if c.branch_points() != &pts[..] {
                return Err(Error::InvalidInput("deformation from the reference changes the branch point order"));
            }
            let d = crate::hyperelliptic::compute_periods(&c)?.a.det();
            let nd = unwrap_near(d, ld);
            let np = log_pairs(&pts, Some(&lp));
            let jump = (nd.im - ld.im).abs().max(np.iter().zip(&lp).fold(0.0f64, |a, (x, y)| a.max((x.im - y.im).abs())));
            if jump > 0.5 {
                steps *= 2;
                if steps > 1024 {
                    return Err(Error::StepTooLarge("branch tracking needs too many steps"));
                }
                continue 'outer;
            }
            ld = nd;
            lp = np;
        }
        return Ok((ld, lp.iter().sum(), steps));
    }
}

/// `ln τ(config with λ_m + δ) − ln τ(config)` via principal logs of ratios,
/// valid for small δ.
fn log_tau_ratio_derivative(ctx: &KernelContext, ch: &ThetaChar, m: usize, h: f64, include_theta: bool) -> Result<C64> {
    let curve = ctx.curve();
    let base = |s: f64| -> Result<(C64, Vec<C64>, C64)> {
        let c = perturbed_curve(curve, m, C64::new(s, 0.0))?;
        let k = KernelContext::new(c)?;
        let det = k.abel.periods.a.det();
        let th = if include_theta {
            theta(ch, &vec![C64::new(0.0, 0.0); k.genus()], &k.rm, k.tolerances().theta)?.value
        } else {
            C64::new(1.0, 0.0)
        };
        let e = k.curve().branch_points();
        let mut d = Vec::new();
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                d.push(e[i] - e[j]);
            }
        }
        Ok((det, d, th))
    };
    let d = |s: f64| -> Result<C64> {
        let (ap, dp, tp) = base(s)?;
        let (am, dm, tm) = base(-s)?;
        let mut l = -(ap / am).ln() * 0.5 + (tp / tm).ln();
        for (x, y) in dp.iter().zip(&dm) {
            l -= (x / y).ln() * 0.125;
        }
        Ok(l / (2.0 * s))
    };
    let d1 = d(h)?;
    let d2 = d(0.5 * h)?;
    Ok((d2 * 4.0 - d1) / 3.0)
}

/// `∂ ln τ/∂λ_m` by finite differences of the closed form.
pub fn dlog_tau(ctx: &KernelContext, ch: &ThetaChar, m: usize, h: f64) -> Result<C64> {
    log_tau_ratio_derivative(ctx, ch, m, h, true)
}

/// `∂ ln F/∂λ_m` by finite differences of the closed form.
pub fn dlog_f(ctx: &KernelContext, m: usize, h: f64) -> Result<C64> {
    log_tau_ratio_derivative(ctx, &ThetaChar::zero(ctx.genus()), m, h, false)
}

#[derive(Debug, Clone)]
pub struct RauchReport {
    pub fd: CMatrix,
    pub formula: CMatrix,
    /// `max|FD − formula|`.
    pub fd_residual: f64,
    /// Contour forms: `−4πi res Σ_{j<k} w_α w_β` and `2πi res Σ_j w_α w_β`.
    pub two_sheet: CMatrix,
    pub one_sheet: CMatrix,
    pub forms_residual: f64,
    /// `max |Σ_j w_α(λ^{(j)})|` on the residue circle, relative.
    pub sheet_sum: f64,
    /// `|FD_{Im} − i·FD_{Re}|`.
    pub holomorphic_residual: f64,
}

pub fn rauch_check(ctx: &KernelContext, m: usize, h: f64) -> Result<RauchReport> {
    let g = ctx.genus();
    let curve = ctx.curve();
    let b_at = |d: C64| -> Result<Vec<C64>> {
        let c = perturbed_curve(curve, m, d)?;
        Ok(crate::hyperelliptic::compute_periods(&c)?.b.as_slice().to_vec())
    };
    let fd_re = richardson_derivative(h, |s| b_at(C64::new(s, 0.0)))?;
    let fd_im = richardson_derivative(h, |s| b_at(C64::new(0.0, s)))?;
    let fd = CMatrix::from_vec(g, g, fd_re.clone())?;
    let formula = rauch_formula(ctx, m);
    let fd_residual = fd.max_diff(&formula);
    let holomorphic_residual =
        fd_im.iter().zip(&fd_re).fold(0.0f64, |a, (x, y)| a.max((x - C64::new(0.0, 1.0) * y).norm()));

    let sheet_sum = core::cell::Cell::new(0.0f64);
    let r = pair_residue(ctx, m, |p, q| {
        let mut v = Vec::with_capacity(2 * g * g);
        for a in 0..g {
            for b in 0..g {
                v.push(p.diff[a] * q.diff[b] * (-2.0 * TWO_PI_I));
            }
        }
        for a in 0..g {
            for b in 0..g {
                v.push((p.diff[a] * p.diff[b] + q.diff[a] * q.diff[b]) * TWO_PI_I);
            }
            let s = (p.diff[a] + q.diff[a]).norm() / p.diff[a].norm().max(1e-300);
            sheet_sum.set(sheet_sum.get().max(s));
        }
        Ok(v)
    })?;
    let two_sheet = CMatrix::from_vec(g, g, r[..g * g].to_vec())?;
    let one_sheet = CMatrix::from_vec(g, g, r[g * g..].to_vec())?;
    let forms_residual = two_sheet.max_diff(&one_sheet);
    Ok(RauchReport {
        fd,
        formula,
        fd_residual,
        two_sheet,
        one_sheet,
        forms_residual,
        sheet_sum: sheet_sum.get(),
        holomorphic_residual,
    })
}

/// Variation of a normalized differential at a fixed point P.
#[derive(Debug, Clone)]
pub struct DifferentialVariation {
    pub fd: Vec<C64>,
    /// `res{Σ_j w_α(λ^{(j)}) w(λ^{(j)}, P)/dλ²}`.
    pub residue: Vec<C64>,
    /// `max_α |FD − residue|`.
    pub residual: f64,
    /// Residual against the opposite overall sign.
    pub variant_residual: f64,
}

/// FD of `w_α(P)/dλ` in λ_m at fixed λ_P (sheet 1) against the residue of
/// the Bergmann kernel.
pub fn differential_variation_check(ctx: &KernelContext, m: usize, lambda_p: C64, h: f64) -> Result<DifferentialVariation> {
    let curve = ctx.curve();
    let fd = richardson_derivative(h, |s| {
        let c = perturbed_curve(curve, m, C64::new(s, 0.0))?;
        let per = crate::hyperelliptic::compute_periods(&c)?;
        Ok(per.normalized(&c, lambda_p, c.w1(lambda_p)))
    })?;
    let mut p = ctx.lift(lambda_p, 1)?;
    if (p.w - curve.w1(lambda_p)).norm() > (p.w + curve.w1(lambda_p)).norm() {
        p = ctx.abel.flip_sheet(&ctx.tracer(), &p)?;
    }
    let pp = ctx.point(&p)?;
    let residue = pair_residue(ctx, m, |a, b| {
        let wa = ctx.bergmann_kernel(a, &pp)?;
        let wb = ctx.bergmann_kernel(b, &pp)?;
        Ok((0..ctx.genus()).map(|al| a.diff[al] * wa + b.diff[al] * wb).collect())
    })?;
    let residual = fd.iter().zip(&residue).fold(0.0f64, |acc, (x, y)| acc.max((x - y).norm()));
    let variant_residual = fd.iter().zip(&residue).fold(0.0f64, |acc, (x, y)| acc.max((x + y).norm()));
    Ok(DifferentialVariation { fd, residue, residual, variant_residual })
}

#[derive(Debug, Clone)]
pub struct SchlesingerReport {
    pub fd: CMatrix,
    pub rhs: CMatrix,
    pub residual: f64,
    /// Residual against the variant whose m = n equation carries the extra
    /// `Σ_k [A_k, A_m]/(λ_k − λ_0)` term.
    pub variant_residual: f64,
}

fn comm(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.commutator(b)
}

/// Right-hand sides of `∂A_n/∂λ_m` for Ψ normalized at λ_0: the derived
/// system and the variant with the extra λ_0 term in the diagonal equation.
pub fn schlesinger_rhs(a: &[CMatrix], e: &[C64], lambda0: C64, m: usize, n: usize) -> (CMatrix, CMatrix) {
    if m != n {
        let c = comm(&a[n], &a[m]);
        let r = &c.scale((e[n] - e[m]).inv()) - &c.scale((lambda0 - e[m]).inv());
        return (r.clone(), r);
    }
    let mut d = CMatrix::zeros(2, 2);
    let mut v = CMatrix::zeros(2, 2);
    for k in 0..a.len() {
        if k == m {
            continue;
        }
        let c = comm(&a[k], &a[m]);
        d = &d - &c.scale((e[k] - e[m]).inv());
        v = &v - &(&c.scale((e[k] - e[m]).inv()) - &c.scale((e[k] - lambda0).inv()));
    }
    (d, v)
}

/// Residues for the curve with `e_m` moved by `s` and the characteristic
/// `ch_of(s)`.
fn residues_moved(
    ctx: &KernelContext,
    ch_of: &dyn Fn(f64) -> ThetaChar,
    lambda0: C64,
    m: usize,
    s: f64,
) -> Result<Vec<CMatrix>> {
    let c = perturbed_curve(ctx.curve(), m, C64::new(s, 0.0))?;
    let k = KernelContext::new(c)?;
    let rh = RhSolver::new(&k, ch_of(s), lambda0)?;
    Ok(rh.residues()?.a)
}

/// FD of A_n in λ_m against the Schlesinger right-hand side. `ch_of(s)` is
/// the characteristic used when λ_m is moved by s (constant for a genuine
/// isomonodromic deformation).
pub fn schlesinger_check(
    ctx: &KernelContext,
    ch_of: &dyn Fn(f64) -> ThetaChar,
    lambda0: C64,
    m: usize,
    n: usize,
    h: f64,
) -> Result<SchlesingerReport> {
    let fd = richardson_derivative(h, |s| Ok(residues_moved(ctx, ch_of, lambda0, m, s)?[n].as_slice().to_vec()))?;
    let fd = CMatrix::from_vec(2, 2, fd)?;
    let rh = RhSolver::new(ctx, ch_of(0.0), lambda0)?;
    let a = rh.residues()?.a;
    let (rhs, var) = schlesinger_rhs(&a, ctx.curve().branch_points(), lambda0, m, n);
    Ok(SchlesingerReport { residual: fd.max_diff(&rhs), variant_residual: fd.max_diff(&var), fd, rhs })
}

/// All `∂A_n/∂λ_m` residuals, reusing one set of moved residues per m.
pub fn schlesinger_all(
    ctx: &KernelContext,
    ch_of: &dyn Fn(f64) -> ThetaChar,
    lambda0: C64,
    h: f64,
) -> Result<Vec<(usize, usize, SchlesingerReport)>> {
    let e = ctx.curve().branch_points().to_vec();
    let rh = RhSolver::new(ctx, ch_of(0.0), lambda0)?;
    let a = rh.residues()?.a;
    let mut out = Vec::new();
    for m in 0..e.len() {
        let flat = richardson_derivative(h, |s| {
            let r = residues_moved(ctx, ch_of, lambda0, m, s)?;
            Ok(r.iter().flat_map(|x| x.as_slice().to_vec()).collect())
        })?;
        for n in 0..e.len() {
            let fd = CMatrix::from_vec(2, 2, flat[4 * n..4 * n + 4].to_vec())?;
            let (rhs, var) = schlesinger_rhs(&a, &e, lambda0, m, n);
            out.push((m, n, SchlesingerReport { residual: fd.max_diff(&rhs), variant_residual: fd.max_diff(&var), fd, rhs }));
        }
    }
    Ok(out)
}

/// `R^H(λ_target)` on the curve with `e_moved` shifted by `s`, for the
/// divisor `t`.
fn connection_moved(ctx: &KernelContext, t: &[usize], moved: usize, target: usize, s: f64) -> Result<C64> {
    let c = perturbed_curve(ctx.curve(), moved, C64::new(s, 0.0))?;
    let k = KernelContext::new(c)?;
    let geo = BranchGeometry::new(&k)?;
    let dc = divisor_characteristic(&k, &geo, t)?;
    projective_connection(&k, &dc, target)
}

/// `|∂R^H(λ_m)/∂λ_n − ∂R^H(λ_n)/∂λ_m|` with the divisor `t`.
pub fn compatibility_check(ctx: &KernelContext, t: &[usize], m: usize, n: usize, h: f64) -> Result<f64> {
    if m == n {
        return Err(Error::InvalidInput("compatibility needs two different branch points"));
    }
    let a = richardson_derivative(h, |s| Ok(vec![connection_moved(ctx, t, n, m, s)?]))?;
    let b = richardson_derivative(h, |s| Ok(vec![connection_moved(ctx, t, m, n, s)?]))?;
    Ok((a[0] - b[0]).norm())
}

#[derive(Debug, Clone)]
pub struct FFactorReport {
    /// FD of `ln F` from the closed form.
    pub fd: C64,
    /// `R^H(λ_m)/24`.
    pub hurwitz: C64,
    /// `−res Σ_{j<k} w(λ^{(j)}, λ^{(k)})/dλ²`.
    pub bergmann: C64,
    pub residual_hurwitz: f64,
    pub residual_bergmann: f64,
    /// `|R^H/24 − Bergmann residue|`, the two routes against each other.
    pub routes: f64,
}

pub fn f_factor_check(ctx: &KernelContext, m: usize, h: f64) -> Result<FFactorReport> {
    let geo = BranchGeometry::new(ctx)?;
    let dc = geo.select_divisor(ctx)?;
    let hurwitz = projective_connection(ctx, &dc, m)? / 24.0;
    let bergmann = bergmann_pair_residue(ctx, m)?;
    let fd = dlog_f(ctx, m, h)?;
    Ok(FFactorReport {
        fd,
        hurwitz,
        bergmann,
        residual_hurwitz: (fd - hurwitz).norm(),
        residual_bergmann: (fd - bergmann).norm(),
        routes: (hurwitz - bergmann).norm(),
    })
}

/// Slope of `ln|F|` against `ln|λ_m − λ_n|` as e_m approaches e_n along
/// the segment joining them, from separations d·2^{-k}, k = 1..=steps.
pub fn collision_slope(ctx: &KernelContext, m: usize, n: usize, steps: usize) -> Result<f64> {
    let e = ctx.curve().branch_points().to_vec();
    let d0 = e[m] - e[n];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 1..=steps {
        let s = 0.5f64.powi(k as i32);
        let c = perturbed_curve(ctx.curve(), m, d0 * (s - 1.0))?;
        let k = KernelContext::new(c)?;
        let t = tau_closed_form(&k, &ThetaChar::zero(k.genus()), None)?;
        xs.push((d0.norm() * s).ln());
        ys.push(t.log_f.re);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}
