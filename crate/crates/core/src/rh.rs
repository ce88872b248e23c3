//! 2×2 Riemann–Hilbert problem with off-diagonal quasi-permutation
//! monodromies, solved by `Ψ_kj(λ) = S(λ^{(j)}, λ_0^{(k)})·(λ − λ_0)`.
//!
//! Column j follows the lift of λ continued from the j-th lift of λ_0 along
//! the automatic route, so Ψ(λ_0) = I. Monodromies are right holonomies:
//! continuing Ψ along γ gives `Ψ·M_γ`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::covering::{validate_quasi_perm, QuasiPermMatrix};
use crate::hyperelliptic::{circle_polyline, route, segment_distance, Lift};
use crate::kernels::{KPoint, KernelContext, SzegoKernel};
use crate::linalg::CMatrix;
use crate::theta::ThetaChar;
use crate::{Error, Result, C64};

/// Ψ at one point, with the route used and the sheet of each column.
#[derive(Debug, Clone)]
pub struct PsiEvaluation {
    pub lambda: C64,
    pub psi: CMatrix,
    pub path: Vec<C64>,
    pub sheets: [u8; 2],
}

/// Where column j lands after a loop: `U(P_j^γ) = U(P_{target}) + m + B n`
/// and `h̃(P_j^γ) = sigma·h̃(P_{target})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Intersection {
    pub target: usize,
    pub m: Vec<i64>,
    pub n: Vec<i64>,
    pub sigma: i8,
    /// Distance of the solved (m, n) from integers, and |σ ∓ 1|.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct MonodromyResult {
    pub n: usize,
    /// Spur from λ_0, counterclockwise polygon around λ_n, spur back.
    pub loop_path: Vec<C64>,
    /// Point on the spur where Ψ is compared.
    pub compare_at: C64,
    pub matrix: CMatrix,
    pub quasi: QuasiPermMatrix,
    pub intersections: Vec<Intersection>,
    pub predicted: CMatrix,
    pub max_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct ResidueSet {
    pub a: Vec<CMatrix>,
    /// Eigenvalues of each A_n.
    pub eigenvalues: Vec<[C64; 2]>,
    pub nodes: Vec<usize>,
    pub radii: Vec<f64>,
}

pub struct RhSolver<'a> {
    pub sk: SzegoKernel<'a>,
    pub lambda0: C64,
    pub base: [Lift; 2],
    base_pts: [KPoint; 2],
}

/// Eigenvalues of a 2×2 matrix.
pub fn eigenvalues2(m: &CMatrix) -> [C64; 2] {
    let t = m.trace();
    let d = m.det();
    let s = (t * t - d * 4.0).sqrt();
    [(t + s) * 0.5, (t - s) * 0.5]
}

impl<'a> RhSolver<'a> {
    pub fn new(ctx: &'a KernelContext, ch: ThetaChar, lambda0: C64) -> Result<Self> {
        let (idx, d) = ctx.curve().nearest_branch_point(lambda0);
        if d <= ctx.curve().route_margin() {
            return Err(Error::SingularPoint(idx));
        }
        let sk = SzegoKernel::new(ctx, ch)?;
        let l1 = ctx.lift(lambda0, 1)?;
        let l2 = ctx.abel.flip_sheet(&ctx.tracer(), &l1)?;
        let base_pts = [ctx.point(&l1)?, ctx.point(&l2)?];
        Ok(RhSolver { sk, lambda0, base: [l1, l2], base_pts })
    }

    pub fn ctx(&self) -> &'a KernelContext {
        self.sk.ctx
    }

    /// Continue both column lifts along a polyline.
    pub fn continue_pair(&self, from: &[Lift; 2], vertices: &[C64]) -> Result<[Lift; 2]> {
        let tr = self.ctx().tracer();
        Ok([tr.polyline(&from[0], vertices)?, tr.polyline(&from[1], vertices)?])
    }

    /// Column lifts over `lambda` along the automatic route from λ_0.
    pub fn lifts_at(&self, lambda: C64) -> Result<([Lift; 2], Vec<C64>)> {
        let (idx, d) = self.ctx().curve().nearest_branch_point(lambda);
        if d <= self.ctx().curve().tol_geom() {
            return Err(Error::SingularPoint(idx));
        }
        let path = route(self.ctx().curve(), self.lambda0, lambda);
        Ok((self.continue_pair(&self.base, &path[1..])?, path))
    }

    /// Ψ from column lifts.
    pub fn psi_from(&self, lifts: &[Lift; 2]) -> Result<CMatrix> {
        let lam = lifts[0].lambda;
        if lam == self.lambda0 && lifts[0].u == self.base[0].u && lifts[1].u == self.base[1].u {
            return Ok(CMatrix::identity(2));
        }
        let ps = [self.ctx().point(&lifts[0])?, self.ctx().point(&lifts[1])?];
        let e0 = lam - self.lambda0;
        let mut m = CMatrix::zeros(2, 2);
        for k in 0..2 {
            for j in 0..2 {
                m[(k, j)] = self.sk.value(&ps[j], &self.base_pts[k])? * e0;
            }
        }
        Ok(m)
    }

    /// Ψ and Ψ_λ from column lifts.
    pub fn psi_and_derivative(&self, lifts: &[Lift; 2]) -> Result<(CMatrix, CMatrix)> {
        let lam = lifts[0].lambda;
        let ps = [self.ctx().point(&lifts[0])?, self.ctx().point(&lifts[1])?];
        let e0 = lam - self.lambda0;
        let mut m = CMatrix::zeros(2, 2);
        let mut dm = CMatrix::zeros(2, 2);
        for k in 0..2 {
            for j in 0..2 {
                let (s, ds) = self.sk.value_and_derivative(&ps[j], &self.base_pts[k])?;
                m[(k, j)] = s * e0;
                dm[(k, j)] = ds * e0 + s;
            }
        }
        Ok((m, dm))
    }

    /// `Ψ_λ Ψ^{-1}`.
    pub fn log_derivative_from(&self, lifts: &[Lift; 2]) -> Result<CMatrix> {
        let (m, dm) = self.psi_and_derivative(lifts)?;
        let inv = m.inverse().ok_or(Error::SingularPoint(usize::MAX))?;
        Ok(&dm * &inv)
    }

    pub fn psi(&self, lambda: C64) -> Result<PsiEvaluation> {
        let (lifts, path) = self.lifts_at(lambda)?;
        let psi = self.psi_from(&lifts)?;
        let curve = self.ctx().curve();
        let sheets = [curve.sheet_of(lifts[0].lambda, lifts[0].w), curve.sheet_of(lifts[1].lambda, lifts[1].w)];
        Ok(PsiEvaluation { lambda, psi, path, sheets })
    }

    /// `Ψ_λΨ^{-1}` at `lambda`.
    pub fn log_derivative(&self, lambda: C64) -> Result<CMatrix> {
        let (lifts, _) = self.lifts_at(lambda)?;
        self.log_derivative_from(&lifts)
    }

    /// Radius of the loop around λ_n and the spur end point.
    fn loop_geometry(&self, n: usize) -> Result<(f64, C64)> {
        let curve = self.ctx().curve();
        let e = curve.branch_points();
        if n >= e.len() {
            return Err(Error::IndexOutOfRange { index: n, limit: e.len() });
        }
        let d0 = (self.lambda0 - e[n]).norm();
        let radius = 0.3 * curve.separation_of(n).min(d0);
        let dir = (self.lambda0 - e[n]) / d0;
        let entry = e[n] + dir * radius;
        for (i, ei) in e.iter().enumerate() {
            if i != n && segment_distance(self.lambda0, entry, *ei).0 <= curve.route_margin() {
                return Err(Error::LoopConstructionFailed(n));
            }
        }
        Ok((radius, entry))
    }

    /// The generator loop γ_n as a closed polyline starting at λ_0.
    pub fn generator_loop(&self, n: usize) -> Result<Vec<C64>> {
        let (radius, entry) = self.loop_geometry(n)?;
        let e = self.ctx().curve().branch_points()[n];
        let mut v = vec![self.lambda0];
        v.extend(circle_polyline(e, radius, entry - e, 64));
        v.push(self.lambda0);
        Ok(v)
    }

    /// Generator indices ordered by increasing arg(λ_n − λ_0) in (−π, π].
    pub fn generator_order(&self) -> Vec<usize> {
        let e = self.ctx().curve().branch_points();
        let mut idx: Vec<usize> = (0..e.len()).collect();
        idx.sort_by(|a, b| {
            let ta = (e[*a] - self.lambda0).arg();
            let tb = (e[*b] - self.lambda0).arg();
            ta.partial_cmp(&tb).unwrap()
        });
        idx
    }

    /// Right holonomy of Ψ along γ_n, with the prediction from lattice data.
    pub fn monodromy(&self, n: usize) -> Result<MonodromyResult> {
        let (_, entry) = self.loop_geometry(n)?;
        let lp = self.generator_loop(n)?;
        let s = self.lambda0 + (entry - self.lambda0) * 0.5;
        let at_s = self.continue_pair(&self.base, &[s])?;
        let at_entry = self.continue_pair(&at_s, &[entry])?;
        let around = self.continue_pair(&at_entry, &lp[2..lp.len() - 1])?;
        let back = self.continue_pair(&around, &[s])?;
        let psi_ref = self.psi_from(&at_s)?;
        let psi_cont = self.psi_from(&back)?;
        let inv = psi_ref.inverse().ok_or(Error::SingularPoint(n))?;
        let matrix = &inv * &psi_cont;
        let tol = self.ctx().tolerances();
        let quasi = validate_quasi_perm(&matrix, tol.mon)?;

        let mut intersections = Vec::new();
        let curve = self.ctx().curve();
        for j in 0..2 {
            let sheet = curve.sheet_of(back[j].lambda, back[j].w);
            let target = (0..2).find(|t| curve.sheet_of(at_s[*t].lambda, at_s[*t].w) == sheet).unwrap();
            let pu = self.ctx().abel.value(&back[j]);
            let qu = self.ctx().abel.value(&at_s[target]);
            let du: Vec<C64> = pu.iter().zip(&qu).map(|(a, b)| a - b).collect();
            let (nn, mm) = self.ctx().rm.lattice_coordinates(&du);
            let mut residual = 0.0f64;
            let m: Vec<i64> = mm.iter().map(|x| {
                residual = residual.max((x - x.round()).abs());
                x.round() as i64
            }).collect();
            let nv: Vec<i64> = nn.iter().map(|x| {
                residual = residual.max((x - x.round()).abs());
                x.round() as i64
            }).collect();
            let ratio = back[j].h.unwrap() / at_s[target].h.unwrap();
            let sigma: i8 = if ratio.re >= 0.0 { 1 } else { -1 };
            residual = residual.max((ratio - sigma as f64).norm());
            intersections.push(Intersection { target, m, n: nv, sigma, residual });
        }
        let predicted = predict_monodromy(&self.sk.ch, &self.ctx().star, &intersections)?;
        let max_deviation = predicted.max_diff(&matrix);
        Ok(MonodromyResult { n, loop_path: lp, compare_at: s, matrix, quasi, intersections, predicted, max_deviation })
    }

    /// `A_n = (1/2πi)∮ Ψ_λΨ^{-1}dλ` on circles of radius 0.25·(distance to
    /// the nearest other singular point), trapezoid rule doubled from 32
    /// nodes until the change is below tol_res.
    pub fn residues(&self) -> Result<ResidueSet> {
        let e = self.ctx().curve().branch_points().to_vec();
        let mut out = ResidueSet { a: Vec::new(), eigenvalues: Vec::new(), nodes: Vec::new(), radii: Vec::new() };
        for n in 0..e.len() {
            let radius = 0.25 * self.ctx().curve().separation_of(n);
            let (a, k) = self.residue_at(n, radius)?;
            out.eigenvalues.push(eigenvalues2(&a));
            out.a.push(a);
            out.nodes.push(k);
            out.radii.push(radius);
        }
        Ok(out)
    }

    /// Lifts of both columns at `k` equally spaced points of the circle
    /// |λ − λ_n| = radius, continued from λ_0.
    pub fn circle_lifts(&self, n: usize, radius: f64, k: usize) -> Result<Vec<[Lift; 2]>> {
        let e = self.ctx().curve().branch_points()[n];
        let dir = if (self.lambda0 - e).norm() > 0.0 { self.lambda0 - e } else { C64::new(1.0, 0.0) };
        let start = e + dir * (radius / dir.norm());
        let path = route(self.ctx().curve(), self.lambda0, start);
        let mut cur = self.continue_pair(&self.base, &path[1..])?;
        let pts = circle_polyline(e, radius, dir, k);
        let mut out = Vec::with_capacity(k);
        out.push(cur.clone());
        for p in &pts[1..k] {
            cur = self.continue_pair(&cur, &[*p])?;
            out.push(cur.clone());
        }
        Ok(out)
    }

    pub fn residue_at(&self, n: usize, radius: f64) -> Result<(CMatrix, usize)> {
        let e = self.ctx().curve().branch_points()[n];
        let tol = self.ctx().tolerances().res;
        let eval = |k: usize| -> Result<CMatrix> {
            let mut acc = CMatrix::zeros(2, 2);
            for l in self.circle_lifts(n, radius, k)? {
                let f = self.log_derivative_from(&l)?;
                acc = &acc + &f.scale((l[0].lambda - e) / k as f64);
            }
            Ok(acc)
        };
        let mut k = 32;
        let mut prev = eval(k)?;
        loop {
            k *= 2;
            let cur = eval(k)?;
            let change = cur.max_diff(&prev) / cur.max_abs().max(1.0);
            if change < tol {
                return Ok((cur, k));
            }
            if k >= 1024 {
                return Err(Error::QuadratureFailure { change });
            }
            prev = cur;
        }
    }
}

/// `M_{t,j} = σ_j exp(2πi[(p+p*)·m_j − (q+q*)·n_j])` with `t` the target
/// column of column j.
pub fn predict_monodromy(ch: &ThetaChar, star: &ThetaChar, data: &[Intersection]) -> Result<CMatrix> {
    let n = data.len();
    let mut out = CMatrix::zeros(n, n);
    for (j, d) in data.iter().enumerate() {
        if d.target >= n {
            return Err(Error::IndexOutOfRange { index: d.target, limit: n });
        }
        let mut ph = C64::new(0.0, 0.0);
        for a in 0..ch.genus() {
            ph += (ch.p[a] + star.p[a]) * d.m[a] as f64 - (ch.q[a] + star.q[a]) * d.n[a] as f64;
        }
        out[(d.target, j)] = (C64::new(0.0, 2.0 * PI) * ph).exp() * d.sigma as f64;
    }
    Ok(out)
}

/// Ordered product `M_{o_last} ⋯ M_{o_first}` and its distance from I.
pub fn monodromy_product(ms: &[CMatrix], order: &[usize]) -> (CMatrix, f64) {
    let mut p = CMatrix::identity(ms[0].rows());
    for i in order {
        p = &ms[*i] * &p;
    }
    let d = p.max_diff(&CMatrix::identity(p.rows()));
    (p, d)
}

/// Product of predicted matrices in generator order must be the identity.
pub fn check_layout(predicted: &[CMatrix], order: &[usize], tol: f64) -> Result<f64> {
    let (_, d) = monodromy_product(predicted, order);
    if d > tol {
        return Err(Error::InconsistentLayout("predicted monodromies do not multiply to the identity"));
    }
    Ok(d)
}
