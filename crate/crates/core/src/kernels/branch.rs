//! Branch-point data: Abel images of the branch points, the vector of
//! Riemann constants, even characteristics of divisors `T`, the Hurwitz
//! projective connection at branch points and the Thomae check.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{bilinear, KernelContext};
use crate::hyperelliptic::{route, Tracer};
use crate::theta::{theta, ThetaChar, ThetaEvaluation};
use crate::{Error, Result, C64};

/// Abel images of the branch points relative to `e_0` (the first branch
/// point), and the vector of Riemann constants for that basepoint.
#[derive(Debug, Clone)]
pub struct BranchGeometry {
    /// `rel[i] = U(e_i) − U(e_0)`.
    pub rel: Vec<Vec<C64>>,
    pub riemann_constant: Vec<C64>,
    /// `K = B·p_K + q_K` as a half-integer characteristic.
    pub k_char: ThetaChar,
}

/// Even characteristic attached to a divisor `T` of g+1 branch points.
#[derive(Debug, Clone)]
pub struct DivisorChar {
    pub t: Vec<usize>,
    pub ch: ThetaChar,
    /// Distance of the solved `(p, q)` from the half-integer lattice.
    pub residual: f64,
    pub theta0: ThetaEvaluation,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn half_round(x: f64) -> (f64, f64) {
    let t = (2.0 * x).round();
    let red = (t - 2.0 * (0.5 * t).floor()) * 0.5;
    (red, (x - 0.5 * t).abs())
}

impl BranchGeometry {
    pub fn new(ctx: &KernelContext) -> Result<Self> {
        let curve = ctx.curve();
        let g = ctx.genus();
        let tr = Tracer::new(curve);
        let bp = curve.basepoint();
        let start = tr.start(bp);
        let mut abs = Vec::new();
        for (i, e) in curve.branch_points().iter().enumerate() {
            let d = bp.lambda - e;
            let q = e + d * (0.2 * curve.separation_of(i) / d.norm());
            let verts = route(curve, bp.lambda, q);
            let l = tr.polyline(&start, &verts[1..])?;
            let raw = tr.integral_to_branch_point(&l, i)?;
            abs.push(ctx.abel.periods.normalize(&raw));
        }
        let rel: Vec<Vec<C64>> = abs.iter().map(|u| u.iter().zip(&abs[0]).map(|(a, b)| a - b).collect()).collect();

        let tol = ctx.tolerances();
        let divisors = if g == 1 { vec![Vec::new()] } else { combinations(rel.len(), g - 1) };
        let mut found = Vec::new();
        for cand in ThetaChar::all_half_integer(g) {
            let k: Vec<C64> = half_period(ctx, &cand);
            let mut ok = true;
            for d in &divisors {
                let mut z: Vec<C64> = k.iter().map(|x| -x).collect();
                for i in d {
                    for a in 0..g {
                        z[a] += rel[*i][a];
                    }
                }
                let ev = theta(&ThetaChar::zero(g), &z, &ctx.rm, tol.theta)?;
                if ev.value.norm() > tol.alg.sqrt() * ev.scale {
                    ok = false;
                    break;
                }
            }
            if ok {
                found.push((cand, k));
            }
        }
        if found.len() != 1 {
            return Err(Error::RiemannConstantUndetermined { candidates: found.len() });
        }
        let (k_char, riemann_constant) = found.pop().unwrap();
        Ok(BranchGeometry { rel, riemann_constant, k_char })
    }
}

fn half_period(ctx: &KernelContext, ch: &ThetaChar) -> Vec<C64> {
    let b = ctx.rm.matrix();
    let bp = b.mul_vec(&ch.p);
    bp.iter().zip(&ch.q).map(|(x, y)| x + y).collect()
}

/// Solve `B p + q = Σ_{i∈T} U(e_i) − K` and reduce to `{0, 1/2}`.
pub fn divisor_characteristic(ctx: &KernelContext, geo: &BranchGeometry, t: &[usize]) -> Result<DivisorChar> {
    let g = ctx.genus();
    let mut z: Vec<C64> = geo.riemann_constant.iter().map(|x| -x).collect();
    for i in t {
        let r = geo.rel.get(*i).ok_or(Error::IndexOutOfRange { index: *i, limit: geo.rel.len() })?;
        for a in 0..g {
            z[a] += r[a];
        }
    }
    let (p, q) = ctx.rm.lattice_coordinates(&z);
    let mut residual = 0.0f64;
    let mut pr = Vec::with_capacity(g);
    let mut qr = Vec::with_capacity(g);
    for a in 0..g {
        let (x, e) = half_round(p[a]);
        pr.push(x);
        residual = residual.max(e);
        let (y, e) = half_round(q[a]);
        qr.push(y);
        residual = residual.max(e);
    }
    let ch = ThetaChar::real(&pr, &qr);
    let theta0 = theta(&ch, &vec![C64::new(0.0, 0.0); g], &ctx.rm, ctx.tolerances().theta)?;
    let rel = theta0.value.norm() / theta0.scale;
    if rel <= ctx.tolerances().nonsing {
        return Err(Error::DegenerateDivisorT(rel));
    }
    Ok(DivisorChar { t: t.to_vec(), ch, residual, theta0 })
}

impl BranchGeometry {
    /// All divisors of g+1 branch points containing `e_0`, in lexicographic
    /// order.
    pub fn divisors(&self, g: usize) -> Vec<Vec<usize>> {
        combinations(self.rel.len() - 1, g).into_iter().map(|c| {
            let mut t = vec![0];
            t.extend(c.iter().map(|i| i + 1));
            t
        }).collect()
    }

    /// First nondegenerate divisor in lexicographic order.
    pub fn select_divisor(&self, ctx: &KernelContext) -> Result<DivisorChar> {
        for t in self.divisors(ctx.genus()) {
            match divisor_characteristic(ctx, self, &t) {
                Ok(d) => return Ok(d),
                Err(Error::DegenerateDivisorT(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::NoneFound)
    }
}

fn eps(t: &[usize], i: usize) -> f64 {
    if t.contains(&i) {
        1.0
    } else {
        -1.0
    }
}

/// `Σ_β C[β][α] λ^β`.
fn normalized_poly(ctx: &KernelContext, lambda: C64) -> Vec<C64> {
    let g = ctx.genus();
    let mut pw = vec![C64::new(1.0, 0.0); g];
    for b in 1..g {
        pw[b] = pw[b - 1] * lambda;
    }
    ctx.abel.periods.c.tmul_vec(&pw)
}

/// Hurwitz projective connection at `e_m` in the local parameter
/// `x = √(λ − e_m)`, from the exact x → 0 limit of the three-term formula.
pub fn projective_connection(ctx: &KernelContext, dc: &DivisorChar, m: usize) -> Result<C64> {
    let e = ctx.curve().branch_points();
    if m >= e.len() {
        return Err(Error::IndexOutOfRange { index: m, limit: e.len() });
    }
    let em = e[m];
    let mut sum = C64::new(0.0, 0.0);
    let mut prod = C64::new(1.0, 0.0);
    for (i, ei) in e.iter().enumerate() {
        if i != m {
            sum += eps(&dc.t, i) / (em - ei);
            prod *= em - ei;
        }
    }
    let poly = normalized_poly(ctx, em);
    let ww = bilinear(&dc.theta0.hessian, &poly, &poly) * 4.0 / prod;
    Ok(sum * (3.0 * eps(&dc.t, m)) - ww * 6.0 / dc.theta0.value)
}

/// The same quantity from samples at `|x| ∈ {1, 1/2, 1/4}·10⁻²·√sep` with
/// two Richardson steps in x².
pub fn projective_connection_sampled(ctx: &KernelContext, dc: &DivisorChar, m: usize) -> Result<C64> {
    let curve = ctx.curve();
    let e = curve.branch_points();
    if m >= e.len() {
        return Err(Error::IndexOutOfRange { index: m, limit: e.len() });
    }
    let x0 = 1e-2 * curve.separation_of(m).sqrt();
    let sample = |x: f64| -> C64 {
        // λ − e_m is taken as x² exactly; rounding it would be amplified by 1/x²
        let lam = e[m] + x * x;
        let diff = |i: usize| if i == m { C64::new(x * x, 0.0) } else { lam - e[i] };
        let w = (0..e.len()).fold(C64::new(1.0, 0.0), |p, i| p * diff(i)).sqrt();
        let d = ctx.abel.periods.normalized(curve, lam, w);
        let wx: Vec<C64> = d.iter().map(|v| v * (2.0 * x)).collect();
        let ratio: C64 = (0..e.len()).map(|i| eps(&dc.t, i) / diff(i)).sum::<C64>() * (2.0 * x);
        let theta_term = bilinear(&dc.theta0.hessian, &wx, &wx) * 6.0 / dc.theta0.value;
        C64::new(-1.5 / (x * x), 0.0) + ratio * ratio * 0.375 - theta_term
    };
    let r: Vec<C64> = [1.0, 0.5, 0.25].iter().map(|s| sample(s * x0)).collect();
    let r1a = (r[1] * 4.0 - r[0]) / 3.0;
    let r1b = (r[2] * 4.0 - r[1]) / 3.0;
    Ok((r1b * 16.0 - r1a) / 15.0)
}

/// Ratios `Θ[T](0)^k / ((det A)² Π_{i<j∈T}(e_i−e_j) Π_{i<j∉T}(e_i−e_j))`
/// over all divisors through `e_0`, for k = 1, 2, 4.
#[derive(Debug, Clone)]
pub struct ThomaeReport {
    pub powers: Vec<u32>,
    /// Relative spread (up to sign) of the ratio across divisors, per power.
    pub spread: Vec<f64>,
    /// Power with the smallest spread.
    pub power: u32,
    pub divisors: usize,
}

pub fn thomae_check(ctx: &KernelContext, geo: &BranchGeometry) -> Result<ThomaeReport> {
    let e = ctx.curve().branch_points();
    let det_a = ctx.abel.periods.a.det();
    let powers = vec![1u32, 2, 4];
    let mut ratios: Vec<Vec<C64>> = vec![Vec::new(); powers.len()];
    let mut count = 0;
    for t in geo.divisors(ctx.genus()) {
        let dc = divisor_characteristic(ctx, geo, &t)?;
        let mut den = det_a * det_a;
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                if t.contains(&i) == t.contains(&j) {
                    den *= e[i] - e[j];
                }
            }
        }
        for (k, p) in powers.iter().enumerate() {
            ratios[k].push(dc.theta0.value.powu(*p) / den);
        }
        count += 1;
    }
    let spread: Vec<f64> = ratios
        .iter()
        .map(|r| {
            r.iter().fold(0.0f64, |acc, x| acc.max((x - r[0]).norm().min((x + r[0]).norm()) / r[0].norm()))
        })
        .collect();
    let best = (0..powers.len()).fold(0, |b, k| if spread[k] < spread[b] { k } else { b });
    Ok(ThomaeReport { power: powers[best], powers, spread, divisors: count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperelliptic::HyperellipticCurve;
    use crate::{c, Tolerances};

    fn ctx(pts: &[C64]) -> KernelContext {
        let cu = HyperellipticCurve::new(pts, c(0.37, 2.9), 1, Tolerances::default()).unwrap();
        KernelContext::new(cu).unwrap()
    }

    #[test]
    fn genus_one_constant_is_odd() {
        let k = ctx(&[c(-1.0, 0.2), c(-0.1, -0.5), c(0.6, 0.4), c(1.4, -0.3)]);
        let geo = BranchGeometry::new(&k).unwrap();
        assert_eq!(geo.k_char.parity(), Some(crate::theta::Parity::Odd));
    }

    #[test]
    fn divisors_and_connection() {
        let k = ctx(&[c(-1.2, 0.3), c(-0.4, -0.6), c(0.1, 0.5), c(0.8, -0.2), c(1.3, 0.7), c(2.0, -0.4)]);
        let geo = BranchGeometry::new(&k).unwrap();
        let ds = geo.divisors(2);
        assert_eq!(ds.len(), 10);
        let d0 = divisor_characteristic(&k, &geo, &ds[0]).unwrap();
        let d1 = divisor_characteristic(&k, &geo, &ds[7]).unwrap();
        assert!(d0.residual < 1e-10 && d1.residual < 1e-10);
        assert_eq!(d0.ch.parity(), Some(crate::theta::Parity::Even));
        for m in 0..6 {
            let r0 = projective_connection(&k, &d0, m).unwrap();
            let r1 = projective_connection(&k, &d1, m).unwrap();
            let rs = projective_connection_sampled(&k, &d0, m).unwrap();
            assert!((r0 - r1).norm() < 1e-6 * r0.norm().max(1.0), "{m} {r0} {r1}");
            assert!((r0 - rs).norm() < 1e-6 * r0.norm().max(1.0), "{m} {r0} {rs}");
        }
        let th = thomae_check(&k, &geo).unwrap();
        assert_eq!(th.power, 4);
        assert!(th.spread[2] < 1e-8, "{:?}", th.spread);
    }
}
