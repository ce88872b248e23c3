//! Analytic continuation of `w`, the spinor and the raw Abel integrals along
//! polylines in the λ-plane.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;


use super::curve::{HyperellipticCurve, SurfacePoint};
use crate::quadrature::{gauss_legendre, StepRule};
use crate::{Error, Result, C64};

/// State carried along a path: position, `w`, the raw integrals
/// `∫ λ^{β−1} dλ / w` from the start of continuation and, optionally, the
/// spinor `h̃` with `h̃² = P(λ)/w`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lift {
    pub lambda: C64,
    pub w: C64,
    pub u: Vec<C64>,
    pub h: Option<C64>,
}

impl Lift {
    pub fn surface_point(&self, curve: &HyperellipticCurve) -> SurfacePoint {
        SurfacePoint { lambda: self.lambda, sheet: curve.sheet_of(self.lambda, self.w), w: self.w }
    }
}

/// A polyline with an explicit lifted start.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePath {
    pub start: SurfacePoint,
    /// Vertices after the start point.
    pub vertices: Vec<C64>,
}

/// Pick the square root of `sq` closest to `prev`.
#[inline]
pub fn nearest_root(sq: C64, prev: C64) -> C64 {
    let r = sq.sqrt();
    if (r - prev).norm_sqr() <= (r + prev).norm_sqr() {
        r
    } else {
        -r
    }
}

#[inline]
fn continuity_ok(new: C64, prev: C64) -> bool {
    (new - prev).norm() < 0.5 * (new + prev).norm()
}

fn poly_eval(coef: &[C64], lambda: C64) -> C64 {
    coef.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * lambda + c)
}

/// Continuation engine. `spinor` holds the coefficients of `P` in
/// `h̃² = P(λ)/w` (lowest degree first).
pub struct Tracer<'a> {
    curve: &'a HyperellipticCurve,
    spinor: Option<Vec<C64>>,
    rule: StepRule,
    step_factor: f64,
}

impl<'a> Tracer<'a> {
    pub fn new(curve: &'a HyperellipticCurve) -> Self {
        Tracer { curve, spinor: None, rule: StepRule::new(12), step_factor: 0.25 }
    }

    pub fn with_spinor(curve: &'a HyperellipticCurve, poly: Vec<C64>) -> Self {
        Tracer { curve, spinor: Some(poly), rule: StepRule::new(12), step_factor: 0.25 }
    }

    pub fn curve(&self) -> &HyperellipticCurve {
        self.curve
    }

    /// `h̃²` at (λ, w).
    pub fn spinor_squared(&self, lambda: C64, w: C64) -> Option<C64> {
        self.spinor.as_ref().map(|p| poly_eval(p, lambda) / w)
    }

    /// Lift over `lambda` on `sheet`, with zero raw integrals and the principal
    /// spinor root.
    pub fn start(&self, p: SurfacePoint) -> Lift {
        let h = self.spinor_squared(p.lambda, p.w).map(|s| s.sqrt());
        Lift { lambda: p.lambda, w: p.w, u: vec![C64::new(0.0, 0.0); self.curve.genus()], h }
    }

    /// Continue along the straight segment to `to`.
    pub fn segment(&self, state: &mut Lift, to: C64) -> Result<()> {
        let tol_geom = self.curve.tol_geom();
        let total = (to - state.lambda).norm();
        if total == 0.0 {
            return Ok(());
        }
        let dir = (to - state.lambda) / total;
        let mut done = 0.0;
        let mut shrink = 1.0;
        let mut stall = 0;
        while total - done > 1e-15 * total {
            let (idx, dist) = self.curve.nearest_branch_point(state.lambda);
            if dist <= tol_geom {
                return Err(Error::PathTooCloseToBranchPoint { index: idx, distance: dist });
            }
            let len = (self.step_factor * dist * shrink).min(total - done);
            let target = if total - done - len <= 1e-15 * total { to } else { state.lambda + dir * len };
            match self.step(state, target) {
                Some(next) => {
                    *state = next;
                    done += len;
                    shrink = (shrink * 2.0).min(1.0);
                    stall = 0;
                }
                None => {
                    shrink *= 0.5;
                    stall += 1;
                    if stall > 40 {
                        return Err(Error::PathTooCloseToBranchPoint { index: idx, distance: dist });
                    }
                }
            }
        }
        Ok(())
    }

    fn step(&self, state: &Lift, to: C64) -> Option<Lift> {
        let a = state.lambda;
        let half = (to - a) * 0.5;
        let mid = a + half;
        let g = self.curve.genus();
        let mut w = state.w;
        let mut h = state.h;
        let mut acc = vec![C64::new(0.0, 0.0); g];
        for (t, wt) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let lam = mid + half * *t;
            let nw = nearest_root(self.curve.w_squared(lam), w);
            if !continuity_ok(nw, w) {
                return None;
            }
            w = nw;
            if let Some(hp) = h {
                let nh = nearest_root(self.spinor_squared(lam, w).unwrap(), hp);
                if !continuity_ok(nh, hp) {
                    return None;
                }
                h = Some(nh);
            }
            let mut pw = w.inv() * *wt;
            for beta in 0..g {
                acc[beta] += pw;
                pw *= lam;
            }
        }
        let nw = nearest_root(self.curve.w_squared(to), w);
        if !continuity_ok(nw, w) {
            return None;
        }
        if let Some(hp) = h {
            let nh = nearest_root(self.spinor_squared(to, nw).unwrap(), hp);
            if !continuity_ok(nh, hp) {
                return None;
            }
            h = Some(nh);
        }
        let u = state.u.iter().zip(&acc).map(|(u, a)| u + a * half).collect();
        Some(Lift { lambda: to, w: nw, u, h })
    }

    /// Continue along a polyline (vertices after the current position).
    pub fn polyline(&self, start: &Lift, vertices: &[C64]) -> Result<Lift> {
        let mut s = start.clone();
        for v in vertices {
            self.segment(&mut s, *v)?;
        }
        Ok(s)
    }

    /// Continue along a `SurfacePath` from its start point.
    pub fn continue_path(&self, path: &SurfacePath) -> Result<Lift> {
        self.polyline(&self.start(path.start), &path.vertices)
    }

    /// Raw integrals `∫ λ^{β−1}dλ/w` from `state` to branch point `m`, moving
    /// straight towards it. The endpoint singularity is removed by
    /// `λ = e + (q − e)s²`.
    pub fn integral_to_branch_point(&self, state: &Lift, m: usize) -> Result<Vec<C64>> {
        let e = self.curve.branch_points()[m];
        let r = 0.25 * self.curve.separation_of(m);
        let mut s = state.clone();
        let d = (s.lambda - e).norm();
        if d > r {
            let q = e + (s.lambda - e) * (r / d);
            self.segment(&mut s, q)?;
        }
        let q = s.lambda;
        let sigma = (q - e).sqrt();
        let r1 = s.w / sigma;
        let g = self.curve.genus();
        let others: Vec<C64> =
            self.curve.branch_points().iter().enumerate().filter(|(i, _)| *i != m).map(|(_, z)| *z).collect();
        let eval = |n: usize| -> Vec<C64> {
            let (x, wts) = gauss_legendre(n);
            let mut acc = vec![C64::new(0.0, 0.0); g];
            let mut rr = r1;
            // nodes from s = 1 down to 0 so that R is continued from the known end
            for i in (0..n).rev() {
                let sv = 0.5 * (x[i] + 1.0);
                let lam = e + (q - e) * (sv * sv);
                let r2 = others.iter().fold(C64::new(1.0, 0.0), |p, z| p * (lam - z));
                rr = nearest_root(r2, rr);
                let mut pw = sigma * 2.0 * 0.5 * wts[i] / rr;
                for beta in 0..g {
                    acc[beta] -= pw;
                    pw *= lam;
                }
            }
            acc
        };
        let mut prev = eval(16);
        let mut n = 16;
        loop {
            n *= 2;
            let cur = eval(n);
            let scale = cur.iter().fold(1e-300f64, |a, z| a.max(z.norm()));
            let change = cur.iter().zip(&prev).fold(0.0f64, |a, (x, y)| a.max((x - y).norm())) / scale;
            if change < 1e-13 {
                return Ok(s.u.iter().zip(&cur).map(|(u, c)| u + c).collect());
            }
            if n >= 512 {
                return Err(Error::QuadratureFailure { change });
            }
            prev = cur;
        }
    }

    /// Piecewise-linear route from `from` to `to` that keeps the interior of
    /// each segment at least the routing margin away from branch points.
    pub fn route(&self, from: C64, to: C64) -> Vec<C64> {
        route(self.curve, from, to)
    }
}

/// Distance from `p` to segment [a, b] and the parameter of the closest point.
pub fn segment_distance(a: C64, b: C64, p: C64) -> (f64, f64) {
    let d = b - a;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return ((p - a).norm(), 0.0);
    }
    let t = (((p - a) * d.conj()).re / l2).clamp(0.0, 1.0);
    ((a + d * t - p).norm(), t)
}

/// Polyline from `from` to `to` (both included) with detours around branch
/// points that lie within the routing margin of a segment interior.
pub fn route(curve: &HyperellipticCurve, from: C64, to: C64) -> Vec<C64> {
    let margin = curve.route_margin();
    let mut pts = vec![from, to];
    for _ in 0..64 {
        let mut insert = None;
        'outer: for i in 0..pts.len() - 1 {
            let (a, b) = (pts[i], pts[i + 1]);
            for e in curve.branch_points() {
                if (a - e).norm() <= margin || (b - e).norm() <= margin {
                    continue;
                }
                let (d, t) = segment_distance(a, b, *e);
                if d < margin && t > 0.0 && t < 1.0 {
                    let dir = (b - a) / (b - a).norm();
                    let normal = C64::new(-dir.im, dir.re);
                    let side = ((a + (b - a) * t - e) * normal.conj()).re;
                    let sgn = if side >= 0.0 { 1.0 } else { -1.0 };
                    insert = Some((i + 1, e + normal * (2.0 * margin * sgn)));
                    break 'outer;
                }
            }
        }
        match insert {
            Some((i, v)) => pts.insert(i, v),
            None => break,
        }
    }
    pts
}

/// Counterclockwise regular polygon of `n` vertices around `center`, starting
/// and ending at `center + radius·dir`.
pub fn circle_polyline(center: C64, radius: f64, start_dir: C64, n: usize) -> Vec<C64> {
    let d = start_dir / start_dir.norm();
    (0..=n)
        .map(|k| center + d * C64::from_polar(radius, 2.0 * PI * k as f64 / n as f64))
        .collect()
}
