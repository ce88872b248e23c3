//! a- and b-periods of the holomorphic differentials `λ^{β−1}dλ/w`.
//!
//! Basis: `a_k` encircles cut k counterclockwise on sheet 1. `b_k` is a
//! rectangle enclosing `e_{2k}, …, e_{2g+1}` (one-based), crossing cut k and
//! cut g+1; its orientation is fixed so that Im B is positive definite.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;


use super::curve::HyperellipticCurve;
use super::path::nearest_root;
use crate::linalg::{CMatrix, CompensatedSum};
use crate::quadrature::gauss_legendre;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodData {
    /// `A[k][β] = ∮_{a_k} λ^β dλ / w` (zero-based β).
    pub a: CMatrix,
    /// Same over `b_k`.
    pub b_raw: CMatrix,
    /// `C = A^{-1}`; normalized differentials are `w_α = Σ_β C[β][α] λ^β dλ/w`.
    pub c: CMatrix,
    /// Normalized period matrix `B = B_raw · C`.
    pub b: CMatrix,
    /// Orientation of the b-rectangles: +1 clockwise, −1 counterclockwise.
    pub b_orientation: i8,
    /// `b_k = rectangle_k + Σ_j shift[k][j]·a_j`, chosen so that |Re B| ≤ 1/2
    /// entrywise.
    pub b_shift: Vec<Vec<i64>>,
    /// Nodes used in the final quadrature pass.
    pub nodes: usize,
    /// Relative change of the last node doubling.
    pub convergence: f64,
    pub asymmetry: f64,
    pub min_eig_im: f64,
    pub basis: String,
}

impl PeriodData {
    pub fn genus(&self) -> usize {
        self.a.rows()
    }

    /// Coefficients of the normalized differentials against dλ at (λ, w).
    pub fn normalized(&self, curve: &HyperellipticCurve, lambda: C64, w: C64) -> Vec<C64> {
        self.c.tmul_vec(&curve.raw_differentials(lambda, w))
    }

    /// Normalized Abel integral from raw integrals.
    pub fn normalize(&self, raw: &[C64]) -> Vec<C64> {
        self.c.tmul_vec(raw)
    }
}

/// `∫_{cut k} ... ` part: a-period of every raw differential.
fn cut_integrals(curve: &HyperellipticCurve, k: usize, x: &[f64], wts: &[f64]) -> Vec<C64> {
    let g = curve.genus();
    let e = curve.branch_points();
    let (a, b) = curve.cut(k);
    let m = (a + b) * 0.5;
    let h = (b - a) * 0.5;
    let mut acc: Vec<CompensatedSum> = vec![CompensatedSum::new(); g];
    let mut d = vec![C64::new(0.0, 0.0); e.len()];
    for (t, wt) in x.iter().zip(wts) {
        let th = t * core::f64::consts::FRAC_PI_2;
        let lam = m + h * th.sin();
        for (i, ei) in e.iter().enumerate() {
            d[i] = lam - ei;
        }
        // product of the other cut factors, analytic across cut k
        let mut wk = C64::new(1.0, 0.0);
        for l in 0..=g {
            if l != k {
                wk *= d[2 * l] * (d[2 * l + 1] / d[2 * l]).sqrt();
            }
        }
        let mut pw = C64::new(0.0, 2.0) * (wt * core::f64::consts::FRAC_PI_2) / wk;
        for beta in 0..g {
            acc[beta].add(pw);
            pw *= lam;
        }
    }
    acc.iter().map(|s| s.value()).collect()
}

/// `∫_{e_{2j+1}}^{e_{2j+2}} λ^β dλ / w_1` over gap j (zero-based, j < g).
fn gap_integrals(curve: &HyperellipticCurve, j: usize, x: &[f64], wts: &[f64]) -> Vec<C64> {
    let g = curve.genus();
    let e = curve.branch_points();
    let a = e[2 * j + 1];
    let b = e[2 * j + 2];
    let m = (a + b) * 0.5;
    let h = (b - a) * 0.5;
    let i = C64::new(0.0, 1.0);
    let others: Vec<C64> = e
        .iter()
        .enumerate()
        .filter(|(l, _)| *l != 2 * j + 1 && *l != 2 * j + 2)
        .map(|(_, z)| *z)
        .collect();
    let r_mid = curve.w1(m) / (i * h);
    let n = x.len();
    let mut vals = vec![C64::new(0.0, 0.0); n];
    let r_at = |lam: C64, prev: C64| nearest_root(others.iter().fold(C64::new(1.0, 0.0), |p, z| p * (lam - z)), prev);
    let theta = |t: f64| t * core::f64::consts::FRAC_PI_2;
    // continue R outward from the midpoint in both directions
    let mid_hi = n / 2;
    let mut r = r_mid;
    for idx in mid_hi..n {
        r = r_at(m + h * theta(x[idx]).sin(), r);
        vals[idx] = r;
    }
    let mut r = r_mid;
    for idx in (0..mid_hi).rev() {
        r = r_at(m + h * theta(x[idx]).sin(), r);
        vals[idx] = r;
    }
    let mut acc: Vec<CompensatedSum> = vec![CompensatedSum::new(); g];
    for idx in 0..n {
        let lam = m + h * theta(x[idx]).sin();
        let mut pw = (wts[idx] * core::f64::consts::FRAC_PI_2) / (i * vals[idx]);
        for beta in 0..g {
            acc[beta].add(pw);
            pw *= lam;
        }
    }
    acc.iter().map(|s| s.value()).collect()
}

fn raw_periods(curve: &HyperellipticCurve, n: usize) -> (CMatrix, CMatrix) {
    let g = curve.genus();
    let (x, w) = gauss_legendre(n);
    let mut a = CMatrix::zeros(g, g);
    for k in 0..g {
        let row = cut_integrals(curve, k, &x, &w);
        for beta in 0..g {
            a[(k, beta)] = row[beta];
        }
    }
    let gaps: Vec<Vec<C64>> = (0..g).map(|j| gap_integrals(curve, j, &x, &w)).collect();
    let mut braw = CMatrix::zeros(g, g);
    for k in 0..g {
        for beta in 0..g {
            let mut s = CompensatedSum::new();
            for gap in gaps.iter().skip(k) {
                s.add(gap[beta] * 2.0);
            }
            braw[(k, beta)] = s.value();
        }
    }
    (a, braw)
}

fn rel_change(a: &CMatrix, b: &CMatrix) -> f64 {
    a.max_diff(b) / a.max_abs().max(1e-300)
}

/// Periods by Gauss-Legendre quadrature in the angle variable of each cut
/// and gap, doubling the node count until the relative change falls below
/// the period tolerance.
pub fn compute_periods(curve: &HyperellipticCurve) -> Result<PeriodData> {
    let tol = curve.tolerances().periods;
    let g = curve.genus();
    let mut n = 16;
    let (mut a, mut braw) = raw_periods(curve, n);
    let mut change;
    loop {
        let n2 = 2 * n;
        let (a2, b2) = raw_periods(curve, n2);
        change = rel_change(&a2, &a).max(rel_change(&b2, &braw));
        a = a2;
        braw = b2;
        n = n2;
        if change < tol {
            break;
        }
        if n >= 8192 {
            return Err(Error::QuadratureFailure { change });
        }
    }
    let c = a.inverse().ok_or(Error::DegenerateCurve("a-period matrix is singular"))?;
    let mut b = &braw * &c;
    // the gap sums realise the clockwise rectangle; flip if Im B is negative
    let mut orientation = 1i8;
    if b[(0, 0)].im < 0.0 {
        orientation = -1;
        braw = braw.scale(C64::new(-1.0, 0.0));
        b = b.scale(C64::new(-1.0, 0.0));
    }
    let mut shift = vec![vec![0i64; g]; g];
    for k in 0..g {
        for j in 0..g {
            shift[k][j] = -(0.5 * (b[(k, j)].re + b[(j, k)].re)).round() as i64;
        }
    }
    for k in 0..g {
        for j in 0..g {
            let n = shift[k][j] as f64;
            b[(k, j)] += n;
            for beta in 0..g {
                let t = a[(j, beta)] * n;
                braw[(k, beta)] += t;
            }
        }
    }
    let asymmetry = b.max_diff(&b.transpose());
    let min_eig = b.imag_part().symmetric_eigenvalues()[0];
    if asymmetry > tol * b.max_abs().max(1.0) || min_eig <= 0.0 {
        return Err(Error::NotRiemannMatrix { asymmetry, min_eig });
    }
    // symmetrize away the quadrature-level asymmetry
    let b = CMatrix::from_fn(g, g, |i, j| (b[(i, j)] + b[(j, i)]) * 0.5);
    Ok(PeriodData {
        a,
        b_raw: braw,
        c,
        b,
        b_orientation: orientation,
        b_shift: shift,
        nodes: n,
        convergence: change,
        asymmetry,
        min_eig_im: min_eig,
        basis: format!(
            "branch points sorted by (Re, Im); cut k = [e(2k-1), e(2k)]; a_k counterclockwise around cut k on sheet 1; \
             b_k rectangle around e(2k)..e(2g+1) starting top-left on sheet 1, {}, plus integer multiples of a-cycles \
             making |Re B| <= 1/2",
            if orientation == 1 { "clockwise" } else { "counterclockwise" }
        ),
    })
}

/// Closed polyline representing `a_k` (zero-based): a counterclockwise
/// rectangle on sheet 1 whose vertical sides run through the neighbouring gaps.
pub fn a_cycle_polyline(curve: &HyperellipticCurve, k: usize) -> Vec<C64> {
    let (xl, xr, y) = cycle_box(curve, 2 * k, 2 * k + 1);
    rectangle(xl, xr, y, true)
}

/// Closed polyline representing `b_k`, starting at the top-left corner of its
/// rectangle, which must be taken on sheet 1. The a-cycle corrections are
/// reached along the top edge, which crosses no cut.
pub fn b_cycle_polyline(curve: &HyperellipticCurve, periods: &PeriodData, k: usize) -> Vec<C64> {
    let e = curve.branch_points();
    let g = curve.genus();
    let xl = 0.5 * (e[2 * k].re + e[2 * k + 1].re);
    let xr = 0.5 * (e[2 * g].re + e[2 * g + 1].re);
    let y = e.iter().fold(0.0f64, |m, z| m.max(z.im.abs())) + 1.0;
    let mut out = rectangle(xl, xr, y, periods.b_orientation == -1);
    let tl = out[0];
    for j in 0..g {
        let n = periods.b_shift[k][j];
        if n == 0 {
            continue;
        }
        let mut lp = a_cycle_polyline(curve, j);
        if n < 0 {
            lp.reverse();
        }
        for _ in 0..n.unsigned_abs() {
            out.extend_from_slice(&lp);
        }
        out.push(tl);
    }
    out
}

fn cycle_box(curve: &HyperellipticCurve, lo: usize, hi: usize) -> (f64, f64, f64) {
    let e = curve.branch_points();
    let spread = curve.diameter();
    let xl = if lo == 0 { e[0].re - 0.5 * spread } else { 0.5 * (e[lo - 1].re + e[lo].re) };
    let xr = if hi + 1 >= e.len() { e[hi].re + 0.5 * spread } else { 0.5 * (e[hi].re + e[hi + 1].re) };
    let y = e.iter().fold(0.0f64, |m, z| m.max(z.im.abs())) + 1.0;
    (xl, xr, y)
}

fn rectangle(xl: f64, xr: f64, y: f64, ccw: bool) -> Vec<C64> {
    let tl = C64::new(xl, y);
    let bl = C64::new(xl, -y);
    let br = C64::new(xr, -y);
    let tr = C64::new(xr, y);
    if ccw {
        vec![tl, bl, br, tr, tl]
    } else {
        vec![tl, tr, br, bl, tl]
    }
}
