//! Riemann theta functions with characteristics,
//! `Θ[p,q](z|B) = Σ_n exp(πi(n+p)ᵀB(n+p) + 2πi(n+p)ᵀ(z+q))`,
//! together with their z-gradient and z-Hessian.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{CMatrix, RMatrix};
use crate::{Error, Result, C64};

const RADIUS_CAP: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Characteristic vectors. Complex entries are allowed; half-integer
/// classification only applies to real ones.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaChar {
    pub p: Vec<C64>,
    pub q: Vec<C64>,
}

fn half_int(z: C64) -> Option<i64> {
    let t = 2.0 * z.re;
    if z.im.abs() < 1e-12 && (t - t.round()).abs() < 1e-12 {
        Some(t.round() as i64)
    } else {
        None
    }
}

impl ThetaChar {
    pub fn new(p: Vec<C64>, q: Vec<C64>) -> Result<Self> {
        if p.len() != q.len() {
            return Err(Error::InvalidInput("p and q must have the same length"));
        }
        Ok(ThetaChar { p, q })
    }

    pub fn real(p: &[f64], q: &[f64]) -> Self {
        ThetaChar {
            p: p.iter().map(|x| C64::new(*x, 0.0)).collect(),
            q: q.iter().map(|x| C64::new(*x, 0.0)).collect(),
        }
    }

    pub fn zero(g: usize) -> Self {
        ThetaChar { p: vec![C64::new(0.0, 0.0); g], q: vec![C64::new(0.0, 0.0); g] }
    }

    pub fn genus(&self) -> usize {
        self.p.len()
    }

    /// `2p` and `2q` as integer vectors, if the characteristic is half-integer.
    pub fn doubled(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        let p: Option<Vec<i64>> = self.p.iter().map(|z| half_int(*z)).collect();
        let q: Option<Vec<i64>> = self.q.iter().map(|z| half_int(*z)).collect();
        Some((p?, q?))
    }

    pub fn is_half_integer(&self) -> bool {
        self.doubled().is_some()
    }

    /// Even iff `4 p·q` is even.
    pub fn parity(&self) -> Option<Parity> {
        let (p, q) = self.doubled()?;
        let s: i64 = p.iter().zip(&q).map(|(a, b)| a * b).sum();
        Some(if s.rem_euclid(2) == 0 { Parity::Even } else { Parity::Odd })
    }

    /// All `4^g` half-integer characteristics with entries in {0, 1/2}, in
    /// lexicographic order of (p_1..p_g, q_1..q_g).
    pub fn all_half_integer(g: usize) -> Vec<ThetaChar> {
        (0..1usize << (2 * g))
            .map(|idx| {
                let bit = |k: usize| if (idx >> (2 * g - 1 - k)) & 1 == 1 { 0.5 } else { 0.0 };
                let p: Vec<f64> = (0..g).map(bit).collect();
                let q: Vec<f64> = (g..2 * g).map(bit).collect();
                ThetaChar::real(&p, &q)
            })
            .collect()
    }
}

/// A validated period matrix with cached real data for truncation.
#[derive(Debug, Clone)]
pub struct RiemannMatrix {
    b: CMatrix,
    x: RMatrix,
    y: RMatrix,
    y_inv: RMatrix,
    min_eig: f64,
}

impl RiemannMatrix {
    pub fn new(b: CMatrix) -> Result<Self> {
        if !b.is_square() || b.rows() == 0 {
            return Err(Error::NotRiemannMatrix { asymmetry: f64::INFINITY, min_eig: 0.0 });
        }
        let asymmetry = b.max_diff(&b.transpose());
        let y = b.imag_part();
        let min_eig = y.symmetric_eigenvalues()[0];
        if asymmetry > 1e-9 * b.max_abs().max(1.0) || !(min_eig > 0.0) {
            return Err(Error::NotRiemannMatrix { asymmetry, min_eig });
        }
        let y_inv = y.inverse().ok_or(Error::NotRiemannMatrix { asymmetry, min_eig })?;
        Ok(RiemannMatrix { x: b.real_part(), y, y_inv, min_eig, b })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.b
    }

    pub fn genus(&self) -> usize {
        self.b.rows()
    }

    pub fn min_eig_im(&self) -> f64 {
        self.min_eig
    }

    /// Real `(p, q)` with `z = Bp + q`.
    pub fn lattice_coordinates(&self, z: &[C64]) -> (Vec<f64>, Vec<f64>) {
        let im: Vec<f64> = z.iter().map(|x| x.im).collect();
        let p = self.y_inv.mul_vec(&im);
        let xp = self.x.mul_vec(&p);
        let q = z.iter().zip(&xp).map(|(a, b)| a.re - b).collect();
        (p, q)
    }
}

/// Value, gradient and Hessian in z, plus truncation data.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaEvaluation {
    pub value: C64,
    pub gradient: Vec<C64>,
    pub hessian: CMatrix,
    /// Largest half-width of the enumerated lattice box.
    pub truncation_radius: usize,
    /// Modulus of the dominant lattice term.
    pub scale: f64,
    /// Bound on the neglected tail, in absolute terms.
    pub error_bound: f64,
}

impl ThetaEvaluation {
    /// ∇ ln Θ.
    pub fn log_gradient(&self) -> Vec<C64> {
        self.gradient.iter().map(|d| d / self.value).collect()
    }

    /// ∂² ln Θ.
    pub fn log_hessian(&self) -> CMatrix {
        let g = self.gradient.len();
        let v = self.value;
        CMatrix::from_fn(g, g, |a, b| self.hessian[(a, b)] / v - self.gradient[a] * self.gradient[b] / (v * v))
    }
}

/// Theta function with characteristic at `z`, with tail below `tol` relative
/// to the dominant term.
pub fn theta(ch: &ThetaChar, z: &[C64], rm: &RiemannMatrix, tol: f64) -> Result<ThetaEvaluation> {
    let g = rm.genus();
    if ch.genus() != g || z.len() != g {
        return Err(Error::InvalidInput("dimension of z or characteristic does not match B"));
    }
    let zeta: Vec<C64> = z.iter().zip(&ch.q).map(|(a, b)| a + b).collect();
    let pi_im: Vec<f64> = ch.p.iter().map(|p| p.im).collect();
    let zeta_im: Vec<f64> = zeta.iter().map(|z| z.im).collect();
    // centre of the Gaussian envelope in ν-space (real part)
    let xb = rm.x.mul_vec(&pi_im);
    let rhs: Vec<f64> = xb.iter().zip(&zeta_im).map(|(a, b)| a + b).collect();
    let shift = rm.y_inv.mul_vec(&rhs);
    let center: Vec<f64> = shift.iter().map(|s| -s).collect();

    let mut level = -tol.ln() + 5.0;
    let mut widths = vec![0.0; g];
    for _ in 0..2 {
        for i in 0..g {
            widths[i] = (level / PI * rm.y_inv[(i, i)]).sqrt();
        }
        let count: f64 = widths.iter().map(|w| 2.0 * w + 1.0).product();
        level = -tol.ln() + 5.0 + count.ln();
    }
    let wmax = widths.iter().cloned().fold(0.0, f64::max);
    if wmax > RADIUS_CAP {
        return Err(Error::TruncationOverflow { radius: wmax.ceil() as usize });
    }
    // lattice points n with x = n + Re p
    let lo: Vec<i64> = (0..g).map(|i| (center[i] - widths[i] - ch.p[i].re).ceil() as i64).collect();
    let hi: Vec<i64> = (0..g).map(|i| (center[i] + widths[i] - ch.p[i].re).floor() as i64).collect();
    if lo.iter().zip(&hi).any(|(l, h)| l > h) {
        // empty box cannot happen for positive widths ≥ 1/2, but keep the guard
        return Err(Error::TruncationOverflow { radius: 0 });
    }

    let ipi = C64::new(0.0, PI);
    let bm = &rm.b;
    let mut terms: Vec<(Vec<C64>, C64)> = Vec::new();
    let mut peak = f64::NEG_INFINITY;
    let mut n = lo.clone();
    let mut nu = vec![C64::new(0.0, 0.0); g];
    let mut dx = vec![0.0; g];
    loop {
        for i in 0..g {
            dx[i] = n[i] as f64 + ch.p[i].re - center[i];
        }
        let quad: f64 = (0..g).map(|i| (0..g).map(|j| dx[i] * rm.y[(i, j)] * dx[j]).sum::<f64>()).sum();
        if PI * quad <= level {
            for i in 0..g {
                nu[i] = ch.p[i] + n[i] as f64;
            }
            let mut e = C64::new(0.0, 0.0);
            for i in 0..g {
                let mut row = C64::new(0.0, 0.0);
                for j in 0..g {
                    row += bm[(i, j)] * nu[j];
                }
                e += nu[i] * (row + zeta[i] * 2.0);
            }
            let e = ipi * e;
            if e.re > peak {
                peak = e.re;
            }
            terms.push((nu.clone(), e));
        }
        // odometer
        let mut k = 0;
        while k < g {
            n[k] += 1;
            if n[k] <= hi[k] {
                break;
            }
            n[k] = lo[k];
            k += 1;
        }
        if k == g {
            break;
        }
    }
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    let mut value = C64::new(0.0, 0.0);
    let mut grad = vec![C64::new(0.0, 0.0); g];
    let mut hess = CMatrix::zeros(g, g);
    for (nu, e) in &terms {
        let t = (e - peak).exp();
        value += t;
        for a in 0..g {
            let ta = t * two_pi_i * nu[a];
            grad[a] += ta;
            for b in a..g {
                hess[(a, b)] += ta * two_pi_i * nu[b];
            }
        }
    }
    for a in 0..g {
        for b in 0..a {
            hess[(a, b)] = hess[(b, a)];
        }
    }
    let s = peak.exp();
    let count = terms.len() as f64;
    Ok(ThetaEvaluation {
        value: value * s,
        gradient: grad.into_iter().map(|x| x * s).collect(),
        hessian: hess.scale(C64::new(s, 0.0)),
        truncation_radius: wmax.ceil() as usize,
        scale: s,
        error_bound: s * (-level).exp() * (1.0 + count),
    })
}

/// `|Θ(z + B e_α) − Θ(z) e^{−2πi q_α} e^{−2πi z_α − πi B_αα}|` relative to the
/// dominant term of the shifted evaluation.
pub fn theta_quasi_periodicity_check(ch: &ThetaChar, z: &[C64], rm: &RiemannMatrix, alpha: usize, tol: f64) -> Result<f64> {
    let g = rm.genus();
    if alpha >= g {
        return Err(Error::IndexOutOfRange { index: alpha, limit: g });
    }
    let base = theta(ch, z, rm, tol)?;
    let zs: Vec<C64> = (0..g).map(|i| z[i] + rm.b[(i, alpha)]).collect();
    let shifted = theta(ch, &zs, rm, tol)?;
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    let factor = (-two_pi_i * ch.q[alpha] - two_pi_i * z[alpha] - C64::new(0.0, PI) * rm.b[(alpha, alpha)]).exp();
    let expected = base.value * factor;
    let scale = shifted.scale.max((base.scale * factor.norm()).max(1e-300));
    Ok((shifted.value - expected).norm() / scale)
}

/// `|Θ(z + e_α) − Θ(z) e^{2πi p_α}|` relative to the dominant term.
pub fn theta_periodicity_check(ch: &ThetaChar, z: &[C64], rm: &RiemannMatrix, alpha: usize, tol: f64) -> Result<f64> {
    let g = rm.genus();
    if alpha >= g {
        return Err(Error::IndexOutOfRange { index: alpha, limit: g });
    }
    let base = theta(ch, z, rm, tol)?;
    let mut zs = z.to_vec();
    zs[alpha] += 1.0;
    let shifted = theta(ch, &zs, rm, tol)?;
    let factor = (C64::new(0.0, 2.0 * PI) * ch.p[alpha]).exp();
    Ok((shifted.value - base.value * factor).norm() / shifted.scale.max(base.scale * factor.norm()))
}

/// Heat-equation residual `|∂²_{αβ}Θ − 4πi·D/(2 − δ_αβ)|` where `D` is the
/// central difference of Θ along the symmetric perturbation
/// `S = E_αβ + E_βα` (or `E_αα` on the diagonal) with step `h`. The
/// residual is relative to the dominant term.
pub fn heat_equation_check(
    ch: &ThetaChar,
    z: &[C64],
    rm: &RiemannMatrix,
    alpha: usize,
    beta: usize,
    h: f64,
    tol: f64,
) -> Result<f64> {
    let g = rm.genus();
    if alpha >= g || beta >= g {
        return Err(Error::IndexOutOfRange { index: alpha.max(beta), limit: g });
    }
    let mut s = CMatrix::zeros(g, g);
    s[(alpha, beta)] = C64::new(1.0, 0.0);
    s[(beta, alpha)] = C64::new(1.0, 0.0);
    let step = s.scale(C64::new(h, 0.0));
    let plus = RiemannMatrix::new(&rm.b + &step);
    let minus = RiemannMatrix::new(&rm.b - &step);
    let (plus, minus) = match (plus, minus) {
        (Ok(p), Ok(m)) => (p, m),
        _ => return Err(Error::StepTooLarge("B ± hS leaves the Siegel half-space")),
    };
    if plus.min_eig <= 0.5 * rm.min_eig || minus.min_eig <= 0.5 * rm.min_eig {
        return Err(Error::StepTooLarge("perturbation comparable to the smallest eigenvalue of Im B"));
    }
    let base = theta(ch, z, rm, tol)?;
    let tp = theta(ch, z, &plus, tol)?;
    let tm = theta(ch, z, &minus, tol)?;
    let d = (tp.value - tm.value) / (2.0 * h);
    let factor = if alpha == beta { 1.0 } else { 2.0 };
    let lhs = base.hessian[(alpha, beta)];
    let rhs = C64::new(0.0, 4.0 * PI) * d / factor;
    Ok((lhs - rhs).norm() / base.scale)
}

/// First odd half-integer characteristic (in `all_half_integer` order) whose
/// theta gradient at zero exceeds `tol_nonsing`.
pub fn find_odd_nonsingular_char(rm: &RiemannMatrix, tol_nonsing: f64, tol: f64) -> Result<ThetaChar> {
    let g = rm.genus();
    let zero = vec![C64::new(0.0, 0.0); g];
    for ch in ThetaChar::all_half_integer(g) {
        if ch.parity() != Some(Parity::Odd) {
            continue;
        }
        let ev = theta(&ch, &zero, rm, tol)?;
        let norm = ev.gradient.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > tol_nonsing {
            return Ok(ch);
        }
    }
    Err(Error::NoneFound)
}
