//! Prime form, Szegő and Bergmann kernels on a hyperelliptic curve.
//!
//! Values are scalars in the λ-trivialization: a half-differential `f√dλ` is
//! reported as `f`. The spinor `h̃ = h/√dλ` with `h̃² = Σ_α ∂_αΘ*(0) w_α/dλ`
//! is continued along the same paths as the Abel map, so every point carries
//! a consistent pair (U, h̃).

mod branch;

pub use branch::{
    divisor_characteristic, projective_connection, projective_connection_sampled, thomae_check, BranchGeometry,
    DivisorChar, ThomaeReport,
};

use alloc::vec::Vec;

use crate::hyperelliptic::{route, AbelMap, HyperellipticCurve, Lift, Tracer};
use crate::linalg::CMatrix;
use crate::theta::{find_odd_nonsingular_char, theta, RiemannMatrix, ThetaChar, ThetaEvaluation};
use crate::{Error, Result, Tolerances, C64};

/// Curve data shared by all kernels: periods, the odd characteristic used for
/// the prime form, and the spinor polynomial.
#[derive(Debug, Clone)]
pub struct KernelContext {
    pub abel: AbelMap,
    pub rm: RiemannMatrix,
    pub star: ThetaChar,
    /// `∇Θ[p*,q*](0)`.
    pub kappa: Vec<C64>,
    /// Coefficients of `P` in `h̃² = P(λ)/w`.
    pub spinor_poly: Vec<C64>,
}

/// A point of the universal cover as seen by the kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct KPoint {
    pub lambda: C64,
    pub w: C64,
    /// Normalized Abel vector.
    pub u: Vec<C64>,
    pub h: C64,
    /// `w_α/dλ` at the point.
    pub diff: Vec<C64>,
}

impl KernelContext {
    pub fn new(curve: HyperellipticCurve) -> Result<Self> {
        Self::from_abel(AbelMap::new(curve)?)
    }

    pub fn from_abel(abel: AbelMap) -> Result<Self> {
        let tol = *abel.curve.tolerances();
        let rm = RiemannMatrix::new(abel.periods.b.clone())?;
        let star = find_odd_nonsingular_char(&rm, tol.nonsing, tol.theta)?;
        let g = rm.genus();
        let kappa = theta(&star, &alloc::vec![C64::new(0.0, 0.0); g], &rm, tol.theta)?.gradient;
        let spinor_poly = abel.periods.c.mul_vec(&kappa);
        Ok(KernelContext { abel, rm, star, kappa, spinor_poly })
    }

    pub fn curve(&self) -> &HyperellipticCurve {
        &self.abel.curve
    }

    pub fn genus(&self) -> usize {
        self.rm.genus()
    }

    pub fn tolerances(&self) -> &Tolerances {
        self.abel.curve.tolerances()
    }

    /// Tracer that continues the spinor along with w and the Abel integrals.
    pub fn tracer(&self) -> Tracer<'_> {
        Tracer::with_spinor(&self.abel.curve, self.spinor_poly.clone())
    }

    /// The basepoint as a lift.
    pub fn base_lift(&self) -> Lift {
        self.tracer().start(self.abel.curve.basepoint())
    }

    /// Lift over `lambda` on `sheet`, reached along the automatic route from
    /// the basepoint (plus a loop around the nearest branch point if the
    /// route ends on the other sheet).
    pub fn lift(&self, lambda: C64, sheet: u8) -> Result<Lift> {
        let tr = self.tracer();
        let mut l = self.continue_to(&tr, &self.base_lift(), lambda)?;
        if self.abel.curve.sheet_of(l.lambda, l.w) != sheet {
            l = self.abel.flip_sheet(&tr, &l)?;
        }
        Ok(l)
    }

    /// Continue `from` along the automatic route to `lambda`.
    pub fn continue_to(&self, tr: &Tracer, from: &Lift, lambda: C64) -> Result<Lift> {
        let verts = route(&self.abel.curve, from.lambda, lambda);
        tr.polyline(from, &verts[1..])
    }

    /// Kernel view of a lift.
    pub fn point(&self, lift: &Lift) -> Result<KPoint> {
        let h = lift.h.ok_or(Error::InvalidInput("lift carries no spinor value"))?;
        let diff = self.abel.periods.normalized(&self.abel.curve, lift.lambda, lift.w);
        let scale = self.kappa.iter().zip(&diff).fold(0.0, |a, (k, d)| a + k.norm() * d.norm());
        if h.norm_sqr() <= self.tolerances().nonsing * scale {
            return Err(Error::ThetaVanishes);
        }
        Ok(KPoint { lambda: lift.lambda, w: lift.w, u: self.abel.value(lift), h, diff })
    }

    /// λ-derivative of the normalized differential coefficients at `p`.
    pub fn diff_derivative(&self, p: &KPoint) -> Vec<C64> {
        let raw = self.abel.curve.raw_differentials_derivative(p.lambda, p.w);
        self.abel.periods.normalize(&raw)
    }

    fn check_distinct(&self, p: &KPoint, q: &KPoint) -> Result<()> {
        let tg = self.abel.curve.tol_geom();
        let same_sheet = (p.w - q.w).norm() <= (p.w + q.w).norm();
        if (p.lambda - q.lambda).norm() <= tg && same_sheet {
            return Err(Error::CoincidentPoints);
        }
        Ok(())
    }

    fn odd_theta(&self, p: &KPoint, q: &KPoint) -> Result<ThetaEvaluation> {
        let z: Vec<C64> = p.u.iter().zip(&q.u).map(|(a, b)| a - b).collect();
        theta(&self.star, &z, &self.rm, self.tolerances().theta)
    }

    /// `E(P,Q) = Θ*(U(P) − U(Q)) / (h̃(P) h̃(Q))`.
    pub fn prime_form(&self, p: &KPoint, q: &KPoint) -> Result<C64> {
        self.check_distinct(p, q)?;
        Ok(self.odd_theta(p, q)?.value / (p.h * q.h))
    }

    /// `w(P,Q)/(dλ_P dλ_Q) = −Σ ∂²lnΘ*(U(P)−U(Q)) w_α(P) w_β(Q)`.
    pub fn bergmann_kernel(&self, p: &KPoint, q: &KPoint) -> Result<C64> {
        self.check_distinct(p, q)?;
        let hs = self.odd_theta(p, q)?.log_hessian();
        Ok(-bilinear(&hs, &p.diff, &q.diff))
    }
}

/// `Σ_{αβ} m_αβ x_α y_β`.
pub fn bilinear(m: &CMatrix, x: &[C64], y: &[C64]) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for (a, xa) in x.iter().enumerate() {
        for (b, yb) in y.iter().enumerate() {
            s += m[(a, b)] * xa * yb;
        }
    }
    s
}

/// Szegő kernel for a fixed characteristic with `Θ[p,q](0) ≠ 0`.
#[derive(Debug, Clone)]
pub struct SzegoKernel<'a> {
    pub ctx: &'a KernelContext,
    pub ch: ThetaChar,
    /// `Θ[p,q](0)` with derivatives.
    pub theta0: ThetaEvaluation,
}

impl<'a> SzegoKernel<'a> {
    pub fn new(ctx: &'a KernelContext, ch: ThetaChar) -> Result<Self> {
        let g = ctx.genus();
        if ch.genus() != g {
            return Err(Error::DimensionMismatch { expected: g, rows: ch.genus(), cols: 1 });
        }
        let theta0 = theta(&ch, &alloc::vec![C64::new(0.0, 0.0); g], &ctx.rm, ctx.tolerances().theta)?;
        let rel = theta0.value.norm() / theta0.scale;
        if rel <= ctx.tolerances().nonsing {
            return Err(Error::CharOnThetaDivisor(rel));
        }
        Ok(SzegoKernel { ctx, ch, theta0 })
    }

    fn theta_at(&self, z: &[C64]) -> Result<ThetaEvaluation> {
        theta(&self.ch, z, &self.ctx.rm, self.ctx.tolerances().theta)
    }

    /// `S(P,Q) = Θ[p,q](U(P)−U(Q)) / (Θ[p,q](0) E(P,Q))`.
    pub fn value(&self, p: &KPoint, q: &KPoint) -> Result<C64> {
        let e = self.ctx.prime_form(p, q)?;
        let z: Vec<C64> = p.u.iter().zip(&q.u).map(|(a, b)| a - b).collect();
        Ok(self.theta_at(&z)?.value / (self.theta0.value * e))
    }

    /// `S(P,Q)` and `∂S(P,Q)/∂λ_P`, from theta gradients and the spinor
    /// logarithmic derivative `½(κ·c′)/(κ·c)`.
    pub fn value_and_derivative(&self, p: &KPoint, q: &KPoint) -> Result<(C64, C64)> {
        self.ctx.check_distinct(p, q)?;
        let z: Vec<C64> = p.u.iter().zip(&q.u).map(|(a, b)| a - b).collect();
        let tpq = self.theta_at(&z)?;
        let tstar = self.ctx.odd_theta(p, q)?;
        let dprime = self.ctx.diff_derivative(p);
        let mut dpq = C64::new(0.0, 0.0);
        let mut dstar = C64::new(0.0, 0.0);
        let mut num = C64::new(0.0, 0.0);
        let mut den = C64::new(0.0, 0.0);
        for a in 0..p.diff.len() {
            dpq += tpq.gradient[a] * p.diff[a];
            dstar += tstar.gradient[a] * p.diff[a];
            num += self.ctx.kappa[a] * dprime[a];
            den += self.ctx.kappa[a] * p.diff[a];
        }
        let k = p.h * q.h / (self.theta0.value * tstar.value);
        let s = tpq.value * k;
        let ds = dpq * k + s * (num / den * 0.5 - dstar / tstar.value);
        Ok((s, ds))
    }

    /// Relative residual of `S(P,Q)S(Q,P) = −w(P,Q) − Σ ∂²lnΘ[p,q](0) w_α(P)w_β(Q)`.
    pub fn szego_bergmann_residual(&self, p: &KPoint, q: &KPoint) -> Result<f64> {
        let lhs = self.value(p, q)? * self.value(q, p)?;
        let w = self.ctx.bergmann_kernel(p, q)?;
        let corr = bilinear(&self.theta0.log_hessian(), &p.diff, &q.diff);
        let rhs = -w - corr;
        let scale = lhs.norm().max(w.norm()).max(corr.norm()).max(1e-300);
        Ok((lhs - rhs).norm() / scale)
    }

    /// Relative residual of the Fay identity for `n = ps.len()` point pairs.
    pub fn fay_identity_residual(&self, ps: &[KPoint], qs: &[KPoint]) -> Result<f64> {
        let n = ps.len();
        if n == 0 || n != qs.len() || n > 4 {
            return Err(Error::InvalidInput("Fay identity needs 1 to 4 pairs of points"));
        }
        let all: Vec<&KPoint> = ps.iter().chain(qs.iter()).collect();
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                self.ctx.check_distinct(all[i], all[j])?;
            }
        }
        let s = {
            let mut v = Vec::with_capacity(n * n);
            for pj in ps {
                for qk in qs {
                    v.push(self.value(pj, qk)?);
                }
            }
            CMatrix::from_vec(n, n, v)?
        };
        let lhs = s.det();
        let g = self.ctx.genus();
        let mut z = alloc::vec![C64::new(0.0, 0.0); g];
        for (pj, qj) in ps.iter().zip(qs) {
            for a in 0..g {
                z[a] += pj.u[a] - qj.u[a];
            }
        }
        let mut rhs = self.theta_at(&z)?.value / self.theta0.value;
        for j in 0..n {
            for k in j + 1..n {
                rhs *= self.ctx.prime_form(&ps[j], &ps[k])? * self.ctx.prime_form(&qs[k], &qs[j])?;
            }
        }
        for pj in ps {
            for qk in qs {
                rhs /= self.ctx.prime_form(pj, qk)?;
            }
        }
        Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1e-300))
    }
}
