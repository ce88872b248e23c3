use alloc::vec::Vec;


use crate::{Error, Result, Tolerances, C64};

/// A point of the curve: a λ-value, a sheet label and the value of `w` there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub lambda: C64,
    pub sheet: u8,
    pub w: C64,
}

/// `w² = Π (λ − e_i)` with `2g + 2` branch points.
///
/// Branch points are kept sorted lexicographically by (Re, Im). Cut `k`
/// (zero-based here) joins `e[2k]` and `e[2k+1]`; since the cuts occupy
/// disjoint ranges of Re λ they never cross. Sheet 1 carries the branch of
/// `w` that behaves like `+λ^{g+1}` at infinity.
#[derive(Debug, Clone)]
pub struct HyperellipticCurve {
    e: Vec<C64>,
    genus: usize,
    basepoint: SurfacePoint,
    diameter: f64,
    min_sep: f64,
    tol: Tolerances,
}

/// Principal-branch factor `(λ − a)·sqrt((λ − b)/(λ − a))` whose cut is the
/// segment [a, b] and which behaves like λ at infinity.
#[inline]
fn cut_factor(da: C64, db: C64) -> C64 {
    da * (db / da).sqrt()
}

impl HyperellipticCurve {
    pub fn new(branch_points: &[C64], base_lambda: C64, base_sheet: u8, tol: Tolerances) -> Result<Self> {
        let n = branch_points.len();
        if n < 4 || n % 2 != 0 {
            return Err(Error::DegenerateCurve("need an even number (at least 4) of branch points"));
        }
        if branch_points.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("branch points must be finite"));
        }
        if base_sheet != 1 && base_sheet != 2 {
            return Err(Error::InvalidInput("sheet must be 1 or 2"));
        }
        let mut e = branch_points.to_vec();
        e.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        let mut diameter = 0.0f64;
        let mut min_sep = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                let d = (e[i] - e[j]).norm();
                diameter = diameter.max(d);
                min_sep = min_sep.min(d);
            }
        }
        let tol_geom = tol.geom_rel * diameter;
        if min_sep <= tol_geom {
            return Err(Error::DegenerateCurve("two branch points coincide"));
        }
        let mut curve = HyperellipticCurve {
            genus: n / 2 - 1,
            e,
            basepoint: SurfacePoint { lambda: base_lambda, sheet: 1, w: C64::new(0.0, 0.0) },
            diameter,
            min_sep,
            tol,
        };
        let (_, d) = curve.nearest_branch_point(base_lambda);
        if d <= curve.route_margin() {
            return Err(Error::InvalidInput("basepoint too close to a branch point"));
        }
        curve.basepoint = curve.point(base_lambda, base_sheet);
        Ok(curve)
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn branch_points(&self) -> &[C64] {
        &self.e
    }

    pub fn basepoint(&self) -> SurfacePoint {
        self.basepoint
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn min_separation(&self) -> f64 {
        self.min_sep
    }

    pub fn tol_geom(&self) -> f64 {
        self.tol.geom_rel * self.diameter
    }

    pub fn route_margin(&self) -> f64 {
        self.tol.route_margin_rel * self.min_sep
    }

    /// Endpoints of cut `k` (zero-based, `k ≤ g`).
    pub fn cut(&self, k: usize) -> (C64, C64) {
        (self.e[2 * k], self.e[2 * k + 1])
    }

    /// Same curve with a different branch-point list (same basepoint and
    /// tolerances). Used by deformation checks.
    pub fn with_branch_points(&self, branch_points: &[C64]) -> Result<Self> {
        HyperellipticCurve::new(branch_points, self.basepoint.lambda, self.basepoint.sheet, self.tol)
    }

    pub fn w_squared(&self, lambda: C64) -> C64 {
        self.e.iter().fold(C64::new(1.0, 0.0), |p, e| p * (lambda - e))
    }

    /// Sheet-1 value of `w`.
    pub fn w1(&self, lambda: C64) -> C64 {
        let mut p = C64::new(1.0, 0.0);
        for k in 0..=self.genus {
            p *= cut_factor(lambda - self.e[2 * k], lambda - self.e[2 * k + 1]);
        }
        p
    }

    /// Sheet-1 `w` from precomputed differences `λ − e_i` (sorted order).
    pub fn w1_from_diffs(&self, d: &[C64]) -> C64 {
        let mut p = C64::new(1.0, 0.0);
        for k in 0..=self.genus {
            p *= cut_factor(d[2 * k], d[2 * k + 1]);
        }
        p
    }

    /// 1 when `w` is (closer to) the sheet-1 value, else 2.
    pub fn sheet_of(&self, lambda: C64, w: C64) -> u8 {
        let w1 = self.w1(lambda);
        if (w - w1).norm() <= (w + w1).norm() {
            1
        } else {
            2
        }
    }

    pub fn point(&self, lambda: C64, sheet: u8) -> SurfacePoint {
        let w1 = self.w1(lambda);
        SurfacePoint { lambda, sheet, w: if sheet == 1 { w1 } else { -w1 } }
    }

    pub fn nearest_branch_point(&self, lambda: C64) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, e) in self.e.iter().enumerate() {
            let d = (lambda - e).norm();
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    /// Distance from `e_m` to the nearest other branch point.
    pub fn separation_of(&self, m: usize) -> f64 {
        self.e
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != m)
            .fold(f64::INFINITY, |d, (_, e)| d.min((self.e[m] - e).norm()))
    }

    /// Coefficients `λ^{β−1}/w` of the non-normalized holomorphic differentials
    /// against dλ.
    pub fn raw_differentials(&self, lambda: C64, w: C64) -> Vec<C64> {
        let inv = w.inv();
        let mut out = Vec::with_capacity(self.genus);
        let mut pw = inv;
        for _ in 0..self.genus {
            out.push(pw);
            pw *= lambda;
        }
        out
    }

    /// λ-derivative of `raw_differentials` at (λ, w).
    pub fn raw_differentials_derivative(&self, lambda: C64, w: C64) -> Vec<C64> {
        let dlogw: C64 = self.e.iter().map(|e| (lambda - e).inv()).sum::<C64>() * 0.5;
        let v = self.raw_differentials(lambda, w);
        let mut out = Vec::with_capacity(self.genus);
        for beta in 0..self.genus {
            let mut d = -dlogw * v[beta];
            if beta > 0 {
                d += v[beta - 1] * beta as f64;
            }
            out.push(d);
        }
        out
    }

    /// `Σ_j c(λ^{(j)})` for raw differentials: the two sheets carry opposite
    /// signs of `w`, so this vanishes.
    pub fn sheet_sum_differential(&self, lambda: C64, alpha: usize) -> Result<C64> {
        if alpha >= self.genus {
            return Err(Error::IndexOutOfRange { index: alpha, limit: self.genus });
        }
        let w = self.w1(lambda);
        let a = self.raw_differentials(lambda, w)[alpha];
        let b = self.raw_differentials(lambda, -w)[alpha];
        Ok(a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    fn curve() -> HyperellipticCurve {
        HyperellipticCurve::new(
            &[c(1.0, 0.3), c(-1.0, 0.0), c(0.2, -1.1), c(0.0, 1.0), c(2.0, 0.5), c(-1.5, -0.7)],
            c(0.3, 0.4),
            1,
            Tolerances::default(),
        )
        .unwrap()
    }

    #[test]
    fn sorted_and_w1_squares() {
        let cu = curve();
        let e = cu.branch_points();
        assert!(e.windows(2).all(|p| p[0].re <= p[1].re));
        for z in [c(0.1, 0.1), c(-3.0, 2.0), c(5.0, -1.0), c(0.0, -0.3)] {
            let w = cu.w1(z);
            assert!((w * w - cu.w_squared(z)).norm() < 1e-12 * cu.w_squared(z).norm());
        }
    }

    #[test]
    fn w1_behaves_like_power_at_infinity() {
        let cu = curve();
        let z = c(1e4, 3e3);
        let r = cu.w1(z) / z.powi(3);
        assert!((r - c(1.0, 0.0)).norm() < 1e-3);
    }

    #[test]
    fn sheet_sum_vanishes() {
        let cu = curve();
        for z in [c(0.5, 0.5), c(-1.0 + 1e-3, 0.0)] {
            for a in 0..2 {
                assert!(cu.sheet_sum_differential(z, a).unwrap().norm() < 1e-12);
            }
        }
        assert!(cu.sheet_sum_differential(c(0.0, 0.0), 2).is_err());
    }

    #[test]
    fn derivative_of_differentials() {
        let cu = curve();
        let z = c(0.4, -0.2);
        let h = 1e-6;
        let w = cu.w1(z);
        let d = cu.raw_differentials_derivative(z, w);
        let p = cu.raw_differentials(z + h, cu.w1(z + h));
        let m = cu.raw_differentials(z - h, cu.w1(z - h));
        for b in 0..2 {
            assert!(((p[b] - m[b]) / (2.0 * h) - d[b]).norm() < 1e-7);
        }
    }

    #[test]
    fn rejects_degenerate() {
        let r = HyperellipticCurve::new(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)], c(0.5, 1.0), 1, Tolerances::default());
        assert_eq!(r.unwrap_err().code(), "DegenerateCurve");
        let r = HyperellipticCurve::new(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)], c(0.5, 1.0), 1, Tolerances::default());
        assert!(r.is_err());
    }
}
