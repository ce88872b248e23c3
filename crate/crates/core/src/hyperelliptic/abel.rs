use alloc::vec::Vec;

use super::curve::{HyperellipticCurve, SurfacePoint};
use super::path::{circle_polyline, Lift, SurfacePath, Tracer};
use super::periods::{compute_periods, PeriodData};
use crate::{Error, Result, C64};

/// `U_α(P) = ∫_{P_0}^P w_α` along explicit or auto-routed paths.
#[derive(Debug, Clone)]
pub struct AbelMap {
    pub curve: HyperellipticCurve,
    pub periods: PeriodData,
}

impl AbelMap {
    pub fn new(curve: HyperellipticCurve) -> Result<Self> {
        let periods = compute_periods(&curve)?;
        Ok(AbelMap { curve, periods })
    }

    pub fn from_parts(curve: HyperellipticCurve, periods: PeriodData) -> Self {
        AbelMap { curve, periods }
    }

    pub fn genus(&self) -> usize {
        self.curve.genus()
    }

    /// Normalized Abel vector of a lift continued from the basepoint.
    pub fn value(&self, lift: &Lift) -> Vec<C64> {
        self.periods.normalize(&lift.u)
    }

    /// Continue from the basepoint along `path` (which must start over the
    /// basepoint). If the path ends on the other sheet than `p`, a small loop
    /// around the nearest branch point is appended.
    pub fn abel_map(&self, p: SurfacePoint, path: &SurfacePath) -> Result<Vec<C64>> {
        let bp = self.curve.basepoint();
        if path.start.lambda != bp.lambda {
            return Err(Error::InvalidInput("path must start at the basepoint"));
        }
        let end = path.vertices.last().copied().unwrap_or(bp.lambda);
        if (end - p.lambda).norm() > self.curve.tol_geom() {
            return Err(Error::InvalidInput("path must end over the target point"));
        }
        let tracer = Tracer::new(&self.curve);
        let start = tracer.start(SurfacePath { start: bp, vertices: Vec::new() }.start);
        let mut lift = tracer.polyline(&start, &path.vertices)?;
        if self.curve.sheet_of(lift.lambda, lift.w) != p.sheet {
            lift = self.flip_sheet(&tracer, &lift)?;
        }
        Ok(self.value(&lift))
    }

    /// Abel map along the automatic route from the basepoint.
    pub fn abel_map_routed(&self, p: SurfacePoint) -> Result<Vec<C64>> {
        let r = self.curve.route_margin();
        let vertices = super::route(&self.curve, self.curve.basepoint().lambda, p.lambda);
        let _ = r;
        self.abel_map(p, &SurfacePath { start: self.curve.basepoint(), vertices: vertices[1..].to_vec() })
    }

    /// Append a loop around the branch point nearest to the lift, which moves
    /// it to the other sheet.
    pub fn flip_sheet(&self, tracer: &Tracer, lift: &Lift) -> Result<Lift> {
        let (m, d) = self.curve.nearest_branch_point(lift.lambda);
        let e = self.curve.branch_points()[m];
        let sep = self.curve.separation_of(m);
        let radius = (0.3 * sep).min(0.5 * d);
        let dir = lift.lambda - e;
        let entry = e + dir * (radius / d);
        let mut verts = Vec::new();
        verts.push(entry);
        verts.extend_from_slice(&circle_polyline(e, radius, dir, 32)[1..]);
        verts.push(lift.lambda);
        tracer.polyline(lift, &verts)
    }
}
