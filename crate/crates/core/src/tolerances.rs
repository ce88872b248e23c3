/// Numerical thresholds shared by all modules.
///
/// `geom_rel` is relative to the diameter of the branch-point set and
/// `route_margin_rel` to the minimal branch-point separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub zero: f64,
    pub alg: f64,
    pub periods: f64,
    pub theta: f64,
    pub nonsing: f64,
    pub r: f64,
    pub res: f64,
    pub mon: f64,
    pub h: f64,
    pub fd: f64,
    pub geom_rel: f64,
    pub route_margin_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            zero: 1e-12,
            alg: 1e-10,
            periods: 1e-10,
            theta: 1e-12,
            nonsing: 1e-8,
            r: 1e-6,
            res: 1e-8,
            mon: 1e-6,
            h: 1e-6,
            fd: 1e-4,
            geom_rel: 1e-8,
            route_margin_rel: 0.05,
        }
    }
}

impl Tolerances {
    /// All thresholds strictly positive and finite.
    pub fn is_valid(&self) -> bool {
        [
            self.zero,
            self.alg,
            self.periods,
            self.theta,
            self.nonsing,
            self.r,
            self.res,
            self.mon,
            self.h,
            self.fd,
            self.geom_rel,
            self.route_margin_rel,
        ]
        .iter()
        .all(|t| t.is_finite() && *t > 0.0)
    }
}
