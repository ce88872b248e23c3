//! Hyperelliptic curves `w² = Π (λ − λ_m)`: sheets, continuation, periods and
//! the Abel map.

mod abel;
mod curve;
mod path;
mod periods;

pub use abel::AbelMap;
pub use curve::{HyperellipticCurve, SurfacePoint};
pub use path::{circle_polyline, nearest_root, route, segment_distance, Lift, SurfacePath, Tracer};
pub use periods::{a_cycle_polyline, b_cycle_polyline, compute_periods, PeriodData};
