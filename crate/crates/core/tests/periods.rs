mod common;

use common::{c, random_curve};
use proptest::prelude::*;
use rhszego_core::hyperelliptic::{
    a_cycle_polyline, b_cycle_polyline, circle_polyline, compute_periods, AbelMap, SurfacePath, Tracer,
};
use rhszego_core::linalg::CMatrix;
use rhszego_core::theta::RiemannMatrix;

fn riemann_relations(seed: u64, g: usize) -> Result<(), TestCaseError> {
    let cu = random_curve(seed, g);
    let p = compute_periods(&cu).unwrap();
    let b = &p.b;
    let asym = b.max_diff(&b.transpose());
    prop_assert!(asym < 1e-10, "asymmetry {asym}");
    let eigs = b.imag_part().symmetric_eigenvalues();
    prop_assert!(eigs.iter().all(|e| *e > 0.0), "{eigs:?}");
    prop_assert!(p.convergence < 1e-10, "doubling change {}", p.convergence);
    prop_assert!(RiemannMatrix::new(b.clone()).is_ok());
    // a-periods of the normalized differentials are the identity
    let ac = &p.a * &p.c;
    prop_assert!(ac.max_diff(&CMatrix::identity(g)) < 1e-10);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn riemann_relations_genus_one(seed in any::<u64>()) {
        riemann_relations(seed, 1)?;
    }

    #[test]
    fn riemann_relations_genus_two(seed in any::<u64>()) {
        riemann_relations(seed, 2)?;
    }

    #[test]
    fn riemann_relations_genus_three(seed in any::<u64>()) {
        riemann_relations(seed, 3)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    /// Tracing the cycle polylines is an independent quadrature of the same
    /// periods.
    #[test]
    fn traced_cycles_match_periods(seed in any::<u64>(), g in 1usize..=3) {
        let cu = random_curve(seed, g);
        let p = compute_periods(&cu).unwrap();
        let t = Tracer::new(&cu);
        for k in 0..g {
            let lp = a_cycle_polyline(&cu, k);
            let out = t.polyline(&t.start(cu.point(lp[0], 1)), &lp[1..]).unwrap();
            for beta in 0..g {
                prop_assert!((out.u[beta] - p.a[(k, beta)]).norm() < 1e-9);
            }
            let lp = b_cycle_polyline(&cu, &p, k);
            let out = t.polyline(&t.start(cu.point(lp[0], 1)), &lp[1..]).unwrap();
            for beta in 0..g {
                prop_assert!((out.u[beta] - p.b_raw[(k, beta)]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn homotopy_invariance(seed in any::<u64>(), dx in -0.4f64..0.4, dy in -0.3f64..0.3) {
        let cu = random_curve(seed, 2);
        let m = AbelMap::new(cu).unwrap();
        let bp = m.curve.basepoint();
        let target_l = bp.lambda + c(0.9, -0.6);
        let target = m.curve.point(target_l, 2);
        let mid = (bp.lambda + target_l) * 0.5;
        let straight = SurfacePath { start: bp, vertices: vec![mid, target_l] };
        let bent = SurfacePath { start: bp, vertices: vec![mid + c(dx, dy), target_l] };
        let u1 = m.abel_map(target, &straight).unwrap();
        let u2 = m.abel_map(target, &bent).unwrap();
        for (a, b) in u1.iter().zip(&u2) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn loop_around_all_branch_points_keeps_sheet(seed in any::<u64>(), g in 1usize..=3) {
        let cu = random_curve(seed, g);
        let e = cu.branch_points();
        let centre = e.iter().sum::<rhszego_core::C64>() / e.len() as f64;
        let radius = e.iter().fold(0.0f64, |a, z| a.max((z - centre).norm())) + 0.5;
        let t = Tracer::new(&cu);
        let lp = circle_polyline(centre, radius, c(1.0, 0.0), 256);
        let s = t.start(cu.point(lp[0], 1));
        let out = t.polyline(&s, &lp[1..]).unwrap();
        prop_assert_eq!(cu.sheet_of(out.lambda, out.w), 1);
        prop_assert!((out.w - s.w).norm() < 1e-9 * s.w.norm());
    }
}

#[test]
fn basepoint_maps_to_zero() {
    let m = AbelMap::new(random_curve(3, 2)).unwrap();
    let bp = m.curve.basepoint();
    let u = m.abel_map(bp, &SurfacePath { start: bp, vertices: Vec::new() }).unwrap();
    assert!(u.iter().all(|z| z.norm() == 0.0));
}

#[test]
fn sheet_sum_vanishes_near_branch_point() {
    let cu = random_curve(11, 2);
    let e = cu.branch_points()[2];
    for k in 0..8 {
        let l = e + c(0.0, 1e-3 * (k as f64 * 0.7).cos()) + c(1e-3 * (k as f64 * 0.7).sin(), 0.0);
        for alpha in 0..2 {
            assert!(cu.sheet_sum_differential(l, alpha).unwrap().norm() < 1e-9);
        }
    }
}

#[test]
fn lemniscatic_and_real_curves() {
    let t = rhszego_core::Tolerances::default();
    let cu = rhszego_core::hyperelliptic::HyperellipticCurve::new(
        &[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)],
        c(0.37, 2.9),
        1,
        t,
    )
    .unwrap();
    assert!((compute_periods(&cu).unwrap().b[(0, 0)] - c(0.0, 1.0)).norm() < 1e-9);
    let cu = cu.with_branch_points(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
    let b = compute_periods(&cu).unwrap().b[(0, 0)];
    assert!(b.re.abs() < 1e-9 && b.im > 0.0);
}
