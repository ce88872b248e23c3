mod common;

use common::c;
use proptest::prelude::*;
use rhszego_core::linalg::CMatrix;
use rhszego_core::theta::{
    find_odd_nonsingular_char, heat_equation_check, theta, theta_periodicity_check, theta_quasi_periodicity_check,
    Parity, RiemannMatrix, ThetaChar,
};
use rhszego_core::C64;
use std::f64::consts::PI;

const TOL: f64 = 1e-12;

fn riemann_matrix(g: usize, re: &[f64], im: &[f64]) -> RiemannMatrix {
    // Im B = L Lᵀ + 0.4 I with L lower triangular from `im`
    let mut l = vec![vec![0.0; g]; g];
    let mut k = 0;
    for i in 0..g {
        for j in 0..=i {
            l[i][j] = im[k];
            k += 1;
        }
    }
    let mut k = 0;
    let mut reb = vec![vec![0.0; g]; g];
    for i in 0..g {
        for j in 0..=i {
            reb[i][j] = re[k];
            reb[j][i] = re[k];
            k += 1;
        }
    }
    let b = CMatrix::from_fn(g, g, |i, j| {
        let y: f64 = (0..g).map(|s| l[i][s] * l[j][s]).sum::<f64>() + if i == j { 0.4 } else { 0.0 };
        c(reb[i][j], y)
    });
    RiemannMatrix::new(b).unwrap()
}

fn arb_b(g: usize) -> impl Strategy<Value = RiemannMatrix> {
    let n = g * (g + 1) / 2;
    (prop::collection::vec(-0.5f64..0.5, n), prop::collection::vec(-0.8f64..0.8, n))
        .prop_map(move |(re, im)| riemann_matrix(g, &re, &im))
}

fn arb_z(g: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -0.5f64..0.5), g).prop_map(|v| v.into_iter().map(|(a, b)| c(a, b)).collect())
}

fn arb_char(g: usize) -> impl Strategy<Value = ThetaChar> {
    (prop::collection::vec(-0.5f64..0.5, g), prop::collection::vec(-0.5f64..0.5, g))
        .prop_map(|(p, q)| ThetaChar::real(&p, &q))
}

/// Plain lattice sum over a box of half-width `r`.
fn brute_force(ch: &ThetaChar, z: &[C64], b: &CMatrix, r: i64) -> C64 {
    let g = z.len();
    let mut n = vec![-r; g];
    let mut acc = c(0.0, 0.0);
    loop {
        let v: Vec<C64> = (0..g).map(|i| ch.p[i] + n[i] as f64).collect();
        let mut e = c(0.0, 0.0);
        for i in 0..g {
            for j in 0..g {
                e += c(0.0, PI) * v[i] * b[(i, j)] * v[j];
            }
            e += c(0.0, 2.0 * PI) * v[i] * (z[i] + ch.q[i]);
        }
        acc += e.exp();
        let mut i = 0;
        while i < g {
            n[i] += 1;
            if n[i] <= r {
                break;
            }
            n[i] = -r;
            i += 1;
        }
        if i == g {
            return acc;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn quasi_periodicity_random(
        (rm, z, ch) in (1usize..=3).prop_flat_map(|g| (arb_b(g), arb_z(g), arb_char(g)))
    ) {
        let g = rm.genus();
        for alpha in 0..g {
            let r = theta_quasi_periodicity_check(&ch, &z, &rm, alpha, TOL).unwrap();
            prop_assert!(r < 1e-10, "b-shift {r}");
            let r = theta_periodicity_check(&ch, &z, &rm, alpha, TOL).unwrap();
            prop_assert!(r < 1e-10, "a-shift {r}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn matches_plain_lattice_sum(rm in arb_b(2), z in arb_z(2), ch in arb_char(2)) {
        let ev = theta(&ch, &z, &rm, TOL).unwrap();
        let bf = brute_force(&ch, &z, rm.matrix(), 12);
        prop_assert!((ev.value - bf).norm() < 1e-11 * ev.scale.max(1.0));
        prop_assert!(ev.error_bound < TOL * ev.scale);
    }

    #[test]
    fn gradient_matches_finite_differences(rm in arb_b(2), z in arb_z(2), ch in arb_char(2)) {
        let ev = theta(&ch, &z, &rm, TOL).unwrap();
        let h = 1e-5;
        for a in 0..2 {
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[a] += h;
            zm[a] -= h;
            let fd = (theta(&ch, &zp, &rm, TOL).unwrap().value - theta(&ch, &zm, &rm, TOL).unwrap().value) / (2.0 * h);
            prop_assert!((fd - ev.gradient[a]).norm() < 1e-6 * ev.scale.max(1.0));
            let fdg = (theta(&ch, &zp, &rm, TOL).unwrap().gradient[0] - theta(&ch, &zm, &rm, TOL).unwrap().gradient[0]) / (2.0 * h);
            prop_assert!((fdg - ev.hessian[(0, a)]).norm() < 1e-5 * ev.scale.max(1.0));
        }
        prop_assert!((ev.hessian[(0, 1)] - ev.hessian[(1, 0)]).norm() < 1e-12 * ev.scale.max(1.0));
    }

    #[test]
    fn odd_characteristics_are_odd(rm in arb_b(2), z in arb_z(2)) {
        let neg: Vec<C64> = z.iter().map(|x| -x).collect();
        for ch in ThetaChar::all_half_integer(2) {
            let a = theta(&ch, &z, &rm, TOL).unwrap();
            let b = theta(&ch, &neg, &rm, TOL).unwrap();
            match ch.parity().unwrap() {
                Parity::Odd => prop_assert!((a.value + b.value).norm() < 1e-11 * a.scale),
                Parity::Even => prop_assert!((a.value - b.value).norm() < 1e-11 * a.scale),
            }
        }
    }

    #[test]
    fn truncation_is_certified(rm in arb_b(3), z in arb_z(3), ch in arb_char(3)) {
        let ev = theta(&ch, &z, &rm, TOL).unwrap();
        let wide = theta(&ch, &z, &rm, TOL * 1e-6).unwrap();
        prop_assert!(wide.truncation_radius >= ev.truncation_radius);
        prop_assert!((ev.value - wide.value).norm() < TOL * ev.scale.max(1.0) * 10.0);
    }
}

#[test]
fn theta_constant_of_square_lattice() {
    let rm = riemann_matrix(1, &[0.0], &[(1.0f64 - 0.4).sqrt()]);
    assert!((rm.matrix()[(0, 0)] - c(0.0, 1.0)).norm() < 1e-15);
    let v = theta(&ThetaChar::zero(1), &[c(0.0, 0.0)], &rm, TOL).unwrap().value;
    // Σ e^{-π n²} = π^{1/4}/Γ(3/4)
    let exact = PI.powf(0.25) / 1.225_416_702_465_177_6;
    assert!((v - exact).norm() < 1e-12, "{v}");
    assert!((v.re - 1.086_434_811_213_308).abs() < 1e-12);
}

#[test]
fn heat_equation_at_square_lattice() {
    let rm = riemann_matrix(1, &[0.0], &[(1.0f64 - 0.4).sqrt()]);
    let ch = ThetaChar::real(&[0.13], &[-0.21]);
    let z = [c(0.17, 0.05)];
    let r1 = heat_equation_check(&ch, &z, &rm, 0, 0, 1e-4, TOL).unwrap();
    let r2 = heat_equation_check(&ch, &z, &rm, 0, 0, 5e-5, TOL).unwrap();
    assert!(r1 < 1e-6, "{r1}");
    let ratio = r1 / r2;
    assert!((3.0..5.0).contains(&ratio), "{ratio}");
}

#[test]
fn heat_equation_genus_two_off_diagonal() {
    let rm = riemann_matrix(2, &[0.1, -0.2, 0.3], &[0.7, 0.2, 0.5]);
    let ch = ThetaChar::real(&[0.1, 0.3], &[-0.2, 0.4]);
    let z = [c(0.2, -0.1), c(-0.3, 0.15)];
    for (a, b) in [(0, 1), (1, 1)] {
        let r1 = heat_equation_check(&ch, &z, &rm, a, b, 1e-4, TOL).unwrap();
        let r2 = heat_equation_check(&ch, &z, &rm, a, b, 5e-5, TOL).unwrap();
        assert!(r1 < 1e-6);
        assert!((3.0..5.0).contains(&(r1 / r2)), "{}", r1 / r2);
    }
}

#[test]
fn odd_characteristic_genus_two() {
    let rm = riemann_matrix(2, &[0.1, -0.2, 0.3], &[0.7, 0.2, 0.5]);
    let ch = find_odd_nonsingular_char(&rm, 1e-8, TOL).unwrap();
    assert_eq!(ch.parity(), Some(Parity::Odd));
    let odd = ThetaChar::all_half_integer(2).into_iter().filter(|c| c.parity() == Some(Parity::Odd)).count();
    assert_eq!(odd, 6);
    let ev = theta(&ch, &[c(0.0, 0.0); 2], &rm, TOL).unwrap();
    assert!(ev.value.norm() < 1e-14 * ev.scale);
}
