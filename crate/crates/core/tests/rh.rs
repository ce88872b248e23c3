mod common;

use common::{c, genus_one, genus_two, random_lambda, rng};
use rand::Rng;
use rhszego_core::covering::{conjugate_by_diagonal, to_permutation_rep, QuasiPermRep};
use rhszego_core::linalg::CMatrix;
use rhszego_core::rh::{check_layout, monodromy_product, predict_monodromy, RhSolver};
use rhszego_core::theta::ThetaChar;
use rhszego_core::C64;

fn trace_sq(m: &CMatrix) -> C64 {
    (m * m).trace()
}

#[test]
fn determinant_at_random_points() {
    for (k, ch, l0) in [
        (genus_one(), ThetaChar::real(&[0.21], &[-0.33]), c(0.15, 0.05)),
        (genus_two(), ThetaChar::real(&[0.13, -0.31], &[0.27, 0.4]), c(0.45, 0.1)),
    ] {
        let rh = RhSolver::new(&k, ch, l0).unwrap();
        assert_eq!(rh.psi(l0).unwrap().psi.max_diff(&CMatrix::identity(2)), 0.0);
        let mut r = rng(101);
        for _ in 0..50 {
            let l = random_lambda(&mut r, &k, 0.05);
            let p = rh.psi(l).unwrap().psi;
            assert!((p.det() - 1.0).norm() < 1e-8, "{l} {}", p.det());
            assert!(p.as_slice().iter().all(|x| x.is_finite()));
        }
    }
}

#[test]
fn log_derivative_invariant_under_moving_normalization_point() {
    let k = genus_one();
    let ch = ThetaChar::real(&[0.21], &[-0.33]);
    let a = RhSolver::new(&k, ch.clone(), c(0.15, 0.05)).unwrap();
    let b = RhSolver::new(&k, ch, c(-0.45, 0.9)).unwrap();
    let mut r = rng(7);
    for _ in 0..10 {
        let l = random_lambda(&mut r, &k, 0.1);
        let fa = a.log_derivative(l).unwrap();
        let fb = b.log_derivative(l).unwrap();
        let (ta, tb) = (trace_sq(&fa), trace_sq(&fb));
        assert!((ta - tb).norm() < 1e-8 * ta.norm().max(1.0), "{ta} {tb}");
        // renormalizing Ψ_a at λ̃_0 differs from Ψ_b by a constant right factor
        let pa = a.psi(l).unwrap().psi;
        let pa0 = a.psi(b.lambda0).unwrap().psi;
        let star = &pa0.inverse().unwrap() * &pa;
        assert!((star.det() - 1.0).norm() < 1e-8);
    }
}

#[test]
fn diagonal_gauge_leaves_hamiltonian_density() {
    let k = genus_two();
    let rh = RhSolver::new(&k, ThetaChar::real(&[0.13, -0.31], &[0.27, 0.4]), c(0.45, 0.1)).unwrap();
    let mut r = rng(9);
    for _ in 0..10 {
        let l = random_lambda(&mut r, &k, 0.1);
        let (lifts, _) = rh.lifts_at(l).unwrap();
        let (psi, dpsi) = rh.psi_and_derivative(&lifts).unwrap();
        let d = CMatrix::from_fn(2, 2, |i, j| if i == j { c(r.gen_range(0.5..2.0), r.gen_range(-1.0..1.0)) } else { c(0.0, 0.0) });
        let f = &dpsi * &psi.inverse().unwrap();
        let pd = &psi * &d;
        let fd = &(&dpsi * &d) * &pd.inverse().unwrap();
        assert!((trace_sq(&f) - trace_sq(&fd)).norm() < 1e-10 * trace_sq(&f).norm().max(1.0));
        assert!(f.max_diff(&rh.log_derivative_from(&lifts).unwrap()) < 1e-10 * f.max_abs());
    }
}

#[test]
fn log_derivative_matches_finite_differences() {
    let k = genus_one();
    let rh = RhSolver::new(&k, ThetaChar::real(&[0.21], &[-0.33]), c(0.15, 0.05)).unwrap();
    let l = c(0.8, 0.9);
    let (lifts, _) = rh.lifts_at(l).unwrap();
    let (_, dpsi) = rh.psi_and_derivative(&lifts).unwrap();
    let h = 1e-5;
    let tr = k.tracer();
    let shift = |s: f64| {
        let mut ls = lifts.clone();
        for x in ls.iter_mut() {
            tr.segment(x, l + s).unwrap();
        }
        rh.psi_from(&ls).unwrap()
    };
    let fd = (&shift(h) - &shift(-h)).scale(c(0.5 / h, 0.0));
    assert!(fd.max_diff(&dpsi) < 1e-6 * dpsi.max_abs());
}

fn monodromy_suite(k: &rhszego_core::kernels::KernelContext, ch: ThetaChar, l0: C64) {
    let rh = RhSolver::new(k, ch.clone(), l0).unwrap();
    let npts = k.curve().branch_points().len();
    let mut ms = Vec::new();
    let mut pr = Vec::new();
    for n in 0..npts {
        let r = rh.monodromy(n).unwrap();
        assert_eq!(r.quasi.sigma, vec![1, 0]);
        assert!(r.max_deviation < 1e-6, "n={n} {}", r.max_deviation);
        assert!((r.matrix.det() - 1.0).norm() < 1e-6);
        // shifting p by an integer vector leaves the prediction unchanged
        let shifted = ThetaChar::new(ch.p.iter().map(|x| x + 1.0).collect(), ch.q.clone()).unwrap();
        let p2 = predict_monodromy(&shifted, &k.star, &r.intersections).unwrap();
        assert!(p2.max_diff(&r.predicted) < 1e-10);
        ms.push(r.matrix);
        pr.push(r.predicted);
    }
    let order = rh.generator_order();
    assert!(monodromy_product(&ms, &order).1 < 1e-6);
    assert!(check_layout(&pr, &order, 1e-6).is_ok());
    // one generator dropped: the layout check must refuse
    let mut broken = pr.clone();
    broken[order[0]] = CMatrix::identity(2);
    assert_eq!(check_layout(&broken, &order, 1e-6).unwrap_err().code(), "InconsistentLayout");

    let pts: Vec<C64> = order.iter().map(|i| k.curve().branch_points()[*i]).collect();
    let mats: Vec<CMatrix> = order.iter().map(|i| ms[*i].clone()).collect();
    let rep = QuasiPermRep::new(2, l0, pts, &mats, 1e-6).unwrap();
    assert!(rep.product_residual() < 1e-6);
    let comb = to_permutation_rep(&rep).unwrap();
    assert_eq!(comb.genus, k.genus());
    assert!(comb.connected);
    let conj = conjugate_by_diagonal(&rep, &[c(2.0, 0.5), c(0.3, -1.0)], 1e-12).unwrap();
    assert_eq!(to_permutation_rep(&conj).unwrap(), comb);
    assert!(conj.product_residual() < 1e-6);
}

#[test]
fn monodromies_genus_one() {
    monodromy_suite(&genus_one(), ThetaChar::real(&[0.21], &[-0.33]), c(0.15, 0.05));
}

#[test]
fn monodromies_genus_one_zero_characteristic() {
    monodromy_suite(&genus_one(), ThetaChar::zero(1), c(0.15, 0.05));
}

#[test]
fn monodromies_genus_two() {
    monodromy_suite(&genus_two(), ThetaChar::real(&[0.13, -0.31], &[0.27, 0.4]), c(0.45, 0.1));
}

#[test]
fn residues_are_contour_independent() {
    let k = genus_one();
    let rh = RhSolver::new(&k, ThetaChar::real(&[0.21], &[-0.33]), c(0.15, 0.05)).unwrap();
    let sep = k.curve().separation_of(2);
    let (a1, _) = rh.residue_at(2, 0.25 * sep).unwrap();
    let (a2, _) = rh.residue_at(2, 0.125 * sep).unwrap();
    assert!(a1.max_diff(&a2) < 1e-8, "{}", a1.max_diff(&a2));
    assert!(a1.trace().norm() < 1e-8);
}

#[test]
fn rejects_singular_normalization_point() {
    let k = genus_one();
    let e = k.curve().branch_points()[1];
    let err = RhSolver::new(&k, ThetaChar::zero(1), e + c(1e-4, 0.0)).err().unwrap();
    assert_eq!(err.code(), "SingularPoint");
    let rh = RhSolver::new(&k, ThetaChar::zero(1), c(0.15, 0.05)).unwrap();
    assert_eq!(rh.psi(e).unwrap_err().code(), "SingularPoint");
}
