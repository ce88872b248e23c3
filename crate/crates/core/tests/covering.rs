mod common;

use common::c;
use proptest::prelude::*;
use rhszego_core::covering::{conjugate_by_diagonal, parameter_count, to_permutation_rep, validate_quasi_perm, QuasiPermRep};
use rhszego_core::linalg::CMatrix;
use rhszego_core::C64;

fn matrix(sigma: &[usize], values: &[C64]) -> CMatrix {
    let n = sigma.len();
    CMatrix::from_fn(n, n, |i, j| if sigma[i] == j { values[i] } else { c(0.0, 0.0) })
}

fn arb_perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn arb_value() -> impl Strategy<Value = C64> {
    (0.2f64..3.0, -3.2f64..3.2).prop_map(|(r, t)| C64::from_polar(r, t))
}

/// A representation whose last matrix closes the relation.
fn arb_rep() -> impl Strategy<Value = (usize, Vec<CMatrix>)> {
    (2usize..=4, 2usize..=6).prop_flat_map(|(n, m)| {
        prop::collection::vec((arb_perm(n), prop::collection::vec(arb_value(), n)), m - 1).prop_map(move |gens| {
            let mut ms: Vec<CMatrix> = gens.iter().map(|(s, v)| matrix(s, v)).collect();
            let mut prod = CMatrix::identity(n);
            for x in &ms {
                prod = x * &prod;
            }
            ms.push(prod.inverse().unwrap());
            (n, ms)
        })
    })
}

fn orbit_of_zero(perms: &[Vec<usize>], n: usize) -> usize {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(j) = stack.pop() {
        for p in perms {
            if !seen[p[j]] {
                seen[p[j]] = true;
                stack.push(p[j]);
            }
        }
    }
    seen.iter().filter(|x| **x).count()
}

fn cycles(p: &[usize]) -> usize {
    let mut seen = vec![false; p.len()];
    let mut count = 0;
    for j in 0..p.len() {
        if !seen[j] {
            count += 1;
            let mut s = j;
            while !seen[s] {
                seen[s] = true;
                s = p[s];
            }
        }
    }
    count
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn permutation_part_of_random_reps((n, ms) in arb_rep(), d in prop::collection::vec(arb_value(), 4)) {
        let pts: Vec<C64> = (0..ms.len()).map(|i| c(i as f64, 0.5)).collect();
        let rep = QuasiPermRep::new(n, c(0.0, -3.0), pts, &ms, 1e-12).unwrap();
        prop_assert!(rep.product_residual() < 1e-9);
        let comb = to_permutation_rep(&rep).unwrap();
        // the permutation matrices multiply to the identity as well
        let mut prod = CMatrix::identity(n);
        for s in &comb.permutations {
            prod = &matrix(s, &vec![c(1.0, 0.0); n]) * &prod;
        }
        prop_assert_eq!(prod.max_diff(&CMatrix::identity(n)), 0.0);
        prop_assert_eq!(comb.connected, orbit_of_zero(&comb.permutations, n) == n);
        // Riemann–Hurwitz from cycle counts
        let ram: usize = comb.permutations.iter().map(|p| n - cycles(p)).sum();
        prop_assert_eq!(ram % 2, 0);
        prop_assert_eq!(comb.euler_genus, 1 + (ram / 2) as i64 - n as i64);
        if comb.connected {
            prop_assert_eq!(comb.genus as i64, comb.euler_genus);
        }
        let conj = conjugate_by_diagonal(&rep, &d[..n], 1e-12).unwrap();
        prop_assert_eq!(to_permutation_rep(&conj).unwrap(), comb);
        prop_assert!(conj.product_residual() < 1e-9);
    }

    #[test]
    fn two_nonzeros_in_a_row_rejected(n in 2usize..=4, row in 0usize..4, v in arb_value()) {
        let row = row % n;
        let mut m = CMatrix::identity(n);
        m[(row, (row + 1) % n)] = v;
        prop_assert_eq!(validate_quasi_perm(&m, 1e-12).unwrap_err().code(), "NotQuasiPermutation");
    }
}

#[test]
fn hyperelliptic_reps() {
    // four off-diagonal matrices [[0,d],[-1/d,0]] closing the relation
    let d = [c(1.3, 0.2), c(-0.4, 0.9), c(2.0, -1.0)];
    let mut ms: Vec<CMatrix> = d.iter().map(|x| matrix(&[1, 0], &[*x, -x.inv()])).collect();
    let mut prod = CMatrix::identity(2);
    for x in &ms {
        prod = x * &prod;
    }
    ms.push(prod.inverse().unwrap());
    let pts = vec![c(-1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0), c(0.0, -1.0)];
    let rep = QuasiPermRep::new(2, c(0.1, 0.1), pts, &ms, 1e-12).unwrap();
    let comb = to_permutation_rep(&rep).unwrap();
    assert_eq!(comb.genus, 1);
    assert!(comb.connected);
    assert_eq!(parameter_count(2, 4), 5);
    let conj = conjugate_by_diagonal(&rep, &[c(2.0, 0.0), c(1.0, 0.0)], 1e-12).unwrap();
    assert!((conj.matrices[0].values[0] - d[0] * 2.0).norm() < 1e-14);
    assert!((conj.matrices[0].values[1] + (d[0] * 2.0).inv()).norm() < 1e-14);
    assert_eq!(conjugate_by_diagonal(&rep, &[c(0.0, 0.0), c(1.0, 0.0)], 1e-12).unwrap_err().code(), "SingularD");
}
