//! Quasi-permutation monodromy representations and the branched coverings
//! they define.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::CMatrix;
use crate::{Error, Result, C64};

/// A matrix with exactly one non-vanishing entry per row and per column,
/// stored as `entries[j][sigma[j]] = values[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiPermMatrix {
    pub sigma: Vec<usize>,
    pub values: Vec<C64>,
}

impl QuasiPermMatrix {
    pub fn dimension(&self) -> usize {
        self.sigma.len()
    }

    pub fn to_matrix(&self) -> CMatrix {
        let n = self.dimension();
        let mut m = CMatrix::zeros(n, n);
        for j in 0..n {
            m[(j, self.sigma[j])] = self.values[j];
        }
        m
    }

    pub fn is_diagonal(&self) -> bool {
        self.sigma.iter().enumerate().all(|(j, &s)| j == s)
    }
}

/// Decompose `m` into permutation and values. An entry counts as non-vanishing
/// when its modulus exceeds `tol_zero` times the largest entry modulus.
pub fn validate_quasi_perm(m: &CMatrix, tol_zero: f64) -> Result<QuasiPermMatrix> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::DimensionMismatch { expected: m.rows().max(1), rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    let thresh = tol_zero * m.max_abs();
    let nz = |i: usize, j: usize| m[(i, j)].norm() > thresh;
    let mut sigma = vec![0usize; n];
    for i in 0..n {
        let count = (0..n).filter(|&j| nz(i, j)).count();
        if count != 1 {
            return Err(Error::NotQuasiPermutation { index: i, count });
        }
        sigma[i] = (0..n).find(|&j| nz(i, j)).unwrap();
    }
    for j in 0..n {
        let count = (0..n).filter(|&i| nz(i, j)).count();
        if count != 1 {
            return Err(Error::NotQuasiPermutation { index: j, count });
        }
    }
    let values = (0..n).map(|i| m[(i, sigma[i])]).collect();
    Ok(QuasiPermMatrix { sigma, values })
}

/// Ordered monodromy data: `matrices[m]` is attached to `points[m]`, and
/// `M_M ··· M_1 = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiPermRep {
    pub n: usize,
    pub base_point: C64,
    pub points: Vec<C64>,
    pub matrices: Vec<QuasiPermMatrix>,
}

impl QuasiPermRep {
    /// Validate every matrix and the point configuration.
    pub fn new(n: usize, base_point: C64, points: Vec<C64>, matrices: &[CMatrix], tol_zero: f64) -> Result<Self> {
        if points.len() != matrices.len() || points.is_empty() {
            return Err(Error::InvalidInput("need one matrix per singular point"));
        }
        let mut qs = Vec::with_capacity(matrices.len());
        for m in matrices {
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimensionMismatch { expected: n, rows: m.rows(), cols: m.cols() });
            }
            qs.push(validate_quasi_perm(m, tol_zero)?);
        }
        for (i, a) in points.iter().enumerate() {
            if *a == base_point {
                return Err(Error::InvalidInput("base point coincides with a singular point"));
            }
            if points[..i].contains(a) {
                return Err(Error::InvalidInput("singular points must be pairwise distinct"));
            }
        }
        Ok(QuasiPermRep { n, base_point, points, matrices: qs })
    }

    /// max |M_M ··· M_1 − I|.
    pub fn product_residual(&self) -> f64 {
        let mut p = CMatrix::identity(self.n);
        for m in &self.matrices {
            p = &m.to_matrix() * &p;
        }
        p.max_diff(&CMatrix::identity(self.n))
    }
}

/// Permutation data of the covering attached to a representation.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringCombinatorics {
    pub n: usize,
    pub permutations: Vec<Vec<usize>>,
    /// `multiplicities[m][j]`: length of the cycle of sheet `j` under `s_m`.
    pub multiplicities: Vec<Vec<usize>>,
    /// Orbits of the generated group, each sorted, ordered by smallest sheet.
    pub components: Vec<Vec<usize>>,
    /// Sum of the genera of the connected components.
    pub genus: usize,
    /// Riemann-Hurwitz value `1 - N + Σ(k-1)/2` over the whole covering;
    /// negative when the covering is disconnected.
    pub euler_genus: i64,
    pub connected: bool,
}

/// Row j of `M_M ⋯ M_1` has its entry in column `σ_1(σ_2(⋯σ_M(j)))`.
fn compose_is_identity(perms: &[Vec<usize>], n: usize) -> bool {
    (0..n).all(|j| perms.iter().rev().fold(j, |s, p| p[s]) == j)
}

fn cycle_lengths(p: &[usize]) -> Vec<usize> {
    let n = p.len();
    let mut out = vec![0; n];
    for j in 0..n {
        let mut len = 1;
        let mut s = p[j];
        while s != j {
            s = p[s];
            len += 1;
        }
        out[j] = len;
    }
    out
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Replace every non-vanishing entry by 1 and read off the covering.
pub fn to_permutation_rep(rep: &QuasiPermRep) -> Result<CoveringCombinatorics> {
    let n = rep.n;
    let permutations: Vec<Vec<usize>> = rep.matrices.iter().map(|m| m.sigma.clone()).collect();
    if !compose_is_identity(&permutations, n) {
        return Err(Error::RelationViolated);
    }
    let multiplicities: Vec<Vec<usize>> = permutations.iter().map(|p| cycle_lengths(p)).collect();

    let mut parent: Vec<usize> = (0..n).collect();
    for p in &permutations {
        for j in 0..n {
            let a = find(&mut parent, j);
            let b = find(&mut parent, p[j]);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut root_of = vec![usize::MAX; n];
    for j in 0..n {
        let r = find(&mut parent, j);
        if root_of[r] == usize::MAX {
            root_of[r] = components.len();
            components.push(Vec::new());
        }
        components[root_of[r]].push(j);
    }

    // sum of (k - 1) over the cycles of every s_m restricted to `sheets`
    let ramification = |sheets: &[usize]| -> Result<usize> {
        let mut total = 0usize;
        for (p, mult) in permutations.iter().zip(&multiplicities) {
            let mut seen = vec![false; n];
            for &j in sheets {
                if seen[j] {
                    continue;
                }
                let mut s = j;
                loop {
                    seen[s] = true;
                    s = p[s];
                    if s == j {
                        break;
                    }
                }
                total += mult[j] - 1;
            }
        }
        if total % 2 != 0 {
            return Err(Error::GenusNotInteger);
        }
        Ok(total / 2)
    };

    let mut genus = 0usize;
    for comp in &components {
        let r = ramification(comp)?;
        let g = 1 + r as i64 - comp.len() as i64;
        if g < 0 {
            return Err(Error::GenusNotInteger);
        }
        genus += g as usize;
    }
    let all: Vec<usize> = (0..n).collect();
    let euler_genus = 1 + ramification(&all)? as i64 - n as i64;

    Ok(CoveringCombinatorics {
        n,
        permutations,
        multiplicities,
        connected: components.len() == 1,
        components,
        genus,
        euler_genus,
    })
}

/// `D M D^{-1}` for every monodromy matrix.
pub fn conjugate_by_diagonal(rep: &QuasiPermRep, d: &[C64], tol_zero: f64) -> Result<QuasiPermRep> {
    if d.len() != rep.n {
        return Err(Error::DimensionMismatch { expected: rep.n, rows: d.len(), cols: 1 });
    }
    let scale = d.iter().fold(0.0f64, |m, x| m.max(x.norm()));
    for (i, x) in d.iter().enumerate() {
        if x.norm() <= tol_zero * scale.max(1.0) {
            return Err(Error::SingularD(i));
        }
    }
    let matrices = rep
        .matrices
        .iter()
        .map(|m| QuasiPermMatrix {
            sigma: m.sigma.clone(),
            values: (0..rep.n).map(|j| d[j] * m.values[j] / d[m.sigma[j]]).collect(),
        })
        .collect();
    Ok(QuasiPermRep { n: rep.n, base_point: rep.base_point, points: rep.points.clone(), matrices })
}

/// Dimension `MN - 2N + 1` of the family of quasi-permutation data with fixed
/// permutation part, modulo diagonal conjugation.
pub fn parameter_count(n: usize, m: usize) -> i64 {
    (m * n) as i64 - 2 * n as i64 + 1
}
