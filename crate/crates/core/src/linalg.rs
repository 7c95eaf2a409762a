//! Small dense helpers for the 2–4 dimensional matrices used throughout.

use nalgebra::DMatrix;

pub type Matrix = DMatrix<f64>;

/// All permutations of `0..n` together with their parity sign (±1).
///
/// Heap's algorithm; each swap flips the sign.
pub fn signed_permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = vec![(perm.clone(), 1.0)];
    let mut sign = 1.0;
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            sign = -sign;
            out.push((perm.clone(), sign));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Levi-Civita symbol for an index tuple of length `n` over `0..n`.
pub fn levi_civita(indices: &[usize]) -> f64 {
    let n = indices.len();
    let mut seen = vec![false; n];
    for &i in indices {
        if i >= n || seen[i] {
            return 0.0;
        }
        seen[i] = true;
    }
    // parity by counting inversions
    let mut inversions = 0;
    for a in 0..n {
        for b in a + 1..n {
            if indices[a] > indices[b] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Determinant by the Leibniz expansion. Exact in structure and cheap for
/// `n ≤ 4`; kept independent of any LU factorization.
pub fn leibniz_determinant(m: &Matrix) -> f64 {
    assert!(m.is_square());
    let n = m.nrows();
    signed_permutations(n)
        .iter()
        .map(|(p, s)| s * (0..n).map(|i| m[(i, p[i])]).product::<f64>())
        .sum()
}

/// Eigenvalues of a symmetric matrix from the iterative solver, sorted
/// descending.
pub fn symmetric_eigenvalues(m: &Matrix) -> Vec<f64> {
    let eig = m.clone().symmetric_eigen();
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Symmetric square root `S` with `S·S = m` for a symmetric positive
/// definite `m`. Returns `None` if an eigenvalue is not strictly positive.
pub fn symmetric_sqrt(m: &Matrix) -> Option<Matrix> {
    let eig = m.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&e| !(e > 0.0)) {
        return None;
    }
    let root = Matrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    Some(&eig.eigenvectors * root * eig.eigenvectors.transpose())
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
