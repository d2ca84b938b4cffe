//! Dense symmetric-matrix kernel.
//!
//! Everything the solver does with matrices in `S^m` goes through here:
//! eigendecomposition, PSD square roots, the Lyapunov operator
//! `L_A(U) = AU + UA` at `A = G^{1/2}`, and the isometric packing used
//! to lay out Newton systems.

use std::ops::{Add, Deref, Mul, Sub};

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Real symmetric matrix. The wrapped storage is exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Wraps `m`, rejecting it when the asymmetry exceeds rounding level.
    /// Accepted input is symmetrized exactly.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "expected a non-empty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let asym = (&m - m.transpose()).amax();
        if asym > 1e-12 * (1.0 + m.norm()) {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self::from_symmetrized(m))
    }

    /// `(m + mᵀ)/2`. The result is bitwise symmetric since floating-point
    /// addition commutes.
    pub fn from_symmetrized(m: DMatrix<f64>) -> Self {
        assert!(m.is_square(), "symmetric part of a non-square matrix");
        let t = m.transpose();
        SymMatrix((m + t) * 0.5)
    }

    pub fn identity(m: usize) -> Self {
        SymMatrix(DMatrix::identity(m, m))
    }

    pub fn zeros(m: usize) -> Self {
        SymMatrix(DMatrix::zeros(m, m))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        SymMatrix(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    /// Builds from row-major nested rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != m) {
            return Err(Error::DimensionMismatch(format!(
                "row {} has length {}, expected {}",
                bad,
                rows[bad].len(),
                m
            )));
        }
        Self::new(DMatrix::from_fn(m, m, |i, j| rows[i][j]))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn frob_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Trace inner product `A • B`.
    pub fn dot(&self, other: &SymMatrix) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn scale(&self, a: f64) -> SymMatrix {
        SymMatrix(&self.0 * a)
    }

    /// `self + a·other`
    pub fn axpy(&self, a: f64, other: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 + &other.0 * a)
    }

    /// `p · self · pᵀ`
    pub fn congruence(&self, p: &DMatrix<f64>) -> SymMatrix {
        SymMatrix::from_symmetrized(p * &self.0 * p.transpose())
    }

    /// `self - mu·I`
    pub fn shift(&self, mu: f64) -> SymMatrix {
        let mut m = self.0.clone();
        for i in 0..m.nrows() {
            m[(i, i)] -= mu;
        }
        SymMatrix(m)
    }
}

impl Deref for SymMatrix {
    type Target = DMatrix<f64>;
    fn deref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

impl Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 - &rhs.0)
    }
}

impl Mul<f64> for &SymMatrix {
    type Output = SymMatrix;
    fn mul(self, rhs: f64) -> SymMatrix {
        self.scale(rhs)
    }
}

/// `Sym(A) = (A + Aᵀ)/2` of a general square matrix.
pub fn sym_part(a: &DMatrix<f64>) -> SymMatrix {
    SymMatrix::from_symmetrized(a.clone())
}

/// Orthogonal eigendecomposition `a = q·diag(d)·qᵀ`, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub q: DMatrix<f64>,
    pub d: DVector<f64>,
}

impl EigenPair {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.q * DMatrix::from_diagonal(&self.d) * self.q.transpose()
    }

    /// `q · diag(f(d)) · qᵀ`
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let fd = self.d.map(f);
        let mut scaled = self.q.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= fd[j];
        }
        SymMatrix::from_symmetrized(scaled * self.q.transpose())
    }

    pub fn min(&self) -> f64 {
        self.d[self.d.len() - 1]
    }

    pub fn max(&self) -> f64 {
        self.d[0]
    }
}

const EIG_MAX_SWEEPS: usize = 10_000;

pub fn sym_eig(a: &SymMatrix) -> Result<EigenPair> {
    let se = SymmetricEigen::try_new(a.0.clone(), f64::EPSILON, EIG_MAX_SWEEPS)
        .ok_or_else(|| Error::Numeric("symmetric eigensolver hit its iteration limit".into()))?;
    let m = a.dim();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| se.eigenvalues[j].total_cmp(&se.eigenvalues[i]));
    let d = DVector::from_iterator(m, order.iter().map(|&i| se.eigenvalues[i]));
    let mut q = DMatrix::zeros(m, m);
    for (dst, &src) in order.iter().enumerate() {
        q.set_column(dst, &se.eigenvectors.column(src));
    }
    Ok(EigenPair { q, d })
}

pub fn min_eig(a: &SymMatrix) -> f64 {
    match sym_eig(a) {
        Ok(e) => e.min(),
        Err(_) => f64::NAN,
    }
}

/// Strict positive definiteness by attempted Cholesky factorization.
pub fn is_pd(a: &SymMatrix) -> bool {
    Cholesky::new(a.0.clone()).is_some()
}

/// Clamp band used when a caller has no better tolerance.
pub const DEFAULT_PSD_TOL: f64 = 1e-12;

/// Principal square root of a PSD matrix. Eigenvalues in `[-tol·scale, 0)`
/// are treated as zero; anything below that band is an error.
pub fn sqrt_psd(a: &SymMatrix, tol: f64) -> Result<SymMatrix> {
    let e = sym_eig(a)?;
    let scale = a.frob_norm().max(1.0);
    if e.min() < -tol * scale {
        return Err(Error::NotPositiveSemidefinite { min_eig: e.min() });
    }
    Ok(e.map(|v| v.max(0.0).sqrt()))
}

/// Default PD threshold for Lyapunov solves: `1e-13 · trace(g)`.
pub fn default_pd_tol(g: &SymMatrix) -> f64 {
    1e-13 * g.trace().abs()
}

/// Inverse of `U ↦ U·g^{1/2} + g^{1/2}·U` for a fixed `g ≻ 0`, applied in
/// the eigenbasis of `g`: `(QᵀUQ)_{pq} = (QᵀBQ)_{pq} / (√d_p + √d_q)`.
#[derive(Debug, Clone)]
pub struct SqrtLyapunov {
    eig: EigenPair,
    sqrt_d: DVector<f64>,
}

impl SqrtLyapunov {
    pub fn new(g: &SymMatrix, pd_tol: f64) -> Result<Self> {
        Self::from_eig(sym_eig(g)?, pd_tol)
    }

    pub fn from_eig(eig: EigenPair, pd_tol: f64) -> Result<Self> {
        if eig.min() <= pd_tol {
            return Err(Error::NotPositiveDefinite {
                min_eig: eig.min(),
                threshold: pd_tol,
            });
        }
        let sqrt_d = eig.d.map(f64::sqrt);
        Ok(Self { eig, sqrt_d })
    }

    pub fn solve(&self, b: &SymMatrix) -> SymMatrix {
        let q = &self.eig.q;
        let mut bq = q.transpose() * b.as_matrix() * q;
        let m = bq.nrows();
        for j in 0..m {
            for i in 0..m {
                bq[(i, j)] /= self.sqrt_d[i] + self.sqrt_d[j];
            }
        }
        SymMatrix::from_symmetrized(q * bq * q.transpose())
    }

    /// Smallest denominator `2·√λ_min`; the inverse operator norm is its reciprocal.
    pub fn min_denominator(&self) -> f64 {
        2.0 * self.sqrt_d[self.sqrt_d.len() - 1]
    }

    pub fn eigen(&self) -> &EigenPair {
        &self.eig
    }
}

/// Solves `U·g^{1/2} + g^{1/2}·U = b` for symmetric `U`.
pub fn lyap_solve_sqrt(g: &SymMatrix, b: &SymMatrix, pd_tol: f64) -> Result<SymMatrix> {
    if g.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "lyapunov: g is {}x{}, b is {}x{}",
            g.dim(),
            g.dim(),
            b.dim(),
            b.dim()
        )));
    }
    Ok(SqrtLyapunov::new(g, pd_tol)?.solve(b))
}

/// Lyapunov operator `L_a(u) = a·u + u·a`.
pub fn lyap_apply(a: &SymMatrix, u: &SymMatrix) -> SymMatrix {
    sym_part(&(a.as_matrix() * u.as_matrix() * 2.0))
}

pub fn svec_len(m: usize) -> usize {
    m * (m + 1) / 2
}

/// Column-wise packing of the lower triangle with off-diagonals scaled by
/// √2, so that `svec(A)·svec(B) = A • B`.
pub fn svec(a: &SymMatrix) -> DVector<f64> {
    let m = a.dim();
    let mut v = DVector::zeros(svec_len(m));
    let mut k = 0;
    for j in 0..m {
        v[k] = a[(j, j)];
        k += 1;
        for i in (j + 1)..m {
            v[k] = a[(i, j)] * std::f64::consts::SQRT_2;
            k += 1;
        }
    }
    v
}

pub fn smat(v: &[f64], m: usize) -> Result<SymMatrix> {
    if v.len() != svec_len(m) {
        return Err(Error::DimensionMismatch(format!(
            "svec of length {} does not match m = {} (expected {})",
            v.len(),
            m,
            svec_len(m)
        )));
    }
    let mut a = DMatrix::zeros(m, m);
    let mut k = 0;
    for j in 0..m {
        a[(j, j)] = v[k];
        k += 1;
        for i in (j + 1)..m {
            let x = v[k] / std::f64::consts::SQRT_2;
            a[(i, j)] = x;
            a[(j, i)] = x;
            k += 1;
        }
    }
    Ok(SymMatrix(a))
}

/// Both sides of `‖ABA − μI‖² + ‖A²B − BA²‖²/2 = ‖A²B − μI‖²` (Frobenius).
pub fn lemma_dx_gap(a: &SymMatrix, b: &SymMatrix, mu: f64) -> (f64, f64) {
    let m = a.dim();
    let id = DMatrix::<f64>::identity(m, m);
    let a = a.as_matrix();
    let b = b.as_matrix();
    let a2 = a * a;
    let aba = a * b * a;
    let a2b = &a2 * b;
    let comm = &a2b - b * &a2;
    let lhs = (&aba - &id * mu).norm_squared() + comm.norm_squared() / 2.0;
    let rhs = (&a2b - &id * mu).norm_squared();
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym(rng: &mut impl Rng, m: usize) -> SymMatrix {
        SymMatrix::from_symmetrized(DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0)))
    }

    fn random_pd(rng: &mut impl Rng, m: usize) -> SymMatrix {
        let b = DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0));
        SymMatrix::from_symmetrized(&b * b.transpose() + DMatrix::identity(m, m) * 0.5)
    }

    #[test]
    fn new_rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(SymMatrix::new(m), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let e = sym_eig(&SymMatrix::identity(3)).unwrap();
        assert_eq!(e.d.as_slice(), &[1.0, 1.0, 1.0]);
        let e = sym_eig(&SymMatrix::from_diagonal(&[4.0, 1.0])).unwrap();
        assert_eq!(e.d.as_slice(), &[4.0, 1.0]);
        assert!((e.q.abs() - DMatrix::identity(2, 2)).norm() < 1e-15);
    }

    #[test]
    fn eig_random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_sym(&mut rng, 5);
        let e = sym_eig(&a).unwrap();
        assert!((e.reconstruct() - a.as_matrix()).norm() <= 1e-12 * a.frob_norm());
        assert!((e.q.transpose() * &e.q - DMatrix::identity(5, 5)).norm() <= 5e-12);
        assert!(e.d.as_slice().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn sqrt_examples() {
        let s = sqrt_psd(&SymMatrix::identity(3), 1e-12).unwrap();
        assert!((s.as_matrix() - DMatrix::identity(3, 3)).norm() < 1e-15);
        let s = sqrt_psd(&SymMatrix::from_diagonal(&[4.0, 9.0]), 1e-12).unwrap();
        assert!((s.as_matrix() - DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0]))).norm() < 1e-15);
        let a = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let s = sqrt_psd(&a, 1e-12).unwrap();
        assert!((s.as_matrix() * s.as_matrix() - a.as_matrix()).norm() <= 1e-12);
        assert!(min_eig(&s) > 0.0);
    }

    #[test]
    fn sqrt_clamps_tiny_negative_and_rejects_large() {
        let a = SymMatrix::from_diagonal(&[1.0, -1e-14]);
        let s = sqrt_psd(&a, 1e-12).unwrap();
        assert_eq!(s[(1, 1)], 0.0);
        let a = SymMatrix::from_diagonal(&[1.0, -1e-6]);
        assert!(matches!(
            sqrt_psd(&a, 1e-12),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn lyapunov_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = random_sym(&mut rng, 3);
        let u = lyap_solve_sqrt(&SymMatrix::identity(3), &b, 1e-13).unwrap();
        assert!((u.as_matrix() - b.as_matrix() / 2.0).norm() < 1e-15);

        let g = SymMatrix::from_diagonal(&[4.0, 4.0]);
        let u = lyap_solve_sqrt(&g, &SymMatrix::identity(2), 1e-13).unwrap();
        assert!((u.as_matrix() - DMatrix::identity(2, 2) / 4.0).norm() < 1e-15);

        let g = random_pd(&mut rng, 4);
        let b = random_sym(&mut rng, 4);
        let u = lyap_solve_sqrt(&g, &b, default_pd_tol(&g)).unwrap();
        let gh = sqrt_psd(&g, 1e-12).unwrap();
        let res = lyap_apply(&gh, &u).as_matrix() - b.as_matrix();
        assert!(res.norm() <= 1e-10 * (1.0 + b.frob_norm()));
    }

    #[test]
    fn lyapunov_rejects_boundary() {
        let g = SymMatrix::from_diagonal(&[1.0, 0.0]);
        let r = lyap_solve_sqrt(&g, &SymMatrix::identity(2), default_pd_tol(&g));
        assert!(matches!(r, Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn svec_examples() {
        assert_eq!(svec(&SymMatrix::identity(2)).as_slice(), &[1.0, 0.0, 1.0]);
        let a = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let v = svec(&a);
        assert_eq!(v.as_slice(), &[0.0, std::f64::consts::SQRT_2, 0.0]);
        assert!((v.dot(&v) - 2.0).abs() < 1e-15);
        assert!(matches!(smat(&[1.0, 2.0], 2), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn dx_gap_examples() {
        let (l, r) = lemma_dx_gap(&SymMatrix::identity(2), &SymMatrix::identity(2), 1.0);
        assert_eq!((l, r), (0.0, 0.0));
        let (l, r) = lemma_dx_gap(&SymMatrix::from_diagonal(&[1.0, 2.0]), &SymMatrix::identity(2), 0.0);
        assert_eq!((l, r), (17.0, 17.0));
    }

    #[test]
    fn pd_examples() {
        assert_eq!(min_eig(&SymMatrix::identity(2)), 1.0);
        assert!(is_pd(&SymMatrix::identity(2)));
        let b = SymMatrix::from_diagonal(&[1.0, 0.0]);
        assert_eq!(min_eig(&b), 0.0);
        assert!(!is_pd(&b));
        let c = SymMatrix::from_rows(&[vec![2.0, 3.0], vec![3.0, 2.0]]).unwrap();
        assert!((min_eig(&c) + 1.0).abs() < 1e-14);
        assert!(!is_pd(&c));
    }

    fn sym_strategy(max_m: usize) -> impl Strategy<Value = SymMatrix> {
        (1..=max_m).prop_flat_map(|m| {
            prop::collection::vec(-2.0f64..2.0, m * m)
                .prop_map(move |v| SymMatrix::from_symmetrized(DMatrix::from_vec(m, m, v)))
        })
    }

    fn pair_strategy(max_m: usize) -> impl Strategy<Value = (SymMatrix, SymMatrix)> {
        (1..=max_m).prop_flat_map(|m| {
            (
                prop::collection::vec(-2.0f64..2.0, m * m),
                prop::collection::vec(-2.0f64..2.0, m * m),
            )
                .prop_map(move |(a, b)| {
                    (
                        SymMatrix::from_symmetrized(DMatrix::from_vec(m, m, a)),
                        SymMatrix::from_symmetrized(DMatrix::from_vec(m, m, b)),
                    )
                })
        })
    }

    proptest! {
        #[test]
        fn prop_eig_reconstructs(a in sym_strategy(8)) {
            let e = sym_eig(&a).unwrap();
            prop_assert!((e.reconstruct() - a.as_matrix()).norm() <= 1e-12 * (1.0 + a.frob_norm()));
        }

        #[test]
        fn prop_svec_isometry((a, b) in pair_strategy(7)) {
            let lhs = svec(&a).dot(&svec(&b));
            let rhs = a.dot(&b);
            prop_assert!((lhs - rhs).abs() <= 1e-14 * (1.0 + a.frob_norm() * b.frob_norm()));
            let back = smat(svec(&a).as_slice(), a.dim()).unwrap();
            prop_assert!((back.as_matrix() - a.as_matrix()).amax() <= 1e-15 * (1.0 + a.amax()));
        }

        #[test]
        fn prop_dx_gap_identity((a, b) in pair_strategy(8), mu in -3.0f64..3.0) {
            let (l, r) = lemma_dx_gap(&a, &b, mu);
            prop_assert!((l - r).abs() <= 1e-10 * (1.0 + r));
        }

        #[test]
        fn prop_xyx_inequality((a, y) in pair_strategy(6), mu in -3.0f64..3.0) {
            let x = SymMatrix::from_symmetrized(a.as_matrix() * a.as_matrix());
            let xh = sqrt_psd(&x, 1e-10).unwrap();
            let id = DMatrix::<f64>::identity(x.dim(), x.dim());
            let lhs = (xh.as_matrix() * y.as_matrix() * xh.as_matrix() - &id * mu).norm();
            let rhs = (x.as_matrix() * y.as_matrix() - &id * mu).norm();
            prop_assert!(lhs <= rhs + 1e-12 * (1.0 + rhs));
        }

        #[test]
        fn prop_lyapunov_inverts((a, b) in pair_strategy(6)) {
            let g = SymMatrix::from_symmetrized(a.as_matrix() * a.as_matrix() + DMatrix::identity(a.dim(), a.dim()) * 0.1);
            let u = lyap_solve_sqrt(&g, &b, default_pd_tol(&g)).unwrap();
            let gh = sqrt_psd(&g, 1e-12).unwrap();
            let res = lyap_apply(&gh, &u).as_matrix() - b.as_matrix();
            prop_assert!(res.norm() <= 1e-10 * (1.0 + b.frob_norm()));
        }

        #[test]
        fn prop_aa_bound((a, dx) in pair_strategy(6)) {
            let m = a.dim();
            let x = SymMatrix::from_symmetrized(a.as_matrix() * a.as_matrix() + DMatrix::identity(m, m) * 0.05);
            let u = lyap_solve_sqrt(&x, &dx, default_pd_tol(&x)).unwrap();
            let e = sym_eig(&x).unwrap();
            let x_inv_sqrt = e.map(|v| 1.0 / v.sqrt());
            let x_inv = e.map(|v| 1.0 / v);
            let lhs = (u.as_matrix() * x_inv_sqrt.as_matrix()).norm();
            let rhs = (m as f64 / 2.0).sqrt() * dx.frob_norm() * x_inv.frob_norm();
            prop_assert!(lhs <= rhs * (1.0 + 1e-12));
        }
    }
}
