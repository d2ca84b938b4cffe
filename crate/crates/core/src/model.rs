//! Problem abstraction and residual maps.
//!
//! A problem is `min f(x)` subject to `G(x) ⪰ 0` and `h(x) = 0`, with
//! `f: ℝⁿ → ℝ`, `G: ℝⁿ → Sᵐ`, `h: ℝⁿ → ℝˢ`. The Lagrangian is
//! `L(w) = f(x) − G(x)•Y + h(x)ᵀz` for `w = (x, Y, z)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scaling::ScalingData;
use crate::symcore::{is_pd, sqrt_psd, sym_part, SymMatrix, DEFAULT_PSD_TOL};

/// Evaluation oracle for `f`, `G`, `h` and their derivatives.
///
/// Implementations must be pure functions of their arguments.
pub trait Problem {
    fn n(&self) -> usize;
    fn m(&self) -> usize;
    fn s(&self) -> usize;

    fn f(&self, x: &DVector<f64>) -> f64;
    fn grad_f(&self, x: &DVector<f64>) -> DVector<f64>;
    fn hess_f(&self, x: &DVector<f64>) -> DMatrix<f64>;

    fn g(&self, x: &DVector<f64>) -> SymMatrix;
    /// Partial derivatives `Gᵢ(x) = ∂G(x)/∂xᵢ`, `i = 1..n`.
    fn g_partials(&self, x: &DVector<f64>) -> Vec<SymMatrix>;

    fn h(&self, x: &DVector<f64>) -> DVector<f64>;
    /// `∇h(x)`, an `n × s` matrix whose columns are the constraint gradients.
    fn jac_h(&self, x: &DVector<f64>) -> DMatrix<f64>;

    /// `n × n` matrix with entries `Y • ∂²G(x)/∂xᵢ∂xⱼ`.
    ///
    /// The default uses central differences of [`Problem::g_partials`].
    fn second_contraction(&self, x: &DVector<f64>, y: &SymMatrix) -> DMatrix<f64> {
        let n = self.n();
        let step = fd_step(x);
        let mut out = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += step;
            xm[j] -= step;
            let gp = self.g_partials(&xp);
            let gm = self.g_partials(&xm);
            for i in 0..n {
                out[(i, j)] = (gp[i].dot(y) - gm[i].dot(y)) / (2.0 * step);
            }
        }
        sym_part(&out).into_inner()
    }

    /// `Σ zₖ ∇²hₖ(x)`; the default uses central differences of [`Problem::jac_h`].
    fn hess_h(&self, x: &DVector<f64>, z: &DVector<f64>) -> DMatrix<f64> {
        let n = self.n();
        let step = fd_step(x);
        let mut out = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += step;
            xm[j] -= step;
            let col = (self.jac_h(&xp) * z - self.jac_h(&xm) * z) / (2.0 * step);
            out.set_column(j, &col);
        }
        sym_part(&out).into_inner()
    }
}

/// Central-difference step `1e-6·(1 + ‖x‖)`.
pub fn fd_step(x: &DVector<f64>) -> f64 {
    1e-6 * (1.0 + x.norm())
}

/// Primal-dual point `w = (x, Y, z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Iterate {
    pub x: DVector<f64>,
    pub y: SymMatrix,
    pub z: DVector<f64>,
}

impl Iterate {
    pub fn new(x: DVector<f64>, y: SymMatrix, z: DVector<f64>) -> Self {
        Self { x, y, z }
    }

    /// `√(‖x‖² + ‖Y‖²_F + ‖z‖²)`
    pub fn norm(&self) -> f64 {
        (self.x.norm_squared() + self.y.frob_norm().powi(2) + self.z.norm_squared()).sqrt()
    }

    pub fn dist(&self, other: &Iterate) -> f64 {
        ((&self.x - &other.x).norm_squared()
            + (&self.y - &other.y).frob_norm().powi(2)
            + (&self.z - &other.z).norm_squared())
        .sqrt()
    }

    pub fn check_dims(&self, p: &dyn Problem) -> Result<()> {
        if self.x.len() != p.n() || self.y.dim() != p.m() || self.z.len() != p.s() {
            return Err(Error::DimensionMismatch(format!(
                "iterate has (n, m, s) = ({}, {}, {}), problem has ({}, {}, {})",
                self.x.len(),
                self.y.dim(),
                self.z.len(),
                p.n(),
                p.m(),
                p.s()
            )));
        }
        Ok(())
    }

    /// Both `G(x)` and `Y` pass the strict PD test.
    pub fn is_interior(&self, p: &dyn Problem) -> bool {
        is_pd(&p.g(&self.x)) && is_pd(&self.y)
    }

    pub fn ensure_interior(&self, p: &dyn Problem) -> Result<()> {
        if !is_pd(&p.g(&self.x)) {
            return Err(Error::NotInterior("G(x) is not positive definite".into()));
        }
        if !is_pd(&self.y) {
            return Err(Error::NotInterior("Y is not positive definite".into()));
        }
        Ok(())
    }
}

/// The three value blocks of a residual map together with their composite norm.
/// The matrix block is general because `G(x)Y − μI` is not symmetric.
#[derive(Debug, Clone)]
pub struct ResidualTriple {
    pub r_x: DVector<f64>,
    pub r_mat: DMatrix<f64>,
    pub r_h: DVector<f64>,
    pub norm: f64,
}

impl ResidualTriple {
    pub fn new(r_x: DVector<f64>, r_mat: DMatrix<f64>, r_h: DVector<f64>) -> Self {
        let norm = (r_x.norm_squared() + r_mat.norm_squared() + r_h.norm_squared()).sqrt();
        Self { r_x, r_mat, r_h, norm }
    }

    pub fn mat_norm(&self) -> f64 {
        self.r_mat.norm()
    }
}

/// `JG(x)*Y = (G₁(x)•Y, …, Gₙ(x)•Y)`
pub fn adjoint_jg(p: &dyn Problem, x: &DVector<f64>, y: &SymMatrix) -> DVector<f64> {
    adjoint_from_partials(&p.g_partials(x), y)
}

pub(crate) fn adjoint_from_partials(gi: &[SymMatrix], y: &SymMatrix) -> DVector<f64> {
    DVector::from_iterator(gi.len(), gi.iter().map(|g| g.dot(y)))
}

/// `JG(x)d = Σ dᵢGᵢ(x)`
pub fn apply_jg(p: &dyn Problem, x: &DVector<f64>, d: &DVector<f64>) -> SymMatrix {
    apply_from_partials(&p.g_partials(x), d, p.m())
}

pub(crate) fn apply_from_partials(gi: &[SymMatrix], d: &DVector<f64>, m: usize) -> SymMatrix {
    gi.iter()
        .zip(d.iter())
        .fold(SymMatrix::zeros(m), |acc, (g, &di)| acc.axpy(di, g))
}

/// `∇ₓL(w) = ∇f(x) − JG(x)*Y + ∇h(x)z`
pub fn grad_lagrangian(p: &dyn Problem, w: &Iterate) -> DVector<f64> {
    p.grad_f(&w.x) - adjoint_jg(p, &w.x, &w.y) + p.jac_h(&w.x) * &w.z
}

/// `∇²ₓₓL(w) = ∇²f(x) − [Y•∂²G/∂xᵢ∂xⱼ] + Σ zₖ∇²hₖ(x)`
pub fn hess_lagrangian(p: &dyn Problem, w: &Iterate) -> DMatrix<f64> {
    let h = p.hess_f(&w.x) - p.second_contraction(&w.x, &w.y) + p.hess_h(&w.x, &w.z);
    sym_part(&h).into_inner()
}

/// Scaled barrier residual `(∇ₓL; Ĝ^{1/2}ŶĜ^{1/2} − μI; h)`.
pub fn residual_xi(p: &dyn Problem, w: &Iterate, mu: f64, sc: &ScalingData) -> Result<ResidualTriple> {
    if !is_pd(&sc.g_hat) {
        return Err(Error::NotInterior("scaled G is not positive definite".into()));
    }
    let gs = sc.g_hat_sqrt.as_matrix();
    let center = sym_part(&(gs * sc.y_hat.as_matrix() * gs)).shift(mu);
    Ok(ResidualTriple::new(
        grad_lagrangian(p, w),
        center.into_inner(),
        p.h(&w.x),
    ))
}

/// Unscaled `Ξ` at barrier `mu`: `(∇ₓL; G^{1/2}YG^{1/2} − μI; h)`.
/// With `mu = 0` this is the quantity driven to zero by the solver.
pub fn residual_xi_identity(p: &dyn Problem, w: &Iterate, mu: f64) -> Result<ResidualTriple> {
    let g = p.g(&w.x);
    let gs =
        sqrt_psd(&g, DEFAULT_PSD_TOL).map_err(|_| Error::NotInterior("G(x) is not positive semidefinite".into()))?;
    let center = sym_part(&(gs.as_matrix() * w.y.as_matrix() * gs.as_matrix())).shift(mu);
    Ok(ResidualTriple::new(
        grad_lagrangian(p, w),
        center.into_inner(),
        p.h(&w.x),
    ))
}

/// `(∇ₓL; G(x)Y − μI; h)`
pub fn residual_phi1(p: &dyn Problem, w: &Iterate, mu: f64) -> ResidualTriple {
    let gy = p.g(&w.x).as_matrix() * w.y.as_matrix();
    let m = gy.nrows();
    ResidualTriple::new(grad_lagrangian(p, w), gy - DMatrix::identity(m, m) * mu, p.h(&w.x))
}

/// `(∇ₓL; Sym(G(x)Y) − μI; h)`
pub fn residual_phi2(p: &dyn Problem, w: &Iterate, mu: f64) -> ResidualTriple {
    let gy = p.g(&w.x).as_matrix() * w.y.as_matrix();
    ResidualTriple::new(grad_lagrangian(p, w), sym_part(&gy).shift(mu).into_inner(), p.h(&w.x))
}

/// Membership in `{w interior : ‖Φ¹_μ(w)‖ ≤ r}`.
pub fn in_neighborhood(p: &dyn Problem, w: &Iterate, mu: f64, r: f64) -> bool {
    w.is_interior(p) && residual_phi1(p, w, mu).norm <= r
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    /// Small genuinely nonlinear problem used to exercise derivative plumbing:
    /// `f = x₀⁴/4 + x₀x₁ + x₁²`, `G(x) = [[1 + x₀², x₀x₁], [x₀x₁, 2 + sin x₁]]`,
    /// `h(x) = x₀² + x₁ − 1`.
    pub struct NonlinearToy;

    impl Problem for NonlinearToy {
        fn n(&self) -> usize {
            2
        }
        fn m(&self) -> usize {
            2
        }
        fn s(&self) -> usize {
            1
        }
        fn f(&self, x: &DVector<f64>) -> f64 {
            x[0].powi(4) / 4.0 + x[0] * x[1] + x[1] * x[1]
        }
        fn grad_f(&self, x: &DVector<f64>) -> DVector<f64> {
            DVector::from_vec(vec![x[0].powi(3) + x[1], x[0] + 2.0 * x[1]])
        }
        fn hess_f(&self, x: &DVector<f64>) -> DMatrix<f64> {
            DMatrix::from_row_slice(2, 2, &[3.0 * x[0] * x[0], 1.0, 1.0, 2.0])
        }
        fn g(&self, x: &DVector<f64>) -> SymMatrix {
            SymMatrix::from_rows(&[
                vec![1.0 + x[0] * x[0], x[0] * x[1]],
                vec![x[0] * x[1], 2.0 + x[1].sin()],
            ])
            .unwrap()
        }
        fn g_partials(&self, x: &DVector<f64>) -> Vec<SymMatrix> {
            vec![
                SymMatrix::from_rows(&[vec![2.0 * x[0], x[1]], vec![x[1], 0.0]]).unwrap(),
                SymMatrix::from_rows(&[vec![0.0, x[0]], vec![x[0], x[1].cos()]]).unwrap(),
            ]
        }
        fn h(&self, x: &DVector<f64>) -> DVector<f64> {
            DVector::from_vec(vec![x[0] * x[0] + x[1] - 1.0])
        }
        fn jac_h(&self, x: &DVector<f64>) -> DMatrix<f64> {
            DMatrix::from_column_slice(2, 1, &[2.0 * x[0], 1.0])
        }
    }
}
