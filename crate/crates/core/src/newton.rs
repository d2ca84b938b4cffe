//! Tangential and centering Newton systems.
//!
//! The systems are assembled in the symmetrized form
//!
//! ```text
//! T(Δw) = [ ∇²ₓₓL Δx − JG*ΔY + ∇h Δz
//!           Sym(G ΔY + Σ Δxᵢ Sⁱ)
//!           ∇hᵀ Δx ]
//! Sⁱ = P⁻¹ (Ĝ^{1/2} Ûᵢ Ŷ + Ĝ Ŷ Ûᵢ Ĝ^{-1/2}) P,   Ûᵢ = L⁻¹_{Ĝ^{1/2}}(Ĝᵢ)
//! ```
//!
//! in `(Δx, svec ΔY, Δz)` coordinates. Its solutions coincide with those of
//! the scaled linearization
//! `Ĝ^{1/2} ΔŶ Ĝ^{1/2} + Û Ŷ Ĝ^{1/2} + Ĝ^{1/2} Ŷ Û = rhs`, which
//! [`cross_check_scaled`] and [`solve_scaled_form`] evaluate independently.

use nalgebra::{DMatrix, DVector, Dyn, LU};

use crate::error::{Error, Result};
use crate::model::{adjoint_from_partials, apply_from_partials, grad_lagrangian, hess_lagrangian, Iterate, Problem};
use crate::scaling::ScalingData;
use crate::symcore::{smat, svec, svec_len, sym_part, SymMatrix};

/// Systems whose reciprocal condition number falls below this are rejected.
pub const RCOND_MIN: f64 = 1e-13;

/// `Δw = (Δx, ΔY, Δz)`
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    pub dx: DVector<f64>,
    pub dy: SymMatrix,
    pub dz: DVector<f64>,
}

impl Direction {
    pub fn zeros(n: usize, m: usize, s: usize) -> Self {
        Self {
            dx: DVector::zeros(n),
            dy: SymMatrix::zeros(m),
            dz: DVector::zeros(s),
        }
    }

    pub fn norm(&self) -> f64 {
        (self.dx.norm_squared() + self.dy.frob_norm().powi(2) + self.dz.norm_squared()).sqrt()
    }

    pub fn dist(&self, other: &Direction) -> f64 {
        ((&self.dx - &other.dx).norm_squared()
            + (&self.dy - &other.dy).frob_norm().powi(2)
            + (&self.dz - &other.dz).norm_squared())
        .sqrt()
    }
}

impl Iterate {
    /// `w + s·Δw`
    pub fn advance(&self, d: &Direction, s: f64) -> Iterate {
        Iterate {
            x: &self.x + &d.dx * s,
            y: self.y.axpy(s, &d.dy),
            z: &self.z + &d.dz * s,
        }
    }
}

/// Coordinate layout `(Δx, svec ΔY, Δz)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub n: usize,
    pub m: usize,
    pub s: usize,
}

impl Layout {
    pub fn nsv(&self) -> usize {
        svec_len(self.m)
    }

    pub fn dim(&self) -> usize {
        self.n + self.nsv() + self.s
    }

    pub fn pack(&self, d: &Direction) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        v.rows_mut(0, self.n).copy_from(&d.dx);
        v.rows_mut(self.n, self.nsv()).copy_from(&svec(&d.dy));
        v.rows_mut(self.n + self.nsv(), self.s).copy_from(&d.dz);
        v
    }

    pub fn pack_blocks(&self, a: &DVector<f64>, b: &SymMatrix, c: &DVector<f64>) -> DVector<f64> {
        self.pack(&Direction {
            dx: a.clone(),
            dy: b.clone(),
            dz: c.clone(),
        })
    }

    pub fn unpack(&self, v: &DVector<f64>) -> Direction {
        let dy = smat(v.rows(self.n, self.nsv()).as_slice(), self.m).expect("layout length");
        Direction {
            dx: v.rows(0, self.n).into_owned(),
            dy,
            dz: v.rows(self.n + self.nsv(), self.s).into_owned(),
        }
    }

    /// Symmetric basis matrix for the `k`-th svec coordinate.
    fn basis(&self, k: usize) -> SymMatrix {
        let mut e = vec![0.0; self.nsv()];
        e[k] = 1.0;
        smat(&e, self.m).expect("layout length")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepMode {
    Tangential,
    Centering,
}

/// `Sⁱ` for each `i`, in a rearranged form that is stable for ill-conditioned `P`.
pub fn s_matrices(sc: &ScalingData) -> Vec<DMatrix<f64>> {
    // Sⁱ = GᵢY + [R, Kᵢ] with R = GY − μ̄I and Kᵢ = P⁻¹ÛᵢĜ^{-1/2}P. Equal to the
    // definition, but P and P⁻¹ only enter through a term damped by the small R.
    let gy = sc.g.as_matrix() * sc.y.as_matrix();
    let m = sc.m();
    let mu_bar = gy.trace() / m as f64;
    let r = &gy - DMatrix::identity(m, m) * mu_bar;
    let gis = sc.g_hat_inv_sqrt.as_matrix();
    sc.u_hat
        .iter()
        .zip(&sc.g_i)
        .map(|(u, gi)| {
            let k = &sc.p_inv * u.as_matrix() * gis * &sc.p;
            gi.as_matrix() * sc.y.as_matrix() + &r * &k - &k * &r
        })
        .collect()
}

/// `Sⁱ = P⁻¹(Ĝ^{1/2}ÛᵢŶ + ĜŶÛᵢĜ^{-1/2})P`, evaluated as written.
pub fn s_matrices_definition(sc: &ScalingData) -> Vec<DMatrix<f64>> {
    let gs = sc.g_hat_sqrt.as_matrix();
    let gis = sc.g_hat_inv_sqrt.as_matrix();
    let yh = sc.y_hat.as_matrix();
    let gy = sc.g_hat.as_matrix() * yh;
    sc.u_hat
        .iter()
        .map(|u| {
            let u = u.as_matrix();
            let inner = gs * u * yh + &gy * u * gis;
            &sc.p_inv * inner * &sc.p
        })
        .collect()
}

/// Assembled linear system at one iterate, together with the pieces needed
/// to form tangential and centering right-hand sides.
#[derive(Debug, Clone)]
pub struct NewtonSystem {
    pub layout: Layout,
    pub matrix: DMatrix<f64>,
    /// Reciprocal 2-norm condition number of `matrix`.
    pub rcond: f64,
    pub grad_l: DVector<f64>,
    /// `Sym(G(x) Y)`
    pub sym_gy: SymMatrix,
    pub h: DVector<f64>,
    lu: LU<f64, Dyn, Dyn>,
}

impl NewtonSystem {
    /// `(0; −μ·svec I; 0)`
    pub fn rhs_tangential(&self, mu: f64) -> DVector<f64> {
        let l = self.layout;
        l.pack_blocks(
            &DVector::zeros(l.n),
            &SymMatrix::identity(l.m).scale(-mu),
            &DVector::zeros(l.s),
        )
    }

    /// `(−∇ₓL; μ·svec I − svec Sym(GY); −h)`
    pub fn rhs_centering(&self, mu: f64) -> DVector<f64> {
        let l = self.layout;
        l.pack_blocks(&-&self.grad_l, &self.sym_gy.scale(-1.0).shift(-mu), &-&self.h)
    }

    pub fn rhs(&self, mode: StepMode, mu: f64) -> DVector<f64> {
        match mode {
            StepMode::Tangential => self.rhs_tangential(mu),
            StepMode::Centering => self.rhs_centering(mu),
        }
    }

    /// LU solve with one step of iterative refinement.
    pub fn solve(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        if !(self.rcond >= RCOND_MIN) {
            return Err(Error::SingularSystem { rcond: self.rcond });
        }
        let mut v = self.lu.solve(rhs).ok_or(Error::SingularSystem { rcond: self.rcond })?;
        let r = rhs - &self.matrix * &v;
        if let Some(corr) = self.lu.solve(&r) {
            v += corr;
        }
        Ok(v)
    }

    pub fn residual(&self, v: &DVector<f64>, rhs: &DVector<f64>) -> f64 {
        (&self.matrix * v - rhs).norm()
    }
}

fn finish(
    layout: Layout,
    matrix: DMatrix<f64>,
    grad_l: DVector<f64>,
    sym_gy: SymMatrix,
    h: DVector<f64>,
) -> NewtonSystem {
    let sv = matrix.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let rcond = if smax > 0.0 { smin / smax } else { 0.0 };
    let lu = matrix.clone().lu();
    NewtonSystem {
        layout,
        matrix,
        rcond,
        grad_l,
        sym_gy,
        h,
        lu,
    }
}

/// Fills rows 1 and 3, which are shared by every form of the system.
fn fill_outer_blocks(
    matrix: &mut DMatrix<f64>,
    layout: Layout,
    hess: &DMatrix<f64>,
    g_i: &[SymMatrix],
    jac_h: &DMatrix<f64>,
) {
    let (n, nsv) = (layout.n, layout.nsv());
    let off_z = n + nsv;
    matrix.view_mut((0, 0), (n, n)).copy_from(hess);
    for (i, gi) in g_i.iter().enumerate() {
        let row = svec(gi);
        for k in 0..nsv {
            matrix[(i, n + k)] = -row[k];
        }
    }
    matrix.view_mut((0, off_z), (n, layout.s)).copy_from(jac_h);
    matrix.view_mut((off_z, 0), (layout.s, n)).copy_from(&jac_h.transpose());
}

/// Matrix of the symmetrized operator with the `Δx` coupling given by `coupling[i]`.
fn assemble_with(
    p: &dyn Problem,
    w: &Iterate,
    g: &SymMatrix,
    g_i: &[SymMatrix],
    coupling: &[DMatrix<f64>],
) -> NewtonSystem {
    let layout = Layout {
        n: p.n(),
        m: p.m(),
        s: p.s(),
    };
    let (n, nsv) = (layout.n, layout.nsv());
    let mut matrix = DMatrix::zeros(layout.dim(), layout.dim());
    let jac_h = p.jac_h(&w.x);
    fill_outer_blocks(&mut matrix, layout, &hess_lagrangian(p, w), g_i, &jac_h);
    for (i, si) in coupling.iter().enumerate() {
        matrix.view_mut((n, i), (nsv, 1)).copy_from(&svec(&sym_part(si)));
    }
    for k in 0..nsv {
        let e = layout.basis(k);
        let col = svec(&sym_part(&(g.as_matrix() * e.as_matrix())));
        matrix.view_mut((n, n + k), (nsv, 1)).copy_from(&col);
    }
    let sym_gy = sym_part(&(g.as_matrix() * w.y.as_matrix()));
    finish(layout, matrix, grad_lagrangian(p, w), sym_gy, p.h(&w.x))
}

/// Assembles the scaled Newton operator at `w` for the scaling `sc`.
pub fn assemble(p: &dyn Problem, w: &Iterate, sc: &ScalingData) -> Result<NewtonSystem> {
    w.check_dims(p)?;
    Ok(assemble_with(p, w, &sc.g, &sc.g_i, &s_matrices(sc)))
}

/// Jacobian of `w ↦ (∇ₓL; Sym(G(x)Y) − μI; h)` at `w`: the coupling is `Gᵢ(x) Y`.
/// At a KKT point this is the limit of the scaled operators along the central path.
pub fn assemble_limit(p: &dyn Problem, w: &Iterate) -> Result<NewtonSystem> {
    w.check_dims(p)?;
    let g = p.g(&w.x);
    let g_i = p.g_partials(&w.x);
    let coupling: Vec<DMatrix<f64>> = g_i.iter().map(|gi| gi.as_matrix() * w.y.as_matrix()).collect();
    Ok(assemble_with(p, w, &g, &g_i, &coupling))
}

/// Evaluates `T(Δw)` directly, without the assembled matrix.
pub fn apply_t(
    p: &dyn Problem,
    w: &Iterate,
    sc: &ScalingData,
    d: &Direction,
) -> (DVector<f64>, SymMatrix, DVector<f64>) {
    let jac_h = p.jac_h(&w.x);
    let top = hess_lagrangian(p, w) * &d.dx - adjoint_from_partials(&sc.g_i, &d.dy) + &jac_h * &d.dz;
    let mut mid = sc.g.as_matrix() * d.dy.as_matrix();
    for (si, &xi) in s_matrices(sc).iter().zip(d.dx.iter()) {
        mid += si * xi;
    }
    (top, sym_part(&mid), jac_h.transpose() * &d.dx)
}

/// Frobenius residual of the scaled second-line equation
/// `Ĝ^{1/2} ΔŶ Ĝ^{1/2} + Û Ŷ Ĝ^{1/2} + Ĝ^{1/2} Ŷ Û − rhs`, where `ΔŶ = P⁻ᵀ ΔY P⁻¹`,
/// `Û = Σ Δxᵢ Ûᵢ` and `rhs` is `−μI` (tangential) or `μI − Ĝ^{1/2} Ŷ Ĝ^{1/2}` (centering).
pub fn cross_check_scaled(sc: &ScalingData, mu: f64, d: &Direction, mode: StepMode) -> f64 {
    let lhs = scaled_second_line(sc, d);
    let rhs = scaled_rhs(sc, mu, mode);
    (lhs.as_matrix() - rhs.as_matrix()).norm()
}

fn scaled_second_line(sc: &ScalingData, d: &Direction) -> SymMatrix {
    let m = sc.m();
    let gs = sc.g_hat_sqrt.as_matrix();
    let dy_hat = sc.p_inv.transpose() * d.dy.as_matrix() * &sc.p_inv;
    let u = apply_from_partials(&sc.u_hat, &d.dx, m);
    let cross = u.as_matrix() * sc.y_hat.as_matrix() * gs;
    sym_part(&(gs * dy_hat * gs + &cross + cross.transpose()))
}

fn scaled_rhs(sc: &ScalingData, mu: f64, mode: StepMode) -> SymMatrix {
    match mode {
        StepMode::Tangential => SymMatrix::identity(sc.m()).scale(-mu),
        StepMode::Centering => sc.scaled_center().scale(-1.0).shift(-mu),
    }
}

/// Solves the scaled linearization directly, with its own svec assembly of
/// the second line. Used to confirm that it shares solutions with the
/// symmetrized operator.
pub fn solve_scaled_form(p: &dyn Problem, w: &Iterate, mu: f64, sc: &ScalingData, mode: StepMode) -> Result<Direction> {
    w.check_dims(p)?;
    let layout = Layout {
        n: p.n(),
        m: p.m(),
        s: p.s(),
    };
    let (n, nsv) = (layout.n, layout.nsv());
    let mut matrix = DMatrix::zeros(layout.dim(), layout.dim());
    let jac_h = p.jac_h(&w.x);
    fill_outer_blocks(&mut matrix, layout, &hess_lagrangian(p, w), &sc.g_i, &jac_h);
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        let col = svec(&scaled_second_line(
            sc,
            &Direction {
                dx: e,
                dy: SymMatrix::zeros(layout.m),
                dz: DVector::zeros(layout.s),
            },
        ));
        matrix.view_mut((n, i), (nsv, 1)).copy_from(&col);
    }
    for k in 0..nsv {
        let d = Direction {
            dx: DVector::zeros(n),
            dy: layout.basis(k),
            dz: DVector::zeros(layout.s),
        };
        let col = svec(&scaled_second_line(sc, &d));
        matrix.view_mut((n, n + k), (nsv, 1)).copy_from(&col);
    }
    let (top, bottom) = match mode {
        StepMode::Tangential => (DVector::zeros(n), DVector::zeros(layout.s)),
        StepMode::Centering => (-grad_lagrangian(p, w), -p.h(&w.x)),
    };
    let rhs = layout.pack_blocks(&top, &scaled_rhs(sc, mu, mode), &bottom);
    let v = matrix.lu().solve(&rhs).ok_or(Error::SingularSystem { rcond: 0.0 })?;
    Ok(layout.unpack(&v))
}

/// A solved Newton step with its accuracy diagnostics.
#[derive(Debug, Clone)]
pub struct NewtonStep {
    pub dir: Direction,
    /// `‖T·Δw − rhs‖` in packed coordinates.
    pub residual: f64,
    /// Residual of the scaled second-line equation at the same `Δw`.
    pub scaled_residual: f64,
    pub rcond: f64,
}

pub fn solve_step(p: &dyn Problem, w: &Iterate, mu: f64, sc: &ScalingData, mode: StepMode) -> Result<NewtonStep> {
    let sys = assemble(p, w, sc)?;
    let rhs = sys.rhs(mode, mu);
    let v = sys.solve(&rhs)?;
    let residual = sys.residual(&v, &rhs);
    let dir = sys.layout.unpack(&v);
    let scaled_residual = cross_check_scaled(sc, mu, &dir, mode);
    Ok(NewtonStep {
        dir,
        residual,
        scaled_residual,
        rcond: sys.rcond,
    })
}

/// Tangential direction: `T(Δw) = (0; −μI; 0)`.
pub fn solve_tangential(p: &dyn Problem, w: &Iterate, mu: f64, sc: &ScalingData) -> Result<NewtonStep> {
    solve_step(p, w, mu, sc, StepMode::Tangential)
}

/// Centering direction: `T(Δw) = (−∇ₓL; μI − Sym(GY); −h)`.
pub fn solve_centering(p: &dyn Problem, w: &Iterate, mu: f64, sc: &ScalingData) -> Result<NewtonStep> {
    solve_step(p, w, mu, sc, StepMode::Centering)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{builtin, AffineSdp};
    use crate::model::{residual_phi1, testutil::NonlinearToy};
    use crate::regularity::central_path_point;
    use crate::scaling::{make_scaling, ScalingKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_direction(rng: &mut impl Rng, l: Layout) -> Direction {
        Direction {
            dx: DVector::from_fn(l.n, |_, _| rng.random_range(-1.0..1.0)),
            dy: SymMatrix::from_symmetrized(DMatrix::from_fn(l.m, l.m, |_, _| rng.random_range(-1.0..1.0))),
            dz: DVector::from_fn(l.s, |_, _| rng.random_range(-1.0..1.0)),
        }
    }

    fn toy_point() -> Iterate {
        Iterate::new(
            DVector::from_vec(vec![0.3, -0.4]),
            SymMatrix::from_rows(&[vec![0.8, 0.2], vec![0.2, 0.6]]).unwrap(),
            DVector::from_vec(vec![0.1]),
        )
    }

    #[test]
    fn matrix_matches_direct_operator() {
        let p = NonlinearToy;
        let w = toy_point();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for kind in ScalingKind::ALL {
            let sc = make_scaling(kind, &p, &w).unwrap();
            let sys = assemble(&p, &w, &sc).unwrap();
            for _ in 0..20 {
                let d = random_direction(&mut rng, sys.layout);
                let (a, b, c) = apply_t(&p, &w, &sc, &d);
                let direct = sys.layout.pack_blocks(&a, &b, &c);
                let via = &sys.matrix * sys.layout.pack(&d);
                assert!((&via - &direct).norm() <= 1e-11 * (1.0 + direct.norm()), "{kind}");
            }
            let zero = Direction::zeros(2, 2, 1);
            assert_eq!((&sys.matrix * sys.layout.pack(&zero)).norm(), 0.0);
        }
    }

    #[test]
    fn pack_unpack_roundtrip() {
        let l = Layout { n: 3, m: 4, s: 2 };
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let d = random_direction(&mut rng, l);
        let back = l.unpack(&l.pack(&d));
        assert!(back.dist(&d) <= 1e-15 * d.norm());
    }

    #[test]
    fn s_matrices_identity_example() {
        // G = I, Y = μI, identity scaling: Ûᵢ = Gᵢ/2 so Sⁱ = μ·Gᵢ.
        let mu = 0.25;
        let a1 = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, -1.0]]).unwrap();
        let p = AffineSdp::linear(
            DVector::from_vec(vec![0.0]),
            SymMatrix::identity(2),
            vec![a1.clone()],
            DMatrix::zeros(0, 1),
            DVector::zeros(0),
        )
        .unwrap();
        let w = Iterate::new(DVector::zeros(1), SymMatrix::identity(2).scale(mu), DVector::zeros(0));
        let sc = make_scaling(ScalingKind::Identity, &p, &w).unwrap();
        let s = s_matrices(&sc);
        assert!((&s[0] - a1.as_matrix() * mu).norm() < 1e-15);
    }

    #[test]
    fn s_matrices_reduce_to_gi_y_on_central_path() {
        let spec = builtin("lsdp-small").unwrap();
        let p = spec.problem();
        let v = central_path_point(p, 1e-2, &spec.path_guess(1e-2).unwrap(), None)
            .unwrap()
            .point;
        let gi = p.g_partials(&v.x);
        for kind in [
            ScalingKind::Hkm,
            ScalingKind::Nt,
            ScalingKind::Mtw,
            ScalingKind::HkmDual,
        ] {
            let sc = make_scaling(kind, p, &v).unwrap();
            for (s, g) in s_matrices(&sc).iter().zip(&gi) {
                assert!((s - g.as_matrix() * v.y.as_matrix()).norm() <= 1e-8, "{kind}");
            }
        }
    }

    #[test]
    fn s_matrices_match_definition() {
        let p = NonlinearToy;
        let w = toy_point();
        for kind in ScalingKind::ALL {
            let sc = make_scaling(kind, &p, &w).unwrap();
            for (a, b) in s_matrices(&sc).iter().zip(s_matrices_definition(&sc)) {
                assert!((a - &b).norm() <= 1e-12 * (1.0 + b.norm()), "{kind}");
            }
        }
    }

    #[test]
    fn s_matrices_obey_norm_bound() {
        let p = NonlinearToy;
        let w = toy_point();
        for kind in ScalingKind::ALL {
            let sc = make_scaling(kind, &p, &w).unwrap();
            let gs = sc.g_hat_sqrt.as_matrix();
            let gis = sc.g_hat_inv_sqrt.as_matrix();
            let yh = sc.y_hat.as_matrix();
            for (s, u) in s_matrices_definition(&sc).iter().zip(&sc.u_hat) {
                let u = u.as_matrix();
                let bound = sc.p.norm()
                    * sc.p_inv.norm()
                    * ((gs * u * yh).norm() + (sc.g_hat.as_matrix() * yh * u * gis).norm());
                assert!(s.iter().all(|v| v.is_finite()));
                assert!(s.norm() <= bound * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn zero_barrier_tangential_is_zero() {
        let p = NonlinearToy;
        let w = toy_point();
        let sc = make_scaling(ScalingKind::Hkm, &p, &w).unwrap();
        let st = solve_tangential(&p, &w, 0.0, &sc).unwrap();
        assert_eq!(st.dir.norm(), 0.0);
    }

    #[test]
    fn solutions_satisfy_both_forms() {
        let p = NonlinearToy;
        let w = toy_point();
        for kind in ScalingKind::ALL {
            let sc = make_scaling(kind, &p, &w).unwrap();
            for mode in [StepMode::Tangential, StepMode::Centering] {
                let mu = 0.05;
                let step = solve_step(&p, &w, mu, &sc, mode).unwrap();
                assert!(step.residual <= 1e-10 * (1.0 + mu * 2f64.sqrt()));
                assert!(
                    step.scaled_residual <= 1e-8 * (1.0 + mu * 2f64.sqrt()),
                    "{kind} {mode:?}"
                );
                let other = solve_scaled_form(&p, &w, mu, &sc, mode).unwrap();
                assert!(other.dist(&step.dir) <= 1e-7 * step.dir.norm());
            }
        }
    }

    #[test]
    fn linearity_in_rhs() {
        let p = NonlinearToy;
        let w = toy_point();
        let sc = make_scaling(ScalingKind::Nt, &p, &w).unwrap();
        let sys = assemble(&p, &w, &sc).unwrap();
        let rhs = sys.rhs_centering(0.1);
        let a = sys.solve(&rhs).unwrap();
        let b = sys.solve(&(&rhs * 3.5)).unwrap();
        assert!((&a * 3.5 - &b).norm() <= 1e-11 * b.norm());
    }

    #[test]
    fn one_by_one_closed_form() {
        // min x s.t. G(x) = x ⪰ 0, no equalities. With identity scaling at (x, y):
        // Ĝ = x, Ŷ = y, Û = Δx/(2√x), and the scaled line reads
        // x·Δy + Δx·y = rhs, coupled with −Δy = −(1 − y) for centering.
        let p = AffineSdp::linear(
            DVector::from_vec(vec![1.0]),
            SymMatrix::zeros(1),
            vec![SymMatrix::identity(1)],
            DMatrix::zeros(0, 1),
            DVector::zeros(0),
        )
        .unwrap();
        let (x, y, mu) = (0.5, 0.8, 0.1);
        let w = Iterate::new(
            DVector::from_vec(vec![x]),
            SymMatrix::from_diagonal(&[y]),
            DVector::zeros(0),
        );
        let sc = make_scaling(ScalingKind::Identity, &p, &w).unwrap();
        let step = solve_centering(&p, &w, mu, &sc).unwrap();
        // Row 1: −Δy = −(1 − y)  →  Δy = 1 − y.
        let dy = 1.0 - y;
        // Row 2: x·Δy + y·Δx = μ − x·y.
        let dx = (mu - x * y - x * dy) / y;
        assert!((step.dir.dx[0] - dx).abs() < 1e-14);
        assert!((step.dir.dy[(0, 0)] - dy).abs() < 1e-14);
        assert!(cross_check_scaled(&sc, mu, &step.dir, StepMode::Centering) < 1e-14);
        // The zero direction leaves the full centering right side as residual.
        let zero = Direction::zeros(1, 1, 0);
        let r = cross_check_scaled(&sc, mu, &zero, StepMode::Centering);
        assert!((r - (mu - x * y).abs()).abs() < 1e-15);
    }

    #[test]
    fn centering_contracts_perturbed_path_point() {
        let spec = builtin("lsdp-small").unwrap();
        let p = spec.problem();
        let mu = 1e-3;
        let v = central_path_point(p, mu, &spec.path_guess(mu).unwrap(), None)
            .unwrap()
            .point;
        let mut w = v.clone();
        w.y = w.y.scale(1.0 + 1e-4);
        w.z[0] += 1e-4;
        let before = residual_phi1(p, &w, mu).norm;
        let sc = make_scaling(ScalingKind::Hkm, p, &w).unwrap();
        let step = solve_centering(p, &w, mu, &sc).unwrap();
        let after = residual_phi1(p, &w.advance(&step.dir, 1.0), mu).norm;
        assert!(after * 10.0 <= before, "{before:e} -> {after:e}");
    }

    #[test]
    fn centering_at_bkkt_point_is_zero() {
        let spec = builtin("lsdp-small").unwrap();
        let p = spec.problem();
        let mu = 1e-2;
        let v = central_path_point(p, mu, &spec.path_guess(mu).unwrap(), None)
            .unwrap()
            .point;
        let sc = make_scaling(ScalingKind::Hkm, p, &v).unwrap();
        let step = solve_centering(p, &v, mu, &sc).unwrap();
        assert!(step.dir.norm() <= 1e-10);
    }

    #[test]
    fn limit_operator_is_nonsingular_at_solution() {
        for name in ["lsdp-small", "quad-nsdp"] {
            let spec = builtin(name).unwrap();
            let sys = assemble_limit(spec.problem(), spec.known_solution.as_ref().unwrap()).unwrap();
            assert!(sys.rcond > 1e-6, "{name}: {}", sys.rcond);
        }
    }

    #[test]
    fn singular_system_is_reported() {
        // Duplicate equality constraints make the operator rank deficient.
        let p = AffineSdp::linear(
            DVector::from_vec(vec![1.0, 1.0]),
            SymMatrix::identity(1),
            vec![SymMatrix::identity(1), SymMatrix::zeros(1)],
            DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]),
            DVector::zeros(2),
        )
        .unwrap();
        let w = Iterate::new(DVector::zeros(2), SymMatrix::identity(1), DVector::zeros(2));
        let sc = make_scaling(ScalingKind::Hkm, &p, &w).unwrap();
        assert!(matches!(
            solve_tangential(&p, &w, 0.1, &sc),
            Err(Error::SingularSystem { .. })
        ));
    }
}
