//! Regularity checks at a candidate solution and the central-path generator.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{hess_lagrangian, residual_phi2, Iterate, Problem};
use crate::newton::assemble_limit;
use crate::symcore::{sym_eig, SymMatrix};

/// Eigenvalues at or below this fraction of `λ_max(G)` count as zero.
pub const RANK_CUTOFF: f64 = 1e-8;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const MAX_PATH_STEPS: usize = 50;

/// Numerical rank of `G(x*)` with an orthonormal basis of its null space.
#[derive(Debug, Clone)]
pub struct RankInfo {
    pub rank: usize,
    pub cutoff: f64,
    /// `m × (m − rank)`
    pub null_basis: DMatrix<f64>,
    /// Moore-Penrose inverse by eigen-truncation at the cutoff.
    pub pinv: DMatrix<f64>,
}

pub fn rank_analysis(g: &SymMatrix) -> Result<RankInfo> {
    let e = sym_eig(g)?;
    let m = g.dim();
    let lmax = e.d.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let cutoff = RANK_CUTOFF * lmax;
    for &v in e.d.iter() {
        let kept = v > cutoff;
        let ambiguous = if kept {
            v < 10.0 * cutoff
        } else {
            v.abs() > cutoff / 10.0
        };
        if ambiguous && lmax > 0.0 {
            return Err(Error::RankAmbiguous { eigenvalue: v, cutoff });
        }
    }
    let rank = e.d.iter().filter(|&&v| v > cutoff).count();
    // Eigenvalues are sorted descending, so the null space is the trailing block.
    let null_basis = e.q.columns(rank, m - rank).into_owned();
    let mut pinv = DMatrix::zeros(m, m);
    for k in 0..rank {
        let q = e.q.column(k);
        pinv += (q * q.transpose()) / e.d[k];
    }
    Ok(RankInfo {
        rank,
        cutoff,
        null_basis,
        pinv,
    })
}

/// Rows `v_abᵀ = (e_aᵀ Gₖ e_b)ₖ` for `a ≤ b` over the null basis.
fn null_space_rows(g_i: &[SymMatrix], e: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let k = e.ncols();
    let mut out = Vec::with_capacity(k * (k + 1) / 2);
    for a in 0..k {
        for b in a..k {
            let (ea, eb) = (e.column(a), e.column(b));
            out.push(DVector::from_iterator(
                g_i.len(),
                g_i.iter().map(|gi| (ea.transpose() * gi.as_matrix() * eb)[(0, 0)]),
            ));
        }
    }
    out
}

/// Linear independence of the `v_ij` and `∇hᵢ`. Returns the verdict and
/// `σ_min/σ_max` of the stacked matrix (zero when there are more vectors
/// than variables, `+∞` when there are none).
pub fn check_nondegeneracy(p: &dyn Problem, w: &Iterate, tol: f64) -> Result<(bool, f64)> {
    let info = rank_analysis(&p.g(&w.x))?;
    let mut cols = null_space_rows(&p.g_partials(&w.x), &info.null_basis);
    let jh = p.jac_h(&w.x);
    cols.extend(jh.column_iter().map(|c| c.into_owned()));
    let n = p.n();
    if cols.is_empty() {
        return Ok((true, f64::INFINITY));
    }
    if cols.len() > n {
        return Ok((false, 0.0));
    }
    let mat = DMatrix::from_columns(&cols);
    let sv = mat.singular_values();
    let margin = if sv.max() > 0.0 { sv.min() / sv.max() } else { 0.0 };
    Ok((margin > tol, margin))
}

/// Smallest eigenvalue of `G(x*) + Y*` and whether it is positive.
pub fn check_strict_complementarity(p: &dyn Problem, w: &Iterate) -> Result<(bool, f64)> {
    let s = p.g(&w.x).axpy(1.0, &w.y);
    let e = sym_eig(&s)?;
    let threshold = 1e-10 * e.max().abs().max(1.0);
    Ok((e.min() > threshold, e.min()))
}

/// `H_ij = 2 Y•(Gᵢ G† Gⱼ)`.
pub fn sigma_term(g_i: &[SymMatrix], pinv: &DMatrix<f64>, y: &SymMatrix) -> DMatrix<f64> {
    let n = g_i.len();
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        let left = y.as_matrix() * g_i[i].as_matrix() * pinv;
        for j in i..n {
            let v = 2.0 * (&left * g_i[j].as_matrix()).trace();
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    h
}

/// Orthonormal basis of `{d : Cd = 0}` for the rows of `c`, with singular
/// values up to `1e-10·σ_max` treated as zero.
fn null_space(rows: &[DVector<f64>], n: usize) -> Result<DMatrix<f64>> {
    if rows.is_empty() {
        return Ok(DMatrix::identity(n, n));
    }
    // Pad to at least n rows so the SVD returns a full right basis.
    let k = rows.len().max(n);
    let mut c = DMatrix::zeros(k, n);
    for (i, r) in rows.iter().enumerate() {
        c.row_mut(i).copy_from(&r.transpose());
    }
    let svd = c.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numeric("SVD did not return right singular vectors".into()))?;
    let smax = svd.singular_values.max();
    let cols: Vec<DVector<f64>> = (0..n)
        .filter(|&i| svd.singular_values[i] <= 1e-10 * smax)
        .map(|i| v_t.row(i).transpose())
        .collect();
    Ok(if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    })
}

/// Second-order sufficiency on the critical subspace
/// `{d : ∇hᵀd = 0, Eᵀ JG(d) E = 0}`. Returns the verdict and the smallest
/// eigenvalue of the projected `∇²ₓₓL + H` (`+∞` when the subspace is trivial).
pub fn check_sosc(p: &dyn Problem, w: &Iterate, tol: f64) -> Result<(bool, f64)> {
    let info = rank_analysis(&p.g(&w.x))?;
    let g_i = p.g_partials(&w.x);
    let mut rows = null_space_rows(&g_i, &info.null_basis);
    let jh = p.jac_h(&w.x);
    rows.extend(jh.column_iter().map(|c| c.into_owned()));
    let z = null_space(&rows, p.n())?;
    if z.ncols() == 0 {
        return Ok((true, f64::INFINITY));
    }
    let full = hess_lagrangian(p, w) + sigma_term(&g_i, &info.pinv, &w.y);
    let proj = SymMatrix::from_symmetrized(z.transpose() * &full * &z);
    let lmin = sym_eig(&proj)?.min();
    let scale = full.norm().max(1.0);
    Ok((lmin > tol * scale, lmin))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub rank_g: usize,
    pub m: usize,
    pub nondegenerate: bool,
    #[serde(with = "margin")]
    pub nondegeneracy_margin: f64,
    pub strict_complementarity: bool,
    #[serde(with = "margin")]
    pub strict_complementarity_margin: f64,
    pub sosc: bool,
    #[serde(with = "margin")]
    pub sosc_margin: f64,
    pub details: String,
}

/// Non-finite margins (an empty test matrix or critical subspace) are
/// written as `null` and read back as `+∞`.
mod margin {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

impl RegularityReport {
    pub fn all_hold(&self) -> bool {
        self.nondegenerate && self.strict_complementarity && self.sosc
    }
}

pub fn regularity_report(p: &dyn Problem, w: &Iterate) -> Result<RegularityReport> {
    let info = rank_analysis(&p.g(&w.x))?;
    let (nondegenerate, nd) = check_nondegeneracy(p, w, DEFAULT_TOL)?;
    let (strict, sc) = check_strict_complementarity(p, w)?;
    let (mut sosc, so) = check_sosc(p, w, DEFAULT_TOL)?;
    let mut details = format!(
        "rank G = {} of {}, rank cutoff {:.3e}; nondegeneracy sigma ratio {:.3e}; lambda_min(G+Y) {:.3e}; projected Hessian lambda_min {:.3e}",
        info.rank,
        p.m(),
        info.cutoff,
        nd,
        sc,
        so
    );
    if !strict {
        sosc = false;
        details.push_str(
            "; critical cone is not a subspace without strict complementarity, second-order check not performed",
        );
    }
    Ok(RegularityReport {
        rank_g: info.rank,
        m: p.m(),
        nondegenerate,
        nondegeneracy_margin: nd,
        strict_complementarity: strict,
        strict_complementarity_margin: sc,
        sosc,
        sosc_margin: so,
        details,
    })
}

/// Result of a central-path solve.
#[derive(Debug, Clone)]
pub struct PathPoint {
    pub point: Iterate,
    pub steps: usize,
    /// Final `‖Φ²_μ‖`.
    pub residual: f64,
}

pub fn default_path_tol(mu: f64) -> f64 {
    1e-12 * (1.0 + mu)
}

/// Damped Newton on `Φ²_μ(v) = 0` starting at `w_init`.
pub fn central_path_point(p: &dyn Problem, mu: f64, w_init: &Iterate, tol: Option<f64>) -> Result<PathPoint> {
    w_init.ensure_interior(p)?;
    let tol = tol.unwrap_or_else(|| default_path_tol(mu));
    let mut w = w_init.clone();
    let mut r = residual_phi2(p, &w, mu).norm;
    for steps in 0..=MAX_PATH_STEPS {
        if r <= tol {
            return Ok(PathPoint {
                point: w,
                steps,
                residual: r,
            });
        }
        if steps == MAX_PATH_STEPS {
            break;
        }
        let sys = assemble_limit(p, &w)?;
        let v = sys.solve(&sys.rhs_centering(mu))?;
        let d = sys.layout.unpack(&v);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = w.advance(&d, t);
            if trial.is_interior(p) {
                let rt = residual_phi2(p, &trial, mu).norm;
                if rt < r {
                    accepted = Some((trial, rt));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, rt)) => {
                w = trial;
                r = rt;
            }
            None => break,
        }
    }
    Err(Error::NoConvergence {
        steps: MAX_PATH_STEPS,
        residual: r,
    })
}

/// First-order prediction `w* + μ v'` of the central path, where `v'` solves
/// the limit system with right-hand side `(0; I; 0)`.
pub fn tangent_predictor(p: &dyn Problem, w_star: &Iterate, mu: f64) -> Result<Iterate> {
    let sys = assemble_limit(p, w_star)?;
    let l = sys.layout;
    let rhs = l.pack_blocks(&DVector::zeros(l.n), &SymMatrix::identity(l.m), &DVector::zeros(l.s));
    let v = sys.solve(&rhs)?;
    Ok(w_star.advance(&l.unpack(&v), mu))
}

/// Follows the central path from an arbitrary interior point down to `mu`,
/// first centering at a large barrier value and then shrinking it
/// geometrically, with smaller reductions when a solve fails.
pub fn continuation_path_point(p: &dyn Problem, mu: f64, seed: &Iterate) -> Result<Iterate> {
    seed.ensure_interior(p)?;
    let mut cur_mu = mu.max(1.0);
    let mut w = central_path_point(p, cur_mu, seed, None)?.point;
    let mut factor = 0.1;
    while cur_mu > mu {
        let next = (cur_mu * factor).max(mu);
        match central_path_point(p, next, &w, None) {
            Ok(pt) => {
                w = pt.point;
                cur_mu = next;
                factor = (factor * factor).clamp(0.01, 0.1);
            }
            Err(e) => {
                factor = factor.sqrt();
                if factor > 0.99 {
                    return Err(e);
                }
            }
        }
    }
    Ok(w)
}
