//! Scaling matrices `P` for the Monteiro-Tsuchiya family.
//!
//! Given a nonsingular `P`, the scaled pair is `Ĝ = P G(x) Pᵀ`,
//! `Ŷ = P⁻ᵀ Y P⁻¹`, and `Ĝᵢ = P Gᵢ(x) Pᵀ`. Five members are provided.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Iterate, Problem};
use crate::symcore::{default_pd_tol, is_pd, sym_eig, sym_part, EigenPair, SqrtLyapunov, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingKind {
    /// `P = I`
    Identity,
    /// `P = G(x)^{-1/2}`, giving `Ĝ = I`.
    Hkm,
    /// `P = Y^{1/2}`, giving `Ŷ = I`.
    Nt,
    /// `P = (Y G(x) Y)^{1/2}`, giving `Ŷ Ĝ Ŷ = I`.
    HkmDual,
    /// `P = W^{-1/2}` with `W = G^{1/2}(G^{1/2} Y G^{1/2})^{-1/2} G^{1/2}`, giving `Ĝ = Ŷ`.
    Mtw,
}

impl ScalingKind {
    pub const ALL: [ScalingKind; 5] = [
        ScalingKind::Identity,
        ScalingKind::Hkm,
        ScalingKind::Nt,
        ScalingKind::HkmDual,
        ScalingKind::Mtw,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScalingKind::Identity => "identity",
            ScalingKind::Hkm => "hkm",
            ScalingKind::Nt => "nt",
            ScalingKind::HkmDual => "hkm-dual",
            ScalingKind::Mtw => "mtw",
        }
    }

    /// Range of the centrality exponent `ξ` for which this member is known to
    /// keep the `Zᵢ` diagnostics bounded: `(0, 1)` for identity and HKM,
    /// `[1/2, 1)` for the others.
    pub fn admissible_xi(&self) -> (f64, f64) {
        match self {
            ScalingKind::Identity | ScalingKind::Hkm => (0.0, 1.0),
            ScalingKind::Nt | ScalingKind::HkmDual | ScalingKind::Mtw => (0.5, 1.0),
        }
    }

    pub fn xi_is_admissible(&self, xi: f64) -> bool {
        let (lo, hi) = self.admissible_xi();
        match self {
            ScalingKind::Identity | ScalingKind::Hkm => xi > lo && xi < hi,
            _ => xi >= lo && xi < hi,
        }
    }
}

impl fmt::Display for ScalingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScalingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScalingKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown scaling `{s}` (expected identity|hkm|nt|hkm-dual|mtw)")))
    }
}

/// Scaled quantities at one iterate. Immutable once built.
#[derive(Debug, Clone)]
pub struct ScalingData {
    pub kind: ScalingKind,
    pub p: DMatrix<f64>,
    pub p_inv: DMatrix<f64>,
    /// `G(x)` and its partials at the iterate the scaling was built for.
    pub g: SymMatrix,
    pub g_i: Vec<SymMatrix>,
    pub y: SymMatrix,
    pub g_hat: SymMatrix,
    pub y_hat: SymMatrix,
    pub g_hat_eig: EigenPair,
    pub g_hat_sqrt: SymMatrix,
    pub g_hat_inv_sqrt: SymMatrix,
    pub g_i_hat: Vec<SymMatrix>,
    /// `Ûᵢ = L⁻¹_{Ĝ^{1/2}}(Ĝᵢ)`
    pub u_hat: Vec<SymMatrix>,
    lyap: SqrtLyapunov,
}

impl ScalingData {
    pub fn m(&self) -> usize {
        self.g.dim()
    }

    pub fn n(&self) -> usize {
        self.g_i.len()
    }

    pub fn lyapunov(&self) -> &SqrtLyapunov {
        &self.lyap
    }

    /// Smallest denominator in the Lyapunov inverse at `Ĝ^{1/2}`.
    pub fn min_lyap_denominator(&self) -> f64 {
        self.lyap.min_denominator()
    }

    /// `Ĝ^{1/2} Ŷ Ĝ^{1/2}`
    pub fn scaled_center(&self) -> SymMatrix {
        let gs = self.g_hat_sqrt.as_matrix();
        sym_part(&(gs * self.y_hat.as_matrix() * gs))
    }
}

fn pd_pair(a: &SymMatrix, what: &str) -> Result<(SymMatrix, SymMatrix)> {
    let e = sym_eig(a)?;
    if e.min() <= 0.0 {
        return Err(Error::NotInterior(format!("{what} is not positive definite")));
    }
    Ok((e.map(f64::sqrt), e.map(|v| 1.0 / v.sqrt())))
}

/// Returns `(P, P⁻¹)` for the requested member.
pub fn scaling_matrix(kind: ScalingKind, g: &SymMatrix, y: &SymMatrix) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let m = g.dim();
    Ok(match kind {
        ScalingKind::Identity => (DMatrix::identity(m, m), DMatrix::identity(m, m)),
        ScalingKind::Hkm => {
            let (gs, gis) = pd_pair(g, "G(x)")?;
            (gis.into_inner(), gs.into_inner())
        }
        ScalingKind::Nt => {
            let (ys, yis) = pd_pair(y, "Y")?;
            (ys.into_inner(), yis.into_inner())
        }
        ScalingKind::HkmDual => {
            let d = hkm_dual(g, y)?;
            (d.p, d.p_inv)
        }
        ScalingKind::Mtw => {
            let w = mtw_matrix(g, y)?;
            let (ws, wis) = pd_pair(&w, "W")?;
            (wis.into_inner(), ws.into_inner())
        }
    })
}

struct HkmDual {
    p: DMatrix<f64>,
    p_inv: DMatrix<f64>,
    g_hat: SymMatrix,
    y_hat: SymMatrix,
}

/// `P = (YGY)^{1/2}` from the polar decomposition `G^{1/2}Y = OP`, which avoids
/// forming `YGY`. With `C = OᵀG^{1/2}P = Oᵀ(G^{1/2}YG^{1/2})O` one has `Ŷ = C⁻¹` and
/// `Ĝ = C²`; both are taken from one eigendecomposition of `C` so that they commute exactly.
fn hkm_dual(g: &SymMatrix, y: &SymMatrix) -> Result<HkmDual> {
    let (gs, _) = pd_pair(g, "G(x)")?;
    let svd = (gs.as_matrix() * y.as_matrix()).svd(true, true);
    let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let sig = &svd.singular_values;
    if sig.min() <= 0.0 {
        return Err(Error::NotInterior("Y G Y is not positive definite".into()));
    }
    let v = vt.transpose();
    let p = sym_part(&(&v * DMatrix::from_diagonal(sig) * &vt));
    let p_inv = sym_part(&(&v * DMatrix::from_diagonal(&sig.map(|s| 1.0 / s)) * &vt));
    let o = u * vt;
    let center = gs.as_matrix() * y.as_matrix() * gs.as_matrix();
    let c = sym_part(&(o.transpose() * center * &o));
    let e = sym_eig(&c)?;
    if e.min() <= 0.0 {
        return Err(Error::NotInterior("scaled dual is not positive definite".into()));
    }
    Ok(HkmDual {
        g_hat: e.map(|l| l * l),
        y_hat: e.map(|l| 1.0 / l),
        p: p.into_inner(),
        p_inv: p_inv.into_inner(),
    })
}

/// `W = G^{1/2} (G^{1/2} Y G^{1/2})^{-1/2} G^{1/2}`, the matrix with `W Y W = G`.
pub fn mtw_matrix(g: &SymMatrix, y: &SymMatrix) -> Result<SymMatrix> {
    let (gs, _) = pd_pair(g, "G(x)")?;
    let inner = sym_part(&(gs.as_matrix() * y.as_matrix() * gs.as_matrix()));
    let (_, inner_is) = pd_pair(&inner, "G^{1/2} Y G^{1/2}")?;
    Ok(sym_part(&(gs.as_matrix() * inner_is.as_matrix() * gs.as_matrix())))
}

pub fn make_scaling(kind: ScalingKind, prob: &dyn Problem, w: &Iterate) -> Result<ScalingData> {
    let g = prob.g(&w.x);
    let g_i = prob.g_partials(&w.x);
    scaling_from_parts(kind, g, g_i, &w.y)
}

pub fn scaling_from_parts(kind: ScalingKind, g: SymMatrix, g_i: Vec<SymMatrix>, y: &SymMatrix) -> Result<ScalingData> {
    if !is_pd(&g) {
        return Err(Error::NotInterior("G(x) is not positive definite".into()));
    }
    if !is_pd(y) {
        return Err(Error::NotInterior("Y is not positive definite".into()));
    }
    let (p, p_inv, g_hat, y_hat) = if kind == ScalingKind::HkmDual {
        let d = hkm_dual(&g, y)?;
        (d.p, d.p_inv, d.g_hat, d.y_hat)
    } else {
        let (p, p_inv) = scaling_matrix(kind, &g, y)?;
        let g_hat = g.congruence(&p);
        let y_hat = y.congruence(&p_inv.transpose());
        (p, p_inv, g_hat, y_hat)
    };
    let g_hat_eig = sym_eig(&g_hat)?;
    let lyap = SqrtLyapunov::from_eig(g_hat_eig.clone(), default_pd_tol(&g_hat))?;
    let g_hat_sqrt = g_hat_eig.map(f64::sqrt);
    let g_hat_inv_sqrt = g_hat_eig.map(|v| 1.0 / v.sqrt());
    let g_i_hat: Vec<SymMatrix> = g_i.iter().map(|gi| gi.congruence(&p)).collect();
    let u_hat = g_i_hat.iter().map(|gi| lyap.solve(gi)).collect();
    Ok(ScalingData {
        kind,
        p,
        p_inv,
        g,
        g_i,
        y: y.clone(),
        g_hat,
        y_hat,
        g_hat_eig,
        g_hat_sqrt,
        g_hat_inv_sqrt,
        g_i_hat,
        u_hat,
        lyap,
    })
}

/// `‖ĜŶ − ŶĜ‖_F`
pub fn commutation_check(sc: &ScalingData) -> f64 {
    let gy = sc.g_hat.as_matrix() * sc.y_hat.as_matrix();
    (&gy - gy.transpose()).norm()
}

/// Boundedness diagnostics `Zᵢ = μ P⁻¹ Ûᵢ Ĝ^{-1/2} P`.
pub fn z_matrices(sc: &ScalingData, mu: f64) -> Vec<DMatrix<f64>> {
    sc.u_hat
        .iter()
        .map(|u| &sc.p_inv * u.as_matrix() * sc.g_hat_inv_sqrt.as_matrix() * &sc.p * mu)
        .collect()
}

pub fn z_max_norm(sc: &ScalingData, mu: f64) -> f64 {
    z_matrices(sc, mu).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
