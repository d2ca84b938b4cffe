//! Built-in problems and the JSON instance format.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{residual_xi_identity, Iterate, Problem};
use crate::regularity::{central_path_point, continuation_path_point, tangent_predictor};
use crate::symcore::{min_eig, smat, svec, svec_len, SymMatrix};

/// Largest `‖Ξ⁰_I‖` accepted for a declared known solution.
pub const KNOWN_SOLUTION_TOL: f64 = 1e-6;

/// Quadratic objective with affine constraints:
/// `f = ½xᵀQx + cᵀx`, `G(x) = A₀ + Σ xᵢAᵢ`, `h(x) = Bx − b`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSdp {
    q: DMatrix<f64>,
    c: DVector<f64>,
    a0: SymMatrix,
    a: Vec<SymMatrix>,
    b_mat: DMatrix<f64>,
    b: DVector<f64>,
}

impl AffineSdp {
    pub fn new(
        q: DMatrix<f64>,
        c: DVector<f64>,
        a0: SymMatrix,
        a: Vec<SymMatrix>,
        b_mat: DMatrix<f64>,
        b: DVector<f64>,
    ) -> Result<Self> {
        let n = c.len();
        let m = a0.dim();
        if q.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "q is {:?}, expected ({n}, {n})",
                q.shape()
            )));
        }
        if (&q - q.transpose()).amax() > 1e-12 * (1.0 + q.amax()) {
            return Err(Error::DimensionMismatch("q must be symmetric".into()));
        }
        if a.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} constraint matrices for n = {n}",
                a.len()
            )));
        }
        if let Some(bad) = a.iter().position(|ai| ai.dim() != m) {
            return Err(Error::DimensionMismatch(format!("a[{bad}] is not {m}x{m}")));
        }
        if b_mat.ncols() != n || b_mat.nrows() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "equality block is {:?} with {} right-hand sides, n = {n}",
                b_mat.shape(),
                b.len()
            )));
        }
        Ok(Self { q, c, a0, a, b_mat, b })
    }

    /// Linear objective (`Q = 0`).
    pub fn linear(
        c: DVector<f64>,
        a0: SymMatrix,
        a: Vec<SymMatrix>,
        b_mat: DMatrix<f64>,
        b: DVector<f64>,
    ) -> Result<Self> {
        let n = c.len();
        Self::new(DMatrix::zeros(n, n), c, a0, a, b_mat, b)
    }

    /// `min ½‖X − A‖²_F` over correlation matrices, in svec coordinates.
    pub fn nearest_correlation(target: &SymMatrix) -> Self {
        let m = target.dim();
        let n = svec_len(m);
        let a = (0..n)
            .map(|k| {
                let mut e = vec![0.0; n];
                e[k] = 1.0;
                smat(&e, m).expect("length matches")
            })
            .collect();
        // svec stores the diagonal entry (j, j) unscaled at the start of column j.
        let mut b_mat = DMatrix::zeros(m, n);
        let mut k = 0;
        for j in 0..m {
            b_mat[(j, k)] = 1.0;
            k += m - j;
        }
        Self {
            q: DMatrix::identity(n, n),
            c: -svec(target),
            a0: SymMatrix::zeros(m),
            a,
            b_mat,
            b: DVector::from_element(m, 1.0),
        }
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn a0(&self) -> &SymMatrix {
        &self.a0
    }

    pub fn a(&self) -> &[SymMatrix] {
        &self.a
    }

    pub fn b_mat(&self) -> &DMatrix<f64> {
        &self.b_mat
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }
}

impl Problem for AffineSdp {
    fn n(&self) -> usize {
        self.c.len()
    }

    fn m(&self) -> usize {
        self.a0.dim()
    }

    fn s(&self) -> usize {
        self.b.len()
    }

    fn f(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.q * x)) + self.c.dot(x)
    }

    fn grad_f(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.q * x + &self.c
    }

    fn hess_f(&self, _x: &DVector<f64>) -> DMatrix<f64> {
        self.q.clone()
    }

    fn g(&self, x: &DVector<f64>) -> SymMatrix {
        let mut g = self.a0.as_matrix().clone();
        for (ai, xi) in self.a.iter().zip(x.iter()) {
            g += ai.as_matrix() * *xi;
        }
        SymMatrix::from_symmetrized(g)
    }

    fn g_partials(&self, _x: &DVector<f64>) -> Vec<SymMatrix> {
        self.a.clone()
    }

    fn h(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.b_mat * x - &self.b
    }

    fn jac_h(&self, _x: &DVector<f64>) -> DMatrix<f64> {
        self.b_mat.transpose()
    }

    fn second_contraction(&self, _x: &DVector<f64>, _y: &SymMatrix) -> DMatrix<f64> {
        DMatrix::zeros(self.n(), self.n())
    }

    fn hess_h(&self, _x: &DVector<f64>, _z: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(self.n(), self.n())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    LinearSdp,
    NearestCorrelation,
    Builtin,
}

/// How a solve obtains its starting point.
#[derive(Debug, Clone, PartialEq)]
pub enum Start {
    Explicit(Iterate),
    /// Central-path point at the given barrier value.
    CentralPath(f64),
}

pub const DEFAULT_START_MU: f64 = 1e-2;

#[derive(Debug, Clone)]
pub struct InstanceSpec {
    pub name: String,
    pub kind: InstanceKind,
    problem: AffineSdp,
    pub known_solution: Option<Iterate>,
    /// Interior point used to seed continuation when no known solution exists.
    pub interior_guess: Option<Iterate>,
    pub start: Start,
}

impl InstanceSpec {
    pub fn new(name: impl Into<String>, kind: InstanceKind, problem: AffineSdp) -> Self {
        Self {
            name: name.into(),
            kind,
            problem,
            known_solution: None,
            interior_guess: None,
            start: Start::CentralPath(DEFAULT_START_MU),
        }
    }

    pub fn problem(&self) -> &dyn Problem {
        &self.problem
    }

    pub fn affine(&self) -> &AffineSdp {
        &self.problem
    }

    /// Checks dimensions and that the known solution is a KKT point.
    pub fn validate(&self) -> Result<()> {
        let p = self.problem();
        for (label, w) in [
            ("known_solution", &self.known_solution),
            ("interior_guess", &self.interior_guess),
        ] {
            if let Some(w) = w {
                w.check_dims(p).map_err(|e| Error::Parse {
                    field: label.into(),
                    msg: e.to_string(),
                })?;
            }
        }
        if let Start::Explicit(w) = &self.start {
            w.check_dims(p).map_err(|e| Error::Parse {
                field: "start".into(),
                msg: e.to_string(),
            })?;
        }
        if let Some(w) = &self.known_solution {
            let scale = 1.0 + w.norm();
            let psd_tol = -1e-9 * scale;
            if min_eig(&p.g(&w.x)) < psd_tol || min_eig(&w.y) < psd_tol {
                return Err(Error::Parse {
                    field: "known_solution".into(),
                    msg: "G(x) and Y must be positive semidefinite".into(),
                });
            }
            let r = residual_xi_identity(p, w, 0.0)?.norm;
            if r > KNOWN_SOLUTION_TOL {
                return Err(Error::Parse {
                    field: "known_solution".into(),
                    msg: format!("KKT residual {r:.3e} exceeds {KNOWN_SOLUTION_TOL:.0e}"),
                });
            }
        }
        Ok(())
    }

    /// Warm start for a central-path solve at `mu`: the tangent predictor from
    /// the known solution when it lands in the interior, otherwise a
    /// continuation path from the interior guess.
    pub fn path_guess(&self, mu: f64) -> Result<Iterate> {
        let p = self.problem();
        if let Some(ws) = &self.known_solution {
            if let Ok(w) = tangent_predictor(p, ws, mu) {
                if w.is_interior(p) {
                    return Ok(w);
                }
            }
        }
        let seed = self.interior_seed()?;
        continuation_path_point(p, mu, &seed)
    }

    /// Central-path point at `mu`.
    pub fn path_point(&self, mu: f64) -> Result<Iterate> {
        let guess = self.path_guess(mu)?;
        Ok(central_path_point(self.problem(), mu, &guess, None)?.point)
    }

    pub fn start_point(&self) -> Result<Iterate> {
        match &self.start {
            Start::Explicit(w) => {
                w.ensure_interior(self.problem())?;
                Ok(w.clone())
            }
            Start::CentralPath(mu) => self.path_point(*mu),
        }
    }

    fn interior_seed(&self) -> Result<Iterate> {
        if let Some(w) = &self.interior_guess {
            return Ok(w.clone());
        }
        if let Start::Explicit(w) = &self.start {
            return Ok(w.clone());
        }
        Err(Error::InsufficientData(format!(
            "instance `{}` has neither an interior guess nor a usable known solution",
            self.name
        )))
    }

    /// Serializable form, with `kind` forced to `linear-sdp`.
    pub fn to_file(&self) -> InstanceFile {
        let p = &self.problem;
        let q = if p.q.iter().all(|v| *v == 0.0) {
            None
        } else {
            Some(matrix_rows(&p.q))
        };
        InstanceFile {
            kind: InstanceKind::LinearSdp,
            name: Some(self.name.clone()),
            n: p.n(),
            m: p.m(),
            s: p.s(),
            c: Some(p.c.iter().copied().collect()),
            q,
            a0: Some(p.a0.to_rows()),
            a: Some(p.a.iter().map(SymMatrix::to_rows).collect()),
            b_mat: Some(matrix_rows(&p.b_mat)),
            b: Some(p.b.iter().copied().collect()),
            target: None,
            known_solution: self.known_solution.as_ref().map(IterateData::from),
            interior_guess: self.interior_guess.as_ref().map(IterateData::from),
            start: Some(match &self.start {
                Start::Explicit(w) => StartData {
                    central_path_mu: None,
                    explicit: Some(w.into()),
                },
                Start::CentralPath(mu) => StartData {
                    central_path_mu: Some(*mu),
                    explicit: None,
                },
            }),
        }
    }
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// An iterate in JSON form: `y` is a row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateData {
    pub x: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub z: Vec<f64>,
}

impl From<&Iterate> for IterateData {
    fn from(w: &Iterate) -> Self {
        Self {
            x: w.x.iter().copied().collect(),
            y: w.y.to_rows(),
            z: w.z.iter().copied().collect(),
        }
    }
}

impl IterateData {
    pub fn to_iterate(&self, field: &str, n: usize, m: usize, s: usize) -> Result<Iterate> {
        let x = vector(&format!("{field}.x"), &self.x, n)?;
        let y = sym(&format!("{field}.y"), &self.y, m)?;
        let z = vector(&format!("{field}.z"), &self.z, s)?;
        Ok(Iterate::new(x, y, z))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartData {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub central_path_mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explicit: Option<IterateData>,
}

/// On-disk instance description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub kind: InstanceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    pub m: usize,
    pub s: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_mat: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    /// Target matrix for `nearest-correlation`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_solution: Option<IterateData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interior_guess: Option<IterateData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<StartData>,
}

fn parse_err(field: &str, msg: impl Into<String>) -> Error {
    Error::Parse {
        field: field.into(),
        msg: msg.into(),
    }
}

fn required<'a, T>(field: &str, v: &'a Option<T>) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| parse_err(field, "missing"))
}

fn vector(field: &str, v: &[f64], len: usize) -> Result<DVector<f64>> {
    if v.len() != len {
        return Err(parse_err(field, format!("has {} entries, expected {len}", v.len())));
    }
    Ok(DVector::from_column_slice(v))
}

fn dense(field: &str, rows: &[Vec<f64>], nrows: usize, ncols: usize) -> Result<DMatrix<f64>> {
    if rows.len() != nrows {
        return Err(parse_err(field, format!("has {} rows, expected {nrows}", rows.len())));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != ncols {
            return Err(parse_err(
                field,
                format!("row {i} has {} entries, expected {ncols}", r.len()),
            ));
        }
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn sym(field: &str, rows: &[Vec<f64>], m: usize) -> Result<SymMatrix> {
    let d = dense(field, rows, m, m)?;
    SymMatrix::new(d).map_err(|e| parse_err(field, e.to_string()))
}

impl InstanceFile {
    pub fn into_spec(self) -> Result<InstanceSpec> {
        let (n, m, s) = (self.n, self.m, self.s);
        let mut spec = match self.kind {
            InstanceKind::Builtin => {
                let name = required("name", &self.name)?;
                let spec = builtin(name)?;
                let p = spec.problem();
                if (p.n(), p.m(), p.s()) != (n, m, s) {
                    return Err(Error::DimensionMismatch(format!(
                        "builtin `{name}` has (n, m, s) = ({}, {}, {}), file declares ({n}, {m}, {s})",
                        p.n(),
                        p.m(),
                        p.s()
                    )));
                }
                spec
            }
            InstanceKind::NearestCorrelation => {
                let target = sym("target", required("target", &self.target)?, m)?;
                if n != svec_len(m) || s != m {
                    return Err(Error::DimensionMismatch(format!(
                        "nearest-correlation with m = {m} needs n = {} and s = {m}",
                        svec_len(m)
                    )));
                }
                let mut spec = InstanceSpec::new(
                    self.name.clone().unwrap_or_else(|| "nearest-correlation".into()),
                    InstanceKind::NearestCorrelation,
                    AffineSdp::nearest_correlation(&target),
                );
                spec.interior_guess = Some(identity_guess(m));
                spec
            }
            InstanceKind::LinearSdp => {
                let c = vector("c", required("c", &self.c)?, n)?;
                let q = match &self.q {
                    Some(rows) => dense("q", rows, n, n)?,
                    None => DMatrix::zeros(n, n),
                };
                let a0 = sym("a0", required("a0", &self.a0)?, m)?;
                let a_rows = required("a", &self.a)?;
                if a_rows.len() != n {
                    return Err(parse_err(
                        "a",
                        format!("has {} matrices, expected n = {n}", a_rows.len()),
                    ));
                }
                let a = a_rows
                    .iter()
                    .enumerate()
                    .map(|(i, r)| sym(&format!("a[{i}]"), r, m))
                    .collect::<Result<Vec<_>>>()?;
                let (b_mat, b) = match (&self.b_mat, &self.b) {
                    (Some(rows), Some(b)) => (dense("b_mat", rows, s, n)?, vector("b", b, s)?),
                    (None, None) if s == 0 => (DMatrix::zeros(0, n), DVector::zeros(0)),
                    (None, _) => return Err(parse_err("b_mat", "missing")),
                    (_, None) => return Err(parse_err("b", "missing")),
                };
                let problem = AffineSdp::new(q, c, a0, a, b_mat, b)?;
                InstanceSpec::new(
                    self.name.clone().unwrap_or_else(|| "linear-sdp".into()),
                    InstanceKind::LinearSdp,
                    problem,
                )
            }
        };
        if let Some(w) = &self.known_solution {
            spec.known_solution = Some(w.to_iterate("known_solution", n, m, s)?);
        }
        if let Some(w) = &self.interior_guess {
            spec.interior_guess = Some(w.to_iterate("interior_guess", n, m, s)?);
        }
        if let Some(st) = &self.start {
            spec.start = match (st.central_path_mu, &st.explicit) {
                (Some(mu), None) if mu > 0.0 && mu.is_finite() => Start::CentralPath(mu),
                (Some(_), None) => return Err(parse_err("start.central_path_mu", "must be positive and finite")),
                (None, Some(w)) => Start::Explicit(w.to_iterate("start.explicit", n, m, s)?),
                _ => return Err(parse_err("start", "give exactly one of central_path_mu or explicit")),
            };
        }
        spec.validate()?;
        Ok(spec)
    }
}

pub fn parse_instance(text: &str) -> Result<InstanceSpec> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| parse_err("<document>", e.to_string()))?;
    file.into_spec()
}

pub fn load_instance(path: &Path) -> Result<InstanceSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}

pub const BUILTIN_NAMES: [&str; 4] = ["lsdp-small", "quad-nsdp", "near-corr-4", "saddle-toy"];

pub fn builtin(name: &str) -> Result<InstanceSpec> {
    match name {
        "lsdp-small" => Ok(lsdp_small()),
        "quad-nsdp" => Ok(quad_nsdp()),
        "near-corr-4" => Ok(near_corr_4()),
        "saddle-toy" => Ok(saddle_toy()),
        other => Err(Error::UnknownInstance(other.into())),
    }
}

/// Symmetric orthogonal matrix `(1/3)[[1,2,2],[2,1,−2],[2,−2,1]]`.
fn rotation3() -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 2.0, 2.0, 1.0, -2.0, 2.0, -2.0, 1.0]) / 3.0
}

fn rotated_diag(d: &[f64]) -> SymMatrix {
    SymMatrix::from_diagonal(d).congruence(&rotation3())
}

fn rows(r: &[&[f64]]) -> SymMatrix {
    SymMatrix::from_rows(&r.iter().map(|v| v.to_vec()).collect::<Vec<_>>()).expect("symmetric literal")
}

/// Builds `(A₀, c, b)` so that `(x*, Y*, z*)` is a KKT point with `G(x*) = g_star`.
fn back_solve(q: DMatrix<f64>, a: Vec<SymMatrix>, b_mat: DMatrix<f64>, w: &Iterate, g_star: &SymMatrix) -> AffineSdp {
    let mut a0 = g_star.as_matrix().clone();
    for (ai, xi) in a.iter().zip(w.x.iter()) {
        a0 -= ai.as_matrix() * *xi;
    }
    let adj = DVector::from_iterator(a.len(), a.iter().map(|ai| ai.dot(&w.y)));
    let c = -&q * &w.x + adj - b_mat.transpose() * &w.z;
    let b = &b_mat * &w.x;
    AffineSdp::new(q, c, SymMatrix::from_symmetrized(a0), a, b_mat, b).expect("consistent dimensions")
}

fn identity_guess(m: usize) -> Iterate {
    Iterate::new(svec(&SymMatrix::identity(m)), SymMatrix::identity(m), DVector::zeros(m))
}

fn lsdp_small() -> InstanceSpec {
    let a = vec![
        rows(&[&[2.0, 1.0, 0.0], &[1.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]),
        rows(&[&[0.0, 1.0, 1.0], &[1.0, 0.0, 0.0], &[1.0, 0.0, -1.0]]),
        rows(&[&[1.0, 0.0, 1.0], &[0.0, 2.0, 1.0], &[1.0, 1.0, 0.0]]),
    ];
    let g_star = rotated_diag(&[2.0, 1.0, 0.0]);
    let w = Iterate::new(
        DVector::from_vec(vec![0.5, -0.25, 1.0]),
        rotated_diag(&[0.0, 0.0, 1.5]),
        DVector::from_vec(vec![0.5]),
    );
    let b_mat = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
    let problem = back_solve(DMatrix::zeros(3, 3), a, b_mat, &w, &g_star);
    let mut spec = InstanceSpec::new("lsdp-small", InstanceKind::LinearSdp, problem);
    spec.known_solution = Some(w);
    spec
}

fn quad_nsdp() -> InstanceSpec {
    let q = DMatrix::from_row_slice(
        4,
        4,
        &[
            2.0, 0.5, 0.0, 0.0, 0.5, 1.5, 0.2, 0.0, 0.0, 0.2, 3.0, -0.4, 0.0, 0.0, -0.4, 1.0,
        ],
    );
    let a = vec![
        rows(&[&[1.0, 0.0, 1.0], &[0.0, 2.0, 0.0], &[1.0, 0.0, 1.0]]),
        rows(&[&[0.0, 1.0, 0.0], &[1.0, 1.0, -1.0], &[0.0, -1.0, 2.0]]),
        rows(&[&[1.0, 1.0, 0.0], &[1.0, 0.0, 1.0], &[0.0, 1.0, -1.0]]),
        rows(&[&[-1.0, 0.0, 2.0], &[0.0, 1.0, 1.0], &[2.0, 1.0, 0.0]]),
    ];
    let g_star = rotated_diag(&[1.5, 0.0, 0.0]);
    let w = Iterate::new(
        DVector::from_vec(vec![0.2, 0.4, -0.3, 0.1]),
        rotated_diag(&[0.0, 1.0, 0.5]),
        DVector::from_vec(vec![-0.7]),
    );
    let b_mat = DMatrix::from_row_slice(1, 4, &[1.0, -1.0, 2.0, 0.5]);
    let problem = back_solve(q, a, b_mat, &w, &g_star);
    let mut spec = InstanceSpec::new("quad-nsdp", InstanceKind::LinearSdp, problem);
    spec.known_solution = Some(w);
    spec
}

/// Indefinite target with unit diagonal; the projection onto correlation
/// matrices has no closed form.
pub fn near_corr_target() -> SymMatrix {
    rows(&[
        &[1.0, 0.9, 0.7, -0.6],
        &[0.9, 1.0, 0.9, 0.3],
        &[0.7, 0.9, 1.0, 0.8],
        &[-0.6, 0.3, 0.8, 1.0],
    ])
}

/// Nearest-correlation instance for an arbitrary symmetric target.
pub fn near_corr(target: &SymMatrix) -> InstanceSpec {
    let m = target.dim();
    let mut spec = InstanceSpec::new(
        "near-corr",
        InstanceKind::NearestCorrelation,
        AffineSdp::nearest_correlation(target),
    );
    spec.interior_guess = Some(identity_guess(m));
    spec
}

fn near_corr_4() -> InstanceSpec {
    let mut spec = near_corr(&near_corr_target());
    spec.name = "near-corr-4".into();
    spec
}

/// `min −x²` s.t. `1 + x ⪰ 0`: `x* = 0` is a KKT point where the Hessian is negative.
fn saddle_toy() -> InstanceSpec {
    let problem = AffineSdp::new(
        DMatrix::from_element(1, 1, -2.0),
        DVector::zeros(1),
        SymMatrix::identity(1),
        vec![SymMatrix::identity(1)],
        DMatrix::zeros(0, 1),
        DVector::zeros(0),
    )
    .expect("consistent dimensions");
    let mut spec = InstanceSpec::new("saddle-toy", InstanceKind::LinearSdp, problem);
    spec.known_solution = Some(Iterate::new(DVector::zeros(1), SymMatrix::zeros(1), DVector::zeros(0)));
    spec.start = Start::Explicit(Iterate::new(
        DVector::from_vec(vec![0.1]),
        SymMatrix::identity(1).scale(0.1),
        DVector::zeros(0),
    ));
    spec
}
