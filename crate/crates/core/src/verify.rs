//! Seeded property suites behind `mtsdp verify`.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instances::builtin;
use crate::model::Iterate;
use crate::newton::{solve_scaled_form, solve_step, StepMode};
use crate::regularity::regularity_report;
use crate::scaling::{make_scaling, scaling_from_parts, ScalingKind};
use crate::symcore::{
    default_pd_tol, lemma_dx_gap, lyap_apply, lyap_solve_sqrt, smat, sqrt_psd, svec, sym_eig, SymMatrix,
};

pub const SUITES: [&str; 9] = [
    "lemma-dx",
    "xyx",
    "aa-bound",
    "lyapunov",
    "svec",
    "scaling-invariance",
    "family-identities",
    "newton-equivalence",
    "regularity",
];

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    /// Largest observed value of the suite's error metric.
    pub worst: f64,
    pub tol: f64,
    /// Fold of the bit patterns of every sampled matrix.
    pub digest: u64,
    pub elapsed: Duration,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {} trials, {} failures, worst {:.3e} (tol {:.0e}), digest {:016x}, {:.2?}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.trials,
            self.failures,
            self.worst,
            self.tol,
            self.digest,
            self.elapsed
        )
    }
}

/// FNV-1a over `f64` bit patterns.
#[derive(Debug, Clone, Copy)]
pub struct Digest(u64);

impl Default for Digest {
    fn default() -> Self {
        Digest(0xcbf2_9ce4_8422_2325)
    }
}

impl Digest {
    pub fn feed(&mut self, m: &DMatrix<f64>) {
        for v in m.iter() {
            for b in v.to_bits().to_le_bytes() {
                self.0 ^= b as u64;
                self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
            }
        }
    }

    pub fn value(&self) -> u64 {
        self.0
    }
}

/// Deterministic generator for one suite.
pub fn suite_rng(seed: u64, name: &str) -> ChaCha8Rng {
    let mut d = Digest::default();
    d.feed(&DMatrix::from_iterator(name.len(), 1, name.bytes().map(|b| b as f64)));
    ChaCha8Rng::seed_from_u64(seed ^ d.value())
}

pub fn random_sym(rng: &mut impl Rng, m: usize) -> SymMatrix {
    SymMatrix::from_symmetrized(DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0)))
}

/// Random orthogonal matrix from the QR factorization of a Gaussian-like matrix.
pub fn random_orthogonal(rng: &mut impl Rng, m: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0));
    a.qr().q()
}

/// Positive definite matrix with eigenvalues log-uniform in `[lo, hi]`.
pub fn random_pd(rng: &mut impl Rng, m: usize, lo: f64, hi: f64) -> SymMatrix {
    let q = random_orthogonal(rng, m);
    let d: Vec<f64> = (0..m).map(|_| (rng.random_range(lo.ln()..hi.ln())).exp()).collect();
    SymMatrix::from_diagonal(&d).congruence(&q)
}

/// Positive semidefinite matrix of random rank.
pub fn random_psd(rng: &mut impl Rng, m: usize) -> SymMatrix {
    let r = rng.random_range(0..=m);
    let b = DMatrix::from_fn(m, r, |_, _| rng.random_range(-1.0..1.0));
    SymMatrix::from_symmetrized(&b * b.transpose())
}

struct Tally {
    failures: usize,
    worst: f64,
    digest: Digest,
}

impl Tally {
    fn new() -> Self {
        Self {
            failures: 0,
            worst: 0.0,
            digest: Digest::default(),
        }
    }

    fn check(&mut self, err: f64, ok: bool) {
        if !(err <= self.worst) {
            self.worst = if err.is_nan() { f64::NAN } else { err.max(self.worst) };
        }
        if !ok {
            self.failures += 1;
        }
    }
}

pub fn run_suite(name: &str, trials: usize, seed: u64) -> Result<SuiteResult> {
    let start = Instant::now();
    let mut rng = suite_rng(seed, name);
    let mut t = Tally::new();
    let tol = match name {
        "lemma-dx" => lemma_dx(&mut rng, trials, &mut t),
        "xyx" => xyx(&mut rng, trials, &mut t),
        "aa-bound" => aa_bound(&mut rng, trials, &mut t),
        "lyapunov" => lyapunov(&mut rng, trials, &mut t),
        "svec" => svec_suite(&mut rng, trials, &mut t),
        "scaling-invariance" => scaling_invariance(&mut rng, trials, &mut t)?,
        "family-identities" => family_identities(&mut rng, trials, &mut t)?,
        "newton-equivalence" => newton_equivalence(&mut rng, trials, &mut t)?,
        "regularity" => regularity(&mut t)?,
        other => {
            return Err(Error::Config(format!(
                "unknown suite `{other}`; available: {}",
                SUITES.join(", ")
            )))
        }
    };
    let trials = if name == "regularity" { 2 } else { trials };
    Ok(SuiteResult {
        name: name.into(),
        trials,
        failures: t.failures,
        worst: t.worst,
        tol,
        digest: t.digest.value(),
        elapsed: start.elapsed(),
    })
}

/// `|lhs − rhs| ≤ 1e-10 (1 + rhs)` for the commutator identity, `m ∈ 1..=8`.
fn lemma_dx(rng: &mut ChaCha8Rng, trials: usize, t: &mut Tally) -> f64 {
    let tol = 1e-10;
    for _ in 0..trials {
        let m = rng.random_range(1..=8);
        let a = random_sym(rng, m);
        let b = random_sym(rng, m);
        let mu = rng.random_range(-2.0..2.0);
        t.digest.feed(a.as_matrix());
        t.digest.feed(b.as_matrix());
        let (l, r) = lemma_dx_gap(&a, &b, mu);
        let err = (l - r).abs() / (1.0 + r);
        t.check(err, err <= tol);
    }
    tol
}

/// `‖X^{1/2} Y X^{1/2} − μI‖ ≤ ‖XY − μI‖` for PSD `X`.
fn xyx(rng: &mut ChaCha8Rng, trials: usize, t: &mut Tally) -> f64 {
    let tol = 1e-12;
    for _ in 0..trials {
        let m = rng.random_range(1..=8);
        let x = random_psd(rng, m);
        let y = random_sym(rng, m);
        let mu = rng.random_range(-2.0..2.0);
        t.digest.feed(x.as_matrix());
        t.digest.feed(y.as_matrix());
        let id = DMatrix::<f64>::identity(m, m);
        let xh = sqrt_psd(&x, 1e-10).expect("psd by construction");
        let lhs = (xh.as_matrix() * y.as_matrix() * xh.as_matrix() - &id * mu).norm();
        let rhs = (x.as_matrix() * y.as_matrix() - &id * mu).norm();
        let excess = lhs - rhs;
        t.check(excess.max(0.0), excess <= tol * (1.0 + rhs));
    }
    tol
}

/// `‖U X^{-1/2}‖ ≤ √(m/2) ‖ΔX‖ ‖X^{-1}‖` with `U = L⁻¹_{X^{1/2}}(ΔX)`.
fn aa_bound(rng: &mut ChaCha8Rng, trials: usize, t: &mut Tally) -> f64 {
    let tol = 1e-12;
    for _ in 0..trials {
        let m = rng.random_range(1..=8);
        let x = random_pd(rng, m, 1e-2, 1e2);
        let dx = random_sym(rng, m);
        t.digest.feed(x.as_matrix());
        t.digest.feed(dx.as_matrix());
        let u = lyap_solve_sqrt(&x, &dx, default_pd_tol(&x)).expect("pd by construction");
        let e = sym_eig(&x).expect("symmetric");
        let lhs = (u.as_matrix() * e.map(|v| 1.0 / v.sqrt()).as_matrix()).norm();
        let rhs = (m as f64 / 2.0).sqrt() * dx.frob_norm() * e.map(|v| 1.0 / v).frob_norm();
        let excess = lhs - rhs;
        t.check(
            excess.max(0.0) / rhs.max(f64::MIN_POSITIVE),
            excess <= tol * (1.0 + rhs),
        );
    }
    tol
}

fn lyapunov(rng: &mut ChaCha8Rng, trials: usize, t: &mut Tally) -> f64 {
    let tol = 1e-10;
    for _ in 0..trials {
        let m = rng.random_range(1..=8);
        let g = random_pd(rng, m, 1e-2, 1e2);
        let b = random_sym(rng, m);
        t.digest.feed(g.as_matrix());
        t.digest.feed(b.as_matrix());
        let u = lyap_solve_sqrt(&g, &b, default_pd_tol(&g)).expect("pd by construction");
        let gh = sqrt_psd(&g, 0.0).expect("pd by construction");
        let err = (lyap_apply(&gh, &u).as_matrix() - b.as_matrix()).norm() / (1.0 + b.frob_norm());
        t.check(err, err <= tol);
    }
    tol
}

fn svec_suite(rng: &mut ChaCha8Rng, trials: usize, t: &mut Tally) -> f64 {
    let tol = 1e-14;
    for _ in 0..trials {
        let m = rng.random_range(1..=8);
        let a = random_sym(rng, m);
        let b = random_sym(rng, m);
        t.digest.feed(a.as_matrix());
        t.digest.feed(b.as_matrix());
        let inner = (svec(&a).dot(&svec(&b)) - a.dot(&b)).abs() / (1.0 + a.frob_norm() * b.frob_norm());
        let back = smat(svec(&a).as_slice(), m).expect("length matches");
        let err = inner.max((back.as_matrix() - a.as_matrix()).amax());
        t.check(err, err <= tol);
    }
    tol
}

/// Random interior pair `(G, Y)` with moderately spread spectra.
fn random_interior(rng: &mut ChaCha8Rng, t: &mut Tally) -> (SymMatrix, SymMatrix, f64) {
    let m = rng.random_range(1..=6);
    let g = random_pd(rng, m, 1e-2, 1e1);
    let y = random_pd(rng, m, 1e-2, 1e1);
    let mu = rng.random_range(0.0..1.0);
    t.digest.feed(g.as_matrix());
    t.digest.feed(y.as_matrix());
    (g, y, mu)
}

/// `‖Ĝ^{1/2} Ŷ Ĝ^{1/2} − μI‖` agrees across every scaling.
fn scaling_invariance(rng: &mut ChaCha8Rng, trials: usize, t: &mut Tally) -> Result<f64> {
    let tol = 1e-9;
    for _ in 0..trials {
        let (g, y, mu) = random_interior(rng, t);
        let vals = ScalingKind::ALL
            .iter()
            .map(|&k| {
                Ok(scaling_from_parts(k, g.clone(), Vec::new(), &y)?
                    .scaled_center()
                    .shift(mu)
                    .frob_norm())
            })
            .collect::<Result<Vec<f64>>>()?;
        let base = vals[0];
        let err = vals
            .iter()
            .map(|v| (v - base).abs() / base.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        t.check(err, err <= tol);
    }
    Ok(tol)
}

/// HKM: `Ĝ = I`; NT: `Ŷ = I`; HKM-dual: `ŶĜŶ = I`; MTW: `Ĝ = Ŷ`.
fn family_identities(rng: &mut ChaCha8Rng, trials: usize, t: &mut Tally) -> Result<f64> {
    let tol = 1e-9;
    for _ in 0..trials {
        let (g, y, _) = random_interior(rng, t);
        let m = g.dim();
        let id = DMatrix::<f64>::identity(m, m);
        let idn = (m as f64).sqrt();
        let mut err: f64 = 0.0;
        for kind in [
            ScalingKind::Hkm,
            ScalingKind::Nt,
            ScalingKind::HkmDual,
            ScalingKind::Mtw,
        ] {
            let sc = scaling_from_parts(kind, g.clone(), Vec::new(), &y)?;
            let (gh, yh) = (sc.g_hat.as_matrix(), sc.y_hat.as_matrix());
            let e = match kind {
                ScalingKind::Hkm => (gh - &id).norm() / idn,
                ScalingKind::Nt => (yh - &id).norm() / idn,
                // ŶĜŶ = I in the form Ĝ = Ŷ⁻², which avoids the κ(Ŷ)² roundoff of the product.
                ScalingKind::HkmDual => {
                    let c = yh
                        .clone()
                        .cholesky()
                        .ok_or_else(|| Error::NotInterior("Ŷ is not positive definite".into()))?;
                    (gh - c.solve(&c.solve(&id))).norm() / gh.norm()
                }
                ScalingKind::Mtw => (gh - yh).norm() / gh.norm(),
                ScalingKind::Identity => unreachable!(),
            };
            err = err.max(e);
        }
        t.check(err, err <= tol);
    }
    Ok(tol)
}

/// Perturbed central-path point at a log-uniform `μ ∈ [1e-6, 1e-2]`.
pub fn near_path_point(rng: &mut ChaCha8Rng, spec: &crate::instances::InstanceSpec) -> Result<(Iterate, f64)> {
    let mu = 10f64.powf(rng.random_range(-6.0..-2.0));
    let p = spec.problem();
    let v = spec.path_point(mu)?;
    let delta = 1e-2 * mu;
    let mut w = v.clone();
    w.x += DVector::from_fn(p.n(), |_, _| rng.random_range(-delta..delta));
    w.z += DVector::from_fn(p.s(), |_, _| rng.random_range(-delta..delta));
    // Scaling Y keeps it positive definite for |ε| < 1.
    w.y = w.y.scale(1.0 + rng.random_range(-1e-2..1e-2));
    Ok((w, mu))
}

/// Symmetrized and scaled Newton systems share their solutions.
fn newton_equivalence(rng: &mut ChaCha8Rng, trials: usize, t: &mut Tally) -> Result<f64> {
    let tol = 1e-7;
    let specs = [builtin("lsdp-small")?, builtin("quad-nsdp")?];
    for i in 0..trials {
        let spec = &specs[i % 2];
        let p = spec.problem();
        let (w, mu) = near_path_point(rng, spec)?;
        t.digest.feed(&DMatrix::from_column_slice(p.n(), 1, w.x.as_slice()));
        let mut err: f64 = 0.0;
        let mut ok = true;
        for kind in ScalingKind::ALL {
            let sc = make_scaling(kind, p, &w)?;
            for mode in [StepMode::Tangential, StepMode::Centering] {
                let a = solve_step(p, &w, mu, &sc, mode)?;
                let b = solve_scaled_form(p, &w, mu, &sc, mode)?;
                let rel = a.dir.dist(&b) / a.dir.norm().max(f64::MIN_POSITIVE);
                err = err.max(rel);
                ok &= rel <= tol && a.scaled_residual <= 1e-8;
            }
        }
        t.check(err, ok);
    }
    Ok(tol)
}

fn regularity(t: &mut Tally) -> Result<f64> {
    let spec = builtin("lsdp-small")?;
    let r = regularity_report(spec.problem(), spec.known_solution.as_ref().expect("known"))?;
    t.check(0.0, r.all_hold());
    let spec = builtin("saddle-toy")?;
    let r = regularity_report(spec.problem(), spec.known_solution.as_ref().expect("known"))?;
    t.check(0.0, !r.sosc);
    Ok(0.0)
}
