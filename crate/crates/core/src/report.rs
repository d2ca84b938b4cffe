//! Convergence table and run summary.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{InstanceSpec, IterateData};
use crate::model::residual_xi_identity;
use crate::pathfollow::{RunOutcome, SolverConfig, Status, Trace};
use crate::regularity::RegularityReport;

pub const CSV_HEADER: [&str; 12] = [
    "k",
    "mu",
    "s_t",
    "s_c",
    "bt_t",
    "bt_c",
    "phi1",
    "xi0",
    "min_eig_G",
    "min_eig_Y",
    "zmax",
    "order_estimate_running",
];

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(trace: &Trace, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    wtr.write_record(CSV_HEADER).map_err(io)?;
    for r in &trace.records {
        wtr.write_record([
            r.k.to_string(),
            fmt_f64(r.mu),
            fmt_f64(r.s_t),
            fmt_f64(r.s_c),
            r.bt_t.to_string(),
            r.bt_c.to_string(),
            fmt_f64(r.phi1),
            fmt_f64(r.xi0),
            fmt_f64(r.min_eig_g),
            fmt_f64(r.min_eig_y),
            fmt_f64(r.zmax),
            r.order_estimate_running.map(fmt_f64).unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub instance: String,
    pub config: SolverConfig,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub iterations: usize,
    pub mu0: f64,
    pub mu_final: f64,
    /// `‖Ξ⁰_I(w_final)‖`
    pub final_residual: f64,
    pub estimated_order: Option<f64>,
    pub w_final: IterateData,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularity: Option<RegularityReport>,
}

impl Summary {
    pub fn new(
        spec: &InstanceSpec,
        cfg: &SolverConfig,
        out: &RunOutcome,
        order: Option<f64>,
        regularity: Option<RegularityReport>,
    ) -> Result<Self> {
        let reason = match &out.status {
            Status::Failed(r) => Some(r.clone()),
            _ => None,
        };
        Ok(Self {
            instance: spec.name.clone(),
            config: cfg.clone(),
            status: out.status.label().into(),
            reason,
            iterations: out.trace.records.len(),
            mu0: out.trace.mu0,
            mu_final: *out.trace.mus().last().expect("mu0 present"),
            final_residual: residual_xi_identity(spec.problem(), &out.w, 0.0)?.norm,
            estimated_order: order,
            w_final: (&out.w).into(),
            regularity,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            field: "<summary>".into(),
            msg: e.to_string(),
        })
    }

    /// Recomputes `‖Ξ⁰_I‖` at the stored final iterate.
    pub fn reverify(&self, spec: &InstanceSpec) -> Result<f64> {
        let p = spec.problem();
        let w = self.w_final.to_iterate("w_final", p.n(), p.m(), p.s())?;
        Ok(residual_xi_identity(p, &w, 0.0)?.norm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::builtin;
    use crate::pathfollow::run;

    #[test]
    fn float_format_roundtrips() {
        for v in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, f64::MIN_POSITIVE, 0.012589254117941675] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn csv_has_header_and_rows() {
        let spec = builtin("lsdp-small").unwrap();
        let w0 = spec.path_point(1e-2).unwrap();
        let out = run(spec.problem(), &w0, &SolverConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_csv(&out.trace, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(lines.count(), out.trace.records.len());
    }

    #[test]
    fn summary_roundtrip_and_reverify() {
        let spec = builtin("lsdp-small").unwrap();
        let cfg = SolverConfig::default();
        let w0 = spec.path_point(1e-2).unwrap();
        let out = run(spec.problem(), &w0, &cfg).unwrap();
        let s = Summary::new(&spec, &cfg, &out, None, None).unwrap();
        let back = Summary::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(back.reverify(&spec).unwrap() <= cfg.tol);
    }
}
