//! Cross-checks between the F-based spectra and the independent oracles,
//! as run by `trirec validate`.

use crate::ffunc::{eval_f_cf, eval_f_euler, SeriesConfig};
use crate::models::{
    bessel_fixture, dho_exact_levels, jc_exact_levels, DhoParams, Parity, RabiParams,
};
use crate::oracle::{
    bessel_series, dho_upward, laguerre_dominant, oracle_spectrum, OracleModel, OracleSpectrum,
};
use crate::recurrence::Recurrence;
use crate::spectrum::{resolve_spectrum, Root, SpectralModel, SpectrumConfig};

/// Energy tolerance for F-root versus oracle agreement.
pub const MATCH_TOL: f64 = 1e-6;
/// Cutoff-doubling tolerance for oracle spectra.
pub const ORACLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }

    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} {}: {}", self.name, self.detail)
    }
}

/// What `validate` should check beyond the model-independent fixtures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValidationTarget {
    Spectral(SpectralModel),
    Oracle(OracleModel),
}

/// Result of pairing F-zeros with oracle levels.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Pairing {
    pub pairs: Vec<(usize, usize)>,
    /// F-zeros with no oracle partner.
    pub spurious: Vec<usize>,
    /// Oracle levels in the window with no F-zero partner.
    pub missing: Vec<usize>,
    pub max_error: f64,
}

impl Pairing {
    pub fn is_bijective(&self) -> bool {
        self.spurious.is_empty() && self.missing.is_empty()
    }
}

/// Pairs zeros with oracle levels of matching parity within `tol`, greedily
/// by distance. Oracle levels count as required when they lie in
/// `[e_lo + tol, e_hi - tol]` and `required(i)` holds.
pub fn pair_levels(
    zeros: &[Root],
    oracle: &OracleSpectrum,
    e_lo: f64,
    e_hi: f64,
    tol: f64,
    required: impl Fn(usize) -> bool,
) -> Pairing {
    let parity_ok = |z: &Root, j: usize| match (z.parity, oracle.parities[j]) {
        (Some(s), Some(p)) => s.oracle_parity() == p,
        _ => true,
    };
    let mut cands: Vec<(f64, usize, usize)> = Vec::new();
    for (i, z) in zeros.iter().enumerate() {
        for (j, &e) in oracle.eigenvalues.iter().enumerate() {
            let d = (z.energy - e).abs();
            if d <= tol && parity_ok(z, j) {
                cands.push((d, i, j));
            }
        }
    }
    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut zi = vec![false; zeros.len()];
    let mut oj = vec![false; oracle.eigenvalues.len()];
    let mut out = Pairing::default();
    for (d, i, j) in cands {
        if zi[i] || oj[j] {
            continue;
        }
        zi[i] = true;
        oj[j] = true;
        out.pairs.push((i, j));
        out.max_error = out.max_error.max(d);
    }
    out.spurious = (0..zeros.len()).filter(|&i| !zi[i]).collect();
    out.missing = oracle
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|&(j, &e)| !oj[j] && e >= e_lo + tol && e <= e_hi - tol && required(j))
        .map(|(j, _)| j)
        .collect();
    out
}

/// Number of oracle levels needed to cover energies up to `e_hi`.
fn levels_needed(e_hi: f64, kappa: f64, delta: f64) -> usize {
    let top = e_hi + kappa * kappa + delta.abs() + 2.0;
    (2.0 * top.max(1.0)).ceil() as usize + 4
}

/// `max |F_euler - F_cf| / max(1, |F|)` over a uniform grid, skipping points
/// where either evaluation does not converge.
pub fn euler_cf_discrepancy(
    rec: &Recurrence,
    lo: f64,
    hi: f64,
    points: usize,
    cfg: &SeriesConfig,
) -> (f64, usize) {
    let mut worst: f64 = 0.0;
    let mut used = 0;
    for i in 0..points {
        let x = lo + (hi - lo) * (i as f64 + 0.5) / points as f64;
        let Ok(e) = eval_f_euler(rec, x, cfg) else {
            continue;
        };
        if !e.is_converged() {
            continue;
        }
        let Ok(c) = eval_f_cf(rec, x, cfg) else {
            continue;
        };
        worst = worst.max((e.value - c).abs() / e.value.abs().max(1.0));
        used += 1;
    }
    (worst, used)
}

fn check_euler_cf(model: &SpectralModel, cfg: &SpectrumConfig) -> CheckOutcome {
    let mut worst: f64 = 0.0;
    let mut used = 0;
    for (rec, _) in model.recurrences() {
        let (w, u) = euler_cf_discrepancy(&rec, cfg.x_lo, cfg.x_hi, 500, &cfg.series);
        worst = worst.max(w);
        used += u;
    }
    CheckOutcome::new(
        "euler-cf-identity",
        worst <= 1e-9 && used > 0,
        format!("max scaled difference {worst:.3e} over {used} points"),
    )
}

fn check_oracle(model: &SpectralModel, cfg: &SpectrumConfig) -> CheckOutcome {
    let name = "oracle-agreement";
    let roots = match resolve_spectrum(model, cfg) {
        Ok(r) => r,
        Err(e) => return CheckOutcome::new(name, false, e.to_string()),
    };
    let zeros: Vec<Root> = roots.into_iter().filter(Root::is_zero).collect();
    let (oracle_model, shift, kappa, delta) = match *model {
        SpectralModel::Dho(p) => (OracleModel::Dho(p), 0.0, p.kappa, 0.0),
        SpectralModel::Rabi(p) => (OracleModel::Rabi(p), p.kappa * p.kappa, p.kappa, p.delta),
        SpectralModel::ParityRabi { params, .. } => {
            (OracleModel::Rabi(params), 0.0, params.kappa, params.delta)
        }
    };
    let (e_lo, e_hi) = (cfg.x_lo - shift, cfg.x_hi - shift);
    let oracle = match oracle_spectrum(&oracle_model, levels_needed(e_hi, kappa, delta), ORACLE_TOL)
    {
        Ok(s) => s,
        Err(e) => return CheckOutcome::new(name, false, e.to_string()),
    };
    let sectors: Vec<Parity> = match *model {
        SpectralModel::ParityRabi { choice, .. } => {
            choice.sectors().iter().map(|s| s.oracle_parity()).collect()
        }
        _ => vec![Parity::Plus, Parity::Minus],
    };
    let rabi_poles = matches!(model, SpectralModel::Rabi(p) if p.delta != 0.0);
    let required = |j: usize| {
        let e = oracle.eigenvalues[j];
        let sector_ok = oracle.parities[j].is_none_or(|p| sectors.contains(&p));
        let x = e + shift;
        let at_pole = rabi_poles && x >= 0.0 && (x - x.round()).abs() < 1e-8;
        sector_ok && !at_pole
    };
    let pairing = pair_levels(&zeros, &oracle, e_lo, e_hi, MATCH_TOL, required);
    CheckOutcome::new(
        name,
        pairing.is_bijective() && !pairing.pairs.is_empty(),
        format!(
            "{} paired (max error {:.2e}), {} spurious, {} missing",
            pairing.pairs.len(),
            pairing.max_error,
            pairing.spurious.len(),
            pairing.missing.len()
        ),
    )
}

fn check_dho_exact(p: &DhoParams, cfg: &SpectrumConfig) -> CheckOutcome {
    let name = "dho-exact-levels";
    let roots = match resolve_spectrum(&SpectralModel::Dho(*p), cfg) {
        Ok(r) => r,
        Err(e) => return CheckOutcome::new(name, false, e.to_string()),
    };
    let zeros: Vec<f64> = roots
        .iter()
        .filter(|r| r.is_zero())
        .map(|r| r.energy)
        .collect();
    let exact: Vec<f64> = dho_exact_levels(
        p,
        (cfg.x_hi + p.kappa * p.kappa).ceil().max(0.0) as usize + 1,
    )
    .into_iter()
    .filter(|&e| e > cfg.x_lo && e < cfg.x_hi)
    .collect();
    let worst = zeros
        .iter()
        .zip(&exact)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    CheckOutcome::new(
        name,
        zeros.len() == exact.len() && worst <= 1e-8,
        format!(
            "{} zeros, {} exact levels, max error {worst:.2e}",
            zeros.len(),
            exact.len()
        ),
    )
}

fn check_form_consistency(p: &RabiParams, cfg: &SpectrumConfig) -> CheckOutcome {
    let name = "form-consistency";
    let k2 = p.kappa * p.kappa;
    let schweber_cfg = SpectrumConfig {
        x_lo: cfg.x_lo + k2,
        x_hi: cfg.x_hi + k2,
        ..*cfg
    };
    let parity = resolve_spectrum(
        &SpectralModel::ParityRabi {
            params: *p,
            choice: crate::models::ParityChoice::Both,
        },
        cfg,
    );
    let schweber = resolve_spectrum(&SpectralModel::Rabi(*p), &schweber_cfg);
    let (Ok(parity), Ok(schweber)) = (parity, schweber) else {
        return CheckOutcome::new(name, false, "scan failed");
    };
    let a: Vec<f64> = schweber
        .iter()
        .filter(|r| r.is_zero())
        .map(|r| r.energy)
        .collect();
    let b: Vec<f64> = parity
        .iter()
        .filter(|r| r.is_zero())
        .map(|r| r.energy)
        .collect();
    let tol = 2.0 * cfg.roots.x_tol.max(1e-9);
    let matched = |xs: &[f64], ys: &[f64]| {
        xs.iter()
            .filter(|&&x| x > cfg.x_lo + 1e-6 && x < cfg.x_hi - 1e-6)
            .all(|x| ys.iter().any(|y| (x - y).abs() <= tol))
    };
    CheckOutcome::new(
        name,
        matched(&a, &b) && matched(&b, &a),
        format!(
            "{} displaced-form zeros, {} parity-form zeros",
            a.len(),
            b.len()
        ),
    )
}

fn check_modified_rabi(p: &RabiParams) -> CheckOutcome {
    let name = "modified-rabi-oracle";
    let a = oracle_spectrum(&OracleModel::ModifiedRabi(*p), 10, ORACLE_TOL);
    let b = oracle_spectrum(&OracleModel::Rabi(*p), 10, ORACLE_TOL);
    match (a, b) {
        (Ok(a), Ok(b)) => {
            let worst = a
                .eigenvalues
                .iter()
                .zip(&b.eigenvalues)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            CheckOutcome::new(
                name,
                worst <= 1e-8,
                format!("max difference {worst:.2e} over 10 levels"),
            )
        }
        (Err(e), _) | (_, Err(e)) => CheckOutcome::new(name, false, e.to_string()),
    }
}

fn check_oracle_certified(model: &OracleModel) -> CheckOutcome {
    let name = "oracle-certified";
    match oracle_spectrum(model, 10, ORACLE_TOL) {
        Ok(s) => CheckOutcome::new(
            name,
            s.converged_count >= 10,
            format!(
                "{} converged levels at cutoff {}",
                s.converged_count, s.cutoff
            ),
        ),
        Err(e) => CheckOutcome::new(name, false, e.to_string()),
    }
}

fn check_jc(model: &OracleModel) -> CheckOutcome {
    let name = "jc-closed-form";
    let OracleModel::Jc(p) = model else {
        return CheckOutcome::new(name, false, "not a JC model");
    };
    match oracle_spectrum(model, 12, 1e-12) {
        Ok(s) => {
            let exact = jc_exact_levels(p, 20);
            let worst = s
                .eigenvalues
                .iter()
                .zip(&exact)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            CheckOutcome::new(
                name,
                worst <= 1e-10,
                format!("max difference {worst:.2e} over 12 levels"),
            )
        }
        Err(e) => CheckOutcome::new(name, false, e.to_string()),
    }
}

fn check_laguerre() -> CheckOutcome {
    let p = DhoParams {
        kappa: 0.7,
        omega: 1.0,
    };
    let x = 0.3;
    let up = dho_upward(&p, x, 30);
    let worst = up
        .iter()
        .enumerate()
        .map(|(n, v)| {
            let c = laguerre_dominant(&p, x, n);
            (v - c).abs() / c.abs()
        })
        .fold(0.0, f64::max);
    CheckOutcome::new(
        "laguerre-upward",
        worst <= 1e-8,
        format!("max relative difference {worst:.2e} for n <= 30"),
    )
}

fn check_bessel() -> CheckOutcome {
    let name = "bessel-fixture";
    let rec = match bessel_fixture(1.0) {
        Ok(r) => r,
        Err(e) => return CheckOutcome::new(name, false, e.to_string()),
    };
    let cf = eval_f_cf(&rec, 1.0, &SeriesConfig::default());
    let (Ok(j0), Ok(j1)) = (bessel_series(0, 1.0), bessel_series(1, 1.0)) else {
        return CheckOutcome::new(name, false, "series failed");
    };
    match cf {
        Ok(r0) => {
            let err = (r0 - j1 / j0).abs();
            CheckOutcome::new(name, err <= 1e-10, format!("|r_0 - J_1/J_0| = {err:.2e}"))
        }
        Err(e) => CheckOutcome::new(name, false, e.to_string()),
    }
}

/// Runs the fixture checks and the checks that apply to `target`.
pub fn run_suite(target: &ValidationTarget, cfg: &SpectrumConfig) -> Vec<CheckOutcome> {
    let mut out = vec![check_laguerre(), check_bessel()];
    match target {
        ValidationTarget::Spectral(m) => {
            out.push(check_euler_cf(m, cfg));
            out.push(check_oracle(m, cfg));
            match *m {
                SpectralModel::Dho(p) => out.push(check_dho_exact(&p, cfg)),
                SpectralModel::Rabi(p) | SpectralModel::ParityRabi { params: p, .. } => {
                    out.push(check_form_consistency(&p, cfg));
                }
            }
        }
        ValidationTarget::Oracle(m) => {
            out.push(check_oracle_certified(m));
            match m {
                OracleModel::ModifiedRabi(p) => out.push(check_modified_rabi(p)),
                OracleModel::Jc(_) => out.push(check_jc(m)),
                OracleModel::GenRabi(p) if p.theta == 0.0 => {
                    let rabi = RabiParams {
                        kappa: p.kappa,
                        delta: p.delta,
                        omega: p.omega,
                    };
                    let a = oracle_spectrum(m, 10, ORACLE_TOL);
                    let b = oracle_spectrum(&OracleModel::Rabi(rabi), 10, ORACLE_TOL);
                    let passed = matches!((&a, &b), (Ok(a), Ok(b)) if a
                        .eigenvalues
                        .iter()
                        .zip(&b.eigenvalues)
                        .all(|(x, y)| (x - y).abs() <= 1e-8));
                    out.push(CheckOutcome::new(
                        "gen-rabi-zero-bias",
                        passed,
                        "theta = 0 reduces to Rabi",
                    ));
                }
                _ => {}
            }
        }
    }
    out
}
