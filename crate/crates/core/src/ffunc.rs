//! The transcendental function `F(x) = a_0 + r_0` whose zeros are the
//! regular spectrum.
//!
//! `r_0 = m_1/m_0` is the first ratio of the minimal solution of the
//! recurrence restricted to `n >= 1`. It is the continued fraction
//!
//! ```text
//! r_n = -b[n+1] / (a[n+1] - b[n+2] / (a[n+2] - b[n+3] / (a[n+3] - ...)))
//! ```
//!
//! and the Euler transform turns it into the series
//! `r_0 = sum_k rho_1 rho_2 ... rho_k` with
//!
//! ```text
//! rho_1 = -b_1/a_1,  u_1 = 1,
//! u_l   = 1 / (1 - u_{l-1} b_l / (a_l a_{l-1})),  rho_l = u_l - 1   (l >= 2)
//! ```
//!
//! whose `k`-th partial sum equals the `k`-th convergent of the fraction.
//! [`eval_f_euler`] is the production path; [`eval_r0_cf`] evaluates the same
//! fraction backward from a deep level and serves as the independent check.

use thiserror::Error;

use crate::recurrence::{tail_ratio_estimate, Recurrence, RecurrenceError};

/// Starting depth for backward continued-fraction evaluation.
pub const DEFAULT_CF_DEPTH: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FfuncError {
    #[error("coefficient pole at level {level}")]
    CoefficientPole { level: usize },
    #[error("x = {x} is a declared coefficient pole")]
    ExplicitPole { x: f64 },
    #[error("continued fraction hit a vanishing denominator at level {level}")]
    CfPole { level: usize },
    #[error("continued fraction did not converge: last two approximants {previous} and {last}")]
    CfNonConvergence { previous: f64, last: f64 },
    #[error("continued-fraction depth must be at least 2, got {0}")]
    DepthTooSmall(usize),
    #[error("invalid series configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Recurrence(#[from] RecurrenceError),
}

/// Truncation and guard settings for series and continued-fraction evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub consecutive_small: usize,
    pub max_terms: usize,
    pub pole_guard: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            abs_tol: 1e-300,
            consecutive_small: 3,
            max_terms: 20_000,
            pole_guard: 1e-12,
        }
    }
}

impl SeriesConfig {
    pub fn validate(&self) -> Result<(), FfuncError> {
        if !(self.rel_tol > 0.0) {
            return Err(FfuncError::InvalidConfig("rel_tol must be positive"));
        }
        if self.max_terms < 1 {
            return Err(FfuncError::InvalidConfig("max_terms must be at least 1"));
        }
        if self.consecutive_small < 1 {
            return Err(FfuncError::InvalidConfig(
                "consecutive_small must be at least 1",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FStatus {
    Converged,
    MaxTermsReached,
    PoleDetected,
}

impl FStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            FStatus::Converged => "Converged",
            FStatus::MaxTermsReached => "MaxTermsReached",
            FStatus::PoleDetected => "PoleDetected",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FEvaluation {
    pub value: f64,
    /// Number of product terms `rho_1 ... rho_k` summed.
    pub terms_used: usize,
    pub status: FStatus,
    /// Magnitude of the last product term added.
    pub last_term: f64,
}

impl FEvaluation {
    pub fn is_converged(&self) -> bool {
        self.status == FStatus::Converged
    }

    /// Placeholder for points where the series cannot be formed at all.
    pub(crate) fn pole() -> Self {
        Self {
            value: f64::NAN,
            terms_used: 0,
            status: FStatus::PoleDetected,
            last_term: f64::NAN,
        }
    }
}

fn coef_a(rec: &Recurrence, n: usize, x: f64) -> Result<f64, FfuncError> {
    let a = rec.a(n, x);
    if a == 0.0 || !a.is_finite() {
        return Err(FfuncError::CoefficientPole { level: n });
    }
    Ok(a)
}

/// Evaluates `F(x) = a_0 + sum_k rho_1 ... rho_k`.
///
/// Summation stops once `cfg.consecutive_small` successive products fall
/// below `rel_tol * |F| + abs_tol`. A near-vanishing `u_l` denominator stops
/// with [`FStatus::PoleDetected`], which signals `m_0 ~ 0`.
pub fn eval_f_euler(
    rec: &Recurrence,
    x: f64,
    cfg: &SeriesConfig,
) -> Result<FEvaluation, FfuncError> {
    cfg.validate()?;
    if rec.is_explicit_pole(x) {
        return Err(FfuncError::ExplicitPole { x });
    }
    let a0 = rec.a(0, x);
    if !a0.is_finite() {
        return Err(FfuncError::CoefficientPole { level: 0 });
    }
    let mut a_prev = coef_a(rec, 1, x)?;
    let mut prod = -rec.b(1, x) / a_prev;
    let mut value = a0 + prod;
    let mut u = 1.0;
    let small = |p: f64, v: f64| p.abs() <= cfg.rel_tol * v.abs() + cfg.abs_tol;
    let mut run = usize::from(small(prod, value));
    if run >= cfg.consecutive_small {
        return Ok(FEvaluation {
            value,
            terms_used: 1,
            status: FStatus::Converged,
            last_term: prod.abs(),
        });
    }

    for l in 2..=cfg.max_terms {
        let a_l = coef_a(rec, l, x)?;
        let denom = 1.0 - u * rec.b(l, x) / (a_l * a_prev);
        if denom.abs() < cfg.pole_guard {
            return Ok(FEvaluation {
                value,
                terms_used: l - 1,
                status: FStatus::PoleDetected,
                last_term: prod.abs(),
            });
        }
        u = 1.0 / denom;
        prod *= u - 1.0;
        value += prod;
        if small(prod, value) {
            run += 1;
            if run >= cfg.consecutive_small {
                return Ok(FEvaluation {
                    value,
                    terms_used: l,
                    status: FStatus::Converged,
                    last_term: prod.abs(),
                });
            }
        } else {
            run = 0;
        }
        a_prev = a_l;
    }

    Ok(FEvaluation {
        value,
        terms_used: cfg.max_terms,
        status: FStatus::MaxTermsReached,
        last_term: prod.abs(),
    })
}

/// Partial sums `S_1..S_k` of the Euler series for `r_0` (without `a_0`).
pub fn euler_partial_sums(rec: &Recurrence, x: f64, k: usize) -> Result<Vec<f64>, FfuncError> {
    let mut out = Vec::with_capacity(k);
    if k == 0 {
        return Ok(out);
    }
    let mut a_prev = coef_a(rec, 1, x)?;
    let mut prod = -rec.b(1, x) / a_prev;
    let mut sum = prod;
    out.push(sum);
    let mut u = 1.0;
    for l in 2..=k {
        let a_l = coef_a(rec, l, x)?;
        u = 1.0 / (1.0 - u * rec.b(l, x) / (a_l * a_prev));
        prod *= u - 1.0;
        sum += prod;
        out.push(sum);
        a_prev = a_l;
    }
    Ok(out)
}

/// The `k`-th convergent of the continued fraction for `r_0`, i.e. the
/// fraction truncated after `b_k/a_k` with zero tail.
pub fn cf_convergent(rec: &Recurrence, x: f64, k: usize) -> Result<f64, FfuncError> {
    if k == 0 {
        return Ok(0.0);
    }
    let mut r = 0.0;
    for n in (0..k).rev() {
        let den = rec.a(n + 1, x) + r;
        if den == 0.0 || !den.is_finite() {
            return Err(FfuncError::CfPole { level: n + 1 });
        }
        r = -rec.b(n + 1, x) / den;
    }
    Ok(r)
}

/// One backward sweep from `depth`, seeded with the tail estimate.
/// Returns `r_0..r_{keep-1}`.
fn backward_ratios(
    rec: &Recurrence,
    x: f64,
    depth: usize,
    keep: usize,
    pole_guard: f64,
) -> Result<Vec<f64>, FfuncError> {
    debug_assert!(keep <= depth);
    let mut out = vec![0.0; keep];
    let mut r = tail_ratio_estimate(rec, depth, x)?;
    for n in (0..depth).rev() {
        let a = rec.a(n + 1, x);
        if !a.is_finite() {
            return Err(FfuncError::CoefficientPole { level: n + 1 });
        }
        let den = a + r;
        if den == 0.0 || den.abs() < pole_guard * (a.abs() + r.abs()) {
            return Err(FfuncError::CfPole { level: n + 1 });
        }
        r = -rec.b(n + 1, x) / den;
        if n < keep {
            out[n] = r;
        }
    }
    Ok(out)
}

fn agree(prev: f64, cur: f64, cfg: &SeriesConfig) -> bool {
    (cur - prev).abs() <= cfg.rel_tol * cur.abs() + cfg.abs_tol
}

/// `r_0 = m_1/m_0` by backward continued-fraction evaluation.
///
/// Starts at `depth` and doubles until two successive approximants agree to
/// `cfg.rel_tol`; the depth cap is `max(cfg.max_terms, 2 * depth)`.
pub fn eval_r0_cf(
    rec: &Recurrence,
    x: f64,
    depth: usize,
    cfg: &SeriesConfig,
) -> Result<f64, FfuncError> {
    cfg.validate()?;
    if depth < 2 {
        return Err(FfuncError::DepthTooSmall(depth));
    }
    if rec.is_explicit_pole(x) {
        return Err(FfuncError::ExplicitPole { x });
    }
    let cap = cfg.max_terms.max(2 * depth);
    let mut d = depth;
    let mut prev = backward_ratios(rec, x, d, 1, cfg.pole_guard)?[0];
    loop {
        d *= 2;
        if d > cap {
            let last = backward_ratios(rec, x, cap, 1, cfg.pole_guard)?[0];
            if agree(prev, last, cfg) {
                return Ok(last);
            }
            return Err(FfuncError::CfNonConvergence {
                previous: prev,
                last,
            });
        }
        let cur = backward_ratios(rec, x, d, 1, cfg.pole_guard)?[0];
        if agree(prev, cur, cfg) {
            return Ok(cur);
        }
        prev = cur;
    }
}

/// `F(x)` through the backward continued fraction: `a_0 + r_0`.
pub fn eval_f_cf(rec: &Recurrence, x: f64, cfg: &SeriesConfig) -> Result<f64, FfuncError> {
    let r0 = eval_r0_cf(rec, x, DEFAULT_CF_DEPTH, cfg)?;
    let a0 = rec.a(0, x);
    if !a0.is_finite() {
        return Err(FfuncError::CoefficientPole { level: 0 });
    }
    Ok(a0 + r0)
}

/// Coefficients of the minimal solution normalized to `m_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalSolution {
    /// `m_0..m_N`
    pub m: Vec<f64>,
    /// `r_n = m_{n+1}/m_n` for `0 <= n < N`; stays meaningful after `m_n`
    /// underflows.
    pub ratios: Vec<f64>,
    /// `|m_{n+1} + a_n m_n + b_n m_{n-1}|` for `0 <= n < N`; row 0 is the
    /// boundary condition `|m_1 + a_0 m_0|`.
    pub residuals: Vec<f64>,
}

impl MinimalSolution {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Reconstructs `m_0..m_N` at an accepted root from backward
/// continued-fraction ratios.
pub fn minimal_solution(
    rec: &Recurrence,
    x_root: f64,
    n: usize,
    cfg: &SeriesConfig,
) -> Result<MinimalSolution, FfuncError> {
    cfg.validate()?;
    if n == 0 {
        return Ok(MinimalSolution {
            m: vec![1.0],
            ratios: Vec::new(),
            residuals: Vec::new(),
        });
    }
    let cap = cfg.max_terms.max(8 * n);
    let mut depth = (2 * n).max(64);
    let mut prev = backward_ratios(rec, x_root, depth, n, cfg.pole_guard)?;
    let ratios = loop {
        depth *= 2;
        let cur = backward_ratios(rec, x_root, depth, n, cfg.pole_guard)?;
        let stable = prev
            .iter()
            .zip(&cur)
            .all(|(p, c)| (c - p).abs() <= 1e-13 * c.abs() + cfg.abs_tol);
        if stable {
            break cur;
        }
        if depth >= cap {
            return Err(FfuncError::CfNonConvergence {
                previous: prev[0],
                last: cur[0],
            });
        }
        prev = cur;
    };

    let mut m = Vec::with_capacity(n + 1);
    m.push(1.0);
    for r in &ratios {
        let last = *m.last().unwrap();
        m.push(last * r);
    }
    let residuals = (0..n)
        .map(|k| {
            let lower = if k == 0 {
                0.0
            } else {
                rec.b(k, x_root) * m[k - 1]
            };
            (m[k + 1] + rec.a(k, x_root) * m[k] + lower).abs()
        })
        .collect();
    Ok(MinimalSolution {
        m,
        ratios,
        residuals,
    })
}
