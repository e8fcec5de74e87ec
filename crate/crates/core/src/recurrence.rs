//! Three-term recurrences `c[n+1] + a(n,x) c[n] + b(n,x) c[n-1] = 0` and
//! their large-`n` classification.
//!
//! A [`Recurrence`] bundles the two coefficient functions with the power-law
//! profile `a(n) ~ a n^delta`, `b(n) ~ b n^upsilon`, the model-declared
//! coefficient poles in `x`, and the map from the recurrence variable `x` to
//! the physical energy `E/omega`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub type CoefFn = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;
pub type PoleFn = Arc<dyn Fn(f64, f64) -> Vec<f64> + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecurrenceError {
    #[error("asymptotically degenerate leading coefficient")]
    DegenerateLeadingCoefficient,
    #[error("tail seed undefined at level {level}; increase n")]
    UndefinedTailSeed { level: usize },
    #[error("tail ratio requested at n = 0; need n >= 1")]
    TailLevelTooLow,
}

/// Power-law profile of the recurrence coefficients for `n -> infinity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticProfile {
    pub delta: f64,
    pub upsilon: f64,
    pub a_coef: f64,
    pub b_coef: f64,
}

impl AsymptoticProfile {
    pub fn new(delta: f64, upsilon: f64, a_coef: f64, b_coef: f64) -> Self {
        Self {
            delta,
            upsilon,
            a_coef,
            b_coef,
        }
    }

    /// `delta - upsilon`, the decay exponent of the minimal solution ratio.
    pub fn tau(&self) -> f64 {
        self.delta - self.upsilon
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub two_delta_gt_upsilon: bool,
    pub tau: f64,
    /// `tau >= 1/2`
    pub tau_ok: bool,
    /// `-b_coef / a_coef`
    pub k: f64,
    pub bargmann_ok: bool,
    pub notes: String,
}

impl AdmissibilityReport {
    /// All three membership conditions hold.
    pub fn admissible(&self) -> bool {
        self.two_delta_gt_upsilon && self.tau_ok && self.bargmann_ok
    }
}

/// Checks the asymptotic conditions under which the minimal solution exists
/// and generates an entire function of bounded growth.
///
/// The result is advisory: recurrences failing a check can still be
/// evaluated, since the series for `F` only needs `tau > 0` and `m_0 != 0`.
pub fn classify(profile: &AsymptoticProfile) -> Result<AdmissibilityReport, RecurrenceError> {
    if profile.a_coef == 0.0 {
        return Err(RecurrenceError::DegenerateLeadingCoefficient);
    }
    let tau = profile.tau();
    let k = -profile.b_coef / profile.a_coef;
    let two_delta_gt_upsilon = 2.0 * profile.delta > profile.upsilon;
    let tau_ok = tau >= 0.5;
    let bargmann_ok = tau > 0.5 || (tau == 0.5 && k.abs() < 1.0);

    let mut notes = Vec::new();
    if !two_delta_gt_upsilon {
        notes.push(format!(
            "2*delta = {} does not exceed upsilon = {}",
            2.0 * profile.delta,
            profile.upsilon
        ));
    }
    if !tau_ok {
        notes.push(format!("tau = {tau} is below 1/2"));
    }
    if tau == 0.5 {
        // The bound |k| < 1 follows from |k tau^tau| < 1/sqrt(2) at tau = 1/2;
        // the source states the intermediate bound in a garbled form.
        if k.abs() < 1.0 {
            notes.push(format!("tau = 1/2 with |k| = {} < 1", k.abs()));
        } else {
            notes.push(format!("tau = 1/2 requires |k| < 1, got |k| = {}", k.abs()));
        }
    } else if !bargmann_ok {
        notes.push(
            "minimal solution does not decay fast enough for an entire function of bounded growth"
                .into(),
        );
    }
    if notes.is_empty() {
        notes.push("ok".into());
    }

    Ok(AdmissibilityReport {
        two_delta_gt_upsilon,
        tau,
        tau_ok,
        k,
        bargmann_ok,
        notes: notes.join("; "),
    })
}

/// How the recurrence variable `x` maps to the dimensionless energy `E/omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnergyMap {
    /// `E/omega = x`
    Identity,
    /// `E/omega = x - shift`
    Shift(f64),
}

impl EnergyMap {
    pub fn energy(&self, x: f64) -> f64 {
        match *self {
            EnergyMap::Identity => x,
            EnergyMap::Shift(s) => x - s,
        }
    }

    pub fn x_of_energy(&self, e: f64) -> f64 {
        match *self {
            EnergyMap::Identity => e,
            EnergyMap::Shift(s) => e + s,
        }
    }
}

/// A three-term recurrence with coefficient functions of `(n, x)`.
///
/// Coefficient functions must be pure; the struct is cheap to clone and safe
/// to share between threads.
#[derive(Clone)]
pub struct Recurrence {
    name: String,
    a: CoefFn,
    b: CoefFn,
    profile: AsymptoticProfile,
    poles: Option<PoleFn>,
    energy_map: EnergyMap,
}

impl fmt::Debug for Recurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Recurrence")
            .field("name", &self.name)
            .field("profile", &self.profile)
            .field("energy_map", &self.energy_map)
            .finish_non_exhaustive()
    }
}

impl Recurrence {
    pub fn new<A, B>(name: impl Into<String>, a: A, b: B, profile: AsymptoticProfile) -> Self
    where
        A: Fn(usize, f64) -> f64 + Send + Sync + 'static,
        B: Fn(usize, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            a: Arc::new(a),
            b: Arc::new(b),
            profile,
            poles: None,
            energy_map: EnergyMap::Identity,
        }
    }

    /// Declares the abscissas in `[lo, hi]` where some `a(n, .)` is singular.
    pub fn with_poles<P>(mut self, poles: P) -> Self
    where
        P: Fn(f64, f64) -> Vec<f64> + Send + Sync + 'static,
    {
        self.poles = Some(Arc::new(poles));
        self
    }

    pub fn with_energy_map(mut self, map: EnergyMap) -> Self {
        self.energy_map = map;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn a(&self, n: usize, x: f64) -> f64 {
        (self.a)(n, x)
    }

    #[inline]
    pub fn b(&self, n: usize, x: f64) -> f64 {
        (self.b)(n, x)
    }

    pub fn profile(&self) -> &AsymptoticProfile {
        &self.profile
    }

    pub fn energy_map(&self) -> EnergyMap {
        self.energy_map
    }

    pub fn energy(&self, x: f64) -> f64 {
        self.energy_map.energy(x)
    }

    /// Sorted coefficient poles inside `[lo, hi]`.
    pub fn explicit_poles(&self, lo: f64, hi: f64) -> Vec<f64> {
        match &self.poles {
            Some(p) => {
                let mut v = p(lo, hi);
                v.retain(|&q| q >= lo && q <= hi);
                v.sort_by(f64::total_cmp);
                v
            }
            None => Vec::new(),
        }
    }

    pub fn has_explicit_poles(&self) -> bool {
        self.poles.is_some()
    }

    pub fn is_explicit_pole(&self, x: f64) -> bool {
        !self.explicit_poles(x, x).is_empty()
    }

    /// Evaluates `a(n, x)` for `n` in `0..=n_max`.
    pub fn a_values(&self, x: f64, n_max: usize) -> Vec<f64> {
        (0..=n_max).map(|n| self.a(n, x)).collect()
    }
}

/// Leading large-`n` estimate of `m[n+1]/m[n]`, namely `-b(n+1,x)/a(n+1,x)`.
///
/// Used as the nonzero tail when a continued fraction is evaluated backward
/// from level `n`.
pub fn tail_ratio_estimate(rec: &Recurrence, n: usize, x: f64) -> Result<f64, RecurrenceError> {
    if n == 0 {
        return Err(RecurrenceError::TailLevelTooLow);
    }
    let a = rec.a(n + 1, x);
    if a == 0.0 || !a.is_finite() {
        return Err(RecurrenceError::UndefinedTailSeed { level: n + 1 });
    }
    Ok(-rec.b(n + 1, x) / a)
}
