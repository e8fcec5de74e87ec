//! Model catalog: recurrences, exact levels, and parameter sets.
//!
//! All recurrences are written in the dimensionless variable `x` with
//! `kappa = lambda/omega` and `Delta = mu/omega`; the returned
//! [`Recurrence`] carries the map from `x` to `E/omega`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::recurrence::{AsymptoticProfile, EnergyMap, Recurrence};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("coupling kappa must be nonzero and finite, got {0}")]
    BadKappa(f64),
    #[error("frequency omega must be positive and finite, got {0}")]
    BadOmega(f64),
    #[error("parameter {name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("Bessel fixture argument must be nonzero, got {0}")]
    BadBesselArgument(f64),
    #[error("unknown parity '{0}' (expected plus, minus or both)")]
    UnknownParity(String),
}

fn check_kappa(kappa: f64) -> Result<(), ModelError> {
    if kappa == 0.0 || !kappa.is_finite() {
        return Err(ModelError::BadKappa(kappa));
    }
    Ok(())
}

fn check_omega(omega: f64) -> Result<(), ModelError> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(ModelError::BadOmega(omega));
    }
    Ok(())
}

fn check_finite(name: &'static str, value: f64) -> Result<(), ModelError> {
    if !value.is_finite() {
        return Err(ModelError::NonFinite { name, value });
    }
    Ok(())
}

/// Parity sector of the reduced Rabi recurrence: the sign in front of
/// `(-1)^n Delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Plus,
    Minus,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Plus => 1.0,
            Parity::Minus => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Parity::Plus => 1,
            Parity::Minus => -1,
        }
    }

    pub fn from_sign(s: f64) -> Self {
        if s >= 0.0 {
            Parity::Plus
        } else {
            Parity::Minus
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Plus => Parity::Minus,
            Parity::Minus => Parity::Plus,
        }
    }

    /// Eigenvalue of `exp(i pi J)`, `J = a^dag a + (1 + sigma_3)/2`, carried by
    /// states of this recurrence sector.
    ///
    /// The sector sign is the eigenvalue of `g sigma_1` in the spin-boson
    /// picture, while `exp(i pi J)` maps to `-g sigma_1` there.
    pub fn oracle_parity(self) -> Parity {
        self.flip()
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Plus => "+1",
            Parity::Minus => "-1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParityChoice {
    Plus,
    Minus,
    Both,
}

impl ParityChoice {
    pub fn sectors(self) -> &'static [Parity] {
        match self {
            ParityChoice::Plus => &[Parity::Plus],
            ParityChoice::Minus => &[Parity::Minus],
            ParityChoice::Both => &[Parity::Plus, Parity::Minus],
        }
    }
}

impl FromStr for ParityChoice {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plus" | "+" => Ok(ParityChoice::Plus),
            "minus" | "-" => Ok(ParityChoice::Minus),
            "both" => Ok(ParityChoice::Both),
            other => Err(ModelError::UnknownParity(other.to_string())),
        }
    }
}

/// Displaced harmonic oscillator, the `mu = 0` Rabi model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DhoParams {
    pub kappa: f64,
    pub omega: f64,
}

impl DhoParams {
    pub fn new(kappa: f64, omega: f64) -> Result<Self, ModelError> {
        check_kappa(kappa)?;
        check_omega(omega)?;
        Ok(Self { kappa, omega })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiParams {
    pub kappa: f64,
    pub delta: f64,
    pub omega: f64,
}

impl RabiParams {
    pub fn new(kappa: f64, delta: f64, omega: f64) -> Result<Self, ModelError> {
        check_kappa(kappa)?;
        check_finite("delta", delta)?;
        check_omega(omega)?;
        Ok(Self {
            kappa,
            delta,
            omega,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityRabiParams {
    pub kappa: f64,
    pub delta: f64,
    pub omega: f64,
    pub parity: Parity,
}

impl ParityRabiParams {
    pub fn new(kappa: f64, delta: f64, omega: f64, parity: Parity) -> Result<Self, ModelError> {
        RabiParams::new(kappa, delta, omega)?;
        Ok(Self {
            kappa,
            delta,
            omega,
            parity,
        })
    }

    pub fn from_rabi(p: RabiParams, parity: Parity) -> Self {
        Self {
            kappa: p.kappa,
            delta: p.delta,
            omega: p.omega,
            parity,
        }
    }
}

/// Spin-boson Rabi model with a `theta sigma_3` bias.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenRabiParams {
    pub kappa: f64,
    pub delta: f64,
    pub omega: f64,
    pub theta: f64,
}

impl GenRabiParams {
    pub fn new(kappa: f64, delta: f64, omega: f64, theta: f64) -> Result<Self, ModelError> {
        RabiParams::new(kappa, delta, omega)?;
        check_finite("theta", theta)?;
        Ok(Self {
            kappa,
            delta,
            omega,
            theta,
        })
    }
}

/// Jaynes-Cummings model in absolute units; `mu = omega0 / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JcParams {
    pub omega: f64,
    pub omega0: f64,
    pub lambda: f64,
}

impl JcParams {
    pub fn new(omega: f64, omega0: f64, lambda: f64) -> Result<Self, ModelError> {
        check_omega(omega)?;
        check_finite("omega0", omega0)?;
        check_finite("lambda", lambda)?;
        Ok(Self {
            omega,
            omega0,
            lambda,
        })
    }

    pub fn mu(&self) -> f64 {
        0.5 * self.omega0
    }
}

// Shared by the DHO and the parity-resolved Rabi recurrence so that the two
// coincide bit for bit at Delta = 0.
fn parity_a(n: usize, x: f64, kappa: f64, signed_delta: f64) -> f64 {
    let alt = if n % 2 == 0 {
        signed_delta
    } else {
        -signed_delta
    };
    (n as f64 - x + alt) / (kappa * (n as f64 + 1.0))
}

fn inverse_n_plus_one(n: usize, _x: f64) -> f64 {
    1.0 / (n as f64 + 1.0)
}

/// `c[n+1] + (n - x)/((n+1) kappa) c[n] + c[n-1]/(n+1) = 0`, `x = E/omega`.
pub fn dho_recurrence(p: &DhoParams) -> Recurrence {
    let kappa = p.kappa;
    Recurrence::new(
        format!("dho(kappa={kappa})"),
        move |n, x| parity_a(n, x, kappa, 0.0),
        inverse_n_plus_one,
        AsymptoticProfile::new(0.0, -1.0, 1.0 / kappa, 1.0),
    )
}

/// `l - kappa^2` for `l = 0..=l_max`, in units of omega.
pub fn dho_exact_levels(p: &DhoParams, l_max: usize) -> Vec<f64> {
    let shift = p.kappa * p.kappa;
    (0..=l_max).map(|l| l as f64 - shift).collect()
}

/// `f_n(x) = 2 kappa + (n - x - Delta^2/(n - x)) / (2 kappa)`.
pub fn schweber_f(n: usize, x: f64, kappa: f64, delta: f64) -> f64 {
    let d = n as f64 - x;
    let inner = if delta == 0.0 {
        d
    } else {
        d - delta * delta / d
    };
    2.0 * kappa + inner / (2.0 * kappa)
}

fn integer_poles(lo: f64, hi: f64) -> Vec<f64> {
    let first = lo.max(0.0).ceil();
    if !(hi >= first) {
        return Vec::new();
    }
    let count = (hi.floor() - first) as usize + 1;
    (0..count).map(|i| first + i as f64).collect()
}

/// Rabi recurrence in the displaced (Schweber) form,
/// `c[n+1] - f_n(x)/(n+1) c[n] + c[n-1]/(n+1) = 0` with `x = E/omega + kappa^2`.
///
/// The coefficients are singular at every nonnegative integer `x` when
/// `Delta != 0`.
pub fn rabi_schweber_recurrence(p: &RabiParams) -> Recurrence {
    let (kappa, delta) = (p.kappa, p.delta);
    let rec = Recurrence::new(
        format!("rabi(kappa={kappa},delta={delta})"),
        move |n, x| -schweber_f(n, x, kappa, delta) / (n as f64 + 1.0),
        inverse_n_plus_one,
        AsymptoticProfile::new(0.0, -1.0, -1.0 / (2.0 * kappa), 1.0),
    )
    .with_energy_map(EnergyMap::Shift(kappa * kappa));
    if delta != 0.0 {
        rec.with_poles(integer_poles)
    } else {
        rec
    }
}

/// Parity-resolved Rabi recurrence,
/// `c[n+1] + [n - x +- (-1)^n Delta]/(kappa (n+1)) c[n] + c[n-1]/(n+1) = 0`,
/// with `x = E/omega`.
pub fn parity_rabi_recurrence(p: &ParityRabiParams) -> Recurrence {
    let kappa = p.kappa;
    let signed_delta = p.parity.sign() * p.delta;
    Recurrence::new(
        format!(
            "rabi-parity(kappa={kappa},delta={},parity={})",
            p.delta, p.parity
        ),
        move |n, x| parity_a(n, x, kappa, signed_delta),
        inverse_n_plus_one,
        AsymptoticProfile::new(0.0, -1.0, 1.0 / kappa, 1.0),
    )
}

/// Closed-form Jaynes-Cummings levels: `-mu` and, for `n = 0..=n_max`,
/// `omega (n + 1/2) +- sqrt((mu - omega/2)^2 + lambda^2 (n + 1))`, ascending.
pub fn jc_exact_levels(p: &JcParams, n_max: usize) -> Vec<f64> {
    let mu = p.mu();
    let detune = mu - 0.5 * p.omega;
    let mut levels = Vec::with_capacity(2 * n_max + 3);
    levels.push(-mu);
    for n in 0..=n_max {
        let centre = p.omega * (n as f64 + 0.5);
        let split = (detune * detune + p.lambda * p.lambda * (n as f64 + 1.0)).sqrt();
        levels.push(centre - split);
        levels.push(centre + split);
    }
    levels.sort_by(f64::total_cmp);
    levels
}

/// `c[n+1] - (2n/arg) c[n] + c[n-1] = 0`, whose minimal solution is
/// `J_n(arg)`. The recurrence variable is ignored.
pub fn bessel_fixture(arg: f64) -> Result<Recurrence, ModelError> {
    if arg == 0.0 || !arg.is_finite() {
        return Err(ModelError::BadBesselArgument(arg));
    }
    Ok(Recurrence::new(
        format!("bessel(x={arg})"),
        move |n, _| -2.0 * n as f64 / arg,
        |_, _| 1.0,
        AsymptoticProfile::new(1.0, 0.0, -2.0 / arg, 1.0),
    ))
}
