//! Independent ground truth for the F-based spectra.
//!
//! Truncated number-basis Hamiltonians are diagonalized densely; the cutoff
//! is doubled until the lowest levels stop moving. Eigenstates of models
//! with the Z2 symmetry are labeled by `exp(i pi J)`,
//! `J = a^dag a + (1 + sigma_3)/2`.
//!
//! Spin models use the basis index `2n + s` with `s = 0` for `sigma_3 = +1`
//! and `s = 1` for `sigma_3 = -1`. All matrices are in units of omega.

pub mod eigen;
pub mod special;

use num::Complex;
use thiserror::Error;

use crate::models::{DhoParams, GenRabiParams, JcParams, ModelError, Parity, RabiParams};
use eigen::{symmetric_eigen, EigenError};

pub use special::{
    bessel_series, bessel_upward, dho_upward, dho_upward_exact, exact_ratio, laguerre_dominant,
    laguerre_dominant_ratio, upward_recursion, SpecialError,
};

/// Initial Fock cutoff for certified spectra.
pub const DEFAULT_CUTOFF: usize = 200;
const MAX_DOUBLINGS: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("unknown model tag '{0}'")]
    UnknownModel(String),
    #[error("cutoff must be at least 2, got {0}")]
    CutoffTooSmall(usize),
    #[error("requested {k} levels from dimension {dimension}; need k <= dimension/4")]
    TooManyLevels { k: usize, dimension: usize },
    #[error(
        "lowest levels not stable after {doublings} cutoff doublings (max change {max_change:e})"
    )]
    NotConverged {
        doublings: usize,
        max_change: f64,
        previous: Vec<f64>,
        last: Vec<f64>,
    },
    #[error("phase rotation left an imaginary part {0:e}")]
    ComplexResidue(f64),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Models with a number-basis Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleModel {
    /// `a^dag a + kappa (a^dag + a)`, spinless.
    Dho(DhoParams),
    /// `a^dag a + kappa sigma_1 (a^dag + a) + Delta sigma_3`.
    Rabi(RabiParams),
    /// `a^dag a + i kappa sigma_1 (a^dag - a) + Delta sigma_3`.
    ModifiedRabi(RabiParams),
    /// `a^dag a + kappa sigma_3 (a^dag + a) + theta sigma_3 + Delta sigma_1`.
    GenRabi(GenRabiParams),
    /// `a^dag a + kappa (sigma_+ a + sigma_- a^dag) + Delta sigma_3`.
    Jc(JcParams),
}

impl OracleModel {
    pub fn tag(&self) -> &'static str {
        match self {
            OracleModel::Dho(_) => "dho",
            OracleModel::Rabi(_) => "rabi",
            OracleModel::ModifiedRabi(_) => "rabi-modified",
            OracleModel::GenRabi(_) => "gen-rabi",
            OracleModel::Jc(_) => "jc",
        }
    }

    /// Builds a model from its tag and dimensionless parameters
    /// (`kappa = lambda/omega`, `delta = mu/omega`, `theta` in units of omega).
    /// The parity-resolved Rabi tag maps to the full Rabi Hamiltonian.
    pub fn from_tag(
        tag: &str,
        kappa: f64,
        delta: f64,
        omega: f64,
        theta: f64,
    ) -> Result<Self, OracleError> {
        Ok(match tag {
            "dho" => OracleModel::Dho(DhoParams::new(kappa, omega)?),
            "rabi" | "rabi-parity" => OracleModel::Rabi(RabiParams::new(kappa, delta, omega)?),
            "rabi-modified" => OracleModel::ModifiedRabi(RabiParams::new(kappa, delta, omega)?),
            "gen-rabi" => OracleModel::GenRabi(GenRabiParams::new(kappa, delta, omega, theta)?),
            "jc" => OracleModel::Jc(JcParams::new(omega, 2.0 * delta * omega, kappa * omega)?),
            other => return Err(OracleError::UnknownModel(other.to_string())),
        })
    }

    fn has_spin(&self) -> bool {
        !matches!(self, OracleModel::Dho(_))
    }

    /// Whether `exp(i pi J)` commutes with the Hamiltonian.
    pub fn has_parity(&self) -> bool {
        matches!(
            self,
            OracleModel::Rabi(_) | OracleModel::ModifiedRabi(_) | OracleModel::Jc(_)
        )
    }

    pub fn dimension(&self, cutoff: usize) -> usize {
        if self.has_spin() {
            2 * cutoff
        } else {
            cutoff
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedHamiltonian {
    pub model: OracleModel,
    pub cutoff: usize,
    pub dimension: usize,
    /// Row-major `dimension x dimension`.
    pub entries: Vec<f64>,
}

impl TruncatedHamiltonian {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dimension + j]
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.dimension;
        (0..n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Largest `|i - j|` with a nonzero entry.
    pub fn bandwidth(&self) -> usize {
        let n = self.dimension;
        let mut bw = 0;
        for i in 0..n {
            for j in 0..n {
                if self.get(i, j) != 0.0 {
                    bw = bw.max(i.abs_diff(j));
                }
            }
        }
        bw
    }

    /// Diagonal of `exp(i pi J)` in the number basis, for models that
    /// conserve it.
    pub fn parity_diagonal(&self) -> Option<Vec<f64>> {
        if !self.model.has_parity() {
            return None;
        }
        Some(
            (0..self.dimension)
                .map(|i| {
                    let (n, s) = (i / 2, i % 2);
                    let j = n + usize::from(s == 0);
                    if j % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                })
                .collect(),
        )
    }

    pub fn rebuild(&self, cutoff: usize) -> Result<Self, OracleError> {
        build_hamiltonian(&self.model, cutoff)
    }
}

fn spin_sign(s: usize) -> f64 {
    if s == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `i^n`
fn phase(n: usize) -> Complex<f64> {
    match n % 4 {
        0 => Complex::new(1.0, 0.0),
        1 => Complex::new(0.0, 1.0),
        2 => Complex::new(-1.0, 0.0),
        _ => Complex::new(0.0, -1.0),
    }
}

/// Complex Hermitian matrix of the plane-wave coupled Rabi model,
/// row-major, before any basis rotation.
pub fn modified_rabi_complex(p: &RabiParams, cutoff: usize) -> Vec<Complex<f64>> {
    let dim = 2 * cutoff;
    let mut h = vec![Complex::new(0.0, 0.0); dim * dim];
    for n in 0..cutoff {
        for s in 0..2 {
            let i = 2 * n + s;
            h[i * dim + i] = Complex::new(n as f64 + p.delta * spin_sign(s), 0.0);
            if n + 1 < cutoff {
                let j = 2 * (n + 1) + (1 - s);
                let g = p.kappa * ((n + 1) as f64).sqrt();
                // <n+1, s'| i kappa sigma_1 a^dag |n, s> and its conjugate
                h[j * dim + i] = Complex::new(0.0, g);
                h[i * dim + j] = Complex::new(0.0, -g);
            }
        }
    }
    h
}

/// Truncated Hamiltonian with Fock states `0..cutoff`.
///
/// The plane-wave coupling `i(a^dag - a)` becomes real under the diagonal
/// rotation `|n> -> i^n |n>`; the rotation is applied to the complex matrix
/// and any leftover imaginary part is reported.
pub fn build_hamiltonian(
    model: &OracleModel,
    cutoff: usize,
) -> Result<TruncatedHamiltonian, OracleError> {
    if cutoff < 2 {
        return Err(OracleError::CutoffTooSmall(cutoff));
    }
    let dim = model.dimension(cutoff);
    let mut h = vec![0.0; dim * dim];
    let mut set = |i: usize, j: usize, v: f64| {
        h[i * dim + j] = v;
        h[j * dim + i] = v;
    };
    let sqrt = |n: usize| (n as f64).sqrt();

    match *model {
        OracleModel::Dho(p) => {
            for n in 0..cutoff {
                set(n, n, n as f64);
                if n + 1 < cutoff {
                    set(n, n + 1, p.kappa * sqrt(n + 1));
                }
            }
        }
        OracleModel::Rabi(p) => {
            for n in 0..cutoff {
                for s in 0..2 {
                    let i = 2 * n + s;
                    set(i, i, n as f64 + p.delta * spin_sign(s));
                    if n + 1 < cutoff {
                        set(i, 2 * (n + 1) + (1 - s), p.kappa * sqrt(n + 1));
                    }
                }
            }
        }
        OracleModel::ModifiedRabi(p) => {
            let hc = modified_rabi_complex(&p, cutoff);
            let mut worst: f64 = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    let z = phase(i / 2).conj() * hc[i * dim + j] * phase(j / 2);
                    worst = worst.max(z.im.abs());
                    h[i * dim + j] = z.re;
                }
            }
            if worst != 0.0 {
                return Err(OracleError::ComplexResidue(worst));
            }
        }
        OracleModel::GenRabi(p) => {
            for n in 0..cutoff {
                let (up, down) = (2 * n, 2 * n + 1);
                set(up, up, n as f64 + p.theta);
                set(down, down, n as f64 - p.theta);
                set(up, down, p.delta);
                if n + 1 < cutoff {
                    let g = p.kappa * sqrt(n + 1);
                    set(up, 2 * (n + 1), g);
                    set(down, 2 * (n + 1) + 1, -g);
                }
            }
        }
        OracleModel::Jc(p) => {
            let kappa = p.lambda / p.omega;
            let delta = p.mu() / p.omega;
            for n in 0..cutoff {
                for s in 0..2 {
                    let i = 2 * n + s;
                    set(i, i, n as f64 + delta * spin_sign(s));
                }
                // sigma_+ a: |n+1, down> -> |n, up>
                if n + 1 < cutoff {
                    set(2 * n, 2 * (n + 1) + 1, kappa * sqrt(n + 1));
                }
            }
        }
    }

    Ok(TruncatedHamiltonian {
        model: *model,
        cutoff,
        dimension: dim,
        entries: h,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSpectrum {
    pub model_tag: &'static str,
    /// Lowest `k` eigenvalues, ascending, in units of omega.
    pub eigenvalues: Vec<f64>,
    /// Eigenvalue of `exp(i pi J)`; `None` for models without the symmetry.
    pub parities: Vec<Option<Parity>>,
    /// `<P>` of the (parity-adapted) eigenvectors, when defined.
    pub parity_expectations: Vec<Option<f64>>,
    /// Length of the leading run of levels that moved less than `tol` under
    /// the final cutoff doubling.
    pub converged_count: usize,
    /// Cutoff of the returned spectrum.
    pub cutoff: usize,
}

fn max_change(a: &[f64], b: &[f64], k: usize) -> f64 {
    a.iter()
        .zip(b)
        .take(k)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Lowest `k` levels of `h`, certified by doubling the cutoff until they
/// move by less than `tol`.
pub fn eigen_lowest(
    h: &TruncatedHamiltonian,
    k: usize,
    tol: f64,
) -> Result<OracleSpectrum, OracleError> {
    if 4 * k > h.dimension {
        return Err(OracleError::TooManyLevels {
            k,
            dimension: h.dimension,
        });
    }
    let mut cur_values = symmetric_eigen(&h.entries, h.dimension, false)?.values;
    let mut cur_dim = h.dimension;
    let mut cutoff = h.cutoff;
    let mut last_change = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        cutoff *= 2;
        let next = h.rebuild(cutoff)?;
        let eig = symmetric_eigen(&next.entries, next.dimension, true)?;
        last_change = max_change(&cur_values, &eig.values, k);
        if last_change < tol {
            let window = cur_dim / 4;
            let converged_count = cur_values
                .iter()
                .zip(&eig.values)
                .take(window.max(k))
                .take_while(|(a, b)| (*a - *b).abs() < tol)
                .count();
            let vectors = eig.vectors.expect("vectors requested");
            let (parities, expectations) = label_parities(&next, &eig.values, &vectors, k)?;
            return Ok(OracleSpectrum {
                model_tag: h.model.tag(),
                eigenvalues: eig.values[..k].to_vec(),
                parities,
                parity_expectations: expectations,
                converged_count,
                cutoff,
            });
        }
        cur_values = eig.values;
        cur_dim = next.dimension;
    }
    let prev = build_hamiltonian(&h.model, cutoff / 2)?;
    let previous = symmetric_eigen(&prev.entries, prev.dimension, false)?.values;
    Err(OracleError::NotConverged {
        doublings: MAX_DOUBLINGS,
        max_change: last_change,
        previous: previous[..k].to_vec(),
        last: cur_values[..k].to_vec(),
    })
}

/// Convenience: certified lowest `k` levels starting from [`DEFAULT_CUTOFF`].
pub fn oracle_spectrum(
    model: &OracleModel,
    k: usize,
    tol: f64,
) -> Result<OracleSpectrum, OracleError> {
    let h = build_hamiltonian(model, DEFAULT_CUTOFF)?;
    eigen_lowest(&h, k, tol)
}

fn cluster_tol(lambda: f64) -> f64 {
    1e-8 * lambda.abs().max(1.0)
}

/// Labels the lowest `k` eigenvectors by `exp(i pi J)`. Inside a degenerate
/// cluster the symmetry operator is diagonalized on the cluster subspace so
/// each returned label belongs to a parity-pure combination.
fn label_parities(
    h: &TruncatedHamiltonian,
    values: &[f64],
    vectors: &[Vec<f64>],
    k: usize,
) -> Result<(Vec<Option<Parity>>, Vec<Option<f64>>), OracleError> {
    let Some(p) = h.parity_diagonal() else {
        return Ok((vec![None; k], vec![None; k]));
    };
    let mut parities = Vec::with_capacity(k);
    let mut expectations = Vec::with_capacity(k);
    let mut start = 0;
    while start < k {
        let mut end = start + 1;
        while end < values.len() && values[end] - values[end - 1] < cluster_tol(values[end]) {
            end += 1;
        }
        let size = end - start;
        let mut m = vec![0.0; size * size];
        for a in 0..size {
            for b in 0..=a {
                let v = vectors[start + a]
                    .iter()
                    .zip(&vectors[start + b])
                    .zip(&p)
                    .map(|((x, y), s)| x * y * s)
                    .sum::<f64>();
                m[a * size + b] = v;
                m[b * size + a] = v;
            }
        }
        let local = symmetric_eigen(&m, size, false)?;
        for &ev in &local.values {
            if parities.len() < k {
                parities.push(Some(Parity::from_sign(ev)));
                expectations.push(Some(ev));
            }
        }
        start = end;
    }
    Ok((parities, expectations))
}
