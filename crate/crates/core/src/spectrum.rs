//! Scanning `F(x)` across a window, splitting it into continuous branches,
//! and refining sign changes into classified roots.
//!
//! On each branch `F` runs monotonically between its poles. A grid interval
//! whose increment has the wrong sign, measured against the direction shared
//! by most intervals, therefore contains a pole; such intervals are bisected
//! until the pole is pinned and become branch boundaries. Zeros that sit
//! very close to a pole are recovered this way instead of being skipped
//! between two grid points.

use rayon::prelude::*;
use thiserror::Error;

use crate::ffunc::{eval_f_euler, FEvaluation, FStatus, FfuncError, SeriesConfig};
use crate::models::{
    dho_recurrence, parity_rabi_recurrence, rabi_schweber_recurrence, DhoParams, ModelError,
    Parity, ParityChoice, ParityRabiParams, RabiParams,
};
use crate::recurrence::Recurrence;

pub const MIN_POINTS: usize = 16;
/// Relative offset applied to grid points that land on an explicit pole.
pub const POLE_NUDGE: f64 = 1e-9;
/// Width, relative to the window, below which pole intervals are not split further.
pub const MIN_REFINE_WIDTH: f64 = 1e-10;
/// Rounds in which steep intervals (|dF/dx| > 10x median) are also bisected.
const STEEP_ROUNDS: usize = 3;
const STEEP_FACTOR: f64 = 10.0;
const MAX_ROUNDS: usize = 64;
/// Steps over which |F| must shrink for a bracket to count as a zero.
const SHRINK_STEPS: usize = 5;
/// Extra bisection steps allowed past `x_tol` while the residual test fails.
const EXTRA_STEPS: usize = 60;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("window must satisfy x_lo < x_hi with finite ends, got [{0}, {1}]")]
    InvalidWindow(f64, f64),
    #[error("need at least {MIN_POINTS} grid points, got {0}")]
    TooFewPoints(usize),
    #[error("invalid root settings: {0}")]
    InvalidRootConfig(&'static str),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ffunc(#[from] FfuncError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub xs: Vec<f64>,
    pub fs: Vec<FEvaluation>,
    pub branch_ids: Vec<usize>,
    pub cfg: SeriesConfig,
}

impl ScanResult {
    pub fn branch_count(&self) -> usize {
        self.branch_ids.last().map_or(0, |b| b + 1)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

fn evaluate(rec: &Recurrence, x: f64, cfg: &SeriesConfig) -> FEvaluation {
    eval_f_euler(rec, x, cfg).unwrap_or_else(|_| FEvaluation::pole())
}

fn evaluate_all(rec: &Recurrence, xs: &[f64], cfg: &SeriesConfig) -> Vec<FEvaluation> {
    xs.par_iter().map(|&x| evaluate(rec, x, cfg)).collect()
}

fn base_grid(rec: &Recurrence, lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let width = hi - lo;
    let step = width / (points - 1) as f64;
    (0..points)
        .map(|i| {
            let x = if i + 1 == points {
                hi
            } else {
                lo + i as f64 * step
            };
            if rec.is_explicit_pole(x) {
                // nudge inward at the upper end so the grid stays inside the window
                if i + 1 == points {
                    x - POLE_NUDGE * width
                } else {
                    x + POLE_NUDGE * width
                }
            } else {
                x
            }
        })
        .collect()
}

fn both_converged(fs: &[FEvaluation], i: usize) -> bool {
    fs[i].is_converged() && fs[i + 1].is_converged()
}

/// Increments below this are treated as flat and never flagged.
fn noise_floor(f0: f64, f1: f64) -> f64 {
    1e-12 * f0.abs().max(f1.abs()).max(1.0)
}

/// Sign of the increment shared by the majority of converged intervals.
fn majority_direction(fs: &[FEvaluation]) -> f64 {
    let mut up = 0usize;
    let mut down = 0usize;
    for i in 0..fs.len().saturating_sub(1) {
        if !both_converged(fs, i) {
            continue;
        }
        let d = fs[i + 1].value - fs[i].value;
        if d.abs() <= noise_floor(fs[i].value, fs[i + 1].value) {
            continue;
        }
        if d > 0.0 {
            up += 1;
        } else {
            down += 1;
        }
    }
    if up > down {
        1.0
    } else {
        -1.0
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn wrong_direction(fs: &[FEvaluation], i: usize, dir: f64) -> bool {
    if !both_converged(fs, i) {
        return false;
    }
    let d = fs[i + 1].value - fs[i].value;
    d.abs() > noise_floor(fs[i].value, fs[i + 1].value) && d.signum() != dir
}

/// Evaluates `F` on a uniform grid over `[x_lo, x_hi]`, bisects intervals
/// that hide a pole or a steep passage, and assigns branch ids.
pub fn scan(
    rec: &Recurrence,
    x_lo: f64,
    x_hi: f64,
    points: usize,
    cfg: &SeriesConfig,
) -> Result<ScanResult, SpectrumError> {
    if !(x_lo.is_finite() && x_hi.is_finite() && x_lo < x_hi) {
        return Err(SpectrumError::InvalidWindow(x_lo, x_hi));
    }
    if points < MIN_POINTS {
        return Err(SpectrumError::TooFewPoints(points));
    }
    cfg.validate()?;

    let mut xs = base_grid(rec, x_lo, x_hi, points);
    let mut fs = evaluate_all(rec, &xs, cfg);
    let dir = majority_direction(&fs);
    let min_width = MIN_REFINE_WIDTH * (x_hi - x_lo);
    let steep_slope = STEEP_FACTOR
        * median(
            (0..xs.len() - 1)
                .filter(|&i| both_converged(&fs, i))
                .map(|i| ((fs[i + 1].value - fs[i].value) / (xs[i + 1] - xs[i])).abs())
                .collect(),
        );

    for round in 0..MAX_ROUNDS {
        let flagged: Vec<usize> = (0..xs.len() - 1)
            .filter(|&i| {
                let h = xs[i + 1] - xs[i];
                if h <= min_width || !both_converged(&fs, i) {
                    return false;
                }
                if wrong_direction(&fs, i, dir) {
                    return true;
                }
                round < STEEP_ROUNDS && ((fs[i + 1].value - fs[i].value) / h).abs() > steep_slope
            })
            .collect();
        if flagged.is_empty() {
            break;
        }
        let mids: Vec<f64> = flagged
            .iter()
            .map(|&i| 0.5 * (xs[i] + xs[i + 1]))
            .filter(|&m| !rec.is_explicit_pole(m))
            .collect();
        let new_fs = evaluate_all(rec, &mids, cfg);
        let mut merged: Vec<(f64, FEvaluation)> = xs.into_iter().zip(fs).collect();
        merged.extend(mids.into_iter().zip(new_fs));
        merged.sort_by(|a, b| a.0.total_cmp(&b.0));
        merged.dedup_by(|a, b| a.0 == b.0);
        (xs, fs) = merged.into_iter().unzip();
    }

    let mut branch_ids = Vec::with_capacity(xs.len());
    let mut id = 0;
    branch_ids.push(0);
    for i in 0..xs.len() - 1 {
        let boundary = !both_converged(&fs, i)
            || wrong_direction(&fs, i, dir)
            || !rec.explicit_poles(xs[i], xs[i + 1]).is_empty();
        if boundary {
            id += 1;
        }
        branch_ids.push(id);
    }

    Ok(ScanResult {
        xs,
        fs,
        branch_ids,
        cfg: *cfg,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RootClass {
    Zero,
    PoleCrossing,
}

impl RootClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            RootClass::Zero => "Zero",
            RootClass::PoleCrossing => "PoleCrossing",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Root {
    pub x: f64,
    /// `E/omega` through the recurrence's energy map.
    pub energy: f64,
    /// `|F(x)|`
    pub residual: f64,
    pub bracket: (f64, f64),
    pub branch_id: usize,
    /// Sector of the parity-resolved recurrence the root came from.
    pub parity: Option<Parity>,
    pub classification: RootClass,
    pub note: Option<String>,
}

impl Root {
    pub fn is_zero(&self) -> bool {
        self.classification == RootClass::Zero
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootConfig {
    pub x_tol: f64,
    pub zero_tol_factor: f64,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self {
            x_tol: 1e-12,
            zero_tol_factor: 1e-6,
        }
    }
}

impl RootConfig {
    pub fn validate(&self) -> Result<(), SpectrumError> {
        if !(self.x_tol > 0.0) {
            return Err(SpectrumError::InvalidRootConfig("x_tol must be positive"));
        }
        if !(self.zero_tol_factor > 0.0) {
            return Err(SpectrumError::InvalidRootConfig(
                "zero_tol_factor must be positive",
            ));
        }
        Ok(())
    }
}

struct Refined {
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
    shrinking: bool,
    failed: bool,
    /// The bracket ran out of representable midpoints.
    at_resolution: bool,
}

/// Bisects a sign change of `F` on `[lo, hi]`.
fn bisect(
    rec: &Recurrence,
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
    cfg: &SeriesConfig,
    rcfg: &RootConfig,
    target: f64,
) -> Refined {
    let (mut lo, mut hi, mut f_lo, mut f_hi) = (lo, hi, f_lo, f_hi);
    // whether the replaced endpoint's |F| went down, most recent last
    let mut history: Vec<bool> = Vec::new();
    let mut retried = false;
    let mut extra = 0;
    let mut at_resolution = false;
    loop {
        let width = hi - lo;
        if width <= rcfg.x_tol {
            let best = f_lo.abs().min(f_hi.abs());
            if best <= target || extra >= EXTRA_STEPS {
                break;
            }
            extra += 1;
        }
        let mut mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            at_resolution = true;
            break;
        }
        let mut ev = evaluate(rec, mid, cfg);
        if ev.status == FStatus::PoleDetected {
            if retried {
                return Refined {
                    lo,
                    hi,
                    f_lo,
                    f_hi,
                    shrinking: false,
                    failed: true,
                    at_resolution: false,
                };
            }
            retried = true;
            mid = lo + 0.45 * width;
            ev = evaluate(rec, mid, cfg);
            if ev.status == FStatus::PoleDetected {
                return Refined {
                    lo,
                    hi,
                    f_lo,
                    f_hi,
                    shrinking: false,
                    failed: true,
                    at_resolution: false,
                };
            }
        }
        let fm = ev.value;
        if fm == 0.0 {
            return Refined {
                lo: mid,
                hi: mid,
                f_lo: 0.0,
                f_hi: 0.0,
                shrinking: true,
                failed: false,
                at_resolution: false,
            };
        }
        if fm.signum() == f_lo.signum() {
            history.push(fm.abs() < f_lo.abs());
            lo = mid;
            f_lo = fm;
        } else {
            history.push(fm.abs() < f_hi.abs());
            hi = mid;
            f_hi = fm;
        }
    }
    let shrinking =
        history.len() >= SHRINK_STEPS && history[history.len() - SHRINK_STEPS..].iter().all(|&d| d);
    Refined {
        lo,
        hi,
        f_lo,
        f_hi,
        shrinking,
        failed: false,
        at_resolution,
    }
}

/// Refines every sign change of converged `F` within a branch and
/// classifies it.
///
/// A bracket is a `Zero` when the final residual is at most
/// `zero_tol_factor * min(|F(lo)|, |F(hi)|)` of the scan bracket and `|F|`
/// shrank over the last bisection steps; anything else is a `PoleCrossing`.
/// When the bracket shrinks to adjacent floats first, the residual bound is
/// waived and the shrinkage test decides alone.
/// Roots within `10 x_tol` of an explicit pole are never reported as zeros.
pub fn find_roots(
    sr: &ScanResult,
    rec: &Recurrence,
    rcfg: &RootConfig,
) -> Result<Vec<Root>, SpectrumError> {
    rcfg.validate()?;
    let cfg = &sr.cfg;
    let candidates: Vec<usize> = (0..sr.xs.len().saturating_sub(1))
        .filter(|&i| {
            sr.branch_ids[i] == sr.branch_ids[i + 1]
                && both_converged(&sr.fs, i)
                && sr.fs[i].value.signum() != sr.fs[i + 1].value.signum()
                && sr.fs[i].value != 0.0
                && sr.fs[i + 1].value != 0.0
        })
        .collect();

    let mut roots: Vec<Root> = candidates
        .par_iter()
        .map(|&i| {
            let (lo, hi) = (sr.xs[i], sr.xs[i + 1]);
            let (f_lo, f_hi) = (sr.fs[i].value, sr.fs[i + 1].value);
            let target = rcfg.zero_tol_factor * f_lo.abs().min(f_hi.abs());
            let r = bisect(rec, lo, hi, f_lo, f_hi, cfg, rcfg, target);
            // the endpoint with the smaller |F| is the root estimate
            let (x, residual) = if r.f_lo.abs() <= r.f_hi.abs() {
                (r.lo, r.f_lo.abs())
            } else {
                (r.hi, r.f_hi.abs())
            };
            // at float resolution the residual cannot shrink further
            let resolved = residual <= target || r.at_resolution;
            let near_pole = !rec
                .explicit_poles(x - 10.0 * rcfg.x_tol, x + 10.0 * rcfg.x_tol)
                .is_empty();
            let mut note = None;
            let classification = if r.failed {
                note = Some("bisection hit a pole twice".to_string());
                RootClass::PoleCrossing
            } else if near_pole {
                note = Some("possible exceptional point".to_string());
                RootClass::PoleCrossing
            } else if resolved && r.shrinking {
                RootClass::Zero
            } else {
                RootClass::PoleCrossing
            };
            Root {
                x,
                energy: rec.energy(x),
                residual,
                bracket: (r.lo.min(x), r.hi.max(x)),
                branch_id: sr.branch_ids[i],
                parity: None,
                classification,
                note,
            }
        })
        .collect();

    // exact zeros on grid points
    for i in 0..sr.xs.len() {
        if sr.fs[i].is_converged() && sr.fs[i].value == 0.0 {
            let x = sr.xs[i];
            roots.push(Root {
                x,
                energy: rec.energy(x),
                residual: 0.0,
                bracket: (x, x),
                branch_id: sr.branch_ids[i],
                parity: None,
                classification: RootClass::Zero,
                note: None,
            });
        }
    }
    roots.sort_by(|a, b| a.x.total_cmp(&b.x));
    Ok(roots)
}

/// Models whose spectrum comes from the zeros of `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralModel {
    Dho(DhoParams),
    /// Rabi model in the displaced form with coefficient poles.
    Rabi(RabiParams),
    /// Rabi model split into the two parity sectors.
    ParityRabi {
        params: RabiParams,
        choice: ParityChoice,
    },
}

impl SpectralModel {
    pub fn tag(&self) -> &'static str {
        match self {
            SpectralModel::Dho(_) => "dho",
            SpectralModel::Rabi(_) => "rabi",
            SpectralModel::ParityRabi { .. } => "rabi-parity",
        }
    }

    /// Recurrences to scan, each with the parity sector it represents.
    pub fn recurrences(&self) -> Vec<(Recurrence, Option<Parity>)> {
        match *self {
            SpectralModel::Dho(p) => vec![(dho_recurrence(&p), None)],
            SpectralModel::Rabi(p) => vec![(rabi_schweber_recurrence(&p), None)],
            SpectralModel::ParityRabi { params, choice } => choice
                .sectors()
                .iter()
                .map(|&s| {
                    (
                        parity_rabi_recurrence(&ParityRabiParams::from_rabi(params, s)),
                        Some(s),
                    )
                })
                .collect(),
        }
    }

    /// Returns the model with one parameter replaced.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self, SpectrumError> {
        let bad = || {
            SpectrumError::InvalidSweep(format!("model {} has no parameter '{name}'", self.tag()))
        };
        Ok(match (*self, name) {
            (SpectralModel::Dho(p), "kappa") => SpectralModel::Dho(DhoParams::new(value, p.omega)?),
            (SpectralModel::Rabi(p), "kappa") => {
                SpectralModel::Rabi(RabiParams::new(value, p.delta, p.omega)?)
            }
            (SpectralModel::Rabi(p), "delta") => {
                SpectralModel::Rabi(RabiParams::new(p.kappa, value, p.omega)?)
            }
            (SpectralModel::ParityRabi { params, choice }, "kappa") => SpectralModel::ParityRabi {
                params: RabiParams::new(value, params.delta, params.omega)?,
                choice,
            },
            (SpectralModel::ParityRabi { params, choice }, "delta") => SpectralModel::ParityRabi {
                params: RabiParams::new(params.kappa, value, params.omega)?,
                choice,
            },
            _ => return Err(bad()),
        })
    }
}

/// Scan window and tolerances shared by [`resolve_spectrum`] and [`flow`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumConfig {
    pub x_lo: f64,
    pub x_hi: f64,
    pub points: usize,
    pub series: SeriesConfig,
    pub roots: RootConfig,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            x_lo: -1.0,
            x_hi: 6.0,
            points: 4000,
            series: SeriesConfig::default(),
            roots: RootConfig::default(),
        }
    }
}

/// All roots of the model in the x-window, in ascending energy, labeled by
/// parity sector where the model has one.
pub fn resolve_spectrum(
    model: &SpectralModel,
    cfg: &SpectrumConfig,
) -> Result<Vec<Root>, SpectrumError> {
    let mut all = Vec::new();
    for (rec, parity) in model.recurrences() {
        let sr = scan(&rec, cfg.x_lo, cfg.x_hi, cfg.points, &cfg.series)?;
        let mut roots = find_roots(&sr, &rec, &cfg.roots)?;
        for r in &mut roots {
            r.parity = parity;
        }
        all.extend(roots);
    }
    all.sort_by(|a, b| {
        a.energy.total_cmp(&b.energy).then_with(|| {
            a.parity
                .map(Parity::as_i8)
                .cmp(&b.parity.map(Parity::as_i8))
        })
    });
    Ok(all)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    /// Number of sweep values, endpoints included.
    pub steps: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let h = (self.hi - self.lo) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.hi
                } else {
                    self.lo + i as f64 * h
                }
            })
            .collect()
    }
}

impl std::str::FromStr for Sweep {
    type Err = SpectrumError;

    /// Parses `name:lo:hi:steps`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |why: &str| SpectrumError::InvalidSweep(format!("'{s}': {why}"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(bad("expected name:lo:hi:steps"));
        }
        let name = parts[0].trim().to_string();
        if !matches!(name.as_str(), "delta" | "kappa" | "theta") {
            return Err(bad("parameter must be delta, kappa or theta"));
        }
        let lo: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| bad("lo is not a number"))?;
        let hi: f64 = parts[2]
            .trim()
            .parse()
            .map_err(|_| bad("hi is not a number"))?;
        let steps: usize = parts[3]
            .trim()
            .parse()
            .map_err(|_| bad("steps is not a positive integer"))?;
        if steps == 0 {
            return Err(bad("steps must be at least 1"));
        }
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(bad("bounds must be finite"));
        }
        Ok(Sweep {
            name,
            lo,
            hi,
            steps,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub id: usize,
    /// `(sweep index, index into levels[sweep index])`, sweep index increasing.
    pub members: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    pub sweep_name: String,
    pub sweep_values: Vec<f64>,
    /// Zeros at each sweep value, ascending in energy.
    pub levels: Vec<Vec<Root>>,
    pub tracks: Vec<Track>,
}

impl FlowResult {
    /// Track id of every level, parallel to `levels`.
    pub fn track_ids(&self) -> Vec<Vec<usize>> {
        let mut ids: Vec<Vec<usize>> = self
            .levels
            .iter()
            .map(|l| vec![usize::MAX; l.len()])
            .collect();
        for t in &self.tracks {
            for &(s, j) in &t.members {
                ids[s][j] = t.id;
            }
        }
        ids
    }

    /// `(sweep value, energy)` points of a track.
    pub fn track_points(&self, id: usize) -> Vec<(f64, f64)> {
        self.tracks[id]
            .members
            .iter()
            .map(|&(s, j)| (self.sweep_values[s], self.levels[s][j].energy))
            .collect()
    }
}

/// Largest energy jump accepted between neighboring sweep values.
pub const DEFAULT_MAX_JUMP: f64 = 0.25;

/// Spectra along a parameter sweep, with levels chained into tracks.
pub fn flow(
    model: &SpectralModel,
    sweep: &Sweep,
    cfg: &SpectrumConfig,
    max_jump: f64,
) -> Result<FlowResult, SpectrumError> {
    let values = sweep.values();
    let models = values
        .iter()
        .map(|&v| model.with_param(&sweep.name, v))
        .collect::<Result<Vec<_>, _>>()?;
    let levels = models
        .par_iter()
        .map(|m| {
            resolve_spectrum(m, cfg)
                .map(|r| r.into_iter().filter(Root::is_zero).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>, _>>()?;
    let tracks = match_tracks(&levels, max_jump);
    Ok(FlowResult {
        sweep_name: sweep.name.clone(),
        sweep_values: values,
        levels,
        tracks,
    })
}

/// Greedy nearest-neighbor chaining. Pairs are taken in order of energy
/// distance, with a parity change costing an extra `max_jump`.
fn match_tracks(levels: &[Vec<Root>], max_jump: f64) -> Vec<Track> {
    let mut tracks: Vec<Track> = Vec::new();
    let mut open: Vec<(usize, usize)> = Vec::new(); // (track id, level index) at previous step
    for (s, roots) in levels.iter().enumerate() {
        let mut assigned = vec![None; roots.len()];
        if s > 0 {
            let prev = &levels[s - 1];
            let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
            for (oi, &(_, pj)) in open.iter().enumerate() {
                for (j, r) in roots.iter().enumerate() {
                    let de = (r.energy - prev[pj].energy).abs();
                    if de > max_jump {
                        continue;
                    }
                    let penalty = if r.parity == prev[pj].parity {
                        0.0
                    } else {
                        max_jump
                    };
                    pairs.push((de + penalty, oi, j));
                }
            }
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
            let mut used = vec![false; open.len()];
            for (_, oi, j) in pairs {
                if used[oi] || assigned[j].is_some() {
                    continue;
                }
                used[oi] = true;
                assigned[j] = Some(open[oi].0);
            }
        }
        let mut next_open = Vec::with_capacity(roots.len());
        for (j, a) in assigned.into_iter().enumerate() {
            let id = a.unwrap_or_else(|| {
                tracks.push(Track {
                    id: tracks.len(),
                    members: Vec::new(),
                });
                tracks.len() - 1
            });
            tracks[id].members.push((s, j));
            next_open.push((id, j));
        }
        open = next_open;
    }
    tracks
}
