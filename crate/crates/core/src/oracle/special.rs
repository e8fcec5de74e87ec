//! Closed-form and series oracles: the Laguerre dominant solution of the
//! DHO recurrence, Bessel functions by their ascending series, and plain
//! upward recursion for comparison.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::models::DhoParams;
use crate::recurrence::Recurrence;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecialError {
    #[error("bessel_series needs |x| <= 10 and order <= 60, got order {order}, x {x}")]
    BesselDomain { order: usize, x: f64 },
    #[error("argument {0} is not finite")]
    NonFinite(f64),
}

/// `sum_j binom(alpha, n-j) (-kappa^2)^j / j!`, i.e. `L_n^{(alpha-n)}(kappa^2)`.
fn laguerre_shifted(alpha: f64, k2: f64, n: usize) -> f64 {
    // binom(alpha, n) by the running product
    let mut binom = 1.0;
    for i in 0..n {
        binom *= (alpha - i as f64) / (i + 1) as f64;
    }
    let mut term_pow = 1.0; // (-k2)^j / j!
    let mut sum = 0.0;
    let mut comp = 0.0;
    for j in 0..=n {
        let m = n - j;
        let t = binom * term_pow;
        // Kahan summation; the terms alternate for small n
        let y = t - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        if m > 0 {
            let denom = alpha - (m - 1) as f64;
            if binom == 0.0 || denom == 0.0 {
                // integer alpha: the product passed through zero
                binom = binom_direct(alpha, m - 1);
            } else {
                binom *= m as f64 / denom;
            }
        }
        term_pow *= -k2 / (j + 1) as f64;
    }
    sum
}

fn binom_direct(alpha: f64, m: usize) -> f64 {
    (0..m).fold(1.0, |acc, i| acc * (alpha - i as f64) / (i + 1) as f64)
}

/// `c_n = kappa^(alpha-n) L_n^{(alpha-n)}(kappa^2)` with `alpha = x + kappa^2`,
/// the solution of the DHO recurrence fixed by `c_0 = kappa^alpha`.
///
/// For `kappa < 0` the convention `c_n(-kappa) = (-1)^n c_n(|kappa|)` is used,
/// which keeps `c_1/c_0 = x/kappa`.
pub fn laguerre_dominant(p: &DhoParams, x: f64, n: usize) -> f64 {
    let k = p.kappa.abs();
    let k2 = k * k;
    let alpha = x + k2;
    let v = k.powf(alpha - n as f64) * laguerre_shifted(alpha, k2, n);
    if p.kappa < 0.0 && n % 2 == 1 {
        -v
    } else {
        v
    }
}

/// `c_{n+1}/c_n` of [`laguerre_dominant`] without forming the power of kappa,
/// so large `n` does not overflow.
pub fn laguerre_dominant_ratio(p: &DhoParams, x: f64, n: usize) -> f64 {
    let k2 = p.kappa * p.kappa;
    let alpha = x + k2;
    laguerre_shifted(alpha, k2, n + 1) / laguerre_shifted(alpha, k2, n) / p.kappa
}

/// Forward recursion `c_{n+1} = -a_n c_n - b_n c_{n-1}` from `(c0, c1)`;
/// returns `c_0..=c_n_max`.
pub fn upward_recursion(rec: &Recurrence, x: f64, c0: f64, c1: f64, n_max: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(n_max + 1);
    c.push(c0);
    if n_max >= 1 {
        c.push(c1);
    }
    for n in 1..n_max {
        let next = -rec.a(n, x) * c[n] - rec.b(n, x) * c[n - 1];
        c.push(next);
    }
    c
}

/// DHO upward recursion seeded with `c_0 = kappa^alpha`, `c_1 = kappa^(alpha-1) x`.
pub fn dho_upward(p: &DhoParams, x: f64, n_max: usize) -> Vec<f64> {
    let rec = crate::models::dho_recurrence(p);
    upward_recursion(
        &rec,
        x,
        laguerre_dominant(p, x, 0),
        laguerre_dominant(p, x, 1),
        n_max,
    )
}

/// DHO upward recursion in exact rational arithmetic, seeded with
/// `c_0 = 1`, `c_1 = x/kappa` (the common factor `kappa^alpha` dropped).
///
/// In floating point the minimal solution at integer `alpha` is swamped by
/// rounding within a few dozen steps; exact arithmetic keeps it.
pub fn dho_upward_exact(kappa: &BigRational, x: &BigRational, n_max: usize) -> Vec<BigRational> {
    let mut c = Vec::with_capacity(n_max + 1);
    c.push(BigRational::one());
    if n_max >= 1 {
        c.push(x / kappa);
    }
    for n in 1..n_max {
        let np1 = BigRational::from_integer(BigInt::from(n + 1));
        let nn = BigRational::from_integer(BigInt::from(n));
        let a = (&nn - x) / (&np1 * kappa);
        let next = -(a * &c[n]) - &c[n - 1] / &np1;
        c.push(next);
    }
    c
}

/// `c_{n+1}/c_n` of an exact sequence, as f64.
pub fn exact_ratio(c: &[BigRational], n: usize) -> f64 {
    if c[n].is_zero() {
        return f64::INFINITY;
    }
    (&c[n + 1] / &c[n]).to_f64().unwrap_or(f64::NAN)
}

/// `J_order(x)` from the ascending series, summed in exact rational
/// arithmetic so cancellation at `|x|` near 10 costs nothing.
pub fn bessel_series(order: usize, x: f64) -> Result<f64, SpecialError> {
    if !x.is_finite() {
        return Err(SpecialError::NonFinite(x));
    }
    if x.abs() > 10.0 || order > 60 {
        return Err(SpecialError::BesselDomain { order, x });
    }
    if x == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    let half = BigRational::from_float(x / 2.0).expect("finite");
    let h2 = &half * &half;
    // (x/2)^order / order!
    let mut term = BigRational::one();
    for i in 1..=order {
        term = term * &half / BigRational::from_integer(BigInt::from(i));
    }
    let tiny = BigRational::new(BigInt::one(), BigInt::from(10).pow(30));
    let mut sum = BigRational::zero();
    let mut k = 0usize;
    loop {
        sum += &term;
        k += 1;
        let denom = BigInt::from(k) * BigInt::from(k + order);
        term = -(term * &h2) / BigRational::from_integer(denom);
        // terms decrease monotonically once k exceeds |x|/2
        if (k as f64) > x.abs() && term.abs() < tiny {
            break;
        }
    }
    Ok(sum.to_f64().unwrap_or(f64::NAN))
}

/// `J_0..=J_n_max` by the forward recursion `J_{n+1} = (2n/x) J_n - J_{n-1}`
/// in f64, seeded from the series.
pub fn bessel_upward(x: f64, n_max: usize) -> Result<Vec<f64>, SpecialError> {
    let fixture = crate::models::bessel_fixture(x).map_err(|_| SpecialError::NonFinite(x))?;
    let j0 = bessel_series(0, x)?;
    let j1 = bessel_series(1, x)?;
    Ok(upward_recursion(&fixture, x, j0, j1, n_max))
}
