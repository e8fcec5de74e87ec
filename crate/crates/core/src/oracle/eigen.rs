//! Dense real symmetric eigensolver.
//!
//! Householder reduction to tridiagonal form followed by the implicit QL
//! iteration with Wilkinson-style shifts, after the EISPACK routines
//! `tred2`/`tql2` (Bowdler, Martin, Reinsch and Wilkinson).

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("matrix storage has {len} entries, expected {n}x{n}")]
    Shape { n: usize, len: usize },
    #[error("QL iteration did not converge for eigenvalue {index}")]
    NoConvergence { index: usize },
}

#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// `vectors[i]` is the unit eigenvector of `values[i]`.
    pub vectors: Option<Vec<Vec<f64>>>,
}

const MAX_QL_SWEEPS: usize = 60;

/// Eigen-decomposition of the symmetric `n x n` row-major matrix `a`.
/// Only the lower triangle is read.
pub fn symmetric_eigen(
    a: &[f64],
    n: usize,
    want_vectors: bool,
) -> Result<SymmetricEigen, EigenError> {
    if a.len() != n * n {
        return Err(EigenError::Shape { n, len: a.len() });
    }
    if n == 0 {
        return Ok(SymmetricEigen {
            values: Vec::new(),
            vectors: want_vectors.then(Vec::new),
        });
    }
    let mut v = a.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, n, &mut d, &mut e);

    // rows of `w` are the accumulated columns of `v`
    let mut w = vec![0.0; n * n];
    if want_vectors {
        for i in 0..n {
            for j in 0..n {
                w[j * n + i] = v[i * n + j];
            }
        }
    }
    drop(v);
    tql2(&mut w, n, &mut d, &mut e, want_vectors)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = want_vectors.then(|| {
        order
            .iter()
            .map(|&i| w[i * n..(i + 1) * n].to_vec())
            .collect()
    });
    Ok(SymmetricEigen { values, vectors })
}

fn tred2(v: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64]) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for x in e.iter_mut().take(i) {
                *x = 0.0;
            }

            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    // accumulate transformations
    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

fn tql2(
    w: &mut [f64],
    n: usize,
    d: &mut [f64],
    e: &mut [f64],
    want_vectors: bool,
) -> Result<(), EigenError> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_SWEEPS {
                    return Err(EigenError::NoConvergence { index: l });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for x in d.iter_mut().take(n).skip(l + 2) {
                    *x -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    if want_vectors {
                        let (lo, hi) = w.split_at_mut((i + 1) * n);
                        let row_i = &mut lo[i * n..];
                        let row_next = &mut hi[..n];
                        for (vi, vn) in row_i.iter_mut().zip(row_next.iter_mut()) {
                            let t = *vn;
                            *vn = s * *vi + c * t;
                            *vi = c * *vi - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn matvec(a: &[f64], n: usize, x: &[f64]) -> Vec<f64> {
        (0..n)
            .map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum())
            .collect()
    }

    #[test]
    fn toeplitz_tridiagonal_spectrum() {
        // eigenvalues of tridiag(1, 2, 1) are 2 + 2 cos(k pi / (n+1))
        let n = 40;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 2.0;
            if i + 1 < n {
                a[i * n + i + 1] = 1.0;
                a[(i + 1) * n + i] = 1.0;
            }
        }
        let eig = symmetric_eigen(&a, n, false).unwrap();
        let mut want: Vec<f64> = (1..=n)
            .map(|k| 2.0 + 2.0 * (k as f64 * PI / (n as f64 + 1.0)).cos())
            .collect();
        want.sort_by(f64::total_cmp);
        for (g, w) in eig.values.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12, "{g} vs {w}");
        }
        assert!(eig.vectors.is_none());
    }

    #[test]
    fn eigenpairs_of_dense_matrix() {
        let n = 25;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = ((i * 7 + j * 13) % 11) as f64 / 3.0 - 1.5
                    + if i == j { i as f64 } else { 0.0 };
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        let eig = symmetric_eigen(&a, n, true).unwrap();
        let vecs = eig.vectors.unwrap();
        let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
        assert!((eig.values.iter().sum::<f64>() - trace).abs() < 1e-10);
        for (lam, v) in eig.values.iter().zip(&vecs) {
            let av = matvec(&a, n, v);
            let resid = av
                .iter()
                .zip(v)
                .map(|(x, y)| (x - lam * y).abs())
                .fold(0.0, f64::max);
            assert!(resid < 1e-11, "residual {resid}");
        }
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = vecs[i].iter().zip(&vecs[j]).map(|(x, y)| x * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
        }
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn degenerate_and_trivial_sizes() {
        let eig = symmetric_eigen(&[3.0], 1, true).unwrap();
        assert_eq!(eig.values, vec![3.0]);
        assert_eq!(eig.vectors.unwrap(), vec![vec![1.0]]);

        let eig = symmetric_eigen(&[2.0, 0.0, 0.0, 2.0], 2, true).unwrap();
        assert_eq!(eig.values, vec![2.0, 2.0]);

        assert!(symmetric_eigen(&[], 0, false).unwrap().values.is_empty());
        assert_eq!(
            symmetric_eigen(&[1.0, 2.0], 2, false).unwrap_err(),
            EigenError::Shape { n: 2, len: 2 }
        );
    }

    #[test]
    fn two_by_two_closed_form() {
        let a = [0.0, 0.7, 0.7, 1.0];
        let eig = symmetric_eigen(&a, 2, false).unwrap();
        let disc = (1.0f64 + 4.0 * 0.49).sqrt();
        assert!((eig.values[0] - (1.0 - disc) / 2.0).abs() < 1e-15);
        assert!((eig.values[1] - (1.0 + disc) / 2.0).abs() < 1e-15);
    }
}
