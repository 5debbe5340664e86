//! Dense solves and determinants for the tiny matrices (p <= 6 or so) this
//! crate works with. Matrices are row-major `Vec<f64>`.

use alloc::vec;
use alloc::vec::Vec;

/// LU factorization with partial pivoting, solving `A x = b` in place.
///
/// Returns `None` when a pivot is exactly zero, which for our callers means
/// the system is numerically singular at f64 precision.
pub(crate) fn lu_solve(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    for col in 0..n {
        let mut pivot = col;
        let mut max = crate::math::abs(a[col * n + col]);
        for row in col + 1..n {
            let v = crate::math::abs(a[row * n + col]);
            if v > max {
                max = v;
                pivot = row;
            }
        }
        if max == 0.0 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let d = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / d;
            a[row * n + col] = 0.0;
            for k in col + 1..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row * n + k] * x[k];
        }
        x[row] = s / a[row * n + row];
    }
    Some(x)
}

/// Inverse of an `n x n` matrix via column-wise solves.
pub(crate) fn invert(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut inv = vec![0.0; n * n];
    for col in 0..n {
        let mut m = a.to_vec();
        let mut e = vec![0.0; n];
        e[col] = 1.0;
        let x = lu_solve(&mut m, &mut e, n)?;
        for row in 0..n {
            inv[row * n + col] = x[row];
        }
    }
    Some(inv)
}

/// Determinant together with a bound companion: the permanent of the
/// entrywise absolute value, computed by the same cofactor recursion.
///
/// The permanent dominates the sum of absolute term magnitudes, so
/// `C * eps * permanent` bounds the floating-point evaluation error of the
/// determinant for a small constant `C`.
pub(crate) fn det_with_permanent(m: &[f64], n: usize) -> (f64, f64) {
    debug_assert_eq!(m.len(), n * n);
    match n {
        0 => (1.0, 1.0),
        1 => (m[0], crate::math::abs(m[0])),
        2 => {
            let d = m[0] * m[3] - m[1] * m[2];
            let p = crate::math::abs(m[0] * m[3]) + crate::math::abs(m[1] * m[2]);
            (d, p)
        }
        _ => {
            let mut det = 0.0;
            let mut perm = 0.0;
            let mut minor = vec![0.0; (n - 1) * (n - 1)];
            for row in 0..n {
                let lead = m[row * n];
                let mut k = 0;
                for r in 0..n {
                    if r == row {
                        continue;
                    }
                    minor[k..k + n - 1].copy_from_slice(&m[r * n + 1..r * n + n]);
                    k += n - 1;
                }
                let (sub_d, sub_p) = det_with_permanent(&minor, n - 1);
                let term = lead * sub_d;
                det += if row % 2 == 0 { term } else { -term };
                perm += crate::math::abs(lead) * sub_p;
            }
            (det, perm)
        }
    }
}

/// Simple least-squares slope of `y` against `x`.
pub(crate) fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_identity() {
        let mut a = vec![1.0, 0.0, 0.0, 1.0];
        let mut b = vec![3.0, -2.0];
        let x = lu_solve(&mut a, &mut b, 2).unwrap();
        assert_eq!(x, vec![3.0, -2.0]);
    }

    #[test]
    fn solve_requires_pivoting() {
        // leading zero forces a row swap
        let mut a = vec![0.0, 1.0, 1.0, 0.0];
        let mut b = vec![5.0, 7.0];
        let x = lu_solve(&mut a, &mut b, 2).unwrap();
        assert_eq!(x, vec![7.0, 5.0]);
    }

    #[test]
    fn det_small_cases() {
        let (d, _) = det_with_permanent(&[2.0], 1);
        assert_eq!(d, 2.0);
        let (d, _) = det_with_permanent(&[1.0, 2.0, 3.0, 4.0], 2);
        assert_eq!(d, -2.0);
        let (d, _) =
            det_with_permanent(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0], 3);
        assert_eq!(d, 1.0);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let mut a = vec![1.0, 2.0, 2.0, 4.0];
        let mut b = vec![1.0, 2.0];
        assert!(lu_solve(&mut a, &mut b, 2).is_none());
    }
}
