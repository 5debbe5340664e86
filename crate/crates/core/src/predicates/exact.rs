//! Exact arbitrary-precision evaluation backing the filtered predicates.
//!
//! Every finite `f64` is a dyadic rational `m * 2^e`. Determinant signs are
//! decided over exact dyadics, so a sign of zero here means the underlying
//! real determinant is exactly zero.


use alloc::vec::Vec;

use num_bigint::{BigInt, Sign as BigSign};

use super::Sign;

/// Exact dyadic rational `mant * 2^exp`.
#[derive(Debug, Clone)]
pub(crate) struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub(crate) fn zero() -> Self {
        Dyadic { mant: BigInt::from(0), exp: 0 }
    }

    /// Exact decomposition of a finite `f64`.
    pub(crate) fn from_f64(x: f64) -> Self {
        debug_assert!(x.is_finite());
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant_u, exp) = if biased == 0 {
            (frac, -1074) // subnormal
        } else {
            (frac | (1 << 52), biased - 1075)
        };
        let mut mant = BigInt::from(mant_u);
        if negative {
            mant = -mant;
        }
        Dyadic { mant, exp }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.mant.sign() == BigSign::NoSign
    }

    pub(crate) fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add_signed(other, true)
    }

    pub(crate) fn add(&self, other: &Dyadic) -> Dyadic {
        self.add_signed(other, false)
    }

    fn add_signed(&self, other: &Dyadic, negate_other: bool) -> Dyadic {
        let other_mant = if negate_other { -other.mant.clone() } else { other.mant.clone() };
        if self.is_zero() {
            return Dyadic { mant: other_mant, exp: other.exp };
        }
        if other.mant.sign() == BigSign::NoSign {
            return self.clone();
        }
        if self.exp >= other.exp {
            let shifted = self.mant.clone() << (self.exp - other.exp) as u64;
            Dyadic { mant: shifted + other_mant, exp: other.exp }
        } else {
            let shifted = other_mant << (other.exp - self.exp) as u64;
            Dyadic { mant: self.mant.clone() + shifted, exp: self.exp }
        }
    }

    pub(crate) fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic { mant: &self.mant * &other.mant, exp: self.exp + other.exp }
    }

    pub(crate) fn sign(&self) -> Sign {
        big_sign(&self.mant)
    }
}

fn big_sign(x: &BigInt) -> Sign {
    match x.sign() {
        BigSign::Minus => Sign::Negative,
        BigSign::NoSign => Sign::Zero,
        BigSign::Plus => Sign::Positive,
    }
}

/// Scales a dyadic matrix onto a common power of two, yielding integers.
///
/// The scaling factor is a positive power of two applied to every entry, so
/// determinant signs and last-column cofactor signs are unchanged.
fn scale_to_integers(m: &[Dyadic]) -> Vec<BigInt> {
    let min_exp = m
        .iter()
        .filter(|d| !d.is_zero())
        .map(|d| d.exp)
        .min()
        .unwrap_or(0);
    m.iter()
        .map(|d| {
            if d.is_zero() {
                BigInt::from(0)
            } else {
                d.mant.clone() << (d.exp - min_exp) as u64
            }
        })
        .collect()
}

/// Exact integer determinant by cofactor expansion along the first column.
fn int_det(m: &[BigInt], n: usize) -> BigInt {
    debug_assert_eq!(m.len(), n * n);
    match n {
        0 => BigInt::from(1),
        1 => m[0].clone(),
        2 => &m[0] * &m[3] - &m[1] * &m[2],
        _ => {
            let mut det = BigInt::from(0);
            for row in 0..n {
                if m[row * n].sign() == BigSign::NoSign {
                    continue;
                }
                let mut minor = Vec::with_capacity((n - 1) * (n - 1));
                for r in 0..n {
                    if r == row {
                        continue;
                    }
                    minor.extend_from_slice(&m[r * n + 1..r * n + n]);
                }
                let term = &m[row * n] * int_det(&minor, n - 1);
                if row % 2 == 0 {
                    det += term;
                } else {
                    det -= term;
                }
            }
            det
        }
    }
}

/// Sign of the determinant of a dyadic matrix, decided exactly.
pub(crate) fn det_sign(m: &[Dyadic], n: usize) -> Sign {
    let ints = scale_to_integers(m);
    big_sign(&int_det(&ints, n))
}

/// Cofactor of entry `(row, n-1)`: the signed minor obtained by deleting
/// `row` and the last column.
fn last_column_cofactor(ints: &[BigInt], n: usize, row: usize) -> BigInt {
    let mut minor = Vec::with_capacity((n - 1) * (n - 1));
    for r in 0..n {
        if r == row {
            continue;
        }
        minor.extend_from_slice(&ints[r * n..r * n + n - 1]);
    }
    let det = int_det(&minor, n - 1);
    if (row + n - 1) % 2 == 0 {
        det
    } else {
        -det
    }
}

/// Resolves a tied lifted determinant by symbolic perturbation of the
/// paraboloid heights, ordered by global vertex index: index `g` receives
/// an infinitesimal lift `eps^(g+1)`, so the lowest index dominates.
///
/// `point_rows` pairs each matrix row carrying a height entry with the
/// global index of its point; `query` is the global index of the query
/// point, whose perturbation enters every height row with a negative sign.
/// The determinant is affine in the perturbations, and the query
/// coefficient equals the (nonzero) orientation determinant, so the sweep
/// always terminates with a nonzero sign.
pub(crate) fn perturbed_det_sign(
    m: &[Dyadic],
    n: usize,
    point_rows: &[(usize, usize)],
    query: usize,
) -> Sign {
    let ints = scale_to_integers(m);
    let base = int_det(&ints, n);
    if base.sign() != BigSign::NoSign {
        return big_sign(&base);
    }
    let mut candidates: Vec<(usize, Option<usize>)> =
        point_rows.iter().map(|&(row, id)| (id, Some(row))).collect();
    candidates.push((query, None));
    candidates.sort_unstable();
    let mut query_coeff: Option<BigInt> = None;
    for (_, row) in candidates {
        let coeff = match row {
            Some(r) => last_column_cofactor(&ints, n, r),
            None => {
                // -(sum of all height-row cofactors), computed lazily
                query_coeff
                    .take()
                    .unwrap_or_else(|| {
                        -point_rows
                            .iter()
                            .map(|&(r, _)| last_column_cofactor(&ints, n, r))
                            .sum::<BigInt>()
                    })
            }
        };
        let s = big_sign(&coeff);
        if s != Sign::Zero {
            return s;
        }
    }
    // Unreachable for valid input: the query coefficient is the simplex
    // orientation determinant, which callers have established is nonzero.
    Sign::Zero
}

/// Row of exact coordinate differences `a - b`.
pub(crate) fn diff_row(a: &[f64], b: &[f64]) -> Vec<Dyadic> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| Dyadic::from_f64(x).sub(&Dyadic::from_f64(y)))
        .collect()
}

/// Exact squared Euclidean distance as a dyadic.
pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> Dyadic {
    let mut acc = Dyadic::zero();
    for (&x, &y) in a.iter().zip(b) {
        let d = Dyadic::from_f64(x).sub(&Dyadic::from_f64(y));
        acc = acc.add(&d.mul(&d));
    }
    acc
}

/// Generalized cross product of the rows of a `(p-1) x p` dyadic matrix,
/// returned as integers after common scaling. Satisfies
/// `det[rows; cross] = ||cross||^2 > 0` for full-rank input.
pub(crate) fn cross_product(rows: &[Dyadic], p: usize) -> Vec<BigInt> {
    debug_assert_eq!(rows.len(), (p - 1) * p);
    let ints = scale_to_integers(rows);
    let mut out = Vec::with_capacity(p);
    for k in 0..p {
        let mut minor = Vec::with_capacity((p - 1) * (p - 1));
        for r in 0..p - 1 {
            for c in 0..p {
                if c == k {
                    continue;
                }
                minor.push(ints[r * p + c].clone());
            }
        }
        let det = int_det(&minor, p - 1);
        // expansion of det[rows; x] along the last row (index p, 1-based):
        // the coefficient of x_k carries sign (-1)^(p + k + 1) 0-based
        if (p + k + 1) % 2 == 0 {
            out.push(det);
        } else {
            out.push(-det);
        }
    }
    out
}

/// Wraps integers as dyadics with exponent zero (a positive uniform row
/// scaling, harmless for sign computations).
pub(crate) fn int_to_dyadic(v: &BigInt) -> Dyadic {
    Dyadic { mant: v.clone(), exp: 0 }
}

/// Rank of a dyadic matrix, decided exactly by fraction-free elimination.
pub(crate) fn rank(m: &[Dyadic], rows: usize, cols: usize) -> usize {
    let mut a = scale_to_integers(m);
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let pivot_row = (row..rows).find(|&r| a[r * cols + col].sign() != BigSign::NoSign);
        let Some(pr) = pivot_row else { continue };
        if pr != row {
            for c in 0..cols {
                a.swap(row * cols + c, pr * cols + c);
            }
        }
        let pivot = a[row * cols + col].clone();
        for r in row + 1..rows {
            let factor = a[r * cols + col].clone();
            if factor.sign() == BigSign::NoSign {
                continue;
            }
            for c in 0..cols {
                let v = &a[r * cols + c] * &pivot - &a[row * cols + c] * &factor;
                a[r * cols + c] = v;
            }
        }
        rank += 1;
        row += 1;
    }
    rank
}
