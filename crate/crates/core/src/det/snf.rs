use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Unimodular transforms with `M = U·D·V`; `U⁻¹` and `V⁻¹` are kept as well
/// (`D = U⁻¹·M·V⁻¹`).
#[derive(Clone, Debug, PartialEq)]
pub struct SnfTransforms {
    pub u: Vec<Vec<BigInt>>,
    pub u_inv: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
    pub v_inv: Vec<Vec<BigInt>>,
}

/// Elementary-divisor chain `d_1 | d_2 | … | d_k`, `k = min(rows, cols)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SnfResult {
    pub rows: usize,
    pub cols: usize,
    pub divisors: Vec<BigInt>,
    pub transforms: Option<SnfTransforms>,
}

/// `|Z^rows / M Z^cols|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuotientOrder {
    Finite(BigInt),
    Infinite,
}

impl std::fmt::Display for QuotientOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QuotientOrder::Finite(n) => write!(f, "{n}"),
            QuotientOrder::Infinite => f.write_str("infinite"),
        }
    }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

/// Working state: `D = P·M·Q` with `P`, `Q` unimodular and their inverses.
struct Reducer {
    a: Vec<Vec<BigInt>>,
    p: Vec<Vec<BigInt>>,
    p_inv: Vec<Vec<BigInt>>,
    q: Vec<Vec<BigInt>>,
    q_inv: Vec<Vec<BigInt>>,
}

impl Reducer {
    /// `row_i ← row_i − k·row_j`.
    fn row_sub(&mut self, i: usize, j: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for m in [&mut self.a, &mut self.p] {
            let src = m[j].clone();
            for (x, y) in m[i].iter_mut().zip(&src) {
                *x -= k * y;
            }
        }
        // P⁻¹ ← P⁻¹·E⁻¹: col_j ← col_j + k·col_i
        for row in self.p_inv.iter_mut() {
            let add = k * &row[i];
            row[j] += add;
        }
    }

    fn row_swap(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.p.swap(i, j);
        for row in self.p_inv.iter_mut() {
            row.swap(i, j);
        }
    }

    fn row_negate(&mut self, i: usize) {
        for m in [&mut self.a, &mut self.p] {
            for x in m[i].iter_mut() {
                *x = -&*x;
            }
        }
        for row in self.p_inv.iter_mut() {
            row[i] = -&row[i];
        }
    }

    /// Rows `(t, i) ← [[x, y], [u, v]]·(t, i)` with `xv − yu = 1`.
    fn row_combine(&mut self, t: usize, i: usize, [x, y, u, v]: [&BigInt; 4]) {
        for m in [&mut self.a, &mut self.p] {
            let (rt, ri) = (m[t].clone(), m[i].clone());
            m[t] = rt.iter().zip(&ri).map(|(a, b)| x * a + y * b).collect();
            m[i] = rt.iter().zip(&ri).map(|(a, b)| u * a + v * b).collect();
        }
        for row in self.p_inv.iter_mut() {
            let (ct, ci) = (row[t].clone(), row[i].clone());
            row[t] = v * &ct - u * &ci;
            row[i] = x * &ci - y * &ct;
        }
    }

    /// Columns `(t, j) ← (t, j)·[[x, u], [y, v]]` with `xv − yu = 1`.
    fn col_combine(&mut self, t: usize, j: usize, [x, y, u, v]: [&BigInt; 4]) {
        for m in [&mut self.a, &mut self.q] {
            for row in m.iter_mut() {
                let (ct, cj) = (row[t].clone(), row[j].clone());
                row[t] = x * &ct + y * &cj;
                row[j] = u * &ct + v * &cj;
            }
        }
        let (rt, rj) = (self.q_inv[t].clone(), self.q_inv[j].clone());
        self.q_inv[t] = rt.iter().zip(&rj).map(|(a, b)| v * a - u * b).collect();
        self.q_inv[j] = rt.iter().zip(&rj).map(|(a, b)| x * b - y * a).collect();
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        for m in [&mut self.a, &mut self.q] {
            for row in m.iter_mut() {
                row.swap(i, j);
            }
        }
        self.q_inv.swap(i, j);
    }
}

/// Unimodular `[[x, y], [u, v]]` sending `(a, b)` to `(gcd, 0)`.
fn bezout(a: &BigInt, b: &BigInt) -> [BigInt; 4] {
    if b.is_multiple_of(a) {
        return [BigInt::one(), BigInt::zero(), -(b / a), BigInt::one()];
    }
    let e = a.extended_gcd(b);
    [e.x, e.y, -(b / &e.gcd), a / &e.gcd]
}

/// Smith normal form with unimodular transforms.
pub fn snf(matrix: &[Vec<BigInt>]) -> Result<SnfResult> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    if matrix.iter().any(|r| r.len() != cols) {
        return Err(Error::Domain("ragged integer matrix".into()));
    }
    let mut st = Reducer {
        a: matrix.to_vec(),
        p: identity(rows),
        p_inv: identity(rows),
        q: identity(cols),
        q_inv: identity(cols),
    };
    let k = rows.min(cols);
    for t in 0..k {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let Some((pi, pj)) = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !st.a[i][j].is_zero())
            .min_by(|&(i, j), &(x, y)| st.a[i][j].abs().cmp(&st.a[x][y].abs()))
        else {
            break;
        };
        st.row_swap(t, pi);
        st.col_swap(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if !st.a[i][t].is_zero() {
                    let [x, y, u, v] = bezout(&st.a[t][t], &st.a[i][t]);
                    st.row_combine(t, i, [&x, &y, &u, &v]);
                }
            }
            for j in t + 1..cols {
                if !st.a[t][j].is_zero() {
                    let [x, y, u, v] = bezout(&st.a[t][t], &st.a[t][j]);
                    st.col_combine(t, j, [&x, &y, &u, &v]);
                    dirty = true;
                }
            }
            if dirty && (t + 1..rows).any(|i| !st.a[i][t].is_zero()) {
                continue;
            }
            // Row and column are clear; enforce divisibility of the block.
            let pivot = st.a[t][t].clone();
            let offender = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !st.a[i][j].is_multiple_of(&pivot))
            });
            match offender {
                Some(i) => st.row_sub(t, i, &BigInt::from(-1)),
                None => break,
            }
        }
        if st.a[t][t].is_negative() {
            st.row_negate(t);
        }
    }
    let divisors = (0..k).map(|i| st.a[i][i].clone()).collect();
    Ok(SnfResult {
        rows,
        cols,
        divisors,
        transforms: Some(SnfTransforms {
            u: st.p_inv,
            u_inv: st.p,
            v: st.q_inv,
            v_inv: st.q,
        }),
    })
}

/// Convenience wrapper for machine-integer matrices.
pub fn snf_i64(matrix: &[Vec<i64>]) -> Result<SnfResult> {
    let big: Vec<Vec<BigInt>> = matrix
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    snf(&big)
}

/// `Π d_i`, or infinite when some `d_i = 0` or the matrix has more rows than
/// columns.
pub fn quotient_order(r: &SnfResult) -> QuotientOrder {
    if r.rows > r.cols || r.divisors.iter().any(Zero::is_zero) {
        QuotientOrder::Infinite
    } else {
        QuotientOrder::Finite(r.divisors.iter().product())
    }
}

#[cfg(test)]
fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}
