//! Normalized Hecke eigenforms from the `T_2` matrix.
//!
//! The eigenvalues are isolated as dyadic rationals to `ROOT_BITS` bits and
//! the eigen-combination of the Miller basis is evaluated exactly at that
//! approximation, so the only rounding is the final conversion to `f64`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::hecke::hecke_matrix_on_basis;
use super::{dim_cusp, miller_basis, RationalMatrix};
use crate::error::{domain, Error, Result};

const ROOT_BITS: u32 = 320;

/// A normalized (`a_1 = 1`) Hecke eigenform in `S_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenform {
    weight: u32,
    a: Vec<f64>,
    coefficient_field_degree: usize,
}

impl Eigenform {
    pub fn new(weight: u32, a: Vec<f64>, coefficient_field_degree: usize) -> Self {
        assert!(coefficient_field_degree >= 1);
        Self { weight, a, coefficient_field_degree }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// `a_1, …, a_N`.
    pub fn coeffs(&self) -> &[f64] {
        &self.a
    }

    pub fn num_coeffs(&self) -> usize {
        self.a.len()
    }

    /// `a_n` for `1 ≤ n ≤ N`.
    pub fn a(&self, n: usize) -> f64 {
        assert!(n >= 1 && n <= self.a.len(), "coefficient index {n} out of range");
        self.a[n - 1]
    }

    /// Degree over `Q` of the field generated by the Hecke eigenvalues
    /// (detected from the `T_2` characteristic polynomial).
    pub fn coefficient_field_degree(&self) -> usize {
        self.coefficient_field_degree
    }
}

/// The `dim S_k` normalized eigenforms of weight `k`, with `n_coeffs`
/// coefficients each, ordered by increasing `a_2`.
pub fn eigenforms(k: u32, n_coeffs: usize) -> Result<Vec<Eigenform>> {
    if k % 2 != 0 || k < 12 {
        return domain(format!("eigenforms need even k >= 12, got {k}"));
    }
    if n_coeffs < 2 {
        return domain("need at least 2 coefficients");
    }
    let d = dim_cusp(k)?;
    if d == 0 {
        return Ok(Vec::new());
    }
    let basis = miller_basis(k, (2 * d + 1).max(n_coeffs + 1))?;
    let t2 = hecke_matrix_on_basis(&basis, 2)?;
    let p = t2.charpoly();
    if degree(&poly_gcd(&p, &derivative(&p))) > 0 {
        return Err(Error::Unsupported(format!(
            "T_2 has a repeated eigenvalue in weight {k}"
        )));
    }
    let roots = real_roots(&p, ROOT_BITS);
    if roots.len() != d {
        return Err(Error::Unsupported(format!(
            "T_2 characteristic polynomial in weight {k} is not totally real"
        )));
    }
    let field_degrees = factor_degrees(&p, &roots);
    let transpose = t2.transpose();

    let mut out = Vec::with_capacity(d);
    for (root, field_degree) in roots.iter().zip(field_degrees) {
        let v = left_eigenvector(&transpose, root);
        let a = (1..=n_coeffs)
            .map(|n| {
                let exact = basis
                    .iter()
                    .zip(&v)
                    .fold(BigRational::zero(), |acc, (g, vi)| acc + vi * g.coeff(n));
                to_f64(&exact)
            })
            .collect();
        out.push(Eigenform::new(k, a, field_degree));
    }
    Ok(out)
}

/// Kernel vector of `A − λI` (with `A = T^t`) normalized to `v_1 = 1`,
/// read off a column of the adjugate. The matrix is scaled to integers so
/// the minors are fraction-free determinants.
fn left_eigenvector(a: &RationalMatrix, lambda: &BigRational) -> Vec<BigRational> {
    use num_integer::Integer;
    let d = a.dim();
    if d == 1 {
        return vec![BigRational::one()];
    }
    let scale = a
        .rows()
        .iter()
        .flatten()
        .fold(lambda.denom().clone(), |l, x| l.lcm(x.denom()));
    let scale = BigRational::from_integer(scale);
    let shifted: Vec<Vec<BigInt>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let x = if i == j { a.get(i, j) - lambda } else { a.get(i, j).clone() };
                    (x * &scale).to_integer()
                })
                .collect()
        })
        .collect();
    // adj(B)[i][j] = (−1)^{i+j} det(minor(B, j, i)); all columns are ∝ the
    // kernel, so take the one an f64 pass says is largest
    let approx: Vec<Vec<f64>> = shifted
        .iter()
        .map(|r| r.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect())
        .collect();
    let best = (0..d)
        .max_by(|&x, &y| {
            let size = |j: usize| {
                (0..d)
                    .map(|i| det_f64(minor_f64(&approx, j, i)).abs())
                    .fold(0.0, f64::max)
            };
            size(x).total_cmp(&size(y))
        })
        .unwrap();
    let col: Vec<BigInt> = (0..d)
        .map(|i| {
            let m = bareiss_det(int_minor(&shifted, best, i));
            if (i + best) % 2 == 0 { m } else { -m }
        })
        .collect();
    let lead = BigRational::from_integer(col[0].clone());
    col.into_iter().map(|x| BigRational::from_integer(x) / &lead).collect()
}

fn int_minor(m: &[Vec<BigInt>], i: usize, j: usize) -> Vec<Vec<BigInt>> {
    m.iter()
        .enumerate()
        .filter(|&(r, _)| r != i)
        .map(|(_, row)| {
            row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect()
        })
        .collect()
}

fn minor_f64(m: &[Vec<f64>], i: usize, j: usize) -> Vec<Vec<f64>> {
    m.iter()
        .enumerate()
        .filter(|&(r, _)| r != i)
        .map(|(_, row)| {
            row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()
        })
        .collect()
}

fn det_f64(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for col in 0..n {
        let p = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        if a[p][col] == 0.0 {
            return 0.0;
        }
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    det
}

/// Fraction-free integer determinant.
fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if sign < 0 { -det } else { det }
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn degree(p: &[BigRational]) -> usize {
    p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
    p
}

fn derivative(p: &[BigRational]) -> Vec<BigRational> {
    if p.len() <= 1 {
        return vec![BigRational::zero()];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect()
}

/// Remainder of `a` divided by `b` (`b ≠ 0`).
fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let b = trim(b.to_vec());
    let db = b.len() - 1;
    let mut r = trim(a.to_vec());
    while r.len() > db && !r.iter().all(Zero::is_zero) {
        let shift = r.len() - 1 - db;
        let f = r.last().unwrap() / b.last().unwrap();
        for (i, c) in b.iter().enumerate() {
            let t = &f * c;
            r[shift + i] -= t;
        }
        r.pop();
        if r.is_empty() {
            r.push(BigRational::zero());
            break;
        }
        r = trim(r);
    }
    r
}

fn poly_gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !(b.len() == 1 && b[0].is_zero()) {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

/// All real roots of a squarefree polynomial, each to within `2^{−bits}`,
/// in increasing order.
fn real_roots(p: &[BigRational], bits: u32) -> Vec<BigRational> {
    let scale = BigInt::one() << bits;
    real_roots_scaled(&integer_poly(p), bits)
        .into_iter()
        .map(|m| BigRational::new(m, scale.clone()))
        .collect()
}

/// Clears denominators: an integer polynomial with the same roots.
fn integer_poly(p: &[BigRational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let p = trim(p.to_vec());
    let lcm = p.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    p.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect()
}

/// Sign of `p(m / 2^e)`, by homogenized Horner in integers.
fn sign_at(p: &[BigInt], m: &BigInt, e: u32) -> i8 {
    let deg = p.len() - 1;
    let mut acc = p[deg].clone();
    for j in 1..=deg {
        acc = acc * m + (&p[deg - j] << (e as usize * j));
    }
    match acc.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

/// Roots as integers `m` meaning `m / 2^e` (truncated toward the bracket's
/// lower end). Critical points, found recursively on the same grid,
/// separate consecutive roots; each bracket is then bisected.
fn real_roots_scaled(p: &[BigInt], e: u32) -> Vec<BigInt> {
    let deg = p.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = p[deg].abs();
    let cauchy = p[..deg].iter().map(|c| c.abs()).max().unwrap_or_default();
    let bound = (cauchy / &lead + 2u32) << e as usize;
    let derivative: Vec<BigInt> =
        p.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
    let mut marks = vec![-bound.clone()];
    marks.extend(real_roots_scaled(&derivative, e));
    marks.push(bound);

    let mut roots: Vec<BigInt> = Vec::new();
    for w in marks.windows(2) {
        let (mut lo, mut hi) = (w[0].clone(), w[1].clone());
        let (slo, shi) = (sign_at(p, &lo, e), sign_at(p, &hi, e));
        if slo == 0 {
            if roots.last() != Some(&lo) {
                roots.push(lo);
            }
            continue;
        }
        if shi == 0 {
            roots.push(hi);
            continue;
        }
        if slo == shi {
            continue;
        }
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) >> 1usize;
            let s = sign_at(p, &mid, e);
            if s == 0 {
                lo = mid;
                break;
            }
            if s == slo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(lo);
    }
    roots
}

/// For each root, the degree of the irreducible rational factor of `p`
/// (integral and monic) that vanishes there. Factors are found by rounding
/// the coefficients of `Π (x − r_i)` over root subsets and testing exact
/// divisibility.
fn factor_degrees(p: &[BigRational], roots: &[BigRational]) -> Vec<usize> {
    let d = roots.len();
    let mut degrees = vec![0usize; d];
    let mut remaining: Vec<usize> = (0..d).collect();
    for size in 1..=d {
        if remaining.is_empty() {
            break;
        }
        loop {
            let found = subsets(&remaining, size)
                .into_iter()
                .find(|s| is_rational_factor(p, roots, s));
            let Some(s) = found else { break };
            for &i in &s {
                degrees[i] = size;
            }
            remaining.retain(|i| !s.contains(i));
            if remaining.len() < size {
                break;
            }
        }
    }
    for i in remaining {
        degrees[i] = d;
    }
    degrees
}

fn subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    if items.len() < size {
        return Vec::new();
    }
    let mut out: Vec<Vec<usize>> = subsets(&items[1..], size - 1)
        .into_iter()
        .map(|mut s| {
            s.insert(0, items[0]);
            s
        })
        .collect();
    out.extend(subsets(&items[1..], size));
    out
}

fn is_rational_factor(p: &[BigRational], roots: &[BigRational], subset: &[usize]) -> bool {
    let mut q = vec![BigRational::one()];
    for &i in subset {
        let mut next = vec![BigRational::zero(); q.len() + 1];
        for (j, c) in q.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= c * &roots[i];
        }
        q = next;
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let rounded: Vec<BigRational> = q
        .iter()
        .map(|c| BigRational::from_integer((c + &half).floor().to_integer()))
        .collect();
    let r = poly_rem(p, &rounded);
    r.len() == 1 && r[0].is_zero()
}
