//! Hecke operators on q-expansions and their matrices in the Miller basis.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use super::{miller_basis, QExpansion};
use crate::error::{domain, precision, Result};

/// Dense square matrix over `Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: Vec<Vec<BigRational>>,
}

impl RationalMatrix {
    pub fn new(rows: Vec<Vec<BigRational>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self { rows }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                    .collect()
            })
            .collect();
        Self { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim();
        Self {
            rows: (0..n).map(|i| (0..n).map(|j| self.rows[j][i].clone()).collect()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.dim();
        assert_eq!(n, other.dim());
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(BigRational::zero(), |acc, l| {
                            acc + &self.rows[i][l] * &other.rows[l][j]
                        })
                    })
                    .collect()
            })
            .collect();
        Self { rows }
    }

    pub fn trace(&self) -> BigRational {
        (0..self.dim()).fold(BigRational::zero(), |acc, i| acc + &self.rows[i][i])
    }

    /// Exact determinant by Gaussian elimination over `Q`.
    pub fn det(&self) -> BigRational {
        let n = self.dim();
        let mut a = self.rows.clone();
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return BigRational::zero();
            };
            if p != col {
                a.swap(p, col);
                det = -det;
            }
            let pivot = a[col][col].clone();
            det *= &pivot;
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = &a[r][col] / &pivot;
                for c in col..n {
                    let t = &f * &a[col][c];
                    a[r][c] -= t;
                }
            }
        }
        det
    }

    /// Minor with row `i` and column `j` removed.
    pub fn minor(&self, i: usize, j: usize) -> Self {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .filter(|&(r, _)| r != i)
            .map(|(_, row)| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        Self { rows }
    }

    /// Monic characteristic polynomial `det(xI − A)`, coefficients from the
    /// constant term up (Faddeev–LeVerrier).
    pub fn charpoly(&self) -> Vec<BigRational> {
        let n = self.dim();
        let mut coeffs = vec![BigRational::zero(); n + 1];
        coeffs[n] = BigRational::one();
        let mut m = Self { rows: vec![vec![BigRational::zero(); n]; n] };
        for k in 1..=n {
            let mut next = self.mul(&m);
            for i in 0..n {
                next.rows[i][i] += &coeffs[n - k + 1];
            }
            m = next;
            let am = self.mul(&m);
            coeffs[n - k] = -am.trace() / BigRational::from_integer(BigInt::from(k));
        }
        coeffs
    }
}

/// `T_n f` for `f` of weight `k`:
/// `b(m) = Σ_{δ | gcd(m, n)} δ^{k−1} a(mn/δ²)`.
///
/// The result keeps the coefficients `0 ≤ m` with `mn < prec(f)`.
pub fn hecke_operator(f: &QExpansion, n: u64) -> Result<QExpansion> {
    if n == 0 {
        return domain("Hecke operator index must be positive");
    }
    if f.prec() == 0 {
        return precision("empty q-expansion");
    }
    let k = f.weight();
    if k == 0 {
        return domain("Hecke operators need positive weight");
    }
    let out_prec = (f.prec() as u64 - 1) / n + 1;
    let mut coeffs = Vec::with_capacity(out_prec as usize);
    for m in 0..out_prec {
        let g = if m == 0 { n } else { m.gcd(&n) };
        let mut acc = BigRational::zero();
        for d in (1..=g).filter(|d| g % d == 0) {
            let idx = (m * n / (d * d)) as usize;
            let a = f.coeff(idx);
            if a.is_zero() {
                continue;
            }
            let weight = BigRational::from_integer(Pow::pow(BigInt::from(d), k - 1));
            acc += weight * a;
        }
        coeffs.push(acc);
    }
    Ok(QExpansion::new(k, coeffs))
}

/// Matrix of `T_n` on `S_k` in the Miller basis `g_1…g_d`: entry `(i, j)`
/// is the coefficient of `q^{j+1}` in `T_n g_{i+1}`. Needs
/// `prec ≥ n·d + 1`.
pub fn hecke_matrix(k: u32, n: u64, prec: usize) -> Result<RationalMatrix> {
    if n == 0 {
        return domain("Hecke operator index must be positive");
    }
    let d = super::dim_cusp(k)?;
    let needed = n as usize * d + 1;
    if prec < needed {
        return precision(format!(
            "T_{n} on weight {k} needs prec >= {needed}, got {prec}"
        ));
    }
    hecke_matrix_on_basis(&miller_basis(k, prec)?, n)
}

/// `T_n` on the span of an echelon basis `g_i = q^i + O(q^{d+1})`; the
/// caller guarantees `prec ≥ n·d + 1`.
pub(crate) fn hecke_matrix_on_basis(basis: &[QExpansion], n: u64) -> Result<RationalMatrix> {
    let d = basis.len();
    let mut rows = Vec::with_capacity(d);
    for g in basis {
        let image = hecke_operator(g, n)?;
        rows.push((1..=d).map(|j| image.coeff(j).clone()).collect());
    }
    Ok(RationalMatrix::new(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qexpansion::{delta, eisenstein};

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn delta_is_an_eigenform() {
        let d = delta(40);
        for n in [2u64, 3, 5, 7] {
            let t = hecke_operator(&d, n).unwrap();
            let lambda = d.coeff(n as usize).clone();
            assert_eq!(t, d.truncate(t.prec()).scale(&lambda));
        }
    }

    #[test]
    fn eisenstein_eigenvalue() {
        let e = eisenstein(4, 30).unwrap();
        let t = hecke_operator(&e, 2).unwrap();
        assert_eq!(t, e.truncate(t.prec()).scale(&q(9)));
    }

    #[test]
    fn weight_12_and_24_matrices() {
        let m = hecke_matrix(12, 2, 3).unwrap();
        assert_eq!(m.rows(), &[vec![q(-24)]]);
        let m = hecke_matrix(24, 2, 5).unwrap();
        assert_eq!(m.trace(), q(1080));
        assert_eq!(m.charpoly(), vec![q(-20468736), q(-1080), q(1)]);
        assert_eq!(hecke_matrix(12, 6, 7).unwrap().rows(), &[vec![q(-6048)]]);
        assert!(hecke_matrix(24, 2, 4).is_err());
        assert!(hecke_matrix(24, 0, 40).is_err());
    }

    #[test]
    fn hecke_operators_commute() {
        for k in [24u32, 28, 36] {
            let d = super::super::dim_cusp(k).unwrap();
            let t2 = hecke_matrix(k, 2, 6 * d + 1).unwrap();
            let t3 = hecke_matrix(k, 3, 6 * d + 1).unwrap();
            assert_eq!(t2.mul(&t3), t3.mul(&t2), "k = {k}");
            let t6 = hecke_matrix(k, 6, 6 * d + 1).unwrap();
            assert_eq!(t2.mul(&t3), t6, "k = {k}");
        }
    }

    #[test]
    fn charpoly_matches_determinant() {
        let m = hecke_matrix(36, 2, 10).unwrap();
        let p = m.charpoly();
        // p(0) = det(−M) = (−1)^d det M
        let d = m.dim() as i32;
        assert_eq!(p[0], m.det() * q((-1i64).pow(d as u32)));
        assert_eq!(p[d as usize - 1], -m.trace());
    }
}
