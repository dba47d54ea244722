//! Exact truncated q-expansions of level-one modular forms.
//!
//! All series arithmetic is over `Q`; floating point only appears once
//! eigenforms are handed out as [`Eigenform`]s.

mod eigen;
mod hecke;

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{domain, precision, Result};
use crate::ntheory::{bernoulli, divisor_sigma};

pub use eigen::{eigenforms, Eigenform};
pub use hecke::{hecke_matrix, hecke_operator, RationalMatrix};

/// A q-series `c_0 + c_1 q + … + c_{prec−1} q^{prec−1} + O(q^prec)` of a
/// given weight.
#[derive(Clone, PartialEq, Eq)]
pub struct QExpansion {
    weight: u32,
    coeffs: Vec<BigRational>,
}

impl QExpansion {
    pub fn new(weight: u32, coeffs: Vec<BigRational>) -> Self {
        Self { weight, coeffs }
    }

    /// The constant series 1 of weight 0.
    pub fn one(prec: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); prec];
        if prec > 0 {
            coeffs[0] = BigRational::one();
        }
        Self::new(0, coeffs)
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Number of retained coefficients.
    pub fn prec(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `q^i`; panics if `i ≥ prec`.
    pub fn coeff(&self, i: usize) -> &BigRational {
        &self.coeffs[i]
    }

    pub fn is_cusp(&self) -> bool {
        self.coeffs.first().map_or(true, Zero::is_zero)
    }

    /// Index of the first non-zero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, prec: usize) -> Self {
        Self::new(self.weight, self.coeffs.iter().take(prec).cloned().collect())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.weight, self.coeffs.iter().map(|x| x * c).collect())
    }

    /// `self + c·other`; both must have the same weight. The result has the
    /// smaller of the two precisions.
    pub fn add_scaled(&self, c: &BigRational, other: &Self) -> Result<Self> {
        if self.weight != other.weight {
            return domain(format!(
                "cannot add forms of weights {} and {}",
                self.weight, other.weight
            ));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + c * b)
            .collect();
        Ok(Self::new(self.weight, coeffs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(&-BigRational::one(), other)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.prec());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl Mul for &QExpansion {
    type Output = QExpansion;

    /// Product truncated to the smaller precision.
    fn mul(self, rhs: &QExpansion) -> QExpansion {
        let prec = self.prec().min(rhs.prec());
        let mut out = vec![BigRational::zero(); prec];
        for (i, a) in self.coeffs.iter().take(prec).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(prec - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        QExpansion::new(self.weight + rhs.weight, out)
    }
}

impl fmt::Debug for QExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QExpansion(weight {}: ", self.weight)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                write!(f, "{c}·q^{i} + ")?;
            }
        }
        write!(f, "O(q^{}))", self.prec())
    }
}

/// `E_k = 1 − (2k/B_k) Σ σ_{k−1}(n) q^n` for even `k ≥ 4`.
pub fn eisenstein(k: u32, prec: usize) -> Result<QExpansion> {
    if k % 2 != 0 || k < 4 {
        return domain(format!("Eisenstein series need even k >= 4, got {k}"));
    }
    if prec == 0 {
        return domain("precision must be at least 1");
    }
    let factor = -BigRational::from_integer(BigInt::from(2 * k)) / bernoulli(k as u64)?;
    let mut coeffs = Vec::with_capacity(prec);
    coeffs.push(BigRational::one());
    for n in 1..prec as u64 {
        let sigma = BigRational::from_integer(BigInt::from(divisor_sigma(n, k - 1)));
        coeffs.push(&factor * sigma);
    }
    Ok(QExpansion::new(k, coeffs))
}

/// `Δ = (E_4³ − E_6²)/1728 = q − 24q² + 252q³ − …`.
pub fn delta(prec: usize) -> QExpansion {
    assert!(prec >= 1, "precision must be at least 1");
    let e4 = eisenstein(4, prec).unwrap();
    let e6 = eisenstein(6, prec).unwrap();
    let e4_cubed = e4.pow(3);
    let e6_squared = e6.pow(2);
    let c = BigRational::from_integer(BigInt::from(1728));
    let coeffs = e4_cubed
        .coeffs
        .iter()
        .zip(&e6_squared.coeffs)
        .map(|(a, b)| (a - b) / &c)
        .collect();
    QExpansion::new(12, coeffs)
}

/// `dim S_k(SL_2(Z))` for even `k ≥ 0`.
pub fn dim_cusp(k: u32) -> Result<usize> {
    if k % 2 != 0 {
        return domain(format!("odd weight {k} has no level-one forms"));
    }
    if k < 12 {
        return Ok(0);
    }
    let base = (k / 12) as usize;
    Ok(if k % 12 == 2 { base - 1 } else { base })
}

/// The reduced echelon basis `g_i = q^i + O(q^{d+1})`, `i = 1…d`, of
/// `S_k`, built from `Δ^j E_4^a E_6^b` and back-substitution.
pub fn miller_basis(k: u32, prec: usize) -> Result<Vec<QExpansion>> {
    let d = dim_cusp(k)?;
    if d == 0 {
        return Ok(Vec::new());
    }
    if prec <= d {
        return precision(format!(
            "Miller basis of weight {k} needs prec > {d}, got {prec}"
        ));
    }
    let e4 = eisenstein(4, prec)?;
    let e6 = eisenstein(6, prec)?;
    let mut e4_powers = vec![QExpansion::one(prec)];
    for _ in 0..k / 4 {
        e4_powers.push(&e4_powers[e4_powers.len() - 1] * &e4);
    }
    let c = BigRational::from_integer(BigInt::from(1728));
    let delta = e4_powers[3].sub(&(&e6 * &e6).truncate(prec)).map(|x| x.scale(&c.recip()));
    let delta = QExpansion::new(12, delta?.coeffs);
    let mut delta_power = delta.clone();
    let mut basis = Vec::with_capacity(d);
    for j in 1..=d as u32 {
        if j > 1 {
            delta_power = &delta_power * &delta;
        }
        // E_4^a E_6^b of weight k − 12j (never 2)
        let w = k - 12 * j;
        let monomial = if w % 4 == 0 {
            e4_powers[(w / 4) as usize].clone()
        } else {
            &e4_powers[((w - 6) / 4) as usize] * &e6
        };
        basis.push(&delta_power * &monomial);
    }
    // Δ^j·(…) = q^j + …: upper unitriangular in columns 1..d, clear above
    for i in (0..d).rev() {
        for r in 0..i {
            let c = basis[r].coeffs[i + 1].clone();
            if !c.is_zero() {
                basis[r] = basis[r].add_scaled(&-c, &basis[i])?;
            }
        }
    }
    Ok(basis)
}
