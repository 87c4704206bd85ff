//! Distinct eigenvalues of the complementary-subspace graph, computed by a
//! closed form and, independently, from characters of the symmetric group.
//!
//! Eigenvalues are kept as exponents of `q` (possibly half-integral), never
//! as floats or radicals. Multiplicities are not computed.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{domain, Result};
use crate::exactnum::{ExactRational, PrimePower};

/// `twice_value / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInteger {
    pub twice_value: i64,
}

impl HalfInteger {
    pub fn from_int(n: i64) -> Self {
        HalfInteger { twice_value: 2 * n }
    }

    pub fn from_twice(twice_value: i64) -> Self {
        HalfInteger { twice_value }
    }

    pub fn is_integer(self) -> bool {
        self.twice_value % 2 == 0
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice_value / 2)
        } else {
            write!(f, "{}/2", self.twice_value)
        }
    }
}

/// The partition `[d - j, j]` of `d`; `j = 0` is the one-row partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwoRowPartition {
    d: u32,
    j: u32,
}

impl TwoRowPartition {
    pub fn new(d: u32, j: u32) -> Result<Self> {
        if 2 * j > d {
            return domain(format!("[{}, {j}] is not a partition", d as i64 - j as i64));
        }
        Ok(TwoRowPartition { d, j })
    }

    pub fn d(self) -> u32 {
        self.d
    }

    pub fn j(self) -> u32 {
        self.j
    }

    /// Nonzero parts, largest first.
    pub fn parts(self) -> Vec<u32> {
        if self.j == 0 {
            vec![self.d]
        } else {
            vec![self.d - self.j, self.j]
        }
    }

    /// Conjugate partition, as a general part list.
    pub fn conjugate(self) -> Vec<u32> {
        let parts = self.parts();
        (1..=parts[0])
            .map(|i| parts.iter().filter(|&&p| p >= i).count() as u32)
            .collect()
    }
}

impl fmt::Display for TwoRowPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts().iter().map(u32::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumResult {
    pub e1: u32,
    pub e2: u32,
    /// `m_0 > m_1 > ... > m_{e2}`; the eigenvalues are `±q^{m_j}`.
    pub exponents: Vec<HalfInteger>,
}

impl SpectrumResult {
    /// Eigenvalue magnitudes `q^{m_j}` rendered exactly, e.g. `16` or
    /// `2*sqrt(2)`.
    pub fn eigenvalue_strings(&self, q: PrimePower) -> Vec<String> {
        self.exponents.iter().map(|&m| power_string(q.q(), m)).collect()
    }

    /// The integers `q^{2 m_j}`, the distinct eigenvalues of `N N^T`.
    pub fn squared_eigenvalues(&self, q: PrimePower) -> Vec<BigInt> {
        self.exponents
            .iter()
            .map(|m| num_traits::pow(BigInt::from(q.q()), m.twice_value as usize))
            .collect()
    }
}

fn power_string(q: u64, m: HalfInteger) -> String {
    let whole = num_traits::pow(BigInt::from(q), (m.twice_value / 2) as usize);
    if m.is_integer() {
        return whole.to_string();
    }
    let root = (q as f64).sqrt().round() as u64;
    if root * root == q {
        (whole * root).to_string()
    } else if whole == BigInt::from(1) {
        format!("sqrt({q})")
    } else {
        format!("{whole}*sqrt({q})")
    }
}

fn check_order(e1: u32, e2: u32) -> Result<()> {
    if e2 == 0 || e2 > e1 {
        return domain(format!("spectrum needs e1 >= e2 >= 1, got ({e1}, {e2})"));
    }
    Ok(())
}

fn choose2(n: u32) -> i64 {
    let n = i64::from(n);
    n * (n - 1) / 2
}

/// Closed form `m_j = e1 e2 - j (d + 1 - j) / 2`.
pub fn eigen_exponents(e1: u32, e2: u32) -> Result<SpectrumResult> {
    check_order(e1, e2)?;
    let d = i64::from(e1 + e2);
    let exponents = (0..=i64::from(e2))
        .map(|j| HalfInteger::from_twice(2 * i64::from(e1 * e2) - j * (d + 1 - j)))
        .collect();
    Ok(SpectrumResult { e1, e2, exponents })
}

/// `(a(mu), a*(mu))` where `a = sum (i-1) mu_i` and `a* = sum C(mu_i, 2)`.
pub fn a_invariants(mu: TwoRowPartition) -> (i64, i64) {
    let parts = mu.parts();
    (a_of(&parts), parts.iter().map(|&p| choose2(p)).sum())
}

fn a_of(parts: &[u32]) -> i64 {
    parts
        .iter()
        .enumerate()
        .map(|(i, &p)| i as i64 * i64::from(p))
        .sum()
}

/// `a(mu*)`, computed from the conjugate partition; equals `a*(mu)`.
pub fn a_of_conjugate(mu: TwoRowPartition) -> i64 {
    a_of(&mu.conjugate())
}

/// `chi_mu(transposition) / chi_mu(1)`.
pub fn char_ratio(mu: TwoRowPartition) -> Result<ExactRational> {
    if mu.d < 2 {
        return domain("character ratio needs d >= 2");
    }
    let (a, a_star) = a_invariants(mu);
    Ok(BigRational::new(BigInt::from(a_star - a), BigInt::from(choose2(mu.d))))
}

/// `e_mu = C(d,2) (1 + chi_mu(r)/chi_mu(1)) = d^2 - d + j^2 - jd - j`.
pub fn exponent_e_mu(d: u32, j: u32) -> Result<i64> {
    let mu = TwoRowPartition::new(d, j)?;
    let (a, a_star) = a_invariants(mu);
    Ok(choose2(d) + a_star - a)
}

/// Length of the longest element of `Sym(e1) x Sym(e2)`.
pub fn longest_word_length(e1: u32, e2: u32) -> i64 {
    choose2(e1) + choose2(e2)
}

/// Constituents `[d - j, j]`, `j = 0..=e2`, of the permutation character on
/// the cosets of `Sym(e1) x Sym(e2)`.
pub fn pieri_constituents(e1: u32, e2: u32) -> Result<Vec<TwoRowPartition>> {
    check_order(e1, e2)?;
    (0..=e2).map(|j| TwoRowPartition::new(e1 + e2, j)).collect()
}

/// Exponents from the character route: `m_j = e_mu / 2 - l`.
pub fn eigen_exponents_via_characters(e1: u32, e2: u32) -> Result<SpectrumResult> {
    let ell = longest_word_length(e1, e2);
    let exponents = pieri_constituents(e1, e2)?
        .into_iter()
        .map(|mu| Ok(HalfInteger::from_twice(exponent_e_mu(mu.d, mu.j)? - 2 * ell)))
        .collect::<Result<_>>()?;
    Ok(SpectrumResult { e1, e2, exponents })
}
