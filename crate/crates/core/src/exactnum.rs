//! Exact arithmetic: q-analogs, classical group orders and closed-form
//! counts of non-degenerate subspaces.
//!
//! Everything here is arbitrary precision. Quantities such as `q^(e1*e2)`
//! leave 64-bit range quickly, and every downstream comparison is a strict
//! inequality that must be decided exactly.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{domain, Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator.
pub type ExactRational = BigRational;

/// A field order `q = p^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimePower {
    p: u64,
    k: u32,
    q: u64,
}

impl PrimePower {
    pub fn new(q: u64) -> Result<Self> {
        if q < 2 {
            return domain(format!("{q} is not a prime power"));
        }
        let p = smallest_prime_factor(q);
        let mut rest = q;
        let mut k = 0;
        while rest % p == 0 {
            rest /= p;
            k += 1;
        }
        if rest != 1 {
            return domain(format!("{q} is not a prime power"));
        }
        Ok(PrimePower { p, k, q })
    }

    pub fn p(self) -> u64 {
        self.p
    }

    pub fn k(self) -> u32 {
        self.k
    }

    pub fn q(self) -> u64 {
        self.q
    }

    /// The order of the quadratic extension, `q^2`.
    pub fn squared(self) -> PrimePower {
        PrimePower {
            p: self.p,
            k: 2 * self.k,
            q: self.q * self.q,
        }
    }

    /// All prime powers in `lo..=hi`, ascending.
    pub fn range(lo: u64, hi: u64) -> Vec<PrimePower> {
        (lo.max(2)..=hi).filter_map(|q| PrimePower::new(q).ok()).collect()
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.q)
    }
}

fn smallest_prime_factor(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 2;
    }
    n
}

/// Type of a non-degenerate even-dimensional orthogonal space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }

    pub fn parse(s: &str) -> Option<Sign> {
        match s {
            "+" | "plus" | "1" | "+1" => Some(Sign::Plus),
            "-" | "minus" | "-1" => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Which classical geometry a count refers to. For orthogonal spaces `eps`
/// is the type of the ambient space and `sigma` the type of the counted
/// subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassicalCase {
    Orthogonal { eps: Sign, sigma: Sign },
    Symplectic,
    Unitary,
}

pub(crate) fn big_pow(base: u64, exp: u64) -> BigUint {
    num_traits::pow(BigUint::from(base), exp as usize)
}

#[cfg(test)]
pub(crate) fn rat(n: i64, d: i64) -> ExactRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
pub(crate) fn rat_int(n: impl Into<BigInt>) -> ExactRational {
    BigRational::from_integer(n.into())
}

/// `base^(-exp)` as an exact rational; `base` may be negative.
pub(crate) fn inv_pow(base: i64, exp: u64) -> ExactRational {
    let den = num_traits::pow(BigInt::from(base), exp as usize);
    BigRational::new(BigInt::one(), den)
}

/// Number of `b`-subspaces of `(F_q)^a`.
pub fn gaussian_binomial(a: u32, b: u32, q: PrimePower) -> Result<BigUint> {
    if b > a {
        return domain(format!("gaussian binomial [{a} choose {b}] has b > a"));
    }
    let b = b.min(a - b);
    let one = BigUint::one();
    let mut acc = BigUint::one();
    // After step i the accumulator is the integer [a choose i]_q, so each
    // division is exact.
    for i in 1..=b {
        acc *= big_pow(q.q, u64::from(a - i + 1)) - &one;
        let (quot, rem) = acc.div_rem(&(big_pow(q.q, u64::from(i)) - &one));
        debug_assert!(rem.is_zero());
        acc = quot;
    }
    Ok(acc)
}

/// `prod_{i=1}^{e} (1 - base^(-i))`. Accepts a negative base for the
/// unitary variant.
pub fn omega(base: i64, e: u32) -> Result<ExactRational> {
    if base.abs() < 2 {
        return domain(format!("omega needs |base| >= 2, got {base}"));
    }
    let one = ExactRational::one();
    Ok((1..=u64::from(e)).fold(one.clone(), |acc, i| acc * (&one - inv_pow(base, i))))
}

/// `[a choose b]` evaluated at any integer `x`, `|x| >= 2`.
fn gaussian_binomial_at(a: u32, b: u32, x: i64) -> BigInt {
    let b = b.min(a - b);
    let x = BigInt::from(x);
    let one = BigInt::one();
    let mut acc = BigInt::one();
    for i in 1..=b {
        acc *= num_traits::pow(x.clone(), (a - i + 1) as usize) - &one;
        acc /= num_traits::pow(x.clone(), i as usize) - &one;
    }
    acc
}

/// `omega(e1) * omega(e2) / omega(e1 + e2)` for the given base, computed
/// as `base^(e1 e2) / [e1 + e2 choose e1]_base`.
pub fn bq(base: i64, e1: u32, e2: u32) -> Result<ExactRational> {
    if base.abs() < 2 {
        return domain(format!("B needs |base| >= 2, got {base}"));
    }
    let num = num_traits::pow(BigInt::from(base), (e1 * e2) as usize);
    Ok(BigRational::new(num, gaussian_binomial_at(e1 + e2, e1, base)))
}

/// Order of the full isometry group of a `2m`-dimensional orthogonal space
/// of type `sigma`.
pub fn group_order_go(m: u32, sigma: Sign, q: PrimePower) -> Result<BigUint> {
    if m == 0 {
        return domain("orthogonal group order needs m >= 1");
    }
    let m = u64::from(m);
    let qm = big_pow(q.q, m);
    let top = match sigma {
        Sign::Plus => qm - 1u32,
        Sign::Minus => qm + 1u32,
    };
    let mut order = BigUint::from(2u32) * big_pow(q.q, m * (m - 1)) * top;
    for i in 1..m {
        order *= big_pow(q.q, 2 * i) - 1u32;
    }
    Ok(order)
}

/// Order of `Sp_{2m}(q)`.
pub fn group_order_sp(m: u32, q: PrimePower) -> Result<BigUint> {
    if m == 0 {
        return domain("symplectic group order needs m >= 1");
    }
    let m = u64::from(m);
    let mut order = big_pow(q.q, m * m);
    for i in 1..=m {
        order *= big_pow(q.q, 2 * i) - 1u32;
    }
    Ok(order)
}

/// Order of `GU_d(q)`, the isometry group of a `d`-dimensional hermitian
/// space over `F_{q^2}`.
pub fn group_order_gu(d: u32, q: PrimePower) -> Result<BigUint> {
    if d == 0 {
        return domain("unitary group order needs d >= 1");
    }
    let d = u64::from(d);
    let mut order = big_pow(q.q, d * (d - 1) / 2);
    for i in 1..=d {
        let qi = big_pow(q.q, i);
        order *= if i % 2 == 0 { qi - 1u32 } else { qi + 1u32 };
    }
    Ok(order)
}

fn half_even(e: u32, what: &str) -> Result<u32> {
    if e < 2 || e % 2 == 1 {
        return domain(format!("{what} needs even dimension >= 2, got {e}"));
    }
    Ok(e / 2)
}

fn exact_div(num: BigUint, den: BigUint, what: &str) -> Result<BigUint> {
    let (quot, rem) = num.div_rem(&den);
    if !rem.is_zero() {
        return Err(Error::Consistency(format!(
            "{what}: group order quotient is not an integer"
        )));
    }
    Ok(quot)
}

/// Number of non-degenerate `e1`-subspaces of a non-degenerate space of
/// dimension `e1 + e2`, by orbit-stabilizer. For orthogonal spaces the
/// complement of a type-`sigma` subspace has type `eps * sigma`.
pub fn count_nondegenerate(case: ClassicalCase, e1: u32, e2: u32, q: PrimePower) -> Result<BigUint> {
    match case {
        ClassicalCase::Orthogonal { eps, sigma } => {
            let m1 = half_even(e1, "orthogonal count")?;
            let m2 = half_even(e2, "orthogonal count")?;
            let total = group_order_go(m1 + m2, eps, q)?;
            let stab = group_order_go(m1, sigma, q)? * group_order_go(m2, eps * sigma, q)?;
            exact_div(total, stab, "orthogonal count")
        }
        ClassicalCase::Symplectic => {
            let m1 = half_even(e1, "symplectic count")?;
            let m2 = half_even(e2, "symplectic count")?;
            let total = group_order_sp(m1 + m2, q)?;
            let stab = group_order_sp(m1, q)? * group_order_sp(m2, q)?;
            exact_div(total, stab, "symplectic count")
        }
        ClassicalCase::Unitary => {
            if e1 == 0 || e2 == 0 {
                return domain("unitary count needs e1, e2 >= 1");
            }
            let total = group_order_gu(e1 + e2, q)?;
            let stab = group_order_gu(e1, q)? * group_order_gu(e2, q)?;
            exact_div(total, stab, "unitary count")
        }
    }
}

/// The type-dependent factor in the orthogonal count:
/// `(1 + s q^-m1)(1 + e s q^-m2) / (2 (1 + e q^-(m1+m2)))`.
pub fn lambda_factor(sigma1: Sign, eps: Sign, m1: u32, m2: u32, q: PrimePower) -> Result<ExactRational> {
    if m1 == 0 || m2 == 0 {
        return domain("lambda factor needs m1, m2 >= 1");
    }
    // Multiply through by q^(m1+m2) so every factor is an integer.
    let qq = BigInt::from(q.q);
    let qm1 = num_traits::pow(qq.clone(), m1 as usize);
    let qm2 = num_traits::pow(qq, m2 as usize);
    let s1 = BigInt::from(sigma1.as_i64());
    let s2 = BigInt::from((eps * sigma1).as_i64());
    let e = BigInt::from(eps.as_i64());
    let num = (&qm1 + s1) * (&qm2 + s2);
    let den = BigInt::from(2) * (&qm1 * &qm2 + e);
    Ok(BigRational::new(num, den))
}
