//! Small finite fields with full Cayley tables.
//!
//! An element of `F_{p^k}` is encoded as the integer `sum c_i p^i` of its
//! coefficient vector modulo the field's fixed modulus, so `0` and `1` are
//! the additive and multiplicative identities and `0..p` is the prime
//! field. Multiplication goes through exp/log tables over a primitive
//! element; the add/mul tables are then materialised so the enumeration
//! loops are plain lookups.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{domain, Error, Result};
use crate::exactnum::PrimePower;

/// An element of a [`Field`]: an index in `0..q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
#[repr(transparent)]
pub struct FieldElem(pub u8);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Field orders with a fixed modulus.
pub const SUPPORTED_ORDERS: [u64; 9] = [2, 3, 4, 5, 7, 8, 9, 16, 25];

/// Published moduli, coefficients low-degree first.
fn published_modulus(q: u64) -> Option<&'static [u8]> {
    Some(match q {
        4 => &[1, 1, 1],
        8 => &[1, 1, 0, 1],
        9 => &[2, 2, 1],
        16 => &[1, 1, 0, 0, 1],
        25 => &[2, 1, 1],
        _ => return None,
    })
}

pub struct Field {
    order: PrimePower,
    modulus: Vec<u8>,
    /// `Some(r)` when this field is treated as `F_{r^2}` with conjugation
    /// `x -> x^r`.
    base: Option<u64>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    exp: Vec<u8>,
    log: Vec<u8>,
    conj: Vec<u8>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("q", &self.order.q())
            .field("modulus", &self.modulus)
            .field("base", &self.base)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.base == other.base
    }
}

impl Eq for Field {}

impl Field {
    /// The field with `q` elements. Cached; repeated calls share tables.
    pub fn new(q: u64) -> Result<Arc<Field>> {
        static CACHE: OnceLock<Vec<Arc<Field>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| {
            SUPPORTED_ORDERS
                .iter()
                .map(|&q| Arc::new(Field::build(q, None)))
                .collect()
        });
        cache
            .iter()
            .find(|f| f.order.q() == q)
            .cloned()
            .ok_or_else(|| Error::Config(format!("unsupported field order {q}; supported: {SUPPORTED_ORDERS:?}")))
    }

    /// `F_{q^2}` as a quadratic extension of `F_q`, with conjugation.
    pub fn quadratic_extension(q: u64) -> Result<Arc<Field>> {
        static CACHE: OnceLock<Vec<Arc<Field>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| {
            [2u64, 3, 4, 5]
                .iter()
                .map(|&r| Arc::new(Field::build(r * r, Some(r))))
                .collect()
        });
        cache
            .iter()
            .find(|f| f.base == Some(q))
            .cloned()
            .ok_or_else(|| Error::Config(format!("unsupported quadratic extension of F_{q}")))
    }

    fn build(q: u64, base: Option<u64>) -> Field {
        let order = PrimePower::new(q).expect("supported orders are prime powers");
        let p = order.p() as usize;
        let k = order.k() as usize;
        let n = q as usize;
        let modulus: Vec<u8> = match published_modulus(q) {
            Some(m) => m.to_vec(),
            None => vec![0, 1],
        };

        let digits = |v: usize| -> Vec<usize> {
            let mut out = vec![0; k];
            let mut v = v;
            for d in out.iter_mut() {
                *d = v % p;
                v /= p;
            }
            out
        };
        let encode = |c: &[usize]| -> usize { c.iter().rev().fold(0, |acc, &d| acc * p + d) };

        let mut add = vec![0u8; n * n];
        for a in 0..n {
            for b in 0..n {
                let (da, db) = (digits(a), digits(b));
                let s: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * n + b] = encode(&s) as u8;
            }
        }

        // Polynomial product reduced by the monic modulus.
        let poly_mul = |a: usize, b: usize| -> usize {
            let (da, db) = (digits(a), digits(b));
            let mut prod = vec![0usize; 2 * k];
            for (i, x) in da.iter().enumerate() {
                for (j, y) in db.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            if k > 1 {
                for deg in (k..2 * k).rev() {
                    let c = prod[deg];
                    if c == 0 {
                        continue;
                    }
                    // x^k = -(m_0 + ... + m_{k-1} x^{k-1})
                    for (i, &m) in modulus[..k].iter().enumerate() {
                        let sub = (c * m as usize) % p;
                        prod[deg - k + i] = (prod[deg - k + i] + p - sub) % p;
                    }
                    prod[deg] = 0;
                }
            } else {
                prod[0] %= p;
            }
            encode(&prod[..k])
        };

        // Least primitive element in encoding order.
        let generator = (2..n)
            .chain(std::iter::once(1))
            .find(|&g| {
                let mut x = 1;
                for i in 1..n - 1 {
                    x = poly_mul(x, g);
                    if x == 1 {
                        return i == n - 1;
                    }
                }
                true
            })
            .expect("multiplicative group is cyclic");

        let mut exp = vec![0u8; n - 1];
        let mut log = vec![0u8; n];
        let mut x = 1;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = x as u8;
            log[x] = i as u8;
            x = poly_mul(x, generator);
        }

        let mut mul = vec![0u8; n * n];
        for a in 1..n {
            for b in 1..n {
                let l = (log[a] as usize + log[b] as usize) % (n - 1);
                mul[a * n + b] = exp[l];
            }
        }
        let neg: Vec<u8> = (0..n)
            .map(|a| (0..n).find(|&b| add[a * n + b] == 0).unwrap() as u8)
            .collect();
        let mut inv = vec![0u8; n];
        for a in 1..n {
            inv[a] = exp[(n - 1 - log[a] as usize) % (n - 1)];
        }
        let conj = match base {
            Some(r) => (0..n)
                .map(|a| {
                    if a == 0 {
                        0
                    } else {
                        exp[(log[a] as usize * r as usize) % (n - 1)]
                    }
                })
                .collect(),
            None => Vec::new(),
        };

        Field {
            order,
            modulus,
            base,
            add,
            mul,
            neg,
            inv,
            exp,
            log,
            conj,
        }
    }

    pub fn order(&self) -> PrimePower {
        self.order
    }

    pub fn q(&self) -> usize {
        self.order.q() as usize
    }

    pub fn characteristic(&self) -> u64 {
        self.order.p()
    }

    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    pub fn base_order(&self) -> Option<u64> {
        self.base
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q()).map(|v| FieldElem(v as u8))
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.add[a.0 as usize * self.q() + b.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.mul[a.0 as usize * self.q() + b.0 as usize])
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.neg[a.0 as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return domain("inverse of zero");
        }
        Ok(FieldElem(self.inv[a.0 as usize]))
    }

    /// Inverse of a known-nonzero element.
    #[inline]
    pub(crate) fn inv_nonzero(&self, a: FieldElem) -> FieldElem {
        debug_assert!(!a.is_zero());
        FieldElem(self.inv[a.0 as usize])
    }

    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return FieldElem::ONE;
        }
        if a.is_zero() {
            return FieldElem::ZERO;
        }
        let n = (self.q() - 1) as u64;
        FieldElem(self.exp[((self.log[a.0 as usize] as u64 * (e % n)) % n) as usize])
    }

    /// The order-2 automorphism `x -> x^r` of `F_{r^2}`.
    pub fn conj(&self, a: FieldElem) -> Result<FieldElem> {
        if self.base.is_none() {
            return domain(format!("F_{} was not declared as a quadratic extension", self.q()));
        }
        Ok(FieldElem(self.conj[a.0 as usize]))
    }

    #[inline]
    pub(crate) fn conj_unchecked(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.conj[a.0 as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: u8) -> FieldElem {
        FieldElem(v)
    }

    #[test]
    fn supported_fields_and_moduli() {
        assert_eq!(Field::new(2).unwrap().modulus().len(), 2);
        assert_eq!(Field::new(4).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(Field::new(9).unwrap().modulus(), &[2, 2, 1]);
        assert!(Field::new(6).is_err());
        assert!(Field::new(11).is_err());
        assert!(Field::quadratic_extension(7).is_err());
    }

    fn poly_rem(mut num: Vec<u64>, den: &[u64], p: u64) -> Vec<u64> {
        // den is monic
        while num.len() >= den.len() {
            let c = *num.last().unwrap();
            let shift = num.len() - den.len();
            for (i, &d) in den.iter().enumerate() {
                num[shift + i] = (num[shift + i] + p * p - c * d % p) % p;
            }
            num.pop();
        }
        num
    }

    #[test]
    fn moduli_are_irreducible() {
        for q in [4u64, 8, 9, 16, 25] {
            let f = Field::new(q).unwrap();
            let p = f.characteristic();
            let m: Vec<u64> = f.modulus().iter().map(|&c| u64::from(c)).collect();
            let k = m.len() - 1;
            for deg in 1..=k / 2 {
                // every monic polynomial of degree `deg`
                for code in 0..p.pow(deg as u32) {
                    let mut g: Vec<u64> = (0..deg).map(|i| code / p.pow(i as u32) % p).collect();
                    g.push(1);
                    let r = poly_rem(m.clone(), &g, p);
                    assert!(r.iter().any(|&c| c != 0), "F_{q} modulus divisible by {g:?}");
                }
            }
        }
    }

    #[test]
    fn f4_omega_squared() {
        let f = Field::new(4).unwrap();
        // omega is the class of x, encoded as 2; omega + 1 is 3.
        assert_eq!(f.mul(e(2), e(2)), e(3));
        assert_eq!(f.conj(e(2)).unwrap_err(), Error::Domain("F_4 was not declared as a quadratic extension".into()));
        let ext = Field::quadratic_extension(2).unwrap();
        assert_eq!(ext.conj(e(2)).unwrap(), e(3));
    }

    #[test]
    fn small_examples() {
        let f3 = Field::new(3).unwrap();
        assert_eq!(f3.inv(e(2)).unwrap(), e(2));
        assert!(f3.inv(FieldElem::ZERO).is_err());
        for q in SUPPORTED_ORDERS {
            let f = Field::new(q).unwrap();
            for x in f.elements() {
                assert_eq!(f.add(x, FieldElem::ZERO), x);
                assert_eq!(f.mul(x, FieldElem::ONE), x);
                assert_eq!(f.add(x, f.neg(x)), FieldElem::ZERO);
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let f = Field::new(q).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn fermat() {
        for q in SUPPORTED_ORDERS {
            let f = Field::new(q).unwrap();
            for x in f.elements().skip(1) {
                // Repeated multiplication, independent of the log table.
                let mut acc = FieldElem::ONE;
                for _ in 0..q - 1 {
                    acc = f.mul(acc, x);
                }
                assert_eq!(acc, FieldElem::ONE);
                assert_eq!(f.mul(x, f.inv(x).unwrap()), FieldElem::ONE);
            }
        }
    }

    #[test]
    fn conjugation() {
        for r in [2u64, 3, 4, 5] {
            let f = Field::quadratic_extension(r).unwrap();
            assert_eq!(f.conj(FieldElem::ZERO).unwrap(), FieldElem::ZERO);
            assert_eq!(f.conj(FieldElem::ONE).unwrap(), FieldElem::ONE);
            let mut fixed = 0;
            for x in f.elements() {
                let c = f.conj(x).unwrap();
                let mut pow = FieldElem::ONE;
                for _ in 0..r {
                    pow = f.mul(pow, x);
                }
                assert_eq!(c, pow);
                assert_eq!(f.conj(c).unwrap(), x);
                if c == x {
                    fixed += 1;
                }
            }
            assert_eq!(fixed, r);
        }
    }

    #[test]
    fn norm_surjects_onto_base() {
        for r in [2u64, 3, 4, 5] {
            let f = Field::quadratic_extension(r).unwrap();
            let mut image: Vec<FieldElem> = f.elements().map(|x| f.mul(x, f.conj(x).unwrap())).collect();
            image.sort();
            image.dedup();
            assert_eq!(image.len() as u64, r);
            assert!(image.iter().all(|&y| f.conj(y).unwrap() == y));
        }
    }
}
