//! Closed-form density bounds in exact arithmetic, and the sweeps that
//! check them against the theorem thresholds.
//!
//! Values with a square root live in [`QuadExt`]; every verdict is an exact
//! sign computation.

use std::cmp::Ordering;
use std::fmt;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::exactnum::{bq, lambda_factor, ExactRational, PrimePower, Sign};
use crate::forms::FormKind;
use crate::oracle::{build_ysets, count_complementary, count_complementary_transitive, CountReport, YSet};

/// `a + b sqrt(n)` with rational `a, b` and a positive integer radicand
/// that is never a perfect square unless it is 1. A zero `b` always comes
/// with `n = 1`.
#[derive(Debug, Clone)]
pub struct QuadExt {
    a: ExactRational,
    b: ExactRational,
    radicand: BigUint,
}

fn rat(n: i64, d: i64) -> ExactRational {
    ExactRational::new(BigInt::from(n), BigInt::from(d))
}

fn one() -> ExactRational {
    ExactRational::one()
}

/// `q^-e` for a positive base.
fn inv_pow(q: u64, e: u64) -> ExactRational {
    ExactRational::new(BigInt::one(), num_traits::pow(BigInt::from(q), e as usize))
}

fn sign_of(x: &ExactRational) -> Ordering {
    x.cmp(&ExactRational::zero())
}

fn from_uint(n: &BigUint) -> ExactRational {
    ExactRational::from_integer(BigInt::from(n.clone()))
}

/// Sign of `a + b sqrt(n)`.
fn sign_quad(a: &ExactRational, b: &ExactRational, n: &BigUint) -> Ordering {
    let sa = sign_of(a);
    let sb = if n.is_zero() { Ordering::Equal } else { sign_of(b) };
    if sb == Ordering::Equal || sa == sb {
        return sa;
    }
    if sa == Ordering::Equal {
        return sb;
    }
    match (a * a).cmp(&(b * b * from_uint(n))) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Sign of `a + b sqrt(n) + c sqrt(m)`: isolate the radicals, then square.
fn sign_two_radicals(a: &ExactRational, b: &ExactRational, n: &BigUint, c: &ExactRational, m: &BigUint) -> Ordering {
    if n == m {
        return sign_quad(a, &(b + c), n);
    }
    if c.is_zero() {
        return sign_quad(a, b, n);
    }
    if b.is_zero() {
        return sign_quad(a, c, m);
    }
    // x = b sqrt(n) + c sqrt(m)
    let sx = {
        let (sb, sc) = (sign_of(b), sign_of(c));
        if sb == sc {
            sb
        } else {
            match (b * b * from_uint(n)).cmp(&(c * c * from_uint(m))) {
                Ordering::Greater => sb,
                Ordering::Less => sc,
                Ordering::Equal => Ordering::Equal,
            }
        }
    };
    let sa = sign_of(a);
    if sx == Ordering::Equal || sa == sx {
        return sa;
    }
    if sa == Ordering::Equal {
        return sx;
    }
    // a^2 - x^2 = (a^2 - b^2 n - c^2 m) - 2bc sqrt(nm)
    let rest = a * a - b * b * from_uint(n) - c * c * from_uint(m);
    let cross = -(b * c * rat(2, 1));
    match sign_quad(&rest, &cross, &(n * m)) {
        Ordering::Greater => sa,
        Ordering::Less => sx,
        Ordering::Equal => Ordering::Equal,
    }
}

impl QuadExt {
    pub fn new(a: ExactRational, b: ExactRational, radicand: BigUint) -> Self {
        if b.is_zero() || radicand.is_zero() {
            return QuadExt::rational(a);
        }
        let root = radicand.sqrt();
        if &root * &root == radicand {
            return QuadExt::rational(a + b * from_uint(&root));
        }
        QuadExt { a, b, radicand }
    }

    pub fn rational(a: ExactRational) -> Self {
        QuadExt {
            a,
            b: ExactRational::zero(),
            radicand: BigUint::one(),
        }
    }

    /// `sqrt(r)` for a nonnegative rational `r = u/v`, as `sqrt(uv)/v`.
    pub fn sqrt_rational(r: &ExactRational) -> Result<Self> {
        if r.is_negative() {
            return domain("square root of a negative rational");
        }
        let u = r.numer().to_biguint().expect("nonnegative");
        let v = r.denom().to_biguint().expect("positive");
        let inv_v = ExactRational::new(BigInt::one(), BigInt::from(v.clone()));
        Ok(QuadExt::new(ExactRational::zero(), inv_v, u * v))
    }

    pub fn a(&self) -> &ExactRational {
        &self.a
    }

    pub fn b(&self) -> &ExactRational {
        &self.b
    }

    pub fn radicand(&self) -> &BigUint {
        &self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&ExactRational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn scale(&self, c: &ExactRational) -> Self {
        QuadExt::new(&self.a * c, &self.b * c, self.radicand.clone())
    }

    pub fn add_rational(&self, c: &ExactRational) -> Self {
        QuadExt {
            a: &self.a + c,
            ..self.clone()
        }
    }

    pub fn signum(&self) -> Ordering {
        sign_quad(&self.a, &self.b, &self.radicand)
    }

    /// Exact comparison with a rational.
    pub fn cmp_rational(&self, r: &ExactRational) -> Ordering {
        sign_quad(&(&self.a - r), &self.b, &self.radicand)
    }

    /// Non-authoritative float value.
    pub fn approx(&self) -> f64 {
        let r = self.radicand.to_f64().unwrap_or(f64::INFINITY);
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * r.sqrt()
    }
}

impl Ord for QuadExt {
    fn cmp(&self, other: &Self) -> Ordering {
        sign_two_radicals(
            &(&self.a - &other.a),
            &self.b,
            &self.radicand,
            &-other.b.clone(),
            &other.radicand,
        )
    }
}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for QuadExt {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for QuadExt {}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a);
        }
        write!(f, "{} + ({})*sqrt({})", self.a, self.b, self.radicand)
    }
}

fn check_alpha(alpha: &ExactRational) -> Result<()> {
    if !alpha.is_positive() || alpha > &one() {
        return domain(format!("density {alpha} outside (0, 1]"));
    }
    Ok(())
}

/// `B_base(e1, e2) (1 - sqrt((1/a1 - 1)(1/a2 - 1)) base^(-d/2))`, where
/// `base` is the order of the field the subspaces live over.
pub fn mixing_lower_bound(alpha1: &ExactRational, alpha2: &ExactRational, e1: u32, e2: u32, base: u64) -> Result<QuadExt> {
    check_alpha(alpha1)?;
    check_alpha(alpha2)?;
    let k = bq(base as i64, e1, e2)?;
    let d = u64::from(e1 + e2);
    let r = (alpha1.recip() - one()) * (alpha2.recip() - one()) * inv_pow(base, d);
    Ok(QuadExt::sqrt_rational(&r)?.scale(&-k.clone()).add_rational(&k))
}

/// The symmetric form `B_base(e1, e2) (1 - (1/a - 1) base^(-d/2))`.
pub fn uniform_alpha_bound(alpha: &ExactRational, e1: u32, e2: u32, base: u64) -> Result<QuadExt> {
    check_alpha(alpha)?;
    let k = bq(base as i64, e1, e2)?;
    let root = QuadExt::sqrt_rational(&inv_pow(base, u64::from(e1 + e2)))?;
    let c = (alpha.recip() - one()) * &k;
    Ok(root.scale(&-c).add_rational(&k))
}

/// `(1 - 3/(2q)) (1 - (1/a - 1) q^(-d/2))`.
pub fn corollary_bound(alpha: &ExactRational, d: u32, q: u64) -> Result<QuadExt> {
    check_alpha(alpha)?;
    let lead = one() - rat(3, 2 * q as i64);
    let root = QuadExt::sqrt_rational(&inv_pow(q, u64::from(d)))?;
    let c = (alpha.recip() - one()) * &lead;
    Ok(root.scale(&-c).add_rational(&lead))
}

/// Density of type-`sigma` non-degenerate `2 m_self`-subspaces in an
/// orthogonal space of type `eps` and dimension `2(m_self + m_other)`.
pub fn alpha_orthogonal(eps: Sign, sigma: Sign, m_self: u32, m_other: u32, q: PrimePower) -> Result<ExactRational> {
    let lambda = lambda_factor(sigma, eps, m_self, m_other, q)?;
    let qi = q.q() as i64;
    Ok(lambda * bq(qi, 2 * m_self, 2 * m_other)? / bq(qi * qi, m_self, m_other)?)
}

pub fn alpha_symplectic(m1: u32, m2: u32, q: PrimePower) -> Result<ExactRational> {
    if m1 == 0 || m2 == 0 {
        return domain("symplectic density needs m1, m2 >= 1");
    }
    let qi = q.q() as i64;
    Ok(bq(qi, 2 * m1, 2 * m2)? / bq(qi * qi, m1, m2)?)
}

/// Density of non-degenerate `e1`-subspaces in a hermitian space over
/// `F_{q^2}` of dimension `e1 + e2`.
pub fn alpha_unitary(e1: u32, e2: u32, q: PrimePower) -> Result<ExactRational> {
    if e1 == 0 || e2 == 0 {
        return domain("unitary density needs e1, e2 >= 1");
    }
    let qi = q.q() as i64;
    Ok(bq(qi * qi, e1, e2)? / bq(-qi, e1, e2)?)
}

/// The constant `c` of each family; the proportion is at least `1 - c/q`
/// (orthogonal, symplectic) or `1 - c/q^2` (unitary).
pub fn theorem_constant(kind: FormKind, e1: u32, e2: u32, q: PrimePower) -> ExactRational {
    match kind {
        FormKind::Orthogonal => rat(3, 2),
        FormKind::Symplectic => rat(10, 7),
        FormKind::Hermitian if (e1, e2, q.q()) == (1, 1, 2) => rat(2, 1),
        FormKind::Hermitian if e1.min(e2) == 1 => rat(3, 2),
        FormKind::Hermitian => rat(63, 50),
    }
}

pub fn theorem_threshold(kind: FormKind, e1: u32, e2: u32, q: PrimePower) -> ExactRational {
    let c = theorem_constant(kind, e1, e2, q);
    let scale = match kind {
        FormKind::Hermitian => inv_pow(q.q(), 2),
        _ => inv_pow(q.q(), 1),
    };
    one() - c * scale
}

/// Where the sweep over `q <= 5`, `1 <= m2 <= m1 <= 6` is replaced by exact
/// counts, as `(q, m2, m1)`.
pub const ORTHOGONAL_EXCEPTIONS: [(u64, u32, u32); 7] = [
    (2, 1, 1),
    (3, 1, 1),
    (4, 1, 1),
    (5, 1, 1),
    (2, 1, 2),
    (2, 1, 3),
    (2, 2, 2),
];

pub fn is_orthogonal_exception(q: u64, m2: u32, m1: u32) -> bool {
    ORTHOGONAL_EXCEPTIONS.contains(&(q, m2, m1))
}

/// A closed-form bound set against a threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub family: FormKind,
    pub eps: Option<Sign>,
    pub sigma1: Option<Sign>,
    pub sigma2: Option<Sign>,
    /// Subspace dimensions; absent for checks depending on `q` alone.
    pub e1: Option<u32>,
    pub e2: Option<u32>,
    pub q: u64,
    pub alpha1: Option<ExactRational>,
    pub alpha2: Option<ExactRational>,
    pub lower_bound: QuadExt,
    pub threshold: ExactRational,
    /// Whether passing needs `lower_bound > threshold` rather than `>=`.
    pub strict: bool,
    pub pass: bool,
    pub formula_id: String,
    /// Orthogonal only: the weaker bound with `lambda(-,+)` for both sides.
    pub relaxed_bound: Option<QuadExt>,
    /// Orthogonal only: the tuple is decided by exact counting instead.
    pub exception: bool,
    pub seconds: f64,
}

impl BoundReport {
    fn new(family: FormKind, q: u64, formula_id: &str, lower_bound: QuadExt, threshold: ExactRational, strict: bool) -> Self {
        let ord = lower_bound.cmp_rational(&threshold);
        let pass = ord == Ordering::Greater || (!strict && ord == Ordering::Equal);
        BoundReport {
            family,
            eps: None,
            sigma1: None,
            sigma2: None,
            e1: None,
            e2: None,
            q,
            alpha1: None,
            alpha2: None,
            lower_bound,
            threshold,
            strict,
            pass,
            formula_id: formula_id.to_string(),
            relaxed_bound: None,
            exception: false,
            seconds: 0.0,
        }
    }

    fn dims(mut self, e1: u32, e2: u32) -> Self {
        self.e1 = Some(e1);
        self.e2 = Some(e2);
        self
    }

    fn alphas(mut self, a1: ExactRational, a2: ExactRational) -> Self {
        self.alpha1 = Some(a1);
        self.alpha2 = Some(a2);
        self
    }

    fn timed(mut self, start: Instant) -> Self {
        self.seconds = start.elapsed().as_secs_f64();
        self
    }

    /// Whether the lower bound equals the threshold.
    pub fn equality(&self) -> bool {
        self.lower_bound.cmp_rational(&self.threshold) == Ordering::Equal
    }

    /// Short parameter description for failure messages.
    pub fn tuple(&self) -> String {
        let mut s = format!("{} {} q={}", self.family, self.formula_id, self.q);
        for (name, v) in [("eps", self.eps), ("sigma1", self.sigma1), ("sigma2", self.sigma2)] {
            if let Some(v) = v {
                s.push_str(&format!(" {name}={v}"));
            }
        }
        if let (Some(e1), Some(e2)) = (self.e1, self.e2) {
            s.push_str(&format!(" e1={e1} e2={e2}"));
        }
        s
    }
}

/// The two-density bound for orthogonal `Y1 x Y2`, `e_i = 2 m_i`.
pub fn bound_orthogonal(eps: Sign, sigma1: Sign, sigma2: Sign, m1: u32, m2: u32, q: PrimePower) -> Result<BoundReport> {
    let start = Instant::now();
    let a1 = alpha_orthogonal(eps, sigma1, m1, m2, q)?;
    let a2 = alpha_orthogonal(eps, sigma2, m2, m1, q)?;
    let (e1, e2) = (2 * m1, 2 * m2);
    let lb = mixing_lower_bound(&a1, &a2, e1, e2, q.q())?;
    let threshold = theorem_threshold(FormKind::Orthogonal, e1, e2, q);
    let mut r = BoundReport::new(FormKind::Orthogonal, q.q(), "orthogonal-two-alpha", lb, threshold, true)
        .dims(e1, e2)
        .alphas(a1, a2);
    r.eps = Some(eps);
    r.sigma1 = Some(sigma1);
    r.sigma2 = Some(sigma2);
    r.relaxed_bound = Some(orthogonal_relaxed_bound(m1, m2, q)?);
    r.exception = is_orthogonal_exception(q.q(), m2.min(m1), m1.max(m2));
    Ok(r.timed(start))
}

/// `B_q(e1,e2)(1 + q^(-d/2)) - lambda(-,+)^(-1) B_{q^2}(m1,m2) q^(-d/2)`.
pub fn orthogonal_relaxed_bound(m1: u32, m2: u32, q: PrimePower) -> Result<QuadExt> {
    let qi = q.q() as i64;
    let k = bq(qi, 2 * m1, 2 * m2)?;
    let lam = lambda_factor(Sign::Minus, Sign::Plus, m1, m2, q)?;
    let h = inv_pow(q.q(), u64::from(m1 + m2));
    let v = &k * (one() + &h) - lam.recip() * bq(qi * qi, m1, m2)? * &h;
    Ok(QuadExt::rational(v))
}

/// `B_q(e1,e2)(1 + q^(-d/2)) - B_{q^2}(m1,m2) q^(-d/2)`, `e_i = 2 m_i`.
pub fn bound_symplectic(m1: u32, m2: u32, q: PrimePower) -> Result<BoundReport> {
    let start = Instant::now();
    let alpha = alpha_symplectic(m1, m2, q)?;
    let qi = q.q() as i64;
    let h = inv_pow(q.q(), u64::from(m1 + m2));
    let k = bq(qi, 2 * m1, 2 * m2)?;
    let v = &k * (one() + &h) - bq(qi * qi, m1, m2)? * &h;
    let threshold = theorem_threshold(FormKind::Symplectic, 2 * m1, 2 * m2, q);
    let r = BoundReport::new(FormKind::Symplectic, q.q(), "symplectic-display", QuadExt::rational(v), threshold, true)
        .dims(2 * m1, 2 * m2)
        .alphas(alpha.clone(), alpha);
    Ok(r.timed(start))
}

/// `1 - c1/q^2` with `c1 = (1 + q^-e1)/(1 - q^(-1-e1))`: the lower bound
/// for `e2 = 1`.
pub fn unitary_c1(e1: u32, q: PrimePower) -> Result<ExactRational> {
    if e1 == 0 {
        return domain("c1 needs e1 >= 1");
    }
    let qq = q.q();
    Ok((one() + inv_pow(qq, u64::from(e1))) / (one() - inv_pow(qq, u64::from(e1) + 1)))
}

/// Eq. form `B_{q^2}(1 + q^-d) - B_{-q} q^-d` for `e1, e2 >= 2`; the `c1`
/// estimate when one of them is 1.
pub fn bound_unitary(e1: u32, e2: u32, q: PrimePower) -> Result<BoundReport> {
    let start = Instant::now();
    let alpha = alpha_unitary(e1, e2, q)?;
    let threshold = theorem_threshold(FormKind::Hermitian, e1, e2, q);
    let qq = q.q();
    let r = if e1.min(e2) == 1 {
        let c1 = unitary_c1(e1.max(e2), q)?;
        let lb = one() - c1 * inv_pow(qq, 2);
        BoundReport::new(FormKind::Hermitian, qq, "unitary-c1", QuadExt::rational(lb), threshold, false)
    } else {
        let qi = qq as i64;
        let h = inv_pow(qq, u64::from(e1 + e2));
        let v = bq(qi * qi, e1, e2)? * (one() + &h) - bq(-qi, e1, e2)? * &h;
        BoundReport::new(FormKind::Hermitian, qq, "unitary-display", QuadExt::rational(v), threshold, true)
    };
    Ok(r.dims(e1, e2).alphas(alpha.clone(), alpha).timed(start))
}

/// Parameter ranges of the sweeps.
#[derive(Debug, Clone)]
pub struct SweepRanges {
    /// Largest `q` of the main sweep.
    pub q_max: u64,
    /// Orthogonal: largest `m1`. Symplectic: largest `m1 + m2`.
    /// Unitary: largest `e1 + e2`.
    pub size_max: u32,
    /// Largest prime power in the finite checks of the analytic branches.
    pub tail_q_max: u64,
    /// Largest ambient dimension in the finite checks.
    pub tail_d_max: u32,
    /// Largest `q` of the direct bound sweep for large `q`.
    pub tail_direct_q_max: u64,
    /// Run the full-pairs count on every exception, not only `d = 4`.
    pub full_pairs: bool,
    pub budget: u64,
}

impl SweepRanges {
    pub fn defaults(kind: FormKind) -> Self {
        let (q_max, size_max) = match kind {
            FormKind::Orthogonal => (5, 6),
            FormKind::Symplectic => (4, 9),
            FormKind::Hermitian => (3, 9),
        };
        SweepRanges {
            q_max,
            size_max,
            tail_q_max: 97,
            tail_d_max: 40,
            tail_direct_q_max: 97,
            full_pairs: false,
            budget: crate::linalg::DEFAULT_BUDGET,
        }
    }
}

/// Outcome of a family sweep.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub family: FormKind,
    pub bounds: Vec<BoundReport>,
    pub counts: Vec<CountReport>,
    /// Orthogonal `(q, m2, m1)` tuples decided by counting.
    pub dispatched: Vec<(u64, u32, u32)>,
}

impl VerifyReport {
    /// Every non-exception bound and every count passes.
    pub fn pass(&self) -> bool {
        self.first_failure().is_none()
    }

    pub fn first_failure(&self) -> Option<String> {
        if let Some(b) = self.bounds.iter().find(|b| !b.exception && !b.pass) {
            return Some(b.tuple());
        }
        self.counts
            .iter()
            .find(|c| !c.pass)
            .map(|c| format!("count {} x {}", c.case1, c.case2))
    }

    /// Main-sweep bound reports, without the tail checks.
    pub fn sweep(&self) -> impl Iterator<Item = &BoundReport> {
        self.bounds.iter().filter(|b| !b.formula_id.starts_with("tail-"))
    }
}

fn prime_powers(lo: u64, hi: u64) -> Vec<PrimePower> {
    PrimePower::range(lo, hi)
}

fn collect<T: Send>(items: Vec<Result<T>>) -> Result<Vec<T>> {
    items.into_iter().collect()
}

fn tail(family: FormKind, q: u64, id: &str, value: ExactRational, threshold: ExactRational) -> BoundReport {
    BoundReport::new(family, q, id, QuadExt::rational(value), threshold, true)
}

/// `(1 - 1/q)`-style helper: `1 - q^-e`.
fn one_minus(q: u64, e: u64) -> ExactRational {
    one() - inv_pow(q, e)
}

fn one_plus(q: u64, e: u64) -> ExactRational {
    one() + inv_pow(q, e)
}

/// The closed-form estimates standing in for the orthogonal tail, each
/// checked over a finite range.
pub fn orthogonal_tails(r: &SweepRanges) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    let kind = FormKind::Orthogonal;
    for q in prime_powers(2, 5) {
        let qq = q.q();
        let qi = qq as i64;
        let v = one() - inv_pow(qq, 1) - inv_pow(qq, 2) + inv_pow(qq, 5)
            - rat(2, 1) * one_plus(qq, 7) / (one_minus(qq, 1) * one_minus(qq, 6)) * bq(qi * qi, 1, 6)? * inv_pow(qq, 7);
        out.push(tail(kind, qq, "tail-orthogonal-small-q", v, theorem_threshold(kind, 2, 2, q)));
    }
    for q in prime_powers(7, r.tail_q_max) {
        let qq = q.q();
        let qi = qq as i64;
        let v = one() / ((one() + inv_pow(qq, 1) + inv_pow(qq, 2)) * one_plus(qq, 2))
            - rat(2, 1) * inv_pow(qq, 2) / (one_minus(qq, 1) * one_minus(qq, 1));
        out.push(tail(kind, qq, "tail-orthogonal-planes", v, theorem_threshold(kind, 2, 2, q)));
        let v = one() - inv_pow(qq, 1) - inv_pow(qq, 2) + inv_pow(qq, 5)
            - rat(2, 1) * one_plus(qq, 3) / (one_minus(qq, 1) * one_minus(qq, 2)) * bq(qi * qi, 1, 2)? * inv_pow(qq, 3);
        out.push(tail(kind, qq, "tail-orthogonal-large-q", v, theorem_threshold(kind, 2, 2, q)));
    }
    // Direct sweep of the two-density bound beyond the main ranges.
    let mut tuples = Vec::new();
    let m_max = r.tail_d_max / 2;
    for q in prime_powers(2, r.tail_direct_q_max) {
        for m1 in 1..=m_max {
            for m2 in 1..=m1.min(m_max - m1) {
                let inside_main = q.q() <= r.q_max && m1 <= r.size_max;
                if inside_main || (q.q() <= 5 && m1 + m2 < 7) {
                    continue;
                }
                tuples.push((q, m1, m2));
            }
        }
    }
    let direct: Vec<Result<Vec<BoundReport>>> = tuples
        .par_iter()
        .map(|&(q, m1, m2)| {
            let mut v = Vec::new();
            for eps in Sign::BOTH {
                for s1 in Sign::BOTH {
                    for s2 in Sign::BOTH {
                        let mut b = bound_orthogonal(eps, s1, s2, m1, m2, q)?;
                        b.formula_id = "tail-orthogonal-direct".into();
                        v.push(b);
                    }
                }
            }
            Ok(v)
        })
        .collect();
    for v in collect(direct)? {
        out.extend(v);
    }
    Ok(out)
}

pub fn symplectic_tails(r: &SweepRanges) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    let kind = FormKind::Symplectic;
    for q in prime_powers(5, r.tail_q_max) {
        let qq = q.q();
        let v = one() - inv_pow(qq, 1) - rat(2, 1) * inv_pow(qq, 2);
        out.push(tail(kind, qq, "tail-symplectic-large-q", v, theorem_threshold(kind, 2, 2, q)));
    }
    let mut tuples = Vec::new();
    let m_max = r.tail_d_max / 2;
    for q in prime_powers(2, r.tail_direct_q_max) {
        for m1 in 1..m_max {
            for m2 in 1..=m1.min(m_max - m1) {
                if q.q() <= r.q_max && m1 + m2 <= r.size_max {
                    continue;
                }
                tuples.push((q, m1, m2));
            }
        }
    }
    let direct: Vec<Result<BoundReport>> = tuples
        .par_iter()
        .map(|&(q, m1, m2)| {
            let mut b = bound_symplectic(m1, m2, q)?;
            b.formula_id = "tail-symplectic-direct".into();
            Ok(b)
        })
        .collect();
    out.extend(collect(direct)?);
    Ok(out)
}

/// `(1 + q^-1) / ((1 - q^-4)(1 - q^-6))`, the estimate for `B_{-q}`.
pub fn unitary_b_minus_q_estimate(q: u64) -> ExactRational {
    one_plus(q, 1) / (one_minus(q, 4) * one_minus(q, 6))
}

pub fn unitary_tails(r: &SweepRanges) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    let kind = FormKind::Hermitian;
    for q in prime_powers(4, r.tail_q_max) {
        let qq = q.q();
        let v = one() - inv_pow(qq, 2) - inv_pow(qq, 4) - one_plus(qq, 1) * inv_pow(qq, 4) / (one_minus(qq, 4) * one_minus(qq, 6));
        out.push(tail(kind, qq, "tail-unitary-large-q", v, theorem_threshold(kind, 2, 2, q)));
    }
    // B_{-q} estimate, reported as estimate >= B_{-q}.
    for q in prime_powers(2, 9) {
        let qi = q.q() as i64;
        let est = unitary_b_minus_q_estimate(q.q());
        for e1 in 2..=8 {
            for e2 in 2..=e1 {
                let b = bq(-qi, e1, e2)?;
                let rep = BoundReport::new(kind, q.q(), "tail-unitary-b-minus-q", QuadExt::rational(est.clone()), b, false);
                out.push(rep.dims(e1, e2));
            }
        }
    }
    // c1 <= 3/2 away from (1, 2), where it is 2.
    for q in prime_powers(2, 9) {
        for e1 in 1..=40 {
            let c1 = unitary_c1(e1, q)?;
            let cap = if (e1, q.q()) == (1, 2) { rat(2, 1) } else { rat(3, 2) };
            // stored as cap - c1 >= 0
            let rep = BoundReport::new(kind, q.q(), "tail-unitary-c1", QuadExt::rational(cap - c1), ExactRational::zero(), false);
            out.push(rep.dims(e1, 1));
        }
    }
    let mut tuples = Vec::new();
    for q in prime_powers(2, r.tail_direct_q_max) {
        for e1 in 2..r.tail_d_max {
            for e2 in 2..=e1.min(r.tail_d_max - e1) {
                if q.q() <= r.q_max && e1 + e2 <= r.size_max {
                    continue;
                }
                tuples.push((q, e1, e2));
            }
        }
    }
    let direct: Vec<Result<BoundReport>> = tuples
        .par_iter()
        .map(|&(q, e1, e2)| {
            let mut b = bound_unitary(e1, e2, q)?;
            b.formula_id = "tail-unitary-direct".into();
            Ok(b)
        })
        .collect();
    out.extend(collect(direct)?);
    Ok(out)
}

/// Exact counts for every sign combination of one exception tuple.
pub fn count_orthogonal_exception(q: u64, m2: u32, m1: u32, full_pairs: bool, budget: u64) -> Result<Vec<CountReport>> {
    let (e1, e2) = (2 * m1 as usize, 2 * m2 as usize);
    let d = e1 + e2;
    let mut out = Vec::new();
    for eps in Sign::BOTH {
        let y1 = build_ysets(FormKind::Orthogonal, Some(eps), d, e1, q, budget)?;
        let y2: Vec<YSet> = if e1 == e2 {
            y1.clone()
        } else {
            build_ysets(FormKind::Orthogonal, Some(eps), d, e2, q, budget)?
        };
        for a in &y1 {
            for b in &y2 {
                let rep = if full_pairs {
                    count_complementary(a, b)?
                } else {
                    count_complementary_transitive(a, b)?
                };
                out.push(rep);
            }
        }
    }
    Ok(out)
}

/// The family's main sweep over `ranges`: orthogonal `q <= q_max`,
/// `1 <= m2 <= m1 <= size_max`, all signs; symplectic `m1 + m2 <= size_max`;
/// unitary `2 <= e2 <= e1`, `e1 + e2 <= size_max`, plus the `e2 = 1`
/// estimate for `e1 <= 40`, `q <= 9`.
pub fn main_sweep(kind: FormKind, r: &SweepRanges) -> Result<Vec<BoundReport>> {
    let reps: Vec<Result<BoundReport>> = match kind {
        FormKind::Orthogonal => {
            let mut tuples = Vec::new();
            for q in prime_powers(2, r.q_max) {
                for m1 in 1..=r.size_max {
                    for m2 in 1..=m1 {
                        for eps in Sign::BOTH {
                            for s1 in Sign::BOTH {
                                for s2 in Sign::BOTH {
                                    tuples.push((eps, s1, s2, m1, m2, q));
                                }
                            }
                        }
                    }
                }
            }
            tuples
                .par_iter()
                .map(|&(eps, s1, s2, m1, m2, q)| bound_orthogonal(eps, s1, s2, m1, m2, q))
                .collect()
        }
        FormKind::Symplectic => {
            let mut tuples = Vec::new();
            for q in prime_powers(2, r.q_max) {
                for m1 in 1..r.size_max {
                    for m2 in 1..=m1.min(r.size_max - m1) {
                        tuples.push((m1, m2, q));
                    }
                }
            }
            tuples.par_iter().map(|&(m1, m2, q)| bound_symplectic(m1, m2, q)).collect()
        }
        FormKind::Hermitian => {
            let mut tuples = Vec::new();
            for q in prime_powers(2, r.q_max) {
                for e1 in 2..r.size_max {
                    for e2 in 2..=e1.min(r.size_max - e1) {
                        tuples.push((e1, e2, q));
                    }
                }
            }
            for q in prime_powers(2, 9) {
                for e1 in 1..=40 {
                    tuples.push((e1, 1, q));
                }
            }
            tuples.par_iter().map(|&(e1, e2, q)| bound_unitary(e1, e2, q)).collect()
        }
    };
    collect(reps)
}

pub fn tail_checks(kind: FormKind, r: &SweepRanges) -> Result<Vec<BoundReport>> {
    match kind {
        FormKind::Orthogonal => orthogonal_tails(r),
        FormKind::Symplectic => symplectic_tails(r),
        FormKind::Hermitian => unitary_tails(r),
    }
}

/// Exact counts for every orthogonal exception inside the ranges.
pub fn orthogonal_exception_counts(r: &SweepRanges) -> Result<(Vec<CountReport>, Vec<(u64, u32, u32)>)> {
    let mut counts = Vec::new();
    let mut dispatched = Vec::new();
    for &(q, m2, m1) in ORTHOGONAL_EXCEPTIONS.iter() {
        if q > r.q_max || m1 > r.size_max {
            continue;
        }
        let full = r.full_pairs || m1 + m2 == 2;
        counts.extend(count_orthogonal_exception(q, m2, m1, full, r.budget)?);
        dispatched.push((q, m2, m1));
    }
    Ok((counts, dispatched))
}

/// Run one family's sweep, its tail checks, and (orthogonal) the exact
/// counts of the exception tuples.
pub fn verify_theorem(kind: FormKind, r: &SweepRanges) -> Result<VerifyReport> {
    let mut bounds = main_sweep(kind, r)?;
    let (counts, dispatched) = match kind {
        FormKind::Orthogonal => orthogonal_exception_counts(r)?,
        _ => (Vec::new(), Vec::new()),
    };
    bounds.extend(tail_checks(kind, r)?);
    Ok(VerifyReport {
        family: kind,
        bounds,
        counts,
        dispatched,
    })
}
