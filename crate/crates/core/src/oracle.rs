//! Brute-force ground truth over small geometries: enumerate the
//! non-degenerate subspaces of each type, count complementary pairs, and
//! check spectral and mixing claims on explicit biadjacency matrices.

use std::fmt;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::theorem_threshold;
use crate::error::{domain, Error, Result};
use crate::exactnum::{count_nondegenerate, ClassicalCase, ExactRational, PrimePower, Sign};
use crate::forms::{standard_form, ClassicalForm, FormKind};
use crate::gf::{Field, FieldElem};
use crate::linalg::{complementary_generic, enumerate_subspaces, PackedBasis, Subspace};
use crate::spectrum::eigen_exponents;

/// Default cap on `[d e1]_q` for explicit biadjacency matrices.
pub const BIADJACENCY_CAP: u64 = 5000;

/// Which subspaces of which standard space a [`YSet`] holds. For hermitian
/// spaces `q` is the order of the fixed field, so the vectors live over
/// `F_{q^2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct YCase {
    pub kind: FormKind,
    pub eps: Option<Sign>,
    pub sigma: Option<Sign>,
    pub d: usize,
    pub e: usize,
    pub q: u64,
}

impl YCase {
    pub fn orthogonal(eps: Sign, sigma: Sign, d: usize, e: usize, q: u64) -> Self {
        YCase {
            kind: FormKind::Orthogonal,
            eps: Some(eps),
            sigma: Some(sigma),
            d,
            e,
            q,
        }
    }

    pub fn symplectic(d: usize, e: usize, q: u64) -> Self {
        YCase {
            kind: FormKind::Symplectic,
            eps: None,
            sigma: None,
            d,
            e,
            q,
        }
    }

    pub fn hermitian(d: usize, e: usize, q: u64) -> Self {
        YCase {
            kind: FormKind::Hermitian,
            eps: None,
            sigma: None,
            d,
            e,
            q,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.e == 0 || self.e >= self.d {
            return domain(format!("need 0 < e < d, got e={} d={}", self.e, self.d));
        }
        match self.kind {
            FormKind::Orthogonal if self.eps.is_none() || self.sigma.is_none() => {
                domain("orthogonal case needs eps and sigma")
            }
            FormKind::Orthogonal | FormKind::Symplectic if self.e % 2 == 1 || self.d % 2 == 1 => {
                domain("orthogonal and symplectic cases need even e and d")
            }
            _ => Ok(()),
        }
    }

    /// The orbit-stabilizer count this case must reproduce.
    pub fn closed_form_count(&self) -> Result<BigUint> {
        self.validate()?;
        let case = match self.kind {
            FormKind::Orthogonal => ClassicalCase::Orthogonal {
                eps: self.eps.unwrap(),
                sigma: self.sigma.unwrap(),
            },
            FormKind::Symplectic => ClassicalCase::Symplectic,
            FormKind::Hermitian => ClassicalCase::Unitary,
        };
        count_nondegenerate(case, self.e as u32, (self.d - self.e) as u32, PrimePower::new(self.q)?)
    }

    pub fn form(&self) -> Result<ClassicalForm> {
        standard_form(self.kind, self.d, self.q, self.eps)
    }

    /// Same ambient space and form.
    pub fn same_space(&self, other: &YCase) -> bool {
        self.kind == other.kind && self.eps == other.eps && self.d == other.d && self.q == other.q
    }
}

impl fmt::Display for YCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(eps) = self.eps {
            write!(f, " eps={eps}")?;
        }
        if let Some(sigma) = self.sigma {
            write!(f, " sigma={sigma}")?;
        }
        write!(f, " d={} e={} q={}", self.d, self.e, self.q)
    }
}

/// All non-degenerate subspaces of one case, in enumeration order.
#[derive(Debug, Clone)]
pub struct YSet {
    case: YCase,
    members: Vec<Subspace>,
    /// Number of `e`-subspaces of the ambient space.
    ambient_count: u64,
}

impl YSet {
    pub fn case(&self) -> &YCase {
        &self.case
    }

    pub fn members(&self) -> &[Subspace] {
        &self.members
    }

    pub fn count(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn ambient_count(&self) -> u64 {
        self.ambient_count
    }

    /// `|Y| / |X|`.
    pub fn density(&self) -> ExactRational {
        ExactRational::new(BigInt::from(self.count()), BigInt::from(self.ambient_count))
    }
}

/// How a subspace sits in the ambient form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Class {
    Degenerate,
    Nondegenerate,
    Typed(Sign),
}

pub fn classify_basis(form: &ClassicalForm, basis: &[FieldElem], e: usize) -> Result<Class> {
    let r = form.restrict_basis(basis, e);
    if !r.is_nondegenerate() {
        return Ok(Class::Degenerate);
    }
    match form.kind() {
        FormKind::Orthogonal if e % 2 == 0 => Ok(Class::Typed(r.orthogonal_type()?)),
        _ => Ok(Class::Nondegenerate),
    }
}

/// Every `e`-subspace of the ambient space, sorted by [`Class`].
#[derive(Debug, Clone, Default)]
pub struct Classification {
    pub plus: Vec<Subspace>,
    pub minus: Vec<Subspace>,
    pub nondegenerate: Vec<Subspace>,
    pub degenerate: u64,
}

impl Classification {
    pub fn total(&self) -> u64 {
        (self.plus.len() + self.minus.len() + self.nondegenerate.len()) as u64 + self.degenerate
    }

    fn absorb(&mut self, other: Classification) {
        self.plus.extend(other.plus);
        self.minus.extend(other.minus);
        self.nondegenerate.extend(other.nondegenerate);
        self.degenerate += other.degenerate;
    }
}

/// Classify all `e`-subspaces, in parallel over pivot patterns. The
/// concatenation keeps enumeration order.
pub fn classify_all(form: &ClassicalForm, e: usize, budget: u64) -> Result<Classification> {
    let g = enumerate_subspaces(form.dim(), e, form.field().clone(), budget)?;
    let d = form.dim();
    let parts: Vec<Result<Classification>> = (0..g.patterns().len())
        .into_par_iter()
        .map(|i| {
            let pattern = &g.patterns()[i];
            let mut out = Classification::default();
            let mut err = None;
            g.visit_pattern(i, |b| {
                if err.is_some() {
                    return;
                }
                let bucket = match classify_basis(form, b, e) {
                    Ok(Class::Degenerate) => {
                        out.degenerate += 1;
                        return;
                    }
                    Ok(Class::Nondegenerate) => &mut out.nondegenerate,
                    Ok(Class::Typed(Sign::Plus)) => &mut out.plus,
                    Ok(Class::Typed(Sign::Minus)) => &mut out.minus,
                    Err(x) => {
                        err = Some(x);
                        return;
                    }
                };
                bucket.push(Subspace::from_rref_parts(d, pattern.clone(), b.to_vec()));
            });
            match err {
                Some(x) => Err(x),
                None => Ok(out),
            }
        })
        .collect();
    let mut all = Classification::default();
    for p in parts {
        all.absorb(p?);
    }
    Ok(all)
}

/// Sizes of the [`Class`] buckets, without storing members.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassCounts {
    pub plus: u64,
    pub minus: u64,
    pub nondegenerate: u64,
    pub degenerate: u64,
}

impl ClassCounts {
    pub fn total(&self) -> u64 {
        self.plus + self.minus + self.nondegenerate + self.degenerate
    }

    fn add(mut self, o: ClassCounts) -> Self {
        self.plus += o.plus;
        self.minus += o.minus;
        self.nondegenerate += o.nondegenerate;
        self.degenerate += o.degenerate;
        self
    }
}

/// Like [`classify_all`] but keeps only the bucket sizes, so it reaches
/// spaces whose Y-sets do not fit in memory.
pub fn classify_counts(form: &ClassicalForm, e: usize, budget: u64) -> Result<ClassCounts> {
    let g = enumerate_subspaces(form.dim(), e, form.field().clone(), budget)?;
    (0..g.patterns().len())
        .into_par_iter()
        .map(|i| {
            let mut out = ClassCounts::default();
            let mut err = None;
            g.visit_pattern(i, |b| {
                if err.is_some() {
                    return;
                }
                match classify_basis(form, b, e) {
                    Ok(Class::Degenerate) => out.degenerate += 1,
                    Ok(Class::Nondegenerate) => out.nondegenerate += 1,
                    Ok(Class::Typed(Sign::Plus)) => out.plus += 1,
                    Ok(Class::Typed(Sign::Minus)) => out.minus += 1,
                    Err(x) => err = Some(x),
                }
            });
            err.map_or(Ok(out), Err)
        })
        .try_reduce(ClassCounts::default, |a, b| Ok(a.add(b)))
}

/// Enumerated `|Y|` of one case, counted without storing the members.
pub fn enumerated_count(case: &YCase, budget: u64) -> Result<u64> {
    case.validate()?;
    let c = classify_counts(&case.form()?, case.e, budget)?;
    Ok(match (case.kind, case.sigma) {
        (FormKind::Orthogonal, Some(Sign::Plus)) => c.plus,
        (FormKind::Orthogonal, _) => c.minus,
        _ => c.nondegenerate,
    })
}

/// Every Y-set of one ambient space and subspace dimension: both types for
/// orthogonal spaces, one set otherwise. Each count is checked against the
/// closed form.
pub fn build_ysets(
    kind: FormKind,
    eps: Option<Sign>,
    d: usize,
    e: usize,
    q: u64,
    budget: u64,
) -> Result<Vec<YSet>> {
    let probe = YCase {
        kind,
        eps,
        sigma: eps.map(|_| Sign::Plus),
        d,
        e,
        q,
    };
    probe.validate()?;
    let form = probe.form()?;
    let classes = classify_all(&form, e, budget)?;
    let ambient_count = classes.total();
    let sets: Vec<(YCase, Vec<Subspace>)> = match kind {
        FormKind::Orthogonal => vec![
            (YCase { sigma: Some(Sign::Plus), ..probe }, classes.plus),
            (YCase { sigma: Some(Sign::Minus), ..probe }, classes.minus),
        ],
        _ => vec![(probe, classes.nondegenerate)],
    };
    sets.into_iter()
        .map(|(case, members)| {
            let expected = case.closed_form_count()?;
            if BigUint::from(members.len()) != expected {
                return Err(Error::Consistency(format!(
                    "{case}: enumerated {} subspaces, closed form {expected}",
                    members.len()
                )));
            }
            Ok(YSet {
                case,
                members,
                ambient_count,
            })
        })
        .collect()
}

pub fn build_yset(case: &YCase, budget: u64) -> Result<YSet> {
    let sets = build_ysets(case.kind, case.eps, case.d, case.e, case.q, budget)?;
    Ok(sets
        .into_iter()
        .find(|s| s.case.sigma == case.sigma)
        .expect("one set per type"))
}

/// Number of pairs `(a, b)` with `a + b` direct. Requires
/// `dim a + dim b = d` for every pair.
pub fn count_pairs(field: &Field, a: &[Subspace], b: &[Subspace]) -> u64 {
    if field.q() == 2 {
        let pb: Vec<PackedBasis> = b.iter().map(Subspace::packed).collect();
        a.par_chunks(64)
            .map(|chunk| {
                chunk
                    .iter()
                    .map(|s| {
                        let ps = s.packed();
                        pb.iter().filter(|t| ps.complementary(t)).count() as u64
                    })
                    .sum::<u64>()
            })
            .sum()
    } else {
        a.par_chunks(16)
            .map(|chunk| {
                chunk
                    .iter()
                    .map(|s| b.iter().filter(|t| complementary_generic(field, s, t)).count() as u64)
                    .sum::<u64>()
            })
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CountMethod {
    FullPairs,
    TransitivityFastPath,
}

impl CountMethod {
    pub fn name(self) -> &'static str {
        match self {
            CountMethod::FullPairs => "full-pairs",
            CountMethod::TransitivityFastPath => "transitivity-fast-path",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "full-pairs" => Some(CountMethod::FullPairs),
            "transitivity-fast-path" => Some(CountMethod::TransitivityFastPath),
            _ => None,
        }
    }
}

impl fmt::Display for CountMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exact proportion of complementary pairs in `Y1 x Y2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountReport {
    pub case1: YCase,
    pub case2: YCase,
    pub y1: u64,
    pub y2: u64,
    /// `|Y_i| / |X_i|`.
    pub alpha1: ExactRational,
    pub alpha2: ExactRational,
    /// Complementary pairs in `Y1 x Y2`.
    pub pairs: u64,
    pub proportion: ExactRational,
    pub threshold: ExactRational,
    /// `proportion >= threshold`.
    pub pass: bool,
    pub method: CountMethod,
    pub seconds: f64,
}

fn check_pair_cases(y1: &YSet, y2: &YSet) -> Result<()> {
    if !y1.case.same_space(&y2.case) {
        return domain(format!("Y-sets live in different spaces: {} / {}", y1.case, y2.case));
    }
    if y1.case.e + y2.case.e != y1.case.d {
        return domain("subspace dimensions must add up to the ambient dimension");
    }
    if y1.members.is_empty() || y2.members.is_empty() {
        return domain("empty Y-set");
    }
    Ok(())
}

fn report(y1: &YSet, y2: &YSet, pairs: u64, method: CountMethod, start: Instant) -> Result<CountReport> {
    let c = &y1.case;
    let threshold = theorem_threshold(c.kind, c.e as u32, y2.case.e as u32, PrimePower::new(c.q)?);
    let proportion = ExactRational::new(BigInt::from(pairs), BigInt::from(y1.count()) * BigInt::from(y2.count()));
    let pass = proportion >= threshold;
    Ok(CountReport {
        case1: y1.case,
        case2: y2.case,
        y1: y1.count(),
        y2: y2.count(),
        alpha1: y1.density(),
        alpha2: y2.density(),
        pairs,
        proportion,
        threshold,
        pass,
        method,
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn count_complementary(y1: &YSet, y2: &YSet) -> Result<CountReport> {
    check_pair_cases(y1, y2)?;
    let start = Instant::now();
    let form = y1.case.form()?;
    let pairs = count_pairs(form.field(), &y1.members, &y2.members);
    report(y1, y2, pairs, CountMethod::FullPairs, start)
}

/// Counts against the first member of `Y1` only. Valid because the isometry
/// group acts transitively on `Y1`; the pair count is scaled by `|Y1|`.
pub fn count_complementary_transitive(y1: &YSet, y2: &YSet) -> Result<CountReport> {
    check_pair_cases(y1, y2)?;
    let start = Instant::now();
    let form = y1.case.form()?;
    let one = count_pairs(form.field(), &y1.members[..1], &y2.members);
    report(y1, y2, one * y1.count(), CountMethod::TransitivityFastPath, start)
}

/// The 0/1 matrix of `Gamma_{e1,e2}` in enumeration order.
#[derive(Debug, Clone)]
pub struct Biadjacency {
    pub e1: usize,
    pub e2: usize,
    pub q: u64,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl Biadjacency {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.cols + j] == 1
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.data.chunks(self.cols).map(|r| r.iter().map(|&x| u64::from(x)).sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.cols];
        for r in self.data.chunks(self.cols) {
            for (o, &x) in out.iter_mut().zip(r) {
                *o += u64::from(x);
            }
        }
        out
    }

    /// The common degree `q^(e1 e2)`.
    pub fn degree(&self) -> u64 {
        self.q.pow((self.e1 * self.e2) as u32)
    }

    /// Edges between a row subset and a column subset.
    pub fn edges_between(&self, y1: &[bool], y2: &[bool]) -> u64 {
        let mut e = 0;
        for (i, _) in y1.iter().enumerate().filter(|(_, &x)| x) {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            e += row.iter().zip(y2).filter(|(&a, &b)| a == 1 && b).count() as u64;
        }
        e
    }

    /// `N N^T` over the integers.
    pub fn gram(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                (0..self.rows)
                    .map(|j| {
                        let ri = &self.data[i * self.cols..(i + 1) * self.cols];
                        let rj = &self.data[j * self.cols..(j + 1) * self.cols];
                        BigInt::from(ri.iter().zip(rj).filter(|(&a, &b)| a & b == 1).count())
                    })
                    .collect()
            })
            .collect()
    }
}

pub fn build_biadjacency(e1: usize, e2: usize, q: u64, cap: u64) -> Result<Biadjacency> {
    if e1 == 0 || e2 == 0 {
        return domain("biadjacency needs e1, e2 >= 1");
    }
    let d = e1 + e2;
    let field = Field::new(q)?;
    let rows_count = crate::exactnum::gaussian_binomial(d as u32, e1 as u32, field.order())?;
    if rows_count > BigUint::from(cap) {
        return Err(Error::Budget {
            what: format!("biadjacency of Gamma_{{{e1},{e2}}} over F_{q}"),
            requested: rows_count.clone(),
            estimate: rows_count,
            budget: cap,
        });
    }
    let xs: Vec<Subspace> = enumerate_subspaces(d, e1, field.clone(), u64::MAX)?.iter().collect();
    let ys: Vec<Subspace> = enumerate_subspaces(d, e2, field.clone(), u64::MAX)?.iter().collect();
    let mut data = vec![0u8; xs.len() * ys.len()];
    for (i, s) in xs.iter().enumerate() {
        for (j, t) in ys.iter().enumerate() {
            if crate::linalg::complementary(&field, s, t)? {
                data[i * ys.len() + j] = 1;
            }
        }
    }
    Ok(Biadjacency {
        e1,
        e2,
        q,
        rows: xs.len(),
        cols: ys.len(),
        data,
    })
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    a[i].iter()
                        .zip(b)
                        .fold(BigInt::zero(), |acc, (x, row)| acc + x * &row[j])
                })
                .collect()
        })
        .collect()
}

/// Whether `prod_j (N N^T - q^(2 m_j) I) = 0` exactly.
pub fn annihilator_check(e1: usize, e2: usize, q: u64) -> Result<bool> {
    let n = build_biadjacency(e1, e2, q, BIADJACENCY_CAP)?;
    let spec = eigen_exponents(e1.max(e2) as u32, e1.min(e2) as u32)?;
    let targets = spec.squared_eigenvalues(PrimePower::new(q)?);
    let m = n.gram();
    let shifted = |t: &BigInt| -> Vec<Vec<BigInt>> {
        let mut s = m.clone();
        for (i, row) in s.iter_mut().enumerate() {
            row[i] -= t;
        }
        s
    };
    let mut acc = shifted(&targets[0]);
    for t in &targets[1..] {
        acc = mat_mul(&acc, &shifted(t));
    }
    Ok(acc.iter().all(|r| r.iter().all(Zero::is_zero)))
}

/// Characteristic polynomial `det(tI - A)` by Faddeev-LeVerrier; the
/// coefficients are returned from `t^n` down to the constant term.
pub fn char_poly(a: &[Vec<ExactRational>]) -> Vec<ExactRational> {
    let n = a.len();
    let identity = |c: &ExactRational| -> Vec<Vec<ExactRational>> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { c.clone() } else { ExactRational::zero() }).collect())
            .collect()
    };
    let mul = |x: &[Vec<ExactRational>], y: &[Vec<ExactRational>]| -> Vec<Vec<ExactRational>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(ExactRational::zero(), |acc, k| acc + &x[i][k] * &y[k][j]))
                    .collect()
            })
            .collect()
    };
    let mut coeffs = vec![ExactRational::one()];
    let mut m = identity(&ExactRational::zero());
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{k-1} I, c_k = -tr(A M_k) / k
        let prev = coeffs[k - 1].clone();
        let mut next = mul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &prev;
        }
        m = next;
        let am = mul(a, &m);
        let tr = (0..n).fold(ExactRational::zero(), |acc, i| acc + &am[i][i]);
        coeffs.push(-tr / ExactRational::from_integer(BigInt::from(k)));
    }
    coeffs
}

/// Both sides of the mixing inequality for one pair of vertex subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingOutcome {
    pub alpha1: ExactRational,
    pub alpha2: ExactRational,
    pub edges: u64,
    /// `(E/D - a1 a2)^2`.
    pub lhs_squared: ExactRational,
    /// `q^-d a1 a2 (1-a1)(1-a2)`.
    pub rhs_squared: ExactRational,
    pub holds: bool,
    pub equality: bool,
    /// Quotient-matrix identity; `None` when some `alpha_i` is 0 or 1.
    pub char_poly_identity: Option<bool>,
}

fn frac(n: u64, d: u64) -> ExactRational {
    ExactRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn mixing_check(n: &Biadjacency, y1: &[bool], y2: &[bool]) -> Result<MixingOutcome> {
    if y1.len() != n.rows || y2.len() != n.cols {
        return domain("subset masks do not match the biadjacency shape");
    }
    if n.rows != n.cols {
        return domain("mixing check needs equal sides");
    }
    let size = n.rows as u64;
    let k = n.degree();
    let s1 = y1.iter().filter(|&&x| x).count() as u64;
    let s2 = y2.iter().filter(|&&x| x).count() as u64;
    let edges = n.edges_between(y1, y2);
    let a1 = frac(s1, size);
    let a2 = frac(s2, size);
    let one = ExactRational::one();
    let d = n.e1 + n.e2;
    let dev = frac(edges, k * size) - &a1 * &a2;
    let lhs_squared = &dev * &dev;
    let qd = ExactRational::from_integer(num_traits::pow(BigInt::from(n.q), d));
    let rhs_squared = &a1 * &a2 * (&one - &a1) * (&one - &a2) / qd;
    let holds = lhs_squared <= rhs_squared;
    let equality = lhs_squared == rhs_squared;

    let char_poly_identity = if s1 == 0 || s1 == size || s2 == 0 || s2 == size {
        None
    } else {
        // parts: Y1, X1\Y1, Y2, X2\Y2; B[i][j] = mean neighbours in part j
        let (e, k_, s1_, s2_, n_) = (edges, k, s1, s2, size);
        let b12 = frac(e, s1_);
        let b13 = frac(k_ * s1_ - e, s1_);
        let b02 = frac(k_ * s2_ - e, n_ - s1_);
        let b03 = frac(k_ * (n_ - s1_) - (k_ * s2_ - e), n_ - s1_);
        let c10 = frac(e, s2_);
        let c11 = frac(k_ * s2_ - e, s2_);
        let c20 = frac(k_ * s1_ - e, n_ - s2_);
        let c21 = frac(k_ * (n_ - s2_) - (k_ * s1_ - e), n_ - s2_);
        let z = ExactRational::zero;
        let b = vec![
            vec![z(), z(), b12, b13],
            vec![z(), z(), b02, b03],
            vec![c10, c11, z(), z()],
            vec![c20, c21, z(), z()],
        ];
        let cp = char_poly(&b);
        let kk = ExactRational::from_integer(BigInt::from(k));
        let delta = frac(size * size, 1) * &a1 * &a2 * (&one - &a1) * (&one - &a2);
        let gamma = ExactRational::from_integer(BigInt::from(edges)) - &kk * frac(size, 1) * &a1 * &a2;
        let g2 = &gamma * &gamma / &delta;
        let k2 = &kk * &kk;
        let expected = vec![one.clone(), z(), -(&k2 + &g2), z(), &k2 * &g2];
        Some(cp == expected)
    };
    Ok(MixingOutcome {
        alpha1: a1,
        alpha2: a2,
        edges,
        lhs_squared,
        rhs_squared,
        holds,
        equality,
        char_poly_identity,
    })
}

/// Aggregate of a seeded mixing-lemma run.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingSuiteReport {
    pub e1: usize,
    pub e2: usize,
    pub q: u64,
    pub seed: u64,
    pub random_pairs: usize,
    pub checked: usize,
    pub held: usize,
    pub equalities: usize,
    pub char_poly_checked: usize,
    pub char_poly_held: usize,
    /// Description of the first violated case, if any.
    pub first_failure: Option<String>,
}

impl MixingSuiteReport {
    pub fn pass(&self) -> bool {
        self.held == self.checked && self.char_poly_held == self.char_poly_checked
    }
}

fn mask_from(indices: impl IntoIterator<Item = usize>, n: usize) -> Vec<bool> {
    let mut m = vec![false; n];
    for i in indices {
        m[i] = true;
    }
    m
}

fn random_mask(rng: &mut ChaCha8Rng, n: usize) -> Vec<bool> {
    let size = rng.gen_range(0..=n);
    mask_from(sample(rng, n, size).into_iter(), n)
}

/// Boundary cases, neighbourhoods of fixed vertices, and `random_pairs`
/// seeded random subset pairs.
pub fn mixing_suite(e1: usize, e2: usize, q: u64, random_pairs: usize, seed: u64) -> Result<MixingSuiteReport> {
    let n = build_biadjacency(e1, e2, q, BIADJACENCY_CAP)?;
    let (r, c) = (n.rows, n.cols);
    let mut cases: Vec<(String, Vec<bool>, Vec<bool>)> = Vec::new();
    let none_r = vec![false; r];
    let all_r = vec![true; r];
    let none_c = vec![false; c];
    let all_c = vec![true; c];
    let half_c = mask_from((0..c).step_by(2), c);
    let half_r = mask_from((0..r).step_by(3), r);
    cases.push(("Y1 = X1".into(), all_r.clone(), half_c.clone()));
    cases.push(("Y1 = empty".into(), none_r.clone(), half_c));
    cases.push(("Y2 = X2".into(), half_r.clone(), all_c.clone()));
    cases.push(("Y2 = empty".into(), half_r, none_c));
    cases.push(("full".into(), all_r, all_c));
    for v in [0, r / 2, r - 1] {
        let nbhd = mask_from((0..c).filter(|&j| n.get(v, j)), c);
        cases.push((format!("Y1 = {{{v}}}, Y2 = N({v})"), mask_from([v], r), nbhd.clone()));
        let non_nbhd: Vec<bool> = nbhd.iter().map(|x| !x).collect();
        cases.push((format!("Y1 = {{{v}}}, Y2 = X2 \\ N({v})"), mask_from([v], r), non_nbhd));
        let w = (v * 7 + 1) % c;
        let back = mask_from((0..r).filter(|&i| n.get(i, w)), r);
        cases.push((format!("Y1 = N(col {w}), Y2 = N({v})"), back, nbhd));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..random_pairs {
        let a = random_mask(&mut rng, r);
        let b = random_mask(&mut rng, c);
        cases.push((format!("random pair {t}"), a, b));
    }
    let mut out = MixingSuiteReport {
        e1,
        e2,
        q,
        seed,
        random_pairs,
        checked: 0,
        held: 0,
        equalities: 0,
        char_poly_checked: 0,
        char_poly_held: 0,
        first_failure: None,
    };
    for (name, a, b) in &cases {
        let m = mixing_check(&n, a, b)?;
        out.checked += 1;
        let mut ok = m.holds;
        if m.holds {
            out.held += 1;
        }
        if m.equality {
            out.equalities += 1;
        }
        if let Some(cp) = m.char_poly_identity {
            out.char_poly_checked += 1;
            if cp {
                out.char_poly_held += 1;
            }
            ok &= cp;
        }
        if !ok && out.first_failure.is_none() {
            out.first_failure = Some(name.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::linalg::DEFAULT_BUDGET;

    fn yset(case: YCase) -> YSet {
        build_yset(&case, DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn yset_examples() {
        assert_eq!(yset(YCase::symplectic(4, 2, 2)).count(), 20);
        assert_eq!(yset(YCase::orthogonal(Sign::Plus, Sign::Minus, 4, 2, 2)).count(), 2);
        assert_eq!(yset(YCase::orthogonal(Sign::Plus, Sign::Plus, 4, 2, 2)).count(), 18);
        assert_eq!(yset(YCase::hermitian(2, 1, 2)).count(), 2);
        assert!(build_yset(&YCase::symplectic(4, 1, 2), DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn orthogonal_partition_is_complete() {
        for q in [2, 3] {
            for eps in Sign::BOTH {
                let sets = build_ysets(FormKind::Orthogonal, Some(eps), 6, 2, q, DEFAULT_BUDGET).unwrap();
                let typed: u64 = sets.iter().map(YSet::count).sum();
                let form = standard_form(FormKind::Orthogonal, 6, q, Some(eps)).unwrap();
                let c = classify_all(&form, 2, DEFAULT_BUDGET).unwrap();
                assert_eq!(c.total(), sets[0].ambient_count());
                assert_eq!(typed + c.degenerate, c.total());
            }
        }
    }

    #[test]
    fn hermitian_tight_case() {
        let y = yset(YCase::hermitian(2, 1, 2));
        let full = count_complementary(&y, &y).unwrap();
        assert_eq!(full.pairs, 2);
        assert_eq!(full.proportion, rat(1, 2));
        assert_eq!(full.threshold, rat(1, 2));
        assert!(full.pass);
        let fast = count_complementary_transitive(&y, &y).unwrap();
        assert_eq!(fast.proportion, full.proportion);
    }

    #[test]
    fn transitive_agrees_with_full_pairs() {
        let y = yset(YCase::symplectic(4, 2, 2));
        assert_eq!(
            count_complementary(&y, &y).unwrap().proportion,
            count_complementary_transitive(&y, &y).unwrap().proportion
        );
        for s1 in Sign::BOTH {
            for s2 in Sign::BOTH {
                let a = yset(YCase::orthogonal(Sign::Plus, s1, 4, 2, 2));
                let b = yset(YCase::orthogonal(Sign::Plus, s2, 4, 2, 2));
                let full = count_complementary(&a, &b).unwrap();
                let fast = count_complementary_transitive(&a, &b).unwrap();
                assert_eq!(full.proportion, fast.proportion);
                assert_eq!(full.pairs, fast.pairs);
                assert!(full.pairs <= full.y1 * full.y2);
            }
        }
        let minus = yset(YCase::orthogonal(Sign::Plus, Sign::Minus, 4, 2, 2));
        let r = count_complementary(&minus, &minus).unwrap();
        assert_eq!((r.y1, r.y2), (2, 2));
        assert_eq!(r.threshold, rat(1, 4));
    }

    #[test]
    fn unfiltered_proportion_is_regular_density() {
        for (d, e, q) in [(4usize, 2usize, 2u64), (4, 2, 3), (6, 2, 2), (5, 2, 2)] {
            let field = Field::new(q).unwrap();
            let a: Vec<Subspace> = enumerate_subspaces(d, e, field.clone(), DEFAULT_BUDGET).unwrap().iter().collect();
            let b: Vec<Subspace> = enumerate_subspaces(d, d - e, field.clone(), DEFAULT_BUDGET).unwrap().iter().collect();
            let pairs = count_pairs(&field, &a, &b);
            let k = q.pow((e * (d - e)) as u32);
            assert_eq!(pairs, k * a.len() as u64);
        }
    }

    #[test]
    fn biadjacency_examples() {
        let n = build_biadjacency(1, 1, 2, BIADJACENCY_CAP).unwrap();
        assert_eq!((n.rows(), n.cols()), (3, 3));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(n.get(i, j), i != j);
            }
        }
        let n = build_biadjacency(2, 1, 2, BIADJACENCY_CAP).unwrap();
        assert_eq!(n.rows(), 7);
        assert!(n.row_sums().iter().chain(&n.col_sums()).all(|&s| s == 4));
        let n = build_biadjacency(2, 2, 2, BIADJACENCY_CAP).unwrap();
        assert_eq!(n.rows(), 35);
        assert!(n.row_sums().iter().chain(&n.col_sums()).all(|&s| s == 16));
        assert!(matches!(build_biadjacency(4, 4, 2, BIADJACENCY_CAP), Err(Error::Budget { .. })));
    }

    #[test]
    fn annihilator_examples() {
        for (e1, e2, q) in [(1, 1, 2), (1, 1, 3), (2, 1, 2), (2, 2, 2), (2, 1, 3), (3, 1, 2)] {
            assert!(annihilator_check(e1, e2, q).unwrap(), "({e1},{e2},{q})");
        }
    }

    #[test]
    fn annihilator_rejects_wrong_spectrum() {
        // dropping one factor must leave a nonzero matrix
        let n = build_biadjacency(2, 2, 2, BIADJACENCY_CAP).unwrap();
        let m = n.gram();
        let shift = |t: i64| {
            let mut s = m.clone();
            for (i, r) in s.iter_mut().enumerate() {
                r[i] -= BigInt::from(t);
            }
            s
        };
        let p = mat_mul(&shift(256), &shift(16));
        assert!(p.iter().any(|r| r.iter().any(|x| !x.is_zero())));
    }

    #[test]
    fn char_poly_of_small_matrices() {
        let m = vec![vec![rat(2, 1), rat(1, 1)], vec![rat(1, 1), rat(2, 1)]];
        assert_eq!(char_poly(&m), vec![rat(1, 1), rat(-4, 1), rat(3, 1)]);
    }

    #[test]
    fn mixing_boundaries_hold_with_equality() {
        let n = build_biadjacency(2, 2, 2, BIADJACENCY_CAP).unwrap();
        let all = vec![true; 35];
        let none = vec![false; 35];
        let some = mask_from([0, 3, 9], 35);
        for (a, b) in [(&all, &some), (&none, &some), (&some, &all)] {
            let m = mixing_check(&n, a, b).unwrap();
            assert!(m.holds && m.equality);
            assert_eq!(m.char_poly_identity, None);
        }
    }

    #[test]
    fn mixing_suites() {
        for (e1, e2, q) in [(2, 2, 2), (2, 1, 3)] {
            let r = mixing_suite(e1, e2, q, 100, 7).unwrap();
            assert!(r.pass(), "{r:?}");
            assert!(r.char_poly_checked > 50);
        }
    }

    #[test]
    fn random_masks_are_seeded() {
        let a = random_mask(&mut ChaCha8Rng::seed_from_u64(3), 50);
        let b = random_mask(&mut ChaCha8Rng::seed_from_u64(3), 50);
        assert_eq!(a, b);
    }
}
