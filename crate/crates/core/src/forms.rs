//! Orthogonal, symplectic and hermitian forms on `F^d`.
//!
//! Quadratic forms are stored by their upper-triangular coefficient grid
//! `Q(x) = sum_{i<=j} c_ij x_i x_j`; the polar form `C + C^T` is derived
//! from it. In characteristic 2 the polar form does not determine `Q`.

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::exactnum::Sign;
use crate::gf::{Field, FieldElem};
use crate::linalg::{MatGF, Subspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormKind {
    Orthogonal,
    Symplectic,
    Hermitian,
}

impl FormKind {
    pub fn name(self) -> &'static str {
        match self {
            FormKind::Orthogonal => "orthogonal",
            FormKind::Symplectic => "symplectic",
            FormKind::Hermitian => "hermitian",
        }
    }

    /// Accepts `unitary` as a synonym for `hermitian`.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "orthogonal" => Some(FormKind::Orthogonal),
            "symplectic" => Some(FormKind::Symplectic),
            "hermitian" | "unitary" => Some(FormKind::Hermitian),
            _ => None,
        }
    }
}

impl fmt::Display for FormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A non-degenerate classical form on `F^d`. For hermitian forms the field
/// is `F_{q^2}`.
#[derive(Debug, Clone)]
pub struct ClassicalForm {
    kind: FormKind,
    dim: usize,
    field: Arc<Field>,
    gram: MatGF,
    quad: Option<MatGF>,
    declared_type: Option<Sign>,
    delta: Option<FieldElem>,
}

/// A form restricted to the span of a basis.
#[derive(Debug, Clone)]
pub struct RestrictedForm {
    kind: FormKind,
    field: Arc<Field>,
    gram: MatGF,
    /// Orthogonal only: `Q(b_i)` on the diagonal, `B(b_i, b_j)` above it.
    quad: Option<MatGF>,
}

/// Least `delta` (in element order) with `x^2 + xy + delta y^2` anisotropic.
pub fn anisotropic_delta(field: &Field) -> FieldElem {
    field
        .elements()
        .find(|&delta| {
            field.elements().all(|x| {
                field.elements().all(|y| {
                    if x.is_zero() && y.is_zero() {
                        return true;
                    }
                    let v = field.add(
                        field.add(field.mul(x, x), field.mul(x, y)),
                        field.mul(delta, field.mul(y, y)),
                    );
                    !v.is_zero()
                })
            })
        })
        .expect("every finite field has an anisotropic binary quadratic form")
}

/// The standard model of each geometry:
/// - orthogonal `+`: hyperbolic planes `x_{2i} x_{2i+1}`;
/// - orthogonal `-`: the same with the last plane replaced by
///   `x^2 + xy + delta y^2` (see [`anisotropic_delta`]);
/// - symplectic: gram `[[0, I], [-I, 0]]`, pairing `e_i` with `e_{i+m}`;
/// - hermitian: identity gram over `F_{q^2}`.
pub fn standard_form(kind: FormKind, d: usize, q: u64, eps: Option<Sign>) -> Result<ClassicalForm> {
    if d == 0 {
        return domain("form dimension must be positive");
    }
    if d > crate::linalg::MAX_DIM {
        return domain(format!("form dimension {d} exceeds {}", crate::linalg::MAX_DIM));
    }
    match kind {
        FormKind::Orthogonal => {
            let Some(eps) = eps else {
                return domain("orthogonal form needs a type");
            };
            if d % 2 == 1 {
                return domain("orthogonal forms are only modelled in even dimension");
            }
            let field = Field::new(q)?;
            let mut c = MatGF::zeros(d, d);
            let planes = d / 2;
            let hyperbolic = if eps == Sign::Plus { planes } else { planes - 1 };
            for i in 0..hyperbolic {
                c.set(2 * i, 2 * i + 1, FieldElem::ONE);
            }
            let mut delta = None;
            if eps == Sign::Minus {
                let dl = anisotropic_delta(&field);
                c.set(d - 2, d - 2, FieldElem::ONE);
                c.set(d - 2, d - 1, FieldElem::ONE);
                c.set(d - 1, d - 1, dl);
                delta = Some(dl);
            }
            let gram = polar_of(&field, &c);
            Ok(ClassicalForm {
                kind,
                dim: d,
                field,
                gram,
                quad: Some(c),
                declared_type: Some(eps),
                delta,
            })
        }
        FormKind::Symplectic => {
            if d % 2 == 1 {
                return domain("symplectic forms need even dimension");
            }
            let field = Field::new(q)?;
            let m = d / 2;
            let mut gram = MatGF::zeros(d, d);
            for i in 0..m {
                gram.set(i, i + m, FieldElem::ONE);
                gram.set(i + m, i, field.neg(FieldElem::ONE));
            }
            Ok(ClassicalForm {
                kind,
                dim: d,
                field,
                gram,
                quad: None,
                declared_type: None,
                delta: None,
            })
        }
        FormKind::Hermitian => {
            let field = Field::quadratic_extension(q)?;
            Ok(ClassicalForm {
                kind,
                dim: d,
                field,
                gram: MatGF::identity(d),
                quad: None,
                declared_type: None,
                delta: None,
            })
        }
    }
}

fn polar_of(field: &Field, c: &MatGF) -> MatGF {
    let n = c.rows();
    let mut g = MatGF::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g.set(i, j, field.add(c.get(i, j), c.get(j, i)));
        }
    }
    g
}

fn dot(field: &Field, a: &[FieldElem], b: &[FieldElem]) -> FieldElem {
    a.iter()
        .zip(b)
        .fold(FieldElem::ZERO, |acc, (&x, &y)| field.add(acc, field.mul(x, y)))
}

impl ClassicalForm {
    pub fn kind(&self) -> FormKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn gram(&self) -> &MatGF {
        &self.gram
    }

    pub fn quad_coeffs(&self) -> Option<&MatGF> {
        self.quad.as_ref()
    }

    pub fn declared_type(&self) -> Option<Sign> {
        self.declared_type
    }

    /// The anisotropic-plane constant of an orthogonal `-` model.
    pub fn delta(&self) -> Option<FieldElem> {
        self.delta
    }

    /// `G y` for bilinear forms, `G conj(y)` for hermitian ones.
    fn pair_vector(&self, y: &[FieldElem]) -> Vec<FieldElem> {
        let f = &self.field;
        let y: Vec<FieldElem> = match self.kind {
            FormKind::Hermitian => y.iter().map(|&v| f.conj_unchecked(v)).collect(),
            _ => y.to_vec(),
        };
        (0..self.dim).map(|k| dot(f, self.gram.row(k), &y)).collect()
    }

    /// The bilinear (polar, alternating or hermitian) pairing `B(x, y)`.
    pub fn pair(&self, x: &[FieldElem], y: &[FieldElem]) -> FieldElem {
        dot(&self.field, x, &self.pair_vector(y))
    }

    /// `Q(x)` of an orthogonal form.
    pub fn quad_value(&self, x: &[FieldElem]) -> Result<FieldElem> {
        let Some(c) = &self.quad else {
            return domain("quadratic value of a non-orthogonal form");
        };
        Ok(quad_eval(&self.field, c, x))
    }

    /// Restriction to the span of the rows of `basis` (`e x d`, row-major).
    pub fn restrict_basis(&self, basis: &[FieldElem], e: usize) -> RestrictedForm {
        let d = self.dim;
        let f = &self.field;
        let rows: Vec<&[FieldElem]> = (0..e).map(|i| &basis[i * d..(i + 1) * d]).collect();
        let images: Vec<Vec<FieldElem>> = rows.iter().map(|r| self.pair_vector(r)).collect();
        let mut gram = MatGF::zeros(e, e);
        for i in 0..e {
            for j in 0..e {
                gram.set(i, j, dot(f, rows[i], &images[j]));
            }
        }
        let quad = self.quad.as_ref().map(|c| {
            let mut r = MatGF::zeros(e, e);
            for i in 0..e {
                r.set(i, i, quad_eval(f, c, rows[i]));
                for j in i + 1..e {
                    r.set(i, j, gram.get(i, j));
                }
            }
            r
        });
        RestrictedForm {
            kind: self.kind,
            field: f.clone(),
            gram,
            quad,
        }
    }

    pub fn restrict(&self, s: &Subspace) -> Result<RestrictedForm> {
        if s.ambient_dim() != self.dim {
            return domain(format!(
                "subspace of F^{} restricted to a form on F^{}",
                s.ambient_dim(),
                self.dim
            ));
        }
        Ok(self.restrict_basis(s.basis_flat(), s.dim()))
    }

    /// `S^perp = { v : B(v, s) = 0 for all s in S }`.
    pub fn perp(&self, s: &Subspace) -> Result<Subspace> {
        if s.ambient_dim() != self.dim {
            return domain("perp of a subspace from another ambient space");
        }
        if s.dim() == 0 {
            return Ok(Subspace::full(self.dim));
        }
        let rows: Vec<Vec<FieldElem>> = (0..s.dim()).map(|i| self.pair_vector(s.basis_row(i))).collect();
        let m = MatGF::from_rows(&rows)?;
        let kernel = m.nullspace(&self.field);
        Subspace::span(&self.field, self.dim, &kernel)
    }
}

fn quad_eval(field: &Field, c: &MatGF, x: &[FieldElem]) -> FieldElem {
    let n = x.len();
    let mut acc = FieldElem::ZERO;
    for i in 0..n {
        if x[i].is_zero() {
            continue;
        }
        let mut row = FieldElem::ZERO;
        for j in i..n {
            row = field.add(row, field.mul(c.get(i, j), x[j]));
        }
        acc = field.add(acc, field.mul(x[i], row));
    }
    acc
}

/// Number of nonzero singular vectors of a non-degenerate `2m`-dimensional
/// quadratic space of the given type.
pub fn singular_count(sign: Sign, m: u32, q: u64) -> u64 {
    let qm = q.pow(m);
    let qm1 = q.pow(m - 1);
    match sign {
        Sign::Plus => (qm - 1) * (qm1 + 1),
        Sign::Minus => (qm + 1) * (qm1 - 1),
    }
}

impl RestrictedForm {
    pub fn kind(&self) -> FormKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &MatGF {
        &self.gram
    }

    pub fn quad_coeffs(&self) -> Option<&MatGF> {
        self.quad.as_ref()
    }

    /// Number of nonzero `c` in `F^e` with `Q(c) = 0`, by evaluation.
    pub fn singular_vectors(&self) -> Result<u64> {
        let Some(r) = &self.quad else {
            return domain("singular vectors of a non-orthogonal form");
        };
        let e = self.dim();
        let f = &self.field;
        let q = f.q() as u8;
        let mut c = vec![FieldElem::ZERO; e];
        let mut count = 0;
        loop {
            let mut k = e;
            loop {
                if k == 0 {
                    return Ok(count);
                }
                k -= 1;
                if c[k].0 + 1 < q {
                    c[k].0 += 1;
                    break;
                }
                c[k].0 = 0;
            }
            if quad_eval(f, r, &c).is_zero() {
                count += 1;
            }
        }
    }

    /// Symplectic/hermitian: full-rank gram. Orthogonal: the radical of the
    /// polar form contains no nonzero singular vector. Over a finite field
    /// that means a zero radical, or in characteristic 2 a one-dimensional
    /// radical on which `Q` does not vanish.
    pub fn is_nondegenerate(&self) -> bool {
        let e = self.dim();
        match &self.quad {
            None => self.gram.rank(&self.field) == e,
            Some(r) => {
                let polar = polar_of(&self.field, r);
                let radical = polar.nullspace(&self.field);
                match radical.len() {
                    0 => true,
                    1 if self.field.characteristic() == 2 => !quad_eval(&self.field, r, &radical[0]).is_zero(),
                    _ => false,
                }
            }
        }
    }

    /// Type of a non-degenerate even-dimensional orthogonal restriction,
    /// from its number of singular vectors.
    pub fn orthogonal_type(&self) -> Result<Sign> {
        let e = self.dim();
        if self.quad.is_none() {
            return domain("type of a non-orthogonal form");
        }
        if e == 0 || e % 2 == 1 {
            return domain(format!("orthogonal type needs even positive dimension, got {e}"));
        }
        let q = self.field.q() as u64;
        let m = (e / 2) as u32;
        let n = self.singular_vectors()?;
        if n == singular_count(Sign::Plus, m, q) {
            Ok(Sign::Plus)
        } else if n == singular_count(Sign::Minus, m, q) {
            Ok(Sign::Minus)
        } else {
            Err(Error::Consistency(format!(
                "{n} singular vectors fits neither type in dimension {e} over F_{q}"
            )))
        }
    }
}
