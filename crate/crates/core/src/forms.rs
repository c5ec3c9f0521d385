//! Points of projective 3-space and homogeneous forms in X, Y, Z, W.
//!
//! Monomials are ordered degree-lex with X > Y > Z > W. That order is the
//! single source of truth for every coefficient vector in the crate and in
//! certificates:
//!
//! quadratic: `X² XY XZ XW Y² YZ YW Z² ZW W²`
//!
//! cubic: `X³ X²Y X²Z X²W XY² XYZ XYW XZ² XZW XW² Y³ Y²Z Y²W YZ² YZW YW² Z³ Z²W ZW² W³`

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Field, Gf8, HasQuadraticExtension};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("expected {expected} coefficients, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("cannot parse coefficient list: {0}")]
    Parse(String),
    #[error("coordinates are all zero")]
    ZeroPoint,
}

/// Exponent vectors of all degree-`d` monomials in four variables, degree-lex
/// with X > Y > Z > W.
pub fn monomials_of_degree(d: u8) -> Vec<[u8; 4]> {
    let mut out = Vec::new();
    for a in (0..=d).rev() {
        for b in (0..=d - a).rev() {
            for c in (0..=d - a - b).rev() {
                out.push([a, b, c, d - a - b - c]);
            }
        }
    }
    out
}

pub const QUADRATIC_MONOMIALS: [[u8; 4]; 10] = [
    [2, 0, 0, 0],
    [1, 1, 0, 0],
    [1, 0, 1, 0],
    [1, 0, 0, 1],
    [0, 2, 0, 0],
    [0, 1, 1, 0],
    [0, 1, 0, 1],
    [0, 0, 2, 0],
    [0, 0, 1, 1],
    [0, 0, 0, 2],
];

pub const CUBIC_MONOMIALS: [[u8; 4]; 20] = [
    [3, 0, 0, 0],
    [2, 1, 0, 0],
    [2, 0, 1, 0],
    [2, 0, 0, 1],
    [1, 2, 0, 0],
    [1, 1, 1, 0],
    [1, 1, 0, 1],
    [1, 0, 2, 0],
    [1, 0, 1, 1],
    [1, 0, 0, 2],
    [0, 3, 0, 0],
    [0, 2, 1, 0],
    [0, 2, 0, 1],
    [0, 1, 2, 0],
    [0, 1, 1, 1],
    [0, 1, 0, 2],
    [0, 0, 3, 0],
    [0, 0, 2, 1],
    [0, 0, 1, 2],
    [0, 0, 0, 3],
];

/// Named positions in the cubic coefficient vector.
pub mod cubic_index {
    pub const X3: usize = 0;
    pub const X2Y: usize = 1;
    pub const X2Z: usize = 2;
    pub const X2W: usize = 3;
    pub const XY2: usize = 4;
    pub const XYZ: usize = 5;
    pub const XYW: usize = 6;
    pub const XZ2: usize = 7;
    pub const XZW: usize = 8;
    pub const XW2: usize = 9;
    pub const Y3: usize = 10;
    pub const Y2Z: usize = 11;
    pub const Y2W: usize = 12;
    pub const YZ2: usize = 13;
    pub const YZW: usize = 14;
    pub const YW2: usize = 15;
    pub const Z3: usize = 16;
    pub const Z2W: usize = 17;
    pub const ZW2: usize = 18;
    pub const W3: usize = 19;
}

/// Human-readable monomial name, e.g. `X^2Y`.
pub fn monomial_name(exps: &[u8; 4]) -> String {
    let mut s = String::new();
    for (v, &e) in ["X", "Y", "Z", "W"].iter().zip(exps) {
        match e {
            0 => {}
            1 => s.push_str(v),
            _ => {
                s.push_str(v);
                s.push('^');
                s.push_str(&e.to_string());
            }
        }
    }
    s
}

/// Value of a monomial at a coordinate vector.
#[inline]
pub fn eval_monomial<F: Field>(exps: &[u8; 4], x: &[F; 4]) -> F {
    let mut acc = F::one();
    for (&xi, &e) in x.iter().zip(exps) {
        for _ in 0..e {
            acc *= xi;
        }
    }
    acc
}

/// A point of P³ stored by its canonical representative: the first nonzero
/// coordinate is 1.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjPoint<F>([F; 4]);

impl<F: Field> ProjPoint<F> {
    /// Normalizes `coords`; fails on the zero vector.
    pub fn new(coords: [F; 4]) -> Result<Self, FormError> {
        let lead = coords
            .iter()
            .find(|c| !c.is_zero())
            .ok_or(FormError::ZeroPoint)?;
        let s = lead.inv().expect("nonzero");
        Ok(ProjPoint(coords.map(|c| c * s)))
    }

    pub fn from_codecs(codecs: [usize; 4]) -> Result<Self, FormError> {
        Self::new(codecs.map(F::from_index))
    }

    pub fn coords(&self) -> &[F; 4] {
        &self.0
    }

    pub fn codecs(&self) -> [usize; 4] {
        self.0.map(|c| c.index())
    }

    pub fn map_field<E: Field>(&self, f: impl Fn(F) -> E) -> ProjPoint<E> {
        ProjPoint(self.0.map(f))
    }
}

impl<F: Field + HasQuadraticExtension> ProjPoint<F> {
    pub fn embed(&self) -> ProjPoint<F::Ext> {
        ProjPoint(self.0.map(|c| c.embed()))
    }
}

impl<F: Field> fmt::Debug for ProjPoint<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:?}:{:?}:{:?}:{:?}]",
            self.0[0], self.0[1], self.0[2], self.0[3]
        )
    }
}

/// All points of P³ over `F`, in lexicographic order of their codecs.
pub fn enumerate_points<F: Field>() -> Vec<ProjPoint<F>> {
    let q = F::ORDER;
    let mut out = Vec::with_capacity((q.pow(4) - 1) / (q - 1));
    // Canonical vectors sorted lexicographically: leading 1 as far right as possible first.
    for lead in (0..4).rev() {
        let tail = 3 - lead;
        for t in 0..q.pow(tail as u32) {
            let mut c = [F::zero(); 4];
            c[lead] = F::one();
            let mut rest = t;
            for pos in (lead + 1..4).rev() {
                c[pos] = F::from_index(rest % q);
                rest /= q;
            }
            out.push(ProjPoint(c));
        }
    }
    out
}

/// 4×4 matrix acting on column vectors; as a change of variables it sends a
/// form `f` to `x ↦ f(M x)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Matrix4<F>(pub [[F; 4]; 4]);

impl<F: Field> Matrix4<F> {
    pub fn identity() -> Self {
        let mut m = [[F::zero(); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = F::one();
        }
        Matrix4(m)
    }

    /// Permutation matrix sending coordinate `perm[i]` into slot `i`.
    pub fn permutation(perm: [usize; 4]) -> Self {
        let mut m = [[F::zero(); 4]; 4];
        for (i, &j) in perm.iter().enumerate() {
            m[i][j] = F::one();
        }
        Matrix4(m)
    }

    pub fn from_codecs(rows: [[usize; 4]; 4]) -> Self {
        Matrix4(rows.map(|r| r.map(F::from_index)))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = [[F::zero(); 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                for k in 0..4 {
                    *slot += self.0[i][k] * rhs.0[k][j];
                }
            }
        }
        Matrix4(out)
    }

    pub fn apply_vec(&self, v: &[F; 4]) -> [F; 4] {
        let mut out = [F::zero(); 4];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, &vj) in v.iter().enumerate() {
                *o += self.0[i][j] * vj;
            }
        }
        out
    }

    pub fn apply(&self, p: &ProjPoint<F>) -> Result<ProjPoint<F>, FormError> {
        ProjPoint::new(self.apply_vec(p.coords())).map_err(|_| FormError::SingularMatrix)
    }

    pub fn det(&self) -> F {
        let mut a = self.0;
        let mut det = F::one();
        for col in 0..4 {
            let Some(piv) = (col..4).find(|&r| !a[r][col].is_zero()) else {
                return F::zero();
            };
            a.swap(col, piv);
            let p = a[col][col];
            det *= p;
            let pinv = p.inv().expect("nonzero pivot");
            for r in col + 1..4 {
                let f = a[r][col] * pinv;
                if !f.is_zero() {
                    for c in col..4 {
                        let v = a[col][c];
                        a[r][c] += f * v;
                    }
                }
            }
        }
        det
    }

    pub fn is_invertible(&self) -> bool {
        !self.det().is_zero()
    }
}

impl<F: Field> fmt::Debug for Matrix4<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Behaviour shared by quadratic and cubic forms.
pub trait HomogeneousForm<F: Field>: Sized + Clone {
    const DEGREE: u8;
    fn monomials() -> &'static [[u8; 4]];
    fn coeffs(&self) -> &[F];
    fn from_coeff_slice(c: &[F]) -> Result<Self, FormError>;

    fn is_zero(&self) -> bool {
        self.coeffs().iter().all(|c| c.is_zero())
    }

    /// Direct evaluation at a coordinate vector.
    fn eval_vec(&self, x: &[F; 4]) -> F {
        let mut acc = F::zero();
        for (c, m) in self.coeffs().iter().zip(Self::monomials()) {
            if !c.is_zero() {
                acc += *c * eval_monomial(m, x);
            }
        }
        acc
    }

    fn eval(&self, p: &ProjPoint<F>) -> F {
        self.eval_vec(p.coords())
    }

    fn vanishes_at(&self, p: &ProjPoint<F>) -> bool {
        self.eval(p).is_zero()
    }

    /// The form `x ↦ f(M x)`.
    fn substitute(&self, m: &Matrix4<F>) -> Result<Self, FormError> {
        if !m.is_invertible() {
            return Err(FormError::SingularMatrix);
        }
        let monos = Self::monomials();
        let mut out = vec![F::zero(); monos.len()];
        for (c, exps) in self.coeffs().iter().zip(monos) {
            if c.is_zero() {
                continue;
            }
            // Product of the linear forms (M x)_i, expanded one factor at a time.
            let mut poly: Vec<([u8; 4], F)> = vec![([0; 4], *c)];
            for (var, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    let mut next: Vec<([u8; 4], F)> = Vec::with_capacity(poly.len() * 4);
                    for (mono, coef) in &poly {
                        for (j, &mij) in m.0[var].iter().enumerate() {
                            if mij.is_zero() {
                                continue;
                            }
                            let mut nm = *mono;
                            nm[j] += 1;
                            let v = *coef * mij;
                            match next.iter_mut().find(|(k, _)| *k == nm) {
                                Some((_, acc)) => *acc += v,
                                None => next.push((nm, v)),
                            }
                        }
                    }
                    poly = next;
                }
            }
            for (mono, coef) in poly {
                let idx = monos.iter().position(|m| *m == mono).expect("degree preserved");
                out[idx] += coef;
            }
        }
        Self::from_coeff_slice(&out)
    }

    /// Coefficient-wise scalar multiple.
    fn scale(&self, s: F) -> Self {
        let c: Vec<F> = self.coeffs().iter().map(|&x| x * s).collect();
        Self::from_coeff_slice(&c).expect("same length")
    }

    /// Coefficient-wise sum.
    fn plus(&self, other: &Self) -> Self {
        let c: Vec<F> = self
            .coeffs()
            .iter()
            .zip(other.coeffs())
            .map(|(&a, &b)| a + b)
            .collect();
        Self::from_coeff_slice(&c).expect("same length")
    }

    /// `Some(λ)` if `other = λ·self` with λ ≠ 0.
    fn scalar_ratio(&self, other: &Self) -> Option<F> {
        let (i, &a) = self.coeffs().iter().enumerate().find(|(_, c)| !c.is_zero())?;
        let lambda = other.coeffs()[i].div(a).ok()?;
        if lambda.is_zero() {
            return None;
        }
        (self.scale(lambda).coeffs() == other.coeffs()).then_some(lambda)
    }

    /// Number of points of `points` on the zero locus.
    fn zero_count(&self, points: &[ProjPoint<F>]) -> usize {
        points.iter().filter(|p| self.vanishes_at(p)).count()
    }

    /// Number of points of P³(F) on the zero locus.
    fn zero_locus_count(&self) -> usize {
        self.zero_count(&enumerate_points::<F>())
    }

    fn codecs(&self) -> Vec<u8> {
        self.coeffs().iter().map(|c| c.index() as u8).collect()
    }
}

macro_rules! form_type {
    ($name:ident, $n:expr, $deg:expr, $monos:ident) => {
        #[derive(Clone, Copy, PartialEq, Eq, Hash)]
        pub struct $name<F>(pub [F; $n]);

        impl<F: Field> $name<F> {
            pub fn zero() -> Self {
                $name([F::zero(); $n])
            }

            pub fn from_codecs(c: &[u8]) -> Result<Self, FormError> {
                if c.len() != $n {
                    return Err(FormError::WrongLength {
                        expected: $n,
                        got: c.len(),
                    });
                }
                let mut out = [F::zero(); $n];
                for (slot, &v) in out.iter_mut().zip(c) {
                    if (v as usize) >= F::ORDER {
                        return Err(FormError::Parse(format!(
                            "codec {v} out of range for a field of order {}",
                            F::ORDER
                        )));
                    }
                    *slot = F::from_index(v as usize);
                }
                Ok($name(out))
            }

            /// Build from `(monomial exponents, coefficient)` terms.
            pub fn from_terms(terms: &[([u8; 4], F)]) -> Self {
                let mut out = [F::zero(); $n];
                for (m, c) in terms {
                    let i = $monos
                        .iter()
                        .position(|x| x == m)
                        .unwrap_or_else(|| panic!("{m:?} is not a monomial of degree {}", $deg));
                    out[i] += *c;
                }
                $name(out)
            }
        }

        impl<F: Field + HasQuadraticExtension> $name<F> {
            /// Same form with coefficients pushed into the quadratic extension.
            pub fn embed(&self) -> $name<F::Ext> {
                $name(self.0.map(|c| c.embed()))
            }
        }

        impl<F: Field> HomogeneousForm<F> for $name<F> {
            const DEGREE: u8 = $deg;
            fn monomials() -> &'static [[u8; 4]] {
                &$monos
            }
            fn coeffs(&self) -> &[F] {
                &self.0
            }
            fn from_coeff_slice(c: &[F]) -> Result<Self, FormError> {
                let arr: [F; $n] = c.try_into().map_err(|_| FormError::WrongLength {
                    expected: $n,
                    got: c.len(),
                })?;
                Ok($name(arr))
            }
        }

        impl<F: Field> fmt::Debug for $name<F> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let mut first = true;
                for (c, m) in self.0.iter().zip($monos.iter()) {
                    if c.is_zero() {
                        continue;
                    }
                    if !first {
                        write!(f, " + ")?;
                    }
                    first = false;
                    if c.index() == 1 {
                        write!(f, "{}", monomial_name(m))?;
                    } else {
                        write!(f, "{:?}·{}", c, monomial_name(m))?;
                    }
                }
                if first {
                    write!(f, "0")?;
                }
                Ok(())
            }
        }
    };
}

form_type!(QuadraticForm, 10, 2, QUADRATIC_MONOMIALS);
form_type!(CubicForm, 20, 3, CUBIC_MONOMIALS);

/// Product of a linear form (coefficients on X, Y, Z, W) and a quadratic form.
pub fn linear_times_quadratic<F: Field>(l: [F; 4], q: &QuadraticForm<F>) -> CubicForm<F> {
    let mut terms = Vec::new();
    for (i, &li) in l.iter().enumerate() {
        for (c, m) in q.0.iter().zip(QUADRATIC_MONOMIALS.iter()) {
            let mut e = *m;
            e[i] += 1;
            terms.push((e, li * *c));
        }
    }
    CubicForm::from_terms(&terms)
}

/// Parse a coefficient list given as `1,2,3` or as a JSON array `[1,2,3]`.
pub fn parse_codecs(s: &str) -> Result<Vec<u8>, FormError> {
    let t = s.trim();
    if t.starts_with('[') {
        serde_json::from_str::<Vec<u8>>(t).map_err(|e| FormError::Parse(e.to_string()))
    } else {
        t.split(',')
            .map(|x| {
                x.trim()
                    .parse::<u8>()
                    .map_err(|e| FormError::Parse(format!("{x:?}: {e}")))
            })
            .collect()
    }
}

/// Comma-separated codec rendering of a form.
pub fn format_codecs<F: Field, T: HomogeneousForm<F>>(f: &T) -> String {
    f.codecs()
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Serializable wrapper for a cubic over GF(8) as 20 integer codecs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CubicCodecs(pub Vec<u8>);

impl From<&CubicForm<Gf8>> for CubicCodecs {
    fn from(c: &CubicForm<Gf8>) -> Self {
        CubicCodecs(c.codecs())
    }
}

/// Rank of a set of vectors over `F` (the projective span has dimension rank − 1).
pub fn rank<F: Field>(vectors: &[[F; 4]]) -> usize {
    let mut rows: Vec<[F; 4]> = vectors.to_vec();
    let mut rank = 0;
    for col in 0..4 {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].inv().expect("nonzero");
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col] * inv;
                for c in 0..4 {
                    let v = rows[rank][c];
                    rows[r][c] += f * v;
                }
            }
        }
        rank += 1;
    }
    rank
}
