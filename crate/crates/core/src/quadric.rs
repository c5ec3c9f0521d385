//! The three geometrically irreducible quadric surfaces over GF(8), their
//! lines and conics, an invariant-based classifier for quadratic forms, and
//! the fix-group families together with the orbit-count identity.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::{
    enumerate_points, rank, FormError, HomogeneousForm, Matrix4, ProjPoint, QuadraticForm,
};
use crate::gf::{Field, Gf64, Gf8, HasQuadraticExtension};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadricError {
    #[error("unknown quadric id {0:?} (expected split, cone or nonsplit)")]
    UnknownId(String),
    #[error("model invariant failed for {id}: {what}")]
    Invariant { id: QuadricId, what: String },
    #[error(transparent)]
    Form(#[from] FormError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadricId {
    Split,
    Cone,
    Nonsplit,
}

impl QuadricId {
    pub const ALL: [QuadricId; 3] = [QuadricId::Split, QuadricId::Cone, QuadricId::Nonsplit];

    pub fn as_str(self) -> &'static str {
        match self {
            QuadricId::Split => "split",
            QuadricId::Cone => "cone",
            QuadricId::Nonsplit => "nonsplit",
        }
    }

    /// XY+ZW, XY+Z², X²+XY+Y²+ZW.
    pub fn form<F: Field>(self) -> QuadraticForm<F> {
        let one = F::one();
        let terms: &[[u8; 4]] = match self {
            QuadricId::Split => &[[1, 1, 0, 0], [0, 0, 1, 1]],
            QuadricId::Cone => &[[1, 1, 0, 0], [0, 0, 2, 0]],
            QuadricId::Nonsplit => &[[2, 0, 0, 0], [1, 1, 0, 0], [0, 2, 0, 0], [0, 0, 1, 1]],
        };
        QuadraticForm::from_terms(&terms.iter().map(|m| (*m, one)).collect::<Vec<_>>())
    }

    pub fn model(self) -> &'static QuadricModel {
        &catalog()[self as usize]
    }
}

impl fmt::Display for QuadricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QuadricId {
    type Err = QuadricError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "split" => Ok(QuadricId::Split),
            "cone" => Ok(QuadricId::Cone),
            "nonsplit" => Ok(QuadricId::Nonsplit),
            _ => Err(QuadricError::UnknownId(s.to_string())),
        }
    }
}

/// Polar bilinear form B(x, y) = Q(x + y) − Q(x) − Q(y).
pub fn polar<F: Field>(q: &QuadraticForm<F>, x: &[F; 4], y: &[F; 4]) -> F {
    let s: [F; 4] = std::array::from_fn(|i| x[i] + y[i]);
    q.eval_vec(&s) + q.eval_vec(x) + q.eval_vec(y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Line,
    Conic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ruling {
    A,
    B,
}

/// A line or conic of the fixed structure of a quadric model.
#[derive(Debug, Clone)]
pub struct StructureCurve {
    pub kind: CurveKind,
    pub label: String,
    /// Ruling for split lines.
    pub ruling: Option<Ruling>,
    /// Block number 0..3 for nonsplit conics.
    pub block: Option<usize>,
    pub points8: Vec<ProjPoint<Gf8>>,
    /// Bit i set iff `points8` of the model at index i lies on the curve.
    pub mask: u128,
    pub points64: Vec<ProjPoint<Gf64>>,
}

/// A plane whose section with the quadric is a smooth conic defined over GF(8).
#[derive(Debug, Clone)]
pub struct PlaneSection {
    pub plane: [Gf8; 4],
    pub mask: u128,
    pub points64: Vec<ProjPoint<Gf64>>,
}

/// All points of the plane `Σ a_i x_i = 0`.
pub fn plane_points<F: Field>(a: &[F; 4]) -> Vec<ProjPoint<F>> {
    enumerate_points::<F>()
        .into_iter()
        .filter(|p| {
            let mut s = F::zero();
            for (ai, xi) in a.iter().zip(p.coords()) {
                s += *ai * *xi;
            }
            s.is_zero()
        })
        .collect()
}

/// One canonical quadric with cached point lists and structure.
#[derive(Debug)]
pub struct QuadricModel {
    pub id: QuadricId,
    pub form: QuadraticForm<Gf8>,
    pub points8: Vec<ProjPoint<Gf8>>,
    pub points64: Vec<ProjPoint<Gf64>>,
    pub structure: Vec<StructureCurve>,
    pub vertex: Option<ProjPoint<Gf8>>,
    /// Base points shared by the nonsplit conics.
    pub base_points: Vec<ProjPoint<Gf8>>,
    pub plane_conics: Vec<PlaneSection>,
    index: HashMap<ProjPoint<Gf8>, usize>,
}

fn pt(c: [Gf8; 4]) -> ProjPoint<Gf8> {
    ProjPoint::new(c).expect("nonzero point")
}

fn p1_points() -> Vec<[Gf8; 2]> {
    let mut v = vec![[Gf8::ZERO, Gf8::ONE]];
    v.extend(Gf8::elements().map(|t| [Gf8::ONE, t]));
    v
}

fn p1_label(c: [Gf8; 2]) -> String {
    format!("[{}:{}]", c[0].to_u8(), c[1].to_u8())
}

/// All points of the line spanned by `a` and `b`, over the extension.
fn line_points64(a: &ProjPoint<Gf8>, b: &ProjPoint<Gf8>) -> Vec<ProjPoint<Gf64>> {
    let (a, b) = (a.embed(), b.embed());
    let mut out = vec![*b.coords()];
    for t in Gf64::elements() {
        out.push(std::array::from_fn(|i| a.coords()[i] + t * b.coords()[i]));
    }
    let mut pts: Vec<_> = out.into_iter().map(|c| ProjPoint::new(c).unwrap()).collect();
    pts.sort();
    pts
}

impl QuadricModel {
    pub fn build(id: QuadricId) -> Result<Self, QuadricError> {
        let form = id.form::<Gf8>();
        let points8: Vec<_> = enumerate_points::<Gf8>()
            .into_iter()
            .filter(|p| form.vanishes_at(p))
            .collect();
        let form64 = form.embed();
        let points64: Vec<_> = enumerate_points::<Gf64>()
            .into_iter()
            .filter(|p| form64.vanishes_at(p))
            .collect();
        let index: HashMap<_, _> = points8.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let mask_of = |pts: &[ProjPoint<Gf8>]| -> u128 {
            pts.iter().fold(0u128, |m, p| m | 1u128 << index[p])
        };

        let mut structure = Vec::new();
        let mut vertex = None;
        let mut base_points = Vec::new();
        match id {
            QuadricId::Split => {
                let param = |l: [Gf8; 2], r: [Gf8; 2]| {
                    pt([l[0] * r[0], l[1] * r[1], l[0] * r[1], l[1] * r[0]])
                };
                for (ruling, tag) in [(Ruling::A, "A"), (Ruling::B, "B")] {
                    for fixed in p1_points() {
                        let pts: Vec<_> = p1_points()
                            .into_iter()
                            .map(|v| match ruling {
                                Ruling::A => param(fixed, v),
                                Ruling::B => param(v, fixed),
                            })
                            .collect();
                        structure.push(StructureCurve {
                            kind: CurveKind::Line,
                            label: format!("{tag}{}", p1_label(fixed)),
                            ruling: Some(ruling),
                            block: None,
                            mask: mask_of(&pts),
                            points64: line_points64(&pts[0], &pts[1]),
                            points8: pts,
                        });
                    }
                }
            }
            QuadricId::Cone => {
                let v = pt([Gf8::ZERO, Gf8::ZERO, Gf8::ZERO, Gf8::ONE]);
                vertex = Some(v);
                let mut lines: Vec<(String, ProjPoint<Gf8>)> = Gf8::elements()
                    .map(|z| (format!("L[{}]", z.to_u8()), pt([Gf8::ONE, z * z, z, Gf8::ZERO])))
                    .collect();
                lines.push(("L[inf]".into(), pt([Gf8::ZERO, Gf8::ONE, Gf8::ZERO, Gf8::ZERO])));
                for (label, p) in lines {
                    let mut pts: Vec<_> = vec![v];
                    pts.extend(Gf8::elements().map(|w| {
                        let mut c = *p.coords();
                        c[3] = w;
                        pt(c)
                    }));
                    structure.push(StructureCurve {
                        kind: CurveKind::Line,
                        label,
                        ruling: None,
                        block: None,
                        mask: mask_of(&pts),
                        points64: line_points64(&p, &v),
                        points8: pts,
                    });
                }
            }
            QuadricId::Nonsplit => {
                base_points = vec![
                    pt([Gf8::ZERO, Gf8::ZERO, Gf8::ONE, Gf8::ZERO]),
                    pt([Gf8::ZERO, Gf8::ZERO, Gf8::ZERO, Gf8::ONE]),
                ];
                for y in nonsplit_conic_params() {
                    let plane = match y {
                        Some(y) => [y, Gf8::ONE, Gf8::ZERO, Gf8::ZERO],
                        None => [Gf8::ONE, Gf8::ZERO, Gf8::ZERO, Gf8::ZERO],
                    };
                    let pts: Vec<_> = points8
                        .iter()
                        .copied()
                        .filter(|p| plane.iter().zip(p.coords()).fold(Gf8::ZERO, |s, (a, x)| s + *a * *x).is_zero())
                        .collect();
                    let p64: Vec<_> = plane_points::<Gf64>(&plane.map(|c| c.embed()))
                        .into_iter()
                        .filter(|p| form64.vanishes_at(p))
                        .collect();
                    structure.push(StructureCurve {
                        kind: CurveKind::Conic,
                        label: conic_label(y),
                        ruling: None,
                        block: Some(conic_block(y)),
                        mask: mask_of(&pts),
                        points64: p64,
                        points8: pts,
                    });
                }
            }
        }

        let mut plane_conics = Vec::new();
        for plane in enumerate_points::<Gf8>() {
            let a = *plane.coords();
            let on: Vec<_> = points8
                .iter()
                .filter(|p| a.iter().zip(p.coords()).fold(Gf8::ZERO, |s, (x, y)| s + *x * *y).is_zero())
                .copied()
                .collect();
            if on.len() == 9 && rank(&on.iter().map(|p| *p.coords()).collect::<Vec<_>>()) == 3 {
                let e = a.map(|c| c.embed());
                let on64 = points64
                    .iter()
                    .filter(|p| e.iter().zip(p.coords()).fold(Gf64::ZERO, |s, (x, y)| s + *x * *y).is_zero())
                    .copied()
                    .collect();
                plane_conics.push(PlaneSection {
                    plane: a,
                    mask: mask_of(&on),
                    points64: on64,
                });
            }
        }

        let model = QuadricModel {
            id,
            form,
            points8,
            points64,
            structure,
            vertex,
            base_points,
            plane_conics,
            index,
        };
        model.check()?;
        Ok(model)
    }

    pub fn point_index(&self, p: &ProjPoint<Gf8>) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Mask with one bit per GF(8) point of the quadric.
    pub fn full_mask(&self) -> u128 {
        (1u128 << self.points8.len()) - 1
    }

    fn fail(&self, what: impl Into<String>) -> QuadricError {
        QuadricError::Invariant {
            id: self.id,
            what: what.into(),
        }
    }

    /// Re-verify every cached invariant.
    pub fn check(&self) -> Result<(), QuadricError> {
        let expected = match self.id {
            QuadricId::Split => (81, 4225),
            QuadricId::Cone => (73, 4161),
            // Over GF(64) the nonsplit form splits.
            QuadricId::Nonsplit => (65, 4225),
        };
        if (self.points8.len(), self.points64.len()) != expected {
            return Err(self.fail(format!(
                "point counts {} / {}",
                self.points8.len(),
                self.points64.len()
            )));
        }
        let full = self.full_mask();
        for c in &self.structure {
            if c.points8.len() != 9 || c.mask.count_ones() != 9 || c.points64.len() != 65 {
                return Err(self.fail(format!("curve {} has wrong size", c.label)));
            }
            let f64 = self.form.embed();
            if !c.points64.iter().all(|p| f64.vanishes_at(p)) {
                return Err(self.fail(format!("curve {} leaves the surface", c.label)));
            }
            for p in &c.points8 {
                if !c.points64.contains(&p.embed()) {
                    return Err(self.fail(format!("curve {} extension misses {p:?}", c.label)));
                }
            }
        }
        if let Some(s) = self.plane_conics.iter().find(|s| s.points64.len() != 65) {
            return Err(self.fail(format!("plane section {:?} has {} points over GF(64)", s.plane, s.points64.len())));
        }
        let cover = |curves: &[&StructureCurve], exclude: u128| -> bool {
            let mut seen = 0u128;
            for c in curves {
                if (c.mask & !exclude) & seen != 0 {
                    return false;
                }
                seen |= c.mask & !exclude;
            }
            seen == full & !exclude
        };
        match self.id {
            QuadricId::Split => {
                for r in [Ruling::A, Ruling::B] {
                    let curves: Vec<_> = self.structure.iter().filter(|c| c.ruling == Some(r)).collect();
                    if curves.len() != 9 || !cover(&curves, 0) {
                        return Err(self.fail(format!("ruling {r:?} does not partition the points")));
                    }
                }
            }
            QuadricId::Cone => {
                let v = self.vertex.ok_or_else(|| self.fail("missing vertex"))?;
                let vbit = 1u128 << self.index[&v];
                let curves: Vec<_> = self.structure.iter().collect();
                if curves.len() != 9
                    || !curves.iter().all(|c| c.mask & vbit != 0)
                    || !cover(&curves, vbit)
                {
                    return Err(self.fail("lines do not partition the non-vertex points"));
                }
                if !is_singular_at(&self.form, v.coords()) {
                    return Err(self.fail("vertex is not singular"));
                }
            }
            QuadricId::Nonsplit => {
                let base = self
                    .base_points
                    .iter()
                    .fold(0u128, |m, p| m | 1u128 << self.index[p]);
                let curves: Vec<_> = self.structure.iter().collect();
                if curves.len() != 9
                    || !curves.iter().all(|c| c.mask & base == base)
                    || !cover(&curves, base)
                {
                    return Err(self.fail("conics do not partition the non-base points"));
                }
                if contains_rational_line(&self.form) {
                    return Err(self.fail("nonsplit quadric contains a GF(8) line"));
                }
            }
        }
        Ok(())
    }
}

/// Parameters of the nine nonsplit conics: `Some(y)` is the plane yX + Y = 0, `None` is X = 0.
pub fn nonsplit_conic_params() -> Vec<Option<Gf8>> {
    let mut v: Vec<_> = Gf8::elements().map(Some).collect();
    v.push(None);
    v
}

pub fn conic_label(y: Option<Gf8>) -> String {
    match y {
        Some(y) => format!("C[{}]", y.to_u8()),
        None => "C[inf]".into(),
    }
}

/// Blocks {C0, C1, C∞}, {Cη, Cη², Cη⁴}, {Cη⁶, Cη⁵, Cη³}.
pub fn conic_block(y: Option<Gf8>) -> usize {
    match y.and_then(|y| y.log_eta()) {
        None => 0,
        Some(0) => 0,
        Some(1 | 2 | 4) => 1,
        Some(_) => 2,
    }
}

static CATALOG: LazyLock<[QuadricModel; 3]> = LazyLock::new(|| {
    QuadricId::ALL.map(|id| QuadricModel::build(id).unwrap_or_else(|e| panic!("{e}")))
});

/// The three canonical quadrics, built once and verified.
pub fn catalog() -> &'static [QuadricModel; 3] {
    &CATALOG
}

pub fn canonical_quadrics() -> Vec<&'static QuadricModel> {
    catalog().iter().collect()
}

// ---------------------------------------------------------------------------
// Classification

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadricClass {
    Split,
    Nonsplit,
    Cone,
    DoublePlane,
    PlanePair,
    AnisotropicBinary,
    OtherReducible,
}

impl QuadricClass {
    pub fn as_str(self) -> &'static str {
        match self {
            QuadricClass::Split => "split",
            QuadricClass::Nonsplit => "nonsplit",
            QuadricClass::Cone => "cone",
            QuadricClass::DoublePlane => "double_plane",
            QuadricClass::PlanePair => "plane_pair",
            QuadricClass::AnisotropicBinary => "anisotropic_binary",
            QuadricClass::OtherReducible => "other_reducible",
        }
    }
}

impl fmt::Display for QuadricClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Computable invariants of a quadratic form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadricSignature {
    pub count: usize,
    /// Projective dimension of the linear span of the rational zero locus (−1 if empty).
    pub span_dim: i32,
    pub singular: bool,
    /// The locus contains a line defined over the base field.
    pub rational_line: bool,
    /// Some rational point lies on a line defined over the quadratic extension only.
    pub extension_line: bool,
}

fn is_singular_at<F: Field>(q: &QuadraticForm<F>, p: &[F; 4]) -> bool {
    if !q.eval_vec(p).is_zero() {
        return false;
    }
    (0..4).all(|i| {
        let mut e = [F::zero(); 4];
        e[i] = F::one();
        polar(q, p, &e).is_zero()
    })
}

fn contains_rational_line<F: Field>(q: &QuadraticForm<F>) -> bool {
    let locus: Vec<_> = enumerate_points::<F>()
        .into_iter()
        .filter(|p| q.vanishes_at(p))
        .collect();
    locus.iter().enumerate().any(|(i, p)| {
        locus[i + 1..]
            .iter()
            .any(|r| polar(q, p.coords(), r.coords()).is_zero())
    })
}

pub fn signature<F: Field + HasQuadraticExtension>(q: &QuadraticForm<F>) -> QuadricSignature {
    let locus: Vec<_> = enumerate_points::<F>()
        .into_iter()
        .filter(|p| q.vanishes_at(p))
        .collect();
    let vecs: Vec<_> = locus.iter().map(|p| *p.coords()).collect();
    let singular = locus.iter().any(|p| is_singular_at(q, p.coords()));
    let rational_line = contains_rational_line(q);
    // With no rational line, any line through a rational point is defined over the extension only.
    let extension_line = !rational_line
        && locus.first().is_some_and(|p| {
            let qe = q.embed();
            let pe = p.embed();
            enumerate_points::<F::Ext>().iter().any(|v| {
                v != &pe
                    && qe.vanishes_at(v)
                    && polar(&qe, pe.coords(), v.coords()).is_zero()
            })
        });
    QuadricSignature {
        count: locus.len(),
        span_dim: rank(&vecs) as i32 - 1,
        singular,
        rational_line,
        extension_line,
    }
}

/// Classify a nonzero quadratic form by its invariant signature.
pub fn classify_form<F: Field + HasQuadraticExtension>(q: &QuadraticForm<F>) -> QuadricClass {
    class_of_signature(F::ORDER, &signature(q))
}

pub fn class_of_signature(q: usize, s: &QuadricSignature) -> QuadricClass {
    let c = s.count;
    if c == (q + 1) * (q + 1) && s.span_dim == 3 && !s.singular {
        QuadricClass::Split
    } else if c == q * q + q + 1 && s.span_dim == 3 && s.singular {
        QuadricClass::Cone
    } else if c == q * q + q + 1 && s.span_dim == 2 {
        QuadricClass::DoublePlane
    } else if c == q * q + 1 && s.span_dim == 3 && !s.singular && !s.rational_line {
        QuadricClass::Nonsplit
    } else if c == 2 * q * q + q + 1 && s.span_dim == 3 {
        QuadricClass::PlanePair
    } else if c == q + 1 && s.span_dim == 1 {
        QuadricClass::AnisotropicBinary
    } else {
        QuadricClass::OtherReducible
    }
}

// ---------------------------------------------------------------------------
// Fix groups

/// `Some(λ)` with `q∘m = λ q`, or `None` when `m` does not preserve `q`.
pub fn preserving_scalar<F: Field>(q: &QuadraticForm<F>, m: &Matrix4<F>) -> Result<Option<F>, FormError> {
    let s = q.substitute(m)?;
    Ok(q.scalar_ratio(&s))
}

/// Membership in the subgroup of PGL₄ preserving the quadric.
pub fn fix_group_contains(q: &QuadricModel, m: &Matrix4<Gf8>) -> Result<bool, FormError> {
    Ok(preserving_scalar(&q.form, m)?.is_some())
}

type M2 = [[Gf8; 2]; 2];

fn det2(a: &M2) -> Gf8 {
    a[0][0] * a[1][1] + a[0][1] * a[1][0]
}

/// All of GL₂(F₈).
pub fn gl2() -> Vec<M2> {
    let mut out = Vec::with_capacity(3528);
    for i in 0..4096usize {
        let m = [
            [Gf8::from_index(i >> 9), Gf8::from_index((i >> 6) & 7)],
            [Gf8::from_index((i >> 3) & 7), Gf8::from_index(i & 7)],
        ];
        if !det2(&m).is_zero() {
            out.push(m);
        }
    }
    out
}

/// Projectively normalized representatives of GL₂: first nonzero entry equal to 1.
pub fn pgl2() -> Vec<M2> {
    gl2()
        .into_iter()
        .filter(|m| {
            let first = if m[0][0].is_zero() { m[0][1] } else { m[0][0] };
            first == Gf8::ONE
        })
        .collect()
}

/// Element of Fix(XY+ZW) induced by (A, B) on P¹×P¹, optionally composed with the factor swap.
pub fn split_fix_element(a: &M2, b: &M2, swap: bool) -> Matrix4<Gf8> {
    let [[a_, b_], [c, d]] = *a;
    let [[e, f], [g, h]] = *b;
    let m = Matrix4([
        [a_ * e, b_ * f, a_ * f, b_ * e],
        [c * g, d * h, c * h, d * g],
        [a_ * g, b_ * h, a_ * h, b_ * g],
        [c * e, d * f, c * f, d * e],
    ]);
    if swap {
        m.mul(&Matrix4::permutation([0, 1, 3, 2]))
    } else {
        m
    }
}

/// Element of Fix(XY+Z²) with rows (a,b,0,0), (c,d,0,0), (√ac,√bd,√(ad+bc),0), (s₀,s₁,s₂,e).
pub fn cone_fix_element(a: &M2, stars: [Gf8; 3], e: Gf8) -> Matrix4<Gf8> {
    let [[a_, b], [c, d]] = *a;
    let z = Gf8::ZERO;
    Matrix4([
        [a_, b, z, z],
        [c, d, z, z],
        [(a_ * c).sqrt(), (b * d).sqrt(), (a_ * d + b * c).sqrt(), z],
        [stars[0], stars[1], stars[2], e],
    ])
}

/// X ↦ X + xZ, W ↦ W + xY + x²Z.
pub fn nonsplit_shift_x(x: Gf8) -> Matrix4<Gf8> {
    let mut m = Matrix4::identity();
    m.0[0][2] = x;
    m.0[3][1] = x;
    m.0[3][2] = x * x;
    m
}

/// Y ↦ Y + yZ, W ↦ W + yX + y²Z.
pub fn nonsplit_shift_y(y: Gf8) -> Matrix4<Gf8> {
    let mut m = Matrix4::identity();
    m.0[1][2] = y;
    m.0[3][0] = y;
    m.0[3][2] = y * y;
    m
}

/// block-diag(A, z, w) with zw equal to the multiplier of A on X²+XY+Y².
pub fn nonsplit_block(a: &M2, z: Gf8) -> Option<Matrix4<Gf8>> {
    let lambda = binary_similitude_factor(a)?;
    let w = lambda.div(z).ok()?;
    let o = Gf8::ZERO;
    Some(Matrix4([
        [a[0][0], a[0][1], o, o],
        [a[1][0], a[1][1], o, o],
        [o, o, z, o],
        [o, o, o, w],
    ]))
}

/// Multiplier λ with f(Ax) = λ f(x) for f = X²+XY+Y², if any.
pub fn binary_similitude_factor(a: &M2) -> Option<Gf8> {
    let f = |x: Gf8, y: Gf8| x * x + x * y + y * y;
    // Substitute: coefficients of X², XY, Y² in f(aX+bY, cX+dY).
    let [[p, q], [r, s]] = *a;
    let cx2 = f(p, r);
    let cy2 = f(q, s);
    let cxy = p * s + q * r;
    (!cx2.is_zero() && cx2 == cy2 && cx2 == cxy).then_some(cx2)
}

/// The 126 elements of GL₂(F₈) preserving X²+XY+Y² up to a scalar factor.
pub fn binary_stabilizer() -> Vec<M2> {
    gl2()
        .into_iter()
        .filter(|a| binary_similitude_factor(a).is_some())
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BinaryStabilizerReport {
    pub count: usize,
    pub modulo_scalars: usize,
    pub contains_identity: bool,
    pub contains_swap: bool,
}

pub fn count_binary_stabilizer() -> BinaryStabilizerReport {
    let all = binary_stabilizer();
    let reps = all
        .iter()
        .filter(|m| {
            let first = if m[0][0].is_zero() { m[0][1] } else { m[0][0] };
            first == Gf8::ONE
        })
        .count();
    let (o, l) = (Gf8::ZERO, Gf8::ONE);
    BinaryStabilizerReport {
        count: all.len(),
        modulo_scalars: reps,
        contains_identity: all.contains(&[[l, o], [o, l]]),
        contains_swap: all.contains(&[[o, l], [l, o]]),
    }
}

/// Pack a matrix scaled so that its first nonzero entry is 1.
pub fn projective_key(m: &Matrix4<Gf8>) -> u64 {
    let flat: Vec<Gf8> = m.0.iter().flatten().copied().collect();
    let lead = flat.iter().find(|c| !c.is_zero()).copied().unwrap_or(Gf8::ONE);
    let s = lead.inv().expect("nonzero");
    flat.iter().fold(0u64, |k, c| (k << 3) | (*c * s).to_u8() as u64)
}

/// Closure of `gens` in PGL₄(F₈), capped at `limit` elements.
pub fn projective_closure(gens: &[Matrix4<Gf8>], limit: usize) -> Vec<Matrix4<Gf8>> {
    let id = Matrix4::<Gf8>::identity();
    let mut seen: HashSet<u64> = HashSet::from([projective_key(&id)]);
    let mut out = vec![id];
    let mut i = 0;
    while i < out.len() && out.len() < limit {
        let g = out[i];
        for h in gens {
            let n = g.mul(h);
            if seen.insert(projective_key(&n)) {
                out.push(n);
            }
        }
        i += 1;
    }
    out
}

/// Generators of Fix(X²+XY+Y²+ZW): shifts, the Z/W swap, and the block-diagonal stabilizer.
pub fn nonsplit_generators() -> Vec<Matrix4<Gf8>> {
    let mut gens = Vec::new();
    for k in 0..3 {
        gens.push(nonsplit_shift_x(Gf8::eta_pow(k)));
        gens.push(nonsplit_shift_y(Gf8::eta_pow(k)));
    }
    gens.push(Matrix4::permutation([0, 1, 3, 2]));
    for a in binary_stabilizer() {
        let first = if a[0][0].is_zero() { a[0][1] } else { a[0][0] };
        if first == Gf8::ONE {
            gens.push(nonsplit_block(&a, Gf8::ONE).expect("similitude"));
        }
    }
    gens.push(nonsplit_block(&[[Gf8::ONE, Gf8::ZERO], [Gf8::ZERO, Gf8::ONE]], Gf8::ETA).unwrap());
    gens
}

/// |PGL₄(F_q)|.
pub fn pgl4_order(q: u128) -> u128 {
    q.pow(6) * (q.pow(4) - 1) * (q.pow(3) - 1) * (q.pow(2) - 1)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CensusRow {
    pub form: String,
    /// Stabilizer order from the printed counting formula.
    pub formula_order: u128,
    /// Stabilizer order obtained by building the family explicitly, when feasible.
    pub enumerated_order: Option<u128>,
    /// Every enumerated element preserves the form up to a scalar.
    pub all_preserve: Option<bool>,
    pub orbit_bound: u128,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilizerCensus {
    pub rows: Vec<CensusRow>,
    pub orbit_sum: u128,
    pub quadric_count: u128,
    pub identity_holds: bool,
    /// The printed product for the anisotropic binary form agrees with its factors.
    pub anisotropic_product_consistent: bool,
}

/// Fast check that `m` preserves `q` up to scalar (no error path: `m` must be invertible).
fn preserves(q: &QuadraticForm<Gf8>, m: &Matrix4<Gf8>) -> bool {
    matches!(preserving_scalar(q, m), Ok(Some(_)))
}

/// Build every generator family, count it projectively, and check the orbit identity.
pub fn stabilizer_census() -> StabilizerCensus {
    let q = 8u128;
    let pgl4 = pgl4_order(q);
    let pgl2_order = (q * q - 1) * (q * q - q) / (q - 1);
    let gl2_order = (q * q - 1) * (q * q - q);
    let mut rows = Vec::new();

    // Split: PGL₂ × PGL₂ × C₂.
    {
        let form = QuadricId::Split.form::<Gf8>();
        let reps = pgl2();
        let mut keys = HashSet::new();
        let mut ok = true;
        for a in &reps {
            for b in &reps {
                for swap in [false, true] {
                    let m = split_fix_element(a, b, swap);
                    ok &= preserves(&form, &m);
                    keys.insert(projective_key(&m));
                }
            }
        }
        let formula = 2 * pgl2_order * pgl2_order;
        rows.push(CensusRow {
            form: "XY+ZW".into(),
            formula_order: formula,
            enumerated_order: Some(keys.len() as u128),
            all_preserve: Some(ok),
            orbit_bound: pgl4 / formula,
        });
    }

    // Cone: GL₂ × F₈³ × F₈^× modulo scalars; normalize e = 1.
    {
        let form = QuadricId::Cone.form::<Gf8>();
        let mut keys = HashSet::new();
        let mut ok = true;
        for a in gl2() {
            for s in 0..512usize {
                let stars = [s >> 6, (s >> 3) & 7, s & 7].map(Gf8::from_index);
                let m = cone_fix_element(&a, stars, Gf8::ONE);
                ok &= preserves(&form, &m);
                keys.insert(projective_key(&m));
            }
        }
        let formula = gl2_order * q.pow(3) * (q - 1) / (q - 1);
        rows.push(CensusRow {
            form: "XY+Z^2".into(),
            formula_order: formula,
            enumerated_order: Some(keys.len() as u128),
            all_preserve: Some(ok),
            orbit_bound: pgl4 / formula,
        });
    }

    // Nonsplit: group closure of the generator families.
    {
        let form = QuadricId::Nonsplit.form::<Gf8>();
        let formula = 65 * 64 * 126 * (q - 1) / (q - 1);
        let group = projective_closure(&nonsplit_generators(), 2 * formula as usize);
        let ok = group.iter().all(|m| preserves(&form, m));
        rows.push(CensusRow {
            form: "X^2+XY+Y^2+ZW".into(),
            formula_order: formula,
            enumerated_order: Some(group.len() as u128),
            all_preserve: Some(ok),
            orbit_bound: pgl4 / formula,
        });
    }

    // Anisotropic binary form: the 126 similitudes completed by any two independent rows.
    let stab = binary_stabilizer().len() as u128;
    let completions = (q.pow(4) - q.pow(2)) * (q.pow(4) - q.pow(3));
    let aniso = stab * completions / (q - 1);
    rows.push(CensusRow {
        form: "X^2+XY+Y^2".into(),
        formula_order: aniso,
        enumerated_order: None,
        all_preserve: None,
        orbit_bound: pgl4 / aniso,
    });

    // X² and XY: orbits of a hyperplane and of an unordered pair of hyperplanes.
    let hyperplanes = (q.pow(4) - 1) / (q - 1);
    let x2_orbit = hyperplanes;
    let xy_orbit = (q.pow(4) - 1) * (q.pow(4) - q) / (2 * (q - 1) * (q - 1));
    rows.push(CensusRow {
        form: "X^2".into(),
        formula_order: pgl4 / x2_orbit,
        enumerated_order: None,
        all_preserve: None,
        orbit_bound: x2_orbit,
    });
    rows.push(CensusRow {
        form: "XY".into(),
        formula_order: pgl4 / xy_orbit,
        enumerated_order: None,
        all_preserve: None,
        orbit_bound: xy_orbit,
    });

    let orbit_sum: u128 = rows.iter().map(|r| r.orbit_bound).sum();
    let quadric_count = (q.pow(10) - 1) / (q - 1);
    StabilizerCensus {
        anisotropic_product_consistent: aniso == 260_112_384 && (stab * completions).is_multiple_of(q - 1),
        identity_holds: orbit_sum == quadric_count,
        rows,
        orbit_sum,
        quadric_count,
    }
}

// ---------------------------------------------------------------------------
// Affine maps on F₈

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AffineTransitivityReport {
    pub maps: usize,
    pub subsets: usize,
    /// Every subset is hit by exactly one map from {0, 1, η}.
    pub simply_transitive: bool,
    pub stabilizer_of_base: usize,
}

pub fn verify_affine_transitivity() -> AffineTransitivityReport {
    let maps: Vec<(Gf8, Gf8)> = Gf8::nonzero_elements()
        .flat_map(|e| Gf8::elements().map(move |f| (e, f)))
        .collect();
    let mut subsets = Vec::new();
    for a in 0..8u8 {
        for b in a + 1..8 {
            for c in b + 1..8 {
                subsets.push(1u8 << a | 1 << b | 1 << c);
            }
        }
    }
    let base = [Gf8::ZERO, Gf8::ONE, Gf8::ETA];
    let image = |(e, f): (Gf8, Gf8), s: &[Gf8]| -> u8 {
        s.iter().fold(0u8, |m, x| m | 1 << (e * *x + f).to_u8())
    };
    let base_mask = image((Gf8::ONE, Gf8::ZERO), &base);
    let mut hits: HashMap<u8, usize> = HashMap::new();
    for &m in &maps {
        *hits.entry(image(m, &base)).or_default() += 1;
    }
    AffineTransitivityReport {
        maps: maps.len(),
        subsets: subsets.len(),
        simply_transitive: subsets.iter().all(|s| hits.get(s) == Some(&1)),
        stabilizer_of_base: maps.iter().filter(|&&m| image(m, &base) == base_mask).count(),
    }
}

// ---------------------------------------------------------------------------
// GF(2) orbit oracle

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Gf2OracleReport {
    pub group_order: usize,
    pub orbit_sizes: Vec<usize>,
    /// Each orbit maps to a single class and distinct orbits to distinct classes.
    pub signature_separates: bool,
    pub classes: Vec<(QuadricClass, usize)>,
}

/// Brute-force orbits of nonzero quadratic forms over GF(2) under GL₄(F₂).
pub fn gf2_orbit_oracle() -> Gf2OracleReport {
    use crate::gf::Gf2;
    let group: Vec<Matrix4<Gf2>> = (0..1u32 << 16)
        .map(|i| Matrix4(std::array::from_fn(|r| std::array::from_fn(|c| Gf2::from_index(((i >> (4 * r + c)) & 1) as usize)))))
        .filter(|m| m.is_invertible())
        .collect();
    let forms: Vec<QuadraticForm<Gf2>> = (1..1usize << 10)
        .map(|i| {
            let c: Vec<u8> = (0..10).map(|b| ((i >> b) & 1) as u8).collect();
            QuadraticForm::from_codecs(&c).unwrap()
        })
        .collect();
    let key = |f: &QuadraticForm<Gf2>| f.codecs().iter().fold(0usize, |k, c| k * 2 + *c as usize);
    let mut orbit_of: HashMap<usize, usize> = HashMap::new();
    let mut orbit_sizes = Vec::new();
    for f in &forms {
        if orbit_of.contains_key(&key(f)) {
            continue;
        }
        let id = orbit_sizes.len();
        let mut size = 0;
        for m in &group {
            let g = f.substitute(m).expect("invertible");
            if let std::collections::hash_map::Entry::Vacant(e) = orbit_of.entry(key(&g)) {
                e.insert(id);
                size += 1;
            }
        }
        orbit_sizes.push(size);
    }
    let mut orbit_class: HashMap<usize, HashSet<QuadricClass>> = HashMap::new();
    for f in &forms {
        orbit_class
            .entry(orbit_of[&key(f)])
            .or_default()
            .insert(classify_form(f));
    }
    let per_orbit: Vec<_> = (0..orbit_sizes.len())
        .map(|o| orbit_class[&o].iter().copied().collect::<Vec<_>>())
        .collect();
    let distinct: HashSet<_> = per_orbit.iter().filter(|c| c.len() == 1).map(|c| c[0]).collect();
    let separates = per_orbit.iter().all(|c| c.len() == 1) && distinct.len() == orbit_sizes.len();
    let mut classes: Vec<_> = per_orbit
        .iter()
        .zip(&orbit_sizes)
        .map(|(c, s)| (c[0], *s))
        .collect();
    classes.sort();
    Gf2OracleReport {
        group_order: group.len(),
        orbit_sizes,
        signature_separates: separates,
        classes,
    }
}
