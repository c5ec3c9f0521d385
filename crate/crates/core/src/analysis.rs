//! Analysis of a (quadric, cubic) pair: point counts over GF(8) and GF(64),
//! contained lines and conics, and classification of 27-point
//! intersections that are not smooth genus-4 curves.

use std::collections::BTreeSet;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::{eval_monomial, CubicForm, HomogeneousForm, CUBIC_MONOMIALS};
use crate::gf::{Field, Gf64, Gf8, HasQuadraticExtension};
use crate::quadric::{catalog, CurveKind, QuadricId, QuadricModel, Ruling};
use crate::search::BitslicedTable;
use crate::zeta::ZetaType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("the good-curve test is defined for 27-point intersections, got {0}")]
    NotTwentySeven(usize),
    #[error("intersection matches no bad-curve row: {0}")]
    Anomalous(String),
}

/// Bitsliced monomial values over the GF(64) points of a quadric.
pub struct Gf64Table {
    words: usize,
    npoints: usize,
    /// `planes[(k * 8 + c) * 6 + j]` is plane `j` of `embed(c) · monomial_k`.
    planes: Vec<Vec<u64>>,
    tail_mask: u64,
}

impl Gf64Table {
    pub fn new(q: &QuadricModel) -> Self {
        let npoints = q.points64.len();
        let words = npoints.div_ceil(64);
        let mut planes = Vec::with_capacity(20 * 8 * 6);
        for mono in &CUBIC_MONOMIALS {
            let vals: Vec<u8> = q
                .points64
                .iter()
                .map(|p| eval_monomial(mono, p.coords()).to_u8())
                .collect();
            for c in Gf8::elements() {
                let e = c.embed();
                let scaled: Vec<u8> = vals.iter().map(|&v| (Gf64::new(v).unwrap() * e).to_u8()).collect();
                for j in 0..6 {
                    let mut plane = vec![0u64; words];
                    for (i, &v) in scaled.iter().enumerate() {
                        plane[i / 64] |= ((v >> j & 1) as u64) << (i % 64);
                    }
                    planes.push(plane);
                }
            }
        }
        let tail = npoints % 64;
        Gf64Table {
            words,
            npoints,
            planes,
            tail_mask: if tail == 0 { u64::MAX } else { (1u64 << tail) - 1 },
        }
    }

    /// Zero mask of the cubic over the quadric's GF(64) points.
    pub fn zero_words(&self, c: &CubicForm<Gf8>) -> Vec<u64> {
        let mut acc = vec![vec![0u64; self.words]; 6];
        for (k, v) in c.0.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            for (j, a) in acc.iter_mut().enumerate() {
                let src = &self.planes[(k * 8 + v.index()) * 6 + j];
                for (x, y) in a.iter_mut().zip(src) {
                    *x ^= y;
                }
            }
        }
        (0..self.words)
            .map(|w| {
                let any = acc.iter().fold(0u64, |m, a| m | a[w]);
                let mask = if w + 1 == self.words { self.tail_mask } else { u64::MAX };
                !any & mask
            })
            .collect()
    }

    pub fn count(&self, c: &CubicForm<Gf8>) -> usize {
        self.zero_words(c).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn npoints(&self) -> usize {
        self.npoints
    }
}

static GF64_TABLES: LazyLock<[Gf64Table; 3]> = LazyLock::new(|| catalog().each_ref().map(Gf64Table::new));
static GF8_TABLES: LazyLock<[BitslicedTable; 3]> = LazyLock::new(|| catalog().each_ref().map(BitslicedTable::new));

pub fn gf64_table(id: QuadricId) -> &'static Gf64Table {
    &GF64_TABLES[id as usize]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountField {
    Gf8,
    Gf64,
}

/// Points of the given field on both the quadric and the cubic.
pub fn count_intersection(q: &QuadricModel, c: &CubicForm<Gf8>, field: CountField) -> usize {
    match field {
        CountField::Gf8 => GF8_TABLES[q.id as usize].zero_count(c),
        CountField::Gf64 => gf64_table(q.id).count(c),
    }
}

/// Reference count by direct evaluation of the embedded cubic.
pub fn count_intersection_direct(q: &QuadricModel, c: &CubicForm<Gf8>, field: CountField) -> usize {
    match field {
        CountField::Gf8 => c.zero_count(&q.points8),
        CountField::Gf64 => c.embed().zero_count(&q.points64),
    }
}

/// N₆₄ of a smooth genus-4 curve with 27 rational points: the two admissible types give 45 and 43.
pub fn good_curve_test(n8: usize, n64: usize) -> Result<bool, AnalysisError> {
    if n8 != 27 {
        return Err(AnalysisError::NotTwentySeven(n8));
    }
    Ok(good_curve_counts().contains(&n64))
}

/// GF(64) counts allowed for a smooth genus-4 curve with 27 points over GF(8).
pub fn good_curve_counts() -> Vec<usize> {
    [ZetaType::integer(&[5, 5, 5, 3]), ZetaType::quadratic_pair(9, 19, 2)]
        .iter()
        .map(|t| t.points(8, 2).to_string().parse().expect("small count"))
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainedCurves {
    pub ruling_a: Vec<String>,
    pub ruling_b: Vec<String>,
    /// Cone lines through the vertex.
    pub pencil: Vec<String>,
    /// Structure conics of the nonsplit quadric.
    pub conics: Vec<String>,
    /// Planes (as coefficient codecs) whose conic section lies on the cubic.
    pub plane_conics: Vec<[u8; 4]>,
}

impl ContainedCurves {
    pub fn line_count(&self) -> usize {
        self.ruling_a.len() + self.ruling_b.len() + self.pencil.len()
    }
}

/// Structure curves and plane conics lying entirely in the intersection.
pub fn contained_curves(q: &QuadricModel, c: &CubicForm<Gf8>) -> ContainedCurves {
    let zeros = zero_mask8(q, c);
    let ce = c.embed();
    let mut out = ContainedCurves::default();
    for s in &q.structure {
        let hit = (zeros & s.mask).count_ones();
        match s.kind {
            // Four points on a line force the whole line onto a cubic.
            CurveKind::Line if hit >= 4 => match s.ruling {
                Some(Ruling::A) => out.ruling_a.push(s.label.clone()),
                Some(Ruling::B) => out.ruling_b.push(s.label.clone()),
                None => out.pencil.push(s.label.clone()),
            },
            CurveKind::Conic if hit == 9 && s.points64.iter().all(|p| ce.vanishes_at(p)) => {
                out.conics.push(s.label.clone())
            }
            _ => {}
        }
    }
    for sec in &q.plane_conics {
        // A conic meets a cubic not containing it in at most 6 points.
        if (zeros & sec.mask).count_ones() >= 7 && sec.points64.iter().all(|p| ce.vanishes_at(p)) {
            out.plane_conics.push(sec.plane.map(|x| x.to_u8()));
        }
    }
    out
}

fn zero_mask8(q: &QuadricModel, c: &CubicForm<Gf8>) -> u128 {
    let t = &GF8_TABLES[q.id as usize];
    t.zero_mask(&t.values(&c.0))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveIncidence {
    pub label: String,
    pub count: u32,
}

/// GF(8) intersection count with each structure curve, not counting the cone
/// vertex or the nonsplit base points.
pub fn incidence_profile(q: &QuadricModel, c: &CubicForm<Gf8>) -> Vec<CurveIncidence> {
    let zeros = zero_mask8(q, c);
    let shared = q
        .vertex
        .iter()
        .chain(&q.base_points)
        .fold(0u128, |m, p| m | 1u128 << q.point_index(p).expect("on quadric"));
    q.structure
        .iter()
        .map(|s| CurveIncidence {
            label: s.label.clone(),
            count: (zeros & s.mask & !shared).count_ones(),
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Bad-curve taxonomy

/// Contained-line pattern a taxonomy row requires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinePattern {
    None,
    One,
    TwoSameRuling,
    OnePerRuling,
    ThreeSameRuling,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BadCaseRow {
    pub label: String,
    pub quadrics: Vec<QuadricId>,
    pub n64: Vec<usize>,
    pub lines: LinePattern,
    pub plane_conics: usize,
    pub note: String,
}

/// Maximum GF(8) points on a component of degree 3, 4, 5 defined over GF(8).
pub const COMPONENT_POINT_CAPS: [(u32, u32); 3] = [(3, 9), (4, 14), (5, 18)];

/// Maximum GF(8) points on a degree-d curve not definable over GF(8).
pub fn non_rational_cap(d: u32) -> u32 {
    d * d
}

/// GF(64) points of a rational curve (genus 0).
const P1_64: usize = 65;

/// Genus-1 components of the (2,2) + (0,1) + (1,0) case: (label, GF(8) points,
/// singular, GF(64) points the component shares with the two lines).
const GENUS_ONE_SUBCASES: [(&str, i64, bool, usize); 6] = [
    ("10 points, nonsingular", 10, false, 4),
    ("10 points, singular", 10, true, 4),
    ("12 points, tangent or through the crossing", 12, false, 2),
    ("12 points, four distinct meetings", 12, false, 4),
    ("13 points", 13, false, 3),
    ("14 points", 14, false, 4),
];

/// GF(64) points of a singular arithmetic-genus-1 component.
const SINGULAR_GENUS_ONE_64: usize = 64;

/// GF(64) count of a genus-1 component with `n8` rational points.
pub fn genus_one_n64(n8: i64) -> usize {
    let t = ZetaType::integer(&[n8 - 9]);
    t.points(8, 2).to_string().parse().expect("small")
}

pub struct BadCaseTable {
    pub rows: Vec<BadCaseRow>,
}

impl BadCaseTable {
    /// Build the rows, deriving every GF(64) count from component arithmetic.
    pub fn new() -> Self {
        use QuadricId::*;
        // Two distinct lines of opposite rulings share one point.
        let two_lines = 2 * P1_64 - 1;
        let mut mixed = BTreeSet::new();
        let mut notes = Vec::new();
        for (what, n8, singular, overlap) in GENUS_ONE_SUBCASES {
            let e = if singular { SINGULAR_GENUS_ONE_64 } else { genus_one_n64(n8) };
            let total = two_lines + e - overlap;
            mixed.insert(total);
            notes.push(format!("{what}: {total}"));
        }
        // Degree 5 genus 2 with 18 points: type ((9±√5)/2).
        let quintic = ZetaType::quadratic_pair(9, 19, 1).points(8, 2).to_string().parse::<usize>().expect("small");
        let rows = vec![
            BadCaseRow {
                label: "(5,1)".into(),
                quadrics: vec![Split],
                n64: vec![P1_64 + quintic],
                lines: LinePattern::One,
                plane_conics: 0,
                note: format!("line plus genus-2 quintic with 18 points ({quintic} over GF(64))"),
            },
            BadCaseRow {
                label: "(4,1,1):(3,1)+(0,1)+(0,1)".into(),
                quadrics: vec![Split],
                n64: vec![3 * P1_64],
                lines: LinePattern::TwoSameRuling,
                plane_conics: 0,
                note: "twisted cubic and two disjoint lines".into(),
            },
            BadCaseRow {
                label: "(4,1,1):(2,2)+(0,1)+(1,0)".into(),
                quadrics: vec![Split],
                n64: mixed.into_iter().collect(),
                lines: LinePattern::OnePerRuling,
                plane_conics: 0,
                note: notes.join("; "),
            },
            BadCaseRow {
                label: "(2,2,2)".into(),
                quadrics: vec![Split, Cone, Nonsplit],
                // Two conics share 2 points; the third meets them in 2 or 4 more.
                n64: vec![2 * P1_64 - 2 + P1_64 - 4, 2 * P1_64 - 2 + P1_64 - 2],
                lines: LinePattern::None,
                plane_conics: 3,
                note: "three plane conics over GF(8)".into(),
            },
            BadCaseRow {
                label: "(1,1,1,1,1,1)".into(),
                quadrics: vec![Split],
                n64: vec![3 * P1_64],
                lines: LinePattern::ThreeSameRuling,
                plane_conics: 0,
                note: "three GF(8) lines in one ruling and three conjugate lines over GF(512)".into(),
            },
        ];
        BadCaseTable { rows }
    }

    /// Union of all expected GF(64) counts.
    pub fn all_n64(&self) -> BTreeSet<usize> {
        self.rows.iter().flat_map(|r| r.n64.iter().copied()).collect()
    }

    pub fn matches(&self, q: QuadricId, n64: usize, curves: &ContainedCurves) -> Vec<&BadCaseRow> {
        let pattern = line_pattern(curves);
        self.rows
            .iter()
            .filter(|r| {
                r.quadrics.contains(&q)
                    && r.n64.contains(&n64)
                    && Some(r.lines) == pattern
                    && (r.plane_conics == 0 || curves.plane_conics.len() == r.plane_conics)
            })
            .collect()
    }
}

impl Default for BadCaseTable {
    fn default() -> Self {
        Self::new()
    }
}

fn line_pattern(c: &ContainedCurves) -> Option<LinePattern> {
    let (a, b, p) = (c.ruling_a.len(), c.ruling_b.len(), c.pencil.len());
    match (a, b, p) {
        (0, 0, 0) => Some(LinePattern::None),
        _ if a + b + p == 1 => Some(LinePattern::One),
        (2, 0, 0) | (0, 2, 0) => Some(LinePattern::TwoSameRuling),
        (1, 1, 0) => Some(LinePattern::OnePerRuling),
        (3, 0, 0) | (0, 3, 0) => Some(LinePattern::ThreeSameRuling),
        _ => None,
    }
}

static BAD_TABLE: LazyLock<BadCaseTable> = LazyLock::new(BadCaseTable::new);

pub fn bad_case_table() -> &'static BadCaseTable {
    &BAD_TABLE
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub quadric: QuadricId,
    pub coeffs: Vec<u8>,
    pub n8: usize,
    pub n64: usize,
    pub lines: ContainedCurves,
    pub profile: Vec<CurveIncidence>,
    pub good: bool,
    pub labels: Vec<String>,
    /// A 27-point intersection that is neither good nor matched by any row.
    pub anomalous: bool,
}

/// Every taxonomy row consistent with the report.
pub fn classify_bad(r: &IntersectionReport) -> Vec<String> {
    bad_case_table()
        .matches(r.quadric, r.n64, &r.lines)
        .into_iter()
        .map(|row| row.label.clone())
        .collect()
}

pub fn analyze(q: &QuadricModel, c: &CubicForm<Gf8>) -> IntersectionReport {
    let n8 = count_intersection(q, c, CountField::Gf8);
    let n64 = count_intersection(q, c, CountField::Gf64);
    let mut r = IntersectionReport {
        quadric: q.id,
        coeffs: c.codecs(),
        n8,
        n64,
        lines: contained_curves(q, c),
        profile: incidence_profile(q, c),
        good: false,
        labels: Vec::new(),
        anomalous: false,
    };
    if n8 == 27 {
        r.good = good_curve_test(n8, n64).expect("n8 = 27");
        if !r.good {
            r.labels = classify_bad(&r);
            r.anomalous = r.labels.is_empty();
        }
    }
    r
}
