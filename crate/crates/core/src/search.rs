//! Exhaustive scan of the reduced cubic families for cubics meeting a
//! quadric in a prescribed number of GF(8) points.
//!
//! A family fixes some coefficients, ties others to affine functions of the
//! remaining free ones, and enumerates the free coefficients as a base-8
//! odometer. The first free slot is the most significant digit of the
//! linear index, which is the certificate key.
//!
//! Values of a cubic on the quadric's points are held bitsliced: three
//! `u128` planes, bit `i` of plane `j` being bit `j` of the value at point
//! `i`. Adding a coefficient contribution is three XORs and counting zeros
//! is one popcount.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::IntersectionReport;
use crate::forms::{cubic_index as ci, CubicForm, HomogeneousForm, ProjPoint, CUBIC_MONOMIALS};
use crate::forms::eval_monomial;
use crate::gf::{Field, Gf8};
use crate::quadric::{QuadricId, QuadricModel};

pub const ENGINE_VERSION: &str = concat!("genus4-engine/", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("range [{start}, {end}) is not inside [0, {max})")]
    MalformedRange { start: u64, end: u64, max: u64 },
    #[error("expected {expected} free digits, got {got}")]
    WrongDigits { expected: usize, got: usize },
    #[error("digit {0} is not a GF(8) codec")]
    BadDigit(u8),
    #[error("unknown case id {0:?}")]
    UnknownCase(String),
    #[error("inconsistent constraints for {case}: {what}")]
    Inconsistent { case: String, what: String },
    #[error("cannot resume: {0}")]
    CheckpointMismatch(String),
    #[error("scaling normalization needs a homogeneous family; {0} is not")]
    NotHomogeneous(CaseId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseId {
    Red1a,
    Red1b,
    Red2,
    Red3P1,
    Red3P2,
}

impl CaseId {
    pub const ALL: [CaseId; 5] = [
        CaseId::Red1a,
        CaseId::Red1b,
        CaseId::Red2,
        CaseId::Red3P1,
        CaseId::Red3P2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseId::Red1a => "red1a",
            CaseId::Red1b => "red1b",
            CaseId::Red2 => "red2",
            CaseId::Red3P1 => "red3_p1",
            CaseId::Red3P2 => "red3_p2",
        }
    }

    pub fn quadric(self) -> QuadricId {
        match self {
            CaseId::Red1a | CaseId::Red1b => QuadricId::Split,
            CaseId::Red2 => QuadricId::Cone,
            CaseId::Red3P1 | CaseId::Red3P2 => QuadricId::Nonsplit,
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseId {
    type Err = SearchError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CaseId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| SearchError::UnknownCase(s.to_string()))
    }
}

/// `constant + Σ coeff · c[position]` over free positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Affine {
    pub constant: Gf8,
    pub terms: Vec<(usize, Gf8)>,
}

/// Post-count predicate on the zero set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseFilter {
    /// Non-base points on C∞, C0, C1: #C∞ ≥ #C0 ≥ #C1 and their sum ≥ 9.
    ConicOrder,
}

/// A reduced family of cubics.
#[derive(Debug, Clone)]
pub struct SearchCase {
    pub id: CaseId,
    pub quadric: QuadricId,
    pub zero_indices: Vec<usize>,
    pub fixed_values: Vec<(usize, Gf8)>,
    pub determined: Vec<(usize, Affine)>,
    pub free_indices: Vec<usize>,
    pub prescribed_points: Vec<ProjPoint<Gf8>>,
    pub forbidden_points: Vec<ProjPoint<Gf8>>,
    pub filter: Option<CaseFilter>,
}

impl SearchCase {
    pub fn free_dim(&self) -> usize {
        self.free_indices.len()
    }

    pub fn size(&self) -> u64 {
        8u64.pow(self.free_dim() as u32)
    }

    /// No fixed nonzero values and no affine constants: closed under scaling.
    pub fn is_homogeneous(&self) -> bool {
        self.fixed_values.is_empty() && self.determined.iter().all(|(_, a)| a.constant.is_zero())
    }

    pub fn digits_of(&self, index: u64) -> Vec<u8> {
        let n = self.free_dim();
        let mut d = vec![0u8; n];
        let mut x = index;
        for slot in (0..n).rev() {
            d[slot] = (x % 8) as u8;
            x /= 8;
        }
        d
    }

    pub fn index_of(&self, digits: &[u8]) -> u64 {
        digits.iter().fold(0u64, |acc, &d| acc * 8 + d as u64)
    }

    pub fn materialize(&self, digits: &[u8]) -> Result<CubicForm<Gf8>, SearchError> {
        if digits.len() != self.free_dim() {
            return Err(SearchError::WrongDigits {
                expected: self.free_dim(),
                got: digits.len(),
            });
        }
        let mut c = [Gf8::ZERO; 20];
        for (&pos, &d) in self.free_indices.iter().zip(digits) {
            c[pos] = Gf8::new(d).map_err(|_| SearchError::BadDigit(d))?;
        }
        for &(pos, v) in &self.fixed_values {
            c[pos] = v;
        }
        for (pos, a) in &self.determined {
            let mut v = a.constant;
            for &(j, k) in &a.terms {
                v += k * c[j];
            }
            c[*pos] = v;
        }
        Ok(CubicForm(c))
    }

    pub fn materialize_index(&self, index: u64) -> Result<CubicForm<Gf8>, SearchError> {
        self.materialize(&self.digits_of(index))
    }

    /// Coefficient vector contributed by free slot `s` carrying value 1.
    fn unit_direction(&self, slot: usize) -> [Gf8; 20] {
        let pos = self.free_indices[slot];
        let mut u = [Gf8::ZERO; 20];
        u[pos] = Gf8::ONE;
        for (p, a) in &self.determined {
            for &(j, k) in &a.terms {
                if j == pos {
                    u[*p] += k;
                }
            }
        }
        u
    }

    fn constant_part(&self) -> [Gf8; 20] {
        let mut c = [Gf8::ZERO; 20];
        for &(pos, v) in &self.fixed_values {
            c[pos] = v;
        }
        for (pos, a) in &self.determined {
            c[*pos] = a.constant;
        }
        c
    }
}

// ---------------------------------------------------------------------------
// Building the families

struct Equation {
    coeffs: [Gf8; 20],
    rhs: Gf8,
    pivot: Option<usize>,
}

/// Affine constraints on the 20 cubic coefficients, solved by Gauss-Jordan
/// elimination with optionally declared pivots.
#[derive(Default)]
pub struct CaseBuilder {
    equations: Vec<Equation>,
    prescribed: Vec<ProjPoint<Gf8>>,
    forbidden: Vec<ProjPoint<Gf8>>,
}

impl CaseBuilder {
    pub fn zero(mut self, positions: &[usize]) -> Self {
        for &p in positions {
            self = self.fixed(p, Gf8::ZERO);
        }
        self
    }

    pub fn fixed(mut self, pos: usize, v: Gf8) -> Self {
        let mut coeffs = [Gf8::ZERO; 20];
        coeffs[pos] = Gf8::ONE;
        self.equations.push(Equation {
            coeffs,
            rhs: v,
            pivot: Some(pos),
        });
        self
    }

    /// `Σ k · c[pos] = rhs`.
    pub fn relation(mut self, terms: &[(usize, Gf8)], rhs: Gf8, pivot: Option<usize>) -> Self {
        let mut coeffs = [Gf8::ZERO; 20];
        for &(p, k) in terms {
            coeffs[p] += k;
        }
        self.equations.push(Equation { coeffs, rhs, pivot });
        self
    }

    /// The cubic vanishes at `p`; the pivot is chosen automatically.
    pub fn member(mut self, p: ProjPoint<Gf8>) -> Self {
        let coeffs = std::array::from_fn(|k| eval_monomial(&CUBIC_MONOMIALS[k], p.coords()));
        self.equations.push(Equation {
            coeffs,
            rhs: Gf8::ZERO,
            pivot: None,
        });
        self.prescribed.push(p);
        self
    }

    /// Record a point the family must contain (already implied by the equations).
    pub fn prescribed(mut self, p: ProjPoint<Gf8>) -> Self {
        self.prescribed.push(p);
        self
    }

    pub fn forbidden(mut self, p: ProjPoint<Gf8>) -> Self {
        self.forbidden.push(p);
        self
    }

    pub fn build(self, id: CaseId, filter: Option<CaseFilter>) -> Result<SearchCase, SearchError> {
        let bad = |what: String| SearchError::Inconsistent {
            case: id.to_string(),
            what,
        };
        // Rows in reduced form, each with its pivot column.
        let mut rows: Vec<(usize, [Gf8; 20], Gf8)> = Vec::new();
        for eq in self.equations {
            let mut c = eq.coeffs;
            let mut r = eq.rhs;
            for (p, row, rhs) in &rows {
                let f = c[*p];
                if !f.is_zero() {
                    for k in 0..20 {
                        c[k] += f * row[k];
                    }
                    r += f * *rhs;
                }
            }
            let pivot = match eq.pivot {
                Some(p) if !c[p].is_zero() => p,
                Some(p) => return Err(bad(format!("declared pivot {p} eliminated"))),
                None => match (0..20).rev().find(|&k| !c[k].is_zero()) {
                    Some(p) => p,
                    None if r.is_zero() => continue,
                    None => return Err(bad("0 = 1".into())),
                },
            };
            let inv = c[pivot].inv().expect("nonzero");
            for x in c.iter_mut() {
                *x *= inv;
            }
            r *= inv;
            for (_, row, rhs) in rows.iter_mut() {
                let f = row[pivot];
                if !f.is_zero() {
                    for k in 0..20 {
                        row[k] += f * c[k];
                    }
                    *rhs += f * r;
                }
            }
            rows.push((pivot, c, r));
        }
        let pivots: Vec<usize> = rows.iter().map(|r| r.0).collect();
        let free_indices: Vec<usize> = (0..20).filter(|k| !pivots.contains(k)).collect();
        let mut zero_indices = Vec::new();
        let mut fixed_values = Vec::new();
        let mut determined = Vec::new();
        for (p, row, rhs) in rows {
            let terms: Vec<(usize, Gf8)> = free_indices
                .iter()
                .filter(|&&k| !row[k].is_zero())
                .map(|&k| (k, row[k]))
                .collect();
            match (terms.is_empty(), rhs.is_zero()) {
                (true, true) => zero_indices.push(p),
                (true, false) => fixed_values.push((p, rhs)),
                (false, _) => determined.push((
                    p,
                    Affine {
                        constant: rhs,
                        terms,
                    },
                )),
            }
        }
        zero_indices.sort();
        fixed_values.sort_by_key(|x| x.0);
        determined.sort_by_key(|x| x.0);
        Ok(SearchCase {
            id,
            quadric: id.quadric(),
            zero_indices,
            fixed_values,
            determined,
            free_indices,
            prescribed_points: self.prescribed,
            forbidden_points: self.forbidden,
            filter,
        })
    }
}

fn p(c: [u8; 4]) -> ProjPoint<Gf8> {
    ProjPoint::from_codecs(c.map(|x| x as usize)).expect("nonzero")
}

fn pe(c: [i64; 4], zero: [bool; 4]) -> ProjPoint<Gf8> {
    let v = std::array::from_fn(|i| if zero[i] { Gf8::ZERO } else { Gf8::eta_pow(c[i]) });
    ProjPoint::new(v).expect("nonzero")
}

pub fn build_case(id: CaseId) -> Result<SearchCase, SearchError> {
    let one = Gf8::ONE;
    let eta = Gf8::ETA;
    let e = Gf8::eta_pow;
    match id {
        CaseId::Red1a => CaseBuilder::default()
            .zero(&[ci::X3, ci::Y3, ci::Z3, ci::W3, ci::X2Y, ci::XY2, ci::Z2W, ci::ZW2])
            .fixed(ci::Y2W, one)
            .fixed(ci::YW2, one)
            .relation(
                &[ci::X2Z, ci::X2W, ci::XYZ, ci::XYW, ci::XZ2, ci::XZW, ci::XW2, ci::Y2Z, ci::YZ2, ci::YZW]
                    .map(|k| (k, one)),
                Gf8::ZERO,
                Some(ci::YZW),
            )
            .prescribed(p([0, 1, 0, 0]))
            .prescribed(p([0, 0, 0, 1]))
            .prescribed(p([0, 1, 0, 1]))
            .prescribed(p([0, 0, 1, 0]))
            .prescribed(p([1, 0, 0, 0]))
            .prescribed(p([1, 1, 1, 1]))
            .build(id, None),
        CaseId::Red1b => CaseBuilder::default()
            .fixed(ci::X3, one)
            .zero(&[ci::Y3, ci::Z3, ci::W3, ci::X2Y, ci::XY2, ci::Z2W, ci::ZW2])
            .relation(&[(ci::XZ2, one), (ci::X2Z, one)], one, Some(ci::XZ2))
            .relation(&[(ci::XW2, one), (ci::X2W, one)], one, Some(ci::XW2))
            .relation(
                &[ci::XYZ, ci::XYW, ci::XZW, ci::Y2Z, ci::Y2W, ci::YZ2, ci::YZW, ci::YW2].map(|k| (k, one)),
                one,
                Some(ci::YW2),
            )
            .prescribed(p([0, 1, 0, 0]))
            .prescribed(p([0, 0, 0, 1]))
            .prescribed(p([0, 0, 1, 0]))
            .prescribed(p([1, 0, 1, 0]))
            .prescribed(p([1, 0, 0, 1]))
            .prescribed(p([1, 1, 1, 1]))
            .forbidden(p([1, 0, 0, 0]))
            .build(id, None),
        CaseId::Red2 => {
            // c_{XW²} = c_{YW²} is pinned by the two points [0:1:0:1] and [0:1:0:η]
            // (and their X-analogues); solve rather than transcribe.
            let y2w_yw2 = solve_w_pair();
            CaseBuilder::default()
                .zero(&[ci::X3, ci::X2Y, ci::XY2, ci::Y3, ci::Z3, ci::Z2W])
                .fixed(ci::W3, one)
                .fixed(ci::X2W, y2w_yw2.0)
                .fixed(ci::Y2W, y2w_yw2.0)
                .fixed(ci::XW2, y2w_yw2.1)
                .fixed(ci::YW2, y2w_yw2.1)
                .relation(
                    &[ci::X2Z, ci::XYZ, ci::XZ2, ci::Y2Z, ci::YZ2].map(|k| (k, one)),
                    Gf8::ZERO,
                    Some(ci::YZ2),
                )
                .prescribed(p([0, 1, 0, 0]))
                .prescribed(p([0, 1, 0, 1]))
                .prescribed(pe([0, 0, 0, 1], [true, false, true, false]))
                .prescribed(p([1, 0, 0, 0]))
                .prescribed(p([1, 0, 0, 1]))
                .prescribed(pe([0, 0, 0, 1], [false, true, true, false]))
                .prescribed(p([1, 1, 1, 0]))
                .forbidden(p([0, 0, 0, 1]))
                .build(id, None)
        }
        CaseId::Red3P1 | CaseId::Red3P2 => {
            let branch = if id == CaseId::Red3P1 {
                pe([0, 0, 2, -2], [true, false, false, false])
            } else {
                pe([0, 0, 3, -3], [true, false, false, false])
            };
            CaseBuilder::default()
                .zero(&[ci::X3, ci::X2Y, ci::X2Z, ci::X2W, ci::Z3, ci::W3])
                .relation(
                    &[
                        (ci::Y2Z, one),
                        (ci::Y2W, e(-1)),
                        (ci::YZ2, e(3)),
                        (ci::YW2, eta),
                        (ci::Z2W, one),
                        (ci::ZW2, e(-1)),
                    ],
                    Gf8::ZERO,
                    Some(ci::Y2Z),
                )
                .relation(
                    &[ci::Y3, ci::Y2Z, ci::Y2W, ci::YZ2, ci::YZW, ci::YW2, ci::Z2W, ci::ZW2].map(|k| (k, one)),
                    Gf8::ZERO,
                    Some(ci::Y3),
                )
                .prescribed(p([0, 0, 1, 0]))
                .prescribed(p([0, 0, 0, 1]))
                .prescribed(p([0, 1, 1, 1]))
                .prescribed(pe([0, 0, 1, -1], [true, false, false, false]))
                .member(branch)
                .build(id, Some(CaseFilter::ConicOrder))
        }
    }
}

/// Solve c_{Y²W}, c_{YW²} from membership of [0:1:0:1] and [0:1:0:η] with c_{W³} = 1.
/// Returns `(c_{Y²W}, c_{YW²})`.
pub fn solve_w_pair() -> (Gf8, Gf8) {
    // a + b = 1 and aη + bη² = η³ (Y³ coefficient zero).
    let eta = Gf8::ETA;
    let mut sols = Gf8::elements()
        .flat_map(|a| Gf8::elements().map(move |b| (a, b)))
        .filter(|&(a, b)| a + b + Gf8::ONE == Gf8::ZERO && a * eta + b * eta * eta + eta * eta * eta == Gf8::ZERO);
    let s = sols.next().expect("a solution exists");
    assert!(sols.next().is_none(), "solution is unique");
    s
}

/// All five reduced families.
pub fn case_families() -> Vec<SearchCase> {
    CaseId::ALL
        .into_iter()
        .map(|id| build_case(id).unwrap_or_else(|e| panic!("{e}")))
        .collect()
}

// ---------------------------------------------------------------------------
// Evaluation paths

/// Value of each cubic monomial at each GF(8) point of a quadric.
#[derive(Debug, Clone)]
pub struct MonomialTable {
    pub rows: Vec<[Gf8; 20]>,
}

pub fn precompute_monomial_table(q: &QuadricModel) -> MonomialTable {
    MonomialTable {
        rows: q
            .points8
            .iter()
            .map(|p| std::array::from_fn(|k| eval_monomial(&CUBIC_MONOMIALS[k], p.coords())))
            .collect(),
    }
}

impl MonomialTable {
    pub fn value(&self, row: usize, c: &CubicForm<Gf8>) -> Gf8 {
        let r = &self.rows[row];
        let mut acc = 0u8;
        for k in 0..20 {
            acc ^= Gf8::mul_raw(r[k].to_u8(), c.0[k].to_u8());
        }
        Gf8::new(acc).expect("codec")
    }

    pub fn zero_count(&self, c: &CubicForm<Gf8>) -> usize {
        (0..self.rows.len()).filter(|&i| self.value(i, c).is_zero()).count()
    }

    /// Zero count with early exit: `None` once the count is known to differ from `target`.
    pub fn zero_count_early_abort(&self, c: &CubicForm<Gf8>, target: usize) -> Option<usize> {
        let n = self.rows.len();
        let (mut zeros, mut nonzeros) = (0, 0);
        for i in 0..n {
            if self.value(i, c).is_zero() {
                zeros += 1;
                if zeros > target {
                    return None;
                }
            } else {
                nonzeros += 1;
                if nonzeros > n - target {
                    return None;
                }
            }
        }
        Some(zeros)
    }
}

/// Three bit-planes of GF(8) values over up to 128 points.
pub type Planes = [u128; 3];

#[inline(always)]
fn xor(a: Planes, b: Planes) -> Planes {
    [a[0] ^ b[0], a[1] ^ b[1], a[2] ^ b[2]]
}

/// Multiply every value by the constant `c`.
pub fn scale_planes(v: Planes, c: Gf8) -> Planes {
    let mut out = [0u128; 3];
    for j in 0..3 {
        let img = Gf8::mul_raw(c.to_u8(), 1 << j);
        for (i, o) in out.iter_mut().enumerate() {
            if img >> i & 1 == 1 {
                *o ^= v[j];
            }
        }
    }
    out
}

/// Bitsliced monomial values: `planes[k][c]` holds `c · monomial_k` on every point.
#[derive(Debug, Clone)]
pub struct BitslicedTable {
    pub npoints: usize,
    pub mask: u128,
    planes: Vec<[Planes; 8]>,
}

impl BitslicedTable {
    pub fn new(q: &QuadricModel) -> Self {
        let table = precompute_monomial_table(q);
        let planes = (0..20)
            .map(|k| {
                let mut base = [0u128; 3];
                for (i, row) in table.rows.iter().enumerate() {
                    let v = row[k].to_u8();
                    for (j, b) in base.iter_mut().enumerate() {
                        *b |= ((v >> j & 1) as u128) << i;
                    }
                }
                std::array::from_fn(|c| scale_planes(base, Gf8::from_index(c)))
            })
            .collect();
        BitslicedTable {
            npoints: q.points8.len(),
            mask: q.full_mask(),
            planes,
        }
    }

    pub fn values(&self, c: &[Gf8; 20]) -> Planes {
        c.iter()
            .enumerate()
            .fold([0; 3], |acc, (k, v)| xor(acc, self.planes[k][v.index()]))
    }

    #[inline(always)]
    pub fn zero_mask(&self, v: &Planes) -> u128 {
        !(v[0] | v[1] | v[2]) & self.mask
    }

    pub fn zero_count(&self, c: &CubicForm<Gf8>) -> usize {
        self.zero_mask(&self.values(&c.0)).count_ones() as usize
    }
}

/// Direct evaluation: count zeros of `c` on the quadric by evaluating at each point.
pub fn direct_zero_count(q: &QuadricModel, c: &CubicForm<Gf8>) -> usize {
    c.zero_count(&q.points8)
}

// ---------------------------------------------------------------------------
// Certificates

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HitCertificate {
    pub case: CaseId,
    pub index: u64,
    pub digits: Vec<u8>,
    pub coeffs: Vec<u8>,
    pub n8: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n64: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub analysis: Option<IntersectionReport>,
}

impl HitCertificate {
    pub fn cubic(&self) -> CubicForm<Gf8> {
        CubicForm::from_codecs(&self.coeffs).expect("20 codecs")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub scanned: u64,
    pub hits: u64,
    /// Number of scanned cubics by zero count on the quadric.
    pub histogram: Vec<u64>,
    /// Split and cone only: cubics with 28 zeros meeting every structure line in ≤ 3 points.
    pub low_incidence_28: u64,
}

impl SearchStats {
    pub(crate) fn new(npoints: usize) -> Self {
        SearchStats {
            histogram: vec![0; npoints + 1],
            ..Default::default()
        }
    }

    pub fn merge(&mut self, o: &SearchStats) {
        self.scanned += o.scanned;
        self.hits += o.hits;
        self.low_incidence_28 += o.low_incidence_28;
        if self.histogram.len() < o.histogram.len() {
            self.histogram.resize(o.histogram.len(), 0);
        }
        for (a, b) in self.histogram.iter_mut().zip(&o.histogram) {
            *a += b;
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SearchOutcome {
    pub hits: Vec<HitCertificate>,
    pub stats: SearchStats,
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub target: usize,
    /// Homogeneous families only: scan one representative per scaling class.
    pub normalize_scaling: bool,
    /// Thread count for the parallel driver; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Indices per work unit.
    pub chunk: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            target: 27,
            normalize_scaling: false,
            workers: None,
            chunk: 1 << 18,
        }
    }
}

// ---------------------------------------------------------------------------
// Kernel

/// Precomputed per-case scanning context.
pub struct Scanner<'a> {
    pub case: &'a SearchCase,
    pub model: &'static QuadricModel,
    table: BitslicedTable,
    base: Planes,
    /// `slot_planes[s][d]`: contribution of digit `d` in free slot `s`.
    slot_planes: Vec<[Planes; 8]>,
    structure_masks: Vec<u128>,
    excluded: u128,
    conic_masks: Option<[u128; 3]>,
}

impl<'a> Scanner<'a> {
    pub fn new(case: &'a SearchCase) -> Self {
        let model = case.quadric.model();
        let table = BitslicedTable::new(model);
        let base = table.values(&case.constant_part());
        let slot_planes = (0..case.free_dim())
            .map(|s| {
                let u = case.unit_direction(s);
                std::array::from_fn(|d| {
                    let g = Gf8::from_index(d);
                    table.values(&u.map(|x| x * g))
                })
            })
            .collect();
        let idx = |p: &ProjPoint<Gf8>| model.point_index(p).expect("on quadric");
        let excluded = model
            .vertex
            .iter()
            .chain(&model.base_points)
            .fold(0u128, |m, p| m | 1u128 << idx(p));
        let conic_masks = case.filter.map(|CaseFilter::ConicOrder| {
            let find = |label: &str| {
                model
                    .structure
                    .iter()
                    .find(|c| c.label == label)
                    .expect("conic label")
                    .mask
                    & !excluded
            };
            [find("C[inf]"), find("C[0]"), find("C[1]")]
        });
        Scanner {
            case,
            model,
            base,
            slot_planes,
            structure_masks: model.structure.iter().map(|c| c.mask).collect(),
            excluded,
            conic_masks,
            table,
        }
    }

    fn passes_filter(&self, zeros: u128) -> bool {
        match self.conic_masks {
            None => true,
            Some([inf, c0, c1]) => {
                let (a, b, c) = (
                    (zeros & inf).count_ones(),
                    (zeros & c0).count_ones(),
                    (zeros & c1).count_ones(),
                );
                a >= b && b >= c && a + b + c >= 9
            }
        }
    }

    fn low_incidence(&self, zeros: u128) -> bool {
        self.case.quadric != QuadricId::Nonsplit
            && self
                .structure_masks
                .iter()
                .all(|m| (zeros & m & !self.excluded).count_ones() <= 3)
    }

    fn certificate(&self, index: u64, n8: usize) -> HitCertificate {
        let digits = self.case.digits_of(index);
        let cubic = self.case.materialize(&digits).expect("valid digits");
        HitCertificate {
            case: self.case.id,
            index,
            digits,
            coeffs: cubic.codecs(),
            n8,
            n64: None,
            analysis: None,
        }
    }

    /// Scan `[start, end)` sequentially with incremental odometer updates.
    pub fn scan(&self, start: u64, end: u64, target: usize) -> SearchOutcome {
        let mut out = SearchOutcome {
            hits: Vec::new(),
            stats: SearchStats::new(self.table.npoints),
        };
        if start >= end {
            return out;
        }
        let n = self.case.free_dim();
        let mut digits = self.case.digits_of(start);
        // acc[k] = base + contributions of slots 0..k.
        let mut acc = vec![self.base; n + 1];
        for s in 0..n {
            acc[s + 1] = xor(acc[s], self.slot_planes[s][digits[s] as usize]);
        }
        let last = &self.slot_planes[n - 1];
        let mut idx = start;
        let hist = &mut out.stats.histogram;
        while idx < end {
            let prefix = acc[n - 1];
            let d0 = digits[n - 1] as u64;
            let stop = 8.min(d0 + (end - idx));
            for d in d0..stop {
                let v = xor(prefix, last[d as usize]);
                let zeros = self.table.zero_mask(&v);
                let z = zeros.count_ones() as usize;
                hist[z] += 1;
                if z == target && self.passes_filter(zeros) {
                    out.hits.push(self.certificate(idx + d - d0, z));
                }
                if z == 28 && self.low_incidence(zeros) {
                    out.stats.low_incidence_28 += 1;
                }
            }
            idx += stop - d0;
            if idx >= end {
                break;
            }
            // Carry into the higher digits.
            digits[n - 1] = 0;
            let mut s = n - 1;
            loop {
                s -= 1;
                digits[s] += 1;
                if digits[s] < 8 {
                    break;
                }
                digits[s] = 0;
            }
            for t in s..n {
                acc[t + 1] = xor(acc[t], self.slot_planes[t][digits[t] as usize]);
            }
        }
        out.stats.scanned = end - start;
        out.stats.hits = out.hits.len() as u64;
        out
    }
}

/// Sub-ranges of `[start, end)` holding scaling representatives: index 0 and
/// every index whose leading nonzero digit is 1.
pub fn normalized_ranges(n: usize, start: u64, end: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    if start == 0 && end > 0 {
        out.push((0, 1));
    }
    for e in 0..n as u32 {
        let lo = 8u64.pow(e).max(start);
        let hi = (2 * 8u64.pow(e)).min(end);
        if lo < hi {
            out.push((lo, hi));
        }
    }
    out
}

fn scaled_hits(case: &SearchCase, h: &HitCertificate) -> Vec<HitCertificate> {
    let mut out = vec![h.clone()];
    if h.index == 0 {
        return out;
    }
    for lambda in Gf8::nonzero_elements().filter(|l| *l != Gf8::ONE) {
        let digits: Vec<u8> = h
            .digits
            .iter()
            .map(|&d| (Gf8::new(d).expect("codec") * lambda).to_u8())
            .collect();
        let cubic = case.materialize(&digits).expect("valid");
        out.push(HitCertificate {
            case: h.case,
            index: case.index_of(&digits),
            digits,
            coeffs: cubic.codecs(),
            n8: h.n8,
            n64: None,
            analysis: None,
        });
    }
    out
}

fn chunks(ranges: &[(u64, u64)], chunk: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for &(s, e) in ranges {
        let mut a = s;
        while a < e {
            let b = (a + chunk).min(e);
            out.push((a, b));
            a = b;
        }
    }
    out
}

fn scan_chunks(scanner: &Scanner, work: &[(u64, u64)], target: usize, workers: Option<usize>) -> Vec<SearchOutcome> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let run = || {
            work.par_iter()
                .map(|&(s, e)| scanner.scan(s, e, target))
                .collect::<Vec<_>>()
        };
        match workers {
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .expect("thread pool")
                .install(run),
            None => run(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        scan_chunks_sequential(scanner, work, target)
    }
}

fn scan_chunks_sequential(scanner: &Scanner, work: &[(u64, u64)], target: usize) -> Vec<SearchOutcome> {
    work.iter().map(|&(s, e)| scanner.scan(s, e, target)).collect()
}

fn check_range(case: &SearchCase, start: u64, end: u64) -> Result<(), SearchError> {
    if start > end || end > case.size() {
        return Err(SearchError::MalformedRange {
            start,
            end,
            max: case.size(),
        });
    }
    Ok(())
}

fn merge(case: &SearchCase, parts: Vec<SearchOutcome>, normalize: bool, npoints: usize) -> SearchOutcome {
    let mut stats = SearchStats::new(npoints);
    let mut hits = Vec::new();
    for p in parts {
        stats.merge(&p.stats);
        if normalize {
            hits.extend(p.hits.iter().flat_map(|h| scaled_hits(case, h)));
        } else {
            hits.extend(p.hits);
        }
    }
    hits.sort_by_key(|h| (h.case, h.index));
    stats.hits = hits.len() as u64;
    SearchOutcome { hits, stats }
}

fn plan(case: &SearchCase, start: u64, end: u64, opts: &SearchOptions) -> Result<Vec<(u64, u64)>, SearchError> {
    check_range(case, start, end)?;
    if opts.normalize_scaling && !case.is_homogeneous() {
        return Err(SearchError::NotHomogeneous(case.id));
    }
    let ranges = if opts.normalize_scaling {
        normalized_ranges(case.free_dim(), start, end)
    } else {
        vec![(start, end)]
    };
    Ok(chunks(&ranges, opts.chunk.max(1)))
}

/// Scan `[start, end)` of a family; hits come back sorted by index.
///
/// With scaling normalization the range selects representatives and every
/// scaled copy of a representative hit is reported, wherever its index falls.
pub fn run_search(case: &SearchCase, start: u64, end: u64, opts: &SearchOptions) -> Result<SearchOutcome, SearchError> {
    let work = plan(case, start, end, opts)?;
    let scanner = Scanner::new(case);
    let parts = scan_chunks(&scanner, &work, opts.target, opts.workers);
    Ok(merge(case, parts, opts.normalize_scaling, scanner.table.npoints))
}

/// Same as [`run_search`] but always on the calling thread.
pub fn run_search_sequential(case: &SearchCase, start: u64, end: u64, opts: &SearchOptions) -> Result<SearchOutcome, SearchError> {
    let work = plan(case, start, end, opts)?;
    let scanner = Scanner::new(case);
    let parts = scan_chunks_sequential(&scanner, &work, opts.target);
    Ok(merge(case, parts, opts.normalize_scaling, scanner.table.npoints))
}

/// Reference scan: materialize each cubic and count by direct evaluation.
pub fn run_search_naive(case: &SearchCase, start: u64, end: u64, target: usize) -> Result<Vec<HitCertificate>, SearchError> {
    check_range(case, start, end)?;
    let scanner = Scanner::new(case);
    let model = case.quadric.model();
    let mut hits = Vec::new();
    for idx in start..end {
        let c = case.materialize_index(idx)?;
        let zeros = model
            .points8
            .iter()
            .enumerate()
            .filter(|(_, p)| c.vanishes_at(p))
            .fold(0u128, |m, (i, _)| m | 1u128 << i);
        if zeros.count_ones() as usize == target && scanner.passes_filter(zeros) {
            hits.push(scanner.certificate(idx, target));
        }
    }
    Ok(hits)
}

// ---------------------------------------------------------------------------
// Checkpoints

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub engine_version: String,
    pub case: CaseId,
    pub next_index: u64,
    pub range_end: u64,
    pub target: usize,
    pub normalize_scaling: bool,
}

impl Checkpoint {
    pub fn start(case: CaseId, start: u64, end: u64, opts: &SearchOptions) -> Self {
        Checkpoint {
            engine_version: ENGINE_VERSION.to_string(),
            case,
            next_index: start,
            range_end: end,
            target: opts.target,
            normalize_scaling: opts.normalize_scaling,
        }
    }

    pub fn is_done(&self) -> bool {
        self.next_index >= self.range_end
    }

    /// Refuse to continue a checkpoint written for different parameters.
    pub fn validate(&self, case: CaseId, end: u64, opts: &SearchOptions) -> Result<(), SearchError> {
        let mismatch = |what: String| Err(SearchError::CheckpointMismatch(what));
        if self.engine_version != ENGINE_VERSION {
            return mismatch(format!("engine version {} != {}", self.engine_version, ENGINE_VERSION));
        }
        if self.case != case {
            return mismatch(format!("checkpoint is for case {}, not {}", self.case, case));
        }
        if self.range_end != end || self.target != opts.target || self.normalize_scaling != opts.normalize_scaling {
            return mismatch("range end, target or normalization differ".into());
        }
        Ok(())
    }
}

/// Run from `checkpoint.next_index` to its end in batches, reporting each
/// batch's hits together with the checkpoint that follows it.
pub fn run_batches<E>(
    case: &SearchCase,
    mut checkpoint: Checkpoint,
    batch: u64,
    opts: &SearchOptions,
    mut on_batch: impl FnMut(&SearchOutcome, &Checkpoint) -> Result<(), E>,
) -> Result<SearchStats, E>
where
    E: From<SearchError>,
{
    let scanner = Scanner::new(case);
    let mut total = SearchStats::new(scanner.table.npoints);
    while !checkpoint.is_done() {
        let end = (checkpoint.next_index + batch.max(1)).min(checkpoint.range_end);
        let work = plan(case, checkpoint.next_index, end, opts)?;
        let parts = scan_chunks(&scanner, &work, opts.target, opts.workers);
        let outcome = merge(case, parts, opts.normalize_scaling, scanner.table.npoints);
        total.merge(&outcome.stats);
        checkpoint.next_index = end;
        on_batch(&outcome, &checkpoint)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn case(id: CaseId) -> SearchCase {
        build_case(id).unwrap()
    }

    #[test]
    fn family_shapes() {
        let dims: Vec<_> = case_families().iter().map(|c| c.free_dim()).collect();
        assert_eq!(dims, vec![9, 9, 8, 11, 11]);
        let r1a = case(CaseId::Red1a);
        assert_eq!(r1a.free_indices, vec![2, 3, 5, 6, 7, 8, 9, 11, 13]);
        assert_eq!(r1a.determined.len(), 1);
        assert_eq!(r1a.determined[0].0, ci::YZW);
        let r1b = case(CaseId::Red1b);
        assert_eq!(r1b.free_indices, vec![2, 3, 5, 6, 8, 11, 12, 13, 14]);
        let r2 = case(CaseId::Red2);
        assert_eq!(r2.free_indices, vec![2, 5, 6, 7, 8, 11, 14, 18]);
        assert!(r2.fixed_values.contains(&(ci::W3, Gf8::ONE)));
        for c in case_families() {
            let mut all: Vec<usize> = c.zero_indices.clone();
            all.extend(c.fixed_values.iter().map(|x| x.0));
            all.extend(c.determined.iter().map(|x| x.0));
            all.extend(&c.free_indices);
            all.sort();
            assert_eq!(all, (0..20).collect::<Vec<_>>(), "{}", c.id);
        }
        assert!(case(CaseId::Red3P1).is_homogeneous());
        assert!(!r1a.is_homogeneous());
    }

    #[test]
    fn red2_w_coefficients_come_from_the_linear_solve() {
        let (a, b) = solve_w_pair();
        assert_eq!(a, Gf8::ETA);
        assert_eq!(b, Gf8::eta_pow(3));
        let r2 = case(CaseId::Red2);
        assert!(r2.fixed_values.contains(&(ci::XW2, Gf8::eta_pow(3))));
        assert!(r2.fixed_values.contains(&(ci::X2W, Gf8::ETA)));
    }

    #[test]
    fn red1a_zero_vector() {
        let c = case(CaseId::Red1a).materialize(&[0; 9]).unwrap();
        let expect = CubicForm::from_terms(&[([0, 2, 0, 1], Gf8::ONE), ([0, 1, 0, 2], Gf8::ONE)]);
        assert_eq!(c, expect);
    }

    #[test]
    fn wrong_digit_count_is_an_error() {
        assert!(matches!(
            case(CaseId::Red2).materialize(&[0; 3]),
            Err(SearchError::WrongDigits { .. })
        ));
    }

    #[test]
    fn digit_index_round_trip() {
        let c = case(CaseId::Red1a);
        for idx in [0u64, 1, 7, 8, 12345, c.size() - 1] {
            assert_eq!(c.index_of(&c.digits_of(idx)), idx);
        }
    }

    #[test]
    fn table_row_at_all_ones_point() {
        let s = QuadricId::Split.model();
        let t = precompute_monomial_table(s);
        assert_eq!(t.rows.len(), 81);
        let i = s.point_index(&p([1, 1, 1, 1])).unwrap();
        assert!(t.rows[i].iter().all(|v| *v == Gf8::ONE));
    }

    #[test]
    fn three_paths_agree_on_random_cubics() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in crate::quadric::catalog() {
            let t = precompute_monomial_table(q);
            let b = BitslicedTable::new(q);
            for _ in 0..300 {
                let c = CubicForm(std::array::from_fn(|_| Gf8::from_index(rng.gen_range(0..8))));
                let d = direct_zero_count(q, &c);
                assert_eq!(t.zero_count(&c), d);
                assert_eq!(b.zero_count(&c), d);
                for target in [d, 27] {
                    let e = t.zero_count_early_abort(&c, target);
                    assert_eq!(e == Some(target), d == target);
                }
            }
        }
    }

    #[test]
    fn scan_matches_naive() {
        let opts = SearchOptions::default();
        for id in CaseId::ALL {
            let c = case(id);
            let start = c.size() / 3;
            for target in [10, 12, 27] {
                let fast = run_search(&c, start, start + 3000, &SearchOptions { target, ..opts.clone() }).unwrap();
                let slow = run_search_naive(&c, start, start + 3000, target).unwrap();
                assert_eq!(fast.hits, slow, "{id} target {target}");
                assert_eq!(fast.stats.scanned, 3000);
            }
        }
    }

    #[test]
    fn partitions_merge_identically() {
        let c = case(CaseId::Red2);
        let opts = SearchOptions { target: 12, ..Default::default() };
        let whole = run_search_sequential(&c, 1000, 50_000, &opts).unwrap();
        let mut parts = Vec::new();
        for (s, e) in [(30_000, 50_000), (1000, 1001), (1001, 30_000)] {
            parts.extend(run_search(&c, s, e, &SearchOptions { chunk: 777, ..opts.clone() }).unwrap().hits);
        }
        parts.sort_by_key(|h| h.index);
        assert_eq!(whole.hits, parts);
        assert!(!whole.hits.is_empty());
    }

    #[test]
    fn normalization_reproduces_the_full_hit_set() {
        let c = case(CaseId::Red3P1);
        // The vectors supported on the last six digits form a scaling-closed sub-family.
        let end = 8u64.pow(6);
        let (opts, full) = (0..=65)
            .rev()
            .map(|target| {
                let opts = SearchOptions { target, ..Default::default() };
                let out = run_search(&c, 0, end, &opts).unwrap();
                (opts, out)
            })
            .find(|(_, o)| o.hits.len() > 7)
            .expect("some count has hits");
        let norm = run_search(&c, 0, end, &SearchOptions { normalize_scaling: true, ..opts.clone() }).unwrap();
        assert_eq!(full.hits, norm.hits);
        assert!(run_search(&case(CaseId::Red2), 0, 8, &SearchOptions { normalize_scaling: true, ..opts }).is_err());
    }

    #[test]
    fn malformed_range() {
        let c = case(CaseId::Red2);
        assert!(run_search(&c, 5, 4, &SearchOptions::default()).is_err());
        assert!(run_search(&c, 0, c.size() + 1, &SearchOptions::default()).is_err());
    }

    #[test]
    fn checkpoint_resume_equivalence() {
        let c = case(CaseId::Red1b);
        let opts = SearchOptions { target: 14, ..Default::default() };
        let (s, e) = (100_000, 140_000);
        let whole = run_search(&c, s, e, &opts).unwrap().hits;

        let mut got = Vec::new();
        let mut saved = None;
        let cp = Checkpoint::start(c.id, s, e, &opts);
        // Stop after the first batch, as if interrupted.
        let _ = run_batches::<SearchError>(&c, cp, 15_000, &opts, |o, cp| {
            got.extend(o.hits.clone());
            saved = Some(cp.clone());
            Err(SearchError::CheckpointMismatch("interrupted".into()))
        });
        let saved: Checkpoint = serde_json::from_str(&serde_json::to_string(&saved.unwrap()).unwrap()).unwrap();
        assert_eq!(saved.next_index, s + 15_000);
        saved.validate(c.id, e, &opts).unwrap();
        assert!(saved.validate(CaseId::Red1a, e, &opts).is_err());
        run_batches::<SearchError>(&c, saved, 15_000, &opts, |o, _| {
            got.extend(o.hits.clone());
            Ok(())
        })
        .unwrap();
        assert_eq!(got, whole);
    }

    fn arb_digits(n: usize) -> impl Strategy<Value = Vec<u8>> {
        prop::collection::vec(0u8..8, n)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn families_contain_prescribed_points(which in 0usize..5, seed in any::<u64>()) {
            let c = case(CaseId::ALL[which]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let digits: Vec<u8> = (0..c.free_dim()).map(|_| rng.gen_range(0..8)).collect();
            let f = c.materialize(&digits).unwrap();
            for p in &c.prescribed_points {
                prop_assert!(f.vanishes_at(p), "{} misses {:?}", c.id, p);
            }
            for p in &c.forbidden_points {
                prop_assert!(!f.vanishes_at(p));
            }
        }

        #[test]
        fn incremental_counts_match_direct(d in arb_digits(8)) {
            let c = case(CaseId::Red2);
            let idx = c.index_of(&d);
            let out = run_search(&c, idx, idx + 1, &SearchOptions { target: 0, ..Default::default() }).unwrap();
            let f = c.materialize(&d).unwrap();
            let n = direct_zero_count(c.quadric.model(), &f);
            prop_assert_eq!(out.stats.histogram[n], 1);
        }
    }
}
