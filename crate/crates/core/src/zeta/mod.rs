//! Zeta types of curves over finite fields, defect tables, and the elimination
//! pipeline for defect-k zeta functions. All decisions use exact arithmetic.

pub mod poly;
pub mod resultant;
pub mod tables;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

pub use poly::{certify_positive_real_roots, IntPoly, RootCertificate};
pub use resultant::{find_unit_split, resultant, MPoly, UnitSplit};
pub use tables::{defect_entries, enumerate_defect_factors, tables_csv, threshold, DefectEntry, Threshold};

use poly::{Point, Sturm, Surd};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZetaError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("q = {0} is an even power of its prime")]
    EvenExponent(u64),
    #[error("trace {t} exceeds the Weil bound for q = {q}")]
    TraceOutOfRange { q: u64, t: i64 },
    #[error("bound inapplicable: denominator {0} is not positive")]
    BoundInapplicable(BigInt),
}

/// `⌊2√q⌋`.
pub fn weil_m(q: u64) -> i64 {
    BigInt::from(4 * q).sqrt().to_i64().expect("small")
}

/// A multiset of values `x_i = -(α_i + ᾱ_i)`, stored as monic integer
/// polynomials in `x` with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZetaType {
    factors: Vec<(IntPoly, u32)>,
}

impl ZetaType {
    pub fn new(factors: Vec<(IntPoly, u32)>) -> Self {
        assert!(factors.iter().all(|(p, _)| p.is_monic() && p.deg() >= 1), "factors must be monic, nonconstant");
        ZetaType { factors }
    }

    /// Integer components `(x_1, ..., x_g)`.
    pub fn integer(xs: &[i64]) -> Self {
        let mut factors: Vec<(IntPoly, u32)> = Vec::new();
        for &x in xs {
            let p = IntPoly::linear(x);
            match factors.iter_mut().find(|(q, _)| *q == p) {
                Some(slot) => slot.1 += 1,
                None => factors.push((p, 1)),
            }
        }
        ZetaType { factors }
    }

    /// The conjugate pair of roots of `x² - s·x + p`, repeated.
    pub fn quadratic_pair(s: i64, p: i64, multiplicity: u32) -> Self {
        ZetaType { factors: vec![(IntPoly::from_desc(&[1, -s, p]), multiplicity)] }
    }

    /// Type whose polynomial `P(t) = ∏ (t - (m + 1 - x_i))` has the given factors.
    pub fn from_p_factors(m: i64, factors: &[(IntPoly, u32)]) -> Self {
        let c = BigInt::from(m + 1);
        let factors = factors
            .iter()
            .map(|(p, e)| {
                let q = p.compose_linear(&c, &BigInt::from(-1));
                (if q.is_monic() { q } else { -&q }, *e)
            })
            .collect();
        ZetaType { factors }
    }

    pub fn factors(&self) -> &[(IntPoly, u32)] {
        &self.factors
    }

    pub fn genus(&self) -> usize {
        self.factors.iter().map(|(p, e)| p.deg() * *e as usize).sum()
    }

    /// `Σ x_i^j` with multiplicity.
    pub fn power_sum(&self, j: usize) -> BigInt {
        self.factors
            .iter()
            .map(|(p, e)| &p.power_sums(j)[j] * BigInt::from(*e))
            .sum()
    }

    /// `N_{q^r} = q^r + 1 - Σ (α_i^r + ᾱ_i^r)`.
    pub fn points(&self, q: u64, r: u32) -> BigInt {
        // α^r + ᾱ^r as a polynomial in x: P_0 = 2, P_1 = -x, P_r = -x P_{r-1} - q P_{r-2}.
        let qb = IntPoly::constant(q);
        let neg_x = IntPoly::from_asc(&[0, -1]);
        let mut prev = IntPoly::constant(2);
        let mut cur = neg_x.clone();
        for _ in 1..r {
            let next = &(&neg_x * &cur) - &(&qb * &prev);
            prev = cur;
            cur = next;
        }
        let pr = if r == 0 { prev } else { cur };
        let trace_sum: BigInt = pr
            .coeffs()
            .iter()
            .enumerate()
            .map(|(j, c)| c * self.power_sum(j))
            .sum();
        BigInt::from(q).pow(r) + 1 - trace_sum
    }

    /// Every `x_i` is real with `|x_i| ≤ 2√q`.
    pub fn weil_admissible(&self, q: u64) -> bool {
        let lo = Point::Surd(Surd::from_ints(0, -2, q as i64));
        let hi = Point::Surd(Surd::from_ints(0, 2, q as i64));
        self.factors.iter().all(|(p, _)| {
            let s = Sturm::new(p);
            s.real_roots() == s.distinct_degree() && s.below(&lo) == 0 && s.above(&hi) == 0
        })
    }

    /// Rational integer components with multiplicity.
    pub fn integer_components(&self) -> Vec<(i64, u32)> {
        self.factors
            .iter()
            .filter(|(p, _)| p.deg() == 1)
            .map(|(p, e)| ((-p.coeff(0)).to_i64().expect("small"), *e))
            .collect()
    }
}

impl fmt::Display for ZetaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (p, e) in &self.factors {
            let s = match p.deg() {
                1 => (-p.coeff(0)).to_string(),
                2 => {
                    let (b, c) = (-p.coeff(1), p.coeff(0));
                    format!("({b}±√{})/2", &b * &b - BigInt::from(4) * c)
                }
                _ => format!("roots of {}", p.render("x")),
            };
            parts.extend(std::iter::repeat_n(s, *e as usize));
        }
        write!(f, "({})", parts.join(", "))
    }
}

/// Numbers of places of degree 1 to `d`.
#[derive(Clone, Debug, Serialize)]
pub struct PlaceCounts {
    /// `a_1, ..., a_d` as exact rationals.
    pub values: Vec<String>,
    pub negative: bool,
    pub non_integral: bool,
    #[serde(skip)]
    pub exact: Vec<BigRational>,
}

impl PlaceCounts {
    pub fn valid(&self) -> bool {
        !self.negative && !self.non_integral
    }
}

/// `a_1 = N_q`, `a_2 = (N_{q²} - N_q)/2`, `a_3 = (N_{q³} - N_q)/3`.
pub fn place_counts(t: &ZetaType, q: u64, d: u32) -> PlaceCounts {
    assert!((1..=3).contains(&d), "place counts are defined here for d ≤ 3");
    let n1 = t.points(q, 1);
    let exact: Vec<BigRational> = (1..=d)
        .map(|r| {
            if r == 1 {
                BigRational::from_integer(n1.clone())
            } else {
                BigRational::new(t.points(q, r) - &n1, BigInt::from(r))
            }
        })
        .collect();
    PlaceCounts {
        values: exact.iter().map(ToString::to_string).collect(),
        negative: exact.iter().any(Signed::is_negative),
        non_integral: exact.iter().any(|a| !a.is_integer()),
        exact,
    }
}

/// `(p, e)` with `q = p^e`.
pub fn prime_power(q: u64) -> Result<(u64, u32), ZetaError> {
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).ok_or(ZetaError::NotPrimePower(q))?;
    let mut n = q;
    let mut e = 0;
    while n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    if n == 1 { Ok((p, e)) } else { Err(ZetaError::NotPrimePower(q)) }
}

/// Whether an elliptic curve over `F_q`, `q` an odd power of `p`, can have trace `t`.
pub fn elliptic_trace_admissible(q: u64, t: i64) -> Result<bool, ZetaError> {
    let (p, e) = prime_power(q)?;
    if e % 2 == 0 {
        return Err(ZetaError::EvenExponent(q));
    }
    if (t as i128).pow(2) > 4 * q as i128 {
        return Err(ZetaError::TraceOutOfRange { q, t });
    }
    let a = t.unsigned_abs();
    Ok(!a.is_multiple_of(p) || a == 0 || ((p == 2 || p == 3) && a == p.pow(e.div_ceil(2))))
}

/// The two printed genus bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundFormula {
    /// `(q² - q + 8m² - 10m - 16) / (5m² - 7m - 2q)`, for `t² - 5t + 2`.
    EntryEleven,
    /// `(q² - q + 2km + k - k²) / (m² + m - 2q)`, for `(m, ..., m, m - k)`.
    LinearDefect { k: i64 },
}

/// Genus above which the entry is impossible.
pub fn genus_bound(f: BoundFormula, q: u64) -> Result<BigRational, ZetaError> {
    let q = BigInt::from(q);
    let m = BigInt::from(weil_m(q.to_u64().expect("small")));
    let (num, den) = match f {
        BoundFormula::EntryEleven => (
            &q * &q - &q + BigInt::from(8) * &m * &m - BigInt::from(10) * &m - 16,
            BigInt::from(5) * &m * &m - BigInt::from(7) * &m - BigInt::from(2) * &q,
        ),
        BoundFormula::LinearDefect { k } => {
            let k = BigInt::from(k);
            (
                &q * &q - &q + BigInt::from(2) * &k * &m + &k - &k * &k,
                &m * &m + &m - BigInt::from(2) * &q,
            )
        }
    };
    if !den.is_positive() {
        return Err(ZetaError::BoundInapplicable(den));
    }
    Ok(BigRational::new(num, den))
}

/// The bound that applies to an entry, if any.
pub fn printed_bound(e: &DefectEntry) -> Option<(BoundFormula, Stage)> {
    if e.is_linear_defect() {
        Some((BoundFormula::LinearDefect { k: e.defect as i64 }, Stage::LinearBound))
    } else if e.defect == 3 && e.factors == [(IntPoly::from_desc(&[1, -5, 2]), 1)] {
        Some((BoundFormula::EntryEleven, Stage::EntryElevenBound))
    } else {
        None
    }
}

/// Factor list of `∏ (T + x_i)` over ℤ[m] for an entry at genus `g`.
pub fn t_factors(e: &DefectEntry, g: usize) -> Option<Vec<(MPoly, u32)>> {
    e.full_factors(g)
        .map(|fs| fs.iter().map(|(p, k)| (MPoly::from_p_factor(p), *k)).collect())
}

/// Unit-resultant factorization showing the entry cannot occur at genus `g`.
pub fn decomposability_certificate(e: &DefectEntry, g: usize) -> Option<UnitSplit> {
    t_factors(e, g).and_then(|f| find_unit_split(&f))
}

/// Entries (of the defect-3 table) ruled out at genus `g` by a unit-resultant factorization.
pub fn decomposability_eliminations(g: usize) -> BTreeSet<u32> {
    defect_entries(3)
        .iter()
        .filter(|e| decomposability_certificate(e, g).is_some())
        .map(|e| e.number)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Stage {
    #[serde(rename = "2.1")]
    Weil,
    #[serde(rename = "g_min")]
    GMin,
    #[serde(rename = "A.1")]
    Decomposable,
    #[serde(rename = "2.2")]
    Places,
    #[serde(rename = "A.2")]
    EntryElevenBound,
    #[serde(rename = "A.3")]
    LinearBound,
    #[serde(rename = "HT")]
    HondaTate,
    #[serde(rename = "survives")]
    Survives,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Weil => "2.1",
            Stage::GMin => "g_min",
            Stage::Decomposable => "A.1",
            Stage::Places => "2.2",
            Stage::EntryElevenBound => "A.2",
            Stage::LinearBound => "A.3",
            Stage::HondaTate => "HT",
            Stage::Survives => "survives",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryAudit {
    pub entry_no: u32,
    pub class: u8,
    pub stage_eliminated: Stage,
    pub certificate: serde_json::Value,
    /// Independent place counts, logged wherever they were computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<PlaceCounts>,
    /// Set when a printed genus bound eliminates a type whose place counts are
    /// all nonnegative integers.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub oracle_disagrees: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Survivor {
    pub entry_no: u32,
    pub zeta_type: String,
    pub n_q: String,
    pub n_q2: String,
    #[serde(skip)]
    pub ty: ZetaType,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub q: u64,
    pub g: usize,
    pub k: u32,
    pub m: i64,
    /// `{2√q}` to five decimals, for display only.
    pub frac_two_sqrt_q: String,
    pub entries: Vec<EntryAudit>,
    pub survivors: Vec<Survivor>,
}

impl PipelineReport {
    pub fn stage_of(&self, entry: u32) -> Option<Stage> {
        self.entries.iter().find(|a| a.entry_no == entry).map(|a| a.stage_eliminated)
    }

    /// Entries still standing after the given stage.
    pub fn alive_after(&self, stage: Stage) -> BTreeSet<u32> {
        self.entries.iter().filter(|a| a.stage_eliminated > stage).map(|a| a.entry_no).collect()
    }
}

/// Run every elimination stage over the defect-k table at `(q, g)`.
pub fn defect_pipeline(q: u64, g: usize, k: u32) -> PipelineReport {
    let m = weil_m(q);
    let ht_exponent_odd = prime_power(q).map(|(_, e)| e % 2 == 1).unwrap_or(false);
    // Roots of P(t) must lie in [m + 1 - 2√q, m + 1 + 2√q].
    let lower = Point::Surd(Surd::from_ints(m + 1, -2, q as i64));
    let upper = Point::Surd(Surd::from_ints(m + 1, 2, q as i64));
    let frac = Surd::from_ints(-m, 2, q as i64).enclose(&BigRational::new(1.into(), 10_000_000.into()));
    let frac_two_sqrt_q = format!("{:.5}", frac.0.to_f64().unwrap_or(f64::NAN));
    let mut entries = Vec::new();
    let mut survivors = Vec::new();
    for e in defect_entries(k) {
        let mut audit = EntryAudit {
            entry_no: e.number,
            class: e.class,
            stage_eliminated: Stage::Survives,
            certificate: serde_json::Value::Null,
            oracle: None,
            oracle_disagrees: false,
        };
        let out_of_range = e.factors.iter().any(|(p, _)| {
            let s = Sturm::new(p);
            s.below(&lower) > 0 || s.above(&upper) > 0
        });
        if out_of_range {
            audit.stage_eliminated = Stage::Weil;
            audit.certificate = json!({
                "threshold": e.threshold.display,
                "threshold_enclosure": [e.threshold.lo, e.threshold.hi],
                "frac_two_sqrt_q": frac_two_sqrt_q,
            });
            entries.push(audit);
            continue;
        }
        let Some(full) = e.full_factors(g) else {
            audit.stage_eliminated = Stage::GMin;
            audit.certificate = json!({ "g_min": e.g_min });
            entries.push(audit);
            continue;
        };
        if let Some(split) = decomposability_certificate(&e, g) {
            audit.stage_eliminated = Stage::Decomposable;
            audit.certificate = serde_json::to_value(&split).expect("serializable");
            entries.push(audit);
            continue;
        }
        let ty = ZetaType::from_p_factors(m, &full);
        let places = place_counts(&ty, q, 3);
        audit.oracle = Some(places.clone());
        if !places.valid() {
            audit.stage_eliminated = Stage::Places;
            audit.certificate = json!({ "place_counts": places.values });
            entries.push(audit);
            continue;
        }
        if let Some((formula, stage)) = printed_bound(&e) {
            match genus_bound(formula, q) {
                Ok(bound) if BigRational::from_integer(g.into()) > bound => {
                    audit.stage_eliminated = stage;
                    audit.certificate = json!({ "bound": bound.to_string(), "g": g });
                    audit.oracle_disagrees = places.valid();
                    entries.push(audit);
                    continue;
                }
                Ok(_) | Err(_) => {}
            }
        }
        if ht_exponent_odd {
            let bad: Vec<i64> = ty
                .integer_components()
                .iter()
                .map(|&(x, _)| x)
                .filter(|&x| {
                    // trace = -x; both signs are checked.
                    [x, -x].iter().any(|&t| !elliptic_trace_admissible(q, t).unwrap_or(false))
                })
                .collect();
            if !bad.is_empty() {
                audit.stage_eliminated = Stage::HondaTate;
                audit.certificate = json!({ "inadmissible_components": bad });
                entries.push(audit);
                continue;
            }
        }
        survivors.push(Survivor {
            entry_no: e.number,
            zeta_type: ty.to_string(),
            n_q: ty.points(q, 1).to_string(),
            n_q2: ty.points(q, 2).to_string(),
            ty,
        });
        entries.push(audit);
    }
    PipelineReport { q, g, k, m, frac_two_sqrt_q, entries, survivors }
}

/// Human-readable audit, ending with the survivor line.
pub fn render_audit(r: &PipelineReport) -> String {
    let mut s = format!("q = {}, g = {}, k = {}, m = {}, {{2√q}} ≈ {}\n", r.q, r.g, r.k, r.m, r.frac_two_sqrt_q);
    for a in &r.entries {
        s.push_str(&format!("#{:<3} class {}  {}", a.entry_no, a.class, a.stage_eliminated.as_str()));
        if a.oracle_disagrees {
            let v = a.oracle.as_ref().map(|o| o.values.join(", ")).unwrap_or_default();
            s.push_str(&format!("  (place counts a1..a3 = {v}; all nonnegative integers)"));
        }
        s.push('\n');
    }
    if r.survivors.is_empty() {
        s.push_str("survivors: none\n");
    } else {
        let list: Vec<String> =
            r.survivors.iter().map(|v| format!("#{} {} N2={}", v.entry_no, v.zeta_type, v.n_q2)).collect();
        s.push_str(&format!("survivors: {}\n", list.join("; ")));
    }
    s
}
