//! Totally positive factor sets `F_k` and the defect-k zeta type tables.

use std::sync::LazyLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::poly::{
    certify_positive_real_roots, irreducible_positive, isolate_roots, monic_positive_box, refine, IntPoly, Isolation, Point,
    Sturm,
};

/// Irreducible monic integer polynomials of degree `1..=d_max`, trace `d + k`,
/// and only positive real roots.
pub fn enumerate_defect_factors(k: u32, d_max: usize) -> Vec<IntPoly> {
    let mut out = Vec::new();
    for d in 1..=d_max {
        for p in monic_positive_box(d, d as i64 + k as i64) {
            if certify_positive_real_roots(&p).holds && irreducible_positive(&p) {
                out.push(p);
            }
        }
    }
    sort_factors(&mut out);
    out
}

/// Row order of the printed tables.
const PRINTED_ORDER: &[&[i64]] = &[
    &[1, -7, 14, -8, 1],
    &[1, -7, 13, -7, 1],
    &[1, -6, 5, -1],
    &[1, -6, 7, -1],
    &[1, -6, 8, -1],
    &[1, -6, 8, -2],
    &[1, -6, 9, -1],
    &[1, -6, 9, -3],
    &[1, -5, 5],
    &[1, -5, 3],
    &[1, -5, 2],
    &[1, -5, 1],
    &[1, -4],
    &[1, -5, 6, -1],
    &[1, -4, 2],
    &[1, -4, 1],
    &[1, -3],
    &[1, -2],
    &[1, -3, 1],
    &[1, -1],
];

fn sort_factors(v: &mut [IntPoly]) {
    let rank = |p: &IntPoly| {
        let pos = PRINTED_ORDER.iter().position(|c| IntPoly::from_desc(c) == *p).unwrap_or(usize::MAX);
        (pos, std::cmp::Reverse(p.deg()), std::cmp::Reverse(p.desc()))
    };
    v.sort_by_key(rank);
}

/// `1 - (smallest root)` of a product of positive-rooted factors.
#[derive(Clone, Debug, Serialize)]
pub struct Threshold {
    /// Enclosure of `1 - x_min`.
    pub lo: String,
    pub hi: String,
    /// Truncated to three decimals, `None` when the value is not positive.
    pub display: Option<String>,
    #[serde(skip)]
    pub interval: (BigRational, BigRational),
}

impl Threshold {
    pub fn no_restriction(&self) -> bool {
        self.display.is_none()
    }

    pub fn approx(&self) -> f64 {
        let mid = (&self.interval.0 + &self.interval.1) / BigRational::from_integer(2.into());
        mid.to_f64().unwrap_or(f64::NAN)
    }
}

/// Certified `1 - min root` over the given factors.
pub fn threshold(factors: &[IntPoly]) -> Threshold {
    let smallest: Vec<(IntPoly, Isolation)> = factors
        .iter()
        .map(|p| (p.clone(), isolate_roots(p).into_iter().next().expect("real root")))
        .collect();
    let one = Point::Rational(BigRational::one());
    // A root below 1 makes the value positive, and then irrational: a rational
    // root of a monic integer polynomial is an integer.
    let positive = factors.iter().any(|p| Sturm::new(p).below(&one) > 0);
    let scale = BigRational::from_integer(1000.into());
    let mut width = BigRational::new(1.into(), 1_000_000.into());
    loop {
        let refined: Vec<Isolation> = smallest.iter().map(|(p, iso)| refine(p, iso, &width)).collect();
        // Each root lies in (lo, hi]; the minimum lies in (min lo, min hi].
        let lo = refined.iter().map(|i| i.lo.clone()).min().expect("factor");
        let hi = refined.iter().map(|i| i.hi.clone()).min().expect("factor");
        let (tlo, thi) = (BigRational::one() - &hi, BigRational::one() - &lo);
        let floor_lo = (&tlo * &scale).floor();
        let floor_hi = (&thi * &scale).floor();
        if !positive || floor_lo == floor_hi {
            let display = positive.then(|| format!("{:.3}", floor_lo.to_integer().to_f64().unwrap_or(0.0) / 1000.0));
            return Threshold { lo: tlo.to_string(), hi: thi.to_string(), display, interval: (tlo, thi) };
        }
        width /= BigRational::from_integer(1000.into());
    }
}

/// One row of the defect-k tables.
#[derive(Clone, Debug, Serialize)]
pub struct DefectEntry {
    pub number: u32,
    /// 1: a single defect-k factor; 2 or 3: a defect-2 factor with `t - 2` or
    /// `t² - 3t + 1`; 4: defect-1 factors only.
    pub class: u8,
    pub defect: u32,
    /// Mandatory factors of `P(t)` with multiplicities, excluding `t - 1`.
    pub factors: Vec<(IntPoly, u32)>,
    pub g_min: usize,
    pub threshold: Threshold,
}

impl DefectEntry {
    /// Factors of `P(t)` at genus `g`, padded with `(t - 1)^{g - g_min}`.
    pub fn full_factors(&self, g: usize) -> Option<Vec<(IntPoly, u32)>> {
        if g < self.g_min {
            return None;
        }
        let mut f = self.factors.clone();
        if g > self.g_min {
            f.push((IntPoly::linear(1), (g - self.g_min) as u32));
        }
        Some(f)
    }

    /// The single non-companion factor of classes 1 to 3.
    pub fn main_factor(&self) -> Option<&IntPoly> {
        (self.class != 4).then(|| &self.factors[0].0)
    }

    /// Entries of the shape `(m, ..., m, m - k)`.
    pub fn is_linear_defect(&self) -> bool {
        self.factors.len() == 1 && self.factors[0] == (IntPoly::linear(self.defect as i64 + 1), 1)
    }

    /// The `x_i` column, written in terms of `m`.
    pub fn x_description(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (p, e) in &self.factors {
            let Some(s) = describe_x(p) else {
                return String::new();
            };
            parts.extend(std::iter::repeat_n(s, *e as usize));
        }
        parts.push("m".into());
        format!("({}, ...)", parts.join(", "))
    }
}

/// `x = m + 1 - t` for the roots `t` of a linear or quadratic factor.
fn describe_x(p: &IntPoly) -> Option<String> {
    let c = p.desc();
    match c.len() {
        2 => {
            let off: BigInt = -&c[1] - 1;
            Some(if off.is_zero() { "m".into() } else { format!("m-{off}") })
        }
        3 => {
            // roots (b ± √D)/2 with b = -c1, D = b² - 4c2; x = m - ((b - 2) ± √D)/2
            let b: BigInt = -&c[1];
            let disc = &b * &b - BigInt::from(4) * &c[2];
            let (mut s, mut d) = (BigInt::one(), disc.clone());
            let mut f = BigInt::from(2);
            while &f * &f <= d {
                while (&d % (&f * &f)).is_zero() {
                    d /= &f * &f;
                    s *= &f;
                }
                f += 1;
            }
            let a: BigInt = b - 2;
            let rad = if s.is_one() { format!("√{d}") } else { format!("{s}√{d}") };
            let two = BigInt::from(2);
            if (&a % &two).is_zero() && (&s % &two).is_zero() {
                let (a, s) = (a / &two, s / &two);
                let rad = if s.is_one() { format!("√{d}") } else { format!("{s}√{d}") };
                Some(format!("m-({a}±{rad})"))
            } else {
                Some(format!("m-({a}±{rad})/2"))
            }
        }
        _ => None,
    }
}

fn partitions(k: u32, max: u32) -> Vec<Vec<u32>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=k.min(max)).rev() {
        for mut rest in partitions(k - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

static ENTRIES: LazyLock<[Vec<DefectEntry>; 4]> = LazyLock::new(|| std::array::from_fn(|k| build_entries(k as u32)));

/// All factor combinations of total defect `k ≤ 3`, numbered in table order.
pub fn defect_entries(k: u32) -> Vec<DefectEntry> {
    assert!(k <= 3, "defect tables are built for k ≤ 3");
    ENTRIES[k as usize].clone()
}

fn build_entries(k: u32) -> Vec<DefectEntry> {
    let sets: Vec<Vec<IntPoly>> = (0..=k).map(|j| enumerate_defect_factors(j, 4)).collect();
    let mut entries = Vec::new();
    for parts in partitions(k, k) {
        // Index tuples, non-decreasing within runs of equal parts, ordered with
        // the last position varying slowest.
        let mut tuples: Vec<Vec<usize>> = vec![vec![]];
        for (pos, &part) in parts.iter().enumerate() {
            let n = sets[part as usize].len();
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    let start = if pos > 0 && parts[pos - 1] == part { t[pos - 1] } else { 0 };
                    (start..n).map(move |i| {
                        let mut t = t.clone();
                        t.push(i);
                        t
                    })
                })
                .collect();
        }
        tuples.sort_by_key(|t| t.iter().rev().cloned().collect::<Vec<_>>());
        for t in tuples {
            let mut factors: Vec<(IntPoly, u32)> = Vec::new();
            for (&part, &i) in parts.iter().zip(&t) {
                let p = sets[part as usize][i].clone();
                match factors.iter_mut().find(|(q, _)| *q == p) {
                    Some(slot) => slot.1 += 1,
                    None => factors.push((p, 1)),
                }
            }
            let class = match parts.as_slice() {
                [_] => 1,
                [2, 1] => 2 + t[1] as u8,
                _ => 4,
            };
            let g_min = factors.iter().map(|(p, e)| p.deg() * *e as usize).sum();
            let plain: Vec<IntPoly> = factors.iter().map(|(p, _)| p.clone()).collect();
            let threshold = if plain.is_empty() { threshold(&[IntPoly::linear(1)]) } else { threshold(&plain) };
            entries.push(DefectEntry { number: entries.len() as u32 + 1, class, defect: k, factors, g_min, threshold });
        }
    }
    entries
}

/// The four defect tables as CSV text, one per class.
pub fn tables_csv(entries: &[DefectEntry]) -> Vec<(u8, String)> {
    let mut out = Vec::new();
    for class in 1..=4u8 {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: &[&str] = if class == 4 {
            &["#", "x", "g_min", "threshold"]
        } else {
            &["#", "deg", "coefficients", "x", "g_min", "threshold"]
        };
        w.write_record(header).expect("in-memory write");
        for e in entries.iter().filter(|e| e.class == class) {
            let thr = e.threshold.display.clone().unwrap_or_else(|| "0".into());
            let gmin = format!("g >= {}", e.g_min);
            let mut row = vec![e.number.to_string()];
            if let Some(p) = e.main_factor() {
                row.push(p.deg().to_string());
                row.push(p.desc().iter().map(ToString::to_string).collect::<Vec<_>>().join(" "));
            }
            row.extend([e.x_description(), gmin, thr]);
            w.write_record(&row).expect("in-memory write");
        }
        let bytes = w.into_inner().expect("flush");
        out.push((class, String::from_utf8(bytes).expect("utf-8")));
    }
    out
}
