//! Polynomials in `T` with coefficients in ℤ[m], Sylvester resultants, and
//! searches for factorizations with unit resultant.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::poly::IntPoly;

/// Polynomial in `T` over ℤ[m], ascending in `T`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MPoly(Vec<IntPoly>);

impl MPoly {
    pub fn new(mut coeffs: Vec<IntPoly>) -> Self {
        while coeffs.last().is_some_and(IntPoly::is_zero) {
            coeffs.pop();
        }
        MPoly(coeffs)
    }

    pub fn one() -> Self {
        MPoly(vec![IntPoly::one()])
    }

    pub fn coeffs(&self) -> &[IntPoly] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn deg(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    /// `p(T + m + 1)`: the factor of `∏(T + x_i)` coming from a factor `p(t)` of
    /// `P(t) = ∏(t - (m + 1 - x_i))`.
    pub fn from_p_factor(p: &IntPoly) -> Self {
        // T + (m + 1), with m + 1 as an element of ℤ[m].
        let shift = MPoly(vec![IntPoly::from_asc(&[1, 1]), IntPoly::one()]);
        p.coeffs()
            .iter()
            .rev()
            .fold(MPoly::default(), |acc, c| acc.mul(&shift).add(&MPoly(vec![IntPoly::constant(c.clone())])))
    }

    /// Build from `T`-coefficients given highest degree first, each a polynomial in `m`
    /// written highest degree first.
    pub fn from_desc(desc: &[&[i64]]) -> Self {
        MPoly::new(desc.iter().rev().map(|c| IntPoly::from_desc(c)).collect())
    }

    pub fn add(&self, o: &MPoly) -> MPoly {
        let n = self.0.len().max(o.0.len());
        let z = IntPoly::default();
        MPoly::new((0..n).map(|i| self.0.get(i).unwrap_or(&z) + o.0.get(i).unwrap_or(&z)).collect())
    }

    pub fn mul(&self, o: &MPoly) -> MPoly {
        if self.is_zero() || o.is_zero() {
            return MPoly::default();
        }
        let mut out = vec![IntPoly::default(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        MPoly::new(out)
    }

    pub fn pow(&self, e: u32) -> MPoly {
        (0..e).fold(MPoly::one(), |acc, _| acc.mul(self))
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let monomial_coeff = c.coeffs().iter().filter(|x| !x.is_zero()).count() == 1;
            let mut body = c.render("m");
            let mut neg = false;
            if monomial_coeff && body.starts_with('-') {
                neg = true;
                body.remove(0);
            }
            if !first {
                f.write_str(if neg { " - " } else { " + " })?;
            } else if neg {
                f.write_str("-")?;
            }
            first = false;
            let var = match i {
                0 => String::new(),
                1 => "T".into(),
                _ => format!("T^{i}"),
            };
            if i == 0 {
                f.write_str(&body)?;
            } else if body == "1" {
                f.write_str(&var)?;
            } else if monomial_coeff {
                write!(f, "{body}{var}")?;
            } else {
                write!(f, "({body}){var}")?;
            }
        }
        Ok(())
    }
}

/// Determinant over ℤ[m] by fraction-free elimination.
fn bareiss(mut a: Vec<Vec<IntPoly>>) -> IntPoly {
    let n = a.len();
    if n == 0 {
        return IntPoly::one();
    }
    let mut negate = false;
    let mut prev = IntPoly::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    negate = !negate;
                }
                None => return IntPoly::default(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate { -&d } else { d }
}

/// Sylvester resultant `res(f, g)` as an element of ℤ[m].
pub fn resultant(f: &MPoly, g: &MPoly) -> IntPoly {
    assert!(!f.is_zero() && !g.is_zero(), "resultant of the zero polynomial");
    let (a, b) = (f.deg(), g.deg());
    if a == 0 {
        return f.0[0].pow(b as u32);
    }
    if b == 0 {
        return g.0[0].pow(a as u32);
    }
    let n = a + b;
    let mut rows = Vec::with_capacity(n);
    for (p, shifts, deg) in [(f, b, a), (g, a, b)] {
        for s in 0..shifts {
            let mut row = vec![IntPoly::default(); n];
            for (k, c) in p.0.iter().enumerate() {
                row[s + deg - k] = c.clone();
            }
            rows.push(row);
        }
    }
    bareiss(rows)
}

/// True when the polynomial in `m` is the constant ±1.
pub fn is_unit(r: &IntPoly) -> bool {
    r.deg() == 0 && r.coeff(0).abs().is_one()
}

/// A factorization `F = f·h` with `res(f, h) = ±1` over ℤ[m].
#[derive(Clone, Debug, Serialize)]
pub struct UnitSplit {
    pub f: String,
    pub h: String,
    /// Indices into the factor list on the `f` side.
    pub f_factors: Vec<usize>,
    pub resultant: String,
    #[serde(skip)]
    pub resultant_poly: IntPoly,
}

/// Search the splits of `∏ φ_i^{e_i}` that keep each distinct factor on one side.
pub fn find_unit_split(factors: &[(MPoly, u32)]) -> Option<UnitSplit> {
    let r = factors.len();
    if r < 2 {
        return None;
    }
    let mut masks: Vec<u32> = (1..(1u32 << r) - 1).collect();
    // Prefer a small cofactor h, taken from the end of the list.
    masks.sort_by_key(|&m| ((!m & ((1 << r) - 1)).count_ones(), m.reverse_bits()));
    masks.into_iter().find_map(|mask| {
        let (mut f, mut h) = (MPoly::one(), MPoly::one());
        let mut f_factors = Vec::new();
        for (i, (phi, e)) in factors.iter().enumerate() {
            if mask >> i & 1 == 1 {
                f = f.mul(&phi.pow(*e));
                f_factors.push(i);
            } else {
                h = h.mul(&phi.pow(*e));
            }
        }
        let res = resultant(&f, &h);
        is_unit(&res).then(|| UnitSplit {
            f: f.to_string(),
            h: h.to_string(),
            f_factors,
            resultant: res.render("m"),
            resultant_poly: res,
        })
    })
}

/// Constant value of a resultant that does not depend on `m`.
pub fn constant_value(r: &IntPoly) -> Option<BigInt> {
    (r.deg() == 0).then(|| r.coeff(0))
}
