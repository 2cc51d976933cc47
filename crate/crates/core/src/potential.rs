//! Laurent-polynomial potentials in the radial variable `r`.
//!
//! A potential is a finite sum `Σ v_k r^k` over integer exponents. The text
//! form accepted by [`parse_potential`] is
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := number | number ['*'] rpow | rpow
//! rpow   := 'r' ['^' ['+'|'-'] digits]
//! ```
//!
//! with whitespace allowed between tokens. [`format_potential`] produces the
//! canonical form (descending exponents), and the two are exact inverses on
//! coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Sparse map from integer exponent of `r` to its real coefficient.
///
/// No stored coefficient is exactly zero; construction sums repeated
/// exponents and drops cancellations.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LaurentPotential {
    terms: BTreeMap<i32, f64>,
}

/// Which quasi-exactly-solvable family a potential belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyTag {
    /// `a r^2 + b r^-2 + c r^-4 + d r^-6` with `a > 0`, `d > 0`.
    EvenPower,
    /// `a r^-1 + b r^-2 + c r^-3 + d r^-4` with `d > 0`.
    InversePower,
    General,
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyTag::EvenPower => "even-power",
            FamilyTag::InversePower => "inverse-power",
            FamilyTag::General => "general",
        };
        f.write_str(s)
    }
}

impl LaurentPotential {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a potential from `(exponent, coefficient)` pairs, summing
    /// repeated exponents.
    pub fn from_terms<I: IntoIterator<Item = (i32, f64)>>(terms: I) -> Self {
        let mut map = BTreeMap::new();
        for (k, v) in terms {
            *map.entry(k).or_insert(0.0) += v;
        }
        map.retain(|_, v| *v != 0.0);
        Self { terms: map }
    }

    pub fn monomial(k: i32, v: f64) -> Self {
        Self::from_terms([(k, v)])
    }

    /// Coefficient of `r^k`, zero when absent.
    pub fn coeff(&self, k: i32) -> f64 {
        self.terms.get(&k).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, k: i32) -> bool {
        self.terms.contains_key(&k)
    }

    /// Terms in descending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.terms.iter().rev().map(|(&k, &v)| (k, v))
    }

    pub fn exponents(&self) -> impl Iterator<Item = i32> + '_ {
        self.terms.keys().rev().copied()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The exponent-0 coefficient.
    pub fn constant(&self) -> f64 {
        self.coeff(0)
    }

    pub fn without_constant(&self) -> Self {
        let mut terms = self.terms.clone();
        terms.remove(&0);
        Self { terms }
    }

    /// Returns a copy with the coefficient of `r^k` replaced (removed if zero).
    pub fn with_coeff(&self, k: i32, v: f64) -> Self {
        let mut terms = self.terms.clone();
        if v == 0.0 {
            terms.remove(&k);
        } else {
            terms.insert(k, v);
        }
        Self { terms }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_terms(self.terms().map(|(k, v)| (k, v * s)))
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.terms().map(|(k, v)| v * r.powi(k)).sum()
    }

    /// `V'(r)` evaluated term by term.
    pub fn eval_derivative(&self, r: f64) -> f64 {
        self.terms()
            .filter(|&(k, _)| k != 0)
            .map(|(k, v)| v * k as f64 * r.powi(k - 1))
            .sum()
    }

    pub fn classify(&self) -> FamilyTag {
        classify_family(self)
    }
}

impl Add for &LaurentPotential {
    type Output = LaurentPotential;
    fn add(self, rhs: &LaurentPotential) -> LaurentPotential {
        LaurentPotential::from_terms(self.terms().chain(rhs.terms()))
    }
}

impl Add for LaurentPotential {
    type Output = LaurentPotential;
    fn add(self, rhs: LaurentPotential) -> LaurentPotential {
        &self + &rhs
    }
}

impl Neg for &LaurentPotential {
    type Output = LaurentPotential;
    fn neg(self) -> LaurentPotential {
        self.scale(-1.0)
    }
}

impl Sub for &LaurentPotential {
    type Output = LaurentPotential;
    fn sub(self, rhs: &LaurentPotential) -> LaurentPotential {
        self + &(-rhs)
    }
}

impl fmt::Display for LaurentPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_potential(self))
    }
}

impl FromStr for LaurentPotential {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_potential(s)
    }
}

#[derive(Serialize, Deserialize)]
struct TermsRepr {
    terms: Vec<(i32, f64)>,
}

impl Serialize for LaurentPotential {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        TermsRepr {
            terms: self.terms().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentPotential {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = TermsRepr::deserialize(deserializer)?;
        Ok(LaurentPotential::from_terms(repr.terms))
    }
}

/// Family classification; the constant term is an energy offset and is ignored.
pub fn classify_family(p: &LaurentPotential) -> FamilyTag {
    let exps: Vec<i32> = p.exponents().filter(|&k| k != 0).collect();
    let within = |allowed: &[i32]| exps.iter().all(|k| allowed.contains(k));
    if within(&[2, -2, -4, -6]) && p.coeff(2) > 0.0 && p.coeff(-6) > 0.0 {
        FamilyTag::EvenPower
    } else if within(&[-1, -2, -3, -4]) && p.coeff(-4) > 0.0 {
        FamilyTag::InversePower
    } else {
        FamilyTag::General
    }
}

/// Canonical text form: descending exponents, unit coefficients elided.
pub fn format_potential(p: &LaurentPotential) -> String {
    if p.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (k, v)) in p.terms().enumerate() {
        let body = format_term(k, v.abs());
        match (i, v < 0.0) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
        }
    }
    out
}

fn format_term(k: i32, magnitude: f64) -> String {
    let rpart = match k {
        1 => "r".to_string(),
        _ => format!("r^{k}"),
    };
    if k == 0 {
        format_number(magnitude)
    } else if magnitude == 1.0 {
        rpart
    } else {
        format!("{}*{}", format_number(magnitude), rpart)
    }
}

fn format_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        // Debug formatting is the shortest exact round-trip form and switches
        // to exponent notation for very large or small magnitudes.
        format!("{v:?}")
    }
}

/// Parses a Laurent polynomial in `r`.
pub fn parse_potential(text: &str) -> Result<LaurentPotential> {
    if text.trim().is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let terms = parser.expr()?;
    let mut out: BTreeMap<i32, f64> = BTreeMap::new();
    for (offset, k, v) in terms {
        let entry = out.entry(k).or_insert(0.0);
        *entry += v;
        if !entry.is_finite() {
            return Err(Error::Syntax {
                offset,
                expected: "finite coefficient".into(),
            });
        }
    }
    out.retain(|_, v| *v != 0.0);
    Ok(LaurentPotential { terms: out })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn fail<T>(&self, expected: &str) -> Result<T> {
        Err(Error::Syntax {
            offset: self.pos,
            expected: expected.to_string(),
        })
    }

    fn expr(&mut self) -> Result<Vec<(usize, i32, f64)>> {
        let mut terms = Vec::new();
        self.skip_ws();
        let mut sign = match self.peek() {
            Some(b'+') => {
                self.pos += 1;
                1.0
            }
            Some(b'-') => {
                self.pos += 1;
                -1.0
            }
            _ => 1.0,
        };
        loop {
            self.skip_ws();
            let start = self.pos;
            let (k, v) = self.term()?;
            terms.push((start, k, sign * v));
            self.skip_ws();
            sign = match self.peek() {
                None => return Ok(terms),
                Some(b'+') => 1.0,
                Some(b'-') => -1.0,
                Some(_) => return self.fail("'+', '-' or end of input"),
            };
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<(i32, f64)> {
        match self.peek() {
            Some(b'r') => Ok((self.rpow()?, 1.0)),
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                let v = self.number()?;
                if !v.is_finite() {
                    self.pos = start;
                    return self.fail("finite coefficient");
                }
                self.skip_ws();
                match self.peek() {
                    Some(b'*') => {
                        self.pos += 1;
                        self.skip_ws();
                        if self.peek() != Some(b'r') {
                            return self.fail("'r'");
                        }
                        Ok((self.rpow()?, v))
                    }
                    Some(b'r') => Ok((self.rpow()?, v)),
                    _ => Ok((0, v)),
                }
            }
            _ => self.fail("number or 'r'"),
        }
    }

    fn rpow(&mut self) -> Result<i32> {
        debug_assert_eq!(self.peek(), Some(b'r'));
        self.pos += 1;
        let save = self.pos;
        self.skip_ws();
        if self.peek() != Some(b'^') {
            self.pos = save;
            return Ok(1);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        if matches!(self.peek(), Some(b'+') | Some(b'-')) {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return self.fail("integer exponent");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<i32>().or_else(|_| {
            self.pos = start;
            self.fail("exponent within i32 range")
        })
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let mut mantissa_digits = 0;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
            mantissa_digits += 1;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
                mantissa_digits += 1;
            }
        }
        if mantissa_digits == 0 {
            return self.fail("digits");
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            self.pos += 1;
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
            if self.pos == exp_start {
                return self.fail("exponent digits");
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>().or_else(|_| {
            self.pos = start;
            self.fail("number")
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lp(terms: &[(i32, f64)]) -> LaurentPotential {
        LaurentPotential::from_terms(terms.iter().copied())
    }

    #[test]
    fn parses_basic_forms() {
        assert_eq!(parse_potential("r^2 + 2*r^-2").unwrap(), lp(&[(2, 1.0), (-2, 2.0)]));
        assert_eq!(parse_potential("3").unwrap(), lp(&[(0, 3.0)]));
        assert!(parse_potential("r^-4 - r^-4").unwrap().is_empty());
        assert_eq!(parse_potential(" -3 r ^ -1 ").unwrap(), lp(&[(-1, -3.0)]));
        assert_eq!(parse_potential("2r + r").unwrap(), lp(&[(1, 3.0)]));
        assert_eq!(parse_potential("1.5e-3*r^+2").unwrap(), lp(&[(2, 1.5e-3)]));
        assert_eq!(parse_potential(".5r^-6").unwrap(), lp(&[(-6, 0.5)]));
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_potential(&lp(&[(2, 1.0), (-6, 0.5)])), "r^2 + 0.5*r^-6");
        assert_eq!(format_potential(&LaurentPotential::zero()), "0");
        assert_eq!(format_potential(&lp(&[(-1, -3.0)])), "-3*r^-1");
        assert_eq!(format_potential(&lp(&[(0, -2.0), (1, 1.0)])), "r - 2");
        assert_eq!(format_potential(&lp(&[(-2, 1e-7)])), "1e-7*r^-2");
    }

    #[test]
    fn classifies_families() {
        assert_eq!(classify_family(&lp(&[(2, 1.), (-2, 2.), (-4, 2.), (-6, 1.)])), FamilyTag::EvenPower);
        assert_eq!(
            classify_family(&lp(&[(-1, -3.), (-2, -1.), (-3, 1.), (-4, 1.)])),
            FamilyTag::InversePower
        );
        assert_eq!(classify_family(&lp(&[(3, 1.)])), FamilyTag::General);
        assert_eq!(classify_family(&lp(&[(2, -1.), (-6, 1.)])), FamilyTag::General);
        assert_eq!(classify_family(&lp(&[(-1, 1.), (-4, -1.)])), FamilyTag::General);
        assert_eq!(classify_family(&lp(&[(2, 1.), (-6, 1.), (0, 7.)])), FamilyTag::EvenPower);
    }

    #[test]
    fn reports_error_offsets() {
        let cases = [
            ("r^", 2),
            ("2*", 2),
            ("r^2 3", 4),
            ("r^2 + + r", 6),
            ("x", 0),
            ("1e", 2),
            ("r^1.5", 3),
            ("1e999", 0),
        ];
        for (text, offset) in cases {
            match parse_potential(text) {
                Err(Error::Syntax { offset: o, .. }) => assert_eq!(o, offset, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert_eq!(parse_potential("   "), Err(Error::EmptyInput));
    }

    #[test]
    fn json_is_sorted_descending() {
        let p = lp(&[(-6, 1.0), (2, 1.0), (-2, 2.0)]);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"terms":[[2,1.0],[-2,2.0],[-6,1.0]]}"#);
        let back: LaurentPotential = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn derivative_matches_terms() {
        let p = lp(&[(2, 1.0), (-6, 2.0), (0, 4.0)]);
        let r = 1.3_f64;
        let expected = 2.0 * r - 12.0 * r.powi(-7);
        assert!((p.eval_derivative(r) - expected).abs() < 1e-14);
    }

    fn arb_potential() -> impl Strategy<Value = LaurentPotential> {
        let coeff = prop_oneof![
            any::<f64>().prop_filter("finite nonzero", |v| v.is_finite() && *v != 0.0),
            (-1000i32..1000).prop_map(|v| v as f64),
            (-8.0f64..8.0),
        ];
        prop::collection::vec((-12i32..12, coeff), 0..8).prop_map(LaurentPotential::from_terms)
    }

    fn grammar_string() -> impl Strategy<Value = String> {
        let number = prop_oneof![
            "[0-9]{1,4}",
            "[0-9]{1,3}\\.[0-9]{0,3}",
            "\\.[0-9]{1,3}",
            "[0-9]{1,2}[eE][+-]?[0-9]{1,2}",
        ];
        let ws = "[ \t]{0,2}";
        let rpow = (ws, prop::option::of(("[+-]?", 0u32..40))).prop_map(|(w, e)| match e {
            None => "r".to_string(),
            Some((s, n)) => format!("r{w}^{w}{s}{n}"),
        });
        let term = prop_oneof![
            number.clone(),
            (number.clone(), prop::bool::ANY, rpow.clone())
                .prop_map(|(n, star, r)| if star { format!("{n} * {r}") } else { format!("{n}{r}") }),
            rpow,
        ];
        (
            "[+-]?",
            term.clone(),
            prop::collection::vec(("[+-]", ws, term), 0..6),
        )
            .prop_map(|(s, first, rest)| {
                let mut out = format!("{s}{first}");
                for (op, w, t) in rest {
                    out.push_str(&format!("{w}{op}{w}{t}"));
                }
                out
            })
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(p in arb_potential()) {
            let text = format_potential(&p);
            let back = parse_potential(&text).unwrap();
            prop_assert_eq!(back.len(), p.len());
            for ((k1, v1), (k2, v2)) in back.terms().zip(p.terms()) {
                prop_assert_eq!(k1, k2);
                prop_assert_eq!(v1.to_bits(), v2.to_bits());
            }
        }

        #[test]
        fn grammar_strings_parse(s in grammar_string()) {
            let parsed = parse_potential(&s);
            prop_assert!(parsed.is_ok(), "{} -> {:?}", s, parsed);
        }

        #[test]
        fn classification_ignores_constant(p in arb_potential(), c in -5.0f64..5.0) {
            let with = &p + &LaurentPotential::monomial(0, c);
            prop_assert_eq!(classify_family(&with), classify_family(&p.without_constant()));
        }
    }
}
