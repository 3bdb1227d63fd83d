//! JSON form of a polynomial:
//! `{"n": 2, "terms": [{"c": "-1/2", "e": [1,0,0,0,1,0]}, ...]}`.

use serde::{Deserialize, Serialize};

use super::poly::{Monomial, PhasePoly};
use super::rational::{format_rational, parse_rational};
use crate::error::{Error, Result};

pub const MAX_SPHERE_DIM: usize = 64;
pub const MAX_EXPONENT: u16 = 255;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermJson {
    pub c: String,
    pub e: Vec<u16>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PolyJson {
    pub n: usize,
    pub terms: Vec<TermJson>,
}

impl From<&PhasePoly> for PolyJson {
    fn from(p: &PhasePoly) -> Self {
        PolyJson {
            n: p.n(),
            terms: p
                .terms()
                .map(|(m, c)| TermJson { c: format_rational(c), e: m.exponents().to_vec() })
                .collect(),
        }
    }
}

impl TryFrom<&PolyJson> for PhasePoly {
    type Error = Error;

    /// Rejects malformed exponent vectors and repeated monomials; terms may
    /// arrive in any order and are canonicalized.
    fn try_from(j: &PolyJson) -> Result<PhasePoly> {
        if j.n < 1 || j.n > MAX_SPHERE_DIM {
            return Err(Error::Parse(format!("n = {} outside 1..={MAX_SPHERE_DIM}", j.n)));
        }
        let len = 2 * (j.n + 1);
        let mut seen = std::collections::HashSet::new();
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            if t.e.len() != len {
                return Err(Error::Parse(format!("exponent vector of length {}, expected {len}", t.e.len())));
            }
            if t.e.iter().any(|&e| e > MAX_EXPONENT) {
                return Err(Error::Parse(format!("exponent above {MAX_EXPONENT}")));
            }
            if !seen.insert(t.e.clone()) {
                return Err(Error::Parse(format!("repeated monomial {:?}", t.e)));
            }
            terms.push((Monomial::from_exponents(t.e.clone()), parse_rational(&t.c)?));
        }
        PhasePoly::from_terms(j.n, terms)
    }
}

impl Serialize for PhasePoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PhasePoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        PhasePoly::try_from(&j).map_err(serde::de::Error::custom)
    }
}

pub fn poly_to_json(p: &PhasePoly) -> String {
    serde_json::to_string(p).expect("polynomial serializes")
}

pub fn poly_from_json(s: &str) -> Result<PhasePoly> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::rational::frac;

    #[test]
    fn known_layout() {
        let n = 1;
        let p = (&PhasePoly::x(n, 0) * &PhasePoly::p(n, 1)).scale(&frac(-1, 2)) + PhasePoly::x(n, 1);
        let s = poly_to_json(&p);
        // graded-lex ascending: the degree-1 term comes first
        assert_eq!(s, r#"{"n":1,"terms":[{"c":"1","e":[0,1,0,0]},{"c":"-1/2","e":[1,0,0,1]}]}"#);
        assert_eq!(poly_from_json(&s).unwrap(), p);
    }

    #[test]
    fn rejects_bad_documents() {
        let bad = [
            r#"{"n":1,"terms":[{"c":"1","e":[0,1,0]}]}"#,
            r#"{"n":1,"terms":[{"c":"1.5","e":[0,1,0,0]}]}"#,
            r#"{"n":1,"terms":[{"c":"1","e":[0,1,0,0]},{"c":"2","e":[0,1,0,0]}]}"#,
            r#"{"n":0,"terms":[]}"#,
            r#"{"n":1,"terms":[{"c":"1","e":[0,1000,0,0]}]}"#,
            r#"{"n":1}"#,
        ];
        for b in bad {
            assert!(poly_from_json(b).is_err(), "{b} accepted");
        }
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let p = poly_from_json(r#"{"n":1,"terms":[{"c":"0","e":[0,1,0,0]}]}"#).unwrap();
        assert!(p.is_zero());
    }
}
