//! Serde adapters that encode rationals as `"p/q"` strings.
//!
//! Use with `#[serde(with = "taydom_core::serde_q::one")]` and friends.

use num_rational::BigRational;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::poly::UniPoly;
use crate::scalar::{format_rational, parse_rational};

/// Newtype carrying the string encoding, handy inside other containers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Q(pub BigRational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            S(String),
            I(i64),
        }
        match Raw::deserialize(d)? {
            Raw::S(s) => parse_rational(&s).map(Q).map_err(D::Error::custom),
            Raw::I(i) => Ok(Q(BigRational::from_integer(i.into()))),
        }
    }
}

pub mod one {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        Q::deserialize(d).map(|q| q.0)
    }
}

pub mod opt {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(|q| Q(q.clone())).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        Ok(Option::<Q>::deserialize(d)?.map(|q| q.0))
    }
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|q| Q(q.clone())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Ok(Vec::<Q>::deserialize(d)?.into_iter().map(|q| q.0).collect())
    }
}

pub mod opt_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<BigRational>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(|v| v.iter().map(|q| Q(q.clone())).collect::<Vec<_>>()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<BigRational>>, D::Error> {
        Ok(Option::<Vec<Q>>::deserialize(d)?.map(|v| v.into_iter().map(|q| q.0).collect()))
    }
}

/// Polynomial as its ascending coefficient list.
pub mod poly {
    use super::*;

    pub fn serialize<S: Serializer>(p: &UniPoly<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        super::vec::serialize(p.coeffs(), s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<UniPoly<BigRational>, D::Error> {
        super::vec::deserialize(d).map(UniPoly::new)
    }
}

/// Nested lists of rationals.
pub mod vec_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<BigRational>], s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<Vec<Q>> = v.iter().map(|r| r.iter().map(|c| Q(c.clone())).collect()).collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigRational>>, D::Error> {
        let raw = Vec::<Vec<Q>>::deserialize(d)?;
        Ok(raw.into_iter().map(|v| v.into_iter().map(|q| q.0).collect()).collect())
    }
}

pub mod poly_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[UniPoly<BigRational>], s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<Vec<Q>> = v
            .iter()
            .map(|p| p.coeffs().iter().map(|c| Q(c.clone())).collect())
            .collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<UniPoly<BigRational>>, D::Error> {
        let raw = Vec::<Vec<Q>>::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|v| UniPoly::new(v.into_iter().map(|q| q.0).collect()))
            .collect())
    }
}

/// Multivariate polynomial as `{"nvars": n, "terms": [[exponent, "p/q"], ..]}`.
pub mod multipoly {
    use super::*;
    use crate::multipoly::{Exponent, MultiPoly};

    #[derive(Serialize, Deserialize)]
    struct Raw {
        nvars: usize,
        terms: Vec<(Exponent, Q)>,
    }

    fn to_raw(p: &MultiPoly<BigRational>) -> Raw {
        Raw {
            nvars: p.nvars(),
            terms: p.terms().map(|(e, c)| (e.clone(), Q(c.clone()))).collect(),
        }
    }

    fn from_raw<E: serde::de::Error>(r: Raw) -> Result<MultiPoly<BigRational>, E> {
        if let Some((e, _)) = r.terms.iter().find(|(e, _)| e.len() != r.nvars) {
            return Err(E::custom(format!("exponent {e:?} does not have {} entries", r.nvars)));
        }
        Ok(MultiPoly::from_terms(r.nvars, r.terms.into_iter().map(|(e, q)| (e, q.0))))
    }

    pub fn serialize<S: Serializer>(p: &MultiPoly<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        to_raw(p).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<MultiPoly<BigRational>, D::Error> {
        from_raw(Raw::deserialize(d)?)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[MultiPoly<BigRational>], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(to_raw))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<MultiPoly<BigRational>>, D::Error> {
            Vec::<Raw>::deserialize(d)?.into_iter().map(from_raw).collect()
        }
    }

    pub mod vec_vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Vec<MultiPoly<BigRational>>], s: S) -> Result<S::Ok, S::Error> {
            let raw: Vec<Vec<Raw>> = v.iter().map(|r| r.iter().map(to_raw).collect()).collect();
            raw.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<MultiPoly<BigRational>>>, D::Error> {
            Vec::<Vec<Raw>>::deserialize(d)?
                .into_iter()
                .map(|r| r.into_iter().map(from_raw).collect())
                .collect()
        }
    }
}
