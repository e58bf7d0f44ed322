//! Serde helpers representing complex amplitudes as `[re, im]` pairs.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serializer};

use crate::C64;

pub(crate) mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|z| [z.re, z.im]))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(d)?;
        if pairs.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(D::Error::custom("non-finite complex amplitude"));
        }
        Ok(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}
