//! Serde helpers writing complex numbers as `{"re": .., "im": ..}`.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for JsonComplex {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<JsonComplex> for C64 {
    fn from(z: JsonComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

pub mod complex {
    use super::*;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        JsonComplex::from(*z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        JsonComplex::deserialize(d).map(C64::from)
    }
}

pub mod complex_map {
    use super::*;

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, C64>, s: S) -> Result<S::Ok, S::Error> {
        let out: BTreeMap<&str, JsonComplex> =
            m.iter().map(|(k, v)| (k.as_str(), (*v).into())).collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, C64>, D::Error> {
        let m = BTreeMap::<String, JsonComplex>::deserialize(d)?;
        Ok(m.into_iter().map(|(k, v)| (k, v.into())).collect())
    }
}

pub mod complex_opt {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Option<C64>, s: S) -> Result<S::Ok, S::Error> {
        z.map(JsonComplex::from).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<C64>, D::Error> {
        Ok(Option::<JsonComplex>::deserialize(d)?.map(C64::from))
    }
}
