//! JSON numbers with a fixed 17-significant-digit layout.
//!
//! Every `f64` written through [`Sig17`] is printed as `{:.16e}`, which both
//! fixes the byte layout of reports and parses back to the identical bits.
//! Non-finite values are written as `null` and read back as NaN.

use std::fmt;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Sig17(pub f64);

impl From<f64> for Sig17 {
    fn from(x: f64) -> Self {
        Sig17(x)
    }
}

pub fn format_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format_sig17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Sig17 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Sig17(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN)))
    }
}

pub fn sig17_vec(v: &[f64]) -> Vec<Sig17> {
    v.iter().map(|&x| Sig17(x)).collect()
}

pub fn plain_vec(v: &[Sig17]) -> Vec<f64> {
    v.iter().map(|x| x.0).collect()
}

/// A dense vector written as an object keyed by decimal index, in index order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IndexedMap(pub Vec<Sig17>);

impl Serialize for IndexedMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (i, v) in self.0.iter().enumerate() {
            m.serialize_entry(&i.to_string(), v)?;
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for IndexedMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = IndexedMap;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object keyed by 0, 1, 2, ...")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<IndexedMap, A::Error> {
                let mut out: Vec<Option<Sig17>> = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, Sig17>()? {
                    let i: usize = k.parse().map_err(|_| de::Error::custom(format!("bad key {k:?}")))?;
                    if out.len() <= i {
                        out.resize(i + 1, None);
                    }
                    out[i] = Some(v);
                }
                out.into_iter()
                    .enumerate()
                    .map(|(i, v)| v.ok_or_else(|| de::Error::custom(format!("missing key {i}"))))
                    .collect::<Result<_, _>>()
                    .map(IndexedMap)
            }
        }
        d.deserialize_map(V)
    }
}
