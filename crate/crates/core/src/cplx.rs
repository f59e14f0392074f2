//! Complex scalar alias and `{re, im}` serialization helpers.

use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type C64 = Complex<f64>;

pub const I: C64 = C64::new(0.0, 1.0);

/// JSON shape of a complex number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReIm {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ReIm {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ReIm> for C64 {
    fn from(z: ReIm) -> Self {
        C64::new(z.re, z.im)
    }
}

/// Hermitian inner product `<z, w> = sum z_i conj(w_i)`.
pub fn inner(z: &[C64], w: &[C64]) -> C64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm_sqr(z: &[C64]) -> f64 {
    z.iter().map(|a| a.norm_sqr()).sum()
}

pub fn dist(z: &[C64], w: &[C64]) -> f64 {
    z.iter().zip(w).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

pub mod one {
    use super::*;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        ReIm::from(*z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        ReIm::deserialize(d).map(C64::from)
    }
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        let out: Vec<ReIm> = v.iter().copied().map(ReIm::from).collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        Vec::<ReIm>::deserialize(d).map(|v| v.into_iter().map(C64::from).collect())
    }
}

pub mod nested {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<C64>], s: S) -> Result<S::Ok, S::Error> {
        let out: Vec<Vec<ReIm>> = v
            .iter()
            .map(|row| row.iter().copied().map(ReIm::from).collect())
            .collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<C64>>, D::Error> {
        Vec::<Vec<ReIm>>::deserialize(d)
            .map(|v| v.into_iter().map(|row| row.into_iter().map(C64::from).collect()).collect())
    }
}

pub mod opt {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Option<C64>, s: S) -> Result<S::Ok, S::Error> {
        z.map(ReIm::from).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<C64>, D::Error> {
        Option::<ReIm>::deserialize(d).map(|v| v.map(C64::from))
    }
}

pub mod opt_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<C64>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(|x| x.iter().map(|z| ReIm::from(*z)).collect::<Vec<_>>()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<C64>>, D::Error> {
        Ok(Option::<Vec<ReIm>>::deserialize(d)?.map(|v| v.into_iter().map(C64::from).collect()))
    }
}
