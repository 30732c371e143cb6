//! Serde adapters writing complex numbers as `{"re": .., "im": ..}`.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
struct ReIm {
    re: f64,
    im: f64,
}

pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    ReIm { re: z.re, im: z.im }.serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
    let ReIm { re, im } = ReIm::deserialize(d)?;
    Ok(Complex64::new(re, im))
}

pub mod vec {
    use super::ReIm;
    use num_complex::Complex64;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(zs: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(zs.len()))?;
        for z in zs {
            seq.serialize_element(&ReIm { re: z.re, im: z.im })?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let raw = Vec::<ReIm>::deserialize(d)?;
        Ok(raw.into_iter().map(|p| Complex64::new(p.re, p.im)).collect())
    }
}
