//! JSON conventions: complex numbers are `[re, im]`, matrices are row-major
//! arrays of rows.

use crate::algebra::PresentedAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::word::Word;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

pub mod complex {
    use super::*;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}

pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<C64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

pub fn complex_value(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn complex_from_value(v: &Value) -> Option<C64> {
    let a = v.as_array()?;
    match a.as_slice() {
        [re, im] => Some(C64::new(re.as_f64()?, im.as_f64()?)),
        _ => None,
    }
}

pub fn matrix_value(a: &CMat) -> Value {
    Value::Array(
        (0..a.nrows())
            .map(|i| Value::Array((0..a.ncols()).map(|j| complex_value(a[(i, j)])).collect()))
            .collect(),
    )
}

pub fn matrix_from_value(v: &Value) -> Option<CMat> {
    let rows = v.as_array()?;
    let n = rows.len();
    let m = rows.first().and_then(|r| r.as_array()).map_or(0, |r| r.len());
    let mut out = CMat::zeros(n, m);
    for (i, r) in rows.iter().enumerate() {
        let r = r.as_array()?;
        if r.len() != m {
            return None;
        }
        for (j, z) in r.iter().enumerate() {
            out[(i, j)] = complex_from_value(z)?;
        }
    }
    Some(out)
}

/// Sparse structure constants `basis_a · basis_b = Σ_d c[a,b,d] basis_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    pub basis: Vec<Word>,
    pub entries: Vec<(usize, usize, usize, C64)>,
}

impl StructureConstants {
    pub fn from_algebra(alg: &PresentedAlgebra) -> Self {
        Self { basis: alg.basis.clone(), entries: alg.structure_constants() }
    }

    pub fn to_value(&self) -> Value {
        json!({
            "basis": self.basis.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            "tensor": self.entries.iter().map(|&(a, b, d, z)| json!([a, b, d, z.re, z.im])).collect::<Vec<_>>(),
        })
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Invalid(format!("structure constants: {what}"));
        let basis = v["basis"]
            .as_array()
            .ok_or_else(|| bad("missing basis"))?
            .iter()
            .map(|w| w.as_str().ok_or_else(|| bad("basis entry is not a string"))?.parse::<Word>())
            .collect::<Result<Vec<_>>>()?;
        let n = basis.len();
        let mut entries = Vec::new();
        for row in v["tensor"].as_array().ok_or_else(|| bad("missing tensor"))? {
            let r = row.as_array().filter(|r| r.len() == 5).ok_or_else(|| bad("tensor rows need 5 entries"))?;
            let idx = |k: usize| r[k].as_u64().map(|x| x as usize).filter(|&x| x < n).ok_or_else(|| bad("index out of range"));
            let num = |k: usize| r[k].as_f64().ok_or_else(|| bad("coefficient is not a number"));
            entries.push((idx(0)?, idx(1)?, idx(2)?, C64::new(num(3)?, num(4)?)));
        }
        Ok(Self { basis, entries })
    }

    /// Left multiplication matrices `L_a[d, b] = c[a,b,d]`.
    pub fn left_matrices(&self) -> Vec<CMat> {
        let n = self.basis.len();
        let mut out = vec![CMat::zeros(n, n); n];
        for &(a, b, d, z) in &self.entries {
            out[a][(d, b)] += z;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_constants_roundtrip() {
        let sc = StructureConstants {
            basis: vec![Word::empty(), "x0".parse().unwrap(), "x0 E1".parse().unwrap()],
            entries: vec![(1, 1, 0, C64::new(1.0, 0.0)), (1, 2, 2, C64::new(-0.1, 1.0 / 3.0))],
        };
        let text = serde_json::to_string(&sc.to_value()).unwrap();
        let back = StructureConstants::from_value(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, sc);
        assert_eq!(back.left_matrices()[1][(2, 2)], C64::new(-0.1, 1.0 / 3.0));
        let bad = serde_json::json!({"basis": [""], "tensor": [[0, 3, 0, 1.0, 0.0]]});
        assert!(StructureConstants::from_value(&bad).is_err());
    }

    #[test]
    fn matrix_roundtrip() {
        let a = CMat::from_fn(2, 3, |i, j| C64::new(i as f64 + 0.25, j as f64 - 1.5));
        let v = matrix_value(&a);
        let text = serde_json::to_string(&v).unwrap();
        let back = matrix_from_value(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn complex_pair_form() {
        assert_eq!(complex_value(C64::new(1.0, -2.0)).to_string(), "[1.0,-2.0]");
        assert!(complex_from_value(&json!([1.0])).is_none());
    }
}
