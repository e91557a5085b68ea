//! Coxeter matrices, dihedral group combinatorics and the dihedral reflection
//! arrangement.
//!
//! Hyperplane `H_i` is the line through the origin at angle `iπ/m`, with `H_0`
//! the x-axis, labelled anticlockwise. `s_i` is the reflection across `H_i`
//! and `r_j` the rotation by `2jπ/m`.

use crate::error::{Error, Result};
use crate::linalg::C64;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DihedralElement {
    Rotation(usize),
    Reflection(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DihedralModel {
    m: usize,
}

impl DihedralModel {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Invalid(format!("dihedral order m = {m} must be >= 2")));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_odd(&self) -> bool {
        self.m % 2 == 1
    }

    fn check(&self, i: usize) -> Result<()> {
        if i >= self.m {
            Err(Error::IndexOutOfRange { index: i, size: self.m })
        } else {
            Ok(())
        }
    }

    /// Index of `s_t(H_j)`, i.e. `(2t − j) mod m`.
    pub fn reflection_action(&self, t: usize, j: usize) -> Result<usize> {
        self.check(t)?;
        self.check(j)?;
        Ok((2 * t + self.m - j) % self.m)
    }

    /// Conjugacy class of the reflection `s_t`: one class for odd `m`, index
    /// parity for even `m`.
    pub fn class_of(&self, t: usize) -> usize {
        if self.is_odd() {
            0
        } else {
            t % 2
        }
    }

    pub fn num_classes(&self) -> usize {
        if self.is_odd() {
            1
        } else {
            2
        }
    }

    /// All `2m` elements: rotations `r_0..r_{m-1}` then reflections.
    pub fn elements(&self) -> Vec<DihedralElement> {
        (0..self.m)
            .map(DihedralElement::Rotation)
            .chain((0..self.m).map(DihedralElement::Reflection))
            .collect()
    }

    /// `a ∘ b`.
    pub fn compose(&self, a: DihedralElement, b: DihedralElement) -> DihedralElement {
        use DihedralElement::*;
        let m = self.m;
        match (a, b) {
            (Rotation(x), Rotation(y)) => Rotation((x + y) % m),
            (Rotation(x), Reflection(y)) => Reflection((x + y) % m),
            (Reflection(x), Rotation(y)) => Reflection((x + m - y) % m),
            (Reflection(x), Reflection(y)) => Rotation((x + m - y) % m),
        }
    }

    pub fn inverse(&self, a: DihedralElement) -> DihedralElement {
        match a {
            DihedralElement::Rotation(x) => DihedralElement::Rotation((self.m - x) % self.m),
            r => r,
        }
    }

    /// Index of the image of `H_j`.
    pub fn act_on_line(&self, w: DihedralElement, j: usize) -> usize {
        let j = j % self.m;
        match w {
            DihedralElement::Rotation(x) => (j + 2 * x) % self.m,
            DihedralElement::Reflection(t) => (2 * t + self.m - j) % self.m,
        }
    }

    /// Element represented by a word in the simple reflections `s_0, s_1`.
    pub fn from_generators(&self, word: &[usize]) -> DihedralElement {
        word.iter().fold(DihedralElement::Rotation(0), |acc, &g| {
            self.compose(acc, DihedralElement::Reflection(g % 2))
        })
    }

    /// Real 2×2 matrix of an element acting on the plane.
    pub fn matrix(&self, w: DihedralElement) -> [[f64; 2]; 2] {
        match w {
            DihedralElement::Rotation(x) => {
                let a = 2.0 * PI * x as f64 / self.m as f64;
                [[a.cos(), -a.sin()], [a.sin(), a.cos()]]
            }
            DihedralElement::Reflection(t) => {
                let a = 2.0 * PI * t as f64 / self.m as f64;
                [[a.cos(), a.sin()], [a.sin(), -a.cos()]]
            }
        }
    }
}

/// The `m` lines of the dihedral arrangement, complexified.
#[derive(Clone, Debug)]
pub struct Arrangement2D {
    pub m: usize,
    /// `f_i(x, y) = a_i x + b_i y` with `(a_i, b_i) = (−sin(iπ/m), cos(iπ/m))`.
    pub forms: Vec<(f64, f64)>,
}

impl Arrangement2D {
    pub fn new(m: usize) -> Self {
        let forms = (0..m)
            .map(|i| {
                let th = i as f64 * PI / m as f64;
                (-th.sin(), th.cos())
            })
            .collect();
        Self { m, forms }
    }

    pub fn eval(&self, i: usize, p: &[C64; 2]) -> C64 {
        let (a, b) = self.forms[i];
        p[0] * a + p[1] * b
    }

    /// Closest hyperplane (by `|f_i|`), optionally skipping one index.
    pub fn min_abs(&self, p: &[C64; 2], skip: Option<usize>) -> (usize, f64) {
        (0..self.m)
            .filter(|&i| Some(i) != skip)
            .map(|i| (i, self.eval(i, p).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((0, f64::INFINITY))
    }

    /// Whether a real point lies in the open cone of angles `(0, π/m)`.
    pub fn in_base_chamber(&self, x: f64, y: f64) -> bool {
        let ang = y.atan2(x);
        ang > 0.0 && ang < PI / self.m as f64
    }
}

/// Symmetric Coxeter matrix with optional finiteness data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoxeterMatrix {
    pub rank: usize,
    pub m: Vec<Vec<usize>>,
    #[serde(default)]
    pub finite_type: bool,
    #[serde(default)]
    pub longest_length: Option<usize>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CoxeterJson {
    Dihedral { dihedral: usize },
    Full { rank: usize, m: Vec<Vec<usize>> },
}

impl CoxeterMatrix {
    pub fn new(m: Vec<Vec<usize>>) -> Result<Self> {
        let n = m.len();
        if n == 0 {
            return Err(Error::Invalid("empty Coxeter matrix".into()));
        }
        for (i, row) in m.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Invalid("Coxeter matrix not square".into()));
            }
            if row[i] != 1 {
                return Err(Error::Invalid(format!("m[{i}][{i}] must be 1")));
            }
            for (j, &v) in row.iter().enumerate() {
                if i != j && v < 2 {
                    return Err(Error::Invalid(format!("m[{i}][{j}] = {v} must be >= 2")));
                }
                if m[j][i] != v {
                    return Err(Error::Invalid("Coxeter matrix not symmetric".into()));
                }
            }
        }
        Ok(Self { rank: n, m, finite_type: false, longest_length: None })
    }

    pub fn dihedral(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Invalid(format!("dihedral order {m} < 2")));
        }
        Self::new(vec![vec![1, m], vec![m, 1]])
    }

    /// Type `A_n` (symmetric group on `n + 1` letters).
    pub fn type_a(n: usize) -> Result<Self> {
        let m = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.abs_diff(j) {
                        0 => 1,
                        1 => 3,
                        _ => 2,
                    })
                    .collect()
            })
            .collect();
        Self::new(m)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        match serde_json::from_str::<CoxeterJson>(s)? {
            CoxeterJson::Dihedral { dihedral } => Self::dihedral(dihedral),
            CoxeterJson::Full { rank, m } => {
                if m.len() != rank {
                    return Err(Error::Invalid(format!("rank {rank} but {} rows", m.len())));
                }
                Self::new(m)
            }
        }
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.m[i][j]
    }

    /// Enumerate the group and record finiteness and the longest length.
    pub fn with_enumeration(mut self, cap: usize) -> Result<Self> {
        let e = enumerate_group(&self, cap)?;
        self.finite_type = true;
        self.longest_length = Some(e.longest_length);
        Ok(self)
    }

    /// Class id per simple reflection; `s_i ~ s_j` iff joined by a path of
    /// odd-labelled edges.
    pub fn simple_reflection_classes(&self) -> Vec<usize> {
        let n = self.rank;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for i in 0..n {
            for j in i + 1..n {
                if self.m[i][j] % 2 == 1 {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
        let mut ids: Vec<usize> = Vec::new();
        roots
            .iter()
            .map(|r| match ids.iter().position(|x| x == r) {
                Some(p) => p,
                None => {
                    ids.push(*r);
                    ids.len() - 1
                }
            })
            .collect()
    }

    /// Geometric (Tits) representation matrix of `s_i`, row-major `n×n`.
    pub fn tits_generator(&self, i: usize) -> Vec<f64> {
        let n = self.rank;
        let mut s = vec![0.0; n * n];
        for j in 0..n {
            s[j * n + j] = 1.0;
            let b = -(PI / self.m[i][j] as f64).cos();
            s[i * n + j] -= 2.0 * b;
        }
        s
    }
}

/// Result of breadth-first enumeration.
#[derive(Clone, Debug)]
pub struct GroupEnumeration {
    /// Shortlex-minimal reduced words, in order of discovery.
    pub elements: Vec<Vec<usize>>,
    /// Row-major Tits matrices, parallel to `elements`.
    pub matrices: Vec<Vec<f64>>,
    pub longest_length: usize,
}

impl GroupEnumeration {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, mat: &[f64]) -> Option<usize> {
        let key = matrix_key(mat);
        self.matrices.iter().position(|m| matrix_key(m) == key)
    }
}

fn matrix_key(m: &[f64]) -> Vec<i64> {
    m.iter().map(|x| (x * 1e6).round() as i64).collect()
}

pub(crate) fn mat_mul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik != 0.0 {
                for j in 0..n {
                    c[i * n + j] += aik * b[k * n + j];
                }
            }
        }
    }
    c
}

/// Breadth-first closure of the simple reflections in the Tits
/// representation; elements are identified by their matrices.
pub fn enumerate_group(g: &CoxeterMatrix, cap: usize) -> Result<GroupEnumeration> {
    if g.rank > 3 {
        return Err(Error::Invalid(format!(
            "group enumeration limited to rank <= 3, got {}",
            g.rank
        )));
    }
    let n = g.rank;
    let gens: Vec<Vec<f64>> = (0..n).map(|i| g.tits_generator(i)).collect();
    let mut id = vec![0.0; n * n];
    for i in 0..n {
        id[i * n + i] = 1.0;
    }
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
    seen.insert(matrix_key(&id), 0);
    let mut elements = vec![Vec::new()];
    let mut matrices = vec![id];
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        for (gi, s) in gens.iter().enumerate() {
            let next = mat_mul(n, &matrices[k], s);
            let key = matrix_key(&next);
            if seen.contains_key(&key) {
                continue;
            }
            if elements.len() >= cap {
                return Err(Error::NotFiniteWithinCap { cap });
            }
            let mut w = elements[k].clone();
            w.push(gi);
            seen.insert(key, elements.len());
            elements.push(w);
            matrices.push(next);
            queue.push_back(elements.len() - 1);
        }
    }
    let longest_length = elements.iter().map(Vec::len).max().unwrap_or(0);
    Ok(GroupEnumeration { elements, matrices, longest_length })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b3() -> CoxeterMatrix {
        CoxeterMatrix::new(vec![vec![1, 4, 2], vec![4, 1, 3], vec![2, 3, 1]]).unwrap()
    }

    // Oracle: push the direction vector of H_j through the explicit 2×2
    // reflection matrix and read off the angle of the image line.
    fn reflect_line_by_matrix(model: &DihedralModel, t: usize, j: usize) -> usize {
        let m = model.m();
        let th = j as f64 * PI / m as f64;
        let r = model.matrix(DihedralElement::Reflection(t));
        let v = [
            r[0][0] * th.cos() + r[0][1] * th.sin(),
            r[1][0] * th.cos() + r[1][1] * th.sin(),
        ];
        let mut ang = v[1].atan2(v[0]);
        while ang < -1e-9 {
            ang += PI;
        }
        ((ang / (PI / m as f64)).round() as usize) % m
    }

    #[test]
    fn reflection_action_examples() {
        let d6 = DihedralModel::new(6).unwrap();
        assert_eq!(d6.reflection_action(0, 2).unwrap(), 4);
        assert_eq!(d6.reflection_action(1, 3).unwrap(), 5);
        let d5 = DihedralModel::new(5).unwrap();
        assert_eq!(d5.reflection_action(3, 3).unwrap(), 3);
        assert!(d5.reflection_action(5, 0).is_err());
    }

    #[test]
    fn reflection_action_matches_matrix_oracle() {
        for m in 2..=12 {
            let d = DihedralModel::new(m).unwrap();
            for t in 0..m {
                for j in 0..m {
                    let got = d.reflection_action(t, j).unwrap();
                    assert_eq!(got, reflect_line_by_matrix(&d, t, j));
                    assert_eq!(d.reflection_action(t, got).unwrap(), j);
                }
            }
        }
    }

    #[test]
    fn generators_have_expected_orders() {
        for m in 2..=9 {
            let d = DihedralModel::new(m).unwrap();
            let r = d.from_generators(&[0, 1]);
            let mut acc = DihedralElement::Rotation(0);
            for k in 1..=m {
                acc = d.compose(acc, r);
                assert_eq!(acc == DihedralElement::Rotation(0), k == m);
            }
            // s_i = [s_1 s_0 ⋯]_{2i−1}
            for i in 1..m {
                let w: Vec<usize> = (0..2 * i - 1).map(|k| if k % 2 == 0 { 1 } else { 0 }).collect();
                assert_eq!(d.from_generators(&w), DihedralElement::Reflection(i));
            }
        }
    }

    #[test]
    fn class_of_matches_brute_force_conjugation() {
        for m in 2..=10 {
            let d = DihedralModel::new(m).unwrap();
            for t in 0..m {
                for w in d.elements() {
                    let conj = d.compose(d.compose(w, DihedralElement::Reflection(t)), d.inverse(w));
                    match conj {
                        DihedralElement::Reflection(u) => assert_eq!(d.class_of(u), d.class_of(t)),
                        _ => panic!("conjugate of a reflection is a reflection"),
                    }
                }
            }
        }
    }

    #[test]
    fn arrangement_forms() {
        let a = Arrangement2D::new(5);
        let p = [C64::new(0.3, 0.0), C64::new(0.7, 0.0)];
        assert!((a.eval(0, &p) - C64::new(0.7, 0.0)).norm() < 1e-15);
        for i in 0..5 {
            let th = i as f64 * PI / 5.0;
            let on = [C64::new(th.cos(), 0.0), C64::new(th.sin(), 0.0)];
            assert!(a.eval(i, &on).norm() < 1e-14);
        }
        let ang = PI / 10.0;
        assert!(a.in_base_chamber(ang.cos(), ang.sin()));
        let q = [C64::new(ang.cos(), 0.0), C64::new(ang.sin(), 0.0)];
        assert!(a.min_abs(&q, None).1 > 0.1);
    }

    #[test]
    fn enumerate_small_groups() {
        let i25 = enumerate_group(&CoxeterMatrix::dihedral(5).unwrap(), 1000).unwrap();
        assert_eq!((i25.order(), i25.longest_length), (10, 5));
        let a2 = enumerate_group(&CoxeterMatrix::type_a(2).unwrap(), 1000).unwrap();
        assert_eq!((a2.order(), a2.longest_length), (6, 3));
        let a1 = enumerate_group(&CoxeterMatrix::type_a(1).unwrap(), 1000).unwrap();
        assert_eq!((a1.order(), a1.longest_length), (2, 1));
        let a3 = enumerate_group(&CoxeterMatrix::type_a(3).unwrap(), 1000).unwrap();
        assert_eq!((a3.order(), a3.longest_length), (24, 6));
        let e = enumerate_group(&b3(), 1000).unwrap();
        assert_eq!((e.order(), e.longest_length), (48, 9));
        for m in 2..=8 {
            let e = enumerate_group(&CoxeterMatrix::dihedral(m).unwrap(), 1000).unwrap();
            assert_eq!((e.order(), e.longest_length), (2 * m, m));
        }
    }

    #[test]
    fn affine_type_hits_cap() {
        let a2t = CoxeterMatrix::new(vec![vec![1, 3, 3], vec![3, 1, 3], vec![3, 3, 1]]).unwrap();
        assert!(matches!(enumerate_group(&a2t, 500), Err(Error::NotFiniteWithinCap { .. })));
    }

    #[test]
    fn longest_length_equals_reflection_count() {
        for g in [CoxeterMatrix::dihedral(7).unwrap(), CoxeterMatrix::type_a(3).unwrap(), b3()] {
            let e = enumerate_group(&g, 1000).unwrap();
            let n = g.rank;
            let inverse_of = |w: &[f64]| {
                e.matrices
                    .iter()
                    .find(|v| {
                        let p = mat_mul(n, w, v);
                        (0..n).all(|i| (0..n).all(|j| (p[i * n + j] - f64::from(i == j)).abs() < 1e-6))
                    })
                    .unwrap()
                    .clone()
            };
            let mut refl = std::collections::HashSet::new();
            for w in &e.matrices {
                let winv = inverse_of(w);
                for i in 0..n {
                    let c = mat_mul(n, &mat_mul(n, w, &g.tits_generator(i)), &winv);
                    refl.insert(e.index_of(&c).unwrap());
                }
            }
            assert_eq!(refl.len(), e.longest_length);
        }
    }

    #[test]
    fn defining_relations_hold_on_enumerated_elements() {
        let g = b3();
        let e = enumerate_group(&g, 1000).unwrap();
        let n = g.rank;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let len = g.get(i, j);
                for w in &e.matrices {
                    let apply = |a: usize, b: usize| {
                        (0..len).fold(w.clone(), |acc, k| {
                            let gi = if k % 2 == 0 { a } else { b };
                            mat_mul(n, &acc, &g.tits_generator(gi))
                        })
                    };
                    assert_eq!(e.index_of(&apply(i, j)), e.index_of(&apply(j, i)));
                }
            }
        }
    }

    #[test]
    fn json_forms() {
        let d = CoxeterMatrix::from_json(r#"{"dihedral": 5}"#).unwrap();
        assert_eq!(d.get(0, 1), 5);
        let a = CoxeterMatrix::from_json(r#"{"rank": 2, "m": [[1,3],[3,1]]}"#).unwrap();
        assert_eq!(a, CoxeterMatrix::type_a(2).unwrap());
        assert!(CoxeterMatrix::from_json(r#"{"rank": 2, "m": [[1,1],[1,1]]}"#).is_err());
        assert_eq!(CoxeterMatrix::type_a(3).unwrap().simple_reflection_classes(), vec![0, 0, 0]);
        assert_eq!(CoxeterMatrix::dihedral(4).unwrap().simple_reflection_classes(), vec![0, 1]);
        assert_eq!(b3().simple_reflection_classes(), vec![0, 1, 1]);
    }
}
