//! Rewriting engine for rank-two BMW-type algebras.
//!
//! The spanning set is the Hecke part `[x_0x_1⋯]_i`, `[x_1x_0⋯]_j` together
//! with ideal words `A E_b B`, where `A = [⋯x_b x_o]_i` and `B = [x_o x_b⋯]_j`
//! with `o` the other generator. The engine computes the left action of each
//! generator letter on this set by reducing products to it.

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, C64};
use crate::phi::Sandwich;
use crate::algebra::Assignment;
use crate::word::{alternating_word, Letter, Side, Word};
use std::collections::HashMap;

/// Local rules for one generator:
/// `x² = quad_x·x + quad_one + quad_e·E`, `xE = Ex = absorb·E`, `E² = tau·E`,
/// `x⁻¹ = x + inv_one + inv_e·E`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Profile {
    pub quad_x: C64,
    pub quad_one: C64,
    pub quad_e: C64,
    pub absorb: C64,
    pub tau: C64,
    pub inv_one: C64,
    pub inv_e: C64,
}

impl Profile {
    pub fn bmw(q: C64, l: C64, tau: C64) -> Self {
        let d = q.inv() - q;
        Self {
            quad_x: q - q.inv(),
            quad_one: C64::new(1.0, 0.0),
            quad_e: d * l.inv(),
            absorb: l.inv(),
            tau,
            inv_one: d,
            inv_e: -d,
        }
    }

    pub fn hecke(q: C64) -> Self {
        let d = q.inv() - q;
        Self {
            quad_x: q - q.inv(),
            quad_one: C64::new(1.0, 0.0),
            quad_e: C64::new(0.0, 0.0),
            absorb: C64::new(0.0, 0.0),
            tau: C64::new(0.0, 0.0),
            inv_one: d,
            inv_e: C64::new(0.0, 0.0),
        }
    }

    pub fn brauer(alpha: C64) -> Self {
        let zero = C64::new(0.0, 0.0);
        Self {
            quad_x: zero,
            quad_one: C64::new(1.0, 0.0),
            quad_e: zero,
            absorb: C64::new(1.0, 0.0),
            tau: alpha,
            inv_one: zero,
            inv_e: zero,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Basis {
    Hecke { start: usize, len: usize },
    Ideal { b: usize, i: usize, j: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Side2 {
    Left,
    Right,
}

const STEP_CAP: usize = 1_000_000;

pub struct DihedralEngine<'a> {
    m: usize,
    profiles: [Profile; 2],
    sandwich: Option<&'a dyn Sandwich>,
    basis: Vec<Basis>,
    index: HashMap<Basis, usize>,
    memo: HashMap<(Side2, Letter, usize), CVec>,
    e_elem: [Option<CVec>; 2],
    steps: usize,
}

fn other(g: usize) -> usize {
    1 - g
}

impl<'a> DihedralEngine<'a> {
    /// Full algebra when a sandwich source is given, Hecke algebra otherwise.
    pub fn new(m: usize, profiles: [Profile; 2], sandwich: Option<&'a dyn Sandwich>) -> Result<Self> {
        if m < 3 {
            return Err(Error::Invalid(format!("dihedral engine needs m >= 3, got {m}")));
        }
        let mut basis = vec![Basis::Hecke { start: 0, len: 0 }];
        for len in 1..=m {
            basis.push(Basis::Hecke { start: 0, len });
        }
        for len in 1..m {
            basis.push(Basis::Hecke { start: 1, len });
        }
        if sandwich.is_some() {
            let (blocks, bound) = if m % 2 == 1 { (1, m - 1) } else { (2, m / 2 - 1) };
            for b in 0..blocks {
                for i in 0..=bound {
                    for j in 0..=bound {
                        basis.push(Basis::Ideal { b, i, j });
                    }
                }
            }
        }
        let index = basis.iter().enumerate().map(|(k, b)| (*b, k)).collect();
        Ok(Self { m, profiles, sandwich, basis, index, memo: HashMap::new(), e_elem: [None, None], steps: 0 })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn odd(&self) -> bool {
        self.m % 2 == 1
    }

    fn bound(&self) -> usize {
        if self.odd() {
            self.m - 1
        } else {
            self.m / 2 - 1
        }
    }

    fn sandwich(&self) -> Result<&'a dyn Sandwich> {
        self.sandwich
            .ok_or_else(|| Error::Invalid("E letters are not available in the Hecke algebra".into()))
    }

    fn unit(&self, k: usize) -> CVec {
        let mut v = CVec::zeros(self.dim());
        v[k] = C64::new(1.0, 0.0);
        v
    }

    fn hecke(&self, start: usize, len: usize) -> usize {
        let start = if len == 0 || len == self.m { 0 } else { start };
        self.index[&Basis::Hecke { start, len }]
    }

    fn ideal(&self, b: usize, i: usize, j: usize) -> usize {
        self.index[&Basis::Ideal { b, i, j }]
    }

    fn a_letters(b: usize, i: usize) -> Vec<Letter> {
        alternating_word(Letter::X(b), Letter::X(other(b)), i, Side::Right)
    }

    fn b_letters(b: usize, j: usize) -> Vec<Letter> {
        alternating_word(Letter::X(other(b)), Letter::X(b), j, Side::Left)
    }

    fn word_of(&self, k: usize) -> Word {
        match self.basis[k] {
            Basis::Hecke { start, len } => {
                Word(alternating_word(Letter::X(start), Letter::X(other(start)), len, Side::Left))
            }
            Basis::Ideal { b, i, j } => {
                let mut v = Self::a_letters(b, i);
                v.push(Letter::E(b));
                v.extend(Self::b_letters(b, j));
                Word(v)
            }
        }
    }

    pub fn basis_words(&self) -> Vec<Word> {
        (0..self.dim()).map(|k| self.word_of(k)).collect()
    }

    fn inverse_letters(w: &[Letter]) -> Vec<Letter> {
        w.iter()
            .rev()
            .map(|l| match *l {
                Letter::X(i) => Letter::XInv(i),
                Letter::XInv(i) => Letter::X(i),
                e => e,
            })
            .collect()
    }

    /// `[x_o x_b ⋯ x_o]_{m−1}` for even `m`.
    fn even_d(&self, b: usize) -> Vec<Letter> {
        alternating_word(Letter::X(other(b)), Letter::X(b), self.m - 1, Side::Left)
    }

    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > STEP_CAP {
            return Err(Error::RewriteCap { cap: STEP_CAP });
        }
        Ok(())
    }

    fn phi(&self, b: usize, letters: Vec<Letter>) -> Result<C64> {
        self.sandwich()?.phi(b, &Word(letters))
    }

    pub fn left_word(&mut self, w: &[Letter], v: &CVec) -> Result<CVec> {
        let mut out = v.clone();
        for &l in w.iter().rev() {
            out = self.left(l, &out)?;
        }
        Ok(out)
    }

    pub fn right_word(&mut self, v: &CVec, w: &[Letter]) -> Result<CVec> {
        let mut out = v.clone();
        for &l in w {
            out = self.right(&out, l)?;
        }
        Ok(out)
    }

    pub fn left(&mut self, l: Letter, v: &CVec) -> Result<CVec> {
        let mut out = CVec::zeros(self.dim());
        for k in 0..self.dim() {
            if v[k].norm() != 0.0 {
                out += self.left_basis(l, k)? * v[k];
            }
        }
        Ok(out)
    }

    pub fn right(&mut self, v: &CVec, l: Letter) -> Result<CVec> {
        let mut out = CVec::zeros(self.dim());
        for k in 0..self.dim() {
            if v[k].norm() != 0.0 {
                out += self.right_basis(k, l)? * v[k];
            }
        }
        Ok(out)
    }

    /// `E_g` as an element: for odd `m`, `E_1 = C E_0 C⁻¹` with `C = [x_0x_1⋯]_{m−1}`.
    fn e_element(&mut self, g: usize) -> Result<CVec> {
        if let Some(v) = &self.e_elem[g] {
            return Ok(v.clone());
        }
        self.sandwich()?;
        let v = if !self.odd() || g == 0 {
            self.unit(self.ideal(g, 0, 0))
        } else {
            let c = alternating_word(Letter::X(0), Letter::X(1), self.m - 1, Side::Left);
            let start = self.unit(self.ideal(0, self.m - 1, 0));
            self.right_word(&start, &Self::inverse_letters(&c))?
        };
        self.e_elem[g] = Some(v.clone());
        Ok(v)
    }

    fn left_basis(&mut self, l: Letter, k: usize) -> Result<CVec> {
        if let Some(v) = self.memo.get(&(Side2::Left, l, k)) {
            return Ok(v.clone());
        }
        self.tick()?;
        let v = match l {
            Letter::XInv(g) => {
                let p = self.profiles[g];
                let mut v = self.left_basis(Letter::X(g), k)? + self.unit(k) * p.inv_one;
                if p.inv_e != C64::new(0.0, 0.0) {
                    v += self.left_basis(Letter::E(g), k)? * p.inv_e;
                }
                v
            }
            Letter::X(g) => self.left_x(g, k)?,
            Letter::E(g) => self.left_e(g, k)?,
        };
        self.memo.insert((Side2::Left, l, k), v.clone());
        Ok(v)
    }

    fn right_basis(&mut self, k: usize, l: Letter) -> Result<CVec> {
        if let Some(v) = self.memo.get(&(Side2::Right, l, k)) {
            return Ok(v.clone());
        }
        self.tick()?;
        let v = match l {
            Letter::XInv(g) => {
                let p = self.profiles[g];
                let mut v = self.right_basis(k, Letter::X(g))? + self.unit(k) * p.inv_one;
                if p.inv_e != C64::new(0.0, 0.0) {
                    v += self.right_basis(k, Letter::E(g))? * p.inv_e;
                }
                v
            }
            Letter::X(g) => self.right_x(k, g)?,
            Letter::E(g) => self.right_e(k, g)?,
        };
        self.memo.insert((Side2::Right, l, k), v.clone());
        Ok(v)
    }

    fn left_x(&mut self, g: usize, k: usize) -> Result<CVec> {
        let p = self.profiles[g];
        match self.basis[k] {
            Basis::Hecke { start, len } => {
                if len == 0 {
                    return Ok(self.unit(self.hecke(g, 1)));
                }
                let start = if len == self.m { g } else { start };
                if start != g {
                    return Ok(self.unit(self.hecke(g, len + 1)));
                }
                let rest = self.hecke(other(g), len - 1);
                let mut v = self.unit(k) * p.quad_x + self.unit(rest) * p.quad_one;
                if self.sandwich.is_some() && p.quad_e != C64::new(0.0, 0.0) {
                    let e = self.e_element(g)?;
                    let tail = self.word_of(rest);
                    v += self.right_word(&e, tail.letters())? * p.quad_e;
                }
                Ok(v)
            }
            Basis::Ideal { b, i, j } => {
                let o = other(b);
                let first = if i == 0 { None } else if i % 2 == 1 { Some(o) } else { Some(b) };
                if first == Some(g) {
                    let rest = self.ideal(b, i - 1, j);
                    let mut v = self.unit(k) * p.quad_x + self.unit(rest) * p.quad_one;
                    if p.quad_e != C64::new(0.0, 0.0) {
                        v += self.left_basis(Letter::E(g), rest)? * p.quad_e;
                    }
                    return Ok(v);
                }
                if i == 0 && g == b {
                    return Ok(self.unit(k) * p.absorb);
                }
                if i + 1 <= self.bound() {
                    return Ok(self.unit(self.ideal(b, i + 1, j)));
                }
                if self.odd() {
                    // braid to the form ending in x_b, then absorb
                    return Ok(self.unit(self.ideal(b, self.m - 1, j)) * self.profiles[b].absorb);
                }
                // D E_b = Φ^b(D)/τ_b·E_b with D = D1·A′
                let d = self.even_d(b);
                let k_half = self.m / 2;
                let d1 = d[..k_half - 1].to_vec();
                let scale = self.phi(b, d)? / self.profiles[b].tau;
                let start = self.unit(self.ideal(b, 0, j));
                Ok(self.left_word(&Self::inverse_letters(&d1), &start)? * scale)
            }
        }
    }

    fn left_e(&mut self, g: usize, k: usize) -> Result<CVec> {
        match self.basis[k] {
            Basis::Hecke { .. } => {
                let e = self.e_element(g)?;
                let w = self.word_of(k);
                self.right_word(&e, w.letters())
            }
            Basis::Ideal { b, i, j } => {
                let a = Self::a_letters(b, i);
                if g == b {
                    let s = self.phi(b, a)?;
                    Ok(self.unit(self.ideal(b, 0, j)) * s)
                } else if !self.odd() {
                    Ok(CVec::zeros(self.dim()))
                } else {
                    // E_1 = C E_0 C⁻¹
                    let c = alternating_word(Letter::X(0), Letter::X(1), self.m - 1, Side::Left);
                    let mut w = Self::inverse_letters(&c);
                    w.extend(a);
                    let s = self.phi(0, w)?;
                    Ok(self.unit(self.ideal(0, self.m - 1, j)) * s)
                }
            }
        }
    }

    fn right_x(&mut self, k: usize, g: usize) -> Result<CVec> {
        let p = self.profiles[g];
        let Basis::Ideal { b, i, j } = self.basis[k] else {
            return Err(Error::Invalid("right action is only used on ideal words".into()));
        };
        let o = other(b);
        let last = if j == 0 { None } else if j % 2 == 1 { Some(o) } else { Some(b) };
        if last == Some(g) {
            let rest = self.ideal(b, i, j - 1);
            let mut v = self.unit(k) * p.quad_x + self.unit(rest) * p.quad_one;
            if p.quad_e != C64::new(0.0, 0.0) {
                v += self.right_basis(rest, Letter::E(g))? * p.quad_e;
            }
            return Ok(v);
        }
        if j == 0 && g == b {
            return Ok(self.unit(k) * p.absorb);
        }
        if j + 1 <= self.bound() {
            return Ok(self.unit(self.ideal(b, i, j + 1)));
        }
        if self.odd() {
            return Ok(self.unit(self.ideal(b, i, self.m - 1)) * self.profiles[b].absorb);
        }
        // E_b D = Φ^b(D)/τ_b·E_b with D = B′·D1′
        let d = self.even_d(b);
        let k_half = self.m / 2;
        let d1 = d[k_half..].to_vec();
        let scale = self.phi(b, d)? / self.profiles[b].tau;
        let start = self.unit(self.ideal(b, i, 0));
        Ok(self.right_word(&start, &Self::inverse_letters(&d1))? * scale)
    }

    fn right_e(&mut self, k: usize, g: usize) -> Result<CVec> {
        let Basis::Ideal { b, i, j } = self.basis[k] else {
            return Err(Error::Invalid("right action is only used on ideal words".into()));
        };
        let bw = Self::b_letters(b, j);
        if g == b {
            let s = self.phi(b, bw)?;
            Ok(self.unit(self.ideal(b, i, 0)) * s)
        } else if !self.odd() {
            Ok(CVec::zeros(self.dim()))
        } else {
            // E_1 = C′⁻¹ E_0 C′ with C′ = [x_1x_0⋯]_{m−1}
            let c = alternating_word(Letter::X(1), Letter::X(0), self.m - 1, Side::Left);
            let mut w = bw;
            w.extend(Self::inverse_letters(&c));
            let s = self.phi(0, w)?;
            Ok(self.unit(self.ideal(0, i, self.m - 1)) * s)
        }
    }

    /// Left action matrices of all generator letters.
    pub fn action(&mut self) -> Result<Assignment> {
        let n = self.dim();
        let mut a = Assignment::new(n);
        let mut letters = vec![Letter::X(0), Letter::X(1), Letter::XInv(0), Letter::XInv(1)];
        if self.sandwich.is_some() {
            letters.extend([Letter::E(0), Letter::E(1)]);
        }
        for l in letters {
            let mut mat = CMat::zeros(n, n);
            for k in 0..n {
                mat.set_column(k, &self.left_basis(l, k)?);
            }
            a.set(l, mat);
        }
        Ok(a)
    }

    pub fn steps(&self) -> usize {
        self.steps
    }
}
