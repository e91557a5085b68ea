//! Sandwich scalars `Φ^i(X)` defined by `e_i f(X) e_i = Φ^i(X) e_i`, read off
//! from the rank-one factors of the monodromy projectors.

use crate::error::{Error, Result};
use crate::kz::MonodromyResult;
use crate::linalg::{identity, CMat, C64};
use crate::word::{Letter, Word};
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

/// Source of sandwich scalars for a rank-two pair with generators `0, 1`.
pub trait Sandwich: Send + Sync {
    fn phi(&self, i: usize, x: &Word) -> Result<C64>;
}

fn letter_matrix(mono: &MonodromyResult, l: Letter) -> Result<&CMat> {
    let i = l.index();
    if i > 1 {
        return Err(Error::IndexOutOfRange { index: i, size: 2 });
    }
    Ok(match l {
        Letter::X(_) => &mono.t[i],
        Letter::XInv(_) => &mono.t_inv[i],
        Letter::E(_) => &mono.e[i],
    })
}

/// `f(X)`: `x_i ↦ T(σ_i)`, `x_i⁻¹ ↦ T(σ_i)⁻¹`, `E_i ↦ e_i`.
pub fn evaluate_word_matrix(mono: &MonodromyResult, x: &Word) -> Result<CMat> {
    let mut out = identity(mono.dim());
    for &l in x.letters() {
        out *= letter_matrix(mono, l)?;
    }
    Ok(out)
}

/// `w_a·f(X)·u_b`.
fn pairing(mono: &MonodromyResult, a: usize, x: &Word, b: usize) -> Result<C64> {
    let mut row = mono.w[a].transpose();
    for &l in x.letters() {
        row = row * letter_matrix(mono, l)?;
    }
    Ok((row * &mono.u[b])[(0, 0)])
}

/// Memoised `Φ^i` evaluator over one monodromy computation.
pub struct PhiOracle {
    mono: Arc<MonodromyResult>,
    cache: RwLock<HashMap<(usize, Word), C64>>,
}

impl PhiOracle {
    pub fn new(mono: Arc<MonodromyResult>) -> Self {
        Self { mono, cache: RwLock::new(HashMap::new()) }
    }

    pub fn monodromy(&self) -> &MonodromyResult {
        &self.mono
    }

    pub fn cache_len(&self) -> usize {
        self.cache.read().expect("phi cache poisoned").len()
    }

    /// `w_0 f(X) u_1` and `w_1 f(X) u_0`; both vanish for even `m`.
    pub fn cross_sandwich(&self, x: &Word) -> Result<(C64, C64)> {
        if self.mono.m % 2 == 1 {
            return Err(Error::Invalid("cross sandwich is defined for even m only".into()));
        }
        Ok((pairing(&self.mono, 0, x, 1)?, pairing(&self.mono, 1, x, 0)?))
    }
}

impl Sandwich for PhiOracle {
    fn phi(&self, i: usize, x: &Word) -> Result<C64> {
        if i > 1 {
            return Err(Error::IndexOutOfRange { index: i, size: 2 });
        }
        let key = (i, x.clone());
        if let Some(v) = self.cache.read().expect("phi cache poisoned").get(&key) {
            return Ok(*v);
        }
        let v = pairing(&self.mono, i, x, i)?;
        self.cache.write().expect("phi cache poisoned").entry(key).or_insert(v);
        Ok(v)
    }
}

/// All words of length `≤ maxlen` over `x_0, x_1, E_0, E_1`, shortlex order.
pub fn positive_words(maxlen: usize) -> Vec<Word> {
    let alphabet = [Letter::X(0), Letter::X(1), Letter::E(0), Letter::E(1)];
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..maxlen {
        let mut next = Vec::with_capacity(layer.len() * 4);
        for w in &layer {
            for &l in &alphabet {
                let mut v = w.0.clone();
                v.push(l);
                next.push(Word(v));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
