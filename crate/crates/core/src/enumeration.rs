//! Linear coset-style enumeration of the regular module of a finitely
//! presented algebra: elements are defined as `g·e_k`, relations are applied
//! to every element, and linear dependencies eliminate the newest element.

use crate::algebra::{Assignment, Relation};
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::word::{Letter, Word};
use serde::Serialize;
use std::collections::{BTreeMap, VecDeque};

pub const DEFAULT_ELEMENT_CAP: usize = 20_000;
pub const DEFAULT_STEP_CAP: usize = 1_000_000;
/// Coefficients below this are numerical noise of the relation data.
pub const DEFAULT_ZERO_TOL: f64 = 1e-6;
/// Pivot candidates must carry at least this fraction of the largest coefficient.
const PIVOT_FRACTION: f64 = 1e-3;

type SVec = BTreeMap<usize, C64>;

#[derive(Clone, Copy, Debug)]
pub struct EnumerationOptions {
    pub element_cap: usize,
    pub step_cap: usize,
    pub zero_tol: f64,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self { element_cap: DEFAULT_ELEMENT_CAP, step_cap: DEFAULT_STEP_CAP, zero_tol: DEFAULT_ZERO_TOL }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EnumerationStats {
    pub complete: bool,
    pub dimension: usize,
    pub defined: usize,
    pub steps: usize,
    /// Largest coefficient discarded as noise.
    pub max_dropped: f64,
}

pub struct Enumeration {
    /// Defining words of the surviving elements; element 0 is the identity.
    pub words: Vec<Word>,
    /// Generator actions on the surviving elements; `None` when incomplete.
    pub action: Option<Assignment>,
    pub stats: EnumerationStats,
}

enum Stop {
    Cap,
    Err(Error),
}

impl From<Error> for Stop {
    fn from(e: Error) -> Self {
        Stop::Err(e)
    }
}

type Flow<T> = std::result::Result<T, Stop>;

fn unit(k: usize) -> SVec {
    SVec::from([(k, C64::new(1.0, 0.0))])
}

fn axpy(acc: &mut SVec, a: C64, v: &SVec) {
    for (&k, &c) in v {
        *acc.entry(k).or_insert(C64::new(0.0, 0.0)) += a * c;
    }
}

fn sup(v: &SVec) -> f64 {
    v.values().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `g·source = target`, checked once both sides can be evaluated.
struct Deduction {
    gen: usize,
    source: SVec,
    target: SVec,
}

struct Enumerator<'a> {
    gens: &'a [Letter],
    opts: EnumerationOptions,
    words: Vec<Word>,
    table: Vec<Vec<Option<SVec>>>,
    repl: Vec<Option<SVec>>,
    pending: VecDeque<Deduction>,
    steps: usize,
    max_dropped: f64,
}

impl<'a> Enumerator<'a> {
    fn new(gens: &'a [Letter], opts: EnumerationOptions) -> Self {
        Self {
            gens,
            opts,
            words: vec![Word::empty()],
            table: vec![vec![None]; gens.len()],
            repl: vec![None],
            pending: VecDeque::new(),
            steps: 0,
            max_dropped: 0.0,
        }
    }

    fn gen_index(&self, l: Letter) -> Result<usize> {
        self.gens
            .iter()
            .position(|g| *g == l)
            .ok_or_else(|| Error::Invalid(format!("letter {l} is not a generator")))
    }

    fn alive(&self, k: usize) -> bool {
        self.repl[k].is_none()
    }

    fn normalize(&mut self, v: &SVec) -> SVec {
        let mut out = SVec::new();
        for (&k, &c) in v {
            if self.alive(k) {
                *out.entry(k).or_insert(C64::new(0.0, 0.0)) += c;
            } else {
                let r = self.repl[k].clone().expect("dead element");
                let r = self.normalize(&r);
                axpy(&mut out, c, &r);
                self.repl[k] = Some(r);
            }
        }
        out
    }

    fn define(&mut self, g: usize, k: usize) -> Flow<()> {
        if self.words.len() >= self.opts.element_cap {
            return Err(Stop::Cap);
        }
        let n = self.words.len();
        let mut w = vec![self.gens[g]];
        w.extend(self.words[k].letters().iter().copied());
        self.words.push(Word(w));
        self.repl.push(None);
        for row in &mut self.table {
            row.push(None);
        }
        self.table[g][k] = Some(unit(n));
        Ok(())
    }

    fn image(&mut self, g: usize, k: usize) -> Flow<SVec> {
        self.steps += 1;
        if self.steps > self.opts.step_cap {
            return Err(Stop::Cap);
        }
        if self.table[g][k].is_none() {
            self.define(g, k)?;
        }
        let t = self.table[g][k].take().expect("defined");
        let t = self.normalize(&t);
        self.table[g][k] = Some(t.clone());
        Ok(t)
    }

    fn apply_letter(&mut self, g: usize, v: &SVec) -> Flow<SVec> {
        let v = self.normalize(v);
        let mut out = SVec::new();
        for (k, c) in v {
            let t = self.image(g, k)?;
            axpy(&mut out, c, &t);
        }
        Ok(out)
    }

    fn apply_word(&mut self, w: &Word, v: SVec) -> Flow<SVec> {
        let mut v = v;
        for &l in w.letters().iter().rev() {
            let g = self.gen_index(l)?;
            v = self.apply_letter(g, &v)?;
        }
        Ok(v)
    }

    /// Record `z = 0`, eliminating one element if `z` is nonzero.
    /// `scale` bounds the size of the terms that cancelled to give `z`.
    /// The pivot is the largest coefficient on an element with no images yet,
    /// else the newest admissible one.
    fn coincidence(&mut self, z: &SVec, scale: f64) {
        let z = self.normalize(z);
        let cutoff = self.opts.zero_tol * scale.max(1.0);
        let mut kept: Vec<(usize, C64)> = Vec::new();
        for (k, c) in z {
            if c.norm() < cutoff {
                self.max_dropped = self.max_dropped.max(c.norm() / scale.max(1.0));
            } else {
                kept.push((k, c));
            }
        }
        let Some(big) = kept.iter().map(|(_, c)| c.norm()).reduce(f64::max) else {
            return;
        };
        let leaf = kept
            .iter()
            .filter(|(k, _)| self.table.iter().all(|row| row[*k].is_none()))
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .filter(|(_, c)| c.norm() >= PIVOT_FRACTION * big);
        let &(p, zp) = leaf
            .or_else(|| kept.iter().rev().find(|(_, c)| c.norm() >= PIVOT_FRACTION * big))
            .expect("largest entry qualifies");
        let r: SVec = kept.iter().filter(|(k, _)| *k != p).map(|&(k, c)| (k, -c / zp)).collect();
        self.repl[p] = Some(r.clone());
        for g in 0..self.gens.len() {
            if let Some(t) = self.table[g][p].take() {
                self.pending.push_back(Deduction { gen: g, source: r.clone(), target: t });
            }
        }
    }

    fn drain(&mut self) -> Flow<()> {
        while let Some(d) = self.pending.pop_front() {
            let lhs = self.apply_letter(d.gen, &d.source)?;
            let target = self.normalize(&d.target);
            let scale = sup(&lhs).max(sup(&target));
            let mut z = lhs;
            axpy(&mut z, C64::new(-1.0, 0.0), &target);
            self.coincidence(&z, scale);
        }
        Ok(())
    }

    fn run(&mut self, relations: &[Relation]) -> Flow<()> {
        let mut k = 0;
        while k < self.words.len() {
            for r in relations {
                if !self.alive(k) {
                    break;
                }
                let mut z = SVec::new();
                let mut scale = 0.0f64;
                for (c, w) in &r.terms {
                    let v = self.apply_word(w, unit(k))?;
                    let v = self.normalize(&v);
                    scale = scale.max(c.norm() * sup(&v));
                    axpy(&mut z, *c, &v);
                }
                self.coincidence(&z, scale);
                self.drain()?;
            }
            for g in 0..self.gens.len() {
                if self.alive(k) {
                    self.image(g, k)?;
                    self.drain()?;
                }
            }
            k += 1;
        }
        Ok(())
    }

    fn finish(mut self, complete: bool) -> Enumeration {
        let live: Vec<usize> = (0..self.words.len()).filter(|&k| self.alive(k)).collect();
        let pos: BTreeMap<usize, usize> = live.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let action = complete.then(|| {
            let n = live.len();
            let mut a = Assignment::new(n);
            for g in 0..self.gens.len() {
                let mut m = CMat::zeros(n, n);
                for (col, &k) in live.iter().enumerate() {
                    let t = self.table[g][k].clone().expect("closed table");
                    for (j, c) in self.normalize(&t) {
                        m[(pos[&j], col)] = c;
                    }
                }
                a.set(self.gens[g], m);
            }
            a
        });
        let stats = EnumerationStats {
            complete,
            dimension: live.len(),
            defined: self.words.len(),
            steps: self.steps,
            max_dropped: self.max_dropped,
        };
        let words = live.iter().map(|&k| self.words[k].clone()).collect();
        Enumeration { words, action, stats }
    }
}

/// Enumerate the algebra generated by `gens` subject to `relations`.
pub fn enumerate_algebra(gens: &[Letter], relations: &[Relation], opts: EnumerationOptions) -> Result<Enumeration> {
    let mut e = Enumerator::new(gens, opts);
    for r in relations {
        for (_, w) in &r.terms {
            for &l in w.letters() {
                e.gen_index(l)?;
            }
        }
    }
    match e.run(relations) {
        Ok(()) => {
            if !e.alive(0) {
                return Err(Error::Invalid("relations collapse the algebra to zero".into()));
            }
            Ok(e.finish(true))
        }
        Err(Stop::Cap) => Ok(e.finish(false)),
        Err(Stop::Err(err)) => Err(err),
    }
}
