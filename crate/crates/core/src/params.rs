//! Parameter data `(k_c, α_c)` per reflection class together with `κ`, and the
//! derived quantities `q, l, τ, ν`.

use crate::error::{Error, Result};
use crate::linalg::{dist_to_integer, C64, I};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Margin kept from the resonance set by sampling and by [`ParameterSet::is_generic`].
pub const GENERIC_MARGIN: f64 = 1e-3;
pub const DEFAULT_KAPPA: f64 = 0.05;
const SAMPLE_CAP: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassParams {
    #[serde(with = "crate::json::complex")]
    pub k: C64,
    #[serde(with = "crate::json::complex")]
    pub alpha: C64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    #[serde(with = "crate::json::complex")]
    pub kappa: C64,
    pub classes: Vec<ClassParams>,
}

/// Derived per-class quantities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Derived {
    #[serde(with = "crate::json::complex")]
    pub q: C64,
    #[serde(with = "crate::json::complex")]
    pub l: C64,
    #[serde(with = "crate::json::complex")]
    pub tau: C64,
    #[serde(with = "crate::json::complex")]
    pub nu: C64,
}

impl ParameterSet {
    pub fn new(kappa: C64, classes: Vec<ClassParams>) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::Invalid("parameter set has no classes".into()));
        }
        for (c, p) in classes.iter().enumerate() {
            if p.k.norm() == 0.0 {
                return Err(Error::Invalid(format!("k for class {c} is zero")));
            }
        }
        Ok(Self { kappa, classes })
    }

    /// Same `(k, α)` for every class.
    pub fn uniform(kappa: C64, k: C64, alpha: C64, num_classes: usize) -> Result<Self> {
        Self::new(kappa, vec![ClassParams { k, alpha }; num_classes])
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: ParameterSet = serde_json::from_str(s)?;
        Self::new(p.kappa, p.classes)
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn with_kappa(&self, kappa: C64) -> Self {
        Self { kappa, classes: self.classes.clone() }
    }

    pub fn k(&self, c: usize) -> C64 {
        self.classes[c].k
    }

    pub fn alpha(&self, c: usize) -> C64 {
        self.classes[c].alpha
    }

    pub fn q(&self, c: usize) -> C64 {
        (I * PI * self.kappa * self.k(c)).exp()
    }

    pub fn l(&self, c: usize) -> C64 {
        (I * PI * self.kappa * self.alpha(c)).exp() / self.q(c)
    }

    pub fn tau(&self, c: usize) -> C64 {
        let (q, l) = (self.q(c), self.l(c));
        l * (l.inv() - q) * (l.inv() + q.inv()) / (q.inv() - q)
    }

    pub fn nu(&self, c: usize) -> C64 {
        let l = self.l(c);
        (l - l.inv()) / (1.0 - self.tau(c))
    }

    pub fn derived(&self, c: usize) -> Derived {
        Derived { q: self.q(c), l: self.l(c), tau: self.tau(c), nu: self.nu(c) }
    }

    /// Smallest distance of `κk`, `κ(k−α) − κk` and `κ(k−α) + κk` to the integers,
    /// minimised over classes.
    pub fn genericity_margin(&self) -> f64 {
        (0..self.num_classes())
            .map(|c| {
                let kk = self.kappa * self.k(c);
                let ka = self.kappa * (self.k(c) - self.alpha(c));
                dist_to_integer(kk)
                    .min(dist_to_integer(ka - kk))
                    .min(dist_to_integer(ka + kk))
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_generic(&self) -> bool {
        self.genericity_margin() > GENERIC_MARGIN
    }
}

/// Seeded draw of `n` classes from the box `Re k ∈ [0.5, 1.5]`,
/// `Re α ∈ [−1.5, 1.5]`, imaginary parts in `[−0.2, 0.2]`, rejecting
/// non-generic draws and `|α| ≤ 0.1`.
pub fn sample_generic_classes(seed: u64, num_classes: usize, kappa: C64) -> Result<ParameterSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SAMPLE_CAP {
        let classes: Vec<ClassParams> = (0..num_classes)
            .map(|_| ClassParams {
                k: C64::new(rng.gen_range(0.5..1.5), rng.gen_range(-0.2..0.2)),
                alpha: C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-0.2..0.2)),
            })
            .collect();
        if classes.iter().any(|c| c.alpha.norm() <= 0.1) {
            continue;
        }
        let p = ParameterSet::new(kappa, classes)?;
        if p.is_generic() {
            return Ok(p);
        }
    }
    Err(Error::SamplingExhausted(SAMPLE_CAP))
}

/// Generic parameters for the dihedral group of order `2m`.
pub fn sample_generic_parameters(seed: u64, m: usize) -> Result<ParameterSet> {
    let classes = if m % 2 == 1 { 1 } else { 2 };
    sample_generic_classes(seed, classes, C64::new(DEFAULT_KAPPA, 0.0))
}
