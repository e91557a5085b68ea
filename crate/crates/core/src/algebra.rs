//! Finite-dimensional algebras given by a word basis and the left action of
//! each generator on it: normal forms, structure constants, regular
//! representation and diagnostics.

use crate::error::{Error, Result};
use crate::linalg::{identity, norm_max, numerical_rank, CMat, CVec, C64};
use crate::lk::{MatrixRep, RelationReport};
use crate::word::{Letter, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashMap};

pub const PRUNE: f64 = 1e-14;
pub const RANK_THRESHOLD: f64 = 1e-6;

/// Sparse combination of basis words.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AlgebraElement {
    pub terms: BTreeMap<usize, C64>,
}

impl AlgebraElement {
    pub fn from_dense(v: &CVec, prune: f64) -> Self {
        let terms = v
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > prune)
            .map(|(k, z)| (k, *z))
            .collect();
        Self { terms }
    }

    pub fn to_dense(&self, dim: usize) -> CVec {
        let mut v = CVec::zeros(dim);
        for (&k, &z) in &self.terms {
            v[k] = z;
        }
        v
    }

    pub fn basis(k: usize) -> Self {
        Self { terms: BTreeMap::from([(k, C64::new(1.0, 0.0))]) }
    }

    pub fn coefficient(&self, k: usize) -> C64 {
        self.terms.get(&k).copied().unwrap_or_default()
    }
}

/// `Σ c·w = 0`.
#[derive(Clone, Debug)]
pub struct Relation {
    pub name: String,
    pub terms: Vec<(C64, Word)>,
}

impl Relation {
    pub fn new(name: impl Into<String>, terms: Vec<(C64, Word)>) -> Self {
        Self { name: name.into(), terms }
    }

    /// `lhs − rhs` for two single words with coefficients.
    pub fn equal(name: impl Into<String>, lhs: (C64, Word), rhs: (C64, Word)) -> Self {
        Self::new(name, vec![lhs, (-rhs.0, rhs.1)])
    }
}

/// Matrices for generator letters; inverse letters fall back to matrix inverses.
#[derive(Clone, Debug)]
pub struct Assignment {
    pub dim: usize,
    mats: BTreeMap<Letter, CMat>,
}

impl Assignment {
    pub fn new(dim: usize) -> Self {
        Self { dim, mats: BTreeMap::new() }
    }

    pub fn set(&mut self, l: Letter, m: CMat) {
        self.mats.insert(l, m);
    }

    pub fn get(&self, l: Letter) -> Option<&CMat> {
        self.mats.get(&l)
    }

    pub fn letter(&self, l: Letter) -> Result<CMat> {
        if let Some(m) = self.mats.get(&l) {
            return Ok(m.clone());
        }
        match l {
            Letter::XInv(i) => self
                .mats
                .get(&Letter::X(i))
                .and_then(|m| m.clone().try_inverse())
                .ok_or_else(|| Error::Invalid(format!("no invertible matrix for x{i}"))),
            _ => Err(Error::Invalid(format!("no matrix assigned to {l}"))),
        }
    }

    pub fn word(&self, w: &Word) -> Result<CMat> {
        let mut out = identity(self.dim);
        for &l in w.letters() {
            out *= self.letter(l)?;
        }
        Ok(out)
    }

    pub fn combination(&self, terms: &[(C64, Word)]) -> Result<CMat> {
        let mut out = CMat::zeros(self.dim, self.dim);
        for (c, w) in terms {
            out += self.word(w)? * *c;
        }
        Ok(out)
    }

    pub fn relation_residual(&self, r: &Relation) -> Result<f64> {
        Ok(norm_max(&self.combination(&r.terms)?))
    }
}

#[derive(Clone, Debug)]
pub struct PresentedAlgebra {
    pub name: String,
    pub basis: Vec<Word>,
    /// Left action of each generator letter on the basis.
    pub action: Assignment,
    pub relations: Vec<Relation>,
    /// `left[a]` is the left-multiplication matrix of basis element `a`.
    left: Vec<CMat>,
    index: HashMap<Word, usize>,
}

impl PresentedAlgebra {
    /// Build from a basis (unit first) and the left action of the generators.
    /// Every basis word must be its own normal form.
    pub fn from_action(
        name: impl Into<String>,
        basis: Vec<Word>,
        action: Assignment,
        relations: Vec<Relation>,
    ) -> Result<Self> {
        let dim = basis.len();
        if basis.first().map_or(true, |w| !w.is_empty()) {
            return Err(Error::Invalid("basis must start with the empty word".into()));
        }
        if action.dim != dim {
            return Err(Error::Invalid("action dimension does not match basis".into()));
        }
        let mut left = Vec::with_capacity(dim);
        for (b, w) in basis.iter().enumerate() {
            let l = action.word(w)?;
            let col = l.column(0);
            for d in 0..dim {
                let expect = if d == b { 1.0 } else { 0.0 };
                if (col[d] - C64::new(expect, 0.0)).norm() > 1e-9 {
                    return Err(Error::IdentityFailed {
                        name: format!("normal form of basis word {w} is itself"),
                        residual: (col[d] - C64::new(expect, 0.0)).norm(),
                    });
                }
            }
            left.push(l);
        }
        let index = basis.iter().enumerate().map(|(k, w)| (w.clone(), k)).collect();
        Ok(Self { name: name.into(), basis, action, relations, left, index })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn left_matrix(&self, a: usize) -> &CMat {
        &self.left[a]
    }

    pub fn normal_form(&self, w: &Word) -> Result<AlgebraElement> {
        let m = self.action.word(w)?;
        Ok(AlgebraElement::from_dense(&m.column(0).into_owned(), PRUNE))
    }

    /// `basis_a · basis_b` as a dense vector.
    pub fn product_dense(&self, a: usize, b: usize) -> CVec {
        self.left[a].column(b).into_owned()
    }

    pub fn multiply(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        let yd = y.to_dense(self.dim());
        let mut out = CVec::zeros(self.dim());
        for (&a, &c) in &x.terms {
            out += &self.left[a] * &yd * c;
        }
        AlgebraElement::from_dense(&out, PRUNE)
    }

    /// Nonzero entries `(a, b, d, c_ab^d)`.
    pub fn structure_constants(&self) -> Vec<(usize, usize, usize, C64)> {
        let n = self.dim();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for d in 0..n {
                    let z = self.left[a][(d, b)];
                    if z.norm() > PRUNE {
                        out.push((a, b, d, z));
                    }
                }
            }
        }
        out
    }

    pub fn regular_representation(&self) -> MatrixRep {
        let mut rep = MatrixRep::new(self.dim());
        for (w, l) in self.basis.iter().zip(&self.left) {
            rep.insert(w.to_string(), l.clone()).expect("square of basis size");
        }
        rep
    }

    /// Largest `‖(ab)c − a(bc)‖` over `samples` seeded random triples.
    pub fn associativity_residual(&self, samples: usize, seed: u64) -> f64 {
        let n = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            let ab = self.product_dense(a, b);
            let mut lhs = CVec::zeros(n);
            for (d, z) in ab.iter().enumerate() {
                if z.norm() > 0.0 {
                    lhs += self.left[d].column(c) * *z;
                }
            }
            let rhs = &self.left[a] * self.product_dense(b, c);
            worst = worst.max((lhs - rhs).iter().fold(0.0, |m, z| m.max(z.norm())));
        }
        worst
    }

    /// Relative numerical rank of the trace form `Tr(L_a L_b)`.
    pub fn trace_form_rank(&self, threshold: f64) -> usize {
        numerical_rank(&self.trace_form(), threshold)
    }

    pub fn trace_form(&self) -> CMat {
        let n = self.dim();
        let mut g = CMat::zeros(n, n);
        for a in 0..n {
            for b in a..n {
                // Tr(L_a L_b) = Σ_{ij} L_a[i,j] L_b[j,i]
                let mut t = C64::new(0.0, 0.0);
                for i in 0..n {
                    for j in 0..n {
                        t += self.left[a][(i, j)] * self.left[b][(j, i)];
                    }
                }
                g[(a, b)] = t;
                g[(b, a)] = t;
            }
        }
        g
    }

    /// Defining relations on the regular representation.
    pub fn relation_report(&self) -> Result<RelationReport> {
        let mut rep = RelationReport::new();
        for r in &self.relations {
            rep.record(r.name.clone(), self.action.relation_residual(r)?);
        }
        Ok(rep)
    }

    /// Residuals of the defining relations and of sampled structure-constant
    /// identities `f(a)f(b) = Σ c_ab^d f(d)` under an assignment.
    pub fn verify_representation(&self, assign: &Assignment, samples: usize, seed: u64) -> Result<RelationReport> {
        let mut rep = RelationReport::new();
        for r in &self.relations {
            rep.record(r.name.clone(), assign.relation_residual(r)?);
        }
        let images: Vec<CMat> = self.basis.iter().map(|w| assign.word(w)).collect::<Result<_>>()?;
        let n = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let mut rhs = CMat::zeros(assign.dim, assign.dim);
            for (d, z) in self.product_dense(a, b).iter().enumerate() {
                if z.norm() > 0.0 {
                    rhs += &images[d] * *z;
                }
            }
            rep.record("structure constants", norm_max(&(&images[a] * &images[b] - rhs)));
        }
        Ok(rep)
    }

    /// Largest deviation of `normal_form(basis_k)` from `basis_k`.
    pub fn idempotence_residual(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (k, w) in self.basis.iter().enumerate() {
            let nf = self.normal_form(w)?.to_dense(self.dim());
            let mut e = CVec::zeros(self.dim());
            e[k] = C64::new(1.0, 0.0);
            worst = worst.max((nf - e).iter().fold(0.0, |m, z| m.max(z.norm())));
        }
        Ok(worst)
    }

    /// Residual of the algebra-morphism property of a linear map given by
    /// basis images in another algebra, over seeded sampled pairs.
    pub fn morphism_residual(&self, target: &PresentedAlgebra, images: &[CVec], samples: usize, seed: u64) -> f64 {
        let n = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let map = |v: &CVec| {
            let mut out = CVec::zeros(target.dim());
            for (d, z) in v.iter().enumerate() {
                if z.norm() > 0.0 {
                    out += &images[d] * *z;
                }
            }
            out
        };
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let lhs = map(&self.product_dense(a, b));
            let mut rhs = CVec::zeros(target.dim());
            for (d, z) in images[a].iter().enumerate() {
                if z.norm() > 0.0 {
                    rhs += target.left_matrix(d) * &images[b] * *z;
                }
            }
            worst = worst.max((lhs - rhs).iter().fold(0.0, |m, z| m.max(z.norm())));
        }
        worst
    }
}
