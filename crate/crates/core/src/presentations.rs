//! Concrete presentations: dihedral BMW algebras over monodromy data, their
//! Hecke quotients, dihedral Brauer algebras, and comparison checks.

use crate::algebra::{Assignment, PresentedAlgebra, Relation, RANK_THRESHOLD};
use crate::coxeter::{enumerate_group, CoxeterMatrix, DihedralElement, DihedralModel};
use crate::enumeration::{enumerate_algebra, Enumeration, EnumerationOptions, EnumerationStats};
use crate::dihedral::{DihedralEngine, Profile};
use crate::error::{Error, Result};
use crate::kz::{generator_monodromy, monodromy_generators, MonodromyOptions, MonodromyResult};
use crate::linalg::{identity, norm_max, CVec, C64, I};
use crate::lk::{build_connection, build_projector, iota, reflection_weight, RelationReport};
use crate::params::ParameterSet;
use crate::phi::{positive_words, PhiOracle, Sandwich};
use crate::word::{alternating_word, Letter, Side, Word};
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

pub const IDENTITY_TOL: f64 = 1e-7;
pub const GROUP_CAP: usize = 100_000;
/// Length of the positive words used for sandwich relations.
pub const SANDWICH_WORD_LEN: usize = 3;

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn x(i: usize) -> Letter {
    Letter::X(i)
}

fn e(i: usize) -> Letter {
    Letter::E(i)
}

fn word(v: Vec<Letter>) -> Word {
    Word(v)
}

fn cat(parts: &[&[Letter]]) -> Word {
    Word(parts.iter().flat_map(|p| p.iter().copied()).collect())
}

fn alt(a: usize, b: usize, len: usize, side: Side) -> Vec<Letter> {
    alternating_word(x(a), x(b), len, side)
}

/// Per-generator `(q, l, τ)` for the dihedral group of order `2m`.
fn generator_data(m: usize, params: &ParameterSet, g: usize) -> (C64, C64, C64) {
    let c = if m % 2 == 1 { 0 } else { g % 2 };
    (params.q(c), params.l(c), params.tau(c))
}

/// Words `X` used to instantiate the sandwich relations.
pub fn sandwich_sample_words(m: usize) -> Vec<Word> {
    let mut out = positive_words(SANDWICH_WORD_LEN);
    for len in SANDWICH_WORD_LEN + 1..=m {
        for s in 0..2 {
            out.push(word(alt(s, 1 - s, len, Side::Left)));
        }
    }
    out
}

/// Defining relations of the dihedral BMW algebra, with sandwich scalars
/// drawn from `sandwich` on a finite sample of words.
pub fn dihedral_bmw_relations(m: usize, params: &ParameterSet, sandwich: &dyn Sandwich) -> Result<Vec<Relation>> {
    let mut rels = Vec::new();
    rels.push(Relation::equal(
        "braid",
        (one(), word(alt(0, 1, m, Side::Left))),
        (one(), word(alt(1, 0, m, Side::Left))),
    ));
    for g in 0..2 {
        let (q, l, _) = generator_data(m, params, g);
        let d = q.inv() - q;
        rels.push(Relation::equal(
            "x x^-1 = 1",
            (one(), word(vec![x(g), Letter::XInv(g)])),
            (one(), Word::empty()),
        ));
        rels.push(Relation::new(
            "cubic",
            vec![
                (l, word(vec![x(g), x(g)])),
                (l * d, word(vec![x(g)])),
                (-l, Word::empty()),
                (-d, word(vec![e(g)])),
            ],
        ));
        rels.push(Relation::equal("x E = l^-1 E", (one(), word(vec![x(g), e(g)])), (l.inv(), word(vec![e(g)]))));
        rels.push(Relation::equal("E x = l^-1 E", (one(), word(vec![e(g), x(g)])), (l.inv(), word(vec![e(g)]))));
        for w in sandwich_sample_words(m) {
            let phi = sandwich.phi(g, &w)?;
            rels.push(Relation::equal(
                "E X E = phi(X) E",
                (one(), cat(&[&[e(g)], w.letters(), &[e(g)]])),
                (phi, word(vec![e(g)])),
            ));
            if m % 2 == 0 {
                rels.push(Relation::new(
                    "E0 X E1 = 0",
                    vec![(one(), cat(&[&[e(g)], w.letters(), &[e(1 - g)]]))],
                ));
            }
        }
    }
    Ok(rels)
}

/// Identities derived from the defining relations that the rewriting relies on.
pub fn dihedral_derived_identities(m: usize, params: &ParameterSet, sandwich: &dyn Sandwich) -> Result<Vec<Relation>> {
    let mut rels = Vec::new();
    for g in 0..2 {
        let (_, _, tau) = generator_data(m, params, g);
        rels.push(Relation::equal("E^2 = tau E", (one(), word(vec![e(g), e(g)])), (tau, word(vec![e(g)]))));
    }
    if m % 2 == 1 {
        let c = alt(0, 1, m - 1, Side::Left);
        rels.push(Relation::equal("E1 C = C E0", (one(), cat(&[&[e(1)], &c])), (one(), cat(&[&c, &[e(0)]]))));
        let c2 = alt(1, 0, m - 1, Side::Left);
        rels.push(Relation::equal("C' E1 = E0 C'", (one(), cat(&[&c2, &[e(1)]])), (one(), cat(&[&[e(0)], &c2]))));
    } else {
        for b in 0..2 {
            let o = 1 - b;
            let d = alt(o, b, m - 1, Side::Left);
            let (_, _, tau) = generator_data(m, params, b);
            let phi = sandwich.phi(b, &word(d.clone()))?;
            rels.push(Relation::equal("E D = D E", (one(), cat(&[&[e(b)], &d])), (one(), cat(&[&d, &[e(b)]]))));
            rels.push(Relation::equal(
                "D E = phi(D)/tau E",
                (one(), cat(&[&d, &[e(b)]])),
                (phi / tau, word(vec![e(b)])),
            ));
        }
    }
    Ok(rels)
}

fn check_identities(name: &str, rels: &[Relation], assign: &Assignment) -> Result<RelationReport> {
    let mut rep = RelationReport::new();
    for r in rels {
        let res = assign.relation_residual(r)?;
        rep.record(r.name.clone(), res);
        if res > IDENTITY_TOL {
            return Err(Error::IdentityFailed { name: format!("{name}: {}", r.name), residual: res });
        }
    }
    Ok(rep)
}

pub struct DihedralBmw {
    pub m: usize,
    pub params: ParameterSet,
    pub oracle: Arc<PhiOracle>,
    pub algebra: PresentedAlgebra,
    pub derived: RelationReport,
    pub rewrite_steps: usize,
}

impl DihedralBmw {
    pub fn monodromy(&self) -> &MonodromyResult {
        self.oracle.monodromy()
    }
}

fn dihedral_profiles(m: usize, params: &ParameterSet) -> [Profile; 2] {
    [0, 1].map(|g| {
        let (q, l, tau) = generator_data(m, params, g);
        Profile::bmw(q, l, tau)
    })
}

/// Build the dihedral BMW algebra on its spanning set from monodromy data.
pub fn build_dihedral_bmw(m: usize, params: &ParameterSet, opts: &MonodromyOptions) -> Result<DihedralBmw> {
    let model = DihedralModel::new(m)?;
    let mono = monodromy_generators(&model, params, opts)?;
    let oracle = Arc::new(PhiOracle::new(Arc::new(mono)));
    build_dihedral_bmw_from_oracle(m, params, oracle)
}

pub fn build_dihedral_bmw_from_oracle(m: usize, params: &ParameterSet, oracle: Arc<PhiOracle>) -> Result<DihedralBmw> {
    let sandwich: &dyn Sandwich = oracle.as_ref();
    let mut engine = DihedralEngine::new(m, dihedral_profiles(m, params), Some(sandwich))?;
    let action = engine.action()?;
    let basis = engine.basis_words();
    let relations = dihedral_bmw_relations(m, params, sandwich)?;
    let algebra = PresentedAlgebra::from_action(format!("BMW(I2({m}))"), basis, action, relations)?;
    let derived = check_identities("dihedral BMW", &dihedral_derived_identities(m, params, sandwich)?, &algebra.action)?;
    Ok(DihedralBmw { m, params: params.clone(), derived, rewrite_steps: engine.steps(), oracle, algebra })
}

/// Hecke algebra on the `2m` alternating words.
pub fn hecke_quotient(m: usize, params: &ParameterSet) -> Result<PresentedAlgebra> {
    let profiles = [0, 1].map(|g| Profile::hecke(generator_data(m, params, g).0));
    let mut engine = DihedralEngine::new(m, profiles, None)?;
    let action = engine.action()?;
    let mut relations = vec![Relation::equal(
        "braid",
        (one(), word(alt(0, 1, m, Side::Left))),
        (one(), word(alt(1, 0, m, Side::Left))),
    )];
    for g in 0..2 {
        let q = profiles[g].quad_x;
        relations.push(Relation::new(
            "quadratic",
            vec![(one(), word(vec![x(g), x(g)])), (-q, word(vec![x(g)])), (-one(), Word::empty())],
        ));
        relations.push(Relation::equal(
            "x x^-1 = 1",
            (one(), word(vec![x(g), Letter::XInv(g)])),
            (one(), Word::empty()),
        ));
    }
    PresentedAlgebra::from_action(format!("Hecke(I2({m}))"), engine.basis_words(), action, relations)
}

/// Images of the basis of `full` under `E_i ↦ 0` in the Hecke quotient.
pub fn hecke_projection(full: &PresentedAlgebra, hecke: &PresentedAlgebra) -> Vec<CVec> {
    full.basis
        .iter()
        .map(|w| {
            let mut v = CVec::zeros(hecke.dim());
            if let Some(k) = hecke.index_of(w) {
                v[k] = one();
            }
            v
        })
        .collect()
}

/// `x_i ↦ T(σ_i)`, `x_i⁻¹ ↦ T(σ_i)⁻¹`, `E_i ↦ e_i`.
pub fn monodromy_assignment(mono: &MonodromyResult) -> Assignment {
    let mut a = Assignment::new(mono.dim());
    for g in 0..2 {
        a.set(x(g), mono.t[g].clone());
        a.set(Letter::XInv(g), mono.t_inv[g].clone());
        a.set(e(g), mono.e[g].clone());
    }
    a
}

/// Relations of the simply laced BMW presentation for a pair `i ∼ j`.
pub fn table_relations_linked(i: usize, j: usize, q: C64, l: C64, tau: C64) -> Vec<Relation> {
    let nu = (l - l.inv()) / (1.0 - tau);
    let mut rels = Vec::new();
    for (a, b) in [(i, j), (j, i)] {
        rels.push(Relation::equal(
            "X_i X_j X_i = X_j X_i X_j",
            (one(), word(vec![x(a), x(b), x(a)])),
            (one(), word(vec![x(b), x(a), x(b)])),
        ));
        rels.push(Relation::equal(
            "X_i X_j E_i = E_j X_i X_j",
            (one(), word(vec![x(a), x(b), e(a)])),
            (one(), word(vec![e(b), x(a), x(b)])),
        ));
        rels.push(Relation::new(
            "l(X_i^2 + nu X_i - 1) = nu E_i",
            vec![
                (l, word(vec![x(a), x(a)])),
                (l * nu, word(vec![x(a)])),
                (-l, Word::empty()),
                (-nu, word(vec![e(a)])),
            ],
        ));
        rels.push(Relation::equal("X_i E_i = l^-1 E_i", (one(), word(vec![x(a), e(a)])), (l.inv(), word(vec![e(a)]))));
        rels.push(Relation::equal("E_i X_j E_i = l E_i", (one(), word(vec![e(a), x(b), e(a)])), (l, word(vec![e(a)]))));
        rels.push(Relation::equal("E_i^2 = tau E_i", (one(), word(vec![e(a), e(a)])), (tau, word(vec![e(a)]))));
        rels.push(Relation::equal("E_i E_j E_i = E_i", (one(), word(vec![e(a), e(b), e(a)])), (one(), word(vec![e(a)]))));
    }
    let _ = q;
    rels
}

/// Relations of the simply laced BMW presentation for a pair `i ≁ j`.
pub fn table_relations_unlinked(i: usize, j: usize) -> Vec<Relation> {
    vec![
        Relation::equal("X_i X_j = X_j X_i", (one(), word(vec![x(i), x(j)])), (one(), word(vec![x(j), x(i)]))),
        Relation::equal("X_i E_j = E_j X_i", (one(), word(vec![x(i), e(j)])), (one(), word(vec![e(j), x(i)]))),
        Relation::equal("X_j E_i = E_i X_j", (one(), word(vec![x(j), e(i)])), (one(), word(vec![e(i), x(j)]))),
    ]
}

/// Residuals of the simply laced BMW relations in the rank-two algebra built for `m = 3`.
pub fn bmw3_comparison(bmw: &DihedralBmw) -> Result<RelationReport> {
    if bmw.m != 3 {
        return Err(Error::Invalid("comparison with B_3 needs m = 3".into()));
    }
    let p = &bmw.params;
    let rels = table_relations_linked(0, 1, p.q(0), p.l(0), p.tau(0));
    let mut rep = RelationReport::new();
    for r in &rels {
        rep.record(r.name.clone(), bmw.algebra.action.relation_residual(r)?);
    }
    Ok(rep)
}

/// Brauer sandwich scalars: `p_b ι(w) p_b = Φ^b(w)·p_b`.
pub struct BrauerSandwich {
    model: DihedralModel,
    params: ParameterSet,
}

impl BrauerSandwich {
    pub fn new(model: DihedralModel, params: ParameterSet) -> Self {
        Self { model, params }
    }
}

impl Sandwich for BrauerSandwich {
    fn phi(&self, b: usize, w: &Word) -> Result<C64> {
        let mut gens = Vec::with_capacity(w.len());
        for l in w.letters() {
            match *l {
                Letter::X(g) | Letter::XInv(g) if g < 2 => gens.push(g),
                _ => return Err(Error::Invalid(format!("Brauer sandwich of non-group word {w}"))),
            }
        }
        let g = self.model.from_generators(&gens);
        let target = self.model.act_on_line(g, b);
        Ok(if target == b {
            self.params.alpha(self.model.class_of(b))
        } else {
            reflection_weight(&self.model, &self.params, b, target)
        })
    }
}

/// Defining relations of the dihedral Brauer algebra with `S_g = x_g`.
pub fn dihedral_brauer_relations(model: &DihedralModel, params: &ParameterSet) -> Vec<Relation> {
    let m = model.m();
    let class_k = |w: &[usize]| match model.from_generators(w) {
        DihedralElement::Reflection(t) => params.k(model.class_of(t)),
        DihedralElement::Rotation(_) => unreachable!("odd word"),
    };
    let idx = |v: Vec<usize>| word(v.into_iter().map(x).collect());
    let mut rels = vec![Relation::equal(
        "braid",
        (one(), word(alt(0, 1, m, Side::Left))),
        (one(), word(alt(1, 0, m, Side::Left))),
    )];
    for i in 0..2 {
        let j = 1 - i;
        let alpha = params.alpha(model.class_of(i));
        rels.push(Relation::equal("S^2 = 1", (one(), word(vec![x(i), x(i)])), (one(), Word::empty())));
        rels.push(Relation::equal("S E = E", (one(), word(vec![x(i), e(i)])), (one(), word(vec![e(i)]))));
        rels.push(Relation::equal("E S = E", (one(), word(vec![e(i), x(i)])), (one(), word(vec![e(i)]))));
        rels.push(Relation::equal("E^2 = alpha E", (one(), word(vec![e(i), e(i)])), (alpha, word(vec![e(i)]))));
        if m % 2 == 0 {
            let k = m / 2;
            let w = alternating_word(j, i, 2 * k - 1, Side::Left);
            rels.push(Relation::equal("D E = E", (one(), cat(&[idx(w.clone()).letters(), &[e(i)]])), (one(), word(vec![e(i)]))));
            rels.push(Relation::equal("E D = E", (one(), cat(&[&[e(i)], idx(w).letters()])), (one(), word(vec![e(i)]))));
            for len in 0..=m {
                for s in [i, j] {
                    let w = idx(alternating_word(s, 1 - s, len, Side::Left));
                    rels.push(Relation::new("E_i w E_j = 0", vec![(one(), cat(&[&[e(i)], w.letters(), &[e(j)]]))]));
                }
            }
            for l in 1..k {
                let s = alternating_word(j, i, 2 * l - 1, Side::Left);
                let sp = alternating_word(j, i, 2 * (k + l) - 1, Side::Left);
                let coeff = class_k(&s) + class_k(&sp);
                rels.push(Relation::equal(
                    "E s E = (k_s + k_s') E",
                    (one(), cat(&[&[e(i)], idx(s).letters(), &[e(i)]])),
                    (coeff, word(vec![e(i)])),
                ));
            }
        } else {
            let k = (m - 1) / 2;
            for l in 1..=k {
                let s = alternating_word(j, i, 2 * l - 1, Side::Left);
                let eps = if l % 2 == 1 { i } else { j };
                rels.push(Relation::equal(
                    "E s E = k E",
                    (one(), cat(&[&[e(i)], idx(s).letters(), &[e(i)]])),
                    (params.k(model.class_of(eps)), word(vec![e(i)])),
                ));
            }
            let w = idx(alternating_word(i, j, 2 * k, Side::Left));
            rels.push(Relation::equal(
                "C E_i = E_j C",
                (one(), cat(&[w.letters(), &[e(i)]])),
                (one(), cat(&[&[e(j)], w.letters()])),
            ));
        }
    }
    rels
}

/// Dihedral Brauer algebra on the same spanning-set shape.
pub fn build_brauer(m: usize, params: &ParameterSet) -> Result<PresentedAlgebra> {
    let model = DihedralModel::new(m)?;
    if params.num_classes() != model.num_classes() {
        return Err(Error::Invalid(format!("m = {m} needs {} parameter classes", model.num_classes())));
    }
    let sandwich = BrauerSandwich::new(model.clone(), params.clone());
    let profiles = [0, 1].map(|g| Profile::brauer(params.alpha(model.class_of(g))));
    let mut engine = DihedralEngine::new(m, profiles, Some(&sandwich))?;
    let action = engine.action()?;
    let relations = dihedral_brauer_relations(&model, params);
    PresentedAlgebra::from_action(format!("Brauer(I2({m}))"), engine.basis_words(), action, relations)
}

#[derive(Clone, Debug, Serialize)]
pub struct BrauerDimension {
    pub m: usize,
    pub dimension: usize,
    pub trace_rank: usize,
    /// `2m + m²` for odd `m`, `2m + m²/2` for even `m`.
    pub matches_bmw_count: bool,
    /// `m² + m/2`, only meaningful for even `m`.
    pub matches_alternative: bool,
}

pub fn brauer_dimension(m: usize, params: &ParameterSet) -> Result<BrauerDimension> {
    let alg = build_brauer(m, params)?;
    let dimension = alg.dim();
    let bmw = if m % 2 == 1 { 2 * m + m * m } else { 2 * m + m * m / 2 };
    Ok(BrauerDimension {
        m,
        dimension,
        trace_rank: alg.trace_form_rank(RANK_THRESHOLD),
        matches_bmw_count: dimension == bmw,
        matches_alternative: m % 2 == 0 && dimension == m * m + m / 2,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DegenerationReport {
    pub kappas: Vec<f64>,
    /// `Δ(κ)` per generator.
    pub deltas: Vec<[f64; 2]>,
    pub decade_ratios: Vec<[f64; 2]>,
    pub monotone: bool,
    pub linear: bool,
}

/// `Δ(κ) = ‖(T²−1)/(2πiκ) − (k ι(s_i) − p_i)‖` along a decreasing `κ` sequence.
pub fn degeneration_check(m: usize, params: &ParameterSet, kappas: &[f64], tol: f64) -> Result<DegenerationReport> {
    let model = DihedralModel::new(m)?;
    let base = crate::kz::default_base_point(m);
    let mut deltas = Vec::with_capacity(kappas.len());
    for &kappa in kappas {
        let p = params.with_kappa(C64::new(kappa, 0.0));
        let conn = build_connection(&model, &p)?;
        let mut d = [0.0; 2];
        for (g, dg) in d.iter_mut().enumerate() {
            let (t, _) = generator_monodromy(&model, &conn, g, base, None, tol)?;
            let n = t.nrows();
            let lhs = (&t * &t - identity(n)) / (2.0 * PI * I * kappa);
            let limit = iota(&model, DihedralElement::Reflection(g)) * p.k(model.class_of(g))
                - build_projector(&model, &p, g)?;
            *dg = norm_max(&(lhs - limit));
        }
        deltas.push(d);
    }
    let decade_ratios: Vec<[f64; 2]> = deltas.windows(2).map(|w| [w[0][0] / w[1][0], w[0][1] / w[1][1]]).collect();
    let monotone = deltas.windows(2).all(|w| w[1][0] < w[0][0] && w[1][1] < w[0][1]);
    let linear = kappas.windows(2).zip(&decade_ratios).all(|(k, r)| {
        let step = k[0] / k[1];
        r.iter().all(|x| *x >= 0.7 * step && *x <= 1.3 * step)
    });
    Ok(DegenerationReport { kappas: kappas.to_vec(), deltas, decade_ratios, monotone, linear })
}

/// Rank-two data attached to a pair of nodes `i < j`.
pub struct PairData {
    pub i: usize,
    pub j: usize,
    pub m: usize,
    pub params: Option<ParameterSet>,
    pub oracle: Option<Arc<PhiOracle>>,
}

pub struct GeneralBmw {
    pub gamma: CoxeterMatrix,
    pub params: ParameterSet,
    pub longest_length: usize,
    pub pairs: Vec<PairData>,
    pub stats: EnumerationStats,
    /// Present only when the enumeration closed within its caps.
    pub algebra: Option<PresentedAlgebra>,
}

fn node_class(gamma: &CoxeterMatrix, params: &ParameterSet) -> Result<Vec<usize>> {
    let classes = gamma.simple_reflection_classes();
    let n = classes.iter().max().map_or(0, |c| c + 1);
    if params.num_classes() != n {
        return Err(Error::Invalid(format!("Coxeter graph has {n} reflection classes, parameters give {}", params.num_classes())));
    }
    Ok(classes)
}

/// Parameters of the rank-two subsystem on nodes `i, j`.
fn pair_params(params: &ParameterSet, class: &[usize], i: usize, j: usize, m: usize) -> Result<ParameterSet> {
    let cls = if m % 2 == 1 {
        vec![params.classes[class[i]].clone()]
    } else {
        vec![params.classes[class[i]].clone(), params.classes[class[j]].clone()]
    };
    ParameterSet::new(params.kappa, cls)
}

fn node_relations(g: usize, q: C64, l: C64, tau: C64) -> Vec<Relation> {
    let d = q.inv() - q;
    vec![
        Relation::new(
            "quadratic",
            vec![
                (one(), word(vec![x(g), x(g)])),
                (d, word(vec![x(g)])),
                (-one(), Word::empty()),
                (-d * l.inv(), word(vec![e(g)])),
            ],
        ),
        Relation::equal("x E = l^-1 E", (one(), word(vec![x(g), e(g)])), (l.inv(), word(vec![e(g)]))),
        Relation::equal("E x = l^-1 E", (one(), word(vec![e(g), x(g)])), (l.inv(), word(vec![e(g)]))),
        Relation::equal("E^2 = tau E", (one(), word(vec![e(g), e(g)])), (tau, word(vec![e(g)]))),
    ]
}

fn commuting_relations(i: usize, j: usize) -> Vec<Relation> {
    let mut out = Vec::new();
    for a in [x(i), e(i)] {
        for b in [x(j), e(j)] {
            out.push(Relation::equal("commute", (one(), word(vec![a, b])), (one(), word(vec![b, a]))));
        }
    }
    out
}

fn pair_relations(pair: &PairData) -> Result<Vec<Relation>> {
    let (i, j, m) = (pair.i, pair.j, pair.m);
    if m == 2 {
        return Ok(commuting_relations(i, j));
    }
    let oracle = pair.oracle.as_ref().ok_or_else(|| Error::Invalid(format!("pair ({i},{j}) has no sandwich data")))?;
    let map = [i, j];
    let mut rels = vec![Relation::equal(
        "braid",
        (one(), word(alt(i, j, m, Side::Left))),
        (one(), word(alt(j, i, m, Side::Left))),
    )];
    for w in sandwich_sample_words(m) {
        let xw = w.relabel(&map);
        for a in 0..2 {
            let phi = oracle.phi(a, &w)?;
            rels.push(Relation::equal(
                "E X E = phi(X) E",
                (one(), cat(&[&[e(map[a])], xw.letters(), &[e(map[a])]])),
                (phi, word(vec![e(map[a])])),
            ));
            if m % 2 == 0 {
                rels.push(Relation::new(
                    "E_i X E_j = 0",
                    vec![(one(), cat(&[&[e(map[a])], xw.letters(), &[e(map[1 - a])]]))],
                ));
            }
        }
    }
    Ok(rels)
}

/// Defining relations of the BMW algebra of a Coxeter graph with its pair data.
pub fn general_bmw_relations(gamma: &CoxeterMatrix, params: &ParameterSet, pairs: &[PairData]) -> Result<Vec<Relation>> {
    let class = node_class(gamma, params)?;
    let mut rels = Vec::new();
    for (g, &c) in class.iter().enumerate() {
        rels.extend(node_relations(g, params.q(c), params.l(c), params.tau(c)));
    }
    for p in pairs {
        rels.extend(pair_relations(p)?);
    }
    Ok(rels)
}

/// Per-pair monodromy at order `m_ij`, computed concurrently.
pub fn compute_pairs(gamma: &CoxeterMatrix, params: &ParameterSet, opts: &MonodromyOptions) -> Result<Vec<PairData>> {
    let class = node_class(gamma, params)?;
    let n = gamma.rank;
    let mut specs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let m = gamma.get(i, j);
            let p = if m >= 3 { Some(pair_params(params, &class, i, j, m)?) } else { None };
            specs.push((i, j, m, p));
        }
    }
    let results: Vec<Result<PairData>> = std::thread::scope(|s| {
        let handles: Vec<_> = specs
            .into_iter()
            .map(|(i, j, m, p)| {
                s.spawn(move || -> Result<PairData> {
                    let oracle = match &p {
                        Some(pp) => {
                            let model = DihedralModel::new(m)?;
                            let mono = monodromy_generators(&model, pp, opts)?;
                            Some(Arc::new(PhiOracle::new(Arc::new(mono))))
                        }
                        None => None,
                    };
                    Ok(PairData { i, j, m, params: p, oracle })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("pair worker panicked")).collect()
    });
    results.into_iter().collect()
}

fn generators(n: usize) -> Vec<Letter> {
    (0..n).map(x).chain((0..n).map(e)).collect()
}

/// BMW algebra of a finite Coxeter graph of rank at most three, with basis
/// found by enumeration.
pub fn build_general_bmw(
    gamma: &CoxeterMatrix,
    params: &ParameterSet,
    mono: &MonodromyOptions,
    opts: EnumerationOptions,
) -> Result<GeneralBmw> {
    if gamma.rank > 3 {
        return Err(Error::Invalid(format!("rank {} exceeds 3", gamma.rank)));
    }
    let group = enumerate_group(gamma, GROUP_CAP)?;
    let pairs = compute_pairs(gamma, params, mono)?;
    let relations = general_bmw_relations(gamma, params, &pairs)?;
    let en = enumerate_algebra(&generators(gamma.rank), &relations, opts)?;
    let algebra = match en.action {
        Some(action) => Some(PresentedAlgebra::from_action(format!("BMW(rank {})", gamma.rank), en.words, action, relations)?),
        None => None,
    };
    let mut gamma = gamma.clone();
    gamma.finite_type = true;
    gamma.longest_length = Some(group.longest_length);
    Ok(GeneralBmw {
        gamma,
        params: params.clone(),
        longest_length: group.longest_length,
        pairs,
        stats: en.stats,
        algebra,
    })
}

/// Hecke algebra of a Coxeter graph, found by the same enumeration.
pub fn general_hecke(gamma: &CoxeterMatrix, params: &ParameterSet, opts: EnumerationOptions) -> Result<Enumeration> {
    let class = node_class(gamma, params)?;
    let n = gamma.rank;
    let mut rels = Vec::new();
    for (g, &c) in class.iter().enumerate() {
        let q = params.q(c);
        rels.push(Relation::new(
            "quadratic",
            vec![(one(), word(vec![x(g), x(g)])), (-(q - q.inv()), word(vec![x(g)])), (-one(), Word::empty())],
        ));
    }
    for i in 0..n {
        for j in i + 1..n {
            let m = gamma.get(i, j);
            rels.push(Relation::equal(
                "braid",
                (one(), word(alt(i, j, m, Side::Left))),
                (one(), word(alt(j, i, m, Side::Left))),
            ));
        }
    }
    enumerate_algebra(&(0..n).map(x).collect::<Vec<_>>(), &rels, opts)
}

/// Residuals of the simply laced BMW relations inside a general algebra.
pub fn simply_laced_check(bmw: &GeneralBmw) -> Result<RelationReport> {
    let alg = bmw.algebra.as_ref().ok_or_else(|| Error::Invalid("enumeration incomplete".into()))?;
    let class = node_class(&bmw.gamma, &bmw.params)?;
    let mut rep = RelationReport::new();
    for i in 0..bmw.gamma.rank {
        for j in i + 1..bmw.gamma.rank {
            let rels = match bmw.gamma.get(i, j) {
                2 => table_relations_unlinked(i, j),
                3 => {
                    let c = class[i];
                    table_relations_linked(i, j, bmw.params.q(c), bmw.params.l(c), bmw.params.tau(c))
                }
                m => return Err(Error::Invalid(format!("edge label {m} is not simply laced"))),
            };
            for r in &rels {
                rep.record(format!("({i},{j}) {}", r.name), alg.action.relation_residual(r)?);
            }
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct IsomorphismReport {
    /// Rank of the basis-change matrix.
    pub rank: usize,
    pub dimension: usize,
    /// `max_a ‖P L'_a − L(P e_a) P‖` over basis elements `a`.
    pub structure_residual: f64,
    /// Whether the basis change is a permutation with unit coefficients.
    pub is_reordering: bool,
}

/// Compare two presentations on the same generators through the normal forms
/// of `source` basis words in `target`.
pub fn compare_algebras(source: &PresentedAlgebra, target: &PresentedAlgebra) -> Result<IsomorphismReport> {
    let n = target.dim();
    let images: Vec<CVec> = source
        .basis
        .iter()
        .map(|w| target.normal_form(w).map(|v| v.to_dense(n)))
        .collect::<Result<_>>()?;
    let mut p = crate::linalg::CMat::zeros(n, source.dim());
    for (k, v) in images.iter().enumerate() {
        p.set_column(k, v);
    }
    let rank = crate::linalg::numerical_rank(&p, RANK_THRESHOLD);
    let mut residual: f64 = 0.0;
    for (a, v) in images.iter().enumerate() {
        let mut la = crate::linalg::CMat::zeros(n, n);
        for (k, c) in v.iter().enumerate() {
            if c.norm() > 0.0 {
                la += target.left_matrix(k) * *c;
            }
        }
        residual = residual.max(norm_max(&(&p * source.left_matrix(a) - la * &p)));
    }
    let is_reordering = images.iter().all(|v| {
        let nz: Vec<&C64> = v.iter().filter(|c| c.norm() > 1e-8).collect();
        nz.len() == 1 && (nz[0] - one()).norm() < 1e-8
    });
    Ok(IsomorphismReport { rank, dimension: n.max(source.dim()), structure_residual: residual, is_reordering })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::sample_generic_parameters;

    fn build(m: usize, seed: u64) -> DihedralBmw {
        let p = sample_generic_parameters(seed, m).unwrap();
        build_dihedral_bmw(m, &p, &MonodromyOptions::default()).unwrap()
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }


    fn general(g: CoxeterMatrix, seed: u64) -> GeneralBmw {
        let n = *g.simple_reflection_classes().iter().max().unwrap() + 1;
        let p = crate::params::sample_generic_classes(seed, n, C64::new(0.05, 0.0)).unwrap();
        build_general_bmw(&g, &p, &MonodromyOptions::default(), EnumerationOptions::default()).unwrap()
    }

    #[test]
    fn general_small_dimensions() {
        let a1 = general(CoxeterMatrix::type_a(1).unwrap(), 1);
        assert_eq!(a1.stats.dimension, 3);
        let a1a1 = general(CoxeterMatrix::new(vec![vec![1, 2], vec![2, 1]]).unwrap(), 2);
        assert_eq!(a1a1.stats.dimension, 9);
        let a2 = general(CoxeterMatrix::type_a(2).unwrap(), 3);
        assert_eq!(a2.stats.dimension, 15, "{:?}", a2.stats);
        let b2 = general(CoxeterMatrix::dihedral(4).unwrap(), 4);
        assert_eq!(b2.stats.dimension, 16, "{:?}", b2.stats);
        for g in [&a1, &a1a1, &a2, &b2] {
            let alg = g.algebra.as_ref().unwrap();
            assert!(alg.relation_report().unwrap().max_residual < 1e-7);
            assert!(alg.associativity_residual(100, 5) < 1e-8);
        }
    }

    #[test]
    fn general_a2_matches_dihedral() {
        let p = sample_generic_parameters(6, 3).unwrap();
        let a2 = build_general_bmw(&CoxeterMatrix::type_a(2).unwrap(), &p, &MonodromyOptions::default(), EnumerationOptions::default()).unwrap();
        let d3 = build_dihedral_bmw(3, &p, &MonodromyOptions::default()).unwrap();
        let rep = compare_algebras(a2.algebra.as_ref().unwrap(), &d3.algebra).unwrap();
        assert_eq!(rep.rank, 15);
        assert!(rep.structure_residual < 1e-8, "{rep:?}");
        let sl = simply_laced_check(&a2).unwrap();
        assert!(sl.max_residual < 1e-7, "{:?}", sl.residuals);
    }

    #[test]
    fn general_hecke_is_group_order() {
        let p = sample_generic_classes_for(&CoxeterMatrix::type_a(3).unwrap());
        assert_eq!(general_hecke(&CoxeterMatrix::type_a(3).unwrap(), &p, EnumerationOptions::default()).unwrap().stats.dimension, 24);
        let b3 = CoxeterMatrix::new(vec![vec![1, 4, 2], vec![4, 1, 3], vec![2, 3, 1]]).unwrap();
        assert_eq!(general_hecke(&b3, &sample_generic_classes_for(&b3), EnumerationOptions::default()).unwrap().stats.dimension, 48);
    }

    fn sample_generic_classes_for(g: &CoxeterMatrix) -> ParameterSet {
        let n = *g.simple_reflection_classes().iter().max().unwrap() + 1;
        crate::params::sample_generic_classes(7, n, C64::new(0.05, 0.0)).unwrap()
    }

    #[test]
    fn dimensions_and_relations() {
        for (m, dim) in [(3, 15), (4, 16), (5, 35), (6, 30), (7, 63)] {
            let b = build(m, 10 + m as u64);
            assert_eq!(b.algebra.dim(), dim);
            let rep = b.algebra.relation_report().unwrap();
            assert!(rep.max_residual < 1e-7, "m={m}: {:?}", rep.residuals);
            assert!(b.algebra.associativity_residual(100, 1) < 1e-8);
            assert!(b.derived.max_residual < 1e-7);
        }
    }

    #[test]
    fn rewriting_examples() {
        let b = build(3, 1);
        let mono = b.monodromy();
        let (q, l) = (mono.q(0), mono.l(0));
        let alg = &b.algebra;
        assert_eq!(alg.normal_form(&w("x0 x0^-1")).unwrap().terms.len(), 1);
        assert!((alg.normal_form(&w("x0 x0^-1")).unwrap().coefficient(0) - one()).norm() < 1e-12);
        let e0 = alg.index_of(&w("E0")).unwrap();
        assert!((alg.normal_form(&w("x0 E0")).unwrap().coefficient(e0) - l.inv()).norm() < 1e-12);
        let nf = alg.normal_form(&w("E0 E1 E0")).unwrap();
        assert!((nf.coefficient(e0) - b.oracle.phi(0, &w("E1")).unwrap()).norm() < 1e-9);
        let nf = alg.normal_form(&w("x0 x0")).unwrap();
        let x0 = alg.index_of(&w("x0")).unwrap();
        assert!((nf.coefficient(x0) - (q - q.inv())).norm() < 1e-12);
        assert!((nf.coefficient(0) - one()).norm() < 1e-12);
        assert!((nf.coefficient(e0) - (q.inv() - q) * l.inv()).norm() < 1e-12);
    }

    #[test]
    fn bmw3_matches_table() {
        let b = build(3, 2);
        let rep = bmw3_comparison(&b).unwrap();
        assert!(rep.max_residual < 1e-7, "{:?}", rep.residuals);
    }

    #[test]
    fn hecke_quotient_dimensions_and_morphism() {
        for m in 3..=6 {
            let b = build(m, 3);
            let h = hecke_quotient(m, &b.params).unwrap();
            assert_eq!(h.dim(), 2 * m);
            assert!(h.relation_report().unwrap().max_residual < 1e-12);
            let images = hecke_projection(&b.algebra, &h);
            assert!(b.algebra.morphism_residual(&h, &images, 200, 7) < 1e-8);
        }
    }

    #[test]
    fn monodromy_factors_through() {
        for m in 3..=6 {
            let b = build(m, 4);
            let a = monodromy_assignment(b.monodromy());
            let rep = b.algebra.verify_representation(&a, 100, 3).unwrap();
            assert!(rep.max_residual < 1e-6, "m={m}: {:?}", rep.residuals);
        }
    }

    #[test]
    fn brauer_dimensions() {
        for m in [3, 5] {
            let p = sample_generic_parameters(1, m).unwrap();
            let d = brauer_dimension(m, &p).unwrap();
            assert_eq!(d.dimension, 2 * m + m * m);
            assert!(d.matches_bmw_count);
            let alg = build_brauer(m, &p).unwrap();
            assert!(alg.relation_report().unwrap().max_residual < 1e-12);
            assert!(alg.associativity_residual(100, 2) < 1e-10);
        }
        let p = sample_generic_parameters(1, 4).unwrap();
        let alg = build_brauer(4, &p).unwrap();
        assert!(alg.relation_report().unwrap().max_residual < 1e-12);
    }

    #[test]
    fn degeneration_is_linear() {
        let p = sample_generic_parameters(5, 3).unwrap();
        let rep = degeneration_check(3, &p, &[1e-2, 1e-3, 1e-4], 1e-12).unwrap();
        assert!(rep.monotone && rep.linear, "{rep:?}");
    }
}
