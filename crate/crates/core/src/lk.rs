//! The permutation representation `ι` on the span of hyperplane vectors, the
//! rank-one projectors `p_i` and the flat connection they define.

use crate::coxeter::{Arrangement2D, DihedralElement, DihedralModel};
use crate::error::{Error, Result};
use crate::linalg::{self, commutator, identity, norm_max, CMat, C64};
use crate::params::ParameterSet;
use crate::word::{alternating_word, Side};
use serde::Serialize;
use std::collections::BTreeMap;

/// Named square matrices of a common dimension.
#[derive(Clone, Debug)]
pub struct MatrixRep {
    pub dim: usize,
    pub assign: BTreeMap<String, CMat>,
}

impl MatrixRep {
    pub fn new(dim: usize) -> Self {
        Self { dim, assign: BTreeMap::new() }
    }

    pub fn insert(&mut self, name: impl Into<String>, mat: CMat) -> Result<()> {
        if mat.nrows() != self.dim || mat.ncols() != self.dim {
            return Err(Error::Invalid(format!(
                "matrix {}x{} does not match representation dimension {}",
                mat.nrows(),
                mat.ncols(),
                self.dim
            )));
        }
        self.assign.insert(name.into(), mat);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&CMat> {
        self.assign.get(name)
    }

    pub fn matrices(&self) -> Vec<CMat> {
        self.assign.values().cloned().collect()
    }

    pub fn commutant_dimension(&self, rel: f64) -> usize {
        linalg::commutant_dimension(&self.matrices(), rel)
    }
}

/// `ι(w)` with `ι(w) v_j = v_{w(j)}`.
pub fn iota(model: &DihedralModel, w: DihedralElement) -> CMat {
    let m = model.m();
    let mut p = CMat::zeros(m, m);
    for j in 0..m {
        p[(model.act_on_line(w, j), j)] = C64::new(1.0, 0.0);
    }
    p
}

/// `ι` of a word in the simple reflections `s_0, s_1`.
pub fn iota_word(model: &DihedralModel, word: &[usize]) -> CMat {
    iota(model, model.from_generators(word))
}

pub fn build_iota(model: &DihedralModel) -> MatrixRep {
    let mut rep = MatrixRep::new(model.m());
    for g in 0..2 {
        rep.insert(format!("s{g}"), iota(model, DihedralElement::Reflection(g)))
            .expect("dimension m");
    }
    rep
}

fn check_classes(model: &DihedralModel, params: &ParameterSet) -> Result<()> {
    if params.num_classes() != model.num_classes() {
        return Err(Error::Invalid(format!(
            "m = {} needs {} parameter classes, got {}",
            model.m(),
            model.num_classes(),
            params.num_classes()
        )));
    }
    Ok(())
}

/// Sum of `k_{class(t)}` over reflections `t` with `t(H_j) = H_i`.
pub fn reflection_weight(model: &DihedralModel, params: &ParameterSet, i: usize, j: usize) -> C64 {
    (0..model.m())
        .filter(|&t| model.act_on_line(DihedralElement::Reflection(t), j) == i)
        .map(|t| params.k(model.class_of(t)))
        .sum()
}

/// `p_i`: supported on row `i`, diagonal entry `α_{class(i)}`.
pub fn build_projector(model: &DihedralModel, params: &ParameterSet, i: usize) -> Result<CMat> {
    check_classes(model, params)?;
    let m = model.m();
    if i >= m {
        return Err(Error::IndexOutOfRange { index: i, size: m });
    }
    let mut p = CMat::zeros(m, m);
    for j in 0..m {
        p[(i, j)] = if j == i {
            params.alpha(model.class_of(i))
        } else {
            reflection_weight(model, params, i, j)
        };
    }
    Ok(p)
}

/// LK extension: `S_g ↦ ι(s_g)`, `E_g ↦ p_g` for `g ∈ {0, 1}`.
pub fn build_lk_rep(model: &DihedralModel, params: &ParameterSet) -> Result<MatrixRep> {
    let mut rep = build_iota(model);
    for g in 0..2 {
        rep.insert(format!("E{g}"), build_projector(model, params, g)?)?;
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub residuals: BTreeMap<String, f64>,
    pub max_residual: f64,
}

impl RelationReport {
    pub fn new() -> Self {
        Self { residuals: BTreeMap::new(), max_residual: 0.0 }
    }

    pub fn record(&mut self, name: impl Into<String>, r: f64) {
        let e = self.residuals.entry(name.into()).or_insert(0.0);
        *e = e.max(r);
        self.max_residual = self.max_residual.max(r);
    }
}

impl Default for RelationReport {
    fn default() -> Self {
        Self::new()
    }
}

/// Evaluate the Brauer-type relations under `S_g ↦ ι(s_g)`, `E_g ↦ p_g`.
///
/// For even `m = 2k` the two-term sandwich relation is checked for
/// `1 ≤ l ≤ k−1`; at `l = k` it is implied by the fixing relation instead.
pub fn verify_brauer_rep(model: &DihedralModel, params: &ParameterSet) -> Result<RelationReport> {
    let m = model.m();
    let s = [iota_word(model, &[0]), iota_word(model, &[1])];
    let e = [build_projector(model, params, 0)?, build_projector(model, params, 1)?];
    let alt = |a: usize, b: usize, len: usize| iota_word(model, &alternating_word(a, b, len, Side::Left));
    let id = identity(m);
    let mut rep = RelationReport::new();
    for i in 0..2 {
        let j = 1 - i;
        let alpha = params.alpha(model.class_of(i));
        rep.record("1", norm_max(&(&s[i] * &s[i] - &id)));
        rep.record("2", norm_max(&(alt(i, j, m) - alt(j, i, m))));
        rep.record("3", norm_max(&(&s[i] * &e[i] - &e[i])).max(norm_max(&(&e[i] * &s[i] - &e[i]))));
        rep.record("4", norm_max(&(&e[i] * &e[i] - &e[i] * alpha)));
        if m == 2 {
            rep.record("5", norm_max(&commutator(&s[i], &e[j])));
            rep.record("6", norm_max(&commutator(&e[i], &e[j])));
        } else if m % 2 == 0 {
            let k = m / 2;
            let w = alt(j, i, 2 * k - 1);
            rep.record("7", norm_max(&(&w * &e[i] - &e[i])).max(norm_max(&(&e[i] * &w - &e[i]))));
            for len in 0..=m {
                for start in [i, j] {
                    let w = iota_word(model, &alternating_word(start, 1 - start, len, Side::Left));
                    rep.record("8", norm_max(&(&e[i] * w * &e[j])));
                }
            }
            for l in 1..k {
                let sw = alternating_word(j, i, 2 * l - 1, Side::Left);
                let sp = alternating_word(j, i, 2 * (k + l) - 1, Side::Left);
                let class = |w: &[usize]| match model.from_generators(w) {
                    DihedralElement::Reflection(t) => model.class_of(t),
                    DihedralElement::Rotation(_) => unreachable!("odd length word"),
                };
                let coeff = params.k(class(&sw)) + params.k(class(&sp));
                let lhs = &e[i] * iota_word(model, &sw) * &e[i];
                rep.record("9", norm_max(&(lhs - &e[i] * coeff)));
            }
        } else {
            let k = (m - 1) / 2;
            for l in 1..=k {
                let w = alt(j, i, 2 * l - 1);
                let eps = if l % 2 == 1 { i } else { j };
                let coeff = params.k(model.class_of(eps));
                rep.record("10", norm_max(&(&e[i] * w * &e[i] - &e[i] * coeff)));
            }
            let w = alt(i, j, 2 * k);
            rep.record("11", norm_max(&(&w * &e[i] - &e[j] * &w)));
        }
    }
    Ok(rep)
}

/// Coefficient matrices `X_i = κ(k_{class(i)} ι(s_i) − p_i)` with flatness and
/// invariance residuals.
#[derive(Clone, Debug)]
pub struct ConnectionData {
    pub arrangement: Arrangement2D,
    pub kappa: C64,
    pub coefficients: Vec<CMat>,
    pub flatness_residual: f64,
    pub invariance_residual: f64,
}

pub const FLATNESS_TOL: f64 = 1e-12;

pub fn connection_coefficients(model: &DihedralModel, params: &ParameterSet) -> Result<Vec<CMat>> {
    (0..model.m())
        .map(|i| {
            let k = params.k(model.class_of(i));
            let s = iota(model, DihedralElement::Reflection(i));
            Ok((s * k - build_projector(model, params, i)?) * params.kappa)
        })
        .collect()
}

pub fn flatness_residual(coefficients: &[CMat]) -> f64 {
    let total = coefficients.iter().skip(1).fold(coefficients[0].clone(), |acc, x| acc + x);
    coefficients
        .iter()
        .map(|x| norm_max(&commutator(x, &total)))
        .fold(0.0, f64::max)
}

pub fn invariance_residual(model: &DihedralModel, coefficients: &[CMat]) -> f64 {
    let mut worst: f64 = 0.0;
    for w in model.elements() {
        let g = iota(model, w);
        let ginv = iota(model, model.inverse(w));
        for (i, x) in coefficients.iter().enumerate() {
            let lhs = &g * x * &ginv;
            worst = worst.max(norm_max(&(lhs - &coefficients[model.act_on_line(w, i)])));
        }
    }
    worst
}

pub fn build_connection(model: &DihedralModel, params: &ParameterSet) -> Result<ConnectionData> {
    let coefficients = connection_coefficients(model, params)?;
    let flat = flatness_residual(&coefficients);
    let scale = coefficients.iter().map(norm_max).fold(1.0, f64::max);
    if flat > FLATNESS_TOL * scale * scale {
        return Err(Error::NotFlat { residual: flat });
    }
    let invariance_residual = invariance_residual(model, &coefficients);
    Ok(ConnectionData {
        arrangement: Arrangement2D::new(model.m()),
        kappa: params.kappa,
        coefficients,
        flatness_residual: flat,
        invariance_residual,
    })
}
