//! Generator loops in the complexified dihedral arrangement complement,
//! parallel transport of the flat connection along them, and the monodromy
//! operators `T(σ_i)` with their rank-one projectors.

use crate::coxeter::{Arrangement2D, DihedralElement, DihedralModel};
use crate::error::{Error, Result};
use crate::linalg::{
    self, dist_max, eigenvalues, identity, multiset_deviation, norm_max, rank_one_factor, CMat, CVec,
    C64, I,
};
use crate::lk::{build_connection, iota, ConnectionData};
use crate::params::ParameterSet;
use crate::word::{alternating_word, Side};
use serde::Serialize;
use std::f64::consts::PI;

pub type Point = [C64; 2];

#[derive(Clone, Debug)]
pub enum Segment {
    Line { from: Point, to: Point },
    /// `η(t) = start − (1 − e^{iπt})(start − center)`.
    Arc { center: Point, start: Point },
}

impl Segment {
    pub fn point(&self, t: f64) -> Point {
        match self {
            Segment::Line { from, to } => [from[0] + (to[0] - from[0]) * t, from[1] + (to[1] - from[1]) * t],
            Segment::Arc { center, start } => {
                let f = 1.0 - (I * PI * t).exp();
                [start[0] - (start[0] - center[0]) * f, start[1] - (start[1] - center[1]) * f]
            }
        }
    }

    pub fn velocity(&self, t: f64) -> Point {
        match self {
            Segment::Line { from, to } => [to[0] - from[0], to[1] - from[1]],
            Segment::Arc { center, start } => {
                let d = I * PI * (I * PI * t).exp();
                [(start[0] - center[0]) * d, (start[1] - center[1]) * d]
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct PiecewisePath {
    pub segments: Vec<Segment>,
    pub base: Point,
    pub end: Point,
    pub eps: f64,
}

impl PiecewisePath {
    /// The path traversed backwards, each segment reparametrised by `t ↦ 1 − t`.
    pub fn reversed(&self) -> ReversedPath<'_> {
        ReversedPath(self)
    }
}

pub struct ReversedPath<'a>(&'a PiecewisePath);

fn real_point(p: [f64; 2]) -> Point {
    [C64::new(p[0], 0.0), C64::new(p[1], 0.0)]
}

fn apply_real(m: [[f64; 2]; 2], p: [f64; 2]) -> [f64; 2] {
    [m[0][0] * p[0] + m[0][1] * p[1], m[1][0] * p[0] + m[1][1] * p[1]]
}

/// Default base point: radius 1 on the chamber midline.
pub fn default_base_point(m: usize) -> [f64; 2] {
    let a = PI / (2.0 * m as f64);
    [a.cos(), a.sin()]
}

/// Crossing point `(p + s_i p)/2` of the segment from `p` to `s_i(p)`.
pub fn crossing_point(model: &DihedralModel, i: usize, p: [f64; 2]) -> [f64; 2] {
    let sp = apply_real(model.matrix(DihedralElement::Reflection(i)), p);
    [(p[0] + sp[0]) / 2.0, (p[1] + sp[1]) / 2.0]
}

/// Default detour radius: `1e-2` times the distance from `p` to the crossing point.
pub fn default_eps(model: &DihedralModel, i: usize, p: [f64; 2]) -> f64 {
    let c = crossing_point(model, i, p);
    1e-2 * ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt()
}

const PATH_SAMPLES: usize = 400;

/// `p → p′ → (half circle) → p″ → s_i(p)` with `p′, p″` at distance `ε`
/// from the crossing point.
pub fn build_generator_path(model: &DihedralModel, i: usize, p: [f64; 2], eps: f64) -> Result<PiecewisePath> {
    let m = model.m();
    if i >= m {
        return Err(Error::IndexOutOfRange { index: i, size: m });
    }
    let arr = Arrangement2D::new(m);
    let (_, d0) = arr.min_abs(&real_point(p), None);
    if d0 <= 0.0 || !(eps > 0.0) {
        return Err(Error::Invalid("base point on a hyperplane or eps not positive".into()));
    }
    let s = model.matrix(DihedralElement::Reflection(i));
    let sp = apply_real(s, p);
    let c = crossing_point(model, i, p);
    let dist = ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt();
    if eps >= dist {
        return Err(Error::EpsTooLarge { hyperplane: i });
    }
    let pp = [c[0] + eps * (p[0] - c[0]) / dist, c[1] + eps * (p[1] - c[1]) / dist];
    let ppp = apply_real(s, pp);
    let segments = vec![
        Segment::Line { from: real_point(p), to: real_point(pp) },
        Segment::Arc { center: real_point(c), start: real_point(pp) },
        Segment::Line { from: real_point(ppp), to: real_point(sp) },
    ];
    for (si, seg) in segments.iter().enumerate() {
        for k in 0..=PATH_SAMPLES {
            let t = k as f64 / PATH_SAMPLES as f64;
            let x = seg.point(t);
            let skip = if si == 1 { Some(i) } else { None };
            let (j, d) = arr.min_abs(&x, skip);
            if d <= eps / 2.0 {
                return Err(Error::EpsTooLarge { hyperplane: j });
            }
        }
    }
    Ok(PiecewisePath { segments, base: real_point(p), end: real_point(sp), eps })
}

/// Outcome of an integration: final value, accumulated local error estimate
/// and the number of accepted steps.
#[derive(Clone, Debug)]
pub struct Transport {
    pub matrix: CMat,
    pub error_estimate: f64,
    pub steps: usize,
}

const MAX_STEPS: usize = 2_000_000;

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Solve `Y′ = A(t)·Y` on `[0, 1]` from `Y(0) = y0` with an adaptive
/// Dormand–Prince pair, mixed absolute/relative local tolerance `tol`.
pub fn integrate_linear(y0: CMat, a: impl Fn(f64) -> CMat, tol: f64) -> Result<Transport> {
    let fail = |t: f64, reason: &str| Error::Integration { segment: 0, t, reason: reason.into() };
    let mut y = y0;
    let mut t = 0.0;
    let mut h = 1e-3_f64;
    let mut err_total = 0.0;
    let mut steps = 0;
    let mut k: Vec<CMat> = Vec::with_capacity(7);
    let mut k1 = &a(0.0) * &y;
    while 1.0 - t > 1e-15 {
        if steps > MAX_STEPS {
            return Err(fail(t, "too many steps"));
        }
        if h < 1e-14 {
            return Err(fail(t, "step size underflow"));
        }
        h = h.min(1.0 - t);
        k.clear();
        k.push(k1.clone());
        for s in 1..7 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate() {
                if A[s][j] != 0.0 {
                    ys += kj * C64::new(h * A[s][j], 0.0);
                }
            }
            k.push(a(t + C[s] * h) * ys);
        }
        let mut y_new = y.clone();
        for (j, kj) in k.iter().take(6).enumerate() {
            if A[6][j] != 0.0 {
                y_new += kj * C64::new(h * A[6][j], 0.0);
            }
        }
        let mut err = CMat::zeros(y.nrows(), y.ncols());
        for (j, kj) in k.iter().enumerate() {
            if E[j] != 0.0 {
                err += kj * C64::new(h * E[j], 0.0);
            }
        }
        let ratio = err
            .iter()
            .zip(y.iter().zip(y_new.iter()))
            .map(|(e, (a0, a1))| e.norm() / (tol * (1.0 + a0.norm().max(a1.norm()))))
            .fold(0.0, f64::max);
        if !ratio.is_finite() || y_new.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            if h < 1e-12 {
                return Err(fail(t, "non-finite values"));
            }
            h *= 0.1;
            continue;
        }
        if ratio <= 1.0 {
            t += h;
            y = y_new;
            k1 = k[6].clone();
            err_total += norm_max(&err);
            steps += 1;
        }
        let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Ok(Transport { matrix: y, error_estimate: err_total, steps })
}

/// Connection matrix `Σ_j X_j f_j(γ′)/f_j(γ)` at a point with velocity.
pub fn connection_at(conn: &ConnectionData, x: &Point, v: &Point) -> CMat {
    let n = conn.coefficients[0].nrows();
    let mut out = CMat::zeros(n, n);
    for (j, xj) in conn.coefficients.iter().enumerate() {
        let w = conn.arrangement.eval(j, v) / conn.arrangement.eval(j, x);
        out += xj * w;
    }
    out
}

fn transport_segments(
    conn: &ConnectionData,
    segs: &[(usize, &Segment)],
    reverse: bool,
    tol: f64,
) -> Result<Transport> {
    let n = conn.coefficients[0].nrows();
    let mut total = Transport { matrix: identity(n), error_estimate: 0.0, steps: 0 };
    for (idx, seg) in segs {
        let sign = if reverse { -1.0 } else { 1.0 };
        let res = integrate_linear(
            identity(n),
            |t| {
                let tt = if reverse { 1.0 - t } else { t };
                let mut v = seg.velocity(tt);
                v[0] *= sign;
                v[1] *= sign;
                connection_at(conn, &seg.point(tt), &v)
            },
            tol,
        )
        .map_err(|e| match e {
            Error::Integration { t, reason, .. } => Error::Integration { segment: *idx, t, reason },
            other => other,
        })?;
        total.matrix = res.matrix * total.matrix;
        total.error_estimate += res.error_estimate;
        total.steps += res.steps;
    }
    Ok(total)
}

/// Parallel transport along `path`, from its base point to its end.
pub fn parallel_transport(conn: &ConnectionData, path: &PiecewisePath, tol: f64) -> Result<Transport> {
    let segs: Vec<(usize, &Segment)> = path.segments.iter().enumerate().collect();
    transport_segments(conn, &segs, false, tol)
}

/// Parallel transport along the reversed path, from its end back to its base.
pub fn parallel_transport_reversed(conn: &ConnectionData, path: &ReversedPath<'_>, tol: f64) -> Result<Transport> {
    let segs: Vec<(usize, &Segment)> = path.0.segments.iter().enumerate().rev().collect();
    transport_segments(conn, &segs, true, tol)
}

#[derive(Clone, Debug)]
pub struct MonodromyOptions {
    pub base: Option<[f64; 2]>,
    pub eps: Option<f64>,
    pub tol: f64,
}

impl Default for MonodromyOptions {
    fn default() -> Self {
        Self { base: None, eps: None, tol: 1e-12 }
    }
}

pub const SPECTRUM_TOL: f64 = 1e-6;
pub const BRAID_TOL: f64 = 1e-6;
pub const RANK_RATIO_TOL: f64 = 1e-6;
pub const TAU_MIN: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Projector {
    pub e: CMat,
    pub u: CVec,
    pub w: CVec,
    pub ratio: f64,
    /// `w·u`, which should equal `τ`.
    pub pairing: C64,
}

/// `e = l/(q⁻¹−q)·(T−q)(T+q⁻¹)` and its rank-one factors.
pub fn projector_from_monodromy(t: &CMat, q: C64, l: C64, generator: usize) -> Result<Projector> {
    let n = t.nrows();
    let id = identity(n);
    let e = (t - &id * q) * (t + &id * q.inv()) * (l / (q.inv() - q));
    let (u, w, ratio) = rank_one_factor(&e);
    let pairing = w.iter().zip(u.iter()).map(|(a, b)| a * b).sum::<C64>();
    let sigma1 = norm_max(&e);
    if !(sigma1 > 0.0) || !(ratio < RANK_RATIO_TOL) || pairing.norm() < TAU_MIN {
        return Err(Error::ProjectorRank { generator, ratio, tau_abs: pairing.norm() });
    }
    Ok(Projector { e, u, w, ratio, pairing })
}

/// Expected eigenvalues of `T(σ_i)`: `l⁻¹` once, `q` and `−q⁻¹` with the
/// multiplicities of `±1` eigenvalues of `ι(s_i)` (one `+1` consumed by `l⁻¹`).
pub fn expected_spectrum(model: &DihedralModel, params: &ParameterSet, i: usize) -> Vec<C64> {
    let m = model.m();
    let c = model.class_of(i);
    let (q, l) = (params.q(c), params.l(c));
    let fixed = (0..m)
        .filter(|&j| model.act_on_line(DihedralElement::Reflection(i), j) == j)
        .count();
    let n_plus = fixed + (m - fixed) / 2;
    let n_minus = (m - fixed) / 2;
    let mut out = vec![l.inv()];
    out.extend(std::iter::repeat(q).take(n_plus - 1));
    out.extend(std::iter::repeat(-q.inv()).take(n_minus));
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct MonodromyDiagnostics {
    pub braid_residual: f64,
    pub cubic_residual: [f64; 2],
    pub rank_ratio: [f64; 2],
    pub spectrum_deviation: [f64; 2],
    pub determinant_deviation: [f64; 2],
    pub error_estimate: f64,
    pub steps: usize,
    pub flatness_residual: f64,
}

#[derive(Clone, Debug)]
pub struct MonodromyResult {
    pub m: usize,
    pub params: ParameterSet,
    pub t: [CMat; 2],
    pub t_inv: [CMat; 2],
    pub e: [CMat; 2],
    pub u: [CVec; 2],
    pub w: [CVec; 2],
    /// `w_i·u_i`.
    pub pairing: [C64; 2],
    pub spectra: [Vec<C64>; 2],
    pub diagnostics: MonodromyDiagnostics,
}

impl MonodromyResult {
    pub fn dim(&self) -> usize {
        self.t[0].nrows()
    }

    pub fn q(&self, i: usize) -> C64 {
        self.params.q(self.class(i))
    }

    pub fn l(&self, i: usize) -> C64 {
        self.params.l(self.class(i))
    }

    pub fn tau(&self, i: usize) -> C64 {
        self.params.tau(self.class(i))
    }

    pub fn class(&self, i: usize) -> usize {
        if self.m % 2 == 1 {
            0
        } else {
            i % 2
        }
    }
}

/// `ι(s_i)·P(l_i)`.
pub fn generator_monodromy(
    model: &DihedralModel,
    conn: &ConnectionData,
    i: usize,
    base: [f64; 2],
    eps: Option<f64>,
    tol: f64,
) -> Result<(CMat, Transport)> {
    let eps = eps.unwrap_or_else(|| default_eps(model, i, base));
    let path = build_generator_path(model, i, base, eps)?;
    let tr = parallel_transport(conn, &path, tol)?;
    Ok((iota(model, DihedralElement::Reflection(i)) * &tr.matrix, tr))
}

pub fn cubic_residual(t: &CMat, q: C64, l: C64) -> f64 {
    let id = identity(t.nrows());
    norm_max(&((t - &id * l.inv()) * (t - &id * q) * (t + &id * q.inv())))
}

pub fn braid_residual(t0: &CMat, t1: &CMat, m: usize) -> f64 {
    let n = t0.nrows();
    let mats = [t0, t1];
    let w = |a: usize, b: usize| {
        linalg::product(n, alternating_word(a, b, m, Side::Left).into_iter().map(|g| mats[g]))
    };
    dist_max(&w(0, 1), &w(1, 0))
}

fn determinant_deviation(t: &CMat, expected: &[C64]) -> f64 {
    let d = t.clone().determinant();
    let e: C64 = expected.iter().product();
    (d - e).norm()
}

pub fn monodromy_generators(model: &DihedralModel, params: &ParameterSet, opts: &MonodromyOptions) -> Result<MonodromyResult> {
    let m = model.m();
    let conn = build_connection(model, params)?;
    let base = opts.base.unwrap_or_else(|| default_base_point(m));
    let arr = Arrangement2D::new(m);
    if !arr.in_base_chamber(base[0], base[1]) {
        return Err(Error::Invalid("base point must lie in the open base chamber".into()));
    }
    let (g0, g1) = std::thread::scope(|s| {
        let h = s.spawn(|| generator_monodromy(model, &conn, 1, base, opts.eps, opts.tol));
        let g0 = generator_monodromy(model, &conn, 0, base, opts.eps, opts.tol);
        (g0, h.join().expect("monodromy thread panicked"))
    });
    let ((t0, tr0), (t1, tr1)) = (g0?, g1?);
    let ts = [t0, t1];

    let mut spectra: [Vec<C64>; 2] = Default::default();
    let mut spectrum_deviation = [0.0; 2];
    let mut determinant_dev = [0.0; 2];
    let mut cubic = [0.0; 2];
    for i in 0..2 {
        let c = model.class_of(i);
        let expected = expected_spectrum(model, params, i);
        spectra[i] = eigenvalues(&ts[i]);
        spectrum_deviation[i] = multiset_deviation(&spectra[i], &expected);
        if spectrum_deviation[i] > SPECTRUM_TOL {
            return Err(Error::SpectrumMismatch { generator: i, deviation: spectrum_deviation[i] });
        }
        determinant_dev[i] = determinant_deviation(&ts[i], &expected);
        cubic[i] = cubic_residual(&ts[i], params.q(c), params.l(c));
    }
    let braid = braid_residual(&ts[0], &ts[1], m);
    if braid > BRAID_TOL {
        return Err(Error::BraidResidual { residual: braid, threshold: BRAID_TOL });
    }
    let mut projs = Vec::with_capacity(2);
    for i in 0..2 {
        let c = model.class_of(i);
        projs.push(projector_from_monodromy(&ts[i], params.q(c), params.l(c), i)?);
    }
    let t_inv = [
        ts[0].clone().try_inverse().ok_or_else(|| Error::Invalid("T(sigma_0) singular".into()))?,
        ts[1].clone().try_inverse().ok_or_else(|| Error::Invalid("T(sigma_1) singular".into()))?,
    ];
    let (p0, p1) = (projs.remove(0), projs.remove(0));
    Ok(MonodromyResult {
        m,
        params: params.clone(),
        diagnostics: MonodromyDiagnostics {
            braid_residual: braid,
            cubic_residual: cubic,
            rank_ratio: [p0.ratio, p1.ratio],
            spectrum_deviation,
            determinant_deviation: determinant_dev,
            error_estimate: tr0.error_estimate + tr1.error_estimate,
            steps: tr0.steps + tr1.steps,
            flatness_residual: conn.flatness_residual,
        },
        t: ts,
        t_inv,
        pairing: [p0.pairing, p1.pairing],
        e: [p0.e, p1.e],
        u: [p0.u, p1.u],
        w: [p0.w, p1.w],
        spectra,
    })
}
