use bmw::algebra::{PresentedAlgebra, RANK_THRESHOLD};
use bmw::coxeter::{CoxeterMatrix, DihedralModel};
use bmw::enumeration::EnumerationOptions;
use bmw::kz::{monodromy_generators, MonodromyOptions, MonodromyResult};
use bmw::linalg::commutant_dimension;
use bmw::lk::{build_connection, verify_brauer_rep};
use bmw::params::{sample_generic_parameters, ParameterSet};
use bmw::phi::{PhiOracle, Sandwich};
use bmw::presentations::{
    brauer_dimension, build_brauer, build_dihedral_bmw, build_general_bmw, compare_algebras, degeneration_check,
    hecke_quotient, monodromy_assignment, simply_laced_check, DihedralBmw,
};
use bmw::verify::abelian_monodromy_residual;
use bmw::word::Word;
use bmw::C64;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

const SEEDS: std::ops::Range<u64> = 0..5;

type Outcome = Result<String, String>;

fn params(seed: u64, m: usize) -> ParameterSet {
    sample_generic_parameters(seed, m).expect("generic draw")
}

fn mono(m: usize, seed: u64) -> Result<MonodromyResult, String> {
    let model = DihedralModel::new(m).map_err(|e| e.to_string())?;
    monodromy_generators(&model, &params(seed, m), &MonodromyOptions::default()).map_err(|e| e.to_string())
}

fn draws() -> Result<Vec<(usize, u64, MonodromyResult)>, String> {
    let mut out = Vec::new();
    for m in [3, 5, 7, 4, 6] {
        for seed in SEEDS {
            out.push((m, seed, mono(m, seed)?));
        }
    }
    Ok(out)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cubic(draws: &[(usize, u64, MonodromyResult)]) -> Outcome {
    let worst = draws.iter().flat_map(|(_, _, r)| r.diagnostics.cubic_residual).fold(0.0, f64::max);
    check(worst < 1e-8, format!("max residual {worst:.2e} over m in {{3,5,7,4,6}} x 5 draws (< 1e-8)"))
}

fn projector_rank(draws: &[(usize, u64, MonodromyResult)]) -> Outcome {
    let ratio = draws.iter().flat_map(|(_, _, r)| r.diagnostics.rank_ratio).fold(0.0, f64::max);
    let pairing = draws
        .iter()
        .flat_map(|(_, _, r)| (0..2).map(move |i| (r.pairing[i] - r.tau(i)).norm()))
        .fold(0.0, f64::max);
    check(
        ratio < 1e-8 && pairing < 1e-8,
        format!("max sigma2/sigma1 {ratio:.2e}, max |w.u - tau| {pairing:.2e} (< 1e-8)"),
    )
}

fn braid(draws: &[(usize, u64, MonodromyResult)]) -> Outcome {
    let worst = draws.iter().map(|(_, _, r)| r.diagnostics.braid_residual).fold(0.0, f64::max);
    check(worst < 1e-7, format!("max braid residual {worst:.2e} (< 1e-7)"))
}

fn anchors(draws: &[(usize, u64, MonodromyResult)]) -> Outcome {
    let (mut e1, mut x1, mut tau) = (0.0_f64, 0.0_f64, 0.0_f64);
    for (_, _, r) in draws.iter().filter(|(m, _, _)| *m == 3) {
        let o = PhiOracle::new(Arc::new(r.clone()));
        let w = |s: &str| s.parse::<Word>().unwrap();
        e1 = e1.max((o.phi(0, &w("E1")).map_err(|e| e.to_string())? - 1.0).norm());
        x1 = x1.max((o.phi(0, &w("x1")).map_err(|e| e.to_string())? - r.l(0)).norm());
        tau = tau.max((o.phi(0, &Word::empty()).map_err(|e| e.to_string())? - r.tau(0)).norm());
    }
    check(
        e1 < 1e-7 && x1 < 1e-7 && tau < 1e-9,
        format!("|phi0(E1)-1| {e1:.2e}, |phi0(x1)-l| {x1:.2e}, |phi0()-tau| {tau:.2e}"),
    )
}

fn dimensions(algs: &[DihedralBmw]) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (b, want) in algs.iter().zip([15, 16, 35, 30]) {
        let rank = b.algebra.trace_form_rank(RANK_THRESHOLD);
        ok &= b.algebra.dim() == want && rank == want;
        parts.push(format!("m={}: dim {} rank {rank} (want {want})", b.m, b.algebra.dim()));
    }
    check(ok, parts.join(", "))
}

fn hecke(algs: &[DihedralBmw]) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for b in algs {
        let h = hecke_quotient(b.m, &b.params).map_err(|e| e.to_string())?;
        ok &= h.dim() == 2 * b.m;
        parts.push(format!("m={}: {}", b.m, h.dim()));
    }
    check(ok, parts.join(", "))
}

fn associativity(algs: &[(&str, &PresentedAlgebra)]) -> Outcome {
    let mut worst: f64 = 0.0;
    for (_, a) in algs {
        worst = worst.max(a.associativity_residual(100, 11));
    }
    let names: Vec<&str> = algs.iter().map(|(n, _)| *n).collect();
    check(worst < 1e-8, format!("max residual {worst:.2e} over {} (< 1e-8)", names.join(", ")))
}

fn factors_through(algs: &[DihedralBmw]) -> Outcome {
    let mut worst: f64 = 0.0;
    for b in algs.iter().filter(|b| b.m <= 5) {
        let rep = b
            .algebra
            .verify_representation(&monodromy_assignment(b.monodromy()), 100, 3)
            .map_err(|e| e.to_string())?;
        worst = worst.max(rep.max_residual);
    }
    check(worst < 1e-6, format!("max residual {worst:.2e} for m in {{3,4,5}} (< 1e-6)"))
}

fn degeneration() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for m in [3, 5] {
        let rep = degeneration_check(m, &params(1, m), &[1e-2, 1e-3, 1e-4], 1e-12).map_err(|e| e.to_string())?;
        let scaled: Vec<f64> = rep.deltas.iter().zip(&rep.kappas).map(|(d, k)| d[0].max(d[1]) / k).collect();
        let spread = scaled.iter().cloned().fold(0.0, f64::max) / scaled.iter().cloned().fold(f64::INFINITY, f64::min);
        let last = rep.decade_ratios.last().unwrap();
        ok &= rep.monotone && spread < 2.0 && last.iter().all(|r| (7.0..=13.0).contains(r));
        parts.push(format!("m={m}: Delta(1e-3)/Delta(1e-4) = {:.3}/{:.3}, Delta/kappa spread {spread:.3}", last[0], last[1]));
    }
    check(ok, parts.join("; "))
}

fn flatness_and_brauer() -> Outcome {
    let (mut flat, mut inv, mut rel) = (0.0_f64, 0.0_f64, 0.0_f64);
    for m in [3, 4, 5, 6] {
        let model = DihedralModel::new(m).unwrap();
        for seed in SEEDS {
            let p = params(seed, m);
            let c = build_connection(&model, &p).map_err(|e| e.to_string())?;
            flat = flat.max(c.flatness_residual);
            inv = inv.max(c.invariance_residual);
            rel = rel.max(verify_brauer_rep(&model, &p).map_err(|e| e.to_string())?.max_residual);
        }
    }
    check(
        flat < 1e-12 && inv < 1e-12 && rel < 1e-12,
        format!("flatness {flat:.2e}, invariance {inv:.2e}, Brauer relations {rel:.2e} (< 1e-12)"),
    )
}

fn brauer_dims() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for m in [3, 5] {
        let d = brauer_dimension(m, &params(2, m)).map_err(|e| e.to_string())?;
        ok &= d.dimension == 2 * m + m * m;
        parts.push(format!("m={m}: {}", d.dimension));
    }
    for m in [4, 6] {
        let d = brauer_dimension(m, &params(2, m)).map_err(|e| e.to_string())?;
        parts.push(format!(
            "m={m}: {} (rank {}, 2m+m^2/2 {}, m^2+m/2 {})",
            d.dimension, d.trace_rank, d.matches_bmw_count, d.matches_alternative
        ));
    }
    check(ok, parts.join(", "))
}

fn simply_laced(d3: &DihedralBmw) -> Outcome {
    let opts = MonodromyOptions::default();
    let a2 = build_general_bmw(&CoxeterMatrix::type_a(2).unwrap(), &d3.params, &opts, EnumerationOptions::default())
        .map_err(|e| e.to_string())?;
    let a2_rel = simply_laced_check(&a2).map_err(|e| e.to_string())?.max_residual;
    let cmp = compare_algebras(a2.algebra.as_ref().ok_or("A2 incomplete")?, &d3.algebra).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let a3 = build_general_bmw(&CoxeterMatrix::type_a(3).unwrap(), &d3.params, &opts, EnumerationOptions::default())
        .map_err(|e| e.to_string())?;
    let a3_rel = simply_laced_check(&a3).map_err(|e| e.to_string())?.max_residual;
    let a3_assoc = a3.algebra.as_ref().map_or(f64::INFINITY, |a| a.associativity_residual(100, 5));
    check(
        a2_rel < 1e-7 && a3_rel < 1e-7 && cmp.rank == 15 && cmp.structure_residual < 1e-8 && a3_assoc < 1e-8,
        format!(
            "A2 {a2_rel:.2e}, A3 {a3_rel:.2e} (dim {}, {:.1}s); A2 vs I2(3) rank {} residual {:.2e}, reordering {}",
            a3.stats.dimension,
            start.elapsed().as_secs_f64(),
            cmp.rank,
            cmp.structure_residual,
            cmp.is_reordering
        ),
    )
}

fn abelian() -> Outcome {
    let mut worst: f64 = 0.0;
    for kc in [C64::new(0.37, -0.11), C64::new(0.05, 0.0), C64::new(-0.8, 0.3)] {
        worst = worst.max(abelian_monodromy_residual(kc, 1e-12).map_err(|e| e.to_string())?);
    }
    check(worst < 1e-10, format!("max |T - exp(2 pi i kappa c)| {worst:.2e} (< 1e-10)"))
}

fn commutant(draws: &[(usize, u64, MonodromyResult)]) -> Outcome {
    let mut bad = Vec::new();
    for (m, seed, r) in draws {
        let want = if m % 2 == 1 { 1 } else { 2 };
        let got = commutant_dimension(&r.t, 1e-6);
        if got != want {
            bad.push(format!("m={m} seed={seed}: {got}"));
        }
    }
    check(bad.is_empty(), if bad.is_empty() { "odd 1, even 2 on all draws".into() } else { bad.join(", ") })
}

fn main() -> ExitCode {
    let start = Instant::now();
    let draws = match draws() {
        Ok(d) => d,
        Err(e) => {
            println!("monodromy pipeline failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    let algs: Vec<DihedralBmw> = [3, 4, 5, 6]
        .iter()
        .map(|&m| build_dihedral_bmw(m, &params(20 + m as u64, m), &MonodromyOptions::default()).expect("dihedral algebra"))
        .collect();
    let br3 = build_brauer(3, &params(2, 3)).expect("Brauer m=3");
    let br5 = build_brauer(5, &params(2, 5)).expect("Brauer m=5");
    let mut named: Vec<(String, &PresentedAlgebra)> = algs.iter().map(|b| (format!("BMW m={}", b.m), &b.algebra)).collect();
    named.push(("Brauer m=3".into(), &br3));
    named.push(("Brauer m=5".into(), &br5));
    let named_ref: Vec<(&str, &PresentedAlgebra)> = named.iter().map(|(n, a)| (n.as_str(), *a)).collect();

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("cubic annihilation", Box::new(|| cubic(&draws))),
        ("projector rank", Box::new(|| projector_rank(&draws))),
        ("monodromy braid relation", Box::new(|| braid(&draws))),
        ("m=3 sandwich anchors", Box::new(|| anchors(&draws))),
        ("dimensions and trace rank", Box::new(|| dimensions(&algs))),
        ("Hecke quotient", Box::new(|| hecke(&algs))),
        ("associativity and closure", Box::new(|| associativity(&named_ref))),
        ("monodromy factors through", Box::new(|| factors_through(&algs))),
        ("degeneration to Brauer data", Box::new(degeneration)),
        ("flatness and infinitesimal Brauer relations", Box::new(flatness_and_brauer)),
        ("Brauer dimensions", Box::new(brauer_dims)),
        ("simply laced comparison", Box::new(|| simply_laced(&algs[0]))),
        ("abelian monodromy oracle", Box::new(abelian)),
        ("commutant dimensions", Box::new(|| commutant(&draws))),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {name}: {detail} [{:.1}s]", k + 1, t.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} passed in {:.1}s", criteria.len() - failures, criteria.len(), start.elapsed().as_secs_f64());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
