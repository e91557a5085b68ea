use bmw::coxeter::{CoxeterMatrix, DihedralModel};
use bmw::enumeration::EnumerationOptions;
use bmw::kz::{monodromy_generators, MonodromyOptions};
use bmw::params::{sample_generic_classes, sample_generic_parameters};
use bmw::phi::{PhiOracle, Sandwich};
use bmw::presentations::{build_dihedral_bmw, build_general_bmw, hecke_quotient, DihedralBmw};
use bmw::word::{Letter, Word};
use bmw::C64;
use proptest::prelude::*;
use std::sync::{Arc, OnceLock};

fn algebra(m: usize) -> &'static DihedralBmw {
    static CACHE: OnceLock<Vec<DihedralBmw>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        (3..=6)
            .map(|m| build_dihedral_bmw(m, &sample_generic_parameters(40 + m as u64, m).unwrap(), &MonodromyOptions::default()).unwrap())
            .collect()
    });
    &all[m - 3]
}

fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![
        (0..2usize).prop_map(Letter::X),
        (0..2usize).prop_map(Letter::XInv),
        (0..2usize).prop_map(Letter::E),
    ]
}

fn word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(letter(), 0..=max).prop_map(Word)
}

fn positive_word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(prop_oneof![(0..2usize).prop_map(Letter::X), (0..2usize).prop_map(Letter::E)], 0..=max).prop_map(Word)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn monodromy_invariants(seed in 0u64..10_000, m in 3usize..=8) {
        let p = sample_generic_parameters(seed, m).unwrap();
        let r = monodromy_generators(&DihedralModel::new(m).unwrap(), &p, &MonodromyOptions::default()).unwrap();
        for i in 0..2 {
            prop_assert!(r.diagnostics.cubic_residual[i] < 1e-8);
            prop_assert!(r.diagnostics.rank_ratio[i] < 1e-8);
            prop_assert!(r.spectra[i].iter().any(|z| (z - r.l(i).inv()).norm() < 1e-6));
        }
        prop_assert!(r.diagnostics.braid_residual < 1e-7);
    }

    #[test]
    fn normal_forms_multiply(m in 3usize..=6, a in word(6), b in word(6)) {
        let alg = &algebra(m).algebra;
        let ab = alg.normal_form(&a.concat(&b)).unwrap();
        let prod = alg.multiply(&alg.normal_form(&a).unwrap(), &alg.normal_form(&b).unwrap());
        let n = alg.dim();
        let diff = (ab.to_dense(n) - prod.to_dense(n)).camax();
        let scale = 1.0 + ab.to_dense(n).camax();
        prop_assert!(diff < 1e-8 * scale, "diff {diff}");
    }

    #[test]
    fn sandwich_absorbs_generators(m in 3usize..=6, x in positive_word(4), i in 0usize..2) {
        let b = algebra(m);
        let o: &PhiOracle = &b.oracle;
        let mono = o.monodromy();
        let base = o.phi(i, &x).unwrap();
        let scale = 1.0 + base.norm();
        let left = Word([Letter::X(i)].into_iter().chain(x.0.iter().copied()).collect());
        let right = Word(x.0.iter().copied().chain([Letter::X(i)]).collect());
        let idem = Word([Letter::E(i)].into_iter().chain(x.0.iter().copied()).collect());
        prop_assert!((o.phi(i, &left).unwrap() - mono.l(i).inv() * base).norm() < 1e-8 * scale);
        prop_assert!((o.phi(i, &right).unwrap() - mono.l(i).inv() * base).norm() < 1e-8 * scale);
        prop_assert!((o.phi(i, &idem).unwrap() - mono.tau(i) * base).norm() < 1e-8 * scale);
    }

    #[test]
    fn hecke_quadratic_has_no_e_terms(m in 3usize..=8, seed in 0u64..1000, i in 0usize..2) {
        let p = sample_generic_parameters(seed, m).unwrap();
        let h = hecke_quotient(m, &p).unwrap();
        let q = p.q(if m % 2 == 1 { 0 } else { i });
        let nf = h.normal_form(&Word(vec![Letter::X(i), Letter::X(i)])).unwrap();
        let xi = h.index_of(&Word(vec![Letter::X(i)])).unwrap();
        prop_assert!((nf.coefficient(xi) - (q - q.inv())).norm() < 1e-12);
        prop_assert!((nf.coefficient(0) - 1.0).norm() < 1e-12);
        prop_assert_eq!(nf.terms.len(), 2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn rank_two_enumeration_dimension(m in 2usize..=6, seed in 0u64..1000) {
        let g = CoxeterMatrix::dihedral(m).unwrap();
        let n = g.simple_reflection_classes().iter().max().unwrap() + 1;
        let p = sample_generic_classes(seed, n, C64::new(0.05, 0.0)).unwrap();
        let b = build_general_bmw(&g, &p, &MonodromyOptions::default(), EnumerationOptions::default()).unwrap();
        let want = match m {
            2 => 9,
            m if m % 2 == 1 => 2 * m + m * m,
            m => 2 * m + m * m / 2,
        };
        prop_assert_eq!(b.stats.dimension, want);
    }
}

#[test]
fn thousand_draws_pass_the_spectrum_check() {
    let model = DihedralModel::new(5).unwrap();
    let opts = MonodromyOptions::default();
    let failures: Vec<u64> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..4u64)
            .map(|t| {
                let (model, opts) = (&model, &opts);
                s.spawn(move || {
                    (t * 250..(t + 1) * 250)
                        .filter(|&seed| {
                            let p = sample_generic_parameters(seed, 5).unwrap();
                            monodromy_generators(model, &p, opts).is_err()
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    assert!(failures.is_empty(), "seeds failing: {failures:?}");
}

#[test]
fn odd_oracle_is_shared_between_generators() {
    let b = algebra(5);
    let o = Arc::clone(&b.oracle);
    let x: Word = "x0 x1 E0".parse().unwrap();
    assert!((o.phi(0, &x).unwrap() - o.phi(1, &x.relabel(&[1, 0])).unwrap()).norm() < 1e-8);
}
