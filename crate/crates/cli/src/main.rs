use bmw::coxeter::{CoxeterMatrix, DihedralModel};
use bmw::enumeration::EnumerationOptions;
use bmw::json::{complex_value, matrix_value, StructureConstants};
use bmw::kz::{monodromy_generators, MonodromyOptions, MonodromyResult};
use bmw::params::{sample_generic_classes, sample_generic_parameters, ParameterSet, DEFAULT_KAPPA};
use bmw::phi::{positive_words, PhiOracle, Sandwich};
use bmw::presentations::{
    brauer_dimension, build_brauer, build_dihedral_bmw_from_oracle, build_general_bmw, general_hecke, hecke_quotient,
};
use bmw::verify::{run_verify_suite, VerifyConfig, DEFAULT_MS};
use bmw::word::Word;
use bmw::C64;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

/// Thread count for the verification runner.
const THREADS_ENV: &str = "BMW_THREADS";

#[derive(Parser)]
#[command(name = "bmw", version, about = "Dihedral and Coxeter BMW algebras from KZ monodromy")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Parameter file: {"kappa": [re, im], "classes": [{"k": .., "alpha": ..}]}
    #[arg(long, global = true)]
    params: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relation residual tolerance.
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol: f64,
    /// Integrator tolerance.
    #[arg(long = "ode-tol", global = true, default_value_t = 1e-12)]
    ode_tol: f64,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include wall-clock timings (output is then not reproducible).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Monodromy generators, projectors and diagnostics.
    Monodromy {
        #[arg(long)]
        m: usize,
        /// Radius of the arcs around the hyperplanes.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Sandwich scalars.
    Phi {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, conflicts_with = "dump")]
        word: Option<String>,
        #[arg(long)]
        dump: bool,
        #[arg(long, default_value_t = 3)]
        maxlen: usize,
    },
    /// Build an algebra and report its invariants.
    Algebra {
        #[arg(long, conflicts_with = "coxeter", required_unless_present = "coxeter")]
        dihedral: Option<usize>,
        #[arg(long)]
        coxeter: Option<PathBuf>,
        /// Real value replacing kappa.
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Export the structure constants.
        #[arg(long)]
        structure: Option<PathBuf>,
    },
    /// Dihedral Brauer algebra.
    Brauer {
        #[arg(long)]
        m: usize,
    },
    /// Run the verification suite.
    Verify {
        #[arg(long = "m", value_delimiter = ',')]
        ms: Vec<usize>,
    },
    /// Parameter summary with derived quantities and genericity.
    Report {
        #[arg(long)]
        m: Option<usize>,
    },
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<bmw::Error> for Failure {
    fn from(e: bmw::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

type Outcome = Result<(Value, bool), Failure>;

fn load_params(g: &Global) -> Result<Option<ParameterSet>, Failure> {
    let Some(path) = &g.params else { return Ok(None) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read parameter file {}: {e}", path.display())))?;
    ParameterSet::from_json(&text)
        .map(Some)
        .map_err(|e| Failure::Usage(format!("invalid parameter file {}: {e}", path.display())))
}

fn dihedral_params(g: &Global, m: usize) -> Result<ParameterSet, Failure> {
    let p = match load_params(g)? {
        Some(p) => p,
        None => sample_generic_parameters(g.seed, m)?,
    };
    let need = DihedralModel::new(m)?.num_classes();
    if p.num_classes() != need {
        return Err(Failure::Usage(format!("m = {m} needs {need} parameter classes, got {}", p.num_classes())));
    }
    if !p.is_generic() {
        eprintln!("warning: parameters are not generic (margin {:e})", p.genericity_margin());
    }
    Ok(p)
}

fn derived_value(p: &ParameterSet) -> Value {
    let classes: Vec<Value> = (0..p.num_classes())
        .map(|c| {
            let d = p.derived(c);
            json!({
                "q": complex_value(d.q),
                "l": complex_value(d.l),
                "tau": complex_value(d.tau),
                "nu": complex_value(d.nu),
            })
        })
        .collect();
    json!({ "generic": p.is_generic(), "margin": p.genericity_margin(), "classes": classes })
}

fn monodromy(g: &Global, m: usize, eps: Option<f64>) -> Result<(ParameterSet, MonodromyResult), Failure> {
    let p = dihedral_params(g, m)?;
    let opts = MonodromyOptions { eps, tol: g.ode_tol, ..Default::default() };
    let mono = monodromy_generators(&DihedralModel::new(m)?, &p, &opts)?;
    Ok((p, mono))
}

fn cmd_monodromy(g: &Global, m: usize, eps: Option<f64>) -> Outcome {
    let (p, mono) = monodromy(g, m, eps)?;
    let gens: Vec<Value> = (0..2)
        .map(|i| {
            json!({
                "T": matrix_value(&mono.t[i]),
                "T_inv": matrix_value(&mono.t_inv[i]),
                "e": matrix_value(&mono.e[i]),
                "u": mono.u[i].iter().map(|z| complex_value(*z)).collect::<Vec<_>>(),
                "w": mono.w[i].iter().map(|z| complex_value(*z)).collect::<Vec<_>>(),
                "pairing": complex_value(mono.pairing[i]),
                "spectrum": mono.spectra[i].iter().map(|z| complex_value(*z)).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok((
        json!({
            "m": m,
            "params": p,
            "derived": derived_value(&p),
            "generators": gens,
            "diagnostics": mono.diagnostics,
        }),
        true,
    ))
}

fn cmd_phi(g: &Global, m: usize, index: usize, word: Option<String>, dump: bool, maxlen: usize) -> Outcome {
    if index > 1 {
        return Err(Failure::Usage(format!("index {index} must be 0 or 1")));
    }
    let (_, mono) = monodromy(g, m, None)?;
    let oracle = PhiOracle::new(Arc::new(mono));
    if dump {
        let mut table = serde_json::Map::new();
        for w in positive_words(maxlen) {
            table.insert(w.to_string(), complex_value(oracle.phi(index, &w)?));
        }
        return Ok((Value::Object(table), true));
    }
    let text = word.ok_or_else(|| Failure::Usage("phi needs --word or --dump".into()))?;
    let w: Word = text.parse().map_err(|e: bmw::Error| Failure::Usage(e.to_string()))?;
    Ok((complex_value(oracle.phi(index, &w)?), true))
}

fn with_kappa(p: ParameterSet, kappa: Option<f64>) -> ParameterSet {
    match kappa {
        Some(k) => p.with_kappa(C64::new(k, 0.0)),
        None => p,
    }
}

fn cmd_algebra(
    g: &Global,
    dihedral: Option<usize>,
    coxeter: Option<PathBuf>,
    kappa: Option<f64>,
    structure: Option<PathBuf>,
) -> Result<(Value, bool, Option<StructureConstants>), Failure> {
    let start = Instant::now();
    let opts = MonodromyOptions { tol: g.ode_tol, ..Default::default() };
    let (mut report, alg, ok) = if let Some(m) = dihedral {
        let p = with_kappa(dihedral_params(g, m)?, kappa);
        let mono = monodromy_generators(&DihedralModel::new(m)?, &p, &opts)?;
        let bmw = build_dihedral_bmw_from_oracle(m, &p, Arc::new(PhiOracle::new(Arc::new(mono))))?;
        let hecke = hecke_quotient(m, &p)?;
        let rel = bmw.algebra.relation_report()?;
        let ok = rel.max_residual < g.tol;
        let report = json!({
            "algebra": bmw.algebra.name,
            "m": m,
            "params": p,
            "dimension": bmw.algebra.dim(),
            "trace_rank": bmw.algebra.trace_form_rank(bmw::algebra::RANK_THRESHOLD),
            "hecke_dimension": hecke.dim(),
            "associativity": bmw.algebra.associativity_residual(100, g.seed),
            "relations": rel,
            "derived_identities": bmw.derived,
            "rewrite_steps": bmw.rewrite_steps,
            "basis": bmw.algebra.basis.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        });
        (report, Some(bmw.algebra), ok)
    } else {
        let path = coxeter.expect("clap enforces one of --dihedral/--coxeter");
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Failure::Usage(format!("cannot read Coxeter file {}: {e}", path.display())))?;
        let gamma = CoxeterMatrix::from_json(&text).map_err(|e| Failure::Usage(e.to_string()))?;
        let n = gamma.simple_reflection_classes().iter().max().map_or(0, |c| c + 1);
        let p = match load_params(g)? {
            Some(p) => p,
            None => sample_generic_classes(g.seed, n, C64::new(DEFAULT_KAPPA, 0.0))?,
        };
        let p = with_kappa(p, kappa);
        let general = build_general_bmw(&gamma, &p, &opts, EnumerationOptions::default())?;
        let hecke = general_hecke(&gamma, &p, EnumerationOptions::default())?;
        let mut report = json!({
            "algebra": format!("BMW(rank {})", gamma.rank),
            "coxeter": general.gamma,
            "params": p,
            "longest_length": general.longest_length,
            "enumeration": general.stats,
            "dimension": general.stats.dimension,
            "hecke_dimension": hecke.stats.dimension,
        });
        let mut ok = general.stats.complete;
        if let Some(alg) = &general.algebra {
            let rel = alg.relation_report()?;
            ok &= rel.max_residual < g.tol;
            report["trace_rank"] = json!(alg.trace_form_rank(bmw::algebra::RANK_THRESHOLD));
            report["associativity"] = json!(alg.associativity_residual(100, g.seed));
            report["relations"] = json!(rel);
            report["basis"] = json!(alg.basis.iter().map(|w| w.to_string()).collect::<Vec<_>>());
        } else {
            report["incomplete"] = json!(true);
        }
        (report, general.algebra, ok)
    };
    if g.timing {
        report["seconds"] = json!(start.elapsed().as_secs_f64());
    }
    let sc = match (&structure, &alg) {
        (Some(_), Some(a)) => Some(StructureConstants::from_algebra(a)),
        (Some(_), None) => return Err(Failure::Run("no structure constants: enumeration incomplete".into())),
        _ => None,
    };
    Ok((report, ok, sc))
}

fn cmd_brauer(g: &Global, m: usize) -> Outcome {
    let p = match load_params(g)? {
        Some(p) => p,
        None => sample_generic_parameters(g.seed, m)?,
    };
    let dim = brauer_dimension(m, &p)?;
    let alg = build_brauer(m, &p)?;
    let rel = alg.relation_report()?;
    let ok = rel.max_residual < g.tol;
    Ok((
        json!({
            "m": m,
            "params": p,
            "dimension": dim,
            "relations": rel,
            "associativity": alg.associativity_residual(100, g.seed),
            "basis": alg.basis.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        }),
        ok,
    ))
}

fn cmd_verify(g: &Global, ms: Vec<usize>) -> Outcome {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v.parse().map_err(|_| Failure::Usage(format!("{THREADS_ENV} must be a non-negative integer")))?,
        Err(_) => 0,
    };
    let cfg = VerifyConfig {
        ms: if ms.is_empty() { DEFAULT_MS.to_vec() } else { ms },
        seed: g.seed,
        params: load_params(g)?,
        ode_tol: g.ode_tol,
        relation_tol: g.tol,
        threads,
        ..Default::default()
    };
    let start = Instant::now();
    let rep = run_verify_suite(&cfg)?;
    if let Some(f) = &rep.first_failure {
        eprintln!("verification failed: {f}");
    }
    let mut v = serde_json::to_value(&rep).map_err(|e| Failure::Run(e.to_string()))?;
    if g.timing {
        v["seconds"] = json!(start.elapsed().as_secs_f64());
    }
    Ok((v, rep.passed))
}

fn cmd_report(g: &Global, m: Option<usize>) -> Outcome {
    let p = match (load_params(g)?, m) {
        (Some(p), _) => p,
        (None, Some(m)) => sample_generic_parameters(g.seed, m)?,
        (None, None) => return Err(Failure::Usage("report needs --params or --m".into())),
    };
    let mut v = json!({ "params": p, "derived": derived_value(&p) });
    if let Some(m) = m {
        let (_, mono) = monodromy(g, m, None)?;
        v["m"] = json!(m);
        v["diagnostics"] = json!(mono.diagnostics);
    }
    Ok((v, true))
}

fn write_json(path: Option<&PathBuf>, v: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Failure::Run(e.to_string()))? + "\n";
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Run(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let g = &cli.global;
    if !(g.tol > 0.0 && g.ode_tol > 0.0) {
        return Err(Failure::Usage("tolerances must be positive".into()));
    }
    let (value, ok) = match cli.command {
        Command::Monodromy { m, eps } => cmd_monodromy(g, m, eps)?,
        Command::Phi { m, index, word, dump, maxlen } => cmd_phi(g, m, index, word, dump, maxlen)?,
        Command::Algebra { dihedral, coxeter, kappa, report, structure } => {
            let (value, ok, sc) = cmd_algebra(g, dihedral, coxeter, kappa, structure.clone())?;
            if let (Some(path), Some(sc)) = (&structure, sc) {
                write_json(Some(path), &sc.to_value())?;
            }
            if let Some(path) = &report {
                write_json(Some(path), &value)?;
            }
            (value, ok)
        }
        Command::Brauer { m } => cmd_brauer(g, m)?,
        Command::Verify { ms } => cmd_verify(g, ms)?,
        Command::Report { m } => cmd_report(g, m)?,
    };
    write_json(g.out.as_ref(), &value)?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
