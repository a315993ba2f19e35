//! Command-line front end. Every subcommand emits a single report on
//! standard output, JSON by default, with numbers rounded to 12
//! significant digits so identical invocations diff byte-for-byte.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::BigRational;
use serde_json::{json, Value};
use susyhom::complex::BettiMethod;
use susyhom::error::Error;
use susyhom::estimate::{dqc1_qbne, qbne, EstimatorConfig, DEFAULT_DENSITY_FLOOR};
use susyhom::graph::{
    betti_scan, clique_complex, hardcore_hamiltonian, independence_complex, Convention, Graph,
    PointCloud,
};
use susyhom::reduction::{constrained_lift, susy_lift, verify_squared_spectrum, PauliHamiltonian};
use susyhom::vqe::{default_hardcore_ansatz, jw_laplacian, sector_initial_state, vqe_run};

#[derive(Parser)]
#[command(name = "susyhom", version, about = "Supersymmetric lattice models and computational homology")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for parallel stages (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ComplexKind {
    Independence,
    Clique,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Exact,
    Spectral,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    FermionNumber,
    Simplicial,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variant {
    Penalty,
    Constrained,
}

#[derive(Args)]
struct BettiArgs {
    /// Edge-list file.
    #[arg(long)]
    graph: String,
    #[arg(long, value_enum, default_value_t = ComplexKind::Independence)]
    complex: ComplexKind,
    /// Sector (fermion number, or simplicial degree under that convention).
    #[arg(long)]
    level: usize,
    #[arg(long, value_enum, default_value_t = Method::Exact)]
    method: Method,
    #[arg(long, value_enum, default_value_t = ConventionArg::FermionNumber)]
    convention: ConventionArg,
}

#[derive(Args)]
struct QbneArgs {
    #[arg(long)]
    graph: String,
    #[arg(long)]
    level: usize,
    /// Spectral threshold.
    #[arg(long)]
    b: f64,
    /// Resolution slack.
    #[arg(long)]
    delta: f64,
    /// Additive accuracy.
    #[arg(long)]
    eps: f64,
    /// Success probability.
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    seed: u64,
    /// Phase-readout register width; omitted means exact readout.
    #[arg(long)]
    t_bits: Option<u32>,
    /// Exact enumeration instead of sampling.
    #[arg(long)]
    enumerate: bool,
    /// Two-stage maximally mixed-state estimator.
    #[arg(long)]
    dqc1: bool,
    #[arg(long, default_value_t = DEFAULT_DENSITY_FLOOR)]
    density_floor: f64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Betti number of one sector.
    Betti(BettiArgs),
    /// Laplacian spectrum of one sector.
    Spectrum {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        level: usize,
    },
    /// Witten index with the dimension/Betti cross-check.
    Witten {
        #[arg(long)]
        graph: String,
    },
    /// Vietoris-Rips Betti table over a list of grouping scales.
    Tda {
        /// Point-cloud CSV file.
        #[arg(long)]
        points: String,
        /// Non-decreasing grouping scales.
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long)]
        max_level: usize,
        #[arg(long, value_enum, default_value_t = ConventionArg::Simplicial)]
        convention: ConventionArg,
    },
    /// Quasi-Betti-number estimation on a sector.
    Qbne(QbneArgs),
    /// Lift a Pauli Hamiltonian to a supersymmetric complex.
    Reduce {
        /// Pauli term file.
        #[arg(long)]
        hamiltonian: String,
        #[arg(long, value_enum)]
        variant: Variant,
        /// Check spec(Delta) against the squared input spectrum.
        #[arg(long)]
        verify_squares: bool,
    },
    /// Variational ground-state search in one sector.
    Vqe {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        sector: usize,
        #[arg(long, default_value_t = 1)]
        layers: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        restarts: usize,
    },
    /// Run the full invariant suite on a graph instance.
    Check {
        #[arg(long)]
        graph: String,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if cli.workers > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global();
    }
    match run(&cli.cmd) {
        Ok((report, code)) => {
            emit(&report, cli.format);
            std::process::exit(code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(if e.is_precondition() { 2 } else { 1 });
        }
    }
}

fn read(path: &str) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{path}: {e}")))
}

fn load_graph(path: &str) -> Result<Graph, Error> {
    Graph::parse(&read(path)?, path)
}

fn run(cmd: &Cmd) -> Result<(Value, i32), Error> {
    match cmd {
        Cmd::Betti(a) => cmd_betti(a),
        Cmd::Spectrum { graph, level } => {
            let g = load_graph(graph)?;
            let c = independence_complex(&g)?;
            let spec = c.sector_spectrum(*level)?;
            Ok((
                json!({
                    "graph": graph,
                    "level": level,
                    "dim": spec.len(),
                    "spectrum": spec,
                }),
                0,
            ))
        }
        Cmd::Witten { graph } => {
            let g = load_graph(graph)?;
            let c = independence_complex(&g)?;
            let w = c.witten_index()?;
            Ok((
                json!({
                    "graph": graph,
                    "witten": w.index,
                    "from_dims": w.from_dims,
                    "from_betti": w.from_betti,
                    "consistent": w.consistent,
                }),
                0,
            ))
        }
        Cmd::Tda {
            points,
            eps,
            max_level,
            convention,
        } => {
            let pc = PointCloud::parse(&read(points)?, points)?;
            let conv = match convention {
                ConventionArg::FermionNumber => Convention::FermionNumber,
                ConventionArg::Simplicial => Convention::Simplicial,
            };
            let rows = betti_scan(&pc, eps, *max_level, conv)?;
            Ok((
                json!({
                    "points": points,
                    "convention": match conv {
                        Convention::FermionNumber => "fermion-number",
                        Convention::Simplicial => "simplicial",
                    },
                    "rows": rows,
                }),
                0,
            ))
        }
        Cmd::Qbne(a) => cmd_qbne(a),
        Cmd::Reduce {
            hamiltonian,
            variant,
            verify_squares,
        } => cmd_reduce(hamiltonian, *variant, *verify_squares),
        Cmd::Vqe {
            graph,
            sector,
            layers,
            seed,
            restarts,
        } => cmd_vqe(graph, *sector, *layers, *seed, *restarts),
        Cmd::Check { graph } => cmd_check(graph),
    }
}

fn cmd_betti(a: &BettiArgs) -> Result<(Value, i32), Error> {
    let g = load_graph(&a.graph)?;
    let c = match a.complex {
        ComplexKind::Independence => independence_complex(&g)?,
        ComplexKind::Clique => clique_complex(&g)?,
    };
    let method = match a.method {
        Method::Exact => BettiMethod::ExactRank,
        Method::Spectral => BettiMethod::Spectral,
    };
    // Simplicial degree k maps to fermion sector k+1, with the extra
    // connected component of reduced homology restored at k = 0.
    let betti = match a.convention {
        ConventionArg::FermionNumber => c.betti(a.level, method)?,
        ConventionArg::Simplicial => {
            let raw = c.betti(a.level + 1, method)?;
            if a.level == 0 {
                raw + 1
            } else {
                raw
            }
        }
    };
    Ok((
        json!({
            "graph": a.graph,
            "complex": match a.complex {
                ComplexKind::Independence => "independence",
                ComplexKind::Clique => "clique",
            },
            "level": a.level,
            "method": match a.method {
                Method::Exact => "exact",
                Method::Spectral => "spectral",
            },
            "betti": betti,
        }),
        0,
    ))
}

fn cmd_qbne(a: &QbneArgs) -> Result<(Value, i32), Error> {
    let g = load_graph(&a.graph)?;
    let c = independence_complex(&g)?;
    let mut cfg = EstimatorConfig::new(a.b, a.delta, a.eps, a.mu);
    cfg.seed = a.seed;
    cfg.t_bits = a.t_bits;
    cfg.enumerate = a.enumerate;
    let report = if a.dqc1 {
        dqc1_qbne(&c, a.level, &cfg, a.density_floor)?
    } else {
        qbne(&c, a.level, &cfg)?
    };
    let mut v = serde_json::to_value(&report).map_err(|e| Error::Invalid(e.to_string()))?;
    if let Value::Object(map) = &mut v {
        map.insert("graph".into(), json!(a.graph));
        map.insert("level".into(), json!(a.level));
    }
    Ok((v, 0))
}

fn cmd_reduce(path: &str, variant: Variant, verify: bool) -> Result<(Value, i32), Error> {
    let h = PauliHamiltonian::parse(&read(path)?, 1, path)?;
    match variant {
        Variant::Penalty => {
            let j: BigRational = h.default_penalty();
            let c = susy_lift(&h, &j)?;
            let dims = c.space().dims()?;
            let mut out = json!({
                "hamiltonian": path,
                "variant": "penalty",
                "qubits": h.n,
                "modes": c.m(),
                "penalty": susyhom::scalar::rat_to_f64(&j),
                "dims": dims,
            });
            if verify {
                // H = B^2: the squared Dirac spectrum must match the union
                // of the sector Laplacian spectra.
                let dirac = c.dirac()?;
                let mut squares: Vec<f64> = susyhom::linalg::hermitian_spectrum(&dirac)?
                    .iter()
                    .map(|e| e * e)
                    .collect();
                squares.sort_by(|x, y| x.partial_cmp(y).unwrap());
                let mut union = Vec::new();
                for l in 0..=c.m() {
                    union.extend(c.sector_spectrum(l)?);
                }
                union.sort_by(|x, y| x.partial_cmp(y).unwrap());
                let dev = squares
                    .iter()
                    .zip(&union)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                let ok = squares.len() == union.len() && dev <= 1e-8;
                if let Value::Object(map) = &mut out {
                    map.insert("verified".into(), json!(ok));
                    map.insert("deviation".into(), json!(dev));
                }
                if !ok {
                    return Ok((out, 2));
                }
            }
            Ok((out, 0))
        }
        Variant::Constrained => {
            let (c, l) = constrained_lift(&h)?;
            let mut out = json!({
                "hamiltonian": path,
                "variant": "constrained",
                "qubits": h.n,
                "modes": c.m(),
                "sector": l,
                "sector_dim": c.space().sector_dim(l)?,
            });
            if verify {
                let (ok, dev) = verify_squared_spectrum(&h, &c, l, 1e-8)?;
                if let Value::Object(map) = &mut out {
                    map.insert("verified".into(), json!(ok));
                    map.insert("deviation".into(), json!(dev));
                }
                if !ok {
                    return Ok((out, 2));
                }
            }
            Ok((out, 0))
        }
    }
}

fn cmd_vqe(
    graph: &str,
    sector: usize,
    layers: usize,
    seed: u64,
    restarts: usize,
) -> Result<(Value, i32), Error> {
    let g = load_graph(graph)?;
    let h = jw_laplacian(&g)?.total();
    let spec = default_hardcore_ansatz(&g, layers)?;
    let init = sector_initial_state(&g, sector)?;
    let res = vqe_run(&spec, &h, init, restarts, seed)?;
    Ok((
        json!({
            "graph": graph,
            "sector": sector,
            "layers": layers,
            "restarts": restarts,
            "seed": seed,
            "energy": res.energy,
            "restart": res.restart,
            "trace": res.trace,
            "ansatz": spec.to_json(&res.params, seed),
        }),
        0,
    ))
}

fn cmd_check(graph: &str) -> Result<(Value, i32), Error> {
    let g = load_graph(graph)?;
    let mut checks = Vec::new();
    let mut all_ok = true;
    let mut push = |name: &str, ok: bool, detail: Value, all_ok: &mut bool| {
        *all_ok &= ok;
        checks.push(json!({"name": name, "ok": ok, "detail": detail}));
    };

    let d = susyhom::graph::hardcore_supercharge(&g)?;
    let space = susyhom::graph::independence_space(&g)?;
    let residual = d.nilpotency_residual(&space)?;
    push("nilpotency", residual == 0.0, json!(residual), &mut all_ok);

    let c = independence_complex(&g)?;
    let exact = c.betti_all(BettiMethod::ExactRank)?;
    let spectral = c.betti_all(BettiMethod::Spectral)?;
    push(
        "hodge_equivalence",
        exact == spectral,
        json!({"exact": exact, "spectral": spectral}),
        &mut all_ok,
    );

    // {d, d-adjoint} must reproduce the hard-core Hamiltonian sector by
    // sector, entry-exact.
    let h = hardcore_hamiltonian(&g)?;
    let mut ham_ok = true;
    for l in 0..=g.n {
        let lhs = c.laplacian_rat(l)?;
        let rhs = h.sector_matrix(c.space(), l)?;
        if lhs != rhs {
            ham_ok = false;
        }
    }
    push("hamiltonian_identity", ham_ok, json!({}), &mut all_ok);

    let pairing = c.pairing_report(susyhom::complex::ZERO_TOL)?;
    push(
        "susy_pairing",
        pairing.ok,
        serde_json::to_value(&pairing).map_err(|e| Error::Invalid(e.to_string()))?,
        &mut all_ok,
    );

    let w = c.witten_index()?;
    push(
        "witten_consistency",
        w.consistent,
        serde_json::to_value(&w).map_err(|e| Error::Invalid(e.to_string()))?,
        &mut all_ok,
    );

    Ok((
        json!({"graph": graph, "ok": all_ok, "checks": checks}),
        if all_ok { 0 } else { 2 },
    ))
}

/// Round every float in the report to 12 significant digits.
fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.as_i64().is_none() && n.as_u64().is_none() {
                    let rounded: f64 = format!("{f:.11e}").parse().unwrap_or(f);
                    if let Some(num) = serde_json::Number::from_f64(rounded) {
                        *v = Value::Number(num);
                    }
                }
            }
        }
        Value::Array(xs) => xs.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

fn emit(report: &Value, format: Format) {
    let mut report = report.clone();
    round_numbers(&mut report);
    match format {
        Format::Json => println!("{report}"),
        Format::Table => {
            let mut rows = Vec::new();
            flatten("", &report, &mut rows);
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, val) in rows {
                println!("{k:<width$}  {val}");
            }
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, val, out);
            }
        }
        Value::Array(xs) => {
            if xs.iter().all(|x| !matches!(x, Value::Object(_) | Value::Array(_))) {
                let joined: Vec<String> = xs.iter().map(render_scalar).collect();
                out.push((prefix.to_string(), joined.join(" ")));
            } else {
                for (i, x) in xs.iter().enumerate() {
                    flatten(&format!("{prefix}[{i}]"), x, out);
                }
            }
        }
        _ => out.push((prefix.to_string(), render_scalar(v))),
    }
}

fn render_scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
