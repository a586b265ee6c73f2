//! `morita`: command-line front end for the obstruction pipelines.
//!
//! Exit codes: 0 success, 1 malformed or unstable input, 2 hypothesis failure, 3 internal
//! cross-check divergence (including a failing selftest).

use std::fs;
use std::io::Read;
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand};
use morita_core::acceptance::{self, DEFAULT_SEED};
use morita_core::exactla::{smith_normal_form, AbelianPresentation, IntMatrix, LinalgError};
use morita_core::fingcoh::{h1_finite, FinError, FiniteGroup, FiniteModule};
use morita_core::morita::{big_json, o1_report, o2_report, MoritaError};
use morita_core::nilq::{eval_word, parse_word, reduced_labels, NilError};
use morita_core::stablegraph::{check_automorphism, specializes_to, validate_stable, GraphError, GraphFile};
use num_bigint::BigInt;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "morita", version, about = "Morita obstruction classes for surface bundles over the torus")]
struct Cli {
    /// Emit a JSON report on standard output.
    #[arg(long, global = true)]
    json: bool,
    /// Repeat for more detail on standard error.
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a graph file and its automorphism, if present.
    StableCheck { file: String },
    /// Whether the first graph specializes to the second (the second contracts onto the first).
    Specializes { general: String, special: String },
    /// Primary obstruction class for the graph file's automorphism.
    O1 {
        file: String,
        /// Vertex id used as the basepoint instead of the default.
        #[arg(long)]
        basepoint: Option<String>,
    },
    /// Secondary obstruction class for a doubled tree, by both engines.
    O2Tree { file: String },
    /// Smith normal form of an integer matrix read from standard input.
    Snf,
    /// Evaluate a word in the generators of π₁(Σ_g)/L³ (`a1 b1 A1 B1`, capitals invert).
    EvalWord { genus: usize, word: String },
    /// H¹ of a finite group (table file) with coefficients in a finite module (module file).
    H1Finite { table: String, module: String },
    /// Run the acceptance suite.
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Run a single criterion.
        #[arg(long)]
        only: Option<u32>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn malformed(message: impl ToString) -> Self {
        Failure { code: 1, message: message.to_string() }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::malformed(e)
    }
}

impl From<LinalgError> for Failure {
    fn from(e: LinalgError) -> Self {
        Failure::malformed(e)
    }
}

impl From<NilError> for Failure {
    fn from(e: NilError) -> Self {
        Failure::malformed(e)
    }
}

impl From<FinError> for Failure {
    fn from(e: FinError) -> Self {
        let code = match e {
            FinError::NoWitness | FinError::Linalg(_) => 3,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<MoritaError> for Failure {
    fn from(e: MoritaError) -> Self {
        let code = match e {
            MoritaError::Graph(_) => 1,
            MoritaError::Hypothesis(_) => 2,
            MoritaError::CrossCheck { .. } | MoritaError::Invariant(_) | MoritaError::Cohomology(_) | MoritaError::Nil(_) => 3,
        };
        Failure { code, message: e.to_string() }
    }
}

/// Report text and JSON, plus the exit code to use after printing.
struct Output {
    text: String,
    json: Value,
    code: u8,
}

fn read(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::malformed(format!("{path}: {e}")))
}

fn graph_file(path: &str) -> Result<GraphFile, Failure> {
    GraphFile::parse(&read(path)?).map_err(|e| Failure::malformed(format!("{path}: {e}")))
}

fn vec_json(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(big_json).collect())
}

fn matrix_json(m: &IntMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vec_json(m.row(i))).collect())
}

fn join(v: &[BigInt]) -> String {
    v.iter().map(BigInt::to_string).collect::<Vec<_>>().join(" ")
}

fn with_header(command: &str, inputs: Value, mut body: Value) -> Value {
    body["command"] = json!(command);
    body["inputs"] = inputs;
    body
}

fn stable_check(path: &str) -> Result<Output, Failure> {
    let file = graph_file(path)?;
    let graph = file.graph();
    let report = validate_stable(&graph, None)?;
    let mut text = if report.valid {
        format!("stable: genus {}\n", report.genus)
    } else {
        let lines: Vec<String> = report.violations.iter().map(|v| format!("  - {v}\n")).collect();
        format!("unstable (genus {}):\n{}", report.genus, lines.concat())
    };
    let mut valid = report.valid;
    let mut body = json!({ "stable": report.valid, "genus": report.genus, "violations": report.violations });
    if let Some(sigma) = &file.automorphism {
        let a = check_automorphism(&graph, sigma);
        valid &= a.valid;
        if a.valid {
            text.push_str(&format!(
                "automorphism: order {}, fixed vertices [{}], stabilized edges [{}]\n",
                a.order,
                a.fixed_vertices.join(", "),
                a.stabilized_edges.join(", ")
            ));
        } else {
            text.push_str("invalid automorphism:\n");
            for v in &a.violations {
                text.push_str(&format!("  - {v}\n"));
            }
        }
        body["automorphism"] = serde_json::to_value(&a).expect("report serializes");
    }
    Ok(Output { text, json: with_header("stable-check", json!([path]), body), code: if valid { 0 } else { 1 } })
}

fn specializes(general: &str, special: &str) -> Result<Output, Failure> {
    let (a, b) = (graph_file(general)?.graph(), graph_file(special)?.graph());
    for (path, g) in [(general, &a), (special, &b)] {
        let report = validate_stable(g, None)?;
        if !report.valid {
            return Err(Failure::malformed(format!("{path}: {}", GraphError::Unstable(report.violations))));
        }
    }
    let answer = specializes_to(&a, &b);
    Ok(Output {
        text: format!("{}\n", if answer { "yes" } else { "no" }),
        json: with_header("specializes", json!([general, special]), json!({ "specializes": answer })),
        code: 0,
    })
}

fn automorphism_of(path: &str) -> Result<(GraphFile, morita_core::stablegraph::GraphAutomorphism), Failure> {
    let file = graph_file(path)?;
    let sigma = file.automorphism.clone().ok_or_else(|| Failure::malformed(format!("{path}: no automorphism given")))?;
    Ok((file, sigma))
}

fn o1(path: &str, basepoint: Option<&str>) -> Result<Output, Failure> {
    let (file, sigma) = automorphism_of(path)?;
    let report = o1_report(&file.graph(), &sigma, basepoint)?;
    let presentation = if report.invariant_factors.is_empty() {
        "0".to_string()
    } else {
        report
            .invariant_factors
            .iter()
            .map(|d| if d == &BigInt::from(0) { "Z".to_string() } else { format!("Z/{d}") })
            .collect::<Vec<_>>()
            .join(" + ")
    };
    let text = format!(
        "order: {}\ncoinvariants: {presentation}\nclass: {}\nbasepoint: {}\nconvention: {}\n",
        report.order,
        join(&report.class),
        report.basepoint,
        morita_core::morita::CONVENTION
    );
    let mut inputs = json!([path]);
    if let Some(b) = basepoint {
        inputs = json!([path, { "basepoint": b }]);
    }
    Ok(Output { text, json: with_header("o1", inputs, report.to_json()), code: 0 })
}

fn o2_tree(path: &str) -> Result<Output, Failure> {
    let (file, sigma) = automorphism_of(path)?;
    let report = o2_report(&file.graph(), &sigma)?;
    let text = format!(
        "order: {}\ngeneric engine order: {}\nquotient invariant factors: {}\nclass: {}\ncertificate: {}\nconvention: {}\n",
        report.order(),
        report.generic.order,
        join(&report.shortcut.invariant_factors),
        join(&report.shortcut.class),
        report.certificate.as_ref().map_or("none".to_string(), |c| join(c)),
        morita_core::morita::CONVENTION
    );
    Ok(Output { text, json: with_header("o2-tree", json!([path]), report.to_json()), code: 0 })
}

fn snf() -> Result<Output, Failure> {
    let mut input = String::new();
    std::io::stdin().read_to_string(&mut input).map_err(Failure::malformed)?;
    let m = IntMatrix::parse(&input)?;
    let (d, u, v) = smith_normal_form(&m);
    let presentation = AbelianPresentation::from_relations(m.clone());
    let text = format!("D:\n{d}U:\n{u}V:\n{v}cokernel: {presentation}\n");
    let body = json!({
        "d": matrix_json(&d),
        "u": matrix_json(&u),
        "v": matrix_json(&v),
        "invariant_factors": vec_json(&presentation.invariant_factors),
    });
    Ok(Output { text, json: with_header("snf", json!(["-"]), body), code: 0 })
}

fn eval(genus: usize, word: &str) -> Result<Output, Failure> {
    if genus == 0 {
        return Err(Failure::malformed("genus must be positive"));
    }
    let x = eval_word(&parse_word(word)?, genus)?;
    let labels = reduced_labels(genus);
    let terms: Vec<String> = x.w.iter().zip(&labels).filter(|(c, _)| c != &&BigInt::from(0)).map(|(c, l)| format!("{c}*{l}")).collect();
    let text = format!("h: {}\nw: {}\n", join(&x.h), if terms.is_empty() { "0".to_string() } else { terms.join(" + ") });
    let body = json!({ "h": vec_json(&x.h), "w": vec_json(&x.w), "w_basis": labels });
    Ok(Output { text, json: with_header("eval-word", json!({ "genus": genus, "word": word }), body), code: 0 })
}

fn h1(table: &str, module: &str) -> Result<Output, Failure> {
    let group = FiniteGroup::parse(&read(table)?).map_err(|e| Failure::malformed(format!("{table}: {e}")))?;
    let a = FiniteModule::parse(&group, &read(module)?).map_err(|e| Failure::malformed(format!("{module}: {e}")))?;
    let h = h1_finite(&group, &a)?;
    let gens = group.generators().to_vec();
    let mut text = format!("H1 = {}\ngroup generators: {:?}\n", h.presentation, gens);
    let mut cocycles = Vec::new();
    let k = h.invariant_factors().len();
    for (i, d) in h.invariant_factors().iter().enumerate() {
        let coords: Vec<BigInt> = (0..k).map(|j| BigInt::from((i == j) as u8)).collect();
        let f = h.cocycle(&coords)?;
        let on_gens: Vec<String> = gens.iter().map(|&s| format!("f({s}) = [{}]", join(&f.values[s]))).collect();
        text.push_str(&format!("class {} (order {d}): {}\n", i + 1, on_gens.join(", ")));
        cocycles.push(json!({
            "order": big_json(d),
            "on_generators": gens.iter().map(|&s| vec_json(&f.values[s])).collect::<Vec<_>>(),
            "values": f.values.iter().map(|v| vec_json(v)).collect::<Vec<_>>(),
        }));
    }
    let body = json!({
        "order": big_json(&h.cardinality()),
        "invariant_factors": vec_json(h.invariant_factors()),
        "generators": gens,
        "cocycles": cocycles,
    });
    Ok(Output { text, json: with_header("h1-finite", json!([table, module]), body), code: 0 })
}

fn selftest(seed: u64, only: Option<u32>) -> Result<Output, Failure> {
    let results = match only {
        Some(k) if (1..=10).contains(&k) => vec![acceptance::run(k, seed)],
        Some(k) => return Err(Failure::malformed(format!("no criterion {k}"))),
        None => acceptance::run_all(seed),
    };
    let text: String = results.iter().map(|r| format!("{r}\n")).collect();
    let passed = results.iter().all(|r| r.passed);
    let body = json!({
        "seed": seed,
        "passed": passed,
        "criteria": results
            .iter()
            .map(|r| json!({ "number": r.number, "title": r.title, "passed": r.passed, "detail": r.detail }))
            .collect::<Vec<_>>(),
    });
    Ok(Output { text, json: with_header("selftest", json!({ "seed": seed }), body), code: if passed { 0 } else { 3 } })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::StableCheck { file } => stable_check(file),
        Command::Specializes { general, special } => specializes(general, special),
        Command::O1 { file, basepoint } => o1(file, basepoint.as_deref()),
        Command::O2Tree { file } => o2_tree(file),
        Command::Snf => snf(),
        Command::EvalWord { genus, word } => eval(*genus, word),
        Command::H1Finite { table, module } => h1(table, module),
        Command::Selftest { seed, only } => selftest(*seed, *only),
    };
    match result {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("JSON serializes"));
            } else {
                print!("{}", out.text);
            }
            if cli.verbose > 0 {
                eprintln!("exit status {}", out.code);
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
