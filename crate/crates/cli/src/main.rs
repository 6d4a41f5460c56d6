use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use invgraph::bridge::{self, BridgeCondition, BridgeSpec};
use invgraph::census;
use invgraph::exact::{IntMatrix, RatMatrix};
use invgraph::fulvene;
use invgraph::graphs::{io, Graph};
use invgraph::invert::{self, Sign};
use invgraph::spectra::{self, round_to};

#[derive(Parser)]
#[command(name = "invgraph", version, about = "Integrally, positively and negatively invertible graphs")]
struct Cli {
    /// Decimal places for floating-point output.
    #[arg(long, global = true, default_value_t = 4)]
    precision: u32,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Copy, Clone, ValueEnum)]
enum SignArg {
    Positive,
    Negative,
}

#[derive(Subcommand)]
enum Command {
    /// Invertibility class and signature.
    Classify { graph: PathBuf },
    /// Exact inverse and, when signable, the inverse graph.
    Invert {
        graph: PathBuf,
        #[arg(long, value_enum)]
        sign: Option<SignArg>,
    },
    /// Bridge two graphs and check the invertibility conditions.
    Bridge {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        /// Pairs `a:b`, 1-based, e.g. "3:1,4:2".
        #[arg(long)]
        pairs: String,
    },
    /// Lower bound on the least positive eigenvalue of a bridged graph.
    Bound {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        pairs: String,
    },
    /// Adjacency spectrum.
    Spectrum { graph: PathBuf },
    /// Connected graphs with a unique perfect matching on m vertices.
    Census {
        #[arg(long, default_value_t = 6)]
        m: usize,
        /// Write table1.tsv, table2.json and one graph file per record.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generation n of the fulvene family.
    Fulvene {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        verify: bool,
    },
    /// Graphviz DOT.
    ExportDot { graph: PathBuf },
}

enum Failure {
    Usage(String),
    Domain(String),
}

type Outcome = Result<String, Failure>;

fn domain(e: impl std::fmt::Display) -> Failure {
    Failure::Domain(e.to_string())
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    io::parse_graph(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn parse_pairs(s: &str) -> Result<BridgeSpec, Failure> {
    s.parse().map_err(|e: bridge::BridgeError| Failure::Usage(e.to_string()))
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("JSON serializes");
    s.push('\n');
    s
}

fn int_matrix_json(m: &IntMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| {
            Value::Array(
                (0..m.cols())
                    .map(|j| match m.get_i64(i, j) {
                        Some(v) => json!(v),
                        None => json!(m[(i, j)].to_string()),
                    })
                    .collect(),
            )
        })
        .collect();
    Value::Array(rows)
}

fn rat_matrix_json(m: &RatMatrix) -> Value {
    match m.to_integer() {
        Some(int) => int_matrix_json(&int),
        None => Value::Array(
            (0..m.rows())
                .map(|i| Value::Array(m.row(i).iter().map(|x| json!(x.to_string())).collect()))
                .collect(),
        ),
    }
}

fn classify(path: &Path) -> Outcome {
    let g = read_graph(path)?;
    let a = invert::analyze(&g);
    let mut out = json!({ "schema": 1, "class": a.class, "det": a.det.to_string() });
    match (&a.positive, &a.negative) {
        (Some(p), Some(n)) => {
            out["signature"] = json!(p.signature);
            out["negative_signature"] = json!(n.signature);
        }
        (Some(s), None) | (None, Some(s)) => out["signature"] = json!(s.signature),
        (None, None) => {}
    }
    Ok(to_json(&out))
}

fn invert_cmd(path: &Path, sign: Option<SignArg>) -> Outcome {
    let g = read_graph(path)?;
    let a = invert::analyze(&g);
    let inv = a.inverse.as_ref().ok_or_else(|| Failure::Domain("adjacency matrix is singular".into()))?;
    let mut out = json!({
        "schema": 1,
        "class": a.class,
        "det": a.det.to_string(),
        "inverse": rat_matrix_json(&inv.matrix),
    });
    let result = match sign {
        Some(SignArg::Positive) => Some(invert::inverse_graph_with_sign(&g, Sign::Positive).map_err(domain)?),
        Some(SignArg::Negative) => Some(invert::inverse_graph_with_sign(&g, Sign::Negative).map_err(domain)?),
        None => invert::inverse_graph(&g).ok(),
    };
    if let Some(r) = result {
        out["sign"] = json!(r.sign.as_str());
        out["signature"] = json!(r.signature);
        out["inverse_graph"] = io::to_json_value(&r.inverse_graph);
    }
    Ok(to_json(&out))
}

fn bridge_cmd(left: &Path, right: &Path, pairs: &str) -> Outcome {
    let (ga, gb, spec) = (read_graph(left)?, read_graph(right)?, parse_pairs(pairs)?);
    let r = bridge::check_invertibility_conditions(&ga, &gb, &spec).map_err(domain)?;
    let condition = match r.condition {
        BridgeCondition::PrZero => "pr_zero",
        BridgeCondition::PrTwoI => "pr_two_i",
        BridgeCondition::None => "none",
    };
    let out = json!({
        "schema": 1,
        "graph": io::to_json_value(&r.bridged),
        "report": {
            "pairs": spec.to_string(),
            "p": r.p.as_ref().map(int_matrix_json),
            "r": r.r.as_ref().map(int_matrix_json),
            "condition": condition,
            "det": r.det.to_string(),
            "integrally_invertible": r.integrally_invertible,
            "schur_agrees": r.schur_agrees,
            "sign_preserved": r.sign_result,
        },
    });
    Ok(to_json(&out))
}

fn bound_cmd(left: &Path, right: &Path, pairs: &str, p: u32) -> Outcome {
    let (ga, gb, spec) = (read_graph(left)?, read_graph(right)?, parse_pairs(pairs)?);
    let report = spectra::bound_report(&ga, &gb, &spec).map_err(domain)?;
    let c = bridge::bridge(&ga, &gb, &spec).map_err(domain)?;
    let actual = spectra::lambda_min_pos(&c).map_err(domain)?;
    let out = json!({
        "schema": 1,
        "lambda_lb": round_to(report.lambda_lb, p),
        "lambda_min_pos": round_to(actual, p),
        "alpha": round_to(report.inputs.alpha, p),
        "beta": round_to(report.inputs.beta, p),
        "mu_star": round_to(report.inputs.mu_star, p),
        "lambda_star": round_to(report.lambda_star, p),
    });
    Ok(to_json(&out))
}

fn fixed(x: f64, p: u32) -> String {
    format!("{:.*}", p as usize, round_to(x, p))
}

fn spectrum_cmd(path: &Path, p: u32, format: Format) -> Outcome {
    let g = read_graph(path)?;
    let s = spectra::spectrum(&g).map_err(domain)?;
    if format == Format::Tsv {
        let mut out = String::from("index\teigenvalue\n");
        for (i, &x) in s.eigenvalues.iter().enumerate() {
            out.push_str(&format!("{}\t{}\n", i + 1, fixed(x, p)));
        }
        return Ok(out);
    }
    let out = json!({
        "schema": 1,
        "eigenvalues": s.rounded(p),
        "lambda_min_pos": s.min_positive().map(|x| round_to(x, p)),
    });
    Ok(to_json(&out))
}

fn census_cmd(m: usize, out_dir: Option<&Path>, p: u32, format: Format) -> Outcome {
    let records = census::run_census(m).map_err(|e| match e {
        census::CensusError::UnsupportedSize(_) => Failure::Usage(e.to_string()),
        other => domain(other),
    })?;
    let tsv = census::table1_tsv(&records, p as usize);
    let full = census::records_json(&records, p as usize);
    if let Some(dir) = out_dir {
        let write = |name: &str, body: &str| {
            fs::write(dir.join(name), body).map_err(|e| Failure::Domain(format!("{}: {e}", dir.join(name).display())))
        };
        fs::create_dir_all(dir).map_err(|e| Failure::Domain(format!("{}: {e}", dir.display())))?;
        write("table1.tsv", &tsv)?;
        write("table2.json", &to_json(&full))?;
        for (label, r) in census::record_labels(&records).iter().zip(&records) {
            write(&format!("{}.json", label.trim_start_matches('#')), &(io::to_json(&r.graph) + "\n"))?;
        }
    }
    Ok(match format {
        Format::Tsv => tsv,
        Format::Json => to_json(&full),
    })
}

fn fulvene_cmd(n: usize, verify: bool, p: u32) -> Outcome {
    let gen = fulvene::fulvene_family(n).map_err(|e| match e {
        fulvene::FulveneError::GenerationTooLarge { .. } => Failure::Usage(e.to_string()),
        other => domain(other),
    })?;
    let mut out = json!({
        "schema": 1,
        "n": n,
        "vertices": gen.vertex_count(),
        "f": gen.f,
        "degree_counts": gen.degree_counts,
        "graph": io::to_json_value(&gen.graph),
    });
    if verify {
        let r = fulvene::verify_generation(n).map_err(domain)?;
        out["report"] = json!({
            "counts_ok": r.counts_ok,
            "expected_vertex_count": r.expected_vertex_count,
            "expected_low_degree_counts": r.expected_low_degree_counts,
            "det": r.det.to_string(),
            "integrally_invertible": r.integrally_invertible,
            "max_degree": r.max_degree,
            "lambda_min_pos": round_to(r.lambda_min_pos, p),
            "bound": round_to(r.bound, p),
            "bound_holds": r.bound_holds,
            "cubic_ratio": round_to(r.cubic_ratio, p),
            "ratio_nondecreasing": r.ratio_nondecreasing,
            "recursion_holds": r.recursion_holds,
            "all_hold": r.all_hold(),
        });
    }
    Ok(to_json(&out))
}

fn run(cli: Cli) -> Outcome {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let p = cli.precision;
    match &cli.command {
        Command::Classify { graph } => classify(graph),
        Command::Invert { graph, sign } => invert_cmd(graph, *sign),
        Command::Bridge { left, right, pairs } => bridge_cmd(left, right, pairs),
        Command::Bound { left, right, pairs } => bound_cmd(left, right, pairs, p),
        Command::Spectrum { graph } => spectrum_cmd(graph, p, cli.format),
        Command::Census { m, out } => census_cmd(*m, out.as_deref(), p, cli.format),
        Command::Fulvene { n, verify } => fulvene_cmd(*n, *verify, p),
        Command::ExportDot { graph } => Ok(io::to_dot(&read_graph(graph)?)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
