//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 malformed input, 3 semantic
//! failure (audit inconsistency, round trip mismatch, bad isomorphism).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Deserialize;

use crate::curve::{Curve, CurvePoint};
use crate::decoder::{audit, decode_g, Mode};
use crate::encoder::{encode_d0, stage_bound};
use crate::exact::parse::{parse_diffpoly, parse_element};
use crate::exact::EdgeId;
use crate::graph::Graph;
use crate::presentation::{ClosureConfig, FactStream};
use crate::transfer::{classify_order0, transfer_d0, TransferError};

#[derive(Parser, Debug)]
#[command(name = "graphfield", about = "Graph codings into differential fields", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Encode a graph file as a fact stream.
    Encode {
        #[arg(long)]
        graph: PathBuf,
        /// Number of facts; defaults to the stage bound of the graph.
        #[arg(long)]
        stages: Option<usize>,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        depth: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode a fact stream into a graph file.
    Decode {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "C")]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode, decode and compare.
    Roundtrip {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        stages: Option<usize>,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        depth: u32,
        #[arg(long, default_value = "C")]
        mode: Mode,
    },
    /// Index map between two streams induced by a graph isomorphism.
    Transfer {
        #[arg(long)]
        iso: PathBuf,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Inspect a Legendre curve y^2 = x(x-1)(x-lambda).
    Curve {
        /// lambda as a field element, e.g. `a0 + a1`.
        #[arg(long, conflicts_with = "edge", allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Use the coding curve and point of the edge `m,n`.
        #[arg(long)]
        edge: Option<String>,
        #[arg(long, requires = "y", allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, requires = "x", allow_hyphen_values = true)]
        y: Option<String>,
        /// Also print this multiple of the point.
        #[arg(long, allow_hyphen_values = true)]
        multiple: Option<i64>,
        /// Largest order checked for torsion.
        #[arg(long, default_value_t = 7)]
        torsion: u32,
    },
    /// Classify an order-0 pair file `{"p": "...", "q": "..."}`.
    Classify {
        #[arg(long)]
        pair: PathBuf,
    },
    /// Replay a stream in the exact kernel.
    Audit {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Input(String),
    Semantic(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Semantic(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Semantic(m) => m,
        }
    }
}

type Res = Result<(), Failure>;

/// Runs the CLI on `args` (program name first) with standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    run_with(args, &mut out, &mut err)
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.cmd, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Res {
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    Graph::from_json(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_stream(path: &Path) -> Result<FactStream, Failure> {
    FactStream::read(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn say(out: &mut dyn Write, text: &str) -> Res {
    writeln!(out, "{text}").map_err(|e| Failure::Usage(e.to_string()))
}

fn dispatch(cmd: Cmd, out: &mut dyn Write) -> Res {
    match cmd {
        Cmd::Encode {
            graph,
            stages,
            depth,
            out: path,
        } => {
            let g = read_graph(&graph)?;
            let cfg = ClosureConfig { depth };
            let n = stages.unwrap_or_else(|| stage_bound(&g, &cfg));
            let s = encode_d0(&g, n, &cfg);
            write(&path, &s.write())?;
            say(out, &format!("wrote {} facts, {} elements", s.len(), s.introduced().len()))
        }
        Cmd::Decode { input, mode, out: path } => {
            let s = read_stream(&input)?;
            let d = decode_g(&s, mode).map_err(|e| Failure::Input(e.to_string()))?;
            let g = d.graph();
            match path {
                Some(p) => write(&p, &format!("{}\n", g.to_json()))?,
                None => say(out, &g.to_json())?,
            }
            say(out, &format!("nodes {} edges {} pending {}", g.node_count(), g.edge_count(), d.pending.len()))?;
            for (m, n) in &d.pending {
                say(out, &format!("PENDING {m} {n}"))?;
            }
            Ok(())
        }
        Cmd::Roundtrip {
            graph,
            stages,
            depth,
            mode,
        } => {
            let g = read_graph(&graph)?;
            let cfg = ClosureConfig { depth };
            let n = stages.unwrap_or_else(|| stage_bound(&g, &cfg));
            let s = encode_d0(&g, n, &cfg);
            let d = decode_g(&s, mode).map_err(|e| Failure::Semantic(e.to_string()))?;
            if d.is_complete() && d.graph() == g {
                say(out, "EQUAL")
            } else {
                say(out, &format!("DIFFERENT {}", d.graph().to_json()))?;
                for (m, n) in &d.pending {
                    say(out, &format!("PENDING {m} {n}"))?;
                }
                Err(Failure::Semantic(format!("round trip at {n} stages does not reproduce the graph")))
            }
        }
        Cmd::Transfer {
            iso,
            left,
            right,
            out: path,
        } => {
            let g: Vec<u32> = serde_json::from_str(&read(&iso)?)
                .map_err(|e| Failure::Input(format!("{}: {e}", iso.display())))?;
            let s = read_stream(&left)?;
            let t = read_stream(&right)?;
            let f = transfer_d0(&g, &s, &t).map_err(|e| match e {
                TransferError::NotAuditable(_) => Failure::Input(e.to_string()),
                _ => Failure::Semantic(e.to_string()),
            })?;
            write(&path, &format!("{}\n", f.to_json()))?;
            say(out, &format!("mapped {} of {} indices", f.defined_count(), s.introduced().len()))
        }
        Cmd::Curve {
            lambda,
            edge,
            x,
            y,
            multiple,
            torsion,
        } => curve(out, lambda, edge, x, y, multiple, torsion),
        Cmd::Classify { pair } => {
            #[derive(Deserialize)]
            #[serde(deny_unknown_fields)]
            struct Pair {
                p: String,
                q: String,
            }
            let text = read(&pair)?;
            let pr: Pair = serde_json::from_str(&text)
                .map_err(|e| Failure::Input(format!("{}: {e}", pair.display())))?;
            let p = parse_diffpoly(&pr.p).map_err(|e| Failure::Input(format!("p: {e}")))?;
            let q = parse_diffpoly(&pr.q).map_err(|e| Failure::Input(format!("q: {e}")))?;
            let v = classify_order0(&p, &q).map_err(|e| Failure::Input(e.to_string()))?;
            say(out, &v.to_string())
        }
        Cmd::Audit { input } => {
            let s = read_stream(&input)?;
            let r = audit(&s).map_err(|e| Failure::Semantic(e.to_string()))?;
            say(
                out,
                &format!(
                    "OK facts {} checked {} unverified {} a-elements {} curve-points {}",
                    r.facts, r.checked, r.unverified, r.a_elements, r.curve_points
                ),
            )
        }
    }
}

fn curve(
    out: &mut dyn Write,
    lambda: Option<String>,
    edge: Option<String>,
    x: Option<String>,
    y: Option<String>,
    multiple: Option<i64>,
    torsion: u32,
) -> Res {
    let elem = |s: &str| parse_element(s).map_err(|e| Failure::Input(format!("`{s}`: {e}")));
    let (c, point) = match (lambda, edge) {
        (Some(l), None) => {
            let c = Curve::new(elem(&l)?).map_err(|e| Failure::Semantic(e.to_string()))?;
            (c, None)
        }
        (None, Some(e)) => {
            let (m, n) = e
                .split_once(',')
                .and_then(|(m, n)| Some((m.trim().parse().ok()?, n.trim().parse().ok()?)))
                .ok_or_else(|| Failure::Usage(format!("--edge expects `m,n`, got `{e}`")))?;
            let e = EdgeId::new(m, n).ok_or_else(|| Failure::Usage("edge endpoints must differ".into()))?;
            (Curve::coding(e), Some(Curve::coding_point(e)))
        }
        _ => return Err(Failure::Usage("give exactly one of --lambda or --edge".into())),
    };
    let point = match (x, y) {
        (Some(x), Some(y)) => Some(CurvePoint::affine(elem(&x)?, elem(&y)?)),
        _ => point,
    };
    say(out, &format!("lambda {}", c.lambda()))?;
    for t in c.two_torsion() {
        say(out, &format!("two-torsion {t}"))?;
    }
    let Some(p) = point else { return Ok(()) };
    if !c.on_curve(&p) {
        return Err(Failure::Semantic(format!("{p} is not on the curve")));
    }
    say(out, &format!("point {p}"))?;
    match c.is_torsion_upto(&p, torsion) {
        Some(k) => say(out, &format!("order {k}"))?,
        None => say(out, &format!("no torsion up to order {torsion}"))?,
    }
    if let Some(k) = multiple {
        say(out, &format!("multiple {k} {}", c.scalar_mul(k, &p)))?;
    }
    Ok(())
}
