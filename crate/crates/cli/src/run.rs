use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;
use std::time::Instant;

use fourpt::fourpoint::four_point_once;
use fourpt::generators::{half_edge_graph, GeneratorRegistry, HalfEdgeSpec, Params};
use fourpt::graph::{load_edge_list, write_edge_list, BipartiteGraph, Edge, LoadOptions, VertexOrder};
use fourpt::lrstat::{degree_association_test, grouped_lr, lr_statistic, variance_test, RateModel};
use fourpt::ordering::{
    ordered_four_point, Normalization, OrderOutcome, OrderingRegistry, OrderingStrategy, PowerMethodConfig,
};
use fourpt::permpattern::random_permutation;
use fourpt::rng::{derive_seed, seeded_rng};
use rand::seq::index::sample;
use serde_json::{json, Value};
use thiserror::Error;

use crate::args::*;
use crate::manifest::{sha256_hex, RunManifest};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] fourpt::Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 1 usage, 2 data, 3 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(fourpt::Error::InvalidParameter(_)) => 1,
            CliError::Core(fourpt::Error::Numeric(_)) => 3,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read_input(path: &Path) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    if path.as_os_str() == "-" {
        io::stdin().read_to_end(&mut bytes)?;
    } else {
        File::open(path)
            .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))?
            .read_to_end(&mut bytes)?;
    }
    Ok(bytes)
}

fn load(input: &InputOpt) -> Result<(BipartiteGraph, String)> {
    let bytes = read_input(&input.input)?;
    let g = load_edge_list(&bytes[..], LoadOptions {
            dedup: input.dedup,
            sort_labels: input.sort_labels,
        })?;
    Ok((g, sha256_hex(&bytes)))
}

fn create(path: &Path) -> Result<Box<dyn Write>> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(BufWriter::new(io::stdout().lock())));
    }
    let f = File::create(path).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    Ok(Box::new(BufWriter::new(f)))
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn power_config(p: &PowerOpt) -> Result<PowerMethodConfig> {
    if !(p.delta > 0.0) {
        return Err(CliError::Usage(format!("--delta must be positive, got {}", p.delta)));
    }
    if !(p.max_iter_factor > 0.0) {
        return Err(CliError::Usage("--max-iter-factor must be positive".into()));
    }
    Ok(PowerMethodConfig {
        delta: p.delta,
        max_iter_factor: p.max_iter_factor,
        normalization: match p.norm {
            NormArg::L2 => Normalization::L2,
            NormArg::L1 => Normalization::L1,
        },
        ..PowerMethodConfig::default()
    })
}

fn order_json(method: OrderMethod, o: &OrderOutcome) -> Value {
    json!({
        "method": method.name(),
        "notice": o.notice,
        "diagnostics": o.diagnostics,
    })
}

pub fn fourpoint(args: &FourpointArgs) -> Result<()> {
    let started = Instant::now();
    let seed = args.seed.seed.resolve();
    if args.repeats == 0 {
        return Err(CliError::Usage("--repeats must be at least 1".into()));
    }
    let (g, digest) = load(&args.input)?;
    let registry = OrderingRegistry::with_defaults(power_config(&args.power)?);
    let strategy = registry.get(args.order.name())?;
    let run = ordered_four_point(&g, strategy, args.split, seed, args.repeats)?;

    if let Some(notice) = &run.order.notice {
        eprintln!("note: {notice}");
    }
    println!(
        "{} edges ({} x {}), order {}{}, {} tested",
        g.n_edges(),
        g.n_left(),
        g.n_right(),
        args.order.name(),
        if args.split { " (split)" } else { "" },
        run.tested_edges
    );
    for r in &run.results {
        println!("T4 = {:.3}  D4 = {:.4}  p = {:.3e}  blocks = {}", r.t4, r.d4, r.p_value, r.blocks);
    }
    if let Some(path) = &args.csv {
        let mut out = create(path)?;
        out.write_all(run.results[0].histogram().to_csv().as_bytes())?;
        out.flush()?;
    }
    if let Some(path) = &args.json {
        let mut manifest = RunManifest::new("fourpoint", seed)
            .param("repeats", args.repeats)
            .param("order", args.order.name())
            .param("split", args.split)
            .param("dedup", args.input.dedup)
            .param("sortLabels", args.input.sort_labels)
            .param("delta", args.power.delta)
            .param("maxIterFactor", args.power.max_iter_factor)
            .param("norm", format!("{:?}", args.power.norm).to_lowercase());
        manifest.input_digest = Some(digest);
        let doc = json!({
            "manifest": manifest.finish(started),
            "graph": {"nLeft": g.n_left(), "nRight": g.n_right(), "nEdges": g.n_edges()},
            "order": order_json(args.order, &run.order),
            "testedEdges": run.tested_edges,
            "results": run.results,
        });
        write_json(path, &doc)?;
    }
    Ok(())
}

pub fn generate(args: &GenerateArgs) -> Result<()> {
    let started = Instant::now();
    let registry = GeneratorRegistry::default();
    if args.list {
        for g in registry.iter() {
            println!("{:<12}{}", g.name(), g.summary());
        }
        return Ok(());
    }
    let name = args.model.as_deref().expect("clap enforces a model");
    let generator = registry.get(name)?;
    let params = Params::parse(&args.params)?;
    let seed = args.seed.seed.resolve();
    let out = generator.generate(&params, seed)?;

    let mut w = create(&args.out)?;
    match (&out.graph, &out.permutation) {
        (Some(g), _) => write_edge_list(g, &mut w)?,
        (None, Some(p)) => writeln!(w, "{p}")?,
        (None, None) => unreachable!("generators always produce output"),
    }
    w.flush()?;
    drop(w);

    if let Some(path) = &args.truth {
        let truth = out
            .truth
            .as_ref()
            .ok_or_else(|| CliError::Usage(format!("generator '{name}' has no planted blocks")))?;
        write_json(path, &serde_json::to_value(truth)?)?;
    }
    if let Some(path) = &args.manifest {
        let mut m = RunManifest::new("generate", seed).param("model", name);
        for (k, v) in params.iter() {
            m = m.param(k, v);
        }
        write_json(path, &serde_json::to_value(m.finish(started))?)?;
    }
    if let Some(g) = &out.graph {
        eprintln!("{name}: {} edges, {} x {}", g.n_edges(), g.n_left(), g.n_right());
    }
    Ok(())
}

fn write_order(path: &Path, g: &BipartiteGraph, order: &VertexOrder, left: bool) -> Result<()> {
    let mut out = create(path)?;
    for (rank, v) in order.sequence().into_iter().enumerate() {
        let label = if left { g.left_label(v) } else { g.right_label(v) };
        writeln!(out, "{label}\t{rank}")?;
    }
    out.flush()?;
    Ok(())
}

fn with_suffix(prefix: &Path, suffix: &str) -> std::path::PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    s.into()
}

pub fn order(args: &OrderArgs) -> Result<()> {
    let started = Instant::now();
    let seed = args.seed.seed.resolve();
    let (g, digest) = load(&args.input)?;
    let registry = OrderingRegistry::with_defaults(power_config(&args.power)?);
    let strategy: &dyn OrderingStrategy = registry.get(args.method.name())?;
    let outcome = strategy.order(&g, derive_seed(seed, 0x0bde))?;
    if let Some(notice) = &outcome.notice {
        eprintln!("note: {notice}");
    }
    write_order(&with_suffix(&args.out, ".left.tsv"), &g, &outcome.left, true)?;
    write_order(&with_suffix(&args.out, ".right.tsv"), &g, &outcome.right, false)?;
    let mut manifest = RunManifest::new("order", seed)
        .param("method", args.method.name())
        .param("delta", args.power.delta)
        .param("maxIterFactor", args.power.max_iter_factor)
        .param("dedup", args.input.dedup)
        .param("sortLabels", args.input.sort_labels);
    manifest.input_digest = Some(digest);
    let doc = json!({
        "manifest": manifest.finish(started),
        "order": order_json(args.method, &outcome),
    });
    write_json(&with_suffix(&args.out, ".json"), &doc)?;
    if let Some(d) = &outcome.diagnostics {
        println!(
            "lambda1 = {:.6}  iterations = {}  residual = {:.3e}  converged = {}",
            d.lambda1_estimate, d.iterations, d.residual, d.converged
        );
    }
    Ok(())
}

pub fn lrstat(args: &LrstatArgs) -> Result<()> {
    let started = Instant::now();
    let (g, digest) = load(&args.input)?;
    let (name, result) = match args.test {
        LrTest::Lr => {
            let r = match args.model {
                LrModel::Grouped => grouped_lr(&g)?,
                LrModel::Marginal => lr_statistic(&g, &RateModel::Marginal)?,
                LrModel::Constant => lr_statistic(&g, &RateModel::Constant)?,
            };
            println!("xi = {:.6}  omega = {:.6}  p = {:.4e}", r.xi, r.omega, r.p_value_two_sided);
            ("lr", serde_json::to_value(r)?)
        }
        LrTest::Variance => {
            let r = variance_test(&g)?;
            println!("statistic = {:.3}  df = {}  p = {:.4e}", r.statistic, r.degrees_of_freedom, r.p_value);
            ("variance", serde_json::to_value(r)?)
        }
        LrTest::DegreeAssoc => {
            let r = degree_association_test(&g, args.size)?;
            println!(
                "xi = {:.6}  critical = {:.4}  p = {:.4e}  reject = {}",
                r.xi, r.critical_value, r.p_value, r.reject
            );
            ("degree-assoc", serde_json::to_value(r)?)
        }
    };
    if let Some(path) = &args.json {
        let mut manifest = RunManifest::new("lrstat", 0)
            .param("test", name)
            .param("model", format!("{:?}", args.model).to_lowercase())
            .param("size", args.size)
            .param("dedup", args.input.dedup)
            .param("sortLabels", args.input.sort_labels);
        manifest.input_digest = Some(digest);
        write_json(
            path,
            &json!({"manifest": manifest.finish(started), "test": name, "result": result}),
        )?;
    }
    Ok(())
}

/// Below this many edges fixed costs dominate and ratios are not meaningful.
const OVERHEAD_EDGES: usize = 20_000;

fn bench_graph(base: Option<&BipartiteGraph>, size: usize, seed: u64) -> Result<BipartiteGraph> {
    match base {
        Some(g) => {
            if size > g.n_edges() {
                return Err(CliError::Usage(format!("size {size} exceeds the input's {} edges", g.n_edges())));
            }
            let mut rng = seeded_rng(seed);
            let mut keep = sample(&mut rng, g.n_edges(), size).into_vec();
            keep.sort_unstable();
            let edges: Vec<Edge> = keep.iter().map(|&e| g.edges()[e]).collect();
            Ok(BipartiteGraph::new(g.n_left(), g.n_right(), edges)?.compact().graph)
        }
        None => {
            let (n, m) = ((size / 4).max(1), (size / 5).max(1));
            let spec = HalfEdgeSpec::balanced(n, m, 4)?;
            Ok(half_edge_graph(&spec, &random_permutation(spec.n_edges(), seed))?)
        }
    }
}

fn min_time_ms(repeats: usize, mut f: impl FnMut() -> Result<()>) -> Result<f64> {
    let mut best = f64::INFINITY;
    for _ in 0..repeats {
        let t = Instant::now();
        f()?;
        best = best.min(t.elapsed().as_secs_f64() * 1e3);
    }
    Ok(best)
}

pub fn bench(args: &BenchArgs) -> Result<()> {
    let seed = args.seed.seed.resolve();
    if args.sizes.is_empty() || args.sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Usage("--sizes must be non-empty and strictly ascending".into()));
    }
    if args.repeats == 0 {
        return Err(CliError::Usage("--repeats must be at least 1".into()));
    }
    let base = match &args.input {
        Some(path) => Some(load_edge_list(&read_input(path)?[..], LoadOptions::default())?),
        None => None,
    };
    let natural = fourpt::ordering::NaturalOrder {
        config: PowerMethodConfig::default(),
    };
    let mut out = create(&args.out)?;
    writeln!(out, "edges,fourpoint_ms,fourpoint_ns_per_edge,natural_ms,natural_ns_per_edge,ratio_to_previous,note")?;
    let mut previous: Option<f64> = None;
    for (k, &size) in args.sizes.iter().enumerate() {
        let g = bench_graph(base.as_ref(), size, derive_seed(seed, k as u64))?;
        let n = g.n_edges() as f64;
        let fp = min_time_ms(args.repeats, || {
            four_point_once(&g, seed)?;
            Ok(())
        })?;
        let nat = if args.no_natural {
            None
        } else {
            Some(min_time_ms(args.repeats, || {
                natural.order(&g, seed)?;
                Ok(())
            })?)
        };
        let ratio = previous.map(|p| fp / p);
        previous = Some(fp);
        let fmt = |x: Option<f64>| x.map(|v| format!("{v:.4}")).unwrap_or_default();
        writeln!(
            out,
            "{},{:.4},{:.3},{},{},{},{}",
            g.n_edges(),
            fp,
            fp * 1e6 / n,
            fmt(nat),
            fmt(nat.map(|t| t * 1e6 / n)),
            fmt(ratio),
            if g.n_edges() < OVERHEAD_EDGES { "overhead-dominated" } else { "" }
        )?;
    }
    out.flush()?;
    Ok(())
}
