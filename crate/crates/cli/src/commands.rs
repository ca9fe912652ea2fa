use std::fs;
use std::path::Path;
use std::time::Duration;

use midgraph::bicombing::{geodesic_grid, sample_level, verify_geodesic, DyadicTime};
use midgraph::export::{
    power_rows, write_delta_csv, write_distance_csv, write_dot, write_edges_csv, write_power_csv,
    write_vertices_csv,
};
use midgraph::extremal::{
    bound_certificate, clique_search, estimate_split, noncompactness_ratio, parameter_check, separated_set,
    turan_check, BitGraph, CliqueMode, CliqueOptions, Complement, CountBook, PowerGraph, ALPHA,
    DEFAULT_MAX_BFS_WORK,
};
use midgraph::verify::{run_verify, Status, VerifyConfig};
use midgraph::{predict_vcount, Hierarchy, Metrics, VertexId};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::cache;
use crate::config::{Command, Format, Mode, RunConfig};
use crate::Failure;

/// Largest `k` scanned by the parameter check.
const PARAMETER_K_MAX: u32 = 20;

pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<(), Failure> {
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    fs::create_dir_all(&cfg.out)?;
    fs::write(cfg.out.join("run.conf"), cfg.to_file_string())?;
    match cmd {
        Command::Build => build(cfg),
        Command::Distances { from, to } => distances(cfg, from.as_deref(), to.as_deref()),
        Command::Delta => delta(cfg),
        Command::Geodesic { from, to, depth } => geodesic(cfg, from, to, *depth),
        Command::Power => power(cfg),
        Command::Clique => clique(cfg),
        Command::Separated => separated(cfg),
        Command::Bound => bound(cfg),
        Command::Verify => verify(cfg),
        Command::Export => export(cfg),
    }
}

fn cache_dir(cfg: &RunConfig) -> std::path::PathBuf {
    cfg.out.join("cache")
}

/// The cached hierarchy when a valid cache exists, else a fresh build.
fn hierarchy(cfg: &RunConfig) -> Result<Hierarchy, Failure> {
    let n = cfg.level()?;
    match cache::load(&cache_dir(cfg), cfg.n0, n) {
        Ok(Some(h)) => return Ok(h),
        Ok(None) => {}
        Err(e) => eprintln!("warning: {e}; rebuilding"),
    }
    Ok(Hierarchy::build(cfg.n0, n, &cfg.budget())?)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    fs::write(path, serde_json::to_string_pretty(value).expect("serializable") + "\n")?;
    Ok(())
}

fn create(path: &Path) -> Result<std::io::BufWriter<fs::File>, Failure> {
    Ok(std::io::BufWriter::new(fs::File::create(path)?))
}

fn vertex(hier: &Hierarchy, n: u32, enc: &str) -> Result<VertexId, Failure> {
    let v = hier
        .store()
        .lookup(enc)?
        .ok_or_else(|| Failure::Usage(format!("{enc} is not a vertex of V_{n}")))?;
    hier.index_in(n, v)?;
    Ok(v)
}

fn power_of(cfg: &RunConfig) -> Result<u32, Failure> {
    cfg.power
        .ok_or_else(|| Failure::Usage("--power is required".into()))
}

fn build(cfg: &RunConfig) -> Result<(), Failure> {
    let n = cfg.level()?;
    let hier = hierarchy(cfg)?;
    cache::store(&cache_dir(cfg), &hier)?;
    let mut out = csv::Writer::from_path(cfg.out.join("counts.csv")).map_err(std::io::Error::from)?;
    out.write_record(["n", "vcount", "ecount", "predicted_vcount"])
        .map_err(std::io::Error::from)?;
    let mut levels = Vec::new();
    for g in hier.levels() {
        let predicted = predict_vcount(cfg.n0, g.n()).to_string();
        out.write_record([
            g.n().to_string(),
            g.vcount().to_string(),
            g.ecount().to_string(),
            predicted.clone(),
        ])
        .map_err(std::io::Error::from)?;
        levels.push(json!({"n": g.n(), "vcount": g.vcount(), "ecount": g.ecount(), "predicted_vcount": predicted}));
        println!("G_{}: {} vertices, {} edges", g.n(), g.vcount(), g.ecount());
    }
    out.flush()?;
    write_json(&cfg.out.join("build.json"), &json!({"n0": cfg.n0, "level": n, "levels": levels}))
}

fn distances(cfg: &RunConfig, from: Option<&str>, to: Option<&str>) -> Result<(), Failure> {
    let n = cfg.level()?;
    let hier = hierarchy(cfg)?;
    let metrics = Metrics::new(&hier);
    match (from, to) {
        (Some(a), Some(b)) => {
            let (x, y) = (vertex(&hier, n, a)?, vertex(&hier, n, b)?);
            let sources = [x, y];
            let table = midgraph::metric::bfs_distance(hier.level(n), hier.store(), &sources)?;
            let d = table.d(hier.index_in(n, x)?, hier.index_in(n, y)?);
            let rho = midgraph::metric::scaled(d, n);
            let interval = midgraph::RhoInterval::from_upper(rho, n);
            println!("d_{n}({a}, {b}) = {d}, rho in [{}, {}]", interval.lower, interval.upper);
            write_json(
                &cfg.out.join("distance.json"),
                &json!({"level": n, "x": a, "y": b, "d": d, "rho_n": rho, "interval": interval}),
            )
        }
        (None, None) => {
            let path = cfg.out.join(format!("distances_G{n}.csv"));
            write_distance_csv(&metrics, n, create(&path)?)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        _ => Err(Failure::Usage("--from and --to go together".into())),
    }
}

fn delta(cfg: &RunConfig) -> Result<(), Failure> {
    let n = cfg.level()?;
    let hier = hierarchy(cfg)?;
    let path = cfg.out.join(format!("delta_G{n}.csv"));
    write_delta_csv(&hier, n, create(&path)?)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn geodesic(cfg: &RunConfig, from: &str, to: &str, depth: u32) -> Result<(), Failure> {
    let n = cfg.level()?;
    if depth > 20 {
        return Err(Failure::Usage("--depth above 20".into()));
    }
    let mut hier = hierarchy(cfg)?;
    let (x, y) = (vertex(&hier, n, from)?, vertex(&hier, n, to)?);
    let needed = sample_level(hier.store(), x, y, depth);
    let points = geodesic_grid(hier.store_mut(), x, y, depth);
    let store = hier.store();
    let samples: Vec<_> = DyadicTime::grid(depth)
        .zip(&points)
        .map(|(t, &p)| json!({"t": t, "point": store.encode(p), "level": store.level(p)}))
        .collect();
    let metrics = Metrics::new(&hier);
    let check = if needed <= n {
        Some(verify_geodesic(&metrics, x, y, depth, n)?)
    } else {
        None
    };
    if let Some(c) = &check {
        println!("{} interval checks, {} violations", c.instances, c.violations);
    }
    write_json(
        &cfg.out.join("geodesic.json"),
        &json!({"level": n, "x": from, "y": to, "depth": depth, "needed_level": needed, "samples": samples, "interval_check": check}),
    )?;
    match check {
        Some(c) if !c.passed() => Err(Failure::Invariant("geodesic interval check failed".into())),
        _ => Ok(()),
    }
}

fn power(cfg: &RunConfig) -> Result<(), Failure> {
    let n = cfg.level()?;
    let hier = hierarchy(cfg)?;
    let book = CountBook::from_hierarchy(&hier, DEFAULT_MAX_BFS_WORK);
    let rows = power_rows(&book, cfg.power.unwrap_or(8));
    write_power_csv(&rows, create(&cfg.out.join("power.csv"))?)?;
    println!("{} power counts", rows.len());
    if let Some(k) = cfg.k {
        let r = noncompactness_ratio(hier.level(n), k, DEFAULT_MAX_BFS_WORK)?;
        println!("G_{n}, m = {}: ratio {}", r.m, r.ratio);
        write_json(&cfg.out.join("noncompactness.json"), &r)?;
    }
    Ok(())
}

fn clique_options(cfg: &RunConfig) -> CliqueOptions {
    CliqueOptions {
        time_cap: cfg.time_cap.map(Duration::from_secs),
        seed: cfg.seed,
        ..CliqueOptions::default()
    }
}

fn clique_mode(cfg: &RunConfig) -> Result<CliqueMode, Failure> {
    match cfg.mode.unwrap_or(Mode::Exact) {
        Mode::Exact => Ok(CliqueMode::Exact),
        Mode::Greedy => Ok(CliqueMode::Greedy),
        Mode::Sampled => Err(Failure::Usage("clique search takes --mode exact or greedy".into())),
    }
}

fn clique(cfg: &RunConfig) -> Result<(), Failure> {
    let n = cfg.level()?;
    let m = power_of(cfg)?;
    let hier = hierarchy(cfg)?;
    let metrics = Metrics::new(&hier);
    let g = BitGraph::from_oracle(&Complement(PowerGraph::new(metrics.table(n)?, m)?));
    let found = clique_search(&g, clique_mode(cfg)?, &clique_options(cfg));
    let level = hier.level(n);
    let (v, e, w) = (g.len() as u64, g.ecount(), found.size() as u64);
    println!("complement of G_{n}^{m}: clique of size {w} ({:?})", found.status);
    write_json(
        &cfg.out.join("clique.json"),
        &json!({
            "level": n,
            "m": m,
            "vcount": v,
            "complement_ecount": e,
            "size": w,
            "status": found.status,
            "nodes": found.nodes,
            "vertices": found.vertices.iter().map(|&i| hier.store().encode(level.vertex(i))).collect::<Vec<_>>(),
            "turan_holds_at_size": turan_check(v, e, w.max(1)),
            "turan_holds_below_size": (w >= 2).then(|| turan_check(v, e, w - 1)),
        }),
    )
}

fn separated(cfg: &RunConfig) -> Result<(), Failure> {
    let n = cfg.level()?;
    let m = power_of(cfg)?;
    let hier = hierarchy(cfg)?;
    let metrics = Metrics::new(&hier);
    let c = separated_set(&metrics, n, m, clique_mode(cfg)?, &clique_options(cfg))?;
    println!(
        "{} vertices of G_{n} pairwise at distance > {m}; rho >= {}",
        c.len(),
        c.rho_lower
    );
    write_json(&cfg.out.join("separated.json"), &c)
}

fn bound(cfg: &RunConfig) -> Result<(), Failure> {
    let n = cfg.level()?;
    let hier = hierarchy(cfg)?;
    let book = CountBook::from_hierarchy(&hier, DEFAULT_MAX_BFS_WORK);
    let mut estimates = Vec::new();
    if n >= 2 {
        for m in 1..=cfg.power.unwrap_or(8) {
            estimates.push(estimate_split(&book, n, m)?);
        }
    }
    let certificate = cfg.k.map(|k| bound_certificate(&book, n, k)).transpose()?;
    let parameters = cfg
        .epsilon
        .map(|eps| parameter_check(&book, eps, ALPHA, PARAMETER_K_MAX, cfg.k))
        .transpose()?;
    let unsound = estimates.iter().filter(|e| e.holds == Some(false)).count();
    let bad_cert = certificate.as_ref().is_some_and(|c| !c.passed());
    write_json(
        &cfg.out.join("bound.json"),
        &json!({"level": n, "estimates": estimates, "certificate": certificate, "parameters": parameters}),
    )?;
    println!("{} split estimates, {unsound} unsound", estimates.len());
    if let Some(p) = &parameters {
        match p.smallest_k {
            Some(k) => println!("smallest k passing the parameter check: {k}"),
            None => println!("no k <= {PARAMETER_K_MAX} passes the parameter check"),
        }
    }
    if unsound > 0 || bad_cert {
        return Err(Failure::Invariant("edge-count bound violated".into()));
    }
    Ok(())
}

fn verify(cfg: &RunConfig) -> Result<(), Failure> {
    let hier = hierarchy(cfg)?;
    let vc = VerifyConfig {
        exhaustive: cfg.exhaustive,
        seed: cfg.seed,
        clique: clique_options(cfg),
        ..VerifyConfig::default()
    };
    let summary = run_verify(&hier, &vc);
    for c in &summary.checks {
        let status = match c.status {
            Status::Pass => "pass",
            Status::Fail if c.gating => "FAIL",
            Status::Fail => "finding",
            Status::SkippedBudget => "skipped-budget",
        };
        let level = c.level.map(|l| format!(" G_{l}")).unwrap_or_default();
        println!("{status:>14}  {}{level}  ({} instances, {} violations)", c.check, c.instances, c.violations);
    }
    fs::write(cfg.out.join("verify.json"), summary.to_json() + "\n")?;
    if summary.passed {
        Ok(())
    } else {
        Err(Failure::Invariant(format!("{} gating checks failed", summary.gating_failures)))
    }
}

fn export(cfg: &RunConfig) -> Result<(), Failure> {
    let n = cfg.level()?;
    let hier = hierarchy(cfg)?;
    let metrics = Metrics::new(&hier);
    let format = cfg.format.unwrap_or(Format::Dot);
    let mut files = Vec::new();
    let mut add = |name: String| -> std::path::PathBuf {
        files.push(name.clone());
        cfg.out.join(name)
    };
    match format {
        Format::Dot => write_dot(&hier, n, create(&add(format!("G{n}.dot")))?)?,
        Format::Csv => {
            write_vertices_csv(&hier, n, create(&add(format!("G{n}_vertices.csv")))?)?;
            write_edges_csv(&hier, n, create(&add(format!("G{n}_edges.csv")))?)?;
            write_delta_csv(&hier, n, create(&add(format!("G{n}_delta.csv")))?)?;
            if metrics.affordable(n) {
                write_distance_csv(&metrics, n, create(&add(format!("G{n}_distances.csv")))?)?;
            }
        }
        Format::Json => {
            let g = hier.level(n);
            let store = hier.store();
            let vertices: Vec<_> = g
                .vertices()
                .iter()
                .map(|&v| json!({"vertex": store.encode(v), "level": store.level(v)}))
                .collect();
            let edges: Vec<[u32; 2]> = g.edges().map(|(a, b)| [a, b]).collect();
            write_json(
                &add(format!("G{n}.json")),
                &json!({"n0": cfg.n0, "level": n, "vertices": vertices, "edges": edges}),
            )?;
        }
    }
    let mut manifest = Vec::new();
    for name in &files {
        let bytes = fs::read(cfg.out.join(name))?;
        manifest.push(json!({"file": name, "bytes": bytes.len(), "sha256": hex::encode(Sha256::digest(&bytes))}));
        println!("wrote {name}");
    }
    write_json(
        &cfg.out.join("manifest.json"),
        &json!({"n0": cfg.n0, "level": n, "format": format.to_string(), "files": manifest}),
    )
}
