//! `fig8`: invariants of Dehn surgeries on the figure-eight knot, their flat
//! connection data and the verification suites.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 usage or
//! configuration error.

mod cache;
mod config;

use anyhow::anyhow;
use cache::Cache;
use clap::{Args, Parser, Subcommand};
use config::{OutputFormat, RunConfig};
use fig8::chernsimons::annotate;
use fig8::invariants::{jones_fig8_sine, tau_rational, LevelContext, SurgeryCoefficient};
use fig8::repvar::{enumerate_su2_moduli, ClassKind};
use fig8::saddle::{
    classify_nondegenerate, jones_leading, leading_tau_asymptotics, su2_critical_points, verify_cs_equals_psi,
    AsymptoticPrediction,
};
use fig8::verify::{self, VerificationReport};
use fig8::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fig8", version, about = "Quantum invariants of surgeries on the figure-eight knot")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Configuration file with `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Do not read or write the invariant cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[arg(long, global = true)]
    quad_tol: Option<f64>,
    /// Output format for tables: csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Multiplicity of every term of the asymptotic prediction.
    #[arg(long = "m", global = true)]
    m_multiplicity: Option<i64>,
    /// zero or calibrate.
    #[arg(long, global = true)]
    sigma_mode: Option<String>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct Slope {
    #[arg(short = 'p', allow_negative_numbers = true)]
    p: i64,
    #[arg(short = 'q', default_value_t = 1, allow_negative_numbers = true)]
    q: i64,
}

#[derive(Subcommand)]
enum Command {
    /// Exact tau_r(M_{p/q}) for a range of levels, e.g. `-r 5..40` or `-r 5,7,9`.
    Invariant {
        #[command(flatten)]
        slope: Slope,
        #[arg(short = 'r')]
        r: String,
    },
    /// J'_K(r) of the figure-eight knot against its leading growth.
    Jones {
        #[arg(short = 'r')]
        r: String,
    },
    /// SU(2) stationary points with phases, Chern-Simons values and Hessians.
    Critical {
        #[command(flatten)]
        slope: Slope,
    },
    /// Flat SU(2) connection classes with their Chern-Simons invariants.
    ChernSimons {
        #[command(flatten)]
        slope: Slope,
    },
    /// Run a verification suite and write its JSON reports.
    Verify {
        /// specfun, qdilog, invariants, repvar, chernsimons, saddle, contour, volume or aec.
        suite: String,
        /// Comma separated slopes such as `1/1,-2/1`.
        #[arg(long, allow_hyphen_values = true)]
        pq: Option<String>,
        /// Levels for the scans.
        #[arg(long = "r")]
        r: Option<String>,
        /// Directory for the reports.
        #[arg(long, default_value = "reports")]
        out: PathBuf,
    },
    /// Exact invariants against the leading asymptotics over slopes and levels.
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        pq: String,
        #[arg(long = "r")]
        r: String,
    },
    /// The leading asymptotic prediction for one slope.
    Asymptotics {
        #[command(flatten)]
        slope: Slope,
        #[arg(short = 'r', default_value = "50,100,200,400")]
        r: String,
    },
}

enum Failure {
    Usage(anyhow::Error),
    Check(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(anyhow!("{e}"))
}

fn parse_levels(s: &str) -> Result<Vec<u32>, Failure> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u32 = a.trim().parse().map_err(|_| usage(format!("bad level range {part:?}")))?;
            let b: u32 = b.trim().parse().map_err(|_| usage(format!("bad level range {part:?}")))?;
            if b < a {
                return Err(usage(format!("empty level range {part:?}")));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| usage(format!("bad level {part:?}")))?);
        }
    }
    if out.is_empty() || out.iter().any(|&r| r < 2) {
        return Err(usage("levels must be integers >= 2"));
    }
    Ok(out)
}

fn parse_slopes(s: &str) -> Result<Vec<SurgeryCoefficient>, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|part| {
            let (p, q) = part.split_once('/').unwrap_or((part, "1"));
            let p: i64 = p.trim().parse().map_err(|_| usage(format!("bad slope {part:?}")))?;
            let q: i64 = q.trim().parse().map_err(|_| usage(format!("bad slope {part:?}")))?;
            SurgeryCoefficient::new(p, q).map_err(usage)
        })
        .collect()
}

fn surgery(sl: &Slope) -> Result<SurgeryCoefficient, Failure> {
    SurgeryCoefficient::new(sl.p, sl.q).map_err(usage)
}

fn flag_layer(g: &GlobalOpts) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    let mut put = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            m.insert(k.to_string(), v);
        }
    };
    put("threads", g.threads.map(|v| v.to_string()));
    put("cache_dir", g.cache_dir.as_ref().map(|p| p.display().to_string()));
    put("quad_tol", g.quad_tol.map(|v| v.to_string()));
    put("output_format", g.format.clone());
    put("m_multiplicity", g.m_multiplicity.map(|v| v.to_string()));
    put("sigma_mode", g.sigma_mode.clone());
    m
}

/// Exact invariants for `jobs`, served from the cache where possible and
/// otherwise computed in parallel; results follow the order of `jobs`.
fn taus(jobs: &[(SurgeryCoefficient, u32)], cache: &mut Option<Cache>) -> Result<Vec<Complex64>, Failure> {
    let mut out: Vec<Option<Complex64>> =
        jobs.iter().map(|(s, r)| cache.as_mut().and_then(|c| c.get(s.p, s.q, *r))).collect();
    let missing: Vec<usize> = (0..jobs.len()).filter(|&i| out[i].is_none()).collect();
    let computed: Vec<(usize, Complex64)> = missing
        .par_iter()
        .map(|&i| {
            let (s, r) = &jobs[i];
            let ctx = LevelContext::new(*r).expect("levels validated");
            (i, tau_rational(&ctx, s))
        })
        .collect();
    for (i, v) in computed {
        out[i] = Some(v);
        if let Some(c) = cache.as_mut() {
            let (s, r) = &jobs[i];
            c.insert(s.p, s.q, *r, v);
        }
    }
    if let Some(c) = cache.as_mut() {
        c.flush().map_err(|e| Failure::Runtime(anyhow!("cache write failed: {e}")))?;
        eprintln!("cache: {} hits, {} computed, {} stored", c.hits, missing.len(), c.len());
    }
    Ok(out.into_iter().map(|v| v.expect("filled")).collect())
}

fn emit_table<T: Serialize>(rows: &[T], fmt: OutputFormat) -> Result<(), Failure> {
    let stdout = std::io::stdout();
    match fmt {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(stdout.lock());
            for row in rows {
                w.serialize(row).map_err(|e| Failure::Runtime(e.into()))?;
            }
            w.flush().map_err(|e| Failure::Runtime(e.into()))?;
        }
        OutputFormat::Json => {
            let mut lock = stdout.lock();
            serde_json::to_writer_pretty(&mut lock, rows).map_err(|e| Failure::Runtime(e.into()))?;
            writeln!(lock).ok();
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(v: &T) -> Result<(), Failure> {
    let mut lock = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut lock, v).map_err(|e| Failure::Runtime(e.into()))?;
    writeln!(lock).ok();
    Ok(())
}

#[derive(Serialize)]
struct InvariantRow {
    r: u32,
    tau_re: f64,
    tau_im: f64,
    abs: f64,
}

#[derive(Serialize)]
struct JonesRow {
    r: u32,
    jones: f64,
    leading: f64,
    ratio: f64,
}

#[derive(Serialize)]
pub struct SweepRow {
    p: i64,
    q: i64,
    r: u32,
    tau_re: f64,
    tau_im: f64,
    pred_re: f64,
    pred_im: f64,
    rel_residual: f64,
}

#[derive(Serialize)]
struct PointRow {
    theta: f64,
    eps: String,
    x: f64,
    y_re: f64,
    y_im: f64,
    a: i64,
    b: i64,
    n: i64,
    psi: f64,
    cs: f64,
    defect: f64,
    h11: [f64; 2],
    h12: [f64; 2],
    h22: [f64; 2],
    det_h: f64,
    nondegenerate: bool,
    degenerate_candidate: bool,
    positive_definite: String,
}

#[derive(Serialize)]
struct CriticalReport {
    p: i64,
    q: i64,
    max_defect: f64,
    points: Vec<PointRow>,
}

fn c2(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn cmd_critical(s: &SurgeryCoefficient) -> Result<(), Failure> {
    let pts = su2_critical_points(s).map_err(|e| Failure::Runtime(e.into()))?;
    let rep = verify_cs_equals_psi(s).map_err(|e| Failure::Runtime(e.into()))?;
    let mut points = Vec::new();
    for (pt, row) in pts.iter().zip(&rep.rows) {
        let cls = classify_nondegenerate(s, pt);
        points.push(PointRow {
            theta: row.theta,
            eps: format!("{:?}", row.eps).to_lowercase(),
            x: pt.x.re,
            y_re: pt.y.re,
            y_im: pt.y.im,
            a: pt.index.a,
            b: pt.index.b,
            n: pt.index.n,
            psi: row.psi,
            cs: row.cs,
            defect: row.defect,
            h11: c2(pt.hessian.h11),
            h12: c2(pt.hessian.h12),
            h22: c2(pt.hessian.h22),
            det_h: pt.det_h.re,
            nondegenerate: cls.nondegenerate,
            degenerate_candidate: cls.degenerate_candidate,
            positive_definite: format!("{:?}", pt.positive_definite.method).to_lowercase(),
        });
    }
    emit_json(&CriticalReport { p: s.p, q: s.q, max_defect: rep.max_defect, points })
}

#[derive(Serialize)]
struct ClassRow {
    kind: &'static str,
    j: Option<i64>,
    theta: Option<f64>,
    eps: Option<String>,
    cs: Option<f64>,
}

fn cmd_chern_simons(s: &SurgeryCoefficient) -> Result<(), Failure> {
    let classes = annotate(s, &enumerate_su2_moduli(s)).map_err(|e| Failure::Runtime(e.into()))?;
    let rows: Vec<ClassRow> = classes
        .iter()
        .map(|c| match c.kind {
            ClassKind::AbelianJ(j) => ClassRow { kind: "abelian", j: Some(j), theta: None, eps: None, cs: c.cs },
            ClassKind::AbelianTheta(t) => {
                ClassRow { kind: "abelian_family", j: None, theta: Some(t), eps: None, cs: c.cs }
            }
            ClassKind::Irreducible { theta, eps } => ClassRow {
                kind: "irreducible",
                j: None,
                theta: Some(theta),
                eps: Some(format!("{eps:?}").to_lowercase()),
                cs: c.cs,
            },
        })
        .collect();
    #[derive(Serialize)]
    struct Out {
        p: i64,
        q: i64,
        classes: Vec<ClassRow>,
    }
    emit_json(&Out { p: s.p, q: s.q, classes: rows })
}

fn prediction(s: &SurgeryCoefficient, cfg: &RunConfig) -> Result<Option<AsymptoticPrediction>, Failure> {
    if s.p == 0 {
        return Ok(None);
    }
    let (_, pred) =
        leading_tau_asymptotics(s, 50, cfg.m_multiplicity, cfg.sigma_mode).map_err(|e| Failure::Runtime(e.into()))?;
    Ok(Some(pred))
}

fn sweep_rows(
    slopes: &[SurgeryCoefficient],
    levels: &[u32],
    cfg: &RunConfig,
    cache: &mut Option<Cache>,
) -> Result<Vec<SweepRow>, Failure> {
    let jobs: Vec<(SurgeryCoefficient, u32)> =
        slopes.iter().flat_map(|s| levels.iter().map(move |&r| (*s, r))).collect();
    let tau = taus(&jobs, cache)?;
    let preds: Vec<Option<AsymptoticPrediction>> =
        slopes.iter().map(|s| prediction(s, cfg)).collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    for (k, ((s, r), t)) in jobs.iter().zip(&tau).enumerate() {
        let tb = t.conj();
        let pv = preds[k / levels.len()].as_ref().map(|p| p.evaluate(*r)).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        rows.push(SweepRow {
            p: s.p,
            q: s.q,
            r: *r,
            tau_re: tb.re,
            tau_im: tb.im,
            pred_re: pv.re,
            pred_im: pv.im,
            rel_residual: (tb - pv).norm() / tb.norm(),
        });
    }
    Ok(rows)
}

fn write_report(dir: &Path, rep: &VerificationReport) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Runtime(e.into()))?;
    let mut name = rep.name.clone();
    if let (Some(p), Some(q)) = (rep.params.get("p"), rep.params.get("q")) {
        name.push_str(&format!("_{p}_{q}"));
    }
    if let Some(r) = rep.params.get("r") {
        name.push_str(&format!("_r{r}"));
    }
    let path = dir.join(format!("{name}.json"));
    let text = serde_json::to_string_pretty(rep).map_err(|e| Failure::Runtime(e.into()))?;
    std::fs::write(&path, text + "\n").map_err(|e| Failure::Runtime(e.into()))?;
    let status = if rep.conjectural {
        "REPORT"
    } else if rep.passed {
        "PASS"
    } else {
        "FAIL"
    };
    let extra = if rep.conjectural { " conjectural" } else { "" };
    println!(
        "{status} {name} max_defect={:.3e} tolerance={:.3e}{extra} -> {}",
        rep.max_defect,
        rep.tolerance,
        path.display()
    );
    Ok(())
}

fn run_suite(
    suite: &str,
    pq: Option<&str>,
    levels: Option<&str>,
    cfg: &RunConfig,
) -> Result<Vec<VerificationReport>, Failure> {
    let rt = |e: fig8::Error| Failure::Runtime(e.into());
    let slopes = |default: &str| parse_slopes(pq.unwrap_or(default));
    let scan_levels = || parse_levels(levels.unwrap_or("50,100,200,400"));
    Ok(match suite {
        "specfun" => vec![verify::check_specfun()],
        "qdilog" => {
            let mut v = Vec::new();
            for r in parse_levels(levels.unwrap_or("5,11,51"))? {
                v.push(verify::check_qdilog(r, 200).map_err(rt)?);
            }
            v
        }
        "invariants" => vec![verify::check_invariants(100).map_err(rt)?],
        "repvar" => vec![verify::check_repvar().map_err(rt)?],
        "chernsimons" => vec![verify::check_chernsimons().map_err(rt)?],
        "saddle" => {
            let mut v = Vec::new();
            for s in slopes("1/1,2/1,3/1,5/2,0/1")? {
                v.push(verify::check_saddle(&s).map_err(rt)?);
            }
            v
        }
        "contour" => {
            let mut v = Vec::new();
            for r in [5, 7] {
                v.push(verify::check_contour_jones(r).map_err(rt)?);
            }
            for s in slopes("1/1,0/1")? {
                v.push(verify::check_contour_tau_with(5, &s, cfg.quad_tol).map_err(rt)?);
            }
            v
        }
        "volume" => vec![verify::volume_scan(&scan_levels()?).map_err(rt)?],
        "aec" => {
            let mut v = Vec::new();
            let rs = scan_levels()?;
            for s in slopes("1/1,2/1,3/1,-1/1,-2/1,-3/1")? {
                v.push(verify::aec_scan(&s, &rs, cfg.m_multiplicity).map_err(rt)?);
            }
            v
        }
        other => return Err(usage(format!("unknown suite {other:?}"))),
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = RunConfig::load(cli.global.config.as_deref(), &flag_layer(&cli.global)).map_err(usage)?;
    rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global().ok();
    let mut cache = if cli.global.no_cache {
        None
    } else {
        Some(Cache::open(&cfg.cache_dir).map_err(|e| Failure::Runtime(e.into()))?)
    };
    match cli.cmd {
        Command::Invariant { slope, r } => {
            let s = surgery(&slope)?;
            let levels = parse_levels(&r)?;
            let jobs: Vec<_> = levels.iter().map(|&r| (s, r)).collect();
            let tau = taus(&jobs, &mut cache)?;
            let rows: Vec<InvariantRow> = levels
                .iter()
                .zip(tau)
                .map(|(&r, t)| InvariantRow { r, tau_re: t.re, tau_im: t.im, abs: t.norm() })
                .collect();
            emit_table(&rows, cfg.output_format)
        }
        Command::Jones { r } => {
            let levels = parse_levels(&r)?;
            let rows: Vec<JonesRow> = levels
                .par_iter()
                .map(|&r| {
                    let ctx = LevelContext::new(r).expect("levels validated");
                    let j = jones_fig8_sine(&ctx, r);
                    let l = jones_leading(r);
                    JonesRow { r, jones: j, leading: l, ratio: j / l }
                })
                .collect();
            emit_table(&rows, cfg.output_format)
        }
        Command::Critical { slope } => cmd_critical(&surgery(&slope)?),
        Command::ChernSimons { slope } => cmd_chern_simons(&surgery(&slope)?),
        Command::Verify { suite, pq, r, out } => {
            let reports = run_suite(&suite, pq.as_deref(), r.as_deref(), &cfg)?;
            let mut failed = Vec::new();
            for rep in &reports {
                write_report(&out, rep)?;
                if !rep.conjectural && !rep.passed {
                    failed.push(rep.name.clone());
                }
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure::Check(format!("failed: {}", failed.join(", "))))
            }
        }
        Command::Sweep { pq, r } => {
            let slopes = parse_slopes(&pq)?;
            let levels = parse_levels(&r)?;
            let rows = sweep_rows(&slopes, &levels, &cfg, &mut cache)?;
            emit_table(&rows, cfg.output_format)
        }
        Command::Asymptotics { slope, r } => {
            let s = surgery(&slope)?;
            if s.p == 0 {
                return Err(usage("the leading asymptotics needs p/q != 0"));
            }
            let levels = parse_levels(&r)?;
            let pred = prediction(&s, &cfg)?.expect("p != 0");
            let rows = sweep_rows(&[s], &levels, &cfg, &mut cache)?;
            #[derive(Serialize)]
            struct Out<'a> {
                prediction: &'a AsymptoticPrediction,
                values: Vec<SweepRow>,
            }
            emit_json(&Out { prediction: &pred, values: rows })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
