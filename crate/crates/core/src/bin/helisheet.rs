//! Command-line orchestration: generate, solve, certify, analyze, fit, and
//! plot.  Exit codes: 0 success, 1 computation succeeded but the claim under
//! test is false (failed certificate, self-intersecting curve, sentinel
//! threshold, labeling violations, non-converged solve), 2 errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::Vector3;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use helisheet::asym::{broken_circle_osc, laurent_fit, spiral_threshold, LaurentConfig};
use helisheet::error::{Error, Result};
use helisheet::fit::{bilipschitz_estimate, fit_helicoid, DistortionReport};
use helisheet::gauss::{check_gauss_identity, decompose, gauss_from_graph, trace_level_set};
use helisheet::geometry::curvature::graph_embed;
use helisheet::geometry::multigraph::MultiGraph;
use helisheet::geometry::polar::{PolarRect, RadialSpacing};
use helisheet::io::{self, Surface};
use helisheet::plot::{svg_profile, Series};
use helisheet::sheets::{certify_sheet, detect_blowup_pairs, CertifyConfig, SheetKind};
use helisheet::solver::{
    perturb_and_solve, solve_dirichlet, BoundaryValues, BumpProfile, BumpSpec, Damping, Edge,
    InitialGuess, SolveConfig,
};
use helisheet::surfaces::generate::{
    helicoid_ball_mesh, helicoid_mesh, make_surface, HelicoidModel, Resolution, SurfaceSpec,
};
use helisheet::surfaces::weierstrass::{
    embeddedness_verdict, weierstrass_curve, Embeddedness, WeierstrassAlpha,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "helisheet",
    version,
    about = "Multivalued minimal graphs: solve, certify, analyze, compare"
)]
struct Cli {
    /// JSON object whose fields override the flags of the chosen subcommand
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an oracle surface or an axis curve
    Generate(GenerateArgs),
    /// Solve the Dirichlet problem on the grid of an input graph
    Solve(SolveArgs),
    /// Certify a weak or strong sheet
    Certify(CertifyArgs),
    /// Detect blow-up pairs on a mesh
    Blowup(BlowupArgs),
    /// Contour coefficient and remainder of the complex gradient
    Laurent(LaurentArgs),
    /// Oscillation of u_theta on broken circles
    Osc(OscArgs),
    /// Strict-spiraling threshold radius
    Spiral(SpiralArgs),
    /// Gauss map of a graph and its identity check
    Gauss(GaussArgs),
    /// Trace horizontal level sets of a mesh
    Levels(LevelsArgs),
    /// Axis/sheets decomposition of a mesh
    Decompose(DecomposeArgs),
    /// Best-fit helicoid through a mesh
    Fit(FitArgs),
    /// Bi-Lipschitz comparison against a helicoid
    Bilip(BilipArgs),
    /// Render CSV profiles as an SVG chart
    Report(ReportArgs),
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("HF_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let config: Option<serde_json::Value> = match &cli.config {
        Some(path) => Some(serde_json::from_str(&std::fs::read_to_string(path)?)?),
        None => None,
    };
    match cli.command {
        Command::Generate(a) => cmd_generate(overridden(a, &config)?),
        Command::Solve(a) => cmd_solve(overridden(a, &config)?),
        Command::Certify(a) => cmd_certify(overridden(a, &config)?),
        Command::Blowup(a) => cmd_blowup(overridden(a, &config)?),
        Command::Laurent(a) => cmd_laurent(overridden(a, &config)?),
        Command::Osc(a) => cmd_osc(overridden(a, &config)?),
        Command::Spiral(a) => cmd_spiral(overridden(a, &config)?),
        Command::Gauss(a) => cmd_gauss(overridden(a, &config)?),
        Command::Levels(a) => cmd_levels(overridden(a, &config)?),
        Command::Decompose(a) => cmd_decompose(overridden(a, &config)?),
        Command::Fit(a) => cmd_fit(overridden(a, &config)?),
        Command::Bilip(a) => cmd_bilip(overridden(a, &config)?),
        Command::Report(a) => cmd_report(overridden(a, &config)?),
    }
}

/// The config file wins over the flags, field by field.
fn overridden<T: Serialize + DeserializeOwned>(
    args: T,
    config: &Option<serde_json::Value>,
) -> Result<T> {
    let Some(cfg) = config else { return Ok(args) };
    let mut v = serde_json::to_value(&args)?;
    let (Some(obj), Some(co)) = (v.as_object_mut(), cfg.as_object()) else {
        return Err(Error::invalid("config must be a JSON object"));
    };
    for (k, val) in co {
        if !obj.contains_key(k) {
            return Err(Error::invalid(format!(
                "config key {k:?} is not a flag of this subcommand"
            )));
        }
        obj.insert(k.clone(), val.clone());
    }
    Ok(serde_json::from_value(v)?)
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad number {p:?} in list")))
        })
        .collect()
}

fn load_graph(path: &PathBuf) -> Result<MultiGraph> {
    io::load_multigraph(path)
}

/// Meshes load directly; graph containers are embedded on the fly.
fn load_mesh_any(path: &PathBuf) -> Result<helisheet::geometry::mesh::MeshPatch> {
    match io::load_surface(path)? {
        Surface::Mesh(m) => Ok(m),
        Surface::Graph(g) => graph_embed(&g),
    }
}

const OK: ExitCode = ExitCode::SUCCESS;

fn claim_false() -> ExitCode {
    ExitCode::from(1)
}

#[derive(Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
struct GenerateArgs {
    /// helicoid | plane | catenoid | weierstrass
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 1.0)]
    pitch: f64,
    #[arg(long, default_value_t = 1.0)]
    neck: f64,
    /// Generate the lower catenoid end instead of the upper one
    #[arg(long, default_value_t = false)]
    lower: bool,
    #[arg(long, default_value_t = 0.0)]
    gx: f64,
    #[arg(long, default_value_t = 0.0)]
    gy: f64,
    #[arg(long, default_value_t = 0.0)]
    offset: f64,
    #[arg(long, default_value_t = 1.0)]
    r1: f64,
    /// Outer radius; "inf" requires --r-max
    #[arg(long, default_value = "4")]
    r2: String,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    theta1: Option<f64>,
    #[arg(long)]
    theta2: Option<f64>,
    /// Symmetric span [-pi N, pi N]; overrides theta1/theta2
    #[arg(long)]
    half_turns: Option<u32>,
    #[arg(long, default_value_t = 65)]
    n_rho: usize,
    #[arg(long, default_value_t = 129)]
    n_theta: usize,
    /// geometric | uniform
    #[arg(long, default_value = "geometric")]
    radial: String,
    /// Output path of the graph container
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output path of the embedded (or parametric) mesh container
    #[arg(long)]
    mesh_out: Option<PathBuf>,
    /// Helicoid only: emit the parametric mesh clipped to this ball radius
    #[arg(long)]
    ball_radius: Option<f64>,
    #[arg(long, default_value_t = 161)]
    ball_n: usize,
    /// Helicoid only: parametric mesh "s0,s1,t0,t1,n_s,n_t"
    #[arg(long)]
    param_mesh: Option<String>,
    // axis-curve flags
    #[arg(long, default_value_t = 0.0)]
    alpha1: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha2: f64,
    #[arg(long, default_value_t = -3.0)]
    t0: f64,
    #[arg(long, default_value_t = 3.0)]
    t1: f64,
    #[arg(long, default_value_t = 2048)]
    samples: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Axis-curve CSV output (t, x1, x2)
    #[arg(long)]
    curve_out: Option<PathBuf>,
}

#[derive(Serialize)]
struct WeierstrassOut {
    alpha1: f64,
    alpha2: f64,
    t0: f64,
    t1: f64,
    samples: usize,
    tol: f64,
    verdict: String,
    witness: Option<serde_json::Value>,
}

fn cmd_generate(a: GenerateArgs) -> Result<ExitCode> {
    if a.kind == "weierstrass" {
        let alpha = WeierstrassAlpha::new(a.alpha1, a.alpha2)?;
        let curve = weierstrass_curve(alpha, (a.t0, a.t1), a.samples)?;
        if let Some(path) = &a.curve_out {
            let rows: Vec<Vec<f64>> = (0..curve.len())
                .map(|k| vec![curve.t[k], curve.x1[k], curve.x2[k]])
                .collect();
            io::save_csv(path, &["t", "x1", "x2"], &rows)?;
        }
        let verdict = embeddedness_verdict(&curve, a.tol)?;
        let (name, witness, code) = match &verdict {
            Embeddedness::Embedded => ("embedded".to_string(), None, OK),
            Embeddedness::SelfIntersecting { t_a, t_b, distance } => (
                "self_intersecting".to_string(),
                Some(serde_json::json!({"t_a": t_a, "t_b": t_b, "distance": distance})),
                claim_false(),
            ),
        };
        let out = WeierstrassOut {
            alpha1: a.alpha1,
            alpha2: a.alpha2,
            t0: a.t0,
            t1: a.t1,
            samples: a.samples,
            tol: a.tol,
            verdict: name,
            witness,
        };
        match &a.out {
            Some(path) => io::save_report(path, &out)?,
            None => print!("{}", io::report_to_string(&out)?),
        }
        return Ok(code);
    }

    let radial = match a.radial.as_str() {
        "geometric" => RadialSpacing::Geometric,
        "uniform" => RadialSpacing::Uniform,
        other => return Err(Error::invalid(format!("unknown radial spacing {other:?}"))),
    };
    let r2 = if a.r2 == "inf" {
        f64::INFINITY
    } else {
        a.r2
            .parse::<f64>()
            .map_err(|_| Error::invalid(format!("bad r2 {:?}", a.r2)))?
    };
    // default region: the symmetric two-turn sheet
    let rect = match (a.half_turns, a.theta1, a.theta2) {
        (Some(n), _, _) => PolarRect::sheet(a.r1, r2, n)?,
        (None, None, None) => PolarRect::sheet(a.r1, r2, 2)?,
        (None, t1, t2) => PolarRect::new(
            a.r1,
            r2,
            t1.unwrap_or(0.0),
            t2.unwrap_or(2.0 * std::f64::consts::PI),
        )?,
    };
    let spec = match a.kind.as_str() {
        "helicoid" => SurfaceSpec::Helicoid { pitch: a.pitch },
        "plane" => SurfaceSpec::Plane { gx: a.gx, gy: a.gy, offset: a.offset },
        "catenoid" => SurfaceSpec::Catenoid { neck: a.neck, upper: !a.lower },
        other => return Err(Error::invalid(format!("unknown kind {other:?}"))),
    };

    // parametric helicoid meshes bypass the graph bundle
    if a.kind == "helicoid" {
        if let Some(radius) = a.ball_radius {
            let mesh = helicoid_ball_mesh(&HelicoidModel::axis_aligned(a.pitch), radius, a.ball_n)?;
            let path = a
                .mesh_out
                .as_ref()
                .ok_or_else(|| Error::invalid("--ball-radius needs --mesh-out"))?;
            io::save_mesh(path, &mesh)?;
            return Ok(OK);
        }
        if let Some(pm) = &a.param_mesh {
            let v = parse_list(pm)?;
            if v.len() != 6 {
                return Err(Error::invalid("--param-mesh wants s0,s1,t0,t1,n_s,n_t"));
            }
            let mesh = helicoid_mesh(
                &HelicoidModel::axis_aligned(a.pitch),
                (v[0], v[1]),
                (v[2], v[3]),
                v[4] as usize,
                v[5] as usize,
            )?;
            let path = a
                .mesh_out
                .as_ref()
                .ok_or_else(|| Error::invalid("--param-mesh needs --mesh-out"))?;
            io::save_mesh(path, &mesh)?;
            return Ok(OK);
        }
    }

    let res = Resolution { n_rho: a.n_rho, n_theta: a.n_theta, radial };
    let bundle = make_surface(spec, rect, a.r_max, res)?;
    if let Some(w) = &bundle.warning {
        eprintln!("warning: {w}");
    }
    if let Some(path) = &a.out {
        match &bundle.graph {
            Some(g) => io::save_multigraph(path, g)?,
            None => {
                return Err(Error::invalid(
                    "surface is not a graph over this region; use --mesh-out",
                ))
            }
        }
    }
    if let Some(path) = &a.mesh_out {
        io::save_mesh(path, &bundle.mesh)?;
    }
    Ok(OK)
}

#[derive(Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
struct SolveArgs {
    /// Graph container supplying the grid and boundary values
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 50)]
    max_iters: usize,
    /// line-search | none
    #[arg(long, default_value = "line-search")]
    damping: String,
    /// zero | harmonic | given
    #[arg(long, default_value = "harmonic")]
    init: String,
    /// inner | outer | theta-min | theta-max
    #[arg(long)]
    bump_edge: Option<String>,
    /// sin | const
    #[arg(long, default_value = "sin")]
    bump_profile: String,
    #[arg(long, default_value_t = 0.0)]
    bump_amp: f64,
    #[arg(long, default_value_t = 1.0)]
    bump_freq: f64,
    #[arg(long, default_value_t = 0.0)]
    bump_phase: f64,
    /// Solution graph container
    #[arg(long)]
    out: Option<PathBuf>,
    /// Solve report JSON
    #[arg(long)]
    report: Option<PathBuf>,
    /// Iterate history CSV (iteration, residual, step)
    #[arg(long)]
    history: Option<PathBuf>,
}

#[derive(Serialize)]
struct SolveOut {
    iterations: usize,
    final_residual: f64,
    converged: bool,
    max_principle_ok: bool,
    bump_exceeds_recommended: bool,
}

fn cmd_solve(a: SolveArgs) -> Result<ExitCode> {
    let base = load_graph(&a.input)?;
    let damping = match a.damping.as_str() {
        "line-search" => Damping::LineSearch,
        "none" => Damping::None,
        other => return Err(Error::invalid(format!("unknown damping {other:?}"))),
    };
    let initial_guess = match a.init.as_str() {
        "zero" => InitialGuess::Zero,
        "harmonic" => InitialGuess::HarmonicExtension,
        "given" => InitialGuess::Given(Box::new(base.clone())),
        other => return Err(Error::invalid(format!("unknown init {other:?}"))),
    };
    let cfg = SolveConfig {
        max_newton_iters: a.max_iters,
        residual_tol: a.tol,
        damping,
        initial_guess,
    };
    let report = match &a.bump_edge {
        Some(edge) => {
            let edge = match edge.as_str() {
                "inner" => Edge::Inner,
                "outer" => Edge::Outer,
                "theta-min" => Edge::ThetaMin,
                "theta-max" => Edge::ThetaMax,
                other => return Err(Error::invalid(format!("unknown edge {other:?}"))),
            };
            let profile = match a.bump_profile.as_str() {
                "sin" => BumpProfile::Sin {
                    amp: a.bump_amp,
                    freq: a.bump_freq,
                    phase: a.bump_phase,
                },
                "const" => BumpProfile::Const { amp: a.bump_amp },
                other => return Err(Error::invalid(format!("unknown profile {other:?}"))),
            };
            perturb_and_solve(&base, &BumpSpec { edge, profile }, &cfg)?
        }
        None => solve_dirichlet(&base.grid, &BoundaryValues::from_graph(&base), &cfg)?,
    };
    if let Some(path) = &a.out {
        io::save_multigraph(path, &report.solution)?;
    }
    if let Some(path) = &a.history {
        let rows: Vec<Vec<f64>> = report
            .history
            .iter()
            .map(|h| vec![h.iteration as f64, h.residual_sup, h.step_scale])
            .collect();
        io::save_csv(path, &["iteration", "residual", "step"], &rows)?;
    }
    let out = SolveOut {
        iterations: report.iterations,
        final_residual: report.final_residual,
        converged: report.converged,
        max_principle_ok: report.max_principle_ok,
        bump_exceeds_recommended: report.bump_exceeds_recommended,
    };
    match &a.report {
        Some(path) => io::save_report(path, &out)?,
        None => print!("{}", io::report_to_string(&out)?),
    }
    Ok(if report.converged { OK } else { claim_false() })
}

#[derive(Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
struct CertifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    eps: f64,
    #[arg(long = "N", alias = "n")]
    n: u32,
    #[arg(long)]
    scale: f64,
    /// weak | strong
    #[arg(long, default_value = "weak")]
    kind: String,
    #[arg(long, default_value_t = 1e-8)]
    residual_tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-node flatness term CSV (computed on the separation overlap)
    #[arg(long)]
    flatness_csv: Option<PathBuf>,
}

fn cmd_certify(a: CertifyArgs) -> Result<ExitCode> {
    let g = load_graph(&a.input)?;
    let kind = match a.kind.as_str() {
        "weak" => SheetKind::Weak,
        "strong" => SheetKind::Strong,
        other => return Err(Error::invalid(format!("unknown sheet kind {other:?}"))),
    };
    let cert = certify_sheet(
        &g,
        a.eps,
        a.n,
        a.scale,
        kind,
        &CertifyConfig { residual_tol: a.residual_tol },
    )?;
    if let Some(path) = &a.flatness_csv {
        let f = helisheet::sheets::flatness_terms(&g)?;
        let mut rows = Vec::with_capacity(f.grid.len());
        for i in 0..f.grid.n_rho {
            for j in 0..f.grid.n_theta {
                let k = f.grid.idx(i, j);
                rows.push(vec![
                    f.grid.rho(i),
                    f.grid.theta(j),
                    f.term_grad.data[k],
                    f.term_rho_hess.data[k],
                    f.term_w_grad.data[k],
                    f.term_w_hess.data[k],
                    f.total.data[k],
                ]);
            }
        }
        io::save_csv(
            path,
            &["rho", "theta", "grad", "rho_hess", "w_grad", "w_hess", "total"],
            &rows,
        )?;
    }
    let verdict = cert.verdict;
    match &a.out {
        Some(path) => io::save_report(path, &cert)?,
        None => print!("{}", io::report_to_string(&cert)?),
    }
    Ok(if verdict { OK } else { claim_false() })
}

#[derive(Args, Serialize, Deserialize)]
struct BlowupArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    c: f64,
    /// Scale window "lo,hi" restricting admissible pair scales
    #[arg(long)]
    scan: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_blowup(a: BlowupArgs) -> Result<ExitCode> {
    let mesh = load_mesh_any(&a.input)?;
    let scan = match &a.scan {
        Some(s) => parse_list(s)?,
        None => Vec::new(),
    };
    let report = detect_blowup_pairs(&mesh, a.c, &scan)?;
    match &a.out {
        Some(path) => io::save_report(path, &report)?,
        None => print!("{}", io::report_to_string(&report)?),
    }
    Ok(OK)
}

#[derive(Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
struct LaurentArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    r1: f64,
    /// Remainder-table radii "a,b,c"
    #[arg(long)]
    radii: String,
    #[arg(long, default_value_t = 1.0)]
    c0: f64,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 512)]
    samples: usize,
    #[arg(long, default_value_t = 2.0)]
    extraction_factor: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_laurent(a: LaurentArgs) -> Result<ExitCode> {
    let g = load_graph(&a.input)?;
    let fit = laurent_fit(
        &g,
        a.r1,
        &parse_list(&a.radii)?,
        &LaurentConfig {
            c0: a.c0,
            epsilon: a.eps,
            samples: a.samples,
            extraction_factor: a.extraction_factor,
        },
    )?;
    match &a.out {
        Some(path) => io::save_report(path, &fit)?,
        None => print!("{}", io::report_to_string(&fit)?),
    }
    Ok(OK)
}

#[derive(Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
struct OscArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Radii "a,b,c"
    #[arg(long)]
    rho_list: String,
    #[arg(long, default_value_t = 512)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct OscOut {
    samples: Vec<helisheet::asym::OscSample>,
}

fn cmd_osc(a: OscArgs) -> Result<ExitCode> {
    let g = load_graph(&a.input)?;
    let mut samples = Vec::new();
    for rho in parse_list(&a.rho_list)? {
        samples.push(broken_circle_osc(&g, rho, a.samples)?);
    }
    if let Some(path) = &a.csv {
        let rows: Vec<Vec<f64>> = samples
            .iter()
            .map(|s| vec![s.rho, s.osc, s.min_utheta, s.max_utheta, s.rho_pow, s.w_abs])
            .collect();
        io::save_csv(
            path,
            &["rho", "osc", "min_utheta", "max_utheta", "rho_pow_quarter", "w_abs"],
            &rows,
        )?;
    }
    let out = OscOut { samples };
    match &a.out {
        Some(path) => io::save_report(path, &out)?,
        None => print!("{}", io::report_to_string(&out)?),
    }
    Ok(OK)
}

#[derive(Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
struct SpiralArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    c2: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 512)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn cmd_spiral(a: SpiralArgs) -> Result<ExitCode> {
    let g = load_graph(&a.input)?;
    let report = spiral_threshold(&g, a.c2, a.eps, a.samples)?;
    if let Some(path) = &a.csv {
        let rows: Vec<Vec<f64>> = report
            .table
            .iter()
            .map(|r| vec![r.rho, r.min_utheta, r.rhs])
            .collect();
        io::save_csv(path, &["rho", "min_utheta", "rhs"], &rows)?;
    }
    let finite = report.c3.is_some();
    match &a.out {
        Some(path) => io::save_report(path, &report)?,
        None => print!("{}", io::report_to_string(&report)?),
    }
    Ok(if finite { OK } else { claim_false() })
}

#[derive(Args, Serialize, Deserialize)]
struct GaussArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-node field CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct GaussOut {
    identity_sup: f64,
    masked_nodes: usize,
    total_nodes: usize,
}

fn cmd_gauss(a: GaussArgs) -> Result<ExitCode> {
    let g = load_graph(&a.input)?;
    let field = gauss_from_graph(&g)?;
    if let Some(path) = &a.csv {
        let mut rows = Vec::new();
        for i in 0..field.grid.n_rho {
            for j in 0..field.grid.n_theta {
                let k = field.grid.idx(i, j);
                rows.push(vec![
                    field.grid.rho(i),
                    field.grid.theta(j),
                    field.g_re[k],
                    field.g_im[k],
                    if field.mask[k] { 1.0 } else { 0.0 },
                    field.grad_x3[k],
                ]);
            }
        }
        io::save_csv(
            path,
            &["rho", "theta", "g_re", "g_im", "unmasked", "grad_x3"],
            &rows,
        )?;
    }
    let out = GaussOut {
        identity_sup: check_gauss_identity(&field),
        masked_nodes: field.mask.iter().filter(|&&m| !m).count(),
        total_nodes: field.mask.len(),
    };
    match &a.out {
        Some(path) => io::save_report(path, &out)?,
        None => print!("{}", io::report_to_string(&out)?),
    }
    Ok(OK)
}

#[derive(Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
struct LevelsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Explicit level; alternative to --count
    #[arg(long)]
    level: Option<f64>,
    /// Number of random levels drawn uniformly inside the height range
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Polyline CSV (level_index, component, point, x, y, z)
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct LevelsOut {
    seed: u64,
    levels: Vec<LevelOut>,
}

#[derive(Serialize)]
struct LevelOut {
    requested_level: f64,
    level: f64,
    components: usize,
}

fn cmd_levels(a: LevelsArgs) -> Result<ExitCode> {
    let mesh = load_mesh_any(&a.input)?;
    let (lo, hi) = mesh.x3_range();
    let mut requested = Vec::new();
    if let Some(c) = a.level {
        requested.push(c);
    }
    if let Some(count) = a.count {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let margin = 0.05 * (hi - lo);
        for _ in 0..count {
            requested.push(rng.gen_range(lo + margin..hi - margin));
        }
    }
    if requested.is_empty() {
        return Err(Error::invalid("need --level or --count"));
    }
    let mut levels = Vec::new();
    let mut rows = Vec::new();
    for (li, c) in requested.iter().enumerate() {
        let trace = trace_level_set(&mesh, *c)?;
        for (ci, poly) in trace.polylines.iter().enumerate() {
            for (pi, p) in poly.iter().enumerate() {
                rows.push(vec![li as f64, ci as f64, pi as f64, p.x, p.y, p.z]);
            }
        }
        levels.push(LevelOut {
            requested_level: trace.requested_level,
            level: trace.level,
            components: trace.components,
        });
    }
    if let Some(path) = &a.csv {
        io::save_csv(
            path,
            &["level_index", "component", "point", "x", "y", "z"],
            &rows,
        )?;
    }
    let out = LevelsOut { seed: a.seed, levels };
    match &a.out {
        Some(path) => io::save_report(path, &out)?,
        None => print!("{}", io::report_to_string(&out)?),
    }
    Ok(OK)
}

#[derive(Args, Serialize, Deserialize)]
struct DecomposeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Blow-up scan JSON produced by the blowup subcommand
    #[arg(long)]
    pairs: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    eps0: f64,
    #[arg(long, default_value_t = 1.7)]
    r1_mult: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-vertex label CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct DecomposeOut {
    epsilon0: f64,
    gamma0: f64,
    r1_multiplier: f64,
    axis_vertices: usize,
    sheet_up_vertices: usize,
    sheet_down_vertices: usize,
    spiral_sign: (f64, f64),
    violations: usize,
    vacuous: Option<String>,
}

fn cmd_decompose(a: DecomposeArgs) -> Result<ExitCode> {
    use helisheet::gauss::RegionLabel;
    let mesh = load_mesh_any(&a.input)?;
    let scan: helisheet::sheets::BlowUpScan =
        serde_json::from_str(&std::fs::read_to_string(&a.pairs)?)?;
    let lab = decompose(&mesh, &scan.pairs, a.eps0, a.r1_mult)?;
    if let Some(path) = &a.csv {
        let rows: Vec<Vec<f64>> = mesh
            .vertices
            .iter()
            .zip(&lab.labels)
            .enumerate()
            .map(|(k, (v, l))| {
                let code = match l {
                    RegionLabel::Axis => 0.0,
                    RegionLabel::SheetUp => 1.0,
                    RegionLabel::SheetDown => 2.0,
                };
                vec![k as f64, v.x, v.y, v.z, code]
            })
            .collect();
        io::save_csv(path, &["vertex", "x", "y", "z", "label"], &rows)?;
    }
    let out = DecomposeOut {
        epsilon0: lab.epsilon0,
        gamma0: lab.gamma0,
        r1_multiplier: lab.r1_multiplier,
        axis_vertices: lab.count(RegionLabel::Axis),
        sheet_up_vertices: lab.count(RegionLabel::SheetUp),
        sheet_down_vertices: lab.count(RegionLabel::SheetDown),
        spiral_sign: lab.spiral_sign,
        violations: lab.violations.len(),
        vacuous: lab.vacuous.clone(),
    };
    let clean = lab.violations.is_empty();
    match &a.out {
        Some(path) => io::save_report(path, &out)?,
        None => print!("{}", io::report_to_string(&out)?),
    }
    Ok(if clean { OK } else { claim_false() })
}

#[derive(Args, Serialize, Deserialize)]
struct FitArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
struct FitOut {
    pitch: f64,
    rotation: [[f64; 3]; 3],
    translation: [f64; 3],
    residual_rms: f64,
    /// The fit is a local optimizer's best iterate, not a certified optimum.
    heuristic: bool,
}

impl FitOut {
    fn from_model(m: &HelicoidModel, rms: f64) -> Self {
        let r = m.frame.rotation.matrix();
        FitOut {
            pitch: m.pitch,
            rotation: [
                [r[(0, 0)], r[(0, 1)], r[(0, 2)]],
                [r[(1, 0)], r[(1, 1)], r[(1, 2)]],
                [r[(2, 0)], r[(2, 1)], r[(2, 2)]],
            ],
            translation: [
                m.frame.translation.x,
                m.frame.translation.y,
                m.frame.translation.z,
            ],
            residual_rms: rms,
            heuristic: true,
        }
    }

    fn to_model(&self) -> Result<HelicoidModel> {
        let m = nalgebra::Matrix3::from_fn(|i, j| self.rotation[i][j]);
        let rot = nalgebra::Rotation3::from_matrix_unchecked(m);
        HelicoidModel::new(
            self.pitch,
            helisheet::surfaces::generate::Frame {
                rotation: rot,
                translation: Vector3::new(
                    self.translation[0],
                    self.translation[1],
                    self.translation[2],
                ),
            },
        )
    }
}

fn cmd_fit(a: FitArgs) -> Result<ExitCode> {
    let mesh = load_mesh_any(&a.input)?;
    let (model, rms) = fit_helicoid(&mesh, a.seed)?;
    let out = FitOut::from_model(&model, rms);
    match &a.out {
        Some(path) => io::save_report(path, &out)?,
        None => print!("{}", io::report_to_string(&out)?),
    }
    Ok(OK)
}

#[derive(Args, Serialize, Deserialize)]
struct BilipArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Helicoid model JSON (from the fit subcommand); fitted when absent
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-vertex singular value CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct BilipOut {
    interval: (f64, f64),
    rescale_factor: f64,
    sup_norm_rescaled: f64,
    fit_residual: Option<f64>,
    model: Option<FitOut>,
    n_vertices: usize,
}

fn cmd_bilip(a: BilipArgs) -> Result<ExitCode> {
    let mesh = load_mesh_any(&a.input)?;
    let model = match &a.model {
        Some(path) => {
            let f: FitOut = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            f.to_model()?
        }
        None => fit_helicoid(&mesh, a.seed)?.0,
    };
    let rep: DistortionReport = bilipschitz_estimate(&mesh, &model)?;
    if let Some(path) = &a.csv {
        let rows: Vec<Vec<f64>> = (0..rep.sigma_min.len())
            .map(|k| vec![k as f64, rep.sigma_min[k], rep.sigma_max[k]])
            .collect();
        io::save_csv(path, &["vertex", "sigma_min", "sigma_max"], &rows)?;
    }
    let out = BilipOut {
        interval: rep.interval,
        rescale_factor: rep.rescale_factor,
        sup_norm_rescaled: rep.sup_norm_rescaled,
        fit_residual: rep.fit_residual,
        model: rep
            .fitted
            .as_ref()
            .map(|m| FitOut::from_model(m, rep.fit_residual.unwrap_or(0.0))),
        n_vertices: rep.sigma_min.len(),
    };
    match &a.out {
        Some(path) => io::save_report(path, &out)?,
        None => print!("{}", io::report_to_string(&out)?),
    }
    Ok(OK)
}

#[derive(Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
struct ReportArgs {
    /// Input profile CSV
    #[arg(long)]
    csv: PathBuf,
    /// Abscissa column name
    #[arg(long)]
    x: String,
    /// Ordinate column names "a,b,c"
    #[arg(long)]
    y: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "")]
    title: String,
    #[arg(long, default_value_t = false)]
    log_x: bool,
    #[arg(long, default_value_t = false)]
    log_y: bool,
}

fn cmd_report(a: ReportArgs) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&a.csv)?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::Format("empty CSV".into()))?
        .split(',')
        .collect();
    let col = |name: &str| -> Result<usize> {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| Error::invalid(format!("no column {name:?} in {header:?}")))
    };
    let xi = col(&a.x)?;
    let ynames: Vec<&str> = a.y.split(',').filter(|s| !s.is_empty()).collect();
    let yis: Vec<usize> = ynames.iter().map(|n| col(n)).collect::<Result<_>>()?;
    let mut series: Vec<Series> = ynames
        .iter()
        .map(|n| Series { name: n, points: Vec::new() })
        .collect();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<f64> = line
            .split(',')
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|_| Error::Format(format!("bad cell {c:?}")))
            })
            .collect::<Result<_>>()?;
        for (s, &yi) in series.iter_mut().zip(&yis) {
            s.points.push((cells[xi], cells[yi]));
        }
    }
    let title = if a.title.is_empty() { a.y.as_str() } else { a.title.as_str() };
    let svg = svg_profile(title, &a.x, &series, a.log_x, a.log_y)?;
    std::fs::write(&a.out, svg)?;
    Ok(OK)
}
