//! `dhfun` — build Davenport–Heilbronn-type functions, evaluate them and
//! their L-function components, verify functional equations, scan for zeros,
//! and trace ray pre-images. Machine-readable output: JSON lines everywhere,
//! CSV/SVG for curve data. Runs are deterministic: identical invocations
//! produce byte-identical output.
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical/domain error,
//! 4 failed verification (missing mirror, missing derivative zero, failed
//! separation).

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use dhfun::characters::CharacterGroup;
use dhfun::dh::{residual_grid, DhSpec};
use dhfun::lincomb::{build_same_fe_pair, ComboFunction};
use dhfun::rays::{curves_to_svg, trace_preimage};
use dhfun::zeros::{find_zeros, mirror_check, refine_newton, SearchRect, ZERO_TOL};
use dhfun::{Error, EvalParams};

#[derive(Parser)]
#[command(name = "dhfun", version, about, disable_help_subcommand = true)]
struct Cli {
    /// Absolute tolerance target for series truncation.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Euler-Maclaurin correction order.
    #[arg(long, global = true)]
    em_order: Option<usize>,

    /// |Im s| envelope the evaluator is tuned for.
    #[arg(long, global = true)]
    max_height: Option<f64>,

    /// Print the effective configuration as JSON and exit.
    #[arg(long, global = true)]
    show_config: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Dirichlet character tables.
    Characters {
        #[command(subcommand)]
        cmd: CharactersCmd,
    },
    /// Evaluate L-functions.
    Eval {
        #[command(subcommand)]
        cmd: EvalCmd,
    },
    /// Build and evaluate Davenport-Heilbronn-type functions.
    Dh {
        #[command(subcommand)]
        cmd: DhCmd,
    },
    /// Zero scans and mirror verification.
    Zeros {
        #[command(subcommand)]
        cmd: ZerosCmd,
    },
    /// Trace a ray pre-image curve; CSV to stdout, optional SVG to a file.
    Trace(TraceArgs),
    /// Linear combinations sharing a functional equation.
    Lincomb {
        #[command(subcommand)]
        cmd: LincombCmd,
    },
}

#[derive(Subcommand)]
enum CharactersCmd {
    /// List all characters mod q, one JSON record per line.
    List {
        #[arg(long)]
        modulus: u64,
    },
}

#[derive(Subcommand)]
enum EvalCmd {
    /// Dirichlet L-function L(s; χ).
    #[command(name = "l", alias = "L")]
    L {
        #[arg(long)]
        modulus: u64,
        #[arg(long = "char")]
        char_label: u64,
        /// Evaluation point as "sigma,t".
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s: Complex64,
    },
}

#[derive(Subcommand)]
enum DhCmd {
    /// Build the spec and print its summary.
    Build(SpecArgs),
    /// Evaluate f(s).
    Eval {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s: Complex64,
    },
    /// Functional-equation residuals on a grid "s0:s1:t0:t1:n".
    Residual {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        grid: GridSpec,
    },
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long)]
    modulus: u64,
    #[arg(long = "char")]
    char_label: u64,
}

#[derive(Subcommand)]
enum ZerosCmd {
    /// Scan a rectangle "s0:s1:t0:t1" for zeros of f (or f' with --derivative).
    Scan {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_parser = parse_rect, allow_hyphen_values = true)]
        rect: RectSpec,
        /// Scan the derivative instead of the function.
        #[arg(long)]
        derivative: bool,
    },
    /// Refine the zero near a point and verify its mirror at 1-sigma+it.
    Mirror {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        at: Complex64,
    },
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Seed point "sigma,t" near the curve.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    seed: Complex64,
    /// Ray angle φ in radians (π traces the negative real axis pre-image).
    #[arg(long, allow_hyphen_values = true)]
    phi: f64,
    /// Trace bounds "s0:s1:t0:t1".
    #[arg(long, value_parser = parse_rect, allow_hyphen_values = true)]
    rect: RectSpec,
    /// Initial step size.
    #[arg(long, default_value_t = 1e-2)]
    step: f64,
    /// Write an SVG rendering (curve + critical line) to this path.
    #[arg(long)]
    svg: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum LincombCmd {
    /// Build a same-equation pair mod q, combine at s0, and measure the
    /// combination's functional-equation failure.
    Demo {
        #[arg(long, default_value_t = 13)]
        modulus: u64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s0: Complex64,
    },
}

#[derive(Clone, Copy)]
struct RectSpec {
    s0: f64,
    s1: f64,
    t0: f64,
    t1: f64,
}

#[derive(Clone, Copy)]
struct GridSpec {
    rect: RectSpec,
    n: usize,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected \"sigma,t\", got {s:?}"));
    }
    let re: f64 = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let im: f64 = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok(Complex64::new(re, im))
}

fn parse_rect(s: &str) -> Result<RectSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 4 {
        return Err(format!("expected \"s0:s1:t0:t1\", got {s:?}"));
    }
    let v: Result<Vec<f64>, _> = parts.iter().map(|p| p.trim().parse::<f64>()).collect();
    let v = v.map_err(|e| format!("{e}"))?;
    Ok(RectSpec {
        s0: v[0],
        s1: v[1],
        t0: v[2],
        t1: v[3],
    })
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 5 {
        return Err(format!("expected \"s0:s1:t0:t1:n\", got {s:?}"));
    }
    let rect = parse_rect(&parts[..4].join(":"))?;
    let n: usize = parts[4].trim().parse().map_err(|e| format!("{e}"))?;
    if n == 0 {
        return Err("grid point count must be positive".into());
    }
    Ok(GridSpec { rect, n })
}

#[derive(Serialize)]
struct ConfigOut {
    target_abs_tol: f64,
    max_height: f64,
    em_order: usize,
    min_shift: u32,
    zero_tol: f64,
    ray_tol: f64,
    boundary_samples: usize,
}

/// Exit code classes: numerical/domain errors vs failed verification.
fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::MirrorNotFound(_) | Error::DerivativeZeroNotFound(_, _) => 4,
        _ => 3,
    }
}

fn main() {
    let cli = Cli::parse();
    let mut params = EvalParams::default();
    if let Some(tol) = cli.tol {
        params.target_abs_tol = tol;
    }
    if let Some(m) = cli.em_order {
        params.em_order = m;
    }
    if let Some(h) = cli.max_height {
        params.max_height = h;
    }
    if cli.show_config {
        let cfg = ConfigOut {
            target_abs_tol: params.target_abs_tol,
            max_height: params.max_height,
            em_order: params.em_order,
            min_shift: params.min_shift,
            zero_tol: ZERO_TOL,
            ray_tol: 1e-8,
            boundary_samples: 400,
        };
        println!("{}", serde_json::to_string(&cfg).unwrap());
        return;
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required (try --help)");
        std::process::exit(2);
    };
    match run(command, &params) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code_for(&e));
        }
    }
}

fn load_spec(args: &SpecArgs) -> dhfun::Result<DhSpec> {
    let group = CharacterGroup::new(args.modulus);
    if args.char_label >= group.count() {
        return Err(Error::InvalidInput(format!(
            "character label {} out of range for modulus {} (phi = {})",
            args.char_label,
            args.modulus,
            group.count()
        )));
    }
    DhSpec::build(&group.character(args.char_label))
}

fn run(command: Command, params: &EvalParams) -> dhfun::Result<i32> {
    match command {
        Command::Characters { cmd } => match cmd {
            CharactersCmd::List { modulus } => {
                #[derive(Serialize)]
                struct Rec {
                    label: u64,
                    modulus: u64,
                    conductor: u64,
                    parity: u32,
                    values: Vec<Option<(i64, i64)>>,
                }
                for chi in dhfun::enumerate_characters(modulus) {
                    let values = (1..=modulus)
                        .map(|n| chi.value_turn(n).map(|t| (t.numer(), t.denom())))
                        .collect();
                    let rec = Rec {
                        label: chi.label(),
                        modulus,
                        conductor: chi.conductor(),
                        parity: chi.parity().kappa(),
                        values,
                    };
                    println!("{}", serde_json::to_string(&rec).unwrap());
                }
                Ok(0)
            }
        },
        Command::Eval { cmd } => match cmd {
            EvalCmd::L {
                modulus,
                char_label,
                s,
            } => {
                let group = CharacterGroup::new(modulus);
                if char_label >= group.count() {
                    return Err(Error::InvalidInput(format!(
                        "character label {char_label} out of range for modulus {modulus}"
                    )));
                }
                let chi = group.character(char_label);
                let (value, est_error) = dhfun::lfunc::dirichlet_l_with_error(&chi, s, params)?;
                #[derive(Serialize)]
                struct Out {
                    re: f64,
                    im: f64,
                    est_error: f64,
                }
                println!(
                    "{}",
                    serde_json::to_string(&Out {
                        re: value.re,
                        im: value.im,
                        est_error
                    })
                    .unwrap()
                );
                Ok(0)
            }
        },
        Command::Dh { cmd } => match cmd {
            DhCmd::Build(args) => {
                let spec = load_spec(&args)?;
                println!("{}", serde_json::to_string(&spec.summary()).unwrap());
                Ok(0)
            }
            DhCmd::Eval { spec, s } => {
                let spec = load_spec(&spec)?;
                let v = spec.eval(s, params)?;
                #[derive(Serialize)]
                struct Out {
                    s: Complex64,
                    re: f64,
                    im: f64,
                }
                println!(
                    "{}",
                    serde_json::to_string(&Out {
                        s,
                        re: v.re,
                        im: v.im
                    })
                    .unwrap()
                );
                Ok(0)
            }
            DhCmd::Residual { spec, grid } => {
                let spec = load_spec(&spec)?;
                let (points, max) = residual_grid(
                    &spec,
                    (grid.rect.s0, grid.rect.s1),
                    (grid.rect.t0, grid.rect.t1),
                    grid.n,
                    params,
                )?;
                #[derive(Serialize)]
                struct Row {
                    sigma: f64,
                    t: f64,
                    residual: f64,
                }
                for (s, r) in &points {
                    println!(
                        "{}",
                        serde_json::to_string(&Row {
                            sigma: s.re,
                            t: s.im,
                            residual: *r
                        })
                        .unwrap()
                    );
                }
                #[derive(Serialize)]
                struct Summary {
                    max_residual: f64,
                    points: usize,
                }
                println!(
                    "{}",
                    serde_json::to_string(&Summary {
                        max_residual: max,
                        points: points.len()
                    })
                    .unwrap()
                );
                Ok(0)
            }
        },
        Command::Zeros { cmd } => match cmd {
            ZerosCmd::Scan {
                spec,
                rect,
                derivative,
            } => {
                let spec = load_spec(&spec)?;
                let search = SearchRect::new(rect.s0, rect.s1, rect.t0, rect.t1);
                let report = if derivative {
                    let g = spec.derivative_evaluator(params);
                    find_zeros(&g, &search, ZERO_TOL)?
                } else {
                    let f = spec.evaluator(params);
                    let mut rep = find_zeros(&f, &search, ZERO_TOL)?;
                    let mut with_mirrors = Vec::with_capacity(rep.zeros.len());
                    for rec in rep.zeros {
                        with_mirrors.push(mirror_check(&spec, &rec, params, ZERO_TOL)?);
                    }
                    rep.zeros = with_mirrors;
                    rep
                };
                for rec in &report.zeros {
                    println!("{}", serde_json::to_string(rec).unwrap());
                }
                for cell in &report.unresolved {
                    eprintln!(
                        "warning: unresolved cell (winding {}) at {:?}",
                        cell.winding, cell.rect
                    );
                }
                Ok(if report.unresolved.is_empty() { 0 } else { 4 })
            }
            ZerosCmd::Mirror { spec, at } => {
                let spec = load_spec(&spec)?;
                let f = spec.evaluator(params);
                let rec = refine_newton(&f, at, ZERO_TOL)?;
                let rec = mirror_check(&spec, &rec, params, ZERO_TOL)?;
                println!("{}", serde_json::to_string(&rec).unwrap());
                Ok(0)
            }
        },
        Command::Trace(args) => {
            let spec = load_spec(&args.spec)?;
            let bounds = SearchRect::new(args.rect.s0, args.rect.s1, args.rect.t0, args.rect.t1);
            let f = spec.evaluator(params);
            let curve = trace_preimage(&f, args.seed, args.phi, args.step, &bounds)?;
            println!("sigma,t,modulus,ray_residual");
            for ((p, m), r) in curve.points.iter().zip(&curve.moduli).zip(&curve.residuals) {
                println!("{},{},{:e},{:e}", p.re, p.im, m, r);
            }
            if let Some(path) = args.svg {
                let svg = curves_to_svg(std::slice::from_ref(&curve), &bounds);
                std::fs::write(&path, svg)
                    .map_err(|e| Error::InvalidInput(format!("cannot write {path:?}: {e}")))?;
                eprintln!("svg written to {}", path.display());
            }
            Ok(0)
        }
        Command::Lincomb { cmd } => match cmd {
            LincombCmd::Demo { modulus, s0 } => {
                let pair = build_same_fe_pair(modulus, params)?;
                let combo = ComboFunction::new(pair, s0, params)?;
                let at_zero = combo.eval(s0, params)?.norm();
                let samples = [
                    Complex64::new(2.0, 5.0),
                    Complex64::new(0.25, 11.0),
                    Complex64::new(1.6, 27.5),
                ];
                let mut rows = Vec::new();
                let mut max_combo = 0.0f64;
                let mut max_component = 0.0f64;
                for s in samples {
                    let rc = combo.fe_residual(s, params)?;
                    let r1 = combo.pair.f1.fe_residual(s, params)?;
                    let r2 = combo.pair.f2.fe_residual(s, params)?;
                    max_combo = max_combo.max(rc);
                    max_component = max_component.max(r1.max(r2));
                    rows.push((s, rc, r1, r2));
                }
                // Separation: the combination's failure must stand clear of
                // component noise whenever a constant is non-real.
                let nonreal = combo.c1.im.abs() > 1e-9 || combo.c2.im.abs() > 1e-9;
                let separated = !nonreal || (max_combo > 1e-4 && max_component < 1e-8);
                #[derive(Serialize)]
                struct Out {
                    modulus: u64,
                    labels: (u64, u64),
                    s0: Complex64,
                    c1: Complex64,
                    c2: Complex64,
                    combo_at_s0: f64,
                    residual_at_samples: Vec<ResidRow>,
                    separation_ok: bool,
                }
                #[derive(Serialize)]
                struct ResidRow {
                    sigma: f64,
                    t: f64,
                    combo: f64,
                    component_f1: f64,
                    component_f2: f64,
                }
                let out = Out {
                    modulus,
                    labels: (combo.pair.f1.chi().label(), combo.pair.f2.chi().label()),
                    s0,
                    c1: combo.c1,
                    c2: combo.c2,
                    combo_at_s0: at_zero,
                    residual_at_samples: rows
                        .iter()
                        .map(|(s, rc, r1, r2)| ResidRow {
                            sigma: s.re,
                            t: s.im,
                            combo: *rc,
                            component_f1: *r1,
                            component_f2: *r2,
                        })
                        .collect(),
                    separation_ok: separated,
                };
                println!("{}", serde_json::to_string(&out).unwrap());
                Ok(if separated { 0 } else { 4 })
            }
        },
    }
}
