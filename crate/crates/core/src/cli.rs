//! Command-line surface: orbit enumeration and golden-table verification,
//! twist application along words, chain rendering, trigonometric-field
//! listings and Fricke queries.
//!
//! Exit codes: 0 success, 2 invalid input, 3 verification or finiteness
//! failure.

use crate::chains::{build_chain, ActionAngle, Angle, AngleVector, RationalAngle};
use crate::fricke::{
    angle_vector_from_traces, benedetto_goldman, benedetto_goldman_margin, fricke_coeffs,
    quad_variants, LiftTarget, ThetaQuad, TraceQuad,
};
use crate::orbits::{
    beta_membership_check, enumerate, load_document, to_csv, to_document, verify_against_table,
    OrbitOptions, OrbitStatus,
};
use crate::render::{chain_svg, Model};
use crate::representation::{
    coords_from_rep, twist_geometric_with_direction, Representation, TwistDirection,
};
use crate::surface::parse_word;
use crate::trigfields::{
    field_degree, is_discrete_triangle, list_angles, member, CosValue, FieldSpec, Rational,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// Shared run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub tol: f64,
    pub max_points: usize,
    pub model: Model,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(
        tol: f64,
        max_points: usize,
        model: Model,
        output: Option<PathBuf>,
    ) -> Result<RunConfig, String> {
        if !(tol > 0.0) {
            return Err(format!("tol must be positive, got {tol}"));
        }
        if max_points == 0 {
            return Err("max-points must be positive".into());
        }
        Ok(RunConfig {
            tol,
            max_points,
            model,
            output,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Halfplane,
    Disk,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Halfplane => Model::HalfPlane,
            ModelArg::Disk => Model::Disk,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "orbitforge",
    about = "Mapping-class-group orbits of hyperbolic triangle-chain representations",
    version
)]
pub struct Cli {
    /// Worker threads for parallel sections (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate an orbit, or verify a golden table.
    Orbit(OrbitArgs),
    /// Apply a twist word to a seed point along both computation paths.
    Twist(TwistArgs),
    /// Render a triangle chain to SVG.
    Render(RenderArgs),
    /// List or test membership in a trigonometric number field.
    Trigfield(TrigfieldArgs),
    /// Fricke coefficients, lifting verdict and angle recovery for traces.
    Fricke(FrickeArgs),
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    /// Number of punctures (checked against --alpha when given).
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated exact angles, e.g. 12pi/7,12pi/7,10pi/7,12pi/7.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Comma-separated seed beta values (exact angles or decimals).
    #[arg(long)]
    pub beta: Option<String>,
    /// Comma-separated seed gamma values; use `none` for absent entries.
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 20000)]
    pub max_points: usize,
    /// Exit 3 if the orbit is not finite.
    #[arg(long)]
    pub require_finite: bool,
    /// Verify a golden table (path, or bare name resolved in the data dir).
    #[arg(long)]
    pub verify: Option<String>,
    /// Write the orbit JSON document here.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write a CSV mirror of the document here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Also check beta values of regular points against the 15-angle list.
    #[arg(long)]
    pub check_beta: bool,
}

#[derive(Debug, Args)]
pub struct TwistArgs {
    #[arg(long)]
    pub alpha: String,
    #[arg(long)]
    pub beta: String,
    #[arg(long)]
    pub gamma: Option<String>,
    /// Twist word, e.g. "t(2,3)" or "t(1,2)^-1 t(1,3)".
    #[arg(long)]
    pub word: String,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub alpha: String,
    #[arg(long)]
    pub beta: String,
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long, value_enum, default_value_t = ModelArg::Halfplane)]
    pub model: ModelArg,
    /// Output SVG path.
    #[arg(long, default_value = "chain.svg")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrigfieldArgs {
    /// Field parameter N of Q(cos(pi/N)).
    #[arg(long = "N")]
    pub n: u64,
    /// Test membership of 2cos(2*pi*p/q) given as p/q.
    #[arg(long)]
    pub check: Option<String>,
    /// Test discreteness of a triangle group given as p,q,r (rationals
    /// like 7/2 allowed).
    #[arg(long)]
    pub felikson: Option<String>,
}

#[derive(Debug, Args)]
pub struct FrickeArgs {
    /// Four comma-separated traces in [-2,2].
    #[arg(long, allow_hyphen_values = true)]
    pub traces: Option<String>,
    /// JSON file with a list of theta quadruples (multiples of pi).
    #[arg(long)]
    pub theta_file: Option<PathBuf>,
}

struct Failure {
    code: i32,
    msg: String,
}

impl Failure {
    fn input<S: Into<String>>(msg: S) -> Failure {
        Failure {
            code: EXIT_INPUT,
            msg: msg.into(),
        }
    }

    fn verify<S: Into<String>>(msg: S) -> Failure {
        Failure {
            code: EXIT_VERIFY,
            msg: msg.into(),
        }
    }
}

/// Parses the exact-angle grammar: `<int>pi/<int>`, `<int>pi`, `pi/<int>`
/// or `pi`. Plain decimals are rejected.
pub fn parse_rational_angle(s: &str) -> Result<RationalAngle, String> {
    let t = s.trim();
    let Some(ix) = t.find("pi") else {
        return Err(format!(
            "'{t}': expected an exact angle like 12pi/7 (decimals are not accepted here)"
        ));
    };
    let num_s = &t[..ix];
    let rest = &t[ix + 2..];
    let num: i64 = if num_s.is_empty() {
        1
    } else {
        num_s
            .parse()
            .map_err(|_| format!("bad numerator '{num_s}' in '{t}'"))?
    };
    let den: i64 = if rest.is_empty() {
        1
    } else {
        let r = rest
            .strip_prefix('/')
            .ok_or_else(|| format!("expected '/' after pi in '{t}'"))?;
        r.parse()
            .map_err(|_| format!("bad denominator '{r}' in '{t}'"))?
    };
    RationalAngle::new(num, den).map_err(|e| format!("'{t}': {e}"))
}

/// Parses a comma-separated exact angle vector.
pub fn parse_alpha(s: &str) -> Result<AngleVector, String> {
    let entries = s
        .split(',')
        .map(|p| parse_rational_angle(p).map(Angle::Rational))
        .collect::<Result<Vec<_>, _>>()?;
    AngleVector::new(entries).map_err(|e| e.to_string())
}

/// Parses one seed value: exact-angle grammar or plain decimal.
pub fn parse_seed_value(s: &str) -> Result<f64, String> {
    let t = s.trim();
    if t.contains("pi") {
        Ok(parse_rational_angle(t)?.value())
    } else {
        t.parse().map_err(|_| format!("bad number '{t}'"))
    }
}

pub fn parse_seed_values(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_seed_value).collect()
}

/// Parses gamma entries; `none` (or an empty field) marks an absent value.
pub fn parse_gamma_values(s: &str) -> Result<Vec<Option<f64>>, String> {
    s.split(',')
        .map(|p| {
            let t = p.trim();
            if t.is_empty() || t.eq_ignore_ascii_case("none") {
                Ok(None)
            } else {
                parse_seed_value(t).map(Some)
            }
        })
        .collect()
}

/// Pretty-prints an angle, preferring exact fractions of pi.
pub fn format_angle(v: f64) -> String {
    if v.abs() < 1e-9 {
        return "0".into();
    }
    if let Some(r) = crate::trigfields::recognize_rational_angle(v, 96, 1e-9) {
        return match (r.num, r.den) {
            (1, 1) => "pi".into(),
            (n, 1) => format!("{n}pi"),
            (1, d) => format!("pi/{d}"),
            (n, d) => format!("{n}pi/{d}"),
        };
    }
    format!("{v:.9}")
}

fn format_coords(c: &ActionAngle) -> String {
    let beta: Vec<String> = c.beta.iter().map(|&b| format_angle(b)).collect();
    let gamma: Vec<String> = c
        .gamma
        .iter()
        .map(|g| match g {
            Some(v) => format_angle(*v),
            None => "none".into(),
        })
        .collect();
    format!("beta = ({}), gamma = ({})", beta.join(", "), gamma.join(", "))
}

fn status_name(s: OrbitStatus) -> &'static str {
    match s {
        OrbitStatus::Finite => "Finite",
        OrbitStatus::Exhausted => "Exhausted",
    }
}

fn seed_from_args(
    alpha: &AngleVector,
    beta: &Option<String>,
    gamma: &Option<String>,
) -> Result<ActionAngle, Failure> {
    let n = alpha.n();
    let beta_vals = match beta {
        Some(s) => parse_seed_values(s).map_err(Failure::input)?,
        None => return Err(Failure::input("--beta is required")),
    };
    let gamma_vals = match gamma {
        Some(s) => parse_gamma_values(s).map_err(Failure::input)?,
        None => vec![None; n.saturating_sub(3)],
    };
    ActionAngle::from_parts(alpha, beta_vals, gamma_vals)
        .map_err(|e| Failure::input(format!("invalid seed: {e}")))
}

fn cmd_orbit(args: &OrbitArgs) -> Result<(), Failure> {
    let config = RunConfig::new(args.tol, args.max_points, Model::HalfPlane, args.output.clone())
        .map_err(Failure::input)?;
    let opts = OrbitOptions {
        tol: config.tol,
        max_points: config.max_points,
    };

    if let Some(table) = &args.verify {
        let doc = load_document(table).map_err(|e| Failure::input(e.to_string()))?;
        let alpha = doc
            .alpha_vector()
            .map_err(|e| Failure::input(e.to_string()))?;
        let base = doc
            .points
            .iter()
            .position(|p| p.word.trim().is_empty())
            .ok_or_else(|| Failure::input("table has no basepoint (empty word) row"))?;
        let seed = &doc.point_coords()[base];
        let result =
            enumerate(&alpha, seed, &opts).map_err(|e| Failure::input(e.to_string()))?;
        let report = verify_against_table(&result, &doc, config.tol)
            .map_err(|e| Failure::input(e.to_string()))?;
        if report.ok() && result.status == OrbitStatus::Finite {
            println!("OK: {}/{} rows matched", report.matched, report.rows);
            return Ok(());
        }
        return Err(Failure::verify(format!(
            "FAIL: {}/{} rows matched; status {}; missing rows {:?}; extra points {:?}; displaced rows {:?}",
            report.matched,
            report.rows,
            status_name(result.status),
            report.missing,
            report.extra,
            report.displaced
        )));
    }

    let alpha = match &args.alpha {
        Some(s) => parse_alpha(s).map_err(Failure::input)?,
        None => return Err(Failure::input("--alpha is required unless --verify is used")),
    };
    if let Some(n) = args.n {
        if n != alpha.n() {
            return Err(Failure::input(format!(
                "--n {} does not match {} alpha entries",
                n,
                alpha.n()
            )));
        }
    }
    let seed = seed_from_args(&alpha, &args.beta, &args.gamma)?;
    let result = enumerate(&alpha, &seed, &opts).map_err(|e| Failure::input(e.to_string()))?;

    println!("{}, {} points", status_name(result.status), result.points.len());
    let layer_strs: Vec<String> = result.layers.iter().map(|l| l.to_string()).collect();
    println!("layers: {}", layer_strs.join(" "));

    if args.check_beta {
        let report = beta_membership_check(&result, config.tol);
        println!(
            "beta membership: {}",
            if report.all_ok { "all regular points pass" } else { "FAILURES present" }
        );
    }

    let doc = to_document(&result, &alpha, config.tol);
    if let Some(path) = &config.output {
        let text = serde_json::to_string_pretty(&doc)
            .map_err(|e| Failure::input(e.to_string()))?;
        std::fs::write(path, text)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &args.csv {
        std::fs::write(path, to_csv(&doc))
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
    }

    if args.require_finite && result.status != OrbitStatus::Finite {
        return Err(Failure::verify(format!(
            "orbit not finite: {} at {} points",
            status_name(result.status),
            result.points.len()
        )));
    }
    Ok(())
}

fn cmd_twist(args: &TwistArgs) -> Result<(), Failure> {
    let alpha = parse_alpha(&args.alpha).map_err(Failure::input)?;
    let seed = seed_from_args(&alpha, &Some(args.beta.clone()), &args.gamma)?;
    let word = parse_word(&args.word, alpha.n()).map_err(|e| Failure::input(e.to_string()))?;

    // Algebraic path.
    let chain = build_chain(&alpha, &seed).map_err(|e| Failure::input(e.to_string()))?;
    let rep = Representation::from_chain(&chain, &alpha)
        .map_err(|e| Failure::input(e.to_string()))?;
    let twisted = rep.apply_word(&word, TwistDirection::Direct);
    let alg = coords_from_rep(&twisted).map_err(|e| Failure::input(e.to_string()))?;

    // Geometric path, letter by letter.
    let mut geo = seed.clone();
    for letter in &word.letters {
        let dir = if letter.inverse {
            TwistDirection::Inverse
        } else {
            TwistDirection::Direct
        };
        geo = twist_geometric_with_direction(&alpha, &geo, letter.gen, dir)
            .map_err(|e| Failure::input(e.to_string()))?
            .coords;
    }

    if alg.degenerate != geo.degenerate {
        return Err(Failure::verify(
            "algebraic and geometric paths disagree on the degeneracy mask",
        ));
    }
    let mut dev = 0.0f64;
    for (x, y) in alg.beta.iter().zip(geo.beta.iter()) {
        dev = dev.max((x - y).abs());
    }
    for (x, y) in alg.gamma.iter().zip(geo.gamma.iter()) {
        if let (Some(u), Some(v)) = (x, y) {
            let d = (u - v).rem_euclid(2.0 * std::f64::consts::PI);
            dev = dev.max(d.min(2.0 * std::f64::consts::PI - d));
        }
    }

    println!("{}", format_coords(&alg));
    println!("max deviation between paths: {dev:.3e}");
    Ok(())
}

fn cmd_render(args: &RenderArgs) -> Result<(), Failure> {
    let alpha = parse_alpha(&args.alpha).map_err(Failure::input)?;
    let seed = seed_from_args(&alpha, &Some(args.beta.clone()), &args.gamma)?;
    let chain = build_chain(&alpha, &seed).map_err(|e| Failure::input(e.to_string()))?;
    let svg = chain_svg(&chain, args.model.into());
    std::fs::write(&args.output, svg)
        .map_err(|e| Failure::input(format!("cannot write {}: {e}", args.output.display())))?;
    println!("wrote {}", args.output.display());
    Ok(())
}

fn parse_fraction_u64(s: &str) -> Result<(u64, u64), String> {
    let (p, q) = s
        .split_once('/')
        .ok_or_else(|| format!("expected p/q, got '{s}'"))?;
    let p: u64 = p.trim().parse().map_err(|_| format!("bad numerator '{p}'"))?;
    let q: u64 = q.trim().parse().map_err(|_| format!("bad denominator '{q}'"))?;
    Ok((p, q))
}

fn parse_rational_entry(s: &str) -> Result<Rational, String> {
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| format!("bad entry '{t}'"))?;
        let q: i64 = q.trim().parse().map_err(|_| format!("bad entry '{t}'"))?;
        Rational::new(p, q).map_err(|e| e.to_string())
    } else {
        let v: i64 = t.parse().map_err(|_| format!("bad entry '{t}'"))?;
        Rational::integer(v).map_err(|e| e.to_string())
    }
}

fn cmd_trigfield(args: &TrigfieldArgs) -> Result<(), Failure> {
    let spec = FieldSpec::new(args.n).map_err(|e| Failure::input(e.to_string()))?;

    if let Some(triple) = &args.felikson {
        let parts: Vec<Rational> = triple
            .split(',')
            .map(parse_rational_entry)
            .collect::<Result<Vec<_>, _>>()
            .map_err(Failure::input)?;
        if parts.len() != 3 {
            return Err(Failure::input("--felikson needs exactly three entries"));
        }
        let verdict = is_discrete_triangle(parts[0], parts[1], parts[2])
            .map_err(|e| Failure::input(e.to_string()))?;
        println!(
            "triangle group ({triple}): {}",
            if verdict { "discrete" } else { "not discrete" }
        );
        return Ok(());
    }

    if let Some(frac) = &args.check {
        let (p, q) = parse_fraction_u64(frac).map_err(Failure::input)?;
        let x = CosValue::from_turn_fraction(p as i64, q as i64)
            .ok_or_else(|| Failure::input(format!("{p}/{q} reduces to a half-turn multiple")))?;
        let verdict = member(x, spec);
        println!(
            "2cos(2pi*{}/{}) in Q(cos(pi/{})): {}",
            x.p, x.q, args.n, verdict
        );
        return Ok(());
    }

    println!(
        "Q(cos(pi/{})) has degree {}; angles with 2cos(r/2) in the field:",
        args.n,
        field_degree(spec)
    );
    for r in list_angles(spec) {
        println!("{}", format_angle(r.value()));
    }
    Ok(())
}

fn cmd_fricke(args: &FrickeArgs) -> Result<(), Failure> {
    if let Some(spec) = &args.traces {
        let vals: Vec<f64> = spec
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("bad trace '{p}'"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(Failure::input)?;
        if vals.len() != 4 {
            return Err(Failure::input("--traces needs exactly four values"));
        }
        let t = TraceQuad::new(vals[0], vals[1], vals[2], vals[3])
            .map_err(|e| Failure::input(e.to_string()))?;
        let f = fricke_coeffs(t);
        println!("A B C D = {} {} {} {}", f.a, f.b, f.c, f.d);
        match benedetto_goldman(t) {
            Ok(verdict) => {
                let (lhs, rhs) = benedetto_goldman_margin(t);
                println!("lift: {verdict} (LHS {lhs:.9}, RHS {rhs:.9})");
                if verdict == LiftTarget::Sl2r {
                    let alpha = angle_vector_from_traces(t)
                        .map_err(|e| Failure::input(e.to_string()))?;
                    let parts: Vec<String> =
                        alpha.values().iter().map(|&v| format_angle(v)).collect();
                    println!("alpha = ({})", parts.join(", "));
                }
            }
            Err(e) => return Err(Failure::input(e.to_string())),
        }
        return Ok(());
    }

    if let Some(path) = &args.theta_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
        let quads: Vec<[f64; 4]> =
            serde_json::from_str(&text).map_err(|e| Failure::input(e.to_string()))?;
        for q in quads {
            let th = ThetaQuad::new(q[0], q[1], q[2], q[3]);
            let variants = quad_variants(th);
            let mut sl2r = 0usize;
            let mut su2 = 0usize;
            for v in &variants {
                match benedetto_goldman(*v) {
                    Ok(LiftTarget::Sl2r) => sl2r += 1,
                    Ok(LiftTarget::Su2) => su2 += 1,
                    Err(_) => {}
                }
            }
            println!(
                "theta ({}, {}, {}, {}): {} variants, {} SL(2,R), {} SU(2)",
                q[0],
                q[1],
                q[2],
                q[3],
                variants.len(),
                sl2r,
                su2
            );
        }
        return Ok(());
    }

    Err(Failure::input("fricke needs --traces or --theta-file"))
}

/// Parses argv and runs; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    run_parsed(&cli)
}

/// Runs an already-parsed invocation (argv-independent, for testing).
pub fn run_parsed(cli: &Cli) -> i32 {
    if cli.threads > 0 {
        // Ignore failure: the global pool may already be initialized.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let outcome = match &cli.command {
        Command::Orbit(a) => cmd_orbit(a),
        Command::Twist(a) => cmd_twist(a),
        Command::Render(a) => cmd_render(a),
        Command::Trigfield(a) => cmd_trigfield(a),
        Command::Fricke(a) => cmd_fricke(a),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("{}", f.msg);
            f.code
        }
    }
}
