//! Command-line front end for the contraction laboratory.

mod artifacts;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use contraction_lab::asymptote::{
    asymptote_norm, membership_scan_with_margin, similarity_witness, SpaceWeight, DEFAULT_MARGIN,
};
use contraction_lab::constructions::{run_experiment, ExperimentConfig, Tolerances, Variant};
use contraction_lab::linalg::CMatrix;
use contraction_lab::measure::{fat_cantor_arcs, ArcSet, MeasureSpec, PowerWeight, RadialWeight};
use contraction_lab::operator_lab::{
    char_fn, charfn_identities_check, identity_battery, trace_norm_sweep_on, ContractionMatrix,
};
use contraction_lab::poly_space::{gram, standard_lambda_grid, PolyVector, TruncatedSpace};
use contraction_lab::LabError;

use artifacts::{matrix_rows, Artifacts, Format};

#[derive(Parser, Debug)]
#[command(name = "contraction-lab", version, about = "Finite-section experiments on weighted polynomial spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Directory for artifacts; JSON goes to stdout when absent.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads, an integer or `auto`.
    #[arg(long, global = true, env = "CONTRACTION_LAB_THREADS", default_value = "auto")]
    threads: String,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Clone)]
struct MeasureArgs {
    /// JSON measure file `{radial, arcs, power, circle_scale}`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Exponent of the radial weight `(1 − |z|²)^α`.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Arcs as a JSON list of `[a, b]` angle pairs.
    #[arg(long)]
    arcs: Option<String>,
    /// Exponent of the circle weight `|1 − ζ|^s`.
    #[arg(long)]
    power_s: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    circle_scale: f64,
}

impl MeasureArgs {
    fn build(&self) -> Result<MeasureSpec, CliError> {
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            return serde_json::from_str(&text).map_err(|e| CliError::Input(format!("measure config: {e}")));
        }
        let radial = self.alpha.map(RadialWeight::new).transpose()?;
        let arcs = match &self.arcs {
            Some(text) => {
                let pairs: Vec<[f64; 2]> =
                    serde_json::from_str(text).map_err(|e| CliError::Input(format!("--arcs: {e}")))?;
                Some(ArcSet::new(&pairs.iter().map(|p| (p[0], p[1])).collect::<Vec<_>>())?)
            }
            None => None,
        };
        let power = self.power_s.map(PowerWeight::new).transpose()?;
        Ok(MeasureSpec::new(radial, arcs, power, self.circle_scale)?)
    }
}

#[derive(Args, Debug, Clone)]
struct LambdaArgs {
    /// Evaluation point `re,im` (repeatable); the standard grid when absent.
    #[arg(long = "lambda", allow_hyphen_values = true)]
    lambdas: Vec<String>,
}

impl LambdaArgs {
    fn points(&self) -> Result<Vec<Complex64>, CliError> {
        if self.lambdas.is_empty() {
            return Ok(standard_lambda_grid());
        }
        self.lambdas.iter().map(|s| parse_complex(s)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AsymptoteMode {
    Norm,
    Membership,
    Witness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpaceArg {
    Hardy,
    Bergman,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monomial moments and the Gram matrix.
    Moments {
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long = "N")]
        n: usize,
    },
    /// Gram matrix, orthonormalization and conditioning.
    Gram {
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long = "N")]
        n: usize,
    },
    /// Minimum modulus of `b_λ(T_N)` on the truncated space.
    Minmod {
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long = "N")]
        n: usize,
        #[command(flatten)]
        lambda: LambdaArgs,
    },
    /// Codimension-one witness for `(z − λ)`.
    Codim {
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long = "N")]
        n: usize,
        #[command(flatten)]
        lambda: LambdaArgs,
    },
    /// Characteristic function at `z`, of a matrix or of `T_N`.
    Charfn {
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long = "N")]
        n: Option<usize>,
        /// Matrix as JSON rows; entries are numbers or `[re, im]`.
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Identity check points `λ`, `μ` (when both are given).
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// `trace(I − B̃_λ)` over a grid, for several orders.
    TracenormSweep {
        #[command(flatten)]
        measure: MeasureArgs,
        /// Comma-separated orders.
        #[arg(long = "N", value_delimiter = ',')]
        orders: Vec<usize>,
        #[command(flatten)]
        lambda: LambdaArgs,
    },
    /// Asymptote norms, membership scans and the similarity witness.
    Asymptote {
        #[arg(long, value_enum, default_value_t = AsymptoteMode::Norm)]
        mode: AsymptoteMode,
        #[command(flatten)]
        measure: MeasureArgs,
        /// Coefficients of `f`, each `re` or `re,im`, separated by `;`.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        f: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = SpaceArg::Bergman)]
        space: SpaceArg,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        terms: u64,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: f64,
    },
    /// Fat-Cantor arc set and its Carleson sums.
    Carleson {
        #[arg(long, default_value_t = 0.5)]
        a: f64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = 8)]
        levels: u32,
    },
    /// Seeded battery of characteristic-function identities.
    Identities {
        /// Dimension range `lo-hi`.
        #[arg(long, default_value = "2-8")]
        dims: String,
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Full experiment for one variant.
    Experiment {
        /// JSON experiment configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        variant: Option<String>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        margin_tol: Option<f64>,
        #[arg(long)]
        kernel_tol: Option<f64>,
        #[arg(long)]
        identity_tol: Option<f64>,
        #[arg(long)]
        asymptote_tol: Option<f64>,
        #[arg(long)]
        saturation_ratio: Option<f64>,
    },
}

#[derive(Debug)]
enum CliError {
    Lab(LabError),
    Input(String),
    Io(String),
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        CliError::Lab(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lab(_) | CliError::Input(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Lab(e) => e.to_string(),
            CliError::Input(s) => format!("invalid input: {s}"),
            CliError::Io(s) => format!("i/o error: {s}"),
        }
    }
}

fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| CliError::Input(format!("bad number {t:?} in {s:?}")));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(CliError::Input(format!("expected re or re,im, got {s:?}"))),
    }
}

fn parse_matrix(text: &str) -> Result<CMatrix, CliError> {
    let rows: Vec<Vec<Value>> = serde_json::from_str(text).map_err(|e| CliError::Input(format!("--matrix: {e}")))?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(CliError::Input("--matrix must be a nonempty rectangular list of rows".into()));
    }
    let entry = |v: &Value| -> Result<Complex64, CliError> {
        match v {
            Value::Number(x) => Ok(Complex64::new(x.as_f64().unwrap_or(f64::NAN), 0.0)),
            Value::Array(p) if p.len() == 2 => match (p[0].as_f64(), p[1].as_f64()) {
                (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                _ => Err(CliError::Input(format!("bad matrix entry {v}"))),
            },
            _ => Err(CliError::Input(format!("bad matrix entry {v}"))),
        }
    };
    let mut m = CMatrix::zeros(n, rows[0].len());
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            m[(i, j)] = entry(v)?;
        }
    }
    Ok(m)
}

fn parse_dims(s: &str) -> Result<std::ops::RangeInclusive<usize>, CliError> {
    let bad = || CliError::Input(format!("--dims expects lo-hi, got {s:?}"));
    let (lo, hi) = s.split_once('-').unwrap_or((s, s));
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

fn parse_poly(s: &str) -> Result<PolyVector, CliError> {
    let coeffs = s.split(';').map(parse_complex).collect::<Result<Vec<_>, _>>()?;
    Ok(PolyVector::new(coeffs))
}

fn c(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Serialize)]
struct GramEntry {
    j: usize,
    k: usize,
    re: f64,
    im: f64,
}

fn gram_entries(g: &CMatrix) -> Vec<GramEntry> {
    let mut out = Vec::with_capacity(g.len());
    for j in 0..g.nrows() {
        for k in 0..g.ncols() {
            out.push(GramEntry {
                j,
                k,
                re: g[(j, k)].re,
                im: g[(j, k)].im,
            });
        }
    }
    out
}

/// Outcome of a subcommand: the artifacts and whether its verdicts passed.
struct Outcome {
    artifacts: Artifacts,
    passed: bool,
}

impl Outcome {
    fn ok(artifacts: Artifacts) -> Self {
        Self { artifacts, passed: true }
    }
}

fn cmd_moments(measure: &MeasureArgs, n: usize, with_onb: bool) -> Result<Outcome, CliError> {
    let nu = measure.build()?;
    let data = gram(&nu, n)?;
    let name = if with_onb { "gram" } else { "moments" };
    let mut result = json!({
        "measure": nu,
        "N": n,
        "gram": matrix_rows(data.gram()),
        "conditioning": {
            "method": data.method(),
            "min_eigenvalue": data.min_eigenvalue(),
            "max_eigenvalue": data.max_eigenvalue(),
            "cond_estimate": data.cond_estimate(),
            "circle_tail_bound": data.circle_tail_bound(),
        },
    });
    if with_onb {
        result["eigenvalues"] = json!(data.eigenvalues());
        result["onb_transform"] = matrix_rows(data.onb_transform());
        result["onb_residual"] = json!(data.onb_residual());
    }
    let mut artifacts = Artifacts::new(name, result);
    artifacts.table(name, &gram_entries(data.gram()));
    Ok(Outcome::ok(artifacts))
}

#[derive(Serialize)]
struct MinmodRow {
    lambda_re: f64,
    lambda_im: f64,
    #[serde(rename = "N")]
    n: usize,
    min_modulus: f64,
}

fn cmd_minmod(measure: &MeasureArgs, n: usize, lambda: &LambdaArgs) -> Result<Outcome, CliError> {
    use rayon::prelude::*;
    let nu = measure.build()?;
    let space = TruncatedSpace::new(&nu, n)?;
    let points = lambda.points()?;
    let rows = points
        .par_iter()
        .map(|&l| {
            Ok(MinmodRow {
                lambda_re: l.re,
                lambda_im: l.im,
                n,
                min_modulus: space.min_modulus(l)?.value,
            })
        })
        .collect::<Result<Vec<_>, LabError>>()?;
    let bound = nu.radial().map(|r| 1.0 / (r.alpha() + 2.0).sqrt());
    let mut artifacts = Artifacts::new("minmod", json!({"measure": nu, "N": n, "radial_bound": bound, "rows": rows}));
    artifacts.table("minmod", &rows);
    Ok(Outcome::ok(artifacts))
}

fn cmd_codim(measure: &MeasureArgs, n: usize, lambda: &LambdaArgs) -> Result<Outcome, CliError> {
    use rayon::prelude::*;
    let nu = measure.build()?;
    let space = TruncatedSpace::new(&nu, n)?;
    let points = lambda.points()?;
    let rows = points
        .par_iter()
        .map(|&l| space.codim_witness(l))
        .collect::<Result<Vec<_>, LabError>>()?;
    let square = contraction_lab::operator_lab::coker_dim_default(&space.multiplication().t_n);
    let flat: Vec<Value> = rows
        .iter()
        .map(|w| {
            json!({
                "lambda_re": w.lambda.re,
                "lambda_im": w.lambda.im,
                "N": n,
                "kernel_residual": w.kernel_residual,
                "rect_coker": w.rect_coker,
                "rect_sigma_min": w.rect_sigma_min,
                "rect_threshold": w.rect_threshold,
            })
        })
        .collect();
    let mut artifacts = Artifacts::new(
        "codim",
        json!({"measure": nu, "N": n, "square_coker_at_zero": square, "rows": flat}),
    );
    artifacts.table("codim", &flat);
    Ok(Outcome::ok(artifacts))
}

#[allow(clippy::too_many_arguments)]
fn cmd_charfn(
    measure: &MeasureArgs,
    n: Option<usize>,
    matrix: Option<&str>,
    z: &str,
    lambda: Option<&str>,
    mu: Option<&str>,
    tol: f64,
) -> Result<Outcome, CliError> {
    let t = match (matrix, n) {
        (Some(text), _) => ContractionMatrix::new(parse_matrix(text)?)?,
        (None, Some(n)) => {
            let nu = measure.build()?;
            ContractionMatrix::new(TruncatedSpace::new(&nu, n)?.multiplication().t_n.clone())?
        }
        (None, None) => return Err(CliError::Input("charfn needs --matrix or a measure with --N".into())),
    };
    let z = parse_complex(z)?;
    let sample = char_fn(&t, z, None)?;
    let mut result = json!({
        "dim": t.dim(),
        "z": c(z),
        "theta": matrix_rows(&sample.theta),
        "theta_norm": sample.norm(),
        "defect_rank": sample.d_t_basis.ncols(),
        "defect_star_rank": sample.d_tstar_basis.ncols(),
        "rank_threshold": sample.rank_threshold,
    });
    let mut passed = true;
    if let (Some(l), Some(m)) = (lambda, mu) {
        let report = charfn_identities_check(&t, parse_complex(l)?, parse_complex(m)?, z, tol)?;
        passed = report.passed();
        result["identities"] = serde_json::to_value(&report).expect("serializable");
    }
    let mut artifacts = Artifacts::new("charfn", result);
    artifacts.table("charfn", &gram_entries(&sample.theta));
    Ok(Outcome { artifacts, passed })
}

#[derive(Serialize)]
struct SweepRow {
    lambda_re: f64,
    lambda_im: f64,
    #[serde(rename = "N")]
    n: usize,
    value: f64,
}

fn cmd_sweep(measure: &MeasureArgs, orders: &[usize], lambda: &LambdaArgs) -> Result<Outcome, CliError> {
    let nu = measure.build()?;
    let points = lambda.points()?;
    if orders.is_empty() {
        return Err(CliError::Input("--N needs at least one order".into()));
    }
    let mut rows = Vec::new();
    for &n in orders {
        let space = TruncatedSpace::new(&nu, n)?;
        for s in trace_norm_sweep_on(&space, &points)? {
            rows.push(SweepRow {
                lambda_re: s.lambda.re,
                lambda_im: s.lambda.im,
                n,
                value: s.value,
            });
        }
    }
    let mut artifacts = Artifacts::new("tracenorm-sweep", json!({"measure": nu, "orders": orders, "rows": rows}));
    artifacts.table("tracenorm_sweep", &rows);
    Ok(Outcome::ok(artifacts))
}

#[allow(clippy::too_many_arguments)]
fn cmd_asymptote(
    mode: AsymptoteMode,
    measure: &MeasureArgs,
    f: &str,
    tol: f64,
    space: SpaceArg,
    beta: Option<f64>,
    gamma: Option<f64>,
    terms: u64,
    margin: f64,
) -> Result<Outcome, CliError> {
    let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| CliError::Input(format!("--{flag} is required")));
    match mode {
        AsymptoteMode::Norm => {
            let nu = measure.build()?;
            let record = asymptote_norm(&nu, &parse_poly(f)?, tol)?;
            let mut artifacts = Artifacts::new("asymptote", json!({"measure": nu, "record": record}));
            artifacts.table("asymptote", &record.norms);
            Ok(Outcome::ok(artifacts))
        }
        AsymptoteMode::Membership => {
            let weight = match space {
                SpaceArg::Hardy => SpaceWeight::Hardy,
                SpaceArg::Bergman => SpaceWeight::Bergman {
                    alpha: need(measure.alpha, "alpha")?,
                },
            };
            let scan = membership_scan_with_margin(weight, need(beta, "beta")?, terms, margin)?;
            let rows: Vec<Value> = scan
                .partial_sums
                .iter()
                .map(|&(n, s)| json!({"n": n, "partial_sum": s}))
                .collect();
            let mut artifacts = Artifacts::new("asymptote", json!({"scan": scan}));
            artifacts.table("membership", &rows);
            Ok(Outcome::ok(artifacts))
        }
        AsymptoteMode::Witness => {
            let alpha = need(measure.alpha, "alpha")?;
            let w = similarity_witness(alpha, need(beta, "beta")?, need(gamma, "gamma")?, terms)?;
            let passed = w.valid;
            let rows: Vec<Value> = w
                .quotient_scan
                .partial_sums
                .iter()
                .map(|&(n, s)| json!({"n": n, "quotient_partial_sum": s}))
                .collect();
            let mut artifacts = Artifacts::new("asymptote", json!({"witness": w}));
            artifacts.table("witness", &rows);
            Ok(Outcome { artifacts, passed })
        }
    }
}

fn cmd_carleson(a: f64, eps: f64, levels: u32) -> Result<Outcome, CliError> {
    let set = fat_cantor_arcs(a, eps, levels)?;
    let rows: Vec<Value> = set
        .arcs
        .arcs()
        .iter()
        .enumerate()
        .map(|(i, arc)| json!({"index": i, "start": arc.start, "end": arc.end(), "length": arc.length}))
        .collect();
    let result = json!({
        "params": set.params,
        "arc_count": set.arcs.len(),
        "measure": set.measure,
        "measure_from_arcs": set.measure_from_arcs,
        "closed_form_measure": set.params.measure(),
        "carleson_sum": set.carleson_sum,
        "carleson_lower_bound": set.carleson_lower_bound,
        "gap_count": set.gaps.len(),
    });
    let mut artifacts = Artifacts::new("carleson", result);
    artifacts.table("carleson_arcs", &rows);
    Ok(Outcome::ok(artifacts))
}

fn cmd_identities(dims: &str, cases: usize, samples: usize, seed: u64, tol: f64) -> Result<Outcome, CliError> {
    let dims = parse_dims(dims)?;
    let report = identity_battery(cases, dims.clone(), samples, seed, tol)?;
    let passed = report.violations == 0;
    let summary = json!({
        "dims": format!("{}-{}", dims.start(), dims.end()),
        "cases": report.cases,
        "samples_per_case": report.samples_per_case,
        "tol": report.tol,
        "checks_run": report.checks_run,
        "violations": report.violations,
    });
    let mut artifacts = Artifacts::new("identities", serde_json::to_value(&report).expect("serializable"));
    artifacts.table("identities", &[summary]);
    Ok(Outcome { artifacts, passed })
}

#[allow(clippy::too_many_arguments)]
fn cmd_experiment(
    config_path: Option<&PathBuf>,
    variant: Option<&str>,
    delta: Option<f64>,
    n: Option<usize>,
    seed: u64,
    tol_overrides: [Option<f64>; 5],
) -> Result<Outcome, CliError> {
    let mut config = match config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<ExperimentConfig>(&text)
                .map_err(|e| CliError::Input(format!("experiment config: {e}")))?
        }
        None => {
            let variant: Variant = variant
                .ok_or_else(|| CliError::Input("--variant or --config is required".into()))?
                .parse()?;
            let mut cfg = ExperimentConfig::new(
                variant,
                delta.ok_or_else(|| CliError::Input("--delta is required".into()))?,
                n.ok_or_else(|| CliError::Input("--N is required".into()))?,
            );
            cfg.seed = seed;
            cfg
        }
    };
    if config_path.is_some() {
        if let Some(v) = variant {
            config.variant = v.parse()?;
        }
        if let Some(d) = delta {
            config.delta = d;
        }
        if let Some(n) = n {
            config.n = n;
        }
    }
    let t: &mut Tolerances = &mut config.tolerances;
    let [margin, kernel, identities, asymptote, saturation] = tol_overrides;
    t.margin = margin.unwrap_or(t.margin);
    t.kernel = kernel.unwrap_or(t.kernel);
    t.identities = identities.unwrap_or(t.identities);
    t.asymptote = asymptote.unwrap_or(t.asymptote);
    t.saturation_ratio = saturation.unwrap_or(t.saturation_ratio);

    let report = run_experiment(&config)?;
    let passed = report.passed();
    if !passed {
        let block = json!({"verdicts": report.verdicts});
        eprintln!("{}", serde_json::to_string_pretty(&block).expect("serializable"));
    }
    let mut artifacts = Artifacts::new("experiment", serde_json::to_value(&report).expect("serializable")).with_seed(config.seed);
    artifacts.table("margins", &report.margins);
    artifacts.table("codim", &report.codim);
    artifacts.table("trace_sweep", &report.trace_sweep);
    artifacts.table("asymptote", &report.asymptote);
    Ok(Outcome { artifacts, passed })
}

fn configure_threads(spec: &str) -> Result<(), CliError> {
    let threads = match spec.trim() {
        "" | "auto" => 0,
        s => s
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Input(format!("--threads expects a positive integer or auto, got {s:?}")))?,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Moments { measure, n } => cmd_moments(measure, *n, false),
        Command::Gram { measure, n } => cmd_moments(measure, *n, true),
        Command::Minmod { measure, n, lambda } => cmd_minmod(measure, *n, lambda),
        Command::Codim { measure, n, lambda } => cmd_codim(measure, *n, lambda),
        Command::Charfn {
            measure,
            n,
            matrix,
            z,
            lambda,
            mu,
            tol,
        } => cmd_charfn(measure, *n, matrix.as_deref(), z, lambda.as_deref(), mu.as_deref(), *tol),
        Command::TracenormSweep { measure, orders, lambda } => cmd_sweep(measure, orders, lambda),
        Command::Asymptote {
            mode,
            measure,
            f,
            tol,
            space,
            beta,
            gamma,
            terms,
            margin,
        } => cmd_asymptote(*mode, measure, f, *tol, *space, *beta, *gamma, *terms, *margin),
        Command::Carleson { a, eps, levels } => cmd_carleson(*a, *eps, *levels),
        Command::Identities {
            dims,
            cases,
            samples,
            tol,
        } => cmd_identities(dims, *cases, *samples, cli.seed, *tol),
        Command::Experiment {
            config,
            variant,
            delta,
            n,
            margin_tol,
            kernel_tol,
            identity_tol,
            asymptote_tol,
            saturation_ratio,
        } => cmd_experiment(
            config.as_ref(),
            variant.as_deref(),
            *delta,
            *n,
            cli.seed,
            [*margin_tol, *kernel_tol, *identity_tol, *asymptote_tol, *saturation_ratio],
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let run = configure_threads(&cli.threads).and_then(|()| dispatch(&cli)).and_then(|outcome| {
        outcome
            .artifacts
            .emit(cli.output_dir.as_deref(), cli.format, cli.seed)
            .map_err(|e| CliError::Io(e.to_string()))?;
        Ok(outcome.passed)
    });
    match run {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            let block = json!({"error": e.message(), "exit_code": e.exit_code()});
            eprintln!("{}", serde_json::to_string_pretty(&block).expect("serializable"));
            ExitCode::from(e.exit_code())
        }
    }
}
