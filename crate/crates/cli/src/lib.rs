//! Library side of the `eigopt` command: argument handling, problem dispatch
//! and output files. `main.rs` only wires this to the process.

pub mod error;
pub mod mm;
pub mod report;

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, ValueEnum};
use eigopt::apps::instances::{complex_gaussian, gaussian};
use eigopt::apps::{
    dist_defectiveness, dist_instability, dist_uncontrollability, hinf_norm, numerical_radius,
    numerical_radius_function, DefectOptions, DistanceResult, HinfOptions, InstabilityOptions, LTISystem,
    NumradOptions, UncontrolOptions,
};
use eigopt::baselines::piyavskii_shubert;
use eigopt::envelope1d::{optimize_1d, Sample1D};
use eigopt::envelope2d::SampleND;
use eigopt::linalg::{hermitian_part, norm2, CMatrix};
use eigopt::matfunc::{eig_gradient, estimate_gamma, ordered_one_sided_derivatives, spectrum, HermitianMatrixFunction};
use eigopt::mesh::{algorithm2, MeshOptions, DEFAULT_MAX_DEPTH};
use eigopt::{OptResult, SearchBox};
use num_complex::Complex64;

pub use error::CliError;
pub use report::{RunReport, RunStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    /// Numerical radius of A.
    Numrad,
    /// H-infinity norm of the system (A, B, C, D).
    Hinf,
    /// Distance to instability of a stable A.
    Instab,
    /// Distance to uncontrollability of (A, B).
    Uncontrol,
    /// Distance to defectiveness of A.
    Defect,
    /// Largest eigenvalue of a seeded Hermitian matrix function.
    EnvelopeDemo,
    /// Piyavskii-Shubert on the numerical radius.
    PsBaseline,
}

impl Problem {
    pub fn name(&self) -> &'static str {
        match self {
            Problem::Numrad => "numrad",
            Problem::Hinf => "hinf",
            Problem::Instab => "instab",
            Problem::Uncontrol => "uncontrol",
            Problem::Defect => "defect",
            Problem::EnvelopeDemo => "envelope-demo",
            Problem::PsBaseline => "ps-baseline",
        }
    }
}

/// Command-line arguments as parsed by clap.
#[derive(Debug, Clone, Parser)]
#[command(
    name = "eigopt",
    version,
    about = "Global optimization of eigenvalue and singular value functions"
)]
pub struct Args {
    #[arg(long, value_enum)]
    pub problem: Problem,
    /// Matrix Market file for A.
    #[arg(long = "A", value_name = "PATH")]
    pub a: Option<PathBuf>,
    #[arg(long = "B", value_name = "PATH")]
    pub b: Option<PathBuf>,
    #[arg(long = "C", value_name = "PATH")]
    pub c: Option<PathBuf>,
    /// Feedthrough; zero when omitted.
    #[arg(long = "D", value_name = "PATH")]
    pub d: Option<PathBuf>,
    /// `x1lo,x1hi[,x2lo,x2hi]`.
    #[arg(long = "box", value_name = "BOUNDS", allow_hyphen_values = true)]
    pub bounds: Option<String>,
    /// `lo,hi`.
    #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
    pub interval: Option<String>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    /// Models per sub-box for the 2D problems; 0 runs uncapped.
    #[arg(long, default_value_t = 30)]
    pub nq: usize,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
    pub max_depth: usize,
    /// History CSV output.
    #[arg(long, value_name = "PATH")]
    pub history: Option<PathBuf>,
    /// Result file; the report also goes to stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Worker threads for the mesh driver (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Seed for the synthetic instances.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write zero elapsed times so output files are reproducible.
    #[arg(long)]
    pub no_timing: bool,
}

/// Search domain as given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Default,
    Interval(f64, f64),
    Box2([f64; 4]),
}

/// Validated run settings with matrices loaded.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem: Problem,
    pub a: Option<CMatrix>,
    pub b: Option<CMatrix>,
    pub c: Option<CMatrix>,
    pub d: Option<CMatrix>,
    pub domain: Domain,
    pub gamma: Option<f64>,
    pub eps: f64,
    pub n_q: Option<usize>,
    pub max_iter: usize,
    pub max_depth: usize,
    pub history: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub seed: u64,
    pub timing: bool,
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Invalid(format!("{what} `{s}`: {e}")))
        })
        .collect()
}

fn parse_domain(bounds: Option<&str>, interval: Option<&str>) -> Result<Domain, CliError> {
    let ordered = |lo: f64, hi: f64, what: &str| {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(())
        } else {
            Err(CliError::Invalid(format!(
                "{what} needs finite lo < hi, got [{lo}, {hi}]"
            )))
        }
    };
    match (bounds, interval) {
        (Some(_), Some(_)) => Err(CliError::Invalid("give either --box or --interval, not both".into())),
        (None, None) => Ok(Domain::Default),
        (None, Some(s)) => match parse_list(s, "--interval")?[..] {
            [lo, hi] => {
                ordered(lo, hi, "--interval")?;
                Ok(Domain::Interval(lo, hi))
            }
            _ => Err(CliError::Invalid(format!("--interval takes `lo,hi`, got `{s}`"))),
        },
        (Some(s), None) => match parse_list(s, "--box")?[..] {
            [lo, hi] => {
                ordered(lo, hi, "--box")?;
                Ok(Domain::Interval(lo, hi))
            }
            [a, b, c, d] => {
                ordered(a, b, "--box axis 1")?;
                ordered(c, d, "--box axis 2")?;
                Ok(Domain::Box2([a, b, c, d]))
            }
            _ => Err(CliError::Invalid(format!("--box takes 2 or 4 numbers, got `{s}`"))),
        },
    }
}

fn load(path: &Option<PathBuf>) -> Result<Option<CMatrix>, CliError> {
    path.as_deref().map(mm::read_matrix).transpose()
}

impl RunConfig {
    pub fn from_args(args: &Args) -> Result<Self, CliError> {
        if !(args.eps > 0.0 && args.eps.is_finite()) {
            return Err(CliError::Invalid(format!("--eps must be positive, got {}", args.eps)));
        }
        if let Some(g) = args.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(CliError::Invalid(format!("--gamma must be positive, got {g}")));
            }
        }
        if args.threads == Some(0) {
            return Err(CliError::Invalid("--threads must be at least 1".into()));
        }
        if args.nq == 1 {
            return Err(CliError::Invalid("--nq must be 0 (uncapped) or at least 2".into()));
        }
        Ok(Self {
            problem: args.problem,
            a: load(&args.a)?,
            b: load(&args.b)?,
            c: load(&args.c)?,
            d: load(&args.d)?,
            domain: parse_domain(args.bounds.as_deref(), args.interval.as_deref())?,
            gamma: args.gamma,
            eps: args.eps,
            n_q: (args.nq > 0).then_some(args.nq),
            max_iter: args.max_iter,
            max_depth: args.max_depth,
            history: args.history.clone(),
            out: args.out.clone(),
            threads: args.threads,
            seed: args.seed,
            timing: !args.no_timing,
        })
    }

    /// Defaults for every knob; `a` is the only matrix set.
    pub fn new(problem: Problem, a: Option<CMatrix>, eps: f64) -> Self {
        Self {
            problem,
            a,
            b: None,
            c: None,
            d: None,
            domain: Domain::Default,
            gamma: None,
            eps,
            n_q: Some(30),
            max_iter: 10_000,
            max_depth: DEFAULT_MAX_DEPTH,
            history: None,
            out: None,
            threads: None,
            seed: 0,
            timing: true,
        }
    }

    fn need<'a>(&self, m: &'a Option<CMatrix>, flag: &str) -> Result<&'a CMatrix, CliError> {
        m.as_ref()
            .ok_or_else(|| CliError::Invalid(format!("problem {} needs {flag}", self.problem.name())))
    }

    fn interval(&self) -> Result<Option<(f64, f64)>, CliError> {
        match self.domain {
            Domain::Default => Ok(None),
            Domain::Interval(lo, hi) => Ok(Some((lo, hi))),
            Domain::Box2(_) => Err(CliError::Invalid(format!(
                "problem {} is one-dimensional; use --interval lo,hi",
                self.problem.name()
            ))),
        }
    }

    fn search_box(&self) -> Result<Option<SearchBox>, CliError> {
        match self.domain {
            Domain::Default => Ok(None),
            Domain::Box2([a, b, c, d]) => Ok(Some(SearchBox::new(vec![a, c], vec![b, d])?)),
            Domain::Interval(..) => Err(CliError::Invalid(format!(
                "problem {} is two-dimensional; use --box x1lo,x1hi,x2lo,x2hi",
                self.problem.name()
            ))),
        }
    }
}

fn from_distance(problem: Problem, eps: f64, r: DistanceResult) -> RunReport {
    RunReport {
        problem: problem.name().into(),
        status: r.status.into(),
        value: r.value,
        argmin: r.argmin,
        lower: r.lower,
        upper: r.upper,
        eps,
        gamma: r.gamma,
        gamma_violated: r.gamma_violated,
        inner: r.inner,
        evaluations: r.evaluations,
        vertex_computations: r.vertex_computations,
        wall_time: 0.0,
        history: r.history,
    }
}

fn from_opt(problem: Problem, eps: f64, gamma: f64, r: OptResult) -> RunReport {
    RunReport {
        problem: problem.name().into(),
        status: r.status.into(),
        value: r.fbest,
        argmin: r.xbest,
        lower: r.lower,
        upper: r.upper,
        eps,
        gamma,
        gamma_violated: r.gamma_violated,
        inner: None,
        evaluations: r.evaluations,
        vertex_computations: r.vertex_computations,
        wall_time: 0.0,
        history: r.history,
    }
}

/// `A(w) = H0 + sin(w1) H1 [+ cos(w2) H2]` with seeded real symmetric `Hk`.
pub fn demo_function(seed: u64, dim: usize) -> HermitianMatrixFunction {
    let n = 6;
    let h: Vec<CMatrix> = (0..3).map(|k| hermitian_part(&gaussian(n, n, seed * 3 + k))).collect();
    let h2 = h.clone();
    HermitianMatrixFunction::new(
        dim,
        n,
        move |w| {
            let mut m = &h[0] + &h[1] * Complex64::new(w[0].sin(), 0.0);
            if w.len() > 1 {
                m += &h[2] * Complex64::new(w[1].cos(), 0.0);
            }
            m
        },
        move |w, k| match k {
            0 => &h2[1] * Complex64::new(w[0].cos(), 0.0),
            _ => &h2[2] * Complex64::new(-w[1].sin(), 0.0),
        },
    )
}

fn envelope_demo(cfg: &RunConfig) -> Result<RunReport, CliError> {
    let bx = match cfg.domain {
        Domain::Default => SearchBox::interval(0.0, TAU)?,
        Domain::Interval(lo, hi) => SearchBox::interval(lo, hi)?,
        Domain::Box2([a, b, c, d]) => SearchBox::new(vec![a, c], vec![b, d])?,
    };
    let f = demo_function(cfg.seed, bx.dim());
    let gamma = match cfg.gamma {
        Some(g) => g,
        None => estimate_gamma(&f, &bx, 1, 20, 50, 2.0)?,
    };
    let r = if bx.dim() == 1 {
        let sample = |x: f64| {
            let spec = spectrum(&f, &[x])?;
            let (l, r) = ordered_one_sided_derivatives(&spec, &f.partial(&[x], 0), 1)?;
            Ok(Sample1D {
                value: spec.values[0],
                slope_left: l,
                slope_right: r,
            })
        };
        optimize_1d(sample, bx.lo()[0], bx.hi()[0], gamma, cfg.eps, cfg.max_iter)?
    } else {
        let sample = |x: &[f64]| {
            let ep = spectrum(&f, x)?.point(1)?;
            Ok(SampleND {
                value: ep.value,
                gradient: eig_gradient(&f, &ep)?,
            })
        };
        let mut opts = MeshOptions::new(gamma, cfg.eps, cfg.n_q);
        opts.max_depth = cfg.max_depth;
        opts.max_iter = cfg.max_iter;
        algorithm2(sample, &bx, &opts)?
    };
    Ok(from_opt(cfg.problem, cfg.eps, gamma, r))
}

fn ps_baseline(cfg: &RunConfig) -> Result<RunReport, CliError> {
    let a = match &cfg.a {
        Some(a) => a.clone(),
        None => complex_gaussian(20, 20, cfg.seed),
    };
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(CliError::Invalid(format!(
            "A must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let (lo, hi) = cfg.interval()?.unwrap_or((0.0, TAU));
    let lipschitz = cfg.gamma.unwrap_or_else(|| norm2(&a).max(1e-12));
    let f = numerical_radius_function(&a);
    let neg = |t: f64| Ok(-spectrum(&f, &[t])?.values[0]);
    let r = piyavskii_shubert(neg, lo, hi, lipschitz, cfg.eps, cfg.max_iter)?.negated();
    Ok(from_opt(cfg.problem, cfg.eps, lipschitz, r))
}

/// Runs the configured problem. Nothing is written to disk.
pub fn run(cfg: &RunConfig) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let p = cfg.problem;
    let mut report = match p {
        Problem::Numrad => {
            cfg.interval()?.map_or(Ok(()), |_| {
                Err(CliError::Invalid(
                    "numrad always searches [0, 2 pi]; drop --interval".into(),
                ))
            })?;
            let mut o = NumradOptions::new(cfg.eps);
            o.gamma = cfg.gamma;
            o.max_iter = cfg.max_iter;
            from_distance(p, cfg.eps, numerical_radius(cfg.need(&cfg.a, "--A")?, &o)?)
        }
        Problem::Hinf => {
            let a = cfg.need(&cfg.a, "--A")?.clone();
            let b = cfg.need(&cfg.b, "--B")?.clone();
            let c = cfg.need(&cfg.c, "--C")?.clone();
            let d = cfg.d.clone().unwrap_or_else(|| CMatrix::zeros(c.nrows(), b.ncols()));
            let sys = LTISystem::new(a, b, c, d)?;
            let mut o = HinfOptions::new(cfg.eps);
            o.gamma = cfg.gamma;
            o.interval = cfg.interval()?;
            o.max_iter = cfg.max_iter;
            from_distance(p, cfg.eps, hinf_norm(&sys, &o)?)
        }
        Problem::Instab => {
            let mut o = InstabilityOptions::new(cfg.eps);
            o.gamma = cfg.gamma;
            o.interval = cfg.interval()?;
            o.max_iter = cfg.max_iter;
            from_distance(p, cfg.eps, dist_instability(cfg.need(&cfg.a, "--A")?, &o)?)
        }
        Problem::Uncontrol => {
            let mut o = UncontrolOptions::new(cfg.eps);
            if let Some(g) = cfg.gamma {
                o.gamma = g;
            }
            o.bounds = cfg.search_box()?;
            o.n_q = cfg.n_q;
            o.max_depth = cfg.max_depth;
            o.max_iter = cfg.max_iter;
            let (a, b) = (cfg.need(&cfg.a, "--A")?, cfg.need(&cfg.b, "--B")?);
            from_distance(p, cfg.eps, dist_uncontrollability(a, b, &o)?)
        }
        Problem::Defect => {
            let gamma = cfg
                .gamma
                .ok_or_else(|| CliError::Invalid("problem defect needs an explicit --gamma".into()))?;
            let mut o = DefectOptions::new(cfg.eps);
            o.gamma = gamma;
            o.bounds = cfg.search_box()?;
            o.n_q = cfg.n_q;
            o.max_depth = cfg.max_depth;
            o.max_iter = cfg.max_iter;
            from_distance(p, cfg.eps, dist_defectiveness(cfg.need(&cfg.a, "--A")?, &o)?)
        }
        Problem::EnvelopeDemo => envelope_demo(cfg)?,
        Problem::PsBaseline => ps_baseline(cfg)?,
    };
    report.wall_time = if cfg.timing { start.elapsed().as_secs_f64() } else { 0.0 };
    Ok(report)
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes the result file and history table requested by `cfg`.
pub fn write_outputs(cfg: &RunConfig, report: &RunReport) -> Result<(), CliError> {
    if let Some(p) = &cfg.out {
        write(p, &report.to_text())?;
    }
    if let Some(p) = &cfg.history {
        let dim = report.history.first().map_or(report.argmin.len(), |r| r.x.len());
        write(p, &report::format_history(&report.history, dim, cfg.timing))?;
    }
    Ok(())
}

/// Full command: configure threads, run, print and write outputs. Returns
/// the process exit code.
pub fn execute(args: &Args) -> i32 {
    let cfg = match RunConfig::from_args(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    if let Some(n) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not configure {n} threads: {e}");
        }
    }
    match run(&cfg) {
        Ok(report) => {
            print!("{}", report.to_text());
            if let Err(e) = write_outputs(&cfg, &report) {
                eprintln!("error: {e}");
                return e.exit_code();
            }
            if report.gamma_violated {
                log::warn!("the curvature bound was violated; bounds are not certified");
            }
            report.status.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.exit_code();
            if code == 1 {
                if let Some(p) = &cfg.out {
                    let text = format!("# {e}\n{}", RunReport::failed(cfg.problem.name(), cfg.eps).to_text());
                    let _ = write(p, &text);
                }
            }
            code
        }
    }
}
