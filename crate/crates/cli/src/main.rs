use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use rigidkit::apflex::ap_rigidity_decision;
use rigidkit::framework::document::parse_framework;
use rigidkit::framework::{validate_framework, CrystalFramework, IntegerSublattice};
use rigidkit::gallery::{fixture_document, list_fixtures, resolve_source};
use rigidkit::phase::Phase;
use rigidkit::rum::{
    crystal_polynomial, has_local_flex, in_spectrum, nontrivial_supercell_flexes, sample_spectrum,
    spectrum_csv, spectrum_summary, spectrum_svg, supercell_flex_search, verify_factorization,
    SpectrumOptions,
};
use rigidkit::symbol::{build_symbol, null_space_at_phase, rank_at_phase, real_representative};
use rigidkit::Error;

const EXIT_INPUT: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_VERIFICATION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "rigidkit",
    version,
    about = "Rigidity analysis for crystallographic bar-joint frameworks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print counts, Maxwell status and bar lengths.
    Info {
        /// Framework file or `gallery:<name>`.
        source: String,
    },
    /// Sample the RUM spectrum on a grid.
    Spectrum {
        source: String,
        /// Points per axis (default depends on the dimension).
        #[arg(long)]
        grid: Option<usize>,
        /// Relative singular value threshold.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Output file; data goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Skip the curve-point search between grid points.
        #[arg(long)]
        no_refine: bool,
    },
    /// Phase null spaces, crystal polynomial, rigidity, supercell flexes or factor checks.
    #[command(group(ArgGroup::new("mode").required(true).args(["phase", "polynomial", "rigidity", "supercell", "check_factors"])))]
    Analyze {
        source: String,
        /// Phase `t` as comma-separated coordinates, e.g. `1/2,0`; repeatable.
        #[arg(long)]
        phase: Vec<String>,
        #[arg(long)]
        polynomial: bool,
        #[arg(long)]
        rigidity: bool,
        /// Sublattice matrix rows separated by `;`, e.g. `2,0;0,1`.
        #[arg(long)]
        supercell: Option<String>,
        /// File listing claimed factors, one per line.
        #[arg(long)]
        check_factors: Option<PathBuf>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Built-in example frameworks.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
}

#[derive(Subcommand)]
enum GalleryAction {
    List,
    /// Print a fixture as a framework document.
    Export {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Svg,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotMaxwell { .. }
            | Error::DimensionMismatch { .. }
            | Error::Invalid(_)
            | Error::MatrixTooLarge(_)
            | Error::StageTooLarge { .. } => EXIT_PRECONDITION,
            _ => EXIT_INPUT,
        };
        Failure::new(code, e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn load(source: &str) -> Result<CrystalFramework, Failure> {
    if let Some(f) = resolve_source(source) {
        return Ok(f?.framework);
    }
    let text = fs::read_to_string(source)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {}", source, e)))?;
    Ok(parse_framework(&text)?)
}

fn write_file(path: &PathBuf, data: &str) -> Result<(), Failure> {
    fs::write(path, data)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {}", path.display(), e)))
}

fn info(source: &str) -> Outcome {
    let c = load(source)?;
    Ok(validate_framework(&c).to_string())
}

fn spectrum(
    source: &str,
    grid: Option<usize>,
    tol: f64,
    out: Option<&PathBuf>,
    format: Format,
    refine: bool,
) -> Outcome {
    let c = load(source)?;
    if matches!(format, Format::Svg) && c.dim() != 2 {
        return Err(Failure::new(
            EXIT_PRECONDITION,
            format!(
                "SVG output needs a two-dimensional framework, got dimension {}",
                c.dim()
            ),
        ));
    }
    let mut opts = SpectrumOptions::for_dimension(c.dim());
    if let Some(n) = grid {
        opts.resolution = n;
    }
    opts.tolerance = tol;
    opts.refine = refine;
    opts.estimate_dimension = true;
    let report = sample_spectrum(&c, &opts);
    let data = match format {
        Format::Csv => spectrum_csv(&report),
        Format::Svg => spectrum_svg(&report)?,
    };
    let summary = spectrum_summary(&report);
    match out {
        Some(path) => {
            write_file(path, &data)?;
            Ok(format!("wrote {}\n{}", path.display(), summary))
        }
        None => {
            eprint!("{}", summary);
            Ok(data)
        }
    }
}

fn analyze_phases(c: &CrystalFramework, phases: &[String], tol: f64) -> Outcome {
    let s = build_symbol(c);
    let mut out = String::new();
    writeln!(
        out,
        "rank tolerance: {:e} (relative to the largest singular value)",
        tol
    )
    .unwrap();
    for text in phases {
        let t = Phase::parse_list(text)?;
        if t.dim() != c.dim() {
            return Err(Error::DimensionMismatch {
                expected: c.dim(),
                found: t.dim(),
            }
            .into());
        }
        let rank = rank_at_phase(&s, &t, tol);
        let (hit, deficiency) = in_spectrum(c, &t, tol);
        writeln!(out, "phase t = {}", t).unwrap();
        writeln!(out, "  rank Phi(conj omega): {} of {}", rank, c.dof()).unwrap();
        writeln!(
            out,
            "  in RUM spectrum: {} (deficiency {})",
            if hit { "yes" } else { "no" },
            deficiency
        )
        .unwrap();
        for (i, b) in null_space_at_phase(&s, &t, tol).iter().enumerate() {
            let b = real_representative(b);
            let parts: Vec<String> = b
                .iter()
                .map(|x| {
                    if x.im == 0.0 {
                        format!("{:.6}", x.re)
                    } else {
                        format!("{:.6}{:+.6}i", x.re, x.im)
                    }
                })
                .collect();
            writeln!(out, "  flex {}: [{}]", i + 1, parts.join(", ")).unwrap();
        }
    }
    Ok(out)
}

fn analyze_polynomial(c: &CrystalFramework) -> Outcome {
    let p = crystal_polynomial(c)?;
    let mut out = String::new();
    writeln!(out, "mode: {}", c.mode()).unwrap();
    writeln!(out, "crystal polynomial (up to unit): {}", p.factored()).unwrap();
    writeln!(out, "expanded: {}", p.expanded()).unwrap();
    writeln!(
        out,
        "local flex: {}",
        if has_local_flex(c)? { "yes" } else { "no" }
    )
    .unwrap();
    Ok(out)
}

fn analyze_rigidity(c: &CrystalFramework, grid: Option<usize>, tol: f64) -> Outcome {
    let mut opts = SpectrumOptions::for_dimension(c.dim());
    if let Some(n) = grid {
        opts.resolution = n;
    }
    opts.tolerance = tol;
    opts.estimate_dimension = false;
    Ok(ap_rigidity_decision(c, &opts).to_string())
}

fn analyze_supercell(c: &CrystalFramework, matrix: &str, tol: f64) -> Outcome {
    let s = IntegerSublattice::parse(matrix)?;
    if s.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: s.dim(),
        }
        .into());
    }
    let found = supercell_flex_search(c, &s, tol)?;
    let mut out = String::new();
    writeln!(out, "sublattice index: {}", s.index()).unwrap();
    writeln!(out, "phases with flexes: {}", found.len()).unwrap();
    for f in &found {
        writeln!(
            out,
            "  t = {}: {} flex(es){}",
            f.phase,
            f.basis.len(),
            if f.translation_only {
                ", translations only"
            } else {
                ""
            }
        )
        .unwrap();
    }
    let nontrivial = nontrivial_supercell_flexes(&found).count();
    writeln!(
        out,
        "nontrivial supercell-periodic flexes: {}",
        if nontrivial > 0 { "yes" } else { "no" }
    )
    .unwrap();
    Ok(out)
}

fn analyze_factors(c: &CrystalFramework, path: &PathBuf) -> Outcome {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {}", path.display(), e)))?;
    let factors: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect();
    let check = verify_factorization(c, &factors)?;
    let out = format!(
        "factors: {}\nmode: {}\nmax deviation: {:e} (scale {:e})\nfactorization: {}\n",
        factors.len(),
        check.mode,
        check.max_deviation,
        check.scale,
        if check.matches {
            "matches"
        } else {
            "does not match"
        }
    );
    if check.matches {
        Ok(out)
    } else {
        Err(Failure::new(EXIT_VERIFICATION, out.trim_end()))
    }
}

fn gallery(action: &GalleryAction) -> Outcome {
    match action {
        GalleryAction::List => Ok(list_fixtures().iter().map(|n| format!("{}\n", n)).collect()),
        GalleryAction::Export { name, out } => {
            let doc = fixture_document(name)?;
            match out {
                Some(path) => {
                    write_file(path, &doc)?;
                    Ok(format!("wrote {}\n", path.display()))
                }
                None => Ok(format!("{}\n", doc.trim_end())),
            }
        }
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Info { source } => info(&source),
        Command::Spectrum {
            source,
            grid,
            tol,
            out,
            format,
            no_refine,
        } => spectrum(&source, grid, tol, out.as_ref(), format, !no_refine),
        Command::Analyze {
            source,
            phase,
            polynomial,
            rigidity,
            supercell,
            check_factors,
            grid,
            tol,
        } => {
            let c = load(&source)?;
            if !phase.is_empty() {
                analyze_phases(&c, &phase, tol)
            } else if polynomial {
                analyze_polynomial(&c)
            } else if rigidity {
                analyze_rigidity(&c, grid, tol)
            } else if let Some(m) = supercell {
                analyze_supercell(&c, &m, tol)
            } else if let Some(path) = check_factors {
                analyze_factors(&c, &path)
            } else {
                unreachable!("clap requires one mode")
            }
        }
        Command::Gallery { action } => gallery(&action),
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("RIGIDKIT_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    configure_threads();
    match run(cli) {
        Ok(text) => {
            print!("{}", text);
            ExitCode::SUCCESS
        }
        Err(f) if f.code == EXIT_VERIFICATION => {
            println!("{}", f.message);
            ExitCode::from(f.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
