//! Command implementations behind the `gptsep` binary.
//!
//! Exit codes: 0 no entanglement detected, 1 input error, 2 numerical
//! failure, 3 entanglement certified.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::criteria::{
    evaluate_subset, gpt_scan, ppt_criterion, realignment_criterion, CriterionReport, ScanOptions, SubsetResult,
    Verdict,
};
use crate::density::{DensityMatrix, Tolerances};
use crate::error::Error;
use crate::matrix::ComplexMatrix;
use crate::reshape::{LabelSet, DEFAULT_SCAN_LIMIT};
use crate::states::{ParamFamily, StateSpec};

pub const EXIT_UNDETECTED: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_ENTANGLED: i32 = 3;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const SPEC_HELP: &str = "\
STATE SPECS:
  Wherever an input is expected, either a path to a matrix file or a state
  spec of the form family:param1[,param2...] is accepted:
    bell:psi-|psi+|phi-|phi+     ghz:N      w:N
    werner:P                     isotropic:D,F
    horodecki3x3:A               horodecki2x4:B
    maxmixed:2x3                 product:2x3[,SEED]
    separable:2x3,TERMS[,SEED]   random:2x3,RANK[,SEED]
  Seeds default to --seed. scan-family takes a spec with its real parameter
  left out: werner, isotropic:D, horodecki3x3, horodecki2x4.

MATRIX FILES:
  JSON: {\"dims\": [2, 2], \"matrix\": [[[re, im], ...], ...], \"name\": ..., \"description\": ...}

EXIT CODES:
  0 no violation found, 1 input error, 2 numerical failure, 3 entanglement certified";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "gptsep", version, about = "Separability criteria from generalized partial transpositions", after_help = SPEC_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Rescale inputs whose trace is within 1e-3 of 1.
    #[arg(long, global = true)]
    pub normalize: bool,

    /// List all 2^(2n) label subsets instead of one per complement pair.
    #[arg(long, global = true)]
    pub no_dedupe: bool,

    /// Slack on (norm - 1) before a subset counts as a violation.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_norm: f64,

    /// Largest subsystem count accepted for the exhaustive scan.
    #[arg(long, global = true, default_value_t = DEFAULT_SCAN_LIMIT)]
    pub max_n: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,

    /// Seed for random state specs that do not carry their own.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Reject inputs with an eigenvalue below -1e-9.
    #[arg(long, global = true)]
    pub check_psd: bool,

    /// Worker threads for the subset scan (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run PPT, realignment and the full label-subset scan on a state.
    Analyze { input: String },
    /// Trace norm of a single reshaped matrix, e.g. `norms bell:psi- cA,rB`.
    Norms { input: String, labels: String },
    /// Locate the detection threshold of a one-parameter family.
    ScanFamily {
        family: String,
        #[arg(long, default_value_t = 0.0)]
        min: f64,
        #[arg(long, default_value_t = 1.0)]
        max: f64,
        /// Number of grid points before bisection.
        #[arg(long, default_value_t = 41)]
        grid: usize,
        /// Absolute tolerance on the reported threshold.
        #[arg(long, default_value_t = 1e-6)]
        param_tol: f64,
    },
    /// Write a state spec to a matrix file.
    Generate { spec: String, output: PathBuf },
}

/// Failure of a command, classified by exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

/// On-disk density matrix: entries are `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dims: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

impl MatrixFile {
    pub fn from_density(rho: &DensityMatrix, name: Option<String>, description: Option<String>) -> Self {
        let m = rho.matrix();
        let matrix = (0..m.rows()).map(|i| (0..m.cols()).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect()).collect();
        Self { dims: rho.dims().to_vec(), matrix, name, description }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let file: MatrixFile = serde_json::from_str(text)
            .map_err(|e| CliError::Input(format!("matrix file line {} column {}: {e}", e.line(), e.column())))?;
        let side = file
            .dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| CliError::Input("field 'dims': product overflows".into()))?;
        if file.dims.is_empty() || file.dims.contains(&0) {
            return Err(CliError::Input(format!(
                "field 'dims': expected positive subsystem dimensions, got {:?}",
                file.dims
            )));
        }
        if file.matrix.len() != side {
            return Err(CliError::Input(format!(
                "field 'matrix': {} rows, expected {side} (product of dims {:?})",
                file.matrix.len(),
                file.dims
            )));
        }
        if let Some((i, row)) = file.matrix.iter().enumerate().find(|(_, r)| r.len() != side) {
            return Err(CliError::Input(format!("field 'matrix': row {i} has {} entries, expected {side}", row.len())));
        }
        Ok(file)
    }

    pub fn to_density(&self, normalize: bool, tol: &Tolerances) -> Result<DensityMatrix, CliError> {
        let side = self.matrix.len();
        let data = self.matrix.iter().flatten().map(|&[re, im]| Complex64::new(re, im)).collect();
        let mat = ComplexMatrix::new(side, side, data)?;
        let rho = if normalize {
            DensityMatrix::normalized(mat, self.dims.clone(), tol)?
        } else {
            DensityMatrix::with_tolerances(mat, self.dims.clone(), tol)?
        };
        Ok(rho)
    }

    /// JSON with one matrix row per line.
    pub fn to_json(&self) -> String {
        fn enc<T: Serialize + ?Sized>(v: &T) -> String {
            serde_json::to_string(v).expect("matrix files always serialize")
        }
        let mut s = String::from("{\n");
        if let Some(n) = &self.name {
            let _ = writeln!(s, "  \"name\": {},", enc(n));
        }
        if let Some(d) = &self.description {
            let _ = writeln!(s, "  \"description\": {},", enc(d));
        }
        let _ = writeln!(s, "  \"dims\": {},", enc(&self.dims));
        s.push_str("  \"matrix\": [\n");
        for (i, row) in self.matrix.iter().enumerate() {
            let sep = if i + 1 == self.matrix.len() { "" } else { "," };
            let _ = writeln!(s, "    {}{sep}", enc(row));
        }
        s.push_str("  ]\n}\n");
        s
    }
}

/// Settings shared by the analysis commands.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalyzeOptions {
    pub normalize: bool,
    pub check_psd: bool,
    pub seed: u64,
    pub scan: ScanOptions,
}

impl AnalyzeOptions {
    pub fn from_cli(cli: &Cli) -> Self {
        let tol = Tolerances { norm: cli.tol_norm, ..Tolerances::default() };
        Self {
            normalize: cli.normalize,
            check_psd: cli.check_psd,
            seed: cli.seed,
            scan: ScanOptions { dedupe: !cli.no_dedupe, parallel: true, max_n: cli.max_n, tol },
        }
    }
}

/// Resolves an input argument: an existing file is read as a matrix file,
/// anything else is parsed as a state spec.
pub fn load_input(input: &str, opts: &AnalyzeOptions) -> Result<DensityMatrix, CliError> {
    let tol = &opts.scan.tol;
    let path = Path::new(input);
    let rho = if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        MatrixFile::parse(&text)
            .map_err(|e| match e {
                CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
                other => other,
            })?
            .to_density(opts.normalize, tol)?
    } else {
        let spec = StateSpec::parse_with_seed(input, opts.seed).map_err(|e| {
            if input.ends_with(".json") || input.contains('/') {
                CliError::Input(format!("no such file '{input}'"))
            } else {
                CliError::Input(format!("'{input}' is neither a file nor a valid state spec: {e}"))
            }
        })?;
        spec.generate()?
    };
    if opts.check_psd {
        rho.validate_psd(tol)?;
    }
    Ok(rho)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputSummary {
    pub dims: Vec<usize>,
    pub side: usize,
    pub trace: [f64; 2],
    pub hermiticity_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_eigenvalue: Option<f64>,
}

/// Full analysis output; byte-identical for identical inputs and flags.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub input: InputSummary,
    pub tolerances: Tolerances,
    pub ppt: Vec<SubsetResult>,
    pub realignment: Vec<SubsetResult>,
    pub gpt_scan: CriterionReport,
    pub verdict: Verdict,
    pub measure_e: f64,
    pub negativity: Vec<f64>,
}

impl ReportDocument {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::EntangledCertified => EXIT_ENTANGLED,
            Verdict::Undetected => EXIT_UNDETECTED,
        }
    }
}

pub fn analyze(rho: &DensityMatrix, opts: &AnalyzeOptions) -> Result<ReportDocument, CliError> {
    let tol = opts.scan.tol;
    let ppt = ppt_criterion(rho, &tol)?;
    let realignment = if rho.num_subsystems() >= 2 { realignment_criterion(rho, None, &tol)? } else { Vec::new() };
    let scan = gpt_scan(rho, &opts.scan)?;
    let any = ppt.iter().chain(&realignment).any(|r| r.violating);
    let verdict = if any || scan.verdict == Verdict::EntangledCertified {
        Verdict::EntangledCertified
    } else {
        Verdict::Undetected
    };
    let tr = rho.matrix().trace();
    Ok(ReportDocument {
        tool: "gptsep".into(),
        version: VERSION.into(),
        input: InputSummary {
            dims: rho.dims().to_vec(),
            side: rho.side(),
            trace: [tr.re, tr.im],
            hermiticity_residual: rho.matrix().hermiticity_residual(),
            min_eigenvalue: if opts.check_psd { Some(rho.min_eigenvalue()?) } else { None },
        },
        tolerances: tol,
        ppt,
        realignment,
        measure_e: scan.measure_e,
        negativity: scan.negativity.clone(),
        gpt_scan: scan,
        verdict,
    })
}

fn subsystem_letter(k: usize) -> char {
    (b'A' + k as u8) as char
}

fn status(violating: bool) -> &'static str {
    if violating {
        "VIOLATED"
    } else {
        "ok"
    }
}

fn dims_text(dims: &[usize]) -> String {
    dims.iter().map(ToString::to_string).collect::<Vec<_>>().join("x")
}

pub fn render_report(doc: &ReportDocument, format: Format) -> String {
    if format == Format::Json {
        return serde_json::to_string_pretty(doc).expect("reports always serialize") + "\n";
    }
    let mut s = String::new();
    let t = &doc.tolerances;
    let _ = writeln!(s, "{} {}", doc.tool, doc.version);
    let _ = writeln!(
        s,
        "input: dims {}, trace {:.12}{:+.3e}i, hermiticity residual {:.3e}",
        dims_text(&doc.input.dims),
        doc.input.trace[0],
        doc.input.trace[1],
        doc.input.hermiticity_residual
    );
    if let Some(min) = doc.input.min_eigenvalue {
        let _ = writeln!(s, "input minimum eigenvalue: {min:.6e}");
    }
    let _ =
        writeln!(s, "tolerances: norm {:e}, psd {:e}, hermiticity {:e}, trace {:e}", t.norm, t.psd, t.herm, t.trace);

    let _ = writeln!(s, "\npartial transposition:");
    if doc.ppt.is_empty() {
        let _ = writeln!(s, "  (single subsystem, nothing to test)");
    }
    for r in &doc.ppt {
        let _ = writeln!(
            s,
            "  {:<24} min eig {:>+.12e}  norm {:.12}  {}",
            r.labels.to_string(),
            r.min_eigenvalue.unwrap_or(f64::NAN),
            r.trace_norm,
            status(r.violating)
        );
    }

    let _ = writeln!(s, "\nrealignment:");
    if doc.realignment.is_empty() {
        let _ = writeln!(s, "  (single subsystem, nothing to test)");
    }
    for r in &doc.realignment {
        let cut = r.cut.as_ref().map(ToString::to_string).unwrap_or_default();
        let _ =
            writeln!(s, "  {:<8} {:>4}x{:<4} norm {:.12}  {}", cut, r.rows, r.cols, r.trace_norm, status(r.violating));
    }

    let scan = &doc.gpt_scan;
    let _ = writeln!(
        s,
        "\ngeneralized partial transposition scan ({} subsets{}):",
        scan.results.len(),
        if scan.dedupe { ", one per complement pair" } else { "" }
    );
    for r in &scan.results {
        let partner = r.complement.map(|c| format!("~ {c}")).unwrap_or_default();
        let _ = writeln!(
            s,
            "  {:<24} {:<26} {:>4}x{:<4} norm {:.12}  {}{}",
            r.labels.to_string(),
            partner,
            r.rows,
            r.cols,
            r.trace_norm,
            status(r.violating),
            if r.vacuous { " (vacuous)" } else { "" }
        );
    }
    let _ = writeln!(s, "  max norm {:.12} at {}", scan.max_norm, scan.argmax_labels);

    let neg: Vec<String> =
        doc.negativity.iter().enumerate().map(|(k, v)| format!("{} {:.12}", subsystem_letter(k), v)).collect();
    let _ = writeln!(s, "\nnegativity: {}", neg.join(", "));
    let _ = writeln!(s, "E(rho): {:.12}", doc.measure_e);
    let _ = writeln!(s, "verdict: {}", doc.verdict);
    s
}

pub fn cmd_analyze(input: &str, opts: &AnalyzeOptions, format: Format) -> Result<(String, i32), CliError> {
    let rho = load_input(input, opts)?;
    let doc = analyze(&rho, opts)?;
    Ok((render_report(&doc, format), doc.exit_code()))
}

pub fn cmd_norms(
    input: &str,
    labels: &str,
    opts: &AnalyzeOptions,
    format: Format,
) -> Result<(String, SubsetResult), CliError> {
    let rho = load_input(input, opts)?;
    let y = LabelSet::parse(rho.num_subsystems(), labels)?;
    let r = evaluate_subset(&rho, &y, &opts.scan.tol)?;
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&r).expect("results always serialize") + "\n",
        Format::Human => {
            let mut s = format!(
                "labels {}  shape {}x{}  trace norm {:.12}  {}\n",
                r.labels,
                r.rows,
                r.cols,
                r.trace_norm,
                status(r.violating)
            );
            if let Some(min) = r.min_eigenvalue {
                let _ = writeln!(s, "minimum eigenvalue {min:+.12e}");
            }
            s
        }
    };
    Ok((text, r))
}

/// Result of a one-parameter detection sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub family: String,
    pub parameter: String,
    pub range: [f64; 2],
    pub grid_points: usize,
    pub param_tol: f64,
    /// `(parameter, max norm)` on the grid.
    pub grid: Vec<[f64; 2]>,
    pub threshold: Option<f64>,
    /// Final bisection interval: undetected at the low end, detected at the high end.
    pub bracket: Option<[f64; 2]>,
    /// Violating label sets at the detected end of the bracket.
    pub first_violations: Vec<LabelSet>,
    pub argmax_labels: Option<LabelSet>,
    pub message: String,
}

pub fn scan_family(
    family: &ParamFamily,
    min: f64,
    max: f64,
    grid_points: usize,
    param_tol: f64,
    opts: &ScanOptions,
) -> Result<ThresholdReport, CliError> {
    if !min.is_finite()
        || !max.is_finite()
        || min >= max
        || grid_points < 2
        || !param_tol.is_finite()
        || param_tol <= 0.0
    {
        return Err(CliError::Input(format!(
            "need min < max, at least 2 grid points and a positive tolerance (got [{min}, {max}], {grid_points}, {param_tol})"
        )));
    }
    let eval = |x: f64| -> Result<CriterionReport, CliError> {
        let rho = family.at(x).generate()?;
        Ok(gpt_scan(&rho, opts)?)
    };
    let xs: Vec<f64> = (0..grid_points)
        .map(|i| if i + 1 == grid_points { max } else { min + (max - min) * i as f64 / (grid_points - 1) as f64 })
        .collect();
    let mut grid = Vec::with_capacity(xs.len());
    let mut detected = Vec::with_capacity(xs.len());
    for &x in &xs {
        let rep = eval(x)?;
        grid.push([x, rep.max_norm]);
        detected.push(rep.verdict == Verdict::EntangledCertified);
    }

    let base = ThresholdReport {
        family: family.to_string(),
        parameter: family.parameter_name().to_string(),
        range: [min, max],
        grid_points,
        param_tol,
        grid,
        threshold: None,
        bracket: None,
        first_violations: Vec::new(),
        argmax_labels: None,
        message: String::new(),
    };

    if detected[0] {
        let rep = eval(xs[0])?;
        return Ok(ThresholdReport {
            threshold: Some(xs[0]),
            first_violations: rep.violations,
            argmax_labels: Some(rep.argmax_labels),
            message: "detected at the start of the range".into(),
            ..base
        });
    }
    let Some(i) = detected.iter().position(|&d| d) else {
        return Ok(ThresholdReport { message: "no threshold in range".into(), ..base });
    };

    let (mut lo, mut hi) = (xs[i - 1], xs[i]);
    let mut hi_report = eval(hi)?;
    while hi - lo > param_tol {
        let mid = 0.5 * (lo + hi);
        let rep = eval(mid)?;
        if rep.verdict == Verdict::EntangledCertified {
            hi = mid;
            hi_report = rep;
        } else {
            lo = mid;
        }
    }
    Ok(ThresholdReport {
        threshold: Some(0.5 * (lo + hi)),
        bracket: Some([lo, hi]),
        first_violations: hi_report.violations,
        argmax_labels: Some(hi_report.argmax_labels),
        message: "threshold found".into(),
        ..base
    })
}

pub fn render_threshold(rep: &ThresholdReport, format: Format) -> String {
    if format == Format::Json {
        return serde_json::to_string_pretty(rep).expect("reports always serialize") + "\n";
    }
    let mut s = String::new();
    let _ = writeln!(
        s,
        "family {} over {} in [{}, {}], {} grid points",
        rep.family, rep.parameter, rep.range[0], rep.range[1], rep.grid_points
    );
    for [x, norm] in &rep.grid {
        let _ = writeln!(s, "  {} = {:<12.6} max norm {:.12}", rep.parameter, x, norm);
    }
    match rep.threshold {
        None => {
            let _ = writeln!(s, "no threshold in range");
        }
        Some(t) => {
            let _ = writeln!(s, "threshold {} = {:.9} ({})", rep.parameter, t, rep.message);
            if let Some([lo, hi]) = rep.bracket {
                let _ = writeln!(s, "bracket [{lo:.9}, {hi:.9}]");
            }
            let v: Vec<String> = rep.first_violations.iter().map(ToString::to_string).collect();
            let _ = writeln!(s, "first violating label sets: {}", v.join(" "));
            if let Some(a) = rep.argmax_labels {
                let _ = writeln!(s, "largest norm at {a}");
            }
        }
    }
    s
}

pub fn cmd_generate(spec: &str, output: &Path, seed: u64) -> Result<MatrixFile, CliError> {
    let spec = StateSpec::parse_with_seed(spec, seed)?;
    let rho = spec.generate()?;
    let file = MatrixFile::from_density(&rho, Some(spec.to_string()), None);
    std::fs::write(output, file.to_json())
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", output.display())))?;
    Ok(file)
}

fn dispatch(cli: &Cli) -> Result<(String, i32), CliError> {
    let opts = AnalyzeOptions::from_cli(cli);
    match &cli.command {
        Command::Analyze { input } => cmd_analyze(input, &opts, cli.format),
        Command::Norms { input, labels } => {
            let (text, r) = cmd_norms(input, labels, &opts, cli.format)?;
            Ok((text, if r.violating { EXIT_ENTANGLED } else { EXIT_UNDETECTED }))
        }
        Command::ScanFamily { family, min, max, grid, param_tol } => {
            let fam: ParamFamily = family.parse()?;
            let rep = scan_family(&fam, *min, *max, *grid, *param_tol, &opts.scan)?;
            Ok((render_threshold(&rep, cli.format), EXIT_UNDETECTED))
        }
        Command::Generate { spec, output } => {
            let file = cmd_generate(spec, output, cli.seed)?;
            let n = file.matrix.len();
            let msg = format!("wrote {} ({n}x{n} matrix, dims {:?})\n", output.display(), file.dims);
            Ok((msg, EXIT_UNDETECTED))
        }
    }
}

/// Runs a parsed command line, writing results to `out` and diagnostics to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli)),
            Err(e) => Err(CliError::Input(format!("cannot start {n} worker threads: {e}"))),
        },
        None => dispatch(cli),
    };
    let result = result.and_then(|(text, code)| {
        out.write_all(text.as_bytes()).map_err(|e| CliError::Input(format!("cannot write output: {e}")))?;
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "gptsep: {e}");
            e.exit_code()
        }
    }
}
