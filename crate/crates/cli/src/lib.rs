//! Batch front end for the cusp solver.
//!
//! Every command reads one JSON document and writes one JSON document (or an
//! OBJ mesh for `develop --format obj`). Floats are written with 17
//! significant digits and fields in a fixed order, so identical inputs give
//! byte-identical output. Failures are reported as `{"code", "message"}` on
//! stderr with exit status 1 for bad input and 2 for infeasibility.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use horocusp::cusp::{build_state, CuspError, CuspState};
use horocusp::develop::DevelopError;
use horocusp::functional::total_scalar_curvature;
use horocusp::json::{plain_vec, sig17_vec, IndexedMap, Sig17};
use horocusp::solver::{rigidity_report, solve_particles, SolveError, SolveOptions, SolveReport, Start};
use horocusp::surface::{ConeSurface, FlipOrder, SurfaceDoc, SurfaceError};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Validate,
    Delaunay,
    Solve,
    Particles,
    Rigidity,
    Develop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Obj,
}

#[derive(Debug, Parser)]
#[command(name = "horocusp", version, about = "Convex polyhedral cusps with prescribed boundary metric")]
pub struct Args {
    pub command: Command,
    /// Surface document, or a solve report for `rigidity` and `develop`.
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Target curvatures (JSON array or index-keyed object); `particles` only.
    #[arg(long)]
    pub kappa: Option<PathBuf>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    /// Lattice copies in each direction; `develop` only.
    #[arg(long)]
    pub copies: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// `zero` or `file:<path>` with a height array or a report.
    #[arg(long)]
    pub start: Option<String>,
    /// Random flip order with this seed instead of worst-first.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StartSpec {
    Zero,
    File(PathBuf),
}

/// Checked configuration of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: PathBuf,
    pub output: Option<PathBuf>,
    pub kappa: Option<PathBuf>,
    pub tol: f64,
    pub max_iter: usize,
    pub copies: usize,
    pub format: Format,
    pub start: StartSpec,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CliError {
    pub code: String,
    pub message: String,
    #[serde(skip)]
    pub exit: i32,
}

impl CliError {
    fn input(code: &str, message: impl Into<String>) -> Self {
        CliError { code: code.into(), message: message.into(), exit: 1 }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("error serializes")
    }
}

impl From<SurfaceError> for CliError {
    fn from(e: SurfaceError) -> Self {
        CliError::input(e.code(), e.to_string())
    }
}

impl From<CuspError> for CliError {
    fn from(e: CuspError) -> Self {
        let exit = if matches!(e, CuspError::HeightCount { .. }) { 1 } else { 2 };
        CliError { code: e.code().into(), message: e.to_string(), exit }
    }
}

impl From<SolveError<f64>> for CliError {
    fn from(e: SolveError<f64>) -> Self {
        match e {
            SolveError::Start(c) => c.into(),
            SolveError::Surface(s) => s.into(),
            SolveError::MaxIterExceeded(_) | SolveError::BoundaryStall(_) => {
                CliError { code: e.code().into(), message: e.to_string(), exit: 2 }
            }
            _ => CliError::input(e.code(), e.to_string()),
        }
    }
}

impl From<DevelopError> for CliError {
    fn from(e: DevelopError) -> Self {
        CliError::input(e.code(), e.to_string())
    }
}

impl RunConfig {
    pub fn from_args(a: Args) -> Result<Self, CliError> {
        let bad = |m: &str| Err(CliError::input("InvalidFlags", m));
        if a.kappa.is_some() != (a.command == Command::Particles) {
            return bad("--kappa is required by `particles` and accepted by no other command");
        }
        if a.command != Command::Develop && (a.copies.is_some() || a.format.is_some()) {
            return bad("--copies and --format apply to `develop` only");
        }
        let solves = matches!(
            a.command,
            Command::Solve | Command::Particles | Command::Rigidity | Command::Develop
        );
        if !solves && (a.tol.is_some() || a.max_iter.is_some() || a.start.is_some()) {
            return bad("--tol, --max-iter and --start need a command that solves");
        }
        if a.seed.is_some() && a.command == Command::Validate {
            return bad("--seed has no effect on `validate`");
        }
        let tol = a.tol.unwrap_or(1e-10);
        if !(tol > 0.0) {
            return bad("--tol must be positive");
        }
        let start = match a.start.as_deref() {
            None | Some("zero") => StartSpec::Zero,
            Some(s) => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => StartSpec::File(PathBuf::from(p)),
                _ => return bad("--start must be `zero` or `file:<path>`"),
            },
        };
        Ok(RunConfig {
            command: a.command,
            input: a.input,
            output: a.output,
            kappa: a.kappa,
            tol,
            max_iter: a.max_iter.unwrap_or(200),
            copies: a.copies.unwrap_or(1),
            format: a.format.unwrap_or(Format::Json),
            start,
            seed: a.seed,
        })
    }
}

/// `SurfaceDoc` with fixed float layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSection {
    pub triangles: Vec<[usize; 3]>,
    pub opposite: Vec<usize>,
    pub length: Vec<Sig17>,
}

impl SurfaceSection {
    fn new(s: &ConeSurface<f64>) -> Self {
        let d = s.to_doc();
        SurfaceSection { triangles: d.triangles, opposite: d.opposite, length: sig17_vec(&d.length) }
    }

    pub fn to_doc(&self) -> SurfaceDoc {
        SurfaceDoc {
            triangles: self.triangles.clone(),
            opposite: self.opposite.clone(),
            length: plain_vec(&self.length),
        }
    }
}

/// Triangles as vertex triples with their side lengths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triangulation {
    pub vertices: Vec<[usize; 3]>,
    pub lengths: Vec<[Sig17; 3]>,
}

impl Triangulation {
    fn new(s: &ConeSurface<f64>) -> Self {
        let n = s.n_triangles();
        Triangulation {
            vertices: (0..n).map(|t| s.triangle_vertices(t)).collect(),
            lengths: (0..n).map(|t| s.triangle_lengths(t).map(Sig17)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeEntry {
    /// Canonical half-edge id.
    pub edge: usize,
    pub vertices: [usize; 2],
    pub length: Sig17,
    pub theta: Sig17,
    pub flat: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub residual: Sig17,
    pub objective: Sig17,
    pub step: Sig17,
    pub halvings: usize,
    pub flips: usize,
    pub regularization: Sig17,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSection {
    pub status: String,
    pub iterations: usize,
    pub residual: Sig17,
    pub flips: usize,
    pub boundary_stall: bool,
    pub trace: Vec<TraceEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigiditySection {
    pub rigid: bool,
    pub deficiency: usize,
    pub components: Vec<Vec<usize>>,
    pub near_zero: usize,
    pub eigenvalues: Vec<Sig17>,
    pub smallest_nonzero: Option<Sig17>,
}

/// Report of a cusp state. Reloading `surface` and `h` with `build_state`
/// reproduces every angle in it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub input_sha256: String,
    pub triangulation: Triangulation,
    pub surface: SurfaceSection,
    /// Heights in the sum-zero gauge.
    pub h: Vec<Sig17>,
    pub edges: Vec<EdgeEntry>,
    pub kappa: IndexedMap,
    pub kappa_target: Option<IndexedMap>,
    pub scalar_curvature: Sig17,
    pub volume: Sig17,
    pub solver: Option<SolverSection>,
    pub rigidity: Option<RigiditySection>,
}

impl Report {
    fn of_state(command: Command, digest: &str, st: &CuspState<f64>) -> Self {
        // half-edge ids as they reload from the surface section
        let st = &build_state(&st.surface().canonical(), st.heights()).expect("a solved state rebuilds");
        let s = st.surface();
        let edges = s
            .edges()
            .map(|e| EdgeEntry {
                edge: e,
                vertices: [s.origin(e), s.target(e)],
                length: Sig17(s.length(e)),
                theta: Sig17(st.theta(e)),
                flat: st.is_flat(e),
            })
            .collect();
        Report {
            command: name(command).into(),
            input_sha256: digest.into(),
            triangulation: Triangulation::new(s),
            surface: SurfaceSection::new(s),
            h: sig17_vec(st.heights()),
            edges,
            kappa: IndexedMap(sig17_vec(st.kappa())),
            kappa_target: None,
            scalar_curvature: Sig17(total_scalar_curvature(st)),
            volume: Sig17(horocusp::functional::volume(st)),
            solver: None,
            rigidity: None,
        }
    }

    fn of_solve(command: Command, digest: &str, rep: &SolveReport<f64>, status: &str) -> Self {
        let mut r = Report::of_state(command, digest, &rep.state);
        r.scalar_curvature = Sig17(rep.scalar_curvature);
        r.volume = Sig17(rep.volume);
        r.kappa_target = Some(IndexedMap(sig17_vec(&rep.target)));
        r.solver = Some(SolverSection {
            status: status.into(),
            iterations: rep.iterations,
            residual: Sig17(rep.residual),
            flips: rep.flips,
            boundary_stall: rep.boundary_stall,
            trace: rep
                .trace
                .iter()
                .map(|t| TraceEntry {
                    iteration: t.iteration,
                    residual: Sig17(t.residual),
                    objective: Sig17(t.objective),
                    step: Sig17(t.step),
                    halvings: t.halvings,
                    flips: t.flips,
                    regularization: Sig17(t.regularization),
                })
                .collect(),
        });
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Rebuilds the reported state.
    pub fn state(&self) -> Result<CuspState<f64>, CliError> {
        let s = ConeSurface::from_doc(&self.surface.to_doc())?;
        Ok(build_state(&s, &plain_vec(&self.h))?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
struct ValidateReport {
    command: &'static str,
    input_sha256: String,
    vertices: usize,
    triangles: usize,
    edges: usize,
    cone_angles: IndexedMap,
    curvatures: IndexedMap,
    area: Sig17,
    delaunay: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
struct DelaunayReport {
    command: &'static str,
    input_sha256: String,
    flips: usize,
    triangulation: Triangulation,
    surface: SurfaceSection,
}

/// Result of a run: the document to write and the exit status. A solve that
/// stops short still writes its best state, with status 2.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub error: Option<CliError>,
}

fn name(c: Command) -> &'static str {
    match c {
        Command::Validate => "validate",
        Command::Delaunay => "delaunay",
        Command::Solve => "solve",
        Command::Particles => "particles",
        Command::Rigidity => "rigidity",
        Command::Develop => "develop",
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::input("Io", format!("{}: {e}", path.display())))
}

fn parse_json<'a, D: Deserialize<'a>>(bytes: &'a [u8], what: &str) -> Result<D, CliError> {
    serde_json::from_slice(bytes).map_err(|e| CliError::input("InvalidJson", format!("{what}: {e}")))
}

/// A vector given as a JSON array or as an object keyed `"0"`, `"1"`, ...
fn read_vector(path: &Path, what: &str) -> Result<Vec<f64>, CliError> {
    let bytes = read(path)?;
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Vector {
        List(Vec<f64>),
        Map(IndexedMap),
        Report { h: Vec<Sig17> },
    }
    let v: Vector = parse_json(&bytes, what)?;
    let v = match v {
        Vector::List(v) => v,
        Vector::Map(m) => plain_vec(&m.0),
        Vector::Report { h } => plain_vec(&h),
    };
    if v.iter().any(|x| !x.is_finite()) {
        return Err(CliError::input("InvalidJson", format!("{what}: non-finite entry")));
    }
    Ok(v)
}

/// Input of `rigidity` and `develop`: a surface to solve or a report to rebuild.
enum Input {
    Surface(ConeSurface<f64>),
    Report(Box<Report>),
}

fn classify(bytes: &[u8]) -> Result<Input, CliError> {
    let v: serde_json::Value = parse_json(bytes, "input")?;
    if v.get("h").is_some() && v.get("surface").is_some() {
        Ok(Input::Report(Box::new(parse_json(bytes, "report")?)))
    } else {
        let text = std::str::from_utf8(bytes).map_err(|e| CliError::input("InvalidJson", e.to_string()))?;
        Ok(Input::Surface(ConeSurface::load(text)?))
    }
}

fn load_surface(bytes: &[u8]) -> Result<ConeSurface<f64>, CliError> {
    let text = std::str::from_utf8(bytes).map_err(|e| CliError::input("InvalidJson", e.to_string()))?;
    Ok(ConeSurface::load(text)?)
}

fn options(cfg: &RunConfig) -> Result<SolveOptions<f64>, CliError> {
    let start = match &cfg.start {
        StartSpec::Zero => Start::Zero,
        StartSpec::File(p) => Start::Heights(read_vector(p, "start heights")?),
    };
    Ok(SolveOptions {
        tol_kappa: cfg.tol,
        max_iter: cfg.max_iter,
        flip_order: cfg.seed.map_or(FlipOrder::WorstFirst, FlipOrder::Random),
        start,
        ..SolveOptions::default()
    })
}

fn solve(
    cfg: &RunConfig,
    digest: &str,
    surface: &ConeSurface<f64>,
    target: &[f64],
) -> Result<(Report, CuspState<f64>, Option<CliError>), CliError> {
    match solve_particles(surface, target, &options(cfg)?) {
        Ok(rep) => Ok((Report::of_solve(cfg.command, digest, &rep, "Converged"), rep.state, None)),
        Err(e) => match e.report() {
            Some(rep) => {
                let r = Report::of_solve(cfg.command, digest, rep, e.code());
                let st = rep.state.clone();
                Ok((r, st, Some(e.into())))
            }
            None => Err(e.into()),
        },
    }
}

fn rigidity_section(st: &CuspState<f64>) -> RigiditySection {
    let r = rigidity_report(st);
    RigiditySection {
        rigid: r.rigid,
        deficiency: r.nullspace.deficiency,
        components: r.nullspace.components.clone(),
        near_zero: r.nullspace.near_zero,
        eigenvalues: sig17_vec(&r.nullspace.eigenvalues),
        smallest_nonzero: r.smallest_nonzero.map(Sig17),
    }
}

/// Runs one command and returns the document to write.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let bytes = read(&cfg.input)?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let done = |text: String| Ok(Outcome { text, error: None });
    match cfg.command {
        Command::Validate => {
            let s = load_surface(&bytes)?;
            let r = ValidateReport {
                command: "validate",
                input_sha256: digest,
                vertices: s.n_vertices(),
                triangles: s.n_triangles(),
                edges: s.n_edges(),
                cone_angles: IndexedMap(sig17_vec(&s.cone_angles())),
                curvatures: IndexedMap(sig17_vec(&s.curvatures())),
                area: Sig17(s.area()),
                delaunay: s.is_delaunay(),
            };
            done(serde_json::to_string_pretty(&r).expect("report serializes") + "\n")
        }
        Command::Delaunay => {
            let s = load_surface(&bytes)?;
            let order = cfg.seed.map_or(FlipOrder::WorstFirst, FlipOrder::Random);
            let (d, flips) = s.delaunay_with(order)?;
            let r = DelaunayReport {
                command: "delaunay",
                input_sha256: digest,
                flips,
                triangulation: Triangulation::new(&d),
                surface: SurfaceSection::new(&d),
            };
            done(serde_json::to_string_pretty(&r).expect("report serializes") + "\n")
        }
        Command::Solve | Command::Particles => {
            let s = load_surface(&bytes)?;
            let target = match &cfg.kappa {
                Some(p) => read_vector(p, "target curvatures")?,
                None => vec![0.0; s.n_vertices()],
            };
            let (r, _, error) = solve(cfg, &digest, &s, &target)?;
            Ok(Outcome { text: r.to_json(), error })
        }
        Command::Rigidity => {
            let (mut r, st, error) = match classify(&bytes)? {
                Input::Surface(s) => solve(cfg, &digest, &s, &vec![0.0; s.n_vertices()])?,
                Input::Report(rep) => {
                    let st = rep.state()?;
                    (Report::of_state(cfg.command, &digest, &st), st, None)
                }
            };
            r.command = "rigidity".into();
            r.rigidity = Some(rigidity_section(&st));
            Ok(Outcome { text: r.to_json(), error })
        }
        Command::Develop => {
            let (st, error) = match classify(&bytes)? {
                Input::Surface(s) => {
                    let (_, st, e) = solve(cfg, &digest, &s, &vec![0.0; s.n_vertices()])?;
                    (st, e)
                }
                Input::Report(rep) => (rep.state()?, None),
            };
            if let Some(e) = error {
                return Err(e);
            }
            let d = horocusp::develop(&st);
            match cfg.format {
                Format::Json => done(d.to_json() + "\n"),
                Format::Obj => done(d.to_klein(cfg.copies)?.to_obj()),
            }
        }
    }
}

/// Parses `argv`, runs, writes the output, and returns the exit status.
pub fn main_with<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => return fail(&CliError::input("InvalidFlags", e.to_string().trim_end())),
    };
    let result = RunConfig::from_args(args).and_then(|cfg| {
        let out = run(&cfg)?;
        match &cfg.output {
            Some(p) => fs::write(p, &out.text)
                .map_err(|e| CliError::input("Io", format!("{}: {e}", p.display())))?,
            None => print!("{}", out.text),
        }
        Ok(out.error)
    });
    match result {
        Ok(None) => 0,
        Ok(Some(e)) | Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> i32 {
    eprintln!("{}", e.to_json());
    e.exit
}
