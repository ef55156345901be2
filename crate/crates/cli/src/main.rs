//! `spincover`: convert between `SO₊(p,q)` matrices and spin group rotors.
//!
//! Exit codes: 0 ok, 1 selfcheck failure, 2 bad input, 3 membership or
//! rotor rejection, 4 numerical failure.

mod json;

use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use spin_cover::covering::covering_residuals;
use spin_cover::division::{
    quaternion_to_rotor, quaternion_to_su2, so21_to_unit_split_quaternion_with_f, so3_to_unit_quaternion_with_f,
    split_to_rotor, split_to_su11, DivisionError,
};
use spin_cover::oracle::selfcheck;
use spin_cover::{
    check_membership, forward_map, project_to_group, recover, AlgebraError, Blade, CoveringError, Matrix, MatrixError,
    MembershipError, MembershipReport, Method, Multivector, OrthoMatrix, Rotor, RotorError, SelectOptions, Signature,
    DEFAULT_TOL,
};

use json::{BladeMap, Components, MatrixInput, MembershipJson, RotorInput};

#[derive(Parser, Debug)]
#[command(name = "spincover", version, about = "Spin group elements from pseudo-orthogonal matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Recover ±S from a matrix in SO+(p,q).
    RotorFromMatrix {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::General)]
        method: MethodArg,
        #[command(flatten)]
        matrix: MatrixArgs,
        /// Stop scanning blades once a candidate is certainly good enough.
        #[arg(long)]
        early_exit: bool,
    },
    /// Compute the matrix a rotor acts by.
    MatrixFromRotor {
        #[command(flatten)]
        input: InputArgs,
        /// Tolerance for the rotor invariants.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Report the SO+(p,q) membership conditions of a matrix.
    Check {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        matrix: MatrixArgs,
    },
    /// Run the randomized self-consistency suites.
    Selfcheck {
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 0)]
        q: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct InputArgs {
    /// JSON file to read; standard input when absent or "-".
    path: Option<PathBuf>,
    /// Inline JSON instead of a file.
    #[arg(long, conflicts_with = "path")]
    json: Option<String>,
    /// Signature override (number of +1 generators).
    #[arg(long)]
    p: Option<usize>,
    /// Signature override (number of -1 generators).
    #[arg(long)]
    q: Option<usize>,
}

#[derive(Args, Debug)]
struct MatrixArgs {
    /// Membership tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Re-orthogonalize by polar decomposition before validating.
    #[arg(long)]
    project: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    General,
    N3,
    Quaternion,
}

#[derive(Debug)]
enum Failure {
    SelfcheckFailed,
    BadInput(String),
    Rejected(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::SelfcheckFailed => 1,
            Failure::BadInput(_) => 2,
            Failure::Rejected(_) => 3,
            Failure::Numerical(_) => 4,
        }
    }
}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        Failure::BadInput(e.to_string())
    }
}

impl From<MatrixError> for Failure {
    fn from(e: MatrixError) -> Self {
        match e {
            MatrixError::ProjectionDiverged(_) | MatrixError::Singular => Failure::Numerical(e.to_string()),
            _ => Failure::BadInput(e.to_string()),
        }
    }
}

impl From<MembershipError> for Failure {
    fn from(e: MembershipError) -> Self {
        match e {
            MembershipError::Matrix(m) => m.into(),
            MembershipError::Rejected(r) => Failure::Rejected(r.to_string()),
        }
    }
}

impl From<RotorError> for Failure {
    fn from(e: RotorError) -> Self {
        match e {
            RotorError::Algebra(a) => a.into(),
            other => Failure::Rejected(other.to_string()),
        }
    }
}

impl From<CoveringError> for Failure {
    fn from(e: CoveringError) -> Self {
        match e {
            CoveringError::Algebra(a) => a.into(),
            CoveringError::Membership(m) => m.into(),
            CoveringError::Matrix(m) => m.into(),
            CoveringError::WrongDimension(_) => Failure::BadInput(e.to_string()),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

impl From<DivisionError> for Failure {
    fn from(e: DivisionError) -> Self {
        match e {
            DivisionError::WrongSignature { .. } => Failure::BadInput(e.to_string()),
            DivisionError::Algebra(a) => a.into(),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

fn read_input(args: &InputArgs) -> Result<String, Failure> {
    if let Some(text) = &args.json {
        return Ok(text.clone());
    }
    match &args.path {
        Some(path) if path.as_os_str() != "-" => {
            fs::read_to_string(path).map_err(|e| Failure::BadInput(format!("cannot read {}: {e}", path.display())))
        }
        _ => {
            let mut text = String::new();
            io::stdin().read_to_string(&mut text).map_err(|e| Failure::BadInput(format!("cannot read stdin: {e}")))?;
            Ok(text)
        }
    }
}

fn signature(args: &InputArgs, p: Option<usize>, q: Option<usize>) -> Result<Signature, Failure> {
    let p = args.p.or(p).ok_or_else(|| Failure::BadInput("signature: \"p\" is missing".into()))?;
    let q = args.q.or(q).unwrap_or(0);
    Ok(Signature::new(p, q)?)
}

fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::BadInput(format!("malformed JSON: {e}")))
}

/// Reads, optionally projects, and evaluates a matrix input.
fn load_matrix(input: &InputArgs, opts: &MatrixArgs) -> Result<(Signature, Matrix, MembershipReport), Failure> {
    let raw: MatrixInput = parse(&read_input(input)?)?;
    let sig = signature(input, raw.p, raw.q)?;
    if !(opts.tol.is_finite() && opts.tol > 0.0) {
        return Err(Failure::BadInput(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let mut m = Matrix::from_rows(&raw.matrix)?;
    if opts.project {
        m = project_to_group(&m, sig)?;
    }
    let report = MembershipReport::evaluate(&m, sig, opts.tol)?;
    Ok((sig, m, report))
}

#[derive(Serialize)]
struct RotorOutput {
    p: usize,
    q: usize,
    method: &'static str,
    #[serde(rename = "F")]
    f: String,
    rotor: BladeMap,
    rotor_negated: BladeMap,
    residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    quaternion: Option<Components>,
    #[serde(skip_serializing_if = "Option::is_none")]
    split_quaternion: Option<Components>,
    #[serde(skip_serializing_if = "Option::is_none")]
    su2: Option<[[[f64; 2]; 2]; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    su11: Option<[[[f64; 2]; 2]; 2]>,
}

/// Largest covering residual over both signs, checked before anything is
/// printed. A NaN residual fails the check.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn verified_residual(s: &Rotor, p: &OrthoMatrix) -> Result<f64, Failure> {
    let plus = covering_residuals(s.value(), p.matrix())?;
    let minus = covering_residuals(&s.negated(), p.matrix())?;
    let residual = plus.iter().chain(&minus).fold(0.0f64, |m, &r| m.max(r));
    let slack = (p.tol() / DEFAULT_TOL).max(1.0);
    let allowed = DEFAULT_TOL * slack * p.matrix().max_abs().max(1.0).powi(2);
    if !(residual <= allowed) {
        return Err(Failure::Numerical(format!("covering residual {residual:e} exceeds {allowed:e}")));
    }
    Ok(residual)
}

fn rotor_from_matrix(input: &InputArgs, method: MethodArg, opts: &MatrixArgs, early_exit: bool) -> Result<String, Failure> {
    let (sig, m, report) = load_matrix(input, opts)?;
    if !report.accepted() {
        return Err(Failure::Rejected(report.to_string()));
    }
    let p = check_membership(m, sig, opts.tol)?;
    let mut out = RotorOutput {
        p: sig.p(),
        q: sig.q(),
        method: "",
        f: String::new(),
        rotor: BladeMap(Vec::new()),
        rotor_negated: BladeMap(Vec::new()),
        residual: 0.0,
        quaternion: None,
        split_quaternion: None,
        su2: None,
        su11: None,
    };
    let (f, rotor) = match method {
        MethodArg::General | MethodArg::N3 => {
            let (name, method) = if method == MethodArg::N3 { ("n3", Method::N3) } else { ("general", Method::General) };
            out.method = name;
            let r = recover(&p, method, SelectOptions { early_exit })?;
            (r.candidate.f, r.rotor)
        }
        MethodArg::Quaternion => match (sig.p(), sig.q()) {
            (3, 0) => {
                out.method = "quaternion";
                let (f, x) = so3_to_unit_quaternion_with_f(&p)?;
                out.quaternion = Some(x.components().into());
                out.su2 = Some(json::complex_rows(&quaternion_to_su2(x)));
                (f, quaternion_to_rotor(x)?)
            }
            (2, 1) => {
                out.method = "split_quaternion";
                let (f, x) = so21_to_unit_split_quaternion_with_f(&p)?;
                out.split_quaternion = Some(x.components().into());
                out.su11 = Some(json::complex_rows(&split_to_su11(x)));
                (f, split_to_rotor(x)?)
            }
            _ => return Err(Failure::BadInput(format!("method quaternion needs signature (3,0) or (2,1), got ({sig})"))),
        },
    };
    out.residual = verified_residual(&rotor, &p)?;
    out.f = f.name();
    out.rotor = BladeMap::from_multivector(rotor.value());
    out.rotor_negated = BladeMap::from_multivector(&rotor.negated());
    Ok(json::to_string(&out))
}

#[derive(Serialize)]
struct MatrixOutput {
    p: usize,
    q: usize,
    matrix: Vec<Vec<f64>>,
    membership: MembershipJson,
}

fn matrix_from_rotor(input: &InputArgs, tol: f64) -> Result<String, Failure> {
    let raw: RotorInput = parse(&read_input(input)?)?;
    let sig = signature(input, raw.p, raw.q)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Failure::BadInput(format!("tolerance must be positive, got {tol}")));
    }
    let mut value = Multivector::zero(sig);
    for (name, coef) in &raw.rotor {
        let blade = Blade::parse(name, sig.dim())?;
        if !coef.is_finite() {
            return Err(Failure::BadInput(format!("coefficient of {name} is not finite")));
        }
        value.set(blade, *coef)?;
    }
    let rotor = Rotor::with_tol(value, tol)?;
    let p = forward_map(&rotor)?;
    let report = MembershipReport::evaluate(p.matrix(), sig, DEFAULT_TOL)?;
    let out = MatrixOutput { p: sig.p(), q: sig.q(), matrix: p.matrix().rows(), membership: (&report).into() };
    Ok(json::to_string(&out))
}

#[derive(Serialize)]
struct CheckOutput {
    p: usize,
    q: usize,
    membership: MembershipJson,
}

/// Returns the report and whether the matrix was rejected.
fn check(input: &InputArgs, opts: &MatrixArgs) -> Result<(String, Option<String>), Failure> {
    let (sig, _, report) = load_matrix(input, opts)?;
    let out = CheckOutput { p: sig.p(), q: sig.q(), membership: (&report).into() };
    let rejected = (!report.accepted()).then(|| report.to_string());
    Ok((json::to_string(&out), rejected))
}

#[derive(Serialize)]
struct SuiteJson {
    name: &'static str,
    trials: usize,
    max_residual: f64,
    tolerance: f64,
    failures: usize,
    passed: bool,
}

#[derive(Serialize)]
struct SelfcheckOutput {
    p: usize,
    q: usize,
    trials: usize,
    seed: u64,
    suites: Vec<SuiteJson>,
    passed: bool,
}

fn run_selfcheck(p: usize, q: usize, trials: usize, seed: u64) -> Result<(String, bool), Failure> {
    let sig = Signature::new(p, q)?;
    let suites: Vec<SuiteJson> = selfcheck(sig, trials, seed)
        .into_iter()
        .map(|s| SuiteJson {
            name: s.name,
            trials: s.trials,
            max_residual: s.max_residual,
            tolerance: s.tolerance,
            failures: s.failures,
            passed: s.passed(),
        })
        .collect();
    let passed = suites.iter().all(|s| s.passed);
    Ok((json::to_string(&SelfcheckOutput { p, q, trials, seed, suites, passed }), passed))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::RotorFromMatrix { input, method, matrix, early_exit } => {
            println!("{}", rotor_from_matrix(&input, method, &matrix, early_exit)?);
        }
        Command::MatrixFromRotor { input, tol } => {
            println!("{}", matrix_from_rotor(&input, tol)?);
        }
        Command::Check { input, matrix } => {
            let (text, rejected) = check(&input, &matrix)?;
            println!("{text}");
            if let Some(reason) = rejected {
                return Err(Failure::Rejected(reason));
            }
        }
        Command::Selfcheck { p, q, trials, seed } => {
            let (text, passed) = run_selfcheck(p, q, trials, seed)?;
            println!("{text}");
            if !passed {
                return Err(Failure::SelfcheckFailed);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::SelfcheckFailed => eprintln!("error: selfcheck failed"),
                Failure::BadInput(m) => eprintln!("error: bad input: {m}"),
                Failure::Rejected(m) => eprintln!("error: rejected: {m}"),
                Failure::Numerical(m) => eprintln!("error: numerical failure: {m}"),
            }
            ExitCode::from(failure.code())
        }
    }
}
