//! Command-line front end: `gen`, `norm` and `verify`.
//!
//! Exit codes: 0 when everything passes, 1 for a failed check or an
//! enumeration guard, 2 for usage and file-format errors.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use pinorm::bounds::{run_suite, Suite, SuiteConfig};
use pinorm::constructions::{
    haar_system, hilbert, kp_tensor, paper_tensor, permuted_hilbert, pn_form, rademacher_l1, rademacher_sup,
    BasisFamily, Constants,
};
use pinorm::linalg::{spectral_norm, DenseMatrix, DenseTensor3};
use pinorm::norms::{opnorm_inf_1, opnorm_inf_2, trilinear_norm_ascent, trilinear_norm_exact, Guard, SignWitness};
use pinorm::projective::{projective_norm_exact, projective_upper_slices, CutPlaneOptions, NormBracket};
use pinorm::report::to_csv;

#[derive(Debug, Parser)]
#[command(name = "pinorm", version, about = "Exact sign-cube and projective tensor norms over sup-norm spaces")]
pub struct Cli {
    /// Hilbert-inequality constant tau. The default pi is the sharp constant in
    /// Hilbert's inequality; the growth constant is 1/(2 tau).
    #[arg(long, global = true, default_value_t = PI)]
    pub tau: f64,

    /// Worker threads (default: all cores). Results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Largest number of free sign bits any exact enumeration may use.
    #[arg(long, global = true, default_value_t = Guard::DEFAULT_BITS)]
    pub guard_bits: u32,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a constructed matrix, tensor or vector family as JSON.
    Gen {
        #[arg(long, value_enum)]
        object: Object,
        #[arg(long)]
        n: usize,
        /// Output file (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute a norm of a tensor file and print it as JSON.
    Norm {
        #[arg(long, value_enum)]
        kind: NormKind,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        method: Option<Method>,
        /// Random restarts for `--method ascent`.
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a verification suite and write its CSV report.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Random trials per n for the lemma32 and blocks suites.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Output file (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fill the runtime_ms column. Output is then no longer reproducible.
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Object {
    Hilbert,
    Permuted,
    Kp,
    PaperTensor,
    PnForm,
    RademacherSup,
    RademacherL1,
    Haar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormKind {
    Spectral,
    Inf1,
    Inf2,
    Trilinear,
    Projective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Ascent,
    Bracket,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Remark31,
    Lemma32,
    Lemma33,
    Main2,
    Kp,
    Tree,
    Blocks,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Remark31 => Suite::Remark31,
            SuiteArg::Lemma32 => Suite::Lemma32,
            SuiteArg::Lemma33 => Suite::Lemma33,
            SuiteArg::Main2 => Suite::Main2,
            SuiteArg::Kp => Suite::Kp,
            SuiteArg::Tree => Suite::Tree,
            SuiteArg::Blocks => Suite::Blocks,
            SuiteArg::All => Suite::All,
        }
    }
}

/// `{"dims": [...], "entries": [...]}` with row-major entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFile {
    pub dims: Vec<usize>,
    pub entries: Vec<f64>,
}

impl From<&DenseMatrix> for TensorFile {
    fn from(m: &DenseMatrix) -> Self {
        Self { dims: vec![m.rows(), m.cols()], entries: m.data().to_vec() }
    }
}

impl From<&DenseTensor3> for TensorFile {
    fn from(t: &DenseTensor3) -> Self {
        Self { dims: t.dims().to_vec(), entries: t.data().to_vec() }
    }
}

/// `{"n": ..., "kind": ..., "vectors": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub n: usize,
    pub kind: String,
    pub vectors: Vec<Vec<f64>>,
}

impl From<&BasisFamily> for FamilyFile {
    fn from(f: &BasisFamily) -> Self {
        Self { n: f.n, kind: f.kind.to_string(), vectors: f.vectors.iter().map(|v| v.as_slice().to_vec()).collect() }
    }
}

/// A parsed tensor file.
#[derive(Debug, Clone, PartialEq)]
pub enum Loaded {
    Matrix(DenseMatrix),
    Tensor(DenseTensor3),
}

impl TensorFile {
    pub fn load(path: &Path) -> Result<Loaded, CliError> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let file: TensorFile =
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        file.into_loaded()
    }

    pub fn into_loaded(self) -> Result<Loaded, CliError> {
        let bad = |e: pinorm::Error| CliError::Usage(format!("malformed tensor file: {e}"));
        let expected: usize = self.dims.iter().product();
        if expected != self.entries.len() {
            return Err(CliError::Usage(format!(
                "malformed tensor file: dims {:?} need {expected} entries, found {}",
                self.dims,
                self.entries.len()
            )));
        }
        match self.dims[..] {
            [r, c] => Ok(Loaded::Matrix(DenseMatrix::new(r, c, self.entries).map_err(bad)?)),
            [a, b, c] => Ok(Loaded::Tensor(DenseTensor3::new([a, b, c], self.entries).map_err(bad)?)),
            _ => {
                Err(CliError::Usage(format!("malformed tensor file: expected 2 or 3 dims, found {}", self.dims.len())))
            }
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or input files: exit code 2.
    Usage(String),
    /// A failed check or an exceeded guard: exit code 1.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Failure(_) => 1,
            Self::Usage(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Self::Usage(m) | Self::Failure(m) => m,
        }
    }
}

impl From<pinorm::Error> for CliError {
    fn from(e: pinorm::Error) -> Self {
        use pinorm::Error as E;
        match e {
            E::InvalidArgument(_) | E::DimensionMismatch { .. } | E::NonFinite { .. } => Self::Usage(e.to_string()),
            _ => Self::Failure(e.to_string()),
        }
    }
}

fn write_output(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Failure(format!("cannot write output: {e}"))),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("serializable");
    s.push('\n');
    s
}

/// JSON text for `gen`.
pub fn generate(object: Object, n: usize) -> Result<String, CliError> {
    Ok(match object {
        Object::Hilbert => to_json(&TensorFile::from(&hilbert(n)?)),
        Object::Permuted => to_json(&TensorFile::from(&permuted_hilbert(n)?)),
        Object::Kp => to_json(&TensorFile::from(&kp_tensor(n)?)),
        Object::PaperTensor => to_json(&TensorFile::from(&paper_tensor(n)?)),
        Object::PnForm => to_json(&TensorFile::from(&pn_form(n)?)),
        Object::RademacherSup => to_json(&FamilyFile::from(&rademacher_sup(n)?)),
        Object::RademacherL1 => to_json(&FamilyFile::from(&rademacher_l1(n)?)),
        Object::Haar => to_json(&FamilyFile::from(&haar_system(n)?)),
    })
}

fn witness_json(w: &SignWitness) -> Value {
    json!({ "value": w.value, "witness": w.describe() })
}

fn bracket_json(b: &NormBracket) -> Value {
    json!({
        "lower": b.lower,
        "upper": b.upper,
        "status": format!("{:?}", b.status).to_lowercase(),
        "cuts": b.cut_violations.len(),
        "terms": b.upper_witness.terms.len(),
    })
}

fn matrix_only(kind: NormKind, t: &Loaded) -> Result<&DenseMatrix, CliError> {
    match t {
        Loaded::Matrix(m) => Ok(m),
        Loaded::Tensor(_) => Err(CliError::Usage(format!("--kind {kind:?} needs a 2-dimensional file").to_lowercase())),
    }
}

/// JSON value for `norm`.
pub fn compute_norm(
    kind: NormKind,
    target: &Loaded,
    method: Option<Method>,
    restarts: usize,
    seed: u64,
    guard: Guard,
) -> Result<Value, CliError> {
    let unsupported = |m: Method| CliError::Usage(format!("method {m:?} does not apply to {kind:?}").to_lowercase());
    match (kind, method) {
        (NormKind::Spectral | NormKind::Inf1 | NormKind::Inf2, Some(m)) if m != Method::Exact => Err(unsupported(m)),
        (NormKind::Trilinear, Some(Method::Bracket)) => Err(unsupported(Method::Bracket)),
        (NormKind::Projective, Some(Method::Ascent)) => Err(unsupported(Method::Ascent)),
        (NormKind::Spectral, _) => {
            let s = spectral_norm(matrix_only(kind, target)?, 1e-12)?;
            Ok(json!({ "lower": s.lower, "upper": s.upper, "iterations": s.iterations, "converged": s.converged }))
        }
        (NormKind::Inf1, _) => Ok(witness_json(&opnorm_inf_1(matrix_only(kind, target)?, guard)?)),
        (NormKind::Inf2, _) => Ok(witness_json(&opnorm_inf_2(matrix_only(kind, target)?, guard)?)),
        (NormKind::Trilinear, m) => {
            let Loaded::Tensor(t) = target else {
                return Err(CliError::Usage("--kind trilinear needs a 3-dimensional file".into()));
            };
            let w = if m == Some(Method::Ascent) {
                trilinear_norm_ascent(t, restarts, seed)?
            } else {
                trilinear_norm_exact(t, guard)?
            };
            Ok(witness_json(&w))
        }
        (NormKind::Projective, Some(Method::Bracket)) => {
            let (max_abs, sum_abs, slices) = match target {
                Loaded::Matrix(m) => (m.max_abs(), m.sum_abs(), None),
                Loaded::Tensor(t) => {
                    let opts = CutPlaneOptions { guard, ..CutPlaneOptions::default() };
                    (t.max_abs(), t.sum_abs(), Some(projective_upper_slices(t, &opts)?.upper))
                }
            };
            let upper = slices.map_or(sum_abs, |s| s.min(sum_abs));
            Ok(json!({ "lower": max_abs, "upper": upper, "l1": sum_abs, "slices": slices }))
        }
        (NormKind::Projective, _) => {
            let opts = CutPlaneOptions { guard, ..CutPlaneOptions::default() };
            let b = match target {
                Loaded::Matrix(m) => projective_norm_exact(m, &opts)?,
                Loaded::Tensor(t) => projective_norm_exact(t, &opts)?,
            };
            Ok(bracket_json(&b))
        }
    }
}

fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Failure(format!("cannot start worker pool: {e}")))?;
    }
    Ok(())
}

/// Runs a parsed command line, writing results to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    configure_threads(cli.threads)?;
    let constants = Constants::with_tau(cli.tau)?;
    let guard = Guard::new(cli.guard_bits)?;
    match cli.command {
        Command::Gen { object, n, out } => write_output(out.as_deref(), &generate(object, n)?, stdout),
        Command::Norm { kind, input, method, restarts, seed } => {
            let target = TensorFile::load(&input)?;
            let value = compute_norm(kind, &target, method, restarts, seed, guard)?;
            write_output(None, &to_json(&value), stdout)
        }
        Command::Verify { suite, n_max, seed, trials, out, timings } => {
            let cfg = SuiteConfig {
                n_max,
                seed,
                trials,
                constants,
                cut: CutPlaneOptions { guard, ..CutPlaneOptions::default() },
            };
            let rows = run_suite(suite.into(), &cfg)?;
            write_output(out.as_deref(), &to_csv(&rows, timings), stdout)?;
            let failed = rows.iter().filter(|r| r.failed()).count();
            if failed > 0 {
                return Err(CliError::Failure(format!("{failed} of {} checks failed", rows.len())));
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hilbert_two_file() {
        let text = generate(Object::Hilbert, 2).unwrap();
        assert_eq!(text, "{\"dims\":[2,2],\"entries\":[1.0,0.0,0.0,-1.0]}\n");
    }

    #[test]
    fn paper_tensor_one_file() {
        let f: TensorFile = serde_json::from_str(&generate(Object::PaperTensor, 1).unwrap()).unwrap();
        assert_eq!(f, TensorFile { dims: vec![1, 1, 2], entries: vec![1.0, -1.0] });
    }

    #[test]
    fn zero_n_is_usage_error() {
        assert_eq!(generate(Object::Hilbert, 0).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn family_file() {
        let f: FamilyFile = serde_json::from_str(&generate(Object::RademacherSup, 2).unwrap()).unwrap();
        assert_eq!(f.kind, "rademacher_sup");
        assert_eq!(f.vectors, vec![vec![1.0, 1.0, -1.0, -1.0], vec![1.0, -1.0, 1.0, -1.0]]);
    }

    #[test]
    fn malformed_files() {
        let f = TensorFile { dims: vec![2, 2], entries: vec![1.0] };
        assert_eq!(f.into_loaded().unwrap_err().exit_code(), 2);
        let f = TensorFile { dims: vec![4], entries: vec![1.0; 4] };
        assert_eq!(f.into_loaded().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn guard_is_failure() {
        let m = Loaded::Matrix(DenseMatrix::zeros(40, 40));
        let e = compute_norm(NormKind::Inf1, &m, None, 1, 0, Guard::default()).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        assert!(e.message().contains("26"), "{}", e.message());
    }

    #[test]
    fn method_mismatch_is_usage_error() {
        let m = Loaded::Matrix(DenseMatrix::identity(2));
        let e = compute_norm(NormKind::Inf1, &m, Some(Method::Ascent), 1, 0, Guard::default()).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
