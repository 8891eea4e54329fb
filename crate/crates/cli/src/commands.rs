use std::fs;
use std::io::{self, Write};
use std::path::Path;

use entroseal::bench::{ar_params, count_record, emit_table, time_expansion, BenchRecord, Method};
use entroseal::budget::{budget_from_env, parse_budget};
use entroseal::ese::{self, derive_key_length, indistinguishability_key_length, SchemeParams, WireError};
use entroseal::gf2::{find_irreducible, Backend, BitPoly};
use entroseal::keyexpand::{expand_affine_with, Mode};
use entroseal::report::{render, CheckRecord};
use entroseal::rng::RandomSource;
use entroseal::suites::Suite;
use entroseal::Error;
use serde::Serialize;

use crate::args::{BackendArg, Cli, Command, Format, MethodArg, ModeArg, Security, SuiteArg};

pub const EXIT_CHECK: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_SHORT_KEY: u8 = 3;
pub const EXIT_MALFORMED: u8 = 4;
pub const EXIT_IO: u8 = 5;

/// Largest field degree the CLI will set up. The irreducible-polynomial
/// search grows roughly cubically and takes minutes beyond this point.
pub const MAX_FIELD_DEGREE: usize = 1 << 14;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parameter { .. } | Error::Config(_) | Error::Budget { .. } | Error::Precondition(_) => EXIT_USAGE,
            Error::Wire(_) => EXIT_MALFORMED,
            _ => EXIT_CHECK,
        };
        CliError::new(code, e.to_string())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

pub fn run(cli: Cli) -> CliResult {
    let format = cli.format;
    match cli.command {
        Command::Params { n_bits, security, mode } => cmd_params(n_bits, &security, mode.into(), format),
        Command::Keygen { n_bits, security, mode, seed, out } => {
            let p = scheme(n_bits, &security, mode.into())?;
            let key = ese::gen(&p, &mut rng(seed)?);
            write_file(&out, &key.to_bytes())?;
            eprintln!("wrote {}-bit key to {}", p.ell, out.display());
            Ok(())
        }
        Command::Encrypt { input, key, security, n_bits, seed, backend, out } => {
            cmd_encrypt(&input, &key, &security, n_bits, seed, backend.into(), out.as_deref())
        }
        Command::Decrypt { input, key, out } => cmd_decrypt(&input, &key, out.as_deref()),
        Command::Verify { suite, budget, seed } => cmd_verify(suite, budget.as_deref(), seed, format),
        Command::Bench { sizes, methods, backends, mode, t, epsilon, reps, count_only, seed, report } => {
            let sizing = BenchSizing::new(mode.into(), t.as_deref(), epsilon.as_deref())?;
            let methods: Vec<Method> = if methods.is_empty() {
                vec![Method::AffineThisWork, Method::baseline_for(sizing.mode())]
            } else {
                methods.into_iter().map(Method::from).collect()
            };
            let backends: Vec<Backend> = backends.into_iter().map(Backend::from).collect();
            let timing = (!count_only).then_some(reps);
            cmd_bench(&sizes, &methods, &backends, &sizing, timing, seed, format, report.as_deref())
        }
    }
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Classical => Mode::Classical,
            ModeArg::Quantum => Mode::Quantum,
        }
    }
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Backend {
        match b {
            BackendArg::Schoolbook => Backend::Schoolbook,
            BackendArg::Karatsuba => Backend::Karatsuba,
        }
    }
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Affine => Method::AffineThisWork,
            MethodArg::FullmulDs => Method::FullMulDodisSmith,
            MethodArg::FullmulAs => Method::FullMulAmbainisSmith,
        }
    }
}

/// `2^-k`, `2^k` or a plain decimal.
pub fn parse_epsilon(s: &str) -> CliResult<f64> {
    let s = s.trim();
    let value = match s.strip_prefix("2^") {
        Some(exp) => exp.parse::<i32>().ok().map(|e| 2f64.powi(e)),
        None => s.parse::<f64>().ok(),
    };
    value.ok_or_else(|| CliError::new(EXIT_USAGE, format!("invalid --epsilon `{s}` (use e.g. 2^-40 or 1e-12)")))
}

/// A number of bits, or a multiple of `n` written with an `n` suffix.
pub fn parse_t(s: &str, n: usize) -> CliResult<f64> {
    let s = s.trim();
    let value = match s.strip_suffix('n') {
        Some(frac) => frac.parse::<f64>().ok().map(|f| f * n as f64),
        None => s.parse::<f64>().ok(),
    };
    value.ok_or_else(|| CliError::new(EXIT_USAGE, format!("invalid --t `{s}` (use bits, or a fraction of n such as 0.5n)")))
}

fn scheme(n: usize, sec: &Security, mode: Mode) -> CliResult<SchemeParams> {
    if n == 0 {
        return Err(CliError::new(EXIT_USAGE, "n = 0: nothing to encrypt"));
    }
    let t = parse_t(&sec.t, n)?;
    let epsilon = parse_epsilon(&sec.epsilon)?;
    let p = SchemeParams::derive(n, t, epsilon, mode)?;
    guard_field_degree(p.expansion.lambda)?;
    Ok(p)
}

fn guard_field_degree(lambda: usize) -> CliResult {
    if lambda > MAX_FIELD_DEGREE {
        return Err(CliError::new(
            EXIT_USAGE,
            format!(
                "field degree lambda = {lambda} exceeds the supported maximum {MAX_FIELD_DEGREE}: \
                 finding an irreducible modulus of that degree is impractical; use a shorter message"
            ),
        ));
    }
    Ok(())
}

fn rng(seed: Option<u64>) -> CliResult<RandomSource> {
    Ok(RandomSource::new(seed)?)
}

fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::new(EXIT_IO, format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult {
    fs::write(path, bytes).map_err(|e| CliError::new(EXIT_IO, format!("cannot write {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> CliResult {
    match out {
        Some(path) => write_file(path, bytes),
        None => io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(|e| CliError::new(EXIT_IO, format!("cannot write to standard output: {e}"))),
    }
}

/// The first `ell` bits of a raw key file.
fn read_key(path: &Path, ell: usize) -> CliResult<BitPoly> {
    let bytes = read_file(path)?;
    let have = 8 * bytes.len();
    if have < ell {
        return Err(CliError::new(
            EXIT_SHORT_KEY,
            format!("key file {} supplies {have} bits, {ell} are required", path.display()),
        ));
    }
    let all = BitPoly::from_bytes(&bytes, have).expect("whole bytes have no padding");
    Ok(all.lsb_truncate(ell)?)
}

#[derive(Serialize)]
struct ParamsReport {
    #[serde(flatten)]
    params: SchemeParams,
    /// Key length for quantum indistinguishability alone.
    #[serde(skip_serializing_if = "Option::is_none")]
    indistinguishability_ell: Option<usize>,
    modulus_low_exponents: Vec<usize>,
}

fn cmd_params(n: usize, sec: &Security, mode: Mode, format: Format) -> CliResult {
    let p = scheme(n, sec, mode)?;
    debug_assert_eq!(derive_key_length(p.n, p.t, p.epsilon, mode).ok(), Some(p.ell));
    let advisory = match mode {
        Mode::Quantum => Some(indistinguishability_key_length(p.n, p.t, p.epsilon)?),
        Mode::Classical => None,
    };
    let field = find_irreducible(p.expansion.lambda);
    let report = ParamsReport {
        params: p,
        indistinguishability_ell: advisory,
        modulus_low_exponents: field.low_exponents().to_vec(),
    };
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("params serialize") + "\n",
        Format::Text => {
            let e = &p.expansion;
            let modulus: Vec<String> = std::iter::once(e.lambda)
                .chain(field.low_exponents().iter().copied())
                .map(|k| match k {
                    0 => "1".to_string(),
                    1 => "x".to_string(),
                    k => format!("x^{k}"),
                })
                .collect();
            let mut s = format!(
                "mode      {}\nn         {}\nt         {}\nepsilon   {:e}\nell       {}\nlambda    {}\ntail_len  {}\npad_len   {}\nmodulus   {}\n",
                p.mode,
                p.n,
                p.t,
                p.epsilon,
                p.ell,
                e.lambda,
                e.tail_len,
                e.out_len,
                modulus.join(" + ")
            );
            if let Some(a) = advisory {
                s += &format!("ell (indistinguishability only, advisory)  {a}\n");
            }
            s
        }
    };
    emit(None, text.as_bytes())
}

fn cmd_encrypt(
    input: &Path,
    key_path: &Path,
    sec: &Security,
    n_bits: Option<usize>,
    seed: Option<u64>,
    backend: Backend,
    out: Option<&Path>,
) -> CliResult {
    let data = read_file(input)?;
    let file_bits = 8 * data.len();
    let n = n_bits.unwrap_or(file_bits);
    if n < file_bits {
        return Err(CliError::new(EXIT_USAGE, format!("--n-bits {n} is shorter than the {file_bits}-bit input")));
    }
    let p = scheme(n, sec, Mode::Classical)?;
    let key = read_key(key_path, p.ell)?;
    let x = BitPoly::from_bytes(&data, file_bits).expect("whole bytes have no padding").zero_extend(n)?;
    let mut rng = rng(seed)?;
    let (u, v) = entroseal::keyexpand::sample_public_randomness(&p.expansion, &mut rng);
    let (pad, _) = expand_affine_with(&key, &u, &v, &p.expansion, backend)?;
    let c = ese::Ciphertext { params: p.expansion, u, v, payload: x.xor(&pad)? };
    debug_assert_eq!(ese::decrypt(&key, &c).as_ref(), Ok(&x));
    emit(out, &ese::serialize(&c))
}

fn cmd_decrypt(input: &Path, key_path: &Path, out: Option<&Path>) -> CliResult {
    let bytes = read_file(input)?;
    let c = ese::deserialize(&bytes).map_err(malformed)?;
    if c.mode() != Mode::Classical {
        return Err(CliError::new(EXIT_MALFORMED, "ciphertext is a quantum key tag, not a classical ciphertext"));
    }
    guard_field_degree(c.params.lambda)?;
    let key = read_key(key_path, c.params.ell)?;
    let x = ese::decrypt(&key, &c)?;
    emit(out, &x.to_bytes())
}

fn malformed(e: WireError) -> CliError {
    CliError::new(EXIT_MALFORMED, format!("malformed ciphertext (code {}): {e}", e.code()))
}

fn cmd_verify(suite: SuiteArg, budget: Option<&str>, seed: u64, format: Format) -> CliResult {
    let budget = match budget {
        Some(b) => parse_budget(b)?,
        None => budget_from_env()?,
    };
    let suites: Vec<Suite> = match suite {
        SuiteArg::Classical => vec![Suite::Classical],
        SuiteArg::Quantum => vec![Suite::Quantum],
        SuiteArg::Gf2 => vec![Suite::Gf2],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    let mut records = Vec::new();
    for s in suites {
        let start = std::time::Instant::now();
        let recs = s.run(budget, seed)?;
        let failed = recs.iter().filter(|r| !r.pass).count();
        eprintln!("suite {s}: {} checks, {failed} failed, {:.1}s", recs.len(), start.elapsed().as_secs_f64());
        records.extend(recs);
    }
    let mut text = render(&records, format == Format::Json);
    if format == Format::Json {
        text.push('\n');
    }
    emit(None, text.as_bytes())?;
    verdict(&records)
}

/// Exit status of a verification run; every failed check is named on stderr.
fn verdict(records: &[CheckRecord]) -> CliResult {
    let failed: Vec<_> = records.iter().filter(|r| !r.pass).collect();
    for r in &failed {
        eprintln!("FAILED {r}");
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::new(EXIT_CHECK, format!("{} of {} checks failed", failed.len(), records.len())))
    }
}

pub enum BenchSizing {
    /// Approximate randomization: t = 0, epsilon = 2^-5, pad length 2n.
    Quantum,
    Classical { t: String, epsilon: f64 },
}

impl BenchSizing {
    fn new(mode: Mode, t: Option<&str>, epsilon: Option<&str>) -> CliResult<Self> {
        match (mode, t, epsilon) {
            (Mode::Quantum, None, None) => Ok(BenchSizing::Quantum),
            (Mode::Quantum, _, _) => Err(CliError::new(
                EXIT_USAGE,
                "quantum benchmarks use the fixed sizing t = 0, epsilon = 2^-5; drop --t/--epsilon",
            )),
            (Mode::Classical, Some(t), Some(e)) => Ok(BenchSizing::Classical { t: t.to_string(), epsilon: parse_epsilon(e)? }),
            (Mode::Classical, _, _) => Err(CliError::new(EXIT_USAGE, "classical benchmarks need --t and --epsilon")),
        }
    }

    fn mode(&self) -> Mode {
        match self {
            BenchSizing::Quantum => Mode::Quantum,
            BenchSizing::Classical { .. } => Mode::Classical,
        }
    }

    fn params(&self, size: usize) -> CliResult<entroseal::keyexpand::ExpansionParams> {
        let p = match self {
            BenchSizing::Quantum => ar_params(size)?,
            BenchSizing::Classical { t, epsilon } => {
                let t = parse_t(t, size)?;
                SchemeParams::derive(size, t, *epsilon, Mode::Classical)?.expansion
            }
        };
        guard_field_degree(p.lambda.max(p.out_len))?;
        Ok(p)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    sizes: &[usize],
    methods: &[Method],
    backends: &[Backend],
    sizing: &BenchSizing,
    reps: Option<usize>,
    seed: u64,
    format: Format,
    report: Option<&Path>,
) -> CliResult {
    let mut records: Vec<BenchRecord> = Vec::new();
    for &size in sizes {
        let p = sizing.params(size)?;
        for &backend in backends {
            for &method in methods {
                let r = match reps {
                    Some(reps) => time_expansion(method, &p, backend, reps, seed)?,
                    None => count_record(method, &p, backend)?,
                };
                records.push(r);
            }
        }
    }
    let table = emit_table(&records);
    if let Some(path) = report {
        write_file(path, table.text.as_bytes())?;
        let mut twin = path.as_os_str().to_owned();
        twin.push(".json");
        write_file(Path::new(&twin), table.json.as_bytes())?;
    }
    let out = match format {
        Format::Text => table.text,
        Format::Json => table.json + "\n",
    };
    emit(None, out.as_bytes())?;
    if records.iter().any(|r| r.low_resolution) {
        eprintln!("note: * marks medians within 100 timer ticks; treat those times as approximate");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_forms() {
        assert_eq!(parse_epsilon("2^-40").unwrap(), 2f64.powi(-40));
        assert_eq!(parse_epsilon("0.125").unwrap(), 0.125);
        assert_eq!(parse_epsilon("1e-3").unwrap(), 1e-3);
        assert_eq!(parse_epsilon("tiny").unwrap_err().code, EXIT_USAGE);
    }

    #[test]
    fn t_forms() {
        assert_eq!(parse_t("64", 128).unwrap(), 64.0);
        assert_eq!(parse_t("0.5n", 128).unwrap(), 64.0);
        assert_eq!(parse_t("-3", 8).unwrap(), -3.0);
        assert!(parse_t("half", 8).is_err());
    }

    #[test]
    fn a_single_failed_check_fails_the_run() {
        let ok = CheckRecord::new("fine", serde_json::json!({}), 0.0, 1.0, true);
        let bad = CheckRecord::new("broken_bound", serde_json::json!({"n": 3}), 2.0, 1.0, false);
        assert!(verdict(std::slice::from_ref(&ok)).is_ok());
        let e = verdict(&[ok, bad]).unwrap_err();
        assert_eq!(e.code, EXIT_CHECK);
        assert!(e.message.contains("1 of 2"));
    }
}
