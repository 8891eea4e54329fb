//! Gate counts and wall-clock timing of one key expansion per method.

use std::fmt::{self, Write as _};
use std::hint::black_box;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::ese::SchemeParams;
use crate::gf2::{find_irreducible, gf_mul_cost, Backend, BitPoly, OpCount};
use crate::keyexpand::{expand_affine_with, expand_fullmul_with, ExpansionParams, Mode};

/// Fewest timed repetitions accepted.
pub const MIN_REPS: usize = 31;
/// Medians below this many timer ticks are flagged as low resolution.
const RESOLUTION_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// One multiplication in GF(2^lambda) plus a `tail_len`-bit addition.
    AffineThisWork,
    /// Key times an n-bit string in GF(2^n) (classical baseline).
    FullMulDodisSmith,
    /// Key times a 2n-bit string in GF(2^(2n)) (quantum baseline).
    FullMulAmbainisSmith,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::AffineThisWork, Method::FullMulDodisSmith, Method::FullMulAmbainisSmith];

    pub fn name(self) -> &'static str {
        match self {
            Method::AffineThisWork => "affine",
            Method::FullMulDodisSmith => "fullmul-ds",
            Method::FullMulAmbainisSmith => "fullmul-as",
        }
    }

    /// Degree of the field the method multiplies in.
    pub fn field_degree(self, p: &ExpansionParams) -> usize {
        match self {
            Method::AffineThisWork => p.lambda,
            _ => p.out_len,
        }
    }

    fn check_mode(self, p: &ExpansionParams) -> Result<()> {
        let ok = match self {
            Method::AffineThisWork => true,
            Method::FullMulDodisSmith => p.mode == Mode::Classical,
            Method::FullMulAmbainisSmith => p.mode == Mode::Quantum,
        };
        if !ok {
            return Err(precondition(format!("{} does not apply to {} parameters", self.name(), p.mode)));
        }
        Ok(())
    }

    /// The full-multiplication method for `mode`.
    pub fn baseline_for(mode: Mode) -> Method {
        match mode {
            Mode::Classical => Method::FullMulDodisSmith,
            Mode::Quantum => Method::FullMulAmbainisSmith,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown method `{s}`")))
    }
}

/// Exact AND/XOR count of one expansion. Independent of operand values.
pub fn count_expansion(method: Method, p: &ExpansionParams, backend: Backend) -> Result<OpCount> {
    method.check_mode(p)?;
    let field = find_irreducible(method.field_degree(p));
    let mul = gf_mul_cost(&field, backend);
    Ok(match method {
        Method::AffineThisWork => mul + OpCount::xors(p.tail_len as u64),
        _ => mul,
    })
}

/// Quantum approximate-randomization sizing (`t = 0`, `ε = 2^-5`) for a
/// `2n`-bit Pauli key.
pub fn ar_params(two_n: usize) -> Result<ExpansionParams> {
    if !two_n.is_multiple_of(2) || two_n == 0 {
        return Err(precondition("2n must be a positive even number"));
    }
    Ok(SchemeParams::derive(two_n / 2, 0.0, 2f64.powi(-5), Mode::Quantum)?.expansion)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WallStats {
    pub median_ns: f64,
    pub q1_ns: f64,
    pub q3_ns: f64,
    pub min_ns: f64,
}

impl WallStats {
    pub fn iqr_ns(&self) -> f64 {
        self.q3_ns - self.q1_ns
    }

    /// Linear-interpolated quartiles of the samples.
    pub fn from_samples(samples: &[f64]) -> Option<WallStats> {
        if samples.is_empty() {
            return None;
        }
        let mut s = samples.to_vec();
        s.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let pos = p * (s.len() - 1) as f64;
            let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
            s[lo] + (s[hi] - s[lo]) * (pos - lo as f64)
        };
        Some(WallStats {
            median_ns: q(0.5),
            q1_ns: q(0.25),
            q3_ns: q(0.75),
            min_ns: s[0],
        })
    }
}

/// Where and how a timing was taken.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvFingerprint {
    pub cpu_model: String,
    pub arch: String,
    pub debug_assertions: bool,
    pub pclmulqdq: bool,
    pub timer_resolution_ns: u64,
}

impl EnvFingerprint {
    pub fn capture() -> Self {
        let cpu_model = std::fs::read_to_string("/proc/cpuinfo")
            .ok()
            .and_then(|s| {
                s.lines()
                    .find(|l| l.starts_with("model name"))
                    .and_then(|l| l.split(':').nth(1))
                    .map(|m| m.trim().to_string())
            })
            .unwrap_or_else(|| "unknown".into());
        EnvFingerprint {
            cpu_model,
            arch: std::env::consts::ARCH.into(),
            debug_assertions: cfg!(debug_assertions),
            pclmulqdq: crate::gf2::hardware_clmul(),
            timer_resolution_ns: timer_resolution().as_nanos().max(1) as u64,
        }
    }
}

/// Smallest nonzero step observed on the monotonic clock.
fn timer_resolution() -> Duration {
    let mut best = Duration::MAX;
    for _ in 0..64 {
        let a = Instant::now();
        let mut b = Instant::now();
        while b == a {
            b = Instant::now();
        }
        best = best.min(b - a);
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub method: Method,
    pub backend: Backend,
    pub mode: Mode,
    pub n: usize,
    pub ell: usize,
    pub field_degree: usize,
    pub cost: OpCount,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall: Option<WallStats>,
    pub reps: usize,
    pub low_resolution: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub env: Option<EnvFingerprint>,
}

/// Count-only record.
pub fn count_record(method: Method, p: &ExpansionParams, backend: Backend) -> Result<BenchRecord> {
    Ok(BenchRecord {
        method,
        backend,
        mode: p.mode,
        n: p.n,
        ell: p.ell,
        field_degree: method.field_degree(p),
        cost: count_expansion(method, p, backend)?,
        wall: None,
        reps: 0,
        low_resolution: false,
        env: None,
    })
}

/// Median wall time of one expansion over `reps` fresh random inputs, after
/// an untimed warmup.
pub fn time_expansion(method: Method, p: &ExpansionParams, backend: Backend, reps: usize, seed: u64) -> Result<BenchRecord> {
    if reps < MIN_REPS {
        return Err(precondition(format!("timing needs at least {MIN_REPS} repetitions, got {reps}")));
    }
    let mut record = count_record(method, p, backend)?;
    // field search stays out of the timed region
    find_irreducible(record.field_degree);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let warmup = (reps / 10).max(3);
    let mut samples = Vec::with_capacity(reps);
    for i in 0..warmup + reps {
        let key = BitPoly::random(p.ell, &mut rng);
        let (elapsed, cost) = match method {
            Method::AffineThisWork => {
                let u = BitPoly::random(p.lambda, &mut rng);
                let v = BitPoly::random(p.tail_len, &mut rng);
                let start = Instant::now();
                let out = expand_affine_with(black_box(&key), black_box(&u), black_box(&v), p, backend)?;
                let elapsed = start.elapsed();
                black_box(&out.0);
                (elapsed, out.1)
            }
            _ => {
                let m = BitPoly::random(p.out_len, &mut rng);
                let start = Instant::now();
                let out = expand_fullmul_with(black_box(&key), black_box(&m), p, backend)?;
                let elapsed = start.elapsed();
                black_box(&out.0);
                (elapsed, out.1)
            }
        };
        if cost != record.cost {
            return Err(Error::Domain(format!("gate count changed between repetitions: {cost:?}")));
        }
        if i >= warmup {
            samples.push(elapsed.as_nanos() as f64);
        }
    }
    let env = EnvFingerprint::capture();
    let wall = WallStats::from_samples(&samples).expect("reps > 0");
    record.low_resolution = wall.median_ns < RESOLUTION_FACTOR * env.timer_resolution_ns as f64;
    record.wall = Some(wall);
    record.reps = reps;
    record.env = Some(env);
    Ok(record)
}

/// `x` to three significant digits.
pub fn sig3(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = 2 - mag;
    if decimals > 0 {
        format!("{:.*}", decimals as usize, x)
    } else {
        let unit = 10f64.powi(-decimals);
        format!("{:.0}", (x / unit).round() * unit)
    }
}

/// Baseline-over-affine ratios for one record, when the matching affine
/// record (same backend, mode, n) is present.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    pub and_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_ratio: Option<f64>,
}

pub fn ratios(records: &[BenchRecord]) -> Vec<Option<Ratios>> {
    records
        .iter()
        .map(|r| {
            if r.method == Method::AffineThisWork {
                return None;
            }
            let ours = records
                .iter()
                .find(|o| o.method == Method::AffineThisWork && o.backend == r.backend && o.mode == r.mode && o.n == r.n)?;
            let time_ratio = match (r.wall, ours.wall) {
                (Some(b), Some(o)) if o.median_ns > 0.0 => Some(b.median_ns / o.median_ns),
                _ => None,
            };
            Some(Ratios {
                and_ratio: r.cost.ands as f64 / ours.cost.ands.max(1) as f64,
                time_ratio,
            })
        })
        .collect()
}

/// A rendered comparison table and its machine-readable twin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub text: String,
    pub json: String,
}

#[derive(Serialize)]
struct Row<'a> {
    #[serde(flatten)]
    record: &'a BenchRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratios: Option<Ratios>,
}

const HEADER: [&str; 11] = [
    "method", "backend", "mode", "n", "ell", "field", "ANDs", "XORs", "median_ns", "iqr_ns", "ratio(and/time)",
];

pub fn emit_table(records: &[BenchRecord]) -> Table {
    let rs = ratios(records);
    let mut rows: Vec<[String; 11]> = vec![HEADER.map(String::from)];
    for (r, ratio) in records.iter().zip(&rs) {
        let (median, iqr) = match r.wall {
            Some(w) => (format!("{:.0}{}", w.median_ns, if r.low_resolution { "*" } else { "" }), format!("{:.0}", w.iqr_ns())),
            None => ("-".into(), "-".into()),
        };
        let ratio = match ratio {
            Some(x) => match x.time_ratio {
                Some(t) => format!("{}/{}", sig3(x.and_ratio), sig3(t)),
                None => sig3(x.and_ratio),
            },
            None => "-".into(),
        };
        rows.push([
            r.method.name().into(),
            r.backend.name().into(),
            r.mode.to_string(),
            r.n.to_string(),
            r.ell.to_string(),
            format!("GF(2^{})", r.field_degree),
            r.cost.ands.to_string(),
            r.cost.xors.to_string(),
            median,
            iqr,
            ratio,
        ]);
    }
    let widths: Vec<usize> = (0..HEADER.len()).map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
    let mut text = String::new();
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        writeln!(text, "{}", cells.join("  ").trim_end()).expect("write to String");
        if i == 0 {
            writeln!(text, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  ")).expect("write to String");
        }
    }
    let json_rows: Vec<Row> = records.iter().zip(rs).map(|(record, ratios)| Row { record, ratios }).collect();
    Table {
        text,
        json: serde_json::to_string_pretty(&json_rows).expect("records serialize"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig3_formats() {
        assert_eq!(sig3(2.0225), "2.02");
        assert_eq!(sig3(10.44), "10.4");
        assert_eq!(sig3(123.4), "123");
        assert_eq!(sig3(98765.0), "98800");
        assert_eq!(sig3(0.012345), "0.0123");
    }

    #[test]
    fn quartiles() {
        let w = WallStats::from_samples(&[5.0, 1.0, 3.0, 2.0, 4.0]).unwrap();
        assert_eq!((w.median_ns, w.q1_ns, w.q3_ns, w.min_ns), (3.0, 2.0, 4.0, 1.0));
    }

    #[test]
    fn method_mode_mismatch() {
        let q = ar_params(64).unwrap();
        assert!(count_expansion(Method::FullMulDodisSmith, &q, Backend::Schoolbook).is_err());
        let c = ExpansionParams::new(16, 8, Mode::Classical).unwrap();
        assert!(count_expansion(Method::FullMulAmbainisSmith, &c, Backend::Schoolbook).is_err());
    }

    #[test]
    fn too_few_reps_rejected() {
        let q = ar_params(64).unwrap();
        assert!(time_expansion(Method::AffineThisWork, &q, Backend::Karatsuba, 30, 0).is_err());
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = emit_table(&[]);
        assert_eq!(t.text.lines().count(), 2);
        assert_eq!(t.json, "[]");
    }
}
