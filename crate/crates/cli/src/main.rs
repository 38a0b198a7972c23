use arithstat_core::cache::{self, MonicCacheReader, MonicCacheWriter};
use arithstat_core::conjugacy::{rational_string, subgroup_pushforward, CycleType, GroupSpec};
use arithstat_core::cubicforms::{enumerate_cubic_fields, predicted_type_density_exact};
use arithstat_core::error::{Error, Result};
use arithstat_core::formspaces::{brute_force_pair_density, quintic_monte_carlo};
use arithstat_core::lowlying::{one_level_density, standard_theta, Symmetry};
use arithstat_core::massformula::{field_count_constant, local_density, local_mass};
use arithstat_core::monicfamily::{
    density_report, density_report_with, maximal_density_zp2, predicted_family_count, run_monic, FamilyRecord,
    MonicRunConfig, FORMAT_VERSION,
};
use arithstat_core::quaternion::{
    certify_degree, quaternion_one_level, twist_density_report, QuaternionFamily, QuaternionParams,
};
use arithstat_core::arith::primes_up_to;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "arithstat", version, about = "Splitting densities and low-lying zero statistics for families of number fields")]
struct Cli {
    /// Report format on standard output.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Accepts integers written as `100000` or `1e5`.
fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if f < 0.0 || f.fract() != 0.0 || f > 1.8e19 {
        return Err(format!("not a nonnegative integer: {s}"));
    }
    Ok(f as u64)
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate maximal monic polynomials of degree n by height.
    Monic {
        #[arg(long)]
        n: u32,
        #[arg(long, value_parser = parse_count)]
        x: u64,
        #[arg(long, default_value_t = 97)]
        pmax: u64,
        /// Trial-division bound for discriminant factorization.
        #[arg(long, default_value_t = 1_000_000)]
        trial_bound: u64,
        /// Cache file for the kept records.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate cubic fields with |disc| < x from reduced binary cubic forms.
    Cubic {
        #[arg(long, value_parser = parse_count)]
        x: u64,
        #[arg(long, default_value_t = 97)]
        pmax: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Splitting densities at p from a family cache.
    Density {
        #[arg(long)]
        cache: PathBuf,
        #[arg(long)]
        p: u64,
    },
    /// Explicit-formula one-level density from a family cache.
    Onelevel {
        #[arg(long)]
        cache: PathBuf,
        #[arg(long, default_value_t = 0.25)]
        sigma: f64,
        #[arg(long, default_value = "sp")]
        symmetry: String,
    },
    /// Exhaustive splitting densities of pairs of ternary forms over F_p.
    Pairdensity {
        #[arg(long)]
        p: u64,
    },
    /// Monte Carlo splitting densities of Pfaffian quintic schemes over F_p.
    QuinticMc {
        #[arg(long)]
        p: u64,
        #[arg(long, value_parser = parse_count)]
        samples: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Local mass densities and the field-count constant.
    Mass {
        #[arg(long)]
        n: u32,
        #[arg(long, value_parser = parse_count, default_value = "1000")]
        pmax: u64,
    },
    /// Sato-Tate measure and indicators of a monodromy group.
    Group {
        /// `S<n>`, `C3_in_S3`, `S2_in_S3`, `D4_in_S4`, `Q8`, or `perm:<n>:<img>|<img>`.
        #[arg(long)]
        spec: String,
    },
    /// Quaternionic twist family over Q(√a, √b).
    Quaternion {
        #[arg(long)]
        a: i64,
        #[arg(long)]
        b: i64,
        #[arg(long, value_parser = parse_count)]
        qmax: u64,
        #[arg(long, default_value_t = 0.25)]
        sigma: f64,
        /// Denominator bound for the three-square search.
        #[arg(long, default_value_t = 8)]
        dmax: u32,
        /// Largest prime in the density table and the per-twist cache.
        #[arg(long, default_value_t = 100)]
        pmax: u64,
        /// Per-twist CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Share of monic polynomials mod p^2 that are maximal at p.
    #[command(name = "bruteforce-zp2")]
    BruteforceZp2 {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: u64,
    },
}

fn threads() -> usize {
    std::env::var("ARITHSTAT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn envelope(command: &str, config: Value, report: Value) -> Value {
    json!({ "format_version": FORMAT_VERSION, "command": command, "config": config, "report": report })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::InvalidInput(format!("cannot open {}: {e}", path.display())))
}

fn require_prime(p: u64) -> Result<()> {
    if arithstat_core::arith::is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{p} is not prime")))
    }
}

fn run(cmd: &Command) -> Result<Value> {
    let threads = threads();
    match cmd {
        Command::Monic { n, x, pmax, trial_bound, out } => {
            let mut cfg = MonicRunConfig::new(*n, *x, *pmax);
            cfg.trial_bound = *trial_bound;
            cfg.threads = threads;
            let config = json!({ "n": n, "x": x, "pmax": pmax, "trial_bound": trial_bound });
            let summary = match out {
                Some(path) => {
                    let mut w = MonicCacheWriter::new(create(path)?, &config.to_string(), *n, &cfg.primes)?;
                    let mut failed = None;
                    let mut sink = |r: FamilyRecord| {
                        if failed.is_none() {
                            failed = w.write(&r).err();
                        }
                    };
                    let s = run_monic(&cfg, Some(&mut sink))?;
                    if let Some(e) = failed {
                        return Err(e);
                    }
                    w.finish()?;
                    s
                }
                None => run_monic(&cfg, None)?,
            };
            let predicted = predicted_family_count(*n, *x as f64);
            let report = json!({
                "family_size": summary.stats.total,
                "counters": to_value(&summary.counters),
                "predicted_count": predicted,
                "ratio": summary.stats.total as f64 / predicted,
                "mean_log_conductor": summary.stats.mean_log_conductor(),
            });
            Ok(envelope("monic", config, report))
        }
        Command::Cubic { x, pmax, out } => {
            let primes = primes_up_to(*pmax);
            let tab = enumerate_cubic_fields(*x, &primes, threads)?;
            let config = json!({ "x": x, "pmax": pmax });
            if let Some(path) = out {
                let mut w = create(path)?;
                writeln!(w, "{}", cache::version_line("cubic", &config.to_string()))?;
                tab.write_csv(&mut w)?;
                w.flush()?;
            }
            let positive = tab.records.iter().filter(|r| r.disc > 0).count();
            let report = json!({
                "fields": tab.count(),
                "positive": positive,
                "negative": tab.count() - positive,
                "mean_log_conductor": tab.stats().mean_log_conductor(),
            });
            Ok(envelope("cubic", config, report))
        }
        Command::Density { cache: path, p } => {
            require_prime(*p)?;
            let (meta, stats) = load_stats(path)?;
            let meta_cfg: Value = serde_json::from_str(&meta.config).unwrap_or(Value::Null);
            let x = meta_cfg.get("x").and_then(Value::as_u64).unwrap_or(0);
            let report = match meta.kind.as_str() {
                "cubic" => density_report_with(&stats, x, *p, |t: &CycleType| predicted_type_density_exact(*p, t))?,
                _ => density_report(&stats, x, *p)?,
            };
            let mut r = to_value(&report);
            r["max_z"] = json!(report.max_z());
            Ok(envelope("density", json!({ "cache": path, "p": p, "family": meta.kind, "family_config": meta_cfg }), r))
        }
        Command::Onelevel { cache: path, sigma, symmetry } => {
            let sym: Symmetry = symmetry.parse()?;
            let (meta, stats) = load_stats(path)?;
            let meta_cfg: Value = serde_json::from_str(&meta.config).unwrap_or(Value::Null);
            let x = meta_cfg.get("x").and_then(Value::as_f64).unwrap_or(0.0);
            let report = one_level_density(&stats, x, *sigma, sym, &standard_theta)?;
            let config = json!({ "cache": path, "sigma": sigma, "symmetry": sym.to_string(), "family": meta.kind, "family_config": meta_cfg });
            Ok(envelope("onelevel", config, to_value(&report)))
        }
        Command::Pairdensity { p } => {
            let report = brute_force_pair_density(*p, threads)?;
            Ok(envelope("pairdensity", json!({ "p": p }), to_value(&report)))
        }
        Command::QuinticMc { p, samples, seed } => {
            let report = quintic_monte_carlo(*p, *samples, *seed, threads)?;
            Ok(envelope("quintic-mc", json!({ "p": p, "samples": samples, "seed": seed }), to_value(&report)))
        }
        Command::Mass { n, pmax } => {
            let table = local_density(*n)?;
            let constant = field_count_constant(*n, *pmax)?;
            let masses: Vec<Value> = primes_up_to(13)
                .into_iter()
                .map(|p| Ok(json!({ "p": p, "local_mass": rational_string(&local_mass(*n, p)?), "d_p": rational_string(&table.eval(p)) })))
                .collect::<Result<_>>()?;
            let report = json!({
                "d_p_coefficients": table.coefficients,
                "small_primes": masses,
                "constant": to_value(&constant),
            });
            Ok(envelope("mass", json!({ "n": n, "pmax": pmax }), report))
        }
        Command::Group { spec } => {
            let g = GroupSpec::parse(spec)?;
            let mu = subgroup_pushforward(&g)?;
            let ind = mu.indicators()?;
            let atoms: Vec<Value> = mu
                .atoms
                .iter()
                .map(|(pt, m)| json!({ "point": pt.to_string(), "mass": rational_string(m) }))
                .collect();
            let report = json!({
                "dim": mu.dim,
                "atoms": atoms,
                "i1": rational_string(&ind.i1),
                "i2": rational_string(&ind.i2),
                "i3": rational_string(&ind.i3),
            });
            Ok(envelope("group", json!({ "spec": spec }), report))
        }
        Command::Quaternion { a, b, qmax, sigma, dmax, pmax, out } => {
            let params = QuaternionParams::new(*a, *b, *dmax)?;
            let cert = certify_degree(&params, 3)?;
            let fam = QuaternionFamily::new(params.clone(), *pmax)?;
            let config = json!({ "a": a, "b": b, "qmax": qmax, "sigma": sigma, "dmax": dmax, "pmax": pmax });
            if let Some(path) = out {
                let mut w = create(path)?;
                writeln!(w, "{}", cache::version_line("quaternion", &config.to_string()))?;
                let mut header = String::from("q,conductor,alpha");
                for p in fam.primes() {
                    header.push_str(&format!(",p{p}"));
                }
                writeln!(w, "{header}")?;
                for rec in fam.enumerate_twists(*qmax) {
                    let rec = rec?;
                    write!(w, "{},{},{}", rec.q, rec.conductor, rec.alpha)?;
                    for s in rec.splitting.values() {
                        write!(w, ",{s}")?;
                    }
                    writeln!(w)?;
                }
                w.flush()?;
            }
            let densities = twist_density_report(&fam, *qmax, *pmax, threads)?;
            let one_level = quaternion_one_level(&params, *qmax, *sigma, threads)?;
            let report = json!({
                "params": to_value(&params),
                "degree_certificate": to_value(&cert),
                "densities": to_value(&densities),
                "one_level": to_value(&one_level.report),
            });
            Ok(envelope("quaternion", config, report))
        }
        Command::BruteforceZp2 { n, p } => {
            require_prime(*p)?;
            let d = maximal_density_zp2(*n, *p)?;
            let p2 = num_rational_string(*p);
            let report = json!({
                "density": rational_string(&d),
                "predicted": p2,
                "matches": rational_string(&d) == p2,
            });
            Ok(envelope("bruteforce-zp2", json!({ "n": n, "p": p }), report))
        }
    }
}

/// `1 − 1/p²` as `num/den`.
fn num_rational_string(p: u64) -> String {
    let d = p as u128 * p as u128;
    format!("{}/{}", d - 1, d)
}

fn load_stats(path: &Path) -> Result<(cache::CacheMeta, arithstat_core::family::FamilyStats)> {
    let mut input = open(path)?;
    let meta = cache::read_meta(&mut input)?;
    let stats = match meta.kind.as_str() {
        "monic" => cache::monic_cache_stats(MonicCacheReader::new(input)?)?,
        "cubic" => cache::cubic_cache_stats(input)?,
        k => return Err(Error::InvalidInput(format!("cache kind {k} has no family statistics"))),
    };
    Ok((meta, stats))
}

/// Scalar leaves of a JSON value as `path,value` lines.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, out)),
        Value::String(s) => out.push((prefix.into(), s.clone())),
        other => out.push((prefix.into(), other.to_string())),
    }
}

fn emit(v: &Value, format: Format) -> Result<()> {
    match write_report(v, format) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn write_report(v: &Value, format: Format) -> std::io::Result<()> {
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    match format {
        Format::Json => writeln!(w, "{}", serde_json::to_string_pretty(v).expect("json"))?,
        Format::Csv => {
            let mut rows = Vec::new();
            flatten("", v, &mut rows);
            writeln!(w, "key,value")?;
            for (k, val) in rows {
                let val = if val.contains(',') || val.contains('"') { format!("\"{}\"", val.replace('"', "\"\"")) } else { val };
                writeln!(w, "{k},{val}")?;
            }
        }
    }
    w.flush()
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    eprintln!("{}", json!({ "error": kind, "message": message }));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            return fail("InvalidInput", e.to_string().trim(), 1);
        }
    };
    let format = if cli.json { Format::Json } else { cli.format };
    match run(&cli.command).and_then(|v| emit(&v, format)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), &e.to_string(), if e.is_invariant_violation() { 2 } else { 1 }),
    }
}
