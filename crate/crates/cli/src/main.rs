//! `necklace`: enumerate necklaces, verify the sum rules, solve well spectra
//! and compare smoothed densities.
//!
//! Exit codes: 0 on success, 1 when an identity fails to verify, 2 on a
//! usage, configuration or I/O error.

mod manifest;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::json;

use necklace_core::algebra::parse_rational;
use necklace_core::identities::{
    poisson_case_check, verify_binomial_identity, verify_parity, verify_weighted_identities,
    verify_weighted_identity, verify_weighted_sum, IdentityReport,
};
use necklace_core::necklaces::{
    count_necklaces, count_prime_necklaces, enumerate_necklaces, enumerate_prime_necklaces,
    NecklaceRow,
};
use necklace_core::spectral::{
    compare_densities, make_config, solve_spectrum_chebyshev, solve_spectrum_scan,
    DensityComparison, Spectrum, WellConfig,
};

use manifest::RunManifest;

#[derive(Parser)]
#[command(name = "necklace", version, about)]
struct Cli {
    /// Directory for spectrum and density files and the run manifest.
    #[arg(long, global = true, env = "NECKLACE_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Scan,
    Chebyshev,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Identity {
    /// Parity sum rule over all necklaces of length `m`.
    Parity,
    /// Binomial refinement of the even-length rule, length `2m`.
    Binomial,
    /// Weighted refinement, one check per power `s` of `r`.
    Weighted,
    /// Weighted-length sum rule against its closed form.
    WeightedSum,
    /// Collapse onto the single orbit `LR` when the step sits at the wall.
    Poisson,
}

#[derive(Subcommand)]
enum Command {
    /// List or count binary necklaces of a given length.
    Necklaces {
        length: usize,
        #[arg(long, conflicts_with = "stats")]
        count_only: bool,
        #[arg(long)]
        prime_only: bool,
        /// Table with primitive, repetition index and orbit statistics.
        #[arg(long)]
        stats: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Check an identity exactly and print the report.
    Verify {
        identity: Identity,
        m: Option<usize>,
        s: Option<usize>,
    },
    /// Solve for the roots up to `k_max` and write them to the output directory.
    Spectrum {
        #[arg(value_parser = parse_real)]
        a: f64,
        /// Step strength; fractions such as `8/9` are accepted.
        #[arg(value_parser = parse_real)]
        lambda: f64,
        #[arg(value_parser = parse_real)]
        k_max: f64,
        #[arg(long, value_enum, default_value = "scan")]
        method: Method,
        #[arg(long, required_if_eq("method", "chebyshev"))]
        p: Option<u32>,
        #[arg(long, required_if_eq("method", "chebyshev"))]
        q: Option<u32>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Compare root-based and orbit-based smoothed densities.
    Density {
        #[arg(value_parser = parse_real)]
        a: f64,
        #[arg(value_parser = parse_real)]
        lambda: f64,
        #[arg(value_parser = parse_real)]
        k_min: f64,
        #[arg(value_parser = parse_real)]
        k_max: f64,
        #[arg(value_parser = parse_real)]
        sigma: f64,
        /// Longest primitive orbit; chosen from the truncation bound if omitted.
        max_length: Option<usize>,
    },
}

/// Accepts decimals and exact fractions.
fn parse_real(s: &str) -> Result<f64, String> {
    if s.contains('/') {
        let q = parse_rational(s).map_err(|e| e.to_string())?;
        q.to_f64().ok_or_else(|| format!("{s} is out of range"))
    } else {
        s.trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}"))
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Falsified,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Necklaces {
            length,
            count_only,
            prime_only,
            stats,
            format,
        } => cmd_necklaces(length, count_only, prime_only, stats, format),
        Command::Verify { identity, m, s } => cmd_verify(identity, m, s),
        Command::Spectrum {
            a,
            lambda,
            k_max,
            method,
            p,
            q,
            format,
        } => cmd_spectrum(&cli.out_dir, a, lambda, k_max, method, p.zip(q), format),
        Command::Density {
            a,
            lambda,
            k_min,
            k_max,
            sigma,
            max_length,
        } => cmd_density(&cli.out_dir, a, lambda, k_min, k_max, sigma, max_length),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Falsified) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn print_json<T: Serialize + ?Sized>(value: &T) -> CmdResult {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// Shortest round-trip form, switching to exponent notation for tiny values.
fn fmt_real(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn cmd_necklaces(
    length: usize,
    count_only: bool,
    prime_only: bool,
    stats: bool,
    format: Format,
) -> CmdResult {
    if count_only {
        let count = if prime_only {
            count_prime_necklaces(length)?
        } else {
            count_necklaces(length)?
        };
        println!("{count}");
        return Ok(());
    }
    let words = if prime_only {
        enumerate_prime_necklaces(length)?
    } else {
        enumerate_necklaces(length)?
    };
    match (stats, format) {
        (false, Format::Json) => print_json(&words),
        (false, Format::Csv) => {
            let mut w = csv_writer(io::stdout().lock());
            w.write_record(["necklace"])?;
            for word in &words {
                w.write_record([word.to_string()])?;
            }
            w.flush()?;
            Ok(())
        }
        (true, format) => {
            let rows: Vec<NecklaceRow> = words.into_iter().map(NecklaceRow::new).collect();
            if format == Format::Json {
                return print_json(&rows);
            }
            let mut w = csv_writer(io::stdout().lock());
            w.write_record([
                "necklace", "primitive", "nu", "n_L", "n_R", "n", "alpha", "beta", "gamma", "chi",
            ])?;
            for row in &rows {
                let s = row.stats;
                let fields = [s.n_l, s.n_r, s.n, s.alpha, s.beta, s.gamma, s.chi];
                let mut record = vec![
                    row.necklace.to_string(),
                    row.primitive.to_string(),
                    row.nu.to_string(),
                ];
                record.extend(fields.iter().map(usize::to_string));
                w.write_record(&record)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn identity_reports(identity: Identity, m: Option<usize>, s: Option<usize>) -> Result<Vec<IdentityReport>, Failure> {
    if identity == Identity::Poisson {
        if m.is_some() {
            return Err(Failure::Usage("poisson takes no parameters".into()));
        }
        return Ok(vec![poisson_case_check()]);
    }
    let m = m.ok_or_else(|| Failure::Usage("missing parameter m".into()))?;
    let single = |what: &str| match s {
        Some(_) => Err(Failure::Usage(format!("{what} takes no parameter s"))),
        None => Ok(()),
    };
    Ok(match identity {
        Identity::Parity => {
            single("parity")?;
            vec![verify_parity(m)?]
        }
        Identity::WeightedSum => {
            single("weighted-sum")?;
            vec![verify_weighted_sum(m)?]
        }
        Identity::Binomial => {
            let all = verify_binomial_identity(m)?;
            match s {
                None => all,
                Some(s) if s <= m => vec![all[s].clone()],
                Some(s) => return Err(Failure::Usage(format!("s = {s} exceeds m = {m}"))),
            }
        }
        Identity::Weighted => match s {
            None => verify_weighted_identities(m)?,
            Some(s) => vec![verify_weighted_identity(m, s)?],
        },
        Identity::Poisson => unreachable!(),
    })
}

/// Prints the LHS − RHS difference of every failed report to stderr.
fn check_reports(reports: &[IdentityReport]) -> CmdResult {
    let mut ok = true;
    for r in reports.iter().filter(|r| !r.verified) {
        ok = false;
        eprintln!(
            "falsified: {:?} {:?}: lhs = {}, rhs = {}, lhs - rhs = {}",
            r.identity,
            r.params,
            r.lhs,
            r.rhs,
            r.lhs.difference(&r.rhs)
        );
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Falsified)
    }
}

fn cmd_verify(identity: Identity, m: Option<usize>, s: Option<usize>) -> CmdResult {
    let reports = identity_reports(identity, m, s)?;
    if let [one] = &reports[..] {
        print_json(one)?;
    } else {
        print_json(&reports)?;
    }
    check_reports(&reports)
}

/// Frequency `ω` with `ω₁ = pω` and `ω₂ = qω`, if the geometry allows it.
fn commensurate_frequency(config: &WellConfig, p: u32, q: u32) -> Result<f64, Failure> {
    let omega = config.omega1 / f64::from(p);
    if (config.omega2 - f64::from(q) * omega).abs() > 1e-5 * config.omega1 {
        return Err(Failure::Usage(format!(
            "sigma_L - sigma_R = {} is not {q}/{p} of sigma_L + sigma_R = {}",
            config.omega2, config.omega1
        )));
    }
    Ok(omega)
}

#[derive(Serialize)]
struct SpectrumFile<'a> {
    #[serde(flatten)]
    spectrum: &'a Spectrum,
    residuals: Vec<f64>,
}

fn cmd_spectrum(
    out_dir: &Path,
    a: f64,
    lambda: f64,
    k_max: f64,
    method: Method,
    pq: Option<(u32, u32)>,
    format: Format,
) -> CmdResult {
    let config = make_config(a, lambda)?;
    let spectrum = match (method, pq) {
        (Method::Scan, _) => solve_spectrum_scan(&config, k_max)?,
        (Method::Chebyshev, Some((p, q))) => {
            let omega = commensurate_frequency(&config, p, q)?;
            let mut s = solve_spectrum_chebyshev(p, q, config.r, omega, k_max)?;
            s.config = Some(config);
            s
        }
        (Method::Chebyshev, None) => return Err(Failure::Usage("chebyshev needs --p and --q".into())),
    };
    fs::create_dir_all(out_dir)?;
    let residuals = spectrum.residuals();
    let path = match format {
        Format::Json => {
            let path = out_dir.join("spectrum.json");
            let file = SpectrumFile {
                spectrum: &spectrum,
                residuals: residuals.clone(),
            };
            fs::write(&path, serde_json::to_string_pretty(&file)? + "\n")?;
            path
        }
        Format::Csv => {
            let path = out_dir.join("spectrum.csv");
            let mut w = csv_writer(fs::File::create(&path)?);
            w.write_record(["index", "k", "residual"])?;
            for (i, (k, res)) in spectrum.roots.iter().zip(&residuals).enumerate() {
                w.write_record([(i + 1).to_string(), fmt_real(*k), fmt_real(*res)])?;
            }
            w.flush()?;
            path
        }
    };
    let method_name = match method {
        Method::Scan => "scan",
        Method::Chebyshev => "chebyshev",
    };
    let mut parameters = json!({
        "a": a, "lambda": lambda, "k_max": k_max, "method": method_name,
        "format": if format == Format::Json { "json" } else { "csv" },
    });
    if let Some((p, q)) = pq {
        parameters["p"] = json!(p);
        parameters["q"] = json!(q);
    }
    RunManifest::new("spectrum", parameters, vec![path.clone()]).append(out_dir)?;
    print_json(&json!({
        "roots": spectrum.len(),
        "levels": spectrum.level_count(),
        "max_residual": spectrum.max_residual(),
        "output": path,
    }))
}

#[allow(clippy::too_many_arguments)]
fn cmd_density(
    out_dir: &Path,
    a: f64,
    lambda: f64,
    k_min: f64,
    k_max: f64,
    sigma: f64,
    max_length: Option<usize>,
) -> CmdResult {
    let config = make_config(a, lambda)?;
    let cmp: DensityComparison = compare_densities(&config, k_min, k_max, sigma, max_length)?;
    fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join("density.csv");
    let mut w = csv_writer(fs::File::create(&csv_path)?);
    w.write_record(["k", "exact", "trace", "diff"])?;
    for i in 0..cmp.k.len() {
        w.write_record([cmp.k[i], cmp.exact[i], cmp.trace[i], cmp.diff[i]].map(fmt_real))?;
    }
    w.flush()?;
    let summary_path = out_dir.join("density_summary.json");
    let summary = cmp.summary();
    fs::write(&summary_path, serde_json::to_string_pretty(&summary)? + "\n")?;
    let parameters = json!({
        "a": a, "lambda": lambda, "k_min": k_min, "k_max": k_max,
        "sigma": sigma, "max_length": max_length,
    });
    RunManifest::new("density", parameters, vec![csv_path, summary_path]).append(out_dir)?;
    print_json(&summary)
}
