//! Command-line surface. Every computation module is reachable through a
//! subcommand; output is deterministic (fixed default seeds, fixed formats)
//! so identical invocations produce byte-identical stdout.
//!
//! Exit codes: 0 success, 1 domain error, 2 parse/IO/usage error, 3 internal
//! consistency violation (a verified numeric claim failed).

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::{bounds, census, discrepancy, haar, pointset, verify};

/// Default seed for operations that consume randomness but were not given
/// `--seed`.
const DEFAULT_SEED: u64 = 0;

/// Formats a scalar with 12 significant digits.
fn sig(x: f64) -> String {
    format!("{:.11e}", x)
}

#[derive(Parser, Debug)]
#[command(
    name = "l2disc",
    version,
    about = "L2-discrepancy of planar point sets: exact norms, Haar coefficients, dyadic censuses, and verified bound constants",
    after_help = "Point-set files hold one point per line: two whitespace-separated \
fields, each a decimal in [0,1) or an exact rational p/q. Lines starting \
with # are ignored. CSV outputs carry a header row; scalars print with 12 \
significant digits."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Hammersley,
    Fibonacci,
    Random,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated point set to a file.
    Generate {
        #[arg(long, value_enum)]
        family: Family,
        /// Size parameter: hammersley exponent (2^n points) or random count.
        #[arg(long)]
        n: Option<u64>,
        /// Fibonacci index k (F_k points, F_1 = F_2 = 1).
        #[arg(long)]
        k: Option<u32>,
        /// Seed for the random family (default 0).
        #[arg(long)]
        seed: Option<u64>,
        /// Also include the reflection (x, 1-y) of every Fibonacci point.
        #[arg(long)]
        symmetrize: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Squared L2 norm of the discrepancy function, with optional exact value
    /// and Monte Carlo cross-check.
    L2 {
        #[arg(long = "in")]
        input: PathBuf,
        /// Also print the exact rational value.
        #[arg(long)]
        exact: bool,
        /// Monte Carlo sample count for the oracle estimate.
        #[arg(long)]
        oracle_samples: Option<u64>,
        /// Seed for the oracle (default 0).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Truncated Parseval sums per level, with optional coefficient dump.
    Haar {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        level: u32,
        /// Write every coefficient with level <= LEVEL as CSV
        /// (j1,j2,m1,m2,mu,derivation); row count grows like 4^level.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Occupancy and type censuses with exact identity checks.
    Census {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        level: u32,
    },
    /// Both sides of the master lower-bound inequality and the chain check.
    Master {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Bound constants with certificates, and an optional kappa-table CSV.
    Bounds {
        /// Grid intervals for the kappa table (default 512).
        #[arg(long)]
        grid: Option<usize>,
        /// Write the kappa table (kappa,h,gamma,gamma_branch,delta) here.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Run the full property battery; one pass/fail line per check.
    Verify,
}

/// Parses `argv` and runs the selected subcommand, writing results to `out`
/// and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap treats --help/--version as "errors" with success status
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 2;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut impl Write) -> Result<i32> {
    match command {
        Command::Generate {
            family,
            n,
            k,
            seed,
            symmetrize,
            out: path,
        } => {
            let set = match family {
                Family::Hammersley => {
                    let n = n.ok_or_else(|| Error::domain("--family hammersley needs --n"))?;
                    let n = u32::try_from(n)
                        .map_err(|_| Error::size_limit(format!("hammersley n = {} > 30", n)))?;
                    pointset::hammersley(n)?
                }
                Family::Fibonacci => {
                    let k = k.ok_or_else(|| Error::domain("--family fibonacci needs --k"))?;
                    pointset::fibonacci_lattice(k, symmetrize)?
                }
                Family::Random => {
                    let n = n.ok_or_else(|| Error::domain("--family random needs --n"))?;
                    pointset::random_uniform(n as usize, seed.unwrap_or(DEFAULT_SEED))?
                }
            };
            pointset::save(&set, &path)?;
            writeln!(out, "wrote {} points to {}", set.len(), path.display())?;
            Ok(0)
        }

        Command::L2 {
            input,
            exact,
            oracle_samples,
            seed,
        } => {
            let set = pointset::load(&input)?;
            let l2 = discrepancy::l2_squared(&set);
            writeln!(out, "n: {}", set.len())?;
            writeln!(out, "l2_squared: {}", sig(l2))?;
            writeln!(out, "l2: {}", sig(l2.sqrt()))?;
            if set.len() >= 2 {
                writeln!(
                    out,
                    "normalized_ratio: {}",
                    sig(discrepancy::normalized_ratio(&set)?)
                )?;
            } else {
                writeln!(out, "normalized_ratio: n/a (n < 2)")?;
            }
            if exact {
                let value = discrepancy::l2_squared_exact(&set);
                writeln!(out, "l2_squared_exact: {}/{}", value.numer(), value.denom())?;
            }
            if let Some(samples) = oracle_samples {
                let est = discrepancy::l2_oracle(&set, samples, seed.unwrap_or(DEFAULT_SEED))?;
                writeln!(
                    out,
                    "oracle_estimate: {} +/- {} ({} samples)",
                    sig(est.estimate),
                    sig(est.std_error),
                    est.samples
                )?;
            }
            Ok(0)
        }

        Command::Haar { input, level, dump } => {
            let set = pointset::load(&input)?;
            let profile = haar::parseval_profile(&set, level)?;
            let l2 = discrepancy::l2_squared(&set);
            writeln!(out, "n: {}", set.len())?;
            writeln!(out, "l2_squared: {}", sig(l2))?;
            writeln!(out, "level,contribution,cumulative")?;
            for c in &profile {
                writeln!(
                    out,
                    "{},{},{}",
                    c.level,
                    sig(c.contribution),
                    sig(c.cumulative)
                )?;
            }
            let partial = profile.last().map(|c| c.cumulative).unwrap_or(0.0);
            writeln!(out, "residual: {}", sig(l2 - partial))?;
            if let Some(path) = dump {
                let mut writer = BufWriter::new(File::create(&path)?);
                haar::write_coefficient_csv(&set, level, &mut writer)?;
                writer.flush()?;
                writeln!(out, "wrote coefficient dump to {}", path.display())?;
            }
            Ok(0)
        }

        Command::Census { input, level } => {
            let set = pointset::load(&input)?;
            let n = set.len();
            writeln!(out, "n: {}", n)?;
            let mut censuses = Vec::with_capacity(level as usize + 1);
            for l in 0..=level {
                censuses.push(census::level_census(&set, l)?);
            }
            writeln!(out, "level,r,a_r")?;
            for c in &censuses {
                for (r, count) in c.counts() {
                    writeln!(out, "{},{},{}", c.level(), r, count)?;
                }
            }
            writeln!(out, "level,b0,b1,b2")?;
            for c in &censuses {
                if let Some(t) = c.types() {
                    writeln!(out, "{},{},{},{}", c.level(), t.b0, t.b1, t.b2)?;
                }
            }
            let mut failures = Vec::new();
            for c in &censuses {
                match c.check_identities(n) {
                    Ok(()) => writeln!(out, "identities level {}: PASS", c.level())?,
                    Err(e) => {
                        writeln!(out, "identities level {}: FAIL", c.level())?;
                        failures.push(e.to_string());
                    }
                }
            }
            for pair in censuses.windows(2) {
                match census::check_adjacent_levels(&pair[0], &pair[1]) {
                    Ok(()) => writeln!(
                        out,
                        "identities levels {}->{}: PASS",
                        pair[0].level(),
                        pair[1].level()
                    )?,
                    Err(e) => {
                        writeln!(
                            out,
                            "identities levels {}->{}: FAIL",
                            pair[0].level(),
                            pair[1].level()
                        )?;
                        failures.push(e.to_string());
                    }
                }
            }
            if failures.is_empty() {
                writeln!(out, "all identities: PASS")?;
                Ok(0)
            } else {
                writeln!(out, "all identities: FAIL")?;
                Err(Error::inconsistency(failures.join("; ")))
            }
        }

        Command::Master { input } => {
            let set = pointset::load(&input)?;
            let l2 = discrepancy::l2_squared(&set);
            let parts = census::master_parts(&set)?;
            let master = parts.total();
            let baseline = census::baseline_rhs(&set)?;
            writeln!(out, "n: {}", set.len())?;
            writeln!(out, "exponent: {}", parts.split.exponent)?;
            writeln!(out, "kappa: {}", sig(parts.split.kappa))?;
            writeln!(out, "l2_squared: {}", sig(l2))?;
            writeln!(out, "master_rhs: {}", sig(master))?;
            writeln!(out, "  empty_exact (levels 0..={}): {}", parts.cut_level, sig(parts.empty_exact))?;
            writeln!(out, "  empty_tail: {}", sig(parts.empty_tail))?;
            writeln!(out, "  base_bundles: {}", sig(parts.base_bundles))?;
            writeln!(out, "  weighted_bundles: {}", sig(parts.weighted_bundles))?;
            writeln!(out, "baseline_rhs: {}", sig(baseline))?;
            let tol = 1e-12 * master.abs().max(1.0);
            let chain1 = l2 >= master - tol;
            let chain2 = master >= baseline - 1e-12;
            writeln!(
                out,
                "chain l2 >= master: {} (slack {})",
                if chain1 { "PASS" } else { "FAIL" },
                sig(l2 - master)
            )?;
            writeln!(
                out,
                "chain master >= baseline: {} (slack {})",
                if chain2 { "PASS" } else { "FAIL" },
                sig(master - baseline)
            )?;
            if chain1 && chain2 {
                Ok(0)
            } else {
                Err(Error::inconsistency(
                    "master inequality chain violated".to_string(),
                ))
            }
        }

        Command::Bounds { grid, table } => {
            let report = bounds::extremal_constants()?;
            writeln!(
                out,
                "delta_min_exact: {}/{}",
                report.delta_min_exact.numer(),
                report.delta_min_exact.denom()
            )?;
            writeln!(out, "delta_min: {}", sig(report.delta_min))?;
            writeln!(out, "c_bar_lower: {}", sig(report.c_bar_lower))?;
            writeln!(out, "delta_max: {}", sig(report.delta_max))?;
            writeln!(out, "b_bar_lower: {}", sig(report.b_bar_lower))?;
            writeln!(out, "kappa0: {}", sig(report.kappa0))?;
            writeln!(out, "branch_crossover: {}", sig(report.branch_crossover))?;
            writeln!(
                out,
                "shape_certificate: {} rising then {} falling steps on {} grid points",
                report.shape.rising_steps, report.shape.falling_steps, report.grid_points
            )?;
            writeln!(out, "baseline_c_bar: {}", sig(report.baseline_c_bar))?;
            writeln!(out, "baseline_b_bar: {}", sig(report.baseline_b_bar))?;
            let baseline = bounds::baseline_constants();
            writeln!(
                out,
                "baseline_profile_at_one: {}/{}",
                baseline.profile_at_one.numer(),
                baseline.profile_at_one.denom()
            )?;
            writeln!(
                out,
                "baseline_profile_max: {}/{} at y = {}/{}",
                baseline.profile_max.numer(),
                baseline.profile_max.denom(),
                baseline.argmax.numer(),
                baseline.argmax.denom()
            )?;
            if let Some(path) = table {
                let t = bounds::kappa_table(grid.unwrap_or(512))?;
                let mut writer = BufWriter::new(File::create(&path)?);
                bounds::write_kappa_csv(&t, &mut writer)?;
                writer.flush()?;
                writeln!(out, "wrote kappa table to {}", path.display())?;
            }
            Ok(0)
        }

        Command::Verify => {
            if verify::run_battery(out)? {
                Ok(0)
            } else {
                Err(Error::inconsistency("property battery failed".to_string()))
            }
        }
    }
}
