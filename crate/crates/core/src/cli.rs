//! The `ia` command line.
//!
//! Exit codes: 0 success, 1 verification failed, 2 usage error, 3 domain
//! error (message names the error variant).

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::channel::generate_channels;
use crate::construct3::{self, enumerate_square_solutions, path_parameter, solve_square, solve_three_user};
use crate::error::{Error, Result};
use crate::feasibility::{assess, best_subset_dof, decide_3user_symmetric, max_dof_fully_symmetric};
use crate::io::{read_channels, read_strategy, write_channels, ChannelFile, StrategyFile};
use crate::numsolve::{find_distinct_solutions, solve_newton, NewtonOptions};
use crate::schubert::{count_solutions_with, existence_witness, CountOptions};
use crate::spec::ProblemSpec;
use crate::verify::{check_orthogonality, DEFAULT_TOL};

#[derive(Debug, Parser)]
#[command(name = "ia", version, about = "Interference alignment feasibility, construction and counting")]
pub struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// Symmetric problem parameters, or a spec file.
#[derive(Debug, clap::Args)]
pub struct SpecArgs {
    /// JSON problem spec (`{"K": .., "users": [{"M", "N", "d"}, ..]}`).
    #[arg(long, conflicts_with_all = ["k", "m", "n", "d"])]
    pub spec: Option<PathBuf>,
    #[arg(long = "K")]
    pub k: Option<usize>,
    #[arg(long = "M")]
    pub m: Option<usize>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
}

impl SpecArgs {
    fn load(&self) -> Result<ProblemSpec> {
        if let Some(path) = &self.spec {
            return Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?);
        }
        match (self.k, self.m, self.n, self.d) {
            (Some(k), Some(m), Some(n), Some(d)) => ProblemSpec::symmetric(k, m, n, d),
            _ => Err(Error::InvalidSpec("pass --spec FILE or all of --K --M --N --d".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Eigen method for M = N, alignment paths otherwise (three users), Newton for K > 3.
    Auto,
    Eigen,
    Paths,
    Newton,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw random complex Gaussian channels.
    GenChannels {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Feasibility verdict with certificates.
    Feasibility {
        #[command(flatten)]
        spec: SpecArgs,
        /// Also check every admissible alignment-path bound.
        #[arg(long)]
        all_path_bounds: bool,
        /// Longest path parameter r to check with --all-path-bounds.
        #[arg(long, default_value_t = 3)]
        max_r: usize,
    },
    /// Compute an alignment strategy.
    Solve {
        #[arg(long)]
        channels: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        /// Eigenvector indices for the eigen method, e.g. `0,2`.
        #[arg(long, value_delimiter = ',')]
        selection: Option<Vec<usize>>,
        /// Emit every distinct eigen-method solution.
        #[arg(long)]
        enumerate: bool,
        #[arg(long, default_value_t = 100)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a strategy against channels; exit 0 iff it passes.
    Verify {
        #[arg(long)]
        channels: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Exact number of solutions with M = N.
    Count {
        #[arg(long = "K")]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long = "N")]
        n: usize,
        /// Largest number of live terms.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Nonvanishing term of the incidence product showing existence.
    Witness {
        #[arg(long = "K")]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long = "N")]
        n: usize,
    },
    /// Distinct Newton solutions from many random starts.
    Enumerate {
        #[arg(long)]
        channels: PathBuf,
        #[arg(long, default_value_t = 1000)]
        attempts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Degrees of freedom with K users of N antennas.
    Dof {
        #[arg(long = "K")]
        k: usize,
        #[arg(long = "N")]
        n: usize,
    },
    /// Three-user feasible region over (M, N) for fixed d.
    RegionMap {
        #[arg(long)]
        d: usize,
        #[arg(long = "max-M", default_value_t = 12)]
        max_m: usize,
        #[arg(long = "max-N", default_value_t = 12)]
        max_n: usize,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { code: 0, stdout, stderr: String::new() }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

/// One cell of the region map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionCell {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub feasible: bool,
    /// Longest alignment path `r + 1` for `min(M, N) < max(M, N)`; unbounded
    /// (`None`) when `M = N`.
    pub path_label: Option<usize>,
}

pub fn region_map(d: usize, max_m: usize, max_n: usize) -> Vec<RegionCell> {
    let mut cells = Vec::with_capacity(max_m * max_n);
    for n in 1..=max_n {
        for m in 1..=max_m {
            let path_label = (m != n).then(|| path_parameter(m.min(n), m.max(n)) + 1);
            cells.push(RegionCell { m, n, feasible: decide_3user_symmetric(m, n, d).is_feasible(), path_label });
        }
    }
    cells
}

fn render_region(d: usize, max_m: usize, max_n: usize, cells: &[RegionCell]) -> String {
    let mut out = format!("feasible region for d = {d} (rows N, columns M; digit = path label, * = M = N, . = infeasible)\n");
    for n in (1..=max_n).rev() {
        out.push_str(&format!("{n:>3} "));
        for m in 1..=max_m {
            let cell = cells[(n - 1) * max_m + (m - 1)];
            let ch = match (cell.feasible, cell.path_label) {
                (false, _) => '.',
                (true, None) => '*',
                (true, Some(l)) if l <= 9 => char::from_digit(l as u32, 10).unwrap(),
                (true, Some(_)) => '+',
            };
            out.push(' ');
            out.push(ch);
        }
        out.push('\n');
    }
    out.push_str("    ");
    for m in 1..=max_m {
        out.push_str(&format!(" {}", m % 10));
    }
    out.push('\n');
    out
}

fn configure_threads() {
    if let Some(n) = std::env::var("IA_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn execute(cli: Cli) -> Result<Outcome> {
    let json = cli.json;
    match cli.command {
        Command::GenChannels { spec, seed, out } => {
            let ch = generate_channels(&spec.load()?, seed);
            match out {
                Some(path) => {
                    write_channels(&path, &ch)?;
                    Ok(Outcome::ok(format!("wrote {}\n", path.display())))
                }
                None => Ok(Outcome::ok(to_json(&ChannelFile::from(&ch))? + "\n")),
            }
        }
        Command::Feasibility { spec, all_path_bounds, max_r } => {
            let spec = spec.load()?;
            let verdict = assess(&spec, all_path_bounds.then_some(max_r + 2))?;
            if json {
                Ok(Outcome::ok(to_json(&verdict)? + "\n"))
            } else {
                let mut text = format!("{:?}", verdict.status);
                if let Some(t) = verdict.dimension {
                    text.push_str(&format!(" (dimension {t})"));
                }
                for c in verdict.certificates.iter().filter(|c| !c.holds()) {
                    text.push_str(&format!("\nviolated: {}", serde_json::to_string(c)?));
                }
                Ok(Outcome::ok(text + "\n"))
            }
        }
        Command::Solve { channels, method, selection, enumerate, restarts, seed, out } => {
            let ch = read_channels(&channels)?;
            let spec = ch.spec().clone();
            let d = spec.user(0).d;
            if enumerate {
                let all = enumerate_square_solutions(&ch, d, None)?;
                let files: Vec<StrategyFile> = all.iter().map(|s| StrategyFile::from_strategy(&spec, s)).collect();
                return Ok(Outcome::ok(to_json(&json!({ "count": files.len(), "strategies": files }))? + "\n"));
            }
            let strategy = match method {
                Method::Eigen => {
                    let sel = selection.unwrap_or_else(|| (0..d).collect());
                    solve_square(&ch, d, &sel)?
                }
                Method::Paths => {
                    let u = spec.user(0);
                    if u.m < u.n {
                        construct3::solve_paths_seeded(&ch, u.m, u.n, d, seed)?
                    } else {
                        solve_three_user(&ch)?
                    }
                }
                Method::Newton => solve_newton(&ch, &NewtonOptions { restarts, ..NewtonOptions::with_seed(seed) })?.strategy,
                Method::Auto => {
                    if spec.k() == 3 && spec.is_symmetric() {
                        solve_three_user(&ch)?
                    } else {
                        solve_newton(&ch, &NewtonOptions { restarts, ..NewtonOptions::with_seed(seed) })?.strategy
                    }
                }
            };
            let report = check_orthogonality(&ch, &strategy, DEFAULT_TOL)?;
            let file = StrategyFile::from_strategy(&spec, &strategy);
            let summary = format!(
                "verification {} (max residual {:.3e})\n",
                if report.passed { "passed" } else { "FAILED" },
                report.max_orthogonality_residual
            );
            match out {
                Some(path) => {
                    std::fs::write(&path, to_json(&file)?)?;
                    let text = if json { to_json(&report)? + "\n" } else { format!("wrote {}\n{summary}", path.display()) };
                    Ok(Outcome::ok(text))
                }
                None => Ok(Outcome { code: 0, stdout: to_json(&file)? + "\n", stderr: summary }),
            }
        }
        Command::Verify { channels, strategy, tol } => {
            let ch = read_channels(&channels)?;
            let (_, s) = read_strategy(&strategy)?;
            let report = check_orthogonality(&ch, &s, tol)?;
            let text = if json {
                to_json(&report)? + "\n"
            } else {
                format!(
                    "{} (max residual {:.3e}, tol {:e})\n",
                    if report.passed { "PASSED" } else { "FAILED" },
                    report.max_orthogonality_residual,
                    tol
                )
            };
            Ok(Outcome { code: if report.passed { 0 } else { 1 }, stdout: text, stderr: String::new() })
        }
        Command::Count { k, d, n, budget } => {
            let opts = budget.map(|budget| CountOptions { budget }).unwrap_or_default();
            let count = count_solutions_with(k, d, n, opts)?;
            let text = if json { to_json(&json!({ "K": k, "d": d, "N": n, "count": count.to_string() }))? } else { count.to_string() };
            Ok(Outcome::ok(text + "\n"))
        }
        Command::Witness { k, d, n } => Ok(Outcome::ok(to_json(&existence_witness(k, d, n)?)? + "\n")),
        Command::Enumerate { channels, attempts, seed } => {
            let ch = read_channels(&channels)?;
            let found = find_distinct_solutions(&ch, attempts, seed)?;
            let files: Vec<StrategyFile> = found.iter().map(|s| StrategyFile::from_strategy(ch.spec(), s)).collect();
            Ok(Outcome {
                code: 0,
                stdout: to_json(&json!({ "attempts": attempts, "count": files.len(), "strategies": files }))? + "\n",
                stderr: format!("{} distinct solutions from {attempts} attempts\n", files.len()),
            })
        }
        Command::Dof { k, n } => {
            if k == 0 || n == 0 {
                return Err(Error::InvalidSpec("dof needs K >= 1 and N >= 1".into()));
            }
            let best = best_subset_dof(k, n);
            let symmetric = (k >= 3).then(|| max_dof_fully_symmetric(k, n));
            if json {
                let sym = symmetric.map(|s| json!({ "d": s.d, "total": s.total, "normalized": s.normalized.to_string() }));
                Ok(Outcome::ok(to_json(&json!({ "K": k, "N": n, "all_active": sym, "best_subset": best, "total": best.total }))? + "\n"))
            } else {
                let mut text = String::new();
                if let Some(s) = symmetric {
                    text.push_str(&format!("all {k} users active: d = {}, total {} ({} per antenna)\n", s.d, s.total, s.normalized));
                }
                text.push_str(&format!("best: {} active users with d = {}, total {}\n", best.active, best.d, best.total));
                Ok(Outcome::ok(text))
            }
        }
        Command::RegionMap { d, max_m, max_n } => {
            if d == 0 || max_m == 0 || max_n == 0 {
                return Err(Error::InvalidSpec("region-map needs d, max-M, max-N >= 1".into()));
            }
            let cells = region_map(d, max_m, max_n);
            if json {
                Ok(Outcome::ok(to_json(&json!({ "d": d, "cells": cells }))? + "\n"))
            } else {
                Ok(Outcome::ok(render_region(d, max_m, max_n, &cells)))
            }
        }
    }
}

/// Parse `argv` (including the program name) and run the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    configure_threads();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { Outcome::ok(text) } else { Outcome { code, stdout: String::new(), stderr: text } };
        }
    };
    match execute(cli) {
        Ok(o) => o,
        Err(e) => Outcome { code: 3, stdout: String::new(), stderr: format!("error: {}: {e}\n", e.name()) },
    }
}
