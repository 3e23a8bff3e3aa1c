//! `opshort` command-line front end.
//!
//! Exit codes: 0 success, 2 input error, 3 not solvable, 4 borderline
//! tolerance, 5 internal invariant violation.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use opshort::numkit::io::read_matrix;
use opshort::numkit::{Mat, Proj, Tol};
use opshort::{douglas, lab, parallel, polar, shorting};
use report::{exit_code_for, Envelope, Status};

#[derive(Parser)]
#[command(name = "opshort", version, about = "Polar decompositions, reduced solutions, shorted operators and parallel sums")]
struct Cli {
    /// Residual tolerance; the rank cutoff and eigenvalue clamp follow as tol*1e-4 and tol*1e-2.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomized probes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classical polar decomposition, or the generalized one with --alpha.
    Polar {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        alpha: Option<f64>,
        /// Also evaluate the regularized iterate U_n.
        #[arg(long)]
        iterate: Option<u64>,
        #[command(flatten)]
        out: Out,
    },
    /// Generalized polar decomposition T = U|T|^alpha.
    Gpolar {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.75)]
        alpha: f64,
        #[command(flatten)]
        out: Out,
    },
    /// The canonical factor V_T.
    VOp {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Reduced solution of AX = C.
    ReducedSolve {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        c: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Block corners of T with respect to P_M (domain) and P_N (codomain).
    Partition {
        #[command(flatten)]
        blocks: BlockArgs,
        #[command(flatten)]
        out: Out,
    },
    /// Bilateral shorted operator.
    Shorted {
        #[command(flatten)]
        blocks: BlockArgs,
        #[command(flatten)]
        out: Out,
    },
    /// Parallel sum A:B of two PSD matrices.
    ParallelSum {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Solution X of A:B = X*AX + (I - X)*B(I - X).
    ParallelEq {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Hansen's inequality on a given C and on seeded random probes.
    HansenCheck {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        c: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        probes: usize,
        #[command(flatten)]
        out: Out,
    },
    /// (I + X)^-1 <= Y*Y + (I - Y)* X^-1 (I - Y).
    Lemma69 {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Truncated counterexample laboratory.
    Lab {
        #[command(subcommand)]
        command: LabCommand,
    },
}

#[derive(Subcommand)]
enum LabCommand {
    /// Divergence sweep over truncation sizes, written as CSV.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128,256")]
        dims: Vec<usize>,
        /// CSV destination (stdout if omitted).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Closed forms against the numerical stack at one truncation.
    Verify {
        #[arg(long, default_value_t = 32)]
        dim: usize,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Args)]
struct Out {
    /// JSON destination (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BlockArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    pm: PathBuf,
    #[arg(long)]
    pn: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("opshort: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn run(cli: Cli) -> Result<Status> {
    let tol = match cli.tol {
        Some(t) => Tol::from_residual(t).context("--tol")?,
        None => Tol::default(),
    };
    let env = Envelope::new(tol);
    match cli.command {
        Command::Polar { input, alpha, iterate, out } => {
            let t = read(&input)?;
            let form = match alpha {
                Some(a) => polar::gpolar(&t, a, &tol)?,
                None => polar::polar_decompose(&t, &tol)?,
            };
            let residuals = polar::gpolar_residuals(&t, &form, &tol)?;
            let iterate = match iterate {
                Some(n) => {
                    let a = alpha.unwrap_or(0.75);
                    let un = polar::gpolar_iterative(&t, a, n)?;
                    let limit = if alpha.is_some() { form.u.clone() } else { polar::gpolar(&t, a, &tol)?.u };
                    Some(json!({ "n": n, "alpha": a, "U_n": un, "error_vs_closed_form": (&un - &limit).op_norm() }))
                }
                None => None,
            };
            let result = json!({
                "U": form.u, "absT": form.abs_t, "alpha": form.alpha,
                "residuals": residuals, "iterate": iterate,
            });
            env.write(&out.out, "polar", &result)?;
            Ok(Status::Ok)
        }
        Command::Gpolar { input, alpha, out } => {
            let t = read(&input)?;
            let form = polar::gpolar(&t, alpha, &tol)?;
            let residuals = polar::gpolar_residuals(&t, &form, &tol)?;
            let result = json!({ "U": form.u, "absT": form.abs_t, "alpha": alpha, "residuals": residuals });
            env.write(&out.out, "gpolar", &result)?;
            Ok(Status::Ok)
        }
        Command::VOp { input, out } => {
            let t = read(&input)?;
            let v = polar::v_operator(&t, &tol)?;
            let residuals = polar::v_residuals(&t, &v, &tol)?;
            env.write(&out.out, "v-op", &json!({ "V": v, "residuals": residuals }))?;
            Ok(Status::Ok)
        }
        Command::ReducedSolve { a, c, out } => {
            let (a, c) = (read(&a)?, read(&c)?);
            let s = douglas::solve_reduced(&a, &c, &tol)?;
            let status = if s.borderline {
                Status::Borderline
            } else if s.solvable {
                Status::Ok
            } else {
                Status::NotSolvable
            };
            env.write(&out.out, "reduced-solve", &json!({ "solution": s, "norm": s.norm() }))?;
            Ok(status)
        }
        Command::Partition { blocks, out } => {
            let (t, pm, pn) = read_blocks(&blocks)?;
            let b = shorting::partition(&t, &pm, &pn, &tol)?;
            let result = json!({ "blocks": b, "reassembly_residual": b.reassembly_residual() });
            env.write(&out.out, "partition", &result)?;
            Ok(Status::Ok)
        }
        Command::Shorted { blocks, out } => {
            let (t, pm, pn) = read_blocks(&blocks)?;
            let b = shorting::partition(&t, &pm, &pn, &tol)?;
            shorted_command(&env, &out.out, &b, &tol)
        }
        Command::ParallelSum { a, b, out } => {
            let (a, b) = (read(&a)?, read(&b)?);
            let r = parallel::parallel_sum(&a, &b, &tol)?;
            env.write(&out.out, "parallel-sum", &r)?;
            Ok(Status::Ok)
        }
        Command::ParallelEq { a, b, out } => {
            let (a, b) = (read(&a)?, read(&b)?);
            let r = parallel::solve_parallel_equation(&a, &b, &tol)?;
            env.write(&out.out, "parallel-eq", &r)?;
            Ok(Status::Ok)
        }
        Command::HansenCheck { a, b, c, probes, out } => {
            let (a, b) = (read(&a)?, read(&b)?);
            let given = match c {
                Some(p) => Some(parallel::hansen_inequality_check(&a, &b, &read(&p)?, &tol)?),
                None => None,
            };
            let p = parallel::hansen_probes(&a, &b, probes, cli.seed, &tol)?;
            let holds = p.holds && given.is_none_or(|l| l >= p.bound);
            env.write(&out.out, "hansen-check", &json!({ "lambda_min_given_c": given, "probes": p, "holds": holds }))?;
            Ok(if holds { Status::Ok } else { Status::Invariant })
        }
        Command::Lemma69 { x, y, out } => {
            let (x, y) = (read(&x)?, read(&y)?);
            let r = parallel::lemma_69_check(&x, &y, &tol)?;
            env.write(&out.out, "lemma69", &r)?;
            Ok(Status::Ok)
        }
        Command::Lab { command: LabCommand::Sweep { dims, csv } } => {
            let rows = match threads_from_env()? {
                Some(n) => lab::divergence_sweep_with_threads(&dims, &tol, n)?,
                None => lab::divergence_sweep(&dims, &tol)?,
            };
            match csv {
                Some(path) => {
                    let file = std::fs::File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
                    lab::write_csv(&rows, file)?;
                }
                None => lab::write_csv(&rows, std::io::stdout().lock())?,
            }
            Ok(Status::Ok)
        }
        Command::Lab { command: LabCommand::Verify { dim, out } } => {
            let r = lab::verify_closed_forms(dim, &tol)?;
            env.write(&out.out, "lab verify", &r)?;
            Ok(if r.all_within { Status::Ok } else { Status::Invariant })
        }
    }
}

#[derive(Serialize)]
struct ShortedOutput<'a> {
    mode: Option<shorting::Mode>,
    core: Option<&'a Mat>,
    shorted: Option<&'a Mat>,
    core_simplified: Option<&'a Mat>,
    fe_gap: Option<f64>,
    witnesses: &'a shorting::WeakComplementData,
    complementability: &'a shorting::Complementability,
    idempotents: Option<shorting::IdempotentCheck>,
    range_kernel: Option<shorting::RangeKernelReport>,
}

fn shorted_command(env: &Envelope, out: &Option<PathBuf>, b: &shorting::BlockOperator, tol: &Tol) -> Result<Status> {
    let comp = shorting::is_complementable(b, tol)?;
    let idempotents = if comp.verdict {
        let w = shorting::complementable_idempotents(b, &comp.c.d, &comp.d.d, tol)?;
        Some(shorting::check_idempotents(b, &w))
    } else {
        None
    };
    match shorting::shorted(b, tol) {
        Ok(s) => {
            let report = shorting::verify_range_kernel(b, &s, tol)?;
            let borderline = s.witnesses.borderline.iter().any(|&x| x);
            let o = ShortedOutput {
                mode: Some(s.mode),
                core: Some(&s.core),
                shorted: Some(&s.shorted),
                core_simplified: Some(&s.core_simplified),
                fe_gap: Some(s.fe_gap),
                witnesses: &s.witnesses,
                complementability: &comp,
                idempotents,
                range_kernel: Some(report),
            };
            env.write(out, "shorted", &o)?;
            Ok(if borderline { Status::Borderline } else { Status::Ok })
        }
        Err(shorting::ShortingError::NotWeaklyComplementable { .. }) => {
            let w = shorting::weak_complement_data(b, tol)?;
            let borderline = w.borderline.iter().any(|&x| x);
            let o = ShortedOutput {
                mode: None,
                core: None,
                shorted: None,
                core_simplified: None,
                fe_gap: None,
                witnesses: &w,
                complementability: &comp,
                idempotents,
                range_kernel: None,
            };
            env.write(out, "shorted", &o)?;
            Ok(if borderline { Status::Borderline } else { Status::NotSolvable })
        }
        Err(e) => Err(e.into()),
    }
}

fn read(path: &Path) -> Result<Mat> {
    Ok(read_matrix(path)?)
}

fn read_blocks(args: &BlockArgs) -> Result<(Mat, Proj, Proj)> {
    let t = read(&args.input)?;
    let pm = Proj::new(read(&args.pm)?).with_context(|| format!("--pm {}", args.pm.display()))?;
    let pn = Proj::new(read(&args.pn)?).with_context(|| format!("--pn {}", args.pn.display()))?;
    Ok((t, pm, pn))
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("OPSHORT_THREADS") {
        Ok(v) if !v.trim().is_empty() => {
            let n: usize = v.trim().parse().with_context(|| format!("OPSHORT_THREADS={v:?} is not a positive integer"))?;
            anyhow::ensure!(n > 0, "OPSHORT_THREADS must be positive");
            Ok(Some(n))
        }
        _ => Ok(None),
    }
}
