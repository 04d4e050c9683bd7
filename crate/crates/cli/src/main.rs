use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use iwasawa_cli::config::{self, canonical_theta, JobConfig};
use iwasawa_cli::report::Report;
use iwasawa_cli::suite;
use iwasawa_core::arith::max_precision;
use iwasawa_core::characters::find_eisenstein_pairs;
use iwasawa_core::coleman::{
    capstone, capstone_ring, col_vs_flat_check, coleman_measure, coleman_series, NormSystem,
};
use iwasawa_core::lfun::{invariants, kubota_leopoldt, Convention};
use iwasawa_core::modsym::{
    eisenstein_quotient, varpi_formal, xi_zero_order, HeilbronnCache, Sign, SymbolRing,
    SymbolSpace, Twist,
};
use iwasawa_core::series::GeneratorMode;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "iwasawa",
    version,
    about = "p-adic L-functions, Coleman maps and modular symbols"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// the prime p
    #[arg(long, global = true)]
    p: Option<u64>,
    /// tame level N; theta is read mod N or mod Np by its number of images
    #[arg(long = "N", global = true)]
    n: Option<u64>,
    /// images k/o of the unit group generators, e.g. "1/2,1/3"
    #[arg(long, global = true)]
    theta: Option<String>,
    /// m,n: coefficients mod p^m, series mod X^n
    #[arg(long, global = true, default_value = "6,6")]
    prec: String,
    #[arg(long, global = true, default_value = "simple")]
    generator: GeneratorMode,
    #[arg(long, global = true, default_value = "main")]
    convention: Convention,
    /// directory for cached Heilbronn matrices
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// write the JSON report here ("-" for stdout)
    #[arg(long, global = true)]
    json: Option<String>,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Kubota-Leopoldt series of theta
    Lfun,
    /// Coleman series of the cyclotomic unit system of level N
    Coleman {
        /// compare the theta-part with the Kubota-Leopoldt series
        #[arg(long)]
        compare_lfun: bool,
    },
    /// weight-2 modular symbols
    Msym {
        #[arg(long)]
        level: u64,
        /// Hecke operators to print on the cuspidal subspace
        #[arg(long = "hecke")]
        hecke: Vec<u64>,
        /// "p,theta": order of the theta-Eisenstein quotient at level N = --level
        #[arg(long)]
        eisenstein: Option<String>,
        /// "u:v": normal form of varpi of the symbol (u:v)
        #[arg(long)]
        varpi: Option<String>,
        #[arg(long, value_enum, default_value = "plus")]
        sign: SignArg,
    },
    /// even pairs (p, theta) with p dividing the generalized Bernoulli number
    Search {
        #[arg(long, default_value_t = suite::P_MAX)]
        p_max: u64,
        #[arg(long, default_value_t = suite::N_MAX)]
        n_max: u64,
    },
    /// run the acceptance criteria
    Selftest {
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Plus,
    Full,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()?;
    }
    let name = match &cli.command {
        Command::Lfun => "lfun",
        Command::Coleman { .. } => "coleman",
        Command::Msym { .. } => "msym",
        Command::Search { .. } => "search",
        Command::Selftest { .. } => "selftest",
    };
    let cfg = JobConfig {
        command: name.into(),
        p: cli.p,
        n: cli.n,
        theta: cli.theta.clone(),
        prec: config::parse_prec(&cli.prec)?,
        generator: cli.generator,
        convention: cli.convention,
        threads: cli.threads,
    };
    let cache = cli.cache.as_deref().map(HeilbronnCache::new);
    let mut report = Report::new(cfg.clone());
    match cli.command {
        Command::Lfun => lfun(&cfg, &mut report)?,
        Command::Coleman { compare_lfun } => coleman(&cfg, compare_lfun, &mut report)?,
        Command::Msym {
            level,
            hecke,
            eisenstein,
            varpi,
            sign,
        } => {
            let sign = match sign {
                SignArg::Plus => Sign::Plus,
                SignArg::Full => Sign::Full,
            };
            msym(
                &cfg,
                level,
                &hecke,
                eisenstein.as_deref(),
                varpi.as_deref(),
                sign,
                cache.as_ref(),
                &mut report,
            )?
        }
        Command::Search { p_max, n_max } => search(p_max, n_max, &mut report),
        Command::Selftest { quick } => {
            let ids: &[u8] = if quick { &suite::QUICK } else { &suite::ALL };
            for id in ids {
                let o = suite::criterion(*id, cache.as_ref());
                eprintln!("{}", o.line());
                report.assert(
                    format!("criterion {} {}", o.id, o.name),
                    o.pass,
                    o.summary.clone(),
                );
                report.result(&format!("criterion_{}", o.id), &o);
            }
        }
    }
    eprint!("{}", report.summary());
    match cli.json.as_deref() {
        Some("-") => println!("{}", report.to_json()),
        Some(path) => std::fs::write(path, report.to_json() + "\n")
            .with_context(|| format!("writing {path}"))?,
        None => {}
    }
    Ok(report.passed())
}

fn lfun(cfg: &JobConfig, report: &mut Report) -> anyhow::Result<()> {
    let theta = cfg.character()?;
    let g = cfg.generator()?;
    let (m, n) = cfg.prec;
    let p = cfg.prime()?;
    // interpolation loses digits and the tail bound caps the top
    // coefficients, so work above the target in both directions
    let working = (m + n as u32 + 7).min(max_precision(p) - 4).max(m);
    let mut xi = kubota_leopoldt(&theta, cfg.convention, working, n + m as usize + 2, &g)?;
    xi.series = xi.series.truncate(n);
    report.result("theta", canonical_theta(&theta));
    report.result("xi", xi.to_json());
    report.result("guaranteed_precision", xi.guaranteed(n));
    match invariants(&xi) {
        Ok((mu, lambda)) => report.result("invariants", json!({"mu": mu, "lambda": lambda})),
        Err(e) => report.result("invariants", json!({"error": e.to_string()})),
    }
    report.certificate("audit", &xi.audit);
    let held = xi.audit.iter().filter(|a| a.held_out).count();
    report.assert(
        "interpolation audit",
        xi.audit_passed(),
        format!("{held} held-out nodes"),
    );
    report.assert(
        "precision target",
        xi.guaranteed(n) >= m,
        format!(
            "p^{} guaranteed through X^{n}, target p^{m}, working precision p^{working}",
            xi.guaranteed(n)
        ),
    );
    Ok(())
}

fn coleman(cfg: &JobConfig, compare: bool, report: &mut Report) -> anyhow::Result<()> {
    let theta = cfg.character()?;
    let p = cfg.prime()?;
    let g = cfg.generator()?;
    let (m, n) = cfg.prec;
    let c = capstone(&theta, p, m, n, &g)?;
    let r = &c.report;
    let cap = max_precision(p).min(m + n as u32 + 7);
    let ring = capstone_ring(p, &theta, cap);
    let sys = NormSystem::cyclotomic(&ring, theta.modulus(), 1)?;
    let terms = (p as usize - 1) * (cap as usize + 1) + n + 6;
    let col = coleman_series(&sys, terms)?;
    let mu = coleman_measure(&col)?;
    report.result("theta", canonical_theta(&theta));
    report.result(
        "coleman_series",
        col.f.truncate(n).to_json(&r.coleman_series.ring),
    );
    report.result(
        "measure_head",
        mu.q.truncate(n).to_json(&r.coleman_series.ring),
    );
    report.result("output_series", &r.coleman_series);
    report.result("fold_convention", &r.convention);
    let plain = col_vs_flat_check(&sys, None, &g)?;
    let folded = col_vs_flat_check(&sys, Some(&theta), &g)?;
    report.assert(
        "Col versus Col-flat",
        plain.agree,
        format!("at p^{}", plain.precision),
    );
    report.assert(
        "Col versus Col-flat, theta-folded",
        folded.agree,
        format!("at p^{}", folded.precision),
    );
    report.certificate("flat", json!({"system": plain, "folded": folded}));
    report.certificate("calibration", &r.calibration);
    if compare {
        report.result("capstone", json!({"match": r.matched, "precision": r.shared_precision, "lfun_series": r.lfun_series}));
        report.assert(
            "Coleman map equals xi",
            r.matched,
            format!(
                "agree={} shared precision {:?}",
                r.agree, r.shared_precision
            ),
        );
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn msym(
    cfg: &JobConfig,
    level: u64,
    hecke: &[u64],
    eisenstein: Option<&str>,
    varpi: Option<&str>,
    sign: Sign,
    cache: Option<&HeilbronnCache>,
    report: &mut Report,
) -> anyhow::Result<()> {
    let twist = match &cfg.theta {
        Some(t) => {
            if cfg.n.is_some_and(|n| n != level) {
                bail!("--N must equal --level");
            }
            Twist::Character(config::character(level, t)?)
        }
        None => Twist::Gamma1,
    };
    let root_order = match &twist {
        Twist::Character(e) => e.root_order(),
        Twist::Gamma1 => 2,
    };
    let ring = match cfg.p {
        Some(p) => SymbolRing::local(p, cfg.prec.0, root_order)?,
        None => SymbolRing::rational(root_order),
    };
    let q = ring.modulus();
    let space = SymbolSpace::build(level, twist, ring, sign)?;
    report.result(
        "space",
        json!({
            "level": level,
            "generators": space.num_generators(),
            "dim": space.dim(),
            "cusps": space.num_cusps(),
            "modulus": q,
        }),
    );
    if !hecke.is_empty() || space.dim() > 0 {
        let cusp = space.cuspidal()?;
        report.result("cuspidal_rank", cusp.rank());
        report.assert(
            "cuspidal rank",
            cusp.rank() == space.expected_cuspidal_rank(),
            format!(
                "{} (expected {})",
                cusp.rank(),
                space.expected_cuspidal_rank()
            ),
        );
        let mut ops = Vec::new();
        for &l in hecke {
            let op = space.hecke(l, cache)?;
            let mat = cusp.restrict(&op)?;
            let centered: Vec<Vec<i128>> = mat
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|&x| {
                            if x > q / 2 {
                                x as i128 - q as i128
                            } else {
                                x as i128
                            }
                        })
                        .collect()
                })
                .collect();
            for row in &centered {
                eprintln!("{} {:?}", op.label, row);
            }
            report.result(&op.label, centered);
            ops.push(op);
        }
        for i in 0..ops.len() {
            for j in i + 1..ops.len() {
                report.assert(
                    format!("{} {} commute", ops[i].label, ops[j].label),
                    ops[i].commutes_with(&ops[j]),
                    "",
                );
            }
        }
    }
    if let Some(s) = varpi {
        let (u, v) = config::parse_pair(s)?;
        let nf = varpi_formal(level, &[(1, u, v)])?;
        let terms: Vec<_> = nf.into_iter().map(|((u, v), c)| json!([c, u, v])).collect();
        report.result("varpi", terms);
    }
    if let Some(e) = eisenstein {
        let (p, t) = config::parse_eisenstein(e)?;
        let theta = config::character(level, &t)?;
        let m = cfg.prec.0.min(max_precision(p) / 2).max(1);
        let quo = eisenstein_quotient(p, &theta, m, cache)?;
        let want = xi_zero_order(p, &theta, m + 1)?
            .ok_or_else(|| anyhow!("xi(0) vanishes to the working precision"))?;
        report.assert(
            "Eisenstein quotient order",
            quo.order_exp == want,
            format!("p^{} against xi(0) order p^{want}", quo.order_exp),
        );
        report.result("eisenstein", quo);
    }
    Ok(())
}

fn search(p_max: u64, n_max: u64, report: &mut Report) {
    let pairs = find_eisenstein_pairs(5..=p_max, 1..=n_max);
    for f in &pairs {
        println!("{}", serde_json::to_string(f).expect("pair serializes"));
    }
    report.result("count", pairs.len());
    report.result("pairs", &pairs);
    report.assert("search", true, format!("{} pairs", pairs.len()));
}
