use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use monores::homotopy::{build_sdr, check_contracting, froberg, lattice_terms, GroebnerHomotopy, Homotopy, PhiVariant, ProjectionKind};
use monores::io::{complex_from_json, complex_to_json, parse_ideal};
use monores::selftest::{self, SelftestConfig};
use monores::verify::{check_exactness, StrandSet};
use monores::{
    betti_numbers, build_taylor, chain_route, extract_subcomplex, is_groebner, lyubeznik_filter, BaseKind, BaseOrder,
    Direction, Error, FreeComplex, LabelOrder, TaylorOrder, DEFAULT_CAP,
};

#[derive(Parser)]
#[command(name = "monores", version, about = "Taylor and Lyubeznik resolutions of monomial ideals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a resolution and write it as JSON.
    Resolve {
        #[arg(long, value_enum, default_value_t = Kind::Taylor)]
        kind: Kind,
        /// Ideal file (human syntax or JSON); `-` reads standard input.
        #[arg(long = "in")]
        input: String,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<String>,
        /// Base order on monomials used to certify the Gröbner property.
        #[arg(long, default_value = "grevlex")]
        order: String,
        /// Check that every Δ_q is a Gröbner basis for the induced order.
        #[arg(long)]
        certify: bool,
        /// How redundant Lyubeznik generators are found.
        #[arg(long, value_enum, default_value_t = Route::Chain)]
        route: Route,
        /// Allow more than 12 generators.
        #[arg(long)]
        force: bool,
    },
    /// Check δ² = 0 and exactness strand by strand.
    Verify {
        /// A complex written by `resolve`, or an ideal (its Taylor complex is used).
        #[arg(long = "in")]
        input: String,
        /// `lcm` or `lcm+random:N`.
        #[arg(long, default_value = "lcm")]
        strands: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Betti numbers of the ideal (or of the complex's ideal).
    Betti {
        #[arg(long = "in")]
        input: String,
    },
    /// Check a homotopy on every lcm-lattice term of the Taylor complex.
    Homotopy {
        #[arg(long, value_enum)]
        check: HomotopyCheck,
        #[arg(long = "in")]
        input: String,
        #[arg(long, value_enum, default_value_t = Variant::Linear)]
        variant: Variant,
    },
    /// Run the invariant suite on random monomial sets.
    Selftest {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 5)]
        r: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        maxdeg: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Taylor,
    Lyubeznik,
    LyubeznikReverse,
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    Chain,
    Filter,
}

#[derive(Clone, Copy, ValueEnum)]
enum HomotopyCheck {
    Psi,
    PsiR,
    Phi,
    Sdr,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Linear,
    Termwise,
}

/// Why a command did not succeed: failed checks exit 1, bad input exits 2.
enum Failure {
    Check(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::Capacity { .. }
            | Error::EmptyInput
            | Error::Duplicate { .. }
            | Error::Context { .. }
            | Error::InvalidContext(_)
            | Error::Malformed(_)
            | Error::Index { .. }
            | Error::InvalidIndexSeq(_) => Failure::Usage(e.to_string()),
            other => Failure::Check(other.to_string()),
        }
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| Failure::Usage(format!("reading standard input: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("reading {path}: {e}")))
}

fn taylor_of(text: &str, force: bool) -> Result<FreeComplex, Failure> {
    let ideal = parse_ideal(text)?;
    let monomials = ideal.ordered_monomials();
    let cap = if force { usize::BITS as usize - 2 } else { DEFAULT_CAP };
    Ok(build_taylor(&ideal.context, &monomials, cap)?)
}

/// A serialized complex, or the Taylor complex of an ideal.
fn complex_of(text: &str) -> Result<FreeComplex, Failure> {
    let is_complex = serde_json::from_str::<serde_json::Value>(text).is_ok_and(|v| v.get("differential").is_some());
    if is_complex {
        Ok(complex_from_json(text)?)
    } else {
        taylor_of(text, false)
    }
}

fn parse_strands(s: &str, seed: u64) -> Result<StrandSet, Failure> {
    if s == "lcm" {
        return Ok(StrandSet::Lcm);
    }
    let count = s
        .strip_prefix("lcm+random:")
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| Failure::Usage(format!("--strands must be `lcm` or `lcm+random:N`, got `{s}`")))?;
    Ok(StrandSet::LcmPlusRandom { count, seed })
}

fn resolve(
    kind: Kind,
    input: &str,
    out: Option<&str>,
    order: &str,
    certify: bool,
    route: Route,
    force: bool,
) -> Result<(), Failure> {
    let base: BaseKind = order.parse().map_err(Failure::Usage)?;
    let taylor = taylor_of(&read_input(input)?, force)?;
    let direction = match kind {
        Kind::LyubeznikReverse => Direction::Reverse,
        _ => Direction::Forward,
    };
    if certify {
        let o = TaylorOrder::new(BaseOrder::new(base, taylor.n()), direction, taylor.monomials().to_vec());
        for q in 0..taylor.top() {
            let g: Vec<_> = taylor.delta_set(q, LabelOrder::Ascending)?.into_iter().map(|(_, d)| d).collect();
            if !is_groebner(&g, &o)?.is_groebner() {
                return Err(Failure::Check(format!("Δ_{q} is not a Gröbner basis")));
            }
        }
    }
    let complex = match kind {
        Kind::Taylor => taylor,
        Kind::Lyubeznik | Kind::LyubeznikReverse => {
            let report = match route {
                Route::Chain => chain_route(&taylor, direction),
                Route::Filter => lyubeznik_filter(&taylor, direction),
            };
            extract_subcomplex(&taylor, &report)?
        }
    };
    let json = complex_to_json(&complex)?;
    let summary = format!("{}: ranks {:?}", complex.kind(), complex.ranks_trimmed());
    match out {
        Some(path) => {
            fs::write(path, json + "\n").map_err(|e| Failure::Usage(format!("writing {path}: {e}")))?;
            println!("{summary}");
        }
        None => {
            println!("{json}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn verify(input: &str, strands: &str, seed: u64) -> Result<(), Failure> {
    let set = parse_strands(strands, seed)?;
    let c = complex_of(&read_input(input)?)?;
    let report = check_exactness(&c, set);
    let mut stdout = io::stdout().lock();
    let failing: Vec<_> = report.failing_strands().collect();
    let _ = writeln!(stdout, "kind: {}", c.kind());
    let _ = writeln!(stdout, "ranks: {:?}", c.ranks_trimmed());
    let _ = writeln!(stdout, "d_squared: {}", if report.d_squared_ok { "ok" } else { "FAILED" });
    let _ = writeln!(stdout, "strands: {} checked, {} inexact", report.strands.len(), failing.len());
    for s in &failing {
        let _ = writeln!(stdout, "  inexact at {}: homology {:?}", c.context().display(&s.mu), s.homology);
    }
    let _ = writeln!(stdout, "betti: {:?}", report.betti);
    let _ = writeln!(stdout, "minimal: {}", report.minimal);
    if report.exact() {
        Ok(())
    } else {
        Err(Failure::Check("the complex is not a resolution".into()))
    }
}

fn homotopy(check: HomotopyCheck, input: &str, variant: Variant) -> Result<(), Failure> {
    let t = taylor_of(&read_input(input)?, false)?;
    let samples = lattice_terms(&t);
    let variant = match variant {
        Variant::Linear => PhiVariant::Linear,
        Variant::Termwise => PhiVariant::Termwise,
    };
    let mut failures: Vec<String> = Vec::new();
    let name = match check {
        HomotopyCheck::Psi | HomotopyCheck::PsiR => {
            let dir = if matches!(check, HomotopyCheck::Psi) { Direction::Forward } else { Direction::Reverse };
            let psi = froberg(&t, dir);
            failures.extend(check_contracting(&t, psi.as_ref(), &samples)?);
            let generic = GroebnerHomotopy::new(&t, TaylorOrder::new(BaseOrder::grevlex(t.n()), dir, t.monomials().to_vec()))?;
            for u in &samples {
                if generic.apply(u)? != psi.apply(u)? {
                    failures.push(format!("generic homotopy differs on {u:?}"));
                }
                if u.degree() >= 1 && psi.apply(&t.delta(u)?)? != generic.normal_form(u)? {
                    failures.push(format!("ψδ is not the normal form on {u:?}"));
                }
            }
            if dir == Direction::Forward { "psi" } else { "psi-r" }
        }
        HomotopyCheck::Phi => {
            if let Err(e) = build_sdr(&t, froberg(&t, Direction::Forward), ProjectionKind::F, variant) {
                failures.push(e.to_string());
            }
            "phi"
        }
        HomotopyCheck::Sdr => {
            for kind in [ProjectionKind::F, ProjectionKind::Epsilon] {
                match build_sdr(&t, froberg(&t, Direction::Forward), kind, variant) {
                    Ok(sdr) => {
                        if let Some(s) = sdr.small() {
                            println!("retract ranks: {:?}", s.ranks_trimmed());
                        }
                    }
                    Err(e) => failures.push(format!("{kind:?}: {e}")),
                }
            }
            "sdr"
        }
    };
    println!("{name}: {} terms checked, {} failures", samples.len(), failures.len());
    for f in failures.iter().take(10) {
        eprintln!("  {f}");
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("{name} check failed")))
    }
}

fn run_selftest(config: SelftestConfig) -> Result<(), Failure> {
    if config.r == 0 || config.n == 0 || config.maxdeg == 0 {
        return Err(Failure::Usage("--r, --n and --maxdeg must be positive".into()));
    }
    if config.r > DEFAULT_CAP {
        return Err(Failure::Usage(format!("--r is limited to {DEFAULT_CAP}")));
    }
    let outcomes = selftest::run(&config);
    let failed: Vec<_> = outcomes.iter().filter(|o| !o.passed()).collect();
    for o in &failed {
        println!("trial {} {:?}:", o.trial, o.monomials);
        for f in &o.failures {
            println!("  {f}");
        }
    }
    println!("selftest: {} trials, {} failed", outcomes.len(), failed.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} trials failed", failed.len())))
    }
}

fn betti(input: &str) -> Result<(), Failure> {
    let c = complex_of(&read_input(input)?)?;
    println!("{:?}", betti_numbers(&c));
    Ok(())
}

fn configure_threads() {
    let Ok(raw) = std::env::var("MONORES_THREADS") else { return };
    match raw.parse::<usize>() {
        Ok(n) if n > 0 => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        _ => eprintln!("warning: ignoring MONORES_THREADS={raw}"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    configure_threads();
    let result = match cli.command {
        Command::Resolve { kind, input, out, order, certify, route, force } => {
            resolve(kind, &input, out.as_deref(), &order, certify, route, force)
        }
        Command::Verify { input, strands, seed } => verify(&input, &strands, seed),
        Command::Betti { input } => betti(&input),
        Command::Homotopy { check, input, variant } => homotopy(check, &input, variant),
        Command::Selftest { trials, r, n, maxdeg, seed } => run_selftest(SelftestConfig { trials, r, n, maxdeg, seed }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
