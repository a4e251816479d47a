use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cubezeta::algebra::IntPoly;
use cubezeta::lattice::{spectrum_dump, LatticeSpec};
use cubezeta::report::{orbits_report, psi_report};
use cubezeta::verify::{run_suite, CaseSet, Suite, VerifyOptions};
use cubezeta::zeta::{zeta_general_d_with, zeta_top_with, Prefactors};
use cubezeta::{Error, Limits};

const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_VERIFY: u8 = 4;
const EXIT_OTHER: u8 = 1;

#[derive(Parser)]
#[command(
    name = "cubezeta",
    version,
    about = "Zeta functions of periodic cubical lattices"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Render polynomials as x^k sums instead of coefficient lists.
    #[arg(long, global = true)]
    pretty: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Reciprocal zeta polynomial of the d-skeleton of the torus with sides n.
    Zeta {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        /// Skeleton dimension, 1..=q (default q).
        #[arg(long)]
        d: Option<usize>,
    },
    /// Cyclotomic-like polynomial of a d-vector.
    Psi {
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<u64>,
        /// Also list the factor of every orbit.
        #[arg(long)]
        orbit_split: bool,
    },
    /// Orbit decomposition of J_{d_1} x ... x J_{d_q}.
    Orbits {
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<u64>,
    },
    /// Spectrum of the up-Laplacian on d-cochains.
    Spectrum {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        #[arg(long, default_value_t = 0)]
        d: usize,
    },
    /// Run a verification sweep.
    Verify {
        /// orbits, cor13, bass, geodesics, spectra, linear-table or observations
        suite: String,
        #[arg(long)]
        qmax: Option<usize>,
        #[arg(long)]
        dmax: Option<u64>,
        /// default or extended
        #[arg(long, default_value = "default")]
        cases: String,
    },
}

enum Failure {
    Lib(Error),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn tuple(t: &[u64]) -> String {
    let parts: Vec<String> = t.iter().map(u64::to_string).collect();
    format!("({})", parts.join(","))
}

struct Out {
    pretty: bool,
    buf: String,
}

impl Out {
    fn poly(&self, p: &IntPoly, var: &str) -> String {
        if self.pretty {
            p.pretty(var)
        } else {
            p.to_text()
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.buf.push_str(s.as_ref());
        self.buf.push('\n');
    }

    fn json<T: serde::Serialize>(&mut self, v: &T) -> Result<(), Failure> {
        let s = serde_json::to_string_pretty(v).map_err(|e| Error::Internal(e.to_string()))?;
        self.line(s);
        Ok(())
    }
}

fn prefactor_text(p: &Prefactors) -> String {
    format!(
        "(1-u^2)^{} (1-u)^{} (1+{}u)^{}",
        p.one_minus_u2, p.one_minus_u, p.one_plus_bu.0, p.one_plus_bu.1
    )
}

fn run(cli: &Cli, out: &mut Out) -> Result<(), Failure> {
    let limits = Limits::from_env();
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Zeta { n, d } => {
            let spec = LatticeSpec::new(n.clone())?;
            let z = match d {
                None => zeta_top_with(&spec, &limits)?,
                Some(d) if *d == spec.q() => zeta_top_with(&spec, &limits)?,
                Some(d) => zeta_general_d_with(&spec, *d, &limits)?,
            };
            if json {
                return out.json(&z);
            }
            out.line(format!("n = {}  d = {}", tuple(&z.n), z.d));
            out.line(format!("zeta_inverse: {}", out.poly(&z.poly, "u")));
            out.line(format!("prefactors: {}", prefactor_text(&z.prefactors)));
            for f in &z.factors {
                out.line(format!(
                    "factor {} exponent {}: {}",
                    tuple(&f.dvec),
                    f.exponent,
                    out.poly(&f.psi, "x")
                ));
            }
        }
        Command::Psi { d, orbit_split } => {
            let r = psi_report(d, *orbit_split, &limits)?;
            if json {
                return out.json(&r);
            }
            out.line(format!("psi {}: {}", tuple(&r.d), out.poly(&r.psi, "x")));
            for o in r.orbits.iter().flatten() {
                out.line(format!(
                    "orbit {} size {}: {}  core {}  multiplicity {}  {}",
                    tuple(&o.representative),
                    o.size,
                    out.poly(&o.poly, "x"),
                    out.poly(&o.irr_core, "x"),
                    o.multiplicity,
                    if o.irreducible {
                        "irreducible"
                    } else {
                        "reducible"
                    }
                ));
            }
        }
        Command::Orbits { d } => {
            let r = orbits_report(d, &limits)?;
            if json {
                return out.json(&r);
            }
            out.line(format!(
                "orbits {}: {} (formula {})",
                tuple(&r.d),
                r.count,
                r.formula
            ));
            for o in &r.orbits {
                let m: Vec<String> = o.iter().map(|t| tuple(t)).collect();
                out.line(m.join(" "));
            }
        }
        Command::Spectrum { n, d } => {
            let spec = LatticeSpec::new(n.clone())?;
            let s = spectrum_dump(&spec, *d)?;
            if json {
                return out.json(&s);
            }
            out.line(format!("laplacian {} d = {}", tuple(&s.n), s.d));
            for (v, m) in &s.eigenvalues {
                out.line(format!("{v:.12} {m}"));
            }
        }
        Command::Verify {
            suite,
            qmax,
            dmax,
            cases,
        } => {
            let suite: Suite = suite.parse()?;
            let opts = VerifyOptions {
                qmax: *qmax,
                dmax: *dmax,
                cases: cases.parse::<CaseSet>()?,
            };
            let r = run_suite(suite, &opts)?;
            if json {
                out.json(&r)?;
            } else {
                for c in &r.cases {
                    out.line(format!(
                        "{} {}: {}",
                        if c.pass { "PASS" } else { "FAIL" },
                        c.label,
                        c.detail
                    ));
                }
                let failed = r.failures().count();
                out.line(format!(
                    "suite {}: {} cases, {} failed{}",
                    r.suite,
                    r.cases.len(),
                    failed,
                    if r.reporting_only {
                        " (reporting only)"
                    } else {
                        ""
                    }
                ));
            }
            if !r.ok() {
                return Err(Failure::Verify);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let mut out = Out {
        pretty: cli.pretty,
        buf: String::new(),
    };
    let result = run(&cli, &mut out);
    let _ = io::stdout().write_all(out.buf.as_bytes());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(EXIT_VERIFY),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Domain(_) => EXIT_USAGE,
                Error::Resource(_) => EXIT_RESOURCE,
                _ => EXIT_OTHER,
            })
        }
    }
}
