//! Command-line interface: q-binomials, divided power operations, module
//! analysis and bounds, group cohomology dimensions and verification
//! suites, Specht dimensions and series, and the full verification grid.

use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::dalg::DElement;
use crate::dmod::{
    bound_homology_epsilon, bound_spectral_epsilon, bound_unipotent, bound_vimod,
    epsilon_lambda, predict_period, ModuleJson, SpectralWindow,
};
use crate::error::QdpError;
use crate::gcoh::bigraded::{verify_free_row, verify_leibniz, verify_unit_row, BigradedE, Family};
use crate::gcoh::group::GroupSpec;
use crate::gcoh::lemmas::{coeffaceability_instance, verify_mid_portion};
use crate::gcoh::stable::CohCtx;
use crate::qarith::{q_binomial_int, QContext};
use crate::report::{emit_json, emit_tsv, CheckResult, Report};
use crate::specht::{
    fit_dimension_polynomial, specht_cohomology_series, specht_dim, Composition,
};
use crate::verify::{run_verification_grid, RunConfig};

#[derive(Parser)]
#[command(
    name = "qdp",
    about = "Exact q-divided power algebra, graded-module periodicity invariants, \
             and a desk-scale finite-group cohomology verifier"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CtxArgs {
    /// prime coefficient characteristic
    #[arg(long)]
    ell: u64,
    /// prime power q (1 for the symmetric family)
    #[arg(long, short)]
    q: u64,
}

impl CtxArgs {
    fn ctx(&self) -> Result<Arc<QContext>, QdpError> {
        Ok(Arc::new(QContext::new(self.ell, self.q)?))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Gaussian binomial [N choose M]_q in F_ell (and over the integers)
    Qbinom {
        #[command(flatten)]
        ctx: CtxArgs,
        n: usize,
        m: usize,
        /// also print the exact integer value
        #[arg(long)]
        integer: bool,
    },
    /// Divided power algebra operations on JSON elements [[degree, coeff], ..]
    Dalg {
        #[command(subcommand)]
        op: DalgOp,
    },
    /// Graded-module analysis and bound calculators
    Dmod {
        #[command(subcommand)]
        op: DmodOp,
    },
    /// Group cohomology dimensions and verification suites
    Gcoh {
        #[command(subcommand)]
        op: GcohOp,
    },
    /// Flag modules and unipotent Specht dimensions
    Specht {
        #[command(subcommand)]
        op: SpechtOp,
    },
    /// Verification grids
    Verify {
        #[command(subcommand)]
        op: VerifyOp,
    },
}

#[derive(Subcommand)]
enum DalgOp {
    /// product of two elements
    Mul {
        #[command(flatten)]
        ctx: CtxArgs,
        a: String,
        b: String,
    },
    /// iterated derivation
    Derive {
        #[command(flatten)]
        ctx: CtxArgs,
        a: String,
        #[arg(long, default_value_t = 1)]
        iterations: usize,
    },
    /// Taylor expansion pairs (constant, degree)
    Taylor {
        #[command(flatten)]
        ctx: CtxArgs,
        a: String,
    },
    /// y-presentation with explicit units
    Ybasis {
        #[command(flatten)]
        ctx: CtxArgs,
        a: String,
    },
}

#[derive(Subcommand)]
enum DmodOp {
    /// analyze a module presentation file: Hilbert function and invariants
    Analyze {
        file: String,
        #[arg(long, default_value_t = 40)]
        trunc: usize,
    },
    /// bound calculators
    Bounds {
        #[command(subcommand)]
        which: BoundOp,
    },
}

#[derive(Subcommand)]
enum BoundOp {
    /// VI-module cohomology periodicity bounds
    Vimod {
        #[command(flatten)]
        ctx: CtxArgs,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        t0: usize,
        #[arg(long, default_value_t = 0)]
        t1: usize,
        #[arg(long)]
        delta: usize,
    },
    /// unipotent Specht periodicity bounds
    Unipotent {
        #[command(flatten)]
        ctx: CtxArgs,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        d: usize,
    },
    /// homology of a three-term complex
    Hom {
        #[command(flatten)]
        ctx: CtxArgs,
        #[arg(long)]
        eps1: usize,
        #[arg(long)]
        eps2: usize,
        #[arg(long)]
        eps3: usize,
        #[arg(long)]
        lam1: i64,
        #[arg(long)]
        lam2: i64,
    },
    /// spectral sequence page bound; windows keyed by total degree
    Spectral {
        #[command(flatten)]
        ctx: CtxArgs,
        #[arg(long)]
        t: i64,
        #[arg(long)]
        k: usize,
        /// eps_1 window entries as degree:value pairs
        #[arg(long, value_delimiter = ',')]
        eps: Vec<String>,
        /// fl window entries as degree:value pairs
        #[arg(long, value_delimiter = ',')]
        fl: Vec<String>,
    },
}

#[derive(Subcommand)]
enum GcohOp {
    /// cohomology dimensions of a group given as JSON
    Dims {
        /// group spec, e.g. {"family":"GL","n":2,"q":3}
        group: String,
        #[arg(long)]
        ell: u64,
        #[arg(long, default_value_t = 3)]
        tmax: usize,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
    /// verification suites on the bigraded transfer algebra
    Verify {
        #[command(subcommand)]
        which: GcohVerifyOp,
    },
}

#[derive(Subcommand)]
enum GcohVerifyOp {
    /// twisted Leibniz rule and surjectivity of the restriction map
    Leibniz {
        #[command(flatten)]
        win: WindowArgs,
    },
    /// freeness of each row over the degree-zero row
    Free {
        #[command(flatten)]
        win: WindowArgs,
    },
    /// the double-coset diagram identity through the maximal parabolic
    Midportion {
        #[command(flatten)]
        win: WindowArgs,
    },
    /// inflation-transfer ratio
    Inftransfer {
        #[command(flatten)]
        win: WindowArgs,
    },
}

#[derive(Args)]
struct WindowArgs {
    #[arg(long, short)]
    q: u64,
    #[arg(long)]
    ell: u64,
    #[arg(long, default_value_t = 3)]
    tmax: usize,
    #[arg(long, default_value_t = 3)]
    nmax: usize,
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
}

#[derive(Subcommand)]
enum SpechtOp {
    /// dimension of the unipotent Specht module over F_ell
    Dim {
        /// partition, comma separated, e.g. 2,1
        #[arg(long, value_delimiter = ',')]
        mu: Vec<usize>,
        #[arg(long, short)]
        q: u64,
        #[arg(long)]
        ell: u64,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
    /// cohomology series n -> dim H^t(GL_n, M_{mu[n]})
    Series {
        #[arg(long, value_delimiter = ',')]
        mu: Vec<usize>,
        #[arg(long, short)]
        q: u64,
        #[arg(long)]
        ell: u64,
        #[arg(long, default_value_t = 0)]
        t: usize,
        #[arg(long, default_value_t = 3)]
        nmax: usize,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
    /// fit a dimension polynomial in q^n from a JSON series file
    Fit {
        /// JSON file {"q": 2, "series": [[n, dim], ..]}
        file: String,
    },
}

#[derive(Subcommand)]
enum VerifyOp {
    /// run the full verification grid
    All {
        #[arg(long, default_value_t = 714)]
        seed: u64,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        ell: Option<u64>,
        /// emit TSV instead of canonical JSON
        #[arg(long)]
        tsv: bool,
        /// include wall-clock timing (breaks byte determinism)
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        budget: Option<u64>,
    },
}

fn parse_element(ctx: &Arc<QContext>, s: &str) -> Result<DElement, QdpError> {
    let terms: Vec<(usize, u64)> = serde_json::from_str(s)?;
    Ok(DElement::from_terms(ctx, &terms))
}

fn element_json(e: &DElement) -> serde_json::Value {
    serde_json::json!(e.terms().collect::<Vec<_>>())
}

fn budget_from_env(default: u64) -> u64 {
    std::env::var("QDP_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(default)
}

fn run_command(cli: Cli) -> Result<i32, QdpError> {
    match cli.command {
        Command::Qbinom { ctx, n, m, integer } => {
            let c = ctx.ctx()?;
            let mut out = serde_json::json!({
                "ell": c.ell(),
                "q": c.q_int(),
                "n": n,
                "m": m,
                "value": c.q_binomial(n, m),
            });
            if integer {
                out["integer"] =
                    serde_json::json!(q_binomial_int(n, m, c.q_int()).to_string());
            }
            print!("{}", emit_json(&out));
            Ok(0)
        }
        Command::Dalg { op } => {
            let out = match op {
                DalgOp::Mul { ctx, a, b } => {
                    let c = ctx.ctx()?;
                    let x = parse_element(&c, &a)?;
                    let y = parse_element(&c, &b)?;
                    element_json(&x.mul(&y)?)
                }
                DalgOp::Derive { ctx, a, iterations } => {
                    let c = ctx.ctx()?;
                    element_json(&parse_element(&c, &a)?.derive(iterations))
                }
                DalgOp::Taylor { ctx, a } => {
                    let c = ctx.ctx()?;
                    serde_json::json!(parse_element(&c, &a)?.taylor_expand())
                }
                DalgOp::Ybasis { ctx, a } => {
                    let c = ctx.ctx()?;
                    let out: Vec<serde_json::Value> = parse_element(&c, &a)?
                        .to_y_basis()
                        .into_iter()
                        .map(|(u, m)| {
                            serde_json::json!({
                                "unit": u,
                                "exponents": m.exponents(),
                            })
                        })
                        .collect();
                    serde_json::json!(out)
                }
            };
            print!("{}", emit_json(&out));
            Ok(0)
        }
        Command::Dmod { op } => match op {
            DmodOp::Analyze { file, trunc } => {
                let text = std::fs::read_to_string(&file)?;
                let spec: ModuleJson = serde_json::from_str(&text)?;
                let module = spec.to_module()?;
                let data = module.carrier(trunc);
                let hilbert = data.dims().to_vec();
                let el = epsilon_lambda(&data)?;
                let cert = predict_period(&data)?;
                let out = serde_json::json!({
                    "hilbert": hilbert,
                    "epsilon": el.epsilon,
                    "lambda": el.lambda,
                    "period": cert.period,
                    "onset": cert.onset,
                    "certified_to": el.certified_to,
                });
                print!("{}", emit_json(&out));
                Ok(0)
            }
            DmodOp::Bounds { which } => {
                let out = match which {
                    BoundOp::Vimod { ctx, t, t0, t1, delta } => {
                        serde_json::to_value(bound_vimod(t, t0, t1, delta, ctx.ctx()?.as_ref()))?
                    }
                    BoundOp::Unipotent { ctx, t, d } => {
                        serde_json::to_value(bound_unipotent(t, d, ctx.ctx()?.as_ref()))?
                    }
                    BoundOp::Hom { ctx, eps1, eps2, eps3, lam1, lam2 } => {
                        serde_json::json!({
                            "epsilon_bound": bound_homology_epsilon(
                                eps1, eps2, eps3, lam1, lam2, ctx.ctx()?.as_ref()
                            )
                        })
                    }
                    BoundOp::Spectral { ctx, t, k, eps, fl } => {
                        let _ = ctx.ctx()?;
                        let parse_pairs = |v: &[String]| -> Result<Vec<(i64, usize)>, QdpError> {
                            v.iter()
                                .map(|s| {
                                    let (a, b) = s.split_once(':').ok_or_else(|| {
                                        QdpError::InvalidInput(format!(
                                            "expected degree:value, got {s}"
                                        ))
                                    })?;
                                    Ok((
                                        a.parse()
                                            .map_err(|_| QdpError::InvalidInput(s.clone()))?,
                                        b.parse()
                                            .map_err(|_| QdpError::InvalidInput(s.clone()))?,
                                    ))
                                })
                                .collect()
                        };
                        let window = SpectralWindow {
                            eps1: parse_pairs(&eps)?,
                            fl: parse_pairs(&fl)?,
                        };
                        serde_json::json!({
                            "epsilon_bound": bound_spectral_epsilon(&window, t, k)
                        })
                    }
                };
                print!("{}", emit_json(&out));
                Ok(0)
            }
        },
        Command::Gcoh { op } => match op {
            GcohOp::Dims { group, ell, tmax, budget } => {
                let spec: GroupSpec = serde_json::from_str(&group)?;
                let g = spec.build()?;
                let ctx = CohCtx::new(ell, tmax, budget_from_env(budget))?;
                let h = ctx.handle(&g);
                let rows: Vec<Vec<String>> = (0..=tmax)
                    .map(|t| vec![t.to_string(), h.dim(t).to_string()])
                    .collect();
                print!("{}", emit_tsv(&["t", "dim"], &rows));
                Ok(0)
            }
            GcohOp::Verify { which } => {
                let mut report = Report::new("gcoh-verify", 0);
                match which {
                    GcohVerifyOp::Leibniz { win } => {
                        let fam = if win.q == 1 {
                            Family::Sym
                        } else {
                            Family::Gl { q: win.q }
                        };
                        let e = BigradedE::new(
                            fam,
                            win.ell,
                            win.tmax,
                            win.nmax,
                            budget_from_env(win.budget),
                        )?;
                        let rep = verify_leibniz(&e)?;
                        report.push(CheckResult::of(
                            "q-leibniz",
                            rep.violations.is_empty(),
                            rep.violations.join("; "),
                        ));
                        report.push(CheckResult::of(
                            "surjectivity",
                            rep.surjectivity_failures.is_empty(),
                            rep.surjectivity_failures.join("; "),
                        ));
                        let units = verify_unit_row(&e, 5)?;
                        report.push(CheckResult::of(
                            "unit-row",
                            units.failures.is_empty(),
                            units.failures.join("; "),
                        ));
                    }
                    GcohVerifyOp::Free { win } => {
                        let fam = if win.q == 1 {
                            Family::Sym
                        } else {
                            Family::Gl { q: win.q }
                        };
                        let e = BigradedE::new(
                            fam,
                            win.ell,
                            win.tmax,
                            win.nmax,
                            budget_from_env(win.budget),
                        )?;
                        for t in 0..=win.tmax {
                            let fr = verify_free_row(&e, t)?;
                            report.push(CheckResult::of(
                                format!("row-{t}"),
                                fr.bound_respected && fr.stability_failures.is_empty(),
                                format!("kernel dims {:?}", fr.kernel_dims),
                            ));
                        }
                    }
                    GcohVerifyOp::Midportion { win } => {
                        for (n, m) in [(1usize, 1usize), (1, 2), (2, 1)] {
                            if n + m > win.nmax {
                                continue;
                            }
                            for t in 0..=win.tmax.min(2) {
                                let rep = verify_mid_portion(
                                    n,
                                    m,
                                    t,
                                    win.q,
                                    win.ell,
                                    budget_from_env(win.budget),
                                )?;
                                report.push(CheckResult::of(
                                    format!("mid-portion-{n}-{m}-t{t}"),
                                    rep.holds,
                                    rep.witness.unwrap_or_default(),
                                ));
                            }
                        }
                    }
                    GcohVerifyOp::Inftransfer { win } => {
                        let (_c, reps) = coeffaceability_instance(
                            1,
                            1,
                            win.q,
                            win.ell,
                            win.tmax.min(2),
                            budget_from_env(win.budget),
                        )?;
                        for rep in reps {
                            report.push(CheckResult::of(
                                format!("inflation-transfer-t{}", rep.t),
                                rep.holds,
                                format!("expected ratio {}", rep.expected_ratio),
                            ));
                        }
                    }
                }
                print!("{}", report.to_canonical_json());
                Ok(report.exit_code())
            }
        },
        Command::Specht { op } => match op {
            SpechtOp::Dim { mu, q, ell, budget } => {
                let c = Composition::new(mu);
                let dim = specht_dim(&c, q, ell, budget_from_env(budget))?;
                let out = serde_json::json!({
                    "mu": c.parts(),
                    "q": q,
                    "ell": ell,
                    "dim": dim,
                });
                print!("{}", emit_json(&out));
                Ok(0)
            }
            SpechtOp::Series { mu, q, ell, t, nmax, budget } => {
                let c = Composition::new(mu);
                let lo = c.size().max(1);
                let (series, bound) = specht_cohomology_series(
                    &c,
                    t,
                    q,
                    ell,
                    lo..=nmax,
                    budget_from_env(budget),
                )?;
                let out = serde_json::json!({
                    "mu": c.parts(),
                    "t": t,
                    "series": series,
                    "prediction": bound,
                });
                print!("{}", emit_json(&out));
                Ok(0)
            }
            SpechtOp::Fit { file } => {
                #[derive(serde::Deserialize)]
                struct FitInput {
                    q: u64,
                    series: Vec<(usize, u64)>,
                }
                let text = std::fs::read_to_string(&file)?;
                let input: FitInput = serde_json::from_str(&text)?;
                let fit = fit_dimension_polynomial(&input.series, input.q)?;
                let out = serde_json::json!({
                    "degree": fit.degree,
                    "onset": fit.onset,
                    "coefficients": fit.coefficient_strings(),
                });
                print!("{}", emit_json(&out));
                Ok(0)
            }
        },
        Command::Verify { op } => match op {
            VerifyOp::All { seed, q, ell, tsv, timing, budget } => {
                let config = RunConfig {
                    seed,
                    only_q: q,
                    only_ell: ell,
                    budget: budget_from_env(budget.unwrap_or(10_000_000)),
                    ..RunConfig::default()
                };
                let start = std::time::Instant::now();
                let mut report = run_verification_grid(&config)?;
                if timing {
                    report.timing_ms = Some(start.elapsed().as_millis() as u64);
                }
                if tsv {
                    print!("{}", report.to_tsv());
                } else {
                    print!("{}", report.to_canonical_json());
                }
                Ok(report.exit_code())
            }
        },
    }
}

/// Entry point: parse, dispatch, report errors on stderr.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match run_command(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
