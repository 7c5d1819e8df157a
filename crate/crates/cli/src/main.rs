use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use padic_epsilon::characters::{gauss_sum, gross_koblitz_check, stickelberger_valuation};
use padic_epsilon::epsilon::{determinant_formula_check, required_digits, working_context, RationalForm};
use padic_epsilon::global::{
    functional_equation_check, l_polynomial_with, verify_lastcor, verify_product_formula, EpsilonReport,
    InfinityMode, LOptions, RankOneGlobalModule,
};
use padic_epsilon::local_modules::RankOneLocalModule;
use padic_epsilon::{Ctx, Error};

const SCHEMA: &str = "padic-epsilon/v1";

#[derive(Parser)]
#[command(name = "padic-epsilon", version, about = "p-adic epsilon factors of rank-one isocrystals on the projective line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Common {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    f: Option<usize>,
    /// Target precision in π-digits.
    #[arg(long)]
    precision: Option<i64>,
    /// Digits two sides must share; defaults to precision − 4.
    #[arg(long)]
    threshold_digits: Option<i64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include wall-clock runtimes (makes output nondeterministic).
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Gauss sum with Stickelberger and Gross–Koblitz checks.
    Gauss {
        #[arg(long)]
        a: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Run verifiers on the module described by a config file.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Which::All)]
        which: Which,
        #[command(flatten)]
        common: Common,
    },
    /// L-polynomial of the configured module as TSV.
    Lfunc {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Pf,
    Lastcor,
    Detformula,
    Funceq,
    All,
}

#[derive(Deserialize, Serialize, Clone)]
#[serde(deny_unknown_fields)]
struct KummerEntry {
    /// Index of a rational point of 𝔸¹.
    point: u64,
    a: i64,
}

#[derive(Deserialize, Serialize, Clone)]
#[serde(deny_unknown_fields)]
struct OmegaConfig {
    num: Vec<u64>,
    den: Vec<u64>,
}

#[derive(Deserialize, Serialize, Clone, Default)]
#[serde(deny_unknown_fields)]
struct GridConfig {
    /// Exponents substituted at the first Kummer point.
    #[serde(default)]
    a: Vec<i64>,
    #[serde(default)]
    dwork_c: Vec<u64>,
}

#[derive(Deserialize, Serialize, Clone)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    p: Option<u64>,
    f: Option<usize>,
    precision: Option<i64>,
    #[serde(default)]
    kummer: Vec<KummerEntry>,
    #[serde(default)]
    dwork_c: u64,
    /// Canonical serialization or an integer.
    scalar: Option<Value>,
    #[serde(default)]
    twist: i64,
    omega: Option<OmegaConfig>,
    infinity: Option<String>,
    max_degree_override: Option<usize>,
    grid: Option<GridConfig>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::NotPrime(_) | Error::InvalidDegree(_) | Error::InvalidPrecision(_) => 2,
            Error::FieldTooLarge | Error::PrecisionTooLarge => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

struct Resolved {
    p: u64,
    f: usize,
    precision: i64,
    threshold: i64,
}

fn resolve(common: &Common, cfg: Option<&RunConfig>) -> Result<Resolved, Failure> {
    let p = common.p.or(cfg.and_then(|c| c.p)).ok_or_else(|| usage("missing p"))?;
    let f = common.f.or(cfg.and_then(|c| c.f)).unwrap_or(1);
    let precision = common.precision.or(cfg.and_then(|c| c.precision)).unwrap_or(30);
    if precision < 8 {
        return Err(usage("precision must be at least 8"));
    }
    let threshold = common.threshold_digits.unwrap_or(required_digits(precision));
    Ok(Resolved { p, f, precision, threshold })
}

fn context(r: &Resolved) -> Result<Ctx, Failure> {
    working_context(r.p, r.f, r.precision).map_err(|e| usage(e.to_string()))
}

fn load_config(path: &PathBuf) -> Result<RunConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("malformed config: {e}")))
}

fn fq_index(ctx: &Ctx, i: u64, what: &str) -> Result<padic_epsilon::FqElem, Failure> {
    if i >= ctx.q() {
        return Err(usage(format!("{what} index {i} out of range for q = {}", ctx.q())));
    }
    Ok(ctx.residue_field().from_index(i))
}

fn build_module(ctx: &Ctx, cfg: &RunConfig, first_a: Option<i64>, dwork: u64) -> Result<RankOneGlobalModule, Failure> {
    let mut points = Vec::new();
    for (i, k) in cfg.kummer.iter().enumerate() {
        let a = if i == 0 { first_a.unwrap_or(k.a) } else { k.a };
        points.push((fq_index(ctx, k.point, "point")?, a));
    }
    let scalar = match &cfg.scalar {
        None => ctx.one(),
        Some(Value::Number(n)) => ctx.from_int(n.as_i64().ok_or_else(|| usage("scalar must be an integer"))?),
        Some(Value::String(s)) => ctx.parse(s).map_err(|e| usage(e.to_string()))?,
        Some(_) => return Err(usage("scalar must be a string or an integer")),
    };
    let mode = match cfg.infinity.as_deref() {
        None | Some("auto") => InfinityMode::Auto,
        Some("remove") => InfinityMode::Remove,
        Some("keep") => InfinityMode::Keep,
        Some(other) => return Err(usage(format!("unknown infinity mode {other:?}"))),
    };
    let c = fq_index(ctx, dwork, "dwork_c")?;
    RankOneGlobalModule::new(ctx, points, c, scalar, cfg.twist, mode).map_err(|e| usage(e.to_string()))
}

fn modules(ctx: &Ctx, cfg: &RunConfig) -> Result<Vec<RankOneGlobalModule>, Failure> {
    let grid = cfg.grid.clone().unwrap_or_default();
    if !grid.a.is_empty() && cfg.kummer.is_empty() {
        return Err(usage("grid.a needs at least one kummer point"));
    }
    let exps: Vec<Option<i64>> =
        if grid.a.is_empty() { vec![None] } else { grid.a.iter().map(|&a| Some(a)).collect() };
    let cs: Vec<u64> = if grid.dwork_c.is_empty() { vec![cfg.dwork_c] } else { grid.dwork_c.clone() };
    let mut out = Vec::new();
    for a in &exps {
        for &c in &cs {
            out.push(build_module(ctx, cfg, *a, c)?);
        }
    }
    Ok(out)
}

fn omega(ctx: &Ctx, cfg: &RunConfig) -> Result<RationalForm, Failure> {
    match &cfg.omega {
        None => Ok(RationalForm::dx(ctx.residue_field())),
        Some(o) => RationalForm::from_indices(ctx.residue_field(), &o.num, &o.den).map_err(|e| usage(e.to_string())),
    }
}

fn report_json(r: &EpsilonReport, timings: bool) -> Value {
    let mut v = json!({
        "check": r.check,
        "module": r.module,
        "omega": r.omega,
        "lhs": r.lhs.to_string(),
        "rhs": r.rhs.to_string(),
        "local_factors": r.local_factors.iter().map(|(x, e)| json!({"point": x, "value": e.to_string()})).collect::<Vec<_>>(),
        "agree_digits": r.agree_digits,
        "required_digits": r.required_digits,
        "pass": r.pass,
    });
    if timings {
        v["runtime_ms"] = json!(r.runtime.as_secs_f64() * 1e3);
    }
    v
}

fn error_json(check: &str, module: &str, e: &Error) -> Value {
    json!({"check": check, "module": module, "pass": false, "error": e.to_string()})
}

fn emit(common: &Common, text: &str) -> Result<(), Failure> {
    match &common.out {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_gauss(a: i64, common: &Common) -> Result<bool, Failure> {
    let r = resolve(common, None)?;
    let ctx = context(&r)?;
    let value = gauss_sum(&ctx, a)?;
    let expected_val = stickelberger_valuation(&ctx, a);
    let gk = gross_koblitz_check(&ctx, a)?;
    let gk_pass = gk.agree_digits >= r.threshold;
    let st_pass = value.valuation() == Some(expected_val);
    let out = json!({
        "schema": SCHEMA,
        "command": "gauss",
        "p": r.p, "f": r.f, "a": a, "precision": r.precision, "threshold_digits": r.threshold,
        "value": value.to_string(),
        "stickelberger": {"valuation": value.valuation(), "expected": expected_val, "pass": st_pass},
        "gross_koblitz": {"rhs": gk.rhs.to_string(), "agree_digits": gk.agree_digits, "pass": gk_pass},
        "pass": gk_pass && st_pass,
    });
    emit(common, &(serde_json::to_string_pretty(&out).expect("json") + "\n"))?;
    Ok(gk_pass && st_pass)
}

fn cmd_verify(path: &PathBuf, which: Which, common: &Common) -> Result<bool, Failure> {
    let cfg = load_config(path)?;
    let r = resolve(common, Some(&cfg))?;
    let ctx = context(&r)?;
    let opts = LOptions { workers: common.workers, max_degree: cfg.max_degree_override, required_digits: r.threshold };
    let form = omega(&ctx, &cfg)?;
    let mods = modules(&ctx, &cfg)?;
    let mut reports = Vec::new();
    let mut all = true;
    let mut push = |v: Value, reports: &mut Vec<Value>| {
        all &= v["pass"].as_bool().unwrap_or(false) || v.get("skipped").is_some();
        reports.push(v);
    };
    if which == Which::Detformula || which == Which::All {
        let scalar = mods.first().map(|g| g.scalar().clone()).unwrap_or_else(|| ctx.one());
        for a in 0..ctx.q() as i64 - 1 {
            let m = RankOneLocalModule::kummer(&ctx, a).with_scalar(&scalar)?.twist(cfg.twist);
            let v = match determinant_formula_check(&m, r.threshold) {
                Ok(c) => json!({
                    "check": "detformula", "module": m.to_string(), "lhs": c.lhs.to_string(), "rhs": c.rhs.to_string(),
                    "agree_digits": c.agree_digits, "required_digits": c.required_digits, "pass": c.pass,
                }),
                Err(e) => error_json("detformula", &m.to_string(), &e),
            };
            push(v, &mut reports);
        }
    }
    for g in &mods {
        if which == Which::Pf || which == Which::All {
            let v = match verify_product_formula(g, &form, &opts) {
                Ok(rep) => report_json(&rep, common.timings),
                Err(e) => error_json("pf", &g.describe(), &e),
            };
            push(v, &mut reports);
        }
        if which == Which::Lastcor || which == Which::All {
            if g.is_ramified_at_infinity() {
                if which == Which::Lastcor {
                    return Err(usage(format!("lastcor needs a module unramified at infinity: {}", g.describe())));
                }
                push(json!({"check": "lastcor", "module": g.describe(), "skipped": "ramified at infinity"}), &mut reports);
            } else {
                let v = match verify_lastcor(g, &opts) {
                    Ok(rep) => report_json(&rep, common.timings),
                    Err(e) => error_json("lastcor", &g.describe(), &e),
                };
                push(v, &mut reports);
            }
        }
        if which == Which::Funceq || which == Which::All {
            let v = match functional_equation_check(g, &opts) {
                Ok(fe) => json!({
                    "check": "funceq", "module": fe.module, "epsilon": fe.epsilon.to_string(), "chi": fe.chi,
                    "lhs": fe.lhs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "rhs": fe.rhs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "agree_digits": fe.agree_digits, "required_digits": fe.required_digits, "pass": fe.pass,
                }),
                Err(e) => error_json("funceq", &g.describe(), &e),
            };
            push(v, &mut reports);
        }
    }
    let out = json!({
        "schema": SCHEMA,
        "command": "verify",
        "config": cfg,
        "resolved": {"p": r.p, "f": r.f, "precision": r.precision, "threshold_digits": r.threshold, "workers": common.workers},
        "reports": reports,
        "all_pass": all,
    });
    emit(common, &(serde_json::to_string_pretty(&out).expect("json") + "\n"))?;
    Ok(all)
}

fn cmd_lfunc(path: &PathBuf, common: &Common) -> Result<bool, Failure> {
    let cfg = load_config(path)?;
    let r = resolve(common, Some(&cfg))?;
    let ctx = context(&r)?;
    let opts = LOptions { workers: common.workers, max_degree: cfg.max_degree_override, required_digits: r.threshold };
    let mut text = format!("# schema={SCHEMA}\n# command=lfunc p={} f={} precision={}\n", r.p, r.f, r.precision);
    let mut all = true;
    for g in modules(&ctx, &cfg)? {
        text.push_str(&format!("# module={}\n", g.describe()));
        match l_polynomial_with(&g, &opts) {
            Ok(l) => {
                let (h0, h1, h2) = l.dims();
                text.push_str(&format!("# h0={h0} h1={h1} h2={h2} chi={}\n", l.euler_characteristic()));
                if let Some(e) = &l.h0_eigenvalue {
                    text.push_str(&format!("# h0_eigenvalue={e}\n"));
                }
                if let Some(e) = &l.h2_eigenvalue {
                    text.push_str(&format!("# h2_eigenvalue={e}\n"));
                }
                text.push_str(&l.to_tsv());
            }
            Err(e) => {
                all = false;
                text.push_str(&format!("# error={e}\n"));
            }
        }
    }
    emit(common, &text)?;
    Ok(all)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Gauss { a, common } => cmd_gauss(*a, common),
        Command::Verify { config, which, common } => cmd_verify(config, *which, common),
        Command::Lfunc { config, common } => cmd_lfunc(config, common),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
