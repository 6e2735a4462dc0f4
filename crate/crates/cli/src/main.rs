//! `iqg`: exact computations for quasi-split iquantum groups from the command line.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use iquantum::config::{parse_config, shipped_config, Config};
use iquantum::iuea;
use iquantum::klr::{parse_generators, Klr};
use iquantum::qring::{qfact, PowerSeriesTrunc, RatQ};
use iquantum::satake::{flatten, DPWord, IWeight, Node, SatakeDatum};
use iquantum::selftest;
use iquantum::shapes::{self, ShapeMode};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "iqg", version, about = "Exact computations for quasi-split iquantum groups")]
struct Cli {
    /// Configuration file (JSON).
    #[arg(long, global = true, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// A shipped configuration by name, e.g. quasi_split_a2.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Series truncation order; defaults to the configured one.
    #[arg(long, global = true)]
    order: Option<i64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    All,
    CapFree,
    CupCapFree,
}

#[derive(Subcommand)]
enum Command {
    /// Pairs two b-monomials by shape enumeration and by the recursive form.
    Pair {
        #[arg(long = "i", allow_hyphen_values = true)]
        i: String,
        #[arg(long = "j", allow_hyphen_values = true)]
        j: String,
        #[arg(long, default_value = "L0")]
        lambda: String,
        /// Pair b_i against the dual element of the word j instead.
        #[arg(long)]
        nabla: bool,
    },
    /// Checks the iSerre relations.
    Iserre {
        #[arg(long = "i")]
        i: Option<String>,
        #[arg(long = "j")]
        j: Option<String>,
        /// Every ordered pair of distinct nodes.
        #[arg(long)]
        all: bool,
        /// A named weight; without it every named weight is used.
        #[arg(long, conflicts_with = "lambda_range")]
        lambda: Option<String>,
        /// Sweep lambda over LO..HI, with both parities at fixed nodes.
        #[arg(long, allow_hyphen_values = true)]
        lambda_range: Option<String>,
    },
    /// BKL coefficients, their sum and the q-binomial identity.
    Bkl {
        #[arg(long = "i")]
        i: String,
        #[arg(long, default_value = "L0")]
        lambda: String,
        /// Largest m for the coefficient table.
        #[arg(long, default_value_t = 4)]
        m: i64,
    },
    /// Graded rank of a 2-morphism space, or of End(1) with --end.
    Grdim {
        #[arg(long = "i", allow_hyphen_values = true)]
        i: Option<String>,
        #[arg(long = "j", allow_hyphen_values = true)]
        j: Option<String>,
        #[arg(long, default_value = "L0")]
        lambda: String,
        #[arg(long)]
        end: bool,
    },
    /// Lists the shapes between two words with their degrees.
    Shapes {
        #[arg(long, allow_hyphen_values = true)]
        top: String,
        #[arg(long, allow_hyphen_values = true)]
        bottom: String,
        #[arg(long, default_value = "L0")]
        lambda: String,
        #[arg(long, value_enum, default_value = "all")]
        mode: Mode,
    },
    /// Normal forms of stacked generator sequences such as "e(1 2) ; x1 ; s1".
    Klr {
        #[arg(long = "expr", required = true)]
        exprs: Vec<String>,
    },
    /// Runs the acceptance suite on the shipped configurations.
    Selftest {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=10))]
        criterion: Option<u8>,
    },
}

enum Failure {
    Usage(String),
    Lib(iquantum::Error),
}

impl From<iquantum::Error> for Failure {
    fn from(e: iquantum::Error) -> Self {
        Failure::Lib(e)
    }
}

struct Report {
    text: String,
    json: Value,
    ok: bool,
}

type Outcome = Result<Report, Failure>;

fn load(cli: &Cli) -> Result<Config, Failure> {
    match (&cli.config, &cli.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            Ok(parse_config(&text)?)
        }
        (None, Some(stem)) => Ok(shipped_config(stem)?),
        (None, None) => Err(Failure::Usage("this subcommand needs --config or --preset".into())),
    }
}

fn order(cli: &Cli, cfg: &Config) -> Result<i64, Failure> {
    match cli.order {
        Some(n) if n < 0 => Err(Failure::Usage("--order must be nonnegative".into())),
        Some(n) => Ok(n),
        None => Ok(cfg.order),
    }
}

fn node(datum: &SatakeDatum, name: &str) -> Result<Node, Failure> {
    datum.node(name).ok_or_else(|| Failure::Usage(format!("unknown node {name:?}")))
}

fn lam_json(datum: &SatakeDatum, lam: &IWeight) -> Value {
    let mut l = serde_json::Map::new();
    let mut p = serde_json::Map::new();
    for i in datum.nodes() {
        if datum.is_fixed(i) {
            p.insert(datum.name(i).into(), json!(lam.parity(i)));
        } else {
            l.insert(datum.name(i).into(), json!(lam.lam(i)));
        }
    }
    json!({"lam": l, "parity": p})
}

fn lam_text(datum: &SatakeDatum, lam: &IWeight) -> String {
    let parts: Vec<String> = datum
        .nodes()
        .map(|i| {
            if datum.is_fixed(i) {
                format!("p{}={}", datum.name(i), lam.parity(i))
            } else {
                format!("l{}={}", datum.name(i), lam.lam(i))
            }
        })
        .collect();
    parts.join(" ")
}

fn series_json(s: &PowerSeriesTrunc) -> Value {
    json!({"poly": s.to_poly().to_string(), "order": s.order(), "text": s.to_string()})
}

/// `Π [n_k]^!` over the runs of a divided-power word.
fn dp_factor(datum: &SatakeDatum, w: &DPWord) -> Result<RatQ, Failure> {
    let mut f = RatQ::one();
    for &(i, n) in w {
        if n > 1 && datum.is_fixed(i) {
            return Err(Failure::Usage(format!(
                "shape sums do not cover idivided powers at the tau-fixed node {}",
                datum.name(i)
            )));
        }
        f = &f * &RatQ::from(qfact(n, datum.d(i)));
    }
    Ok(f)
}

fn cmd_pair(cli: &Cli, i: &str, j: &str, lambda: &str, nabla: bool) -> Outcome {
    let cfg = load(cli)?;
    let datum = &cfg.datum;
    let lam = cfg.weight(lambda)?;
    let wi = datum.parse_dpword(i)?;
    let wj = datum.parse_dpword(j)?;
    let bi = iuea::b_word(datum, &wi, lam);
    let (combi, alg) = if nabla {
        let fi = dp_factor(datum, &wi)?;
        let plain_j = flatten(&wj);
        let combi = shapes::pair_b_nabla(datum, &flatten(&wi), &plain_j, lam).checked_div(&fi)?;
        (combi, iuea::ipair_nabla(datum, &bi, &plain_j))
    } else {
        let f = &dp_factor(datum, &wi)? * &dp_factor(datum, &wj)?;
        let combi = shapes::pair_b(datum, &flatten(&wi), &flatten(&wj), lam).checked_div(&f)?;
        (combi, iuea::ipair(datum, &bi, &iuea::b_word(datum, &wj, lam)))
    };
    let ok = combi == alg;
    let text = format!("shapes: {combi}\nrecursive: {alg}\nmatch: {ok}\n");
    let json = json!({
        "i": datum.format_dpword(&wi), "j": datum.format_dpword(&wj), "lambda": lambda,
        "nabla": nabla, "shapes": combi.to_string(), "recursive": alg.to_string(), "match": ok,
    });
    Ok(Report { text, json, ok })
}

fn parse_range(text: &str) -> Result<(i64, i64), Failure> {
    let bad = || Failure::Usage(format!("expected LO..HI, got {text:?}"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn cmd_iserre(
    cli: &Cli,
    i: Option<&str>,
    j: Option<&str>,
    all: bool,
    lambda: Option<&str>,
    range: Option<&str>,
) -> Outcome {
    let cfg = load(cli)?;
    let datum = &cfg.datum;
    let pairs: Vec<(Node, Node)> = match (all, i, j) {
        (true, None, None) => {
            datum.nodes().flat_map(|a| datum.nodes().filter(move |&b| b != a).map(move |b| (a, b))).collect()
        }
        (false, Some(a), Some(b)) => {
            let (a, b) = (node(datum, a)?, node(datum, b)?);
            if a == b {
                return Err(Failure::Usage("--i and --j must differ".into()));
            }
            vec![(a, b)]
        }
        _ => return Err(Failure::Usage("give either --all or both --i and --j".into())),
    };
    let weights: Vec<(String, IWeight)> = match (lambda, range) {
        (Some(name), _) => vec![(name.to_string(), cfg.weight(name)?.clone())],
        (None, Some(r)) => {
            let (lo, hi) = parse_range(r)?;
            datum.weight_sweep(lo, hi).into_iter().map(|w| (lam_text(datum, &w), w)).collect()
        }
        (None, None) => cfg.weights.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
    };
    let mut text = String::new();
    let mut cases = Vec::new();
    let mut ok = true;
    for (label, lam) in &weights {
        for &(a, b) in &pairs {
            let rep = iuea::iserre_check(datum, a, b, lam)?;
            ok &= rep.equal;
            writeln!(
                text,
                "i={} j={} [{label}] coefficient {} equal: {}",
                datum.name(a),
                datum.name(b),
                rep.rhs_coeff,
                rep.equal
            )
            .expect("writing to a String");
            cases.push(json!({
                "i": datum.name(a), "j": datum.name(b), "lambda": lam_json(datum, lam),
                "coefficient": rep.rhs_coeff.to_string(), "equal": rep.equal,
            }));
        }
    }
    writeln!(text, "all equal: {ok} ({} cases)", cases.len()).expect("writing to a String");
    Ok(Report { text, json: json!({"cases": cases, "all_equal": ok}), ok })
}

fn cmd_bkl(cli: &Cli, i: &str, lambda: &str, m_max: i64) -> Outcome {
    let cfg = load(cli)?;
    let datum = &cfg.datum;
    let i = node(datum, i)?;
    let lam = cfg.weight(lambda)?;
    if !(1..=8).contains(&m_max) {
        return Err(Failure::Usage("--m must lie in 1..=8".into()));
    }
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut ok = true;
    for m in 1..=m_max {
        for n in 0..=m {
            let a = iuea::f_coeff(datum, n, m, i, lam)?;
            let b = iuea::f_coeff_oracle(datum, n, m, i, lam)?;
            ok &= a == b;
            writeln!(text, "f[{n},{m}] = {a} match: {}", a == b).expect("writing to a String");
            rows.push(json!({"n": n, "m": m, "closed": a.to_string(), "count": b.to_string(), "match": a == b}));
        }
    }
    let sum = iuea::bkl_sum(datum, i, lam)?;
    let prod = iuea::bkl_product(datum, i, lam);
    ok &= sum == prod;
    writeln!(text, "sum: {sum}\nproduct: {prod}\nsum match: {}", sum == prod).expect("writing to a String");
    let mut ident = Vec::new();
    for m in 1..=m_max.max(8) {
        let [p, l, r] = iuea::binomial_identity_sides(m);
        let holds = p == l && l == r;
        ok &= holds;
        writeln!(text, "identity m={m}: {holds}").expect("writing to a String");
        ident.push(json!({"m": m, "holds": holds, "value": p.to_string()}));
    }
    let json = json!({
        "coefficients": rows, "sum": sum.to_string(), "product": prod.to_string(),
        "sum_match": sum == prod, "identity": ident, "ok": ok,
    });
    Ok(Report { text, json, ok })
}

fn cmd_grdim(cli: &Cli, i: Option<&str>, j: Option<&str>, lambda: &str, end: bool) -> Outcome {
    let cfg = load(cli)?;
    let datum = &cfg.datum;
    let n = order(cli, &cfg)?;
    if end {
        if i.is_some() || j.is_some() {
            return Err(Failure::Usage("--end takes no words".into()));
        }
        let g = shapes::end_grdim(datum, n);
        return Ok(Report { text: format!("end: {g}\n"), json: json!({"end": series_json(&g)}), ok: true });
    }
    let (Some(i), Some(j)) = (i, j) else {
        return Err(Failure::Usage("give --i and --j, or --end".into()));
    };
    let lam = cfg.weight(lambda)?;
    let wi = flatten(&datum.parse_dpword(i)?);
    let wj = flatten(&datum.parse_dpword(j)?);
    let rank = shapes::hom_rank(datum, &wi, &wj, lam, n);
    let from_pair = shapes::hom_rank_from_pairing(datum, &wi, &wj, lam, n)?;
    let ok = rank == from_pair && rank.is_nonnegative();
    let text = format!("rank: {rank}\npairing: {from_pair}\nmatch: {ok}\n");
    let json = json!({"rank": series_json(&rank), "pairing": series_json(&from_pair), "match": ok});
    Ok(Report { text, json, ok })
}

fn cmd_shapes(cli: &Cli, top: &str, bottom: &str, lambda: &str, mode: Mode) -> Outcome {
    let cfg = load(cli)?;
    let datum = &cfg.datum;
    let lam = cfg.weight(lambda)?;
    let top = flatten(&datum.parse_dpword(top)?);
    let bottom = flatten(&datum.parse_dpword(bottom)?);
    let mode = match mode {
        Mode::All => ShapeMode::All,
        Mode::CapFree => ShapeMode::CapFree,
        Mode::CupCapFree => ShapeMode::CupCapFree,
    };
    let mut text = String::new();
    let mut list = Vec::new();
    let mut ok = true;
    for s in shapes::enumerate(datum, &top, &bottom, mode) {
        let (a, b) = (shapes::degree(&s, lam, datum), shapes::degree_b(&s, lam, datum));
        ok &= a == b;
        writeln!(text, "{} | degree {a}", s.display(datum)).expect("writing to a String");
        list.push(json!({
            "cups": s.cups, "caps": s.caps, "strands": s.props, "degree": a, "degree_check": b,
        }));
    }
    writeln!(text, "{} shapes", list.len()).expect("writing to a String");
    let json = json!({
        "top": datum.format_word(&top), "bottom": datum.format_word(&bottom), "shapes": list, "degrees_agree": ok,
    });
    Ok(Report { text, json, ok })
}

fn cmd_klr(cli: &Cli, exprs: &[String]) -> Outcome {
    let cfg = load(cli)?;
    let datum = &cfg.datum;
    let eng = Klr::new(datum, cfg.qtable()?);
    let mut text = String::new();
    let mut out = Vec::new();
    for e in exprs {
        let (bottom, gens) = parse_generators(datum, e)?;
        let x = eng.evaluate(&bottom, &gens)?;
        let nf = x.display(datum).to_string();
        let degrees: Vec<i64> = x.degrees(datum).into_iter().collect();
        writeln!(text, "{e} = {nf}").expect("writing to a String");
        out.push(json!({
            "input": e, "normal_form": nf, "degrees": degrees,
            "top": datum.format_word(x.top()), "bottom": datum.format_word(x.bottom()),
        }));
    }
    Ok(Report { text, json: json!({"products": out}), ok: true })
}

fn cmd_selftest(criterion: Option<u8>) -> Outcome {
    let data = selftest::acceptance_suite()?;
    let ids: Vec<u8> = match criterion {
        Some(c) => vec![c],
        None => (1..=10).collect(),
    };
    let results: Vec<_> = ids.iter().filter_map(|&id| selftest::run_criterion(id, &data)).collect();
    let ok = results.iter().all(|r| r.passed);
    let mut text = String::new();
    for r in &results {
        writeln!(text, "{r}").expect("writing to a String");
    }
    let passed = results.iter().filter(|r| r.passed).count();
    writeln!(text, "{passed} of {} criteria passed", results.len()).expect("writing to a String");
    let json = json!({"criteria": results, "passed": ok});
    Ok(Report { text, json, ok })
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Pair { i, j, lambda, nabla } => cmd_pair(cli, i, j, lambda, *nabla),
        Command::Iserre { i, j, all, lambda, lambda_range } => {
            cmd_iserre(cli, i.as_deref(), j.as_deref(), *all, lambda.as_deref(), lambda_range.as_deref())
        }
        Command::Bkl { i, lambda, m } => cmd_bkl(cli, i, lambda, *m),
        Command::Grdim { i, j, lambda, end } => cmd_grdim(cli, i.as_deref(), j.as_deref(), lambda, *end),
        Command::Shapes { top, bottom, lambda, mode } => cmd_shapes(cli, top, bottom, lambda, *mode),
        Command::Klr { exprs } => cmd_klr(cli, exprs),
        Command::Selftest { criterion } => cmd_selftest(*criterion),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report.json).expect("JSON values serialize"));
            } else {
                print!("{}", report.text);
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            let msg = match f {
                Failure::Usage(m) => m,
                Failure::Lib(e) => e.to_string(),
            };
            if cli.json {
                println!("{}", json!({"error": msg}));
            }
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
