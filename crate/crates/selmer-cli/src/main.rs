use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use selmer::arith::{is_prime, parse_rat, Int, Place, Rat};
use selmer::descent_global::{elliptic_ledger, evaluation_places, hyperelliptic_ledger, ClassData, GlobalLedger};
use selmer::descent_local::{i2_oracle_halving, i2_order_with, local_report_with, HalvingOutcome, LocalConfig, LocalDescentReport};
use selmer::elliptic::{velu_from_kernel_x, IsogenyMap, Point, WeierstrassModel};
use selmer::jacobian::{image_table_with, parse_points, tfae_test, HyperellipticCurve};
use selmer::poly::{HenselConfig, RatPoly};
use selmer::tate::tate_algorithm;
use selmer::Error;

#[derive(Parser, Debug)]
#[command(name = "selmer", version, about = "Local and global 2-descent for elliptic curves and hyperelliptic Jacobians over Q")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Table)]
    format: Format,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0x5e1)]
    seed: u64,
    /// Maximum p-adic precision for Hensel lifting (20..=4096).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(20..=4096))]
    hensel_cap: Option<u32>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tate's algorithm at one prime.
    Tate {
        /// `[a1,a2,a3,a4,a6]`, `[a4,a6]` or a file containing one.
        curve: String,
        /// A prime.
        #[arg(short)]
        p: String,
    },
    /// Local groups C, S and I for an isogeny.
    Local {
        /// A curve, as for `tate`.
        curve: String,
        /// A prime or `inf`.
        #[arg(short, conflicts_with = "all_bad")]
        p: Option<String>,
        /// Every place in T: the real place, the bad primes and the primes dividing the degree.
        #[arg(long)]
        all_bad: bool,
        /// `mul:2`, `velu:<x>` (degree 2 or 3, inferred from x).
        #[arg(long, default_value = "mul:2")]
        isogeny: String,
    },
    /// Global ledger for an elliptic curve or `Y^2 = f(X)`.
    Ledger {
        /// A curve `[..]` or a polynomial in X.
        subject: String,
        /// File of class-group 2-ranks for the factor fields of f.
        #[arg(long)]
        class_data: Option<String>,
        /// File of known rational points, one per line.
        #[arg(long)]
        points: Option<String>,
    },
    /// Table of X - T images at one place.
    Xt {
        /// f in X, or a file containing it.
        poly: String,
        /// File of points, one per line.
        #[arg(long)]
        points: String,
        /// A prime or `inf`.
        #[arg(short)]
        p: String,
    },
    /// Cohomological triviality test for f.
    Tfae {
        /// f in X, or a file containing it.
        poly: String,
    },
    /// Compare the case analysis for I with the half-point count.
    Oracle {
        /// A curve, or `family` for random curves Y^2 = (X - pa)(X - pb)(X - pc).
        curve: String,
        /// A prime; required unless the curve is `family`.
        #[arg(short)]
        p: Option<String>,
        /// Number of random curves in family mode.
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

fn input_err(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}

/// Reads `arg` as a file if one exists at that path.
fn text_arg(arg: &str) -> Result<String, Error> {
    let path = Path::new(arg);
    if path.is_file() {
        let s = std::fs::read_to_string(path).map_err(|e| input_err(format!("{arg}: {e}")))?;
        Ok(s.lines().filter(|l| !l.trim_start().starts_with('#')).collect::<Vec<_>>().join("\n").trim().to_string())
    } else {
        Ok(arg.to_string())
    }
}

fn read_file(path: &str) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| input_err(format!("{path}: {e}")))
}

fn prime_arg(s: &str) -> Result<Int, Error> {
    let p: Int = s.trim().parse().map_err(|_| input_err(format!("not a prime: {s:?}")))?;
    if !is_prime(&p) {
        return Err(input_err(format!("{p} is not prime")));
    }
    Ok(p)
}

fn place_arg(s: &str) -> Result<Place, Error> {
    let v = Place::parse(s)?;
    if let Place::Finite(p) = &v {
        prime_arg(&p.to_string())?;
    }
    Ok(v)
}

fn isogeny_arg(m: &WeierstrassModel, spec: &str) -> Result<IsogenyMap, Error> {
    match spec.split_once(':') {
        Some(("mul", n)) => {
            let n: u32 = n.parse().map_err(|_| input_err(format!("bad multiplier {n:?}")))?;
            IsogenyMap::multiplication(m, n)
        }
        Some(("velu", x)) => {
            let x = parse_rat(x)?;
            let degree = if m.two_division_cubic().eval(&x) == Rat::from_integer(0.into()) { 2 } else { 3 };
            velu_from_kernel_x(m, &x, degree)
        }
        _ => Err(input_err(format!("isogeny must be mul:<n> or velu:<x>, got {spec:?}"))),
    }
}

/// Lines `x,y` or `(x,y)`; `#` starts a comment.
fn parse_curve_points(text: &str, m: &WeierstrassModel) -> Result<Vec<Point>, Error> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let inner = line.trim_start_matches('(').trim_end_matches(')');
        let (x, y) = inner.split_once(',').ok_or_else(|| input_err(format!("expected x,y: {line:?}")))?;
        let pt = Point::affine(parse_rat(x)?, parse_rat(y)?);
        if !m.contains(&pt) {
            return Err(input_err(format!("{line} is not on the curve")));
        }
        out.push(pt);
    }
    Ok(out)
}

fn emit<T: Serialize>(format: Format, value: &T, table: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(value).expect("serializable") + "\n",
        Format::Table => table(),
    }
}

fn local_table(reports: &[LocalDescentReport]) -> String {
    let mut s = String::new();
    writeln!(s, "{:>6}  {:>4}  {:>4}  {:>4}  {:>8}", "place", "C", "S", "I", "kodaira").unwrap();
    for r in reports {
        let k = r.kodaira.map(|k| k.to_string()).unwrap_or_else(|| "-".into());
        writeln!(s, "{:>6}  {:>4}  {:>4}  {:>4}  {:>8}", r.place.to_string(), r.order_c, r.order_s, r.order_i, k).unwrap();
    }
    for r in reports {
        for e in &r.evidence {
            let verdict = match e.in_image {
                Some(true) => "in (tau-1)E(M)",
                Some(false) => "not in (tau-1)E(M)",
                None => "undecided",
            };
            writeln!(s, "{}: {} {}: {}", r.place, e.point, verdict, e.rule).unwrap();
        }
        for n in &r.notes {
            writeln!(s, "{}: {}", r.place, n).unwrap();
        }
    }
    s
}

#[derive(Serialize)]
struct OracleRow {
    curve: String,
    p: String,
    i2_order: u64,
    oracle: HalvingOutcome,
    agree: Option<bool>,
}

fn oracle_row(m: &WeierstrassModel, p: &Int, cfg: &LocalConfig) -> Result<OracleRow, Error> {
    let two = IsogenyMap::multiplication(m, 2)?;
    let (order, _) = i2_order_with(m, &two, p, cfg)?;
    let oracle = i2_oracle_halving(m, p)?;
    let agree = match &oracle {
        HalvingOutcome::Order(n, _) => Some(*n == order),
        HalvingOutcome::Inapplicable(_) => None,
    };
    let a = m.a_invariants();
    let curve = format!("[{},{},{},{},{}]", a[0], a[1], a[2], a[3], a[4]);
    Ok(OracleRow { curve, p: p.to_string(), i2_order: order, oracle, agree })
}

fn family_curve(rng: &mut ChaCha8Rng) -> (WeierstrassModel, Int) {
    const PRIMES: [i64; 24] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];
    loop {
        let p = PRIMES[rng.gen_range(0..PRIMES.len())];
        let (a, b, c): (i64, i64, i64) = (rng.gen_range(-20..=20), rng.gen_range(-20..=20), rng.gen_range(-20..=20));
        let distinct_mod_p = [(a, b), (a, c), (b, c)].iter().all(|(x, y)| (x - y).rem_euclid(p) != 0);
        if !distinct_mod_p {
            continue;
        }
        // (X - pa)(X - pb)(X - pc)
        let (ea, eb, ec) = (p * a, p * b, p * c);
        let a2 = -(ea + eb + ec);
        let a4 = ea * eb + ea * ec + eb * ec;
        let a6 = -ea * eb * ec;
        if let Ok(m) = WeierstrassModel::from_ints([0, a2, 0, a4, a6]) {
            return (m, Int::from(p));
        }
    }
}

fn run(cli: &Cli) -> Result<String, Error> {
    let mut hensel = HenselConfig::default();
    if let Some(cap) = cli.hensel_cap {
        hensel.cap = cap;
        hensel.start = hensel.start.min(cap);
    }
    let cfg = LocalConfig { hensel };
    let fmt = cli.format;
    match &cli.command {
        Command::Tate { curve, p } => {
            let m = WeierstrassModel::parse(&text_arg(curve)?)?;
            let p = prime_arg(p)?;
            let rd = tate_algorithm(&m, &p)?;
            Ok(emit(fmt, &rd, || {
                let mut s = String::new();
                writeln!(s, "p = {}", rd.p).unwrap();
                writeln!(s, "kodaira = {}", rd.kodaira).unwrap();
                writeln!(s, "v(disc_min) = {}", rd.v_disc_min).unwrap();
                writeln!(s, "conductor exponent = {}", rd.conductor_exponent).unwrap();
                writeln!(s, "c_p = {}", rd.tamagawa).unwrap();
                writeln!(s, "component group = {}", rd.geometric_group).unwrap();
                writeln!(s, "split = {}", rd.split).unwrap();
                writeln!(s, "frobenius order = {}", rd.frobenius_order).unwrap();
                let a = rd.minimal_model.a_invariants();
                writeln!(s, "minimal model = [{},{},{},{},{}]", a[0], a[1], a[2], a[3], a[4]).unwrap();
                s
            }))
        }
        Command::Local { curve, p, all_bad, isogeny } => {
            let m = WeierstrassModel::parse(&text_arg(curve)?)?;
            let phi = isogeny_arg(&m, isogeny)?;
            let places = match (p, all_bad) {
                (Some(p), false) => vec![place_arg(p)?],
                (None, true) => evaluation_places(&m, &phi)?,
                _ => return Err(input_err("give -p <place> or --all-bad")),
            };
            let reports = places.iter().map(|v| local_report_with(&m, &phi, v, &cfg)).collect::<Result<Vec<_>, _>>()?;
            Ok(emit(fmt, &reports, || local_table(&reports)))
        }
        Command::Ledger { subject, class_data, points } => {
            let text = text_arg(subject)?;
            let cd = class_data.as_deref().map(|f| ClassData::parse(&read_file(f)?)).transpose()?;
            let points = points.as_deref().map(read_file).transpose()?.unwrap_or_default();
            let ledger: GlobalLedger = if text.trim_start().starts_with('[') {
                let m = WeierstrassModel::parse(&text)?;
                let pts = parse_curve_points(&points, &m)?;
                elliptic_ledger(&m, cd.as_ref(), &pts, &cfg)?
            } else {
                let c = HyperellipticCurve::parse(&text)?;
                let pts = parse_points(&points, &c)?;
                hyperelliptic_ledger(&c, cd.as_ref(), &pts)?
            };
            Ok(emit(fmt, &ledger, || ledger.to_string()))
        }
        Command::Xt { poly, points, p } => {
            let c = HyperellipticCurve::parse(&text_arg(poly)?)?;
            let pts = parse_points(&read_file(points)?, &c)?;
            let v = place_arg(p)?;
            let table = image_table_with(&c, &pts, &v, &hensel)?;
            Ok(emit(fmt, &table, || table.to_string()))
        }
        Command::Tfae { poly } => {
            let f = RatPoly::parse(&text_arg(poly)?)?;
            let r = tfae_test(&f)?;
            Ok(emit(fmt, &r, || {
                let mut s = String::new();
                writeln!(s, "holds = {}", r.holds).unwrap();
                writeln!(s, "certificate = {:?}", r.certificate).unwrap();
                writeln!(s, "reason = {}", r.reason).unwrap();
                s
            }))
        }
        Command::Oracle { curve, p, count } => {
            let rows = if curve == "family" {
                let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                (0..*count)
                    .map(|_| {
                        let (m, p) = family_curve(&mut rng);
                        oracle_row(&m, &p, &cfg)
                    })
                    .collect::<Result<Vec<_>, _>>()?
            } else {
                let m = WeierstrassModel::parse(&text_arg(curve)?)?;
                let p = prime_arg(p.as_deref().ok_or_else(|| input_err("oracle needs -p <prime>"))?)?;
                vec![oracle_row(&m, &p, &cfg)?]
            };
            Ok(emit(fmt, &rows, || {
                let mut s = String::new();
                for r in &rows {
                    let o = match &r.oracle {
                        HalvingOutcome::Order(n, _) => n.to_string(),
                        HalvingOutcome::Inapplicable(why) => format!("inapplicable ({why})"),
                    };
                    let verdict = match r.agree {
                        Some(true) => "agree",
                        Some(false) => "DISAGREE",
                        None => "-",
                    };
                    writeln!(s, "{} p={}: I = {}, oracle = {}: {}", r.curve, r.p, r.i2_order, o, verdict).unwrap();
                }
                s
            }))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e @ Error::Input(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
