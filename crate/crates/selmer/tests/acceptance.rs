//! Acceptance suite: one PASS/FAIL line per criterion. All comparisons are
//! exact (tolerance 0); randomized parts use fixed seeds.

mod support;

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use selmer::arith::{factor_rat, int, is_prime, legendre, rat, valuation, Int, Place, Rat, SquareClass, Valuation};
use selmer::descent_global::{
    c2_rank_from_class_data, elliptic_ledger, genus_2rank_quadratic, hyperelliptic_ledger, ClassData,
};
use selmer::descent_local::{
    i2_oracle_halving, i2_order, local_report, s2_order_isogeny, s2_real, HalvingOutcome, LocalConfig,
};
use selmer::elliptic::{
    count_points_fp, reduction_filtration_level, velu_from_kernel_x, FiltrationLevel, IsogenyMap, WeierstrassModel,
};
use selmer::jacobian::{
    image_table, independence_rank, local_class_rank_hyper, local_intersection_rank, local_selmer_rank_hyper,
    tfae_test, unramified_images_check, xt_image, CertificateKind, DescentPoint, EtaleSplit, HyperellipticCurve,
    ImageTable,
};
use selmer::poly::{discriminant, factor_mod_p, FpPoly, HenselConfig, RatPoly};
use selmer::tate::{bad_primes, tate_algorithm, KodairaType, Splitness};
use support::forms::{fundamental_discriminant, is_squarefree, ClassGroup};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn e(a: [i64; 5]) -> WeierstrassModel {
    WeierstrassModel::from_ints(a).unwrap()
}

fn two(m: &WeierstrassModel) -> IsogenyMap {
    IsogenyMap::multiplication(m, 2).unwrap()
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

const MESTRE: [i64; 5] = [0, 2597055, 357573631, -549082, -19608054];
const QUINTIC: &str = "X^5+16X^4-274X^3+817X^2+178X+1";
const QUINTIC_CLASSES: &str = "X^5+16X^4-274X^3+817X^2+178X+1 | 4 | true | tables of simplest quintic fields\n";
const EX2_POINTS: [&str; 6] = ["-17", "-9", "-6", "-2", "0", "4"];

// (curve, p) and the intersection order from the worked examples
const INTERSECTION_EXAMPLES: [([i64; 5], i64, u64); 7] = [
    ([0, -26, 0, 135, -567], 3, 2),
    ([0, 26, 0, 135, 567], 3, 4),
    ([0, 0, 0, -529, 12167], 23, 1),
    ([0, 0, 0, -529, -12167], 23, 2),
    ([0, 1, 0, 4, 12], 2, 4),
    ([0, 0, 0, -25, 0], 5, 1),
    ([0, 0, 0, -75, 125], 5, 1),
];

fn tate_suite() -> Check {
    use KodairaType::*;
    let cases: [([i64; 5], i64, KodairaType, Option<Splitness>, u32); 9] = [
        ([0, -26, 0, 135, -567], 3, I(4), Some(Splitness::Split), 4),
        ([0, 26, 0, 135, 567], 3, I(4), Some(Splitness::NonSplit), 2),
        ([0, 0, 0, -189, 1269], 31, I(1), Some(Splitness::Split), 1),
        ([0, 0, 0, 1431, -12339], 31, I(3), Some(Splitness::Split), 3),
        ([0, 0, 0, -529, 12167], 23, IStar(1), None, 4),
        ([0, 0, 0, -529, -12167], 23, IStar(1), None, 2),
        ([0, 1, 0, 4, 12], 2, I0Star, None, 2),
        ([0, 0, 0, -25, 0], 5, I0Star, None, 4),
        ([0, 0, 0, -75, 125], 5, I0Star, None, 1),
    ];
    for (a, p, k, split, c) in cases {
        let rd = tate_algorithm(&e(a), &int(p)).map_err(err)?;
        ensure!(rd.kodaira == k, "{a:?} at {p}: type {} != {k}", rd.kodaira);
        ensure!(rd.tamagawa == c, "{a:?} at {p}: c_p {} != {c}", rd.tamagawa);
        if let Some(s) = split {
            ensure!(rd.split == s, "{a:?} at {p}: {} != {s}", rd.split);
        }
    }
    Ok("9/9 curve/prime pairs match type, splitness and c_p".into())
}

fn intersection_suite() -> Check {
    let mut got = Vec::new();
    for (a, p, want) in INTERSECTION_EXAMPLES {
        let m = e(a);
        let (n, _) = i2_order(&m, &two(&m), &int(p)).map_err(err)?;
        ensure!(n == want, "{a:?} at {p}: #I = {n}, expected {want}");
        got.push(n.to_string());
    }
    Ok(format!("i2_order = {}", got.join(", ")))
}

fn oracle_suite() -> Check {
    let mut applicable = 0;
    for (a, p, _) in INTERSECTION_EXAMPLES {
        let m = e(a);
        if p == 2 {
            continue;
        }
        if let HalvingOutcome::Order(n, _) = i2_oracle_halving(&m, &int(p)).map_err(err)? {
            let (i, _) = i2_order(&m, &two(&m), &int(p)).map_err(err)?;
            ensure!(n == i, "{a:?} at {p}: oracle {n}, case analysis {i}");
            applicable += 1;
        }
    }
    ensure!(applicable >= 1, "no applicable worked example");
    let odd_primes: Vec<i64> = (3..100).filter(|&p| is_prime(&int(p))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut done = 0;
    while done < 100 {
        let p = odd_primes[rng.gen_range(0..odd_primes.len())];
        let (a, b, c): (i64, i64, i64) = (rng.gen_range(-40..=40), rng.gen_range(-40..=40), rng.gen_range(-40..=40));
        if [(a, b), (a, c), (b, c)].iter().any(|(x, y)| (x - y).rem_euclid(p) == 0) {
            continue;
        }
        let (pa, pb, pc) = (p * a, p * b, p * c);
        let m = e([0, -(pa + pb + pc), 0, pa * pb + pa * pc + pb * pc, -pa * pb * pc]);
        let r = local_report(&m, &two(&m), &Place::finite(p)).map_err(err)?;
        ensure!((r.order_c, r.order_s, r.order_i) == (4, 4, 1), "({a},{b},{c}) p={p}: (C,S,I) = ({}, {}, {})", r.order_c, r.order_s, r.order_i);
        match i2_oracle_halving(&m, &int(p)).map_err(err)? {
            HalvingOutcome::Order(1, _) => {}
            o => return Err(format!("({a},{b},{c}) p={p}: oracle {o:?}")),
        }
        done += 1;
    }
    Ok(format!("{applicable} applicable worked example(s) agree; 100/100 random family curves give I = 1, C = S = 4 and the oracle agrees"))
}

fn isogeny_suite() -> Check {
    let m = e([0, 0, 0, -189, 1269]);
    let phi = velu_from_kernel_x(&m, &rat(3, 1), 3).map_err(err)?;
    let p = int(31);
    let c = tate_algorithm(&m, &p).map_err(err)?.tamagawa;
    let rd = tate_algorithm(&phi.codomain, &p).map_err(err)?;
    ensure!((rd.tamagawa, c) == (3, 1), "c ratio {}/{c}", rd.tamagawa);
    let s = s2_order_isogeny(&phi, &p).map_err(err)?;
    ensure!(s == 9, "s2_order_isogeny = {s}");
    let v = valuation(&phi.codomain.disc, &p);
    ensure!(v == Valuation::Finite(3) && rd.v_disc_min == 3, "v_31(disc) = {v}, minimal {}", rd.v_disc_min);
    Ok("c ratio 3/1, #S = 9, v_31(disc codomain) = 3".into())
}

fn mestre_suite() -> Check {
    let m = e(MESTRE);
    let mut min_disc = Rat::from_integer(if m.disc < Rat::zero() { int(-1) } else { int(1) });
    for p in bad_primes(&m).map_err(err)? {
        let rd = tate_algorithm(&m, &p).map_err(err)?;
        min_disc *= Rat::from_integer(p.pow(rd.v_disc_min));
    }
    let fac = factor_rat(&min_disc).map_err(err)?;
    ensure!(fac.sign < 0, "minimal discriminant is positive");
    ensure!(fac.factors.iter().all(|(p, k)| *k == 1 && p != &int(2)), "minimal discriminant {fac} is not odd and squarefree");
    let n2 = count_points_fp(&m, &int(2)).map_err(err)?;
    ensure!(n2 == int(5), "#E(F_2) = {n2}");
    let r = local_report(&m, &two(&m), &Place::finite(2)).map_err(err)?;
    ensure!(r.order_s == 2 && r.order_c == 1, "at 2: #S = {}, #C = {}", r.order_s, r.order_c);
    let sr = s2_real(&m, &two(&m)).map_err(err)?;
    ensure!(sr == 1, "real #S = {sr}");
    let ledger = elliptic_ledger(&m, None, &[], &LocalConfig::default()).map_err(err)?;
    ensure!(ledger.index_bound_c_in_s == 2, "index bound {}", ledger.index_bound_c_in_s);
    let pts = m.lift_x(&rat(-2561042, 1));
    ensure!(!pts.is_empty(), "x = -2561042 does not lift");
    let p5 = m.scalar_mul(5, &pts[0]);
    let lvl = reduction_filtration_level(&m, &p5, &int(2)).map_err(err)?;
    ensure!(lvl == FiltrationLevel::Level(1), "5P at level {lvl:?}");
    Ok(format!("minimal disc {fac}; #E(F_2) = 5; at 2 #S = 2, #C = 1; real #S = 1; [S : C] <= 2; 5P at level 1"))
}

fn fp_roots(f: &RatPoly, p: i64) -> Result<Vec<(Int, u32)>, String> {
    let fp = FpPoly::reduce(f, &int(p)).map_err(err)?;
    let mut out = Vec::new();
    for (g, k) in factor_mod_p(&fp).map_err(err)? {
        let r = g.linear_root().ok_or_else(|| format!("factor of degree {} mod {p}", g.degree()))?;
        out.push((r, k));
    }
    out.sort();
    Ok(out)
}

fn row_of<'a>(t: &'a ImageTable, label: &str) -> Result<&'a Vec<String>, String> {
    t.rows.iter().find(|(l, _)| l == label).map(|(_, r)| r).ok_or_else(|| format!("no row {label}"))
}

/// Compares a table against expected rows keyed by column label.
fn compare_table(t: &ImageTable, columns: &[&str], rows: &[(&str, [&str; 5])]) -> Result<(), String> {
    let idx: Vec<usize> = columns
        .iter()
        .map(|c| t.columns.iter().position(|x| x == c).ok_or_else(|| format!("at {}: no column {c}", t.place)))
        .collect::<Result<_, _>>()?;
    for (label, want) in rows {
        let got = row_of(t, label)?;
        let got: Vec<&str> = idx.iter().map(|&i| got[i].as_str()).collect();
        ensure!(got == want, "at {}: row {label} is {got:?}, expected {want:?}", t.place);
    }
    Ok(())
}

/// Images at a split odd prime from Legendre symbols of x - r, with the one
/// non-unit coordinate recovered from the norm f(x).
fn legendre_row(f: &RatPoly, roots: &[Int], x: i64, p: i64, nonres: &str) -> Vec<String> {
    let pi = int(p);
    let fx = f.eval(&rat(x, 1)).to_integer();
    let mut sym = vec![None; roots.len()];
    let mut prod = 1i8;
    for (j, r) in roots.iter().enumerate() {
        let d = int(x) - r;
        if !(&d % &pi).is_zero() {
            let l = legendre(&d, &pi);
            sym[j] = Some(l);
            prod *= l;
        }
    }
    let mut u = fx;
    while (&u % &pi).is_zero() {
        u /= &pi;
    }
    let rest = legendre(&u, &pi) * prod;
    sym.iter().map(|s| if s.unwrap_or(rest) == 1 { "1".to_string() } else { nonres.to_string() }).collect()
}

fn example_two() -> Check {
    let c = HyperellipticCurve::parse(QUINTIC).map_err(err)?;
    let pt = |s: &str| DescentPoint::parse(s, &c).map_err(err);
    let pts: Vec<DescentPoint> = EX2_POINTS.iter().map(|s| pt(s)).collect::<Result<_, _>>()?;

    let d = discriminant(&c.f).map_err(err)?;
    let want = Rat::from_integer(int(941).pow(4) * int(191).pow(2));
    ensure!(d == want, "disc(f) = {d}");

    let i = |v: i64| int(v);
    ensure!(fp_roots(&c.f, 37)? == vec![(i(4), 1), (i(8), 1), (i(12), 1), (i(16), 1), (i(18), 1)], "mod 37 factorization");
    ensure!(fp_roots(&c.f, 73)? == vec![(i(13), 1), (i(18), 1), (i(47), 1), (i(54), 1), (i(71), 1)], "mod 73 factorization");
    ensure!(fp_roots(&c.f, 191)? == vec![(i(5), 1), (i(6), 1), (i(37), 1), (i(159), 2)], "mod 191 factorization");

    // 37: the (-2) row is compared with (2,1,2,2,2), which the Legendre oracle
    // and the relation (-2) = (-9) + (-6) both give; the printed row differs.
    let t37 = image_table(&c, &pts, &Place::finite(37)).map_err(err)?;
    let rows37 = [
        ("(-17)", ["1", "1", "2", "1", "2"]),
        ("(-9)", ["2", "2", "1", "1", "1"]),
        ("(-6)", ["1", "2", "2", "2", "2"]),
        ("(0)", ["1", "2", "1", "1", "2"]),
        ("(-2)", ["2", "1", "2", "2", "2"]),
        ("(4)", ["1", "1", "2", "1", "2"]),
    ];
    compare_table(&t37, &["x-4", "x-8", "x-12", "x-16", "x-18"], &rows37)?;
    let r37: Vec<Int> = [4, 8, 12, 16, 18].iter().map(|&r| int(r)).collect();
    for (label, want) in &rows37 {
        let x: i64 = label.trim_matches(|ch| ch == '(' || ch == ')').parse().unwrap();
        ensure!(legendre_row(&c.f, &r37, x, 37, "2") == want.to_vec(), "Legendre oracle disagrees at 37 on {label}");
    }
    let t73 = image_table(&c, &pts, &Place::finite(73)).map_err(err)?;
    let rows73 = [
        ("(-17)", ["1", "1", "5", "5", "1"]),
        ("(-9)", ["5", "5", "5", "5", "1"]),
        ("(-6)", ["5", "5", "1", "1", "1"]),
        ("(0)", ["5", "1", "1", "5", "1"]),
        ("(-2)", ["1", "5", "5", "5", "5"]),
        ("(4)", ["5", "1", "1", "1", "5"]),
    ];
    compare_table(&t73, &["x+26", "x+19", "x+2", "x-13", "x-18"], &rows73)?;
    let r73: Vec<Int> = [-26, -19, -2, 13, 18].iter().map(|&r| int(r)).collect();
    for (label, want) in &rows73 {
        let x: i64 = label.trim_matches(|ch| ch == '(' || ch == ')').parse().unwrap();
        ensure!(legendre_row(&c.f, &r73, x, 73, "5") == want.to_vec(), "Legendre oracle disagrees at 73 on {label}");
    }
    let mut with_roots: Vec<DescentPoint> = (1..=5).map(DescentPoint::TorsionRoot).collect();
    with_roots.extend(pts.iter().cloned());
    let t191 = image_table(&c, &with_roots, &Place::finite(191)).map_err(err)?;
    let rows191 = [
        ("(a1)", ["1", "-1", "-1", "-1", "-1"]),
        ("(a2)", ["1", "1", "1", "-1", "-1"]),
        ("(a3)", ["1", "-1", "-1", "1", "1"]),
        ("(a4)", ["1", "1", "-1", "pi", "-pi"]),
        ("(a5)", ["1", "1", "-1", "pi", "-pi"]),
        ("(-17)", ["1", "-1", "-1", "1", "1"]),
        ("(-9)", ["1", "-1", "-1", "1", "1"]),
        ("(-6)", ["1", "-1", "-1", "1", "1"]),
        ("(-2)", ["1", "-1", "-1", "1", "1"]),
        ("(0)", ["-1", "-1", "1", "1", "1"]),
        ("(4)", ["-1", "-1", "1", "1", "1"]),
    ];
    compare_table(&t191, &["x-5", "x-6", "x-37", "x-a4", "x-a5"], &rows191)?;

    let v191 = Place::finite(191);
    let s = local_selmer_rank_hyper(&c, &v191).map_err(err)?;
    let cr = local_class_rank_hyper(&c, &v191).map_err(err)?;
    let (ir, complete) = local_intersection_rank(&c, &with_roots, &v191).map_err(err)?;
    ensure!((s, cr, ir, complete) == (4, 4, 3, true), "ranks at 191: ({s}, {cr}, {ir}), complete {complete}");
    let s2 = local_selmer_rank_hyper(&c, &Place::finite(2)).map_err(err)?;
    ensure!(s2 == 2, "S rank at 2 = {s2}");
    let v941 = Place::finite(941);
    let r941 = (
        local_selmer_rank_hyper(&c, &v941).map_err(err)?,
        local_class_rank_hyper(&c, &v941).map_err(err)?,
        local_intersection_rank(&c, &pts, &v941).map_err(err)?.0,
    );
    ensure!(r941 == (0, 0, 0), "ranks at 941: {r941:?}");
    let inf = Place::RealInfinite;
    let sr = local_selmer_rank_hyper(&c, &inf).map_err(err)?;
    let g1 = xt_image(&c, &pt("-2")?, &inf).map_err(err)?.symbols();
    let g2 = xt_image(&c, &pt("0")?, &inf).map_err(err)?.symbols();
    ensure!(sr == 2, "real S rank {sr}");
    ensure!(g1 == ["1", "-1", "-1", "-1", "-1"] && g2 == ["1", "1", "1", "-1", "-1"], "real images {g1:?}, {g2:?}");

    let cd = ClassData::parse(QUINTIC_CLASSES).map_err(err)?;
    let tf = tfae_test(&c.f).map_err(err)?;
    let cs = c2_rank_from_class_data(&c.f, &tf, &cd).map_err(err)?;
    ensure!(cs.rank == 4, "C rank {}", cs.rank);
    let ledger = hyperelliptic_ledger(&c, Some(&cd), &pts).map_err(err)?;
    let unrefined: u32 = ledger.breakdown.iter().map(|b| b.s_over_i()).sum();
    ensure!(unrefined == 5 && ledger.bound_rank_s_over_i == 3, "S/I bound {unrefined} refined to {}", ledger.bound_rank_s_over_i);
    ensure!(ledger.bound_rank_c_over_i == 1, "C/I bound {}", ledger.bound_rank_c_over_i);
    let ind = independence_rank(&c, &pts, &[Place::finite(37), Place::finite(73)]).map_err(err)?;
    ensure!(ind.image_rank >= 6, "independence rank {}", ind.image_rank);
    let sums: Vec<DescentPoint> =
        ["sum: -2 + -6", "sum: -2 + -9", "sum: -2 + -17", "sum: 0 + 4"].iter().map(|s| pt(s)).collect::<Result<_, _>>()?;
    for chk in unramified_images_check(&c, &sums).map_err(err)? {
        ensure!(chk.unramified == Some(true), "{} is not unramified everywhere: {:?}", chk.point, chk.places);
    }
    ensure!(ledger.class_interval == Some([3, 7]), "interval before points {:?}", ledger.class_interval);
    ensure!(ledger.selmer_rank_interval == Some([6, 7]), "final interval {:?}", ledger.selmer_rank_interval);
    Ok("disc, factorizations, 3 tables, local ranks, real generators, bounds 5 -> 3, C rank 4, independence 6, 4 unramified sums, [3,7] then [6,7]; 37 table uses the corrected (-2) row".into())
}

fn kernel_of_norm(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let places: Vec<Place> = vec![Place::RealInfinite, Place::finite(2), Place::finite(3), Place::finite(5), Place::finite(7), Place::finite(11)];
    let cfg = HenselConfig::default();
    let (mut evals, mut on_curve, mut skipped, mut unresolved) = (0usize, 0usize, 0usize, 0usize);
    while evals < 10_000 {
        let deg = if rng.gen_bool(0.5) { 3 } else { 5 };
        let mut c: Vec<i64> = (0..deg).map(|_| rng.gen_range(-15..=15)).collect();
        c.push(1);
        let (x0, y0) = (rng.gen_range(-12i64..=12), rng.gen_range(1i64..=40));
        let g = RatPoly::from_ints(&c);
        let shift = &rat(y0 * y0, 1) - g.eval(&rat(x0, 1));
        let f = g.add(&RatPoly::constant(shift));
        let Ok(curve) = HyperellipticCurve::new(f) else { continue };
        for v in &places {
            let mut split = match EtaleSplit::new(&curve, v, &cfg) {
                Ok(s) => s,
                Err(_) => {
                    skipped += 1;
                    continue;
                }
            };
            let p0 = DescentPoint::Rational { x: rat(x0, 1), y: rat(y0, 1) };
            let im = match split.image(&p0) {
                Ok(im) => im,
                Err(selmer::Error::Unresolved(_)) => {
                    unresolved += 1;
                    continue;
                }
                Err(e) => return Err(e.to_string()),
            };
            if let Ok(n) = im.norm() {
                ensure!(n.is_identity(), "{} at {v}: image of ({x0},{y0}) has norm {n}", curve.f);
                on_curve += 1;
                evals += 1;
            }
            for _ in 0..8 {
                let x = rat(rng.gen_range(-60..=60), rng.gen_range(1..=4));
                let fx = curve.f.eval(&x);
                if fx.is_zero() {
                    continue;
                }
                let im = match split.image(&DescentPoint::Rational { x: x.clone(), y: Rat::one() }) {
                    Ok(im) => im,
                    Err(selmer::Error::Unresolved(_)) => {
                        unresolved += 1;
                        continue;
                    }
                    Err(e) => return Err(e.to_string()),
                };
                if let Ok(n) = im.norm() {
                    let want = SquareClass::of(&fx, v).map_err(err)?;
                    ensure!(n == want, "{} at {v}: norm of x - T at {x} is {n}, f(x) is {want}", curve.f);
                    evals += 1;
                }
            }
        }
    }
    ensure!(unresolved * 20 < evals, "{unresolved} unresolved images against {evals} evaluations");
    Ok(format!(
        "{evals} evaluations ({on_curve} at rational points, norm trivial; {unresolved} images and {skipped} splittings unresolved)"
    ))
}

fn random_curve(rng: &mut ChaCha8Rng, bound: i64) -> Option<WeierstrassModel> {
    let a: [i64; 5] = std::array::from_fn(|_| rng.gen_range(-bound..=bound));
    WeierstrassModel::from_ints(a).ok()
}

fn property_suites() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let kn = kernel_of_norm(&mut rng)?;

    let odd: Vec<i64> = (3..60).filter(|&p| is_prime(&int(p))).collect();
    let mut good = 0;
    while good < 200 {
        let Some(m) = random_curve(&mut rng, 30) else { continue };
        let p = int(odd[rng.gen_range(0..odd.len())]);
        if valuation(&m.disc, &p) != Valuation::Finite(0) {
            continue;
        }
        let r = local_report(&m, &two(&m), &Place::Finite(p.clone())).map_err(err)?;
        ensure!(r.order_c == r.order_s && r.order_s == r.order_i, "{:?} at {p}: ({}, {}, {})", m.a_invariants(), r.order_c, r.order_s, r.order_i);
        good += 1;
    }

    let (mut checked, mut unresolved) = (0, 0);
    for _ in 0..150 {
        let Some(m) = random_curve(&mut rng, 20) else { continue };
        for p in bad_primes(&m).map_err(err)? {
            match local_report(&m, &two(&m), &Place::Finite(p.clone())) {
                Ok(r) => {
                    ensure!(r.order_c % r.order_i == 0 && r.order_s % r.order_i == 0, "{:?} at {p}: I does not divide", m.a_invariants());
                    checked += 1;
                }
                Err(selmer::Error::Unresolved(_)) => unresolved += 1,
                Err(e) => return Err(e.to_string()),
            }
        }
    }

    let mut places = vec![Place::RealInfinite];
    places.extend([2, 3, 5, 7, 13, 191].map(Place::finite));
    for v in &places {
        let all = SquareClass::enumerate(v);
        let size = match v {
            Place::RealInfinite => 2,
            Place::Finite(p) if p == &int(2) => 8,
            _ => 4,
        };
        ensure!(all.len() == size, "{v}: {} classes", all.len());
        let one = SquareClass::identity(v);
        for a in &all {
            ensure!(a.mul(&one).map_err(err)? == *a, "identity at {v}");
            ensure!(a.mul(a).map_err(err)?.is_identity(), "{a} has order > 2");
            ensure!(SquareClass::of(&a.representative(), v).map_err(err)? == *a, "representative of {a}");
            for b in &all {
                let ab = a.mul(b).map_err(err)?;
                ensure!(all.contains(&ab), "closure at {v}");
                ensure!(ab == b.mul(a).map_err(err)?, "commutativity at {v}");
                for c in &all {
                    ensure!(ab.mul(c).map_err(err)? == a.mul(&b.mul(c).map_err(err)?).map_err(err)?, "associativity at {v}");
                }
            }
        }
        for _ in 0..200 {
            let x = rat(rng.gen_range(1..5000) * if rng.gen_bool(0.5) { -1 } else { 1 }, rng.gen_range(1..300));
            let y = rat(rng.gen_range(1..5000), rng.gen_range(1..300) * if rng.gen_bool(0.5) { -1 } else { 1 });
            let lhs = SquareClass::of(&(&x * &y), v).map_err(err)?;
            let rhs = SquareClass::of(&x, v).map_err(err)?.mul(&SquareClass::of(&y, v).map_err(err)?).map_err(err)?;
            ensure!(lhs == rhs, "class of {x} * {y} at {v}");
        }
    }

    let mut fields = 0;
    for d in -10_000i64..=10_000 {
        if d == 0 || d == 1 || !is_squarefree(d) || fundamental_discriminant(d).abs() > 10_000 {
            continue;
        }
        let g = genus_2rank_quadratic(&BigInt::from(d)).map_err(err)?;
        let cg = ClassGroup::new(fundamental_discriminant(d));
        ensure!(
            (g.narrow_rank, g.wide_rank, g.narrow_eq_wide) == (cg.narrow_two_rank(), cg.wide_two_rank(), cg.narrow_eq_wide()),
            "d = {d}: genus theory ({}, {}, {}) vs forms ({}, {}, {})",
            g.narrow_rank, g.wide_rank, g.narrow_eq_wide, cg.narrow_two_rank(), cg.wide_two_rank(), cg.narrow_eq_wide()
        );
        fields += 1;
    }
    Ok(format!(
        "kernel of norm: {kn}; C = S = I at 200 good odd pairs; I | gcd(C, S) at {checked} bad pairs ({unresolved} unresolved); square-class axioms at {} places; genus theory = reduced forms on {fields} fields",
        places.len()
    ))
}

fn tfae_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut cubics = 0;
    while cubics < 50 {
        let f = RatPoly::from_ints(&[rng.gen_range(-50..=50), rng.gen_range(-50..=50), rng.gen_range(-50..=50), 1]);
        if !f.is_squarefree() {
            continue;
        }
        let r = tfae_test(&f).map_err(err)?;
        ensure!(r.holds, "{f}: {}", r.reason);
        ensure!(r.certificate == CertificateKind::Exact || r.primes_sampled > 0, "{f}: sampled certificate without sampling");
        cubics += 1;
    }
    let q = tfae_test(&RatPoly::parse(QUINTIC).map_err(err)?).map_err(err)?;
    ensure!(q.holds && q.certificate == CertificateKind::Exact, "quintic: {} {:?}", q.holds, q.certificate);
    let mut binomials = 0;
    for a in [-7i64, -3, -2, 1, 2, 3, 5, 6, 10, 12, 32, -243] {
        let f = RatPoly::from_ints(&[a, 0, 0, 0, 0, 1]);
        let r = tfae_test(&f).map_err(err)?;
        ensure!(r.holds, "x^5 + {a}: {}", r.reason);
        ensure!(r.certificate == CertificateKind::Exact || r.primes_sampled > 0, "x^5 + {a}: sampled without sampling");
        binomials += 1;
    }
    let mut sampled = 0;
    // the last has group C3 x C3: no exact rule applies and no involution exists
    for s in ["X^5-X-1", "X^5-X", "X^7-7X+3", "X^5+20X+16", "X^7-X^6-5X^5+5X^4+5X^3-5X^2+X"] {
        let r = tfae_test(&RatPoly::parse(s).map_err(err)?).map_err(err)?;
        if r.certificate == CertificateKind::Sampled {
            ensure!(r.primes_sampled > 0, "{s}: sampled without sampling");
            sampled += 1;
        }
    }
    ensure!(sampled == 1, "{sampled} sampled certificates, expected exactly one");
    Ok(format!("50 cubics, the quintic and {binomials} binomials x^5 + a hold; {sampled} sampled certificate(s), each backed by sampling"))
}

fn main() {
    let start = Instant::now();
    let criteria: [(&str, fn() -> Check); 8] = [
        ("1 Tate reduction suite", tate_suite),
        ("2 intersection suite", intersection_suite),
        ("3 oracle equivalence", oracle_suite),
        ("4 isogeny order over Q_31", isogeny_suite),
        ("5 Mestre curve pipeline", mestre_suite),
        ("6 simplest quintic pipeline", example_two),
        ("7 property suites", property_suites),
        ("8 cohomological triviality", tfae_suite),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("PASS [{name}] (exact, {secs:.1}s) {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL [{name}] (exact, {secs:.1}s) {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed in {:.1}s", 8 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
