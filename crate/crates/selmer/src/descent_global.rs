//! Global bookkeeping: bounds on `S/I` and `C/I`, the class-group side
//! `dim C`, and the resulting interval for the Selmer rank.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_with::{serde_as, DisplayFromStr};

use crate::arith::{factor_integer, int, Int, Place};
use crate::descent_local::{local_report_with, LocalConfig, LocalDescentReport};
use crate::elliptic::{IsogenyKind, IsogenyMap, Point, WeierstrassModel};
use crate::error::{input, unresolved, Error, Result};
use crate::jacobian::{
    hyper_local_report, independence_auto, tfae_test, DescentPoint, HyperellipticCurve, IndependenceReport,
    TfaeReport,
};
use crate::poly::{discriminant, factor_over_z, monic_integral, RatPoly};

pub use crate::tate::bad_primes;

/// One place's share of the bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceContribution {
    pub place: Place,
    pub rank_s: u32,
    pub rank_c: u32,
    pub rank_i: u32,
    /// `dim A(Q_v)[phi]`.
    pub rank_kernel: u32,
    /// Whether the place divides the conductor (counts towards `C/I`).
    pub bad: bool,
}

impl PlaceContribution {
    pub fn s_over_i(&self) -> u32 {
        self.rank_s - self.rank_i
    }

    pub fn c_over_i(&self) -> u32 {
        if self.bad {
            self.rank_c - self.rank_i
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisBounds {
    /// Prime `l` with all local orders powers of `l`; ranks are over F_l.
    pub ell: u32,
    pub bound_rank_s_over_i: u32,
    pub bound_rank_c_over_i: u32,
    /// `sum over T of log #A(Q_v)[phi] / #I_v` (multiplication by 2 only).
    pub product_form_s_over_i: Option<u32>,
    pub breakdown: Vec<PlaceContribution>,
}

fn log_exact(n: u64, ell: u64) -> Result<u32> {
    let mut k = 0;
    let mut m = n;
    while m > 1 {
        if m % ell != 0 {
            return unresolved(format!("local order {n} is not a power of {ell}"));
        }
        m /= ell;
        k += 1;
    }
    Ok(k)
}

fn contribution(r: &LocalDescentReport, kernel: u64, bad: bool, ell: u64) -> Result<PlaceContribution> {
    let c = PlaceContribution {
        place: r.place.clone(),
        rank_s: log_exact(r.order_s, ell)?,
        rank_c: log_exact(r.order_c, ell)?,
        rank_i: log_exact(r.order_i, ell)?,
        rank_kernel: log_exact(kernel, ell)?,
        bad,
    };
    if c.rank_i > c.rank_s || c.rank_i > c.rank_c {
        return unresolved(format!("I exceeds C or S at {}", r.place));
    }
    Ok(c)
}

/// Sums the local contributions. With `narrow` set, the real place drops out
/// of the `S/I` bound.
pub fn bounds_from_contributions(ell: u32, breakdown: Vec<PlaceContribution>, narrow: bool) -> DivisBounds {
    let s = breakdown
        .iter()
        .filter(|c| !(narrow && c.place == Place::RealInfinite))
        .map(|c| c.s_over_i())
        .sum();
    let cc = breakdown.iter().map(|c| c.c_over_i()).sum();
    DivisBounds { ell, bound_rank_s_over_i: s, bound_rank_c_over_i: cc, product_form_s_over_i: None, breakdown }
}

fn map_ell(phi: &IsogenyMap) -> Result<u32> {
    match phi.kind {
        IsogenyKind::Multiplication(2) => Ok(2),
        IsogenyKind::Velu(_) if phi.degree == 2 || phi.degree == 3 => Ok(phi.degree),
        _ => Err(Error::OutOfScope(format!("bounds for an isogeny of degree {}", phi.degree))),
    }
}

/// Places `T`: the real place, the primes dividing the degree and the bad primes.
pub fn evaluation_places(m: &WeierstrassModel, phi: &IsogenyMap) -> Result<Vec<Place>> {
    let mut primes = bad_primes(m)?;
    for q in factor_integer(&Int::from(phi.degree))?.primes() {
        if !primes.contains(&q) {
            primes.push(q);
        }
    }
    primes.sort();
    let mut out = vec![Place::RealInfinite];
    out.extend(primes.into_iter().map(Place::Finite));
    Ok(out)
}

fn real_kernel_order(m: &WeierstrassModel, phi: &IsogenyMap) -> u64 {
    match phi.kind {
        IsogenyKind::Multiplication(_) => {
            if m.disc.is_positive() {
                4
            } else {
                2
            }
        }
        _ if phi.degree == 2 => 2,
        _ => {
            // kernel {O, (x, +-y)}: real exactly when g(x) >= 0
            let x = phi.kernel_x()[0].clone();
            if m.two_division_cubic().eval(&x).is_negative() {
                1
            } else {
                3
            }
        }
    }
}

/// Local reports and bounds for `phi` over the places `T`, plus any extra
/// places given (which can only raise the bounds).
pub fn divis_bounds_with(
    m: &WeierstrassModel,
    phi: &IsogenyMap,
    extra: &[Place],
    cfg: &LocalConfig,
) -> Result<(DivisBounds, Vec<LocalDescentReport>)> {
    let ell = map_ell(phi)?;
    let bad = bad_primes(m)?;
    let mut places = evaluation_places(m, phi)?;
    for v in extra {
        if !places.contains(v) {
            places.push(v.clone());
        }
    }
    let mut reports = Vec::new();
    let mut breakdown = Vec::new();
    for v in &places {
        let r = local_report_with(m, phi, v, cfg)?;
        let kernel = match v {
            Place::RealInfinite => real_kernel_order(m, phi),
            Place::Finite(_) => r.order_c,
        };
        let is_bad = matches!(v, Place::Finite(p) if bad.contains(p));
        breakdown.push(contribution(&r, kernel, is_bad, ell as u64)?);
        reports.push(r);
    }
    let mut b = bounds_from_contributions(ell, breakdown, false);
    if matches!(phi.kind, IsogenyKind::Multiplication(2)) {
        b.product_form_s_over_i = Some(b.breakdown.iter().map(|c| c.rank_kernel - c.rank_i).sum());
    }
    Ok((b, reports))
}

pub fn divis_bounds(m: &WeierstrassModel, phi: &IsogenyMap) -> Result<DivisBounds> {
    Ok(divis_bounds_with(m, phi, &[], &LocalConfig::default())?.0)
}

// ---------------------------------------------------------------------------
// Class groups

/// Genus-theory data for `Q(sqrt d)`.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticGenus {
    #[serde_as(as = "DisplayFromStr")]
    pub d: Int,
    #[serde_as(as = "DisplayFromStr")]
    pub discriminant: Int,
    /// Number of primes dividing the discriminant.
    pub t: u32,
    pub narrow_rank: u32,
    pub wide_rank: u32,
    /// Whether the fundamental unit has norm -1 (always true for d < 0).
    pub narrow_eq_wide: bool,
}

const CF_BOUND: u64 = 1_000_000;

/// `N(eps) = -1` for the fundamental unit of `Q(sqrt d)`, d > 0 squarefree,
/// read off the parity of the continued-fraction period of the integral basis
/// element `(P0 + sqrt d)/Q0`.
fn fundamental_unit_norm_negative(d: &Int) -> Result<bool> {
    let s = d.sqrt();
    let (mut pp, mut qq) = if d.mod_floor(&int(4)) == int(1) { (int(1), int(2)) } else { (int(0), int(1)) };
    let step = |pp: &Int, qq: &Int| {
        let a = (pp + &s).div_floor(qq);
        let p2 = &a * qq - pp;
        let q2 = (d - &p2 * &p2) / qq;
        (p2, q2)
    };
    let first = step(&pp, &qq);
    pp = first.0.clone();
    qq = first.1.clone();
    let mut len = 0u64;
    loop {
        let next = step(&pp, &qq);
        len += 1;
        pp = next.0;
        qq = next.1;
        if pp == first.0 && qq == first.1 {
            return Ok(len % 2 == 1);
        }
        if len > CF_BOUND {
            return unresolved(format!("continued-fraction period of sqrt({d}) exceeds {CF_BOUND}"));
        }
    }
}

/// 2-ranks of the narrow and wide class groups of `Q(sqrt d)`.
pub fn genus_2rank_quadratic(d: &Int) -> Result<QuadraticGenus> {
    if d.is_zero() || d.is_one() {
        return input(format!("Q(sqrt {d}) is not a quadratic field"));
    }
    let fac = factor_integer(d)?;
    if fac.factors.iter().any(|(_, e)| *e > 1) {
        return input(format!("{d} is not squarefree"));
    }
    let disc = if d.mod_floor(&int(4)) == int(1) { d.clone() } else { d * int(4) };
    let mut primes = fac.primes();
    if !primes.contains(&int(2)) && disc.is_even() {
        primes.push(int(2));
    }
    let t = primes.len() as u32;
    let narrow_rank = t - 1;
    if d.is_negative() {
        return Ok(QuadraticGenus {
            d: d.clone(),
            discriminant: disc,
            t,
            narrow_rank,
            wide_rank: narrow_rank,
            narrow_eq_wide: true,
        });
    }
    // -1 is a norm locally everywhere iff no prime 3 mod 4 divides d
    let three_mod_four = fac.primes().iter().any(|p| p.mod_floor(&int(4)) == int(3));
    let wide_rank = if three_mod_four { narrow_rank - 1 } else { narrow_rank };
    let narrow_eq_wide = !three_mod_four && fundamental_unit_norm_negative(d)?;
    Ok(QuadraticGenus { d: d.clone(), discriminant: disc, t, narrow_rank, wide_rank, narrow_eq_wide })
}

/// Squarefree `d` with `Q(sqrt d) = Q[x]/q` for an irreducible quadratic q.
pub fn quadratic_field_d(q: &RatPoly) -> Result<Int> {
    if q.deg() != 2 {
        return input("not a quadratic polynomial");
    }
    let disc = discriminant(q)?;
    let n = disc.numer() * disc.denom();
    let fac = factor_integer(&n)?;
    let mut d = int(fac.sign as i64);
    for (p, e) in fac.factors {
        if e % 2 == 1 {
            d *= p;
        }
    }
    if d.is_one() {
        return input(format!("{q} is reducible"));
    }
    Ok(d)
}

/// One line of class-group input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub poly: RatPoly,
    /// 2-rank of the (wide) class group of `Q[x]/poly`.
    pub two_rank: u32,
    pub narrow_eq_wide: bool,
    pub source: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassData {
    pub records: Vec<ClassRecord>,
}

const GENUS_SOURCE: &str = "genus theory";

impl ClassData {
    /// Parses lines `poly | 2rank | narrow_eq_wide | source`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<ClassData> {
        let mut records = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('|').map(|s| s.trim()).collect();
            if cols.len() != 4 {
                return input(format!("class data line {}: expected 4 fields separated by '|'", k + 1));
            }
            let poly = RatPoly::parse(cols[0])?.monic();
            let two_rank: u32 =
                cols[1].parse().map_err(|_| Error::Input(format!("class data line {}: bad 2-rank", k + 1)))?;
            let narrow_eq_wide = match cols[2].to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => true,
                "false" | "no" | "0" => false,
                other => return input(format!("class data line {}: bad flag {other:?}", k + 1)),
            };
            if cols[3].is_empty() {
                return input(format!("class data line {}: a source is required", k + 1));
            }
            let mut rec = ClassRecord { poly, two_rank, narrow_eq_wide, source: cols[3].to_string() };
            if rec.poly.deg() == 2 {
                let g = genus_2rank_quadratic(&quadratic_field_d(&rec.poly)?)?;
                if g.wide_rank != rec.two_rank || g.narrow_eq_wide != rec.narrow_eq_wide {
                    return input(format!(
                        "class data line {}: genus theory gives 2-rank {} and narrow = wide {}",
                        k + 1,
                        g.wide_rank,
                        g.narrow_eq_wide
                    ));
                }
                rec.source = GENUS_SOURCE.into();
            }
            records.push(rec);
        }
        Ok(ClassData { records })
    }

    pub fn to_text(&self) -> String {
        self.records
            .iter()
            .map(|r| format!("{} | {} | {} | {}\n", r.poly, r.two_rank, r.narrow_eq_wide, r.source))
            .collect()
    }

    pub fn lookup(&self, q: &RatPoly) -> Option<&ClassRecord> {
        let q = q.monic();
        self.records.iter().find(|r| r.poly == q)
    }
}

/// The class-group side of the ledger.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSide {
    /// `dim C`, the 2-rank of the unramified part.
    pub rank: u32,
    pub provenance: Vec<String>,
    /// Whether narrow and wide class groups agree for every constituent field.
    pub narrow_eq_wide: bool,
}

/// `dim C` from class groups: over Q it is the sum of the 2-ranks of the
/// class groups of the fields `Q[x]/g` for the irreducible factors g of f.
/// The single odd-degree field and the pattern `K x L^k` are special cases.
pub fn c2_rank_from_class_data(f: &RatPoly, tf: &TfaeReport, cd: &ClassData) -> Result<ClassSide> {
    if !tf.holds {
        return Err(Error::OutOfScope(format!(
            "the H^1 condition fails ({}); the class-group side needs explicit generators",
            tf.reason
        )));
    }
    let mut rank = 0;
    let mut provenance = Vec::new();
    let mut narrow_eq_wide = true;
    for (g, _) in factor_over_z(f)?.factors {
        match g.deg() {
            1 => {}
            2 => {
                let d = quadratic_field_d(&g)?;
                let gen = genus_2rank_quadratic(&d)?;
                rank += gen.wide_rank;
                narrow_eq_wide &= gen.narrow_eq_wide;
                provenance.push(format!("Q(sqrt {d}): 2-rank {} ({GENUS_SOURCE})", gen.wide_rank));
            }
            _ => {
                let rec = cd.lookup(&g).ok_or_else(|| {
                    Error::Input(format!("no class data for the field defined by {}", g.monic()))
                })?;
                rank += rec.two_rank;
                narrow_eq_wide &= rec.narrow_eq_wide;
                provenance.push(format!("Q[x]/({}): 2-rank {} ({})", rec.poly, rec.two_rank, rec.source));
            }
        }
    }
    Ok(ClassSide { rank, provenance, narrow_eq_wide })
}

// ---------------------------------------------------------------------------
// Ledger

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalLedger {
    pub subject: String,
    pub local_reports: Vec<LocalDescentReport>,
    pub breakdown: Vec<PlaceContribution>,
    pub bound_rank_s_over_i: u32,
    pub bound_rank_c_over_i: u32,
    /// `[S : C] <= [S : I] <= l^bound_rank_s_over_i`.
    pub index_bound_c_in_s: u64,
    pub class_side_rank: Option<u32>,
    pub class_side_provenance: Vec<String>,
    pub point_image_rank: Option<u32>,
    /// `[dim C - C/I, dim C + S/I]`, before the point images are used.
    pub class_interval: Option<[u32; 2]>,
    pub selmer_rank_interval: Option<[u32; 2]>,
    pub narrow_refinement_applied: bool,
    pub notes: Vec<String>,
}

/// Combines local data, the class-group side and point images into bounds on
/// `dim S`: `dim C - dim C/I <= dim I <= dim S <= dim I + dim S/I <= dim C + dim S/I`.
pub fn assemble_ledger(
    subject: String,
    ell: u32,
    reports: Vec<LocalDescentReport>,
    breakdown: Vec<PlaceContribution>,
    class: Option<&ClassSide>,
    points: Option<&IndependenceReport>,
) -> GlobalLedger {
    let mut notes = Vec::new();
    let narrow = class.is_some_and(|c| c.narrow_eq_wide);
    let b = bounds_from_contributions(ell, breakdown, narrow);
    if narrow {
        let dropped: u32 =
            b.breakdown.iter().filter(|c| c.place == Place::RealInfinite).map(|c| c.s_over_i()).sum();
        notes.push(format!(
            "narrow and wide class groups agree: no quadratic extension is ramified only at infinity, so the real place's {dropped} drops out"
        ));
    }
    let point_image_rank = points.map(|p| p.image_rank);
    if let Some(p) = points {
        notes.push(format!(
            "{} points give image rank {} in J(Q)/2J(Q), Mordell-Weil rank >= {} (dim J(Q)[2] = {})",
            p.points.len(),
            p.image_rank,
            p.mordell_weil_lower_bound,
            p.two_torsion_rank
        ));
    }
    let class_interval =
        class.map(|c| [c.rank.saturating_sub(b.bound_rank_c_over_i), c.rank + b.bound_rank_s_over_i]);
    let interval = class_interval.map(|[lo, hi]| [lo.max(point_image_rank.unwrap_or(0)), hi]);
    if class.is_none() {
        notes.push("no class-group data: the Selmer interval is not available".into());
    }
    if let Some([lo, hi]) = interval {
        if lo > hi {
            notes.push(format!("inconsistent interval [{lo}, {hi}]"));
        }
    }
    GlobalLedger {
        subject,
        local_reports: reports,
        bound_rank_s_over_i: b.bound_rank_s_over_i,
        bound_rank_c_over_i: b.bound_rank_c_over_i,
        index_bound_c_in_s: (ell as u64).pow(b.bound_rank_s_over_i),
        breakdown: b.breakdown,
        class_side_rank: class.map(|c| c.rank),
        class_side_provenance: class.map(|c| c.provenance.clone()).unwrap_or_default(),
        point_image_rank,
        class_interval,
        selmer_rank_interval: interval,
        narrow_refinement_applied: narrow,
        notes,
    }
}

/// Ledger for multiplication by 2 on an elliptic curve.
pub fn elliptic_ledger(
    m: &WeierstrassModel,
    cd: Option<&ClassData>,
    points: &[Point],
    cfg: &LocalConfig,
) -> Result<GlobalLedger> {
    let two = IsogenyMap::multiplication(m, 2)?;
    let (b, reports) = divis_bounds_with(m, &two, &[], cfg)?;
    let c = HyperellipticCurve::from_elliptic(m);
    let tf = tfae_test(&c.f)?;
    let class = match cd {
        Some(cd) => Some(c2_rank_from_class_data(&c.f, &tf, cd)?),
        None => None,
    };
    let dpts: Vec<DescentPoint> = points
        .iter()
        .filter_map(|pt| match pt {
            Point::Affine(x, y) if m.contains(pt) => {
                let yy = y + (&m.a1 * x + &m.a3) / crate::arith::rat(2, 1);
                Some(DescentPoint::Rational { x: x.clone(), y: yy })
            }
            _ => None,
        })
        .collect();
    if dpts.len() != points.len() {
        return input("points must be affine points on the curve");
    }
    let ind = if dpts.is_empty() { None } else { Some(independence_auto(&c, &dpts)?) };
    let a = m.a_invariants();
    let subject = format!("[{},{},{},{},{}]", a[0], a[1], a[2], a[3], a[4]);
    let mut ledger = assemble_ledger(subject, 2, reports, b.breakdown, class.as_ref(), ind.as_ref());
    if let Some(pf) = b.product_form_s_over_i {
        ledger.notes.push(format!("sum over T of dim A(Q_v)[2] - dim I_v = {pf}"));
    }
    Ok(ledger)
}

/// Ledger for the Jacobian of `Y^2 = f(X)`. The places are the real place,
/// 2 and the primes dividing the discriminant of f, which contain the bad
/// primes; `I` is computed from the points and the local roots of f.
pub fn hyperelliptic_ledger(
    c: &HyperellipticCurve,
    cd: Option<&ClassData>,
    points: &[DescentPoint],
) -> Result<GlobalLedger> {
    let (big_f, _) = monic_integral(&c.f);
    let disc = discriminant(&RatPoly::from_int_coeffs(&big_f))?;
    let primes = factor_integer(&(disc.numer() * disc.denom()))?.primes();
    let mut places = vec![Place::RealInfinite];
    if !primes.contains(&int(2)) {
        places.push(Place::Finite(int(2)));
    }
    places.extend(primes.iter().cloned().map(Place::Finite));
    places[1..].sort_by(|a, b| a.prime().cmp(&b.prime()));
    let mut reports = Vec::new();
    let mut breakdown = Vec::new();
    for v in &places {
        let r = hyper_local_report(c, points, v)?;
        let kernel = match v {
            Place::RealInfinite => {
                let real = crate::poly::real_root_intervals(&c.f).len() as u32;
                let pairs = (c.degree() as u32 - real) / 2;
                1u64 << (real + pairs - 1)
            }
            Place::Finite(_) => r.order_c,
        };
        let bad = matches!(v, Place::Finite(p) if primes.contains(p));
        breakdown.push(contribution(&r, kernel, bad, 2)?);
        reports.push(r);
    }
    let tf = tfae_test(&c.f)?;
    let class = match cd {
        Some(cd) => Some(c2_rank_from_class_data(&c.f, &tf, cd)?),
        None => None,
    };
    let ind = if points.is_empty() { None } else { Some(independence_auto(c, points)?) };
    let mut ledger = assemble_ledger(c.f.to_string(), 2, reports, breakdown, class.as_ref(), ind.as_ref());
    for r in &ledger.local_reports {
        if r.notes.iter().any(|n| n.starts_with("images do not span")) {
            ledger.notes.push(format!("at {} the images do not span S, so dim I is a lower bound and the bounds are weaker", r.place));
        }
    }
    ledger.notes.push("primes dividing disc(f) stand in for the conductor".into());
    Ok(ledger)
}

impl fmt::Display for GlobalLedger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ledger for {}", self.subject)?;
        writeln!(f, "{:>8}  {:>5}  {:>5}  {:>5}  {:>5}  {:>5}", "place", "dim S", "dim C", "dim I", "S/I", "C/I")?;
        for c in &self.breakdown {
            writeln!(
                f,
                "{:>8}  {:>5}  {:>5}  {:>5}  {:>5}  {:>5}",
                c.place.to_string(),
                c.rank_s,
                c.rank_c,
                c.rank_i,
                c.s_over_i(),
                c.c_over_i()
            )?;
        }
        writeln!(f, "rank S/I <= {}", self.bound_rank_s_over_i)?;
        writeln!(f, "rank C/I <= {}", self.bound_rank_c_over_i)?;
        writeln!(f, "[S : C] <= {}", self.index_bound_c_in_s)?;
        match self.class_side_rank {
            Some(r) => writeln!(f, "dim C = {r}")?,
            None => writeln!(f, "dim C unknown")?,
        }
        for p in &self.class_side_provenance {
            writeln!(f, "  {p}")?;
        }
        if let Some(r) = self.point_image_rank {
            writeln!(f, "point image rank = {r}")?;
        }
        if let Some([lo, hi]) = self.class_interval {
            writeln!(f, "dim S in [{lo}, {hi}] from the class group and local bounds")?;
        }
        if let Some([lo, hi]) = self.selmer_rank_interval {
            writeln!(f, "dim S in [{lo}, {hi}]")?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn e(a: [i64; 5]) -> WeierstrassModel {
        WeierstrassModel::from_ints(a).unwrap()
    }

    fn quintic() -> HyperellipticCurve {
        HyperellipticCurve::parse("X^5+16X^4-274X^3+817X^2+178X+1").unwrap()
    }

    const QUINTIC_CLASS: &str = "X^5+16X^4-274X^3+817X^2+178X+1 | 4 | true | tables of simplest quintic fields\n";

    #[test]
    fn genus_examples() {
        let g = genus_2rank_quadratic(&int(-5)).unwrap();
        assert_eq!((g.narrow_rank, g.wide_rank), (1, 1));
        assert_eq!(genus_2rank_quadratic(&int(-1)).unwrap().wide_rank, 0);
        let g = genus_2rank_quadratic(&int(34)).unwrap();
        assert_eq!((g.narrow_rank, g.wide_rank, g.narrow_eq_wide), (1, 1, false));
        let g = genus_2rank_quadratic(&int(3)).unwrap();
        assert_eq!((g.narrow_rank, g.wide_rank, g.narrow_eq_wide), (1, 0, false));
        assert!(genus_2rank_quadratic(&int(5)).unwrap().narrow_eq_wide);
        assert!(genus_2rank_quadratic(&int(12)).is_err());
    }

    #[test]
    fn mestre_bounds() {
        let m = e([0, 2597055, 357573631, -549082, -19608054]);
        let b = divis_bounds(&m, &IsogenyMap::multiplication(&m, 2).unwrap()).unwrap();
        assert_eq!((b.bound_rank_c_over_i, b.bound_rank_s_over_i), (0, 1));
        assert_eq!(b.product_form_s_over_i, Some(1));
        let at2 = b.breakdown.iter().find(|c| c.place == Place::finite(2)).unwrap();
        assert_eq!(at2.s_over_i(), 1);
    }

    #[test]
    fn congruent_number_breakdown() {
        let m = e([0, 0, 0, -25, 0]);
        let b = divis_bounds(&m, &IsogenyMap::multiplication(&m, 2).unwrap()).unwrap();
        let at5 = b.breakdown.iter().find(|c| c.place == Place::finite(5)).unwrap();
        assert_eq!((at5.rank_kernel, at5.rank_i), (2, 0));
        assert_eq!(b.bound_rank_s_over_i, b.product_form_s_over_i.unwrap());
        let places: Vec<String> = b.breakdown.iter().map(|c| c.place.to_string()).collect();
        assert_eq!(places, ["inf", "2", "5"]);
    }

    #[test]
    fn extra_places_never_lower_bounds() {
        let m = e([0, 0, 0, -25, 0]);
        let two = IsogenyMap::multiplication(&m, 2).unwrap();
        let cfg = LocalConfig::default();
        let base = divis_bounds_with(&m, &two, &[], &cfg).unwrap().0;
        let more = divis_bounds_with(&m, &two, &[Place::finite(3), Place::finite(7)], &cfg).unwrap().0;
        assert!(more.bound_rank_s_over_i >= base.bound_rank_s_over_i);
        assert!(more.bound_rank_c_over_i >= base.bound_rank_c_over_i);
    }

    #[test]
    fn class_data_round_trip() {
        let cd = ClassData::parse(&format!("# comment\n{QUINTIC_CLASS}X^2-34 | 1 | false | anything\n")).unwrap();
        assert_eq!(cd.records.len(), 2);
        assert_eq!(cd.records[1].source, GENUS_SOURCE);
        assert_eq!(ClassData::parse(&cd.to_text()).unwrap(), cd);
        assert!(ClassData::parse("X^2-34 | 0 | false | wrong").is_err());
        assert!(ClassData::parse("X^3-2 | 0 | true").is_err());
    }

    #[test]
    fn c2_rank_patterns() {
        let cd = ClassData::parse(QUINTIC_CLASS).unwrap();
        let f = quintic().f;
        let side = c2_rank_from_class_data(&f, &tfae_test(&f).unwrap(), &cd).unwrap();
        assert_eq!((side.rank, side.narrow_eq_wide), (4, true));
        // linear times Q(sqrt -5): K x L
        let g = RatPoly::from_ints(&[-1, 1]).mul(&RatPoly::from_ints(&[5, 0, 1]));
        let side = c2_rank_from_class_data(&g, &tfae_test(&g).unwrap(), &ClassData::default()).unwrap();
        assert_eq!(side.rank, 1);
        let s5 = RatPoly::parse("X^5-X-1").unwrap();
        assert!(matches!(c2_rank_from_class_data(&s5, &tfae_test(&s5).unwrap(), &cd), Err(Error::OutOfScope(_))));
        let cubic = RatPoly::parse("X^3-2").unwrap();
        assert!(c2_rank_from_class_data(&cubic, &tfae_test(&cubic).unwrap(), &cd).is_err());
    }

    #[test]
    fn quintic_ledger() {
        let c = quintic();
        let cd = ClassData::parse(QUINTIC_CLASS).unwrap();
        // torsion images alone leave I at 191 undetermined
        let l = hyperelliptic_ledger(&c, Some(&cd), &[]).unwrap();
        assert_eq!(l.bound_rank_c_over_i, 2);
        assert_eq!(l.bound_rank_s_over_i, 4);
        assert_eq!(l.selmer_rank_interval, Some([2, 8]));
        let pts: Vec<DescentPoint> =
            ["-17", "-9", "-6", "-2", "0", "4"].iter().map(|s| DescentPoint::parse(s, &c).unwrap()).collect();
        let l = hyperelliptic_ledger(&c, Some(&cd), &pts).unwrap();
        assert_eq!(l.bound_rank_c_over_i, 1);
        assert_eq!(l.bound_rank_s_over_i, 3);
        assert!(l.narrow_refinement_applied);
        let unrefined: u32 = l.breakdown.iter().map(|c| c.s_over_i()).sum();
        assert_eq!(unrefined, 5);
        assert_eq!(l.class_interval, Some([3, 7]));
        assert_eq!(l.selmer_rank_interval, Some([6, 7]));
        let json = serde_json::to_string(&l).unwrap();
        assert!(json.contains("selmer_rank_interval"));
        let back: GlobalLedger = serde_json::from_str(&json).unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn elliptic_ledger_without_class_data() {
        let m = e([0, 0, 0, -25, 0]);
        let pts = vec![Point::affine(rat(-4, 1), rat(6, 1))];
        let l = elliptic_ledger(&m, None, &pts, &LocalConfig::default()).unwrap();
        assert_eq!(l.selmer_rank_interval, None);
        assert_eq!(l.point_image_rank, Some(1));
        // X^3 - 25X splits over Q: the class side is 0
        let l = elliptic_ledger(&m, Some(&ClassData::default()), &pts, &LocalConfig::default()).unwrap();
        assert_eq!(l.class_side_rank, Some(0));
        let [lo, hi] = l.selmer_rank_interval.unwrap();
        assert!(lo <= 3 && 3 <= hi, "[{lo}, {hi}]");
    }
}
