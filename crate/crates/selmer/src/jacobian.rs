//! Descent on Jacobians of odd-degree hyperelliptic curves `Y^2 = f(X)` via
//! the X - T map into `(Q_v[T]/f)^* / squares`.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_with::{serde_as, DisplayFromStr};

use crate::arith::{
    int, is_prime, is_square_rat, legendre, modinv, pow_int, rat_from_int, rat_mod, unit_part, val_int, vfin, Int,
    Place, Rat, SquareClass, UnitClass,
};
use crate::descent_local::LocalDescentReport;
use crate::elliptic::WeierstrassModel;
use crate::error::{input, unresolved, Error, Result};
use crate::poly::{
    compare_with_root, discriminant, factor_mod_p, factor_over_z, local_splitting_type_with, monic_integral,
    real_root_intervals, zp_mul, zp_powmod, zp_reduce, zp_rem, FpPoly, HenselConfig, LocalFactorKind,
    LocalSplittingType, RatPoly,
};

/// `Y^2 = f(X)` with `f` monic, separable, of odd degree at least 3.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperellipticCurve {
    pub f: RatPoly,
}

impl HyperellipticCurve {
    pub fn new(f: RatPoly) -> Result<HyperellipticCurve> {
        if f.degree() < 3 || f.deg() % 2 == 0 {
            return input(format!("f must have odd degree at least 3, got degree {}", f.degree()));
        }
        if !f.lc().is_one() {
            return input("f must be monic");
        }
        if !f.is_squarefree() {
            return input("f is not separable");
        }
        Ok(HyperellipticCurve { f })
    }

    pub fn parse(s: &str) -> Result<HyperellipticCurve> {
        Self::new(RatPoly::parse(s)?)
    }

    /// The curve `Y^2 = g(X)` with `g` the 2-division cubic of `m`.
    pub fn from_elliptic(m: &WeierstrassModel) -> HyperellipticCurve {
        HyperellipticCurve { f: m.two_division_cubic() }
    }

    pub fn degree(&self) -> usize {
        self.f.deg()
    }

    pub fn genus(&self) -> usize {
        (self.f.deg() - 1) / 2
    }

    /// `dim J(Q)[2]`: one less than the number of irreducible factors of f.
    pub fn rational_two_torsion_rank(&self) -> Result<u32> {
        Ok(factor_over_z(&self.f)?.factors.len() as u32 - 1)
    }
}

impl fmt::Display for HyperellipticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Y^2 = {}", self.f)
    }
}

// ---------------------------------------------------------------------------
// Points

/// A divisor class fed to the X - T map.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DescentPoint {
    /// `(x, y) - infinity` for a rational point with `y != 0`.
    Rational { #[serde_as(as = "DisplayFromStr")] x: Rat, #[serde_as(as = "DisplayFromStr")] y: Rat },
    /// `(alpha_i, 0) - infinity` for the root of the i-th local component (1-based).
    TorsionRoot(usize),
    /// A sum with integer multiplicities.
    FormalSum(Vec<(i64, DescentPoint)>),
}

fn rat_sqrt(q: &Rat) -> Option<Rat> {
    if !is_square_rat(q) {
        return None;
    }
    Some(Rat::new(q.numer().sqrt(), q.denom().sqrt()))
}

impl DescentPoint {
    /// Parses `x`, `(x,y)`, `alpha:i` or `sum: p1 + p2 + ...` (terms may carry `k*`).
    pub fn parse(s: &str, c: &HyperellipticCurve) -> Result<DescentPoint> {
        let t = s.trim();
        if let Some(rest) = t.strip_prefix("sum:") {
            let mut terms = Vec::new();
            for part in split_sum(rest) {
                let part = part.trim();
                if part.is_empty() {
                    return input(format!("empty term in {s:?}"));
                }
                let (k, body) = match part.split_once('*') {
                    Some((k, b)) if k.trim().parse::<i64>().is_ok() => (k.trim().parse::<i64>().unwrap(), b),
                    _ => (1, part),
                };
                terms.push((k, DescentPoint::parse(body, c)?));
            }
            return Ok(DescentPoint::FormalSum(terms));
        }
        if let Some(i) = t.strip_prefix("alpha:") {
            let i: usize = i.trim().parse().map_err(|_| Error::Input(format!("bad root index in {s:?}")))?;
            if i == 0 || i > c.degree() {
                return input(format!("root index {i} out of range 1..{}", c.degree()));
            }
            return Ok(DescentPoint::TorsionRoot(i));
        }
        if let Some(inner) = t.strip_prefix('(').and_then(|u| u.strip_suffix(')')) {
            if let Some((xs, ys)) = inner.split_once(',') {
                let x = crate::arith::parse_rat(xs.trim())?;
                let y = crate::arith::parse_rat(ys.trim())?;
                if c.f.eval(&x) != &y * &y {
                    return input(format!("({x}, {y}) is not on {c}"));
                }
                return Self::rational(x, y);
            }
            return DescentPoint::parse(inner, c);
        }
        let x = crate::arith::parse_rat(t)?;
        let y = rat_sqrt(&c.f.eval(&x)).ok_or_else(|| Error::Input(format!("f({x}) is not a rational square")))?;
        Self::rational(x, y)
    }

    fn rational(x: Rat, y: Rat) -> Result<DescentPoint> {
        if y.is_zero() {
            return input(format!("({x}, 0) is 2-torsion; give it as alpha:i"));
        }
        Ok(DescentPoint::Rational { x, y })
    }

    /// Terms with odd multiplicity, flattened.
    fn odd_terms(&self) -> Vec<&DescentPoint> {
        let mut out: Vec<(&DescentPoint, i64)> = Vec::new();
        fn walk<'a>(d: &'a DescentPoint, k: i64, out: &mut Vec<(&'a DescentPoint, i64)>) {
            match d {
                DescentPoint::FormalSum(ts) => {
                    for (m, t) in ts {
                        walk(t, k * m, out);
                    }
                }
                _ => match out.iter_mut().find(|(q, _)| *q == d) {
                    Some(slot) => slot.1 += k,
                    None => out.push((d, k)),
                },
            }
        }
        walk(self, 1, &mut out);
        out.into_iter().filter(|(_, k)| k.rem_euclid(2) == 1).map(|(d, _)| d).collect()
    }
}

fn split_sum(s: &str) -> Vec<&str> {
    // '+' separates terms; a '+' right after '(' , ',' or '*' belongs to a number
    let mut out = Vec::new();
    let mut start = 0;
    let mut depth = 0i32;
    let bytes = s.as_bytes();
    for (i, &ch) in bytes.iter().enumerate() {
        match ch {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' if depth == 0 => {
                let prev = s[..i].trim_end();
                if !prev.is_empty() && !prev.ends_with('*') {
                    out.push(&s[start..i]);
                    start = i + 1;
                }
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

impl fmt::Display for DescentPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DescentPoint::Rational { x, .. } => write!(f, "({x})"),
            DescentPoint::TorsionRoot(i) => write!(f, "(a{i})"),
            DescentPoint::FormalSum(ts) => {
                let parts: Vec<String> = ts
                    .iter()
                    .map(|(k, t)| if *k == 1 { t.to_string() } else { format!("{k}*{t}") })
                    .collect();
                write!(f, "{}", parts.join("+"))
            }
        }
    }
}

/// Reads a points file: one point per line, `#` starts a comment.
pub fn parse_points(text: &str, c: &HyperellipticCurve) -> Result<Vec<DescentPoint>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap().trim())
        .filter(|l| !l.is_empty())
        .map(|l| DescentPoint::parse(l, c))
        .collect()
}

// ---------------------------------------------------------------------------
// Local algebra

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentKind {
    /// A root in Q_p.
    Root,
    /// A field extension of Q_p of degree e*f >= 2.
    Extension,
    RealRoot,
    ComplexPair,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub label: String,
    pub kind: ComponentKind,
    pub e: u32,
    pub f: u32,
}

#[derive(Debug, Clone, Default)]
enum Inner {
    #[default]
    Empty,
    Finite {
        f: RatPoly,
        cfg: HenselConfig,
        lst: LocalSplittingType,
        /// LST factor index of each component.
        order: Vec<usize>,
    },
    Real {
        f: RatPoly,
        intervals: Vec<(Rat, Rat)>,
    },
}

/// `Q_v[T]/f` as a product of local fields, components in a fixed order:
/// Q_p-roots by p-adic digits (low first), then extensions; at the real
/// place real roots ascending, then complex pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EtaleSplit {
    pub place: Place,
    pub components: Vec<Component>,
    pub precision: Option<u32>,
    #[serde(skip)]
    inner: Inner,
}

fn sym_residue(r: &Int, p: &Int) -> Int {
    let r = r.mod_floor(p);
    if &r * int(2) > *p {
        r - p
    } else {
        r
    }
}

fn digits(x: &Int, p: &Int, n: u32) -> Vec<Int> {
    let mut x = x.mod_floor(&pow_int(p, n));
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let (q, r) = x.div_mod_floor(p);
        out.push(r);
        x = q;
    }
    out
}

impl EtaleSplit {
    pub fn new(c: &HyperellipticCurve, v: &Place, cfg: &HenselConfig) -> Result<EtaleSplit> {
        Self::with_precision(c, v, cfg, cfg.start)
    }

    fn with_precision(c: &HyperellipticCurve, v: &Place, cfg: &HenselConfig, prec: u32) -> Result<EtaleSplit> {
        match v {
            Place::RealInfinite => {
                let intervals = real_root_intervals(&c.f);
                let r = intervals.len();
                let pairs = (c.degree() - r) / 2;
                let mut components = Vec::new();
                for k in 0..r + pairs {
                    components.push(Component {
                        label: format!("x-a{}", k + 1),
                        kind: if k < r { ComponentKind::RealRoot } else { ComponentKind::ComplexPair },
                        e: 1,
                        f: if k < r { 1 } else { 2 },
                    });
                }
                Ok(EtaleSplit {
                    place: v.clone(),
                    components,
                    precision: None,
                    inner: Inner::Real { f: c.f.clone(), intervals },
                })
            }
            Place::Finite(p) => {
                let lst = local_splitting_type_with(&c.f, p, cfg, prec)?;
                let n = lst.precision;
                let mut roots: Vec<usize> = (0..lst.factors.len()).filter(|&i| lst.factors[i].is_root()).collect();
                roots.sort_by_key(|&i| digits(lst.factors[i].root().unwrap(), p, n));
                let exts: Vec<usize> = (0..lst.factors.len()).filter(|&i| !lst.factors[i].is_root()).collect();
                let order: Vec<usize> = roots.iter().chain(exts.iter()).copied().collect();
                let residue = |i: usize| lst.factors[i].root().unwrap().mod_floor(p);
                let mut components = Vec::new();
                for (k, &i) in order.iter().enumerate() {
                    let fa = &lst.factors[i];
                    let label = if fa.is_root() {
                        let r = residue(i);
                        let shared = roots.iter().filter(|&&j| residue(j) == r).count() > 1;
                        if shared || !lst.scale.is_one() {
                            format!("x-a{}", k + 1)
                        } else {
                            let s = sym_residue(&r, p);
                            if s.is_negative() {
                                format!("x+{}", -s)
                            } else {
                                format!("x-{s}")
                            }
                        }
                    } else {
                        format!("x-a{}", k + 1)
                    };
                    components.push(Component {
                        label,
                        kind: if fa.is_root() { ComponentKind::Root } else { ComponentKind::Extension },
                        e: fa.e,
                        f: fa.f,
                    });
                }
                Ok(EtaleSplit {
                    place: v.clone(),
                    components,
                    precision: Some(n),
                    inner: Inner::Finite { f: c.f.clone(), cfg: *cfg, lst, order },
                })
            }
        }
    }

    /// Number of Galois orbits of roots, i.e. local factors of f.
    pub fn factor_count(&self) -> usize {
        self.components.len()
    }

    fn refine(&mut self) -> Result<()> {
        let (f, cfg, prec) = match &self.inner {
            Inner::Finite { f, cfg, lst, .. } => (f.clone(), *cfg, lst.precision),
            _ => return unresolved("precision refinement at the real place"),
        };
        if prec >= cfg.cap {
            return unresolved(format!("X - T image needs more than {} p-adic digits", cfg.cap));
        }
        let next = Self::with_precision(&HyperellipticCurve { f }, &self.place, &cfg, (2 * prec).min(cfg.cap))?;
        if next.components != self.components {
            return unresolved("component order changed under precision refinement");
        }
        *self = next;
        Ok(())
    }

    /// Image of a divisor class under X - T, refining precision as needed.
    pub fn image(&mut self, d: &DescentPoint) -> Result<SquareClassVector> {
        loop {
            match self.try_image(d) {
                Ok(v) => return Ok(v),
                Err(Fail::Precision) => self.refine()?,
                Err(Fail::Hard(e)) => return Err(e),
            }
        }
    }

    fn identity_vector(&self) -> SquareClassVector {
        let entries = match &self.inner {
            Inner::Real { .. } => self
                .components
                .iter()
                .map(|c| match c.kind {
                    ComponentKind::ComplexPair => ComponentClass::Complex,
                    _ => ComponentClass::Field(SquareClass::identity(&self.place)),
                })
                .collect(),
            Inner::Finite { lst, order, .. } => order
                .iter()
                .map(|&i| {
                    let fa = &lst.factors[i];
                    match &fa.kind {
                        LocalFactorKind::Root { .. } => ComponentClass::Field(SquareClass::identity(&self.place)),
                        LocalFactorKind::Unramified { factor } => {
                            let el = UnrElement::new(&lst.p, lst.precision, factor, 0, vec![Int::one()]);
                            ComponentClass::Extension(ExtClass::from_element(el, fa.f))
                        }
                        LocalFactorKind::Block { .. } => ComponentClass::Extension(ExtClass {
                            e: fa.e,
                            f: fa.f,
                            two: lst.p == int(2),
                            odd_valuation: false,
                            unit_square: Some(true),
                            unramified: Some(true),
                            norm: Some(SquareClass::identity(&self.place)),
                            element: None,
                        }),
                    }
                })
                .collect(),
            Inner::Empty => vec![],
        };
        SquareClassVector { place: self.place.clone(), entries }
    }

    fn try_image(&self, d: &DescentPoint) -> std::result::Result<SquareClassVector, Fail> {
        let mut acc = self.identity_vector();
        for t in d.odd_terms() {
            let v = match t {
                DescentPoint::Rational { x, .. } => self.rational_image(x)?,
                DescentPoint::TorsionRoot(i) => self.torsion_image(*i)?,
                DescentPoint::FormalSum(_) => unreachable!("flattened"),
            };
            acc = acc.mul(&v).map_err(Fail::Hard)?;
        }
        Ok(acc)
    }

    fn rational_image(&self, x: &Rat) -> std::result::Result<SquareClassVector, Fail> {
        match &self.inner {
            Inner::Real { f, intervals } => {
                let mut entries = Vec::new();
                for c in &self.components {
                    if c.kind == ComponentKind::ComplexPair {
                        entries.push(ComponentClass::Complex);
                    }
                }
                let mut real = Vec::new();
                for iv in intervals {
                    let s = compare_with_root(f, iv, x);
                    if s == 0 {
                        return Err(Fail::Hard(Error::Input(format!("{x} is a root of f"))));
                    }
                    real.push(ComponentClass::Field(SquareClass {
                        place: Place::RealInfinite,
                        odd_valuation: false,
                        unit: UnitClass::Sign { negative: s < 0 },
                    }));
                }
                real.extend(entries);
                Ok(SquareClassVector { place: self.place.clone(), entries: real })
            }
            Inner::Finite { lst, order, .. } => {
                let p = &lst.p;
                let dd = &lst.scale;
                // x - alpha = (xD - X)/D
                let y = x * rat_from_int(dd);
                let mut entries = Vec::new();
                for &i in order {
                    let fa = &lst.factors[i];
                    let cls = match &fa.kind {
                        LocalFactorKind::Root { root, exact } => {
                            let t = &y - rat_from_int(root);
                            if t.is_zero() && *exact {
                                return Err(Fail::Hard(Error::Input(format!("{x} is a root of f"))));
                            }
                            let val = if t.is_zero() { i64::MAX } else { vfin(&t, p) };
                            if !*exact {
                                check_precision(val, p, lst.precision)?;
                            }
                            ComponentClass::Field(SquareClass::of(&(t * rat_from_int(dd)), &self.place).map_err(Fail::Hard)?)
                        }
                        _ => ComponentClass::Extension(ext_difference(lst, i, &y, false)?),
                    };
                    entries.push(cls);
                }
                Ok(SquareClassVector { place: self.place.clone(), entries })
            }
            Inner::Empty => Err(Fail::Hard(Error::Input("empty split".into()))),
        }
    }

    fn torsion_image(&self, i: usize) -> std::result::Result<SquareClassVector, Fail> {
        let k = i.checked_sub(1).filter(|&k| k < self.components.len()).ok_or_else(|| {
            Fail::Hard(Error::Input(format!("root index {i} out of range at {}", self.place)))
        })?;
        match &self.inner {
            Inner::Real { intervals, .. } => {
                if k >= intervals.len() {
                    return Err(Fail::Hard(Error::Input(format!("a{i} is not real"))));
                }
                let sign = |neg: bool| {
                    ComponentClass::Field(SquareClass {
                        place: Place::RealInfinite,
                        odd_valuation: false,
                        unit: UnitClass::Sign { negative: neg },
                    })
                };
                let mut entries = Vec::new();
                // alpha_i - alpha_j < 0 exactly when j > i; complex pairs have positive norm
                let negatives = intervals.len() - 1 - k;
                for (j, c) in self.components.iter().enumerate() {
                    entries.push(match c.kind {
                        ComponentKind::ComplexPair => ComponentClass::Complex,
                        _ if j == k => sign(negatives % 2 == 1),
                        _ => sign(j > k),
                    });
                }
                Ok(SquareClassVector { place: self.place.clone(), entries })
            }
            Inner::Finite { lst, order, .. } => {
                let p = &lst.p;
                let fi = &lst.factors[order[k]];
                let (xi, exact_i) = match &fi.kind {
                    LocalFactorKind::Root { root, exact } => (root.clone(), *exact),
                    _ => {
                        return Err(Fail::Hard(Error::Input(format!(
                            "a{i} is not Q_{p}-rational (component of degree {})",
                            fi.degree()
                        ))))
                    }
                };
                let dd = &lst.scale;
                let yi = rat_from_int(&xi);
                let mut entries = Vec::new();
                for (j, &fj) in order.iter().enumerate() {
                    let fa = &lst.factors[fj];
                    let cls = if j == k {
                        // prod_{j != i} (alpha_i - alpha_j) = f'(alpha_i) = F'(X_i) / D^(n-1)
                        let n = lst.scaled.len() - 1;
                        let mut acc = Int::zero();
                        for (e, c) in lst.scaled.iter().enumerate().skip(1).rev() {
                            acc = acc * &xi + c * int(e as i64);
                        }
                        if acc.is_zero() {
                            return Err(Fail::Precision);
                        }
                        let val = val_int(&acc, p).finite().unwrap();
                        if !exact_i {
                            check_precision(val, p, lst.precision)?;
                        }
                        let q = rat_from_int(&acc) * rat_from_int(&pow_int(dd, (n - 1) as u32));
                        ComponentClass::Field(SquareClass::of(&q, &self.place).map_err(Fail::Hard)?)
                    } else {
                        match &fa.kind {
                            LocalFactorKind::Root { root, exact } => {
                                let t = &xi - root;
                                if t.is_zero() {
                                    return Err(Fail::Precision);
                                }
                                let val = val_int(&t, p).finite().unwrap();
                                if !(exact_i && *exact) {
                                    check_precision(val, p, lst.precision)?;
                                }
                                ComponentClass::Field(
                                    SquareClass::of(&rat_from_int(&(t * dd)), &self.place).map_err(Fail::Hard)?,
                                )
                            }
                            _ => ComponentClass::Extension(ext_difference(lst, fj, &yi, !exact_i)?),
                        }
                    };
                    entries.push(cls);
                }
                Ok(SquareClassVector { place: self.place.clone(), entries })
            }
            Inner::Empty => Err(Fail::Hard(Error::Input("empty split".into()))),
        }
    }
}

enum Fail {
    Precision,
    Hard(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail::Hard(e)
    }
}

fn check_precision(val: i64, p: &Int, prec: u32) -> std::result::Result<(), Fail> {
    let margin = if p == &int(2) { 3 } else { 1 };
    if val == i64::MAX || val + margin > prec as i64 {
        Err(Fail::Precision)
    } else {
        Ok(())
    }
}

/// Class of `(Y - X)/D` in the field of factor `i`, where `X` runs over the
/// roots of that factor (scaled variable) and `Y` lies in Q_p. When
/// `approx` is set, `Y` is only known modulo `p^precision`.
fn ext_difference(lst: &LocalSplittingType, i: usize, y: &Rat, approx: bool) -> std::result::Result<ExtClass, Fail> {
    let p = &lst.p;
    let fa = &lst.factors[i];
    let dd = rat_from_int(&lst.scale);
    let two = p == &int(2);
    match &fa.kind {
        LocalFactorKind::Unramified { factor } => {
            // (Y - X)/D has the class of (num - den X) * den * D
            let (num, den) = (y.numer().clone(), y.denom().clone());
            let vn = val_int(&num, p).finite().unwrap_or(i64::MAX);
            let vd = val_int(&den, p).finite().unwrap();
            let v = vn.min(vd);
            if approx && v + 1 > lst.precision as i64 {
                return Err(Fail::Precision);
            }
            let pv = pow_int(p, v as u32);
            let z = vec![&num / &pv, -(&den / &pv)];
            let dd_int = &den * &lst.scale;
            let (w, u) = crate::arith::split_power(&dd_int, p);
            let unit = zp_mul(&z, &[u], &pow_int(p, lst.precision));
            let el = UnrElement::new(p, lst.precision, factor, v + w, unit);
            Ok(ExtClass::from_element(el, fa.f))
        }
        LocalFactorKind::Block { center, num, den, residual } => {
            if two {
                return Err(Fail::Hard(Error::Unresolved(format!(
                    "X - T image in a ramified or non-simple component at 2 (e={}, f={})",
                    fa.e, fa.f
                ))));
            }
            let s = y - rat_from_int(center);
            let vs = if s.is_zero() { i64::MAX } else { vfin(&s, p) };
            if approx && vs != i64::MAX && vs + 1 > lst.precision as i64 {
                return Err(Fail::Precision);
            }
            if approx && vs == i64::MAX {
                return Err(Fail::Precision);
            }
            let (e, f) = (fa.e as i64, fa.f as i64);
            let vdd = vfin(&dd, p);
            let ud = rat_mod(&unit_part(&dd, p), p).unwrap();
            let f_even = f % 2 == 0;
            let leg = |a: &Int| legendre(&a.mod_floor(p), p);
            if vs != i64::MAX && vs * den < *num {
                // x is outside the cluster: the class is that of s/D in Q_p
                let q = &s / &dd;
                let k = vs - vdd;
                let us = rat_mod(&unit_part(&q, p), p).unwrap();
                let unit_square = if k % 2 == 0 { Some(f_even || leg(&us) == 1) } else { None };
                let odd_valuation = (e * k).rem_euclid(2) == 1;
                let norm = SquareClass::of(&num_traits::pow(q, (e * f) as usize), &Place::Finite(p.clone()))?;
                return Ok(ExtClass {
                    e: fa.e,
                    f: fa.f,
                    two,
                    odd_valuation,
                    unit_square,
                    unramified: Some(!odd_valuation),
                    norm: Some(norm),
                    element: None,
                });
            }
            if e != 1 {
                return Err(Fail::Hard(Error::Unresolved(format!(
                    "X - T image inside a ramified cluster (e={e}, f={f}) at {p}"
                ))));
            }
            // X - c = p^h w with w a unit whose residue is a root of the residual factor
            let h = *num;
            let lc = residual.last().unwrap().clone();
            let lc_inv = modinv(&lc, p).unwrap();
            let rnorm = |t: &Int| {
                let mut acc = Int::zero();
                for c in residual.iter().rev() {
                    acc = (acc * t + c).mod_floor(p);
                }
                (acc * &lc_inv).mod_floor(p)
            };
            let unit_norm = if vs > h {
                rnorm(&Int::zero())
            } else {
                let sp = rat_mod(&(&s / crate::arith::pow_rat(p, h)), p).unwrap();
                rnorm(&sp)
            };
            // divide by D: the unit of D contributes its norm ud^f
            let ud_f = num_traits::pow(ud, f as usize);
            let n_total = (unit_norm * ud_f).mod_floor(p);
            let val = h - vdd;
            let square = leg(&n_total) == 1;
            let odd_valuation = val.rem_euclid(2) == 1;
            Ok(ExtClass {
                e: 1,
                f: fa.f,
                two,
                odd_valuation,
                unit_square: Some(square),
                unramified: Some(!odd_valuation),
                norm: Some(SquareClass {
                    place: Place::Finite(p.clone()),
                    odd_valuation: (f * val).rem_euclid(2) == 1,
                    unit: UnitClass::Residue { nonresidue: !square },
                }),
                element: None,
            })
        }
        LocalFactorKind::Root { .. } => unreachable!("roots are handled as Q_p components"),
    }
}

/// An element `p^val * unit` of an unramified extension `Z_p[X]/h`, the
/// unit known modulo `p^prec`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct UnrElement {
    p: Int,
    prec: u32,
    h: Vec<Int>,
    val: i64,
    unit: Vec<Int>,
}

impl UnrElement {
    fn new(p: &Int, prec: u32, h: &[Int], val: i64, unit: Vec<Int>) -> UnrElement {
        let m = pow_int(p, prec);
        let h = zp_reduce(h, &m);
        let unit = zp_rem(&unit, &h, &m);
        UnrElement { p: p.clone(), prec, h, val, unit }
    }

    fn mul(&self, o: &UnrElement) -> UnrElement {
        let prec = self.prec.min(o.prec);
        let m = pow_int(&self.p, prec);
        UnrElement::new(&self.p, prec, &self.h, self.val + o.val, zp_mul(&self.unit, &o.unit, &m))
    }

    fn degree(&self) -> usize {
        self.h.len() - 1
    }

    /// `(unit is a square, generates an unramified extension, norm class)`.
    fn classify(&self) -> (Option<bool>, bool, SquareClass) {
        let p = &self.p;
        let f = self.degree() as i64;
        let place = Place::Finite(p.clone());
        let odd_norm_val = (f * self.val).rem_euclid(2) == 1;
        if p != &int(2) {
            let q = pow_int(p, f as u32);
            let hbar = zp_reduce(&self.h, p);
            let e = (q - 1u32) / 2u32;
            let r = zp_powmod(&self.unit, &e, &hbar, p);
            let square = r == vec![Int::one()];
            let norm = SquareClass {
                place,
                odd_valuation: odd_norm_val,
                unit: UnitClass::Residue { nonresidue: !square },
            };
            return (Some(square), self.val % 2 == 0, norm);
        }
        let two = int(2);
        let four = int(4);
        let hbar = zp_reduce(&self.h, &two);
        let ubar = zp_reduce(&self.unit, &two);
        // the Frobenius inverse gives the square root in F_{2^f}
        let w0 = zp_powmod(&ubar, &pow_int(&two, (f - 1) as u32), &hbar, &two);
        let h4 = zp_reduce(&self.h, &four);
        let sq = zp_rem(&zp_mul(&w0, &w0, &four), &h4, &four);
        let u4 = zp_rem(&self.unit, &h4, &four);
        let unramified = self.val % 2 == 0 && sq == u4;
        let nm = norm_mod(&self.unit, &self.h, &pow_int(&two, self.prec.min(8)));
        let norm = SquareClass {
            place,
            odd_valuation: odd_norm_val,
            unit: UnitClass::Mod8(nm.mod_floor(&int(8)).to_u8().unwrap()),
        };
        (None, unramified, norm)
    }
}

/// `N(u)` modulo m for u in `Z[X]/h`: the determinant of multiplication by u.
fn norm_mod(u: &[Int], h: &[Int], m: &Int) -> Int {
    let n = h.len() - 1;
    let mut mat = vec![vec![Int::zero(); n]; n];
    let mut col = zp_rem(u, h, m);
    for j in 0..n {
        for i in 0..n {
            mat[i][j] = col.get(i).cloned().unwrap_or_default();
        }
        let mut shifted = vec![Int::zero()];
        shifted.extend(col.iter().cloned());
        col = zp_rem(&shifted, h, m);
    }
    bareiss(mat).mod_floor(m)
}

fn bareiss(mut a: Vec<Vec<Int>>) -> Int {
    let n = a.len();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Int::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Class of an element of a local field extension of Q_p.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtClass {
    pub e: u32,
    pub f: u32,
    pub two: bool,
    pub odd_valuation: bool,
    /// Whether the unit part is a square; `None` when not determined.
    pub unit_square: Option<bool>,
    /// Whether adjoining the square root gives an unramified extension.
    pub unramified: Option<bool>,
    /// The norm to Q_p, as a square class.
    pub norm: Option<SquareClass>,
    #[serde(skip)]
    element: Option<UnrElement>,
}

impl PartialEq for ExtClass {
    fn eq(&self, o: &ExtClass) -> bool {
        (self.e, self.f, self.odd_valuation, self.unit_square, self.unramified, &self.norm)
            == (o.e, o.f, o.odd_valuation, o.unit_square, o.unramified, &o.norm)
    }
}

impl Eq for ExtClass {}

impl ExtClass {
    fn from_element(el: UnrElement, f: u32) -> ExtClass {
        let (unit_square, unramified, norm) = el.classify();
        ExtClass {
            e: 1,
            f,
            two: el.p == int(2),
            odd_valuation: el.val.rem_euclid(2) == 1,
            unit_square,
            unramified: Some(unramified),
            norm: Some(norm),
            element: Some(el),
        }
    }

    fn mul(&self, o: &ExtClass) -> Result<ExtClass> {
        if let (Some(a), Some(b)) = (&self.element, &o.element) {
            return Ok(ExtClass::from_element(a.mul(b), self.f));
        }
        let odd_valuation = self.odd_valuation ^ o.odd_valuation;
        let unit_square = match (self.unit_square, o.unit_square) {
            (Some(a), Some(b)) => Some(a == b),
            _ => None,
        };
        let unramified = if self.two { None } else { Some(!odd_valuation) };
        let norm = match (&self.norm, &o.norm) {
            (Some(a), Some(b)) => Some(a.mul(b)?),
            _ => None,
        };
        Ok(ExtClass { e: self.e, f: self.f, two: self.two, odd_valuation, unit_square, unramified, norm, element: None })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentClass {
    /// A component equal to Q_p or R.
    Field(SquareClass),
    /// A complex component: trivial group.
    Complex,
    Extension(ExtClass),
}

impl ComponentClass {
    fn mul(&self, o: &ComponentClass) -> Result<ComponentClass> {
        Ok(match (self, o) {
            (ComponentClass::Field(a), ComponentClass::Field(b)) => ComponentClass::Field(a.mul(b)?),
            (ComponentClass::Complex, ComponentClass::Complex) => ComponentClass::Complex,
            (ComponentClass::Extension(a), ComponentClass::Extension(b)) => ComponentClass::Extension(a.mul(b)?),
            _ => return input("mismatched components"),
        })
    }

    fn bits(&self) -> Result<Vec<bool>> {
        match self {
            ComponentClass::Field(s) => Ok(s.bits()),
            ComponentClass::Complex => Ok(vec![]),
            ComponentClass::Extension(x) => {
                if x.two {
                    return unresolved("square-class coordinates in an extension of Q_2");
                }
                let u = x.unit_square.ok_or_else(|| Error::Unresolved("unit class in a ramified component".into()))?;
                Ok(vec![x.odd_valuation, !u])
            }
        }
    }

    /// The coordinates that vanish exactly on unramified classes.
    fn ramification_bits(&self) -> Result<Vec<bool>> {
        match self {
            ComponentClass::Field(s) => {
                let b = s.bits();
                Ok(match s.unit {
                    UnitClass::Mod8(_) => b[..2].to_vec(),
                    UnitClass::Residue { .. } => b[..1].to_vec(),
                    UnitClass::Sign { .. } => b,
                })
            }
            ComponentClass::Complex => Ok(vec![]),
            ComponentClass::Extension(x) => {
                if x.two {
                    return unresolved("unramified subspace in an extension of Q_2");
                }
                Ok(vec![x.odd_valuation])
            }
        }
    }

    pub fn is_unramified(&self) -> Option<bool> {
        match self {
            ComponentClass::Field(s) => Some(s.is_unramified()),
            ComponentClass::Complex => Some(true),
            ComponentClass::Extension(x) => x.unramified,
        }
    }

    pub fn symbol(&self) -> String {
        match self {
            ComponentClass::Field(s) => s.to_string(),
            ComponentClass::Complex => "1".into(),
            ComponentClass::Extension(x) => {
                let u = match x.unit_square {
                    Some(true) => "",
                    Some(false) => "u",
                    None => "?",
                };
                match (x.odd_valuation, u) {
                    (false, "") => "1".into(),
                    (false, u) => u.into(),
                    (true, "") => "pi".into(),
                    (true, u) => format!("{u}*pi"),
                }
            }
        }
    }
}

/// An element of `(Q_v[T]/f)^* / squares`, one entry per component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareClassVector {
    pub place: Place,
    pub entries: Vec<ComponentClass>,
}

impl SquareClassVector {
    pub fn mul(&self, o: &SquareClassVector) -> Result<SquareClassVector> {
        if self.entries.len() != o.entries.len() {
            return input("vectors of different lengths");
        }
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| a.mul(b)).collect::<Result<_>>()?;
        Ok(SquareClassVector { place: self.place.clone(), entries })
    }

    pub fn bits(&self) -> Result<Vec<bool>> {
        let mut out = Vec::new();
        for e in &self.entries {
            out.extend(e.bits()?);
        }
        Ok(out)
    }

    fn ramification_bits(&self) -> Result<Vec<bool>> {
        let mut out = Vec::new();
        for e in &self.entries {
            out.extend(e.ramification_bits()?);
        }
        Ok(out)
    }

    pub fn is_identity(&self) -> Result<bool> {
        Ok(self.bits()?.iter().all(|b| !b))
    }

    /// Whether every entry generates an unramified extension (positive at the
    /// real place); `None` when some entry is undetermined.
    pub fn is_unramified(&self) -> Option<bool> {
        let mut all = true;
        for e in &self.entries {
            all &= e.is_unramified()?;
        }
        Some(all)
    }

    /// The norm to Q_v, as a square class.
    pub fn norm(&self) -> Result<SquareClass> {
        let mut acc = SquareClass::identity(&self.place);
        for e in &self.entries {
            let n = match e {
                ComponentClass::Field(s) => s.clone(),
                ComponentClass::Complex => SquareClass::identity(&self.place),
                ComponentClass::Extension(x) => {
                    x.norm.clone().ok_or_else(|| Error::Unresolved("norm of an undetermined class".into()))?
                }
            };
            acc = acc.mul(&n)?;
        }
        Ok(acc)
    }

    pub fn symbols(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.symbol()).collect()
    }
}

/// Image of `d` under X - T at `v`.
pub fn xt_image(c: &HyperellipticCurve, d: &DescentPoint, v: &Place) -> Result<SquareClassVector> {
    EtaleSplit::new(c, v, &HenselConfig::default())?.image(d)
}

/// Images of several points with their column labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImageTable {
    pub place: Place,
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<String>)>,
    pub images: Vec<SquareClassVector>,
}

pub fn image_table(c: &HyperellipticCurve, points: &[DescentPoint], v: &Place) -> Result<ImageTable> {
    image_table_with(c, points, v, &HenselConfig::default())
}

pub fn image_table_with(
    c: &HyperellipticCurve,
    points: &[DescentPoint],
    v: &Place,
    cfg: &HenselConfig,
) -> Result<ImageTable> {
    let mut split = EtaleSplit::new(c, v, cfg)?;
    let mut images = Vec::new();
    for d in points {
        images.push(split.image(d)?);
    }
    let columns = split.components.iter().map(|c| c.label.clone()).collect();
    let rows = points.iter().zip(&images).map(|(d, im)| (d.to_string(), im.symbols())).collect();
    Ok(ImageTable { place: v.clone(), columns, rows, images })
}

impl fmt::Display for ImageTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut widths: Vec<usize> = std::iter::once("point".len())
            .chain(self.columns.iter().map(|c| c.len()))
            .collect();
        for (name, syms) in &self.rows {
            widths[0] = widths[0].max(name.len());
            for (k, s) in syms.iter().enumerate() {
                widths[k + 1] = widths[k + 1].max(s.len());
            }
        }
        let line = |cells: Vec<&str>| {
            cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ")
        };
        writeln!(f, "X - T images at {}", self.place)?;
        writeln!(f, "{}", line(std::iter::once("point").chain(self.columns.iter().map(|s| s.as_str())).collect()))?;
        for (name, syms) in &self.rows {
            writeln!(f, "{}", line(std::iter::once(name.as_str()).chain(syms.iter().map(|s| s.as_str())).collect()))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Local ranks

/// `dim S(Q_v)`: `g [p = 2] + dim J(Q_p)[2]` at a finite place, `(r - 1)/2`
/// at the real place with r real roots.
pub fn local_selmer_rank_hyper(c: &HyperellipticCurve, v: &Place) -> Result<u32> {
    let split = EtaleSplit::new(c, v, &HenselConfig::default())?;
    Ok(selmer_rank_from_split(c, &split))
}

fn selmer_rank_from_split(c: &HyperellipticCurve, split: &EtaleSplit) -> u32 {
    match &split.place {
        Place::RealInfinite => {
            let r = split.components.iter().filter(|k| k.kind == ComponentKind::RealRoot).count() as u32;
            (r - 1) / 2
        }
        Place::Finite(p) => {
            let g = if p == &int(2) { c.genus() as u32 } else { 0 };
            g + split.factor_count() as u32 - 1
        }
    }
}

/// `dim C(Q_v)`: `dim J(Q_p)[2]` at a finite place, 0 at the real place.
pub fn local_class_rank_hyper(c: &HyperellipticCurve, v: &Place) -> Result<u32> {
    match v {
        Place::RealInfinite => Ok(0),
        Place::Finite(_) => Ok(EtaleSplit::new(c, v, &HenselConfig::default())?.factor_count() as u32 - 1),
    }
}

fn f2_rank(rows: &[Vec<bool>]) -> usize {
    let mut m: Vec<Vec<bool>> = rows.to_vec();
    let width = m.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut rank = 0;
    for col in 0..width {
        let Some(piv) = (rank..m.len()).find(|&r| m[r].get(col).copied().unwrap_or(false)) else {
            continue;
        };
        m.swap(rank, piv);
        let pivot = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row.get(col).copied().unwrap_or(false) {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= *b;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Basis of `{x : sum x_i rows_i = 0}`.
fn f2_left_kernel(rows: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = rows.len();
    let width = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut m: Vec<(Vec<bool>, Vec<bool>)> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut data = r.clone();
            data.resize(width, false);
            let mut tag = vec![false; n];
            tag[i] = true;
            (data, tag)
        })
        .collect();
    let mut rank = 0;
    for col in 0..width {
        let Some(piv) = (rank..n).find(|&r| m[r].0[col]) else {
            continue;
        };
        m.swap(rank, piv);
        let pivot = m[rank].clone();
        for r in 0..n {
            if r != rank && m[r].0[col] {
                for (a, b) in m[r].0.iter_mut().zip(&pivot.0) {
                    *a ^= *b;
                }
                for (a, b) in m[r].1.iter_mut().zip(&pivot.1) {
                    *a ^= *b;
                }
            }
        }
        rank += 1;
    }
    m.into_iter().skip(rank).map(|(_, tag)| tag).collect()
}

/// `(dim span(images) ∩ unramified, complete)`: a lower bound for
/// `dim I(Q_v)`, exact when the images span `S(Q_v)`.
pub fn local_intersection_rank(c: &HyperellipticCurve, points: &[DescentPoint], v: &Place) -> Result<(u32, bool)> {
    let mut split = EtaleSplit::new(c, v, &HenselConfig::default())?;
    let mut images = Vec::new();
    for d in points {
        images.push(split.image(d)?);
    }
    intersection_from_images(c, &split, &images)
}

fn intersection_from_images(
    c: &HyperellipticCurve,
    split: &EtaleSplit,
    images: &[SquareClassVector],
) -> Result<(u32, bool)> {
    let s_rank = selmer_rank_from_split(c, split);
    if matches!(split.place, Place::RealInfinite) || split.factor_count() == 1 {
        return Ok((0, true));
    }
    let full: Vec<Vec<bool>> = images.iter().map(|im| im.bits()).collect::<Result<_>>()?;
    let ram: Vec<Vec<bool>> = images.iter().map(|im| im.ramification_bits()).collect::<Result<_>>()?;
    let span = f2_rank(&full);
    let ram_rank = f2_rank(&ram);
    if span as u32 > s_rank {
        return Err(Error::Unresolved(format!(
            "images span rank {span}, more than dim S = {s_rank}"
        )));
    }
    Ok(((span - ram_rank) as u32, span as u32 == s_rank))
}

/// Relations among point images at one place.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlaceRelations {
    pub place: Place,
    pub image_rank: u32,
    pub relations: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub points: Vec<String>,
    pub per_place: Vec<PlaceRelations>,
    /// `n - dim` of the common relation space: a lower bound for the
    /// dimension of the span of the points in `J(Q)/2J(Q)`.
    pub image_rank: u32,
    pub two_torsion_rank: u32,
    /// `image_rank - dim J(Q)[2]`, floored at 0.
    pub mordell_weil_lower_bound: u32,
}

fn relation_string(rel: &[bool], names: &[String]) -> String {
    let terms: Vec<&str> = rel.iter().zip(names).filter(|(b, _)| **b).map(|(_, n)| n.as_str()).collect();
    format!("{} = 0", terms.join(" + "))
}

pub fn independence_rank(
    c: &HyperellipticCurve,
    points: &[DescentPoint],
    places: &[Place],
) -> Result<IndependenceReport> {
    let names: Vec<String> = points.iter().map(|d| d.to_string()).collect();
    let mut combined: Vec<Vec<bool>> = vec![vec![]; points.len()];
    let mut per_place = Vec::new();
    for v in places {
        let mut split = EtaleSplit::new(c, v, &HenselConfig::default())?;
        let mut rows = Vec::new();
        for d in points {
            rows.push(split.image(d)?.bits()?);
        }
        let rels = f2_left_kernel(&rows);
        per_place.push(PlaceRelations {
            place: v.clone(),
            image_rank: f2_rank(&rows) as u32,
            relations: rels.iter().map(|r| relation_string(r, &names)).collect(),
        });
        for (acc, r) in combined.iter_mut().zip(rows) {
            acc.extend(r);
        }
    }
    let image_rank = f2_rank(&combined) as u32;
    let two_torsion_rank = c.rational_two_torsion_rank()?;
    Ok(IndependenceReport {
        points: names,
        per_place,
        image_rank,
        two_torsion_rank,
        mordell_weil_lower_bound: image_rank.saturating_sub(two_torsion_rank),
    })
}

/// Good odd primes where f splits completely, in increasing order.
pub fn split_primes(c: &HyperellipticCurve, bound: u64, count: usize) -> Result<Vec<Int>> {
    let (big_f, _) = monic_integral(&c.f);
    let disc = discriminant(&RatPoly::from_int_coeffs(&big_f))?;
    let mut out = Vec::new();
    let mut p = 3u64;
    while p <= bound && out.len() < count {
        let pi = Int::from(p);
        if is_prime(&pi) && !(disc.numer() % &pi).is_zero() {
            let fp = FpPoly::new(&pi, &big_f);
            if factor_mod_p(&fp)?.iter().all(|(g, _)| g.degree() == 1) {
                out.push(pi);
            }
        }
        p += 2;
    }
    Ok(out)
}

/// Independence over automatically chosen split primes, stopping once the
/// points are independent or the search bound is reached.
pub fn independence_auto(c: &HyperellipticCurve, points: &[DescentPoint]) -> Result<IndependenceReport> {
    let primes = split_primes(c, 2000, 12)?;
    let mut places: Vec<Place> = Vec::new();
    let mut best = independence_rank(c, points, &places)?;
    for p in primes {
        places.push(Place::Finite(p));
        best = independence_rank(c, points, &places)?;
        if best.image_rank as usize == points.len() {
            break;
        }
    }
    Ok(best)
}

/// Per-point unramifiedness of the X - T image at the given places.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnramifiedCheck {
    pub point: String,
    pub places: Vec<(Place, Option<bool>)>,
    pub unramified: Option<bool>,
}

/// Checks the images at the real place, at 2 and at the primes dividing the
/// discriminant; at the remaining primes images of rational points are
/// unramified automatically.
pub fn unramified_images_check(c: &HyperellipticCurve, points: &[DescentPoint]) -> Result<Vec<UnramifiedCheck>> {
    let (big_f, _) = monic_integral(&c.f);
    let disc = discriminant(&RatPoly::from_int_coeffs(&big_f))?;
    let mut places = vec![Place::RealInfinite, Place::Finite(int(2))];
    for q in crate::arith::factor_rat(&disc)?.primes() {
        if q != int(2) {
            places.push(Place::Finite(q));
        }
    }
    let mut splits: Vec<EtaleSplit> =
        places.iter().map(|v| EtaleSplit::new(c, v, &HenselConfig::default())).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for d in points {
        let mut per = Vec::new();
        let mut all = Some(true);
        for (v, s) in places.iter().zip(splits.iter_mut()) {
            let u = match s.image(d) {
                Ok(im) => im.is_unramified(),
                Err(Error::Unresolved(_)) => None,
                Err(e) => return Err(e),
            };
            all = match (all, u) {
                (Some(a), Some(b)) => Some(a && b),
                (Some(false), None) => Some(false),
                _ => None,
            };
            per.push((v.clone(), u));
        }
        out.push(UnramifiedCheck { point: d.to_string(), places: per, unramified: all });
    }
    Ok(out)
}

/// Local report for the Jacobian at one place. `I` is computed from the
/// given global points together with the Q_v-rational roots of f.
pub fn hyper_local_report(c: &HyperellipticCurve, points: &[DescentPoint], v: &Place) -> Result<LocalDescentReport> {
    let mut split = EtaleSplit::new(c, v, &HenselConfig::default())?;
    let s_rank = selmer_rank_from_split(c, &split);
    let c_rank = match v {
        Place::RealInfinite => 0,
        Place::Finite(_) => split.factor_count() as u32 - 1,
    };
    let mut notes = vec![format!("components: {}", split.components.len())];
    let (i_rank, complete) = if c_rank == 0 {
        (0, true)
    } else {
        let mut pts: Vec<DescentPoint> = points.to_vec();
        for (k, comp) in split.components.iter().enumerate() {
            if comp.kind == ComponentKind::Root {
                pts.push(DescentPoint::TorsionRoot(k + 1));
            }
        }
        let mut images = Vec::new();
        for d in &pts {
            match split.image(d) {
                Ok(im) => images.push(im),
                Err(Error::Unresolved(msg)) => notes.push(format!("{d}: {msg}")),
                Err(e) => return Err(e),
            }
        }
        match intersection_from_images(c, &split, &images) {
            Ok(r) => r,
            Err(Error::Unresolved(msg)) => {
                notes.push(msg);
                (0, false)
            }
            Err(e) => return Err(e),
        }
    };
    if !complete {
        notes.push(format!("images do not span S(Q_v); dim I >= {i_rank}"));
    }
    Ok(LocalDescentReport {
        place: v.clone(),
        order_c: 1 << c_rank,
        order_s: 1 << s_rank,
        order_i: 1 << i_rank,
        kodaira: None,
        tamagawa: None,
        profile: None,
        evidence: vec![],
        notes,
    })
}

// ---------------------------------------------------------------------------
// The H^1 condition

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    Exact,
    Sampled,
}

#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TfaeReport {
    /// Whether `H^1(G_2, M) = 0` for the 2-Sylow subgroup `G_2` of the Galois group.
    pub holds: bool,
    pub certificate: CertificateKind,
    pub reason: String,
    /// Degrees of the irreducible factors of f over Q.
    pub factor_degrees: Vec<usize>,
    pub galois_group: Option<String>,
    /// Degrees of the factors of f over the fixed field of `G_2`, when known.
    pub pattern: Option<Vec<usize>>,
    /// A prime whose Frobenius power is an involution with several fixed roots.
    #[serde_as(as = "Option<(DisplayFromStr, _)>")]
    pub witness: Option<(Int, Vec<usize>)>,
    pub primes_sampled: u32,
}

const SAMPLE_PRIMES: u32 = 300;

/// Fixed points of the involution in the cyclic group generated by an
/// element of the given cycle type, if that group has even order.
fn involution_fixed_points(cycle: &[usize]) -> Option<usize> {
    let l = cycle.iter().fold(1usize, |a, &b| a.lcm(&b));
    if l % 2 == 1 {
        return None;
    }
    let half = l / 2;
    Some(cycle.iter().filter(|&&c| half % c == 0).sum())
}

fn binomial_prime(f: &RatPoly) -> Option<usize> {
    let d = f.deg();
    let c = f.coeffs();
    let is_binomial = (1..d).all(|i| c[i].is_zero()) && !c[0].is_zero();
    if is_binomial && is_prime(&Int::from(d)) {
        Some(d)
    } else {
        None
    }
}

/// Rational number `r/s` with `r = u s mod m` and `|r|, |s| <= sqrt(m/2)`.
fn rational_reconstruction(u: &Int, m: &Int) -> Option<Rat> {
    let bound = (m / int(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut t0, mut t1) = (Int::zero(), Int::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(Rat::new(r1, t1))
}

/// Searches for a rational polynomial g with `f(g(x)) = 0 mod f(x)` mapping a
/// root to a different root, so that Q[x]/f is Galois of degree deg f.
fn galois_cycle_certificate(f: &RatPoly) -> Result<Option<RatPoly>> {
    let d = f.deg();
    if d > 7 {
        return Ok(None);
    }
    let (big_f, _) = monic_integral(f);
    let c = HyperellipticCurve { f: f.clone() };
    let Some(p) = split_primes(&c, 20000, 1)?.into_iter().next() else {
        return Ok(None);
    };
    let n = 60u32;
    let cfg = HenselConfig { start: n, cap: n.max(HenselConfig::default().cap) };
    let lst = local_splitting_type_with(f, &p, &cfg, n)?;
    let m = pow_int(&p, lst.precision);
    let roots: Vec<Int> = lst.factors.iter().map(|fa| fa.root().unwrap().clone()).collect();
    // roots of the scaled polynomial F are scale * roots of f
    let big = RatPoly::from_int_coeffs(&big_f);
    // an automorphism of prime order d permutes the roots in one d-cycle
    let mut perm: Vec<usize> = (1..d).collect();
    loop {
        let mut image = vec![0usize; d];
        let mut cur = 0usize;
        for &nx in &perm {
            image[cur] = nx;
            cur = nx;
        }
        image[cur] = 0;
        if let Some(g) = interpolate_rational(&roots, &image, &m) {
            if compose_vanishes(&big, &g)? {
                return Ok(Some(g));
            }
        }
        if !next_permutation(&mut perm) {
            return Ok(None);
        }
    }
}

fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Polynomial of degree < n through `(x_i, x_{image(i)})` modulo m, with
/// rationally reconstructed coefficients.
fn interpolate_rational(xs: &[Int], image: &[usize], m: &Int) -> Option<RatPoly> {
    let n = xs.len();
    let mut acc: Vec<Int> = vec![];
    for i in 0..n {
        let mut basis = vec![Int::one()];
        let mut denom = Int::one();
        for j in 0..n {
            if j != i {
                basis = zp_mul(&basis, &[-&xs[j], Int::one()], m);
                denom = (denom * (&xs[i] - &xs[j])).mod_floor(m);
            }
        }
        let w = (modinv(&denom, m)? * &xs[image[i]]).mod_floor(m);
        let term: Vec<Int> = basis.iter().map(|b| (b * &w).mod_floor(m)).collect();
        let len = acc.len().max(term.len());
        acc.resize(len, Int::zero());
        for (a, t) in acc.iter_mut().zip(term) {
            *a = (&*a + t).mod_floor(m);
        }
    }
    let coeffs = acc.iter().map(|a| rational_reconstruction(a, m)).collect::<Option<Vec<Rat>>>()?;
    Some(RatPoly::new(coeffs))
}

fn compose_vanishes(f: &RatPoly, g: &RatPoly) -> Result<bool> {
    let mut acc = RatPoly::zero();
    for c in f.coeffs().iter().rev() {
        acc = acc.mul(g).add(&RatPoly::constant(c.clone())).rem(f)?;
    }
    Ok(acc.is_zero())
}

/// Decides the H^1 condition for the Galois module of the roots of f.
pub fn tfae_test(f: &RatPoly) -> Result<TfaeReport> {
    let c = HyperellipticCurve::new(f.monic())?;
    let f = &c.f;
    let d = f.deg();
    let fac = factor_over_z(f)?;
    let factor_degrees: Vec<usize> = fac.factors.iter().map(|(g, _)| g.deg()).collect();
    let irreducible = factor_degrees.len() == 1;
    let mut report = TfaeReport {
        holds: true,
        certificate: CertificateKind::Exact,
        reason: String::new(),
        factor_degrees: factor_degrees.clone(),
        galois_group: None,
        pattern: None,
        witness: None,
        primes_sampled: 0,
    };
    let ones = vec![1usize; d];
    let disc = discriminant(f)?;
    let square_disc = is_square_rat(&disc);

    if factor_degrees.iter().all(|&k| k == 1) {
        report.reason = "f splits over Q".into();
        report.galois_group = Some("trivial".into());
        report.pattern = Some(ones);
        return Ok(report);
    }
    if d == 3 {
        report.reason = "every involution of S3 fixes one root".into();
        if irreducible && square_disc {
            report.galois_group = Some("C3".into());
            report.pattern = Some(ones);
        } else {
            report.galois_group = Some(if irreducible { "S3" } else { "C2" }.into());
            report.pattern = Some(vec![1, 2]);
        }
        return Ok(report);
    }
    if let Some(q) = binomial_prime(f) {
        let k = 1usize << (q - 1).trailing_zeros();
        let mut pattern = vec![1usize];
        pattern.extend(std::iter::repeat(k).take((q - 1) / k));
        report.reason = format!("x^{q} + a: the 2-Sylow subgroup has one fixed root and free orbits");
        report.galois_group = Some(if irreducible { format!("F_{q} x F_{q}^*") } else { format!("C{}", q - 1) });
        report.pattern = Some(pattern);
        return Ok(report);
    }
    // Frobenius cycle types: an involution with several fixed roots refutes
    // the condition; a cycle type with unequal cycles rules out Q[x]/f Galois
    let (big_f, _) = monic_integral(f);
    let fdisc = discriminant(&RatPoly::from_int_coeffs(&big_f))?;
    let mut seen_three_cycle = false;
    let mut uniform = irreducible;
    let mut p = 3u64;
    while report.primes_sampled < SAMPLE_PRIMES {
        p += 2;
        let pi = Int::from(p);
        if !is_prime(&pi) || (fdisc.numer() % &pi).is_zero() {
            continue;
        }
        report.primes_sampled += 1;
        let mut cycle: Vec<usize> =
            factor_mod_p(&FpPoly::new(&pi, &big_f))?.iter().map(|(g, _)| g.degree() as usize).collect();
        cycle.sort_unstable_by(|a, b| b.cmp(a));
        if cycle == [3, 1, 1] {
            seen_three_cycle = true;
        }
        uniform &= cycle.iter().all(|&k| k == cycle[0]);
        if let Some(fixed) = involution_fixed_points(&cycle) {
            if fixed >= 2 {
                report.holds = false;
                report.reason = format!("Frobenius at {p} has cycle type {cycle:?}; a power of it is an involution fixing {fixed} roots");
                report.witness = Some((pi, cycle));
                return Ok(report);
            }
        }
    }
    if uniform {
        if let Some(g) = galois_cycle_certificate(f)? {
            report.reason = format!("Q[x]/f is Galois of odd degree {d} (automorphism x -> {g})");
            report.galois_group = Some(format!("C{d}"));
            report.pattern = Some(ones);
            return Ok(report);
        }
    }
    if d == 5 && irreducible && square_disc {
        report.reason = "square discriminant: G lies in A5, whose involutions fix one root".into();
        if seen_three_cycle {
            report.galois_group = Some("A5".into());
            report.pattern = Some(vec![1, 4]);
        } else {
            report.galois_group = Some("D5 or A5".into());
        }
        return Ok(report);
    }
    report.certificate = CertificateKind::Sampled;
    report.reason = format!(
        "no Frobenius among {} good primes has a power that is an involution fixing several roots",
        report.primes_sampled
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use proptest::prelude::*;

    fn quintic() -> HyperellipticCurve {
        HyperellipticCurve::parse("X^5+16X^4-274X^3+817X^2+178X+1").unwrap()
    }

    fn pt(c: &HyperellipticCurve, s: &str) -> DescentPoint {
        DescentPoint::parse(s, c).unwrap()
    }

    #[test]
    fn parsing_points() {
        let c = quintic();
        assert_eq!(pt(&c, "-2"), DescentPoint::Rational { x: rat(-2, 1), y: rat(73, 1) });
        assert_eq!(pt(&c, "(4, -37)"), DescentPoint::Rational { x: rat(4, 1), y: rat(-37, 1) });
        assert_eq!(pt(&c, "alpha:3"), DescentPoint::TorsionRoot(3));
        let s = pt(&c, "sum: -2 + -6");
        assert_eq!(s.to_string(), "(-2)+(-6)");
        assert!(DescentPoint::parse("1", &c).is_err());
        assert!(DescentPoint::parse("(4, 36)", &c).is_err());
        let pts = parse_points("# points\n-17\n0  # origin\n\n", &c).unwrap();
        assert_eq!(pts.len(), 2);
    }

    #[test]
    fn real_place_images() {
        let c = quintic();
        let inf = Place::RealInfinite;
        let im = xt_image(&c, &pt(&c, "-2"), &inf).unwrap();
        assert_eq!(im.symbols(), ["1", "-1", "-1", "-1", "-1"]);
        let im = xt_image(&c, &pt(&c, "0"), &inf).unwrap();
        assert_eq!(im.symbols(), ["1", "1", "1", "-1", "-1"]);
        assert_eq!(local_selmer_rank_hyper(&c, &inf).unwrap(), 2);
    }

    #[test]
    fn images_at_191() {
        let c = quintic();
        let v = Place::finite(191);
        let t = image_table(&c, &[pt(&c, "alpha:1"), pt(&c, "alpha:4"), pt(&c, "-2"), pt(&c, "0")], &v).unwrap();
        assert_eq!(t.columns, ["x-5", "x-6", "x-37", "x-a4", "x-a5"]);
        assert_eq!(t.rows[0].1, ["1", "-1", "-1", "-1", "-1"]);
        assert_eq!(t.rows[1].1, ["1", "1", "-1", "pi", "-pi"]);
        assert_eq!(t.rows[2].1, ["1", "-1", "-1", "1", "1"]);
        assert_eq!(t.rows[3].1, ["-1", "-1", "1", "1", "1"]);
        assert_eq!(local_selmer_rank_hyper(&c, &v).unwrap(), 4);
        let pts = [pt(&c, "alpha:1"), pt(&c, "alpha:4"), pt(&c, "-2"), pt(&c, "0")];
        assert_eq!(local_intersection_rank(&c, &pts, &v).unwrap(), (3, true));
    }

    #[test]
    fn two_and_ramified_places() {
        let c = quintic();
        assert_eq!(local_selmer_rank_hyper(&c, &Place::finite(2)).unwrap(), 2);
        assert_eq!(local_class_rank_hyper(&c, &Place::finite(2)).unwrap(), 0);
        assert_eq!(local_selmer_rank_hyper(&c, &Place::finite(941)).unwrap(), 0);
        let im = xt_image(&c, &pt(&c, "sum: 0 + 4"), &Place::finite(2)).unwrap();
        assert_eq!(im.is_unramified(), Some(true));
        assert!(im.norm().unwrap().is_identity());
    }

    #[test]
    fn unramified_sums() {
        let c = quintic();
        let sums: Vec<DescentPoint> = ["sum: -2 + -6", "sum: -2 + -9", "sum: -2 + -17", "sum: 0 + 4"]
            .iter()
            .map(|s| pt(&c, s))
            .collect();
        for chk in unramified_images_check(&c, &sums).unwrap() {
            assert_eq!(chk.unramified, Some(true), "{chk:?}");
        }
        let single = unramified_images_check(&c, &[pt(&c, "-2")]).unwrap();
        assert_eq!(single[0].unramified, Some(false));
    }

    #[test]
    fn independence_over_37_73() {
        let c = quintic();
        let pts: Vec<DescentPoint> = ["-17", "-9", "-6", "0", "-2", "4"].iter().map(|s| pt(&c, s)).collect();
        let r = independence_rank(&c, &pts, &[Place::finite(37), Place::finite(73)]).unwrap();
        assert_eq!(r.image_rank, 6);
        assert_eq!(r.mordell_weil_lower_bound, 6);
        let dup = [pts[0].clone(), pts[0].clone()];
        assert_eq!(independence_rank(&c, &dup, &[Place::finite(37)]).unwrap().image_rank, 1);
    }

    #[test]
    fn tfae_examples() {
        let q = tfae_test(&quintic().f).unwrap();
        assert!(q.holds);
        assert_eq!(q.certificate, CertificateKind::Exact);
        assert_eq!(q.pattern, Some(vec![1; 5]));
        let b = tfae_test(&RatPoly::parse("X^5+3").unwrap()).unwrap();
        assert_eq!((b.holds, b.certificate, b.pattern.clone()), (true, CertificateKind::Exact, Some(vec![1, 4])));
        let s5 = tfae_test(&RatPoly::parse("X^5-X-1").unwrap()).unwrap();
        assert!(!s5.holds);
        assert_eq!(s5.certificate, CertificateKind::Exact);
        let split_pair = tfae_test(&RatPoly::parse("X^5-X").unwrap()).unwrap();
        // roots 0, 1, -1, i, -i: complex conjugation fixes three roots
        assert!(!split_pair.holds);
    }

    #[test]
    fn f2_kernel() {
        let rows = vec![vec![true, false], vec![false, true], vec![true, true]];
        assert_eq!(f2_rank(&rows), 2);
        let k = f2_left_kernel(&rows);
        assert_eq!(k, vec![vec![true, true, true]]);
    }

    #[test]
    fn norm_determinant() {
        // N(a + bX) in Z[X]/(X^2 + 1) is a^2 + b^2
        let n = norm_mod(&[int(3), int(2)], &[int(1), int(0), int(1)], &int(1000));
        assert_eq!(n, int(13));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn images_lie_in_kernel_of_norm(a in -30i64..30, b in -30i64..30, k in -5i64..5, x in -50i64..50) {
            let f = RatPoly::from_ints(&[k * k, 0, 0, 0, 0, 1]).add(&RatPoly::from_ints(&[0, b, a]));
            let Ok(c) = HyperellipticCurve::new(f) else { return Ok(()) };
            let y2 = c.f.eval(&rat(x, 1));
            prop_assume!(!y2.is_zero());
            // the class of f(x) in Q_p is the norm; equal to the image norm for any x
            for p in [3i64, 5, 7, 11] {
                let v = Place::finite(p);
                let mut split = match EtaleSplit::new(&c, &v, &HenselConfig::default()) { Ok(s) => s, Err(_) => continue };
                let im = match split.image(&DescentPoint::Rational { x: rat(x, 1), y: rat(1, 1) }) { Ok(i) => i, Err(_) => continue };
                if let Ok(n) = im.norm() {
                    prop_assert_eq!(n, SquareClass::of(&y2, &v).unwrap());
                }
            }
        }
    }
}
