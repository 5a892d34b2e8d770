//! Local descent groups at a place: orders of the unramified-cohomology
//! group C, the Kummer image S, and their intersection I.

use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_with::{serde_as, DisplayFromStr};

use crate::arith::{int, is_prime, pow_int, rat_from_int, val_int, valuation, vfin, Int, Place, Rat, SquareClass, Valuation};
use crate::elliptic::{IsogenyKind, IsogenyMap, WeierstrassModel};
use crate::error::{Error, Result};
use crate::poly::{
    discriminant, factor_mod_p, local_splitting_type_with, FpPoly, HenselConfig, LocalFactorKind, RatPoly,
};
use crate::tate::{component_group_over, tate_algorithm, ComponentGroup, FrobeniusAction, KodairaType, ReductionData};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalConfig {
    pub hensel: HenselConfig,
}

/// Field of definition of a kernel point over Q_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldTag {
    Rational,
    Unramified { f: u32 },
    Ramified { e: u32, f: u32 },
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTag::Rational => write!(f, "Q_p"),
            FieldTag::Unramified { f: d } => write!(f, "unramified degree {d}"),
            FieldTag::Ramified { e, f: d } => write!(f, "ramified e={e} f={d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelPoint {
    pub label: String,
    pub field: FieldTag,
    pub over_m: bool,
}

#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionFieldProfile {
    #[serde_as(as = "DisplayFromStr")]
    pub p: Int,
    /// Nontrivial kernel points.
    pub kernel_points: Vec<KernelPoint>,
    /// `#E[phi]` over an algebraic closure.
    pub kernel_order: u32,
    /// `#E(Q_p)[phi]`.
    pub rational_order: u32,
    /// Exponent of the kernel group; `M` has degree `deg_lprime * m`.
    pub m: u32,
    /// Exponent of `E(Q_p)[phi]`.
    pub rational_exponent: u32,
    /// `(e, f)` of the local factors cutting out the kernel.
    pub local_factors: Vec<(u32, u32)>,
    pub deg_lprime: u32,
    pub deg_m: u32,
    /// Frobenius on kernel points defined over `M`; `None` for the others.
    pub tau_permutation: Vec<Option<usize>>,
}

impl TorsionFieldProfile {
    pub fn m_rational_order(&self) -> u32 {
        1 + self.kernel_points.iter().filter(|k| k.over_m).count() as u32
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointEvidence {
    pub point: String,
    pub over_m: bool,
    pub singular: Option<bool>,
    /// Image in `E(M)/E_0(M)` when known.
    pub component_image: Option<String>,
    /// Verdict of the case analysis: is the point in `(tau - 1) E(M)`?
    pub in_image: Option<bool>,
    pub rule: String,
    /// Verdict from the explicit component group over `M`.
    pub explicit: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalDescentReport {
    pub place: Place,
    #[serde(rename = "C")]
    pub order_c: u64,
    #[serde(rename = "S")]
    pub order_s: u64,
    #[serde(rename = "I")]
    pub order_i: u64,
    pub kodaira: Option<KodairaType>,
    pub tamagawa: Option<u32>,
    pub profile: Option<TorsionFieldProfile>,
    pub evidence: Vec<PointEvidence>,
    pub notes: Vec<String>,
}

/// The isogenies handled locally.
#[derive(Debug, Clone, PartialEq, Eq)]
enum MapShape {
    TwoMap,
    TwoIsogeny(Rat),
    ThreeIsogeny(Rat),
}

fn shape(phi: &IsogenyMap) -> Result<MapShape> {
    match &phi.kind {
        IsogenyKind::Multiplication(2) => Ok(MapShape::TwoMap),
        IsogenyKind::Velu(t) if phi.degree == 2 && t.len() == 1 => Ok(MapShape::TwoIsogeny(t[0].x.clone())),
        IsogenyKind::Velu(t) if phi.degree == 3 && t.len() == 1 => Ok(MapShape::ThreeIsogeny(t[0].x.clone())),
        _ => Err(Error::OutOfScope(format!("local descent for {phi} is not implemented"))),
    }
}

/// How much is known about the x-coordinate of a kernel point.
#[derive(Debug, Clone)]
enum XData {
    Exact(Rat),
    /// `x = X / scale` with `X` known modulo `p^prec`.
    Approx { big_x: Int, scale: Int, prec: u32 },
    /// `x = (center + p^h u) / scale` with `u` a unit whose residue is not in F_p.
    Residue { center: Int, h: i64, scale: Int },
    /// The residue of `x` lies outside F_p.
    NotFp,
    Ramified,
}

#[derive(Debug, Clone)]
struct KPoint {
    public: KernelPoint,
    x: XData,
    /// Index of the conjugate reached by Frobenius.
    tau: Option<usize>,
    /// For 3-torsion: `Q_p(y)` class.
    three: Option<SquareClass>,
}

struct Analysis {
    rd: ReductionData,
    points: Vec<KPoint>,
    profile: TorsionFieldProfile,
    torsion_order: u32,
}

fn x_to_minimal(rd: &ReductionData, x: &Rat) -> Rat {
    let w = &rd.transform;
    (x - &w.r) / (&w.u * &w.u)
}

fn lcm_all(v: impl Iterator<Item = u32>) -> u32 {
    v.fold(1, |a, b| a.lcm(&b))
}

fn is_unramified_nonsquare(c: &SquareClass) -> bool {
    !c.is_identity() && !c.odd_valuation && c.is_unramified()
}

fn analyze(m: &WeierstrassModel, phi: &IsogenyMap, p: &Int, cfg: &LocalConfig) -> Result<Analysis> {
    if !is_prime(p) {
        return Err(Error::Input(format!("{p} is not prime")));
    }
    if &phi.domain != m {
        return Err(Error::Input("isogeny domain differs from the curve".into()));
    }
    let sh = shape(phi)?;
    let rd = tate_algorithm(m, p)?;
    let mm = &rd.minimal_model;
    let place = Place::Finite(p.clone());
    let mut points: Vec<KPoint> = Vec::new();
    let (kernel_order, m_exp, local_factors, deg_lprime);
    match &sh {
        MapShape::TwoMap => {
            let g = mm.two_division_cubic();
            let lst = local_splitting_type_with(&g, p, &cfg.hensel, cfg.hensel.start)?;
            let root_x: Vec<Rat> = lst.factors.iter().filter_map(|fa| fa.root()).map(|r| Rat::new(r.clone(), lst.scale.clone())).collect();
            let label_k = (1..=lst.precision.max(1))
                .find(|&k| {
                    let pk = crate::arith::pow_int(p, k);
                    let res: Vec<_> = root_x.iter().map(|x| crate::arith::rat_mod(x, &pk)).collect();
                    (0..res.len()).all(|i| (i + 1..res.len()).all(|j| res[i].is_none() || res[i] != res[j]))
                })
                .unwrap_or(1);
            for (fi, fa) in lst.factors.iter().enumerate() {
                let base = points.len();
                let over_m = fa.e == 1;
                for j in 0..(fa.e * fa.f) as usize {
                    let (field, x) = match &fa.kind {
                        LocalFactorKind::Root { root, .. } => (
                            FieldTag::Rational,
                            XData::Approx { big_x: root.clone(), scale: lst.scale.clone(), prec: lst.precision },
                        ),
                        LocalFactorKind::Unramified { .. } => (FieldTag::Unramified { f: fa.f }, XData::NotFp),
                        LocalFactorKind::Block { center, num, den, .. } if fa.e == 1 => (
                            FieldTag::Unramified { f: fa.f },
                            XData::Residue { center: center.clone(), h: num / den, scale: lst.scale.clone() },
                        ),
                        LocalFactorKind::Block { .. } => (FieldTag::Ramified { e: fa.e, f: fa.f }, XData::Ramified),
                    };
                    let label = match &fa.kind {
                        LocalFactorKind::Root { root, exact: true } => {
                            format!("T(x = {})", Rat::new(root.clone(), lst.scale.clone()))
                        }
                        LocalFactorKind::Root { root, .. } => {
                            let x = Rat::new(root.clone(), lst.scale.clone());
                            let pk = crate::arith::pow_int(p, label_k);
                            match crate::arith::rat_mod(&x, &pk) {
                                Some(r) if label_k == 1 => format!("T(x = {r} mod {p})"),
                                Some(r) => format!("T(x = {r} mod {p}^{label_k})"),
                                None => format!("T(v(x) = {})", vfin(&x, p)),
                            }
                        }
                        _ => format!("T(factor {} conj {j}, {field})", fi + 1),
                    };
                    let tau = if over_m { Some(base + (j + 1) % fa.f as usize) } else { None };
                    points.push(KPoint { public: KernelPoint { label, field, over_m }, x, tau, three: None });
                }
            }
            kernel_order = 4;
            m_exp = 2;
            local_factors = lst.pattern();
            deg_lprime = if lst.factors.iter().all(|fa| fa.e == 1) {
                lcm_all(lst.factors.iter().map(|fa| fa.f))
            } else if lst.factors.iter().any(|fa| fa.e == 3) {
                let d = SquareClass::of(&discriminant(&g)?, &place)?;
                if is_unramified_nonsquare(&d) {
                    2
                } else {
                    1
                }
            } else {
                1
            };
        }
        MapShape::TwoIsogeny(x) => {
            let xm = x_to_minimal(&rd, x);
            let label = format!("T(x={x})");
            points.push(KPoint {
                public: KernelPoint { label, field: FieldTag::Rational, over_m: true },
                x: XData::Exact(xm),
                tau: Some(0),
                three: None,
            });
            kernel_order = 2;
            m_exp = 2;
            local_factors = vec![(1, 1)];
            deg_lprime = 1;
        }
        MapShape::ThreeIsogeny(x) => {
            let xm = x_to_minimal(&rd, x);
            let dq = mm.eta_squared(&xm);
            let cls = SquareClass::of(&dq, &place)?;
            let (field, over_m, dl, pattern) = if cls.is_identity() {
                (FieldTag::Rational, true, 1, vec![(1, 1), (1, 1)])
            } else if cls.is_unramified() && !cls.odd_valuation {
                (FieldTag::Unramified { f: 2 }, true, 2, vec![(1, 2)])
            } else {
                (FieldTag::Ramified { e: 2, f: 1 }, false, 1, vec![(2, 1)])
            };
            for (j, sign) in ["+", "-"].iter().enumerate() {
                let tau = if !over_m {
                    None
                } else if dl == 2 {
                    Some(1 - j)
                } else {
                    Some(j)
                };
                points.push(KPoint {
                    public: KernelPoint { label: format!("{sign}P(x={x})"), field, over_m },
                    x: XData::Exact(xm.clone()),
                    tau,
                    three: Some(cls.clone()),
                });
            }
            kernel_order = 3;
            m_exp = 3;
            local_factors = pattern;
            deg_lprime = dl;
        }
    }
    let rational = 1 + points.iter().filter(|k| k.public.field == FieldTag::Rational).count() as u32;
    let rational_exponent = if rational == 1 { 1 } else { m_exp };
    let profile = TorsionFieldProfile {
        p: p.clone(),
        kernel_points: points.iter().map(|k| k.public.clone()).collect(),
        kernel_order,
        rational_order: rational,
        m: m_exp,
        rational_exponent,
        local_factors,
        deg_lprime,
        deg_m: deg_lprime * m_exp,
        tau_permutation: points.iter().map(|k| k.tau).collect(),
    };
    Ok(Analysis { rd, points, profile, torsion_order: m_exp })
}

/// Field data for the kernel of `phi` at `p`.
pub fn torsion_field_profile(m: &WeierstrassModel, phi: &IsogenyMap, p: &Int) -> Result<TorsionFieldProfile> {
    Ok(analyze(m, phi, p, &LocalConfig::default())?.profile)
}

/// `#C^phi(Q_v)`: `#E(Q_p)[phi]` at a finite place, 1 at the real place.
pub fn c2_order(m: &WeierstrassModel, phi: &IsogenyMap, v: &Place) -> Result<u64> {
    match v {
        Place::RealInfinite => Ok(1),
        Place::Finite(p) => Ok(torsion_field_profile(m, phi, p)?.rational_order as u64),
    }
}

/// `#E(Q_p)/2E(Q_p) = 2^[p=2] #E(Q_p)[2]`.
pub fn s2_order_two_map(m: &WeierstrassModel, p: &Int) -> Result<u64> {
    let two = IsogenyMap::multiplication(m, 2)?;
    let c = torsion_field_profile(m, &two, p)?.rational_order as u64;
    Ok(if p == &int(2) { 2 * c } else { c })
}

/// `#E'(Q_p)/phi E(Q_p) = |phi'(0)|^-1 #E(Q_p)[phi] c_p(E') / c_p(E)`, with
/// `phi'(0)` read on minimal models.
pub fn s2_order_isogeny(phi: &IsogenyMap, p: &Int) -> Result<u64> {
    if let IsogenyKind::Multiplication(n) = phi.kind {
        if n == 2 {
            return s2_order_two_map(&phi.domain, p);
        }
        return Err(Error::OutOfScope(format!("the Kummer image of [{n}] is not implemented")));
    }
    let rd = tate_algorithm(&phi.domain, p)?;
    let rd2 = tate_algorithm(&phi.codomain, p)?;
    let c1 = phi.formal_leading_coefficient()? * &rd2.transform.u / &rd.transform.u;
    let kernel = torsion_field_profile(&phi.domain, phi, p)?.rational_order;
    let v = vfin(&c1, p);
    let val = crate::arith::pow_rat(p, v) * Rat::from_integer(int(kernel as i64)) * Rat::new(int(rd2.tamagawa as i64), int(rd.tamagawa as i64));
    if !val.is_integer() || val.is_zero() {
        return Err(Error::Unresolved(format!("isogeny Kummer image order came out as {val}")));
    }
    Ok(val.to_integer().to_u64().unwrap())
}

/// `#E'(R)/phi E(R)`.
pub fn s2_real(m: &WeierstrassModel, phi: &IsogenyMap) -> Result<u64> {
    let positive = m.disc.is_positive();
    match shape(phi)? {
        MapShape::TwoMap => Ok(if positive { 2 } else { 1 }),
        MapShape::ThreeIsogeny(_) => Ok(1),
        MapShape::TwoIsogeny(e) => {
            if !positive {
                return Ok(2);
            }
            // cofactor q(x) = g(x)/(x - e); e is the least root iff q(e) > 0 and e is left of its vertex
            let g = m.two_division_cubic();
            let q = g.div_exact(&RatPoly::linear(&e))?;
            let vertex = -q.coeff(1) / (Rat::from_integer(int(2)) * q.coeff(2));
            Ok(if q.eval(&e).is_positive() && e < vertex { 2 } else { 1 })
        }
    }
}

/// The singular point of the reduction of a minimal model, as residues.
pub fn singular_point(mm: &WeierstrassModel, p: &Int) -> Result<Option<(Int, Int)>> {
    let red = |q: &Rat| crate::arith::rat_mod(q, p).ok_or_else(|| Error::Input(format!("model not integral at {p}")));
    let a: Vec<Int> = mm.a_invariants().iter().map(red).collect::<Result<_>>()?;
    if valuation(&mm.disc, p) == Valuation::Finite(0) {
        return Ok(None);
    }
    let md = |x: Int| x.mod_floor(p);
    let is_sing = |x: &Int, y: &Int| {
        let f = md(y * y + &a[0] * x * y + &a[2] * y - x * x * x - &a[1] * x * x - &a[3] * x - &a[4]);
        let fx = md(&a[0] * y - int(3) * x * x - int(2) * &a[1] * x - &a[3]);
        let fy = md(int(2) * y + &a[0] * x + &a[2]);
        f.is_zero() && fx.is_zero() && fy.is_zero()
    };
    if p <= &int(3) {
        let pu = p.to_i64().unwrap();
        for x in 0..pu {
            for y in 0..pu {
                if is_sing(&int(x), &int(y)) {
                    return Ok(Some((int(x), int(y))));
                }
            }
        }
        return Err(Error::Unresolved(format!("no singular point found mod {p}")));
    }
    let g = FpPoly::reduce(&mm.two_division_cubic(), p)?;
    let half = crate::arith::modinv(&int(2), p).unwrap();
    for (h, mult) in factor_mod_p(&g)? {
        if mult >= 2 && h.degree() == 1 {
            let x0 = h.linear_root().unwrap();
            let y0 = md(-(&a[0] * &x0 + &a[2]) * &half);
            return Ok(Some((x0, y0)));
        }
    }
    Err(Error::Unresolved(format!("no repeated root of the 2-division cubic mod {p}")))
}

fn vmin(a: Valuation, b: Valuation) -> Valuation {
    a.min(b)
}

fn vsub(a: Valuation, k: i64) -> Valuation {
    match a {
        Valuation::Finite(v) => Valuation::Finite(v - k),
        Valuation::Infinite => Valuation::Infinite,
    }
}

fn vadd(a: Valuation, k: i64) -> Valuation {
    vsub(a, -k)
}

/// Singularity of the reduction of a 2-torsion point `(x, -(a1 x + a3)/2)`.
fn singular_two_torsion(mm: &WeierstrassModel, p: &Int, sp: &(Int, Int), x: &XData) -> Result<Option<bool>> {
    let (x0, y0) = (rat_from_int(&sp.0), rat_from_int(&sp.1));
    let two = int(2);
    let v2 = if p == &two { 1 } else { 0 };
    let a1 = &mm.a1;
    let c3 = &mm.a3 + Rat::from_integer(two.clone()) * &y0;
    let va1 = valuation(a1, p);
    let (vx, vy, vxx) = match x {
        XData::Ramified => return Ok(None),
        XData::NotFp => return Ok(Some(false)),
        XData::Exact(a) => {
            let vx = valuation(&(a - &x0), p);
            let vy = vsub(valuation(&(a1 * a + &c3), p), v2);
            (vx, vy, valuation(a, p))
        }
        XData::Approx { big_x, scale, prec } => {
            let pk = pow_int(p, *prec);
            let vd = vfin(&rat_from_int(scale), p);
            let c = (big_x - scale * &sp.0).mod_floor(&pk);
            let vx = vsub(vmin(val_int(&c, p), Valuation::Finite(*prec as i64)), vd);
            let num = Rat::from_integer(big_x.clone()) * a1 + rat_from_int(scale) * &c3;
            let vy = vsub(vmin(valuation(&num, p), vadd(va1, *prec as i64)), vd + v2);
            let vxx = vsub(vmin(val_int(&big_x.mod_floor(&pk), p), Valuation::Finite(*prec as i64)), vd);
            (vx, vy, vxx)
        }
        XData::Residue { center, h, scale } => {
            let vd = vfin(&rat_from_int(scale), p);
            let vx = vsub(vmin(val_int(&(center - scale * &sp.0), p), Valuation::Finite(*h)), vd);
            let num = rat_from_int(center) * a1 + rat_from_int(scale) * &c3;
            let vy = vsub(vmin(valuation(&num, p), vadd(va1, *h)), vd + v2);
            let vxx = vsub(vmin(val_int(center, p), Valuation::Finite(*h)), vd);
            (vx, vy, vxx)
        }
    };
    if vxx < Valuation::Finite(0) {
        return Ok(Some(false));
    }
    Ok(Some(vx > Valuation::Finite(0) && vy > Valuation::Finite(0)))
}

/// Singularity of the reduction of a 3-torsion point with rational `x`.
/// For odd `p` this reads `v(A) > 0` and `v(eta(x)) > 0` with
/// `A = (6x^2 + b2 x + b4)/2`; at `p = 2` an integral `x` above the singular
/// abscissa forces `y` onto the singular point, since `eta(x) = (2y + a1 x + a3)^2`.
fn singular_three_torsion(mm: &WeierstrassModel, p: &Int, rd: &ReductionData, x: &Rat, sp: &(Int, Int)) -> Result<bool> {
    if valuation(x, p) < Valuation::Finite(0) {
        return Ok(false);
    }
    if rd.geometric_group.order() % 3 != 0 {
        return Ok(false);
    }
    if p == &int(2) {
        return Ok(valuation(&(x - rat_from_int(&sp.0)), p) > Valuation::Finite(0));
    }
    let two = Rat::from_integer(int(2));
    let a = (Rat::from_integer(int(6)) * x * x + &mm.b2 * x + &mm.b4) / &two;
    let dq = mm.eta_squared(x);
    Ok(valuation(&a, p) > Valuation::Finite(0) && valuation(&dq, p) > Valuation::Finite(0))
}

/// The two verdicts for a singular point: the case analysis and the explicit
/// component-group computation.
fn adjudicate(
    rd: &ReductionData,
    profile: &TorsionFieldProfile,
    order: u32,
    fixed_mod_e0: bool,
) -> (bool, String, Option<bool>, Option<String>) {
    let over_m = component_group_over(rd, profile.deg_m);
    let negation = over_m.action == FrobeniusAction::Negation;
    let dl_even = profile.deg_lprime % 2 == 0;
    let dm_even = profile.deg_m % 2 == 0;
    let g = rd.geometric_group;
    let image: Option<u32> = match g {
        ComponentGroup::Cyclic(n) if n % order == 0 => Some(n / order),
        ComponentGroup::Klein4 => None,
        _ => Some(0),
    };
    let (verdict, rule) = match rd.kodaira {
        KodairaType::I(n) if n % 2 == 1 => (
            negation && dl_even,
            format!("I{n}, n odd: tau = -1 on E(M)/E0(M): {}, 2 | [L':Q_p]: {}", yn(negation), yn(dl_even)),
        ),
        KodairaType::I(n) => {
            let even = image.map(|i| i % 2 == 0).unwrap_or(false);
            (
                negation && even,
                format!("I{n}, n even: tau = -1: {}, image {} even: {}", yn(negation), image.unwrap_or(0), yn(even)),
            )
        }
        KodairaType::IV | KodairaType::IVStar => (
            negation && dl_even,
            format!("{}: tau = -1: {}, 2 | [L':Q_p]: {}", rd.kodaira, yn(negation), yn(dl_even)),
        ),
        KodairaType::IStar(n) if n % 2 == 1 => {
            let two = image == Some(2);
            (
                negation && two && dm_even,
                format!("I{n}*, n odd: tau = -1: {}, image 2: {}, 2 | [M:Q_p]: {}", yn(negation), yn(two), yn(dm_even)),
            )
        }
        KodairaType::I0Star | KodairaType::IStar(_) => {
            let ord = over_m.action.order();
            (
                (ord == 2 && fixed_mod_e0) || ord == 3,
                format!("{}: tau has order {ord} on E(M)/E0(M), fixes the point mod E0: {}", rd.kodaira, yn(fixed_mod_e0)),
            )
        }
        k => (false, format!("{k}: tau acts trivially on E(M)/E0(M)")),
    };
    // explicit: is the image in (tau - 1) of the group over M?
    let elems = &over_m.elements;
    let tau_minus_one: Vec<u32> = elems
        .iter()
        .map(|&x| {
            let tx = over_m.action.apply(g, x);
            match g {
                ComponentGroup::Cyclic(n) => (tx + n - x) % n,
                _ => tx ^ x,
            }
        })
        .collect();
    let (explicit, shown) = match (g, image) {
        (ComponentGroup::Klein4, _) => {
            let im: Vec<u32> = if fixed_mod_e0 {
                elems.iter().copied().filter(|&x| x != 0 && over_m.action.apply(g, x) == x).collect()
            } else {
                elems.iter().copied().filter(|&x| x != 0 && over_m.action.apply(g, x) != x).collect()
            };
            if im.is_empty() {
                (None, Some("no compatible element of E(M)/E0(M)".to_string()))
            } else {
                let all = im.iter().all(|x| tau_minus_one.contains(x));
                let any = im.iter().any(|x| tau_minus_one.contains(x));
                (if all == any { Some(all) } else { None }, Some(format!("one of {im:?} in Z/2+Z/2")))
            }
        }
        (ComponentGroup::Cyclic(n), Some(i)) if i != 0 => {
            if elems.contains(&i) {
                (Some(tau_minus_one.contains(&i)), Some(format!("{i} in Z/{n}")))
            } else {
                (None, Some(format!("{i} in Z/{n} is not defined over M")))
            }
        }
        _ => (None, Some("0: no element of the right order".to_string())),
    };
    (verdict, rule, explicit, shown)
}

/// `#I^phi(Q_p)` with per-point evidence.
pub fn i2_order(m: &WeierstrassModel, phi: &IsogenyMap, p: &Int) -> Result<(u64, Vec<PointEvidence>)> {
    i2_order_with(m, phi, p, &LocalConfig::default())
}

pub fn i2_order_with(
    m: &WeierstrassModel,
    phi: &IsogenyMap,
    p: &Int,
    cfg: &LocalConfig,
) -> Result<(u64, Vec<PointEvidence>)> {
    let an = analyze(m, phi, p, cfg)?;
    Ok(i2_from_analysis(&an)?)
}

fn i2_from_analysis(an: &Analysis) -> Result<(u64, Vec<PointEvidence>)> {
    let prof = &an.profile;
    let rd = &an.rd;
    let mm = &rd.minimal_model;
    let p = &prof.p;
    if prof.rational_order == 1 {
        let ev = an
            .points
            .iter()
            .map(|k| PointEvidence {
                point: k.public.label.clone(),
                over_m: k.public.over_m,
                singular: None,
                component_image: None,
                in_image: None,
                rule: "no Q_p-rational kernel point, so C and I are trivial".into(),
                explicit: None,
            })
            .collect();
        return Ok((1, ev));
    }
    let sp = singular_point(mm, p)?;
    let mut sing: Vec<Option<bool>> = Vec::with_capacity(an.points.len());
    for k in &an.points {
        let s = match (&sp, &k.three) {
            (None, _) => Some(false),
            (_, _) if !k.public.over_m => None,
            (Some(s), Some(_)) => match &k.x {
                XData::Exact(x) => Some(singular_three_torsion(mm, p, rd, x, s)?),
                _ => None,
            },
            (Some(s), None) => singular_two_torsion(mm, p, s, &k.x)?,
        };
        sing.push(s);
    }
    let mut evidence = Vec::new();
    let mut numerator = 1u64;
    for (i, k) in an.points.iter().enumerate() {
        if !k.public.over_m {
            evidence.push(PointEvidence {
                point: k.public.label.clone(),
                over_m: false,
                singular: None,
                component_image: None,
                in_image: None,
                rule: "not defined over M".into(),
                explicit: None,
            });
            continue;
        }
        let s = sing[i].ok_or_else(|| Error::Unresolved(format!("singularity of {} undetermined", k.public.label)))?;
        if !s {
            numerator += 1;
            evidence.push(PointEvidence {
                point: k.public.label.clone(),
                over_m: true,
                singular: Some(false),
                component_image: Some("0".into()),
                in_image: Some(true),
                rule: "non-singular reduction, so in E0(M) and in (tau - 1)E(M)".into(),
                explicit: Some(true),
            });
            continue;
        }
        // tau T + T: O when fixed; for 2-torsion the third point otherwise
        let fixed = match k.tau {
            Some(t) if t == i => true,
            Some(t) if an.torsion_order == 2 => {
                let third = (0..an.points.len()).find(|&j| j != i && j != t);
                match third {
                    Some(j) => sing[j] == Some(false),
                    None => false,
                }
            }
            _ => false,
        };
        let (verdict, rule, explicit, shown) = adjudicate(rd, prof, an.torsion_order, fixed);
        if verdict {
            numerator += 1;
        }
        evidence.push(PointEvidence {
            point: k.public.label.clone(),
            over_m: true,
            singular: Some(true),
            component_image: shown,
            in_image: Some(verdict),
            rule,
            explicit,
        });
    }
    let m_order = prof.m_rational_order() as u64;
    let denominator = m_order / prof.rational_order as u64;
    if numerator % denominator != 0 {
        return Err(Error::Unresolved(format!(
            "intersection count {numerator} is not divisible by #(tau-1)E(M)[phi] = {denominator}"
        )));
    }
    Ok((numerator / denominator, evidence))
}

/// Outcome of the half-point computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum HalvingOutcome {
    Order(u64, Vec<String>),
    Inapplicable(String),
}

/// Independent count of `I^2(Q_p)` for odd `p` with all 2-torsion rational:
/// `T = (e1, .)` lies in the unramified part iff every coordinate of
/// `((e1 - e2)(e1 - e3), e1 - e2, e1 - e3)` has even valuation.
pub fn i2_oracle_halving(m: &WeierstrassModel, p: &Int) -> Result<HalvingOutcome> {
    if p == &int(2) {
        return Ok(HalvingOutcome::Inapplicable("p = 2".into()));
    }
    let g = m.two_division_cubic();
    let cfg = HenselConfig::default();
    let lst = local_splitting_type_with(&g, p, &cfg, cfg.start)?;
    if !lst.splits_completely {
        return Ok(HalvingOutcome::Inapplicable("2-torsion is not all rational".into()));
    }
    let roots: Vec<&Int> = lst.factors.iter().map(|f| f.root().unwrap()).collect();
    let pk = pow_int(p, lst.precision);
    let place = Place::Finite(p.clone());
    let class = |a: &Int, b: &Int| -> Result<(SquareClass, i64)> {
        let d = (a - b).mod_floor(&pk);
        let v = val_int(&d, p).finite().ok_or_else(|| Error::Unresolved("roots agree to working precision".into()))?;
        if v + 1 >= lst.precision as i64 {
            return Err(Error::Unresolved("root difference below working precision".into()));
        }
        let q = Rat::new(d, lst.scale.clone());
        Ok((SquareClass::of(&q, &place)?, v))
    };
    let mut count = 1u64;
    let mut notes = Vec::new();
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let (c12, _) = class(roots[i], roots[j])?;
        let (c13, _) = class(roots[i], roots[k])?;
        if c12.is_identity() && c13.is_identity() {
            return Ok(HalvingOutcome::Inapplicable(format!(
                "2-torsion point {i} is divisible by 2 over Q_p"
            )));
        }
        let prod = c12.mul(&c13)?;
        let unram = !c12.odd_valuation && !c13.odd_valuation && !prod.odd_valuation;
        notes.push(format!("T{i}: e-differences {c12}, {c13}: {}", if unram { "unramified" } else { "ramified" }));
        if unram {
            count += 1;
        }
    }
    Ok(HalvingOutcome::Order(count, notes))
}

fn yn(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Full local report at a place.
pub fn local_report(m: &WeierstrassModel, phi: &IsogenyMap, place: &Place) -> Result<LocalDescentReport> {
    local_report_with(m, phi, place, &LocalConfig::default())
}

pub fn local_report_with(
    m: &WeierstrassModel,
    phi: &IsogenyMap,
    place: &Place,
    cfg: &LocalConfig,
) -> Result<LocalDescentReport> {
    let p = match place {
        Place::RealInfinite => {
            return Ok(LocalDescentReport {
                place: place.clone(),
                order_c: 1,
                order_s: s2_real(m, phi)?,
                order_i: 1,
                kodaira: None,
                tamagawa: None,
                profile: None,
                evidence: vec![],
                notes: vec!["no nontrivial unramified extensions of R".into()],
            })
        }
        Place::Finite(p) => p,
    };
    let an = analyze(m, phi, p, cfg)?;
    let (order_i, evidence) = i2_from_analysis(&an)?;
    let order_c = an.profile.rational_order as u64;
    let order_s = match shape(phi)? {
        MapShape::TwoMap => {
            if p == &int(2) {
                2 * order_c
            } else {
                order_c
            }
        }
        _ => s2_order_isogeny(phi, p)?,
    };
    let mut notes = vec![
        format!("[L':Q_p] = {}, m = {}, [M:Q_p] = {}", an.profile.deg_lprime, an.profile.m, an.profile.deg_m),
        "kernel point coordinates refer to the local minimal model".into(),
    ];
    if order_c % order_i != 0 || order_s % order_i != 0 {
        notes.push(format!("warning: I = {order_i} does not divide C = {order_c} and S = {order_s}"));
    }
    Ok(LocalDescentReport {
        place: place.clone(),
        order_c,
        order_s,
        order_i,
        kodaira: Some(an.rd.kodaira),
        tamagawa: Some(an.rd.tamagawa),
        profile: Some(an.profile),
        evidence,
        notes,
    })
}
