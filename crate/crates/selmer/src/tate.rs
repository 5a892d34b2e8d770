//! Tate's algorithm: minimal model, Kodaira type, conductor exponent and the
//! component group with its Frobenius action.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_with::{serde_as, DisplayFromStr};

use crate::arith::{factor_rat, int, is_prime, legendre, modinv, pow_rat, rat_from_int, rat_mod, valuation, Int, Rat, Valuation};
use crate::elliptic::{Transform, WeierstrassModel};
use crate::error::{input, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KodairaType {
    I0,
    I(u32),
    II,
    III,
    IV,
    I0Star,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl KodairaType {
    /// Number of irreducible components of the special fibre.
    pub fn components(&self) -> u32 {
        match self {
            KodairaType::I0 => 1,
            KodairaType::I(n) => *n,
            KodairaType::II => 1,
            KodairaType::III => 2,
            KodairaType::IV => 3,
            KodairaType::I0Star => 5,
            KodairaType::IStar(n) => n + 5,
            KodairaType::IVStar => 7,
            KodairaType::IIIStar => 8,
            KodairaType::IIStar => 9,
        }
    }

    pub fn is_multiplicative(&self) -> bool {
        matches!(self, KodairaType::I(_))
    }

    pub fn parse(s: &str) -> Option<KodairaType> {
        Some(match s {
            "I0" => KodairaType::I0,
            "II" => KodairaType::II,
            "III" => KodairaType::III,
            "IV" => KodairaType::IV,
            "I0*" => KodairaType::I0Star,
            "IV*" => KodairaType::IVStar,
            "III*" => KodairaType::IIIStar,
            "II*" => KodairaType::IIStar,
            _ => {
                let body = s.strip_prefix('I')?;
                if let Some(n) = body.strip_suffix('*') {
                    KodairaType::IStar(n.parse().ok().filter(|&n| n > 0)?)
                } else {
                    KodairaType::I(body.parse().ok().filter(|&n| n > 0)?)
                }
            }
        })
    }
}

impl fmt::Display for KodairaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KodairaType::I0 => write!(f, "I0"),
            KodairaType::I(n) => write!(f, "I{n}"),
            KodairaType::II => write!(f, "II"),
            KodairaType::III => write!(f, "III"),
            KodairaType::IV => write!(f, "IV"),
            KodairaType::I0Star => write!(f, "I0*"),
            KodairaType::IStar(n) => write!(f, "I{n}*"),
            KodairaType::IVStar => write!(f, "IV*"),
            KodairaType::IIIStar => write!(f, "III*"),
            KodairaType::IIStar => write!(f, "II*"),
        }
    }
}

/// Geometric component group `E(Q_p^unr)/E_0(Q_p^unr)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComponentGroup {
    Trivial,
    Cyclic(u32),
    Klein4,
}

impl ComponentGroup {
    pub fn order(&self) -> u32 {
        match self {
            ComponentGroup::Trivial => 1,
            ComponentGroup::Cyclic(n) => *n,
            ComponentGroup::Klein4 => 4,
        }
    }
}

impl fmt::Display for ComponentGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentGroup::Trivial | ComponentGroup::Cyclic(1) => write!(f, "trivial"),
            ComponentGroup::Cyclic(n) => write!(f, "Z/{n}"),
            ComponentGroup::Klein4 => write!(f, "Z/2+Z/2"),
        }
    }
}

/// Action of Frobenius on the geometric component group. Elements of
/// `Z/n` are `0..n`; the nonzero elements of Klein4 are `1, 2, 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrobeniusAction {
    Trivial,
    /// `x -> -x` on a cyclic group.
    Negation,
    /// Swaps `1` and `2` in Klein4, fixing `3`.
    Swap,
    /// `1 -> 2 -> 3 -> 1` in Klein4.
    Rotate,
}

impl FrobeniusAction {
    pub fn order(&self) -> u32 {
        match self {
            FrobeniusAction::Trivial => 1,
            FrobeniusAction::Negation | FrobeniusAction::Swap => 2,
            FrobeniusAction::Rotate => 3,
        }
    }

    pub fn apply(&self, group: ComponentGroup, x: u32) -> u32 {
        match (self, group) {
            (FrobeniusAction::Trivial, _) => x,
            (FrobeniusAction::Negation, ComponentGroup::Cyclic(n)) => (n - x) % n,
            (FrobeniusAction::Swap, _) => match x {
                1 => 2,
                2 => 1,
                y => y,
            },
            (FrobeniusAction::Rotate, _) => match x {
                0 => 0,
                y => y % 3 + 1,
            },
            (FrobeniusAction::Negation, _) => x,
        }
    }

    pub fn apply_pow(&self, group: ComponentGroup, x: u32, k: u32) -> u32 {
        (0..k % self.order().max(1)).fold(x, |acc, _| self.apply(group, acc))
    }
}

impl fmt::Display for FrobeniusAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FrobeniusAction::Trivial => "trivial",
            FrobeniusAction::Negation => "-1",
            FrobeniusAction::Swap => "swaps two elements",
            FrobeniusAction::Rotate => "order 3",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Splitness {
    Split,
    NonSplit,
    NotApplicable,
}

impl fmt::Display for Splitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Splitness::Split => "split",
            Splitness::NonSplit => "non-split",
            Splitness::NotApplicable => "-",
        };
        write!(f, "{s}")
    }
}

#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionData {
    #[serde_as(as = "DisplayFromStr")]
    pub p: Int,
    pub minimal_model: WeierstrassModel,
    /// Change of coordinates from the input model to `minimal_model`.
    pub transform: Transform,
    pub kodaira: KodairaType,
    pub v_disc_min: u32,
    pub conductor_exponent: u32,
    pub geometric_group: ComponentGroup,
    /// `c_p`, the order of `E(Q_p)/E_0(Q_p)`.
    pub tamagawa: u32,
    pub split: Splitness,
    pub frobenius_order: u32,
    pub frobenius_action: FrobeniusAction,
}

impl ReductionData {
    pub fn is_good(&self) -> bool {
        self.kodaira == KodairaType::I0
    }
}

/// `E(M)/E_0(M)` for the unramified extension `M` of degree `k`, with the
/// action of the Frobenius generator of `Gal(M/Q_p)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentGroupOver {
    pub degree: u32,
    pub geometric: ComponentGroup,
    pub elements: Vec<u32>,
    pub action: FrobeniusAction,
}

impl ComponentGroupOver {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn shape(&self) -> ComponentGroup {
        match (self.geometric, self.elements.len()) {
            (_, 1) => ComponentGroup::Trivial,
            (ComponentGroup::Klein4, 4) => ComponentGroup::Klein4,
            (_, n) => ComponentGroup::Cyclic(n as u32),
        }
    }
}

pub fn component_group_over(rd: &ReductionData, k: u32) -> ComponentGroupOver {
    let g = rd.geometric_group;
    let act = rd.frobenius_action;
    let elements: Vec<u32> = (0..g.order()).filter(|&x| act.apply_pow(g, x, k) == x).collect();
    let moves = elements.iter().any(|&x| act.apply(g, x) != x);
    ComponentGroupOver { degree: k, geometric: g, elements, action: if moves { act } else { FrobeniusAction::Trivial } }
}

struct Local<'a> {
    p: &'a Int,
}

impl Local<'_> {
    fn val(&self, x: &Rat) -> i64 {
        match valuation(x, self.p) {
            Valuation::Finite(v) => v,
            Valuation::Infinite => i64::MAX / 4,
        }
    }

    fn div(&self, x: &Rat) -> bool {
        self.val(x) > 0
    }

    fn red(&self, x: &Rat) -> Int {
        rat_mod(x, self.p).expect("p-integral value")
    }

    fn inv(&self, x: &Rat) -> Int {
        modinv(&self.red(x), self.p).expect("unit")
    }

    /// Whether `a x^2 + b x + c` has a root mod p.
    fn quadroots(&self, a: &Rat, b: &Rat, c: &Rat) -> bool {
        let p = self.p;
        let (a, b, c) = (self.red(a), self.red(b), self.red(c));
        if a.is_zero() {
            return !b.is_zero() || c.is_zero();
        }
        if p == &int(2) {
            return (0..2).map(int).any(|x| ((&a * &x + &b) * &x + &c).mod_floor(p).is_zero());
        }
        legendre(&(&b * &b - int(4) * &a * &c), p) >= 0
    }

    /// Number of distinct roots mod p of `x^3 + b x^2 + c x + d`.
    fn cubicroots(&self, b: &Rat, c: &Rat, d: &Rat) -> u32 {
        let f = crate::poly::RatPoly::new(vec![d.clone(), c.clone(), b.clone(), Rat::one()]);
        crate::poly::roots_in_fp(&f, self.p).map(|r| r.len() as u32).unwrap_or(0)
    }
}

fn q(n: &Int) -> Rat {
    rat_from_int(n)
}

/// Runs Tate's algorithm at `p`.
pub fn tate_algorithm(m: &WeierstrassModel, p: &Int) -> Result<ReductionData> {
    if !is_prime(p) {
        return input(format!("{p} is not prime"));
    }
    let lp = Local { p };
    let pr = q(p);
    let p2 = &pr * &pr;
    let p3 = &p2 * &pr;
    let p4 = &p2 * &p2;
    let half = if p == &int(2) { Int::zero() } else { modinv(&int(2), p).unwrap() };

    // Make the model p-integral.
    let a = m.a_invariants();
    let mut k = 0i64;
    for (i, w) in [1i64, 2, 3, 4, 6].iter().enumerate() {
        let v = lp.val(&a[i]);
        if v < 0 {
            k = k.max((-v + w - 1) / w);
        }
    }
    let mut total = Transform::new(pow_rat(p, -k), Rat::zero(), Rat::zero(), Rat::zero());
    let mut c = m.transform(&total);
    let step = |c: &mut WeierstrassModel, total: &mut Transform, w: Transform| {
        *c = c.transform(&w);
        *total = total.then(&w);
    };

    let (kodaira, fp, cp, split) = loop {
        let vd = lp.val(&c.disc);
        if vd == 0 {
            break (KodairaType::I0, 0, 1, Splitness::NotApplicable);
        }
        let (a1, a2, a3, a4, a6) = (c.a1.clone(), c.a2.clone(), c.a3.clone(), c.a4.clone(), c.a6.clone());
        let (b2, b6) = (c.b2.clone(), c.b6.clone());
        let (r, t): (Int, Int) = if p == &int(2) {
            if lp.div(&b2) {
                let r = lp.red(&a4);
                let t = lp.red(&(((q(&r) + &a2) * q(&r) + &a4) * q(&r) + &a6));
                (r, t)
            } else {
                let temp = lp.inv(&a1);
                let r = (&temp * lp.red(&a3)).mod_floor(p);
                let t = (&temp * lp.red(&(&a4 + q(&r) * q(&r)))).mod_floor(p);
                (r, t)
            }
        } else if p == &int(3) {
            let r = if lp.div(&b2) { lp.red(&-&b6) } else { (-lp.inv(&b2) * lp.red(&c.b4)).mod_floor(p) };
            let t = lp.red(&(&a1 * q(&r) + &a3));
            (r, t)
        } else {
            let r = if lp.div(&c.c4) {
                (-modinv(&int(12), p).unwrap() * lp.red(&b2)).mod_floor(p)
            } else {
                (-lp.inv(&(Rat::from_integer(int(12)) * &c.c4)) * lp.red(&(&c.c6 + &b2 * &c.c4))).mod_floor(p)
            };
            let t = (-&half * lp.red(&(&a1 * q(&r) + &a3))).mod_floor(p);
            (r, t)
        };
        step(&mut c, &mut total, Transform::new(Rat::one(), q(&r), Rat::zero(), q(&t)));
        let (a1, a2, a3, a6) = (c.a1.clone(), c.a2.clone(), c.a3.clone(), c.a6.clone());

        if !lp.div(&c.c4) {
            let splits = lp.quadroots(&Rat::one(), &a1, &-&a2);
            let cp = if splits { vd } else if vd % 2 == 0 { 2 } else { 1 };
            let sp = if splits { Splitness::Split } else { Splitness::NonSplit };
            break (KodairaType::I(vd as u32), 1, cp as u32, sp);
        }
        if lp.val(&a6) < 2 {
            break (KodairaType::II, vd, 1, Splitness::NotApplicable);
        }
        if lp.val(&c.b8) < 3 {
            break (KodairaType::III, vd - 1, 2, Splitness::NotApplicable);
        }
        if lp.val(&c.b6) < 3 {
            let cp = if lp.quadroots(&Rat::one(), &(&a3 / &pr), &-(&a6 / &p2)) { 3 } else { 1 };
            break (KodairaType::IV, vd - 2, cp, Splitness::NotApplicable);
        }
        // t is not reduced: it must clear a3 modulo p^2
        let (s, t) = if p == &int(2) {
            (q(&lp.red(&a2)), &pr * q(&lp.red(&(&a6 / &p2))))
        } else {
            (q(&(-&half * lp.red(&a1)).mod_floor(p)), -q(&half) * &a3)
        };
        step(&mut c, &mut total, Transform::new(Rat::one(), Rat::zero(), s, t));
        let (a2, a4, a6) = (c.a2.clone(), c.a4.clone(), c.a6.clone());

        let b = &a2 / &pr;
        let cc = &a4 / &p2;
        let d = &a6 / &p3;
        let w = Rat::from_integer(int(27)) * &d * &d - &b * &b * &cc * &cc + Rat::from_integer(int(4)) * &b * &b * &b * &d
            - Rat::from_integer(int(18)) * &b * &cc * &d
            + Rat::from_integer(int(4)) * &cc * &cc * &cc;
        let x = Rat::from_integer(int(3)) * &cc - &b * &b;
        let sw = if lp.div(&w) {
            if lp.div(&x) {
                3
            } else {
                2
            }
        } else {
            1
        };
        if sw == 1 {
            let cp = 1 + lp.cubicroots(&b, &cc, &d);
            break (KodairaType::I0Star, vd - 4, cp, Splitness::NotApplicable);
        }
        if sw == 2 {
            let r = if p == &int(2) {
                lp.red(&cc)
            } else if p == &int(3) {
                (lp.red(&cc) * lp.inv(&b)).mod_floor(p)
            } else {
                (lp.red(&(&b * &cc - Rat::from_integer(int(9)) * &d)) * lp.inv(&(Rat::from_integer(int(2)) * &x))).mod_floor(p)
            };
            step(&mut c, &mut total, Transform::new(Rat::one(), &pr * q(&r), Rat::zero(), Rat::zero()));
            let mut ix = 3i64;
            let mut iy = 3i64;
            let mut mx = p2.clone();
            let mut my = p2.clone();
            let cp = loop {
                let a3t = &c.a3 / &my;
                let a6t = &c.a6 / (&mx * &my);
                if lp.div(&(&a3t * &a3t + Rat::from_integer(int(4)) * &a6t)) {
                    let t = if p == &int(2) {
                        &my * q(&lp.red(&a6t))
                    } else {
                        &my * q(&(-&half * lp.red(&a3t)).mod_floor(p))
                    };
                    step(&mut c, &mut total, Transform::new(Rat::one(), Rat::zero(), Rat::zero(), t));
                    my = &my * &pr;
                    iy += 1;
                    let a2t = &c.a2 / &pr;
                    let a4t = &c.a4 / (&pr * &mx);
                    let a6t = &c.a6 / (&mx * &my);
                    if lp.div(&(&a4t * &a4t - Rat::from_integer(int(4)) * &a6t * &a2t)) {
                        let r = if p == &int(2) {
                            &mx * q(&(lp.red(&a6t) * lp.inv(&a2t)).mod_floor(p))
                        } else {
                            &mx * q(&(-lp.red(&a4t) * lp.inv(&(Rat::from_integer(int(2)) * &a2t))).mod_floor(p))
                        };
                        step(&mut c, &mut total, Transform::new(Rat::one(), r, Rat::zero(), Rat::zero()));
                        mx = &mx * &pr;
                        ix += 1;
                    } else {
                        break if lp.quadroots(&a2t, &a4t, &a6t) { 4 } else { 2 };
                    }
                } else {
                    break if lp.quadroots(&Rat::one(), &a3t, &-&a6t) { 4 } else { 2 };
                }
            };
            let nu = ix + iy - 5;
            break (KodairaType::IStar(nu as u32), vd - nu - 4, cp, Splitness::NotApplicable);
        }
        // triple root
        let r = if p == &int(2) {
            lp.red(&b)
        } else if p == &int(3) {
            lp.red(&-&d)
        } else {
            (-lp.red(&b) * modinv(&int(3), p).unwrap()).mod_floor(p)
        };
        step(&mut c, &mut total, Transform::new(Rat::one(), &pr * q(&r), Rat::zero(), Rat::zero()));
        let a3t = &c.a3 / &p2;
        let a6t = &c.a6 / &p4;
        if !lp.div(&(&a3t * &a3t + Rat::from_integer(int(4)) * &a6t)) {
            let cp = if lp.quadroots(&Rat::one(), &a3t, &-&a6t) { 3 } else { 1 };
            break (KodairaType::IVStar, vd - 6, cp, Splitness::NotApplicable);
        }
        let t = if p == &int(2) {
            -&p2 * q(&lp.red(&a6t))
        } else {
            &p2 * q(&(-&half * lp.red(&a3t)).mod_floor(p))
        };
        step(&mut c, &mut total, Transform::new(Rat::one(), Rat::zero(), Rat::zero(), t));
        if lp.val(&c.a4) < 4 {
            break (KodairaType::IIIStar, vd - 7, 2, Splitness::NotApplicable);
        }
        if lp.val(&c.a6) < 6 {
            break (KodairaType::IIStar, vd - 8, 1, Splitness::NotApplicable);
        }
        step(&mut c, &mut total, Transform::new(pr.clone(), Rat::zero(), Rat::zero(), Rat::zero()));
    };

    let v_disc_min = lp.val(&c.disc) as u32;
    let (geometric_group, frobenius_action) = frobenius_data(kodaira, cp, split);
    Ok(ReductionData {
        p: p.clone(),
        minimal_model: c,
        transform: total,
        kodaira,
        v_disc_min,
        conductor_exponent: fp as u32,
        geometric_group,
        tamagawa: cp,
        split,
        frobenius_order: frobenius_action.order(),
        frobenius_action,
    })
}

fn frobenius_data(k: KodairaType, cp: u32, split: Splitness) -> (ComponentGroup, FrobeniusAction) {
    use FrobeniusAction::*;
    match k {
        KodairaType::I0 | KodairaType::II | KodairaType::IIStar => (ComponentGroup::Trivial, Trivial),
        KodairaType::I(n) => {
            let g = if n == 1 { ComponentGroup::Trivial } else { ComponentGroup::Cyclic(n) };
            let act = if split == Splitness::NonSplit && n >= 3 { Negation } else { Trivial };
            (g, act)
        }
        KodairaType::III | KodairaType::IIIStar => (ComponentGroup::Cyclic(2), Trivial),
        KodairaType::IV | KodairaType::IVStar => (ComponentGroup::Cyclic(3), if cp == 3 { Trivial } else { Negation }),
        KodairaType::IStar(n) if n % 2 == 1 => (ComponentGroup::Cyclic(4), if cp == 4 { Trivial } else { Negation }),
        KodairaType::I0Star | KodairaType::IStar(_) => {
            let act = match cp {
                4 => Trivial,
                2 => Swap,
                _ => Rotate,
            };
            (ComponentGroup::Klein4, act)
        }
    }
}

/// Primes of bad reduction, increasing.
pub fn bad_primes(m: &WeierstrassModel) -> Result<Vec<Int>> {
    let mut cands: Vec<Int> = factor_rat(&m.disc)?.primes();
    for a in m.a_invariants() {
        if !a.denom().is_one() {
            cands.extend(factor_rat(&rat_from_int(a.denom()))?.primes());
        }
    }
    cands.sort();
    cands.dedup();
    let mut out = Vec::new();
    for p in cands {
        if tate_algorithm(m, &p)?.v_disc_min > 0 {
            out.push(p);
        }
    }
    Ok(out)
}

/// Reduction data at every bad prime.
pub fn all_bad_reduction(m: &WeierstrassModel) -> Result<Vec<ReductionData>> {
    bad_primes(m)?.iter().map(|p| tate_algorithm(m, p)).collect()
}

/// The conductor as a product over bad primes.
pub fn conductor(m: &WeierstrassModel) -> Result<Int> {
    let mut n = Int::one();
    for rd in all_bad_reduction(m)? {
        n *= num_traits::pow(rd.p.clone(), rd.conductor_exponent as usize);
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{FpCurve, FpPoint};
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn e(a: [i64; 5]) -> WeierstrassModel {
        WeierstrassModel::from_ints(a).unwrap()
    }

    fn t(a: [i64; 5], p: i64) -> ReductionData {
        tate_algorithm(&e(a), &int(p)).unwrap()
    }

    #[test]
    fn table_of_examples() {
        let rd = t([0, -26, 0, 135, -567], 3);
        assert_eq!((rd.kodaira, rd.split, rd.tamagawa, rd.geometric_group), (KodairaType::I(4), Splitness::Split, 4, ComponentGroup::Cyclic(4)));
        let rd = t([0, 26, 0, 135, 567], 3);
        assert_eq!((rd.kodaira, rd.split, rd.tamagawa), (KodairaType::I(4), Splitness::NonSplit, 2));
        let rd = t([0, 0, 0, -189, 1269], 31);
        assert_eq!((rd.kodaira, rd.split, rd.tamagawa), (KodairaType::I(1), Splitness::Split, 1));
        let rd = t([0, 0, 0, 1431, -12339], 31);
        assert_eq!((rd.kodaira, rd.split, rd.tamagawa), (KodairaType::I(3), Splitness::Split, 3));
        let rd = t([0, 0, 0, -529, 12167], 23);
        assert_eq!((rd.kodaira, rd.tamagawa), (KodairaType::IStar(1), 4));
        let rd = t([0, 0, 0, -529, -12167], 23);
        assert_eq!((rd.kodaira, rd.tamagawa, rd.frobenius_action), (KodairaType::IStar(1), 2, FrobeniusAction::Negation));
        let rd = t([0, 1, 0, 4, 12], 2);
        assert_eq!((rd.kodaira, rd.tamagawa), (KodairaType::I0Star, 2));
        let rd = t([0, 0, 0, -25, 0], 5);
        assert_eq!((rd.kodaira, rd.tamagawa, rd.geometric_group), (KodairaType::I0Star, 4, ComponentGroup::Klein4));
        let rd = t([0, 0, 0, -75, 125], 5);
        assert_eq!((rd.kodaira, rd.tamagawa, rd.frobenius_order), (KodairaType::I0Star, 1, 3));
    }

    #[test]
    fn mestre_is_semistable_away_from_two() {
        let m = e([0, 2597055, 357573631, -549082, -19608054]);
        let bad = bad_primes(&m).unwrap();
        assert!(!bad.contains(&int(2)));
        for p in &bad {
            assert_eq!(tate_algorithm(&m, p).unwrap().kodaira, KodairaType::I(1));
        }
    }

    #[test]
    fn component_groups_over_extensions() {
        let ns = t([0, 26, 0, 135, 567], 3);
        let g = component_group_over(&ns, 2);
        assert_eq!((g.order(), g.action), (4, FrobeniusAction::Negation));
        let g = component_group_over(&ns, 1);
        assert_eq!((g.order(), g.action), (2, FrobeniusAction::Trivial));
        let sp = t([0, -26, 0, 135, -567], 3);
        let g = component_group_over(&sp, 2);
        assert_eq!((g.order(), g.action), (4, FrobeniusAction::Trivial));
        let rot = t([0, 0, 0, -75, 125], 5);
        assert_eq!(component_group_over(&rot, 1).order(), 1);
        assert_eq!(component_group_over(&rot, 3).order(), 4);
        assert_eq!(component_group_over(&rot, 6).action, FrobeniusAction::Rotate);
        for rd in [ns, sp, rot] {
            let k = rd.frobenius_order * 2;
            assert_eq!(component_group_over(&rd, k).order() as u32, rd.geometric_group.order());
        }
    }

    #[test]
    fn non_minimal_input_is_minimalized() {
        let m = e([0, 0, 0, -1, 0]);
        let scaled = m.transform(&Transform::new(Rat::new(int(1), int(3)), Rat::zero(), Rat::zero(), Rat::zero()));
        let rd = tate_algorithm(&scaled, &int(3)).unwrap();
        assert_eq!(rd.kodaira, KodairaType::I0);
        assert_eq!(scaled.transform(&rd.transform), rd.minimal_model);
        let rd = tate_algorithm(&m.transform(&Transform::new(int(1).into(), int(5).into(), int(2).into(), int(7).into())), &int(2)).unwrap();
        assert_eq!(rd.kodaira, tate_algorithm(&m, &int(2)).unwrap().kodaira);
    }

    /// Counts `#E_ns(F_p)` on a reduced model by brute force.
    fn nonsingular_count(m: &WeierstrassModel, p: &Int) -> i64 {
        let a: Vec<Int> = m.a_invariants().iter().map(|x| rat_mod(x, p).unwrap()).collect();
        let c = FpCurve { p: p.clone(), a: [a[0].clone(), a[1].clone(), a[2].clone(), a[3].clone(), a[4].clone()] };
        let pu = p.to_i64().unwrap();
        let mut n = 1;
        for x in 0..pu {
            for y in 0..pu {
                let (x, y) = (int(x), int(y));
                if !c.contains(&FpPoint::Affine(x.clone(), y.clone())) {
                    continue;
                }
                let fx = (int(3) * &x * &x + int(2) * &a[1] * &x + &a[3] - &a[0] * &y).mod_floor(p);
                let fy = (int(2) * &y + &a[0] * &x + &a[2]).mod_floor(p);
                if !(fx.is_zero() && fy.is_zero()) {
                    n += 1;
                }
            }
        }
        n
    }

    fn kodaira_from_valuations(vc4: i64, vc6: i64, vd: i64) -> KodairaType {
        let _ = vc6;
        if vd == 0 {
            return KodairaType::I0;
        }
        if vc4 == 0 {
            return KodairaType::I(vd as u32);
        }
        match vd {
            2 => KodairaType::II,
            3 => KodairaType::III,
            4 => KodairaType::IV,
            6 => KodairaType::I0Star,
            8 => KodairaType::IVStar,
            9 => KodairaType::IIIStar,
            10 => KodairaType::IIStar,
            _ => KodairaType::IStar((vd - 6) as u32),
        }
    }

    // Kraus: some integral model has invariants (c4/p^4, c6/p^6)
    fn scales_down(m: &WeierstrassModel, p: &Int) -> bool {
        let (c4, c6) = (m.c4.to_integer(), m.c6.to_integer());
        let (q4, q6) = (p.pow(4), p.pow(6));
        if !(&c4 % &q4).is_zero() || !(&c6 % &q6).is_zero() || !(m.disc.to_integer() % p.pow(12)).is_zero() {
            return false;
        }
        let (c4, c6) = (c4 / q4, c6 / q6);
        let v6 = valuation(&Rat::from_integer(c6.clone()), p);
        if *p == int(3) {
            return v6 != Valuation::Finite(2);
        }
        if *p == int(2) {
            let m4 = c6.mod_floor(&int(4));
            let m32 = c6.mod_floor(&int(32));
            return m4 == int(3)
                || (valuation(&Rat::from_integer(c4), p) >= Valuation::Finite(4) && (m32 == int(0) || m32 == int(8)));
        }
        true
    }

    fn small_curve() -> impl Strategy<Value = (WeierstrassModel, Int)> {
        (prop::array::uniform5(-30i64..30), 0usize..8).prop_filter_map("singular or good", |(a, i)| {
            let m = WeierstrassModel::from_ints(a).ok()?;
            let primes = factor_rat(&m.disc).ok()?.primes();
            let p = primes.get(i % primes.len().max(1))?.clone();
            Some((m, p))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn reduction_data_is_consistent((m, p) in small_curve()) {
            let rd = tate_algorithm(&m, &p).unwrap();
            let mm = &rd.minimal_model;
            prop_assert_eq!(&m.transform(&rd.transform), mm);
            prop_assert!(mm.is_integral() || mm.a_invariants().iter().all(|a| valuation(a, &p) >= Valuation::Finite(0)));
            let (vc4, vc6, vd) = (valuation(&mm.c4, &p), valuation(&mm.c6, &p), valuation(&mm.disc, &p));
            prop_assert!(!scales_down(mm, &p));
            // Ogg's formula
            prop_assert_eq!(rd.conductor_exponent as i64, rd.v_disc_min as i64 + 1 - rd.kodaira.components() as i64);
            let fixed = (0..rd.geometric_group.order()).filter(|&x| rd.frobenius_action.apply(rd.geometric_group, x) == x).count();
            prop_assert_eq!(fixed as u32, rd.tamagawa);
            if p >= int(5) {
                prop_assert!(rd.conductor_exponent <= 2);
                let k = kodaira_from_valuations(vc4.finite().unwrap_or(99), vc6.finite().unwrap_or(99), vd.finite().unwrap());
                prop_assert_eq!(k, rd.kodaira);
            }
            if let KodairaType::I(n) = rd.kodaira {
                prop_assert_eq!(rd.v_disc_min, n);
                prop_assert_eq!(rd.conductor_exponent, 1);
                let expect = match rd.split { Splitness::Split => n, _ => if n % 2 == 0 { 2 } else { 1 } };
                prop_assert_eq!(rd.tamagawa, expect);
            }
            if p < int(60) && !rd.is_good() {
                let ns = nonsingular_count(mm, &p);
                let pi = p.to_i64().unwrap();
                let expect = match rd.split { Splitness::Split => pi - 1, Splitness::NonSplit => pi + 1, Splitness::NotApplicable => pi };
                prop_assert_eq!(ns, expect);
            }
        }
    
        #[test]
        fn twists_of_good_curves_are_i0_star(
            a in prop::array::uniform5(-9i64..9),
            pi in 0usize..5,
            rst in prop::array::uniform3(-20i64..20),
        ) {
            let p = int([3i64, 5, 7, 11, 13][pi]);
            let m = match WeierstrassModel::from_ints(a) { Ok(m) => m, Err(_) => return Ok(()) };
            prop_assume!(valuation(&m.disc, &p) == Valuation::Finite(0));
            let g = m.two_division_cubic();
            let pr = q(&p);
            let tw = WeierstrassModel::new(
                Rat::zero(), g.coeff(2) * &pr, Rat::zero(), g.coeff(1) * &pr * &pr, g.coeff(0) * &pr * &pr * &pr,
            ).unwrap();
            let [r, s, t] = rst.map(|x| Rat::from_integer(int(x)));
            let tw = tw.transform(&Transform::new(Rat::one(), r, s, t));
            let rd = tate_algorithm(&tw, &p).unwrap();
            let roots = crate::poly::roots_in_fp(&g, &p).unwrap().len() as u32;
            prop_assert_eq!(rd.kodaira, KodairaType::I0Star);
            prop_assert_eq!(rd.tamagawa, 1 + roots);
            prop_assert_eq!(rd.conductor_exponent, 2);
        }
    }
}
