//! Exact integers and rationals, factorization, p-adic valuations and
//! square classes at the places of Q.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_with::{serde_as, DeserializeFromStr, DisplayFromStr, SerializeDisplay};

use crate::error::{input, Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(n: i64) -> Int {
    BigInt::from(n)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(int(n), int(d))
}

pub fn rat_from_int(n: &Int) -> Rat {
    Rat::from_integer(n.clone())
}

/// Parses `"-3"`, `"7/4"` or `"+12"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let s = s.strip_prefix('+').unwrap_or(s);
    let bad = || Error::Input(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: Int = n.trim().parse().map_err(|_| bad())?;
            let d: Int = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return input(format!("zero denominator in {s:?}"));
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Floor residue of `a` modulo `m > 0`.
pub fn modp(a: &Int, m: &Int) -> Int {
    a.mod_floor(m)
}

pub fn modinv(a: &Int, m: &Int) -> Option<Int> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Residue of a rational modulo `m`, if the denominator is invertible.
pub fn rat_mod(q: &Rat, m: &Int) -> Option<Int> {
    let inv = modinv(q.denom(), m)?;
    Some((q.numer() * inv).mod_floor(m))
}

pub fn is_square_int(n: &Int) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &(&r * &r) == n
}

pub fn is_square_rat(q: &Rat) -> bool {
    is_square_int(q.numer()) && is_square_int(q.denom())
}

// ---------------------------------------------------------------------------
// Valuations

/// A p-adic valuation; zero has valuation `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_positive(self) -> bool {
        match self {
            Valuation::Finite(v) => v > 0,
            Valuation::Infinite => true,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// Largest `k` with `p^k | n`, and `n / p^k`. Requires `n != 0`.
pub fn split_power(n: &Int, p: &Int) -> (i64, Int) {
    debug_assert!(!n.is_zero());
    let mut k = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return (k, m);
        }
        m = q;
        k += 1;
    }
}

pub fn val_int(n: &Int, p: &Int) -> Valuation {
    if n.is_zero() {
        Valuation::Infinite
    } else {
        Valuation::Finite(split_power(n, p).0)
    }
}

pub fn valuation(q: &Rat, p: &Int) -> Valuation {
    if q.is_zero() {
        return Valuation::Infinite;
    }
    let a = split_power(q.numer(), p).0;
    let b = split_power(q.denom(), p).0;
    Valuation::Finite(a - b)
}

/// Finite valuation of a nonzero rational.
pub fn vfin(q: &Rat, p: &Int) -> i64 {
    valuation(q, p).finite().expect("valuation of zero")
}

/// `p`-free part of a nonzero rational, i.e. `q / p^{v_p(q)}`.
pub fn unit_part(q: &Rat, p: &Int) -> Rat {
    let (_, a) = split_power(q.numer(), p);
    let (_, b) = split_power(q.denom(), p);
    Rat::new(a, b)
}

pub fn pow_int(p: &Int, k: u32) -> Int {
    num_traits::pow(p.clone(), k as usize)
}

/// `p^k` as a rational, allowing negative `k`.
pub fn pow_rat(p: &Int, k: i64) -> Rat {
    if k >= 0 {
        Rat::from_integer(pow_int(p, k as u32))
    } else {
        Rat::new(Int::one(), pow_int(p, (-k) as u32))
    }
}

// ---------------------------------------------------------------------------
// Primality and factorization

const SMALL_PRIMES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

fn miller_rabin(n: &Int, a: &Int) -> bool {
    let one = Int::one();
    let nm1 = n - &one;
    let (s, d) = split_power(&nm1, &int(2));
    let mut x = a.modpow(&d, n);
    if x == one || x == nm1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == nm1 {
            return true;
        }
        if x == one {
            return false;
        }
    }
    false
}

/// Miller-Rabin with the first 13 prime bases (deterministic below 3.3e24)
/// and 12 further fixed bases above that bound.
pub fn is_prime(n: &Int) -> bool {
    if n < &int(2) {
        return false;
    }
    for &q in SMALL_PRIMES.iter() {
        let q = int(q as i64);
        if n == &q {
            return true;
        }
        if (n % &q).is_zero() {
            return false;
        }
    }
    let bound: Int = "3317044064679887385961981".parse().unwrap();
    let nbases = if n < &bound { 13 } else { SMALL_PRIMES.len() };
    SMALL_PRIMES[..nbases]
        .iter()
        .all(|&a| miller_rabin(n, &int(a as i64)))
}

#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeFactorization {
    pub sign: i8,
    /// Strictly increasing primes with nonzero exponents.
    #[serde_as(as = "Vec<(DisplayFromStr, _)>")]
    pub factors: Vec<(Int, i64)>,
}

impl PrimeFactorization {
    pub fn value(&self) -> Rat {
        let mut acc = Rat::from_integer(int(self.sign as i64));
        for (p, e) in &self.factors {
            acc *= pow_rat(p, *e);
        }
        acc
    }

    pub fn primes(&self) -> Vec<Int> {
        self.factors.iter().map(|(p, _)| p.clone()).collect()
    }

    pub fn exponent(&self, p: &Int) -> i64 {
        self.factors
            .iter()
            .find(|(q, _)| q == p)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }
}

impl fmt::Display for PrimeFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "{}", self.sign);
        }
        if self.sign < 0 {
            write!(f, "-")?;
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

fn pollard_brent(n: &Int, c: u64) -> Option<Int> {
    let c = int(c as i64);
    let f = |x: &Int| (x * x + &c) % n;
    let mut y = int(2);
    let mut r: u64 = 1;
    let m: u64 = 128;
    let mut g = Int::one();
    let mut q = Int::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                q = (q * (&x - &y).abs()) % n;
            }
            g = q.gcd(n);
            k += m;
        }
        r *= 2;
        if r > (1 << 26) {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = (&x - &ys).abs().gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    if &g == n {
        None
    } else {
        Some(g)
    }
}

fn split_composite(n: &Int, out: &mut Vec<Int>) {
    if n.is_one() {
        return;
    }
    if is_prime(n) {
        out.push(n.clone());
        return;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        split_composite(&r, out);
        split_composite(&r, out);
        return;
    }
    for c in 1..64 {
        if let Some(d) = pollard_brent(n, c) {
            split_composite(&d, out);
            split_composite(&(n / &d), out);
            return;
        }
    }
    panic!("Pollard rho failed to split {n}");
}

/// Factorization of a nonzero integer: trial division to 10^6, then
/// Pollard-Brent on the cofactor.
pub fn factor_integer(n: &Int) -> Result<PrimeFactorization> {
    if n.is_zero() {
        return input("cannot factor 0");
    }
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut m = n.abs();
    let mut primes: Vec<Int> = Vec::new();
    let push_div = |m: &mut Int, d: u64, primes: &mut Vec<Int>| {
        let dd = int(d as i64);
        loop {
            let (q, r) = m.div_rem(&dd);
            if !r.is_zero() {
                break;
            }
            *m = q;
            primes.push(dd.clone());
        }
    };
    push_div(&mut m, 2, &mut primes);
    let mut d: u64 = 3;
    while d <= 1_000_000 {
        if m.is_one() {
            break;
        }
        if let Some(mm) = m.to_u64() {
            if d.saturating_mul(d) > mm {
                break;
            }
        }
        push_div(&mut m, d, &mut primes);
        d += 2;
    }
    split_composite(&m, &mut primes);
    primes.sort();
    let mut factors: Vec<(Int, i64)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(PrimeFactorization { sign, factors })
}

/// Factorization of a nonzero rational, exponents possibly negative.
pub fn factor_rat(q: &Rat) -> Result<PrimeFactorization> {
    if q.is_zero() {
        return input("cannot factor 0");
    }
    let a = factor_integer(q.numer())?;
    let b = factor_integer(q.denom())?;
    let mut factors = a.factors;
    for (p, e) in b.factors {
        factors.push((p, -e));
    }
    factors.sort();
    Ok(PrimeFactorization { sign: a.sign, factors })
}

/// Legendre symbol (a/p) for an odd prime p, returned as -1, 0 or 1.
pub fn legendre(a: &Int, p: &Int) -> i8 {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return 0;
    }
    let e = (p - Int::one()) >> 1;
    if a.modpow(&e, p).is_one() {
        1
    } else {
        -1
    }
}

/// Smallest positive quadratic non-residue modulo an odd prime.
pub fn least_nonresidue(p: &Int) -> Int {
    let mut a = int(2);
    while legendre(&a, p) != -1 {
        a += 1;
    }
    a
}

/// Square root modulo an odd prime (Tonelli-Shanks), if one exists.
pub fn sqrt_mod(a: &Int, p: &Int) -> Option<Int> {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Some(a);
    }
    if p == &int(2) {
        return Some(a);
    }
    if legendre(&a, p) != 1 {
        return None;
    }
    let one = Int::one();
    let (s, q) = split_power(&(p - &one), &int(2));
    let z = least_nonresidue(p);
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + &one) >> 1), p);
    while !t.is_one() {
        let mut i = 0;
        let mut tt = t.clone();
        while !tt.is_one() {
            tt = (&tt * &tt) % p;
            i += 1;
        }
        let b = c.modpow(&(int(1) << ((m - i - 1) as usize)), p);
        m = i;
        c = (&b * &b) % p;
        t = (t * &c) % p;
        r = (r * b) % p;
    }
    Some(r)
}

// ---------------------------------------------------------------------------
// Places and square classes

/// A place of Q; serialized as `"5"` or `"inf"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, SerializeDisplay, DeserializeFromStr)]
pub enum Place {
    Finite(Int),
    RealInfinite,
}

impl Place {
    pub fn finite(p: i64) -> Place {
        Place::Finite(int(p))
    }

    pub fn prime(&self) -> Option<&Int> {
        match self {
            Place::Finite(p) => Some(p),
            Place::RealInfinite => None,
        }
    }

    /// Parses a prime or one of `inf`, `infinity`, `oo`, `R`.
    pub fn parse(s: &str) -> Result<Place> {
        let t = s.trim();
        if matches!(t, "inf" | "infinity" | "oo" | "R" | "real") {
            return Ok(Place::RealInfinite);
        }
        let p: Int = t
            .parse()
            .map_err(|_| Error::Input(format!("not a place: {s:?}")))?;
        if !is_prime(&p) {
            return input(format!("{p} is not prime"));
        }
        Ok(Place::Finite(p))
    }
}

impl std::str::FromStr for Place {
    type Err = Error;

    fn from_str(s: &str) -> Result<Place> {
        Place::parse(s)
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::RealInfinite => write!(f, "inf"),
        }
    }
}

/// Unit part of a square class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnitClass {
    /// Odd prime: whether the unit part is a quadratic non-residue.
    Residue { nonresidue: bool },
    /// p = 2: the odd part modulo 8, one of 1, 3, 5, 7.
    Mod8(u8),
    /// Real place: whether the number is negative.
    Sign { negative: bool },
}

/// An element of Q_v^* / Q_v^{*2}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SquareClass {
    pub place: Place,
    pub odd_valuation: bool,
    pub unit: UnitClass,
}

impl SquareClass {
    pub fn identity(place: &Place) -> SquareClass {
        let unit = match place {
            Place::RealInfinite => UnitClass::Sign { negative: false },
            Place::Finite(p) if p == &int(2) => UnitClass::Mod8(1),
            Place::Finite(_) => UnitClass::Residue { nonresidue: false },
        };
        SquareClass { place: place.clone(), odd_valuation: false, unit }
    }

    pub fn of(q: &Rat, place: &Place) -> Result<SquareClass> {
        if q.is_zero() {
            return input("square class of 0");
        }
        Ok(match place {
            Place::RealInfinite => SquareClass {
                place: place.clone(),
                odd_valuation: false,
                unit: UnitClass::Sign { negative: q.is_negative() },
            },
            Place::Finite(p) => {
                let v = vfin(q, p);
                let u = unit_part(q, p);
                let unit = if p == &int(2) {
                    let r = rat_mod(&u, &int(8)).expect("odd denominator");
                    UnitClass::Mod8(r.to_u8().unwrap())
                } else {
                    let r = rat_mod(&u, p).expect("unit denominator");
                    UnitClass::Residue { nonresidue: legendre(&r, p) == -1 }
                };
                SquareClass { place: place.clone(), odd_valuation: v.rem_euclid(2) == 1, unit }
            }
        })
    }

    pub fn of_int(n: i64, place: &Place) -> Result<SquareClass> {
        Self::of(&rat(n, 1), place)
    }

    pub fn mul(&self, other: &SquareClass) -> Result<SquareClass> {
        if self.place != other.place {
            return input(format!("square classes at {} and {}", self.place, other.place));
        }
        let unit = match (self.unit, other.unit) {
            (UnitClass::Residue { nonresidue: a }, UnitClass::Residue { nonresidue: b }) => {
                UnitClass::Residue { nonresidue: a ^ b }
            }
            (UnitClass::Mod8(a), UnitClass::Mod8(b)) => UnitClass::Mod8((a * b) % 8),
            (UnitClass::Sign { negative: a }, UnitClass::Sign { negative: b }) => {
                UnitClass::Sign { negative: a ^ b }
            }
            _ => unreachable!("unit classes at one place share a kind"),
        };
        Ok(SquareClass {
            place: self.place.clone(),
            odd_valuation: self.odd_valuation ^ other.odd_valuation,
            unit,
        })
    }

    pub fn is_identity(&self) -> bool {
        *self == SquareClass::identity(&self.place)
    }

    /// Whether Q_v(sqrt(c)) is unramified over Q_v; at the real place,
    /// whether the class is positive.
    pub fn is_unramified(&self) -> bool {
        match self.unit {
            UnitClass::Residue { .. } => !self.odd_valuation,
            UnitClass::Mod8(u) => !self.odd_valuation && u % 4 == 1,
            UnitClass::Sign { negative } => !negative,
        }
    }

    /// Coordinates in the F_2-vector space Q_v^*/Q_v^{*2}.
    pub fn bits(&self) -> Vec<bool> {
        match self.unit {
            UnitClass::Residue { nonresidue } => vec![self.odd_valuation, nonresidue],
            // u = (-1)^a 5^b mod 8
            UnitClass::Mod8(u) => vec![self.odd_valuation, u % 4 == 3, u == 3 || u == 5],
            UnitClass::Sign { negative } => vec![negative],
        }
    }

    /// A rational number in this class.
    pub fn representative(&self) -> Rat {
        match (&self.place, self.unit) {
            (_, UnitClass::Sign { negative }) => rat(if negative { -1 } else { 1 }, 1),
            (Place::Finite(p), UnitClass::Residue { nonresidue }) => {
                let u = if nonresidue { nonresidue_rep(p) } else { int(1) };
                rat_from_int(&u) * if self.odd_valuation { rat_from_int(p) } else { Rat::one() }
            }
            (Place::Finite(p), UnitClass::Mod8(u)) => {
                rat(u as i64, 1) * if self.odd_valuation { rat_from_int(p) } else { Rat::one() }
            }
            _ => unreachable!(),
        }
    }

    /// Every class at a place, identity first.
    pub fn enumerate(place: &Place) -> Vec<SquareClass> {
        let units: Vec<UnitClass> = match place {
            Place::RealInfinite => {
                return vec![false, true]
                    .into_iter()
                    .map(|negative| SquareClass {
                        place: place.clone(),
                        odd_valuation: false,
                        unit: UnitClass::Sign { negative },
                    })
                    .collect()
            }
            Place::Finite(p) if p == &int(2) => [1, 3, 5, 7].iter().map(|&u| UnitClass::Mod8(u)).collect(),
            Place::Finite(_) => vec![
                UnitClass::Residue { nonresidue: false },
                UnitClass::Residue { nonresidue: true },
            ],
        };
        let mut out = Vec::new();
        for odd in [false, true] {
            for &unit in &units {
                out.push(SquareClass { place: place.clone(), odd_valuation: odd, unit });
            }
        }
        out
    }
}

/// `-1` when it is a non-residue, else the least positive non-residue.
fn nonresidue_rep(p: &Int) -> Int {
    if (p % int(4)) == int(3) {
        int(-1)
    } else {
        least_nonresidue(p)
    }
}

impl fmt::Display for SquareClass {
    /// Writes the class as `1`, `u`, `pi` or `u*pi`, with `u` the
    /// representative non-residue (`-1` when possible) and `pi` standing for p.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match (&self.place, self.unit) {
            (_, UnitClass::Sign { negative }) => if negative { "-1" } else { "1" }.to_string(),
            (Place::Finite(p), UnitClass::Residue { nonresidue }) => {
                let u = nonresidue_rep(p);
                match (self.odd_valuation, nonresidue) {
                    (false, false) => "1".into(),
                    (false, true) => u.to_string(),
                    (true, false) => "pi".into(),
                    (true, true) if u == int(-1) => "-pi".into(),
                    (true, true) => format!("{u}pi"),
                }
            }
            (_, UnitClass::Mod8(u)) => {
                let m = if self.odd_valuation { 2 } else { 1 };
                (m * u as i64).to_string()
            }
            _ => unreachable!(),
        };
        write!(f, "{s}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn factor_examples() {
        let f = factor_integer(&int(-2592)).unwrap();
        assert_eq!(f.sign, -1);
        assert_eq!(f.factors, vec![(int(2), 5), (int(3), 4)]);
        let f = factor_integer(&int(1)).unwrap();
        assert_eq!((f.sign, f.factors.len()), (1, 0));
        let d = -(int(16) * int(81) * int(529) * int(239));
        let f = factor_integer(&d).unwrap();
        assert_eq!(f.to_string(), "-2^4*3^4*23^2*239");
        assert!(factor_integer(&int(0)).is_err());
    }

    #[test]
    fn factor_large_semiprime() {
        let p: Int = "1000000007".parse().unwrap();
        let q: Int = "998244353".parse().unwrap();
        let f = factor_integer(&(&p * &q * int(12))).unwrap();
        assert_eq!(f.factors, vec![(int(2), 2), (int(3), 1), (q, 1), (p, 1)]);
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&rat(29791, 1), &int(31)), Valuation::Finite(3));
        assert_eq!(valuation(&rat(1, 4), &int(2)), Valuation::Finite(-2));
        assert_eq!(valuation(&rat(0, 1), &int(2)), Valuation::Infinite);
    }

    #[test]
    fn square_class_examples() {
        let two = Place::finite(2);
        assert!(SquareClass::of_int(-23, &two).unwrap().is_identity());
        for pl in [Place::finite(2), Place::finite(7), Place::RealInfinite] {
            assert!(SquareClass::of_int(1, &pl).unwrap().is_identity());
        }
        assert!(!SquareClass::of_int(-1, &Place::RealInfinite).unwrap().is_identity());
        let five = Place::finite(5);
        let a = SquareClass::of_int(3, &five).unwrap();
        let b = SquareClass::of_int(2, &five).unwrap();
        assert_eq!(a.mul(&b).unwrap(), SquareClass::of_int(6, &five).unwrap());
        assert!(a.mul(&SquareClass::of_int(2, &two).unwrap()).is_err());
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(SquareClass::enumerate(&Place::finite(7)).len(), 4);
        assert_eq!(SquareClass::enumerate(&Place::finite(2)).len(), 8);
        assert_eq!(SquareClass::enumerate(&Place::RealInfinite).len(), 2);
        for pl in [Place::finite(2), Place::finite(13), Place::finite(191), Place::RealInfinite] {
            for c in SquareClass::enumerate(&pl) {
                let back = SquareClass::of(&c.representative(), &pl).unwrap();
                assert_eq!(back, c);
                assert!(c.mul(&c).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn display_matches_table_conventions() {
        let p191 = Place::finite(191);
        assert_eq!(SquareClass::of_int(-1, &p191).unwrap().to_string(), "-1");
        assert_eq!(SquareClass::of_int(-191, &p191).unwrap().to_string(), "-pi");
        let p37 = Place::finite(37);
        assert_eq!(SquareClass::of_int(2, &p37).unwrap().to_string(), "2");
        assert_eq!(SquareClass::of_int(5, &Place::finite(73)).unwrap().to_string(), "5");
    }

    #[test]
    fn tonelli_shanks() {
        for p in [3i64, 5, 13, 17, 41, 73, 191, 257] {
            let p = int(p);
            for a in 1..40 {
                let a = int(a);
                if let Some(r) = sqrt_mod(&a, &p) {
                    assert_eq!((&r * &r).mod_floor(&p), a.mod_floor(&p));
                } else {
                    assert_eq!(legendre(&a, &p), -1);
                }
            }
        }
    }

    fn small_prime() -> impl Strategy<Value = i64> {
        prop::sample::select(vec![2i64, 3, 5, 7, 11, 13, 37, 73, 191])
    }

    fn nonzero_rat() -> impl Strategy<Value = Rat> {
        (-5000i64..5000, 1i64..500)
            .prop_filter("nonzero", |(n, _)| *n != 0)
            .prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn class_is_a_homomorphism(a in nonzero_rat(), b in nonzero_rat(), p in small_prime()) {
            for pl in [Place::finite(p), Place::RealInfinite] {
                let ca = SquareClass::of(&a, &pl).unwrap();
                let cb = SquareClass::of(&b, &pl).unwrap();
                prop_assert_eq!(ca.mul(&cb).unwrap(), SquareClass::of(&(&a * &b), &pl).unwrap());
            }
        }

        #[test]
        fn class_ignores_squares(a in nonzero_rat(), s in nonzero_rat(), p in small_prime()) {
            let pl = Place::finite(p);
            prop_assert_eq!(
                SquareClass::of(&(&a * &s * &s), &pl).unwrap(),
                SquareClass::of(&a, &pl).unwrap()
            );
        }

        #[test]
        fn factorization_round_trips(n in (-10_000_000_000i64..10_000_000_000).prop_filter("nonzero", |n| *n != 0)) {
            let f = factor_integer(&int(n)).unwrap();
            prop_assert_eq!(f.value(), rat(n, 1));
            for w in f.factors.windows(2) {
                prop_assert!(w[0].0 < w[1].0);
            }
            for (p, _) in &f.factors {
                prop_assert!(is_prime(p));
            }
        }
    }
}
