//! Polynomials over Q and over Z/nZ: discriminants, factorization modulo a
//! prime, factorization over Z in small degree, and splitting types over Q_p.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_with::{serde_as, DeserializeFromStr, DisplayFromStr, SerializeDisplay};

use crate::arith::{
    int, is_prime, modinv, parse_rat, pow_int, rat_from_int, rat_mod, val_int, valuation, Int,
    Rat, Valuation,
};
use crate::error::{input, unresolved, Error, Result};

pub const DEFAULT_SEED: u64 = 0x5e1_3e5;

// ---------------------------------------------------------------------------
// Polynomials over Q

/// Polynomial with rational coefficients, constant term first; serialized
/// in the notation of [`RatPoly::parse`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, SerializeDisplay, DeserializeFromStr)]
pub struct RatPoly {
    c: Vec<Rat>,
}

impl RatPoly {
    pub fn new(mut c: Vec<Rat>) -> RatPoly {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        RatPoly { c }
    }

    pub fn zero() -> RatPoly {
        RatPoly { c: vec![] }
    }

    pub fn constant(a: Rat) -> RatPoly {
        RatPoly::new(vec![a])
    }

    /// The polynomial `X - a`.
    pub fn linear(a: &Rat) -> RatPoly {
        RatPoly::new(vec![-a.clone(), Rat::one()])
    }

    pub fn from_ints(c: &[i64]) -> RatPoly {
        RatPoly::new(c.iter().map(|&x| Rat::from_integer(int(x))).collect())
    }

    pub fn from_int_coeffs(c: &[Int]) -> RatPoly {
        RatPoly::new(c.iter().map(rat_from_int).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.c.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; the zero polynomial has degree -1.
    pub fn degree(&self) -> isize {
        self.c.len() as isize - 1
    }

    pub fn deg(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lc(&self) -> Rat {
        self.c.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for a in self.c.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    pub fn add(&self, o: &RatPoly) -> RatPoly {
        let n = self.c.len().max(o.c.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &RatPoly) -> RatPoly {
        let n = self.c.len().max(o.c.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &RatPoly) -> RatPoly {
        if self.is_zero() || o.is_zero() {
            return RatPoly::zero();
        }
        let mut c = vec![Rat::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        RatPoly::new(c)
    }

    pub fn scale(&self, a: &Rat) -> RatPoly {
        RatPoly::new(self.c.iter().map(|x| x * a).collect())
    }

    pub fn pow(&self, k: u32) -> RatPoly {
        let mut acc = RatPoly::constant(Rat::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn divrem(&self, d: &RatPoly) -> Result<(RatPoly, RatPoly)> {
        if d.is_zero() {
            return input("polynomial division by zero");
        }
        let mut r = self.c.clone();
        let dd = d.deg();
        if self.degree() < d.degree() {
            return Ok((RatPoly::zero(), self.clone()));
        }
        let mut q = vec![Rat::zero(); self.deg() - dd + 1];
        let lc = d.lc();
        for i in (0..q.len()).rev() {
            let t = &r[i + dd] / &lc;
            if !t.is_zero() {
                for (j, b) in d.c.iter().enumerate() {
                    r[i + j] -= &t * b;
                }
            }
            q[i] = t;
        }
        r.truncate(dd);
        Ok((RatPoly::new(q), RatPoly::new(r)))
    }

    pub fn rem(&self, d: &RatPoly) -> Result<RatPoly> {
        Ok(self.divrem(d)?.1)
    }

    /// Exact quotient; errors if `d` does not divide.
    pub fn div_exact(&self, d: &RatPoly) -> Result<RatPoly> {
        let (q, r) = self.divrem(d)?;
        if !r.is_zero() {
            return input("polynomial division is not exact");
        }
        Ok(q)
    }

    pub fn derivative(&self) -> RatPoly {
        RatPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * Rat::from_integer(int(i as i64)))
                .collect(),
        )
    }

    pub fn monic(&self) -> RatPoly {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.lc();
        RatPoly::new(self.c.iter().map(|a| a / &lc).collect())
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `f(X + a)`.
    pub fn shift(&self, a: &Rat) -> RatPoly {
        let mut acc = RatPoly::zero();
        let lin = RatPoly::new(vec![a.clone(), Rat::one()]);
        for coef in self.c.iter().rev() {
            acc = acc.mul(&lin).add(&RatPoly::constant(coef.clone()));
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        self.degree() >= 1 && self.gcd(&self.derivative()).degree() == 0
    }

    /// Integer coefficients when all coefficients are integers.
    pub fn to_ints(&self) -> Option<Vec<Int>> {
        self.c
            .iter()
            .map(|a| if a.is_integer() { Some(a.to_integer()) } else { None })
            .collect()
    }

    /// `(content, primitive integer polynomial with positive leading coefficient)`.
    pub fn primitive_part(&self) -> (Rat, Vec<Int>) {
        if self.is_zero() {
            return (Rat::zero(), vec![]);
        }
        let den = self.c.iter().fold(Int::one(), |acc, a| acc.lcm(a.denom()));
        let ints: Vec<Int> = self.c.iter().map(|a| (a * rat_from_int(&den)).to_integer()).collect();
        let mut g = ints.iter().fold(Int::zero(), |acc, a| acc.gcd(a));
        if self.lc().is_negative() {
            g = -g;
        }
        let prim = ints.iter().map(|a| a / &g).collect();
        (Rat::new(g, den), prim)
    }

    /// Parses `X^5+16*X^4-274*X^3+817*X^2+178*X+1` or `[1,178,817,-274,16,1]`.
    pub fn parse(s: &str) -> Result<RatPoly> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return input("empty polynomial");
        }
        if let Some(inner) = t.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or_else(|| Error::Input(format!("unterminated coefficient list {s:?}")))?;
            if inner.is_empty() {
                return Ok(RatPoly::zero());
            }
            let c = inner.split(',').map(parse_rat).collect::<Result<Vec<_>>>()?;
            return Ok(RatPoly::new(c));
        }
        let t = t.replace(['x', 'T', 't'], "X");
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        for (i, ch) in t.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        let mut c: Vec<Rat> = Vec::new();
        for term in terms {
            let (neg, body) = match term.strip_prefix('-') {
                Some(b) => (true, b.to_string()),
                None => (false, term.strip_prefix('+').unwrap_or(&term).to_string()),
            };
            let bad = || Error::Input(format!("cannot parse term {term:?} in {s:?}"));
            let (coef, exp) = match body.find('X') {
                None => (parse_rat(&body).map_err(|_| bad())?, 0usize),
                Some(pos) => {
                    let head = body[..pos].trim_end_matches('*');
                    let coef = if head.is_empty() { Rat::one() } else { parse_rat(head).map_err(|_| bad())? };
                    let tail = &body[pos + 1..];
                    let exp = if tail.is_empty() {
                        1
                    } else {
                        tail.strip_prefix('^').ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?
                    };
                    (coef, exp)
                }
            };
            if c.len() <= exp {
                c.resize(exp + 1, Rat::zero());
            }
            c[exp] += if neg { -coef } else { coef };
        }
        Ok(RatPoly::new(c))
    }
}

impl std::str::FromStr for RatPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<RatPoly> {
        RatPoly::parse(s)
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (i, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let neg = a.is_negative();
            let mag = a.abs();
            if neg {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            let mono = match i {
                0 => String::new(),
                1 => "X".into(),
                _ => format!("X^{i}"),
            };
            if i == 0 {
                out += &mag.to_string();
            } else if mag.is_one() {
                out += &mono;
            } else {
                out += &format!("{mag}*{mono}");
            }
        }
        write!(f, "{out}")
    }
}

/// Resultant over Q via the Euclidean algorithm.
pub fn resultant(f: &RatPoly, g: &RatPoly) -> Rat {
    if f.is_zero() || g.is_zero() {
        return Rat::zero();
    }
    let (m, n) = (f.deg(), g.deg());
    if n == 0 {
        return num_traits::pow(g.lc(), m);
    }
    if m == 0 {
        return num_traits::pow(f.lc(), n);
    }
    let r = f.rem(g).expect("nonzero divisor");
    if r.is_zero() {
        return Rat::zero();
    }
    let sign = if (m * n) % 2 == 1 { -Rat::one() } else { Rat::one() };
    sign * num_traits::pow(g.lc(), m - r.deg()) * resultant(g, &r)
}

pub fn discriminant(f: &RatPoly) -> Result<Rat> {
    if f.degree() < 1 {
        return input("discriminant of a constant");
    }
    let n = f.deg();
    let sign = if (n * (n - 1) / 2) % 2 == 1 { -Rat::one() } else { Rat::one() };
    Ok(sign * resultant(f, &f.derivative()) / f.lc())
}

/// Squarefree decomposition over Q: `f = lc * prod g_i^i` with monic `g_i`.
pub fn squarefree_decomposition(f: &RatPoly) -> Vec<(RatPoly, u32)> {
    let mut out = Vec::new();
    if f.degree() < 1 {
        return out;
    }
    let f = f.monic();
    let mut c = f.gcd(&f.derivative());
    let mut w = f.div_exact(&c).unwrap();
    let mut i = 1;
    while w.degree() > 0 {
        let y = w.gcd(&c);
        let z = w.div_exact(&y).unwrap();
        if z.degree() > 0 {
            out.push((z, i));
        }
        i += 1;
        c = c.div_exact(&y).unwrap();
        w = y;
    }
    out
}

// ---------------------------------------------------------------------------
// Polynomials over Z/mZ (coefficient vectors, constant first)

pub(crate) fn zp_trim(mut c: Vec<Int>) -> Vec<Int> {
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    c
}

pub(crate) fn zp_reduce(c: &[Int], m: &Int) -> Vec<Int> {
    zp_trim(c.iter().map(|a| a.mod_floor(m)).collect())
}

pub(crate) fn zp_add(a: &[Int], b: &[Int], m: &Int) -> Vec<Int> {
    let n = a.len().max(b.len());
    let z = Int::zero();
    zp_trim((0..n).map(|i| (a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z)).mod_floor(m)).collect())
}

pub(crate) fn zp_sub(a: &[Int], b: &[Int], m: &Int) -> Vec<Int> {
    let n = a.len().max(b.len());
    let z = Int::zero();
    zp_trim((0..n).map(|i| (a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).mod_floor(m)).collect())
}

pub(crate) fn zp_mul(a: &[Int], b: &[Int], m: &Int) -> Vec<Int> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut c = vec![Int::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    zp_reduce(&c, m)
}

pub(crate) fn zp_scale(a: &[Int], s: &Int, m: &Int) -> Vec<Int> {
    zp_reduce(&a.iter().map(|x| x * s).collect::<Vec<_>>(), m)
}

/// Division by a polynomial whose leading coefficient is a unit mod m.
pub(crate) fn zp_divrem(a: &[Int], d: &[Int], m: &Int) -> (Vec<Int>, Vec<Int>) {
    let d = zp_reduce(d, m);
    assert!(!d.is_empty(), "division by zero polynomial");
    let inv = modinv(d.last().unwrap(), m).expect("leading coefficient must be a unit");
    let mut r = zp_reduce(a, m);
    if r.len() < d.len() {
        return (vec![], r);
    }
    let dd = d.len() - 1;
    let mut q = vec![Int::zero(); r.len() - dd];
    for i in (0..q.len()).rev() {
        let t = (&r[i + dd] * &inv).mod_floor(m);
        if !t.is_zero() {
            for (j, b) in d.iter().enumerate() {
                r[i + j] = (&r[i + j] - &t * b).mod_floor(m);
            }
        }
        q[i] = t;
    }
    r.truncate(dd);
    (zp_trim(q), zp_trim(r))
}

pub(crate) fn zp_rem(a: &[Int], d: &[Int], m: &Int) -> Vec<Int> {
    zp_divrem(a, d, m).1
}

pub(crate) fn zp_monic(a: &[Int], m: &Int) -> Vec<Int> {
    match a.last() {
        None => vec![],
        Some(l) => zp_scale(a, &modinv(l, m).expect("unit leading coefficient"), m),
    }
}

/// Monic gcd over a prime field.
pub(crate) fn zp_gcd(a: &[Int], b: &[Int], p: &Int) -> Vec<Int> {
    let (mut a, mut b) = (zp_reduce(a, p), zp_reduce(b, p));
    while !b.is_empty() {
        let r = zp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    zp_monic(&a, p)
}

/// `(g, s, t)` with `s a + t b = g` monic, over a prime field.
pub(crate) fn zp_xgcd(a: &[Int], b: &[Int], p: &Int) -> (Vec<Int>, Vec<Int>, Vec<Int>) {
    let (mut r0, mut r1) = (zp_reduce(a, p), zp_reduce(b, p));
    let (mut s0, mut s1) = (vec![Int::one()], vec![]);
    let (mut t0, mut t1) = (vec![], vec![Int::one()]);
    while !r1.is_empty() {
        let (q, r) = zp_divrem(&r0, &r1, p);
        let s = zp_sub(&s0, &zp_mul(&q, &s1, p), p);
        let t = zp_sub(&t0, &zp_mul(&q, &t1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    let inv = modinv(r0.last().expect("nonzero gcd"), p).unwrap();
    (zp_scale(&r0, &inv, p), zp_scale(&s0, &inv, p), zp_scale(&t0, &inv, p))
}

pub(crate) fn zp_powmod(base: &[Int], e: &Int, modulus: &[Int], m: &Int) -> Vec<Int> {
    let mut result = vec![Int::one()];
    let mut b = zp_rem(base, modulus, m);
    let bits = e.to_str_radix(2);
    for ch in bits.chars() {
        result = zp_rem(&zp_mul(&result, &result, m), modulus, m);
        if ch == '1' {
            result = zp_rem(&zp_mul(&result, &b, m), modulus, m);
        }
    }
    b.clear();
    result
}

pub(crate) fn zp_eval(a: &[Int], x: &Int, m: &Int) -> Int {
    let mut acc = Int::zero();
    for c in a.iter().rev() {
        acc = (acc * x + c).mod_floor(m);
    }
    acc
}

pub(crate) fn zp_derivative(a: &[Int], m: &Int) -> Vec<Int> {
    zp_reduce(
        &a.iter().enumerate().skip(1).map(|(i, c)| c * int(i as i64)).collect::<Vec<_>>(),
        m,
    )
}

// ---------------------------------------------------------------------------
// Polynomials over F_p

/// Polynomial over the prime field F_p, constant term first.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpPoly {
    #[serde_as(as = "DisplayFromStr")]
    pub p: Int,
    #[serde_as(as = "Vec<DisplayFromStr>")]
    c: Vec<Int>,
}

impl FpPoly {
    pub fn new(p: &Int, c: &[Int]) -> FpPoly {
        FpPoly { p: p.clone(), c: zp_reduce(c, p) }
    }

    /// Reduction of a p-integral rational polynomial.
    pub fn reduce(f: &RatPoly, p: &Int) -> Result<FpPoly> {
        let c = f
            .coeffs()
            .iter()
            .map(|a| rat_mod(a, p).ok_or_else(|| Error::Input(format!("coefficient {a} is not {p}-integral"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(FpPoly::new(p, &c))
    }

    pub fn coeffs(&self) -> &[Int] {
        &self.c
    }

    pub fn degree(&self) -> isize {
        self.c.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn eval(&self, x: &Int) -> Int {
        zp_eval(&self.c, x, &self.p)
    }

    pub fn mul(&self, o: &FpPoly) -> FpPoly {
        FpPoly { p: self.p.clone(), c: zp_mul(&self.c, &o.c, &self.p) }
    }

    pub fn monic(&self) -> FpPoly {
        FpPoly { p: self.p.clone(), c: zp_monic(&self.c, &self.p) }
    }

    pub fn to_rat(&self) -> RatPoly {
        RatPoly::from_int_coeffs(&self.c)
    }

    /// The unique root of a linear polynomial.
    pub fn linear_root(&self) -> Option<Int> {
        if self.c.len() != 2 {
            return None;
        }
        let inv = modinv(&self.c[1], &self.p)?;
        Some((-&self.c[0] * inv).mod_floor(&self.p))
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let half = &self.p >> 1;
        let sym: Vec<Int> = self.c.iter().map(|a| if a > &half { a - &self.p } else { a.clone() }).collect();
        write!(f, "{}", RatPoly::from_int_coeffs(&sym))
    }
}

fn sqf_fp(f: &[Int], p: &Int) -> Vec<(Vec<Int>, u32)> {
    let mut out = Vec::new();
    let f = zp_monic(f, p);
    if f.len() <= 1 {
        return out;
    }
    let df = zp_derivative(&f, p);
    let mut c = if df.is_empty() { f.clone() } else { zp_gcd(&f, &df, p) };
    let mut w = zp_divrem(&f, &c, p).0;
    let mut i = 1u32;
    while w.len() > 1 {
        let y = zp_gcd(&w, &c, p);
        let z = zp_divrem(&w, &y, p).0;
        if z.len() > 1 {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = zp_divrem(&c, &w, p).0;
    }
    if c.len() > 1 {
        let pu = p.to_usize().expect("p-th root only reached for small p");
        let root: Vec<Int> = c.iter().step_by(pu).cloned().collect();
        for (g, m) in sqf_fp(&root, p) {
            out.push((g, m * pu as u32));
        }
    }
    out
}

fn ddf(f: &[Int], p: &Int) -> Vec<(Vec<Int>, usize)> {
    let mut out = Vec::new();
    let mut g = f.to_vec();
    let x = vec![Int::zero(), Int::one()];
    let mut h = x.clone();
    let mut i = 1;
    while g.len() - 1 >= 2 * i {
        h = zp_powmod(&h, p, &g, p);
        let d = zp_gcd(&g, &zp_sub(&h, &x, p), p);
        if d.len() > 1 {
            g = zp_divrem(&g, &d, p).0;
            h = zp_rem(&h, &g, p);
            out.push((d, i));
        }
        i += 1;
    }
    if g.len() > 1 {
        let d = g.len() - 1;
        out.push((g, d));
    }
    out
}

fn random_poly(deg: usize, p: &Int, rng: &mut ChaCha8Rng) -> Vec<Int> {
    let bytes = (p.bits() / 8 + 8) as usize;
    (0..=deg)
        .map(|_| {
            let buf: Vec<u8> = (0..bytes).map(|_| rng.gen()).collect();
            Int::from_bytes_le(num_bigint::Sign::Plus, &buf).mod_floor(p)
        })
        .collect()
}

fn edf(f: &[Int], d: usize, p: &Int, rng: &mut ChaCha8Rng, out: &mut Vec<Vec<Int>>) {
    let n = f.len() - 1;
    if n == d {
        out.push(f.to_vec());
        return;
    }
    loop {
        let a = zp_trim(random_poly(n - 1, p, rng));
        if a.len() <= 1 {
            continue;
        }
        let b = if p == &int(2) {
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..d {
                t = zp_rem(&zp_mul(&t, &t, p), f, p);
                acc = zp_add(&acc, &t, p);
            }
            acc
        } else {
            let e = (pow_int(p, d as u32) - Int::one()) >> 1;
            zp_sub(&zp_powmod(&a, &e, f, p), &[Int::one()], p)
        };
        let g = zp_gcd(f, &b, p);
        if g.len() > 1 && g.len() < f.len() {
            let h = zp_divrem(f, &g, p).0;
            edf(&g, d, p, rng, out);
            edf(&h, d, p, rng, out);
            return;
        }
    }
}

fn fp_sort_key(c: &[Int], p: &Int) -> (usize, Vec<Int>) {
    if c.len() == 2 {
        return (2, vec![(-&c[0]).mod_floor(p)]);
    }
    (c.len(), c.iter().rev().cloned().collect())
}

/// Factorization into monic irreducibles with multiplicities, sorted by
/// degree, linear factors by root.
pub fn factor_mod_p(f: &FpPoly) -> Result<Vec<(FpPoly, u32)>> {
    factor_mod_p_seeded(f, DEFAULT_SEED)
}

pub fn factor_mod_p_seeded(f: &FpPoly, seed: u64) -> Result<Vec<(FpPoly, u32)>> {
    if f.is_zero() {
        return input("factorization of the zero polynomial");
    }
    let p = &f.p;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<(Vec<Int>, u32)> = Vec::new();
    for (g, m) in sqf_fp(&f.c, p) {
        for (h, d) in ddf(&g, p) {
            let mut pieces = Vec::new();
            edf(&h, d, p, &mut rng, &mut pieces);
            for piece in pieces {
                out.push((piece, m));
            }
        }
    }
    out.sort_by(|a, b| fp_sort_key(&a.0, p).cmp(&fp_sort_key(&b.0, p)));
    Ok(out.into_iter().map(|(c, m)| (FpPoly { p: p.clone(), c }, m)).collect())
}

/// Roots in F_p with multiplicity, in increasing order.
pub fn roots_in_fp(f: &RatPoly, p: &Int) -> Result<Vec<(Int, u32)>> {
    let fp = FpPoly::reduce(f, p)?;
    if fp.is_zero() {
        return input("polynomial vanishes identically mod p");
    }
    if p < &int(10_000) {
        let mut out = Vec::new();
        let pu = p.to_i64().unwrap();
        for r in 0..pu {
            let r = int(r);
            let mut c = fp.c.clone();
            let mut mult = 0;
            while c.len() > 1 && zp_eval(&c, &r, p).is_zero() {
                c = zp_divrem(&c, &[-&r, Int::one()], p).0;
                mult += 1;
            }
            if mult > 0 {
                out.push((r, mult));
            }
        }
        return Ok(out);
    }
    let mut out: Vec<(Int, u32)> = factor_mod_p(&fp)?
        .into_iter()
        .filter_map(|(g, m)| g.linear_root().map(|r| (r, m)))
        .collect();
    out.sort();
    Ok(out)
}

// ---------------------------------------------------------------------------
// Hensel lifting

/// Lifts `f = g h (mod p)` with `f` monic over Z/p^k, `g, h` monic and
/// coprime mod p, to a factorization modulo `p^k`.
fn hensel_pair(f: &[Int], g: &[Int], h: &[Int], p: &Int, k: u32) -> (Vec<Int>, Vec<Int>) {
    let (one, s, t) = zp_xgcd(g, h, p);
    debug_assert_eq!(one, vec![Int::one()]);
    let mut g = zp_reduce(g, p);
    let mut h = zp_reduce(h, p);
    let mut pj = p.clone();
    for _ in 1..k {
        let pj1 = &pj * p;
        let diff = zp_sub(&zp_reduce(f, &pj1), &zp_mul(&g, &h, &pj1), &pj1);
        let e: Vec<Int> = zp_reduce(&diff.iter().map(|c| c / &pj).collect::<Vec<_>>(), p);
        if !e.is_empty() {
            let et = zp_mul(&e, &t, p);
            let (q, dg) = zp_divrem(&et, &g, p);
            let dh = zp_add(&zp_mul(&e, &s, p), &zp_mul(&q, &h, p), p);
            g = zp_add(&g, &zp_scale(&dg, &pj, &pj1), &pj1);
            h = zp_add(&h, &zp_scale(&dh, &pj, &pj1), &pj1);
        }
        pj = pj1;
    }
    (g, h)
}

/// Lifts a factorization of monic `f` into pairwise coprime monic factors
/// mod p to one mod `p^k`.
fn hensel_multi(f: &[Int], factors: &[Vec<Int>], p: &Int, k: u32) -> Vec<Vec<Int>> {
    let pk = pow_int(p, k);
    if factors.len() == 1 {
        return vec![zp_reduce(f, &pk)];
    }
    let rest = factors[1..].iter().fold(vec![Int::one()], |acc, g| zp_mul(&acc, g, p));
    let (g, h) = hensel_pair(f, &factors[0], &rest, p, k);
    let mut out = vec![g];
    out.extend(hensel_multi(&h, &factors[1..], p, k));
    out
}

// ---------------------------------------------------------------------------
// Factorization over Z

fn symmetric(a: &Int, m: &Int) -> Int {
    let r = a.mod_floor(m);
    if &r + &r > *m {
        r - m
    } else {
        r
    }
}

fn int_poly_divides(d: &[Int], f: &[Int]) -> Option<Vec<Int>> {
    let (q, r) = RatPoly::from_int_coeffs(f).divrem(&RatPoly::from_int_coeffs(d)).ok()?;
    if !r.is_zero() {
        return None;
    }
    q.to_ints()
}

fn zassenhaus(f: &[Int]) -> Vec<Vec<Int>> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.to_vec()];
    }
    let lc = f.last().unwrap().clone();
    let fr = RatPoly::from_int_coeffs(f);
    let df = fr.derivative();
    // Pick, among the first few good primes, one with the fewest factors.
    let mut best: Option<(Int, Vec<Vec<Int>>)> = None;
    let mut tried = 0;
    let mut q = 3i64;
    while tried < 6 {
        let p = int(q);
        q += 2;
        if !is_prime(&p) || (&lc % &p).is_zero() {
            continue;
        }
        let fp = zp_reduce(f, &p);
        if zp_gcd(&fp, &zp_reduce(&df.to_ints().unwrap(), &p), &p).len() != 1 {
            continue;
        }
        tried += 1;
        let facs: Vec<Vec<Int>> = factor_mod_p(&FpPoly::new(&p, f)).unwrap().into_iter().map(|(g, _)| g.c).collect();
        if best.as_ref().map_or(true, |(_, b)| facs.len() < b.len()) {
            best = Some((p, facs));
        }
        if best.as_ref().unwrap().1.len() == 1 {
            break;
        }
    }
    let (p, facs) = best.expect("some prime keeps f squarefree");
    if facs.len() == 1 {
        return vec![f.to_vec()];
    }
    // Bound on factor coefficients: 2^n * ||f||_2 * |lc|, doubled for signs.
    let norm2: Int = f.iter().map(|c| c * c).sum();
    let bound = (num_integer::Roots::sqrt(&norm2) + Int::one()) * (Int::one() << n) * lc.abs() * int(2);
    let mut k = 1u32;
    while pow_int(&p, k) <= bound {
        k += 1;
    }
    let pk = pow_int(&p, k);
    let monic_f = zp_scale(f, &modinv(&lc, &pk).unwrap(), &pk);
    let lifted = hensel_multi(&monic_f, &facs, &p, k);

    let mut remaining: Vec<Vec<Int>> = lifted;
    let mut g = f.to_vec();
    let mut out = Vec::new();
    let mut s = 1;
    while 2 * s <= remaining.len() {
        let mut found = false;
        let idx: Vec<usize> = (0..remaining.len()).collect();
        for subset in combinations(&idx, s) {
            let glc = g.last().unwrap().clone();
            let prod = subset.iter().fold(vec![glc.clone()], |acc, &i| zp_mul(&acc, &remaining[i], &pk));
            let cand: Vec<Int> = prod.iter().map(|c| symmetric(c, &pk)).collect();
            let (_, prim) = RatPoly::from_int_coeffs(&cand).primitive_part();
            if let Some(q) = int_poly_divides(&prim, &g) {
                out.push(prim);
                g = q;
                let keep: Vec<Vec<Int>> = remaining
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !subset.contains(i))
                    .map(|(_, c)| c.clone())
                    .collect();
                remaining = keep;
                found = true;
                break;
            }
        }
        if !found {
            s += 1;
        }
    }
    let (_, prim) = RatPoly::from_int_coeffs(&g).primitive_part();
    if prim.len() > 1 {
        out.push(prim);
    }
    out
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// Irreducible factorization over Q of a polynomial of degree at most 8.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZFactorization {
    #[serde_as(as = "DisplayFromStr")]
    pub content: Rat,
    /// Primitive integer factors with positive leading coefficient.
    pub factors: Vec<(RatPoly, u32)>,
}

impl ZFactorization {
    pub fn product(&self) -> RatPoly {
        let mut acc = RatPoly::constant(self.content.clone());
        for (g, m) in &self.factors {
            acc = acc.mul(&g.pow(*m));
        }
        acc
    }
}

pub fn factor_over_z(f: &RatPoly) -> Result<ZFactorization> {
    if f.is_zero() {
        return input("factorization of the zero polynomial");
    }
    if f.deg() > 8 {
        return input(format!("degree {} exceeds the supported bound 8", f.deg()));
    }
    let mut factors: Vec<(RatPoly, u32)> = Vec::new();
    for (g, m) in squarefree_decomposition(f) {
        let (_, prim) = g.primitive_part();
        for h in zassenhaus(&prim) {
            factors.push((RatPoly::from_int_coeffs(&h), m));
        }
    }
    factors.sort_by(|a, b| {
        (a.0.deg(), a.0.coeffs().to_vec()).cmp(&(b.0.deg(), b.0.coeffs().to_vec()))
    });
    let mut prod = RatPoly::constant(Rat::one());
    for (g, m) in &factors {
        prod = prod.mul(&g.pow(*m));
    }
    let content = f.lc() / prod.lc();
    Ok(ZFactorization { content, factors })
}

// ---------------------------------------------------------------------------
// Splitting over Q_p

/// Precision schedule for p-adic lifting, in p-adic digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HenselConfig {
    pub start: u32,
    pub cap: u32,
}

impl Default for HenselConfig {
    fn default() -> Self {
        HenselConfig { start: 20, cap: 320 }
    }
}

/// How a local factor was found and what is known about it. Values refer
/// to the scaled monic integral polynomial `F(X) = D^n f(X/D)`.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalFactorKind {
    /// A root in Z_p, known modulo p^precision (or exactly).
    Root { #[serde_as(as = "DisplayFromStr")] root: Int, exact: bool },
    /// A simple irreducible factor mod p of degree >= 2, lifted.
    Unramified { #[serde_as(as = "Vec<DisplayFromStr>")] factor: Vec<Int> },
    /// A factor read off the Newton polygon of `F(X + center)`: its roots
    /// satisfy `v(X - center) = num/den`, with the given residual factor.
    Block { #[serde_as(as = "DisplayFromStr")] center: Int, num: i64, den: i64, #[serde_as(as = "Vec<DisplayFromStr>")] residual: Vec<Int> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalFactor {
    pub e: u32,
    pub f: u32,
    pub kind: LocalFactorKind,
}

impl LocalFactor {
    pub fn degree(&self) -> u32 {
        self.e * self.f
    }

    pub fn is_root(&self) -> bool {
        matches!(self.kind, LocalFactorKind::Root { .. })
    }

    pub fn root(&self) -> Option<&Int> {
        match &self.kind {
            LocalFactorKind::Root { root, .. } => Some(root),
            _ => None,
        }
    }
}

/// Factorization type of a separable polynomial over Q_p.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalSplittingType {
    #[serde_as(as = "DisplayFromStr")]
    pub p: Int,
    /// Roots of the input are `X / scale` for roots `X` of the scaled polynomial.
    #[serde_as(as = "DisplayFromStr")]
    pub scale: Int,
    #[serde_as(as = "Vec<DisplayFromStr>")]
    pub scaled: Vec<Int>,
    pub precision: u32,
    pub factors: Vec<LocalFactor>,
    /// How each repeated residue root was resolved.
    pub resolutions: Vec<String>,
    pub splits_completely: bool,
    pub totally_ramified: bool,
    pub all_unramified: bool,
}

impl LocalSplittingType {
    pub fn pattern(&self) -> Vec<(u32, u32)> {
        self.factors.iter().map(|fa| (fa.e, fa.f)).collect()
    }

    pub fn root_count(&self) -> usize {
        self.factors.iter().filter(|fa| fa.is_root()).count()
    }

    pub fn summary(&self) -> String {
        if self.splits_completely {
            return "splits completely".into();
        }
        if self.totally_ramified {
            return "totally ramified".into();
        }
        if self.factors.len() == 1 && self.all_unramified {
            return "inert".into();
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|fa| match (fa.e, fa.f) {
                (1, f) => format!("f={f}"),
                (e, 1) => format!("e={e}"),
                (e, f) => format!("e={e},f={f}"),
            })
            .collect();
        parts.join(" + ")
    }
}

/// `(F, D)` with `F(X) = D^n f(X/D) / lc` monic with integer coefficients.
pub fn monic_integral(f: &RatPoly) -> (Vec<Int>, Int) {
    let g = f.monic();
    let n = g.deg();
    let d = g.coeffs().iter().fold(Int::one(), |acc, a| acc.lcm(a.denom()));
    let mut c = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let s = rat_from_int(&pow_int(&d, (n - i) as u32));
        c.push((g.coeff(i) * s).to_integer());
    }
    (c, d)
}

/// Taylor shift of an integer polynomial: `F(X + a)`.
pub fn int_shift(f: &[Int], a: &Int) -> Vec<Int> {
    let mut c = f.to_vec();
    let n = c.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = &c[j + 1] * a;
            c[j] += t;
        }
    }
    c
}

fn int_eval(f: &[Int], x: &Int) -> Int {
    let mut acc = Int::zero();
    for c in f.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn int_derivative(f: &[Int]) -> Vec<Int> {
    f.iter().enumerate().skip(1).map(|(i, c)| c * int(i as i64)).collect()
}

/// Lower convex hull of the Newton polygon as `(start, end)` index pairs.
fn newton_segments(f: &[Int], p: &Int) -> Vec<(usize, usize)> {
    let pts: Vec<(usize, i64)> = f
        .iter()
        .enumerate()
        .filter_map(|(i, c)| val_int(c, p).finite().map(|v| (i, v)))
        .collect();
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop the middle point when it lies on or above the chord
            let lhs = (y2 - y1) as i128 * (pt.0 as i128 - x1 as i128);
            let rhs = (pt.1 - y1) as i128 * (x2 as i128 - x1 as i128);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull.windows(2).map(|w| (w[0].0, w[1].0)).collect()
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

struct Analyzer<'a> {
    f: &'a [Int],
    p: &'a Int,
    precision: u32,
    depth_cap: u32,
    out: Vec<LocalFactor>,
    notes: Vec<String>,
}

impl Analyzer<'_> {
    /// Newton refinement of the unique root in the disc around `a`.
    fn refine(&self, a: &Int) -> Result<(Int, bool)> {
        let p = self.p;
        let df = int_derivative(self.f);
        let dv = val_int(&int_eval(&df, a), p).finite().unwrap_or(0).max(0) as u32;
        let modulus = pow_int(p, self.precision + dv + 1);
        let mut a = a.clone();
        for _ in 0..(4 * self.precision + 64) {
            let fa = int_eval(self.f, &a);
            if fa.is_zero() {
                return Ok((a, true));
            }
            let dfa = int_eval(&df, &a);
            let step = Rat::new(fa.clone(), dfa.clone());
            let lam = valuation(&step, p).finite().expect("nonzero step");
            if lam >= self.precision as i64 {
                return Ok((a.mod_floor(&pow_int(p, self.precision)), false));
            }
            let s = rat_mod(&step, &modulus).ok_or_else(|| Error::Unresolved("root refinement left Z_p".into()))?;
            a = (a - s).mod_floor(&modulus);
        }
        unresolved("root refinement did not converge")
    }

    /// Analyzes the roots of `F` with `v(X - center) > lambda0`; there are `count`.
    fn block(&mut self, center: &Int, lambda0: (i64, i64), count: usize, depth: u32) -> Result<()> {
        let p = self.p.clone();
        if depth > self.depth_cap {
            return unresolved(format!("Newton polygon recursion exceeded depth {}", self.depth_cap));
        }
        let mut g = int_shift(self.f, center);
        let mut count = count;
        if g[0].is_zero() {
            self.out.push(LocalFactor { e: 1, f: 1, kind: LocalFactorKind::Root { root: center.clone(), exact: true } });
            g.remove(0);
            count -= 1;
        }
        let mut seen = 0usize;
        for (a, b) in newton_segments(&g, &p) {
            let va = val_int(&g[a], &p).finite().unwrap();
            let vb = val_int(&g[b], &p).finite().unwrap();
            let len = (b - a) as i64;
            let rise = va - vb;
            // root valuation lambda = rise / len
            if rise * lambda0.1 <= lambda0.0 * len {
                continue;
            }
            seen += len as usize;
            let gg = gcd_i64(rise, len);
            let (h, e) = (rise / gg, len / gg);
            let d = (len / e) as usize;
            let mut residual = Vec::with_capacity(d + 1);
            for k in 0..=d {
                let i = a + k * e as usize;
                let target = va - k as i64 * h;
                match val_int(&g[i], &p) {
                    Valuation::Finite(v) if v == target => {
                        residual.push((&g[i] / pow_int(&p, v as u32)).mod_floor(&p))
                    }
                    _ => residual.push(Int::zero()),
                }
            }
            let rpoly = FpPoly::new(&p, &residual);
            for (psi, mu) in factor_mod_p(&rpoly)? {
                let deg = psi.degree() as u32;
                if mu == 1 {
                    if e == 1 && deg == 1 {
                        let y0 = psi.linear_root().unwrap();
                        let approx = center + pow_int(&p, h as u32) * y0;
                        let (root, exact) = self.refine(&approx)?;
                        self.out.push(LocalFactor { e: 1, f: 1, kind: LocalFactorKind::Root { root, exact } });
                    } else {
                        self.out.push(LocalFactor {
                            e: e as u32,
                            f: deg,
                            kind: LocalFactorKind::Block {
                                center: center.clone(),
                                num: h,
                                den: e,
                                residual: psi.coeffs().to_vec(),
                            },
                        });
                    }
                } else if e == 1 && deg == 1 {
                    let y0 = psi.linear_root().unwrap();
                    let c2 = center + pow_int(&p, h as u32) * y0;
                    self.block(&c2, (h, 1), mu as usize, depth + 1)?;
                } else {
                    return unresolved(format!(
                        "repeated residual factor {psi} (multiplicity {mu}) on a slope {h}/{e} segment"
                    ));
                }
            }
        }
        if seen != count {
            return unresolved(format!("Newton polygon accounts for {seen} of {count} roots"));
        }
        Ok(())
    }
}

/// Quadratic discriminant rule for a doubled residue root, as a cross-check.
fn quadratic_block_rule(
    f: &[Int],
    r: &Int,
    cofactor: &[Int],
    p: &Int,
    cfg: &HenselConfig,
) -> Result<&'static str> {
    let block = zp_mul(&[-r, Int::one()], &[-r, Int::one()], p);
    let mut k = cfg.start;
    loop {
        let lifted = hensel_multi(f, &[block.clone(), zp_reduce(cofactor, p)], p, k);
        let q = &lifted[0];
        let pk = pow_int(p, k);
        let disc = (&q[1] * &q[1] - int(4) * &q[0]).mod_floor(&pk);
        let need = if p == &int(2) { 3 } else { 1 };
        if let Valuation::Finite(v) = val_int(&disc, p) {
            if v + need <= k as i64 {
                let u = &disc / pow_int(p, v as u32);
                let kind = if v % 2 == 1 {
                    "ramified"
                } else if p == &int(2) {
                    match (u.mod_floor(&int(8))).to_u8().unwrap() {
                        1 => "split",
                        5 => "inert",
                        _ => "ramified",
                    }
                } else if crate::arith::legendre(&u, p) == 1 {
                    "split"
                } else {
                    "inert"
                };
                return Ok(kind);
            }
        }
        if k >= cfg.cap {
            return unresolved(format!("quadratic block discriminant not determined at precision {p}^{k}"));
        }
        k = (2 * k).min(cfg.cap);
    }
}

pub fn local_splitting_type(f: &RatPoly, p: &Int) -> Result<LocalSplittingType> {
    local_splitting_type_with(f, p, &HenselConfig::default(), HenselConfig::default().start)
}

/// Splitting type with roots lifted to `precision` digits.
pub fn local_splitting_type_with(
    f: &RatPoly,
    p: &Int,
    cfg: &HenselConfig,
    precision: u32,
) -> Result<LocalSplittingType> {
    if f.degree() < 1 {
        return input("splitting type of a constant");
    }
    if !is_prime(p) {
        return input(format!("{p} is not prime"));
    }
    if !f.is_squarefree() {
        return input("polynomial is not separable");
    }
    if precision > cfg.cap {
        return unresolved(format!("requested precision {precision} exceeds cap {}", cfg.cap));
    }
    let (big_f, scale) = monic_integral(f);
    let n = big_f.len() - 1;
    let fp = FpPoly::new(p, &big_f);
    let facs = factor_mod_p(&fp)?;
    let mut an = Analyzer { f: &big_f, p, precision, depth_cap: cfg.cap, out: Vec::new(), notes: Vec::new() };
    let pk = pow_int(p, precision);
    for (g, m) in &facs {
        let deg = g.degree() as u32;
        if *m == 1 && deg == 1 {
            let r = g.linear_root().unwrap();
            let (root, exact) = an.refine(&r)?;
            an.out.push(LocalFactor { e: 1, f: 1, kind: LocalFactorKind::Root { root, exact } });
        } else if *m == 1 {
            let cof = zp_divrem(&fp.c, &g.c, p).0;
            let lifted = hensel_multi(&big_f, &[g.c.clone(), cof], p, precision);
            let factor = zp_reduce(&lifted[0], &pk);
            an.out.push(LocalFactor { e: 1, f: deg, kind: LocalFactorKind::Unramified { factor } });
        } else if deg == 1 {
            let r = g.linear_root().unwrap();
            let before = an.out.len();
            an.block(&r, (0, 1), *m as usize, 0)?;
            let got: Vec<String> = an.out[before..]
                .iter()
                .map(|fa| format!("(e={},f={})", fa.e, fa.f))
                .collect();
            let mut note = format!("({}-{r})^{m} mod {p}: Newton polygon gives {}", "X", got.join(" "));
            if *m == 2 {
                let cof = zp_divrem(&fp.c, &zp_mul(&[-&r, Int::one()], &[-&r, Int::one()], p), p).0;
                let rule = quadratic_block_rule(&big_f, &r, &cof, p, cfg)?;
                let np = match (an.out.len() - before, an.out[before].e) {
                    (2, _) => "split",
                    (1, 2) => "ramified",
                    _ => "inert",
                };
                if rule != np {
                    return unresolved(format!("block at {r} mod {p}: discriminant rule says {rule}, Newton polygon says {np}"));
                }
                note += &format!("; quadratic discriminant class: {rule}");
            }
            an.notes.push(note);
        } else {
            return unresolved(format!("repeated factor {g} of degree {deg} mod {p}"));
        }
    }
    let mut factors = an.out;
    let notes = an.notes;
    factors.sort_by_key(|fa| {
        let res = match &fa.kind {
            LocalFactorKind::Root { root, .. } => root.mod_floor(p),
            LocalFactorKind::Unramified { .. } => p.clone(),
            LocalFactorKind::Block { center, .. } => center.mod_floor(p),
        };
        let full = fa.root().cloned().unwrap_or_default();
        (fa.f, res, full)
    });
    factors.sort_by_key(|fa| if fa.is_root() { 0 } else { 1 });
    let total: u32 = factors.iter().map(|fa| fa.e * fa.f).sum();
    if total as usize != n {
        return unresolved(format!("local factors account for degree {total} of {n}"));
    }
    Ok(LocalSplittingType {
        p: p.clone(),
        scale,
        scaled: big_f,
        precision,
        splits_completely: factors.iter().all(|fa| fa.e == 1 && fa.f == 1),
        totally_ramified: factors.len() == 1 && factors[0].e as usize == n,
        all_unramified: factors.iter().all(|fa| fa.e == 1),
        factors,
        resolutions: notes,
    })
}

// ---------------------------------------------------------------------------
// Real roots

/// Sturm sequence of a squarefree polynomial.
fn sturm(f: &RatPoly) -> Vec<RatPoly> {
    let mut seq = vec![f.clone(), f.derivative()];
    loop {
        let n = seq.len();
        let r = seq[n - 2].rem(&seq[n - 1]).unwrap();
        if r.is_zero() {
            return seq;
        }
        seq.push(r.scale(&-Rat::one()));
    }
}

fn sign_changes(seq: &[RatPoly], x: &Rat) -> usize {
    let signs: Vec<i8> = seq
        .iter()
        .map(|g| {
            let v = g.eval(x);
            if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            }
        })
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Cauchy bound on the absolute value of the roots.
fn root_bound(f: &RatPoly) -> Rat {
    let lc = f.lc().abs();
    let m = f.coeffs().iter().map(|a| a.abs() / &lc).fold(Rat::zero(), |a, b| if b > a { b } else { a });
    m + Rat::one()
}

/// Disjoint isolating intervals `(lo, hi]` for the real roots of a
/// squarefree polynomial, in increasing order.
pub fn real_root_intervals(f: &RatPoly) -> Vec<(Rat, Rat)> {
    let seq = sturm(f);
    let b = root_bound(f);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        let k = sign_changes(&seq, &lo) - sign_changes(&seq, &hi);
        if k == 0 {
            continue;
        }
        if k == 1 {
            out.push((lo, hi));
            continue;
        }
        let mid = (&lo + &hi) / Rat::from_integer(int(2));
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Shrinks an isolating interval until `x` lies outside it, returning the
/// sign of `x - root` (0 when `x` is the root).
pub fn compare_with_root(f: &RatPoly, interval: &(Rat, Rat), x: &Rat) -> i8 {
    if f.eval(x).is_zero() && &interval.0 < x && x <= &interval.1 {
        return 0;
    }
    let (mut lo, mut hi) = interval.clone();
    let seq = sturm(f);
    loop {
        if x <= &lo {
            return -1;
        }
        if x > &hi {
            return 1;
        }
        let mid = (&lo + &hi) / Rat::from_integer(int(2));
        if sign_changes(&seq, &lo) - sign_changes(&seq, &mid) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// Approximate real roots for display.
pub fn real_roots_f64(f: &RatPoly) -> Vec<f64> {
    let seq = sturm(f);
    real_root_intervals(f)
        .into_iter()
        .map(|(mut lo, mut hi)| {
            for _ in 0..60 {
                let mid = (&lo + &hi) / Rat::from_integer(int(2));
                if sign_changes(&seq, &lo) - sign_changes(&seq, &mid) == 1 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi.numer().to_f64().unwrap() / hi.denom().to_f64().unwrap()
        })
        .collect()
}
