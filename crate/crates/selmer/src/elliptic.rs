//! Weierstrass models, points over Q and F_p, Vélu isogenies of degree 2
//! and 3, and leading coefficients of isogenies on formal groups.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_with::{serde_as, DisplayFromStr};

use crate::arith::{int, legendre, modinv, parse_rat, pow_rat, rat, rat_mod, sqrt_mod, valuation, Int, Rat, Valuation};
use crate::error::{input, unresolved, Error, Result};
use crate::poly::RatPoly;

fn r(n: i64) -> Rat {
    rat(n, 1)
}

/// Change of coordinates `x = u^2 x' + r`, `y = u^3 y' + s u^2 x' + t`.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transform {
    #[serde_as(as = "DisplayFromStr")]
    pub u: Rat,
    #[serde_as(as = "DisplayFromStr")]
    pub r: Rat,
    #[serde_as(as = "DisplayFromStr")]
    pub s: Rat,
    #[serde_as(as = "DisplayFromStr")]
    pub t: Rat,
}

impl Transform {
    pub fn identity() -> Transform {
        Transform { u: Rat::one(), r: Rat::zero(), s: Rat::zero(), t: Rat::zero() }
    }

    pub fn new(u: Rat, r: Rat, s: Rat, t: Rat) -> Transform {
        Transform { u, r, s, t }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Transform) -> Transform {
        let (u1, r1, s1, t1) = (&self.u, &self.r, &self.s, &self.t);
        let u1sq = u1 * u1;
        Transform {
            u: u1 * &next.u,
            r: r1 + &u1sq * &next.r,
            s: s1 + u1 * &next.s,
            t: t1 + &u1sq * u1 * &next.t + s1 * &u1sq * &next.r,
        }
    }
}

/// Weierstrass model `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` with cached invariants.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeierstrassModel {
    #[serde_as(as = "DisplayFromStr")]
    pub a1: Rat,
    #[serde_as(as = "DisplayFromStr")]
    pub a2: Rat,
    #[serde_as(as = "DisplayFromStr")]
    pub a3: Rat,
    #[serde_as(as = "DisplayFromStr")]
    pub a4: Rat,
    #[serde_as(as = "DisplayFromStr")]
    pub a6: Rat,
    #[serde_as(as = "DisplayFromStr")]
    pub b2: Rat,
    #[serde_as(as = "DisplayFromStr")]
    pub b4: Rat,
    #[serde_as(as = "DisplayFromStr")]
    pub b6: Rat,
    #[serde_as(as = "DisplayFromStr")]
    pub b8: Rat,
    #[serde_as(as = "DisplayFromStr")]
    pub c4: Rat,
    #[serde_as(as = "DisplayFromStr")]
    pub c6: Rat,
    #[serde_as(as = "DisplayFromStr")]
    pub disc: Rat,
}

/// A point over Q.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Point {
    Infinity,
    Affine(#[serde_as(as = "DisplayFromStr")] Rat, #[serde_as(as = "DisplayFromStr")] Rat),
}

impl Point {
    pub fn affine(x: Rat, y: Rat) -> Point {
        Point::Affine(x, y)
    }

    pub fn x(&self) -> Option<&Rat> {
        match self {
            Point::Infinity => None,
            Point::Affine(x, _) => Some(x),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => write!(f, "O"),
            Point::Affine(x, y) => write!(f, "({x}, {y})"),
        }
    }
}

/// Coordinate change from a model to its form `Y^2 = g(X)`: `Y = y + (a1 x + a3)/2`, `X = x`.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShortModelChange {
    #[serde_as(as = "DisplayFromStr")]
    pub half_a1: Rat,
    #[serde_as(as = "DisplayFromStr")]
    pub half_a3: Rat,
}

impl WeierstrassModel {
    pub fn new(a1: Rat, a2: Rat, a3: Rat, a4: Rat, a6: Rat) -> Result<WeierstrassModel> {
        let b2 = &a1 * &a1 + r(4) * &a2;
        let b4 = &a1 * &a3 + r(2) * &a4;
        let b6 = &a3 * &a3 + r(4) * &a6;
        let b8 = &a1 * &a1 * &a6 + r(4) * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
        let c4 = &b2 * &b2 - r(24) * &b4;
        let c6 = -(&b2 * &b2 * &b2) + r(36) * &b2 * &b4 - r(216) * &b6;
        let disc = -(&b2 * &b2 * &b8) - r(8) * &b4 * &b4 * &b4 - r(27) * &b6 * &b6 + r(9) * &b2 * &b4 * &b6;
        if disc.is_zero() {
            return input("singular Weierstrass model (discriminant 0)");
        }
        Ok(WeierstrassModel { a1, a2, a3, a4, a6, b2, b4, b6, b8, c4, c6, disc })
    }

    pub fn from_ints(a: [i64; 5]) -> Result<WeierstrassModel> {
        WeierstrassModel::new(r(a[0]), r(a[1]), r(a[2]), r(a[3]), r(a[4]))
    }

    pub fn from_rats(a: &[Rat; 5]) -> Result<WeierstrassModel> {
        WeierstrassModel::new(a[0].clone(), a[1].clone(), a[2].clone(), a[3].clone(), a[4].clone())
    }

    /// Parses `[a1,a2,a3,a4,a6]` or the short form `[a4,a6]`.
    pub fn parse(s: &str) -> Result<WeierstrassModel> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = t
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| Error::Input(format!("curve must look like [a1,a2,a3,a4,a6], got {s:?}")))?;
        let v = inner.split(',').map(parse_rat).collect::<Result<Vec<_>>>()?;
        match v.len() {
            5 => WeierstrassModel::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone(), v[4].clone()),
            2 => WeierstrassModel::new(Rat::zero(), Rat::zero(), Rat::zero(), v[0].clone(), v[1].clone()),
            n => input(format!("expected 5 or 2 coefficients, got {n}")),
        }
    }

    pub fn a_invariants(&self) -> [Rat; 5] {
        [self.a1.clone(), self.a2.clone(), self.a3.clone(), self.a4.clone(), self.a6.clone()]
    }

    pub fn j_invariant(&self) -> Rat {
        &self.c4 * &self.c4 * &self.c4 / &self.disc
    }

    pub fn is_integral(&self) -> bool {
        self.a_invariants().iter().all(|a| a.is_integer())
    }

    /// Model obtained by the change of coordinates `w`.
    pub fn transform(&self, w: &Transform) -> WeierstrassModel {
        let (u, rr, s, t) = (&w.u, &w.r, &w.s, &w.t);
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let u2 = u * u;
        let u3 = &u2 * u;
        let u4 = &u2 * &u2;
        let u6 = &u3 * &u3;
        let na1 = (a1 + r(2) * s) / u;
        let na2 = (a2 - s * a1 + r(3) * rr - s * s) / &u2;
        let na3 = (a3 + rr * a1 + r(2) * t) / &u3;
        let na4 = (a4 - s * a3 + r(2) * rr * a2 - (t + rr * s) * a1 + r(3) * rr * rr - r(2) * s * t) / &u4;
        let na6 = (a6 + rr * a4 + rr * rr * a2 + rr * rr * rr - t * a3 - t * t - rr * t * a1) / &u6;
        WeierstrassModel::new(na1, na2, na3, na4, na6).expect("coordinate changes preserve nonsingularity")
    }

    /// Image of a point of `self` on `self.transform(w)`.
    pub fn transform_point(&self, w: &Transform, p: &Point) -> Point {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => {
                let u2 = &w.u * &w.u;
                let xp = (x - &w.r) / &u2;
                let yp = (y - &w.s * (x - &w.r) - &w.t) / (&u2 * &w.u);
                Point::Affine(xp, yp)
            }
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine(x, y) => {
                y * y + &self.a1 * x * y + &self.a3 * y
                    == x * x * x + &self.a2 * x * x + &self.a4 * x + &self.a6
            }
        }
    }

    /// Points with the given x-coordinate that are rational.
    pub fn lift_x(&self, x: &Rat) -> Vec<Point> {
        let b = &self.a1 * x + &self.a3;
        let c = x * x * x + &self.a2 * x * x + &self.a4 * x + &self.a6;
        let d = &b * &b + r(4) * &c;
        if d.is_negative() {
            return vec![];
        }
        let (n, m) = (d.numer(), d.denom());
        let (sn, sm) = (num_integer::Roots::sqrt(n), num_integer::Roots::sqrt(m));
        if &(&sn * &sn) != n || &(&sm * &sm) != m {
            return vec![];
        }
        let s = Rat::new(sn, sm);
        let mut out = vec![Point::Affine(x.clone(), (-&b + &s) / r(2))];
        if !s.is_zero() {
            out.push(Point::Affine(x.clone(), (-&b - &s) / r(2)));
        }
        out
    }

    pub fn neg(&self, p: &Point) -> Point {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x.clone(), -y - &self.a1 * x - &self.a3),
        }
    }

    pub fn add(&self, p: &Point, q: &Point) -> Point {
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let (lam, nu) = if x1 == x2 {
            let den = r(2) * y1 + &self.a1 * x1 + &self.a3;
            if y1 + y2 + &self.a1 * x2 + &self.a3 == Rat::zero() {
                return Point::Infinity;
            }
            let lam = (r(3) * x1 * x1 + r(2) * &self.a2 * x1 + &self.a4 - &self.a1 * y1) / &den;
            let nu = (-(x1 * x1 * x1) + &self.a4 * x1 + r(2) * &self.a6 - &self.a3 * y1) / &den;
            (lam, nu)
        } else {
            let dx = x2 - x1;
            ((y2 - y1) / &dx, (y1 * x2 - y2 * x1) / &dx)
        };
        let x3 = &lam * &lam + &self.a1 * &lam - &self.a2 - x1 - x2;
        let y3 = -(&lam + &self.a1) * &x3 - nu - &self.a3;
        Point::Affine(x3, y3)
    }

    pub fn scalar_mul(&self, n: i64, p: &Point) -> Point {
        let mut base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Point::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// `g` with `Y^2 = g(X)` isomorphic to the model, via `Y = y + (a1 x + a3)/2`.
    pub fn short_model(&self) -> (RatPoly, ShortModelChange) {
        let g = RatPoly::new(vec![&self.b6 / r(4), &self.b4 / r(2), &self.b2 / r(4), Rat::one()]);
        (g, ShortModelChange { half_a1: &self.a1 / r(2), half_a3: &self.a3 / r(2) })
    }

    /// Cubic whose roots are the x-coordinates of the nontrivial 2-torsion.
    pub fn two_division_cubic(&self) -> RatPoly {
        self.short_model().0
    }

    /// Rational x-coordinates of nontrivial 2-torsion points, increasing.
    pub fn rational_two_torsion_x(&self) -> Vec<Rat> {
        rational_roots(&self.two_division_cubic())
    }

    /// Rational 2-torsion points, including infinity.
    pub fn rational_two_torsion(&self) -> Vec<Point> {
        let mut out = vec![Point::Infinity];
        for x in self.rational_two_torsion_x() {
            out.push(Point::Affine(x.clone(), -(&self.a1 * &x + &self.a3) / r(2)));
        }
        out
    }

    /// The 3-division polynomial.
    pub fn three_division_polynomial(&self) -> RatPoly {
        RatPoly::new(vec![self.b8.clone(), r(3) * &self.b6, r(3) * &self.b4, self.b2.clone(), r(3)])
    }

    /// Right-hand side `4x^3 + b2 x^2 + 2 b4 x + b6 = (2y + a1 x + a3)^2`.
    pub fn eta_squared(&self, x: &Rat) -> Rat {
        r(4) * x * x * x + &self.b2 * x * x + r(2) * &self.b4 * x + &self.b6
    }
}

impl fmt::Display for WeierstrassModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.a_invariants();
        write!(f, "[{},{},{},{},{}]", a[0], a[1], a[2], a[3], a[4])
    }
}

/// Rational roots of a polynomial over Q, increasing, without multiplicity.
pub fn rational_roots(f: &RatPoly) -> Vec<Rat> {
    let z = match crate::poly::factor_over_z(f) {
        Ok(z) => z,
        Err(_) => return vec![],
    };
    let mut out: Vec<Rat> = z
        .factors
        .iter()
        .filter(|(g, _)| g.deg() == 1)
        .map(|(g, _)| -g.coeff(0) / g.coeff(1))
        .collect();
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// Curves over F_p

/// Reduction of an integral model modulo a prime of good reduction.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FpCurve {
    #[serde_as(as = "DisplayFromStr")]
    pub p: Int,
    #[serde_as(as = "[DisplayFromStr; 5]")]
    pub a: [Int; 5],
}

#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FpPoint {
    Infinity,
    Affine(#[serde_as(as = "DisplayFromStr")] Int, #[serde_as(as = "DisplayFromStr")] Int),
}

impl FpCurve {
    pub fn reduce(m: &WeierstrassModel, p: &Int) -> Result<FpCurve> {
        let mut a: [Int; 5] = Default::default();
        for (i, c) in m.a_invariants().iter().enumerate() {
            a[i] = rat_mod(c, p).ok_or_else(|| Error::Input(format!("model is not integral at {p}")))?;
        }
        if valuation(&m.disc, p) != Valuation::Finite(0) {
            return input(format!("bad reduction at {p} for this model"));
        }
        Ok(FpCurve { p: p.clone(), a })
    }

    fn md(&self, x: Int) -> Int {
        x.mod_floor(&self.p)
    }

    pub fn contains(&self, pt: &FpPoint) -> bool {
        match pt {
            FpPoint::Infinity => true,
            FpPoint::Affine(x, y) => {
                let [a1, a2, a3, a4, a6] = &self.a;
                self.md(y * y + a1 * x * y + a3 * y - x * x * x - a2 * x * x - a4 * x - a6).is_zero()
            }
        }
    }

    pub fn neg(&self, pt: &FpPoint) -> FpPoint {
        match pt {
            FpPoint::Infinity => FpPoint::Infinity,
            FpPoint::Affine(x, y) => FpPoint::Affine(x.clone(), self.md(-y - &self.a[0] * x - &self.a[2])),
        }
    }

    pub fn add(&self, p1: &FpPoint, p2: &FpPoint) -> FpPoint {
        let (x1, y1, x2, y2) = match (p1, p2) {
            (FpPoint::Infinity, _) => return p2.clone(),
            (_, FpPoint::Infinity) => return p1.clone(),
            (FpPoint::Affine(a, b), FpPoint::Affine(c, d)) => (a, b, c, d),
        };
        let [a1, a2, a3, a4, a6] = &self.a;
        let p = &self.p;
        let (lam, nu) = if x1 == x2 {
            if self.md(y1 + y2 + a1 * x2 + a3).is_zero() {
                return FpPoint::Infinity;
            }
            let inv = modinv(&self.md(int(2) * y1 + a1 * x1 + a3), p).unwrap();
            let lam = self.md((int(3) * x1 * x1 + int(2) * a2 * x1 + a4 - a1 * y1) * &inv);
            let nu = self.md((-(x1 * x1 * x1) + a4 * x1 + int(2) * a6 - a3 * y1) * &inv);
            (lam, nu)
        } else {
            let inv = modinv(&self.md(x2 - x1), p).unwrap();
            (self.md((y2 - y1) * &inv), self.md((y1 * x2 - y2 * x1) * &inv))
        };
        let x3 = self.md(&lam * &lam + a1 * &lam - a2 - x1 - x2);
        let y3 = self.md(-(&lam + a1) * &x3 - nu - a3);
        FpPoint::Affine(x3, y3)
    }

    pub fn scalar_mul(&self, n: &Int, pt: &FpPoint) -> FpPoint {
        let mut base = if n.is_negative() { self.neg(pt) } else { pt.clone() };
        let mut acc = FpPoint::Infinity;
        for bit in n.abs().to_str_radix(2).chars().rev() {
            if bit == '1' {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
        }
        acc
    }

    /// All points with the given x-coordinate.
    pub fn points_at_x(&self, x: &Int) -> Vec<FpPoint> {
        let [a1, a2, a3, a4, a6] = &self.a;
        let p = &self.p;
        let b = self.md(a1 * x + a3);
        let c = self.md(x * x * x + a2 * x * x + a4 * x + a6);
        if p == &int(2) {
            return (0..2)
                .map(int)
                .filter(|y| self.md(y * y + &b * y - &c).is_zero())
                .map(|y| FpPoint::Affine(x.clone(), y))
                .collect();
        }
        let d = self.md(&b * &b + int(4) * &c);
        let inv2 = modinv(&int(2), p).unwrap();
        match sqrt_mod(&d, p) {
            None => vec![],
            Some(s) => {
                let mut out = vec![FpPoint::Affine(x.clone(), self.md((-&b + &s) * &inv2))];
                if !s.is_zero() {
                    out.push(FpPoint::Affine(x.clone(), self.md((-&b - &s) * &inv2)));
                }
                out
            }
        }
    }

    /// Number of points including infinity.
    pub fn count_points(&self) -> Int {
        let p = &self.p;
        if p == &int(2) {
            let mut n = 1;
            for x in 0..2 {
                n += self.points_at_x(&int(x)).len();
            }
            return int(n as i64);
        }
        let [a1, a2, a3, a4, a6] = &self.a;
        let b2 = a1 * a1 + int(4) * a2;
        let b4 = a1 * a3 + int(2) * a4;
        let b6 = a3 * a3 + int(4) * a6;
        let pu = p.to_i64().unwrap();
        let mut n: i64 = 1;
        for x in 0..pu {
            let x = int(x);
            let rhs = int(4) * &x * &x * &x + &b2 * &x * &x + int(2) * &b4 * &x + &b6;
            n += 1 + legendre(&rhs, p) as i64;
        }
        int(n)
    }

    /// A pseudo-random affine point, or `None` when there is none.
    pub fn random_point<R: rand::Rng>(&self, rng: &mut R) -> Option<FpPoint> {
        if let Some(p) = self.p.to_i64().filter(|&p| p < 1000) {
            let all: Vec<FpPoint> = (0..p).flat_map(|x| self.points_at_x(&int(x))).collect();
            if all.is_empty() {
                return None;
            }
            return Some(all[rng.gen_range(0..all.len())].clone());
        }
        loop {
            let x = int(rng.gen_range(0..self.p.to_i64().unwrap_or(i64::MAX)));
            let pts = self.points_at_x(&x);
            if !pts.is_empty() {
                return Some(pts[rng.gen_range(0..pts.len())].clone());
            }
        }
    }
}

/// `#E(F_p)` for a model integral at `p` with good reduction, `p <= 10^5`.
pub fn count_points_fp(m: &WeierstrassModel, p: &Int) -> Result<Int> {
    if p > &int(100_000) {
        return input("point counting is exhaustive and limited to p <= 100000");
    }
    Ok(FpCurve::reduce(m, p)?.count_points())
}

// ---------------------------------------------------------------------------
// Isogenies

/// One Vélu summand, attached to a kernel point or a pair `{Q, -Q}`.
#[serde_as]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VeluTerm {
    #[serde_as(as = "DisplayFromStr")]
    pub x: Rat,
    #[serde_as(as = "DisplayFromStr")]
    pub t: Rat,
    #[serde_as(as = "DisplayFromStr")]
    pub u: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsogenyKind {
    Multiplication(u32),
    Velu(Vec<VeluTerm>),
    Composite(Vec<IsogenyMap>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsogenyMap {
    pub domain: WeierstrassModel,
    pub codomain: WeierstrassModel,
    pub degree: u32,
    pub kind: IsogenyKind,
}

impl IsogenyMap {
    pub fn multiplication(m: &WeierstrassModel, n: u32) -> Result<IsogenyMap> {
        if !(1..=4).contains(&n) {
            return input("multiplication-by-n is supported for 1 <= n <= 4");
        }
        Ok(IsogenyMap { domain: m.clone(), codomain: m.clone(), degree: n * n, kind: IsogenyKind::Multiplication(n) })
    }

    /// `first` followed by `second`.
    pub fn compose(first: &IsogenyMap, second: &IsogenyMap) -> Result<IsogenyMap> {
        if first.codomain != second.domain {
            return input("isogenies are not composable");
        }
        Ok(IsogenyMap {
            domain: first.domain.clone(),
            codomain: second.codomain.clone(),
            degree: first.degree * second.degree,
            kind: IsogenyKind::Composite(vec![first.clone(), second.clone()]),
        })
    }

    /// x-coordinates of the kernel points other than infinity, for Vélu maps.
    pub fn kernel_x(&self) -> Vec<Rat> {
        match &self.kind {
            IsogenyKind::Velu(terms) => terms.iter().map(|t| t.x.clone()).collect(),
            _ => vec![],
        }
    }

    /// `X(x)` as numerator and denominator polynomials (Vélu maps only).
    pub fn x_rational_function(&self) -> Option<(RatPoly, RatPoly)> {
        let terms = match &self.kind {
            IsogenyKind::Velu(t) => t,
            _ => return None,
        };
        let xpoly = RatPoly::from_ints(&[0, 1]);
        let mut den = RatPoly::constant(Rat::one());
        for t in terms {
            let lin = RatPoly::linear(&t.x);
            den = den.mul(&if t.u.is_zero() { lin.clone() } else { lin.mul(&lin) });
        }
        let mut num = xpoly.mul(&den);
        for t in terms {
            let lin = RatPoly::linear(&t.x);
            let power = if t.u.is_zero() { lin.clone() } else { lin.mul(&lin) };
            let rest = den.div_exact(&power).unwrap();
            num = num.add(&rest.mul(&RatPoly::new(vec![t.t.clone()])).mul(&if t.u.is_zero() {
                RatPoly::constant(Rat::one())
            } else {
                lin.clone()
            }));
            if !t.u.is_zero() {
                num = num.add(&rest.scale(&t.u));
            }
        }
        Some((num, den))
    }

    pub fn map_point(&self, p: &Point) -> Point {
        match &self.kind {
            IsogenyKind::Multiplication(n) => self.domain.scalar_mul(*n as i64, p),
            IsogenyKind::Composite(parts) => parts.iter().fold(p.clone(), |acc, f| f.map_point(&acc)),
            IsogenyKind::Velu(terms) => {
                let (x, y) = match p {
                    Point::Infinity => return Point::Infinity,
                    Point::Affine(x, y) => (x, y),
                };
                if terms.iter().any(|t| &t.x == x) {
                    return Point::Infinity;
                }
                let e = &self.domain;
                let mut big_x = x.clone();
                let mut dx = Rat::one();
                for t in terms {
                    let d = x - &t.x;
                    let d2 = &d * &d;
                    big_x += &t.t / &d + &t.u / &d2;
                    dx -= &t.t / &d2 + r(2) * &t.u / (&d2 * &d);
                }
                let eta = r(2) * y + &e.a1 * x + &e.a3;
                let big_y = (eta * dx - &e.a1 * &big_x - &e.a3) / r(2);
                Point::Affine(big_x, big_y)
            }
        }
    }

    /// Image of an F_p point, for a prime where both models reduce well.
    pub fn map_point_fp(&self, ec: &FpCurve, pt: &FpPoint) -> Result<FpPoint> {
        match &self.kind {
            IsogenyKind::Multiplication(n) => Ok(ec.scalar_mul(&int(*n as i64), pt)),
            IsogenyKind::Composite(parts) => {
                let mut cur = pt.clone();
                let mut curve = ec.clone();
                for f in parts {
                    cur = f.map_point_fp(&curve, &cur)?;
                    curve = FpCurve::reduce(&f.codomain, &ec.p)?;
                }
                Ok(cur)
            }
            IsogenyKind::Velu(terms) => {
                let p = &ec.p;
                let (x, y) = match pt {
                    FpPoint::Infinity => return Ok(FpPoint::Infinity),
                    FpPoint::Affine(x, y) => (x, y),
                };
                let red = |q: &Rat| rat_mod(q, p).ok_or_else(|| Error::Input(format!("isogeny is not integral at {p}")));
                let mut big_x = x.clone();
                let mut dx = Int::one();
                for t in terms {
                    let d = (x - red(&t.x)?).mod_floor(p);
                    if d.is_zero() {
                        return Ok(FpPoint::Infinity);
                    }
                    let inv = modinv(&d, p).unwrap();
                    let inv2 = &inv * &inv;
                    let (tt, uu) = (red(&t.t)?, red(&t.u)?);
                    big_x += &tt * &inv + &uu * &inv2;
                    dx -= &tt * &inv2 + int(2) * &uu * &inv2 * &inv;
                }
                let [a1, _, a3, _, _] = &ec.a;
                let big_x = big_x.mod_floor(p);
                let eta = int(2) * y + a1 * x + a3;
                let half = modinv(&int(2), p).ok_or_else(|| Error::Input("Vélu map mod 2 needs a different formula".into()))?;
                let big_y = ((eta * dx - a1 * &big_x - a3) * half).mod_floor(p);
                Ok(FpPoint::Affine(big_x, big_y))
            }
        }
    }

    /// Leading coefficient `c1` of the induced map `z' = c1 z + ...` on formal groups.
    pub fn formal_leading_coefficient(&self) -> Result<Rat> {
        match &self.kind {
            IsogenyKind::Composite(parts) => {
                let mut acc = Rat::one();
                for f in parts {
                    acc *= f.formal_leading_coefficient()?;
                }
                Ok(acc)
            }
            _ => {
                let (x, y) = formal_xy(&self.domain, FORMAL_PRECISION);
                let (bx, by) = match &self.kind {
                    IsogenyKind::Multiplication(n) => series_scalar_mul(&self.domain, *n, &(x, y))?,
                    IsogenyKind::Velu(terms) => velu_series(&self.domain, terms, &x, &y)?,
                    IsogenyKind::Composite(_) => unreachable!(),
                };
                let zprime = bx.div(&by)?.neg();
                if zprime.leading_exponent() < 1 {
                    return unresolved("image series in z has a pole or constant term");
                }
                if zprime.abs < 2 {
                    return unresolved("insufficient formal-group precision");
                }
                Ok(zprime.coeff(1))
            }
        }
    }
}

impl fmt::Display for IsogenyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            IsogenyKind::Multiplication(n) => write!(f, "[{n}]"),
            IsogenyKind::Velu(t) => {
                let xs: Vec<String> = t.iter().map(|t| t.x.to_string()).collect();
                write!(f, "Velu(deg {}, kernel x = {})", self.degree, xs.join(","))
            }
            IsogenyKind::Composite(parts) => {
                let s: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "{}", s.join(" then "))
            }
        }
    }
}

fn velu_term(m: &WeierstrassModel, x: &Rat, two_torsion: bool) -> VeluTerm {
    if two_torsion {
        VeluTerm { x: x.clone(), t: (r(6) * x * x + &m.b2 * x + &m.b4) / r(2), u: Rat::zero() }
    } else {
        VeluTerm { x: x.clone(), t: r(6) * x * x + &m.b2 * x + &m.b4, u: m.eta_squared(x) }
    }
}

/// Vélu isogeny of degree 2 or 3 given by the x-coordinate of a kernel
/// generator, which must be rational; the kernel need only be Galois-stable.
pub fn velu_from_kernel_x(m: &WeierstrassModel, x: &Rat, degree: u32) -> Result<IsogenyMap> {
    let term = match degree {
        2 => {
            if !m.two_division_cubic().eval(x).is_zero() {
                return input(format!("x = {x} is not a 2-torsion abscissa"));
            }
            velu_term(m, x, true)
        }
        3 => {
            if !m.three_division_polynomial().eval(x).is_zero() {
                return input(format!("x = {x} is not a 3-torsion abscissa"));
            }
            velu_term(m, x, false)
        }
        _ => return input("Vélu isogenies are supported in degree 2 and 3"),
    };
    velu_from_terms(m, vec![term], degree)
}

fn velu_from_terms(m: &WeierstrassModel, terms: Vec<VeluTerm>, degree: u32) -> Result<IsogenyMap> {
    let t: Rat = terms.iter().map(|q| q.t.clone()).sum();
    let w: Rat = terms.iter().map(|q| &q.u + &q.x * &q.t).sum();
    let a4 = &m.a4 - r(5) * &t;
    let a6 = &m.a6 - &m.b2 * &t - r(7) * &w;
    let codomain = WeierstrassModel::new(m.a1.clone(), m.a2.clone(), m.a3.clone(), a4, a6)?;
    Ok(IsogenyMap { domain: m.clone(), codomain, degree, kind: IsogenyKind::Velu(terms) })
}

/// Vélu isogeny with kernel generated by the given rational points.
pub fn velu_isogeny(m: &WeierstrassModel, kernel: &[Point]) -> Result<IsogenyMap> {
    let mut group: Vec<Point> = vec![Point::Infinity];
    for p in kernel {
        if !m.contains(p) {
            return input(format!("{p} is not on the curve"));
        }
        if !group.contains(p) {
            group.push(p.clone());
        }
    }
    for a in group.clone() {
        for b in group.clone() {
            if !group.contains(&m.add(&a, &b)) {
                return input("kernel points do not form a subgroup");
            }
        }
    }
    let order = group.len() as u32;
    if order == 1 {
        return Ok(IsogenyMap {
            domain: m.clone(),
            codomain: m.clone(),
            degree: 1,
            kind: IsogenyKind::Velu(vec![]),
        });
    }
    if order > 3 {
        return input("Vélu isogenies are supported in degree 2 and 3");
    }
    let x = group[1].x().unwrap().clone();
    velu_from_kernel_x(m, &x, order)
}

// ---------------------------------------------------------------------------
// Formal group

const FORMAL_PRECISION: i64 = 16;

/// Truncated Laurent series `sum c_i z^(v+i)`, known modulo `z^abs`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Laurent {
    v: i64,
    c: Vec<Rat>,
    abs: i64,
}

impl Laurent {
    fn new(v: i64, c: Vec<Rat>, abs: i64) -> Laurent {
        let mut s = Laurent { v, c, abs };
        s.normalize();
        s
    }

    fn constant(a: Rat, abs: i64) -> Laurent {
        Laurent::new(0, vec![a], abs)
    }

    fn normalize(&mut self) {
        let keep = (self.abs - self.v).max(0) as usize;
        self.c.truncate(keep);
        let lead = self.c.iter().position(|a| !a.is_zero()).unwrap_or(self.c.len());
        self.c.drain(..lead);
        self.v += lead as i64;
        if self.c.is_empty() {
            self.v = self.abs;
        }
    }

    fn leading_exponent(&self) -> i64 {
        self.v
    }

    fn coeff(&self, e: i64) -> Rat {
        if e < self.v {
            return Rat::zero();
        }
        self.c.get((e - self.v) as usize).cloned().unwrap_or_else(Rat::zero)
    }

    fn is_unknown_zero(&self) -> bool {
        self.c.is_empty()
    }

    fn add(&self, o: &Laurent) -> Laurent {
        let abs = self.abs.min(o.abs);
        let v = self.v.min(o.v);
        let c = (v..abs).map(|e| self.coeff(e) + o.coeff(e)).collect();
        Laurent::new(v, c, abs)
    }

    fn neg(&self) -> Laurent {
        Laurent::new(self.v, self.c.iter().map(|a| -a).collect(), self.abs)
    }

    fn sub(&self, o: &Laurent) -> Laurent {
        self.add(&o.neg())
    }

    fn scale(&self, a: &Rat) -> Laurent {
        Laurent::new(self.v, self.c.iter().map(|x| x * a).collect(), self.abs)
    }

    fn mul(&self, o: &Laurent) -> Laurent {
        let abs = (self.abs + o.v).min(o.abs + self.v);
        let v = self.v + o.v;
        let n = (abs - v).max(0) as usize;
        let mut c = vec![Rat::zero(); n];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                if i + j < n {
                    c[i + j] += a * b;
                }
            }
        }
        Laurent::new(v, c, abs)
    }

    fn inv(&self) -> Result<Laurent> {
        if self.is_unknown_zero() {
            return unresolved("division by a series with no known nonzero term");
        }
        let rel = self.c.len();
        let mut c = vec![Rat::zero(); rel];
        let a0inv = self.c[0].recip();
        c[0] = a0inv.clone();
        for n in 1..rel {
            let mut s = Rat::zero();
            for k in 1..=n {
                s += &self.c[k] * &c[n - k];
            }
            c[n] = -s * &a0inv;
        }
        Ok(Laurent::new(-self.v, c, -self.v + rel as i64))
    }

    fn div(&self, o: &Laurent) -> Result<Laurent> {
        Ok(self.mul(&o.inv()?))
    }
}

/// `x(z), y(z)` on the formal group with `z = -x/y`.
fn formal_xy(m: &WeierstrassModel, prec: i64) -> (Laurent, Laurent) {
    let z = Laurent::new(1, vec![Rat::one()], prec + 8);
    let mut w = Laurent::new(3, vec![Rat::one()], prec + 8);
    for _ in 0..prec {
        let z2 = z.mul(&z);
        let z3 = z2.mul(&z);
        let w2 = w.mul(&w);
        let w3 = w2.mul(&w);
        w = z3
            .add(&z.mul(&w).scale(&m.a1))
            .add(&z2.mul(&w).scale(&m.a2))
            .add(&w2.scale(&m.a3))
            .add(&z.mul(&w2).scale(&m.a4))
            .add(&w3.scale(&m.a6));
        w.abs = prec + 8;
        w.normalize();
    }
    let winv = w.inv().expect("w has leading term z^3");
    let x = z.mul(&winv);
    let y = winv.neg();
    (x, y)
}

fn series_add(m: &WeierstrassModel, p: &(Laurent, Laurent), q: &(Laurent, Laurent), double: bool) -> Result<(Laurent, Laurent)> {
    let (x1, y1) = p;
    let (x2, y2) = q;
    let abs = x1.abs.min(y1.abs);
    let k = |a: &Rat| Laurent::constant(a.clone(), abs);
    let (lam, nu) = if double {
        let den = y1.scale(&r(2)).add(&x1.scale(&m.a1)).add(&k(&m.a3));
        let num = x1.mul(x1).scale(&r(3)).add(&x1.scale(&(r(2) * &m.a2))).add(&k(&m.a4)).sub(&y1.scale(&m.a1));
        let nnum = x1.mul(x1).mul(x1).neg().add(&x1.scale(&m.a4)).add(&k(&(r(2) * &m.a6))).sub(&y1.scale(&m.a3));
        (num.div(&den)?, nnum.div(&den)?)
    } else {
        let dx = x2.sub(x1);
        (y2.sub(y1).div(&dx)?, y1.mul(x2).sub(&y2.mul(x1)).div(&dx)?)
    };
    let x3 = lam.mul(&lam).add(&lam.scale(&m.a1)).sub(&k(&m.a2)).sub(x1).sub(x2);
    let y3 = lam.add(&k(&m.a1)).mul(&x3).neg().sub(&nu).sub(&k(&m.a3));
    Ok((x3, y3))
}

fn series_scalar_mul(m: &WeierstrassModel, n: u32, p: &(Laurent, Laurent)) -> Result<(Laurent, Laurent)> {
    match n {
        1 => Ok(p.clone()),
        2 => series_add(m, p, p, true),
        3 => {
            let two = series_add(m, p, p, true)?;
            series_add(m, &two, p, false)
        }
        4 => {
            let two = series_add(m, p, p, true)?;
            series_add(m, &two, &two, true)
        }
        _ => input("multiplication-by-n on formal groups needs n <= 4"),
    }
}

fn velu_series(m: &WeierstrassModel, terms: &[VeluTerm], x: &Laurent, y: &Laurent) -> Result<(Laurent, Laurent)> {
    let abs = x.abs.min(y.abs);
    let k = |a: &Rat| Laurent::constant(a.clone(), abs);
    let mut bx = x.clone();
    let mut dx = k(&Rat::one());
    for t in terms {
        let d = x.sub(&k(&t.x));
        let inv = d.inv()?;
        let inv2 = inv.mul(&inv);
        bx = bx.add(&inv.scale(&t.t)).add(&inv2.scale(&t.u));
        dx = dx.sub(&inv2.scale(&t.t)).sub(&inv2.mul(&inv).scale(&(r(2) * &t.u)));
    }
    let eta = y.scale(&r(2)).add(&x.scale(&m.a1)).add(&k(&m.a3));
    let by = eta.mul(&dx).sub(&bx.scale(&m.a1)).sub(&k(&m.a3)).scale(&rat(1, 2));
    Ok((bx, by))
}

/// Normalized p-adic absolute value `|c1|_p` of the formal leading coefficient.
pub fn phi_prime_abs(phi: &IsogenyMap, p: &Int) -> Result<Rat> {
    let c1 = phi.formal_leading_coefficient()?;
    if c1.is_zero() {
        return unresolved("formal leading coefficient vanished");
    }
    let v = valuation(&c1, p).finite().unwrap();
    Ok(pow_rat(p, -v))
}

// ---------------------------------------------------------------------------
// Filtration

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FiltrationLevel {
    /// The identity, which lies in every level.
    Identity,
    Level(u32),
}

/// Largest `i` with `P` in `E_i(Q_p)`, read from `v_p(x(P)) = -2i`.
pub fn reduction_filtration_level(m: &WeierstrassModel, pt: &Point, p: &Int) -> Result<FiltrationLevel> {
    if m.a_invariants().iter().any(|a| valuation(a, p) < Valuation::Finite(0)) {
        return input(format!("model is not integral at {p}"));
    }
    let x = match pt {
        Point::Infinity => return Ok(FiltrationLevel::Identity),
        Point::Affine(x, _) => x,
    };
    if !m.contains(pt) {
        return input("point is not on the curve");
    }
    let v = valuation(x, p).finite().unwrap_or(0);
    if v >= 0 {
        return Ok(FiltrationLevel::Level(0));
    }
    if v % 2 != 0 {
        return input("odd negative valuation of x on an integral model");
    }
    Ok(FiltrationLevel::Level((-v / 2) as u32))
}
