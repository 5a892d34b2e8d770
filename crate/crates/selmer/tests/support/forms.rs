//! Binary quadratic forms: reduction, cycles and composition over i64.

use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

// (g, x, y) with a x + b y = g >= 0
fn xgcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1, mut s0, mut s1, mut t0, mut t1) = (a, b, 1, 0, 0, 1);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 { (-r0, -s0, -t0) } else { (r0, s0, t0) }
}

fn isqrt(n: i64) -> i64 {
    let mut s = (n as f64).sqrt() as i64;
    while s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    s
}

impl Form {
    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    fn with_b(a: i64, b: i64, d: i64) -> Form {
        Form { a, b, c: (b * b - d) / (4 * a) }
    }

    pub fn is_reduced(&self) -> bool {
        let d = self.disc();
        if d < 0 {
            let Form { a, b, c } = *self;
            -a < b && b <= a && a <= c && !(b < 0 && a == c)
        } else {
            let s = isqrt(d);
            let a2 = 2 * self.a.abs();
            self.b > 0 && self.b <= s && a2 + self.b > s && a2 - self.b <= s
        }
    }

    fn normalize_neg(self) -> Form {
        let Form { a, b, .. } = self;
        let d = self.disc();
        let b = (b + a).rem_euclid(2 * a) - a;
        let b = if b == -a { a } else { b };
        Form::with_b(a, b, d)
    }

    fn rho(self) -> Form {
        let d = self.disc();
        let c = self.c;
        let m = 2 * c.abs();
        let s = isqrt(d);
        let lo = if c.abs() < s + 1 { s - m + 1 } else { -c.abs() + 1 };
        let b = lo + (-self.b - lo).rem_euclid(m);
        Form::with_b(c, b, d)
    }

    pub fn reduce(self) -> Form {
        let d = self.disc();
        if d < 0 {
            let mut f = self.normalize_neg();
            while !f.is_reduced() {
                f = Form::with_b(f.c, -f.b, d).normalize_neg();
                if f.a == f.c && f.b < 0 {
                    f.b = -f.b;
                }
            }
            f
        } else {
            let mut f = self;
            while !f.is_reduced() {
                f = f.rho();
            }
            f
        }
    }

    pub fn compose(self, g: Form) -> Form {
        let d = self.disc();
        let (f1, f2) = (self, g);
        let s = (f1.b + f2.b) / 2;
        let n = f2.b - s;
        let (d0, u, _) = xgcd(f2.a, f1.a);
        let y1 = u;
        let (d1, x2, y2) = if s % d0 == 0 {
            (d0, 0, -1)
        } else {
            let (d1, u, v) = xgcd(s, d0);
            (d1, u, -v)
        };
        let v1 = f1.a / d1;
        let v2 = f2.a / d1;
        let r = ((y1 as i128 * y2 as i128 * n as i128 - x2 as i128 * f2.c as i128).rem_euclid(v1.abs() as i128)) as i64;
        let b3 = f2.b + 2 * v2 * r;
        let a3 = v1 * v2;
        Form::with_b(a3, b3, d).reduce()
    }
}

/// Narrow class group of primitive forms of discriminant `d` (positive definite when d < 0).
pub struct ClassGroup {
    pub d: i64,
    pub reps: Vec<Form>,
    index: HashMap<Form, usize>,
}

impl ClassGroup {
    pub fn new(d: i64) -> ClassGroup {
        let mut forms = Vec::new();
        if d < 0 {
            let amax = isqrt(-d / 3);
            for a in 1..=amax {
                for b in -a + 1..=a {
                    if (b * b - d) % (4 * a) != 0 {
                        continue;
                    }
                    let f = Form::with_b(a, b, d);
                    if f.is_reduced() && gcd(gcd(f.a, f.b), f.c) == 1 {
                        forms.push(f);
                    }
                }
            }
        } else {
            let s = isqrt(d);
            for a in (-s..=s).filter(|&a| a != 0) {
                for b in 1..=s {
                    if (b * b - d) % (4 * a) != 0 {
                        continue;
                    }
                    let f = Form::with_b(a, b, d);
                    if f.is_reduced() && gcd(gcd(f.a, f.b), f.c) == 1 {
                        forms.push(f);
                    }
                }
            }
        }
        let mut index = HashMap::new();
        let mut reps = Vec::new();
        for f in forms {
            if index.contains_key(&f) {
                continue;
            }
            let k = reps.len();
            reps.push(f);
            index.insert(f, k);
            if d > 0 {
                let mut g = f.rho();
                while g != f {
                    index.insert(g, k);
                    g = g.rho();
                }
            }
        }
        ClassGroup { d, reps, index }
    }

    pub fn order(&self) -> usize {
        self.reps.len()
    }

    pub fn class_of(&self, f: Form) -> usize {
        self.index[&f.reduce()]
    }

    pub fn principal(&self) -> usize {
        let b = self.d.rem_euclid(2);
        self.class_of(Form::with_b(1, b, self.d))
    }

    /// Class of -x^2 + ..., trivial iff narrow and wide groups agree.
    pub fn minus_principal(&self) -> usize {
        let b = self.d.rem_euclid(2);
        self.class_of(Form::with_b(-1, b, self.d))
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.class_of(self.reps[x].compose(self.reps[y]))
    }

    pub fn narrow_two_rank(&self) -> u32 {
        let e = self.principal();
        let n = (0..self.order()).filter(|&x| self.mul(x, x) == e).count();
        n.trailing_zeros()
    }

    pub fn wide_two_rank(&self) -> u32 {
        let e = self.principal();
        let h = if self.d > 0 { self.minus_principal() } else { e };
        let sub = if h == e { 1 } else { 2 };
        let n = (0..self.order()).filter(|&x| {
            let y = self.mul(x, x);
            y == e || y == h
        });
        (n.count() / sub).trailing_zeros()
    }

    pub fn narrow_eq_wide(&self) -> bool {
        self.d < 0 || self.minus_principal() == self.principal()
    }
}

pub fn is_squarefree(n: i64) -> bool {
    let n = n.abs();
    let mut p = 2;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

pub fn fundamental_discriminant(d: i64) -> i64 {
    if d.rem_euclid(4) == 1 { d } else { 4 * d }
}
