//! Integer binary quadratic forms `a x^2 + b xy + c y^2` and the question of
//! whether one takes the value `±1`.

/// Transforms act on column vectors: `f∘T (X) = f(T X)`.
pub type Transform = [[i128; 2]; 2];

const ID: Transform = [[1, 0], [0, 1]];

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Form {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnitSolve {
    /// `f(x, y) = value` with `value = ±1`.
    Found { x: i128, y: i128, value: i128 },
    None,
    /// Arithmetic left the `i128` range or the cycle walk exceeded its cap.
    Overflow,
}

fn mat_mul(p: &Transform, q: &Transform) -> Option<Transform> {
    let mut r = [[0i128; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = p[i][0].checked_mul(q[0][j])?.checked_add(p[i][1].checked_mul(q[1][j])?)?;
        }
    }
    Some(r)
}

pub fn isqrt(n: i128) -> i128 {
    if n < 0 {
        return -1;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        let q = (a - a.rem_euclid(b)) / b;
        (g, y, x - q * y)
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    ext_gcd(a, b).0
}

impl Form {
    pub fn new(a: i128, b: i128, c: i128) -> Form {
        Form { a, b, c }
    }

    pub fn disc(&self) -> i128 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn eval(&self, x: i128, y: i128) -> i128 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    /// Reduced in the sense of indefinite forms.
    pub fn is_reduced(&self) -> bool {
        let d = self.disc();
        let two_a = 2 * self.a.abs();
        self.b > 0
            && self.b * self.b < d
            && (two_a + self.b) * (two_a + self.b) > d
            && (two_a - self.b <= 0 || (two_a - self.b) * (two_a - self.b) < d)
    }

    /// One reduction step `(a, b, c) -> (c, b', c')` with its transform.
    fn rho(&self) -> Option<(Form, Transform)> {
        let d = self.disc();
        let c = self.c;
        if c == 0 {
            return None;
        }
        let m = 2 * c.abs();
        let r = isqrt(d);
        // b' ≡ -b (mod 2|c|), in the window making the next form closer to reduced
        let lo = if c.checked_mul(c)? > d { -c.abs() + 1 } else { r + 1 - m };
        let b1 = lo + (-self.b - lo).rem_euclid(m);
        let s = (b1 + self.b) / (2 * c);
        let c1 = (b1.checked_mul(b1)? - d) / (4 * c);
        Some((Form { a: c, b: b1, c: c1 }, [[0, -1], [1, s]]))
    }

    /// Searches for `(x, y)` with `f(x, y) = ±1`.
    pub fn represent_unit(&self) -> UnitSolve {
        let d = self.disc();
        if self.a == 0 && self.b == 0 && self.c == 0 {
            return UnitSolve::None;
        }
        if d < 0 {
            self.definite()
        } else if d == 0 {
            self.degenerate()
        } else if isqrt(d).pow(2) == d {
            self.split()
        } else {
            self.indefinite()
        }
    }

    fn found(&self, x: i128, y: i128) -> UnitSolve {
        let v = self.eval(x, y);
        debug_assert!(v.abs() == 1);
        UnitSolve::Found { x, y, value: v }
    }

    fn definite(&self) -> UnitSolve {
        // 4a f = (2a x + b y)^2 + |d| y^2, so |d| y^2 <= 4|a|.
        let d = -self.disc();
        let (a, b) = (self.a, self.b);
        if a == 0 {
            return UnitSolve::None;
        }
        let ymax = isqrt(4 * a.abs() / d);
        for y in -ymax..=ymax {
            for t in [1i128, -1] {
                // a x^2 + b y x + (c y^2 - t) = 0
                let cc = self.c * y * y - t;
                let disc = (b * y) * (b * y) - 4 * a * cc;
                if disc < 0 {
                    continue;
                }
                let s = isqrt(disc);
                if s * s != disc {
                    continue;
                }
                for num in [-b * y + s, -b * y - s] {
                    if num % (2 * a) == 0 {
                        return self.found(num / (2 * a), y);
                    }
                }
            }
        }
        UnitSolve::None
    }

    fn degenerate(&self) -> UnitSolve {
        // f = k (u x + v y)^2 with gcd(u, v) = 1
        let k = gcd(self.a, self.c) * if self.a != 0 { self.a.signum() } else { self.c.signum() };
        if k.abs() != 1 {
            return UnitSolve::None;
        }
        let u = isqrt(self.a / k);
        let mut v = isqrt(self.c / k);
        if 2 * k * u * v != self.b {
            v = -v;
        }
        let (g, x, y) = ext_gcd(u, v);
        if g != 1 {
            return UnitSolve::None;
        }
        self.found(x, y)
    }

    fn split(&self) -> UnitSolve {
        let s = isqrt(self.disc());
        let (a, b, c) = (self.a, self.b, self.c);
        // f = (p1 x + q1 y)(p2 x + q2 y)
        let (p1, q1, p2, q2) = if a == 0 {
            (0, 1, b, c)
        } else {
            let num = -b + s;
            let den = 2 * a;
            let g = gcd(num, den);
            let (n1, mut d1) = (num / g, den / g);
            let mut n1 = n1;
            if d1 < 0 {
                d1 = -d1;
                n1 = -n1;
            }
            // first factor d1 x - n1 y
            let p2 = a / d1;
            let q2 = if n1 != 0 { -c / n1 } else { (b + n1 * p2) / d1 };
            (d1, -n1, p2, q2)
        };
        debug_assert_eq!(p1 * p2, a);
        debug_assert_eq!(q1 * q2, c);
        debug_assert_eq!(p1 * q2 + q1 * p2, b);
        let det = p1 * q2 - q1 * p2;
        if det == 0 {
            return UnitSolve::None;
        }
        for e1 in [1i128, -1] {
            for e2 in [1i128, -1] {
                let xn = e1 * q2 - q1 * e2;
                let yn = p1 * e2 - e1 * p2;
                if xn % det == 0 && yn % det == 0 {
                    return self.found(xn / det, yn / det);
                }
            }
        }
        UnitSolve::None
    }

    fn indefinite(&self) -> UnitSolve {
        const CAP: usize = 100_000;
        let mut f = *self;
        let mut t = ID;
        let check = |f: &Form, t: &Transform| -> Option<(i128, i128)> {
            if f.a.abs() == 1 {
                Some((t[0][0], t[1][0]))
            } else if f.c.abs() == 1 {
                Some((t[0][1], t[1][1]))
            } else {
                None
            }
        };
        let mut steps = 0;
        while !f.is_reduced() {
            if let Some((x, y)) = check(&f, &t) {
                return self.found(x, y);
            }
            let Some((g, s)) = f.rho() else { return UnitSolve::Overflow };
            let Some(nt) = mat_mul(&t, &s) else { return UnitSolve::Overflow };
            f = g;
            t = nt;
            steps += 1;
            if steps > CAP {
                return UnitSolve::Overflow;
            }
        }
        let start = f;
        loop {
            if let Some((x, y)) = check(&f, &t) {
                return self.found(x, y);
            }
            let Some((g, s)) = f.rho() else { return UnitSolve::Overflow };
            let Some(nt) = mat_mul(&t, &s) else { return UnitSolve::Overflow };
            f = g;
            t = nt;
            steps += 1;
            if f == start {
                return UnitSolve::None;
            }
            if steps > CAP {
                return UnitSolve::Overflow;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(f: &Form, r: i128) -> bool {
        (-r..=r).any(|x| (-r..=r).any(|y| f.eval(x, y).abs() == 1))
    }

    #[test]
    fn pell_like() {
        let f = Form::new(1, 0, -61);
        match f.represent_unit() {
            UnitSolve::Found { x, y, value } => assert_eq!(f.eval(x, y), value),
            other => panic!("{other:?}"),
        }
        // 2x^2 - 5y^2 takes only 0, 2, 3 mod 5
        assert_eq!(Form::new(2, 0, -5).represent_unit(), UnitSolve::None);
    }

    #[test]
    fn reduced_cycle_of_disc_5() {
        let f = Form::new(1, 1, -1);
        assert!(f.is_reduced());
        assert!(matches!(f.represent_unit(), UnitSolve::Found { .. }));
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(a in -6i128..=6, b in -6i128..=6, c in -6i128..=6) {
            let f = Form::new(a, b, c);
            let r = f.represent_unit();
            match r {
                UnitSolve::Found { x, y, value } => {
                    prop_assert_eq!(f.eval(x, y), value);
                    prop_assert_eq!(value.abs(), 1);
                }
                UnitSolve::None => prop_assert!(!brute(&f, 40)),
                UnitSolve::Overflow => prop_assert!(false, "overflow on small form"),
            }
        }
    }
}
