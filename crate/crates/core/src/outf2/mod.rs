//! `Out(F_2) = GL(2, Z)`: classification, conjugacy, centralizers, and the
//! conjugacy problem in `Aut(F_2)`.

pub mod forms;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::automorphism::Automorphism;
use crate::error::{CoreError, Result};
use crate::matrix::{integer_kernel, IMat};
use crate::twisted::{self, TwistedBudget, TwistedNo};
use crate::verdict::Verdict;
use forms::{Form, UnitSolve};

#[derive(Copy, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gl2(pub [[i64; 2]; 2]);

impl Gl2 {
    pub const I: Gl2 = Gl2([[1, 0], [0, 1]]);

    pub fn new(m: [[i64; 2]; 2]) -> Result<Gl2> {
        let g = Gl2(m);
        if g.det().abs() != 1 {
            return Err(CoreError::NotUnimodular);
        }
        Ok(g)
    }

    pub fn from_imat(m: &IMat) -> Result<Gl2> {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(CoreError::RankMismatch(m.rows(), 2));
        }
        Gl2::new([[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]])
    }

    pub fn to_imat(&self) -> IMat {
        IMat::from_array(self.0)
    }

    pub fn det(&self) -> i64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> i64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn neg(&self) -> Gl2 {
        Gl2([[-self.0[0][0], -self.0[0][1]], [-self.0[1][0], -self.0[1][1]]])
    }

    pub fn mul(&self, o: &Gl2) -> Gl2 {
        let (p, q) = (&self.0, &o.0);
        Gl2([
            [p[0][0] * q[0][0] + p[0][1] * q[1][0], p[0][0] * q[0][1] + p[0][1] * q[1][1]],
            [p[1][0] * q[0][0] + p[1][1] * q[1][0], p[1][0] * q[0][1] + p[1][1] * q[1][1]],
        ])
    }

    pub fn inverse(&self) -> Gl2 {
        let d = self.det();
        let m = &self.0;
        Gl2([[m[1][1] * d, -m[0][1] * d], [-m[1][0] * d, m[0][0] * d]])
    }

    pub fn pow(&self, k: i64) -> Gl2 {
        let b = if k < 0 { self.inverse() } else { *self };
        let mut out = Gl2::I;
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&b);
        }
        out
    }

    /// `C^-1 M C`.
    pub fn conjugate_by(&self, c: &Gl2) -> Gl2 {
        c.inverse().mul(self).mul(c)
    }

    pub fn is_scalar(&self) -> bool {
        self.0[0][1] == 0 && self.0[1][0] == 0 && self.0[0][0] == self.0[1][1]
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().flatten().map(|x| x.abs()).max().unwrap()
    }
}

impl fmt::Debug for Gl2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

pub fn to_gl2z(phi: &Automorphism) -> Result<Gl2> {
    if phi.rank() != 2 {
        return Err(CoreError::RankMismatch(phi.rank(), 2));
    }
    Gl2::from_imat(&phi.matrix())
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gl2Class {
    FiniteOrder(u32),
    /// `±` a nontrivial unipotent.
    UnipotentLike,
    /// Real eigenvalues off the unit circle.
    HyperbolicLike,
}

impl Gl2Class {
    pub fn is_finite(&self) -> bool {
        matches!(self, Gl2Class::FiniteOrder(_))
    }
}

pub fn classify(m: &Gl2) -> Gl2Class {
    for k in 1..=12u32 {
        if m.pow(k as i64) == Gl2::I {
            return Gl2Class::FiniteOrder(k);
        }
    }
    let (t, d) = (m.trace(), m.det());
    if d == 1 && t.abs() == 2 {
        Gl2Class::UnipotentLike
    } else {
        Gl2Class::HyperbolicLike
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "invariant", rename_all = "snake_case")]
pub enum Gl2Certificate {
    Determinant { left: i64, right: i64 },
    Trace { left: i64, right: i64 },
    /// Not conjugate in `GL(2, Z/m)`; rechecked by enumeration.
    Modular { modulus: i64 },
    /// Scalar matrices are only conjugate to themselves.
    Scalar,
    /// The determinant form on the intertwiner lattice misses `±1`.
    NoUnimodularIntertwiner { a: i128, b: i128, c: i128 },
}

fn mod_mat(m: &Gl2, p: i64) -> [[i64; 2]; 2] {
    let mut r = m.0;
    for row in r.iter_mut() {
        for x in row.iter_mut() {
            *x = x.rem_euclid(p);
        }
    }
    r
}

/// Conjugacy in `GL(2, Z/m)` by enumeration.
pub fn conjugate_mod(m: &Gl2, n: &Gl2, p: i64) -> bool {
    let (a, b) = (mod_mat(m, p), mod_mat(n, p));
    for c00 in 0..p {
        for c01 in 0..p {
            for c10 in 0..p {
                for c11 in 0..p {
                    let det = (c00 * c11 - c01 * c10).rem_euclid(p);
                    if (1..p).all(|k| (det * k) % p != 1) {
                        continue;
                    }
                    let c = [[c00, c01], [c10, c11]];
                    let ok = (0..2).all(|i| {
                        (0..2).all(|j| {
                            let mc: i64 = (0..2).map(|k| a[i][k] * c[k][j]).sum();
                            let cn: i64 = (0..2).map(|k| c[i][k] * b[k][j]).sum();
                            (mc - cn).rem_euclid(p) == 0
                        })
                    });
                    if ok {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Integer basis of `{C : MC = CN}`, as 2x2 matrices.
fn intertwiners(m: &Gl2, n: &Gl2) -> Vec<[[i64; 2]; 2]> {
    // unknowns (c00, c01, c10, c11); (MC - CN)_{ij} = sum_k M_ik C_kj - C_ik N_kj
    let mut rows = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            let mut r = vec![0i64; 4];
            for k in 0..2 {
                r[k * 2 + j] += m.0[i][k];
                r[i * 2 + k] -= n.0[k][j];
            }
            rows.push(r);
        }
    }
    integer_kernel(&IMat::from_rows(&rows))
        .into_iter()
        .map(|v| [[v[0], v[1]], [v[2], v[3]]])
        .collect()
}

fn det_form(c1: &[[i64; 2]; 2], c2: &[[i64; 2]; 2]) -> Form {
    let d = |m: [[i128; 2]; 2]| m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let cv = |m: &[[i64; 2]; 2]| [[m[0][0] as i128, m[0][1] as i128], [m[1][0] as i128, m[1][1] as i128]];
    let (p, q) = (cv(c1), cv(c2));
    let sum = [[p[0][0] + q[0][0], p[0][1] + q[0][1]], [p[1][0] + q[1][0], p[1][1] + q[1][1]]];
    let a = d(p);
    let c = d(q);
    let b = d(sum) - a - c;
    Form::new(a, b, c)
}

/// Decides `C^-1 M C = N` over `GL(2, Z)`.
pub fn gl2z_conjugate(m: &Gl2, n: &Gl2) -> Verdict<Gl2, Gl2Certificate> {
    if m.det() != n.det() {
        return Verdict::No(Gl2Certificate::Determinant { left: m.det(), right: n.det() });
    }
    if m.trace() != n.trace() {
        return Verdict::No(Gl2Certificate::Trace { left: m.trace(), right: n.trace() });
    }
    if m == n {
        return Verdict::Yes(Gl2::I);
    }
    if m.is_scalar() || n.is_scalar() {
        return Verdict::No(Gl2Certificate::Scalar);
    }
    for p in [2, 3, 4, 5] {
        if !conjugate_mod(m, n, p) {
            return Verdict::No(Gl2Certificate::Modular { modulus: p });
        }
    }
    let basis = intertwiners(m, n);
    let form = match basis.len() {
        2 => det_form(&basis[0], &basis[1]),
        1 => det_form(&basis[0], &[[0, 0], [0, 0]]),
        _ => return Verdict::Unknown(format!("intertwiner lattice of rank {}", basis.len())),
    };
    match form.represent_unit() {
        UnitSolve::Found { x, y, .. } => {
            let zero = [[0i64; 2]; 2];
            let c2 = basis.get(1).unwrap_or(&zero);
            let (x, y) = match (i64::try_from(x), i64::try_from(y)) {
                (Ok(x), Ok(y)) => (x, y),
                _ => return Verdict::Unknown("conjugator entries overflow".into()),
            };
            let mut c = [[0i64; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    match basis[0][i][j].checked_mul(x).zip(c2[i][j].checked_mul(y)).and_then(|(p, q)| p.checked_add(q)) {
                        Some(v) => c[i][j] = v,
                        None => return Verdict::Unknown("conjugator entries overflow".into()),
                    }
                }
            }
            let c = Gl2(c);
            debug_assert_eq!(c.det().abs(), 1);
            debug_assert_eq!(m.conjugate_by(&c), *n);
            Verdict::Yes(c)
        }
        UnitSolve::None => Verdict::No(Gl2Certificate::NoUnimodularIntertwiner { a: form.a, b: form.b, c: form.c }),
        UnitSolve::Overflow => Verdict::Unknown("form reduction overflow".into()),
    }
}

/// Coset representatives of `<M>` in the centralizer of `M` in `GL(2, Z)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralizerData {
    pub base: Gl2,
    pub generators: Vec<Gl2>,
    pub representatives: Vec<Gl2>,
}

fn gcd(a: i64, b: i64) -> i64 {
    crate::matrix::ext_gcd(a, b).0
}

/// Commutant `{xI + yM0}` generator `M0`, for non-scalar `M`.
fn commutant_generator(m: &Gl2) -> Gl2 {
    let (p, q, r) = (m.0[0][1], m.0[1][0], m.0[1][1] - m.0[0][0]);
    let g = gcd(gcd(p, q), r);
    Gl2([[0, p / g], [q / g, r / g]])
}

fn lin(x: i64, y: i64, m0: &Gl2) -> Gl2 {
    Gl2([[x + y * m0.0[0][0], y * m0.0[0][1]], [y * m0.0[1][0], x + y * m0.0[1][1]]])
}

pub fn centralizer_cosets(m: &Gl2) -> Result<CentralizerData> {
    let minus = Gl2::I.neg();
    match classify(m) {
        Gl2Class::FiniteOrder(_) => Err(CoreError::Unsupported("centralizer cosets need an infinite-order element".into())),
        Gl2Class::UnipotentLike => {
            let s = m.trace() / 2;
            let nil = Gl2([[s * m.0[0][0] - 1, s * m.0[0][1]], [s * m.0[1][0], s * m.0[1][1] - 1]]);
            let k = gcd(gcd(nil.0[0][0], nil.0[0][1]), gcd(nil.0[1][0], nil.0[1][1]));
            let n0 = Gl2(nil.0.map(|r| r.map(|x| x / k)));
            let unit = Gl2([[1 + n0.0[0][0], n0.0[0][1]], [n0.0[1][0], 1 + n0.0[1][1]]]);
            let mut reps = Vec::new();
            for i in 0..k {
                let r = unit.pow(i);
                reps.push(r);
                reps.push(r.neg());
            }
            Ok(CentralizerData { base: *m, generators: vec![minus, unit], representatives: reps })
        }
        Gl2Class::HyperbolicLike => {
            let eps = fundamental_root(m).ok_or_else(|| CoreError::Budget("fundamental unit search".into()))?;
            let (e, j) = eps;
            let mut reps = Vec::new();
            for i in 0..j {
                let r = e.pow(i as i64);
                reps.push(r);
                reps.push(r.neg());
            }
            Ok(CentralizerData { base: *m, generators: vec![minus, e], representatives: reps })
        }
    }
}

/// `(ε, j)` with `ε^j = ±M` and `j` maximal, `ε` in the commutant of `M`.
fn fundamental_root(m: &Gl2) -> Option<(Gl2, u32)> {
    let m0 = commutant_generator(m);
    let (t0, d0) = (m0.trace() as f64, m0.det() as f64);
    let disc0 = t0 * t0 - 4.0 * d0;
    let (l1, l2) = ((t0 + disc0.sqrt()) / 2.0, (t0 - disc0.sqrt()) / 2.0);
    // eigenvalues of M on the same eigenvectors: M = xI + yM0
    let (mx, my) = {
        // M - m00 I = g M0 restricted to off-diagonal data
        let g = if m0.0[0][1] != 0 {
            m.0[0][1] / m0.0[0][1]
        } else {
            m.0[1][0] / m0.0[1][0]
        };
        (m.0[0][0] as f64, g as f64)
    };
    let (e1, e2) = (mx + my * l1, mx + my * l2);
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let jmax = (e1.abs().max(e2.abs()).ln() / golden.ln()).floor().max(1.0) as u32 + 1;
    for j in (1..=jmax).rev() {
        let r1 = e1.abs().powf(1.0 / j as f64);
        let r2 = e2.abs().powf(1.0 / j as f64);
        for s1 in [1.0, -1.0] {
            for s2 in [1.0, -1.0] {
                let (f1, f2) = (s1 * r1, s2 * r2);
                let y = (f1 - f2) / (l1 - l2);
                let x = f1 - y * l1;
                if !(x.abs() < 1e6 && y.abs() < 1e6) {
                    continue;
                }
                let cand = lin(x.round() as i64, y.round() as i64, &m0);
                if cand.det().abs() != 1 {
                    continue;
                }
                let p = cand.pow(j as i64);
                if p == *m || p == m.neg() {
                    return Some((cand, j));
                }
            }
        }
    }
    None
}

/// Writes a unimodular matrix as an automorphism with that abelianization.
pub fn lift_matrix(m: &IMat) -> Result<Automorphism> {
    use crate::automorphism::elementary;
    let n = m.rows();
    if !m.is_unimodular() {
        return Err(CoreError::NotUnimodular);
    }
    let mut a: Vec<Vec<i64>> = m.to_rows();
    // elementary ops applied on the left, as automorphisms
    let mut ops: Vec<Automorphism> = Vec::new();
    let add = |a: &mut Vec<Vec<i64>>, ops: &mut Vec<Automorphism>, i: usize, j: usize, q: i64| {
        for k in 0..n {
            a[i][k] += q * a[j][k];
        }
        let t = elementary::right_transvection(n, i, j, q < 0);
        for _ in 0..q.unsigned_abs() {
            ops.push(t.clone());
        }
    };
    for c in 0..n {
        loop {
            let nz: Vec<usize> = (c..n).filter(|&i| a[i][c] != 0).collect();
            let p = *nz.iter().min_by_key(|&&i| a[i][c].abs()).expect("unimodular");
            if p != c {
                a.swap(p, c);
                ops.push(elementary::swap(n, p, c));
            }
            let mut done = true;
            for i in c + 1..n {
                if a[i][c] != 0 {
                    let q = a[i][c].div_euclid(a[c][c]);
                    add(&mut a, &mut ops, i, c, -q);
                    if a[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[c][c] < 0 {
            for k in 0..n {
                a[c][k] = -a[c][k];
            }
            ops.push(elementary::invert(n, c));
        }
    }
    for c in (0..n).rev() {
        for i in 0..c {
            let q = a[i][c];
            if q != 0 {
                add(&mut a, &mut ops, i, c, -q);
            }
        }
    }
    debug_assert_eq!(IMat::from_rows(&a), IMat::identity(n));
    // E_k ... E_1 M = I, so M = E_1^-1 ... E_k^-1
    let mut chi = Automorphism::identity(n);
    for e in &ops {
        chi = chi.then(&e.inverse());
    }
    debug_assert_eq!(chi.matrix(), *m);
    Ok(chi)
}

/// Reasons `φ^χ = ψ` has no solution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AutF2Certificate {
    OuterClass { certificate: Gl2Certificate },
    /// For every centralizer coset, the residual twisted problem has no solution.
    Twisted { cosets: Vec<TwistedNo> },
}

/// Decides whether `χ^-1 φ χ = ψ` for some `χ ∈ Aut(F_2)`.
pub fn aut_f2_conjugate(phi: &Automorphism, psi: &Automorphism, budget: &TwistedBudget) -> Verdict<Automorphism, AutF2Certificate> {
    let (m, n) = match (to_gl2z(phi), to_gl2z(psi)) {
        (Ok(m), Ok(n)) => (m, n),
        _ => return Verdict::Unknown("rank-2 input required".into()),
    };
    if phi == psi {
        return Verdict::Yes(Automorphism::identity(2));
    }
    let c = match gl2z_conjugate(&m, &n) {
        Verdict::Yes(c) => c,
        Verdict::No(cert) => return Verdict::No(AutF2Certificate::OuterClass { certificate: cert }),
        Verdict::Unknown(r) => return Verdict::Unknown(r),
    };
    if n.is_scalar() {
        return Verdict::Unknown("scalar outer class: orbit problem for the inner part".into());
    }
    let chi1 = lift_matrix(&c.to_imat()).expect("unimodular");
    let phi1 = phi.conjugate_by(&chi1);
    let w = psi.outer_difference(&phi1).expect("same outer class");
    let reps: Vec<Gl2> = match classify(&n) {
        Gl2Class::FiniteOrder(_) => finite_centralizer_cosets(&n),
        _ => match centralizer_cosets(&n) {
            Ok(d) => d.representatives,
            Err(e) => return Verdict::Unknown(e.to_string()),
        },
    };
    let mut nos = Vec::new();
    let mut unknown = None;
    for r in reps {
        let rho = lift_matrix(&r.to_imat()).expect("unimodular");
        let d = phi1.conjugate_by(&rho).outer_difference(&phi1).expect("centralizes in Out");
        // need w = (v φ1) d v^-1
        match twisted::twisted_conjugate(&phi1, &w, &d, budget) {
            Verdict::Yes(v) => {
                let chi = chi1.then(&rho).then(&Automorphism::inner(&v.inverse(), 2));
                if phi.conjugate_by(&chi) == *psi {
                    return Verdict::Yes(chi);
                }
                unknown = Some("witness failed verification".to_string());
            }
            Verdict::No(cert) => nos.push(cert),
            Verdict::Unknown(r) => unknown = Some(r),
        }
    }
    match unknown {
        Some(r) => Verdict::Unknown(r),
        None => Verdict::No(AutF2Certificate::Twisted { cosets: nos }),
    }
}

/// For non-scalar finite-order `M`: the centralizer is finite; return
/// representatives of its cosets modulo `<M>`.
pub fn finite_centralizer_cosets(m: &Gl2) -> Vec<Gl2> {
    let m0 = commutant_generator(m);
    let (t, d) = (m0.trace(), m0.det());
    let mut elems = Vec::new();
    // det(xI + yM0) = x^2 + t xy + d y^2 = ±1 forces |y| <= 2 here
    for y in -2i64..=2 {
        for target in [1i64, -1] {
            let disc = (t * y) * (t * y) - 4 * (d * y * y - target);
            if disc < 0 {
                continue;
            }
            let r = forms::isqrt(disc as i128) as i64;
            if r * r != disc {
                continue;
            }
            for num in [-t * y + r, -t * y - r] {
                if num % 2 == 0 {
                    let e = lin(num / 2, y, &m0);
                    if !elems.contains(&e) {
                        elems.push(e);
                    }
                }
            }
        }
    }
    let order = match classify(m) {
        Gl2Class::FiniteOrder(k) => k as i64,
        _ => unreachable!(),
    };
    let powers: Vec<Gl2> = (0..order).map(|k| m.pow(k)).collect();
    let mut reps: Vec<Gl2> = Vec::new();
    for e in elems {
        if !reps.iter().any(|r| powers.iter().any(|p| r.mul(p) == e)) {
            reps.push(e);
        }
    }
    reps
}

/// Root of `M = ±ε^j` exposed for callers that need the unit.
pub fn fundamental_unit(m: &Gl2) -> Option<(Gl2, u32)> {
    match classify(m) {
        Gl2Class::HyperbolicLike => fundamental_root(m),
        _ => None,
    }
}
