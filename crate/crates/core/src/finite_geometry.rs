//! Finite fields 𝔽_{p^m}, extension towers 𝔽_q ⊂ 𝔽_{q^n} with trace and norm,
//! and closed points of 𝔸¹ and ℙ¹ over 𝔽_q.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over 𝔽_p, constant term first.

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let top = r.len() - 1;
        let c = r[top] * lead_inv % p;
        let shift = top - dm;
        for (i, &mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * mi % p) % p;
        }
        trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(&prod, m, p)
}

fn poly_powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut b = poly_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mulmod(&result, &b, m, p);
        }
        b = poly_mulmod(&b, &b, m, p);
        e >>= 1;
    }
    result
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x + p - y) % p;
    }
    trim(&mut out);
    out
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Rabin's irreducibility test for a monic polynomial over 𝔽_p.
pub fn is_irreducible_fp(f: &[u64], p: u64) -> bool {
    let m = f.len() - 1;
    if m == 0 {
        return false;
    }
    if m == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let frob_iter = |k: usize| {
        let mut t = x.clone();
        for _ in 0..k {
            t = poly_powmod(&t, p, f, p);
        }
        t
    };
    if poly_sub(&frob_iter(m), &x, p).iter().any(|&c| c != 0) {
        return false;
    }
    for r in prime_factors(m as u64) {
        let t = frob_iter(m / r as usize);
        let g = poly_gcd(f, &poly_sub(&t, &x, p), p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Lexicographically least monic irreducible polynomial of degree `m` over 𝔽_p.
///
/// Candidates are ordered by the integer Σ c_i p^i of their non-leading coefficients.
pub fn least_irreducible(p: u64, m: usize) -> Vec<u64> {
    let count = p.pow(m as u32);
    for k in 0..count {
        let mut f = Vec::with_capacity(m + 1);
        let mut t = k;
        for _ in 0..m {
            f.push(t % p);
            t /= p;
        }
        f.push(1);
        if is_irreducible_fp(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Element of a finite field, as coordinates over 𝔽_p in the power basis of the defining modulus.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct FqElem(pub(crate) Vec<u64>);

impl FqElem {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

/// The field 𝔽_p[T]/(modulus).
#[derive(Debug)]
pub struct FiniteField {
    p: u64,
    degree: usize,
    modulus: Vec<u64>,
    size: u64,
    trace_basis: Vec<u64>,
}

impl FiniteField {
    pub fn new(p: u64, degree: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if degree == 0 {
            return Err(Error::InvalidDegree(0));
        }
        let size = (p as u128).pow(degree as u32);
        if size > u64::MAX as u128 / 4 {
            return Err(Error::FieldTooLarge);
        }
        let modulus = least_irreducible(p, degree);
        let mut field = FiniteField { p, degree, modulus, size: size as u64, trace_basis: Vec::new() };
        field.trace_basis = (0..degree)
            .map(|i| {
                let mut e = vec![0u64; degree];
                e[i] = 1;
                let mut x = FqElem(e);
                let mut acc = field.zero();
                for _ in 0..degree {
                    acc = field.add(&acc, &x);
                    x = field.pow(&x, p);
                }
                acc.0[0]
            })
            .collect();
        Ok(field)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn size(&self) -> u64 {
        self.size
    }
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FqElem {
        FqElem(vec![0; self.degree])
    }
    pub fn one(&self) -> FqElem {
        self.from_int(1)
    }
    pub fn from_int(&self, n: i64) -> FqElem {
        let mut v = vec![0; self.degree];
        v[0] = n.rem_euclid(self.p as i64) as u64;
        FqElem(v)
    }
    /// The class of T.
    pub fn gen(&self) -> FqElem {
        if self.degree == 1 {
            // T is the root of the modulus X - c.
            return FqElem(vec![(self.p - self.modulus[0]) % self.p]);
        }
        let mut v = vec![0; self.degree];
        v[1] = 1;
        FqElem(v)
    }

    /// Element with base-p digits of `idx` as coordinates.
    pub fn from_index(&self, mut idx: u64) -> FqElem {
        let mut v = vec![0; self.degree];
        for c in v.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        FqElem(v)
    }
    pub fn index(&self, x: &FqElem) -> u64 {
        x.0.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }
    pub fn elements(&self) -> impl Iterator<Item = FqElem> + '_ {
        (0..self.size).map(|i| self.from_index(i))
    }

    pub fn is_zero(&self, x: &FqElem) -> bool {
        x.0.iter().all(|&c| c == 0)
    }
    pub fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        FqElem(a.0.iter().zip(&b.0).map(|(&x, &y)| (x + y) % self.p).collect())
    }
    pub fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        FqElem(a.0.iter().zip(&b.0).map(|(&x, &y)| (x + self.p - y) % self.p).collect())
    }
    pub fn neg(&self, a: &FqElem) -> FqElem {
        FqElem(a.0.iter().map(|&x| (self.p - x) % self.p).collect())
    }
    pub fn scale(&self, a: &FqElem, k: u64) -> FqElem {
        FqElem(a.0.iter().map(|&x| x * (k % self.p) % self.p).collect())
    }
    pub fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let m = self.degree;
        let p = self.p;
        if m == 1 {
            return FqElem(vec![a.0[0] * b.0[0] % p]);
        }
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        for k in (m..2 * m - 1).rev() {
            let c = prod[k] % p;
            if c != 0 {
                for i in 0..m {
                    prod[k - m + i] += (p - self.modulus[i]) * c;
                }
            }
            prod[k] = 0;
        }
        FqElem(prod[..m].iter().map(|&c| c % p).collect())
    }
    pub fn pow(&self, a: &FqElem, mut e: u64) -> FqElem {
        let mut r = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        r
    }
    pub fn inv(&self, a: &FqElem) -> Result<FqElem> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.size - 2))
    }

    /// Absolute trace to 𝔽_p, as an integer in [0, p).
    pub fn abs_trace(&self, x: &FqElem) -> u64 {
        x.0.iter().zip(&self.trace_basis).fold(0, |acc, (&c, &t)| (acc + c * t) % self.p)
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, x: &FqElem) -> u64 {
        let mut n = self.size - 1;
        for r in prime_factors(self.size - 1) {
            while n.is_multiple_of(r) && self.pow(x, n / r) == self.one() {
                n /= r;
            }
        }
        n
    }

    /// Smallest-index generator of the multiplicative group.
    pub fn primitive_element(&self) -> FqElem {
        let factors = prime_factors(self.size - 1);
        (1..self.size)
            .map(|i| self.from_index(i))
            .find(|g| factors.iter().all(|&r| self.pow(g, (self.size - 1) / r) != self.one()))
            .expect("multiplicative group is cyclic")
    }
}

/// 𝔽_q ⊂ 𝔽_{q^n}, with the base embedded through a fixed root of its modulus.
#[derive(Debug)]
pub struct Tower {
    base: Arc<FiniteField>,
    ext: Arc<FiniteField>,
    n: usize,
    image_of_gen: FqElem,
    pullback: HashMap<FqElem, FqElem>,
    primitive: FqElem,
}

impl Tower {
    fn new(base: Arc<FiniteField>, n: usize) -> Result<Self> {
        let ext = if n == 1 { base.clone() } else { Arc::new(FiniteField::new(base.p(), base.degree() * n)?) };
        let primitive = ext.primitive_element();
        let image_of_gen = if n == 1 {
            base.gen()
        } else {
            let q = base.size();
            let h = ext.pow(&primitive, (ext.size() - 1) / (q - 1));
            let eval = |x: &FqElem| {
                let mut acc = ext.zero();
                for &c in base.modulus().iter().rev() {
                    acc = ext.add(&ext.mul(&acc, x), &ext.from_int(c as i64));
                }
                acc
            };
            let zero = ext.zero();
            if ext.is_zero(&eval(&zero)) {
                zero
            } else {
                let mut x = ext.one();
                loop {
                    if ext.is_zero(&eval(&x)) {
                        break x;
                    }
                    x = ext.mul(&x, &h);
                }
            }
        };
        let mut tower = Tower { base, ext, n, image_of_gen, pullback: HashMap::new(), primitive };
        let pullback = tower.base.elements().map(|x| (tower.embed(&x), x)).collect();
        tower.pullback = pullback;
        Ok(tower)
    }

    pub fn base(&self) -> &Arc<FiniteField> {
        &self.base
    }
    pub fn ext(&self) -> &Arc<FiniteField> {
        &self.ext
    }
    pub fn degree(&self) -> usize {
        self.n
    }
    /// A generator of 𝔽_{q^n}^*.
    pub fn primitive(&self) -> &FqElem {
        &self.primitive
    }

    pub fn embed(&self, x: &FqElem) -> FqElem {
        let e = &self.ext;
        let mut acc = e.zero();
        for &c in x.0.iter().rev() {
            acc = e.add(&e.mul(&acc, &self.image_of_gen), &e.from_int(c as i64));
        }
        acc
    }

    /// Inverse of `embed` on its image.
    pub fn pull_back(&self, y: &FqElem) -> Result<FqElem> {
        self.pullback.get(y).cloned().ok_or(Error::NotInSubfield)
    }

    pub fn frobenius(&self, x: &FqElem) -> FqElem {
        self.ext.pow(x, self.base.size())
    }

    /// Relative trace Σ x^{q^i} down to 𝔽_q.
    pub fn trace(&self, x: &FqElem) -> FqElem {
        let e = &self.ext;
        let mut acc = e.zero();
        let mut y = x.clone();
        for _ in 0..self.n {
            acc = e.add(&acc, &y);
            y = self.frobenius(&y);
        }
        self.pull_back(&acc).expect("trace lands in the base field")
    }

    /// Relative norm Π x^{q^i} down to 𝔽_q.
    pub fn norm(&self, x: &FqElem) -> FqElem {
        let e = &self.ext;
        let mut acc = e.one();
        let mut y = x.clone();
        for _ in 0..self.n {
            acc = e.mul(&acc, &y);
            y = self.frobenius(&y);
        }
        self.pull_back(&acc).expect("norm lands in the base field")
    }
}

/// Target of `trace_norm`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subfield {
    Base,
    Prime,
}

/// The residue field 𝔽_q with its cached extension towers.
#[derive(Debug)]
pub struct FqCtx {
    base: Arc<FiniteField>,
    towers: Mutex<HashMap<usize, Arc<Tower>>>,
}

impl FqCtx {
    pub fn new(p: u64, f: usize) -> Result<Self> {
        Ok(FqCtx { base: Arc::new(FiniteField::new(p, f)?), towers: Mutex::new(HashMap::new()) })
    }
    pub fn field(&self) -> &Arc<FiniteField> {
        &self.base
    }
    pub fn p(&self) -> u64 {
        self.base.p()
    }
    pub fn f(&self) -> usize {
        self.base.degree()
    }
    pub fn q(&self) -> u64 {
        self.base.size()
    }

    pub fn tower(&self, n: usize) -> Result<Arc<Tower>> {
        if n == 0 {
            return Err(Error::InvalidDegree(0));
        }
        if let Some(t) = self.towers.lock().unwrap().get(&n) {
            return Ok(t.clone());
        }
        let t = Arc::new(Tower::new(self.base.clone(), n)?);
        Ok(self.towers.lock().unwrap().entry(n).or_insert(t).clone())
    }

    /// Trace or norm of x ∈ 𝔽_{q^n} to the base field or to 𝔽_p (returned as an element of 𝔽_q).
    pub fn trace_norm(&self, x: &FqElem, n: usize, norm: bool, target: Subfield) -> Result<FqElem> {
        let t = self.tower(n)?;
        if x.0.len() != t.ext().degree() {
            return Err(Error::NotInSubfield);
        }
        let down = if norm { t.norm(x) } else { t.trace(x) };
        Ok(match target {
            Subfield::Base => down,
            Subfield::Prime => {
                let b = &self.base;
                let v = if norm {
                    let mut acc = b.one();
                    let mut y = down;
                    for _ in 0..b.degree() {
                        acc = b.mul(&acc, &y);
                        y = b.pow(&y, b.p());
                    }
                    acc.0[0]
                } else {
                    b.abs_trace(&down)
                };
                b.from_int(v as i64)
            }
        })
    }

    /// All closed points of ℙ¹ of degree ≤ `max_degree`, finite ones first by degree, then ∞.
    pub fn closed_points(&self, max_degree: usize) -> Result<Vec<ClosedPoint>> {
        let mut out: Vec<ClosedPoint> =
            self.closed_points_with_roots(max_degree)?.into_iter().map(|(x, _)| x).collect();
        out.push(ClosedPoint::infinity());
        Ok(out)
    }

    /// Finite closed points of degree ≤ `max_degree` together with one root in 𝔽_{q^deg}.
    pub fn closed_points_with_roots(&self, max_degree: usize) -> Result<Vec<(ClosedPoint, FqElem)>> {
        let mut out = Vec::new();
        for d in 1..=max_degree {
            let t = self.tower(d)?;
            let e = t.ext();
            let mut found: Vec<(Vec<u64>, ClosedPoint, FqElem)> = Vec::new();
            let mut seen = vec![false; e.size() as usize];
            for idx in 0..e.size() {
                if seen[idx as usize] {
                    continue;
                }
                let x = e.from_index(idx);
                let mut orbit = vec![x.clone()];
                let mut y = t.frobenius(&x);
                while y != x {
                    orbit.push(y.clone());
                    y = t.frobenius(&y);
                }
                for z in &orbit {
                    seen[e.index(z) as usize] = true;
                }
                if orbit.len() != d {
                    continue;
                }
                let poly = orbit_polynomial(&t, &orbit);
                let key: Vec<u64> = poly.iter().rev().map(|c| self.base.index(c)).collect();
                found.push((key, ClosedPoint::finite(poly), x));
            }
            found.sort_by(|a, b| a.0.cmp(&b.0));
            out.extend(found.into_iter().map(|(_, p, r)| (p, r)));
        }
        Ok(out)
    }

    /// The deg(x) roots of a finite closed point inside 𝔽_{q^n}.
    pub fn residues_of_point(&self, x: &ClosedPoint, n: usize) -> Result<Vec<FqElem>> {
        let poly = match &x.kind {
            PointKind::Infinity => return Err(Error::InfinityNotAllowed),
            PointKind::Finite(poly) => poly,
        };
        let d = x.degree;
        if n == 0 || !n.is_multiple_of(d) {
            return Err(Error::InvalidDegree(n));
        }
        let t = self.tower(n)?;
        let e = t.ext();
        let coeffs: Vec<FqElem> = poly.iter().map(|c| t.embed(c)).collect();
        let eval = |y: &FqElem| {
            let mut acc = e.zero();
            for c in coeffs.iter().rev() {
                acc = e.add(&e.mul(&acc, y), c);
            }
            acc
        };
        let zero = e.zero();
        let root = if e.is_zero(&eval(&zero)) {
            zero
        } else {
            let sub_size = self.q().pow(d as u32);
            let h = e.pow(t.primitive(), (e.size() - 1) / (sub_size - 1));
            let mut y = e.one();
            loop {
                if e.is_zero(&eval(&y)) {
                    break y;
                }
                y = e.mul(&y, &h);
            }
        };
        let mut roots = vec![root.clone()];
        let mut y = t.frobenius(&root);
        while y != root {
            roots.push(y.clone());
            y = t.frobenius(&y);
        }
        Ok(roots)
    }

    /// Evaluates a polynomial over 𝔽_q (constant term first) at y ∈ 𝔽_{q^n}.
    pub fn eval_poly(&self, poly: &[FqElem], y: &FqElem, n: usize) -> Result<FqElem> {
        let t = self.tower(n)?;
        let e = t.ext();
        let mut acc = e.zero();
        for c in poly.iter().rev() {
            acc = e.add(&e.mul(&acc, y), &t.embed(c));
        }
        Ok(acc)
    }

    /// Parses the textual form of a closed point.
    pub fn parse_point(&self, s: &str) -> Result<ClosedPoint> {
        let s = s.trim();
        if s == "inf" {
            return Ok(ClosedPoint::infinity());
        }
        let coeffs: Vec<FqElem> = s
            .split(',')
            .map(|t| {
                let v: u64 = t.trim().parse().map_err(|_| Error::Parse(format!("bad coefficient {t:?}")))?;
                if v >= self.q() {
                    return Err(Error::Parse(format!("coefficient {v} out of range")));
                }
                Ok(self.base.from_index(v))
            })
            .collect::<Result<_>>()?;
        if coeffs.len() < 2 || coeffs.last() != Some(&self.base.one()) {
            return Err(Error::Parse("closed point polynomial must be monic of degree ≥ 1".into()));
        }
        let d = coeffs.len() - 1;
        let pt = ClosedPoint::finite(coeffs);
        if self.residues_of_point(&pt, d).map(|r| r.len() != d).unwrap_or(true) {
            return Err(Error::Parse("closed point polynomial is not irreducible".into()));
        }
        Ok(pt)
    }

    pub fn format_point(&self, x: &ClosedPoint) -> String {
        match &x.kind {
            PointKind::Infinity => "inf".to_string(),
            PointKind::Finite(poly) => {
                poly.iter().map(|c| self.base.index(c).to_string()).collect::<Vec<_>>().join(",")
            }
        }
    }
}

fn orbit_polynomial(t: &Tower, orbit: &[FqElem]) -> Vec<FqElem> {
    let e = t.ext();
    let mut poly = vec![e.one()];
    for r in orbit {
        let mut next = vec![e.zero(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] = e.add(&next[i + 1], c);
            next[i] = e.sub(&next[i], &e.mul(c, r));
        }
        poly = next;
    }
    poly.iter().map(|c| t.pull_back(c).expect("orbit polynomial is defined over the base")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PointKind {
    /// Monic irreducible polynomial over 𝔽_q, constant term first.
    Finite(Vec<FqElem>),
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClosedPoint {
    pub kind: PointKind,
    pub degree: usize,
}

impl ClosedPoint {
    pub fn finite(poly: Vec<FqElem>) -> Self {
        let degree = poly.len() - 1;
        ClosedPoint { kind: PointKind::Finite(poly), degree }
    }
    pub fn infinity() -> Self {
        ClosedPoint { kind: PointKind::Infinity, degree: 1 }
    }
    /// The rational point x = s.
    pub fn rational(field: &FiniteField, s: &FqElem) -> Self {
        ClosedPoint::finite(vec![field.neg(s), field.one()])
    }
    pub fn is_infinity(&self) -> bool {
        matches!(self.kind, PointKind::Infinity)
    }
    /// The coordinate s of a rational finite point.
    pub fn rational_coordinate(&self, field: &FiniteField) -> Option<FqElem> {
        match &self.kind {
            PointKind::Finite(poly) if poly.len() == 2 => Some(field.neg(&poly[0])),
            _ => None,
        }
    }
}

impl fmt::Display for ClosedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            PointKind::Infinity => write!(f, "inf"),
            PointKind::Finite(poly) => {
                let parts: Vec<String> = poly.iter().map(|c| format!("{:?}", c.0)).collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mobius(n: u64) -> i64 {
        let mut n = n;
        let mut k = 0;
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                n /= d;
                if n.is_multiple_of(d) {
                    return 0;
                }
                k += 1;
            }
            d += 1;
        }
        if n > 1 {
            k += 1;
        }
        if k % 2 == 0 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn least_irreducibles() {
        assert_eq!(least_irreducible(2, 2), vec![1, 1, 1]);
        assert_eq!(least_irreducible(5, 1), vec![0, 1]);
        assert_eq!(least_irreducible(3, 2), vec![1, 0, 1]);
        assert!(!is_irreducible_fp(&[1, 0, 1], 5));
        assert!(!is_irreducible_fp(&[0, 0, 1], 7));
    }

    #[test]
    fn f4_trace_of_generator() {
        let ctx = FqCtx::new(2, 1).unwrap();
        let t = ctx.tower(2).unwrap();
        let g = t.ext().gen();
        assert_eq!(t.ext().order(&g), 3);
        let tr = ctx.trace_norm(&g, 2, false, Subfield::Base).unwrap();
        assert_eq!(tr, ctx.field().one());
    }

    #[test]
    fn identity_tower_and_zero() {
        let ctx = FqCtx::new(3, 2).unwrap();
        let f = ctx.field().clone();
        for x in f.elements() {
            assert_eq!(ctx.trace_norm(&x, 1, false, Subfield::Base).unwrap(), x);
        }
        let z = ctx.tower(3).unwrap().ext().zero();
        assert_eq!(ctx.trace_norm(&z, 3, true, Subfield::Base).unwrap(), f.zero());
        assert_eq!(ctx.trace_norm(&z, 3, false, Subfield::Prime).unwrap(), f.zero());
    }

    #[test]
    fn point_counts() {
        let ctx = FqCtx::new(3, 1).unwrap();
        let pts = ctx.closed_points(1).unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(ctx.format_point(&pts[0]), "0,1");
        assert_eq!(ctx.format_point(&pts[3]), "inf");
        let ctx2 = FqCtx::new(2, 1).unwrap();
        let pts = ctx2.closed_points(2).unwrap();
        let names: Vec<String> = pts.iter().map(|x| ctx2.format_point(x)).collect();
        assert_eq!(names, vec!["0,1", "1,1", "1,1,1", "inf"]);
        let cubics = ctx2.closed_points(3).unwrap().iter().filter(|x| x.degree == 3).count();
        assert_eq!(cubics, 2);
    }

    #[test]
    fn necklace_and_orbit_partition() {
        for (p, f, dmax) in [(2, 1, 6), (3, 1, 4), (2, 2, 3), (5, 1, 3), (3, 2, 2)] {
            let ctx = FqCtx::new(p, f).unwrap();
            let q = ctx.q();
            let pts = ctx.closed_points(dmax).unwrap();
            for d in 1..=dmax as u64 {
                let expected: i64 = (1..=d)
                    .filter(|e| d % e == 0)
                    .map(|e| mobius(e) * (q.pow((d / e) as u32) as i64))
                    .sum::<i64>()
                    / d as i64;
                let got = pts.iter().filter(|x| !x.is_infinity() && x.degree as u64 == d).count();
                assert_eq!(got as i64, expected, "q={q} d={d}");
            }
            for n in 1..=dmax {
                let t = ctx.tower(n).unwrap();
                let mut covered = vec![0u32; t.ext().size() as usize];
                let mut total = 0;
                for x in pts.iter().filter(|x| !x.is_infinity() && n % x.degree == 0) {
                    total += x.degree;
                    for r in ctx.residues_of_point(x, n).unwrap() {
                        covered[t.ext().index(&r) as usize] += 1;
                    }
                }
                assert_eq!(total as u64, q.pow(n as u32));
                assert!(covered.iter().all(|&c| c == 1));
            }
        }
    }

    #[test]
    fn roots_of_quadratic_over_f2() {
        let ctx = FqCtx::new(2, 1).unwrap();
        let quad = ctx.closed_points(2).unwrap().into_iter().find(|x| x.degree == 2).unwrap();
        let roots = ctx.residues_of_point(&quad, 2).unwrap();
        let e = ctx.tower(2).unwrap().ext().clone();
        assert_eq!(roots.len(), 2);
        assert_eq!(e.mul(&roots[0], &roots[0]), roots[1]);
        for r in &roots {
            let v = ctx.eval_poly(match &quad.kind {
                PointKind::Finite(p) => p,
                _ => unreachable!(),
            }, r, 2).unwrap();
            assert!(e.is_zero(&v));
        }
        let x = ClosedPoint::rational(ctx.field(), &ctx.field().zero());
        assert_eq!(ctx.residues_of_point(&x, 3).unwrap(), vec![ctx.tower(3).unwrap().ext().zero()]);
        assert!(ctx.residues_of_point(&ClosedPoint::infinity(), 1).is_err());
    }

    #[test]
    fn trace_transitivity() {
        let ctx = FqCtx::new(3, 2).unwrap();
        let t = ctx.tower(2).unwrap();
        for idx in (0..t.ext().size()).step_by(7) {
            let x = t.ext().from_index(idx);
            let direct = t.ext().abs_trace(&x);
            let via = ctx.field().abs_trace(&t.trace(&x));
            assert_eq!(direct, via);
        }
    }

    #[test]
    fn point_text_round_trip() {
        let ctx = FqCtx::new(5, 1).unwrap();
        for x in ctx.closed_points(2).unwrap() {
            let s = ctx.format_point(&x);
            assert_eq!(ctx.parse_point(&s).unwrap(), x);
        }
        assert!(ctx.parse_point("1,0,1").is_err());
    }
}
