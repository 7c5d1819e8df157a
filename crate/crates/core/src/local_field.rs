//! Fixed-precision arithmetic in K = ℚ_q(π), π^(p−1) = −p.
//!
//! An element is stored as ϖ^val · w with w a unit of O_K. Here ϖ = π when π is
//! adjoined and ϖ = p otherwise. The unit is kept as f·e integer coefficients modulo
//! p^K in the basis T^i ϖ^j, where T is a root of the integer lift of the residue
//! modulus. Precision is counted in ϖ-digits.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;

use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::finite_geometry::{FiniteField, FqCtx, FqElem};

/// Extra p-adic digits stored beyond the working precision.
const STORAGE_GUARD: u32 = 8;

pub type Ctx = Arc<FieldCtx>;

#[derive(Debug)]
pub struct FieldCtx {
    p: u64,
    f: usize,
    use_pi: bool,
    n: i64,
    e: i64,
    k: u32,
    m: u64,
    /// ϖ^e = sigma · p.
    sigma_neg: bool,
    fq: Arc<FqCtx>,
    lifted_modulus: Vec<u64>,
    teich_table: OnceLock<Vec<Vec<u64>>>,
    dwork_coeffs: OnceLock<Vec<Vec<u64>>>,
    zeta_powers: OnceLock<Vec<Vec<u64>>>,
    gamma_block: OnceLock<GammaBlock>,
}

/// Builds a context for K = ℚ_q(π) (or ℚ_q when `use_pi` is false) at absolute precision `n` ϖ-digits.
pub fn make_context(p: u64, f: usize, use_pi: bool, n: i64) -> Result<Ctx> {
    if !crate::finite_geometry::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if f == 0 {
        return Err(Error::InvalidDegree(0));
    }
    if n < 1 {
        return Err(Error::InvalidPrecision(n));
    }
    let e = if use_pi { p as i64 - 1 } else { 1 };
    let needed = ceil_div(n, e) as u32 + 1;
    let mut k = needed + STORAGE_GUARD;
    while k >= needed && (p as u128).pow(k) >= 1u128 << 62 {
        k -= 1;
    }
    if k < needed {
        return Err(Error::PrecisionTooLarge);
    }
    let m = (p as u128).pow(k) as u64;
    let fq = Arc::new(FqCtx::new(p, f)?);
    let lifted_modulus = fq.field().modulus().to_vec();
    Ok(Arc::new(FieldCtx {
        p,
        f,
        use_pi,
        n,
        e,
        k,
        m,
        sigma_neg: use_pi,
        fq,
        lifted_modulus,
        teich_table: OnceLock::new(),
        dwork_coeffs: OnceLock::new(),
        zeta_powers: OnceLock::new(),
        gamma_block: OnceLock::new(),
    }))
}

pub(crate) fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse of a unit modulo m = p^K.
fn inv_unit_mod(a: u64, p: u64, m: u64) -> u64 {
    // phi(p^K) = p^K - p^(K-1)
    powmod(a, m - m / p - 1, m)
}

fn vp_u64(mut x: u64, p: u64, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v.min(cap)
}

fn bigint_mod(x: &BigInt, m: u64) -> u64 {
    num_integer::Integer::mod_floor(x, &BigInt::from(m)).to_u64().expect("reduced below modulus")
}

impl FieldCtx {
    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn f(&self) -> usize {
        self.f
    }
    pub fn q(&self) -> u64 {
        self.p.pow(self.f as u32)
    }
    pub fn use_pi(&self) -> bool {
        self.use_pi
    }
    /// Working precision in ϖ-digits.
    pub fn precision(&self) -> i64 {
        self.n
    }
    /// Ramification index.
    pub fn e(&self) -> i64 {
        self.e
    }
    pub fn residue_ctx(&self) -> &Arc<FqCtx> {
        &self.fq
    }
    pub fn residue_field(&self) -> &Arc<FiniteField> {
        self.fq.field()
    }
    fn dim(&self) -> usize {
        self.f * self.e as usize
    }
    fn rel_cap(&self) -> i64 {
        self.e * self.k as i64
    }

    // Raw O_K arithmetic on coefficient vectors indexed i*e + j for T^i ϖ^j.

    fn raw_zero(&self) -> Vec<u64> {
        vec![0; self.dim()]
    }
    fn raw_const(&self, c: u64) -> Vec<u64> {
        let mut v = self.raw_zero();
        v[0] = c % self.m;
        v
    }
    fn raw_add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.m).collect()
    }
    fn raw_neg(&self, a: &[u64]) -> Vec<u64> {
        a.iter().map(|&x| (self.m - x) % self.m).collect()
    }
    fn sigma_p(&self) -> u64 {
        if self.sigma_neg {
            self.m - self.p
        } else {
            self.p
        }
    }

    fn raw_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let (f, e, m) = (self.f, self.e as usize, self.m);
        let (tf, te) = (2 * f - 1, 2 * e - 1);
        let mut acc = vec![0u128; tf * te];
        for i1 in 0..f {
            for j1 in 0..e {
                let x = a[i1 * e + j1];
                if x == 0 {
                    continue;
                }
                for i2 in 0..f {
                    for j2 in 0..e {
                        let y = b[i2 * e + j2];
                        if y != 0 {
                            acc[(i1 + i2) * te + j1 + j2] += mulmod(x, y, m) as u128;
                        }
                    }
                }
            }
        }
        let mut c: Vec<u64> = acc.iter().map(|&v| (v % m as u128) as u64).collect();
        let sp = self.sigma_p();
        for i in 0..tf {
            for j in (e..te).rev() {
                let v = c[i * te + j];
                if v != 0 {
                    let t = &mut c[i * te + j - e];
                    *t = (*t + mulmod(v, sp, m)) % m;
                    c[i * te + j] = 0;
                }
            }
        }
        for i in (f..tf).rev() {
            for j in 0..e {
                let v = c[i * te + j];
                if v == 0 {
                    continue;
                }
                for (k, &mk) in self.lifted_modulus[..f].iter().enumerate() {
                    let t = &mut c[(i - f + k) * te + j];
                    *t = (*t + m - mulmod(v, mk, m)) % m;
                }
                c[i * te + j] = 0;
            }
        }
        let mut out = self.raw_zero();
        for i in 0..f {
            for j in 0..e {
                out[i * e + j] = c[i * te + j];
            }
        }
        out
    }

    fn raw_mul_uniformizer(&self, a: &[u64]) -> Vec<u64> {
        let e = self.e as usize;
        let mut out = self.raw_zero();
        let sp = self.sigma_p();
        for i in 0..self.f {
            for j in 0..e {
                let v = a[i * e + j];
                if j + 1 < e {
                    out[i * e + j + 1] = v;
                } else {
                    out[i * e] = mulmod(v, sp, self.m);
                }
            }
        }
        out
    }

    /// Exact division by ϖ of an element of positive valuation; the top stored digit becomes garbage.
    fn raw_div_uniformizer(&self, a: &[u64]) -> Vec<u64> {
        let e = self.e as usize;
        let mut out = self.raw_zero();
        for i in 0..self.f {
            for j in 1..e {
                out[i * e + j - 1] = a[i * e + j];
            }
            let c0 = a[i * e] / self.p;
            out[i * e + e - 1] = if self.sigma_neg { (self.m - c0) % self.m } else { c0 };
        }
        out
    }

    fn raw_valuation(&self, a: &[u64]) -> i64 {
        let e = self.e as usize;
        (0..e)
            .map(|j| {
                let v = (0..self.f).map(|i| vp_u64(a[i * e + j], self.p, self.k)).min().unwrap();
                self.e * v as i64 + j as i64
            })
            .min()
            .unwrap()
    }

    fn raw_residue(&self, a: &[u64]) -> FqElem {
        let e = self.e as usize;
        let rf = self.residue_field();
        let idx = (0..self.f).rev().fold(0u64, |acc, i| acc * self.p + a[i * e] % self.p);
        rf.from_index(idx)
    }

    fn raw_lift(&self, x: &FqElem) -> Vec<u64> {
        let e = self.e as usize;
        let mut out = self.raw_zero();
        for (i, &c) in x.coords().iter().enumerate() {
            out[i * e] = c;
        }
        out
    }

    fn raw_inv_unit(&self, a: &[u64]) -> Result<Vec<u64>> {
        let r = self.raw_residue(a);
        let rinv = self.residue_field().inv(&r)?;
        let mut y = self.raw_lift(&rinv);
        let two = self.raw_const(2);
        let mut correct = 1i64;
        while correct < self.rel_cap() {
            let t = self.raw_mul(a, &y);
            y = self.raw_mul(&y, &self.raw_add(&two, &self.raw_neg(&t)));
            correct *= 2;
        }
        Ok(y)
    }

    fn raw_pow(&self, a: &[u64], mut n: u64) -> Vec<u64> {
        let mut r = self.raw_const(1);
        let mut b = a.to_vec();
        while n > 0 {
            if n & 1 == 1 {
                r = self.raw_mul(&r, &b);
            }
            b = self.raw_mul(&b, &b);
            n >>= 1;
        }
        r
    }

    fn wrap(self: &Arc<Self>, val: i64, raw: Vec<u64>, prec: i64) -> PadicNumber {
        PadicNumber::normalize(self.clone(), val, raw, prec)
    }

    pub fn zero(self: &Arc<Self>) -> PadicNumber {
        self.zero_with_precision(self.n)
    }
    pub fn zero_with_precision(self: &Arc<Self>, prec: i64) -> PadicNumber {
        let prec = prec.min(self.n);
        PadicNumber { ctx: self.clone(), val: prec, unit: self.raw_zero(), prec }
    }
    pub fn one(self: &Arc<Self>) -> PadicNumber {
        self.from_int(1)
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> PadicNumber {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(self: &Arc<Self>, n: &BigInt) -> PadicNumber {
        if n.is_zero() {
            return self.zero();
        }
        let p = BigInt::from(self.p);
        let mut t = n.clone();
        let mut k = 0i64;
        while (&t % &p).is_zero() {
            t /= &p;
            k += 1;
        }
        // p^k = sigma^k ϖ^(ek)
        if self.sigma_neg && k % 2 == 1 {
            t = -t;
        }
        self.wrap(self.e * k, self.raw_const(bigint_mod(&t, self.m)), self.n)
    }

    /// The rational number num/den; the denominator may contain p.
    pub fn from_rational(self: &Arc<Self>, num: i64, den: i64) -> Result<PadicNumber> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        self.from_int(num).checked_div(&self.from_int(den))
    }

    /// q^k, exact to the working precision (negative k allowed).
    pub fn q_power(self: &Arc<Self>, k: i64) -> PadicNumber {
        let fk = self.f as i64 * k;
        let sign = if self.sigma_neg && fk.rem_euclid(2) == 1 { self.m - 1 } else { 1 };
        self.wrap(self.e * fk, self.raw_const(sign), self.n)
    }

    /// The element ϖ: π when adjoined, p otherwise.
    pub fn uniformizer(self: &Arc<Self>) -> PadicNumber {
        self.wrap(1, self.raw_const(1), self.n)
    }

    /// π itself; fails when π is not adjoined.
    pub fn pi(self: &Arc<Self>) -> Result<PadicNumber> {
        if !self.use_pi {
            return Err(Error::Domain("π is not adjoined in this context".into()));
        }
        Ok(self.uniformizer())
    }

    /// The integral lift Σ x_i T^i of a residue-field element (not the Teichmüller lift).
    pub fn lift(self: &Arc<Self>, x: &FqElem) -> PadicNumber {
        self.wrap(0, self.raw_lift(x), self.n)
    }

    fn teich_table(&self) -> &Vec<Vec<u64>> {
        self.teich_table.get_or_init(|| {
            let rf = self.residue_field();
            let q = rf.size();
            rf.elements()
                .map(|x| {
                    if rf.is_zero(&x) {
                        return self.raw_zero();
                    }
                    // Newton on y^(q-1) = 1.
                    let mut y = self.raw_lift(&x);
                    let qm1 = self.raw_const(q - 1);
                    let mut correct = 1i64;
                    while correct < self.rel_cap() {
                        let w = self.raw_pow(&y, q - 1);
                        let num = self.raw_mul(&y, &self.raw_add(&w, &self.raw_neg(&self.raw_const(1))));
                        let den = self.raw_inv_unit(&self.raw_mul(&qm1, &w)).expect("unit");
                        y = self.raw_add(&y, &self.raw_neg(&self.raw_mul(&num, &den)));
                        correct *= 2;
                    }
                    y
                })
                .collect()
        })
    }

    /// Teichmüller lift ω(x) of a residue-field element.
    pub fn teichmuller(self: &Arc<Self>, x: &FqElem) -> PadicNumber {
        let idx = self.residue_field().index(x) as usize;
        self.wrap(0, self.teich_table()[idx].clone(), self.n)
    }

    /// Number of Dwork-series coefficients kept: least n₀ with e·n₀·(p−1)/p² ≥ N.
    pub fn dwork_truncation(&self) -> usize {
        let p = self.p as i64;
        let num = self.n * p * p;
        let den = self.e * (p - 1);
        ceil_div(num, den) as usize
    }

    fn dwork_coeffs(&self) -> &Vec<Vec<u64>> {
        self.dwork_coeffs.get_or_init(|| {
            let count = self.dwork_truncation();
            let (p, m, e) = (self.p, self.m, self.e as usize);
            // b_i = π^i / i! = c_i π^(i mod e) with c_i = (−p)^⌊i/e⌋ / i! a p-adic integer.
            let mut c = Vec::with_capacity(count);
            let mut fact_unit = 1u64;
            let mut fact_val = 0u32;
            for i in 0..count {
                if i > 0 {
                    let mut t = i as u64;
                    while t.is_multiple_of(p) {
                        t /= p;
                        fact_val += 1;
                    }
                    fact_unit = mulmod(fact_unit, t % m, m);
                }
                let k = (i / e) as u32;
                let v = k - fact_val;
                let mut ci = if v < self.k { mulmod(p.pow(v), inv_unit_mod(fact_unit, p, m), m) } else { 0 };
                if k % 2 == 1 {
                    ci = (m - ci) % m;
                }
                c.push(ci);
            }
            let sp = self.sigma_p();
            (0..count)
                .map(|n| {
                    let mut raw = self.raw_zero();
                    let mut j = 0usize;
                    while p as usize * j <= n {
                        let i = n - p as usize * j;
                        let mut t = mulmod(c[i], c[j], m);
                        let mut r = i % e + j % e;
                        if r >= e {
                            r -= e;
                            t = mulmod(t, sp, m);
                        }
                        if j % 2 == 1 {
                            t = (m - t) % m;
                        }
                        raw[r] = (raw[r] + t) % m;
                        j += 1;
                    }
                    raw
                })
                .collect()
        })
    }

    /// θ_π(x) = exp(π(x − x^p)) at x = 0 or a Teichmüller lift.
    pub fn dwork_theta(self: &Arc<Self>, x: &PadicNumber) -> Result<PadicNumber> {
        if !self.use_pi {
            return Err(Error::Domain("θ_π needs π adjoined".into()));
        }
        if x.is_zero() {
            return Ok(self.one());
        }
        if x.val != 0 || !x.is_teichmuller() {
            return Err(Error::Domain("θ_π argument must be 0 or a Teichmüller lift".into()));
        }
        let coeffs = self.dwork_coeffs();
        let mut acc = self.raw_zero();
        for a in coeffs.iter().rev() {
            acc = self.raw_add(&self.raw_mul(&acc, &x.unit), a);
        }
        Ok(self.wrap(0, acc, x.prec))
    }

    fn zeta_powers(self: &Arc<Self>) -> Result<&Vec<Vec<u64>>> {
        if !self.use_pi {
            return Err(Error::Domain("additive character needs π adjoined".into()));
        }
        Ok(self.zeta_powers.get_or_init(|| {
            let zeta = self.dwork_theta(&self.one()).expect("θ_π(1) converges");
            let mut out = vec![self.raw_const(1)];
            for t in 1..self.p {
                out.push(self.raw_mul(&out[t as usize - 1], &zeta.unit));
            }
            out
        }))
    }

    /// ζ_p^t with ζ_p = θ_π(1).
    pub fn zeta_power(self: &Arc<Self>, t: u64) -> Result<PadicNumber> {
        let raw = self.zeta_powers()?[(t % self.p) as usize].clone();
        Ok(self.wrap(0, raw, self.n))
    }

    /// Morita's Γ_p at a rational argument with p-free denominator.
    pub fn padic_gamma(self: &Arc<Self>, num: i64, den: i64) -> Result<PadicNumber> {
        if den == 0 || den.rem_euclid(self.p as i64) == 0 {
            return Err(Error::Domain("Γ_p argument must have p-free denominator".into()));
        }
        let block = self.gamma_block();
        let mm = block.modulus;
        let d = (den.rem_euclid(mm as i64)) as u64;
        let n = mulmod(num.rem_euclid(mm as i64) as u64, inv_unit_mod(d, self.p, mm), mm);
        let prod = block.product_below(n, self.p);
        let g = if n % 2 == 1 { (mm - prod) % mm } else { prod };
        let trusted = block.trusted_digits as i64 * self.e;
        let mut raw = self.raw_zero();
        raw[0] = g % self.m;
        Ok(self.wrap(0, raw, trusted.min(self.n)))
    }

    fn gamma_block(&self) -> &GammaBlock {
        self.gamma_block.get_or_init(|| {
            let digits = ceil_div(self.n, self.e) as u32;
            let extra = if self.p == 2 { 1 } else { 0 };
            GammaBlock::new(self.p, digits + extra, digits)
        })
    }

    pub fn parse(self: &Arc<Self>, s: &str) -> Result<PadicNumber> {
        PadicNumber::parse(self, s)
    }
}

/// Block evaluation of Π_{j<n, p∤j} j modulo p^digits.
#[derive(Debug)]
struct GammaBlock {
    modulus: u64,
    trusted_digits: u32,
    block: u64,
    poly: Vec<u64>,
}

impl GammaBlock {
    fn new(p: u64, digits: u32, trusted_digits: u32) -> Self {
        let modulus = p.pow(digits);
        let root = (modulus as f64).sqrt() as u64;
        let block = (root / p + 1) * p;
        let deg = digits as usize;
        // Q(X) = Π_{0≤j<block, p∤j} (X + j) mod X^digits
        let mut poly = vec![0u64; deg];
        poly[0] = 1 % modulus;
        for j in 0..block {
            if j % p == 0 {
                continue;
            }
            for k in (0..deg).rev() {
                let shifted = if k > 0 { poly[k - 1] } else { 0 };
                poly[k] = (mulmod(poly[k], j, modulus) + shifted) % modulus;
            }
        }
        GammaBlock { modulus, trusted_digits, block, poly }
    }

    fn product_below(&self, n: u64, p: u64) -> u64 {
        let m = self.modulus;
        let mut acc = 1 % m;
        let full = n / self.block;
        for b in 0..full {
            let s = (b * self.block) % m;
            let v = self.poly.iter().rev().fold(0u64, |h, &c| (mulmod(h, s, m) + c) % m);
            acc = mulmod(acc, v, m);
        }
        for j in full * self.block..n {
            if j % p != 0 {
                acc = mulmod(acc, j % m, m);
            }
        }
        acc
    }
}

/// Element ϖ^val · unit of K, trusted modulo ϖ^prec.
#[derive(Clone)]
pub struct PadicNumber {
    ctx: Ctx,
    val: i64,
    unit: Vec<u64>,
    prec: i64,
}

impl PadicNumber {
    fn normalize(ctx: Ctx, val: i64, raw: Vec<u64>, prec: i64) -> PadicNumber {
        let prec = prec.min(ctx.n);
        let v = ctx.raw_valuation(&raw);
        if val + v >= prec || v >= ctx.rel_cap() {
            return ctx.zero_with_precision(prec);
        }
        let mut unit = raw;
        for _ in 0..v {
            unit = ctx.raw_div_uniformizer(&unit);
        }
        let val = val + v;
        let prec = prec.min(val + ctx.rel_cap() - v);
        PadicNumber { ctx, val, unit, prec }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    /// True when the element is zero modulo its known precision.
    pub fn is_zero(&self) -> bool {
        self.val >= self.prec
    }

    /// Valuation in ϖ-digits, or None for zero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }

    /// Valuation in p-adic normalization as (numerator, denominator) in lowest terms.
    pub fn valuation_rational(&self) -> Option<(i64, i64)> {
        self.valuation().map(|v| {
            let g = num_integer::gcd(v, self.ctx.e);
            (v / g, self.ctx.e / g)
        })
    }

    /// Absolute precision in ϖ-digits.
    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn with_precision(&self, prec: i64) -> PadicNumber {
        PadicNumber::normalize(self.ctx.clone(), self.val, self.unit.clone(), prec.min(self.prec))
    }

    fn same_ctx(&self, other: &PadicNumber) -> Result<()> {
        let (a, b) = (&self.ctx, &other.ctx);
        if Arc::ptr_eq(a, b) || (a.p == b.p && a.f == b.f && a.use_pi == b.use_pi && a.n == b.n) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    fn shifted_unit(&self, k: i64) -> Vec<u64> {
        let mut u = self.unit.clone();
        for _ in 0..k {
            u = self.ctx.raw_mul_uniformizer(&u);
        }
        u
    }

    pub fn checked_add(&self, other: &PadicNumber) -> Result<PadicNumber> {
        self.same_ctx(other)?;
        let prec = self.prec.min(other.prec);
        if other.is_zero() || other.val >= prec {
            return Ok(self.with_precision(prec));
        }
        if self.is_zero() || self.val >= prec {
            return Ok(other.with_precision(prec));
        }
        let s = self.val.min(other.val);
        let a = self.shifted_unit((self.val - s).min(prec - s));
        let b = other.shifted_unit((other.val - s).min(prec - s));
        Ok(PadicNumber::normalize(self.ctx.clone(), s, self.ctx.raw_add(&a, &b), prec))
    }

    pub fn checked_sub(&self, other: &PadicNumber) -> Result<PadicNumber> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &PadicNumber) -> Result<PadicNumber> {
        self.same_ctx(other)?;
        let va = if self.is_zero() { self.prec } else { self.val };
        let vb = if other.is_zero() { other.prec } else { other.val };
        let prec = (self.prec + vb).min(other.prec + va);
        if self.is_zero() || other.is_zero() {
            return Ok(self.ctx.zero_with_precision(prec));
        }
        let raw = self.ctx.raw_mul(&self.unit, &other.unit);
        Ok(PadicNumber::normalize(self.ctx.clone(), va + vb, raw, prec))
    }

    pub fn inv(&self) -> Result<PadicNumber> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let raw = self.ctx.raw_inv_unit(&self.unit)?;
        let rel = self.prec - self.val;
        Ok(PadicNumber::normalize(self.ctx.clone(), -self.val, raw, -self.val + rel))
    }

    pub fn checked_div(&self, other: &PadicNumber) -> Result<PadicNumber> {
        self.same_ctx(other)?;
        self.checked_mul(&other.inv()?)
    }

    fn neg_ref(&self) -> PadicNumber {
        PadicNumber { ctx: self.ctx.clone(), val: self.val, unit: self.ctx.raw_neg(&self.unit), prec: self.prec }
    }

    /// Integer power; negative exponents need a nonzero base.
    pub fn pow(&self, n: i64) -> Result<PadicNumber> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut r = self.ctx.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                r = &r * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        Ok(r)
    }

    /// Number of leading ϖ-digits on which two elements agree, capped at the smaller precision.
    pub fn agree_digits(&self, other: &PadicNumber) -> i64 {
        let cap = self.prec.min(other.prec);
        match self.checked_sub(other) {
            Ok(d) if d.is_zero() => cap,
            Ok(d) => d.val.min(cap),
            Err(_) => i64::MIN,
        }
    }

    /// Agreement up to min(precision) − guard digits.
    pub fn agrees(&self, other: &PadicNumber, guard: i64) -> bool {
        self.agree_digits(other) >= self.prec.min(other.prec) - guard
    }

    /// Reduction of a unit to the residue field.
    pub fn residue(&self) -> Result<FqElem> {
        if self.is_zero() || self.val != 0 {
            return Err(Error::Domain("residue of a non-unit".into()));
        }
        Ok(self.ctx.raw_residue(&self.unit))
    }

    /// True when the element is a Teichmüller lift (ω^q = ω) to known precision.
    pub fn is_teichmuller(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        match self.residue() {
            Ok(r) => self.agree_digits(&self.ctx.teichmuller(&r)) >= self.prec,
            Err(_) => false,
        }
    }

    /// Base-p digits d[l][i*e+j] of the unit part, truncated at the known precision.
    fn digit_table(&self) -> Vec<Vec<u64>> {
        if self.is_zero() {
            return Vec::new();
        }
        let ctx = &self.ctx;
        let e = ctx.e as usize;
        let rel = self.prec - self.val;
        let levels = ceil_div(rel, ctx.e) as usize;
        let mut table = vec![vec![0u64; ctx.dim()]; levels];
        for i in 0..ctx.f {
            for j in 0..e {
                let mut c = self.unit[i * e + j];
                for (l, row) in table.iter_mut().enumerate() {
                    if (l as i64) * ctx.e + (j as i64) < rel {
                        row[i * e + j] = c % ctx.p;
                    }
                    c /= ctx.p;
                }
            }
        }
        table
    }

    fn parse(ctx: &Ctx, s: &str) -> Result<PadicNumber> {
        let bad = |m: &str| Error::Parse(format!("{m} in {s:?}"));
        let tokens: Vec<&str> = s.trim().split(';').collect();
        if tokens.len() < 3 {
            return Err(bad("too few fields"));
        }
        let v = tokens[0].strip_prefix("v=").ok_or_else(|| bad("missing v="))?;
        let last = tokens[tokens.len() - 1];
        let prec: i64 =
            last.strip_prefix("prec=").ok_or_else(|| bad("missing prec="))?.parse().map_err(|_| bad("bad prec"))?;
        let mut levels: Vec<&str> = tokens[1..tokens.len() - 1].to_vec();
        levels[0] = levels[0].strip_prefix("digits=").ok_or_else(|| bad("missing digits="))?;
        if prec > ctx.n {
            return Err(bad("precision exceeds context"));
        }
        if v == "inf" {
            return Ok(ctx.zero_with_precision(prec));
        }
        let (a, b) = v.split_once('/').ok_or_else(|| bad("valuation must be a/b"))?;
        let a: i64 = a.parse().map_err(|_| bad("bad valuation"))?;
        let b: i64 = b.parse().map_err(|_| bad("bad valuation"))?;
        if b <= 0 || (a * ctx.e) % b != 0 {
            return Err(bad("valuation not in the value group"));
        }
        let val = a * ctx.e / b;
        let e = ctx.e as usize;
        let mut unit = ctx.raw_zero();
        for (l, level) in levels.iter().enumerate() {
            if level.is_empty() {
                continue;
            }
            let pl = (ctx.p as u128).pow(l as u32);
            for triple in level.split(',') {
                let parts: Vec<&str> = triple.split(':').collect();
                if parts.len() != 3 {
                    return Err(bad("digit triple"));
                }
                let i: usize = parts[0].parse().map_err(|_| bad("digit index"))?;
                let j: usize = parts[1].parse().map_err(|_| bad("digit index"))?;
                let d: u64 = parts[2].parse().map_err(|_| bad("digit value"))?;
                if i >= ctx.f || j >= e || d >= ctx.p || pl >= ctx.m as u128 {
                    return Err(bad("digit out of range"));
                }
                let slot = &mut unit[i * e + j];
                *slot = ((*slot as u128 + d as u128 * pl) % ctx.m as u128) as u64;
            }
        }
        if ctx.raw_valuation(&unit) != 0 && val < prec {
            return Err(bad("leading digit block is zero"));
        }
        Ok(PadicNumber::normalize(ctx.clone(), val, unit, prec))
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "v=inf;digits=;prec={}", self.prec);
        }
        let (a, b) = self.valuation_rational().expect("nonzero");
        let e = self.ctx.e as usize;
        let levels: Vec<String> = self
            .digit_table()
            .iter()
            .map(|row| {
                let mut parts = Vec::new();
                for i in 0..self.ctx.f {
                    for j in 0..e {
                        let d = row[i * e + j];
                        if d != 0 {
                            parts.push(format!("{i}:{j}:{d}"));
                        }
                    }
                }
                parts.join(",")
            })
            .collect();
        write!(f, "v={a}/{b};digits={};prec={}", levels.join(";"), self.prec)
    }
}

impl fmt::Debug for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialEq for PadicNumber {
    /// Equality to the smaller known precision.
    fn eq(&self, other: &Self) -> bool {
        self.agree_digits(other) >= self.prec.min(other.prec)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&PadicNumber> for &PadicNumber {
            type Output = PadicNumber;
            fn $method(self, rhs: &PadicNumber) -> PadicNumber {
                self.$checked(rhs).expect("operands share a context")
            }
        }
        impl $tr<PadicNumber> for PadicNumber {
            type Output = PadicNumber;
            fn $method(self, rhs: PadicNumber) -> PadicNumber {
                (&self).$checked(&rhs).expect("operands share a context")
            }
        }
    };
}
binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &PadicNumber {
    type Output = PadicNumber;
    fn neg(self) -> PadicNumber {
        self.neg_ref()
    }
}
impl Neg for PadicNumber {
    type Output = PadicNumber;
    fn neg(self) -> PadicNumber {
        self.neg_ref()
    }
}

/// Binary-operation selector for [`arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn arith(a: &PadicNumber, b: &PadicNumber, op: ArithOp) -> Result<PadicNumber> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
        ArithOp::Div => a.checked_div(b),
    }
}
