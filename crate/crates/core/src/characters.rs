//! Teichmüller characters χ_a, the Dwork additive character ψ, Gauss and Jacobi sums.
//!
//! `gauss_sum` returns the Frobenius trace −Σ χ_a(x)ψ(x), not the classical sum.

use crate::error::{Error, Result};
use crate::finite_geometry::FqElem;
use crate::local_field::{Ctx, PadicNumber};

/// χ_a(x) = ω(x)^a on 𝔽_q^*, extended to 𝔽_{q^n} through the norm.
#[derive(Clone, Debug)]
pub struct MultChar {
    ctx: Ctx,
    a: i64,
}

impl MultChar {
    pub fn new(ctx: &Ctx, a: i64) -> Self {
        let m = ctx.q() as i64 - 1;
        MultChar { ctx: ctx.clone(), a: a.rem_euclid(m) }
    }
    pub fn exponent(&self) -> i64 {
        self.a
    }
    pub fn mul(&self, other: &MultChar) -> MultChar {
        MultChar::new(&self.ctx, self.a + other.a)
    }
    pub fn inverse(&self) -> MultChar {
        MultChar::new(&self.ctx, -self.a)
    }
    pub fn is_trivial(&self) -> bool {
        self.a == 0
    }

    /// Value at a nonzero element of 𝔽_{q^n}.
    pub fn eval(&self, x: &FqElem, n: usize) -> Result<PadicNumber> {
        let fq = self.ctx.residue_ctx();
        let y = if n == 1 { x.clone() } else { fq.tower(n)?.norm(x) };
        self.eval_base(&y)
    }

    /// Value at a nonzero element of 𝔽_q.
    pub fn eval_base(&self, x: &FqElem) -> Result<PadicNumber> {
        if self.ctx.residue_field().is_zero(x) {
            return Err(Error::Domain("multiplicative character at 0".into()));
        }
        self.ctx.teichmuller(x).pow(self.a)
    }

    /// χ_a(−1) = ±1.
    pub fn at_minus_one(&self) -> PadicNumber {
        let minus_one = self.ctx.residue_field().from_int(-1);
        self.eval_base(&minus_one).expect("−1 is a unit")
    }
}

/// ψ_s(x) = ζ_p^{Tr(s·x)} with ζ_p = θ_π(1).
#[derive(Clone, Debug)]
pub struct AddChar {
    ctx: Ctx,
    s: FqElem,
}

impl AddChar {
    pub fn new(ctx: &Ctx, s: FqElem) -> Self {
        AddChar { ctx: ctx.clone(), s }
    }
    pub fn standard(ctx: &Ctx) -> Self {
        AddChar::new(ctx, ctx.residue_field().one())
    }
    pub fn is_trivial(&self) -> bool {
        self.ctx.residue_field().is_zero(&self.s)
    }

    /// Value at an element of 𝔽_{q^n}.
    pub fn eval(&self, x: &FqElem, n: usize) -> Result<PadicNumber> {
        let fq = self.ctx.residue_ctx();
        let t = fq.tower(n)?;
        let sx = t.ext().mul(&t.embed(&self.s), x);
        self.ctx.zeta_power(t.ext().abs_trace(&sx))
    }
}

pub fn mult_char_eval(chi: &MultChar, x: &FqElem, n: usize) -> Result<PadicNumber> {
    chi.eval(x, n)
}

pub fn add_char_eval(psi: &AddChar, x: &FqElem, n: usize) -> Result<PadicNumber> {
    psi.eval(x, n)
}

/// Π_{i<f} θ_π(ω(x)^{p^i}) for x ∈ 𝔽_q; equals ψ(x) by Dwork's splitting.
pub fn dwork_splitting_product(ctx: &Ctx, x: &FqElem) -> Result<PadicNumber> {
    let field = ctx.residue_field();
    let mut acc = ctx.one();
    let mut y = x.clone();
    for _ in 0..ctx.f() {
        acc = &acc * &ctx.dwork_theta(&ctx.teichmuller(&y))?;
        y = field.pow(&y, ctx.p());
    }
    Ok(acc)
}

/// −Σ_{x∈𝔽_q^*} χ_a(x)ψ(x).
pub fn gauss_sum(ctx: &Ctx, a: i64) -> Result<PadicNumber> {
    let field = ctx.residue_field();
    let chi = MultChar::new(ctx, a);
    let mut acc = ctx.zero();
    for x in field.elements().skip(1) {
        let term = &chi.eval_base(&x)? * &ctx.zeta_power(field.abs_trace(&x))?;
        acc = &acc + &term;
    }
    Ok(-acc)
}

/// −Σ_{x∈𝔽_{q^n}^*} χ_a(Nm x)ψ(Tr x), computed by running through powers of a generator.
pub fn gauss_sum_extension(ctx: &Ctx, a: i64, n: usize) -> Result<PadicNumber> {
    if n == 1 {
        return gauss_sum(ctx, a);
    }
    let table = ExtensionTable::new(ctx, n)?;
    table.gauss_sum(ctx, a)
}

/// `gauss_sum_extension(a, n)` for every a mod (q−1), sharing one pass over 𝔽_{q^n}.
pub fn gauss_sums_extension(ctx: &Ctx, n: usize) -> Result<Vec<PadicNumber>> {
    let q1 = ctx.q() as i64 - 1;
    if n == 1 {
        return (0..q1).map(|a| gauss_sum(ctx, a)).collect();
    }
    let table = ExtensionTable::new(ctx, n)?;
    (0..q1).map(|a| table.gauss_sum(ctx, a)).collect()
}

struct ExtensionTable {
    /// Σ_t #{k : k ≡ r mod (q−1), Tr g^k = t}·ζ^t, indexed by r.
    rows: Vec<PadicNumber>,
    norm_g: FqElem,
}

impl ExtensionTable {
    fn new(ctx: &Ctx, n: usize) -> Result<Self> {
        let tower = ctx.residue_ctx().tower(n)?;
        let ext = tower.ext();
        let q1 = ctx.q() - 1;
        let p = ctx.p() as usize;
        let g = tower.primitive().clone();
        let mut counts = vec![vec![0u64; p]; q1 as usize];
        let mut x = ext.one();
        for k in 0..ext.size() - 1 {
            counts[(k % q1) as usize][ext.abs_trace(&x) as usize] += 1;
            x = ext.mul(&x, &g);
        }
        let zeta: Vec<PadicNumber> = (0..p as u64).map(|t| ctx.zeta_power(t)).collect::<Result<_>>()?;
        let rows = counts
            .iter()
            .map(|row| {
                row.iter().enumerate().filter(|(_, &c)| c > 0).fold(ctx.zero(), |acc, (t, &c)| {
                    &acc + &(&zeta[t] * &ctx.from_int(c as i64))
                })
            })
            .collect();
        Ok(ExtensionTable { rows, norm_g: tower.norm(&g) })
    }

    fn gauss_sum(&self, ctx: &Ctx, a: i64) -> Result<PadicNumber> {
        let w = ctx.teichmuller(&self.norm_g).pow(a)?;
        let mut acc = ctx.zero();
        let mut wk = ctx.one();
        for row in &self.rows {
            acc = &acc + &(&wk * row);
            wk = &wk * &w;
        }
        Ok(-acc)
    }
}

/// Σ_{x≠0,1} χ_a(x)χ_b(1−x).
pub fn jacobi_sum(ctx: &Ctx, a: i64, b: i64) -> Result<PadicNumber> {
    let field = ctx.residue_field();
    let (ca, cb) = (MultChar::new(ctx, a), MultChar::new(ctx, b));
    let one = field.one();
    let mut acc = ctx.zero();
    for x in field.elements().skip(1) {
        if x == one {
            continue;
        }
        acc = &acc + &(&ca.eval_base(&x)? * &cb.eval_base(&field.sub(&one, &x))?);
    }
    Ok(acc)
}

/// Base-p digit sum of a nonnegative integer.
pub fn digit_sum(mut n: u64, p: u64) -> u64 {
    let mut s = 0;
    while n > 0 {
        s += n % p;
        n /= p;
    }
    s
}

/// π-adic valuation of `gauss_sum(a)`: the p-digit sum of (−a) mod (q−1).
pub fn stickelberger_valuation(ctx: &Ctx, a: i64) -> i64 {
    let q1 = ctx.q() as i64 - 1;
    digit_sum((-a).rem_euclid(q1) as u64, ctx.p()) as i64
}

#[derive(Clone, Debug)]
pub struct GrossKoblitzReport {
    pub a: i64,
    pub lhs: PadicNumber,
    pub rhs: PadicNumber,
    pub agree_digits: i64,
}

/// Compares `gauss_sum(a)` with π^{s(b)}·Π_{i<f} Γ_p(⟨p^i b/(q−1)⟩), b = (−a) mod (q−1).
pub fn gross_koblitz_check(ctx: &Ctx, a: i64) -> Result<GrossKoblitzReport> {
    let lhs = gauss_sum(ctx, a)?;
    let q1 = ctx.q() as i64 - 1;
    let b = (-a).rem_euclid(q1);
    let mut rhs = ctx.pi()?.pow(stickelberger_valuation(ctx, a))?;
    let mut num = b;
    for _ in 0..ctx.f() {
        rhs = &rhs * &ctx.padic_gamma(num, q1)?;
        num = (num * ctx.p() as i64) % q1;
    }
    let agree_digits = lhs.agree_digits(&rhs);
    Ok(GrossKoblitzReport { a, lhs, rhs, agree_digits })
}
