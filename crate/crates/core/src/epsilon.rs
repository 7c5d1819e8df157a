//! Local epsilon factors of rank-one objects: ε♮ as a finite Tate sum, ε♯, the dévissage
//! over holonomic local objects, and the determinant-formula check.

use std::fmt;

use crate::characters::AddChar;
use crate::error::{Error, Result};
use crate::finite_geometry::{ClosedPoint, FiniteField, FqElem, PointKind};
use crate::local_field::{make_context, Ctx, PadicNumber};
use crate::local_modules::{
    local_fourier, rec_eval, wd_char, Boundary, HolonomicLocalObject, LaurentJet, PunctualModule, RankOneLocalModule,
    Summand, WeilDeligneChar,
};

/// Extra ϖ-digits carried beyond the target precision: enough for q^{±2} and a few divisions.
pub fn precision_guard(p: u64, f: usize) -> i64 {
    2 * f as i64 * (p as i64 - 1) + 4
}

/// Context with π adjoined, carrying `target` digits plus [`precision_guard`].
pub fn working_context(p: u64, f: usize, target: i64) -> Result<Ctx> {
    make_context(p, f, true, target + precision_guard(p, f))
}

/// Digits two sides must share for a check at `target` digits to pass.
pub fn required_digits(target: i64) -> i64 {
    target - 4
}

/// Result of comparing two computed sides of an identity.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub lhs: PadicNumber,
    pub rhs: PadicNumber,
    pub agree_digits: i64,
    pub required_digits: i64,
    pub pass: bool,
}

impl Comparison {
    pub fn new(lhs: PadicNumber, rhs: PadicNumber, required_digits: i64) -> Self {
        let agree_digits = lhs.agree_digits(&rhs);
        Comparison { pass: agree_digits >= required_digits, lhs, rhs, agree_digits, required_digits }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{{lhs={}, rhs={}, agree_digits={}, required_digits={}, pass={}}}",
            self.lhs, self.rhs, self.agree_digits, self.required_digits, self.pass
        )
    }
}

// Polynomials over 𝔽_q, constant term first, no trailing zeros (the zero polynomial is empty).

pub(crate) fn poly_trim(field: &FiniteField, mut p: Vec<FqElem>) -> Vec<FqElem> {
    while p.last().is_some_and(|c| field.is_zero(c)) {
        p.pop();
    }
    p
}

pub(crate) fn poly_divrem(field: &FiniteField, a: &[FqElem], b: &[FqElem]) -> Result<(Vec<FqElem>, Vec<FqElem>)> {
    let b = poly_trim(field, b.to_vec());
    let lead_inv = field.inv(b.last().ok_or(Error::DivisionByZero)?)?;
    let mut r = poly_trim(field, a.to_vec());
    if r.len() < b.len() {
        return Ok((Vec::new(), r));
    }
    let mut q = vec![field.zero(); r.len() + 1 - b.len()];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = field.mul(r.last().unwrap(), &lead_inv);
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] = field.sub(&r[shift + i], &field.mul(&c, bi));
        }
        q[shift] = c;
        r = poly_trim(field, r);
    }
    Ok((q, r))
}

/// Coefficients of p(s + u) as a polynomial in u.
fn poly_shift(field: &FiniteField, p: &[FqElem], s: &FqElem) -> Vec<FqElem> {
    let mut out: Vec<FqElem> = Vec::new();
    for c in p.iter().rev() {
        // out ← out·(u + s) + c
        let mut next = vec![field.zero(); out.len() + 1];
        for (i, o) in out.iter().enumerate() {
            next[i + 1] = field.add(&next[i + 1], o);
            next[i] = field.add(&next[i], &field.mul(o, s));
        }
        next[0] = field.add(&next[0], c);
        out = next;
    }
    poly_trim(field, out)
}

/// (order, first two coefficients) of a nonzero polynomial in u at u = 0.
fn leading_jet(field: &FiniteField, p: &[FqElem]) -> (i64, FqElem, FqElem) {
    let k = p.iter().position(|c| !field.is_zero(c)).expect("nonzero polynomial");
    let c1 = p.get(k + 1).cloned().unwrap_or_else(|| field.zero());
    (k as i64, p[k].clone(), c1)
}

/// The rational 1-form num(x)/den(x)·dx over 𝔽_q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalForm {
    pub num: Vec<FqElem>,
    pub den: Vec<FqElem>,
}

impl RationalForm {
    pub fn new(field: &FiniteField, num: Vec<FqElem>, den: Vec<FqElem>) -> Result<Self> {
        let (num, den) = (poly_trim(field, num), poly_trim(field, den));
        if num.is_empty() {
            return Err(Error::Domain("zero differential form".into()));
        }
        if den.is_empty() {
            return Err(Error::DivisionByZero);
        }
        Ok(RationalForm { num, den })
    }
    pub fn dx(field: &FiniteField) -> Self {
        RationalForm { num: vec![field.one()], den: vec![field.one()] }
    }
    /// From coefficient indices, constant term first.
    pub fn from_indices(field: &FiniteField, num: &[u64], den: &[u64]) -> Result<Self> {
        let conv = |v: &[u64]| -> Result<Vec<FqElem>> {
            v.iter()
                .map(|&i| {
                    if i >= field.size() {
                        Err(Error::Parse(format!("coefficient index {i} out of range")))
                    } else {
                        Ok(field.from_index(i))
                    }
                })
                .collect()
        };
        Self::new(field, conv(num)?, conv(den)?)
    }
    pub fn scale(&self, field: &FiniteField, c: &FqElem) -> Result<Self> {
        Self::new(field, self.num.iter().map(|x| field.mul(x, c)).collect(), self.den.clone())
    }
    pub fn describe(&self, field: &FiniteField) -> String {
        let show = |p: &[FqElem]| p.iter().map(|c| field.index(c).to_string()).collect::<Vec<_>>().join(",");
        format!("num=[{}];den=[{}]", show(&self.num), show(&self.den))
    }

    /// ord_x(ω) at any closed point.
    pub fn order_at(&self, field: &FiniteField, x: &ClosedPoint) -> Result<i64> {
        match &x.kind {
            PointKind::Infinity => Ok(self.den.len() as i64 - self.num.len() as i64 - 2),
            PointKind::Finite(poly) => {
                let mult = |p: &[FqElem]| -> Result<i64> {
                    let mut k = 0;
                    let mut cur = p.to_vec();
                    loop {
                        let (q, r) = poly_divrem(field, &cur, poly)?;
                        if !r.is_empty() {
                            return Ok(k);
                        }
                        cur = q;
                        k += 1;
                    }
                };
                Ok(mult(&self.num)? - mult(&self.den)?)
            }
        }
    }

    /// Largest degree of a finite closed point where ω can have a zero or pole.
    pub fn support_degree_bound(&self) -> usize {
        (self.num.len() + self.den.len()).saturating_sub(2).max(1)
    }
}

/// ω = u^m (v₀ + v₁u + …) du at a rational point or ∞.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalFormJet {
    pub point: ClosedPoint,
    pub m: i64,
    pub v0: FqElem,
    pub v1: FqElem,
}

impl LocalFormJet {
    /// du at a rational point.
    pub fn du(field: &FiniteField, s: &FqElem) -> Self {
        LocalFormJet { point: ClosedPoint::rational(field, s), m: 0, v0: field.one(), v1: field.zero() }
    }
    pub fn laurent(&self) -> LaurentJet {
        LaurentJet { m: self.m, v0: self.v0.clone(), v1: Some(self.v1.clone()) }
    }
}

/// Local expansion of ω at x, in u = x − s or u = 1/x.
pub fn form_jet(field: &FiniteField, omega: &RationalForm, x: &ClosedPoint) -> Result<LocalFormJet> {
    let ((mn, n0, n1), (md, d0, d1), sign) = if x.is_infinity() {
        // p(1/u) = u^{−deg p}·rev(p)(u); dx = −u^{−2}du
        let at_inf = |p: &[FqElem]| {
            let rev: Vec<FqElem> = p.iter().rev().cloned().collect();
            let (k, c0, c1) = leading_jet(field, &rev);
            (k - (p.len() as i64 - 1), c0, c1)
        };
        (at_inf(&omega.num), at_inf(&omega.den), field.from_int(-1))
    } else {
        let s = x
            .rational_coordinate(field)
            .ok_or_else(|| Error::Unsupported("form jet at a non-rational point".into()))?;
        (
            leading_jet(field, &poly_shift(field, &omega.num, &s)),
            leading_jet(field, &poly_shift(field, &omega.den, &s)),
            field.one(),
        )
    };
    let extra = if x.is_infinity() { -2 } else { 0 };
    let d0_inv = field.inv(&d0)?;
    let v0 = field.mul(&field.mul(&n0, &d0_inv), &sign);
    let v1 = field.mul(
        &field.mul(&field.sub(&field.mul(&n1, &d0), &field.mul(&n0, &d1)), &field.mul(&d0_inv, &d0_inv)),
        &sign,
    );
    Ok(LocalFormJet { point: x.clone(), m: mn - md + extra, v0, v1 })
}

/// ε♮ of a rank-one Weil–Deligne character against ω.
///
/// Unramified: −q^m φ^{m+1}. Conductor a ∈ {1, 2}:
/// q^m Σ_{y ∈ (O/𝔪^a)^*} φ^{a+m} χ̃(y)^{-1} ψ(coefficient of u^{a−1} in y·v).
pub fn epsilon_natural(chi: &WeilDeligneChar, j: &LocalFormJet) -> Result<PadicNumber> {
    let ctx = chi.ctx();
    let field = ctx.residue_field();
    let qm = ctx.q_power(j.m);
    if chi.conductor == 0 {
        return Ok(-(&qm * &chi.phi.pow(j.m + 1)?));
    }
    let psi = AddChar::standard(ctx);
    let mut acc = ctx.zero();
    match chi.conductor {
        1 => {
            for y0 in field.elements().skip(1) {
                let w = chi.eval_unit(&y0, None)?.inv()?;
                acc = &acc + &(&w * &psi.eval(&field.mul(&y0, &j.v0), 1)?);
            }
        }
        2 => {
            for y0 in field.elements().skip(1) {
                for y1 in field.elements() {
                    let w = chi.eval_unit(&y0, Some(&y1))?.inv()?;
                    let arg = field.add(&field.mul(&y0, &j.v1), &field.mul(&y1, &j.v0));
                    acc = &acc + &(&w * &psi.eval(&arg, 1)?);
                }
            }
        }
        c => return Err(Error::InsufficientJet { conductor: c, needed: c as usize }),
    }
    Ok(&(&qm * &chi.phi.pow(chi.conductor as i64 + j.m)?) * &acc)
}

/// ε♯ = ε♮·det(−F; inertia invariants)^{-1}.
pub fn epsilon_sharp(m: &RankOneLocalModule, j: &LocalFormJet) -> Result<PadicNumber> {
    let chi = wd_char(m);
    let nat = epsilon_natural(&chi, j)?;
    if chi.is_unramified() {
        nat.checked_div(&-chi.phi.clone())
    } else {
        Ok(nat)
    }
}

/// ε of a punctual object: Π (−q·φ_i q^{−n})^{-1}.
pub fn epsilon_punctual(v: &PunctualModule, ctx: &Ctx) -> Result<PadicNumber> {
    let scale = -ctx.q_power(1 - v.twist);
    let mut acc = ctx.one();
    for phi in &v.eigenvalues {
        acc = acc.checked_div(&(&scale * phi))?;
    }
    Ok(acc)
}

/// Kernel δ⊗M^{∂=0}(1) and cokernel δ⊗M/∂M of j_!M → j_+M; both vanish unless M is trivializable.
pub fn localization_terms(m: &RankOneLocalModule) -> Option<(PunctualModule, PunctualModule)> {
    if !m.is_trivializable() {
        return None;
    }
    let kernel = PunctualModule { eigenvalues: vec![m.c.clone()], twist: m.n + 1 };
    let cokernel = PunctualModule { eigenvalues: vec![m.c.clone()], twist: m.n };
    Some((kernel, cokernel))
}

fn epsilon_rank_one(m: &RankOneLocalModule, j: &LocalFormJet) -> Result<PadicNumber> {
    let ctx = m.ctx();
    let shriek = epsilon_natural(&wd_char(m), j)?.inv()?;
    match m.boundary {
        Boundary::Shriek => Ok(shriek),
        Boundary::Plus => match localization_terms(m) {
            None => Ok(shriek),
            Some((ker, coker)) => {
                let k = epsilon_punctual(&ker, ctx)?;
                shriek.checked_div(&k)?.checked_mul(&epsilon_punctual(&coker, ctx)?)
            }
        },
        Boundary::Generic => match localization_terms(m) {
            None => Ok(shriek),
            Some((ker, _)) => shriek.checked_div(&epsilon_punctual(&ker, ctx)?),
        },
    }
}

/// ε of an effective holonomic local object against ω.
pub fn epsilon_holonomic(obj: &HolonomicLocalObject, j: &LocalFormJet, ctx: &Ctx) -> Result<PadicNumber> {
    let mut acc = ctx.one();
    for (mult, s) in &obj.summands {
        if *mult < 0 {
            return Err(Error::VirtualObject);
        }
        let e = match s {
            Summand::RankOne(m) => epsilon_rank_one(m, j)?,
            Summand::Punctual(v) => epsilon_punctual(v, ctx)?,
        };
        acc = acc.checked_mul(&e.pow(*mult)?)?;
    }
    Ok(acc)
}

/// ε♮(M, du) against (−1)^γ det(Φ^{(0,∞′)}(j_!M))(−γ−1)(u′), γ = rk + irr.
pub fn determinant_formula_check(m: &RankOneLocalModule, required: i64) -> Result<Comparison> {
    if m.has_dwork_part() {
        return Err(Error::Unsupported("determinant formula for an irregular module".into()));
    }
    let ctx = m.ctx();
    let field = ctx.residue_field();
    let zero = field.zero();
    let lhs = epsilon_natural(&wd_char(m), &LocalFormJet::du(field, &zero))?;
    let gamma = m.rank() + m.irregularity();
    let input = HolonomicLocalObject::single(Summand::RankOne(m.with_boundary(Boundary::Shriek)));
    let outputs = local_fourier(&input, &zero)?;
    if outputs.len() != 1 || !outputs[0].rank_laws_hold() {
        return Err(Error::Domain("local Fourier transform violates the rank laws".into()));
    }
    let det = outputs[0].module.twist(-gamma - 1);
    let value = rec_eval(&det.twist(1), &LaurentJet::uniformizer(ctx))?;
    let rhs = if gamma % 2 == 0 { value } else { -value };
    Ok(Comparison::new(lhs, rhs, required))
}
