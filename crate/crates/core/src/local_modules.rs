//! Rank-one local objects at a rational point: Kummer exponent, Dwork parameter,
//! unramified scalar and Tate twist; their Weil–Deligne characters, reciprocity
//! evaluation and the rank-one local Fourier transform.

use std::fmt;

use crate::characters::{gauss_sum, AddChar, MultChar};
use crate::error::{Error, Result};
use crate::finite_geometry::FqElem;
use crate::global::RankOneGlobalModule;
use crate::local_field::{Ctx, PadicNumber};

/// Sign ε in χ̃(1 + v u) = ψ(ε·s·v) for a Dwork parameter s.
///
/// Fixed by the product formula at q = 5, a = 1, c = 1; see `global::calibrate_wild_sign`.
pub const WILD_SIGN: i64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    Generic,
    Shriek,
    Plus,
}

impl Boundary {
    fn as_str(self) -> &'static str {
        match self {
            Boundary::Generic => "generic",
            Boundary::Shriek => "shriek",
            Boundary::Plus => "plus",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualVariant {
    Plain,
    /// The nearby-cycle duality D_η(M) = M^∨(−1).
    DEta,
}

/// K_a ⊗ L(s) ⊗ (unramified c) (n) on the punctured disc at a rational point.
///
/// c is any nonzero scalar: local Fourier outputs carry a Gauss sum there.
#[derive(Clone, Debug)]
pub struct RankOneLocalModule {
    ctx: Ctx,
    pub a: i64,
    pub s: FqElem,
    pub c: PadicNumber,
    pub n: i64,
    pub boundary: Boundary,
}

impl RankOneLocalModule {
    pub fn new(ctx: &Ctx, a: i64, s: FqElem, c: PadicNumber, n: i64, boundary: Boundary) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::Domain("unramified twist scalar must be nonzero".into()));
        }
        let q1 = ctx.q() as i64 - 1;
        Ok(RankOneLocalModule { ctx: ctx.clone(), a: a.rem_euclid(q1), s, c, n, boundary })
    }
    pub fn trivial(ctx: &Ctx) -> Self {
        Self::kummer(ctx, 0)
    }
    pub fn kummer(ctx: &Ctx, a: i64) -> Self {
        Self::new(ctx, a, ctx.residue_field().zero(), ctx.one(), 0, Boundary::Generic).expect("unit scalar")
    }
    pub fn dwork(ctx: &Ctx, s: FqElem) -> Self {
        Self::new(ctx, 0, s, ctx.one(), 0, Boundary::Generic).expect("unit scalar")
    }
    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }
    pub fn with_boundary(&self, boundary: Boundary) -> Self {
        RankOneLocalModule { boundary, ..self.clone() }
    }
    pub fn with_scalar(&self, c: &PadicNumber) -> Result<Self> {
        Self::new(&self.ctx, self.a, self.s.clone(), &self.c * c, self.n, self.boundary)
    }
    pub fn twist(&self, k: i64) -> Self {
        RankOneLocalModule { n: self.n + k, ..self.clone() }
    }

    pub fn rank(&self) -> i64 {
        1
    }
    pub fn has_dwork_part(&self) -> bool {
        !self.ctx.residue_field().is_zero(&self.s)
    }
    pub fn irregularity(&self) -> i64 {
        self.has_dwork_part() as i64
    }
    pub fn highest_slope(&self) -> i64 {
        self.irregularity()
    }
    /// Trivial after an unramified twist: no Kummer and no Dwork part.
    pub fn is_trivializable(&self) -> bool {
        self.a == 0 && !self.has_dwork_part()
    }
    /// Frobenius eigenvalue on the fibre of a trivializable module, c·q^{−n}.
    pub fn fibre_eigenvalue(&self) -> PadicNumber {
        &self.c * &self.ctx.q_power(-self.n)
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if !std::sync::Arc::ptr_eq(&self.ctx, &other.ctx) && self.ctx.precision() != other.ctx.precision() {
            return Err(Error::ContextMismatch);
        }
        let field = self.ctx.residue_field();
        Self::new(
            &self.ctx,
            self.a + other.a,
            field.add(&self.s, &other.s),
            self.c.checked_mul(&other.c)?,
            self.n + other.n,
            self.boundary,
        )
    }

    pub fn dual(&self, variant: DualVariant) -> Result<Self> {
        let plain = Self::new(
            &self.ctx,
            -self.a,
            self.ctx.residue_field().neg(&self.s),
            self.c.inv()?,
            -self.n,
            self.boundary,
        )?;
        Ok(match variant {
            DualVariant::Plain => plain,
            DualVariant::DEta => plain.twist(-1),
        })
    }

    /// Textual form `a=<int>;s=<fq>;c=<padic>;n=<int>;b=<generic|shriek|plus>`.
    pub fn parse(ctx: &Ctx, text: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("{m} in {text:?}"));
        let a_part = text.strip_prefix("a=").ok_or_else(|| bad("missing a="))?;
        let (a, rest) = a_part.split_once(";s=").ok_or_else(|| bad("missing s="))?;
        let (s, rest) = rest.split_once(";c=").ok_or_else(|| bad("missing c="))?;
        let (c, rest) = rest.split_once(";n=").ok_or_else(|| bad("missing n="))?;
        let (n, b) = rest.split_once(";b=").ok_or_else(|| bad("missing b="))?;
        let a: i64 = a.parse().map_err(|_| bad("bad a"))?;
        let s: u64 = s.parse().map_err(|_| bad("bad s"))?;
        if s >= ctx.q() {
            return Err(bad("s out of range"));
        }
        let n: i64 = n.parse().map_err(|_| bad("bad n"))?;
        let boundary = match b {
            "generic" => Boundary::Generic,
            "shriek" => Boundary::Shriek,
            "plus" => Boundary::Plus,
            _ => return Err(bad("bad boundary")),
        };
        Self::new(ctx, a, ctx.residue_field().from_index(s), ctx.parse(c)?, n, boundary)
    }
}

impl fmt::Display for RankOneLocalModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a={};s={};c={};n={};b={}",
            self.a,
            self.ctx.residue_field().index(&self.s),
            self.c,
            self.n,
            self.boundary.as_str()
        )
    }
}

/// δ ⊗ V at a point: a finite list of Frobenius eigenvalues with a Tate twist.
#[derive(Clone, Debug)]
pub struct PunctualModule {
    pub eigenvalues: Vec<PadicNumber>,
    pub twist: i64,
}

#[derive(Clone, Debug)]
pub enum Summand {
    RankOne(RankOneLocalModule),
    Punctual(PunctualModule),
}

/// Formal ℤ-combination of local summands at one point.
#[derive(Clone, Debug, Default)]
pub struct HolonomicLocalObject {
    pub summands: Vec<(i64, Summand)>,
}

impl HolonomicLocalObject {
    pub fn new() -> Self {
        Self::default()
    }
    pub fn single(s: Summand) -> Self {
        HolonomicLocalObject { summands: vec![(1, s)] }
    }
    pub fn push(&mut self, multiplicity: i64, s: Summand) {
        self.summands.push((multiplicity, s));
    }
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut summands = self.summands.clone();
        summands.extend(other.summands.iter().cloned());
        HolonomicLocalObject { summands }
    }
    pub fn is_effective(&self) -> bool {
        self.summands.iter().all(|(m, _)| *m >= 0)
    }
}

/// Linearized rank-one Weil–Deligne datum of a local module (N = 0).
///
/// On units χ̃(y₀ + y₁u + …) = χ_a(y₀)^{-1}·ψ(ε·s·y₁/y₀), and χ̃(u) = phi.
#[derive(Clone, Debug)]
pub struct WeilDeligneChar {
    ctx: Ctx,
    pub a: i64,
    pub conductor: u8,
    pub s: FqElem,
    pub phi: PadicNumber,
    pub wild_sign: i64,
}

impl WeilDeligneChar {
    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }
    pub fn is_unramified(&self) -> bool {
        self.conductor == 0
    }

    /// χ̃ on a unit y₀ + y₁u + … of the local ring; y₁ is needed only at conductor 2.
    pub fn eval_unit(&self, y0: &FqElem, y1: Option<&FqElem>) -> Result<PadicNumber> {
        let field = self.ctx.residue_field();
        let tame = MultChar::new(&self.ctx, -self.a).eval_base(y0)?;
        if self.conductor < 2 {
            return Ok(tame);
        }
        let y1 = y1.ok_or(Error::InsufficientJet { conductor: 2, needed: 2 })?;
        let ratio = field.mul(y1, &field.inv(y0)?);
        let arg = field.scale(&field.mul(&self.s, &ratio), self.wild_sign.rem_euclid(self.ctx.p() as i64) as u64);
        Ok(&tame * &AddChar::standard(&self.ctx).eval(&arg, 1)?)
    }

    /// χ̃(f′) for f′ = u^m (v₀ + v₁u + …).
    pub fn eval(&self, f: &LaurentJet) -> Result<PadicNumber> {
        let unit = self.eval_unit(&f.v0, f.v1.as_ref())?;
        Ok(&self.phi.pow(f.m)? * &unit)
    }

    pub fn product(&self, other: &Self) -> Result<Self> {
        let field = self.ctx.residue_field();
        let s = field.add(&self.s, &other.s);
        let q1 = self.ctx.q() as i64 - 1;
        let a = (self.a + other.a).rem_euclid(q1);
        let conductor = if !field.is_zero(&s) { 2 } else if a != 0 { 1 } else { 0 };
        Ok(WeilDeligneChar {
            ctx: self.ctx.clone(),
            a,
            conductor,
            s,
            phi: self.phi.checked_mul(&other.phi)?,
            wild_sign: self.wild_sign,
        })
    }
}

/// Truncated Laurent datum u^m (v₀ + v₁u + …) at a rational point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentJet {
    pub m: i64,
    pub v0: FqElem,
    pub v1: Option<FqElem>,
}

impl LaurentJet {
    /// The uniformizer u.
    pub fn uniformizer(ctx: &Ctx) -> Self {
        let f = ctx.residue_field();
        LaurentJet { m: 1, v0: f.one(), v1: Some(f.zero()) }
    }
}

pub fn wd_char(m: &RankOneLocalModule) -> WeilDeligneChar {
    wd_char_with_sign(m, WILD_SIGN)
}

/// `wd_char` with an explicit wild sign; used to fix [`WILD_SIGN`].
pub fn wd_char_with_sign(m: &RankOneLocalModule, wild_sign: i64) -> WeilDeligneChar {
    let ctx = &m.ctx;
    let conductor = if m.has_dwork_part() {
        2
    } else if m.a != 0 {
        1
    } else {
        0
    };
    let phi = &(&MultChar::new(ctx, m.a).at_minus_one() * &m.c) * &ctx.q_power(-m.n);
    WeilDeligneChar { ctx: ctx.clone(), a: m.a, conductor, s: m.s.clone(), phi, wild_sign }
}

/// (χ̃_M ∘ rec)(f′), with the uniformizer sent to geometric Frobenius.
pub fn rec_eval(m: &RankOneLocalModule, f: &LaurentJet) -> Result<PadicNumber> {
    wd_char(m).eval(f)
}

/// Frobenius trace on unipotent nearby cycles, Ψ₁(M) = M(1) at −u.
pub fn nearby_cycle_trace(m: &RankOneLocalModule) -> Result<PadicNumber> {
    if m.has_dwork_part() {
        return Err(Error::Unsupported("nearby cycles of an irregular module".into()));
    }
    let f = m.ctx.residue_field();
    rec_eval(&m.twist(1), &LaurentJet { m: 1, v0: f.from_int(-1), v1: Some(f.zero()) })
}

/// One summand of a local Fourier transform, at ∞′.
#[derive(Clone, Debug)]
pub struct LocalFourierOutput {
    /// Φ^{(s₀,∞′)} of the summand, i.e. the (0,∞′) transform tensored with L(s₀).
    pub module: RankOneLocalModule,
    pub input_rank: i64,
    pub input_irregularity: i64,
    /// Rank and irregularity of the (0,∞′) part.
    pub core_rank: i64,
    pub core_irregularity: i64,
    pub core_slope_below_one: bool,
}

impl LocalFourierOutput {
    /// rk = rk(M) + irr(M), irr unchanged, slopes < 1, conductor ≤ 1 + irr(M).
    pub fn rank_laws_hold(&self) -> bool {
        let core_conductor = (self.module.a != 0) as i64 + self.core_irregularity;
        self.core_rank == self.input_rank + self.input_irregularity
            && self.core_irregularity == self.input_irregularity
            && self.core_slope_below_one
            && core_conductor <= 1 + self.input_irregularity
    }
}

/// Local Fourier transform of a j_!-extended tame object at the rational point s₀.
pub fn local_fourier(obj: &HolonomicLocalObject, s0: &FqElem) -> Result<Vec<LocalFourierOutput>> {
    let mut out = Vec::new();
    for (mult, summand) in &obj.summands {
        if *mult < 0 {
            return Err(Error::VirtualObject);
        }
        let m = match summand {
            Summand::RankOne(m) => m,
            Summand::Punctual(_) => return Err(Error::Unsupported("Fourier transform of a punctual summand".into())),
        };
        if m.has_dwork_part() {
            return Err(Error::Unsupported("wild input to the local Fourier transform".into()));
        }
        if m.boundary != Boundary::Shriek {
            return Err(Error::Unsupported("local Fourier input must be j_!-extended".into()));
        }
        let ctx = &m.ctx;
        let (scalar, boundary) = if m.a == 0 {
            (m.c.clone(), Boundary::Plus)
        } else {
            (m.c.checked_mul(&gauss_sum(ctx, m.a)?)?, Boundary::Generic)
        };
        let module = RankOneLocalModule::new(ctx, m.a, s0.clone(), scalar, m.n + 1, boundary)?;
        for _ in 0..*mult {
            out.push(LocalFourierOutput {
                module: module.clone(),
                input_rank: m.rank(),
                input_irregularity: m.irregularity(),
                core_rank: 1,
                core_irregularity: 0,
                core_slope_below_one: true,
            });
        }
    }
    Ok(out)
}

/// Stationary-phase decomposition of the Fourier transform of a tame global module at ∞′.
#[derive(Clone, Debug)]
pub struct StationaryPhase {
    pub summands: Vec<(FqElem, LocalFourierOutput)>,
    pub total_rank: i64,
    /// Σ_s −deg(s)·a_s over the finite singular points.
    pub predicted_rank: i64,
}

pub fn stationary_phase(g: &RankOneGlobalModule) -> Result<StationaryPhase> {
    if g.has_dwork_part() {
        return Err(Error::Unsupported("stationary phase needs a tame module".into()));
    }
    let mut summands = Vec::new();
    let mut predicted_rank = 0;
    for (s, _) in g.kummer_points() {
        let local = g.local_module_at(s)?.with_boundary(Boundary::Shriek);
        // a_s = r + s_x − r_x = −(rk + irr) for a j_!-extended rank-one module
        predicted_rank += local.rank() + local.irregularity();
        for o in local_fourier(&HolonomicLocalObject::single(Summand::RankOne(local)), s)? {
            summands.push((s.clone(), o));
        }
    }
    let total_rank = summands.iter().map(|(_, o)| o.module.rank()).sum();
    Ok(StationaryPhase { summands, total_rank, predicted_rank })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_field::make_context;

    #[test]
    fn tensor_and_dual() {
        let c = make_context(5, 1, true, 20).unwrap();
        let f = c.residue_field().clone();
        let k1 = RankOneLocalModule::kummer(&c, 1);
        let k2 = RankOneLocalModule::kummer(&c, 2);
        assert_eq!(k1.tensor(&k2).unwrap().a, 3);
        let l = RankOneLocalModule::dwork(&c, f.from_int(2));
        let lm = RankOneLocalModule::dwork(&c, f.from_int(-2));
        let t = l.tensor(&lm).unwrap();
        assert!(t.is_trivializable());
        assert_eq!(t.irregularity(), 0);
        let unit = RankOneLocalModule::trivial(&c);
        let m = RankOneLocalModule::new(&c, 3, f.from_int(1), c.from_int(2), 4, Boundary::Generic).unwrap();
        assert_eq!(unit.tensor(&m).unwrap().to_string(), m.to_string());
        assert_eq!(k1.dual(DualVariant::Plain).unwrap().a, 3);
        let d = unit.dual(DualVariant::DEta).unwrap();
        assert_eq!(d.n, -1);
        assert_eq!(d.fibre_eigenvalue(), c.from_int(5));
    }

    #[test]
    fn characters_of_local_modules() {
        let c = make_context(7, 1, true, 24).unwrap();
        let f = c.residue_field().clone();
        let triv = RankOneLocalModule::trivial(&c).with_scalar(&c.from_int(3)).unwrap();
        assert_eq!(rec_eval(&triv, &LaurentJet::uniformizer(&c)).unwrap(), c.from_int(3));
        for a in 1..6 {
            let k = RankOneLocalModule::kummer(&c, a);
            let w = wd_char(&k);
            assert_eq!(w.conductor, 1);
            assert_eq!(w.phi, MultChar::new(&c, a).at_minus_one());
            let minus_u = LaurentJet { m: 1, v0: f.from_int(-1), v1: None };
            assert_eq!(rec_eval(&k, &minus_u).unwrap(), c.one());
        }
        let l = RankOneLocalModule::dwork(&c, f.one()).tensor(&RankOneLocalModule::kummer(&c, 2)).unwrap();
        assert_eq!(wd_char(&l).conductor, 2);
        let short = LaurentJet { m: 0, v0: f.one(), v1: None };
        assert!(matches!(rec_eval(&l, &short), Err(Error::InsufficientJet { .. })));
        assert_eq!(nearby_cycle_trace(&RankOneLocalModule::trivial(&c)).unwrap(), c.q_power(-1));
    }

    #[test]
    fn text_round_trip() {
        let c = make_context(5, 2, true, 16).unwrap();
        let f = c.residue_field().clone();
        let m = RankOneLocalModule::new(&c, 7, f.from_index(13), c.teichmuller(&f.from_index(9)), -2, Boundary::Plus)
            .unwrap();
        let s = m.to_string();
        assert_eq!(RankOneLocalModule::parse(&c, &s).unwrap().to_string(), s);
        assert!(RankOneLocalModule::parse(&c, "a=1;s=0;c=v=0/1;digits=0:0:1;prec=16;n=0;b=other").is_err());
    }

    #[test]
    fn fourier_examples() {
        let c = make_context(5, 1, true, 24).unwrap();
        let f = c.residue_field().clone();
        let k = RankOneLocalModule::kummer(&c, 1).with_boundary(Boundary::Shriek);
        let out = local_fourier(&HolonomicLocalObject::single(Summand::RankOne(k.clone())), &f.zero()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].module.a, 1);
        assert_eq!(out[0].module.c, gauss_sum(&c, 1).unwrap());
        assert_eq!(out[0].module.n, 1);
        assert!(out[0].rank_laws_hold());
        let at_one = local_fourier(&HolonomicLocalObject::single(Summand::RankOne(k)), &f.one()).unwrap();
        assert_eq!(at_one[0].module.s, f.one());
        let triv = RankOneLocalModule::trivial(&c).with_boundary(Boundary::Shriek);
        let out = local_fourier(&HolonomicLocalObject::single(Summand::RankOne(triv)), &f.zero()).unwrap();
        assert_eq!(out[0].module.boundary, Boundary::Plus);
        assert_eq!(out[0].module.n, 1);
        let wild = RankOneLocalModule::dwork(&c, f.one()).with_boundary(Boundary::Shriek);
        assert!(local_fourier(&HolonomicLocalObject::single(Summand::RankOne(wild)), &f.zero()).is_err());
    }
}
