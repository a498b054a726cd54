//! The family `D = d·Δ_P` over `A = Q[z]`: admissible complements, the
//! combination formula for `Δ_F`, the irreducibility criterion, and the group
//! `N` of pairs `(h, f)` with its isomorphism onto unipotent elements of the
//! centralizer.
//!
//! Kernel elements are stored abstractly in `Q[z, P]` (see [`Vars::zp`]) and
//! expanded into `Q[x, y, z]` on demand.

use std::fmt;

use num_traits::One;

use crate::arith::{gcd, Poly, Rational, Vars};
use crate::automorphisms::{express_in_kernel_as, quotient_action_as, Automorphism};
use crate::derivations::{
    logarithm, plinth_search, standard_decomposition_of, Derivation, DEFAULT_NILPOTENCY_CAP,
};
use crate::error::{Error, Result};

const Z: usize = 2;
const KZ: usize = 0;
const KP: usize = 1;

/// Order in which `n_to_aut` composes its two factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    /// `(h, f) ↦ (h·e) ∘ (f·u′)`.
    Forward,
    /// `(h, f) ↦ (f·u′) ∘ (h·e)`.
    Reverse,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Forward => "(h,f) -> h*e o f*u'",
            Convention::Reverse => "(h,f) -> f*u' o h*e",
        })
    }
}

/// An element of `N`, doubling as the derivation `h·E + f·D′` of `M`.
/// `h ∈ Q[z]` and `f ∈ Q[z, P]`, both stored in [`Vars::zp`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NElem {
    pub h: Poly,
    pub f: Poly,
}

impl NElem {
    pub fn new(h: Poly, f: Poly) -> Result<Self> {
        let zp = Vars::zp();
        let h = h
            .embed(&zp)
            .map_err(|_| Error::Precondition(format!("h = {h} must be in Q[z]")))?;
        let f = f
            .embed(&zp)
            .map_err(|_| Error::Precondition(format!("f = {f} must be in Q[z, P]")))?;
        if h.depends_on(KP) {
            return Err(Error::Precondition(format!("h = {h} must be in Q[z]")));
        }
        Ok(NElem { h, f })
    }

    pub fn identity() -> Self {
        let zp = Vars::zp();
        NElem {
            h: Poly::zero(&zp),
            f: Poly::zero(&zp),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.h.is_zero() && self.f.is_zero()
    }
}

impl fmt::Display for NElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n({}, {})", self.h, self.f)
    }
}

impl fmt::Debug for NElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug)]
pub struct DeltaContext {
    /// `P ∈ Q[z][x, y]`.
    pub p: Poly,
    /// Modification factor `d ∈ Q[z]`.
    pub d: Poly,
    /// `D′(Q) = a′`.
    pub q: Poly,
    pub a_prime: Poly,
    /// `a = d·a′`, the plinth generator of `D = d·D′`.
    pub a: Poly,
    /// `D′ = Δ_P`.
    pub d_prime: Derivation,
    /// `E = Δ_Q`, the admissible complement direction.
    pub e: Derivation,
    pub u_prime: Automorphism,
    pub u: Automorphism,
    pub convention: Convention,
    pub deg_max: u32,
}

fn is_z_only(p: &Poly) -> bool {
    p.uses_only(&[Z])
}

/// Builds the context for `P` and `d`, running the plinth search with kernel
/// generators `z, P` and checking every structural identity. The composition
/// convention of [`n_to_aut`] is fixed here by testing both orders against
/// the product law of `N`.
pub fn make_context(p: &Poly, d: &Poly, deg_max: u32) -> Result<DeltaContext> {
    let xyz = Vars::xyz();
    let p = p
        .embed(&xyz)
        .map_err(|_| Error::Precondition(format!("P = {p} must be in Q[x, y, z]")))?;
    let d = d
        .embed(&xyz)
        .map_err(|_| Error::Precondition(format!("d = {d} must be in Q[z]")))?;
    if !(p.depends_on(0) || p.depends_on(1)) {
        return Err(Error::Precondition(format!("P = {p} has degree 0 in x, y")));
    }
    if d.is_zero() || !is_z_only(&d) {
        return Err(Error::Precondition(format!(
            "d = {d} must be a nonzero element of Q[z]"
        )));
    }
    let d = d.monic();
    let d_prime = Derivation::delta(&p);
    if !d_prime.nilpotency(DEFAULT_NILPOTENCY_CAP).is_nilpotent() {
        return Err(Error::NilpotencyInconclusive {
            cap: DEFAULT_NILPOTENCY_CAP,
        });
    }
    let z = Poly::var(&xyz, Z);
    let plinth = plinth_search(&d_prime, &[z.clone(), p.clone()], deg_max)?;
    let (q, a_prime) = (plinth.q, plinth.a);
    if !is_z_only(&a_prime) {
        return Err(Error::Precondition(format!(
            "plinth generator {a_prime} does not lie in Q[z]"
        )));
    }
    let e = Derivation::delta(&q);
    let fault = |what: &str| Err(Error::Inconsistent(format!("{what} (P = {p}, Q = {q})")));
    if !d_prime.apply(&p).is_zero() || !d_prime.apply(&z).is_zero() {
        return fault("Δ_P does not kill z and P");
    }
    if d_prime.apply(&q) != a_prime {
        return fault("D′(Q) ≠ a′");
    }
    if e.apply(&p) != -&a_prime {
        return fault("E(P) ≠ −a′");
    }
    if !d_prime.lie_bracket(&e).is_zero() {
        return fault("E does not commute with D′");
    }
    if !d_prime.is_irreducible()? || !e.is_irreducible()? {
        return fault("D′ or E is reducible");
    }
    if !e.is_locally_nilpotent() {
        return Err(Error::NilpotencyInconclusive {
            cap: DEFAULT_NILPOTENCY_CAP,
        });
    }
    let u_prime = d_prime.exponential()?;
    let u = d_prime.times(&d).exponential()?;
    let mut ctx = DeltaContext {
        a: &d * &a_prime,
        p,
        d,
        q,
        a_prime,
        d_prime,
        e,
        u_prime,
        u,
        convention: Convention::Forward,
        deg_max,
    };
    ctx.convention = resolve_convention(&ctx)?;
    Ok(ctx)
}

/// The first convention under which `n_to_aut` respects the product law on a
/// fixed probe set.
fn resolve_convention(ctx: &DeltaContext) -> Result<Convention> {
    let zp = Vars::zp();
    let z = Poly::var(&zp, KZ);
    let pp = Poly::var(&zp, KP);
    let one = Poly::one(&zp);
    let probes = [
        (
            NElem::new(one.clone(), pp.clone())?,
            NElem::new(Poly::integer(&zp, 2), z.clone())?,
        ),
        (
            NElem::new(z.clone(), &pp * &pp)?,
            NElem::new(one.clone(), &z * &pp)?,
        ),
    ];
    for conv in [Convention::Forward, Convention::Reverse] {
        let ok = probes.iter().all(|(a, b)| {
            n_to_aut_with(ctx, &n_mul(a, b, ctx), conv)
                == n_to_aut_with(ctx, a, conv).compose(&n_to_aut_with(ctx, b, conv))
        });
        if ok {
            return Ok(conv);
        }
    }
    Err(Error::Inconsistent(
        "neither composition order realizes the product law".into(),
    ))
}

impl DeltaContext {
    pub fn a_prime_zp(&self) -> Poly {
        self.a_prime.embed(&Vars::zp()).expect("a′ lies in Q[z]")
    }

    /// Expansion `Q[z, P] → Q[x, y, z]`, `P ↦ P(x, y, z)`.
    pub fn expand(&self, f: &Poly) -> Poly {
        let z = Poly::var(&Vars::xyz(), Z);
        f.substitute(&[z, self.p.clone()])
            .expect("kernel polynomial in Q[z, P]")
    }

    /// Re-expresses a kernel element of `Q[x, y, z]` in `Q[z, P]`.
    pub fn contract(&self, f: &Poly) -> Result<Poly> {
        let z = Poly::var(&Vars::xyz(), Z);
        let deg = f.total_degree().unwrap_or(0);
        express_in_kernel_as(f, &[z, self.p.clone()], &Vars::zp(), deg.max(self.deg_max))
    }

    /// `h·E + f·D′` in `Q[x, y, z]`.
    pub fn derivation_of(&self, n: &NElem) -> Derivation {
        &self.e.times(&self.expand(&n.h)) + &self.d_prime.times(&self.expand(&n.f))
    }

    pub fn complement(&self) -> Automorphism {
        Automorphism::exp_unchecked(self.e.clone())
    }
}

/// `(h, f)·(h̄, f̄) = (h + h̄, f(P − h̄a′) + f̄)`.
pub fn n_mul(lhs: &NElem, rhs: &NElem, ctx: &DeltaContext) -> NElem {
    fiber_mul(lhs, rhs, &ctx.a_prime_zp())
}

/// `(h, f)⁻¹ = (−h, −f(P + h·a′))`.
pub fn n_inverse(n: &NElem, ctx: &DeltaContext) -> NElem {
    fiber_inverse(n, &ctx.a_prime_zp())
}

/// The product law of `N` for an explicit `a′ ∈ Q[z]` (given in `Q[z, P]`).
pub fn fiber_mul(lhs: &NElem, rhs: &NElem, a_prime: &Poly) -> NElem {
    NElem {
        h: &lhs.h + &rhs.h,
        f: &shift_p(&lhs.f, &-&(&rhs.h * a_prime)) + &rhs.f,
    }
}

pub fn fiber_inverse(n: &NElem, a_prime: &Poly) -> NElem {
    NElem {
        h: -&n.h,
        f: -&shift_p(&n.f, &(&n.h * a_prime)),
    }
}

/// `f(z, P + s)`.
pub fn shift_p(f: &Poly, s: &Poly) -> Poly {
    let zp = Vars::zp();
    f.substitute(&[Poly::var(&zp, KZ), &Poly::var(&zp, KP) + s])
        .expect("f in Q[z, P]")
}

pub fn n_to_aut(n: &NElem, ctx: &DeltaContext) -> Automorphism {
    n_to_aut_with(ctx, n, ctx.convention)
}

fn n_to_aut_with(ctx: &DeltaContext, n: &NElem, conv: Convention) -> Automorphism {
    let he = Automorphism::exp_unchecked(ctx.e.times(&ctx.expand(&n.h)));
    let fu = Automorphism::exp_unchecked(ctx.d_prime.times(&ctx.expand(&n.f)));
    match conv {
        Convention::Forward => he.compose(&fu),
        Convention::Reverse => fu.compose(&he),
    }
}

/// `f` with `log(r) = f·D′`, re-expressed in `Q[z, P]`.
fn modification_coefficient(r: &Automorphism, ctx: &DeltaContext, what: &str) -> Result<Poly> {
    let l = logarithm(r)?;
    let zp = Vars::zp();
    if l.is_zero() {
        return Ok(Poly::zero(&zp));
    }
    let (i, di) = ctx
        .d_prime
        .images()
        .iter()
        .enumerate()
        .find(|(_, p)| !p.is_zero())
        .expect("D′ is nonzero");
    let f = l
        .image(i)
        .divide_exact(di)
        .map_err(|_| Error::NotInN(format!("{what}: logarithm is not a multiple of D′")))?;
    if ctx.d_prime.times(&f) != l {
        return Err(Error::NotInN(format!(
            "{what}: logarithm is not a multiple of D′"
        )));
    }
    ctx.contract(&f)
        .map_err(|_| Error::NotInN(format!("{what}: coefficient {f} is not in Q[z, P]")))
}

/// Inverse of [`n_to_aut`]; fails with [`Error::NotInN`] when `g` is not in
/// the image.
pub fn aut_to_n(g: &Automorphism, ctx: &DeltaContext) -> Result<NElem> {
    let xyz = Vars::xyz();
    if g.vars() != &xyz {
        return Err(Error::Precondition("automorphism of Q[x, y, z] expected".into()));
    }
    if !crate::automorphisms::commutes(g, &ctx.u) {
        return Err(Error::Precondition("g does not commute with u".into()));
    }
    let shift = &ctx.p - &g.pull_back(&ctx.p);
    let h = shift
        .divide_exact(&ctx.a_prime)
        .map_err(|_| Error::NotInN(format!("P − g*(P) = {shift} is not divisible by a′")))?;
    if !is_z_only(&h) {
        return Err(Error::NotInN(format!("(P − g*(P))/a′ = {h} is not in Q[z]")));
    }
    let he_inv = Automorphism::exp_unchecked(ctx.e.times(&-&h));
    let residual = match ctx.convention {
        Convention::Forward => he_inv.compose(g),
        Convention::Reverse => g.compose(&he_inv),
    };
    let f = modification_coefficient(&residual, ctx, "residual")?;
    let n = NElem::new(h.embed(&Vars::zp()).expect("h in Q[z]"), f)?;
    if n_to_aut(&n, ctx) != *g {
        return Err(Error::NotInN("reconstruction does not reproduce g".into()));
    }
    Ok(n)
}

/// `g` with `Exp(hE)⁻¹ ∘ Exp(hE + fD′) = Exp(g·D′)` (taken in the recorded
/// composition order).
pub fn exp_m_decompose(n: &NElem, ctx: &DeltaContext) -> Result<Poly> {
    let m = ctx.derivation_of(n);
    let full = m.exponential()?;
    let h = ctx.expand(&n.h);
    let he_inv = Automorphism::exp_unchecked(ctx.e.times(&-&h));
    let residual = match ctx.convention {
        Convention::Forward => he_inv.compose(&full),
        Convention::Reverse => full.compose(&he_inv),
    };
    modification_coefficient(&residual, ctx, "Exp(M) residual")
        .map_err(|e| Error::Inconsistent(format!("Exp(hE + fD′) is not h·e times a modification: {e}")))
}

/// `F = h·Q + f·P − ∫ (∂f/∂P · P) dP`, together with whether
/// `Δ_F = h·E + f·D′` holds exactly.
pub fn combine_to_delta(ctx: &DeltaContext, n: &NElem) -> (Poly, bool) {
    let zp = Vars::zp();
    let pp = Poly::var(&zp, KP);
    let g = &(&n.f * &pp) - &(&n.f.partial(KP) * &pp).integrate(KP);
    let f_poly = &(&ctx.expand(&n.h) * &ctx.q) + &ctx.expand(&g);
    let ok = Derivation::delta(&f_poly) == ctx.derivation_of(n);
    (f_poly, ok)
}

#[derive(Clone, Debug)]
pub struct IrreducibilityReport {
    /// `gcd(h, f)` in `Q[z, P]`.
    pub gcd: Poly,
    /// Monic gcd of the images of `h·E + f·D′` in `Q[x, y, z]`.
    pub content: Poly,
    /// `d` of the standard decomposition of `Exp(h·E + f·D′)`.
    pub stripped: Poly,
}

impl IrreducibilityReport {
    pub fn coprime(&self) -> bool {
        self.gcd.is_constant()
    }

    pub fn irreducible(&self) -> bool {
        self.content.is_constant()
    }

    pub fn holds(&self, ctx: &DeltaContext) -> bool {
        let predicted = ctx.expand(&self.gcd).monic();
        (!self.coprime() || self.irreducible()) && self.content == predicted && self.stripped == predicted
    }
}

pub fn irreducibility_criterion_check(ctx: &DeltaContext, n: &NElem) -> Result<IrreducibilityReport> {
    let m = ctx.derivation_of(n);
    if m.is_zero() {
        return Err(Error::Precondition("h·E + f·D′ is zero".into()));
    }
    let g = gcd(&n.h, &n.f)?;
    let content = m.content()?;
    let stripped = standard_decomposition_of(&m)?.d;
    Ok(IrreducibilityReport {
        gcd: g,
        content,
        stripped,
    })
}

#[derive(Clone, Debug)]
pub struct AdStep {
    pub q: u32,
    pub bracket: Derivation,
    pub predicted: Derivation,
}

impl AdStep {
    pub fn holds(&self) -> bool {
        self.bracket == self.predicted
    }
}

/// `L_0 = f·D′`, `L_{q+1} = [L_q, h·E]`, compared against
/// `(−1)^q h^q E^q(f) D′` for `q = 0..=q_max`.
pub fn ad_identity_check(ctx: &DeltaContext, h: &Poly, f: &Poly, q_max: u32) -> Result<Vec<AdStep>> {
    let n = NElem::new(h.clone(), f.clone())?;
    let h = ctx.expand(&n.h);
    let f = ctx.expand(&n.f);
    let he = ctx.e.times(&h);
    let mut bracket = ctx.d_prime.times(&f);
    let mut e_iter = f.clone();
    let mut h_pow = Poly::one(&Vars::xyz());
    let mut out = Vec::new();
    for q in 0..=q_max {
        let sign = if q % 2 == 0 {
            Rational::one()
        } else {
            -Rational::one()
        };
        let predicted = ctx.d_prime.times(&(&h_pow * &e_iter).scale(&sign));
        out.push(AdStep {
            q,
            bracket: bracket.clone(),
            predicted,
        });
        bracket = bracket.lie_bracket(&he);
        e_iter = ctx.e.apply(&e_iter);
        h_pow = &h_pow * &h;
    }
    Ok(out)
}

/// Action of `g` on the quotient coordinates `(z, P)`.
pub fn quotient_action(g: &Automorphism, ctx: &DeltaContext) -> Result<Vec<Poly>> {
    let z = Poly::var(&Vars::xyz(), Z);
    quotient_action_as(g, &[z, ctx.p.clone()], &Vars::zp(), ctx.deg_max)
}

/// Fixed-scheme data for `n ∈ N` on the plinth divisor: the induced map on
/// `Q[z, P]` is `(z, P − h·a′)`, which fixes `div(a)` pointwise exactly when
/// `a | h·a′`.
#[derive(Clone, Debug)]
pub struct QuotientShift {
    pub action: Vec<Poly>,
    pub expected: Vec<Poly>,
    pub fixes_plinth_divisor: bool,
}

pub fn quotient_shift(n: &NElem, ctx: &DeltaContext) -> Result<QuotientShift> {
    let zp = Vars::zp();
    let action = quotient_action(&n_to_aut(n, ctx), ctx)?;
    let shift = &n.h * &ctx.a_prime_zp();
    let expected = vec![Poly::var(&zp, KZ), &Poly::var(&zp, KP) - &shift];
    let a = ctx.a.embed(&zp).expect("a in Q[z]");
    Ok(QuotientShift {
        action,
        expected,
        fixes_plinth_divisor: shift.is_zero() || a.divides(&shift),
    })
}

impl QuotientShift {
    pub fn holds(&self) -> bool {
        self.action == self.expected
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    fn k(s: &str) -> Poly {
        crate::arith::text::parse_poly(s, &Vars::zp()).unwrap()
    }

    fn n(h: &str, f: &str) -> NElem {
        NElem::new(k(h), k(f)).unwrap()
    }

    fn ctx() -> DeltaContext {
        make_context(&p("x*z + y^2"), &p("1"), 3).unwrap()
    }

    #[test]
    fn freudenburg_context() {
        let c = ctx();
        assert_eq!(c.q, p("y"));
        assert_eq!(c.a_prime, p("z"));
        assert_eq!(c.e, Derivation::xyz(p("-1"), p("0"), p("0")));
        assert_eq!(c.convention, Convention::Forward);
        let cz = make_context(&p("x*z + y^2"), &p("z"), 3).unwrap();
        assert_eq!(cz.a, p("z^2"));
    }

    #[test]
    fn slice_context() {
        let c = make_context(&p("y"), &p("1"), 2).unwrap();
        assert_eq!(c.q, p("-x"));
        assert_eq!(c.a_prime, p("1"));
    }

    #[test]
    fn product_law_examples() {
        let c = ctx();
        assert_eq!(n_mul(&n("1", "P"), &n("2", "z"), &c), n("3", "P - 2*z + z"));
        assert_eq!(n_mul(&n("1", "P^2"), &n("1", "0"), &c), n("2", "(P - z)^2"));
        assert_eq!(n_inverse(&n("1", "P"), &c), n("-1", "-(P + z)"));
        assert_eq!(n_inverse(&n("0", "z*P"), &c), n("0", "-z*P"));
    }

    #[test]
    fn n_to_aut_examples() {
        let c = ctx();
        assert!(n_to_aut(&NElem::identity(), &c).is_identity());
        assert_eq!(n_to_aut(&n("1", "0"), &c).images(), &[p("x - 1"), p("y"), p("z")]);
        assert_eq!(
            n_to_aut(&n("0", "1"), &c).images(),
            &[p("x - 2*y - z"), p("y + z"), p("z")]
        );
    }

    #[test]
    fn aut_to_n_roundtrip_and_rejection() {
        let c = ctx();
        let g = n_to_aut(&n("1", "P"), &c);
        assert_eq!(aut_to_n(&g, &c).unwrap(), n("1", "P"));
        assert_eq!(
            aut_to_n(&Automorphism::identity(&Vars::xyz()), &c).unwrap(),
            NElem::identity()
        );
        let refl = Automorphism::from_images(vec![p("x"), p("y"), p("-z")]).unwrap();
        assert!(aut_to_n(&refl, &c).is_err());
    }

    #[test]
    fn combination_formula() {
        let c = ctx();
        let (f, ok) = combine_to_delta(&c, &n("z", "P"));
        assert!(ok);
        assert_eq!(
            f,
            &p("z*y") + &p("(x*z + y^2)^2").scale(&Rational::new(1.into(), 2.into()))
        );
        assert_eq!(combine_to_delta(&c, &n("1", "0")), (p("y"), true));
        assert_eq!(combine_to_delta(&c, &n("0", "1")), (p("x*z + y^2"), true));
    }

    #[test]
    fn irreducibility_examples() {
        let c = ctx();
        let r = irreducibility_criterion_check(&c, &n("1", "P")).unwrap();
        assert!(r.coprime() && r.irreducible() && r.holds(&c));
        let r = irreducibility_criterion_check(&c, &n("z", "z*P")).unwrap();
        assert_eq!(r.content, p("z"));
        assert!(r.holds(&c));
        assert!(irreducibility_criterion_check(&c, &NElem::identity()).is_err());
    }

    #[test]
    fn ad_identity_examples() {
        let c = ctx();
        let steps = ad_identity_check(&c, &k("z"), &k("P^2"), 3).unwrap();
        assert!(steps.iter().all(AdStep::holds));
        assert_eq!(steps[2].predicted, c.d_prime.times(&p("2*z^4")));
        let steps = ad_identity_check(&c, &k("1"), &k("P"), 1).unwrap();
        assert_eq!(steps[1].bracket, c.d_prime.times(&p("z")));
    }

    #[test]
    fn exp_m() {
        let c = ctx();
        assert_eq!(exp_m_decompose(&n("0", "z + P"), &c).unwrap(), k("z + P"));
        assert!(exp_m_decompose(&n("z", "0"), &c).unwrap().is_zero());
        let g = exp_m_decompose(&n("1", "P"), &c).unwrap();
        // Exp(E + P D′) = e ∘ Exp(g D′)
        let lhs = c.derivation_of(&n("1", "P")).exponential().unwrap();
        assert_eq!(
            lhs,
            n_to_aut(&n("1", "0"), &c).compose(&n_to_aut(&NElem::new(k("0"), g).unwrap(), &c))
        );
    }

    #[test]
    fn quotient_shifts() {
        let c = ctx();
        let s = quotient_shift(&n("z + 1", "P^2"), &c).unwrap();
        assert!(s.holds() && s.fixes_plinth_divisor);
        let cz = make_context(&p("x*z + y^2"), &p("z"), 3).unwrap();
        let s = quotient_shift(&n("z + 1", "P^2"), &cz).unwrap();
        assert!(s.holds() && !s.fixes_plinth_divisor);
        let s = quotient_shift(&n("z", "1"), &cz).unwrap();
        assert!(s.holds() && s.fixes_plinth_divisor);
    }
}
