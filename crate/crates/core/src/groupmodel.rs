//! The abstract group `G = T ⋉ (A ⋉ A[P])` with `A = Q[z]`.
//!
//! Elements are `(λ, h, f)` with `λ` a point of a split torus, `h ∈ A` and
//! `f ∈ A[P]`. The fiber `A ⋉ A[P]` multiplies by the law of `N`; a torus
//! element acts on it through characters:
//!
//! ```text
//! φ_λ(h, f) = (ν(λ)·h(ρ₁(λ)z), μ(λ)·f(ρ₁(λ)z, ρ₂(λ)P))
//! (λ, n)·(λ̄, n̄) = (λλ̄, φ_λ̄(n)·n̄)
//! ```
//!
//! so that `(λ, 0, 0)·(1, h, f) = (λ, h, f)` and `λ⁻¹·f·λ = φ_λ(f)`. `φ_λ` is a
//! homomorphism of the fiber exactly when `a′(ρ₁z) = ν·ρ₂·a′(z)`, which pins
//! `ν` down for monomial `a′`.

use std::fmt;

use num_traits::{One, Zero};

use crate::arith::rational::pow_signed;
use crate::arith::{Monomial, Poly, Rational, Vars};
use crate::automorphisms::{
    commutator as aut_commutator, commutes, modification_of, mu_character, Automorphism,
};
use crate::delta_family::{fiber_inverse, fiber_mul, DeltaContext, NElem};
use crate::error::{Error, Result};

/// A character of the torus, `λ ↦ Π λᵢ^{eᵢ}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CharacterVector {
    pub exponents: Vec<i64>,
}

impl CharacterVector {
    pub fn new(exponents: Vec<i64>) -> Self {
        CharacterVector { exponents }
    }

    pub fn trivial(rank: usize) -> Self {
        CharacterVector::new(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        self.exponents
            .iter()
            .zip(point)
            .fold(Rational::one(), |acc, (&e, t)| {
                acc * pow_signed(t, e).expect("torus coordinates are nonzero")
            })
    }

    /// Product of characters `self · other^k`.
    pub fn times_power(&self, other: &CharacterVector, k: i64) -> CharacterVector {
        CharacterVector::new(
            self.exponents
                .iter()
                .zip(&other.exponents)
                .map(|(a, b)| a + k * b)
                .collect(),
        )
    }
}

impl fmt::Display for CharacterVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupLaw {
    pub mu: CharacterVector,
    pub rho1: CharacterVector,
    pub rho2: CharacterVector,
    pub nu: CharacterVector,
    /// `a′ ∈ Q[z]`, stored in `Q[z, P]`.
    pub a_prime: Poly,
    /// `ν` was derived from the compatibility condition rather than given.
    pub nu_derived: bool,
}

impl GroupLaw {
    /// Builds a law; when `nu` is absent it is solved from
    /// `a′(ρ₁z) = ν·ρ₂·a′(z)`. A supplied `nu` must satisfy the same condition.
    pub fn new(
        mu: CharacterVector,
        rho1: CharacterVector,
        rho2: CharacterVector,
        nu: Option<CharacterVector>,
        a_prime: &Poly,
    ) -> Result<Self> {
        let rank = mu.rank();
        if rho1.rank() != rank || rho2.rank() != rank || nu.as_ref().is_some_and(|n| n.rank() != rank) {
            return Err(Error::Precondition("characters of different ranks".into()));
        }
        if rank == 0 {
            return Err(Error::Precondition("torus of rank 0".into()));
        }
        let zp = Vars::zp();
        let a_prime = a_prime
            .embed(&zp)
            .ok()
            .filter(|a| !a.depends_on(1) && !a.is_zero())
            .ok_or_else(|| {
                Error::Precondition(format!("a′ = {a_prime} must be a nonzero element of Q[z]"))
            })?;
        let degrees: Vec<i64> = a_prime.terms().map(|(m, _)| i64::from(m.exponent(0))).collect();
        let required = |m: i64| {
            CharacterVector::trivial(rank)
                .times_power(&rho1, m)
                .times_power(&rho2, -1)
        };
        let (nu, nu_derived) = match nu {
            Some(n) => (n, false),
            None => (required(degrees[0]), true),
        };
        for &m in &degrees {
            if required(m) != nu {
                return Err(Error::Precondition(format!(
                    "torus action is not compatible with a′ = {a_prime}: need ν = ρ₁^{m}·ρ₂⁻¹ = {}",
                    required(m)
                )));
            }
        }
        Ok(GroupLaw {
            mu,
            rho1,
            rho2,
            nu,
            a_prime,
            nu_derived,
        })
    }

    pub fn rank(&self) -> usize {
        self.mu.rank()
    }

    /// `φ_λ` on the fiber.
    pub fn act(&self, lambda: &[Rational], n: &NElem) -> NElem {
        let zp = Vars::zp();
        let r1 = self.rho1.eval(lambda);
        let r2 = self.rho2.eval(lambda);
        let images = [Poly::var(&zp, 0).scale(&r1), Poly::var(&zp, 1).scale(&r2)];
        NElem {
            h: n.h
                .substitute(&images)
                .expect("h in Q[z]")
                .scale(&self.nu.eval(lambda)),
            f: n.f
                .substitute(&images)
                .expect("f in Q[z, P]")
                .scale(&self.mu.eval(lambda)),
        }
    }

    /// `ker ρ₁ ∩ ker ρ₂` contains no non-identity point among `points`.
    pub fn kernels_meet_trivially_on(&self, points: &[Vec<Rational>]) -> bool {
        points.iter().all(|p| {
            p.iter().all(Rational::is_one) || !self.rho1.eval(p).is_one() || !self.rho2.eval(p).is_one()
        })
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GElem {
    pub torus: Vec<Rational>,
    pub n: NElem,
}

impl GElem {
    pub fn new(torus: Vec<Rational>, h: Poly, f: Poly) -> Result<Self> {
        if torus.iter().any(Rational::is_zero) {
            return Err(Error::Precondition("torus coordinates must be nonzero".into()));
        }
        Ok(GElem {
            torus,
            n: NElem::new(h, f)?,
        })
    }

    pub fn identity(rank: usize) -> Self {
        GElem {
            torus: vec![Rational::one(); rank],
            n: NElem::identity(),
        }
    }

    pub fn torus_only(torus: Vec<Rational>) -> Result<Self> {
        let zp = Vars::zp();
        GElem::new(torus, Poly::zero(&zp), Poly::zero(&zp))
    }

    pub fn fiber(rank: usize, n: NElem) -> Self {
        GElem {
            torus: vec![Rational::one(); rank],
            n,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.torus.iter().all(Rational::is_one) && self.n.is_identity()
    }

    /// Lies in `A[P] = {(1, 0, f)}`.
    pub fn in_abelian_fiber(&self) -> bool {
        self.torus.iter().all(Rational::is_one) && self.n.h.is_zero()
    }
}

impl fmt::Display for GElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, t) in self.torus.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "; {}; {})", self.n.h, self.n.f)
    }
}

impl fmt::Debug for GElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn check_rank(law: &GroupLaw, g: &GElem) -> Result<()> {
    if g.torus.len() != law.rank() {
        return Err(Error::Precondition(format!(
            "element {g} has torus rank {} but the law has rank {}",
            g.torus.len(),
            law.rank()
        )));
    }
    Ok(())
}

pub fn g_mul(a: &GElem, b: &GElem, law: &GroupLaw) -> Result<GElem> {
    check_rank(law, a)?;
    check_rank(law, b)?;
    Ok(GElem {
        torus: a.torus.iter().zip(&b.torus).map(|(x, y)| x * y).collect(),
        n: fiber_mul(&law.act(&b.torus, &a.n), &b.n, &law.a_prime),
    })
}

/// `(λ, n)⁻¹ = (λ⁻¹, φ_{λ⁻¹}(n⁻¹))`.
pub fn g_inverse(a: &GElem, law: &GroupLaw) -> Result<GElem> {
    check_rank(law, a)?;
    let inv: Vec<Rational> = a.torus.iter().map(Rational::recip).collect();
    Ok(GElem {
        n: law.act(&inv, &fiber_inverse(&a.n, &law.a_prime)),
        torus: inv,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommutatorConvention {
    /// `[a, b] = a·b·a⁻¹·b⁻¹`.
    Outer,
    /// `[a, b] = a⁻¹·b⁻¹·a·b`.
    Inner,
}

pub fn commutator_with(a: &GElem, b: &GElem, law: &GroupLaw, conv: CommutatorConvention) -> Result<GElem> {
    let ai = g_inverse(a, law)?;
    let bi = g_inverse(b, law)?;
    let word = match conv {
        CommutatorConvention::Outer => [a, b, &ai, &bi],
        CommutatorConvention::Inner => [&ai, &bi, a, b],
    };
    word.iter()
        .try_fold(GElem::identity(law.rank()), |acc, x| g_mul(&acc, x, law))
}

/// `[a, b] = a·b·a⁻¹·b⁻¹`, the convention under which
/// `[(1, 0, q), (1, h₀, f₀)] = (1, 0, q − q(P + h₀a′))`.
pub fn commutator(a: &GElem, b: &GElem, law: &GroupLaw) -> Result<GElem> {
    commutator_with(a, b, law, CommutatorConvention::Outer)
}

/// `q − q(P + h₀a′)`, the predicted fiber of `[(1, 0, q), (1, h₀, f₀)]`.
pub fn predicted_fiber_commutator(q: &Poly, h0: &Poly, law: &GroupLaw) -> Poly {
    q - &crate::delta_family::shift_p(q, &(h0 * &law.a_prime))
}

/// Outcome of the derived-series test that isolates `A[P]`.
#[derive(Clone, Debug)]
pub struct PresLemmaReport {
    /// The torus point used to build witnesses.
    pub point: Vec<Rational>,
    /// `(1, h₀, f₀)`, a commutator with a torus element.
    pub h0_witness: GElem,
    /// `i` chosen for the `z^i P^j` generators.
    pub i0: u32,
    /// Elements of `G^(2)` that a centralizer candidate must commute with.
    pub witnesses: Vec<GElem>,
    /// Per candidate: does it centralize every witness, and if not, which
    /// witnesses (by index) it fails against.
    pub verdicts: Vec<(GElem, bool, Vec<usize>)>,
    /// Random-free sanity check: a fixed family of fiber elements centralizes
    /// every witness.
    pub fiber_centralizes: bool,
}

impl PresLemmaReport {
    /// Every candidate passes exactly when it lies in `A[P]`.
    pub fn isolates_fiber(&self) -> bool {
        self.fiber_centralizes
            && self
                .verdicts
                .iter()
                .all(|(g, passes, _)| *passes == g.in_abelian_fiber())
    }
}

const MAX_I: u32 = 64;

fn z_p_monomial(i: u32, j: u32) -> Poly {
    Poly::monomial(&Vars::zp(), Monomial::from_exponents(&[i, j]), Rational::one())
}

/// Builds `G^(2)` witnesses at the first usable point of `points` and tests
/// each candidate for centralizing them. `extra_levels` adds further values
/// of `i` beyond `i0, i0 + 1, i0 + 2`.
pub fn verify_pres_lemma(
    law: &GroupLaw,
    points: &[Vec<Rational>],
    candidates: &[GElem],
    extra_levels: u32,
) -> Result<PresLemmaReport> {
    if !law.kernels_meet_trivially_on(points) {
        return Err(Error::Precondition(
            "ker ρ₁ ∩ ker ρ₂ is nontrivial on the test points".into(),
        ));
    }
    let rank = law.rank();
    let zp = Vars::zp();
    let one_h = GElem::new(vec![Rational::one(); rank], Poly::one(&zp), Poly::zero(&zp))?;
    for point in points {
        if point.len() != rank || point.iter().any(Rational::is_zero) {
            return Err(Error::Precondition(
                "test point of wrong rank or with a zero coordinate".into(),
            ));
        }
        let lam = GElem::torus_only(point.clone())?;
        let h0_witness = commutator(&lam, &one_h, law)?;
        if h0_witness.n.h.is_zero() {
            continue;
        }
        let char_at = |i: u32, j: u32| {
            law.mu
                .times_power(&law.rho1, i64::from(i))
                .times_power(&law.rho2, i64::from(j))
                .eval(point)
        };
        let Some(i0) = (0..=MAX_I).find(|&i| (1..=3).all(|j| !char_at(i, j).is_one())) else {
            continue;
        };
        let mut witnesses = Vec::new();
        for i in i0..i0 + 3 + extra_levels {
            for j in 1..=3 {
                let gen = GElem::fiber(rank, NElem::new(Poly::zero(&zp), z_p_monomial(i, j))?);
                let q = commutator(&lam, &gen, law)?;
                if q.n.f.is_zero() {
                    continue;
                }
                witnesses.push(commutator(&q, &h0_witness, law)?);
            }
        }
        witnesses.retain(|w| !w.is_identity());
        let centralizes =
            |g: &GElem, w: &GElem| -> Result<bool> { Ok(g_mul(g, w, law)? == g_mul(w, g, law)?) };
        let mut verdicts = Vec::new();
        for c in candidates {
            check_rank(law, c)?;
            let mut failing = Vec::new();
            for (k, w) in witnesses.iter().enumerate() {
                if !centralizes(c, w)? {
                    failing.push(k);
                }
            }
            verdicts.push((c.clone(), failing.is_empty(), failing));
        }
        let mut fiber_centralizes = true;
        for f in [
            z_p_monomial(0, 1),
            z_p_monomial(2, 3),
            &z_p_monomial(1, 0) + &Poly::one(&zp),
        ] {
            let g = GElem::fiber(rank, NElem::new(Poly::zero(&zp), f)?);
            for w in &witnesses {
                fiber_centralizes &= centralizes(&g, w)?;
            }
        }
        return Ok(PresLemmaReport {
            point: point.clone(),
            h0_witness,
            i0,
            witnesses,
            verdicts,
            fiber_centralizes,
        });
    }
    Err(Error::Precondition(
        "no test point gives h₀ ≠ 0 and nontrivial characters μρ₁^iρ₂^j (i ≤ 64)".into(),
    ))
}

/// `[h·e ∘ f·u′, [P²·u′, e]]` against `(−2h·a′²)·u′`, by composing in
/// `Q[x, y, z]`.
#[derive(Clone, Debug)]
pub struct CharCommutatorReport {
    pub lhs: Automorphism,
    pub rhs: Automorphism,
}

impl CharCommutatorReport {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn char_commutator_check(ctx: &DeltaContext, h: &Poly, f: &Poly) -> Result<CharCommutatorReport> {
    let n = NElem::new(h.clone(), f.clone())?;
    let hz = ctx.expand(&n.h);
    let he = modification_of(&hz, &ctx.e)?;
    let fu = modification_of(&ctx.expand(&n.f), &ctx.d_prime)?;
    let outer = he.compose(&fu);
    let p2u = modification_of(&(&ctx.p * &ctx.p), &ctx.d_prime)?;
    let e = modification_of(&Poly::one(&Vars::xyz()), &ctx.e)?;
    let inner = aut_commutator(&p2u, &e)?;
    let lhs = aut_commutator(&outer, &inner)?;
    let coeff = (&hz * &ctx.a_prime.pow(2)).scale(&Rational::from_integer((-2).into()));
    let rhs = modification_of(&coeff, &ctx.d_prime)?;
    Ok(CharCommutatorReport { lhs, rhs })
}

/// Both sides of `[t ∘ f·u′, [t⁻¹, v^k·u′]] = (1 − c(t⁻¹))(1 − c(t))·v^k·u′`,
/// where `t⁻¹ ∘ (g·u′) ∘ t = c(t)·g·u′` on `g = v^k`.
#[derive(Clone, Debug)]
pub struct NonfenceReport {
    /// `t*(d) = mu·d`.
    pub mu: Rational,
    /// `t*(v) = rho·v`.
    pub rho: Rational,
    /// `c(t) = mu⁻¹·rho^k`.
    pub scalar: Rational,
    pub lhs: Automorphism,
    pub rhs: Automorphism,
}

impl NonfenceReport {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn nonfence_commutator_check(
    u_prime: &Automorphism,
    d: &Poly,
    t: &Automorphism,
    f: &Poly,
    v: &Poly,
    k: u32,
) -> Result<NonfenceReport> {
    let d_prime = crate::derivations::logarithm(u_prime)?;
    for (name, p) in [("d", d), ("f", f), ("v", v)] {
        if !d_prime.apply(p).is_zero() {
            return Err(Error::NotInKernel(format!("{name} = {p}")));
        }
    }
    let u = modification_of(d, &d_prime)?;
    if !commutes(t, &u) {
        return Err(Error::Precondition("t does not centralize d·u′".into()));
    }
    let mu = mu_character(t, d)?;
    let rho = mu_character(t, v)?;
    let scalar = pow_signed(&rho, i64::from(k)).expect("rho ≠ 0") / &mu;
    let vk = v.pow(k);
    let t_inv = t.inverse()?;
    let inner = aut_commutator(&t_inv, &modification_of(&vk, &d_prime)?)?;
    let outer = t.compose(&modification_of(f, &d_prime)?);
    let lhs = aut_commutator(&outer, &inner)?;
    let one = Rational::one();
    let factor = (&one - scalar.recip()) * (&one - &scalar);
    let rhs = modification_of(&vk.scale(&factor), &d_prime)?;
    Ok(NonfenceReport {
        mu,
        rho,
        scalar,
        lhs,
        rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;
    use crate::arith::text::parse_poly;
    use crate::delta_family::make_context;

    fn k(s: &str) -> Poly {
        parse_poly(s, &Vars::zp()).unwrap()
    }

    fn law() -> GroupLaw {
        GroupLaw::new(
            CharacterVector::new(vec![-2]),
            CharacterVector::new(vec![1]),
            CharacterVector::new(vec![2]),
            None,
            &k("z"),
        )
        .unwrap()
    }

    fn g(t: i64, h: &str, f: &str) -> GElem {
        GElem::new(vec![int(t)], k(h), k(f)).unwrap()
    }

    #[test]
    fn nu_is_forced_by_a_prime() {
        assert_eq!(law().nu, CharacterVector::new(vec![-1]));
        let bad = GroupLaw::new(
            CharacterVector::new(vec![-2]),
            CharacterVector::new(vec![1]),
            CharacterVector::new(vec![2]),
            Some(CharacterVector::new(vec![0])),
            &k("z"),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn product_fragments() {
        let l = law();
        assert_eq!(
            g_mul(&g(2, "0", "0"), &g(1, "z", "P"), &l).unwrap(),
            g(2, "z", "P")
        );
        assert_eq!(
            g_mul(&g(1, "1", "P"), &g(1, "2", "z"), &l).unwrap(),
            g(1, "3", "P - 2*z + z")
        );
        let a = g(3, "z", "P^2");
        assert!(g_mul(&a, &g_inverse(&a, &l).unwrap(), &l).unwrap().is_identity());
    }

    #[test]
    fn conjugating_the_fiber_by_the_torus() {
        // λ⁻¹ f λ = μ(λ) f(ρ₁z, ρ₂P) at λ = 2: μ = 1/4, ρ₁ = 2, ρ₂ = 4
        let l = law();
        let lam = g(2, "0", "0");
        let f = g(1, "0", "z*P");
        let conj = g_mul(&g_mul(&g_inverse(&lam, &l).unwrap(), &f, &l).unwrap(), &lam, &l).unwrap();
        assert_eq!(conj, g(1, "0", "2*z*P"));
    }

    #[test]
    fn commutator_identity_and_conventions() {
        let l = law();
        let q = k("z^2*P^2 - P");
        let c = commutator(&g(1, "0", "z^2*P^2 - P"), &g(1, "z + 1", "P^3"), &l).unwrap();
        assert_eq!(c.n.f, predicted_fiber_commutator(&q, &k("z + 1"), &l));
        assert!(c.n.h.is_zero());
        let alt = commutator_with(
            &g(1, "0", "z^2*P^2 - P"),
            &g(1, "z + 1", "P^3"),
            &l,
            CommutatorConvention::Inner,
        )
        .unwrap();
        assert_ne!(alt, c);
    }

    #[test]
    fn pres_lemma_isolates_fiber() {
        let l = law();
        let cands = [g(2, "0", "0"), g(1, "1", "0"), g(1, "0", "P"), GElem::identity(1)];
        let r = verify_pres_lemma(&l, &[vec![int(2)]], &cands, 0).unwrap();
        let passes: Vec<bool> = r.verdicts.iter().map(|v| v.1).collect();
        assert_eq!(passes, vec![false, false, true, true]);
        assert!(r.isolates_fiber());
    }

    #[test]
    fn char_commutator_examples() {
        let c = make_context(&"x*z + y^2".parse().unwrap(), &"1".parse().unwrap(), 3).unwrap();
        for (h, f) in [("0", "0"), ("1", "0"), ("z", "P")] {
            assert!(
                char_commutator_check(&c, &k(h), &k(f)).unwrap().holds(),
                "{h}, {f}"
            );
        }
    }

    #[test]
    fn nonfence_commutator() {
        let p = |s: &str| -> Poly { s.parse().unwrap() };
        let u1 = Automorphism::from_images(vec![p("x + 1"), p("y"), p("z")]).unwrap();
        // (αx, βy, γz) centralizes x + y z² iff α = βγ²
        let t = Automorphism::from_images(vec![p("1/2*x"), p("2*y"), p("1/2*z")]).unwrap();
        for k in [0, 1, 2] {
            let r = nonfence_commutator_check(&u1, &p("y*z^2"), &t, &p("z + y"), &p("y"), k).unwrap();
            assert!(r.holds(), "k = {k}");
        }
        let r = nonfence_commutator_check(&u1, &p("y*z^2"), &t, &p("z"), &p("y"), 0).unwrap();
        assert_eq!(r.scalar, int(2));
    }
}
