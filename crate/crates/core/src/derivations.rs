//! Derivations of a polynomial ring, given by their images on the generators.
//!
//! Everything here is exact. Local nilpotency is only ever *witnessed*: a
//! derivation either reaches zero on every generator within the iteration cap
//! or the answer is "inconclusive"; nothing in this module claims a derivation
//! is not locally nilpotent.

use std::fmt;

use num_traits::{One, Zero};

use crate::arith::{gcd_all, monomials_up_to, Monomial, Poly, Rational, Vars};
use crate::automorphisms::Automorphism;
use crate::error::{Error, Result};
use crate::linalg::{combine, CoefficientSystem, Matrix};

/// Iteration cap used when none is given explicitly.
pub const DEFAULT_NILPOTENCY_CAP: usize = 64;

/// Iterates are abandoned (as inconclusive) once they grow past this many
/// terms; keeps hostile inputs from exhausting memory.
const TERM_GUARD: usize = 50_000;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Derivation {
    images: Vec<Poly>,
}

impl Derivation {
    /// Derivation with `images[i] = D(v_i)`. All images must live in the same
    /// ring, with one image per variable of that ring.
    pub fn new(images: Vec<Poly>) -> Result<Self> {
        let vars = images
            .first()
            .map(|p| p.vars().clone())
            .ok_or_else(|| Error::Precondition("a derivation needs at least one image".into()))?;
        if images.len() != vars.len() || images.iter().any(|p| p.vars() != &vars) {
            return Err(Error::Precondition(format!(
                "expected {} images in {:?}",
                vars.len(),
                vars
            )));
        }
        Ok(Derivation { images })
    }

    pub fn xyz(dx: Poly, dy: Poly, dz: Poly) -> Self {
        Self::new(vec![dx, dy, dz]).expect("images must live in Q[x, y, z]")
    }

    pub fn zero(vars: &Vars) -> Self {
        Derivation {
            images: vec![Poly::zero(vars); vars.len()],
        }
    }

    /// `∂/∂v_i`.
    pub fn partial(vars: &Vars, i: usize) -> Self {
        let mut d = Self::zero(vars);
        d.images[i] = Poly::one(vars);
        d
    }

    /// `Δ_P = −P_y ∂/∂x + P_x ∂/∂y` on `Q[x, y, z]`; kills `z` and `P`.
    pub fn delta(p: &Poly) -> Self {
        let vars = p.vars();
        assert_eq!(vars.len(), 3, "Δ_P lives on Q[x, y, z]");
        Derivation {
            images: vec![-p.partial(1), p.partial(0), Poly::zero(vars)],
        }
    }

    pub fn vars(&self) -> &Vars {
        self.images[0].vars()
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &Poly {
        &self.images[i]
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(Poly::is_zero)
    }

    /// Leibniz extension: `D(p) = Σ ∂p/∂v_i · D(v_i)`.
    pub fn apply(&self, p: &Poly) -> Poly {
        let mut out = Poly::zero(self.vars());
        for (i, img) in self.images.iter().enumerate() {
            if img.is_zero() || !p.depends_on(i) {
                continue;
            }
            out = &out + &(&p.partial(i) * img);
        }
        out
    }

    /// `f · D`.
    pub fn times(&self, f: &Poly) -> Derivation {
        Derivation {
            images: self.images.iter().map(|g| f * g).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Derivation {
        Derivation {
            images: self.images.iter().map(|g| g.scale(c)).collect(),
        }
    }

    /// Exact division of every image by `d`.
    pub fn divide_by(&self, d: &Poly) -> Result<Derivation> {
        Ok(Derivation {
            images: self
                .images
                .iter()
                .map(|g| g.divide_exact(d))
                .collect::<Result<_, _>>()?,
        })
    }

    /// `[D, E](v) = D(E(v)) − E(D(v))`.
    pub fn lie_bracket(&self, other: &Derivation) -> Derivation {
        Derivation {
            images: self
                .images
                .iter()
                .zip(&other.images)
                .map(|(d, e)| &self.apply(e) - &other.apply(d))
                .collect(),
        }
    }

    /// Monic gcd of the images. Zero derivations have no content.
    pub fn content(&self) -> Result<Poly> {
        if self.is_zero() {
            return Err(Error::Precondition("the zero derivation has no content".into()));
        }
        Ok(gcd_all(&self.images)?)
    }

    /// Irreducible: nonzero, and the images have no common non-unit factor.
    pub fn is_irreducible(&self) -> Result<bool> {
        Ok(self.content()?.is_constant())
    }

    pub fn nilpotency(&self, cap: usize) -> NilpotencyEvidence {
        let n = self.images.len();
        let mut orders = Vec::with_capacity(n);
        let mut used = 0;
        for i in 0..n {
            let mut cur = Poly::var(self.vars(), i);
            let mut k = 0;
            loop {
                if cur.is_zero() {
                    orders.push(k);
                    break;
                }
                if k == cap || cur.num_terms() > TERM_GUARD {
                    return NilpotencyEvidence {
                        status: NilpotencyStatus::Inconclusive,
                        vanishing_orders: Vec::new(),
                        iterations_used: used,
                    };
                }
                cur = self.apply(&cur);
                k += 1;
                used += 1;
            }
        }
        NilpotencyEvidence {
            status: NilpotencyStatus::Nilpotent,
            vanishing_orders: orders,
            iterations_used: used,
        }
    }

    pub fn is_locally_nilpotent(&self) -> bool {
        self.nilpotency(DEFAULT_NILPOTENCY_CAP).is_nilpotent()
    }

    /// `Σ D^k(p) / k!`. Terminates for locally nilpotent `D`; callers must have
    /// established that.
    pub fn exp_series(&self, p: &Poly) -> Poly {
        let mut term = p.clone();
        let mut sum = p.clone();
        let mut k = 0i64;
        loop {
            term = self.apply(&term);
            if term.is_zero() {
                return sum;
            }
            k += 1;
            term = term.scale(&Rational::new(1.into(), k.into()));
            sum = &sum + &term;
        }
    }

    /// `Exp(D)`, after checking nilpotency on the generators.
    pub fn exponential(&self) -> Result<Automorphism> {
        let ev = self.nilpotency(DEFAULT_NILPOTENCY_CAP);
        if !ev.is_nilpotent() {
            return Err(Error::NilpotencyInconclusive {
                cap: DEFAULT_NILPOTENCY_CAP,
            });
        }
        Ok(Automorphism::exp_unchecked(self.clone()))
    }
}

impl std::ops::Add for &Derivation {
    type Output = Derivation;
    fn add(self, rhs: &Derivation) -> Derivation {
        Derivation {
            images: self.images.iter().zip(&rhs.images).map(|(a, b)| a + b).collect(),
        }
    }
}

impl std::ops::Sub for &Derivation {
    type Output = Derivation;
    fn sub(self, rhs: &Derivation) -> Derivation {
        Derivation {
            images: self.images.iter().zip(&rhs.images).map(|(a, b)| a - b).collect(),
        }
    }
}

impl std::ops::Neg for &Derivation {
    type Output = Derivation;
    fn neg(self) -> Derivation {
        Derivation {
            images: self.images.iter().map(|a| -a).collect(),
        }
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{ ")?;
        for (i, img) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{} -> {}", self.vars().name(i), img)?;
        }
        write!(f, " }}")
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NilpotencyStatus {
    Nilpotent,
    Inconclusive,
}

/// `vanishing_orders[i]` is the least `k` with `D^k(v_i) = 0`; empty unless
/// the status is `Nilpotent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotencyEvidence {
    pub status: NilpotencyStatus,
    pub vanishing_orders: Vec<usize>,
    pub iterations_used: usize,
}

impl NilpotencyEvidence {
    pub fn is_nilpotent(&self) -> bool {
        self.status == NilpotencyStatus::Nilpotent
    }
}

/// `log u = Σ (−1)^{k+1} (u* − id)^k / k`, evaluated on each generator.
pub fn logarithm(u: &Automorphism) -> Result<Derivation> {
    logarithm_with_cap(u, DEFAULT_NILPOTENCY_CAP)
}

pub fn logarithm_with_cap(u: &Automorphism, cap: usize) -> Result<Derivation> {
    let vars = u.vars().clone();
    let mut images = Vec::with_capacity(vars.len());
    for i in 0..vars.len() {
        let v = Poly::var(&vars, i);
        let mut w = &u.image(i).clone() - &v;
        let mut acc = Poly::zero(&vars);
        let mut k = 1i64;
        while !w.is_zero() {
            if k as usize > cap || w.num_terms() > TERM_GUARD {
                return Err(Error::LogarithmCapExceeded { cap });
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc = &acc + &w.scale(&Rational::new(sign.into(), k.into()));
            w = &u.pull_back(&w) - &w;
            k += 1;
        }
        images.push(acc);
    }
    Derivation::new(images)
}

/// A plinth element: `D(q) = a` with `a` a nonzero kernel element of least
/// degree found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plinth {
    pub q: Poly,
    pub a: Poly,
}

/// Products of kernel generators whose expanded total degree is at most `k`.
fn generator_products(gens: &[Poly], k: u32) -> Vec<Poly> {
    let degs: Vec<u32> = gens.iter().map(|g| g.total_degree().unwrap_or(0)).collect();
    let mut out = Vec::new();
    fn rec(gens: &[Poly], degs: &[u32], left: u32, i: usize, acc: Poly, out: &mut Vec<Poly>) {
        if i == gens.len() {
            out.push(acc);
            return;
        }
        let mut cur = acc;
        let mut used = 0;
        loop {
            rec(gens, degs, left - used, i + 1, cur.clone(), out);
            if degs[i] == 0 || used + degs[i] > left {
                break;
            }
            used += degs[i];
            cur = &cur * &gens[i];
        }
    }
    rec(gens, &degs, k, 0, Poly::one(gens[0].vars()), &mut out);
    out
}

/// Search for `(Q, a)` with `D(Q) = a ≠ 0` a polynomial in the kernel
/// generators, `deg Q ≤ deg_max`, minimizing `deg a` and then the graded-lex
/// leading monomial of `a`. `a` is returned monic.
pub fn plinth_search(d: &Derivation, kernel_gens: &[Poly], deg_max: u32) -> Result<Plinth> {
    if kernel_gens.is_empty() {
        return Err(Error::Precondition("no kernel generators given".into()));
    }
    for g in kernel_gens {
        if !d.apply(g).is_zero() {
            return Err(Error::NotInKernel(g.to_string()));
        }
    }
    let vars = d.vars().clone();
    let mut candidates: Vec<Monomial> = monomials_up_to(vars.len(), deg_max);
    candidates.retain(|m| m.degree() > 0);
    candidates.reverse();
    let q_basis: Vec<Poly> = candidates
        .into_iter()
        .map(|m| Poly::monomial(&vars, m, Rational::one()))
        .collect();
    let images: Vec<Poly> = q_basis.iter().map(|q| d.apply(q)).collect();
    let max_a = images.iter().filter_map(Poly::total_degree).max().unwrap_or(0);
    let img_system = CoefficientSystem::new(&images, &[]);

    for k in 0..=max_a {
        let prods = generator_products(kernel_gens, k);
        let neg: Vec<Poly> = prods.iter().map(|p| -p).collect();
        let mut cols = images.clone();
        cols.extend(neg);
        let sys = CoefficientSystem::new(&cols, &[]);
        let null = sys.matrix.nullspace();
        let n_img = images.len();
        let a_span: Vec<Poly> = null
            .iter()
            .map(|v| combine(&prods, &v[n_img..], &Poly::zero(&vars)))
            .filter(|a| !a.is_zero())
            .collect();
        if a_span.is_empty() {
            continue;
        }
        let a = smallest_in_span(&a_span).monic();
        let rhs = img_system
            .rhs(&a)
            .ok_or_else(|| Error::Inconsistent("plinth value outside the image span".into()))?;
        let coeffs = img_system
            .matrix
            .solve(&rhs)
            .ok_or_else(|| Error::Inconsistent("plinth value has no preimage".into()))?;
        let q = combine(&q_basis, &coeffs, &Poly::zero(&vars));
        debug_assert_eq!(d.apply(&q), a);
        return Ok(Plinth { q, a });
    }
    Err(Error::NoSolution {
        what: "no polynomial maps into the kernel generators".into(),
        bound: deg_max,
    })
}

/// The element of the span with the smallest graded-lex leading monomial.
fn smallest_in_span(span: &[Poly]) -> Poly {
    let vars = span[0].vars().clone();
    let sys = CoefficientSystem::new(span, &[]);
    // Rows = monomials in descending order, columns = polys; transpose so that
    // each row is a polynomial and the columns run from the largest monomial.
    let mut order: Vec<usize> = (0..sys.monomials.len()).collect();
    order.sort_by(|&i, &j| sys.monomials[j].cmp(&sys.monomials[i]));
    let mut m = Matrix::zeros(span.len(), order.len());
    for (c, &row) in order.iter().enumerate() {
        for p in 0..span.len() {
            m.set(p, c, sys.matrix.get(row, p).clone());
        }
    }
    let rank = m.rref().len();
    let last = rank - 1;
    Poly::from_terms(
        &vars,
        order
            .iter()
            .enumerate()
            .map(|(c, &row)| (sys.monomials[row].clone(), m.get(last, c).clone())),
    )
}

/// A polynomial `f` with `D(f) ≠ 0` and `D²(f) = 0`, of degree at most
/// `deg_max`, with the smallest leading monomial among a basis of candidates.
pub fn preslice_search(d: &Derivation, deg_max: u32) -> Result<Poly> {
    if d.is_zero() {
        return Err(Error::Precondition("zero derivation".into()));
    }
    let vars = d.vars().clone();
    for deg in 1..=deg_max {
        let basis: Vec<Poly> = monomials_up_to(vars.len(), deg)
            .into_iter()
            .filter(|m| m.degree() > 0)
            .map(|m| Poly::monomial(&vars, m, Rational::one()))
            .collect();
        let second: Vec<Poly> = basis.iter().map(|b| d.apply(&d.apply(b))).collect();
        let sys = CoefficientSystem::new(&second, &[]);
        let null = if sys.monomials.is_empty() {
            (0..basis.len())
                .map(|j| {
                    let mut v = vec![Rational::zero(); basis.len()];
                    v[j] = Rational::one();
                    v
                })
                .collect()
        } else {
            sys.matrix.nullspace()
        };
        let mut found: Vec<Poly> = null
            .iter()
            .map(|v| combine(&basis, v, &Poly::zero(&vars)))
            .filter(|f| !d.apply(f).is_zero())
            .collect();
        if found.is_empty() {
            continue;
        }
        found.sort_by(|a, b| a.leading_term().unwrap().0.cmp(b.leading_term().unwrap().0));
        return Ok(found.swap_remove(0).monic());
    }
    Err(Error::NoSolution {
        what: "no preslice".into(),
        bound: deg_max,
    })
}

/// `u = Exp(d · D′)` with `D′` irreducible.
#[derive(Clone, Debug)]
pub struct StandardDecomposition {
    pub d: Poly,
    pub d_prime: Derivation,
    pub u_prime: Automorphism,
}

pub fn standard_decomposition(u: &Automorphism) -> Result<StandardDecomposition> {
    if u.is_identity() {
        return Err(Error::Precondition(
            "the identity has no standard decomposition".into(),
        ));
    }
    let big_d = logarithm(u)?;
    standard_decomposition_of(&big_d)
}

/// Standard decomposition of `Exp(D)` given `D` itself.
pub fn standard_decomposition_of(big_d: &Derivation) -> Result<StandardDecomposition> {
    let d = big_d.content()?;
    let d_prime = big_d.divide_by(&d)?;
    if !big_d.apply(&d).is_zero() {
        return Err(Error::Inconsistent(format!(
            "content {d} is not a kernel element"
        )));
    }
    if !d_prime.is_irreducible()? {
        return Err(Error::Inconsistent("stripped derivation is reducible".into()));
    }
    let u_prime = d_prime.exponential()?;
    Ok(StandardDecomposition { d, d_prime, u_prime })
}

/// Outcome of checking `[fF, B] = f[F, B] − B(f)F` and the saturation
/// conclusion drawn from it.
#[derive(Clone, Debug)]
pub struct SatReport {
    /// `[fF, B]`.
    pub bracket: Derivation,
    /// `B(f)`.
    pub b_of_f: Poly,
    /// `[F, B]`.
    pub f_bracket: Derivation,
    /// Whether `[fF, B] = f[F, B] − B(f)F` held exactly.
    pub identity_holds: bool,
}

impl SatReport {
    pub fn bracket_vanishes(&self) -> bool {
        self.bracket.is_zero()
    }

    /// When the bracket vanishes, both `B(f)` and `[F, B]` must vanish too.
    pub fn conclusion_holds(&self) -> bool {
        !self.bracket_vanishes() || (self.b_of_f.is_zero() && self.f_bracket.is_zero())
    }

    pub fn holds(&self) -> bool {
        self.identity_holds && self.conclusion_holds()
    }
}

pub fn sat_instance_check(b: &Derivation, f_der: &Derivation, f: &Poly) -> Result<SatReport> {
    if !f_der.apply(f).is_zero() {
        return Err(Error::NotInKernel(f.to_string()));
    }
    if !f_der.is_locally_nilpotent() {
        return Err(Error::NilpotencyInconclusive {
            cap: DEFAULT_NILPOTENCY_CAP,
        });
    }
    let bracket = f_der.times(f).lie_bracket(b);
    let f_bracket = f_der.lie_bracket(b);
    let b_of_f = b.apply(f);
    let rhs = &f_bracket.times(f) - &f_der.times(&b_of_f);
    Ok(SatReport {
        identity_holds: rhs == bracket,
        bracket,
        b_of_f,
        f_bracket,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    fn delta() -> Derivation {
        Derivation::delta(&p("x*z + y^2"))
    }

    #[test]
    fn delta_images_and_kernel() {
        let d = delta();
        assert_eq!(d.image(0), &p("-2*y"));
        assert_eq!(d.image(1), &p("z"));
        assert!(d.apply(&p("x*z + y^2")).is_zero());
        assert!(d.apply(&p("7")).is_zero());
    }

    #[test]
    fn vanishing_orders() {
        let dx = Derivation::partial(&Vars::xyz(), 0);
        assert_eq!(dx.nilpotency(64).vanishing_orders, vec![2, 1, 1]);
        assert_eq!(delta().nilpotency(64).vanishing_orders, vec![3, 2, 1]);
        let euler = Derivation::xyz(p("x"), p("0"), p("0"));
        assert_eq!(euler.nilpotency(200).status, NilpotencyStatus::Inconclusive);
    }

    #[test]
    fn exponentials() {
        let e = delta().exponential().unwrap();
        assert_eq!(e.images(), &[p("x - 2*y - z"), p("y + z"), p("z")]);
        let ez = delta().times(&p("z")).exponential().unwrap();
        assert_eq!(ez.images(), &[p("x - 2*y*z - z^3"), p("y + z^2"), p("z")]);
    }

    #[test]
    fn logarithm_roundtrip_and_failure() {
        let d = delta();
        assert_eq!(logarithm(&d.exponential().unwrap()).unwrap(), d);
        let t = Automorphism::from_images(vec![p("x + 1"), p("y"), p("z")]).unwrap();
        assert_eq!(logarithm(&t).unwrap(), Derivation::partial(&Vars::xyz(), 0));
        let s = Automorphism::from_images(vec![p("2*x"), p("y"), p("z")]).unwrap();
        assert!(matches!(logarithm(&s), Err(Error::LogarithmCapExceeded { .. })));
    }

    #[test]
    fn brackets() {
        let d = delta();
        let e = Derivation::delta(&p("y"));
        assert_eq!(e, Derivation::xyz(p("-1"), p("0"), p("0")));
        assert!(d.lie_bracket(&e).is_zero());
        assert!(d.lie_bracket(&d).is_zero());
    }

    #[test]
    fn plinths() {
        let gens = [p("z"), p("x*z + y^2")];
        let pl = plinth_search(&delta(), &gens, 3).unwrap();
        assert_eq!((pl.q, pl.a), (p("y"), p("z")));
        let pl = plinth_search(&delta().times(&p("z")), &gens, 3).unwrap();
        assert_eq!((pl.q, pl.a), (p("y"), p("z^2")));
        let dx = Derivation::partial(&Vars::xyz(), 0);
        let pl = plinth_search(&dx, &[p("y"), p("z")], 1).unwrap();
        assert_eq!((pl.q, pl.a), (p("x"), p("1")));
        assert!(matches!(
            plinth_search(&delta(), &[p("x")], 3),
            Err(Error::NotInKernel(_))
        ));
    }

    #[test]
    fn irreducibility() {
        assert!(delta().is_irreducible().unwrap());
        assert!(!delta().times(&p("z")).is_irreducible().unwrap());
        assert!(Derivation::zero(&Vars::xyz()).is_irreducible().is_err());
    }

    #[test]
    fn standard_decompositions() {
        let sd = standard_decomposition(&delta().times(&p("z")).exponential().unwrap()).unwrap();
        assert_eq!(sd.d, p("z"));
        assert_eq!(sd.d_prime, delta());
        let modified = Derivation::xyz(p("z^2 + 1"), p("0"), p("0"));
        let sd = standard_decomposition(&modified.exponential().unwrap()).unwrap();
        assert_eq!(sd.d, p("z^2 + 1"));
        assert_eq!(sd.u_prime.images(), &[p("x + 1"), p("y"), p("z")]);
    }

    #[test]
    fn preslices() {
        assert_eq!(preslice_search(&delta(), 2).unwrap(), p("y"));
        assert_eq!(preslice_search(&delta().times(&p("z")), 2).unwrap(), p("y"));
        let dx = Derivation::partial(&Vars::xyz(), 0);
        assert_eq!(preslice_search(&dx, 1).unwrap(), p("x"));
    }

    #[test]
    fn sat_examples() {
        let d = delta();
        let r = sat_instance_check(&d, &d, &p("z")).unwrap();
        assert!(r.bracket_vanishes() && r.holds());
        let dz = Derivation::partial(&Vars::xyz(), 2);
        let r = sat_instance_check(&dz, &d, &p("z")).unwrap();
        assert!(!r.bracket_vanishes() && r.holds());
        assert_eq!(r.b_of_f, p("1"));
        let e = Derivation::delta(&p("y"));
        let r = sat_instance_check(&e, &d, &p("x*z + y^2")).unwrap();
        assert!(!r.bracket_vanishes() && r.holds());
        assert_eq!(r.bracket, d.times(&p("z")));
        assert!(sat_instance_check(&e, &d, &p("x")).is_err());
    }

    #[test]
    fn scaled_exponential_is_translation() {
        let dx = Derivation::partial(&Vars::xyz(), 0).scale(&int(3));
        assert_eq!(dx.exponential().unwrap().image(0), &p("x + 3"));
    }
}
