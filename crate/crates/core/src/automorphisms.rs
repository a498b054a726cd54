//! Polynomial automorphisms, stored by their pullbacks on the generators.
//!
//! Convention: `compose(g, h) = g ∘ h`, so `(g ∘ h)*(p) = h*(g*(p))`.
//!
//! Besides its images, an automorphism remembers the word of factors it was
//! built from (exponentials and explicit maps). Pulling a polynomial back
//! factor by factor is far cheaper than substituting high-degree composite
//! images, and the word also yields an inverse for free whenever every factor
//! is invertible.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::arith::{Monomial, Poly, Rational, Vars};
use crate::derivations::{logarithm, Derivation};
use crate::error::{Error, Result};
use crate::linalg::{CoefficientSystem, Matrix};

#[derive(Clone, Debug)]
enum Factor {
    Exp(Derivation),
    Map {
        images: Arc<[Poly]>,
        inverse: Option<Arc<[Poly]>>,
    },
}

impl Factor {
    fn pull_back(&self, p: &Poly) -> Poly {
        match self {
            Factor::Exp(d) => d.exp_series(p),
            Factor::Map { images, .. } => p.substitute(images).expect("ring checked at construction"),
        }
    }

    fn inverse(&self) -> Option<Factor> {
        match self {
            Factor::Exp(d) => Some(Factor::Exp(-d)),
            Factor::Map { images, inverse } => inverse.as_ref().map(|inv| Factor::Map {
                images: inv.clone(),
                inverse: Some(images.clone()),
            }),
        }
    }
}

#[derive(Clone)]
pub struct Automorphism {
    images: Vec<Poly>,
    word: Vec<Factor>,
}

impl PartialEq for Automorphism {
    fn eq(&self, other: &Self) -> bool {
        self.images == other.images
    }
}

impl Eq for Automorphism {}

impl Automorphism {
    pub fn identity(vars: &Vars) -> Self {
        Automorphism {
            images: (0..vars.len()).map(|i| Poly::var(vars, i)).collect(),
            word: Vec::new(),
        }
    }

    fn check_images(images: &[Poly]) -> Result<Vars> {
        let vars = images
            .first()
            .map(|p| p.vars().clone())
            .ok_or_else(|| Error::Precondition("no images".into()))?;
        if images.len() != vars.len() || images.iter().any(|p| p.vars() != &vars) {
            return Err(Error::Precondition(format!(
                "expected {} images in {:?}",
                vars.len(),
                vars
            )));
        }
        Ok(vars)
    }

    /// Endomorphism with the given pullbacks. Affine maps get their inverse
    /// attached automatically; anything else carries no inverse witness.
    pub fn from_images(images: Vec<Poly>) -> Result<Self> {
        Self::check_images(&images)?;
        let inverse = affine_inverse(&images).map(Arc::from);
        Ok(Automorphism {
            word: vec![Factor::Map {
                images: images.clone().into(),
                inverse,
            }],
            images,
        })
    }

    /// Endomorphism with an explicit inverse, verified in both orders.
    pub fn with_inverse(images: Vec<Poly>, inverse: Vec<Poly>) -> Result<Self> {
        let vars = Self::check_images(&images)?;
        if Self::check_images(&inverse)? != vars {
            return Err(Error::Precondition("inverse lives in another ring".into()));
        }
        let id = Automorphism::identity(&vars);
        let both_ways = images
            .iter()
            .map(|p| p.substitute(&inverse))
            .chain(inverse.iter().map(|p| p.substitute(&images)))
            .collect::<Result<Vec<_>, _>>()?;
        if both_ways[..vars.len()] != id.images[..] || both_ways[vars.len()..] != id.images[..] {
            return Err(Error::NotInvertible(
                "supplied inverse does not compose to the identity".into(),
            ));
        }
        Ok(Automorphism {
            word: vec![Factor::Map {
                images: images.clone().into(),
                inverse: Some(inverse.into()),
            }],
            images,
        })
    }

    /// `Exp(D)` without re-checking nilpotency.
    pub(crate) fn exp_unchecked(d: Derivation) -> Self {
        let vars = d.vars().clone();
        let images = (0..vars.len())
            .map(|i| d.exp_series(&Poly::var(&vars, i)))
            .collect();
        Automorphism {
            images,
            word: vec![Factor::Exp(d)],
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

    /// Largest total degree among the pullbacks.
    pub fn degree(&self) -> u32 {
        self.images
            .iter()
            .filter_map(Poly::total_degree)
            .max()
            .unwrap_or(0)
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, p)| *p == Poly::var(self.vars(), i))
    }

    /// `g*(p) = p ∘ g`.
    pub fn pull_back(&self, p: &Poly) -> Poly {
        if self.word.is_empty() {
            return p.clone();
        }
        self.word.iter().fold(p.clone(), |acc, f| f.pull_back(&acc))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        let images = self.images.iter().map(|p| other.pull_back(p)).collect();
        let mut word = self.word.clone();
        word.extend(other.word.iter().cloned());
        Automorphism { images, word }
    }

    pub fn has_inverse_witness(&self) -> bool {
        self.word.iter().all(|f| f.inverse().is_some())
    }

    /// Inverse from the factor word when available, otherwise through the
    /// logarithm (unipotent case) or by linear algebra (affine case).
    pub fn inverse(&self) -> Result<Automorphism> {
        if let Some(word) = self
            .word
            .iter()
            .rev()
            .map(Factor::inverse)
            .collect::<Option<Vec<_>>>()
        {
            return Ok(Self::from_word(self.vars(), word));
        }
        if let Some(inv) = affine_inverse(&self.images) {
            return Automorphism::with_inverse(inv, self.images.clone());
        }
        inverse_unipotent(self)
    }

    fn from_word(vars: &Vars, word: Vec<Factor>) -> Automorphism {
        let images = (0..vars.len())
            .map(|i| word.iter().fold(Poly::var(vars, i), |acc, f| f.pull_back(&acc)))
            .collect();
        Automorphism { images, word }
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `v = A⁻¹(w − b)` for an invertible affine map `w = A v + b`.
fn affine_inverse(images: &[Poly]) -> Option<Vec<Poly>> {
    let vars = images.first()?.vars().clone();
    let n = vars.len();
    if images.iter().any(|p| p.total_degree().unwrap_or(0) > 1) {
        return None;
    }
    let mut a = Matrix::zeros(n, n);
    for (i, p) in images.iter().enumerate() {
        for j in 0..n {
            a.set(i, j, p.coefficient(&Monomial::var(n, j, 1)));
        }
    }
    if a.rank() < n {
        return None;
    }
    let shifted: Vec<Poly> = images
        .iter()
        .enumerate()
        .map(|(i, p)| &Poly::var(&vars, i) - &Poly::constant(&vars, p.coefficient(&Monomial::one(n))))
        .collect();
    // Columns of A⁻¹: A c_j = e_j.
    let mut inv = vec![Poly::zero(&vars); n];
    for j in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[j] = Rational::one();
        let c = a.solve(&e)?;
        for (i, ci) in c.iter().enumerate() {
            inv[i] = &inv[i] + &shifted[j].scale(ci);
        }
    }
    Some(inv)
}

pub fn compose(g: &Automorphism, h: &Automorphism) -> Automorphism {
    g.compose(h)
}

/// `Exp(−log u)`.
pub fn inverse_unipotent(u: &Automorphism) -> Result<Automorphism> {
    let d = logarithm(u)?;
    Ok(Automorphism::exp_unchecked(-&d))
}

/// `u* − id` is nilpotent on the generators within the default cap.
pub fn is_unipotent(u: &Automorphism) -> bool {
    logarithm(u).is_ok()
}

pub fn commutes(g: &Automorphism, u: &Automorphism) -> bool {
    g.compose(u) == u.compose(g)
}

/// `[a, b] = a ∘ b ∘ a⁻¹ ∘ b⁻¹`.
pub fn commutator(a: &Automorphism, b: &Automorphism) -> Result<Automorphism> {
    Ok(a.compose(b).compose(&a.inverse()?).compose(&b.inverse()?))
}

/// The modification `f · u = Exp(f · log u)`; requires `f ∈ ker(log u)`.
pub fn modification(f: &Poly, u: &Automorphism) -> Result<Automorphism> {
    let d = logarithm(u)?;
    modification_of(f, &d)
}

/// `Exp(f · D)` for `f ∈ ker D`, with `D` locally nilpotent.
pub fn modification_of(f: &Poly, d: &Derivation) -> Result<Automorphism> {
    if !d.apply(f).is_zero() {
        return Err(Error::NotInKernel(f.to_string()));
    }
    Ok(Automorphism::exp_unchecked(d.times(f)))
}

/// `μ` with `g*(d) = μ · d`.
pub fn mu_character(g: &Automorphism, d: &Poly) -> Result<Rational> {
    let pulled = g.pull_back(d);
    pulled
        .ratio_to(d)
        .ok_or_else(|| Error::Precondition(format!("g*({d}) = {pulled} is not a multiple of {d}")))
}

/// Both sides of the conjugation formula for modifications.
#[derive(Clone, Debug)]
pub struct ConjugationReport {
    /// `g*(d) = mu · d`.
    pub mu: Rational,
    /// `g⁻¹ ∘ (f · u′) ∘ g`, computed by composition.
    pub conjugate: Automorphism,
    /// Coefficient `c` with `conjugate = c · u′` predicted from `mu` and `g*(f)`.
    pub predicted_coefficient: Poly,
    pub predicted: Automorphism,
}

impl ConjugationReport {
    pub fn holds(&self) -> bool {
        self.conjugate == self.predicted
    }
}

/// Checks `g⁻¹ ∘ (f · u′) ∘ g = (μ⁻¹ g*(f)) · u′` for `g` centralizing
/// `u = d · u′`, where `g*(d) = μ d`.
pub fn conjugation_formula_check(
    g: &Automorphism,
    f: &Poly,
    u_prime: &Automorphism,
    d: &Poly,
) -> Result<ConjugationReport> {
    let d_prime = logarithm(u_prime)?;
    if !d_prime.apply(d).is_zero() {
        return Err(Error::NotInKernel(d.to_string()));
    }
    let u = Automorphism::exp_unchecked(d_prime.times(d));
    if !commutes(g, &u) {
        return Err(Error::Precondition("g does not centralize d·u′".into()));
    }
    let mu = mu_character(g, d)?;
    let lhs_mod = modification_of(f, &d_prime)?;
    let conjugate = g.inverse()?.compose(&lhs_mod).compose(g);
    let predicted_coefficient = g.pull_back(f).scale(&mu.recip());
    let predicted = modification_of(&predicted_coefficient, &d_prime)?;
    Ok(ConjugationReport {
        mu,
        conjugate,
        predicted_coefficient,
        predicted,
    })
}

/// Products of the generators (as exponent vectors) with expanded total degree
/// at most `bound`.
fn generator_monomials(gens: &[Poly], bound: u32) -> Vec<Vec<u32>> {
    let degs: Vec<u32> = gens.iter().map(|g| g.total_degree().unwrap_or(0)).collect();
    let mut out = Vec::new();
    fn rec(degs: &[u32], left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let i = cur.len();
        if i == degs.len() {
            out.push(cur.clone());
            return;
        }
        let mut e = 0;
        loop {
            cur.push(e);
            rec(degs, left - e * degs[i], cur, out);
            cur.pop();
            if (e + 1) * degs[i] > left {
                break;
            }
            e += 1;
        }
    }
    rec(&degs, bound, &mut Vec::new(), &mut out);
    out
}

/// Writes `f` as a polynomial in `gens`, returned in `kernel_vars` (one
/// variable per generator). Products of expanded degree up to
/// `max(deg f, deg_max)` are tried.
pub fn express_in_kernel_as(f: &Poly, gens: &[Poly], kernel_vars: &Vars, deg_max: u32) -> Result<Poly> {
    if gens.len() != kernel_vars.len() {
        return Err(Error::Precondition("one kernel variable per generator".into()));
    }
    if gens.iter().any(Poly::is_constant) {
        return Err(Error::Precondition(
            "kernel generators must be non-constant".into(),
        ));
    }
    if f.is_zero() {
        return Ok(Poly::zero(kernel_vars));
    }
    let bound = f.total_degree().unwrap_or(0).max(deg_max);
    let exps = generator_monomials(gens, bound);
    let cols: Vec<Poly> = exps
        .iter()
        .map(|e| {
            gens.iter()
                .zip(e)
                .fold(Poly::one(f.vars()), |acc, (g, &k)| &acc * &g.pow(k))
        })
        .collect();
    let sys = CoefficientSystem::new(&cols, &[f]);
    let no_rep = || Error::NoSolution {
        what: format!("{f} is not a polynomial in the generators"),
        bound,
    };
    let rhs = sys.rhs(f).ok_or_else(no_rep)?;
    let coeffs = sys.matrix.solve(&rhs).ok_or_else(no_rep)?;
    Ok(Poly::from_terms(
        kernel_vars,
        exps.iter()
            .zip(coeffs)
            .map(|(e, c)| (Monomial::from_exponents(e), c)),
    ))
}

/// As [`express_in_kernel_as`], with fresh variables `k1, k2, …`.
pub fn express_in_kernel(f: &Poly, gens: &[Poly], deg_max: u32) -> Result<Poly> {
    let vars = Vars::new((1..=gens.len()).map(|i| format!("k{i}")));
    express_in_kernel_as(f, gens, &vars, deg_max)
}

/// The induced action on the quotient: `g*(gen_i)` re-expressed in the
/// generators, in `kernel_vars`.
pub fn quotient_action_as(
    g: &Automorphism,
    gens: &[Poly],
    kernel_vars: &Vars,
    deg_max: u32,
) -> Result<Vec<Poly>> {
    gens.iter()
        .map(|gen| express_in_kernel_as(&g.pull_back(gen), gens, kernel_vars, deg_max))
        .collect()
}

pub fn quotient_action(g: &Automorphism, gens: &[Poly], deg_max: u32) -> Result<Vec<Poly>> {
    let vars = Vars::new((1..=gens.len()).map(|i| format!("k{i}")));
    quotient_action_as(g, gens, &vars, deg_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    fn aut(images: [&str; 3]) -> Automorphism {
        Automorphism::from_images(images.iter().map(|s| p(s)).collect()).unwrap()
    }

    fn delta() -> Derivation {
        Derivation::delta(&p("x*z + y^2"))
    }

    #[test]
    fn composition_basics() {
        let t = aut(["x + 1", "y", "z"]);
        assert_eq!(t.compose(&t), aut(["x + 2", "y", "z"]));
        assert_eq!(t.compose(&Automorphism::identity(&Vars::xyz())), t);
        let e = delta().exponential().unwrap();
        let e_inv = (-&delta()).exponential().unwrap();
        assert!(e.compose(&e_inv).is_identity());
    }

    #[test]
    fn composition_order() {
        // g ∘ h pulls back through g first: (g ∘ h)*(x) = h*(g*(x)).
        let g = aut(["x + y", "y", "z"]);
        let h = aut(["x", "y + z", "z"]);
        assert_eq!(g.compose(&h).image(0), &p("x + y + z"));
        assert_eq!(h.compose(&g).image(1), &p("y + z"));
    }

    #[test]
    fn inverses() {
        let e = delta().exponential().unwrap();
        assert_eq!(
            inverse_unipotent(&e).unwrap().images(),
            &[p("x + 2*y - z"), p("y - z"), p("z")]
        );
        assert_eq!(
            inverse_unipotent(&aut(["x + 1", "y", "z"])).unwrap(),
            aut(["x - 1", "y", "z"])
        );
        assert!(inverse_unipotent(&aut(["2*x", "y", "z"])).is_err());
        let affine = aut(["2*x + y", "y - 3", "z + x"]);
        assert!(affine.compose(&affine.inverse().unwrap()).is_identity());
        assert!(affine.inverse().unwrap().compose(&affine).is_identity());
    }

    #[test]
    fn commutation() {
        let e = delta().exponential().unwrap();
        let ez = delta().times(&p("z")).exponential().unwrap();
        assert!(commutes(&e, &ez));
        let t = aut(["x + 1", "y", "z"]);
        assert!(commutes(&aut(["x", "z", "y"]), &t));
        assert!(!commutes(&aut(["y", "x", "z"]), &t));
    }

    #[test]
    fn modifications() {
        let e = delta().exponential().unwrap();
        assert_eq!(modification(&p("1"), &e).unwrap(), e);
        assert_eq!(
            modification(&p("z"), &e).unwrap(),
            delta().times(&p("z")).exponential().unwrap()
        );
        assert!(modification(&p("x"), &aut(["x + 1", "y", "z"])).is_err());
    }

    #[test]
    fn mu_values() {
        let g = aut(["x", "y", "-z"]);
        assert_eq!(mu_character(&g, &p("z^2")).unwrap(), int(1));
        assert_eq!(mu_character(&g, &p("z^3")).unwrap(), int(-1));
        assert!(mu_character(&aut(["x", "y", "z + 1"]), &p("z")).is_err());
    }

    #[test]
    fn conjugation_by_reflection() {
        let g = aut(["x", "y", "-z"]);
        let u1 = aut(["x + 1", "y", "z"]);
        let r = conjugation_formula_check(&g, &p("z"), &u1, &p("z^2")).unwrap();
        assert!(r.holds());
        assert_eq!(r.predicted_coefficient, p("-z"));
        assert!(conjugation_formula_check(&g, &p("z"), &u1, &p("z^3")).is_err());
        let g = aut(["-x", "y", "-z"]);
        let r = conjugation_formula_check(&g, &p("z"), &u1, &p("z^3")).unwrap();
        assert_eq!(r.mu, int(-1));
        assert_eq!(r.predicted_coefficient, p("z"));
        assert!(r.holds());
    }

    #[test]
    fn conjugation_by_scaling_inverts_mu() {
        let g = aut(["2*x", "y", "2*z"]);
        let u1 = aut(["x + 1", "y", "z"]);
        let r = conjugation_formula_check(&g, &p("y"), &u1, &p("z")).unwrap();
        assert_eq!(r.mu, int(2));
        assert_eq!(r.conjugate.image(0), &p("x + 1/2*y"));
        assert!(r.holds());
    }

    #[test]
    fn kernel_expressions() {
        let gens = [p("z"), p("x*z + y^2")];
        assert_eq!(
            express_in_kernel(&p("z^2"), &gens, 0).unwrap().to_string(),
            "k1^2"
        );
        assert_eq!(
            express_in_kernel(&p("x*z + y^2 + 3*z"), &gens, 0)
                .unwrap()
                .to_string(),
            "3*k1 + k2"
        );
        assert!(express_in_kernel(&p("x"), &gens, 4).is_err());
    }

    #[test]
    fn quotient_actions() {
        let gens = [p("z"), p("x*z + y^2")];
        let e = aut(["x - 1", "y", "z"]);
        let q = quotient_action_as(&e, &gens, &Vars::zp(), 0).unwrap();
        assert_eq!(q[0].to_string(), "z");
        assert_eq!(q[1].to_string(), "-z + P");
        // (x, y, −z) sends x z + y² to y² − x z, which is outside Q[z, P]
        assert!(quotient_action_as(&aut(["x", "y", "-z"]), &gens, &Vars::zp(), 4).is_err());
        let r = quotient_action_as(&aut(["-x", "y", "-z"]), &gens, &Vars::zp(), 0).unwrap();
        assert_eq!((r[0].to_string(), r[1].to_string()), ("-z".into(), "P".into()));
    }
}
