use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use smallvec::SmallVec;

use super::rational::{int, Rational};
use super::ArithError;

/// Ordered list of variable names. Position 0 is the largest variable in the
/// graded-lex order.
#[derive(Clone)]
pub struct Vars(Arc<[String]>);

static XYZ: Lazy<Vars> = Lazy::new(|| Vars::new(["x", "y", "z"]));
static ZP: Lazy<Vars> = Lazy::new(|| Vars::new(["z", "P"]));

impl Vars {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Vars(names.into_iter().map(Into::into).collect::<Vec<_>>().into())
    }

    /// The ambient ring `Q[x, y, z]`.
    pub fn xyz() -> Self {
        XYZ.clone()
    }

    /// Abstract kernel coordinates `Q[z, P]`.
    pub fn zp() -> Self {
        ZP.clone()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

impl PartialEq for Vars {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Vars {}

impl fmt::Debug for Vars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Exponent vector. The derived ordering compares total degree first and then
/// exponents lexicographically, which is exactly graded-lex.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    deg: u32,
    exps: SmallVec<[u32; 4]>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial {
            deg: 0,
            exps: SmallVec::from_elem(0, nvars),
        }
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        Monomial {
            deg: exps.iter().sum(),
            exps: SmallVec::from_slice(exps),
        }
    }

    pub fn var(nvars: usize, i: usize, e: u32) -> Self {
        let mut m = Self::one(nvars);
        m.exps[i] = e;
        m.deg = e;
        m
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.exps[i]
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            deg: self.deg + other.deg,
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial {
            deg: other.deg - self.deg,
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| b - a).collect(),
        }
    }

    pub fn with_exponent(&self, i: usize, e: u32) -> Monomial {
        let mut m = self.clone();
        m.deg = m.deg - m.exps[i] + e;
        m.exps[i] = e;
        m
    }
}

/// Every monomial in `nvars` variables of total degree at most `deg`, in
/// descending graded-lex order.
pub fn monomials_up_to(nvars: usize, deg: u32) -> Vec<Monomial> {
    fn rec(nvars: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if cur.len() == nvars {
            out.push(Monomial::from_exponents(cur));
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(nvars, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(nvars, deg, &mut Vec::with_capacity(nvars), &mut out);
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps.as_slice())
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms live in a `BTreeMap` keyed by graded-lex monomials, so iteration order
/// is canonical and the largest term is the last entry. No stored coefficient
/// is zero.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    vars: Vars,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(vars: &Vars) -> Self {
        Poly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn constant(vars: &Vars, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(vars.len()), c);
        }
        p
    }

    pub fn integer(vars: &Vars, c: i64) -> Self {
        Self::constant(vars, int(c))
    }

    /// The `i`-th variable as a polynomial.
    pub fn var(vars: &Vars, i: usize) -> Self {
        Self::monomial(vars, Monomial::var(vars.len(), i, 1), Rational::one())
    }

    pub fn var_named(vars: &Vars, name: &str) -> Result<Self, ArithError> {
        let i = vars
            .index_of(name)
            .ok_or_else(|| ArithError::UnknownVariable(name.to_string()))?;
        Ok(Self::var(vars, i))
    }

    pub fn monomial(vars: &Vars, m: Monomial, c: Rational) -> Self {
        debug_assert_eq!(m.exps.len(), vars.len());
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms<I>(vars: &Vars, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.deg == 0)
    }

    /// The value of a constant polynomial (zero included).
    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.deg == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + '_ {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> Rational {
        self.leading_term()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.deg).max()
    }

    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.exps[i]).max()
    }

    /// True when every monomial has zero exponent outside the listed variables.
    pub fn uses_only(&self, allowed: &[usize]) -> bool {
        self.terms.keys().all(|m| {
            m.exps
                .iter()
                .enumerate()
                .all(|(i, &e)| e == 0 || allowed.contains(&i))
        })
    }

    /// True when the polynomial lies in `Q[v]` for the named variable.
    pub fn is_univariate_in(&self, name: &str) -> bool {
        match self.vars.index_of(name) {
            Some(i) => self.uses_only(&[i]),
            None => self.is_constant(),
        }
    }

    /// Names of the variables that actually occur.
    pub fn names_used(&self) -> Vec<String> {
        (0..self.vars.len())
            .filter(|&i| self.depends_on(i))
            .map(|i| self.vars.name(i).to_string())
            .collect()
    }

    pub fn depends_on(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.exps[i] > 0)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_vars(&self, other: &Poly) -> Result<(), ArithError> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(ArithError::VarMismatch {
                left: format!("{:?}", self.vars),
                right: format!("{:?}", other.vars),
            })
        }
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly, ArithError> {
        self.check_vars(other)?;
        let (big, small) = if self.terms.len() >= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly, ArithError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly, ArithError> {
        self.check_vars(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(&self.vars));
        }
        if let Some(c) = other.constant_value() {
            return Ok(self.scale(&c));
        }
        if let Some(c) = self.constant_value() {
            return Ok(other.scale(&c));
        }
        let mut acc: HashMap<Monomial, Rational> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let prod = ca * cb;
                acc.entry(ma.mul(mb)).and_modify(|c| *c += &prod).or_insert(prod);
            }
        }
        Ok(Poly {
            vars: self.vars.clone(),
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.vars);
        }
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.vars);
        }
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut result = Poly::one(&self.vars);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Divide by the leading coefficient; zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
        }
    }

    /// Formal partial derivative in the `i`-th variable.
    pub fn partial(&self, i: usize) -> Poly {
        let mut out = Poly::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.exps[i];
            if e > 0 {
                out.terms.insert(m.with_exponent(i, e - 1), c * int(i64::from(e)));
            }
        }
        out
    }

    pub fn partial_named(&self, name: &str) -> Result<Poly, ArithError> {
        let i = self
            .vars
            .index_of(name)
            .ok_or_else(|| ArithError::UnknownVariable(name.to_string()))?;
        Ok(self.partial(i))
    }

    /// Antiderivative in the `i`-th variable with zero constant term.
    pub fn integrate(&self, i: usize) -> Poly {
        let mut out = Poly::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.exps[i] + 1;
            out.terms.insert(m.with_exponent(i, e), c / int(i64::from(e)));
        }
        out
    }

    /// Evaluate at `images[i]` for the `i`-th variable. All images must share a
    /// ring, which becomes the ring of the result.
    pub fn substitute(&self, images: &[Poly]) -> Result<Poly, ArithError> {
        if images.len() != self.vars.len() {
            return Err(ArithError::MissingImage(
                self.vars
                    .names()
                    .nth(images.len().min(self.vars.len()))
                    .unwrap_or("?")
                    .to_string(),
            ));
        }
        let target = match images.first() {
            Some(p) => p.vars.clone(),
            None => return Ok(self.clone()),
        };
        for img in images {
            if img.vars != target {
                return Err(ArithError::VarMismatch {
                    left: format!("{:?}", target),
                    right: format!("{:?}", img.vars),
                });
            }
        }
        let terms: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        let mut powers: Vec<Vec<Poly>> = images
            .iter()
            .map(|img| vec![Poly::one(&target), img.clone()])
            .collect();
        Ok(subst_rec(&terms, 0, images, &mut powers, &target))
    }

    /// Substitute by variable name; every variable of `self` needs an image.
    pub fn substitute_named(&self, images: &[(&str, Poly)]) -> Result<Poly, ArithError> {
        let imgs = self
            .vars
            .names()
            .map(|n| {
                images
                    .iter()
                    .find(|(k, _)| *k == n)
                    .map(|(_, p)| p.clone())
                    .ok_or_else(|| ArithError::MissingImage(n.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.substitute(&imgs)
    }

    /// Re-home the polynomial into a ring that contains all of its variables
    /// (matched by name).
    pub fn embed(&self, target: &Vars) -> Result<Poly, ArithError> {
        let map: Vec<Option<usize>> = self.vars.names().map(|n| target.index_of(n)).collect();
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut exps: SmallVec<[u32; 4]> = SmallVec::from_elem(0, target.len());
            for (i, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => exps[j] = e,
                    None => return Err(ArithError::UnknownVariable(self.vars.name(i).to_string())),
                }
            }
            out.add_term(Monomial::from_exponents(&exps), c.clone());
        }
        Ok(out)
    }

    /// Coefficients with respect to the `i`-th variable: `e ↦ coeff of v^e`.
    pub fn coefficients_in(&self, i: usize) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exps[i];
            out.entry(e)
                .or_insert_with(|| Poly::zero(&self.vars))
                .terms
                .insert(m.with_exponent(i, 0), c.clone());
        }
        out
    }

    /// `Some(λ)` with `self = λ·other` (other nonzero), `None` otherwise.
    pub fn ratio_to(&self, other: &Poly) -> Option<Rational> {
        if other.is_zero() || self.vars != other.vars {
            return None;
        }
        if self.terms.len() != other.terms.len() {
            return None;
        }
        let lambda = self.leading_coefficient() / other.leading_coefficient();
        if lambda.is_zero() {
            return None;
        }
        let ok = self
            .terms
            .iter()
            .zip(&other.terms)
            .all(|((ma, ca), (mb, cb))| ma == mb && *ca == cb * &lambda);
        ok.then_some(lambda)
    }

    pub fn map_coefficients(&self, f: impl Fn(&Rational) -> Rational) -> Poly {
        Poly::from_terms(&self.vars, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Exact division; errors when `q` does not divide `self`.
    pub fn divide_exact(&self, q: &Poly) -> Result<Poly, ArithError> {
        self.check_vars(q)?;
        if q.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        if let Some(c) = q.constant_value() {
            return Ok(self.scale(&c.recip()));
        }
        let (lm_q, lc_q) = {
            let (m, c) = q.leading_term().unwrap();
            (m.clone(), c.clone())
        };
        let mut rem = self.clone();
        let mut quot = Poly::zero(&self.vars);
        while let Some((lm, lc)) = rem.leading_term() {
            if !lm_q.divides(lm) {
                return Err(ArithError::NotDivisible);
            }
            let m = lm_q.quotient_of(lm);
            let c = lc / &lc_q;
            rem = rem.checked_sub(&q.mul_monomial(&m, &c))?;
            quot.add_term(m, c);
        }
        Ok(quot)
    }

    pub fn divides(&self, p: &Poly) -> bool {
        !self.is_zero() && p.divide_exact(self).is_ok()
    }
}

fn subst_rec(
    terms: &[(&Monomial, &Rational)],
    var: usize,
    images: &[Poly],
    powers: &mut Vec<Vec<Poly>>,
    target: &Vars,
) -> Poly {
    if terms.is_empty() {
        return Poly::zero(target);
    }
    if var == images.len() {
        let mut c = Rational::zero();
        for (_, v) in terms {
            c += *v;
        }
        return Poly::constant(target, c);
    }
    // Group by exponent of `var`; terms are sorted but not by this variable.
    let mut groups: BTreeMap<u32, Vec<(&Monomial, &Rational)>> = BTreeMap::new();
    for &(m, c) in terms {
        groups.entry(m.exps[var]).or_default().push((m, c));
    }
    let mut out = Poly::zero(target);
    for (e, group) in groups {
        let inner = subst_rec(&group, var + 1, images, powers, target);
        if inner.is_zero() {
            continue;
        }
        let e = e as usize;
        while powers[var].len() <= e {
            let next = &powers[var][powers[var].len() - 1] * &images[var];
            powers[var].push(next);
        }
        let term = if e == 0 { inner } else { &inner * &powers[var][e] };
        out = &out + &term;
    }
    out
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                self.$checked(rhs)
                    .expect("polynomials over different rings")
            }
        }
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl std::hash::Hash for Poly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        for (m, c) in &self.terms {
            m.hash(state);
            c.hash(state);
        }
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, vars: &Vars, m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.exps.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        f.write_str(vars.name(i))?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if m.deg == 0 {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                write_monomial(f, &self.vars, m)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::ratio;

    fn xyz() -> (Poly, Poly, Poly) {
        let v = Vars::xyz();
        (Poly::var(&v, 0), Poly::var(&v, 1), Poly::var(&v, 2))
    }

    #[test]
    fn difference_of_squares() {
        let (x, y, _) = xyz();
        assert_eq!((&x + &y) * (&x - &y), &x * &x - &y * &y);
    }

    #[test]
    fn zero_absorbs() {
        let (x, y, z) = xyz();
        let p = &x * &y + z;
        assert!((p * Poly::zero(&Vars::xyz())).is_zero());
    }

    #[test]
    fn square_of_xz_plus_y2() {
        let (x, y, z) = xyz();
        let p = &x * &z + &y * &y;
        let expected = x.pow(2) * z.pow(2) + (&x * &y.pow(2) * &z).scale(&int(2)) + y.pow(4);
        assert_eq!(&p * &p, expected);
    }

    #[test]
    fn display_is_graded_lex() {
        let (x, y, z) = xyz();
        let p = &y * &y + &x * &z - Poly::integer(&Vars::xyz(), 3) + z.scale(&ratio(-5, 7));
        assert_eq!(p.to_string(), "x*z + y^2 - 5/7*z - 3");
        assert_eq!((-x).to_string(), "-x");
    }

    #[test]
    fn substitution_is_pullback() {
        let (x, y, z) = xyz();
        let p = &x * &z + &y * &y;
        let images = [&x - y.scale(&int(2)) - &z, &y + &z, z.clone()];
        assert_eq!(p.substitute(&images).unwrap(), p);
        assert_eq!(p.substitute(&[x.clone(), y.clone(), z.clone()]).unwrap(), p);
        let odd = z.pow(3) - &z;
        assert_eq!(
            odd.substitute(&[x.clone(), y.clone(), -&z]).unwrap(),
            -odd.clone()
        );
    }

    #[test]
    fn substitution_needs_every_image() {
        let (x, y, _) = xyz();
        let p = &x * &y;
        let err = p.substitute_named(&[("x", y.clone())]).unwrap_err();
        assert!(matches!(err, ArithError::MissingImage(ref v) if v == "y"));
    }

    #[test]
    fn partials_and_integrals() {
        let (x, y, z) = xyz();
        let p = &x * &z + &y * &y;
        assert_eq!(p.partial(1), y.scale(&int(2)));
        assert!(Poly::integer(&Vars::xyz(), 5).partial(0).is_zero());
        assert!(Poly::zero(&Vars::xyz()).integrate(2).is_zero());
        let zp = Vars::zp();
        let big_p = Poly::var(&zp, 1);
        for i in 0..5u32 {
            assert_eq!(
                big_p.pow(i).integrate(1),
                big_p.pow(i + 1).scale(&ratio(1, i as i64 + 1))
            );
        }
    }

    #[test]
    fn exact_division() {
        let (x, y, z) = xyz();
        let p = &x * &z + &y * &y;
        assert_eq!((&p * &p).divide_exact(&p).unwrap(), p);
        assert_eq!(p.divide_exact(&Poly::one(&Vars::xyz())).unwrap(), p);
        let e = (&z + Poly::one(&Vars::xyz())).divide_exact(&z).unwrap_err();
        assert_eq!(e, ArithError::NotDivisible);
        assert_eq!(
            p.divide_exact(&Poly::zero(&Vars::xyz())).unwrap_err(),
            ArithError::DivisionByZero
        );
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let (x, _, _) = xyz();
        let p = Poly::var(&Vars::zp(), 1);
        assert!(matches!(x.checked_add(&p), Err(ArithError::VarMismatch { .. })));
    }

    #[test]
    fn proportionality() {
        let (x, y, _) = xyz();
        let p = &x + &y;
        assert_eq!(p.scale(&int(-3)).ratio_to(&p), Some(int(-3)));
        assert_eq!((&x - &y).ratio_to(&p), None);
    }

    #[test]
    fn embed_between_rings() {
        let zp = Vars::zp();
        let z = Poly::var(&zp, 0);
        let e = z.pow(2).embed(&Vars::xyz()).unwrap();
        assert_eq!(e, Poly::var(&Vars::xyz(), 2).pow(2));
        assert!(Poly::var(&zp, 1).embed(&Vars::xyz()).is_err());
    }
}
