//! Multivariate gcd over `Q` by recursive content / primitive-part reduction.
//!
//! A polynomial is viewed as univariate in its first occurring variable with
//! coefficients in the remaining variables. Contents are gcds of those
//! coefficients (recursively), and the primitive parts are combined with a
//! primitive pseudo-remainder sequence.

use num_traits::One;

use super::poly::{Monomial, Poly};
use super::rational::Rational;
use super::ArithError;

/// Greatest common divisor, normalized to graded-lex leading coefficient 1.
pub fn gcd(p: &Poly, q: &Poly) -> Result<Poly, ArithError> {
    if p.vars() != q.vars() {
        return Err(ArithError::VarMismatch {
            left: format!("{:?}", p.vars()),
            right: format!("{:?}", q.vars()),
        });
    }
    if p.is_zero() && q.is_zero() {
        return Err(ArithError::GcdOfZeros);
    }
    Ok(gcd_rec(p, q).monic())
}

/// Gcd of a list, skipping zeros. Errors only if every entry is zero.
pub fn gcd_all<'a, I>(polys: I) -> Result<Poly, ArithError>
where
    I: IntoIterator<Item = &'a Poly>,
{
    let mut acc: Option<Poly> = None;
    for p in polys {
        if p.is_zero() {
            continue;
        }
        acc = Some(match acc {
            None => p.monic(),
            Some(g) => {
                if g.is_one() {
                    return Ok(g);
                }
                gcd(&g, p)?
            }
        });
    }
    acc.ok_or(ArithError::GcdOfZeros)
}

fn first_var(p: &Poly, q: &Poly) -> Option<usize> {
    (0..p.vars().len()).find(|&i| p.depends_on(i) || q.depends_on(i))
}

fn gcd_rec(p: &Poly, q: &Poly) -> Poly {
    if p.is_zero() {
        return q.clone();
    }
    if q.is_zero() {
        return p.clone();
    }
    let v = match first_var(p, q) {
        Some(v) => v,
        None => return Poly::one(p.vars()),
    };
    if !q.depends_on(v) {
        return gcd_rec(&content(p, v), q);
    }
    if !p.depends_on(v) {
        return gcd_rec(p, &content(q, v));
    }
    let cp = content(p, v);
    let cq = content(q, v);
    let pp = p.divide_exact(&cp).expect("content divides");
    let qq = q.divide_exact(&cq).expect("content divides");
    let c = gcd_rec(&cp, &cq);
    let g = primitive_prs(pp, qq, v);
    &c * &g
}

/// Gcd of the coefficients of `p` viewed as a polynomial in variable `v`.
fn content(p: &Poly, v: usize) -> Poly {
    let mut acc = Poly::zero(p.vars());
    for c in p.coefficients_in(v).into_values() {
        acc = gcd_rec(&acc, &c).monic();
        if acc.is_constant() {
            return Poly::one(p.vars());
        }
    }
    acc
}

fn primitive_part(p: &Poly, v: usize) -> Poly {
    if p.is_zero() {
        return p.clone();
    }
    // Monic normalization keeps the rational coefficients from growing
    // along the remainder sequence.
    let c = content(p, v);
    p.divide_exact(&c).expect("content divides").monic()
}

fn primitive_prs(mut a: Poly, mut b: Poly, v: usize) -> Poly {
    if a.degree_in(v) < b.degree_in(v) {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        let r = pseudo_remainder(&a, &b, v);
        if r.is_zero() {
            return primitive_part(&b, v);
        }
        if r.degree_in(v) == Some(0) {
            return Poly::one(a.vars());
        }
        a = b;
        b = primitive_part(&r, v);
    }
}

/// Sparse pseudo-remainder of `a` by `b` in variable `v`.
fn pseudo_remainder(a: &Poly, b: &Poly, v: usize) -> Poly {
    let db = b.degree_in(v).unwrap_or(0);
    let coeffs = b.coefficients_in(v);
    let lc_b = coeffs[&db].clone();
    let mut r = a.clone();
    let one = Rational::one();
    while !r.is_zero() {
        let dr = r.degree_in(v).unwrap_or(0);
        if dr < db {
            break;
        }
        let lc_r = r.coefficients_in(v).remove(&dr).unwrap();
        let shift = Monomial::var(a.vars().len(), v, dr - db);
        r = &(&lc_b * &r) - &(&lc_r * &b.mul_monomial(&shift, &one));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::poly::Vars;
    use crate::arith::rational::int;

    fn xyz() -> (Poly, Poly, Poly) {
        let v = Vars::xyz();
        (Poly::var(&v, 0), Poly::var(&v, 1), Poly::var(&v, 2))
    }

    #[test]
    fn univariate_examples() {
        let (_, _, z) = xyz();
        let g = gcd(&z.pow(2), &(z.pow(3) - z.pow(2))).unwrap();
        assert_eq!(g, z.pow(2));
    }

    #[test]
    fn gcd_with_zero_is_normalized_input() {
        let (x, y, _) = xyz();
        let p = (&x + &y).scale(&int(-4));
        assert_eq!(gcd(&p, &Poly::zero(&Vars::xyz())).unwrap(), &x + &y);
        assert_eq!(
            gcd(&Poly::zero(&Vars::xyz()), &Poly::zero(&Vars::xyz())).unwrap_err(),
            ArithError::GcdOfZeros
        );
    }

    #[test]
    fn content_extraction() {
        let (_, y, z) = xyz();
        let g = gcd(&(&y * &z).scale(&int(-2)), &(&z * &z)).unwrap();
        assert_eq!(g, z);
    }

    #[test]
    fn multivariate_common_factor() {
        let (x, y, z) = xyz();
        let common = &x * &z + &y * &y + Poly::one(&Vars::xyz());
        let a = &common * &(&x - &z);
        let b = &common * &(&y.pow(2) + &z);
        assert_eq!(gcd(&a, &b).unwrap(), common.monic());
    }

    #[test]
    fn coprime_gives_one() {
        let (x, y, z) = xyz();
        assert!(gcd(&(&x * &y + &z), &(&x + Poly::one(&Vars::xyz())))
            .unwrap()
            .is_one());
    }
}
