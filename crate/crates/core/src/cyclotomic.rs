//! Cyclotomic polynomials and exact arithmetic in `Q[s]/(Φ_n(s))`, enough to
//! test identities of the form `â(ζ t) = ζ^k â(t)` at a primitive root `ζ`.

use std::collections::HashMap;

use num_traits::{One, Zero};
use once_cell::sync::Lazy;

use crate::arith::{Monomial, Poly, Rational, Vars};

static S: Lazy<Vars> = Lazy::new(|| Vars::new(["s"]));

/// `Φ_n`, from `s^n − 1 = Π_{d | n} Φ_d`.
pub fn cyclotomic(n: u32) -> Poly {
    assert!(n >= 1, "Φ_0 is undefined");
    let mut memo = HashMap::new();
    cyclotomic_memo(n, &mut memo)
}

fn cyclotomic_memo(n: u32, memo: &mut HashMap<u32, Poly>) -> Poly {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    let s = &*S;
    let mut p = &Poly::monomial(s, Monomial::var(1, 0, n), Rational::one()) - &Poly::one(s);
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        let phi = cyclotomic_memo(d, memo);
        p = p.divide_exact(&phi).expect("Φ_d divides s^n − 1");
    }
    memo.insert(n, p.clone());
    p
}

/// `Q(ζ_n)` as `Q[s]/(Φ_n)`; elements are reduced polynomials in `s`.
#[derive(Clone, Debug)]
pub struct CyclotomicField {
    n: u32,
    modulus: Poly,
}

impl CyclotomicField {
    pub fn new(n: u32) -> Self {
        CyclotomicField {
            n,
            modulus: cyclotomic(n),
        }
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    /// Remainder modulo `Φ_n`.
    pub fn reduce(&self, p: &Poly) -> Poly {
        let m = self.modulus.total_degree().unwrap_or(0);
        let lc = self.modulus.leading_coefficient();
        let mut r = p.clone();
        while let Some((lm, c)) = r.leading_term() {
            let deg = lm.degree();
            if deg < m {
                break;
            }
            let shift = Monomial::var(1, 0, deg - m);
            let factor = c / &lc;
            r = &r - &self.modulus.mul_monomial(&shift, &factor);
        }
        r
    }

    /// `ζ^k`, for any integer `k`.
    pub fn zeta_pow(&self, k: i64) -> Poly {
        let e = k.rem_euclid(i64::from(self.n)) as u32;
        self.reduce(&Poly::monomial(&S, Monomial::var(1, 0, e), Rational::one()))
    }

    pub fn constant(&self, c: Rational) -> Poly {
        Poly::constant(&S, c)
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.reduce(&(a * b))
    }

    pub fn is_zero(&self, a: &Poly) -> bool {
        self.reduce(a).is_zero()
    }
}

/// Does `p(ζ t) = ζ^k p(t)` hold for a primitive `n`-th root of unity `ζ`?
/// `coeffs` lists `(exponent, coefficient)` pairs of `p` in its single
/// variable. Coefficientwise, this asks `c_j (ζ^j − ζ^k) = 0` for all `j`.
pub fn scales_by_root(coeffs: &[(u32, Rational)], n: u32, k: i64) -> bool {
    let field = CyclotomicField::new(n);
    let target = field.zeta_pow(k);
    coeffs
        .iter()
        .all(|(j, c)| c.is_zero() || field.is_zero(&(&field.zeta_pow(i64::from(*j)) - &target)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::text::parse_poly;

    fn s(src: &str) -> Poly {
        parse_poly(src, &S).unwrap()
    }

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic(1), s("s - 1"));
        assert_eq!(cyclotomic(2), s("s + 1"));
        assert_eq!(cyclotomic(3), s("s^2 + s + 1"));
        assert_eq!(cyclotomic(4), s("s^2 + 1"));
        assert_eq!(cyclotomic(6), s("s^2 - s + 1"));
        assert_eq!(cyclotomic(12), s("s^4 - s^2 + 1"));
    }

    #[test]
    fn zeta_arithmetic() {
        let f = CyclotomicField::new(3);
        assert_eq!(f.zeta_pow(3), s("1"));
        assert_eq!(f.zeta_pow(2), s("-s - 1"));
        assert_eq!(f.mul(&f.zeta_pow(1), &f.zeta_pow(2)), s("1"));
        assert_eq!(f.zeta_pow(-1), f.zeta_pow(2));
    }

    #[test]
    fn root_scaling() {
        let one = Rational::one();
        // t^3 + 1 is invariant under t ↦ ζ_3 t but not under ζ_6
        let p = [(3, one.clone()), (0, one.clone())];
        assert!(scales_by_root(&p, 3, 0));
        assert!((0..6).all(|k| !scales_by_root(&p, 6, k)));
    }
}
