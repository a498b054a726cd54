//! The quotient plane `Spec Q[y, z]`: divisors `div(a)`, vertical fences,
//! divisor-preserving and inert plane automorphisms, affine symmetries of a
//! root divisor on the line, and lifts of plane automorphisms to the
//! centralizer of a modified translation `(x + a, y, z)`.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;

use crate::arith::{Poly, Rational, Vars};
use crate::automorphisms::{commutes, is_unipotent, Automorphism};
use crate::cyclotomic::scales_by_root;
use crate::error::{Error, Result};

static PLANE: Lazy<Vars> = Lazy::new(|| Vars::new(["y", "z"]));
static LINE: Lazy<Vars> = Lazy::new(|| Vars::new(["t"]));

/// Coordinates `(y, z)` of the quotient plane.
pub fn plane_vars() -> Vars {
    PLANE.clone()
}

/// `div(a)` in the plane, with `a` normalized to leading coefficient 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PlaneDivisor {
    a: Poly,
}

impl PlaneDivisor {
    pub fn new(a: &Poly) -> Result<Self> {
        let a = a
            .embed(&PLANE)
            .map_err(|_| Error::Precondition(format!("{a} is not a polynomial in y, z")))?;
        if a.is_zero() {
            return Err(Error::Precondition("div(0) is not a divisor".into()));
        }
        Ok(PlaneDivisor { a: a.monic() })
    }

    pub fn poly(&self) -> &Poly {
        &self.a
    }
}

impl fmt::Display for PlaneDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "div({})", self.a)
    }
}

impl fmt::Debug for PlaneDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A plane automorphism given by `(g*(y), g*(z))`.
pub fn plane_aut(y_image: &Poly, z_image: &Poly) -> Result<Automorphism> {
    let imgs = [y_image, z_image]
        .iter()
        .map(|p| p.embed(&PLANE))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Error::Precondition("plane automorphisms live in Q[y, z]".into()))?;
    Automorphism::from_images(imgs)
}

/// Vertical fence: `a ∈ Q[z]`, so `div(a)` is a disjoint union of the lines
/// `z = root`.
pub fn is_vertical_fence(a: &Poly) -> Result<bool> {
    if a.is_zero() {
        return Err(Error::Precondition("a = 0".into()));
    }
    Ok(a.names_used().iter().all(|n| n == "z"))
}

/// `λ` with `g*(a) = λ·a`, if `g` preserves `div(a)`.
pub fn preserves_divisor(g: &Automorphism, div: &PlaneDivisor) -> Option<Rational> {
    if g.vars() != &*PLANE {
        return None;
    }
    g.pull_back(&div.a).ratio_to(&div.a)
}

/// Inert: preserves `div(a)` and induces the identity on `Q[y, z]/(a)`.
pub fn is_inert(g: &Automorphism, div: &PlaneDivisor) -> Result<bool> {
    if preserves_divisor(g, div).is_none() {
        return Err(Error::Precondition(format!("g does not preserve {div}")));
    }
    Ok(g.images()
        .iter()
        .enumerate()
        .all(|(i, img)| div.a.divides(&(img - &Poly::var(&PLANE, i)))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryOrder {
    Finite(u32),
    Torus,
}

impl fmt::Display for SymmetryOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymmetryOrder::Finite(e) => write!(f, "{e}"),
            SymmetryOrder::Torus => f.write_str("torus"),
        }
    }
}

/// Affine symmetries `t ↦ α(t − μ) + μ` of the root divisor of `a`.
///
/// For finite order `e`, `α` ranges over `e`-th roots of unity and
/// `a(α(t − μ) + μ) = α^k₀ a(t)`. In the torus case every `α ≠ 0` works and
/// `k₀` is the multiplicity at `μ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorSymmetry {
    pub center: Rational,
    pub order: SymmetryOrder,
    pub lambda_exponent: u32,
    /// The defining identity held at a primitive root of order `e`.
    pub verified: bool,
    /// No root of order `2e` satisfies the identity for any exponent.
    pub doubled_order_fails: bool,
}

impl DivisorSymmetry {
    /// `λ = α^k₀` at a generator `α` of the symmetry group, when rational.
    pub fn lambda(&self) -> Option<Rational> {
        match self.order {
            SymmetryOrder::Finite(1) => Some(Rational::one()),
            SymmetryOrder::Finite(2) => Some(if self.lambda_exponent.is_multiple_of(2) {
                Rational::one()
            } else {
                -Rational::one()
            }),
            _ => None,
        }
    }
}

impl fmt::Display for DivisorSymmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "center {}, order {}, k0 {}",
            self.center, self.order, self.lambda_exponent
        )?;
        if let Some(l) = self.lambda() {
            write!(f, ", lambda {l}")?;
        }
        Ok(())
    }
}

pub fn affine_symmetries(a: &Poly) -> Result<DivisorSymmetry> {
    let names = a.names_used();
    if names.len() > 1 {
        return Err(Error::Precondition(format!("{a} is not univariate")));
    }
    let line = &*LINE;
    let a_t = match names.first() {
        Some(n) => {
            let i = a.vars().index_of(n).expect("name from the polynomial itself");
            let mut imgs: Vec<Poly> = vec![Poly::zero(line); a.vars().len()];
            imgs[i] = Poly::var(line, 0);
            a.substitute(&imgs)?
        }
        None => a.embed(line).expect("constants embed anywhere"),
    };
    let deg = a_t.total_degree().unwrap_or(0);
    if deg == 0 {
        return Err(Error::Precondition("deg a must be at least 1".into()));
    }
    let coeffs = a_t.coefficients_in(0);
    let top = coeffs[&deg].constant_value().expect("univariate");
    let sub = coeffs
        .get(&(deg - 1))
        .and_then(Poly::constant_value)
        .unwrap_or_else(Rational::zero);
    let center = -sub / (top * Rational::from_integer(deg.into()));
    let t = Poly::var(line, 0);
    let centered = a_t.substitute(&[&t + &Poly::constant(line, center.clone())])?;
    let support: Vec<(u32, Rational)> = centered
        .coefficients_in(0)
        .into_iter()
        .map(|(e, c)| (e, c.constant_value().expect("univariate")))
        .collect();
    if support.len() == 1 {
        return Ok(DivisorSymmetry {
            center,
            order: SymmetryOrder::Torus,
            lambda_exponent: support[0].0,
            verified: true,
            doubled_order_fails: true,
        });
    }
    let base = support[0].0;
    let e = support.iter().fold(0u32, |g, (k, _)| g.gcd(&(k - base)));
    let k0 = base % e;
    let verified = if e <= 2 {
        let zeta = if e == 1 { Rational::one() } else { -Rational::one() };
        let lhs = centered.substitute(&[t.scale(&zeta)])?;
        let lambda = num_traits::pow(zeta, k0 as usize);
        lhs == centered.scale(&lambda)
    } else {
        scales_by_root(&support, e, i64::from(k0))
    };
    let doubled_order_fails = (0..2 * e).all(|k| !scales_by_root(&support, 2 * e, i64::from(k)));
    Ok(DivisorSymmetry {
        center,
        order: SymmetryOrder::Finite(e),
        lambda_exponent: k0,
        verified,
        doubled_order_fails,
    })
}

/// `σ = (λx, g*(y), g*(z))`, which commutes with `(x + a, y, z)`.
pub fn lift_to_h(g: &Automorphism, div: &PlaneDivisor) -> Result<Automorphism> {
    let lambda =
        preserves_divisor(g, div).ok_or_else(|| Error::Precondition(format!("g does not preserve {div}")))?;
    let xyz = Vars::xyz();
    let x = Poly::var(&xyz, 0);
    let lift_images = |h: &Automorphism, l: &Rational| -> Result<Vec<Poly>> {
        let mut imgs = vec![x.scale(l)];
        for img in h.images() {
            imgs.push(img.embed(&xyz)?);
        }
        Ok(imgs)
    };
    let images = lift_images(g, &lambda)?;
    let sigma = match g.inverse() {
        Ok(inv) => Automorphism::with_inverse(images, lift_images(&inv, &lambda.recip())?)?,
        Err(_) => Automorphism::from_images(images)?,
    };
    let u = modified_translation(div)?;
    if !commutes(&sigma, &u) {
        return Err(Error::Inconsistent(
            "lift does not commute with (x + a, y, z)".into(),
        ));
    }
    Ok(sigma)
}

/// `(x + a, y, z)` for `div(a)`.
pub fn modified_translation(div: &PlaneDivisor) -> Result<Automorphism> {
    let xyz = Vars::xyz();
    Automorphism::from_images(vec![
        &Poly::var(&xyz, 0) + &div.a.embed(&xyz)?,
        Poly::var(&xyz, 1),
        Poly::var(&xyz, 2),
    ])
}

/// The shear `(y + a(z), z)` of a vertical fence; unipotent and preserving
/// `div(a)` with `λ = 1`.
pub fn fence_unipotent_witness(div: &PlaneDivisor) -> Result<Automorphism> {
    if !is_vertical_fence(&div.a)? || div.a.is_constant() {
        return Err(Error::Precondition(format!("{div} is not a vertical fence")));
    }
    let y = Poly::var(&PLANE, 0);
    let z = Poly::var(&PLANE, 1);
    let shear = Automorphism::from_images(vec![&y + &div.a, z])?;
    if !is_unipotent(&shear) || preserves_divisor(&shear, div) != Some(Rational::one()) {
        return Err(Error::Inconsistent(
            "fence shear is not a unipotent symmetry".into(),
        ));
    }
    Ok(shear)
}

/// Largest-fixed-subscheme check for a vertical fence: the witness shear
/// fixes `Q[y, z]/(a)` pointwise and moves `Q[y, z]/(a·m)` for each `m`.
#[derive(Clone, Debug)]
pub struct FixedSchemeReport {
    pub fixes_divisor: bool,
    /// `(m, moved)` for each enlargement `a·m`.
    pub enlargements: Vec<(Poly, bool)>,
}

impl FixedSchemeReport {
    pub fn holds(&self) -> bool {
        self.fixes_divisor && self.enlargements.iter().all(|(_, moved)| *moved)
    }
}

/// Default enlargements `m` for [`fixed_scheme_check`].
pub fn default_enlargements() -> Vec<Poly> {
    ["z", "z + 1", "z - 2", "z^2", "y", "y - z", "y^2 + z"]
        .iter()
        .map(|s| crate::arith::text::parse_poly(s, &PLANE).expect("literal"))
        .collect()
}

pub fn fixed_scheme_check(div: &PlaneDivisor, enlargements: &[Poly]) -> Result<FixedSchemeReport> {
    let shear = fence_unipotent_witness(div)?;
    let moved_by = |b: &Poly| {
        shear
            .images()
            .iter()
            .enumerate()
            .any(|(i, img)| !b.divides(&(img - &Poly::var(&PLANE, i))))
    };
    let fixes_divisor = !moved_by(&div.a);
    let enlargements = enlargements
        .iter()
        .map(|m| {
            let m = m.embed(&PLANE)?;
            if m.is_constant() {
                return Err(Error::Precondition(
                    "enlargement factor must be non-constant".into(),
                ));
            }
            let moved = moved_by(&(&div.a * &m));
            Ok((m, moved))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FixedSchemeReport {
        fixes_divisor,
        enlargements,
    })
}
