//! Randomized property sweeps shared by the corpus runner and the test suites.
//!
//! Each sweep draws `count` independent cases through [`map_cases`], so a
//! sweep's verdict depends only on its seed and budget.

use std::fmt;

use num_traits::Zero;

use crate::arith::{gcd, Poly, Rational, Vars};
use crate::automorphisms::{commutes, Automorphism};
use crate::delta_family::{
    ad_identity_check, aut_to_n, exp_m_decompose, irreducibility_criterion_check, n_mul, n_to_aut,
    quotient_shift, DeltaContext, NElem,
};
use crate::derivations::{logarithm, sat_instance_check, Derivation};
use crate::error::Result;
use crate::groupmodel::{
    char_commutator_check, commutator, g_inverse, g_mul, predicted_fiber_commutator, GElem, GroupLaw,
};
use crate::random::{Bounds, Sampler};
use crate::sweep::map_cases;

/// Result of one randomized sweep: the number of cases run and, for each
/// failing case, its index and a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepOutcome {
    pub cases: usize,
    pub failures: Vec<(usize, String)>,
}

impl SweepOutcome {
    fn collect(results: Vec<std::result::Result<(), String>>) -> Self {
        let cases = results.len();
        let failures = results
            .into_iter()
            .enumerate()
            .filter_map(|(i, r)| r.err().map(|w| (i, w)))
            .collect();
        SweepOutcome { cases, failures }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Merges sweeps run under different labels into one tally; case indices
    /// of later sweeps are offset past earlier ones.
    pub fn merge(parts: impl IntoIterator<Item = SweepOutcome>) -> Self {
        let mut out = SweepOutcome {
            cases: 0,
            failures: Vec::new(),
        };
        for p in parts {
            out.failures
                .extend(p.failures.into_iter().map(|(i, w)| (i + out.cases, w)));
            out.cases += p.cases;
        }
        out
    }
}

impl fmt::Display for SweepOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.failures.first() {
            None => write!(f, "{} cases", self.cases),
            Some((i, w)) => write!(
                f,
                "{}/{} cases failed; first (case {i}): {w}",
                self.failures.len(),
                self.cases
            ),
        }
    }
}

fn ensure(ok: bool, witness: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(witness())
    }
}

fn lift<T>(r: Result<T>, what: &str) -> std::result::Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

/// `Exp(sD) ∘ Exp(tD) = Exp((s + t)D)` for random rational `s, t`.
pub fn one_parameter_group(d: &Derivation, seed: u64, count: usize, bounds: Bounds) -> SweepOutcome {
    let results = map_cases(seed, count, bounds, |_, s| {
        let (a, b) = (s.rational(), s.rational());
        let lhs =
            lift(d.scale(&a).exponential(), "Exp(sD)")?.compose(&lift(d.scale(&b).exponential(), "Exp(tD)")?);
        let rhs = lift(d.scale(&(&a + &b)).exponential(), "Exp((s+t)D)")?;
        ensure(lhs == rhs, || format!("s = {a}, t = {b}: {lhs} ≠ {rhs}"))
    });
    SweepOutcome::collect(results)
}

/// `log(Exp(D)) = D` and `Exp(log(u)) = u` for `u = Exp(D)`.
pub fn exp_log_roundtrip(d: &Derivation) -> std::result::Result<(), String> {
    let u = lift(d.exponential(), "Exp(D)")?;
    let l = lift(logarithm(&u), "log(Exp(D))")?;
    ensure(&l == d, || format!("log(Exp(D)) = {l}"))?;
    // Rebuild `u` from its images alone so the logarithm cannot lean on the
    // factor word.
    let bare = lift(Automorphism::from_images(u.images().to_vec()), "images of Exp(D)")?;
    let back = lift(lift(logarithm(&bare), "log(u)")?.exponential(), "Exp(log(u))")?;
    ensure(back == u, || format!("Exp(log(u)) = {back} ≠ {u}"))
}

/// [`exp_log_roundtrip`] on random triangular derivations.
pub fn triangular_roundtrips(seed: u64, count: usize, bounds: Bounds) -> SweepOutcome {
    let results = map_cases(seed, count, bounds, |_, s| {
        let d = s.triangular_lnd();
        exp_log_roundtrip(&d).map_err(|w| format!("D = {d}: {w}"))
    });
    SweepOutcome::collect(results)
}

/// `f·D′·ad(h·E)^q = (−1)^q h^q E^q(f) D′` for `q ≤ q_max` and random
/// `h ∈ Q[z]`, `f ∈ Q[z, P]`.
pub fn ad_identity_sweep(
    ctx: &DeltaContext,
    q_max: u32,
    seed: u64,
    count: usize,
    bounds: Bounds,
) -> SweepOutcome {
    let results = map_cases(seed, count, bounds, |_, s| {
        let (h, f) = (s.unipoly(), s.kernel_poly());
        let steps = lift(ad_identity_check(ctx, &h, &f, q_max), "ad identity")?;
        match steps.iter().find(|st| !st.holds()) {
            None => Ok(()),
            Some(st) => Err(format!(
                "h = {h}, f = {f}, q = {}: {} ≠ {}",
                st.q, st.bracket, st.predicted
            )),
        }
    });
    SweepOutcome::collect(results)
}

/// For random pairs `a, b ∈ N`: `n_to_aut` is a homomorphism, `aut_to_n`
/// inverts it, images commute with `u` and `u′`, `Exp(hE + fD′)` splits as
/// `h·e` times a modification, and the induced quotient map is
/// `(z, P − h·a′)`.
pub fn n_group_sweep(ctx: &DeltaContext, seed: u64, count: usize, bounds: Bounds) -> SweepOutcome {
    let results = map_cases(seed, count, bounds, |_, s| {
        let (a, b) = (s.nelem(), s.nelem());
        n_group_case(ctx, &a, &b)
    });
    SweepOutcome::collect(results)
}

/// One case of [`n_group_sweep`]; the `a`-side properties are checked for
/// `a` only.
pub fn n_group_case(ctx: &DeltaContext, a: &NElem, b: &NElem) -> std::result::Result<(), String> {
    let (ga, gb) = (n_to_aut(a, ctx), n_to_aut(b, ctx));
    let gab = n_to_aut(&n_mul(a, b, ctx), ctx);
    ensure(gab == ga.compose(&gb), || {
        format!("{a}·{b}: image of product ≠ product of images")
    })?;
    let back = lift(aut_to_n(&ga, ctx), &format!("aut_to_n({a})"))?;
    ensure(&back == a, || format!("aut_to_n(n_to_aut({a})) = {back}"))?;
    ensure(commutes(&ga, &ctx.u), || {
        format!("image of {a} does not commute with u")
    })?;
    ensure(commutes(&ga, &ctx.u_prime), || {
        format!("image of {a} does not commute with u′")
    })?;
    lift(exp_m_decompose(a, ctx), &format!("exp_m_decompose({a})"))?;
    let shift = lift(quotient_shift(a, ctx), &format!("quotient action of {a}"))?;
    ensure(shift.holds(), || {
        format!(
            "{a} acts on (z, P) as {:?}, expected {:?}",
            shift.action, shift.expected
        )
    })
}

/// Constructed instances of `[fF, B] = f[F, B] − B(f)F` in a Δ context.
///
/// Positive cases alternate between `F = g·D′, B = k·D′, f ∈ Q[z, P]` and
/// `F = g(z)·D′, B = h·E + k·D′, f ∈ Q[z]`; in both the bracket vanishes and
/// the conclusion `B(f) = 0, [F, B] = 0` must follow. Negative cases take
/// `F = D′, B = h·E + k·D′` with `h ≠ 0` and `f = P`, where the bracket must
/// be a nonzero obstruction.
pub fn sat_sweep(
    ctx: &DeltaContext,
    positives: usize,
    negatives: usize,
    seed: u64,
    bounds: Bounds,
) -> SweepOutcome {
    let zp = Vars::zp();
    let pos = map_cases(seed, positives, bounds, |i, s| {
        let (f_der, b, f) = if i % 2 == 0 {
            let g = s.nonzero_poly_in(&zp, &[0, 1], bounds.degree);
            let k = s.kernel_poly();
            (
                ctx.d_prime.times(&ctx.expand(&g)),
                ctx.d_prime.times(&ctx.expand(&k)),
                s.kernel_poly(),
            )
        } else {
            let g = s.nonzero_poly_in(&zp, &[0], bounds.degree);
            let b = ctx.derivation_of(&NElem {
                h: s.unipoly(),
                f: s.kernel_poly(),
            });
            (ctx.d_prime.times(&ctx.expand(&g)), b, s.unipoly())
        };
        let f = ctx.expand(&f);
        let r = lift(sat_instance_check(&b, &f_der, &f), "sat")?;
        ensure(
            r.identity_holds && r.bracket_vanishes() && r.conclusion_holds(),
            || {
                format!(
                    "F = {f_der}, B = {b}, f = {f}: [fF, B] = {}, B(f) = {}",
                    r.bracket, r.b_of_f
                )
            },
        )
    });
    let p = ctx.p.clone();
    let neg = map_cases(seed ^ 0x5a5a, negatives, bounds, |_, s| {
        let h = s.nonzero_poly_in(&zp, &[0], bounds.degree);
        let b = ctx.derivation_of(&NElem {
            h,
            f: s.kernel_poly(),
        });
        let r = lift(sat_instance_check(&b, &ctx.d_prime, &p), "sat")?;
        ensure(r.identity_holds && !r.bracket_vanishes(), || {
            format!(
                "B = {b}: expected a nonzero obstruction, got [fF, B] = {}",
                r.bracket
            )
        })
    });
    SweepOutcome::merge([SweepOutcome::collect(pos), SweepOutcome::collect(neg)])
}

/// Coprime pairs `(h, f)` must give irreducible `h·E + f·D′`; pairs sharing a
/// nonconstant `c(z)` must give content `c` (monic), stripped off by the
/// standard decomposition.
pub fn irreducibility_sweep(
    ctx: &DeltaContext,
    coprime: usize,
    shared: usize,
    seed: u64,
    bounds: Bounds,
) -> SweepOutcome {
    let zp = Vars::zp();
    let pos = map_cases(seed, coprime, bounds, |_, s| {
        let n = loop {
            let n = s.nelem();
            if !n.is_identity() && is_coprime(&n) && !ctx.derivation_of(&n).is_zero() {
                break n;
            }
        };
        let r = lift(irreducibility_criterion_check(ctx, &n), &format!("{n}"))?;
        ensure(r.irreducible() && r.holds(ctx), || {
            format!("{n}: content {}", r.content)
        })
    });
    let neg = map_cases(seed ^ 0xa5a5, shared, bounds, |_, s| {
        let c = loop {
            let c = s.nonzero_poly_in(&zp, &[0], 2);
            if !c.is_constant() {
                break c;
            }
        };
        let n = loop {
            let n = s.nelem();
            if !n.is_identity() && is_coprime(&n) {
                break NElem {
                    h: &n.h * &c,
                    f: &n.f * &c,
                };
            }
        };
        let r = lift(irreducibility_criterion_check(ctx, &n), &format!("{n}"))?;
        let predicted = ctx.expand(&gcd(&n.h, &n.f).expect("same ring")).monic();
        ensure(
            !r.coprime() && r.content == predicted && r.stripped == predicted && r.holds(ctx),
            || {
                format!(
                    "{n}: content {}, stripped {}, predicted {predicted}",
                    r.content, r.stripped
                )
            },
        )
    });
    SweepOutcome::merge([SweepOutcome::collect(pos), SweepOutcome::collect(neg)])
}

fn is_coprime(n: &NElem) -> bool {
    gcd(&n.h, &n.f).is_ok_and(|g| g.is_constant())
}

fn nonzero_rational(s: &mut Sampler) -> Rational {
    loop {
        let r = s.rational();
        if !r.is_zero() {
            return r;
        }
    }
}

fn gelem(s: &mut Sampler, rank: usize) -> GElem {
    let torus = (0..rank).map(|_| nonzero_rational(s)).collect();
    let n = s.nelem();
    GElem { torus, n }
}

/// Associativity, identity and inverses of the product law on random
/// triples, plus the fiber commutator identity
/// `[(1, 0, q), (1, h₀, f₀)] = (1, 0, q − q(P + h₀a′))`.
pub fn group_law_sweep(law: &GroupLaw, seed: u64, count: usize, bounds: Bounds) -> SweepOutcome {
    let rank = law.rank();
    let results = map_cases(seed, count, bounds, |_, s| {
        let (a, b, c) = (gelem(s, rank), gelem(s, rank), gelem(s, rank));
        let mul = |x: &GElem, y: &GElem| lift(g_mul(x, y, law), "product");
        let left = mul(&mul(&a, &b)?, &c)?;
        let right = mul(&a, &mul(&b, &c)?)?;
        ensure(left == right, || format!("({a})({b})({c}) is not associative"))?;
        let one = GElem::identity(rank);
        ensure(mul(&a, &one)? == a && mul(&one, &a)? == a, || {
            format!("identity fails on {a}")
        })?;
        let inv = lift(g_inverse(&a, law), "inverse")?;
        ensure(
            mul(&a, &inv)?.is_identity() && mul(&inv, &a)?.is_identity(),
            || format!("{inv} is not the inverse of {a}"),
        )?;
        fiber_commutator_case(law, s)
    });
    SweepOutcome::collect(results)
}

fn fiber_commutator_case(law: &GroupLaw, s: &mut Sampler) -> std::result::Result<(), String> {
    let (q, h0, f0) = (s.kernel_poly(), s.unipoly(), s.kernel_poly());
    fiber_commutator_identity(law, &q, &h0, &f0)
}

/// `[(1, 0, q), (1, h₀, f₀)] = (1, 0, q − q(P + h₀a′))` for one triple.
pub fn fiber_commutator_identity(
    law: &GroupLaw,
    q: &Poly,
    h0: &Poly,
    f0: &Poly,
) -> std::result::Result<(), String> {
    let rank = law.rank();
    let zp = Vars::zp();
    let a = GElem::fiber(rank, lift(NElem::new(Poly::zero(&zp), q.clone()), "q")?);
    let b = GElem::fiber(rank, lift(NElem::new(h0.clone(), f0.clone()), "(h₀, f₀)")?);
    let c = lift(commutator(&a, &b, law), "commutator")?;
    let predicted = predicted_fiber_commutator(&a.n.f, &b.n.h, law);
    ensure(c.in_abelian_fiber() && c.n.f == predicted, || {
        format!("q = {q}, h₀ = {h0}: commutator {c}, predicted fiber {predicted}")
    })
}

/// The fiber commutator identity alone, on `count` random `(q, h₀, f₀)`.
pub fn fiber_commutator_sweep(law: &GroupLaw, seed: u64, count: usize, bounds: Bounds) -> SweepOutcome {
    SweepOutcome::collect(map_cases(seed, count, bounds, |_, s| {
        fiber_commutator_case(law, s)
    }))
}

/// `[h·e ∘ f·u′, [P²·u′, e]] = (−2h·a′²)·u′` for random `h`, `f`.
pub fn char_commutator_sweep(ctx: &DeltaContext, seed: u64, count: usize, bounds: Bounds) -> SweepOutcome {
    let results = map_cases(seed, count, bounds, |_, s| {
        let (h, f) = (s.unipoly(), s.kernel_poly());
        let r = lift(char_commutator_check(ctx, &h, &f), "char commutator")?;
        ensure(r.holds(), || format!("h = {h}, f = {f}: {} ≠ {}", r.lhs, r.rhs))
    });
    SweepOutcome::collect(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delta_family::make_context;
    use crate::groupmodel::CharacterVector;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    fn small() -> Bounds {
        Bounds {
            degree: 2,
            coeff: 5,
            max_terms: 3,
        }
    }

    #[test]
    fn one_parameter_group_on_delta() {
        let d = Derivation::delta(&p("x*z + y^2"));
        let out = one_parameter_group(&d, 0, 10, small());
        assert!(out.passed(), "{out}");
        assert_eq!(out.cases, 10);
    }

    #[test]
    fn triangular_roundtrips_pass() {
        let out = triangular_roundtrips(3, 10, small());
        assert!(out.passed(), "{out}");
    }

    #[test]
    fn context_sweeps_pass() {
        let ctx = make_context(&p("x*z + y^2"), &p("z"), 3).unwrap();
        for out in [
            ad_identity_sweep(&ctx, 3, 1, 5, small()),
            n_group_sweep(&ctx, 1, 5, small()),
            sat_sweep(&ctx, 6, 3, 1, small()),
            irreducibility_sweep(&ctx, 4, 3, 1, small()),
            char_commutator_sweep(&ctx, 1, 3, small()),
        ] {
            assert!(out.passed(), "{out}");
        }
    }

    #[test]
    fn group_law_sweep_passes() {
        let law = GroupLaw::new(
            CharacterVector::new(vec![-2]),
            CharacterVector::new(vec![1]),
            CharacterVector::new(vec![2]),
            None,
            &p("z").embed(&Vars::zp()).unwrap(),
        )
        .unwrap();
        let out = group_law_sweep(&law, 2, 8, small());
        assert!(out.passed(), "{out}");
    }

    #[test]
    fn merge_offsets_indices() {
        let a = SweepOutcome {
            cases: 3,
            failures: vec![(1, "a".into())],
        };
        let b = SweepOutcome {
            cases: 2,
            failures: vec![(0, "b".into())],
        };
        let m = SweepOutcome::merge([a, b]);
        assert_eq!(m.cases, 5);
        assert_eq!(m.failures, vec![(1, "a".into()), (3, "b".into())]);
    }
}
