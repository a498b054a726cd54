//! Algebraic invariants over generated inputs.

use lnd_core::arith::rational::int;
use lnd_core::arith::{gcd, Monomial, Poly, Rational, Vars};
use lnd_core::automorphisms::Automorphism;
use lnd_core::corpus;
use lnd_core::delta_family::{make_context, n_inverse, n_mul, n_to_aut, DeltaContext, NElem};
use lnd_core::derivations::{logarithm, Derivation};
use lnd_core::groupmodel::{commutator, g_inverse, g_mul, CharacterVector, GElem, GroupLaw};
use lnd_core::quotient_geometry::{plane_aut, plane_vars, preserves_divisor, PlaneDivisor};
use once_cell::sync::Lazy;
use proptest::prelude::*;

fn poly_strategy(vars: Vars, allowed: Vec<usize>, degree: u32) -> impl Strategy<Value = Poly> {
    let n = vars.len();
    let term = (proptest::collection::vec(0..=degree, allowed.len()), -9i64..=9).prop_map(move |(es, c)| {
        let mut exps = vec![0u32; n];
        for (slot, e) in allowed.iter().zip(es) {
            exps[*slot] = e;
        }
        (Monomial::from_exponents(&exps), int(c))
    });
    proptest::collection::vec(term, 0..5).prop_map(move |ts| {
        let ts: Vec<(Monomial, Rational)> = ts.into_iter().filter(|(m, _)| m.degree() <= degree).collect();
        Poly::from_terms(&vars, ts)
    })
}

fn xyz_poly() -> impl Strategy<Value = Poly> {
    poly_strategy(Vars::xyz(), vec![0, 1, 2], 3)
}

fn nonzero_xyz_poly() -> impl Strategy<Value = Poly> {
    xyz_poly().prop_map(|p| if p.is_zero() { Poly::one(&Vars::xyz()) } else { p })
}

fn unipoly() -> impl Strategy<Value = Poly> {
    poly_strategy(Vars::zp(), vec![0], 3)
}

fn kernel_poly() -> impl Strategy<Value = Poly> {
    poly_strategy(Vars::zp(), vec![0, 1], 2)
}

/// `p(y, z)∂x + q(z)∂y + c∂z`.
fn triangular() -> impl Strategy<Value = Derivation> {
    (
        poly_strategy(Vars::xyz(), vec![1, 2], 3),
        poly_strategy(Vars::xyz(), vec![2], 3),
        -3i64..=3,
    )
        .prop_map(|(p, q, c)| Derivation::xyz(p, q, Poly::integer(&Vars::xyz(), c)))
}

static CTX: Lazy<DeltaContext> =
    Lazy::new(|| make_context(&"x*z + y^2".parse().unwrap(), &"1".parse().unwrap(), 3).unwrap());

static LAW: Lazy<GroupLaw> = Lazy::new(|| {
    GroupLaw::new(
        CharacterVector::new(vec![-2]),
        CharacterVector::new(vec![1]),
        CharacterVector::new(vec![2]),
        None,
        &lnd_core::arith::text::parse_poly("z", &Vars::zp()).unwrap(),
    )
    .unwrap()
});

fn gelem() -> impl Strategy<Value = GElem> {
    (
        prop_oneof![Just(1i64), Just(-1), Just(2), Just(3)],
        unipoly(),
        kernel_poly(),
    )
        .prop_map(|(t, h, f)| GElem::new(vec![int(t)], h, f).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(std::env::var("PROPTEST_CASES").ok().and_then(|c| c.parse().ok()).unwrap_or(256)))]

    #[test]
    fn ring_laws(a in xyz_poly(), b in xyz_poly(), c in xyz_poly()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn printing_reparses(a in xyz_poly()) {
        let back: Poly = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn gcd_divides_and_absorbs_common_factors(a in nonzero_xyz_poly(), b in nonzero_xyz_poly(), c in nonzero_xyz_poly()) {
        let g = gcd(&(&a * &c), &(&b * &c)).unwrap();
        prop_assert!(g.divides(&(&a * &c)) && g.divides(&(&b * &c)));
        prop_assert!(c.divides(&g));
    }

    #[test]
    fn leibniz_rule(d in triangular(), f in xyz_poly(), g in xyz_poly()) {
        prop_assert_eq!(d.apply(&(&f * &g)), &(&d.apply(&f) * &g) + &(&f * &d.apply(&g)));
    }

    #[test]
    fn exponentials_are_invertible_homomorphisms(d in triangular(), f in xyz_poly(), g in xyz_poly()) {
        let u = d.exponential().unwrap();
        let inv = d.scale(&int(-1)).exponential().unwrap();
        prop_assert!(u.compose(&inv).is_identity());
        prop_assert_eq!(u.inverse().unwrap(), inv);
        prop_assert_eq!(u.pull_back(&(&f * &g)), &u.pull_back(&f) * &u.pull_back(&g));
        prop_assert_eq!(logarithm(&u).unwrap(), d);
    }

    #[test]
    fn n_group_is_a_group_and_realized_faithfully(
        a in (unipoly(), kernel_poly()), b in (unipoly(), kernel_poly()), c in (unipoly(), kernel_poly()),
    ) {
        let ctx = &*CTX;
        let [a, b, c] = [a, b, c].map(|(h, f)| NElem::new(h, f).unwrap());
        prop_assert_eq!(n_mul(&n_mul(&a, &b, ctx), &c, ctx), n_mul(&a, &n_mul(&b, &c, ctx), ctx));
        prop_assert!(n_mul(&a, &n_inverse(&a, ctx), ctx).is_identity());
        prop_assert_eq!(n_to_aut(&n_mul(&a, &b, ctx), ctx), n_to_aut(&a, ctx).compose(&n_to_aut(&b, ctx)));
    }

    #[test]
    fn fiber_is_normal_and_abelian(g in gelem(), f in kernel_poly(), f2 in kernel_poly()) {
        let law = &*LAW;
        let rank = law.rank();
        let fib = GElem::new(vec![int(1); rank], Poly::zero(&Vars::zp()), f).unwrap();
        let conj = g_mul(&g_mul(&g, &fib, law).unwrap(), &g_inverse(&g, law).unwrap(), law).unwrap();
        prop_assert!(conj.in_abelian_fiber());
        let fib2 = GElem::new(vec![int(1); rank], Poly::zero(&Vars::zp()), f2).unwrap();
        prop_assert!(commutator(&fib, &fib2, law).unwrap().is_identity());
    }

    #[test]
    fn commutator_ignores_f0(q in kernel_poly(), h0 in unipoly(), f0 in kernel_poly(), f1 in kernel_poly()) {
        let law = &*LAW;
        let zero = Poly::zero(&Vars::zp());
        let a = GElem::new(vec![int(1)], zero, q).unwrap();
        let b0 = GElem::new(vec![int(1)], h0.clone(), f0).unwrap();
        let b1 = GElem::new(vec![int(1)], h0, f1).unwrap();
        prop_assert_eq!(commutator(&a, &b0, law).unwrap(), commutator(&a, &b1, law).unwrap());
    }

    #[test]
    fn divisor_characters_multiply(c1 in prop_oneof![Just(1i64), Just(-1)], c2 in prop_oneof![Just(1i64), Just(-1)], s in -3i64..=3) {
        // Scalings of y and sign changes of z preserve div(z³ − z).
        let pv = plane_vars();
        let div = PlaneDivisor::new(&lnd_core::arith::text::parse_poly("z^3 - z", &pv).unwrap()).unwrap();
        let y = Poly::var(&pv, 0);
        let z = Poly::var(&pv, 1);
        let g = plane_aut(&(&y.scale(&int(2)) + &z.scale(&int(s))), &z.scale(&int(c1))).unwrap();
        let h = plane_aut(&y, &z.scale(&int(c2))).unwrap();
        let (lg, lh) = (preserves_divisor(&g, &div).unwrap(), preserves_divisor(&h, &div).unwrap());
        prop_assert_eq!(preserves_divisor(&g.compose(&h), &div), Some(lg * lh));
    }

    #[test]
    fn corpus_parser_is_total(src in "[ -~\\n]{0,200}") {
        if let Err(e) = corpus::parse(&src) {
            prop_assert!(e.pos.line >= 1 && e.pos.col >= 1);
        }
    }

    #[test]
    fn generated_corpora_roundtrip(p in xyz_poly(), d in triangular()) {
        let imgs = d.images();
        let src = format!(
            "poly p = {p}\nderivation D {{ x -> {}; y -> {}; z -> {} }}\ncheck exp_log_roundtrip(D)\n",
            imgs[0], imgs[1], imgs[2]
        );
        let printed = corpus::parse(&src).unwrap().to_string();
        prop_assert_eq!(corpus::parse(&printed).unwrap().to_string(), printed.clone());
        let report = corpus::check_source(&printed, &corpus::RunOptions { budget: 2, ..Default::default() }).unwrap();
        // Triangular derivations, the zero one included, are locally nilpotent.
        prop_assert!(report.success(), "{}", report.render(true));
    }
}

#[test]
fn identity_automorphism_roundtrips() {
    let id = Automorphism::identity(&Vars::xyz());
    assert!(logarithm(&id).unwrap().is_zero());
}
