//! The triangular derivation Δ_P for P = xz + y²: its exponential, plinth,
//! admissible complement and one product in the group N.

use lnd_core::arith::Poly;
use lnd_core::delta_family::{make_context, n_mul, n_to_aut, NElem};
use lnd_core::derivations::{logarithm, plinth_search, Derivation};

fn main() -> lnd_core::Result<()> {
    let p: Poly = "x*z + y^2".parse().unwrap();
    let d = Derivation::delta(&p);
    println!("Δ_P = {d}");

    let u = d.exponential()?;
    println!("Exp(Δ_P) = {u}");
    println!("log(Exp(Δ_P)) = {}", logarithm(&u)?);

    let plinth = plinth_search(&d, &["z".parse().unwrap(), p.clone()], 3)?;
    println!("plinth: D({}) = {}", plinth.q, plinth.a);

    let ctx = make_context(&p, &"1".parse().unwrap(), 3)?;
    println!(
        "admissible complement E = {}, convention {}",
        ctx.e, ctx.convention
    );

    let zp = lnd_core::arith::Vars::zp();
    let k = |s: &str| lnd_core::arith::text::parse_poly(s, &zp).unwrap();
    let a = NElem::new(k("z"), k("P"))?;
    let b = NElem::new(k("1"), k("z^2"))?;
    let ab = n_mul(&a, &b, &ctx);
    println!("({}; {})·({}; {}) = ({}; {})", a.h, a.f, b.h, b.f, ab.h, ab.f);
    assert_eq!(
        n_to_aut(&ab, &ctx),
        n_to_aut(&a, &ctx).compose(&n_to_aut(&b, &ctx))
    );
    println!("n_to_aut respects the product");
    Ok(())
}
