//! Evaluation of definitions and execution of check directives.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use num_traits::One;

use crate::arith::rational::{is_integer, to_i64};
use crate::arith::text::Expr;
use crate::arith::{Poly, Rational, Vars};
use crate::automorphisms::{commutes, conjugation_formula_check, Automorphism};
use crate::checks::{self, SweepOutcome};
use crate::delta_family::{
    ad_identity_check, combine_to_delta, irreducibility_criterion_check, make_context, DeltaContext, NElem,
};
use crate::derivations::{
    logarithm, plinth_search, sat_instance_check, standard_decomposition, standard_decomposition_of,
    Derivation, DEFAULT_NILPOTENCY_CAP,
};
use crate::groupmodel::{
    char_commutator_check, nonfence_commutator_check, verify_pres_lemma, CharacterVector, GElem, GroupLaw,
};
use crate::quotient_geometry::{
    affine_symmetries, default_enlargements, fence_unipotent_witness, fixed_scheme_check, lift_to_h,
    plane_aut, plane_vars, PlaneDivisor, SymmetryOrder,
};
use crate::random::Bounds;
use crate::sweep::map_items;

use super::ast::{Call, Check, Corpus, Def, DefBody, Field, Form, Item, Map, Value};
use super::report::{Entry, Report, Verdict};

/// Directive names with their parameters, in positional order.
const DIRECTIVES: &[(&str, &[&str])] = &[
    ("exp_log_roundtrip", &["D"]),
    ("one_parameter_group", &["D"]),
    ("triangular_exp_log", &[]),
    ("nilpotency_expect", &["D", "orders"]),
    ("standard_decomposition_expect", &["u", "d", "u'"]),
    ("plinth_expect", &["D", "a", "q", "gens", "deg_max"]),
    ("admissible_complement", &["ctx", "E"]),
    ("combine_to_delta", &["ctx", "n"]),
    ("ad_identity", &["ctx", "q_max", "h", "f"]),
    ("n_group_homomorphism", &["ctx", "a", "b"]),
    ("sat_instance", &["B", "F", "f", "expect"]),
    ("irreducibility_criterion", &["ctx", "n"]),
    ("conjugation_formula", &["g", "f", "u'", "d"]),
    ("commutes", &["g", "u"]),
    ("divisor_symmetry_expect", &["a", "mu", "e", "lambda"]),
    ("lift_H", &["g", "div", "expect"]),
    ("fence_witness", &["div"]),
    ("fixed_scheme", &["div", "enlargements"]),
    ("group_law", &["law"]),
    ("fiber_commutator", &["law", "q", "h0", "f0"]),
    ("pres_lemma", &["law", "candidates", "points"]),
    ("char_commutator", &["ctx", "h", "f"]),
    ("nonfence_commutator", &["u'", "d", "t", "f", "v", "k"]),
];

pub fn directive_params(name: &str) -> Option<&'static [&'static str]> {
    DIRECTIVES.iter().find(|(n, _)| *n == name).map(|(_, p)| *p)
}

pub fn directive_names() -> impl Iterator<Item = &'static str> {
    DIRECTIVES.iter().map(|(n, _)| *n)
}

/// Largest total degree any corpus expression may evaluate to.
pub const CORPUS_DEGREE_LIMIT: u32 = 32;

/// Plinth and kernel search bound when a corpus does not give one.
pub const DEFAULT_SEARCH_DEGREE: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: u64,
    /// Cases per randomized directive.
    pub budget: usize,
    /// Degree bound of randomly generated polynomials.
    pub degree: u32,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: 0,
            budget: 200,
            degree: 3,
        }
    }
}

impl RunOptions {
    fn bounds(&self) -> Bounds {
        Bounds {
            degree: self.degree,
            ..Bounds::default()
        }
    }

    /// Per-directive seed, so that inserting a directive leaves the random
    /// cases of the others unchanged.
    fn seed_for(&self, check: &Check) -> u64 {
        self.seed
            .wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(u64::from(check.pos.line))
    }
}

#[derive(Clone)]
enum Object {
    Poly(Poly),
    UniPoly(Poly),
    Derivation(Derivation),
    Automorphism(Automorphism),
    Context(Arc<DeltaContext>),
    Law(GroupLaw),
    Divisor(PlaneDivisor),
    PlaneAut(Automorphism),
}

impl Object {
    fn kind(&self) -> &'static str {
        match self {
            Object::Poly(_) => "poly",
            Object::UniPoly(_) => "unipoly",
            Object::Derivation(_) => "derivation",
            Object::Automorphism(_) => "automorphism",
            Object::Context(_) => "context",
            Object::Law(_) => "law",
            Object::Divisor(_) => "divisor",
            Object::PlaneAut(_) => "planeaut",
        }
    }
}

type Failure = String;
type Res<T> = std::result::Result<T, Failure>;

#[derive(Default)]
struct Env {
    objects: HashMap<String, Res<Object>>,
    order: Vec<String>,
}

struct Outcome {
    pass: bool,
    detail: String,
    witnesses: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
            witnesses: Vec::new(),
        }
    }

    fn with_witnesses(mut self, w: Vec<String>) -> Self {
        self.witnesses = w;
        self
    }

    fn from_sweep(s: SweepOutcome) -> Self {
        let witnesses = s.failures.iter().map(|(i, w)| format!("case {i}: {w}")).collect();
        Outcome::new(s.passed(), s.to_string()).with_witnesses(witnesses)
    }
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "unknown panic".into()
    }
}

/// Evaluates the definitions in order, then runs the directives (in
/// parallel under the `parallel` feature) and assembles the report in source
/// order. Definitions that fail produce an ERROR entry; directives that use
/// them report ERROR too.
pub fn run(corpus: &Corpus, opts: &RunOptions) -> Report {
    let mut env = Env::default();
    // Slot per item: a finished definition entry, or a check with the number
    // of definitions visible to it.
    let mut slots: Vec<std::result::Result<Option<Entry>, (&Check, usize)>> = Vec::new();
    for item in &corpus.items {
        match item {
            Item::Def(def) => {
                let result = catch_unwind(AssertUnwindSafe(|| env.define(def)))
                    .unwrap_or_else(|p| Err(format!("internal error: {}", panic_message(p))));
                slots.push(Ok(result.as_ref().err().map(|e| Entry {
                    name: format!("{}@{}", def.name, def.pos.line),
                    verdict: Verdict::Error,
                    detail: format!("{} definition failed: {e}", def.body.keyword()),
                    witnesses: Vec::new(),
                })));
                env.order.push(def.name.clone());
                env.objects.insert(def.name.clone(), result);
            }
            Item::Check(check) => slots.push(Err((check, env.order.len()))),
        }
    }
    let pending: Vec<(&Check, usize)> = slots.iter().filter_map(|s| s.as_ref().err().copied()).collect();
    let mut done = map_items(&pending, |_, (check, visible)| {
        env.run_check(check, *visible, opts)
    })
    .into_iter();
    let entries = slots
        .into_iter()
        .filter_map(|s| match s {
            Ok(def_entry) => def_entry,
            Err(_) => done.next(),
        })
        .collect();
    Report { entries }
}

fn at(v: &Value, msg: impl std::fmt::Display) -> Failure {
    format!("{}: {msg}", v.pos())
}

fn lib<T>(r: crate::Result<T>) -> Res<T> {
    r.map_err(|e| e.to_string())
}

fn show_list<T: std::fmt::Display>(items: &[T]) -> String {
    let parts: Vec<String> = items.iter().map(|p| p.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn show_poly_list(items: &[Poly]) -> String {
    show_list(items)
}

/// Arguments of one directive, matched to its parameter list.
struct Args<'a> {
    check: &'a Check,
    slots: Vec<Option<&'a Value>>,
    params: &'static [&'static str],
}

impl<'a> Args<'a> {
    fn bind(check: &'a Check) -> Res<Self> {
        let params = directive_params(&check.directive)
            .ok_or_else(|| format!("{}: unknown directive `{}`", check.pos, check.directive))?;
        let mut slots = vec![None; params.len()];
        for (i, a) in check.args.iter().enumerate() {
            let idx = match &a.key {
                Some((k, pos)) => params
                    .iter()
                    .position(|p| p == k)
                    .ok_or_else(|| format!("{pos}: no parameter `{k}`"))?,
                None if i < params.len() => i,
                None => return Err(at(&a.value, "too many arguments")),
            };
            if slots[idx].is_some() {
                return Err(at(&a.value, format!("parameter `{}` given twice", params[idx])));
            }
            slots[idx] = Some(&a.value);
        }
        Ok(Args { check, slots, params })
    }

    fn get(&self, name: &str) -> Option<&'a Value> {
        let i = self
            .params
            .iter()
            .position(|p| *p == name)
            .expect("known parameter");
        self.slots[i]
    }

    fn req(&self, name: &str) -> Res<&'a Value> {
        self.get(name).ok_or_else(|| {
            format!(
                "{}: `{}` needs argument `{name}`",
                self.check.pos, self.check.directive
            )
        })
    }
}

impl Env {
    fn lookup(&self, v: &Value) -> Res<Option<&Object>> {
        let Some(name) = v.as_name() else {
            return Ok(None);
        };
        match self.objects.get(name) {
            None => Ok(None),
            Some(Ok(o)) => Ok(Some(o)),
            Some(Err(_)) => Err(at(
                v,
                format!("`{name}` is unavailable because its definition failed"),
            )),
        }
    }

    fn eval(&self, e: &Expr, vars: &Vars) -> std::result::Result<Poly, String> {
        let resolve = |n: &str| match self.objects.get(n) {
            Some(Ok(Object::Poly(p) | Object::UniPoly(p))) => Some(p.clone()),
            _ => None,
        };
        e.eval(vars, &resolve, CORPUS_DEGREE_LIMIT)
            .map_err(|e| e.to_string())
    }

    fn poly_in(&self, v: &Value, vars: &Vars) -> Res<Poly> {
        match v {
            Value::Expr(e, _) => self.eval(e, vars),
            _ => Err(at(v, "expected a polynomial")),
        }
    }

    fn poly(&self, v: &Value) -> Res<Poly> {
        self.poly_in(v, &Vars::xyz())
    }

    fn unipoly(&self, v: &Value) -> Res<Poly> {
        let p = self.poly(v)?;
        if p.uses_only(&[2]) {
            Ok(p)
        } else {
            Err(at(v, format!("{p} is not in Q[z]")))
        }
    }

    fn kernel_poly(&self, v: &Value) -> Res<Poly> {
        self.poly_in(v, &Vars::zp())
    }

    fn rational(&self, v: &Value) -> Res<Rational> {
        self.poly_in(v, &Vars::new(Vec::<String>::new()))?
            .constant_value()
            .ok_or_else(|| at(v, "expected a number"))
    }

    fn int(&self, v: &Value) -> Res<i64> {
        let r = self.rational(v)?;
        if !is_integer(&r) {
            return Err(at(v, format!("expected an integer, found {r}")));
        }
        to_i64(&r).ok_or_else(|| at(v, "integer out of range"))
    }

    fn small(&self, v: &Value, max: i64) -> Res<u32> {
        let n = self.int(v)?;
        if !(0..=max).contains(&n) {
            return Err(at(v, format!("expected an integer in 0..={max}, found {n}")));
        }
        Ok(n as u32)
    }

    fn list<'v>(&self, v: &'v Value) -> Res<&'v [Value]> {
        match v {
            Value::List(items, _) => Ok(items),
            _ => Err(at(v, "expected a list `[..]`")),
        }
    }

    fn images(&self, m: &Map, keys: &[&str], vars: &Vars) -> Res<Vec<Poly>> {
        keys.iter()
            .map(|k| {
                let (_, pos, e) = m
                    .entries
                    .iter()
                    .find(|(j, _, _)| j == k)
                    .ok_or_else(|| format!("{}: missing image of `{k}`", m.pos))?;
                self.eval(e, vars).map_err(|e| format!("{pos}: {e}"))
            })
            .collect()
    }

    fn derivation(&self, v: &Value) -> Res<Derivation> {
        match (self.lookup(v)?, v) {
            (Some(Object::Derivation(d)), _) => Ok(d.clone()),
            (Some(o), _) => Err(at(v, format!("expected a derivation, found {}", o.kind()))),
            (None, Value::Map(m)) => {
                let imgs = self.images(m, &["x", "y", "z"], &Vars::xyz())?;
                lib(Derivation::new(imgs))
            }
            _ => Err(at(
                v,
                "expected a derivation name or `{ x -> ..; y -> ..; z -> .. }`",
            )),
        }
    }

    /// Automorphism name, derivation name (exponentiated), or explicit images.
    fn automorphism(&self, v: &Value) -> Res<Automorphism> {
        match (self.lookup(v)?, v) {
            (Some(Object::Automorphism(a)), _) => Ok(a.clone()),
            (Some(Object::Derivation(d)), _) => lib(d.exponential()),
            (Some(o), _) => Err(at(v, format!("expected an automorphism, found {}", o.kind()))),
            (None, Value::Map(m)) => lib(Automorphism::from_images(self.images(
                m,
                &["x", "y", "z"],
                &Vars::xyz(),
            )?)),
            _ => Err(at(
                v,
                "expected an automorphism name or `{ x -> ..; y -> ..; z -> .. }`",
            )),
        }
    }

    fn plane_automorphism(&self, v: &Value) -> Res<Automorphism> {
        match (self.lookup(v)?, v) {
            (Some(Object::PlaneAut(a)), _) => Ok(a.clone()),
            (Some(o), _) => Err(at(v, format!("expected a planeaut, found {}", o.kind()))),
            (None, Value::Map(m)) => {
                let imgs = self.images(m, &["y", "z"], &plane_vars())?;
                lib(plane_aut(&imgs[0], &imgs[1]))
            }
            _ => Err(at(v, "expected a planeaut name or `{ y -> ..; z -> .. }`")),
        }
    }

    fn context(&self, v: &Value) -> Res<Arc<DeltaContext>> {
        match self.lookup(v)? {
            Some(Object::Context(c)) => Ok(c.clone()),
            Some(o) => Err(at(v, format!("expected a context, found {}", o.kind()))),
            None => Err(at(v, "expected a context name")),
        }
    }

    fn law(&self, v: &Value) -> Res<GroupLaw> {
        match self.lookup(v)? {
            Some(Object::Law(l)) => Ok(l.clone()),
            Some(o) => Err(at(v, format!("expected a law, found {}", o.kind()))),
            None => Err(at(v, "expected a law name")),
        }
    }

    fn divisor(&self, v: &Value) -> Res<PlaneDivisor> {
        match self.lookup(v)? {
            Some(Object::Divisor(d)) => Ok(d.clone()),
            Some(Object::Poly(p) | Object::UniPoly(p)) => lib(PlaneDivisor::new(p)),
            Some(o) => Err(at(v, format!("expected a divisor, found {}", o.kind()))),
            None => lib(PlaneDivisor::new(&self.poly_in(v, &plane_vars())?)),
        }
    }

    fn call<'v>(&self, v: &'v Value, name: &str, shape: &[usize]) -> Res<&'v Call> {
        match v {
            Value::Call(c) if c.name == name => {
                let got: Vec<usize> = c.groups.iter().map(Vec::len).collect();
                if got.len() == shape.len() && got.iter().zip(shape).all(|(g, s)| *s == usize::MAX || g == s)
                {
                    Ok(c)
                } else {
                    Err(at(v, format!("malformed `{name}(..)`")))
                }
            }
            _ => Err(at(v, format!("expected `{name}(..)`"))),
        }
    }

    fn nelem(&self, v: &Value) -> Res<NElem> {
        let c = self.call(v, "n", &[1, 1])?;
        let h = self.unipoly(&c.groups[0][0])?;
        let f = self.kernel_poly(&c.groups[1][0])?;
        lib(NElem::new(h, f))
    }

    fn gelem(&self, v: &Value, rank: usize) -> Res<GElem> {
        let c = self.call(v, "gelem", &[usize::MAX, 1, 1])?;
        if c.groups[0].len() != rank {
            return Err(at(v, format!("torus part must have {rank} coordinate(s)")));
        }
        let torus = c.groups[0]
            .iter()
            .map(|t| self.rational(t))
            .collect::<Res<Vec<_>>>()?;
        let h = self.unipoly(&c.groups[1][0])?;
        let f = self.kernel_poly(&c.groups[2][0])?;
        lib(GElem::new(torus, h, f))
    }

    fn character(&self, v: &Value) -> Res<CharacterVector> {
        let exps = self
            .list(v)?
            .iter()
            .map(|e| self.int(e))
            .collect::<Res<Vec<_>>>()?;
        Ok(CharacterVector::new(exps))
    }

    fn word<'v>(&self, v: &'v Value, allowed: &[&str]) -> Res<&'v str> {
        v.as_name()
            .filter(|n| allowed.contains(n))
            .ok_or_else(|| at(v, format!("expected one of {}", allowed.join(", "))))
    }

    fn define(&self, def: &Def) -> Res<Object> {
        Ok(match &def.body {
            DefBody::Poly(e) => Object::Poly(self.eval(e, &Vars::xyz())?),
            DefBody::UniPoly(e) => {
                let p = self.eval(e, &Vars::xyz())?;
                if !p.uses_only(&[2]) {
                    return Err(format!("{p} is not in Q[z]"));
                }
                Object::UniPoly(p)
            }
            DefBody::Divisor(e) => Object::Divisor(lib(PlaneDivisor::new(&self.eval(e, &plane_vars())?))?),
            DefBody::PlaneAut(m) => {
                let imgs = self.images(m, &["y", "z"], &plane_vars())?;
                Object::PlaneAut(lib(plane_aut(&imgs[0], &imgs[1]))?)
            }
            DefBody::Derivation(Form::Map(m)) => Object::Derivation(lib(Derivation::new(self.images(
                m,
                &["x", "y", "z"],
                &Vars::xyz(),
            )?))?),
            DefBody::Derivation(Form::Call(c)) => {
                let args = &c.groups[0];
                Object::Derivation(match c.name.as_str() {
                    "delta" => Derivation::delta(&self.poly(&args[0])?),
                    _ => self.derivation(&args[1])?.times(&self.poly(&args[0])?),
                })
            }
            DefBody::Automorphism(Form::Map(m)) => Object::Automorphism(lib(Automorphism::from_images(
                self.images(m, &["x", "y", "z"], &Vars::xyz())?,
            ))?),
            DefBody::Automorphism(Form::Call(c)) => {
                let args = &c.groups[0];
                Object::Automorphism(match c.name.as_str() {
                    "exp" => lib(self.derivation(&args[0])?.exponential())?,
                    "inverse" => lib(self.automorphism(&args[0])?.inverse())?,
                    _ => self
                        .automorphism(&args[0])?
                        .compose(&self.automorphism(&args[1])?),
                })
            }
            DefBody::Context(fields) => {
                let field = |n: &str| fields.iter().find(|f| f.name == n).map(|f: &Field| &f.value);
                let p = self.poly(field("P").expect("required field"))?;
                let d = match field("d") {
                    Some(v) => self.unipoly(v)?,
                    None => Poly::one(&Vars::xyz()),
                };
                let deg_max = match field("deg_max") {
                    Some(v) => self.small(v, 16)?,
                    None => DEFAULT_SEARCH_DEGREE,
                };
                Object::Context(Arc::new(lib(make_context(&p, &d, deg_max))?))
            }
            DefBody::Law(fields) => {
                let field = |n: &str| fields.iter().find(|f| f.name == n).map(|f: &Field| &f.value);
                let ch = |n: &str| self.character(field(n).expect("required field"));
                let nu = field("nu").map(|v| self.character(v)).transpose()?;
                let a_prime = self.unipoly(field("a'").expect("required field"))?;
                Object::Law(lib(GroupLaw::new(
                    ch("mu")?,
                    ch("rho1")?,
                    ch("rho2")?,
                    nu,
                    &a_prime,
                ))?)
            }
        })
    }

    fn run_check(&self, check: &Check, visible: usize, opts: &RunOptions) -> Entry {
        let result = catch_unwind(AssertUnwindSafe(|| self.execute(check, visible, opts)))
            .unwrap_or_else(|p| Err(format!("internal error: {}", panic_message(p))));
        match result {
            Ok(o) => Entry {
                name: check.label(),
                verdict: if o.pass { Verdict::Pass } else { Verdict::Fail },
                detail: o.detail,
                witnesses: o.witnesses,
            },
            Err(e) => Entry {
                name: check.label(),
                verdict: Verdict::Error,
                detail: e,
                witnesses: Vec::new(),
            },
        }
    }

    fn execute(&self, check: &Check, visible: usize, opts: &RunOptions) -> Res<Outcome> {
        let args = Args::bind(check)?;
        let seed = opts.seed_for(check);
        let bounds = opts.bounds();
        let budget = opts.budget;
        let minor = (budget / 5).max(1);
        match check.directive.as_str() {
            "exp_log_roundtrip" => self.exp_log_roundtrip(args.req("D")?),
            "one_parameter_group" => {
                let d = self.derivation(args.req("D")?)?;
                Ok(Outcome::from_sweep(checks::one_parameter_group(
                    &d, seed, budget, bounds,
                )))
            }
            "triangular_exp_log" => Ok(Outcome::from_sweep(checks::triangular_roundtrips(
                seed, budget, bounds,
            ))),
            "nilpotency_expect" => self.nilpotency_expect(&args),
            "standard_decomposition_expect" => self.standard_decomposition_expect(&args),
            "plinth_expect" => self.plinth_expect(&args, visible),
            "admissible_complement" => self.admissible_complement(&args),
            "combine_to_delta" => {
                let ctx = self.context(args.req("ctx")?)?;
                let n = self.nelem(args.req("n")?)?;
                let (f, ok) = combine_to_delta(&ctx, &n);
                Ok(Outcome::new(ok, format!("F = {f}")))
            }
            "ad_identity" => {
                let ctx = self.context(args.req("ctx")?)?;
                let q_max = args
                    .get("q_max")
                    .map(|v| self.small(v, 16))
                    .transpose()?
                    .unwrap_or(4);
                match (args.get("h"), args.get("f")) {
                    (Some(h), Some(f)) => {
                        let steps = lib(ad_identity_check(
                            &ctx,
                            &self.unipoly(h)?,
                            &self.kernel_poly(f)?,
                            q_max,
                        ))?;
                        let bad: Vec<String> = steps
                            .iter()
                            .filter(|s| !s.holds())
                            .map(|s| format!("q = {}: {} ≠ {}", s.q, s.bracket, s.predicted))
                            .collect();
                        Ok(match bad.first() {
                            None => Outcome::new(true, format!("q = 0..={q_max}")),
                            Some(first) => Outcome::new(false, first.clone()).with_witnesses(bad),
                        })
                    }
                    (None, None) => Ok(Outcome::from_sweep(checks::ad_identity_sweep(
                        &ctx, q_max, seed, budget, bounds,
                    ))),
                    _ => Err(format!("{}: give both `h` and `f`, or neither", check.pos)),
                }
            }
            "n_group_homomorphism" => {
                let ctx = self.context(args.req("ctx")?)?;
                match (args.get("a"), args.get("b")) {
                    (Some(a), Some(b)) => {
                        let (a, b) = (self.nelem(a)?, self.nelem(b)?);
                        Ok(match checks::n_group_case(&ctx, &a, &b) {
                            Ok(()) => Outcome::new(true, format!("{a}, {b}; convention {}", ctx.convention)),
                            Err(w) => Outcome::new(false, w),
                        })
                    }
                    (None, None) => {
                        let mut o = Outcome::from_sweep(checks::n_group_sweep(&ctx, seed, budget, bounds));
                        o.detail = format!("{}; convention {}", o.detail, ctx.convention);
                        Ok(o)
                    }
                    _ => Err(format!("{}: give both `a` and `b`, or neither", check.pos)),
                }
            }
            "sat_instance" => {
                let b = args.req("B")?;
                if let Some(Object::Context(ctx)) = self.lookup(b)? {
                    return Ok(Outcome::from_sweep(checks::sat_sweep(
                        ctx, budget, minor, seed, bounds,
                    )));
                }
                self.sat_instance(&args)
            }
            "irreducibility_criterion" => {
                let ctx = self.context(args.req("ctx")?)?;
                match args.get("n") {
                    Some(v) => {
                        let n = self.nelem(v)?;
                        let r = lib(irreducibility_criterion_check(&ctx, &n))?;
                        Ok(Outcome::new(
                            r.holds(&ctx),
                            format!(
                                "gcd(h, f) = {}, content = {}, stripped d = {}",
                                r.gcd, r.content, r.stripped
                            ),
                        ))
                    }
                    None => Ok(Outcome::from_sweep(checks::irreducibility_sweep(
                        &ctx, budget, minor, seed, bounds,
                    ))),
                }
            }
            "conjugation_formula" => {
                let g = self.automorphism(args.req("g")?)?;
                let f = self.poly(args.req("f")?)?;
                let u_prime = self.automorphism(args.req("u'")?)?;
                let d = self.poly(args.req("d")?)?;
                let r = lib(conjugation_formula_check(&g, &f, &u_prime, &d))?;
                let detail = format!("mu = {}, conjugate = ({})·u'", r.mu, r.predicted_coefficient);
                Ok(Outcome::new(r.holds(), detail).with_witnesses(vec![
                    format!("conjugate: {}", r.conjugate),
                    format!("predicted: {}", r.predicted),
                ]))
            }
            "commutes" => {
                let g = self.automorphism(args.req("g")?)?;
                let u = self.automorphism(args.req("u")?)?;
                let ok = commutes(&g, &u);
                Ok(Outcome::new(ok, if ok { "g∘u = u∘g" } else { "g∘u ≠ u∘g" }))
            }
            "divisor_symmetry_expect" => self.divisor_symmetry_expect(&args),
            "lift_H" => {
                let g = self.plane_automorphism(args.req("g")?)?;
                let div = self.divisor(args.req("div")?)?;
                let sigma = lib(lift_to_h(&g, &div))?;
                let ok = match args.get("expect") {
                    Some(v) => self.automorphism(v)? == sigma,
                    None => true,
                };
                Ok(Outcome::new(
                    ok,
                    format!("lift {sigma} commutes with (x + a, y, z)"),
                ))
            }
            "fence_witness" => {
                let div = self.divisor(args.req("div")?)?;
                let w = lib(fence_unipotent_witness(&div))?;
                Ok(Outcome::new(true, format!("{w} preserves {div} with lambda 1")))
            }
            "fixed_scheme" => {
                let div = self.divisor(args.req("div")?)?;
                let ms = match args.get("enlargements") {
                    Some(v) => self
                        .list(v)?
                        .iter()
                        .map(|m| self.poly_in(m, &plane_vars()))
                        .collect::<Res<Vec<_>>>()?,
                    None => default_enlargements(),
                };
                let r = lib(fixed_scheme_check(&div, &ms))?;
                let kept: Vec<String> = r
                    .enlargements
                    .iter()
                    .filter(|(_, moved)| !moved)
                    .map(|(m, _)| m.to_string())
                    .collect();
                let detail = if !r.fixes_divisor {
                    format!("shear does not fix Q[y, z]/({})", div.poly())
                } else if kept.is_empty() {
                    format!(
                        "fixes Q[y, z]/({}); moves all {} enlargements",
                        div.poly(),
                        r.enlargements.len()
                    )
                } else {
                    format!("enlargements by {} are not moved", kept.join(", "))
                };
                Ok(Outcome::new(r.holds(), detail))
            }
            "group_law" => {
                let law = self.law(args.req("law")?)?;
                Ok(Outcome::from_sweep(checks::group_law_sweep(
                    &law, seed, budget, bounds,
                )))
            }
            "fiber_commutator" => {
                let law = self.law(args.req("law")?)?;
                match (args.get("q"), args.get("h0"), args.get("f0")) {
                    (Some(q), Some(h0), f0) => {
                        let (q, h0) = (self.kernel_poly(q)?, self.unipoly(h0)?);
                        let f0 = match f0 {
                            Some(v) => self.kernel_poly(v)?,
                            None => Poly::zero(&Vars::zp()),
                        };
                        Ok(match checks::fiber_commutator_identity(&law, &q, &h0, &f0) {
                            Ok(()) => Outcome::new(
                                true,
                                format!(
                                    "fiber {}",
                                    crate::groupmodel::predicted_fiber_commutator(
                                        &q.embed(&Vars::zp()).map_err(|e| e.to_string())?,
                                        &h0.embed(&Vars::zp()).map_err(|e| e.to_string())?,
                                        &law
                                    )
                                ),
                            ),
                            Err(w) => Outcome::new(false, w),
                        })
                    }
                    (None, None, None) => Ok(Outcome::from_sweep(checks::fiber_commutator_sweep(
                        &law, seed, budget, bounds,
                    ))),
                    _ => Err(format!(
                        "{}: give `q` and `h0` (and optionally `f0`), or none",
                        check.pos
                    )),
                }
            }
            "pres_lemma" => self.pres_lemma(&args),
            "char_commutator" => {
                let ctx = self.context(args.req("ctx")?)?;
                match (args.get("h"), args.get("f")) {
                    (Some(h), Some(f)) => {
                        let r = lib(char_commutator_check(
                            &ctx,
                            &self.unipoly(h)?,
                            &self.kernel_poly(f)?,
                        ))?;
                        Ok(Outcome::new(r.holds(), format!("commutator {}", r.lhs))
                            .with_witnesses(vec![format!("expected: {}", r.rhs)]))
                    }
                    (None, None) => Ok(Outcome::from_sweep(checks::char_commutator_sweep(
                        &ctx, seed, budget, bounds,
                    ))),
                    _ => Err(format!("{}: give both `h` and `f`, or neither", check.pos)),
                }
            }
            "nonfence_commutator" => {
                let u_prime = self.automorphism(args.req("u'")?)?;
                let d = self.poly(args.req("d")?)?;
                let t = self.automorphism(args.req("t")?)?;
                let f = self.poly(args.req("f")?)?;
                let v = self.poly(args.req("v")?)?;
                let k = self.small(args.req("k")?, 16)?;
                let r = lib(nonfence_commutator_check(&u_prime, &d, &t, &f, &v, k))?;
                Ok(Outcome::new(
                    r.holds(),
                    format!("mu = {}, rho = {}, c(t) = {}", r.mu, r.rho, r.scalar),
                )
                .with_witnesses(vec![format!("lhs: {}", r.lhs), format!("rhs: {}", r.rhs)]))
            }
            other => Err(format!("{}: unknown directive `{other}`", check.pos)),
        }
    }

    fn exp_log_roundtrip(&self, v: &Value) -> Res<Outcome> {
        if let Some(Object::Automorphism(u)) = self.lookup(v)? {
            let l = lib(logarithm(u))?;
            let back = lib(l.exponential())?;
            let again = lib(logarithm(&back))?;
            let ok = &back == u && again == l;
            return Ok(Outcome::new(ok, format!("log(u) = {l}")));
        }
        let d = self.derivation(v)?;
        let u = lib(d.exponential())?;
        let l = lib(logarithm(&u))?;
        if l != d {
            return Ok(Outcome::new(false, format!("log(Exp(D)) = {l}")));
        }
        // Rebuilt from images so the logarithm cannot reuse the factor word.
        let bare = lib(Automorphism::from_images(u.images().to_vec()))?;
        let back = lib(lib(logarithm(&bare))?.exponential())?;
        if back != u {
            return Ok(Outcome::new(false, format!("Exp(log(u)) = {back}, u = {u}")));
        }
        Ok(Outcome::new(true, format!("Exp(D) = {u}")))
    }

    fn nilpotency_expect(&self, args: &Args) -> Res<Outcome> {
        let d = self.derivation(args.req("D")?)?;
        let ev = d.nilpotency(DEFAULT_NILPOTENCY_CAP);
        if !ev.is_nilpotent() {
            return Ok(Outcome::new(
                false,
                format!("inconclusive after {} iterations", ev.iterations_used),
            ));
        }
        let got = ev.vanishing_orders.iter().map(|k| *k as i64).collect::<Vec<_>>();
        let detail = format!("vanishing orders {}", show_list(&got));
        match args.get("orders") {
            Some(v) => {
                let want = self
                    .list(v)?
                    .iter()
                    .map(|e| self.int(e))
                    .collect::<Res<Vec<_>>>()?;
                Ok(Outcome::new(want == got, detail))
            }
            None => Ok(Outcome::new(true, detail)),
        }
    }

    fn standard_decomposition_expect(&self, args: &Args) -> Res<Outcome> {
        let v = args.req("u")?;
        let sd = match self.lookup(v)? {
            Some(Object::Derivation(d)) => lib(standard_decomposition_of(d))?,
            _ => lib(standard_decomposition(&self.automorphism(v)?))?,
        };
        let mut ok = true;
        if let Some(dv) = args.get("d") {
            ok &= self.poly(dv)?.monic() == sd.d;
        }
        if let Some(uv) = args.get("u'") {
            ok &= self.automorphism(uv)? == sd.u_prime;
        }
        Ok(Outcome::new(ok, format!("d = {}, u' = {}", sd.d, sd.u_prime))
            .with_witnesses(vec![format!("D' = {}", sd.d_prime)]))
    }

    /// Kernel generators when a plinth directive gives none: the coordinates
    /// and the previously defined polynomials that `D` annihilates.
    fn default_kernel_gens(&self, d: &Derivation, visible: usize) -> Vec<Poly> {
        let xyz = Vars::xyz();
        let mut gens: Vec<Poly> = (0..3)
            .map(|i| Poly::var(&xyz, i))
            .filter(|v| d.apply(v).is_zero())
            .collect();
        for name in &self.order[..visible] {
            if let Some(Ok(Object::Poly(p) | Object::UniPoly(p))) = self.objects.get(name) {
                if !p.is_constant() && d.apply(p).is_zero() && !gens.contains(p) {
                    gens.push(p.clone());
                }
            }
        }
        gens
    }

    fn plinth_expect(&self, args: &Args, visible: usize) -> Res<Outcome> {
        let d = self.derivation(args.req("D")?)?;
        let gens = match args.get("gens") {
            Some(v) => self
                .list(v)?
                .iter()
                .map(|g| self.poly(g))
                .collect::<Res<Vec<_>>>()?,
            None => self.default_kernel_gens(&d, visible),
        };
        let deg_max = args
            .get("deg_max")
            .map(|v| self.small(v, 16))
            .transpose()?
            .unwrap_or(DEFAULT_SEARCH_DEGREE);
        let pl = lib(plinth_search(&d, &gens, deg_max))?;
        let mut ok = true;
        let mut notes = Vec::new();
        if let Some(av) = args.get("a") {
            let a = self.poly(av)?;
            if a.is_zero() || a.monic() != pl.a.monic() {
                ok = false;
                notes.push(format!("expected a = {a}"));
            }
        }
        if let Some(qv) = args.get("q") {
            let q = self.poly(qv)?;
            let dq = d.apply(&q);
            if dq.is_zero() || dq.ratio_to(&pl.a).is_none() {
                ok = false;
                notes.push(format!("D({q}) = {dq} is not a multiple of a"));
            }
        }
        let mut detail = format!("Q = {}, a = {}", pl.q, pl.a);
        if !notes.is_empty() {
            detail = format!("{}; found {detail}", notes.join("; "));
        }
        Ok(Outcome::new(ok, detail)
            .with_witnesses(vec![format!("kernel generators {}", show_poly_list(&gens))]))
    }

    fn admissible_complement(&self, args: &Args) -> Res<Outcome> {
        let ctx = self.context(args.req("ctx")?)?;
        let e_of_p = ctx.e.apply(&ctx.p);
        let commute = ctx.d_prime.lie_bracket(&ctx.e).is_zero();
        let irreducible = lib(ctx.e.is_irreducible())?;
        let nilpotent = ctx.e.is_locally_nilpotent();
        let mut ok = e_of_p == -&ctx.a_prime && commute && irreducible && nilpotent;
        if let Some(v) = args.get("E") {
            ok &= self.derivation(v)? == ctx.e;
        }
        let detail = format!(
            "Q = {}, a' = {}, E = {}, E(P) = {e_of_p}, [D', E] {}",
            ctx.q,
            ctx.a_prime,
            ctx.e,
            if commute { "= 0" } else { "≠ 0" }
        );
        Ok(Outcome::new(ok, detail))
    }

    fn sat_instance(&self, args: &Args) -> Res<Outcome> {
        let b = self.derivation(args.req("B")?)?;
        let f_der = self.derivation(args.req("F")?)?;
        let f = self.poly(args.req("f")?)?;
        let r = lib(sat_instance_check(&b, &f_der, &f))?;
        let mut ok = r.holds();
        if let Some(v) = args.get("expect") {
            let want_vanish = self.word(v, &["vanishes", "obstruction"])? == "vanishes";
            ok &= want_vanish == r.bracket_vanishes();
        }
        let detail = if r.bracket_vanishes() {
            format!("[fF, B] = 0, B(f) = {}, [F, B] = {}", r.b_of_f, r.f_bracket)
        } else {
            format!("obstruction [fF, B] = {}", r.bracket)
        };
        Ok(Outcome::new(ok, detail))
    }

    fn divisor_symmetry_expect(&self, args: &Args) -> Res<Outcome> {
        let av = args.req("a")?;
        let a = match self.lookup(av)? {
            Some(Object::Divisor(d)) => d.poly().clone(),
            _ => self.poly(av)?,
        };
        let sym = lib(affine_symmetries(&a))?;
        let mut ok = sym.verified;
        if let SymmetryOrder::Finite(_) = sym.order {
            ok &= sym.doubled_order_fails;
        }
        if let Some(v) = args.get("mu") {
            ok &= self.rational(v)? == sym.center;
        }
        if let Some(v) = args.get("e") {
            let want = if v.as_name() == Some("torus") {
                SymmetryOrder::Torus
            } else {
                SymmetryOrder::Finite(self.small(v, 1 << 20)?)
            };
            ok &= want == sym.order;
        }
        if let Some(v) = args.get("lambda") {
            ok &= Some(self.rational(v)?) == sym.lambda();
        }
        Ok(Outcome::new(ok, sym.to_string()))
    }

    fn pres_lemma(&self, args: &Args) -> Res<Outcome> {
        let law = self.law(args.req("law")?)?;
        let rank = law.rank();
        let zp = Vars::zp();
        let candidates = match args.get("candidates") {
            Some(v) => self
                .list(v)?
                .iter()
                .map(|c| self.gelem(c, rank))
                .collect::<Res<Vec<_>>>()?,
            None => {
                let two = Rational::from_integer(2.into());
                let one = Rational::one();
                vec![
                    lib(GElem::torus_only(vec![two; rank]))?,
                    lib(GElem::new(
                        vec![one.clone(); rank],
                        Poly::one(&zp),
                        Poly::zero(&zp),
                    ))?,
                    lib(GElem::new(vec![one; rank], Poly::zero(&zp), Poly::var(&zp, 1)))?,
                ]
            }
        };
        let points = match args.get("points") {
            Some(v) => self
                .list(v)?
                .iter()
                .map(|p| {
                    self.list(p)?
                        .iter()
                        .map(|t| self.rational(t))
                        .collect::<Res<Vec<_>>>()
                })
                .collect::<Res<Vec<_>>>()?,
            None => default_points(rank),
        };
        let r = lib(verify_pres_lemma(&law, &points, &candidates, 0))?;
        let passing: Vec<String> = r
            .verdicts
            .iter()
            .filter(|(_, ok, _)| *ok)
            .map(|(g, _, _)| g.to_string())
            .collect();
        let witnesses = r
            .verdicts
            .iter()
            .map(|(g, ok, failed)| {
                if *ok {
                    format!("{g} centralizes all witnesses")
                } else {
                    format!("{g} fails witnesses {failed:?}")
                }
            })
            .collect();
        Ok(Outcome::new(
            r.isolates_fiber(),
            format!("i0 = {}, centralizing candidates {}", r.i0, show_list(&passing)),
        )
        .with_witnesses(witnesses))
    }
}

/// Torus test points `(2, …, 2)`, `(3, 5, 7, …)` and `(−2, 3, 3, …)`.
fn default_points(rank: usize) -> Vec<Vec<Rational>> {
    const PRIMES: [i64; 8] = [3, 5, 7, 11, 13, 17, 19, 23];
    let r = |n: i64| Rational::from_integer(n.into());
    vec![
        vec![r(2); rank],
        (0..rank).map(|i| r(PRIMES[i % PRIMES.len()])).collect(),
        (0..rank).map(|i| if i == 0 { r(-2) } else { r(3) }).collect(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse;

    fn run_src(src: &str) -> Report {
        let opts = RunOptions {
            budget: 4,
            ..RunOptions::default()
        };
        run(&parse(src).unwrap(), &opts)
    }

    #[test]
    fn empty_corpus_gives_empty_report() {
        let r = run_src("");
        assert_eq!(r.render(false), "summary: 0/0/0\n");
    }

    #[test]
    fn wrong_plinth_expectation_fails_with_witness() {
        let r = run_src("poly P = x*z + y^2\nderivation D = delta(P)\ncheck plinth_expect(D, a = 1)\n");
        let e = &r.entries[0];
        assert_eq!(e.verdict, Verdict::Fail);
        assert_eq!(e.name, "plinth_expect@3");
        assert!(e.detail.contains("a = z"), "{}", e.detail);
    }

    #[test]
    fn failed_definitions_surface_as_errors() {
        let r = run_src(
            "derivation D { x -> x; y -> 0; z -> 0 }\nautomorphism u = exp(D)\ncheck exp_log_roundtrip(u)\n",
        );
        assert_eq!(r.count(Verdict::Error), 2);
        assert!(r.entries[0].name.starts_with("u@2"));
        assert!(
            r.entries[1].detail.contains("definition failed"),
            "{}",
            r.entries[1].detail
        );
    }

    #[test]
    fn argument_kind_errors_are_positioned() {
        let r = run_src("poly p = x\ncheck exp_log_roundtrip(p)\n");
        assert_eq!(r.entries[0].verdict, Verdict::Error);
        assert!(
            r.entries[0].detail.starts_with("2:25:"),
            "{}",
            r.entries[0].detail
        );
    }

    #[test]
    fn every_directive_is_dispatched() {
        for name in directive_names() {
            assert!(directive_params(name).is_some());
        }
        assert!(directive_params("nope").is_none());
    }
}
