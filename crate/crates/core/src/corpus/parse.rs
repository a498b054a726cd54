//! Recursive-descent parser for corpus files.
//!
//! ```text
//! file  := item*
//! item  := def | check
//! def   := ("poly" | "unipoly" | "divisor") NAME "=" expr
//!        | ("derivation" | "automorphism") NAME (map | "=" call)
//!        | "planeaut" NAME map
//!        | ("context" | "law") NAME "{" field (";" field)* [";"] "}"
//! check := "check" IDENT "(" [arg ("," arg)*] ")"
//! arg   := [IDENT "="] value
//! value := expr | "[" [value ("," value)*] "]" | map | IDENT "(" groups ")"
//! map   := "{" [IDENT "->" expr (";" IDENT "->" expr)* [";"]] "}"
//! ```
//!
//! Names must be defined before use and are never redefined.

use std::collections::HashMap;

use crate::arith::text::{tokenize, Cursor, Expr, Pos, SyntaxError, Tok};

use super::ast::{Arg, Call, Check, Corpus, Def, DefBody, Field, Form, Item, Map, Value};
use super::run::directive_params;

/// Identifiers that are always in scope: ring variables and enum words.
const BUILTIN_NAMES: &[&str] = &["x", "y", "z", "P", "torus", "vanishes", "obstruction"];

const MAX_VALUE_DEPTH: u32 = 32;

pub fn parse(src: &str) -> Result<Corpus, SyntaxError> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        cur: Cursor::new(&toks),
        defined: HashMap::new(),
    };
    let mut items = Vec::new();
    while !p.cur.at_eof() {
        items.push(p.item()?);
    }
    Ok(Corpus { items })
}

struct Parser<'a> {
    cur: Cursor<'a>,
    defined: HashMap<String, Pos>,
}

fn err<T>(pos: Pos, msg: impl Into<String>) -> Result<T, SyntaxError> {
    Err(SyntaxError::new(pos, msg))
}

impl Parser<'_> {
    fn item(&mut self) -> Result<Item, SyntaxError> {
        let (kw, kw_pos) = self.cur.expect_ident()?;
        if kw == "check" {
            return self.check().map(Item::Check);
        }
        let (name, pos) = self.cur.expect_ident()?;
        let body = match kw.as_str() {
            "poly" => DefBody::Poly(self.eq_expr()?),
            "unipoly" => DefBody::UniPoly(self.eq_expr()?),
            "divisor" => DefBody::Divisor(self.eq_expr()?),
            "derivation" | "automorphism" => {
                let form = if self.cur.eat_sym('=') {
                    let call = self.call_named()?;
                    self.check_form_call(&kw, &call)?;
                    Form::Call(call)
                } else {
                    Form::Map(self.images(&["x", "y", "z"])?)
                };
                if kw == "derivation" {
                    DefBody::Derivation(form)
                } else {
                    DefBody::Automorphism(form)
                }
            }
            "planeaut" => DefBody::PlaneAut(self.images(&["y", "z"])?),
            "context" => DefBody::Context(self.fields(&["P", "d", "deg_max"], &["P"])?),
            "law" => {
                DefBody::Law(self.fields(&["mu", "rho1", "rho2", "nu", "a'"], &["mu", "rho1", "rho2", "a'"])?)
            }
            _ => {
                return err(
                    kw_pos,
                    format!("expected a definition keyword or `check`, found `{kw}`"),
                )
            }
        };
        self.define(&name, pos)?;
        Ok(Item::Def(Def { name, pos, body }))
    }

    fn define(&mut self, name: &str, pos: Pos) -> Result<(), SyntaxError> {
        if BUILTIN_NAMES.contains(&name) && name != "P" {
            return err(pos, format!("`{name}` is reserved"));
        }
        if let Some(prev) = self.defined.get(name) {
            return err(pos, format!("`{name}` is already defined at {prev}"));
        }
        self.defined.insert(name.to_string(), pos);
        Ok(())
    }

    fn eq_expr(&mut self) -> Result<Expr, SyntaxError> {
        self.cur.expect_sym('=')?;
        self.expr()
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let e = self.cur.parse_expr()?;
        self.resolve(&e)?;
        Ok(e)
    }

    fn resolve(&self, e: &Expr) -> Result<(), SyntaxError> {
        let mut names = Vec::new();
        e.names(&mut names);
        for (n, pos) in names {
            if !BUILTIN_NAMES.contains(&n.as_str()) && !self.defined.contains_key(&n) {
                return err(pos, format!("undefined name `{n}`"));
            }
        }
        Ok(())
    }

    /// `{ k -> e; … }` with exactly the given keys, each once.
    fn images(&mut self, keys: &[&str]) -> Result<Map, SyntaxError> {
        let map = self.map()?;
        for (k, pos, _) in &map.entries {
            if !keys.contains(&k.as_str()) {
                return err(
                    *pos,
                    format!("unexpected image key `{k}`; expected {}", keys.join(", ")),
                );
            }
            if map.entries.iter().filter(|(j, _, _)| j == k).count() > 1 {
                return err(*pos, format!("image of `{k}` given twice"));
            }
        }
        if let Some(missing) = keys.iter().find(|k| !map.entries.iter().any(|(j, _, _)| j == *k)) {
            return err(map.pos, format!("missing image of `{missing}`"));
        }
        Ok(map)
    }

    fn map(&mut self) -> Result<Map, SyntaxError> {
        let pos = self.cur.expect_sym('{')?;
        let mut entries = Vec::new();
        while !self.cur.eat_sym('}') {
            let (k, kpos) = self.cur.expect_ident()?;
            let t = self.cur.bump();
            if t.tok != Tok::Arrow {
                return err(t.pos, format!("expected `->`, found {}", t.tok));
            }
            entries.push((k, kpos, self.expr()?));
            if !self.cur.eat_sym(';') {
                self.cur.expect_sym('}')?;
                break;
            }
        }
        Ok(Map { pos, entries })
    }

    fn fields(&mut self, allowed: &[&str], required: &[&str]) -> Result<Vec<Field>, SyntaxError> {
        let open = self.cur.expect_sym('{')?;
        let mut fields: Vec<Field> = Vec::new();
        while !self.cur.eat_sym('}') {
            let (name, pos) = self.cur.expect_ident()?;
            if !allowed.contains(&name.as_str()) {
                return err(
                    pos,
                    format!("unknown field `{name}`; expected one of {}", allowed.join(", ")),
                );
            }
            if fields.iter().any(|f| f.name == name) {
                return err(pos, format!("field `{name}` given twice"));
            }
            self.cur.expect_sym('=')?;
            let value = self.value(0)?;
            fields.push(Field { name, pos, value });
            if !self.cur.eat_sym(';') {
                self.cur.expect_sym('}')?;
                break;
            }
        }
        if let Some(missing) = required.iter().find(|r| !fields.iter().any(|f| f.name == **r)) {
            return err(open, format!("missing field `{missing}`"));
        }
        Ok(fields)
    }

    fn value(&mut self, depth: u32) -> Result<Value, SyntaxError> {
        let pos = self.cur.pos();
        if depth > MAX_VALUE_DEPTH {
            return err(pos, "value nested too deeply");
        }
        match &self.cur.peek().tok {
            Tok::Sym('[') => {
                self.cur.bump();
                let mut items = Vec::new();
                if !self.cur.eat_sym(']') {
                    loop {
                        items.push(self.value(depth + 1)?);
                        if self.cur.eat_sym(']') {
                            break;
                        }
                        self.cur.expect_sym(',')?;
                    }
                }
                Ok(Value::List(items, pos))
            }
            Tok::Sym('{') => Ok(Value::Map(self.map()?)),
            Tok::Ident(_) if self.cur.peek_at(1).tok == Tok::Sym('(') => {
                let call = self.call_with_depth(depth)?;
                if !matches!(call.name.as_str(), "n" | "gelem") {
                    return err(
                        call.pos,
                        format!("unknown constructor `{}`; expected `n` or `gelem`", call.name),
                    );
                }
                Ok(Value::Call(call))
            }
            _ => Ok(Value::Expr(self.expr()?, pos)),
        }
    }

    fn call_named(&mut self) -> Result<Call, SyntaxError> {
        if !matches!(self.cur.peek_at(1).tok, Tok::Sym('(')) {
            let t = self.cur.peek();
            return err(t.pos, format!("expected a constructor call, found {}", t.tok));
        }
        self.call_with_depth(0)
    }

    fn call_with_depth(&mut self, depth: u32) -> Result<Call, SyntaxError> {
        let (name, pos) = self.cur.expect_ident()?;
        self.cur.expect_sym('(')?;
        let mut groups = vec![Vec::new()];
        if !self.cur.eat_sym(')') {
            loop {
                groups.last_mut().expect("nonempty").push(self.value(depth + 1)?);
                if self.cur.eat_sym(')') {
                    break;
                }
                if self.cur.eat_sym(';') {
                    groups.push(Vec::new());
                } else {
                    self.cur.expect_sym(',')?;
                }
            }
        }
        Ok(Call { name, pos, groups })
    }

    fn check_form_call(&self, kw: &str, call: &Call) -> Result<(), SyntaxError> {
        let arity = match (kw, call.name.as_str()) {
            ("derivation", "delta") => 1,
            ("derivation", "times") => 2,
            ("automorphism", "exp") | ("automorphism", "inverse") => 1,
            ("automorphism", "compose") => 2,
            _ => {
                let expected = if kw == "derivation" {
                    "`delta(f)` or `times(f, D)`"
                } else {
                    "`exp(D)`, `compose(a, b)` or `inverse(a)`"
                };
                return err(
                    call.pos,
                    format!("unknown {kw} constructor `{}`; expected {expected}", call.name),
                );
            }
        };
        if call.groups.len() != 1 || call.groups[0].len() != arity {
            return err(call.pos, format!("`{}` takes {arity} argument(s)", call.name));
        }
        Ok(())
    }

    fn check(&mut self) -> Result<Check, SyntaxError> {
        let (directive, pos) = self.cur.expect_ident()?;
        let params = directive_params(&directive)
            .ok_or_else(|| SyntaxError::new(pos, format!("unknown directive `{directive}`")))?;
        self.cur.expect_sym('(')?;
        let mut args: Vec<Arg> = Vec::new();
        if !self.cur.eat_sym(')') {
            loop {
                let key = match (&self.cur.peek().tok, &self.cur.peek_at(1).tok) {
                    (Tok::Ident(k), Tok::Sym('=')) => {
                        let k = k.clone();
                        let kpos = self.cur.bump().pos;
                        self.cur.bump();
                        if !params.contains(&k.as_str()) {
                            return err(
                                kpos,
                                format!(
                                    "`{directive}` has no parameter `{k}`; expected one of {}",
                                    params.join(", ")
                                ),
                            );
                        }
                        if args.iter().any(|a| a.key.as_ref().is_some_and(|(j, _)| *j == k)) {
                            return err(kpos, format!("parameter `{k}` given twice"));
                        }
                        Some((k, kpos))
                    }
                    _ => {
                        if args.iter().any(|a| a.key.is_some()) {
                            return err(self.cur.pos(), "positional argument after a keyword argument");
                        }
                        if args.len() >= params.len() {
                            return err(
                                self.cur.pos(),
                                format!("`{directive}` takes at most {} argument(s)", params.len()),
                            );
                        }
                        None
                    }
                };
                let value = self.value(0)?;
                args.push(Arg { key, value });
                if self.cur.eat_sym(')') {
                    break;
                }
                self.cur.expect_sym(',')?;
            }
        }
        Ok(Check { directive, pos, args })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(src: &str) -> String {
        parse(src).unwrap_err().to_string()
    }

    #[test]
    fn definitions_and_checks() {
        let c = parse(
            "poly P = x*z + y^2 # the Freudenburg-type form\n\
             derivation D { x -> -2*y; y -> z; z -> 0 }\n\
             check exp_log_roundtrip(D)\n",
        )
        .unwrap();
        assert_eq!(c.definitions().count(), 2);
        let ch: Vec<_> = c.checks().collect();
        assert_eq!(ch.len(), 1);
        assert_eq!(ch[0].label(), "exp_log_roundtrip@3");
    }

    #[test]
    fn canonical_printing_roundtrips() {
        let src = "poly   P=x*z+y^2\nderivation D{x->-2*y;y->z;z->0;}\n\
                   context C { P = P; d = z; deg_max = 3 }\n\
                   law L { mu = [-2]; rho1 = [1]; rho2 = [2]; a' = z }\n\
                   check pres_lemma(L, candidates = [gelem(2; 0; 0), gelem(1; 0; P)])\n";
        let once = parse(src).unwrap().to_string();
        assert_eq!(once.lines().next(), Some("poly P = x*z + y^2"));
        assert_eq!(
            once.lines().nth(1),
            Some("derivation D { x -> -2*y; y -> z; z -> 0 }")
        );
        assert_eq!(parse(&once).unwrap().to_string(), once);
    }

    #[test]
    fn positioned_diagnostics() {
        assert_eq!(diag("check exp_log_roundtrip(D)"), "1:25: undefined name `D`");
        assert_eq!(
            diag("poly a = x\npoly a = y"),
            "2:6: `a` is already defined at 1:6"
        );
        assert_eq!(
            diag("derivation D { x -> 1; y -> 0 }"),
            "1:14: missing image of `z`"
        );
        assert_eq!(diag("check frobnicate()"), "1:7: unknown directive `frobnicate`");
        assert_eq!(
            diag("poly p = x +"),
            "1:13: expected expression, found end of input"
        );
        assert_eq!(diag("poly p = x $"), "1:12: unexpected character '$'");
        assert!(diag("check exp_log_roundtrip(x, y)").contains("at most 1"));
    }

    #[test]
    fn empty_and_comment_only_inputs() {
        assert_eq!(parse("").unwrap().items.len(), 0);
        assert_eq!(parse("# nothing here\n\n").unwrap().items.len(), 0);
    }

    #[test]
    fn deep_nesting_is_rejected_not_overflowed() {
        let src = format!("check pres_lemma({}", "[".repeat(10_000));
        assert!(diag(&src).contains("nested too deeply"));
    }
}
