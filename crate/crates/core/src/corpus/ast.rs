//! Syntax tree of a corpus file and its canonical printer.

use std::fmt;

use crate::arith::text::{Expr, Pos};

#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pub items: Vec<Item>,
}

#[derive(Clone, Debug)]
pub enum Item {
    Def(Def),
    Check(Check),
}

#[derive(Clone, Debug)]
pub struct Def {
    pub name: String,
    pub pos: Pos,
    pub body: DefBody,
}

#[derive(Clone, Debug)]
pub enum DefBody {
    /// Over `Q[x, y, z]`.
    Poly(Expr),
    /// Over `Q[x, y, z]`, restricted to `Q[z]`.
    UniPoly(Expr),
    Derivation(Form),
    Automorphism(Form),
    Context(Vec<Field>),
    Law(Vec<Field>),
    /// Over `Q[y, z]`.
    Divisor(Expr),
    PlaneAut(Map),
}

impl DefBody {
    pub fn keyword(&self) -> &'static str {
        match self {
            DefBody::Poly(_) => "poly",
            DefBody::UniPoly(_) => "unipoly",
            DefBody::Derivation(_) => "derivation",
            DefBody::Automorphism(_) => "automorphism",
            DefBody::Context(_) => "context",
            DefBody::Law(_) => "law",
            DefBody::Divisor(_) => "divisor",
            DefBody::PlaneAut(_) => "planeaut",
        }
    }
}

/// Body of a derivation or automorphism: explicit images or a constructor.
#[derive(Clone, Debug)]
pub enum Form {
    Map(Map),
    Call(Call),
}

/// `{ x -> e; y -> e; … }`.
#[derive(Clone, Debug)]
pub struct Map {
    pub pos: Pos,
    pub entries: Vec<(String, Pos, Expr)>,
}

/// `name = value` inside a `context` or `law` block.
#[derive(Clone, Debug)]
pub struct Field {
    pub name: String,
    pub pos: Pos,
    pub value: Value,
}

/// `name(v, v; v; …)`: comma-separated groups separated by `;`.
#[derive(Clone, Debug)]
pub struct Call {
    pub name: String,
    pub pos: Pos,
    pub groups: Vec<Vec<Value>>,
}

#[derive(Clone, Debug)]
pub enum Value {
    Expr(Expr, Pos),
    List(Vec<Value>, Pos),
    Map(Map),
    Call(Call),
}

impl Value {
    pub fn pos(&self) -> Pos {
        match self {
            Value::Expr(_, p) | Value::List(_, p) => *p,
            Value::Map(m) => m.pos,
            Value::Call(c) => c.pos,
        }
    }

    /// The identifier, if the value is a bare name.
    pub fn as_name(&self) -> Option<&str> {
        match self {
            Value::Expr(Expr::Name(n, _), _) => Some(n),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub directive: String,
    pub pos: Pos,
    pub args: Vec<Arg>,
}

impl Check {
    /// Report label, e.g. `plinth_expect@12`.
    pub fn label(&self) -> String {
        format!("{}@{}", self.directive, self.pos.line)
    }
}

#[derive(Clone, Debug)]
pub struct Arg {
    pub key: Option<(String, Pos)>,
    pub value: Value,
}

impl Corpus {
    pub fn definitions(&self) -> impl Iterator<Item = &Def> {
        self.items.iter().filter_map(|i| match i {
            Item::Def(d) => Some(d),
            Item::Check(_) => None,
        })
    }

    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.items.iter().filter_map(|i| match i {
            Item::Check(c) => Some(c),
            Item::Def(_) => None,
        })
    }
}

fn write_sep<T>(
    f: &mut fmt::Formatter<'_>,
    items: &[T],
    sep: &str,
    mut each: impl FnMut(&mut fmt::Formatter<'_>, &T) -> fmt::Result,
) -> fmt::Result {
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        each(f, it)?;
    }
    Ok(())
}

impl fmt::Display for Map {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{ ")?;
        write_sep(f, &self.entries, "; ", |f, (k, _, e)| write!(f, "{k} -> {e}"))?;
        f.write_str(" }")
    }
}

impl fmt::Display for Call {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name)?;
        write_sep(f, &self.groups, "; ", |f, g| {
            write_sep(f, g, ", ", |f, v| write!(f, "{v}"))
        })?;
        f.write_str(")")
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Expr(e, _) => write!(f, "{e}"),
            Value::List(vs, _) => {
                f.write_str("[")?;
                write_sep(f, vs, ", ", |f, v| write!(f, "{v}"))?;
                f.write_str("]")
            }
            Value::Map(m) => write!(f, "{m}"),
            Value::Call(c) => write!(f, "{c}"),
        }
    }
}

fn write_fields(f: &mut fmt::Formatter<'_>, fields: &[Field]) -> fmt::Result {
    f.write_str("{ ")?;
    write_sep(f, fields, "; ", |f, fd| write!(f, "{} = {}", fd.name, fd.value))?;
    f.write_str(" }")
}

impl fmt::Display for Def {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.body.keyword(), self.name)?;
        match &self.body {
            DefBody::Poly(e) | DefBody::UniPoly(e) | DefBody::Divisor(e) => write!(f, " = {e}"),
            DefBody::Derivation(Form::Map(m))
            | DefBody::Automorphism(Form::Map(m))
            | DefBody::PlaneAut(m) => {
                write!(f, " {m}")
            }
            DefBody::Derivation(Form::Call(c)) | DefBody::Automorphism(Form::Call(c)) => write!(f, " = {c}"),
            DefBody::Context(fields) | DefBody::Law(fields) => {
                f.write_str(" ")?;
                write_fields(f, fields)
            }
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "check {}(", self.directive)?;
        write_sep(f, &self.args, ", ", |f, a| match &a.key {
            Some((k, _)) => write!(f, "{k} = {}", a.value),
            None => write!(f, "{}", a.value),
        })?;
        f.write_str(")")
    }
}

/// Canonical text: one item per line, comments dropped.
impl fmt::Display for Corpus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            match item {
                Item::Def(d) => writeln!(f, "{d}")?,
                Item::Check(c) => writeln!(f, "{c}")?,
            }
        }
        Ok(())
    }
}
