//! Text syntax for symbols.
//!
//! ```text
//! const(c)                      constant
//! bump(center, radius, height)  smooth bump; center is a number or [c1, c2, ...]
//! indicator(R=1)                indicator of the closed ball |z| <= R
//! radial(expr)                  expr in s = |z|^2 (and r = |z|)
//! angular(k, envelope)          (z1/|z1|)^k * envelope(s)
//! sum(f, g), product(f, g)      also written f + g and f * g
//! ```
//!
//! Anything else is read as an arithmetic expression in `z`, `x`, `y`
//! (first coordinate), `z1..z9`, `x1..`, `y1..`, `r`, `s`, the constants
//! `i`, `pi`, `e`, and the functions `sin cos tan sinh cosh tanh exp log
//! sqrt abs re im conj arg atan min max`. Imaginary literals may be written
//! `2i`. The sup bound of a free-form expression is estimated by sampling
//! spheres out to radius `1e6`; expressions that keep growing there are
//! rejected as unbounded.

use std::f64::consts::{E, PI};
use std::sync::Arc;

use crate::cplx::{self, C64};
use crate::error::{FockError, Result};
use crate::sampling::sphere_directions;
use crate::symbol::{SymbolFunction, SymbolTag};

/// Safety factor applied to sampled sup bounds.
const BOUND_SLACK: f64 = 1.1;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Ident(String),
    Punct(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v: f64 = text.parse().map_err(|_| parse_err(start, format!("bad number '{text}'")))?;
            let imag = chars.get(i) == Some(&'i') && !chars.get(i + 1).is_some_and(|d| d.is_alphanumeric() || *d == '_');
            if imag {
                i += 1;
                out.push((start, Tok::Imag(v)));
            } else {
                out.push((start, Tok::Num(v)));
            }
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "()+-*/^,=[]".contains(c) {
            out.push((i, Tok::Punct(c)));
            i += 1;
        } else {
            return Err(parse_err(i, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

fn parse_err(pos: usize, msg: impl Into<String>) -> FockError {
    FockError::Parse(format!("at {pos}: {}", msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Var {
    Z(usize),
    X(usize),
    Y(usize),
    R,
    S,
}

impl Var {
    fn is_radial(self) -> bool {
        matches!(self, Var::R | Var::S)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Abs,
    Re,
    Im,
    Conj,
    Arg,
    Atan,
    Min,
    Max,
}

impl Func {
    fn lookup(name: &str) -> Option<Self> {
        use Func::*;
        Some(match name {
            "sin" => Sin,
            "cos" => Cos,
            "tan" => Tan,
            "sinh" => Sinh,
            "cosh" => Cosh,
            "tanh" => Tanh,
            "exp" => Exp,
            "log" | "ln" => Log,
            "sqrt" => Sqrt,
            "abs" => Abs,
            "re" => Re,
            "im" => Im,
            "conj" => Conj,
            "arg" => Arg,
            "atan" => Atan,
            "min" => Min,
            "max" => Max,
            _ => return None,
        })
    }

    fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }

    fn apply(self, a: &[C64]) -> C64 {
        use Func::*;
        let x = a[0];
        match self {
            Sin => x.sin(),
            Cos => x.cos(),
            Tan => x.tan(),
            Sinh => x.sinh(),
            Cosh => x.cosh(),
            Tanh => x.tanh(),
            Exp => x.exp(),
            Log => x.ln(),
            Sqrt => x.sqrt(),
            Abs => C64::new(x.norm(), 0.0),
            Re => C64::new(x.re, 0.0),
            Im => C64::new(x.im, 0.0),
            Conj => x.conj(),
            Arg => C64::new(x.arg(), 0.0),
            Atan => x.atan(),
            Min => C64::new(x.re.min(a[1].re), 0.0),
            Max => C64::new(x.re.max(a[1].re), 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone)]
enum Expr {
    Num(C64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    Symbol(SymbolFunction),
}

struct Point<'a> {
    z: &'a [C64],
    s: f64,
}

impl Expr {
    fn eval(&self, p: &Point) -> C64 {
        match self {
            Expr::Num(c) => *c,
            Expr::Var(v) => match *v {
                Var::Z(k) => p.z.get(k).copied().unwrap_or_default(),
                Var::X(k) => C64::new(p.z.get(k).map_or(0.0, |c| c.re), 0.0),
                Var::Y(k) => C64::new(p.z.get(k).map_or(0.0, |c| c.im), 0.0),
                Var::R => C64::new(p.s.sqrt(), 0.0),
                Var::S => C64::new(p.s, 0.0),
            },
            Expr::Neg(a) => -a.eval(p),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(p), b.eval(p));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => {
                        if b.im == 0.0 && b.re.fract() == 0.0 && b.re.abs() <= i32::MAX as f64 {
                            a.powi(b.re as i32)
                        } else {
                            a.powc(b)
                        }
                    }
                }
            }
            Expr::Call(f, args) => {
                let vals: Vec<C64> = args.iter().map(|a| a.eval(p)).collect();
                f.apply(&vals)
            }
            Expr::Symbol(f) => f.eval(p.z),
        }
    }

    fn visit(&self, g: &mut impl FnMut(&Expr)) {
        g(self);
        match self {
            Expr::Neg(a) => a.visit(g),
            Expr::Bin(_, a, b) => {
                a.visit(g);
                b.visit(g);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.visit(g)),
            _ => {}
        }
    }

    /// Built only from numbers, symbol constructors, `+ - *` and scalar division.
    fn is_structural(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Symbol(_) => true,
            Expr::Neg(a) => a.is_structural(),
            Expr::Bin(BinOp::Add | BinOp::Sub | BinOp::Mul, a, b) => a.is_structural() && b.is_structural(),
            Expr::Bin(BinOp::Div, a, b) => a.is_structural() && b.constant().is_some(),
            _ => false,
        }
    }

    fn constant(&self) -> Option<C64> {
        let mut ok = true;
        self.visit(&mut |e| {
            if matches!(e, Expr::Var(_) | Expr::Symbol(_)) {
                ok = false;
            }
        });
        ok.then(|| self.eval(&Point { z: &[], s: 0.0 }))
    }

    fn is_radial(&self) -> bool {
        let mut ok = true;
        self.visit(&mut |e| match e {
            Expr::Var(v) if !v.is_radial() => ok = false,
            Expr::Symbol(f) if f.tag() != SymbolTag::Radial => ok = false,
            _ => {}
        });
        ok
    }
}

#[derive(Debug, Clone)]
enum Arg {
    Expr(Expr),
    List(Vec<Expr>),
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(parse_err(self.here(), format!("expected '{c}'")))
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.product()?));
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let at = self.here();
        let tok = self.peek().cloned().ok_or_else(|| parse_err(at, "unexpected end of input"))?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Num(C64::new(v, 0.0))),
            Tok::Imag(v) => Ok(Expr::Num(C64::new(0.0, v))),
            Tok::Punct('(') => {
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Punct(c) => Err(parse_err(at, format!("unexpected '{c}'"))),
            Tok::Ident(name) => {
                if self.peek() == Some(&Tok::Punct('(')) {
                    self.pos += 1;
                    let args = self.args()?;
                    self.call(&name, args, at)
                } else {
                    ident_value(&name).ok_or_else(|| parse_err(at, format!("unknown name '{name}'")))
                }
            }
        }
    }

    fn args(&mut self) -> Result<Vec<(Option<String>, Arg)>> {
        let mut out = Vec::new();
        if self.eat(')') {
            return Ok(out);
        }
        loop {
            let mut name = None;
            if let (Some(Tok::Ident(id)), Some((_, Tok::Punct('=')))) = (self.peek(), self.toks.get(self.pos + 1)) {
                name = Some(id.clone());
                self.pos += 2;
            }
            let arg = if self.eat('[') {
                let mut items = vec![self.sum()?];
                while self.eat(',') {
                    items.push(self.sum()?);
                }
                self.expect(']')?;
                Arg::List(items)
            } else {
                Arg::Expr(self.sum()?)
            };
            out.push((name, arg));
            if self.eat(')') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn call(&mut self, name: &str, args: Vec<(Option<String>, Arg)>, at: usize) -> Result<Expr> {
        let exprs = |args: Vec<(Option<String>, Arg)>| -> Result<Vec<Expr>> {
            args.into_iter()
                .map(|(_, a)| match a {
                    Arg::Expr(e) => Ok(e),
                    Arg::List(_) => Err(parse_err(at, format!("'{name}' does not take a list"))),
                })
                .collect()
        };
        let arity = |got: usize, want: usize| -> Result<()> {
            if got == want {
                Ok(())
            } else {
                Err(parse_err(at, format!("'{name}' takes {want} argument(s), got {got}")))
            }
        };
        let constant = |e: &Expr, what: &str| -> Result<C64> {
            e.constant().ok_or_else(|| parse_err(at, format!("{what} of '{name}' must be a constant")))
        };
        let real = |c: C64, what: &str| -> Result<f64> {
            if c.im == 0.0 && c.re.is_finite() {
                Ok(c.re)
            } else {
                Err(parse_err(at, format!("{what} of '{name}' must be real")))
            }
        };
        match name {
            "const" => {
                let e = exprs(args)?;
                arity(e.len(), 1)?;
                Ok(Expr::Symbol(SymbolFunction::constant(constant(&e[0], "value")?)))
            }
            "bump" => {
                if args.len() != 3 {
                    arity(args.len(), 3)?;
                }
                let mut it = args.into_iter().map(|(_, a)| a);
                let center = match it.next().expect("arity checked") {
                    Arg::Expr(e) => vec![constant(&e, "center")?],
                    Arg::List(items) => items.iter().map(|e| constant(e, "center")).collect::<Result<_>>()?,
                };
                let rest: Vec<Expr> = it
                    .map(|a| match a {
                        Arg::Expr(e) => Ok(e),
                        Arg::List(_) => Err(parse_err(at, "only the bump center may be a list")),
                    })
                    .collect::<Result<_>>()?;
                let radius = real(constant(&rest[0], "radius")?, "radius")?;
                if !(radius > 0.0) {
                    return Err(parse_err(at, "bump radius must be positive"));
                }
                Ok(Expr::Symbol(SymbolFunction::bump(center, radius, constant(&rest[1], "height")?)))
            }
            "indicator" => {
                let e = exprs(args)?;
                arity(e.len(), 1)?;
                let radius = real(constant(&e[0], "radius")?, "radius")?;
                if !(radius > 0.0) {
                    return Err(parse_err(at, "indicator radius must be positive"));
                }
                Ok(Expr::Symbol(SymbolFunction::indicator_ball(radius)))
            }
            "radial" => {
                let e = exprs(args)?;
                arity(e.len(), 1)?;
                let env = radial_part(&e[0], at)?;
                let bound = radial_bound(&env, at)?;
                let label = format!("radial({})", self.source_of(at));
                Ok(Expr::Symbol(SymbolFunction::radial(label, bound, move |s| env.eval(&Point { z: &[], s }))))
            }
            "angular" => {
                let e = exprs(args)?;
                arity(e.len(), 2)?;
                let k = real(constant(&e[0], "winding")?, "winding")?;
                if k.fract() != 0.0 || k.abs() > 1e6 {
                    return Err(parse_err(at, "winding must be an integer"));
                }
                let env = radial_part(&e[1], at)?;
                let bound = radial_bound(&env, at)?;
                let label = format!("angular({})", self.source_of(at));
                Ok(Expr::Symbol(SymbolFunction::angular(label, k as i32, bound, move |s| {
                    env.eval(&Point { z: &[], s })
                })))
            }
            "sum" | "product" => {
                let e = exprs(args)?;
                if e.is_empty() {
                    return Err(parse_err(at, format!("'{name}' needs at least one argument")));
                }
                let op = if name == "sum" { BinOp::Add } else { BinOp::Mul };
                Ok(e.into_iter().reduce(|a, b| Expr::Bin(op, Box::new(a), Box::new(b))).expect("nonempty"))
            }
            _ => {
                let f = Func::lookup(name).ok_or_else(|| parse_err(at, format!("unknown function '{name}'")))?;
                let e = exprs(args)?;
                arity(e.len(), f.arity())?;
                Ok(Expr::Call(f, e))
            }
        }
    }

    /// Text of the argument list of the call whose name starts at `at`
    /// (the parser has just consumed its closing parenthesis).
    fn source_of(&self, at: usize) -> String {
        let start = self.toks.iter().position(|(p, _)| *p == at).expect("call token") + 2;
        let toks = &self.toks[start..self.pos - 1];
        toks.iter().map(|(_, t)| tok_text(t)).collect::<Vec<_>>().join("")
    }
}

fn tok_text(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("{v}"),
        Tok::Imag(v) => format!("{v}i"),
        Tok::Ident(s) => s.clone(),
        Tok::Punct(c) => c.to_string(),
    }
}

fn ident_value(name: &str) -> Option<Expr> {
    let indexed = |prefix: char| -> Option<usize> {
        let rest = name.strip_prefix(prefix)?;
        match rest.parse::<usize>() {
            Ok(k) if k >= 1 => Some(k - 1),
            _ => None,
        }
    };
    Some(match name {
        "i" => Expr::Num(C64::new(0.0, 1.0)),
        "pi" => Expr::Num(C64::new(PI, 0.0)),
        "e" => Expr::Num(C64::new(E, 0.0)),
        "z" => Expr::Var(Var::Z(0)),
        "x" => Expr::Var(Var::X(0)),
        "y" => Expr::Var(Var::Y(0)),
        "r" => Expr::Var(Var::R),
        "s" => Expr::Var(Var::S),
        _ => {
            if let Some(k) = indexed('z') {
                Expr::Var(Var::Z(k))
            } else if let Some(k) = indexed('x') {
                Expr::Var(Var::X(k))
            } else if let Some(k) = indexed('y') {
                Expr::Var(Var::Y(k))
            } else {
                return None;
            }
        }
    })
}

fn radial_part(e: &Expr, at: usize) -> Result<Arc<Expr>> {
    let mut ok = true;
    e.visit(&mut |x| {
        if matches!(x, Expr::Symbol(_)) || matches!(x, Expr::Var(v) if !v.is_radial()) {
            ok = false;
        }
    });
    if !ok {
        return Err(parse_err(at, "radial profiles may only use s and r"));
    }
    Ok(Arc::new(e.clone()))
}

/// Sample values of `|z|^2` used to bound radial profiles.
fn radial_abscissae() -> Vec<f64> {
    let mut s: Vec<f64> = (0..=4000).map(|k| k as f64 * 0.025).collect();
    s.extend((0..=240).map(|k| 10f64.powf(-6.0 + k as f64 * 0.075)));
    s
}

fn check_bounded(inner: f64, outer: f64, at: usize) -> Result<f64> {
    if !inner.is_finite() || !outer.is_finite() {
        return Err(parse_err(at, "symbol is not finite everywhere"));
    }
    if outer > 10.0 * inner.max(1.0) {
        return Err(parse_err(at, "symbol appears unbounded"));
    }
    Ok(BOUND_SLACK * inner.max(outer))
}

fn radial_bound(env: &Expr, at: usize) -> Result<f64> {
    let (mut inner, mut outer) = (0.0f64, 0.0f64);
    for s in radial_abscissae() {
        let v = env.eval(&Point { z: &[], s }).norm();
        if v.is_nan() {
            return Err(parse_err(at, format!("profile is undefined at s = {s}")));
        }
        if s <= 1e4 {
            inner = inner.max(v);
        } else {
            outer = outer.max(v);
        }
    }
    check_bounded(inner, outer, at)
}

fn free_bound(e: &Expr, n: usize, at: usize) -> Result<f64> {
    let dirs = sphere_directions(n, 64 * n);
    let (mut inner, mut outer) = (0.0f64, 0.0f64);
    for k in -8..=40 {
        let r = if k == -8 { 0.0 } else { 2f64.powf(k as f64 / 2.0) };
        for d in &dirs {
            let z: Vec<C64> = d.iter().map(|c| c * r).collect();
            let v = e.eval(&Point { z: &z, s: cplx::norm_sqr(&z) }).norm();
            if v.is_nan() {
                return Err(parse_err(at, format!("symbol is undefined at radius {r}")));
            }
            if r <= 100.0 {
                inner = inner.max(v);
            } else {
                outer = outer.max(v);
            }
        }
    }
    check_bounded(inner, outer, at)
}

fn structural_symbol(e: &Expr) -> SymbolFunction {
    match e {
        Expr::Num(c) => SymbolFunction::constant(*c),
        Expr::Symbol(f) => f.clone(),
        Expr::Neg(a) => structural_symbol(a).scaled(C64::new(-1.0, 0.0)),
        Expr::Bin(op, a, b) => {
            let fa = structural_symbol(a);
            match op {
                BinOp::Add => fa.sum(&structural_symbol(b)),
                BinOp::Sub => fa.sum(&structural_symbol(b).scaled(C64::new(-1.0, 0.0))),
                BinOp::Mul => match (a.constant(), b.constant()) {
                    (Some(c), _) => structural_symbol(b).scaled(c),
                    (_, Some(c)) => fa.scaled(c),
                    _ => fa.product(&structural_symbol(b)),
                },
                BinOp::Div => fa.scaled(1.0 / b.constant().expect("structural division by constant")),
                BinOp::Pow => unreachable!("powers are not structural"),
            }
        }
        Expr::Var(_) | Expr::Call(..) => unreachable!("not structural"),
    }
}

/// Parses `src` into a symbol on `C^n`. The returned symbol is labelled
/// with the trimmed source text.
pub fn parse_symbol(src: &str, n: usize) -> Result<SymbolFunction> {
    if n == 0 {
        return Err(FockError::InvalidParams("dimension must be positive".into()));
    }
    let src = src.trim();
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0, end: src.chars().count() };
    let expr = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(parse_err(p.here(), "trailing input"));
    }
    let mut max_index = 0;
    expr.visit(&mut |e| {
        if let Expr::Var(Var::Z(k) | Var::X(k) | Var::Y(k)) = e {
            max_index = max_index.max(*k + 1);
        }
    });
    if max_index > n {
        return Err(parse_err(0, format!("coordinate {max_index} used but n = {n}")));
    }
    if expr.is_structural() {
        return Ok(structural_symbol(&expr).with_label(src));
    }
    let bound = free_bound(&expr, n, 0)?;
    let tag = if expr.is_radial() { SymbolTag::Radial } else { SymbolTag::Generic };
    let expr = Arc::new(expr);
    Ok(SymbolFunction::new(src, bound, tag, move |z| expr.eval(&Point { z, s: cplx::norm_sqr(z) })))
}
