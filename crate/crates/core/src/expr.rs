//! Parser and evaluator for ring expressions.
//!
//! The grammar covers the plain element syntax (`2*A[1,0]*A[2,-1] - A'[2,1]`)
//! plus derived classes (`C+[i,j]`, `D0[i]`, `I-[r,i,j]`, ...), parentheses,
//! rational coefficients, powers `(x)^k`, and symbolic indices (`A[r,-j]`)
//! resolved from an environment.

use std::collections::HashMap;

use crate::algebra::{Element, Gen, Presentation};
use crate::error::{Error, Result};
use crate::presentations::{derived_class_element, DerivedClass};
use crate::scalar::Scalar;

/// Head of an indexed atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AtomKind {
    A,
    APrime,
    CPlus,
    CMinus,
    CZero,
    B,
    DPlus,
    DMinus,
    DZero,
    IPlus,
    IMinus,
    IZero,
}

impl AtomKind {
    fn arity(self) -> usize {
        match self {
            AtomKind::CZero | AtomKind::DZero => 1,
            AtomKind::IPlus | AtomKind::IMinus => 3,
            _ => 2,
        }
    }

    pub fn is_i(self) -> bool {
        matches!(self, AtomKind::IPlus | AtomKind::IMinus | AtomKind::IZero)
    }
}

/// An index: literal or optionally negated variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Idx {
    Lit(i64),
    Var { name: String, negated: bool },
}

impl Idx {
    fn resolve(&self, env: &HashMap<String, i64>, pos: usize) -> Result<i64> {
        match self {
            Idx::Lit(v) => Ok(*v),
            Idx::Var { name, negated } => {
                let v = *env
                    .get(name)
                    .ok_or_else(|| Error::Parse { pos, msg: format!("unbound index variable `{name}`") })?;
                Ok(if *negated { -v } else { v })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num { num: i64, den: i64 },
    Atom { kind: AtomKind, idx: Vec<Idx>, pos: usize },
    Sum(Vec<(bool, Expr)>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, Idx, usize),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(i64),
    Ident(String),
    Head(AtomKind),
    Sym(char),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let start = k;
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() {
            let mut v: i64 = 0;
            while k < chars.len() && chars[k].is_ascii_digit() {
                v = v
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(chars[k].to_digit(10).unwrap() as i64))
                    .ok_or(Error::Parse { pos: start, msg: "integer literal too large".into() })?;
                k += 1;
            }
            out.push((Tok::Num(v), start));
        } else if c.is_ascii_lowercase() {
            let mut s = String::new();
            while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                s.push(chars[k]);
                k += 1;
            }
            out.push((Tok::Ident(s), start));
        } else if c.is_ascii_uppercase() {
            k += 1;
            let next = chars.get(k).copied();
            let (kind, used) = match (c, next) {
                ('A', Some('\'')) => (AtomKind::APrime, true),
                ('A', _) => (AtomKind::A, false),
                ('B', _) => (AtomKind::B, false),
                ('C', Some('+')) => (AtomKind::CPlus, true),
                ('C', Some('-')) => (AtomKind::CMinus, true),
                ('C', Some('0')) => (AtomKind::CZero, true),
                ('D', Some('+')) => (AtomKind::DPlus, true),
                ('D', Some('-')) => (AtomKind::DMinus, true),
                ('D', Some('0')) => (AtomKind::DZero, true),
                ('I', Some('+')) => (AtomKind::IPlus, true),
                ('I', Some('-')) => (AtomKind::IMinus, true),
                ('I', Some('0')) => (AtomKind::IZero, true),
                _ => return Err(Error::Parse { pos: start, msg: format!("unknown generator name starting with `{c}`") }),
            };
            if used {
                k += 1;
            }
            out.push((Tok::Head(kind), start));
        } else if "+-*/()[],^".contains(c) {
            out.push((Tok::Sym(c), start));
            k += 1;
        } else {
            return Err(Error::Parse { pos: start, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.1)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = Vec::new();
        let mut neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        loop {
            terms.push((neg, self.term()?));
            if self.eat('+') {
                neg = false;
            } else if self.eat('-') {
                neg = true;
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 && !terms[0].0 { terms.pop().unwrap().1 } else { Expr::Sum(terms) })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut factors = vec![self.factor()?];
        while self.eat('*') {
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Expr::Product(factors) })
    }

    fn index(&mut self) -> Result<Idx> {
        let negated = self.eat('-');
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.at += 1;
                Ok(Idx::Lit(if negated { -v } else { v }))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                Ok(Idx::Var { name, negated })
            }
            _ => self.err("expected an index"),
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let pos = self.pos();
        let base = match self.peek().cloned() {
            Some(Tok::Num(num)) => {
                self.at += 1;
                let den = if self.eat('/') {
                    match self.peek().cloned() {
                        Some(Tok::Num(d)) if d != 0 => {
                            self.at += 1;
                            d
                        }
                        _ => return self.err("expected a nonzero denominator"),
                    }
                } else {
                    1
                };
                Expr::Num { num, den }
            }
            Some(Tok::Head(kind)) => {
                self.at += 1;
                self.expect('[')?;
                let mut idx = vec![self.index()?];
                while self.eat(',') {
                    idx.push(self.index()?);
                }
                self.expect(']')?;
                if idx.len() != kind.arity() {
                    return Err(Error::Parse {
                        pos,
                        msg: format!("expected {} indices, found {}", kind.arity(), idx.len()),
                    });
                }
                Expr::Atom { kind, idx, pos }
            }
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                inner
            }
            Some(Tok::Sym('-')) => {
                self.at += 1;
                let inner = self.factor()?;
                return Ok(Expr::Sum(vec![(true, inner)]));
            }
            _ => return self.err("expected a number, generator, or `(`"),
        };
        if self.eat('^') {
            let p = self.pos();
            let e = self.index()?;
            return Ok(Expr::Pow(Box::new(base), e, p));
        }
        Ok(base)
    }
}

/// Parses an expression; errors carry the character position.
pub fn parse(src: &str) -> Result<Expr> {
    let toks = lex(src)?;
    let end = src.chars().count();
    let mut p = Parser { toks, at: 0, end };
    if p.toks.is_empty() {
        return Err(Error::Parse { pos: 0, msg: "empty expression".into() });
    }
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

fn to_u32(v: i64, pos: usize) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::IndexOutOfRange(format!("index {v} at position {pos} must be nonnegative")))
}

fn to_i32(v: i64, pos: usize) -> Result<i32> {
    i32::try_from(v).map_err(|_| Error::IndexOutOfRange(format!("index {v} at position {pos} out of range")))
}

/// The derived class named by an atom with resolved indices, or `None` for `A`/`A'`.
pub fn atom_class(kind: AtomKind, v: &[i64], pos: usize) -> Result<Option<DerivedClass>> {
    let u = |k: usize| to_u32(v[k], pos);
    Ok(Some(match kind {
        AtomKind::A | AtomKind::APrime => return Ok(None),
        AtomKind::CPlus => DerivedClass::CPlus(u(0)?, u(1)?),
        AtomKind::CMinus => DerivedClass::CMinus(u(0)?, u(1)?),
        AtomKind::CZero => DerivedClass::CZero(u(0)?),
        AtomKind::B => DerivedClass::B(u(0)?, to_i32(v[1], pos)?),
        AtomKind::DPlus => DerivedClass::DPlus(u(0)?, u(1)?),
        AtomKind::DMinus => DerivedClass::DMinus(u(0)?, u(1)?),
        AtomKind::DZero => DerivedClass::DZero(u(0)?),
        AtomKind::IPlus => DerivedClass::IPlus(u(0)?, u(1)?, u(2)?),
        AtomKind::IMinus => DerivedClass::IMinus(u(0)?, u(1)?, u(2)?),
        AtomKind::IZero => DerivedClass::IZero(u(0)?, u(1)?),
    }))
}

/// Evaluates to a normal-form element.
pub fn eval(e: &Expr, p: &Presentation, env: &HashMap<String, i64>) -> Result<Element> {
    match e {
        Expr::Num { num, den } => {
            let s = Scalar::from_ratio(p.coeff(), *num, *den)?;
            Ok(p.one().scale(&s))
        }
        Expr::Atom { kind, idx, pos } => {
            let v = idx.iter().map(|i| i.resolve(env, *pos)).collect::<Result<Vec<_>>>()?;
            match (kind, atom_class(*kind, &v, *pos)?) {
                (AtomKind::A | AtomKind::APrime, _) => {
                    let want = if *kind == AtomKind::A { crate::algebra::Family::Orbit } else { crate::algebra::Family::Arnold };
                    if p.family() != want {
                        return Err(Error::InvalidParameter(format!(
                            "generator at position {pos} does not belong to the {:?} family",
                            p.family()
                        )));
                    }
                    let g = Gen::new(to_u32(v[0], *pos)?, to_i32(v[1], *pos)?);
                    p.generator(g.i, g.j)
                }
                (_, Some(c)) => derived_class_element(p, &c),
                (_, None) => unreachable!(),
            }
        }
        Expr::Sum(terms) => {
            let mut acc = p.zero();
            for (neg, t) in terms {
                let x = eval(t, p, env)?;
                acc = if *neg { acc.sub(&x) } else { acc.add(&x) };
            }
            Ok(acc)
        }
        Expr::Product(fs) => {
            let mut acc = p.one();
            for f in fs {
                let x = eval(f, p, env)?;
                acc = p.multiply(&acc, &x);
            }
            Ok(acc)
        }
        Expr::Pow(base, k, pos) => {
            let k = k.resolve(env, *pos)?;
            if k < 0 {
                return Err(Error::Parse { pos: *pos, msg: "negative exponent".into() });
            }
            let b = eval(base, p, env)?;
            let mut acc = p.one();
            for _ in 0..k {
                acc = p.multiply(&acc, &b);
            }
            Ok(acc)
        }
    }
}

/// Parses and evaluates an expression without index variables.
pub fn parse_element(p: &Presentation, src: &str) -> Result<Element> {
    eval(&parse(src)?, p, &HashMap::new())
}

/// An atom with resolved indices, used for formal (ring-free) expansion.
pub type FormalAtom = (AtomKind, Vec<i64>);

/// Expands into a formal integer combination of atom words, without using any ring relation.
pub fn expand_formal(e: &Expr, env: &HashMap<String, i64>) -> Result<Vec<(i64, Vec<FormalAtom>)>> {
    match e {
        Expr::Num { num, den } => {
            if *den != 1 {
                return Err(Error::InvalidParameter("formal expansion needs integer coefficients".into()));
            }
            Ok(vec![(*num, Vec::new())])
        }
        Expr::Atom { kind, idx, pos } => {
            let v = idx.iter().map(|i| i.resolve(env, *pos)).collect::<Result<Vec<_>>>()?;
            Ok(vec![(1, vec![(*kind, v)])])
        }
        Expr::Sum(terms) => {
            let mut out = Vec::new();
            for (neg, t) in terms {
                for (c, w) in expand_formal(t, env)? {
                    out.push((if *neg { -c } else { c }, w));
                }
            }
            Ok(out)
        }
        Expr::Product(fs) => {
            let mut acc = vec![(1i64, Vec::new())];
            for f in fs {
                let part = expand_formal(f, env)?;
                let mut next = Vec::new();
                for (c1, w1) in &acc {
                    for (c2, w2) in &part {
                        let mut w = w1.clone();
                        w.extend(w2.iter().cloned());
                        next.push((c1 * c2, w));
                    }
                }
                acc = next;
            }
            Ok(acc)
        }
        Expr::Pow(base, k, pos) => {
            let k = k.resolve(env, *pos)?;
            let part = expand_formal(base, env)?;
            match part.as_slice() {
                [(c, w)] if w.is_empty() => Ok(vec![(c.pow(k as u32), Vec::new())]),
                _ => Err(Error::InvalidParameter("formal powers only of constants".into())),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Coeff;

    fn ring(n: u32, m: u32) -> Presentation {
        Presentation::orbit(n, m, Coeff::Rational).unwrap()
    }

    #[test]
    fn parses_and_prints_round_trip() {
        let p = ring(3, 3);
        for s in ["1", "A[1,0]", "-A[2,-1]", "A[1,0]*A[2,1] - A[1,0]*A[2,0]", "1/2*A[1,0] + 3*A[2,0]*A[3,-2]", "0"] {
            let x = parse_element(&p, s).unwrap();
            let printed = x.to_string();
            assert_eq!(parse_element(&p, &printed).unwrap(), x, "{s} -> {printed}");
        }
    }

    #[test]
    fn eval_example() {
        let p = ring(3, 2);
        assert_eq!(parse_element(&p, "A[2,0]*A[2,1]").unwrap().to_string(), "A[1,0]*A[2,1] - A[1,0]*A[2,0]");
        assert_eq!(parse_element(&p, " A [ 2 , 0 ]*A[2,1] ").unwrap().to_string(), "A[1,0]*A[2,1] - A[1,0]*A[2,0]");
    }

    #[test]
    fn parse_error_position() {
        let p = ring(3, 2);
        match parse_element(&p, "A[1,0] + * A[2,0]") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 9),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_element(&p, "A[1,0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_element(&p, "Q[1]"), Err(Error::Parse { .. })));
        assert!(matches!(parse_element(&p, ""), Err(Error::Parse { .. })));
    }

    #[test]
    fn out_of_range_generator() {
        let p = ring(3, 2);
        assert!(matches!(parse_element(&p, "A[3,0]"), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(parse_element(&p, "A[2,2]"), Err(Error::IndexOutOfRange(_))));
        assert!(parse_element(&p, "A'[2,1]").is_err());
    }

    #[test]
    fn symbolic_indices() {
        let p = ring(4, 3);
        let env = HashMap::from([("r".to_string(), 3), ("i".to_string(), 2), ("n".to_string(), 4)]);
        let e = parse("(-1)^n*A[r,-i]").unwrap();
        assert_eq!(eval(&e, &p, &env).unwrap(), parse_element(&p, "A[3,-2]").unwrap());
    }

    #[test]
    fn formal_expansion_distributes() {
        let e = parse("(I0[4,2] - I+[4,3,1])*I-[5,2,1]").unwrap();
        let f = expand_formal(&e, &HashMap::new()).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[1].0, -1);
        assert_eq!(f[1].1.len(), 2);
    }
}
