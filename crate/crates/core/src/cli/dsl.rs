//! Group expressions:
//!
//! ```text
//! expr := atom ("*" atom)*
//! atom := "Zp" | "free(" INT ")" | "cyclic(" INT ")" | "direct(" expr "," expr ")"
//!       | "finite{" gens ";" words "}" | "pres{" gens ";" words "}" | "(" expr ")"
//! word := factor* ; factor := (NAME | "1" | "[" word "," word "]" | "(" word ")") ("^" INT)?
//! ```
//!
//! `pres{...}` is a raw presentation outside the catalog.

use serde::{Deserialize, Serialize};

use crate::ends::{Descriptor, ProPDescriptor};
use crate::error::{Error, Result};
use crate::fpgroup::{Presentation, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExprKind {
    Zp,
    Free(usize),
    Cyclic(u64),
    Direct(Box<GroupExpr>, Box<GroupExpr>),
    Finite {
        gens: Vec<String>,
        relators: Vec<Word>,
    },
    Pres {
        gens: Vec<String>,
        relators: Vec<Word>,
    },
    /// two or more factors
    Product(Vec<GroupExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupExpr {
    pub kind: ExprKind,
    pub span: Span,
}

fn syntax(msg: impl Into<String>, start: usize, end: usize) -> Error {
    Error::Syntax {
        msg: msg.into(),
        start,
        end,
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => Err(syntax(
                format!("expected '{c}', found '{x}'"),
                self.pos,
                self.pos + x.len_utf8(),
            )),
            None => Err(syntax(
                format!("expected '{c}', found end of input"),
                self.pos,
                self.pos,
            )),
        }
    }

    fn ident(&mut self) -> Option<(String, usize)> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let mut len = 0;
        for (i, c) in rest.char_indices() {
            let ok = if i == 0 {
                c.is_ascii_alphabetic() || c == '_'
            } else {
                c.is_ascii_alphanumeric() || c == '_'
            };
            if !ok {
                break;
            }
            len = i + c.len_utf8();
        }
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some((rest[..len].to_string(), start))
    }

    fn int(&mut self) -> Result<(i64, Span)> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let mut len = usize::from(rest.starts_with('-'));
        len += rest[len..].chars().take_while(|c| c.is_ascii_digit()).count();
        let text = &rest[..len];
        let span = Span {
            start,
            end: start + len,
        };
        let v = text.parse::<i64>().map_err(|_| {
            syntax(
                if text.is_empty() || text == "-" {
                    "expected an integer".into()
                } else {
                    format!("integer {text} out of range")
                },
                start,
                start + len.max(1),
            )
        })?;
        self.pos += len;
        Ok((v, span))
    }

    fn expr(&mut self) -> Result<GroupExpr> {
        let first = self.atom()?;
        let start = first.span.start;
        let mut parts = vec![first];
        while self.peek() == Some('*') {
            self.pos += 1;
            parts.push(self.atom()?);
        }
        if parts.len() == 1 {
            return Ok(parts.pop().unwrap());
        }
        let end = parts.last().unwrap().span.end;
        Ok(GroupExpr {
            kind: ExprKind::Product(parts),
            span: Span { start, end },
        })
    }

    fn atom(&mut self) -> Result<GroupExpr> {
        if self.peek() == Some('(') {
            let start = self.pos;
            self.pos += 1;
            let mut inner = self.expr()?;
            self.expect(')')?;
            inner.span = Span { start, end: self.pos };
            return Ok(inner);
        }
        let Some((name, start)) = self.ident() else {
            let c = self.peek();
            return Err(syntax(
                match c {
                    Some(c) => format!("unexpected '{c}'"),
                    None => "unexpected end of input".into(),
                },
                self.pos,
                self.pos + c.map_or(0, |c| c.len_utf8()),
            ));
        };
        let kind = match name.as_str() {
            "Zp" => ExprKind::Zp,
            "free" | "cyclic" => {
                self.expect('(')?;
                let (v, span) = self.int()?;
                self.expect(')')?;
                if v < 1 {
                    return Err(syntax(
                        format!("{name} needs a positive argument"),
                        span.start,
                        span.end,
                    ));
                }
                if name == "free" {
                    ExprKind::Free(v as usize)
                } else {
                    ExprKind::Cyclic(v as u64)
                }
            }
            "direct" => {
                self.expect('(')?;
                let a = self.expr()?;
                self.expect(',')?;
                let b = self.expr()?;
                self.expect(')')?;
                ExprKind::Direct(Box::new(a), Box::new(b))
            }
            "finite" | "pres" => {
                let (gens, relators) = self.presentation_body()?;
                if name == "finite" {
                    ExprKind::Finite { gens, relators }
                } else {
                    ExprKind::Pres { gens, relators }
                }
            }
            other => {
                return Err(syntax(
                    format!("unknown constructor '{other}'"),
                    start,
                    start + other.len(),
                ))
            }
        };
        Ok(GroupExpr {
            kind,
            span: Span { start, end: self.pos },
        })
    }

    fn presentation_body(&mut self) -> Result<(Vec<String>, Vec<Word>)> {
        self.expect('{')?;
        let mut gens: Vec<String> = Vec::new();
        loop {
            let Some((g, at)) = self.ident() else {
                return Err(syntax("expected a generator name", self.pos, self.pos + 1));
            };
            if gens.contains(&g) {
                return Err(syntax(format!("duplicate generator '{g}'"), at, at + g.len()));
            }
            gens.push(g);
            match self.peek() {
                Some(',') => self.pos += 1,
                _ => break,
            }
        }
        self.expect(';')?;
        let mut rels = Vec::new();
        if self.peek() != Some('}') {
            loop {
                rels.push(self.word(&gens)?);
                match self.peek() {
                    Some(',') => self.pos += 1,
                    _ => break,
                }
            }
        }
        self.expect('}')?;
        Ok((gens, rels))
    }

    fn word(&mut self, gens: &[String]) -> Result<Word> {
        let mut w = Word::empty();
        let mut any = false;
        loop {
            let f = match self.peek() {
                Some('[') => {
                    self.pos += 1;
                    let x = self.word(gens)?;
                    self.expect(',')?;
                    let y = self.word(gens)?;
                    self.expect(']')?;
                    Word::commutator(&x, &y)
                }
                Some('(') => {
                    self.pos += 1;
                    let x = self.word(gens)?;
                    self.expect(')')?;
                    x
                }
                Some('1') => {
                    self.pos += 1;
                    Word::empty()
                }
                Some('*') => {
                    self.pos += 1;
                    continue;
                }
                Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                    let (name, at) = self.ident().unwrap();
                    match gens.iter().position(|g| *g == name) {
                        Some(i) => Word::gen(i),
                        None => return Err(syntax(format!("unknown generator '{name}'"), at, at + name.len())),
                    }
                }
                _ => break,
            };
            let f = if self.peek() == Some('^') {
                self.pos += 1;
                f.pow(self.int()?.0)
            } else {
                f
            };
            w = w.mul(&f);
            any = true;
        }
        if !any {
            return Err(syntax("expected a word", self.pos, self.pos + 1));
        }
        Ok(w)
    }
}

pub fn parse_group_expr(text: &str) -> Result<GroupExpr> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(syntax("trailing input", p.pos, text.len()));
    }
    Ok(e)
}

/// Parse a comma-separated list of words over the given generator names.
pub fn parse_words(text: &str, gens: &[String]) -> Result<Vec<Word>> {
    let mut p = Parser { src: text, pos: 0 };
    let mut out = Vec::new();
    if p.peek().is_none() {
        return Ok(out);
    }
    loop {
        out.push(p.word(gens)?);
        match p.peek() {
            Some(',') => p.pos += 1,
            None => break,
            Some(c) => return Err(syntax(format!("unexpected '{c}'"), p.pos, p.pos + c.len_utf8())),
        }
    }
    Ok(out)
}

fn body(gens: &[String], relators: &[Word]) -> String {
    let rels: Vec<String> = relators.iter().map(|r| r.format(gens)).collect();
    format!("{{{}; {}}}", gens.join(", "), rels.join(", "))
}

impl GroupExpr {
    /// Canonical text; `parse(print(e))` prints identically.
    pub fn print(&self) -> String {
        match &self.kind {
            ExprKind::Zp => "Zp".into(),
            ExprKind::Free(r) => format!("free({r})"),
            ExprKind::Cyclic(n) => format!("cyclic({n})"),
            ExprKind::Direct(a, b) => format!("direct({}, {})", a.print(), b.print()),
            ExprKind::Finite { gens, relators } => format!("finite{}", body(gens, relators)),
            ExprKind::Pres { gens, relators } => format!("pres{}", body(gens, relators)),
            ExprKind::Product(parts) => {
                let ps: Vec<String> = parts
                    .iter()
                    .map(|e| match e.kind {
                        ExprKind::Product(_) => format!("({})", e.print()),
                        _ => e.print(),
                    })
                    .collect();
                ps.join(" * ")
            }
        }
    }

    /// Check values against `p` and build the descriptor tree.
    pub fn to_descriptor(&self, p: u32) -> Result<Descriptor> {
        let err = |msg: String| syntax(msg, self.span.start, self.span.end);
        Ok(match &self.kind {
            ExprKind::Zp => Descriptor::Zp,
            ExprKind::Free(r) => Descriptor::FreeProP(*r),
            ExprKind::Cyclic(n) => {
                let mut m = *n;
                while m > 1 && m % p as u64 == 0 {
                    m /= p as u64;
                }
                if *n < 2 || m != 1 {
                    return Err(err(format!("cyclic({n}) is not a nontrivial power of p = {p}")));
                }
                Descriptor::Cyclic(*n)
            }
            ExprKind::Direct(a, b) => {
                let da = a.to_descriptor(p)?;
                if !da.is_finite_node() {
                    return Err(syntax(
                        "first factor of direct(...) must be cyclic(...) or finite{...}",
                        a.span.start,
                        a.span.end,
                    ));
                }
                Descriptor::DirectProduct(Box::new(da), Box::new(b.to_descriptor(p)?))
            }
            ExprKind::Finite { gens, relators } => {
                Descriptor::Finite(Presentation::new(gens.clone(), relators.clone(), self.print()))
            }
            ExprKind::Pres { gens, relators } => {
                Descriptor::Presented(Presentation::new(gens.clone(), relators.clone(), self.print()))
            }
            ExprKind::Product(parts) => {
                Descriptor::FreeProduct(parts.iter().map(|e| e.to_descriptor(p)).collect::<Result<_>>()?)
            }
        })
    }

    pub fn to_pro_p(&self, p: u32) -> Result<ProPDescriptor> {
        ProPDescriptor::new(p, self.to_descriptor(p)?)
    }
}

/// `print(parse(text))`.
pub fn normalize(text: &str) -> Result<String> {
    Ok(parse_group_expr(text)?.print())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_examples() {
        assert_eq!(
            parse_group_expr("free(2)").unwrap().to_descriptor(2).unwrap(),
            Descriptor::FreeProP(2)
        );
        let e = parse_group_expr("cyclic(2) * cyclic(2)").unwrap();
        assert_eq!(
            e.to_descriptor(2).unwrap(),
            Descriptor::FreeProduct(vec![Descriptor::Cyclic(2), Descriptor::Cyclic(2)])
        );
        let e = parse_group_expr("direct(cyclic(3), free(2))").unwrap();
        let pres = e.to_pro_p(3).unwrap().compile().unwrap();
        assert_eq!((pres.n_gens(), pres.relators().len()), (3, 3));
    }

    #[test]
    fn words_and_commutators() {
        let e = parse_group_expr("finite{a,b; a^2, b^2, [a,b]}").unwrap();
        let ExprKind::Finite { relators, .. } = &e.kind else {
            panic!()
        };
        assert_eq!(relators[2], Word::new(&[1, 2, -1, -2]));
        let e = parse_group_expr("pres{x, y; x y x^-1 y^-1}").unwrap();
        let ExprKind::Pres { relators, .. } = &e.kind else {
            panic!()
        };
        assert_eq!(relators[0], Word::new(&[1, 2, -1, -2]));
        assert_eq!(
            parse_words("a^3, (a b)^2, 1", &["a".into(), "b".into()]).unwrap()[1],
            Word::new(&[1, 2, 1, 2])
        );
    }

    #[test]
    fn round_trip() {
        for s in [
            "Zp",
            "free(3) * (cyclic(4) * Zp) * cyclic(2)",
            "direct(finite{c; c^3}, free(2))",
            "finite{a, b; a^2, b^2, [a, b]}",
            "pres{a, b; [a,b]}",
            "finite{a; }",
        ] {
            let once = normalize(s).unwrap();
            assert_eq!(normalize(&once).unwrap(), once, "{s}");
        }
    }

    #[test]
    fn errors_carry_spans() {
        let err = parse_group_expr("free(2) * bogus(1)").unwrap_err();
        assert_eq!(
            err,
            Error::Syntax {
                msg: "unknown constructor 'bogus'".into(),
                start: 10,
                end: 15
            }
        );
        assert!(matches!(
            parse_group_expr("free(2"),
            Err(Error::Syntax { start: 6, .. })
        ));
        assert!(matches!(
            parse_group_expr("finite{a; b}"),
            Err(Error::Syntax { start: 10, end: 11, .. })
        ));
        assert!(matches!(parse_group_expr("free(0)"), Err(Error::Syntax { .. })));
        let e = parse_group_expr("Zp * cyclic(6)").unwrap();
        assert!(matches!(
            e.to_descriptor(2),
            Err(Error::Syntax { start: 5, end: 14, .. })
        ));
        assert!(matches!(
            parse_group_expr("direct(Zp, Zp)").unwrap().to_descriptor(2),
            Err(Error::Syntax { start: 7, end: 9, .. })
        ));
    }
}
