//! Recursive-descent parser for `.acpt` documents. Produces a positioned
//! syntax tree; name resolution happens afterwards in `resolve`.
//!
//! `+` (collect) binds looser than `x` (cross), so `a x b + c` reads as
//! `(a x b) + c`.

use super::lexer::{Tok, Token};
use super::{Diagnostic, DiagnosticKind, Pos};

#[derive(Debug, Clone)]
pub(crate) struct VarRef {
    pub name: String,
    pub attrs: Vec<(String, Option<String>, Pos)>,
    pub pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum OpKind {
    Collect,
    Cross,
}

#[derive(Debug, Clone)]
pub(crate) enum BraceAst {
    Atom {
        var: VarRef,
        state: String,
        state_pos: Pos,
    },
    Op {
        kind: OpKind,
        pos: Pos,
        lhs: Box<BraceAst>,
        rhs: Box<BraceAst>,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct ElementAst {
    pub name: String,
    pub name_pos: Pos,
    pub brace: BraceAst,
    pub arrow_pos: Pos,
    pub dist: String,
    pub dist_pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum NetKind {
    Network,
    Subnetwork,
    Factored,
}

#[derive(Debug, Clone)]
pub(crate) enum DeclAst {
    Variable {
        var: VarRef,
        states: Vec<(String, Pos)>,
    },
    Distribution {
        name: String,
        pos: Pos,
        target: VarRef,
        weights: Vec<(String, Pos, f64)>,
    },
    Network {
        kind: NetKind,
        name: String,
        pos: Pos,
        dependent: VarRef,
        parents: Vec<VarRef>,
        context: Option<BraceAst>,
        elements: Vec<ElementAst>,
    },
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

type PResult<T> = Result<T, Diagnostic>;

pub(crate) fn parse_decls(tokens: Vec<Token>) -> PResult<Vec<DeclAst>> {
    let mut p = Parser { tokens, at: 0 };
    let mut decls = Vec::new();
    while p.peek().tok != Tok::Eof {
        decls.push(p.decl()?);
    }
    Ok(decls)
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if t.tok != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> Diagnostic {
        let t = self.peek();
        Diagnostic {
            kind: DiagnosticKind::Syntax,
            pos: t.pos,
            message: format!("unexpected {}", t.tok.describe()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<Pos> {
        if self.peek().tok == tok {
            Ok(self.bump().pos)
        } else {
            Err(self.error(&[what]))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Pos)> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((s, self.bump().pos))
            }
            _ => Err(self.error(&[what])),
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<Pos> {
        match &self.peek().tok {
            Tok::Ident(s) if s == kw => Ok(self.bump().pos),
            _ => Err(self.error(&[&format!("`{kw}`")])),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn decl(&mut self) -> PResult<DeclAst> {
        const DECLS: &[&str] = &[
            "`variable`",
            "`distribution`",
            "`network`",
            "`subnetwork`",
            "`factored`",
        ];
        let kw = match &self.peek().tok {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.error(DECLS)),
        };
        match kw.as_str() {
            "variable" => self.variable(),
            "distribution" => self.distribution(),
            "network" => self.network(NetKind::Network),
            "subnetwork" => self.network(NetKind::Subnetwork),
            "factored" => self.network(NetKind::Factored),
            _ => Err(self.error(DECLS)),
        }
    }

    fn var_ref(&mut self) -> PResult<VarRef> {
        let (name, pos) = self.ident("variable name")?;
        let mut attrs = Vec::new();
        if self.peek().tok == Tok::LParen {
            self.bump();
            loop {
                let (attr, apos) = self.ident("attribute name")?;
                self.expect(Tok::Eq, "`=`")?;
                let value = match &self.peek().tok {
                    Tok::Question => {
                        self.bump();
                        None
                    }
                    Tok::Ident(v) => {
                        let v = v.clone();
                        self.bump();
                        Some(v)
                    }
                    _ => return Err(self.error(&["attribute value", "`?`"])),
                };
                attrs.push((attr, value, apos));
                match self.peek().tok {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => {
                        self.bump();
                        break;
                    }
                    _ => return Err(self.error(&["`,`", "`)`"])),
                }
            }
        }
        Ok(VarRef { name, attrs, pos })
    }

    fn variable(&mut self) -> PResult<DeclAst> {
        self.keyword("variable")?;
        let var = self.var_ref()?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut states = vec![self.ident("state name")?];
        while self.peek().tok == Tok::Comma {
            self.bump();
            states.push(self.ident("state name")?);
        }
        self.expect(Tok::RBrace, "`}`")?;
        Ok(DeclAst::Variable { var, states })
    }

    fn distribution(&mut self) -> PResult<DeclAst> {
        self.keyword("distribution")?;
        let (name, pos) = self.ident("distribution name")?;
        self.keyword("for")?;
        let target = self.var_ref()?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut weights = Vec::new();
        loop {
            let (state, spos) = self.ident("state name")?;
            self.expect(Tok::Colon, "`:`")?;
            let w = match self.peek().tok {
                Tok::Number(n) => {
                    self.bump();
                    n
                }
                _ => return Err(self.error(&["number"])),
            };
            weights.push((state, spos, w));
            match self.peek().tok {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RBrace => {
                    self.bump();
                    break;
                }
                _ => return Err(self.error(&["`,`", "`}`"])),
            }
        }
        Ok(DeclAst::Distribution {
            name,
            pos,
            target,
            weights,
        })
    }

    fn network(&mut self, kind: NetKind) -> PResult<DeclAst> {
        self.bump();
        let (name, pos) = self.ident("name")?;
        self.keyword("for")?;
        let dependent = self.var_ref()?;
        self.keyword("given")?;
        let mut parents = vec![self.var_ref()?];
        while self.peek().tok == Tok::Comma {
            self.bump();
            parents.push(self.var_ref()?);
        }
        let context = if kind != NetKind::Factored && self.at_keyword("context") {
            self.bump();
            Some(self.brace()?)
        } else {
            None
        };
        self.expect(Tok::LBrace, "`{`")?;
        let mut elements = Vec::new();
        while self.peek().tok != Tok::RBrace {
            if !self.at_keyword("element") {
                return Err(self.error(&["`element`", "`}`"]));
            }
            elements.push(self.element()?);
        }
        self.bump();
        Ok(DeclAst::Network {
            kind,
            name,
            pos,
            dependent,
            parents,
            context,
            elements,
        })
    }

    fn element(&mut self) -> PResult<ElementAst> {
        self.keyword("element")?;
        let (name, name_pos) = self.ident("element name")?;
        self.expect(Tok::Eq, "`=`")?;
        let brace = self.brace()?;
        let arrow_pos = self.expect(Tok::Arrow, "`->`")?;
        let (dist, dist_pos) = self.ident("distribution name")?;
        Ok(ElementAst {
            name,
            name_pos,
            brace,
            arrow_pos,
            dist,
            dist_pos,
        })
    }

    fn brace(&mut self) -> PResult<BraceAst> {
        let mut lhs = self.term()?;
        while self.peek().tok == Tok::Plus {
            let pos = self.bump().pos;
            let rhs = self.term()?;
            lhs = BraceAst::Op {
                kind: OpKind::Collect,
                pos,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn at_cross(&self) -> bool {
        match &self.peek().tok {
            Tok::Times => true,
            Tok::Ident(s) => s == "x",
            _ => false,
        }
    }

    fn term(&mut self) -> PResult<BraceAst> {
        let mut lhs = self.factor()?;
        while self.at_cross() {
            let pos = self.bump().pos;
            let rhs = self.factor()?;
            lhs = BraceAst::Op {
                kind: OpKind::Cross,
                pos,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> PResult<BraceAst> {
        match self.peek().tok {
            Tok::LParen => {
                self.bump();
                let inner = self.brace()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(_) => {
                let var = self.var_ref()?;
                self.expect(Tok::Eq, "`=`")?;
                let (state, state_pos) = self.ident("state name")?;
                Ok(BraceAst::Atom {
                    var,
                    state,
                    state_pos,
                })
            }
            _ => Err(self.error(&["`(`", "variable name"])),
        }
    }
}
