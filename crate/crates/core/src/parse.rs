//! Formula parser.
//!
//! The concrete grammar (also documented in the repository README):
//!
//! ```text
//! term    := quant | lam | iff
//! quant   := ('!' | '?' | '!A' | '?A') '[' binders ']' ':' term
//! lam     := '^' '[' binders ']' ':' term
//! binders := UVAR ':' ty (',' UVAR ':' ty)*
//! iff     := impl ('<=>' impl)*
//! impl    := disj ('=>' impl)?            % right-associative
//! disj    := conj ('|' conj)*
//! conj    := eqt ('&' eqt)*
//! eqt     := unary ('=' unary)?
//! unary   := '~' unary | 'box' unary | 'dia' unary | app
//! app     := prim ('@' prim)*
//! prim    := '(' term ')' | '$true' | '$false' | IDENT | UVAR
//! ty      := tyatom ('>' ty)? ; tyatom := IDENT | '(' ty ')'
//! ```
//!
//! Comments run from `%` to end of line. Constants start lowercase, bound
//! variables uppercase. The connectives are overloaded by operand type: at
//! `o` they are the classical ones, at `w > o` the modal-surface ones.
//! Equality requires both operands at the same type other than `o` and
//! yields `o`. `!A`/`?A` are the actualist quantifiers; they bind `e`-typed
//! variables and require a body of type `w > o`.

use crate::signature::Signature;
use crate::term::{logical, Term};
use crate::ty::Ty;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl std::fmt::Display for Span {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{span}: lexical error: {msg}")]
    Lexical { span: Span, msg: String },
    #[error("{span}: syntax error: {msg}")]
    Syntax { span: Span, msg: String },
    #[error("{span}: unknown constant `{name}`")]
    UnknownConstant { span: Span, name: String },
    #[error("{span}: unbound variable `{name}`")]
    UnboundVariable { span: Span, name: String },
    #[error("{span}: type mismatch: {msg}")]
    TypeMismatch { span: Span, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    UVar(String),
    True,
    False,
    Excl,
    Quest,
    ExclA,
    QuestA,
    Caret,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Colon,
    Comma,
    At,
    Tilde,
    Amp,
    Pipe,
    Arrow,   // =>
    DArrow,  // <=>
    Equals,  // =
    TyArrow, // >
    KwBox,
    KwDia,
    Eof,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Tok::Ident(s) | Tok::UVar(s) => return write!(f, "`{s}`"),
            Tok::True => "$true",
            Tok::False => "$false",
            Tok::Excl => "!",
            Tok::Quest => "?",
            Tok::ExclA => "!A",
            Tok::QuestA => "?A",
            Tok::Caret => "^",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Colon => ":",
            Tok::Comma => ",",
            Tok::At => "@",
            Tok::Tilde => "~",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            Tok::Arrow => "=>",
            Tok::DArrow => "<=>",
            Tok::Equals => "=",
            Tok::TyArrow => ">",
            Tok::KwBox => "box",
            Tok::KwDia => "dia",
            Tok::Eof => "end of input",
        };
        write!(f, "`{s}`")
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span(&self) -> Span {
        Span {
            line: self.line,
            col: self.col,
        }
    }

    fn lex(mut self) -> Result<Vec<(Tok, Span)>, ParseError> {
        let mut out = Vec::new();
        loop {
            // skip whitespace and % comments
            loop {
                match self.chars.peek() {
                    Some(c) if c.is_whitespace() => {
                        self.bump();
                    }
                    Some('%') => {
                        while let Some(c) = self.bump() {
                            if c == '\n' {
                                break;
                            }
                        }
                    }
                    _ => break,
                }
            }
            let span = self.span();
            let Some(c) = self.bump() else {
                out.push((Tok::Eof, span));
                return Ok(out);
            };
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                ':' => Tok::Colon,
                ',' => Tok::Comma,
                '@' => Tok::At,
                '~' => Tok::Tilde,
                '&' => Tok::Amp,
                '|' => Tok::Pipe,
                '^' => Tok::Caret,
                '>' => Tok::TyArrow,
                '=' => {
                    if self.chars.peek() == Some(&'>') {
                        self.bump();
                        Tok::Arrow
                    } else {
                        Tok::Equals
                    }
                }
                '<' => {
                    if self.bump() == Some('=') && self.bump() == Some('>') {
                        Tok::DArrow
                    } else {
                        return Err(ParseError::Lexical {
                            span,
                            msg: "expected `<=>`".into(),
                        });
                    }
                }
                '!' | '?' => {
                    let actual = if self.chars.peek() == Some(&'A') {
                        // consume only when `A` is the whole suffix
                        let mut clone = self.chars.clone();
                        clone.next();
                        let next_is_ident = clone
                            .peek()
                            .map(|c| c.is_alphanumeric() || *c == '_')
                            .unwrap_or(false);
                        if !next_is_ident {
                            self.bump();
                            true
                        } else {
                            false
                        }
                    } else {
                        false
                    };
                    match (c, actual) {
                        ('!', false) => Tok::Excl,
                        ('!', true) => Tok::ExclA,
                        ('?', false) => Tok::Quest,
                        (_, true) => Tok::QuestA,
                        _ => unreachable!(),
                    }
                }
                '$' => {
                    let word = self.take_word(None);
                    match word.as_str() {
                        "true" => Tok::True,
                        "false" => Tok::False,
                        other => {
                            return Err(ParseError::Lexical {
                                span,
                                msg: format!("unknown builtin `${other}`"),
                            })
                        }
                    }
                }
                c if c.is_ascii_lowercase() => {
                    let word = self.take_word(Some(c));
                    match word.as_str() {
                        "box" => Tok::KwBox,
                        "dia" => Tok::KwDia,
                        _ => Tok::Ident(word),
                    }
                }
                c if c.is_ascii_uppercase() => Tok::UVar(self.take_word(Some(c))),
                other => {
                    return Err(ParseError::Lexical {
                        span,
                        msg: format!("unexpected character `{other}`"),
                    })
                }
            };
            out.push((tok, span));
        }
    }

    fn take_word(&mut self, first: Option<char>) -> String {
        let mut s = String::new();
        if let Some(c) = first {
            s.push(c);
        }
        while let Some(c) = self.chars.peek() {
            if c.is_alphanumeric() || *c == '_' {
                s.push(*c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }
}

pub struct Parser<'a> {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    sig: &'a Signature,
    binders: Vec<(String, Ty)>,
}

/// Parses a single formula against the signature. Bound variables are
/// uppercase, constants resolve through the signature (which includes the
/// ambient embedding constants).
pub fn parse(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    let toks = Lexer::new(text).lex()?;
    let mut p = Parser {
        toks,
        pos: 0,
        sig,
        binders: Vec::new(),
    };
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

/// Parses a type expression such as `e > w > o`.
pub fn parse_ty(text: &str, sig: &Signature) -> Result<Ty, ParseError> {
    let toks = Lexer::new(text).lex()?;
    let mut p = Parser {
        toks,
        pos: 0,
        sig,
        binders: Vec::new(),
    };
    let t = p.ty()?;
    p.expect_eof()?;
    Ok(t)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(ParseError::Syntax {
                span: self.span(),
                msg: format!("expected {want}, found {}", self.peek()),
            })
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(ParseError::Syntax {
                span: self.span(),
                msg: format!("unexpected {} after formula", self.peek()),
            })
        }
    }

    fn ty(&mut self) -> Result<Ty, ParseError> {
        let atom = self.ty_atom()?;
        if *self.peek() == Tok::TyArrow {
            self.bump();
            let rest = self.ty()?;
            Ok(Ty::fun(atom, rest))
        } else {
            Ok(atom)
        }
    }

    fn ty_atom(&mut self) -> Result<Ty, ParseError> {
        let span = self.span();
        match self.bump() {
            Tok::LParen => {
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(name) => {
                if self.sig.has_base(&name) {
                    Ok(Ty::Base(name))
                } else {
                    Err(ParseError::Syntax {
                        span,
                        msg: format!("unknown base type `{name}`"),
                    })
                }
            }
            other => Err(ParseError::Syntax {
                span,
                msg: format!("expected a type, found {other}"),
            }),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Tok::Excl | Tok::Quest | Tok::ExclA | Tok::QuestA => self.quant(),
            Tok::Caret => self.lambda(),
            _ => self.iff(),
        }
    }

    fn binder_list(&mut self) -> Result<Vec<(String, Ty)>, ParseError> {
        self.expect(Tok::LBrack)?;
        let mut out = Vec::new();
        loop {
            let span = self.span();
            let name = match self.bump() {
                Tok::UVar(n) => n,
                other => {
                    return Err(ParseError::Syntax {
                        span,
                        msg: format!("expected an uppercase variable, found {other}"),
                    })
                }
            };
            self.expect(Tok::Colon)?;
            let ty = self.ty()?;
            out.push((name, ty));
            match self.bump() {
                Tok::Comma => continue,
                Tok::RBrack => break,
                other => {
                    return Err(ParseError::Syntax {
                        span,
                        msg: format!("expected `,` or `]`, found {other}"),
                    })
                }
            }
        }
        Ok(out)
    }

    fn quant(&mut self) -> Result<Term, ParseError> {
        let span = self.span();
        let kind = self.bump();
        let binders = self.binder_list()?;
        self.expect(Tok::Colon)?;
        let depth_before = self.binders.len();
        for b in &binders {
            self.binders.push(b.clone());
        }
        let body = self.term()?;
        let body_ty = self.ty_of(&body, span)?;
        self.binders.truncate(depth_before);

        let actualist = matches!(kind, Tok::ExclA | Tok::QuestA);
        let universal = matches!(kind, Tok::Excl | Tok::ExclA);

        if actualist {
            if !body_ty.is_wo() {
                return Err(ParseError::TypeMismatch {
                    span,
                    msg: format!("actualist quantifier needs a `w > o` body, got `{body_ty}`"),
                });
            }
            for (name, ty) in &binders {
                if *ty != Ty::e() {
                    return Err(ParseError::TypeMismatch {
                        span,
                        msg: format!(
                            "actualist quantifier binds individuals; `{name}` has type `{ty}`"
                        ),
                    });
                }
            }
        } else if !body_ty.is_o() && !body_ty.is_wo() {
            return Err(ParseError::TypeMismatch {
                span,
                msg: format!("quantifier body must have type `o` or `w > o`, got `{body_ty}`"),
            });
        }

        let mut t = body;
        for (name, ty) in binders.into_iter().rev() {
            t = match (actualist, universal, body_ty.is_o()) {
                (true, true, _) => Term::m_forall_actual(name, t),
                (true, false, _) => Term::m_exists_actual(name, t),
                (false, true, true) => Term::forall(name, ty, t),
                (false, false, true) => Term::exists(name, ty, t),
                (false, true, false) => Term::m_forall(name, ty, t),
                (false, false, false) => Term::m_exists(name, ty, t),
            };
        }
        Ok(t)
    }

    fn lambda(&mut self) -> Result<Term, ParseError> {
        self.bump(); // ^
        let binders = self.binder_list()?;
        self.expect(Tok::Colon)?;
        let depth_before = self.binders.len();
        for b in &binders {
            self.binders.push(b.clone());
        }
        let body = self.term()?;
        self.binders.truncate(depth_before);
        let mut t = body;
        for (name, ty) in binders.into_iter().rev() {
            t = Term::lam(name, ty, t);
        }
        Ok(t)
    }

    fn iff(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::DArrow {
            let span = self.span();
            self.bump();
            let rhs = self.implication()?;
            lhs = self.binop(logical::IFF, logical::MIFF, lhs, rhs, span)?;
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Term, ParseError> {
        let lhs = self.disj()?;
        if *self.peek() == Tok::Arrow {
            let span = self.span();
            self.bump();
            let rhs = self.implication()?; // right-associative
            return self.binop(logical::IMPLIES, logical::MIMPLIES, lhs, rhs, span);
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.conj()?;
        while *self.peek() == Tok::Pipe {
            let span = self.span();
            self.bump();
            let rhs = self.conj()?;
            lhs = self.binop(logical::OR, logical::MOR, lhs, rhs, span)?;
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.eq_term()?;
        while *self.peek() == Tok::Amp {
            let span = self.span();
            self.bump();
            let rhs = self.eq_term()?;
            lhs = self.binop(logical::AND, logical::MAND, lhs, rhs, span)?;
        }
        Ok(lhs)
    }

    fn eq_term(&mut self) -> Result<Term, ParseError> {
        let lhs = self.unary()?;
        if *self.peek() == Tok::Equals {
            let span = self.span();
            self.bump();
            let rhs = self.unary()?;
            let lt = self.ty_of(&lhs, span)?;
            let rt = self.ty_of(&rhs, span)?;
            if lt != rt {
                return Err(ParseError::TypeMismatch {
                    span,
                    msg: format!("equality between `{lt}` and `{rt}`"),
                });
            }
            if lt.is_o() {
                return Err(ParseError::TypeMismatch {
                    span,
                    msg: "use `<=>` to relate formulas of type `o`".into(),
                });
            }
            return Ok(Term::equality(&lt, lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Term, ParseError> {
        let span = self.span();
        match self.peek() {
            Tok::Tilde => {
                self.bump();
                let t = self.unary()?;
                let ty = self.ty_of(&t, span)?;
                if ty.is_o() {
                    Ok(Term::neg(t))
                } else if ty.is_wo() {
                    Ok(Term::m_neg(t))
                } else {
                    Err(ParseError::TypeMismatch {
                        span,
                        msg: format!("`~` needs `o` or `w > o`, got `{ty}`"),
                    })
                }
            }
            Tok::KwBox | Tok::KwDia => {
                let is_box = *self.peek() == Tok::KwBox;
                self.bump();
                let t = self.unary()?;
                let ty = self.ty_of(&t, span)?;
                if !ty.is_wo() {
                    return Err(ParseError::TypeMismatch {
                        span,
                        msg: format!(
                            "`{}` needs an operand of type `w > o`, got `{ty}`",
                            if is_box { "box" } else { "dia" }
                        ),
                    });
                }
                Ok(if is_box { Term::boxed(t) } else { Term::dia(t) })
            }
            _ => self.application(),
        }
    }

    fn application(&mut self) -> Result<Term, ParseError> {
        let mut t = self.primary()?;
        while *self.peek() == Tok::At {
            let span = self.span();
            self.bump();
            let arg = self.primary()?;
            let fty = self.ty_of(&t, span)?;
            let aty = self.ty_of(&arg, span)?;
            match fty {
                Ty::Fun(d, _) if *d == aty => {}
                Ty::Fun(d, _) => {
                    return Err(ParseError::TypeMismatch {
                        span,
                        msg: format!("expected argument of type `{d}`, got `{aty}`"),
                    })
                }
                other => {
                    return Err(ParseError::TypeMismatch {
                        span,
                        msg: format!("cannot apply a term of type `{other}`"),
                    })
                }
            }
            t = Term::app(t, arg);
        }
        Ok(t)
    }

    fn primary(&mut self) -> Result<Term, ParseError> {
        let span = self.span();
        match self.bump() {
            Tok::LParen => {
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::True => Ok(Term::truth()),
            Tok::False => Ok(Term::falsity()),
            Tok::UVar(name) => {
                // innermost binder wins
                for (i, (n, _)) in self.binders.iter().rev().enumerate() {
                    if *n == name {
                        return Ok(Term::bvar(i));
                    }
                }
                Err(ParseError::UnboundVariable { span, name })
            }
            Tok::Ident(name) => match self.sig.lookup(&name) {
                Some(ty) => Ok(Term::cnst(name, ty.clone())),
                None => Err(ParseError::UnknownConstant { span, name }),
            },
            other => Err(ParseError::Syntax {
                span,
                msg: format!("expected a formula, found {other}"),
            }),
        }
    }

    fn binop(
        &self,
        o_name: &str,
        m_name: &str,
        lhs: Term,
        rhs: Term,
        span: Span,
    ) -> Result<Term, ParseError> {
        let lt = self.ty_of(&lhs, span)?;
        let rt = self.ty_of(&rhs, span)?;
        if lt.is_o() && rt.is_o() {
            let ty = Ty::fun(Ty::o(), Ty::fun(Ty::o(), Ty::o()));
            Ok(Term::app2(Term::cnst(o_name, ty), lhs, rhs))
        } else if lt.is_wo() && rt.is_wo() {
            let ty = Ty::fun(Ty::wo(), Ty::fun(Ty::wo(), Ty::wo()));
            Ok(Term::app2(Term::cnst(m_name, ty), lhs, rhs))
        } else {
            Err(ParseError::TypeMismatch {
                span,
                msg: format!(
                    "connective operands must both be `o` or both `w > o`; got `{lt}` and `{rt}`"
                ),
            })
        }
    }

    fn ty_of(&self, t: &Term, span: Span) -> Result<Ty, ParseError> {
        // the parser builds terms under `self.binders`, so open indices refer
        // to that stack
        let mut ctx: Vec<Ty> = self.binders.iter().map(|(_, t)| t.clone()).collect();
        ty_in_ctx(t, &mut ctx).map_err(|e| ParseError::TypeMismatch {
            span,
            msg: e.to_string(),
        })
    }
}

fn ty_in_ctx(t: &Term, ctx: &mut Vec<Ty>) -> Result<Ty, crate::term::TypeError> {
    match t {
        Term::BVar(i) => {
            if *i < ctx.len() {
                Ok(ctx[ctx.len() - 1 - i].clone())
            } else {
                Err(crate::term::TypeError::UnboundVar(*i))
            }
        }
        Term::Const(_, ty) => Ok(ty.clone()),
        Term::Lam { ty, body, .. } => {
            ctx.push(ty.clone());
            let b = ty_in_ctx(body, ctx)?;
            ctx.pop();
            Ok(Ty::fun(ty.clone(), b))
        }
        Term::App(f, a) => {
            let fty = ty_in_ctx(f, ctx)?;
            let aty = ty_in_ctx(a, ctx)?;
            match fty {
                Ty::Fun(d, c) if *d == aty => Ok(*c),
                Ty::Fun(d, _) => Err(crate::term::TypeError::ArgMismatch {
                    expected: *d,
                    got: aty,
                }),
                other => Err(crate::term::TypeError::NotAFunction(other)),
            }
        }
    }
}
