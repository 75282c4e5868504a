//! Hand-rolled lexer and recursive-descent parser for template files.

use std::collections::BTreeSet;

use super::{SeedPolicy, Segment, Template, TemplateError, TemplateSet};
use crate::event::StructuredEvent;

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    Ident(String),
    /// String literal content plus the source column of each content char,
    /// so errors inside patterns can point at the offending slot.
    Str {
        text: String,
        char_cols: Vec<usize>,
    },
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Colon,
    Comma,
    Semi,
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Token {
    kind: TokenKind,
    line: usize,
    col: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(source: &'a str) -> Self {
        Self {
            chars: source.chars().peekable(),
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

    fn error(&self, line: usize, col: usize, message: impl Into<String>) -> TemplateError {
        TemplateError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    fn next_token(&mut self) -> Result<Token, TemplateError> {
        loop {
            let line = self.line;
            let col = self.col;
            let c = match self.chars.peek().copied() {
                None => {
                    return Ok(Token {
                        kind: TokenKind::Eof,
                        line,
                        col,
                    })
                }
                Some(c) => c,
            };
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            if c == '#' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
                continue;
            }
            let kind = match c {
                '{' => {
                    self.bump();
                    TokenKind::LBrace
                }
                '}' => {
                    self.bump();
                    TokenKind::RBrace
                }
                '[' => {
                    self.bump();
                    TokenKind::LBracket
                }
                ']' => {
                    self.bump();
                    TokenKind::RBracket
                }
                ':' => {
                    self.bump();
                    TokenKind::Colon
                }
                ',' => {
                    self.bump();
                    TokenKind::Comma
                }
                ';' => {
                    self.bump();
                    TokenKind::Semi
                }
                '"' => {
                    self.bump();
                    let mut text = String::new();
                    let mut char_cols = Vec::new();
                    loop {
                        let c_col = self.col;
                        match self.bump() {
                            None => {
                                return Err(self.error(line, col, "unterminated string literal"))
                            }
                            Some('\n') => {
                                return Err(self.error(
                                    line,
                                    col,
                                    "string literal runs past end of line",
                                ))
                            }
                            Some('"') => break,
                            Some('\\') => {
                                let escaped = self.bump().ok_or_else(|| {
                                    self.error(line, col, "unterminated string literal")
                                })?;
                                match escaped {
                                    '"' | '\\' => {
                                        text.push(escaped);
                                        char_cols.push(c_col);
                                    }
                                    other => {
                                        return Err(self.error(
                                            self.line,
                                            self.col - 1,
                                            format!("unsupported escape `\\{other}`"),
                                        ))
                                    }
                                }
                            }
                            Some(other) => {
                                text.push(other);
                                char_cols.push(c_col);
                            }
                        }
                    }
                    TokenKind::Str { text, char_cols }
                }
                c if c.is_alphanumeric() || c == '_' => {
                    let mut ident = String::new();
                    while let Some(&c) = self.chars.peek() {
                        if c.is_alphanumeric() || c == '_' {
                            ident.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    TokenKind::Ident(ident)
                }
                other => {
                    return Err(self.error(line, col, format!("unexpected character `{other}`")))
                }
            };
            return Ok(Token { kind, line, col });
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    lookahead: Option<Token>,
}

impl<'a> Parser<'a> {
    fn new(source: &'a str) -> Self {
        Self {
            lexer: Lexer::new(source),
            lookahead: None,
        }
    }

    fn peek(&mut self) -> Result<&Token, TemplateError> {
        if self.lookahead.is_none() {
            self.lookahead = Some(self.lexer.next_token()?);
        }
        Ok(self.lookahead.as_ref().unwrap())
    }

    fn next(&mut self) -> Result<Token, TemplateError> {
        match self.lookahead.take() {
            Some(token) => Ok(token),
            None => self.lexer.next_token(),
        }
    }

    fn syntax(token: &Token, message: impl Into<String>) -> TemplateError {
        TemplateError::Syntax {
            line: token.line,
            col: token.col,
            message: message.into(),
        }
    }

    fn expect_ident(&mut self, expected: &str) -> Result<Token, TemplateError> {
        let token = self.next()?;
        match &token.kind {
            TokenKind::Ident(name) if name == expected => Ok(token),
            _ => Err(Self::syntax(&token, format!("expected `{expected}`"))),
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<Token, TemplateError> {
        let token = self.next()?;
        if token.kind == kind {
            Ok(token)
        } else {
            Err(Self::syntax(&token, format!("expected {what}")))
        }
    }

    fn any_ident(&mut self) -> Result<(String, Token), TemplateError> {
        let token = self.next()?;
        match token.kind.clone() {
            TokenKind::Ident(name) => Ok((name, token)),
            _ => Err(Self::syntax(&token, "expected an identifier")),
        }
    }

    fn string(&mut self) -> Result<(String, Vec<usize>, Token), TemplateError> {
        let token = self.next()?;
        match token.kind.clone() {
            TokenKind::Str { text, char_cols } => Ok((text, char_cols, token)),
            _ => Err(Self::syntax(&token, "expected a string literal")),
        }
    }

    /// Eat an optional `;` separator.
    fn skip_semi(&mut self) -> Result<(), TemplateError> {
        if self.peek()?.kind == TokenKind::Semi {
            self.next()?;
        }
        Ok(())
    }
}

fn first_slot(segments: &[Segment]) -> Option<String> {
    for segment in segments {
        match segment {
            Segment::Slot(field) => return Some(field.clone()),
            Segment::Optional { segments, .. } => {
                if let Some(found) = first_slot(segments) {
                    return Some(found);
                }
            }
            Segment::Literal(_) => {}
        }
    }
    None
}

/// Parse a pattern string into segments. `line` and `char_cols` locate each
/// pattern character in the source file.
fn parse_pattern(
    text: &str,
    line: usize,
    char_cols: &[usize],
    str_col: usize,
) -> Result<Vec<Segment>, TemplateError> {
    let chars: Vec<char> = text.chars().collect();
    let col_of = |i: usize| char_cols.get(i).copied().unwrap_or(str_col);
    // Stack of optional groups under construction: (segments, open position).
    let mut stack: Vec<(Vec<Segment>, usize)> = Vec::new();
    let mut current: Vec<Segment> = Vec::new();
    let mut literal = String::new();
    let mut i = 0;
    while i < chars.len() {
        match chars[i] {
            '{' => {
                if !literal.is_empty() {
                    current.push(Segment::Literal(std::mem::take(&mut literal)));
                }
                let name_start = i + 1;
                let mut j = name_start;
                while j < chars.len() && chars[j] != '}' {
                    j += 1;
                }
                if j == chars.len() {
                    return Err(TemplateError::Syntax {
                        line,
                        col: col_of(i),
                        message: "unclosed `{` slot".to_string(),
                    });
                }
                let name: String = chars[name_start..j].iter().collect();
                if !StructuredEvent::is_field_name(&name) {
                    return Err(TemplateError::UnknownSlot {
                        name,
                        line,
                        col: col_of(name_start),
                    });
                }
                current.push(Segment::Slot(name));
                i = j + 1;
            }
            '[' => {
                if !literal.is_empty() {
                    current.push(Segment::Literal(std::mem::take(&mut literal)));
                }
                if stack.len() >= 3 {
                    return Err(TemplateError::Syntax {
                        line,
                        col: col_of(i),
                        message: "optional groups nest deeper than 3".to_string(),
                    });
                }
                stack.push((std::mem::take(&mut current), i));
                i += 1;
            }
            ']' => {
                if !literal.is_empty() {
                    current.push(Segment::Literal(std::mem::take(&mut literal)));
                }
                let (outer, open_pos) = stack.pop().ok_or_else(|| TemplateError::Syntax {
                    line,
                    col: col_of(i),
                    message: "`]` without a matching `[`".to_string(),
                })?;
                let group = std::mem::replace(&mut current, outer);
                let guard = first_slot(&group).ok_or_else(|| TemplateError::Syntax {
                    line,
                    col: col_of(open_pos),
                    message: "optional group contains no slot to use as its guard".to_string(),
                })?;
                current.push(Segment::Optional {
                    segments: group,
                    guard,
                });
                i += 1;
            }
            other => {
                literal.push(other);
                i += 1;
            }
        }
    }
    if let Some((_, open_pos)) = stack.last() {
        return Err(TemplateError::Syntax {
            line,
            col: col_of(*open_pos),
            message: "unclosed `[` optional group".to_string(),
        });
    }
    if !literal.is_empty() {
        current.push(Segment::Literal(literal));
    }
    Ok(current)
}

/// Parse template-DSL source into a [`TemplateSet`]. Errors carry the
/// source line and column they were detected at.
pub fn parse_template_set(source: &str) -> Result<TemplateSet, TemplateError> {
    let mut parser = Parser::new(source);
    let mut templates: Vec<Template> = Vec::new();
    let mut connectives: Vec<String> = Vec::new();
    let mut seed_policy = SeedPolicy::default();

    loop {
        let token = parser.next()?;
        match &token.kind {
            TokenKind::Eof => break,
            TokenKind::Ident(word) if word == "template" => {
                let (name, name_token) = parser.any_ident()?;
                if templates.iter().any(|t| t.name() == name) {
                    return Err(TemplateError::DuplicateTemplate {
                        name,
                        line: name_token.line,
                        col: name_token.col,
                    });
                }
                parser.expect(TokenKind::LBrace, "`{`")?;
                parser.expect_ident("pattern")?;
                parser.expect(TokenKind::Colon, "`:` after `pattern`")?;
                let (pattern, char_cols, pattern_token) = parser.string()?;
                let segments =
                    parse_pattern(&pattern, pattern_token.line, &char_cols, pattern_token.col)?;
                parser.skip_semi()?;

                let mut required: Option<BTreeSet<String>> = None;
                if matches!(&parser.peek()?.kind, TokenKind::Ident(w) if w == "requires") {
                    parser.next()?;
                    parser.expect(TokenKind::Colon, "`:` after `requires`")?;
                    let mut set = BTreeSet::new();
                    loop {
                        let (slot, slot_token) = parser.any_ident()?;
                        if !StructuredEvent::is_field_name(&slot) {
                            return Err(TemplateError::UnknownSlot {
                                name: slot,
                                line: slot_token.line,
                                col: slot_token.col,
                            });
                        }
                        set.insert(slot);
                        if parser.peek()?.kind == TokenKind::Comma {
                            parser.next()?;
                        } else {
                            break;
                        }
                    }
                    required = Some(set);
                }
                parser.skip_semi()?;
                let brace = parser.expect(TokenKind::RBrace, "`}`")?;

                let template =
                    Template::new(name, segments, required).map_err(|err| match err {
                        // re-anchor position-less constructor errors at this block
                        TemplateError::Syntax { message, .. } => TemplateError::Syntax {
                            line: brace.line,
                            col: brace.col,
                            message,
                        },
                        other => other,
                    })?;
                templates.push(template);
            }
            TokenKind::Ident(word) if word == "connectives" => {
                parser.expect(TokenKind::Colon, "`:` after `connectives`")?;
                parser.expect(TokenKind::LBracket, "`[`")?;
                loop {
                    let (text, _, _) = parser.string()?;
                    connectives.push(text);
                    let next = parser.next()?;
                    match next.kind {
                        TokenKind::Comma => continue,
                        TokenKind::RBracket => break,
                        _ => return Err(Parser::syntax(&next, "expected `,` or `]`")),
                    }
                }
            }
            TokenKind::Ident(word) if word == "seed_policy" => {
                parser.expect(TokenKind::Colon, "`:` after `seed_policy`")?;
                let (value, value_token) = parser.any_ident()?;
                seed_policy = match value.as_str() {
                    "deterministic" => SeedPolicy::Deterministic,
                    "seeded" => SeedPolicy::SeededRandom,
                    _ => {
                        return Err(Parser::syntax(
                            &value_token,
                            "expected `deterministic` or `seeded`",
                        ))
                    }
                };
            }
            _ => {
                return Err(Parser::syntax(
                    &token,
                    "expected `template`, `connectives` or `seed_policy`",
                ))
            }
        }
    }

    if templates.is_empty() {
        return Err(TemplateError::Syntax {
            line: 1,
            col: 1,
            message: "file declares no templates".to_string(),
        });
    }
    TemplateSet::new(templates, connectives, seed_policy)
}
