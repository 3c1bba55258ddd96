//! Hand-written lexer for JX.
//!
//! Skips whitespace, `//` line comments and `/* */` block comments. Reports
//! illegal characters and unterminated strings/comments with line and column.

use super::ast::Span;
use super::token::{Token, TokenKind};
use super::LexError;

struct Lexer<'s> {
    src: &'s [u8],
    pos: usize,
    line: u32,
    col: u32,
}

/// Tokenize `text` into a vector ending with an `Eof` token.
pub fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    let mut lx = Lexer { src: text.as_bytes(), pos: 0, line: 1, col: 1 };
    let mut tokens = Vec::new();
    loop {
        lx.skip_trivia()?;
        let (line, col, start) = (lx.line, lx.col, lx.pos);
        if lx.at_end() {
            tokens.push(Token {
                kind: TokenKind::Eof,
                span: lx.span_from(start, line, col),
            });
            return Ok(tokens);
        }
        let kind = lx.next_kind()?;
        tokens.push(Token { kind, span: lx.span_from(start, line, col) });
    }
}

impl<'s> Lexer<'s> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.pos + 1).copied()
    }

    fn bump(&mut self) -> u8 {
        let b = self.src[self.pos];
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        b
    }

    fn span_from(&self, start: usize, line: u32, col: u32) -> Span {
        Span {
            start,
            end: self.pos,
            start_line: line,
            start_col: col,
            end_line: self.line,
            end_col: self.col,
        }
    }

    fn skip_trivia(&mut self) -> Result<(), LexError> {
        loop {
            match self.peek() {
                Some(b) if b.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'/') if self.peek2() == Some(b'/') => {
                    while let Some(b) = self.peek() {
                        if b == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some(b'/') if self.peek2() == Some(b'*') => {
                    let (line, col) = (self.line, self.col);
                    self.bump();
                    self.bump();
                    loop {
                        if self.at_end() {
                            return Err(LexError {
                                line,
                                col,
                                message: "unterminated block comment".to_string(),
                            });
                        }
                        if self.peek() == Some(b'*') && self.peek2() == Some(b'/') {
                            self.bump();
                            self.bump();
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn next_kind(&mut self) -> Result<TokenKind, LexError> {
        let (line, col) = (self.line, self.col);
        let b = self.peek().unwrap();
        if b.is_ascii_alphabetic() || b == b'_' {
            return Ok(self.ident());
        }
        if b.is_ascii_digit() {
            return self.number(line, col);
        }
        if b == b'"' {
            return self.string(line, col);
        }
        self.bump();
        let kind = match b {
            b'(' => TokenKind::LParen,
            b')' => TokenKind::RParen,
            b'{' => TokenKind::LBrace,
            b'}' => TokenKind::RBrace,
            b',' => TokenKind::Comma,
            b';' => TokenKind::Semi,
            b'.' => TokenKind::Dot,
            b'+' => TokenKind::Plus,
            b'-' => TokenKind::Minus,
            b'*' => TokenKind::Star,
            b'/' => TokenKind::Slash,
            b'%' => TokenKind::Percent,
            b'=' => {
                if self.peek() == Some(b'=') {
                    self.bump();
                    TokenKind::EqEq
                } else {
                    TokenKind::Assign
                }
            }
            b'!' => {
                if self.peek() == Some(b'=') {
                    self.bump();
                    TokenKind::NotEq
                } else {
                    TokenKind::Bang
                }
            }
            b'<' => {
                if self.peek() == Some(b'=') {
                    self.bump();
                    TokenKind::Le
                } else {
                    TokenKind::Lt
                }
            }
            b'>' => {
                if self.peek() == Some(b'=') {
                    self.bump();
                    TokenKind::Ge
                } else {
                    TokenKind::Gt
                }
            }
            b'|' => {
                if self.peek() == Some(b'|') {
                    self.bump();
                    TokenKind::OrOr
                } else {
                    return Err(self.illegal(line, col, b));
                }
            }
            b'&' => {
                if self.peek() == Some(b'&') {
                    self.bump();
                    TokenKind::AndAnd
                } else {
                    return Err(self.illegal(line, col, b));
                }
            }
            _ => return Err(self.illegal(line, col, b)),
        };
        Ok(kind)
    }

    fn illegal(&self, line: u32, col: u32, b: u8) -> LexError {
        LexError {
            line,
            col,
            message: format!("illegal character `{}`", b as char),
        }
    }

    fn ident(&mut self) -> TokenKind {
        let start = self.pos;
        while let Some(b) = self.peek() {
            if b.is_ascii_alphanumeric() || b == b'_' {
                self.bump();
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        TokenKind::keyword(text).unwrap_or_else(|| TokenKind::Ident(text.to_string()))
    }

    fn number(&mut self, line: u32, col: u32) -> Result<TokenKind, LexError> {
        let start = self.pos;
        while self.peek().map_or(false, |b| b.is_ascii_digit()) {
            self.bump();
        }
        let is_double = self.peek() == Some(b'.') && self.peek2().map_or(false, |b| b.is_ascii_digit());
        if is_double {
            self.bump();
            while self.peek().map_or(false, |b| b.is_ascii_digit()) {
                self.bump();
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            return Ok(TokenKind::Double(text.to_string()));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<i64>()
            .map(TokenKind::Int)
            .map_err(|_| LexError {
                line,
                col,
                message: format!("integer literal `{text}` out of range"),
            })
    }

    fn string(&mut self, line: u32, col: u32) -> Result<TokenKind, LexError> {
        self.bump(); // opening quote
        let mut value = String::new();
        loop {
            match self.peek() {
                None | Some(b'\n') => {
                    return Err(LexError {
                        line,
                        col,
                        message: "unterminated string literal".to_string(),
                    })
                }
                Some(b'"') => {
                    self.bump();
                    return Ok(TokenKind::Str(value));
                }
                Some(b'\\') => {
                    self.bump();
                    let esc = self.peek().ok_or_else(|| LexError {
                        line,
                        col,
                        message: "unterminated string literal".to_string(),
                    })?;
                    self.bump();
                    value.push(match esc {
                        b'"' => '"',
                        b'\\' => '\\',
                        b'n' => '\n',
                        b't' => '\t',
                        other => {
                            return Err(LexError {
                                line: self.line,
                                col: self.col,
                                message: format!("unknown escape `\\{}`", other as char),
                            })
                        }
                    });
                }
                Some(_) => {
                    let b = self.bump();
                    // multi-byte UTF-8 sequences pass through unchanged
                    if b < 0x80 {
                        value.push(b as char);
                    } else {
                        let mut bytes = vec![b];
                        while self.peek().map_or(false, |n| n & 0xC0 == 0x80) {
                            bytes.push(self.bump());
                        }
                        value.push_str(std::str::from_utf8(&bytes).map_err(|_| LexError {
                            line,
                            col,
                            message: "invalid UTF-8 in string".to_string(),
                        })?);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        tokenize(text).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn declaration_tokens() {
        assert_eq!(
            kinds("int x = 1;"),
            vec![
                TokenKind::KwInt,
                TokenKind::Ident("x".into()),
                TokenKind::Assign,
                TokenKind::Int(1),
                TokenKind::Semi,
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn dotted_call_tokens() {
        assert_eq!(
            kinds("a.b()"),
            vec![
                TokenKind::Ident("a".into()),
                TokenKind::Dot,
                TokenKind::Ident("b".into()),
                TokenKind::LParen,
                TokenKind::RParen,
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn illegal_character_reports_position() {
        let err = tokenize("int @x;").unwrap_err();
        assert_eq!((err.line, err.col), (1, 5));
        assert!(err.message.contains('@'));
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(
            kinds("1 // line\n /* block\n */ 2"),
            vec![TokenKind::Int(1), TokenKind::Int(2), TokenKind::Eof]
        );
    }

    #[test]
    fn unterminated_block_comment() {
        assert!(tokenize("/* nope").is_err());
    }

    #[test]
    fn unterminated_string() {
        assert!(tokenize("\"abc").is_err());
    }

    #[test]
    fn string_escapes_decode() {
        assert_eq!(
            kinds(r#""a\"b\n""#),
            vec![TokenKind::Str("a\"b\n".into()), TokenKind::Eof]
        );
    }

    #[test]
    fn double_lexeme_is_preserved() {
        assert_eq!(
            kinds("0.50"),
            vec![TokenKind::Double("0.50".into()), TokenKind::Eof]
        );
    }
}
