use super::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Str(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Colon,
    Comma,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Str(_) => "string".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Colon => "':'".into(),
            Tok::Comma => "','".into(),
            Tok::Eof => "end of file".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

/// Tokenize the whole input. Bad characters are reported and skipped so a
/// single stray byte does not hide later errors.
pub(crate) fn lex(file: &str, text: &str) -> (Vec<Token>, Vec<ParseError>) {
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    let span = |line, column| SourceSpan { file: file.to_string(), line, column };

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let start = span(line, col);
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            '{' | '}' | '[' | ']' | ':' | ',' => {
                bump!();
                let tok = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ':' => Tok::Colon,
                    _ => Tok::Comma,
                };
                tokens.push(Token { tok, span: start });
            }
            '"' => {
                bump!();
                let mut s = String::new();
                let mut closed = false;
                while let Some(c) = bump!() {
                    match c {
                        '"' => {
                            closed = true;
                            break;
                        }
                        '\n' => break,
                        '\\' => {
                            let esc_span = span(line, col - 1);
                            match bump!() {
                                Some('"') => s.push('"'),
                                Some('\\') => s.push('\\'),
                                Some('n') => s.push('\n'),
                                Some('t') => s.push('\t'),
                                Some('r') => s.push('\r'),
                                Some('u') => match unicode_escape(&mut || bump!()) {
                                    Some(ch) => s.push(ch),
                                    None => errors.push(ParseError::new(esc_span, "invalid unicode escape in string")),
                                },
                                Some(other) => {
                                    errors.push(ParseError::new(esc_span, format!("unknown escape `\\{other}` in string")))
                                }
                                None => break,
                            }
                        }
                        c => s.push(c),
                    }
                }
                if closed {
                    tokens.push(Token { tok: Tok::Str(s), span: start });
                } else {
                    errors.push(ParseError::new(start, "unterminated string"));
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                tokens.push(Token { tok: Tok::Ident(s), span: start });
            }
            other => {
                bump!();
                errors.push(ParseError::new(start, format!("unexpected character `{other}`")));
            }
        }
    }
    tokens.push(Token { tok: Tok::Eof, span: span(line, col) });
    (tokens, errors)
}

/// Body of `\u{XXXX}` after the `u`.
fn unicode_escape(next: &mut dyn FnMut() -> Option<char>) -> Option<char> {
    if next()? != '{' {
        return None;
    }
    let mut hex = String::new();
    loop {
        match next()? {
            '}' => break,
            c if c.is_ascii_hexdigit() && hex.len() < 6 => hex.push(c),
            _ => return None,
        }
    }
    char::from_u32(u32::from_str_radix(&hex, 16).ok()?)
}
