//! Reader and writer for the `.dicm` system-description format.
//!
//! ```text
//! system "Pressurizer" { notes: ["..."] }
//!
//! component adc {
//!   name: "Pressure ADC"
//!   kind: intermediate_processor
//!   has_software: true
//!   outputs: [pressure_digital]
//! }
//! ```
//!
//! A file is one `system` block followed by `division`, `component`,
//! `signal`, `control_action`, `top_event`, `uca` and `uif` blocks. Values
//! are identifiers, quoted strings, booleans or bracketed lists; `#` starts
//! a comment. Reference errors (an unknown component, say) are left to
//! [`crate::model::validate`].

mod lexer;
mod serialize;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::model::{
    Component, ComponentKind, Continuity, ControlAction, Direction, Division, Signal, SystemModel, TopEvent,
};
use crate::taxonomy::{Flavor, MechanismGroup, UcaType, UifType, UnsafeFlowRecord};
use lexer::{lex, Tok, Token};

pub use serialize::serialize;

pub const FILE_EXTENSION: &str = "dicm";

const BLOCK_KEYWORDS: [&str; 8] = ["system", "division", "component", "signal", "control_action", "top_event", "uca", "uif"];

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SourceSpan {
    pub file: String,
    /// 1-based.
    pub line: usize,
    /// 1-based, in characters.
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    /// Secondary locations, e.g. the first definition of a duplicated id.
    pub related: Vec<(SourceSpan, String)>,
}

impl ParseError {
    fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError { span, message: message.into(), related: Vec::new() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: error: {}", self.span, self.message)?;
        for (span, note) in &self.related {
            write!(f, "\n{span}: note: {note}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

/// Parse a model; errors are reported against the file name `<input>`.
pub fn parse(text: &str) -> Result<SystemModel, Vec<ParseError>> {
    parse_named("<input>", text)
}

/// Parse a model, tagging spans with `file`. Either the whole file parses or
/// every error found is returned; there is no partial model.
pub fn parse_named(file: &str, text: &str) -> Result<SystemModel, Vec<ParseError>> {
    let (tokens, mut errors) = lex(file, text);
    let mut p = Parser { tokens, pos: 0, errors: Vec::new() };
    let blocks = p.file();
    errors.append(&mut p.errors);
    let model = build_model(blocks, &mut errors);
    if errors.is_empty() {
        Ok(model)
    } else {
        errors.sort_by_key(|e| (e.span.line, e.span.column));
        Err(errors)
    }
}

#[derive(Debug, Clone)]
enum Value {
    Ident(String, SourceSpan),
    Str(String, SourceSpan),
    List(Vec<Value>, SourceSpan),
}

impl Value {
    fn span(&self) -> &SourceSpan {
        match self {
            Value::Ident(_, s) | Value::Str(_, s) | Value::List(_, s) => s,
        }
    }

    fn describe(&self) -> &'static str {
        match self {
            Value::Ident(..) => "identifier",
            Value::Str(..) => "string",
            Value::List(..) => "list",
        }
    }
}

#[derive(Debug)]
struct Entry {
    key: String,
    key_span: SourceSpan,
    value: Value,
}

#[derive(Debug)]
struct Block {
    keyword: String,
    keyword_span: SourceSpan,
    name: String,
    name_is_string: bool,
    name_span: SourceSpan,
    entries: Vec<Entry>,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    errors: Vec<ParseError>,
}

/// Marker for a syntax error that has already been recorded.
struct Bail;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&mut self, expected: &[&str]) -> Bail {
        let t = self.peek().clone();
        let list = match expected {
            [one] => one.to_string(),
            _ => format!("one of {}", expected.join(", ")),
        };
        self.errors.push(ParseError::new(t.span, format!("expected {list}, found {}", t.tok.describe())));
        Bail
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, Bail> {
        if self.peek().tok == tok {
            Ok(self.next())
        } else {
            Err(self.unexpected(&[what]))
        }
    }

    fn file(&mut self) -> Vec<Block> {
        let mut blocks = Vec::new();
        match &self.peek().tok {
            Tok::Ident(k) if k == "system" => {}
            _ => {
                let t = self.peek().clone();
                self.errors.push(ParseError::new(t.span, "expected 'system' header"));
                if t.tok == Tok::Eof {
                    return blocks;
                }
            }
        }
        while self.peek().tok != Tok::Eof {
            match self.block() {
                Ok(b) => blocks.push(b),
                Err(Bail) => self.recover(),
            }
        }
        blocks
    }

    /// Skip to the next block keyword at nesting depth zero.
    fn recover(&mut self) {
        let mut depth = 0i32;
        loop {
            match &self.peek().tok {
                Tok::Eof => return,
                Tok::LBrace => depth += 1,
                Tok::RBrace => {
                    depth -= 1;
                    if depth <= 0 {
                        self.next();
                        return;
                    }
                }
                Tok::Ident(k) if depth <= 0 && BLOCK_KEYWORDS.contains(&k.as_str()) => return,
                _ => {}
            }
            self.next();
        }
    }

    fn block(&mut self) -> Result<Block, Bail> {
        let kw = match &self.peek().tok {
            Tok::Ident(k) if BLOCK_KEYWORDS.contains(&k.as_str()) => self.next(),
            _ => return Err(self.unexpected(&["block keyword"])),
        };
        let Tok::Ident(keyword) = kw.tok else { unreachable!() };
        let name_tok = self.next();
        let (name, name_is_string) = match name_tok.tok {
            Tok::Ident(s) => (s, false),
            Tok::Str(s) => (s, true),
            other => {
                self.errors.push(ParseError::new(
                    name_tok.span,
                    format!("expected identifier or string after `{keyword}`, found {}", other.describe()),
                ));
                return Err(Bail);
            }
        };
        self.expect(Tok::LBrace, "'{'")?;
        let mut entries = Vec::new();
        loop {
            match self.peek().tok.clone() {
                Tok::RBrace => {
                    self.next();
                    break;
                }
                Tok::Comma => {
                    self.next();
                }
                Tok::Ident(key) => {
                    let key_tok = self.next();
                    self.expect(Tok::Colon, "':'")?;
                    let value = self.value()?;
                    entries.push(Entry { key, key_span: key_tok.span, value });
                }
                _ => return Err(self.unexpected(&["key", "'}'"])),
            }
        }
        Ok(Block { keyword, keyword_span: kw.span, name, name_is_string, name_span: name_tok.span, entries })
    }

    fn value(&mut self) -> Result<Value, Bail> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Ident(s) => {
                self.next();
                Ok(Value::Ident(s, t.span))
            }
            Tok::Str(s) => {
                self.next();
                Ok(Value::Str(s, t.span))
            }
            Tok::LBracket => {
                self.next();
                let mut items = Vec::new();
                loop {
                    if self.peek().tok == Tok::RBracket {
                        self.next();
                        break;
                    }
                    items.push(self.value()?);
                    match self.peek().tok {
                        Tok::Comma => {
                            self.next();
                        }
                        Tok::RBracket => {}
                        _ => return Err(self.unexpected(&["','", "']'"])),
                    }
                }
                Ok(Value::List(items, t.span))
            }
            _ => Err(self.unexpected(&["identifier", "string", "'['"])),
        }
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_reserved(s: &str) -> bool {
    BLOCK_KEYWORDS.contains(&s) || s == "true" || s == "false"
}

/// Typed access to a block's entries; records errors as it goes.
struct Fields<'b> {
    block: &'b Block,
    taken: HashMap<&'b str, &'b Entry>,
    errors: Vec<ParseError>,
}

impl<'b> Fields<'b> {
    fn new(block: &'b Block, allowed: &[&str]) -> Self {
        let mut taken = HashMap::new();
        let mut errors = Vec::new();
        for e in &block.entries {
            if !allowed.contains(&e.key.as_str()) {
                errors.push(ParseError::new(
                    e.key_span.clone(),
                    format!("unknown key `{}` in `{}` block; expected one of {}", e.key, block.keyword, allowed.join(", ")),
                ));
            } else if let Some(prev) = taken.insert(e.key.as_str(), e) {
                let mut err = ParseError::new(e.key_span.clone(), format!("duplicate key `{}`", e.key));
                err.related.push((prev.key_span.clone(), "first given here".into()));
                errors.push(err);
            }
        }
        Fields { block, taken, errors }
    }

    fn get(&self, key: &str) -> Option<&'b Value> {
        self.taken.get(key).map(|e| &e.value)
    }

    fn missing(&mut self, key: &str) {
        self.errors.push(ParseError::new(
            self.block.name_span.clone(),
            format!("`{}` block `{}` is missing required key `{key}`", self.block.keyword, self.block.name),
        ));
    }

    fn type_error(&mut self, v: &Value, want: &str) {
        self.errors.push(ParseError::new(v.span().clone(), format!("expected {want}, found {}", v.describe())));
    }

    fn ident_of(&mut self, v: &Value) -> Option<String> {
        match v {
            Value::Ident(s, span) if is_reserved(s) => {
                self.errors.push(ParseError::new(span.clone(), format!("`{s}` is a reserved keyword")));
                None
            }
            Value::Ident(s, _) => Some(s.clone()),
            other => {
                self.type_error(other, "identifier");
                None
            }
        }
    }

    fn opt_ident(&mut self, key: &str) -> Option<String> {
        let v = self.get(key)?;
        self.ident_of(v)
    }

    fn req_ident(&mut self, key: &str) -> Option<String> {
        match self.get(key) {
            Some(v) => self.ident_of(v),
            None => {
                self.missing(key);
                None
            }
        }
    }

    fn opt_string(&mut self, key: &str) -> Option<String> {
        match self.get(key)? {
            Value::Str(s, _) => Some(s.clone()),
            other => {
                self.type_error(other, "string");
                None
            }
        }
    }

    fn req_string(&mut self, key: &str) -> Option<String> {
        if self.get(key).is_none() {
            self.missing(key);
            return None;
        }
        self.opt_string(key)
    }

    fn opt_bool(&mut self, key: &str) -> Option<bool> {
        match self.get(key)? {
            Value::Ident(s, _) if s == "true" => Some(true),
            Value::Ident(s, _) if s == "false" => Some(false),
            other => {
                self.type_error(other, "`true` or `false`");
                None
            }
        }
    }

    fn list(&mut self, key: &str) -> Option<&'b [Value]> {
        match self.get(key)? {
            Value::List(items, _) => Some(items),
            other => {
                self.type_error(other, "list");
                None
            }
        }
    }

    fn ident_list(&mut self, key: &str) -> Vec<String> {
        let items = self.list(key).unwrap_or(&[]);
        items.iter().filter_map(|v| self.ident_of(v)).collect()
    }

    fn string_list(&mut self, key: &str) -> Vec<String> {
        let items = self.list(key).unwrap_or(&[]);
        let mut out = Vec::new();
        for v in items {
            match v {
                Value::Str(s, _) => out.push(s.clone()),
                other => self.type_error(other, "string"),
            }
        }
        out
    }

    /// An identifier value drawn from a fixed vocabulary.
    fn keyword<T>(&mut self, key: &str, default: Option<T>, parse: impl Fn(&str) -> Option<T>, choices: &str) -> Option<T> {
        match self.get(key) {
            None => {
                if default.is_none() {
                    self.missing(key);
                }
                default
            }
            Some(Value::Ident(s, span)) => match parse(s) {
                Some(v) => Some(v),
                None => {
                    self.errors.push(ParseError::new(span.clone(), format!("invalid `{key}` value `{s}`; expected {choices}")));
                    None
                }
            },
            Some(other) => {
                self.type_error(other, choices);
                None
            }
        }
    }
}

fn build_model(blocks: Vec<Block>, errors: &mut Vec<ParseError>) -> SystemModel {
    let mut model = SystemModel::default();
    let mut system_seen: Option<SourceSpan> = None;
    // (namespace, id) -> first definition
    let mut defined: HashMap<(&'static str, String), SourceSpan> = HashMap::new();

    for (i, b) in blocks.iter().enumerate() {
        if b.keyword == "system" {
            if let Some(first) = &system_seen {
                let mut e = ParseError::new(b.keyword_span.clone(), "more than one `system` block");
                e.related.push((first.clone(), "first `system` block".into()));
                errors.push(e);
                continue;
            }
            if i != 0 {
                errors.push(ParseError::new(b.keyword_span.clone(), "the `system` block must come first"));
            }
            system_seen = Some(b.keyword_span.clone());
            let mut f = Fields::new(b, &["notes"]);
            model.name = b.name.clone();
            model.notes = f.string_list("notes");
            errors.append(&mut f.errors);
            continue;
        }

        if b.name_is_string || !is_identifier(&b.name) {
            errors.push(ParseError::new(b.name_span.clone(), format!("`{}` id must be an identifier", b.keyword)));
        } else if is_reserved(&b.name) {
            errors.push(ParseError::new(b.name_span.clone(), format!("`{}` is a reserved keyword", b.name)));
        }
        let namespace: &'static str = match b.keyword.as_str() {
            "division" => "division",
            "component" => "component",
            "signal" => "signal",
            "control_action" => "control action",
            "top_event" => "top event",
            _ => "flow record",
        };
        if let Some(first) = defined.get(&(namespace, b.name.clone())) {
            let mut e = ParseError::new(b.name_span.clone(), format!("duplicate {namespace} id `{}`", b.name));
            e.related.push((first.clone(), "first defined here".into()));
            errors.push(e);
        } else {
            defined.insert((namespace, b.name.clone()), b.name_span.clone());
        }

        let id = b.name.clone();
        match b.keyword.as_str() {
            "division" => {
                let mut f = Fields::new(b, &["diverse_with"]);
                model.divisions.push(Division { id, diverse_with: f.ident_list("diverse_with") });
                errors.append(&mut f.errors);
            }
            "component" => {
                let mut f = Fields::new(
                    b,
                    &["name", "kind", "division", "diversity_group", "has_software", "hardware_failure_modes", "outputs"],
                );
                let kind = f.keyword("kind", None, ComponentKind::from_keyword, "a component kind");
                let c = Component {
                    name: f.opt_string("name").unwrap_or_else(|| id.clone()),
                    kind: kind.unwrap_or(ComponentKind::Sensor),
                    division: f.opt_ident("division"),
                    diversity_group: f.opt_ident("diversity_group"),
                    has_software: f.opt_bool("has_software").unwrap_or(false),
                    hardware_failure_modes: f.string_list("hardware_failure_modes"),
                    outputs: f.ident_list("outputs"),
                    id,
                };
                model.components.push(c);
                errors.append(&mut f.errors);
            }
            "signal" => {
                let mut f = Fields::new(b, &["source", "destinations", "direction", "continuity", "description"]);
                if f.get("destinations").is_none() {
                    f.missing("destinations");
                }
                let s = Signal {
                    source: f.req_ident("source").unwrap_or_default(),
                    destinations: f.ident_list("destinations"),
                    direction: f
                        .keyword("direction", None, Direction::from_keyword, "`feedback` or `control_action`")
                        .unwrap_or(Direction::Feedback),
                    continuity: f
                        .keyword("continuity", Some(Continuity::Continuous), Continuity::from_keyword, "`continuous` or `on_demand`")
                        .unwrap_or(Continuity::Continuous),
                    description: f.opt_string("description").unwrap_or_default(),
                    id,
                };
                model.signals.push(s);
                errors.append(&mut f.errors);
            }
            "control_action" => {
                let mut f = Fields::new(b, &["controller", "action_name", "target"]);
                let ca = ControlAction {
                    controller: f.req_ident("controller").unwrap_or_default(),
                    action_name: f.req_string("action_name").unwrap_or_default(),
                    target: f.req_ident("target").unwrap_or_default(),
                    id,
                };
                model.control_actions.push(ca);
                errors.append(&mut f.errors);
            }
            "top_event" => {
                let mut f = Fields::new(b, &["description", "hazard_components"]);
                if f.get("hazard_components").is_none() {
                    f.missing("hazard_components");
                }
                let t = TopEvent {
                    description: f.req_string("description").unwrap_or_default(),
                    hazard_components: f.ident_list("hazard_components"),
                    id,
                };
                model.top_events.push(t);
                errors.append(&mut f.errors);
            }
            "uca" | "uif" => {
                let is_uca = b.keyword == "uca";
                let link = if is_uca { "control_action" } else { "signal" };
                let mut f = Fields::new(
                    b,
                    &["owner", link, "type", "context", "mechanism", "shared_divisions", "top_events"],
                );
                let owner = f.req_ident("owner").unwrap_or_default();
                let linked = f.req_ident(link).unwrap_or_default();
                let flavor = if is_uca {
                    let t = f.keyword("type", None, UcaType::from_letter, "A, B, C or D").unwrap_or(UcaType::A);
                    Flavor::Uca { control_action: linked, uca_type: t }
                } else {
                    let t = f.keyword("type", None, UifType::from_letter, "A, B, C or D").unwrap_or(UifType::A);
                    Flavor::Uif { signal: linked, uif_type: t }
                };
                let rec = UnsafeFlowRecord {
                    owner,
                    flavor,
                    context: f.opt_string("context").unwrap_or_default(),
                    mechanism_group: f
                        .keyword("mechanism", Some(MechanismGroup::Group1Internal), MechanismGroup::from_keyword, "`group1` or `group2`")
                        .unwrap_or(MechanismGroup::Group1Internal),
                    shared_divisions: f.ident_list("shared_divisions"),
                    top_events: f.ident_list("top_events"),
                    id,
                };
                if is_uca {
                    model.declared_ucas.push(rec);
                } else {
                    model.declared_uifs.push(rec);
                }
                errors.append(&mut f.errors);
            }
            _ => unreachable!("block keyword checked by the parser"),
        }
    }
    model
}
