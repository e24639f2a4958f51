//! Line-oriented N-Triples reader.
//!
//! Supports the subset found in public dumps: IRIs, blank nodes (kept as opaque
//! identifiers), and plain, language-tagged or datatyped literals. Literal
//! objects are reduced to their unescaped lexical form.

use std::fmt;
use std::io::BufRead;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Lines parsed per parallel batch when streaming.
const BATCH_LINES: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(String),
    Literal(String),
}

impl Term {
    pub fn as_str(&self) -> &str {
        match self {
            Term::Iri(s) | Term::Literal(s) => s,
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: String,
    pub predicate: String,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<String>, predicate: impl Into<String>, object: Term) -> Self {
        Triple {
            subject: subject.into(),
            predicate: predicate.into(),
            object,
        }
    }
}

impl fmt::Display for Triple {
    /// Serializes back to a single N-Triples line (without the trailing newline).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.subject)?;
        f.write_str(" <")?;
        f.write_str(&self.predicate)?;
        f.write_str("> ")?;
        match &self.object {
            Term::Iri(iri) => write_node(f, iri)?,
            Term::Literal(lit) => {
                f.write_str("\"")?;
                for c in lit.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\r' => f.write_str("\\r")?,
                        '\t' => f.write_str("\\t")?,
                        c => fmt::Write::write_char(f, c)?,
                    }
                }
                f.write_str("\"")?;
            }
        }
        f.write_str(" .")
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, node: &str) -> fmt::Result {
    if node.starts_with("_:") {
        f.write_str(node)
    } else {
        write!(f, "<{node}>")
    }
}

/// Outcome of parsing a whole stream.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedTriples {
    pub triples: Vec<Triple>,
    pub malformed_lines: usize,
}

impl ParsedTriples {
    pub fn extend(&mut self, other: ParsedTriples) {
        self.triples.extend(other.triples);
        self.malformed_lines += other.malformed_lines;
    }
}

/// Parses one line. Blank lines and comments yield `Ok(None)`.
pub fn parse_line(line: &str) -> std::result::Result<Option<Triple>, String> {
    let mut cur = Cursor::new(line);
    cur.skip_ws();
    if cur.at_end() || cur.peek() == Some('#') {
        return Ok(None);
    }
    let subject = cur.node()?;
    cur.require_ws()?;
    let predicate = match cur.node()? {
        Term::Iri(p) if !p.starts_with("_:") => p,
        _ => return Err("predicate must be an IRI".into()),
    };
    cur.require_ws()?;
    let object = if cur.peek() == Some('"') {
        cur.literal()?
    } else {
        Term::Iri(cur.node_iri()?)
    };
    cur.skip_ws();
    if cur.peek() != Some('.') {
        return Err("expected '.' terminating the triple".into());
    }
    cur.bump();
    cur.skip_ws();
    if !cur.at_end() && cur.peek() != Some('#') {
        return Err("trailing content after '.'".into());
    }
    let subject = match subject {
        Term::Iri(s) => s,
        Term::Literal(_) => return Err("subject must be an IRI or blank node".into()),
    };
    Ok(Some(Triple {
        subject,
        predicate,
        object,
    }))
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t' | '\r' | '\n')) {
            self.pos += 1;
        }
    }

    fn require_ws(&mut self) -> std::result::Result<(), String> {
        let before = self.pos;
        self.skip_ws();
        if self.pos == before {
            Err(format!("expected whitespace at column {}", self.pos + 1))
        } else {
            Ok(())
        }
    }

    /// Subject-position node: IRI or blank node, blank nodes kept verbatim.
    fn node(&mut self) -> std::result::Result<Term, String> {
        self.node_iri().map(Term::Iri)
    }

    fn node_iri(&mut self) -> std::result::Result<String, String> {
        match self.peek() {
            Some('<') => {
                self.bump();
                let rest = self.rest();
                let end = rest.find('>').ok_or_else(|| "unterminated IRI".to_string())?;
                let iri = &rest[..end];
                if iri.is_empty() {
                    return Err("empty IRI".into());
                }
                if iri.chars().any(|c| c.is_whitespace() || c == '<' || c == '"') {
                    return Err(format!("invalid character in IRI <{iri}>"));
                }
                self.pos += end + 1;
                Ok(iri.to_string())
            }
            Some('_') if self.rest().starts_with("_:") => {
                let rest = self.rest();
                let end = rest.find(|c: char| c.is_whitespace()).unwrap_or(rest.len());
                let label = &rest[..end];
                if label.len() <= 2 {
                    return Err("empty blank node label".into());
                }
                self.pos += end;
                Ok(label.to_string())
            }
            Some(c) => Err(format!("unexpected character {c:?} at column {}", self.pos + 1)),
            None => Err("unexpected end of line".into()),
        }
    }

    fn literal(&mut self) -> std::result::Result<Term, String> {
        self.bump(); // opening quote
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err("unterminated literal".into()),
                Some('"') => break,
                Some('\\') => match self.bump() {
                    Some('t') => out.push('\t'),
                    Some('b') => out.push('\u{8}'),
                    Some('n') => out.push('\n'),
                    Some('r') => out.push('\r'),
                    Some('f') => out.push('\u{c}'),
                    Some('"') => out.push('"'),
                    Some('\'') => out.push('\''),
                    Some('\\') => out.push('\\'),
                    Some('u') => out.push(self.hex_escape(4)?),
                    Some('U') => out.push(self.hex_escape(8)?),
                    Some(c) => return Err(format!("invalid escape \\{c}")),
                    None => return Err("unterminated escape".into()),
                },
                Some(c) => out.push(c),
            }
        }
        match self.peek() {
            Some('@') => {
                self.bump();
                let rest = self.rest();
                let end = rest
                    .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
                    .unwrap_or(rest.len());
                if end == 0 {
                    return Err("empty language tag".into());
                }
                self.pos += end;
            }
            Some('^') => {
                if !self.rest().starts_with("^^") {
                    return Err("malformed datatype marker".into());
                }
                self.pos += 2;
                if self.peek() != Some('<') {
                    return Err("datatype must be an IRI".into());
                }
                self.node_iri()?;
            }
            _ => {}
        }
        Ok(Term::Literal(out))
    }

    fn hex_escape(&mut self, digits: usize) -> std::result::Result<char, String> {
        let rest = self.rest();
        let hex = rest
            .get(..digits)
            .ok_or_else(|| "truncated unicode escape".to_string())?;
        let code = u32::from_str_radix(hex, 16).map_err(|_| format!("invalid unicode escape {hex}"))?;
        self.pos += digits;
        char::from_u32(code).ok_or_else(|| format!("invalid code point U+{code:X}"))
    }
}

fn parse_batch(lines: &[(usize, Vec<u8>)], strict: bool) -> Result<ParsedTriples> {
    let results: Vec<std::result::Result<Option<Triple>, (usize, String)>> = lines
        .par_iter()
        .map(|(lineno, bytes)| {
            let text = std::str::from_utf8(bytes).map_err(|e| (*lineno, format!("invalid UTF-8: {e}")))?;
            parse_line(text).map_err(|msg| (*lineno, msg))
        })
        .collect();
    let mut out = ParsedTriples::default();
    for r in results {
        match r {
            Ok(Some(t)) => out.triples.push(t),
            Ok(None) => {}
            Err((line, message)) if strict => return Err(Error::Syntax { line, message }),
            Err((line, message)) => {
                log::debug!("skipping malformed line {line}: {message}");
                out.malformed_lines += 1;
            }
        }
    }
    Ok(out)
}

/// Parses a line stream. Lines are read in batches and each batch is parsed on
/// the current rayon pool; output order follows input order.
///
/// In strict mode the first malformed line aborts with its 1-based line
/// number. Otherwise malformed lines are counted and skipped.
pub fn parse_ntriples<R: BufRead>(mut reader: R, strict: bool) -> Result<ParsedTriples> {
    let mut out = ParsedTriples::default();
    let mut batch = Vec::with_capacity(BATCH_LINES);
    let mut lineno = 0usize;
    loop {
        let mut buf = Vec::new();
        let n = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| Error::io("<stream>", e))?;
        if n == 0 {
            break;
        }
        lineno += 1;
        if buf.last() == Some(&b'\n') {
            buf.pop();
        }
        batch.push((lineno, buf));
        if batch.len() == BATCH_LINES {
            out.extend(parse_batch(&batch, strict)?);
            batch.clear();
        }
    }
    out.extend(parse_batch(&batch, strict)?);
    Ok(out)
}

pub fn parse_ntriples_str(text: &str, strict: bool) -> Result<ParsedTriples> {
    parse_ntriples(text.as_bytes(), strict)
}
