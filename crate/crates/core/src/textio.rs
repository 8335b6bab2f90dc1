//! Shared line-oriented parsing helpers for the `%CA-*` text formats.
//!
//! All formats are UTF-8, one record per line, with `#` starting a comment
//! that runs to the end of the line. Parsers report errors with 1-based line
//! numbers.

use crate::error::{Error, Result};
use crate::geometry::CellVector;

/// Comment-stripped, trimmed lines with their original 1-based numbers.
/// Blank lines are kept: one format (forbidden-pattern lists) uses them as
/// record separators.
pub(crate) struct Scanner {
    lines: Vec<(usize, String)>,
    pos: usize,
}

impl Scanner {
    pub fn new(text: &str) -> Scanner {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, raw)| {
                let body = match raw.find('#') {
                    Some(cut) => &raw[..cut],
                    None => raw,
                };
                (i + 1, body.trim().to_string())
            })
            .collect();
        Scanner { lines, pos: 0 }
    }

    /// Next line including blanks, or `None` at end of input.
    pub fn next_line(&mut self) -> Option<(usize, &str)> {
        let item = self.lines.get(self.pos)?;
        self.pos += 1;
        Some((item.0, item.1.as_str()))
    }

    /// Next nonblank line, or `None` at end of input.
    pub fn next_nonblank(&mut self) -> Option<(usize, &str)> {
        while let Some(item) = self.lines.get(self.pos) {
            self.pos += 1;
            if !item.1.is_empty() {
                return Some((item.0, item.1.as_str()));
            }
        }
        None
    }

    /// Line number to report when input ends unexpectedly.
    pub fn last_line(&self) -> usize {
        self.lines.last().map(|(n, _)| *n).unwrap_or(0)
    }

    pub fn expect_header(&mut self, header: &str) -> Result<()> {
        match self.next_nonblank() {
            Some((_, line)) if line == header => Ok(()),
            Some((n, line)) => Err(Error::parse(
                n,
                format!("expected header `{header}`, found `{line}`"),
            )),
            None => Err(Error::parse(0, format!("missing header `{header}`"))),
        }
    }
}

/// Splits `key: value` at the first colon.
pub(crate) fn key_value(line: &str) -> Option<(&str, &str)> {
    let (key, value) = line.split_once(':')?;
    Some((key.trim(), value.trim()))
}

/// Parses a `(v)=s` cell assignment.
pub(crate) fn cell_assignment(line_no: usize, line: &str) -> Result<(CellVector, u32)> {
    let (cell, symbol) = line
        .split_once('=')
        .ok_or_else(|| Error::parse(line_no, format!("expected `(v)=s`, found `{line}`")))?;
    let cell = cell
        .trim()
        .parse::<CellVector>()
        .map_err(|e| at_line(e, line_no))?;
    let symbol = parse_u32(line_no, symbol.trim())?;
    Ok((cell, symbol))
}

pub(crate) fn parse_u32(line_no: usize, text: &str) -> Result<u32> {
    text.parse::<u32>()
        .map_err(|_| Error::parse(line_no, format!("expected a non-negative integer, found `{text}`")))
}

pub(crate) fn parse_i64(line_no: usize, text: &str) -> Result<i64> {
    text.parse::<i64>()
        .map_err(|_| Error::parse(line_no, format!("expected an integer, found `{text}`")))
}

pub(crate) fn parse_usize(line_no: usize, text: &str) -> Result<usize> {
    text.parse::<usize>()
        .map_err(|_| Error::parse(line_no, format!("expected a non-negative integer, found `{text}`")))
}

/// Splits on commas that sit outside parentheses: `(0,1),(2,3)` → two parts.
pub(crate) fn split_outside_parens(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    let tail = text[start..].trim();
    if !tail.is_empty() || !parts.is_empty() {
        parts.push(tail);
    }
    parts
}

/// Re-tags a vector parse error with the real line number.
pub(crate) fn at_line(err: Error, line_no: usize) -> Error {
    match err {
        Error::Parse { message, .. } => Error::Parse {
            line: line_no,
            message,
        },
        other => other,
    }
}
