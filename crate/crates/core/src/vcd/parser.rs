// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;
use std::io::BufRead;

use super::tokenizer::Tokenizer;
use super::{ChangeEvent, EventRef, Header, SignalDecl, Timescale, ValueRef, VarKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
struct IdInfo {
    width: u32,
    real: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    Header,
    Body,
    Done,
}

/// Streaming VCD parser.
///
/// Between events the parser holds the current time, the id-code table from
/// the header, and two token-sized buffers. Nothing grows with the length of
/// the value-change section.
pub struct Parser<R> {
    tokens: Tokenizer<R>,
    stage: Stage,
    ids: HashMap<Vec<u8>, usize>,
    id_info: Vec<IdInfo>,
    time: u64,
    time_seen: bool,
    /// Inside `$dumpvars`/`$dumpall`/`$dumpon`/`$dumpoff`.
    in_block: bool,
    /// A change parsed before any `#` token, waiting behind an implicit `#0`.
    stashed: Option<usize>,
    value: Vec<u8>,
    id: Vec<u8>,
    value_is_real: bool,
}

impl<R: BufRead> Parser<R> {
    pub fn new(reader: R) -> Self {
        Parser {
            tokens: Tokenizer::new(reader),
            stage: Stage::Header,
            ids: HashMap::new(),
            id_info: Vec::new(),
            time: 0,
            time_seen: false,
            in_block: false,
            stashed: None,
            value: Vec::with_capacity(64),
            id: Vec::with_capacity(8),
            value_is_real: false,
        }
    }

    /// Number of distinct id codes declared in the header.
    pub fn id_count(&self) -> usize {
        self.id_info.len()
    }

    /// Dense index assigned to `id_code`, in order of first declaration.
    pub fn id_index(&self, id_code: &str) -> Option<usize> {
        self.ids.get(id_code.as_bytes()).copied()
    }

    /// Current simulation time.
    pub fn time(&self) -> u64 {
        self.time
    }

    /// Bytes held by the parser's per-event buffers. Bounded by the longest
    /// token seen so far.
    pub fn state_bytes(&self) -> usize {
        self.tokens.buffer_capacity() + self.value.capacity() + self.id.capacity()
    }

    fn line(&self) -> u64 {
        self.tokens.line()
    }

    fn token_str(&self) -> String {
        String::from_utf8_lossy(self.tokens.token()).into_owned()
    }

    /// Collect the tokens of a header section up to its `$end`.
    fn section_body(&mut self) -> Result<Vec<String>> {
        let mut body = Vec::new();
        loop {
            if !self.tokens.advance()? {
                return Err(Error::MissingEndDefinitions);
            }
            if self.tokens.token() == b"$end" {
                return Ok(body);
            }
            body.push(self.token_str());
        }
    }

    /// Consume the declaration section through `$enddefinitions $end`.
    pub fn parse_header(&mut self) -> Result<Header> {
        if self.stage != Stage::Header {
            return Err(Error::MalformedDeclaration {
                line: self.line(),
                msg: "header already parsed".into(),
            });
        }
        let mut header = Header::default();
        let mut scopes: Vec<String> = Vec::new();
        loop {
            if !self.tokens.advance()? {
                if !scopes.is_empty() {
                    return Err(Error::UnbalancedScope {
                        line: self.line(),
                        msg: format!("end of input with {} open scope(s)", scopes.len()),
                    });
                }
                return Err(Error::MissingEndDefinitions);
            }
            let line = self.line();
            let keyword = self.token_str();
            match keyword.as_str() {
                "$date" => header.metadata.date = Some(self.section_body()?.join(" ")),
                "$version" => header.metadata.version = Some(self.section_body()?.join(" ")),
                "$comment" => header.metadata.comments.push(self.section_body()?.join(" ")),
                "$timescale" => {
                    let body = self.section_body()?.concat();
                    let ts = body.parse::<Timescale>().map_err(|_| Error::MalformedDeclaration {
                        line,
                        msg: format!("bad timescale {body:?}"),
                    })?;
                    header.timescale = Some(ts);
                }
                "$scope" => {
                    let body = self.section_body()?;
                    match body.as_slice() {
                        [_kind, name, ..] => scopes.push(name.clone()),
                        _ => {
                            return Err(Error::MalformedDeclaration {
                                line,
                                msg: "$scope needs a type and a name".into(),
                            })
                        }
                    }
                }
                "$upscope" => {
                    self.section_body()?;
                    if scopes.pop().is_none() {
                        return Err(Error::UnbalancedScope {
                            line,
                            msg: "$upscope without open scope".into(),
                        });
                    }
                }
                "$var" => {
                    let body = self.section_body()?;
                    let decl = parse_var(&body, &scopes, line)?;
                    self.declare(&decl);
                    header.decls.push(decl);
                }
                "$enddefinitions" => {
                    self.section_body()?;
                    if !scopes.is_empty() {
                        return Err(Error::UnbalancedScope {
                            line,
                            msg: format!("$enddefinitions with {} open scope(s)", scopes.len()),
                        });
                    }
                    self.stage = Stage::Body;
                    return Ok(header);
                }
                kw if kw.starts_with('$') => {
                    // $attrbegin and other vendor sections carry nothing we use.
                    self.section_body()?;
                }
                other => {
                    return Err(Error::MalformedDeclaration {
                        line,
                        msg: format!("unexpected token {other:?} in header"),
                    })
                }
            }
        }
    }

    fn declare(&mut self, decl: &SignalDecl) {
        let key = decl.id_code.as_bytes();
        match self.ids.get(key) {
            Some(&idx) => {
                let info = &mut self.id_info[idx];
                info.width = info.width.max(decl.width);
            }
            None => {
                self.ids.insert(key.to_vec(), self.id_info.len());
                self.id_info.push(IdInfo {
                    width: decl.width,
                    real: decl.kind.is_real(),
                });
            }
        }
    }

    /// Next event as an owned value, or `None` at end of stream.
    pub fn next_event(&mut self) -> Result<Option<ChangeEvent>> {
        Ok(self.next_event_ref()?.map(|ev| match ev {
            EventRef::Timestamp(t) => ChangeEvent::Timestamp(t),
            EventRef::Change { id_code, value, .. } => ChangeEvent::Change {
                id_code: String::from_utf8_lossy(id_code).into_owned(),
                value: value.to_owned_value(),
            },
        }))
    }

    /// Next event borrowed from the parser's buffers.
    pub fn next_event_ref(&mut self) -> Result<Option<EventRef<'_>>> {
        match self.stage {
            Stage::Header => {
                return Err(Error::MalformedChange {
                    line: self.line(),
                    msg: "value changes requested before the header was parsed".into(),
                })
            }
            Stage::Done => return Ok(None),
            Stage::Body => {}
        }
        if let Some(idx) = self.stashed.take() {
            return Ok(Some(self.current_change(idx)));
        }
        loop {
            if !self.tokens.advance()? {
                if self.in_block {
                    return Err(Error::TruncatedFile {
                        line: self.line(),
                        msg: "end of input inside a dump block".into(),
                    });
                }
                self.stage = Stage::Done;
                return Ok(None);
            }
            let line = self.line();
            let tok = self.tokens.token();
            match tok[0] {
                b'#' => {
                    let t = parse_time(&tok[1..]).ok_or_else(|| Error::MalformedChange {
                        line,
                        msg: format!("bad timestamp {:?}", String::from_utf8_lossy(tok)),
                    })?;
                    if t < self.time {
                        return Err(Error::NonMonotonicTime { line, current: self.time, found: t });
                    }
                    self.time = t;
                    self.time_seen = true;
                    return Ok(Some(EventRef::Timestamp(t)));
                }
                b'$' => self.body_keyword()?,
                b'0' | b'1' | b'x' | b'X' | b'z' | b'Z' => {
                    if tok.len() == 1 {
                        let more = self.tokens.advance()?;
                        return Err(self.missing_id(more));
                    }
                    self.value.clear();
                    self.value.push(tok[0].to_ascii_lowercase());
                    self.id.clear();
                    self.id.extend_from_slice(&tok[1..]);
                    self.value_is_real = false;
                    return self.finish_change(line);
                }
                b'b' | b'B' | b'r' | b'R' => {
                    let real = matches!(tok[0], b'r' | b'R');
                    self.value.clear();
                    if real {
                        self.value.extend_from_slice(&tok[1..]);
                    } else {
                        self.value.extend(tok[1..].iter().map(u8::to_ascii_lowercase));
                        if let Some(&bad) =
                            self.value.iter().find(|b| !matches!(b, b'0' | b'1' | b'x' | b'z'))
                        {
                            return Err(Error::MalformedChange {
                                line,
                                msg: format!("illegal value character {:?}", bad as char),
                            });
                        }
                    }
                    if self.value.is_empty() {
                        return Err(Error::MalformedChange { line, msg: "empty value".into() });
                    }
                    if !self.tokens.advance()? {
                        return Err(Error::TruncatedFile {
                            line,
                            msg: "value change without identifier code".into(),
                        });
                    }
                    self.id.clear();
                    self.id.extend_from_slice(self.tokens.token());
                    self.value_is_real = real;
                    return self.finish_change(line);
                }
                other => {
                    return Err(Error::MalformedChange {
                        line,
                        msg: format!("illegal value character {:?}", other as char),
                    })
                }
            }
        }
    }

    fn missing_id(&self, more_input: bool) -> Error {
        let line = self.line();
        if more_input {
            Error::MalformedChange { line, msg: "scalar change without identifier code".into() }
        } else {
            Error::TruncatedFile { line, msg: "scalar change without identifier code".into() }
        }
    }

    fn body_keyword(&mut self) -> Result<()> {
        let line = self.line();
        match self.tokens.token() {
            b"$dumpvars" | b"$dumpall" | b"$dumpon" | b"$dumpoff" => {
                if self.in_block {
                    return Err(Error::MalformedChange { line, msg: "nested dump block".into() });
                }
                self.in_block = true;
            }
            b"$end" => {
                if !self.in_block {
                    return Err(Error::MalformedChange { line, msg: "unexpected $end".into() });
                }
                self.in_block = false;
            }
            _ => {
                // $comment and anything unrecognized: skip to $end.
                loop {
                    if !self.tokens.advance()? {
                        return Err(Error::TruncatedFile {
                            line,
                            msg: "end of input inside a $ section".into(),
                        });
                    }
                    if self.tokens.token() == b"$end" {
                        break;
                    }
                }
            }
        }
        Ok(())
    }

    /// Validate the change held in `value`/`id` and emit it (or the implicit `#0`).
    fn finish_change(&mut self, line: u64) -> Result<Option<EventRef<'_>>> {
        let idx = *self.ids.get(self.id.as_slice()).ok_or_else(|| Error::UnknownIdCode {
            line,
            id: String::from_utf8_lossy(&self.id).into_owned(),
        })?;
        let info = self.id_info[idx];
        if self.value_is_real != info.real {
            let msg = if info.real {
                "bit value for a real variable"
            } else {
                "real value for an integer variable"
            };
            return Err(Error::MalformedChange { line, msg: msg.into() });
        }
        if !self.value_is_real && self.value.len() > info.width as usize {
            return Err(Error::MalformedChange {
                line,
                msg: format!(
                    "{} bits for {}-bit variable {:?}",
                    self.value.len(),
                    info.width,
                    String::from_utf8_lossy(&self.id)
                ),
            });
        }
        if !self.time_seen {
            self.time_seen = true;
            self.stashed = Some(idx);
            return Ok(Some(EventRef::Timestamp(0)));
        }
        Ok(Some(self.current_change(idx)))
    }

    fn current_change(&self, idx: usize) -> EventRef<'_> {
        let value = if self.value_is_real {
            ValueRef::Real(&self.value)
        } else {
            ValueRef::Bits(&self.value)
        };
        EventRef::Change { id_index: idx, id_code: &self.id, value }
    }
}

fn parse_time(digits: &[u8]) -> Option<u64> {
    if digits.is_empty() || !digits.iter().all(u8::is_ascii_digit) {
        return None;
    }
    std::str::from_utf8(digits).ok()?.parse().ok()
}

fn parse_var(body: &[String], scopes: &[String], line: u64) -> Result<SignalDecl> {
    let malformed = |msg: String| Error::MalformedDeclaration { line, msg };
    let [kind, width, id_code, reference @ ..] = body else {
        return Err(malformed(format!("$var needs 4+ fields, got {}", body.len())));
    };
    if reference.is_empty() {
        return Err(malformed(format!("$var needs 4+ fields, got {}", body.len())));
    }
    let width: u32 = width
        .parse()
        .ok()
        .filter(|&w| w >= 1)
        .ok_or_else(|| malformed(format!("bad width {width:?}")))?;
    Ok(SignalDecl {
        id_code: id_code.clone(),
        reference: reference.join(" "),
        width,
        kind: VarKind::parse(kind),
        scope_path: scopes.to_vec(),
    })
}

impl<R: BufRead> Iterator for Parser<R> {
    type Item = Result<ChangeEvent>;

    /// Iterates body events. The header must already be parsed.
    fn next(&mut self) -> Option<Self::Item> {
        self.next_event().transpose()
    }
}
