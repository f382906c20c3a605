// SPDX-License-Identifier: Apache-2.0

use std::io::{self, BufRead};

/// Whitespace-delimited token reader over a forward-only byte stream.
///
/// Holds exactly one token at a time; the buffer is reused across calls so
/// its size tracks the longest token seen, never the document length.
pub(crate) struct Tokenizer<R> {
    reader: R,
    token: Vec<u8>,
    cursor_line: u64,
    token_line: u64,
}

impl<R: BufRead> Tokenizer<R> {
    pub(crate) fn new(reader: R) -> Self {
        Tokenizer {
            reader,
            token: Vec::with_capacity(64),
            cursor_line: 1,
            token_line: 1,
        }
    }

    /// Advance to the next token. Returns `false` at end of input.
    pub(crate) fn advance(&mut self) -> io::Result<bool> {
        self.token.clear();
        loop {
            let buf = match self.reader.fill_buf() {
                Ok(buf) => buf,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                Err(e) => return Err(e),
            };
            if buf.is_empty() {
                return Ok(false);
            }
            let mut skipped = 0;
            let mut newlines = 0;
            for &b in buf {
                if !b.is_ascii_whitespace() {
                    break;
                }
                if b == b'\n' {
                    newlines += 1;
                }
                skipped += 1;
            }
            let found = skipped < buf.len();
            self.reader.consume(skipped);
            self.cursor_line += newlines;
            if found {
                break;
            }
        }
        self.token_line = self.cursor_line;
        loop {
            let buf = match self.reader.fill_buf() {
                Ok(buf) => buf,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                Err(e) => return Err(e),
            };
            if buf.is_empty() {
                return Ok(true);
            }
            match buf.iter().position(|b| b.is_ascii_whitespace()) {
                Some(n) => {
                    self.token.extend_from_slice(&buf[..n]);
                    self.reader.consume(n);
                    return Ok(true);
                }
                None => {
                    let n = buf.len();
                    self.token.extend_from_slice(buf);
                    self.reader.consume(n);
                }
            }
        }
    }

    pub(crate) fn token(&self) -> &[u8] {
        &self.token
    }

    /// Line on which the current token starts (1-based).
    pub(crate) fn line(&self) -> u64 {
        self.token_line
    }

    pub(crate) fn buffer_capacity(&self) -> usize {
        self.token.capacity()
    }
}
