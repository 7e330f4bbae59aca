//! MBox archive splitting (RFC 4155).
//!
//! An archive is a sequence of messages, each introduced by a `From ` line
//! at the start of a line. Lines inside bodies that would collide are
//! `>From `-escaped by the delivering agent, so every unescaped `From ` line
//! is a separator and nothing else is.

use crate::error::{Error, Result};

/// One raw message slice out of an archive, still undecoded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawMessage {
    /// Byte index of the first header byte (just past the separator line).
    pub source_offset: usize,
    /// Header bytes, including the blank line that terminates the header.
    pub header_block: Vec<u8>,
    /// Body bytes up to the next separator (or end of archive).
    pub body_block: Vec<u8>,
}

impl RawMessage {
    /// The full byte span of this message within the archive.
    pub fn len(&self) -> usize {
        self.header_block.len() + self.body_block.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn is_separator_at(data: &[u8], pos: usize) -> bool {
    (pos == 0 || data[pos - 1] == b'\n') && data[pos..].starts_with(b"From ")
}

/// Split an archive into raw messages, one per `From ` separator line.
///
/// `>From ` escaped lines never split. Non-empty input with no separator at
/// all is rejected as not-an-mbox.
pub fn parse_mbox(data: &[u8]) -> Result<Vec<RawMessage>> {
    if data.is_empty() {
        return Ok(Vec::new());
    }

    // Collect the start offset of every separator line.
    let mut separators = Vec::new();
    let mut pos = 0;
    while pos < data.len() {
        if is_separator_at(data, pos) {
            separators.push(pos);
        }
        match data[pos..].iter().position(|&b| b == b'\n') {
            Some(nl) => pos += nl + 1,
            None => break,
        }
    }

    if separators.is_empty() {
        return Err(Error::MboxFormat {
            offset: 0,
            reason: "no 'From ' separator line found in non-empty input".into(),
        });
    }

    let mut records = Vec::with_capacity(separators.len());
    for (i, &sep) in separators.iter().enumerate() {
        // Content starts after the separator line's newline.
        let content_start = match data[sep..].iter().position(|&b| b == b'\n') {
            Some(nl) => sep + nl + 1,
            None => data.len(), // separator is the final, unterminated line
        };
        let content_end = separators.get(i + 1).copied().unwrap_or(data.len());
        let content = &data[content_start..content_end];

        let body_start = find_body_start(content);
        records.push(RawMessage {
            source_offset: content_start,
            header_block: content[..body_start].to_vec(),
            body_block: content[body_start..].to_vec(),
        });
    }
    Ok(records)
}

/// Index of the first body byte: just past the blank line that ends the
/// header block. Headers without a blank line own the whole span.
fn find_body_start(content: &[u8]) -> usize {
    let mut pos = 0;
    while pos < content.len() {
        let line_end = content[pos..]
            .iter()
            .position(|&b| b == b'\n')
            .map(|nl| pos + nl + 1)
            .unwrap_or(content.len());
        let line = &content[pos..line_end];
        if line == b"\n" || line == b"\r\n" || line.is_empty() {
            return line_end;
        }
        pos = line_end;
    }
    content.len()
}

/// Undo mboxo `>From ` escaping at line starts (one level of `>` removed).
pub fn unescape_from_lines(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim_start_matches('>');
        if trimmed.starts_with("From ") && line.starts_with('>') {
            out.push_str(&line[1..]);
        } else {
            out.push_str(line);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const THREE: &[u8] = b"From a@x Mon Jan  1 00:00:00 2001\nFrom: a@x\n\nbody one\nFrom b@x Mon Jan  1 00:00:01 2001\nFrom: b@x\n\nbody two\nFrom c@x Mon Jan  1 00:00:02 2001\nFrom: c@x\n\nbody three\n";

    #[test]
    fn empty_stream_yields_empty_list() {
        assert!(parse_mbox(b"").unwrap().is_empty());
    }

    #[test]
    fn three_separators_yield_three_records() {
        // Oracle: count the separator lines in the fixture by hand.
        let seps = THREE
            .split(|&b| b == b'\n')
            .filter(|l| l.starts_with(b"From "))
            .count();
        assert_eq!(seps, 3);
        let records = parse_mbox(THREE).unwrap();
        assert_eq!(records.len(), seps);
        assert_eq!(records[1].header_block, b"From: b@x\n\n");
        assert_eq!(records[1].body_block, b"body two\n");
    }

    #[test]
    fn escaped_from_line_does_not_split() {
        let data = b"From a@x Mon Jan  1 00:00:00 2001\nFrom: a@x\n\n>From here on everything is quoted\nstill body\n";
        let records = parse_mbox(data).unwrap();
        assert_eq!(records.len(), 1);
        assert!(records[0]
            .body_block
            .starts_with(b">From here on everything is quoted"));
    }

    #[test]
    fn no_separator_in_nonempty_input_is_a_format_error() {
        let err = parse_mbox(b"this is not an mbox\n").unwrap_err();
        match err {
            Error::MboxFormat { offset, .. } => assert_eq!(offset, 0),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn byte_ranges_reconstruct_the_archive_minus_separators() {
        let records = parse_mbox(THREE).unwrap();
        // Interleave independently-scanned separator lines with the record
        // spans; the result must be the original archive byte-for-byte.
        let mut rebuilt = Vec::new();
        let mut pos = 0;
        for r in &records {
            rebuilt.extend_from_slice(&THREE[pos..r.source_offset]); // separator line
            rebuilt.extend_from_slice(&r.header_block);
            rebuilt.extend_from_slice(&r.body_block);
            pos = r.source_offset + r.len();
        }
        assert_eq!(rebuilt, THREE);
    }

    #[test]
    fn headers_without_blank_line_own_the_whole_span() {
        let data = b"From a@x Mon Jan  1 00:00:00 2001\nFrom: a@x\nSubject: s\n";
        let records = parse_mbox(data).unwrap();
        assert_eq!(records[0].header_block, b"From: a@x\nSubject: s\n");
        assert!(records[0].body_block.is_empty());
    }

    #[test]
    fn unescape_strips_one_level() {
        assert_eq!(unescape_from_lines(">From x\n"), "From x\n");
        assert_eq!(unescape_from_lines(">>From x\n"), ">From x\n");
        assert_eq!(unescape_from_lines("> quoted reply\n"), "> quoted reply\n");
    }
}
