//! Byte-level decoding: charsets, transfer encodings, RFC 2047 encoded
//! words, and HTML tag stripping.
//!
//! Decoding never fails: invalid input falls back lossily (the archives the
//! toolkit targets are full of clients that "messed up" their headers), and
//! every byte sequence decodes under the ISO-8859-1 fallback.

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;

/// Decode `bytes` according to a declared charset name, or with the default
/// fallback chain (strict UTF-8, then ISO-8859-1) when none was declared.
pub fn decode_charset(bytes: &[u8], charset: Option<&str>) -> String {
    match charset.map(|c| c.trim().to_ascii_lowercase()) {
        Some(name) => match name.as_str() {
            "utf-8" | "utf8" => String::from_utf8_lossy(bytes).into_owned(),
            "us-ascii" | "ascii" => bytes
                .iter()
                .map(|&b| if b < 0x80 { b as char } else { '\u{FFFD}' })
                .collect(),
            "iso-8859-1" | "iso8859-1" | "latin1" | "latin-1" | "iso-8859-15" => latin1(bytes),
            "windows-1252" | "cp1252" => windows1252(bytes),
            // Unknown charset: same fallback chain as undeclared.
            _ => decode_charset(bytes, None),
        },
        None => match std::str::from_utf8(bytes) {
            Ok(s) => s.to_string(),
            Err(_) => latin1(bytes),
        },
    }
}

fn latin1(bytes: &[u8]) -> String {
    bytes.iter().map(|&b| b as char).collect()
}

fn windows1252(bytes: &[u8]) -> String {
    bytes
        .iter()
        .map(|&b| match b {
            // 0x80..0x9F block where cp1252 deviates from latin1.
            0x80 => '€',
            0x82 => '‚',
            0x83 => 'ƒ',
            0x84 => '„',
            0x85 => '…',
            0x86 => '†',
            0x87 => '‡',
            0x88 => 'ˆ',
            0x89 => '‰',
            0x8A => 'Š',
            0x8B => '‹',
            0x8C => 'Œ',
            0x8E => 'Ž',
            0x91 => '‘',
            0x92 => '’',
            0x93 => '“',
            0x94 => '”',
            0x95 => '•',
            0x96 => '–',
            0x97 => '—',
            0x98 => '˜',
            0x99 => '™',
            0x9A => 'š',
            0x9B => '›',
            0x9C => 'œ',
            0x9E => 'ž',
            0x9F => 'Ÿ',
            other => other as char,
        })
        .collect()
}

/// Quoted-printable, body variant (soft line breaks, `=XX` escapes).
/// Invalid escapes pass through literally.
pub fn decode_quoted_printable(input: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(input.len());
    let mut i = 0;
    while i < input.len() {
        let b = input[i];
        if b == b'=' {
            if input[i + 1..].starts_with(b"\r\n") {
                i += 3; // soft break
                continue;
            }
            if input[i + 1..].starts_with(b"\n") {
                i += 2;
                continue;
            }
            if i + 2 < input.len() {
                if let (Some(h), Some(l)) = (hex_val(input[i + 1]), hex_val(input[i + 2])) {
                    out.push(h * 16 + l);
                    i += 3;
                    continue;
                }
            }
        }
        out.push(b);
        i += 1;
    }
    out
}

/// Quoted-printable, RFC 2047 "Q" variant: underscores are spaces.
fn decode_q_encoding(input: &[u8]) -> Vec<u8> {
    let mapped: Vec<u8> = input
        .iter()
        .map(|&b| if b == b'_' { b' ' } else { b })
        .collect();
    decode_quoted_printable(&mapped)
}

fn hex_val(b: u8) -> Option<u8> {
    match b {
        b'0'..=b'9' => Some(b - b'0'),
        b'a'..=b'f' => Some(b - b'a' + 10),
        b'A'..=b'F' => Some(b - b'A' + 10),
        _ => None,
    }
}

/// Base64 with whitespace tolerated; `None` when the payload is not base64.
pub fn decode_base64(input: &[u8]) -> Option<Vec<u8>> {
    let cleaned: Vec<u8> = input
        .iter()
        .copied()
        .filter(|b| !b.is_ascii_whitespace())
        .collect();
    BASE64.decode(&cleaned).ok()
}

/// Decode every RFC 2047 encoded word in a header value.
///
/// Whitespace between two adjacent encoded words is dropped, as the RFC
/// requires; everything else is kept verbatim.
pub fn decode_rfc2047(header: &str) -> String {
    let mut out = String::new();
    let mut rest = header;
    let mut last_was_encoded = false;
    while let Some(start) = rest.find("=?") {
        let before = &rest[..start];
        if !(last_was_encoded && before.chars().all(char::is_whitespace)) {
            out.push_str(before);
        }
        match parse_encoded_word(&rest[start..]) {
            Some((decoded, consumed)) => {
                out.push_str(&decoded);
                rest = &rest[start + consumed..];
                last_was_encoded = true;
            }
            None => {
                out.push_str("=?");
                rest = &rest[start + 2..];
                last_was_encoded = false;
            }
        }
    }
    out.push_str(rest);
    out
}

/// Parse one `=?charset?enc?payload?=` token at the start of `s`.
/// Returns the decoded text and the number of bytes consumed.
fn parse_encoded_word(s: &str) -> Option<(String, usize)> {
    let inner = s.strip_prefix("=?")?;
    let q1 = inner.find('?')?;
    let charset = &inner[..q1];
    let rest = &inner[q1 + 1..];
    let q2 = rest.find('?')?;
    let encoding = &rest[..q2];
    let payload_and_tail = &rest[q2 + 1..];
    let end = payload_and_tail.find("?=")?;
    let payload = &payload_and_tail[..end];
    // RFC 2231 language suffix: "utf-8*en"
    let charset = charset.split('*').next().unwrap_or(charset);

    let bytes = match encoding.to_ascii_lowercase().as_str() {
        "b" => decode_base64(payload.as_bytes())?,
        "q" => decode_q_encoding(payload.as_bytes()),
        _ => return None,
    };
    let consumed = 2 + q1 + 1 + q2 + 1 + end + 2;
    Some((decode_charset(&bytes, Some(charset)), consumed))
}

/// Remove HTML tags and decode character entities. No layout, no rendering:
/// the output is only meant for human inspection of message bodies.
pub fn strip_html(html: &str) -> String {
    let mut out = String::with_capacity(html.len());
    let mut chars = html.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        match c {
            '<' => {
                // Skip to the closing '>'; unterminated tags swallow the rest.
                for (_, t) in chars.by_ref() {
                    if t == '>' {
                        break;
                    }
                }
            }
            '&' => {
                let rest = &html[i..];
                if let Some((entity, len)) = decode_entity(rest) {
                    out.push_str(&entity);
                    for _ in 0..len - 1 {
                        chars.next();
                    }
                } else {
                    out.push('&');
                }
            }
            _ => out.push(c),
        }
    }
    out
}

fn decode_entity(s: &str) -> Option<(String, usize)> {
    // Byte search: ';' is ASCII, so the position is always a char boundary.
    let semi = s.as_bytes()[..s.len().min(12)]
        .iter()
        .position(|&b| b == b';')?;
    let name = &s[1..semi];
    let text = match name {
        "amp" => "&".to_string(),
        "lt" => "<".to_string(),
        "gt" => ">".to_string(),
        "quot" => "\"".to_string(),
        "apos" => "'".to_string(),
        "nbsp" => " ".to_string(),
        _ if name.starts_with("#x") || name.starts_with("#X") => {
            let code = u32::from_str_radix(&name[2..], 16).ok()?;
            char::from_u32(code)?.to_string()
        }
        _ if name.starts_with('#') => {
            let code: u32 = name[1..].parse().ok()?;
            char::from_u32(code)?.to_string()
        }
        _ => return None,
    };
    Some((text, semi + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rfc2047_q_utf8() {
        // Oracle: Q-decoding "J=C3=BCrgen" gives bytes 4A C3 BC 72 67 65 6E,
        // which is UTF-8 for "Jürgen".
        assert_eq!(decode_rfc2047("=?utf-8?Q?J=C3=BCrgen?="), "Jürgen");
    }

    #[test]
    fn rfc2047_b_and_adjacent_word_whitespace() {
        // "SGVsbG8=" is base64 for "Hello".
        assert_eq!(
            decode_rfc2047("=?utf-8?B?SGVsbG8=?= =?utf-8?Q?World?="),
            "HelloWorld"
        );
        assert_eq!(decode_rfc2047("plain =?utf-8?Q?mix?= end"), "plain mix end");
    }

    #[test]
    fn rfc2047_latin1_and_invalid_tokens() {
        assert_eq!(decode_rfc2047("=?iso-8859-1?Q?caf=E9?="), "café");
        // Malformed word is kept verbatim.
        assert_eq!(decode_rfc2047("=?broken"), "=?broken");
    }

    #[test]
    fn quoted_printable_soft_breaks_and_escapes() {
        assert_eq!(decode_quoted_printable(b"a=20b"), b"a b");
        assert_eq!(decode_quoted_printable(b"line=\r\ncont"), b"linecont");
        assert_eq!(decode_quoted_printable(b"line=\ncont"), b"linecont");
        assert_eq!(decode_quoted_printable(b"bad =zz"), b"bad =zz");
    }

    #[test]
    fn charset_fallback_never_fails() {
        // 0xE9 is not valid UTF-8 on its own; the fallback reads it as latin1.
        assert_eq!(decode_charset(b"caf\xE9", None), "café");
        assert_eq!(decode_charset("café".as_bytes(), None), "café");
        assert_eq!(decode_charset(b"\x93quoted\x94", Some("windows-1252")), "“quoted”");
    }

    #[test]
    fn html_strip_removes_tags_and_decodes_entities() {
        assert_eq!(
            strip_html("<p>Hello <b>world</b> &amp; more&#33;</p>"),
            "Hello world & more!"
        );
        assert_eq!(strip_html("a &unknown; b"), "a &unknown; b");
        // An unterminated '<' swallows the remainder, by design.
        assert_eq!(strip_html("x <unclosed"), "x ");
        assert_eq!(strip_html("escaped: &lt;tag&gt;"), "escaped: <tag>");
    }
}
