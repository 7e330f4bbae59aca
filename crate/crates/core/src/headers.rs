//! Header-block parsing: unfolding, RFC 2047 decoding, address and date
//! extraction, message-id token lists.

use crate::encoding::{decode_charset, decode_rfc2047};
use chrono::DateTime;

/// A parsed header block: names case-folded, values unfolded but undecoded.
/// Repeated headers keep every occurrence in order.
#[derive(Debug, Default)]
pub struct HeaderMap {
    entries: Vec<(String, String)>,
}

impl HeaderMap {
    pub fn parse(block: &[u8]) -> HeaderMap {
        // Headers are almost always ASCII; the latin1 fallback keeps stray
        // raw bytes readable instead of erroring.
        let text = decode_charset(block, None);
        let mut entries: Vec<(String, String)> = Vec::new();
        for line in text.lines() {
            if line.is_empty() {
                break;
            }
            if (line.starts_with(' ') || line.starts_with('\t')) && !entries.is_empty() {
                // Continuation of the previous header.
                let last = entries.last_mut().unwrap();
                last.1.push(' ');
                last.1.push_str(line.trim());
                continue;
            }
            if let Some(colon) = line.find(':') {
                let name = line[..colon].trim().to_ascii_lowercase();
                let value = line[colon + 1..].trim().to_string();
                entries.push((name, value));
            }
            // Lines without a colon that are not continuations are junk;
            // skip them rather than aborting the whole message.
        }
        HeaderMap { entries }
    }

    /// First occurrence of a header, raw (undecoded) value.
    pub fn get(&self, name: &str) -> Option<&str> {
        let name = name.to_ascii_lowercase();
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| v.as_str())
    }

    /// First occurrence, RFC 2047 decoded.
    pub fn get_decoded(&self, name: &str) -> Option<String> {
        self.get(name).map(decode_rfc2047)
    }
}

/// A sender split out of a From header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Address {
    pub name: String,
    /// Lowercased. `unknown` when nothing address-shaped was found.
    pub email: String,
}

/// Parse the (already RFC 2047-decoded) value of a From header.
///
/// Handles `Name <a@b>`, `"Quoted, Name" <a@b>`, `a@b (Comment)`, and bare
/// addresses. Anything hopeless becomes name="", email="unknown".
pub fn parse_address(value: &str) -> Address {
    let value = value.trim();

    if let (Some(lt), Some(gt)) = (value.rfind('<'), value.rfind('>')) {
        if lt < gt {
            let email = value[lt + 1..gt].trim().to_lowercase();
            let name = clean_display_name(&value[..lt]);
            if !email.is_empty() {
                return Address { name, email };
            }
        }
    }

    // Comment style: addr (Display Name)
    if let (Some(open), Some(close)) = (value.find('('), value.rfind(')')) {
        if open < close {
            let email = value[..open].trim().to_lowercase();
            let name = clean_display_name(&value[open + 1..close]);
            if email.contains('@') {
                return Address { name, email };
            }
        }
    }

    if value.contains('@') && !value.contains(char::is_whitespace) {
        return Address {
            name: String::new(),
            email: value.to_lowercase(),
        };
    }

    Address {
        name: clean_display_name(value),
        email: "unknown".to_string(),
    }
}

fn clean_display_name(raw: &str) -> String {
    let trimmed = raw.trim().trim_matches('"').trim();
    trimmed.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parse a Date header into seconds since epoch, UTC.
///
/// chrono's RFC 2822 parser does the heavy lifting; the fallbacks cover the
/// ways real mail clients bend the grammar (trailing zone comments, missing
/// weekday, stray double spaces).
pub fn parse_date(value: &str) -> Option<i64> {
    let cleaned = strip_zone_comment(value);
    if let Ok(dt) = DateTime::parse_from_rfc2822(&cleaned) {
        return Some(dt.timestamp());
    }
    // Without the weekday prefix.
    if let Some(rest) = cleaned.split_once(',').map(|(_, r)| r.trim()) {
        if let Ok(dt) = DateTime::parse_from_rfc2822(rest) {
            return Some(dt.timestamp());
        }
    }
    // "-0000" means "offset unknown, time is UTC" and trips some parsers.
    if cleaned.ends_with("-0000") {
        let patched = format!("{}+0000", &cleaned[..cleaned.len() - 5]);
        if let Ok(dt) = DateTime::parse_from_rfc2822(&patched) {
            return Some(dt.timestamp());
        }
    }
    None
}

fn strip_zone_comment(value: &str) -> String {
    let mut s = value.trim().to_string();
    while let (Some(open), true) = (s.rfind('('), s.ends_with(')')) {
        s.truncate(open);
        s = s.trim_end().to_string();
    }
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Extract every `<...>` message-id token from a header value, in order.
/// Angle-bracket-less values are treated as a single id when non-empty.
pub fn parse_msg_id_list(value: &str) -> Vec<String> {
    let mut ids = Vec::new();
    let mut rest = value;
    while let Some(open) = rest.find('<') {
        match rest[open..].find('>') {
            Some(close) => {
                let id = rest[open + 1..open + close].trim();
                if !id.is_empty() {
                    ids.push(id.to_string());
                }
                rest = &rest[open + close + 1..];
            }
            None => break,
        }
    }
    if ids.is_empty() {
        let bare = value.trim();
        if !bare.is_empty() {
            ids.push(bare.to_string());
        }
    }
    ids
}
