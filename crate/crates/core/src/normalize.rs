//! Raw message → normalized [`Message`] conversion, corpus-level
//! deduplication, and the per-month activity summary.

use std::collections::BTreeMap;
use std::collections::HashSet;

use chrono::{Datelike, TimeZone, Utc};
use sha2::{Digest, Sha256};

use crate::encoding::{decode_base64, decode_charset, decode_quoted_printable, strip_html};
use crate::headers::{parse_address, parse_date, parse_msg_id_list, HeaderMap};
use crate::mbox::{unescape_from_lines, RawMessage};
use crate::message::{normalize_subject, Message, Warning};

/// Convert one raw message into a normalized record.
///
/// Pure and deterministic: identical raw bytes always produce the identical
/// `Message`. Problems surface as warnings, never as dropped mail.
pub fn normalize_message(raw: &RawMessage) -> (Message, Vec<Warning>) {
    let mut warnings = Vec::new();
    let headers = HeaderMap::parse(&raw.header_block);

    let from_value = headers.get_decoded("from").unwrap_or_default();
    let addr = parse_address(&from_value);
    if addr.email == "unknown" {
        warnings.push(Warning::new(
            "sender",
            format!("offset:{}", raw.source_offset),
            format!("unusable From header: {from_value:?}"),
        ));
    }

    let (timestamp_utc, date_flagged) = match headers.get("date").and_then(parse_date) {
        Some(ts) => (ts, false),
        None => {
            warnings.push(Warning::new(
                "date",
                format!("offset:{}", raw.source_offset),
                format!(
                    "unparseable Date header {:?}; kept with sentinel timestamp 0",
                    headers.get("date").unwrap_or("")
                ),
            ));
            (0, true)
        }
    };

    let subject = headers.get_decoded("subject").unwrap_or_default();
    let normalized_subject = normalize_subject(&subject);

    let in_reply_to = headers
        .get("in-reply-to")
        .map(|v| parse_msg_id_list(v))
        .and_then(|ids| ids.into_iter().next());
    let references = headers
        .get("references")
        .map(|v| parse_msg_id_list(v))
        .unwrap_or_default();

    let body_text = extract_body(&headers, &raw.body_block);

    let msg_id = match headers.get("message-id").map(|v| parse_msg_id_list(v)) {
        Some(ids) if !ids.is_empty() => ids[0].clone(),
        _ => {
            let id = synthetic_id(&addr.email, timestamp_utc, &subject);
            warnings.push(Warning::new(
                "message-id",
                format!("offset:{}", raw.source_offset),
                format!("missing Message-ID; assigned {id}"),
            ));
            id
        }
    };

    let message = Message {
        msg_id,
        sender_name: addr.name,
        sender_email: addr.email,
        timestamp_utc,
        subject,
        normalized_subject,
        in_reply_to,
        references,
        body_text,
        date_flagged,
    };
    (message, warnings)
}

/// Deterministic replacement id for mail whose client dropped the
/// Message-ID. Derived only from stable fields so reruns agree.
fn synthetic_id(sender_email: &str, timestamp_utc: i64, subject: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(sender_email.as_bytes());
    hasher.update(b"\x00");
    hasher.update(timestamp_utc.to_be_bytes());
    hasher.update(b"\x00");
    hasher.update(Sha256::digest(subject.as_bytes()));
    let digest = hasher.finalize();
    let hex: String = digest[..12].iter().map(|b| format!("{b:02x}")).collect();
    format!("synthetic:{hex}")
}

/// Normalize a batch, preserving order. With the `parallel` feature the
/// per-message work fans out across a thread pool; order and results are
/// identical either way because `normalize_message` is pure.
pub fn normalize_batch(raws: &[RawMessage]) -> (Vec<Message>, Vec<Warning>) {
    #[cfg(feature = "parallel")]
    let per_message: Vec<(Message, Vec<Warning>)> = {
        use rayon::prelude::*;
        raws.par_iter().map(normalize_message).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_message: Vec<(Message, Vec<Warning>)> = raws.iter().map(normalize_message).collect();

    let mut messages = Vec::with_capacity(per_message.len());
    let mut warnings = Vec::new();
    for (m, w) in per_message {
        messages.push(m);
        warnings.extend(w);
    }
    (messages, warnings)
}

/// Drop repeated msg_ids, keeping the first occurrence. Duplicates are a
/// fact of life when archives overlap; each drop is logged.
pub fn dedup_messages(messages: Vec<Message>, warnings: &mut Vec<Warning>) -> Vec<Message> {
    let mut seen: HashSet<String> = HashSet::with_capacity(messages.len());
    let mut kept = Vec::with_capacity(messages.len());
    for m in messages {
        if seen.insert(m.msg_id.clone()) {
            kept.push(m);
        } else {
            warnings.push(Warning::new(
                "duplicate-id",
                m.msg_id.clone(),
                "duplicate Message-ID; later occurrence dropped",
            ));
        }
    }
    kept
}

// ---------------------------------------------------------------------------
// Body extraction
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct ContentType {
    mime_type: String,
    boundary: Option<String>,
    charset: Option<String>,
}

fn parse_content_type(value: Option<&str>) -> ContentType {
    let value = value.unwrap_or("text/plain");
    let mut parts = value.split(';');
    let mime_type = parts.next().unwrap_or("").trim().to_ascii_lowercase();
    let mut boundary = None;
    let mut charset = None;
    for param in parts {
        if let Some((k, v)) = param.split_once('=') {
            let v = v.trim().trim_matches('"').to_string();
            match k.trim().to_ascii_lowercase().as_str() {
                "boundary" => boundary = Some(v),
                "charset" => charset = Some(v),
                _ => {}
            }
        }
    }
    ContentType {
        mime_type: if mime_type.is_empty() {
            "text/plain".into()
        } else {
            mime_type
        },
        boundary,
        charset,
    }
}

/// Reduce a (possibly MIME multipart) body to plain text: the first
/// text/plain part wins; text/html is the fallback, with tags stripped;
/// attachments vanish.
fn extract_body(headers: &HeaderMap, body: &[u8]) -> String {
    let ct = parse_content_type(headers.get("content-type"));
    let cte = headers
        .get("content-transfer-encoding")
        .map(|v| v.trim().to_ascii_lowercase());
    match best_text_part(&ct, cte.as_deref(), body) {
        Some(TextPart::Plain(text)) => unescape_from_lines(&text).trim().to_string(),
        Some(TextPart::Html(html)) => unescape_from_lines(&strip_html(&html)).trim().to_string(),
        None => String::new(),
    }
}

enum TextPart {
    Plain(String),
    Html(String),
}

fn best_text_part(ct: &ContentType, cte: Option<&str>, body: &[u8]) -> Option<TextPart> {
    if ct.mime_type.starts_with("multipart/") {
        let boundary = ct.boundary.as_deref()?;
        let mut html_fallback = None;
        for part in split_multipart(body, boundary) {
            let body_start = part
                .windows(2)
                .position(|w| w == b"\n\n")
                .map(|p| p + 2)
                .or_else(|| part.windows(4).position(|w| w == b"\r\n\r\n").map(|p| p + 4))
                .unwrap_or(part.len());
            let part_headers = HeaderMap::parse(&part[..body_start.min(part.len())]);
            let part_ct = parse_content_type(part_headers.get("content-type"));
            let part_cte = part_headers
                .get("content-transfer-encoding")
                .map(|v| v.trim().to_ascii_lowercase());
            let part_body = &part[body_start.min(part.len())..];
            match best_text_part(&part_ct, part_cte.as_deref(), part_body) {
                Some(TextPart::Plain(t)) => return Some(TextPart::Plain(t)),
                Some(TextPart::Html(h)) if html_fallback.is_none() => {
                    html_fallback = Some(TextPart::Html(h));
                }
                _ => {}
            }
        }
        return html_fallback;
    }

    if ct.mime_type == "text/plain" || ct.mime_type == "text" {
        let bytes = decode_transfer(cte, body);
        return Some(TextPart::Plain(decode_charset(&bytes, ct.charset.as_deref())));
    }
    if ct.mime_type == "text/html" {
        let bytes = decode_transfer(cte, body);
        return Some(TextPart::Html(decode_charset(&bytes, ct.charset.as_deref())));
    }
    // Attachments and anything non-text are removed from the record.
    None
}

fn decode_transfer(cte: Option<&str>, body: &[u8]) -> Vec<u8> {
    match cte {
        Some("quoted-printable") => decode_quoted_printable(body),
        Some("base64") => decode_base64(body).unwrap_or_else(|| body.to_vec()),
        _ => body.to_vec(),
    }
}

fn split_multipart<'a>(body: &'a [u8], boundary: &str) -> Vec<&'a [u8]> {
    let delim = format!("--{boundary}");
    let delim_bytes = delim.as_bytes();
    let mut parts = Vec::new();
    let mut cursor = 0;
    let mut current_start: Option<usize> = None;
    while cursor < body.len() {
        let line_end = body[cursor..]
            .iter()
            .position(|&b| b == b'\n')
            .map(|p| cursor + p + 1)
            .unwrap_or(body.len());
        let line = &body[cursor..line_end];
        let trimmed: &[u8] = {
            let mut l = line;
            while let Some((&last, rest)) = l.split_last() {
                if last == b'\n' || last == b'\r' {
                    l = rest;
                } else {
                    break;
                }
            }
            l
        };
        if trimmed.starts_with(delim_bytes) {
            if let Some(start) = current_start {
                parts.push(&body[start..cursor]);
            }
            if trimmed == format!("--{boundary}--").as_bytes() {
                current_start = None;
            } else {
                current_start = Some(line_end);
            }
        }
        cursor = line_end;
    }
    if let Some(start) = current_start {
        parts.push(&body[start..]);
    }
    parts
}

// ---------------------------------------------------------------------------
// Monthly activity
// ---------------------------------------------------------------------------

/// Per-month message volume plus the summary figures reports quote.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlyCounts {
    /// (year, month) → messages, ordered chronologically.
    pub counts: BTreeMap<(i32, u32), u64>,
    /// Mean messages per *bucketed* month; absent for an empty corpus.
    pub mean: Option<f64>,
    /// The busiest month; earliest wins ties. Absent for an empty corpus.
    pub peak: Option<((i32, u32), u64)>,
}

/// Bucket messages by UTC calendar month.
pub fn monthly_counts(messages: &[Message]) -> MonthlyCounts {
    let mut counts: BTreeMap<(i32, u32), u64> = BTreeMap::new();
    for m in messages {
        let dt = Utc.timestamp_opt(m.timestamp_utc, 0).single().unwrap_or_else(|| {
            // timestamps are validated on ingest; clamp stragglers to epoch
            Utc.timestamp_opt(0, 0).single().unwrap()
        });
        *counts.entry((dt.year(), dt.month())).or_insert(0) += 1;
    }
    let mean = if counts.is_empty() {
        None
    } else {
        Some(messages.len() as f64 / counts.len() as f64)
    };
    // BTreeMap iteration is chronological, so `>` keeps the earliest peak.
    let peak = counts
        .iter()
        .fold(None, |best: Option<((i32, u32), u64)>, (&k, &v)| match best {
            Some((_, bv)) if bv >= v => best,
            _ => Some((k, v)),
        });
    MonthlyCounts { counts, mean, peak }
}
