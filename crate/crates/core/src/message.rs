use serde::{Deserialize, Serialize};

/// A normalized email message.
///
/// This is the record every later stage consumes: headers are decoded,
/// the timestamp is UTC, the body is plain text with attachments and HTML
/// markup removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    /// Globally unique id. Messages without a usable Message-ID header get a
    /// deterministic id prefixed `synthetic:`.
    pub msg_id: String,
    pub sender_name: String,
    /// Lowercased address; `unknown` when the From header was unusable.
    pub sender_email: String,
    /// Seconds since the Unix epoch, zone offset already applied.
    pub timestamp_utc: i64,
    pub subject: String,
    /// Subject with reply/forward prefixes stripped, case-folded and
    /// whitespace-collapsed. Used for thread grouping and topic matching.
    pub normalized_subject: String,
    pub in_reply_to: Option<String>,
    pub references: Vec<String>,
    pub body_text: String,
    /// True when the Date header could not be parsed; `timestamp_utc` is then
    /// the sentinel 0 and a warning was recorded.
    pub date_flagged: bool,
}

impl Message {
    pub fn is_synthetic_id(&self) -> bool {
        self.msg_id.starts_with("synthetic:")
    }

    /// Sort key used everywhere siblings or corpora need a stable order:
    /// timestamp first, synthetic ids after real ones on ties, then the id.
    pub fn order_key(&self) -> (i64, bool, &str) {
        (self.timestamp_utc, self.is_synthetic_id(), &self.msg_id)
    }
}

/// One entry in the cleaning audit log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    /// Which part of the pipeline raised it, e.g. `date`, `duplicate-id`,
    /// `thread-cycle`.
    pub kind: String,
    /// Message id or archive offset the warning refers to.
    pub context: String,
    pub detail: String,
}

impl Warning {
    pub fn new(kind: &str, context: impl Into<String>, detail: impl Into<String>) -> Self {
        Warning {
            kind: kind.to_string(),
            context: context.into(),
            detail: detail.into(),
        }
    }
}

/// Strip reply/forward prefixes ("re:", "fwd:", "fw:", "aw:"), iterating so
/// stacked prefixes like "Re: Re: x" reduce fully, then case-fold and
/// collapse whitespace.
pub fn normalize_subject(subject: &str) -> String {
    let mut s = subject.trim();
    loop {
        let lower = s.to_lowercase();
        let mut stripped = false;
        for prefix in ["re:", "fwd:", "fw:", "aw:"] {
            if lower.starts_with(prefix) {
                s = s[prefix.len()..].trim_start();
                stripped = true;
                break;
            }
        }
        if !stripped {
            break;
        }
    }
    let folded = s.to_lowercase();
    folded.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// True when the original subject carries a reply prefix. The jwz subject
/// grouping rules need this distinction even though normalized subjects have
/// the prefix removed.
pub fn is_reply_subject(subject: &str) -> bool {
    let lower = subject.trim_start().to_lowercase();
    ["re:", "fwd:", "fw:", "aw:"]
        .iter()
        .any(|p| lower.starts_with(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subject_prefixes_strip_iteratively() {
        assert_eq!(normalize_subject("Re: Re: parse translations"), "parse translations");
        assert_eq!(normalize_subject("FWD: Aw:  Hello  World"), "hello world");
        assert_eq!(normalize_subject("no prefix"), "no prefix");
        assert_eq!(normalize_subject("  Re:"), "");
    }

    #[test]
    fn reply_detection_uses_original_subject() {
        assert!(is_reply_subject("Re: beta topic"));
        assert!(is_reply_subject("  fw: beta"));
        assert!(!is_reply_subject("regarding beta"));
    }

    #[test]
    fn order_key_places_synthetic_last_on_ties() {
        let mut a = Message {
            msg_id: "real@x".into(),
            sender_name: String::new(),
            sender_email: "a@x".into(),
            timestamp_utc: 10,
            subject: String::new(),
            normalized_subject: String::new(),
            in_reply_to: None,
            references: vec![],
            body_text: String::new(),
            date_flagged: false,
        };
        let mut b = a.clone();
        b.msg_id = "synthetic:abc".into();
        assert!(a.order_key() < b.order_key());
        // but timestamp dominates
        a.timestamp_utc = 11;
        assert!(b.order_key() < a.order_key());
    }
}
