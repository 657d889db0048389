//! Per-value syntactic type inference.
//!
//! The rules operate on preprocessed (lowercase) values and are applied in a
//! fixed order; the first match wins.
//!
//! Broad data type:
//!
//! | type              | rule                                                                 |
//! |-------------------|----------------------------------------------------------------------|
//! | `datetime`        | `yyyy-mm-dd` (optional `hh:mm[:ss]` suffix), `dd/mm/yyyy`, `hh:mm[:ss]` with optional am/pm, or `h am/pm` |
//! | `numeric`         | only digits, `.`, `+`, `-` with at least one digit                    |
//! | `alphabetic`      | only letters and whitespace                                          |
//! | `nonAlphanumeric` | no letters and no digits                                             |
//! | `alphanumeric`    | anything else (letters and/or digits mixed with other characters)    |
//!
//! Specific type, in this order:
//!
//! | type       | rule                                                                     |
//! |------------|--------------------------------------------------------------------------|
//! | `email`    | `^[\w.+-]+@[\w-]+\.[\w.]+$`                                              |
//! | `url`      | `^[a-z][a-z0-9+.-]*://\S+$` or `^www\.\S+$`                              |
//! | `ip`       | dotted quad, each octet 0-255                                            |
//! | `phone`    | `^\+?[0-9 ().-]+$` holding 7 to 15 digits                                |
//! | `username` | single token `^[a-z0-9._-]{3,}$` with at least one digit or `.`/`_`/`-`  |
//! | `phrases`  | at least 4 whitespace-separated words                                    |
//! | `other`    | none of the above                                                        |

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum DataType {
    Numeric,
    Alphabetic,
    Alphanumeric,
    NonAlphanumeric,
    Datetime,
}

impl DataType {
    pub const ALL: [DataType; 5] = [
        DataType::Numeric,
        DataType::Alphabetic,
        DataType::Alphanumeric,
        DataType::NonAlphanumeric,
        DataType::Datetime,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecificType {
    Phone,
    Email,
    Url,
    Ip,
    Username,
    Phrases,
    Other,
}

impl SpecificType {
    pub const ALL: [SpecificType; 7] = [
        SpecificType::Phone,
        SpecificType::Email,
        SpecificType::Url,
        SpecificType::Ip,
        SpecificType::Username,
        SpecificType::Phrases,
        SpecificType::Other,
    ];
}

pub const PHRASE_MIN_WORDS: usize = 4;

static DATETIME: LazyLock<Vec<Regex>> = LazyLock::new(|| {
    [
        r"^\d{4}-\d{1,2}-\d{1,2}(?:[t ]\d{1,2}:\d{2}(?::\d{2}(?:\.\d+)?)?z?)?$",
        r"^\d{1,2}/\d{1,2}/\d{4}$",
        r"^\d{1,2}:\d{2}(?::\d{2})?\s?(?:am|pm)?$",
        r"^\d{1,2}\s?(?:am|pm)$",
    ]
    .iter()
    .map(|p| Regex::new(&format!("(?i){p}")).expect("datetime pattern"))
    .collect()
});

static EMAIL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[\w.+-]+@[\w-]+\.[\w.]+$").expect("email pattern"));
static URL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(?:[a-z][a-z0-9+.-]*://\S+|www\.\S+)$").expect("url pattern")
});
static IP: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(\d{1,3})\.(\d{1,3})\.(\d{1,3})\.(\d{1,3})$").expect("ip pattern")
});
static PHONE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\+?[0-9 ().-]+$").expect("phone pattern"));
static USERNAME: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[a-z0-9._-]{3,}$").expect("username pattern"));

pub fn infer_data_type(value: &str) -> DataType {
    if DATETIME.iter().any(|re| re.is_match(value)) {
        return DataType::Datetime;
    }
    let mut letters = false;
    let mut digits = false;
    let mut other = false;
    let mut numeric_only = true;
    for ch in value.chars() {
        if ch.is_alphabetic() {
            letters = true;
            numeric_only = false;
        } else if ch.is_ascii_digit() {
            digits = true;
        } else if ch.is_whitespace() {
            numeric_only = false;
        } else {
            other = true;
            if !matches!(ch, '.' | '+' | '-') {
                numeric_only = false;
            }
        }
    }
    if digits && numeric_only {
        DataType::Numeric
    } else if letters && !digits && !other {
        DataType::Alphabetic
    } else if !letters && !digits {
        DataType::NonAlphanumeric
    } else {
        DataType::Alphanumeric
    }
}

pub fn infer_specific_type(value: &str) -> SpecificType {
    if EMAIL.is_match(value) {
        return SpecificType::Email;
    }
    if URL.is_match(value) {
        return SpecificType::Url;
    }
    if let Some(caps) = IP.captures(value) {
        let octets_ok = (1..=4).all(|i| caps[i].parse::<u16>().is_ok_and(|o| o <= 255));
        if octets_ok {
            return SpecificType::Ip;
        }
    }
    if PHONE.is_match(value) {
        let digits = value.bytes().filter(u8::is_ascii_digit).count();
        if (7..=15).contains(&digits) {
            return SpecificType::Phone;
        }
    }
    if USERNAME.is_match(value)
        && value
            .bytes()
            .any(|b| b.is_ascii_digit() || matches!(b, b'.' | b'_' | b'-'))
    {
        return SpecificType::Username;
    }
    if value.split_whitespace().count() >= PHRASE_MIN_WORDS {
        return SpecificType::Phrases;
    }
    SpecificType::Other
}
