//! Delimited-file loading and cell preprocessing.
//!
//! Files are read with the usual delimited-text conventions (double-quote
//! enclosure, doubled quotes as escape). Empty cells and the literal markers
//! `NA` and `null` (any case) are treated as missing. Invalid UTF-8 bytes are
//! replaced with U+FFFD rather than rejected.

use std::collections::HashMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// Default fraction of numeric cells at or above which a column is dropped
/// from discovery.
pub const DEFAULT_NUMERIC_EXCLUSION: f64 = 0.5;

/// One attribute of a dataset. Identity is `(dataset_name, attribute_name)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub dataset_name: String,
    pub attribute_name: String,
    pub cells: Vec<Option<String>>,
}

impl Column {
    pub fn new(
        dataset_name: impl Into<String>,
        attribute_name: impl Into<String>,
        cells: Vec<Option<String>>,
    ) -> Self {
        Column {
            dataset_name: dataset_name.into(),
            attribute_name: attribute_name.into(),
            cells,
        }
    }

    /// Builds a column from raw text, applying the missing-value markers.
    pub fn from_raw<S: AsRef<str>>(
        dataset_name: impl Into<String>,
        attribute_name: impl Into<String>,
        raw: &[S],
    ) -> Self {
        let cells = raw.iter().map(|s| normalize_missing(s.as_ref())).collect();
        Column::new(dataset_name, attribute_name, cells)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn non_missing(&self) -> impl Iterator<Item = &str> {
        self.cells.iter().filter_map(|c| c.as_deref())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub columns: Vec<Column>,
    pub row_count: usize,
}

impl Dataset {
    pub fn column(&self, attribute: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.attribute_name == attribute)
    }
}

/// Returns `None` for the missing-value markers, otherwise the cell text.
pub fn normalize_missing(raw: &str) -> Option<String> {
    let trimmed = raw.trim();
    if trimmed.is_empty()
        || trimmed.eq_ignore_ascii_case("na")
        || trimmed.eq_ignore_ascii_case("null")
    {
        None
    } else {
        Some(raw.to_string())
    }
}

/// Loads a delimited file. The dataset is named after the file stem.
pub fn load_dataset(path: impl AsRef<Path>, delimiter: u8, has_header: bool) -> Result<Dataset> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    parse_dataset(&name, &bytes, delimiter, has_header)
}

/// Parses delimited text held in memory.
pub fn parse_dataset(name: &str, bytes: &[u8], delimiter: u8, has_header: bool) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .flexible(true)
        .from_reader(bytes);

    let mut records = reader.byte_records();
    let first = match records.next() {
        Some(rec) => rec.map_err(|e| Error::Parse(e.to_string()))?,
        None => {
            return Err(Error::Parse(if has_header {
                "no header".to_string()
            } else {
                "no data rows".to_string()
            }))
        }
    };

    let width = first.len();
    let (header, mut columns): (Vec<String>, Vec<Vec<Option<String>>>) = if has_header {
        let names = first.iter().map(|f| lossy(f).trim().to_string()).collect();
        (names, vec![Vec::new(); width])
    } else {
        let names = (0..width).map(|i| format!("col_{i}")).collect();
        let cols = first.iter().map(|f| vec![normalize_missing(&lossy(f))]).collect();
        (names, cols)
    };

    for (i, rec) in records.enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        // 1-based line-ish row number counting the first record
        let row_number = i + 2;
        if rec.len() != width {
            return Err(Error::Parse(format!(
                "row {row_number}: expected {width} cells, found {}",
                rec.len()
            )));
        }
        for (col, field) in columns.iter_mut().zip(rec.iter()) {
            col.push(normalize_missing(&lossy(field)));
        }
    }

    let row_count = columns.first().map_or(0, Vec::len);
    let names = dedup_names(header);
    let columns = names
        .into_iter()
        .zip(columns)
        .map(|(attr, cells)| Column::new(name, attr, cells))
        .collect();
    Ok(Dataset { name: name.to_string(), columns, row_count })
}

fn lossy(field: &[u8]) -> String {
    String::from_utf8_lossy(field).into_owned()
}

/// Suffixes repeated header names with `_2`, `_3`, ... in order of appearance.
fn dedup_names(names: Vec<String>) -> Vec<String> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut taken: std::collections::HashSet<String> = names.iter().cloned().collect();
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        let count = seen.entry(name.clone()).or_insert(0);
        *count += 1;
        if *count == 1 {
            out.push(name);
            continue;
        }
        let mut n = *count;
        let mut candidate = format!("{name}_{n}");
        while taken.contains(&candidate) {
            n += 1;
            candidate = format!("{name}_{n}");
        }
        taken.insert(candidate.clone());
        out.push(candidate);
    }
    out
}

/// True when the cell is a plain number: optional sign, digits with at most
/// one decimal point, optional exponent.
pub fn is_numeric_cell(cell: &str) -> bool {
    let s = cell.trim();
    let s = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], Some(&s[pos + 1..])),
        None => (s, None),
    };
    let mut digits = 0;
    let mut dots = 0;
    for ch in mantissa.chars() {
        match ch {
            '0'..='9' => digits += 1,
            '.' => dots += 1,
            _ => return false,
        }
    }
    if digits == 0 || dots > 1 {
        return false;
    }
    match exponent {
        None => true,
        Some(exp) => {
            let exp = exp.strip_prefix(['+', '-']).unwrap_or(exp);
            !exp.is_empty() && exp.bytes().all(|b| b.is_ascii_digit())
        }
    }
}

/// Fraction of non-missing cells that are numeric; 0 for an all-missing column.
pub fn numeric_fraction(column: &Column) -> f64 {
    let (numeric, total) = column
        .non_missing()
        .fold((0usize, 0usize), |(n, t), c| (n + is_numeric_cell(c) as usize, t + 1));
    if total == 0 {
        0.0
    } else {
        numeric as f64 / total as f64
    }
}

/// Columns whose numeric-cell fraction is below `threshold`, in dataset order.
pub fn string_columns(dataset: &Dataset, threshold: f64) -> Vec<&Column> {
    dataset
        .columns
        .iter()
        .filter(|c| numeric_fraction(c) < threshold)
        .collect()
}

fn is_kept_symbol(ch: char) -> bool {
    matches!(ch, 'a'..='z' | '0'..='9' | '.' | '-' | '_' | '@' | ':' | '/')
}

/// Lowercases, strips accents and special symbols, and collapses whitespace.
/// Returns `None` when nothing is left.
pub fn preprocess_value(raw: &str) -> Option<String> {
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;
    let mut push = |ch: char, out: &mut String| {
        if ch.is_whitespace() {
            pending_space = !out.is_empty();
        } else if is_kept_symbol(ch) {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.push(ch);
        }
    };
    if raw.is_ascii() {
        for ch in raw.chars() {
            push(ch.to_ascii_lowercase(), &mut out);
        }
    } else {
        for ch in raw.chars().flat_map(char::to_lowercase).nfd() {
            if !is_combining_mark(ch) {
                push(ch, &mut out);
            }
        }
    }
    if out.is_empty() {
        None
    } else {
        Some(out)
    }
}

/// Applies [`preprocess_value`] to every non-missing cell.
pub fn preprocess(column: &Column) -> Column {
    Column {
        dataset_name: column.dataset_name.clone(),
        attribute_name: column.attribute_name.clone(),
        cells: column
            .cells
            .iter()
            .map(|c| c.as_deref().and_then(preprocess_value))
            .collect(),
    }
}
