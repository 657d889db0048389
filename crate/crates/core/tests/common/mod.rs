//! Seeded synthetic repositories for integration and acceptance tests.
//!
//! Each domain owns a universe of distinct values whose position is its
//! popularity. Columns draw values by Zipf-weighted sampling without
//! replacement, so columns of the same domain share their popular values and
//! larger columns tend to contain smaller ones.
#![allow(dead_code)]

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use joinscout::tabular::preprocess_value;
use joinscout::{Column, Dataset};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn toy_tables() -> Vec<PathBuf> {
    ["happiness", "population", "stores", "expectancy"]
        .iter()
        .map(|n| fixture_dir().join(format!("{n}.csv")))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Person,
    City,
    Email,
    Code,
    Url,
    Phrase,
    Username,
    Ip,
    Phone,
    Date,
    Category,
    CountryCode,
}

pub const KINDS: [Kind; 12] = [
    Kind::Person,
    Kind::City,
    Kind::Email,
    Kind::Code,
    Kind::Url,
    Kind::Phrase,
    Kind::Username,
    Kind::Ip,
    Kind::Phone,
    Kind::Date,
    Kind::Category,
    Kind::CountryCode,
];

const SYLLABLES: [&[&str]; 2] = [
    &["ka", "lo", "mi", "ren", "sa", "to", "vi", "nel", "dor", "pa", "qui", "ber", "ton", "li", "mar", "fa"],
    &["zu", "gro", "wen", "hal", "ix", "yor", "bun", "tep", "cra", "oss", "fli", "dra", "mog", "ush", "kel", "vro"],
];

impl Kind {
    fn synonyms(self) -> &'static [&'static str] {
        match self {
            Kind::Person => &["name", "full_name", "person", "author", "employee"],
            Kind::City => &["city", "town", "location", "municipality"],
            Kind::Email => &["email", "mail", "contact_email", "e_mail"],
            Kind::Code => &["code", "product_code", "sku", "item"],
            Kind::Url => &["url", "website", "homepage", "link"],
            Kind::Phrase => &["description", "title", "comment", "summary"],
            Kind::Username => &["username", "user", "login", "handle"],
            Kind::Ip => &["ip", "address", "host", "ip_address"],
            Kind::Phone => &["phone", "telephone", "mobile", "contact"],
            Kind::Date => &["date", "day", "created", "timestamp"],
            Kind::Category => &["category", "genre", "type", "segment"],
            Kind::CountryCode => &["country", "country_code", "nation", "iso"],
        }
    }

    fn universe_size(self) -> usize {
        match self {
            Kind::Category => 60,
            Kind::CountryCode => 400,
            _ => 1500,
        }
    }

    fn value(self, variant: usize, rng: &mut ChaCha8Rng) -> String {
        let syl = SYLLABLES[variant % 2];
        let word = |n: usize, rng: &mut ChaCha8Rng| -> String {
            (0..n).map(|_| *syl.choose(rng).unwrap()).collect()
        };
        fn cap(s: String) -> String {
            let mut c = s.chars();
            c.next().map(|f| f.to_uppercase().collect::<String>() + c.as_str()).unwrap_or_default()
        }
        match self {
            Kind::Person => format!("{} {}", cap(word(2, rng)), cap(word(rng.gen_range(2..4), rng))),
            Kind::City => {
                if rng.gen_bool(0.7) {
                    cap(word(rng.gen_range(2..4), rng))
                } else {
                    format!("{} {}", cap(word(2, rng)), cap(word(2, rng)))
                }
            }
            Kind::Email => {
                let host = ["mail", "post", "inbox", "corp"][variant * 2 + rng.gen_range(0..2)];
                format!("{}.{}@{host}.com", word(2, rng), word(2, rng))
            }
            Kind::Code => {
                let letters: &[u8] = if variant == 0 { b"ABCDEFGH" } else { b"PQRSTUVW" };
                let l = |rng: &mut ChaCha8Rng| *letters.choose(rng).unwrap() as char;
                format!("{}{}-{:0w$}", l(rng), l(rng), rng.gen_range(0..10_000), w = 4 + variant)
            }
            Kind::Url => {
                let tld = ["com", "org"][variant];
                format!("https://www.{}.{tld}/{}", word(2, rng), word(2, rng))
            }
            Kind::Phrase => (0..rng.gen_range(4..7)).map(|_| word(2, rng)).collect::<Vec<_>>().join(" "),
            Kind::Username => format!("{}_{}", word(2, rng), rng.gen_range(10..100)),
            Kind::Ip => {
                let head = ["10.20", "172.16"][variant];
                format!("{head}.{}.{}", rng.gen_range(0..256), rng.gen_range(1..255))
            }
            Kind::Phone => {
                let cc = ["+34", "+1"][variant];
                format!("{cc} {} {} {}", rng.gen_range(600..700), rng.gen_range(100..1000), rng.gen_range(100..1000))
            }
            Kind::Date => {
                let year = [1990, 2010][variant] + rng.gen_range(0..20);
                format!("{year}-{:02}-{:02}", rng.gen_range(1..13), rng.gen_range(1..29))
            }
            Kind::Category => cap(word(rng.gen_range(2..4), rng)),
            Kind::CountryCode => {
                let n = 2 + variant;
                (0..n).map(|_| rng.gen_range(b'A'..=b'Z') as char).collect()
            }
        }
    }
}

/// A value universe ordered by popularity.
#[derive(Debug, Clone)]
pub struct Domain {
    pub kind: Kind,
    pub variant: usize,
    pub universe: Vec<String>,
}

impl Domain {
    pub fn new(kind: Kind, variant: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let target = kind.universe_size();
        let mut seen = HashSet::new();
        let mut universe = Vec::with_capacity(target);
        let mut attempts = 0;
        while universe.len() < target && attempts < target * 50 {
            attempts += 1;
            let v = kind.value(variant, &mut rng);
            if let Some(key) = preprocess_value(&v) {
                if seen.insert(key) {
                    universe.push(v);
                }
            }
        }
        Domain { kind, variant, universe }
    }

    pub fn column_name(&self, rng: &mut ChaCha8Rng) -> String {
        self.kind.synonyms().choose(rng).unwrap().to_string()
    }

    /// `n` distinct universe indices drawn without replacement with weight
    /// `1 / (rank + 1)^skew`.
    pub fn sample(&self, n: usize, skew: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let n = n.min(self.universe.len());
        let mut keyed: Vec<(f64, usize)> = (0..self.universe.len())
            .map(|i| {
                let w = 1.0 / ((i + 1) as f64).powf(skew);
                let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                (u.ln() / w, i)
            })
            .collect();
        keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut idx: Vec<usize> = keyed.into_iter().take(n).map(|(_, i)| i).collect();
        idx.sort_unstable();
        idx
    }
}

/// All 24 domains: every kind in two variants with disjoint vocabularies.
pub fn domains(seed: u64) -> Vec<Domain> {
    KINDS
        .iter()
        .enumerate()
        .flat_map(|(k, kind)| (0..2).map(move |v| Domain::new(*kind, v, seed * 1000 + (k * 2 + v) as u64)))
        .collect()
}

/// Fills `rows` cells with every chosen value once and the remainder as
/// popularity-weighted repeats, then blanks a fraction of cells.
pub fn cells_for(domain: &Domain, chosen: &[usize], rows: usize, missing: f64, rng: &mut ChaCha8Rng) -> Vec<Option<String>> {
    assert!(!chosen.is_empty());
    let rows = rows.max(chosen.len());
    let weights: Vec<f64> = chosen.iter().map(|&i| 1.0 / (i + 1) as f64).collect();
    let dist = rand::distributions::WeightedIndex::new(&weights).unwrap();
    let mut cells: Vec<Option<String>> = chosen.iter().map(|&i| Some(domain.universe[i].clone())).collect();
    while cells.len() < rows {
        cells.push(Some(domain.universe[chosen[rng.sample(&dist)]].clone()));
    }
    cells.shuffle(rng);
    // keep at least one occurrence of each value visible
    let mut kept = HashSet::new();
    for c in cells.iter_mut() {
        let v = c.clone().unwrap();
        if !kept.insert(v) && rng.gen_bool(missing) {
            *c = None;
        }
    }
    cells
}

fn numeric_cells(rows: usize, rng: &mut ChaCha8Rng) -> Vec<Option<String>> {
    (0..rows).map(|_| Some(format!("{:.2}", rng.gen_range(0.0..1000.0)))).collect()
}

fn unique_name(name: String, used: &mut HashSet<String>) -> String {
    let mut candidate = name.clone();
    let mut i = 2;
    while !used.insert(candidate.clone()) {
        candidate = format!("{name}_{i}");
        i += 1;
    }
    candidate
}

/// Values of `base` with a `swap` fraction replaced by other universe values.
pub fn perturb(domain: &Domain, base: &[usize], swap: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let taken: HashSet<usize> = base.iter().copied().collect();
    let mut free: Vec<usize> = (0..domain.universe.len()).filter(|i| !taken.contains(i)).collect();
    free.shuffle(rng);
    let mut out = base.to_vec();
    let swaps = ((base.len() as f64) * swap).round() as usize;
    let mut positions: Vec<usize> = (0..out.len()).collect();
    positions.shuffle(rng);
    for (p, replacement) in positions.into_iter().take(swaps).zip(free) {
        out[p] = replacement;
    }
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, Copy)]
pub struct CorpusConfig {
    pub datasets: usize,
    pub seed: u64,
    /// Chance that a string column is a perturbed copy of an earlier column of
    /// the same domain rather than a fresh sample.
    pub copy_rate: f64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig { datasets: 64, seed: 1, copy_rate: 0.3 }
    }
}

/// Repository of datasets with 2 to 6 string columns and one or two numeric
/// columns each.
pub fn corpus(config: &CorpusConfig) -> Vec<Dataset> {
    let domains = domains(config.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);
    let mut history: Vec<Vec<Vec<usize>>> = vec![Vec::new(); domains.len()];
    let mut out = Vec::with_capacity(config.datasets);
    for d in 0..config.datasets {
        let name = format!("ds{d:03}");
        let rows = (10f64.powf(rng.gen_range(1.8..2.9))) as usize;
        let width = rng.gen_range(2..=6);
        let mut picked: Vec<usize> = (0..domains.len()).collect();
        picked.shuffle(&mut rng);
        let mut used = HashSet::new();
        let mut columns = Vec::new();
        for &di in picked.iter().take(width) {
            let dom = &domains[di];
            let roll: f64 = rng.gen_range(0.0..1.0);
            let chosen = match history[di].choose(&mut rng) {
                Some(prev) if roll < config.copy_rate => {
                    let swap = rng.gen_range(0.0..0.5);
                    perturb(dom, prev, swap, &mut rng)
                }
                _ => {
                    let frac = 10f64.powf(rng.gen_range(-1.7..0.0));
                    let n = ((rows as f64 * frac) as usize).clamp(3, dom.universe.len());
                    dom.sample(n, rng.gen_range(0.5..1.2), &mut rng)
                }
            };
            history[di].push(chosen.clone());
            let cells = cells_for(dom, &chosen, rows, rng.gen_range(0.0..0.1), &mut rng);
            let col_name = unique_name(dom.column_name(&mut rng), &mut used);
            columns.push(Column::new(&name, col_name, cells));
        }
        let row_count = columns.iter().map(Column::len).max().unwrap();
        for c in columns.iter_mut() {
            c.cells.resize(row_count, None);
        }
        for j in 0..rng.gen_range(1..=2) {
            let col_name = unique_name(["amount", "score", "count"][j].to_string(), &mut used);
            columns.push(Column::new(&name, col_name, numeric_cells(row_count, &mut rng)));
        }
        out.push(Dataset { name, columns, row_count });
    }
    out
}

/// Discovery benchmark: `queries` query columns from distinct domains, each
/// with `positives` near-copies (10% of values swapped) in their own datasets
/// plus same-domain low-cardinality decoys and unrelated filler columns.
pub struct Benchmark {
    pub datasets: Vec<Dataset>,
    /// `(dataset, attribute)` of each query column.
    pub queries: Vec<(String, String)>,
}

pub fn discovery_benchmark(queries: usize, positives: usize, seed: u64) -> Benchmark {
    let domains = domains(seed);
    assert!(queries <= domains.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xbe_4c);
    let mut order: Vec<usize> = (0..domains.len()).collect();
    order.shuffle(&mut rng);
    let (query_domains, filler_domains) = order.split_at(queries);
    let mut datasets = Vec::new();
    let mut query_ids = Vec::new();

    let filler = |name: &str, rows: usize, used: &mut HashSet<String>, rng: &mut ChaCha8Rng| -> Column {
        let dom = &domains[*filler_domains.choose(rng).unwrap()];
        let n = ((rows as f64 * rng.gen_range(0.2..1.0)) as usize).clamp(3, dom.universe.len());
        let chosen = dom.sample(n, 0.8, rng);
        let cells = cells_for(dom, &chosen, rows, 0.02, rng);
        Column::new(name, unique_name(dom.column_name(rng), used), cells)
    };

    for (qi, &di) in query_domains.iter().enumerate() {
        let dom = &domains[di];
        let n = rng.gen_range(120..300).min(dom.universe.len() * 3 / 4);
        let rows = n * 2;
        let base = dom.sample(n, 0.8, &mut rng);

        let qname = format!("q{qi:02}");
        let mut used = HashSet::new();
        let qcol = unique_name(dom.column_name(&mut rng), &mut used);
        let mut columns = vec![Column::new(&qname, &qcol, cells_for(dom, &base, rows, 0.02, &mut rng))];
        columns.push(filler(&qname, rows, &mut used, &mut rng));
        query_ids.push((qname.clone(), qcol));
        datasets.push(Dataset { name: qname, columns, row_count: rows });

        for p in 0..positives {
            let name = format!("q{qi:02}_match{p:02}");
            let mut used = HashSet::new();
            let values = perturb(dom, &base, 0.1, &mut rng);
            let rows = n * rng.gen_range(2..4);
            let col = unique_name(dom.column_name(&mut rng), &mut used);
            let mut columns = vec![Column::new(&name, col, cells_for(dom, &values, rows, 0.02, &mut rng))];
            columns.push(filler(&name, rows, &mut used, &mut rng));
            columns.push(Column::new(&name, "amount", numeric_cells(rows, &mut rng)));
            datasets.push(Dataset { name, columns, row_count: rows });
        }

        for x in 0..3 {
            let name = format!("q{qi:02}_decoy{x}");
            let mut used = HashSet::new();
            let small = ((n as f64) * rng.gen_range(0.05..0.2)) as usize;
            let values = dom.sample(small.max(3), 0.8, &mut rng);
            let rows = values.len() * 3;
            let col = unique_name(dom.column_name(&mut rng), &mut used);
            let mut columns = vec![Column::new(&name, col, cells_for(dom, &values, rows, 0.02, &mut rng))];
            columns.push(filler(&name, rows, &mut used, &mut rng));
            datasets.push(Dataset { name, columns, row_count: rows });
        }
    }
    Benchmark { datasets, queries: query_ids }
}

/// Writes datasets as CSV files under `dir` and returns their paths.
pub fn write_csvs(datasets: &[Dataset], dir: &Path) -> Vec<PathBuf> {
    datasets
        .iter()
        .map(|d| {
            let path = dir.join(format!("{}.csv", d.name));
            let mut w = csv::Writer::from_path(&path).unwrap();
            w.write_record(d.columns.iter().map(|c| c.attribute_name.as_str())).unwrap();
            for r in 0..d.row_count {
                w.write_record(d.columns.iter().map(|c| c.cells[r].as_deref().unwrap_or(""))).unwrap();
            }
            w.flush().unwrap();
            path
        })
        .collect()
}

/// A wide table of `rows` rows and `columns` string columns, cycling through
/// domains. Used for timing.
pub fn wide_table(name: &str, rows: usize, columns: usize, seed: u64) -> Dataset {
    let domains = domains(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used = HashSet::new();
    let cols = (0..columns)
        .map(|i| {
            let dom = &domains[i % domains.len()];
            let chosen = dom.sample(dom.universe.len() / 2, 0.8, &mut rng);
            let cells = cells_for(dom, &chosen, rows, 0.02, &mut rng);
            Column::new(name, unique_name(dom.column_name(&mut rng), &mut used), cells)
        })
        .collect();
    Dataset { name: name.to_string(), columns: cols, row_count: rows }
}
