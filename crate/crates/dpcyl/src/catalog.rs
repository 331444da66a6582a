//! Built-in surface presentations with the fibration parameters each one is
//! expected to reproduce.

use crate::error::{Error, Result};
use crate::fibration::{select_fibration, FibrationData, Signature};
use crate::lattice::DivisorClass;
use crate::surface::{build_surface, SurfaceModel};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub degree: i64,
    pub dynkin: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    pub roots: Vec<DivisorClass>,
    /// `None` for surfaces without a table row (the 4A1 cubic and smooth surfaces).
    pub expected: Option<Signature>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_line_count: Option<usize>,
}

impl CatalogEntry {
    /// Key in the form `d/DYNKIN[/variant]`, e.g. `4/2A1/8lines`.
    pub fn key(&self) -> String {
        match &self.variant {
            Some(v) => format!("{}/{}/{}", self.degree, self.dynkin, v.replace(' ', "")),
            None => format!("{}/{}", self.degree, self.dynkin),
        }
    }

    pub fn surface(&self) -> Result<SurfaceModel> {
        build_surface(self.degree, self.roots.clone())
    }
}

fn rep(x: u32, times: i64) -> Vec<u32> {
    vec![x; times.max(0) as usize]
}

/// Parameters of the table row for a surface of the given degree, type and
/// line count, or `None` when no row applies.
pub fn table_row(degree: i64, dynkin: &str, lines: usize) -> Option<Signature> {
    let d = degree;
    let cat = |mut a: Vec<u32>, b: Vec<u32>| {
        a.extend(b);
        a
    };
    let sig = |n, alpha: Vec<u32>, beta: Vec<(u32, u32)>, gamma: Vec<u32>| {
        Signature::new(n, alpha, beta, gamma)
    };
    let row = match dynkin {
        "A1" if d == 6 && lines == 3 => sig(1, vec![], vec![(1, 1)], vec![]),
        "A1" => sig(2, rep(1, 8 - d), vec![], vec![]),
        "2A1" if d == 4 && lines == 8 => sig(1, vec![2], vec![(1, 1)], vec![]),
        "2A1" => sig(2, cat(rep(1, 6 - d), vec![2]), vec![], vec![]),
        "A2" => sig(2, rep(1, 6 - d), vec![(1, 1)], vec![]),
        "3A1" if d <= 4 => sig(2, cat(rep(1, 4 - d), vec![2, 2]), vec![], vec![]),
        "A2+A1" if d <= 5 => sig(2, cat(rep(1, 5 - d), vec![3]), vec![], vec![]),
        "A3" if d == 4 && lines == 4 => sig(2, vec![], vec![(1, 1), (1, 1)], vec![]),
        "A3" => sig(2, rep(1, 5 - d), vec![(2, 1)], vec![]),
        "4A1" if d == 4 => sig(1, vec![], vec![], vec![2, 2]),
        "A2+2A1" if d <= 4 => sig(2, cat(rep(1, 4 - d), vec![2]), vec![], vec![2]),
        "2A2" if d == 3 => sig(2, vec![3], vec![(1, 1)], vec![]),
        "A3+A1" if d <= 4 => sig(2, cat(rep(1, 4 - d), vec![4]), vec![], vec![]),
        "A4" if d <= 4 => sig(2, rep(1, 4 - d), vec![(3, 1)], vec![]),
        "D4" if d <= 4 => sig(2, rep(1, 4 - d), vec![(2, 2)], vec![]),
        "2A2+A1" if d == 3 => sig(2, vec![3], vec![], vec![2]),
        "A3+2A1" if d == 3 => sig(2, vec![1], vec![], vec![2, 2]),
        "A4+A1" if d == 3 => sig(2, vec![2], vec![], vec![3]),
        "A5" if d == 3 => sig(2, vec![], vec![(4, 1)], vec![]),
        "D5" if d == 3 => sig(2, rep(1, 4 - d), vec![], vec![4]),
        _ => return None,
    };
    let total: u32 = row.alpha.iter().sum::<u32>()
        + row.beta.iter().map(|(b, bp)| b + bp).sum::<u32>()
        + row.gamma.iter().sum::<u32>();
    (total as i64 == 8 - d).then_some(row)
}

/// Integer e-basis vectors (e0 first) for each built-in surface.
const PRESENTATIONS: &[(i64, &str, Option<&str>, &[&[i64]])] = &[
    (7, "A1", None, &[&[0, 1, -1]]),
    (6, "A1", Some("3 lines"), &[&[1, -1, -1, -1]]),
    (6, "A1", Some("4 lines"), &[&[0, 1, -1, 0]]),
    (6, "2A1", None, &[&[0, 1, -1, 0], &[1, -1, -1, -1]]),
    (6, "A2", None, &[&[0, 1, -1, 0], &[0, 0, 1, -1]]),
    (5, "A1", None, &[&[0, 1, -1, 0, 0]]),
    (5, "2A1", None, &[&[0, 1, -1, 0, 0], &[0, 0, 0, 1, -1]]),
    (5, "A2", None, &[&[0, 1, -1, 0, 0], &[0, 0, 1, -1, 0]]),
    (
        5,
        "A2+A1",
        None,
        &[&[0, 1, -1, 0, 0], &[0, 0, 1, -1, 0], &[1, -1, -1, -1, 0]],
    ),
    (
        5,
        "A3",
        None,
        &[&[0, 1, -1, 0, 0], &[0, 0, 1, -1, 0], &[0, 0, 0, 1, -1]],
    ),
    (4, "A1", None, &[&[0, 1, -1, 0, 0, 0]]),
    (
        4,
        "2A1",
        Some("8 lines"),
        &[&[0, 1, -1, 0, 0, 0], &[1, 0, 0, -1, -1, -1]],
    ),
    (
        4,
        "2A1",
        Some("9 lines"),
        &[&[0, 1, -1, 0, 0, 0], &[0, 0, 0, 1, -1, 0]],
    ),
    (
        4,
        "3A1",
        None,
        &[
            &[0, 1, -1, 0, 0, 0],
            &[0, 0, 0, 1, -1, 0],
            &[1, -1, -1, 0, 0, -1],
        ],
    ),
    (
        4,
        "4A1",
        None,
        &[
            &[0, 1, -1, 0, 0, 0],
            &[0, 0, 0, 1, -1, 0],
            &[1, -1, -1, 0, 0, -1],
            &[1, 0, 0, -1, -1, -1],
        ],
    ),
    (4, "A2", None, &[&[0, 1, -1, 0, 0, 0], &[0, 0, 1, -1, 0, 0]]),
    (
        4,
        "A2+A1",
        None,
        &[
            &[0, 1, -1, 0, 0, 0],
            &[0, 0, 1, -1, 0, 0],
            &[0, 0, 0, 0, 1, -1],
        ],
    ),
    (
        4,
        "A2+2A1",
        None,
        &[
            &[0, 1, -1, 0, 0, 0],
            &[0, 0, 1, -1, 0, 0],
            &[0, 0, 0, 0, 1, -1],
            &[1, -1, -1, -1, 0, 0],
        ],
    ),
    (
        4,
        "A3",
        Some("4 lines"),
        &[
            &[0, 1, -1, 0, 0, 0],
            &[0, 0, 1, -1, 0, 0],
            &[1, -1, 0, 0, -1, -1],
        ],
    ),
    (
        4,
        "A3",
        Some("5 lines"),
        &[
            &[0, 1, -1, 0, 0, 0],
            &[0, 0, 1, -1, 0, 0],
            &[0, 0, 0, 1, -1, 0],
        ],
    ),
    (
        4,
        "A3+A1",
        None,
        &[
            &[0, 1, -1, 0, 0, 0],
            &[0, 0, 1, -1, 0, 0],
            &[0, 0, 0, 0, 1, -1],
            &[1, -1, 0, 0, -1, -1],
        ],
    ),
    (
        4,
        "A4",
        None,
        &[
            &[0, 1, -1, 0, 0, 0],
            &[0, 0, 1, -1, 0, 0],
            &[0, 0, 0, 1, -1, 0],
            &[0, 0, 0, 0, 1, -1],
        ],
    ),
    (
        4,
        "D4",
        None,
        &[
            &[0, 1, -1, 0, 0, 0],
            &[0, 0, 1, -1, 0, 0],
            &[0, 0, 0, 1, -1, 0],
            &[1, -1, -1, 0, 0, -1],
        ],
    ),
    (3, "A1", None, &[&[0, 0, 0, 0, 0, 1, -1]]),
    (
        3,
        "2A1",
        None,
        &[&[0, 0, 0, 0, 0, 1, -1], &[0, 0, 0, 1, -1, 0, 0]],
    ),
    (
        3,
        "3A1",
        None,
        &[
            &[0, 0, 0, 0, 0, 1, -1],
            &[0, 0, 0, 1, -1, 0, 0],
            &[0, 1, -1, 0, 0, 0, 0],
        ],
    ),
    (
        3,
        "A2",
        None,
        &[&[0, 0, 0, 0, 0, 1, -1], &[0, 0, 0, 0, 1, -1, 0]],
    ),
    (
        3,
        "A2+A1",
        None,
        &[
            &[0, 0, 0, 0, 0, 1, -1],
            &[0, 0, 0, 0, 1, -1, 0],
            &[0, 0, 1, -1, 0, 0, 0],
        ],
    ),
    (
        3,
        "A3",
        None,
        &[
            &[0, 0, 0, 0, 0, 1, -1],
            &[0, 0, 0, 0, 1, -1, 0],
            &[0, 0, 0, 1, -1, 0, 0],
        ],
    ),
    (
        3,
        "A3+A1",
        None,
        &[
            &[0, 0, 0, 0, 0, 1, -1],
            &[0, 0, 0, 0, 1, -1, 0],
            &[0, 0, 0, 1, -1, 0, 0],
            &[0, 1, -1, 0, 0, 0, 0],
        ],
    ),
    (
        3,
        "2A2",
        None,
        &[
            &[0, 0, 0, 0, 0, 1, -1],
            &[0, 0, 0, 0, 1, -1, 0],
            &[0, 0, 1, -1, 0, 0, 0],
            &[0, 1, -1, 0, 0, 0, 0],
        ],
    ),
    (
        3,
        "A4",
        None,
        &[
            &[0, 0, 0, 0, 0, 1, -1],
            &[0, 0, 0, 0, 1, -1, 0],
            &[0, 0, 0, 1, -1, 0, 0],
            &[0, 0, 1, -1, 0, 0, 0],
        ],
    ),
    (
        3,
        "D4",
        None,
        &[
            &[0, 0, 0, 0, 0, 1, -1],
            &[0, 0, 0, 0, 1, -1, 0],
            &[0, 0, 0, 1, -1, 0, 0],
            &[1, -1, 0, -1, -1, 0, 0],
        ],
    ),
    (
        3,
        "2A2+A1",
        None,
        &[
            &[0, 0, 0, 0, 0, 1, -1],
            &[0, 0, 0, 0, 1, -1, 0],
            &[0, 0, 1, -1, 0, 0, 0],
            &[0, 1, -1, 0, 0, 0, 0],
            &[1, -1, -1, -1, 0, 0, 0],
        ],
    ),
    (
        3,
        "A3+2A1",
        None,
        &[
            &[0, 0, 0, 0, 0, 1, -1],
            &[0, 0, 0, 0, 1, -1, 0],
            &[0, 0, 0, 1, -1, 0, 0],
            &[0, 1, -1, 0, 0, 0, 0],
            &[2, -1, -1, -1, -1, -1, -1],
        ],
    ),
    (
        3,
        "A4+A1",
        None,
        &[
            &[0, 0, 0, 0, 0, 1, -1],
            &[0, 0, 0, 0, 1, -1, 0],
            &[0, 0, 0, 1, -1, 0, 0],
            &[0, 0, 1, -1, 0, 0, 0],
            &[2, -1, -1, -1, -1, -1, -1],
        ],
    ),
    (
        3,
        "A5",
        None,
        &[
            &[0, 0, 0, 0, 0, 1, -1],
            &[0, 0, 0, 0, 1, -1, 0],
            &[0, 0, 0, 1, -1, 0, 0],
            &[0, 0, 1, -1, 0, 0, 0],
            &[0, 1, -1, 0, 0, 0, 0],
        ],
    ),
    (
        3,
        "D5",
        None,
        &[
            &[0, 0, 0, 0, 0, 1, -1],
            &[0, 0, 0, 0, 1, -1, 0],
            &[0, 0, 0, 1, -1, 0, 0],
            &[0, 0, 1, -1, 0, 0, 0],
            &[1, -1, -1, -1, 0, 0, 0],
        ],
    ),
    (
        3,
        "A2+2A1",
        None,
        &[
            &[1, -1, -1, -1, 0, 0, 0],
            &[0, 1, -1, 0, 0, 0, 0],
            &[0, 0, 1, -1, 0, 0, 0],
            &[0, 0, 0, 0, 1, -1, 0],
        ],
    ),
    (
        3,
        "4A1",
        None,
        &[
            &[1, 0, 0, 0, -1, -1, -1],
            &[1, -1, 0, -1, -1, 0, 0],
            &[1, 0, -1, -1, 0, -1, 0],
            &[1, -1, -1, 0, 0, 0, -1],
        ],
    ),
    (7, "smooth", None, &[]),
    (6, "smooth", None, &[]),
    (5, "smooth", None, &[]),
    (4, "smooth", None, &[]),
];

fn line_count_label(variant: Option<&str>) -> Option<usize> {
    variant.and_then(|v| v.split_whitespace().next()?.parse().ok())
}

/// The built-in catalog, validated on construction.
pub fn catalog() -> Vec<CatalogEntry> {
    PRESENTATIONS
        .iter()
        .map(|(d, dynkin, variant, roots)| {
            let roots: Vec<DivisorClass> =
                roots.iter().map(|r| DivisorClass::from_ints(r)).collect();
            let lines = line_count_label(*variant);
            let surface = build_surface(*d, roots.clone()).expect("catalog presentation is valid");
            assert_eq!(surface.dynkin(), *dynkin, "catalog label");
            CatalogEntry {
                degree: *d,
                dynkin: dynkin.to_string(),
                variant: variant.map(str::to_string),
                expected: table_row(*d, dynkin, surface.line_count()),
                expected_line_count: lines,
                roots,
            }
        })
        .collect()
}

fn normalise_variant(v: &str) -> String {
    v.chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_lowercase()
}

/// Finds an entry by degree, type and optional variant. A variant may be
/// given as "8 lines", "8lines" or just "8".
pub fn find_entry(degree: i64, dynkin: &str, variant: Option<&str>) -> Result<CatalogEntry> {
    let matches: Vec<CatalogEntry> = catalog()
        .into_iter()
        .filter(|e| e.degree == degree && e.dynkin == dynkin)
        .filter(|e| match (variant, &e.variant) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(v), Some(ev)) => {
                let v = normalise_variant(v);
                let ev = normalise_variant(ev);
                v == ev || format!("{v}lines") == ev
            }
        })
        .collect();
    let label = match variant {
        Some(v) => format!("{degree}/{dynkin}/{v}"),
        None => format!("{degree}/{dynkin}"),
    };
    match matches.len() {
        1 => Ok(matches.into_iter().next().unwrap()),
        0 => Err(Error::UnknownEntry(label)),
        _ => Err(Error::UnknownEntry(format!(
            "{label} is ambiguous, give a variant"
        ))),
    }
}

pub fn catalog_surface(degree: i64, dynkin: &str, variant: Option<&str>) -> Result<SurfaceModel> {
    find_entry(degree, dynkin, variant)?.surface()
}

/// Parses `d/DYNKIN[/variant]`.
pub fn parse_key(key: &str) -> Result<(i64, String, Option<String>)> {
    let parts: Vec<&str> = key.split('/').collect();
    let bad = || Error::Parse(format!("surface key {key:?}, expected d/DYNKIN[/variant]"));
    if parts.len() < 2 || parts.len() > 3 {
        return Err(bad());
    }
    let d = parts[0].trim().parse().map_err(|_| bad())?;
    Ok((
        d,
        parts[1].trim().to_string(),
        parts.get(2).map(|v| v.trim().to_string()),
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct TableRowReport {
    pub entry: CatalogEntry,
    pub computed: Option<FibrationData>,
    pub matched: bool,
}

/// Runs fibration selection over every entry with a table row.
pub fn regenerate_table() -> Vec<TableRowReport> {
    catalog()
        .into_iter()
        .filter(|e| e.expected.is_some())
        .map(|entry| {
            let computed = entry.surface().ok().and_then(|s| select_fibration(&s).ok());
            let matched = computed.as_ref().map(|f| f.signature()) == entry.expected;
            TableRowReport {
                entry,
                computed,
                matched,
            }
        })
        .collect()
}

pub fn to_json(entries: &[CatalogEntry]) -> String {
    serde_json::to_string_pretty(entries).expect("catalog serialises")
}

pub fn from_json(text: &str) -> Result<Vec<CatalogEntry>> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}
