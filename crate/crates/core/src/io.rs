//! Readers for XYZR and PDB input, the radius table, and the text format of
//! computed complexes.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::{Ball, SimplexKey};
use crate::pipeline::{AlphaComplex, ComplexStats};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IoError {
    #[error("line {line}: malformed record: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: radius must be positive")]
    NonPositiveRadius { line: usize },
    #[error("line {line}: non-finite value")]
    NonFiniteValue { line: usize },
    #[error("line {line}: malformed ATOM/HETATM record: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("no atoms found")]
    NoAtoms,
    #[error("radius table line {line}: {reason}")]
    BadRadiusTable { line: usize, reason: String },
    #[error("complex document line {line}: {reason}")]
    BadDocument { line: usize, reason: String },
}

/// Parses whitespace-separated `x y z r` records. `#` starts a comment.
pub fn parse_xyzr(text: &str) -> Result<Vec<Ball>, IoError> {
    let mut balls = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(IoError::MalformedLine {
                line,
                reason: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let mut v = [0.0; 4];
        for (slot, f) in v.iter_mut().zip(&fields) {
            *slot = f.parse::<f64>().map_err(|e| IoError::MalformedLine {
                line,
                reason: format!("{f:?}: {e}"),
            })?;
            if !slot.is_finite() {
                return Err(IoError::NonFiniteValue { line });
            }
        }
        if v[3] <= 0.0 {
            return Err(IoError::NonPositiveRadius { line });
        }
        balls.push(Ball::new([v[0], v[1], v[2]], v[3], balls.len() as u32));
    }
    Ok(balls)
}

/// One `x y z r` line per ball, values in shortest round-trip form.
pub fn format_xyzr(balls: &[Ball]) -> String {
    let mut out = String::new();
    for b in balls {
        let [x, y, z] = b.center;
        writeln!(out, "{x} {y} {z} {}", b.radius).unwrap();
    }
    out
}

/// Element symbol to van der Waals radius (Å).
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusTable {
    radii: HashMap<String, f64>,
    default_radius: f64,
}

impl Default for RadiusTable {
    /// Bondi-style set: H 1.20, C 1.70, N 1.55, O 1.52, S 1.80, P 1.80,
    /// everything else 1.50.
    fn default() -> Self {
        let radii = [
            ("H", 1.20),
            ("C", 1.70),
            ("N", 1.55),
            ("O", 1.52),
            ("S", 1.80),
            ("P", 1.80),
        ]
        .into_iter()
        .map(|(e, r)| (e.to_string(), r))
        .collect();
        Self {
            radii,
            default_radius: 1.50,
        }
    }
}

fn valid_radius(r: f64) -> bool {
    r > 0.0 && r <= 3.0
}

impl RadiusTable {
    /// Parses `EL radius` lines; the element `*` or `default` sets the
    /// fallback radius (1.50 when absent). `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, IoError> {
        let mut table = RadiusTable {
            radii: HashMap::new(),
            default_radius: 1.50,
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let bad = |reason: String| IoError::BadRadiusTable { line, reason };
            let fields: Vec<&str> = content.split_whitespace().collect();
            let [element, radius] = fields[..] else {
                return Err(bad(format!("expected `ELEMENT RADIUS`, found {content:?}")));
            };
            let r: f64 = radius
                .parse()
                .map_err(|e| bad(format!("{radius:?}: {e}")))?;
            if !valid_radius(r) {
                return Err(bad(format!("radius {r} outside (0, 3]")));
            }
            if element == "*" || element.eq_ignore_ascii_case("default") {
                table.default_radius = r;
            } else if (1..=2).contains(&element.len())
                && element.chars().all(|c| c.is_ascii_alphabetic())
            {
                table.radii.insert(element.to_ascii_uppercase(), r);
            } else {
                return Err(bad(format!("bad element symbol {element:?}")));
            }
        }
        Ok(table)
    }

    pub fn default_radius(&self) -> f64 {
        self.default_radius
    }

    pub fn radius(&self, element: &str) -> f64 {
        self.radii
            .get(&element.trim().to_ascii_uppercase())
            .copied()
            .unwrap_or(self.default_radius)
    }
}

/// One ATOM/HETATM record.
#[derive(Debug, Clone, PartialEq)]
pub struct PdbAtom {
    pub center: [f64; 3],
    pub element: String,
    pub residue: String,
    pub hetero: bool,
}

impl PdbAtom {
    pub fn is_water(&self) -> bool {
        matches!(
            self.residue.as_str(),
            "HOH" | "WAT" | "DOD" | "H2O" | "TIP" | "SOL"
        )
    }

    pub fn is_hydrogen(&self) -> bool {
        matches!(self.element.as_str(), "H" | "D")
    }
}

/// Which record classes survive PDB ingestion. The default keeps only
/// non-hydrogen ATOM records.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PdbFilter {
    pub include_het: bool,
    pub include_water: bool,
    pub include_hydrogen: bool,
}

impl PdbFilter {
    pub const ALL: PdbFilter = PdbFilter {
        include_het: true,
        include_water: true,
        include_hydrogen: true,
    };

    pub fn accepts(&self, atom: &PdbAtom) -> bool {
        if atom.is_water() {
            return self.include_water;
        }
        (self.include_het || !atom.hetero) && (self.include_hydrogen || !atom.is_hydrogen())
    }
}

/// 1-based inclusive column range, clipped to the line.
fn columns(line: &str, from: usize, to: usize) -> &str {
    let start = (from - 1).min(line.len());
    let end = to.min(line.len());
    line.get(start..end).unwrap_or("")
}

/// Reads ATOM/HETATM records of the first model. Only the first alternate
/// location of each atom is kept.
pub fn parse_pdb_atoms(text: &str) -> Result<Vec<PdbAtom>, IoError> {
    let mut atoms = Vec::new();
    let mut seen_alt: HashSet<String> = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.starts_with("ENDMDL") {
            break;
        }
        let hetero = raw.starts_with("HETATM");
        if !(hetero || raw.starts_with("ATOM  ") || raw == "ATOM") {
            continue;
        }
        if !raw.is_ascii() {
            return Err(IoError::MalformedRecord {
                line,
                reason: "non-ASCII characters".into(),
            });
        }
        if raw.len() < 54 {
            return Err(IoError::MalformedRecord {
                line,
                reason: format!("record has {} columns, coordinates need 54", raw.len()),
            });
        }
        let alt_loc = columns(raw, 17, 17).trim();
        if !alt_loc.is_empty() {
            // Atom name, residue name, chain, sequence number and insertion code.
            let id = format!("{}|{}", columns(raw, 13, 16), columns(raw, 18, 27));
            if !seen_alt.insert(id) {
                continue;
            }
        }
        let mut center = [0.0; 3];
        for (slot, (from, to)) in center.iter_mut().zip([(31, 38), (39, 46), (47, 54)]) {
            let field = columns(raw, from, to).trim();
            *slot = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| IoError::MalformedRecord {
                    line,
                    reason: format!("bad coordinate {field:?} in columns {from}-{to}"),
                })?;
        }
        let mut element = columns(raw, 77, 78).trim().to_ascii_uppercase();
        if element.is_empty() {
            element = columns(raw, 13, 16)
                .chars()
                .find(|c| c.is_ascii_alphabetic())
                .map(|c| c.to_ascii_uppercase().to_string())
                .ok_or_else(|| IoError::MalformedRecord {
                    line,
                    reason: "no element symbol and no letter in the atom name".into(),
                })?;
        }
        atoms.push(PdbAtom {
            center,
            element,
            residue: columns(raw, 18, 20).trim().to_ascii_uppercase(),
            hetero,
        });
    }
    Ok(atoms)
}

/// One ball per ATOM/HETATM record (waters included), radius from `table`.
pub fn parse_pdb(text: &str, table: &RadiusTable) -> Result<Vec<Ball>, IoError> {
    parse_pdb_filtered(text, table, &PdbFilter::ALL)
}

pub fn parse_pdb_filtered(
    text: &str,
    table: &RadiusTable,
    filter: &PdbFilter,
) -> Result<Vec<Ball>, IoError> {
    let balls: Vec<Ball> = parse_pdb_atoms(text)?
        .into_iter()
        .filter(|a| filter.accepts(a))
        .enumerate()
        .map(|(i, a)| Ball::new(a.center, table.radius(&a.element), i as u32))
        .collect();
    if balls.is_empty() {
        return Err(IoError::NoAtoms);
    }
    Ok(balls)
}

const DOC_TAG: &str = "alphax";

/// Serializes a complex: a header line, then one `d v0 .. vd` line per
/// simplex in canonical order.
pub fn write_complex(k: &AlphaComplex) -> String {
    let mut out = String::with_capacity(16 * (k.len() + 1));
    writeln!(
        out,
        "{DOC_TAG} {} n={} alpha={}",
        env!("CARGO_PKG_VERSION"),
        k.ball_count(),
        k.alpha()
    )
    .unwrap();
    for s in k.iter() {
        writeln!(out, "{s}").unwrap();
    }
    out
}

/// Reads a document produced by [`write_complex`].
pub fn read_complex(text: &str) -> Result<AlphaComplex, IoError> {
    let mut lines = text.lines();
    let bad = |line: usize, reason: String| IoError::BadDocument { line, reason };
    let header = lines
        .next()
        .ok_or_else(|| bad(1, "empty document".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    let (n, alpha) = match parts[..] {
        [tag, _version, n, alpha] if tag == DOC_TAG => {
            let n = n
                .strip_prefix("n=")
                .and_then(|v| v.parse::<usize>().ok())
                .ok_or_else(|| bad(1, format!("bad ball count {n:?}")))?;
            let alpha = alpha
                .strip_prefix("alpha=")
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| bad(1, format!("bad alpha {alpha:?}")))?;
            (n, alpha)
        }
        _ => return Err(bad(1, format!("bad header {header:?}"))),
    };
    let mut simplices = Vec::new();
    for (i, raw) in lines.enumerate() {
        let line = i + 2;
        let nums: Vec<u64> = raw
            .split_whitespace()
            .map(|f| f.parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(line, format!("{raw:?}: {e}")))?;
        let Some((&dim, verts)) = nums.split_first() else {
            return Err(bad(line, "empty record".into()));
        };
        if dim > 3 || verts.len() as u64 != dim + 1 {
            return Err(bad(
                line,
                format!("dimension {dim} with {} vertices", verts.len()),
            ));
        }
        if verts.iter().any(|&v| v >= n as u64) {
            return Err(bad(line, format!("vertex index out of range for n={n}")));
        }
        if verts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad(line, "vertices must be strictly increasing".into()));
        }
        let verts: Vec<u32> = verts.iter().map(|&v| v as u32).collect();
        simplices.push(SimplexKey::new(&verts));
    }
    Ok(AlphaComplex::from_simplices(n, alpha, simplices))
}

/// `dim,count` rows followed by `total` and `euler`.
pub fn stats_csv(stats: &ComplexStats) -> String {
    let mut out = String::from("dim,count\n");
    for (d, c) in stats.counts.iter().enumerate() {
        writeln!(out, "{d},{c}").unwrap();
    }
    writeln!(out, "total,{}", stats.total).unwrap();
    writeln!(out, "euler,{}", stats.euler).unwrap();
    out
}
