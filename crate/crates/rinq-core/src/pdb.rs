//! PDB structure ingestion: fixed-column parsing of ATOM records, Cα
//! extraction with altLoc resolution, and a cached fetcher for RCSB entries.
//!
//! Only legacy PDB text is understood. Fields are cut at fixed columns
//! because PDB fields can abut without separators; whitespace splitting is
//! not safe. HETATM, ANISOU, TER and every other record type besides ATOM,
//! MODEL and ENDMDL are ignored.

use std::fmt;
use std::fs;
use std::path::Path;

use crate::error::{Result, RinqError};

pub const DEFAULT_PDB_BASE_URL: &str = "https://files.rcsb.org/download";

/// Environment variable overriding the download base URL.
pub const PDB_MIRROR_ENV: &str = "RINQ_PDB_MIRROR";

/// Cartesian position in Å.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn distance(&self, other: &Vec3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// One raw ATOM record, in file order.
#[derive(Debug, Clone)]
pub struct RawAtom {
    pub name: String,
    pub alt_loc: Option<char>,
    pub res_name: String,
    pub chain_id: char,
    pub res_seq: i32,
    pub insertion_code: Option<char>,
    pub position: Vec3,
    pub occupancy: f64,
    /// 1-based line number in the source text.
    pub line: usize,
}

/// All ATOM records of one MODEL, in file order.
#[derive(Debug, Clone)]
pub struct StructureModel {
    pub pdb_id: String,
    pub model_number: u32,
    pub atoms: Vec<RawAtom>,
}

/// A residue reduced to its identity and Cα position.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueRecord {
    pub chain_id: char,
    pub res_seq: i32,
    pub insertion_code: Option<char>,
    pub res_name: String,
    pub ca_position: Vec3,
}

impl ResidueRecord {
    /// Display label, e.g. `A:6:CYS` (insertion code appended when present).
    pub fn label(&self) -> String {
        match self.insertion_code {
            Some(ic) => format!("{}:{}{}:{}", self.chain_id, self.res_seq, ic, self.res_name),
            None => format!("{}:{}:{}", self.chain_id, self.res_seq, self.res_name),
        }
    }
}

impl fmt::Display for ResidueRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn col(line: &str, start: usize, end: usize) -> &str {
    let bytes = line.as_bytes();
    if start >= bytes.len() {
        return "";
    }
    // PDB text is ASCII; byte slicing is char-safe for well-formed files.
    &line[start..end.min(bytes.len())]
}

fn col_char(line: &str, idx: usize) -> Option<char> {
    let c = col(line, idx, idx + 1).chars().next().unwrap_or(' ');
    if c == ' ' {
        None
    } else {
        Some(c)
    }
}

fn parse_coord(line: &str, lineno: usize, start: usize, end: usize, axis: &str) -> Result<f64> {
    col(line, start, end)
        .trim()
        .parse::<f64>()
        .map_err(|_| RinqError::Parse {
            line: lineno,
            message: format!("non-numeric {axis} coordinate {:?}", col(line, start, end)),
        })
}

fn parse_atom_line(line: &str, lineno: usize) -> Result<RawAtom> {
    let x = parse_coord(line, lineno, 30, 38, "x")?;
    let y = parse_coord(line, lineno, 38, 46, "y")?;
    let z = parse_coord(line, lineno, 46, 54, "z")?;
    let res_seq = col(line, 22, 26)
        .trim()
        .parse::<i32>()
        .map_err(|_| RinqError::Parse {
            line: lineno,
            message: format!("non-numeric residue sequence number {:?}", col(line, 22, 26)),
        })?;
    let occupancy = col(line, 54, 60).trim().parse::<f64>().unwrap_or(1.0);
    Ok(RawAtom {
        name: col(line, 12, 16).to_string(),
        alt_loc: col_char(line, 16),
        res_name: col(line, 17, 20).trim().to_string(),
        chain_id: col(line, 21, 22).chars().next().unwrap_or(' '),
        res_seq,
        insertion_code: col_char(line, 26),
        position: Vec3::new(x, y, z),
        occupancy,
        line: lineno,
    })
}

/// Parse PDB text into one [`StructureModel`] per MODEL record.
///
/// A file without MODEL records yields exactly one model numbered 1. Only
/// ATOM records contribute atoms; a file with zero ATOM records is an error.
pub fn parse_pdb(text: &str) -> Result<Vec<StructureModel>> {
    let mut pdb_id = String::from("UNKN");
    let mut models: Vec<StructureModel> = Vec::new();
    let mut current: Option<StructureModel> = None;
    let mut next_number: u32 = 1;
    let mut total_atoms = 0usize;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.starts_with("HEADER") {
            let id = col(line, 62, 66).trim();
            if !id.is_empty() {
                pdb_id = id.to_string();
            }
        } else if line.starts_with("MODEL") {
            if let Some(m) = current.take() {
                if !m.atoms.is_empty() {
                    models.push(m);
                }
            }
            let number = col(line, 10, 14)
                .trim()
                .parse::<u32>()
                .unwrap_or(next_number);
            next_number = number + 1;
            current = Some(StructureModel {
                pdb_id: String::new(),
                model_number: number,
                atoms: Vec::new(),
            });
        } else if line.starts_with("ENDMDL") {
            if let Some(m) = current.take() {
                if !m.atoms.is_empty() {
                    models.push(m);
                }
            }
        } else if line.starts_with("ATOM  ") || (line.starts_with("ATOM") && line.len() <= 6) {
            let atom = parse_atom_line(line, lineno)?;
            total_atoms += 1;
            let model = current.get_or_insert_with(|| {
                let number = next_number;
                next_number = number + 1;
                StructureModel {
                    pdb_id: String::new(),
                    model_number: number,
                    atoms: Vec::new(),
                }
            });
            model.atoms.push(atom);
        }
    }
    if let Some(m) = current.take() {
        if !m.atoms.is_empty() {
            models.push(m);
        }
    }

    if total_atoms == 0 {
        return Err(RinqError::EmptyStructure);
    }
    for m in &mut models {
        m.pdb_id = pdb_id.clone();
    }
    Ok(models)
}

/// Extract one [`ResidueRecord`] per residue that has a Cα atom.
///
/// When several altLoc variants of the Cα exist, the highest occupancy wins;
/// ties keep the earliest record in file order. Residues with no Cα are
/// silently dropped. Output is sorted by (chain, res_seq, insertion_code).
pub fn extract_ca(model: &StructureModel, chain_filter: Option<char>) -> Vec<ResidueRecord> {
    // (chain, seq, icode) -> best CA seen so far
    let mut best: std::collections::BTreeMap<(char, i32, Option<char>), &RawAtom> =
        std::collections::BTreeMap::new();
    for atom in &model.atoms {
        if atom.name.trim() != "CA" {
            continue;
        }
        if let Some(c) = chain_filter {
            if atom.chain_id != c {
                continue;
            }
        }
        let key = (atom.chain_id, atom.res_seq, atom.insertion_code);
        match best.get(&key) {
            Some(prev) if prev.occupancy >= atom.occupancy => {}
            _ => {
                best.insert(key, atom);
            }
        }
    }
    best.into_values()
        .map(|a| ResidueRecord {
            chain_id: a.chain_id,
            res_seq: a.res_seq,
            insertion_code: a.insertion_code,
            res_name: a.res_name.clone(),
            ca_position: a.position,
        })
        .collect()
}

/// Check a PDB identifier: a digit followed by three alphanumerics.
pub fn validate_pdb_id(id: &str) -> Result<String> {
    let ok = id.len() == 4
        && id.as_bytes()[0].is_ascii_digit()
        && id.bytes().skip(1).all(|b| b.is_ascii_alphanumeric());
    if ok {
        Ok(id.to_ascii_uppercase())
    } else {
        Err(RinqError::InvalidId(id.to_string()))
    }
}

/// Return the cached or freshly downloaded PDB file content for `pdb_id`.
///
/// Cache layout is `{cache_dir}/{UPPERCASE_ID}.pdb`; the network is touched
/// only on a cache miss. The base URL comes from the `RINQ_PDB_MIRROR`
/// environment variable when set.
pub fn fetch_pdb(pdb_id: &str, cache_dir: &Path) -> Result<String> {
    let base = std::env::var(PDB_MIRROR_ENV).unwrap_or_else(|_| DEFAULT_PDB_BASE_URL.to_string());
    fetch_pdb_from(&base, pdb_id, cache_dir)
}

/// [`fetch_pdb`] with an explicit base URL.
pub fn fetch_pdb_from(base_url: &str, pdb_id: &str, cache_dir: &Path) -> Result<String> {
    let id = validate_pdb_id(pdb_id)?;
    let cache_path = cache_dir.join(format!("{id}.pdb"));
    if cache_path.exists() {
        return Ok(fs::read_to_string(&cache_path)?);
    }

    let url = format!("{}/{id}.pdb", base_url.trim_end_matches('/'));
    let response = ureq::get(&url).call().map_err(|e| RinqError::Fetch {
        id: id.clone(),
        message: match e {
            ureq::Error::Status(code, _) => format!("HTTP {code} from {url}"),
            other => format!("{other}"),
        },
    })?;
    let body = response
        .into_string()
        .map_err(|e| RinqError::Fetch {
            id: id.clone(),
            message: format!("reading response body: {e}"),
        })?;

    fs::create_dir_all(cache_dir)?;
    // Create-then-rename so concurrent fetchers never observe partial files.
    let tmp_path = cache_dir.join(format!(".{id}.pdb.partial.{}", std::process::id()));
    fs::write(&tmp_path, &body)?;
    fs::rename(&tmp_path, &cache_path)?;
    Ok(body)
}
