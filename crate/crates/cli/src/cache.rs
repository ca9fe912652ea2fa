//! On-disk level cache: a little-endian binary file plus a JSON sidecar
//! carrying the counts and the SHA-256 of the binary.
//!
//! Layout: magic `MGHC`, version, `n0`, top level; then per level `n >= 1`:
//! `|V_n|`, `|V_{n-1}|`, the new vertices as index pairs into `V_{n-1}`
//! (none for `n = 1`), `|E_n|` and the sorted edge list.

use std::fs;
use std::io::{Cursor, Read, Write};
use std::path::{Path, PathBuf};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use midgraph::{GraphLevel, Hierarchy, Term};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"MGHC";

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
pub struct Sidecar {
    pub format_version: u32,
    pub n0: u32,
    pub n: u32,
    pub vcounts: Vec<u64>,
    pub ecounts: Vec<u64>,
    pub sha256: String,
}

pub fn paths(dir: &Path, n0: u32, n: u32) -> (PathBuf, PathBuf) {
    let stem = format!("hierarchy_n0-{n0}_n-{n}");
    (dir.join(format!("{stem}.bin")), dir.join(format!("{stem}.json")))
}

pub fn encode(hier: &Hierarchy) -> Vec<u8> {
    let mut buf = Vec::new();
    let store = hier.store();
    buf.extend_from_slice(MAGIC);
    buf.write_u32::<LittleEndian>(FORMAT_VERSION).unwrap();
    buf.write_u32::<LittleEndian>(hier.n0()).unwrap();
    buf.write_u32::<LittleEndian>(hier.top()).unwrap();
    for g in &hier.levels()[1..] {
        buf.write_u64::<LittleEndian>(g.vcount() as u64).unwrap();
        buf.write_u64::<LittleEndian>(g.prev_vcount() as u64).unwrap();
        if g.n() >= 2 {
            let prev = hier.level(g.n() - 1);
            for &v in &g.vertices()[g.prev_vcount()..] {
                let Term::Pair(a, b) = store.term(v) else {
                    unreachable!("new vertices above level 1 are pairs")
                };
                buf.write_u32::<LittleEndian>(prev.index_of(a).unwrap() as u32).unwrap();
                buf.write_u32::<LittleEndian>(prev.index_of(b).unwrap() as u32).unwrap();
            }
        }
        buf.write_u64::<LittleEndian>(g.ecount() as u64).unwrap();
        for (a, b) in g.edges() {
            buf.write_u32::<LittleEndian>(a).unwrap();
            buf.write_u32::<LittleEndian>(b).unwrap();
        }
    }
    buf
}

fn corrupt(msg: impl Into<String>) -> String {
    format!("corrupt level cache: {}", msg.into())
}

pub fn decode(bytes: &[u8]) -> Result<Hierarchy, String> {
    let mut r = Cursor::new(bytes);
    let io = |e: std::io::Error| corrupt(e.to_string());
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io)?;
    if &magic != MAGIC {
        return Err(corrupt("bad magic"));
    }
    let version = r.read_u32::<LittleEndian>().map_err(io)?;
    if version != FORMAT_VERSION {
        return Err(corrupt(format!("format version {version}, expected {FORMAT_VERSION}")));
    }
    let n0 = r.read_u32::<LittleEndian>().map_err(io)?;
    let top = r.read_u32::<LittleEndian>().map_err(io)?;
    let mut hier = Hierarchy::new(n0);
    for n in 1..=top {
        let vcount = r.read_u64::<LittleEndian>().map_err(io)? as usize;
        let prev_vcount = r.read_u64::<LittleEndian>().map_err(io)? as usize;
        let prev: Vec<_> = hier.level(n - 1).vertices().to_vec();
        if prev_vcount != prev.len() || vcount < prev_vcount {
            return Err(corrupt(format!("vertex counts of level {n}")));
        }
        let mut vertices = prev.clone();
        if n == 1 {
            vertices.extend(hier.store().leaves());
        } else {
            let store = hier.store_mut();
            for _ in prev_vcount..vcount {
                let a = r.read_u32::<LittleEndian>().map_err(io)? as usize;
                let b = r.read_u32::<LittleEndian>().map_err(io)? as usize;
                if a >= prev.len() || b >= prev.len() || a == b {
                    return Err(corrupt(format!("vertex pair ({a}, {b}) at level {n}")));
                }
                vertices.push(store.midpoint(prev[a], prev[b]));
            }
        }
        if vertices.len() != vcount {
            return Err(corrupt(format!("level {n} has {} vertices, header says {vcount}", vertices.len())));
        }
        let ecount = r.read_u64::<LittleEndian>().map_err(io)? as usize;
        let mut edges = Vec::with_capacity(ecount);
        for _ in 0..ecount {
            let a = r.read_u32::<LittleEndian>().map_err(io)?;
            let b = r.read_u32::<LittleEndian>().map_err(io)?;
            edges.push((a, b));
        }
        let level = GraphLevel::from_parts(hier.store(), n, prev_vcount, vertices, edges)
            .map_err(|e| corrupt(e.to_string()))?;
        if level.ecount() != ecount {
            return Err(corrupt(format!("duplicate edges at level {n}")));
        }
        hier.push_level(level).map_err(|e| corrupt(e.to_string()))?;
    }
    if (r.position() as usize) != bytes.len() {
        return Err(corrupt("trailing bytes"));
    }
    Ok(hier)
}

pub fn sidecar(hier: &Hierarchy, bytes: &[u8]) -> Sidecar {
    Sidecar {
        format_version: FORMAT_VERSION,
        n0: hier.n0(),
        n: hier.top(),
        vcounts: hier.levels().iter().map(|g| g.vcount() as u64).collect(),
        ecounts: hier.levels().iter().map(|g| g.ecount() as u64).collect(),
        sha256: hex::encode(Sha256::digest(bytes)),
    }
}

pub fn store(dir: &Path, hier: &Hierarchy) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let (bin, json) = paths(dir, hier.n0(), hier.top());
    let bytes = encode(hier);
    fs::File::create(&bin)?.write_all(&bytes)?;
    let side = serde_json::to_string_pretty(&sidecar(hier, &bytes)).unwrap() + "\n";
    fs::write(json, side)
}

/// `Ok(None)` when there is no cache for `(n0, n)`; `Err` when there is one
/// but it does not check out.
pub fn load(dir: &Path, n0: u32, n: u32) -> Result<Option<Hierarchy>, String> {
    let (bin, json) = paths(dir, n0, n);
    if !bin.exists() || !json.exists() {
        return Ok(None);
    }
    let side: Sidecar = serde_json::from_str(&fs::read_to_string(&json).map_err(|e| e.to_string())?)
        .map_err(|e| corrupt(format!("sidecar: {e}")))?;
    if side.format_version != FORMAT_VERSION {
        return Err(corrupt(format!("sidecar format version {}", side.format_version)));
    }
    let bytes = fs::read(&bin).map_err(|e| e.to_string())?;
    if hex::encode(Sha256::digest(&bytes)) != side.sha256 {
        return Err(corrupt("content hash mismatch"));
    }
    let hier = decode(&bytes)?;
    if sidecar(&hier, &bytes) != side {
        return Err(corrupt("sidecar counts disagree with the binary"));
    }
    Ok(Some(hier))
}

#[cfg(test)]
mod tests {
    use super::*;
    use midgraph::Budget;

    #[test]
    fn round_trip() {
        let h = Hierarchy::build(2, 5, &Budget::default()).unwrap();
        let bytes = encode(&h);
        let back = decode(&bytes).unwrap();
        assert_eq!(encode(&back), bytes);
        for n in 0..=5 {
            let (a, b) = (h.level(n), back.level(n));
            assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
            let enc = |hh: &Hierarchy, g: &GraphLevel| {
                g.vertices().iter().map(|&v| hh.store().encode(v)).collect::<Vec<_>>()
            };
            assert_eq!(enc(&h, a), enc(&back, b));
        }
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(decode(&bad).is_err());
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
    }
}
