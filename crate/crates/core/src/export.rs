//! DOT and CSV writers. Vertices are always written in canonical order and
//! labelled by their canonical encodings; CSV output has a header row and
//! RFC 4180 quoting (encodings contain commas).

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::extremal::CountBook;
use crate::graph::Hierarchy;
use crate::metric::{delta_coordinates, Metrics};

/// Undirected DOT; node ids are level indices, labels are encodings.
pub fn write_dot<W: Write>(hier: &Hierarchy, n: u32, mut w: W) -> Result<()> {
    let level = hier.get_level(n)?;
    let store = hier.store();
    writeln!(w, "graph G_{n} {{")?;
    for (i, &v) in level.vertices().iter().enumerate() {
        writeln!(w, "  {i} [label=\"{}\", level={}];", store.encode(v), store.level(v))?;
    }
    for (a, b) in level.edges() {
        writeln!(w, "  {a} -- {b};")?;
    }
    writeln!(w, "}}")?;
    w.flush()?;
    Ok(())
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(w)
}

fn finish<W: Write>(mut out: csv::Writer<W>) -> Result<()> {
    out.flush()?;
    Ok(())
}

/// `index,vertex,level,degree`.
pub fn write_vertices_csv<W: Write>(hier: &Hierarchy, n: u32, w: W) -> Result<()> {
    let level = hier.get_level(n)?;
    let store = hier.store();
    let mut out = csv_writer(w);
    out.write_record(["index", "vertex", "level", "degree"])?;
    for (i, &v) in level.vertices().iter().enumerate() {
        out.write_record([
            i.to_string(),
            store.encode(v),
            store.level(v).to_string(),
            level.degree(i).to_string(),
        ])?;
    }
    finish(out)
}

/// `source,target` as encodings, sources before targets in canonical order.
pub fn write_edges_csv<W: Write>(hier: &Hierarchy, n: u32, w: W) -> Result<()> {
    let level = hier.get_level(n)?;
    let store = hier.store();
    let mut out = csv_writer(w);
    out.write_record(["source", "target"])?;
    for (a, b) in level.edges() {
        out.write_record([
            store.encode(level.vertex(a as usize)),
            store.encode(level.vertex(b as usize)),
        ])?;
    }
    finish(out)
}

/// Full `d_n` matrix; the header row and first column carry the encodings.
pub fn write_distance_csv<W: Write>(metrics: &Metrics<'_>, n: u32, w: W) -> Result<()> {
    let level = metrics.level(n)?;
    let table = metrics.table(n)?;
    let store = metrics.store();
    let labels: Vec<String> = level.vertices().iter().map(|&v| store.encode(v)).collect();
    let mut out = csv_writer(w);
    out.write_field("vertex")?;
    out.write_record(&labels)?;
    for (i, label) in labels.iter().enumerate() {
        out.write_field(label)?;
        out.write_record(table.row(i).unwrap().iter().map(|d| d.to_string()))?;
    }
    finish(out)
}

/// `vertex,x0,...,x{n0-1}` with exact dyadic coordinates such as `3/8`.
pub fn write_delta_csv<W: Write>(hier: &Hierarchy, n: u32, w: W) -> Result<()> {
    let level = hier.get_level(n)?;
    let store = hier.store();
    let points = delta_coordinates(hier, n)?;
    let mut out = csv_writer(w);
    let mut header = vec!["vertex".to_string()];
    header.extend((0..hier.n0()).map(|i| format!("x{i}")));
    out.write_record(&header)?;
    for (i, p) in points.iter().enumerate() {
        let mut row = vec![store.encode(level.vertex(i))];
        row.extend((0..p.coords.len()).map(|c| p.coord(c).to_string()));
        out.write_record(&row)?;
    }
    finish(out)
}

/// One row of the power-count table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PowerRow {
    pub n: u32,
    pub m: u32,
    pub ecount: u64,
    pub vcount: u64,
    /// `ecount / vcount^2`, reduced.
    pub ratio: String,
}

/// `|E(G_n^m)|` for every level with known distance histogram and
/// `m = 1..=max_m`.
pub fn power_rows(book: &CountBook, max_m: u32) -> Vec<PowerRow> {
    let mut rows = Vec::new();
    for (&n, c) in &book.levels {
        for m in 1..=max_m {
            let Some(e) = c.power_ecount(m) else { continue };
            let ratio = num_rational::Ratio::new(e as u128, (c.vcount as u128).pow(2).max(1));
            rows.push(PowerRow {
                n,
                m,
                ecount: e,
                vcount: c.vcount,
                ratio: ratio.to_string(),
            });
        }
    }
    rows
}

/// `n,m,ecount,vcount,ratio`.
pub fn write_power_csv<W: Write>(rows: &[PowerRow], w: W) -> Result<()> {
    let mut out = csv_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    if rows.is_empty() {
        out.write_record(["n", "m", "ecount", "vcount", "ratio"])?;
    }
    finish(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Budget;

    fn text(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> String {
        let mut buf = Vec::new();
        f(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn dot_lists_every_vertex_and_edge() {
        let h = Hierarchy::build(2, 3, &Budget::default()).unwrap();
        let dot = text(|b| write_dot(&h, 3, b));
        assert!(dot.starts_with("graph G_3 {\n"));
        assert_eq!(dot.matches("[label=").count(), 5);
        assert_eq!(dot.matches(" -- ").count(), 4);
        assert!(dot.contains("[label=\"{0,{0,1}}\", level=3]"));
    }

    #[test]
    fn csv_quotes_encodings() {
        let h = Hierarchy::build(2, 2, &Budget::default()).unwrap();
        let m = Metrics::new(&h);
        let d = text(|b| write_distance_csv(&m, 2, b));
        assert_eq!(d, "vertex,0,1,\"{0,1}\"\r\n0,0,2,1\r\n1,2,0,1\r\n\"{0,1}\",1,1,0\r\n");
        let x = text(|b| write_delta_csv(&h, 2, b));
        assert_eq!(x, "vertex,x0,x1\r\n0,1,0\r\n1,0,1\r\n\"{0,1}\",1/2,1/2\r\n");
        let e = text(|b| write_edges_csv(&h, 2, b));
        assert_eq!(e.lines().count(), 3);
    }

    #[test]
    fn power_table() {
        let h = Hierarchy::build(2, 4, &Budget::default()).unwrap();
        let rows = power_rows(&CountBook::with_default_work(&h), 2);
        let four: Vec<_> = rows.iter().filter(|r| r.n == 4).map(|r| r.ecount).collect();
        assert_eq!(four, vec![16, 33]);
        let csv = text(|b| write_power_csv(&rows, b));
        assert!(csv.starts_with("n,m,ecount,vcount,ratio\r\n"));
        assert!(csv.contains("4,1,16,12,1/9\r\n"));
        assert_eq!(text(|b| write_power_csv(&[], b)), "n,m,ecount,vcount,ratio\r\n");
    }
}
