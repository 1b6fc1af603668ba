use std::io::{self, Write};

use super::RootedGraph;

/// Writes `# <family> root=<o> vertices=<n> edges=<m>` followed by one
/// `edge_id u v |e| loop_flag` row per edge.
pub fn write_dump<W: Write>(g: &RootedGraph, mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "# {} root={} vertices={} edges={}",
        g.family().describe(),
        g.root(),
        g.vertex_count(),
        g.edge_count()
    )?;
    for (e, &[u, v]) in g.edges().iter().enumerate() {
        writeln!(out, "{e} {u} {v} {} {}", g.edge_distance(e), u8::from(u == v))?;
    }
    Ok(())
}
