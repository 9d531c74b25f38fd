//! Plain-text mesh format.
//!
//! ```text
//! ndim=2 nnodes=<N> nelems=<M> nfacets_tagged=<K>
//! x y              (N lines)
//! v0 v1 v2         (M lines)
//! v0 v1 tag        (K lines, tag in wall | periodic_master | periodic_slave)
//! ```
//!
//! Tokens are whitespace separated and `#` starts a comment. Boundary facets
//! without a tag line are walls. Periodic tags are re-derived by geometric
//! pairing and must agree with the file.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::{pair_periodic, BoundaryTag, Mesh, PeriodicDirection, Point2};
use crate::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse().map_err(|_| parse_err(line, format!("bad number `{tok}`")))
}

pub fn read_mesh<R: BufRead>(reader: R) -> Result<Mesh> {
    let mut lines = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim().to_string();
        if !body.is_empty() {
            lines.push((i + 1, body));
        }
    }
    let mut it = lines.into_iter();
    let (hline, header) = it.next().ok_or_else(|| parse_err(0, "empty mesh file"))?;
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for tok in header.split_whitespace() {
        let (key, value) = tok.split_once('=').ok_or_else(|| parse_err(hline, format!("bad header token `{tok}`")))?;
        counts.insert(key, parse_num(value, hline)?);
    }
    let get = |key: &str| counts.get(key).copied().ok_or_else(|| parse_err(hline, format!("header lacks `{key}`")));
    if get("ndim")? != 2 {
        return Err(parse_err(hline, "only ndim=2 is supported"));
    }
    let (nn, ne, nt) = (get("nnodes")?, get("nelems")?, get("nfacets_tagged")?);

    let mut next_fields = |want: usize, what: &str| -> Result<(usize, Vec<String>)> {
        let (ln, body) = it.next().ok_or_else(|| parse_err(0, format!("file ends before all {what} were read")))?;
        let fields: Vec<String> = body.split_whitespace().map(str::to_string).collect();
        if fields.len() != want {
            return Err(parse_err(ln, format!("expected {want} fields for {what}, found {}", fields.len())));
        }
        Ok((ln, fields))
    };

    let mut nodes = Vec::with_capacity(nn);
    for _ in 0..nn {
        let (ln, f) = next_fields(2, "nodes")?;
        nodes.push(Point2::new(parse_num(&f[0], ln)?, parse_num(&f[1], ln)?));
    }
    let mut tris = Vec::with_capacity(ne);
    for _ in 0..ne {
        let (ln, f) = next_fields(3, "elements")?;
        tris.push([parse_num(&f[0], ln)?, parse_num(&f[1], ln)?, parse_num(&f[2], ln)?]);
    }
    let mut tags = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (ln, f) = next_fields(3, "tagged facets")?;
        let a: usize = parse_num(&f[0], ln)?;
        let b: usize = parse_num(&f[1], ln)?;
        let tag = BoundaryTag::from_name(&f[2])
            .filter(|t| *t != BoundaryTag::Interior)
            .ok_or_else(|| parse_err(ln, format!("unknown boundary tag `{}`", f[2])))?;
        tags.push((ln, a, b, tag));
    }
    if let Some((ln, _)) = it.next() {
        return Err(parse_err(ln, "trailing data after tagged facets"));
    }

    let mesh = Mesh::from_triangles(nodes, tris, 0.0)?;
    let mut mesh = Mesh { size_parameter: mesh.h, ..mesh };
    let lookup: HashMap<(usize, usize), usize> = mesh
        .facets
        .iter()
        .enumerate()
        .map(|(f, facet)| {
            let [a, b] = facet.nodes;
            ((a.min(b), a.max(b)), f)
        })
        .collect();

    let mut wanted = HashMap::new();
    for &(ln, a, b, tag) in &tags {
        let f = *lookup
            .get(&(a.min(b), a.max(b)))
            .ok_or_else(|| parse_err(ln, format!("({a}, {b}) is not a mesh edge")))?;
        if !mesh.facets[f].is_boundary() {
            return Err(parse_err(ln, format!("({a}, {b}) is an interior edge")));
        }
        wanted.insert(f, tag);
    }

    let bbox = mesh.bounding_box();
    let tol = 1e-9 * bbox.diameter();
    let mut dir_x = false;
    let mut dir_y = false;
    for (&f, &tag) in &wanted {
        if tag == BoundaryTag::PeriodicMaster {
            let [a, b] = mesh.facets[f].nodes.map(|v| mesh.nodes[v]);
            dir_x |= (a.x - bbox.x0).abs() <= tol && (b.x - bbox.x0).abs() <= tol;
            dir_y |= (a.y - bbox.y0).abs() <= tol && (b.y - bbox.y0).abs() <= tol;
        }
    }
    let direction = match (dir_x, dir_y) {
        (true, true) => Some(PeriodicDirection::Both),
        (true, false) => Some(PeriodicDirection::X),
        (false, true) => Some(PeriodicDirection::Y),
        (false, false) => None,
    };
    if let Some(direction) = direction {
        mesh = pair_periodic(mesh, direction)?;
    }
    for f in mesh.boundary_facets() {
        let want = wanted.get(&f).copied().unwrap_or(BoundaryTag::Wall);
        if mesh.facets[f].tag != want {
            return Err(Error::UnmatchedFacet {
                facet: f,
                reason: format!("tagged {} in file but pairs as {}", want.name(), mesh.facets[f].tag.name()),
            });
        }
    }
    Ok(mesh)
}

pub fn write_mesh<W: Write>(mesh: &Mesh, mut out: W) -> Result<()> {
    let tagged: Vec<usize> = mesh.boundary_facets().collect();
    writeln!(
        out,
        "ndim=2 nnodes={} nelems={} nfacets_tagged={}",
        mesh.nodes.len(),
        mesh.num_elements(),
        tagged.len()
    )?;
    for p in &mesh.nodes {
        writeln!(out, "{:e} {:e}", p.x, p.y)?;
    }
    for el in &mesh.elements {
        let [a, b, c] = el.vertices;
        writeln!(out, "{a} {b} {c}")?;
    }
    for f in tagged {
        let facet = &mesh.facets[f];
        writeln!(out, "{} {} {}", facet.nodes[0], facet.nodes[1], facet.tag.name())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_uniform_square, Rect};

    #[test]
    fn round_trip_preserves_topology() {
        let mesh = generate_uniform_square(2, Rect::new(-1.0, 2.0, 0.0, 3.0)).unwrap();
        let mesh = pair_periodic(mesh, PeriodicDirection::Y).unwrap();
        let mut buf = Vec::new();
        write_mesh(&mesh, &mut buf).unwrap();
        let back = read_mesh(buf.as_slice()).unwrap();
        assert_eq!(back.nodes, mesh.nodes);
        assert_eq!(back.elements, mesh.elements);
        assert_eq!(back.num_facets(), mesh.num_facets());
        assert_eq!(back.periodic_pairs, mesh.periodic_pairs);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# two triangles\nndim=2 nnodes=4 nelems=2 nfacets_tagged=0\n\n0 0\n1 0 # corner\n1 1\n0 1\n0 1 2\n0 2 3\n";
        let mesh = read_mesh(text.as_bytes()).unwrap();
        assert_eq!(mesh.num_elements(), 2);
        assert_eq!(mesh.boundary_facets().count(), 4);
    }

    #[test]
    fn reports_bad_lines() {
        let text = "ndim=2 nnodes=1 nelems=0 nfacets_tagged=0\n0 zero\n";
        match read_mesh(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let text = "ndim=3 nnodes=0 nelems=0 nfacets_tagged=0\n";
        assert!(read_mesh(text.as_bytes()).is_err());
    }
}
