use super::{BoundaryTag, Mesh, PeriodicPair, Point2};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeriodicDirection {
    X,
    Y,
    Both,
}

impl PeriodicDirection {
    fn axes(self) -> &'static [Axis] {
        match self {
            PeriodicDirection::X => &[Axis::X],
            PeriodicDirection::Y => &[Axis::Y],
            PeriodicDirection::Both => &[Axis::X, Axis::Y],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Axis {
    X,
    Y,
}

impl Axis {
    fn coord(self, p: Point2) -> f64 {
        match self {
            Axis::X => p.x,
            Axis::Y => p.y,
        }
    }
}

/// Identifies boundary facets on opposite sides of the bounding box.
///
/// Facets on the low side (`xmin` / `ymin`) become masters, their translates
/// on the high side become slaves. Matching tolerance is `1e-9` times the
/// bounding-box diameter.
pub fn pair_periodic(mut mesh: Mesh, direction: PeriodicDirection) -> Result<Mesh> {
    let bbox = mesh.bounding_box();
    let tol = 1e-9 * bbox.diameter();
    for &axis in direction.axes() {
        let (lo, hi) = match axis {
            Axis::X => (bbox.x0, bbox.x1),
            Axis::Y => (bbox.y0, bbox.y1),
        };
        let offset = match axis {
            Axis::X => Point2::new(hi - lo, 0.0),
            Axis::Y => Point2::new(0.0, hi - lo),
        };
        let on_side = |mesh: &Mesh, f: usize, value: f64| {
            let facet = &mesh.facets[f];
            facet.is_boundary()
                && facet.nodes.iter().all(|&v| (axis.coord(mesh.nodes[v]) - value).abs() <= tol)
        };
        let masters: Vec<usize> = (0..mesh.num_facets()).filter(|&f| on_side(&mesh, f, lo)).collect();
        let mut slaves: Vec<Option<usize>> = (0..mesh.num_facets())
            .filter(|&f| on_side(&mesh, f, hi))
            .map(Some)
            .collect();
        if masters.is_empty() {
            return Err(Error::Mesh(format!("no boundary facets on the low {axis:?} side")));
        }
        if masters.len() != slaves.len() {
            return Err(Error::Mesh(format!(
                "{} facets on the low {axis:?} side but {} on the high side",
                masters.len(),
                slaves.len()
            )));
        }

        for &m in &masters {
            let facet = &mesh.facets[m];
            if facet.tag != BoundaryTag::Wall {
                return Err(Error::UnmatchedFacet { facet: m, reason: format!("already tagged {}", facet.tag.name()) });
            }
            let [a, b] = facet.nodes.map(|v| mesh.nodes[v] + offset);
            let close = |p: Point2, q: Point2| (p - q).norm() <= tol;
            let mut found = None;
            for slot in slaves.iter_mut() {
                let Some(s) = *slot else { continue };
                let [c, d] = mesh.facets[s].nodes.map(|v| mesh.nodes[v]);
                let reversed = if close(a, c) && close(b, d) {
                    Some(false)
                } else if close(a, d) && close(b, c) {
                    Some(true)
                } else {
                    None
                };
                if let Some(reversed) = reversed {
                    found = Some((s, reversed));
                    *slot = None;
                    break;
                }
            }
            let (s, reversed) = found.ok_or_else(|| Error::UnmatchedFacet {
                facet: m,
                reason: format!("no translate by ({}, {})", offset.x, offset.y),
            })?;
            if (mesh.facets[m].length - mesh.facets[s].length).abs() > tol {
                return Err(Error::UnmatchedFacet { facet: m, reason: "partner length differs".into() });
            }
            mesh.facets[m].tag = BoundaryTag::PeriodicMaster;
            mesh.facets[s].tag = BoundaryTag::PeriodicSlave;
            mesh.periodic_pairs.push(PeriodicPair { master: m, slave: s, offset, reversed });
        }
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_uniform_square, Rect};

    #[test]
    fn structured_square_pairs_everything() {
        let mesh = generate_uniform_square(3, Rect::unit()).unwrap();
        let nb = mesh.boundary_facets().count();
        let mesh = pair_periodic(mesh, PeriodicDirection::Both).unwrap();
        assert_eq!(mesh.periodic_pairs.len(), nb / 2);
        assert!(mesh.boundary_facets().all(|f| mesh.facets[f].tag != BoundaryTag::Wall));
        for pair in &mesh.periodic_pairs {
            assert!((mesh.facets[pair.master].length - mesh.facets[pair.slave].length).abs() < 1e-12);
            // counterclockwise orientation makes opposite sides run in opposite directions
            assert!(pair.reversed);
        }
    }

    #[test]
    fn single_direction_leaves_walls() {
        let mesh = generate_uniform_square(2, Rect::unit()).unwrap();
        let mesh = pair_periodic(mesh, PeriodicDirection::X).unwrap();
        assert_eq!(mesh.periodic_pairs.len(), 4);
        let walls = mesh.boundary_facets().filter(|&f| mesh.facets[f].tag == BoundaryTag::Wall).count();
        assert_eq!(walls, 8);
    }

    #[test]
    fn mismatched_sides_are_rejected() {
        // bottom side split in two, top side in one
        let nodes = vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.5, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        let tris = vec![[0, 1, 4], [1, 3, 4], [1, 2, 3]];
        let mesh = Mesh::from_triangles(nodes, tris, 1.0).unwrap();
        assert!(pair_periodic(mesh, PeriodicDirection::Y).is_err());
    }
}
