use spade::{ConstrainedDelaunayTriangulation, Triangulation};

use super::{Mesh, Point2, Rect};
use crate::{Error, Result};

fn check_bounds(bounds: &Rect) -> Result<()> {
    let ok = bounds.width() > 0.0 && bounds.height() > 0.0 && bounds.width().is_finite() && bounds.height().is_finite();
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("degenerate bounds {bounds:?}")))
    }
}

/// `(2^levels)^2` square cells, each split along its bottom-left to top-right
/// diagonal. All outer facets are walls.
pub fn generate_uniform_square(levels: u32, bounds: Rect) -> Result<Mesh> {
    if levels == 0 {
        return Err(Error::InvalidParameter("levels must be at least 1".into()));
    }
    if levels > 12 {
        return Err(Error::InvalidParameter(format!("{levels} refinement levels is too many")));
    }
    let n = 1usize << levels;
    generate_structured_rect(n, n, bounds)
}

/// Structured `nx x ny` grid with every cell split along the same diagonal.
pub fn generate_structured_rect(nx: usize, ny: usize, bounds: Rect) -> Result<Mesh> {
    check_bounds(&bounds)?;
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidParameter("grid needs at least one cell per direction".into()));
    }
    let dx = bounds.width() / nx as f64;
    let dy = bounds.height() / ny as f64;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let x = if i == nx { bounds.x1 } else { bounds.x0 + i as f64 * dx };
            let y = if j == ny { bounds.y1 } else { bounds.y0 + j as f64 * dy };
            nodes.push(Point2::new(x, y));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    Mesh::from_triangles(nodes, triangles, dx.max(dy))
}

/// Unstructured triangulation of a rectangle minus a disc.
///
/// The hole is replaced by an inscribed polygon with edges no longer than
/// `target_h`. Opposite outer sides carry identical node spacings so the
/// result can be passed to [`super::pair_periodic`]. Every boundary facet
/// starts out as a wall.
pub fn generate_rect_with_hole(bounds: Rect, center: Point2, radius: f64, target_h: f64) -> Result<Mesh> {
    check_bounds(&bounds)?;
    if !(radius > 0.0) || !(target_h > 0.0) {
        return Err(Error::InvalidParameter("radius and target_h must be positive".into()));
    }
    let clearance = (center.x - bounds.x0)
        .min(bounds.x1 - center.x)
        .min(center.y - bounds.y0)
        .min(bounds.y1 - center.y)
        - radius;
    if clearance <= 0.0 {
        return Err(Error::InvalidParameter("hole touches or crosses the outer boundary".into()));
    }

    let mut cdt: ConstrainedDelaunayTriangulation<spade::Point2<f64>> = ConstrainedDelaunayTriangulation::new();
    let insert = |cdt: &mut ConstrainedDelaunayTriangulation<spade::Point2<f64>>, p: Point2| {
        cdt.insert(spade::Point2::new(p.x, p.y))
            .map_err(|e| Error::Mesh(format!("triangulation insert failed: {e:?}")))
    };

    // Outer boundary, counterclockwise, uniform per side.
    let nx = (bounds.width() / target_h).ceil() as usize;
    let ny = (bounds.height() / target_h).ceil() as usize;
    let lerp = |a: f64, b: f64, i: usize, n: usize| if i == n { b } else { a + (b - a) * i as f64 / n as f64 };
    let mut outer = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        outer.push(Point2::new(lerp(bounds.x0, bounds.x1, i, nx), bounds.y0));
    }
    for j in 0..ny {
        outer.push(Point2::new(bounds.x1, lerp(bounds.y0, bounds.y1, j, ny)));
    }
    for i in (1..=nx).rev() {
        outer.push(Point2::new(lerp(bounds.x0, bounds.x1, i, nx), bounds.y1));
    }
    for j in (1..=ny).rev() {
        outer.push(Point2::new(bounds.x0, lerp(bounds.y0, bounds.y1, j, ny)));
    }
    let mut outer_handles = Vec::with_capacity(outer.len());
    for &p in &outer {
        outer_handles.push(insert(&mut cdt, p)?);
    }

    // Inscribed hole polygon: chord 2 r sin(pi / n) <= 2 pi r / n <= target_h.
    let n_hole = ((2.0 * std::f64::consts::PI * radius / target_h).ceil() as usize).max(8);
    let mut hole_handles = Vec::with_capacity(n_hole);
    for i in 0..n_hole {
        let theta = 2.0 * std::f64::consts::PI * i as f64 / n_hole as f64;
        let p = center + Point2::new(theta.cos(), theta.sin()) * radius;
        hole_handles.push(insert(&mut cdt, p)?);
    }

    // Interior points on a triangular lattice, kept away from both boundaries.
    let row = target_h * 3f64.sqrt() / 2.0;
    let margin = 0.6 * target_h;
    let mut j = 0usize;
    loop {
        let y = bounds.y0 + j as f64 * row;
        if y > bounds.y1 {
            break;
        }
        let shift = if j % 2 == 1 { 0.5 * target_h } else { 0.0 };
        let mut i = 0usize;
        loop {
            let x = bounds.x0 + shift + i as f64 * target_h;
            if x > bounds.x1 {
                break;
            }
            let p = Point2::new(x, y);
            let inside_outer = x - bounds.x0 >= margin
                && bounds.x1 - x >= margin
                && y - bounds.y0 >= margin
                && bounds.y1 - y >= margin;
            if inside_outer && (p - center).norm() >= radius + margin {
                insert(&mut cdt, p)?;
            }
            i += 1;
        }
        j += 1;
    }

    for k in 0..outer_handles.len() {
        cdt.add_constraint(outer_handles[k], outer_handles[(k + 1) % outer_handles.len()]);
    }
    for k in 0..n_hole {
        cdt.add_constraint(hole_handles[k], hole_handles[(k + 1) % n_hole]);
    }

    let nodes: Vec<Point2> = cdt
        .vertices()
        .map(|v| {
            let p = v.position();
            Point2::new(p.x, p.y)
        })
        .collect();
    let mut is_hole = vec![false; nodes.len()];
    for h in &hole_handles {
        is_hole[h.index()] = true;
    }
    let triangles: Vec<[usize; 3]> = cdt
        .inner_faces()
        .map(|f| f.vertices().map(|v| v.fix().index()))
        .filter(|tri| !tri.iter().all(|&v| is_hole[v]))
        .collect();

    Mesh::from_triangles(nodes, triangles, target_h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::BoundaryTag;

    #[test]
    fn level_one_counts() {
        let mesh = generate_uniform_square(1, Rect::unit()).unwrap();
        assert_eq!(mesh.num_elements(), 8);
        assert_eq!(mesh.num_facets(), 16);
        assert_eq!(mesh.nodes.len(), 9);
        assert_eq!(mesh.euler_characteristic(), 1);
        assert!((mesh.h - 0.5 * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(mesh.size_parameter, 0.5);
    }

    #[test]
    fn level_three_adjacency() {
        let mesh = generate_uniform_square(3, Rect::unit()).unwrap();
        assert_eq!(mesh.num_elements(), 128);
        let mut uses = vec![0usize; mesh.num_facets()];
        for ef in mesh.element_facets.iter().flatten() {
            uses[ef.facet] += 1;
        }
        for (f, facet) in mesh.facets.iter().enumerate() {
            let expected = if facet.is_boundary() { 1 } else { 2 };
            assert_eq!(uses[f], expected);
            assert_eq!(facet.tag == BoundaryTag::Wall, facet.is_boundary());
        }
        assert!((mesh.total_area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_zero_side() {
        assert!(generate_uniform_square(2, Rect::new(0.0, 0.0, 0.0, 1.0)).is_err());
        assert!(generate_uniform_square(0, Rect::unit()).is_err());
    }

    #[test]
    fn hole_mesh_is_valid() {
        let bounds = Rect::new(-10.0, 10.0, -10.0, 10.0);
        let center = Point2::new(3.0, 0.0);
        let mesh = generate_rect_with_hole(bounds, center, 1.0, 0.5).unwrap();
        assert_eq!(mesh.euler_characteristic(), 0);
        for e in 0..mesh.num_elements() {
            assert!(mesh.area(e) > 0.0);
        }
        // every facet on the polygon is a wall
        let mut on_hole = 0;
        for facet in &mesh.facets {
            let [a, b] = facet.nodes.map(|v| mesh.nodes[v]);
            if ((a - center).norm() - 1.0).abs() < 1e-12 && ((b - center).norm() - 1.0).abs() < 1e-12 {
                on_hole += 1;
                assert_eq!(facet.tag, BoundaryTag::Wall);
                assert!(facet.length <= 0.5 + 1e-12);
            }
        }
        let n_hole = (2.0 * std::f64::consts::PI / 0.5).ceil() as usize;
        assert_eq!(on_hole, n_hole);
        let polygon = 0.5 * n_hole as f64 * (2.0 * std::f64::consts::PI / n_hole as f64).sin();
        assert!((mesh.total_area() - (400.0 - polygon)).abs() < 1e-9);
    }

    #[test]
    fn hole_touching_boundary_is_rejected() {
        let bounds = Rect::new(-10.0, 10.0, -10.0, 10.0);
        assert!(generate_rect_with_hole(bounds, Point2::new(9.0, 0.0), 1.0, 0.5).is_err());
    }
}
