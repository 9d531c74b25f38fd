//! Conforming triangular meshes with full facet-skeleton connectivity.

mod generate;
mod io;
mod periodic;

use std::collections::HashMap;
use std::ops::{Add, Mul, Sub};

use crate::{Error, Result};

pub use generate::{generate_rect_with_hole, generate_structured_rect, generate_uniform_square};
pub use io::{read_mesh, write_mesh};
pub use periodic::{pair_periodic, PeriodicDirection};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Clockwise rotation, `(x, y) -> (y, -x)`.
    pub fn perp(self) -> Self {
        Self::new(self.y, -self.x)
    }

    /// Counterclockwise rotation by 90 degrees.
    pub fn rot90(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Self) -> Self {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Self) -> Self {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Self {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub const fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub const fn unit() -> Self {
        Self::new(0.0, 1.0, 0.0, 1.0)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Element {
    /// Counterclockwise vertex ids.
    pub vertices: [usize; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    Interior,
    Wall,
    PeriodicMaster,
    PeriodicSlave,
}

impl BoundaryTag {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryTag::Interior => "interior",
            BoundaryTag::Wall => "wall",
            BoundaryTag::PeriodicMaster => "periodic_master",
            BoundaryTag::PeriodicSlave => "periodic_slave",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "interior" => Some(BoundaryTag::Interior),
            "wall" => Some(BoundaryTag::Wall),
            "periodic_master" => Some(BoundaryTag::PeriodicMaster),
            "periodic_slave" => Some(BoundaryTag::PeriodicSlave),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Facet {
    /// Ordered so that `left` sees them counterclockwise.
    pub nodes: [usize; 2],
    pub left: usize,
    pub right: Option<usize>,
    pub tag: BoundaryTag,
    /// Unit normal, outward from `left`.
    pub normal: Point2,
    /// `normal` rotated by +90 degrees; points from `nodes[0]` to `nodes[1]`.
    pub tangent: Point2,
    pub length: f64,
}

impl Facet {
    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }
}

/// Local edge `j` of an element joins its vertices `j` and `(j + 1) % 3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElementFacet {
    pub facet: usize,
    /// `+1` when the facet normal is outward for this element, `-1` otherwise.
    pub sign: f64,
}

/// A periodic facet pair: the slave facet is the master translated by `offset`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodicPair {
    pub master: usize,
    pub slave: usize,
    pub offset: Point2,
    /// True when the slave's node order runs opposite to the translated master.
    pub reversed: bool,
}

#[derive(Clone, Debug)]
pub struct Mesh {
    pub nodes: Vec<Point2>,
    pub elements: Vec<Element>,
    pub facets: Vec<Facet>,
    pub element_facets: Vec<[ElementFacet; 3]>,
    pub periodic_pairs: Vec<PeriodicPair>,
    /// Largest element diameter.
    pub h: f64,
    /// Nominal size the mesh was generated with (cell side, target edge length).
    pub size_parameter: f64,
}

impl Mesh {
    /// Builds the facet skeleton from raw triangles.
    ///
    /// Elements are reoriented counterclockwise; degenerate ones are rejected.
    /// Boundary facets default to [`BoundaryTag::Wall`].
    pub fn from_triangles(nodes: Vec<Point2>, triangles: Vec<[usize; 3]>, size_parameter: f64) -> Result<Self> {
        if let Some(p) = nodes.iter().find(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::Mesh(format!("non-finite node ({}, {})", p.x, p.y)));
        }
        let mut elements = Vec::with_capacity(triangles.len());
        for (e, tri) in triangles.into_iter().enumerate() {
            let [a, b, c] = tri;
            if a == b || b == c || a == c {
                return Err(Error::Mesh(format!("element {e} repeats a vertex")));
            }
            if tri.iter().any(|&v| v >= nodes.len()) {
                return Err(Error::Mesh(format!("element {e} references a missing node")));
            }
            let area2 = (nodes[b] - nodes[a]).cross(nodes[c] - nodes[a]);
            let scale = (nodes[b] - nodes[a]).norm().max((nodes[c] - nodes[a]).norm());
            if area2.abs() <= 1e-14 * scale * scale {
                return Err(Error::Mesh(format!("element {e} is degenerate")));
            }
            let vertices = if area2 > 0.0 { [a, b, c] } else { [a, c, b] };
            elements.push(Element { vertices });
        }

        let mut facets: Vec<Facet> = Vec::new();
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut element_facets = Vec::with_capacity(elements.len());
        for (e, el) in elements.iter().enumerate() {
            let mut local = [ElementFacet { facet: 0, sign: 1.0 }; 3];
            for (j, slot) in local.iter_mut().enumerate() {
                let a = el.vertices[j];
                let b = el.vertices[(j + 1) % 3];
                let key = (a.min(b), a.max(b));
                match lookup.get(&key) {
                    Some(&f) => {
                        let facet = &mut facets[f];
                        if facet.right.is_some() {
                            return Err(Error::Mesh(format!("edge ({a}, {b}) is shared by more than two elements")));
                        }
                        if facet.nodes != [b, a] {
                            return Err(Error::Mesh(format!("elements {} and {e} are inconsistently oriented", facet.left)));
                        }
                        facet.right = Some(e);
                        facet.tag = BoundaryTag::Interior;
                        *slot = ElementFacet { facet: f, sign: -1.0 };
                    }
                    None => {
                        let d = nodes[b] - nodes[a];
                        let length = d.norm();
                        let tangent = d * (1.0 / length);
                        let normal = Point2::new(tangent.y, -tangent.x);
                        lookup.insert(key, facets.len());
                        *slot = ElementFacet { facet: facets.len(), sign: 1.0 };
                        facets.push(Facet {
                            nodes: [a, b],
                            left: e,
                            right: None,
                            tag: BoundaryTag::Wall,
                            normal,
                            tangent: normal.rot90(),
                            length,
                        });
                    }
                }
            }
            element_facets.push(local);
        }

        let h = elements
            .iter()
            .map(|el| {
                let [a, b, c] = el.vertices.map(|v| nodes[v]);
                (b - a).norm().max((c - b).norm()).max((a - c).norm())
            })
            .fold(0.0, f64::max);

        Ok(Mesh {
            nodes,
            elements,
            facets,
            element_facets,
            periodic_pairs: Vec::new(),
            h,
            size_parameter,
        })
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn vertices(&self, element: usize) -> [Point2; 3] {
        self.elements[element].vertices.map(|v| self.nodes[v])
    }

    /// Signed area, positive for counterclockwise elements.
    pub fn area(&self, element: usize) -> f64 {
        let [a, b, c] = self.vertices(element);
        0.5 * (b - a).cross(c - a)
    }

    pub fn centroid(&self, element: usize) -> Point2 {
        let [a, b, c] = self.vertices(element);
        (a + b + c) * (1.0 / 3.0)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_elements()).map(|e| self.area(e)).sum()
    }

    /// Outward unit normal of local edge `j` of `element`.
    pub fn outward_normal(&self, element: usize, j: usize) -> Point2 {
        let ef = self.element_facets[element][j];
        self.facets[ef.facet].normal * ef.sign
    }

    pub fn boundary_facets(&self) -> impl Iterator<Item = usize> + '_ {
        self.facets.iter().enumerate().filter(|(_, f)| f.is_boundary()).map(|(i, _)| i)
    }

    pub fn bounding_box(&self) -> Rect {
        let mut r = Rect::new(f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in &self.nodes {
            r.x0 = r.x0.min(p.x);
            r.x1 = r.x1.max(p.x);
            r.y0 = r.y0.min(p.y);
            r.y1 = r.y1.max(p.y);
        }
        r
    }

    /// `V - E + F` over nodes, facets and elements (periodic pairs are not merged).
    pub fn euler_characteristic(&self) -> i64 {
        self.nodes.len() as i64 - self.facets.len() as i64 + self.elements.len() as i64
    }

    /// Barycentric coordinates of `p` with respect to `element`.
    pub fn barycentric(&self, element: usize, p: Point2) -> [f64; 3] {
        let [a, b, c] = self.vertices(element);
        let det = (b - a).cross(c - a);
        let l1 = (p - a).cross(c - a) / det;
        let l2 = (b - a).cross(p - a) / det;
        [1.0 - l1 - l2, l1, l2]
    }

    pub fn contains(&self, element: usize, p: Point2) -> bool {
        self.barycentric(element, p).iter().all(|&l| l >= -1e-10)
    }

    /// First element containing `p` (linear scan).
    pub fn locate(&self, p: Point2) -> Option<usize> {
        (0..self.num_elements()).find(|&e| self.contains(e, p))
    }
}
