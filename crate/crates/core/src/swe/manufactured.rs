use std::f64::consts::{PI, SQRT_2};

use crate::fespace::Spaces;
use crate::mesh::Point2;

/// Standing wave on the unit square with walls, `Phi = 1`, `f = 0`.
///
/// `phi = cos(pi x) cos(pi y) cos(sqrt2 pi t)`, `u = w_t`, `-div w = phi`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ManufacturedSolution;

/// `L2` projections of the exact fields at one instant.
#[derive(Clone, Debug)]
pub struct ExactState {
    pub t: f64,
    pub phi: Vec<f64>,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
}

impl ManufacturedSolution {
    pub fn omega(&self) -> f64 {
        SQRT_2 * PI
    }

    pub fn phi(&self, p: Point2, t: f64) -> f64 {
        (PI * p.x).cos() * (PI * p.y).cos() * (self.omega() * t).cos()
    }

    pub fn grad_phi(&self, p: Point2, t: f64) -> [f64; 2] {
        let c = -PI * (self.omega() * t).cos();
        [c * (PI * p.x).sin() * (PI * p.y).cos(), c * (PI * p.x).cos() * (PI * p.y).sin()]
    }

    fn profile(&self, p: Point2) -> [f64; 2] {
        [(PI * p.x).sin() * (PI * p.y).cos(), (PI * p.x).cos() * (PI * p.y).sin()]
    }

    pub fn u(&self, p: Point2, t: f64) -> [f64; 2] {
        let s = (self.omega() * t).sin() / SQRT_2;
        let v = self.profile(p);
        [s * v[0], s * v[1]]
    }

    pub fn w(&self, p: Point2, t: f64) -> [f64; 2] {
        let s = -(self.omega() * t).cos() / (2.0 * PI);
        let v = self.profile(p);
        [s * v[0], s * v[1]]
    }

    /// `-div w`, which equals `phi`.
    pub fn minus_div_w(&self, p: Point2, t: f64) -> f64 {
        let s = -(self.omega() * t).cos() / (2.0 * PI);
        -s * 2.0 * PI * (PI * p.x).cos() * (PI * p.y).cos()
    }

    /// `rot w`, identically zero.
    pub fn sigma(&self, _p: Point2, _t: f64) -> f64 {
        0.0
    }

    /// `d w / dt`, which equals `Phi u` with `Phi = 1`.
    pub fn w_dot(&self, p: Point2, t: f64) -> [f64; 2] {
        let s = self.omega() * (self.omega() * t).sin() / (2.0 * PI);
        let v = self.profile(p);
        [s * v[0], s * v[1]]
    }

    pub fn exact_state(&self, spaces: &Spaces, t: f64) -> ExactState {
        ExactState {
            t,
            phi: spaces.project_scalar(|p| self.phi(p, t)),
            u: spaces.project_vector(|p| self.u(p, t)),
            w: spaces.project_vector(|p| self.w(p, t)),
        }
    }
}
