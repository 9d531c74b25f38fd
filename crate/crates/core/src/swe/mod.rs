//! Problem definitions and the two semidiscrete shallow-water systems.

mod manufactured;
mod phiu;
mod uw;

use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Arc;

use crate::assembly::{assemble_all, assemble_bathymetry_load, PhysicalParams};
use crate::elliptic::{initialize_state, InitSolution};
use crate::fespace::Spaces;
use crate::mesh::{
    generate_rect_with_hole, generate_structured_rect, generate_uniform_square, pair_periodic, read_mesh, Mesh,
    PeriodicDirection, Point2, Rect,
};
use crate::{Error, Result};

pub use manufactured::{ExactState, ManufacturedSolution};
pub use phiu::PhiuSystem;
pub use uw::{EnergyParts, UwSystem};

#[derive(Clone, Debug, PartialEq)]
pub enum Geometry {
    /// `(2^levels)^2` cells on `bounds`.
    UniformSquare { bounds: Rect, levels: u32 },
    Rectangle { bounds: Rect, nx: usize, ny: usize },
    RectangleWithHole { bounds: Rect, center: Point2, radius: f64, h: f64 },
    MeshFile(PathBuf),
}

impl Geometry {
    pub fn build(&self) -> Result<Mesh> {
        match self {
            Geometry::UniformSquare { bounds, levels } => generate_uniform_square(*levels, *bounds),
            Geometry::Rectangle { bounds, nx, ny } => generate_structured_rect(*nx, *ny, *bounds),
            Geometry::RectangleWithHole { bounds, center, radius, h } => {
                generate_rect_with_hole(*bounds, *center, *radius, *h)
            }
            Geometry::MeshFile(path) => {
                let file = std::fs::File::open(path)?;
                read_mesh(std::io::BufReader::new(file))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryRegime {
    Wall,
    /// Outer box periodic in both directions; any inner boundary stays a wall.
    PeriodicOuter,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialData {
    Zero,
    /// The manufactured standing wave at `t = 0`.
    StandingWave,
    /// `phi = offset + exp(-(x - x0)^2 / 2)`, `u = (exp(-(x - x0)^2 / 2), 0)`.
    Wavefront { offset: f64, x0: f64 },
    /// `phi = a exp(-r (x - x0)^2) exp(-r (y - y0)^2)`, `u = 0`.
    GaussianPulse { amplitude: f64, center: Point2, rate: f64 },
}

impl InitialData {
    pub fn phi(&self, p: Point2) -> f64 {
        match *self {
            InitialData::Zero => 0.0,
            InitialData::StandingWave => ManufacturedSolution.phi(p, 0.0),
            InitialData::Wavefront { offset, x0 } => offset + (-(p.x - x0).powi(2) / 2.0).exp(),
            InitialData::GaussianPulse { amplitude, center, rate } => {
                amplitude * (-rate * (p.x - center.x).powi(2)).exp() * (-rate * (p.y - center.y).powi(2)).exp()
            }
        }
    }

    pub fn grad_phi(&self, p: Point2) -> [f64; 2] {
        match *self {
            InitialData::Zero => [0.0, 0.0],
            InitialData::StandingWave => ManufacturedSolution.grad_phi(p, 0.0),
            InitialData::Wavefront { x0, .. } => [-(p.x - x0) * (-(p.x - x0).powi(2) / 2.0).exp(), 0.0],
            InitialData::GaussianPulse { center, rate, .. } => {
                let v = self.phi(p);
                [-2.0 * rate * (p.x - center.x) * v, -2.0 * rate * (p.y - center.y) * v]
            }
        }
    }

    pub fn u(&self, p: Point2) -> [f64; 2] {
        match *self {
            InitialData::Wavefront { x0, .. } => [(-(p.x - x0).powi(2) / 2.0).exp(), 0.0],
            InitialData::StandingWave => ManufacturedSolution.u(p, 0.0),
            _ => [0.0, 0.0],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bathymetry {
    Flat,
    /// `-1.1 + 3/5 sum beta(x - 5, y - y_i)` for `x >= 0` with mounds at `y_i = 0, 3, -3`,
    /// zero for `x < 0`; `beta(x, y) = exp(-2 x^2) exp(-2 y^2)`.
    ShelfWithMounds,
}

impl Bathymetry {
    const MOUNDS: [f64; 3] = [0.0, 3.0, -3.0];

    fn beta(x: f64, y: f64) -> f64 {
        (-2.0 * x * x).exp() * (-2.0 * y * y).exp()
    }

    pub fn value(&self, p: Point2) -> f64 {
        match self {
            Bathymetry::Flat => 0.0,
            Bathymetry::ShelfWithMounds if p.x < 0.0 => 0.0,
            Bathymetry::ShelfWithMounds => {
                -1.1 + 0.6 * Self::MOUNDS.iter().map(|yc| Self::beta(p.x - 5.0, p.y - yc)).sum::<f64>()
            }
        }
    }

    /// Pointwise gradient; the step at `x = 0` carries no load.
    pub fn grad(&self, p: Point2) -> [f64; 2] {
        match self {
            Bathymetry::Flat => [0.0, 0.0],
            Bathymetry::ShelfWithMounds if p.x < 0.0 => [0.0, 0.0],
            Bathymetry::ShelfWithMounds => Self::MOUNDS.iter().fold([0.0, 0.0], |acc, yc| {
                let b = 0.6 * Self::beta(p.x - 5.0, p.y - yc);
                [acc[0] - 4.0 * (p.x - 5.0) * b, acc[1] - 4.0 * (p.y - yc) * b]
            }),
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, Bathymetry::Flat)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeStepRule {
    /// `dt = C h` with `h` the mesh size parameter.
    Courant(f64),
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub geometry: Geometry,
    pub boundary: BoundaryRegime,
    pub params: PhysicalParams,
    pub initial: InitialData,
    pub bathymetry: Bathymetry,
    pub degree: usize,
    pub final_time: f64,
    pub time_step: TimeStepRule,
    pub integrator: String,
}

impl ProblemSpec {
    /// Standing wave on the unit square: walls, `Phi = 1`, `f = 0`, `T = 0.5`,
    /// `dt = 0.1 h / (k + 1)` and the explicit method of order `k + 2`.
    pub fn standing_wave(levels: u32, degree: usize) -> Self {
        let order = if degree + 2 == 5 { 6 } else { degree + 2 };
        ProblemSpec {
            geometry: Geometry::UniformSquare { bounds: Rect::unit(), levels },
            boundary: BoundaryRegime::Wall,
            params: PhysicalParams::default(),
            initial: InitialData::StandingWave,
            bathymetry: Bathymetry::Flat,
            degree,
            final_time: 0.5,
            time_step: TimeStepRule::Courant(0.1 / (degree as f64 + 1.0)),
            integrator: format!("seprk{order}"),
        }
    }

    /// Wavefront hitting a cylinder in a periodic box, `f = 0.5`, midpoint rule.
    pub fn pier(h: f64, degree: usize) -> Self {
        ProblemSpec {
            geometry: Geometry::RectangleWithHole {
                bounds: Rect::new(-10.0, 10.0, -10.0, 10.0),
                center: Point2::new(3.0, 0.0),
                radius: 1.0,
                h,
            },
            boundary: BoundaryRegime::PeriodicOuter,
            params: PhysicalParams { f0: 0.5, ..PhysicalParams::default() },
            initial: InitialData::Wavefront { offset: 1.0, x0: -5.0 },
            bathymetry: Bathymetry::Flat,
            degree,
            final_time: 20.0,
            time_step: TimeStepRule::Courant(5e-2),
            integrator: "midpoint".into(),
        }
    }

    /// Gaussian pulse running onto a shelf with three mounds, walls, `f = 0.1`.
    pub fn shelf(h: f64, degree: usize) -> Self {
        let bounds = Rect::new(-20.0, 10.0, -5.0, 5.0);
        let nx = (bounds.width() / h).ceil().max(1.0) as usize;
        let ny = (bounds.height() / h).ceil().max(1.0) as usize;
        ProblemSpec {
            geometry: Geometry::Rectangle { bounds, nx, ny },
            boundary: BoundaryRegime::Wall,
            params: PhysicalParams { f0: 0.1, ..PhysicalParams::default() },
            initial: InitialData::GaussianPulse { amplitude: 10.0, center: Point2::new(-5.0, 0.0), rate: 2.0 },
            bathymetry: Bathymetry::ShelfWithMounds,
            degree,
            final_time: 10.0,
            time_step: TimeStepRule::Courant(5e-2),
            integrator: "midpoint".into(),
        }
    }

    pub fn build_mesh(&self) -> Result<Mesh> {
        let mesh = self.geometry.build()?;
        match self.boundary {
            BoundaryRegime::Wall => Ok(mesh),
            BoundaryRegime::PeriodicOuter if !mesh.periodic_pairs.is_empty() => Ok(mesh),
            BoundaryRegime::PeriodicOuter => pair_periodic(mesh, PeriodicDirection::Both),
        }
    }

    pub fn build_spaces(&self) -> Result<Arc<Spaces>> {
        Ok(Arc::new(Spaces::new(Arc::new(self.build_mesh()?), self.degree)?))
    }

    /// `(dt, steps)` with `steps dt = T` exactly; `dt` never exceeds the rule's value.
    pub fn time_grid(&self, h: f64) -> Result<(f64, usize)> {
        let dt = match self.time_step {
            TimeStepRule::Courant(c) => c * h,
            TimeStepRule::Fixed(dt) => dt,
        };
        if !(self.final_time >= 0.0) || !self.final_time.is_finite() {
            return Err(Error::InvalidParameter(format!("final time {}", self.final_time)));
        }
        if self.final_time == 0.0 {
            return Ok((dt.max(0.0), 0));
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!("time step {dt}")));
        }
        let steps = (self.final_time / dt - 1e-9).ceil().max(1.0) as usize;
        Ok((self.final_time / steps as f64, steps))
    }
}

/// A point on a trajectory: `y = [w; u]` or `[phi; u]`.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub t: f64,
    pub y: Vec<f64>,
}

/// An assembled `(u, w)` problem and its initial state.
#[derive(Debug)]
pub struct UwProblem {
    pub system: Arc<UwSystem>,
    pub state: State,
    pub init: InitSolution,
}

fn bathymetry_load(spec: &ProblemSpec, spaces: &Spaces) -> Option<Vec<f64>> {
    if spec.bathymetry.is_flat() {
        return None;
    }
    let b = spec.bathymetry;
    Some(assemble_bathymetry_load(spaces, move |p| b.grad(p), spec.params.phi_mean))
}

pub fn build_uw_system(spec: &ProblemSpec) -> Result<UwProblem> {
    let spaces = spec.build_spaces()?;
    build_uw_system_on(spec, spaces)
}

pub fn build_uw_system_on(spec: &ProblemSpec, spaces: Arc<Spaces>) -> Result<UwProblem> {
    let matrices = assemble_all(&spaces, &spec.params)?;
    let initial = spec.initial;
    let (w, u, init) = initialize_state(&spaces, &matrices, |p| initial.grad_phi(p), |p| initial.u(p))?;
    log::info!(
        "(u, w) system: {} elements, k = {}, dim V_h = {}, init residual {:.2e}",
        spaces.num_elements(),
        spaces.k,
        spaces.dim_v(),
        init.residual
    );
    let load = bathymetry_load(spec, &spaces);
    let system = UwSystem::new(spaces, matrices, load)?;
    let mut y = w;
    y.extend_from_slice(&u);
    Ok(UwProblem { system: Arc::new(system), state: State { t: 0.0, y }, init })
}

/// An assembled `(phi, u)` problem and its initial state.
#[derive(Debug)]
pub struct PhiuProblem {
    pub system: Arc<PhiuSystem>,
    pub state: State,
}

/// `phi` starts from the geopotential of the `(u, w)` initialization so both
/// schemes leave from the same discrete data.
pub fn build_phiu_system(spec: &ProblemSpec) -> Result<PhiuProblem> {
    let spaces = spec.build_spaces()?;
    build_phiu_system_on(spec, spaces)
}

pub fn build_phiu_system_on(spec: &ProblemSpec, spaces: Arc<Spaces>) -> Result<PhiuProblem> {
    let matrices = assemble_all(&spaces, &spec.params)?;
    let initial = spec.initial;
    let (_, u, init) = initialize_state(&spaces, &matrices, |p| initial.grad_phi(p), |p| initial.u(p))?;
    let load = bathymetry_load(spec, &spaces);
    let system = PhiuSystem::new(spaces, matrices, load)?;
    let mut y = init.phi;
    y.extend_from_slice(&u);
    Ok(PhiuProblem { system: Arc::new(system), state: State { t: 0.0, y } })
}

/// Exact fields of the standing wave, projected.
pub fn exact_state(m: &ManufacturedSolution, spaces: &Spaces, t: f64) -> ExactState {
    m.exact_state(spaces, t)
}

/// Period `sqrt2` of the standing wave.
pub fn standing_wave_period() -> f64 {
    2.0 * PI / ManufacturedSolution.omega()
}
