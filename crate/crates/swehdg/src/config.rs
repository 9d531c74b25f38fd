//! Run configuration, read from a sectioned `key = value` (TOML) file.
//!
//! ```toml
//! [problem]
//! preset = "pier"        # standing_wave | pier | shelf
//! degree = 2
//! f0 = 0.5
//!
//! [mesh]
//! h = 1.0
//!
//! [time]
//! final_time = 50.0
//! integrator = "midpoint"
//!
//! [output]
//! record_every = 10
//! ```
//!
//! Every key is optional; unset keys keep the preset's value.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use swehdg_core::mesh::{Point2, Rect};
use swehdg_core::swe::{Bathymetry, BoundaryRegime, Geometry, InitialData, ProblemSpec, TimeStepRule};

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub problem: ProblemSection,
    #[serde(default)]
    pub mesh: MeshSection,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    #[default]
    StandingWave,
    Pier,
    Shelf,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    #[serde(default)]
    pub preset: Preset,
    pub degree: Option<usize>,
    /// Degree sweep for the convergence commands.
    pub degrees: Option<Vec<usize>>,
    pub phi_mean: Option<f64>,
    pub f0: Option<f64>,
    pub beta: Option<f64>,
    pub y_m: Option<f64>,
    pub g: Option<f64>,
    pub tau: Option<f64>,
    pub alpha: Option<f64>,
    /// zero | standing_wave | wavefront | gaussian_pulse
    pub initial: Option<String>,
    pub wavefront_offset: Option<f64>,
    pub wavefront_x0: Option<f64>,
    pub pulse_amplitude: Option<f64>,
    pub pulse_center: Option<[f64; 2]>,
    pub pulse_rate: Option<f64>,
    /// flat | shelf
    pub bathymetry: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    /// uniform_square | rectangle | rectangle_with_hole | file
    pub kind: Option<String>,
    pub bounds: Option<[f64; 4]>,
    pub levels: Option<Vec<u32>>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub h: Option<f64>,
    pub center: Option<[f64; 2]>,
    pub radius: Option<f64>,
    pub file: Option<PathBuf>,
    /// wall | periodic
    pub boundary: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub final_time: Option<f64>,
    pub courant: Option<f64>,
    pub dt: Option<f64>,
    /// Overrides `final_time` with `steps * dt`.
    pub steps: Option<usize>,
    pub integrator: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub record_every: Option<usize>,
    /// Snapshot cadence in steps; `0` disables field output.
    pub snapshot_every: Option<usize>,
    pub name: Option<String>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg = Self::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
        if let Some(file) = &cfg.mesh.file {
            if file.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                cfg.mesh.file = Some(base.join(file));
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn degrees(&self) -> Vec<usize> {
        if let Some(d) = &self.problem.degrees {
            return d.clone();
        }
        vec![self.problem.degree.unwrap_or(self.default_degree())]
    }

    fn default_degree(&self) -> usize {
        match self.problem.preset {
            Preset::StandingWave => 1,
            Preset::Pier => 2,
            Preset::Shelf => 1,
        }
    }

    pub fn levels(&self) -> Vec<u32> {
        self.mesh.levels.clone().unwrap_or_else(|| vec![1, 2, 3, 4, 5])
    }

    pub fn record_every(&self, default: usize) -> usize {
        self.output.record_every.unwrap_or(default).max(1)
    }

    /// Problem for degree `k`; `level` selects the refinement of uniform-square meshes.
    pub fn problem(&self, k: usize, level: Option<u32>) -> Result<ProblemSpec> {
        let p = &self.problem;
        let m = &self.mesh;
        let t = &self.time;
        let level0 = level.unwrap_or_else(|| self.levels().first().copied().unwrap_or(3));
        let h0 = m.h.unwrap_or(1.0);
        let mut spec = match p.preset {
            Preset::StandingWave => ProblemSpec::standing_wave(level0, k),
            Preset::Pier => ProblemSpec::pier(h0, k),
            Preset::Shelf => ProblemSpec::shelf(m.h.unwrap_or(0.5), k),
        };

        let pp = &mut spec.params;
        pp.phi_mean = p.phi_mean.unwrap_or(pp.phi_mean);
        pp.f0 = p.f0.unwrap_or(pp.f0);
        pp.beta = p.beta.unwrap_or(pp.beta);
        pp.y_m = p.y_m.unwrap_or(pp.y_m);
        pp.g = p.g.unwrap_or(pp.g);
        pp.tau = p.tau.unwrap_or(pp.tau);
        pp.alpha = p.alpha.unwrap_or(pp.alpha);

        if let Some(name) = &p.initial {
            spec.initial = match name.as_str() {
                "zero" => InitialData::Zero,
                "standing_wave" => InitialData::StandingWave,
                "wavefront" => InitialData::Wavefront { offset: 1.0, x0: -5.0 },
                "gaussian_pulse" => {
                    InitialData::GaussianPulse { amplitude: 10.0, center: Point2::new(-5.0, 0.0), rate: 2.0 }
                }
                other => bail!("unknown initial data `{other}`"),
            };
        }
        match &mut spec.initial {
            InitialData::Wavefront { offset, x0 } => {
                *offset = p.wavefront_offset.unwrap_or(*offset);
                *x0 = p.wavefront_x0.unwrap_or(*x0);
            }
            InitialData::GaussianPulse { amplitude, center, rate } => {
                *amplitude = p.pulse_amplitude.unwrap_or(*amplitude);
                if let Some([x, y]) = p.pulse_center {
                    *center = Point2::new(x, y);
                }
                *rate = p.pulse_rate.unwrap_or(*rate);
            }
            _ => {}
        }
        if let Some(b) = &p.bathymetry {
            spec.bathymetry = match b.as_str() {
                "flat" => Bathymetry::Flat,
                "shelf" => Bathymetry::ShelfWithMounds,
                other => bail!("unknown bathymetry `{other}`"),
            };
        }

        let bounds = m.bounds.map(|[x0, x1, y0, y1]| Rect::new(x0, x1, y0, y1));
        if let Some(kind) = &m.kind {
            spec.geometry = match kind.as_str() {
                "uniform_square" => Geometry::UniformSquare { bounds: bounds.unwrap_or(Rect::unit()), levels: level0 },
                "rectangle" => {
                    let b = bounds.context("rectangle mesh needs `bounds`")?;
                    let (nx, ny) = match (m.nx, m.ny, m.h) {
                        (Some(nx), Some(ny), _) => (nx, ny),
                        (_, _, Some(h)) => {
                            ((b.width() / h).ceil().max(1.0) as usize, (b.height() / h).ceil().max(1.0) as usize)
                        }
                        _ => bail!("rectangle mesh needs `nx` and `ny`, or `h`"),
                    };
                    Geometry::Rectangle { bounds: b, nx, ny }
                }
                "rectangle_with_hole" => {
                    let c = m.center.unwrap_or([3.0, 0.0]);
                    Geometry::RectangleWithHole {
                        bounds: bounds.unwrap_or(Rect::new(-10.0, 10.0, -10.0, 10.0)),
                        center: Point2::new(c[0], c[1]),
                        radius: m.radius.unwrap_or(1.0),
                        h: h0,
                    }
                }
                "file" => Geometry::MeshFile(m.file.clone().context("file mesh needs `file`")?),
                other => bail!("unknown mesh kind `{other}`"),
            };
        } else if let Geometry::UniformSquare { levels, .. } = &mut spec.geometry {
            *levels = level0;
            if let Some(b) = bounds {
                spec.geometry = Geometry::UniformSquare { bounds: b, levels: level0 };
            }
        }
        if let Some(b) = &m.boundary {
            spec.boundary = match b.as_str() {
                "wall" => BoundaryRegime::Wall,
                "periodic" => BoundaryRegime::PeriodicOuter,
                other => bail!("unknown boundary regime `{other}`"),
            };
        }

        if let Some(c) = t.courant {
            spec.time_step = TimeStepRule::Courant(c);
        }
        if let Some(dt) = t.dt {
            spec.time_step = TimeStepRule::Fixed(dt);
        }
        if let Some(tf) = t.final_time {
            spec.final_time = tf;
        }
        if let Some(name) = &t.integrator {
            spec.integrator = name.clone();
        }
        Ok(spec)
    }
}
