//! Physical functionals, discrete energies, error norms and convergence orders.

use crate::assembly::PhysicalParams;
use crate::fespace::{Accuracy, Spaces};
use crate::swe::{ManufacturedSolution, PhiuSystem, State, UwSystem};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QuantityRecord {
    pub t: f64,
    /// `(phi_h, 1)`.
    pub mass: f64,
    /// `|phi_h| |Omega|^{1/2}`, the Cauchy-Schwarz bound of `|mass|`.
    pub mass_scale: f64,
    pub energy: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub trace_term: f64,
    pub momentum: [f64; 2],
    pub angular_momentum: f64,
    pub vorticity: f64,
    pub potential_vorticity: f64,
    pub potential_enstrophy: f64,
}

impl QuantityRecord {
    pub const CSV_HEADER: &'static str = "time,mass,energy,kinetic,potential,trace_term,momentum1,momentum2,\
angular_momentum,vorticity,potential_vorticity,potential_enstrophy";

    pub fn csv_row(&self) -> String {
        let v = [
            self.t,
            self.mass,
            self.energy,
            self.kinetic,
            self.potential,
            self.trace_term,
            self.momentum[0],
            self.momentum[1],
            self.angular_momentum,
            self.vorticity,
            self.potential_vorticity,
            self.potential_enstrophy,
        ];
        v.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(",")
    }

    /// `|mass| / mass_scale`, zero for a vanishing field.
    pub fn relative_mass(&self) -> f64 {
        if self.mass_scale > 0.0 {
            self.mass.abs() / self.mass_scale
        } else {
            self.mass.abs()
        }
    }
}

/// Integrals that depend only on the fields `phi_h` and `u_h`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FieldIntegrals {
    pub mass: f64,
    pub phi_norm: f64,
    pub area: f64,
    pub momentum: [f64; 2],
    pub angular_momentum: f64,
    pub vorticity: f64,
    pub potential_vorticity: f64,
    pub potential_enstrophy: f64,
}

/// Rotation is taken elementwise, without jump terms. `x^perp = (y, -x)`.
pub fn field_integrals(spaces: &Spaces, params: &PhysicalParams, phi: &[f64], u: &[f64]) -> FieldIntegrals {
    let nw = spaces.nw;
    let big_phi = params.phi_mean;
    let mut out = FieldIntegrals::default();
    for e in 0..spaces.num_elements() {
        let cp = &phi[e * nw..(e + 1) * nw];
        let cu = &u[2 * e * nw..2 * (e + 1) * nw];
        spaces.for_each_volume_point(e, Accuracy::Standard, |qp| {
            let mut ph = 0.0;
            let mut uv = [0.0; 2];
            let mut rot = 0.0;
            for i in 0..nw {
                ph += cp[i] * qp.phi[i];
                uv[0] += cu[i] * qp.phi[i];
                uv[1] += cu[nw + i] * qp.phi[i];
                rot += cu[nw + i] * qp.grad[i][0] - cu[i] * qp.grad[i][1];
            }
            let w = qp.weight;
            let f = params.coriolis(qp.x);
            out.area += w;
            out.mass += w * ph;
            out.phi_norm += w * ph * ph;
            out.momentum[0] += w * big_phi * uv[0];
            out.momentum[1] += w * big_phi * uv[1];
            out.angular_momentum += w * big_phi * (qp.x.y * uv[0] - qp.x.x * uv[1]);
            out.vorticity += w * rot;
            out.potential_vorticity += w * (big_phi * rot - f * ph);
            out.potential_enstrophy += w * big_phi * rot * rot;
        });
    }
    out.phi_norm = out.phi_norm.sqrt();
    out
}

fn record(t: f64, fi: FieldIntegrals, kinetic: f64, potential: f64, trace_term: f64) -> QuantityRecord {
    QuantityRecord {
        t,
        mass: fi.mass,
        mass_scale: fi.phi_norm * fi.area.sqrt(),
        energy: kinetic + potential + trace_term,
        kinetic,
        potential,
        trace_term,
        momentum: fi.momentum,
        angular_momentum: fi.angular_momentum,
        vorticity: fi.vorticity,
        potential_vorticity: fi.potential_vorticity,
        potential_enstrophy: fi.potential_enstrophy,
    }
}

/// Quantities of a `(w, u)` state; `phi_h` is the recovered geopotential.
pub fn conserved_quantities(system: &UwSystem, state: &State) -> QuantityRecord {
    let (p, ph) = system.recover(&state.y);
    let (_, u) = system.split(&state.y);
    let parts = system.energy_parts(&state.y, &p, &ph);
    let fi = field_integrals(&system.spaces, &system.matrices.params, &p, u);
    record(state.t, fi, parts.kinetic, parts.potential, parts.trace_term)
}

/// Quantities of a `(phi, u)` state. The energy has no trace part in this scheme.
pub fn phiu_quantities(system: &PhiuSystem, state: &State) -> QuantityRecord {
    let (phi, u) = system.split(&state.y);
    let big_phi = system.matrices.params.phi_mean;
    let kinetic = 0.5 * big_phi * u.iter().map(|v| v * v).sum::<f64>();
    let potential = 0.5 * phi.iter().map(|v| v * v).sum::<f64>();
    let fi = field_integrals(&system.spaces, &system.matrices.params, phi, u);
    record(state.t, fi, kinetic, potential, 0.0)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ErrorTriple {
    pub phi: f64,
    pub u: f64,
    pub w: f64,
}

impl ErrorTriple {
    pub fn max(self, other: ErrorTriple) -> ErrorTriple {
        ErrorTriple { phi: self.phi.max(other.phi), u: self.u.max(other.u), w: self.w.max(other.w) }
    }
}

/// `L2` errors of the recovered `phi_h`, `u_h` and `w_h` against the standing wave.
pub fn l2_errors(system: &UwSystem, state: &State, m: &ManufacturedSolution) -> ErrorTriple {
    let (w, u) = system.split(&state.y);
    let (p, _) = system.recover(&state.y);
    let s = &system.spaces;
    let t = state.t;
    ErrorTriple {
        phi: s.l2_error_scalar(&p, |x| m.phi(x, t)),
        u: s.l2_error_vector(u, |x| m.u(x, t)),
        w: s.l2_error_vector(w, |x| m.w(x, t)),
    }
}

/// Errors of the initialization `(sigma, w, phi)` at `t = 0`.
pub fn init_errors(
    spaces: &Spaces,
    init: &crate::elliptic::InitSolution,
    m: &ManufacturedSolution,
) -> [f64; 3] {
    [
        spaces.l2_error_scalar(&init.sigma, |x| m.sigma(x, 0.0)),
        spaces.l2_error_vector(&init.w, |x| m.w(x, 0.0)),
        spaces.l2_error_scalar(&init.phi, |x| m.phi(x, 0.0)),
    ]
}

/// `log(e_{i-1} / e_i) / log(h_{i-1} / h_i)`; `None` for the first entry or
/// when an error is not positive.
pub fn eoc(errors: &[f64], hs: &[f64]) -> Vec<Option<f64>> {
    assert_eq!(errors.len(), hs.len());
    (0..errors.len())
        .map(|i| {
            if i == 0 {
                return None;
            }
            let (e0, e1) = (errors[i - 1], errors[i]);
            if !(e0 > 0.0 && e1 > 0.0) || hs[i - 1] == hs[i] {
                return None;
            }
            Some((e0 / e1).ln() / (hs[i - 1] / hs[i]).ln())
        })
        .collect()
}

/// One mesh level of a convergence table.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub k: usize,
    pub h: f64,
    pub errors: Vec<f64>,
    pub eocs: Vec<Option<f64>>,
}

impl ConvergenceRow {
    /// `k,h,err_1,eoc_1,...`; undefined orders are left empty.
    pub fn csv_row(&self) -> String {
        let mut s = format!("{},{:e}", self.k, self.h);
        for (e, o) in self.errors.iter().zip(&self.eocs) {
            s.push_str(&format!(",{e:.6e},"));
            if let Some(o) = o {
                s.push_str(&format!("{o:.4}"));
            }
        }
        s
    }
}

/// Rows with orders filled in; `errors[level][variable]`.
pub fn convergence_table(k: usize, hs: &[f64], errors: &[Vec<f64>]) -> Vec<ConvergenceRow> {
    let nvar = errors.first().map_or(0, Vec::len);
    let per_var: Vec<Vec<Option<f64>>> = (0..nvar)
        .map(|v| eoc(&errors.iter().map(|r| r[v]).collect::<Vec<_>>(), hs))
        .collect();
    hs.iter()
        .enumerate()
        .map(|(i, &h)| ConvergenceRow {
            k,
            h,
            errors: errors[i].clone(),
            eocs: (0..nvar).map(|v| per_var[v][i]).collect(),
        })
        .collect()
}

/// Least-squares slope of `ys` against their index.
pub fn linear_fit_slope(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    if ys.len() < 2 {
        return 0.0;
    }
    let xm = (n - 1.0) / 2.0;
    let ym = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let dx = i as f64 - xm;
        sxy += dx * (y - ym);
        sxx += dx * dx;
    }
    sxy / sxx
}

/// `max_n |x_n - x_0| / |x_0|`.
pub fn max_relative_deviation(xs: &[f64]) -> f64 {
    let Some(&x0) = xs.first() else { return 0.0 };
    let scale = if x0 != 0.0 { x0.abs() } else { 1.0 };
    xs.iter().map(|x| (x - x0).abs() / scale).fold(0.0, f64::max)
}
