use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ButcherTableau {
    pub name: String,
    /// Lower triangular, row-major by stage.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub order: usize,
}

impl ButcherTableau {
    pub fn new(name: impl Into<String>, a: Vec<Vec<f64>>, b: Vec<f64>, order: usize) -> Self {
        let c = a.iter().map(|row| row.iter().sum()).collect();
        ButcherTableau { name: name.into(), a, b, c, order }
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// `max |c_i - sum_j a_ij|`.
    pub fn row_sum_residual(&self) -> f64 {
        self.a
            .iter()
            .zip(&self.c)
            .map(|(row, c)| (c - row.iter().sum::<f64>()).abs())
            .fold(0.0, f64::max)
    }
}

/// `max_{i,j} |b_i a_ij + b_j a_ji - b_i b_j|`; zero for symplectic methods.
pub fn check_symplectic(t: &ButcherTableau) -> f64 {
    let s = t.stages();
    let mut worst: f64 = 0.0;
    for i in 0..s {
        for j in 0..s {
            let r = t.b[i] * t.a[i][j] + t.b[j] * t.a[j][i] - t.b[i] * t.b[j];
            worst = worst.max(r.abs());
        }
    }
    worst
}

/// Triple-jump weight `1 / (2 - 2^{1/(p+1)})` lifting a symmetric order-`p` method to `p + 2`.
pub fn triple_jump_gamma(p: usize) -> f64 {
    1.0 / (2.0 - 2f64.powf(1.0 / (p as f64 + 1.0)))
}

/// Diagonally implicit compositions of the implicit midpoint rule.
pub fn make_sdirk(order: usize) -> Result<ButcherTableau> {
    let weights = match order {
        2 => vec![1.0],
        4 => {
            let g = triple_jump_gamma(2);
            vec![g, 1.0 - 2.0 * g, g]
        }
        _ => return Err(Error::UnsupportedOrder { family: "sdirk", order }),
    };
    Ok(midpoint_composition(format!("sdirk{order}"), &weights, order))
}

/// `a_ij = b_j` below the diagonal and `a_ii = b_i / 2`.
pub fn midpoint_composition(name: String, b: &[f64], order: usize) -> ButcherTableau {
    let s = b.len();
    let a = (0..s)
        .map(|i| (0..s).map(|j| if j < i { b[j] } else if j == i { 0.5 * b[i] } else { 0.0 }).collect())
        .collect();
    ButcherTableau::new(name, a, b.to_vec(), order)
}

pub fn forward_euler() -> ButcherTableau {
    ButcherTableau::new("forward_euler", vec![vec![0.0]], vec![1.0], 1)
}

/// Explicit partitioned pair: `(a, b)` advances `w`, `(a_hat, b_hat)` advances `u`.
///
/// `a` may use its diagonal (stage `i` of `w` sees `k_i`), `a_hat` is strictly
/// lower triangular.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionedTableau {
    pub name: String,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub a_hat: Vec<Vec<f64>>,
    pub b_hat: Vec<f64>,
    pub c_hat: Vec<f64>,
    pub order: usize,
}

impl PartitionedTableau {
    /// Tableau of the splitting "drift `w` by `b_i`, then kick `u` by `b_hat_i`", stage by stage.
    pub fn from_splitting(name: impl Into<String>, b: Vec<f64>, b_hat: Vec<f64>, order: usize) -> Self {
        let s = b.len();
        assert_eq!(s, b_hat.len());
        let a: Vec<Vec<f64>> = (0..s).map(|i| (0..s).map(|j| if j <= i { b[j] } else { 0.0 }).collect()).collect();
        let a_hat: Vec<Vec<f64>> = (0..s).map(|i| (0..s).map(|j| if j < i { b_hat[j] } else { 0.0 }).collect()).collect();
        let c = a.iter().map(|r| r.iter().sum()).collect();
        let c_hat = a_hat.iter().map(|r| r.iter().sum()).collect();
        PartitionedTableau { name: name.into(), a, b, c, a_hat, b_hat, c_hat, order }
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// Runs each `(tableau, h)` in turn over a fraction `h` of the step.
    fn compose(parts: &[(&PartitionedTableau, f64)], name: String, order: usize) -> Self {
        let mut b = Vec::new();
        let mut b_hat = Vec::new();
        for (t, h) in parts {
            for (bi, bhi) in t.b.iter().zip(&t.b_hat) {
                // merge a drift into the previous stage when that stage does not kick
                if let (Some(last_b), Some(&0.0)) = (b.last_mut(), b_hat.last()) {
                    *last_b += h * bi;
                    *b_hat.last_mut().unwrap() = h * bhi;
                } else {
                    b.push(h * bi);
                    b_hat.push(h * bhi);
                }
            }
        }
        Self::from_splitting(name, b, b_hat, order)
    }
}

/// `max |b_i a_hat_ij + b_hat_j a_ji - b_i b_hat_j|`; zero for symplectic pairs.
pub fn check_partitioned_symplectic(t: &PartitionedTableau) -> f64 {
    let s = t.stages();
    let mut worst: f64 = 0.0;
    for i in 0..s {
        for j in 0..s {
            let r = t.b[i] * t.a_hat[i][j] + t.b_hat[j] * t.a[j][i] - t.b[i] * t.b_hat[j];
            worst = worst.max(r.abs());
        }
    }
    worst
}

/// Explicit symplectic partitioned methods of order 1, 2, 3, 4 and 6.
pub fn make_seprk(order: usize) -> Result<PartitionedTableau> {
    let name = format!("seprk{order}");
    Ok(match order {
        1 => PartitionedTableau::from_splitting(name, vec![1.0], vec![1.0], 1),
        // Stormer-Verlet: half drift, kick, half drift
        2 => PartitionedTableau::from_splitting(name, vec![0.5, 0.5], vec![1.0, 0.0], 2),
        // Ruth
        3 => PartitionedTableau::from_splitting(
            name,
            vec![7.0 / 24.0, 3.0 / 4.0, -1.0 / 24.0],
            vec![2.0 / 3.0, -2.0 / 3.0, 1.0],
            3,
        ),
        4 => forest_ruth(name),
        6 => {
            let s4 = forest_ruth("seprk4".into());
            let g = triple_jump_gamma(4);
            PartitionedTableau::compose(&[(&s4, g), (&s4, 1.0 - 2.0 * g), (&s4, g)], name, 6)
        }
        _ => return Err(Error::UnsupportedOrder { family: "seprk", order }),
    })
}

fn forest_ruth(name: String) -> PartitionedTableau {
    let t = triple_jump_gamma(2);
    PartitionedTableau::from_splitting(
        name,
        vec![0.5 * t, 0.5 * (1.0 - t), 0.5 * (1.0 - t), 0.5 * t],
        vec![t, 1.0 - 2.0 * t, t, 0.0],
        4,
    )
}
