//! Direct numerical minimization of the mean energy over Gaussian unitaries,
//! used as an oracle for the symplectic trace on one and two modes.

use argmin::core::{CostFunction, Error, Executor};
use argmin::solver::neldermead::NelderMead;
use nalgebra::DMatrix;

/// Real phase-space matrix of the passive unitary with parameters `p`.
///
/// One mode: `U = exp(i p0)`. Two modes:
/// `U = diag(e^{i p0}, e^{i p1}) [[cos p2, -e^{i p3} sin p2], [e^{-i p3} sin p2, cos p2]]`,
/// which reaches all of U(2).
pub fn passive(n: usize, p: &[f64]) -> DMatrix<f64> {
    // (re, im) entries of U
    let u: Vec<Vec<(f64, f64)>> = match n {
        1 => vec![vec![(p[0].cos(), p[0].sin())]],
        2 => {
            let (c, s) = (p[2].cos(), p[2].sin());
            let mul = |a: f64, b: f64| ((a + b).cos(), (a + b).sin());
            let row0 = vec![
                (c * p[0].cos(), c * p[0].sin()),
                {
                    let (re, im) = mul(p[0], p[3]);
                    (-s * re, -s * im)
                },
            ];
            let row1 = vec![
                {
                    let (re, im) = mul(p[1], -p[3]);
                    (s * re, s * im)
                },
                (c * p[1].cos(), c * p[1].sin()),
            ];
            vec![row0, row1]
        }
        _ => panic!("oracle covers one and two modes"),
    };
    let mut o = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let (x, y) = u[i][j];
            o[(i, j)] = x;
            o[(i, n + j)] = y;
            o[(n + i, j)] = -y;
            o[(n + i, n + j)] = x;
        }
    }
    o
}

/// `min_Z Tr[Z O G O^T Z]/2` over local squeezers `Z`: each mode contributes
/// `min_s (s^2 a + b / s^2)/2 = sqrt(a b)`.
pub fn squeezed_energy(gamma: &DMatrix<f64>, o: &DMatrix<f64>) -> f64 {
    let n = gamma.nrows() / 2;
    let x = o * gamma * o.transpose();
    (0..n).map(|k| (x[(k, k)] * x[(n + k, n + k)]).sqrt()).sum()
}

struct Objective<'a> {
    gamma: &'a DMatrix<f64>,
    n: usize,
}

impl CostFunction for Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<f64, Error> {
        Ok(squeezed_energy(self.gamma, &passive(self.n, p)))
    }
}

fn grid(n: usize) -> Vec<Vec<f64>> {
    let pi = std::f64::consts::PI;
    match n {
        1 => (0..360).map(|i| vec![pi * i as f64 / 360.0]).collect(),
        _ => {
            let mut out = Vec::new();
            for a in 0..6 {
                for b in 0..6 {
                    for t in 0..7 {
                        for c in 0..6 {
                            out.push(vec![
                                pi * a as f64 / 6.0,
                                pi * b as f64 / 6.0,
                                0.5 * pi * t as f64 / 6.0,
                                pi * c as f64 / 6.0,
                            ]);
                        }
                    }
                }
            }
            out
        }
    }
}

/// Smallest `Tr[S G S^T]/2` found over symplectic `S = Z O`: a grid over the
/// passive part, then Nelder-Mead from the best grid points.
pub fn minimize_energy(gamma: &DMatrix<f64>) -> f64 {
    let n = gamma.nrows() / 2;
    let objective = Objective { gamma, n };
    let mut starts: Vec<(f64, Vec<f64>)> = grid(n)
        .into_iter()
        .map(|p| (objective.cost(&p).unwrap(), p))
        .collect();
    starts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = starts[0].0;
    for (_, start) in starts.into_iter().take(8) {
        let mut simplex = vec![start.clone()];
        for k in 0..start.len() {
            let mut v = start.clone();
            v[k] += 0.1;
            simplex.push(v);
        }
        let solver = NelderMead::new(simplex).with_sd_tolerance(1e-14).unwrap();
        let result = Executor::new(Objective { gamma, n }, solver)
            .configure(|s| s.max_iters(4000))
            .run()
            .unwrap();
        best = best.min(result.state().get_best_cost());
    }
    best
}
