//! Gauss–Laguerre rule for `∫_0^∞ e^{-s} g(s) ds`.

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point rule, exact for polynomials of
/// degree `≤ 2n - 1`.
#[derive(Debug, Clone)]
pub struct GaussLaguerre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

const MAX_NODES: usize = 200;

impl GaussLaguerre {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_NODES {
            return Err(Error::Parameter(format!(
                "Gauss-Laguerre order must be in 1..={MAX_NODES}, got {n}"
            )));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        let mut z = 0.0;
        for i in 0..n {
            // asymptotic starting guesses, then Newton on L_n
            z = match i {
                0 => 3.0 / (1.0 + 2.4 * nf),
                1 => z + 15.0 / (1.0 + 2.5 * nf),
                _ => {
                    let ai = (i - 1) as f64;
                    z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2])
                }
            };
            let mut converged = false;
            let (mut deriv, mut prev) = (0.0, 0.0);
            for _ in 0..100 {
                let (mut p1, mut p2) = (1.0, 0.0);
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = ((2.0 * jf + 1.0 - z) * p2 - jf * p3) / (jf + 1.0);
                }
                // L_n'(z) from L_n and L_{n-1}
                deriv = (nf * p1 - nf * p2) / z;
                prev = p2;
                let z1 = z;
                z = z1 - p1 / deriv;
                if (z - z1).abs() <= 1e-14 * z.abs() {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::Consistency(format!(
                    "Gauss-Laguerre node {i} of {n} did not converge"
                )));
            }
            nodes[i] = z;
            weights[i] = -1.0 / (deriv * nf * prev);
        }
        Ok(GaussLaguerre { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&s, &w)| w * g(s))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(k: u32) -> f64 {
        (1..=k).map(f64::from).product()
    }

    #[test]
    fn moments_are_exact_up_to_degree_2n_minus_1() {
        for n in [1usize, 2, 5, 17, 33, 65] {
            let rule = GaussLaguerre::new(n).unwrap();
            for k in 0..(2 * n as u32).min(40) {
                let got = rule.integrate(|s| s.powi(k as i32));
                let want = factorial(k);
                assert!(
                    ((got - want) / want).abs() < 1e-12,
                    "n={n} k={k} got {got} want {want}"
                );
            }
        }
    }

    #[test]
    fn nodes_are_sorted_and_positive() {
        let rule = GaussLaguerre::new(65).unwrap();
        assert!(rule.nodes[0] > 0.0);
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(rule.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn rejects_zero_order() {
        assert!(GaussLaguerre::new(0).is_err());
    }
}
