//! Bargmann-space experiments: gram, coherent, commutator.

use clap::Args;
use num_complex::Complex64;
use serde::Serialize;

use fockbath::bargmann::{
    annihilation_matrix, coherent_span_residual, coherent_span_residuals, coherent_vector,
    commutator, creation_matrix, gram_matrix, hamiltonian_matrix, kernel_eval,
    quadrature_operators, CoherentParam, FockVector, InnerProductMethod, Ordering,
};
use fockbath::chain::mode_commutator_check;
use fockbath::symplectic::OscillatorParams;
use fockbath::Result;

use super::{parse_count, require_seed};
use crate::report::{Check, Outcome, Table};

#[derive(Debug, Clone, Args, Serialize)]
pub struct GramArgs {
    /// Largest basis index.
    #[arg(long, default_value_t = 16, value_parser = parse_count)]
    pub nmax: usize,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    /// Monte Carlo samples; 0 skips the stochastic estimate.
    #[arg(long, default_value_t = 0, value_parser = parse_count)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn gram(a: &GramArgs) -> Result<Outcome> {
    let mut out =
        Outcome::new("orthonormality of e_n = z^n/sqrt(n! hbar^n) under the Gaussian measure");
    let quad = gram_matrix(a.nmax, a.hbar, InnerProductMethod::Quadrature)?;
    out.check(Check::new(
        "quadrature max |G - I|",
        quad.max_deviation_from_identity(),
        0.0,
        1e-10,
    ));
    out.check(Check::new(
        "quadrature max off-diagonal",
        quad.max_off_diagonal(),
        0.0,
        1e-10,
    ));
    let mc = if a.samples > 0 {
        let seed = require_seed(a.seed, "Monte Carlo Gram matrix")?;
        Some(gram_matrix(
            a.nmax,
            a.hbar,
            InnerProductMethod::MonteCarlo {
                samples: a.samples,
                seed,
            },
        )?)
    } else {
        None
    };
    let dim = a.nmax + 1;
    let mut table = Table::new(
        "matrix",
        &[
            "n",
            "m",
            "quad_re",
            "quad_im",
            "mc_re",
            "mc_im",
            "mc_std_err",
        ],
    );
    let mut worst: Option<(usize, usize, f64, f64)> = None;
    for i in 0..dim {
        for j in 0..dim {
            let q = quad.values[(i, j)];
            let (mv, se) = match &mc {
                Some(g) => (
                    g.values[(i, j)],
                    g.std_err.as_ref().map_or(f64::NAN, |s| s[(i, j)]),
                ),
                None => (Complex64::new(f64::NAN, f64::NAN), f64::NAN),
            };
            table.push(&[i as f64, j as f64, q.re, q.im, mv.re, mv.im, se]);
            if mc.is_some() {
                let target = if i == j { 1.0 } else { 0.0 };
                let dev = (mv - target).norm();
                let z = dev / se;
                if worst.is_none_or(|w| z > w.2 / w.3) {
                    worst = Some((i, j, dev, se));
                }
            }
        }
    }
    if let Some((i, j, dev, se)) = worst {
        out.check(Check::sigma(
            format!("Monte Carlo worst entry ({i}, {j}) |G - delta| within 3 SE"),
            dev,
            se,
            0.0,
            3.0,
        ));
    }
    out.table(table);
    Ok(out)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CoherentArgs {
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub im: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, default_value_t = 32, value_parser = parse_count)]
    pub truncation: usize,
    /// Largest tolerated squared-norm tail beyond the truncation.
    #[arg(long, default_value_t = fockbath::bargmann::DEFAULT_TAIL_TOLERANCE)]
    pub tail_tolerance: f64,
    /// Coherent points on the unit circle used for the span table.
    #[arg(long, default_value_t = 8, value_parser = parse_count)]
    pub points: usize,
}

pub fn coherent(a: &CoherentArgs) -> Result<Outcome> {
    let mut out = Outcome::new(
        "coherent vectors f_c = exp(c z) and the reproducing kernel (f_cbar, psi) = psi(hbar c)",
    );
    let c = CoherentParam::new(a.re, a.im);
    let exp = coherent_vector(c, a.truncation, a.hbar, a.tail_tolerance)?;
    let full = exp.full_norm_sqr;
    out.check(Check::relative(
        "|f_c|^2 truncated plus tail equals exp(hbar |c|^2)",
        exp.vector.norm_sqr() + exp.tail_mass,
        full,
        1e-12,
    ));

    // a fixed test vector mixing the lowest levels
    let psi = FockVector::new(
        (0..=a.truncation)
            .map(|n| {
                if n < 4 {
                    Complex64::new(1.0 / (1.0 + n as f64), 0.25 * n as f64)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect(),
        a.hbar,
    )?
    .normalized()?;
    let k = kernel_eval(c, &psi, a.tail_tolerance)?;
    out.check(Check::new(
        "kernel inner product equals direct evaluation",
        k.discrepancy,
        0.0,
        1e-10 * k.direct.norm().max(1.0),
    ));

    let own = coherent_span_residual(&exp.vector, &[c])?;
    out.check(Check::new(
        "f_c lies in the span of itself",
        own.residual,
        0.0,
        1e-9 * exp.vector.norm(),
    ));

    let mut coeffs = Table::new("coefficients", &["n", "re", "im", "abs2"]);
    for (n, v) in exp.vector.coeffs().iter().enumerate() {
        coeffs.push(&[n as f64, v.re, v.im, v.norm_sqr()]);
    }
    out.table(coeffs);

    if a.points > 0 {
        let ring: Vec<CoherentParam> = (0..a.points)
            .map(|j| {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / a.points as f64;
                CoherentParam(Complex64::from_polar(1.0, phi))
            })
            .collect();
        let target = FockVector::basis(1.min(a.truncation), a.truncation, a.hbar)?;
        let mut span = Table::new(
            "span",
            &["points", "residual", "min_eigenvalue", "regularization"],
        );
        for r in coherent_span_residuals(&target, &ring)? {
            span.push(&[
                r.points as f64,
                r.residual,
                r.min_eigenvalue,
                r.regularization,
            ]);
        }
        out.table(span);
    }
    Ok(out)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CommutatorArgs {
    #[arg(long, default_value_t = 64, value_parser = parse_count)]
    pub truncation: usize,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
}

pub fn commutator_run(a: &CommutatorArgs) -> Result<Outcome> {
    let mut out = Outcome::new(
        "[a, a+] = hbar, [q, p] = i hbar, and symmetric minus normal ordering = hbar omega / 2",
    );
    let n = a.truncation;
    let am = annihilation_matrix(a.hbar, n)?.matrix;
    let ad = creation_matrix(a.hbar, n)?.matrix;
    let c = commutator(&am, &ad);
    let (q, p) = quadrature_operators(a.hbar, n)?;
    let qp = commutator(&q.matrix, &p.matrix);
    let params = OscillatorParams::new(a.omega)?;
    let hn = hamiltonian_matrix(Ordering::Normal, &params, a.hbar, n)?;
    let hs = hamiltonian_matrix(Ordering::Symmetric, &params, a.hbar, n)?;
    let gap = &hs.matrix - &hn.matrix;
    let half = 0.5 * a.hbar * a.omega;

    let mut table = Table::new("diagonal", &["n", "aad_re", "qp_im", "ordering_gap"]);
    let (mut worst_a, mut worst_qp, mut worst_gap): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..=n {
        for j in 0..=n {
            let d = if i == j { 1.0 } else { 0.0 };
            // the last level feels the cut
            if i < n && j < n {
                worst_a = worst_a.max((c[(i, j)] - Complex64::new(d * a.hbar, 0.0)).norm());
                worst_qp = worst_qp.max((qp[(i, j)] - Complex64::new(0.0, d * a.hbar)).norm());
            }
            worst_gap = worst_gap.max((gap[(i, j)] - Complex64::new(d * half, 0.0)).norm());
        }
        table.push(&[i as f64, c[(i, i)].re, qp[(i, i)].im, gap[(i, i)].re]);
    }
    let scale = a.hbar.max(1.0);
    out.check(Check::new(
        "interior [a, a+] - hbar",
        worst_a,
        0.0,
        1e-12 * scale,
    ));
    out.check(Check::new(
        "interior [q, p] - i hbar",
        worst_qp,
        0.0,
        1e-12 * scale,
    ));
    out.check(Check::new(
        "symmetric minus normal Hamiltonian - hbar omega / 2",
        worst_gap,
        0.0,
        1e-12 * (half * n as f64).max(1.0),
    ));
    let exact = mode_commutator_check(1, n, a.hbar)?;
    out.check(Check::new(
        "[a, a+] - hbar in exact arithmetic",
        exact.max_residual,
        0.0,
        0.0,
    ));
    out.table(table);
    Ok(out)
}
