//! Particle realization of the density `|f(z)|² dμ` and its pushforward
//! under the oscillator flow.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::DampingParams;
use crate::bargmann::{basis_values, FockVector};
use crate::error::{domain, parameter, Error, Result};
use crate::stats::{self, chunked, ComplexEstimate, ComplexMoments, Estimate, Moments};
use crate::symplectic::{hamilton_step, OscillatorParams, PhasePoint};

/// Variance scale of the centred Gaussian proposal relative to `dμ`.
const PROPOSAL_SCALE: f64 = 2.0;
/// Safety factor on the grid supremum of the acceptance ratio.
const BOUND_MARGIN: f64 = 1.1;
const BOUND_GRID: usize = 4000;
const MIN_EFFICIENCY: f64 = 1e-3;

/// Points of a realized ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleState {
    pub points: Vec<Complex64>,
    pub seed: u64,
    pub time: f64,
}

/// What the friction acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FrictionTarget {
    /// Only the displacement `⟨z⟩` of the density is damped; fluctuations
    /// about it keep rotating, so the ensemble relaxes to the Gibbs state.
    #[default]
    CoherentPart,
    /// Every particle feels the friction and spirals into the origin.
    WholeParticle,
}

/// Ensemble moments at one report time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMoments {
    pub time: f64,
    pub mean_z: ComplexEstimate,
    pub mean_abs2: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRun {
    pub moments: Vec<EnsembleMoments>,
    /// Accepted over proposed draws.
    pub acceptance_rate: f64,
    /// Envelope constant `M` of the rejection sampler.
    pub bound: f64,
    pub final_state: EnsembleState,
}

/// Exact mean `∫ z |f|² dμ = Σ_n c̄_{n+1} c_n √((n+1)ħ)` of a normalized `f`.
pub fn fock_mean(f: &FockVector) -> Complex64 {
    let c = f.coeffs();
    let hbar = f.hbar();
    (0..f.truncation())
        .map(|n| c[n + 1].conj() * c[n] * ((n + 1) as f64 * hbar).sqrt())
        .sum()
}

/// Rejection sampler for `|f|² dμ` with a centred Gaussian of variance
/// `sħ/2` per component as proposal.
///
/// The ratio target/proposal is `s|f(z)|² e^{-κ|z|²/ħ}` with `κ = 1 − 1/s`,
/// dominated by `s·F(x)² e^{-κx}` with `F(x) = Σ|c_n| x^{n/2}/√n!`.
struct Sampler {
    f: FockVector,
    bound: f64,
    kappa: f64,
}

impl Sampler {
    fn new(f: &FockVector) -> Result<Self> {
        if !f.is_normalized() {
            return domain(format!(
                "ensemble density needs a normalized amplitude, norm² = {}",
                f.norm_sqr()
            ));
        }
        let kappa = 1.0 - 1.0 / PROPOSAL_SCALE;
        let abs: Vec<f64> = f.coeffs().iter().map(|c| c.norm()).collect();
        // every term x^{(n+m)/2} e^{-κx} peaks at or before N/κ
        let x_max = f.truncation() as f64 / kappa + 10.0;
        let mut sup: f64 = 0.0;
        for i in 0..=BOUND_GRID {
            let x = x_max * i as f64 / BOUND_GRID as f64;
            let sx = x.sqrt();
            let mut term = 1.0;
            let mut big_f = abs[0];
            for (n, a) in abs.iter().enumerate().skip(1) {
                term *= sx / (n as f64).sqrt();
                big_f += a * term;
            }
            sup = sup.max(big_f * big_f * (-kappa * x).exp());
        }
        let bound = PROPOSAL_SCALE * sup * BOUND_MARGIN;
        if 1.0 / bound < MIN_EFFICIENCY {
            return Err(Error::Sampler {
                efficiency: 1.0 / bound,
            });
        }
        Ok(Sampler {
            f: f.clone(),
            bound,
            kappa,
        })
    }

    /// Returns the point and the number of proposals it took.
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Complex64, usize)> {
        let hbar = self.f.hbar();
        let var = 0.5 * PROPOSAL_SCALE * hbar;
        let mut tries = 0;
        loop {
            tries += 1;
            let z = stats::complex_gaussian(rng, var);
            let amp: Complex64 = basis_values(self.f.truncation(), z, hbar)
                .iter()
                .zip(self.f.coeffs())
                .map(|(e, c)| e * c)
                .sum();
            let ratio = PROPOSAL_SCALE * amp.norm_sqr() * (-self.kappa * z.norm_sqr() / hbar).exp();
            if ratio > self.bound {
                return Err(Error::Consistency(format!(
                    "rejection bound {} exceeded by ratio {ratio}",
                    self.bound
                )));
            }
            if rng.random::<f64>() * self.bound < ratio {
                return Ok((z, tries));
            }
            if tries as f64 * MIN_EFFICIENCY > 1e3 {
                return Err(Error::Sampler {
                    efficiency: 1.0 / tries as f64,
                });
            }
        }
    }
}

/// Draws `n` points from `|f(z)|² dμ`; returns them with the acceptance rate.
pub fn sample_fock_density(f: &FockVector, n: usize, seed: u64) -> Result<(Vec<Complex64>, f64)> {
    let sampler = Sampler::new(f)?;
    let parts = chunked(n, |chunk, range| -> Result<(Vec<Complex64>, usize)> {
        let mut rng = stats::substream(seed, chunk as u64);
        let mut pts = Vec::with_capacity(range.len());
        let mut tries = 0;
        for _ in range {
            let (z, t) = sampler.draw(&mut rng)?;
            pts.push(z);
            tries += t;
        }
        Ok((pts, tries))
    });
    let mut points = Vec::with_capacity(n);
    let mut tries = 0;
    for p in parts {
        let (pts, t) = p?;
        points.extend(pts);
        tries += t;
    }
    Ok((points, n as f64 / tries.max(1) as f64))
}

/// Ensemble run settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub samples: usize,
    /// Non-decreasing report times, all `≥ 0`.
    pub times: Vec<f64>,
    /// Largest integrator step; each interval is split evenly.
    pub dt: f64,
    pub seed: u64,
    pub friction: FrictionTarget,
}

fn to_point(z: Complex64) -> PhasePoint {
    PhasePoint::new(SQRT_2 * z.re, SQRT_2 * z.im)
}

fn to_z(x: PhasePoint) -> Complex64 {
    Complex64::new(x.q, x.p) / SQRT_2
}

/// Advances `x` from `t0` to `t1` in equal steps no longer than `dt`.
fn advance(x: PhasePoint, params: &OscillatorParams, span: f64, dt: f64, alpha: f64) -> PhasePoint {
    let steps = (span / dt - 1e-9).ceil().max(0.0) as usize;
    if steps == 0 {
        return x;
    }
    let h = span / steps as f64;
    (0..steps).fold(x, |x, _| hamilton_step(x, params, h, alpha))
}

/// Samples `|f|² dμ` and pushes every particle forward with
/// [`hamilton_step`], reporting `⟨z⟩` and `⟨|z|²⟩` at each requested time.
///
/// With [`FrictionTarget::CoherentPart`] a particle is split as
/// `z = m + ξ` where `m = ⟨z⟩₀` follows the damped flow and `ξ` the
/// undamped one.
pub fn ensemble_evolve(
    f: &FockVector,
    params: &OscillatorParams,
    damping: &DampingParams,
    spec: &EnsembleSpec,
) -> Result<EnsembleRun> {
    if spec.samples == 0 {
        return parameter("ensemble needs at least one sample");
    }
    if !(spec.dt.is_finite() && spec.dt > 0.0) {
        return parameter(format!("ensemble dt must be > 0, got {}", spec.dt));
    }
    if spec.times.iter().any(|t| !(t.is_finite() && *t >= 0.0))
        || spec.times.windows(2).any(|w| w[1] < w[0])
    {
        return parameter("report times must be finite, >= 0 and non-decreasing");
    }
    let sampler = Sampler::new(f)?;
    let alpha = damping.alpha();
    let (center0, particle_alpha) = match spec.friction {
        FrictionTarget::CoherentPart => (fock_mean(f), 0.0),
        FrictionTarget::WholeParticle => (Complex64::new(0.0, 0.0), alpha),
    };

    // deterministic center trajectory, same step schedule as the particles
    let mut centers = Vec::with_capacity(spec.times.len());
    let mut m = to_point(center0);
    let mut t_prev = 0.0;
    for &t in &spec.times {
        m = advance(m, params, t - t_prev, spec.dt, alpha);
        centers.push(to_z(m));
        t_prev = t;
    }

    let nt = spec.times.len();
    struct Part {
        z: Vec<ComplexMoments>,
        abs2: Vec<Moments>,
        last: Vec<Complex64>,
        tries: usize,
    }
    let parts = chunked(spec.samples, |chunk, range| -> Result<Part> {
        let mut rng = stats::substream(spec.seed, chunk as u64);
        let mut part = Part {
            z: vec![ComplexMoments::default(); nt],
            abs2: vec![Moments::default(); nt],
            last: Vec::with_capacity(range.len()),
            tries: 0,
        };
        for _ in range {
            let (z0, tries) = sampler.draw(&mut rng)?;
            part.tries += tries;
            let mut xi = to_point(z0 - center0);
            let mut t_prev = 0.0;
            let mut z = z0;
            for (k, &t) in spec.times.iter().enumerate() {
                xi = advance(xi, params, t - t_prev, spec.dt, particle_alpha);
                t_prev = t;
                z = to_z(xi) + centers[k];
                part.z[k].push(z);
                part.abs2[k].push(z.norm_sqr());
            }
            part.last.push(z);
        }
        Ok(part)
    });

    let mut z_acc = vec![ComplexMoments::default(); nt];
    let mut abs2_acc = vec![Moments::default(); nt];
    let mut points = Vec::with_capacity(spec.samples);
    let mut tries = 0;
    for p in parts {
        let p = p?;
        for k in 0..nt {
            z_acc[k].merge(&p.z[k]);
            abs2_acc[k].merge(&p.abs2[k]);
        }
        points.extend(p.last);
        tries += p.tries;
    }
    let moments = spec
        .times
        .iter()
        .enumerate()
        .map(|(k, &t)| EnsembleMoments {
            time: t,
            mean_z: z_acc[k].estimate(),
            mean_abs2: abs2_acc[k].estimate(),
        })
        .collect();
    Ok(EnsembleRun {
        moments,
        acceptance_rate: spec.samples as f64 / tries as f64,
        bound: sampler.bound,
        final_state: EnsembleState {
            points,
            seed: spec.seed,
            time: spec.times.last().copied().unwrap_or(0.0),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bargmann::{coherent_vector, CoherentParam};

    fn coherent(c: Complex64, hbar: f64) -> FockVector {
        coherent_vector(CoherentParam(c), 30, hbar, 1e-12)
            .unwrap()
            .vector
            .normalized()
            .unwrap()
    }

    #[test]
    fn fock_mean_of_coherent_is_hbar_conj_c() {
        let c = Complex64::new(0.4, -0.3);
        let m = fock_mean(&coherent(c, 0.7));
        assert!((m - 0.7 * c.conj()).norm() < 1e-12);
        assert_eq!(
            fock_mean(&FockVector::basis(2, 5, 1.0).unwrap()),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn sampler_rejects_unnormalized() {
        let f = FockVector::basis(0, 3, 1.0)
            .unwrap()
            .scale(Complex64::new(2.0, 0.0));
        assert!(sample_fock_density(&f, 10, 1).is_err());
    }

    #[test]
    fn vacuum_samples_have_gibbs_moments() {
        let f = FockVector::basis(0, 4, 0.8).unwrap();
        let (pts, rate) = sample_fock_density(&f, 40_000, 11).unwrap();
        assert!(rate > 0.2);
        let mut m = Moments::default();
        pts.iter().for_each(|z| m.push(z.norm_sqr()));
        assert!(m.estimate().within(0.8, 4.0));
    }

    #[test]
    fn results_independent_of_thread_count() {
        let f = coherent(Complex64::new(0.5, 0.0), 1.0);
        let params = OscillatorParams::new(1.0).unwrap();
        let spec = EnsembleSpec {
            samples: 20_000,
            times: vec![0.0, 1.0],
            dt: 0.05,
            seed: 3,
            friction: FrictionTarget::CoherentPart,
        };
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| ensemble_evolve(&f, &params, &DampingParams::none(), &spec).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn damped_ensemble_relaxes_to_gibbs() {
        let f = coherent(Complex64::new(1.0, 0.0), 1.0);
        let params = OscillatorParams::new(1.0).unwrap();
        let damping = DampingParams::new(0.5).unwrap();
        let spec = EnsembleSpec {
            samples: 20_000,
            times: vec![0.0, 2.0, 4.0, 8.0, 16.0],
            dt: 0.05,
            seed: 9,
            friction: FrictionTarget::CoherentPart,
        };
        let run = ensemble_evolve(&f, &params, &damping, &spec).unwrap();
        let excess: Vec<f64> = run
            .moments
            .iter()
            .map(|m| m.mean_abs2.value - 1.0)
            .collect();
        assert!(excess[0] > 0.8);
        assert!(excess.windows(2).all(|w| w[1] < w[0] + 0.05));
        assert!(run.moments[4].mean_abs2.within(1.0, 4.0));
    }
}
