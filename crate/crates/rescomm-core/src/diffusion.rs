//! Molecular diffusion channel.
//!
//! Closed-form concentration pulse of an instantaneous point release of Q
//! molecules under Brownian motion:
//!
//!   c(r, t) = Q / (4 pi D t)^{3/2} * exp(-r^2 / (4 D t))
//!
//! plus a threshold receiver and a noise-free on-off-keyed link built on
//! pulse superposition.

use crate::error::{Error, Result};
use crate::num::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionParams<S> {
    /// Molecules per emission (pure count).
    pub q_molecules: S,
    /// Diffusion coefficient (m^2/s).
    pub d_coeff: S,
    /// Sender to receiver distance (m).
    pub r: S,
}

impl<S: Real> DiffusionParams<S> {
    pub fn new(q_molecules: S, d_coeff: S, r: S) -> Result<Self> {
        let p = DiffusionParams {
            q_molecules,
            d_coeff,
            r,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.q_molecules.is_finite() || self.q_molecules < S::zero() {
            return Err(Error::Config("diffusion q_molecules must be >= 0".into()));
        }
        if !self.d_coeff.is_finite() || self.d_coeff <= S::zero() {
            return Err(Error::Config("diffusion d_coeff must be > 0".into()));
        }
        if !self.r.is_finite() || self.r < S::zero() {
            return Err(Error::Config("diffusion distance r must be >= 0".into()));
        }
        Ok(())
    }
}

/// One receiver sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationSample<S> {
    pub t: S,
    pub c: S,
}

/// Receiver design for the on-off-keyed link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OokLinkParams<S> {
    pub symbol_period: S,
    pub detect_threshold: S,
    pub samples_per_symbol: usize,
}

impl<S: Real> OokLinkParams<S> {
    pub fn validate(&self) -> Result<()> {
        if !self.symbol_period.is_finite() || self.symbol_period <= S::zero() {
            return Err(Error::Config("ook symbol_period must be > 0".into()));
        }
        if !self.detect_threshold.is_finite() {
            return Err(Error::Config("ook detect_threshold must be finite".into()));
        }
        if self.samples_per_symbol < 1 {
            return Err(Error::Config("ook samples_per_symbol must be >= 1".into()));
        }
        Ok(())
    }
}

/// Concentration at the receiver distance at time t after emission.
///
/// t = 0 with r > 0 evaluates to the limit value 0; t = 0 with r = 0 is a
/// hard singularity error.
pub fn concentration<S: Real>(params: &DiffusionParams<S>, t: S) -> Result<S> {
    params.validate()?;
    if !t.is_finite() || t < S::zero() {
        return Err(Error::RejectedInput(format!("time must be finite and >= 0, got {t}")));
    }
    if t == S::zero() {
        if params.r == S::zero() {
            return Err(Error::Singularity(
                "concentration undefined at r = 0, t = 0".into(),
            ));
        }
        return Ok(S::zero());
    }
    let four = S::of(4.0);
    let four_d_t = four * params.d_coeff * t;
    let norm = (four_d_t * S::PI()).powf(S::of(1.5));
    let arg = -(params.r * params.r) / four_d_t;
    Ok(params.q_molecules / norm * arg.exp())
}

/// Time of peak concentration at distance r: r^2 / (6 D).
pub fn peak_time<S: Real>(params: &DiffusionParams<S>) -> Result<S> {
    params.validate()?;
    if params.r == S::zero() {
        return Err(Error::Model(
            "peak time undefined at r = 0 (concentration decreases monotonically)".into(),
        ));
    }
    Ok(params.r * params.r / (S::of(6.0) * params.d_coeff))
}

/// Total molecule count at time t, by adaptive quadrature of the radial
/// shell integral c(r', t) * 4 pi r'^2 over [0, 12 sqrt(2 D t)].
///
/// The cutoff is >= 12 standard deviations of the Gaussian, truncating far
/// below the quadrature tolerance.
pub fn total_mass<S: Real>(params: &DiffusionParams<S>, t: S) -> Result<S> {
    params.validate()?;
    if !t.is_finite() || t <= S::zero() {
        return Err(Error::RejectedInput(format!("time must be finite and > 0, got {t}")));
    }
    if params.q_molecules == S::zero() {
        return Ok(S::zero());
    }
    let two = S::of(2.0);
    let r_max = S::of(12.0) * (two * params.d_coeff * t).sqrt();
    let four_pi = S::of(4.0) * S::PI();
    let shell = |rp: S| -> S {
        let p = DiffusionParams {
            q_molecules: params.q_molecules,
            d_coeff: params.d_coeff,
            r: rp,
        };
        concentration(&p, t).expect("t > 0 validated") * four_pi * rp * rp
    };
    let tol = S::of(1e-10) * params.q_molecules;
    adaptive_simpson(&shell, S::zero(), r_max, tol, 40)
}

/// Adaptive Simpson quadrature with absolute tolerance.
fn adaptive_simpson<S: Real>(
    f: &dyn Fn(S) -> S,
    a: S,
    b: S,
    tol: S,
    max_depth: u32,
) -> Result<S> {
    fn simpson<S: Real>(fa: S, fm: S, fb: S, h: S) -> S {
        h / S::of(6.0) * (fa + S::of(4.0) * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<S: Real>(
        f: &dyn Fn(S) -> S,
        a: S,
        b: S,
        fa: S,
        fm: S,
        fb: S,
        whole: S,
        tol: S,
        depth: u32,
    ) -> Result<S> {
        let half = S::of(0.5);
        let m = half * (a + b);
        let lm = half * (a + m);
        let rm = half * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if delta.abs() <= S::of(15.0) * tol {
            return Ok(left + right + delta / S::of(15.0));
        }
        if depth == 0 {
            return Err(Error::Numeric(format!(
                "adaptive quadrature failed to converge on [{a}, {b}]: residual {delta}"
            )));
        }
        let half_tol = tol * half;
        Ok(recurse(f, a, m, fa, flm, fm, left, half_tol, depth - 1)?
            + recurse(f, m, b, fm, frm, fb, right, half_tol, depth - 1)?)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(S::of(0.5) * (a + b));
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

/// Superposition of pulses emitted at `emission_times`, observed at time t.
pub fn superposed_concentration<S: Real>(
    params: &DiffusionParams<S>,
    emission_times: &[S],
    t: S,
) -> Result<S> {
    let mut c = S::zero();
    for &t_emit in emission_times {
        if t > t_emit {
            c += concentration(params, t - t_emit)?;
        }
    }
    Ok(c)
}

/// Outcome of one on-off-keyed link run.
#[derive(Debug, Clone, PartialEq)]
pub struct OokRun<S> {
    pub sent: Vec<u8>,
    pub received: Vec<u8>,
    /// Peak concentration observed inside each symbol window.
    pub peak_c: Vec<S>,
}

/// Simulate a noise-free OOK link: each 1-bit emits Q molecules at its
/// symbol start; the receiver superposes all past pulses, samples each
/// symbol window and thresholds the window maximum.
pub fn simulate_ook<S: Real>(
    params: &DiffusionParams<S>,
    link: &OokLinkParams<S>,
    bits: &[u8],
) -> Result<OokRun<S>> {
    params.validate()?;
    link.validate()?;
    if bits.is_empty() {
        return Err(Error::RejectedInput("ook bit sequence must be non-empty".into()));
    }
    if let Some(bad) = bits.iter().find(|&&b| b > 1) {
        return Err(Error::RejectedInput(format!("ook bits must be 0/1, got {bad}")));
    }
    let emissions: Vec<S> = bits
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == 1)
        .map(|(k, _)| S::from_usize(k).unwrap() * link.symbol_period)
        .collect();

    let mut received = Vec::with_capacity(bits.len());
    let mut peaks = Vec::with_capacity(bits.len());
    let n_samples = S::from_usize(link.samples_per_symbol).unwrap();
    for k in 0..bits.len() {
        let t_start = S::from_usize(k).unwrap() * link.symbol_period;
        let mut peak = S::zero();
        for j in 1..=link.samples_per_symbol {
            let t = t_start + S::from_usize(j).unwrap() / n_samples * link.symbol_period;
            peak = peak.max(superposed_concentration(params, &emissions, t)?);
        }
        received.push(u8::from(peak >= link.detect_threshold));
        peaks.push(peak);
    }
    Ok(OokRun {
        sent: bits.to_vec(),
        received,
        peak_c: peaks,
    })
}

/// Write a pulse response as `t,c` CSV.
pub fn write_pulse_csv<S: Real, W: std::io::Write>(
    mut w: W,
    samples: &[ConcentrationSample<S>],
) -> Result<()> {
    writeln!(w, "t,c")?;
    for s in samples {
        writeln!(w, "{},{}", s.t.to_f64_lossy(), s.c.to_f64_lossy())?;
    }
    Ok(())
}

/// Write an OOK run as `bit_index,sent,received,peak_c` CSV.
pub fn write_ook_csv<S: Real, W: std::io::Write>(mut w: W, run: &OokRun<S>) -> Result<()> {
    writeln!(w, "bit_index,sent,received,peak_c")?;
    for k in 0..run.sent.len() {
        writeln!(
            w,
            "{},{},{},{}",
            k,
            run.sent[k],
            run.received[k],
            run.peak_c[k].to_f64_lossy()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> DiffusionParams<f64> {
        DiffusionParams::new(1e6, 1e-9, 1e-6).unwrap()
    }

    #[test]
    fn zero_emission_is_zero_everywhere() {
        let p = DiffusionParams::new(0.0, 1e-9, 1e-6).unwrap();
        for t in [1e-6, 1e-3, 1.0] {
            assert_eq!(concentration(&p, t).unwrap(), 0.0);
        }
        assert_eq!(total_mass(&p, 1e-3).unwrap(), 0.0);
    }

    #[test]
    fn origin_value_without_exponential_term() {
        // r = 0, t = 1: c = Q / (4 pi D)^{3/2}
        let p = DiffusionParams::new(2.5e4, 3e-7, 0.0).unwrap();
        let expect = 2.5e4 / (4.0 * std::f64::consts::PI * 3e-7_f64).powf(1.5);
        let got = concentration(&p, 1.0).unwrap();
        assert!((got - expect).abs() / expect < 1e-15);
    }

    #[test]
    fn t_zero_limit_and_singularity() {
        let p = params();
        assert_eq!(concentration(&p, 0.0).unwrap(), 0.0);
        let origin = DiffusionParams::new(1.0, 1e-9, 0.0).unwrap();
        assert!(matches!(
            concentration(&origin, 0.0),
            Err(Error::Singularity(_))
        ));
        assert!(concentration(&p, -1.0).is_err());
    }

    #[test]
    fn peak_time_matches_numeric_argmax() {
        // golden-section argmax oracle over the closed form
        let p = params();
        let analytic = peak_time(&p).unwrap();
        assert!((analytic - 1.6667e-4).abs() / 1.6667e-4 < 1e-4);
        let numeric = golden_section_argmax(|t| concentration(&p, t).unwrap(), 1e-6, 1e-2);
        assert!((numeric - analytic).abs() / analytic < 1e-3);
    }

    #[test]
    fn peak_time_scaling_laws() {
        let p = params();
        let t0 = peak_time(&p).unwrap();
        let doubled_r = DiffusionParams::new(p.q_molecules, p.d_coeff, 2.0 * p.r).unwrap();
        assert!((peak_time(&doubled_r).unwrap() - 4.0 * t0).abs() / t0 < 1e-12);
        let doubled_d = DiffusionParams::new(p.q_molecules, 2.0 * p.d_coeff, p.r).unwrap();
        assert!((peak_time(&doubled_d).unwrap() - 0.5 * t0).abs() / t0 < 1e-12);
        let origin = DiffusionParams::new(1.0, 1e-9, 0.0).unwrap();
        assert!(peak_time(&origin).is_err());
    }

    #[test]
    fn mass_is_conserved() {
        let p = params();
        for t in [1e-6, 1e-4, 1e-2, 1.0, 100.0] {
            let mass = total_mass(&p, t).unwrap();
            assert!(
                (mass - p.q_molecules).abs() / p.q_molecules < 1e-6,
                "t={t}: mass {mass}"
            );
        }
    }

    #[test]
    fn monotone_decay_in_distance() {
        let t = 1e-3;
        let mut last = f64::INFINITY;
        for k in 0..50 {
            let r = 1e-7 * (k as f64 + 0.0);
            let p = DiffusionParams::new(1e6, 1e-9, r).unwrap();
            let c = concentration(&p, t).unwrap();
            assert!(c < last || k == 0);
            last = c;
        }
    }

    #[test]
    fn ook_all_zero_round_trip() {
        let p = params();
        let link = OokLinkParams {
            symbol_period: 1e-3,
            detect_threshold: 1.0,
            samples_per_symbol: 8,
        };
        let run = simulate_ook(&p, &link, &[0, 0, 0, 0]).unwrap();
        assert_eq!(run.received, vec![0, 0, 0, 0]);
        assert!(run.peak_c.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn ook_clean_round_trip_at_generous_period() {
        // threshold at half the isolated pulse peak
        let p = params();
        let tp = peak_time(&p).unwrap();
        let peak = concentration(&p, tp).unwrap();
        // At tighter spacing the tail of a pulse still exceeds half its own
        // peak in the next window, so "generous" here means 6x peak time.
        let link = OokLinkParams {
            symbol_period: 6.0 * tp,
            detect_threshold: 0.5 * peak,
            samples_per_symbol: 32,
        };
        let bits = [1u8, 0, 1, 1, 0, 0, 1];
        let run = simulate_ook(&p, &link, &bits).unwrap();
        assert_eq!(run.received, bits.to_vec());
    }

    #[test]
    fn isi_raises_successive_peaks_in_a_ones_run() {
        // superposition: with a short symbol period each later
        // 1-symbol accumulates tail mass from all earlier emissions.
        let p = params();
        let tp = peak_time(&p).unwrap();
        let link = OokLinkParams {
            symbol_period: 0.5 * tp,
            detect_threshold: f64::MAX,
            samples_per_symbol: 16,
        };
        let run = simulate_ook(&p, &link, &[1; 8]).unwrap();
        for k in 1..run.peak_c.len() {
            assert!(run.peak_c[k] > run.peak_c[k - 1]);
        }
    }

    #[test]
    fn superposition_linearity() {
        // channel(e1 union e2) == channel(e1) + channel(e2), sample-wise
        let p = params();
        let tp = peak_time(&p).unwrap();
        let e1 = [0.0, 4.0 * tp];
        let e2 = [2.0 * tp, 5.0 * tp];
        let all = [0.0, 2.0 * tp, 4.0 * tp, 5.0 * tp];
        for k in 1..200 {
            let t = k as f64 * 0.05 * tp;
            let sum = superposed_concentration(&p, &e1, t).unwrap()
                + superposed_concentration(&p, &e2, t).unwrap();
            let combined = superposed_concentration(&p, &all, t).unwrap();
            assert!((combined - sum).abs() <= 1e-12 * sum.max(1e-30));
        }
    }

    fn golden_section_argmax(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - inv_phi * (b - a);
            let d = a + inv_phi * (b - a);
            if f(c) < f(d) {
                a = c;
            } else {
                b = d;
            }
        }
        0.5 * (a + b)
    }
}
