//! The analytic first-order orbit as a sum of five rotating harmonics
//!
//! ```text
//! r = c₋₁ + (e^{iφ0} + c₀) ψ0 + c₁ ψ0² + b₋₁ ψ0^{-(α-2)} + b₁ ψ0^{α},   ψ0 = e^{it}
//! ```
//!
//! read through the e1 bridge. In Copernican language the constant term is
//! the eccentric, the ψ0 term the deferent, and the remaining three are
//! epicycles.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::clifford::{rotor, vec_of, ComplexAmp, Vec2};
use crate::coefficients::{residuals, CoeffSet, ResidualReport, Resonance, ResonancePolicy};
use crate::error::{finite, Error, Result};
use crate::model::ScaledConfig;

/// Default sampling density for orbit grids, per unperturbed period.
pub const SAMPLES_PER_PERIOD: usize = 2048;

/// Default denominator cap for rationalizing α.
pub const DEFAULT_MAX_DEN: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Harmonic {
    /// Frequency 0, displaces the orbit centre.
    Eccentric,
    /// Frequency 1, the main circular motion.
    Deferent,
    /// Frequency 2.
    Epicycle2,
    /// Frequency -(α - 2).
    EpicycleB,
    /// Frequency α.
    EpicycleA,
}

impl Harmonic {
    pub const ALL: [Harmonic; 5] = [
        Harmonic::Eccentric,
        Harmonic::Deferent,
        Harmonic::Epicycle2,
        Harmonic::EpicycleB,
        Harmonic::EpicycleA,
    ];

    /// Column suffix used in tabular output.
    pub fn label(self) -> &'static str {
        match self {
            Harmonic::Eccentric => "0",
            Harmonic::Deferent => "1",
            Harmonic::Epicycle2 => "2",
            Harmonic::EpicycleB => "B",
            Harmonic::EpicycleA => "A",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTerm {
    pub harmonic: Harmonic,
    pub coeff: ComplexAmp,
    /// Angular frequency in units of ω0. Non-integer in general.
    pub freq_mult: f64,
}

impl HarmonicTerm {
    fn at(&self, t: f64) -> ComplexAmp {
        self.coeff * rotor(self.freq_mult * t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSolution {
    pub terms: [HarmonicTerm; 5],
    pub cfg: ScaledConfig,
    pub coefficients: CoeffSet,
    pub resonance: Resonance,
    pub warnings: Vec<String>,
}

/// Builds the analytic orbit for `cfg`.
pub fn solve(cfg: &ScaledConfig, policy: &ResonancePolicy) -> Result<OrbitSolution> {
    let coefficients = CoeffSet::compute(cfg, policy)?;
    let resonance = policy.check(cfg.alpha)?;
    let mut warnings = Vec::new();
    if let Resonance::NearResonant { which, distance } = resonance {
        warnings.push(format!(
            "alpha is {distance:e} from resonant ratio {which}; the first-order amplitudes are large and the expansion may not hold"
        ));
    }
    if cfg.outside_perturbative_regime() {
        warnings.push(format!(
            "eps = {} exceeds {}; first-order theory is outside its validity regime",
            cfg.eps,
            crate::model::EPS_WARN_THRESHOLD
        ));
    }
    let alpha = cfg.alpha;
    let c = &coefficients;
    let term = |harmonic, coeff, freq_mult| HarmonicTerm {
        harmonic,
        coeff,
        freq_mult,
    };
    Ok(OrbitSolution {
        terms: [
            term(Harmonic::Eccentric, c.c_m1, 0.0),
            term(Harmonic::Deferent, rotor(cfg.phi0) + c.c_0, 1.0),
            term(Harmonic::Epicycle2, c.c_p1, 2.0),
            term(Harmonic::EpicycleB, c.b_m1, -(alpha - 2.0)),
            term(Harmonic::EpicycleA, c.b_p1, alpha),
        ],
        cfg: *cfg,
        coefficients,
        resonance,
        warnings,
    })
}

impl OrbitSolution {
    pub fn term(&self, h: Harmonic) -> &HarmonicTerm {
        &self.terms[h as usize]
    }

    pub fn position(&self, t: f64) -> Vec2 {
        vec_of(self.terms.iter().map(|term| term.at(t)).sum())
    }

    pub fn velocity(&self, t: f64) -> Vec2 {
        vec_of(
            self.terms
                .iter()
                .map(|term| ComplexAmp::I * term.at(t) * term.freq_mult)
                .sum(),
        )
    }

    /// Per-harmonic position vectors, in [`Harmonic::ALL`] order.
    pub fn components(&self, t: f64) -> [Vec2; 5] {
        self.terms.map(|term| vec_of(term.at(t)))
    }

    /// First-order displacement `r - r0` in the inertial frame.
    pub fn perturbation(&self, t: f64) -> Vec2 {
        self.position(t) - vec_of(rotor(t + self.cfg.phi0))
    }

    /// The perturbation in the frame co-rotating with ψ0, together with its
    /// first and second time derivatives.
    pub fn corotating(&self, t: f64) -> [ComplexAmp; 3] {
        let mut out = [ComplexAmp::ZERO; 3];
        for term in &self.terms {
            let coeff = match term.harmonic {
                Harmonic::Deferent => self.coefficients.c_0,
                _ => term.coeff,
            };
            let f = term.freq_mult - 1.0;
            let z = coeff * rotor(f * t);
            out[0] += z;
            out[1] += ComplexAmp::I * z * f;
            out[2] += z * (-f * f);
        }
        out
    }

    /// Residual of the co-rotating linearized equation
    /// `w'' + 2i w' - 3/2 (w + e^{2φ0 i} w*) + â e^{i(α-1)t}` at time `t`.
    pub fn linearized_residual(&self, t: f64) -> ComplexAmp {
        let [w, dw, ddw] = self.corotating(t);
        let e2 = rotor(2.0 * self.cfg.phi0);
        let forcing = self.cfg.amplitude() * rotor((self.cfg.alpha - 1.0) * t);
        ddw + ComplexAmp::I * dw * 2.0 - (w + e2 * w.conj()) * 1.5 + forcing
    }

    pub fn residuals(&self) -> ResidualReport {
        residuals(&self.coefficients, &self.cfg)
    }

    pub fn freq_mults(&self) -> [f64; 5] {
        self.terms.map(|t| t.freq_mult)
    }

    /// Largest magnitude among the purely first-order coefficients.
    pub fn max_perturbation_magnitude(&self) -> f64 {
        self.coefficients.max_magnitude()
    }
}

/// Inclusive uniform grid `[0, t_end]` of `samples` points.
pub fn sample_times(t_end: f64, samples: usize) -> Result<Vec<f64>> {
    finite("t_end", t_end)?;
    match samples {
        0 => Err(Error::InvalidInput("samples must be at least 1".into())),
        1 => Ok(vec![0.0]),
        n => {
            let last = (n - 1) as f64;
            Ok((0..n).map(|i| t_end * (i as f64) / last).collect())
        }
    }
}

/// Continued-fraction approximation of `x` with denominator at most
/// `max_den`, accepted only if it reproduces `x` to within floating-point
/// noise. Returns `(numerator, denominator)` in lowest terms.
pub fn rationalize(x: f64, max_den: u64) -> Option<(i64, u64)> {
    if !x.is_finite() || max_den == 0 {
        return None;
    }
    let tol = 1e-12 * x.abs().max(1.0);
    let (mut h0, mut h1): (i128, i128) = (0, 1);
    let (mut k0, mut k1): (i128, i128) = (1, 0);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > i128::from(max_den) {
            return None;
        }
        if ((h2 as f64) / (k2 as f64) - x).abs() <= tol {
            return Some((h2 as i64, k2 as u64));
        }
        let frac = rest - a;
        if frac == 0.0 {
            return None;
        }
        rest = 1.0 / frac;
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
    }
    None
}

/// Orbit period `τ = (n/2) τ0`, or `None` when α has no rational form within
/// the denominator cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodResult {
    pub n: Option<u64>,
    pub max_den: u64,
    /// α as `p/q`, when rational within the cap.
    pub alpha_rational: Option<(i64, u64)>,
}

impl PeriodResult {
    /// `τ/τ0`.
    pub fn multiple(&self) -> Option<f64> {
        self.n.map(|n| n as f64 / 2.0)
    }

    /// `τ` in scaled time.
    pub fn tau(&self) -> Option<f64> {
        self.n.map(|n| n as f64 * std::f64::consts::PI)
    }

    /// Candidate shorter periods `τ/p` for each prime `p` dividing `n`.
    pub fn proper_divisor_candidates(&self) -> Vec<f64> {
        let Some(n) = self.n else { return Vec::new() };
        prime_factors(n)
            .into_iter()
            .map(|p| n as f64 * std::f64::consts::PI / p as f64)
            .collect()
    }
}

impl fmt::Display for PeriodResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.n {
            Some(n) if n % 2 == 0 => write!(f, "tau = {} tau0", n / 2),
            Some(n) => write!(f, "tau = {n}/2 tau0"),
            None => write!(f, "aperiodic (denominator cap {})", self.max_den),
        }
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Least common multiple of the rotation periods of the five harmonics.
///
/// With α = p/q the nonzero angular frequencies are 1, 2, |p - 2q|/q and
/// |p|/q, whose periods in units of τ0 are the reciprocals. The lcm of
/// reduced fractions a/b is lcm(a)/gcd(b); the period of the deferent (1/1)
/// forces the gcd to 1, so τ/τ0 is always an integer.
pub fn period(alpha: f64, max_den: u64) -> PeriodResult {
    let max_den = max_den.max(1);
    let Some((p, q)) = rationalize(alpha, max_den) else {
        return PeriodResult {
            n: None,
            max_den,
            alpha_rational: None,
        };
    };
    let q_i = q as i64;
    let mut num: u64 = 1;
    let mut den: u64 = 1;
    // periods as reduced fractions (a, b) meaning a/b
    let mut add = |a: u64, b: u64| {
        let g = a.gcd(&b);
        num = num.lcm(&(a / g));
        den = den.gcd(&(b / g));
    };
    add(1, 2);
    for freq_num in [(p - 2 * q_i).unsigned_abs(), p.unsigned_abs()] {
        if freq_num != 0 {
            add(q, freq_num);
        }
    }
    debug_assert_eq!(den, 1);
    PeriodResult {
        n: Some(2 * num / den),
        max_den,
        alpha_rational: Some((p, q)),
    }
}

/// Largest first-order coefficient magnitude at a large frequency ratio,
/// with φ0 = δ = 0.
pub fn limit_check(alpha_large: f64, eps: f64) -> Result<f64> {
    if alpha_large.is_nan() || alpha_large.abs() < 10.0 {
        return Err(Error::InvalidInput(format!(
            "limit check needs |alpha| >= 10, got {alpha_large}"
        )));
    }
    let cfg = ScaledConfig::new(alpha_large, eps, 0.0, 0.0)?;
    Ok(CoeffSet::compute(&cfg, &ResonancePolicy::default())?.max_magnitude())
}
