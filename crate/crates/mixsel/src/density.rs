//! True densities on [0, 1) with exact integral transforms.
//!
//! Simulators warp latent uniform variables through the inverse distribution
//! function of a target density, and risk reports need the exact projection
//! coefficients `⟨s, ψ_λ⟩` of that target. Both are cheap once the density is
//! piecewise polynomial: the distribution function is evaluated from
//! antiderivatives, so coefficients against piecewise-constant basis
//! functions (histogram, Haar) are exact, and only the trigonometric system
//! falls back to adaptive quadrature.

use serde::{Deserialize, Serialize};

use crate::basis::BasisFunction;
use crate::error::{Error, Result};
use crate::quad;

/// Tolerance used when validating that a descriptor integrates to one.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Tolerance for the quadrature used on coefficients with no exact route.
pub const COEFFICIENT_QUAD_TOL: f64 = 1e-11;

/// Largest representable point of [0, 1).
pub(crate) const MAX_OPEN: f64 = 1.0 - 0.5 * f64::EPSILON;

/// One polynomial piece `s(y) = Σ_i coeffs[i] · y^i` on `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyPiece {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

/// Serializable descriptor of a target density on [0, 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DensitySpec {
    /// `s ≡ 1`.
    Uniform,
    /// `s(y) = 2y`.
    Linear,
    /// Contiguous polynomial pieces covering [0, 1).
    PiecewisePolynomial { pieces: Vec<PolyPiece> },
}

impl DensitySpec {
    fn pieces(&self) -> Vec<PolyPiece> {
        match self {
            DensitySpec::Uniform => vec![PolyPiece { lo: 0.0, hi: 1.0, coeffs: vec![1.0] }],
            DensitySpec::Linear => vec![PolyPiece { lo: 0.0, hi: 1.0, coeffs: vec![0.0, 2.0] }],
            DensitySpec::PiecewisePolynomial { pieces } => pieces.clone(),
        }
    }
}

/// A validated piecewise-polynomial density on [0, 1).
#[derive(Debug, Clone)]
pub struct TrueDensity {
    spec: DensitySpec,
    pieces: Vec<PolyPiece>,
    /// Distribution function at each piece boundary; `cum[i]` is F(pieces[i].lo).
    cum: Vec<f64>,
    norm_sq: f64,
}

impl TrueDensity {
    /// Validates a descriptor: pieces must tile [0, 1) contiguously, the
    /// density must be nonnegative and integrate to one (within
    /// [`NORMALIZATION_TOL`]).
    pub fn new(spec: &DensitySpec) -> Result<TrueDensity> {
        let pieces = spec.pieces();
        if pieces.is_empty() {
            return Err(Error::InvalidDensity("no pieces".into()));
        }
        if pieces[0].lo != 0.0 || pieces.last().unwrap().hi != 1.0 {
            return Err(Error::InvalidDensity("pieces must cover [0, 1)".into()));
        }
        for w in pieces.windows(2) {
            if w[0].hi != w[1].lo {
                return Err(Error::InvalidDensity(format!(
                    "pieces are not contiguous at {}",
                    w[0].hi
                )));
            }
        }
        let mut cum = Vec::with_capacity(pieces.len() + 1);
        let mut total = 0.0;
        for piece in &pieces {
            if !(piece.lo < piece.hi) {
                return Err(Error::InvalidDensity(format!(
                    "empty piece [{}, {})",
                    piece.lo, piece.hi
                )));
            }
            cum.push(total);
            total += poly_integral(&piece.coeffs, piece.lo, piece.hi);
        }
        cum.push(total);
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDensity(format!("integral is {total}, not 1")));
        }
        for piece in &pieces {
            for i in 0..=4096 {
                let x = piece.lo + (piece.hi - piece.lo) * i as f64 / 4096.0;
                if poly_eval(&piece.coeffs, x) < -1e-9 {
                    return Err(Error::InvalidDensity(format!("negative density at {x}")));
                }
            }
        }
        let norm_sq = pieces
            .iter()
            .map(|p| poly_integral(&poly_square(&p.coeffs), p.lo, p.hi))
            .sum();
        Ok(TrueDensity { spec: spec.clone(), pieces, cum, norm_sq })
    }

    pub fn spec(&self) -> &DensitySpec {
        &self.spec
    }

    /// `∫ s²`, the squared L² norm of the density.
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    /// Piece boundaries, useful as quadrature cut points.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut cuts: Vec<f64> = self.pieces.iter().map(|p| p.lo).collect();
        cuts.push(1.0);
        cuts
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if !(0.0..1.0).contains(&x) {
            return 0.0;
        }
        let piece = &self.pieces[self.piece_index(x)];
        poly_eval(&piece.coeffs, x)
    }

    /// The distribution function `F(x) = ∫₀ˣ s`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return *self.cum.last().unwrap();
        }
        let i = self.piece_index(x);
        let piece = &self.pieces[i];
        self.cum[i] + poly_integral(&piece.coeffs, piece.lo, x)
    }

    /// A right inverse of the distribution function: returns `x ∈ [0, 1)`
    /// with `F(x) = u`.
    ///
    /// Solved per piece by bisection refined with Newton steps; where the
    /// density vanishes (flat stretches of F) any preimage is acceptable.
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        // Find the piece whose cumulative range contains u.
        let mut i = match self.cum.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
            Ok(exact) => exact,
            Err(ins) => ins.saturating_sub(1),
        };
        i = i.min(self.pieces.len() - 1);
        let piece = &self.pieces[i];
        let target = u - self.cum[i];
        let (mut lo, mut hi) = (piece.lo, piece.hi);
        let g = |x: f64| poly_integral(&piece.coeffs, piece.lo, x);
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let gx = g(x);
            if gx > target {
                hi = x;
            } else {
                lo = x;
            }
            let deriv = poly_eval(&piece.coeffs, x);
            let newton = if deriv > 0.0 { x - (gx - target) / deriv } else { f64::NAN };
            x = if newton.is_finite() && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-16 {
                break;
            }
        }
        x.clamp(0.0, MAX_OPEN)
    }

    /// The exact projection coefficient `⟨s, ψ_λ⟩`.
    ///
    /// Piecewise-constant basis functions reduce to differences of the
    /// distribution function; the trigonometric system uses adaptive
    /// quadrature at tolerance [`COEFFICIENT_QUAD_TOL`].
    pub fn coefficient(&self, f: &BasisFunction) -> Result<f64> {
        match *f {
            BasisFunction::HistogramBin { d, k } => {
                let d = f64::from(d);
                let lo = f64::from(k) / d;
                let hi = f64::from(k + 1) / d;
                Ok(d.sqrt() * (self.cdf(hi) - self.cdf(lo)))
            }
            BasisFunction::HaarScaling { k } => {
                let lo = 0.5 * f64::from(k);
                Ok(std::f64::consts::SQRT_2 * (self.cdf(lo + 0.5) - self.cdf(lo)))
            }
            BasisFunction::HaarWavelet { j, k } => {
                let w = f64::from(1u32 << j).recip();
                let lo = f64::from(k) * w;
                let mid = lo + 0.5 * w;
                let hi = lo + w;
                let scale = f64::from(1u32 << j).sqrt();
                Ok(scale * (2.0 * self.cdf(mid) - self.cdf(lo) - self.cdf(hi)))
            }
            BasisFunction::FourierConst => Ok(self.cdf(1.0)),
            BasisFunction::FourierCos { k } | BasisFunction::FourierSin { k } => {
                // Cut at every half period as well as at the density's own
                // breakpoints; without the half-period cuts the dyadic
                // subdivision of adaptive Simpson can sample sin(2πkx) at
                // its zeros only and silently report 0.
                let mut cuts = self.breakpoints();
                for j in 0..=2 * k {
                    cuts.push(f64::from(j) / f64::from(2 * k));
                }
                cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                cuts.dedup();
                quad::integrate_piecewise(
                    &|x| self.pdf(x) * f.eval(x),
                    &cuts,
                    COEFFICIENT_QUAD_TOL,
                )
            }
        }
    }

    fn piece_index(&self, x: f64) -> usize {
        self.pieces
            .partition_point(|p| p.hi <= x)
            .min(self.pieces.len() - 1)
    }
}

fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `∫_a^b Σ c_i y^i dy`, exactly.
fn poly_integral(coeffs: &[f64], a: f64, b: f64) -> f64 {
    let eval_anti = |x: f64| {
        coeffs
            .iter()
            .enumerate()
            .fold(0.0, |acc, (i, &c)| acc + c * x.powi(i as i32 + 1) / (i as f64 + 1.0))
    };
    eval_anti(b) - eval_anti(a)
}

fn poly_square(coeffs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; 2 * coeffs.len().saturating_sub(1) + 1];
    for (i, &a) in coeffs.iter().enumerate() {
        for (j, &b) in coeffs.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}
