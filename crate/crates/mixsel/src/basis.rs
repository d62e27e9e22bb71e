//! Orthonormal bases of L²([0, 1)) and the nested model collections built
//! from them.
//!
//! Three collections are supported:
//!
//! * **histogram** — regular histograms with `d` bins, `ψ_k = √d · 1_{[k/d, (k+1)/d)}`;
//! * **fourier** — the trigonometric system `1, √2 cos(2πkx), √2 sin(2πkx)`;
//! * **wavelet-haar** — the Haar system `φ = 1_{[0,1)}`, `ψ = 1_{[0,1/2)} − 1_{[1/2,1)}`,
//!   with scaling functions `ψ_{0,k} = √2 φ(2x − k)` and wavelets
//!   `ψ_{j,k} = 2^{j/2} ψ(2^j x − k)` for levels `j ≥ 1`.
//!
//! A model is the span of a finite label set `Λ_m`; models inside one
//! collection are nested (each label list is a prefix of the next). Every
//! model knows the exact sup-norm bound `b_m² = sup_x Σ_λ ψ_λ(x)²`, which the
//! penalization theory tracks: `d` for histograms, `1 + 2m` for the
//! trigonometric system, and `2^{J+1}` for Haar up to level `J`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which orthonormal system a collection is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CollectionKind {
    #[serde(rename = "histogram")]
    Histogram,
    #[serde(rename = "fourier")]
    Fourier,
    #[serde(rename = "wavelet-haar")]
    HaarWavelet,
}

impl fmt::Display for CollectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            CollectionKind::Histogram => "histogram",
            CollectionKind::Fourier => "fourier",
            CollectionKind::HaarWavelet => "wavelet-haar",
        };
        f.write_str(name)
    }
}

impl FromStr for CollectionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "histogram" => Ok(CollectionKind::Histogram),
            "fourier" => Ok(CollectionKind::Fourier),
            "wavelet-haar" | "haar" => Ok(CollectionKind::HaarWavelet),
            other => Err(Error::UnknownKind(other.to_string())),
        }
    }
}

/// A label `λ` inside a model's index set `Λ_m`.
///
/// Histogram labels are bin indices; the bin width is a property of the model
/// (`d` bins), so the same label `Bin { k: 0 }` appears in every histogram
/// model — this is what makes the label sets nested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisLabel {
    /// Histogram bin `k`.
    Bin { k: u32 },
    /// The constant function 1.
    FourierConst,
    /// `√2 cos(2πkx)`, `k ≥ 1`.
    FourierCos { k: u32 },
    /// `√2 sin(2πkx)`, `k ≥ 1`.
    FourierSin { k: u32 },
    /// Haar scaling function `√2 φ(2x − k)`, `k ∈ {0, 1}`.
    HaarScaling { k: u32 },
    /// Haar wavelet `2^{j/2} ψ(2^j x − k)`, `j ≥ 1`, `0 ≤ k < 2^j`.
    HaarWavelet { j: u32, k: u32 },
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::Bin { k } => write!(f, "bin({k})"),
            BasisLabel::FourierConst => write!(f, "const"),
            BasisLabel::FourierCos { k } => write!(f, "cos({k})"),
            BasisLabel::FourierSin { k } => write!(f, "sin({k})"),
            BasisLabel::HaarScaling { k } => write!(f, "scaling({k})"),
            BasisLabel::HaarWavelet { j, k } => write!(f, "wavelet({j},{k})"),
        }
    }
}

/// A fully resolved basis function that can be evaluated on its own (the
/// histogram bin count is baked in).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisFunction {
    HistogramBin { d: u32, k: u32 },
    FourierConst,
    FourierCos { k: u32 },
    FourierSin { k: u32 },
    HaarScaling { k: u32 },
    HaarWavelet { j: u32, k: u32 },
}

impl BasisFunction {
    /// Evaluates the function at `x ∈ [0, 1)`.
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            BasisFunction::HistogramBin { d, k } => {
                let d = f64::from(d);
                let lo = f64::from(k) / d;
                let hi = f64::from(k + 1) / d;
                if x >= lo && x < hi {
                    d.sqrt()
                } else {
                    0.0
                }
            }
            BasisFunction::FourierConst => 1.0,
            BasisFunction::FourierCos { k } => SQRT_2 * (2.0 * PI * f64::from(k) * x).cos(),
            BasisFunction::FourierSin { k } => SQRT_2 * (2.0 * PI * f64::from(k) * x).sin(),
            BasisFunction::HaarScaling { k } => {
                let t = 2.0 * x - f64::from(k);
                if (0.0..1.0).contains(&t) {
                    SQRT_2
                } else {
                    0.0
                }
            }
            BasisFunction::HaarWavelet { j, k } => {
                let t = exp2_i(j) * x - f64::from(k);
                let scale = exp2_i(j).sqrt();
                if (0.0..0.5).contains(&t) {
                    scale
                } else if (0.5..1.0).contains(&t) {
                    -scale
                } else {
                    0.0
                }
            }
        }
    }

    /// The endpoints of the intervals on which the function is piecewise
    /// constant, or `None` for the trigonometric functions.
    pub fn breakpoints(&self) -> Option<Vec<f64>> {
        match *self {
            BasisFunction::HistogramBin { d, k } => {
                let d = f64::from(d);
                Some(vec![f64::from(k) / d, f64::from(k + 1) / d])
            }
            BasisFunction::HaarScaling { k } => {
                Some(vec![0.5 * f64::from(k), 0.5 * f64::from(k + 1)])
            }
            BasisFunction::HaarWavelet { j, k } => {
                let w = exp2_i(j).recip();
                let lo = f64::from(k) * w;
                Some(vec![lo, lo + 0.5 * w, lo + w])
            }
            _ => None,
        }
    }
}

fn exp2_i(j: u32) -> f64 {
    f64::from(1u32 << j)
}

/// One projection model: the span of an explicit label set `Λ_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    index: usize,
    kind: CollectionKind,
    /// `d` for histograms, `m` for the trigonometric system, `J` for Haar.
    resolution: u32,
    labels: Vec<BasisLabel>,
}

impl Model {
    /// Builds the histogram model with `d` bins.
    pub fn histogram(index: usize, d: u32) -> Model {
        let labels = (0..d).map(|k| BasisLabel::Bin { k }).collect();
        Model { index, kind: CollectionKind::Histogram, resolution: d, labels }
    }

    /// Builds the trigonometric model spanning frequencies `1..=m` plus the
    /// constant.
    pub fn fourier(index: usize, m: u32) -> Model {
        let mut labels = vec![BasisLabel::FourierConst];
        for k in 1..=m {
            labels.push(BasisLabel::FourierCos { k });
            labels.push(BasisLabel::FourierSin { k });
        }
        Model { index, kind: CollectionKind::Fourier, resolution: m, labels }
    }

    /// Builds the Haar model with wavelet levels `1..=j_max` plus the two
    /// scaling functions.
    pub fn haar(index: usize, j_max: u32) -> Model {
        let mut labels = vec![BasisLabel::HaarScaling { k: 0 }, BasisLabel::HaarScaling { k: 1 }];
        for j in 1..=j_max {
            for k in 0..(1u32 << j) {
                labels.push(BasisLabel::HaarWavelet { j, k });
            }
        }
        Model { index, kind: CollectionKind::HaarWavelet, resolution: j_max, labels }
    }

    /// Position of the model in its collection (1-based).
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn kind(&self) -> CollectionKind {
        self.kind
    }

    /// `d` for histograms, `m` for the trigonometric system, `J` for Haar.
    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    /// The label set `Λ_m` in canonical order.
    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    /// Number of basis functions in the model.
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Whether `λ ∈ Λ_m`.
    pub fn contains(&self, label: BasisLabel) -> bool {
        match (self.kind, label) {
            (CollectionKind::Histogram, BasisLabel::Bin { k }) => k < self.resolution,
            (CollectionKind::Fourier, BasisLabel::FourierConst) => true,
            (CollectionKind::Fourier, BasisLabel::FourierCos { k })
            | (CollectionKind::Fourier, BasisLabel::FourierSin { k }) => {
                k >= 1 && k <= self.resolution
            }
            (CollectionKind::HaarWavelet, BasisLabel::HaarScaling { k }) => k < 2,
            (CollectionKind::HaarWavelet, BasisLabel::HaarWavelet { j, k }) => {
                j >= 1 && j <= self.resolution && k < (1u32 << j)
            }
            _ => false,
        }
    }

    /// Resolves a label into a standalone basis function.
    ///
    /// Errors if `λ ∉ Λ_m`.
    pub fn function(&self, label: BasisLabel) -> Result<BasisFunction> {
        if !self.contains(label) {
            return Err(Error::LabelNotInModel { model: self.index, label: label.to_string() });
        }
        Ok(self.resolve(label))
    }

    fn resolve(&self, label: BasisLabel) -> BasisFunction {
        match label {
            BasisLabel::Bin { k } => BasisFunction::HistogramBin { d: self.resolution, k },
            BasisLabel::FourierConst => BasisFunction::FourierConst,
            BasisLabel::FourierCos { k } => BasisFunction::FourierCos { k },
            BasisLabel::FourierSin { k } => BasisFunction::FourierSin { k },
            BasisLabel::HaarScaling { k } => BasisFunction::HaarScaling { k },
            BasisLabel::HaarWavelet { j, k } => BasisFunction::HaarWavelet { j, k },
        }
    }

    /// The basis function at a slot of the canonical label order.
    pub fn function_at(&self, slot: usize) -> BasisFunction {
        self.resolve(self.labels[slot])
    }

    /// Evaluates `ψ_λ(x)`; errors if `λ ∉ Λ_m`.
    pub fn eval(&self, label: BasisLabel, x: f64) -> Result<f64> {
        Ok(self.function(label)?.eval(x))
    }

    /// Calls `f(slot, ψ_λ(x))` for every λ with `ψ_λ(x) ≠ 0`, where `slot`
    /// is the position of λ in the canonical label order.
    ///
    /// Outside [0, 1) — where every localized function vanishes and samples
    /// never lie, but quadrature may probe the endpoint — nothing is called.
    ///
    /// For localized systems this visits O(1) (histogram) or O(J) (Haar)
    /// labels per point, which is what keeps full-collection fits cheap.
    pub fn for_each_nonzero<F: FnMut(usize, f64)>(&self, x: f64, mut f: F) {
        if !(0.0..1.0).contains(&x) {
            return;
        }
        match self.kind {
            CollectionKind::Histogram => {
                let d = self.resolution;
                let k = ((x * f64::from(d)) as usize).min(d as usize - 1);
                f(k, f64::from(d).sqrt());
            }
            CollectionKind::Fourier => {
                f(0, 1.0);
                for k in 1..=self.resolution {
                    let angle = 2.0 * PI * f64::from(k) * x;
                    f(2 * k as usize - 1, SQRT_2 * angle.cos());
                    f(2 * k as usize, SQRT_2 * angle.sin());
                }
            }
            CollectionKind::HaarWavelet => {
                let k0 = ((2.0 * x) as usize).min(1);
                f(k0, SQRT_2);
                let mut level_base = 2usize;
                for j in 1..=self.resolution {
                    let t = exp2_i(j) * x;
                    let k = (t as usize).min((1usize << j) - 1);
                    let scale = exp2_i(j).sqrt();
                    let value = if t - (k as f64) < 0.5 { scale } else { -scale };
                    f(level_base + k, value);
                    level_base += 1usize << j;
                }
            }
        }
    }

    /// The exact sup-norm bound `b_m² = sup_x Σ_{λ∈Λ_m} ψ_λ(x)²`.
    pub fn sup_norm_bound(&self) -> f64 {
        match self.kind {
            CollectionKind::Histogram => f64::from(self.resolution),
            CollectionKind::Fourier => f64::from(1 + 2 * self.resolution),
            CollectionKind::HaarWavelet => exp2_i(self.resolution + 1),
        }
    }
}

/// A nested collection of projection models over one orthonormal system.
#[derive(Debug, Clone)]
pub struct ModelCollection {
    pub kind: CollectionKind,
    pub models: Vec<Model>,
}

/// Caps applied when enumerating a collection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollectionLimits {
    /// Upper bound on `d` (histogram) and `m` (fourier); keeps desk-scale
    /// runs from enumerating thousands of models at large `n`.
    pub model_cap: u32,
    /// Optional upper bound on the Haar level `J`.
    pub level_cap: Option<u32>,
}

impl Default for CollectionLimits {
    fn default() -> Self {
        CollectionLimits { model_cap: 512, level_cap: None }
    }
}

/// Enumerates the default collection for sample size `n` (see
/// [`enumerate_models_with`] for the caps).
pub fn enumerate_models(kind: CollectionKind, n: usize) -> Result<ModelCollection> {
    enumerate_models_with(kind, n, &CollectionLimits::default())
}

/// Enumerates models for sample size `n`:
///
/// * histogram: `d = 1..=min(n/2, cap)`;
/// * fourier: `m = 1..=min(n/2, cap)` (dimensions `1 + 2m`);
/// * wavelet-haar: levels `J = 1..=min(⌊log₂ n⌋, level cap)` (dimensions `2^{J+1}`).
pub fn enumerate_models_with(
    kind: CollectionKind,
    n: usize,
    limits: &CollectionLimits,
) -> Result<ModelCollection> {
    if n < 4 {
        return Err(Error::SampleTooSmall { n, what: "model enumeration", min: 4 });
    }
    let max_res = ((n / 2) as u32).min(limits.model_cap);
    let models = match kind {
        CollectionKind::Histogram => {
            (1..=max_res).map(|d| Model::histogram(d as usize, d)).collect()
        }
        CollectionKind::Fourier => (1..=max_res).map(|m| Model::fourier(m as usize, m)).collect(),
        CollectionKind::HaarWavelet => {
            let mut j_max = n.ilog2();
            if let Some(cap) = limits.level_cap {
                j_max = j_max.min(cap);
            }
            (1..=j_max).map(|j| Model::haar(j as usize, j)).collect()
        }
    };
    Ok(ModelCollection { kind, models })
}

impl ModelCollection {
    /// Looks a model up by its collection index.
    pub fn model(&self, index: usize) -> Option<&Model> {
        self.models.iter().find(|m| m.index() == index)
    }

    /// A serializable descriptor of the collection.
    pub fn descriptor(&self) -> CollectionDescriptor {
        CollectionDescriptor {
            kind: self.kind,
            models: self
                .models
                .iter()
                .map(|m| ModelDescriptor {
                    index: m.index(),
                    resolution: m.resolution(),
                    dim: m.dim(),
                    sup_norm_bound: m.sup_norm_bound(),
                })
                .collect(),
        }
    }
}

/// JSON-friendly summary of a collection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CollectionDescriptor {
    pub kind: CollectionKind,
    pub models: Vec<ModelDescriptor>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub index: usize,
    pub resolution: u32,
    pub dim: usize,
    pub sup_norm_bound: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;
    use approx::assert_abs_diff_eq;

    #[test]
    fn parses_kind_strings() {
        assert_eq!("histogram".parse::<CollectionKind>().unwrap(), CollectionKind::Histogram);
        assert_eq!("fourier".parse::<CollectionKind>().unwrap(), CollectionKind::Fourier);
        assert_eq!("wavelet-haar".parse::<CollectionKind>().unwrap(), CollectionKind::HaarWavelet);
        assert_eq!("haar".parse::<CollectionKind>().unwrap(), CollectionKind::HaarWavelet);
        assert!(matches!("parzen".parse::<CollectionKind>(), Err(Error::UnknownKind(_))));
    }

    #[test]
    fn enumerates_haar_collection_for_n_16() {
        let coll = enumerate_models(CollectionKind::HaarWavelet, 16).unwrap();
        assert_eq!(coll.models.len(), 4);
        let dims: Vec<usize> = coll.models.iter().map(Model::dim).collect();
        assert_eq!(dims, vec![4, 8, 16, 32]);
    }

    #[test]
    fn enumerates_histograms_for_n_4() {
        let coll = enumerate_models(CollectionKind::Histogram, 4).unwrap();
        let bins: Vec<u32> = coll.models.iter().map(Model::resolution).collect();
        assert_eq!(bins, vec![1, 2]);
    }

    #[test]
    fn enumerates_fourier_for_n_8() {
        let coll = enumerate_models(CollectionKind::Fourier, 8).unwrap();
        let dims: Vec<usize> = coll.models.iter().map(Model::dim).collect();
        assert_eq!(dims, vec![3, 5, 7, 9]);
    }

    #[test]
    fn enumeration_needs_four_points() {
        assert!(matches!(
            enumerate_models(CollectionKind::Histogram, 3),
            Err(Error::SampleTooSmall { .. })
        ));
    }

    #[test]
    fn caps_apply() {
        let limits = CollectionLimits { model_cap: 5, level_cap: Some(3) };
        let hist = enumerate_models_with(CollectionKind::Histogram, 1000, &limits).unwrap();
        assert_eq!(hist.models.len(), 5);
        let haar = enumerate_models_with(CollectionKind::HaarWavelet, 1024, &limits).unwrap();
        assert_eq!(haar.models.len(), 3);
        assert_eq!(haar.models.last().unwrap().dim(), 16);
    }

    #[test]
    fn evaluates_histogram_bin() {
        let m = Model::histogram(2, 2);
        assert_abs_diff_eq!(m.eval(BasisLabel::Bin { k: 0 }, 0.25).unwrap(), SQRT_2);
        assert_abs_diff_eq!(m.eval(BasisLabel::Bin { k: 0 }, 0.75).unwrap(), 0.0);
        assert_abs_diff_eq!(m.eval(BasisLabel::Bin { k: 1 }, 0.75).unwrap(), SQRT_2);
    }

    #[test]
    fn evaluates_fourier() {
        let m = Model::fourier(3, 3);
        assert_abs_diff_eq!(m.eval(BasisLabel::FourierCos { k: 1 }, 0.0).unwrap(), SQRT_2);
        assert_abs_diff_eq!(m.eval(BasisLabel::FourierConst, 0.9).unwrap(), 1.0);
        assert_abs_diff_eq!(
            m.eval(BasisLabel::FourierSin { k: 2 }, 0.125).unwrap(),
            SQRT_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn evaluates_haar() {
        let m = Model::haar(2, 2);
        // Level 1 splits [0, 1) at 1/2; the k = 0 wavelet lives on [0, 1/2),
        // so it vanishes at 0.6 while the k = 1 wavelet is on its positive
        // half there (2x - 1 = 0.2 < 1/2).
        assert_abs_diff_eq!(m.eval(BasisLabel::HaarWavelet { j: 1, k: 0 }, 0.6).unwrap(), 0.0);
        assert_abs_diff_eq!(m.eval(BasisLabel::HaarWavelet { j: 1, k: 1 }, 0.6).unwrap(), SQRT_2);
        assert_abs_diff_eq!(m.eval(BasisLabel::HaarWavelet { j: 1, k: 0 }, 0.3).unwrap(), -SQRT_2);
        assert_abs_diff_eq!(m.eval(BasisLabel::HaarScaling { k: 1 }, 0.6).unwrap(), SQRT_2);
        assert_abs_diff_eq!(m.eval(BasisLabel::HaarWavelet { j: 2, k: 2 }, 0.6).unwrap(), 2.0);
    }

    #[test]
    fn rejects_labels_outside_the_model() {
        let m = Model::histogram(2, 2);
        assert!(matches!(
            m.eval(BasisLabel::Bin { k: 2 }, 0.5),
            Err(Error::LabelNotInModel { .. })
        ));
        assert!(matches!(
            m.eval(BasisLabel::FourierCos { k: 1 }, 0.5),
            Err(Error::LabelNotInModel { .. })
        ));
        let h = Model::haar(1, 1);
        assert!(matches!(
            h.eval(BasisLabel::HaarWavelet { j: 2, k: 0 }, 0.5),
            Err(Error::LabelNotInModel { .. })
        ));
    }

    #[test]
    fn sup_norm_bounds_are_exact() {
        assert_abs_diff_eq!(Model::histogram(4, 4).sup_norm_bound(), 4.0);
        assert_abs_diff_eq!(Model::fourier(3, 3).sup_norm_bound(), 7.0);
        assert_abs_diff_eq!(Model::haar(3, 3).sup_norm_bound(), 16.0);
    }

    #[test]
    fn sup_norm_bound_matches_grid_maximum() {
        for model in [Model::histogram(5, 5), Model::fourier(4, 4), Model::haar(3, 3)] {
            let mut max = 0.0_f64;
            for i in 0..4096 {
                let x = (i as f64 + 0.5) / 4096.0;
                let mut sum = 0.0;
                model.for_each_nonzero(x, |_, v| sum += v * v);
                max = max.max(sum);
            }
            assert_abs_diff_eq!(max, model.sup_norm_bound(), epsilon = 1e-9);
        }
    }

    #[test]
    fn for_each_nonzero_agrees_with_eval() {
        for model in [Model::histogram(7, 7), Model::fourier(3, 3), Model::haar(3, 3)] {
            for i in 0..97 {
                let x = i as f64 / 97.0;
                let mut dense = vec![0.0; model.dim()];
                model.for_each_nonzero(x, |slot, v| dense[slot] += v);
                for (slot, &label) in model.labels().iter().enumerate() {
                    assert_abs_diff_eq!(dense[slot], model.eval(label, x).unwrap(), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn label_sets_are_nested() {
        for kind in [CollectionKind::Histogram, CollectionKind::Fourier, CollectionKind::HaarWavelet] {
            let coll = enumerate_models(kind, 64).unwrap();
            for pair in coll.models.windows(2) {
                assert!(pair[0].dim() < pair[1].dim());
                assert_eq!(&pair[1].labels()[..pair[0].dim()], pair[0].labels());
            }
        }
    }

    #[test]
    fn bases_are_orthonormal_under_quadrature() {
        let models = [Model::histogram(3, 3), Model::fourier(3, 3), Model::haar(2, 2)];
        for model in models {
            for (i, &la) in model.labels().iter().enumerate() {
                for (jj, &lb) in model.labels().iter().enumerate() {
                    let fa = model.function(la).unwrap();
                    let fb = model.function(lb).unwrap();
                    // Uniform cuts well below the shortest product period
                    // (frequencies reach 2m = 6), so oscillations cannot
                    // alias through the dyadic Simpson samples; plus the
                    // functions' own discontinuities.
                    let mut cuts: Vec<f64> = (0..=32).map(|i| i as f64 / 32.0).collect();
                    cuts.extend(fa.breakpoints().unwrap_or_default());
                    cuts.extend(fb.breakpoints().unwrap_or_default());
                    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    cuts.dedup();
                    let inner =
                        quad::integrate_piecewise(&|x| fa.eval(x) * fb.eval(x), &cuts, 1e-12)
                            .unwrap();
                    let expect = if i == jj { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(inner, expect, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn h4_integral_equals_sup_norm_bound() {
        // For these systems Σ_λ ψ_λ(x)² integrates (under the uniform
        // reference measure) to exactly b_m².
        for model in [Model::histogram(6, 6), Model::fourier(5, 5), Model::haar(3, 3)] {
            let f = |x: f64| {
                let mut sum = 0.0;
                model.for_each_nonzero(x, |_, v| sum += v * v);
                sum
            };
            let cuts: Vec<f64> = (0..=96).map(|i| i as f64 / 96.0).collect();
            let integral = quad::integrate_piecewise(&f, &cuts, 1e-12).unwrap();
            assert_abs_diff_eq!(integral, model.sup_norm_bound(), epsilon = 1e-9);
        }
    }

    #[test]
    fn descriptor_serializes_to_json() {
        let coll = enumerate_models(CollectionKind::HaarWavelet, 16).unwrap();
        let json = serde_json::to_value(coll.descriptor()).unwrap();
        assert_eq!(json["kind"], "wavelet-haar");
        assert_eq!(json["models"].as_array().unwrap().len(), 4);
        assert_eq!(json["models"][3]["dim"], 32);
        assert_eq!(json["models"][3]["sup_norm_bound"], 32.0);
    }
}
