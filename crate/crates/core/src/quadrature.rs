//! Numerical integration over a finite interval.
//!
//! [`integrate`] is a globally adaptive 7/15-point Gauss–Kronrod scheme for
//! vector-valued integrands; the error of a subinterval is the largest
//! component-wise Gauss/Kronrod difference. [`GaussLegendre`] provides fixed
//! rules for hot loops where the integrand is known to be smooth.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_3,
    0.949_107_912_342_758_524_526_189_684_047_9,
    0.864_864_423_359_769_072_789_712_788_640_9,
    0.741_531_185_599_394_439_863_864_773_280_8,
    0.586_087_235_467_691_130_294_144_845_693_0,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_2,
    0.0,
];

const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_5,
    0.140_653_259_715_525_918_745_189_590_510_2,
    0.169_004_726_639_267_902_826_583_426_598_6,
    0.190_350_578_064_785_409_913_256_402_421_0,
    0.204_432_940_075_298_892_414_161_999_234_6,
    0.209_482_141_084_727_828_012_999_174_891_7,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_1,
    0.279_705_391_489_276_667_901_467_771_423_8,
    0.381_830_050_505_118_944_950_369_775_489_0,
    0.417_959_183_673_469_387_755_102_040_816_3,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Integral {
    pub values: Vec<f64>,
    /// Sum of the subinterval error estimates (max-norm over components).
    pub error: f64,
    pub evaluations: usize,
}

struct Segment {
    lo: f64,
    hi: f64,
    values: Vec<f64>,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod_segment<F>(f: &F, lo: f64, hi: f64, dim: usize, scratch: &mut [f64]) -> Segment
where
    F: Fn(f64, &mut [f64]),
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut kronrod = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];

    f(center, scratch);
    for d in 0..dim {
        kronrod[d] = KRONROD_WEIGHTS[7] * scratch[d];
        gauss[d] = GAUSS_WEIGHTS[3] * scratch[d];
    }
    for (i, &node) in KRONROD_NODES[..7].iter().enumerate() {
        for x in [center - half * node, center + half * node] {
            f(x, scratch);
            for d in 0..dim {
                kronrod[d] += KRONROD_WEIGHTS[i] * scratch[d];
                if i % 2 == 1 {
                    gauss[d] += GAUSS_WEIGHTS[i / 2] * scratch[d];
                }
            }
        }
    }
    let mut error = 0.0f64;
    for d in 0..dim {
        kronrod[d] *= half;
        gauss[d] *= half;
        error = error.max((kronrod[d] - gauss[d]).abs());
    }
    Segment { lo, hi, values: kronrod, error }
}

/// Integrates a vector-valued function over `[lo, hi]` to absolute tolerance `tol`.
///
/// `f(x, out)` writes the `dim` integrand components at `x` into `out`.
pub fn integrate<F>(f: F, lo: f64, hi: f64, dim: usize, tol: f64, max_segments: usize) -> Result<Integral>
where
    F: Fn(f64, &mut [f64]),
{
    let mut scratch = vec![0.0; dim];
    let first = kronrod_segment(&f, lo, hi, dim, &mut scratch);
    let mut evaluations = 15;
    let mut total_error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);

    while total_error > tol {
        if heap.len() >= max_segments {
            return Err(Error::Integration { estimate: total_error, tolerance: tol });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        let left = kronrod_segment(&f, worst.lo, mid, dim, &mut scratch);
        let right = kronrod_segment(&f, mid, worst.hi, dim, &mut scratch);
        evaluations += 30;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Guard against drift from repeated incremental updates.
        if total_error <= tol {
            total_error = heap.iter().map(|s| s.error).sum();
        }
    }

    // Left-to-right summation keeps results independent of heap order.
    let mut segments = heap.into_vec();
    segments.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut values = vec![0.0; dim];
    for s in &segments {
        for d in 0..dim {
            values[d] += s.values[d];
        }
    }
    Ok(Integral { values, error: total_error, evaluations })
}

/// Integrates a scalar function; see [`integrate`].
pub fn integrate_scalar<F>(f: F, lo: f64, hi: f64, tol: f64, max_segments: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let r = integrate(|x, out: &mut [f64]| out[0] = f(x), lo, hi, 1, tol, max_segments)?;
    Ok((r.values[0], r.error))
}

/// Fixed `n`-point Gauss–Legendre rule mapped to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes from Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut deriv = 0.0;
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                deriv = dp;
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    let (_, dp) = legendre(n, x);
                    deriv = dp;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
            // map [-1, 1] -> [0, 1]
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes on `[0, 1]`, ascending.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
