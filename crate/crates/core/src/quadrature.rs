//! Globally adaptive Gauss–Kronrod (7/15) quadrature and a Cauchy principal
//! value built on top of it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{NesError, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Tolerance { rel, abs: 0.0 }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

pub const DEFAULT_MAX_INTERVALS: usize = 2000;

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (i, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// `∫_a^b f` to within `tol`, bisecting the interval with the largest error
/// estimate until the summed error meets the target.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
    max_intervals: usize,
) -> Result<QuadEstimate> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(NesError::Domain(format!("integration bounds [{a}, {b}] not finite")));
    }
    if a == b {
        return Ok(QuadEstimate { value: 0.0, error: 0.0, intervals: 0 });
    }
    let first = gauss_kronrod(&f, a, b);
    let (mut value, mut error) = (first.value, first.error);
    let mut heap = BinaryHeap::from([first]);

    while !(error <= tol.target(value)) {
        if heap.len() >= max_intervals || !value.is_finite() {
            return Err(NesError::Quadrature { estimate: value, error, intervals: heap.len() });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let left = gauss_kronrod(&f, worst.a, mid);
        let right = gauss_kronrod(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if mid <= worst.a || mid >= worst.b {
            // interval can no longer be split in floating point
            return Err(NesError::Quadrature { estimate: value, error, intervals: heap.len() });
        }
    }
    // re-sum to shed drift from the running updates
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok(QuadEstimate { value, error, intervals: heap.len() })
}

/// Principal value `PV ∫_a^b h(k)/(k − pole) dk` for `a < pole < b`.
///
/// A symmetric window of half-width `δ = min(pole − a, b − pole)` is folded
/// onto `∫_0^δ [h(pole + t) − h(pole − t)]/t dt`, which is regular; the rest
/// of `[a, b]` is integrated directly.
pub fn principal_value<H: Fn(f64) -> f64>(
    h: H,
    pole: f64,
    a: f64,
    b: f64,
    tol: Tolerance,
    max_intervals: usize,
) -> Result<QuadEstimate> {
    if !(a < pole && pole < b) {
        return Err(NesError::Domain(format!(
            "pole {pole} must lie strictly inside ({a}, {b})"
        )));
    }
    let delta = (pole - a).min(b - pole);
    let folded = integrate(
        |t| (h(pole + t) - h(pole - t)) / t,
        0.0,
        delta,
        tol,
        max_intervals,
    )?;
    let direct = |k: f64| h(k) / (k - pole);
    let lower = integrate(direct, a, pole - delta, tol, max_intervals)?;
    let upper = integrate(direct, pole + delta, b, tol, max_intervals)?;
    Ok(QuadEstimate {
        value: folded.value + lower.value + upper.value,
        error: folded.error + lower.error + upper.error,
        intervals: folded.intervals + lower.intervals + upper.intervals,
    })
}
