//! Globally adaptive Gauss–Kronrod (7, 15) quadrature over a finite interval.
//!
//! The interval is first cut at caller-supplied breakpoints (kinks, peaks),
//! then the segment with the largest error estimate is bisected until the
//! summed estimate meets the tolerance. Error estimates follow the QUADPACK
//! `qk15` heuristics.

use crate::error::{Error, Result};

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

// Gauss weights for nodes XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_segments: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-300,
            max_segments: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error: f64,
    pub segments: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_centre = f(centre);
    let mut res_k = f_centre * WGK[7];
    let mut res_g = f_centre * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    if !res_k.is_finite() {
        return Err(Error::QuadratureDivergence(format!(
            "integrand not finite on [{a}, {b}]"
        )));
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (f_centre - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let width = half.abs();
    let value = res_k * half;
    res_abs *= width;
    res_asc *= width;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, value, error })
}

/// Integrates `f` over `[points[0], points[last]]`, starting from the
/// segments delimited by `points` (which must be strictly increasing).
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    opts: &QuadratureOptions,
) -> Result<QuadratureResult> {
    if points.len() < 2 || points.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain(
            "points",
            "need at least two strictly increasing breakpoints",
        ));
    }
    let mut segments = Vec::with_capacity(opts.max_segments);
    for w in points.windows(2) {
        segments.push(gauss_kronrod_15(&f, w[0], w[1])?);
    }

    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            return Ok(QuadratureResult {
                value,
                abs_error: error,
                segments: segments.len(),
            });
        }
        if segments.len() >= opts.max_segments {
            return Err(Error::QuadratureDivergence(format!(
                "segment limit {} reached with error estimate {error:e} on value {value:e}",
                opts.max_segments
            )));
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one segment");
        let Segment { a, b, .. } = segments[worst];
        let mid = 0.5 * (a + b);
        if !(mid > a && mid < b) || (b - a) <= 4.0 * f64::EPSILON * mid.abs().max(1.0) {
            // Remaining error sits on a segment that cannot be bisected further.
            if error <= 1e3 * opts.rel_tol * value.abs() {
                return Ok(QuadratureResult {
                    value,
                    abs_error: error,
                    segments: segments.len(),
                });
            }
            return Err(Error::QuadratureDivergence(format!(
                "cannot refine segment [{a}, {b}] any further"
            )));
        }
        segments[worst] = gauss_kronrod_15(&f, a, mid)?;
        segments.push(gauss_kronrod_15(&f, mid, b)?);
    }
}
