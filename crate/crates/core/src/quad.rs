//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use alloc::vec::Vec;

use crate::math;

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

/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_SEGMENTS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum over segments of `|K15 − G7|`, a conservative bound.
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    Segment {
        a,
        b,
        value: k * h,
        error: math::abs((k - g) * h),
    }
}

/// Integrates `f` over `[a, b]` until the error estimate drops below
/// `max(abs_tol, rel_tol·|value|)` or the segment budget is exhausted.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Quadrature {
    if a == b {
        return Quadrature {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
            converged: true,
        };
    }
    let mut segments: Vec<Segment> = alloc::vec![kronrod(&mut f, a, b)];
    let mut evaluations = 15;
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let target = abs_tol.max(rel_tol * math::abs(value));
        if error <= target || segments.len() >= MAX_SEGMENTS {
            return Quadrature {
                value,
                error,
                evaluations,
                converged: error <= target,
            };
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let s = segments.swap_remove(worst);
        let m = 0.5 * (s.a + s.b);
        if m <= s.a || m >= s.b {
            // interval exhausted at machine resolution
            return Quadrature {
                value,
                error,
                evaluations,
                converged: false,
            };
        }
        segments.push(kronrod(&mut f, s.a, m));
        segments.push(kronrod(&mut f, m, s.b));
        evaluations += 30;
    }
}
