//! Globally adaptive 7/15-point Gauss-Kronrod quadrature.
//!
//! The interval with the largest error estimate is bisected until the total
//! estimate meets `max(abs_tol, rel_tol * |I|)`. Error estimates follow the
//! QUADPACK rescaling, which is pessimistic for smooth integrands.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Values that can be integrated: a vector space over `T` with a norm.
pub trait QuadValue<T>:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> T;
}

impl<T: Real> QuadValue<T> for T {
    fn zero() -> Self {
        T::zero()
    }

    fn magnitude(&self) -> T {
        self.abs()
    }
}

impl<T: Real> QuadValue<T> for Complex<T> {
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }

    fn magnitude(&self) -> T {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveSettings<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Maximum number of bisections applied to any single interval.
    pub max_depth: u32,
    /// Hard cap on the number of live subintervals.
    pub max_intervals: usize,
}

impl<T: Real> Default for AdaptiveSettings<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-10),
            abs_tol: T::zero(),
            max_depth: 50,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<V, T> {
    pub value: V,
    pub error: T,
    pub evaluations: usize,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
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

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment<V, T> {
    a: T,
    b: T,
    value: V,
    error: T,
    depth: u32,
}

fn gk15<T, V, F>(f: &mut F, a: T, b: T) -> (V, T)
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> V,
{
    let center = (a + b) * T::lit(0.5);
    let half = (b - a) * T::lit(0.5);
    let abs_half = half.abs();

    let mut fv1 = [V::zero(); 7];
    let mut fv2 = [V::zero(); 7];
    let f_center = f(center);
    let mut kronrod = f_center * T::lit(WGK[7]);
    let mut gauss = f_center * T::lit(WG[3]);
    let mut res_abs = f_center.magnitude() * T::lit(WGK[7]);

    for j in 0..7 {
        let x = half * T::lit(XGK[j]);
        let (f1, f2) = (f(center - x), f(center + x));
        fv1[j] = f1;
        fv2[j] = f2;
        let sum = f1 + f2;
        kronrod = kronrod + sum * T::lit(WGK[j]);
        // odd Kronrod nodes coincide with the Gauss nodes
        if j % 2 == 1 {
            gauss = gauss + sum * T::lit(WG[j / 2]);
        }
        res_abs += T::lit(WGK[j]) * (f1.magnitude() + f2.magnitude());
    }

    let mean = kronrod * T::lit(0.5);
    let mut res_asc = T::lit(WGK[7]) * (f_center - mean).magnitude();
    for j in 0..7 {
        res_asc += T::lit(WGK[j]) * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }

    let result = kronrod * half;
    let res_abs = res_abs * abs_half;
    let res_asc = res_asc * abs_half;
    let mut err = ((kronrod - gauss) * half).magnitude();

    if res_asc != T::zero() && err != T::zero() {
        let scale = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = if scale < T::one() {
            res_asc * scale
        } else {
            res_asc
        };
    }
    let fifty_eps = T::lit(50.0) * T::epsilon();
    if res_abs > T::min_positive_value() / fifty_eps {
        err = err.max(fifty_eps * res_abs);
    }
    (result, err)
}

/// Integrates `f` over `[a, b]`.
///
/// Fails with [`Error::NonConvergence`] when the tolerance cannot be met
/// within the depth and interval caps; the error carries the best estimate.
pub fn integrate<T, V, F>(
    mut f: F,
    a: T,
    b: T,
    settings: &AdaptiveSettings<T>,
) -> Result<Estimate<V, T>>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> V,
{
    if a == b {
        return Ok(Estimate {
            value: V::zero(),
            error: T::zero(),
            evaluations: 0,
        });
    }
    let (value, error) = gk15(&mut f, a, b);
    let mut segments = vec![Segment {
        a,
        b,
        value,
        error,
        depth: 0,
    }];
    let mut evaluations = 15;

    loop {
        let total: V = segments.iter().fold(V::zero(), |acc, s| acc + s.value);
        let total_err = segments.iter().fold(T::zero(), |acc, s| acc + s.error);
        let target = settings.abs_tol.max(settings.rel_tol * total.magnitude());
        if total_err <= target {
            return Ok(Estimate {
                value: total,
                error: total_err,
                evaluations,
            });
        }

        let worst = segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.depth < settings.max_depth)
            .max_by(|(_, x), (_, y)| {
                x.error
                    .partial_cmp(&y.error)
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .map(|(i, _)| i);

        let Some(i) = worst.filter(|_| segments.len() < settings.max_intervals) else {
            return Err(Error::NonConvergence {
                what: "adaptive Gauss-Kronrod",
                estimate: total.magnitude().to_f64().unwrap_or(f64::NAN),
                error: total_err.to_f64().unwrap_or(f64::NAN),
            });
        };

        let seg = segments.swap_remove(i);
        let mid = (seg.a + seg.b) * T::lit(0.5);
        let (lv, le) = gk15(&mut f, seg.a, mid);
        let (rv, re) = gk15(&mut f, mid, seg.b);
        evaluations += 30;
        segments.push(Segment {
            a: seg.a,
            b: mid,
            value: lv,
            error: le,
            depth: seg.depth + 1,
        });
        segments.push(Segment {
            a: mid,
            b: seg.b,
            value: rv,
            error: re,
            depth: seg.depth + 1,
        });
    }
}
