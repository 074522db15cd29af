//! Globally adaptive 21-point Gauss–Kronrod quadrature on finite intervals,
//! with a rational map for semi-infinite ranges.

use thiserror::Error;

use crate::real::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (value {value:e}, error estimate {error:e})"
    )]
    NonConvergence {
        value: f64,
        error: f64,
        subdivisions: usize,
    },
    #[error("integrand returned a non-finite value at {at:e}")]
    NonFinite { at: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
}

impl<T: Real> QuadratureOptions<T> {
    pub fn new(abs_tol: T, rel_tol: T) -> Self {
        Self {
            abs_tol,
            rel_tol,
            max_subdivisions: 400,
        }
    }

    pub fn relative(rel_tol: T) -> Self {
        Self::new(T::zero(), rel_tol)
    }

    /// The tolerance this integrator is asked to meet; loosening the relative
    /// tolerance by `factor` gives a cheaper self-consistency comparison.
    pub fn scaled(self, factor: T) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
    pub subdivisions: usize,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_647_881_838,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn check<T: Real>(y: T, x: T) -> Result<T, QuadratureError> {
    if y.is_finite() {
        Ok(y)
    } else {
        Err(QuadratureError::NonFinite { at: x.to_f64_lossy() })
    }
}

/// One 21-point Kronrod panel with the QUADPACK error heuristic.
fn kronrod21<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Result<Segment<T>, QuadratureError> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);

    let fc = check(f(center), center)?;
    let mut kronrod = fc * T::lit(WGK[10]);
    let mut abs_sum = kronrod.abs();
    let mut gauss = T::zero();
    let mut f1 = [T::zero(); 10];
    let mut f2 = [T::zero(); 10];

    for j in 0..10 {
        let dx = half_len * T::lit(XGK[j]);
        let x1 = center - dx;
        let x2 = center + dx;
        let y1 = check(f(x1), x1)?;
        let y2 = check(f(x2), x2)?;
        f1[j] = y1;
        f2[j] = y2;
        let w = T::lit(WGK[j]);
        kronrod = kronrod + w * (y1 + y2);
        abs_sum = abs_sum + w * (y1.abs() + y2.abs());
        if j % 2 == 1 {
            gauss = gauss + T::lit(WG[j / 2]) * (y1 + y2);
        }
    }

    let mean = kronrod * half;
    let mut asc = T::lit(WGK[10]) * (fc - mean).abs();
    for j in 0..10 {
        asc = asc + T::lit(WGK[j]) * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
    }

    let value = kronrod * half_len;
    let res_abs = abs_sum * half_len.abs();
    let res_asc = asc * half_len.abs();
    let mut error = ((kronrod - gauss) * half_len).abs();
    if res_asc != T::zero() && error != T::zero() {
        let ratio = (T::lit(200.0) * error / res_asc).powf(T::lit(1.5));
        error = res_asc * ratio.min(T::one());
    }
    let floor = T::lit(50.0) * T::epsilon();
    if res_abs > T::min_positive_value() / floor {
        error = error.max(floor * res_abs);
    }
    Ok(Segment { a, b, value, error })
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<T, F>(mut f: F, a: T, b: T, opts: QuadratureOptions<T>) -> Result<Integral<T>, QuadratureError>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if a == b {
        return Ok(Integral {
            value: T::zero(),
            error: T::zero(),
            evaluations: 0,
            subdivisions: 0,
        });
    }
    let first = kronrod21(&mut f, a, b)?;
    let mut segments = vec![first];
    let mut evaluations = 21;

    loop {
        let (value, error) = segments
            .iter()
            .fold((T::zero(), T::zero()), |(v, e), s| (v + s.value, e + s.error));
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target {
            return Ok(Integral {
                value,
                error,
                evaluations,
                subdivisions: segments.len(),
            });
        }
        if segments.len() >= opts.max_subdivisions {
            return Err(QuadratureError::NonConvergence {
                value: value.to_f64_lossy(),
                error: error.to_f64_lossy(),
                subdivisions: segments.len(),
            });
        }

        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .expect("at least one segment");
        let seg = segments.swap_remove(worst);
        let mid = T::lit(0.5) * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // Interval cannot be split further in this precision.
            return Err(QuadratureError::NonConvergence {
                value: value.to_f64_lossy(),
                error: error.to_f64_lossy(),
                subdivisions: segments.len() + 1,
            });
        }
        segments.push(kronrod21(&mut f, seg.a, mid)?);
        segments.push(kronrod21(&mut f, mid, seg.b)?);
        evaluations += 42;
    }
}

/// Integrates `f` over `[a, ∞)` through `x = a + scale · t / (1 - t)`.
///
/// `scale` should be comparable to the length over which `f` decays.
pub fn integrate_semi_infinite<T, F>(
    mut f: F,
    a: T,
    scale: T,
    opts: QuadratureOptions<T>,
) -> Result<Integral<T>, QuadratureError>
where
    T: Real,
    F: FnMut(T) -> T,
{
    assert!(scale > T::zero(), "mapping scale must be positive");
    integrate(
        |t: T| {
            let one_minus = T::one() - t;
            if one_minus <= T::zero() {
                return T::zero();
            }
            let x = a + scale * t / one_minus;
            if !x.is_finite() {
                return T::zero();
            }
            f(x) * scale / (one_minus * one_minus)
        },
        T::zero(),
        T::one(),
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, QuadratureOptions::new(1e-13, 1e-14)).unwrap();
        assert!((r.value - 0.0).abs() < 1e-13);
        let r = integrate(|x: f64| x.powi(6), -1.0, 1.0, QuadratureOptions::relative(1e-13)).unwrap();
        assert!((r.value - 2.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn exponential_tail() {
        let r = integrate_semi_infinite(|x: f64| (-x).exp(), 0.0, 1.0, QuadratureOptions::relative(1e-13)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-13);
        let r = integrate_semi_infinite(
            |x: f64| x.powi(3) * (-2.0 * x).exp(),
            0.0,
            1.0,
            QuadratureOptions::relative(1e-13),
        )
        .unwrap();
        assert!((r.value - 6.0 / 16.0).abs() < 1e-13);
    }

    #[test]
    fn essential_singularity_at_origin() {
        // ∫_0^∞ e^{-x - 1/x} dx = 2 K_1(2)
        let k1_2 = 0.139_865_881_816_522_43;
        let r = integrate_semi_infinite(|x: f64| (-x - 1.0 / x).exp(), 0.0, 1.0, QuadratureOptions::relative(1e-12))
            .unwrap();
        assert!((r.value - 2.0 * k1_2).abs() < 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let opts = QuadratureOptions {
            abs_tol: 0.0,
            rel_tol: 1e-15,
            max_subdivisions: 3,
        };
        let err = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, opts).unwrap_err();
        assert!(matches!(err, QuadratureError::NonConvergence { .. }));
    }

    #[test]
    fn reports_non_finite() {
        let err = integrate(|_x: f64| f64::NAN, 0.0, 1.0, QuadratureOptions::relative(1e-6)).unwrap_err();
        assert!(matches!(err, QuadratureError::NonFinite { .. }));
    }
}
