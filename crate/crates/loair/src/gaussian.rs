//! Standard normal density, CDF and quantile, plus the quantile's analytic
//! derivative.
//!
//! The quantile (probit) is the piece the rest of the crate leans on: it maps
//! a predicted percentile to the z-value that shifts a regression coefficient
//! inside its confidence interval, and training backpropagates through it.
//! That rules out table lookups; everything here is smooth and accurate to
//! well below the crate's 1e-8 targets.
//!
//! Numerics:
//! * `erf` via its Maclaurin series for |x| < 1.5 (converges to full f64
//!   precision there with no cancellation),
//! * `erfc` via the Laplace continued fraction for x >= 1.5, evaluated by
//!   backward recurrence,
//! * quantile via Acklam's two-branch rational approximation refined by one
//!   Halley step against the CDF above, giving ~1e-15 absolute error over
//!   p in [1e-10, 1 - 1e-10].

use crate::error::{Error, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
const TWO_OVER_SQRT_PI: f64 = 1.128_379_167_095_512_6;
const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// A probability strictly inside (0, 1), the domain of the normal quantile.
///
/// Construction is the single validation point: once a `Probability` exists,
/// `probit` and `probit_derivative` cannot be handed an out-of-domain value.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    /// Wraps `value`, rejecting anything not strictly inside (0, 1).
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::Domain(format!(
                "probability must lie strictly inside (0, 1), got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Standard normal density (1/sqrt(2*pi)) * exp(-x^2/2).
pub fn std_normal_pdf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("pdf requires a finite input, got {x}")));
    }
    Ok(INV_SQRT_2PI * (-0.5 * x * x).exp())
}

/// Standard normal CDF.
///
/// The exact value lies in (0, 1) for every finite x; for |x| beyond ~38 the
/// true tail mass is below the smallest positive f64, so the result saturates
/// at the nearest representable interior value.
pub fn std_normal_cdf(x: f64) -> Result<Probability> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("cdf requires a finite input, got {x}")));
    }
    let raw = 0.5 * erfc(-x * FRAC_1_SQRT_2);
    let clamped = raw.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
    Probability::new(clamped)
}

/// Standard normal quantile (inverse CDF).
///
/// Antisymmetry probit(1-p) = -probit(p) is exact: p >= 1/2 reflects onto
/// the lower half, where `1.0 - p` incurs no rounding.
pub fn probit(p: Probability) -> f64 {
    let p = p.value();
    if p > 0.5 {
        -probit_lower(1.0 - p)
    } else {
        probit_lower(p)
    }
}

/// Derivative of the quantile: d/dp probit(p) = 1 / pdf(probit(p)).
///
/// Always positive, minimal at p = 1/2 where it equals sqrt(2*pi), and
/// growing without bound toward either endpoint.
pub fn probit_derivative(p: Probability) -> f64 {
    let z = probit(p);
    1.0 / (INV_SQRT_2PI * (-0.5 * z * z).exp())
}

/// Quantile for p in (0, 0.5]: Acklam's rational approximation plus one
/// Halley refinement step against `std_normal_cdf`.
fn probit_lower(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p <= 0.5);

    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    let mut x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };

    // One Halley step: f(x) = Phi(x) - p, f'(x) = phi(x), f''(x) = -x*phi(x).
    let pdf = INV_SQRT_2PI * (-0.5 * x * x).exp();
    if pdf > 0.0 {
        let cdf = 0.5 * erfc(-x * FRAC_1_SQRT_2);
        let err = cdf - p;
        let step = err / pdf;
        x -= step / (1.0 + 0.5 * x * step).max(0.5);
    }
    x
}

/// Complementary error function, full f64 accuracy on the whole real line.
pub(crate) fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 1.5 {
        return 1.0 - erf_series(x);
    }
    if x > 27.0 {
        // erfc(27) < 1e-318; past here exp(-x^2) underflows.
        return 0.0;
    }
    erfc_continued_fraction(x)
}

/// Error function.
pub(crate) fn erf(x: f64) -> f64 {
    let a = x.abs();
    if a < 1.5 {
        erf_series(x)
    } else {
        x.signum() * (1.0 - erfc(a))
    }
}

/// Maclaurin series, accurate to ~5e-16 relative for |x| <= 1.5.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..80 {
        term *= -x2 / n as f64;
        let contribution = term / (2 * n + 1) as f64;
        sum += contribution;
        if contribution.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    TWO_OVER_SQRT_PI * sum
}

/// Laplace continued fraction
/// erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
/// evaluated by backward recurrence. 200 levels reach < 6e-14 relative error
/// at x = 1.5 (faster convergence further out), which is the practical f64
/// limit once the exp(-x^2) rounding is included.
fn erfc_continued_fraction(x: f64) -> f64 {
    let mut f = 0.0;
    for n in (1..=200).rev() {
        f = (n as f64 * 0.5) / (x + f);
    }
    (-x * x).exp() * INV_SQRT_PI / (x + f)
}
