//! Hermite and Laguerre polynomials, log-domain combinatorics and the
//! closed-form Gaussian moment integral.
//!
//! Hermite polynomials use the physicists' convention (weight `exp(-x^2)`).

use std::ops::{Div, Mul, Neg};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Highest polynomial order accepted by [`hermite`], [`laguerre`] and
/// [`gaussian_moment`].
pub const MAX_POLY_ORDER: usize = 64;

/// Highest `n` accepted by [`binomial`].
pub const MAX_BINOMIAL_N: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn of<T: Real>(x: T) -> Self {
        if x > T::zero() {
            Sign::Positive
        } else if x < T::zero() {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        match self.as_i8() * rhs.as_i8() {
            1 => Sign::Positive,
            -1 => Sign::Negative,
            _ => Sign::Zero,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        self * Sign::Negative
    }
}

/// A real number stored as `sign * exp(log_magnitude)`.
///
/// Used for products of factorials and powers whose intermediate magnitudes
/// would overflow long before the final value does. Internally the log is
/// split as `exponent * ln 2 + log_fraction` with `|log_fraction| <= ln 2 / 2`,
/// so the binary exponent is exact and only the small fractional log carries
/// rounding. When the sign is [`Sign::Zero`] the magnitude is meaningless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSigned<T> {
    sign: Sign,
    exponent: i32,
    log_fraction: T,
}

/// Low-order bits of ln 2 beyond f64 precision.
const LN_2_LO: f64 = 2.319_046_813_846_299_6e-17;

fn ln2_split<T: Real>() -> (T, T) {
    let hi = T::LN_2();
    let lo = T::lit(LN_2_LO) + T::lit(std::f64::consts::LN_2 - hi.to_f64().unwrap_or(0.0));
    (hi, lo)
}

impl<T: Real> LogSigned<T> {
    pub fn zero() -> Self {
        Self {
            sign: Sign::Zero,
            exponent: 0,
            log_fraction: T::neg_infinity(),
        }
    }

    pub fn one() -> Self {
        Self {
            sign: Sign::Positive,
            exponent: 0,
            log_fraction: T::zero(),
        }
    }

    fn normalized(sign: Sign, exponent: i32, log_fraction: T) -> Self {
        if sign == Sign::Zero {
            return Self::zero();
        }
        if !log_fraction.is_finite() {
            return Self {
                sign,
                exponent: 0,
                log_fraction,
            };
        }
        let (hi, lo) = ln2_split::<T>();
        let shift = (log_fraction / hi).round();
        let s = shift.to_i32().expect("log magnitude out of range");
        let frac = if s == 0 {
            log_fraction
        } else {
            (log_fraction - shift * hi) - shift * lo
        };
        Self {
            sign,
            exponent: exponent + s,
            log_fraction: frac,
        }
    }

    pub fn from_parts(log_magnitude: T, sign: Sign) -> Self {
        Self::normalized(sign, 0, log_magnitude)
    }

    pub fn from_value(x: T) -> Self {
        let sign = Sign::of(x);
        if sign == Sign::Zero {
            return Self::zero();
        }
        if !x.is_finite() {
            return Self::normalized(sign, 0, T::infinity());
        }
        // x = mantissa * 2^exp exactly; fold the mantissa into [1/sqrt2, sqrt2).
        let (mantissa, exp, _) = x.integer_decode();
        let bits = 64 - mantissa.leading_zeros() as i32;
        let two = T::lit(2.0);
        let mut frac = T::from_u64(mantissa).expect("mantissa fits") * two.powi(-bits);
        let mut exponent = i32::from(exp) + bits;
        if frac < T::FRAC_1_SQRT_2() {
            frac *= two;
            exponent -= 1;
        }
        Self {
            sign,
            exponent,
            log_fraction: frac.ln(),
        }
    }

    /// Natural log of the magnitude.
    pub fn log_magnitude(&self) -> T {
        if self.is_zero() {
            return T::neg_infinity();
        }
        let (hi, lo) = ln2_split::<T>();
        let e = T::lit(f64::from(self.exponent));
        e * hi + (e * lo + self.log_fraction)
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == Sign::Zero
    }

    pub fn value(&self) -> T {
        let mag = match self.sign {
            Sign::Zero => return T::zero(),
            _ => {
                let two = T::lit(2.0);
                let half = self.exponent / 2;
                self.log_fraction.exp() * two.powi(half) * two.powi(self.exponent - half)
            }
        };
        if self.sign == Sign::Negative {
            -mag
        } else {
            mag
        }
    }

    /// Converts between scalar types without passing through the (possibly
    /// unrepresentable) plain value.
    pub fn cast<U: Real>(self) -> LogSigned<U> {
        LogSigned {
            sign: self.sign,
            exponent: self.exponent,
            log_fraction: U::lit(self.log_fraction.to_f64().unwrap_or(f64::NAN)),
        }
    }

    /// Integer power; `0^0` is one.
    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        if self.is_zero() {
            return if n > 0 {
                Self::zero()
            } else {
                Self::from_parts(T::infinity(), Sign::Positive)
            };
        }
        let sign = if n % 2 == 0 {
            Sign::Positive
        } else {
            self.sign
        };
        Self::normalized(
            sign,
            self.exponent * n,
            self.log_fraction * T::lit(f64::from(n)),
        )
    }
}

impl<T: Real> Mul for LogSigned<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        Self::normalized(
            self.sign * rhs.sign,
            self.exponent + rhs.exponent,
            self.log_fraction + rhs.log_fraction,
        )
    }
}

/// Division by zero yields an infinite magnitude, mirroring IEEE floats.
impl<T: Real> Div for LogSigned<T> {
    type Output = Self;

    fn div(self, rhs: Self) -> Self {
        if rhs.is_zero() {
            let (sign, mag) = if self.is_zero() {
                (Sign::Positive, T::nan())
            } else {
                (self.sign, T::infinity())
            };
            return Self::normalized(sign, 0, mag);
        }
        Self::normalized(
            self.sign * rhs.sign,
            self.exponent - rhs.exponent,
            self.log_fraction - rhs.log_fraction,
        )
    }
}

impl<T: Real> Neg for LogSigned<T> {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            sign: -self.sign,
            ..self
        }
    }
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_POLY_ORDER {
        return Err(Error::UnsupportedOrder {
            order,
            max: MAX_POLY_ORDER,
        });
    }
    Ok(())
}

/// `ln(n!)`, accurate to a few ulps for every `n` this crate uses.
pub fn ln_factorial<T: Real>(n: usize) -> T {
    // 170! is the largest factorial representable in f64.
    if n <= 170 {
        let f: f64 = (2..=n).map(|i| i as f64).product();
        T::lit(f.ln())
    } else {
        let head: f64 = (2..=170).map(|i| i as f64).product::<f64>().ln();
        let tail: f64 = (171..=n).map(|i| (i as f64).ln()).sum();
        T::lit(head + tail)
    }
}

/// `n!` in log form.
pub fn factorial<T: Real>(n: usize) -> LogSigned<T> {
    if n <= 170 {
        let f: f64 = (2..=n).map(|i| i as f64).product();
        LogSigned::<f64>::from_value(f).cast()
    } else {
        LogSigned::from_parts(ln_factorial(n), Sign::Positive)
    }
}

/// Physicists' Hermite polynomial `H_order(x)` by upward recurrence.
pub fn hermite<T: Real>(order: usize, x: T) -> Result<T> {
    check_order(order)?;
    let two = T::lit(2.0);
    let mut prev = T::one();
    if order == 0 {
        return Ok(prev);
    }
    let mut cur = two * x;
    for i in 1..order {
        let next = two * x * cur - two * T::from_usize_lossy(i) * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Binomial coefficient `C(n, k)` in log form.
pub fn binomial<T: Real>(n: usize, k: usize) -> Result<LogSigned<T>> {
    if k > n {
        return Err(Error::domain(
            "binomial",
            format!("k = {k} exceeds n = {n}"),
        ));
    }
    if n > MAX_BINOMIAL_N {
        return Err(Error::UnsupportedOrder {
            order: n,
            max: MAX_BINOMIAL_N,
        });
    }
    let k = k.min(n - k);
    // Multiplicative form stays below 2.4e37 for n <= 128, well inside f64.
    let mut c = 1.0f64;
    for i in 1..=k {
        c = c * ((n - k + i) as f64) / (i as f64);
    }
    Ok(LogSigned::<f64>::from_value(c.round()).cast())
}

/// Generalized Laguerre polynomial `L_n^alpha(x)` by upward recurrence.
pub fn laguerre<T: Real>(n: usize, alpha: T, x: T) -> Result<T> {
    check_order(n)?;
    let mut prev = T::one();
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = T::one() + alpha - x;
    for k in 1..n {
        let kf = T::from_usize_lossy(k);
        let next = ((T::lit(2.0) * kf + T::one() + alpha - x) * cur - (kf + alpha) * prev)
            / (kf + T::one());
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Closed form of `∫ x^n exp(-p x^2 + 2 q x) dx` over the real line.
///
/// The textbook expression carries `(q/p)^n (p / 4q^2)^k`; here both are
/// folded into `q^(n-2k) p^(k-n) 4^(-k)` so `q = 0` needs no special case
/// beyond `0^0 = 1`.
pub fn gaussian_moment<T: Real>(n: usize, p: T, q: Complex<T>) -> Result<Complex<T>> {
    check_order(n)?;
    if !(p > T::zero()) {
        return Err(Error::DivergentIntegral {
            p: p.to_f64().unwrap_or(f64::NAN),
        });
    }
    let q_is_zero = q.re == T::zero() && q.im == T::zero();
    let ln_n_fact: f64 = ln_factorial(n);
    let mut acc = Complex::new(T::zero(), T::zero());
    for k in 0..=n / 2 {
        let j = n - 2 * k;
        let q_pow = if j == 0 {
            Complex::new(T::one(), T::zero())
        } else if q_is_zero {
            continue;
        } else {
            q.powu(j as u32)
        };
        let ln_coef =
            ln_n_fact - ln_factorial::<f64>(j) - ln_factorial::<f64>(k) - (k as f64) * 4f64.ln();
        let coef = T::lit(ln_coef.exp()) * p.powi(k as i32 - n as i32);
        acc += q_pow * coef;
    }
    let prefactor = (T::PI() / p).sqrt();
    Ok(acc * (q * q / p).exp() * prefactor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn hermite_low_orders() {
        assert_eq!(hermite(0, 3.7).unwrap(), 1.0);
        assert_eq!(hermite(1, 1.5).unwrap(), 3.0);
        // H_4(x) = 16x^4 - 48x^2 + 12
        assert_eq!(hermite(4, 0.0).unwrap(), 12.0);
        let x = 0.3f64;
        let h4 = 16.0 * x.powi(4) - 48.0 * x * x + 12.0;
        assert!(close(hermite(4, x).unwrap(), h4, 1e-14));
    }

    #[test]
    fn hermite_order_cap() {
        assert!(hermite(64, 0.1f64).is_ok());
        assert_eq!(
            hermite(65, 0.1f64),
            Err(Error::UnsupportedOrder { order: 65, max: 64 })
        );
    }

    #[test]
    fn hermite_generic_f32() {
        assert_eq!(hermite(2, 1.0f32).unwrap(), 2.0);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial::<f64>(5, 2).unwrap().value().round(), 10.0);
        assert_eq!(binomial::<f64>(17, 0).unwrap().value(), 1.0);
        let c = binomial::<f64>(30, 15).unwrap();
        assert_eq!(c.sign(), Sign::Positive);
        assert!(close(c.value(), 155_117_520.0, 1e-14));
        // exact 128 choose 64 = 2.3951146041928082866e37
        assert!(close(
            binomial::<f64>(128, 64).unwrap().value(),
            2.395_114_604_192_808e37,
            1e-13
        ));
    }

    #[test]
    fn binomial_domain_errors() {
        assert!(matches!(binomial::<f64>(3, 4), Err(Error::Domain { .. })));
        assert!(matches!(
            binomial::<f64>(129, 4),
            Err(Error::UnsupportedOrder { .. })
        ));
    }

    fn laguerre_series(n: usize, alpha: f64, x: f64) -> f64 {
        // sum_i (-1)^i C(n+alpha, n-i) x^i / i!
        (0..=n)
            .map(|i| {
                let gen_binom: f64 = (1..=n - i)
                    .map(|j| (alpha + (i + j) as f64) / j as f64)
                    .product();
                let fact: f64 = (1..=i).map(|j| j as f64).product();
                (-1f64).powi(i as i32) * gen_binom * x.powi(i as i32) / fact
            })
            .sum()
    }

    #[test]
    fn laguerre_values() {
        assert_eq!(laguerre(0, 0.7, 2.3).unwrap(), 1.0);
        assert_eq!(laguerre(1, 0.0, 2.0).unwrap(), -1.0);
        let v = laguerre(3, 1.5, 0.7).unwrap();
        assert!(close(v, 2.095_333_333_333_333_5, 1e-14));
        assert!(close(v, laguerre_series(3, 1.5, 0.7), 1e-14));
    }

    #[test]
    fn laguerre_alpha_zero_matches_explicit_binomial_sum() {
        for n in 0..=12 {
            for &x in &[0.0f64, 0.4, 1.7, 3.0] {
                let explicit: f64 = (0..=n)
                    .map(|m| {
                        let c = binomial::<f64>(n, n - m).unwrap().value();
                        let fact: f64 = (1..=m).map(|j| j as f64).product();
                        (-1f64).powi(m as i32) * c * x.powi(m as i32) / fact
                    })
                    .sum();
                let v = laguerre(n, 0.0, x).unwrap();
                assert!(
                    (v - explicit).abs() < 1e-11 * (1.0 + v.abs()),
                    "n={n} x={x}"
                );
            }
        }
    }

    #[test]
    fn laguerre_order_cap() {
        assert!(matches!(
            laguerre(65, 0.0, 1.0),
            Err(Error::UnsupportedOrder { .. })
        ));
    }

    /// Trapezoid rule on [-20, 20]; exponentially convergent for these
    /// Gaussian-damped analytic integrands.
    /// Returns the integral and the integral of the absolute integrand.
    fn moment_by_quadrature(n: usize, p: f64, q: Complex<f64>) -> (Complex<f64>, f64) {
        let steps = 8000;
        let h = 40.0 / steps as f64;
        let mut sum = Complex::new(0.0, 0.0);
        let mut abs = 0.0;
        for i in 0..=steps {
            let x = -20.0 + h * i as f64;
            let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
            let f = (Complex::new(-p * x * x, 0.0) + q * (2.0 * x)).exp() * x.powi(n as i32) * w;
            sum += f;
            abs += f.norm();
        }
        (sum * h, abs * h)
    }

    #[test]
    fn gaussian_moment_reference_values() {
        let q = Complex::new(0.3, -0.2);
        let g0 = gaussian_moment(0, 1.7, q).unwrap();
        let want = (q * q / 1.7).exp() * (std::f64::consts::PI / 1.7).sqrt();
        assert!((g0 - want).norm() < 1e-14 * want.norm());

        let g1 = gaussian_moment(1, 1.0, Complex::new(1.0, 0.0)).unwrap();
        let e_sqrt_pi = std::f64::consts::E * std::f64::consts::PI.sqrt();
        assert!(close(g1.re, e_sqrt_pi, 1e-14) && g1.im == 0.0);

        let g2 = gaussian_moment(2, 2.0, Complex::new(0.5, 0.0)).unwrap();
        assert!(close(g2.re, 0.443_809_679_970_575_95, 1e-13));
    }

    #[test]
    fn gaussian_moment_q_zero() {
        for n in 0..=10 {
            let g = gaussian_moment(n, 0.5f64, Complex::new(0.0, 0.0)).unwrap();
            if n % 2 == 1 {
                assert_eq!(g, Complex::new(0.0, 0.0));
            } else {
                assert!(g.re > 0.0 && g.re.is_finite());
            }
        }
    }

    #[test]
    fn gaussian_moment_rejects_nonpositive_p() {
        assert!(matches!(
            gaussian_moment(2, 0.0, Complex::new(0.1, 0.0)),
            Err(Error::DivergentIntegral { .. })
        ));
        assert!(gaussian_moment(2, -1.0, Complex::new(0.1, 0.0)).is_err());
    }

    #[test]
    fn gaussian_moment_identity_grid() {
        for n in 0..=10 {
            for &p in &[0.5, 1.0, 4.0] {
                for q in [
                    Complex::new(0.0, 0.0),
                    Complex::new(0.3, 0.0),
                    Complex::new(1.0, 0.5),
                ] {
                    let closed = gaussian_moment(n, p, q).unwrap();
                    let (numeric, abs) = moment_by_quadrature(n, p, q);
                    // odd moments at q = 0 vanish exactly; the trapezoid leaves roundoff
                    assert!(
                        (closed - numeric).norm() <= 1e-8 * numeric.norm() + 1e-14 * abs,
                        "n={n} p={p} q={q}: {closed} vs {numeric}"
                    );
                }
            }
        }
    }

    #[test]
    fn log_signed_basics() {
        let z = LogSigned::<f64>::zero();
        assert!(z.is_zero() && z.value() == 0.0);
        let a = LogSigned::from_value(-3.0f64);
        assert_eq!(a.sign(), Sign::Negative);
        assert!(close(a.value(), -3.0, 1e-15));
        assert!((a * z).is_zero());
        assert!((z / a).is_zero());
        assert_eq!((a / z).value(), f64::NEG_INFINITY);
        assert!(close(a.powi(3).value(), -27.0, 1e-14));
        assert!(close(a.powi(-2).value(), 1.0 / 9.0, 1e-14));
        assert!(close((-a).value(), 3.0, 1e-15));
    }

    fn ulps_apart(a: f64, b: f64) -> u64 {
        if a == b {
            return 0;
        }
        let (ia, ib) = (a.to_bits() as i64, b.to_bits() as i64);
        (ia - ib).unsigned_abs()
    }

    proptest! {
        #[test]
        fn hermite_parity(order in 0usize..=20, x in -5.0f64..5.0) {
            let lhs = hermite(order, -x).unwrap();
            let rhs = if order % 2 == 0 { 1.0 } else { -1.0 } * hermite(order, x).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }

        #[test]
        fn laguerre_addition_identity(
            m in 0usize..=10,
            ai in 0usize..3,
            bi in 0usize..3,
            x in 0.0f64..3.0,
            y in 0.0f64..3.0,
        ) {
            let alpha = [0.0, 0.5, 1.0][ai];
            let beta = [0.0, 0.5, 1.0][bi];
            let lhs = laguerre(m, alpha + beta + 1.0, x + y).unwrap();
            let rhs: f64 = (0..=m)
                .map(|n| laguerre(n, alpha, x).unwrap() * laguerre(m - n, beta, y).unwrap())
                .sum();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
        }

        #[test]
        fn log_signed_round_trip(x in prop::num::f64::NORMAL) {
            let back = LogSigned::from_value(x).value();
            prop_assert!((back - x).abs() <= f64::EPSILON * x.abs(), "{x} -> {back}");
        }

        #[test]
        fn log_magnitude_matches_ln(x in prop::num::f64::NORMAL) {
            let l = LogSigned::from_value(x).log_magnitude();
            prop_assert!((l - x.abs().ln()).abs() <= 4.0 * f64::EPSILON * (1.0 + l.abs()));
        }

        #[test]
        fn log_signed_arithmetic_matches_plain(a in -1e3f64..1e3, b in -1e3f64..1e3) {
            prop_assume!(a.abs() > 1e-3 && b.abs() > 1e-3);
            let (la, lb) = (LogSigned::from_value(a), LogSigned::from_value(b));
            prop_assert!(ulps_apart((la * lb).value(), a * b) <= 4);
            prop_assert!(ulps_apart((la / lb).value(), a / b) <= 4);
        }
    }
}
