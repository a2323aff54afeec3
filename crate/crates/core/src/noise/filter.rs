//! Discretization of the rational low-pass response
//! F(s) = 1/(10s + 1) + 1/(100s^2 + 10s + 1).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Numerator of F(s), highest power first.
pub const RESPONSE_NUM: [f64; 3] = [100.0, 20.0, 2.0];
/// Denominator of F(s), highest power first: (10s + 1)(100s^2 + 10s + 1).
pub const RESPONSE_DEN: [f64; 4] = [1000.0, 200.0, 20.0, 1.0];
/// Slowest time constant of F(s) in mm (pole pair at -0.05 +- 0.0866i).
pub const SLOWEST_TIME_CONSTANT_MM: f64 = 20.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discretization {
    /// Trapezoidal (Tustin) substitution s = 2 f_s (1 - z^-1)/(1 + z^-1).
    #[default]
    Bilinear,
    /// Exact sampling of the state-space model with held inputs.
    ZeroOrderHold,
}

/// Multiplies two polynomials in z^-1 (lowest power first).
fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_pow(base: &[f64], k: usize) -> Vec<f64> {
    (0..k).fold(vec![1.0], |acc, _| poly_mul(&acc, base))
}

/// Bilinear transform of `num(s)/den(s)` (highest power first). Returns
/// digital coefficients `(b, a)` in powers of z^-1 with `a[0] = 1`.
pub fn bilinear(num: &[f64], den: &[f64], fs: f64) -> (Vec<f64>, Vec<f64>) {
    let order = den.len().max(num.len()) - 1;
    let k = 2.0 * fs;
    let transform = |poly: &[f64]| {
        let deg = poly.len() - 1;
        let mut out = vec![0.0; order + 1];
        for (idx, &c) in poly.iter().enumerate() {
            let p = deg - idx;
            let term = poly_mul(
                &poly_pow(&[1.0, -1.0], p),
                &poly_pow(&[1.0, 1.0], order - p),
            );
            let scale = c * k.powi(p as i32);
            for (o, t) in out.iter_mut().zip(term) {
                *o += scale * t;
            }
        }
        out
    };
    let mut b = transform(num);
    let mut a = transform(den);
    let a0 = a[0];
    b.iter_mut().for_each(|x| *x /= a0);
    a.iter_mut().for_each(|x| *x /= a0);
    (b, a)
}

/// Direct-form II transposed IIR filter; `a[0]` must be 1.
pub fn lfilter(b: &[f64], a: &[f64], x: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    let coef = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    let mut state = vec![0.0; n];
    x.iter()
        .map(|&xi| {
            let y = coef(b, 0) * xi + state[0];
            for i in 1..n {
                let next = if i < n - 1 { state[i] } else { 0.0 };
                state[i - 1] = coef(b, i) * xi - coef(a, i) * y + next;
            }
            y
        })
        .collect()
}

/// Zero-order-hold sampling of F(s) in controllable canonical form.
pub fn zoh_filter(fs: f64, x: &[f64]) -> Vec<f64> {
    let den: Vec<f64> = RESPONSE_DEN.iter().map(|c| c / RESPONSE_DEN[0]).collect();
    let num: Vec<f64> = RESPONSE_NUM.iter().map(|c| c / RESPONSE_DEN[0]).collect();
    let n = den.len() - 1;
    // Augmented [[A, B], [0, 0]] so that exp(M T) carries both Ad and Bd.
    let mut m = DMatrix::<f64>::zeros(n + 1, n + 1);
    for j in 0..n {
        m[(0, j)] = -den[j + 1];
    }
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    m[(0, n)] = 1.0;
    let e = (m / fs).exp();
    let ad = e.view((0, 0), (n, n)).into_owned();
    let bd = e.view((0, n), (n, 1)).column(0).into_owned();
    // y = sum_k num[k] s^(deg-k) applied to the state chain x1 = s^(n-1) q, ...
    let offset = n - num.len();
    let c = DVector::from_fn(n, |j, _| if j >= offset { num[j - offset] } else { 0.0 });
    let mut state = DVector::<f64>::zeros(n);
    x.iter()
        .map(|&u| {
            let y = c.dot(&state);
            state = &ad * &state + &bd * u;
            y
        })
        .collect()
}

/// Samples discarded before the first emitted output: at least 500 and at
/// least five slowest time constants.
pub fn burn_in_samples(fs: f64) -> usize {
    let settle = (5.0 * SLOWEST_TIME_CONSTANT_MM * fs).ceil() as usize;
    settle.max(500)
}

pub fn apply(disc: Discretization, fs: f64, x: &[f64]) -> Vec<f64> {
    match disc {
        Discretization::Bilinear => {
            let (b, a) = bilinear(&RESPONSE_NUM, &RESPONSE_DEN, fs);
            lfilter(&b, &a, x)
        }
        Discretization::ZeroOrderHold => zoh_filter(fs, x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order_bilinear_matches_closed_form() {
        // 1/(s + 1) at fs = 1: b = [1/3, 1/3], a = [1, -1/3].
        let (b, a) = bilinear(&[1.0], &[1.0, 1.0], 1.0);
        assert!((b[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((b[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((a[1] + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn dc_gain_is_two() {
        // F(0) = 2 for both discretizations.
        let x = vec![1.0; 4000];
        for disc in [Discretization::Bilinear, Discretization::ZeroOrderHold] {
            let y = apply(disc, 0.5, &x);
            assert!((y.last().unwrap() - 2.0).abs() < 1e-9, "{disc:?}");
        }
    }

    #[test]
    fn lfilter_fir_is_convolution() {
        let y = lfilter(&[1.0, 2.0], &[1.0], &[1.0, 0.0, 0.0, 3.0]);
        assert_eq!(y, vec![1.0, 2.0, 0.0, 3.0]);
    }

    #[test]
    fn bilinear_and_zoh_impulse_responses_are_close_when_oversampled() {
        let mut x = vec![0.0; 2000];
        x[0] = 1.0;
        let fs = 20.0;
        let yb = apply(Discretization::Bilinear, fs, &x);
        let yz = apply(Discretization::ZeroOrderHold, fs, &x);
        let sb: f64 = yb.iter().sum();
        let sz: f64 = yz.iter().sum();
        assert!(
            (sb - 2.0).abs() < 0.01 && (sz - 2.0).abs() < 0.01,
            "{sb} {sz}"
        );
    }

    #[test]
    fn burn_in_floor() {
        assert_eq!(burn_in_samples(0.5), 500);
        assert_eq!(burn_in_samples(10.0), 1000);
    }
}
