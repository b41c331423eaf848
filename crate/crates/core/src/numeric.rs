//! Small numeric helpers: exactly reduced phases and least-squares fits.
//!
//! All frame identities in this crate are theorems of integer arithmetic.
//! Phases evaluated on a uniform grid are reduced modulo the grid length in
//! `u128` before any trigonometry, so the only float error left is the one
//! from `sin`/`cos` itself.

use num_complex::Complex64;

pub const TAU: f64 = std::f64::consts::TAU;

/// `e^{i theta}`.
#[inline]
pub fn phasor(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

/// `e^{+2 pi i r m / n}` with the fraction reduced in integer arithmetic.
#[inline]
pub fn grid_phasor(r: u64, m: u64, n: u64) -> Complex64 {
    debug_assert!(n > 0);
    let rem = ((r as u128 * m as u128) % n as u128) as f64;
    phasor(TAU * rem / n as f64)
}

/// `e^{+2 pi i r x}` with the integer part of `r x` stripped before the
/// trigonometry. `x` is a time in units of the period.
#[inline]
pub fn reduced_phasor(r: u64, x: f64) -> Complex64 {
    let cycles = r as f64 * x;
    phasor(TAU * (cycles - cycles.floor()))
}

/// Ordinary least-squares line through `(x, y)` points; returns (slope, intercept).
///
/// Panics if fewer than two points are supplied or the x values are constant.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points for a line fit");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    assert!(sxx > 0.0, "degenerate abscissa in line fit");
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64;
    var.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid_phasor_reduces_exactly() {
        // 5 * 3 mod 6 = 3 -> e^{i pi} = -1
        let z = grid_phasor(5, 3, 6);
        assert_abs_diff_eq!(z.re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn grid_phasor_handles_huge_products() {
        // r * m overflows u64 but not u128.
        let z = grid_phasor(u64::MAX / 3, 1 << 40, 7);
        assert_abs_diff_eq!(z.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn line_fit_recovers_slope() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (slope, intercept) = linear_fit(&xs, &ys);
        assert_abs_diff_eq!(slope, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(intercept, 1.0, epsilon = 1e-12);
    }
}
