//! Bessel functions of the first kind for integer order.
//!
//! Small arguments use Miller's backward recurrence normalised with
//! `J_0 + 2 Σ J_2k = 1`. Large arguments (`x ≥ 25` and above every requested
//! order) start from Hankel's asymptotic expansion for `J_0` and `J_1` and
//! recur upward, which is stable while the order stays below `x`.

use std::f64::consts::{FRAC_PI_4, PI};

const ASYMPTOTIC_MIN: f64 = 25.0;
const RESCALE_ABOVE: f64 = 1e200;

/// `J_0(x), J_1(x), …, J_max_order(x)`.
pub fn bessel_j_sequence(max_order: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; max_order + 1];
    fill_bessel_j(x, &mut out);
    out
}

/// `J_n(x)` for a single integer order.
pub fn bessel_j(n: usize, x: f64) -> f64 {
    bessel_j_sequence(n, x)[n]
}

/// Writes `J_k(x)` into `out[k]` for every `k < out.len()`.
pub fn fill_bessel_j(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let ax = x.abs();
    if ax == 0.0 {
        out.fill(0.0);
        out[0] = 1.0;
        return;
    }
    let max_order = out.len() - 1;
    if ax >= ASYMPTOTIC_MIN && (max_order as f64) < ax {
        forward_from_asymptotic(ax, out);
    } else {
        miller(ax, out);
    }
    if x < 0.0 {
        for v in out.iter_mut().skip(1).step_by(2) {
            *v = -*v;
        }
    }
}

fn forward_from_asymptotic(x: f64, out: &mut [f64]) {
    let (j0, j1) = hankel_j0_j1(x);
    out[0] = j0;
    if out.len() > 1 {
        out[1] = j1;
    }
    for k in 1..out.len() - 1 {
        out[k + 1] = 2.0 * k as f64 / x * out[k] - out[k - 1];
    }
}

/// Hankel's expansion `J_ν(x) = sqrt(2/(πx)) (P cos ω − Q sin ω)` for ν = 0, 1.
fn hankel_j0_j1(x: f64) -> (f64, f64) {
    let amp = (2.0 / (PI * x)).sqrt();
    let (s, c) = x.sin_cos();
    let eval = |nu: f64| -> (f64, f64) {
        let mu = 4.0 * nu * nu;
        let (mut p, mut q) = (1.0, 0.0);
        let mut a = 1.0;
        let mut last = f64::INFINITY;
        for k in 1..200 {
            let odd = (2 * k - 1) as f64;
            a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
            let mag = a.abs();
            if mag > last || mag < 1e-18 {
                break;
            }
            last = mag;
            // k odd terms go to Q, k even terms to P, with alternating signs.
            match k % 4 {
                1 => q += a,
                2 => p -= a,
                3 => q -= a,
                _ => p += a,
            }
        }
        (p, q)
    };
    // cos(x - π/4) and sin(x - π/4) without forming the shifted argument.
    let (s4, c4) = FRAC_PI_4.sin_cos();
    let cos_w0 = c * c4 + s * s4;
    let sin_w0 = s * c4 - c * s4;
    // ω₁ = ω₀ − π/2
    let cos_w1 = sin_w0;
    let sin_w1 = -cos_w0;
    let (p0, q0) = eval(0.0);
    let (p1, q1) = eval(1.0);
    (amp * (p0 * cos_w0 - q0 * sin_w0), amp * (p1 * cos_w1 - q1 * sin_w1))
}

fn miller(x: f64, out: &mut [f64]) {
    let max_order = out.len() - 1;
    let top = max_order.max(x as usize);
    let start = top + 20 + (160.0 * (top as f64 + 1.0)).sqrt() as usize;
    let start = start + start % 2;
    let two_over_x = 2.0 / x;

    out.fill(0.0);
    let mut above = 0.0_f64; // J_{k+1}
    let mut current = 1e-30_f64; // J_k
    let mut norm = 0.0_f64;
    for k in (1..=start).rev() {
        if k <= max_order {
            out[k] = current;
        }
        if k % 2 == 0 {
            norm += 2.0 * current;
        }
        let below = k as f64 * two_over_x * current - above;
        above = current;
        current = below;
        if current.abs() > RESCALE_ABOVE {
            let f = 1.0 / RESCALE_ABOVE;
            current *= f;
            above *= f;
            norm *= f;
            for v in out.iter_mut() {
                *v *= f;
            }
        }
    }
    out[0] = current;
    norm += current;
    let inv = 1.0 / norm;
    for v in out.iter_mut() {
        *v *= inv;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `J_n(x) = (1/π) ∫_0^π cos(nθ − x sin θ) dθ`, by the trapezoid rule on
    /// the full period, which converges geometrically for this integrand.
    fn integral_oracle(n: usize, x: f64) -> f64 {
        let m = 4096 + (4.0 * x) as usize;
        let h = 2.0 * PI / m as f64;
        let s: f64 = (0..m)
            .map(|k| {
                let th = k as f64 * h;
                (n as f64 * th - x * th.sin()).cos()
            })
            .sum();
        s * h / (2.0 * PI)
    }

    #[test]
    fn matches_integral_representation() {
        for &x in &[1e-6, 0.3, 1.0, 4.7, 12.0, 24.9, 25.1, 37.0, 100.0, 871.3, 5000.0] {
            let seq = bessel_j_sequence(30, x);
            for (n, &v) in seq.iter().enumerate() {
                let want = integral_oracle(n, x);
                assert!((v - want).abs() < 2e-14, "J_{n}({x}) = {v}, oracle {want}");
            }
        }
    }

    #[test]
    fn known_values() {
        assert!((bessel_j(0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!(bessel_j(0, 2.404_825_557_695_773).abs() < 1e-15);
        assert_eq!(bessel_j_sequence(3, 0.0), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn negative_argument_parity() {
        let pos = bessel_j_sequence(6, 3.3);
        let neg = bessel_j_sequence(6, -3.3);
        for n in 0..=6 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((neg[n] - sign * pos[n]).abs() < 1e-16);
        }
    }

    #[test]
    fn neumann_sum_rule() {
        for &x in &[0.5, 8.0, 30.0, 400.0] {
            let n = (x as usize) + 60;
            let seq = bessel_j_sequence(n, x);
            let s = seq[0] * seq[0] + 2.0 * seq[1..].iter().map(|v| v * v).sum::<f64>();
            assert!((s - 1.0).abs() < 1e-13, "x={x}: {s}");
        }
    }

    #[test]
    fn orders_above_argument_use_backward_recurrence() {
        // x large but order larger still: must not blow up.
        let seq = bessel_j_sequence(80, 40.0);
        // Reference value from an independent arbitrary-precision evaluation.
        let want = 1.029_563_089_370_437e-17;
        assert!((seq[80] / want - 1.0).abs() < 1e-12, "{}", seq[80]);
    }
}
