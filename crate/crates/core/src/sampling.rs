//! Deterministic point sets: Halton sequences, ball samples and sphere
//! samples in `C^n = R^{2n}`.

use std::f64::consts::PI;

use crate::cplx::C64;

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Van der Corput radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    out
}

/// Point `i` of the Halton sequence in `[0, 1)^d`, `d <= 16`.
pub fn halton(i: u64, d: usize) -> Vec<f64> {
    PRIMES[..d].iter().map(|&b| radical_inverse(i, b)).collect()
}

fn to_complex(x: &[f64]) -> Vec<C64> {
    x.chunks(2).map(|c| C64::new(c[0], c[1])).collect()
}

/// `count` unit vectors in `R^{2n}`: equispaced angles for `n = 1`,
/// coordinate axes followed by normalized Halton points otherwise.
pub fn sphere_directions(n: usize, count: usize) -> Vec<Vec<C64>> {
    let d = 2 * n;
    if n == 1 {
        return (0..count)
            .map(|k| vec![C64::from_polar(1.0, 2.0 * PI * k as f64 / count as f64)])
            .collect();
    }
    let mut out = Vec::with_capacity(count);
    for axis in 0..d.min(count) {
        let mut x = vec![0.0; d];
        x[axis] = 1.0;
        out.push(to_complex(&x));
    }
    let mut i = 1u64;
    while out.len() < count {
        let x: Vec<f64> = halton(i, d).iter().map(|u| 2.0 * u - 1.0).collect();
        i += 1;
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.1 && norm <= 1.0 {
            out.push(to_complex(&x.iter().map(|v| v / norm).collect::<Vec<_>>()));
        }
    }
    out
}

/// Deterministic sample of the closed ball `B(center, r)`: the `4n` axis
/// points `center +- r e_i`, then boundary points, then interior Halton points.
pub fn ball_samples(center: &[C64], r: f64, count: usize) -> Vec<Vec<C64>> {
    let n = center.len();
    let d = 2 * n;
    let shift = |x: &[f64]| -> Vec<C64> {
        center.iter().enumerate().map(|(i, c)| c + C64::new(r * x[2 * i], r * x[2 * i + 1])).collect()
    };
    let mut out = Vec::with_capacity(count);
    for axis in 0..d {
        for sign in [1.0, -1.0] {
            let mut x = vec![0.0; d];
            x[axis] = sign;
            out.push(shift(&x));
        }
    }
    let rest = count.saturating_sub(out.len());
    let boundary = rest / 2;
    for dir in sphere_directions(n, boundary) {
        let x: Vec<f64> = dir.iter().flat_map(|c| [c.re, c.im]).collect();
        out.push(shift(&x));
    }
    let mut i = 1u64;
    while out.len() < count {
        let x: Vec<f64> = halton(i, d).iter().map(|u| 2.0 * u - 1.0).collect();
        i += 1;
        if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            out.push(shift(&x));
        }
    }
    out
}

/// Volume of the ball of radius `r` in `R^{2n}`: `pi^n r^{2n} / n!`.
pub fn ball_volume(n: usize, r: f64) -> f64 {
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    PI.powi(n as i32) * r.powi(2 * n as i32) / fact
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cplx;

    #[test]
    fn halton_prefix() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(1, 3) - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(halton(0, 3), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn ball_samples_stay_in_the_ball() {
        for n in 1..=2 {
            let center: Vec<C64> = (0..n).map(|i| C64::new(i as f64, -1.0)).collect();
            let pts = ball_samples(&center, 0.7, 100);
            assert_eq!(pts.len(), 100);
            assert!(pts.iter().all(|p| cplx::dist(p, &center) <= 0.7 + 1e-12));
            let on_sphere = pts.iter().filter(|p| (cplx::dist(p, &center) - 0.7).abs() < 1e-12).count();
            assert!(on_sphere >= 40);
        }
    }

    #[test]
    fn directions_are_unit() {
        for n in 1..=3 {
            for d in sphere_directions(n, 20) {
                assert!((cplx::norm_sqr(&d) - 1.0).abs() < 1e-12);
            }
        }
    }
}
