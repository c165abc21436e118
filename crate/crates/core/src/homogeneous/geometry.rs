//! Ball volumes, pairwise overlap volumes and the three-body overlap integral.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Volume of the `d`-ball of radius `r`.
pub fn ball_volume(d: usize, r: f64) -> f64 {
    unit_ball_volume(d) * r.powi(d as i32)
}

pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(d - 2) * 2.0 * PI / d as f64,
    }
}

/// Surface measure of the unit sphere in `R^d`.
fn unit_sphere_area(d: usize) -> f64 {
    d as f64 * unit_ball_volume(d)
}

fn check_dim(d: usize) -> Result<()> {
    if !(1..=3).contains(&d) {
        return Err(Error::Capability(format!("overlap geometry is implemented for d in 1..=3, got {d}")));
    }
    Ok(())
}

/// Volume of `B(0, r1) ∩ B(x, r2)` with `|x| = t`.
pub fn lens_volume(d: usize, r1: f64, r2: f64, t: f64) -> Result<f64> {
    check_dim(d)?;
    let t = t.abs();
    if t >= r1 + r2 {
        return Ok(0.0);
    }
    if t <= (r1 - r2).abs() {
        return Ok(ball_volume(d, r1.min(r2)));
    }
    Ok(match d {
        1 => r1 + r2 - t,
        2 => {
            let c1 = ((t * t + r1 * r1 - r2 * r2) / (2.0 * t * r1)).clamp(-1.0, 1.0);
            let c2 = ((t * t + r2 * r2 - r1 * r1) / (2.0 * t * r2)).clamp(-1.0, 1.0);
            let k = ((-t + r1 + r2) * (t + r1 - r2) * (t - r1 + r2) * (t + r1 + r2)).max(0.0);
            r1 * r1 * c1.acos() + r2 * r2 * c2.acos() - 0.5 * k.sqrt()
        }
        _ => {
            let s = r1 + r2 - t;
            PI * s * s * (t * t + 2.0 * t * (r1 + r2) - 3.0 * (r1 - r2).powi(2)) / (12.0 * t)
        }
    })
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let m = panels.max(2) & !1;
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for i in 1..m {
        acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// `∫_{|x| < e01} vol(B(0, e02) ∩ B(x, e12)) dx`, the integral of the
/// triangle graph `f01 f02 f12` (up to sign) for hard cores with contact
/// distances `e_ij`.
pub fn triangle_overlap_integral(d: usize, e01: f64, e02: f64, e12: f64) -> Result<f64> {
    check_dim(d)?;
    if d == 1 {
        // piecewise linear integrand: trapezoid over the kinks is exact
        let overlap = |x: f64| ((x + e12).min(e02) - (x - e12).max(-e02)).max(0.0);
        let mut knots = vec![-e01, e01];
        for k in [e02 - e12, e12 - e02, e02 + e12, -(e02 + e12)] {
            if k > -e01 && k < e01 {
                knots.push(k);
            }
        }
        knots.sort_by(f64::total_cmp);
        return Ok(knots.windows(2).map(|w| 0.5 * (w[1] - w[0]) * (overlap(w[0]) + overlap(w[1]))).sum());
    }
    let shell = unit_sphere_area(d);
    let integrand = |t: f64| shell * t.powi(d as i32 - 1) * lens_volume(d, e02, e12, t).unwrap_or(0.0);
    let mut knots = vec![0.0, e01];
    for k in [(e02 - e12).abs(), e02 + e12] {
        if k > 0.0 && k < e01 {
            knots.push(k);
        }
    }
    knots.sort_by(f64::total_cmp);
    Ok(knots.windows(2).map(|w| simpson(integrand, w[0], w[1], 20_000)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn lens_limits() {
        for d in 1..=3 {
            assert!((lens_volume(d, 1.0, 1.0, 0.0).unwrap() - ball_volume(d, 1.0)).abs() < 1e-12);
            assert_eq!(lens_volume(d, 1.0, 1.0, 2.0).unwrap(), 0.0);
            // continuity at the containment threshold
            let inner = lens_volume(d, 1.0, 0.5, 0.5 - 1e-9).unwrap();
            let outer = lens_volume(d, 1.0, 0.5, 0.5 + 1e-9).unwrap();
            assert!((inner - outer).abs() < 1e-6, "d={d}");
        }
    }

    #[test]
    fn triangle_in_one_dimension() {
        // region |x1|<1, |x2|<1, |x1-x2|<1 has area 3
        assert!((triangle_overlap_integral(1, 1.0, 1.0, 1.0).unwrap() - 3.0).abs() < 1e-14);
    }
}
