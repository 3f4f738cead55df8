//! Quadrature rules on the reference tetrahedron, triangle and segment.
//!
//! Tetrahedral points are barycentric 4-tuples with weights summing to the
//! reference volume `1/6`; triangle points are barycentric 3-tuples with
//! weights summing to `1/2`.

use alloc::vec::Vec;

use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 4]>,
    pub weights: Vec<f64>,
    /// Highest total polynomial degree integrated exactly.
    pub degree: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

pub const REFERENCE_TET_VOLUME: f64 = 1.0 / 6.0;
pub const REFERENCE_TRIANGLE_AREA: f64 = 0.5;

/// One point at the barycenter.
pub fn tet_barycenter() -> QuadratureRule {
    QuadratureRule { points: alloc::vec![[0.25; 4]], weights: alloc::vec![REFERENCE_TET_VOLUME], degree: 1 }
}

/// Symmetric 4-point rule, exact for quadratics.
pub fn tet_degree2() -> QuadratureRule {
    let a = 0.585_410_196_624_968_5;
    let b = 0.138_196_601_125_010_5;
    let points = alloc::vec![[a, b, b, b], [b, a, b, b], [b, b, a, b], [b, b, b, a]];
    QuadratureRule { points, weights: alloc::vec![REFERENCE_TET_VOLUME / 4.0; 4], degree: 2 }
}

/// Conical product (Stroud) rule with `m` Gauss points per direction,
/// exact up to degree `2m - 3`.
pub fn tet_collapsed(m: usize) -> QuadratureRule {
    let (x, w) = gauss_legendre(m);
    // map [-1, 1] to [0, 1]
    let s: Vec<f64> = x.iter().map(|t| 0.5 * (t + 1.0)).collect();
    let ws: Vec<f64> = w.iter().map(|t| 0.5 * t).collect();
    let mut points = Vec::with_capacity(m * m * m);
    let mut weights = Vec::with_capacity(m * m * m);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let (u, v, t) = (s[i], s[j], s[k]);
                let x1 = u;
                let x2 = v * (1.0 - u);
                let x3 = t * (1.0 - u) * (1.0 - v);
                let jac = (1.0 - u) * (1.0 - u) * (1.0 - v);
                points.push([1.0 - x1 - x2 - x3, x1, x2, x3]);
                weights.push(ws[i] * ws[j] * ws[k] * jac);
            }
        }
    }
    QuadratureRule { points, weights, degree: 2 * m - 3 }
}

/// Edge-midpoint rule, exact for quadratics.
pub fn triangle_midpoints() -> TriangleRule {
    TriangleRule {
        points: alloc::vec![[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]],
        weights: alloc::vec![REFERENCE_TRIANGLE_AREA / 3.0; 3],
        degree: 2,
    }
}

/// Seven-point rule, exact up to degree 5.
pub fn triangle_degree5() -> TriangleRule {
    let (a1, b1, w1) = (0.059_715_871_789_770, 0.470_142_064_105_115, 0.132_394_152_788_506);
    let (a2, b2, w2) = (0.797_426_985_353_087, 0.101_286_507_323_456, 0.125_939_180_544_827);
    let third = 1.0 / 3.0;
    let points = alloc::vec![
        [third, third, third],
        [a1, b1, b1],
        [b1, a1, b1],
        [b1, b1, a1],
        [a2, b2, b2],
        [b2, a2, b2],
        [b2, b2, a2],
    ];
    let weights = [0.225, w1, w1, w1, w2, w2, w2].iter().map(|w| w * REFERENCE_TRIANGLE_AREA).collect();
    TriangleRule { points, weights, degree: 5 }
}

/// Two-point Gauss rule on `[0, 1]`: `(positions, weights)`.
pub fn line_gauss2() -> ([f64; 2], [f64; 2]) {
    let d = 0.5 / math::sqrt(3.0);
    ([0.5 - d, 0.5 + d], [0.5, 0.5])
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(m);
    let mut w = Vec::with_capacity(m);
    for i in 0..m {
        let mut z = math::cos(core::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for n in 2..=m {
                let p2 = ((2 * n - 1) as f64 * z * p1 - (n - 1) as f64 * p0) / n as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if m == 0 { 1.0 } else if m == 1 { z } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x.push(z);
        w.push(2.0 / ((1.0 - z * z) * dp * dp));
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monomial_integral(a: u32, b: u32, c: u32) -> f64 {
        // int over reference tet of x^a y^b z^c = a! b! c! / (a+b+c+3)!
        let f = |n: u32| (1..=n).map(|k| k as f64).product::<f64>();
        f(a) * f(b) * f(c) / f(a + b + c + 3)
    }

    fn check(rule: &QuadratureRule) {
        let total: f64 = rule.weights.iter().sum();
        assert!((total - REFERENCE_TET_VOLUME).abs() < 1e-14);
        let d = rule.degree as u32;
        for a in 0..=d {
            for b in 0..=d - a {
                for c in 0..=d - a - b {
                    let q: f64 = rule
                        .points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(p, w)| w * libm::pow(p[1], a as f64) * libm::pow(p[2], b as f64) * libm::pow(p[3], c as f64))
                        .sum();
                    assert!((q - monomial_integral(a, b, c)).abs() < 1e-14, "{a} {b} {c}");
                }
            }
        }
    }

    #[test]
    fn tet_rules_exact_to_declared_degree() {
        check(&tet_barycenter());
        check(&tet_degree2());
        check(&tet_collapsed(4));
        check(&tet_collapsed(6));
    }

    #[test]
    fn triangle_rules_exact_to_declared_degree() {
        for rule in [triangle_midpoints(), triangle_degree5()] {
            let d = rule.degree as u32;
            for a in 0..=d {
                for b in 0..=d - a {
                    let f = |n: u32| (1..=n).map(|k| k as f64).product::<f64>();
                    let exact = f(a) * f(b) / f(a + b + 2);
                    let q: f64 = rule
                        .points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(p, w)| w * libm::pow(p[1], a as f64) * libm::pow(p[2], b as f64))
                        .sum();
                    assert!((q - exact).abs() < 1e-13, "{a} {b}");
                }
            }
        }
    }

    #[test]
    fn gauss_legendre_integrates_degree_2m_minus_1() {
        for m in 1..8 {
            let (x, w) = gauss_legendre(m);
            for p in 0..2 * m {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * libm::pow(*x, p as f64)).sum();
                let exact = if p % 2 == 0 { 2.0 / (p as f64 + 1.0) } else { 0.0 };
                assert!((q - exact).abs() < 1e-13, "m={m} p={p}");
            }
        }
    }
}
