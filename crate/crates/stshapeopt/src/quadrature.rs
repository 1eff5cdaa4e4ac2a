//! Quadrature rules on intervals and triangles.

/// Barycentric points and weights (weights sum to 1; multiply by the area).
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl TriangleRule {
    /// The interior three-point rule, exact for quadratics.
    pub fn three_point() -> Self {
        let (a, b) = (2.0 / 3.0, 1.0 / 6.0);
        Self { points: vec![[a, b, b], [b, a, b], [b, b, a]], weights: vec![1.0 / 3.0; 3] }
    }

    /// Collapsed Gauss rule with `n²` points, exact for degree `2n − 2`.
    pub fn collapsed_gauss(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                // Duffy map of the unit square onto the reference triangle.
                let (u, v) = (x[i], x[j]);
                let l1 = u * (1.0 - v);
                let l2 = u * v;
                points.push([1.0 - l1 - l2, l1, l2]);
                // Jacobian u, reference area 1/2 normalised away.
                weights.push(2.0 * w[i] * w[j] * u);
            }
        }
        Self { points, weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss rule needs at least one point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        // Newton on P_n from the Chebyshev-like initial guess.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, z);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = 0.5 * (1.0 - z);
        nodes[n - 1 - i] = 0.5 * (1.0 + z);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Integrates `f` over `[a, b]` with an `n`-point Gauss rule.
pub fn integrate_interval(a: f64, b: f64, n: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let (x, w) = gauss_legendre(n);
    let h = b - a;
    x.iter().zip(&w).map(|(xi, wi)| wi * f(a + h * xi)).sum::<f64>() * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_is_exact_for_polynomials() {
        for n in 1..8 {
            for deg in 0..(2 * n) {
                let v = integrate_interval(0.0, 1.0, n, |x| x.powi(deg as i32));
                assert!((v - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn triangle_rules_integrate_monomials() {
        // ∫_T λ1^a λ2^b = a! b! / (a + b + 2)! × 2|T|, here normalised to |T| = 1.
        let fact = |k: u32| (1..=k).product::<u32>().max(1) as f64;
        for rule in [TriangleRule::three_point(), TriangleRule::collapsed_gauss(5)] {
            let max_deg = if rule.len() == 3 { 2 } else { 8 };
            for a in 0..=max_deg {
                for b in 0..=(max_deg - a) {
                    let v: f64 = rule
                        .points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(p, w)| w * p[1].powi(a as i32) * p[2].powi(b as i32))
                        .sum();
                    let exact = 2.0 * fact(a) * fact(b) / fact(a + b + 2);
                    assert!((v - exact).abs() < 1e-14, "a={a} b={b}");
                }
            }
        }
    }
}
