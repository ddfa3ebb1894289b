//! Gauss–Legendre rules and adaptive panel integration.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive integration with 15-point Gauss–Legendre panels, bisecting a panel
/// until it agrees with the sum of its halves to `tol` (relative to the running
/// magnitude of the integral).
#[derive(Debug, Clone)]
pub struct AdaptiveGaussLegendre {
    rule: GaussLegendre,
    tol: f64,
    max_depth: u32,
}

impl Default for AdaptiveGaussLegendre {
    fn default() -> Self {
        Self::new(1e-12)
    }
}

impl AdaptiveGaussLegendre {
    pub fn new(tol: f64) -> Self {
        Self { rule: GaussLegendre::new(15), tol, max_depth: 40 }
    }

    /// Integrates over `[a, b]`, treating every point in `breaks` as a panel
    /// boundary (for integrands with kinks at known locations).
    pub fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64]) -> f64 {
        let mut cuts = vec![a];
        cuts.extend(breaks.iter().copied().filter(|&c| c > a && c < b));
        cuts.push(b);
        cuts.windows(2)
            .map(|w| {
                let whole = self.rule.integrate(&f, w[0], w[1]);
                self.refine(&f, w[0], w[1], whole, 0)
            })
            .sum()
    }

    fn refine(&self, f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, depth: u32) -> f64 {
        let mid = 0.5 * (a + b);
        let left = self.rule.integrate(f, a, mid);
        let right = self.rule.integrate(f, mid, b);
        let split = left + right;
        if (split - whole).abs() <= self.tol * split.abs().max(1e-300) || depth >= self.max_depth {
            return split;
        }
        self.refine(f, a, mid, left, depth + 1) + self.refine(f, mid, b, right, depth + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_polynomials() {
        let rule = GaussLegendre::new(10);
        let weight_sum: f64 = rule.weights.iter().sum();
        assert!((weight_sum - 2.0).abs() < 1e-14);
        for k in 0..20 {
            let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            let approx = rule.integrate(|x| x.powi(k), -1.0, 1.0);
            assert!((approx - exact).abs() < 1e-14, "k = {k}");
        }
    }

    #[test]
    fn large_rules_have_accurate_weights() {
        let rule = GaussLegendre::new(64);
        let approx = rule.integrate(|x| x.cos(), 0.0, 1.0);
        assert!((approx - 1f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_kinks_at_breaks() {
        let quad = AdaptiveGaussLegendre::default();
        let f = |x: f64| (x - 1.0).abs().powf(1.5);
        let v = quad.integrate(f, 0.0, 3.0, &[1.0]);
        let exact = (1.0 + 2f64.powf(2.5)) / 2.5;
        assert!((v - exact).abs() < 1e-12);
    }
}
