//! Gauss-Legendre rules, used for the classical (p = q = 1) inner integrals
//! of functions without closed-form metadata and by the classical reference.

use std::sync::OnceLock;

/// Nodes and weights of the `n`-point rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(z) and P_{n-1}(z)
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let step = p1 / dp;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn rule20() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}

/// `int_a^b f` by the 20-point rule on `panels` equal panels.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let (nodes, weights) = rule20();
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for j in 0..panels {
        let lo = a + h * j as f64;
        let mid = lo + 0.5 * h;
        let mut s = 0.0;
        for (z, w) in nodes.iter().zip(weights) {
            s += w * f(mid + 0.5 * h * z);
        }
        total += 0.5 * h * s;
    }
    total
}
