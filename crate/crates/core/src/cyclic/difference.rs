use num_complex::Complex64;

/// A step `h` and point `y` at which `Δ_h^{n+1} f(y)` is not zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolynomialViolation {
    pub h: usize,
    pub y: usize,
    pub value: Complex64,
}

/// `Δ_h^order f` for a function on Z(m) given by its table (`m = f.len()`).
pub fn difference_power(f: &[Complex64], h: usize, order: u32) -> Vec<Complex64> {
    let m = f.len();
    let mut g = f.to_vec();
    for _ in 0..order {
        g = (0..m).map(|y| g[(y + h) % m] - g[y]).collect();
    }
    g
}

/// First `(h, y)` in lexicographic order with `|Δ_h^{n+1} f(y)| > tol·max(1, ‖f‖∞)`.
pub fn polynomial_violation(f: &[Complex64], n: u32, tol: f64) -> Option<PolynomialViolation> {
    let scale = f.iter().map(|z| z.norm()).fold(1.0, f64::max);
    (0..f.len()).find_map(|h| {
        difference_power(f, h, n + 1)
            .into_iter()
            .enumerate()
            .find(|(_, d)| d.norm() > tol * scale)
            .map(|(y, value)| PolynomialViolation { h, y, value })
    })
}

/// `true` iff `Δ_h^{n+1} f ≡ 0` for every `h` in Z(m).
///
/// A finite group consists of compact elements, so any such `f` is constant;
/// that consequence is asserted on every positive answer.
pub fn is_polynomial_of_degree(f: &[Complex64], n: u32) -> bool {
    let tol = crate::DEFAULT_TOLERANCE;
    if polynomial_violation(f, n, tol).is_some() {
        return false;
    }
    let m = f.len();
    if m > 1 {
        // Parseval bound on the distance to the mean through Δ_1^{n+1}
        let gap = (2.0 * (std::f64::consts::PI / m as f64).sin()).powi(n as i32 + 1);
        let scale = f.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let bound = 2.0 * (m as f64).sqrt() * tol * scale / gap;
        assert!(
            f.iter().all(|z| (z - f[0]).norm() <= bound),
            "polynomial on Z({m}) is not constant"
        );
    }
    true
}
