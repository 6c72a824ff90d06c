//! Closed-form concentration and bias bounds for the k-NN estimate.

/// `P(|η̂ − E η̂| > s) ≤ 2 exp(−2 k s²)`.
pub fn hoeffding_bound(k: usize, s: f64) -> f64 {
    2.0 * (-2.0 * k as f64 * s * s).exp()
}

/// `2 exp(−2k (ε − Δ)₊²)`: probability that the vote disagrees with the
/// Bayes rule at a point with margin `eps` when the bias is at most `delta_bias`.
pub fn misclass_bound(k: usize, eps: f64, delta_bias: f64) -> f64 {
    let gap = (eps - delta_bias).max(0.0);
    2.0 * (-2.0 * k as f64 * gap * gap).exp()
}

/// `L (2/κ)^(1/d) (k/(n a))^(1/d) + 2 exp(−3k/14)`: bias of the k-NN mean
/// at a point of density at least `a`, for an `L`-Lipschitz regression
/// function under minimal-mass constant `κ`.
pub fn bias_bound(lipschitz: f64, kappa: f64, k: usize, n: usize, a: f64, d: usize) -> f64 {
    let inv_d = 1.0 / d as f64;
    lipschitz * (2.0 / kappa).powf(inv_d) * (k as f64 / (n as f64 * a)).powf(inv_d)
        + 2.0 * (-3.0 * k as f64 / 14.0).exp()
}

/// Deviation bound for the estimate built from a Poisson-sized pair of
/// samples: `2πn [2 exp(−2k t²) + e^(−n) 1{t ≤ 1}]`.
pub fn poisson_concentration_bound(n: usize, k: usize, t: f64) -> f64 {
    let nf = n as f64;
    let indicator = if t <= 1.0 { (-nf).exp() } else { 0.0 };
    2.0 * std::f64::consts::PI * nf * (2.0 * (-2.0 * k as f64 * t * t).exp() + indicator)
}
