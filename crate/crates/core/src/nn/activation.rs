//! Scalar activation functions.

/// Rectified linear unit: `max(0, z)`.
pub fn relu(z: f64) -> f64 {
    z.max(0.0)
}

/// ReLU derivative with the subgradient at 0 taken as 0.
pub fn relu_derivative(z: f64) -> f64 {
    if z > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Logistic sigmoid `1 / (1 + e^-z)`, computed with the branch that never
/// exponentiates a positive argument, then nudged into the open interval so
/// saturated outputs stay strictly inside (0, 1) at f64 resolution.
pub fn sigmoid(z: f64) -> f64 {
    let value = if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    };
    value.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}
