/// Zero and equality threshold shared by every floating-point check.
///
/// Comparisons are scale-aware: a quantity counts as zero when its
/// magnitude is at most `eps * max(1, scale)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub eps: f64,
}

impl Tolerance {
    pub const DEFAULT_EPS: f64 = 1e-8;

    pub fn new(eps: f64) -> Self {
        Self { eps }
    }

    pub fn bound(&self, scale: f64) -> f64 {
        self.eps * scale.abs().max(1.0)
    }

    pub fn is_zero(&self, x: f64, scale: f64) -> bool {
        x.abs() <= self.bound(scale)
    }

    pub fn eq(&self, x: f64, y: f64, scale: f64) -> bool {
        self.is_zero(x - y, scale)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(Self::DEFAULT_EPS)
    }
}

/// Largest absolute value in a slice, used as a comparison scale.
pub fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}
