//! Additive-recurrence low-discrepancy sequence (generalized golden ratio),
//! randomized by a uniform shift.

/// `x_n = frac(shift + n * alpha)` with `alpha_j = phi_d^-(j+1)`, where
/// `phi_d` is the unique positive root of `x^(d+1) = x + 1`.
#[derive(Debug, Clone)]
pub struct QuasiRandom {
    alpha: Vec<f64>,
    shift: Vec<f64>,
    next: u64,
}

fn generalized_golden_ratio(dim: usize) -> f64 {
    let p = (dim + 1) as i32;
    let mut x: f64 = 2.0;
    for _ in 0..64 {
        let f = x.powi(p) - x - 1.0;
        let df = p as f64 * x.powi(p - 1) - 1.0;
        let step = f / df;
        x -= step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    x
}

impl QuasiRandom {
    /// The first point of the sequence is `shift` itself.
    pub fn new(shift: Vec<f64>) -> Self {
        let dim = shift.len();
        let phi = generalized_golden_ratio(dim);
        let alpha = (1..=dim).map(|j| phi.powi(-(j as i32)).fract()).collect();
        Self {
            alpha,
            shift,
            next: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn point(&self, n: u64) -> Vec<f64> {
        self.shift
            .iter()
            .zip(&self.alpha)
            .map(|(s, a)| (s + (n as f64) * a).fract())
            .collect()
    }

    pub fn take_points(&mut self, count: usize) -> Vec<Vec<f64>> {
        (0..count).map(|_| self.next().expect("infinite")).collect()
    }
}

impl Iterator for QuasiRandom {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        let p = self.point(self.next);
        self.next += 1;
        Some(p)
    }
}
