//! Small numeric helpers shared by the analysis modules.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;

pub(crate) fn complexify(x: &DVector<f64>) -> DVector<C64> {
    x.map(|v| C64::new(v, 0.0))
}

/// Plain transpose product `aᵀ b` without conjugation.
pub(crate) fn dot_t(a: &DVector<C64>, b: &DVector<C64>) -> C64 {
    compensated_sum(a.iter().zip(b.iter()).map(|(x, y)| x * y))
}

/// Neumaier-compensated sum of complex terms, taken in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = C64>>(terms: I) -> C64 {
    let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
    for t in terms {
        re.add(t.re);
        im.add(t.im);
    }
    C64::new(re.value(), im.value())
}

pub(crate) fn compensated_sum_real<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut acc = Neumaier::default();
    for t in terms {
        acc.add(t);
    }
    acc.value()
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    carry: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Quadratic form `xᵀ P y` for real vectors.
pub(crate) fn quad_form(x: &DVector<f64>, p: &DMatrix<f64>, y: &DVector<f64>) -> f64 {
    let py = p * y;
    compensated_sum_real(x.iter().zip(py.iter()).map(|(a, b)| a * b))
}
