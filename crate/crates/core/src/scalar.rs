use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Floating point type used for probabilities, embeddings and statistics.
pub trait Scalar: Float + FromPrimitive + Into<f64> + Sum + Debug + Display + Send + Sync + 'static {
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as float")
    }

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("f64 representable in scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Arithmetic mean, accumulated left to right. `None` for an empty slice.
pub fn mean<F: Scalar>(values: &[F]) -> Option<F> {
    if values.is_empty() {
        return None;
    }
    let mut acc = F::zero();
    for &v in values {
        acc = acc + v;
    }
    Some(acc / F::from_count(values.len()))
}

/// Mean and population standard deviation (divide by n), two-pass.
pub fn mean_and_population_std<F: Scalar>(values: &[F]) -> Option<(F, F)> {
    let m = mean(values)?;
    let mut acc = F::zero();
    for &v in values {
        let d = v - m;
        acc = acc + d * d;
    }
    Some((m, (acc / F::from_count(values.len())).sqrt()))
}
