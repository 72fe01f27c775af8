//! Scalar abstraction for the numeric kernels.
//!
//! All label arithmetic and metric kernels are generic over [`Scalar`] so the
//! same code paths serve `f32` and `f64`. Concrete aliases for the common
//! types live at the crate root.

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable by the label and metric kernels.
///
/// Blanket-implemented for every type that satisfies the bounds, which in
/// practice means `f32` and `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
    /// Lossy conversion for error payloads and reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact-for-small-integers conversion of a count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + std::fmt::Debug
        + std::fmt::Display
        + Send
        + Sync
        + 'static
{
}
