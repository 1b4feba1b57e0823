//! Pluggable (add, mult, zero) algebras the kernels are generic over.
//!
//! `MatScalar` and `Scalar` are split so that algebras like the BFS
//! parent-selection one can combine a numeric matrix with an index-valued
//! vector without converting the matrix. Ordinary arithmetic semirings use
//! the same type for both.

use std::fmt::Debug;
use std::marker::PhantomData;

/// A semiring over which `y = A x` is evaluated.
///
/// `add` must be associative and commutative with `zero` as its identity;
/// kernels rely on this to merge contributions in arbitrary bucket order.
pub trait Semiring: Sync {
    /// Element type of the matrix.
    type MatScalar: Copy + Send + Sync;
    /// Element type of the input and output vectors and the accumulator.
    type Scalar: Copy + Send + Sync + PartialEq + Debug;

    /// Additive identity.
    fn zero(&self) -> Self::Scalar;
    /// Combine two accumulated contributions.
    fn add(&self, a: Self::Scalar, b: Self::Scalar) -> Self::Scalar;
    /// Scale one matrix entry by one vector entry.
    fn mult(&self, a: Self::MatScalar, x: Self::Scalar) -> Self::Scalar;
}

/// Conventional arithmetic: `(+, *, 0)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PlusTimes<T>(PhantomData<T>);

impl<T> PlusTimes<T> {
    pub fn new() -> Self {
        PlusTimes(PhantomData)
    }
}

impl<T> Semiring for PlusTimes<T>
where
    T: num_traits::Zero
        + std::ops::Add<Output = T>
        + std::ops::Mul<Output = T>
        + Copy
        + Send
        + Sync
        + PartialEq
        + Debug,
{
    type MatScalar = T;
    type Scalar = T;

    fn zero(&self) -> T {
        T::zero()
    }

    fn add(&self, a: T, b: T) -> T {
        a + b
    }

    fn mult(&self, a: T, x: T) -> T {
        a * x
    }
}

/// Tropical algebra `(min, +, +inf)` over f64, e.g. for shortest paths.
#[derive(Debug, Clone, Copy, Default)]
pub struct MinPlus;

impl Semiring for MinPlus {
    type MatScalar = f64;
    type Scalar = f64;

    fn zero(&self) -> f64 {
        f64::INFINITY
    }

    fn add(&self, a: f64, b: f64) -> f64 {
        a.min(b)
    }

    fn mult(&self, a: f64, x: f64) -> f64 {
        a + x
    }
}

/// BFS frontier expansion: the vector carries vertex ids, `mult` forwards the
/// id of the frontier vertex that reached a row, and `add` keeps the smallest
/// id so parent selection is deterministic. Matrix values are ignored, which
/// lets any stored scalar type act as an adjacency pattern.
#[derive(Debug, Clone, Copy, Default)]
pub struct SelectMin<M>(PhantomData<M>);

impl<M> SelectMin<M> {
    pub fn new() -> Self {
        SelectMin(PhantomData)
    }
}

impl<M: Copy + Send + Sync> Semiring for SelectMin<M> {
    type MatScalar = M;
    type Scalar = usize;

    fn zero(&self) -> usize {
        usize::MAX
    }

    fn add(&self, a: usize, b: usize) -> usize {
        a.min(b)
    }

    fn mult(&self, _a: M, x: usize) -> usize {
        x
    }
}
