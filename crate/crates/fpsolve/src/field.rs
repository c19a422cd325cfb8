//! Evaluatable real functions on an interval, with closed-form derivatives.
//!
//! Everything downstream (drifts, wavefunctions, quantum potentials, mode
//! profiles) is a [`ScalarField`]. Derivatives are closed-form compositions,
//! never numerical differentiation; the finite-difference comparison lives in
//! the test suite, as an independent check.

use std::sync::Arc;

/// An open real interval; endpoints may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo < hi, "interval endpoints must satisfy lo < hi");
        assert!(!lo.is_nan() && !hi.is_nan());
        Interval { lo, hi }
    }

    pub const fn whole_line() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo < hi).then(|| Interval::new(lo, hi))
    }

    /// Endpoint-wise equality with a tolerance; infinite ends must match in
    /// direction.
    pub fn approx_eq(&self, other: &Interval, tol: f64) -> bool {
        let side = |a: f64, b: f64| {
            if a.is_finite() && b.is_finite() {
                (a - b).abs() <= tol
            } else {
                a == b
            }
        };
        side(self.lo, other.lo) && side(self.hi, other.hi)
    }

    /// A reference point that is guaranteed to lie inside the interval.
    pub fn anchor(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => 0.5 * (self.lo + self.hi),
            (true, false) => self.lo + 1.0,
            (false, true) => self.hi - 1.0,
            (false, false) => 0.0,
        }
    }
}

/// A real function of one variable with derivatives available in closed form.
///
/// `deriv(x, 0)` is the value itself. Implementors provide derivatives at
/// least through order 2; composite fields built by this crate carry enough
/// orders for every operation that consumes them.
pub trait ScalarField: Send + Sync {
    fn domain(&self) -> Interval;

    fn deriv(&self, x: f64, order: u32) -> f64;

    fn eval(&self, x: f64) -> f64 {
        self.deriv(x, 0)
    }

    fn d1(&self, x: f64) -> f64 {
        self.deriv(x, 1)
    }

    fn d2(&self, x: f64) -> f64 {
        self.deriv(x, 2)
    }
}

/// Shared handle to a field; all fields are immutable once built.
pub type FieldRef = Arc<dyn ScalarField>;

impl ScalarField for FieldRef {
    fn domain(&self) -> Interval {
        self.as_ref().domain()
    }
    fn deriv(&self, x: f64, order: u32) -> f64 {
        self.as_ref().deriv(x, order)
    }
}

/// Constant function.
#[derive(Debug, Clone, Copy)]
pub struct Constant {
    pub value: f64,
    pub domain: Interval,
}

impl Constant {
    pub fn on(value: f64, domain: Interval) -> Self {
        Constant { value, domain }
    }

    pub fn everywhere(value: f64) -> Self {
        Constant::on(value, Interval::whole_line())
    }
}

impl ScalarField for Constant {
    fn domain(&self) -> Interval {
        self.domain
    }
    fn deriv(&self, _x: f64, order: u32) -> f64 {
        if order == 0 {
            self.value
        } else {
            0.0
        }
    }
}

/// `scale * f(x) + offset`, derivatives scaled accordingly.
pub struct Affine {
    pub inner: FieldRef,
    pub scale: f64,
    pub offset: f64,
}

impl Affine {
    pub fn new(inner: FieldRef, scale: f64, offset: f64) -> Self {
        Affine {
            inner,
            scale,
            offset,
        }
    }
}

impl ScalarField for Affine {
    fn domain(&self) -> Interval {
        self.inner.domain()
    }
    fn deriv(&self, x: f64, order: u32) -> f64 {
        let base = self.scale * self.inner.deriv(x, order);
        if order == 0 {
            base + self.offset
        } else {
            base
        }
    }
}

/// Pointwise product of two fields (Leibniz rule for derivatives).
pub struct Product {
    pub left: FieldRef,
    pub right: FieldRef,
    domain: Interval,
}

impl Product {
    pub fn new(left: FieldRef, right: FieldRef) -> Self {
        let domain = left
            .domain()
            .intersect(&right.domain())
            .expect("product factors must share part of their domain");
        Product {
            left,
            right,
            domain,
        }
    }
}

impl ScalarField for Product {
    fn domain(&self) -> Interval {
        self.domain
    }
    fn deriv(&self, x: f64, order: u32) -> f64 {
        (0..=order)
            .map(|k| {
                binomial(order, k) * self.left.deriv(x, k) * self.right.deriv(x, order - k)
            })
            .sum()
    }
}

/// Field defined by an explicit closure `(x, order) -> value`.
///
/// Handy for tests and the handful of places where a one-off closed form is
/// simpler than a dedicated struct.
pub struct ClosureField<F: Fn(f64, u32) -> f64 + Send + Sync> {
    domain: Interval,
    f: F,
}

impl<F: Fn(f64, u32) -> f64 + Send + Sync> ClosureField<F> {
    pub fn new(domain: Interval, f: F) -> Self {
        ClosureField { domain, f }
    }
}

impl<F: Fn(f64, u32) -> f64 + Send + Sync> ScalarField for ClosureField<F> {
    fn domain(&self) -> Interval {
        self.domain
    }
    fn deriv(&self, x: f64, order: u32) -> f64 {
        (self.f)(x, order)
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut out = 1.0;
    for j in 0..k {
        out = out * (n - j) as f64 / (j + 1) as f64;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_basics() {
        let i = Interval::new(0.0, std::f64::consts::PI);
        assert!(i.contains(1.0));
        assert!(!i.contains(0.0), "interval is open");
        assert!(!i.contains(4.0));
        assert!(i.is_finite());
        let w = Interval::whole_line();
        assert!(w.contains(1e300));
        assert!(!w.is_finite());
        assert_eq!(w.intersect(&i), Some(i));
    }

    #[test]
    fn interval_anchor_is_interior() {
        for iv in [
            Interval::new(0.0, 1.0),
            Interval::new(2.0, f64::INFINITY),
            Interval::new(f64::NEG_INFINITY, -3.0),
            Interval::whole_line(),
        ] {
            assert!(iv.contains(iv.anchor()), "{iv:?}");
        }
    }

    #[test]
    #[should_panic]
    fn interval_rejects_reversed_endpoints() {
        let _ = Interval::new(1.0, 0.0);
    }

    #[test]
    fn product_leibniz_matches_expanded_polynomial() {
        // (x^2)(x^3) = x^5, compare all derivative orders at x = 1.3
        let sq: FieldRef = Arc::new(ClosureField::new(Interval::whole_line(), |x, k| match k {
            0 => x * x,
            1 => 2.0 * x,
            2 => 2.0,
            _ => 0.0,
        }));
        let cube: FieldRef = Arc::new(ClosureField::new(Interval::whole_line(), |x, k| match k {
            0 => x * x * x,
            1 => 3.0 * x * x,
            2 => 6.0 * x,
            3 => 6.0,
            _ => 0.0,
        }));
        let p = Product::new(sq, cube);
        let x: f64 = 1.3;
        let expected = [
            x.powi(5),
            5.0 * x.powi(4),
            20.0 * x.powi(3),
            60.0 * x.powi(2),
        ];
        for (k, want) in expected.iter().enumerate() {
            assert!((p.deriv(x, k as u32) - want).abs() < 1e-12 * want.abs().max(1.0));
        }
    }

    #[test]
    fn affine_shifts_value_only() {
        let base: FieldRef = Arc::new(Constant::everywhere(2.0));
        let a = Affine::new(base, -1.0, 5.0);
        assert_eq!(a.eval(0.7), 3.0);
        assert_eq!(a.d1(0.7), 0.0);
    }
}
