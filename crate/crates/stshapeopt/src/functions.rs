//! Scalar data on the space-time domain: sources `f(t, x)` and objective
//! integrands `j(t, x, u)`.

/// A smooth function of `(t, x)` with its spatial derivative.
pub trait ScalarField: Send + Sync {
    fn value(&self, t: f64, x: f64) -> f64;
    fn grad_x(&self, t: f64, x: f64) -> f64;
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Zero;

impl ScalarField for Zero {
    fn value(&self, _t: f64, _x: f64) -> f64 {
        0.0
    }
    fn grad_x(&self, _t: f64, _x: f64) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl ScalarField for Constant {
    fn value(&self, _t: f64, _x: f64) -> f64 {
        self.0
    }
    fn grad_x(&self, _t: f64, _x: f64) -> f64 {
        0.0
    }
}

/// A field given by two closures: the value and `∂/∂x`.
#[derive(Clone, Copy)]
pub struct FnField<F, G> {
    pub value: F,
    pub grad_x: G,
}

impl<F, G> FnField<F, G>
where
    F: Fn(f64, f64) -> f64 + Send + Sync,
    G: Fn(f64, f64) -> f64 + Send + Sync,
{
    pub fn new(value: F, grad_x: G) -> Self {
        Self { value, grad_x }
    }
}

impl<F, G> ScalarField for FnField<F, G>
where
    F: Fn(f64, f64) -> f64 + Send + Sync,
    G: Fn(f64, f64) -> f64 + Send + Sync,
{
    fn value(&self, t: f64, x: f64) -> f64 {
        (self.value)(t, x)
    }
    fn grad_x(&self, t: f64, x: f64) -> f64 {
        (self.grad_x)(t, x)
    }
}

/// Objective integrand `j(t, x, u)` with its partial derivatives.
pub trait Integrand: Send + Sync {
    fn value(&self, t: f64, x: f64, u: f64) -> f64;
    /// `∂j/∂u`.
    fn du(&self, t: f64, x: f64, u: f64) -> f64;
    /// `∂j/∂x`, needed because quadrature points move with the shape.
    fn dx(&self, _t: f64, _x: f64, _u: f64) -> f64 {
        0.0
    }
}

/// `j(u) = u`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Identity;

impl Integrand for Identity {
    fn value(&self, _t: f64, _x: f64, u: f64) -> f64 {
        u
    }
    fn du(&self, _t: f64, _x: f64, _u: f64) -> f64 {
        1.0
    }
}

/// `j ≡ 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Null;

impl Integrand for Null {
    fn value(&self, _t: f64, _x: f64, _u: f64) -> f64 {
        0.0
    }
    fn du(&self, _t: f64, _x: f64, _u: f64) -> f64 {
        0.0
    }
}

/// `j(u) = u²/2`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HalfSquare;

impl Integrand for HalfSquare {
    fn value(&self, _t: f64, _x: f64, u: f64) -> f64 {
        0.5 * u * u
    }
    fn du(&self, _t: f64, _x: f64, u: f64) -> f64 {
        u
    }
}

/// An integrand given by closures for `j`, `∂j/∂u` and `∂j/∂x`.
#[derive(Clone, Copy)]
pub struct FnIntegrand<J, Ju, Jx> {
    pub value: J,
    pub du: Ju,
    pub dx: Jx,
}

impl<J, Ju, Jx> Integrand for FnIntegrand<J, Ju, Jx>
where
    J: Fn(f64, f64, f64) -> f64 + Send + Sync,
    Ju: Fn(f64, f64, f64) -> f64 + Send + Sync,
    Jx: Fn(f64, f64, f64) -> f64 + Send + Sync,
{
    fn value(&self, t: f64, x: f64, u: f64) -> f64 {
        (self.value)(t, x, u)
    }
    fn du(&self, t: f64, x: f64, u: f64) -> f64 {
        (self.du)(t, x, u)
    }
    fn dx(&self, t: f64, x: f64, u: f64) -> f64 {
        (self.dx)(t, x, u)
    }
}
