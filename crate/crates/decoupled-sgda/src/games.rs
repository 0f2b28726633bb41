//! Two-player games and their gradient fields.
//!
//! The solvers only need partial gradients, exposed through the
//! [`TwoPlayerGame`] trait. The stacked descent field is
//! `F(x) = (grad_u f, -grad_v f)`, so `F(x*) = 0` at a saddle point and
//! gradient descent on the stacked field descends in `u` and ascends in `v`.
//! `F_xbar` freezes each player's cross argument at a reference point.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::norms::check_spd;
use crate::point::JointPoint;

/// A differentiable two-player zero-sum game `min_u max_v f(u, v)`.
pub trait TwoPlayerGame {
    fn dim_u(&self) -> usize;
    fn dim_v(&self) -> usize;

    /// `grad_u f(u, v)`.
    fn grad_u(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64>;

    /// `grad_v f(u, v)`.
    fn grad_v(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64>;

    /// Known equilibrium, if the game has a closed-form one.
    fn saddle(&self) -> Option<JointPoint> {
        None
    }

    fn dims(&self) -> [usize; 2] {
        [self.dim_u(), self.dim_v()]
    }

    fn check_point(&self, x: &JointPoint) -> Result<()> {
        x.check_dims(&self.dims())
    }
}

/// `F(x) = (grad_u f(u, v), -grad_v f(u, v))`.
pub fn operator_f<G: TwoPlayerGame + ?Sized>(game: &G, x: &JointPoint) -> Result<JointPoint> {
    game.check_point(x)?;
    Ok(JointPoint::new(vec![
        game.grad_u(x.u(), x.v()),
        -game.grad_v(x.u(), x.v()),
    ]))
}

/// `F_xbar(x) = (grad_u f(u, vbar), -grad_v f(ubar, v))`: each player sees
/// the opponent frozen at the reference point `x_ref`.
pub fn operator_f_bar<G: TwoPlayerGame + ?Sized>(
    game: &G,
    x: &JointPoint,
    x_ref: &JointPoint,
) -> Result<JointPoint> {
    game.check_point(x)?;
    game.check_point(x_ref)?;
    Ok(JointPoint::new(vec![
        game.grad_u(x.u(), x_ref.v()),
        -game.grad_v(x_ref.u(), x.v()),
    ]))
}

// ---------------------------------------------------------------------------
// Quadratic game
// ---------------------------------------------------------------------------

/// Quadratic game with bilinear coupling:
/// `f(u, v) = 1/2 <u, A u> - 1/2 <v, B v> + <u, C v>`
/// with `A`, `B` symmetric positive definite. The unique saddle point is the
/// origin, so `F(0) = 0`.
#[derive(Debug, Clone)]
pub struct QuadraticGame {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
}

impl QuadraticGame {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>) -> Result<Self> {
        check_spd(&a, "A")?;
        check_spd(&b, "B")?;
        if c.nrows() != a.nrows() || c.ncols() != b.nrows() {
            return Err(Error::DimensionMismatch {
                block: "C".into(),
                expected: a.nrows() * b.nrows(),
                got: c.nrows() * c.ncols(),
            });
        }
        Ok(Self { a, b, c })
    }

    /// Scalar game `f(u, v) = a/2 u^2 - b/2 v^2 + c u v`.
    pub fn scalar(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(
            DMatrix::from_element(1, 1, a),
            DMatrix::from_element(1, 1, b),
            DMatrix::from_element(1, 1, c),
        )
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn value(&self, x: &JointPoint) -> f64 {
        let (u, v) = (x.u(), x.v());
        0.5 * (&self.a * u).dot(u) - 0.5 * (&self.b * v).dot(v) + (&self.c * v).dot(u)
    }
}

impl TwoPlayerGame for QuadraticGame {
    fn dim_u(&self) -> usize {
        self.a.nrows()
    }

    fn dim_v(&self) -> usize {
        self.b.nrows()
    }

    fn grad_u(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        &self.a * u + &self.c * v
    }

    fn grad_v(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        self.c.transpose() * u - &self.b * v
    }

    fn saddle(&self) -> Option<JointPoint> {
        Some(JointPoint::zeros(&[self.dim_u(), self.dim_v()]))
    }
}

// ---------------------------------------------------------------------------
// Toy GAN game
// ---------------------------------------------------------------------------

/// Non-convex two-player game with GAN-like structure. The discriminator `v`
/// is a flattened `m x m` matrix `V` with `m = dim(u)`, and the objective is
/// the closed-form expectation
///
/// `f(u, V) = trace(V Sigma) - u^T V u + lambda1 ||u||^2 - lambda2 ||V||_F^2`,
///
/// using `E[phi^T V phi] = trace(V Sigma)` for `phi ~ N(0, Sigma)` and
/// `E[(u phi)^T V (u phi)] = u^T V u` for scalar `phi ~ N(0, 1)`. Evaluating
/// the expectations exactly keeps gradients deterministic; stochasticity comes
/// only from the oracle noise model.
#[derive(Debug, Clone)]
pub struct ToyGanGame {
    sigma: DMatrix<f64>,
    lambda1: f64,
    lambda2: f64,
}

impl ToyGanGame {
    pub fn new(sigma: DMatrix<f64>, lambda1: f64, lambda2: f64) -> Result<Self> {
        check_spd(&sigma, "Sigma")?;
        for (name, l) in [("lambda1", lambda1), ("lambda2", lambda2)] {
            if l < 0.0 || !l.is_finite() {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    message: format!("must be a nonnegative real, got {l}"),
                });
            }
        }
        Ok(Self {
            sigma,
            lambda1,
            lambda2,
        })
    }

    pub fn m(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    /// Reshape the flattened discriminator block into its matrix form
    /// (column-major, matching `DMatrix` storage).
    fn unflatten(&self, v: &DVector<f64>) -> DMatrix<f64> {
        let m = self.m();
        DMatrix::from_column_slice(m, m, v.as_slice())
    }

    pub fn value(&self, x: &JointPoint) -> f64 {
        let u = x.u();
        let vm = self.unflatten(x.v());
        let trace = (&vm * &self.sigma).trace();
        trace - (&vm * u).dot(u) + self.lambda1 * u.dot(u) - self.lambda2 * x.v().dot(x.v())
    }
}

impl TwoPlayerGame for ToyGanGame {
    fn dim_u(&self) -> usize {
        self.m()
    }

    fn dim_v(&self) -> usize {
        self.m() * self.m()
    }

    /// `grad_u = -(V + V^T) u + 2 lambda1 u`.
    fn grad_u(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let vm = self.unflatten(v);
        -(&vm * u) - vm.transpose() * u + 2.0 * self.lambda1 * u
    }

    /// `grad_v = vec(Sigma - u u^T) - 2 lambda2 v`.
    fn grad_v(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let m = self.m();
        let outer = u * u.transpose();
        let mut g = DVector::zeros(m * m);
        for j in 0..m {
            for i in 0..m {
                g[j * m + i] = self.sigma[(i, j)] - outer[(i, j)];
            }
        }
        g - 2.0 * self.lambda2 * v
    }
}

/// Analytic gradients of [`ToyGanGame`] as a stacked point `(grad_u, grad_v)`.
///
/// Note this is the raw gradient pair, not the descent field `F`; the solver
/// ascends in `v`, so `F = (grad_u, -grad_v)`.
pub fn toygan_gradients(game: &ToyGanGame, x: &JointPoint) -> Result<JointPoint> {
    game.check_point(x)?;
    Ok(JointPoint::new(vec![
        game.grad_u(x.u(), x.v()),
        game.grad_v(x.u(), x.v()),
    ]))
}
