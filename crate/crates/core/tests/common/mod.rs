//! Shared test oracles, independent of the solver implementation.
#![allow(dead_code)] // each integration test binary uses a different subset

/// Closed-form solution of the scalar coupled optimality system with a
/// constant desired state.
///
/// Eliminating the adjoint from
///   z' = -d z + mu / nu,   mu' = z + d mu - zhat
/// gives z'' = sigma^2 z - zhat / nu with sigma^2 = d^2 + 1/nu, so
///   z(t)  = c1 e^{sigma t} + c2 e^{-sigma t} + zhat / (nu sigma^2)
///   mu(t) = nu [ (sigma + d) c1 e^{sigma t} + (d - sigma) c2 e^{-sigma t} ]
///           + nu d zhat / (nu sigma^2)
/// and the constants follow from z(0) = z0 and
/// mu(T) + gamma z(T) = gamma zhat.
pub struct ScalarBvp {
    d: f64,
    nu: f64,
    sigma: f64,
    zp: f64,
    c1: f64,
    c2: f64,
}

impl ScalarBvp {
    pub fn new(d: f64, nu: f64, gamma: f64, horizon: f64, zhat: f64, z0: f64) -> Self {
        let sigma = (d * d + 1.0 / nu).sqrt();
        let zp = zhat / (nu * sigma * sigma);
        // row 1: c1 + c2 = z0 - zp
        // row 2: [nu (sigma + d) + gamma] e^{sigma T} c1
        //      + [nu (d - sigma) + gamma] e^{-sigma T} c2
        //      = gamma zhat - (nu d + gamma) zp
        let a11 = 1.0;
        let a12 = 1.0;
        let a21 = (nu * (sigma + d) + gamma) * (sigma * horizon).exp();
        let a22 = (nu * (d - sigma) + gamma) * (-sigma * horizon).exp();
        let b1 = z0 - zp;
        let b2 = gamma * zhat - (nu * d + gamma) * zp;
        let det = a11 * a22 - a12 * a21;
        let c1 = (b1 * a22 - a12 * b2) / det;
        let c2 = (a11 * b2 - b1 * a21) / det;
        Self {
            d,
            nu,
            sigma,
            zp,
            c1,
            c2,
        }
    }

    pub fn state(&self, t: f64) -> f64 {
        self.c1 * (self.sigma * t).exp() + self.c2 * (-self.sigma * t).exp() + self.zp
    }

    pub fn adjoint(&self, t: f64) -> f64 {
        self.nu
            * ((self.sigma + self.d) * self.c1 * (self.sigma * t).exp()
                + (self.d - self.sigma) * self.c2 * (-self.sigma * t).exp()
                + self.d * self.zp)
    }

    /// Residual of the two first-order equations at `t`; should vanish.
    pub fn residual(&self, t: f64, zhat: f64) -> (f64, f64) {
        let h = 1e-6;
        let dz = (self.state(t + h) - self.state(t - h)) / (2.0 * h);
        let dmu = (self.adjoint(t + h) - self.adjoint(t - h)) / (2.0 * h);
        let r1 = dz + self.d * self.state(t) - self.adjoint(t) / self.nu;
        let r2 = dmu - self.state(t) - self.d * self.adjoint(t) + zhat;
        (r1, r2)
    }
}
