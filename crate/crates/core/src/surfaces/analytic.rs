//! Closed-form graphs over polar domains.
//!
//! A [`GraphFormula`] can be attached to a multivalued graph so downstream
//! operations (derivatives, residuals, circle sampling) bypass finite
//! differences and evaluate exactly.

use serde::{Deserialize, Serialize};

/// Value and derivatives of a graph `u(rho, theta)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphJet {
    pub u: f64,
    pub u_rho: f64,
    pub u_theta: f64,
    pub u_rho_rho: f64,
    pub u_rho_theta: f64,
    pub u_theta_theta: f64,
}

/// Closed-form graph families used as oracles and synthetic test sheets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GraphFormula {
    /// `u = pitch * theta`: the standard helicoid over the punctured plane.
    Helicoid { pitch: f64 },
    /// `u = gx*x + gy*y + offset`: a tilted plane.
    Plane { gx: f64, gy: f64, offset: f64 },
    /// `u = sign * neck * arccosh(rho / neck)`: one catenoid end, `rho > neck`.
    Catenoid { neck: f64, upper: bool },
    /// `u = pitch*theta + amp * rho^power`: radial perturbation of a helicoid.
    RadialPower { pitch: f64, amp: f64, power: f64 },
    /// `u = pitch*theta + amp * rho^power * sin(theta)`.
    AngularRipple { pitch: f64, amp: f64, power: f64 },
}

impl GraphFormula {
    pub fn eval(&self, rho: f64, theta: f64) -> f64 {
        self.jet(rho, theta).u
    }

    pub fn jet(&self, rho: f64, theta: f64) -> GraphJet {
        match *self {
            GraphFormula::Helicoid { pitch } => GraphJet {
                u: pitch * theta,
                u_rho: 0.0,
                u_theta: pitch,
                u_rho_rho: 0.0,
                u_rho_theta: 0.0,
                u_theta_theta: 0.0,
            },
            GraphFormula::Plane { gx, gy, offset } => {
                let (s, c) = theta.sin_cos();
                GraphJet {
                    u: rho * (gx * c + gy * s) + offset,
                    u_rho: gx * c + gy * s,
                    u_theta: rho * (-gx * s + gy * c),
                    u_rho_rho: 0.0,
                    u_rho_theta: -gx * s + gy * c,
                    u_theta_theta: -rho * (gx * c + gy * s),
                }
            }
            GraphFormula::Catenoid { neck, upper } => {
                let sgn = if upper { 1.0 } else { -1.0 };
                let root = (rho * rho - neck * neck).sqrt();
                GraphJet {
                    u: sgn * neck * (rho / neck + root / neck).ln(),
                    u_rho: sgn * neck / root,
                    u_theta: 0.0,
                    u_rho_rho: -sgn * neck * rho / (root * root * root),
                    u_rho_theta: 0.0,
                    u_theta_theta: 0.0,
                }
            }
            GraphFormula::RadialPower { pitch, amp, power } => GraphJet {
                u: pitch * theta + amp * rho.powf(power),
                u_rho: amp * power * rho.powf(power - 1.0),
                u_theta: pitch,
                u_rho_rho: amp * power * (power - 1.0) * rho.powf(power - 2.0),
                u_rho_theta: 0.0,
                u_theta_theta: 0.0,
            },
            GraphFormula::AngularRipple { pitch, amp, power } => {
                let (s, c) = theta.sin_cos();
                let p = rho.powf(power);
                let dp = amp * power * rho.powf(power - 1.0);
                GraphJet {
                    u: pitch * theta + amp * p * s,
                    u_rho: dp * s,
                    u_theta: pitch + amp * p * c,
                    u_rho_rho: amp * power * (power - 1.0) * rho.powf(power - 2.0) * s,
                    u_rho_theta: dp * c,
                    u_theta_theta: -amp * p * s,
                }
            }
        }
    }
}
