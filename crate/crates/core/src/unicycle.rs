//! Front-point unicycle kinematics, tracking controller and reference paths.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use crate::block::NormOrder;
use crate::set::ConvexSetCCG;
use crate::uncertain::VertexAffineMap;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnicycleState {
    pub p: f64,
    pub q: f64,
    /// Heading in (-π, π].
    pub theta: f64,
}

impl UnicycleState {
    pub fn new(p: f64, q: f64, theta: f64) -> Self {
        UnicycleState {
            p,
            q,
            theta: wrap_angle(theta),
        }
    }

    pub fn position(&self) -> Vector2<f64> {
        Vector2::new(self.p, self.q)
    }
}

/// Wraps an angle to (-π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = libm::fmod(theta, 2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// `[[cos θ, -l sin θ], [sin θ, l cos θ]]`, i.e. `Rot(θ) diag(1, l)`.
pub fn heading_matrix(theta: f64, l: f64) -> Matrix2<f64> {
    let (s, c) = (libm::sin(theta), libm::cos(theta));
    Matrix2::new(c, -l * s, s, l * c)
}

/// Position advances by `Ts A(θ) u`; heading by `Ts w`.
pub fn dynamics_step(s: &UnicycleState, u: Vector2<f64>, ts: f64, l: f64) -> UnicycleState {
    let next = s.position() + heading_matrix(s.theta, l) * u * ts;
    UnicycleState::new(next.x, next.y, s.theta + ts * u.y)
}

/// Tracking law `A(θ̂)⁻¹ / Ts · (τ(k+1) − τ(k)/2 − p̂/2 + d)`.
pub fn controller(
    measured_position: Vector2<f64>,
    measured_theta: f64,
    tau_k: Vector2<f64>,
    tau_next: Vector2<f64>,
    d: Vector2<f64>,
    ts: f64,
    l: f64,
) -> Vector2<f64> {
    let target = tau_next - tau_k * 0.5 - measured_position * 0.5 + d;
    // A(θ)⁻¹ = diag(1, 1/l) Rot(-θ); det A = l > 0
    let (s, c) = (libm::sin(measured_theta), libm::cos(measured_theta));
    let inv = Matrix2::new(c, s, -s / l, c / l);
    inv * target / ts
}

/// Position increment over one step for heading `theta`.
pub fn displacement(theta: f64, u: Vector2<f64>, ts: f64, l: f64) -> Vector2<f64> {
    heading_matrix(theta, l) * u * ts
}

/// Vertex maps covering the position increment under a heading error of at
/// most `delta`.
///
/// The increment `Ts A(θ̂ + e) u` traces an arc of radius
/// `r = Ts ‖diag(1, l) u‖` as `e` sweeps `[-δ, δ]`. The two chord end points
/// are the vertex translations; the returned ball of radius `r (1 - cos δ)`
/// covers the arc's bulge beyond the chord and must be Minkowski-added to the
/// propagated set.
pub fn build_vertex_maps(
    theta_hat: f64,
    delta: f64,
    u: Vector2<f64>,
    ts: f64,
    l: f64,
) -> (Vec<VertexAffineMap>, ConvexSetCCG) {
    let vertices: Vec<VertexAffineMap> = [theta_hat - delta, theta_hat + delta]
        .iter()
        .map(|&th| {
            let t = displacement(th, u, ts, l);
            VertexAffineMap::translation(DVector::from_column_slice(t.as_slice()))
        })
        .collect();
    let radius = ts * Vector2::new(u.x, l * u.y).norm() * (1.0 - libm::cos(delta));
    let remainder = ConvexSetCCG::ball(DVector::zeros(2), radius, NormOrder::Two);
    (vertices, remainder)
}

/// Reference path family.
#[derive(Clone, Debug, PartialEq)]
pub enum TrajectorySpec {
    /// `center + (A₁ sin(ωt), A₂ sin(2ωt))`.
    Figure8 {
        center: [f64; 2],
        amplitudes: [f64; 2],
        omega: f64,
    },
    /// `center + (r₀ + growth·t)(cos ωt, sin ωt)`.
    Spiral {
        center: [f64; 2],
        r0: f64,
        growth: f64,
        omega: f64,
    },
}

impl TrajectorySpec {
    pub fn default_figure8() -> Self {
        TrajectorySpec::Figure8 {
            center: [14.0, 17.0],
            amplitudes: [12.0, 10.0],
            omega: 2.0 * PI / 15.0,
        }
    }

    pub fn default_spiral() -> Self {
        TrajectorySpec::Spiral {
            center: [14.0, 17.0],
            r0: 2.0,
            growth: 0.8,
            omega: 4.0 * PI / 15.0,
        }
    }
}

/// Waypoint `τ(k)`.
pub fn reference(spec: &TrajectorySpec, k: usize, ts: f64) -> Vector2<f64> {
    let t = k as f64 * ts;
    match *spec {
        TrajectorySpec::Figure8 {
            center,
            amplitudes,
            omega,
        } => Vector2::new(
            center[0] + amplitudes[0] * libm::sin(omega * t),
            center[1] + amplitudes[1] * libm::sin(2.0 * omega * t),
        ),
        TrajectorySpec::Spiral {
            center,
            r0,
            growth,
            omega,
        } => {
            let r = r0 + growth * t;
            Vector2::new(
                center[0] + r * libm::cos(omega * t),
                center[1] + r * libm::sin(omega * t),
            )
        }
    }
}

/// Column-major `2×2` copy for the dynamic-size set algebra.
pub fn to_dmatrix(m: &Matrix2<f64>) -> DMatrix<f64> {
    DMatrix::from_column_slice(2, 2, m.as_slice())
}

/// `[p, q]` as a dynamic vector.
pub fn position_vector(s: &UnicycleState) -> DVector<f64> {
    DVector::from_vec(vec![s.p, s.q])
}
