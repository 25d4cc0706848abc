//! Planar n-link swimmer in a viscous fluid.
//!
//! Generalized coordinates are `q = (x, y, θ_1..θ_n)`: the head position and
//! the absolute angle of every link. Link `k` starts at `p_k` and extends
//! backwards, `p_{k+1} = p_k - L·(cos θ_k, sin θ_k)`, so the resting body lies
//! along -x behind a head facing +x.
//!
//! Each link feels slender-body drag per unit length, `-k_t·v_∥` along the link
//! and `-k_n·v_⊥` across it. Integrating over all links gives a configuration
//! dependent damping matrix `C(q)` with `Q_drag = -C(q)·q̇`. The mass matrix
//! is a constant diagonal: total mass on the head coordinates and, for link
//! `k`, its own moment about its front end plus the links it drags behind it
//! treated as point masses at distance `L`.
//!
//! One step of semi-implicit Euler solves `(M + dt·C)·q̇' = M·q̇ + dt·Q_τ` and
//! then sets `q' = q + dt·q̇'`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{rollout, EnvError, Environment, Task, TaskError, Transition};
use crate::network::{CompiledNetwork, Genome, NetworkSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwimmerConfig {
    pub links: usize,
    /// m
    pub link_length: f64,
    /// kg
    pub link_mass: f64,
    /// N·s/m per unit length, across the link.
    pub k_normal: f64,
    /// N·s/m per unit length, along the link.
    pub k_tangent: f64,
    /// N·m at |action| = 1.
    pub max_torque: f64,
    /// s
    pub dt: f64,
    pub episode_length: usize,
}

impl Default for SwimmerConfig {
    fn default() -> Self {
        SwimmerConfig {
            links: 6,
            link_length: 0.1,
            link_mass: 0.01,
            k_normal: 10.0,
            k_tangent: 0.1,
            max_torque: 0.05,
            dt: 0.01,
            episode_length: 1000,
        }
    }
}

impl SwimmerConfig {
    pub fn joints(&self) -> usize {
        self.links - 1
    }

    pub fn obs_dim(&self) -> usize {
        2 * self.joints()
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        let positive = [
            ("link_length", self.link_length),
            ("link_mass", self.link_mass),
            ("max_torque", self.max_torque),
            ("dt", self.dt),
        ];
        if self.links < 2 {
            return Err(EnvError::Config("the swimmer needs at least 2 links".into()));
        }
        if self.episode_length == 0 {
            return Err(EnvError::Config("`episode_length` must be at least 1".into()));
        }
        for (name, x) in positive {
            if !(x > 0.0 && x.is_finite()) {
                return Err(EnvError::Config(format!("`{name}` must be positive, got {x}")));
            }
        }
        for (name, x) in [("k_normal", self.k_normal), ("k_tangent", self.k_tangent)] {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(EnvError::Config(format!("`{name}` must be non-negative, got {x}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Swimmer {
    cfg: SwimmerConfig,
    mass: DVector<f64>,
    q: DVector<f64>,
    qd: DVector<f64>,
    t: usize,
}

impl Swimmer {
    pub fn new(cfg: SwimmerConfig) -> Result<Self, EnvError> {
        cfg.validate()?;
        let n = cfg.links;
        let (m, l) = (cfg.link_mass, cfg.link_length);
        let mut mass = DVector::zeros(n + 2);
        mass[0] = n as f64 * m;
        mass[1] = n as f64 * m;
        for k in 0..n {
            let behind = (n - 1 - k) as f64;
            mass[2 + k] = m * l * l / 3.0 + behind * m * l * l;
        }
        Ok(Swimmer { cfg, mass, q: DVector::zeros(n + 2), qd: DVector::zeros(n + 2), t: 0 })
    }

    pub fn config(&self) -> &SwimmerConfig {
        &self.cfg
    }

    /// Generalized coordinates `(x, y, θ_1..θ_n)`.
    pub fn coordinates(&self) -> &[f64] {
        self.q.as_slice()
    }

    pub fn velocities(&self) -> &[f64] {
        self.qd.as_slice()
    }

    pub fn time_index(&self) -> usize {
        self.t
    }

    /// Places the swimmer in an arbitrary state; the episode clock restarts.
    pub fn set_state(&mut self, q: &[f64], qd: &[f64]) -> Result<(), EnvError> {
        let dim = self.cfg.links + 2;
        if q.len() != dim || qd.len() != dim {
            return Err(EnvError::Config(format!("state vectors must have {dim} entries")));
        }
        if q.iter().chain(qd).any(|x| !x.is_finite()) {
            return Err(EnvError::NonFiniteState);
        }
        self.q = DVector::from_column_slice(q);
        self.qd = DVector::from_column_slice(qd);
        self.t = 0;
        Ok(())
    }

    /// `½·q̇ᵀ·M·q̇` under the model's mass matrix.
    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.qd.iter().zip(self.mass.iter()).map(|(v, m)| m * v * v).sum::<f64>()
    }

    fn observation(&self) -> Vec<f64> {
        let j = self.cfg.joints();
        let mut obs = Vec::with_capacity(2 * j);
        obs.extend((0..j).map(|i| self.q[3 + i] - self.q[2 + i]));
        obs.extend((0..j).map(|i| self.qd[3 + i] - self.qd[2 + i]));
        obs
    }

    /// Adds `dt·C(q)` to `out`, where `C` integrates `JᵀDJ` along every link.
    ///
    /// The Jacobian of a point at distance `s` behind the front of link `k`
    /// has constant columns for the head and the links in front of it and the
    /// column `-s·n_k` for the link itself, so the integral is a closed form
    /// in `L`, `L²/2` and `L³/3`.
    fn add_damping(&self, dt: f64, out: &mut DMatrix<f64>) {
        let n = self.cfg.links;
        let l = self.cfg.link_length;
        let (kt, kn) = (self.cfg.k_tangent, self.cfg.k_normal);
        let normals: Vec<[f64; 2]> = (0..n)
            .map(|k| {
                let (sin, cos) = self.q[2 + k].sin_cos();
                [-sin, cos]
            })
            .collect();
        let mut cols: Vec<[f64; 2]> = Vec::with_capacity(n + 1);
        for k in 0..n {
            let [nx, ny] = normals[k];
            let (tx, ty) = (ny, -nx);
            let d = [kt * tx * tx + kn * nx * nx, kt * tx * ty + kn * nx * ny, kt * ty * ty + kn * ny * ny];
            let quad = |a: [f64; 2], b: [f64; 2]| a[0] * (d[0] * b[0] + d[1] * b[1]) + a[1] * (d[1] * b[0] + d[2] * b[1]);
            cols.clear();
            cols.push([1.0, 0.0]);
            cols.push([0.0, 1.0]);
            cols.extend(normals[..k].iter().map(|&[x, y]| [-l * x, -l * y]));
            let own = [-nx, -ny];
            for (i, &a) in cols.iter().enumerate() {
                for (j, &b) in cols.iter().enumerate().take(i + 1) {
                    let c = dt * l * quad(a, b);
                    out[(i, j)] += c;
                    if j != i {
                        out[(j, i)] += c;
                    }
                }
                let cross = dt * 0.5 * l * l * quad(a, own);
                out[(i, 2 + k)] += cross;
                out[(2 + k, i)] += cross;
            }
            out[(2 + k, 2 + k)] += dt * l * l * l / 3.0 * kn;
        }
    }
}

impl Environment for Swimmer {
    fn obs_dim(&self) -> usize {
        self.cfg.obs_dim()
    }

    fn action_dim(&self) -> usize {
        self.cfg.joints()
    }

    fn episode_length(&self) -> usize {
        self.cfg.episode_length
    }

    /// Straight body along the x axis at rest; the seed has no effect.
    fn reset(&mut self, _seed: u64) -> Vec<f64> {
        self.q.fill(0.0);
        self.qd.fill(0.0);
        self.t = 0;
        self.observation()
    }

    fn step(&mut self, action: &[f64]) -> Result<Transition, EnvError> {
        if self.t >= self.cfg.episode_length {
            return Err(EnvError::EpisodeOver);
        }
        let joints = self.cfg.joints();
        if action.len() != joints {
            return Err(EnvError::ActionDimension { expected: joints, got: action.len() });
        }
        if let Some(i) = action.iter().position(|a| !a.is_finite()) {
            return Err(EnvError::NonFiniteAction(i));
        }
        let dt = self.cfg.dt;
        let mut rhs = self.qd.component_mul(&self.mass);
        for (j, a) in action.iter().enumerate() {
            let tau = a.clamp(-1.0, 1.0) * self.cfg.max_torque;
            rhs[2 + j] -= dt * tau;
            rhs[3 + j] += dt * tau;
        }
        let mut lhs = DMatrix::from_diagonal(&self.mass);
        self.add_damping(dt, &mut lhs);
        let qd = lhs.cholesky().ok_or(EnvError::NonFiniteState)?.solve(&rhs);
        if qd.iter().any(|v| !v.is_finite()) {
            return Err(EnvError::NonFiniteState);
        }
        let x_before = self.q[0];
        self.q.axpy(dt, &qd, 1.0);
        self.qd = qd;
        self.t += 1;
        Ok(Transition {
            obs: self.observation(),
            reward: self.q[0] - x_before,
            done: self.t >= self.cfg.episode_length,
        })
    }
}

/// Fitness is the net forward displacement of the head over one episode.
#[derive(Debug, Clone)]
pub struct SwimmerTask {
    pub spec: Arc<NetworkSpec>,
    pub cfg: SwimmerConfig,
}

impl Task for SwimmerTask {
    fn evaluate(&self, genome: &Genome, _rng: &mut ChaCha8Rng) -> Result<f64, TaskError> {
        let net = CompiledNetwork::new(&self.spec, genome)?;
        let mut env = Swimmer::new(self.cfg)?;
        if net.obs_dim() != env.obs_dim() || net.action_dim() != env.action_dim() {
            return Err(TaskError::Contract(format!(
                "policy maps {} -> {} but the swimmer needs {} -> {}",
                net.obs_dim(),
                net.action_dim(),
                env.obs_dim(),
                env.action_dim()
            )));
        }
        rollout(&mut env, &net, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn swimmer() -> Swimmer {
        Swimmer::new(SwimmerConfig::default()).unwrap()
    }

    #[test]
    fn reset_is_the_straight_rest_pose() {
        let mut s = swimmer();
        assert_eq!(s.obs_dim(), 10);
        assert_eq!(s.reset(3), vec![0.0; 10]);
        let a = (s.coordinates().to_vec(), s.velocities().to_vec());
        s.reset(3);
        assert_eq!((s.coordinates().to_vec(), s.velocities().to_vec()), a);
    }

    #[test]
    fn rest_is_a_fixed_point() {
        let mut s = swimmer();
        s.reset(0);
        for _ in 0..50 {
            let t = s.step(&[0.0; 5]).unwrap();
            assert_eq!(t.reward, 0.0);
            assert_eq!(t.obs, vec![0.0; 10]);
        }
        assert!(s.coordinates().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn episode_ends_and_then_refuses_steps() {
        let cfg = SwimmerConfig { episode_length: 3, ..SwimmerConfig::default() };
        let mut s = Swimmer::new(cfg).unwrap();
        s.reset(0);
        assert!(!s.step(&[0.0; 5]).unwrap().done);
        assert!(!s.step(&[0.0; 5]).unwrap().done);
        assert!(s.step(&[0.0; 5]).unwrap().done);
        assert_eq!(s.step(&[0.0; 5]), Err(EnvError::EpisodeOver));
    }

    #[test]
    fn bad_actions_are_rejected() {
        let mut s = swimmer();
        s.reset(0);
        assert_eq!(s.step(&[0.0; 4]), Err(EnvError::ActionDimension { expected: 5, got: 4 }));
        assert_eq!(s.step(&[0.0, f64::NAN, 0.0, 0.0, 0.0]), Err(EnvError::NonFiniteAction(1)));
    }

    #[test]
    fn joint_torque_bends_the_body_and_saturates() {
        let mut a = swimmer();
        let mut b = swimmer();
        a.reset(0);
        b.reset(0);
        let ta = a.step(&[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let tb = b.step(&[7.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(ta.obs[0] > 0.0);
        assert_eq!(ta, tb);
    }

    #[test]
    fn travelling_wave_produces_net_motion() {
        let mut s = swimmer();
        s.reset(0);
        let mut x = 0.0;
        for t in 0..1000 {
            let phase = t as f64 * 0.01 * 2.0 * std::f64::consts::PI;
            let action: Vec<f64> = (0..5).map(|j| (phase - j as f64 * 0.8).sin()).collect();
            x += s.step(&action).unwrap().reward;
        }
        assert!(x.abs() > 1e-2, "displacement {x}");
        assert!((x - s.coordinates()[0]).abs() < 1e-12);
    }

    #[test]
    fn drag_dissipates_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut s = swimmer();
        for _ in 0..20 {
            let q: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
            let qd: Vec<f64> = (0..8).map(|_| rng.random_range(-2.0..2.0)).collect();
            s.set_state(&q, &qd).unwrap();
            let mut e = s.kinetic_energy();
            for _ in 0..20 {
                s.step(&[0.0; 5]).unwrap();
                let next = s.kinetic_energy();
                assert!(next <= e * (1.0 + 1e-12), "{next} > {e}");
                e = next;
            }
        }
    }

    #[test]
    fn closed_form_damping_matches_quadrature() {
        let cfg = SwimmerConfig { k_tangent: 0.7, ..SwimmerConfig::default() };
        let mut s = Swimmer::new(cfg).unwrap();
        let q = [0.3, -0.1, 0.4, -0.9, 1.7, 0.2, -2.5, 3.0];
        s.set_state(&q, &[0.0; 8]).unwrap();
        let mut closed = DMatrix::zeros(8, 8);
        s.add_damping(1.0, &mut closed);

        let (l, steps) = (cfg.link_length, 4000);
        let mut numeric = DMatrix::<f64>::zeros(8, 8);
        for k in 0..cfg.links {
            let t = nalgebra::Vector2::new(q[2 + k].cos(), q[2 + k].sin());
            let nrm = nalgebra::Vector2::new(-q[2 + k].sin(), q[2 + k].cos());
            let d = t * t.transpose() * cfg.k_tangent + nrm * nrm.transpose() * cfg.k_normal;
            for i in 0..steps {
                let s_along = (i as f64 + 0.5) * l / steps as f64;
                let mut jac = DMatrix::<f64>::zeros(2, 8);
                jac[(0, 0)] = 1.0;
                jac[(1, 1)] = 1.0;
                for j in 0..k {
                    jac[(0, 2 + j)] = l * q[2 + j].sin();
                    jac[(1, 2 + j)] = -l * q[2 + j].cos();
                }
                jac[(0, 2 + k)] = s_along * q[2 + k].sin();
                jac[(1, 2 + k)] = -s_along * q[2 + k].cos();
                numeric += jac.transpose() * &d * &jac * (l / steps as f64);
            }
        }
        assert!((&closed - &numeric).amax() < 1e-8, "{}", (&closed - &numeric).amax());
        assert!((&closed - closed.transpose()).amax() == 0.0);
    }

    #[test]
    fn invalid_config() {
        assert!(Swimmer::new(SwimmerConfig { links: 1, ..SwimmerConfig::default() }).is_err());
        assert!(Swimmer::new(SwimmerConfig { dt: 0.0, ..SwimmerConfig::default() }).is_err());
        assert!(Swimmer::new(SwimmerConfig { k_normal: -1.0, ..SwimmerConfig::default() }).is_err());
    }
}
