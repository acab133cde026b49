use rand::{Rng, RngCore};

use super::{Discretizer, EnvStep, Environment};
use crate::error::{check_index, Error, Result};

pub const PUSH_LEFT: usize = 0;
pub const PUSH_RIGHT: usize = 1;

/// `[x, x_dot, theta, theta_dot]` in m, m/s, rad, rad/s.
pub type PhysicalState = [f64; 4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartPoleParams {
    pub gravity: f64,
    pub cart_mass: f64,
    pub pole_mass: f64,
    /// Half the pole length.
    pub half_length: f64,
    pub force: f64,
    /// Euler step in seconds.
    pub tau: f64,
    pub x_threshold: f64,
    pub theta_threshold: f64,
}

impl Default for CartPoleParams {
    fn default() -> Self {
        Self {
            gravity: 9.8,
            cart_mass: 1.0,
            pole_mass: 0.1,
            half_length: 0.5,
            force: 10.0,
            tau: 0.02,
            x_threshold: 2.4,
            theta_threshold: 12.0_f64.to_radians(),
        }
    }
}

/// Classic cart-pole balancing task with explicit Euler integration. Every
/// step, including the failing one, pays reward 1.
#[derive(Debug, Clone)]
pub struct CartPole {
    params: CartPoleParams,
    discretizer: Discretizer,
    state: PhysicalState,
    done: bool,
}

impl CartPole {
    pub fn new(params: CartPoleParams, discretizer: Discretizer) -> Result<Self> {
        if discretizer.dims() != 4 {
            return Err(Error::Config(
                "cart pole discretizer needs 4 dimensions".into(),
            ));
        }
        Ok(Self {
            params,
            discretizer,
            state: [0.0; 4],
            done: false,
        })
    }

    /// 6 x 6 x 12 x 12 bins over position, velocity, angle and angular
    /// velocity: 5184 states.
    pub fn default_discretizer() -> Discretizer {
        let theta = 12.0_f64.to_radians();
        Discretizer::uniform(
            &[(-2.4, 2.4), (-3.0, 3.0), (-theta, theta), (-3.5, 3.5)],
            &[6, 6, 12, 12],
        )
        .expect("default bins are valid")
    }

    pub fn with_defaults() -> Self {
        Self::new(CartPoleParams::default(), Self::default_discretizer())
            .expect("defaults are valid")
    }

    pub fn params(&self) -> &CartPoleParams {
        &self.params
    }

    pub fn discretizer(&self) -> &Discretizer {
        &self.discretizer
    }

    pub fn physical(&self) -> PhysicalState {
        self.state
    }

    pub fn set_physical(&mut self, state: PhysicalState) {
        self.state = state;
        self.done = false;
    }

    pub fn state_id(&self) -> usize {
        self.discretizer.discretize(&self.state)
    }

    fn integrate(&self, action: usize) -> PhysicalState {
        let p = &self.params;
        let [x, x_dot, theta, theta_dot] = self.state;
        let force = if action == PUSH_RIGHT {
            p.force
        } else {
            -p.force
        };
        let (sin, cos) = theta.sin_cos();
        let total_mass = p.cart_mass + p.pole_mass;
        let pole_ml = p.pole_mass * p.half_length;
        let temp = (force + pole_ml * theta_dot * theta_dot * sin) / total_mass;
        let theta_acc = (p.gravity * sin - cos * temp)
            / (p.half_length * (4.0 / 3.0 - p.pole_mass * cos * cos / total_mass));
        let x_acc = temp - pole_ml * theta_acc * cos / total_mass;
        [
            x + p.tau * x_dot,
            x_dot + p.tau * x_acc,
            theta + p.tau * theta_dot,
            theta_dot + p.tau * theta_acc,
        ]
    }
}

impl Environment for CartPole {
    fn num_states(&self) -> usize {
        self.discretizer.total_states()
    }

    fn num_actions(&self) -> usize {
        2
    }

    fn r_max(&self) -> f64 {
        1.0
    }

    fn reset(&mut self, rng: &mut dyn RngCore) -> usize {
        for v in &mut self.state {
            *v = rng.random_range(-0.05..=0.05);
        }
        self.done = false;
        self.state_id()
    }

    fn step(&mut self, action: usize, _rng: &mut dyn RngCore) -> Result<EnvStep> {
        if self.done {
            return Err(Error::StepAfterDone);
        }
        check_index("action", action, 2)?;
        let next = self.integrate(action);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(next));
        }
        self.state = next;
        self.done =
            next[0].abs() > self.params.x_threshold || next[2].abs() > self.params.theta_threshold;
        Ok(EnvStep {
            next_state: self.state_id(),
            reward: 1.0,
            done: self.done,
        })
    }
}
