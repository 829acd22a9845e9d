//! The three worked examples: a scalar system with exponential memory, a
//! 2D Brownian particle with retarded friction, and a transmission-line
//! resonator.

pub mod memory1d;
pub mod particle;
pub mod tl;

pub use memory1d::{model1d_convergence, model1d_exponent, ConvergenceRow, Memory1DModel};
pub use particle::{
    analytic_seed, equilibrium_spectrum, particle_effective_friction, particle_problem,
    particle_spectrum, BrownianParticleModel, ParticleAnalysis, ParticleSystem, Regime,
};
pub use tl::{tl_spectrum, TlResonatorModel};
