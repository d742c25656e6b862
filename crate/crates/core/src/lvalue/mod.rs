//! Central L-values: the AFE with cutoff `V`, a Hurwitz-zeta route, and the
//! Mellin transform identity behind the off-diagonal terms.

pub mod afe;
pub mod gamma;
pub mod hurwitz;
pub mod mellin;
pub mod vfunc;

pub use afe::{afe_moment_term, AfeKernel, AfeResult};
pub use gamma::{gamma_factor, ln_gamma, DIGAMMA_QUARTER, EULER_GAMMA, GAMMA_QUARTER};
pub use hurwitz::{hurwitz_zeta_half, l_central_hurwitz, HurwitzTable};
pub use mellin::{mellin_check, MellinCheck};
pub use vfunc::{v_of_x, v_of_x_at, VTable, VTableParams};
