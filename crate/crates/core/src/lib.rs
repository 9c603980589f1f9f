//! Local dynamics, bifurcations and chaos of the discrete tri-trophic map
//! F(x, y, z) = (μx(1−x−y−z), βy(x−z), λyz).

pub mod arnold_tongue;
pub mod classification;
pub mod codim1;
pub mod core_map;
pub mod dynamics_lab;
pub mod fixed_points;
pub mod marotto_chaos;
pub mod resonance;
mod normal_form;
pub mod spectra;

pub use core_map::{iterate, jacobian, step, Matrix3, OrbitSeries, ParamError, ParamPoint, State3};
pub use fixed_points::{fixed_points, FixedPointId, FixedPointRecord};
