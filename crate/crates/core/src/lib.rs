pub mod acceptance;
pub mod critical;
pub mod exact;
pub mod hierarchy;
pub mod parallel;
pub mod toda;
pub mod wick;
pub mod quadrature;
pub mod equilibrium;
pub mod finite_n;
