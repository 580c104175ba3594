pub mod ballpot;
pub mod centers;
pub mod engine;
pub mod optimize;
pub mod quadrature;
pub mod rings;
pub mod shapes;
pub mod specfun;
