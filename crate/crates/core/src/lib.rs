pub mod bridge;
pub mod census;
pub mod exact;
pub mod fulvene;
pub mod graphs;
pub mod invert;
pub mod spectra;
