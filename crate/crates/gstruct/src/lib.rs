pub mod exterior;
pub mod linalg;
pub mod scalar;
pub mod lie_frame;
pub mod space;
pub mod g_structures;
pub mod soliton;
pub mod reduction;
pub mod cli;
