pub mod ce;
pub mod exec;
pub mod lie;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod stability;

pub use exec::Exec;
