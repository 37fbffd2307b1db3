pub mod circuit;
pub mod complex;
pub mod dd;
pub mod error;
pub mod export;
pub mod ops;
pub mod oracle;
pub mod package;

pub use circuit::{Circuit, Gate, GateKind};
pub use complex::{ComplexNumbers, ComplexValue, RealHandle, TableMode};
pub use dd::{Edge, Kind, NodeId};
pub use error::{Error, Result};
pub use ops::Matrix2;
pub use package::{Config, Package, PackageStats};
