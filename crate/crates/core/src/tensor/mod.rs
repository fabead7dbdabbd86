//! Tensors at a point: metric fields and their jets, the Levi-Civita
//! connection and curvature, and the pencil objects built from a pair.

mod connection;
mod metric;
mod pencil;
mod value;

pub use connection::{
    christoffel, connection_from_jet, curvature, curvature_from_jet, riemann, Connection, Curvature,
};
pub use metric::{lambda_combination, MetricField, MetricJet, MetricPair, PencilSample};
pub use pencil::{affinor, m_tensor, nijenhuis, nijenhuis_of, obstruction_from, Obstruction, PairJets};
pub use value::{TensorValue, Variance};
