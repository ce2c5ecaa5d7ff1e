//! Discrete curvature and structure of planar graphs given as combinatorial
//! maps: corner, vertex and face curvature, tessellation checks, embeddings
//! into tessellations, metric and isoperimetric quantities, and spectral
//! probes on finite truncations.

pub mod ball;
pub mod bigons;
pub mod error;
pub mod faces;
pub mod classify;
pub mod curvature;
pub mod embedding;
pub mod generate;
pub mod isoperimetry;
pub mod linalg;
pub mod io;
pub mod map;
pub mod metric;
pub mod polar;
pub mod rational;
pub mod spectral;

pub use ball::{ball, distances_from, BallDecomposition};
pub use error::{Error, Result};
pub use faces::{trace_faces, Corner, FaceId, FaceOrbit, FaceTable};
pub use generate::{generate, GeneratorKind, GeneratorSpec, Platonic};
pub use map::{CombinatorialMap, HalfEdge, HalfEdgeId, VertexId};
pub use rational::{Degree, FaceCurvature, FaceDegree, Rational};
pub use curvature::{gauss_bonnet, higuchi_gap, CurvatureReport, HiguchiOutcome};
pub use io::{parse_map, serialize_map};
pub use classify::{classify, Class, ClassificationResult};
pub use embedding::{closing_parameter, embed, verify_properties, EmbeddingResult};
pub use metric::{check_admissibility, cut_locus, growth_check, sphere_enumeration};
pub use bigons::{minimal_bigons, Bigon, BigonReport};
pub use isoperimetry::{cheeger_at_infinity_proxy, cheeger_bruteforce, cheeger_lower_bounds, CheegerEstimate, LowerBounds};
pub use spectral::{bottom_of_spectrum, laplacian, verify_spectral_bounds, LaplacianKind, SpectralReport};
pub use polar::{check_e_structure, finitely_supported_eigenfunctions, polar_decompose, NearestNeighborOperator, PolarOperator};
