//! Ranked phylogenetic trees under the ranked nearest neighbour
//! interchange (RNNI) operation.
//!
//! - [`RankedTree`]: canonical cluster representation with validation.
//! - [`Move`], [`Rho`]: rank swaps and NNI moves, weighted by `rho`.
//! - [`find_path`], [`distance`]: shortest RNNI paths in O(n²).
//! - [`oracle`]: exhaustive enumeration and graph search for small `n`.
//! - [`io`]: cluster format, Newick and move-list text formats.
//!
//! ```
//! use rnni::{distance, io::parse_cluster_format};
//!
//! let t = parse_cluster_format("[{a1,a2},{a1,a2,a3},{a1,a2,a3,a4}]").unwrap();
//! let r = parse_cluster_format("[{a3,a4},{a2,a3,a4},{a1,a2,a3,a4}]").unwrap();
//! assert_eq!(distance(&t, &r).unwrap(), 3);
//! ```

pub mod cluster;
pub mod findpath;
pub mod generate;
pub mod io;
pub mod moves;
pub mod oracle;
pub mod tree;
pub mod verify;
pub mod work;

pub use cluster::Cluster;
pub use findpath::{distance, find_path, find_path_with, TreePath};
pub use moves::{Move, MoveError, MoveKind, Rho};
pub use tree::{LeafTable, Node, RankedTree, TreeError};
pub use work::{Step, WorkTree};
