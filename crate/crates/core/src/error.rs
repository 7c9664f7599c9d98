use thiserror::Error;

use crate::graph::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("edge set contains a cycle through ({0}, {1})")]
    NotAForest(VertexId, VertexId),

    #[error("bandwidth violation: {0}")]
    Bandwidth(String),

    #[error("IDT precondition: node {node} sends {count} messages (limit {limit})")]
    IdtSend { node: VertexId, count: usize, limit: usize },

    #[error("IDT precondition: node {node} receives {count} messages (limit {limit})")]
    IdtRecv { node: VertexId, count: usize, limit: usize },

    #[error("sort precondition: node {node} holds {count} keys (limit {limit})")]
    SortOverflow { node: VertexId, count: usize, limit: usize },

    #[error("aggregation precondition: leader {leader} has {count} distinct keys (limit {limit})")]
    AggOverflow {
        leader: VertexId,
        count: usize,
        limit: usize,
    },

    #[error("dissemination of {count} items exceeds node count {limit}")]
    DisseminationOverflow { count: usize, limit: usize },

    #[error("supporter capacity exceeded: {needed} supporters requested from {n} nodes")]
    Capacity { needed: usize, n: usize },

    /// A runtime check that turns a high-probability bound into a hard limit.
    #[error("bound `{check}` violated (seed {seed}): {detail}")]
    Bound {
        check: &'static str,
        seed: u64,
        detail: String,
    },

    #[error("cluster separation violated for cluster {leader}: internal {internal} >= outgoing {outgoing}")]
    ClusterSeparation {
        leader: VertexId,
        internal: String,
        outgoing: String,
    },

    #[error("nodes disagree on {0}")]
    NodesDisagree(&'static str),

    #[error("squaring strategy produced a non-MST edge ({0}, {1})")]
    SquaringDivergence(VertexId, VertexId),
}

impl Error {
    /// Stable snake_case name used in `violations` lists.
    pub fn violation_name(&self) -> &'static str {
        match self {
            Error::InvalidGraph(_) => "invalid_graph",
            Error::Parse { .. } => "parse_error",
            Error::Io(_) => "io_error",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NotAForest(..) => "not_a_forest",
            Error::Bandwidth(_) => "bandwidth_violation",
            Error::IdtSend { .. } => "idt_send_overflow",
            Error::IdtRecv { .. } => "idt_recv_overflow",
            Error::SortOverflow { .. } => "sort_overflow",
            Error::AggOverflow { .. } => "agg_overflow",
            Error::DisseminationOverflow { .. } => "dissemination_overflow",
            Error::Capacity { .. } => "supporter_capacity",
            Error::Bound { check, .. } => check,
            Error::ClusterSeparation { .. } => "cluster_separation",
            Error::NodesDisagree(_) => "nodes_disagree",
            Error::SquaringDivergence(..) => "squaring_divergence",
        }
    }

    /// True for the primitive-precondition family (routing, sorting,
    /// aggregation, dissemination, bandwidth).
    pub fn is_load_violation(&self) -> bool {
        matches!(
            self,
            Error::Bandwidth(_)
                | Error::IdtSend { .. }
                | Error::IdtRecv { .. }
                | Error::SortOverflow { .. }
                | Error::AggOverflow { .. }
                | Error::DisseminationOverflow { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
