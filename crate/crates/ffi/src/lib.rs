//! C ABI over the simulator.
//!
//! Every entry point returns a [`CsStatus`]; on failure a message is kept
//! per thread and can be read with [`cs_last_error_message`]. Handles are
//! opaque and must be released with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use clique_sim::connectivity::conn;
use clique_sim::graph::{parse_graph, Edge, Forest, Graph, Weight};
use clique_sim::mst::exact_mst;
use clique_sim::net::{CcMstStrategy, RoundMetrics, SimConfig, Simulator};
use clique_sim::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidGraph = 3,
    /// A routing, sorting or aggregation precondition was violated.
    LoadViolation = 4,
    /// A runtime bound or correctness assertion failed.
    AssertionFailed = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStrategy {
    SafeBoruvka = 0,
    Squaring = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsConfig {
    pub seed: u64,
    pub route_cost: u64,
    pub sort_cost: u64,
    pub agg_cost: u64,
    pub c_sample: f64,
    pub strategy: CsStrategy,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsEdge {
    pub u: u32,
    pub v: u32,
    pub w: u64,
}

/// Opaque graph handle.
pub struct CsGraph {
    graph: Graph,
}

/// Opaque result handle: a forest plus the run's metrics.
pub struct CsResult {
    forest: Forest,
    metrics_json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(err: &Error) -> CsStatus {
    match err {
        Error::InvalidGraph(_) | Error::Parse { .. } | Error::NotAForest(..) => CsStatus::InvalidGraph,
        Error::InvalidArgument(_) | Error::Io(_) => CsStatus::InvalidArgument,
        e if e.is_load_violation() => CsStatus::LoadViolation,
        _ => CsStatus::AssertionFailed,
    }
}

fn guard(body: impl FnOnce() -> Result<(), (CsStatus, String)>) -> CsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            CsStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            CsStatus::Panic
        }
    }
}

fn lift(err: Error) -> (CsStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (CsStatus, String) {
    (CsStatus::NullPointer, format!("{what} is null"))
}

impl CsConfig {
    fn to_sim(self, n: usize) -> SimConfig {
        let mut c = SimConfig::new(n, self.seed);
        c.route_cost = self.route_cost;
        c.sort_cost = self.sort_cost;
        c.agg_cost = self.agg_cost;
        c.c_sample = self.c_sample;
        c.ccmst_strategy = match self.strategy {
            CsStrategy::SafeBoruvka => CcMstStrategy::SafeBoruvka,
            CsStrategy::Squaring => CcMstStrategy::Squaring,
        };
        c
    }
}

/// Fills `out` with the library defaults and the given seed.
///
/// # Safety
/// `out` must point to writable memory for one `CsConfig`.
#[no_mangle]
pub unsafe extern "C" fn cs_config_default(seed: u64, out: *mut CsConfig) -> CsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let d = SimConfig::new(1, seed);
        out.write(CsConfig {
            seed,
            route_cost: d.route_cost,
            sort_cost: d.sort_cost,
            agg_cost: d.agg_cost,
            c_sample: d.c_sample,
            strategy: CsStrategy::SafeBoruvka,
        });
        Ok(())
    })
}

/// Builds a graph on `n` vertices from `m` edges.
///
/// # Safety
/// `edges` must point to `m` readable `CsEdge` values (it may be null when
/// `m` is zero) and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_graph_new(n: usize, edges: *const CsEdge, m: usize, out: *mut *mut CsGraph) -> CsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if edges.is_null() && m > 0 {
            return Err(null("edges"));
        }
        let raw = if m == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(edges, m)
        };
        let mut list = Vec::with_capacity(m);
        for e in raw {
            list.push(Edge::new(e.u as usize, e.v as usize, Weight::new(e.w).map_err(lift)?));
        }
        let graph = Graph::from_edges(n, list).map_err(lift)?;
        out.write(Box::into_raw(Box::new(CsGraph { graph })));
        Ok(())
    })
}

/// Parses the plain-text `n m` / `u v [w]` format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_graph_parse(text: *const c_char, out: *mut *mut CsGraph) -> CsStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| (CsStatus::InvalidArgument, "text is not UTF-8".to_string()))?;
        let graph = parse_graph(s).map_err(lift)?;
        out.write(Box::into_raw(Box::new(CsGraph { graph })));
        Ok(())
    })
}

/// # Safety
/// `graph` must come from `cs_graph_new` or `cs_graph_parse` and not have
/// been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cs_graph_free(graph: *mut CsGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cs_graph_vertex_count(graph: *const CsGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.n())
}

/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cs_graph_edge_count(graph: *const CsGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.m())
}

unsafe fn run_with(
    graph: *const CsGraph,
    config: *const CsConfig,
    out: *mut *mut CsResult,
    algo: fn(&mut Simulator, &Graph) -> clique_sim::Result<Forest>,
) -> CsStatus {
    guard(|| {
        let g = &graph.as_ref().ok_or_else(|| null("graph"))?.graph;
        let config = config.as_ref().ok_or_else(|| null("config"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let mut sim = Simulator::with_graph(config.to_sim(g.n()), g).map_err(lift)?;
        let forest = algo(&mut sim, g).map_err(lift)?;
        let metrics_json = metrics_to_cstring(sim.metrics());
        out.write(Box::into_raw(Box::new(CsResult { forest, metrics_json })));
        Ok(())
    })
}

fn metrics_to_cstring(m: &RoundMetrics) -> CString {
    CString::new(serde_json::to_string(m).expect("metrics serialize")).expect("JSON has no NUL")
}

/// Maximal spanning forest by the three-phase connectivity algorithm.
///
/// # Safety
/// `graph` and `config` must be live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_conn(graph: *const CsGraph, config: *const CsConfig, out: *mut *mut CsResult) -> CsStatus {
    run_with(graph, config, out, |sim, g| conn(sim, g).map(|o| o.forest))
}

/// Exact minimum spanning forest.
///
/// # Safety
/// `graph` and `config` must be live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_exact_mst(
    graph: *const CsGraph,
    config: *const CsConfig,
    out: *mut *mut CsResult,
) -> CsStatus {
    run_with(graph, config, out, |sim, g| exact_mst(sim, g).map(|o| o.forest))
}

/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cs_result_edge_count(result: *const CsResult) -> usize {
    result.as_ref().map_or(0, |r| r.forest.len())
}

/// Copies the forest edges, sorted by `(w, u, v)`, into `buf`.
///
/// # Safety
/// `result` must be live and `buf` must have room for `cap` edges.
#[no_mangle]
pub unsafe extern "C" fn cs_result_edges(result: *const CsResult, buf: *mut CsEdge, cap: usize) -> CsStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        let edges = r.forest.edges();
        if edges.len() > cap {
            return Err((
                CsStatus::BufferTooSmall,
                format!("{} edges do not fit in {cap}", edges.len()),
            ));
        }
        if buf.is_null() && !edges.is_empty() {
            return Err(null("buf"));
        }
        for (k, e) in edges.iter().enumerate() {
            buf.add(k).write(CsEdge {
                u: e.u as u32,
                v: e.v as u32,
                w: e.w.raw(),
            });
        }
        Ok(())
    })
}

/// Round metrics as a JSON string. Release with `cs_string_free`.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cs_result_metrics_json(result: *const CsResult) -> *mut c_char {
    match result.as_ref() {
        Some(r) => r.metrics_json.clone().into_raw(),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `result` must come from `cs_conn` or `cs_exact_mst`, or be null.
#[no_mangle]
pub unsafe extern "C" fn cs_result_free(result: *mut CsResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn cs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, empty after a
/// success. Release with `cs_string_free`.
#[no_mangle]
pub extern "C" fn cs_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().clone().into_raw())
}
