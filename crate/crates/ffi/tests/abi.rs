use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use clique_sim_ffi::*;

fn take_string(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { cs_string_free(p) };
    s
}

fn config(seed: u64) -> CsConfig {
    let mut c = std::mem::MaybeUninit::uninit();
    assert_eq!(unsafe { cs_config_default(seed, c.as_mut_ptr()) }, CsStatus::Ok);
    unsafe { c.assume_init() }
}

#[test]
fn conn_through_the_c_api() {
    let edges = [
        CsEdge { u: 0, v: 1, w: 1 },
        CsEdge { u: 1, v: 2, w: 1 },
        CsEdge { u: 4, v: 5, w: 1 },
    ];
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { cs_graph_new(8, edges.as_ptr(), edges.len(), &mut g) },
        CsStatus::Ok
    );
    assert_eq!(unsafe { cs_graph_vertex_count(g) }, 8);
    assert_eq!(unsafe { cs_graph_edge_count(g) }, 3);

    let cfg = config(7);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { cs_conn(g, &cfg, &mut r) }, CsStatus::Ok);
    assert_eq!(unsafe { cs_result_edge_count(r) }, 3);
    let mut buf = [CsEdge { u: 0, v: 0, w: 0 }; 3];
    assert_eq!(unsafe { cs_result_edges(r, buf.as_mut_ptr(), 3) }, CsStatus::Ok);
    assert!(buf.contains(&CsEdge { u: 4, v: 5, w: 1 }));
    assert_eq!(
        unsafe { cs_result_edges(r, buf.as_mut_ptr(), 2) },
        CsStatus::BufferTooSmall
    );

    let json = take_string(unsafe { cs_result_metrics_json(r) });
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(v["rounds_total"].as_u64().unwrap() > 0);

    unsafe {
        cs_result_free(r);
        cs_graph_free(g);
    }
}

#[test]
fn exact_mst_through_the_c_api() {
    let text = CString::new("4 6\n0 1 4\n0 2 1\n0 3 6\n1 2 2\n1 3 5\n2 3 3\n").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { cs_graph_parse(text.as_ptr(), &mut g) }, CsStatus::Ok);
    let cfg = config(1);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { cs_exact_mst(g, &cfg, &mut r) }, CsStatus::Ok);
    let mut buf = [CsEdge { u: 0, v: 0, w: 0 }; 3];
    assert_eq!(unsafe { cs_result_edges(r, buf.as_mut_ptr(), 3) }, CsStatus::Ok);
    assert_eq!(
        buf,
        [
            CsEdge { u: 0, v: 2, w: 1 },
            CsEdge { u: 1, v: 2, w: 2 },
            CsEdge { u: 2, v: 3, w: 3 }
        ]
    );
    unsafe {
        cs_result_free(r);
        cs_graph_free(g);
    }
}

#[test]
fn errors_set_status_and_message() {
    let mut g = ptr::null_mut();
    let bad = [CsEdge { u: 0, v: 9, w: 1 }];
    assert_eq!(
        unsafe { cs_graph_new(4, bad.as_ptr(), 1, &mut g) },
        CsStatus::InvalidGraph
    );
    assert!(g.is_null());
    assert!(!take_string(cs_last_error_message()).is_empty());

    assert_eq!(
        unsafe { cs_graph_new(4, ptr::null(), 1, &mut g) },
        CsStatus::NullPointer
    );
    let text = CString::new("3 1\n0 x\n").unwrap();
    assert_eq!(unsafe { cs_graph_parse(text.as_ptr(), &mut g) }, CsStatus::InvalidGraph);

    assert_eq!(unsafe { cs_graph_new(4, ptr::null(), 0, &mut g) }, CsStatus::Ok);
    assert!(take_string(cs_last_error_message()).is_empty());
    let mut cfg = config(0);
    cfg.route_cost = 0;
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { cs_conn(g, &cfg, &mut r) }, CsStatus::InvalidArgument);
    assert_eq!(unsafe { cs_conn(ptr::null(), &cfg, &mut r) }, CsStatus::NullPointer);
    unsafe {
        cs_graph_free(g);
        cs_graph_free(ptr::null_mut());
        cs_result_free(ptr::null_mut());
        cs_string_free(ptr::null_mut());
    }
}

fn header_path() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/clique_sim.h")
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(header_path()).unwrap();
    for name in [
        "cs_config_default",
        "cs_graph_new",
        "cs_graph_parse",
        "cs_graph_free",
        "cs_graph_vertex_count",
        "cs_graph_edge_count",
        "cs_conn",
        "cs_exact_mst",
        "cs_result_edge_count",
        "cs_result_edges",
        "cs_result_metrics_json",
        "cs_result_free",
        "cs_string_free",
        "cs_last_error_message",
        "typedef struct CsGraph CsGraph",
        "typedef struct CsResult CsResult",
        "CS_STATUS_LOAD_VIOLATION = 4",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(header_path())
        .status()
    else {
        eprintln!("no C compiler available, skipping");
        return;
    };
    assert!(status.success());
}
