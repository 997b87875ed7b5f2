//! C ABI over `vinfo`.
//!
//! Objects are opaque heap handles released with their `*_free` function.
//! Every fallible call returns a [`VisStatus`]; on failure the message is
//! kept per thread and can be copied out with [`vis_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use vinfo::analysis::{vi_series, ViSeries};
use vinfo::formation::{count_spaces, vif_for_transition};
use vinfo::ingest::{SampleStream, StreamConfig};
use vinfo::{node_contribution, vi, vi_rate, Clustering, NodeId, Profile};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VisStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidClustering = 3,
    Parse = 4,
    Computation = 5,
    Panic = 6,
}

pub const VIS_PROFILE_GENERIC: u32 = 0;
pub const VIS_PROFILE_SOCCER: u32 = 1;

/// A validated clustering.
pub struct VisClustering(Clustering);

/// A time-ordered stream of clusterings.
pub struct VisStream(SampleStream);

/// Per-transition VI rates of a stream.
pub struct VisSeries(ViSeries);

/// Space sizes for `n` nodes. Bell numbers are split into 64-bit halves.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VisSpaceCounts {
    pub n: u32,
    pub min_part: u32,
    pub partitions: u64,
    pub partitions_no_singletons: u64,
    pub bell_hi: u64,
    pub bell_lo: u64,
    pub bell_no_singletons_hi: u64,
    pub bell_no_singletons_lo: u64,
}

/// One transition, rates in bits per second.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VisViPoint {
    pub t: f64,
    pub dt: f64,
    pub total: f64,
    pub vif: f64,
    pub vic: f64,
    pub home: f64,
    pub visitor: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: VisStatus, msg: impl std::fmt::Display) -> VisStatus {
    set_error(msg.to_string());
    status
}

fn guard(f: impl FnOnce() -> VisStatus) -> VisStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == VisStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(VisStatus::Panic, "internal panic"),
    }
}

fn profile(code: u32) -> Option<Profile> {
    match code {
        VIS_PROFILE_GENERIC => Some(Profile::Generic),
        VIS_PROFILE_SOCCER => Some(Profile::Soccer),
        _ => None,
    }
}

/// Copies the calling thread's last error message into `buf` as a
/// NUL-terminated string, truncating to `len - 1` bytes. Returns the full
/// message length in bytes, excluding the terminator.
///
/// # Safety
/// `buf` must be null or point to at least `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn vis_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Builds a clustering from parallel arrays of node ids and cluster labels.
///
/// # Safety
/// `nodes` and `labels` must point to `len` readable values each; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn vis_clustering_new(
    nodes: *const u32,
    labels: *const u32,
    len: usize,
    profile_code: u32,
    out: *mut *mut VisClustering,
) -> VisStatus {
    guard(|| {
        if nodes.is_null() || labels.is_null() || out.is_null() {
            return fail(VisStatus::NullPointer, "null argument");
        }
        let Some(p) = profile(profile_code) else {
            return fail(VisStatus::InvalidArgument, format!("unknown profile {profile_code}"));
        };
        let ids: Vec<NodeId> = std::slice::from_raw_parts(nodes, len).iter().map(|&i| NodeId(i)).collect();
        let labels = std::slice::from_raw_parts(labels, len);
        match Clustering::from_labels(&ids, labels, p) {
            Ok(c) => {
                *out = Box::into_raw(Box::new(VisClustering(c)));
                VisStatus::Ok
            }
            Err(e) => fail(VisStatus::InvalidClustering, e),
        }
    })
}

/// # Safety
/// `c` must be null or a handle from [`vis_clustering_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vis_clustering_free(c: *mut VisClustering) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of clusters and nodes.
///
/// # Safety
/// `c` must be a live handle; `clusters` and `nodes` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vis_clustering_shape(c: *const VisClustering, clusters: *mut usize, nodes: *mut usize) -> VisStatus {
    guard(|| {
        if c.is_null() || clusters.is_null() || nodes.is_null() {
            return fail(VisStatus::NullPointer, "null argument");
        }
        let c = &*c;
        *clusters = c.0.len();
        *nodes = c.0.node_count();
        VisStatus::Ok
    })
}

unsafe fn pair_op(
    x: *const VisClustering,
    y: *const VisClustering,
    out: *mut f64,
    op: impl FnOnce(&Clustering, &Clustering) -> Result<f64, String>,
) -> VisStatus {
    guard(|| {
        if x.is_null() || y.is_null() || out.is_null() {
            return fail(VisStatus::NullPointer, "null argument");
        }
        match op(&(&*x).0, &(&*y).0) {
            Ok(v) => {
                *out = v;
                VisStatus::Ok
            }
            Err(e) => fail(VisStatus::Computation, e),
        }
    })
}

/// Variation of Information between two clusterings of the same roster, in bits.
///
/// # Safety
/// `x` and `y` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vis_vi(x: *const VisClustering, y: *const VisClustering, out: *mut f64) -> VisStatus {
    pair_op(x, y, out, |a, b| vi(a, b).map(|v| v.0).map_err(|e| e.to_string()))
}

/// VI divided by the sample interval `dt`, in bits per second.
///
/// # Safety
/// As for [`vis_vi`].
#[no_mangle]
pub unsafe extern "C" fn vis_vi_rate(x: *const VisClustering, y: *const VisClustering, dt: f64, out: *mut f64) -> VisStatus {
    pair_op(x, y, out, |a, b| vi_rate(a, b, dt).map(|r| r.value).map_err(|e| e.to_string()))
}

/// Formation part of the VI (minimum over matrices with the same margins), in bits.
///
/// # Safety
/// As for [`vis_vi`].
#[no_mangle]
pub unsafe extern "C" fn vis_vif(x: *const VisClustering, y: *const VisClustering, out: *mut f64) -> VisStatus {
    pair_op(x, y, out, |a, b| vif_for_transition(a, b).map(|v| v.0).map_err(|e| e.to_string()))
}

/// Share of the VI attributed to `node`, in bits.
///
/// # Safety
/// As for [`vis_vi`].
#[no_mangle]
pub unsafe extern "C" fn vis_node_contribution(
    x: *const VisClustering,
    y: *const VisClustering,
    node: u32,
    out: *mut f64,
) -> VisStatus {
    pair_op(x, y, out, |a, b| node_contribution(a, b, NodeId(node)).map(|v| v.0).map_err(|e| e.to_string()))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vis_count_spaces(n: u32, min_part: u32, out: *mut VisSpaceCounts) -> VisStatus {
    guard(|| {
        if out.is_null() {
            return fail(VisStatus::NullPointer, "null argument");
        }
        match count_spaces(n, min_part) {
            Ok(c) => {
                *out = VisSpaceCounts {
                    n: c.n,
                    min_part: c.min_part,
                    partitions: c.partitions,
                    partitions_no_singletons: c.partitions_no_singletons,
                    bell_hi: (c.bell >> 64) as u64,
                    bell_lo: c.bell as u64,
                    bell_no_singletons_hi: (c.bell_no_singletons >> 64) as u64,
                    bell_no_singletons_lo: c.bell_no_singletons as u64,
                };
                VisStatus::Ok
            }
            Err(e) => fail(VisStatus::InvalidArgument, e),
        }
    })
}

/// Parses a stream JSON document (NUL-terminated UTF-8).
///
/// # Safety
/// `json` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vis_stream_from_json(json: *const c_char, profile_code: u32, out: *mut *mut VisStream) -> VisStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(VisStatus::NullPointer, "null argument");
        }
        let Some(p) = profile(profile_code) else {
            return fail(VisStatus::InvalidArgument, format!("unknown profile {profile_code}"));
        };
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            return fail(VisStatus::Parse, "stream JSON is not UTF-8");
        };
        let config = StreamConfig { profile: p, ..StreamConfig::default() };
        match SampleStream::read_json(text.as_bytes(), &config) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(VisStream(s)));
                VisStatus::Ok
            }
            Err(e) => fail(VisStatus::Parse, e),
        }
    })
}

/// # Safety
/// `s` must be null or a handle from [`vis_stream_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vis_stream_free(s: *mut VisStream) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of samples; zero for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vis_stream_len(s: *const VisStream) -> usize {
    if s.is_null() {
        0
    } else {
        (&*s).0.len()
    }
}

/// Computes the VI series of a stream.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vis_series_new(s: *const VisStream, out: *mut *mut VisSeries) -> VisStatus {
    guard(|| {
        if s.is_null() || out.is_null() {
            return fail(VisStatus::NullPointer, "null argument");
        }
        match vi_series(&(&*s).0) {
            Ok(series) => {
                *out = Box::into_raw(Box::new(VisSeries(series)));
                VisStatus::Ok
            }
            Err(e) => fail(VisStatus::Computation, e),
        }
    })
}

/// # Safety
/// `s` must be null or a handle from [`vis_series_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vis_series_free(s: *mut VisSeries) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of transitions; zero for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vis_series_len(s: *const VisSeries) -> usize {
    if s.is_null() {
        0
    } else {
        (&*s).0.len()
    }
}

/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vis_series_point(s: *const VisSeries, index: usize, out: *mut VisViPoint) -> VisStatus {
    guard(|| {
        if s.is_null() || out.is_null() {
            return fail(VisStatus::NullPointer, "null argument");
        }
        let Some(p) = (&*s).0.points.get(index) else {
            return fail(VisStatus::InvalidArgument, format!("index {index} out of range"));
        };
        *out = VisViPoint { t: p.t, dt: p.dt, total: p.total, vif: p.vif, vic: p.vic, home: p.home, visitor: p.visitor };
        VisStatus::Ok
    })
}
