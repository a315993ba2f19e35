//! C ABI for the susyhom library.
//!
//! All functions return a status code; results come back through out
//! parameters. Handles are opaque and must be released with the matching
//! `_free` function. The last error message is thread-local and can be
//! copied out with `susyhom_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use susyhom::complex::{BettiMethod, CochainComplex};
use susyhom::error::Error;
use susyhom::estimate::EstimatorConfig;
use susyhom::graph::{clique_complex, independence_complex, Graph};

/// Status codes returned by every API function.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SusyhomStatus {
    /// Success.
    Ok = 0,
    /// Invalid arguments or input data.
    InvalidInput = 1,
    /// A precondition or promise failed (empty sector, density floor, ...).
    Precondition = 2,
    /// Internal panic; the handle state is unspecified.
    Panic = 3,
}

/// Betti computation backends.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SusyhomMethod {
    ExactRank = 0,
    Spectral = 1,
}

/// Opaque graph handle.
pub struct SusyhomGraph(Graph);

/// Opaque verified-complex handle.
pub struct SusyhomComplex(CochainComplex);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> SusyhomStatus {
    if err.is_precondition() {
        SusyhomStatus::Precondition
    } else {
        SusyhomStatus::InvalidInput
    }
}

fn guard<F: FnOnce() -> Result<(), (SusyhomStatus, String)>>(f: F) -> SusyhomStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            SusyhomStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SusyhomStatus::Panic
        }
    }
}

fn lift(e: Error) -> (SusyhomStatus, String) {
    (status_of(&e), e.to_string())
}

fn invalid(msg: &str) -> (SusyhomStatus, String) {
    (SusyhomStatus::InvalidInput, msg.to_string())
}

/// Copy the last error message (UTF-8, NUL-terminated, truncated to fit)
/// into `buf`. Returns the full message length in bytes.
#[no_mangle]
pub extern "C" fn susyhom_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            unsafe {
                ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
                *buf.add(n) = 0;
            }
        }
        msg.len()
    })
}

/// Parse an edge-list description (first data line: vertex count; then one
/// `u v` pair per line; `#` starts a comment).
#[no_mangle]
pub extern "C" fn susyhom_graph_parse(
    text: *const c_char,
    out: *mut *mut SusyhomGraph,
) -> SusyhomStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return Err(invalid("null pointer"));
        }
        let text = unsafe { CStr::from_ptr(text) }
            .to_str()
            .map_err(|_| invalid("input is not valid UTF-8"))?;
        let g = Graph::parse(text, "<memory>").map_err(lift)?;
        unsafe { *out = Box::into_raw(Box::new(SusyhomGraph(g))) };
        Ok(())
    })
}

/// Build a graph from an edge array laid out as `u0, v0, u1, v1, ...`.
#[no_mangle]
pub extern "C" fn susyhom_graph_new(
    n: u32,
    edges: *const u32,
    num_edges: usize,
    out: *mut *mut SusyhomGraph,
) -> SusyhomStatus {
    guard(|| {
        if out.is_null() || (edges.is_null() && num_edges > 0) {
            return Err(invalid("null pointer"));
        }
        let flat = unsafe { std::slice::from_raw_parts(edges, num_edges * 2) };
        let pairs: Vec<(usize, usize)> = flat
            .chunks_exact(2)
            .map(|p| (p[0] as usize, p[1] as usize))
            .collect();
        let g = Graph::new(n as usize, &pairs).map_err(lift)?;
        unsafe { *out = Box::into_raw(Box::new(SusyhomGraph(g))) };
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn susyhom_graph_free(g: *mut SusyhomGraph) {
    if !g.is_null() {
        drop(unsafe { Box::from_raw(g) });
    }
}

fn build_complex(
    g: *const SusyhomGraph,
    out: *mut *mut SusyhomComplex,
    f: fn(&Graph) -> susyhom::error::Result<CochainComplex>,
) -> SusyhomStatus {
    guard(|| {
        if g.is_null() || out.is_null() {
            return Err(invalid("null pointer"));
        }
        let g = unsafe { &(*g).0 };
        let c = f(g).map_err(lift)?;
        unsafe { *out = Box::into_raw(Box::new(SusyhomComplex(c))) };
        Ok(())
    })
}

/// Verified cochain complex of the independence complex of the graph.
#[no_mangle]
pub extern "C" fn susyhom_complex_independence(
    g: *const SusyhomGraph,
    out: *mut *mut SusyhomComplex,
) -> SusyhomStatus {
    build_complex(g, out, independence_complex)
}

/// Verified cochain complex of the clique complex of the graph.
#[no_mangle]
pub extern "C" fn susyhom_complex_clique(
    g: *const SusyhomGraph,
    out: *mut *mut SusyhomComplex,
) -> SusyhomStatus {
    build_complex(g, out, clique_complex)
}

#[no_mangle]
pub extern "C" fn susyhom_complex_free(c: *mut SusyhomComplex) {
    if !c.is_null() {
        drop(unsafe { Box::from_raw(c) });
    }
}

/// Dimension of the fermion-number-`level` sector.
#[no_mangle]
pub extern "C" fn susyhom_sector_dim(
    c: *const SusyhomComplex,
    level: usize,
    out: *mut usize,
) -> SusyhomStatus {
    guard(|| {
        if c.is_null() || out.is_null() {
            return Err(invalid("null pointer"));
        }
        let c = unsafe { &(*c).0 };
        let d = c.space().sector_dim(level).map_err(lift)?;
        unsafe { *out = d };
        Ok(())
    })
}

/// Betti number of one sector.
#[no_mangle]
pub extern "C" fn susyhom_betti(
    c: *const SusyhomComplex,
    level: usize,
    method: SusyhomMethod,
    out: *mut usize,
) -> SusyhomStatus {
    guard(|| {
        if c.is_null() || out.is_null() {
            return Err(invalid("null pointer"));
        }
        let c = unsafe { &(*c).0 };
        let m = match method {
            SusyhomMethod::ExactRank => BettiMethod::ExactRank,
            SusyhomMethod::Spectral => BettiMethod::Spectral,
        };
        let b = c.betti(level, m).map_err(lift)?;
        unsafe { *out = b };
        Ok(())
    })
}

/// Witten index, cross-checked against both the dimension and Betti
/// alternating sums.
#[no_mangle]
pub extern "C" fn susyhom_witten_index(
    c: *const SusyhomComplex,
    out: *mut i64,
) -> SusyhomStatus {
    guard(|| {
        if c.is_null() || out.is_null() {
            return Err(invalid("null pointer"));
        }
        let c = unsafe { &(*c).0 };
        let w = c.witten_index().map_err(lift)?;
        if !w.consistent {
            return Err((
                SusyhomStatus::Precondition,
                "Witten index cross-check failed".into(),
            ));
        }
        unsafe { *out = w.index };
        Ok(())
    })
}

/// Sector Laplacian spectrum, ascending. Writes at most `cap` values into
/// `buf` and stores the full length in `len`.
#[no_mangle]
pub extern "C" fn susyhom_sector_spectrum(
    c: *const SusyhomComplex,
    level: usize,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> SusyhomStatus {
    guard(|| {
        if c.is_null() || len.is_null() || (buf.is_null() && cap > 0) {
            return Err(invalid("null pointer"));
        }
        let c = unsafe { &(*c).0 };
        let spec = c.sector_spectrum(level).map_err(lift)?;
        unsafe {
            *len = spec.len();
            for (i, v) in spec.iter().take(cap).enumerate() {
                *buf.add(i) = *v;
            }
        }
        Ok(())
    })
}

/// Full spectral report (dimensions, Betti numbers, Euler characteristic,
/// Witten index, gaps, pairing) as a JSON string. Free the result with
/// `susyhom_string_free`.
#[no_mangle]
pub extern "C" fn susyhom_spectral_report_json(
    c: *const SusyhomComplex,
    out: *mut *mut c_char,
) -> SusyhomStatus {
    guard(|| {
        if c.is_null() || out.is_null() {
            return Err(invalid("null pointer"));
        }
        let c = unsafe { &(*c).0 };
        let report = c.spectral_report().map_err(lift)?;
        let text = serde_json::to_string(&report)
            .map_err(|e| invalid(&e.to_string()))?;
        let cstr = CString::new(text).map_err(|e| invalid(&e.to_string()))?;
        unsafe { *out = cstr.into_raw() };
        Ok(())
    })
}

/// Quasi-Betti-number estimate on one sector; the report is returned as a
/// JSON string to be freed with `susyhom_string_free`. Pass `enumerate`
/// nonzero for exact counting instead of seeded sampling.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub extern "C" fn susyhom_qbne_json(
    c: *const SusyhomComplex,
    level: usize,
    b: f64,
    delta: f64,
    eps: f64,
    mu: f64,
    seed: u64,
    enumerate: i32,
    out: *mut *mut c_char,
) -> SusyhomStatus {
    guard(|| {
        if c.is_null() || out.is_null() {
            return Err(invalid("null pointer"));
        }
        let c = unsafe { &(*c).0 };
        let mut cfg = EstimatorConfig::new(b, delta, eps, mu);
        cfg.seed = seed;
        cfg.enumerate = enumerate != 0;
        let report = susyhom::estimate::qbne(c, level, &cfg).map_err(lift)?;
        let text = serde_json::to_string(&report)
            .map_err(|e| invalid(&e.to_string()))?;
        let cstr = CString::new(text).map_err(|e| invalid(&e.to_string()))?;
        unsafe { *out = cstr.into_raw() };
        Ok(())
    })
}

/// Release a string returned by this library.
#[no_mangle]
pub extern "C" fn susyhom_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
