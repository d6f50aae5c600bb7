//! C ABI over the cardioquant core: opaque handles, integer status codes and
//! flat-array parameters, so other languages can bind without Rust types.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::ptr;

use cardioquant::discrepancy::{self, FeatureBatch, GaussianBatch};
use cardioquant::distfield;
use cardioquant::error::CqError;
use cardioquant::scargraph::{quantify_scar, MspConfig, QuantifyResult, ScarProvider};
use cardioquant::segmetrics;
use cardioquant::volgrid::{self, Connectivity, Volume};

/// Status of a C API call; nonzero values follow the CLI exit-code classes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CqStatus {
    Ok = 0,
    /// Internal failure or invalid handle/pointer.
    Error = 1,
    /// Malformed file or argument.
    Format = 2,
    /// Mismatched dimensions or lengths.
    Shape = 3,
    /// An input that must be non-empty is empty.
    EmptyInput = 4,
}

/// Opaque volume handle.
pub struct CqVolume(Volume);

/// Opaque scar-quantification result handle.
pub struct CqQuantifyResult(QuantifyResult);

/// Probability provider selector for cq_quantify_scar.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CqProvider {
    TwoSd = 0,
    Otsu = 1,
    External = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
}

fn status_of(err: &CqError) -> CqStatus {
    match err.exit_code() {
        2 => CqStatus::Format,
        3 => CqStatus::Shape,
        4 => CqStatus::EmptyInput,
        _ => CqStatus::Error,
    }
}

fn fail(err: CqError) -> CqStatus {
    let status = status_of(&err);
    set_error(&err.to_string());
    status
}

fn fail_msg(status: CqStatus, msg: &str) -> CqStatus {
    set_error(msg);
    status
}

/// Message of the last failing call on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

unsafe fn path_from(ptr: *const c_char) -> Result<PathBuf, CqStatus> {
    if ptr.is_null() {
        return Err(fail_msg(CqStatus::Error, "null path"));
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(PathBuf::from(s)),
        Err(_) => Err(fail_msg(CqStatus::Format, "path is not valid UTF-8")),
    }
}

unsafe fn slice_from<'a, T>(ptr: *const T, len: usize) -> Result<&'a [T], CqStatus> {
    if ptr.is_null() && len > 0 {
        return Err(fail_msg(CqStatus::Error, "null data pointer"));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn volume_from<'a>(handle: *const CqVolume) -> Result<&'a Volume, CqStatus> {
    handle
        .as_ref()
        .map(|h| &h.0)
        .ok_or_else(|| fail_msg(CqStatus::Error, "null volume handle"))
}

fn return_volume(out: *mut *mut CqVolume, vol: Volume) -> CqStatus {
    if out.is_null() {
        return fail_msg(CqStatus::Error, "null out pointer");
    }
    unsafe { *out = Box::into_raw(Box::new(CqVolume(vol))) };
    CqStatus::Ok
}

// ---------------------------------------------------------------------------
// volumes
// ---------------------------------------------------------------------------

/// Read a cqvol volume from its `.json` header path.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cq_volume_read(
    path: *const c_char,
    out: *mut *mut CqVolume,
) -> CqStatus {
    let path = match path_from(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    match volgrid::read_volume(&path) {
        Ok(vol) => return_volume(out, vol),
        Err(e) => fail(e),
    }
}

/// Write a volume as a cqvol pair next to the given `.json` path.
///
/// # Safety
/// `path` must be NUL-terminated; `vol` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cq_volume_write(path: *const c_char, vol: *const CqVolume) -> CqStatus {
    let path = match path_from(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    let vol = match volume_from(vol) {
        Ok(v) => v,
        Err(s) => return s,
    };
    match volgrid::write_volume(&path, vol) {
        Ok(()) => CqStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Build a scalar volume from a dense array in x-fastest order.
///
/// # Safety
/// `dims`/`spacing` point to 3 elements; `data` points to `len` elements.
#[no_mangle]
pub unsafe extern "C" fn cq_volume_create_scalar(
    dims: *const u64,
    spacing: *const f64,
    data: *const f64,
    len: usize,
    out: *mut *mut CqVolume,
) -> CqStatus {
    let dims = match slice_from(dims, 3) {
        Ok(d) => [d[0] as usize, d[1] as usize, d[2] as usize],
        Err(s) => return s,
    };
    let spacing = match slice_from(spacing, 3) {
        Ok(s) => [s[0], s[1], s[2]],
        Err(s) => return s,
    };
    let data = match slice_from(data, len) {
        Ok(d) => d.to_vec(),
        Err(s) => return s,
    };
    match Volume::scalar(dims, spacing, data) {
        Ok(vol) => return_volume(out, vol),
        Err(e) => fail(e),
    }
}

/// Build a label volume from a dense array in x-fastest order.
///
/// # Safety
/// `dims`/`spacing` point to 3 elements; `data` points to `len` elements.
#[no_mangle]
pub unsafe extern "C" fn cq_volume_create_label(
    dims: *const u64,
    spacing: *const f64,
    data: *const u8,
    len: usize,
    out: *mut *mut CqVolume,
) -> CqStatus {
    let dims = match slice_from(dims, 3) {
        Ok(d) => [d[0] as usize, d[1] as usize, d[2] as usize],
        Err(s) => return s,
    };
    let spacing = match slice_from(spacing, 3) {
        Ok(s) => [s[0], s[1], s[2]],
        Err(s) => return s,
    };
    let data = match slice_from(data, len) {
        Ok(d) => d.to_vec(),
        Err(s) => return s,
    };
    match Volume::label(dims, spacing, data) {
        Ok(vol) => return_volume(out, vol),
        Err(e) => fail(e),
    }
}

/// Voxel count of a volume (0 on a null handle).
///
/// # Safety
/// `vol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cq_volume_len(vol: *const CqVolume) -> usize {
    vol.as_ref().map_or(0, |h| h.0.len())
}

/// Fetch dims (3 elements) and spacing (3 elements).
///
/// # Safety
/// Out pointers must each point to 3 writable elements.
#[no_mangle]
pub unsafe extern "C" fn cq_volume_shape(
    vol: *const CqVolume,
    dims_out: *mut u64,
    spacing_out: *mut f64,
) -> CqStatus {
    let vol = match volume_from(vol) {
        Ok(v) => v,
        Err(s) => return s,
    };
    if dims_out.is_null() || spacing_out.is_null() {
        return fail_msg(CqStatus::Error, "null out pointer");
    }
    for (i, &d) in vol.dims().iter().enumerate() {
        *dims_out.add(i) = d as u64;
    }
    for (i, &s) in vol.spacing().iter().enumerate() {
        *spacing_out.add(i) = s;
    }
    CqStatus::Ok
}

/// Copy scalar voxels into a caller buffer of `len == cq_volume_len`.
///
/// # Safety
/// `out` must point to `len` writable elements.
#[no_mangle]
pub unsafe extern "C" fn cq_volume_copy_scalar(
    vol: *const CqVolume,
    out: *mut f64,
    len: usize,
) -> CqStatus {
    let vol = match volume_from(vol) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let data = match vol.scalar_data() {
        Ok(d) => d,
        Err(e) => return fail(e),
    };
    if out.is_null() || len != data.len() {
        return fail_msg(CqStatus::Shape, "output buffer length mismatch");
    }
    ptr::copy_nonoverlapping(data.as_ptr(), out, len);
    CqStatus::Ok
}

/// Copy label voxels into a caller buffer of `len == cq_volume_len`.
///
/// # Safety
/// `out` must point to `len` writable elements.
#[no_mangle]
pub unsafe extern "C" fn cq_volume_copy_label(
    vol: *const CqVolume,
    out: *mut u8,
    len: usize,
) -> CqStatus {
    let vol = match volume_from(vol) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let data = match vol.label_data() {
        Ok(d) => d,
        Err(e) => return fail(e),
    };
    if out.is_null() || len != data.len() {
        return fail_msg(CqStatus::Shape, "output buffer length mismatch");
    }
    ptr::copy_nonoverlapping(data.as_ptr(), out, len);
    CqStatus::Ok
}

/// Release a volume handle (null is a no-op).
///
/// # Safety
/// `vol` must be null or a handle obtained from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cq_volume_free(vol: *mut CqVolume) {
    if !vol.is_null() {
        drop(Box::from_raw(vol));
    }
}

// ---------------------------------------------------------------------------
// processing and distance fields
// ---------------------------------------------------------------------------

/// Z-score normalize a scalar volume.
///
/// # Safety
/// Handles and out pointers as documented on the type.
#[no_mangle]
pub unsafe extern "C" fn cq_zscore_normalize(
    vol: *const CqVolume,
    out: *mut *mut CqVolume,
) -> CqStatus {
    let vol = match volume_from(vol) {
        Ok(v) => v,
        Err(s) => return s,
    };
    match volgrid::zscore_normalize(vol) {
        Ok(v) => return_volume(out, v),
        Err(e) => fail(e),
    }
}

/// Keep the largest connected component of `label` (connectivity 6 or 26).
///
/// # Safety
/// Handles and out pointers as documented on the type.
#[no_mangle]
pub unsafe extern "C" fn cq_largest_component(
    vol: *const CqVolume,
    label: u8,
    connectivity: u32,
    out: *mut *mut CqVolume,
) -> CqStatus {
    let vol = match volume_from(vol) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let conn = match connectivity {
        6 => Connectivity::Six,
        26 => Connectivity::TwentySix,
        _ => return fail_msg(CqStatus::Format, "connectivity must be 6 or 26"),
    };
    match volgrid::largest_component(vol, label, conn) {
        Ok(v) => return_volume(out, v),
        Err(e) => fail(e),
    }
}

/// Fill interior holes of a binary mask.
///
/// # Safety
/// Handles and out pointers as documented on the type.
#[no_mangle]
pub unsafe extern "C" fn cq_fill_holes(vol: *const CqVolume, out: *mut *mut CqVolume) -> CqStatus {
    let vol = match volume_from(vol) {
        Ok(v) => v,
        Err(s) => return s,
    };
    match volgrid::fill_holes(vol) {
        Ok(v) => return_volume(out, v),
        Err(e) => fail(e),
    }
}

/// Signed distance transform map of a binary mask; the result is a scalar
/// volume holding phi.
///
/// # Safety
/// Handles and out pointers as documented on the type.
#[no_mangle]
pub unsafe extern "C" fn cq_signed_dtm(
    mask: *const CqVolume,
    beta: f64,
    out: *mut *mut CqVolume,
) -> CqStatus {
    let mask = match volume_from(mask) {
        Ok(v) => v,
        Err(s) => return s,
    };
    match distfield::signed_dtm(mask, beta) {
        Ok(field) => return_volume(out, field.grid().clone()),
        Err(e) => fail(e),
    }
}

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

/// Dice overlap of two binary volumes.
///
/// # Safety
/// Handles and out pointers as documented on the type.
#[no_mangle]
pub unsafe extern "C" fn cq_dice(
    seg: *const CqVolume,
    gd: *const CqVolume,
    out: *mut f64,
) -> CqStatus {
    let (seg, gd) = match (volume_from(seg), volume_from(gd)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    match segmetrics::dice(seg, gd) {
        Ok(v) if !out.is_null() => {
            *out = v;
            CqStatus::Ok
        }
        Ok(_) => fail_msg(CqStatus::Error, "null out pointer"),
        Err(e) => fail(e),
    }
}

/// Generalized Dice over a label list.
///
/// # Safety
/// `labels` points to `n_labels` elements; handles as documented.
#[no_mangle]
pub unsafe extern "C" fn cq_gdice(
    seg: *const CqVolume,
    gd: *const CqVolume,
    labels: *const u8,
    n_labels: usize,
    out: *mut f64,
) -> CqStatus {
    let (seg, gd) = match (volume_from(seg), volume_from(gd)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    let labels = match slice_from(labels, n_labels) {
        Ok(l) => l,
        Err(s) => return s,
    };
    match segmetrics::gdice(seg, gd, labels) {
        Ok(v) if !out.is_null() => {
            *out = v;
            CqStatus::Ok
        }
        Ok(_) => fail_msg(CqStatus::Error, "null out pointer"),
        Err(e) => fail(e),
    }
}

/// Hausdorff and average surface distance between the boundary voxels of two
/// binary masks (either out pointer may be null to skip it).
///
/// # Safety
/// Handles and out pointers as documented on the type.
#[no_mangle]
pub unsafe extern "C" fn cq_surface_distances(
    seg: *const CqVolume,
    gd: *const CqVolume,
    hausdorff_out: *mut f64,
    asd_out: *mut f64,
) -> CqStatus {
    let (seg, gd) = match (volume_from(seg), volume_from(gd)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    let x = match segmetrics::boundary_points(seg) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let y = match segmetrics::boundary_points(gd) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    if !hausdorff_out.is_null() {
        match segmetrics::hausdorff(&x, &y) {
            Ok(v) => *hausdorff_out = v,
            Err(e) => return fail(e),
        }
    }
    if !asd_out.is_null() {
        match segmetrics::asd(&x, &y) {
            Ok(v) => *asd_out = v,
            Err(e) => return fail(e),
        }
    }
    CqStatus::Ok
}

// ---------------------------------------------------------------------------
// scar quantification
// ---------------------------------------------------------------------------

/// Run the scar-quantification pipeline. For `CQ_PROVIDER_EXTERNAL`, `probs`
/// must point to `n_probs` per-node probabilities (one per mesh vertex);
/// otherwise it may be null. `bins` only applies to the otsu provider.
///
/// # Safety
/// Handles, arrays and out pointers as documented on the type.
#[no_mangle]
pub unsafe extern "C" fn cq_quantify_scar(
    image: *const CqVolume,
    la_mask: *const CqVolume,
    provider: CqProvider,
    probs: *const f64,
    n_probs: usize,
    bins: usize,
    lambda: f64,
    out: *mut *mut CqQuantifyResult,
) -> CqStatus {
    let (image, mask) = match (volume_from(image), volume_from(la_mask)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    let provider = match provider {
        CqProvider::TwoSd => ScarProvider::TwoSd,
        CqProvider::Otsu => ScarProvider::Otsu { bins },
        CqProvider::External => match slice_from(probs, n_probs) {
            Ok(p) => ScarProvider::External(p.to_vec()),
            Err(s) => return s,
        },
    };
    if out.is_null() {
        return fail_msg(CqStatus::Error, "null out pointer");
    }
    match quantify_scar(image, mask, &provider, lambda, &MspConfig::default()) {
        Ok(result) => {
            *out = Box::into_raw(Box::new(CqQuantifyResult(result)));
            CqStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Number of surface vertices in a quantification result (0 on null).
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cq_quantify_vertex_count(result: *const CqQuantifyResult) -> usize {
    result.as_ref().map_or(0, |r| r.0.labeling.len())
}

/// Fraction of vertices labeled scar (NaN on null).
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cq_quantify_scar_fraction(result: *const CqQuantifyResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.0.scar_fraction)
}

/// Copy the per-vertex labels (0/1) into a caller buffer.
///
/// # Safety
/// `out` must point to `len` writable elements.
#[no_mangle]
pub unsafe extern "C" fn cq_quantify_copy_labels(
    result: *const CqQuantifyResult,
    out: *mut u8,
    len: usize,
) -> CqStatus {
    let r = match result.as_ref() {
        Some(r) => &r.0,
        None => return fail_msg(CqStatus::Error, "null result handle"),
    };
    if out.is_null() || len != r.labeling.len() {
        return fail_msg(CqStatus::Shape, "output buffer length mismatch");
    }
    ptr::copy_nonoverlapping(r.labeling.as_ptr(), out, len);
    CqStatus::Ok
}

/// Write the surface mesh of a quantification result as Wavefront OBJ.
///
/// # Safety
/// `path` must be NUL-terminated; `result` a live handle.
#[no_mangle]
pub unsafe extern "C" fn cq_quantify_write_obj(
    result: *const CqQuantifyResult,
    path: *const c_char,
) -> CqStatus {
    let r = match result.as_ref() {
        Some(r) => &r.0,
        None => return fail_msg(CqStatus::Error, "null result handle"),
    };
    let path = match path_from(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    match volgrid::write_obj(&path, &r.mesh) {
        Ok(()) => CqStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Release a quantification result (null is a no-op).
///
/// # Safety
/// `result` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cq_quantify_free(result: *mut CqQuantifyResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

// ---------------------------------------------------------------------------
// discrepancy metrics over flat row-major arrays
// ---------------------------------------------------------------------------

unsafe fn batch_from(
    data: *const f64,
    m: usize,
    n: usize,
) -> Result<FeatureBatch, CqStatus> {
    let flat = slice_from(data, m.saturating_mul(n))?;
    let rows: Vec<Vec<f64>> = flat.chunks(n.max(1)).map(|c| c.to_vec()).collect();
    FeatureBatch::new(rows).map_err(fail)
}

/// Characteristic-function distance between two batches (row-major M x n).
///
/// # Safety
/// `zs` points to `ms*n` elements and `zt` to `mt*n` elements.
#[no_mangle]
pub unsafe extern "C" fn cq_cfd_point(
    zs: *const f64,
    ms: usize,
    zt: *const f64,
    mt: usize,
    n: usize,
    a: f64,
    out: *mut f64,
) -> CqStatus {
    metric2(zs, ms, zt, mt, n, out, |s, t| discrepancy::cfd_point(s, t, a))
}

/// Sliced (per-coordinate) CF distance.
///
/// # Safety
/// As for [`cq_cfd_point`].
#[no_mangle]
pub unsafe extern "C" fn cq_sliced_cfd(
    zs: *const f64,
    ms: usize,
    zt: *const f64,
    mt: usize,
    n: usize,
    a: f64,
    out: *mut f64,
) -> CqStatus {
    metric2(zs, ms, zt, mt, n, out, |s, t| discrepancy::sliced_cfd(s, t, a))
}

/// Squared distance between batch means.
///
/// # Safety
/// As for [`cq_cfd_point`].
#[no_mangle]
pub unsafe extern "C" fn cq_mean_loss(
    zs: *const f64,
    ms: usize,
    zt: *const f64,
    mt: usize,
    n: usize,
    out: *mut f64,
) -> CqStatus {
    metric2(zs, ms, zt, mt, n, out, discrepancy::mean_loss)
}

/// Gaussian-kernel MMD; pass sigma <= 0 for the median-distance heuristic.
///
/// # Safety
/// As for [`cq_cfd_point`].
#[no_mangle]
pub unsafe extern "C" fn cq_mmd_gaussian(
    zs: *const f64,
    ms: usize,
    zt: *const f64,
    mt: usize,
    n: usize,
    sigma: f64,
    out: *mut f64,
) -> CqStatus {
    metric2(zs, ms, zt, mt, n, out, |s, t| {
        let sigma = if sigma > 0.0 {
            sigma
        } else {
            discrepancy::median_heuristic_sigma(s, t)?
        };
        discrepancy::mmd_gaussian(s, t, sigma)
    })
}

/// CORAL covariance distance.
///
/// # Safety
/// As for [`cq_cfd_point`].
#[no_mangle]
pub unsafe extern "C" fn cq_coral_distance(
    zs: *const f64,
    ms: usize,
    zt: *const f64,
    mt: usize,
    n: usize,
    out: *mut f64,
) -> CqStatus {
    metric2(zs, ms, zt, mt, n, out, discrepancy::coral_distance)
}

unsafe fn metric2<F>(
    zs: *const f64,
    ms: usize,
    zt: *const f64,
    mt: usize,
    n: usize,
    out: *mut f64,
    f: F,
) -> CqStatus
where
    F: FnOnce(&FeatureBatch, &FeatureBatch) -> cardioquant::Result<f64>,
{
    let s = match batch_from(zs, ms, n) {
        Ok(b) => b,
        Err(st) => return st,
    };
    let t = match batch_from(zt, mt, n) {
        Ok(b) => b,
        Err(st) => return st,
    };
    match f(&s, &t) {
        Ok(v) if !out.is_null() => {
            *out = v;
            CqStatus::Ok
        }
        Ok(_) => fail_msg(CqStatus::Error, "null out pointer"),
        Err(e) => fail(e),
    }
}

unsafe fn gaussian_from(
    means: *const f64,
    vars: *const f64,
    m: usize,
    n: usize,
) -> Result<GaussianBatch, CqStatus> {
    let mu = slice_from(means, m.saturating_mul(n))?;
    let va = slice_from(vars, m.saturating_mul(n))?;
    let mu_rows: Vec<Vec<f64>> = mu.chunks(n.max(1)).map(|c| c.to_vec()).collect();
    let va_rows: Vec<Vec<f64>> = va.chunks(n.max(1)).map(|c| c.to_vec()).collect();
    GaussianBatch::new(mu_rows, va_rows).map_err(fail)
}

/// Closed-form L2 distance between two diagonal-Gaussian mixtures; set
/// `marginal` nonzero for the per-coordinate substitution.
///
/// # Safety
/// Mean/variance arrays are row-major M x n.
#[no_mangle]
pub unsafe extern "C" fn cq_varda_distance(
    zs_means: *const f64,
    zs_vars: *const f64,
    ms: usize,
    zt_means: *const f64,
    zt_vars: *const f64,
    mt: usize,
    n: usize,
    marginal: u32,
    out: *mut f64,
) -> CqStatus {
    let qs = match gaussian_from(zs_means, zs_vars, ms, n) {
        Ok(b) => b,
        Err(st) => return st,
    };
    let qt = match gaussian_from(zt_means, zt_vars, mt, n) {
        Ok(b) => b,
        Err(st) => return st,
    };
    let r = if marginal != 0 {
        discrepancy::varda_marginal_distance(&qs, &qt)
    } else {
        discrepancy::varda_distance(&qs, &qt)
    };
    match r {
        Ok(v) if !out.is_null() => {
            *out = v;
            CqStatus::Ok
        }
        Ok(_) => fail_msg(CqStatus::Error, "null out pointer"),
        Err(e) => fail(e),
    }
}

/// Mean KL divergence of per-sample diagonal Gaussians to the standard
/// normal.
///
/// # Safety
/// Mean/variance arrays are row-major M x n.
#[no_mangle]
pub unsafe extern "C" fn cq_kl_diag_to_std(
    means: *const f64,
    vars: *const f64,
    m: usize,
    n: usize,
    out: *mut f64,
) -> CqStatus {
    let q = match gaussian_from(means, vars, m, n) {
        Ok(b) => b,
        Err(st) => return st,
    };
    match discrepancy::kl_diag_to_std(&q) {
        Ok(v) if !out.is_null() => {
            *out = v;
            CqStatus::Ok
        }
        Ok(_) => fail_msg(CqStatus::Error, "null out pointer"),
        Err(e) => fail(e),
    }
}

/// Run the embedded verification suite; returns `CQ_STATUS_OK` iff every
/// property family passes.
#[no_mangle]
pub extern "C" fn cq_selfcheck(seed: u64) -> CqStatus {
    let report = cardioquant::selfcheck::run_selfcheck(seed);
    if report.all_passed() {
        CqStatus::Ok
    } else {
        let failing: Vec<&str> = report
            .families
            .iter()
            .filter(|f| !f.passed)
            .map(|f| f.name.as_str())
            .collect();
        fail_msg(
            CqStatus::Error,
            &format!("selfcheck families failed: {}", failing.join(", ")),
        )
    }
}
