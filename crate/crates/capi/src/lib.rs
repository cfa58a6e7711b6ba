//! C ABI for the mukai-walls engine.
//!
//! Conventions:
//! * opaque handles (`MwSurface`) own validated surface data;
//! * every function returns an `MwStatus` code; on failure a thread-local
//!   message is readable through `mw_last_error`;
//! * payloads travel as JSON strings with exact "p/q" rationals, matching
//!   the CLI schemas; returned strings are freed with `mw_string_free`.

use mukai_walls::charge::StabilityPoint;
use mukai_walls::config::{
    self, category_wall_json, rat_json, stability_wall_json, vector_json, IsoConfig, SurfaceConfig,
};
use mukai_walls::error::Error;
use mukai_walls::ratio::parse_rat;
use mukai_walls::star;
use mukai_walls::surface::NSClass;
use mukai_walls::walls::{self, Region};
use mukai_walls::{BetaFrame, MukaiVector};
use serde_json::{json, Value};
use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MwStatus {
    MwOk = 0,
    MwErrInvalidArgument = 1,
    MwErrInternal = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(e: &Error) -> MwStatus {
    match e.exit_code() {
        2 => MwStatus::MwErrInternal,
        _ => MwStatus::MwErrInvalidArgument,
    }
}

/// Opaque surface handle: validated lattice data plus the configured beta.
pub struct MwSurface {
    config: SurfaceConfig,
    frame: BetaFrame,
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, Error> {
    if ptr.is_null() {
        return Err(Error::Parse("null string argument".into()));
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| Error::Parse("string argument is not UTF-8".into()))
}

fn write_out(value: &Value, out: *mut *mut c_char) -> MwStatus {
    let text = value.to_string();
    match CString::new(text) {
        Ok(cs) => {
            unsafe { *out = cs.into_raw() };
            MwStatus::MwOk
        }
        Err(_) => {
            set_error("output contained an interior NUL");
            MwStatus::MwErrInternal
        }
    }
}

fn catch(out: *mut *mut c_char, f: impl FnOnce() -> Result<Value, Error>) -> MwStatus {
    if out.is_null() {
        set_error("null output pointer");
        return MwStatus::MwErrInvalidArgument;
    }
    unsafe { *out = ptr::null_mut() };
    match f() {
        Ok(v) => write_out(&v, out),
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Last error message for this thread; valid until the next failing call.
#[no_mangle]
pub extern "C" fn mw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Free a string returned by this library.
///
/// # Safety
/// `s` must have been returned by a `mukai-walls` function and not freed yet.
#[no_mangle]
pub unsafe extern "C" fn mw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Create a surface handle from a JSON configuration (same schema as the
/// CLI config file). On success `*out` owns the handle.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mw_surface_from_json(
    json: *const c_char,
    out: *mut *mut MwSurface,
) -> MwStatus {
    if out.is_null() {
        set_error("null output pointer");
        return MwStatus::MwErrInvalidArgument;
    }
    unsafe { *out = ptr::null_mut() };
    let parsed = (|| -> Result<MwSurface, Error> {
        let text = unsafe { read_str(json) }?;
        let config = SurfaceConfig::from_json(text)?;
        let frame = config.frame()?;
        Ok(MwSurface { config, frame })
    })();
    match parsed {
        Ok(s) => {
            unsafe { *out = Box::into_raw(Box::new(s)) };
            MwStatus::MwOk
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Destroy a surface handle.
///
/// # Safety
/// `surface` must come from `mw_surface_from_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mw_surface_free(surface: *mut MwSurface) {
    if !surface.is_null() {
        drop(unsafe { Box::from_raw(surface) });
    }
}

unsafe fn surface_ref<'a>(s: *const MwSurface) -> Result<&'a MwSurface, Error> {
    if s.is_null() {
        return Err(Error::Parse("null surface handle".into()));
    }
    Ok(unsafe { &*s })
}

/// Frame constants of the handle: (H^2), b, r0, b0, d_min, delta.
///
/// # Safety
/// `surface` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mw_surface_report(
    surface: *const MwSurface,
    out: *mut *mut c_char,
) -> MwStatus {
    catch(out, || {
        let s = unsafe { surface_ref(surface) }?;
        let f = &s.frame;
        Ok(json!({
            "epsilon": f.surface.epsilon(),
            "rho": f.surface.rho,
            "H_sq": rat_json(&f.surface.h2()),
            "b": rat_json(&f.b),
            "r0": f.r0.to_string(),
            "b0": f.b0.to_string(),
            "d_min": rat_json(&f.d_min),
            "delta": rat_json(&f.delta),
        }))
    })
}

fn parse_vec(s: &MwSurface, text: &str) -> Result<MukaiVector, Error> {
    config::parse_vector(text, s.frame.surface.rho)
}

/// Mukai pairing of two vectors given as comma-separated rationals
/// "r,c1...,s"; the result is a rational string.
///
/// # Safety
/// All pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn mw_mukai_pairing(
    surface: *const MwSurface,
    x: *const c_char,
    y: *const c_char,
    out: *mut *mut c_char,
) -> MwStatus {
    catch(out, || {
        let s = unsafe { surface_ref(surface) }?;
        let xv = parse_vec(s, unsafe { read_str(x) }?)?;
        let yv = parse_vec(s, unsafe { read_str(y) }?)?;
        let p = mukai_walls::mukai::pairing(&xv, &yv, &s.frame.surface)?;
        Ok(json!({ "pairing": rat_json(&p) }))
    })
}

/// Walls for categories at the handle's beta, with thresholds (K3 only).
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn mw_category_walls(
    surface: *const MwSurface,
    out: *mut *mut c_char,
) -> MwStatus {
    catch(out, || {
        let s = unsafe { surface_ref(surface) }?;
        let walls = walls::enumerate_r_beta(&s.frame)?;
        let thresholds = walls::category_thresholds(&s.frame)?;
        let xi0 = s.config.eta_direction_class(&s.frame.surface).ok();
        let arr: Vec<Value> = walls
            .iter()
            .map(|w| {
                let chart = xi0
                    .as_ref()
                    .and_then(|xi| config::slice_chart(&w.geometry, xi, &s.frame.surface));
                category_wall_json(w, chart.as_ref())
            })
            .collect();
        Ok(json!({
            "walls": arr,
            "thresholds_half_omega_sq": thresholds.iter().map(rat_json).collect::<Vec<_>>(),
        }))
    })
}

/// Stability wall candidates for v over the s-interval [smin, smax] at the
/// handle's beta.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn mw_stability_walls(
    surface: *const MwSurface,
    v: *const c_char,
    smin: *const c_char,
    smax: *const c_char,
    out: *mut *mut c_char,
) -> MwStatus {
    catch(out, || {
        let s = unsafe { surface_ref(surface) }?;
        let vec = parse_vec(s, unsafe { read_str(v) }?)?;
        let region = Region::FixedBetaInterval {
            s_lo: parse_rat(unsafe { read_str(smin) }?)?,
            s_hi: parse_rat(unsafe { read_str(smax) }?)?,
        };
        let res = walls::stability_wall_candidates(&vec, &s.frame, &region)?;
        Ok(json!({
            "walls": res.walls.iter().map(stability_wall_json).collect::<Vec<_>>(),
            "boundary_dropped": res.boundary_dropped.iter().map(vector_json).collect::<Vec<_>>(),
        }))
    })
}

/// Decide a star condition (`which` in {1,2,3}) for (v, s).
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn mw_star_check(
    surface: *const MwSurface,
    v: *const c_char,
    s_val: *const c_char,
    which: c_int,
    out: *mut *mut c_char,
) -> MwStatus {
    catch(out, || {
        let s = unsafe { surface_ref(surface) }?;
        let vec = parse_vec(s, unsafe { read_str(v) }?)?;
        let sv = parse_rat(unsafe { read_str(s_val) }?)?;
        let rep = match which {
            1 => star::check_star1(&vec, &s.frame, &sv)?,
            2 => star::check_star2(&vec, &s.frame, &sv)?,
            3 => star::check_star3(&vec, &s.frame, &sv)?,
            _ => return Err(Error::Parse("which must be 1, 2 or 3".into())),
        };
        Ok(json!({
            "holds": rep.holds,
            "lattice_level_only": rep.lattice_level_only,
            "threshold_s": rep.threshold_s.as_ref().map(rat_json),
            "witnesses": rep.witnesses.len(),
        }))
    })
}

/// Transform a parameter point (eta, s) by an isometry described in JSON.
/// An empty eta string means eta = 0.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn mw_fm_param(
    surface: *const MwSurface,
    iso_json: *const c_char,
    eta: *const c_char,
    s_val: *const c_char,
    out: *mut *mut c_char,
) -> MwStatus {
    catch(out, || {
        let s = unsafe { surface_ref(surface) }?;
        let iso = IsoConfig::from_json(unsafe { read_str(iso_json) }?)?.build(&s.frame.surface)?;
        let rho = s.frame.surface.rho;
        let eta_class = match unsafe { read_str(eta) }? {
            "" => NSClass::zero(rho),
            text => config::parse_ns_class(text, rho)?,
        };
        let frame = BetaFrame::new(s.frame.surface.clone(), iso.beta.clone())?;
        let p = StabilityPoint::new(&frame, eta_class, parse_rat(unsafe { read_str(s_val) }?)?)?;
        let q = mukai_walls::fm::param_transform(&iso, &p, &frame)?;
        Ok(json!({
            "eta": config::ns_json(&q.eta),
            "s": rat_json(&q.s),
        }))
    })
}

/// Gaussian binomial [n choose m]_q as a {"exp": "coeff"} JSON map.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mw_q_binomial(n: c_int, m: c_int, out: *mut *mut c_char) -> MwStatus {
    catch(out, || {
        if n < 0 || m < 0 {
            return Err(Error::Parse("q-binomial arguments must be nonnegative".into()));
        }
        let p = mukai_walls::qpoly::q_binomial(n as u32, m as u32)?;
        Ok(json!({ "poly": config::poly_json(&p) }))
    })
}
