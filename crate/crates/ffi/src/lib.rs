//! C interface to `chiralchain`.
//!
//! Every entry point returns a [`ChiralStatus`] and writes results through
//! out-pointers. Objects live behind opaque handles that the caller frees
//! with the matching `*_free` function. After a failure,
//! [`chiral_last_error`] copies the message of the most recent error on the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use chiralchain::dynamics::{delta_correlation, steady_profile_upto};
use chiralchain::entanglement::{block_entropy, central_charge_fit};
use chiralchain::gaussian::{evolve, ground_state, GaussianState, QuenchSetup};
use chiralchain::model::{gap, C64};
use chiralchain::numerics::{pfaffian, AntisymmetricMatrix};
use chiralchain::spincorr::{self, Axis};
use chiralchain::{Error, ModelParams};

/// Result of every call; zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiralStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    OutOfRange = 3,
    Dimension = 4,
    NotAntisymmetric = 5,
    Domain = 6,
    Consistency = 7,
    Config = 8,
    Io = 9,
    Panic = 10,
}

/// Spin component of a correlator.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiralAxis {
    X = 0,
    Y = 1,
}

impl From<ChiralAxis> for Axis {
    fn from(a: ChiralAxis) -> Self {
        match a {
            ChiralAxis::X => Axis::X,
            ChiralAxis::Y => Axis::Y,
        }
    }
}

/// Ground state of one Hamiltonian.
pub struct ChiralModel {
    params: ModelParams,
    state: GaussianState,
}

/// Sudden quench between two Hamiltonians of equal size.
pub struct ChiralQuench {
    setup: QuenchSetup,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn status_of(e: &Error) -> ChiralStatus {
    match e {
        Error::InvalidParameter { .. } => ChiralStatus::InvalidParameter,
        Error::OutOfRange { .. } => ChiralStatus::OutOfRange,
        Error::Dimension(_) => ChiralStatus::Dimension,
        Error::NotAntisymmetric(_) => ChiralStatus::NotAntisymmetric,
        Error::Domain(_) => ChiralStatus::Domain,
        Error::Consistency(_) => ChiralStatus::Consistency,
        Error::Config(_) => ChiralStatus::Config,
        Error::Io(_) => ChiralStatus::Io,
    }
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

enum Failure {
    Null,
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ChiralStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ChiralStatus::Ok,
        Ok(Err(Failure::Null)) => {
            set_error("null pointer argument".into());
            ChiralStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            ChiralStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null)
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null)
}

/// Copies the last error message on this thread into `buf` (NUL
/// terminated, truncated to `len` bytes) and returns the full message
/// length without the terminator.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn chiral_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn chiral_version() -> *const c_char {
    static VERSION: std::sync::OnceLock<CString> = std::sync::OnceLock::new();
    VERSION
        .get_or_init(|| CString::new(env!("CARGO_PKG_VERSION")).unwrap())
        .as_ptr()
}

/// Builds the ground state of the chain with `n` sites (even, at least 4).
///
/// # Safety
/// `model` must be a valid pointer; on success it receives a handle to
/// release with [`chiral_model_free`].
#[no_mangle]
pub unsafe extern "C" fn chiral_model_new(
    gamma: f64,
    d: f64,
    h: f64,
    alpha: f64,
    n: usize,
    kac_normalize: bool,
    model: *mut *mut ChiralModel,
) -> ChiralStatus {
    guard(|| {
        let slot = out(model)?;
        let params = ModelParams::new(gamma, d, h, alpha, n)?.with_kac(kac_normalize);
        let state = ground_state(&params)?;
        *slot = Box::into_raw(Box::new(ChiralModel { params, state }));
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from [`chiral_model_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chiral_model_free(model: *mut ChiralModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Spectral gap; zero when gapless.
///
/// # Safety
/// `model` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chiral_model_gap(model: *const ChiralModel, value: *mut f64) -> ChiralStatus {
    guard(|| {
        let m = handle(model)?;
        *out(value)? = gap(&m.params);
        Ok(())
    })
}

/// Ground-state energy.
///
/// # Safety
/// `model` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chiral_model_energy(model: *const ChiralModel, value: *mut f64) -> ChiralStatus {
    guard(|| {
        let m = handle(model)?;
        *out(value)? = m.state.energy();
        Ok(())
    })
}

/// `⟨σ^z⟩`.
///
/// # Safety
/// `model` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chiral_model_magnetization(
    model: *const ChiralModel,
    value: *mut f64,
) -> ChiralStatus {
    guard(|| {
        let m = handle(model)?;
        *out(value)? = chiralchain::gaussian::magnetization_z(&m.state);
        Ok(())
    })
}

/// `⟨σ^a_i σ^b_{i+r}⟩` for `a, b ∈ {x, y}` and `1 <= r <= n/2`.
///
/// # Safety
/// `model` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chiral_model_spin_correlator(
    model: *const ChiralModel,
    a: ChiralAxis,
    b: ChiralAxis,
    r: usize,
    value: *mut f64,
) -> ChiralStatus {
    guard(|| {
        let m = handle(model)?;
        *out(value)? = spincorr::spin_correlator(&m.state, a.into(), b.into(), r)?;
        Ok(())
    })
}

/// `⟨σ^z_i σ^z_{i+r}⟩`.
///
/// # Safety
/// `model` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chiral_model_zz_correlator(
    model: *const ChiralModel,
    r: usize,
    value: *mut f64,
) -> ChiralStatus {
    guard(|| {
        let m = handle(model)?;
        *out(value)? = spincorr::czz_correlator(&m.state, r)?;
        Ok(())
    })
}

/// Chiral order parameter.
///
/// # Safety
/// `model` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chiral_model_chiral_order(
    model: *const ChiralModel,
    value: *mut f64,
) -> ChiralStatus {
    guard(|| {
        let m = handle(model)?;
        *out(value)? = spincorr::chiral_order(&m.state)?;
        Ok(())
    })
}

/// Two-site mutual information in bits at distance `r`.
///
/// # Safety
/// `model` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chiral_model_mutual_information(
    model: *const ChiralModel,
    r: usize,
    value: *mut f64,
) -> ChiralStatus {
    guard(|| {
        let m = handle(model)?;
        *out(value)? = spincorr::mutual_information(&m.state, r)?;
        Ok(())
    })
}

/// Entanglement entropy in bits of `l` contiguous sites.
///
/// # Safety
/// `model` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chiral_model_block_entropy(
    model: *const ChiralModel,
    l: usize,
    value: *mut f64,
) -> ChiralStatus {
    guard(|| {
        let m = handle(model)?;
        *out(value)? = block_entropy(&m.state, l)?;
        Ok(())
    })
}

/// Effective central charge fitted over block sizes `l_min..=l_max`.
///
/// # Safety
/// `model` must be a live handle; `c_eff` and `r2` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn chiral_model_central_charge(
    model: *const ChiralModel,
    l_min: usize,
    l_max: usize,
    c_eff: *mut f64,
    r2: *mut f64,
) -> ChiralStatus {
    guard(|| {
        let m = handle(model)?;
        let (c, q) = (out(c_eff)?, out(r2)?);
        let fit = central_charge_fit(&m.params, (l_min, l_max))?;
        *c = fit.slope;
        *q = fit.r2;
        Ok(())
    })
}

/// Quench from the ground state of `pre` under the Hamiltonian of `post`.
///
/// # Safety
/// `pre` and `post` must be live model handles and `quench` a valid
/// pointer; on success it receives a handle to release with
/// [`chiral_quench_free`].
#[no_mangle]
pub unsafe extern "C" fn chiral_quench_new(
    pre: *const ChiralModel,
    post: *const ChiralModel,
    quench: *mut *mut ChiralQuench,
) -> ChiralStatus {
    guard(|| {
        let (a, b) = (handle(pre)?, handle(post)?);
        let slot = out(quench)?;
        let setup = QuenchSetup::new(a.params, b.params)?;
        *slot = Box::into_raw(Box::new(ChiralQuench { setup }));
        Ok(())
    })
}

/// # Safety
/// `quench` must be null or a handle from [`chiral_quench_new`] not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn chiral_quench_free(quench: *mut ChiralQuench) {
    if !quench.is_null() {
        drop(Box::from_raw(quench));
    }
}

/// `C_mn(t) - C_mn(∞)` at `count` increasing times; real and imaginary
/// parts go to `re` and `im`.
///
/// # Safety
/// `quench` must be a live handle; `times`, `re` and `im` must each point
/// to `count` elements.
#[no_mangle]
pub unsafe extern "C" fn chiral_quench_delta_correlation(
    quench: *const ChiralQuench,
    m: usize,
    n: usize,
    times: *const f64,
    count: usize,
    re: *mut f64,
    im: *mut f64,
) -> ChiralStatus {
    guard(|| {
        let q = handle(quench)?;
        if times.is_null() || re.is_null() || im.is_null() {
            return Err(Failure::Null);
        }
        let ts = std::slice::from_raw_parts(times, count);
        let series = delta_correlation(&q.setup, m, n, ts)?;
        let re = std::slice::from_raw_parts_mut(re, count);
        let im = std::slice::from_raw_parts_mut(im, count);
        for (k, v) in series.values.iter().enumerate() {
            re[k] = v.re;
            im[k] = v.im;
        }
        Ok(())
    })
}

/// Block entropy of `l` sites at time `t` after the quench.
///
/// # Safety
/// `quench` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chiral_quench_block_entropy(
    quench: *const ChiralQuench,
    l: usize,
    t: f64,
    value: *mut f64,
) -> ChiralStatus {
    guard(|| {
        let q = handle(quench)?;
        let slot = out(value)?;
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "t",
                reason: format!("time must be finite and non-negative, got {t}"),
            }
            .into());
        }
        *slot = block_entropy(&evolve(&q.setup, t)?, l)?;
        Ok(())
    })
}

/// Steady-state mutual information and `C^xx` for `r = 1..=count`.
///
/// # Safety
/// `quench` must be a live handle; `mutual_information` and `cxx` must
/// each point to `count` elements.
#[no_mangle]
pub unsafe extern "C" fn chiral_quench_steady_profile(
    quench: *const ChiralQuench,
    count: usize,
    mutual_information: *mut f64,
    cxx: *mut f64,
) -> ChiralStatus {
    guard(|| {
        let q = handle(quench)?;
        if mutual_information.is_null() || cxx.is_null() {
            return Err(Failure::Null);
        }
        let half = q.setup.n() / 2;
        if count < 1 || count > half {
            return Err(Error::OutOfRange {
                what: "count",
                value: count,
                lo: 1,
                hi: half,
            }
            .into());
        }
        let prof = steady_profile_upto(&q.setup, count)?;
        std::slice::from_raw_parts_mut(mutual_information, count)
            .copy_from_slice(&prof.mutual_information);
        std::slice::from_raw_parts_mut(cxx, count).copy_from_slice(&prof.cxx);
        Ok(())
    })
}

/// Pfaffian of a `dim × dim` complex antisymmetric matrix given row-major
/// as separate real and imaginary arrays.
///
/// # Safety
/// `re` and `im` must each point to `dim * dim` elements; `pf_re` and
/// `pf_im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn chiral_pfaffian(
    dim: usize,
    re: *const f64,
    im: *const f64,
    pf_re: *mut f64,
    pf_im: *mut f64,
) -> ChiralStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(Failure::Null);
        }
        let (or, oi) = (out(pf_re)?, out(pf_im)?);
        let len = dim
            .checked_mul(dim)
            .ok_or_else(|| Error::Dimension(format!("dimension {dim} overflows")))?;
        let re = std::slice::from_raw_parts(re, len);
        let im = std::slice::from_raw_parts(im, len);
        let data: Vec<C64> = re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect();
        let pf = pfaffian(&AntisymmetricMatrix::from_full(dim, data)?);
        *or = pf.re;
        *oi = pf.im;
        Ok(())
    })
}
