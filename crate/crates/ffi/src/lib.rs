//! C ABI over `sphint`.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_load`
//! style functions and released with the matching `*_free`. Every fallible
//! call returns a [`SphintStatus`]; on failure the message is available from
//! [`sphint_last_error`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sphint::pointsets::{load_pointset, WeightMode};
use sphint::solver::{solve_stage1, DiscreteSolution, ProblemSpec, RightHandSide};
use sphint::{equal_area_points, ContinuousKernel, Error, ModifiedMoments, QuadratureRule, SingularKernel, SpherePoint};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphintStatus {
    Ok = 0,
    /// A parameter is out of range or malformed.
    InvalidArgument = 1,
    Io = 2,
    /// The stage-1 matrix is singular to working precision.
    Singular = 3,
    Numerical = 4,
    NullPointer = 5,
    /// A Rust panic was caught at the boundary.
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphintKernelFamily {
    One = 0,
    Algebraic = 1,
    Log = 2,
    Mixed = 3,
}

/// Singular factor `h`. `nu1` is the exponent of the algebraic family and
/// the `|x - y|` exponent of the mixed family; `nu2` is the `|x + y|`
/// exponent of the mixed family.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SphintKernel {
    pub family: SphintKernelFamily,
    pub nu1: f64,
    pub nu2: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphintContinuousKind {
    /// `K = c`
    Constant = 0,
    /// `K = sin(c |x - y|)`
    Sin = 1,
    /// `K = cos(c |x - y|)`
    Cos = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SphintContinuous {
    pub kind: SphintContinuousKind,
    pub c: f64,
}

/// Opaque quadrature rule.
pub struct SphintRule(QuadratureRule);

/// Opaque stage-1 solution; evaluates the stage-2 interpolant.
pub struct SphintSolution(DiscreteSolution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SphintStatus {
    match e {
        Error::Domain(_) | Error::Validation(_) | Error::Parse { .. } => SphintStatus::InvalidArgument,
        Error::Io { .. } => SphintStatus::Io,
        Error::Singular { .. } => SphintStatus::Singular,
        Error::Numerical(_) => SphintStatus::Numerical,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> SphintStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SphintStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer passed for `{what}`"));
            SphintStatus::NullPointer
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {msg}"));
            SphintStatus::Internal
        }
    }
}

fn non_null<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    // SAFETY: the caller promises `p` is null or points to a live `T`.
    unsafe { p.as_ref() }.ok_or(Failure::Null(what))
}

fn out_slot<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    // SAFETY: the caller promises `p` is null or writable.
    unsafe { p.as_mut() }.ok_or(Failure::Null(what))
}

impl SphintKernel {
    fn to_kernel(self) -> Result<SingularKernel, Error> {
        let k = match self.family {
            SphintKernelFamily::One => SingularKernel::One,
            SphintKernelFamily::Algebraic => SingularKernel::Algebraic { nu: self.nu1 },
            SphintKernelFamily::Log => SingularKernel::Log,
            SphintKernelFamily::Mixed => SingularKernel::Mixed {
                nu1: self.nu1,
                nu2: self.nu2,
            },
        };
        k.validate()?;
        Ok(k)
    }
}

impl SphintContinuous {
    fn to_kernel(self) -> Result<ContinuousKernel, Error> {
        if !self.c.is_finite() {
            return Err(Error::Validation(format!("continuous kernel parameter {} is not finite", self.c)));
        }
        Ok(match self.kind {
            SphintContinuousKind::Constant => ContinuousKernel::Constant(self.c),
            SphintContinuousKind::Sin => ContinuousKernel::SinScaled(self.c),
            SphintContinuousKind::Cos => ContinuousKernel::CosScaled(self.c),
        })
    }
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sphint_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sphint_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads a point file. With `weights_from_file` nonzero the fourth column
/// supplies the weights; otherwise all weights are `4π/m`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sphint_rule_load(
    path: *const c_char,
    weights_from_file: i32,
    out: *mut *mut SphintRule,
) -> SphintStatus {
    guard(|| {
        let out = out_slot(out, "out")?;
        non_null(path, "path")?;
        // SAFETY: checked non-null; NUL termination is the caller's contract.
        let path = unsafe { CStr::from_ptr(path) }
            .to_str()
            .map_err(|_| Error::Validation("path is not valid UTF-8".into()))?;
        let mode = if weights_from_file != 0 { WeightMode::FromFile } else { WeightMode::Equal };
        let rule = load_pointset(path, mode)?;
        *out = Box::into_raw(Box::new(SphintRule(rule)));
        Ok(())
    })
}

/// Equal-area points with equal weights.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sphint_rule_equal_area(m: usize, out: *mut *mut SphintRule) -> SphintStatus {
    guard(|| {
        let out = out_slot(out, "out")?;
        *out = Box::into_raw(Box::new(SphintRule(equal_area_points(m)?)));
        Ok(())
    })
}

/// Rule from `m` points stored as `xyz[3j..3j+3]` (normalized on input).
/// `weights` may be NULL for equal weights `4π/m`.
///
/// # Safety
/// `xyz` must hold `3m` doubles, `weights` (if non-null) `m`, and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn sphint_rule_from_arrays(
    xyz: *const f64,
    weights: *const f64,
    m: usize,
    out: *mut *mut SphintRule,
) -> SphintStatus {
    guard(|| {
        let out = out_slot(out, "out")?;
        non_null(xyz, "xyz")?;
        // SAFETY: length is the caller's contract.
        let coords = unsafe { std::slice::from_raw_parts(xyz, 3 * m) };
        let points = coords
            .chunks_exact(3)
            .map(|c| SpherePoint::new(c[0], c[1], c[2]))
            .collect::<Result<Vec<_>, _>>()?;
        let rule = if weights.is_null() {
            QuadratureRule::equal_weights(points, "ffi")?
        } else {
            // SAFETY: length is the caller's contract.
            let w = unsafe { std::slice::from_raw_parts(weights, m) };
            QuadratureRule::new(points, w.to_vec(), "ffi")?
        };
        *out = Box::into_raw(Box::new(SphintRule(rule)));
        Ok(())
    })
}

/// Number of points, or 0 for NULL.
///
/// # Safety
/// `rule` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sphint_rule_len(rule: *const SphintRule) -> usize {
    // SAFETY: the caller's contract.
    unsafe { rule.as_ref() }.map_or(0, |r| r.0.len())
}

/// Copies the weights into `out[0..m]`.
///
/// # Safety
/// `rule` must be a live handle and `out` hold `sphint_rule_len(rule)`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn sphint_rule_weights(rule: *const SphintRule, out: *mut f64) -> SphintStatus {
    guard(|| {
        let rule = non_null(rule, "rule")?;
        non_null(out, "out")?;
        // SAFETY: length is the caller's contract.
        let dst = unsafe { std::slice::from_raw_parts_mut(out, rule.0.len()) };
        dst.copy_from_slice(rule.0.weights());
        Ok(())
    })
}

/// # Safety
/// `rule` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sphint_rule_free(rule: *mut SphintRule) {
    if !rule.is_null() {
        // SAFETY: created by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(rule) });
    }
}

/// Marcinkiewicz–Zygmund constant of the rule at degree `n`.
///
/// # Safety
/// `rule` must be a live handle and `eta` writable.
#[no_mangle]
pub unsafe extern "C" fn sphint_mz_eta(rule: *const SphintRule, n: usize, eta: *mut f64) -> SphintStatus {
    guard(|| {
        let rule = non_null(rule, "rule")?;
        let eta = out_slot(eta, "eta")?;
        *eta = sphint::mz::mz_eta(&rule.0, n)?.0;
        Ok(())
    })
}

/// Modified moments `μ_0..μ_n` into `out[0..=n]`.
///
/// # Safety
/// `out` must hold `n + 1` doubles.
#[no_mangle]
pub unsafe extern "C" fn sphint_moments(kernel: SphintKernel, n: usize, out: *mut f64) -> SphintStatus {
    guard(|| {
        non_null(out, "out")?;
        let mu = ModifiedMoments::compute(kernel.to_kernel()?, n)?;
        // SAFETY: length is the caller's contract.
        let dst = unsafe { std::slice::from_raw_parts_mut(out, n + 1) };
        dst.copy_from_slice(mu.values());
        Ok(())
    })
}

/// Solves stage 1 for constant right-hand side `f` at degree `n`.
///
/// # Safety
/// `rule` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sphint_solve(
    rule: *const SphintRule,
    kernel: SphintKernel,
    k: SphintContinuous,
    f: f64,
    n: usize,
    out: *mut *mut SphintSolution,
) -> SphintStatus {
    guard(|| {
        let rule = non_null(rule, "rule")?;
        let out = out_slot(out, "out")?;
        let spec = ProblemSpec {
            kernel: kernel.to_kernel()?,
            k: k.to_kernel()?,
            f: RightHandSide::Constant(f),
            n,
            rule: rule.0.clone(),
        };
        *out = Box::into_raw(Box::new(SphintSolution(solve_stage1(spec)?)));
        Ok(())
    })
}

/// Number of nodal values, or 0 for NULL.
///
/// # Safety
/// `sol` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sphint_solution_len(sol: *const SphintSolution) -> usize {
    // SAFETY: the caller's contract.
    unsafe { sol.as_ref() }.map_or(0, |s| s.0.nodal_values.len())
}

/// Copies the stage-1 nodal values into `out`.
///
/// # Safety
/// `out` must hold `sphint_solution_len(sol)` doubles.
#[no_mangle]
pub unsafe extern "C" fn sphint_solution_nodal_values(sol: *const SphintSolution, out: *mut f64) -> SphintStatus {
    guard(|| {
        let sol = non_null(sol, "sol")?;
        non_null(out, "out")?;
        // SAFETY: length is the caller's contract.
        let dst = unsafe { std::slice::from_raw_parts_mut(out, sol.0.nodal_values.len()) };
        dst.copy_from_slice(&sol.0.nodal_values);
        Ok(())
    })
}

/// Stage-2 value at the direction `(x, y, z)` (normalized on input).
///
/// # Safety
/// `sol` must be a live handle and `value` writable.
#[no_mangle]
pub unsafe extern "C" fn sphint_solution_evaluate(
    sol: *const SphintSolution,
    x: f64,
    y: f64,
    z: f64,
    value: *mut f64,
) -> SphintStatus {
    guard(|| {
        let sol = non_null(sol, "sol")?;
        let value = out_slot(value, "value")?;
        *value = sol.0.evaluate(&SpherePoint::new(x, y, z)?);
        Ok(())
    })
}

/// Stage-1 residual `||M φ - b||_∞` and the MZ constant of the run.
///
/// # Safety
/// `sol` must be a live handle; `residual` and `eta` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn sphint_solution_diagnostics(
    sol: *const SphintSolution,
    residual: *mut f64,
    eta: *mut f64,
) -> SphintStatus {
    guard(|| {
        let sol = non_null(sol, "sol")?;
        // SAFETY: null or writable per the caller's contract.
        if let Some(r) = unsafe { residual.as_mut() } {
            *r = sol.0.residual;
        }
        // SAFETY: as above.
        if let Some(e) = unsafe { eta.as_mut() } {
            *e = sol.0.gamma.eta;
        }
        Ok(())
    })
}

/// # Safety
/// `sol` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sphint_solution_free(sol: *mut SphintSolution) {
    if !sol.is_null() {
        // SAFETY: created by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(sol) });
    }
}
