//! C ABI for tacheck.
//!
//! Models and automata are opaque handles owned by the caller and released
//! with the matching `_free` function. Every fallible call returns a
//! [`TcStatus`]; on failure [`tc_last_error`] describes the problem until the
//! next call on the same thread. Strings handed out by the library must be
//! released with [`tc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tacheck::buchi_check::{check, Mode, SearchConfig, Verdict};
use tacheck::model::generators::{gen_model, gen_property, Family, Params};
use tacheck::model::{parse_model, print_model, product, Network, Tba, Transition};
use tacheck::omega_iter::analyze;
use tacheck::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Model = 4,
    UnknownFamily = 5,
    Path = 6,
    GuardRail = 7,
    Io = 8,
    InvalidArgument = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TcMode {
    Dfss = 0,
    Idfss = 1,
}

/// Counters of one emptiness search.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TcStats {
    pub visited_nodes: u64,
    pub subsumption_skips: u64,
    pub iterability_checks: u64,
    /// Nonzero when an accepting cycle was found.
    pub cycle_found: u8,
}

/// Verdict of the iterability test on a transition path.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TcIterability {
    pub iterable: u8,
    /// Compositions of the decision procedure.
    pub compositions: u64,
    pub squarings: u64,
}

/// A network of timed automata.
pub struct TcModel(Network);

/// A flattened timed Büchi automaton.
pub struct TcAutomaton(Tba);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TcStatus {
    match e {
        Error::Parse { .. } => TcStatus::Parse,
        Error::Model(_) => TcStatus::Model,
        Error::UnknownFamily(_) => TcStatus::UnknownFamily,
        Error::Path(_) => TcStatus::Path,
        Error::GuardRail(_) => TcStatus::GuardRail,
        Error::Io(_) => TcStatus::Io,
    }
}

struct Fail(TcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `f`, recording failures and turning panics into [`TcStatus::Panic`].
fn guarded(f: impl FnOnce() -> Result<(), Fail>) -> TcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TcStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(msg);
            TcStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(TcStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(TcStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(TcStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| Fail(TcStatus::NullPointer, format!("{what} is null")))
}

fn family(name: &str) -> Result<Family, Fail> {
    Ok(name.parse::<Family>()?)
}

fn positive(v: i64, what: &str) -> Result<i64, Fail> {
    if v < 1 {
        return Err(Fail(TcStatus::InvalidArgument, format!("{what} must be positive")));
    }
    Ok(v)
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into the library.
#[no_mangle]
pub extern "C" fn tc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn tc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a model in the textual format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_model_parse(text: *const c_char, out: *mut *mut TcModel) -> TcStatus {
    guarded(|| {
        let out = out_arg(out, "out")?;
        let net = parse_model(str_arg(text, "text")?)?;
        *out = Box::into_raw(Box::new(TcModel(net)));
        Ok(())
    })
}

/// Generates a benchmark network with constants multiplied by `scale`.
/// The CSMA/CD switches are ignored by other families.
///
/// # Safety
/// `family_name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_model_generate(
    family_name: *const c_char,
    n: usize,
    fixed: bool,
    nonzeno: bool,
    scale: i64,
    out: *mut *mut TcModel,
) -> TcStatus {
    guarded(|| {
        let out = out_arg(out, "out")?;
        let f = family(str_arg(family_name, "family")?)?;
        if n == 0 {
            return Err(Fail(TcStatus::InvalidArgument, "n must be positive".into()));
        }
        let params = Params { fixed, nonzeno, ..Params::default() };
        let net = gen_model(f, n, &params).scaled(positive(scale, "scale")?);
        *out = Box::into_raw(Box::new(TcModel(net)));
        Ok(())
    })
}

/// Generates the property automaton of a benchmark family.
///
/// # Safety
/// `family_name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_property_generate(
    family_name: *const c_char,
    n: usize,
    scale: i64,
    out: *mut *mut TcModel,
) -> TcStatus {
    guarded(|| {
        let out = out_arg(out, "out")?;
        let f = family(str_arg(family_name, "family")?)?;
        if n == 0 {
            return Err(Fail(TcStatus::InvalidArgument, "n must be positive".into()));
        }
        let net = gen_property(f, n, &Params::default()).scaled(positive(scale, "scale")?);
        *out = Box::into_raw(Box::new(TcModel(net)));
        Ok(())
    })
}

/// Prints a model in the textual format. Free the result with
/// [`tc_string_free`].
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_model_to_text(model: *const TcModel, out: *mut *mut c_char) -> TcStatus {
    guarded(|| {
        let out = out_arg(out, "out")?;
        let m = ref_arg(model, "model")?;
        *out = CString::new(print_model(&m.0)).unwrap().into_raw();
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn tc_model_free(model: *mut TcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Flattens a network into a single automaton.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_automaton_flatten(model: *const TcModel, out: *mut *mut TcAutomaton) -> TcStatus {
    guarded(|| {
        let out = out_arg(out, "out")?;
        let tba = ref_arg(model, "model")?.0.flatten()?;
        *out = Box::into_raw(Box::new(TcAutomaton(tba)));
        Ok(())
    })
}

/// Synchronous product of a network with a property network.
///
/// # Safety
/// `model` and `property` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_automaton_product(
    model: *const TcModel,
    property: *const TcModel,
    out: *mut *mut TcAutomaton,
) -> TcStatus {
    guarded(|| {
        let out = out_arg(out, "out")?;
        let tba = product(&ref_arg(model, "model")?.0, &ref_arg(property, "property")?.0)?;
        *out = Box::into_raw(Box::new(TcAutomaton(tba)));
        Ok(())
    })
}

/// # Safety
/// `a` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn tc_automaton_free(a: *mut TcAutomaton) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Number of states, or 0 for a null handle.
///
/// # Safety
/// `a` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tc_automaton_num_states(a: *const TcAutomaton) -> usize {
    a.as_ref().map_or(0, |a| a.0.num_states())
}

/// Number of clocks, or 0 for a null handle.
///
/// # Safety
/// `a` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tc_automaton_num_clocks(a: *const TcAutomaton) -> usize {
    a.as_ref().map_or(0, |a| a.0.num_clocks())
}

/// Number of transitions, or 0 for a null handle.
///
/// # Safety
/// `a` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tc_automaton_num_transitions(a: *const TcAutomaton) -> usize {
    a.as_ref().map_or(0, |a| a.0.transitions.len())
}

/// Runs the emptiness search.
///
/// # Safety
/// `a` must be a live handle and `stats` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_check(a: *const TcAutomaton, mode: TcMode, seed: u64, stats: *mut TcStats) -> TcStatus {
    guarded(|| {
        let stats = out_arg(stats, "stats")?;
        let tba = &ref_arg(a, "automaton")?.0;
        let mode = match mode {
            TcMode::Dfss => Mode::Dfss,
            TcMode::Idfss => Mode::Idfss,
        };
        let s = check(tba, &SearchConfig::new(mode, seed)).stats;
        *stats = TcStats {
            visited_nodes: s.visited_nodes,
            subsumption_skips: s.subsumption_skips,
            iterability_checks: s.iterability_checks,
            cycle_found: u8::from(s.result == Verdict::CycleFound),
        };
        Ok(())
    })
}

/// Decides whether the cycle of transitions `path[0..len]` of `a` can be
/// repeated forever from some valuation.
///
/// # Safety
/// `a` must be a live handle, `path` must point to `len` indices and `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_iterability(
    a: *const TcAutomaton,
    path: *const usize,
    len: usize,
    out: *mut TcIterability,
) -> TcStatus {
    guarded(|| {
        let out = out_arg(out, "out")?;
        let tba = &ref_arg(a, "automaton")?.0;
        if path.is_null() || len == 0 {
            return Err(Fail(TcStatus::Path, "empty transition path".into()));
        }
        let idx = std::slice::from_raw_parts(path, len);
        let mut seq: Vec<Transition> = Vec::with_capacity(len);
        for &k in idx {
            let t = tba
                .transitions
                .get(k)
                .ok_or_else(|| Fail(TcStatus::Path, format!("no transition t{k}")))?;
            if seq.last().is_some_and(|p: &Transition| p.dst != t.src) {
                return Err(Fail(TcStatus::Path, format!("t{k} does not continue the path")));
            }
            seq.push(t.clone());
        }
        if seq[0].src != seq[len - 1].dst {
            return Err(Fail(TcStatus::Path, "the path is not a cycle".into()));
        }
        let res = analyze(&seq, tba.num_clocks());
        *out = TcIterability {
            iterable: u8::from(res.result.is_iterable()),
            compositions: res.compositions() as u64,
            squarings: res.squarings as u64,
        };
        Ok(())
    })
}
